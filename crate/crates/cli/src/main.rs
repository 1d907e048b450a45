use clap::Parser;
use dgquot_cli::{run, Cli, INPUT_ERROR};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // exit code 2 means inconclusive, so usage errors count as input errors
            std::process::exit(if e.use_stderr() { INPUT_ERROR } else { 0 });
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.render(cli.format));
            std::process::exit(out.outcome.code());
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(INPUT_ERROR);
        }
    }
}
