//! Subcommands of the `dgquot` binary.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use dgquot::category::{
    check_quasi_equivalence_probed, semi_free_resolve_category, CategoryResolveBounds, ExtTable, QuasiBounds, TableCategory,
    Verdict,
};
use dgquot::examples::{cone_instance, k_broken_probe, k_broken_to_j, k_to_i2};
use dgquot::linalg::{Field, Vector};
use dgquot::modules::{lind_res_cone, ResolveBounds};
use dgquot::pretr::{ext_tr, TwistedComplex};
use dgquot::quotient::random::{random_instance, Shape};
use dgquot::quotient::{
    build_example_i2, class_survives, cone_formula_ext, cross_check, drinfeld_quotient, i2_functors, is_dg_quotient, quotient_ext,
    verdier_ext_via_orthogonal, ExtBounds, Route,
};
use serde_json::json;

use crate::format::{self, CategoryFile, ParseError, Presented};
use crate::report;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{}", located(path, source))]
    Parse { path: String, source: ParseError },
    #[error("computation failed: {0}")]
    Compute(#[from] dgquot::Error),
}

fn located(path: &str, e: &ParseError) -> String {
    match e {
        ParseError::Syntax { .. } => format!("{path}:{e}"),
        _ => format!("{path}: {e}"),
    }
}

/// How a command ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    /// A check answered no, or pipelines disagreed.
    Refuted,
    Inconclusive,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::Refuted => 1,
            Outcome::Inconclusive => 2,
        }
    }

    fn of(v: &Verdict) -> Outcome {
        match v {
            Verdict::Yes => Outcome::Ok,
            Verdict::No(_) => Outcome::Refuted,
            Verdict::Inconclusive(_) => Outcome::Inconclusive,
        }
    }
}

pub const INPUT_ERROR: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    SemiFree,
    Bar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Example {
    I2,
    I2Broken,
    K,
    KBroken,
}

/// `a:b` with `a ≤ b`.
pub fn parse_window(s: &str) -> Result<(i32, i32), String> {
    let (a, b) = s.split_once(':').ok_or("expected LO:HI")?;
    let lo: i32 = a.trim().parse().map_err(|_| format!("bad lower bound '{a}'"))?;
    let hi: i32 = b.trim().parse().map_err(|_| format!("bad upper bound '{b}'"))?;
    if lo > hi {
        return Err(format!("empty window {lo}:{hi}"));
    }
    Ok((lo, hi))
}

#[derive(Debug, Parser)]
#[command(name = "dgquot", version, about = "Small DG categories, their quotients and Ext tables")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct QuotientArgs {
    /// Degrees LO:HI.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    pub window: (i32, i32),
    /// Largest number of ε letters, or of bars on the bar route.
    #[arg(long)]
    pub max_level: usize,
    #[arg(long, default_value_t = 2)]
    pub stable: usize,
    #[arg(long, default_value_t = 8)]
    pub steps: usize,
    #[arg(long, value_enum, default_value = "semi-free")]
    pub route: RouteArg,
    /// Objects of B; defaults to the file's subcategory.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    pub b: Vec<String>,
}

impl QuotientArgs {
    fn bounds(&self) -> ExtBounds {
        ExtBounds {
            lo: self.window.0,
            hi: self.window.1,
            max_level: self.max_level,
            stable: self.stable,
            steps: self.steps,
            route: match self.route {
                RouteArg::SemiFree => Route::SemiFree,
                RouteArg::Bar => Route::Bar,
            },
            ..ExtBounds::default()
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a category file and check the axioms.
    Validate { file: PathBuf },
    /// Print the canonical text (or json) form of a category file.
    Render { file: PathBuf },
    /// Cohomology of Hom(X, Y) in a table category.
    Ext {
        file: PathBuf,
        x: String,
        y: String,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: (i32, i32),
    },
    /// Cohomology of Hom between two twisted complexes, e.g. "X2 + X1[1] ; q(0,1) = 1 f".
    PretrExt {
        file: PathBuf,
        x: String,
        y: String,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: (i32, i32),
    },
    /// Ext in the Drinfeld quotient A/B by the truncation, cone and Verdier routes.
    QuotientExt {
        file: PathBuf,
        x: String,
        y: String,
        #[command(flatten)]
        args: QuotientArgs,
    },
    /// All three routes on every pair (or the given pairs) with a comparison.
    CrossCheck {
        /// Category file; omit with --random.
        file: Option<PathBuf>,
        /// Pairs X:Y, comma separated.
        #[arg(long, value_delimiter = ',')]
        pairs: Vec<String>,
        /// Use a seeded random instance instead of a file.
        #[arg(long, requires = "seed")]
        random: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        args: QuotientArgs,
    },
    /// Semi-free resolution of Res_B h_Y and the B-orthogonality of its cone.
    Orthogonal {
        file: PathBuf,
        y: String,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: (i32, i32),
        #[arg(long, default_value_t = 8)]
        steps: usize,
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        b: Vec<String>,
    },
    /// A semi-free resolution of a table category, printed as a free category file.
    ResolveCategory {
        file: PathBuf,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true, default_value = "-2:2")]
        window: (i32, i32),
        #[arg(long, default_value_t = 12)]
        steps: usize,
    },
    /// Check the quotient property for a built-in functor.
    CheckQuotient {
        #[arg(value_enum)]
        example: Example,
        #[arg(long, default_value_t = 6)]
        steps: usize,
    },
    /// Run the arrow-with-cone example end to end.
    Demo {
        #[arg(value_enum, default_value = "i2")]
        example: Example,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true, default_value = "-3:3")]
        window: (i32, i32),
        #[arg(long, default_value_t = 8)]
        max_level: usize,
        #[arg(long, default_value_t = 2)]
        stable: usize,
    },
}

pub struct Output {
    pub text: String,
    pub json: serde_json::Value,
    pub outcome: Outcome,
}

impl Output {
    pub fn render(&self, f: OutputFormat) -> String {
        match f {
            OutputFormat::Text => self.text.clone(),
            OutputFormat::Json => serde_json::to_string_pretty(&self.json).expect("json values serialize") + "\n",
        }
    }
}

fn verdict_json(v: &Verdict) -> serde_json::Value {
    match v {
        Verdict::Yes => json!({ "verdict": "yes" }),
        Verdict::No(w) => json!({ "verdict": "no", "witness": w }),
        Verdict::Inconclusive(w) => json!({ "verdict": "inconclusive", "reason": w }),
    }
}

fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::Yes => "yes".into(),
        Verdict::No(w) => format!("no: {w}"),
        Verdict::Inconclusive(w) => format!("inconclusive: {w}"),
    }
}

pub fn load(path: &Path) -> Result<CategoryFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let parsed = if text.trim_start().starts_with('{') { format::from_json(&text) } else { format::parse(&text) };
    parsed.map_err(|source| CliError::Parse { path: path.display().to_string(), source })
}

fn table(file: &CategoryFile) -> Result<&TableCategory, CliError> {
    match &file.category {
        Presented::Table(c) => Ok(c),
        Presented::Free(_) => Err(CliError::Input("this command needs a table presentation".into())),
    }
}

fn object(c: &TableCategory, name: &str) -> Result<usize, CliError> {
    c.object_index(name).map_err(|_| CliError::Input(format!("unknown object '{name}'")))
}

fn subcategory(c: &TableCategory, file: &CategoryFile, names: &[String]) -> Result<Vec<usize>, CliError> {
    if names.is_empty() {
        return Ok(file.subcategory.clone());
    }
    names.iter().map(|n| object(c, n)).collect()
}

/// `NAME[shift] + … ; q(i,j) = c b + … ; …`, summands in order.
pub fn parse_twisted(base: &TableCategory, spec: &str) -> Result<TwistedComplex, CliError> {
    let bad = |m: String| CliError::Input(format!("twisted complex '{spec}': {m}"));
    let mut parts = spec.split(';');
    let head = parts.next().unwrap_or("").trim();
    let mut summands = Vec::new();
    if head != "0" {
        for s in head.split('+') {
            let s = s.trim();
            let (name, shift) = match s.split_once('[') {
                Some((n, r)) => {
                    let r = r.strip_suffix(']').ok_or_else(|| bad(format!("unclosed shift in '{s}'")))?;
                    (n.trim(), r.trim().parse::<i32>().map_err(|_| bad(format!("bad shift in '{s}'")))?)
                }
                None => (s, 0),
            };
            summands.push((object(base, name)?, shift));
        }
    }
    let mut q = BTreeMap::new();
    for entry in parts {
        let entry = entry.trim();
        if entry.is_empty() {
            continue;
        }
        let (lhs, rhs) = entry.split_once('=').ok_or_else(|| bad(format!("expected q(i,j) = … in '{entry}'")))?;
        let ij = lhs.trim().strip_prefix("q(").and_then(|r| r.strip_suffix(')')).ok_or_else(|| bad(format!("bad entry '{lhs}'")))?;
        let (i, j) = ij.split_once(',').ok_or_else(|| bad(format!("bad entry '{lhs}'")))?;
        let (i, j): (usize, usize) = (
            i.trim().parse().map_err(|_| bad(format!("bad index '{i}'")))?,
            j.trim().parse().map_err(|_| bad(format!("bad index '{j}'")))?,
        );
        if i >= j || j >= summands.len() {
            return Err(bad(format!("q({i},{j}) is not above the diagonal")));
        }
        let h = base.hom(summands[j].0, summands[i].0);
        let toks: Vec<&str> = rhs.split_whitespace().collect();
        let mut v = Vector::zero();
        if toks != ["0"] {
            for term in toks.split(|t| *t == "+") {
                let [c, n] = term else { return Err(bad(format!("bad term '{}'", term.join(" ")))) };
                let c = base.field().parse_scalar(c).map_err(|e| bad(e.to_string()))?;
                let k = h.labels().iter().position(|l| l == n).ok_or_else(|| bad(format!("'{n}' is not a basis element")))?;
                v = v.add(&Vector::from_entries([(k, c)]));
            }
        }
        q.insert((i, j), v);
    }
    TwistedComplex::new(base, summands, q).map_err(|e| bad(e.to_string()))
}

fn ext_output(title: &str, t: &ExtTable) -> Output {
    Output {
        text: report::ext_table(title, t),
        json: json!({ "title": title, "table": t }),
        outcome: if t.all_certified() { Outcome::Ok } else { Outcome::Inconclusive },
    }
}

fn parse_pair(c: &TableCategory, s: &str) -> Result<(usize, usize), CliError> {
    let (x, y) = s.split_once(':').ok_or_else(|| CliError::Input(format!("expected X:Y, got '{s}'")))?;
    Ok((object(c, x.trim())?, object(c, y.trim())?))
}

fn cross_output(a: &TableCategory, b: &[usize], pairs: Option<&[(usize, usize)]>, bounds: &ExtBounds) -> Result<Output, CliError> {
    let r = cross_check(a, b, pairs, bounds)?;
    let names = a.objects().to_vec();
    let outcome = if r.discrepancies().is_empty() { Outcome::Ok } else { Outcome::Refuted };
    Ok(Output {
        text: report::cross_check(&r, &names),
        json: json!({ "objects": names, "b": b, "report": r, "discrepancies": r.discrepancies() }),
        outcome,
    })
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Validate { file } => {
            let text = std::fs::read_to_string(file).map_err(|e| CliError::Input(format!("{}: {e}", file.display())))?;
            let parsed = if text.trim_start().starts_with('{') { format::from_json(&text) } else { format::parse(&text) };
            match parsed {
                Ok(f) => Ok(Output {
                    text: format!("valid: {} objects\n", f.category.objects().len()),
                    json: json!({ "valid": true, "objects": f.category.objects() }),
                    outcome: Outcome::Ok,
                }),
                Err(ParseError::Invalid(r)) => Ok(Output {
                    text: format!("{}\n", ParseError::Invalid(r.clone())),
                    json: json!({
                        "valid": false,
                        "violations": r.violations.iter().map(|v| json!({ "axiom": v.axiom.to_string(), "witness": v.witness })).collect::<Vec<_>>(),
                    }),
                    outcome: Outcome::Refuted,
                }),
                Err(source) => Err(CliError::Parse { path: file.display().to_string(), source }),
            }
        }
        Command::Render { file } => {
            let f = load(file)?;
            let json: serde_json::Value = serde_json::from_str(&format::to_json(&f)).expect("rendered json parses");
            Ok(Output { text: format::render(&f), json, outcome: Outcome::Ok })
        }
        Command::Ext { file, x, y, window } => {
            let f = load(file)?;
            let c = table(&f)?;
            let (x, y) = (object(c, x)?, object(c, y)?);
            let t = ExtTable::exact_from(c.hom(x, y), window.0, window.1)?;
            Ok(ext_output(&format!("H Hom({}, {})", c.object_name(x), c.object_name(y)), &t))
        }
        Command::PretrExt { file, x, y, window } => {
            let f = load(file)?;
            let c = table(&f)?;
            let (tx, ty) = (parse_twisted(c, x)?, parse_twisted(c, y)?);
            let t = ext_tr(c, &tx, &ty, window.0, window.1)?;
            Ok(ext_output(&format!("H Hom({}, {})", tx.label(c), ty.label(c)), &t))
        }
        Command::QuotientExt { file, x, y, args } => {
            let f = load(file)?;
            let a = table(&f)?;
            let b = subcategory(a, &f, &args.b)?;
            let (x, y) = (object(a, x)?, object(a, y)?);
            let bounds = args.bounds();
            let q = drinfeld_quotient(a, &b)?;
            let t1 = quotient_ext(&q, x, y, &bounds)?;
            let t2 = cone_formula_ext(a, &b, x, y, &bounds)?;
            let t3 = verdier_ext_via_orthogonal(a, &b, x, y, &bounds)?;
            let title = |route: &str| format!("{route}: H Hom_{{A/B}}({}, {})", a.object_name(x), a.object_name(y));
            let mut text = report::ext_table(&title("truncation"), &t1);
            text += &report::ext_table(&title("cone"), &t2);
            text += &report::ext_table(&title("verdier"), &t3.table);
            text += &format!("verdier orthogonality: {}\n", verdict_text(&t3.orthogonal));
            let certified = t1.all_certified() || t2.all_certified() || (t3.authoritative && t3.table.all_certified());
            Ok(Output {
                text,
                json: json!({
                    "truncation": t1,
                    "cone": t2,
                    "verdier": { "table": t3.table, "orthogonal": verdict_json(&t3.orthogonal), "authoritative": t3.authoritative },
                }),
                outcome: if certified { Outcome::Ok } else { Outcome::Inconclusive },
            })
        }
        Command::CrossCheck { file, pairs, random, seed, args } => {
            let bounds = args.bounds();
            if *random {
                let inst = random_instance(seed.expect("clap requires --seed"), &Shape::default());
                let mut out = cross_output(&inst.category, &inst.b, None, &bounds)?;
                out.text = format!("random instance {} over {}\n{}", inst.seed, inst.category.field().spec(), out.text);
                return Ok(out);
            }
            let file = file.as_ref().ok_or_else(|| CliError::Input("cross-check needs a file or --random --seed".into()))?;
            let f = load(file)?;
            let a = table(&f)?;
            let b = subcategory(a, &f, &args.b)?;
            let pairs: Vec<(usize, usize)> = pairs.iter().map(|p| parse_pair(a, p)).collect::<Result<_, _>>()?;
            cross_output(a, &b, if pairs.is_empty() { None } else { Some(&pairs) }, &bounds)
        }
        Command::Orthogonal { file, y, window, steps, b } => {
            let f = load(file)?;
            let a = table(&f)?;
            let bs = subcategory(a, &f, b)?;
            let y = object(a, y)?;
            let l = lind_res_cone(a, y, &bs, ResolveBounds { steps: *steps, lo: window.0, hi: window.1, all_degrees: true })?;
            let gens: Vec<String> = l
                .resolution
                .module
                .generators()
                .iter()
                .map(|g| format!("{} at {} in degree {}", g.label, a.object_name(g.object), g.degree))
                .collect();
            let r = &l.resolution.report;
            let mut text = format!("resolution of Res_B h_{}: {} generators\n", a.object_name(y), gens.len());
            for g in &gens {
                text += &format!("  {g}\n");
            }
            text += &format!("complete: {}\n", r.complete);
            text += &format!("cone in B-orthogonal on {}:{}: {}\n", window.0, window.1, verdict_text(&l.orthogonal));
            text += &format!("acyclic on B in every degree: {}\n", l.orthogonal_everywhere);
            Ok(Output {
                text,
                json: json!({
                    "generators": gens,
                    "report": r,
                    "orthogonal": verdict_json(&l.orthogonal),
                    "orthogonal_everywhere": l.orthogonal_everywhere,
                }),
                outcome: Outcome::of(&l.orthogonal),
            })
        }
        Command::ResolveCategory { file, window, steps } => {
            let f = load(file)?;
            let c = table(&f)?;
            let bounds = CategoryResolveBounds { steps: *steps, lo: window.0, hi: window.1, ..CategoryResolveBounds::default() };
            let r = semi_free_resolve_category(c, bounds)?;
            let out = CategoryFile { category: Presented::Free(r.category.clone()), subcategory: f.subcategory.clone() };
            let images: Vec<String> = r
                .functor
                .images
                .iter()
                .zip(r.category.generators())
                .map(|(v, g)| format!("{} ↦ {}", g.name, c.hom(g.source, g.target).format_vector(v)))
                .collect();
            let mut text = format!(
                "# {} generators, exhausted: {}, quasi-equivalence: {}\n",
                r.report.generators_added,
                r.report.exhausted,
                verdict_text(&r.report.verdict)
            );
            for i in &images {
                text += &format!("# {i}\n");
            }
            text += &format::render(&out);
            let doc: serde_json::Value = serde_json::from_str(&format::to_json(&out)).expect("rendered json parses");
            Ok(Output {
                text,
                json: json!({
                    "category": doc,
                    "images": images,
                    "exhausted": r.report.exhausted,
                    "verdict": verdict_json(&r.report.verdict),
                }),
                outcome: Outcome::of(&r.report.verdict),
            })
        }
        Command::CheckQuotient { example, steps } => {
            let field = Field::Rational;
            let v = match example {
                Example::K => check_quasi_equivalence_probed(&k_to_i2(field), &[], QuasiBounds::default()),
                Example::KBroken => {
                    check_quasi_equivalence_probed(&k_broken_to_j(field), &[k_broken_probe(field)], QuasiBounds::default())
                }
                _ => {
                    let (good, broken) = i2_functors(field)?;
                    let xi = if *example == Example::I2 { good } else { broken };
                    let b = vec![cone_instance(field).cone_index];
                    is_dg_quotient(&xi, &b, ResolveBounds { steps: *steps, lo: -3, hi: 3, all_degrees: true })?
                }
            };
            Ok(Output {
                text: format!("{}\n", verdict_text(&v)),
                json: verdict_json(&v),
                outcome: Outcome::of(&v),
            })
        }
        Command::Demo { example, window, max_level, stable } => {
            if *example != Example::I2 {
                return Err(CliError::Input("demo runs the i2 example".into()));
            }
            demo_i2(ExtBounds { lo: window.0, hi: window.1, max_level: *max_level, stable: *stable, ..ExtBounds::default() })
        }
    }
}

fn demo_i2(bounds: ExtBounds) -> Result<Output, CliError> {
    let ex = build_example_i2(Field::Rational, bounds.lo, bounds.hi);
    let pairs: Vec<(usize, usize)> = ex.expected.keys().copied().collect();
    let mut out = cross_output(&ex.a, &ex.b, Some(&pairs), &bounds)?;
    let r: dgquot::quotient::CrossCheckReport =
        serde_json::from_value(out.json["report"].clone()).expect("report round-trips");
    let mut matches = true;
    let mut lines = String::new();
    let q = drinfeld_quotient(&ex.a, &ex.b)?;
    for (&(x, y), want) in &ex.expected {
        let Some(p) = r.table(x, y) else { return Err(CliError::Input("pair missing from report".into())) };
        // every pipeline, every degree, certified and equal to the expected value
        let ok = p.degrees.len() == want.dims.len()
            && p.degrees.iter().all(|d| {
                [&d.truncation, &d.cone, &d.verdier]
                    .iter()
                    .all(|e| e.status.is_certified() && Some(&e.dim) == want.dims.get(&d.degree))
            });
        // the named generator, when it is a morphism of A, spans a surviving class
        let h = ex.a.hom(x, y);
        let survives = match h.labels().iter().position(|l| l == want.generator) {
            Some(i) => Some(class_survives(&q, x, y, &Vector::unit(i, Field::Rational), bounds.max_level, bounds.cap)?),
            None => None,
        };
        let ok = ok && survives != Some(false);
        matches &= ok;
        lines += &format!(
            "{} -> {}: H^0 spanned by {}{}, {}\n",
            ex.a.object_name(x),
            ex.a.object_name(y),
            want.generator,
            match survives {
                Some(true) => " (class survives)",
                Some(false) => " (class dies)",
                None => "",
            },
            if ok { "as expected" } else { "UNEXPECTED" }
        );
    }
    out.text = format!("A = {{X1, X2, Cone(f)}} over A0, B = {{Cone(f)}}\n{}{}", out.text, lines);
    out.json["matches_expected"] = json!(matches);
    if !matches {
        out.outcome = Outcome::Refuted;
    }
    Ok(out)
}
