use std::path::PathBuf;

use dgquot::category::{FreeCategory, FreeElem, Generator, TableCategory, Word};
use dgquot::examples::{a0, dual_numbers, i2, k_resolution, point};
use dgquot::linalg::Field;
use dgquot::quotient::build_example_i2;
use dgquot::quotient::random::{random_instance, Shape};
use dgquot_cli::format::{from_json, parse, render, to_json, CategoryFile, ParseError, Presented};
use proptest::prelude::*;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn table_file(c: TableCategory, subcategory: Vec<usize>) -> CategoryFile {
    CategoryFile { category: Presented::Table(c), subcategory }
}

fn i2_file() -> CategoryFile {
    let ex = build_example_i2(Field::Rational, -3, 3);
    table_file(ex.a, ex.b)
}

#[test]
fn bundled_i2_file_is_the_example() {
    let path = data("i2.dgcat");
    let want = render(&i2_file());
    if std::env::var_os("DGQUOT_BLESS").is_some() {
        std::fs::write(&path, &want).unwrap();
    }
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, want);
    assert_eq!(parse(&text).unwrap(), i2_file());
}

#[test]
fn round_trip_of_builtin_examples() {
    let q = Field::Rational;
    for c in [point(q), dual_numbers(q), a0(q), i2(q), a0(Field::Prime(7))] {
        let f = table_file(c, vec![0]);
        let text = render(&f);
        let back = parse(&text).unwrap();
        assert_eq!(back, f);
        assert_eq!(render(&back), text);
        assert_eq!(from_json(&to_json(&f)).unwrap(), f);
    }
}

#[test]
fn round_trip_of_free_category() {
    let k = k_resolution(Field::Rational);
    let f = CategoryFile { category: Presented::Free(k), subcategory: vec![] };
    let text = render(&f);
    assert!(text.contains("presentation free"));
    let back = parse(&text).unwrap();
    assert_eq!(back, f);
    assert_eq!(render(&back), text);
    assert_eq!(from_json(&to_json(&f)).unwrap(), f);
}

#[test]
fn render_parse_is_a_fixpoint_on_random_instances() {
    for seed in 0..20 {
        let inst = random_instance(seed, &Shape::default());
        let f = table_file(inst.category, inst.b);
        let once = render(&f);
        let twice = render(&parse(&once).unwrap());
        assert_eq!(once, twice, "seed {seed}");
    }
}

#[test]
fn non_canonical_input_is_normalized() {
    let text = "# a point\n\ndgcat 1\nfield Fp:5\nobjects P\npresentation table\nhom P P\n  basis id 0\nunit P = 6 id   # 6 = 1\ncompose P P P id id = 1 id\n";
    let f = parse(text).unwrap();
    let canonical = render(&f);
    assert_eq!(
        canonical,
        "dgcat 1\nfield Fp:5\nobjects P\npresentation table\nhom P P\n  basis id 0\nunit P = 1 id\ncompose P P P id id = 1 id\n"
    );
    assert_eq!(render(&parse(&canonical).unwrap()), canonical);
}

fn syntax(text: &str) -> (usize, usize) {
    match parse(text) {
        Err(ParseError::Syntax { line, column, .. }) => (line, column),
        other => panic!("expected a syntax error, got {other:?}"),
    }
}

#[test]
fn errors_carry_positions() {
    let head = "dgcat 1\nfield Q\nobjects P\npresentation table\n";
    assert_eq!(syntax("dgcat 2\n"), (1, 1));
    assert_eq!(syntax(&format!("{head}hom P Z\n")), (5, 7));
    assert_eq!(syntax(&format!("{head}hom P P\n  basis id x\n")), (6, 12));
    assert_eq!(syntax(&format!("{head}hom P P\n  basis id 0\nunit P = 1 idd\n")), (7, 12));
    assert_eq!(syntax(&format!("{head}hom P P\n  basis id 0\nunit P = 1/0 id\n")), (7, 10));
    assert_eq!(syntax(&format!("{head}frobnicate\n")), (5, 1));
}

#[test]
fn validation_failures_are_forwarded() {
    // the unit is missing
    let text = "dgcat 1\nfield Q\nobjects P\npresentation table\nhom P P\n  basis id 0\ncompose P P P id id = 1 id\n";
    assert!(matches!(parse(text), Err(ParseError::Invalid(r)) if !r.is_valid()));
    // d² ≠ 0 in a free category
    let text = "dgcat 1\nfield Q\nobjects X\npresentation free\ngenerator a X X -1\nd a = 1 id\ngenerator b X X -2\nd b = 1 a\n";
    assert!(matches!(parse(text), Err(ParseError::Invalid(_)) | Err(ParseError::Syntax { .. })));
}

#[test]
fn free_words_use_earlier_generators() {
    let text = "dgcat 1\nfield Q\nobjects X Y\npresentation free\ngenerator f X Y 0\ngenerator g Y X 0\ngenerator h X X -1\nd h = 1 g*f + -1 id\n";
    let f = parse(text).unwrap();
    let Presented::Free(c) = &f.category else { panic!("free") };
    let base = c.base().clone();
    let w = |gens: Vec<usize>| Word { source: 0, target: 0, base: vec![0; gens.len() + 1], gens };
    let mut d = FreeElem::zero();
    d.add_term(w(vec![0, 1]), &Field::Rational.one());
    d.add_term(w(vec![]), &Field::Rational.from_i64(-1));
    let want = FreeCategory::new(
        base,
        vec![
            Generator { name: "f".into(), source: 0, target: 1, degree: 0, d: FreeElem::zero() },
            Generator { name: "g".into(), source: 1, target: 0, degree: 0, d: FreeElem::zero() },
            Generator { name: "h".into(), source: 0, target: 0, degree: -1, d },
        ],
    )
    .unwrap();
    assert_eq!(c, &want);
    assert_eq!(syntax("dgcat 1\nfield Q\nobjects X\npresentation free\ngenerator h X X -1\nd h = 1 h\n"), (6, 9));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Junk never panics the parser, and whatever parses renders to a fixpoint.
    #[test]
    fn parser_is_total(lines in prop::collection::vec("[a-z0-9 =+*#/-]{0,24}", 0..12)) {
        let text = format!("dgcat 1\nfield Q\nobjects X Y\npresentation table\n{}", lines.join("\n"));
        if let Ok(f) = parse(&text) {
            let r = render(&f);
            prop_assert_eq!(render(&parse(&r).unwrap()), r);
        }
    }
}
