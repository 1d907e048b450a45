//! The `.dgcat` text format and its json mirror.
//!
//! ```text
//! dgcat 1
//! field Q
//! objects X1 X2
//! presentation table
//! hom X1 X2
//!   basis f 0
//! unit X1 = 1 id
//! compose X1 X1 X2 f id = 1 f
//! ```
//!
//! In a table file `d NAME = …` after a `hom` header gives the differential
//! of a basis element and `compose X Y Z G F = …` the composite `G∘F` for
//! `G ∈ Hom(Y,Z)`, `F ∈ Hom(X,Y)`. A free file lists `generator NAME SRC
//! TGT DEGREE` lines, each optionally followed by `d NAME = …` whose words
//! are generator names joined by `*` (leftmost applied last) or `id`.
//! Combinations are `c name + c name + …` with exact coefficients, or `0`.

use std::collections::BTreeMap;
use std::fmt;

use dgquot::category::{FreeCategory, FreeElem, Generator, TableCategory, ValidationReport, Word};
use dgquot::linalg::{Complex, Field, Scalar, Vector};
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseError {
    Syntax { line: usize, column: usize, message: String },
    Invalid(ValidationReport),
    Json(String),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax { line, column, message } => write!(f, "{line}:{column}: {message}"),
            ParseError::Invalid(r) => {
                write!(f, "category fails validation:")?;
                for v in &r.violations {
                    write!(f, "\n  {}: {}", v.axiom, v.witness)?;
                }
                Ok(())
            }
            ParseError::Json(e) => write!(f, "json: {e}"),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Presented {
    Table(TableCategory),
    Free(FreeCategory),
}

impl Presented {
    pub fn objects(&self) -> &[String] {
        match self {
            Presented::Table(c) => c.objects(),
            Presented::Free(c) => c.objects(),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        match self {
            Presented::Table(c) => c.validate(),
            Presented::Free(c) => c.validate(),
        }
    }
}

/// A parsed category file: the category and an optional subcategory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CategoryFile {
    pub category: Presented,
    pub subcategory: Vec<usize>,
}

// ---------------------------------------------------------------- json mirror

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub coefficient: String,
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisEntry {
    pub name: String,
    pub degree: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Differential {
    pub of: String,
    pub value: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomBlock {
    pub source: String,
    pub target: String,
    pub basis: Vec<BasisEntry>,
    pub differential: Vec<Differential>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitEntry {
    pub object: String,
    pub value: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComposeEntry {
    pub objects: [String; 3],
    pub left: String,
    pub right: String,
    pub value: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorEntry {
    pub name: String,
    pub source: String,
    pub target: String,
    pub degree: i32,
    pub d: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Body {
    Table { homs: Vec<HomBlock>, units: Vec<UnitEntry>, compose: Vec<ComposeEntry> },
    Free { generators: Vec<GeneratorEntry> },
}

/// The canonical content of a file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub format_version: u32,
    pub field: String,
    pub objects: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subcategory: Vec<String>,
    pub presentation: Body,
}

fn terms(v: &Vector, names: &[String]) -> Vec<Term> {
    v.iter().map(|(i, c)| Term { coefficient: c.literal(), name: names[*i].clone() }).collect()
}

fn word_name(c: &FreeCategory, w: &Word) -> String {
    if w.gens.is_empty() {
        return "id".into();
    }
    let names: Vec<&str> = w.gens.iter().rev().map(|&g| c.generators()[g].name.as_str()).collect();
    names.join("*")
}

impl Document {
    pub fn from_file(file: &CategoryFile) -> Document {
        let objects = file.category.objects().to_vec();
        let subcategory = file.subcategory.iter().map(|&u| objects[u].clone()).collect();
        let (field, presentation) = match &file.category {
            Presented::Table(c) => (c.field(), table_body(c)),
            Presented::Free(c) => (c.field(), free_body(c)),
        };
        Document { format_version: FORMAT_VERSION, field: field.spec(), objects, subcategory, presentation }
    }
}

fn table_body(c: &TableCategory) -> Body {
    let n = c.num_objects();
    let mut homs = Vec::new();
    let mut compose = Vec::new();
    for x in 0..n {
        for y in 0..n {
            let h = c.hom(x, y);
            if h.dim() == 0 {
                continue;
            }
            let basis = (0..h.dim()).map(|i| BasisEntry { name: h.label(i).to_string(), degree: h.degree(i) }).collect();
            let differential = (0..h.dim())
                .filter(|&i| !h.d(i).is_zero())
                .map(|i| Differential { of: h.label(i).to_string(), value: terms(h.d(i), h.labels()) })
                .collect();
            homs.push(HomBlock { source: c.object_name(x).into(), target: c.object_name(y).into(), basis, differential });
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let (g, f) = (c.hom(y, z), c.hom(x, y));
                for i in 0..g.dim() {
                    for j in 0..f.dim() {
                        let v = c.compose_basis(x, y, z, i, j);
                        if v.is_zero() {
                            continue;
                        }
                        compose.push(ComposeEntry {
                            objects: [c.object_name(x).into(), c.object_name(y).into(), c.object_name(z).into()],
                            left: g.label(i).into(),
                            right: f.label(j).into(),
                            value: terms(v, c.hom(x, z).labels()),
                        });
                    }
                }
            }
        }
    }
    let units = (0..n)
        .map(|x| UnitEntry { object: c.object_name(x).into(), value: terms(c.unit(x), c.hom(x, x).labels()) })
        .collect();
    Body::Table { homs, units, compose }
}

fn free_body(c: &FreeCategory) -> Body {
    let generators = c
        .generators()
        .iter()
        .map(|g| GeneratorEntry {
            name: g.name.clone(),
            source: c.objects()[g.source].clone(),
            target: c.objects()[g.target].clone(),
            degree: g.degree,
            d: g.d.iter().map(|(w, s)| Term { coefficient: s.literal(), name: word_name(c, w) }).collect(),
        })
        .collect();
    Body::Free { generators }
}

// ---------------------------------------------------------------- rendering

fn render_terms(t: &[Term]) -> String {
    if t.is_empty() {
        return "0".into();
    }
    t.iter().map(|t| format!("{} {}", t.coefficient, t.name)).collect::<Vec<_>>().join(" + ")
}

pub fn render_document(doc: &Document) -> String {
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line(format!("dgcat {}", doc.format_version));
    line(format!("field {}", doc.field));
    line(format!("objects {}", doc.objects.join(" ")));
    match &doc.presentation {
        Body::Table { homs, units, compose } => {
            line("presentation table".into());
            if !doc.subcategory.is_empty() {
                line(format!("subcategory {}", doc.subcategory.join(" ")));
            }
            for h in homs {
                line(format!("hom {} {}", h.source, h.target));
                for b in &h.basis {
                    line(format!("  basis {} {}", b.name, b.degree));
                }
                for d in &h.differential {
                    line(format!("  d {} = {}", d.of, render_terms(&d.value)));
                }
            }
            for u in units {
                line(format!("unit {} = {}", u.object, render_terms(&u.value)));
            }
            for c in compose {
                let [x, y, z] = &c.objects;
                line(format!("compose {x} {y} {z} {} {} = {}", c.left, c.right, render_terms(&c.value)));
            }
        }
        Body::Free { generators } => {
            line("presentation free".into());
            if !doc.subcategory.is_empty() {
                line(format!("subcategory {}", doc.subcategory.join(" ")));
            }
            for g in generators {
                line(format!("generator {} {} {} {}", g.name, g.source, g.target, g.degree));
                if !g.d.is_empty() {
                    line(format!("d {} = {}", g.name, render_terms(&g.d)));
                }
            }
        }
    }
    out
}

/// Canonical text of a file.
pub fn render(file: &CategoryFile) -> String {
    render_document(&Document::from_file(file))
}

pub fn to_json(file: &CategoryFile) -> String {
    serde_json::to_string_pretty(&Document::from_file(file)).expect("documents serialize")
}

pub fn from_json(text: &str) -> Result<CategoryFile, ParseError> {
    let doc: Document = serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
    // the text form carries the same content; parsing it reuses every check
    parse(&render_document(&doc))
}

// ---------------------------------------------------------------- parsing

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (k, (i, ch)) in line.char_indices().enumerate() {
        if ch.is_whitespace() {
            if let Some((s, c)) = start.take() {
                out.push(Token { text: &line[s..i], column: c });
            }
        } else if start.is_none() {
            start = Some((i, k + 1));
        }
    }
    if let Some((s, c)) = start {
        out.push(Token { text: &line[s..], column: c });
    }
    out
}

struct Cursor {
    line: usize,
}

impl Cursor {
    fn err<T>(&self, column: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { line: self.line, column, message: message.into() })
    }
}

#[derive(Default)]
struct RawHom {
    basis: Vec<(String, i32)>,
    d: BTreeMap<usize, Vector>,
}

/// Parses `c name + c name + …` (or `0`) from `toks`; names are resolved by `lookup`.
fn parse_combination(
    cur: &Cursor,
    field: Field,
    toks: &[Token<'_>],
    mut lookup: impl FnMut(&str) -> Option<usize>,
) -> Result<Vec<(usize, Scalar)>, ParseError> {
    if toks.len() == 1 && toks[0].text == "0" {
        return Ok(vec![]);
    }
    let mut out = Vec::new();
    let mut k = 0;
    while k < toks.len() {
        if k > 0 {
            if toks[k].text != "+" {
                return cur.err(toks[k].column, format!("expected '+', found '{}'", toks[k].text));
            }
            k += 1;
        }
        let Some(c) = toks.get(k) else { return cur.err(0, "combination ends with '+'") };
        let Some(n) = toks.get(k + 1) else { return cur.err(c.column, "coefficient without a name") };
        let s = field.parse_scalar(c.text).or_else(|e| cur.err(c.column, e.to_string()))?;
        let Some(i) = lookup(n.text) else { return cur.err(n.column, format!("unknown name '{}'", n.text)) };
        out.push((i, s));
        k += 2;
    }
    Ok(out)
}

fn expect_eq(cur: &Cursor, toks: &[Token<'_>], at: usize) -> Result<(), ParseError> {
    match toks.get(at) {
        Some(t) if t.text == "=" => Ok(()),
        Some(t) => cur.err(t.column, "expected '='"),
        None => cur.err(0, "expected '='"),
    }
}

pub fn parse(text: &str) -> Result<CategoryFile, ParseError> {
    let mut cur = Cursor { line: 0 };
    let mut field: Option<Field> = None;
    let mut objects: Vec<String> = Vec::new();
    let mut mode: Option<&str> = None;
    let mut sub_names: Vec<(String, usize, usize)> = Vec::new();
    let mut homs: BTreeMap<(usize, usize), RawHom> = BTreeMap::new();
    let mut current: Option<(usize, usize)> = None;
    let mut units: BTreeMap<usize, Vector> = BTreeMap::new();
    let mut compose: BTreeMap<(usize, usize, usize, usize, usize), Vector> = BTreeMap::new();
    let mut gens: Vec<Generator> = Vec::new();
    let mut seen_header = false;

    for (ln, raw) in text.lines().enumerate() {
        cur.line = ln + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks = tokenize(content);
        let Some(head) = toks.first() else { continue };
        if !seen_header {
            if head.text != "dgcat" {
                return cur.err(head.column, "a file starts with 'dgcat <version>'");
            }
            match toks.get(1).map(|t| t.text.parse::<u32>()) {
                Some(Ok(FORMAT_VERSION)) => {}
                _ => return cur.err(head.column, format!("unsupported format version (expected {FORMAT_VERSION})")),
            }
            seen_header = true;
            continue;
        }
        let object = |t: &Token<'_>| -> Result<usize, ParseError> {
            objects
                .iter()
                .position(|o| o == t.text)
                .map_or_else(|| cur.err(t.column, format!("unknown object '{}'", t.text)), Ok)
        };
        let need = |n: usize| -> Result<(), ParseError> {
            if toks.len() < n {
                return cur.err(head.column, format!("'{}' needs {} fields", head.text, n - 1));
            }
            Ok(())
        };
        let Some(f) = field.or(if head.text == "field" { Some(Field::Rational) } else { None }) else {
            return cur.err(head.column, "'field' must come first");
        };
        match head.text {
            "field" => {
                need(2)?;
                if field.is_some() {
                    return cur.err(head.column, "duplicate 'field'");
                }
                field = Some(Field::parse(toks[1].text).or_else(|e| cur.err(toks[1].column, e.to_string()))?);
            }
            "objects" => {
                if !objects.is_empty() {
                    return cur.err(head.column, "duplicate 'objects'");
                }
                for t in &toks[1..] {
                    if objects.iter().any(|o| o == t.text) {
                        return cur.err(t.column, format!("duplicate object '{}'", t.text));
                    }
                    objects.push(t.text.to_string());
                }
            }
            "presentation" => {
                need(2)?;
                if mode.is_some() {
                    return cur.err(head.column, "duplicate 'presentation'");
                }
                mode = match toks[1].text {
                    "table" => Some("table"),
                    "free" => Some("free"),
                    other => return cur.err(toks[1].column, format!("unknown presentation '{other}'")),
                };
            }
            "subcategory" => {
                for t in &toks[1..] {
                    sub_names.push((t.text.to_string(), cur.line, t.column));
                }
            }
            "hom" if mode == Some("table") => {
                need(3)?;
                let key = (object(&toks[1])?, object(&toks[2])?);
                if homs.contains_key(&key) {
                    return cur.err(head.column, "duplicate hom block");
                }
                homs.insert(key, RawHom::default());
                current = Some(key);
            }
            "basis" if mode == Some("table") => {
                need(3)?;
                let Some(key) = current else { return cur.err(head.column, "'basis' outside a hom block") };
                let h = homs.get_mut(&key).expect("current block exists");
                if !h.d.is_empty() {
                    return cur.err(head.column, "'basis' after 'd' in the same block");
                }
                if h.basis.iter().any(|(n, _)| n == toks[1].text) || toks[1].text == "0" || toks[1].text == "+" {
                    return cur.err(toks[1].column, format!("bad or duplicate basis name '{}'", toks[1].text));
                }
                let deg = toks[2].text.parse::<i32>().or_else(|_| cur.err(toks[2].column, "degree must be an integer"))?;
                h.basis.push((toks[1].text.to_string(), deg));
            }
            "d" if mode == Some("table") => {
                need(4)?;
                let Some(key) = current else { return cur.err(head.column, "'d' outside a hom block") };
                let h = homs.get_mut(&key).expect("current block exists");
                let names: Vec<String> = h.basis.iter().map(|(n, _)| n.clone()).collect();
                let Some(i) = names.iter().position(|n| n == toks[1].text) else {
                    return cur.err(toks[1].column, format!("unknown basis element '{}'", toks[1].text));
                };
                expect_eq(&cur, &toks, 2)?;
                let v = parse_combination(&cur, f, &toks[3..], |s| names.iter().position(|n| n == s))?;
                if h.d.insert(i, Vector::from_entries(v)).is_some() {
                    return cur.err(head.column, "duplicate differential");
                }
            }
            "unit" if mode == Some("table") => {
                need(4)?;
                let x = object(&toks[1])?;
                expect_eq(&cur, &toks, 2)?;
                let names: Vec<String> = homs.get(&(x, x)).map_or(vec![], |h| h.basis.iter().map(|(n, _)| n.clone()).collect());
                let v = parse_combination(&cur, f, &toks[3..], |s| names.iter().position(|n| n == s))?;
                if units.insert(x, Vector::from_entries(v)).is_some() {
                    return cur.err(head.column, "duplicate unit");
                }
                current = None;
            }
            "compose" if mode == Some("table") => {
                need(8)?;
                let (x, y, z) = (object(&toks[1])?, object(&toks[2])?, object(&toks[3])?);
                let names = |a: usize, b: usize| -> Vec<String> {
                    homs.get(&(a, b)).map_or(vec![], |h| h.basis.iter().map(|(n, _)| n.clone()).collect())
                };
                let (gn, fnames, tn) = (names(y, z), names(x, y), names(x, z));
                let Some(i) = gn.iter().position(|n| n == toks[4].text) else {
                    return cur.err(toks[4].column, format!("'{}' is not in Hom({}, {})", toks[4].text, toks[2].text, toks[3].text));
                };
                let Some(j) = fnames.iter().position(|n| n == toks[5].text) else {
                    return cur.err(toks[5].column, format!("'{}' is not in Hom({}, {})", toks[5].text, toks[1].text, toks[2].text));
                };
                expect_eq(&cur, &toks, 6)?;
                let v = parse_combination(&cur, f, &toks[7..], |s| tn.iter().position(|n| n == s))?;
                if compose.insert((x, y, z, i, j), Vector::from_entries(v)).is_some() {
                    return cur.err(head.column, "duplicate composite");
                }
                current = None;
            }
            "generator" if mode == Some("free") => {
                need(5)?;
                let name = toks[1].text;
                if gens.iter().any(|g| g.name == name) || name == "id" || name.contains('*') {
                    return cur.err(toks[1].column, format!("bad or duplicate generator name '{name}'"));
                }
                let (s, t) = (object(&toks[2])?, object(&toks[3])?);
                let degree = toks[4].text.parse::<i32>().or_else(|_| cur.err(toks[4].column, "degree must be an integer"))?;
                gens.push(Generator { name: name.to_string(), source: s, target: t, degree, d: FreeElem::zero() });
            }
            "d" if mode == Some("free") => {
                need(4)?;
                let Some(k) = gens.iter().position(|g| g.name == toks[1].text) else {
                    return cur.err(toks[1].column, format!("unknown generator '{}'", toks[1].text));
                };
                if !gens[k].d.is_zero() {
                    return cur.err(head.column, "duplicate differential");
                }
                expect_eq(&cur, &toks, 2)?;
                let (s, t) = (gens[k].source, gens[k].target);
                let mut words: Vec<Word> = Vec::new();
                let mut bad: Option<String> = None;
                let v = parse_combination(&cur, f, &toks[3..], |w| {
                    let word = if w == "id" {
                        Some(vec![])
                    } else {
                        w.split('*').rev().map(|n| gens[..k].iter().position(|g| g.name == n)).collect::<Option<Vec<_>>>()
                    };
                    match word {
                        Some(gs) => {
                            let len = gs.len();
                            words.push(Word { source: s, target: t, gens: gs, base: vec![0; len + 1] });
                            Some(words.len() - 1)
                        }
                        None => {
                            bad = Some(w.to_string());
                            None
                        }
                    }
                });
                let v = match (v, bad) {
                    (Ok(v), _) => v,
                    (Err(ParseError::Syntax { line, column, .. }), Some(w)) => {
                        return Err(ParseError::Syntax {
                            line,
                            column,
                            message: format!("'{w}' is not a word in earlier generators"),
                        })
                    }
                    (Err(e), _) => return Err(e),
                };
                let mut e = FreeElem::zero();
                for (i, c) in v {
                    e.add_term(words[i].clone(), &c);
                }
                gens[k].d = e;
            }
            other => return cur.err(head.column, format!("unexpected '{other}' here")),
        }
    }
    if !seen_header {
        return cur.err(0, "empty file");
    }
    let Some(field) = field else { return cur.err(0, "missing 'field'") };
    let Some(mode) = mode else { return cur.err(0, "missing 'presentation'") };
    let mut subcategory = Vec::new();
    for (name, line, column) in &sub_names {
        match objects.iter().position(|o| o == name) {
            Some(i) => subcategory.push(i),
            None => return Err(ParseError::Syntax { line: *line, column: *column, message: format!("unknown object '{name}'") }),
        }
    }
    subcategory.sort_unstable();
    subcategory.dedup();
    let n = objects.len();
    let category = if mode == "table" {
        let mut complexes = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let c = match homs.remove(&(x, y)) {
                    Some(h) => {
                        let d = (0..h.basis.len()).map(|i| h.d.get(&i).cloned().unwrap_or_else(Vector::zero)).collect();
                        Complex::new(field, h.basis, d).or_else(|e| cur.err(0, format!("Hom({}, {}): {e}", objects[x], objects[y])))?
                    }
                    None => Complex::zero(field),
                };
                complexes.push(c);
            }
        }
        let unit_vec = (0..n).map(|x| units.get(&x).cloned().unwrap_or_else(Vector::zero)).collect();
        let c = TableCategory::from_fn(field, objects, complexes, unit_vec, |x, y, z, i, j| {
            compose.get(&(x, y, z, i, j)).cloned().unwrap_or_else(Vector::zero)
        })
        .or_else(|e| cur.err(0, e.to_string()))?;
        Presented::Table(c)
    } else {
        let base = TableCategory::discrete(field, objects);
        Presented::Free(FreeCategory::new(base, gens).or_else(|e| cur.err(0, e.to_string()))?)
    };
    let report = category.validate();
    if !report.is_valid() {
        return Err(ParseError::Invalid(report));
    }
    Ok(CategoryFile { category, subcategory })
}
