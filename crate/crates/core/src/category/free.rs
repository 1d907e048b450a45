//! DG categories freely generated over a Table base by a graded quiver.
//!
//! A morphism `X → Y` is a combination of words
//! `a_n g_n a_{n-1} … g_1 a_0` where the `g_i` are generators and the `a_i`
//! basis elements of the base Hom complexes. Units are the base units;
//! no relations are imposed beyond those of the base.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::linalg::sparse::accumulate;
use crate::linalg::{Complex, Field, Scalar, Vector};

use super::table::{Axiom, TableCategory, ValidationReport};

/// A composable word. `base[k]` sits between `gens[k-1]` and `gens[k]`;
/// `base[0]` starts at `source` and `base[n]` ends at `target`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    pub source: usize,
    pub target: usize,
    pub gens: Vec<usize>,
    pub base: Vec<usize>,
}

/// A finite combination of words with a common source and target.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreeElem {
    pub terms: BTreeMap<Word, Scalar>,
}

impl FreeElem {
    pub fn zero() -> Self {
        FreeElem::default()
    }

    pub fn word(w: Word, c: Scalar) -> Self {
        let mut e = FreeElem::zero();
        e.add_term(w, &c);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: Word, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(w);
        match slot {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add_scaled(&mut self, c: &Scalar, other: &FreeElem) {
        for (w, x) in &other.terms {
            self.add_term(w.clone(), &(c * x));
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub source: usize,
    pub target: usize,
    pub degree: i32,
    pub d: FreeElem,
}

/// A free DG category over a Table base.
///
/// Every generator carries a weight `w(g) = max(1, weight of d(g))`, where
/// the weight of a word is the sum of the weights of its letters. The span
/// of words of weight at most `W` is then a finite subcomplex `F_W`, and
/// `Hom = ⋃ F_W`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeCategory {
    base: TableCategory,
    generators: Vec<Generator>,
    weights: Vec<usize>,
}

impl FreeCategory {
    /// Generators must be listed so that `d(g)` only involves earlier generators.
    pub fn new(base: TableCategory, generators: Vec<Generator>) -> Result<Self> {
        let n = base.num_objects();
        let mut weights = Vec::with_capacity(generators.len());
        for (k, g) in generators.iter().enumerate() {
            if g.source >= n || g.target >= n {
                return Err(Error::UnknownObject(g.name.clone()));
            }
            let mut w = 1usize;
            for (word, c) in g.d.iter() {
                if !base.field().contains(c) {
                    return Err(Error::FieldMismatch(base.field().spec(), c.field().spec()));
                }
                if word.source != g.source || word.target != g.target {
                    return Err(Error::NonComposable(format!("d({}) has a term with wrong endpoints", g.name)));
                }
                if let Some(&later) = word.gens.iter().find(|&&h| h >= k) {
                    return Err(Error::Invalid(format!(
                        "d({}) involves {} which is not an earlier generator",
                        g.name,
                        generators.get(later).map_or("?", |h| h.name.as_str())
                    )));
                }
                w = w.max(word.gens.iter().map(|&h| weights[h]).sum());
            }
            weights.push(w);
        }
        let c = FreeCategory { base, generators, weights };
        for g in &c.generators {
            for (word, _) in g.d.iter() {
                c.check_word(word)?;
                if c.word_degree(word) != g.degree + 1 {
                    return Err(Error::DegreeMismatch(format!("d({}) is not of degree {}", g.name, g.degree + 1)));
                }
            }
        }
        Ok(c)
    }

    pub fn base(&self) -> &TableCategory {
        &self.base
    }

    pub fn field(&self) -> Field {
        self.base.field()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn weight(&self, g: usize) -> usize {
        self.weights[g]
    }

    pub fn num_objects(&self) -> usize {
        self.base.num_objects()
    }

    pub fn objects(&self) -> &[String] {
        self.base.objects()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    fn base_endpoints(&self, w: &Word, k: usize) -> (usize, usize) {
        let n = w.gens.len();
        let from = if k == 0 { w.source } else { self.generators[w.gens[k - 1]].target };
        let to = if k == n { w.target } else { self.generators[w.gens[k]].source };
        (from, to)
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        if w.base.len() != w.gens.len() + 1 {
            return Err(Error::NonComposable("word must alternate base and generator letters".into()));
        }
        for (k, &b) in w.base.iter().enumerate() {
            let (from, to) = self.base_endpoints(w, k);
            if b >= self.base.hom(from, to).dim() {
                return Err(Error::NonComposable(self.word_label(w)));
            }
        }
        if w.gens.iter().any(|&g| g >= self.generators.len()) {
            return Err(Error::NonComposable("unknown generator".into()));
        }
        Ok(())
    }

    /// A base morphism as an element of the free category.
    pub fn embed_base(&self, x: usize, y: usize, v: &Vector) -> FreeElem {
        let mut e = FreeElem::zero();
        for (i, c) in v.iter() {
            e.add_term(Word { source: x, target: y, gens: vec![], base: vec![*i] }, c);
        }
        e
    }

    /// `id_Y ∘ g ∘ id_X` expanded over the unit vectors.
    pub fn generator_elem(&self, g: usize) -> FreeElem {
        let gen = &self.generators[g];
        let mut e = FreeElem::zero();
        for (i, a) in self.base.unit(gen.source).iter() {
            for (j, b) in self.base.unit(gen.target).iter() {
                e.add_term(Word { source: gen.source, target: gen.target, gens: vec![g], base: vec![*i, *j] }, &(a * b));
            }
        }
        e
    }

    pub fn word_degree(&self, w: &Word) -> i32 {
        let mut d: i32 = w.gens.iter().map(|&g| self.generators[g].degree).sum();
        for (k, &b) in w.base.iter().enumerate() {
            let (from, to) = self.base_endpoints(w, k);
            d += self.base.hom(from, to).degree(b);
        }
        d
    }

    pub fn word_weight(&self, w: &Word) -> usize {
        w.gens.iter().map(|&g| self.weights[g]).sum()
    }

    pub fn word_label(&self, w: &Word) -> String {
        let mut parts = Vec::new();
        for k in (0..w.base.len()).rev() {
            let (from, to) = self.base_endpoints(w, k);
            let b = self.base.hom(from, to);
            let lab = if b.dim() > w.base[k] { b.label(w.base[k]).to_string() } else { "?".into() };
            let is_unit = from == to && *self.base.unit(from) == Vector::unit(w.base[k], self.field());
            if !is_unit || w.gens.is_empty() {
                parts.push(lab);
            }
            if k > 0 {
                parts.push(self.generators[w.gens[k - 1]].name.clone());
            }
        }
        parts.join("·")
    }

    /// `v ∘ u` for words with `v.source == u.target`.
    pub fn compose_words(&self, v: &Word, u: &Word) -> FreeElem {
        debug_assert_eq!(v.source, u.target);
        let nu = u.gens.len();
        let (uf, ut) = self.base_endpoints(u, nu);
        let (_, vt) = self.base_endpoints(v, 0);
        debug_assert_eq!(ut, v.source);
        let merged = self.base.compose(
            uf,
            ut,
            vt,
            &Vector::unit(v.base[0], self.field()),
            &Vector::unit(u.base[nu], self.field()),
        );
        let mut out = FreeElem::zero();
        for (m, c) in merged.iter() {
            let mut gens = u.gens.clone();
            gens.extend_from_slice(&v.gens);
            let mut base = u.base[..nu].to_vec();
            base.push(*m);
            base.extend_from_slice(&v.base[1..]);
            out.add_term(Word { source: u.source, target: v.target, gens, base }, c);
        }
        out
    }

    /// Bilinear composition `b ∘ a`.
    pub fn compose(&self, b: &FreeElem, a: &FreeElem) -> FreeElem {
        let mut out = FreeElem::zero();
        for (v, x) in b.iter() {
            for (u, y) in a.iter() {
                out.add_scaled(&(x * y), &self.compose_words(v, u));
            }
        }
        out
    }

    /// The prefix `a_n g_n … a_k` (from the source of `base[k]` to the target).
    fn suffix_from(&self, w: &Word, k: usize) -> Word {
        let (from, _) = self.base_endpoints(w, k);
        Word { source: from, target: w.target, gens: w.gens[k..].to_vec(), base: w.base[k..].to_vec() }
    }

    /// The part `a_{k} … g_1 a_0` (up to and including `base[k]`).
    fn prefix_to(&self, w: &Word, k: usize) -> Word {
        let (_, to) = self.base_endpoints(w, k);
        Word { source: w.source, target: to, gens: w.gens[..k].to_vec(), base: w.base[..=k].to_vec() }
    }

    /// The differential of a word, by the Leibniz rule
    /// `d(g∘f) = dg∘f + (-1)^{|g|} g∘df` applied letter by letter.
    pub fn d_word(&self, w: &Word) -> FreeElem {
        let field = self.field();
        let n = w.gens.len();
        let mut out = FreeElem::zero();
        let mut left_degree = 0i64;
        // letters from the left: base[n], gens[n-1], base[n-1], …, gens[0], base[0]
        for k in (0..=n).rev() {
            let (from, to) = self.base_endpoints(w, k);
            let hom = self.base.hom(from, to);
            let sign = field.sign(left_degree);
            for (b, c) in hom.d(w.base[k]).iter() {
                let mut nw = w.clone();
                nw.base[k] = *b;
                out.add_term(nw, &(&sign * c));
            }
            left_degree += hom.degree(w.base[k]) as i64;
            if k == 0 {
                break;
            }
            let g = w.gens[k - 1];
            let sign = field.sign(left_degree);
            let left = self.suffix_from(w, k);
            let right = self.prefix_to(w, k - 1);
            let dg = &self.generators[g].d;
            let inner = self.compose(&self.compose(&FreeElem::word(left, field.one()), dg), &FreeElem::word(right, field.one()));
            out.add_scaled(&sign, &inner);
            left_degree += self.generators[g].degree as i64;
        }
        out
    }

    pub fn d(&self, e: &FreeElem) -> FreeElem {
        let mut out = FreeElem::zero();
        for (w, c) in e.iter() {
            out.add_scaled(c, &self.d_word(w));
        }
        out
    }

    /// d² on generators and words of the base, composability of differentials.
    pub fn validate(&self) -> ValidationReport {
        let mut report = self.base.validate();
        for g in &self.generators {
            if !self.d(&g.d).is_zero() {
                report.push(Axiom::DSquared, format!("d²({}) ≠ 0", g.name));
            }
        }
        report
    }

    /// All words `X → Y` of weight at most `max_weight`, in canonical order.
    pub fn enumerate_words(&self, x: usize, y: usize, max_weight: usize, cap: usize) -> Result<Vec<Word>> {
        self.enumerate_words_in(x, y, max_weight, None, cap)
    }

    /// As `enumerate_words`, keeping only words with degree in the window.
    pub fn enumerate_words_in(&self, x: usize, y: usize, max_weight: usize, window: Option<(i32, i32)>, cap: usize) -> Result<Vec<Word>> {
        let mut out = Vec::new();
        let mut gens = Vec::new();
        self.enumerate_rec(x, y, x, max_weight, &mut gens, &mut out, window, cap)?;
        out.sort_by(|a, b| {
            self.word_weight(a)
                .cmp(&self.word_weight(b))
                .then_with(|| a.cmp(b))
        });
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn enumerate_rec(
        &self,
        x: usize,
        y: usize,
        cur: usize,
        budget: usize,
        gens: &mut Vec<usize>,
        out: &mut Vec<Word>,
        window: Option<(i32, i32)>,
        cap: usize,
    ) -> Result<()> {
        if self.base.hom(cur, y).dim() > 0 {
            let skeleton = Word { source: x, target: y, gens: gens.clone(), base: vec![0; gens.len() + 1] };
            let dims: Vec<usize> = (0..=gens.len())
                .map(|k| {
                    let (from, to) = self.base_endpoints(&skeleton, k);
                    self.base.hom(from, to).dim()
                })
                .collect();
            if dims.iter().all(|&d| d > 0) {
                let mut idx = vec![0usize; dims.len()];
                loop {
                    let w = Word { source: x, target: y, gens: gens.clone(), base: idx.clone() };
                    let inside = window.map_or(true, |(lo, hi)| {
                        let d = self.word_degree(&w);
                        d >= lo && d <= hi
                    });
                    if inside {
                        out.push(w);
                    }
                    if out.len() > cap {
                        return Err(Error::CapExceeded { size: out.len(), cap });
                    }
                    let mut p = 0;
                    while p < idx.len() {
                        idx[p] += 1;
                        if idx[p] < dims[p] {
                            break;
                        }
                        idx[p] = 0;
                        p += 1;
                    }
                    if p == idx.len() {
                        break;
                    }
                }
            }
        }
        for (g, gen) in self.generators.iter().enumerate() {
            if self.weights[g] <= budget && self.base.hom(cur, gen.source).dim() > 0 {
                gens.push(g);
                self.enumerate_rec(x, y, gen.target, budget - self.weights[g], gens, out, window, cap)?;
                gens.pop();
            }
        }
        Ok(())
    }

    /// The finite subcomplex `F_W ⊂ Hom(X,Y)` of words of weight at most
    /// `max_weight`, restricted to degrees `lo..=hi` when a window is given.
    pub fn hom_truncated(
        &self,
        x: usize,
        y: usize,
        max_weight: usize,
        window: Option<(i32, i32)>,
        cap: usize,
    ) -> Result<TruncatedHom> {
        let words = self.enumerate_words_in(x, y, max_weight, window, cap)?;
        let index: HashMap<&Word, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let mut d = Vec::with_capacity(words.len());
        for w in &words {
            let dw = self.d_word(w);
            let mut acc = BTreeMap::new();
            for (t, c) in dw.iter() {
                match index.get(t) {
                    Some(&i) => accumulate(&mut acc, i, c),
                    None => {
                        let deg = self.word_degree(t);
                        let outside = window.map_or(false, |(lo, hi)| deg < lo || deg > hi);
                        if !outside {
                            return Err(Error::Invalid(format!(
                                "d({}) leaves the weight filtration",
                                self.word_label(w)
                            )));
                        }
                    }
                }
            }
            d.push(Vector::from_map(acc));
        }
        let complex = Complex::from_parts(
            self.field(),
            words.iter().map(|w| self.word_label(w)).collect(),
            words.iter().map(|w| self.word_degree(w)).collect(),
            d,
            window.map(|(lo, hi)| (lo, hi)),
        );
        let levels = words.iter().map(|w| self.word_weight(w)).collect();
        Ok(TruncatedHom { source: x, target: y, max_weight, words, levels, complex })
    }

    /// The opposite free category: arrows reversed, words read backwards,
    /// signs from `g°∘f° = (-1)^{|f||g|}(f∘g)°`.
    pub fn opposite(&self) -> Result<FreeCategory> {
        let base_op = self.base.opposite();
        let mut gens = Vec::with_capacity(self.generators.len());
        for g in &self.generators {
            let mut d = FreeElem::zero();
            for (w, c) in g.d.iter() {
                let (ow, s) = self.opposite_word(w);
                d.add_term(ow, &(c * &s));
            }
            gens.push(Generator { name: g.name.clone(), source: g.target, target: g.source, degree: g.degree, d });
        }
        FreeCategory::new(base_op, gens)
    }

    /// A word of `C` read as a word of `C°`, with the Koszul sign of reversing it.
    pub fn opposite_word(&self, w: &Word) -> (Word, Scalar) {
        // letters left to right: base[n], gens[n-1], …, base[0]; reversing a
        // product of homogeneous letters costs (-1)^{Σ_{i<j} |l_i||l_j|}.
        let mut degs = Vec::new();
        for k in (0..w.base.len()).rev() {
            let (from, to) = self.base_endpoints(w, k);
            degs.push(self.base.hom(from, to).degree(w.base[k]) as i64);
            if k > 0 {
                degs.push(self.generators[w.gens[k - 1]].degree as i64);
            }
        }
        let mut exp = 0i64;
        let mut seen = 0i64;
        for d in degs {
            exp += seen * d;
            seen += d;
        }
        let mut gens = w.gens.clone();
        gens.reverse();
        let mut base = w.base.clone();
        base.reverse();
        (Word { source: w.target, target: w.source, gens, base }, self.field().sign(exp))
    }
}

/// `F_W ⊂ Hom(X, Y)` with the weight of each basis word.
#[derive(Clone, Debug)]
pub struct TruncatedHom {
    pub source: usize,
    pub target: usize,
    pub max_weight: usize,
    pub words: Vec<Word>,
    pub levels: Vec<usize>,
    pub complex: Complex,
}

impl TruncatedHom {
    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.words.iter().position(|u| u == w)
    }

    /// Expresses an element in the word basis; `None` if it leaves the truncation.
    pub fn vector_of(&self, e: &FreeElem) -> Option<Vector> {
        let index: HashMap<&Word, usize> = self.words.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let mut entries = Vec::new();
        for (w, c) in e.iter() {
            entries.push((*index.get(w)?, c.clone()));
        }
        Some(Vector::from_entries(entries))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rational
    }

    fn a0() -> FreeCategory {
        let base = TableCategory::discrete(q(), vec!["X1".into(), "X2".into()]);
        FreeCategory::new(base, vec![Generator { name: "f".into(), source: 0, target: 1, degree: 0, d: FreeElem::zero() }]).unwrap()
    }

    #[test]
    fn empty_quiver_gives_identity_only() {
        let c = FreeCategory::new(TableCategory::point(q(), "X"), vec![]).unwrap();
        let h = c.hom_truncated(0, 0, 5, None, 1000).unwrap();
        assert_eq!(h.complex.dim(), 1);
        assert_eq!(h.complex.betti(0).unwrap(), 1);
    }

    #[test]
    fn single_arrow() {
        let c = a0();
        assert_eq!(c.hom_truncated(0, 1, 3, None, 100).unwrap().complex.dim(), 1);
        assert_eq!(c.hom_truncated(1, 0, 3, None, 100).unwrap().complex.dim(), 0);
        let op = c.opposite().unwrap();
        assert_eq!(op.hom_truncated(1, 0, 3, None, 100).unwrap().complex.dim(), 1);
        assert_eq!(op.hom_truncated(0, 1, 3, None, 100).unwrap().complex.dim(), 0);
    }

    #[test]
    fn later_generators_are_rejected_in_differentials() {
        let base = TableCategory::point(q(), "X");
        let w = Word { source: 0, target: 0, gens: vec![1], base: vec![0, 0] };
        let r = FreeCategory::new(
            base,
            vec![
                Generator { name: "a".into(), source: 0, target: 0, degree: -1, d: FreeElem::word(w, q().one()) },
                Generator { name: "b".into(), source: 0, target: 0, degree: 0, d: FreeElem::zero() },
            ],
        );
        assert!(r.is_err());
    }
}
