//! Sparse vectors, sparse matrices and incremental row reduction.

use std::collections::BTreeMap;

use super::field::{Field, Scalar};

/// A sparse vector: entries sorted by index, no explicit zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Vector {
    entries: Vec<(usize, Scalar)>,
}

impl Vector {
    pub fn zero() -> Self {
        Vector { entries: Vec::new() }
    }

    pub fn unit(index: usize, field: Field) -> Self {
        Vector { entries: vec![(index, field.one())] }
    }

    /// Builds a vector from unsorted entries, summing duplicates and dropping zeros.
    pub fn from_entries(entries: impl IntoIterator<Item = (usize, Scalar)>) -> Self {
        let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (i, c) in entries {
            accumulate(&mut acc, i, &c);
        }
        Self::from_map(acc)
    }

    pub(crate) fn from_map(acc: BTreeMap<usize, Scalar>) -> Self {
        Vector { entries: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, Scalar)> {
        self.entries.iter()
    }

    pub fn entries(&self) -> &[(usize, Scalar)] {
        &self.entries
    }

    pub fn get(&self, index: usize) -> Option<&Scalar> {
        self.entries
            .binary_search_by_key(&index, |(i, _)| *i)
            .ok()
            .map(|k| &self.entries[k].1)
    }

    pub fn leading(&self) -> Option<usize> {
        self.entries.first().map(|(i, _)| *i)
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|(i, _)| *i)
    }

    pub fn scale(&self, c: &Scalar) -> Vector {
        if c.is_zero() {
            return Vector::zero();
        }
        Vector { entries: self.entries.iter().map(|(i, x)| (*i, x * c)).collect() }
    }

    pub fn neg(&self) -> Vector {
        Vector { entries: self.entries.iter().map(|(i, x)| (*i, -x)).collect() }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: &Scalar, other: &Vector) -> Vector {
        if c.is_zero() || other.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, c * y));
                        b.next();
                    } else {
                        let s = x + &(c * y);
                        if !s.is_zero() {
                            out.push((*i, s));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, c * y));
                    b.next();
                }
                (None, None) => break,
            }
        }
        Vector { entries: out }
    }

    pub fn add(&self, other: &Vector) -> Vector {
        match other.entries.first() {
            None => self.clone(),
            Some((_, c)) => self.add_scaled(&c.field().one(), other),
        }
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        match other.entries.first() {
            None => self.clone(),
            Some((_, c)) => self.add_scaled(&c.field().from_i64(-1), other),
        }
    }

    /// Re-indexes entries; `f` must be injective on the support.
    pub fn reindex(&self, f: impl Fn(usize) -> usize) -> Vector {
        Vector::from_entries(self.entries.iter().map(|(i, c)| (f(*i), c.clone())))
    }

    /// Keeps entries whose index maps to `Some`, re-indexed.
    pub fn filter_map_index(&self, f: impl Fn(usize) -> Option<usize>) -> Vector {
        Vector::from_entries(
            self.entries.iter().filter_map(|(i, c)| f(*i).map(|j| (j, c.clone()))),
        )
    }

    pub fn dot(&self, other: &Vector) -> Option<Scalar> {
        let mut acc: Option<Scalar> = None;
        for (i, x) in &self.entries {
            if let Some(y) = other.get(*i) {
                let p = x * y;
                acc = Some(match acc {
                    Some(a) => &a + &p,
                    None => p,
                });
            }
        }
        acc
    }
}

pub(crate) fn accumulate(acc: &mut BTreeMap<usize, Scalar>, i: usize, c: &Scalar) {
    if c.is_zero() {
        return;
    }
    match acc.get_mut(&i) {
        Some(x) => {
            *x = &*x + c;
            if x.is_zero() {
                acc.remove(&i);
            }
        }
        None => {
            acc.insert(i, c.clone());
        }
    }
}

/// A sparse matrix stored column by column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    columns: Vec<Vector>,
}

impl SparseMatrix {
    pub fn new(rows: usize, columns: Vec<Vector>) -> Self {
        debug_assert!(columns.iter().all(|c| c.max_index().map_or(true, |m| m < rows)));
        SparseMatrix { rows, columns }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, columns: vec![Vector::zero(); cols] }
    }

    pub fn from_triplets(rows: usize, cols: usize, entries: impl IntoIterator<Item = (usize, usize, Scalar)>) -> Self {
        let mut per_col: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); cols];
        for (r, c, x) in entries {
            assert!(r < rows && c < cols, "index out of range");
            per_col[c].push((r, x));
        }
        SparseMatrix { rows, columns: per_col.into_iter().map(Vector::from_entries).collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &Vector {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vector] {
        &self.columns
    }

    pub fn get(&self, r: usize, c: usize) -> Option<&Scalar> {
        self.columns[c].get(r)
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        let mut acc = BTreeMap::new();
        for (j, x) in v.iter() {
            for (i, y) in self.columns[*j].iter() {
                accumulate(&mut acc, *i, &(x * y));
            }
        }
        Vector::from_map(acc)
    }

    /// `self * other`.
    pub fn compose(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols(), other.rows());
        SparseMatrix { rows: self.rows, columns: other.columns.iter().map(|c| self.apply(c)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vector::is_zero)
    }

    pub fn rank(&self) -> usize {
        rank(&self.columns)
    }
}

/// Incremental row reduction. Each stored vector is normalized so that its
/// smallest index (the pivot) carries coefficient one.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    pivots: BTreeMap<usize, usize>,
    rows: Vec<Vector>,
    combos: Vec<Vector>,
    track: bool,
}

/// Outcome of inserting a vector.
pub enum Insert {
    /// Independent of the previous vectors; the new pivot index.
    Pivot(usize),
    /// Dependent; the combination of inserted tags that sums to it (tracked mode only).
    Dependent(Vector),
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    /// Tracks, for every stored vector, the combination of caller tags producing it.
    pub fn tracking() -> Self {
        Echelon { track: true, ..Echelon::default() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivot_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    pub fn is_pivot(&self, i: usize) -> bool {
        self.pivots.contains_key(&i)
    }

    /// Reduces `v` against the stored vectors: the remainder has no entry at
    /// any pivot index. Returns the remainder and (in tracked mode) the
    /// combination of tags that was subtracted.
    pub fn reduce(&self, v: &Vector) -> (Vector, Vector) {
        let mut acc: BTreeMap<usize, Scalar> = v.iter().cloned().collect();
        let mut combo: BTreeMap<usize, Scalar> = BTreeMap::new();
        let mut cursor = 0usize;
        loop {
            let next = acc.range(cursor..).next().map(|(i, c)| (*i, c.clone()));
            let Some((i, c)) = next else { break };
            if let Some(&k) = self.pivots.get(&i) {
                let neg = -&c;
                for (j, x) in self.rows[k].iter() {
                    accumulate(&mut acc, *j, &(&neg * x));
                }
                if self.track {
                    for (j, x) in self.combos[k].iter() {
                        accumulate(&mut combo, *j, &(&c * x));
                    }
                }
            }
            cursor = i + 1;
        }
        (Vector::from_map(acc), Vector::from_map(combo))
    }

    /// Inserts `v` with caller tag `tag` (a unit vector in tag space is typical).
    pub fn insert_tagged(&mut self, v: &Vector, tag: Vector) -> Insert {
        let (rem, sub) = self.reduce(v);
        match rem.leading() {
            None => Insert::Dependent(if self.track { sub } else { Vector::zero() }),
            Some(p) => {
                let lead = rem.get(p).unwrap().inv().unwrap();
                let row = rem.scale(&lead);
                if self.track {
                    // row = lead * (v - sub), where v corresponds to `tag`
                    let combo = tag.sub(&sub).scale(&lead);
                    self.combos.push(combo);
                }
                self.pivots.insert(p, self.rows.len());
                self.rows.push(row);
                Insert::Pivot(p)
            }
        }
    }

    pub fn insert(&mut self, v: &Vector) -> bool {
        matches!(self.insert_tagged(v, Vector::zero()), Insert::Pivot(_))
    }

    pub fn contains(&self, v: &Vector) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// Tracked mode: writes `v` as a combination of tags, if it lies in the span.
    pub fn express(&self, v: &Vector) -> Option<Vector> {
        let (rem, combo) = self.reduce(v);
        rem.is_zero().then_some(combo)
    }
}

/// Rank of a set of vectors.
pub fn rank(vectors: &[Vector]) -> usize {
    let mut order: Vec<&Vector> = vectors.iter().filter(|v| !v.is_zero()).collect();
    order.sort_by_key(|v| v.nnz());
    let mut ech = Echelon::new();
    for v in order {
        ech.insert(v);
    }
    ech.rank()
}

/// Kernel of the map whose `j`-th column is `columns[j]`, as vectors in column space.
pub fn kernel(columns: &[Vector], field: Field) -> Vec<Vector> {
    let mut ech = Echelon::tracking();
    let mut out = Vec::new();
    for (j, c) in columns.iter().enumerate() {
        let tag = Vector::unit(j, field);
        if let Insert::Dependent(sub) = ech.insert_tagged(c, tag.clone()) {
            out.push(tag.sub(&sub));
        }
    }
    out
}

/// Some `x` with `sum_j x_j columns[j] = target`, if one exists.
pub fn solve(columns: &[Vector], target: &Vector, field: Field) -> Option<Vector> {
    let mut ech = Echelon::tracking();
    for (j, c) in columns.iter().enumerate() {
        ech.insert_tagged(c, Vector::unit(j, field));
    }
    ech.express(target)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Scalar {
        Field::Rational.from_i64(n)
    }

    #[test]
    fn vector_arithmetic_drops_zeros() {
        let a = Vector::from_entries([(0, q(1)), (2, q(3))]);
        let b = Vector::from_entries([(2, q(3)), (5, q(1))]);
        let d = a.sub(&b);
        assert_eq!(d, Vector::from_entries([(0, q(1)), (5, q(-1))]));
        assert!(a.sub(&a).is_zero());
        assert_eq!(Vector::from_entries([(1, q(2)), (1, q(-2))]), Vector::zero());
    }

    #[test]
    fn rank_kernel_solve() {
        // columns: e0+e1, e1+e2, e0-e2 (dependent: c0 - c1 = c2)
        let cols = vec![
            Vector::from_entries([(0, q(1)), (1, q(1))]),
            Vector::from_entries([(1, q(1)), (2, q(1))]),
            Vector::from_entries([(0, q(1)), (2, q(-1))]),
        ];
        assert_eq!(rank(&cols), 2);
        let ker = kernel(&cols, Field::Rational);
        assert_eq!(ker.len(), 1);
        let m = SparseMatrix::new(3, cols.clone());
        assert!(m.apply(&ker[0]).is_zero());
        let t = Vector::from_entries([(0, q(2)), (1, q(3)), (2, q(1))]);
        let x = solve(&cols, &t, Field::Rational).unwrap();
        assert_eq!(m.apply(&x), t);
        assert!(solve(&cols, &Vector::unit(0, Field::Rational), Field::Rational).is_none());
    }

    #[test]
    fn matrix_compose() {
        let f = Field::prime(5).unwrap();
        let a = SparseMatrix::from_triplets(2, 2, [(0, 1, f.one()), (1, 0, f.one())]);
        let id = a.compose(&a);
        assert_eq!(id.get(0, 0), Some(&f.one()));
        assert_eq!(id.get(0, 1), None);
        assert_eq!(id.rank(), 2);
    }
}
