//! Ext tables and the stabilization analysis of filtered truncations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{rank, Complex, Vector};

/// How a reported dimension is known.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// Computed from a finite complex, or upgraded by an acyclicity certificate.
    Exact,
    /// The comparison maps were isomorphisms from `level` on, at least `s` times.
    Stable { level: usize },
    /// Certified by a resolution report.
    Certified,
    /// No stabilization observed; the value is a lower bound at best.
    Unstable,
}

impl Status {
    pub fn is_certified(self) -> bool {
        !matches!(self, Status::Unstable)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtEntry {
    pub dim: usize,
    pub status: Status,
    /// `dim H^m(F_N)` for `N = 0, 1, …` when a truncation was used.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub history: Vec<usize>,
    /// Cocycles spanning the reported classes, as combinations of basis labels.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub representatives: Vec<String>,
}

impl ExtEntry {
    pub fn exact(dim: usize) -> ExtEntry {
        ExtEntry { dim, status: Status::Exact, history: vec![], representatives: vec![] }
    }
}

/// Degree → dimension, with per-degree provenance.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtTable {
    pub entries: BTreeMap<i32, ExtEntry>,
}

impl ExtTable {
    pub fn dim(&self, m: i32) -> Option<usize> {
        self.entries.get(&m).map(|e| e.dim)
    }

    pub fn status(&self, m: i32) -> Option<Status> {
        self.entries.get(&m).map(|e| e.status)
    }

    pub fn degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.entries.keys().copied()
    }

    pub fn insert(&mut self, m: i32, entry: ExtEntry) {
        self.entries.insert(m, entry);
    }

    pub fn all_certified(&self) -> bool {
        self.entries.values().all(|e| e.status.is_certified())
    }

    /// `{m: dim}` as a plain map.
    pub fn dims(&self) -> BTreeMap<i32, usize> {
        self.entries.iter().map(|(m, e)| (*m, e.dim)).collect()
    }

    /// Every degree of `lo..=hi` from a finite complex, marked exact.
    pub fn exact_from(c: &Complex, lo: i32, hi: i32) -> Result<ExtTable> {
        let mut t = ExtTable::default();
        for m in lo..=hi {
            let h = c.cohomology(m)?;
            let representatives = h.representatives.iter().map(|v| c.format_vector(v)).collect();
            t.insert(m, ExtEntry { dim: h.dim, status: Status::Exact, history: vec![], representatives });
        }
        Ok(t)
    }
}

/// Cohomology of an increasing filtration `F_0 ⊂ F_1 ⊂ … ⊂ F_N` given by a
/// level per basis element, in degrees `lo..=hi`.
///
/// For each `N` it records `dim H^m(F_N)` and the rank of the comparison map
/// `H^m(F_N) → H^m(F_{N+1})`. The rank is computed without kernels: with
/// `D = d^{m-1}` on `F_{N+1}` and `π` the projection onto the level-`(N+1)`
/// coordinates, `rank = dim Z^m(F_N) − (rank D − rank πD)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationProfile {
    pub lo: i32,
    pub hi: i32,
    pub max_level: usize,
    /// `betti[N][m - lo]`
    pub betti: Vec<Vec<usize>>,
    /// `comparison[N][m - lo]` is the rank of `H^m(F_N) → H^m(F_{N+1})`.
    pub comparison: Vec<Vec<usize>>,
}

impl FiltrationProfile {
    pub fn compute(c: &Complex, levels: &[usize], lo: i32, hi: i32, max_level: usize) -> FiltrationProfile {
        let by_degree = |m: i32| -> Vec<usize> { c.indices_in_degree(m) };
        let mut betti = vec![vec![0; (hi - lo + 1).max(0) as usize]; max_level + 1];
        let mut comparison = vec![vec![0; (hi - lo + 1).max(0) as usize]; max_level];
        for m in lo..=hi {
            let prev = by_degree(m - 1);
            let cur = by_degree(m);
            let next_pos: BTreeMap<usize, usize> =
                by_degree(m + 1).into_iter().enumerate().map(|(k, i)| (i, k)).collect();
            let cur_pos: BTreeMap<usize, usize> = cur.iter().enumerate().map(|(k, &i)| (i, k)).collect();
            let local = |cols: &[usize], pos: &BTreeMap<usize, usize>, keep_rows: &dyn Fn(usize) -> bool| -> Vec<Vector> {
                cols.iter()
                    .map(|&j| c.d(j).filter_map_index(|i| if keep_rows(i) { pos.get(&i).copied() } else { None }))
                    .collect()
            };
            let at_most = |n: usize| move |i: &usize| levels[*i] <= n;
            let mut z = vec![0usize; max_level + 1];
            let mut rank_prev = vec![0usize; max_level + 1];
            for n in 0..=max_level {
                let cur_n: Vec<usize> = cur.iter().copied().filter(at_most(n)).collect();
                let prev_n: Vec<usize> = prev.iter().copied().filter(at_most(n)).collect();
                let rd = rank(&local(&cur_n, &next_pos, &|_| true));
                let rp = rank(&local(&prev_n, &cur_pos, &|_| true));
                z[n] = cur_n.len() - rd;
                rank_prev[n] = rp;
                betti[n][(m - lo) as usize] = z[n] - rp;
            }
            for n in 0..max_level {
                let prev_n1: Vec<usize> = prev.iter().copied().filter(at_most(n + 1)).collect();
                let top = n + 1;
                let r_pi = rank(&local(&prev_n1, &cur_pos, &|i| levels[i] == top));
                let hit_low = rank_prev[n + 1] - r_pi;
                comparison[n][(m - lo) as usize] = z[n] - hit_low;
            }
        }
        FiltrationProfile { lo, hi, max_level, betti, comparison }
    }

    pub fn betti_at(&self, level: usize, m: i32) -> usize {
        self.betti[level][(m - self.lo) as usize]
    }

    /// Whether `H^m(F_N) → H^m(F_{N+1})` is an isomorphism.
    pub fn is_iso(&self, level: usize, m: i32) -> bool {
        let k = (m - self.lo) as usize;
        let r = self.comparison[level][k];
        r == self.betti[level][k] && r == self.betti[level + 1][k]
    }

    /// The Ext table: a degree is stable when the last `s` comparison maps
    /// are isomorphisms; the reported level is where the final run of
    /// isomorphisms begins.
    pub fn to_table(&self, s: usize) -> ExtTable {
        let mut t = ExtTable::default();
        for m in self.lo..=self.hi {
            let history: Vec<usize> = (0..=self.max_level).map(|n| self.betti_at(n, m)).collect();
            let mut run = 0;
            let mut start = self.max_level;
            for n in (0..self.max_level).rev() {
                if self.is_iso(n, m) {
                    run += 1;
                    start = n;
                } else {
                    break;
                }
            }
            let status = if run >= s && s > 0 { Status::Stable { level: start } } else { Status::Unstable };
            t.insert(m, ExtEntry { dim: history[self.max_level], status, history, representatives: vec![] });
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Field;

    /// 1, e, e², …, e^N with d(e^{2k+1}) = e^{2k}, e^n in degree -n.
    fn epsilon_powers(n: usize) -> (Complex, Vec<usize>) {
        let q = Field::Rational;
        let basis = (0..=n).map(|k| (format!("e{k}"), -(k as i32))).collect();
        let d = (0..=n).map(|k| if k % 2 == 1 { Vector::unit(k - 1, q) } else { Vector::zero() }).collect();
        (Complex::new(q, basis, d).unwrap(), (0..=n).collect())
    }

    #[test]
    fn epsilon_tower_stabilizes_to_zero() {
        let (c, levels) = epsilon_powers(8);
        let p = FiltrationProfile::compute(&c, &levels, -5, 2, 8);
        assert_eq!(p.betti_at(4, -4), 1);
        assert_eq!(p.betti_at(5, -4), 0);
        let t = p.to_table(2);
        for m in -5..=2 {
            assert_eq!(t.dim(m), Some(0));
            assert!(t.status(m).unwrap().is_certified(), "degree {m}");
        }
    }

    #[test]
    fn comparison_rank_matches_direct_count() {
        // H(F_0) = k·1 maps to 0 in H(F_1).
        let (c, levels) = epsilon_powers(2);
        let p = FiltrationProfile::compute(&c, &levels, -1, 0, 2);
        assert_eq!(p.betti_at(0, 0), 1);
        assert_eq!(p.comparison[0][1], 0);
        assert!(!p.is_iso(0, 0));
    }
}
