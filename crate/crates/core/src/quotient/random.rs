//! Seeded random instances: full subcategories of a small `base^pretr`
//! over 𝔽₅, filtered to small Hom complexes.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::category::TableCategory;
use crate::examples::{a0, dual_numbers, point};
use crate::linalg::{Field, Vector};
use crate::pretr::{full_subcategory_table, TwistedComplex};

#[derive(Clone, Debug)]
pub struct RandomInstance {
    pub seed: u64,
    pub base: TableCategory,
    pub objects: Vec<(String, TwistedComplex)>,
    pub category: TableCategory,
    pub b: Vec<usize>,
}

/// Shape limits of the generated categories.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    pub max_objects: usize,
    pub max_summands: usize,
    pub max_dim_per_degree: usize,
    pub degrees: (i32, i32),
}

impl Default for Shape {
    fn default() -> Self {
        Shape { max_objects: 3, max_summands: 2, max_dim_per_degree: 3, degrees: (-1, 1) }
    }
}

fn f5() -> Field {
    Field::Prime(5)
}

fn random_twisted(rng: &mut ChaCha8Rng, base: &TableCategory, max_summands: usize) -> Option<TwistedComplex> {
    let f = base.field();
    let n = rng.gen_range(1..=max_summands);
    let summands: Vec<(usize, i32)> = (0..n).map(|_| (rng.gen_range(0..base.num_objects()), rng.gen_range(-1..=1))).collect();
    let mut q = BTreeMap::new();
    for j in 0..n {
        for i in 0..j {
            let ((ci, ri), (cj, rj)) = (summands[i], summands[j]);
            let h = base.hom(cj, ci);
            let entries: Vec<_> = (0..h.dim())
                .filter(|&k| h.degree(k) == 1 + ri - rj)
                .map(|k| (k, f.from_i64(rng.gen_range(0..5))))
                .collect();
            q.insert((i, j), Vector::from_entries(entries));
        }
    }
    TwistedComplex::new(base, summands, q).ok()
}

fn fits(c: &TableCategory, shape: &Shape) -> bool {
    c.homs().iter().all(|h| {
        let mut count: BTreeMap<i32, usize> = BTreeMap::new();
        for &d in h.degrees() {
            *count.entry(d).or_default() += 1;
        }
        count.iter().all(|(&d, &k)| d >= shape.degrees.0 && d <= shape.degrees.1 && k <= shape.max_dim_per_degree)
    })
}

/// A valid instance for `seed`; deterministic.
pub fn random_instance(seed: u64, shape: &Shape) -> RandomInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bases = [point(f5()), a0(f5()), dual_numbers(f5())];
    loop {
        let base = bases.choose(&mut rng).expect("nonempty").clone();
        let count = rng.gen_range(2..=shape.max_objects.max(2));
        let objects: Option<Vec<(String, TwistedComplex)>> = (0..count)
            .map(|k| random_twisted(&mut rng, &base, shape.max_summands).map(|t| (format!("T{k}"), t)))
            .collect();
        let Some(objects) = objects else { continue };
        let Ok(category) = full_subcategory_table(&base, &objects) else { continue };
        if !fits(&category, shape) {
            continue;
        }
        let b = vec![rng.gen_range(0..count)];
        return RandomInstance { seed, base, objects, category, b };
    }
}
