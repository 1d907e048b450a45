//! Structural checks over every constructed object: complexes, categories,
//! twisted complexes, modules, resolutions and quotient truncations.

use std::collections::BTreeMap;

use dgquot::category::{tensor_categories, TableCategory, TableFunctor};
use dgquot::examples::{a0, cone_instance, dual_numbers, i2, k_resolution, point};
use dgquot::linalg::{ChainMap, Complex, Field, LinearMap, Vector};
use dgquot::modules::{
    bar_resolution, induce, module_hom, module_tensor, restrict, semi_free_resolve, yoneda, DgModule, ResolveBounds,
    Variance,
};
use dgquot::pretr::{pretr_hom, TwistedComplex};
use dgquot::quotient::random::{random_instance, Shape};
use dgquot::quotient::{drinfeld_quotient, graded_dimensions, quotient_hom_truncated};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[allow(dead_code)]
pub type Check = fn() -> Result<(), String>;

#[allow(dead_code)]
pub const CHECKS: &[(&str, Check)] = &[
    ("d² = 0 on constructed complexes", d_squared),
    ("Leibniz and associativity validators", validators),
    ("δq + q² = 0 iff d² = 0 on End", maurer_cartan),
    ("tensor with representables and the unit bimodule", tensor_free),
    ("Ind ⊣ Res on seeded instances", induction_restriction),
    ("Künneth over a field", kunneth),
    ("graded pieces of quotient truncations", graded_pieces),
    ("semi-free certificates and flatness", certificates),
];

const Q: Field = Field::Rational;
const F5: Field = Field::Prime(5);

fn seeded(n: u64) -> Vec<TableCategory> {
    (0..n).map(|s| random_instance(s, &Shape::default()).category).collect()
}

fn named() -> Vec<TableCategory> {
    let mut out = vec![point(Q), dual_numbers(Q), a0(Q), i2(Q), cone_instance(Q).category, cone_instance(F5).category];
    out.push(tensor_categories(&a0(Q), &dual_numbers(Q)).unwrap());
    out.push(tensor_categories(&cone_instance(Q).category, &dual_numbers(Q)).unwrap());
    out
}

fn all_categories() -> Vec<TableCategory> {
    let mut out = named();
    out.extend(seeded(20));
    out
}

fn betti(c: &Complex, lo: i32, hi: i32) -> Vec<usize> {
    (lo..=hi).map(|m| c.betti(m).unwrap()).collect()
}

fn shape(c: &Complex, lo: i32, hi: i32) -> Vec<(usize, usize)> {
    (lo..=hi).map(|m| (c.dim_in_degree(m), c.betti(m).unwrap())).collect()
}

fn d2(what: &str, c: &Complex) -> Result<(), String> {
    c.check_d_squared().map_err(|i| format!("{what}: d² ≠ 0 on basis element {i}"))
}

fn modules_of(c: &TableCategory) -> Vec<DgModule> {
    let mut out = Vec::new();
    for y in 0..c.num_objects() {
        out.push(yoneda(c, y, Variance::Right).unwrap());
        out.push(yoneda(c, y, Variance::Left).unwrap());
    }
    out
}

pub fn d_squared() -> Result<(), String> {
    for (k, c) in all_categories().iter().enumerate() {
        for (i, h) in c.homs().iter().enumerate() {
            d2(&format!("category {k} hom {i}"), h)?;
        }
        for m in modules_of(c) {
            for (x, v) in m.values().iter().enumerate() {
                d2(&format!("category {k} module value {x}"), v)?;
            }
        }
    }
    for seed in 0..20 {
        let inst = random_instance(seed, &Shape::default());
        for (_, x) in &inst.objects {
            for (_, y) in &inst.objects {
                d2(&format!("seed {seed} pretr hom"), &pretr_hom(&inst.base, x, y).complex)?;
            }
        }
        let q = drinfeld_quotient(&inst.category, &inst.b).unwrap();
        let n = inst.category.num_objects();
        for x in 0..n {
            for y in 0..n {
                let f = quotient_hom_truncated(&q, x, y, 3, -6, 4, 200_000).map_err(|e| e.to_string())?;
                d2(&format!("seed {seed} quotient truncation ({x},{y})"), &f.hom.complex)?;
            }
        }
    }
    let k = k_resolution(Q);
    for x in 0..2 {
        for y in 0..2 {
            let t = k.hom_truncated(x, y, 5, None, 100_000).unwrap();
            d2(&format!("K truncation ({x},{y})"), &t.complex)?;
        }
    }
    Ok(())
}

pub fn validators() -> Result<(), String> {
    for (k, c) in all_categories().iter().enumerate() {
        let r = c.validate();
        if !r.is_valid() {
            return Err(format!("category {k}: {:?}", r.violations));
        }
        for m in modules_of(c) {
            let r = m.validate();
            if !r.is_valid() {
                return Err(format!("module over category {k}: {:?}", r.violations));
            }
        }
    }
    for seed in 0..10 {
        let inst = random_instance(seed, &Shape::default());
        let q = drinfeld_quotient(&inst.category, &inst.b).unwrap();
        let r = q.presentation().validate();
        if !r.is_valid() {
            return Err(format!("quotient presentation, seed {seed}: {:?}", r.violations));
        }
    }
    if !k_resolution(Q).validate().is_valid() {
        return Err("K fails validation".into());
    }
    Ok(())
}

/// A twisted complex with random entries of the right degrees, without the
/// Maurer–Cartan check.
fn random_twisted(rng: &mut ChaCha8Rng, base: &TableCategory) -> TwistedComplex {
    let n = rng.gen_range(1..=3);
    let summands: Vec<(usize, i32)> =
        (0..n).map(|_| (rng.gen_range(0..base.num_objects()), rng.gen_range(-1..=2))).collect();
    let f = base.field();
    let mut q = BTreeMap::new();
    for j in 0..n {
        for i in 0..j {
            let ((ci, ri), (cj, rj)) = (summands[i], summands[j]);
            let h = base.hom(cj, ci);
            let v = Vector::from_entries(
                (0..h.dim())
                    .filter(|&b| h.degree(b) == 1 + ri - rj)
                    .map(|b| (b, f.from_i64(rng.gen_range(0..3)))),
            );
            q.insert((i, j), v);
        }
    }
    TwistedComplex::unchecked(base, summands, q).unwrap()
}

pub fn maurer_cartan() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let bases = [dual_numbers(F5), a0(F5), cone_instance(F5).category, i2(F5)];
    let (mut closed, mut open) = (0, 0);
    for k in 0..400 {
        let base = &bases[k % bases.len()];
        let t = random_twisted(&mut rng, base);
        let mc = t.mc_defect(base).is_none();
        let squares = pretr_hom(base, &t, &t).complex.check_d_squared().is_ok();
        if mc != squares {
            return Err(format!("sample {k}: Maurer–Cartan {mc}, d² = 0 {squares}"));
        }
        if mc {
            closed += 1;
        } else {
            open += 1;
        }
    }
    if closed == 0 || open == 0 {
        return Err(format!("only one direction exercised ({closed} closed, {open} not)"));
    }
    Ok(())
}

fn is_iso(source: &Complex, target: &Complex, columns: Vec<Vector>) -> Result<bool, String> {
    let map = LinearMap { source_dim: columns.len(), target_dim: target.dim(), degree: 0, columns };
    let cm = ChainMap::new(source.clone(), target.clone(), map).map_err(|e| e.to_string())?;
    Ok(source.dim() == target.dim() && dgquot::linalg::rank(&cm.map().columns) == target.dim())
}

pub fn tensor_free() -> Result<(), String> {
    let mut cats = named();
    cats.extend(seeded(5));
    for (k, c) in cats.iter().enumerate() {
        let f = c.field();
        let n = c.num_objects();
        for z in 0..n {
            let g = yoneda(c, z, Variance::Right).unwrap();
            let fz = yoneda(c, z, Variance::Left).unwrap();
            for y in 0..n {
                // G ⊗ h̃_Y ≅ G(Y) by g ↦ [g ⊗ id]
                let hy = yoneda(c, y, Variance::Left).unwrap();
                let t = module_tensor(&g, &hy).unwrap();
                let cols = (0..g.value(y).dim()).map(|i| t.class_of(y, &Vector::unit(i, f), c.unit(y))).collect();
                if !is_iso(g.value(y), &t.complex, cols)? {
                    return Err(format!("category {k}: G ⊗ h̃_Y at ({z},{y})"));
                }
                // h_Y ⊗ F ≅ F(Y) by v ↦ [id ⊗ v]
                let hy = yoneda(c, y, Variance::Right).unwrap();
                let t = module_tensor(&hy, &fz).unwrap();
                let cols = (0..fz.value(y).dim()).map(|i| t.class_of(y, c.unit(y), &Vector::unit(i, f))).collect();
                if !is_iso(fz.value(y), &t.complex, cols)? {
                    return Err(format!("category {k}: h_Y ⊗ F at ({y},{z})"));
                }
            }
            // HHom ⊗ F ≅ F objectwise, for a non-representable F
            let sum = fz.direct_sum(&fz.shift(1)).unwrap();
            for y in 0..n {
                let hy = yoneda(c, y, Variance::Right).unwrap();
                let t = module_tensor(&hy, &sum).unwrap();
                if shape(&t.complex, -4, 4) != shape(sum.value(y), -4, 4) {
                    return Err(format!("category {k}: HHom ⊗ F at {y}"));
                }
            }
        }
    }
    Ok(())
}

pub fn induction_restriction() -> Result<(), String> {
    for seed in 0..20 {
        let inst = random_instance(seed, &Shape::default());
        let a = &inst.category;
        let incl = TableFunctor::inclusion(a, &inst.b);
        for x in 0..a.num_objects() {
            let m = restrict(&incl, &yoneda(a, x, Variance::Right).unwrap()).unwrap();
            let ind = induce(&incl, &m).unwrap();
            for y in 0..a.num_objects() {
                let n = yoneda(a, y, Variance::Right).unwrap();
                let lhs = module_hom(&ind, &n).unwrap();
                let rhs = module_hom(&m, &restrict(&incl, &n).unwrap()).unwrap();
                if shape(&lhs.complex, -4, 4) != shape(&rhs.complex, -4, 4) {
                    return Err(format!("seed {seed}: Hom(Ind h_{x}, h_{y}) ≠ Hom(h_{x}, Res h_{y})"));
                }
            }
        }
    }
    Ok(())
}

fn random_complex(rng: &mut ChaCha8Rng, f: Field) -> Complex {
    // a random d with d² = 0: d = the product of two generic maps would not do,
    // so pair up basis elements of adjacent degrees at random
    let n = rng.gen_range(0..=3);
    let degrees: Vec<i32> = (0..n).map(|_| rng.gen_range(-1..=1)).collect();
    let mut d = vec![Vector::zero(); n];
    let mut used = vec![false; n];
    for i in 0..n {
        for j in 0..n {
            if !used[i] && !used[j] && i != j && degrees[j] == degrees[i] + 1 && rng.gen_bool(0.5) {
                d[i] = Vector::from_entries([(j, f.from_i64(rng.gen_range(1..5)))]);
                used[i] = true;
                used[j] = true;
            }
        }
    }
    let basis = degrees.iter().enumerate().map(|(i, &g)| (format!("e{i}"), g)).collect();
    Complex::new(f, basis, d).unwrap()
}

fn convolve(a: &[usize], b: &[usize], lo: i32) -> BTreeMap<i32, usize> {
    let mut out = BTreeMap::new();
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            *out.entry(lo + i as i32 + lo + j as i32).or_default() += x * y;
        }
    }
    out
}

pub fn kunneth() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 0..200 {
        let (c1, c2) = (random_complex(&mut rng, F5), random_complex(&mut rng, F5));
        let t = c1.tensor(&c2).unwrap();
        let want = convolve(&betti(&c1, -2, 2), &betti(&c2, -2, 2), -2);
        for m in -4..=4 {
            if t.betti(m).unwrap() != want.get(&m).copied().unwrap_or(0) {
                return Err(format!("sample {k}: H^{m} of a tensor product"));
            }
        }
    }
    let pairs = [
        (a0(Q), dual_numbers(Q)),
        (cone_instance(Q).category, dual_numbers(Q)),
        (dual_numbers(Q), dual_numbers(Q)),
        (i2(Q), point(Q)),
    ];
    for (a, b) in pairs {
        let t = tensor_categories(&a, &b).unwrap();
        let nb = b.num_objects();
        for s in 0..t.num_objects() {
            for u in 0..t.num_objects() {
                let want = convolve(&betti(a.hom(s / nb, u / nb), -4, 4), &betti(b.hom(s % nb, u % nb), -4, 4), -4);
                for m in -4..=4 {
                    if t.hom(s, u).betti(m).unwrap() != want.get(&m).copied().unwrap_or(0) {
                        return Err(format!("tensor category hom ({s},{u}) in degree {m}"));
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn graded_pieces() -> Result<(), String> {
    let mut instances: Vec<(TableCategory, Vec<usize>)> =
        (0..20).map(|s| random_instance(s, &Shape::default())).map(|i| (i.category, i.b)).collect();
    instances.push((cone_instance(Q).category, vec![2]));
    instances.push((cone_instance(Q).category, vec![0, 2]));
    instances.push((dual_numbers(Q), vec![0]));
    for (k, (a, b)) in instances.iter().enumerate() {
        let q = drinfeld_quotient(a, b).unwrap();
        for x in 0..a.num_objects() {
            for y in 0..a.num_objects() {
                let f = quotient_hom_truncated(&q, x, y, 3, -8, 4, 200_000).map_err(|e| e.to_string())?;
                f.check_graded_dimensions(&q).map_err(|e| format!("instance {k} ({x},{y}): {e}"))?;
                // level 0 is Hom_A(X, Y)
                let zero = graded_dimensions(&q, x, y, 0);
                for (&m, &n) in &zero {
                    if a.hom(x, y).dim_in_degree(m) != n {
                        return Err(format!("instance {k} ({x},{y}): level 0 differs from Hom_A in degree {m}"));
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn certificates() -> Result<(), String> {
    let mut cases: Vec<(TableCategory, Vec<usize>)> =
        (0..20).map(|s| random_instance(s, &Shape::default())).map(|i| (i.category, i.b)).collect();
    cases.push((cone_instance(Q).category, vec![2]));
    cases.push((cone_instance(Q).category, vec![0, 1]));
    for (k, (a, b)) in cases.iter().enumerate() {
        let incl = TableFunctor::inclusion(a, b);
        for y in 0..a.num_objects() {
            let m = restrict(&incl, &yoneda(a, y, Variance::Right).unwrap()).unwrap();
            let semi = semi_free_resolve(&m, ResolveBounds { steps: 6, lo: -3, hi: 3, all_degrees: true })
                .map_err(|e| e.to_string())?;
            let bar = bar_resolution(&m, 3, -3, 3, 100_000).map_err(|e| e.to_string())?;
            for (name, r) in [("semi-free", &semi), ("bar", &bar)] {
                r.certificate.validate(&r.module).map_err(|e| format!("case {k} y={y} {name}: {e}"))?;
                let realized = r.module.realize().map_err(|e| e.to_string())?;
                for (u, v) in realized.values().iter().enumerate() {
                    d2(&format!("case {k} {name} resolution at {u}"), v)?;
                }
            }
            // flatness: the augmentation cone stays acyclic after tensoring
            if semi.report.complete {
                let cone = semi.augmentation.cone();
                for z in 0..incl.source.num_objects() {
                    let t = module_tensor(&cone, &yoneda(&incl.source, z, Variance::Left).unwrap()).unwrap();
                    if betti(&t.complex, -3, 3).iter().any(|&n| n != 0) {
                        return Err(format!("case {k} y={y}: cone ⊗ h̃_{z} is not acyclic"));
                    }
                }
            }
        }
    }
    Ok(())
}
