//! Acceptance run: one line per criterion, nonzero exit if any fails.

#[path = "../../core/tests/support/structural.rs"]
mod structural;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use dgquot::category::{check_quasi_equivalence, check_quasi_equivalence_probed, tensor_categories, DgFunctor, ExtTable, QuasiBounds, Verdict};
use dgquot::examples::{dual_numbers, k_broken_probe, k_broken_to_j, k_to_i2, point};
use dgquot::linalg::Field;
use dgquot::modules::ResolveBounds;
use dgquot::pretr::ext_tr;
use dgquot::quotient::random::{random_instance, Shape};
use dgquot::quotient::{
    build_example_i2, cone_formula_ext, cross_check, drinfeld_quotient, i2_functors, is_dg_quotient, quotient_ext,
    verdier_ext_via_orthogonal, ExtBounds, Route,
};

const Q: Field = Field::Rational;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn demo_i2() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_dgquot"))
        .args(["--format", "json", "demo", "i2", "--window", "-3:3", "--max-level", "8", "--stable", "2"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(0), || format!("exit {:?}", out.status.code()))?;
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    ensure(v["matches_expected"] == true, || "tables differ from the expected ones".into())?;
    ensure(v["discrepancies"] == serde_json::json!([]), || "pipelines disagree".into())?;
    Ok("Ext^n(X_i, X_j) on -3..3 exact across three pipelines; f survives".into())
}

fn point_quotient() -> Outcome {
    let p = point(Q);
    let q = drinfeld_quotient(&p, &[0]).map_err(|e| e.to_string())?;
    let b = ExtBounds { lo: -5, hi: 2, max_level: 8, stable: 2, ..ExtBounds::default() };
    let t = quotient_ext(&q, 0, 0, &b).map_err(|e| e.to_string())?;
    for m in -5..=2 {
        ensure(t.dim(m) == Some(0), || format!("H^{m} = {:?}", t.dim(m)))?;
        ensure(t.status(m).is_some_and(|s| s.is_certified()), || format!("H^{m} not stable"))?;
    }
    let bar = cone_formula_ext(&p, &[0], 0, 0, &ExtBounds { route: Route::Bar, ..b }).map_err(|e| e.to_string())?;
    ensure(bar.dims() == t.dims(), || format!("bar route {:?}", bar.dims()))?;
    Ok("zero on -5..2, stable; bar route agrees".into())
}

fn random_cross_check() -> Outcome {
    let shape = Shape { max_objects: 3, max_summands: 2, max_dim_per_degree: 3, degrees: (-1, 1) };
    let bounds = ExtBounds { lo: -2, hi: 2, ..ExtBounds::default() };
    let mut compared = 0;
    for seed in 0..50 {
        let inst = random_instance(seed, &shape);
        let r = cross_check(&inst.category, &inst.b, None, &bounds).map_err(|e| e.to_string())?;
        let bad = r.discrepancies();
        ensure(bad.is_empty(), || format!("seed {seed}: {bad:?}"))?;
        compared += r.pairs.iter().flat_map(|p| &p.degrees).filter(|d| d.dim.is_some()).count();
    }
    Ok(format!("50 seeds over F5, {compared} certified entries, no discrepancies"))
}

fn quotient_checker() -> Outcome {
    let ex = build_example_i2(Q, -3, 3);
    let (good, broken) = i2_functors(Q).map_err(|e| e.to_string())?;
    let rb = ResolveBounds { steps: 6, lo: -3, hi: 3, all_degrees: true };
    let v = is_dg_quotient(&good, &ex.b, rb).map_err(|e| e.to_string())?;
    ensure(v == Verdict::Yes, || format!("A → I2: {v:?}"))?;
    let v = is_dg_quotient(&broken, &ex.b, rb).map_err(|e| e.to_string())?;
    ensure(matches!(v, Verdict::No(_)), || format!("A → J_b: {v:?}"))?;
    let v = check_quasi_equivalence(&DgFunctor::Free(k_to_i2(Q)), QuasiBounds::default());
    ensure(v == Verdict::Yes, || format!("K → I2: {v:?}"))?;
    let v = check_quasi_equivalence_probed(&k_broken_to_j(Q), &[k_broken_probe(Q)], QuasiBounds::default());
    ensure(matches!(v, Verdict::No(_)), || format!("K_b → J_b: {v:?}"))?;
    Ok("A → I2 and K → I2 verified; broken variants refuted".into())
}

fn orthogonality() -> Outcome {
    let ex = build_example_i2(Q, -3, 3);
    let b = ExtBounds { lo: -3, hi: 3, ..ExtBounds::default() };
    for x in 0..2 {
        let v = verdier_ext_via_orthogonal(&ex.a, &ex.b, x, 1, &b).map_err(|e| e.to_string())?;
        ensure(v.orthogonal == Verdict::Yes && v.authoritative, || format!("X{}: certificate {:?}", x + 1, v.orthogonal))?;
        let objs = &ex.instance.objects;
        let want = ext_tr(&ex.instance.base, &objs[x].1, &objs[1].1, -3, 3).map_err(|e| e.to_string())?;
        ensure(v.table.dims() == want.dims(), || format!("X{}: {:?} vs {:?}", x + 1, v.table.dims(), want.dims()))?;
    }
    Ok("Verdier Ext(X_i, X2) = ext_tr on -3..3, B-orthogonal".into())
}

fn structural_suite() -> Outcome {
    let mut failed = Vec::new();
    for (name, check) in structural::CHECKS {
        if let Err(e) = check() {
            failed.push(format!("{name}: {e}"));
        }
    }
    ensure(failed.is_empty(), || failed.join("; "))?;
    Ok(format!("{} checks", structural::CHECKS.len()))
}

fn tensor_stability() -> Outcome {
    let ex = build_example_i2(Q, -3, 3);
    let k = dual_numbers(Q);
    let ak = tensor_categories(&ex.a, &k).map_err(|e| e.to_string())?;
    // objects of A ⊗ K are (a, *) with index a
    let bk = ex.b.clone();
    let bounds = ExtBounds { lo: -3, hi: 3, ..ExtBounds::default() };
    // End(Cone f ⊗ *) is twice as large, so fewer ε letters fit under the cap
    let bounds_k = ExtBounds { max_level: 5, ..bounds };
    let ext_k = ExtTable::exact_from(k.hom(0, 0), -3, 3).map_err(|e| e.to_string())?;
    let q = drinfeld_quotient(&ex.a, &ex.b).map_err(|e| e.to_string())?;
    let qk = drinfeld_quotient(&ak, &bk).map_err(|e| e.to_string())?;
    let (mut compared, mut total) = (0, 0);
    for &(x, y) in ex.expected.keys() {
        let t = quotient_ext(&q, x, y, &bounds).map_err(|e| e.to_string())?;
        let tk = quotient_ext(&qk, x, y, &bounds_k).map_err(|e| e.to_string())?;
        for n in -3..=3 {
            total += 1;
            let mut sum = Some(0);
            for (j, e) in &ext_k.entries {
                if e.dim == 0 {
                    continue;
                }
                let i = n - j;
                sum = match (sum, t.entries.get(&i)) {
                    (Some(s), Some(a)) if a.status.is_certified() => Some(s + a.dim * e.dim),
                    _ => None,
                };
            }
            let (Some(want), Some(got)) = (sum, tk.entries.get(&n)) else { continue };
            if !got.status.is_certified() {
                continue;
            }
            ensure(got.dim == want, || format!("({x},{y}) H^{n}: {} vs Künneth {want}", got.dim))?;
            compared += 1;
        }
    }
    ensure(compared > 0, || "no certified degree to compare".into())?;
    Ok(format!("{compared} of {total} degrees certified on both sides, all match the Künneth combination"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("arrow-with-cone golden test", demo_i2),
        ("point modulo itself", point_quotient),
        ("random cross-check", random_cross_check),
        ("quotient checker", quotient_checker),
        ("orthogonality semantics", orthogonality),
        ("structural suite", structural_suite),
        ("tensor stability", tensor_stability),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail}) [{secs:.1}s]", k + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {}: FAIL  {name}: {why} [{secs:.1}s]", k + 1);
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
