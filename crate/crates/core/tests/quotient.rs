use std::collections::BTreeMap;

use dgquot::category::{Status, TableCategory, TableFunctor, Verdict};
use dgquot::examples::{a0, cone_instance, dual_numbers, point};
use dgquot::linalg::{Field, Vector};
use dgquot::modules::ResolveBounds;
use dgquot::quotient::random::{random_instance, Shape};
use dgquot::quotient::{
    build_example_i2, class_survives, cone_formula_ext, cross_check, drinfeld_quotient, graded_dimensions, i2_functors,
    is_dg_quotient, quotient_ext, quotient_hom_truncated, verdier_ext_via_orthogonal, ExtBounds, Route,
};

const Q: Field = Field::Rational;

fn bounds(lo: i32, hi: i32) -> ExtBounds {
    ExtBounds { lo, hi, ..ExtBounds::default() }
}

/// Independent count of alternating words `h_n ε … ε h_0` by brute force over
/// tuples in `B` and basis elements.
fn brute_force_words(a: &TableCategory, b: &[usize], x: usize, y: usize, n: usize) -> BTreeMap<i32, usize> {
    let mut out = BTreeMap::new();
    let mut tuples: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..n {
        tuples = tuples.into_iter().flat_map(|t| b.iter().map(move |&u| [t.clone(), vec![u]].concat())).collect();
    }
    for t in tuples {
        let path: Vec<usize> = std::iter::once(x).chain(t.iter().copied()).chain(std::iter::once(y)).collect();
        let mut degs: Vec<i32> = vec![0];
        for w in path.windows(2) {
            let h = a.hom(w[0], w[1]);
            degs = degs.iter().flat_map(|d| h.degrees().iter().map(move |e| d + e)).collect();
        }
        for d in degs {
            *out.entry(d - n as i32).or_default() += 1;
        }
    }
    out
}

#[test]
fn empty_b_keeps_homs() {
    let a = a0(Q);
    let q = drinfeld_quotient(&a, &[]).unwrap();
    let f = quotient_hom_truncated(&q, 0, 1, 3, -3, 3, 1000).unwrap();
    assert_eq!(f.hom.complex, a.hom(0, 1).clone().with_window(-3, 3));
    for x in 0..2 {
        for y in 0..2 {
            let t = quotient_ext(&q, x, y, &bounds(-2, 2)).unwrap();
            assert_eq!(t.dims(), dgquot::category::ExtTable::exact_from(a.hom(x, y), -2, 2).unwrap().dims());
        }
    }
}

#[test]
fn unknown_object_in_b_is_rejected() {
    assert!(drinfeld_quotient(&a0(Q), &[5]).is_err());
}

#[test]
fn epsilon_powers_on_a_point() {
    let p = point(Q);
    let q = drinfeld_quotient(&p, &[0]).unwrap();
    let f = quotient_hom_truncated(&q, 0, 0, 4, -4, 0, 1000).unwrap();
    let c = &f.hom.complex;
    assert_eq!(c.dim(), 5);
    let by_degree = |m: i32| c.indices_in_degree(m)[0];
    for k in 0..=4 {
        let i = by_degree(-k);
        let expected = if k % 2 == 1 { Vector::unit(by_degree(-k + 1), Q) } else { Vector::zero() };
        assert_eq!(c.d(i), &expected, "d(ε^{k})");
    }
}

#[test]
fn point_quotient_has_zero_cohomology() {
    let p = point(Q);
    let q = drinfeld_quotient(&p, &[0]).unwrap();
    let b = ExtBounds { lo: -5, hi: 2, max_level: 8, stable: 2, ..ExtBounds::default() };
    let t = quotient_ext(&q, 0, 0, &b).unwrap();
    for m in -5..=2 {
        assert_eq!(t.dim(m), Some(0));
        assert!(t.status(m).unwrap().is_certified());
    }
    let bar = cone_formula_ext(&p, &[0], 0, 0, &ExtBounds { route: Route::Bar, ..b }).unwrap();
    assert_eq!(bar.dims(), t.dims());
}

#[test]
fn graded_dimensions_match_brute_force() {
    let inst = cone_instance(Q);
    let a = &inst.category;
    for b in [vec![2], vec![0, 2], vec![1]] {
        let q = drinfeld_quotient(a, &b).unwrap();
        for (x, y) in [(0, 0), (0, 1), (2, 1)] {
            for n in 0..=3 {
                assert_eq!(graded_dimensions(&q, x, y, n), brute_force_words(a, &b, x, y, n), "B={b:?} ({x},{y}) n={n}");
            }
            let f = quotient_hom_truncated(&q, x, y, 3, -6, 3, 100_000).unwrap();
            f.check_graded_dimensions(&q).unwrap();
        }
    }
}

#[test]
fn graded_pieces_into_x2_are_acyclic() {
    let ex = build_example_i2(Q, -3, 3);
    let q = drinfeld_quotient(&ex.a, &ex.b).unwrap();
    for x in 0..2 {
        assert!(q.graded_pieces_acyclic(x, 1));
    }
    assert!(!q.graded_pieces_acyclic(1, 0));
}

#[test]
fn example_i2_three_pipelines() {
    let ex = build_example_i2(Q, -3, 3);
    assert!(ex.a.validate().is_valid());
    assert!(ex.a.hom(ex.b[0], 1).is_acyclic());
    let q = drinfeld_quotient(&ex.a, &ex.b).unwrap();
    let b = bounds(-3, 3);
    for (&(x, y), want) in &ex.expected {
        let t1 = quotient_ext(&q, x, y, &b).unwrap();
        let t2 = cone_formula_ext(&ex.a, &ex.b, x, y, &b).unwrap();
        let t3 = verdier_ext_via_orthogonal(&ex.a, &ex.b, x, y, &b).unwrap();
        assert_eq!(t1.dims(), want.dims, "truncation ({x},{y})");
        assert_eq!(t2.dims(), want.dims, "cone ({x},{y})");
        assert_eq!(t3.table.dims(), want.dims, "verdier ({x},{y})");
        assert!(t1.all_certified() && t2.all_certified() && t3.table.all_certified(), "({x},{y})");
        assert!(t3.authoritative);
    }
    let f = Vector::unit(0, Q);
    assert!(class_survives(&q, 0, 1, &f, 8, 100_000).unwrap());
    assert!(class_survives(&q, 0, 0, ex.a.unit(0), 8, 100_000).unwrap());
}

#[test]
fn verdier_into_x2_is_ext_tr() {
    let ex = build_example_i2(Q, -3, 3);
    for x in 0..3 {
        let v = verdier_ext_via_orthogonal(&ex.a, &ex.b, x, 1, &bounds(-3, 3)).unwrap();
        assert_eq!(v.orthogonal, Verdict::Yes);
        assert_eq!(v.table.dims(), dgquot::category::ExtTable::exact_from(ex.a.hom(x, 1), -3, 3).unwrap().dims());
    }
}

#[test]
fn cross_check_example_agrees() {
    let ex = build_example_i2(Q, -3, 3);
    let pairs: Vec<(usize, usize)> = ex.expected.keys().copied().collect();
    let r = cross_check(&ex.a, &ex.b, Some(&pairs), &bounds(-3, 3)).unwrap();
    assert!(r.discrepancies().is_empty());
    for ((x, y), want) in &ex.expected {
        let p = r.table(*x, *y).unwrap();
        for d in &p.degrees {
            assert_eq!(d.dim, Some(want.dims[&d.degree]));
        }
    }
}

#[test]
fn dual_numbers_quotient_by_itself() {
    // End = k[x]/x², B = A: the quotient is zero.
    let d = dual_numbers(Q);
    let r = cross_check(&d, &[0], None, &bounds(-2, 2)).unwrap();
    assert!(r.discrepancies().is_empty(), "{:?}", r);
}

#[test]
fn i2_functor_is_a_quotient() {
    let ex = build_example_i2(Q, -3, 3);
    let (good, broken) = i2_functors(Q).unwrap();
    let rb = ResolveBounds { steps: 6, lo: -3, hi: 3, all_degrees: true };
    assert_eq!(is_dg_quotient(&good, &ex.b, rb).unwrap(), Verdict::Yes);
    assert!(matches!(is_dg_quotient(&broken, &ex.b, rb).unwrap(), Verdict::No(w) if w.starts_with("(a)")));
}

#[test]
fn identity_with_empty_b_is_a_quotient() {
    let a = cone_instance(Q).category;
    let rb = ResolveBounds::window(4, -3, 3);
    assert_eq!(is_dg_quotient(&TableFunctor::identity(&a), &[], rb).unwrap(), Verdict::Yes);
    assert!(matches!(is_dg_quotient(&TableFunctor::identity(&a), &[0], rb).unwrap(), Verdict::No(_)));
}

#[test]
fn random_instances_cross_check() {
    let shape = Shape::default();
    for seed in 0..10 {
        let inst = random_instance(seed, &shape);
        assert!(inst.category.validate().is_valid());
        let r = cross_check(&inst.category, &inst.b, None, &bounds(-2, 2)).unwrap();
        assert!(r.discrepancies().is_empty(), "seed {seed}: {:?}", r.discrepancies());
    }
}

#[test]
fn statuses_on_exact_paths() {
    let ex = build_example_i2(Q, -3, 3);
    let t = cone_formula_ext(&ex.a, &[], 0, 1, &bounds(-1, 1)).unwrap();
    assert!(t.entries.values().all(|e| e.status == Status::Exact));
}
