//! Small categories used throughout: the two-object arrow category, the
//! category with two isomorphic objects, its free resolution, and the
//! arrow-with-cone instance.

use crate::category::{FreeCategory, FreeElem, FreeFunctor, Generator, TableCategory, TableFunctor, Word};
use crate::error::Result;
use crate::linalg::{Complex, Field, LinearMap, Vector};
use crate::pretr::{cone, full_subcategory_table, TwistedComplex};

fn line(field: Field, label: &str, degree: i32) -> Complex {
    Complex::new(field, vec![(label.to_string(), degree)], vec![Vector::zero()]).unwrap()
}

/// One object, `End = k`.
pub fn point(field: Field) -> TableCategory {
    TableCategory::point(field, "pt")
}

/// One object, `End = k[x]/x²` with `x` closed of degree 1.
pub fn dual_numbers(field: Field) -> TableCategory {
    let end = Complex::new(field, vec![("1".into(), 0), ("x".into(), 1)], vec![Vector::zero(), Vector::zero()]).unwrap();
    TableCategory::from_fn(field, vec!["*".into()], vec![end], vec![Vector::unit(0, field)], |_, _, _, i, j| {
        if i + j >= 2 {
            Vector::zero()
        } else {
            Vector::unit(i + j, field)
        }
    })
    .unwrap()
}

/// `A₀`: objects `X1, X2` and a single closed degree-0 arrow `f: X1 → X2`.
pub fn a0(field: Field) -> TableCategory {
    TableCategory::from_fn(
        field,
        vec!["X1".into(), "X2".into()],
        vec![line(field, "id", 0), line(field, "f", 0), Complex::zero(field), line(field, "id", 0)],
        vec![Vector::unit(0, field), Vector::unit(0, field)],
        |_, _, _, _, _| Vector::unit(0, field),
    )
    .unwrap()
}

/// `A₀` as the free category on `f` over the discrete category.
pub fn a0_free(field: Field) -> FreeCategory {
    let base = TableCategory::discrete(field, vec!["X1".into(), "X2".into()]);
    FreeCategory::new(base, vec![Generator { name: "f".into(), source: 0, target: 1, degree: 0, d: FreeElem::zero() }]).unwrap()
}

/// `I₂`: two objects, every Hom complex is `k` in degree 0 (`f`, `g = f⁻¹`).
pub fn i2(field: Field) -> TableCategory {
    TableCategory::from_fn(
        field,
        vec!["X1".into(), "X2".into()],
        vec![line(field, "id", 0), line(field, "f", 0), line(field, "g", 0), line(field, "id", 0)],
        vec![Vector::unit(0, field), Vector::unit(0, field)],
        |_, _, _, _, _| Vector::unit(0, field),
    )
    .unwrap()
}

/// `J_b`: `End(X1) = k` and `X2` a zero object.
pub fn j_broken(field: Field) -> TableCategory {
    TableCategory::from_fn(
        field,
        vec!["X1".into(), "X2".into()],
        vec![line(field, "id", 0), Complex::zero(field), Complex::zero(field), Complex::zero(field)],
        vec![Vector::unit(0, field), Vector::zero()],
        |_, _, _, _, _| Vector::unit(0, field),
    )
    .unwrap()
}

fn path(source: usize, target: usize, gens: &[usize]) -> Word {
    Word { source, target, gens: gens.to_vec(), base: vec![0; gens.len() + 1] }
}

fn elem(field: Field, terms: &[(i64, Word)]) -> FreeElem {
    let mut e = FreeElem::zero();
    for (c, w) in terms {
        e.add_term(w.clone(), &field.from_i64(*c));
    }
    e
}

/// `K`: free on `f, g` (degree 0), `α1, α2` (degree −1) and `u` (degree −2)
/// with `dα1 = gf − 1`, `dα2 = fg − 1`, `du = fα1 − α2f`.
pub fn k_resolution(field: Field) -> FreeCategory {
    let base = TableCategory::discrete(field, vec!["X1".into(), "X2".into()]);
    let (f, g, a1, a2) = (0, 1, 2, 3);
    let gens = vec![
        Generator { name: "f".into(), source: 0, target: 1, degree: 0, d: FreeElem::zero() },
        Generator { name: "g".into(), source: 1, target: 0, degree: 0, d: FreeElem::zero() },
        Generator {
            name: "α1".into(),
            source: 0,
            target: 0,
            degree: -1,
            d: elem(field, &[(1, path(0, 0, &[f, g])), (-1, path(0, 0, &[]))]),
        },
        Generator {
            name: "α2".into(),
            source: 1,
            target: 1,
            degree: -1,
            d: elem(field, &[(1, path(1, 1, &[g, f])), (-1, path(1, 1, &[]))]),
        },
        Generator {
            name: "u".into(),
            source: 0,
            target: 1,
            degree: -2,
            d: elem(field, &[(1, path(0, 1, &[a1, f])), (-1, path(0, 1, &[f, a2]))]),
        },
    ];
    FreeCategory::new(base, gens).unwrap()
}

/// The broken variant: `dα1 = gf` instead of `gf − 1` (and no `u`, whose
/// differential would no longer be closed).
pub fn k_broken(field: Field) -> FreeCategory {
    let base = TableCategory::discrete(field, vec!["X1".into(), "X2".into()]);
    let (f, g) = (0, 1);
    let gens = vec![
        Generator { name: "f".into(), source: 0, target: 1, degree: 0, d: FreeElem::zero() },
        Generator { name: "g".into(), source: 1, target: 0, degree: 0, d: FreeElem::zero() },
        Generator { name: "α1".into(), source: 0, target: 0, degree: -1, d: elem(field, &[(1, path(0, 0, &[f, g]))]) },
        Generator {
            name: "α2".into(),
            source: 1,
            target: 1,
            degree: -1,
            d: elem(field, &[(1, path(1, 1, &[g, f])), (-1, path(1, 1, &[]))]),
        },
    ];
    FreeCategory::new(base, gens).unwrap()
}

fn discrete_to(field: Field, target: &TableCategory) -> TableFunctor {
    let base = TableCategory::discrete(field, vec!["X1".into(), "X2".into()]);
    let maps = (0..4)
        .map(|k| {
            let (x, y) = (k / 2, k % 2);
            let tdim = target.hom(x, y).dim();
            if x == y {
                LinearMap { source_dim: 1, target_dim: tdim, degree: 0, columns: vec![target.unit(x).clone()] }
            } else {
                LinearMap::zero(0, tdim, 0)
            }
        })
        .collect();
    TableFunctor::new(base, target.clone(), vec![0, 1], maps).unwrap()
}

/// `K → I₂`: `f, g` to the generators, `α1, α2, u` to zero.
pub fn k_to_i2(field: Field) -> FreeFunctor {
    let t = i2(field);
    let one = Vector::unit(0, field);
    FreeFunctor::new(
        k_resolution(field),
        discrete_to(field, &t),
        vec![one.clone(), one, Vector::zero(), Vector::zero(), Vector::zero()],
    )
    .unwrap()
}

/// `K_b → J_b`: everything but identities goes to zero.
pub fn k_broken_to_j(field: Field) -> FreeFunctor {
    let t = j_broken(field);
    FreeFunctor::new(k_broken(field), discrete_to(field, &t), vec![Vector::zero(); 4]).unwrap()
}

/// A probe `K_b → T` with `T ⊂ pt^pretr` on `V = pt ⊕ pt[1]` and `0`:
/// `X1 ↦ V`, `X2 ↦ 0`, `α1` to the closed degree −1 map of `V`. It sends
/// `α1 + gα2f − α1gf`, a cycle killed by `K_b → J_b`, to a non-zero class.
pub fn k_broken_probe(field: Field) -> FreeFunctor {
    let pt = point(field);
    let v = TwistedComplex::new(&pt, vec![(0, 0), (0, 1)], Default::default()).unwrap();
    let objects = vec![("V".to_string(), v), ("0".to_string(), TwistedComplex::zero())];
    let t = full_subcategory_table(&pt, &objects).unwrap();
    let end = t.hom(0, 0);
    let h = (0..end.dim()).find(|&i| end.degree(i) == -1).expect("V has a degree −1 endomorphism");
    FreeFunctor::new(
        k_broken(field),
        discrete_to(field, &t),
        vec![Vector::zero(), Vector::zero(), Vector::unit(h, field), Vector::zero()],
    )
    .unwrap()
}

/// `A₀ → I₂` (`f ↦ f`) and `A₀ → J_b` (`f ↦ 0`).
pub fn a0_to(field: Field, target: &TableCategory, f_image: Vector) -> Result<TableFunctor> {
    let a = a0(field);
    let maps = (0..4)
        .map(|k| {
            let (x, y) = (k / 2, k % 2);
            let (sdim, tdim) = (a.hom(x, y).dim(), target.hom(x, y).dim());
            let columns = match (x, y) {
                (0, 1) => vec![f_image.clone()],
                (x, y) if x == y => vec![target.unit(x).clone()],
                _ => vec![Vector::zero(); sdim],
            };
            LinearMap { source_dim: sdim, target_dim: tdim, degree: 0, columns }
        })
        .collect();
    TableFunctor::new(a, target.clone(), vec![0, 1], maps)
}

/// The arrow-with-cone instance: `A₀`, the twisted complexes `X1, X2, Cone(f)`,
/// the resulting Table category and the index of `Cone(f)`.
#[derive(Clone, Debug)]
pub struct ConeInstance {
    pub base: TableCategory,
    pub objects: Vec<(String, TwistedComplex)>,
    pub category: TableCategory,
    pub cone_index: usize,
}

pub fn cone_instance(field: Field) -> ConeInstance {
    let base = a0(field);
    let (x1, x2) = (TwistedComplex::singleton(0), TwistedComplex::singleton(1));
    let c = cone(&base, &x1, &x2, &Vector::unit(0, field)).unwrap();
    let objects = vec![("X1".to_string(), x1), ("X2".to_string(), x2), ("Cone(f)".to_string(), c)];
    let category = full_subcategory_table(&base, &objects).unwrap();
    ConeInstance { base, objects, category, cone_index: 2 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{check_quasi_equivalence, check_quasi_equivalence_probed, DgFunctor, QuasiBounds, Verdict};

    #[test]
    fn examples_validate() {
        let q = Field::Rational;
        for c in [point(q), dual_numbers(q), a0(q), i2(q), j_broken(q), cone_instance(q).category] {
            let r = c.validate();
            assert!(r.is_valid(), "{:?}", r.violations);
        }
        assert!(k_resolution(q).validate().is_valid());
        assert!(k_broken(q).validate().is_valid());
        assert!(a0_free(q).validate().is_valid());
    }

    #[test]
    fn k_weights() {
        let k = k_resolution(Field::Rational);
        let w: Vec<usize> = (0..5).map(|g| k.weight(g)).collect();
        assert_eq!(w, vec![1, 1, 2, 2, 3]);
    }

    #[test]
    fn broken_k_is_refuted_by_its_probe() {
        let q = Field::Rational;
        let b = QuasiBounds::default();
        assert!(matches!(check_quasi_equivalence(&DgFunctor::Free(k_broken_to_j(q)), b), Verdict::Inconclusive(_)));
        let v = check_quasi_equivalence_probed(&k_broken_to_j(q), &[k_broken_probe(q)], b);
        assert!(matches!(v, Verdict::No(_)), "{v:?}");
        // the probe does not refute the correct K → I₂
        assert_eq!(check_quasi_equivalence_probed(&k_to_i2(q), &[], b), Verdict::Yes);
    }

    #[test]
    fn k_is_quasi_equivalent_to_i2() {
        let v = check_quasi_equivalence(&DgFunctor::Free(k_to_i2(Field::Rational)), QuasiBounds::default());
        assert_eq!(v, Verdict::Yes);
    }
}
