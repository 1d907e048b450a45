//! DG categories given by explicit Hom complexes and composition tables.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::sparse::accumulate;
use crate::linalg::{Complex, Field, Scalar, Vector};

/// A DG category with finitely many objects, finite-dimensional Hom
/// complexes and composition stored as structure constants.
///
/// `Hom(x, y)` is the complex of morphisms from `x` to `y`. For basis
/// elements `g ∈ Hom(y, z)` and `f ∈ Hom(x, y)` the composite `g∘f` is a
/// vector in `Hom(x, z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableCategory {
    field: Field,
    objects: Vec<String>,
    homs: Vec<Complex>,
    composition: Vec<Vec<Vector>>,
    units: Vec<Vector>,
}

/// One violated axiom together with a human-readable witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axiom {
    DSquared,
    Leibniz,
    Associativity,
    Unit,
    UnitClosed,
    Degree,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::DSquared => "d^2",
            Axiom::Leibniz => "leibniz",
            Axiom::Associativity => "associativity",
            Axiom::Unit => "unit",
            Axiom::UnitClosed => "unit-closed",
            Axiom::Degree => "degree",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, axiom: Axiom) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }

    pub(crate) fn push(&mut self, axiom: Axiom, witness: String) {
        self.violations.push(Violation { axiom, witness });
    }
}

impl TableCategory {
    /// Builds a category from Hom complexes (row-major, `homs[x*n+y] = Hom(x,y)`),
    /// units and a composition oracle `comp(x, y, z, i, j)` returning `g_i∘f_j`.
    pub fn from_fn(
        field: Field,
        objects: Vec<String>,
        homs: Vec<Complex>,
        units: Vec<Vector>,
        mut comp: impl FnMut(usize, usize, usize, usize, usize) -> Vector,
    ) -> Result<Self> {
        let n = objects.len();
        if homs.len() != n * n || units.len() != n {
            return Err(Error::Invalid("hom table must be square with one unit per object".into()));
        }
        for h in &homs {
            if h.field() != field {
                return Err(Error::FieldMismatch(field.spec(), h.field().spec()));
            }
        }
        let mut composition = Vec::with_capacity(n * n * n);
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let (dg, df) = (homs[y * n + z].dim(), homs[x * n + y].dim());
                    let target = homs[x * n + z].dim();
                    let mut table = Vec::with_capacity(dg * df);
                    for i in 0..dg {
                        for j in 0..df {
                            let v = comp(x, y, z, i, j);
                            if v.max_index().map_or(false, |m| m >= target) {
                                return Err(Error::Invalid(format!(
                                    "composite {}∘{} out of range",
                                    homs[y * n + z].label(i),
                                    homs[x * n + y].label(j)
                                )));
                            }
                            table.push(v);
                        }
                    }
                    composition.push(table);
                }
            }
        }
        Ok(TableCategory { field, objects, homs, composition, units })
    }

    /// One object whose endomorphism complex is `k` in degree 0.
    pub fn point(field: Field, name: &str) -> Self {
        TableCategory::discrete(field, vec![name.to_string()])
    }

    /// Objects with only identity morphisms.
    pub fn discrete(field: Field, objects: Vec<String>) -> Self {
        let n = objects.len();
        let homs = (0..n * n)
            .map(|k| {
                if k / n == k % n {
                    Complex::new(field, vec![("id".into(), 0)], vec![Vector::zero()]).unwrap()
                } else {
                    Complex::zero(field)
                }
            })
            .collect();
        let units = vec![Vector::unit(0, field); n];
        TableCategory::from_fn(field, objects, homs, units, |_, _, _, _, _| Vector::unit(0, field)).unwrap()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn object_name(&self, x: usize) -> &str {
        &self.objects[x]
    }

    pub fn object_index(&self, name: &str) -> Result<usize> {
        self.objects
            .iter()
            .position(|o| o == name)
            .ok_or_else(|| Error::UnknownObject(name.to_string()))
    }

    pub fn hom(&self, x: usize, y: usize) -> &Complex {
        &self.homs[x * self.objects.len() + y]
    }

    pub fn homs(&self) -> &[Complex] {
        &self.homs
    }

    pub fn unit(&self, x: usize) -> &Vector {
        &self.units[x]
    }

    /// `g_i ∘ f_j` for basis elements `g_i ∈ Hom(y,z)`, `f_j ∈ Hom(x,y)`.
    pub fn compose_basis(&self, x: usize, y: usize, z: usize, i: usize, j: usize) -> &Vector {
        let n = self.objects.len();
        let df = self.hom(x, y).dim();
        &self.composition[(x * n + y) * n + z][i * df + j]
    }

    /// Bilinear extension of [`TableCategory::compose_basis`].
    pub fn compose(&self, x: usize, y: usize, z: usize, g: &Vector, f: &Vector) -> Vector {
        let mut acc = BTreeMap::new();
        for (i, a) in g.iter() {
            for (j, b) in f.iter() {
                let ab = a * b;
                for (k, c) in self.compose_basis(x, y, z, *i, *j).iter() {
                    accumulate(&mut acc, *k, &(&ab * c));
                }
            }
        }
        Vector::from_map(acc)
    }

    /// Degree of a homogeneous vector in `Hom(x,y)`; `None` for zero.
    pub fn degree_of(&self, x: usize, y: usize, v: &Vector) -> Option<i32> {
        v.leading().map(|i| self.hom(x, y).degree(i))
    }

    /// Checks d², unit, Leibniz, degree and associativity axioms on all basis elements.
    pub fn validate(&self) -> ValidationReport {
        let n = self.objects.len();
        let mut report = ValidationReport::default();
        for x in 0..n {
            for y in 0..n {
                if let Err(j) = self.hom(x, y).check_d_squared() {
                    report.push(Axiom::DSquared, format!("d²({}) ≠ 0 in Hom({},{})", self.hom(x, y).label(j), self.objects[x], self.objects[y]));
                }
            }
        }
        for x in 0..n {
            let u = &self.units[x];
            let end = self.hom(x, x);
            if u.iter().any(|(i, _)| end.degree(*i) != 0) || (u.is_zero() && end.dim() > 0) {
                report.push(Axiom::UnitClosed, format!("unit of {} is not a degree-0 element", self.objects[x]));
            }
            if !end.apply_d(u).is_zero() {
                report.push(Axiom::UnitClosed, format!("d(id_{}) ≠ 0", self.objects[x]));
            }
        }
        for x in 0..n {
            for y in 0..n {
                let h = self.hom(x, y);
                for j in 0..h.dim() {
                    let f = Vector::unit(j, self.field);
                    if self.compose(x, y, y, &self.units[y], &f) != f || self.compose(x, x, y, &f, &self.units[x]) != f {
                        report.push(Axiom::Unit, format!("identity not neutral on {}", h.label(j)));
                    }
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    self.check_leibniz(x, y, z, &mut report);
                }
            }
        }
        for w in 0..n {
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        self.check_associativity(w, x, y, z, &mut report);
                    }
                }
            }
        }
        report
    }

    fn check_leibniz(&self, x: usize, y: usize, z: usize, report: &mut ValidationReport) {
        let (hg, hf, hgf) = (self.hom(y, z), self.hom(x, y), self.hom(x, z));
        for i in 0..hg.dim() {
            for j in 0..hf.dim() {
                let gf = self.compose_basis(x, y, z, i, j);
                let expected_deg = hg.degree(i) + hf.degree(j);
                if gf.iter().any(|(k, _)| hgf.degree(*k) != expected_deg) {
                    report.push(Axiom::Degree, format!("{}∘{} is not of degree {expected_deg}", hg.label(i), hf.label(j)));
                    continue;
                }
                let lhs = hgf.apply_d(gf);
                let g = Vector::unit(i, self.field);
                let f = Vector::unit(j, self.field);
                let s = self.field.sign(hg.degree(i) as i64);
                let rhs = self
                    .compose(x, y, z, hg.d(i), &f)
                    .add(&self.compose(x, y, z, &g, hf.d(j)).scale(&s));
                if lhs != rhs {
                    report.push(Axiom::Leibniz, format!("d({}∘{})", hg.label(i), hf.label(j)));
                }
            }
        }
    }

    fn check_associativity(&self, w: usize, x: usize, y: usize, z: usize, report: &mut ValidationReport) {
        let (h3, h2, h1) = (self.hom(y, z), self.hom(x, y), self.hom(w, x));
        for i in 0..h3.dim() {
            for j in 0..h2.dim() {
                let hg = self.compose_basis(x, y, z, i, j);
                for k in 0..h1.dim() {
                    let f = Vector::unit(k, self.field);
                    let left = self.compose(w, x, z, hg, &f);
                    let gf = self.compose_basis(w, x, y, j, k);
                    let right = self.compose(w, y, z, &Vector::unit(i, self.field), gf);
                    if left != right {
                        report.push(
                            Axiom::Associativity,
                            format!("({}∘{})∘{}", h3.label(i), h2.label(j), h1.label(k)),
                        );
                    }
                }
            }
        }
    }

    /// `A°`: `Hom°(x,y) = Hom(y,x)` and `g°∘f° = (-1)^{|f||g|} (f∘g)°`.
    pub fn opposite(&self) -> TableCategory {
        let n = self.objects.len();
        let homs = (0..n * n).map(|k| self.hom(k % n, k / n).clone()).collect();
        TableCategory::from_fn(self.field, self.objects.clone(), homs, self.units.clone(), |x, y, z, i, j| {
            // g ∈ Hom°(y,z) = Hom(z,y), f ∈ Hom°(x,y) = Hom(y,x); f∘g ∈ Hom(z,x)
            let dg = self.hom(z, y).degree(i);
            let df = self.hom(y, x).degree(j);
            self.compose_basis(z, y, x, j, i).scale(&self.field.sign((dg * df) as i64))
        })
        .expect("opposite preserves shape")
    }

    /// The full subcategory on the given objects (in the given order).
    pub fn full_subcategory(&self, objects: &[usize]) -> TableCategory {
        let m = objects.len();
        let homs = (0..m * m).map(|k| self.hom(objects[k / m], objects[k % m]).clone()).collect();
        let units = objects.iter().map(|&o| self.units[o].clone()).collect();
        TableCategory::from_fn(
            self.field,
            objects.iter().map(|&o| self.objects[o].clone()).collect(),
            homs,
            units,
            |x, y, z, i, j| self.compose_basis(objects[x], objects[y], objects[z], i, j).clone(),
        )
        .expect("subcategory preserves shape")
    }

    /// Renames objects; the structure is unchanged.
    pub fn with_object_names(mut self, names: Vec<String>) -> Result<TableCategory> {
        if names.len() != self.objects.len() {
            return Err(Error::Invalid("wrong number of object names".into()));
        }
        self.objects = names;
        Ok(self)
    }

    /// A degree-0 `ψ: b → a` inverting the closed `φ: a → b` up to homotopy:
    /// `dψ = 0`, `ψφ − 1 = d h_a`, `φψ − 1 = d h_b`.
    pub fn ho_inverse(&self, a: usize, b: usize, phi: &Vector) -> Option<Vector> {
        let field = self.field;
        let (ba, ea, eb) = (self.hom(b, a), self.hom(a, a), self.hom(b, b));
        let off_a = ba.dim();
        let off_b = off_a + ea.dim();
        let mut cols = Vec::new();
        let psi_idx = ba.indices_in_degree(0);
        for &j in &psi_idx {
            let psi = Vector::unit(j, field);
            let col = ba
                .d(j)
                .add(&self.compose(a, b, a, &psi, phi).reindex(|i| i + off_a))
                .add(&self.compose(b, a, b, phi, &psi).reindex(|i| i + off_b));
            cols.push(col);
        }
        let minus = field.from_i64(-1);
        for j in ea.indices_in_degree(-1) {
            cols.push(ea.d(j).scale(&minus).reindex(|i| i + off_a));
        }
        for j in eb.indices_in_degree(-1) {
            cols.push(eb.d(j).scale(&minus).reindex(|i| i + off_b));
        }
        let rhs = self.units[a].reindex(|i| i + off_a).add(&self.units[b].reindex(|i| i + off_b));
        let x = crate::linalg::solve(&cols, &rhs, field)?;
        Some(x.filter_map_index(|k| (k < psi_idx.len()).then(|| psi_idx[k])))
    }

    /// A copy with one Hom complex replaced; composition constants are kept.
    pub fn with_hom_replaced(&self, x: usize, y: usize, hom: Complex) -> TableCategory {
        let mut c = self.clone();
        let n = c.objects.len();
        c.homs[x * n + y] = hom;
        c
    }

    pub fn with_unit_replaced(&self, x: usize, unit: Vector) -> TableCategory {
        let mut c = self.clone();
        c.units[x] = unit;
        c
    }
}

/// `A ⊗ B` with objects `(a, b)` (index `a * |B| + b`) and
/// `(f1⊗g1)(f2⊗g2) = (-1)^{|g1||f2|} f1f2 ⊗ g1g2`.
pub fn tensor_categories(a: &TableCategory, b: &TableCategory) -> Result<TableCategory> {
    if a.field != b.field {
        return Err(Error::FieldMismatch(a.field.spec(), b.field.spec()));
    }
    let (na, nb) = (a.num_objects(), b.num_objects());
    let mut objects = Vec::with_capacity(na * nb);
    for x in 0..na {
        for y in 0..nb {
            objects.push(format!("{}⊗{}", a.objects[x], b.objects[y]));
        }
    }
    let split = |o: usize| (o / nb, o % nb);
    let n = na * nb;
    let mut homs = Vec::with_capacity(n * n);
    for s in 0..n {
        for t in 0..n {
            let ((sa, sb), (ta, tb)) = (split(s), split(t));
            homs.push(a.hom(sa, ta).tensor(b.hom(sb, tb))?);
        }
    }
    let units = (0..n)
        .map(|o| {
            let (oa, ob) = split(o);
            tensor_vectors(&a.units[oa], &b.units[ob], b.hom(ob, ob).dim())
        })
        .collect();
    TableCategory::from_fn(a.field, objects, homs, units, |x, y, z, i, j| {
        let ((xa, xb), (ya, yb), (za, zb)) = (split(x), split(y), split(z));
        let (bg, bf) = (b.hom(yb, zb).dim(), b.hom(xb, yb).dim());
        let (f1, g1) = (i / bg, i % bg);
        let (f2, g2) = (j / bf, j % bf);
        let sign = a.field.sign((b.hom(yb, zb).degree(g1) * a.hom(xa, ya).degree(f2)) as i64);
        let ff = a.compose_basis(xa, ya, za, f1, f2);
        let gg = b.compose_basis(xb, yb, zb, g1, g2);
        tensor_vectors(ff, gg, b.hom(xb, zb).dim()).scale(&sign)
    })
}

fn tensor_vectors(u: &Vector, v: &Vector, dim_v: usize) -> Vector {
    let mut entries: Vec<(usize, Scalar)> = Vec::new();
    for (i, a) in u.iter() {
        for (j, b) in v.iter() {
            entries.push((i * dim_v + j, a * b));
        }
    }
    Vector::from_entries(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rational
    }

    /// One object, End = k[x]/x² with x closed of degree 1.
    pub(crate) fn dual_numbers(field: Field) -> TableCategory {
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

    #[test]
    fn point_is_valid() {
        assert!(TableCategory::point(q(), "X").validate().is_valid());
    }

    #[test]
    fn nonclosed_unit_is_reported() {
        let c = TableCategory::point(q(), "X");
        let end = Complex::new(q(), vec![("id".into(), 0), ("e".into(), 1)], vec![Vector::unit(1, q()), Vector::zero()]).unwrap();
        let bad = TableCategory::from_fn(q(), vec!["X".into()], vec![end], vec![Vector::unit(0, q())], |_, _, _, i, j| {
            if i == 0 {
                Vector::unit(j, q())
            } else if j == 0 {
                Vector::unit(i, q())
            } else {
                Vector::zero()
            }
        })
        .unwrap();
        assert!(c.validate().is_valid());
        let r = bad.validate();
        assert!(r.has(Axiom::UnitClosed));
    }

    #[test]
    fn opposite_twice_is_identity() {
        let c = dual_numbers(q());
        assert_eq!(c.opposite().opposite(), c);
        assert!(c.opposite().validate().is_valid());
    }

    #[test]
    fn tensor_of_dual_numbers_has_koszul_sign() {
        let c = dual_numbers(q());
        let t = tensor_categories(&c, &c).unwrap();
        assert!(t.validate().is_valid());
        let end = t.hom(0, 0);
        assert_eq!(end.dim(), 4);
        // basis: 1⊗1, 1⊗x, x⊗1, x⊗x
        let x1 = Vector::unit(2, q());
        let one_x = Vector::unit(1, q());
        let a = t.compose(0, 0, 0, &one_x, &x1);
        let b = t.compose(0, 0, 0, &x1, &one_x);
        assert_eq!(a, Vector::unit(3, q()).neg());
        assert_eq!(b, Vector::unit(3, q()));
        let s = one_x.add(&x1);
        assert!(t.compose(0, 0, 0, &s, &s).is_zero());
    }

    #[test]
    fn tensor_with_point_is_isomorphic() {
        let c = dual_numbers(q());
        let t = tensor_categories(&c, &TableCategory::point(q(), "pt")).unwrap();
        assert_eq!(t.hom(0, 0).degrees(), c.hom(0, 0).degrees());
        assert_eq!(t.compose_basis(0, 0, 0, 1, 0), c.compose_basis(0, 0, 0, 1, 0));
    }
}
