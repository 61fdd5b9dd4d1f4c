//! The Hermitian polar space on `V = F_{q^2} × F_{q^{2n}}`, viewed as an
//! `(n+1)`-dimensional space over `F_{q^2}`.
//!
//! The form is `h(a, x) = a^{q+1} - Tr(x^{q^n+1})` with `Tr` the relative
//! trace down to `F_{q^2}`, and its sesquilinear polarization is
//! `b((a,x),(b,y)) = a·b^q - Tr(x·y^{q^n})`, linear in the first slot.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElt};
use crate::linalg::{null_space, Echelon};

/// A vector `(a, x)` of `V`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vector {
    pub a: FieldElt,
    pub x: FieldElt,
}

impl Vector {
    pub fn new(a: FieldElt, x: FieldElt) -> Self {
        Vector { a, x }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.x.is_zero()
    }

    pub fn add(&self, ctx: &FieldCtx, other: &Vector) -> Vector {
        Vector { a: ctx.add(self.a, other.a), x: ctx.add(self.x, other.x) }
    }

    pub fn scale(&self, ctx: &FieldCtx, lambda: FieldElt) -> Vector {
        Vector { a: ctx.mul(lambda, self.a), x: ctx.mul(lambda, self.x) }
    }

    fn digits(&self, ctx: &FieldCtx) -> Vec<u64> {
        let mut v = ctx.coeffs(self.a);
        v.extend(ctx.coeffs(self.x));
        v
    }
}

/// A projective point `⟨(a, x)⟩` in canonical form: `a = 1` when `a ≠ 0`,
/// otherwise `x` is the `F_{q^2}^*`-multiple with least encoding.
///
/// Points order by `(a, x)` encodings, which is the canonical order used for
/// point sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    a: FieldElt,
    x: FieldElt,
}

impl ProjPoint {
    /// Canonical point spanned by `v`. `a` must lie in `F_{q^2}`.
    pub fn new(ctx: &FieldCtx, v: Vector) -> Result<Self> {
        if v.is_zero() {
            return Err(Error::Precondition("zero vector spans no point".into()));
        }
        let fq2 = 2 * ctx.params().d;
        if !ctx.in_subfield(v.a, fq2)? {
            return Err(Error::NotInSubfield(fq2));
        }
        Ok(Self::canonical(ctx, v))
    }

    /// Canonicalize without the subfield check on `a`.
    pub(crate) fn canonical(ctx: &FieldCtx, v: Vector) -> Self {
        if !v.a.is_zero() {
            let inv = ctx.inv(v.a).expect("nonzero");
            return ProjPoint { a: FieldElt::ONE, x: ctx.mul(inv, v.x) };
        }
        let x = ctx
            .fq2_units()
            .iter()
            .map(|&l| ctx.mul(l, v.x))
            .min()
            .expect("F_{q^2}^* is nonempty");
        ProjPoint { a: FieldElt::ZERO, x }
    }

    /// The point `⟨(1, x)⟩`.
    pub fn affine(x: FieldElt) -> Self {
        ProjPoint { a: FieldElt::ONE, x }
    }

    pub fn a(&self) -> FieldElt {
        self.a
    }

    pub fn x(&self) -> FieldElt {
        self.x
    }

    pub fn vector(&self) -> Vector {
        Vector { a: self.a, x: self.x }
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<({}, {})>", self.a.encoding(), self.x.encoding())
    }
}

/// `h(v) = a^{q+1} - Tr(x^{q^n+1})`.
pub fn herm_value(ctx: &FieldCtx, v: Vector) -> FieldElt {
    let Vector { a, x } = v;
    let d = ctx.params().d as i64;
    let nd = d * ctx.params().n as i64;
    let norm_a = ctx.mul(a, ctx.frobenius(a, d));
    let norm_x = ctx.mul(x, ctx.frobenius(x, nd));
    ctx.sub(norm_a, ctx.trace_to_fq2(norm_x))
}

/// `b(u, v) = a·b^q - Tr(x·y^{q^n})`.
pub fn herm_pair(ctx: &FieldCtx, u: Vector, v: Vector) -> FieldElt {
    let d = ctx.params().d as i64;
    let nd = d * ctx.params().n as i64;
    let first = ctx.mul(u.a, ctx.frobenius(v.a, d));
    let second = ctx.trace_to_fq2(ctx.mul(u.x, ctx.frobenius(v.x, nd)));
    ctx.sub(first, second)
}

pub fn is_singular(ctx: &FieldCtx, p: &ProjPoint) -> bool {
    herm_value(ctx, p.vector()).is_zero()
}

pub fn perp(ctx: &FieldCtx, p: &ProjPoint, q: &ProjPoint) -> bool {
    herm_pair(ctx, p.vector(), q.vector()).is_zero()
}

/// A sorted, duplicate-free set of canonical points.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet {
    points: Vec<ProjPoint>,
}

impl PointSet {
    pub fn new(mut points: Vec<ProjPoint>) -> Self {
        points.sort_unstable();
        points.dedup();
        PointSet { points }
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        self.points.binary_search(p).is_ok()
    }

    pub fn index_of(&self, p: &ProjPoint) -> Option<usize> {
        self.points.binary_search(p).ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ProjPoint> {
        self.points.iter()
    }

    pub fn into_points(self) -> Vec<ProjPoint> {
        self.points
    }
}

impl FromIterator<ProjPoint> for PointSet {
    fn from_iter<I: IntoIterator<Item = ProjPoint>>(iter: I) -> Self {
        PointSet::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a ProjPoint;
    type IntoIter = std::slice::Iter<'a, ProjPoint>;
    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

fn require_n3(ctx: &FieldCtx) -> Result<()> {
    if ctx.params().n != 3 {
        return Err(Error::Precondition(format!("requires n = 3, got n = {}", ctx.params().n)));
    }
    Ok(())
}

/// An `F_{q^2}`-basis of `{v : b(v, u) = 0 for all u in vs}`.
pub fn perp_basis(ctx: &FieldCtx, vs: &[Vector]) -> Vec<Vector> {
    let p = ctx.p();
    let deg = ctx.degree() as usize;
    let two_d = 2 * ctx.params().d;
    let zeta = ctx.subfield_generator(two_d).expect("2d divides the degree");
    // F_p-basis of the domain: (ζ^i, 0) then (0, x^t).
    let mut domain: Vec<Vector> = (0..two_d)
        .map(|i| Vector::new(ctx.pow(zeta, i as u128), FieldElt::ZERO))
        .collect();
    domain.extend((0..deg).map(|t| Vector::new(FieldElt::ZERO, ctx.elt(p.pow(t as u32)).expect("monomial"))));

    let columns: Vec<Vec<u64>> = domain
        .iter()
        .map(|e| vs.iter().flat_map(|&u| ctx.coeffs(herm_pair(ctx, *e, u))).collect())
        .collect();
    let rows: Vec<Vec<u64>> = (0..vs.len() * deg)
        .map(|r| columns.iter().map(|c| c[r]).collect())
        .collect();
    let kernel = null_space(&rows, domain.len(), p);

    let mut span = Echelon::new(p);
    let mut basis = Vec::new();
    for coeffs in kernel {
        let v = coeffs
            .iter()
            .zip(&domain)
            .fold(Vector::new(FieldElt::ZERO, FieldElt::ZERO), |acc, (&c, e)| {
                Vector::new(ctx.add(acc.a, ctx.scale(e.a, c)), ctx.add(acc.x, ctx.scale(e.x, c)))
            });
        if span.insert(v.digits(ctx)) {
            for i in 1..two_d {
                span.insert(v.scale(ctx, ctx.pow(zeta, i as u128)).digits(ctx));
            }
            basis.push(v);
        }
    }
    basis
}

/// All projective points of the `F_{q^2}`-span of `basis` (assumed
/// independent), sorted.
pub fn subspace_points(ctx: &FieldCtx, basis: &[Vector]) -> Vec<ProjPoint> {
    let mut scalars = vec![FieldElt::ZERO];
    scalars.extend_from_slice(ctx.fq2_units());
    let mut out = Vec::new();
    for lead in 0..basis.len() {
        let tail = &basis[lead + 1..];
        let mut idx = vec![0usize; tail.len()];
        loop {
            let v = tail
                .iter()
                .zip(&idx)
                .fold(basis[lead], |acc, (b, &i)| acc.add(ctx, &b.scale(ctx, scalars[i])));
            out.push(ProjPoint::canonical(ctx, v));
            // odometer over the tail coefficients
            let mut pos = 0;
            while pos < idx.len() {
                idx[pos] += 1;
                if idx[pos] < scalars.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == idx.len() {
                break;
            }
        }
    }
    out.sort_unstable();
    out
}

/// All projective points of `PG(V)` with `a = 0`.
fn points_at_infinity(ctx: &FieldCtx) -> Vec<ProjPoint> {
    let count = (ctx.order() - 1) / (ctx.fq2_units().len() as u64);
    let mut x = FieldElt::ONE;
    let mut out = Vec::with_capacity(count as usize);
    for _ in 0..count {
        out.push(ProjPoint::canonical(ctx, Vector::new(FieldElt::ZERO, x)));
        x = ctx.mul(x, ctx.g());
    }
    out
}

/// Every singular point of `H(n, q^2)`, sorted. Exhaustive over the field;
/// meant for small parameters.
pub fn singular_points(ctx: &FieldCtx) -> Vec<ProjPoint> {
    let mut out: Vec<ProjPoint> = (0..ctx.order())
        .map(|e| ProjPoint::affine(ctx.elt(e).expect("in range")))
        .chain(points_at_infinity(ctx))
        .filter(|pt| is_singular(ctx, pt))
        .collect();
    out.sort_unstable();
    out
}

/// The singular points of `P^⊥` for a nonsingular point `P` (`n = 3`).
pub fn classical_ovoid(ctx: &FieldCtx, p: &ProjPoint) -> Result<PointSet> {
    require_n3(ctx)?;
    if is_singular(ctx, p) {
        return Err(Error::SingularPoint);
    }
    let basis = perp_basis(ctx, &[p.vector()]);
    let set: PointSet = subspace_points(ctx, &basis).into_iter().filter(|pt| is_singular(ctx, pt)).collect();
    let q = ctx.q();
    if set.len() as u64 != q * q * q + 1 {
        return Err(Error::Consistency(format!("classical ovoid has {} points", set.len())));
    }
    Ok(set)
}

/// A line of `PG(3, q^2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjLine {
    span: [ProjPoint; 2],
    points: Vec<ProjPoint>,
}

impl ProjLine {
    pub fn span(&self) -> &[ProjPoint; 2] {
        &self.span
    }

    /// The `q^2 + 1` points of the line, sorted.
    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        self.points.binary_search(p).is_ok()
    }
}

pub fn line_through(ctx: &FieldCtx, p: &ProjPoint, q: &ProjPoint) -> Result<ProjLine> {
    require_n3(ctx)?;
    if p == q {
        return Err(Error::Precondition("a line needs two distinct points".into()));
    }
    let points = subspace_points(ctx, &[p.vector(), q.vector()]);
    Ok(ProjLine { span: [*p, *q], points })
}

pub fn points_on_line(line: &ProjLine) -> &[ProjPoint] {
    line.points()
}

/// The polar line `ℓ^⊥`.
pub fn line_perp(ctx: &FieldCtx, line: &ProjLine) -> Result<ProjLine> {
    require_n3(ctx)?;
    let basis = perp_basis(ctx, &[line.span[0].vector(), line.span[1].vector()]);
    if basis.len() != 2 {
        return Err(Error::Consistency(format!("polar of a line has dimension {}", basis.len())));
    }
    let span = [ProjPoint::canonical(ctx, basis[0]), ProjPoint::canonical(ctx, basis[1])];
    Ok(ProjLine { span, points: subspace_points(ctx, &basis) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Params;

    fn ctx(p: u64, d: u32, n: u32) -> FieldCtx {
        FieldCtx::new(Params::new(p, d, n).unwrap()).unwrap()
    }

    #[test]
    fn herm_value_examples() {
        let c = ctx(2, 1, 3);
        assert_eq!(herm_value(&c, Vector::new(c.one(), c.zero())), c.one());
        assert!(herm_value(&c, Vector::new(c.one(), c.one())).is_zero());
        for t in c.subfield_elements(3).unwrap().into_iter().skip(1) {
            let expected = c.neg(c.trace(c.mul(t, t), 3, 1).unwrap());
            assert_eq!(herm_value(&c, Vector::new(c.zero(), t)), expected);
        }
    }

    #[test]
    fn pair_examples() {
        let c = ctx(2, 1, 3);
        let origin = Vector::new(c.one(), c.zero());
        for t in 0..c.order() {
            assert!(herm_pair(&c, origin, Vector::new(c.zero(), c.elt(t).unwrap())).is_zero());
        }
        for i in 0..9 {
            for j in 0..9 {
                let u = Vector::new(c.one(), c.omega_pow(i));
                let v = Vector::new(c.one(), c.omega_pow(j));
                let expected = c.sub(c.one(), c.trace_to_fq2(c.omega_pow(9 + i - j)));
                assert_eq!(herm_pair(&c, u, v), expected);
            }
        }
    }

    #[test]
    fn canonical_form() {
        let c = ctx(3, 1, 3);
        let x = c.pow(c.g(), 100);
        let p = ProjPoint::new(&c, Vector::new(c.zero(), x)).unwrap();
        for &l in c.fq2_units() {
            assert_eq!(ProjPoint::new(&c, Vector::new(c.zero(), c.mul(l, x))).unwrap(), p);
            let q = ProjPoint::new(&c, Vector::new(l, c.mul(l, x))).unwrap();
            assert_eq!(q, ProjPoint::affine(x));
        }
        assert!(ProjPoint::new(&c, Vector::new(c.zero(), c.zero())).is_err());
        assert!(matches!(ProjPoint::new(&c, Vector::new(c.g(), c.zero())), Err(Error::NotInSubfield(2))));
    }

    #[test]
    fn singular_point_counts() {
        for q in [2u64, 3] {
            let c = ctx(q, 1, 3);
            let q2 = q * q;
            assert_eq!(singular_points(&c).len() as u64, (q2 * q + 1) * (q2 + 1));
        }
    }

    #[test]
    fn classical_ovoid_sizes() {
        for (p, d, expected) in [(2, 1, 9), (3, 1, 28), (2, 2, 65)] {
            let c = ctx(p, d, 3);
            let o = classical_ovoid(&c, &ProjPoint::affine(c.zero())).unwrap();
            assert_eq!(o.len(), expected);
            for (i, a) in o.iter().enumerate() {
                for b in &o.points()[i + 1..] {
                    assert!(!perp(&c, a, b));
                }
            }
        }
        let c = ctx(2, 1, 3);
        assert!(matches!(classical_ovoid(&c, &ProjPoint::affine(c.one())), Err(Error::SingularPoint)));
        let c5 = ctx(2, 1, 5);
        assert!(classical_ovoid(&c5, &ProjPoint::affine(c5.zero())).is_err());
    }

    #[test]
    fn lines_and_polars() {
        let c = ctx(3, 1, 3);
        let pts = singular_points(&c);
        let line = line_through(&c, &pts[0], &pts[5]).unwrap();
        assert_eq!(line.points().len(), 10);
        assert!(line.contains(&pts[0]) && line.contains(&pts[5]));
        let polar = line_perp(&c, &line).unwrap();
        for a in line.points() {
            for b in polar.points() {
                assert!(perp(&c, a, b));
            }
        }
        let back = line_perp(&c, &polar).unwrap();
        assert_eq!(back.points(), line.points());
        assert!(line_through(&c, &pts[0], &pts[0]).is_err());
    }

    #[test]
    fn secants_of_classical_ovoid_meet_in_q_plus_one() {
        let c = ctx(2, 1, 3);
        let o = classical_ovoid(&c, &ProjPoint::affine(c.zero())).unwrap();
        let line = line_through(&c, &o.points()[0], &o.points()[1]).unwrap();
        let meet = line.points().iter().filter(|p| o.contains(p)).count();
        assert_eq!(meet, 3);
    }
}
