use hovoid::geometry::{
    classical_ovoid, herm_pair, herm_value, is_singular, line_perp, line_through, perp, singular_points, ProjPoint,
    Vector,
};
use hovoid::gf::{FieldCtx, FieldElt, Params};
use proptest::prelude::*;

fn ctx(p: u64, d: u32, n: u32) -> FieldCtx {
    FieldCtx::new(Params::new(p, d, n).unwrap()).unwrap()
}

const SHAPES: &[(u64, u32, u32)] = &[(2, 1, 3), (3, 1, 3), (2, 2, 3), (5, 1, 3), (2, 1, 5)];

fn vector(c: &FieldCtx, ra: u64, rx: u64) -> Vector {
    let fq2 = c.subfield_elements(2 * c.params().d).unwrap();
    Vector::new(fq2[(ra % fq2.len() as u64) as usize], c.elt(rx % c.order()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn polarization_and_conjugate_symmetry(idx in 0..SHAPES.len(), r in any::<[u64; 4]>()) {
        let (p, d, n) = SHAPES[idx];
        let c = ctx(p, d, n);
        let u = vector(&c, r[0], r[1]);
        let v = vector(&c, r[2], r[3]);
        prop_assert_eq!(herm_pair(&c, u, u), herm_value(&c, u));
        prop_assert_eq!(c.frobenius(herm_pair(&c, u, v), d as i64), herm_pair(&c, v, u));
        prop_assert!(c.in_subfield(herm_pair(&c, u, v), 2 * d).unwrap());
        prop_assert!(c.in_subfield(herm_value(&c, u), d).unwrap());
    }

    #[test]
    fn pairing_is_sesquilinear(idx in 0..SHAPES.len(), r in any::<[u64; 7]>()) {
        let (p, d, n) = SHAPES[idx];
        let c = ctx(p, d, n);
        let u = vector(&c, r[0], r[1]);
        let v = vector(&c, r[2], r[3]);
        let w = vector(&c, r[4], r[5]);
        let fq2 = c.subfield_elements(2 * d).unwrap();
        let lambda = fq2[(r[6] % fq2.len() as u64) as usize];
        prop_assert_eq!(herm_pair(&c, u.add(&c, &v), w), c.add(herm_pair(&c, u, w), herm_pair(&c, v, w)));
        prop_assert_eq!(herm_pair(&c, u.scale(&c, lambda), w), c.mul(lambda, herm_pair(&c, u, w)));
        prop_assert_eq!(
            herm_pair(&c, u, w.scale(&c, lambda)),
            c.mul(c.frobenius(lambda, d as i64), herm_pair(&c, u, w))
        );
    }

    #[test]
    fn canonical_form_is_idempotent_and_scale_invariant(idx in 0..SHAPES.len(), r in any::<[u64; 3]>()) {
        let (p, d, n) = SHAPES[idx];
        let c = ctx(p, d, n);
        let v = vector(&c, r[0], r[1]);
        prop_assume!(!v.is_zero());
        let fq2 = c.subfield_elements(2 * d).unwrap();
        let lambda = fq2[1 + (r[2] % (fq2.len() as u64 - 1)) as usize];
        let point = ProjPoint::new(&c, v).unwrap();
        prop_assert_eq!(ProjPoint::new(&c, point.vector()).unwrap(), point);
        prop_assert_eq!(ProjPoint::new(&c, v.scale(&c, lambda)).unwrap(), point);
    }
}

/// Singular points counted from vectors: nonzero isotropic vectors divided
/// by |F_{q^2}^*|.
fn singular_count_oracle(c: &FieldCtx) -> u64 {
    let fq2 = c.subfield_elements(2 * c.params().d).unwrap();
    let mut isotropic = 0u64;
    for &a in &fq2 {
        for e in 0..c.order() {
            let v = Vector::new(a, c.elt(e).unwrap());
            if !v.is_zero() && herm_value(c, v).is_zero() {
                isotropic += 1;
            }
        }
    }
    isotropic / (fq2.len() as u64 - 1)
}

#[test]
fn singular_point_count() {
    for (p, d) in [(2, 1), (3, 1)] {
        let c = ctx(p, d, 3);
        let q = c.q();
        let expected = (q.pow(3) + 1) * (q * q + 1);
        assert_eq!(singular_count_oracle(&c), expected);
        let pts = singular_points(&c);
        assert_eq!(pts.len() as u64, expected);
        assert!(pts.iter().all(|pt| is_singular(&c, pt)));
    }
}

#[test]
fn polar_line_is_perpendicular_to_line() {
    for (p, d) in [(2, 1), (3, 1), (2, 2)] {
        let c = ctx(p, d, 3);
        let o = classical_ovoid(&c, &ProjPoint::affine(FieldElt::ZERO)).unwrap();
        let pts = o.points();
        for j in 1..pts.len().min(6) {
            let line = line_through(&c, &pts[0], &pts[j]).unwrap();
            let polar = line_perp(&c, &line).unwrap();
            assert_eq!(line.points().len() as u64, c.q() * c.q() + 1);
            for a in line.points() {
                for b in polar.points() {
                    assert!(perp(&c, a, b));
                }
            }
            assert_eq!(line_perp(&c, &polar).unwrap().points(), line.points());
        }
    }
}
