use std::collections::BTreeSet;

use hovoid::geometry::{herm_pair, is_singular, perp, singular_points, ProjPoint, Vector};
use hovoid::gf::{FieldCtx, Params};
use hovoid::group::{act, orbit, subgroup_elements, Group, GroupElt, SubgroupSpec};
use proptest::prelude::*;

fn ctx(p: u64, d: u32, n: u32) -> FieldCtx {
    FieldCtx::new(Params::new(p, d, n).unwrap()).unwrap()
}

const SHAPES: &[(u64, u32, u32)] = &[(2, 1, 3), (3, 1, 3), (2, 2, 3), (5, 1, 3), (2, 1, 5), (2, 3, 3)];

/// The first singular `⟨(1, x)⟩` at or after encoding `r`.
fn singular_point(c: &FieldCtx, r: u64) -> ProjPoint {
    (0..c.order())
        .map(|k| ProjPoint::affine(c.elt((r + k) % c.order()).unwrap()))
        .find(|pt| is_singular(c, pt))
        .unwrap()
}

fn elt(g: &Group, r: u64) -> GroupElt {
    GroupElt::new(r % g.singer(), ((r >> 32) % g.degree() as u64) as u32)
}

/// `ρ^j φ^i` applied to a vector, then normalized.
fn act_oracle(c: &FieldCtx, g: GroupElt, v: Vector) -> ProjPoint {
    let a = c.frobenius(v.a, g.i as i64);
    let mut x = c.frobenius(v.x, g.i as i64);
    for _ in 0..g.j {
        x = c.mul(x, c.omega());
    }
    ProjPoint::new(c, Vector::new(a, x)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn action_preserves_singularity_and_perpendicularity(idx in 0..SHAPES.len(), r in any::<[u64; 3]>()) {
        let (p, d, n) = SHAPES[idx];
        let c = ctx(p, d, n);
        let g = Group::of(&c);
        let (u, w) = (singular_point(&c, r[0]), singular_point(&c, r[1]));
        let h = elt(&g, r[2]);
        let (gu, gw) = (act(&c, h, &u), act(&c, h, &w));
        prop_assert!(is_singular(&c, &gu));
        prop_assert_eq!(perp(&c, &u, &w), perp(&c, &gu, &gw));
        // on representatives, b(gu, gw) = b(u, w)^{p^i}
        let fu = Vector::new(c.frobenius(u.a(), h.i as i64), c.mul(c.omega_pow(h.j), c.frobenius(u.x(), h.i as i64)));
        let fw = Vector::new(c.frobenius(w.a(), h.i as i64), c.mul(c.omega_pow(h.j), c.frobenius(w.x(), h.i as i64)));
        prop_assert_eq!(
            herm_pair(&c, fu, fw),
            c.frobenius(herm_pair(&c, u.vector(), w.vector()), h.i as i64)
        );
    }

    #[test]
    fn action_matches_oracle_and_composition(idx in 0..SHAPES.len(), r in any::<[u64; 3]>()) {
        let (p, d, n) = SHAPES[idx];
        let c = ctx(p, d, n);
        let g = Group::of(&c);
        let u = singular_point(&c, r[0]);
        let (x, y) = (elt(&g, r[1]), elt(&g, r[2]));
        prop_assert_eq!(act(&c, x, &u), act_oracle(&c, x, u.vector()));
        prop_assert_eq!(act(&c, g.compose(x, y), &u), act(&c, x, &act(&c, y, &u)));
        prop_assert_eq!(act(&c, g.inverse(x), &act(&c, x, &u)), u);
    }
}

#[test]
fn power_closed_form_matches_repeated_composition() {
    for (p, d, n) in [(2, 1, 3), (3, 1, 3), (2, 2, 3)] {
        let g = Group::new(Params::new(p, d, n).unwrap());
        for l in 0..g.singer() {
            for k in 0..g.degree() {
                let x = GroupElt::new(l, k);
                let mut acc = g.identity();
                for e in 0..2 * g.degree() as u64 + 3 {
                    assert_eq!(g.power_closed_form(x, e), acc, "({l},{k})^{e}");
                    assert_eq!(g.power(x, e), acc);
                    acc = g.compose(acc, x);
                }
            }
        }
    }
}

fn all_specs(params: Params) -> Vec<SubgroupSpec> {
    let g = Group::new(params);
    let mut out = Vec::new();
    for s in (1..=g.singer()).filter(|s| g.singer() % s == 0) {
        for k in (1..=g.degree()).filter(|k| g.degree() % k == 0) {
            for j in 0..s {
                if let Ok(spec) = SubgroupSpec::new(params, s, k, j) {
                    out.push(spec);
                }
            }
        }
    }
    out
}

#[test]
fn subgroup_orders_and_closure() {
    for (p, d, n) in [(2, 1, 3), (3, 1, 3), (2, 2, 3), (2, 1, 5)] {
        let params = Params::new(p, d, n).unwrap();
        let g = Group::new(params);
        let specs = all_specs(params);
        assert!(!specs.is_empty());
        for spec in specs {
            let elements = subgroup_elements(&g, &spec);
            let expected = g.singer() / spec.s * (g.degree() / spec.k) as u64;
            assert_eq!(elements.len() as u64, expected, "{spec:?}");
            assert_eq!(elements, g.closure(&spec.generators(&g)), "{spec:?}");
        }
    }
}

#[test]
fn orbit_stabilizer() {
    for (p, d, n) in [(2, 1, 3), (3, 1, 3)] {
        let c = ctx(p, d, n);
        let params = c.params();
        let g = Group::of(&c);
        let points = singular_points(&c);
        for spec in all_specs(params) {
            let elements = subgroup_elements(&g, &spec);
            for pt in points.iter().step_by(7) {
                let orb = orbit(&c, &elements, pt);
                let stab = elements.iter().filter(|&&h| act(&c, h, pt) == *pt).count();
                assert_eq!(orb.len() * stab, elements.len(), "{spec:?} at {pt}");
            }
        }
    }
}

#[test]
fn subgroups_are_distinct_per_spec() {
    // Different valid specs give different subgroups.
    let params = Params::new(2, 1, 3).unwrap();
    let g = Group::new(params);
    let sets: BTreeSet<Vec<GroupElt>> = all_specs(params).iter().map(|s| subgroup_elements(&g, s)).collect();
    assert_eq!(sets.len(), all_specs(params).len());
}
