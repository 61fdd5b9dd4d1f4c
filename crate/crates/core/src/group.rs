//! The group `G = ⟨ρ, φ⟩` with `ρ: (a,x) ↦ (a, ωx)` and
//! `φ: (a,x) ↦ (a^p, x^p)`, its subgroups `⟨ρ^s, ρ^j φ^k⟩`, and its action on
//! points.
//!
//! Elements are kept in the normal form `ρ^j φ^i`. From `φρφ^{-1} = ρ^p` the
//! product is `ρ^{j1} φ^{i1} ρ^{j2} φ^{i2} = ρ^{j1 + j2 p^{i1}} φ^{i1+i2}`.

use std::collections::{HashSet, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, geometric_quotient_mod, pow_mod};
use crate::error::{Error, Result};
use crate::geometry::{is_singular, PointSet, ProjPoint, Vector};
use crate::gf::{FieldCtx, FieldElt, Params};

/// Default cap on `|G|` for exhaustive stabilizer computations.
pub const DEFAULT_GROUP_CAP: u64 = 1_000_000;

/// `ρ^j φ^i`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElt {
    pub j: u64,
    pub i: u32,
}

impl GroupElt {
    pub fn new(j: u64, i: u32) -> Self {
        GroupElt { j, i }
    }
}

/// The abstract group `G` of order `2nd(q^n+1)` for one [`Params`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Group {
    p: u64,
    singer: u64,
    degree: u32,
}

impl Group {
    pub fn new(params: Params) -> Self {
        Group { p: params.p, singer: params.singer_order(), degree: params.degree() }
    }

    pub fn of(ctx: &FieldCtx) -> Self {
        Self::new(ctx.params())
    }

    /// `q^n + 1`, the order of `ρ`.
    pub fn singer(&self) -> u64 {
        self.singer
    }

    /// `2nd`, the order of `φ`.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> u64 {
        self.singer * self.degree as u64
    }

    pub fn identity(&self) -> GroupElt {
        GroupElt::new(0, 0)
    }

    pub fn rho(&self) -> GroupElt {
        GroupElt::new(1 % self.singer, 0)
    }

    pub fn phi(&self) -> GroupElt {
        GroupElt::new(0, 1 % self.degree)
    }

    /// Reduce an arbitrary pair into range.
    pub fn elt(&self, j: i64, i: i64) -> GroupElt {
        GroupElt::new(j.rem_euclid(self.singer as i64) as u64, i.rem_euclid(self.degree as i64) as u32)
    }

    pub fn compose(&self, g: GroupElt, h: GroupElt) -> GroupElt {
        let twist = pow_mod(self.p, g.i as u64, self.singer) as u128;
        let j = (g.j as u128 + h.j as u128 * twist) % self.singer as u128;
        GroupElt::new(j as u64, (g.i + h.i) % self.degree)
    }

    pub fn inverse(&self, g: GroupElt) -> GroupElt {
        let i = (self.degree - g.i) % self.degree;
        let twist = pow_mod(self.p, i as u64, self.singer) as u128;
        let j = (self.singer as u128 - g.j as u128 * twist % self.singer as u128) % self.singer as u128;
        GroupElt::new(j as u64, i)
    }

    /// `g^e` by repeated squaring.
    pub fn power(&self, g: GroupElt, mut e: u64) -> GroupElt {
        let mut acc = self.identity();
        let mut base = g;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.compose(acc, base);
            }
            base = self.compose(base, base);
            e >>= 1;
        }
        acc
    }

    /// `(ρ^l φ^k)^e = ρ^{l (p^{ke}-1)/(p^k-1)} φ^{ke}`, with the quotient
    /// computed exactly.
    pub fn power_closed_form(&self, g: GroupElt, e: u64) -> GroupElt {
        let geom = geometric_quotient_mod(self.p, g.i as u64, e, self.singer) as u128;
        let j = (g.j as u128 * geom % self.singer as u128) as u64;
        GroupElt::new(j, ((g.i as u64 * e) % self.degree as u64) as u32)
    }

    pub fn elt_order(&self, g: GroupElt) -> u64 {
        let r = (self.degree / gcd(g.i as u64, self.degree as u64) as u32) as u64;
        let top = self.power_closed_form(g, r);
        r * (self.singer / gcd(self.singer, top.j))
    }

    /// The homomorphism `ρ^j φ^i ↦ φ^i`, as the exponent `i`.
    pub fn eta(&self, g: GroupElt) -> u32 {
        g.i
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElt> + '_ {
        (0..self.degree).flat_map(move |i| (0..self.singer).map(move |j| GroupElt::new(j, i)))
    }

    /// The subgroup generated by `gens`, sorted.
    pub fn closure(&self, gens: &[GroupElt]) -> Vec<GroupElt> {
        let mut seen: HashSet<GroupElt> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(self.identity());
        queue.push_back(self.identity());
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.compose(x, g);
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        let mut out: Vec<GroupElt> = seen.into_iter().collect();
        out.sort_unstable();
        out
    }
}

/// `ρ^j φ^i (a, x) = (a^{p^i}, ω^j x^{p^i})`, canonicalized.
pub fn act(ctx: &FieldCtx, g: GroupElt, p: &ProjPoint) -> ProjPoint {
    let i = g.i as i64;
    let a = ctx.frobenius(p.a(), i);
    let x = ctx.mul(ctx.omega_pow(g.j), ctx.frobenius(p.x(), i));
    if a == FieldElt::ONE {
        ProjPoint::affine(x)
    } else {
        ProjPoint::canonical(ctx, Vector::new(a, x))
    }
}

/// Image of a point set under `g`.
pub fn act_set(ctx: &FieldCtx, g: GroupElt, set: &PointSet) -> PointSet {
    set.iter().map(|p| act(ctx, g, p)).collect()
}

/// `H = ⟨ρ^s, ρ^j φ^k⟩` with `mks = 2nd`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubgroupSpec {
    pub s: u64,
    pub k: u32,
    pub j: u64,
    pub m: u32,
}

impl SubgroupSpec {
    pub fn new(params: Params, s: u64, k: u32, j: u64) -> Result<Self> {
        let singer = params.singer_order();
        let degree = params.degree();
        let bad = |why: String| Err(Error::InvalidSubgroup(format!("(s={s}, k={k}, j={j}): {why}")));
        if s == 0 || singer % s != 0 {
            return bad(format!("s must divide {singer}"));
        }
        if k == 0 || degree % k != 0 {
            return bad(format!("k must divide {degree}"));
        }
        if (degree / k) as u64 % s != 0 {
            return bad(format!("ks must divide {degree}"));
        }
        if j >= s {
            return bad("j must lie in [0, s)".into());
        }
        // (p^{2nd} - 1)/(p^k - 1) · j ≡ 0 (mod s)
        let geom = geometric_quotient_mod(params.p, k as u64, (degree / k) as u64, s);
        if (geom as u128 * j as u128) % s as u128 != 0 {
            return bad("congruence condition fails".into());
        }
        let m = (degree as u64 / (k as u64 * s)) as u32;
        Ok(SubgroupSpec { s, k, j, m })
    }

    /// `|H| = (q^n+1)/s · 2nd/k`.
    pub fn order(&self, group: &Group) -> u64 {
        group.singer() / self.s * (group.degree() / self.k) as u64
    }

    pub fn generators(&self, group: &Group) -> [GroupElt; 2] {
        [GroupElt::new(self.s % group.singer(), 0), GroupElt::new(self.j, self.k % group.degree())]
    }
}

/// The elements `ρ^{sa} (ρ^j φ^k)^b` of `H`, sorted.
pub fn subgroup_elements(group: &Group, spec: &SubgroupSpec) -> Vec<GroupElt> {
    let n = group.singer();
    let blocks = (group.degree() / spec.k) as u64;
    let mut out = Vec::with_capacity(spec.order(group) as usize);
    for b in 0..blocks {
        let top = group.power_closed_form(GroupElt::new(spec.j, spec.k), b);
        for a in 0..n / spec.s {
            out.push(GroupElt::new((top.j + spec.s * a) % n, top.i));
        }
    }
    out.sort_unstable();
    out
}

pub fn orbit(ctx: &FieldCtx, elements: &[GroupElt], p: &ProjPoint) -> PointSet {
    elements.iter().map(|&g| act(ctx, g, p)).collect()
}

/// The orbit of `⟨(1, y)⟩` under `⟨ρ⟩`, in exponent order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingerOrbit {
    pub y: FieldElt,
    /// `points[i] = ⟨(1, ω^i y)⟩`.
    pub points: Vec<ProjPoint>,
}

impl SingerOrbit {
    pub fn to_set(&self) -> PointSet {
        self.points.iter().copied().collect()
    }
}

pub fn singer_orbit(ctx: &FieldCtx, y: FieldElt) -> Result<SingerOrbit> {
    let base = ProjPoint::affine(y);
    if !is_singular(ctx, &base) {
        return Err(Error::NonSingularPoint);
    }
    let points = (0..ctx.singer_order()).map(|i| ProjPoint::affine(ctx.mul(ctx.omega_pow(i), y))).collect();
    Ok(SingerOrbit { y, points })
}

/// The blocks `L_{i,y} = {⟨(1, ω^{i + jM} y)⟩ : 0 ≤ j ≤ q}`, `M = (q^n+1)/(q+1)`.
pub fn blocks(ctx: &FieldCtx, orbit: &SingerOrbit) -> Vec<Vec<ProjPoint>> {
    let q = ctx.q();
    let m = ctx.singer_order() / (q + 1);
    (0..m)
        .map(|i| (0..=q).map(|j| orbit.points[(i + j * m) as usize]).collect())
        .collect()
}

/// The stabilizer of a point set inside `G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stabilizer {
    pub order: u64,
    pub generators: Vec<GroupElt>,
    pub elements: Vec<GroupElt>,
}

pub fn fixes_set(ctx: &FieldCtx, g: GroupElt, set: &PointSet) -> bool {
    set.iter().all(|p| set.contains(&act(ctx, g, p)))
}

/// `{g ∈ G : g(S) = S}` by enumeration of `G`.
pub fn set_stabilizer_in_g(ctx: &FieldCtx, set: &PointSet, cap: u64) -> Result<Stabilizer> {
    let group = Group::of(ctx);
    if group.order() > cap {
        return Err(Error::Budget(format!("|G| = {} exceeds the cap {cap}", group.order())));
    }
    let all: Vec<GroupElt> = group.elements().collect();
    let mut elements: Vec<GroupElt> = all.into_par_iter().filter(|&g| fixes_set(ctx, g, set)).collect();
    elements.sort_unstable();
    let generators = generating_set(&group, &elements);
    Ok(Stabilizer { order: elements.len() as u64, generators, elements })
}

/// A small generating set for a subgroup given by its sorted elements,
/// chosen greedily in element order.
pub fn generating_set(group: &Group, elements: &[GroupElt]) -> Vec<GroupElt> {
    let mut gens = Vec::new();
    let mut span: HashSet<GroupElt> = [group.identity()].into_iter().collect();
    for &g in elements {
        if !span.contains(&g) {
            gens.push(g);
            span = group.closure(&gens).into_iter().collect();
        }
        if span.len() == elements.len() {
            break;
        }
    }
    gens
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, d: u32, n: u32) -> FieldCtx {
        FieldCtx::new(Params::new(p, d, n).unwrap()).unwrap()
    }

    #[test]
    fn commutation_rule() {
        let g = Group::new(Params::new(2, 3, 3).unwrap());
        assert_eq!(g.compose(g.phi(), g.rho()), GroupElt::new(2, 1));
        assert_eq!(g.elt_order(g.rho()), 513);
        assert_eq!(g.elt_order(g.phi()), 18);
        assert_eq!(g.order(), 9234);
    }

    #[test]
    fn inverses() {
        let g = Group::new(Params::new(3, 1, 3).unwrap());
        for x in g.elements() {
            assert_eq!(g.compose(x, g.inverse(x)), g.identity());
            assert_eq!(g.compose(g.inverse(x), x), g.identity());
        }
    }

    #[test]
    fn orders_match_brute_force() {
        let g = Group::new(Params::new(2, 1, 3).unwrap());
        for x in g.elements() {
            let mut y = x;
            let mut k = 1;
            while y != g.identity() {
                y = g.compose(y, x);
                k += 1;
            }
            assert_eq!(g.elt_order(x), k);
        }
    }

    #[test]
    fn involutions_outside_rho_have_phi_exponent_nd() {
        let params = Params::new(2, 1, 5).unwrap();
        let g = Group::new(params);
        let nd = params.n * params.d;
        let invs: Vec<_> = g.elements().filter(|&x| x.i != 0 && g.elt_order(x) == 2).collect();
        assert!(!invs.is_empty());
        assert!(invs.iter().all(|x| x.i == nd));
    }

    #[test]
    fn subgroup_sizes() {
        let params = Params::new(2, 3, 3).unwrap();
        let g = Group::new(params);
        let h1 = SubgroupSpec::new(params, 9, 2, 3).unwrap();
        let h2 = SubgroupSpec::new(params, 9, 1, 0).unwrap();
        assert_eq!((h1.m, h2.m), (1, 2));
        assert_eq!(subgroup_elements(&g, &h1).len(), 513);
        assert_eq!(subgroup_elements(&g, &h2).len(), 1026);
        let rho = SubgroupSpec::new(params, 1, 18, 0).unwrap();
        assert_eq!(subgroup_elements(&g, &rho).len(), 513);
        assert!(SubgroupSpec::new(params, 9, 1, 9).is_err());
        assert!(SubgroupSpec::new(params, 3, 18, 0).is_err());
        assert!(SubgroupSpec::new(params, 5, 1, 0).is_err());
        for spec in [h1, h2] {
            let els = subgroup_elements(&g, &spec);
            assert_eq!(g.closure(&spec.generators(&g)), els);
        }
    }

    #[test]
    fn action_examples() {
        let c = ctx(2, 1, 3);
        let g = Group::of(&c);
        let p = ProjPoint::affine(c.one());
        assert_eq!(act(&c, g.identity(), &p), p);
        assert_eq!(act(&c, g.rho(), &p), ProjPoint::affine(c.omega()));
        let q = ProjPoint::affine(c.pow(c.g(), 5));
        assert_eq!(act(&c, g.power(g.phi(), 6), &q), q);
        let full: Vec<GroupElt> = g.elements().collect();
        assert_eq!(orbit(&c, &full, &ProjPoint::affine(c.zero())).len(), 1);
        assert_eq!(orbit(&c, &full, &p).len(), 9);
    }

    #[test]
    fn blocks_partition_singer_orbit() {
        for (p, d, nb) in [(2, 1, 3usize), (2, 3, 57)] {
            let c = ctx(p, d, 3);
            let orbit = singer_orbit(&c, c.one()).unwrap();
            let bl = blocks(&c, &orbit);
            assert_eq!(bl.len(), nb);
            assert!(bl.iter().all(|b| b.len() as u64 == c.q() + 1));
            let union: PointSet = bl.iter().flatten().copied().collect();
            assert_eq!(union, orbit.to_set());
            let m = c.singer_order() / (c.q() + 1);
            assert!(bl[0].contains(&ProjPoint::affine(c.omega_pow(m))));
        }
        let c = ctx(2, 1, 3);
        assert!(matches!(singer_orbit(&c, c.zero()), Err(Error::NonSingularPoint)));
    }

    #[test]
    fn singer_orbit_stabilizer_is_g() {
        let c = ctx(2, 1, 3);
        let s1 = singer_orbit(&c, c.one()).unwrap().to_set();
        let st = set_stabilizer_in_g(&c, &s1, DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(st.order, 54);
        assert_eq!(Group::of(&c).closure(&st.generators).len(), 54);
        assert!(matches!(set_stabilizer_in_g(&c, &s1, 10), Err(Error::Budget(_))));
    }
}
