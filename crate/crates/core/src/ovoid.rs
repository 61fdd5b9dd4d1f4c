//! Ovoid verification, intersection profiles, the named constructions and
//! derivation along a secant line.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    classical_ovoid, is_singular, line_perp, singular_points, PointSet, ProjLine, ProjPoint, Vector,
};
use crate::gf::{FieldCtx, FieldElt, Params};
use crate::group::{act, orbit, singer_orbit, subgroup_elements, Group, GroupElt, SubgroupSpec};

/// A set presented as the orbit of `base` under the subgroup `spec`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TransitiveHint {
    pub spec: SubgroupSpec,
    pub base: ProjPoint,
}

/// Outcome of [`verify_ovoid`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub valid: bool,
    pub size: usize,
    pub expected_size: u64,
    /// Least failing index pair in the order (i ascending, then j > i ascending).
    pub first_failure: Option<[usize; 2]>,
    pub transitive_fast_path_used: bool,
    #[serde(rename = "stabilizer_order_in_G")]
    pub stabilizer_order_in_g: Option<u64>,
}

/// Precomputed conjugates for repeated pairing against a fixed point list.
struct PairTable<'a> {
    ctx: &'a FieldCtx,
    conj: Vec<(FieldElt, FieldElt)>,
}

impl<'a> PairTable<'a> {
    fn new(ctx: &'a FieldCtx, points: &[ProjPoint]) -> Self {
        let d = ctx.params().d as i64;
        let nd = d * ctx.params().n as i64;
        let conj = points.iter().map(|p| (ctx.frobenius(p.a(), d), ctx.frobenius(p.x(), nd))).collect();
        PairTable { ctx, conj }
    }

    /// Whether `u` is perpendicular to the `idx`-th point.
    #[inline]
    fn perp(&self, u: &ProjPoint, idx: usize) -> bool {
        let ctx = self.ctx;
        let (ca, cx) = self.conj[idx];
        let first = ctx.mul(u.a(), ca);
        let second = ctx.trace_to_fq2(ctx.mul(u.x(), cx));
        first == second
    }

    fn count_perp(&self, u: &ProjPoint) -> usize {
        (0..self.conj.len()).filter(|&i| self.perp(u, i)).count()
    }
}

fn check_singular(ctx: &FieldCtx, set: &PointSet) -> Result<()> {
    if set.iter().all(|p| is_singular(ctx, p)) {
        Ok(())
    } else {
        Err(Error::NonSingularPoint)
    }
}

fn first_failure_in_row(table: &PairTable<'_>, points: &[ProjPoint], i: usize) -> Option<[usize; 2]> {
    (i + 1..points.len()).find(|&j| table.perp(&points[i], j)).map(|j| [i, j])
}

/// Check that `set` has `q^n + 1` pairwise non-perpendicular points.
///
/// With a hint whose orbit reproduces `set`, only the first row of the pair
/// matrix is scanned; the group is transitive on `set` and preserves
/// perpendicularity, so the result is the same as the full scan.
pub fn verify_ovoid(ctx: &FieldCtx, set: &PointSet, hint: Option<&TransitiveHint>) -> Result<Certificate> {
    let transitive = match hint {
        Some(h) => {
            let elements = subgroup_elements(&Group::of(ctx), &h.spec);
            set.contains(&h.base) && orbit(ctx, &elements, &h.base) == *set
        }
        None => false,
    };
    verify_with(ctx, set, transitive)
}

/// [`verify_ovoid`] where transitivity of a group preserving the form is
/// already known to the caller.
pub fn verify_transitive(ctx: &FieldCtx, set: &PointSet) -> Result<Certificate> {
    verify_with(ctx, set, true)
}

fn verify_with(ctx: &FieldCtx, set: &PointSet, transitive: bool) -> Result<Certificate> {
    check_singular(ctx, set)?;
    let points = set.points();
    let table = PairTable::new(ctx, points);
    let first_failure = if transitive || points.len() < 2 {
        points.first().and_then(|_| first_failure_in_row(&table, points, 0))
    } else {
        (0..points.len())
            .into_par_iter()
            .find_map_first(|i| first_failure_in_row(&table, points, i))
    };
    let expected_size = ctx.singer_order();
    Ok(Certificate {
        valid: set.len() as u64 == expected_size && first_failure.is_none(),
        size: set.len(),
        expected_size,
        first_failure,
        transitive_fast_path_used: transitive,
        stabilizer_order_in_g: None,
    })
}

/// Which singular points an intersection profile visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileMode {
    All,
    Sample { count: usize, seed: u64 },
}

impl ProfileMode {
    /// Exhaustive for `q ≤ 4`, otherwise 100 sampled points.
    pub fn default_for(ctx: &FieldCtx) -> Self {
        if ctx.q() <= 4 && ctx.params().n == 3 {
            ProfileMode::All
        } else {
            ProfileMode::Sample { count: 100, seed: 0 }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileViolation {
    pub point: ProjPoint,
    pub count: usize,
    pub expected: u64,
}

/// Histograms of `|P^⊥ ∩ O|` for checked singular points inside and outside `O`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileReport {
    pub mode: ProfileMode,
    pub members_checked: usize,
    pub outside_checked: usize,
    pub member_counts: BTreeMap<usize, usize>,
    pub outside_counts: BTreeMap<usize, usize>,
    pub violations: Vec<ProfileViolation>,
}

impl ProfileReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Random singular points `⟨(1, x)⟩` outside `set`.
fn sample_outside(ctx: &FieldCtx, set: &PointSet, count: usize, seed: u64) -> Vec<ProjPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = ProjPoint::affine(ctx.elt(rng.gen_range(0..ctx.order())).expect("in range"));
        if is_singular(ctx, &p) && !set.contains(&p) {
            out.push(p);
        }
    }
    out
}

pub fn intersection_profile(ctx: &FieldCtx, ovoid: &PointSet, mode: ProfileMode) -> Result<ProfileReport> {
    check_singular(ctx, ovoid)?;
    let (members, outside): (Vec<ProjPoint>, Vec<ProjPoint>) = match mode {
        ProfileMode::All => singular_points(ctx).into_iter().partition(|p| ovoid.contains(p)),
        ProfileMode::Sample { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            let members = (0..count.min(ovoid.len()))
                .map(|_| ovoid.points()[rng.gen_range(0..ovoid.len())])
                .collect();
            (members, sample_outside(ctx, ovoid, count, seed))
        }
    };
    let table = PairTable::new(ctx, ovoid.points());
    let q = ctx.q();
    let off = q.pow(ctx.params().n - 2) + 1;
    let tally = |pts: &[ProjPoint], expected: u64| {
        let counts: Vec<usize> = pts.par_iter().map(|p| table.count_perp(p)).collect();
        let mut hist = BTreeMap::new();
        let mut bad = Vec::new();
        for (p, &c) in pts.iter().zip(&counts) {
            *hist.entry(c).or_insert(0) += 1;
            if c as u64 != expected {
                bad.push(ProfileViolation { point: *p, count: c, expected });
            }
        }
        (hist, bad)
    };
    let (member_counts, mut violations) = tally(&members, 1);
    let (outside_counts, bad) = tally(&outside, off);
    violations.extend(bad);
    Ok(ProfileReport {
        mode,
        members_checked: members.len(),
        outside_checked: outside.len(),
        member_counts,
        outside_counts,
        violations,
    })
}

/// A constructed point set, with the transitive group that produced it when
/// there is one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Construction {
    pub set: PointSet,
    pub hint: Option<TransitiveHint>,
}

/// The singular points of `⟨(1, 0)⟩^⊥` (`n = 3`).
pub fn construct_classical(ctx: &FieldCtx) -> Result<Construction> {
    let set = classical_ovoid(ctx, &ProjPoint::affine(FieldElt::ZERO))?;
    Ok(Construction { set, hint: None })
}

/// The orbit of `⟨(1, 1)⟩` under `G` (`q` even, `n = 3`).
pub fn construct_singer_type(ctx: &FieldCtx) -> Result<Construction> {
    let params = ctx.params();
    if !params.q_is_even() || params.n != 3 {
        return Err(Error::Precondition("the Singer-type ovoid needs q even and n = 3".into()));
    }
    singer_group_orbit(ctx)
}

/// The orbit of `⟨(1, 1)⟩` under `G`, for any parameters. It coincides with
/// the Singer orbit `S_1`.
pub fn singer_group_orbit(ctx: &FieldCtx) -> Result<Construction> {
    let spec = SubgroupSpec::new(ctx.params(), 1, 1, 0)?;
    let base = ProjPoint::affine(FieldElt::ONE);
    let set = orbit(ctx, &subgroup_elements(&Group::of(ctx), &spec), &base);
    Ok(Construction { set, hint: Some(TransitiveHint { spec, base }) })
}

/// `X^9 + X^4 + 1`, ascending.
pub const Q8_MINPOLY: [u64; 10] = [1, 0, 0, 0, 1, 0, 0, 0, 0, 1];

/// The two exceptional transitive ovoids of `H(3, 8^2)`.
pub fn construct_q8(ctx: &FieldCtx, variant: u8) -> Result<Construction> {
    let params = ctx.params();
    if (params.p, params.d, params.n) != (2, 3, 3) {
        return Err(Error::Precondition(format!("the q = 8 ovoids need (p,d,n) = (2,3,3), got {params}")));
    }
    let gamma = ctx.embed_root(&Q8_MINPOLY)?;
    let (exp, s, k, j) = match variant {
        1 => (39, 9, 2, 3),
        2 => (109, 9, 1, 0),
        _ => return Err(Error::Precondition(format!("variant must be 1 or 2, got {variant}"))),
    };
    let spec = SubgroupSpec::new(params, s, k, j)?;
    let base = ProjPoint::affine(ctx.pow(gamma, exp));
    let set = orbit(ctx, &subgroup_elements(&Group::of(ctx), &spec), &base);
    Ok(Construction { set, hint: Some(TransitiveHint { spec, base }) })
}

/// `(O \ ℓ) ∪ (singular points of ℓ^⊥)` for a line meeting `O` in `q + 1` points.
pub fn derive(ctx: &FieldCtx, ovoid: &PointSet, line: &ProjLine) -> Result<PointSet> {
    let meet = line.points().iter().filter(|p| ovoid.contains(p)).count();
    let q = ctx.q();
    if meet as u64 != q + 1 {
        return Err(Error::Precondition(format!("line meets the ovoid in {meet} points, need {}", q + 1)));
    }
    let polar = line_perp(ctx, line)?;
    let derived: PointSet = ovoid
        .iter()
        .filter(|p| !line.contains(p))
        .copied()
        .chain(polar.points().iter().filter(|p| is_singular(ctx, p)).copied())
        .collect();
    let cert = verify_ovoid(ctx, &derived, None)?;
    if !cert.valid {
        return Err(Error::Consistency(format!("derived set is not an ovoid: {cert:?}")));
    }
    Ok(derived)
}

/// `T = {⟨(0,t)⟩ : t ∈ F_{q^n}^*, Tr_{F_{q^n}/F_q}(t^2) = 0}`.
pub fn t_set(ctx: &FieldCtx) -> Result<Vec<ProjPoint>> {
    let Params { d, n, .. } = ctx.params();
    let set: PointSet = ctx
        .subfield_elements(n * d)?
        .into_iter()
        .skip(1)
        .filter(|&t| ctx.trace(ctx.mul(t, t), n * d, d).map(|v| v.is_zero()).unwrap_or(false))
        .map(|t| ProjPoint::canonical(ctx, Vector::new(FieldElt::ZERO, t)))
        .collect();
    let q = ctx.q();
    let expected = (q.pow(n - 1) - 1) / (q - 1);
    if set.len() as u64 != expected {
        return Err(Error::Consistency(format!("|T| = {}, expected {expected}", set.len())));
    }
    Ok(set.into_points())
}

/// `|R^⊥ ∩ S_y|` for `R = ⟨(0, t)⟩`, counted over the Singer orbit of `⟨(1,y)⟩`
/// (singularity of `⟨(1,y)⟩` is not required).
pub fn singer_perp_count(ctx: &FieldCtx, t: FieldElt, y: FieldElt) -> usize {
    let nd = (ctx.params().n * ctx.params().d) as i64;
    let tc = ctx.frobenius(t, nd);
    let yt = ctx.mul(y, tc);
    (0..ctx.singer_order())
        .filter(|&i| ctx.trace_to_fq2(ctx.mul(ctx.omega_pow(i), yt)).is_zero())
        .count()
}

/// Both sides of `⋃_{i<s} ρ^i(O) = ⋃_{i<s} φ^{ik}(S_y)` as sorted multisets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrakO {
    pub rho_side: Vec<ProjPoint>,
    pub phi_side: Vec<ProjPoint>,
}

impl FrakO {
    pub fn holds(&self) -> bool {
        self.rho_side == self.phi_side
    }
}

pub fn frak_o_multiset(ctx: &FieldCtx, ovoid: &PointSet, spec: &SubgroupSpec, y: FieldElt) -> Result<FrakO> {
    if !ovoid.contains(&ProjPoint::affine(y)) {
        return Err(Error::Precondition("<(1,y)> is not in the set".into()));
    }
    let group = Group::of(ctx);
    let mut rho_side: Vec<ProjPoint> = (0..spec.s)
        .flat_map(|i| ovoid.iter().map(move |p| (i, *p)))
        .map(|(i, p)| act(ctx, GroupElt::new(i, 0), &p))
        .collect();
    let s_y = singer_orbit(ctx, y)?;
    let mut phi_side: Vec<ProjPoint> = (0..spec.s)
        .flat_map(|i| {
            let g = group.power(GroupElt::new(0, spec.k % group.degree()), i);
            s_y.points.iter().map(move |p| (g, *p))
        })
        .map(|(g, p)| act(ctx, g, &p))
        .collect();
    rho_side.sort_unstable();
    phi_side.sort_unstable();
    Ok(FrakO { rho_side, phi_side })
}

/// `Σ_{i<s} |R^⊥ ∩ φ^{ik}(S_y)|` for a point `R`.
pub fn frak_o_block_sum(ctx: &FieldCtx, spec: &SubgroupSpec, y: FieldElt, r: &ProjPoint) -> Result<usize> {
    let group = Group::of(ctx);
    let s_y = singer_orbit(ctx, y)?;
    let table = PairTable::new(ctx, &[*r]);
    Ok((0..spec.s)
        .map(|i| {
            let g = group.power(GroupElt::new(0, spec.k % group.degree()), i);
            s_y.points.iter().filter(|p| table.perp(&act(ctx, g, p), 0)).count()
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::line_through;
    use crate::group::{set_stabilizer_in_g, DEFAULT_GROUP_CAP};

    fn ctx(p: u64, d: u32, n: u32) -> FieldCtx {
        FieldCtx::new(Params::new(p, d, n).unwrap()).unwrap()
    }

    #[test]
    fn classical_is_valid() {
        for (p, d) in [(2, 1), (3, 1)] {
            let c = ctx(p, d, 3);
            let o = construct_classical(&c).unwrap().set;
            let cert = verify_ovoid(&c, &o, None).unwrap();
            assert!(cert.valid, "{cert:?}");
            assert_eq!(cert.size as u64, c.singer_order());
        }
    }

    #[test]
    fn singer_type_small() {
        let c = ctx(2, 1, 3);
        let con = construct_singer_type(&c).unwrap();
        assert_eq!(con.set, singer_orbit(&c, c.one()).unwrap().to_set());
        let cert = verify_ovoid(&c, &con.set, con.hint.as_ref()).unwrap();
        assert!(cert.valid && cert.transitive_fast_path_used);
        assert!(construct_singer_type(&ctx(3, 1, 3)).is_err());
    }

    #[test]
    fn s1_fails_for_n5() {
        let c = ctx(2, 1, 5);
        let con = singer_group_orbit(&c).unwrap();
        let cert = verify_ovoid(&c, &con.set, con.hint.as_ref()).unwrap();
        assert!(!cert.valid);
        assert_eq!(cert.first_failure, verify_ovoid(&c, &con.set, None).unwrap().first_failure);
    }

    #[test]
    fn q8_pair() {
        let c = ctx(2, 3, 3);
        let mut sets = Vec::new();
        for (variant, stab) in [(1u8, 513u64), (2, 1026)] {
            let con = construct_q8(&c, variant).unwrap();
            assert_eq!(con.set.len(), 513);
            let cert = verify_ovoid(&c, &con.set, con.hint.as_ref()).unwrap();
            assert!(cert.valid, "variant {variant}: {cert:?}");
            let st = set_stabilizer_in_g(&c, &con.set, DEFAULT_GROUP_CAP).unwrap();
            assert_eq!(st.order, stab);
            sets.push(con.set);
        }
    }

    #[test]
    fn profile_classical_q2() {
        let c = ctx(2, 1, 3);
        let o = construct_classical(&c).unwrap().set;
        let r = intersection_profile(&c, &o, ProfileMode::All).unwrap();
        assert!(r.ok());
        assert_eq!(r.member_counts.keys().copied().collect::<Vec<_>>(), vec![1]);
        assert_eq!(r.outside_counts.keys().copied().collect::<Vec<_>>(), vec![3]);
        assert_eq!(r.members_checked + r.outside_checked, 45);
    }

    #[test]
    fn derivation_is_involutive() {
        let c = ctx(2, 1, 3);
        let o = construct_classical(&c).unwrap().set;
        let line = line_through(&c, &o.points()[0], &o.points()[3]).unwrap();
        let derived = derive(&c, &o, &line).unwrap();
        assert_eq!(derived.len(), 9);
        let polar = line_perp(&c, &line).unwrap();
        assert_eq!(derive(&c, &derived, &polar).unwrap(), o);
        let tangent_like = line_through(&c, &o.points()[0], &ProjPoint::affine(c.zero()));
        if let Ok(l) = tangent_like {
            if l.points().iter().filter(|p| o.contains(p)).count() != 3 {
                assert!(derive(&c, &o, &l).is_err());
            }
        }
    }

    #[test]
    fn t_set_sizes() {
        for (p, d, n) in [(2, 1, 3), (3, 1, 3), (2, 1, 5)] {
            let c = ctx(p, d, n);
            let q = c.q();
            assert_eq!(t_set(&c).unwrap().len() as u64, (q.pow(n - 1) - 1) / (q - 1));
        }
    }
}
