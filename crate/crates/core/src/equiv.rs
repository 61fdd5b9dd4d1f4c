//! Equivalence of point sets under the full group of semi-similitudes of the
//! Hermitian form, and set stabilizers in that group as permutation groups.
//!
//! Every semi-similitude is a linear similitude composed with a power of
//! `φ`, so both problems reduce to finding linear similitudes `L` with
//! `L(A) = B`. A linear map is pinned down by the images of `n + 1`
//! independent points of `A` up to scalars; for pairwise non-perpendicular
//! points those scalars are forced by the form, which keeps the backtracking
//! narrow.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::geometry::{herm_pair, PointSet, ProjPoint, Vector};
use crate::gf::{FieldCtx, FieldElt};
use crate::group::{act, GroupElt};

/// A permutation of point indices.
pub type Perm = Vec<u32>;

fn invert(ctx: &FieldCtx, mut m: Vec<Vec<FieldElt>>) -> Option<Vec<Vec<FieldElt>>> {
    let n = m.len();
    let mut inv: Vec<Vec<FieldElt>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { FieldElt::ONE } else { FieldElt::ZERO }).collect()).collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let f = ctx.inv(m[col][col]).ok()?;
        for c in 0..n {
            m[col][c] = ctx.mul(m[col][c], f);
            inv[col][c] = ctx.mul(inv[col][c], f);
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col];
            for c in 0..n {
                m[r][c] = ctx.sub(m[r][c], ctx.mul(f, m[col][c]));
                inv[r][c] = ctx.sub(inv[r][c], ctx.mul(f, inv[col][c]));
            }
        }
    }
    Some(inv)
}

fn gram(ctx: &FieldCtx, vs: &[Vector]) -> Vec<Vec<FieldElt>> {
    vs.iter().map(|&u| vs.iter().map(|&v| herm_pair(ctx, u, v)).collect()).collect()
}

/// Source-side data shared by every target frame.
struct Frame {
    /// Indices into the source of `n + 1` independent points, the first being 0.
    idx: Vec<usize>,
    /// Gram matrix of the frame.
    g: Vec<Vec<FieldElt>>,
    /// Coordinates of every source point in the frame basis.
    coords: Vec<Vec<FieldElt>>,
}

impl Frame {
    fn new(ctx: &FieldCtx, src: &[ProjPoint]) -> Result<Self> {
        let dim = ctx.params().n as usize + 1;
        let mut idx = vec![0];
        let mut vecs = vec![src[0].vector()];
        for (k, p) in src.iter().enumerate().skip(1) {
            if idx.len() == dim {
                break;
            }
            let mut trial = vecs.clone();
            trial.push(p.vector());
            if invert(ctx, gram(ctx, &trial)).is_some() {
                idx.push(k);
                vecs = trial;
            }
        }
        if idx.len() < dim {
            return Err(Error::Precondition("point set does not span the space".into()));
        }
        let g = gram(ctx, &vecs);
        let g_inv = invert(ctx, g.clone()).expect("frame is independent");
        let coords = src
            .iter()
            .map(|w| {
                let r: Vec<FieldElt> = vecs.iter().map(|&u| herm_pair(ctx, w.vector(), u)).collect();
                (0..dim)
                    .map(|i| (0..dim).fold(FieldElt::ZERO, |acc, j| ctx.add(acc, ctx.mul(r[j], g_inv[j][i]))))
                    .collect()
            })
            .collect();
        Ok(Frame { idx, g, coords })
    }
}

/// Target-side data: the points and their Gram matrix.
pub struct Target<'a> {
    set: &'a PointSet,
    vecs: Vec<Vector>,
    gram: Vec<Vec<FieldElt>>,
}

impl<'a> Target<'a> {
    pub fn new(ctx: &FieldCtx, set: &'a PointSet) -> Self {
        let vecs: Vec<Vector> = set.iter().map(|p| p.vector()).collect();
        let gram = gram(ctx, &vecs);
        Target { set, vecs, gram }
    }
}

struct Search<'a> {
    ctx: &'a FieldCtx,
    frame: &'a Frame,
    dst: &'a Target<'a>,
    conj: i64,
    c: FieldElt,
    chosen: Vec<usize>,
    lambdas: Vec<FieldElt>,
    first_only: bool,
    found: Vec<Perm>,
}

impl Search<'_> {
    fn conj(&self, x: FieldElt) -> FieldElt {
        self.ctx.frobenius(x, self.conj)
    }

    fn run(&mut self, t: usize) {
        if self.first_only && !self.found.is_empty() {
            return;
        }
        let ctx = self.ctx;
        if t == self.frame.idx.len() {
            if let Some(perm) = self.image() {
                self.found.push(perm);
            }
            return;
        }
        let gram = &self.dst.gram;
        let v0 = self.chosen[0];
        for cand in 0..self.dst.vecs.len() {
            if self.chosen.contains(&cand) {
                continue;
            }
            let Ok(lam) = ctx.div(ctx.mul(self.c, self.frame.g[t][0]), gram[cand][v0]) else {
                continue;
            };
            let consistent = (1..t).all(|s| {
                let lhs = ctx.mul(ctx.mul(self.lambdas[s], self.conj(lam)), gram[self.chosen[s]][cand]);
                lhs == ctx.mul(self.c, self.frame.g[s][t])
            });
            if !consistent {
                continue;
            }
            self.chosen.push(cand);
            self.lambdas.push(lam);
            self.run(t + 1);
            self.chosen.pop();
            self.lambdas.pop();
        }
    }

    fn image(&self) -> Option<Perm> {
        let ctx = self.ctx;
        let cols: Vec<Vector> =
            self.chosen.iter().zip(&self.lambdas).map(|(&k, &l)| self.dst.vecs[k].scale(ctx, l)).collect();
        let mut perm = Vec::with_capacity(self.frame.coords.len());
        for coords in &self.frame.coords {
            let v = coords
                .iter()
                .zip(&cols)
                .fold(Vector::new(FieldElt::ZERO, FieldElt::ZERO), |acc, (&c, col)| acc.add(ctx, &col.scale(ctx, c)));
            perm.push(self.dst.set.index_of(&ProjPoint::canonical(ctx, v))? as u32);
        }
        Some(perm)
    }
}

/// Linear similitudes mapping `src` (in the given order) onto `dst` with
/// `src[0] ↦ dst[target]`, as index maps. The points of `src` must be
/// pairwise non-perpendicular and span the space.
pub fn linear_maps(ctx: &FieldCtx, src: &[ProjPoint], dst: &Target, target: usize, first_only: bool) -> Result<Vec<Perm>> {
    if src.len() != dst.vecs.len() || src.is_empty() {
        return Ok(Vec::new());
    }
    let frame = Frame::new(ctx, src)?;
    let fq = ctx.subfield_elements(ctx.params().d)?;
    let mut found = Vec::new();
    for &c in &fq[1..] {
        let mut s = Search {
            ctx,
            frame: &frame,
            dst,
            conj: ctx.params().d as i64,
            c,
            chosen: vec![target],
            lambdas: vec![FieldElt::ONE],
            first_only,
            found: Vec::new(),
        };
        s.run(1);
        found.extend(s.found);
        if first_only && !found.is_empty() {
            break;
        }
    }
    // Maps differing by a scalar induce the same permutation.
    found.sort_unstable();
    found.dedup();
    Ok(found)
}

fn image_under_phi(ctx: &FieldCtx, set: &PointSet, i: u32) -> Vec<ProjPoint> {
    let g = GroupElt::new(0, i);
    set.iter().map(|p| act(ctx, g, p)).collect()
}

/// Representatives of the orbits of `group` (acting by `act`) on `set`.
fn orbit_reps(ctx: &FieldCtx, set: &PointSet, group: &[GroupElt]) -> Vec<usize> {
    let mut seen = vec![false; set.len()];
    let mut reps = Vec::new();
    for k in 0..set.len() {
        if seen[k] {
            continue;
        }
        reps.push(k);
        let p = set.points()[k];
        for &g in group {
            if let Some(i) = set.index_of(&act(ctx, g, &p)) {
                seen[i] = true;
            }
        }
        seen[k] = true;
    }
    reps
}

/// Whether some semi-similitude maps `a` onto `b`. `b_group` must consist of
/// elements of `G` stabilizing `b`; only one target per orbit is tried.
pub fn projectively_equivalent(ctx: &FieldCtx, a: &PointSet, b: &PointSet, b_group: &[GroupElt]) -> Result<bool> {
    if a.len() != b.len() {
        return Ok(false);
    }
    let reps = orbit_reps(ctx, b, b_group);
    let target = Target::new(ctx, b);
    for i in 0..2 * ctx.params().d {
        let src = image_under_phi(ctx, a, i);
        for &t in &reps {
            if !linear_maps(ctx, &src, &target, t, true)?.is_empty() {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Sorted counts of `t^{q-1}` with `t = b(u,v) b(v,w) b(w,u)` over the
/// triangles `{u, v, w}` through the first point of the set. For a set whose
/// stabilizer is transitive this does not depend on the base point and is
/// invariant under semi-similitudes.
pub fn triangle_profile(ctx: &FieldCtx, set: &PointSet) -> Vec<u64> {
    let vecs: Vec<Vector> = set.iter().map(|p| p.vector()).collect();
    let Some(&u) = vecs.first() else {
        return Vec::new();
    };
    let e = (ctx.q() - 1) as u128;
    let to_u: Vec<FieldElt> = vecs.iter().map(|&v| herm_pair(ctx, u, v)).collect();
    let mut counts: HashMap<FieldElt, u64> = HashMap::new();
    for i in 1..vecs.len() {
        for j in i + 1..vecs.len() {
            let back = ctx.frobenius(to_u[j], ctx.params().d as i64);
            let t = ctx.mul(ctx.mul(to_u[i], herm_pair(ctx, vecs[i], vecs[j])), back);
            *counts.entry(ctx.pow(t, e)).or_default() += 1;
        }
    }
    let mut out: Vec<u64> = counts.into_values().collect();
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

fn compose(a: &Perm, b: &Perm) -> Perm {
    // first a, then b
    a.iter().map(|&x| b[x as usize]).collect()
}

fn inverse(a: &Perm) -> Perm {
    let mut out = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        out[x as usize] = i as u32;
    }
    out
}

fn closure(gens: &[Perm], degree: usize, cap: usize) -> Result<HashSet<Perm>> {
    let id: Perm = (0..degree as u32).collect();
    let mut seen = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(e) = queue.pop_front() {
        for g in gens {
            let h = compose(&e, g);
            if seen.insert(h.clone()) {
                if seen.len() > cap {
                    return Err(Error::Budget(format!("permutation group exceeds {cap} elements")));
                }
                queue.push_back(h);
            }
        }
    }
    Ok(seen)
}

/// A permutation group stored with all of its elements.
#[derive(Clone, Debug)]
pub struct PermGroup {
    pub degree: usize,
    pub generators: Vec<Perm>,
    pub elements: HashSet<Perm>,
}

impl PermGroup {
    /// Generated group, keeping only generators that enlarge it.
    pub fn generate(candidates: &[Perm], degree: usize, cap: usize) -> Result<Self> {
        let mut generators: Vec<Perm> = Vec::new();
        let mut elements = closure(&[], degree, cap)?;
        for g in candidates {
            if !elements.contains(g) {
                generators.push(g.clone());
                elements = closure(&generators, degree, cap)?;
            }
        }
        Ok(PermGroup { degree, generators, elements })
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    /// The commutator subgroup.
    pub fn derived(&self, cap: usize) -> Result<PermGroup> {
        let mut cands = Vec::new();
        for a in &self.generators {
            for b in &self.generators {
                cands.push(compose(&compose(&compose(&inverse(a), &inverse(b)), a), b));
            }
        }
        let mut sub = PermGroup::generate(&cands, self.degree, cap)?;
        // normal closure
        loop {
            let mut extra = Vec::new();
            for n in &sub.generators {
                for g in &self.generators {
                    let c = compose(&compose(&inverse(g), n), g);
                    if !sub.elements.contains(&c) {
                        extra.push(c);
                    }
                }
            }
            if extra.is_empty() {
                return Ok(sub);
            }
            let mut all = sub.generators.clone();
            all.extend(extra);
            sub = PermGroup::generate(&all, self.degree, cap)?;
        }
    }

    pub fn is_soluble(&self, cap: usize) -> Result<bool> {
        let mut g = self.clone();
        loop {
            if g.order() == 1 {
                return Ok(true);
            }
            let d = g.derived(cap)?;
            if d.order() == g.order() {
                return Ok(false);
            }
            g = d;
        }
    }
}

/// Stabilizer of a point set in the full semi-similitude group, acting on the set.
#[derive(Clone, Debug)]
pub struct FullStabilizer {
    pub group: PermGroup,
    /// Order of the subgroup of linear similitudes.
    pub linear_order: u64,
}

/// `g_stab` must be the stabilizer of `set` in `G`.
pub fn full_stabilizer(ctx: &FieldCtx, set: &PointSet, g_stab: &[GroupElt], cap: usize) -> Result<FullStabilizer> {
    let as_perm = |g: GroupElt| -> Result<Perm> {
        set.iter()
            .map(|p| {
                set.index_of(&act(ctx, g, p))
                    .map(|i| i as u32)
                    .ok_or_else(|| Error::Precondition("element does not stabilize the set".into()))
            })
            .collect()
    };
    let reps = orbit_reps(ctx, set, g_stab);
    let target = Target::new(ctx, set);
    let d = ctx.params().d;
    let mut linear: Vec<Perm> = Vec::new();
    let mut semilinear: Vec<Perm> = Vec::new();
    for &g in g_stab {
        let perm = as_perm(g)?;
        if g.i % (2 * d) == 0 {
            linear.push(perm);
        } else {
            semilinear.push(perm);
        }
    }
    for i in 0..2 * d {
        let src = image_under_phi(ctx, set, i);
        for &t in &reps {
            let maps = linear_maps(ctx, &src, &target, t, false)?;
            // these are L ∘ φ^i as maps of `set`
            if i == 0 {
                linear.extend(maps);
            } else {
                semilinear.extend(maps);
            }
        }
    }
    let degree = set.len();
    let linear_group = PermGroup::generate(&linear, degree, cap)?;
    let mut all = linear_group.generators.clone();
    all.extend(semilinear);
    let group = PermGroup::generate(&all, degree, cap)?;
    Ok(FullStabilizer { linear_order: linear_group.order(), group })
}
