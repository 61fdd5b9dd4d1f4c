//! Exhaustive search for ovoids that are orbits of subgroups
//! `H = ⟨ρ^s, ρ^j φ^k⟩ ≤ G` through a seed point `⟨(1, y)⟩`, with `y ∈ F_{q^n}^*`
//! or (for odd `q`) `y ∈ F_{q^n}^* ω₀`.
//!
//! Work is split into units of one subgroup and a contiguous range of seed
//! classes. Units are independent; results are merged in unit order, so the
//! report does not depend on the number of workers.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, gcd, two_part};
use crate::equiv::{full_stabilizer, projectively_equivalent, triangle_profile};
use crate::error::{Error, Result};
use crate::geometry::{perp_basis, PointSet, ProjPoint};
use crate::gf::{CtxOptions, FieldCtx, FieldElt, Params};
use crate::group::{act, orbit, set_stabilizer_in_g, Group, GroupElt, SubgroupSpec, DEFAULT_GROUP_CAP};
use crate::ovoid::{verify_ovoid, Certificate, TransitiveHint};

/// Which pruning lemmas are applied when enumerating subgroups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pruning {
    /// `s` odd for even `q`; `4 ∤ s` for odd `q`.
    pub parity: bool,
    /// Lower bounds on `s` in terms of `q`, `n` and the 2-part of `m`.
    pub s_lower_bounds: bool,
    /// Take `s` among the divisors of `gcd(2nd, q^n+1)` rather than filtering
    /// all divisors of `q^n+1`.
    pub gcd_bound: bool,
}

impl Pruning {
    pub fn all() -> Self {
        Pruning { parity: true, s_lower_bounds: true, gcd_bound: true }
    }

    pub fn none() -> Self {
        Pruning { parity: false, s_lower_bounds: false, gcd_bound: false }
    }

    /// Turn one lemma off by name (`parity`, `s-bounds`, `gcd`).
    pub fn disable(&mut self, name: &str) -> Result<()> {
        match name {
            "parity" => self.parity = false,
            "s-bounds" | "s_lower_bounds" | "s-lower-bounds" => self.s_lower_bounds = false,
            "gcd" | "gcd-bound" | "gcd_bound" => self.gcd_bound = false,
            "all" => *self = Pruning::none(),
            other => return Err(Error::InvalidParams(format!("unknown pruning lemma {other:?}"))),
        }
        Ok(())
    }
}

impl Default for Pruning {
    fn default() -> Self {
        Pruning::all()
    }
}

fn passes_parity(params: &Params, s: u64) -> bool {
    if params.q_is_even() {
        s % 2 == 1
    } else {
        s % 4 != 0
    }
}

/// The lower bounds on `s > 1` for a transitive ovoid whose stabilizer has
/// `|H| = m(q^n+1)`.
pub fn passes_s_bounds(params: &Params, s: u64, m: u32) -> bool {
    s_bounds_hold(params.p, params.d, params.n, s, m)
}

fn s_bounds_hold(p: u64, d: u32, n: u32, s: u64, m: u32) -> bool {
    if s == 1 {
        return true;
    }
    let Some(q) = p.checked_pow(d) else {
        // q exceeds every admissible s
        return false;
    };
    if p == 2 {
        let nd = (n * d) as u64;
        return (1u64 << d.min(63)) < nd || s > q;
    }
    if m % 2 == 1 || s % 2 == 1 {
        return if n == 3 { 2 * s >= q + 1 } else { s >= q };
    }
    let e = two_part(m as u64) as u32;
    if d % e != 0 {
        return true;
    }
    let Some(q1) = p.checked_pow(d / e) else {
        return false;
    };
    if n == 3 {
        s > q1
    } else {
        s >= 2 * q1
    }
}

/// A parameter case `(n, p^d)` in which some `s > 1` passes every constraint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurvivingCase {
    pub n: u32,
    pub p: u64,
    pub d: u32,
    pub s: u64,
    pub m: Vec<u32>,
}

/// Cases `(n, p^d)` with `p < pmax`, `5 ≤ n ≤ n_p` odd and `d ≤ dmax`
/// where some `(m, k, s)` with `mks = 2nd`, `s | p^{nd}+1`, `s > 1` passes
/// the parity rule and the lower bounds on `s`.
pub fn surviving_cases(pmax: u64, dmax: u32) -> Result<Vec<SurvivingCase>> {
    let mut out = Vec::new();
    for report in crate::bounds::np_table(pmax)? {
        let p = report.p;
        for n in (5..=report.n_p as u32).step_by(2) {
            for d in 1..=dmax {
                let degree = 2 * (n as u64) * (d as u64);
                let rest = (crate::arith::pow_mod(p, n as u64 * d as u64, degree) + 1) % degree;
                let mut by_s: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
                for s in divisors(gcd(degree, rest)).into_iter().filter(|&s| s > 1) {
                    let parity_ok = if p == 2 { s % 2 == 1 } else { s % 4 != 0 };
                    if !parity_ok {
                        continue;
                    }
                    for m in divisors(degree / s) {
                        if s_bounds_hold(p, d, n, s, m as u32) {
                            by_s.entry(s).or_default().push(m as u32);
                        }
                    }
                }
                out.extend(by_s.into_iter().map(|(s, m)| SurvivingCase { n, p, d, s, m }));
            }
        }
    }
    Ok(out)
}

/// All admissible `(s, k, j)` for `params`, sorted by `(s, k, j)`.
pub fn enumerate_params(params: Params, pruning: Pruning, include_s1: bool) -> Vec<SubgroupSpec> {
    let degree = params.degree() as u64;
    let singer = params.singer_order();
    let s_values: Vec<u64> = if pruning.gcd_bound {
        divisors(gcd(degree, singer))
    } else {
        divisors(singer).into_iter().filter(|s| degree % s == 0).collect()
    };
    let mut out = Vec::new();
    for s in s_values {
        if s == 1 && !include_s1 {
            continue;
        }
        if pruning.parity && !passes_parity(&params, s) {
            continue;
        }
        for k in divisors(degree) {
            if (degree / k) % s != 0 {
                continue;
            }
            let m = (degree / (k * s)) as u32;
            if pruning.s_lower_bounds && !passes_s_bounds(&params, s, m) {
                continue;
            }
            for j in 0..s {
                if let Ok(spec) = SubgroupSpec::new(params, s, k as u32, j) {
                    out.push(spec);
                }
            }
        }
    }
    out.sort_unstable_by_key(|sp| (sp.s, sp.k, sp.j));
    out
}

/// A seed class representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Seed {
    /// The seed point is `⟨(1, y)⟩` with `y = x ω₀^eps`.
    pub y: FieldElt,
    pub x: FieldElt,
    pub eps: u8,
    /// Number of prescribed-form seeds equivalent to this one.
    pub class_size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedEnumeration {
    pub seeds: Vec<Seed>,
    /// Singular prescribed-form seeds before reduction.
    pub total: usize,
}

/// Singular seeds `⟨(1, x ω₀^eps)⟩`, one per class under `y ∼ ω^a y^{p^b}`,
/// each represented by its least-encoded `y`.
///
/// The prescribed-form members of the class of `y = x ω₀^eps` are
/// `±x^{p^b} c_b ω₀^eps`, where `ω₀^{p^b} = c_b ω^{i_b} ω₀`; the sign only
/// occurs for odd `q`, where `-1 ∈ ⟨ω⟩`.
pub fn enumerate_seeds(ctx: &FieldCtx) -> Result<SeedEnumeration> {
    let params = ctx.params();
    let nd = params.n * params.d;
    let degree = params.degree() as i64;
    let odd = !params.q_is_even();
    let omega0 = ctx.omega0();
    let twists: Vec<FieldElt> = if odd {
        (0..degree)
            .map(|b| ctx.coset_decompose(ctx.frobenius(omega0, b)).map(|dec| dec.f))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let xs: Vec<FieldElt> = ctx.subfield_elements(nd)?.split_off(1);
    let eps_values: &[u8] = if odd { &[0, 1] } else { &[0] };
    let singular = |y: FieldElt| {
        let norm = ctx.mul(y, ctx.frobenius(y, nd as i64));
        ctx.trace_to_fq2(norm) == FieldElt::ONE
    };
    let per_x: Vec<(usize, Vec<Seed>)> = xs
        .par_iter()
        .map(|&x| {
            let mut count = 0;
            let mut reps = Vec::new();
            for &eps in eps_values {
                let w0 = if eps == 1 { omega0 } else { FieldElt::ONE };
                let y = ctx.mul(x, w0);
                if !singular(y) {
                    continue;
                }
                count += 1;
                let mut class = BTreeSet::new();
                for b in 0..degree {
                    let mut f = ctx.frobenius(x, b);
                    if eps == 1 {
                        f = ctx.mul(f, twists[b as usize]);
                    }
                    class.insert(ctx.mul(f, w0));
                    if odd {
                        class.insert(ctx.mul(ctx.neg(f), w0));
                    }
                }
                if class.first() == Some(&y) {
                    reps.push(Seed { y, x, eps, class_size: class.len() });
                }
            }
            (count, reps)
        })
        .collect();
    let total = per_x.iter().map(|(c, _)| c).sum();
    let mut seeds: Vec<Seed> = per_x.into_iter().flat_map(|(_, r)| r).collect();
    seeds.sort_unstable_by_key(|s| s.y);
    let covered: usize = seeds.iter().map(|s| s.class_size).sum();
    if covered != total {
        return Err(Error::Consistency(format!("seed classes cover {covered} of {total} seeds")));
    }
    Ok(SeedEnumeration { seeds, total })
}

/// Per-subgroup data reused across seeds.
struct SpecPlan {
    spec: SubgroupSpec,
    /// `e_b`: `(ρ^j φ^k)^b = ρ^{e_b} φ^{kb}`.
    rho_exps: Vec<u64>,
}

impl SpecPlan {
    fn new(group: &Group, spec: SubgroupSpec) -> Self {
        let blocks = (group.degree() / spec.k) as u64;
        let rho_exps = (0..blocks)
            .map(|b| group.power_closed_form(GroupElt::new(spec.j, spec.k), b).j)
            .collect();
        SpecPlan { spec, rho_exps }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Outcome {
    SmallOrbit,
    NotOvoid,
    Ovoid,
}

/// Decide whether the `H`-orbit of `⟨(1, y)⟩` is an ovoid.
///
/// The orbit is the union of the cosets `ω^{e_b} y^{p^{kb}} ⟨ω^s⟩`; it has
/// `q^n + 1` points exactly when `m` of the `2nd/k` cosets coincide with the
/// first. In that case the cosets for `b < s` are distinct and only the
/// pairs through `⟨(1, y)⟩` need checking.
fn test_candidate(ctx: &FieldCtx, plan: &SpecPlan, y: FieldElt) -> Outcome {
    let spec = &plan.spec;
    let singer = ctx.singer_order();
    let y_inv = ctx.inv(y).expect("seed is nonzero");
    let frob_step = spec.k as i64;
    let mut stab = 0u32;
    for (b, &e) in plan.rho_exps.iter().enumerate() {
        let yb = ctx.frobenius(y, frob_step * b as i64);
        if let Some(l) = ctx.omega_log(ctx.mul(yb, y_inv)) {
            // y_b / y = ω^l, and the coset matches when l + e_b ≡ 0 (mod s)
            if (l + e) % spec.s == 0 {
                stab += 1;
            }
        }
    }
    if stab != spec.m {
        return Outcome::SmallOrbit;
    }
    let nd = (ctx.params().n * ctx.params().d) as i64;
    let y_bar = ctx.frobenius(y, nd);
    let step = ctx.omega_pow(spec.s);
    for b in 0..spec.s as usize {
        let yb = ctx.frobenius(y, frob_step * b as i64);
        let mut w = ctx.mul(ctx.mul(ctx.omega_pow(plan.rho_exps[b]), yb), y_bar);
        for a in 0..singer / spec.s {
            if !(b == 0 && a == 0) && ctx.trace_to_fq2(w) == FieldElt::ONE {
                return Outcome::NotOvoid;
            }
            w = ctx.mul(w, step);
        }
    }
    Outcome::Ovoid
}

fn orbit_points(ctx: &FieldCtx, plan: &SpecPlan, y: FieldElt) -> PointSet {
    let spec = &plan.spec;
    let step = ctx.omega_pow(spec.s);
    let mut pts = Vec::with_capacity(ctx.singer_order() as usize);
    for b in 0..spec.s as usize {
        let mut z = ctx.mul(ctx.omega_pow(plan.rho_exps[b]), ctx.frobenius(y, spec.k as i64 * b as i64));
        for _ in 0..ctx.singer_order() / spec.s {
            pts.push(ProjPoint::affine(z));
            z = ctx.mul(z, step);
        }
    }
    PointSet::new(pts)
}

/// A `(subgroup, seed)` pair whose orbit is an ovoid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hit {
    pub unit: usize,
    pub spec: SubgroupSpec,
    /// Encoding of `y`.
    pub seed: u64,
}

/// Resumable progress of a search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub params: Params,
    pub pruning: Pruning,
    pub include_s1: bool,
    pub chunk_size: usize,
    pub units_total: usize,
    pub completed: Vec<usize>,
    pub hits: Vec<Hit>,
    /// Totals over the completed units.
    #[serde(default)]
    pub candidates: u64,
    #[serde(default)]
    pub full_orbits: u64,
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub params: Params,
    pub pruning: Pruning,
    pub include_s1: bool,
    pub workers: usize,
    /// Seed classes per work unit.
    pub chunk_size: usize,
    pub time_budget: Option<Duration>,
    pub resume: Option<Checkpoint>,
    pub ctx_options: CtxOptions,
    /// Cap on `|G|` for deduplication and stabilizers.
    pub group_cap: u64,
    /// Cap on the order of full stabilizers, which are enumerated.
    pub stabilizer_cap: usize,
}

impl SearchOptions {
    pub fn new(params: Params) -> Self {
        SearchOptions {
            params,
            pruning: Pruning::all(),
            include_s1: false,
            workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            chunk_size: 256,
            time_budget: None,
            resume: None,
            ctx_options: CtxOptions::default(),
            group_cap: DEFAULT_GROUP_CAP,
            stabilizer_cap: 1 << 21,
        }
    }
}

/// Why a `G`-class does not count as a transitive ovoid with soluble stabilizer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exclusion {
    /// The points lie in a hyperplane.
    HyperplaneSection,
    /// The stabilizer in the full semi-similitude group is insoluble.
    InsolubleStabilizer,
}

/// One `G`-equivalence class of ovoids found by the search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoundClass {
    /// Least image of the class under `G`.
    pub points: PointSet,
    pub certificate: Certificate,
    pub stabilizer_order_in_g: u64,
    /// The stabilizer in `G` is transitive on the points.
    pub transitive: bool,
    /// First `(subgroup, seed)` pair that produced a member of the class.
    pub witness: (SubgroupSpec, FieldElt),
    pub hit_count: usize,
    /// Order of the stabilizer among all semi-similitudes.
    pub full_stabilizer_order: Option<u64>,
    pub excluded: Option<Exclusion>,
    /// Earlier class (by index) that is projectively equivalent to this one.
    pub equivalent_to: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    pub params: Params,
    pub pruning: Pruning,
    pub include_s1: bool,
    pub specs: Vec<SubgroupSpec>,
    pub seeds_total: usize,
    pub seed_classes: usize,
    pub candidates: u64,
    pub full_orbits: u64,
    pub hits: usize,
    /// All classes up to `G`, sorted by their canonical images.
    pub g_classes: Vec<FoundClass>,
    /// Indices into `g_classes` of one representative per projective
    /// equivalence class, leaving out excluded classes.
    pub classes: Vec<usize>,
    pub elapsed: Duration,
}

impl SearchReport {
    pub fn representatives(&self) -> impl Iterator<Item = &FoundClass> {
        self.classes.iter().map(|&i| &self.g_classes[i])
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub report: SearchReport,
    pub complete: bool,
    pub checkpoint: Checkpoint,
}

struct UnitResult {
    candidates: u64,
    full_orbits: u64,
    hits: Vec<Hit>,
}

pub fn run_search(options: &SearchOptions) -> Result<SearchOutcome> {
    let ctx = FieldCtx::with_options(options.params, options.ctx_options.clone())?;
    run_search_in(&ctx, options)
}

pub fn run_search_in(ctx: &FieldCtx, options: &SearchOptions) -> Result<SearchOutcome> {
    let start = Instant::now();
    let params = ctx.params();
    if params != options.params {
        return Err(Error::InvalidParams("context and options disagree on parameters".into()));
    }
    let group = Group::of(ctx);
    let specs = enumerate_params(params, options.pruning, options.include_s1);
    let seeds = enumerate_seeds(ctx)?;
    let chunk = options.chunk_size.max(1);
    let chunks = seeds.seeds.len().div_ceil(chunk).max(1);
    let units_total = specs.len() * chunks;

    let mut completed: BTreeSet<usize> = BTreeSet::new();
    let mut hits: Vec<Hit> = Vec::new();
    let mut candidates = 0;
    let mut full_orbits = 0;
    if let Some(cp) = &options.resume {
        if cp.params != params
            || cp.pruning != options.pruning
            || cp.include_s1 != options.include_s1
            || cp.chunk_size != chunk
            || cp.units_total != units_total
        {
            return Err(Error::Format("checkpoint does not match the search options".into()));
        }
        completed.extend(cp.completed.iter().copied());
        hits.extend(cp.hits.iter().copied());
        candidates = cp.candidates;
        full_orbits = cp.full_orbits;
    }

    let plans: Vec<SpecPlan> = specs.iter().map(|&sp| SpecPlan::new(&group, sp)).collect();
    let deadline = options.time_budget.map(|b| start + b);
    let pending: Vec<usize> = (0..units_total).filter(|u| !completed.contains(u)).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParams(format!("worker pool: {e}")))?;
    let results: Vec<(usize, Option<UnitResult>)> = pool.install(|| {
        pending
            .par_iter()
            .map(|&unit| {
                if deadline.is_some_and(|d| Instant::now() >= d) {
                    return (unit, None);
                }
                let plan = &plans[unit / chunks];
                let lo = (unit % chunks) * chunk;
                let hi = (lo + chunk).min(seeds.seeds.len());
                let mut res = UnitResult { candidates: 0, full_orbits: 0, hits: Vec::new() };
                for seed in &seeds.seeds[lo..hi] {
                    res.candidates += 1;
                    match test_candidate(ctx, plan, seed.y) {
                        Outcome::SmallOrbit => {}
                        Outcome::NotOvoid => res.full_orbits += 1,
                        Outcome::Ovoid => {
                            res.full_orbits += 1;
                            res.hits.push(Hit { unit, spec: plan.spec, seed: seed.y.encoding() });
                        }
                    }
                }
                (unit, Some(res))
            })
            .collect()
    });

    let mut complete = true;
    for (unit, res) in results {
        match res {
            Some(r) => {
                completed.insert(unit);
                candidates += r.candidates;
                full_orbits += r.full_orbits;
                hits.extend(r.hits);
            }
            None => complete = false,
        }
    }
    hits.sort_unstable_by_key(|h| (h.unit, h.seed));
    hits.dedup();

    let checkpoint = Checkpoint {
        params,
        pruning: options.pruning,
        include_s1: options.include_s1,
        chunk_size: chunk,
        units_total,
        completed: completed.iter().copied().collect(),
        hits: hits.clone(),
        candidates,
        full_orbits,
    };
    let g_classes = if complete { classify_hits(ctx, &hits, options.group_cap, options.stabilizer_cap)? } else { Vec::new() };
    let classes = (0..g_classes.len())
        .filter(|&i| g_classes[i].excluded.is_none() && g_classes[i].equivalent_to.is_none())
        .collect();
    let report = SearchReport {
        params,
        pruning: options.pruning,
        include_s1: options.include_s1,
        specs,
        seeds_total: seeds.total,
        seed_classes: seeds.seeds.len(),
        candidates,
        full_orbits,
        hits: hits.len(),
        g_classes,
        classes,
        elapsed: start.elapsed(),
    };
    Ok(SearchOutcome { report, complete, checkpoint })
}

/// Rebuild, certify and deduplicate the ovoids behind `hits`.
fn classify_hits(ctx: &FieldCtx, hits: &[Hit], cap: u64, stab_cap: usize) -> Result<Vec<FoundClass>> {
    let group = Group::of(ctx);
    let mut distinct: BTreeMap<PointSet, (SubgroupSpec, FieldElt, usize)> = BTreeMap::new();
    for h in hits {
        let y = ctx.elt(h.seed)?;
        let set = orbit_points(ctx, &SpecPlan::new(&group, h.spec), y);
        distinct.entry(set).and_modify(|e| e.2 += 1).or_insert((h.spec, y, 1));
    }
    let mut classes: BTreeMap<PointSet, FoundClass> = BTreeMap::new();
    for (set, (spec, y, count)) in distinct {
        let hint = TransitiveHint { spec, base: ProjPoint::affine(y) };
        let certificate = verify_ovoid(ctx, &set, Some(&hint))?;
        if !certificate.valid {
            return Err(Error::Consistency(format!("search hit failed verification: {certificate:?}")));
        }
        let canon = canonical_image(ctx, &set, cap)?;
        if let Some(class) = classes.get_mut(&canon) {
            class.hit_count += count;
            continue;
        }
        let stab = set_stabilizer_in_g(ctx, &canon, cap)?;
        let first = canon.points()[0];
        let transitive = orbit(ctx, &stab.elements, &first) == canon;
        let certificate = Certificate { stabilizer_order_in_g: Some(stab.order), ..certificate };
        classes.insert(
            canon.clone(),
            FoundClass {
                points: canon,
                certificate,
                stabilizer_order_in_g: stab.order,
                transitive,
                witness: (spec, y),
                hit_count: count,
                full_stabilizer_order: None,
                excluded: None,
                equivalent_to: None,
            },
        );
    }
    let mut classes: Vec<FoundClass> = classes.into_values().collect();
    let mut g_stabs = Vec::with_capacity(classes.len());
    for class in classes.iter_mut() {
        let vecs: Vec<_> = class.points.iter().map(|p| p.vector()).collect();
        let g_stab = set_stabilizer_in_g(ctx, &class.points, cap)?;
        if !perp_basis(ctx, &vecs).is_empty() {
            class.excluded = Some(Exclusion::HyperplaneSection);
        } else {
            let full = full_stabilizer(ctx, &class.points, &g_stab.elements, stab_cap)?;
            class.full_stabilizer_order = Some(full.group.order());
            if !full.group.is_soluble(stab_cap)? {
                class.excluded = Some(Exclusion::InsolubleStabilizer);
            }
        }
        g_stabs.push(g_stab);
    }
    let profiles: Vec<Vec<u64>> = classes.iter().map(|c| triangle_profile(ctx, &c.points)).collect();
    for b in 0..classes.len() {
        if classes[b].excluded.is_some() {
            continue;
        }
        for a in 0..b {
            let candidate = classes[a].excluded.is_none()
                && classes[a].equivalent_to.is_none()
                && classes[a].full_stabilizer_order == classes[b].full_stabilizer_order
                && profiles[a] == profiles[b];
            if candidate && projectively_equivalent(ctx, &classes[b].points, &classes[a].points, &g_stabs[a].elements)? {
                classes[b].equivalent_to = Some(a);
                break;
            }
        }
    }
    Ok(classes)
}

/// The least of the sorted images `g(S)` over `g ∈ G`.
pub fn canonical_image(ctx: &FieldCtx, set: &PointSet, cap: u64) -> Result<PointSet> {
    let group = Group::of(ctx);
    if group.order() > cap {
        return Err(Error::Budget(format!("|G| = {} exceeds the cap {cap}", group.order())));
    }
    let elements: Vec<GroupElt> = group.elements().collect();
    // Only images whose least point is smallest can win.
    let least: Vec<(ProjPoint, GroupElt)> = elements
        .par_iter()
        .map(|&g| (set.iter().map(|p| act(ctx, g, p)).min().expect("nonempty set"), g))
        .collect();
    let best_first = least.iter().map(|(p, _)| *p).min().expect("G is nonempty");
    let best = least
        .par_iter()
        .filter(|(p, _)| *p == best_first)
        .map(|&(_, g)| set.iter().map(|p| act(ctx, g, p)).collect::<PointSet>())
        .min()
        .expect("some image attains the minimum");
    Ok(best)
}

/// Keep one representative (the canonical image) per `G`-orbit.
pub fn dedupe_by_g(ctx: &FieldCtx, sets: &[PointSet], cap: u64) -> Result<Vec<PointSet>> {
    let mut out = BTreeSet::new();
    for s in sets {
        out.insert(canonical_image(ctx, s, cap)?);
    }
    Ok(out.into_iter().collect())
}
