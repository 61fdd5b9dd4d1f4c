use std::collections::BTreeSet;
use std::time::Duration;

use hovoid::geometry::{singular_points, PointSet};
use hovoid::gf::{FieldCtx, Params};
use hovoid::group::{act_set, orbit, set_stabilizer_in_g, Group, DEFAULT_GROUP_CAP};
use hovoid::io::{search_report_json, to_sorted_json};
use hovoid::ovoid::{construct_classical, verify_ovoid};
use hovoid::search::{canonical_image, run_search_in, Pruning, SearchOptions, SearchOutcome};

fn ctx(p: u64, d: u32, n: u32) -> FieldCtx {
    FieldCtx::new(Params::new(p, d, n).unwrap()).unwrap()
}

fn search(c: &FieldCtx, pruning: Pruning, include_s1: bool, workers: usize) -> SearchOutcome {
    let mut opts = SearchOptions::new(c.params());
    opts.pruning = pruning;
    opts.include_s1 = include_s1;
    opts.workers = workers;
    let out = run_search_in(c, &opts).unwrap();
    assert!(out.complete);
    out
}

/// G-canonical forms of every set found, before any exclusion or merging.
fn found_set(c: &FieldCtx, out: &SearchOutcome) -> BTreeSet<PointSet> {
    out.report
        .g_classes
        .iter()
        .map(|cl| canonical_image(c, &cl.points, DEFAULT_GROUP_CAP).unwrap())
        .collect()
}

fn json(c: &FieldCtx, out: &SearchOutcome) -> String {
    to_sorted_json(&search_report_json(c, &out.report)).unwrap()
}

#[test]
fn pruning_only_removes_dead_branches() {
    for (p, d, n) in [(2, 1, 3), (3, 1, 3), (2, 3, 3)] {
        let c = ctx(p, d, n);
        let pruned = search(&c, Pruning::all(), true, 2);
        let full = search(&c, Pruning::none(), true, 2);
        assert!(full.report.specs.len() >= pruned.report.specs.len());
        assert_eq!(found_set(&c, &pruned), found_set(&c, &full), "({p},{d},{n})");
        if (p, d, n) == (2, 3, 3) {
            continue;
        }
        for name in ["parity", "s-bounds", "gcd"] {
            let mut one_off = Pruning::all();
            one_off.disable(name).unwrap();
            let out = search(&c, one_off, true, 2);
            assert_eq!(found_set(&c, &out), found_set(&c, &full), "({p},{d},{n}) without {name}");
        }
    }
}

#[test]
fn found_ovoids_are_transitive_under_their_stabilizer() {
    for (p, d, n) in [(2, 1, 3), (2, 2, 3)] {
        let c = ctx(p, d, n);
        let out = search(&c, Pruning::all(), true, 2);
        assert!(!out.report.g_classes.is_empty());
        for cl in &out.report.g_classes {
            assert!(cl.certificate.valid);
            let stab = set_stabilizer_in_g(&c, &cl.points, DEFAULT_GROUP_CAP).unwrap();
            assert_eq!(stab.order, cl.stabilizer_order_in_g);
            let first = cl.points.points()[0];
            assert_eq!(orbit(&c, &stab.elements, &first), cl.points);
            assert!(cl.transitive);
        }
    }
}

/// Every transitive ovoid at (2,1,3), from all subgroups of G (each is
/// generated by two elements, G being metacyclic) and all singular points.
fn brute_force_transitive_ovoids(c: &FieldCtx) -> BTreeSet<PointSet> {
    let g = Group::of(c);
    let elements: Vec<_> = g.elements().collect();
    let mut subgroups: BTreeSet<Vec<_>> = BTreeSet::new();
    for &x in &elements {
        for &y in &elements {
            subgroups.insert(g.closure(&[x, y]));
        }
    }
    let points = singular_points(c);
    let mut out = BTreeSet::new();
    for h in &subgroups {
        for pt in &points {
            let orb = orbit(c, h, pt);
            if orb.len() as u64 == c.singer_order() && verify_ovoid(c, &orb, None).unwrap().valid {
                out.insert(orb);
            }
        }
    }
    out
}

#[test]
fn search_is_complete_against_brute_force() {
    let c = ctx(2, 1, 3);
    let g = Group::of(&c);
    let brute = brute_force_transitive_ovoids(&c);
    assert!(!brute.is_empty());
    // closed under G
    for s in &brute {
        for h in g.elements() {
            assert!(brute.contains(&act_set(&c, h, s)));
        }
    }
    let brute_canon: BTreeSet<PointSet> =
        brute.iter().map(|s| canonical_image(&c, s, DEFAULT_GROUP_CAP).unwrap()).collect();
    let out = search(&c, Pruning::all(), true, 1);
    let found = found_set(&c, &out);
    // Seeds are affine points ⟨(1,y)⟩. The one transitive ovoid without such
    // a point is the section ⟨(1,0)⟩^⊥, which the search never reports.
    let at_infinity = construct_classical(&c).unwrap().set;
    assert!(at_infinity.iter().all(|p| p.a().is_zero()));
    let missing: Vec<&PointSet> = brute_canon.difference(&found).collect();
    assert_eq!(missing, vec![&canonical_image(&c, &at_infinity, DEFAULT_GROUP_CAP).unwrap()]);
    assert!(found.is_subset(&brute_canon));
    for s in &brute {
        assert_eq!(s.iter().any(|p| !p.a().is_zero()), s != &at_infinity);
    }
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    for (p, d, n) in [(2, 1, 3), (3, 1, 3), (2, 2, 3)] {
        let c = ctx(p, d, n);
        let one = json(&c, &search(&c, Pruning::all(), true, 1));
        let four = json(&c, &search(&c, Pruning::all(), true, 4));
        assert_eq!(one, four, "({p},{d},{n})");
        let again = json(&c, &search(&c, Pruning::all(), true, 4));
        assert_eq!(one, again);
    }
}

#[test]
fn interrupted_search_resumes_to_the_same_report() {
    let c = ctx(3, 1, 3);
    let fresh = json(&c, &search(&c, Pruning::all(), false, 1));

    let mut opts = SearchOptions::new(c.params());
    opts.workers = 1;
    opts.chunk_size = 1;
    opts.time_budget = Some(Duration::ZERO);
    let stalled = run_search_in(&c, &opts).unwrap();
    assert!(!stalled.complete);
    assert!(stalled.report.g_classes.is_empty());

    let mut budget = Duration::from_millis(1);
    let mut checkpoint = stalled.checkpoint;
    let mut rounds = 0;
    let last = loop {
        // round-trip through JSON as the command line does
        let text = to_sorted_json(&checkpoint).unwrap();
        opts.resume = Some(serde_json::from_str(&text).unwrap());
        opts.time_budget = Some(budget);
        let out = run_search_in(&c, &opts).unwrap();
        rounds += 1;
        if out.complete {
            break out;
        }
        assert!(out.checkpoint.completed.len() >= checkpoint.completed.len());
        checkpoint = out.checkpoint;
        budget *= 2;
    };
    assert!(rounds >= 1);
    // chunking changes the units, not the report
    assert_eq!(json(&c, &last), fresh);
}

#[test]
fn mismatched_checkpoint_is_rejected() {
    let c = ctx(2, 1, 3);
    let mut opts = SearchOptions::new(c.params());
    opts.time_budget = Some(Duration::ZERO);
    let cp = run_search_in(&c, &opts).unwrap().checkpoint;
    let mut other = SearchOptions::new(c.params());
    other.include_s1 = true;
    other.resume = Some(cp);
    assert!(run_search_in(&c, &other).is_err());
}

#[test]
fn small_cases_without_survivors() {
    for (p, d, n) in [(3, 1, 3), (5, 1, 3), (2, 2, 5)] {
        let c = ctx(p, d, n);
        let out = search(&c, Pruning::all(), false, 2);
        assert!(out.report.classes.is_empty(), "({p},{d},{n})");
        for cl in &out.report.g_classes {
            assert!(cl.excluded.is_some() || cl.equivalent_to.is_some());
        }
    }
}
