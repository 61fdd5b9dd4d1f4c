//! JSON file formats. Field elements are written as ascending coefficient
//! arrays; points as `[a_coeffs, x_coeffs]`. Every writer goes through
//! `serde_json::Value`, whose maps are ordered, so output keys are sorted.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::{PointSet, ProjPoint, Vector};
use crate::gf::{CtxOptions, FieldCtx, FieldElt, Params};
use crate::group::SubgroupSpec;
use crate::ovoid::{ProfileReport, TransitiveHint};
use crate::search::{FoundClass, SearchReport};

pub type PointJson = [Vec<u64>; 2];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HintJson {
    pub s: u64,
    pub k: u32,
    pub j: u64,
    pub base: PointJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OvoidFile {
    pub p: u64,
    pub d: u32,
    pub n: u32,
    pub modulus: Vec<u64>,
    pub points: Vec<PointJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hint: Option<HintJson>,
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_sorted_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

pub fn elt_json(ctx: &FieldCtx, a: FieldElt) -> Vec<u64> {
    ctx.coeffs(a)
}

pub fn point_json(ctx: &FieldCtx, p: &ProjPoint) -> PointJson {
    [ctx.coeffs(p.a()), ctx.coeffs(p.x())]
}

pub fn parse_point(ctx: &FieldCtx, pj: &PointJson) -> Result<ProjPoint> {
    let v = Vector::new(ctx.from_coeffs(&pj[0])?, ctx.from_coeffs(&pj[1])?);
    ProjPoint::new(ctx, v)
}

pub fn ovoid_to_file(ctx: &FieldCtx, set: &PointSet, hint: Option<&TransitiveHint>) -> OvoidFile {
    let json = ctx.to_json();
    OvoidFile {
        p: json.p,
        d: json.d,
        n: json.n,
        modulus: json.modulus,
        points: set.iter().map(|p| point_json(ctx, p)).collect(),
        hint: hint.map(|h| HintJson { s: h.spec.s, k: h.spec.k, j: h.spec.j, base: point_json(ctx, &h.base) }),
    }
}

/// A parsed ovoid file.
pub struct LoadedOvoid {
    pub ctx: FieldCtx,
    pub set: PointSet,
    pub hint: Option<TransitiveHint>,
}

pub fn ovoid_from_file(file: &OvoidFile) -> Result<LoadedOvoid> {
    ovoid_from_file_with(file, CtxOptions::default())
}

/// [`ovoid_from_file`] with context options; the file's modulus wins.
pub fn ovoid_from_file_with(file: &OvoidFile, options: CtxOptions) -> Result<LoadedOvoid> {
    let params = Params::new(file.p, file.d, file.n)?;
    let ctx = FieldCtx::with_options(params, CtxOptions { modulus: Some(file.modulus.clone()), ..options })?;
    let points = file.points.iter().map(|pj| parse_point(&ctx, pj)).collect::<Result<Vec<_>>>()?;
    let count = points.len();
    let set = PointSet::new(points);
    if set.len() != count {
        return Err(Error::Format(format!("{} repeated points", count - set.len())));
    }
    let hint = match &file.hint {
        Some(h) => Some(TransitiveHint {
            spec: SubgroupSpec::new(ctx.params(), h.s, h.k, h.j)?,
            base: parse_point(&ctx, &h.base)?,
        }),
        None => None,
    };
    Ok(LoadedOvoid { ctx, set, hint })
}

pub fn read_ovoid(text: &str) -> Result<LoadedOvoid> {
    ovoid_from_file(&serde_json::from_str(text)?)
}

pub fn profile_json(ctx: &FieldCtx, report: &ProfileReport) -> Value {
    let hist = |m: &std::collections::BTreeMap<usize, usize>| -> Value {
        m.iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>().into()
    };
    json!({
        "mode": report.mode,
        "members_checked": report.members_checked,
        "outside_checked": report.outside_checked,
        "member_counts": hist(&report.member_counts),
        "outside_counts": hist(&report.outside_counts),
        "violations": report.violations.iter().map(|v| json!({
            "point": point_json(ctx, &v.point),
            "count": v.count,
            "expected": v.expected,
        })).collect::<Vec<_>>(),
        "ok": report.ok(),
    })
}

fn spec_json(spec: &SubgroupSpec) -> Value {
    json!({ "s": spec.s, "k": spec.k, "j": spec.j, "m": spec.m })
}

fn class_json(ctx: &FieldCtx, class: &FoundClass) -> Value {
    json!({
        "ovoid": ovoid_to_file(ctx, &class.points, None),
        "certificate": class.certificate,
        "stabilizer_order_in_G": class.stabilizer_order_in_g,
        "full_stabilizer_order": class.full_stabilizer_order,
        "transitive": class.transitive,
        "witness": { "spec": spec_json(&class.witness.0), "seed": elt_json(ctx, class.witness.1) },
        "hit_count": class.hit_count,
        "excluded": class.excluded,
        "equivalent_to": class.equivalent_to,
    })
}

/// The search report. Timing is left out so that reruns are byte-identical.
pub fn search_report_json(ctx: &FieldCtx, report: &SearchReport) -> Value {
    json!({
        "params": report.params,
        "pruning": report.pruning,
        "include_s1": report.include_s1,
        "examined_specs": report.specs.iter().map(spec_json).collect::<Vec<_>>(),
        "seeds": { "total": report.seeds_total, "classes": report.seed_classes },
        "candidates": report.candidates,
        "full_orbits": report.full_orbits,
        "hits": report.hits,
        "g_classes": report.g_classes.iter().map(|c| class_json(ctx, c)).collect::<Vec<_>>(),
        "g_class_note": "g_classes are deduplicated up to the group G = <rho, phi> only",
        "classes": report.classes,
        "class_count": report.classes.len(),
    })
}

pub fn params_json(params: &Params) -> Value {
    json!({ "p": params.p, "d": params.d, "n": params.n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ovoid::{construct_singer_type, verify_ovoid};

    #[test]
    fn ovoid_round_trip() {
        let ctx = FieldCtx::new(Params::new(2, 2, 3).unwrap()).unwrap();
        let con = construct_singer_type(&ctx).unwrap();
        let text = to_sorted_json(&ovoid_to_file(&ctx, &con.set, con.hint.as_ref())).unwrap();
        let back = read_ovoid(&text).unwrap();
        assert_eq!(back.set, con.set);
        assert_eq!(back.hint, con.hint);
        assert_eq!(
            verify_ovoid(&back.ctx, &back.set, back.hint.as_ref()).unwrap(),
            verify_ovoid(&ctx, &con.set, con.hint.as_ref()).unwrap()
        );
        let keys: Vec<&str> = text.lines().filter(|l| l.starts_with("  \"")).map(|l| l.trim()).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn rejects_bad_points() {
        let ctx = FieldCtx::new(Params::new(2, 1, 3).unwrap()).unwrap();
        let mut file = ovoid_to_file(&ctx, &PointSet::new(vec![ProjPoint::affine(ctx.one())]), None);
        file.points.push(file.points[0].clone());
        assert!(ovoid_from_file(&file).is_err());
        file.points = vec![[vec![0; 6], vec![0; 6]]];
        assert!(ovoid_from_file(&file).is_err());
        file.points = vec![[vec![0, 0, 0, 0, 0, 0, 1], vec![0; 6]]];
        assert!(ovoid_from_file(&file).is_err());
    }
}
