//! Browser bindings for a few rank-two operations. Every call returns a JSON string.

use integrable::catalog::{apply_transformation, instantiate_b2, list_families, parse_record, Family, FamilyInstance};
use integrable::funceq::{b2_residual, classify_b2, B2Tuple};
use integrable::operator::build_pq_b2;
use integrable::rational::parse_rational_list;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn instance(family: &str, params: &str) -> Result<FamilyInstance, String> {
    let f: Family = family.parse().map_err(|e: integrable::Error| e.to_string())?;
    let p = parse_rational_list(params).map_err(|e| e.to_string())?;
    if p.len() < f.param_count() {
        return Err(format!("{f} takes {} parameters", f.param_count()));
    }
    Ok(FamilyInstance::truncated(f, 2, &p, 1))
}

fn tuple(family: &str, params: &str, transform: &str, ceiling: i64) -> Result<B2Tuple, String> {
    let pot = instantiate_b2(&instance(family, params)?).map_err(|e| e.to_string())?;
    let t = B2Tuple::from_potential(&pot, ceiling).map_err(|e| e.to_string())?;
    let rec = parse_record(transform).map_err(|e| e.to_string())?;
    apply_transformation(&rec, &t).map_err(|e| e.to_string())
}

/// The rank-two tags as a JSON array of strings.
#[wasm_bindgen]
pub fn families() -> String {
    json!(list_families(2).into_iter().filter(|f| f.param_count() > 0).map(Family::name).collect::<Vec<_>>()).to_string()
}

/// Rank-two functional equation of a transformed family, `order` in λ-units.
#[wasm_bindgen]
pub fn verify(family: &str, params: &str, transform: &str, order: i64) -> Result<String, String> {
    let c = 2 * order.clamp(1, 64);
    let t = tuple(family, params, transform, c)?;
    let w = t.components().iter().filter(|s| !s.is_zero()).map(|s| s.ceiling()).min().unwrap_or(c).min(c);
    let r = b2_residual(&t, w).map_err(|e| e.to_string())?;
    Ok(json!({ "ok": r.ok, "window": w, "witnesses": r.witnesses.len(), "first": r.witnesses.first() }).to_string())
}

/// `[P, Q] = 0` and `Q` symmetric for an untransformed family.
#[wasm_bindgen]
pub fn commutator(family: &str, params: &str, order: i64) -> Result<String, String> {
    let data = instantiate_b2(&instance(family, params)?)
        .and_then(|p| p.data(2 * order.clamp(1, 32)))
        .map_err(|e| e.to_string())?;
    let (p, q) = build_pq_b2(&data).map_err(|e| e.to_string())?;
    let commutes = p.commutator(&q).map_err(|e| e.to_string())?.is_zero();
    Ok(json!({ "commutes": commutes, "symmetric": q.adjoint().agrees_with(&q), "order_q": q.order() }).to_string())
}

/// Recognizes a transformed family and reports the record that reproduces it.
#[wasm_bindgen]
pub fn classify(family: &str, params: &str, transform: &str) -> Result<String, String> {
    let t = tuple(family, params, transform, 96)?;
    let found = classify_b2(&t, 32).map_err(|e| e.to_string())?;
    serde_json::to_string(&found).map_err(|e| e.to_string())
}
