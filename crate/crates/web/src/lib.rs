//! wasm-bindgen entry points for the static demo page in `www/`.
//!
//! Each export returns a JSON string. The plain functions are what the native
//! tests exercise.

use serde_json::json;
use wasm_bindgen::prelude::*;

use vsc_core::cy;
use vsc_core::elliptic::{elliptic_breakdown, elliptic_vsc, variable_count};
use vsc_core::graphs::graphs_of_degree;
use vsc_core::params::{HypersurfaceParams, InsertionVector};
use vsc_core::rational::fmt_q;

/// Largest degree the page accepts; residues grow quickly beyond it.
pub const MAX_DEGREE: u32 = 6;

fn check_degree(d: u32) -> Result<(), String> {
    if d == 0 || d > MAX_DEGREE {
        return Err(format!("degree must be between 1 and {MAX_DEGREE}"));
    }
    Ok(())
}

pub fn catalog_json(d: u32) -> Result<String, String> {
    check_degree(d)?;
    let graphs: Vec<_> = graphs_of_degree(d)
        .iter()
        .map(|g| json!({"graph": g.to_string(), "type": g.type_label(), "variables": variable_count(g)}))
        .collect();
    Ok(json!({"d": d, "count": graphs.len(), "graphs": graphs}).to_string())
}

pub fn elliptic_json(n: u32, k: u32, d: u32, ins: &str) -> Result<String, String> {
    check_degree(d)?;
    let params = HypersurfaceParams::new(n, k).map_err(|e| e.to_string())?;
    let ins = if ins.trim().is_empty() {
        InsertionVector::empty()
    } else {
        InsertionVector::parse(ins).map_err(|e| e.to_string())?
    };
    ins.validate(&params).map_err(|e| e.to_string())?;
    let total = elliptic_vsc(&params, d as i64, &ins).map_err(|e| e.to_string())?;
    let (_, _, high) = ins.split_low();
    let graphs: Vec<_> = elliptic_breakdown(&params, d, &high, None)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|(g, v)| json!({"graph": g.to_string(), "type": g.type_label(), "residue": fmt_q(v)}))
        .collect();
    Ok(json!({"N": n, "k": k, "d": d, "ins": ins.key(), "value": fmt_q(&total), "graphs": graphs}).to_string())
}

pub fn loop_identity_json(k: u32, dmax: u32) -> Result<String, String> {
    check_degree(dmax)?;
    let rep = cy::check_loop_identity(k, dmax, None).map_err(|e| e.to_string())?;
    let rows: Vec<_> = rep
        .rows
        .iter()
        .skip(1)
        .map(|r| json!({"d": r.d, "lhs": fmt_q(&r.lhs), "rhs": fmt_q(&r.rhs), "equal": r.holds()}))
        .collect();
    Ok(json!({"k": k, "all_hold": rep.all_hold(), "rows": rows}).to_string())
}

#[wasm_bindgen]
pub fn catalog(d: u32) -> Result<String, JsError> {
    catalog_json(d).map_err(|e| JsError::new(&e))
}

/// `ins` uses the `p:m,p:m` syntax.
#[wasm_bindgen]
pub fn elliptic(n: u32, k: u32, d: u32, ins: &str) -> Result<String, JsError> {
    elliptic_json(n, k, d, ins).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn loop_identity(k: u32, dmax: u32) -> Result<String, JsError> {
    loop_identity_json(k, dmax).map_err(|e| JsError::new(&e))
}
