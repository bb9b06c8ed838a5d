use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use symbolkit::dsl::parse_expr;
use symbolkit::gamma::{gamma_eval, End};
use symbolkit::report::error_value;
use symbolkit::sigma::{
    k1_ae_coordinates, mbar_symbol_with, sigma_invertible, sigma_symbol, winding_number, SigmaGrid, INDEX_SIGN,
};
use symbolkit::SymbolError;

fn respond(r: Result<Value, SymbolError>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": error_value(&e) }).to_string(),
    }
}

/// Square-boundary curve of a commutative element, `samples` points per edge.
pub fn mbar_curve_json(expr: &str, samples: usize) -> String {
    respond((|| {
        let e = parse_expr(expr)?;
        let m = mbar_symbol_with(&e, samples.clamp(16, 8192))?;
        let curve = m.curve();
        let winding = winding_number(&curve, 1e-8);
        Ok(json!({
            "re": curve.iter().map(|z| z.re).collect::<Vec<_>>(),
            "im": curve.iter().map(|z| z.im).collect::<Vec<_>>(),
            "winding": winding.as_ref().ok(),
            "index": winding.as_ref().ok().map(|w| INDEX_SIGN * w),
            "winding_error": winding.err().map(|e| error_value(&e)),
        }))
    })())
}

/// Moduli of the boundary symbol matrix, row-major.
pub fn gamma_heatmap_json(expr: &str, phi: f64, end: i32, n: usize) -> String {
    respond((|| {
        let e = parse_expr(expr)?;
        let end = End::from_sign(end as i64).ok_or_else(|| SymbolError::BadParameters("end must be +1 or -1".into()))?;
        let n = n.clamp(1, 64);
        let g = gamma_eval(&e, phi, end, n);
        let size = 2 * n + 1;
        let cells: Vec<f64> = (0..size).flat_map(|j| (0..size).map(move |k| (j, k))).map(|(j, k)| g.entries[(j, k)].norm()).collect();
        Ok(json!({ "n": n, "size": size, "abs": cells }))
    })())
}

/// Principal-symbol invertibility and, when invertible, the four circle windings.
pub fn sigma_summary_json(expr: &str) -> String {
    respond((|| {
        let e = parse_expr(expr)?;
        let grid = SigmaGrid { line_samples: 512, line_half_length: 32.0, circle_samples: 512 };
        let s = sigma_symbol(&e, &grid);
        let v = sigma_invertible(&s, 1e-8);
        let coords = k1_ae_coordinates(&s, 1e-8).ok();
        Ok(json!({
            "verdict": v.verdict,
            "min_modulus": v.min_modulus,
            "chart": v.chart,
            "k1_ae_coordinates": coords,
        }))
    })())
}

#[wasm_bindgen]
pub fn mbar_curve(expr: &str, samples: usize) -> String {
    mbar_curve_json(expr, samples)
}

#[wasm_bindgen]
pub fn gamma_heatmap(expr: &str, phi: f64, end: i32, n: usize) -> String {
    gamma_heatmap_json(expr, phi, end, n)
}

#[wasm_bindgen]
pub fn sigma_summary(expr: &str) -> String {
    sigma_summary_json(expr)
}
