use serde_json::Value;
use symbolkit_wasm::{gamma_heatmap_json, mbar_curve_json, sigma_summary_json};

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn curve_of_b3_winds_once() {
    let v = parse(mbar_curve_json("B3", 512));
    assert_eq!(v["index"], -1);
    assert_eq!(v["re"].as_array().unwrap().len(), v["im"].as_array().unwrap().len());
}

#[test]
fn heatmap_has_the_right_shape() {
    let v = parse(gamma_heatmap_json("fmult(b)", 0.0, 1, 4));
    assert_eq!(v["size"], 9);
    let cells = v["abs"].as_array().unwrap();
    assert_eq!(cells.len(), 81);
    // diag(b(j)) at φ=0: zero above the center on the negative side, one on the positive side
    assert_eq!(cells[0].as_f64(), Some(0.0));
    assert_eq!(cells[80].as_f64(), Some(1.0));
}

#[test]
fn summaries_and_errors() {
    let v = parse(sigma_summary_json("A1"));
    assert_eq!(v["verdict"], "invertible");
    assert_eq!(v["k1_ae_coordinates"], serde_json::json!([1, 0, 0, 0]));
    let v = parse(mbar_curve_json("mult(e_k(1))", 64));
    assert_eq!(v["error"]["code"], "not_in_commutative_algebra");
    let v = parse(gamma_heatmap_json("I", 0.0, 0, 4));
    assert_eq!(v["error"]["code"], "bad_parameters");
}
