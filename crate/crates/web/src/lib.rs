//! Browser demo: a qubit with the `σ_z` selector, driven by a Bloch vector.
//!
//! Each export returns a JSON string; errors come back as `{"error": …}`.

use num_complex::Complex64;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use reduced_topos::fixtures::QubitFixture;
use reduced_topos::measure::born_j_for_projection;
use reduced_topos::product::{bold_filter_report, inject_pi1, valuate_bold, ProductPoint};
use reduced_topos::semantics::{daseinize_j, valuate_j, TruthObject};
use reduced_topos::{
    ComplexMatrix, ContextPoset, DensityMatrix, Projection, Result, DEFAULT_MAX_ENUM,
};

/// `(I + x σ_x + y σ_y + z σ_z) / 2`, with the vector shrunk onto the ball.
pub fn bloch_state(x: f64, y: f64, z: f64) -> Result<DensityMatrix> {
    let n = (x * x + y * y + z * z).sqrt();
    let s = if n > 1.0 { 1.0 / n } else { 1.0 };
    let (x, y, z) = (x * s, y * s, z * s);
    let c = |re: f64, im: f64| Complex64::new(re / 2.0, im / 2.0);
    let m = ComplexMatrix::from_rows(&[
        vec![c(1.0 + z, 0.0), c(x, -y)],
        vec![c(x, y), c(1.0 - z, 0.0)],
    ])?;
    DensityMatrix::new(m.hermitian_part())
}

fn propositions(f: &QubitFixture) -> Vec<(&'static str, Projection)> {
    vec![
        ("σz = +1", f.p_z.clone()),
        ("σz = −1", f.p_z.complement()),
        ("σx = +1", f.p_x.clone()),
        ("σx = −1", f.p_x.complement()),
    ]
}

fn labels(
    p: &ContextPoset,
    ids: impl IntoIterator<Item = reduced_topos::ContextId>,
) -> Vec<String> {
    ids.into_iter().map(|v| p.label(v).to_string()).collect()
}

/// Truth values of the four spin propositions under "true with probability
/// at least `level`": the sieve at each context, and the probability
/// down-set at each context on the product site.
pub fn valuation_json(x: f64, y: f64, z: f64, level: f64) -> Result<Value> {
    let f = QubitFixture::new();
    let (p, flat) = (&f.poset, &f.flat);
    let rho = bloch_state(x, y, z)?;
    let t = TruthObject::rho_r(&rho, level)?;
    let mut rows = Vec::new();
    for (name, e) in propositions(&f) {
        let dj = daseinize_j(&e, flat, p)?;
        let nu = valuate_j(&dj, &t, flat, p)?;
        let bold = valuate_bold(&inject_pi1(p, flat, &dj)?, &rho)?;
        let sieves: serde_json::Map<String, Value> = p
            .ids()
            .map(|v| {
                (
                    p.label(v).to_string(),
                    json!(labels(p, nu.at(v).members().iter().copied())),
                )
            })
            .collect();
        let levels: serde_json::Map<String, Value> = bold
            .fibers()
            .iter()
            .map(|(&v, d)| (p.label(v).to_string(), json!(d.to_string())))
            .collect();
        rows.push(json!({"proposition": name, "sieves": sieves, "levels": levels}));
    }
    Ok(json!({"level": level, "rows": rows}))
}

/// Born probability next to the minimum over contexts of the sheaf
/// measure; equal for `σ_z` propositions, an upper bound for `σ_x` ones.
pub fn probabilities_json(x: f64, y: f64, z: f64) -> Result<Value> {
    let f = QubitFixture::new();
    let rho = bloch_state(x, y, z)?;
    let mut rows = Vec::new();
    for (name, e) in propositions(&f) {
        let b = born_j_for_projection(&e, &rho, &f.flat, &f.poset)?;
        rows.push(json!({"proposition": name, "born": b.born, "sheaf": b.value, "exact": b.exact}));
    }
    Ok(json!({"rows": rows}))
}

/// Filter check of the product-site truth object at `(Vz, level)`.
pub fn filter_json(x: f64, y: f64, z: f64, level: f64) -> Result<Value> {
    let f = QubitFixture::new();
    let rho = bloch_state(x, y, z)?;
    let rep = bold_filter_report(
        &f.poset,
        &f.flat,
        &rho,
        ProductPoint::new(f.vz, level)?,
        DEFAULT_MAX_ENUM,
    )?;
    Ok(json!({
        "lattice_size": rep.lattice_size,
        "members": rep.members,
        "is_filter": rep.filter_violations.is_empty(),
        "is_least_filter": rep.least_filter_mismatches.is_empty(),
        "first_violation": rep.filter_violations.first(),
    }))
}

fn render(r: Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({"error": e.to_string()}).to_string(),
    }
}

#[wasm_bindgen]
pub fn valuation(x: f64, y: f64, z: f64, level: f64) -> String {
    render(valuation_json(x, y, z, level))
}

#[wasm_bindgen]
pub fn probabilities(x: f64, y: f64, z: f64) -> String {
    render(probabilities_json(x, y, z))
}

#[wasm_bindgen]
pub fn filter_check(x: f64, y: f64, z: f64, level: f64) -> String {
    render(filter_json(x, y, z, level))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spin_up_is_certain() {
        let v: Value = serde_json::from_str(&valuation(0.0, 0.0, 1.0, 1.0)).unwrap();
        let up = &v["rows"][0];
        assert_eq!(up["sieves"]["Vz"], json!(["bottom", "Vz"]));
        assert_eq!(up["levels"]["Vz"], "[0,1]");
    }

    #[test]
    fn born_values_match() {
        let v: Value = serde_json::from_str(&probabilities(1.0, 0.0, 0.0)).unwrap();
        let z = &v["rows"][0];
        assert!((z["born"].as_f64().unwrap() - 0.5).abs() < 1e-9);
        assert_eq!(z["exact"], true);
        let x = &v["rows"][2];
        assert!((x["sheaf"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn filter_fails_only_for_non_eigenstates_at_mid_level() {
        let v: Value = serde_json::from_str(&filter_check(0.0, 0.0, 1.0, 0.5)).unwrap();
        assert_eq!(v["is_filter"], true);
        let v: Value = serde_json::from_str(&filter_check(0.0, 0.0, 0.0, 0.5)).unwrap();
        assert_eq!(v["is_filter"], false);
    }

    #[test]
    fn errors_are_reported_as_json() {
        let v: Value = serde_json::from_str(&valuation(0.0, 0.0, 1.0, 2.0)).unwrap();
        assert!(v["error"].as_str().unwrap().contains("level"));
    }
}
