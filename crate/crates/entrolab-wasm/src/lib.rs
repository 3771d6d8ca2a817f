//! wasm-bindgen bindings for the static page in `www/`.
//!
//! Every export returns a JSON string; the plain `*_json` functions carry the
//! logic so they can be tested on the host.

use entrolab::entropy::{decay_curve, phi_entropy};
use entrolab::models::{bernoulli_laplace, build_irw, CurieWeiss, Potential};
use entrolab::sampling::random_positive_function;
use entrolab::transport::neighbor_slope;
use entrolab::Phi;
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn phi_from(alpha: f64) -> Result<Phi, String> {
    if alpha == 1.0 {
        Ok(Phi::log())
    } else {
        Phi::alpha(alpha).map_err(|e| e.to_string())
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

#[derive(Serialize)]
struct DecayPoint {
    t: f64,
    entropy: f64,
    bound: f64,
}

#[derive(Serialize)]
struct Decay {
    kappa: f64,
    points: Vec<DecayPoint>,
}

pub fn bl_decay_json(l: usize, n: usize, alpha: f64, seed: u64, t_max: f64, steps: usize) -> Result<String, String> {
    let model = bernoulli_laplace(l, n).map_err(|e| e.to_string())?;
    let phi = phi_from(alpha)?;
    if !(t_max > 0.0) || steps < 2 {
        return Err("need t_max > 0 and at least two steps".into());
    }
    let f = random_positive_function(model.generator.n_states(), seed, 0);
    let h0 = phi_entropy(&f, &model.measure, &phi).map_err(|e| e.to_string())?;
    let grid: Vec<f64> = (1..=steps).map(|k| t_max * k as f64 / steps as f64).collect();
    let curve = decay_curve(&model.generator, &model.measure, &phi, &f, &grid, 1e-12).map_err(|e| e.to_string())?;
    let kappa = model.kappa.implied.for_phi(&phi);
    let mut points = vec![DecayPoint { t: 0.0, entropy: h0, bound: h0 }];
    points.extend(curve.into_iter().map(|(t, h)| DecayPoint { t, entropy: h, bound: (-kappa * t).exp() * h0 }));
    Ok(to_json(&Decay { kappa, points }))
}

#[derive(Serialize)]
struct CwPoint {
    beta: f64,
    kappa: f64,
    kappa_bar: f64,
    margin: f64,
}

#[derive(Serialize)]
struct CwSweep {
    critical_beta: f64,
    points: Vec<CwPoint>,
}

pub fn cw_constants_json(n: usize, beta_max: f64, steps: usize) -> Result<String, String> {
    if n < 2 || !(beta_max > 0.0) || steps < 1 {
        return Err("need N >= 2, beta_max > 0 and at least one step".into());
    }
    let points = (0..=steps)
        .map(|k| {
            let cw = CurieWeiss { n, beta: beta_max * k as f64 / steps as f64 };
            CwPoint { beta: cw.beta, kappa: cw.kappa_scan().0, kappa_bar: cw.kappa_bar(), margin: cw.condition_margin() }
        })
        .collect();
    Ok(to_json(&CwSweep { critical_beta: CurieWeiss::critical_beta(n), points }))
}

#[derive(Serialize)]
struct SlopePoint {
    t: f64,
    rate: f64,
}

pub fn irw_slope_json(lambda: f64, eta: i32, p: f64) -> Result<String, String> {
    if eta < 1 {
        return Err("need eta >= 1".into());
    }
    let v_minus = Potential::Poisson { lambda };
    let model = build_irw(&Potential::Zero, &v_minus, 1, (eta as usize + 1) * 8).map_err(|e| e.to_string())?;
    let s = model.generator.index_of(&[eta]).ok_or("state outside the truncation")?;
    let points = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3]
        .iter()
        .map(|&t| Ok(SlopePoint { t, rate: -neighbor_slope(&model, s, 0, p, t).map_err(|e| e.to_string())? }))
        .collect::<Result<Vec<_>, String>>()?;
    Ok(to_json(&points))
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

/// Entropy of `S_t f` for a random `f` on Bernoulli-Laplace, with the exponential bound.
#[wasm_bindgen]
pub fn bl_decay(l: usize, n: usize, alpha: f64, seed: u64, t_max: f64, steps: usize) -> Result<String, JsValue> {
    js(bl_decay_json(l, n, alpha, seed, t_max, steps))
}

/// Curie-Weiss curvature constants on a uniform grid of inverse temperatures.
#[wasm_bindgen]
pub fn cw_constants(n: usize, beta_max: f64, steps: usize) -> Result<String, JsValue> {
    js(cw_constants_json(n, beta_max, steps))
}

/// `(1 - W_p^p)/t` between the one-jump laws from `eta` and `eta + 1` in a 1-d Poisson walk.
#[wasm_bindgen]
pub fn irw_slope(lambda: f64, eta: i32, p: f64) -> Result<String, JsValue> {
    js(irw_slope_json(lambda, eta, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn decay_stays_under_bound() {
        let v: Value = serde_json::from_str(&bl_decay_json(4, 2, 1.0, 3, 1.0, 10).unwrap()).unwrap();
        assert_eq!(v["kappa"], 6.0);
        for p in v["points"].as_array().unwrap() {
            assert!(p["entropy"].as_f64().unwrap() <= p["bound"].as_f64().unwrap() * (1.0 + 1e-9));
        }
    }

    #[test]
    fn cw_sweep_starts_at_infinite_temperature() {
        let v: Value = serde_json::from_str(&cw_constants_json(5, 1.0, 4).unwrap()).unwrap();
        let pts = v["points"].as_array().unwrap();
        assert_eq!(pts.len(), 5);
        assert!((pts[0]["kappa"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn slope_tends_to_lambda() {
        let v: Value = serde_json::from_str(&irw_slope_json(1.0, 2, 2.0).unwrap()).unwrap();
        let last = v.as_array().unwrap().last().unwrap();
        assert!((last["rate"].as_f64().unwrap() - 1.0).abs() < 5e-3);
    }

    #[test]
    fn bad_input_is_an_error() {
        assert!(bl_decay_json(2, 2, 1.0, 0, 1.0, 5).is_err());
        assert!(cw_constants_json(1, 1.0, 5).is_err());
        assert!(irw_slope_json(1.0, 0, 1.0).is_err());
    }
}
