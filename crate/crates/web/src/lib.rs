//! Browser bindings. Each export takes plain strings and returns a JSON
//! document; the page in `www/` does the drawing.

use logklab::exactnum::{parse_rational, to_decimal, Rational};
use logklab::normalcone::{self, CriticalC};
use logklab::pairfile::{self, LoadedPair};
use logklab::thresholds::{self, AngleWindow, ExistenceCase, VerdictStatus};
use logklab::weightoracle::{self, DimensionModel};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const DIGITS: usize = 12;

fn num(x: &Rational) -> Value {
    json!({ "exact": x.to_string(), "approx": to_decimal(x, DIGITS) })
}

fn q(s: &str, what: &str) -> Result<Rational, String> {
    parse_rational(s.trim()).map_err(|e| format!("{what}: {e}"))
}

/// A catalog name (with or without the `catalog:` prefix) or pair JSON.
fn pair(spec: &str) -> Result<LoadedPair, String> {
    let spec = spec.trim();
    if spec.starts_with('{') {
        return pairfile::parse_pair_json(spec).map_err(|e| e.to_string());
    }
    let name = spec.strip_prefix(pairfile::CATALOG_PREFIX).unwrap_or(spec);
    pairfile::catalog(name).ok_or_else(|| format!("unknown pair {name:?}"))
}

pub fn catalog_names() -> String {
    json!(pairfile::CATALOG_NAMES).to_string()
}

/// DF, inner factor and `J^NA` over `c = i/(steps+1)`, with the threshold
/// and, when one exists, the bracket around the sign change.
pub fn df_curve(spec: &str, beta: &str, steps: u32) -> Result<String, String> {
    let lp = pair(spec)?;
    let beta = q(beta, "beta")?;
    let steps = steps.clamp(1, 400);
    let pts = normalcone::df_curve(&lp.pair, &lp.divisor, &beta, steps).map_err(|e| e.to_string())?;
    let thr = normalcone::instability_threshold(&lp.pair, &lp.divisor).map_err(|e| e.to_string())?;
    let tol = Rational::new(1.into(), 1_048_576.into());
    let critical = match normalcone::critical_c(&lp.pair, &lp.divisor, &beta, &tol) {
        Ok(CriticalC::Bracket { lo, hi, .. }) => json!({ "kind": "bracket", "lo": num(&lo), "hi": num(&hi) }),
        Ok(CriticalC::EveryCDestabilizes) => json!({ "kind": "every" }),
        Err(e) => json!({ "kind": "none", "reason": e.to_string() }),
    };
    let points: Vec<Value> = pts
        .iter()
        .map(|p| json!({ "c": num(&p.c), "df": num(&p.df), "inner": num(&p.inner_factor), "jna": num(&p.jna) }))
        .collect();
    Ok(json!({ "pair": lp.pair.name, "beta": num(&beta), "threshold": num(&thr), "critical": critical, "points": points }).to_string())
}

fn window_json(w: Result<AngleWindow, logklab::Error>) -> Value {
    match w {
        Ok(w) => json!({
            "ok": true,
            "text": w.to_string(),
            "empty": w.empty,
            "lower": num(&w.lower),
            "upper": num(&w.upper),
            "lower_inclusive": w.lower_inclusive,
            "upper_inclusive": w.upper_inclusive,
        }),
        Err(e) => json!({ "ok": false, "reason": e.to_string() }),
    }
}

/// `beta_u`, the three windows and the eta-feasibility status on a grid of
/// `samples` angles in `(0, 1]`.
pub fn angle_windows(spec: &str, m: u32, alpha_l: &str, alpha_ld: &str, samples: u32) -> Result<String, String> {
    let mut lp = pair(spec)?;
    lp.divisor.m = m.max(1);
    let m = lp.divisor.m;
    lp.positivity.alpha_l = Some(q(alpha_l, "alpha(L)")?);
    lp.positivity.alpha_ld_restricted = Some(q(alpha_ld, "alpha(L_D|D)")?);
    lp.positivity.validate(&lp.pair).map_err(|e| e.to_string())?;
    let (p, pos) = (&lp.pair, &lp.positivity);
    let bu = thresholds::beta_u(p, pos, m).map_err(|e| e.to_string())?;
    let samples = samples.clamp(2, 512) as i64;
    let scan: Vec<Value> = (1..=samples)
        .map(|i| {
            let b = Rational::new(i.into(), samples.into());
            let status = match thresholds::eta_feasibility(p, pos, m, &b) {
                Ok(v) if v.status == VerdictStatus::CriterionSatisfied => "satisfied",
                Ok(_) => "inconclusive",
                Err(_) => "error",
            };
            json!({ "beta": num(&b), "status": status })
        })
        .collect();
    Ok(json!({
        "pair": p.name,
        "m": m,
        "beta_u": num(&bu),
        "uniform": window_json(thresholds::uniform_stability_window(p, pos, m)),
        "large_m": window_json(thresholds::existence_window(p, pos, m, ExistenceCase::LargeM)),
        "given_m": window_json(thresholds::existence_window(p, pos, m, ExistenceCase::GivenM)),
        "eta_scan": scan,
    })
    .to_string())
}

/// Finite-k `J_k` against the closed-form limit.
pub fn oracle_convergence(spec: &str, c: &str, kmax: u32) -> Result<String, String> {
    let lp = pair(spec)?;
    let c = q(c, "c")?;
    let model = lp.hilbert.clone().ok_or_else(|| format!("{} has no Hilbert model", lp.pair.name))?;
    let kmax = (kmax as u64).clamp(1, 400);
    let rep = weightoracle::oracle_report(&model as &dyn DimensionModel, &lp.pair, &lp.divisor, &c, kmax)
        .map_err(|e| e.to_string())?;
    let samples: Vec<Value> = rep.samples.iter().map(|s| json!({ "k": s.k, "j": num(&s.j_k) })).collect();
    Ok(json!({
        "pair": rep.pair,
        "c": num(&c),
        "limit": num(&rep.jna_closed),
        "recovered_limit": num(&rep.jna_limit),
        "match": rep.matches,
        "flat": rep.flat,
        "samples": samples,
    })
    .to_string())
}

#[wasm_bindgen(js_name = catalogNames)]
pub fn catalog_names_js() -> String {
    catalog_names()
}

#[wasm_bindgen(js_name = dfCurve)]
pub fn df_curve_js(spec: &str, beta: &str, steps: u32) -> Result<String, JsValue> {
    df_curve(spec, beta, steps).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = angleWindows)]
pub fn angle_windows_js(spec: &str, m: u32, alpha_l: &str, alpha_ld: &str, samples: u32) -> Result<String, JsValue> {
    angle_windows(spec, m, alpha_l, alpha_ld, samples).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = oracleConvergence)]
pub fn oracle_convergence_js(spec: &str, c: &str, kmax: u32) -> Result<String, JsValue> {
    oracle_convergence(spec, c, kmax).map_err(|e| JsValue::from_str(&e))
}
