//! Browser bindings. Every export takes plain numbers and returns a JSON
//! string `{"ok": true, "result": ...}` or `{"ok": false, "error": ...}`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thetaflex::catalecticant::{is_clebsch, pentagon_quartic, power_sum, ClebschVerdict, PolarPentagon};
use thetaflex::chars::Characteristic;
use thetaflex::quartic::*;
use thetaflex::theta::{PeriodMatrix, ThetaOptions, ThetaTable, HYPERELLIPTIC_GUARD};
use thetaflex::{Error, Result};
use wasm_bindgen::prelude::*;

fn envelope(r: Result<Value>) -> String {
    match r {
        Ok(v) => json!({ "ok": true, "result": v }).to_string(),
        Err(e) => json!({ "ok": false, "error": e.to_string() }).to_string(),
    }
}

fn opts() -> ThetaOptions {
    ThetaOptions::with_tol(1e-12)
}

#[derive(Serialize)]
struct ThetaRow {
    label: String,
    re: f64,
    im: f64,
    abs: f64,
}

pub fn theta_constants_impl(re: &[f64], im: &[f64]) -> Result<Value> {
    let tau = PeriodMatrix::from_parts(3, re, im)?;
    let table = ThetaTable::compute(&tau, &opts())?;
    let rows: Vec<ThetaRow> = Characteristic::all(3)
        .into_iter()
        .filter(|m| m.is_even())
        .map(|m| {
            let v = table.theta(&m).value;
            ThetaRow { label: m.label(), re: v.re, im: v.im, abs: v.norm() }
        })
        .collect();
    let guard = table.check_guard(HYPERELLIPTIC_GUARD).err().map(|e| e.to_string());
    Ok(json!({ "even": rows, "min_abs": rows.iter().map(|r| r.abs).fold(f64::INFINITY, f64::min), "guard": guard }))
}

/// The 36 even theta constants at τ = re + i·im (row-major 3×3).
#[wasm_bindgen]
pub fn theta_constants(re: Vec<f64>, im: Vec<f64>) -> String {
    envelope(theta_constants_impl(&re, &im))
}

pub fn hyperflex_scan_impl(seed: u64, a: f64, b: f64, samples: usize) -> Result<Value> {
    let s = random_symmetric_direction(&mut ChaCha8Rng::seed_from_u64(seed));
    let path = imaginary_path(s);
    let form = BitangentForm::corrected();
    let o = opts();
    let eval = |tau: &PeriodMatrix| -> Result<CertifiedValue> { Ok(form.eval_table(&guarded_table(tau, &o)?)) };
    // sampled curve for the plot, with the common phase removed
    let mut curve = Vec::with_capacity(samples + 1);
    let mut phase = None;
    for k in 0..=samples {
        let t = a + (b - a) * k as f64 / samples as f64;
        if let Ok(v) = path(Complex64::new(t, 0.0)).and_then(|tau| eval(&tau)) {
            let p = *phase.get_or_insert_with(|| v.value.conj() / v.value.norm().max(f64::MIN_POSITIVE));
            curve.push([t, (v.value * p).re]);
        }
    }
    let root = match find_hyperflex_tau(&path, eval, (a, b), samples, 1e-10) {
        Ok(r) => r,
        Err(e @ Error::RootNotBracketed(_)) => {
            return Ok(json!({ "direction": s, "curve": curve, "root": Value::Null, "message": e.to_string() }))
        }
        Err(e) => return Err(e),
    };
    let report = |t: f64| -> Result<HyperflexReport> {
        let forms = aronhold_forms_from_table(&guarded_table(&path(Complex64::new(t, 0.0))?, &o)?);
        hyperflex_test(&stripped_quartic(&forms), &forms.a, 1e-4)
    };
    let at_root = report(root.t.re)?;
    let nearby = report(root.t.re + 0.05)?;
    Ok(json!({
        "direction": s,
        "curve": curve,
        "root": { "t": root.t.re, "iterations": root.iterations },
        "at_root": { "verdict": at_root.verdict, "tangency_distance": at_root.tangency_distance },
        "nearby": { "verdict": nearby.verdict, "tangency_distance": nearby.tangency_distance },
    }))
}

type CertifiedValue = thetaflex::theta::CertifiedComplex;

/// Scans the corrected bitangent form along τ(t) = i(I + tS) for a random S,
/// then tests the line a at the root and slightly past it.
#[wasm_bindgen]
pub fn hyperflex_scan(seed: u64, a: f64, b: f64, samples: usize) -> String {
    envelope(hyperflex_scan_impl(seed, a, b, samples))
}

fn random_form<R: Rng>(rng: &mut R) -> [Complex64; 3] {
    std::array::from_fn(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

#[derive(Serialize)]
struct ClebschPair {
    pentagon: ClebschVerdict,
    sum_of_six: ClebschVerdict,
}

pub fn clebsch_demo_impl(seed: u64, tol: f64) -> Result<Value> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let forms: [[Complex64; 3]; 5] = std::array::from_fn(|_| random_form(&mut rng));
    let pentagon = pentagon_quartic(&PolarPentagon { forms });
    let mut six = forms.to_vec();
    six.push(random_form(&mut rng));
    let r = ClebschPair { pentagon: is_clebsch(&pentagon, tol), sum_of_six: is_clebsch(&power_sum(&six), tol) };
    Ok(serde_json::to_value(r).expect("verdicts serialize"))
}

/// Catalecticant test on a sum of five fourth powers and on the same sum
/// with a sixth power added.
#[wasm_bindgen]
pub fn clebsch_demo(seed: u64, tol: f64) -> String {
    envelope(clebsch_demo_impl(seed, tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn theta_constants_at_i_identity() {
        let v = parse(theta_constants(vec![0.0; 9], vec![1., 0., 0., 0., 1., 0., 0., 0., 1.]));
        assert_eq!(v["ok"], true);
        let rows = v["result"]["even"].as_array().unwrap();
        assert_eq!(rows.len(), 36);
        let want = 1.086_434_811_213_308_f64.powi(3);
        assert!((rows[0]["re"].as_f64().unwrap() - want).abs() < 1e-10);
        // i·I is a product of elliptic curves, so the guard trips
        assert!(v["result"]["guard"].is_string());
    }

    #[test]
    fn bad_tau_is_an_error() {
        let v = parse(theta_constants(vec![0.0; 9], vec![-1.0; 9]));
        assert_eq!(v["ok"], false);
        assert!(v["error"].is_string());
    }

    #[test]
    fn scan_finds_a_hyperflex() {
        let v = parse(hyperflex_scan(0, 0.0, 0.5, 40));
        assert_eq!(v["ok"], true, "{v}");
        let r = &v["result"];
        assert_eq!(r["at_root"]["verdict"], "hyperflex");
        assert_ne!(r["nearby"]["verdict"], "hyperflex");
        assert!(r["curve"].as_array().unwrap().len() > 30);
    }

    #[test]
    fn scan_without_root_reports_it() {
        let v = parse(hyperflex_scan(0, 0.0, 0.01, 10));
        assert_eq!(v["ok"], true);
        assert!(v["result"]["root"].is_null());
    }

    #[test]
    fn pentagon_is_clebsch_and_six_is_not() {
        for seed in 0..5 {
            let v = parse(clebsch_demo(seed, 1e-8));
            assert_eq!(v["result"]["pentagon"]["is_clebsch"], true);
            assert_eq!(v["result"]["sum_of_six"]["is_clebsch"], false);
        }
    }
}
