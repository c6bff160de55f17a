//! Property suites behind `nstab verify`. Each case records its inputs and
//! outputs so a failing report is a reproduction recipe, not just a verdict.

use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use nstab_core::functionals::{deficit_report, noise_stability, StabilityMethod};
use nstab_core::gauss;
use nstab_core::quad::QuadratureSpec;
use nstab_core::sampling::{random_union, random_union_with_measure};
use nstab_core::sets::{halfspace_with_measure, IntervalUnion};
use nstab_core::variational::{
    halfspace_profile_h, profile_epsilon_cap, s_operator, stability_form, ProfileKind,
    ProfileParams,
};
use nstab_core::ou_indicator;

/// Slack for inequalities that hold up to evaluator resolution.
const INEQ_TOL: f64 = 1e-8;

#[derive(Debug, Serialize)]
pub struct Case {
    pub inputs: serde_json::Value,
    pub outputs: serde_json::Value,
    pub pass: bool,
}

fn ns(s: &IntervalUnion, rho: f64) -> Result<f64> {
    Ok(noise_stability(s, rho, StabilityMethod::Quadrature, &QuadratureSpec::default_spec())?
        .value)
}

/// Random sets never beat the half space of their own measure.
pub fn borell(trials: usize, seed: u64, rhos: &[f64], a_grid: &[f64]) -> Result<Vec<Case>> {
    let mut gen = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::with_capacity(trials);
    for i in 0..trials {
        let a = a_grid[i % a_grid.len()];
        let rho = rhos[(i / a_grid.len()) % rhos.len()];
        let s = random_union_with_measure(&mut gen, 4, a)?;
        let value = ns(&s, rho)?;
        let cap = ns(&halfspace_with_measure(a, true)?.to_union(), rho)?;
        cases.push(Case {
            inputs: json!({ "set": s.to_string(), "rho": rho, "a": a }),
            outputs: json!({
                "stability": value,
                "halfspace_stability": cap,
                "excess": value - cap,
            }),
            pass: value <= cap + INEQ_TOL,
        });
    }
    Ok(cases)
}

/// The deficit is sandwiched by the distance penalty: above by 2η_ρ and
/// below by the constant-weighted η (the specialized constant at a = 1/2
/// with β = ρ, the conservative one otherwise).
pub fn sandwich(trials: usize, seed: u64, rhos: &[f64], a_grid: &[f64]) -> Result<Vec<Case>> {
    let z0 = 0.05;
    let mut gen = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::with_capacity(trials);
    while cases.len() < trials {
        let a = a_grid[cases.len() % a_grid.len()];
        let rho = rhos[cases.len() % rhos.len()];
        let s = random_union_with_measure(&mut gen, 4, a)?;
        if s.barycenter().abs() < z0 {
            continue;
        }
        let rep = deficit_report(&s, rho, rho, a, z0)?;
        let pass = rep.upper_ok && rep.lower_ok && rep.specialized_ok.unwrap_or(true);
        cases.push(Case {
            inputs: json!({ "set": s.to_string(), "rho": rho, "a": a, "z0": z0 }),
            outputs: json!({
                "delta": rep.delta,
                "eta_rho": rep.eta_rho,
                "barycenter": rep.z,
                "upper_ok": rep.upper_ok,
                "lower_ok": rep.lower_ok,
                "specialized_ok": rep.specialized_ok,
            }),
            pass,
        });
    }
    Ok(cases)
}

fn outward_normals(s: &IntervalUnion) -> Vec<f64> {
    let mut n = Vec::new();
    for &(lo, hi) in s.components() {
        if lo.is_finite() {
            n.push(-1.0);
        }
        if hi.is_finite() {
            n.push(1.0);
        }
    }
    n
}

/// Divergence identity and positivity of the boundary form. The reference
/// lower bound is reported, never asserted: it fails for well-separated
/// components.
pub fn variational(trials: usize, seed: u64, rhos: &[f64]) -> Result<Vec<Case>> {
    let mut gen = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::with_capacity(trials);
    for i in 0..trials {
        let s = random_union(&mut gen, 4);
        let rho = rhos[i % rhos.len()];
        let normals = outward_normals(&s);

        let mut max_div = 0.0f64;
        for _ in 0..10 {
            let x = gen.random_range(-4.0..4.0);
            let sn = s_operator(&s, rho, &normals, x)?;
            let d = ou_indicator(&s, rho, x)?.derivative;
            max_div = max_div.max((rho * sn + d).abs());
        }

        let sf = stability_form(&s, rho)?;
        let pass = max_div <= 1e-10
            && sf.value >= -1e-10
            && (normals.len() < 2 || sf.pair_form > 0.0)
            && (sf.pair_form <= 1e-13 || sf.value > 0.0);
        cases.push(Case {
            inputs: json!({ "set": s.to_string(), "rho": rho }),
            outputs: json!({
                "max_divergence_residual": max_div,
                "form_value": sf.value,
                "pair_form": sf.pair_form,
                "reference_lower_bound": sf.lower_bound,
            }),
            pass,
        });
    }
    Ok(cases)
}

/// Grid minimization of the half-space profiles; the minimum must sit at
/// the measure quantile within the scan resolution.
pub fn profiles(a_beta: &[(f64, f64)]) -> Result<Vec<Case>> {
    let step = 1e-2;
    let mut cases = Vec::new();
    for &(a, beta) in a_beta {
        for kind in [ProfileKind::PhiSquared, ProfileKind::BumpMoment] {
            let cap = profile_epsilon_cap(kind, a, beta)?;
            let params = ProfileParams { a, beta, epsilon: 0.5 * cap };
            let alpha = -gauss::phi_inv(a)?;

            let mut best_t = f64::NAN;
            let mut best_h = f64::INFINITY;
            let n = (12.0 / step) as usize;
            for i in 0..=n {
                let t = -6.0 + step * i as f64;
                let h = halfspace_profile_h(t, kind, &params)?;
                if h < best_h {
                    best_h = h;
                    best_t = t;
                }
            }
            cases.push(Case {
                inputs: json!({
                    "a": a, "beta": beta, "epsilon": params.epsilon,
                    "kind": kind, "grid_step": step,
                }),
                outputs: json!({ "argmin": best_t, "quantile": alpha }),
                pass: (best_t - alpha).abs() <= step + 1e-12,
            });
        }
    }
    Ok(cases)
}
