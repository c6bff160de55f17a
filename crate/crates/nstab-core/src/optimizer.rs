//! Derivative-free maximization of the stability objectives over interval
//! unions parameterized by their finite endpoints.
//!
//! The search is a multi-restart Nelder-Mead simplex over sorted endpoint
//! vectors. Restart 0 and 1 always probe the two pure rays, so the
//! half-space candidate is never missed; later restarts draw random
//! topologies (component count, ray flags) and random starting endpoints.
//! Objectives with a fixed-measure constraint keep it exact by eliminating
//! the last endpoint through the Gaussian quantile; the relaxed objective
//! with its own volume term searches all endpoints freely.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{objective, ObjectiveSpec, PenaltyKind};
use crate::gauss::{phi, phi_inv};
use crate::math;
use crate::sets::{halfspace_with_measure, IntervalUnion};

/// Endpoints are confined to this symmetric box; beyond it every Gaussian
/// quantity is tail noise.
const BOX: f64 = 8.5;
/// Minimal separation between consecutive endpoints. Holes or components
/// thinner than this change the objective by less than the evaluator can
/// resolve, so the search would otherwise wander plateaus of spurious
/// microscopic features; below it candidates are rejected outright.
const GAP: f64 = 1e-3;
/// Base score for infeasible endpoint vectors, graded by violation size so
/// the simplex is pushed back toward the feasible region.
const BAD: f64 = -1e6;
/// Scores above this are genuine objective values (objectives are bounded
/// by a few units); below it the candidate was infeasible.
const FEASIBLE_FLOOR: f64 = -1e5;
/// Restart values closer than this are indistinguishable at the quadrature
/// accuracy behind the objective; the winner among such ties is the set
/// with the fewest boundary points.
const NEAR_TIE: f64 = 1e-9;
/// Initial simplex spread along each coordinate.
const SIMPLEX_STEP: f64 = 0.25;
/// Random draws per restart before giving up on a feasible start.
const DRAW_ATTEMPTS: usize = 100;

/// Search space and budget for one maximization run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Largest number of components tried; restarts cycle through 1..=this.
    pub component_count: usize,
    pub restarts: usize,
    pub max_iters: usize,
    /// Simplex diameter below which a restart counts as converged.
    pub step_tol: f64,
    pub objective: ObjectiveSpec,
    pub seed: u64,
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=4).contains(&self.component_count) {
            return Err(Error::Domain(alloc::format!(
                "component count must lie in 1..=4, got {}",
                self.component_count
            )));
        }
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::Domain(
                "restarts and max_iters must be positive".into(),
            ));
        }
        if !(self.step_tol > 0.0 && self.step_tol.is_finite()) {
            return Err(Error::Domain(alloc::format!(
                "step tolerance must be positive and finite, got {}",
                self.step_tol
            )));
        }
        self.objective.validate()
    }
}

/// Outcome of a maximization run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_set: IntervalUnion,
    pub best_value: f64,
    /// Accepted improvements of the winning restart: (iteration, value),
    /// nondecreasing in value.
    pub history: Vec<(usize, f64)>,
    /// True when the winner has a single boundary point and is within
    /// symmetric-difference measure 1e-4 of the half space whose measure is
    /// the configured target.
    pub is_halfspace: bool,
}

/// Component layout of a candidate: how many components and whether the
/// outermost ones extend to ∓∞.
#[derive(Clone, Copy, Debug)]
struct Topology {
    components: usize,
    left_ray: bool,
    right_ray: bool,
}

impl Topology {
    fn finite_endpoints(self) -> usize {
        2 * self.components - usize::from(self.left_ray) - usize::from(self.right_ray)
    }

    fn free_endpoints(self, hard: bool) -> usize {
        self.finite_endpoints() - usize::from(hard)
    }
}

/// The relaxed objective carries its own volume term; everything else pins
/// the measure exactly through endpoint elimination.
fn hard_measure(kind: PenaltyKind) -> bool {
    kind != PenaltyKind::PhiSquaredWithVolume
}

fn assemble(top: Topology, e: &[f64]) -> Vec<(f64, f64)> {
    debug_assert_eq!(e.len(), top.finite_endpoints());
    let mut comps = Vec::with_capacity(top.components);
    let mut idx = 0usize;
    for c in 0..top.components {
        let lo = if c == 0 && top.left_ray {
            f64::NEG_INFINITY
        } else {
            idx += 1;
            e[idx - 1]
        };
        let hi = if c + 1 == top.components && top.right_ray {
            f64::INFINITY
        } else {
            idx += 1;
            e[idx - 1]
        };
        comps.push((lo, hi));
    }
    comps
}

fn mass(lo: f64, hi: f64) -> f64 {
    let upper = if hi.is_infinite() { 1.0 } else { phi(hi) };
    let lower = if lo.is_infinite() { 0.0 } else { phi(lo) };
    upper - lower
}

enum Candidate {
    Set(IntervalUnion),
    Violation(f64),
}

/// Completes a parameter vector to a full endpoint vector (restoring the
/// eliminated endpoint when the measure is hard) and builds the set, or
/// reports how far from feasible the vector is.
fn candidate(top: Topology, params: &[f64], a: f64, hard: bool) -> Candidate {
    let f = top.finite_endpoints();
    let mut endpoints = Vec::with_capacity(f);
    endpoints.extend_from_slice(params);

    let mut violation = 0.0f64;
    for w in endpoints.windows(2) {
        violation += (w[0] + GAP - w[1]).max(0.0);
    }
    for &e in &endpoints {
        violation += (math::abs(e) - BOX).max(0.0);
    }
    if violation > 0.0 {
        return Candidate::Violation(violation);
    }

    if hard {
        // The last endpoint carries the measure constraint. Everything
        // before the final component is fixed by the parameters, so the
        // remaining mass determines it through the quantile.
        let comps = top.components;
        let mut rest = 0.0f64;
        {
            // Mass of all components except the last, read off the params.
            let probe = Topology {
                components: comps - 1,
                left_ray: top.left_ray,
                right_ray: false,
            };
            if comps > 1 {
                let head = probe.finite_endpoints();
                for (lo, hi) in assemble(probe, &params[..head]) {
                    rest += mass(lo, hi);
                }
            }
        }
        let rem = a - rest;
        let prev = params.last().copied().unwrap_or(f64::NEG_INFINITY);
        let target_p = if top.right_ray {
            1.0 - rem
        } else {
            let lo_last = if comps == 1 && top.left_ray {
                f64::NEG_INFINITY
            } else {
                prev
            };
            (if lo_last.is_infinite() { 0.0 } else { phi(lo_last) }) + rem
        };
        if !(target_p > 0.0 && target_p < 1.0) {
            return Candidate::Violation(1.0 + math::abs(target_p - 0.5));
        }
        let last = match phi_inv(target_p) {
            Ok(t) => t,
            Err(_) => return Candidate::Violation(1.0),
        };
        let mut violation = (math::abs(last) - BOX).max(0.0);
        if !params.is_empty() {
            violation += (prev + GAP - last).max(0.0);
        }
        if violation > 0.0 {
            return Candidate::Violation(violation);
        }
        endpoints.push(last);
    }

    match IntervalUnion::new(assemble(top, &endpoints)) {
        Ok(set) => Candidate::Set(set),
        Err(_) => Candidate::Violation(1.0),
    }
}

fn eval(top: Topology, params: &[f64], spec: &ObjectiveSpec, hard: bool) -> f64 {
    match candidate(top, params, spec.a, hard) {
        Candidate::Violation(v) => BAD * (1.0 + v),
        Candidate::Set(set) => objective(&set, spec).unwrap_or(BAD),
    }
}

struct RestartRun {
    set: IntervalUnion,
    value: f64,
    history: Vec<(usize, f64)>,
}

/// Simplex maximization from one start. History records the start value and
/// every improvement of the incumbent, so it is nondecreasing.
fn simplex_climb(
    top: Topology,
    start: Vec<f64>,
    spec: &ObjectiveSpec,
    hard: bool,
    max_iters: usize,
    step_tol: f64,
) -> Option<RestartRun> {
    let k = start.len();
    let start_value = eval(top, &start, spec, hard);
    if start_value <= FEASIBLE_FLOOR {
        return None;
    }
    let finish = |params: &[f64], value: f64, history: Vec<(usize, f64)>| {
        match candidate(top, params, spec.a, hard) {
            Candidate::Set(set) => Some(RestartRun {
                set,
                value,
                history,
            }),
            Candidate::Violation(_) => None,
        }
    };
    let mut history = vec![(0usize, start_value)];
    if k == 0 {
        // Fully determined by the constraint; nothing to move.
        return finish(&start, start_value, history);
    }

    let mut points = vec![start.clone()];
    for i in 0..k {
        let mut p = start.clone();
        p[i] += SIMPLEX_STEP;
        points.push(p);
    }
    let mut values: Vec<f64> = points
        .iter()
        .map(|p| eval(top, p, spec, hard))
        .collect();

    let mut best_value = start_value;
    let mut best_params = start;

    for iter in 1..=max_iters {
        let mut order: Vec<usize> = (0..=k).collect();
        order.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).expect("finite scores"));
        let best = order[0];
        let worst = order[k];
        let second_worst = order[k - 1];

        if values[best] > best_value {
            best_value = values[best];
            best_params = points[best].clone();
            history.push((iter, best_value));
        }

        let diameter = points
            .iter()
            .flat_map(|p| {
                p.iter()
                    .zip(&points[best])
                    .map(|(a, b)| math::abs(a - b))
            })
            .fold(0.0f64, f64::max);
        if diameter < step_tol {
            break;
        }

        let mut centroid = vec![0.0f64; k];
        for (idx, p) in points.iter().enumerate() {
            if idx == worst {
                continue;
            }
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / k as f64;
            }
        }

        let blend = |s: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&points[worst])
                .map(|(c, w)| c + s * (c - w))
                .collect()
        };
        let reflected = blend(1.0);
        let fr = eval(top, &reflected, spec, hard);
        if fr > values[best] {
            let expanded = blend(2.0);
            let fe = eval(top, &expanded, spec, hard);
            if fe > fr {
                points[worst] = expanded;
                values[worst] = fe;
            } else {
                points[worst] = reflected;
                values[worst] = fr;
            }
        } else if fr > values[second_worst] {
            points[worst] = reflected;
            values[worst] = fr;
        } else {
            let contracted = if fr > values[worst] {
                blend(0.5)
            } else {
                blend(-0.5)
            };
            let fc = eval(top, &contracted, spec, hard);
            if fc > values[worst].max(fr) {
                points[worst] = contracted;
                values[worst] = fc;
            } else {
                // Shrink toward the best vertex.
                for idx in 0..=k {
                    if idx == best {
                        continue;
                    }
                    let target: Vec<f64> = points[idx]
                        .iter()
                        .zip(&points[best])
                        .map(|(x, b)| b + 0.5 * (x - b))
                        .collect();
                    values[idx] = eval(top, &target, spec, hard);
                    points[idx] = target;
                }
            }
        }
    }

    // The incumbent may have improved on the final iteration.
    for (idx, v) in values.iter().enumerate() {
        if *v > best_value {
            best_value = *v;
            best_params = points[idx].clone();
            history.push((max_iters, best_value));
        }
    }
    if best_value <= FEASIBLE_FLOOR {
        return None;
    }
    finish(&best_params, best_value, history)
}

fn restart_seed(seed: u64, restart: usize) -> u64 {
    seed ^ (restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Start of one restart: the first two probe the pure rays, the rest draw
/// random topologies and endpoints.
fn draw_start(config: &SearchConfig, restart: usize, hard: bool) -> Option<(Topology, Vec<f64>)> {
    let a = config.objective.a;
    if restart < 2 {
        let top = Topology {
            components: 1,
            left_ray: restart == 1,
            right_ray: restart == 0,
        };
        let start = if hard {
            Vec::new()
        } else {
            let p = if restart == 0 { 1.0 - a } else { a };
            vec![phi_inv(p).ok()?]
        };
        if eval(top, &start, &config.objective, hard) <= FEASIBLE_FLOOR {
            return None;
        }
        return Some((top, start));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(config.seed, restart));
    for _ in 0..DRAW_ATTEMPTS {
        let components = 1 + restart % config.component_count;
        let left_ray = rng.random_bool(0.5);
        let right_ray = rng.random_bool(0.5);
        if components == 1 && left_ray && right_ray {
            continue;
        }
        let top = Topology {
            components,
            left_ray,
            right_ray,
        };
        let free = top.free_endpoints(hard);
        let mut start: Vec<f64> = (0..free).map(|_| rng.random_range(-4.0..4.0)).collect();
        start.sort_by(|x, y| x.partial_cmp(y).expect("finite draws"));
        if start.windows(2).any(|w| w[1] - w[0] < 10.0 * GAP) {
            continue;
        }
        if eval(top, &start, &config.objective, hard) > FEASIBLE_FLOOR {
            return Some((top, start));
        }
    }
    None
}

fn run_restart(config: &SearchConfig, restart: usize) -> Option<RestartRun> {
    let hard = hard_measure(config.objective.penalty);
    let (top, start) = draw_start(config, restart, hard)?;
    simplex_climb(
        top,
        start,
        &config.objective,
        hard,
        config.max_iters,
        config.step_tol,
    )
}

#[cfg(feature = "std")]
fn run_all(config: &SearchConfig) -> Vec<Option<RestartRun>> {
    use rayon::prelude::*;
    // Restarts are independent and indexed, so the parallel collect is
    // deterministic regardless of scheduling.
    (0..config.restarts)
        .into_par_iter()
        .map(|r| run_restart(config, r))
        .collect()
}

#[cfg(not(feature = "std"))]
fn run_all(config: &SearchConfig) -> Vec<Option<RestartRun>> {
    (0..config.restarts).map(|r| run_restart(config, r)).collect()
}

/// Runs the multi-restart search and returns the best local maximum found.
pub fn maximize(config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    let runs = run_all(config);
    let mut winner: Option<RestartRun> = None;
    for run in runs.into_iter().flatten() {
        let better = match &winner {
            Some(w) => {
                run.value > w.value + NEAR_TIE
                    || (run.value > w.value - NEAR_TIE
                        && run.set.boundary().len() < w.set.boundary().len())
            }
            None => true,
        };
        if better {
            winner = Some(run);
        }
    }
    let Some(run) = winner else {
        return Err(Error::Infeasible(alloc::format!(
            "no feasible starting set found in {} restarts ({} draws each)",
            config.restarts,
            DRAW_ATTEMPTS
        )));
    };
    let is_halfspace = run.set.boundary().len() == 1 && {
        let a = config.objective.a;
        [true, false].into_iter().any(|aligned| {
            halfspace_with_measure(a, aligned)
                .map(|h| run.set.symmetric_difference_measure(&h.to_union()) < 1e-4)
                .unwrap_or(false)
        })
    };
    Ok(SearchResult {
        best_set: run.set,
        best_value: run.value,
        history: run.history,
        is_halfspace,
    })
}

/// Threshold below which the penalized problem is guaranteed to keep half
/// spaces optimal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonCap {
    pub value: f64,
    /// Set when β = ρ with α ≠ 0: the exponent in the cap diverges and the
    /// limiting cap is zero.
    pub degenerate: bool,
}

/// Evaluates (1−ρ)²z₀² / (ρ·10·e^{α²·max(0, β/(ρ−β) − 1)}) with
/// α = −Φ⁻¹(a).
pub fn epsilon_cap(rho: f64, beta: f64, a: f64, z0: f64) -> Result<EpsilonCap> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Domain(alloc::format!(
            "correlation must lie in (0,1), got {rho}"
        )));
    }
    if !(beta > 0.0 && beta <= rho) {
        return Err(Error::Domain(alloc::format!(
            "beta must lie in (0, rho], got {beta} with rho {rho}"
        )));
    }
    if !(z0 > 0.0 && z0.is_finite()) {
        return Err(Error::Domain(alloc::format!(
            "barycenter floor must be positive, got {z0}"
        )));
    }
    let alpha = -phi_inv(a)?;
    let base = (1.0 - rho) * (1.0 - rho) * z0 * z0 / (10.0 * rho);
    if alpha == 0.0 {
        // The exponent carries a factor α², so it vanishes regardless of β.
        return Ok(EpsilonCap {
            value: base,
            degenerate: false,
        });
    }
    if beta == rho {
        return Ok(EpsilonCap {
            value: 0.0,
            degenerate: true,
        });
    }
    let exponent = alpha * alpha * (beta / (rho - beta) - 1.0).max(0.0);
    Ok(EpsilonCap {
        value: base / math::exp(exponent),
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{noise_stability, StabilityMethod};
    use crate::gauss::gaussian_density;
    use crate::quad::QuadratureSpec;
    use crate::variational::{level_residual, translation_eigen_residual};

    fn config(objective: ObjectiveSpec) -> SearchConfig {
        SearchConfig {
            component_count: 2,
            restarts: 20,
            max_iters: 300,
            step_tol: 1e-9,
            objective,
            seed: 12,
        }
    }

    fn halfspace_objective(spec: &ObjectiveSpec) -> f64 {
        let h = halfspace_with_measure(spec.a, true).unwrap().to_union();
        objective(&h, spec).unwrap()
    }

    #[test]
    fn unpenalized_search_recovers_the_half_space() {
        let spec = ObjectiveSpec::new(0.5, 0.3, 0.0, 0.5, PenaltyKind::None).unwrap();
        let result = maximize(&config(spec)).unwrap();
        assert!(result.is_halfspace, "winner: {:?}", result.best_set);
        let h = halfspace_with_measure(0.5, true).unwrap().to_union();
        let reference = noise_stability(
            &h,
            0.5,
            StabilityMethod::Quadrature,
            &QuadratureSpec::default_spec(),
        )
        .unwrap()
        .value;
        assert!(
            (result.best_value - reference).abs() < 1e-7,
            "best {} vs half space {reference}",
            result.best_value
        );
    }

    #[test]
    fn relaxed_search_under_the_cap_recovers_the_half_space() {
        let z0 = gaussian_density(0.0);
        let cap = epsilon_cap(0.5, 0.5, 0.5, z0).unwrap();
        assert!(!cap.degenerate);
        let spec = ObjectiveSpec::new(
            0.5,
            0.5,
            0.5 * cap.value,
            0.5,
            PenaltyKind::PhiSquaredWithVolume,
        )
        .unwrap();
        let result = maximize(&config(spec)).unwrap();
        assert!(result.is_halfspace, "winner: {:?}", result.best_set);
        assert!((result.best_value - halfspace_objective(&spec)).abs() < 1e-6);
        // A converged winner satisfies the Lagrange level condition and the
        // almost-eigenfunction alignment.
        let report = level_residual(&result.best_set, &spec).unwrap();
        assert!(report.first_variation_residual < 1e-6);
        assert!(translation_eigen_residual(&result.best_set, &spec).unwrap() < 1e-6);
    }

    #[test]
    fn barycenter_penalty_is_escaped_by_two_ray_sets() {
        let spec = ObjectiveSpec::new(0.98, 0.49, 0.1, 0.5, PenaltyKind::BarycenterSquared)
            .unwrap();
        let result = maximize(&config(spec)).unwrap();
        assert!(!result.is_halfspace, "winner: {:?}", result.best_set);
        // The true margin of the two-ray family over the half space at this
        // correlation is ~3e-6, far above quadrature noise but genuinely
        // small; closer to ρ = 1 the margin grows while the optimal far
        // endpoint slides inward toward the symmetric pair.
        assert!(
            result.best_value > halfspace_objective(&spec) + 1e-6,
            "no escape: {} vs {}",
            result.best_value,
            halfspace_objective(&spec)
        );
        assert_eq!(result.best_set.components().len(), 2);
        let far = result
            .best_set
            .boundary()
            .iter()
            .map(|p| p.location.abs())
            .fold(0.0f64, f64::max);
        assert!(
            (2.0..=5.0).contains(&far),
            "far endpoint {far} outside the expected band"
        );
    }

    #[test]
    fn history_is_nondecreasing_and_bounded_by_the_best() {
        let spec = ObjectiveSpec::new(0.98, 0.49, 0.1, 0.5, PenaltyKind::BarycenterSquared)
            .unwrap();
        let result = maximize(&config(spec)).unwrap();
        assert!(!result.history.is_empty());
        for w in result.history.windows(2) {
            assert!(w[0].1 <= w[1].1, "history decreased: {:?}", w);
            assert!(w[0].0 <= w[1].0);
        }
        for (_, v) in &result.history {
            assert!(*v <= result.best_value);
        }
        assert_eq!(result.history.last().unwrap().1, result.best_value);
    }

    #[test]
    fn identical_configs_reproduce_bit_for_bit() {
        let spec = ObjectiveSpec::new(0.6, 0.3, 0.05, 0.4, PenaltyKind::PhiSquaredWithVolume)
            .unwrap();
        let mut cfg = config(spec);
        cfg.restarts = 6;
        cfg.max_iters = 120;
        let first = maximize(&cfg).unwrap();
        let second = maximize(&cfg).unwrap();
        assert_eq!(first.best_value.to_bits(), second.best_value.to_bits());
        assert_eq!(first.history, second.history);
        assert_eq!(first.best_set, second.best_set);
    }

    #[test]
    fn unreachable_measure_is_reported_infeasible() {
        let spec = ObjectiveSpec::new(0.5, 0.3, 0.0, 1e-19, PenaltyKind::None).unwrap();
        let mut cfg = config(spec);
        cfg.restarts = 5;
        assert!(matches!(maximize(&cfg), Err(Error::Infeasible(_))));
    }

    #[test]
    fn search_config_validation() {
        let spec = ObjectiveSpec::new(0.5, 0.3, 0.0, 0.5, PenaltyKind::None).unwrap();
        let mut cfg = config(spec);
        cfg.component_count = 5;
        assert!(matches!(cfg.validate(), Err(Error::Domain(_))));
        cfg.component_count = 2;
        cfg.step_tol = 0.0;
        assert!(matches!(cfg.validate(), Err(Error::Domain(_))));
    }

    #[test]
    fn cap_matches_the_displayed_arithmetic() {
        let z0 = gaussian_density(0.0);
        let cap = epsilon_cap(0.5, 0.5, 0.5, z0).unwrap();
        assert!((cap.value - 0.007957747154594767).abs() < 1e-15);
        assert!(!cap.degenerate);
        // Small beta keeps the exponent at zero.
        let low = epsilon_cap(0.6, 0.25, 0.3, 1.0).unwrap();
        assert!((low.value - 0.16 / 6.0).abs() < 1e-15);
        // Larger beta switches the exponential factor on.
        let mid = epsilon_cap(0.6, 0.5, 0.3, 1.0).unwrap();
        let alpha: f64 = -phi_inv(0.3).unwrap();
        let want = 0.16 / 6.0 / (alpha * alpha * 4.0).exp();
        assert!((mid.value - want).abs() < 1e-15);
        assert!(mid.value < low.value);
    }

    #[test]
    fn cap_degenerates_when_beta_meets_rho_off_center() {
        let cap = epsilon_cap(0.5, 0.5, 0.3, 1.0).unwrap();
        assert_eq!(cap.value, 0.0);
        assert!(cap.degenerate);
    }

    #[test]
    fn cap_is_decreasing_in_rho_at_the_origin() {
        let mut prev = f64::INFINITY;
        for k in 1..=9 {
            let rho = 0.1 * k as f64;
            let cap = epsilon_cap(rho, 0.5 * rho, 0.5, 1.0).unwrap();
            assert!(cap.value < prev);
            prev = cap.value;
        }
    }

    #[test]
    fn cap_rejects_bad_parameters() {
        assert!(matches!(
            epsilon_cap(0.5, 0.6, 0.5, 1.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            epsilon_cap(0.5, 0.3, 0.5, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            epsilon_cap(1.0, 0.3, 0.5, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn search_result_serializes_with_stable_field_names() {
        let spec = ObjectiveSpec::new(0.5, 0.3, 0.0, 0.5, PenaltyKind::None).unwrap();
        let mut cfg = config(spec);
        cfg.restarts = 2;
        cfg.max_iters = 50;
        let result = maximize(&cfg).unwrap();
        let json = serde_json::to_string(&result).unwrap();
        for key in ["best_set", "best_value", "history", "is_halfspace"] {
            assert!(json.contains(key), "missing {key} in {json}");
        }
        let back: SearchResult = serde_json::from_str(&json).unwrap();
        assert_eq!(back.best_value.to_bits(), result.best_value.to_bits());
    }
}
