//! Noise stability through three independent evaluators, the deficit
//! against the matched half space with its two-sided bounds, and the
//! penalized objectives built on the Φ profile and the barycenter.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::{gaussian_density, phi, phi_inv};
use crate::hermite;
use crate::math;
use crate::ou::ou_indicator;
use crate::quad::{integrate_gaussian, integrate_gaussian_over, Integral, QuadratureSpec};
use crate::sets::{halfspace_with_measure, HalfSpace1D, IntervalUnion, RaySide};

/// Slack for inequality verdicts; quadrature noise sits well below this.
const INEQ_TOL: f64 = 1e-8;

/// Measure preconditions are enforced to this absolute tolerance.
const MEASURE_TOL: f64 = 1e-10;

/// How a stability value is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityMethod {
    /// ∫ 1_s(x)·T_ρ1_s(x) γ₁ by interval quadrature.
    Quadrature,
    /// Σ_k ρ^k b_k² with b_k = ∫ 1_s ê_k γ₁; tail bounded by |ρ|^{N+1}.
    Mehler { terms: usize },
    /// Empirical P((X,Y) ∈ s×s) over correlated Gaussian pairs.
    MonteCarlo { pairs: u64, seed: u64 },
}

pub(crate) fn check_rho_open(rho: f64) -> Result<()> {
    if !(rho > -1.0 && rho < 1.0) {
        return Err(Error::Domain(alloc::format!(
            "correlation must satisfy |rho| < 1, got {rho}"
        )));
    }
    Ok(())
}

pub(crate) fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::Domain(alloc::format!(
            "{name} = {v} must lie in (0,1)"
        )));
    }
    Ok(())
}

/// Σ over components of ∫ f γ₁.
pub(crate) fn integrate_union<F: Fn(f64) -> f64>(
    f: &F,
    s: &IntervalUnion,
    spec: &QuadratureSpec,
) -> Result<Integral> {
    let mut value = 0.0f64;
    let mut error = 0.0f64;
    for &(lo, hi) in s.components() {
        let part = integrate_gaussian_over(f, lo, hi, spec)?;
        value += part.value;
        error += part.error_estimate;
    }
    Ok(Integral {
        value,
        error_estimate: error,
    })
}

/// b_k = ∫_s ê_k γ₁ for k = 0..n: b_0 is the measure and for k ≥ 1 each
/// finite endpoint t contributes ±ê_{k−1}(t)γ₁(t)/√k.
fn band_coefficients(s: &IntervalUnion, n: usize) -> Vec<f64> {
    let mut b = vec![0.0f64; n + 1];
    b[0] = s.measure();
    if n == 0 {
        return b;
    }
    for &(lo, hi) in s.components() {
        for (t, sign) in [(lo, 1.0f64), (hi, -1.0f64)] {
            if !t.is_finite() {
                continue;
            }
            let e = hermite::orthonormal_values(t, n - 1);
            let g = gaussian_density(t);
            for k in 1..=n {
                b[k] += sign * e[k - 1] * g / math::sqrt(k as f64);
            }
        }
    }
    b
}

const MC_CHUNK: u64 = 1 << 16;

fn mc_chunk_hits(s: &IntervalUnion, rho: f64, n: u64, chunk_seed: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(chunk_seed);
    let root = math::sqrt(1.0 - rho * rho);
    let mut hits = 0u64;
    for _ in 0..n {
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        let x = z1;
        let y = rho * z1 + root * z2;
        if s.contains(x) && s.contains(y) {
            hits += 1;
        }
    }
    hits
}

fn mc_seed_for(seed: u64, chunk: u64) -> u64 {
    seed ^ chunk.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

#[cfg(feature = "std")]
fn mc_hits(s: &IntervalUnion, rho: f64, pairs: u64, seed: u64) -> u64 {
    use rayon::prelude::*;
    let chunks = pairs.div_ceil(MC_CHUNK);
    // Fixed chunks with derived seeds: the result is independent of the
    // thread schedule.
    (0..chunks)
        .into_par_iter()
        .map(|i| {
            let n = MC_CHUNK.min(pairs - i * MC_CHUNK);
            mc_chunk_hits(s, rho, n, mc_seed_for(seed, i))
        })
        .sum()
}

#[cfg(not(feature = "std"))]
fn mc_hits(s: &IntervalUnion, rho: f64, pairs: u64, seed: u64) -> u64 {
    let chunks = pairs.div_ceil(MC_CHUNK);
    (0..chunks)
        .map(|i| {
            let n = MC_CHUNK.min(pairs - i * MC_CHUNK);
            mc_chunk_hits(s, rho, n, mc_seed_for(seed, i))
        })
        .sum()
}

/// Noise stability of `s` at correlation `rho`.
pub fn noise_stability(
    s: &IntervalUnion,
    rho: f64,
    method: StabilityMethod,
    spec: &QuadratureSpec,
) -> Result<Integral> {
    check_rho_open(rho)?;
    match method {
        StabilityMethod::Quadrature => {
            integrate_union(&|x| ou_indicator(s, rho, x).expect("rho validated").value, s, spec)
        }
        StabilityMethod::Mehler { terms } => {
            if !(math::abs(rho) < 0.95) {
                return Err(Error::Domain(alloc::format!(
                    "the series evaluator needs |rho| < 0.95, got {rho}"
                )));
            }
            if terms > 400 {
                return Err(Error::Domain(alloc::format!(
                    "series truncation {terms} exceeds the supported maximum 400"
                )));
            }
            let b = band_coefficients(s, terms);
            let mut value = 0.0f64;
            let mut rho_pow = 1.0f64;
            for bk in &b {
                value += rho_pow * bk * bk;
                rho_pow *= rho;
            }
            Ok(Integral {
                value,
                error_estimate: math::abs(rho_pow) * s.measure(),
            })
        }
        StabilityMethod::MonteCarlo { pairs, seed } => {
            if pairs == 0 {
                return Err(Error::Domain("pair count must be positive".to_string()));
            }
            let hits = mc_hits(s, rho, pairs, seed);
            let p = hits as f64 / pairs as f64;
            Ok(Integral {
                value: p,
                error_estimate: math::sqrt(p * (1.0 - p) / pairs as f64),
            })
        }
    }
}

/// ∫ Φ((β·sgn·x − α)/√(1−β²)) γ₁ over `s`.
pub(crate) fn phi_profile_integral(
    s: &IntervalUnion,
    beta: f64,
    alpha: f64,
    sgn: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let scale = math::sqrt(1.0 - beta * beta);
    Ok(integrate_union(&|x| phi((beta * sgn * x - alpha) / scale), s, spec)?.value)
}

/// a₀ with the profile oriented along sign(barycenter). A set with zero
/// barycenter is accepted only when the two orientations agree (symmetric
/// integrand); otherwise the direction is genuinely ambiguous.
pub(crate) fn a0_value(s: &IntervalUnion, beta: f64, alpha: f64, spec: &QuadratureSpec) -> Result<f64> {
    let z = s.barycenter();
    if z != 0.0 {
        return phi_profile_integral(s, beta, alpha, if z > 0.0 { 1.0 } else { -1.0 }, spec);
    }
    let plus = phi_profile_integral(s, beta, alpha, 1.0, spec)?;
    let minus = phi_profile_integral(s, beta, alpha, -1.0, spec)?;
    if math::abs(plus - minus) <= 1e-9 {
        Ok(0.5 * (plus + minus))
    } else {
        Err(Error::Alignment(
            "the barycenter is zero and the profile orientation is ambiguous".to_string(),
        ))
    }
}

/// (a₀, ζ): the Φ-profile mass of `s` and the perpendicular first-variation
/// coefficient, which vanishes for product sets. ζ is confirmed by an
/// explicit two-factor quadrature of the perpendicular integrand rather
/// than assumed zero.
pub fn a0_and_zeta(s: &IntervalUnion, beta: f64, a: f64) -> Result<(f64, f64)> {
    check_unit_interval("beta", beta)?;
    check_unit_interval("a", a)?;
    let alpha = -phi_inv(a)?;
    let spec = QuadratureSpec::default_spec();
    let a0 = a0_value(s, beta, alpha, &spec)?;

    let z = s.barycenter();
    let sgn = if z >= 0.0 { 1.0 } else { -1.0 };
    let scale = math::sqrt(1.0 - beta * beta);
    // ζ factorizes over s × R: a parallel factor against γ₁ on s and the
    // perpendicular first moment ∫ y γ₁(y) dy, which kills the product.
    let parallel = integrate_union(
        &|x| gaussian_density((beta * sgn * x - alpha) / scale) * beta / scale,
        s,
        &spec,
    )?
    .value;
    let perp = integrate_gaussian(|y| y, &spec)?.value;
    let divisor = if z == 0.0 { 1.0 } else { math::abs(z) };
    Ok((a0, parallel * perp / divisor))
}

/// η for a profile of slope `beta`: ∫ Φ((β·sgn(z)·x − α)/√(1−β²))·(1_h − 1_s) γ₁.
pub fn eta_penalty(s: &IntervalUnion, h: HalfSpace1D, beta: f64, a: f64) -> Result<f64> {
    check_unit_interval("beta", beta)?;
    check_unit_interval("a", a)?;
    if math::abs(s.measure() - a) > MEASURE_TOL {
        return Err(Error::Precondition(alloc::format!(
            "set measure {} differs from a = {a}",
            s.measure()
        )));
    }
    if math::abs(h.measure() - a) > MEASURE_TOL {
        return Err(Error::Precondition(alloc::format!(
            "half-space measure {} differs from a = {a}",
            h.measure()
        )));
    }
    let z = s.barycenter();
    if z == 0.0 {
        return Err(Error::Alignment(
            "the set barycenter is zero; no orientation for the profile".to_string(),
        ));
    }
    let aligned = match h.side {
        RaySide::RightRay => z > 0.0,
        RaySide::LeftRay => z < 0.0,
    };
    if !aligned {
        return Err(Error::Alignment(
            "the half space must point along the set barycenter".to_string(),
        ));
    }
    let alpha = -phi_inv(a)?;
    let sgn = if z > 0.0 { 1.0 } else { -1.0 };
    let scale = math::sqrt(1.0 - beta * beta);
    let f = |x: f64| phi((beta * sgn * x - alpha) / scale);
    let spec = QuadratureSpec::default_spec();
    let over_h = integrate_union(&f, &h.to_union(), &spec)?.value;
    let over_s = integrate_union(&f, s, &spec)?.value;
    Ok(over_h - over_s)
}

/// Stability loss against the matched half space at the same measure.
pub fn deficit(s: &IntervalUnion, rho: f64, a: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Domain(alloc::format!(
            "the deficit is defined for rho in (0,1), got {rho}"
        )));
    }
    check_unit_interval("a", a)?;
    if math::abs(s.measure() - a) > MEASURE_TOL {
        return Err(Error::Precondition(alloc::format!(
            "set measure {} differs from a = {a}",
            s.measure()
        )));
    }
    let h = halfspace_with_measure(a, true)?.to_union();
    let spec = QuadratureSpec::default_spec();
    let ns_h = noise_stability(&h, rho, StabilityMethod::Quadrature, &spec)?.value;
    let ns_s = noise_stability(s, rho, StabilityMethod::Quadrature, &spec)?.value;
    Ok(ns_h - ns_s)
}

/// Deficit bounds for one set: δ against 2η_ρ from above and the
/// constant·η_β product from below, in both published exponent
/// conventions, plus the specialized a = 1/2, β = ρ constant when it
/// applies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeficitReport {
    pub delta: f64,
    pub eta_beta: f64,
    pub eta_rho: f64,
    pub a: f64,
    pub rho: f64,
    pub beta: f64,
    pub z: f64,
    /// Constant with the e^{−α²·max(1, β/(ρ−β))} convention.
    pub lower_constant: f64,
    /// Constant with the e^{−α²·max(0, β/(ρ−β)−1)} convention.
    pub lower_constant_alt: f64,
    pub upper_ok: bool,
    pub lower_ok: bool,
    pub lower_ok_alt: bool,
    /// 10⁻⁹ρ²z₀²(1−ρ²)², defined only at a = 1/2 with β = ρ.
    pub specialized_constant: Option<f64>,
    pub specialized_ok: Option<bool>,
}

/// e^{−α²·arg}, with the α = 0 case pinned to 1 even when arg is infinite.
fn damp(alpha: f64, arg: f64) -> f64 {
    if alpha == 0.0 {
        1.0
    } else {
        math::exp(-alpha * alpha * arg)
    }
}

pub fn deficit_report(
    s: &IntervalUnion,
    rho: f64,
    beta: f64,
    a: f64,
    z0: f64,
) -> Result<DeficitReport> {
    if !(rho > 0.0 && rho < 1.0) || !(beta > 0.0 && beta <= rho) {
        return Err(Error::Domain(alloc::format!(
            "need 0 < beta <= rho < 1, got beta = {beta}, rho = {rho}"
        )));
    }
    if !(z0 > 0.0) {
        return Err(Error::Domain(alloc::format!(
            "z0 = {z0} must be positive"
        )));
    }
    let z = s.barycenter();
    if math::abs(z) < z0 {
        return Err(Error::Precondition(alloc::format!(
            "|barycenter| = {} is below the floor z0 = {z0}",
            math::abs(z)
        )));
    }
    let delta = deficit(s, rho, a)?;
    let h = halfspace_with_measure(a, z > 0.0)?;
    let eta_beta = eta_penalty(s, h, beta, a)?;
    let eta_rho = eta_penalty(s, h, rho, a)?;
    let alpha = -phi_inv(a)?;

    let ratio = beta / (rho - beta);
    let shared = 1e-7 * a * z0 * z0 / ((6.0 + math::abs(alpha)) * (6.0 + math::abs(alpha)))
        * rho
        * (1.0 - rho)
        * (1.0 - rho)
        * beta
        * (1.0 - beta * beta)
        * a
        * (1.0 - a);
    let lower_constant = shared * damp(alpha, ratio.max(1.0));
    let lower_constant_alt = shared * damp(alpha, (ratio - 1.0).max(0.0));

    let (specialized_constant, specialized_ok) =
        if math::abs(a - 0.5) <= 1e-12 && beta == rho {
            let c = 1e-9 * rho * rho * z0 * z0 * (1.0 - rho * rho) * (1.0 - rho * rho);
            (Some(c), Some(c * eta_rho <= delta + INEQ_TOL))
        } else {
            (None, None)
        };

    Ok(DeficitReport {
        delta,
        eta_beta,
        eta_rho,
        a,
        rho,
        beta,
        z,
        lower_constant,
        lower_constant_alt,
        upper_ok: delta <= 2.0 * eta_rho + INEQ_TOL,
        lower_ok: lower_constant * eta_beta <= delta + INEQ_TOL,
        lower_ok_alt: lower_constant_alt * eta_beta <= delta + INEQ_TOL,
        specialized_constant,
        specialized_ok,
    })
}

/// Which penalty the objective subtracts from noise stability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyKind {
    None,
    /// ε·a₀² with the measure held at `a` exactly.
    PhiSquared,
    /// ε·a₀² plus the soft volume term 2(1+|α|)|γ₁(s)−a|.
    PhiSquaredWithVolume,
    /// ε·(barycenter)².
    BarycenterSquared,
}

/// Parameters of a penalized stability objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub rho: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub a: f64,
    pub penalty: PenaltyKind,
}

impl ObjectiveSpec {
    pub fn new(rho: f64, beta: f64, epsilon: f64, a: f64, penalty: PenaltyKind) -> Result<Self> {
        let spec = Self {
            rho,
            beta,
            epsilon,
            a,
            penalty,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_rho_open(self.rho)?;
        if !(self.rho > 0.0) {
            return Err(Error::Domain(alloc::format!(
                "objective correlation must be positive, got {}",
                self.rho
            )));
        }
        if !(self.beta > 0.0 && self.beta <= self.rho) {
            return Err(Error::Domain(alloc::format!(
                "need 0 < beta <= rho, got beta = {}, rho = {}",
                self.beta,
                self.rho
            )));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Domain(alloc::format!(
                "epsilon = {} must be finite and nonnegative",
                self.epsilon
            )));
        }
        check_unit_interval("a", self.a)
    }

    /// α = −Φ⁻¹(a).
    pub fn alpha(&self) -> Result<f64> {
        Ok(-phi_inv(self.a)?)
    }
}

/// Noise stability minus the configured penalty.
pub fn objective(s: &IntervalUnion, spec: &ObjectiveSpec) -> Result<f64> {
    spec.validate()?;
    let qspec = QuadratureSpec::default_spec();
    let ns = noise_stability(s, spec.rho, StabilityMethod::Quadrature, &qspec)?.value;
    let alpha = spec.alpha()?;
    match spec.penalty {
        PenaltyKind::None => Ok(ns),
        PenaltyKind::PhiSquared => {
            if math::abs(s.measure() - spec.a) > MEASURE_TOL {
                return Err(Error::Precondition(alloc::format!(
                    "hard measure constraint: {} differs from a = {}",
                    s.measure(),
                    spec.a
                )));
            }
            let a0 = a0_value(s, spec.beta, alpha, &qspec)?;
            Ok(ns - spec.epsilon * a0 * a0)
        }
        PenaltyKind::PhiSquaredWithVolume => {
            let a0 = a0_value(s, spec.beta, alpha, &qspec)?;
            let volume = 2.0 * (1.0 + math::abs(alpha)) * math::abs(s.measure() - spec.a);
            Ok(ns - spec.epsilon * a0 * a0 - volume)
        }
        PenaltyKind::BarycenterSquared => {
            let z = s.barycenter();
            Ok(ns - spec.epsilon * z * z)
        }
    }
}
