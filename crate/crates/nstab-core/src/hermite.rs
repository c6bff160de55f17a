//! Hermite polynomials in two normalizations, the Mehler kernel, and
//! spectral expansions of the three penalty profiles with decay envelopes.
//!
//! `hermite_eval` returns h_k with generating function e^{λx−λ²/2}, so
//! h_k = He_k/k! and d/dx h_{k+1} = h_k. All series coefficients live in
//! the orthonormal system ê_k = h_k·√(k!), where ∫ ê_j ê_k γ₁ = 1_{j=k}.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::phi;
use crate::math;
use crate::quad;

/// Degree guard: past this the k!-scaled arithmetic loses all precision.
const MAX_ORDER: usize = 400;

/// Node count for projection quadrature; exact through degree 999, which
/// covers ê_400 against any of the (entire) expansion targets.
const PROJECTION_NODES: usize = 500;

fn check_order(k: usize) -> Result<()> {
    if k > MAX_ORDER {
        return Err(Error::Domain(alloc::format!(
            "order {k} exceeds the supported maximum {MAX_ORDER}"
        )));
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain(alloc::format!(
            "beta = {beta} must lie in (0,1)"
        )));
    }
    Ok(())
}

/// h_k(x): h_0 = 1, h_1 = x, h_{k+1} = (x·h_k − h_{k−1})/(k+1).
pub fn hermite_eval(k: usize, x: f64) -> Result<f64> {
    check_order(k)?;
    if !x.is_finite() {
        return Err(Error::Domain("hermite_eval needs finite x".to_string()));
    }
    let mut prev = 1.0f64;
    if k == 0 {
        return Ok(prev);
    }
    let mut cur = x;
    for j in 1..k {
        let next = (x * cur - prev) / (j as f64 + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// ê_0(x)..ê_n(x): ê_{k+1} = (x·ê_k − √k·ê_{k−1})/√(k+1).
pub(crate) fn orthonormal_values(x: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    out.push(x);
    for k in 1..n {
        let kf = k as f64;
        let next = (x * out[k] - math::sqrt(kf) * out[k - 1]) / math::sqrt(kf + 1.0);
        out.push(next);
    }
    out
}

/// Σ_{k≤trunc} ρ^k ê_k(x) ê_k(y) · e^{−(x²+y²)/2}.
pub fn mehler_kernel_1d(rho: f64, x: f64, y: f64, trunc: usize) -> Result<f64> {
    if !(rho > -1.0 && rho < 1.0) {
        return Err(Error::Domain(alloc::format!(
            "rho = {rho} must lie in (-1,1)"
        )));
    }
    if !(math::abs(x) <= 10.0 && math::abs(y) <= 10.0) {
        return Err(Error::Domain(
            "mehler_kernel_1d is restricted to |x|,|y| <= 10".to_string(),
        ));
    }
    check_order(trunc)?;
    let ex = orthonormal_values(x, trunc);
    let ey = orthonormal_values(y, trunc);
    let mut acc = 0.0f64;
    let mut rho_pow = 1.0f64;
    for k in 0..=trunc {
        // The product ex*ey is formed first so the sum is exactly
        // symmetric under swapping x and y.
        acc += rho_pow * (ex[k] * ey[k]);
        rho_pow *= rho;
    }
    Ok(acc * math::exp(-0.5 * (x * x + y * y)))
}

/// Limit of the truncated kernel: (1−ρ²)^{−1/2} e^{(−x²−y²+2ρxy)/(2(1−ρ²))}.
pub fn mehler_closed_form(rho: f64, x: f64, y: f64) -> Result<f64> {
    if !(rho > -1.0 && rho < 1.0) {
        return Err(Error::Domain(alloc::format!(
            "rho = {rho} must lie in (-1,1)"
        )));
    }
    let one_m = 1.0 - rho * rho;
    Ok(math::exp((-x * x - y * y + 2.0 * rho * x * y) / (2.0 * one_m)) / math::sqrt(one_m))
}

/// Which of the three penalty profiles a series expands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionKind {
    /// Φ((βx−α)/√(1−β²)).
    PhiExpansion,
    /// (1−β²)^{−1/2} e^{−(βx−α)²/(2(1−β²))}.
    GaussianExpansion,
    /// β(1−β²)^{−3/2}(α−βx) e^{−(βx−α)²/(2(1−β²))}, the x-derivative of
    /// the Gaussian profile above.
    GaussianDerivativeExpansion,
}

/// Coefficients c_0..c_N against the orthonormal system ê_k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermiteSeries {
    pub beta: f64,
    pub alpha: f64,
    pub kind: ExpansionKind,
    pub coeffs: Vec<f64>,
}

impl HermiteSeries {
    pub fn truncation_order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// L²(γ₁) norm of the truncated series, √(Σ c_k²).
    pub fn l2_norm(&self) -> f64 {
        let mut acc = 0.0f64;
        for c in &self.coeffs {
            acc += c * c;
        }
        math::sqrt(acc)
    }

    /// Σ c_k ê_k(x).
    pub fn eval(&self, x: f64) -> f64 {
        let e = orthonormal_values(x, self.truncation_order());
        let mut acc = 0.0f64;
        for (c, v) in self.coeffs.iter().zip(e.iter()) {
            acc += c * v;
        }
        acc
    }
}

/// c_k = ∫ target·ê_k γ₁ for k = 0..n, one pass over a fixed rule.
fn project<F: Fn(f64) -> f64>(target: F, n: usize) -> Result<Vec<f64>> {
    let (nodes, weights) = quad::gauss_hermite_nodes(PROJECTION_NODES)?;
    let mut coeffs = vec![0.0f64; n + 1];
    for (&x, &w) in nodes.iter().zip(weights.iter()) {
        let t = w * target(x);
        let mut prev = 0.0f64;
        let mut cur = 1.0f64;
        coeffs[0] += t;
        for k in 0..n {
            let kf = k as f64;
            let next = (x * cur - math::sqrt(kf) * prev) / math::sqrt(kf + 1.0);
            prev = cur;
            cur = next;
            coeffs[k + 1] += t * cur;
        }
    }
    Ok(coeffs)
}

fn check_expansion_args(beta: f64, alpha: f64, n: usize) -> Result<()> {
    check_beta(beta)?;
    check_order(n)?;
    if !alpha.is_finite() {
        return Err(Error::Domain("alpha must be finite".to_string()));
    }
    Ok(())
}

/// Expansion of Φ((βx−α)/√(1−β²)). The constant term is Φ(−α), which the
/// projection pins down; c_1 = (β/√(2π))e^{−α²/2}.
pub fn expand_phi_penalty(beta: f64, alpha: f64, n: usize) -> Result<HermiteSeries> {
    check_expansion_args(beta, alpha, n)?;
    let scale = math::sqrt(1.0 - beta * beta);
    let coeffs = project(|x| phi((beta * x - alpha) / scale), n)?;
    Ok(HermiteSeries {
        beta,
        alpha,
        kind: ExpansionKind::PhiExpansion,
        coeffs,
    })
}

/// Expansion of (1−β²)^{−1/2} e^{−(βx−α)²/(2(1−β²))}; c'_0 = e^{−α²/2},
/// c'_1 = αβ e^{−α²/2}.
pub fn expand_gaussian_bump(beta: f64, alpha: f64, n: usize) -> Result<HermiteSeries> {
    check_expansion_args(beta, alpha, n)?;
    let one_m = 1.0 - beta * beta;
    let coeffs = project(
        |x| {
            let u = beta * x - alpha;
            math::exp(-u * u / (2.0 * one_m)) / math::sqrt(one_m)
        },
        n,
    )?;
    Ok(HermiteSeries {
        beta,
        alpha,
        kind: ExpansionKind::GaussianExpansion,
        coeffs,
    })
}

/// Expansion of the x-derivative of the Gaussian profile,
/// β(1−β²)^{−3/2}(α−βx) e^{−(βx−α)²/(2(1−β²))}; c''_0 = βα e^{−α²/2},
/// c''_1 = β²(α²−1) e^{−α²/2}.
pub fn expand_gaussian_derivative(beta: f64, alpha: f64, n: usize) -> Result<HermiteSeries> {
    check_expansion_args(beta, alpha, n)?;
    let one_m = 1.0 - beta * beta;
    let norm = beta / (one_m * math::sqrt(one_m));
    let coeffs = project(
        |x| {
            let u = beta * x - alpha;
            norm * (alpha - beta * x) * math::exp(-u * u / (2.0 * one_m))
        },
        n,
    )?;
    Ok(HermiteSeries {
        beta,
        alpha,
        kind: ExpansionKind::GaussianDerivativeExpansion,
        coeffs,
    })
}

/// Geometric decay bound for expansion coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEnvelope {
    pub beta: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub kind: ExpansionKind,
}

impl CoefficientEnvelope {
    pub fn new(beta: f64, lambda: f64, alpha: f64, kind: ExpansionKind) -> Result<Self> {
        check_beta(beta)?;
        if !(lambda > 0.0 && lambda <= beta) {
            return Err(Error::Domain(alloc::format!(
                "lambda = {lambda} must lie in (0, beta]"
            )));
        }
        if !alpha.is_finite() {
            return Err(Error::Domain("alpha must be finite".to_string()));
        }
        Ok(Self {
            beta,
            lambda,
            alpha,
            kind,
        })
    }

    /// (β+λ)^k e^{α²·max(0, β/(2λ) − 1/2)}, times √k for the derivative kind.
    pub fn bound(&self, k: usize) -> f64 {
        let amp = math::exp(
            self.alpha * self.alpha * (self.beta / (2.0 * self.lambda) - 0.5).max(0.0),
        );
        let base = math::powi(self.beta + self.lambda, k as i32) * amp;
        match self.kind {
            ExpansionKind::GaussianDerivativeExpansion => base * math::sqrt(k as f64),
            _ => base,
        }
    }

    /// First index the bound claims to cover: the Φ expansion's c_0, c_1 and
    /// the Gaussian expansions' c_0 carry separate closed forms.
    pub fn min_index(&self) -> usize {
        match self.kind {
            ExpansionKind::PhiExpansion => 2,
            _ => 1,
        }
    }
}

/// Outcome of checking a series against its envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub pass: bool,
    pub first_violation: Option<usize>,
    pub checked_from: usize,
    pub checked_to: usize,
}

/// Verifies |c_k| ≤ bound(k) for k ≥ min_index over the full stored order.
pub fn check_envelope(series: &HermiteSeries, env: &CoefficientEnvelope) -> Result<EnvelopeReport> {
    if series.beta != env.beta || series.alpha != env.alpha {
        return Err(Error::Precondition(alloc::format!(
            "series (beta, alpha) = ({}, {}) but envelope has ({}, {})",
            series.beta,
            series.alpha,
            env.beta,
            env.alpha
        )));
    }
    let from = env.min_index();
    let to = series.truncation_order();
    let mut first_violation = None;
    for k in from..=to {
        if math::abs(series.coeffs[k]) > env.bound(k) {
            first_violation = Some(k);
            break;
        }
    }
    Ok(EnvelopeReport {
        pass: first_violation.is_none(),
        first_violation,
        checked_from: from,
        checked_to: to,
    })
}
