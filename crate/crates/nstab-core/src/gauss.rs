//! Scalar Gaussian primitives: density, CDF, inverse CDF, and interval
//! moments. Endpoints are plain `f64` with the usual IEEE infinities, so
//! rays and the full line need no special casing.

use alloc::borrow::ToOwned;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math;

/// Standard Gaussian density γ₁(x) = e^{-x²/2}/√(2π).
#[inline]
pub fn gaussian_density(x: f64) -> f64 {
    if x.is_infinite() {
        return 0.0;
    }
    math::INV_SQRT_2PI * math::exp(-0.5 * x * x)
}

/// Standard Gaussian CDF Φ(t) = γ₁(-∞, t], evaluated through the
/// complementary error function so both tails keep full relative accuracy.
#[inline]
pub fn phi(t: f64) -> f64 {
    if t == f64::NEG_INFINITY {
        return 0.0;
    }
    if t == f64::INFINITY {
        return 1.0;
    }
    0.5 * math::erfc(-t / math::SQRT_2)
}

/// Inverse Gaussian CDF on (0, 1).
///
/// Bisection brings the bracket down to width ~1e-2, then bracket-guarded
/// Newton steps (derivative γ₁) finish to full double precision.
pub fn phi_inv(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(alloc::format!(
            "phi_inv requires p in (0,1), got {p}"
        )));
    }
    let mut lo = -9.0f64;
    let mut hi = 9.0f64;
    // phi(-9) ~ 1.1e-19 and phi(9) ~ 1 - 1.1e-19 bracket every representable
    // p strictly inside (0,1) except subnormal tails, which clamp here.
    if p <= phi(lo) {
        return Ok(lo);
    }
    if p >= phi(hi) {
        return Ok(hi);
    }
    for _ in 0..11 {
        let mid = 0.5 * (lo + hi);
        let pm = phi(mid);
        if pm == p {
            return Ok(mid);
        }
        if pm < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    // Newton converges in a handful of steps almost everywhere, but for p a
    // few ulps from 0.5 the update keeps overshooting the bracket and the
    // loop degenerates to bisection, which needs the long budget to walk
    // the remaining ~1e-2 bracket down to the ulp staircase of phi.
    for _ in 0..64 {
        let err = phi(x) - p;
        if err == 0.0 {
            break;
        }
        if err > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let d = gaussian_density(x);
        let step = err / d;
        let next = x - step;
        x = if next >= lo && next <= hi {
            next
        } else {
            0.5 * (lo + hi)
        };
        if math::abs(step) < 1e-16 * (1.0 + math::abs(x))
            || hi - lo < 4.0 * f64::EPSILON * (1.0 + math::abs(x))
        {
            break;
        }
    }
    Ok(x)
}

/// Gaussian measure and first moment of one interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMoment {
    /// γ₁(lo, hi], in [0, 1].
    pub measure: f64,
    /// ∫_lo^hi x γ₁(x) dx.
    pub first_moment: f64,
}

/// Measure and first moment of `(lo, hi)`. The first moment uses the
/// antiderivative identity ∫_t^∞ x γ₁(x) dx = γ₁(t).
pub fn gaussian_moment(lo: f64, hi: f64) -> Result<GaussianMoment> {
    if lo.is_nan() || hi.is_nan() {
        return Err(Error::Domain("interval endpoint is NaN".to_owned()));
    }
    if lo > hi {
        return Err(Error::Domain(alloc::format!(
            "interval endpoints out of order: ({lo}, {hi})"
        )));
    }
    let measure = (phi(hi) - phi(lo)).max(0.0);
    let first_moment = gaussian_density(lo) - gaussian_density(hi);
    Ok(GaussianMoment {
        measure,
        first_moment,
    })
}
