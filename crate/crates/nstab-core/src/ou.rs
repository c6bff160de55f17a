//! The Ornstein-Uhlenbeck operator on indicator functions of interval
//! unions: closed-form values and spatial derivatives, a quadrature
//! semigroup check, and the heat-equation residual in the correlation
//! parameter.

use alloc::borrow::ToOwned;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::{gaussian_density, phi};
use crate::math;
use crate::quad::{integrate_gaussian, QuadratureSpec};
use crate::sets::IntervalUnion;

/// T_ρ1_s at one point, with the spatial derivative and the identity of the
/// evaluated set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OUEvaluation {
    pub rho: f64,
    /// T_ρ1_s(x), clamped to [0, 1].
    pub value: f64,
    /// ∂/∂x T_ρ1_s(x).
    pub derivative: f64,
    /// `IntervalUnion::identity_hash` of the evaluated set.
    pub set_hash: u64,
}

fn check_rho_open(rho: f64) -> Result<()> {
    if !(rho > -1.0 && rho < 1.0) {
        return Err(Error::Domain(alloc::format!(
            "correlation must satisfy |rho| < 1, got {rho}"
        )));
    }
    Ok(())
}

/// T_ρ1_s(x) = Σ_i [Φ((hi_i-ρx)/√(1-ρ²)) - Φ((lo_i-ρx)/√(1-ρ²))] together
/// with its x-derivative.
pub fn ou_indicator(s: &IntervalUnion, rho: f64, x: f64) -> Result<OUEvaluation> {
    check_rho_open(rho)?;
    let set_hash = s.identity_hash();
    if rho == 0.0 {
        return Ok(OUEvaluation {
            rho,
            value: s.measure(),
            derivative: 0.0,
            set_hash,
        });
    }
    let root = math::sqrt(1.0 - rho * rho);
    let mut value = 0.0f64;
    let mut derivative = 0.0f64;
    for &(lo, hi) in s.components() {
        let u_lo = if lo.is_infinite() {
            f64::NEG_INFINITY
        } else {
            (lo - rho * x) / root
        };
        let u_hi = if hi.is_infinite() {
            f64::INFINITY
        } else {
            (hi - rho * x) / root
        };
        value += phi(u_hi) - phi(u_lo);
        derivative += gaussian_density(u_lo) - gaussian_density(u_hi);
    }
    Ok(OUEvaluation {
        rho,
        value: value.clamp(0.0, 1.0),
        derivative: derivative * rho / root,
        set_hash,
    })
}

/// ∂²/∂x² T_ρ1_s(x), from differentiating the kernel once more.
pub(crate) fn ou_second_derivative(s: &IntervalUnion, rho: f64, x: f64) -> Result<f64> {
    check_rho_open(rho)?;
    if rho == 0.0 {
        return Ok(0.0);
    }
    let root2 = 1.0 - rho * rho;
    let root = math::sqrt(root2);
    let mut acc = 0.0f64;
    for &(lo, hi) in s.components() {
        if lo.is_finite() {
            let u = (lo - rho * x) / root;
            acc += u * gaussian_density(u);
        }
        if hi.is_finite() {
            let u = (hi - rho * x) / root;
            acc -= u * gaussian_density(u);
        }
    }
    Ok(acc * rho * rho / root2)
}

/// ∂/∂ρ T_ρ1_s(x), analytic: d/dρ of each substituted endpoint is
/// (ρt - x)/(1-ρ²)^{3/2}.
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn ou_rho_derivative(s: &IntervalUnion, rho: f64, x: f64) -> Result<f64> {
    check_rho_open(rho)?;
    let root2 = 1.0 - rho * rho;
    let scale = root2 * math::sqrt(root2);
    let mut acc = 0.0f64;
    for &(lo, hi) in s.components() {
        if hi.is_finite() {
            let u = (hi - rho * x) / math::sqrt(root2);
            acc += gaussian_density(u) * (rho * hi - x) / scale;
        }
        if lo.is_finite() {
            let u = (lo - rho * x) / math::sqrt(root2);
            acc -= gaussian_density(u) * (rho * lo - x) / scale;
        }
    }
    Ok(acc)
}

/// |T_{ρ1}(T_{ρ2}1_s)(x) - T_{ρ1ρ2}1_s(x)|, with the outer application done
/// by quadrature against the Gaussian increment.
pub fn semigroup_check(
    s: &IntervalUnion,
    rho1: f64,
    rho2: f64,
    x: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(rho1 > 0.0 && rho1 < 1.0 && rho2 > 0.0 && rho2 < 1.0) {
        return Err(Error::Domain(
            "semigroup check requires rho1, rho2 in (0,1)".to_owned(),
        ));
    }
    let root1 = math::sqrt(1.0 - rho1 * rho1);
    let inner = |u: f64| {
        ou_indicator(s, rho2, rho1 * x + root1 * u)
            .expect("rho2 validated above")
            .value
    };
    let outer = integrate_gaussian(inner, spec)?;
    let direct = ou_indicator(s, rho1 * rho2, x)?;
    Ok(math::abs(outer.value - direct.value))
}

/// Residual of the correlation-parameter heat equation
/// dT_ρ/dρ = (1/ρ)(-∂²_x + x ∂_x) T_ρ1_s(x), with the left side formed by a
/// central difference of step `h` and the right side analytic.
pub fn heat_equation_residual(s: &IntervalUnion, rho: f64, x: f64, h: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Domain("heat check requires rho in (0,1)".to_owned()));
    }
    if !(h > 0.0) || rho - h <= 0.0 || rho + h >= 1.0 {
        return Err(Error::Domain(alloc::format!(
            "step h = {h} must keep rho±h inside (0,1)"
        )));
    }
    let plus = ou_indicator(s, rho + h, x)?.value;
    let minus = ou_indicator(s, rho - h, x)?.value;
    let fd = (plus - minus) / (2.0 * h);
    let eval = ou_indicator(s, rho, x)?;
    let second = ou_second_derivative(s, rho, x)?;
    let rhs = (-second + x * eval.derivative) / rho;
    Ok(math::abs(fd - rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::IntervalUnion;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(s: &str) -> IntervalUnion {
        s.parse().unwrap()
    }

    #[test]
    fn full_line_and_independent_cases() {
        let full = IntervalUnion::full_line();
        let e = ou_indicator(&full, 0.7, 1.3).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.derivative, 0.0);

        let s = set("(-inf,-0.25];[1,3]");
        let e = ou_indicator(&s, 0.0, 2.0).unwrap();
        assert!((e.value - s.measure()).abs() < 1e-15);
        assert_eq!(e.derivative, 0.0);

        assert!(ou_indicator(&s, 1.0, 0.0).is_err());
        assert!(ou_indicator(&s, -1.0, 0.0).is_err());
    }

    #[test]
    fn halfspace_at_origin_fixed_point() {
        // For s = (-inf,0], T_ρ1_s(0) = Φ(0) = 1/2 at every correlation.
        let s = set("(-inf,0]");
        let e = ou_indicator(&s, 0.5, 0.0).unwrap();
        assert!((e.value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn value_against_monte_carlo() {
        let s = set("(-inf,0]");
        let (rho, x) = (0.5, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let n = 1_000_000usize;
        let mut hits = 0usize;
        let root = (1.0f64 - rho * rho).sqrt();
        for _ in 0..n {
            let z: f64 = rng.sample(rand_distr::StandardNormal);
            if s.contains(rho * x + root * z) {
                hits += 1;
            }
        }
        let p = hits as f64 / n as f64;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        let exact = ou_indicator(&s, rho, x).unwrap().value;
        assert!(
            (p - exact).abs() < 3.0 * sigma + 1e-9,
            "MC {p} vs exact {exact} (sigma {sigma})"
        );
    }

    #[test]
    fn complement_and_monotonicity() {
        let s = set("[-0.5,0.25];[1,2.5]");
        let c = s.complement();
        let wider = set("[-0.5,0.25];[0.8,2.5]");
        let mut u = -3.0;
        while u <= 3.0 {
            let a = ou_indicator(&s, 0.6, u).unwrap().value;
            let b = ou_indicator(&c, 0.6, u).unwrap().value;
            assert!((a + b - 1.0).abs() < 1e-13);
            let w = ou_indicator(&wider, 0.6, u).unwrap().value;
            assert!(w >= a - 1e-13);
            u += 0.25;
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let sets = ["(-inf,0]", "[0.5,2]", "(-inf,-1];[0,1];[2,inf)"];
        for text in sets {
            let s = set(text);
            for _ in 0..20 {
                let x: f64 = rng.random_range(-3.0..3.0);
                let rho: f64 = rng.random_range(-0.9..0.9);
                if rho.abs() < 1e-3 {
                    continue;
                }
                let h = 1e-5;
                let f = |t: f64| ou_indicator(&s, rho, t).unwrap().value;
                let fd = (f(x + h) - f(x - h)) / (2.0 * h);
                let an = ou_indicator(&s, rho, x).unwrap().derivative;
                assert!(
                    (fd - an).abs() < 1e-8,
                    "set {text}, rho {rho}, x {x}: fd {fd} vs analytic {an}"
                );
            }
        }
    }

    #[test]
    fn second_derivative_matches_finite_difference() {
        let s = set("[-1,0.5];[1.5,inf)");
        for &(rho, x) in &[(0.4, 0.3), (0.7, -1.1), (0.2, 2.0)] {
            let h = 1e-5;
            let d = |t: f64| ou_indicator(&s, rho, t).unwrap().derivative;
            let fd = (d(x + h) - d(x - h)) / (2.0 * h);
            let an = ou_second_derivative(&s, rho, x).unwrap();
            assert!((fd - an).abs() < 1e-7, "rho {rho}, x {x}");
        }
    }

    #[test]
    fn rho_derivative_matches_finite_difference() {
        let s = set("(-inf,0.2];[1,2]");
        for &(rho, x) in &[(0.5, 0.7), (0.3, -0.4), (0.8, 1.5)] {
            let h = 1e-5;
            let f = |r: f64| ou_indicator(&s, r, x).unwrap().value;
            let fd = (f(rho + h) - f(rho - h)) / (2.0 * h);
            let an = ou_rho_derivative(&s, rho, x).unwrap();
            assert!((fd - an).abs() < 1e-8, "rho {rho}, x {x}");
        }
    }

    #[test]
    fn semigroup_residual_is_small() {
        let spec = QuadratureSpec::default_spec();
        let s = set("(-inf,0]");
        let r = semigroup_check(&s, 0.9, 0.9, 0.3, &spec).unwrap();
        assert!(r < 1e-9, "residual {r}");

        let full = IntervalUnion::full_line();
        let r = semigroup_check(&full, 0.5, 0.7, -1.0, &spec).unwrap();
        assert!(r < 1e-12);

        let multi = set("[-2,-1];[0,0.5];[1.5,inf)");
        let r = semigroup_check(&multi, 0.6, 0.8, 0.9, &spec).unwrap();
        assert!(r < 1e-9, "residual {r}");
    }

    #[test]
    fn heat_equation_residuals() {
        let s = set("(-inf,0]");
        let r = heat_equation_residual(&s, 0.5, 0.7, 1e-4).unwrap();
        assert!(r < 1e-6, "residual {r}");

        let sym = set("[-1,1]");
        let r = heat_equation_residual(&sym, 0.5, 0.0, 1e-4).unwrap();
        assert!(r < 1e-6, "residual {r}");

        let full = IntervalUnion::full_line();
        let r = heat_equation_residual(&full, 0.5, 0.3, 1e-4).unwrap();
        assert_eq!(r, 0.0);

        assert!(heat_equation_residual(&s, 0.5, 0.0, 0.6).is_err());
    }

    #[test]
    fn evaluation_carries_set_identity() {
        let s = set("[0,1]");
        let t = set("[0,1.0000001]");
        let es = ou_indicator(&s, 0.5, 0.0).unwrap();
        let et = ou_indicator(&t, 0.5, 0.0).unwrap();
        assert_eq!(es.set_hash, s.identity_hash());
        assert_ne!(es.set_hash, et.set_hash);
    }
}
