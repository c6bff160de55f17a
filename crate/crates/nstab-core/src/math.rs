//! Scalar float routines routed through `std` intrinsics when available and
//! through `libm` otherwise. Everything downstream calls these shims so the
//! crate body stays identical across `std` and `no_std` builds.

#![allow(dead_code)]

pub(crate) const SQRT_2: f64 = core::f64::consts::SQRT_2;
pub(crate) const PI: f64 = core::f64::consts::PI;
pub(crate) const FRAC_PI_2: f64 = core::f64::consts::FRAC_PI_2;
/// 1/sqrt(2*pi), the standard Gaussian density at 0.
pub(crate) const INV_SQRT_2PI: f64 = 0.3989422804014326779399461;

#[cfg(feature = "std")]
mod imp {
    #[inline]
    pub fn exp(x: f64) -> f64 {
        x.exp()
    }
    #[inline]
    pub fn ln(x: f64) -> f64 {
        x.ln()
    }
    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        x.sqrt()
    }
    #[inline]
    pub fn abs(x: f64) -> f64 {
        x.abs()
    }
    #[inline]
    pub fn powi(x: f64, n: i32) -> f64 {
        x.powi(n)
    }
    #[inline]
    pub fn powf(x: f64, y: f64) -> f64 {
        x.powf(y)
    }
    #[inline]
    pub fn floor(x: f64) -> f64 {
        x.floor()
    }
    #[inline]
    pub fn cosh(x: f64) -> f64 {
        x.cosh()
    }
    #[inline]
    pub fn sinh(x: f64) -> f64 {
        x.sinh()
    }
    #[inline]
    pub fn tanh(x: f64) -> f64 {
        x.tanh()
    }
    #[inline]
    pub fn asin(x: f64) -> f64 {
        x.asin()
    }
    #[inline]
    pub fn hypot(x: f64, y: f64) -> f64 {
        x.hypot(y)
    }
    #[inline]
    pub fn copysign(x: f64, y: f64) -> f64 {
        x.copysign(y)
    }
}

#[cfg(not(feature = "std"))]
mod imp {
    #[inline]
    pub fn exp(x: f64) -> f64 {
        libm::exp(x)
    }
    #[inline]
    pub fn ln(x: f64) -> f64 {
        libm::log(x)
    }
    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }
    #[inline]
    pub fn abs(x: f64) -> f64 {
        libm::fabs(x)
    }
    #[inline]
    pub fn powi(x: f64, n: i32) -> f64 {
        libm::pow(x, n as f64)
    }
    #[inline]
    pub fn powf(x: f64, y: f64) -> f64 {
        libm::pow(x, y)
    }
    #[inline]
    pub fn floor(x: f64) -> f64 {
        libm::floor(x)
    }
    #[inline]
    pub fn cosh(x: f64) -> f64 {
        libm::cosh(x)
    }
    #[inline]
    pub fn sinh(x: f64) -> f64 {
        libm::sinh(x)
    }
    #[inline]
    pub fn tanh(x: f64) -> f64 {
        libm::tanh(x)
    }
    #[inline]
    pub fn asin(x: f64) -> f64 {
        libm::asin(x)
    }
    #[inline]
    pub fn hypot(x: f64, y: f64) -> f64 {
        libm::hypot(x, y)
    }
    #[inline]
    pub fn copysign(x: f64, y: f64) -> f64 {
        libm::copysign(x, y)
    }
}

pub(crate) use imp::*;

/// Complementary error function. `libm` is used on both build flavors since
/// the standard library does not provide one.
#[inline]
pub(crate) fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}
