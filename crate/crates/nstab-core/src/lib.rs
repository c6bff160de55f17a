//! Numerical toolkit for Gaussian noise stability in one dimension.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod error;
pub mod functionals;
pub mod gauss;
pub mod hermite;
mod linalg;
mod math;
pub mod optimizer;
pub mod ou;
pub mod quad;
pub mod sampling;
pub mod sets;
pub mod variational;

pub use error::Error;
pub use functionals::{
    a0_and_zeta, deficit, deficit_report, eta_penalty, noise_stability, objective, DeficitReport,
    ObjectiveSpec, PenaltyKind, StabilityMethod,
};
pub use gauss::{gaussian_density, gaussian_moment, phi, phi_inv, GaussianMoment};
pub use hermite::{
    check_envelope, expand_gaussian_bump, expand_gaussian_derivative, expand_phi_penalty,
    hermite_eval, mehler_closed_form, mehler_kernel_1d, CoefficientEnvelope, EnvelopeReport,
    ExpansionKind, HermiteSeries,
};
pub use optimizer::{epsilon_cap, maximize, EpsilonCap, SearchConfig, SearchResult};
pub use ou::{heat_equation_residual, ou_indicator, semigroup_check, OUEvaluation};
pub use quad::{integrate_gaussian, integrate_gaussian_over, Integral, QuadratureSpec, Scheme};
pub use sets::{
    halfspace_with_measure, BoundaryPoint, HalfSpace1D, IntervalUnion, Normal, RaySide,
};
pub use variational::{
    first_variation_translation, halfspace_profile_h, level_residual, perimeter_gap_bounds,
    profile_epsilon_cap, s_operator, second_variation_max_direction,
    second_variation_translation, stability_form, translation_eigen_residual,
    PerimeterGapReport, ProfileKind, ProfileParams, StabilityForm, VariationReport,
};
