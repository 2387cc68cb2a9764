//! Functional inequalities, decay fits and regularity diagnostics.

pub mod decay;
pub mod exponents;
pub mod forms;
pub mod inequalities;
pub mod regularity;

pub use decay::{fit_decay_exponent, DecayFit, FitWindow};
pub use exponents::{linear_rate, nash_exponent, rho_eps, theta_exponents, ExponentSet};
pub use forms::{bilinear_form, dirichlet_form_direct, dirichlet_form_spectral};
pub use inequalities::{
    converse_nash_check, generalized_sv_check, interpolation_check, nash_ratio, nash_sweep, stroock_varopoulos_check,
    ConverseReport, DecayCertificate, InterpolationReport, MarginReport, NashBranch, NashReport, NashSample, SvTriple,
};
pub use regularity::{decade_cutoffs, log_growth_rate, regularizing_diagnostic, RegularityReport, Verdict};
