//! Reaction-diffusion laboratory for two-species and m-species balance-law
//! systems, with a runtime polynomial Lyapunov monitor.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`]: cell-centred rectangular meshes, the ghost-cell Laplacian and
//!   midpoint quadrature.
//! * [`reactions`]: the parameterised reaction families, their validators and
//!   sign classification.
//! * [`lyapunov`]: θ-sequences, the functional `L(t) = ∫ H_p(u, v) dx`, the
//!   quadratic-form certificate and the discrete `dL/dt = I + J` split.
//! * [`integrator`]: method-of-lines RK4 stepping and the monitored run loop.
//! * [`diagnostics`]: observables, the run record, gates and CSV/JSON export.
//! * [`config`] and [`app`]: flat-text configuration, scenario presets and
//!   the command-line front end.

pub mod app;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod integrator;
pub mod lyapunov;
pub mod numeric;
pub mod reactions;

pub use diagnostics::{evaluate_gates, GateReport, RunRecord, Sample, Tolerances};
pub use error::{ConfigError, DiagnosticsError, GridError, LyapunovError, ReactionError, RunError};
pub use grid::{BoundarySpec, FaceLambdas, Grid, ScalarField};
pub use integrator::{
    cfl_dt, detect_blowup, run, step_rk4, DtPolicy, FieldState, Monitor, RunOptions, RunResult,
    RunStatus, StepStats,
};
pub use lyapunov::{
    binom, choose_coefficients, eval_hp, eval_i_j, eval_l, lp_bound_ratio,
    quadratic_form_certificate, Certificate, IjTerms, LyapCoefficients, Variant,
};
pub use reactions::{
    sign_profile, Monomial, NetworkParams, PairTerm, ReactionKind, ReactionSpec, ReversibleParams,
    SignClass, SpacetimeCoefficient, TripledParams, ValidationReport,
};
