//! Method-of-lines time stepping.
//!
//! Each species obeys `du_k/dt = d_k Δ_h u_k + f_k(t, x, u)`, advanced by
//! classical RK4 with a fixed step below the explicit diffusion limit.
//! The evolved state is never clipped; negative values are only read as 0
//! inside monomial evaluation, and counted.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{self, RunMetadata, RunRecord};
use crate::error::{GridError, RunError};
use crate::grid::{BoundarySpec, Grid, ScalarField};
use crate::lyapunov::LyapCoefficients;
use crate::reactions::ReactionSpec;

/// Concentrations of all species at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub grid: Arc<Grid>,
    pub species: Vec<Vec<f64>>,
    pub diffusion: Vec<f64>,
}

impl FieldState {
    pub fn new(
        grid: Arc<Grid>,
        species: Vec<Vec<f64>>,
        diffusion: Vec<f64>,
        t: f64,
    ) -> Result<Self, RunError> {
        if species.len() != diffusion.len() || species.is_empty() {
            return Err(RunError::Mismatch(format!(
                "{} species fields but {} diffusion coefficients",
                species.len(),
                diffusion.len()
            )));
        }
        for s in &species {
            if s.len() != grid.len() {
                return Err(GridError::SizeMismatch {
                    expected: grid.len(),
                    got: s.len(),
                }
                .into());
            }
        }
        if let Some(d) = diffusion.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
            return Err(RunError::Mismatch(format!(
                "diffusion coefficients must be finite and >= 0, got {d}"
            )));
        }
        Ok(Self {
            t,
            grid,
            species,
            diffusion,
        })
    }

    pub fn species_count(&self) -> usize {
        self.species.len()
    }

    pub fn field(&self, k: usize) -> ScalarField {
        ScalarField::new(Arc::clone(&self.grid), self.species[k].clone())
            .expect("state fields match their grid")
    }

    pub fn is_finite(&self) -> bool {
        self.species.iter().flatten().all(|v| v.is_finite())
    }

    /// Sum over species of the sup-norm.
    pub fn sup_norm_sum(&self) -> f64 {
        self.species
            .iter()
            .map(|s| s.iter().fold(0.0f64, |m, v| m.max(v.abs())))
            .sum()
    }
}

/// Largest stable explicit step: `safety / (2 max_k d_k Σ_axes 1/h²)`.
/// Returns `+inf` when every diffusion coefficient is 0.
pub fn cfl_dt(grid: &Grid, diffusion: &[f64], safety: f64) -> f64 {
    let dmax = diffusion.iter().copied().fold(0.0, f64::max);
    let inv_h2: f64 = grid.spacing().iter().map(|h| 1.0 / (h * h)).sum();
    safety / (2.0 * dmax * inv_h2)
}

/// Returns the current time when `Σ_k ‖u_k‖_∞ > threshold` or any value is
/// not finite.
pub fn detect_blowup(state: &FieldState, threshold: f64) -> Option<f64> {
    if !state.is_finite() || state.sup_norm_sum() > threshold {
        Some(state.t)
    } else {
        None
    }
}

/// Counters accumulated across steps.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepStats {
    /// Negative concentrations read as 0 during reaction evaluation.
    pub clamped: u64,
    /// Total concentration reads during reaction evaluation.
    pub evaluations: u64,
}

/// Why a step could not complete.
#[derive(Debug, Clone, PartialEq)]
pub enum StepFailure {
    /// Non-finite values appeared; carries the time of the failing stage.
    BlowUp { t: f64 },
    Invalid(RunError),
}

/// Reusable RK4 workspace.
struct Rk4 {
    stages: [Vec<Vec<f64>>; 4],
    scratch: Vec<Vec<f64>>,
    lap: Vec<f64>,
}

impl Rk4 {
    fn new(m: usize, n: usize) -> Self {
        let block = || vec![vec![0.0; n]; m];
        Self {
            stages: [block(), block(), block(), block()],
            scratch: block(),
            lap: vec![0.0; n],
        }
    }

    /// `out = D Δ_h y + f(t, y)`.
    #[allow(clippy::too_many_arguments)]
    fn rhs(
        grid: &Grid,
        diffusion: &[f64],
        spec: &ReactionSpec,
        bc: &BoundarySpec,
        t: f64,
        y: &[Vec<f64>],
        out: &mut [Vec<f64>],
        lap: &mut [f64],
        stats: &mut StepStats,
    ) -> Result<(), StepFailure> {
        let clamped = spec
            .eval_field(t, grid, y, out)
            .map_err(|_| StepFailure::BlowUp { t })?;
        stats.clamped += clamped as u64;
        stats.evaluations += (grid.len() * y.len()) as u64;
        for (k, (yk, ok)) in y.iter().zip(out.iter_mut()).enumerate() {
            let d = diffusion[k];
            if d == 0.0 {
                continue;
            }
            grid.laplacian_into(yk, bc.faces(k), lap)
                .map_err(|e| StepFailure::Invalid(e.into()))?;
            for (o, l) in ok.iter_mut().zip(lap.iter()) {
                *o += d * l;
            }
        }
        Ok(())
    }

    fn step(
        &mut self,
        state: &FieldState,
        dt: f64,
        spec: &ReactionSpec,
        bc: &BoundarySpec,
        stats: &mut StepStats,
    ) -> Result<FieldState, StepFailure> {
        let grid = &*state.grid;
        let d = &state.diffusion;
        let y = &state.species;
        let t = state.t;
        let [k1, k2, k3, k4] = &mut self.stages;

        Self::rhs(grid, d, spec, bc, t, y, k1, &mut self.lap, stats)?;
        axpy_into(&mut self.scratch, y, 0.5 * dt, k1);
        Self::rhs(grid, d, spec, bc, t + 0.5 * dt, &self.scratch, k2, &mut self.lap, stats)?;
        axpy_into(&mut self.scratch, y, 0.5 * dt, k2);
        Self::rhs(grid, d, spec, bc, t + 0.5 * dt, &self.scratch, k3, &mut self.lap, stats)?;
        axpy_into(&mut self.scratch, y, dt, k3);
        Self::rhs(grid, d, spec, bc, t + dt, &self.scratch, k4, &mut self.lap, stats)?;

        let w = dt / 6.0;
        let species: Vec<Vec<f64>> = y
            .iter()
            .enumerate()
            .map(|(s, ys)| {
                ys.iter()
                    .enumerate()
                    .map(|(c, &v)| {
                        v + w * (k1[s][c] + 2.0 * k2[s][c] + 2.0 * k3[s][c] + k4[s][c])
                    })
                    .collect()
            })
            .collect();
        let next = FieldState {
            t: t + dt,
            grid: Arc::clone(&state.grid),
            species,
            diffusion: state.diffusion.clone(),
        };
        if !next.is_finite() {
            return Err(StepFailure::BlowUp { t: next.t });
        }
        Ok(next)
    }
}

fn axpy_into(out: &mut [Vec<f64>], y: &[Vec<f64>], a: f64, k: &[Vec<f64>]) {
    for ((o, ys), ks) in out.iter_mut().zip(y).zip(k) {
        for ((oc, &yc), &kc) in o.iter_mut().zip(ys).zip(ks) {
            *oc = yc + a * kc;
        }
    }
}

fn check_step_inputs(
    state: &FieldState,
    dt: f64,
    spec: &ReactionSpec,
    bc: &BoundarySpec,
) -> Result<(), RunError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(RunError::BadDt(dt));
    }
    let limit = cfl_dt(&state.grid, &state.diffusion, 1.0);
    if dt > limit * (1.0 + 1e-12) {
        return Err(RunError::DtAboveCfl { dt, limit });
    }
    let m = state.species_count();
    if spec.species_count() != m {
        return Err(RunError::Mismatch(format!(
            "reaction expects {} species, state has {m}",
            spec.species_count()
        )));
    }
    if bc.species_count() != m {
        return Err(RunError::Mismatch(format!(
            "boundary spec covers {} species, state has {m}",
            bc.species_count()
        )));
    }
    Ok(())
}

/// One classical RK4 step of size `dt`.
pub fn step_rk4(
    state: &FieldState,
    dt: f64,
    spec: &ReactionSpec,
    bc: &BoundarySpec,
    stats: &mut StepStats,
) -> Result<FieldState, StepFailure> {
    check_step_inputs(state, dt, spec, bc).map_err(StepFailure::Invalid)?;
    Rk4::new(state.species_count(), state.grid.len()).step(state, dt, spec, bc, stats)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum DtPolicy {
    /// `dt = safety × cfl_dt(.., 1)`.
    Cfl { safety: f64 },
    /// A fixed step, still required to respect the stability limit.
    Fixed { dt: f64 },
}

/// A Lyapunov functional attached to one species pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Monitor {
    pub label: String,
    pub pair: (usize, usize),
    pub coeffs: LyapCoefficients,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub horizon: f64,
    pub dt: DtPolicy,
    /// Record a sample every `cadence` steps (plus the first and last).
    pub cadence: usize,
    pub blowup_threshold: f64,
    pub monitors: Vec<Monitor>,
    /// Extra normalised `L^p` orders recorded beside `l1` and `l2`.
    pub lp_orders: Vec<f64>,
    pub seed: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            horizon: 1.0,
            dt: DtPolicy::Cfl { safety: 0.5 },
            cadence: 10,
            blowup_threshold: 1e12,
            monitors: Vec::new(),
            lp_orders: Vec::new(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    BlowUp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub status: RunStatus,
    pub final_time: f64,
    pub blow_up_time: Option<f64>,
    pub step_count: usize,
    pub record: RunRecord,
    pub final_state: FieldState,
}

/// Resolves the step size so that an integer number of equal steps lands
/// exactly on the horizon. Returns `(dt, steps)`.
pub fn resolve_dt(
    grid: &Grid,
    diffusion: &[f64],
    policy: DtPolicy,
    horizon: f64,
) -> Result<(f64, usize), RunError> {
    let limit = cfl_dt(grid, diffusion, 1.0);
    let dt_max = match policy {
        DtPolicy::Cfl { safety } => {
            if !(safety > 0.0 && safety <= 1.0) {
                return Err(RunError::BadDt(safety));
            }
            if limit.is_infinite() {
                return Err(RunError::NoStabilityLimit);
            }
            safety * limit
        }
        DtPolicy::Fixed { dt } => {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(RunError::BadDt(dt));
            }
            if dt > limit * (1.0 + 1e-12) {
                return Err(RunError::DtAboveCfl { dt, limit });
            }
            dt
        }
    };
    if !(horizon.is_finite() && horizon >= 0.0) {
        return Err(RunError::BadDt(horizon));
    }
    if horizon == 0.0 {
        return Ok((dt_max, 0));
    }
    let steps = (horizon / dt_max - 1e-9).ceil().max(1.0) as usize;
    Ok((horizon / steps as f64, steps))
}

/// Steps `initial` to the horizon, sampling diagnostics at the cadence and
/// stopping early on blow-up.
pub fn run(
    initial: &FieldState,
    spec: &ReactionSpec,
    bc: &BoundarySpec,
    opts: &RunOptions,
) -> Result<RunResult, RunError> {
    let m = initial.species_count();
    if spec.species_count() != m || bc.species_count() != m {
        return Err(RunError::Mismatch(format!(
            "state has {m} species, reaction {}, boundary spec {}",
            spec.species_count(),
            bc.species_count()
        )));
    }
    for (species, s) in initial.species.iter().enumerate() {
        if let Some(cell) = s.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(RunError::BadInitialData {
                species,
                cell,
                value: s[cell],
            });
        }
    }
    for mon in &opts.monitors {
        if mon.pair.0 >= m || mon.pair.1 >= m || mon.pair.0 == mon.pair.1 {
            return Err(RunError::Lyapunov(crate::error::LyapunovError::BadPair(
                mon.pair.0, mon.pair.1,
            )));
        }
    }
    let (dt, steps) = resolve_dt(&initial.grid, &initial.diffusion, opts.dt, opts.horizon)?;
    let cadence = opts.cadence.max(1);

    let meta = RunMetadata {
        grid: (*initial.grid).clone(),
        spec_name: spec.name().to_string(),
        species_count: m,
        balance_pairs: spec.balance_pairs().to_vec(),
        monitors: opts
            .monitors
            .iter()
            .map(|mon| (mon.label.clone(), mon.pair, mon.coeffs.summary()))
            .collect(),
        lp_orders: opts.lp_orders.clone(),
        dt,
        dt_lineage: vec![dt],
        seed: opts.seed,
        neumann: bc.all_neumann(initial.grid.dimension()),
    };
    let mut record = RunRecord::new(meta);
    let mut stats = StepStats::default();
    let mut stepper = Rk4::new(m, initial.grid.len());
    let mut state = initial.clone();
    record.push(diagnostics::sample(&state, spec, bc, opts, &stats, 0)?);

    let mut status = RunStatus::Completed;
    let mut blow_up_time = None;
    let mut taken = 0;
    for n in 1..=steps {
        match stepper.step(&state, dt, spec, bc, &mut stats) {
            Ok(next) => state = next,
            Err(StepFailure::BlowUp { t }) => {
                status = RunStatus::BlowUp;
                blow_up_time = Some(t);
                record.push(diagnostics::blowup_sample(t, n, &state, spec, opts, &stats));
                taken = n;
                break;
            }
            Err(StepFailure::Invalid(e)) => return Err(e),
        }
        taken = n;
        if n == steps {
            // Land exactly on the horizon despite accumulated rounding.
            state.t = opts.horizon;
        }
        if let Some(t) = detect_blowup(&state, opts.blowup_threshold) {
            status = RunStatus::BlowUp;
            blow_up_time = Some(t);
            record.push(diagnostics::blowup_sample(t, n, &state, spec, opts, &stats));
            break;
        }
        if n % cadence == 0 || n == steps {
            record.push(diagnostics::sample(&state, spec, bc, opts, &stats, n)?);
        }
    }
    record.stats = stats;
    record.blow_up = blow_up_time;
    Ok(RunResult {
        status,
        final_time: blow_up_time.unwrap_or(state.t),
        blow_up_time,
        step_count: taken,
        record,
        final_state: state,
    })
}
