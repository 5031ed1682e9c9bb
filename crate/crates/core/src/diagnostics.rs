//! Observables, the per-run time series and pass/fail gates.
//!
//! Two integral conventions coexist. Norms are normalised by `|Ω|`:
//! `‖u‖_p^p = (1/|Ω|) ∫ |u|^p dx`. Masses and the Lyapunov functional are
//! plain integrals.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{DiagnosticsError, LyapunovError, RunError};
use crate::grid::{BoundarySpec, Grid};
use crate::integrator::{FieldState, RunOptions, StepStats};
use crate::lyapunov::{eval_i_j, eval_l, lp_bound_ratio};
use crate::numeric::pairwise_sum;
use crate::reactions::{ReactionSpec, SignClass};

/// `∫ (u_i + u_j) dx`.
pub fn mass(state: &FieldState, pair: (usize, usize)) -> Result<f64, DiagnosticsError> {
    let m = state.species.len();
    if pair.0 >= m || pair.1 >= m {
        return Err(DiagnosticsError::BadPair(pair.0, pair.1));
    }
    let sum: Vec<f64> = state.species[pair.0]
        .iter()
        .zip(&state.species[pair.1])
        .map(|(a, b)| a + b)
        .collect();
    Ok(state.grid.integrate(&sum)?)
}

/// Normalised `L^p` norm `((1/|Ω|) Σ |v|^p vol)^(1/p)`; `p = ∞` gives the
/// sup over cells.
pub fn lp_norm(grid: &Grid, values: &[f64], p: f64) -> Result<f64, DiagnosticsError> {
    if p.is_nan() || p < 1.0 {
        return Err(DiagnosticsError::BadOrder(p));
    }
    if values.len() != grid.len() {
        return Err(crate::error::GridError::SizeMismatch {
            expected: grid.len(),
            got: values.len(),
        }
        .into());
    }
    if p.is_infinite() {
        return Ok(linf(values));
    }
    let powered: Vec<f64> = values
        .iter()
        .map(|v| {
            if p == 1.0 {
                v.abs()
            } else if p == 2.0 {
                v * v
            } else {
                v.abs().powf(p)
            }
        })
        .collect();
    // Σ|v|^p vol / (N vol): the volume cancels.
    let mean = pairwise_sum(&powered) / grid.len() as f64;
    Ok(if p == 1.0 {
        mean
    } else if p == 2.0 {
        mean.sqrt()
    } else {
        mean.powf(1.0 / p)
    })
}

pub fn linf(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, v| {
        if v.is_nan() {
            f64::NAN
        } else {
            m.max(v.abs())
        }
    })
}

/// Monitor values at one sample. `I`/`J` are absent when they could not
/// be evaluated (non-Neumann boundaries or a non-finite state).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorSample {
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "I")]
    pub i: Option<f64>,
    #[serde(rename = "J")]
    pub j: Option<f64>,
    pub i_scale: Option<f64>,
    pub j_scale: Option<f64>,
    pub lp_ratio: f64,
    /// Sign of the monitored pair's first reaction component.
    pub sign: SignClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub step: usize,
    /// One per balance pair, in the spec's order.
    pub masses: Vec<f64>,
    /// Normalised norms of `Σ_k u_k`: `l1`, `l2`, then the extra orders.
    pub norms: Vec<f64>,
    pub linf: Vec<f64>,
    pub monitors: Vec<MonitorSample>,
    /// One per balance pair.
    pub signs: Vec<SignClass>,
    /// Cumulative clamp count.
    pub clamps: u64,
    pub min_value: f64,
}

impl Sample {
    pub fn is_finite(&self) -> bool {
        self.t.is_finite()
            && self.masses.iter().all(|v| v.is_finite())
            && self.norms.iter().all(|v| v.is_finite())
            && self.linf.iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub grid: Grid,
    pub spec_name: String,
    pub species_count: usize,
    pub balance_pairs: Vec<(usize, usize)>,
    /// `(label, pair, coefficient summary)` per monitor.
    pub monitors: Vec<(String, (usize, usize), String)>,
    pub lp_orders: Vec<f64>,
    pub dt: f64,
    /// Step sizes of the runs this record descends from, oldest first.
    pub dt_lineage: Vec<f64>,
    pub seed: u64,
    pub neumann: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub metadata: RunMetadata,
    pub samples: Vec<Sample>,
    pub stats: StepStats,
    /// Time at which the run stopped on blow-up.
    pub blow_up: Option<f64>,
    /// Per balance pair: last sample time at which the sign classification
    /// changed, a runtime surrogate for the final sign-change time.
    pub last_sign_change: Vec<Option<f64>>,
}

impl RunRecord {
    pub fn new(metadata: RunMetadata) -> Self {
        let pairs = metadata.balance_pairs.len();
        Self {
            metadata,
            samples: Vec::new(),
            stats: StepStats::default(),
            blow_up: None,
            last_sign_change: vec![None; pairs],
        }
    }

    /// Appends a sample; times must increase strictly.
    pub fn push(&mut self, sample: Sample) {
        if let Some(prev) = self.samples.last() {
            debug_assert!(sample.t > prev.t, "sample times must increase");
            for (k, (a, b)) in prev.signs.iter().zip(&sample.signs).enumerate() {
                if a != b {
                    self.last_sign_change[k] = Some(sample.t);
                }
            }
        }
        self.samples.push(sample);
    }

    /// True when some pair's sign changed in the latter half of the run,
    /// i.e. the classification did not visibly stabilise.
    pub fn sign_unstable(&self) -> bool {
        let (Some(first), Some(last)) = (self.samples.first(), self.samples.last()) else {
            return false;
        };
        let mid = 0.5 * (first.t + last.t);
        self.last_sign_change
            .iter()
            .any(|c| c.is_some_and(|t| t > mid))
    }

    /// CSV header, in the column order used by [`RunRecord::to_csv`].
    pub fn csv_header(&self) -> Vec<String> {
        let meta = &self.metadata;
        let mut cols = vec!["t".to_string()];
        for &(i, j) in &meta.balance_pairs {
            cols.push(format!("mass_{i}_{j}"));
        }
        cols.push("l1".into());
        cols.push("l2".into());
        for p in &meta.lp_orders {
            cols.push(format!("lp{p}"));
        }
        for k in 0..meta.species_count {
            cols.push(format!("linf_{k}"));
        }
        if meta.monitors.len() <= 1 {
            cols.extend(["L", "I", "J", "lp_ratio"].map(String::from));
        } else {
            for (label, _, _) in &meta.monitors {
                for c in ["L", "I", "J", "lp_ratio"] {
                    cols.push(format!("{c}_{label}"));
                }
            }
        }
        cols.push("sign".into());
        cols.push("clamps".into());
        cols
    }

    pub fn to_csv(&self) -> String {
        fn num(out: &mut String, v: f64) {
            if v.is_nan() {
                out.push_str("nan");
            } else {
                let _ = write!(out, "{v:e}");
            }
        }
        fn opt(out: &mut String, v: Option<f64>) {
            if let Some(v) = v {
                num(out, v);
            }
        }
        let mut out = self.csv_header().join(",");
        out.push('\n');
        let monitors = self.metadata.monitors.len();
        for s in &self.samples {
            num(&mut out, s.t);
            for v in s.masses.iter().chain(&s.norms).chain(&s.linf) {
                out.push(',');
                num(&mut out, *v);
            }
            if monitors == 0 {
                out.push_str(",,,,");
            }
            for ms in &s.monitors {
                out.push(',');
                num(&mut out, ms.l);
                out.push(',');
                opt(&mut out, ms.i);
                out.push(',');
                opt(&mut out, ms.j);
                out.push(',');
                num(&mut out, ms.lp_ratio);
            }
            out.push(',');
            let signs: Vec<&str> = s.signs.iter().map(SignClass::label).collect();
            out.push_str(&signs.join("|"));
            let _ = writeln!(out, ",{}", s.clamps);
        }
        out
    }
}

/// Diagnostics of a finite state.
pub(crate) fn sample(
    state: &FieldState,
    spec: &ReactionSpec,
    bc: &BoundarySpec,
    opts: &RunOptions,
    stats: &StepStats,
    step: usize,
) -> Result<Sample, RunError> {
    let grid = &*state.grid;
    let m = state.species.len();
    let masses = spec
        .balance_pairs()
        .iter()
        .map(|&p| mass(state, p))
        .collect::<Result<Vec<_>, _>>()?;
    let total: Vec<f64> = (0..grid.len())
        .map(|c| state.species.iter().map(|s| s[c]).sum())
        .collect();
    let mut norms = vec![lp_norm(grid, &total, 1.0)?, lp_norm(grid, &total, 2.0)?];
    for &p in &opts.lp_orders {
        norms.push(lp_norm(grid, &total, p)?);
    }
    let linf_k: Vec<f64> = state.species.iter().map(|s| linf(s)).collect();

    let mut rhs = vec![vec![0.0; grid.len()]; m];
    spec.eval_field(state.t, grid, &state.species, &mut rhs)
        .map_err(LyapunovError::from)?;
    let signs = spec
        .balance_pairs()
        .iter()
        .map(|&(i, _)| SignClass::classify(rhs[i].iter().copied()))
        .collect();

    let mut monitors = Vec::with_capacity(opts.monitors.len());
    for mon in &opts.monitors {
        let l = eval_l(state, mon.pair, &mon.coeffs)?;
        let ij = match eval_i_j(state, mon.pair, &mon.coeffs, spec, state.t, bc) {
            Ok(t) => Some(t),
            Err(LyapunovError::NonNeumann) => None,
            Err(e) => return Err(e.into()),
        };
        monitors.push(MonitorSample {
            l,
            i: ij.map(|t| t.i),
            j: ij.map(|t| t.j),
            i_scale: ij.map(|t| t.i_scale),
            j_scale: ij.map(|t| t.j_scale),
            lp_ratio: lp_bound_ratio(state, mon.pair, &mon.coeffs)?,
            sign: SignClass::classify(rhs[mon.pair.0].iter().copied()),
        });
    }
    let min_value = state
        .species
        .iter()
        .flatten()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(Sample {
        t: state.t,
        step,
        masses,
        norms,
        linf: linf_k,
        monitors,
        signs,
        clamps: stats.clamped,
        min_value,
    })
}

/// Best-effort sample at the blow-up time; values may be non-finite.
pub(crate) fn blowup_sample(
    t: f64,
    step: usize,
    state: &FieldState,
    spec: &ReactionSpec,
    opts: &RunOptions,
    stats: &StepStats,
) -> Sample {
    let finite = state.is_finite() && state.t == t;
    let pairs = spec.balance_pairs();
    let masses = pairs
        .iter()
        .map(|&p| {
            if finite {
                mass(state, p).unwrap_or(f64::NAN)
            } else {
                f64::NAN
            }
        })
        .collect();
    let nan_if = |v: f64| if finite { v } else { f64::NAN };
    Sample {
        t,
        step,
        masses,
        norms: vec![f64::NAN; 2 + opts.lp_orders.len()],
        linf: state.species.iter().map(|s| nan_if(linf(s))).collect(),
        monitors: opts
            .monitors
            .iter()
            .map(|mon| MonitorSample {
                l: if finite {
                    eval_l(state, mon.pair, &mon.coeffs).unwrap_or(f64::NAN)
                } else {
                    f64::NAN
                },
                i: None,
                j: None,
                i_scale: None,
                j_scale: None,
                lp_ratio: f64::NAN,
                sign: SignClass::Mixed,
            })
            .collect(),
        signs: vec![SignClass::Mixed; pairs.len()],
        clamps: stats.clamped,
        min_value: f64::NAN,
    }
}

/// Gate tolerances; defaults are the acceptance thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub mass_drift: f64,
    pub lyapunov_rel: f64,
    pub lyapunov_abs: f64,
    pub lp_ratio: f64,
    pub i_rel: f64,
    pub j_rel: f64,
    pub clamp_fraction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            mass_drift: 1e-8,
            lyapunov_rel: 1e-10,
            lyapunov_abs: 1e-14,
            lp_ratio: 1e-12,
            i_rel: 1e-12,
            j_rel: 1e-12,
            clamp_fraction: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub name: String,
    pub status: GateStatus,
    /// Worst observed value of the gated quantity.
    pub worst: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateReport {
    pub gates: Vec<Gate>,
    pub blow_up: bool,
    pub sign_unstable: bool,
    pub pass: bool,
}

impl GateReport {
    pub fn gate(&self, name: &str) -> Option<&Gate> {
        self.gates.iter().find(|g| g.name == name)
    }
}

fn gate(name: String, pass: bool, worst: f64, detail: String) -> Gate {
    Gate {
        name,
        status: if pass { GateStatus::Pass } else { GateStatus::Fail },
        worst,
        detail,
    }
}

fn skipped(name: String, detail: &str) -> Gate {
    Gate {
        name,
        status: GateStatus::Skipped,
        worst: 0.0,
        detail: detail.to_string(),
    }
}

/// Evaluates every gate on a record. Pure in `(record, tol)`.
pub fn evaluate_gates(record: &RunRecord, tol: &Tolerances) -> GateReport {
    let meta = &record.metadata;
    let finite: Vec<&Sample> = record.samples.iter().filter(|s| s.is_finite()).collect();
    let blow_up = record.blow_up.is_some();
    let mut gates = Vec::new();

    for (k, &(i, j)) in meta.balance_pairs.iter().enumerate() {
        let name = format!("mass_{i}_{j}");
        if !meta.neumann {
            gates.push(skipped(name, "mass is conserved only under Neumann boundaries"));
            continue;
        }
        let Some(first) = finite.first() else {
            gates.push(skipped(name, "no samples"));
            continue;
        };
        let m0 = first.masses[k];
        let worst = finite
            .iter()
            .map(|s| (s.masses[k] - m0).abs() / m0.abs().max(1e-30))
            .fold(0.0, f64::max);
        gates.push(gate(
            name,
            worst <= tol.mass_drift,
            worst,
            format!("max relative drift {worst:e} (tolerance {:e})", tol.mass_drift),
        ));
    }

    for (n, (label, _, summary)) in meta.monitors.iter().enumerate() {
        let series: Vec<&MonitorSample> = finite.iter().map(|s| &s.monitors[n]).collect();
        let variant = if summary.contains("variant=increasing") {
            crate::lyapunov::Variant::Increasing
        } else {
            crate::lyapunov::Variant::Decreasing
        };
        let matched: Vec<bool> = series.iter().map(|m| variant.matches(m.sign)).collect();

        // Descent is asserted on the trailing stretch where the sign matches.
        let name = format!("lyapunov_descent_{label}");
        let tail_start = matched.iter().rposition(|&m| !m).map_or(0, |k| k + 1);
        if series.len() - tail_start < 2 {
            gates.push(skipped(name, "reaction sign never settled on the certified side"));
        } else {
            let mut worst = f64::NEG_INFINITY;
            let mut ok = true;
            for w in series[tail_start..].windows(2) {
                let allowed = w[0].l * (1.0 + tol.lyapunov_rel) + tol.lyapunov_abs;
                worst = worst.max(w[1].l - allowed);
                ok &= w[1].l <= allowed;
            }
            gates.push(gate(
                name,
                ok,
                worst,
                format!(
                    "checked {} samples from t={:e}",
                    series.len() - tail_start,
                    finite[tail_start].t
                ),
            ));
        }

        let worst = series.iter().map(|m| m.lp_ratio).fold(0.0, f64::max);
        gates.push(gate(
            format!("lp_ratio_{label}"),
            worst <= 1.0 + tol.lp_ratio,
            worst,
            "max of int (u+v)^p / (R L)".into(),
        ));

        let i_vals: Vec<(f64, f64)> = series
            .iter()
            .filter_map(|m| Some((m.i?, m.i_scale?)))
            .collect();
        let name = format!("i_nonpositive_{label}");
        if i_vals.is_empty() {
            gates.push(skipped(name, "I needs Neumann boundaries"));
        } else {
            let worst = i_vals.iter().map(|(i, _)| *i).fold(f64::NEG_INFINITY, f64::max);
            let ok = i_vals.iter().all(|(i, s)| *i <= tol.i_rel * s);
            gates.push(gate(name, ok, worst, "max I".into()));
        }

        let j_vals: Vec<(f64, f64)> = series
            .iter()
            .zip(&matched)
            .filter(|(_, m)| **m)
            .filter_map(|(m, _)| Some((m.j?, m.j_scale?)))
            .collect();
        let name = format!("j_nonpositive_{label}");
        if j_vals.is_empty() {
            gates.push(skipped(name, "no sample with a sign matching the variant"));
        } else {
            let worst = j_vals.iter().map(|(j, _)| *j).fold(f64::NEG_INFINITY, f64::max);
            let ok = j_vals.iter().all(|(j, s)| *j <= tol.j_rel * s);
            gates.push(gate(name, ok, worst, "max J where the sign matched".into()));
        }
    }

    let frac = if record.stats.evaluations == 0 {
        0.0
    } else {
        record.stats.clamped as f64 / record.stats.evaluations as f64
    };
    gates.push(gate(
        "positivity".into(),
        frac <= tol.clamp_fraction,
        frac,
        format!(
            "{} of {} concentration reads were negative",
            record.stats.clamped, record.stats.evaluations
        ),
    ));
    gates.push(gate(
        "no_blowup".into(),
        !blow_up,
        if blow_up { 1.0 } else { 0.0 },
        if blow_up {
            "run terminated by blow-up".into()
        } else {
            "bounded up to the horizon".into()
        },
    ));

    let pass = gates.iter().all(|g| g.status != GateStatus::Fail);
    GateReport {
        gates,
        blow_up,
        sign_unstable: record.sign_unstable(),
        pass,
    }
}
