//! Flat `section.key = value` run configuration.
//!
//! ```text
//! # comments and blank lines are ignored; lists are comma-separated
//! grid.dimension = 1
//! grid.extents = 0, 1
//! grid.cells = 128
//! species.count = 2
//! species.diffusion = 1, 2
//! species.0.init = gaussian
//! species.0.amplitude = 2
//! reaction.preset = reversible_pair
//! reaction.l = 2
//! ```
//!
//! Parsing collects every problem, each tagged with its key path.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::Tolerances;
use crate::error::{ConfigError, ConfigIssue};
use crate::grid::{BoundarySpec, FaceLambdas, Grid};
use crate::integrator::{DtPolicy, FieldState, RunOptions};
use crate::lyapunov::Variant;
use crate::reactions::{
    NetworkParams, PairTerm, ReactionKind, ReactionSpec, ReversibleParams, SpacetimeCoefficient,
    TripledParams,
};

/// Scenario presets accepted by [`preset`].
pub const PRESETS: [&str; 5] = [
    "pair_generic",
    "pair_spacetime",
    "pair_reversible",
    "tripled",
    "m_chain",
];

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub dimension: usize,
    pub extents: Vec<[f64; 2]>,
    pub cells: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    Constant {
        value: f64,
    },
    /// `base + amplitude · exp(−|x − center|² / (2 width²))`.
    Gaussian {
        base: f64,
        amplitude: f64,
        center: [f64; 2],
        width: f64,
    },
    /// Linear in the first coordinate, `lo` at the left edge, `hi` at the right.
    Ramp { lo: f64, hi: f64 },
    /// Alternates `lo`/`hi` in blocks of `block` cells per axis.
    Checkerboard { lo: f64, hi: f64, block: usize },
}

impl InitialCondition {
    fn name(&self) -> &'static str {
        match self {
            Self::Constant { .. } => "constant",
            Self::Gaussian { .. } => "gaussian",
            Self::Ramp { .. } => "ramp",
            Self::Checkerboard { .. } => "checkerboard",
        }
    }

    /// Cell values on `grid`.
    pub fn sample(&self, grid: &Grid) -> Vec<f64> {
        let ext = grid.extents();
        match *self {
            Self::Constant { value } => vec![value; grid.len()],
            Self::Gaussian {
                base,
                amplitude,
                center,
                width,
            } => grid.sample(|x| {
                let mut r2 = 0.0;
                for d in 0..grid.dimension() {
                    r2 += (x[d] - center[d]).powi(2);
                }
                base + amplitude * (-r2 / (2.0 * width * width)).exp()
            }),
            Self::Ramp { lo, hi } => {
                let [a, b] = ext[0];
                grid.sample(|x| lo + (hi - lo) * (x[0] - a) / (b - a))
            }
            Self::Checkerboard { lo, hi, block } => {
                let n = grid.cells_per_axis();
                let block = block.max(1);
                (0..grid.len())
                    .map(|idx| {
                        let ix = idx % n[0];
                        let iy = idx / n[0];
                        if (ix / block + iy / block).is_multiple_of(2) {
                            lo
                        } else {
                            hi
                        }
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesConfig {
    pub count: usize,
    pub diffusion: Vec<f64>,
    pub init: Vec<InitialCondition>,
    /// Amplitude of additive uniform `[0, noise)` perturbations.
    pub noise: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariantPolicy {
    Auto,
    Fixed(Variant),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovConfig {
    pub enabled: bool,
    pub p: u32,
    pub margin: f64,
    pub variant: VariantPolicy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeConfig {
    pub horizon: f64,
    pub safety: f64,
    pub cadence: usize,
    /// Fixed step; the CFL policy with `safety` is used when absent.
    pub dt: Option<f64>,
    pub blowup_threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: String,
    pub formats: Vec<String>,
    pub lp_orders: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub species: SpeciesConfig,
    pub reaction: ReactionKind,
    /// Face lambdas per species.
    pub boundary: Vec<FaceLambdas>,
    pub lyapunov: LyapunovConfig,
    pub time: TimeConfig,
    pub output: OutputConfig,
    pub tolerances: Tolerances,
}

/// Everything needed to start a run, built from a [`RunConfig`].
#[derive(Debug, Clone)]
pub struct Scenario {
    pub initial: FieldState,
    pub spec: ReactionSpec,
    pub bc: BoundarySpec,
    /// Monitors are attached later, once the variant policy is resolved.
    pub options: RunOptions,
}

fn species_required(kind: &ReactionKind) -> Option<usize> {
    match kind {
        ReactionKind::GenericPair { .. }
        | ReactionKind::SpacetimePair { .. }
        | ReactionKind::ReversiblePair(_) => Some(2),
        ReactionKind::Tripled(_) => Some(3),
        ReactionKind::Network(p) => Some(p.orders.len()),
        ReactionKind::Unbalanced { .. } => None,
    }
}

/// Builds the reaction from its configured kind.
pub fn build_reaction(kind: &ReactionKind) -> Result<ReactionSpec, String> {
    let r = match kind.clone() {
        ReactionKind::GenericPair { terms } => ReactionSpec::generic_pair(terms),
        ReactionKind::SpacetimePair { coefficient, psi } => {
            ReactionSpec::spacetime_pair(coefficient, psi)
        }
        ReactionKind::ReversiblePair(p) => ReactionSpec::reversible_pair(p),
        ReactionKind::Tripled(p) => ReactionSpec::tripled(p),
        ReactionKind::Network(p) => ReactionSpec::network(p),
        ReactionKind::Unbalanced { .. } => {
            return Err("the unbalanced control is not configurable".into())
        }
    };
    r.map_err(|e| e.to_string())
}

impl RunConfig {
    /// Grid, initial state, reaction, boundaries and run options.
    pub fn build(&self) -> Result<Scenario, ConfigError> {
        let issue = |key: &str, message: String| ConfigError {
            issues: vec![ConfigIssue {
                key: key.into(),
                message,
            }],
        };
        let grid = Grid::new(self.grid.dimension, &self.grid.extents, &self.grid.cells)
            .map_err(|e| issue("grid", e.to_string()))?;
        let grid = Arc::new(grid);
        let spec = build_reaction(&self.reaction).map_err(|e| issue("reaction", e))?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.species.seed);
        let mut fields = Vec::with_capacity(self.species.count);
        for ic in &self.species.init {
            let mut values = ic.sample(&grid);
            if self.species.noise > 0.0 {
                for v in &mut values {
                    *v += self.species.noise * rng.gen::<f64>();
                }
            }
            fields.push(values);
        }
        let initial = FieldState::new(grid, fields, self.species.diffusion.clone(), 0.0)
            .map_err(|e| issue("species", e.to_string()))?;
        let dt = match self.time.dt {
            Some(dt) => DtPolicy::Fixed { dt },
            None => DtPolicy::Cfl {
                safety: self.time.safety,
            },
        };
        Ok(Scenario {
            initial,
            spec,
            bc: BoundarySpec::new(self.boundary.clone()),
            options: RunOptions {
                horizon: self.time.horizon,
                dt,
                cadence: self.time.cadence,
                blowup_threshold: self.time.blowup_threshold,
                monitors: Vec::new(),
                lp_orders: self.output.lp_orders.clone(),
                seed: self.species.seed,
            },
        })
    }

    /// Flat text that [`parse_config`] reads back to an equal config.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("grid.dimension", self.grid.dimension.to_string());
        put(
            "grid.extents",
            join(self.grid.extents.iter().flat_map(|e| e.iter())),
        );
        put("grid.cells", join(&self.grid.cells));

        put("species.count", self.species.count.to_string());
        put("species.diffusion", join(&self.species.diffusion));
        put("species.noise", self.species.noise.to_string());
        put("species.seed", self.species.seed.to_string());
        for (k, ic) in self.species.init.iter().enumerate() {
            let key = |f: &str| format!("species.{k}.{f}");
            put(&key("init"), ic.name().into());
            match *ic {
                InitialCondition::Constant { value } => put(&key("value"), value.to_string()),
                InitialCondition::Gaussian {
                    base,
                    amplitude,
                    center,
                    width,
                } => {
                    put(&key("base"), base.to_string());
                    put(&key("amplitude"), amplitude.to_string());
                    put(&key("center"), join(&center[..self.grid.dimension.min(2)]));
                    put(&key("width"), width.to_string());
                }
                InitialCondition::Ramp { lo, hi } => {
                    put(&key("lo"), lo.to_string());
                    put(&key("hi"), hi.to_string());
                }
                InitialCondition::Checkerboard { lo, hi, block } => {
                    put(&key("lo"), lo.to_string());
                    put(&key("hi"), hi.to_string());
                    put(&key("block"), block.to_string());
                }
            }
        }

        let terms = |ts: &[PairTerm]| {
            ts.iter()
                .map(|t| format!("{}:{}:{}", t.coefficient, t.u_exp, t.v_exp))
                .collect::<Vec<_>>()
                .join(", ")
        };
        match &self.reaction {
            ReactionKind::GenericPair { terms: ts } => {
                put("reaction.preset", "generic_pair".into());
                put("reaction.terms", terms(ts));
            }
            ReactionKind::SpacetimePair { coefficient, psi } => {
                put("reaction.preset", "spacetime_pair".into());
                put("reaction.coefficient", coefficient.name().into());
                match *coefficient {
                    SpacetimeCoefficient::Constant { value } => {
                        put("reaction.value", value.to_string())
                    }
                    SpacetimeCoefficient::LinearX { slope } => {
                        put("reaction.slope", slope.to_string())
                    }
                    SpacetimeCoefficient::CosTimesX { omega, slope } => {
                        put("reaction.omega", omega.to_string());
                        put("reaction.slope", slope.to_string());
                    }
                }
                put("reaction.psi", terms(psi));
            }
            ReactionKind::ReversiblePair(p) => {
                put("reaction.preset", "reversible_pair".into());
                for (k, v) in [
                    ("h1", p.h1),
                    ("h2", p.h2),
                    ("l", p.l),
                    ("q", p.q),
                    ("r", p.r),
                    ("s", p.s),
                ] {
                    put(&format!("reaction.{k}"), v.to_string());
                }
            }
            ReactionKind::Tripled(p) => {
                put("reaction.preset", "tripled".into());
                for (k, v) in tripled_fields(p) {
                    put(&format!("reaction.{k}"), v.to_string());
                }
            }
            ReactionKind::Network(p) => {
                put("reaction.preset", "m_network".into());
                put("reaction.orders", join(&p.orders));
                put("reaction.reactants", join(&p.reactants));
                put("reaction.products", join(&p.products));
                put("reaction.h", p.h.to_string());
                put("reaction.l", p.l.to_string());
            }
            ReactionKind::Unbalanced { .. } => {
                put("reaction.preset", "unbalanced".into());
            }
        }

        for (k, f) in self.boundary.iter().enumerate() {
            put(
                &format!("boundary.{k}.lambda"),
                join(&f.0[..2 * self.grid.dimension.min(2)]),
            );
        }

        put("lyapunov.enabled", self.lyapunov.enabled.to_string());
        put("lyapunov.p", self.lyapunov.p.to_string());
        put("lyapunov.margin", self.lyapunov.margin.to_string());
        put(
            "lyapunov.variant",
            match self.lyapunov.variant {
                VariantPolicy::Auto => "auto".into(),
                VariantPolicy::Fixed(v) => v.label().into(),
            },
        );

        put("time.horizon", self.time.horizon.to_string());
        put("time.safety", self.time.safety.to_string());
        put("time.cadence", self.time.cadence.to_string());
        if let Some(dt) = self.time.dt {
            put("time.dt", dt.to_string());
        }
        put("time.blowup_threshold", self.time.blowup_threshold.to_string());

        put("output.dir", self.output.dir.clone());
        put("output.formats", self.output.formats.join(", "));
        put("output.lp_orders", join(&self.output.lp_orders));

        let t = &self.tolerances;
        for (k, v) in [
            ("mass_drift", t.mass_drift),
            ("lyapunov_rel", t.lyapunov_rel),
            ("lyapunov_abs", t.lyapunov_abs),
            ("lp_ratio", t.lp_ratio),
            ("i_rel", t.i_rel),
            ("j_rel", t.j_rel),
            ("clamp_fraction", t.clamp_fraction),
        ] {
            put(&format!("tolerances.{k}"), v.to_string());
        }
        out
    }
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn tripled_fields(p: &TripledParams) -> [(&'static str, f64); 8] {
    [
        ("a1", p.a1),
        ("a2", p.a2),
        ("p1", p.p1),
        ("q1", p.q1),
        ("r1", p.r1),
        ("p2", p.p2),
        ("q2", p.q2),
        ("r2", p.r2),
    ]
}

/// Key lookup that records type errors and remembers which keys were read.
struct Reader {
    entries: BTreeMap<String, String>,
    used: std::collections::BTreeSet<String>,
    issues: Vec<ConfigIssue>,
}

impl Reader {
    fn issue(&mut self, key: &str, message: impl Into<String>) {
        self.issues.push(ConfigIssue {
            key: key.into(),
            message: message.into(),
        });
    }

    fn raw(&mut self, key: &str) -> Option<String> {
        let v = self.entries.get(key).cloned();
        if v.is_some() {
            self.used.insert(key.to_string());
        }
        v
    }

    fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn get<T: FromStr>(&mut self, key: &str, default: T, what: &str) -> T {
        match self.raw(key) {
            None => default,
            Some(s) => match s.parse() {
                Ok(v) => v,
                Err(_) => {
                    self.issue(key, format!("expected {what}, got `{s}`"));
                    default
                }
            },
        }
    }

    fn f64(&mut self, key: &str, default: f64) -> f64 {
        self.get(key, default, "a number")
    }

    fn usize(&mut self, key: &str, default: usize) -> usize {
        self.get(key, default, "a nonnegative integer")
    }

    fn list<T: FromStr>(&mut self, key: &str, default: Vec<T>, what: &str) -> Vec<T> {
        let Some(s) = self.raw(key) else {
            return default;
        };
        if s.trim().is_empty() {
            return Vec::new();
        }
        let mut out = Vec::new();
        for item in s.split(',') {
            match item.trim().parse() {
                Ok(v) => out.push(v),
                Err(_) => {
                    self.issue(key, format!("expected a list of {what}, bad item `{}`", item.trim()));
                    return default;
                }
            }
        }
        out
    }

    fn f64_list(&mut self, key: &str, default: Vec<f64>) -> Vec<f64> {
        self.list(key, default, "numbers")
    }

    fn terms(&mut self, key: &str, default: Vec<PairTerm>) -> Vec<PairTerm> {
        let Some(s) = self.raw(key) else {
            return default;
        };
        let mut out = Vec::new();
        for item in s.split(',') {
            let parts: Vec<Result<f64, _>> = item.split(':').map(|p| p.trim().parse()).collect();
            match parts.as_slice() {
                [Ok(c), Ok(a), Ok(b)] => out.push(PairTerm::new(*c, *a, *b)),
                _ => {
                    self.issue(
                        key,
                        format!("expected `coef:u_exp:v_exp` items, bad item `{}`", item.trim()),
                    );
                    return default;
                }
            }
        }
        out
    }
}

/// Parses configuration text; all problems are reported together.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut entries = BTreeMap::new();
    let mut issues = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            issues.push(ConfigIssue {
                key: format!("line {}", n + 1),
                message: format!("expected `key = value`, got `{line}`"),
            });
            continue;
        };
        let k = k.trim().to_string();
        if entries.insert(k.clone(), v.trim().to_string()).is_some() {
            issues.push(ConfigIssue {
                key: k,
                message: "duplicate key".into(),
            });
        }
    }
    let mut r = Reader {
        entries,
        used: Default::default(),
        issues,
    };
    let cfg = read_config(&mut r);
    let unknown: Vec<String> = r
        .entries
        .keys()
        .filter(|k| !r.used.contains(*k))
        .cloned()
        .collect();
    for k in unknown {
        r.issue(&k, "unknown key");
    }
    if r.issues.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError { issues: r.issues })
    }
}

fn read_config(r: &mut Reader) -> RunConfig {
    // grid
    let dimension = r.usize("grid.dimension", 1);
    if !(1..=2).contains(&dimension) {
        r.issue("grid.dimension", format!("must be 1 or 2, got {dimension}"));
    }
    let dim = dimension.clamp(1, 2);
    let flat = r.f64_list("grid.extents", [0.0, 1.0].repeat(dim));
    let mut extents = Vec::new();
    if flat.len() != 2 * dim {
        r.issue(
            "grid.extents",
            format!("expected {} values (lo, hi per axis), got {}", 2 * dim, flat.len()),
        );
        extents = vec![[0.0, 1.0]; dim];
    } else {
        for (axis, c) in flat.chunks(2).enumerate() {
            if !(c[0].is_finite() && c[1].is_finite() && c[0] < c[1]) {
                r.issue(
                    "grid.extents",
                    format!("axis {axis}: need lo < hi, got {} and {}", c[0], c[1]),
                );
            }
            extents.push([c[0], c[1]]);
        }
    }
    let mut cells = r.list("grid.cells", vec![64; dim], "positive integers");
    if cells.len() == 1 && dim == 2 {
        cells.push(cells[0]);
    }
    if cells.len() != dim {
        r.issue(
            "grid.cells",
            format!("expected {dim} values, got {}", cells.len()),
        );
        cells = vec![64; dim];
    }
    for (axis, &n) in cells.iter().enumerate() {
        if n < 3 {
            r.issue(
                "grid.cells",
                format!("axis {axis} needs at least 3 cells, got {n}"),
            );
        }
    }

    // reaction
    let preset = r
        .raw("reaction.preset")
        .unwrap_or_else(|| "reversible_pair".into());
    let reaction = read_reaction(r, &preset);

    // species
    let count_given = r.has("species.count");
    let required = reaction.as_ref().and_then(species_required);
    let count = r.usize("species.count", required.unwrap_or(2));
    if count == 0 {
        r.issue("species.count", "must be at least 1");
    }
    if let (Some(req), true) = (required, count_given) {
        if req != count {
            r.issue(
                "species.count",
                format!("{count} species, but reaction.preset = {preset} needs {req}"),
            );
        }
    }
    let count = required.unwrap_or(count).max(1);
    let diffusion = r.f64_list("species.diffusion", vec![1.0; count]);
    let diffusion = if diffusion.len() == 1 && count > 1 {
        vec![diffusion[0]; count]
    } else {
        diffusion
    };
    if diffusion.len() != count {
        r.issue(
            "species.diffusion",
            format!("expected {count} values, got {}", diffusion.len()),
        );
    }
    for (k, d) in diffusion.iter().enumerate() {
        if !(d.is_finite() && *d >= 0.0) {
            r.issue(
                "species.diffusion",
                format!("coefficient {k} must be finite and >= 0, got {d}"),
            );
        }
    }
    let noise = r.f64("species.noise", 0.0);
    if !(noise.is_finite() && noise >= 0.0) {
        r.issue("species.noise", format!("must be finite and >= 0, got {noise}"));
    }
    let seed = r.get("species.seed", 0u64, "an unsigned integer");
    let init = (0..count).map(|k| read_init(r, k, dim)).collect();

    // boundary
    let uniform = r.f64_list("boundary.lambda", vec![0.0]);
    let uniform = match FaceLambdas::from_slice(&uniform) {
        Ok(f) => f,
        Err(e) => {
            r.issue("boundary.lambda", e.to_string());
            FaceLambdas::NEUMANN
        }
    };
    let mut boundary = Vec::with_capacity(count);
    for k in 0..count {
        let key = format!("boundary.{k}.lambda");
        let faces = match r.raw(&key) {
            None => uniform,
            Some(_) => {
                let vals = r.f64_list(&key, vec![]);
                match FaceLambdas::from_slice(&vals) {
                    Ok(f) => f,
                    Err(e) => {
                        r.issue(&key, e.to_string());
                        uniform
                    }
                }
            }
        };
        let mut faces = faces;
        if dim == 1 {
            faces.0[2] = 0.0;
            faces.0[3] = 0.0;
        }
        boundary.push(faces);
    }

    // lyapunov
    let enabled = r.get("lyapunov.enabled", true, "true or false");
    let p = r.get("lyapunov.p", 4u32, "a positive integer");
    if p == 0 {
        r.issue("lyapunov.p", "degree must be >= 1");
    }
    let margin = r.f64("lyapunov.margin", 2.0);
    if !(margin.is_finite() && margin > 1.0) {
        r.issue("lyapunov.margin", format!("must exceed 1, got {margin}"));
    }
    let variant = match r.raw("lyapunov.variant").as_deref() {
        None | Some("auto") => VariantPolicy::Auto,
        Some(s) => match s.parse::<Variant>() {
            Ok(v) => VariantPolicy::Fixed(v),
            Err(_) => {
                r.issue(
                    "lyapunov.variant",
                    format!("expected auto, decreasing or increasing, got `{s}`"),
                );
                VariantPolicy::Auto
            }
        },
    };
    if enabled && diffusion.len() == count {
        if let Some(kind) = &reaction {
            if let Ok(spec) = build_reaction(kind) {
                for &(i, j) in spec.balance_pairs() {
                    if !(diffusion[i] > 0.0 && diffusion[j] > 0.0) {
                        r.issue(
                            "lyapunov.enabled",
                            format!(
                                "monitoring pair ({i}, {j}) needs positive species.diffusion"
                            ),
                        );
                    }
                }
            }
        }
    }

    // time
    let horizon = r.f64("time.horizon", 1.0);
    if !(horizon.is_finite() && horizon >= 0.0) {
        r.issue("time.horizon", format!("must be finite and >= 0, got {horizon}"));
    }
    let safety = r.f64("time.safety", 0.5);
    if !(safety > 0.0 && safety <= 1.0) {
        r.issue("time.safety", format!("must lie in (0, 1], got {safety}"));
    }
    let cadence = r.usize("time.cadence", 10);
    if cadence == 0 {
        r.issue("time.cadence", "must be >= 1");
    }
    let dt = if r.has("time.dt") {
        let dt = r.f64("time.dt", 0.0);
        if !(dt.is_finite() && dt > 0.0) {
            r.issue("time.dt", format!("must be positive and finite, got {dt}"));
        }
        Some(dt)
    } else {
        None
    };
    if dt.is_none() && diffusion.iter().all(|d| *d == 0.0) && horizon > 0.0 {
        r.issue("time.dt", "required when every diffusion coefficient is 0");
    }
    let blowup_threshold = r.f64("time.blowup_threshold", 1e12);
    if !(blowup_threshold.is_finite() && blowup_threshold > 0.0) {
        r.issue("time.blowup_threshold", "must be positive and finite");
    }

    // output
    let dir = r.raw("output.dir").unwrap_or_else(|| "out".into());
    let formats: Vec<String> = r.list(
        "output.formats",
        vec!["csv".to_string(), "json".to_string()],
        "format names",
    );
    for f in &formats {
        if f != "csv" && f != "json" {
            r.issue("output.formats", format!("unknown format `{f}` (csv, json)"));
        }
    }
    let lp_orders = r.f64_list("output.lp_orders", vec![4.0]);
    for p in &lp_orders {
        if p.is_nan() || *p < 1.0 {
            r.issue("output.lp_orders", format!("norm orders must be >= 1, got {p}"));
        }
    }

    // tolerances
    let d = Tolerances::default();
    let tol = |r: &mut Reader, k: &str, default: f64| {
        let key = format!("tolerances.{k}");
        let v = r.f64(&key, default);
        if !(v.is_finite() && v >= 0.0) {
            r.issue(&key, format!("must be finite and >= 0, got {v}"));
        }
        v
    };
    let tolerances = Tolerances {
        mass_drift: tol(r, "mass_drift", d.mass_drift),
        lyapunov_rel: tol(r, "lyapunov_rel", d.lyapunov_rel),
        lyapunov_abs: tol(r, "lyapunov_abs", d.lyapunov_abs),
        lp_ratio: tol(r, "lp_ratio", d.lp_ratio),
        i_rel: tol(r, "i_rel", d.i_rel),
        j_rel: tol(r, "j_rel", d.j_rel),
        clamp_fraction: tol(r, "clamp_fraction", d.clamp_fraction),
    };

    RunConfig {
        grid: GridConfig {
            dimension: dim,
            extents,
            cells,
        },
        species: SpeciesConfig {
            count,
            diffusion,
            init,
            noise,
            seed,
        },
        reaction: reaction.unwrap_or(ReactionKind::ReversiblePair(ReversibleParams {
            h1: 1.0,
            h2: 1.0,
            l: 1.0,
            q: 1.0,
            r: 1.0,
            s: 1.0,
        })),
        boundary,
        lyapunov: LyapunovConfig {
            enabled,
            p,
            margin,
            variant,
        },
        time: TimeConfig {
            horizon,
            safety,
            cadence,
            dt,
            blowup_threshold,
        },
        output: OutputConfig {
            dir,
            formats,
            lp_orders,
        },
        tolerances,
    }
}

fn read_reaction(r: &mut Reader, preset: &str) -> Option<ReactionKind> {
    let kind = match preset {
        "generic_pair" => ReactionKind::GenericPair {
            terms: r.terms("reaction.terms", vec![PairTerm::new(1.0, 1.0, 1.0)]),
        },
        "spacetime_pair" => {
            let form = r
                .raw("reaction.coefficient")
                .unwrap_or_else(|| "linear_x".into());
            let coefficient = match form.as_str() {
                "constant" => SpacetimeCoefficient::Constant {
                    value: r.f64("reaction.value", 1.0),
                },
                "linear_x" => SpacetimeCoefficient::LinearX {
                    slope: r.f64("reaction.slope", 1.0),
                },
                "cos_t_x" => SpacetimeCoefficient::CosTimesX {
                    omega: r.f64("reaction.omega", 1.0),
                    slope: r.f64("reaction.slope", 1.0),
                },
                other => {
                    r.issue(
                        "reaction.coefficient",
                        format!("unknown form `{other}` (constant, linear_x, cos_t_x)"),
                    );
                    return None;
                }
            };
            ReactionKind::SpacetimePair {
                coefficient,
                psi: r.terms("reaction.psi", vec![PairTerm::new(1.0, 1.0, 1.0)]),
            }
        }
        "reversible_pair" => ReactionKind::ReversiblePair(ReversibleParams {
            h1: r.f64("reaction.h1", 1.0),
            h2: r.f64("reaction.h2", 1.0),
            l: r.f64("reaction.l", 1.0),
            q: r.f64("reaction.q", 1.0),
            r: r.f64("reaction.r", 1.0),
            s: r.f64("reaction.s", 1.0),
        }),
        "tripled" => {
            let mut p = TripledParams::unit();
            let d = p;
            p.a1 = r.f64("reaction.a1", d.a1);
            p.a2 = r.f64("reaction.a2", d.a2);
            p.p1 = r.f64("reaction.p1", d.p1);
            p.q1 = r.f64("reaction.q1", d.q1);
            p.r1 = r.f64("reaction.r1", d.r1);
            p.p2 = r.f64("reaction.p2", d.p2);
            p.q2 = r.f64("reaction.q2", d.q2);
            p.r2 = r.f64("reaction.r2", d.r2);
            ReactionKind::Tripled(p)
        }
        "m_network" => {
            let reactants = r.list("reaction.reactants", vec![0], "species indices");
            let products = r.list("reaction.products", vec![1], "species indices");
            let m = reactants.len() + products.len();
            ReactionKind::Network(NetworkParams {
                orders: r.f64_list("reaction.orders", vec![1.0; m]),
                reactants,
                products,
                h: r.f64("reaction.h", 1.0),
                l: r.f64("reaction.l", 1.0),
            })
        }
        other => {
            r.issue(
                "reaction.preset",
                format!(
                    "unknown preset `{other}` (one of {})",
                    crate::reactions::REACTION_PRESETS.join(", ")
                ),
            );
            return None;
        }
    };
    if let Err(e) = build_reaction(&kind) {
        r.issue("reaction", e);
    }
    Some(kind)
}

fn read_init(r: &mut Reader, k: usize, dim: usize) -> InitialCondition {
    let key = |f: &str| format!("species.{k}.{f}");
    let kind = r.raw(&key("init")).unwrap_or_else(|| "constant".into());
    let ic = match kind.as_str() {
        "constant" => InitialCondition::Constant {
            value: r.f64(&key("value"), 1.0),
        },
        "gaussian" => {
            let c = r.f64_list(&key("center"), vec![0.5; dim]);
            if c.len() != dim {
                r.issue(&key("center"), format!("expected {dim} values, got {}", c.len()));
            }
            let width = r.f64(&key("width"), 0.1);
            if !(width.is_finite() && width > 0.0) {
                r.issue(&key("width"), format!("must be positive, got {width}"));
            }
            InitialCondition::Gaussian {
                base: r.f64(&key("base"), 0.0),
                amplitude: r.f64(&key("amplitude"), 1.0),
                center: [
                    c.first().copied().unwrap_or(0.5),
                    if dim == 2 { c.get(1).copied().unwrap_or(0.5) } else { 0.0 },
                ],
                width,
            }
        }
        "ramp" => InitialCondition::Ramp {
            lo: r.f64(&key("lo"), 0.0),
            hi: r.f64(&key("hi"), 1.0),
        },
        "checkerboard" => InitialCondition::Checkerboard {
            lo: r.f64(&key("lo"), 0.0),
            hi: r.f64(&key("hi"), 1.0),
            block: r.usize(&key("block"), 1),
        },
        other => {
            r.issue(
                &key("init"),
                format!("unknown initial condition `{other}` (constant, gaussian, ramp, checkerboard)"),
            );
            InitialCondition::Constant { value: 1.0 }
        }
    };
    let negative = match ic {
        InitialCondition::Constant { value } => value < 0.0 || !value.is_finite(),
        InitialCondition::Gaussian {
            base, amplitude, ..
        } => !(base >= 0.0 && amplitude >= 0.0 && base.is_finite() && amplitude.is_finite()),
        InitialCondition::Ramp { lo, hi } | InitialCondition::Checkerboard { lo, hi, .. } => {
            !(lo >= 0.0 && hi >= 0.0 && lo.is_finite() && hi.is_finite())
        }
    };
    if negative {
        r.issue(&key("init"), "initial data must be finite and nonnegative");
    }
    ic
}

fn base_config(
    extents: Vec<[f64; 2]>,
    cells: usize,
    diffusion: Vec<f64>,
    reaction: ReactionKind,
    init: Vec<InitialCondition>,
) -> RunConfig {
    let count = diffusion.len();
    RunConfig {
        grid: GridConfig {
            dimension: 1,
            extents,
            cells: vec![cells],
        },
        species: SpeciesConfig {
            count,
            diffusion,
            init,
            noise: 0.0,
            seed: 0,
        },
        reaction,
        boundary: vec![FaceLambdas::NEUMANN; count],
        lyapunov: LyapunovConfig {
            enabled: true,
            p: 4,
            margin: 2.0,
            variant: VariantPolicy::Auto,
        },
        time: TimeConfig {
            horizon: 1.0,
            safety: 0.5,
            cadence: 10,
            dt: None,
            blowup_threshold: 1e12,
        },
        output: OutputConfig {
            dir: "out".into(),
            formats: vec!["csv".into(), "json".into()],
            lp_orders: vec![4.0],
        },
        tolerances: Tolerances::default(),
    }
}

fn bump(base: f64, amplitude: f64, center: f64, width: f64) -> InitialCondition {
    InitialCondition::Gaussian {
        base,
        amplitude,
        center: [center, 0.0],
        width,
    }
}

/// A complete runnable scenario by name.
pub fn preset(name: &str) -> Result<RunConfig, ConfigError> {
    let unit = vec![[0.0, 1.0]];
    let cfg = match name {
        "pair_generic" => base_config(
            unit,
            128,
            vec![1.0, 3.0],
            ReactionKind::GenericPair {
                terms: vec![PairTerm::new(1.0, 1.0, 1.0), PairTerm::new(-0.5, 1.0, 2.0)],
            },
            vec![bump(0.2, 1.0, 0.3, 0.1), bump(0.5, 0.5, 0.7, 0.15)],
        ),
        "pair_spacetime" => base_config(
            vec![[-1.0, 1.0]],
            128,
            vec![1.0, 2.0],
            ReactionKind::SpacetimePair {
                coefficient: SpacetimeCoefficient::LinearX { slope: 1.0 },
                psi: vec![PairTerm::new(1.0, 1.0, 1.0)],
            },
            vec![
                InitialCondition::Constant { value: 1.0 },
                bump(0.5, 1.0, 0.0, 0.3),
            ],
        ),
        "pair_reversible" => base_config(
            unit,
            128,
            vec![1.0, 2.0],
            ReactionKind::ReversiblePair(ReversibleParams {
                h1: 1.0,
                h2: 1.0,
                l: 2.0,
                q: 1.0,
                r: 1.0,
                s: 2.0,
            }),
            vec![bump(0.5, 1.0, 0.3, 0.1), InitialCondition::Ramp { lo: 0.2, hi: 0.8 }],
        ),
        "tripled" => base_config(
            unit,
            64,
            vec![1.0, 2.0, 3.0],
            ReactionKind::Tripled(TripledParams::unit()),
            vec![
                bump(0.5, 1.0, 0.25, 0.1),
                bump(0.5, 1.0, 0.75, 0.1),
                InitialCondition::Constant { value: 0.5 },
            ],
        ),
        "m_chain" => base_config(
            unit,
            64,
            vec![1.0, 2.0, 3.0, 4.0],
            ReactionKind::Network(NetworkParams {
                orders: vec![1.0; 4],
                reactants: vec![0, 2],
                products: vec![1, 3],
                h: 1.0,
                l: 1.0,
            }),
            vec![
                bump(0.5, 1.0, 0.3, 0.1),
                InitialCondition::Ramp { lo: 0.1, hi: 0.9 },
                bump(0.5, 1.0, 0.7, 0.1),
                InitialCondition::Constant { value: 0.4 },
            ],
        ),
        other => {
            return Err(ConfigError {
                issues: vec![ConfigIssue {
                    key: "preset".into(),
                    message: format!("unknown preset `{other}` (one of {})", PRESETS.join(", ")),
                }],
            })
        }
    };
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lyapunov::{choose_coefficients, quadratic_form_certificate};

    const MINIMAL: &str = "reaction.preset = reversible_pair\n";

    fn keys(e: &ConfigError) -> Vec<&str> {
        e.issues.iter().map(|i| i.key.as_str()).collect()
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.grid.dimension, 1);
        assert_eq!(c.grid.cells, vec![64]);
        assert_eq!(c.species.count, 2);
        assert_eq!(c.species.diffusion, vec![1.0, 1.0]);
        assert_eq!(c.time.cadence, 10);
        assert_eq!(c.lyapunov.variant, VariantPolicy::Auto);
        assert_eq!(c.tolerances, Tolerances::default());
        assert!(c.boundary.iter().all(|f| *f == FaceLambdas::NEUMANN));
    }

    #[test]
    fn arity_error_names_both_keys() {
        let e = parse_config("species.count = 3\nreaction.preset = reversible_pair\n").unwrap_err();
        let issue = e.issues.iter().find(|i| i.key == "species.count").unwrap();
        assert!(issue.message.contains("reaction.preset"), "{issue}");
    }

    #[test]
    fn negative_diffusion_rejected() {
        let e = parse_config("species.diffusion = 1, -2\n").unwrap_err();
        assert!(keys(&e).contains(&"species.diffusion"));
    }

    #[test]
    fn all_issues_reported() {
        let text = "grid.cells = 2\nspecies.diffusion = x\nbogus.key = 1\ntime.safety = 3\n";
        let e = parse_config(text).unwrap_err();
        let k = keys(&e);
        for want in ["grid.cells", "species.diffusion", "bogus.key", "time.safety"] {
            assert!(k.contains(&want), "{want} missing from {k:?}");
        }
    }

    #[test]
    fn unknown_preset_and_initial_condition() {
        let e = parse_config("reaction.preset = nope\nspecies.0.init = wave\n").unwrap_err();
        let k = keys(&e);
        assert!(k.contains(&"reaction.preset"));
        assert!(k.contains(&"species.0.init"));
        assert!(preset("nope").is_err());
    }

    #[test]
    fn presets_round_trip() {
        for name in PRESETS {
            let c = preset(name).unwrap();
            let back = parse_config(&c.serialize()).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(back, c, "{name}");
        }
    }

    #[test]
    fn presets_validate_and_certify() {
        for name in PRESETS {
            let c = preset(name).unwrap();
            let s = c.build().unwrap();
            let report = s.spec.validate();
            assert!(report.pass(), "{name}: {:?}", report.messages);
            for &(i, j) in s.spec.balance_pairs() {
                let (a, b) = (c.species.diffusion[i], c.species.diffusion[j]);
                let (dec, inc) = choose_coefficients(a, b, c.lyapunov.p, c.lyapunov.margin).unwrap();
                assert!(quadratic_form_certificate(a, b, &dec).pass, "{name}");
                assert!(quadratic_form_certificate(a, b, &inc).pass, "{name}");
            }
        }
    }

    #[test]
    fn spacetime_preset_vanishes_at_origin() {
        let s = preset("pair_spacetime").unwrap().build().unwrap();
        assert_eq!(s.spec.rate(0.3, &[0.0, 0.0], &[1.7, 2.3]), 0.0);
    }

    #[test]
    fn two_dimensional_config() {
        let text = "grid.dimension = 2\ngrid.extents = 0, 1, 0, 2\ngrid.cells = 8, 16\n\
                    species.0.init = checkerboard\nspecies.0.block = 2\nspecies.1.init = gaussian\n\
                    species.1.center = 0.5, 1\nboundary.1.lambda = 0, 0, 1, 1\n";
        let c = parse_config(text).unwrap();
        assert_eq!(parse_config(&c.serialize()).unwrap(), c);
        let s = c.build().unwrap();
        assert_eq!(s.initial.grid.len(), 128);
        assert!(!s.bc.all_neumann(2));
        let board = &s.initial.species[0];
        assert_eq!((board[0], board[2], board[8], board[16]), (0.0, 1.0, 0.0, 1.0));
    }

    #[test]
    fn noise_is_seeded() {
        let text = "species.noise = 0.1\nspecies.seed = 7\n";
        let a = parse_config(text).unwrap().build().unwrap();
        let b = parse_config(text).unwrap().build().unwrap();
        assert_eq!(a.initial.species, b.initial.species);
        assert!(a.initial.species[0].iter().any(|v| *v != 1.0));
    }

    #[test]
    fn zero_diffusion_needs_fixed_dt_and_no_monitor() {
        let e = parse_config("species.diffusion = 0\n").unwrap_err();
        let k = keys(&e);
        assert!(k.contains(&"time.dt"));
        assert!(k.contains(&"lyapunov.enabled"));
        parse_config("species.diffusion = 0\ntime.dt = 0.01\nlyapunov.enabled = false\n").unwrap();
    }
}
