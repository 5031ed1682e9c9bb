use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("dimension must be 1 or 2, got {0}")]
    BadDimension(usize),
    #[error("expected {expected} values for {what}, got {got}")]
    Arity {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("degenerate extent on axis {axis}: lo={lo} must be < hi={hi}")]
    DegenerateExtent { axis: usize, lo: f64, hi: f64 },
    #[error("axis {axis} needs at least 3 cells, got {cells}")]
    TooFewCells { axis: usize, cells: usize },
    #[error("field has {got} values but grid has {expected} cells")]
    SizeMismatch { expected: usize, got: usize },
    #[error("boundary lambda must lie in [0, 1], got {0}")]
    BadLambda(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReactionError {
    #[error("non-finite concentration for species {species} at cell {cell}, t={t}")]
    NonFinite { species: usize, cell: usize, t: f64 },
    #[error("expected {expected} concentrations, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("invalid reaction parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown reaction preset `{0}`")]
    UnknownPreset(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LyapunovError {
    #[error("binomial arguments out of range: p={p}, i={i} (need 0 <= i <= p <= 60)")]
    BinomRange { p: u32, i: u32 },
    #[error("diffusion coefficients must be positive, got a={a}, b={b}")]
    NonPositiveDiffusion { a: f64, b: f64 },
    #[error("degree must be >= 1")]
    ZeroDegree,
    #[error("margin must exceed 1, got {0}")]
    BadMargin(f64),
    #[error("K and scale must be positive and finite, got K={k}, scale={scale}")]
    BadConstant { k: f64, scale: f64 },
    #[error("theta sequence leaves the floating-point range: (p^2+1)|ln K| + (p+1)|ln scale| = {0:.1} > 600")]
    Overflow(f64),
    #[error("scale {scale} does not give a {variant} theta sequence for K={k}, p={p}")]
    NotMonotone {
        variant: &'static str,
        scale: f64,
        k: f64,
        p: u32,
    },
    #[error("species pair ({0}, {1}) is out of range or degenerate")]
    BadPair(usize, usize),
    #[error("discrete I requires homogeneous Neumann boundaries on the monitored pair")]
    NonNeumann,
    #[error(transparent)]
    Reaction(#[from] ReactionError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("norm order must be >= 1, got {0}")]
    BadOrder(f64),
    #[error("species pair ({0}, {1}) is out of range")]
    BadPair(usize, usize),
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RunError {
    #[error("time step {dt} exceeds the stability limit {limit}")]
    DtAboveCfl { dt: f64, limit: f64 },
    #[error("time step must be positive and finite, got {0}")]
    BadDt(f64),
    #[error("no diffusion present; a fixed time step is required")]
    NoStabilityLimit,
    #[error("initial data must be finite and nonnegative (species {species}, cell {cell}, value {value})")]
    BadInitialData {
        species: usize,
        cell: usize,
        value: f64,
    },
    #[error("state/spec mismatch: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Lyapunov(#[from] LyapunovError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
}

/// One problem found while reading a configuration, tagged with the key path.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{key}: {message}")]
pub struct ConfigIssue {
    pub key: String,
    pub message: String,
}

/// All problems found in one configuration (never just the first).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub issues: Vec<ConfigIssue>,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (n, issue) in self.issues.iter().enumerate() {
            if n > 0 {
                writeln!(f)?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}
