//! Reaction right-hand sides with balance-law structure.
//!
//! Every family here is a single reaction channel: one scalar rate `φ` and a
//! stoichiometric sign per species, so that `f_k = ±φ` (or 0). A balance
//! pair `(i, j)` has opposite signs, and `f_i + f_j` is exactly zero in
//! floating point because `φ` is computed once and negated.
//!
//! Closed-form justification for the built-in families:
//!
//! * pair families (`generic_pair`, `spacetime_pair`, `reversible_pair`):
//!   `f = −φ`, `g = φ`. When every monomial has positive exponents in both
//!   `u` and `v`, `φ(u, 0) = φ(0, v) = 0`.
//! * `tripled`: `f_u = f_v = φ`, `f_w = −φ` with
//!   `φ = a1 u^p1 v^q1 w^r1 − a2 u^p2 v^q2 w^r2`; pairs `(u, w)` and `(v, w)`.
//! * `m_network`: `φ = h Π_{i∈I} c_i^{n_i} − l Π_{j∈J} c_j^{n_j}`, with
//!   `f_k = −φ` on `I` and `+φ` on `J`. If `c_k = 0` for `k ∈ I`, only the
//!   `J` product survives and `f_k = l Π_J ≥ 0` (symmetrically for `J`).
//!
//! Growth: a monomial of total degree `d ≤ r` obeys
//! `Π c_k^{e_k} ≤ (Σ c_k)^d ≤ 1 + (Σ c_k)^r`, hence
//! `|φ| ≤ C1 + C2 (Σ c_k)^r` with `C1 = C2 = sup|c(t,x)| · Σ|coef|`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ReactionError;
use crate::grid::Grid;
use crate::numeric::mono_pow;

/// `coefficient · Π_k c_k^{exponents[k]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coefficient: f64,
    pub exponents: Vec<f64>,
}

impl Monomial {
    #[inline]
    fn eval(&self, conc: &[f64]) -> f64 {
        let mut v = self.coefficient;
        for (&c, &e) in conc.iter().zip(&self.exponents) {
            if e != 0.0 {
                v *= mono_pow(c, e);
            }
        }
        v
    }

    fn degree(&self) -> f64 {
        self.exponents.iter().sum()
    }
}

/// One term `coefficient · u^u_exp · v^v_exp` of a two-species rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairTerm {
    pub coefficient: f64,
    pub u_exp: f64,
    pub v_exp: f64,
}

impl PairTerm {
    pub fn new(coefficient: f64, u_exp: f64, v_exp: f64) -> Self {
        Self {
            coefficient,
            u_exp,
            v_exp,
        }
    }
}

/// Named space-time multipliers `c(t, x)`; `x` is the first coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum SpacetimeCoefficient {
    Constant { value: f64 },
    LinearX { slope: f64 },
    CosTimesX { omega: f64, slope: f64 },
}

impl SpacetimeCoefficient {
    #[inline]
    pub fn eval(&self, t: f64, x: &[f64]) -> f64 {
        match *self {
            Self::Constant { value } => value,
            Self::LinearX { slope } => slope * x[0],
            Self::CosTimesX { omega, slope } => (omega * t).cos() * slope * x[0],
        }
    }

    /// Supremum of `|c|` over the probe box `x ∈ [−1, 1]^d`, `t ≥ 0`.
    pub fn probe_bound(&self) -> f64 {
        match *self {
            Self::Constant { value } => value.abs(),
            Self::LinearX { slope } | Self::CosTimesX { slope, .. } => slope.abs(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Constant { .. } => "constant",
            Self::LinearX { .. } => "linear_x",
            Self::CosTimesX { .. } => "cos_t_x",
        }
    }
}

/// `lA + qB ⇌ rA + sB` with forward rate `h1` and backward rate `h2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReversibleParams {
    pub h1: f64,
    pub h2: f64,
    pub l: f64,
    pub q: f64,
    pub r: f64,
    pub s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripledParams {
    pub a1: f64,
    pub a2: f64,
    pub p1: f64,
    pub q1: f64,
    pub r1: f64,
    pub p2: f64,
    pub q2: f64,
    pub r2: f64,
}

impl TripledParams {
    /// Unit rates and unit exponents.
    pub fn unit() -> Self {
        Self {
            a1: 1.0,
            a2: 1.0,
            p1: 1.0,
            q1: 1.0,
            r1: 1.0,
            p2: 1.0,
            q2: 1.0,
            r2: 1.0,
        }
    }
}

/// `Σ_{I} n_i R_i ⇌ Σ_{J} n_j R_j`; species indices are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    pub orders: Vec<f64>,
    pub reactants: Vec<usize>,
    pub products: Vec<usize>,
    pub h: f64,
    pub l: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReactionKind {
    /// `φ(u, v) = Σ terms`.
    GenericPair { terms: Vec<PairTerm> },
    /// `φ(t, x, u, v) = c(t, x) · ψ(u, v)`.
    SpacetimePair {
        coefficient: SpacetimeCoefficient,
        psi: Vec<PairTerm>,
    },
    ReversiblePair(ReversibleParams),
    Tripled(TripledParams),
    #[serde(rename = "m_network")]
    Network(NetworkParams),
    /// Negative control for mass diagnostics: scales the second species of
    /// the first balance pair by `1 - leak`, breaking the pairing.
    #[doc(hidden)]
    Unbalanced { inner: Box<ReactionSpec>, leak: f64 },
}

/// A validated-at-construction reaction: kind parameters plus the compiled
/// monomial form, balance pairs and growth constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReactionSpec {
    kind: ReactionKind,
    species_count: usize,
    monomials: Vec<Monomial>,
    signs: Vec<i8>,
    multiplier: SpacetimeCoefficient,
    balance_pairs: Vec<(usize, usize)>,
    growth_degree: f64,
    growth_c1: f64,
    growth_c2: f64,
}

const UNIT: SpacetimeCoefficient = SpacetimeCoefficient::Constant { value: 1.0 };

fn check_finite_nonneg(name: &str, v: f64) -> Result<(), ReactionError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(ReactionError::InvalidParameter(format!(
            "{name} must be finite and >= 0, got {v}"
        )))
    }
}

fn check_positive(name: &str, v: f64) -> Result<(), ReactionError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ReactionError::InvalidParameter(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

fn pair_monomials(terms: &[PairTerm]) -> Result<Vec<Monomial>, ReactionError> {
    if terms.is_empty() {
        return Err(ReactionError::InvalidParameter(
            "at least one term is required".into(),
        ));
    }
    terms
        .iter()
        .map(|t| {
            if !t.coefficient.is_finite() {
                return Err(ReactionError::InvalidParameter(format!(
                    "term coefficient must be finite, got {}",
                    t.coefficient
                )));
            }
            check_finite_nonneg("u exponent", t.u_exp)?;
            check_finite_nonneg("v exponent", t.v_exp)?;
            Ok(Monomial {
                coefficient: t.coefficient,
                exponents: vec![t.u_exp, t.v_exp],
            })
        })
        .collect()
}

impl ReactionSpec {
    fn compile(
        kind: ReactionKind,
        monomials: Vec<Monomial>,
        signs: Vec<i8>,
        multiplier: SpacetimeCoefficient,
        balance_pairs: Vec<(usize, usize)>,
    ) -> Self {
        let species_count = signs.len();
        let degree = monomials.iter().map(Monomial::degree).fold(1.0, f64::max);
        let coef_sum: f64 = monomials.iter().map(|m| m.coefficient.abs()).sum();
        let c = multiplier.probe_bound() * coef_sum;
        Self {
            kind,
            species_count,
            monomials,
            signs,
            multiplier,
            balance_pairs,
            growth_degree: degree,
            growth_c1: c,
            growth_c2: c,
        }
    }

    pub fn generic_pair(terms: Vec<PairTerm>) -> Result<Self, ReactionError> {
        let monomials = pair_monomials(&terms)?;
        Ok(Self::compile(
            ReactionKind::GenericPair { terms },
            monomials,
            vec![-1, 1],
            UNIT,
            vec![(0, 1)],
        ))
    }

    pub fn spacetime_pair(
        coefficient: SpacetimeCoefficient,
        psi: Vec<PairTerm>,
    ) -> Result<Self, ReactionError> {
        let monomials = pair_monomials(&psi)?;
        let ok = match coefficient {
            SpacetimeCoefficient::Constant { value } => value.is_finite(),
            SpacetimeCoefficient::LinearX { slope } => slope.is_finite(),
            SpacetimeCoefficient::CosTimesX { omega, slope } => {
                omega.is_finite() && slope.is_finite()
            }
        };
        if !ok {
            return Err(ReactionError::InvalidParameter(
                "space-time coefficient parameters must be finite".into(),
            ));
        }
        Ok(Self::compile(
            ReactionKind::SpacetimePair { coefficient, psi },
            monomials,
            vec![-1, 1],
            coefficient,
            vec![(0, 1)],
        ))
    }

    pub fn reversible_pair(p: ReversibleParams) -> Result<Self, ReactionError> {
        check_positive("h1", p.h1)?;
        check_positive("h2", p.h2)?;
        for (name, v) in [("l", p.l), ("q", p.q), ("r", p.r), ("s", p.s)] {
            check_finite_nonneg(name, v)?;
        }
        let monomials = vec![
            Monomial {
                coefficient: p.h1,
                exponents: vec![p.l, p.q],
            },
            Monomial {
                coefficient: -p.h2,
                exponents: vec![p.r, p.s],
            },
        ];
        Ok(Self::compile(
            ReactionKind::ReversiblePair(p),
            monomials,
            vec![-1, 1],
            UNIT,
            vec![(0, 1)],
        ))
    }

    pub fn tripled(p: TripledParams) -> Result<Self, ReactionError> {
        check_positive("a1", p.a1)?;
        check_positive("a2", p.a2)?;
        for (name, v) in [
            ("p1", p.p1),
            ("q1", p.q1),
            ("r1", p.r1),
            ("p2", p.p2),
            ("q2", p.q2),
            ("r2", p.r2),
        ] {
            check_finite_nonneg(name, v)?;
        }
        let monomials = vec![
            Monomial {
                coefficient: p.a1,
                exponents: vec![p.p1, p.q1, p.r1],
            },
            Monomial {
                coefficient: -p.a2,
                exponents: vec![p.p2, p.q2, p.r2],
            },
        ];
        Ok(Self::compile(
            ReactionKind::Tripled(p),
            monomials,
            vec![1, 1, -1],
            UNIT,
            vec![(0, 2), (1, 2)],
        ))
    }

    pub fn network(p: NetworkParams) -> Result<Self, ReactionError> {
        let m = p.orders.len();
        if m < 2 {
            return Err(ReactionError::InvalidParameter(
                "a network needs at least two species".into(),
            ));
        }
        check_positive("h", p.h)?;
        check_positive("l", p.l)?;
        for (k, &n) in p.orders.iter().enumerate() {
            check_finite_nonneg(&format!("orders[{k}]"), n)?;
        }
        if p.reactants.is_empty() || p.products.is_empty() {
            return Err(ReactionError::InvalidParameter(
                "reactant and product index sets must be nonempty".into(),
            ));
        }
        let mut signs = vec![0i8; m];
        for (set, sign) in [(&p.reactants, -1i8), (&p.products, 1i8)] {
            for &k in set.iter() {
                if k >= m {
                    return Err(ReactionError::InvalidParameter(format!(
                        "species index {k} out of range for {m} species"
                    )));
                }
                if signs[k] != 0 {
                    return Err(ReactionError::InvalidParameter(format!(
                        "species {k} appears twice in the reactant/product partition"
                    )));
                }
                signs[k] = sign;
            }
        }
        if let Some(k) = signs.iter().position(|&s| s == 0) {
            return Err(ReactionError::InvalidParameter(format!(
                "species {k} is in neither the reactant nor the product set"
            )));
        }
        let project = |set: &[usize]| {
            let mut e = vec![0.0; m];
            for &k in set {
                e[k] = p.orders[k];
            }
            e
        };
        let monomials = vec![
            Monomial {
                coefficient: p.h,
                exponents: project(&p.reactants),
            },
            Monomial {
                coefficient: -p.l,
                exponents: project(&p.products),
            },
        ];
        let mut reactants = p.reactants.clone();
        let mut products = p.products.clone();
        reactants.sort_unstable();
        products.sort_unstable();
        let mut pairs = Vec::new();
        for (n, &i) in reactants.iter().enumerate() {
            pairs.push((i, products[n.min(products.len() - 1)]));
        }
        for &j in products.iter().skip(reactants.len()) {
            pairs.push((reactants[0], j));
        }
        Ok(Self::compile(
            ReactionKind::Network(p),
            monomials,
            signs,
            UNIT,
            pairs,
        ))
    }

    #[doc(hidden)]
    pub fn unbalanced(inner: ReactionSpec, leak: f64) -> Self {
        let mut spec = inner.clone();
        spec.kind = ReactionKind::Unbalanced {
            inner: Box::new(inner),
            leak,
        };
        spec
    }

    pub fn kind(&self) -> &ReactionKind {
        &self.kind
    }

    /// Preset name of the family.
    pub fn name(&self) -> &'static str {
        match &self.kind {
            ReactionKind::GenericPair { .. } => "generic_pair",
            ReactionKind::SpacetimePair { .. } => "spacetime_pair",
            ReactionKind::ReversiblePair(_) => "reversible_pair",
            ReactionKind::Tripled(_) => "tripled",
            ReactionKind::Network(_) => "m_network",
            ReactionKind::Unbalanced { .. } => "unbalanced",
        }
    }

    pub fn species_count(&self) -> usize {
        self.species_count
    }

    pub fn balance_pairs(&self) -> &[(usize, usize)] {
        &self.balance_pairs
    }

    pub fn growth_degree(&self) -> f64 {
        self.growth_degree
    }

    /// `(C1, C2)` of the growth bound.
    pub fn growth_constants(&self) -> (f64, f64) {
        (self.growth_c1, self.growth_c2)
    }

    /// Stoichiometric sign of each species (`f_k = sign_k · φ`).
    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    fn is_pair_family(&self) -> bool {
        matches!(
            self.kind,
            ReactionKind::GenericPair { .. }
                | ReactionKind::SpacetimePair { .. }
                | ReactionKind::ReversiblePair(_)
        )
    }

    fn declared_exponents(&self) -> Vec<f64> {
        match &self.kind {
            ReactionKind::GenericPair { terms } => {
                terms.iter().flat_map(|t| [t.u_exp, t.v_exp]).collect()
            }
            ReactionKind::SpacetimePair { psi, .. } => {
                psi.iter().flat_map(|t| [t.u_exp, t.v_exp]).collect()
            }
            ReactionKind::ReversiblePair(p) => vec![p.l, p.q, p.r, p.s],
            ReactionKind::Tripled(p) => vec![p.p1, p.q1, p.r1, p.p2, p.q2, p.r2],
            ReactionKind::Network(p) => p.orders.clone(),
            ReactionKind::Unbalanced { inner, .. } => inner.declared_exponents(),
        }
    }

    /// The scalar rate `φ(t, x, c)`, with negative concentrations read as 0.
    #[inline]
    pub fn rate(&self, t: f64, x: &[f64], conc: &[f64]) -> f64 {
        let mut phi = 0.0;
        for m in &self.monomials {
            phi += m.eval(conc);
        }
        phi * self.multiplier.eval(t, x)
    }

    /// Sum of absolute values of the rate's terms; a magnitude scale for
    /// relative tolerances.
    fn rate_scale(&self, t: f64, x: &[f64], conc: &[f64]) -> f64 {
        let terms: f64 = self.monomials.iter().map(|m| m.eval(conc).abs()).sum();
        terms * self.multiplier.eval(t, x).abs()
    }

    /// Evaluates the reaction vector at one point into `out`.
    ///
    /// Returns the number of negative concentrations that were read as 0.
    /// `cell` only labels errors.
    pub fn eval_rhs(
        &self,
        t: f64,
        cell: usize,
        x: &[f64],
        conc: &[f64],
        out: &mut [f64],
    ) -> Result<usize, ReactionError> {
        if conc.len() != self.species_count || out.len() != self.species_count {
            return Err(ReactionError::Arity {
                expected: self.species_count,
                got: conc.len().min(out.len()),
            });
        }
        let mut clamped = 0;
        for (species, &c) in conc.iter().enumerate() {
            if !c.is_finite() {
                return Err(ReactionError::NonFinite { species, cell, t });
            }
            if c < 0.0 {
                clamped += 1;
            }
        }
        let phi = self.rate(t, x, conc);
        let neg = -phi;
        for (o, &s) in out.iter_mut().zip(&self.signs) {
            *o = match s {
                1 => phi,
                -1 => neg,
                _ => 0.0,
            };
        }
        if let ReactionKind::Unbalanced { leak, .. } = self.kind {
            let (_, j) = self.balance_pairs[0];
            out[j] *= 1.0 - leak;
        }
        Ok(clamped)
    }

    /// Evaluates the reaction at every cell of `grid`. `species[k]` holds the
    /// cell values of species `k`; results go to `out[k]`. Returns the total
    /// clamp count.
    pub fn eval_field(
        &self,
        t: f64,
        grid: &Grid,
        species: &[Vec<f64>],
        out: &mut [Vec<f64>],
    ) -> Result<usize, ReactionError> {
        let m = self.species_count;
        if species.len() != m || out.len() != m {
            return Err(ReactionError::Arity {
                expected: m,
                got: species.len().min(out.len()),
            });
        }
        let mut conc = vec![0.0; m];
        let mut rhs = vec![0.0; m];
        let mut clamped = 0;
        for cell in 0..grid.len() {
            for k in 0..m {
                conc[k] = species[k][cell];
            }
            let x = grid.cell_center(cell);
            clamped += self.eval_rhs(t, cell, &x, &conc, &mut rhs)?;
            for k in 0..m {
                out[k][cell] = rhs[k];
            }
        }
        Ok(clamped)
    }

    /// Samples the quasi-positivity, balance and growth conditions.
    pub fn validate(&self) -> ValidationReport {
        validate_spec(self)
    }
}

/// Outcome of [`validate_spec`]: one verdict per condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub balance: bool,
    pub quasi_positivity: bool,
    pub growth: bool,
    pub exponents: bool,
    pub growth_degree: f64,
    pub growth_c1: f64,
    pub growth_c2: f64,
    pub samples: usize,
    pub messages: Vec<String>,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.balance && self.quasi_positivity && self.growth && self.exponents
    }
}

/// Number of boundary sample points used by [`validate_spec`].
pub const VALIDATION_SAMPLES: usize = 1000;
const VALIDATION_SEED: u64 = 0x5eed_0001;

/// Checks the balance law symbolically and by evaluation, and samples
/// quasi-positivity and polynomial growth on points with one coordinate 0
/// and the others log-uniform in `[1e-6, 1e3]`.
pub fn validate_spec(spec: &ReactionSpec) -> ValidationReport {
    let m = spec.species_count;
    let mut messages = Vec::new();

    let mut balance = !spec.balance_pairs.is_empty();
    for &(i, j) in &spec.balance_pairs {
        if i >= m || j >= m || i == j || spec.signs[i] == 0 || spec.signs[i] != -spec.signs[j] {
            balance = false;
            messages.push(format!("balance pair ({i}, {j}) is not symbolically paired"));
        }
    }
    if m >= 3 || !spec.is_pair_family() {
        for k in 0..m {
            if !spec.balance_pairs.iter().any(|&(i, j)| i == k || j == k) {
                balance = false;
                messages.push(format!("species {k} belongs to no balance pair"));
            }
        }
    }

    let exponents = spec.declared_exponents().iter().all(|&e| e >= 1.0);
    if !exponents {
        messages.push("all exponents must be >= 1".into());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(VALIDATION_SEED);
    let mut conc = vec![0.0; m];
    let mut out = vec![0.0; m];
    let mut qp_fail = 0usize;
    let mut growth_fail = 0usize;
    let mut balance_fail = 0usize;
    let r = spec.growth_degree;
    let (c1, c2) = (spec.growth_c1, spec.growth_c2);
    for n in 0..VALIDATION_SAMPLES {
        let zero = n % m;
        for (k, c) in conc.iter_mut().enumerate() {
            *c = if k == zero {
                0.0
            } else {
                10f64.powf(rng.gen_range(-6.0..3.0))
            };
        }
        let t = rng.gen_range(0.0..10.0);
        let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        if spec.eval_rhs(t, n, &x, &conc, &mut out).is_err() {
            qp_fail += 1;
            continue;
        }
        let scale = spec.rate_scale(t, &x, &conc);
        let tol = 1e-14 * scale;
        let qp_ok = if spec.is_pair_family() {
            out[zero].abs() <= tol
        } else {
            out[zero] >= -tol
        };
        if !qp_ok {
            qp_fail += 1;
        }
        // Cancellation is checked in the interior, where every channel is live.
        conc[zero] = 10f64.powf(rng.gen_range(-6.0..3.0));
        if spec.eval_rhs(t, n, &x, &conc, &mut out).is_ok() {
            for &(i, j) in &spec.balance_pairs {
                if i < m && j < m && out[i] + out[j] != 0.0 {
                    balance_fail += 1;
                }
            }
        }
        let phi = spec.rate(t, &x, &conc).abs();
        let total: f64 = conc.iter().sum();
        let bound = c1 + c2 * total.powf(r);
        if phi > bound * (1.0 + 1e-12) {
            growth_fail += 1;
        }
    }
    if qp_fail > 0 {
        messages.push(format!(
            "quasi-positivity violated at {qp_fail} of {VALIDATION_SAMPLES} boundary samples"
        ));
    }
    if balance_fail > 0 {
        balance = false;
        messages.push(format!(
            "pairwise cancellation failed at {balance_fail} sample evaluations"
        ));
    }
    if growth_fail > 0 {
        messages.push(format!(
            "growth bound |phi| <= {c1} + {c2} (sum c)^{r} violated at {growth_fail} samples"
        ));
    }

    ValidationReport {
        balance,
        quasi_positivity: qp_fail == 0,
        growth: growth_fail == 0,
        exponents,
        growth_degree: r,
        growth_c1: c1,
        growth_c2: c2,
        samples: VALIDATION_SAMPLES,
        messages,
    }
}

/// Sign of a reaction component over all cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SignClass {
    /// Identically zero: both nonnegative and nonpositive.
    #[serde(rename = "zero")]
    Zero,
    #[serde(rename = "all_nonneg")]
    NonNeg,
    #[serde(rename = "all_nonpos")]
    NonPos,
    #[serde(rename = "mixed")]
    Mixed,
}

impl SignClass {
    pub fn classify(values: impl IntoIterator<Item = f64>) -> Self {
        let (mut pos, mut neg) = (false, false);
        for v in values {
            if v > 0.0 {
                pos = true;
            } else if v < 0.0 {
                neg = true;
            } else if v.is_nan() {
                return Self::Mixed;
            }
        }
        match (pos, neg) {
            (false, false) => Self::Zero,
            (true, false) => Self::NonNeg,
            (false, true) => Self::NonPos,
            (true, true) => Self::Mixed,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Zero => "zero",
            Self::NonNeg => "all_nonneg",
            Self::NonPos => "all_nonpos",
            Self::Mixed => "mixed",
        }
    }

    pub fn is_nonpos(&self) -> bool {
        matches!(self, Self::Zero | Self::NonPos)
    }

    pub fn is_nonneg(&self) -> bool {
        matches!(self, Self::Zero | Self::NonNeg)
    }
}

/// Classifies `f_i` over all cells for every balance pair `(i, j)`.
/// Non-finite evaluations classify as mixed.
pub fn sign_profile(
    spec: &ReactionSpec,
    t: f64,
    grid: &Grid,
    species: &[Vec<f64>],
) -> Vec<SignClass> {
    let m = spec.species_count();
    let mut out: Vec<Vec<f64>> = vec![vec![0.0; grid.len()]; m];
    match spec.eval_field(t, grid, species, &mut out) {
        Ok(_) => spec
            .balance_pairs
            .iter()
            .map(|&(i, _)| SignClass::classify(out[i].iter().copied()))
            .collect(),
        Err(_) => vec![SignClass::Mixed; spec.balance_pairs.len()],
    }
}

/// Reaction preset names accepted by the configuration.
pub const REACTION_PRESETS: [&str; 5] = [
    "generic_pair",
    "spacetime_pair",
    "reversible_pair",
    "tripled",
    "m_network",
];
