//! Polynomial Lyapunov functional for a balance pair `(u, v)`:
//!
//! ```text
//! L(t) = ∫_Ω H_p(u, v) dx,    H_p(u, v) = Σ_{i=0}^{p} C(p, i) θ_i u^i v^{p−i},
//! θ_i = scale^{i+1} K^{i²}.
//! ```
//!
//! `L` is the plain integral (no `1/|Ω|` factor), unlike the normalised
//! norms in [`crate::diagnostics`].
//!
//! Along a solution of `u_t = aΔu + f`, `v_t = bΔv − f` with no-flux
//! boundaries, `dL/dt = I + J` where
//!
//! ```text
//! I = −p(p−1) Σ_{i=0}^{p−2} C(p−2, i) ∫ u^i v^{p−2−i}
//!         (a θ_{i+2} |∇u|² + (a+b) θ_{i+1} ∇u·∇v + b θ_i |∇v|²) dx
//! J =  p Σ_{i=0}^{p−1} C(p−1, i) ∫ (θ_{i+1} − θ_i) f u^i v^{p−1−i} dx.
//! ```
//!
//! The ratio `θ_i θ_{i+2} / θ_{i+1}² = K²` turns each quadratic form in `I`
//! into one with discriminant `θ_{i+1}² ((a+b)² − 4abK²)`, negative exactly
//! when `K² > (a+b)²/(4ab)`. `J ≤ 0` when the θ-sequence increases and
//! `f ≤ 0`, or decreases and `f ≥ 0`.

use serde::{Deserialize, Serialize};

use crate::error::LyapunovError;
use crate::grid::BoundarySpec;
use crate::integrator::FieldState;
use crate::numeric::pairwise_sum;
use crate::reactions::{ReactionSpec, SignClass};

/// Largest degree for which [`binom`] is exact in 64 bits.
pub const MAX_BINOM_DEGREE: u32 = 60;

/// Exact `p! / (i! (p−i)!)` by the multiplicative formula with interleaved
/// division.
pub fn binom(p: u32, i: u32) -> Result<u64, LyapunovError> {
    if i > p || p > MAX_BINOM_DEGREE {
        return Err(LyapunovError::BinomRange { p, i });
    }
    let k = i.min(p - i) as u128;
    let n = p as u128;
    let mut acc: u128 = 1;
    for j in 1..=k {
        // acc * (n - k + j) is divisible by j: it is C(n-k+j, j) * j.
        acc = acc * (n - k + j) / j;
    }
    Ok(acc as u64)
}

fn binom_row(p: u32) -> Vec<f64> {
    (0..=p).map(|i| binom(p, i).unwrap_or(0) as f64).collect()
}

/// Which monotonicity the θ-sequence has.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Decreasing,
    Increasing,
}

impl Variant {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Decreasing => "decreasing",
            Self::Increasing => "increasing",
        }
    }

    /// Whether a reaction of the given sign makes `J ≤ 0` for this variant.
    pub fn matches(&self, sign: SignClass) -> bool {
        match self {
            Self::Increasing => sign.is_nonpos(),
            Self::Decreasing => sign.is_nonneg(),
        }
    }

    /// The variant that certifies `J ≤ 0` for a fixed-sign reaction, or
    /// `None` for a mixed sign.
    pub fn for_sign(sign: SignClass) -> Option<Self> {
        match sign {
            SignClass::NonPos => Some(Self::Increasing),
            SignClass::NonNeg | SignClass::Zero => Some(Self::Decreasing),
            SignClass::Mixed => None,
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "decreasing" => Ok(Self::Decreasing),
            "increasing" => Ok(Self::Increasing),
            other => Err(format!("unknown variant `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapCoefficients {
    degree: u32,
    k: f64,
    variant: Variant,
    scale: f64,
    thetas: Vec<f64>,
    certified_for: Option<(f64, f64)>,
}

impl LyapCoefficients {
    /// Builds `θ_i = scale^{i+1} K^{i²}` for `i = 0..=p` and checks the
    /// variant's scale inequality (`scale·K^{2p+1} < 1` for decreasing,
    /// `scale·K > 1` for increasing). The `K²` condition is not checked
    /// here; see [`choose_coefficients`] and [`quadratic_form_certificate`].
    pub fn new(p: u32, k: f64, variant: Variant, scale: f64) -> Result<Self, LyapunovError> {
        if p == 0 {
            return Err(LyapunovError::ZeroDegree);
        }
        if p > MAX_BINOM_DEGREE {
            return Err(LyapunovError::BinomRange { p, i: 0 });
        }
        if !(k.is_finite() && k > 0.0 && scale.is_finite() && scale > 0.0) {
            return Err(LyapunovError::BadConstant { k, scale });
        }
        let pf = p as f64;
        let exponent = (pf * pf + 1.0) * k.ln().abs() + (pf + 1.0) * scale.ln().abs();
        if exponent > 600.0 {
            return Err(LyapunovError::Overflow(exponent));
        }
        let thetas: Vec<f64> = (0..=p as i32)
            .map(|i| scale.powi(i + 1) * k.powi(i * i))
            .collect();
        let scale_ok = match variant {
            Variant::Decreasing => scale * k.powi(2 * p as i32 + 1) < 1.0,
            Variant::Increasing => scale * k > 1.0,
        };
        let monotone = thetas.windows(2).all(|w| match variant {
            Variant::Decreasing => w[1] < w[0],
            Variant::Increasing => w[1] > w[0],
        });
        if !(scale_ok && monotone) {
            return Err(LyapunovError::NotMonotone {
                variant: variant.label(),
                scale,
                k,
                p,
            });
        }
        Ok(Self {
            degree: p,
            k,
            variant,
            scale,
            thetas,
            certified_for: None,
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// Diffusion pair `(a, b)` for which `K² > (a+b)²/(4ab)` was checked.
    pub fn certified_for(&self) -> Option<(f64, f64)> {
        self.certified_for
    }

    pub fn min_theta(&self) -> f64 {
        self.thetas.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// One-line summary for run metadata.
    pub fn summary(&self) -> String {
        format!(
            "p={} K={} variant={} scale={}",
            self.degree,
            self.k,
            self.variant.label(),
            self.scale
        )
    }
}

/// Returns `(decreasing, increasing)` coefficients with
/// `K = sqrt(margin·(a+b)²/(4ab))`, `c = 1/(2K^{2p+1})` and `C = 2/K`.
pub fn choose_coefficients(
    a: f64,
    b: f64,
    p: u32,
    margin: f64,
) -> Result<(LyapCoefficients, LyapCoefficients), LyapunovError> {
    if !(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0) {
        return Err(LyapunovError::NonPositiveDiffusion { a, b });
    }
    if p == 0 {
        return Err(LyapunovError::ZeroDegree);
    }
    if !(margin.is_finite() && margin > 1.0) {
        return Err(LyapunovError::BadMargin(margin));
    }
    let k = (margin * (a + b).powi(2) / (4.0 * a * b)).sqrt();
    let pf = p as f64;
    // ln c = -(ln 2 + (2p+1) ln K), so the guard below covers both variants.
    let exponent = (pf * pf + 1.0) * k.ln().abs()
        + (pf + 1.0) * (std::f64::consts::LN_2 + (2.0 * pf + 1.0) * k.ln()).abs();
    if exponent > 600.0 {
        return Err(LyapunovError::Overflow(exponent));
    }
    let c = 0.5 / k.powi(2 * p as i32 + 1);
    let big_c = 2.0 / k;
    let mut dec = LyapCoefficients::new(p, k, Variant::Decreasing, c)?;
    let mut inc = LyapCoefficients::new(p, k, Variant::Increasing, big_c)?;
    dec.certified_for = Some((a, b));
    inc.certified_for = Some((a, b));
    Ok((dec, inc))
}

/// `H_p(u, v)`, accumulated in order `i = 0..=p`.
pub fn eval_hp(u: f64, v: f64, coeffs: &LyapCoefficients) -> f64 {
    let row = binom_row(coeffs.degree);
    hp_with_row(u, v, coeffs, &row)
}

fn hp_with_row(u: f64, v: f64, coeffs: &LyapCoefficients, row: &[f64]) -> f64 {
    let p = coeffs.degree as usize;
    let mut vpow = vec![1.0; p + 1];
    for n in 1..=p {
        vpow[n] = vpow[n - 1] * v;
    }
    let mut upow = 1.0;
    let mut acc = 0.0;
    for i in 0..=p {
        acc += row[i] * coeffs.thetas[i] * upow * vpow[p - i];
        upow *= u;
    }
    acc
}

fn check_pair(state: &FieldState, pair: (usize, usize)) -> Result<(), LyapunovError> {
    let m = state.species.len();
    if pair.0 >= m || pair.1 >= m || pair.0 == pair.1 {
        return Err(LyapunovError::BadPair(pair.0, pair.1));
    }
    Ok(())
}

/// `L = ∫ H_p(u, v) dx` for the species pair `(u, v) = pair`.
pub fn eval_l(
    state: &FieldState,
    pair: (usize, usize),
    coeffs: &LyapCoefficients,
) -> Result<f64, LyapunovError> {
    check_pair(state, pair)?;
    let row = binom_row(coeffs.degree);
    let (u, v) = (&state.species[pair.0], &state.species[pair.1]);
    let h: Vec<f64> = u
        .iter()
        .zip(v)
        .map(|(&uc, &vc)| hp_with_row(uc, vc, coeffs, &row))
        .collect();
    Ok(pairwise_sum(&h) * state.grid.cell_volume())
}

/// Discriminants of the gradient quadratic forms in `I`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub p: u32,
    #[serde(rename = "K")]
    pub k: f64,
    pub variant: Variant,
    pub scale: f64,
    pub thetas: Vec<f64>,
    pub discriminants: Vec<f64>,
    pub pass: bool,
    pub a: f64,
    pub b: f64,
}

/// `D_i = (a+b)² θ_{i+1}² − 4ab θ_i θ_{i+2}` for `i = 0..=p−2`; passes iff
/// every `D_i < 0`. With `p = 1` there are no forms and the test falls back
/// to the `K²` inequality itself.
pub fn quadratic_form_certificate(a: f64, b: f64, coeffs: &LyapCoefficients) -> Certificate {
    let th = &coeffs.thetas;
    let s = (a + b) * (a + b);
    let discriminants: Vec<f64> = (0..th.len().saturating_sub(2))
        .map(|i| s * th[i + 1] * th[i + 1] - 4.0 * a * b * th[i] * th[i + 2])
        .collect();
    let pass = if discriminants.is_empty() {
        s - 4.0 * a * b * coeffs.k * coeffs.k < 0.0
    } else {
        discriminants.iter().all(|&d| d < 0.0)
    };
    Certificate {
        p: coeffs.degree,
        k: coeffs.k,
        variant: coeffs.variant,
        scale: coeffs.scale,
        thetas: th.clone(),
        discriminants,
        pass,
        a,
        b,
    }
}

/// The two parts of `dL/dt` together with magnitude scales (sums of
/// absolute contributions) used for relative sign tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IjTerms {
    pub i: f64,
    pub j: f64,
    pub i_scale: f64,
    pub j_scale: f64,
}

/// Discrete `I` and `J` for the pair `(u, v)`.
///
/// `I` sums over interior faces: gradients are face-centred differences
/// and the weight `u^i v^{p−2−i}` uses the arithmetic means of the two
/// adjacent cells. `J` is a cellwise midpoint sum with `f = f_u` evaluated
/// from the full state (other species act as frozen coefficients).
pub fn eval_i_j(
    state: &FieldState,
    pair: (usize, usize),
    coeffs: &LyapCoefficients,
    spec: &ReactionSpec,
    t: f64,
    bc: &BoundarySpec,
) -> Result<IjTerms, LyapunovError> {
    check_pair(state, pair)?;
    let dim = state.grid.dimension();
    if !(bc.is_neumann(pair.0, dim) && bc.is_neumann(pair.1, dim)) {
        return Err(LyapunovError::NonNeumann);
    }
    let p = coeffs.degree as usize;
    let pf = p as f64;
    let th = &coeffs.thetas;
    let a = state.diffusion[pair.0];
    let b = state.diffusion[pair.1];
    let vol = state.grid.cell_volume();
    let (u, v) = (&state.species[pair.0], &state.species[pair.1]);

    let mut i_terms = Vec::new();
    let mut i_scale_terms = Vec::new();
    if p >= 2 {
        let row = binom_row(coeffs.degree - 2);
        let weight = -pf * (pf - 1.0) * vol;
        let mut vpow = vec![1.0; p - 1];
        state.grid.for_each_interior_face(|l, r, h| {
            let ub = 0.5 * (u[l] + u[r]);
            let vb = 0.5 * (v[l] + v[r]);
            let du = (u[r] - u[l]) / h;
            let dv = (v[r] - v[l]) / h;
            for n in 1..p - 1 {
                vpow[n] = vpow[n - 1] * vb;
            }
            let (uu, uv, vv) = (du * du, du * dv, dv * dv);
            let mut acc = 0.0;
            let mut mag = 0.0;
            let mut upow = 1.0;
            for i in 0..=p - 2 {
                let w = row[i] * upow * vpow[p - 2 - i];
                let cross = (a + b) * th[i + 1] * uv;
                let diag = a * th[i + 2] * uu + b * th[i] * vv;
                acc += w * (diag + cross);
                mag += (w * diag).abs() + (w * cross).abs();
                upow *= ub;
            }
            i_terms.push(weight * acc);
            i_scale_terms.push(weight.abs() * mag);
        });
    }

    let m = state.species.len();
    let mut rhs: Vec<Vec<f64>> = vec![vec![0.0; state.grid.len()]; m];
    spec.eval_field(t, &state.grid, &state.species, &mut rhs)?;
    let f = &rhs[pair.0];
    let row = binom_row(coeffs.degree - 1);
    let diffs: Vec<f64> = (0..p).map(|i| th[i + 1] - th[i]).collect();
    let mut j_terms = Vec::with_capacity(u.len());
    let mut j_scale_terms = Vec::with_capacity(u.len());
    let mut vpow = vec![1.0; p];
    for c in 0..u.len() {
        for n in 1..p {
            vpow[n] = vpow[n - 1] * v[c];
        }
        let mut acc = 0.0;
        let mut mag = 0.0;
        let mut upow = 1.0;
        for i in 0..p {
            let term = row[i] * diffs[i] * upow * vpow[p - 1 - i];
            acc += term;
            mag += term.abs();
            upow *= u[c];
        }
        j_terms.push(pf * vol * f[c] * acc);
        j_scale_terms.push(pf * vol * (f[c] * mag).abs());
    }

    Ok(IjTerms {
        i: pairwise_sum(&i_terms),
        j: pairwise_sum(&j_terms),
        i_scale: pairwise_sum(&i_scale_terms),
        j_scale: pairwise_sum(&j_scale_terms),
    })
}

/// `∫(u+v)^p dx / (R·L)` with `R = 1/min θ`; at most 1 for nonnegative data
/// by the binomial theorem. Returns 0 when both integrals vanish.
pub fn lp_bound_ratio(
    state: &FieldState,
    pair: (usize, usize),
    coeffs: &LyapCoefficients,
) -> Result<f64, LyapunovError> {
    check_pair(state, pair)?;
    let l = eval_l(state, pair, coeffs)?;
    let p = coeffs.degree as i32;
    let (u, v) = (&state.species[pair.0], &state.species[pair.1]);
    let powered: Vec<f64> = u.iter().zip(v).map(|(a, b)| (a + b).powi(p)).collect();
    let num = pairwise_sum(&powered) * state.grid.cell_volume();
    let denom = l / coeffs.min_theta();
    if num == 0.0 && denom == 0.0 {
        return Ok(0.0);
    }
    Ok(num / denom)
}
