//! Small numeric helpers shared by the evaluators.

/// Pairwise (cascade) summation with a fixed split order, so results are
/// reproducible from run to run and error grows as O(log n).
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        let mut acc = 0.0;
        for &v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// `x^e` for concentrations: nonpositive bases give 0 when `e > 0` and 1
/// when `e == 0`. Integer exponents go through repeated multiplication.
#[inline]
pub fn mono_pow(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        return 1.0;
    }
    if x <= 0.0 {
        return 0.0;
    }
    if e == 1.0 {
        return x;
    }
    if e.fract() == 0.0 && e <= 64.0 {
        return x.powi(e as i32);
    }
    (e * x.ln()).exp()
}
