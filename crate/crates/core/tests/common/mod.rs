//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use rdlyap::{FieldState, Grid};

/// Pascal's triangle up to row `n` by repeated addition.
pub fn pascal(n: usize) -> Vec<Vec<u64>> {
    let mut rows: Vec<Vec<u64>> = vec![vec![1]];
    for p in 1..=n {
        let prev = &rows[p - 1];
        let mut row = vec![1u64; p + 1];
        for i in 1..p {
            row[i] = prev[i - 1] + prev[i];
        }
        rows.push(row);
    }
    rows
}

/// Classical RK4 for `y' = F(y)` on a fixed-length state, written out
/// stage by stage.
pub fn rk4_ode<const N: usize>(
    f: impl Fn(&[f64; N]) -> [f64; N],
    y0: [f64; N],
    dt: f64,
    steps: usize,
) -> Vec<[f64; N]> {
    let mut out = vec![y0];
    let mut y = y0;
    for _ in 0..steps {
        let k1 = f(&y);
        let mut tmp = [0.0; N];
        for k in 0..N {
            tmp[k] = y[k] + 0.5 * dt * k1[k];
        }
        let k2 = f(&tmp);
        for k in 0..N {
            tmp[k] = y[k] + 0.5 * dt * k2[k];
        }
        let k3 = f(&tmp);
        for k in 0..N {
            tmp[k] = y[k] + dt * k3[k];
        }
        let k4 = f(&tmp);
        for k in 0..N {
            y[k] += dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
        }
        out.push(y);
    }
    out
}

/// Right-hand side of the reversible pair
/// `u' = −h1 u^l v^q + h2 u^r v^s`, `v' = −u'`.
pub fn reversible_rhs(h1: f64, h2: f64, l: f64, q: f64, r: f64, s: f64) -> impl Fn(&[f64; 2]) -> [f64; 2] {
    move |y: &[f64; 2]| {
        let (u, v) = (y[0].max(0.0), y[1].max(0.0));
        let du = -h1 * u.powf(l) * v.powf(q) + h2 * u.powf(r) * v.powf(s);
        [du, -du]
    }
}

/// `base + amp·exp(−(x−c)²/(2w²))` sampled at cell centres.
pub fn bump(grid: &Grid, base: f64, amp: f64, c: f64, w: f64) -> Vec<f64> {
    grid.sample(|x| base + amp * (-(x[0] - c).powi(2) / (2.0 * w * w)).exp())
}

pub fn unit_grid(n: usize) -> Arc<Grid> {
    Arc::new(Grid::unit_interval(n).unwrap())
}

/// Two-species state on `[0, 1]` with a bump in each species.
pub fn bump_pair(n: usize, a: f64, b: f64) -> FieldState {
    let g = unit_grid(n);
    let u = bump(&g, 0.2, 1.0, 0.3, 0.08);
    let v = bump(&g, 0.4, 0.8, 0.65, 0.12);
    FieldState::new(g, vec![u, v], vec![a, b], 0.0).unwrap()
}

/// Spatially constant two-species state.
pub fn homogeneous_pair(n: usize, u: f64, v: f64, a: f64, b: f64) -> FieldState {
    let g = unit_grid(n);
    FieldState::new(g, vec![vec![u; n], vec![v; n]], vec![a, b], 0.0).unwrap()
}
