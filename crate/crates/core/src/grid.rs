//! Cell-centred rectangular grids in one or two dimensions.
//!
//! Values live at cell centres and boundaries are handled with one layer of
//! ghost cells. Every boundary face carries a Robin weight `λ ∈ [0, 1]` for
//! the homogeneous condition `λ w + (1 − λ) ∂_η w = 0`: `λ = 0` is Neumann,
//! `λ = 1` is Dirichlet.
//!
//! Cells are stored with the x index running fastest: `idx = ix + nx * iy`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::GridError;
use crate::numeric::pairwise_sum;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dimension: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    cells: Vec<usize>,
    spacing: Vec<f64>,
    cell_volume: f64,
}

impl Grid {
    /// `extents` holds one `[lo, hi]` interval per axis.
    pub fn new(
        dimension: usize,
        extents: &[[f64; 2]],
        cells_per_axis: &[usize],
    ) -> Result<Self, GridError> {
        if !(1..=2).contains(&dimension) {
            return Err(GridError::BadDimension(dimension));
        }
        if extents.len() != dimension {
            return Err(GridError::Arity {
                what: "extents",
                expected: dimension,
                got: extents.len(),
            });
        }
        if cells_per_axis.len() != dimension {
            return Err(GridError::Arity {
                what: "cells_per_axis",
                expected: dimension,
                got: cells_per_axis.len(),
            });
        }
        let mut spacing = Vec::with_capacity(dimension);
        for (axis, (&[lo, hi], &n)) in extents.iter().zip(cells_per_axis).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(GridError::DegenerateExtent { axis, lo, hi });
            }
            if n < 3 {
                return Err(GridError::TooFewCells { axis, cells: n });
            }
            spacing.push((hi - lo) / n as f64);
        }
        let cell_volume = spacing.iter().product();
        Ok(Self {
            dimension,
            lo: extents.iter().map(|e| e[0]).collect(),
            hi: extents.iter().map(|e| e[1]).collect(),
            cells: cells_per_axis.to_vec(),
            spacing,
            cell_volume,
        })
    }

    /// Unit interval `[0, 1]` split into `n` cells.
    pub fn unit_interval(n: usize) -> Result<Self, GridError> {
        Self::new(1, &[[0.0, 1.0]], &[n])
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn extents(&self) -> Vec<[f64; 2]> {
        self.lo.iter().zip(&self.hi).map(|(&l, &h)| [l, h]).collect()
    }

    pub fn cells_per_axis(&self) -> &[usize] {
        &self.cells
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_volume
    }

    pub fn len(&self) -> usize {
        self.cells.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Measure of the domain, `|Ω|`.
    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    /// Cell centre coordinates of cell `idx` (second entry is 0 in 1D).
    pub fn cell_center(&self, idx: usize) -> [f64; 2] {
        let nx = self.cells[0];
        let (ix, iy) = (idx % nx, idx / nx);
        let x = self.lo[0] + (ix as f64 + 0.5) * self.spacing[0];
        let y = if self.dimension == 2 {
            self.lo[1] + (iy as f64 + 0.5) * self.spacing[1]
        } else {
            0.0
        };
        [x, y]
    }

    /// All cell centres, one per cell, in storage order.
    pub fn cell_centers(&self) -> Vec<[f64; 2]> {
        (0..self.len()).map(|i| self.cell_center(i)).collect()
    }

    /// Samples `f` at every cell centre.
    pub fn sample(&self, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        (0..self.len()).map(|i| f(self.cell_center(i))).collect()
    }

    fn check_len(&self, got: usize) -> Result<(), GridError> {
        if got != self.len() {
            return Err(GridError::SizeMismatch {
                expected: self.len(),
                got,
            });
        }
        Ok(())
    }

    /// Midpoint-rule integral: sum of values times cell volume.
    pub fn integrate(&self, values: &[f64]) -> Result<f64, GridError> {
        self.check_len(values.len())?;
        Ok(pairwise_sum(values) * self.cell_volume)
    }

    /// Second-order ghost-cell Laplacian of `values`, written into `out`.
    pub fn laplacian_into(
        &self,
        values: &[f64],
        faces: &FaceLambdas,
        out: &mut [f64],
    ) -> Result<(), GridError> {
        self.check_len(values.len())?;
        self.check_len(out.len())?;
        out.iter_mut().for_each(|o| *o = 0.0);
        let nx = self.cells[0];
        let ny = if self.dimension == 2 { self.cells[1] } else { 1 };

        let hx = self.spacing[0];
        let (gx_lo, gx_hi) = (
            ghost_factor(faces.0[0], hx),
            ghost_factor(faces.0[1], hx),
        );
        let inv_hx2 = 1.0 / (hx * hx);
        for iy in 0..ny {
            let row = &values[iy * nx..(iy + 1) * nx];
            let out_row = &mut out[iy * nx..(iy + 1) * nx];
            for ix in 0..nx {
                let w = row[ix];
                let left = if ix > 0 { row[ix - 1] } else { gx_lo * w };
                let right = if ix + 1 < nx { row[ix + 1] } else { gx_hi * w };
                out_row[ix] += ((right - w) - (w - left)) * inv_hx2;
            }
        }

        if self.dimension == 2 {
            let hy = self.spacing[1];
            let (gy_lo, gy_hi) = (
                ghost_factor(faces.0[2], hy),
                ghost_factor(faces.0[3], hy),
            );
            let inv_hy2 = 1.0 / (hy * hy);
            for iy in 0..ny {
                for ix in 0..nx {
                    let idx = ix + nx * iy;
                    let w = values[idx];
                    let below = if iy > 0 { values[idx - nx] } else { gy_lo * w };
                    let above = if iy + 1 < ny { values[idx + nx] } else { gy_hi * w };
                    out[idx] += ((above - w) - (w - below)) * inv_hy2;
                }
            }
        }
        Ok(())
    }

    /// Calls `visit(left, right, h)` for every interior face, x-faces first.
    /// Boundary faces are skipped: under Neumann conditions their flux is 0.
    pub fn for_each_interior_face(&self, mut visit: impl FnMut(usize, usize, f64)) {
        let nx = self.cells[0];
        let ny = if self.dimension == 2 { self.cells[1] } else { 1 };
        for iy in 0..ny {
            for ix in 0..nx - 1 {
                let idx = ix + nx * iy;
                visit(idx, idx + 1, self.spacing[0]);
            }
        }
        if self.dimension == 2 {
            for iy in 0..ny - 1 {
                for ix in 0..nx {
                    let idx = ix + nx * iy;
                    visit(idx, idx + nx, self.spacing[1]);
                }
            }
        }
    }

    /// Number of boundary faces per species: 2 per axis.
    pub fn face_count(&self) -> usize {
        2 * self.dimension
    }
}

/// Ghost value = factor × adjacent interior value, from solving
/// `λ (g + w)/2 + (1 − λ)(g − w)/h = 0` for `g`.
#[inline]
pub fn ghost_factor(lambda: f64, h: f64) -> f64 {
    if lambda == 0.0 {
        return 1.0;
    }
    if lambda == 1.0 {
        return -1.0;
    }
    let num = 2.0 * (1.0 - lambda) - lambda * h;
    let den = 2.0 * (1.0 - lambda) + lambda * h;
    num / den
}

/// Robin weights for the faces of one species, ordered
/// `[x_lo, x_hi, y_lo, y_hi]`. Unused y entries are ignored in 1D.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaceLambdas(pub [f64; 4]);

impl FaceLambdas {
    pub const NEUMANN: Self = Self([0.0; 4]);
    pub const DIRICHLET: Self = Self([1.0; 4]);

    pub fn uniform(lambda: f64) -> Result<Self, GridError> {
        Self::from_slice(&[lambda; 4])
    }

    /// Accepts 1 (all faces), 2 (1D) or 4 (2D) values.
    pub fn from_slice(values: &[f64]) -> Result<Self, GridError> {
        let arr = match values.len() {
            1 => [values[0]; 4],
            2 => [values[0], values[1], 0.0, 0.0],
            4 => [values[0], values[1], values[2], values[3]],
            n => {
                return Err(GridError::Arity {
                    what: "face lambdas",
                    expected: 4,
                    got: n,
                })
            }
        };
        for &l in &arr {
            if !(0.0..=1.0).contains(&l) {
                return Err(GridError::BadLambda(l));
            }
        }
        Ok(Self(arr))
    }

    pub fn is_neumann(&self, dimension: usize) -> bool {
        self.0[..2 * dimension].iter().all(|&l| l == 0.0)
    }
}

/// Boundary weights for every species.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySpec {
    species: Vec<FaceLambdas>,
}

impl BoundarySpec {
    pub fn new(species: Vec<FaceLambdas>) -> Self {
        Self { species }
    }

    pub fn neumann(species_count: usize) -> Self {
        Self::new(vec![FaceLambdas::NEUMANN; species_count])
    }

    pub fn dirichlet(species_count: usize) -> Self {
        Self::new(vec![FaceLambdas::DIRICHLET; species_count])
    }

    pub fn uniform(species_count: usize, lambda: f64) -> Result<Self, GridError> {
        Ok(Self::new(vec![
            FaceLambdas::uniform(lambda)?;
            species_count
        ]))
    }

    pub fn species_count(&self) -> usize {
        self.species.len()
    }

    pub fn faces(&self, species: usize) -> &FaceLambdas {
        &self.species[species]
    }

    pub fn all(&self) -> &[FaceLambdas] {
        &self.species
    }

    pub fn is_neumann(&self, species: usize, dimension: usize) -> bool {
        self.species[species].is_neumann(dimension)
    }

    pub fn all_neumann(&self, dimension: usize) -> bool {
        self.species.iter().all(|f| f.is_neumann(dimension))
    }
}

/// A cellwise field bound to a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self, GridError> {
        grid.check_len(values.len())?;
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = grid.sample(f);
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn laplacian(&self, faces: &FaceLambdas) -> Result<ScalarField, GridError> {
        let mut out = vec![0.0; self.values.len()];
        self.grid.laplacian_into(&self.values, faces, &mut out)?;
        Ok(ScalarField {
            grid: Arc::clone(&self.grid),
            values: out,
        })
    }

    pub fn integrate(&self) -> f64 {
        pairwise_sum(&self.values) * self.grid.cell_volume
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn build_1d() {
        let g = Grid::new(1, &[[0.0, 1.0]], &[10]).unwrap();
        assert_relative_eq!(g.spacing()[0], 0.1);
        assert_relative_eq!(g.cell_volume(), 0.1);
        assert_eq!(g.len(), 10);
    }

    #[test]
    fn build_2d() {
        let g = Grid::new(2, &[[0.0, 1.0], [0.0, 2.0]], &[4, 8]).unwrap();
        assert_eq!(g.spacing(), &[0.25, 0.25]);
        assert_eq!(g.cell_volume(), 0.0625);
        assert_eq!(g.len(), 32);
    }

    #[test]
    fn build_rejects_bad_input() {
        assert_eq!(
            Grid::new(1, &[[0.0, 1.0]], &[2]),
            Err(GridError::TooFewCells { axis: 0, cells: 2 })
        );
        assert!(matches!(
            Grid::new(3, &[[0.0, 1.0]; 3], &[4; 3]),
            Err(GridError::BadDimension(3))
        ));
        assert!(matches!(
            Grid::new(1, &[[1.0, 1.0]], &[4]),
            Err(GridError::DegenerateExtent { .. })
        ));
        assert!(matches!(
            Grid::new(2, &[[0.0, 1.0]], &[4, 4]),
            Err(GridError::Arity { .. })
        ));
    }

    #[test]
    fn constant_field_is_harmonic_under_neumann() {
        let g = Arc::new(Grid::new(2, &[[0.0, 1.0], [0.0, 1.0]], &[5, 7]).unwrap());
        let f = ScalarField::from_fn(g, |_| 3.5);
        let lap = f.laplacian(&FaceLambdas::NEUMANN).unwrap();
        assert!(lap.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn linear_field_interior_zero() {
        let g = Arc::new(Grid::unit_interval(10).unwrap());
        let f = ScalarField::from_fn(g, |x| x[0]);
        let lap = f.laplacian(&FaceLambdas::NEUMANN).unwrap();
        for &v in &lap.values()[1..9] {
            assert!(v.abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn quadratic_field_interior_is_two() {
        // ((x-h)^2 - 2x^2 + (x+h)^2) / h^2 = 2 for any x, h.
        let g = Arc::new(Grid::unit_interval(20).unwrap());
        let f = ScalarField::from_fn(g, |x| x[0] * x[0]);
        let lap = f.laplacian(&FaceLambdas::NEUMANN).unwrap();
        for &v in &lap.values()[1..19] {
            assert!((v - 2.0).abs() < 1e-10, "{v}");
        }
    }

    #[test]
    fn integrate_examples() {
        let g = Grid::unit_interval(10).unwrap();
        assert_relative_eq!(g.integrate(&[3.0; 10]).unwrap(), 3.0, epsilon = 1e-15);
        assert_eq!(g.integrate(&[0.0; 10]).unwrap(), 0.0);
        // 0.1 * (0.05 + 0.15 + ... + 0.95) = 0.1 * 5
        let lin = g.sample(|x| x[0]);
        assert_relative_eq!(g.integrate(&lin).unwrap(), 0.5, epsilon = 1e-15);
        assert!(matches!(
            g.integrate(&[1.0; 3]),
            Err(GridError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn ghost_factor_limits() {
        assert_eq!(ghost_factor(0.0, 0.1), 1.0);
        assert_eq!(ghost_factor(1.0, 0.1), -1.0);
        // Robin: midpoint value and centred derivative satisfy the relation.
        let (lam, h, w) = (0.3, 0.05, 2.0);
        let g = ghost_factor(lam, h) * w;
        let residual = lam * (g + w) / 2.0 + (1.0 - lam) * (g - w) / h;
        assert!(residual.abs() < 1e-12);
    }

    #[test]
    fn dirichlet_second_order() {
        let mut errs = Vec::new();
        for n in [16, 32, 64] {
            let g = Arc::new(Grid::unit_interval(n).unwrap());
            let pi = std::f64::consts::PI;
            let f = ScalarField::from_fn(Arc::clone(&g), |x| (pi * x[0]).sin());
            let lap = f.laplacian(&FaceLambdas::DIRICHLET).unwrap();
            let err = lap
                .values()
                .iter()
                .zip(g.cell_centers())
                .map(|(v, c)| (v + pi * pi * (pi * c[0]).sin()).abs())
                .fold(0.0, f64::max);
            errs.push(err);
        }
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.2..=4.8).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn face_lambdas_validation() {
        assert!(FaceLambdas::from_slice(&[1.5]).is_err());
        assert!(FaceLambdas::from_slice(&[0.0, 0.0, 0.0]).is_err());
        let f = FaceLambdas::from_slice(&[0.0, 0.5]).unwrap();
        assert!(!f.is_neumann(1));
        assert!(FaceLambdas::from_slice(&[0.0, 0.0, 1.0, 1.0]).unwrap().is_neumann(1));
    }

    proptest! {
        #[test]
        fn neumann_divergence_theorem(
            vals in proptest::collection::vec(0.0f64..100.0, 24),
            two_d in any::<bool>(),
        ) {
            let g = if two_d {
                Grid::new(2, &[[0.0, 1.0], [0.0, 2.0]], &[4, 6]).unwrap()
            } else {
                Grid::new(1, &[[0.0, 3.0]], &[24]).unwrap()
            };
            let mut out = vec![0.0; 24];
            g.laplacian_into(&vals, &FaceLambdas::NEUMANN, &mut out).unwrap();
            let sum: f64 = out.iter().sum();
            let abs: f64 = out.iter().map(|v| v.abs()).sum();
            prop_assert!(sum.abs() <= 1e-12 * abs + 1e-300);
        }

        #[test]
        fn laplacian_commutes_with_reflection(
            vals in proptest::collection::vec(-10.0f64..10.0, 16),
            lambda in 0.0f64..=1.0,
        ) {
            let g = Grid::unit_interval(16).unwrap();
            let faces = FaceLambdas::uniform(lambda).unwrap();
            let mut a = vec![0.0; 16];
            g.laplacian_into(&vals, &faces, &mut a).unwrap();
            let rev: Vec<f64> = vals.iter().rev().copied().collect();
            let mut b = vec![0.0; 16];
            g.laplacian_into(&rev, &faces, &mut b).unwrap();
            for (x, y) in a.iter().rev().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()));
            }
        }
    }
}
