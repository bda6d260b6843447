use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform lattice on `[0, ell] x [0, horizon]` with `nx` nodes in space and
/// `nt` steps in time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nx: usize,
    pub nt: usize,
    pub dx: f64,
    pub dt: f64,
    pub ell: f64,
    pub horizon: f64,
}

impl Grid {
    pub fn new(ell: f64, horizon: f64, nx: usize, nt: usize) -> Result<Self> {
        if nx < 3 {
            return Err(Error::InvalidParams(format!(
                "grid needs nx >= 3, got {nx}"
            )));
        }
        if nt < 1 {
            return Err(Error::InvalidParams("grid needs nt >= 1".into()));
        }
        if !(ell > 0.0 && horizon > 0.0) {
            return Err(Error::InvalidParams(
                "grid needs ell > 0 and horizon > 0".into(),
            ));
        }
        Ok(Grid {
            nx,
            nt,
            dx: ell / (nx - 1) as f64,
            dt: horizon / nt as f64,
            ell,
            horizon,
        })
    }

    /// Unit wave speed CFL condition `dt <= dx`.
    pub fn check_cfl(&self) -> Result<()> {
        // relative slack for grids built with dt == dx up to rounding
        if self.dt > self.dx * (1.0 + 1e-12) {
            return Err(Error::CflViolation {
                dt: self.dt,
                dx: self.dx,
            });
        }
        Ok(())
    }

    pub fn x(&self, i: usize) -> f64 {
        if i == self.nx - 1 {
            self.ell
        } else {
            i as f64 * self.dx
        }
    }

    pub fn t(&self, n: usize) -> f64 {
        if n == self.nt {
            self.horizon
        } else {
            n as f64 * self.dt
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.nx == other.nx
            && self.nt == other.nt
            && (self.ell - other.ell).abs() <= 1e-12 * self.ell
            && (self.horizon - other.horizon).abs() <= 1e-12 * self.horizon
    }

    /// The grid with `factor` times as many intervals in both directions.
    pub fn refined(&self, factor: usize) -> Result<Grid> {
        Grid::new(
            self.ell,
            self.horizon,
            (self.nx - 1) * factor + 1,
            self.nt * factor,
        )
    }
}

/// Samples of a scalar function on a [`Grid`], indexed `(space node, time level)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub values: Array2<f64>,
    pub grid: Grid,
}

impl Field {
    pub fn zeros(grid: Grid) -> Self {
        Field {
            values: Array2::zeros((grid.nx, grid.nt + 1)),
            grid,
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values =
            Array2::from_shape_fn((grid.nx, grid.nt + 1), |(i, n)| f(grid.x(i), grid.t(n)));
        Field { values, grid }
    }

    /// Fallible version of [`Field::from_fn`].
    pub fn try_from_fn(grid: Grid, f: impl Fn(f64, f64) -> Result<f64>) -> Result<Self> {
        let mut field = Field::zeros(grid);
        for ((i, n), v) in field.values.indexed_iter_mut() {
            *v = f(grid.x(i), grid.t(n))?;
        }
        Ok(field)
    }

    pub fn at(&self, i: usize, n: usize) -> f64 {
        self.values[[i, n]]
    }

    pub fn level(&self, n: usize) -> ndarray::ArrayView1<'_, f64> {
        self.values.column(n)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Sup-norm distance on nodes shared with a grid `factor` times finer.
    pub fn max_diff_coarse(&self, fine: &Field, factor: usize) -> Result<f64> {
        let expect = self.grid.refined(factor)?;
        if !expect.same_as(&fine.grid) {
            return Err(Error::GridMismatch(format!(
                "field on {}x{} is not a {factor}x refinement of {}x{}",
                fine.grid.nx, fine.grid.nt, self.grid.nx, self.grid.nt
            )));
        }
        let mut m = 0.0f64;
        for ((i, n), v) in self.values.indexed_iter() {
            m = m.max((v - fine.values[[i * factor, n * factor]]).abs());
        }
        Ok(m)
    }
}
