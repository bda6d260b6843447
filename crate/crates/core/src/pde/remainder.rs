//! The remainder `d = u - U` between the full and the hyperbolic problem,
//! either by differencing two solver runs or by fixed-point iteration of
//! its Green-function representation.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::pde::grid::{Field, Grid};
use crate::spectral_kernel::{grid_kernel, zero_mode, TruncationPolicy};

pub fn remainder_field(u: &Field, big_u: &Field) -> Result<Field> {
    if !u.grid.same_as(&big_u.grid) {
        return Err(Error::GridMismatch(format!(
            "u on {}x{}, U on {}x{}",
            u.grid.nx, u.grid.nt, big_u.grid.nx, big_u.grid.nt
        )));
    }
    Ok(Field {
        values: &u.values - &big_u.values,
        grid: u.grid,
    })
}

/// `S(t_n) = max_i |d(x_i, t_n)|` for every time level.
pub fn sup_profile(d: &Field) -> Vec<(f64, f64)> {
    (0..=d.grid.nt)
        .map(|n| {
            let s = d.level(n).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            (d.grid.t(n), s)
        })
        .collect()
}

/// Source of `U_xxt` for the forcing `sin(d + U) - sin U - eps U_xxt`.
#[derive(Clone)]
pub enum UxxtSource {
    Analytic(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
    /// Second differences in `x` (one-sided at the ends) followed by a
    /// centered difference in `t`.
    FiniteDifference,
}

fn uxxt_field(big_u: &Field, source: &UxxtSource) -> Field {
    let g = big_u.grid;
    match source {
        UxxtSource::Analytic(f) => Field::from_fn(g, |x, t| f(x, t)),
        UxxtSource::FiniteDifference => {
            let m = g.nx - 1;
            let inv = 1.0 / (g.dx * g.dx);
            let uxx = Field::from_fn(g, |_, _| 0.0);
            let mut uxx = uxx.values;
            for n in 0..=g.nt {
                let c = |i: usize| big_u.at(i, n);
                uxx[[0, n]] = (2.0 * c(0) - 5.0 * c(1) + 4.0 * c(2) - c(3)) * inv;
                for i in 1..m {
                    uxx[[i, n]] = (c(i + 1) - 2.0 * c(i) + c(i - 1)) * inv;
                }
                uxx[[m, n]] = (2.0 * c(m) - 5.0 * c(m - 1) + 4.0 * c(m - 2) - c(m - 3)) * inv;
            }
            let mut out = Field::zeros(g);
            for i in 0..g.nx {
                for n in 0..=g.nt {
                    out.values[[i, n]] = if n == 0 {
                        (-3.0 * uxx[[i, 0]] + 4.0 * uxx[[i, 1]] - uxx[[i, 2]]) / (2.0 * g.dt)
                    } else if n == g.nt {
                        (3.0 * uxx[[i, n]] - 4.0 * uxx[[i, n - 1]] + uxx[[i, n - 2]]) / (2.0 * g.dt)
                    } else {
                        (uxx[[i, n + 1]] - uxx[[i, n - 1]]) / (2.0 * g.dt)
                    };
                }
            }
            out
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardSettings {
    pub policy: TruncationPolicy,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for PicardSettings {
    fn default() -> Self {
        PicardSettings {
            policy: TruncationPolicy::new(40_000_000, 1e-6).expect("valid policy"),
            max_iter: 50,
            tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PicardResult {
    pub field: Field,
    pub iterations: usize,
    /// `max |d^(k+1) - d^(k)|` per iteration.
    pub diffs: Vec<f64>,
    /// Largest kernel tail bound over all lags.
    pub kernel_tail: f64,
}

impl PicardResult {
    /// Ratios of successive iterate differences.
    pub fn contraction_ratios(&self) -> Vec<f64> {
        self.diffs
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .collect()
    }
}

/// Fixed-point solution of
/// `d = -(1/ell) int int (1 - e^{-alpha(t-s)})/alpha F - (2/ell) int int H(x, xi, t - s) F`
/// with `F = sin(d + U) - sin U - eps U_xxt`, by trapezoid quadrature in
/// `s` and `xi` on the nodes of `big_u`'s grid, starting from `d = 0`.
pub fn picard_remainder(
    params: &ModelParams,
    big_u: &Field,
    uxxt: &UxxtSource,
    settings: &PicardSettings,
) -> Result<PicardResult> {
    params.validate()?;
    let g = big_u.grid;
    if (g.ell - params.ell).abs() > 1e-12 * params.ell {
        return Err(Error::GridMismatch("grid length differs from ell".into()));
    }
    let (nx, nt) = (g.nx, g.nt);
    let forcing_lin = {
        let u3 = uxxt_field(big_u, uxxt);
        &u3.values * params.eps
    };

    let mut kernels: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut kernel_tail = 0.0;
    let mut d = Field::zeros(g);
    let mut diffs = Vec::new();
    for iter in 1..=settings.max_iter {
        // F at every node from the current iterate, stored by time level
        let forcing: Vec<Vec<f64>> = (0..=nt)
            .map(|k| {
                (0..nx)
                    .map(|l| {
                        let u = big_u.at(l, k);
                        (d.at(l, k) + u).sin() - u.sin() - forcing_lin[[l, k]]
                    })
                    .collect()
            })
            .collect();
        if iter == 1 && forcing.iter().flatten().all(|&f| f == 0.0) {
            // zero forcing is its own fixed point
            return Ok(PicardResult {
                field: d,
                iterations: 1,
                diffs: vec![0.0],
                kernel_tail: 0.0,
            });
        }
        if kernels.is_empty() {
            kernels = build_kernels(params, &g, &settings.policy)?;
            kernel_tail = kernels.iter().map(|k| k.1).fold(0.0, f64::max);
        }
        let levels: Vec<Vec<f64>> = (0..=nt)
            .into_par_iter()
            .map(|j| {
                let mut out = vec![0.0; nx];
                // tau_j itself carries a zero kernel
                for k in 0..j {
                    let wt = if k == 0 { 0.5 * g.dt } else { g.dt };
                    let c = &kernels[j - k - 1].0;
                    let f = &forcing[k];
                    for (i, o) in out.iter_mut().enumerate() {
                        let row = &c[i * nx..(i + 1) * nx];
                        let acc: f64 = row.iter().zip(f).map(|(a, b)| a * b).sum();
                        *o -= wt * acc;
                    }
                }
                out
            })
            .collect();
        let mut diff = 0.0f64;
        for (j, level) in levels.iter().enumerate() {
            for (i, &v) in level.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::DivergenceError {
                        x: g.x(i),
                        t: g.t(j),
                        value: v,
                    });
                }
                diff = diff.max((v - d.at(i, j)).abs());
                d.values[[i, j]] = v;
            }
        }
        diffs.push(diff);
        if diff < settings.tol {
            return Ok(PicardResult {
                field: d,
                iterations: iter,
                diffs,
                kernel_tail,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: settings.max_iter,
        last_diff: *diffs.last().unwrap_or(&f64::NAN),
    })
}

/// Quadrature-weighted kernels per lag `m = 1..=nt`:
/// `C_m(i, l) = w_l [zero_mode/ell + (2/ell) H(x_i, xi_l, m dt)]`.
fn build_kernels(
    params: &ModelParams,
    g: &Grid,
    policy: &TruncationPolicy,
) -> Result<Vec<(Vec<f64>, f64)>> {
    let nx = g.nx;
    (1..=g.nt)
        .into_par_iter()
        .map(|m| -> Result<(Vec<f64>, f64)> {
            let s = m as f64 * g.dt;
            let k = grid_kernel(params, nx, s, policy)?;
            let z = zero_mode(params.alpha, s) / params.ell;
            let mut c = vec![0.0; nx * nx];
            for i in 0..nx {
                for l in 0..nx {
                    let w = if l == 0 || l == nx - 1 {
                        0.5 * g.dx
                    } else {
                        g.dx
                    };
                    c[i * nx + l] = w * (z + 2.0 / params.ell * k.get(i, l));
                }
            }
            Ok((c, k.tail_bound))
        })
        .collect()
}

/// Exact-solution field of a kink on `grid`.
pub fn kink_field(grid: &Grid, family: &crate::exact::KinkFamily) -> Result<Field> {
    Field::try_from_fn(*grid, |x, t| crate::exact::kink_value(family, x, t))
}
