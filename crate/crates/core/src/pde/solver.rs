//! Finite-difference solvers for the damped sine-Gordon equation with the
//! surface damping term `eps u_xxt`, under Neumann boundary conditions.
//!
//! Both solvers share one three-level scheme centered at `t_n`:
//!
//! ```text
//! (u+ - 2u + u-)/dt^2 + alpha (u+ - u-)/(2dt) - eps D2(u+ - u-)/(2dt) = D2 u - S - gamma
//! ```
//!
//! `D2` is the second difference with the ghost nodes
//! `u(-1) = u(1) - 2 dx phi0`, `u(M+1) = u(M-1) + 2 dx phi1` eliminated. The
//! `eps D2` term is implicit (a tridiagonal solve per step), `D2 u` is
//! explicit, hence the unit-speed CFL restriction `dt <= dx`. `S` is
//! `sin u` at the known level, optionally followed by one corrector sweep
//! with `S = (sin u+* + 2 sin u + sin u-)/4`.

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::exact::NeumannData;
use crate::params::ModelParams;
use crate::pde::grid::{Field, Grid};

/// Values beyond this magnitude count as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e6;

/// Tolerance on `|h0'(0) - phi0(0)|`, `|h0'(ell) - phi1(0)|`.
pub const CORNER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub corrector: bool,
    pub enforce_cfl: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            corrector: true,
            enforce_cfl: true,
        }
    }
}

/// Thomas algorithm for a tridiagonal system; `lower[0]` and `upper[n-1]`
/// are ignored.
pub(crate) fn solve_tridiagonal(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &mut [f64],
) -> Result<()> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut beta = diag[0];
    if beta == 0.0 || !beta.is_finite() {
        return Err(Error::LinearSolveError { row: 0 });
    }
    rhs[0] /= beta;
    for i in 1..n {
        c[i - 1] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * c[i - 1];
        if beta == 0.0 || !beta.is_finite() {
            return Err(Error::LinearSolveError { row: i });
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
    Ok(())
}

/// `D2 v` with Neumann fluxes folded in through the ghost nodes.
pub(crate) fn neumann_d2(v: &[f64], dx: f64, phi0: f64, phi1: f64, out: &mut [f64]) {
    let m = v.len() - 1;
    let inv = 1.0 / (dx * dx);
    out[0] = (2.0 * v[1] - 2.0 * v[0] - 2.0 * dx * phi0) * inv;
    for i in 1..m {
        out[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) * inv;
    }
    out[m] = (2.0 * v[m - 1] - 2.0 * v[m] + 2.0 * dx * phi1) * inv;
}

/// Tridiagonal `c_id I - c_lap L` where `L` is the homogeneous Neumann
/// second difference.
pub(crate) fn neumann_system(
    nx: usize,
    dx: f64,
    c_id: f64,
    c_lap: f64,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let k = c_lap / (dx * dx);
    let mut lower = vec![-k; nx];
    let diag = vec![c_id + 2.0 * k; nx];
    let mut upper = vec![-k; nx];
    upper[0] = -2.0 * k;
    lower[nx - 1] = -2.0 * k;
    lower[0] = 0.0;
    upper[nx - 1] = 0.0;
    (lower, diag, upper)
}

/// Second-order one-sided derivative of a boundary flux at `t = 0`.
pub(crate) fn flux_rate_at_zero(phi: &dyn Fn(f64) -> f64, dt: f64) -> f64 {
    (-3.0 * phi(0.0) + 4.0 * phi(dt) - phi(2.0 * dt)) / (2.0 * dt)
}

pub(crate) fn check_level(grid: &Grid, n: usize, level: &[f64]) -> Result<()> {
    for (i, &v) in level.iter().enumerate() {
        if !v.is_finite() || v.abs() > DIVERGENCE_LIMIT {
            return Err(Error::DivergenceError {
                x: grid.x(i),
                t: grid.t(n),
                value: v,
            });
        }
    }
    Ok(())
}

pub(crate) fn check_corners(data: &NeumannData, ell: f64) -> Result<()> {
    let mismatch = data.corner_mismatch(ell);
    if !(mismatch <= CORNER_TOL) {
        return Err(Error::PreconditionViolation(format!(
            "Neumann data not corner-compatible: |h0' - phi| = {mismatch:e}"
        )));
    }
    Ok(())
}

fn march(
    params: &ModelParams,
    eps: f64,
    data: &NeumannData,
    grid: &Grid,
    opts: SolverOptions,
) -> Result<Field> {
    params.validate()?;
    if (grid.ell - params.ell).abs() > 1e-12 * params.ell {
        return Err(Error::GridMismatch(format!(
            "grid length {} differs from ell {}",
            grid.ell, params.ell
        )));
    }
    if opts.enforce_cfl {
        grid.check_cfl()?;
    }
    check_corners(data, grid.ell)?;

    let nx = grid.nx;
    let (dx, dt) = (grid.dx, grid.dt);
    let alpha = params.alpha;
    let gamma = params.gamma_bias;
    let mut field = Field::zeros(*grid);
    let xs = grid.xs();

    let u0: Vec<f64> = xs.iter().map(|&x| (data.h0)(x)).collect();
    let v0: Vec<f64> = xs.iter().map(|&x| (data.h1)(x)).collect();
    check_level(grid, 0, &u0)?;

    // Taylor start: u1 = h0 + dt h1 + dt^2/2 u_tt(0), u_tt(0) from the PDE
    let mut d2u = vec![0.0; nx];
    let mut d2v = vec![0.0; nx];
    neumann_d2(&u0, dx, (data.phi0)(0.0), (data.phi1)(0.0), &mut d2u);
    neumann_d2(
        &v0,
        dx,
        flux_rate_at_zero(&*data.phi0, dt),
        flux_rate_at_zero(&*data.phi1, dt),
        &mut d2v,
    );
    let u1: Vec<f64> = (0..nx)
        .map(|i| {
            let acc = d2u[i] + eps * d2v[i] - alpha * v0[i] - u0[i].sin() - gamma;
            u0[i] + dt * v0[i] + 0.5 * dt * dt * acc
        })
        .collect();
    check_level(grid, 1, &u1)?;
    field.values.column_mut(0).assign(&Array1::from(u0.clone()));
    if grid.nt >= 1 {
        field.values.column_mut(1).assign(&Array1::from(u1.clone()));
    }

    let c_lap = 0.5 * eps * dt;
    let (lower, diag, upper) = neumann_system(nx, dx, 1.0 + 0.5 * alpha * dt, c_lap);
    let mut prev = u0;
    let mut cur = u1;
    let mut base = vec![0.0; nx];
    let mut lap_prev = vec![0.0; nx];
    let mut rhs = vec![0.0; nx];

    for n in 1..grid.nt {
        let t_prev = grid.t(n - 1);
        let t_cur = grid.t(n);
        let t_next = grid.t(n + 1);
        neumann_d2(&cur, dx, (data.phi0)(t_cur), (data.phi1)(t_cur), &mut d2u);
        // homogeneous part of L u- plus the flux increments of eps D2 (u+ - u-)
        neumann_d2(&prev, dx, 0.0, 0.0, &mut lap_prev);
        let dflux0 = (data.phi0)(t_next) - (data.phi0)(t_prev);
        let dflux1 = (data.phi1)(t_next) - (data.phi1)(t_prev);
        for i in 0..nx {
            base[i] = 2.0 * cur[i] - (1.0 - 0.5 * alpha * dt) * prev[i] - c_lap * lap_prev[i]
                + dt * dt * (d2u[i] - gamma);
        }
        base[0] += c_lap * (-2.0 * dflux0 / dx);
        base[nx - 1] += c_lap * (2.0 * dflux1 / dx);

        for i in 0..nx {
            rhs[i] = base[i] - dt * dt * cur[i].sin();
        }
        solve_tridiagonal(&lower, &diag, &upper, &mut rhs)?;
        if opts.corrector {
            let predicted = std::mem::take(&mut rhs);
            rhs = (0..nx)
                .map(|i| {
                    let s = 0.25 * (predicted[i].sin() + 2.0 * cur[i].sin() + prev[i].sin());
                    base[i] - dt * dt * s
                })
                .collect();
            solve_tridiagonal(&lower, &diag, &upper, &mut rhs)?;
        }
        check_level(grid, n + 1, &rhs)?;
        field
            .values
            .column_mut(n + 1)
            .assign(&Array1::from(rhs.clone()));
        prev = std::mem::replace(&mut cur, rhs.clone());
    }
    Ok(field)
}

/// Hyperbolic limit `U_xx - (U_t + alpha U)_t = sin U + gamma`; `params.eps`
/// is ignored.
pub fn solve_hyperbolic(params: &ModelParams, data: &NeumannData, grid: &Grid) -> Result<Field> {
    solve_hyperbolic_with(params, data, grid, SolverOptions::default())
}

pub fn solve_hyperbolic_with(
    params: &ModelParams,
    data: &NeumannData,
    grid: &Grid,
    opts: SolverOptions,
) -> Result<Field> {
    grid.check_cfl()?;
    march(params, 0.0, data, grid, opts)
}

/// Full problem `(eps u_t + u)_xx - (u_t + alpha u)_t = sin u + gamma`.
pub fn solve_parabolic(params: &ModelParams, data: &NeumannData, grid: &Grid) -> Result<Field> {
    solve_parabolic_with(params, data, grid, SolverOptions::default())
}

pub fn solve_parabolic_with(
    params: &ModelParams,
    data: &NeumannData,
    grid: &Grid,
    opts: SolverOptions,
) -> Result<Field> {
    if !(params.eps > 0.0) {
        return Err(Error::InvalidParams(
            "parabolic solver requires eps > 0".into(),
        ));
    }
    march(params, params.eps, data, grid, opts)
}

/// Discrete energy `sum (U_t^2/2 + U_x^2/2 + 1 - cos U) dx` at interior
/// time levels `1..nt`, with centered `U_t` and cell-averaged `U_x^2`.
pub fn energy_profile(field: &Field) -> Vec<(f64, f64)> {
    let g = &field.grid;
    (1..g.nt)
        .map(|n| {
            let mut e = 0.0;
            for i in 0..g.nx {
                let w = if i == 0 || i == g.nx - 1 { 0.5 } else { 1.0 };
                let ut = (field.at(i, n + 1) - field.at(i, n - 1)) / (2.0 * g.dt);
                e += w * (0.5 * ut * ut + 1.0 - field.at(i, n).cos()) * g.dx;
            }
            for i in 0..g.nx - 1 {
                let ux = (field.at(i + 1, n) - field.at(i, n)) / g.dx;
                e += 0.5 * ux * ux * g.dx;
            }
            (g.t(n), e)
        })
        .collect()
}

/// One-sided second-order reconstruction of `u_x` at both ends of level `n`.
pub fn boundary_flux(field: &Field, n: usize) -> (f64, f64) {
    let g = &field.grid;
    let m = g.nx - 1;
    let left = (-3.0 * field.at(0, n) + 4.0 * field.at(1, n) - field.at(2, n)) / (2.0 * g.dx);
    let right =
        (3.0 * field.at(m, n) - 4.0 * field.at(m - 1, n) + field.at(m - 2, n)) / (2.0 * g.dx);
    (left, right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{kink_value, neumann_data_from, KinkFamily};
    use std::f64::consts::PI;

    fn kink_setup() -> (ModelParams, NeumannData, KinkFamily) {
        let p = ModelParams::new(PI, 0.5, 0.0, 0.0, 2.0).unwrap();
        let k = KinkFamily::basic(0.5).unwrap();
        let d = neumann_data_from(&k, &p).unwrap();
        (p, d, k)
    }

    #[test]
    fn tridiagonal_solves_small_system() {
        let (l, d, u) = neumann_system(4, 0.5, 1.0, 0.25);
        let x = [1.0, -2.0, 0.5, 3.0];
        let mut b = vec![0.0; 4];
        for i in 0..4 {
            b[i] = d[i] * x[i];
            if i > 0 {
                b[i] += l[i] * x[i - 1];
            }
            if i < 3 {
                b[i] += u[i] * x[i + 1];
            }
        }
        solve_tridiagonal(&l, &d, &u, &mut b).unwrap();
        for i in 0..4 {
            assert!((b[i] - x[i]).abs() < 1e-12);
        }
        let mut r = vec![1.0; 2];
        assert!(matches!(
            solve_tridiagonal(&[0.0, 1.0], &[0.0, 1.0], &[1.0, 0.0], &mut r),
            Err(Error::LinearSolveError { row: 0 })
        ));
    }

    #[test]
    fn equilibrium_is_preserved() {
        let p = ModelParams::new(PI, 0.5, 0.1, 0.0, 2.0).unwrap();
        let g = Grid::new(PI, 2.0, 33, 64).unwrap();
        let data = NeumannData::equilibrium(PI);
        for f in [
            solve_hyperbolic(&p, &data, &g).unwrap(),
            solve_parabolic(&p, &data, &g).unwrap(),
        ] {
            for v in f.values.iter() {
                assert!((v - PI).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn cfl_violation_rejected() {
        let (p, d, _) = kink_setup();
        let g = Grid::new(PI, 2.0, 65, 10).unwrap();
        assert!(matches!(
            solve_hyperbolic(&p, &d, &g),
            Err(Error::CflViolation { .. })
        ));
    }

    #[test]
    fn divergence_is_reported() {
        let p = ModelParams::new(PI, 0.5, 0.1, 0.0, 2.0).unwrap();
        let g = Grid::new(PI, 2.0, 17, 32).unwrap();
        let data = NeumannData::equilibrium(2e6);
        assert!(matches!(
            solve_parabolic(&p, &data, &g),
            Err(Error::DivergenceError { .. })
        ));
    }

    #[test]
    fn hyperbolic_tracks_the_kink() {
        let (p, d, k) = kink_setup();
        let g = Grid::new(PI, 2.0, 129, 258).unwrap();
        let u = solve_hyperbolic(&p, &d, &g).unwrap();
        let exact = Field::try_from_fn(g, |x, t| kink_value(&k, x, t)).unwrap();
        let err = (&u.values - &exact.values)
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(err < 1e-3, "{err}");
    }

    #[test]
    fn neumann_fidelity() {
        let (p, d, _) = kink_setup();
        let pe = p.with_eps(0.1);
        for nx in [65usize, 129] {
            let g = Grid::new(PI, 2.0, nx, 2 * (nx - 1)).unwrap();
            for f in [
                solve_hyperbolic(&p, &d, &g).unwrap(),
                solve_parabolic(&pe, &d, &g).unwrap(),
            ] {
                for n in 0..=g.nt {
                    let (l, r) = boundary_flux(&f, n);
                    let t = g.t(n);
                    assert!(
                        (l - (d.phi0)(t)).abs() < 40.0 * g.dx * g.dx,
                        "nx={nx} n={n}"
                    );
                    assert!(
                        (r - (d.phi1)(t)).abs() < 40.0 * g.dx * g.dx,
                        "nx={nx} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn energy_nonincreasing_with_zero_flux() {
        let p = ModelParams::new(PI, 0.5, 0.0, 0.0, 4.0).unwrap();
        let data = NeumannData::new(|x| 1.0 + 0.8 * x.cos(), |_| 0.0, |_| 0.0, |_| 0.0);
        for nx in [65usize, 129] {
            let g = Grid::new(PI, 4.0, nx, 2 * (nx - 1)).unwrap();
            let f = solve_hyperbolic(&p, &data, &g).unwrap();
            let e = energy_profile(&f);
            let e0 = e[0].1;
            let worst = e
                .windows(2)
                .map(|w| w[1].1 - w[0].1)
                .fold(f64::MIN, f64::max);
            assert!(worst <= 5.0 * g.dt * g.dt * e0, "nx={nx}: rise {worst}");
            assert!(e.last().unwrap().1 < e0);
        }
    }
}
