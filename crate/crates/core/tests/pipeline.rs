use std::f64::consts::PI;

use sglab::exact::{neumann_data_from, KinkFamily, NeumannData};
use sglab::pde::{
    boundary_flux, remainder_field, solve_hyperbolic, solve_parabolic, sup_profile, Grid,
};
use sglab::ModelParams;

fn kink_setup() -> (ModelParams, NeumannData) {
    let p = ModelParams::new(PI, 0.5, 0.1, 0.0, 2.0).unwrap();
    let data = neumann_data_from(&KinkFamily::basic(0.5).unwrap(), &p).unwrap();
    (p, data)
}

#[test]
fn vanishing_eps_matches_hyperbolic_solver() {
    let (p, data) = kink_setup();
    let g = Grid::new(PI, 2.0, 129, 256).unwrap();
    let u = solve_parabolic(&p.with_eps(1e-8), &data, &g).unwrap();
    let big_u = solve_hyperbolic(&p, &data, &g).unwrap();
    let fine = solve_hyperbolic(&p, &data, &g.refined(2).unwrap()).unwrap();
    let self_err = big_u.max_diff_coarse(&fine, 2).unwrap();
    let gap = (&u.values - &big_u.values)
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(
        gap <= 10.0 * self_err,
        "gap {gap:e}, self-convergence {self_err:e}"
    );
}

#[test]
fn remainder_starts_at_rest() {
    let (p, data) = kink_setup();
    let g = Grid::new(PI, 2.0, 65, 128).unwrap();
    let d = remainder_field(
        &solve_parabolic(&p, &data, &g).unwrap(),
        &solve_hyperbolic(&p, &data, &g).unwrap(),
    )
    .unwrap();
    let s = sup_profile(&d);
    assert_eq!(s[0].1, 0.0);
    assert!(s.iter().all(|&(_, v)| v >= 0.0 && v.is_finite()));
    // discrete d_t(x, 0): the Taylor start differs only through u_tt(0)
    let dt0 = (0..g.nx)
        .map(|i| (d.at(i, 1) - d.at(i, 0)) / g.dt)
        .fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(dt0 <= g.dt * 10.0, "{dt0}");
}

#[test]
fn neumann_fidelity_for_both_solvers() {
    let (p, data) = kink_setup();
    for nx in [65usize, 129] {
        let g = Grid::new(PI, 2.0, nx, 2 * (nx - 1)).unwrap();
        for u in [
            solve_hyperbolic(&p, &data, &g).unwrap(),
            solve_parabolic(&p, &data, &g).unwrap(),
        ] {
            let worst = (0..=g.nt)
                .map(|n| {
                    let (l, r) = boundary_flux(&u, n);
                    (l - (data.phi0)(g.t(n)))
                        .abs()
                        .max((r - (data.phi1)(g.t(n))).abs())
                })
                .fold(0.0f64, f64::max);
            assert!(worst < 40.0 * g.dx * g.dx, "nx={nx}: {worst:e}");
        }
    }
}
