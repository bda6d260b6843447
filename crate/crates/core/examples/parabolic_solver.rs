//! The full problem with the `eps u_xxt` term, its `eps -> 0` consistency
//! with the hyperbolic solver, and the energy of a free run.
//!
//! `cargo run --release --example parabolic_solver`

use std::f64::consts::PI;

use sglab::exact::{neumann_data_from, KinkFamily, NeumannData};
use sglab::pde::{energy_profile, solve_hyperbolic, solve_parabolic, Grid};
use sglab::ModelParams;

fn main() -> sglab::Result<()> {
    let kink = KinkFamily::basic(0.5)?;
    let p = ModelParams::new(PI, 0.5, 1e-8, 0.0, 2.0)?;
    let data = neumann_data_from(&kink, &p)?;
    let g = Grid::new(PI, 2.0, 129, 256)?;
    let u = solve_parabolic(&p, &data, &g)?;
    let big_u = solve_hyperbolic(&p, &data, &g)?;
    let fine = solve_hyperbolic(&p, &data, &g.refined(2)?)?;
    let gap = (&u.values - &big_u.values)
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    println!(
        "eps = 1e-8: |u - U| = {gap:.3e}, hyperbolic self-convergence {:.3e}",
        big_u.max_diff_coarse(&fine, 2)?
    );

    for eps in [0.1, 0.01, 0.001] {
        let u = solve_parabolic(&p.with_eps(eps), &data, &g)?;
        let d = (&u.values - &big_u.values)
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        println!("eps = {eps:<6} sup |u - U| = {d:.4e}");
    }

    let bump = NeumannData::new(|x| 0.3 * x.cos(), |_| 0.0, |_| 0.0, |_| 0.0);
    let free = ModelParams::new(PI, 0.5, 0.1, 0.0, 10.0)?;
    let f = solve_parabolic(&free, &bump, &Grid::new(PI, 10.0, 65, 400)?)?;
    let e = energy_profile(&f);
    for (t, en) in e.iter().step_by(e.len() / 5) {
        println!("t = {t:>6.3}  energy = {en:.6e}");
    }
    Ok(())
}
