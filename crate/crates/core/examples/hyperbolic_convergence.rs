//! Grid convergence of both solvers on basic-kink data.
//!
//! The hyperbolic solver is measured against the closed-form kink, the
//! parabolic solver against itself on successively refined grids.
//!
//! `cargo run --release --example hyperbolic_convergence`

use std::f64::consts::PI;

use sglab::exact::{kink_value, neumann_data_from, KinkFamily};
use sglab::pde::{solve_hyperbolic, solve_parabolic, Field, Grid};
use sglab::ModelParams;

fn main() -> sglab::Result<()> {
    let kink = KinkFamily::basic(0.5)?;
    let hyp = ModelParams::new(PI, 0.5, 0.0, 0.0, 2.0)?;
    let par = hyp.with_eps(0.1);
    let data = neumann_data_from(&kink, &hyp)?;
    let sizes = [65usize, 129, 257];

    println!("hyperbolic solver against the exact kink");
    let mut prev: Option<f64> = None;
    for &nx in &sizes {
        let g = Grid::new(PI, 2.0, nx, 2 * (nx - 1))?;
        let u = solve_hyperbolic(&hyp, &data, &g)?;
        let exact = Field::try_from_fn(g, |x, t| kink_value(&kink, x, t))?;
        let err = (&u.values - &exact.values)
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        match prev {
            Some(p) => println!(
                "  nx = {nx:>4}  error = {err:.4e}  order = {:.3}",
                (p / err).log2()
            ),
            None => println!("  nx = {nx:>4}  error = {err:.4e}"),
        }
        prev = Some(err);
    }

    println!("parabolic solver, eps = 0.1, self-convergence");
    let fields = sizes
        .iter()
        .map(|&nx| solve_parabolic(&par, &data, &Grid::new(PI, 2.0, nx, 2 * (nx - 1))?))
        .collect::<sglab::Result<Vec<_>>>()?;
    let d1 = fields[0].max_diff_coarse(&fields[1], 2)?;
    let d2 = fields[1].max_diff_coarse(&fields[2], 2)?;
    println!(
        "  |u65 - u129| = {d1:.4e}  |u129 - u257| = {d2:.4e}  order = {:.3}",
        (d1 / d2).log2()
    );
    Ok(())
}
