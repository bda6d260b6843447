//! The remainder `d = u - U` two ways: fixed-point iteration of its
//! Green-function representation, and parabolic solve minus exact kink.
//!
//! `cargo run --release --example picard_remainder`

use std::f64::consts::PI;
use std::sync::Arc;

use sglab::exact::{neumann_data_from, u_xxt_basic, KinkFamily};
use sglab::pde::{
    kink_field, picard_remainder, remainder_field, solve_parabolic, Field, Grid, PicardSettings,
    UxxtSource,
};
use sglab::ModelParams;

fn sup(a: &Field, b: &Field) -> f64 {
    (&a.values - &b.values)
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
}

fn main() -> sglab::Result<()> {
    let alpha = 0.5;
    let params = ModelParams::new(PI, alpha, 0.1, 0.0, 2.0)?;
    let kink = KinkFamily::basic(alpha)?;
    let data = neumann_data_from(&kink, &params)?;
    let uxxt = UxxtSource::Analytic(Arc::new(move |x, t| u_xxt_basic(alpha, x, t)));
    let settings = PicardSettings::default();

    let run = |g: &Grid| -> sglab::Result<(Field, Field, Vec<f64>)> {
        let big_u = kink_field(g, &kink)?;
        let p = picard_remainder(&params, &big_u, &uxxt, &settings)?;
        let ratios = p.contraction_ratios();
        let d = remainder_field(&solve_parabolic(&params, &data, g)?, &big_u)?;
        Ok((p.field, d, ratios))
    };
    let coarse = Grid::new(PI, 2.0, 64, 63)?;
    let fine = coarse.refined(2)?;
    let (p0, d0, ratios) = run(&coarse)?;
    let (p1, d1, _) = run(&fine)?;
    let e_quad = p0.max_diff_coarse(&p1, 2)?;
    let e_disc = d0.max_diff_coarse(&d1, 2)?;
    let gap = sup(&p0, &d0);
    println!("sup |d| = {:.4e}", d0.max_abs());
    println!("picard vs direct gap = {gap:.4e}");
    println!("quadrature error ~ {e_quad:.4e}, discretization error ~ {e_disc:.4e}");
    println!("gap / (e_quad + e_disc) = {:.3}", gap / (e_quad + e_disc));
    println!(
        "contraction ratios: {:?}",
        ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>()
    );
    Ok(())
}
