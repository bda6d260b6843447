//! Closed-form traveling kinks, their residual certificates and the
//! sup bound of `U_xxt`.
//!
//! `cargo run --release --example kink_solutions`

use std::f64::consts::PI;

use sglab::exact::{
    boundedness_certificate, kink_fn, reduction_residual, residual, u_xxt_basic, Family, KinkFamily,
};
use sglab::ModelParams;

fn main() -> sglab::Result<()> {
    let alpha = 0.5;
    let cases = [
        (KinkFamily::basic(alpha)?, 0.0),
        (KinkFamily::new(Family::Gamma0, alpha, 1.0)?, 0.0),
        (KinkFamily::new(Family::Gamma1, alpha, -10.0)?, 1.0),
    ];
    for (k, gamma) in cases {
        let p = ModelParams::new(PI, alpha, 0.0, gamma, 2.0)?;
        let r = residual(kink_fn(k), &p, (0.0, PI), (0.0, 2.0), (50, 50), 1e-3)?;
        println!(
            "{:<7} U(0,0) = {:.6}  max residual = {:.3e}  (h vs h/2 gap {:.1e})",
            k.family.to_string(),
            k.value_xi(0.0)?,
            r.max_abs,
            r.richardson_gap
        );
        if k.family != Family::Basic {
            println!(
                "        traveling-wave ODE residual at xi = 0.7: {:.2e}",
                reduction_residual(&k, 0.7)?
            );
        }
    }
    let c = boundedness_certificate(alpha)?;
    println!(
        "sup |U_xxt| = {:.12} at xi = {:.2e}; 1/alpha^3 = {}",
        c.bound,
        c.argmax_xi,
        1.0 / alpha.powi(3)
    );
    println!("U_xxt(0, 0) = {}", u_xxt_basic(alpha, 0.0, 0.0));
    Ok(())
}
