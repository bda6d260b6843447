//! Green function of the remainder problem with truncation control.
//!
//! `cargo run --release --example green_function`

use std::f64::consts::PI;

use sglab::spectral_kernel::{green, theta_sum, zero_mode, TruncationPolicy};
use sglab::ModelParams;

fn main() -> sglab::Result<()> {
    let p = ModelParams::new(PI, 0.5, 0.1, 0.0, 10.0)?;
    let policy = TruncationPolicy::default();
    println!(
        "{:>6} {:>14} {:>10} {:>12} {:>14}",
        "t", "H(0, 0, t)", "modes", "tail", "G(0, 0, t)"
    );
    for t in [0.5, 1.0, 2.0, 5.0, 10.0] {
        let h = theta_sum(&p, 0.0, 0.0, t, &policy)?;
        let g = green(&p, 0.0, 0.0, t, &policy)?;
        println!(
            "{t:>6} {:>14.10} {:>10} {:>12.3e} {g:>14.10}",
            h.value, h.modes, h.tail_bound
        );
    }
    println!(
        "long-time limit 1/(alpha ell) = {:.10}",
        1.0 / (p.alpha * p.ell)
    );
    println!(
        "zero mode at t = 10: {:.10}",
        zero_mode(p.alpha, 10.0) / p.ell
    );

    println!("symmetry H(x, xi) = H(xi, x) at t = 1:");
    for (x, xi) in [(0.3, 2.0), (1.0, 1.5)] {
        let a = theta_sum(&p, x, xi, 1.0, &policy)?.value;
        let b = theta_sum(&p, xi, x, 1.0, &policy)?.value;
        println!("  ({x}, {xi}): {a:.12} vs {b:.12}");
    }
    Ok(())
}
