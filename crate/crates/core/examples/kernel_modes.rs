//! Mode table and regime bands of the kernel.
//!
//! `cargo run --release --example kernel_modes [eps]`

use std::f64::consts::PI;

use sglab::spectral_kernel::{hyperbolic_start, kernel_mode, mode_data, regime_split, tail_bound};
use sglab::ModelParams;

fn main() -> sglab::Result<()> {
    let eps: f64 = std::env::args()
        .nth(1)
        .map_or(0.1, |s| s.parse().expect("eps must be a number"));
    let p = ModelParams::new(PI, 0.5, eps, 0.0, 1.0)?;
    p.require_estimate_regime()?;
    let split = regime_split(&p);
    println!(
        "N1 = {} (from {:.6}), N2 = {} (from {:.6})",
        split.n1, split.lower_bound, split.n2, split.upper_bound
    );
    println!(
        "{:>4} {:>10} {:>10} {:>12} {:>14} {:>12}",
        "n", "gamma_n", "h_n", "disc", "regime", "H_n(1)"
    );
    let last = split.n2 + 3;
    for n in (1..=3).chain(split.n2.saturating_sub(2).max(4)..=last) {
        let m = mode_data(&p, n);
        println!(
            "{:>4} {:>10.5} {:>10.5} {:>12.4} {:>14} {:>12.4e}",
            n,
            m.gamma_n,
            m.h_n,
            m.disc,
            format!("{:?}", m.regime),
            kernel_mode(&p, n, 1.0)
        );
    }
    let start = hyperbolic_start(&p)?;
    for t in [1.0, 2.0, 5.0] {
        println!(
            "tail bound beyond N = {start} at t = {t}: {:.4e}",
            tail_bound(&p, start, t)?
        );
    }
    Ok(())
}
