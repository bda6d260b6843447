//! Remainder scaling sweep: parabolic vs hyperbolic runs on basic-kink data.
//!
//! `cargo run --release --example boundary_layer_sweep`

use sglab::estimates::{boundary_layer_sweep, GridPolicy, ScalingParams};
use sglab::exact::KinkFamily;

fn main() -> sglab::Result<()> {
    let scaling = ScalingParams::new(0.25, 0.5, vec![0.1, 0.05, 0.02, 0.01])?;
    let family = KinkFamily::basic(0.5)?;
    let report = boundary_layer_sweep(&scaling, &family, &GridPolicy::default())?;

    println!(
        "|U_xxt| <= {:.6} (attained at xi = {:.4})",
        report.certificate.bound, report.certificate.argmax_xi
    );
    println!(
        "{:>6} {:>8} {:>16} {:>12} {:>12} {:>8} {:>6} {:>6}",
        "eps", "T_eps", "window", "sup S", "ratio", "t*", "nx", "nt"
    );
    for p in &report.per_eps {
        let w = if p.window_clipped {
            format!("(0, {:.3}]", p.window.1)
        } else {
            format!("[{:.0}, {:.3})", p.window.0, p.window.1)
        };
        println!(
            "{:>6} {:>8.4} {:>16} {:>12.5e} {:>12.5} {:>8.4} {:>6} {:>6}",
            p.eps, p.t_eps, w, p.sup_s, p.ratio, p.t_at_sup, p.nx, p.nt
        );
    }
    match report.fitted_exponent {
        Some(s) => println!(
            "fitted exponent {s:.4} (bound exponent {:.4})",
            report.bound_exponent
        ),
        None => println!(
            "fitted exponent unavailable: {}",
            report.fit_error.as_deref().unwrap_or("")
        ),
    }
    println!("fitted Gamma {:.5}", report.fitted_gamma);
    println!(
        "{} {} = {:.4} (<= {})",
        report.ratio_spread.verdict(),
        report.ratio_spread.name,
        report.ratio_spread.value,
        report.ratio_spread.threshold
    );
    println!(
        "sup S strictly decreasing: {}",
        report.sup_s_strictly_decreasing
    );
    Ok(())
}
