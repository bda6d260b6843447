//! Kernel decay `sum_n H_n(t) <= B e^{-m t}` across an eps sweep.
//!
//! `cargo run --release --example theorem3_envelope`

use std::f64::consts::PI;

use sglab::estimates::{linspace, theorem3_check};
use sglab::spectral_kernel::TruncationPolicy;
use sglab::ModelParams;

fn main() -> sglab::Result<()> {
    let base = ModelParams::new(PI, 0.5, 0.2, 0.0, 20.0)?;
    let eps = [0.2, 0.1, 0.05, 0.02, 0.01];
    let t = linspace(1.0, 20.0, 40);
    let r = theorem3_check(&base, &eps, &t, &TruncationPolicy::default())?;

    println!(
        "{:>6} {:>10} {:>10} {:>12} {:>12} {:>12}",
        "eps", "m", "m_min", "sup ratio", "sup ratio*", "min sum H"
    );
    for row in &r.rows {
        let min_sum = row
            .points
            .iter()
            .map(|p| p.sum_h)
            .fold(f64::INFINITY, f64::min);
        println!(
            "{:>6} {:>10.5} {:>10.5} {:>12.5} {:>12.5} {:>12.4e}",
            row.eps, row.m_max, row.m_min, row.sup_ratio, row.sup_ratio_min, min_sum
        );
    }
    for g in [&r.gate, &r.gate_min] {
        println!(
            "{} {} = {:.4} (<= {})",
            g.verdict(),
            g.name,
            g.value,
            g.threshold
        );
    }
    println!("sum H_n(20) < sum H_n(1) for every eps: {}", r.decays);
    Ok(())
}
