//! Fitted constants of the three mode-band inequalities across eps.
//!
//! `cargo run --release --example lemma_checks [ell]`

use sglab::estimates::{lemma_checks, linspace, BandFit, LemmaConstants};
use sglab::ModelParams;

fn show(b: &BandFit) -> String {
    match b {
        BandFit::Fitted {
            n_lo,
            n_hi,
            ln_constant,
            t_star,
            ..
        } => {
            format!("n={n_lo}..{n_hi} lnB={ln_constant:.3} t*={t_star:.2}")
        }
        BandFit::SkippedBand { reason } => format!("skipped ({reason})"),
    }
}

fn main() -> sglab::Result<()> {
    let ell: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("ell must be a number"))
        .unwrap_or(std::f64::consts::PI);
    let base = ModelParams::new(ell, 0.5, 0.2, 0.0, 20.0)?;
    let eps = [0.2, 0.1, 0.05, 0.02, 0.01];
    let t = linspace(1.0, 20.0, 40);
    let r = lemma_checks(&base, &eps, LemmaConstants::default(), &t, 10_000)?;

    println!("ell = {ell}, rho = {}", r.rho);
    for row in &r.rows {
        println!("eps = {} (N1 = {}, N2 = {})", row.eps, row.n1, row.n2);
        println!("  tail      {}", show(&row.hyperbolic_tail));
        println!("  low band  {}", show(&row.low_band));
        println!("  circular  {}", show(&row.circular_band));
    }
    for g in &r.gates {
        match &g.gate {
            Some(gate) => println!(
                "{} {} = {:.4e} (<= {})",
                gate.verdict(),
                gate.name,
                gate.value,
                gate.threshold
            ),
            None => println!("SKIP {}: empty at every eps", g.band),
        }
    }
    Ok(())
}
