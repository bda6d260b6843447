//! The integro-differential memory form against the second-order equation.
//!
//! `cargo run --release --example memory_form`

use std::f64::consts::PI;

use sglab::exact::NeumannData;
use sglab::params::MemoryParams;
use sglab::pde::{compare_memory_parabolic, Grid};
use sglab::ModelParams;

fn main() -> sglab::Result<()> {
    let p = ModelParams::new(PI, 0.5, 0.1, 0.3, 1.0)?;
    let m = MemoryParams::from_model(&p)?;
    println!("a = {}, delta = {}, beta = {}", m.a_coef, m.delta, m.beta);
    let data = NeumannData::new(|x| 0.5 + 0.2 * x.cos(), |_| 0.0, |_| 0.0, |_| 0.0);
    let c = compare_memory_parabolic(&p, &data, &Grid::new(PI, 1.0, 65, 128)?)?;
    println!("raw gap            {:.4e}", c.raw_gap);
    println!("mapped gap         {:.4e}", c.mapped_gap);
    println!("mapped gap (2x)    {:.4e}", c.mapped_gap_refined);
    println!("discretization     {:.4e}", c.discretization_error);
    println!("agrees after mapping: {}", c.mapped_agrees);
    println!("{}", c.note);
    Ok(())
}
