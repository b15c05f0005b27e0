//! Refinement sweeps. On a critical torus Π_Γ = Π_Γ* = τ at every level. With
//! ρ perturbed afresh at each level the two periods drift apart.
//!
//!     cargo run --example convergence

use discrete_riemann::commands::{converge, converge_table};
use discrete_riemann::critical::square_torus;

fn main() -> discrete_riemann::error::Result<()> {
    let m = square_torus(1, 1, 0.7)?;
    println!("critical:");
    print!("{}", converge_table(&converge(&m, 4, 0.0, 0)?).to_csv());
    println!("\nρ perturbed by up to e^±0.2:");
    print!("{}", converge_table(&converge(&m, 4, 0.2, 7)?).to_csv());
    Ok(())
}
