//! The discrete exponential Exp(:λ:) on a triangular-lattice sextant: face
//! products, the O(δ²) gap to e^{λz} under refinement, and its power series.
//!
//!     cargo run --example exponential [lambda]

use discrete_riemann::critical::exp::{exp_series, exponential, face_products};
use discrete_riemann::critical::{tri_sextant, TriHexParams};
use discrete_riemann::io::parse_complex;

fn main() -> discrete_riemann::error::Result<()> {
    let lambda = parse_complex(&std::env::args().nth(1).unwrap_or_else(|| "0.8-0.4i".into()))?;
    let mut m = tri_sextant(TriHexParams::from_angles(1.1, 0.9, std::f64::consts::PI - 2.0), 2)?;
    let worst = face_products(&m, lambda)?.iter().map(|p| (p - 1.0).norm()).fold(0.0, f64::max);
    println!("λ = {lambda}: max |face product − 1| = {worst:.1e}");

    // The same region, refined: the error to e^{λz} should drop by about 4.
    let mut last = None;
    for level in 0..4 {
        let e = exponential(&m, lambda)?;
        let pos = m.positions.as_ref().unwrap();
        let err = pos.iter().zip(&e.values).map(|(z, v)| (v - (lambda * z).exp()).norm()).fold(0.0, f64::max);
        let ratio = last.map_or(String::new(), |l: f64| format!("  ratio {:.3}", l / err));
        println!("δ = {:<7} max |Exp − e^{{λz}}| = {err:.3e}{ratio}", m.delta);
        last = Some(err);
        if level < 3 {
            m = m.refine()?;
        }
    }

    let s = exp_series(&tri_sextant(TriHexParams::equilateral(), 3)?, lambda, 12)?;
    println!("partial sums Σ_{{k≤K}} λ^k Z^k/k! against Exp:");
    for (k, g) in s.gaps.iter().enumerate().step_by(3) {
        println!("  K = {k:<2} gap {g:.3e}");
    }
    Ok(())
}
