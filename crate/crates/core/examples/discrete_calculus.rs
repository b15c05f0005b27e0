//! Discrete exterior calculus on a complex read from JSON: the Hodge star,
//! d∘d = 0, and harmonic projection of a closed form on a torus.
//!
//!     cargo run --example discrete_calculus

use discrete_riemann::calculus::{energy, hodge_star};
use discrete_riemann::complex::{coboundary, Carrier, Cochain};
use discrete_riemann::critical::square_torus;
use discrete_riemann::harmonic::{coclosed_residual, crossing_cocycle, harmonic_projection};
use discrete_riemann::homology::default_dissection;
use discrete_riemann::io::{load_complex, to_json, ComplexFile};
use num_complex::Complex64;

fn main() -> discrete_riemann::error::Result<()> {
    // Round trip a generated torus through the JSON format.
    let json = to_json(&ComplexFile::from_complex(&square_torus(2, 2, 0.7)?.complex));
    let dc = load_complex(&json)?;
    println!("loaded {} vertices, {} quads, genus {:?}", dc.vertex_count(), dc.quad_count(), dc.genus());

    let f = Cochain::from_fn(Carrier::Lambda, 0, dc.vertex_count(), |v| Complex64::new((v as f64).sin(), 0.0));
    let df = coboundary(&dc, &f)?;
    println!("‖ddf‖ = {:.1e}, energy of f = {:.6}", coboundary(&dc, &df)?.max_norm(), energy(&dc, &f)?);

    let star = hodge_star(&dc, &df)?;
    println!("‖**df + df‖ = {:.1e}", (&hodge_star(&dc, &star)? + &df).max_norm());

    // df plus the cocycle counting crossings with a homology cycle: closed,
    // not exact, and not co-closed.
    let d = default_dissection(&dc)?;
    let w = &df + &crossing_cocycle(&dc, &d.aleph_lambda[0]);
    println!("‖dω‖ = {:.1e}, co-closed defect {:.2e}", coboundary(&dc, &w)?.max_norm(), coclosed_residual(&dc, &w)?);
    let (h, stats) = harmonic_projection(&dc, &w)?;
    println!("harmonic part: co-closed defect {:.1e} after {} CG steps", coclosed_residual(&dc, &h)?, stats.iterations);
    let period = |c: &Cochain| c.eval(&d.aleph_lambda[2]);
    println!("period on a crossing cycle kept: {:.6} → {:.6}", period(&w), period(&h));
    Ok(())
}
