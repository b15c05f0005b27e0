//! Period matrices of flat square tori.
//!
//! The torus (ℤe^{iθ} + ℤe^{−iθ}) / (2q e^{iθ}ℤ + 2p e^{−iθ}ℤ) has modulus
//! τ = (q/p)e^{2iθ}. On a critical map both Π_Γ and Π_Γ* reproduce it.
//!
//!     cargo run --example square_torus_periods

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

use discrete_riemann::critical::square_torus;
use discrete_riemann::harmonic::{compute_periods, residuals};
use discrete_riemann::homology::canonical_dissection;
use num_complex::Complex64;

fn main() -> discrete_riemann::error::Result<()> {
    for (p, q, theta) in [(1, 1, FRAC_PI_4), (2, 3, FRAC_PI_3), (3, 2, 1.0)] {
        let m = square_torus(p, q, theta)?;
        let d = canonical_dissection(&m.complex, m.basis_hint.as_deref().unwrap())?;
        let pd = compute_periods(&m.complex, &d)?;
        let tau = Complex64::from_polar(q as f64 / p as f64, 2.0 * theta);
        println!("p={p} q={q} θ={theta:.4}");
        println!("  gram =\n{:.6}", pd.gram);
        println!("  Π    =\n{:.6}", pd.pi);
        println!("  Π_Γ = {:.10}  Π_Γ* = {:.10}  τ = {:.10}", pd.pi_gamma[(0, 0)], pd.pi_gamma_star[(0, 0)], tau);
        let r = residuals(&m.complex, &d, &pd)?;
        println!("  duality {:.1e}, *² + 1 {:.1e}, Π symmetry {:.1e}", r.duality, r.star_squared, r.pi_symmetry);
    }
    Ok(())
}
