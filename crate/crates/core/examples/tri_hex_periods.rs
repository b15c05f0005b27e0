//! Triangular/hexagonal tori: Γ is a triangular lattice, Γ* the hexagonal
//! one through the circumcentres. Π_Γ and Π_Γ* equal the lattice modulus.
//!
//!     cargo run --example tri_hex_periods

use std::f64::consts::PI;

use discrete_riemann::critical::{tri_hex_torus, TriHexParams};
use discrete_riemann::harmonic::compute_periods;
use discrete_riemann::homology::canonical_dissection;

fn main() -> discrete_riemann::error::Result<()> {
    let shapes = [
        ("equilateral", TriHexParams::equilateral()),
        ("acute 1.0/0.9/1.24", TriHexParams::from_angles(1.0, 0.9, PI - 1.9)),
    ];
    for (name, prm) in shapes {
        let m = tri_hex_torus(prm, 3, 2)?;
        let d = canonical_dissection(&m.complex, m.basis_hint.as_deref().unwrap())?;
        let pd = compute_periods(&m.complex, &d)?;
        let [a, b] = m.lattice.unwrap();
        println!("{name}: {} quads", m.complex.quad_count());
        println!("  lattice modulus {:.12}", b / a);
        println!("  Π_Γ             {:.12}", pd.pi_gamma[(0, 0)]);
        println!("  Π_Γ*            {:.12}", pd.pi_gamma_star[(0, 0)]);
    }
    Ok(())
}
