//! Electrical moves on a triangular-lattice patch: a star-triangle swap, a
//! series split and merge, then a seeded random script on a torus. Total
//! curvature and the holomorphic dimension never change, and Z is carried
//! along as a discrete holomorphic function.
//!
//!     cargo run --example electrical_moves

use discrete_riemann::commands::{run_moves, Fixture};
use discrete_riemann::complex::VertexKind;
use discrete_riemann::critical::{tri_hex_torus, tri_sextant, TriHexParams};
use discrete_riemann::fixtures::randomize_rho;
use discrete_riemann::moves::{
    apply_record, holomorphic_dimension, random_script, split, star_triangle, transport, MoveStep, Surface,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = tri_sextant(TriHexParams::equilateral(), 4)?;
    let s = Surface::new(m.complex.clone());
    let z = m.z()?;
    let c = (0..s.complex.vertex_count())
        .find(|&v| s.complex.is_interior(v) && s.complex.degree(v) == 3)
        .expect("the sextant has interior stars");

    let (t, rec) = star_triangle(&s, c, None)?;
    println!("{:?} at {c}: {:?}", rec.direction, rec.params);
    println!("  star-triangle defect {:.1e}", rec.params.star_triangle_residual().unwrap());
    let zt = transport(&z, &rec)?;
    let back = apply_record(&t, &rec.inverse())?;
    println!("  undo restores the complex exactly: {}", back.complex.raw() == s.complex.raw());
    println!("  Z back and forth: {:.1e}", transport(&zt, &rec.inverse())?.max_diff(&z));

    let (u, rec) = split(&s, 0, VertexKind::Primal, 0.3)?;
    println!("split quad 0: {:?}", rec.params);
    println!("  curvature {:.3e} → {:.3e}", s.total_curvature(), u.total_curvature());

    // A flat torus with random ρ, 40 random moves.
    let torus = randomize_rho(&tri_hex_torus(TriHexParams::equilateral(), 3, 3)?.complex, 5, 0.5, 2.0)?;
    let script: Vec<MoveStep> = random_script(&Surface::new(torus.clone()), 40, 11);
    let report = run_moves(&Fixture::plain(torus.clone()), &script)?;
    let (lo, hi) = report.curvature.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
    println!("random script of {} moves on a torus:", script.len());
    println!("  curvature within [{lo:.3e}, {hi:.3e}]");
    println!("  dimension {} at start, distinct values {:?}", holomorphic_dimension(&torus), {
        let mut d = report.dimension.clone();
        d.dedup();
        d
    });
    println!("  star-triangle defect ≤ {:.1e}", report.star_triangle_max);
    println!("  final complex has {} quads", report.final_complex.quads.len());
    Ok(())
}
