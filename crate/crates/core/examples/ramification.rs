//! Ramification numbers: how often the image of a loop around O winds
//! around 0. Z winds once, Z² twice; a shifted Z³ splits its winding over
//! the faces where the three zeros sit.
//!
//!     cargo run --example ramification

use discrete_riemann::complex::{Carrier, Cochain};
use discrete_riemann::critical::powers::power;
use discrete_riemann::critical::ramification::{face_ramification, ramification_number, square_ring};
use discrete_riemann::critical::square_patch;
use num_complex::Complex64;

fn main() -> discrete_riemann::error::Result<()> {
    let theta = 0.8;
    let m = square_patch(4, theta)?;
    for r in 1..=4 {
        let ring = square_ring(&m, theta, r)?;
        let b: Vec<i64> = (1..=3).map(|k| ramification_number(&power(&m, k)?, &ring)).collect::<Result<_, _>>()?;
        println!("ring {r} ({} vertices): b_Z = {}, b_Z² = {}, b_Z³ = {}", ring.len(), b[0], b[1], b[2]);
    }

    let z3 = power(&m, 3)?;
    let c = Complex64::new(0.31, 0.17);
    let shifted = Cochain::from_fn(Carrier::Lambda, 0, z3.len(), |v| z3.values[v] - c);
    let faces: Vec<(usize, i64)> = face_ramification(&m.complex, &shifted)
        .into_iter()
        .enumerate()
        .filter_map(|(q, b)| b.filter(|&b| b != 0).map(|b| (q, b)))
        .collect();
    println!("Z³ − {c}: faces with non-zero winding {faces:?}");
    Ok(())
}
