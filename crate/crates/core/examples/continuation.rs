//! Holomorphic continuation: on a rhombic rectangle the values along two
//! crossing axes fix a discrete holomorphic function everywhere.
//!
//!     cargo run --example continuation

use discrete_riemann::critical::continuation::continue_holomorphic;
use discrete_riemann::critical::exp::exponential;
use discrete_riemann::critical::square_rectangle;
use num_complex::Complex64;

fn main() -> discrete_riemann::error::Result<()> {
    let theta = 0.6;
    let m = square_rectangle(6, 5, theta)?;
    let target = exponential(&m, Complex64::new(0.4, -0.3))?;
    let up = Complex64::from_polar(1.0, theta);
    let pos = m.positions.as_ref().unwrap();
    // Keep only vertices on the lines n = 0 or k = 0 of z = n e^{iθ} + k e^{−iθ}.
    let known: Vec<Option<Complex64>> = pos
        .iter()
        .zip(&target.values)
        .map(|(&z, &v)| {
            let n = (z * up).im / (up * up).im;
            let k = (z * up.conj()).im / (up.conj() * up.conj()).im;
            (n.abs() < 1e-9 || k.abs() < 1e-9).then_some(v)
        })
        .collect();
    let given = known.iter().flatten().count();
    let c = continue_holomorphic(&m.complex, &known, 1e-10);
    let err = c
        .values
        .iter()
        .zip(&target.values)
        .map(|(v, t)| v.map_or(f64::INFINITY, |v| (v - t).norm()))
        .fold(0.0, f64::max);
    println!("{given} of {} values given; complete {}; max error {err:.1e}", pos.len(), c.is_complete());

    // Axis data extends uniquely, so any clash has to come from extra data.
    let mut bad = known.clone();
    let v = bad.iter().position(Option::is_none).unwrap();
    bad[v] = Some(target.values[v] + 0.01);
    let c = continue_holomorphic(&m.complex, &bad, 1e-10);
    println!("with a wrong value pinned at vertex {v}: {} obstructed faces", c.obstructions.len());
    Ok(())
}
