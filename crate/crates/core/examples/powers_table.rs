//! Discrete powers Z^k. On the chain {i/n} they follow the trapezoid rule;
//! next to the origin Z^k(x) = k!/2^{k−1} x^k; on patches the gap to z^k is
//! bounded by (k!/2)(4/sin η)^{k−2} |z|^{k−2} δ².
//!
//!     cargo run --example powers_table

use discrete_riemann::critical::powers::{chain_powers, neighbour_power, power_error_constant, powers};
use discrete_riemann::critical::square_patch;

fn main() -> discrete_riemann::error::Result<()> {
    for n in [5, 10] {
        let p = chain_powers(n, 7);
        println!("n = {n}, Z^k(i/n) for i = 0..={n}:");
        for (k, row) in p.iter().enumerate().skip(3) {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:.6}")).collect();
            println!("  k={k}: {}", cells.join(" "));
        }
    }

    let m = square_patch(4, 0.6)?;
    let pw = powers(&m, 6)?;
    let pos = m.positions.as_ref().unwrap();
    let x = m.complex.neighbors(m.origin).next().unwrap().0;
    println!("neighbour of O at {:.4}:", pos[x]);
    for k in 1..=6 {
        println!("  Z^{k} = {:.10}   k!/2^(k−1) x^k = {:.10}", pw.values[k].values[x], neighbour_power(pos[x], k));
    }

    let eta = m.min_angle();
    println!("error bound on the patch (η = {eta:.4}):");
    for k in 2..=6 {
        let worst = pos
            .iter()
            .zip(&pw.values[k].values)
            .filter(|(z, _)| z.norm() > 1e-12)
            .map(|(z, v)| (v - z.powu(k as u32)).norm() / (z.norm().powi(k as i32 - 2) * m.delta.powi(2)))
            .fold(0.0, f64::max);
        println!("  k={k}: max ratio {worst:8.3}  ≤ λ_k = {:.1}", power_error_constant(k, eta));
    }
    Ok(())
}
