//! Young diagrams expand the translated-power coefficients B^j.
//!
//!     cargo run --example young_diagrams

use std::collections::BTreeMap;

use discrete_riemann::critical::square_patch;
use discrete_riemann::critical::young::{b_expansion, b_recursive, translated_powers, BRoute};
use num_complex::Complex64;

fn main() -> discrete_riemann::error::Result<()> {
    for j in 0..=6 {
        let terms: Vec<String> = b_expansion(j).iter().map(|(y, c)| format!("{c:+} {y}")).collect();
        println!("B^{j} = {}", if terms.is_empty() { "1".into() } else { terms.join(" ") });
        let sum: i128 = b_expansion(j).iter().map(|(_, c)| c).sum();
        let direct: BTreeMap<_, _> = b_expansion(j).into_iter().collect();
        println!("      Σc = {sum}, recursion agrees: {}", b_recursive(j)[j] == direct);
    }

    let m = square_patch(3, 0.7)?;
    let b = m.complex.neighbors(m.origin).next().unwrap().0;
    let a = Complex64::new(0.5, 0.2);
    for k in [3, 6, 8] {
        let r = translated_powers(&m, a, b, k, BRoute::Recursion)?;
        let y = translated_powers(&m, a, b, k, BRoute::Young)?;
        println!("ζ^{k}: routes differ by {:.1e}", r.max_diff(&y));
    }
    Ok(())
}
