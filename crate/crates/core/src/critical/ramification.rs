//! Ramification numbers: winding numbers of images of cycles around 0.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::CriticalMap;
use crate::complex::{Cochain, DoubleComplex, Walk};
use crate::error::{Error, Result};

/// Distance below which a point or segment counts as touching the origin.
const TOUCH: f64 = 1e-14;

fn segment_touches_origin(a: Complex64, b: Complex64) -> bool {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return a.norm() <= TOUCH;
    }
    let t = (-(a.conj() * d).re / len2).clamp(0.0, 1.0);
    (a + d * t).norm() <= TOUCH * (1.0 + a.norm().max(b.norm()))
}

/// Winding number around 0 of the closed polygon through `points`.
pub fn winding_number(points: &[Complex64]) -> Result<i64> {
    let n = points.len();
    let mut total = 0.0;
    for i in 0..n {
        let (a, b) = (points[i], points[(i + 1) % n]);
        if segment_touches_origin(a, b) {
            return Err(Error::PassesThroughOrigin);
        }
        total += (b / a).arg();
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

/// b_f(γ) = (1/2πi)∮_{f(γ)} dz/z for a closed walk γ on the quad-graph.
pub fn ramification_number(f: &Cochain, gamma: &Walk) -> Result<i64> {
    if gamma.is_empty() {
        return Ok(0);
    }
    let pts: Vec<Complex64> = gamma.vertices.iter().map(|&v| f.values[v]).collect();
    winding_number(&pts)
}

/// Ramification number around the boundary of each face (None where the
/// image quadrilateral passes through 0).
pub fn face_ramification(dc: &DoubleComplex, f: &Cochain) -> Vec<Option<i64>> {
    dc.quads()
        .iter()
        .map(|q| winding_number(&q.map(|v| f.values[v])).ok())
        .collect()
}

/// The counterclockwise walk through the vertices n e^{iθ} + k e^{−iθ}
/// with max(|n|, |k|) = r on a square patch built with angle θ.
pub fn square_ring(m: &CriticalMap, theta: f64, r: i64) -> Result<Walk> {
    let pos = m.require_simply_connected()?;
    let up = Complex64::from_polar(1.0, theta);
    let at = |n: i64, k: i64| {
        let z = up * n as f64 + up.conj() * k as f64;
        pos.iter()
            .position(|p| (p - z).norm() < 1e-9 * m.delta)
            .ok_or_else(|| Error::Invalid(format!("ring of radius {r} leaves the patch")))
    };
    let mut pts = Vec::with_capacity(8 * r as usize);
    for k in -r..r {
        pts.push(at(r, k)?);
    }
    for n in (-r + 1..=r).rev() {
        pts.push(at(n, r)?);
    }
    for k in (-r + 1..=r).rev() {
        pts.push(at(-r, k)?);
    }
    for n in -r..r {
        pts.push(at(n, -r)?);
    }
    // (e^{iθ}, e^{−iθ}) is a negatively oriented basis.
    pts.reverse();
    Walk::from_vertices(&m.complex, &pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Carrier;
    use crate::critical::powers::power;
    use crate::critical::square_patch;

    #[test]
    fn z_and_z_squared_wind_once_and_twice() {
        let m = square_patch(4, 0.8).unwrap();
        for r in 1..=4 {
            let g = square_ring(&m, 0.8, r).unwrap();
            assert_eq!(ramification_number(&m.z().unwrap(), &g).unwrap(), 1);
            assert_eq!(ramification_number(&power(&m, 2).unwrap(), &g).unwrap(), 2);
        }
    }

    #[test]
    fn constants_do_not_wind_and_zero_is_rejected() {
        let m = square_patch(2, 0.8).unwrap();
        let g = square_ring(&m, 0.8, 1).unwrap();
        let c = Cochain::from_fn(Carrier::Lambda, 0, m.complex.vertex_count(), |_| Complex64::new(0.3, 1.0));
        assert_eq!(ramification_number(&c, &g).unwrap(), 0);
        let zero = Cochain::zeros(Carrier::Lambda, 0, m.complex.vertex_count());
        assert_eq!(ramification_number(&zero, &g).unwrap_err(), Error::PassesThroughOrigin);
    }

    #[test]
    fn face_values_are_small_and_add_up() {
        let m = square_patch(3, 0.8).unwrap();
        let z3 = power(&m, 3).unwrap();
        let shifted = Cochain::from_fn(Carrier::Lambda, 0, z3.len(), |v| z3.values[v] - Complex64::new(0.31, 0.17));
        let faces = face_ramification(&m.complex, &shifted);
        assert!(faces.iter().flatten().all(|b| (-1..=1).contains(b)));
        let total: i64 = faces.iter().map(|b| b.unwrap()).sum();
        let g = square_ring(&m, 0.8, 3).unwrap();
        assert_eq!(total, ramification_number(&shifted, &g).unwrap());
    }
}
