//! Holomorphic continuation by closing corners: on a rhombus where three
//! values are known, the Cauchy–Riemann equation fixes the fourth.

use std::collections::VecDeque;

use num_complex::Complex64;

use crate::complex::DoubleComplex;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Outcome of a continuation.
#[derive(Debug, Clone)]
pub struct Continuation {
    pub values: Vec<Option<Complex64>>,
    /// Faces whose four values violate the Cauchy–Riemann equation, with residuals.
    pub obstructions: Vec<(usize, f64)>,
}

impl Continuation {
    pub fn is_complete(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }
}

/// The missing corner value of quad `q` when the other three are known.
fn close_corner(dc: &DoubleComplex, q: usize, f: [Option<Complex64>; 4]) -> Option<(usize, Complex64)> {
    let rho = dc.rho(q);
    match f {
        [Some(x), Some(y), Some(x2), None] => Some((3, y + I * rho * (x2 - x))),
        [Some(x), None, Some(x2), Some(y2)] => Some((1, y2 - I * rho * (x2 - x))),
        [Some(x), Some(y), None, Some(y2)] => Some((2, x + (y2 - y) / (I * rho))),
        [None, Some(y), Some(x2), Some(y2)] => Some((0, x2 - (y2 - y) / (I * rho))),
        _ => None,
    }
}

/// Extends a partially known function to every vertex reachable by closing
/// corners, then reports faces where the known values disagree.
pub fn continue_holomorphic(dc: &DoubleComplex, known: &[Option<Complex64>], tol: f64) -> Continuation {
    let mut values = known.to_vec();
    let mut queue: VecDeque<usize> = (0..dc.quad_count()).collect();
    let mut queued = vec![true; dc.quad_count()];
    while let Some(q) = queue.pop_front() {
        queued[q] = false;
        let quad = dc.quad(q);
        if let Some((i, v)) = close_corner(dc, q, quad.map(|v| values[v])) {
            let w = quad[i];
            values[w] = Some(v);
            for &(q2, _) in dc.corners(w) {
                if !queued[q2] {
                    queued[q2] = true;
                    queue.push_back(q2);
                }
            }
        }
    }
    let scale = values.iter().flatten().map(|v| v.norm()).fold(1.0, f64::max);
    let obstructions = (0..dc.quad_count())
        .filter_map(|q| {
            let v = dc.quad(q).map(|v| values[v]);
            let [Some(x), Some(y), Some(x2), Some(y2)] = v else { return None };
            let r = (y2 - y - I * dc.rho(q) * (x2 - x)).norm();
            (r > tol * scale).then_some((q, r))
        })
        .collect();
    Continuation { values, obstructions }
}
