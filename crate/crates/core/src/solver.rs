//! Conjugate gradients for the weighted graph Laplacian of the double.

use num_complex::Complex64;

use crate::complex::{DoubleComplex, VertexKind};
use crate::error::{Error, Result};

/// Convergence report of one solve.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
}

impl SolveStats {
    pub fn merge(self, other: SolveStats) -> SolveStats {
        SolveStats {
            iterations: self.iterations.max(other.iterations),
            residual: self.residual.max(other.residual),
        }
    }
}

pub const DEFAULT_TOLERANCE: f64 = 1e-11;

/// The Laplacian `Σ ρ(f(x) − f(x'))` of a closed double, matrix-free.
pub struct Laplacian<'a> {
    dc: &'a DoubleComplex,
}

impl<'a> Laplacian<'a> {
    pub fn new(dc: &'a DoubleComplex) -> Self {
        Laplacian { dc }
    }

    pub fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for e in 0..self.dc.lambda_edge_count() {
            let (a, b) = self.dc.lambda_edge(e);
            let flow = (x[a] - x[b]) * self.dc.lambda_rho(e);
            out[a] += flow;
            out[b] -= flow;
        }
    }

    /// Removes the kernel: the mean on Γ and the mean on Γ*.
    pub fn project(&self, x: &mut [Complex64]) {
        for kind in [VertexKind::Primal, VertexKind::Dual] {
            let idx: Vec<usize> = (0..x.len()).filter(|&v| self.dc.kind(v) == kind).collect();
            if idx.is_empty() {
                continue;
            }
            let mean = idx.iter().map(|&v| x[v]).sum::<Complex64>() / idx.len() as f64;
            for v in idx {
                x[v] -= mean;
            }
        }
    }

    /// Solves `L u = b` for `b` orthogonal to the kernel (it is projected
    /// first). The solution has zero mean on each graph.
    pub fn solve(&self, b: &[Complex64], tol: f64) -> Result<(Vec<Complex64>, SolveStats)> {
        let n = b.len();
        let mut rhs = b.to_vec();
        self.project(&mut rhs);
        let norm_b = norm(&rhs);
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        if norm_b == 0.0 {
            return Ok((x, SolveStats::default()));
        }
        let mut r = rhs.clone();
        let mut p = r.clone();
        let mut ap = vec![Complex64::new(0.0, 0.0); n];
        let mut rr = dot(&r, &r).re;
        let max_iter = 10 * n.max(1);
        for it in 1..=max_iter {
            self.apply(&p, &mut ap);
            let alpha = rr / dot(&p, &ap).re;
            for i in 0..n {
                x[i] += p[i] * alpha;
                r[i] -= ap[i] * alpha;
            }
            let rr_new = dot(&r, &r).re;
            if rr_new.sqrt() <= tol * norm_b {
                self.project(&mut x);
                // Recompute the true residual for the report.
                self.apply(&x, &mut ap);
                let res = ap.iter().zip(&rhs).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
                return Ok((x, SolveStats { iterations: it, residual: res / norm_b }));
            }
            let beta = rr_new / rr;
            for i in 0..n {
                p[i] = r[i] + p[i] * beta;
            }
            rr = rr_new;
        }
        Err(Error::SolverFail { residual: rr.sqrt() / norm_b, iterations: max_iter })
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    dot(a, a).re.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::square_torus;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn solves_random_system() {
        let dc = square_torus(3, 2, 0.4).unwrap().complex;
        let lap = Laplacian::new(&dc);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut u: Vec<Complex64> = (0..dc.vertex_count())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        lap.project(&mut u);
        let mut b = vec![Complex64::new(0.0, 0.0); u.len()];
        lap.apply(&u, &mut b);
        let (x, stats) = lap.solve(&b, DEFAULT_TOLERANCE).unwrap();
        assert!(stats.residual <= 1e-10);
        for (a, b) in x.iter().zip(&u) {
            assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn zero_rhs_is_free() {
        let dc = square_torus(1, 1, 0.4).unwrap().complex;
        let (x, stats) = Laplacian::new(&dc).solve(&vec![Complex64::new(1.0, 0.0); 4], 1e-11).unwrap();
        assert_eq!(stats.iterations, 0);
        assert!(x.iter().all(|v| v.norm() == 0.0));
    }
}
