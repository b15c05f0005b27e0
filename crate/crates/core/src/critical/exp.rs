//! The discrete exponential Exp(:λ:), its series and changes of base point.

use std::collections::VecDeque;

use num_complex::Complex64;

use super::powers::{factorial, powers};
use super::CriticalMap;
use crate::complex::{Carrier, Cochain};
use crate::error::{Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Ratio Exp(y)/Exp(x) across an edge with Z(y) − Z(x) = `dz`.
pub fn exp_factor(lambda: Complex64, dz: Complex64) -> Complex64 {
    (2.0 + lambda * dz) / (2.0 - lambda * dz)
}

/// Rejects parameters on the circle |λ| = 2/δ.
pub fn check_lambda(delta: f64, lambda: Complex64) -> Result<()> {
    if (lambda.norm() * delta - 2.0).abs() <= 1e-12 {
        return Err(Error::OnSingularCircle);
    }
    Ok(())
}

/// Exp(:λ:) of the map ζ = a(Z − Z(b)), i.e. equal to 1 at `b`, with the
/// largest relative disagreement found on edges off the integration tree.
pub fn exponential_rebased(
    m: &CriticalMap,
    lambda: Complex64,
    a: Complex64,
    b: usize,
) -> Result<(Cochain, f64)> {
    m.require_simply_connected()?;
    check_lambda(m.delta * a.norm(), lambda)?;
    let dc = &m.complex;
    let mut val: Vec<Option<Complex64>> = vec![None; dc.vertex_count()];
    val[b] = Some(ONE);
    let mut queue = VecDeque::from([b]);
    let mut mismatch: f64 = 0.0;
    while let Some(v) = queue.pop_front() {
        let fv = val[v].unwrap();
        for (u, e, s) in dc.neighbors(v) {
            let target = fv * exp_factor(lambda, a * m.edge_vector(e) * s as f64);
            match val[u] {
                None => {
                    val[u] = Some(target);
                    queue.push_back(u);
                }
                Some(old) => {
                    mismatch = mismatch.max((old - target).norm() / old.norm().max(1.0))
                }
            }
        }
    }
    let values = val.into_iter().map(|x| x.ok_or(Error::Disconnected)).collect::<Result<_>>()?;
    Ok((Cochain { carrier: Carrier::Lambda, grade: 0, values }, mismatch))
}

/// Exp(:λ:) with Exp(O) = 1 and dExp = λ Exp dZ.
pub fn exponential(m: &CriticalMap, lambda: Complex64) -> Result<Cochain> {
    Ok(exponential_rebased(m, lambda, ONE, m.origin)?.0)
}

/// Product of the four edge factors around each face; 1 at criticality.
pub fn face_products(m: &CriticalMap, lambda: Complex64) -> Result<Vec<Complex64>> {
    check_lambda(m.delta, lambda)?;
    Ok(m.shapes
        .iter()
        .map(|s| (0..4).map(|k| exp_factor(lambda, s[(k + 1) % 4] - s[k])).product())
        .collect())
}

/// Closed form on the lattice δ(ℤe^{iθ} + ℤe^{−iθ}) at z = δ(n e^{iθ} + m e^{−iθ}).
pub fn rect_closed_form(lambda: Complex64, delta: f64, theta: f64, n: i64, m: i64) -> Complex64 {
    let f = |u: Complex64| (ONE + lambda * delta / 2.0 * u) / (ONE - lambda * delta / 2.0 * u);
    let up = Complex64::from_polar(1.0, theta);
    f(up).powi(n as i32) * f(up.conj()).powi(m as i32)
}

/// Largest pointwise gap in Exp_ζ(:λ:) = Exp_Z(:aλ:)/Exp_Z(:aλ:)(b) for
/// ζ = a(Z − b), the left side computed on a separately built map.
pub fn change_base_point_residual(
    m: &CriticalMap,
    lambda: Complex64,
    a: Complex64,
    b: usize,
) -> Result<f64> {
    let pos = m.require_simply_connected()?;
    let moved: Vec<Complex64> = pos.iter().map(|p| a * (p - pos[b])).collect();
    let zeta = CriticalMap::from_positions(moved, m.complex.quads(), b)?;
    let lhs = exponential(&zeta, lambda)?;
    let rhs = exponential(m, a * lambda)?;
    let at_b = rhs.values[b];
    Ok(lhs
        .values
        .iter()
        .zip(&rhs.values)
        .map(|(l, r)| (l - r / at_b).norm() / l.norm().max(1.0))
        .fold(0.0, f64::max))
}

/// Partial sums of Σ λ^k Z^k / k! against Exp(:λ:).
#[derive(Debug, Clone, serde::Serialize)]
pub struct ExpSeries {
    /// Sup-norm gap between the partial sum up to k and the exponential.
    pub gaps: Vec<f64>,
    /// Sup norm of the k-th term.
    pub term_norms: Vec<f64>,
}

pub fn exp_series(m: &CriticalMap, lambda: Complex64, kmax: usize) -> Result<ExpSeries> {
    let exact = exponential(m, lambda)?;
    let p = powers(m, kmax)?;
    let mut partial = Cochain::zeros(Carrier::Lambda, 0, exact.len());
    let mut gaps = Vec::with_capacity(kmax + 1);
    let mut term_norms = Vec::with_capacity(kmax + 1);
    for (k, zk) in p.values.iter().enumerate() {
        let coeff = lambda.powu(k as u32) / factorial(k);
        let term = zk.scale(coeff);
        term_norms.push(term.max_norm());
        partial = &partial + &term;
        gaps.push(partial.max_diff(&exact));
    }
    Ok(ExpSeries { gaps, term_norms })
}
