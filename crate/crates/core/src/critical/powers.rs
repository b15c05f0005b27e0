//! f dZ, discrete powers Z^k and their behaviour on chains.

use num_complex::Complex64;

use super::CriticalMap;
use crate::calculus::{average, cr_residuals, hodge_star, primitive};
use crate::complex::{coboundary, Carrier, Cochain};
use crate::error::{Error, Result};

/// The 1-form f dZ and how far f was from holomorphic.
#[derive(Debug, Clone)]
pub struct FdZ {
    pub form: Cochain,
    /// Largest Cauchy–Riemann residual of the input.
    pub input_residual: f64,
}

/// ∫_(x,y) f dZ = (f(x) + f(y))/2 · (Z(y) − Z(x)) on every ◊ edge.
///
/// The result is closed only when f is holomorphic; otherwise it is still
/// returned together with the residual.
pub fn integrate_fdz(m: &CriticalMap, f: &Cochain) -> Result<FdZ> {
    if f.carrier != Carrier::Lambda || f.grade != 0 {
        return Err(Error::GradeMismatch { expected: 0, found: f.grade });
    }
    let dc = &m.complex;
    let form = Cochain::from_fn(Carrier::Diamond, 1, dc.edge_count(), |e| {
        let de = dc.edge(e);
        (f.values[de.primal] + f.values[de.dual]) / 2.0 * m.edge_vector(e)
    });
    let input_residual = cr_residuals(dc, f).iter().map(|r| r.norm()).fold(0.0, f64::max);
    Ok(FdZ { form, input_residual })
}

/// Closedness and type residuals of a ◊ 1-form: max |dω| and max |*Aω + iAω|.
pub fn form_residuals(m: &CriticalMap, w: &Cochain) -> Result<(f64, f64)> {
    let dc = &m.complex;
    let closed = coboundary(dc, w)?.max_norm();
    let a = average(dc, w)?;
    let typ = hodge_star(dc, &a)?.max_diff(&a.scale(Complex64::new(0.0, -1.0)));
    Ok((closed, typ))
}

/// The powers Z^0, …, Z^kmax with the largest path-independence mismatch.
#[derive(Debug, Clone)]
pub struct Powers {
    pub values: Vec<Cochain>,
    pub path_residual: f64,
}

/// Z^k = ∫_O k Z^{k−1} dZ, for k up to `kmax`.
pub fn powers(m: &CriticalMap, kmax: usize) -> Result<Powers> {
    m.require_simply_connected()?;
    let dc = &m.complex;
    let n = dc.vertex_count();
    let mut values = vec![Cochain::from_fn(Carrier::Lambda, 0, n, |_| Complex64::new(1.0, 0.0))];
    let mut path_residual: f64 = 0.0;
    for k in 1..=kmax {
        let f = values[k - 1].scale(Complex64::new(k as f64, 0.0));
        let w = integrate_fdz(m, &f)?.form;
        let (zk, mismatch) = primitive(dc, &w, m.origin)?;
        let scale = zk.max_norm().max(1.0);
        path_residual = path_residual.max(mismatch / scale);
        values.push(zk);
    }
    Ok(Powers { values, path_residual })
}

/// The single power Z^k.
pub fn power(m: &CriticalMap, k: usize) -> Result<Cochain> {
    Ok(powers(m, k)?.values.pop().expect("Z^0 is always present"))
}

/// Powers on the chain {0, 1/n, …, 1} by the trapezoid rule:
/// `out[k][i] = Z^k(i/n)`.
pub fn chain_powers(n: usize, kmax: usize) -> Vec<Vec<f64>> {
    let h = 1.0 / n as f64;
    let mut out = vec![vec![1.0; n + 1]];
    for k in 1..=kmax {
        let prev = &out[k - 1];
        let mut cur = vec![0.0; n + 1];
        for i in 0..n {
            cur[i + 1] = cur[i] + k as f64 * (prev[i] + prev[i + 1]) / 2.0 * h;
        }
        out.push(cur);
    }
    out
}

/// The constant (k!/2)(4/sin η)^{k−2} bounding |Z^k(x) − x^k| / (|x|^{k−2} δ²),
/// with η the smallest rhombus angle.
pub fn power_error_constant(k: usize, eta: f64) -> f64 {
    factorial(k) / 2.0 * (4.0 / eta.sin()).powi(k as i32 - 2)
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Z^k(x) = k!/2^{k−1} x^k at a neighbour x of the origin.
pub fn neighbour_power(x: Complex64, k: usize) -> Complex64 {
    x.powu(k as u32) * factorial(k) / 2f64.powi(k as i32 - 1)
}

/// Z^k(y) at the corner opposite the origin of a rhombus with half angle θ there.
pub fn next_neighbour_power(y: Complex64, theta: f64, k: usize) -> Complex64 {
    let kf = k as f64;
    y.powu(k as u32) * factorial(k) / 2f64.powi(2 * k as i32 - 2) * (kf * theta).sin()
        / (theta.sin() * theta.cos().powi(k as i32 - 1))
}
