//! The four driver commands as library functions: period reports,
//! convergence sweeps, special-function point clouds and move scripts.
//! Each returns plain data; formatting lives in [`crate::io`].

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::calculus::{cr_residuals, energy};
use crate::complex::{Chain, Cochain, DoubleComplex, QuadGraph};
use crate::critical::exp::{check_lambda, exp_factor, exponential};
use crate::critical::powers::{chain_powers, power};
use crate::critical::{
    square_patch, square_torus, tri_hex_torus, tri_sextant, CriticalMap, TriHexParams,
};
use crate::error::{Error, Result};
use crate::fixtures::genus_two;
use crate::harmonic::{bilinear_sweep, compute_periods, max_abs_c, residuals, Residuals};
use crate::homology::{
    canonical_dissection, default_dissection, lambda_intersection_matrix, symplectic_j,
};
use crate::io::{complex_rows, real_rows, Cell, ComplexFile, Cplx, Table};
use crate::moves::{apply_step, holomorphic_dimension, transport, MoveStep, Surface};

/// A surface to work on, with whatever extra structure its generator knows.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub complex: DoubleComplex,
    /// A critical realisation, when the surface came from a generator.
    pub map: Option<CriticalMap>,
}

impl Fixture {
    pub fn plain(complex: DoubleComplex) -> Self {
        Fixture { complex, map: None }
    }

    pub fn critical(map: CriticalMap) -> Self {
        Fixture { complex: map.complex.clone(), map: Some(map) }
    }

    /// The modulus b/a of a flat torus given with its lattice periods.
    pub fn tau_ref(&self) -> Option<Complex64> {
        let [a, b] = self.map.as_ref()?.lattice?;
        Some(b / a)
    }

    fn basis_hint(&self) -> Option<&[Chain]> {
        self.map.as_ref()?.basis_hint.as_deref()
    }
}

/// Where a surface comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    /// A complex in the JSON format.
    Json(String),
    SquareTorus { p: usize, q: usize, theta: f64 },
    /// Angles of the triangle opposite the horizontal, "/" and "\" edges.
    TriHex { n1: usize, n2: usize, angles: Option<[f64; 3]> },
    GenusTwo { seed: u64 },
    SquarePatch { radius: usize, theta: f64 },
    Sextant { radius: usize, angles: Option<[f64; 3]> },
}

fn tri_params(angles: Option<[f64; 3]>) -> TriHexParams {
    match angles {
        Some([a, b, c]) => TriHexParams::from_angles(a, b, c),
        None => TriHexParams::equilateral(),
    }
}

impl Source {
    pub fn load(&self) -> Result<Fixture> {
        Ok(match *self {
            Source::Json(ref text) => Fixture::plain(crate::io::load_complex(text)?),
            Source::SquareTorus { p, q, theta } => Fixture::critical(square_torus(p, q, theta)?),
            Source::TriHex { n1, n2, angles } => Fixture::critical(tri_hex_torus(tri_params(angles), n1, n2)?),
            Source::GenusTwo { seed } => Fixture::plain(genus_two(seed)?),
            Source::SquarePatch { radius, theta } => Fixture::critical(square_patch(radius, theta)?),
            Source::Sextant { radius, angles } => Fixture::critical(tri_sextant(tri_params(angles), radius)?),
        })
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SolverReport {
    pub iterations: usize,
    pub residual: f64,
}

/// Residuals of every checked relation, grouped by category.
#[derive(Debug, Clone, Serialize)]
pub struct PeriodResiduals {
    pub identities: Residuals,
    /// Largest bilinear-relation defect over the random pairs.
    pub bilinear: f64,
    pub bilinear_pairs: usize,
    /// Largest entry of (ℵ_k · ℵ_ℓ) − J on ◊ and on Λ.
    pub intersection_vs_j: i64,
    pub lambda_intersection_vs_j: i64,
    /// ‖Π_Γ − Π_Γ*‖.
    pub gamma_gap: f64,
    /// ‖Π_Γ − τ‖ and ‖Π_Γ* − τ‖ for flat tori.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_error: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodsReport {
    pub genus: usize,
    pub vertices: usize,
    pub quads: usize,
    pub gram: Vec<Vec<f64>>,
    pub star: Vec<Vec<f64>>,
    pub pi: Vec<Vec<Cplx>>,
    pub pi_integrated: Vec<Vec<Cplx>>,
    pub pi_gamma: Vec<Vec<Cplx>>,
    pub pi_gamma_star: Vec<Vec<Cplx>>,
    pub pi_diamond: Vec<Vec<Cplx>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_ref: Option<Cplx>,
    pub solver: SolverReport,
    pub residuals: PeriodResiduals,
}

fn max_int_gap(a: &[Vec<i64>], b: &[Vec<i64>]) -> i64 {
    a.iter().zip(b).flat_map(|(r, s)| r.iter().zip(s).map(|(x, y)| (x - y).abs())).max().unwrap_or(0)
}

/// The period pipeline on a closed surface, with `pairs` seeded random
/// closed-form pairs for the bilinear relations.
pub fn periods(fx: &Fixture, pairs: usize, seed: u64) -> Result<PeriodsReport> {
    let dc = &fx.complex;
    dc.require_closed()?;
    let d = match fx.basis_hint() {
        Some(basis) => canonical_dissection(dc, basis)?,
        None => default_dissection(dc)?,
    };
    let pd = compute_periods(dc, &d)?;
    let identities = residuals(dc, &d, &pd)?;
    let bilinear = if pairs > 0 { bilinear_sweep(dc, &d, &pd, pairs, seed)? } else { 0.0 };
    let j = symplectic_j(d.genus);
    let j_lambda = symplectic_j(2 * d.genus);
    let tau = fx.tau_ref().filter(|_| d.genus == 1);
    let reference_error = tau.map(|t| {
        let err = |m: &nalgebra::DMatrix<Complex64>| (m[(0, 0)] - t).norm();
        err(&pd.pi_gamma).max(err(&pd.pi_gamma_star))
    });
    Ok(PeriodsReport {
        genus: d.genus,
        vertices: dc.vertex_count(),
        quads: dc.quad_count(),
        gram: real_rows(&pd.gram),
        star: real_rows(&pd.star),
        pi: complex_rows(&pd.pi),
        pi_integrated: complex_rows(&pd.pi_integrated),
        pi_gamma: complex_rows(&pd.pi_gamma),
        pi_gamma_star: complex_rows(&pd.pi_gamma_star),
        pi_diamond: complex_rows(&pd.pi_diamond),
        tau_ref: tau.map(Cplx::from),
        solver: SolverReport { iterations: pd.solver.iterations, residual: pd.solver.residual },
        residuals: PeriodResiduals {
            identities,
            bilinear,
            bilinear_pairs: pairs,
            intersection_vs_j: max_int_gap(&d.intersection, &j),
            lambda_intersection_vs_j: max_int_gap(&lambda_intersection_matrix(dc, &d), &j_lambda),
            gamma_gap: max_abs_c(&(&pd.pi_gamma - &pd.pi_gamma_star)),
            reference_error,
        },
    })
}

/// Multiplies every ρ by e^{eps·u} with u uniform in [−1, 1].
pub fn perturb_rho(dc: &DoubleComplex, eps: f64, seed: u64) -> Result<DoubleComplex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw: QuadGraph = dc.raw().clone();
    for r in &mut raw.rho {
        *r *= (eps * rng.gen_range(-1.0..=1.0)).exp();
    }
    DoubleComplex::from_raw(raw)
}

/// One row of a convergence sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergeRow {
    pub level: usize,
    pub delta: f64,
    pub quads: usize,
    /// ‖Π_Γ − Π_Γ*‖.
    pub gap: f64,
    pub ref_error: Option<f64>,
}

/// Periods of `levels` successive refinements of a critical torus, the
/// ρ optionally perturbed by `eps` (seeded) at every level.
pub fn converge(map: &CriticalMap, levels: usize, eps: f64, seed: u64) -> Result<Vec<ConvergeRow>> {
    if levels == 0 {
        return Err(Error::Invalid("levels must be at least 1".into()));
    }
    let mut cur = map.clone();
    let mut rows = Vec::with_capacity(levels);
    for level in 0..levels {
        if level > 0 {
            cur = cur.refine()?;
        }
        let mut fx = Fixture::critical(cur.clone());
        if eps != 0.0 {
            fx.complex = perturb_rho(&cur.complex, eps, seed.wrapping_add(level as u64))?;
        }
        let r = periods(&fx, 0, seed)?;
        rows.push(ConvergeRow {
            level,
            delta: cur.delta,
            quads: fx.complex.quad_count(),
            gap: r.residuals.gamma_gap,
            ref_error: r.residuals.reference_error,
        });
    }
    Ok(rows)
}

pub fn converge_table(rows: &[ConvergeRow]) -> Table {
    let mut t = Table::new(&["level", "delta", "quads", "gap", "ref_error"]);
    for r in rows {
        t.rows.push(vec![
            Cell::Int(r.level as i64),
            Cell::Float(r.delta),
            Cell::Int(r.quads as i64),
            Cell::Float(r.gap),
            r.ref_error.map_or(Cell::Empty, Cell::Float),
        ]);
    }
    t
}

/// The special function to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Special {
    Exp(Complex64),
    Power(usize),
}

impl Special {
    fn continuous(self, z: Complex64) -> Complex64 {
        match self {
            Special::Exp(l) => (l * z).exp(),
            Special::Power(k) => z.powu(k as u32),
        }
    }
}

/// The domain a special function lives on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// First sextant of a triangular lattice.
    Sextant { radius: usize, angles: Option<[f64; 3]> },
    /// Square lattice patch of rhombi with angle 2θ.
    Square { radius: usize, theta: f64 },
    /// The points 0, 1/n, …, 1 of the real axis.
    Chain(usize),
}

/// Discrete values against the continuous function, vertex by vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub z: Vec<Complex64>,
    pub discrete: Vec<Complex64>,
    pub continuous: Vec<Complex64>,
}

impl PointCloud {
    pub fn max_error(&self) -> f64 {
        self.discrete.iter().zip(&self.continuous).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest |f − f_cont| / max(|f_cont|, 1).
    pub fn max_relative_error(&self) -> f64 {
        self.discrete
            .iter()
            .zip(&self.continuous)
            .map(|(a, b)| (a - b).norm() / b.norm().max(1.0))
            .fold(0.0, f64::max)
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(&["vertex", "re_z", "im_z", "re_f", "im_f", "re_cont", "im_cont"]);
        for (v, ((z, f), c)) in self.z.iter().zip(&self.discrete).zip(&self.continuous).enumerate() {
            let mut row = vec![Cell::Int(v as i64)];
            row.extend([z.re, z.im, f.re, f.im, c.re, c.im].map(Cell::Float));
            t.rows.push(row);
        }
        t
    }
}

fn chain_values(f: Special, n: usize) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Err(Error::Invalid("a chain needs at least one step".into()));
    }
    let h = 1.0 / n as f64;
    match f {
        Special::Power(k) => Ok(chain_powers(n, k)[k].iter().map(|&x| Complex64::new(x, 0.0)).collect()),
        Special::Exp(l) => {
            check_lambda(h, l)?;
            let step = exp_factor(l, Complex64::new(h, 0.0));
            let mut out = vec![Complex64::new(1.0, 0.0)];
            for i in 0..n {
                out.push(out[i] * step);
            }
            Ok(out)
        }
    }
}

/// Evaluates a discrete exponential or power on a planar domain.
pub fn special(f: Special, domain: Domain) -> Result<PointCloud> {
    let (z, discrete) = match domain {
        Domain::Chain(n) => {
            let z = (0..=n).map(|i| Complex64::new(i as f64 / n as f64, 0.0)).collect();
            (z, chain_values(f, n)?)
        }
        Domain::Sextant { radius, angles } => special_on_map(f, &tri_sextant(tri_params(angles), radius)?)?,
        Domain::Square { radius, theta } => special_on_map(f, &square_patch(radius, theta)?)?,
    };
    let continuous = z.iter().map(|&w| f.continuous(w)).collect();
    Ok(PointCloud { z, discrete, continuous })
}

fn special_on_map(f: Special, m: &CriticalMap) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let pos = m.require_simply_connected()?.to_vec();
    let values = match f {
        Special::Exp(l) => exponential(m, l)?,
        Special::Power(k) => power(m, k)?,
    };
    Ok((pos, values.values))
}

/// State of the surface after each step of a script.
#[derive(Debug, Clone, Serialize)]
pub struct MovesReport {
    pub steps: usize,
    /// "Z" when a planar embedding was available, "epsilon" otherwise.
    pub transported_function: String,
    /// Total curvature before the script and after every step.
    pub curvature: Vec<f64>,
    pub dimension: Vec<usize>,
    /// Largest Cauchy–Riemann residual of the transported function.
    pub transport_residual: Vec<f64>,
    /// Relative change of its Dirichlet energy.
    pub energy_drift: Vec<f64>,
    /// Largest star-triangle relation defect over the type III steps.
    pub star_triangle_max: f64,
    #[serde(rename = "final")]
    pub final_complex: ComplexFile,
}

/// A step failed; carries its position in the script.
#[derive(Debug, Clone, PartialEq)]
pub struct ScriptError {
    pub index: usize,
    pub error: Error,
}

impl std::fmt::Display for ScriptError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "script step {}: {}", self.index, self.error)
    }
}

impl std::error::Error for ScriptError {}

/// Parses a script: a JSON list of `{kind, site, direction?, param?}`.
pub fn parse_script(json: &str) -> Result<Vec<MoveStep>> {
    serde_json::from_str(json).map_err(|e| Error::Invalid(format!("malformed move script: {e}")))
}

fn max_cr(dc: &DoubleComplex, f: &Cochain) -> f64 {
    cr_residuals(dc, f).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Runs a script, tracking curvature, holomorphic dimension and a
/// transported holomorphic function.
pub fn run_moves(fx: &Fixture, script: &[MoveStep]) -> std::result::Result<MovesReport, ScriptError> {
    let at = |index: usize| move |error: Error| ScriptError { index, error };
    let mut s = Surface::new(fx.complex.clone());
    let (name, mut f) = match fx.map.as_ref().and_then(|m| m.z().ok()) {
        Some(z) => ("Z", z),
        None => ("epsilon", s.complex.epsilon(crate::complex::Carrier::Lambda)),
    };
    let e0 = energy(&s.complex, &f).map_err(at(0))?;
    let drift = |e: f64| if e0 > 0.0 { (e - e0).abs() / e0 } else { e.abs() };
    let mut report = MovesReport {
        steps: script.len(),
        transported_function: name.into(),
        curvature: vec![s.total_curvature()],
        dimension: vec![holomorphic_dimension(&s.complex)],
        transport_residual: vec![max_cr(&s.complex, &f)],
        energy_drift: vec![0.0],
        star_triangle_max: 0.0,
        final_complex: ComplexFile::from_complex(&s.complex),
    };
    for (i, step) in script.iter().enumerate() {
        let (next, rec) = apply_step(&s, step).map_err(at(i))?;
        f = transport(&f, &rec).map_err(at(i))?;
        s = next;
        report.curvature.push(s.total_curvature());
        report.dimension.push(holomorphic_dimension(&s.complex));
        report.transport_residual.push(max_cr(&s.complex, &f));
        report.energy_drift.push(drift(energy(&s.complex, &f).map_err(at(i))?));
        if let Some(r) = rec.params.star_triangle_residual() {
            report.star_triangle_max = report.star_triangle_max.max(r);
        }
    }
    report.final_complex = ComplexFile::from_complex(&s.complex);
    Ok(report)
}

/// Wall-clock seconds of a closure, with its result.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed().as_secs_f64())
}
