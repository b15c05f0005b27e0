//! Harmonic forms dual to cycles, the Gram matrix, holomorphic bases and
//! period matrices of a closed discrete Riemann surface.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculus::{average, hodge_star, integrate_2form, lift_to_diamond, scalar_product, wedge_diamond, wedge_hetero};
use crate::complex::{coboundary, Carrier, Chain, Cochain, DoubleComplex};
use crate::error::{Error, Result};
use crate::homology::CanonicalDissection;
use crate::solver::{Laplacian, SolveStats, DEFAULT_TOLERANCE};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Tolerance under which a form counts as closed, relative to its size.
const CLOSED_TOL: f64 = 1e-9;

/// Rejects 1-forms on Λ that are not closed.
pub fn require_closed_form(dc: &DoubleComplex, w: &Cochain) -> Result<()> {
    let scale = w.max_norm().max(1.0);
    let r = coboundary(dc, w)?.max_norm();
    if r > CLOSED_TOL * scale {
        return Err(Error::NotClosed(r));
    }
    Ok(())
}

/// The harmonic representative ω − du of a closed 1-form, found by solving
/// Δu = −*d*ω on both graphs.
pub fn harmonic_projection(dc: &DoubleComplex, omega: &Cochain) -> Result<(Cochain, SolveStats)> {
    dc.require_closed()?;
    if omega.carrier != Carrier::Lambda {
        return Err(Error::CarrierDiamond);
    }
    require_closed_form(dc, omega)?;
    let div = hodge_star(dc, &coboundary(dc, &hodge_star(dc, omega)?)?)?;
    // Δ = −*d*d on functions, so Δu = −*d*ω makes d*(ω − du) vanish.
    let rhs: Vec<Complex64> = div.values.iter().map(|v| -v).collect();
    let (u, stats) = Laplacian::new(dc).solve(&rhs, DEFAULT_TOLERANCE)?;
    let du = coboundary(dc, &Cochain { carrier: Carrier::Lambda, grade: 0, values: u })?;
    Ok((omega - &du, stats))
}

/// Co-closedness residual max |d*ω| of a 1-form.
pub fn coclosed_residual(dc: &DoubleComplex, w: &Cochain) -> Result<f64> {
    Ok(coboundary(dc, &hodge_star(dc, w)?)?.max_norm())
}

/// A closed 1-form whose period along any Λ-cycle X is the intersection X · C.
///
/// For C on Γ it lives on Γ*: −c on the dual of each Γ-edge of C; for C
/// on Γ* it lives on Γ: +c on the dual of each Γ*-edge.
pub fn crossing_cocycle(dc: &DoubleComplex, c: &Chain) -> Cochain {
    let nf = dc.quad_count();
    let mut k = Cochain::zeros_on(dc, Carrier::Lambda, 1);
    for (e, coeff) in c.terms() {
        if e < nf {
            k.values[e + nf] -= coeff as f64;
        } else {
            k.values[e - nf] += coeff as f64;
        }
    }
    k
}

/// The harmonic form η_C dual to a Λ-cycle C: ∮_X η_C = X · C.
pub fn eta_form(dc: &DoubleComplex, c: &Chain) -> Result<(Cochain, SolveStats)> {
    if c.carrier != Carrier::Lambda || c.grade != 1 {
        return Err(Error::Invalid("η needs a 1-cycle on the double".into()));
    }
    harmonic_projection(dc, &crossing_cocycle(dc, c))
}

/// Real harmonic basis dual to ℵ^Λ: α_k = η_{ℵ_{k+2g}}, α_{k+2g} = −η_{ℵ_k}.
pub fn alpha_basis(dc: &DoubleComplex, d: &CanonicalDissection) -> Result<(Vec<Cochain>, SolveStats)> {
    let g2 = 2 * d.genus;
    let mut stats = SolveStats::default();
    let mut etas = Vec::with_capacity(2 * g2);
    for c in &d.aleph_lambda {
        let (eta, s) = eta_form(dc, c)?;
        stats = stats.merge(s);
        etas.push(eta);
    }
    let mut alpha = Vec::with_capacity(2 * g2);
    alpha.extend(etas[g2..].iter().cloned());
    alpha.extend(etas[..g2].iter().map(|e| e.scale(Complex64::new(-1.0, 0.0))));
    Ok((alpha, stats))
}

/// Periods ∮_{c_k} w_ℓ as a matrix (rows: cycles, columns: forms).
pub fn period_table(cycles: &[Chain], forms: &[Cochain]) -> DMatrix<Complex64> {
    DMatrix::from_fn(cycles.len(), forms.len(), |k, l| forms[l].eval(&cycles[k]))
}

/// Gram matrix (α_k, α_ℓ), real and symmetric.
pub fn gram_matrix(dc: &DoubleComplex, alpha: &[Cochain]) -> Result<DMatrix<f64>> {
    let n = alpha.len();
    let mut g = DMatrix::zeros(n, n);
    for k in 0..n {
        for l in k..n {
            let v = scalar_product(dc, &alpha[k], &alpha[l])?.re;
            g[(k, l)] = v;
            g[(l, k)] = v;
        }
    }
    Ok(g)
}

/// The named blocks `[[A, D], [B, C]]` of a 4g × 4g Gram matrix.
#[derive(Debug, Clone)]
pub struct GramBlocks {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
}

impl GramBlocks {
    pub fn new(gram: &DMatrix<f64>) -> Self {
        let h = gram.nrows() / 2;
        GramBlocks {
            a: gram.view((0, 0), (h, h)).into_owned(),
            d: gram.view((0, h), (h, h)).into_owned(),
            b: gram.view((h, 0), (h, h)).into_owned(),
            c: gram.view((h, h), (h, h)).into_owned(),
        }
    }
}

/// The Hodge star on harmonic forms written in the α basis, `[[−D, A], [−C, B]]`.
///
/// Row j holds the coordinates of *α_j, i.e. this is the transpose of the
/// matrix whose columns expand *α_j.
pub fn star_matrix(gram: &DMatrix<f64>) -> DMatrix<f64> {
    let bl = GramBlocks::new(gram);
    let h = bl.a.nrows();
    let mut s = DMatrix::zeros(2 * h, 2 * h);
    s.view_mut((0, 0), (h, h)).copy_from(&(-&bl.d));
    s.view_mut((0, h), (h, h)).copy_from(&bl.a);
    s.view_mut((h, 0), (h, h)).copy_from(&(-&bl.c));
    s.view_mut((h, h), (h, h)).copy_from(&bl.b);
    s
}

fn complexify(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Holomorphic basis ζ_k = (i − *) Σ_ℓ C⁻¹_{kℓ} α_{ℓ+2g}, k < 2g.
pub fn holomorphic_basis(
    dc: &DoubleComplex,
    alpha: &[Cochain],
    gram: &DMatrix<f64>,
) -> Result<Vec<Cochain>> {
    let bl = GramBlocks::new(gram);
    let h = bl.c.nrows();
    let cinv = bl.c.clone().cholesky().ok_or(Error::SingularC)?.inverse();
    (0..h)
        .map(|k| {
            let mut sum = Cochain::zeros_on(dc, Carrier::Lambda, 1);
            for l in 0..h {
                sum.axpy(Complex64::new(cinv[(k, l)], 0.0), &alpha[l + h]);
            }
            let star = hodge_star(dc, &sum)?;
            Ok(&sum.scale(I) - &star)
        })
        .collect()
}

/// Period matrix C⁻¹(i − B).
pub fn period_matrix_formula(gram: &DMatrix<f64>) -> Result<DMatrix<Complex64>> {
    let bl = GramBlocks::new(gram);
    let h = bl.c.nrows();
    let cinv = bl.c.clone().cholesky().ok_or(Error::SingularC)?.inverse();
    let i_minus_b = DMatrix::from_fn(h, h, |r, c| {
        Complex64::new(-bl.b[(r, c)], if r == c { 1.0 } else { 0.0 })
    });
    Ok(complexify(&cinv) * i_minus_b)
}

/// All period data of a closed surface in a canonical dissection.
#[derive(Debug, Clone)]
pub struct PeriodData {
    pub genus: usize,
    pub alpha: Vec<Cochain>,
    pub gram: DMatrix<f64>,
    pub star: DMatrix<f64>,
    pub zeta: Vec<Cochain>,
    /// C⁻¹(i − B).
    pub pi: DMatrix<Complex64>,
    /// ∮_{ℵ_{k+2g}} ζ_ℓ, integrated directly.
    pub pi_integrated: DMatrix<Complex64>,
    pub pi_gamma: DMatrix<Complex64>,
    pub pi_gamma_star: DMatrix<Complex64>,
    pub pi_diamond: DMatrix<Complex64>,
    /// Lifts to ◊ of ζ_k + ζ_{k+g}, when their holonomies agree on Γ and Γ*.
    pub zeta_diamond: Option<Vec<Cochain>>,
    pub solver: SolveStats,
}

/// Runs the whole pipeline: α basis, Gram matrix, ζ basis and Π.
pub fn compute_periods(dc: &DoubleComplex, d: &CanonicalDissection) -> Result<PeriodData> {
    dc.require_closed()?;
    let g = d.genus;
    let (alpha, solver) = alpha_basis(dc, d)?;
    let gram = gram_matrix(dc, &alpha)?;
    let star = star_matrix(&gram);
    let zeta = holomorphic_basis(dc, &alpha, &gram)?;
    let pi = period_matrix_formula(&gram)?;
    let pi_integrated = period_table(&d.aleph_lambda[2 * g..], &zeta);
    let block = |r: usize, c: usize| pi.view((r, c), (g, g)).into_owned();
    let pi_gamma = block(0, 0) + block(0, g);
    let pi_gamma_star = block(g, 0) + block(g, g);
    let pi_diamond = (&pi_gamma + &pi_gamma_star).map(|z| z / 2.0);
    let bl = GramBlocks::new(&gram);
    let c_gap = (bl.c.view((0, 0), (g, g)) - bl.c.view((g, g), (g, g))).abs().max();
    let zeta_diamond = if g > 0 && c_gap <= 1e-6 {
        (0..g)
            .map(|k| lift_to_diamond(dc, &(&zeta[k] + &zeta[k + g]), 0))
            .collect::<Result<Vec<_>>>()
            .ok()
    } else {
        None
    };
    Ok(PeriodData {
        genus: g,
        alpha,
        gram,
        star,
        zeta,
        pi,
        pi_integrated,
        pi_gamma,
        pi_gamma_star,
        pi_diamond,
        zeta_diamond,
        solver,
    })
}

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}

pub fn max_abs_c(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.norm()))
}

/// Residuals of the structural identities satisfied by the period data.
#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct Residuals {
    pub gram_symmetry: f64,
    pub gram_min_eigenvalue: f64,
    pub star_squared: f64,
    pub b2_minus_ca_plus_i: f64,
    pub ab_minus_btb_a: f64,
    pub c_bt_minus_bc: f64,
    pub duality: f64,
    pub pi_symmetry: f64,
    pub pi_formula_vs_integrated: f64,
    pub im_pi_min_eigenvalue: f64,
    pub zeta_normalisation: f64,
    pub zeta_holomorphy: f64,
    pub zeta_reality: f64,
    pub block_structure: f64,
    pub star_expansion: f64,
}

/// Evaluates every identity the period data should satisfy.
pub fn residuals(dc: &DoubleComplex, d: &CanonicalDissection, p: &PeriodData) -> Result<Residuals> {
    let g = p.genus;
    let n = 4 * g;
    let h = 2 * g;
    let bl = GramBlocks::new(&p.gram);
    let id = |k: usize| DMatrix::<f64>::identity(k, k);
    let mut r = Residuals {
        gram_symmetry: max_abs(&(&p.gram - p.gram.transpose())),
        gram_min_eigenvalue: SymmetricEigen::new(p.gram.clone()).eigenvalues.min(),
        star_squared: max_abs(&(&p.star * &p.star + id(n))),
        b2_minus_ca_plus_i: max_abs(&(&bl.b * &bl.b - &bl.c * &bl.a + id(h))),
        ab_minus_btb_a: max_abs(&(&bl.a * &bl.b - bl.b.transpose() * &bl.a)),
        c_bt_minus_bc: max_abs(&(&bl.c * bl.b.transpose() - &bl.b * &bl.c)),
        ..Default::default()
    };
    let duality = period_table(&d.aleph_lambda, &p.alpha);
    r.duality = max_abs_c(&(duality - complexify(&id(n))));
    r.pi_symmetry = max_abs_c(&(&p.pi - p.pi.transpose()));
    r.pi_formula_vs_integrated = max_abs_c(&(&p.pi - &p.pi_integrated));
    let im = p.pi.map(|z| z.im);
    let im_sym = (&im + im.transpose()) / 2.0;
    r.im_pi_min_eigenvalue = SymmetricEigen::new(im_sym).eigenvalues.min();
    let first = period_table(&d.aleph_lambda[..h], &p.zeta);
    r.zeta_normalisation = max_abs_c(&(first - complexify(&id(h))));
    for z in &p.zeta {
        let star = hodge_star(dc, z)?;
        let typ = star.max_diff(&z.scale(-I));
        let closed = coboundary(dc, z)?.max_norm();
        r.zeta_holomorphy = r.zeta_holomorphy.max(typ).max(closed);
    }
    // ζ_k is real on one graph and imaginary on the other.
    let nf = dc.quad_count();
    for (k, z) in p.zeta.iter().enumerate() {
        let real_on_gamma = k < g;
        for (e, v) in z.values.iter().enumerate() {
            let on_gamma = e < nf;
            let bad = if on_gamma == real_on_gamma { v.im } else { v.re };
            r.zeta_reality = r.zeta_reality.max(bad.abs());
        }
    }
    // Diagonal blocks of Π pure imaginary, off-diagonal ones real.
    let scale = max_abs_c(&p.pi).max(1.0);
    for i in 0..h {
        for j in 0..h {
            let z = p.pi[(i, j)];
            let same = (i < g) == (j < g);
            let bad = if same { z.re } else { z.im };
            r.block_structure = r.block_structure.max(bad.abs() / scale);
        }
    }
    // Expanding *α_j in the α basis gives row j of the star matrix.
    let stars: Vec<Cochain> = p.alpha.iter().map(|a| hodge_star(dc, a)).collect::<Result<_>>()?;
    let expansion = period_table(&d.aleph_lambda, &stars);
    r.star_expansion = max_abs_c(&(expansion.transpose() - complexify(&p.star)));
    Ok(r)
}

/// |LHS − RHS| of the bilinear relation for two closed forms.
///
/// On Λ: ∬ θ∧θ' = Σ_{j<2g} (∮_{ℵ_j}θ ∮_{ℵ_{j+2g}}θ' − ∮_{ℵ_{j+2g}}θ ∮_{ℵ_j}θ');
/// on ◊ the same with g terms and the ◊ wedge product.
pub fn check_bilinear(
    dc: &DoubleComplex,
    d: &CanonicalDissection,
    theta: &Cochain,
    theta_prime: &Cochain,
) -> Result<f64> {
    if theta.carrier != theta_prime.carrier {
        return Err(Error::Invalid("forms live on different carriers".into()));
    }
    for w in [theta, theta_prime] {
        let scale = w.max_norm().max(1.0);
        let r = coboundary(dc, w)?.max_norm();
        if r > CLOSED_TOL * scale {
            return Err(Error::NotClosed(r));
        }
    }
    let (lhs, cycles, half) = match theta.carrier {
        Carrier::Lambda => (
            integrate_2form(&wedge_hetero(dc, theta, theta_prime)?),
            &d.aleph_lambda,
            2 * d.genus,
        ),
        Carrier::Diamond => (
            integrate_2form(&wedge_diamond(dc, theta, theta_prime)?),
            &d.aleph,
            d.genus,
        ),
    };
    let rhs: Complex64 = (0..half)
        .map(|j| {
            theta.eval(&cycles[j]) * theta_prime.eval(&cycles[j + half])
                - theta.eval(&cycles[j + half]) * theta_prime.eval(&cycles[j])
        })
        .sum();
    Ok((lhs - rhs).norm())
}

/// The norm of a harmonic form through its periods and those of *θ̄.
pub fn harmonic_norm_by_periods(
    dc: &DoubleComplex,
    d: &CanonicalDissection,
    theta: &Cochain,
) -> Result<Complex64> {
    let h = 2 * d.genus;
    let star_bar = hodge_star(dc, &theta.conj())?;
    let c = &d.aleph_lambda;
    Ok((0..h)
        .map(|j| theta.eval(&c[j]) * star_bar.eval(&c[j + h]) - theta.eval(&c[j + h]) * star_bar.eval(&c[j]))
        .sum())
}

/// Checks A(ζ^◊_k) = ζ_k + ζ_{k+g} on the lifted forms.
pub fn zeta_diamond_residual(dc: &DoubleComplex, p: &PeriodData) -> Result<Option<f64>> {
    let Some(zd) = &p.zeta_diamond else { return Ok(None) };
    let g = p.genus;
    let mut worst: f64 = 0.0;
    for (k, z) in zd.iter().enumerate() {
        let target = &p.zeta[k] + &p.zeta[k + g];
        worst = worst.max(average(dc, z)?.max_diff(&target));
    }
    Ok(Some(worst))
}

/// A seeded random closed 1-form on Λ: a random harmonic combination of
/// the α basis plus the coboundary of a random function.
pub fn random_closed_form(dc: &DoubleComplex, alpha: &[Cochain], rng: &mut ChaCha8Rng) -> Result<Cochain> {
    let mut unit = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let f = Cochain::from_fn(Carrier::Lambda, 0, dc.vertex_count(), |_| unit());
    let mut w = coboundary(dc, &f)?;
    for a in alpha {
        w.axpy(unit(), a);
    }
    Ok(w)
}

/// Largest bilinear-relation defect over `pairs` seeded random pairs of
/// closed forms on Λ.
pub fn bilinear_sweep(dc: &DoubleComplex, d: &CanonicalDissection, p: &PeriodData, pairs: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let t = random_closed_form(dc, &p.alpha, &mut rng)?;
        let u = random_closed_form(dc, &p.alpha, &mut rng)?;
        worst = worst.max(check_bilinear(dc, d, &t, &u)?);
    }
    Ok(worst)
}
