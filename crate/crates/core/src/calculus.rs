//! Hodge star, Laplacian, wedge products, averaging and scalar product.

use std::collections::VecDeque;

use num_complex::Complex64;

use crate::complex::{coboundary, Carrier, Cochain, DoubleComplex, SIDE_SIGN};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn require_lambda(f: &Cochain) -> Result<()> {
    match f.carrier {
        Carrier::Lambda => Ok(()),
        Carrier::Diamond => Err(Error::CarrierDiamond),
    }
}

fn require_diamond(f: &Cochain) -> Result<()> {
    match f.carrier {
        Carrier::Diamond => Ok(()),
        Carrier::Lambda => Err(Error::CarrierLambda),
    }
}

fn require_grade(f: &Cochain, grade: u8) -> Result<()> {
    if f.grade == grade {
        Ok(())
    } else {
        Err(Error::GradeMismatch { expected: grade, found: f.grade })
    }
}

/// Hodge star on the double: `∫_e *α = −ρ(e*) ∫_{e*} α` on 1-forms, and the
/// identity between a vertex and its dual face on 0- and 2-forms.
pub fn hodge_star(dc: &DoubleComplex, f: &Cochain) -> Result<Cochain> {
    require_lambda(f)?;
    match f.grade {
        0 | 2 => {
            dc.require_closed()?;
            Ok(Cochain { carrier: Carrier::Lambda, grade: 2 - f.grade, values: f.values.clone() })
        }
        _ => {
            let nf = dc.quad_count();
            Ok(Cochain::from_fn(Carrier::Lambda, 1, 2 * nf, |e| {
                if e < nf {
                    -f.values[e + nf] / dc.rho(e)
                } else {
                    f.values[e - nf] * dc.rho(e - nf)
                }
            }))
        }
    }
}

/// Laplacian Δ = −d*d* − *d*d.
///
/// On functions this is `Σ ρ(x, x')(f(x) − f(x'))` over Λ-neighbours, a
/// positive semidefinite operator. In disc mode only functions are supported and
/// boundary vertices get 0.
pub fn laplacian(dc: &DoubleComplex, f: &Cochain) -> Result<Cochain> {
    require_lambda(f)?;
    if f.grade == 0 {
        let mut out = Cochain::zeros_on(dc, Carrier::Lambda, 0);
        for e in 0..dc.lambda_edge_count() {
            let (a, b) = dc.lambda_edge(e);
            let flow = (f.values[a] - f.values[b]) * dc.lambda_rho(e);
            out.values[a] += flow;
            out.values[b] -= flow;
        }
        for v in 0..dc.vertex_count() {
            if !dc.is_interior(v) {
                out.values[v] = ZERO;
            }
        }
        return Ok(out);
    }
    dc.require_closed()?;
    let star = |c: &Cochain| hodge_star(dc, c);
    let d = |c: &Cochain| coboundary(dc, c);
    let minus = Complex64::new(-1.0, 0.0);
    let first = d(&star(&d(&star(f)?)?)?)?.scale(minus);
    // d of a 2-form vanishes
    if f.grade == 2 {
        return Ok(first);
    }
    let second = star(&d(&star(&d(f)?)?)?)?.scale(minus);
    Ok(&first + &second)
}

/// Outcome of a holomorphy test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Holomorphy {
    pub holomorphic: bool,
    pub residual: f64,
}

/// Cauchy–Riemann residual of a function on every quad:
/// `f(y') − f(y) − iρ(x, x')(f(x') − f(x))`.
pub fn cr_residuals(dc: &DoubleComplex, f: &Cochain) -> Vec<Complex64> {
    dc.quads()
        .iter()
        .enumerate()
        .map(|(q, v)| {
            f.values[v[3]] - f.values[v[1]] - I * dc.rho(q) * (f.values[v[2]] - f.values[v[0]])
        })
        .collect()
}

/// Tests a function (Cauchy–Riemann on every quad) or a 1-form (closed on
/// every face and `*α = −iα`).
pub fn is_holomorphic(dc: &DoubleComplex, f: &Cochain, tol: f64) -> Result<Holomorphy> {
    require_lambda(f)?;
    let residual = match f.grade {
        0 => cr_residuals(dc, f).iter().map(|r| r.norm()).fold(0.0, f64::max),
        1 => {
            let closed = coboundary(dc, f)?.max_norm();
            let star = hodge_star(dc, f)?;
            let typ = star
                .values
                .iter()
                .zip(&f.values)
                .map(|(s, a)| (s + I * a).norm())
                .fold(0.0, f64::max);
            closed.max(typ)
        }
        g => return Err(Error::GradeMismatch { expected: 1, found: g }),
    };
    Ok(Holomorphy { holomorphic: residual <= tol, residual })
}

/// Side integrals of a ◊ 1-form along the counterclockwise boundary of quad `q`.
fn boundary_integrals(dc: &DoubleComplex, a: &Cochain, q: usize) -> [Complex64; 4] {
    let s = dc.sides(q);
    [0, 1, 2, 3].map(|k| a.values[s[k]] * SIDE_SIGN[k] as f64)
}

/// Wedge product on the quad-graph, for which d is a derivation.
pub fn wedge_diamond(dc: &DoubleComplex, a: &Cochain, b: &Cochain) -> Result<Cochain> {
    require_diamond(a)?;
    require_diamond(b)?;
    if a.grade + b.grade > 2 {
        return Err(Error::GradeOverflow(a.grade + b.grade));
    }
    let (f, other) = if a.grade == 0 { (a, b) } else { (b, a) };
    let out = match (a.grade, b.grade) {
        (0, 0) => Cochain::from_fn(Carrier::Diamond, 0, dc.vertex_count(), |v| {
            a.values[v] * b.values[v]
        }),
        (1, 1) => Cochain::from_fn(Carrier::Diamond, 2, dc.quad_count(), |q| {
            let s = boundary_integrals(dc, a, q);
            let t = boundary_integrals(dc, b, q);
            (0..4)
                .map(|k| {
                    let p = (k + 3) % 4;
                    s[p] * t[k] - s[k] * t[p]
                })
                .sum::<Complex64>()
                / 4.0
        }),
        (_, 1) | (1, _) => Cochain::from_fn(Carrier::Diamond, 1, dc.edge_count(), |e| {
            let de = dc.edge(e);
            (f.values[de.primal] + f.values[de.dual]) / 2.0 * other.values[e]
        }),
        _ => Cochain::from_fn(Carrier::Diamond, 2, dc.quad_count(), |q| {
            let mean: Complex64 = dc.quad(q).iter().map(|&v| f.values[v]).sum::<Complex64>() / 4.0;
            mean * other.values[q]
        }),
    };
    Ok(out)
}

/// Heterogeneous wedge of two 1-forms on Λ, a 2-form on ◊:
/// `∬_q α∧β = α(x,x')β(y,y') + α(y,y')β(x',x)`.
pub fn wedge_hetero(dc: &DoubleComplex, a: &Cochain, b: &Cochain) -> Result<Cochain> {
    require_lambda(a)?;
    require_lambda(b)?;
    require_grade(a, 1)?;
    require_grade(b, 1)?;
    let nf = dc.quad_count();
    Ok(Cochain::from_fn(Carrier::Diamond, 2, nf, |q| {
        a.values[q] * b.values[q + nf] - a.values[q + nf] * b.values[q]
    }))
}

/// Sum of a 2-form over all faces.
pub fn integrate_2form(w: &Cochain) -> Complex64 {
    w.values.iter().sum()
}

/// Averaging map A from forms on ◊ to forms on Λ.
pub fn average(dc: &DoubleComplex, a: &Cochain) -> Result<Cochain> {
    require_diamond(a)?;
    let nf = dc.quad_count();
    Ok(match a.grade {
        0 => Cochain { carrier: Carrier::Lambda, grade: 0, values: a.values.clone() },
        1 => Cochain::from_fn(Carrier::Lambda, 1, 2 * nf, |e| {
            let s = dc.sides(e % nf).map(|k| a.values[k]);
            if e < nf {
                (s[0] - s[1] + s[3] - s[2]) / 2.0
            } else {
                (-s[0] + s[3] - s[1] + s[2]) / 2.0
            }
        }),
        _ => Cochain::from_fn(Carrier::Lambda, 2, dc.vertex_count(), |v| {
            if !dc.is_interior(v) {
                return ZERO;
            }
            dc.corners(v).iter().map(|&(q, _)| a.values[q]).sum::<Complex64>() / 2.0
        }),
    })
}

/// Values of a closed ◊ 1-form on the sides of one quad, given side 0,
/// such that its average is `(mg, md)` on the two diagonals.
fn quad_from_side0(a0: Complex64, mg: Complex64, md: Complex64) -> [Complex64; 4] {
    [a0, a0 - mg, a0 + md - mg, a0 + md]
}

/// Lifts a closed 1-form μ on Λ to a closed 1-form ν on ◊ with A(ν) = μ.
///
/// The lift is unique up to multiples of d_◊ε; it is fixed by ν = 0 on
/// `base_edge`. Fails when μ has different holonomies on Γ and Γ*
/// along some cycle of the surface (or is not closed).
pub fn lift_to_diamond(dc: &DoubleComplex, mu: &Cochain, base_edge: usize) -> Result<Cochain> {
    require_lambda(mu)?;
    require_grade(mu, 1)?;
    if base_edge >= dc.edge_count() {
        return Err(Error::Invalid(format!("edge {base_edge} does not exist")));
    }
    let nf = dc.quad_count();
    let scale = mu.max_norm().max(1.0);
    let mut value: Vec<Option<Complex64>> = vec![None; dc.edge_count()];
    value[base_edge] = Some(ZERO);
    let mut queue = VecDeque::from([base_edge]);
    let mut mismatch: f64 = 0.0;
    while let Some(e) = queue.pop_front() {
        let ve = value[e].unwrap();
        for &(q, k) in dc.edge_sides(e) {
            let (mg, md) = (mu.values[q], mu.values[q + nf]);
            let base = quad_from_side0(ZERO, mg, md);
            let a0 = ve - base[k];
            let vals = quad_from_side0(a0, mg, md);
            for (side, &edge) in dc.sides(q).iter().enumerate() {
                match value[edge] {
                    None => {
                        value[edge] = Some(vals[side]);
                        queue.push_back(edge);
                    }
                    Some(old) => mismatch = mismatch.max((old - vals[side]).norm()),
                }
            }
        }
    }
    if mismatch > 1e-9 * scale {
        return Err(Error::HolonomyMismatch(mismatch));
    }
    Ok(Cochain {
        carrier: Carrier::Diamond,
        grade: 1,
        values: value.into_iter().map(|v| v.unwrap_or(ZERO)).collect(),
    })
}

/// Hermitian scalar product `Σ ρ(e) α(e) conj(β(e))` over Λ-edges.
pub fn scalar_product(dc: &DoubleComplex, a: &Cochain, b: &Cochain) -> Result<Complex64> {
    require_lambda(a)?;
    require_lambda(b)?;
    require_grade(a, 1)?;
    require_grade(b, 1)?;
    Ok((0..dc.lambda_edge_count())
        .map(|e| dc.lambda_rho(e) * a.values[e] * b.values[e].conj())
        .sum())
}

/// The Dirichlet energy (df, df) of a function.
pub fn energy(dc: &DoubleComplex, f: &Cochain) -> Result<f64> {
    let df = coboundary(dc, f)?;
    Ok(scalar_product(dc, &df, &df)?.re)
}

/// A primitive of a ◊ 1-form vanishing at `origin`, integrated along a
/// breadth-first tree. Also returns the largest mismatch on the remaining
/// edges, which is zero exactly when the form is exact.
pub fn primitive(dc: &DoubleComplex, w: &Cochain, origin: usize) -> Result<(Cochain, f64)> {
    require_diamond(w)?;
    if w.grade != 1 {
        return Err(Error::GradeMismatch { expected: 1, found: w.grade });
    }
    let mut val: Vec<Option<Complex64>> = vec![None; dc.vertex_count()];
    val[origin] = Some(Complex64::new(0.0, 0.0));
    let mut queue = VecDeque::from([origin]);
    let mut mismatch: f64 = 0.0;
    while let Some(v) = queue.pop_front() {
        let fv = val[v].unwrap();
        for (u, e, s) in dc.neighbors(v) {
            let target = fv + w.values[e] * s as f64;
            match val[u] {
                None => {
                    val[u] = Some(target);
                    queue.push_back(u);
                }
                Some(old) => mismatch = mismatch.max((old - target).norm()),
            }
        }
    }
    let values = val.into_iter().map(|x| x.ok_or(Error::Disconnected)).collect::<Result<_>>()?;
    Ok((Cochain { carrier: Carrier::Lambda, grade: 0, values }, mismatch))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::{square_patch, square_torus, tri_hex_torus, TriHexParams};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(len: usize, carrier: Carrier, grade: u8, rng: &mut ChaCha8Rng) -> Cochain {
        Cochain::from_fn(carrier, grade, len, |_| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn torus() -> DoubleComplex {
        square_torus(2, 3, 0.5).unwrap().complex
    }

    #[test]
    fn star_of_dz_is_minus_i_dz() {
        for m in [square_torus(2, 1, 0.3).unwrap(), tri_hex_torus(TriHexParams::equilateral(), 2, 2).unwrap()] {
            let dz = m.dz_lambda();
            let s = hodge_star(&m.complex, &dz).unwrap();
            assert!(s.max_diff(&dz.scale(-I)) < 1e-14);
            let h = is_holomorphic(&m.complex, &dz, 1e-12).unwrap();
            assert!(h.holomorphic);
        }
    }

    #[test]
    fn star_squares_to_minus_one_on_one_forms() {
        let dc = torus();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random(dc.lambda_edge_count(), Carrier::Lambda, 1, &mut rng);
        let ss = hodge_star(&dc, &hodge_star(&dc, &a).unwrap()).unwrap();
        assert!(ss.max_diff(&a.scale(Complex64::new(-1.0, 0.0))) < 1e-14);
        let one = Cochain::from_real(Carrier::Lambda, 0, &vec![1.0; dc.vertex_count()]);
        let s1 = hodge_star(&dc, &one).unwrap();
        assert_eq!(s1.grade, 2);
        assert!(s1.values.iter().all(|v| *v == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn star_rejects_diamond() {
        let dc = torus();
        let a = Cochain::zeros_on(&dc, Carrier::Diamond, 1);
        assert_eq!(hodge_star(&dc, &a), Err(Error::CarrierDiamond));
    }

    #[test]
    fn laplacian_kernel_and_stencil() {
        let dc = torus();
        let eps = dc.epsilon(Carrier::Lambda);
        assert!(laplacian(&dc, &eps).unwrap().max_norm() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random(dc.vertex_count(), Carrier::Lambda, 0, &mut rng);
        // The stencil equals −*d*d.
        let sdsd = hodge_star(
            &dc,
            &coboundary(&dc, &hodge_star(&dc, &coboundary(&dc, &f).unwrap()).unwrap()).unwrap(),
        )
        .unwrap()
        .scale(Complex64::new(-1.0, 0.0));
        assert!(laplacian(&dc, &f).unwrap().max_diff(&sdsd) < 1e-12);
        // Positive semidefinite: <f, Lf> = (df, df) ≥ 0.
        let lf = laplacian(&dc, &f).unwrap();
        let q: Complex64 = f.values.iter().zip(&lf.values).map(|(a, b)| a.conj() * b).sum();
        assert!((q.re - energy(&dc, &f).unwrap()).abs() < 1e-10);
        assert!(q.im.abs() < 1e-10);
    }

    #[test]
    fn real_part_of_z_is_harmonic_inside_a_patch() {
        let m = square_patch(3, 0.6).unwrap();
        let z = m.z().unwrap();
        let re = Cochain::from_fn(Carrier::Lambda, 0, z.len(), |v| Complex64::new(z.values[v].re, 0.0));
        assert!(laplacian(&m.complex, &re).unwrap().max_norm() < 1e-12);
    }

    #[test]
    fn holomorphy_of_z_epsilon_and_conjugate() {
        let m = square_patch(2, 0.7).unwrap();
        let dc = &m.complex;
        let z = m.z().unwrap();
        assert!(is_holomorphic(dc, &z, 1e-13).unwrap().holomorphic);
        assert!(is_holomorphic(dc, &dc.epsilon(Carrier::Lambda), 0.0).unwrap().holomorphic);
        // For conj(Z) the residual on a quad is |conj(d2) − iρ conj(d1)| = 2ρ|d1|.
        let zb = z.conj();
        let h = is_holomorphic(dc, &zb, 1e-6).unwrap();
        assert!(!h.holomorphic);
        let expected = (0..dc.quad_count())
            .map(|q| {
                let v = dc.quad(q);
                2.0 * dc.rho(q) * (z.values[v[2]] - z.values[v[0]]).norm()
            })
            .fold(0.0, f64::max);
        assert!((h.residual - expected).abs() < 1e-12);
    }

    #[test]
    fn diamond_wedge_unit_and_antisymmetry() {
        let dc = torus();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random(dc.edge_count(), Carrier::Diamond, 1, &mut rng);
        let one = Cochain::from_real(Carrier::Diamond, 0, &vec![1.0; dc.vertex_count()]);
        assert!(wedge_diamond(&dc, &one, &a).unwrap().max_diff(&a) < 1e-15);
        assert!(wedge_diamond(&dc, &a, &a).unwrap().max_norm() < 1e-15);
        let w = wedge_diamond(&dc, &a, &a).unwrap();
        assert_eq!(w.grade, 2);
        let two = Cochain::zeros_on(&dc, Carrier::Diamond, 2);
        assert_eq!(wedge_diamond(&dc, &a, &two), Err(Error::GradeOverflow(3)));
    }

    #[test]
    fn leibniz_rule_on_diamond() {
        let dc = torus();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut worst: f64 = 0.0;
        for _ in 0..500 {
            let f = random(dc.vertex_count(), Carrier::Diamond, 0, &mut rng);
            let a = random(dc.edge_count(), Carrier::Diamond, 1, &mut rng);
            let lhs = coboundary(&dc, &wedge_diamond(&dc, &f, &a).unwrap()).unwrap();
            let df = coboundary(&dc, &f).unwrap();
            let rhs = &wedge_diamond(&dc, &df, &a).unwrap()
                + &wedge_diamond(&dc, &f, &coboundary(&dc, &a).unwrap()).unwrap();
            worst = worst.max(lhs.max_diff(&rhs));
        }
        assert!(worst < 1e-12, "{worst}");
    }

    #[test]
    fn hetero_wedge_of_dz_and_same_graph_forms() {
        let m = square_torus(2, 2, 0.4).unwrap();
        let dc = &m.complex;
        let dz = m.dz_lambda();
        assert!(wedge_hetero(dc, &dz, &dz).unwrap().max_norm() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let nf = dc.quad_count();
        let mut a = random(2 * nf, Carrier::Lambda, 1, &mut rng);
        let mut b = random(2 * nf, Carrier::Lambda, 1, &mut rng);
        for e in nf..2 * nf {
            a.values[e] = ZERO;
            b.values[e] = ZERO;
        }
        assert_eq!(wedge_hetero(dc, &a, &b).unwrap().max_norm(), 0.0);
    }

    #[test]
    fn scalar_product_routes_agree() {
        let dc = torus();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = dc.lambda_edge_count();
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let a = random(n, Carrier::Lambda, 1, &mut rng);
            let b = random(n, Carrier::Lambda, 1, &mut rng);
            let direct = scalar_product(&dc, &a, &b).unwrap();
            let via = integrate_2form(
                &wedge_hetero(&dc, &a, &hodge_star(&dc, &b.conj()).unwrap()).unwrap(),
            );
            worst = worst.max((direct - via).norm());
            let ba = scalar_product(&dc, &b, &a).unwrap();
            assert!((direct - ba.conj()).norm() < 1e-12);
        }
        assert!(worst < 1e-12, "{worst}");
        let zero = Cochain::zeros(Carrier::Lambda, 1, n);
        assert_eq!(scalar_product(&dc, &zero, &zero).unwrap(), ZERO);
    }

    #[test]
    fn dz_norm_on_smallest_torus() {
        let m = square_torus(1, 1, std::f64::consts::FRAC_PI_4).unwrap();
        let dz = m.dz_lambda();
        let n = scalar_product(&m.complex, &dz, &dz).unwrap();
        assert!(n.re > 0.0 && n.im.abs() < 1e-12);
        let via = integrate_2form(
            &wedge_hetero(&m.complex, &dz, &hodge_star(&m.complex, &dz.conj()).unwrap()).unwrap(),
        );
        assert!((n - via).norm() < 1e-12);
    }

    #[test]
    fn averaging_kills_d_epsilon_and_commutes_with_d() {
        let dc = torus();
        let de = coboundary(&dc, &dc.epsilon(Carrier::Diamond)).unwrap();
        assert!(average(&dc, &de).unwrap().max_norm() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = random(dc.vertex_count(), Carrier::Diamond, 0, &mut rng);
        let adf = average(&dc, &coboundary(&dc, &f).unwrap()).unwrap();
        let fl = Cochain { carrier: Carrier::Lambda, ..f.clone() };
        assert!(adf.max_diff(&coboundary(&dc, &fl).unwrap()) < 1e-14);
        let a = random(dc.edge_count(), Carrier::Diamond, 1, &mut rng);
        let lhs = coboundary(&dc, &average(&dc, &a).unwrap()).unwrap();
        let rhs = average(&dc, &coboundary(&dc, &a).unwrap()).unwrap();
        assert!(lhs.max_diff(&rhs) < 1e-13);
    }

    #[test]
    fn average_of_f_dz_is_four_term_mean() {
        let m = square_patch(2, 0.9).unwrap();
        let dc = &m.complex;
        let z = m.z().unwrap();
        let f = Cochain::from_fn(Carrier::Diamond, 0, z.len(), |v| z.values[v] * z.values[v] + 1.0);
        let fdz = wedge_diamond(dc, &f, &m.dz_diamond()).unwrap();
        let avg = average(dc, &fdz).unwrap();
        for q in 0..dc.quad_count() {
            let [x, y, x2, y2] = dc.quad(q).map(|v| (z.values[v], f.values[v]));
            // Four paths x→y→x' and x→y'→x' with the edge-average rule.
            let leg = |a: (Complex64, Complex64), b: (Complex64, Complex64)| (a.1 + b.1) / 2.0 * (b.0 - a.0);
            let expected = (leg(x, y) + leg(y, x2) + leg(x, y2) + leg(y2, x2)) / 2.0;
            assert!((avg.values[q] - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn hetero_wedge_of_averages_is_twice_diamond_wedge() {
        let dc = torus();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let a = random(dc.edge_count(), Carrier::Diamond, 1, &mut rng);
            let b = random(dc.edge_count(), Carrier::Diamond, 1, &mut rng);
            let lhs = wedge_hetero(&dc, &average(&dc, &a).unwrap(), &average(&dc, &b).unwrap()).unwrap();
            let rhs = wedge_diamond(&dc, &a, &b).unwrap().scale(Complex64::new(2.0, 0.0));
            assert!(lhs.max_diff(&rhs) < 1e-13);
        }
    }

    #[test]
    fn lift_round_trips() {
        let dc = torus();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = random(dc.vertex_count(), Carrier::Lambda, 0, &mut rng);
        let mu = coboundary(&dc, &f).unwrap();
        let base = 5;
        let nu = lift_to_diamond(&dc, &mu, base).unwrap();
        let fd = Cochain { carrier: Carrier::Diamond, ..f.clone() };
        let dfd = coboundary(&dc, &fd).unwrap();
        // d_◊ε = −2, so shifting by a multiple of it is a constant shift.
        let shift = dfd.values[base];
        for e in 0..dc.edge_count() {
            assert!((nu.values[e] - (dfd.values[e] - shift)).norm() < 1e-12);
        }
        assert!(average(&dc, &nu).unwrap().max_diff(&mu) < 1e-12);
        assert!(coboundary(&dc, &nu).unwrap().max_norm() < 1e-12);
    }

    #[test]
    fn lift_of_average_recovers_cocycle() {
        let m = square_torus(2, 2, 0.8).unwrap();
        let dc = &m.complex;
        // A closed ◊ form: dZ plus an exact part.
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let f = random(dc.vertex_count(), Carrier::Diamond, 0, &mut rng);
        let nu = &m.dz_diamond() + &coboundary(dc, &f).unwrap();
        let back = lift_to_diamond(dc, &average(dc, &nu).unwrap(), 0).unwrap();
        let shift = nu.values[0];
        for e in 0..dc.edge_count() {
            assert!((back.values[e] - (nu.values[e] - shift)).norm() < 1e-12);
        }
    }

    #[test]
    fn lift_rejects_single_graph_holonomy() {
        let m = square_torus(1, 1, 0.6).unwrap();
        let dc = &m.complex;
        // dZ restricted to Γ: closed on Λ but Γ* holonomies vanish.
        let mut mu = m.dz_lambda();
        let nf = dc.quad_count();
        for e in nf..2 * nf {
            mu.values[e] = ZERO;
        }
        assert!(matches!(lift_to_diamond(dc, &mu, 0), Err(Error::HolonomyMismatch(_))));
    }

    proptest! {
        #[test]
        fn d_squared_vanishes(seed in 0u64..1000) {
            let dc = torus();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for carrier in [Carrier::Lambda, Carrier::Diamond] {
                let f = random(dc.vertex_count(), carrier, 0, &mut rng);
                let dd = coboundary(&dc, &coboundary(&dc, &f).unwrap()).unwrap();
                prop_assert!(dd.max_norm() < 1e-14);
            }
        }

        #[test]
        fn stokes_duality(seed in 0u64..1000, cell in 0usize..48, coeff in -3i64..4) {
            use crate::complex::{boundary, Chain};
            let dc = torus();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random(dc.edge_count(), Carrier::Diamond, 1, &mut rng);
            let c = Chain::cell(Carrier::Diamond, 2, cell % dc.quad_count(), coeff);
            let lhs = coboundary(&dc, &a).unwrap().eval(&c);
            let rhs = a.eval(&boundary(&dc, &c).unwrap());
            prop_assert!((lhs - rhs).norm() < 1e-13);
        }
    }
}
