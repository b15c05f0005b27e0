//! Ready-made surfaces beyond the critical generators: a glued genus-2
//! surface and random conformal perturbations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{DoubleComplex, QuadGraph};
use crate::critical::square_torus;
use crate::error::Result;

/// Replaces every ρ by a seeded random value in `[lo, hi]`.
pub fn randomize_rho(dc: &DoubleComplex, seed: u64, lo: f64, hi: f64) -> Result<DoubleComplex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw = dc.raw().clone();
    for r in &mut raw.rho {
        *r = rng.gen_range(lo..=hi);
    }
    DoubleComplex::from_raw(raw)
}

/// Two copies of a surface with quad `q` cut out of each, glued along the
/// holes by the reflection fixing the hole's two primal corners.
pub fn connected_sum(dc: &DoubleComplex, q: usize) -> Result<DoubleComplex> {
    let a = dc.raw();
    let (nv, ne) = (a.kinds.len(), a.edge_count);
    let [x, y, x2, y2] = a.quads[q];
    let s = a.sides[q];
    // Second copy: hole vertices and edges map onto the first copy's,
    // everything else is shifted past it.
    let vmap = |v: usize| match v {
        _ if v == x => x,
        _ if v == y => y2,
        _ if v == x2 => x2,
        _ if v == y2 => y,
        _ => v + nv,
    };
    let emap = |e: usize| match e {
        _ if e == s[0] => s[3],
        _ if e == s[1] => s[2],
        _ if e == s[2] => s[1],
        _ if e == s[3] => s[0],
        _ => e + ne,
    };
    let mut kinds = a.kinds.clone();
    kinds.extend_from_slice(&a.kinds);
    let (mut quads, mut sides, mut rho) = (Vec::new(), Vec::new(), Vec::new());
    for (p, ((quad, side), &r)) in a.quads.iter().zip(&a.sides).zip(&a.rho).enumerate() {
        if p != q {
            quads.push(*quad);
            sides.push(*side);
            rho.push(r);
        }
    }
    for (p, ((quad, side), &r)) in a.quads.iter().zip(&a.sides).zip(&a.rho).enumerate() {
        if p != q {
            quads.push(quad.map(vmap));
            sides.push(side.map(emap));
            rho.push(r);
        }
    }
    // Drop the unused copies of the hole's vertices and edges.
    let used_v: Vec<bool> = (0..2 * nv).map(|v| v < nv || vmap(v - nv) == v).collect();
    let used_e: Vec<bool> = (0..2 * ne).map(|e| e < ne || emap(e - ne) == e).collect();
    let renumber = |used: &[bool]| {
        let mut next = 0;
        used.iter()
            .map(|&u| {
                let i = next;
                next += u as usize;
                i
            })
            .collect::<Vec<_>>()
    };
    let (nv_map, ne_map) = (renumber(&used_v), renumber(&used_e));
    let kinds = kinds.into_iter().zip(&used_v).filter(|(_, &u)| u).map(|(k, _)| k).collect();
    let raw = QuadGraph {
        kinds,
        quads: quads.into_iter().map(|qd| qd.map(|v| nv_map[v])).collect(),
        sides: sides.into_iter().map(|sd| sd.map(|e| ne_map[e])).collect(),
        rho,
        edge_count: used_e.iter().filter(|&&u| u).count(),
    };
    DoubleComplex::from_raw(raw)
}

/// A non-critical genus-2 surface: two 2×2 square tori joined through a
/// removed quad, with seeded random conformal parameters in [0.5, 2].
pub fn genus_two(seed: u64) -> Result<DoubleComplex> {
    let torus = square_torus(2, 2, std::f64::consts::FRAC_PI_4)?.complex;
    let glued = connected_sum(&torus, 0)?;
    randomize_rho(&glued, seed, 0.5, 2.0)
}
