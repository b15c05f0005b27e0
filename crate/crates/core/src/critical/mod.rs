//! Critical maps: quad-graphs realised by rhombi of a common side length.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::complex::{
    Carrier, Chain, Cochain, DoubleComplex, QuadGraph, VertexKind,
};
use crate::error::{Error, Result};

pub mod continuation;
pub mod exp;
pub mod powers;
pub mod ramification;
pub mod threads;
pub mod young;

/// A quad-graph with every face realised as a rhombus of side `delta`.
///
/// Closed surfaces cannot be embedded globally, so each quad stores its own
/// shape: corner positions relative to corner 0. When the domain is
/// simply connected a global embedding `positions` is also available.
#[derive(Debug, Clone)]
pub struct CriticalMap {
    pub complex: DoubleComplex,
    pub delta: f64,
    pub shapes: Vec<[Complex64; 4]>,
    pub positions: Option<Vec<Complex64>>,
    /// Vertex with Z = 0.
    pub origin: usize,
    /// A homology basis `(a, b)` with `a · b = 1`, when the generator knows one.
    pub basis_hint: Option<Vec<Chain>>,
    /// Lattice periods along the hinted basis, for flat tori.
    pub lattice: Option<[Complex64; 2]>,
}

impl CriticalMap {
    /// Builds a map from global vertex positions (simply connected patches).
    /// Colours the vertices, derives ρ from the diagonals and checks rhombi.
    pub fn from_positions(
        positions: Vec<Complex64>,
        quads: &[[usize; 4]],
        origin: usize,
    ) -> Result<Self> {
        let rho: Vec<f64> = quads
            .iter()
            .map(|q| {
                (positions[q[3]] - positions[q[1]]).norm()
                    / (positions[q[2]] - positions[q[0]]).norm()
            })
            .collect();
        let mut complex = DoubleComplex::build(quads, &rho)?;
        if complex.kind(origin) != VertexKind::Primal {
            let kinds = complex.kinds().iter().map(|k| k.other()).collect();
            complex = DoubleComplex::build_with_kinds(kinds, quads, &rho)?;
        }
        let delta = (positions[complex.quad(0)[1]] - positions[complex.quad(0)[0]]).norm();
        let shift = positions[origin];
        let positions: Vec<Complex64> = positions.iter().map(|p| p - shift).collect();
        let shapes = complex
            .quads()
            .iter()
            .map(|q| q.map(|v| positions[v] - positions[q[0]]))
            .collect();
        let m = CriticalMap {
            complex,
            delta,
            shapes,
            positions: Some(positions),
            origin,
            basis_hint: None,
            lattice: None,
        };
        m.validate()?;
        Ok(m)
    }

    /// Checks the rhombus conditions on every quad.
    pub fn validate(&self) -> Result<()> {
        let tol = 1e-9 * self.delta;
        for (q, s) in self.shapes.iter().enumerate() {
            for k in 0..4 {
                let side = (s[(k + 1) % 4] - s[k]).norm();
                if (side - self.delta).abs() > tol {
                    return Err(Error::NotCritical(format!(
                        "quad {q}: side {k} has length {side}, expected {}",
                        self.delta
                    )));
                }
            }
            let d1 = s[2] - s[0];
            let d2 = s[3] - s[1];
            // The dual diagonal is the primal one turned by +90°.
            let turn = d2 / d1;
            if turn.re.abs() > 1e-9 * turn.norm() || turn.im <= 0.0 {
                return Err(Error::NotCritical(format!("quad {q} is not a positively oriented rhombus")));
            }
            let rho = self.complex.rho(q);
            if (turn.im - rho).abs() > 1e-9 * rho.max(1.0) {
                return Err(Error::NotCritical(format!(
                    "quad {q}: diagonal ratio {} differs from rho {rho}",
                    turn.im
                )));
            }
        }
        Ok(())
    }

    pub fn is_simply_connected(&self) -> bool {
        self.positions.is_some()
    }

    pub fn require_simply_connected(&self) -> Result<&[Complex64]> {
        self.positions.as_deref().ok_or(Error::NotSimplyConnected)
    }

    /// Z(dual) − Z(primal) along diamond edge `e`.
    pub fn edge_vector(&self, e: usize) -> Complex64 {
        let (q, k) = self.complex.edge_sides(e)[0];
        let s = &self.shapes[q];
        match k {
            0 => s[1] - s[0],
            1 => s[1] - s[2],
            2 => s[3] - s[2],
            _ => s[3] - s[0],
        }
    }

    /// dZ on the quad-graph.
    pub fn dz_diamond(&self) -> Cochain {
        Cochain::from_fn(Carrier::Diamond, 1, self.complex.edge_count(), |e| self.edge_vector(e))
    }

    /// dZ on the double.
    pub fn dz_lambda(&self) -> Cochain {
        let f = self.complex.quad_count();
        Cochain::from_fn(Carrier::Lambda, 1, 2 * f, |e| {
            let s = &self.shapes[e % f];
            if e < f {
                s[2] - s[0]
            } else {
                s[3] - s[1]
            }
        })
    }

    /// The identity Z as a function, for simply connected maps.
    pub fn z(&self) -> Result<Cochain> {
        let pos = self.require_simply_connected()?;
        Ok(Cochain { carrier: Carrier::Lambda, grade: 0, values: pos.to_vec() })
    }

    /// Interior angle of each quad at corner `i`.
    pub fn corner_angle(&self, q: usize, i: usize) -> f64 {
        let s = &self.shapes[q];
        ((s[(i + 1) % 4] - s[i]) / (s[(i + 3) % 4] - s[i])).arg().abs()
    }

    /// Total angle around every vertex (2π at flat interior vertices).
    pub fn conic_angles(&self) -> Vec<f64> {
        (0..self.complex.vertex_count())
            .map(|v| {
                self.complex
                    .corners(v)
                    .iter()
                    .map(|&(q, i)| self.corner_angle(q, i))
                    .sum()
            })
            .collect()
    }

    /// Smallest rhombus angle, η.
    pub fn min_angle(&self) -> f64 {
        (0..self.complex.quad_count())
            .flat_map(|q| (0..2).map(move |i| (q, i)))
            .map(|(q, i)| self.corner_angle(q, i))
            .fold(PI, f64::min)
    }

    /// Splits each rhombus into four, halving δ.
    pub fn refine(&self) -> Result<CriticalMap> {
        let dc = &self.complex;
        let (nv, ne, nf) = (dc.vertex_count(), dc.edge_count(), dc.quad_count());
        let mid = |e: usize| nv + e;
        let centre = |q: usize| nv + ne + q;
        let mut kinds = vec![VertexKind::Primal; nv + ne + nf];
        for k in kinds.iter_mut().skip(nv).take(ne) {
            *k = VertexKind::Dual;
        }
        let half = |e: usize, v: usize| {
            if dc.kind(v) == VertexKind::Primal {
                2 * e
            } else {
                2 * e + 1
            }
        };
        let mut quads = Vec::with_capacity(4 * nf);
        let mut sides = Vec::with_capacity(4 * nf);
        let mut rho = Vec::with_capacity(4 * nf);
        let mut shapes = Vec::with_capacity(4 * nf);
        for q in 0..nf {
            let quad = dc.quad(q);
            let qs = dc.sides(q);
            let s = &self.shapes[q];
            let c = (s[0] + s[2]) / 2.0;
            for i in 0..4 {
                let (next, prev) = ((i + 1) % 4, (i + 3) % 4);
                let v = quad[i];
                quads.push([v, mid(qs[i]), centre(q), mid(qs[prev])]);
                sides.push([
                    half(qs[i], v),
                    2 * ne + 4 * q + i,
                    2 * ne + 4 * q + prev,
                    half(qs[prev], v),
                ]);
                rho.push(if i % 2 == 0 { dc.rho(q) } else { 1.0 / dc.rho(q) });
                let o = s[i];
                shapes.push([
                    Complex64::new(0.0, 0.0),
                    (s[next] - o) / 2.0,
                    c - o,
                    (s[prev] - o) / 2.0,
                ]);
            }
        }
        let raw = QuadGraph { kinds, quads, sides, rho, edge_count: 2 * ne + 4 * nf };
        let complex = DoubleComplex::from_raw(raw)?;
        let positions = self.positions.as_ref().map(|p| {
            let mut out = p.clone();
            for e in 0..ne {
                let de = dc.edge(e);
                out.push((p[de.primal] + p[de.dual]) / 2.0);
            }
            for q in 0..nf {
                let quad = dc.quad(q);
                out.push((p[quad[0]] + p[quad[2]]) / 2.0);
            }
            out
        });
        let basis_hint = self
            .basis_hint
            .as_ref()
            .map(|h| h.iter().map(refine_chain).collect());
        let m = CriticalMap {
            complex,
            delta: self.delta / 2.0,
            shapes,
            positions,
            origin: self.origin,
            basis_hint,
            lattice: self.lattice,
        };
        m.validate()?;
        Ok(m)
    }
}

/// Image of a ◊ 1-chain under refinement: each edge splits at its midpoint.
pub fn refine_chain(c: &Chain) -> Chain {
    let mut out = Chain::zero(Carrier::Diamond, 1);
    for (e, k) in c.terms() {
        out.add_cell(2 * e, k);
        out.add_cell(2 * e + 1, -k);
    }
    out
}

/// The flat torus ◊ = (ℤe^{iθ} + ℤe^{−iθ}) / (2q e^{iθ}ℤ + 2p e^{−iθ}ℤ).
///
/// Γ-diagonals of the rhombi are horizontal with ρ = tan θ or vertical with
/// ρ = 1/tan θ. The basis hint is `a` along e^{−iθ} (2p steps) and `b` along
/// e^{iθ} (2q steps), giving modulus (q/p)e^{2iθ}.
pub fn square_torus(p: usize, q: usize, theta: f64) -> Result<CriticalMap> {
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(Error::BadTheta);
    }
    if p == 0 || q == 0 {
        return Err(Error::Invalid("torus dimensions must be positive".into()));
    }
    let (nn, mm) = (2 * q, 2 * p);
    let idx = |n: usize, m: usize| (n % nn) + nn * (m % mm);
    let up = Complex64::from_polar(1.0, theta);
    let down = up.conj();
    let nv = nn * mm;
    let mut kinds = Vec::with_capacity(nv);
    for m in 0..mm {
        for n in 0..nn {
            kinds.push(if (n + m) % 2 == 0 { VertexKind::Primal } else { VertexKind::Dual });
        }
    }
    // Edge 2·idx(z) joins z to z + e^{−iθ}; edge 2·idx(z)+1 joins z to z + e^{iθ}.
    let ea = |n: usize, m: usize| 2 * idx(n, m);
    let eb = |n: usize, m: usize| 2 * idx(n, m) + 1;
    let tan = theta.tan();
    let mut quads = Vec::with_capacity(nv);
    let mut sides = Vec::with_capacity(nv);
    let mut rho = Vec::with_capacity(nv);
    let mut shapes = Vec::with_capacity(nv);
    for m in 0..mm {
        for n in 0..nn {
            let corners = [idx(n, m), idx(n, m + 1), idx(n + 1, m + 1), idx(n + 1, m)];
            let s = [ea(n, m), eb(n, m + 1), ea(n + 1, m), eb(n, m)];
            let pos = [Complex64::new(0.0, 0.0), down, up + down, up];
            if kinds[corners[0]] == VertexKind::Primal {
                quads.push(corners);
                sides.push(s);
                rho.push(tan);
                shapes.push(pos);
            } else {
                quads.push([corners[1], corners[2], corners[3], corners[0]]);
                sides.push([s[1], s[2], s[3], s[0]]);
                rho.push(1.0 / tan);
                shapes.push([pos[1], pos[2], pos[3], pos[0]].map(|z| z - pos[1]));
            }
        }
    }
    let raw = QuadGraph { kinds, quads, sides, rho, edge_count: 2 * nv };
    let complex = DoubleComplex::from_raw(raw)?;
    let sign = |n: usize, m: usize| if (n + m) % 2 == 0 { 1 } else { -1 };
    let a = Chain::from_terms(Carrier::Diamond, 1, (0..mm).map(|m| (ea(0, m), sign(0, m))));
    let b = Chain::from_terms(Carrier::Diamond, 1, (0..nn).map(|n| (eb(n, 0), sign(n, 0))));
    let m = CriticalMap {
        complex,
        delta: 1.0,
        shapes,
        positions: None,
        origin: 0,
        basis_hint: Some(vec![a, b]),
        lattice: Some([down * mm as f64, up * nn as f64]),
    };
    m.validate()?;
    Ok(m)
}

/// Conformal parameters of the three edge directions of a triangular lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriHexParams {
    /// Horizontal edges.
    pub rho_h: f64,
    /// Edges leaning right, "/".
    pub rho_r: f64,
    /// Edges leaning left, "\".
    pub rho_l: f64,
}

impl TriHexParams {
    pub fn equilateral() -> Self {
        let r = 1.0 / 3f64.sqrt();
        TriHexParams { rho_h: r, rho_r: r, rho_l: r }
    }

    /// Parameters of the triangle with the given angles opposite the
    /// horizontal, "/" and "\" edges.
    pub fn from_angles(opp_h: f64, opp_r: f64, opp_l: f64) -> Self {
        TriHexParams {
            rho_h: 1.0 / opp_h.tan(),
            rho_r: 1.0 / opp_r.tan(),
            rho_l: 1.0 / opp_l.tan(),
        }
    }

    /// ρ₋ρ₍\₎ + ρ₍\₎ρ₍/₎ + ρ₍/₎ρ₋, equal to 1 exactly when critical.
    pub fn criticality(&self) -> f64 {
        self.rho_h * self.rho_l + self.rho_l * self.rho_r + self.rho_r * self.rho_h
    }

    fn check(&self) -> Result<()> {
        let all_positive = [self.rho_h, self.rho_r, self.rho_l]
            .iter()
            .all(|r| r.is_finite() && *r > 0.0);
        let c = self.criticality();
        if !all_positive || (c - 1.0).abs() > 1e-12 {
            return Err(Error::NotCritical(format!("parameters give {c}, expected 1")));
        }
        Ok(())
    }

    /// The lattice vectors P1 (horizontal) and P2 for circumradius 1.
    pub fn lattice_vectors(&self) -> (Complex64, Complex64) {
        let opp = |r: f64| (1.0 / r).atan();
        let (ah, ar, al) = (opp(self.rho_h), opp(self.rho_r), opp(self.rho_l));
        let p1 = Complex64::new(2.0 * ah.sin(), 0.0);
        // The angle at the origin is opposite the "\" edge.
        let p2 = Complex64::from_polar(2.0 * ar.sin(), al);
        (p1, p2)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Tri {
    Up(i64, i64),
    Down(i64, i64),
}

impl Tri {
    fn corners(self) -> [(i64, i64); 3] {
        match self {
            Tri::Up(i, j) => [(i, j), (i + 1, j), (i, j + 1)],
            Tri::Down(i, j) => [(i + 1, j), (i + 1, j + 1), (i, j + 1)],
        }
    }

    fn circumcentre(self, p1: Complex64, p2: Complex64) -> Complex64 {
        let [a, b, c] = self.corners().map(|(i, j)| p1 * i as f64 + p2 * j as f64);
        circumcentre(a, b, c)
    }
}

fn circumcentre(a: Complex64, b: Complex64, c: Complex64) -> Complex64 {
    let (b, c) = (b - a, c - a);
    let d = 2.0 * (b.re * c.im - b.im * c.re);
    let ux = (c.im * b.norm_sqr() - b.im * c.norm_sqr()) / d;
    let uy = (b.re * c.norm_sqr() - c.re * b.norm_sqr()) / d;
    a + Complex64::new(ux, uy)
}

/// The three quads around Γ-edges based at lattice point (i, j):
/// `(x, y, x', y', rho)` in unwrapped coordinates.
fn tri_quads(i: i64, j: i64, prm: &TriHexParams) -> [((i64, i64), Tri, (i64, i64), Tri, f64); 3] {
    [
        ((i, j), Tri::Down(i, j - 1), (i + 1, j), Tri::Up(i, j), prm.rho_h),
        ((i, j), Tri::Up(i, j), (i, j + 1), Tri::Down(i - 1, j), prm.rho_r),
        ((i + 1, j), Tri::Down(i, j), (i, j + 1), Tri::Up(i, j), prm.rho_l),
    ]
}

/// The critical triangular/hexagonal torus with `n1 × n2` fundamental
/// triangles pairs. Γ is triangular, Γ* hexagonal, δ = 1.
pub fn tri_hex_torus(prm: TriHexParams, n1: usize, n2: usize) -> Result<CriticalMap> {
    prm.check()?;
    if n1 == 0 || n2 == 0 {
        return Err(Error::Invalid("torus dimensions must be positive".into()));
    }
    let (n1i, n2i) = (n1 as i64, n2 as i64);
    let (p1, p2) = prm.lattice_vectors();
    let cell = |i: i64, j: i64| (i.rem_euclid(n1i) + n1i * j.rem_euclid(n2i)) as usize;
    let nl = n1 * n2;
    let point = |(i, j): (i64, i64)| cell(i, j);
    let tri_index = |t: Tri| match t {
        Tri::Up(i, j) => nl + 2 * cell(i, j),
        Tri::Down(i, j) => nl + 2 * cell(i, j) + 1,
    };
    let mut kinds = vec![VertexKind::Primal; nl];
    kinds.extend(std::iter::repeat(VertexKind::Dual).take(2 * nl));
    // Diamond edge between a triangle and its k-th corner.
    let edge = |t: Tri, x: (i64, i64)| {
        let k = t.corners().iter().position(|&c| c == x).expect("corner of triangle");
        3 * (tri_index(t) - nl) + k
    };
    let pos = |(i, j): (i64, i64)| p1 * i as f64 + p2 * j as f64;
    let mut quads = Vec::new();
    let mut sides = Vec::new();
    let mut rho = Vec::new();
    let mut shapes = Vec::new();
    for j in 0..n2i {
        for i in 0..n1i {
            for (x, y, x2, y2, r) in tri_quads(i, j, &prm) {
                quads.push([point(x), tri_index(y), point(x2), tri_index(y2)]);
                sides.push([edge(y, x), edge(y, x2), edge(y2, x2), edge(y2, x)]);
                rho.push(r);
                let o = pos(x);
                shapes.push([
                    Complex64::new(0.0, 0.0),
                    y.circumcentre(p1, p2) - o,
                    pos(x2) - o,
                    y2.circumcentre(p1, p2) - o,
                ]);
            }
        }
    }
    let raw = QuadGraph { kinds, quads, sides, rho, edge_count: 6 * nl };
    let complex = DoubleComplex::from_raw(raw)?;
    // Each Γ step x → x' lifts to x → y' → x' on ◊ (sides 3 and 2 of its quad).
    let lift = |steps: Vec<usize>| {
        let mut c = Chain::zero(Carrier::Diamond, 1);
        for q in steps {
            let s = complex.sides(q);
            c.add_cell(s[3], 1);
            c.add_cell(s[2], -1);
        }
        c
    };
    let a = lift((0..n1).map(|i| 3 * cell(i as i64, 0)).collect());
    let b = lift((0..n2).map(|j| 3 * cell(0, j as i64) + 1).collect());
    let m = CriticalMap {
        complex,
        delta: 1.0,
        shapes,
        positions: None,
        origin: 0,
        basis_hint: Some(vec![a, b]),
        lattice: Some([p1 * n1 as f64, p2 * n2 as f64]),
    };
    m.validate()?;
    Ok(m)
}

/// Reindexes the used vertices of `quads` and builds a planar map.
fn patch_from_quads(
    quads_by_key: Vec<[(i64, i64, u8); 4]>,
    position: impl Fn((i64, i64, u8)) -> Complex64,
    origin_key: (i64, i64, u8),
) -> Result<CriticalMap> {
    let mut ids: HashMap<(i64, i64, u8), usize> = HashMap::new();
    let mut positions = Vec::new();
    let mut quads = Vec::with_capacity(quads_by_key.len());
    for qk in &quads_by_key {
        let mut q = [0; 4];
        for (slot, key) in q.iter_mut().zip(qk) {
            *slot = *ids.entry(*key).or_insert_with(|| {
                positions.push(position(*key));
                positions.len() - 1
            });
        }
        quads.push(q);
    }
    let origin = *ids
        .get(&origin_key)
        .ok_or_else(|| Error::Invalid("patch does not contain the origin".into()))?;
    CriticalMap::from_positions(positions, &quads, origin)
}

/// Rhombic patch of the lattice ℤe^{iθ} + ℤe^{−iθ} with quads based at
/// `n e^{iθ} + m e^{−iθ}` for `|n|, |m| ≤ radius` (`-radius ≤ n, m < radius`).
pub fn square_patch(radius: usize, theta: f64) -> Result<CriticalMap> {
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(Error::BadTheta);
    }
    let r = radius as i64;
    let up = Complex64::from_polar(1.0, theta);
    let mut quads = Vec::new();
    for m in -r..r {
        for n in -r..r {
            quads.push([(n, m, 0), (n, m + 1, 0), (n + 1, m + 1, 0), (n + 1, m, 0)]);
        }
    }
    patch_from_quads(quads, |(n, m, _)| up * n as f64 + up.conj() * m as f64, (0, 0, 0))
}

/// Rectangle of rhombi `[0, nx) × [0, ny)` in the same lattice, origin at a corner.
pub fn square_rectangle(nx: usize, ny: usize, theta: f64) -> Result<CriticalMap> {
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(Error::BadTheta);
    }
    let up = Complex64::from_polar(1.0, theta);
    let mut quads = Vec::new();
    for m in 0..ny as i64 {
        for n in 0..nx as i64 {
            quads.push([(n, m, 0), (n, m + 1, 0), (n + 1, m + 1, 0), (n + 1, m, 0)]);
        }
    }
    patch_from_quads(quads, |(n, m, _)| up * n as f64 + up.conj() * m as f64, (0, 0, 0))
}

/// A single rhombus with angle θ at its Γ corner, which is the origin.
pub fn single_rhombus(theta: f64) -> Result<CriticalMap> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::BadTheta);
    }
    let a = Complex64::from_polar(1.0, -theta / 2.0);
    let b = a.conj();
    CriticalMap::from_positions(
        vec![Complex64::new(0.0, 0.0), a, a + b, b],
        &[[0, 1, 2, 3]],
        0,
    )
}

/// First sextant of the triangular lattice: Γ-points `i P1 + j P2` with
/// `i, j ≥ 0` and `i + j ≤ radius`, with one rhombus per Γ-edge between them.
pub fn tri_sextant(prm: TriHexParams, radius: usize) -> Result<CriticalMap> {
    prm.check()?;
    let r = radius as i64;
    let (p1, p2) = prm.lattice_vectors();
    let inside = |(i, j): (i64, i64)| i >= 0 && j >= 0 && i + j <= r;
    let key = |t: Tri| match t {
        Tri::Up(i, j) => (i, j, 1u8),
        Tri::Down(i, j) => (i, j, 2u8),
    };
    let mut quads = Vec::new();
    for j in -1..=r {
        for i in -1..=r {
            for (x, y, x2, y2, _) in tri_quads(i, j, &prm) {
                if inside(x) && inside(x2) {
                    quads.push([(x.0, x.1, 0), key(y), (x2.0, x2.1, 0), key(y2)]);
                }
            }
        }
    }
    patch_from_quads(
        quads,
        |(i, j, t)| match t {
            0 => p1 * i as f64 + p2 * j as f64,
            1 => Tri::Up(i, j).circumcentre(p1, p2),
            _ => Tri::Down(i, j).circumcentre(p1, p2),
        },
        (0, 0, 0),
    )
}

/// Global positions for a simply connected map, integrating the shapes
/// outward from the origin. Fails if the shapes disagree around a cycle.
pub fn integrate_shapes(m: &CriticalMap) -> Result<Vec<Complex64>> {
    let dc = &m.complex;
    let mut pos: Vec<Option<Complex64>> = vec![None; dc.vertex_count()];
    pos[m.origin] = Some(Complex64::new(0.0, 0.0));
    let mut queue = VecDeque::from([m.origin]);
    while let Some(v) = queue.pop_front() {
        let pv = pos[v].unwrap();
        for (w, e, s) in dc.neighbors(v) {
            let target = pv + m.edge_vector(e) * s as f64;
            match pos[w] {
                None => {
                    pos[w] = Some(target);
                    queue.push_back(w);
                }
                Some(old) if (old - target).norm() > 1e-9 * m.delta => {
                    return Err(Error::NotSimplyConnected)
                }
                _ => {}
            }
        }
    }
    Ok(pos.into_iter().map(|p| p.unwrap_or_default()).collect())
}
