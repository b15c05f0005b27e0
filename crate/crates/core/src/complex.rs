//! Quad-graphs, their doubles, chains and cochains.
//!
//! A [`DoubleComplex`] stores the quad-graph ◊ together with the two dual
//! graphs Γ and Γ* whose edges are the diagonals of the quads. Every quad is
//! listed counterclockwise as `(x, y, x', y')` with `x, x'` in Γ and `y, y'`
//! in Γ*. The Γ-diagonal `(x, x')` and the Γ*-diagonal `(y, y')` of quad `q`
//! both carry index `q`; the dual of `(x, x')` is `(y, y')` (rotation by +90°)
//! and the dual of `(y, y')` is `(x', x)`.
//!
//! Cell indexing, per carrier and grade:
//!
//! | carrier | grade 0  | grade 1                                   | grade 2                 |
//! |---------|----------|-------------------------------------------|-------------------------|
//! | ◊       | vertices | diamond edges, oriented Γ → Γ*            | quads                   |
//! | Λ       | vertices | `q` = Γ-diagonal, `F + q` = Γ*-diagonal   | face dual to vertex `v` |

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Which of the two dual graphs a vertex belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum VertexKind {
    /// A vertex of Γ.
    #[serde(rename = "G")]
    Primal,
    /// A vertex of Γ*.
    #[serde(rename = "G*")]
    Dual,
}

impl VertexKind {
    pub fn other(self) -> Self {
        match self {
            VertexKind::Primal => VertexKind::Dual,
            VertexKind::Dual => VertexKind::Primal,
        }
    }

    /// Value of the biconstant ε.
    pub fn epsilon(self) -> f64 {
        match self {
            VertexKind::Primal => 1.0,
            VertexKind::Dual => -1.0,
        }
    }
}

/// The cellular complex a chain or cochain lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Carrier {
    /// The double Λ = Γ ⊔ Γ*.
    Lambda,
    /// The quad-graph ◊.
    Diamond,
}

/// Orientation sign of side `k` of a quad relative to the canonical Γ → Γ*
/// orientation of the diamond edge it lies on.
pub const SIDE_SIGN: [i64; 4] = [1, -1, 1, -1];

/// Raw combinatorial data: the input to [`DoubleComplex::from_raw`].
///
/// `sides[q][k]` is the diamond edge joining corners `k` and `k + 1` of quad
/// `q`. Explicit side labels allow multi-edges (two distinct edges between
/// the same pair of vertices), which small tori and electrical moves need.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadGraph {
    pub kinds: Vec<VertexKind>,
    pub quads: Vec<[usize; 4]>,
    pub sides: Vec<[usize; 4]>,
    /// ρ of the Γ-diagonal `(x, x')` of each quad; the Γ*-diagonal carries `1/ρ`.
    pub rho: Vec<f64>,
    pub edge_count: usize,
}

impl QuadGraph {
    /// Labels the sides by unordered vertex pairs, so two quads sharing the
    /// same two vertices along a side are glued there.
    pub fn from_vertex_quads(
        kinds: Vec<VertexKind>,
        quads: Vec<[usize; 4]>,
        rho: Vec<f64>,
    ) -> Self {
        let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
        let sides = quads
            .iter()
            .map(|quad| {
                let mut s = [0; 4];
                for (k, side) in s.iter_mut().enumerate() {
                    let (a, b) = (quad[k], quad[(k + 1) % 4]);
                    let key = (a.min(b), a.max(b));
                    let next = ids.len();
                    *side = *ids.entry(key).or_insert(next);
                }
                s
            })
            .collect();
        let edge_count = ids.len();
        QuadGraph { kinds, quads, sides, rho, edge_count }
    }
}

/// A diamond edge, canonically oriented from its Γ endpoint to its Γ* endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiamondEdge {
    pub primal: usize,
    pub dual: usize,
}

/// Endpoints `(Γ vertex, Γ* vertex)` of side `k` of a quad.
pub fn side_endpoints(quad: &[usize; 4], k: usize) -> (usize, usize) {
    match k {
        0 => (quad[0], quad[1]),
        1 => (quad[2], quad[1]),
        2 => (quad[2], quad[3]),
        _ => (quad[0], quad[3]),
    }
}

/// A corner of a quad: `(quad, position)`.
pub type Corner = (usize, usize);

/// Quad-graph with its double, immutable once built.
#[derive(Debug, Clone)]
pub struct DoubleComplex {
    raw: QuadGraph,
    edges: Vec<DiamondEdge>,
    /// Incidences `(quad, side)` of each diamond edge.
    edge_sides: Vec<Vec<(usize, usize)>>,
    /// Corners around each vertex in counterclockwise order.
    corners: Vec<Vec<Corner>>,
    interior: Vec<bool>,
    closed: bool,
    genus: Option<u32>,
}

impl DoubleComplex {
    /// Builds from vertex 4-tuples, inferring the Γ/Γ* colouring.
    ///
    /// The first vertex of the first quad is put in Γ; quads listed from a
    /// Γ* vertex are rotated. `rho[q]` is ρ of the diagonal joining corners
    /// 0 and 2 *as listed*, so it is inverted when a quad gets rotated.
    pub fn build(quads: &[[usize; 4]], rho: &[f64]) -> Result<Self> {
        if quads.len() != rho.len() {
            return Err(Error::Invalid(format!(
                "{} quads but {} conformal parameters",
                quads.len(),
                rho.len()
            )));
        }
        let n = quads.iter().flatten().copied().max().map_or(0, |m| m + 1);
        let mut adj = vec![Vec::new(); n];
        for quad in quads {
            for k in 0..4 {
                let (a, b) = (quad[k], quad[(k + 1) % 4]);
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        let mut color: Vec<Option<VertexKind>> = vec![None; n];
        for start in 0..n {
            if color[start].is_some() || adj[start].is_empty() {
                continue;
            }
            color[start] = Some(VertexKind::Primal);
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                let c = color[v].unwrap();
                for &w in &adj[v] {
                    match color[w] {
                        None => {
                            color[w] = Some(c.other());
                            queue.push_back(w);
                        }
                        Some(cw) if cw == c => {
                            return Err(Error::NonBipartite(format!(
                                "vertices {v} and {w} are adjacent and share a colour"
                            )))
                        }
                        _ => {}
                    }
                }
            }
        }
        if let Some(q) = quads.first() {
            if color[q[0]] == Some(VertexKind::Dual) {
                for c in color.iter_mut().flatten() {
                    *c = c.other();
                }
            }
        }
        let kinds: Vec<VertexKind> = color
            .into_iter()
            .enumerate()
            .map(|(v, c)| c.ok_or_else(|| Error::Invalid(format!("vertex {v} is in no quad"))))
            .collect::<Result<_>>()?;
        Self::build_with_kinds(kinds, quads, rho)
    }

    /// Builds from vertex 4-tuples with a given colouring.
    pub fn build_with_kinds(
        kinds: Vec<VertexKind>,
        quads: &[[usize; 4]],
        rho: &[f64],
    ) -> Result<Self> {
        let mut oriented = Vec::with_capacity(quads.len());
        let mut oriented_rho = Vec::with_capacity(quads.len());
        for (q, (quad, &r)) in quads.iter().zip(rho).enumerate() {
            if quad.iter().any(|&v| v >= kinds.len()) {
                return Err(Error::Invalid(format!("quad {q} references an unknown vertex")));
            }
            if kinds[quad[0]] == VertexKind::Primal {
                oriented.push(*quad);
                oriented_rho.push(r);
            } else {
                oriented.push([quad[1], quad[2], quad[3], quad[0]]);
                oriented_rho.push(1.0 / r);
            }
        }
        Self::from_raw(QuadGraph::from_vertex_quads(kinds, oriented, oriented_rho))
    }

    /// Validates raw data and builds incidence structures.
    pub fn from_raw(raw: QuadGraph) -> Result<Self> {
        let nv = raw.kinds.len();
        let nf = raw.quads.len();
        if raw.sides.len() != nf || raw.rho.len() != nf {
            return Err(Error::Invalid("quads, sides and rho differ in length".into()));
        }
        for (q, &r) in raw.rho.iter().enumerate() {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::BadRho { quad: q, value: r });
            }
        }
        let mut edges: Vec<Option<DiamondEdge>> = vec![None; raw.edge_count];
        let mut edge_sides = vec![Vec::new(); raw.edge_count];
        for (q, (quad, sides)) in raw.quads.iter().zip(&raw.sides).enumerate() {
            for k in 0..4 {
                let v = quad[k];
                if v >= nv {
                    return Err(Error::Invalid(format!("quad {q} references an unknown vertex")));
                }
                let expected = if k % 2 == 0 { VertexKind::Primal } else { VertexKind::Dual };
                if raw.kinds[v] != expected {
                    return Err(Error::NonBipartite(format!(
                        "quad {q}: corner {k} (vertex {v}) has the wrong colour"
                    )));
                }
            }
            for k in 0..4 {
                let e = sides[k];
                if e >= raw.edge_count {
                    return Err(Error::Invalid(format!("quad {q} references unknown edge {e}")));
                }
                let (p, d) = side_endpoints(quad, k);
                let de = DiamondEdge { primal: p, dual: d };
                match edges[e] {
                    None => edges[e] = Some(de),
                    Some(old) if old != de => {
                        return Err(Error::Invalid(format!(
                            "edge {e} has inconsistent endpoints"
                        )))
                    }
                    _ => {}
                }
                edge_sides[e].push((q, k));
            }
        }
        let edges: Vec<DiamondEdge> = edges
            .into_iter()
            .enumerate()
            .map(|(e, de)| de.ok_or_else(|| Error::Invalid(format!("edge {e} is unused"))))
            .collect::<Result<_>>()?;
        let mut closed = true;
        for (e, inc) in edge_sides.iter().enumerate() {
            if inc.len() > 2 {
                return Err(Error::NonManifold(e));
            }
            if inc.len() == 2 && SIDE_SIGN[inc[0].1] == SIDE_SIGN[inc[1].1] {
                return Err(Error::InconsistentOrientation(e));
            }
            if inc.len() == 1 {
                closed = false;
            }
        }

        let mut dc = DoubleComplex {
            raw,
            edges,
            edge_sides,
            corners: vec![Vec::new(); nv],
            interior: vec![true; nv],
            closed,
            genus: None,
        };
        dc.build_fans()?;
        dc.check_connected()?;
        if dc.closed {
            let chi = dc.euler_characteristic();
            if chi > 2 || chi % 2 != 0 {
                return Err(Error::Invalid(format!("Euler characteristic {chi} of a closed surface")));
            }
            dc.genus = Some(((2 - chi) / 2) as u32);
        }
        Ok(dc)
    }

    fn build_fans(&mut self) -> Result<()> {
        let nv = self.raw.kinds.len();
        let mut all: Vec<Vec<Corner>> = vec![Vec::new(); nv];
        for (q, quad) in self.raw.quads.iter().enumerate() {
            for (i, &v) in quad.iter().enumerate() {
                all[v].push((q, i));
            }
        }
        for v in 0..nv {
            if all[v].is_empty() {
                return Err(Error::Invalid(format!("vertex {v} is in no quad")));
            }
            // A corner with no clockwise neighbour starts a boundary fan.
            let start = all[v]
                .iter()
                .copied()
                .find(|&c| self.cw_corner(c).is_none());
            let interior = start.is_none();
            let start = start.unwrap_or(all[v][0]);
            let mut fan = vec![start];
            let mut cur = start;
            while let Some(next) = self.ccw_corner(cur) {
                if next == start {
                    break;
                }
                fan.push(next);
                cur = next;
                if fan.len() > all[v].len() {
                    return Err(Error::Invalid(format!("corner cycle at vertex {v} is corrupt")));
                }
            }
            if fan.len() != all[v].len() {
                return Err(Error::Invalid(format!("vertex {v} is pinched")));
            }
            self.interior[v] = interior;
            self.corners[v] = fan;
        }
        Ok(())
    }

    /// The other incidence of the edge on side `k` of quad `q`.
    pub fn across(&self, q: usize, k: usize) -> Option<(usize, usize)> {
        let e = self.raw.sides[q][k];
        self.edge_sides[e].iter().copied().find(|&s| s != (q, k))
    }

    /// Next corner counterclockwise around the same vertex.
    pub fn ccw_corner(&self, (q, i): Corner) -> Option<Corner> {
        let (q2, k2) = self.across(q, (i + 3) % 4)?;
        Some((q2, k2))
    }

    /// Next corner clockwise around the same vertex.
    pub fn cw_corner(&self, (q, i): Corner) -> Option<Corner> {
        let (q2, k2) = self.across(q, i)?;
        Some((q2, (k2 + 1) % 4))
    }

    fn check_connected(&self) -> Result<()> {
        let nv = self.vertex_count();
        if nv == 0 {
            return Ok(());
        }
        let mut seen = vec![false; nv];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for (w, _, _) in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            Err(Error::Disconnected)
        }
    }

    pub fn raw(&self) -> &QuadGraph {
        &self.raw
    }

    pub fn into_raw(self) -> QuadGraph {
        self.raw
    }

    pub fn vertex_count(&self) -> usize {
        self.raw.kinds.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn quad_count(&self) -> usize {
        self.raw.quads.len()
    }

    pub fn kind(&self, v: usize) -> VertexKind {
        self.raw.kinds[v]
    }

    pub fn kinds(&self) -> &[VertexKind] {
        &self.raw.kinds
    }

    pub fn quad(&self, q: usize) -> [usize; 4] {
        self.raw.quads[q]
    }

    pub fn quads(&self) -> &[[usize; 4]] {
        &self.raw.quads
    }

    pub fn sides(&self, q: usize) -> [usize; 4] {
        self.raw.sides[q]
    }

    pub fn edge(&self, e: usize) -> DiamondEdge {
        self.edges[e]
    }

    pub fn edge_sides(&self, e: usize) -> &[(usize, usize)] {
        &self.edge_sides[e]
    }

    /// ρ of the Γ-diagonal of quad `q`.
    pub fn rho(&self, q: usize) -> f64 {
        self.raw.rho[q]
    }

    pub fn rhos(&self) -> &[f64] {
        &self.raw.rho
    }

    /// ρ of Λ-edge `e` (Γ-diagonals first, then Γ*-diagonals).
    pub fn lambda_rho(&self, e: usize) -> f64 {
        let f = self.quad_count();
        if e < f {
            self.raw.rho[e]
        } else {
            1.0 / self.raw.rho[e - f]
        }
    }

    /// Endpoints `(tail, head)` of Λ-edge `e`.
    pub fn lambda_edge(&self, e: usize) -> (usize, usize) {
        let f = self.quad_count();
        if e < f {
            let q = self.raw.quads[e];
            (q[0], q[2])
        } else {
            let q = self.raw.quads[e - f];
            (q[1], q[3])
        }
    }

    /// Index of the Λ-edge dual to `e`, with the orientation sign:
    /// `(x, x')* = (y, y')` and `(y, y')* = -(x, x')`.
    pub fn lambda_dual(&self, e: usize) -> (usize, i64) {
        let f = self.quad_count();
        if e < f {
            (e + f, 1)
        } else {
            (e - f, -1)
        }
    }

    pub fn lambda_edge_count(&self) -> usize {
        2 * self.quad_count()
    }

    pub fn corners(&self, v: usize) -> &[Corner] {
        &self.corners[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.corners[v].len()
    }

    pub fn is_interior(&self, v: usize) -> bool {
        self.interior[v]
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn genus(&self) -> Option<u32> {
        self.genus
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.quad_count() as i64
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_sides[e].len() == 1
    }

    /// Diamond neighbours of `v` as `(neighbour, edge, sign)`, where `sign`
    /// is the orientation of the step `v → neighbour` relative to the edge.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        let mut seen = Vec::new();
        for &(q, i) in &self.corners[v] {
            for k in [i, (i + 3) % 4] {
                let e = self.raw.sides[q][k];
                if !seen.contains(&e) {
                    seen.push(e);
                }
            }
        }
        seen.into_iter().map(move |e| {
            let de = self.edges[e];
            if de.primal == v {
                (de.dual, e, 1)
            } else {
                (de.primal, e, -1)
            }
        })
    }

    /// Requires a closed surface.
    pub fn require_closed(&self) -> Result<()> {
        if self.closed {
            Ok(())
        } else {
            Err(Error::NotClosedSurface)
        }
    }

    /// Whether the Λ-face dual to `v` is a complete cell.
    pub fn has_lambda_face(&self, v: usize) -> bool {
        self.interior[v]
    }

    /// Signed Λ-edges bounding the face dual to vertex `v` (counterclockwise).
    pub fn lambda_face_boundary(&self, v: usize) -> Vec<(usize, i64)> {
        let f = self.quad_count();
        self.corners[v]
            .iter()
            .map(|&(q, i)| match i {
                0 => (q + f, 1),
                1 => (q, -1),
                2 => (q + f, -1),
                _ => (q, 1),
            })
            .collect()
    }

    /// The biconstant ε as a 0-cochain.
    pub fn epsilon(&self, carrier: Carrier) -> Cochain {
        Cochain::from_fn(carrier, 0, self.vertex_count(), |v| {
            Complex64::new(self.kind(v).epsilon(), 0.0)
        })
    }

    /// Number of cells of a carrier and grade.
    pub fn cell_count(&self, carrier: Carrier, grade: u8) -> usize {
        match (carrier, grade) {
            (_, 0) => self.vertex_count(),
            (Carrier::Diamond, 1) => self.edge_count(),
            (Carrier::Diamond, _) => self.quad_count(),
            (Carrier::Lambda, 1) => self.lambda_edge_count(),
            (Carrier::Lambda, _) => self.vertex_count(),
        }
    }
}

/// Integer chain on oriented cells, stored sparsely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub carrier: Carrier,
    pub grade: u8,
    coeffs: BTreeMap<usize, i64>,
}

impl Chain {
    pub fn zero(carrier: Carrier, grade: u8) -> Self {
        Chain { carrier, grade, coeffs: BTreeMap::new() }
    }

    pub fn cell(carrier: Carrier, grade: u8, index: usize, coeff: i64) -> Self {
        let mut c = Self::zero(carrier, grade);
        c.add_cell(index, coeff);
        c
    }

    pub fn from_terms(
        carrier: Carrier,
        grade: u8,
        terms: impl IntoIterator<Item = (usize, i64)>,
    ) -> Self {
        let mut c = Self::zero(carrier, grade);
        for (i, k) in terms {
            c.add_cell(i, k);
        }
        c
    }

    pub fn add_cell(&mut self, index: usize, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let entry = self.coeffs.entry(index).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.coeffs.remove(&index);
        }
    }

    pub fn coeff(&self, index: usize) -> i64 {
        self.coeffs.get(&index).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.coeffs.iter().map(|(&i, &k)| (i, k))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scaled(&self, k: i64) -> Self {
        Chain::from_terms(self.carrier, self.grade, self.terms().map(|(i, c)| (i, c * k)))
    }

    fn check_same(&self, other: &Chain) {
        assert_eq!(self.carrier, other.carrier, "chains on different carriers");
        assert_eq!(self.grade, other.grade, "chains of different grades");
    }
}

impl Add for &Chain {
    type Output = Chain;
    fn add(self, rhs: &Chain) -> Chain {
        self.check_same(rhs);
        let mut out = self.clone();
        for (i, k) in rhs.terms() {
            out.add_cell(i, k);
        }
        out
    }
}

impl Sub for &Chain {
    type Output = Chain;
    fn sub(self, rhs: &Chain) -> Chain {
        self + &rhs.scaled(-1)
    }
}

impl Neg for &Chain {
    type Output = Chain;
    fn neg(self) -> Chain {
        self.scaled(-1)
    }
}

/// Complex-valued cochain; the value carrier for functions, 1-forms and 2-forms.
#[derive(Debug, Clone, PartialEq)]
pub struct Cochain {
    pub carrier: Carrier,
    pub grade: u8,
    pub values: Vec<Complex64>,
}

impl Cochain {
    pub fn zeros(carrier: Carrier, grade: u8, len: usize) -> Self {
        Cochain { carrier, grade, values: vec![Complex64::new(0.0, 0.0); len] }
    }

    pub fn zeros_on(dc: &DoubleComplex, carrier: Carrier, grade: u8) -> Self {
        Self::zeros(carrier, grade, dc.cell_count(carrier, grade))
    }

    pub fn from_fn(
        carrier: Carrier,
        grade: u8,
        len: usize,
        f: impl FnMut(usize) -> Complex64,
    ) -> Self {
        Cochain { carrier, grade, values: (0..len).map(f).collect() }
    }

    pub fn from_real(carrier: Carrier, grade: u8, values: &[f64]) -> Self {
        Cochain {
            carrier,
            grade,
            values: values.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Evaluation ⟨self, c⟩ on a chain.
    pub fn eval(&self, c: &Chain) -> Complex64 {
        assert_eq!(self.carrier, c.carrier, "carrier mismatch");
        assert_eq!(self.grade, c.grade, "grade mismatch");
        c.terms().map(|(i, k)| self.values[i] * k as f64).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Cochain {
            carrier: self.carrier,
            grade: self.grade,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Cochain {
            carrier: self.carrier,
            grade: self.grade,
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn axpy(&mut self, a: Complex64, x: &Cochain) {
        assert_eq!(self.values.len(), x.values.len());
        for (y, xv) in self.values.iter_mut().zip(&x.values) {
            *y += a * xv;
        }
    }

    /// Largest absolute value.
    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_diff(&self, other: &Cochain) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for &Cochain {
    type Output = Cochain;
    fn add(self, rhs: &Cochain) -> Cochain {
        let mut out = self.clone();
        out.axpy(Complex64::new(1.0, 0.0), rhs);
        out
    }
}

impl Sub for &Cochain {
    type Output = Cochain;
    fn sub(self, rhs: &Cochain) -> Cochain {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), rhs);
        out
    }
}

/// Boundary operator ∂.
pub fn boundary(dc: &DoubleComplex, c: &Chain) -> Result<Chain> {
    let mut out = match c.grade {
        0 => return Err(Error::GradeZero),
        g => Chain::zero(c.carrier, g - 1),
    };
    for (i, k) in c.terms() {
        match (c.carrier, c.grade) {
            (Carrier::Diamond, 1) => {
                let e = dc.edge(i);
                out.add_cell(e.dual, k);
                out.add_cell(e.primal, -k);
            }
            (Carrier::Diamond, _) => {
                for (s, &e) in dc.sides(i).iter().enumerate() {
                    out.add_cell(e, k * SIDE_SIGN[s]);
                }
            }
            (Carrier::Lambda, 1) => {
                let (a, b) = dc.lambda_edge(i);
                out.add_cell(b, k);
                out.add_cell(a, -k);
            }
            (Carrier::Lambda, _) => {
                if !dc.has_lambda_face(i) {
                    return Err(Error::BoundaryVertex(i));
                }
                for (e, s) in dc.lambda_face_boundary(i) {
                    out.add_cell(e, k * s);
                }
            }
        }
    }
    Ok(out)
}

/// Coboundary d, defined through Stokes' formula. On Λ in disc mode the
/// faces dual to boundary vertices are absent and get value 0.
pub fn coboundary(dc: &DoubleComplex, f: &Cochain) -> Result<Cochain> {
    match (f.carrier, f.grade) {
        (_, 2) => Err(Error::GradeTwo),
        (Carrier::Diamond, 0) => Ok(Cochain::from_fn(Carrier::Diamond, 1, dc.edge_count(), |e| {
            let de = dc.edge(e);
            f.values[de.dual] - f.values[de.primal]
        })),
        (Carrier::Diamond, _) => Ok(Cochain::from_fn(Carrier::Diamond, 2, dc.quad_count(), |q| {
            dc.sides(q)
                .iter()
                .enumerate()
                .map(|(s, &e)| f.values[e] * SIDE_SIGN[s] as f64)
                .sum()
        })),
        (Carrier::Lambda, 0) => Ok(Cochain::from_fn(Carrier::Lambda, 1, dc.lambda_edge_count(), |e| {
            let (a, b) = dc.lambda_edge(e);
            f.values[b] - f.values[a]
        })),
        (Carrier::Lambda, _) => Ok(Cochain::from_fn(Carrier::Lambda, 2, dc.vertex_count(), |v| {
            if !dc.has_lambda_face(v) {
                return Complex64::new(0.0, 0.0);
            }
            dc.lambda_face_boundary(v)
                .into_iter()
                .map(|(e, s)| f.values[e] * s as f64)
                .sum()
        })),
    }
}

/// A closed walk on ◊ given as a sequence of oriented edge steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    /// Visited vertices; `vertices[i]` is the tail of `steps[i]`.
    pub vertices: Vec<usize>,
    /// `(edge, sign)` with sign +1 when traversed Γ → Γ*.
    pub steps: Vec<(usize, i64)>,
}

impl Walk {
    /// Builds a walk from a vertex sequence; consecutive vertices must be
    /// joined by a unique diamond edge.
    pub fn from_vertices(dc: &DoubleComplex, vertices: &[usize]) -> Result<Self> {
        let n = vertices.len();
        let mut steps = Vec::with_capacity(n);
        for i in 0..n {
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            let candidates: Vec<_> = dc.neighbors(a).filter(|&(w, _, _)| w == b).collect();
            match candidates.as_slice() {
                [(_, e, s)] => steps.push((*e, *s)),
                [] => return Err(Error::Invalid(format!("vertices {a} and {b} are not adjacent"))),
                _ => {
                    return Err(Error::Invalid(format!(
                        "vertices {a} and {b} are joined by several edges"
                    )))
                }
            }
        }
        Ok(Walk { vertices: vertices.to_vec(), steps })
    }

    /// Builds a walk from a start vertex and oriented edges.
    pub fn from_steps(dc: &DoubleComplex, start: usize, steps: Vec<(usize, i64)>) -> Result<Self> {
        let mut vertices = Vec::with_capacity(steps.len());
        let mut cur = start;
        for &(e, s) in &steps {
            let de = dc.edge(e);
            let (tail, head) = if s > 0 { (de.primal, de.dual) } else { (de.dual, de.primal) };
            if tail != cur {
                return Err(Error::Invalid(format!("walk step on edge {e} does not start at {cur}")));
            }
            vertices.push(cur);
            cur = head;
        }
        if cur != start {
            return Err(Error::Invalid("walk is not closed".into()));
        }
        Ok(Walk { vertices, steps })
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn chain(&self) -> Chain {
        Chain::from_terms(Carrier::Diamond, 1, self.steps.iter().copied())
    }

    pub fn reversed(&self) -> Walk {
        let n = self.steps.len();
        let mut vertices = Vec::with_capacity(n);
        let mut steps = Vec::with_capacity(n);
        for i in (0..n).rev() {
            vertices.push(self.vertices[(i + 1) % n]);
            steps.push((self.steps[i].0, -self.steps[i].1));
        }
        Walk { vertices, steps }
    }

    /// Removes immediate back-and-forth steps, cyclically.
    pub fn reduced(&self) -> Walk {
        let mut vs: Vec<usize> = Vec::new();
        let mut st: Vec<(usize, i64)> = Vec::new();
        for (&v, &s) in self.vertices.iter().zip(&self.steps) {
            if let Some(&last) = st.last() {
                if last.0 == s.0 && last.1 == -s.1 {
                    st.pop();
                    vs.pop();
                    continue;
                }
            }
            vs.push(v);
            st.push(s);
        }
        while st.len() >= 2 {
            let (first, last) = (st[0], st[st.len() - 1]);
            if first.0 == last.0 && first.1 == -last.1 {
                st.remove(0);
                vs.remove(0);
                st.pop();
                vs.pop();
            } else {
                break;
            }
        }
        Walk { vertices: vs, steps: st }
    }
}

/// Splits a ◊ 1-cycle into closed walks.
pub fn cycle_to_walks(dc: &DoubleComplex, c: &Chain) -> Result<Vec<Walk>> {
    if c.carrier != Carrier::Diamond || c.grade != 1 {
        return Err(Error::Invalid("expected a 1-chain on the quad-graph".into()));
    }
    if !boundary(dc, c)?.is_zero() {
        return Err(Error::Invalid("chain is not a cycle".into()));
    }
    // Out-going oriented steps per vertex, with multiplicity.
    let mut out: BTreeMap<usize, Vec<(usize, i64)>> = BTreeMap::new();
    for (e, k) in c.terms() {
        let de = dc.edge(e);
        let (tail, s) = if k > 0 { (de.primal, 1) } else { (de.dual, -1) };
        for _ in 0..k.unsigned_abs() {
            out.entry(tail).or_default().push((e, s));
        }
    }
    let head = |e: usize, s: i64| {
        let de = dc.edge(e);
        if s > 0 {
            de.dual
        } else {
            de.primal
        }
    };
    let mut walks = Vec::new();
    while let Some((&start, _)) = out.iter().find(|(_, v)| !v.is_empty()) {
        let mut steps = Vec::new();
        let mut cur = start;
        loop {
            let list = out.get_mut(&cur).expect("balanced cycle");
            let Some((e, s)) = list.pop() else { break };
            steps.push((e, s));
            cur = head(e, s);
            if cur == start {
                break;
            }
        }
        walks.push(Walk::from_steps(dc, start, steps)?);
        out.retain(|_, v| !v.is_empty());
    }
    Ok(walks)
}
