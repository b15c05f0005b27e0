//! Electrical moves: loop removal (I), series/parallel merging (II) and the
//! star-triangle transformation (III), with a conic-angle ledger and the
//! transport of holomorphic functions across moves.
//!
//! A move is stored as a [`MoveRecord`] listing the cells it removes and
//! adds. Records are applied by a single engine, so undoing a move restores
//! the complex exactly, numbering included.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{Cochain, DoubleComplex, QuadGraph, VertexKind, SIDE_SIGN};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Angle of a rhombus with parameter ρ at corner `i`; even corners are primal.
pub fn corner_angle(rho: f64, i: usize) -> f64 {
    if i % 2 == 0 {
        2.0 * rho.atan()
    } else {
        2.0 * rho.recip().atan()
    }
}

/// Conic angles when every quad is a rhombus of its conformal parameter.
pub fn rho_angles(dc: &DoubleComplex) -> Vec<f64> {
    let mut a = vec![0.0; dc.vertex_count()];
    for (q, quad) in dc.quads().iter().enumerate() {
        for (i, &v) in quad.iter().enumerate() {
            a[v] += corner_angle(dc.rho(q), i);
        }
    }
    a
}

/// Conductance of the diagonal of quad `q` joining vertices of `kind`.
pub fn conductance(dc: &DoubleComplex, q: usize, kind: VertexKind) -> f64 {
    match kind {
        VertexKind::Primal => dc.rho(q),
        VertexKind::Dual => dc.rho(q).recip(),
    }
}

/// A complex together with its ledger of conic angles.
#[derive(Debug, Clone)]
pub struct Surface {
    pub complex: DoubleComplex,
    pub angles: Vec<f64>,
}

impl Surface {
    /// Angles taken from the rhombic realisation of ρ.
    pub fn new(complex: DoubleComplex) -> Self {
        let angles = rho_angles(&complex);
        Surface { complex, angles }
    }

    pub fn with_angles(complex: DoubleComplex, angles: Vec<f64>) -> Result<Self> {
        if angles.len() != complex.vertex_count() {
            return Err(Error::Invalid(format!(
                "{} angles for {} vertices",
                angles.len(),
                complex.vertex_count()
            )));
        }
        Ok(Surface { complex, angles })
    }

    /// Σ_v (2π − angle(v)).
    pub fn total_curvature(&self) -> f64 {
        total_curvature(&self.angles)
    }
}

pub fn total_curvature(angles: &[f64]) -> f64 {
    angles.iter().map(|a| 2.0 * PI - a).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MoveKind {
    I,
    II,
    III,
}

/// Which way a move goes. For type I the colour names the loop vertex, for
/// type II the middle vertex; for type III it is read on Γ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Remove,
    InsertPrimal,
    InsertDual,
    Merge,
    SplitPrimal,
    SplitDual,
    StarToTriangle,
    TriangleToStar,
}

/// Conformal data consumed or produced, depending on the direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MoveParams {
    /// ρ of the loop edge.
    Loop { rho: f64, loop_kind: VertexKind },
    /// Parallel conductances and their sum, read on the colour opposite the middle vertex.
    SeriesParallel { parts: [f64; 2], merged: f64, middle: VertexKind },
    /// `triangle[i]` sits opposite the vertex that `star[i]` reaches; both on the same colour.
    StarTriangle { triangle: [f64; 3], star: [f64; 3] },
}

impl MoveParams {
    /// Largest relative defect of ρ_iρ′_i = Σρ_iρ_j = Πρ′/Σρ′, for type III.
    pub fn star_triangle_residual(&self) -> Option<f64> {
        let MoveParams::StarTriangle { triangle: t, star: s } = *self else { return None };
        let sigma = t[0] * t[1] + t[1] * t[2] + t[2] * t[0];
        let ratio = s[0] * s[1] * s[2] / (s[0] + s[1] + s[2]);
        let r = (0..3)
            .map(|i| (t[i] * s[i] - sigma).abs())
            .fold((ratio - sigma).abs(), f64::max);
        Some(r / sigma)
    }
}

/// One quad: corners, side labels and ρ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadCell {
    pub vertices: [usize; 4],
    pub sides: [usize; 4],
    pub rho: f64,
}

/// Value of a new vertex as a weighted sum of old values.
pub type Weights = Vec<(usize, f64)>;

/// A move as a replayable edit. Removed cells carry indices before the
/// move, added cells indices after it.
#[derive(Debug, Clone, Serialize)]
pub struct MoveRecord {
    pub kind: MoveKind,
    pub direction: Direction,
    pub site: usize,
    pub params: MoveParams,
    pub removed_quads: Vec<(usize, QuadCell)>,
    pub added_quads: Vec<(usize, QuadCell)>,
    pub removed_vertices: Vec<(usize, VertexKind, f64)>,
    pub added_vertices: Vec<(usize, VertexKind, f64)>,
    pub removed_edges: Vec<usize>,
    pub added_edges: Vec<usize>,
    /// `(before, after, old angle, new angle)` for surviving vertices.
    pub angle_changes: Vec<(usize, usize, f64, f64)>,
    pub vertex_map: Vec<Option<usize>>,
    /// Values of added vertices (after numbering) from old values.
    pub transport: Vec<(usize, Weights)>,
    /// The same for the inverse move.
    pub reverse_transport: Vec<(usize, Weights)>,
}

impl MoveRecord {
    pub fn inverse_direction(&self) -> Direction {
        use Direction::*;
        match (self.direction, self.params) {
            (Remove, MoveParams::Loop { loop_kind: VertexKind::Primal, .. }) => InsertPrimal,
            (Remove, _) => InsertDual,
            (InsertPrimal | InsertDual, _) => Remove,
            (Merge, MoveParams::SeriesParallel { middle: VertexKind::Primal, .. }) => SplitPrimal,
            (Merge, _) => SplitDual,
            (SplitPrimal | SplitDual, _) => Merge,
            (StarToTriangle, _) => TriangleToStar,
            (TriangleToStar, _) => StarToTriangle,
        }
    }

    /// The record undoing this one.
    pub fn inverse(&self) -> MoveRecord {
        let after = self.vertex_map.len() - self.removed_vertices.len() + self.added_vertices.len();
        let mut vertex_map = vec![None; after];
        for (b, a) in self.vertex_map.iter().enumerate() {
            if let Some(a) = a {
                vertex_map[*a] = Some(b);
            }
        }
        for &(v, _, _) in &self.added_vertices {
            vertex_map[v] = None;
        }
        let site = match self.added_vertices.first() {
            Some(&(v, _, _)) => v,
            None => self.added_quads.first().map_or(self.site, |&(q, _)| q),
        };
        MoveRecord {
            kind: self.kind,
            direction: self.inverse_direction(),
            site,
            params: self.params,
            removed_quads: self.added_quads.clone(),
            added_quads: self.removed_quads.clone(),
            removed_vertices: self.added_vertices.clone(),
            added_vertices: self.removed_vertices.clone(),
            removed_edges: self.added_edges.clone(),
            added_edges: self.removed_edges.clone(),
            angle_changes: self.angle_changes.iter().map(|&(b, a, o, n)| (a, b, n, o)).collect(),
            vertex_map,
            transport: self.reverse_transport.clone(),
            reverse_transport: self.transport.clone(),
        }
    }
}

/// Vertex or edge reference while a move is being assembled.
#[derive(Debug, Clone, Copy)]
enum Ref {
    Old(usize),
    New(usize),
}
use Ref::{New, Old};

/// Collects what a move removes and adds, then numbers it.
struct Edit<'a> {
    surface: &'a Surface,
    kill_quads: Vec<usize>,
    kill_vertices: Vec<usize>,
    kill_edges: Vec<usize>,
    new_vertices: Vec<VertexKind>,
    new_edges: usize,
    new_quads: Vec<([Ref; 4], [Ref; 4], f64)>,
    /// New vertex index → weights on old vertices.
    transport: Vec<(usize, Weights)>,
    /// Killed vertex → weights on surviving old vertices.
    reverse: Vec<(usize, Weights)>,
}

impl<'a> Edit<'a> {
    fn new(surface: &'a Surface) -> Self {
        Edit {
            surface,
            kill_quads: Vec::new(),
            kill_vertices: Vec::new(),
            kill_edges: Vec::new(),
            new_vertices: Vec::new(),
            new_edges: 0,
            new_quads: Vec::new(),
            transport: Vec::new(),
            reverse: Vec::new(),
        }
    }

    fn vertex(&mut self, kind: VertexKind) -> Ref {
        self.new_vertices.push(kind);
        New(self.new_vertices.len() - 1)
    }

    fn edge(&mut self) -> Ref {
        self.new_edges += 1;
        New(self.new_edges - 1)
    }

    /// Adds a quad listed from any corner, rotating it to start at Γ.
    /// `rho` is the conductance of the diagonal through the first corner.
    fn quad(&mut self, vertices: [Ref; 4], sides: [Ref; 4], rho: f64) {
        let kind = match vertices[0] {
            Old(v) => self.surface.complex.kind(v),
            New(j) => self.new_vertices[j],
        };
        if kind == VertexKind::Primal {
            self.new_quads.push((vertices, sides, rho));
        } else {
            let [v0, v1, v2, v3] = vertices;
            let [s0, s1, s2, s3] = sides;
            self.new_quads.push(([v1, v2, v3, v0], [s1, s2, s3, s0], rho.recip()));
        }
    }

    /// Removes quad `q` and puts it back with side `k` relabelled.
    fn relabel(&mut self, q: usize, k: usize, e: Ref) {
        let raw = self.surface.complex.raw();
        let mut sides = raw.sides[q].map(Old);
        sides[k] = e;
        self.kill_quads.push(q);
        self.new_quads.push((raw.quads[q].map(Old), sides, raw.rho[q]));
    }

    fn finish(mut self, kind: MoveKind, direction: Direction, site: usize, params: MoveParams) -> MoveRecord {
        let raw = self.surface.complex.raw();
        let angles = &self.surface.angles;
        for v in [&mut self.kill_quads, &mut self.kill_vertices, &mut self.kill_edges] {
            v.sort_unstable();
            v.dedup();
        }
        let compact = |n: usize, kill: &[usize]| {
            let mut map = vec![None; n];
            let mut next = 0;
            for (i, m) in map.iter_mut().enumerate() {
                if kill.binary_search(&i).is_err() {
                    *m = Some(next);
                    next += 1;
                }
            }
            (map, next)
        };
        let (vmap, nv_keep) = compact(raw.kinds.len(), &self.kill_vertices);
        let (emap, ne_keep) = compact(raw.edge_count, &self.kill_edges);
        let nq_keep = raw.quads.len() - self.kill_quads.len();
        let v_after = |r: Ref| match r {
            Old(v) => vmap[v].expect("reference to a removed vertex"),
            New(j) => nv_keep + j,
        };
        let e_after = |r: Ref| match r {
            Old(e) => emap[e].expect("reference to a removed edge"),
            New(j) => ne_keep + j,
        };

        let mut delta = vec![0.0; raw.kinds.len()];
        let mut touched = vec![false; raw.kinds.len()];
        let mut fresh = vec![0.0; self.new_vertices.len()];
        for &q in &self.kill_quads {
            for (i, &v) in raw.quads[q].iter().enumerate() {
                delta[v] -= corner_angle(raw.rho[q], i);
                touched[v] = true;
            }
        }
        let added_quads = self
            .new_quads
            .iter()
            .enumerate()
            .map(|(j, &(vs, ss, rho))| {
                for (i, &r) in vs.iter().enumerate() {
                    match r {
                        Old(v) => {
                            delta[v] += corner_angle(rho, i);
                            touched[v] = true;
                        }
                        New(k) => fresh[k] += corner_angle(rho, i),
                    }
                }
                let cell = QuadCell { vertices: vs.map(v_after), sides: ss.map(e_after), rho };
                (nq_keep + j, cell)
            })
            .collect();
        let angle_changes = (0..raw.kinds.len())
            .filter(|&v| touched[v] && vmap[v].is_some())
            .map(|v| (v, vmap[v].unwrap(), angles[v], angles[v] + delta[v]))
            .collect();
        let removed_quads = self
            .kill_quads
            .iter()
            .map(|&q| (q, QuadCell { vertices: raw.quads[q], sides: raw.sides[q], rho: raw.rho[q] }))
            .collect();
        let map_weights = |w: &Weights| w.iter().map(|&(v, c)| (vmap[v].expect("surviving vertex"), c)).collect();
        MoveRecord {
            kind,
            direction,
            site,
            params,
            removed_quads,
            added_quads,
            removed_vertices: self.kill_vertices.iter().map(|&v| (v, raw.kinds[v], angles[v])).collect(),
            added_vertices: self
                .new_vertices
                .iter()
                .enumerate()
                .map(|(j, &k)| (nv_keep + j, k, fresh[j]))
                .collect(),
            removed_edges: self.kill_edges.clone(),
            added_edges: (0..self.new_edges).map(|j| ne_keep + j).collect(),
            angle_changes,
            vertex_map: vmap.clone(),
            transport: self.transport.iter().map(|(j, w)| (nv_keep + j, w.clone())).collect(),
            reverse_transport: self.reverse.iter().map(|(v, w)| (*v, map_weights(w))).collect(),
        }
    }
}

/// Applies a record to the surface it was made for.
pub fn apply_record(s: &Surface, rec: &MoveRecord) -> Result<Surface> {
    let bad = || Error::BadConfiguration(rec.site);
    let mut raw: QuadGraph = s.complex.raw().clone();
    let mut angles = s.angles.clone();
    if rec.vertex_map.len() != raw.kinds.len() {
        return Err(bad());
    }
    for &(q, cell) in rec.removed_quads.iter().rev() {
        if q >= raw.quads.len() || raw.quads[q] != cell.vertices || raw.sides[q] != cell.sides {
            return Err(bad());
        }
        raw.quads.remove(q);
        raw.sides.remove(q);
        raw.rho.remove(q);
    }
    for &e in rec.removed_edges.iter().rev() {
        if e >= raw.edge_count || raw.sides.iter().flatten().any(|&x| x == e) {
            return Err(bad());
        }
        raw.edge_count -= 1;
        raw.sides.iter_mut().flatten().filter(|x| **x > e).for_each(|x| *x -= 1);
    }
    for &(v, _, _) in rec.removed_vertices.iter().rev() {
        if raw.quads.iter().flatten().any(|&x| x == v) {
            return Err(bad());
        }
        raw.kinds.remove(v);
        angles.remove(v);
        raw.quads.iter_mut().flatten().filter(|x| **x > v).for_each(|x| *x -= 1);
    }
    for &(v, kind, angle) in &rec.added_vertices {
        if v > raw.kinds.len() {
            return Err(bad());
        }
        raw.kinds.insert(v, kind);
        angles.insert(v, angle);
        raw.quads.iter_mut().flatten().filter(|x| **x >= v).for_each(|x| *x += 1);
    }
    for &e in &rec.added_edges {
        if e > raw.edge_count {
            return Err(bad());
        }
        raw.edge_count += 1;
        raw.sides.iter_mut().flatten().filter(|x| **x >= e).for_each(|x| *x += 1);
    }
    for &(q, cell) in &rec.added_quads {
        if q > raw.quads.len() {
            return Err(bad());
        }
        raw.quads.insert(q, cell.vertices);
        raw.sides.insert(q, cell.sides);
        raw.rho.insert(q, cell.rho);
    }
    for &(_, v, _, new) in &rec.angle_changes {
        angles[v] = new;
    }
    let complex = DoubleComplex::from_raw(raw).map_err(|_| bad())?;
    Surface::with_angles(complex, angles)
}

fn build(s: &Surface, edit: Edit, kind: MoveKind, dir: Direction, site: usize, params: MoveParams) -> Result<(Surface, MoveRecord)> {
    let rec = edit.finish(kind, dir, site, params);
    let out = apply_record(s, &rec)?;
    Ok((out, rec))
}

/// The side `k` of quad `q` glued to side `k + 1`, if any.
pub fn loop_side(dc: &DoubleComplex, q: usize) -> Option<usize> {
    let s = dc.sides(q);
    (0..4).find(|&k| s[k] == s[(k + 1) % 4])
}

/// Move I: removes a quad two of whose adjacent sides are identified.
pub fn remove_loop(s: &Surface, q: usize) -> Result<(Surface, MoveRecord)> {
    let dc = &s.complex;
    let bad = Error::BadConfiguration(q);
    if q >= dc.quad_count() || dc.quad_count() < 2 {
        return Err(bad);
    }
    let k = loop_side(dc, q).ok_or(bad.clone())?;
    let quad = dc.quad(q);
    let sides = dc.sides(q);
    let (lv, summit, opp) = (quad[k], quad[(k + 1) % 4], quad[(k + 3) % 4]);
    let (ea, eb) = (sides[(k + 2) % 4], sides[(k + 3) % 4]);
    if ea == eb || quad[(k + 2) % 4] != lv {
        return Err(bad);
    }
    let (keep, drop) = (ea.min(eb), ea.max(eb));
    let other = |e: usize| dc.edge_sides(e).iter().copied().find(|&(p, _)| p != q);
    let mut edit = Edit::new(s);
    match (other(keep), other(drop)) {
        (_, Some((p, j))) => edit.relabel(p, j, Old(keep)),
        (Some(_), None) => {}
        (None, None) => return Err(bad),
    }
    edit.kill_quads.push(q);
    edit.kill_vertices.push(summit);
    edit.kill_edges.extend([sides[k], drop]);
    edit.reverse.push((summit, vec![(opp, 1.0)]));
    let params = MoveParams::Loop { rho: conductance(dc, q, dc.kind(lv)), loop_kind: dc.kind(lv) };
    build(s, edit, MoveKind::I, Direction::Remove, q, params)
}

/// Inverse of move I: opens diamond edge `e` and inserts a loop quad whose
/// loop, of conductance `rho`, sits at the endpoint of colour `loop_kind`.
pub fn insert_loop(s: &Surface, e: usize, loop_kind: VertexKind, rho: f64) -> Result<(Surface, MoveRecord)> {
    let dc = &s.complex;
    if e >= dc.edge_count() || !(rho.is_finite() && rho > 0.0) {
        return Err(Error::BadConfiguration(e));
    }
    let de = dc.edge(e);
    let (lv, opp) = match loop_kind {
        VertexKind::Primal => (de.primal, de.dual),
        VertexKind::Dual => (de.dual, de.primal),
    };
    let plus = dc.edge_sides(e).iter().copied().find(|&(_, k)| SIDE_SIGN[k] == 1);
    let minus = dc.edge_sides(e).iter().copied().find(|&(_, k)| SIDE_SIGN[k] == -1);
    let mut edit = Edit::new(s);
    let summit = edit.vertex(loop_kind.other());
    let (f, e2) = (edit.edge(), edit.edge());
    // The loop quad's +1 side faces the old −1 incidence and vice versa.
    let (to_plus, to_minus) = if plus.is_some() { (Old(e), e2) } else { (e2, Old(e)) };
    if let (Some(_), Some((p, j))) = (plus, minus) {
        edit.relabel(p, j, e2);
    }
    match loop_kind {
        // [x, s, x, y]: sides 0 and 1 glued, side 2 is +1, side 3 is −1.
        VertexKind::Primal => edit.quad([Old(lv), summit, Old(lv), Old(opp)], [f, f, to_minus, to_plus], rho),
        // [s, y, x, y]: sides 3 and 0 glued, side 1 is −1, side 2 is +1.
        VertexKind::Dual => edit.quad([summit, Old(lv), Old(opp), Old(lv)], [f, to_plus, to_minus, f], rho.recip()),
    }
    edit.transport.push((0, vec![(opp, 1.0)]));
    let dir = match loop_kind {
        VertexKind::Primal => Direction::InsertPrimal,
        VertexKind::Dual => Direction::InsertDual,
    };
    build(s, edit, MoveKind::I, dir, e, MoveParams::Loop { rho, loop_kind })
}

/// The two quads around a degree-2 interior vertex, read from it as
/// `(m, a, o1, b)` and `(m, b, o2, a)`.
fn series_pair(dc: &DoubleComplex, m: usize) -> Option<[(usize, usize); 2]> {
    if m >= dc.vertex_count() || !dc.is_interior(m) || dc.degree(m) != 2 {
        return None;
    }
    let c = dc.corners(m);
    let [(q1, i1), (q2, i2)] = [c[0], c[1]];
    if q1 == q2 {
        return None;
    }
    let (a, b) = (dc.quad(q1)[(i1 + 1) % 4], dc.quad(q1)[(i1 + 3) % 4]);
    let quad2 = dc.quad(q2);
    let (s1, s2) = (dc.sides(q1), dc.sides(q2));
    let shared = s1[i1] == s2[(i2 + 3) % 4] && s1[(i1 + 3) % 4] == s2[i2];
    (quad2[(i2 + 1) % 4] == b && quad2[(i2 + 3) % 4] == a && shared).then_some([(q1, i1), (q2, i2)])
}

/// Move II: merges the two quads around a degree-2 vertex `m`.
pub fn merge(s: &Surface, m: usize) -> Result<(Surface, MoveRecord)> {
    let dc = &s.complex;
    let [(q1, i1), (q2, i2)] = series_pair(dc, m).ok_or(Error::BadConfiguration(m))?;
    let (quad1, quad2) = (dc.quad(q1), dc.quad(q2));
    let (s1, s2) = (dc.sides(q1), dc.sides(q2));
    let (a, o1, b, o2) = (quad1[(i1 + 1) % 4], quad1[(i1 + 2) % 4], quad1[(i1 + 3) % 4], quad2[(i2 + 2) % 4]);
    let side = |s: [usize; 4], i: usize, k: usize| Old(s[(i + k) % 4]);
    let ka = dc.kind(a);
    let (c1, c2) = (conductance(dc, q1, ka), conductance(dc, q2, ka));
    let mut edit = Edit::new(s);
    edit.kill_quads.extend([q1, q2]);
    edit.kill_vertices.push(m);
    edit.kill_edges.extend([s1[i1], s1[(i1 + 3) % 4]]);
    edit.quad(
        [Old(a), Old(o1), Old(b), Old(o2)],
        [side(s1, i1, 1), side(s1, i1, 2), side(s2, i2, 1), side(s2, i2, 2)],
        c1 + c2,
    );
    edit.reverse.push((m, vec![(o1, c2 / (c1 + c2)), (o2, c1 / (c1 + c2))]));
    let params = MoveParams::SeriesParallel { parts: [c1, c2], merged: c1 + c2, middle: dc.kind(m) };
    build(s, edit, MoveKind::II, Direction::Merge, m, params)
}

/// Inverse of move II: splits quad `q` through a new vertex of colour
/// `middle`, giving the two halves fractions `t` and `1 − t` of the
/// conductance across.
pub fn split(s: &Surface, q: usize, middle: VertexKind, t: f64) -> Result<(Surface, MoveRecord)> {
    let dc = &s.complex;
    if q >= dc.quad_count() || !(t > 0.0 && t < 1.0) {
        return Err(Error::BadConfiguration(q));
    }
    let r = match middle {
        VertexKind::Dual => 0,
        VertexKind::Primal => 1,
    };
    let quad = dc.quad(q);
    let sd = dc.sides(q);
    let at = |k: usize| quad[(r + k) % 4];
    let side = |k: usize| Old(sd[(r + k) % 4]);
    let (a, o1, b, o2) = (at(0), at(1), at(2), at(3));
    let ka = dc.kind(a);
    let total = conductance(dc, q, ka);
    let (c1, c2) = (t * total, (1.0 - t) * total);
    let mut edit = Edit::new(s);
    let m = edit.vertex(middle);
    let (ema, emb) = (edit.edge(), edit.edge());
    edit.kill_quads.push(q);
    edit.quad([Old(a), Old(o1), Old(b), m], [side(0), side(1), emb, ema], c1);
    edit.quad([Old(b), Old(o2), Old(a), m], [side(2), side(3), ema, emb], c2);
    edit.transport.push((0, vec![(o1, c2 / total), (o2, c1 / total)]));
    let dir = match middle {
        VertexKind::Primal => Direction::SplitPrimal,
        VertexKind::Dual => Direction::SplitDual,
    };
    let params = MoveParams::SeriesParallel { parts: [c1, c2], merged: total, middle };
    build(s, edit, MoveKind::II, dir, q, params)
}

/// Hexagon around a degree-3 interior vertex: for each corner the quad,
/// read from the centre as `(c, a_j, b_j, a_{j+1})`.
fn hexagon(dc: &DoubleComplex, c: usize) -> Option<[(usize, usize); 3]> {
    if c >= dc.vertex_count() || !dc.is_interior(c) || dc.degree(c) != 3 {
        return None;
    }
    let cs = dc.corners(c);
    let h = [cs[0], cs[1], cs[2]];
    let mut ring = Vec::with_capacity(7);
    for (j, &(q, i)) in h.iter().enumerate() {
        let quad = dc.quad(q);
        let next = h[(j + 1) % 3];
        if quad[(i + 3) % 4] != dc.quad(next.0)[(next.1 + 1) % 4] {
            return None;
        }
        ring.extend([quad[(i + 1) % 4], quad[(i + 2) % 4]]);
    }
    ring.push(c);
    let mut sorted = ring.clone();
    sorted.sort_unstable();
    sorted.dedup();
    let distinct_quads = h[0].0 != h[1].0 && h[1].0 != h[2].0 && h[0].0 != h[2].0;
    (sorted.len() == 7 && distinct_quads).then_some(h)
}

/// Star conductances ρ′_i = σ/ρ_i, σ = ρ₁ρ₂ + ρ₂ρ₃ + ρ₃ρ₁, where ρ_i is
/// the triangle edge opposite the vertex that ρ′_i reaches.
pub fn star_from_triangle(t: [f64; 3]) -> [f64; 3] {
    let sigma = t[0] * t[1] + t[1] * t[2] + t[2] * t[0];
    t.map(|x| sigma / x)
}

/// Inverse of [`star_from_triangle`]: ρ_i = (ρ′₁ρ′₂ρ′₃/Σρ′)/ρ′_i.
pub fn triangle_from_star(s: [f64; 3]) -> [f64; 3] {
    let k = s[0] * s[1] * s[2] / (s[0] + s[1] + s[2]);
    s.map(|x| k / x)
}

/// Move III: the star-triangle transformation at a degree-3 vertex `c`.
/// A star on Γ (primal centre) becomes a triangle and conversely.
pub fn star_triangle(s: &Surface, c: usize, expect: Option<Direction>) -> Result<(Surface, MoveRecord)> {
    let dc = &s.complex;
    let h = hexagon(dc, c).ok_or(Error::BadConfiguration(c))?;
    let dir = match dc.kind(c) {
        VertexKind::Primal => Direction::StarToTriangle,
        VertexKind::Dual => Direction::TriangleToStar,
    };
    if expect.is_some_and(|d| d != dir) {
        return Err(Error::BadConfiguration(c));
    }
    let at = |j: usize, k: usize| {
        let (q, i) = h[j % 3];
        (dc.quad(q)[(i + k) % 4], dc.sides(q)[(i + k) % 4])
    };
    let a = |j: usize| at(j, 1).0;
    let b = |j: usize| at(j, 2).0;
    let ka = dc.kind(a(0));
    // t_j on the triangle edge a_j a_{j+1}, opposite a_{j+2}.
    let t: [f64; 3] = std::array::from_fn(|j| conductance(dc, h[j].0, ka));
    let triangle: [f64; 3] = std::array::from_fn(|k| t[(k + 1) % 3]);
    let star = star_from_triangle(triangle);
    let star_sum: f64 = star.iter().sum();

    let mut edit = Edit::new(s);
    let centre = edit.vertex(ka);
    let g: Vec<Ref> = (0..3).map(|_| edit.edge()).collect();
    for j in 0..3 {
        let (q, i) = h[j];
        edit.kill_quads.push(q);
        edit.kill_edges.push(dc.sides(q)[i]);
    }
    edit.kill_vertices.push(c);
    for j in 0..3 {
        let jm = (j + 2) % 3;
        // (c', b_{j−1}, a_j, b_j) with conductance star[j] on c'–a_j.
        edit.quad(
            [centre, Old(b(jm)), Old(a(j)), Old(b(j))],
            [g[jm], Old(at(jm, 2).1), Old(at(j, 1).1), g[j]],
            star[j],
        );
    }
    edit.transport.push((0, (0..3).map(|j| (a(j), star[j] / star_sum)).collect()));
    let inv_sum: f64 = t.iter().map(|x| x.recip()).sum();
    edit.reverse.push((c, (0..3).map(|j| (b(j), t[j].recip() / inv_sum)).collect()));
    build(s, edit, MoveKind::III, dir, c, MoveParams::StarTriangle { triangle, star })
}

/// Carries a function across a move. Values on surviving vertices are
/// kept; new vertices get the weighted averages stored in the record.
/// The removed quads must satisfy the Cauchy–Riemann equation.
pub fn transport(f: &Cochain, rec: &MoveRecord) -> Result<Cochain> {
    if f.grade != 0 || f.len() != rec.vertex_map.len() {
        return Err(Error::Invalid("transport needs a function on the complex the move started from".into()));
    }
    let val = |v: usize| f.values[v];
    let mut worst: f64 = 0.0;
    for (_, cell) in &rec.removed_quads {
        let [x, y, x2, y2] = cell.vertices.map(val);
        let scale = [x, y, x2, y2].iter().map(|z| z.norm()).fold(1.0, f64::max);
        worst = worst.max((y2 - y - I * cell.rho * (x2 - x)).norm() / scale);
    }
    if worst > 1e-9 {
        return Err(Error::NotHolomorphic(worst));
    }
    let n = rec.vertex_map.len() - rec.removed_vertices.len() + rec.added_vertices.len();
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    for (b, a) in rec.vertex_map.iter().enumerate() {
        if let Some(a) = a {
            values[*a] = f.values[b];
        }
    }
    for (v, w) in &rec.transport {
        values[*v] = w.iter().map(|&(u, c)| f.values[u] * c).sum();
    }
    Ok(Cochain { carrier: f.carrier, grade: 0, values })
}

/// No move of type I or II applies.
pub fn is_tensed(dc: &DoubleComplex) -> bool {
    (0..dc.quad_count()).all(|q| loop_side(dc, q).is_none())
        && (0..dc.vertex_count()).all(|v| series_pair(dc, v).is_none())
}

/// Applies moves I and II while any applies; returns the records in order.
pub fn tense(s: &Surface) -> (Surface, Vec<MoveRecord>) {
    let mut cur = s.clone();
    let mut recs = Vec::new();
    loop {
        let dc = &cur.complex;
        let step = (0..dc.quad_count())
            .filter(|&q| loop_side(dc, q).is_some())
            .find_map(|q| remove_loop(&cur, q).ok())
            .or_else(|| {
                (0..dc.vertex_count())
                    .filter(|&v| series_pair(dc, v).is_some())
                    .find_map(|v| merge(&cur, v).ok())
            });
        match step {
            Some((next, rec)) => {
                cur = next;
                recs.push(rec);
            }
            None => return (cur, recs),
        }
    }
}

/// Dimension of the space of holomorphic 1-forms: closed Λ-forms with
/// ω(Γ*_q) = iρ_q ω(Γ_q), by singular values above 1e-8·σ_max.
pub fn holomorphic_dimension(dc: &DoubleComplex) -> usize {
    let nf = dc.quad_count();
    let rows: Vec<usize> = (0..dc.vertex_count()).filter(|&v| dc.has_lambda_face(v)).collect();
    if rows.is_empty() {
        return nf;
    }
    let mut m = DMatrix::<Complex64>::zeros(rows.len(), nf);
    for (r, &v) in rows.iter().enumerate() {
        for (e, sign) in dc.lambda_face_boundary(v) {
            let (q, c) = if e < nf { (e, Complex64::new(1.0, 0.0)) } else { (e - nf, I * dc.rho(e - nf)) };
            m[(r, q)] += c * sign as f64;
        }
    }
    let sv = m.singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    nf - sv.iter().filter(|&&x| x > 1e-8 * top).count()
}

/// One step of a move script.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoveStep {
    pub kind: MoveKind,
    pub site: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Direction>,
    /// ρ of an inserted loop or the split fraction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<f64>,
}

pub fn apply_step(s: &Surface, step: &MoveStep) -> Result<(Surface, MoveRecord)> {
    use Direction::*;
    let bad = Error::BadConfiguration(step.site);
    match (step.kind, step.direction) {
        (MoveKind::I, None | Some(Remove)) => remove_loop(s, step.site),
        (MoveKind::I, Some(InsertPrimal)) => insert_loop(s, step.site, VertexKind::Primal, step.param.unwrap_or(1.0)),
        (MoveKind::I, Some(InsertDual)) => insert_loop(s, step.site, VertexKind::Dual, step.param.unwrap_or(1.0)),
        (MoveKind::II, None | Some(Merge)) => merge(s, step.site),
        (MoveKind::II, Some(SplitPrimal)) => split(s, step.site, VertexKind::Primal, step.param.unwrap_or(0.5)),
        (MoveKind::II, Some(SplitDual)) => split(s, step.site, VertexKind::Dual, step.param.unwrap_or(0.5)),
        (MoveKind::III, d @ (None | Some(StarToTriangle | TriangleToStar))) => star_triangle(s, step.site, d),
        _ => Err(bad),
    }
}

/// Applies a script, stopping at the first failing step with its index.
pub fn apply_script(s: &Surface, steps: &[MoveStep]) -> std::result::Result<(Surface, Vec<MoveRecord>), (usize, Error)> {
    let mut cur = s.clone();
    let mut recs = Vec::with_capacity(steps.len());
    for (i, step) in steps.iter().enumerate() {
        let (next, rec) = apply_step(&cur, step).map_err(|e| (i, e))?;
        cur = next;
        recs.push(rec);
    }
    Ok((cur, recs))
}

/// A seeded script of `n` valid moves, mixing removals, insertions,
/// merges, splits and star-triangle moves.
pub fn random_script(s: &Surface, n: usize, seed: u64) -> Vec<MoveStep> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = s.clone();
    let mut steps = Vec::with_capacity(n);
    while steps.len() < n {
        let dc = &cur.complex;
        let loops: Vec<usize> = (0..dc.quad_count()).filter(|&q| loop_side(dc, q).is_some()).collect();
        let pairs: Vec<usize> = (0..dc.vertex_count()).filter(|&v| series_pair(dc, v).is_some()).collect();
        let stars: Vec<usize> = (0..dc.vertex_count()).filter(|&v| hexagon(dc, v).is_some()).collect();
        let mut options: Vec<u8> = vec![3, 4];
        if !loops.is_empty() {
            options.push(0);
        }
        if !pairs.is_empty() {
            options.push(1);
        }
        if !stars.is_empty() {
            options.extend([2, 2]);
        }
        let primal = rng.gen_bool(0.5);
        let step = match *options.choose(&mut rng).expect("non-empty") {
            0 => MoveStep { kind: MoveKind::I, site: *loops.choose(&mut rng).unwrap(), direction: None, param: None },
            1 => MoveStep { kind: MoveKind::II, site: *pairs.choose(&mut rng).unwrap(), direction: None, param: None },
            2 => MoveStep { kind: MoveKind::III, site: *stars.choose(&mut rng).unwrap(), direction: None, param: None },
            3 => MoveStep {
                kind: MoveKind::I,
                site: rng.gen_range(0..dc.edge_count()),
                direction: Some(if primal { Direction::InsertPrimal } else { Direction::InsertDual }),
                param: Some(rng.gen_range(0.5..2.0)),
            },
            _ => MoveStep {
                kind: MoveKind::II,
                site: rng.gen_range(0..dc.quad_count()),
                direction: Some(if primal { Direction::SplitPrimal } else { Direction::SplitDual }),
                param: Some(rng.gen_range(0.2..0.8)),
            },
        };
        if let Ok((next, _)) = apply_step(&cur, &step) {
            cur = next;
            steps.push(step);
        }
    }
    steps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{cr_residuals, energy};
    use crate::critical::exp::exponential;
    use crate::critical::{square_patch, square_torus, tri_hex_torus, tri_sextant, TriHexParams};
    use crate::fixtures::{genus_two, randomize_rho};

    fn torus() -> Surface {
        Surface::new(square_torus(2, 2, 0.7).unwrap().complex)
    }

    fn max_cr(dc: &DoubleComplex, f: &Cochain) -> f64 {
        cr_residuals(dc, f).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn undo_all(end: &Surface, recs: &[MoveRecord]) -> Surface {
        recs.iter().rev().fold(end.clone(), |s, r| apply_record(&s, &r.inverse()).unwrap())
    }

    #[test]
    fn star_triangle_formulas() {
        assert_eq!(star_from_triangle([1.0; 3]), [3.0; 3]);
        let s = star_from_triangle([1.0, 2.0, 3.0]);
        for (x, y) in s.iter().zip([11.0, 11.0 / 2.0, 11.0 / 3.0]) {
            assert!((x - y).abs() < 1e-14);
        }
        assert!((s[0] * s[1] * s[2] / s.iter().sum::<f64>() - 11.0).abs() < 1e-13);
        let back = triangle_from_star(s);
        for (x, y) in back.iter().zip([1.0, 2.0, 3.0]) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn loop_moves_keep_curvature_and_undo_exactly() {
        let s = torus();
        assert!(s.total_curvature().abs() < 1e-12);
        let (t, rec) = insert_loop(&s, 3, VertexKind::Primal, 1.0).unwrap();
        assert_eq!(t.complex.quad_count(), s.complex.quad_count() + 1);
        let (&(summit, _, angle), de) = (rec.added_vertices.first().unwrap(), s.complex.edge(3));
        assert!((angle - PI / 2.0).abs() < 1e-15);
        for &(b, _, old, new) in &rec.angle_changes {
            let expected = if b == de.primal { PI } else if b == de.dual { PI / 2.0 } else { 0.0 };
            assert!((new - old - expected).abs() < 1e-14, "vertex {b}");
        }
        assert!((t.total_curvature() - s.total_curvature()).abs() < 1e-12);
        assert!(!is_tensed(&t.complex));
        let q = rec.added_quads.iter().find(|(_, c)| c.vertices.contains(&summit)).unwrap().0;
        let (back, rec2) = remove_loop(&t, q).unwrap();
        assert!((back.total_curvature() - s.total_curvature()).abs() < 1e-12);
        assert_eq!(back.complex.quad_count(), s.complex.quad_count());
        let undone = apply_record(&t, &rec.inverse()).unwrap();
        assert_eq!(undone.complex.raw(), s.complex.raw());
        assert_eq!(undone.angles, s.angles);
        assert_eq!(rec2.direction, Direction::Remove);
        assert_eq!(rec2.inverse_direction(), Direction::InsertPrimal);
        // Dual loops too.
        let (t, _) = insert_loop(&s, 5, VertexKind::Dual, 2.5).unwrap();
        assert!((t.total_curvature() - s.total_curvature()).abs() < 1e-12);
        assert_eq!(holomorphic_dimension(&t.complex), 2);
    }

    #[test]
    fn series_parallel_parameters() {
        let s = torus();
        let (t, rec) = split(&s, 0, VertexKind::Dual, 0.5).unwrap();
        let m = rec.added_vertices[0].0;
        let (u, merged) = merge(&t, m).unwrap();
        assert_eq!(u.complex.quad_count(), s.complex.quad_count());
        let MoveParams::SeriesParallel { parts, merged: sum, .. } = merged.params else { panic!() };
        assert!((parts[0] + parts[1] - sum).abs() < 1e-15);

        // ρ₁ = ρ₂ = 1 merge to 2, the dual series to 1/2; ρ₁ = 2, ρ₂ = 3 to 5 and 1/5.
        for (r1, r2) in [(1.0, 1.0), (2.0, 3.0)] {
            let mut raw = t.complex.raw().clone();
            let [(q1, _), (q2, _)] = series_pair(&t.complex, m).unwrap();
            raw.rho[q1] = r1;
            raw.rho[q2] = r2;
            let t2 = Surface::new(DoubleComplex::from_raw(raw).unwrap());
            let (u, rec) = merge(&t2, m).unwrap();
            let q = rec.added_quads[0].0;
            assert!((u.complex.rho(q) - (r1 + r2)).abs() < 1e-15);
            assert!((conductance(&u.complex, q, VertexKind::Dual) - r1.recip() * r2.recip() / (r1.recip() + r2.recip())).abs() < 1e-15);
            assert!((u.total_curvature() - t2.total_curvature()).abs() < 1e-12);
        }
    }

    #[test]
    fn star_triangle_on_a_flat_critical_torus() {
        let m = tri_hex_torus(TriHexParams::from_angles(1.0, 1.2, PI - 2.2), 3, 3).unwrap();
        let s = Surface::new(m.complex);
        let c = (0..s.complex.vertex_count()).find(|&v| hexagon(&s.complex, v).is_some()).unwrap();
        let (t, rec) = star_triangle(&s, c, None).unwrap();
        assert!(rec.params.star_triangle_residual().unwrap() < 1e-13);
        let MoveParams::StarTriangle { triangle, .. } = rec.params else { panic!() };
        let sigma = triangle[0] * triangle[1] + triangle[1] * triangle[2] + triangle[2] * triangle[0];
        assert!((sigma - 1.0).abs() < 1e-12);
        for &(_, _, old, new) in &rec.angle_changes {
            assert!((new - old).abs() < 1e-12);
        }
        assert!(t.angles.iter().all(|a| (a - 2.0 * PI).abs() < 1e-12));
        assert_eq!(holomorphic_dimension(&t.complex), 2);
        // Involution: back at the new centre gives the original parameters.
        let c2 = rec.added_vertices[0].0;
        let (u, rec2) = star_triangle(&t, c2, Some(rec.inverse_direction())).unwrap();
        let mut before = s.complex.rhos().to_vec();
        let mut after = u.complex.rhos().to_vec();
        before.sort_by(f64::total_cmp);
        after.sort_by(f64::total_cmp);
        for (x, y) in before.iter().zip(&after) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(rec2.params.star_triangle_residual().unwrap() < 1e-13);
        assert_eq!(star_triangle(&s, c, Some(rec.inverse_direction())).unwrap_err(), Error::BadConfiguration(c));
    }

    #[test]
    fn transport_of_holomorphic_functions() {
        let m = tri_sextant(TriHexParams::from_angles(1.1, 0.9, PI - 2.0), 4).unwrap();
        let f = exponential(&m, Complex64::new(0.3, -0.4)).unwrap();
        let s = Surface::new(m.complex.clone());
        let e0 = energy(&s.complex, &f).unwrap();
        let c = (0..s.complex.vertex_count()).find(|&v| hexagon(&s.complex, v).is_some()).unwrap();
        let q = s.complex.corners(c)[0].0;
        let e = s.complex.sides(q)[0];
        let moves: Vec<(Surface, MoveRecord)> = vec![
            star_triangle(&s, c, None).unwrap(),
            split(&s, q, VertexKind::Primal, 0.3).unwrap(),
            split(&s, q, VertexKind::Dual, 0.6).unwrap(),
            insert_loop(&s, e, VertexKind::Primal, 0.7).unwrap(),
            insert_loop(&s, e, VertexKind::Dual, 1.7).unwrap(),
        ];
        for (t, rec) in moves {
            let g = transport(&f, &rec).unwrap();
            assert!(max_cr(&t.complex, &g) < 1e-10, "{:?}", rec.direction);
            assert!((energy(&t.complex, &g).unwrap() - e0).abs() < 1e-10 * e0, "{:?}", rec.direction);
            let back = transport(&g, &rec.inverse()).unwrap();
            assert!(back.max_diff(&f) < 1e-12, "{:?}", rec.direction);
        }
        let constant = Cochain::from_fn(f.carrier, 0, f.len(), |_| Complex64::new(2.0, 1.0));
        let (_, rec) = star_triangle(&s, c, None).unwrap();
        assert!(transport(&constant, &rec).unwrap().max_diff(&constant) < 1e-15);
        let mut bad = f.clone();
        bad.values[s.complex.quad(s.complex.corners(c)[1].0)[0]] += 1.0;
        assert!(matches!(transport(&bad, &rec), Err(Error::NotHolomorphic(_))));
    }

    #[test]
    fn tensed_surfaces() {
        let s = torus();
        assert!(is_tensed(&s.complex));
        let (t, _) = split(&s, 2, VertexKind::Primal, 0.4).unwrap();
        assert!(!is_tensed(&t.complex));
        let (t, _) = insert_loop(&t, 7, VertexKind::Dual, 1.3).unwrap();
        let (u, recs) = tense(&t);
        assert!(is_tensed(&u.complex));
        assert_eq!(recs.len(), 2);
        assert_eq!(u.complex.quad_count(), s.complex.quad_count());
        assert!(square_patch(1, 0.7).map(|m| is_tensed(&m.complex)).unwrap());
    }

    #[test]
    fn bad_sites_are_rejected() {
        let s = torus();
        assert_eq!(remove_loop(&s, 0).unwrap_err(), Error::BadConfiguration(0));
        assert_eq!(merge(&s, 0).unwrap_err(), Error::BadConfiguration(0));
        assert_eq!(star_triangle(&s, 0, None).unwrap_err(), Error::BadConfiguration(0));
        assert_eq!(split(&s, 999, VertexKind::Dual, 0.5).unwrap_err(), Error::BadConfiguration(999));
        let step = MoveStep { kind: MoveKind::III, site: 0, direction: Some(Direction::Merge), param: None };
        assert!(apply_step(&s, &step).is_err());
    }

    #[test]
    fn scripts_parse_and_report_failing_index() {
        let steps: Vec<MoveStep> = serde_json::from_str(
            r#"[{"kind":"II","site":0,"direction":"split_dual","param":0.25},{"kind":"I","site":0}]"#,
        )
        .unwrap();
        assert_eq!(steps[0].direction, Some(Direction::SplitDual));
        let (idx, err) = apply_script(&torus(), &steps).map(|_| ()).unwrap_err();
        assert_eq!((idx, err), (1, Error::BadConfiguration(0)));
    }

    #[test]
    fn random_scripts_preserve_invariants() {
        let fixtures = [
            Surface::new(genus_two(1).unwrap()),
            Surface::new(
                randomize_rho(&tri_hex_torus(TriHexParams::equilateral(), 3, 3).unwrap().complex, 2, 0.5, 2.0)
                    .unwrap(),
            ),
        ];
        for (i, s) in fixtures.iter().enumerate() {
            let dim = holomorphic_dimension(&s.complex);
            assert_eq!(dim, 2 * s.complex.genus().unwrap() as usize);
            let steps = random_script(s, 200, 10 + i as u64);
            assert_eq!(steps, random_script(s, 200, 10 + i as u64));
            let (end, recs) = apply_script(s, &steps).unwrap();
            // Only the triangular lattice has degree-3 vertices.
            assert_eq!(recs.iter().any(|r| r.kind == MoveKind::III), i == 1);
            let mut cur = s.clone();
            for rec in &recs {
                cur = apply_record(&cur, rec).unwrap();
                assert!((cur.total_curvature() - s.total_curvature()).abs() < 1e-12);
                assert_eq!(holomorphic_dimension(&cur.complex), dim);
                if let Some(r) = rec.params.star_triangle_residual() {
                    assert!(r < 1e-13);
                }
            }
            assert_eq!(cur.complex.raw(), end.complex.raw());
            let back = undo_all(&end, &recs);
            assert_eq!(back.complex.raw(), s.complex.raw());
            for (a, b) in back.angles.iter().zip(&s.angles) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
