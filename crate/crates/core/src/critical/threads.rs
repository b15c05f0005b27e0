//! Train-tracks (threads of rhombi joined through opposite sides) and
//! convexity of face regions.

use std::collections::{BTreeSet, VecDeque};

use num_complex::Complex64;

use super::CriticalMap;
use crate::complex::{Carrier, Cochain, DoubleComplex};
use crate::homology::CanonicalDissection;

/// A thread: ◊ edges related through opposite sides of successive faces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thread {
    pub edges: Vec<usize>,
    /// `faces[i]` lies between `edges[i]` and `edges[i + 1]` (cyclically
    /// when the thread is closed).
    pub faces: Vec<usize>,
    pub closed: bool,
}

/// The other face on `e` and the side index there, if any.
fn across(dc: &DoubleComplex, e: usize, from: (usize, usize)) -> Option<(usize, usize)> {
    dc.edge_sides(e).iter().copied().find(|&s| s != from)
}

/// Walks from `start` through face side `side`, returning edges after
/// `start`, the faces crossed and whether the walk came back to `start`.
fn walk(dc: &DoubleComplex, start: usize, side: (usize, usize)) -> (Vec<usize>, Vec<usize>, bool) {
    let (mut edges, mut faces) = (Vec::new(), Vec::new());
    let (mut q, mut k) = side;
    loop {
        faces.push(q);
        let next = dc.sides(q)[(k + 2) % 4];
        if next == start {
            return (edges, faces, true);
        }
        edges.push(next);
        match across(dc, next, (q, (k + 2) % 4)) {
            Some(s) => (q, k) = s,
            None => return (edges, faces, false),
        }
    }
}

/// Partition of the ◊ edges into threads.
pub fn train_tracks(dc: &DoubleComplex) -> Vec<Thread> {
    let mut seen = vec![false; dc.edge_count()];
    let mut out = Vec::new();
    for e0 in 0..dc.edge_count() {
        if seen[e0] {
            continue;
        }
        let sides = dc.edge_sides(e0);
        let (fwd_edges, fwd_faces, closed) = walk(dc, e0, sides[0]);
        let thread = if closed {
            let mut edges = vec![e0];
            edges.extend(fwd_edges);
            Thread { edges, faces: fwd_faces, closed: true }
        } else {
            let (mut edges, mut faces) = (Vec::new(), Vec::new());
            if let Some(&back) = sides.get(1) {
                let (be, bf, _) = walk(dc, e0, back);
                edges.extend(be.into_iter().rev());
                faces.extend(bf.into_iter().rev());
            }
            edges.push(e0);
            edges.extend(fwd_edges);
            faces.extend(fwd_faces);
            Thread { edges, faces, closed: false }
        };
        for &e in &thread.edges {
            seen[e] = true;
        }
        out.push(thread);
    }
    out
}

/// Unit direction of a thread's first edge and the largest deviation of the
/// other edges from being parallel to it.
pub fn thread_direction(m: &CriticalMap, t: &Thread) -> (Complex64, f64) {
    let d = m.edge_vector(t.edges[0]);
    let u = d / d.norm();
    let dev = t
        .edges
        .iter()
        .map(|&e| {
            let v = m.edge_vector(e) / u;
            v.im.abs() / v.norm()
        })
        .fold(0.0, f64::max);
    (u, dev)
}

/// The closed ◊ 1-form counting signed crossings with the thread:
/// ±1 on its edges, alternating since opposite sides are antiparallel.
pub fn thread_cocycle(dc: &DoubleComplex, t: &Thread) -> Cochain {
    let mut c = Cochain::zeros_on(dc, Carrier::Diamond, 1);
    for (i, &e) in t.edges.iter().enumerate() {
        c.values[e] = Complex64::new(if i % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
    }
    c
}

/// Intersection numbers of a closed thread with the cycles of a dissection;
/// all zero exactly when the thread is null-homologous.
pub fn thread_class(dc: &DoubleComplex, t: &Thread, d: &CanonicalDissection) -> Vec<i64> {
    let c = thread_cocycle(dc, t);
    d.aleph.iter().map(|a| c.eval(a).re.round() as i64).collect()
}

/// Convexity of a face region: connected, and along every thread the faces
/// of the region form one interval (one arc on a closed thread).
pub fn is_convex(dc: &DoubleComplex, threads: &[Thread], region: &[usize]) -> bool {
    let r: BTreeSet<usize> = region.iter().copied().collect();
    if r.is_empty() {
        return true;
    }
    if !is_connected(dc, &r) {
        return false;
    }
    threads.iter().all(|t| {
        let inside: Vec<bool> = t.faces.iter().map(|f| r.contains(f)).collect();
        if t.closed {
            // Some arc between any two faces is complete iff the missing
            // faces form a single cyclic block.
            runs_of(&inside, false, true) <= 1
        } else {
            runs_of(&inside, true, false) <= 1
        }
    })
}

/// Number of maximal runs of `value`, cyclically if asked.
fn runs_of(xs: &[bool], value: bool, cyclic: bool) -> usize {
    let n = xs.len();
    let mut runs = (0..n)
        .filter(|&i| xs[i] == value && (i == 0 || xs[i - 1] != value))
        .count();
    if cyclic && n > 1 && xs[0] == value && xs[n - 1] == value && runs > 1 {
        runs -= 1;
    }
    runs
}

fn is_connected(dc: &DoubleComplex, r: &BTreeSet<usize>) -> bool {
    let start = *r.iter().next().expect("non-empty");
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(q) = queue.pop_front() {
        for e in dc.sides(q) {
            for &(q2, _) in dc.edge_sides(e) {
                if r.contains(&q2) && seen.insert(q2) {
                    queue.push_back(q2);
                }
            }
        }
    }
    seen.len() == r.len()
}
