//! Spanning trees, cycle bases, left companions, intersection numbers and
//! canonical dissections.

use std::collections::VecDeque;

use crate::complex::{boundary, cycle_to_walks, Carrier, Chain, DoubleComplex, VertexKind};
use crate::error::{Error, Result};

/// A maximal tree of the quad-graph, as a set of ◊-edges (BFS from vertex 0).
pub fn spanning_tree(dc: &DoubleComplex) -> Result<Vec<usize>> {
    let n = dc.vertex_count();
    let mut seen = vec![false; n];
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    if n == 0 {
        return Ok(tree);
    }
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(v) = queue.pop_front() {
        for (w, e, _) in dc.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                tree.push(e);
                queue.push_back(w);
            }
        }
    }
    if tree.len() + 1 != n {
        return Err(Error::Disconnected);
    }
    Ok(tree)
}

/// 2g cycles whose classes form a basis of H₁, one per edge outside both
/// the tree and a dual spanning tree of the faces.
pub fn cycle_basis(dc: &DoubleComplex, tree: &[usize]) -> Result<Vec<Chain>> {
    dc.require_closed()?;
    let mut in_tree = vec![false; dc.edge_count()];
    for &e in tree {
        in_tree[e] = true;
    }
    // Dual tree on the quads through edges not in `tree`.
    let nf = dc.quad_count();
    let mut in_cotree = vec![false; dc.edge_count()];
    let mut seen = vec![false; nf];
    if nf > 0 {
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(q) = queue.pop_front() {
            for k in 0..4 {
                let e = dc.sides(q)[k];
                if in_tree[e] || in_cotree[e] {
                    continue;
                }
                if let Some((q2, _)) = dc.across(q, k) {
                    if !seen[q2] {
                        seen[q2] = true;
                        in_cotree[e] = true;
                        queue.push_back(q2);
                    }
                }
            }
        }
    }
    (0..dc.edge_count())
        .filter(|&e| !in_tree[e] && !in_cotree[e])
        .map(|e| tree_cycle(dc, tree, e))
        .collect()
}

/// The simple loop left in T ∪ e after pruning all pending branches,
/// oriented along `e`.
pub fn tree_cycle(dc: &DoubleComplex, tree: &[usize], e: usize) -> Result<Chain> {
    let n = dc.vertex_count();
    let mut edges: Vec<usize> = tree.to_vec();
    edges.push(e);
    let mut alive = vec![true; edges.len()];
    let mut degree = vec![0usize; n];
    let ends = |e: usize| {
        let de = dc.edge(e);
        (de.primal, de.dual)
    };
    for &x in &edges {
        let (a, b) = ends(x);
        degree[a] += 1;
        degree[b] += 1;
    }
    let mut incident = vec![Vec::new(); n];
    for (i, &x) in edges.iter().enumerate() {
        let (a, b) = ends(x);
        incident[a].push(i);
        incident[b].push(i);
    }
    let mut leaves: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    while let Some(v) = leaves.pop() {
        if degree[v] != 1 {
            continue;
        }
        let Some(&i) = incident[v].iter().find(|&&i| alive[i]) else { continue };
        alive[i] = false;
        degree[v] -= 1;
        let (a, b) = ends(edges[i]);
        let w = if a == v { b } else { a };
        degree[w] -= 1;
        if degree[w] == 1 {
            leaves.push(w);
        }
    }
    // Walk the loop starting along e.
    let last = edges.len() - 1;
    let mut chain = Chain::zero(Carrier::Diamond, 1);
    let (start, mut cur) = ends(e);
    chain.add_cell(e, 1);
    let mut prev = last;
    while cur != start {
        let &i = incident[cur]
            .iter()
            .find(|&&i| alive[i] && i != prev)
            .ok_or_else(|| Error::Invalid("pruned tree cycle is broken".into()))?;
        let (a, b) = ends(edges[i]);
        if a == cur {
            chain.add_cell(edges[i], 1);
            cur = b;
        } else {
            chain.add_cell(edges[i], -1);
            cur = a;
        }
        prev = i;
    }
    debug_assert!(boundary(dc, &chain).map(|b| b.is_zero()).unwrap_or(false));
    Ok(chain)
}

/// Cycles on Γ and on Γ* running just to the left of a ◊-cycle, homologous to it.
///
/// Returned as Λ 1-chains: the first uses only Γ-diagonals, the second only
/// Γ*-diagonals. At each vertex of the (backtrack-free) walk, the left
/// companion follows the diagonals of the quads swept counterclockwise from
/// the outgoing edge to the incoming one.
pub fn left_companions(dc: &DoubleComplex, c: &Chain) -> Result<(Chain, Chain)> {
    let nf = dc.quad_count();
    let mut on_gamma = Chain::zero(Carrier::Lambda, 1);
    let mut on_dual = Chain::zero(Carrier::Lambda, 1);
    for walk in cycle_to_walks(dc, c)? {
        let walk = walk.reduced();
        let n = walk.len();
        for i in 0..n {
            let v = walk.vertices[i];
            let e_in = walk.steps[(i + n - 1) % n].0;
            let e_out = walk.steps[i].0;
            let corners = dc.corners(v);
            let m = corners.len();
            let j0 = corners
                .iter()
                .position(|&(q, k)| dc.sides(q)[k] == e_out)
                .ok_or_else(|| Error::Invalid(format!("edge {e_out} is not at vertex {v}")))?;
            for step in 0..m {
                let (q, k) = corners[(j0 + step) % m];
                match k {
                    0 => on_dual.add_cell(q + nf, -1),
                    1 => on_gamma.add_cell(q, 1),
                    2 => on_dual.add_cell(q + nf, 1),
                    _ => on_gamma.add_cell(q, -1),
                }
                if dc.sides(q)[(k + 3) % 4] == e_in {
                    break;
                }
                if step + 1 == m {
                    return Err(Error::BoundaryVertex(v));
                }
            }
        }
    }
    Ok((on_gamma, on_dual))
}

/// Intersection number of two Λ-cycles: `Σ_q A(x,x')B(y,y') − A(y,y')B(x,x')`.
pub fn intersection_lambda(dc: &DoubleComplex, a: &Chain, b: &Chain) -> i64 {
    let nf = dc.quad_count();
    (0..nf)
        .map(|q| a.coeff(q) * b.coeff(q + nf) - a.coeff(q + nf) * b.coeff(q))
        .sum()
}

/// Intersection number of two ◊-cycles via their left companions.
pub fn intersection_diamond(dc: &DoubleComplex, a: &Chain, b: &Chain) -> Result<i64> {
    let (ag, _) = left_companions(dc, a)?;
    let (_, bd) = left_companions(dc, b)?;
    Ok(intersection_lambda(dc, &ag, &bd))
}

/// Intersection number on either carrier.
pub fn intersection_number(dc: &DoubleComplex, a: &Chain, b: &Chain) -> Result<i64> {
    match (a.carrier, b.carrier) {
        (Carrier::Lambda, Carrier::Lambda) => Ok(intersection_lambda(dc, a, b)),
        (Carrier::Diamond, Carrier::Diamond) => intersection_diamond(dc, a, b),
        _ => Err(Error::Invalid("cycles live on different carriers".into())),
    }
}

/// Whether a Λ-chain uses only edges of one graph.
pub fn graph_of(dc: &DoubleComplex, c: &Chain) -> Option<VertexKind> {
    let nf = dc.quad_count();
    let mut kinds = c.terms().map(|(e, _)| if e < nf { VertexKind::Primal } else { VertexKind::Dual });
    let first = kinds.next()?;
    kinds.all(|k| k == first).then_some(first)
}

/// A symplectic homology basis of the quad-graph and its companions on Λ.
#[derive(Debug, Clone)]
pub struct CanonicalDissection {
    pub genus: usize,
    /// ℵ₁ … ℵ_{2g} on ◊.
    pub aleph: Vec<Chain>,
    /// ℵ^Λ ordered (Γ-a, Γ*-a, Γ*-b, Γ-b) blockwise.
    pub aleph_lambda: Vec<Chain>,
    /// (ℵ_k · ℵ_ℓ), equal to [[0, I], [−I, 0]].
    pub intersection: Vec<Vec<i64>>,
}

fn pairing_matrix(dc: &DoubleComplex, cycles: &[Chain]) -> Result<Vec<Vec<i64>>> {
    let comps = cycles
        .iter()
        .map(|c| left_companions(dc, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(comps
        .iter()
        .map(|(ag, _)| comps.iter().map(|(_, bd)| intersection_lambda(dc, ag, bd)).collect())
        .collect())
}

/// Reduces an integer skew form to the standard symplectic one.
///
/// Returns integer combinations (rows) of the input vectors: the first g
/// rows are the a-cycles, the next g the b-cycles.
pub fn symplectic_reduction(form: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let n = form.len();
    let pair = |u: &[i64], v: &[i64]| -> i64 {
        let mut s = 0;
        for i in 0..n {
            if u[i] == 0 {
                continue;
            }
            for j in 0..n {
                s += u[i] * form[i][j] * v[j];
            }
        }
        s
    };
    let mut pool: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    let (mut a_side, mut b_side) = (Vec::new(), Vec::new());
    while !pool.is_empty() {
        let a = pool.remove(0);
        // Euclid on the pairings with `a` until a single ±1 survives.
        loop {
            let pairings: Vec<i64> = pool.iter().map(|v| pair(&a, v)).collect();
            let nonzero: Vec<usize> = (0..pool.len()).filter(|&j| pairings[j] != 0).collect();
            let Some(&pivot) = nonzero.iter().min_by_key(|&&j| pairings[j].abs()) else {
                return Err(Error::DegeneratePairing);
            };
            if nonzero.len() == 1 {
                if pairings[pivot].abs() != 1 {
                    return Err(Error::DegeneratePairing);
                }
                break;
            }
            let p = pairings[pivot];
            let pv = pool[pivot].clone();
            for &j in &nonzero {
                if j != pivot {
                    let k = pairings[j].div_euclid(p);
                    for (x, y) in pool[j].iter_mut().zip(&pv) {
                        *x -= k * y;
                    }
                }
            }
        }
        let pairings: Vec<i64> = pool.iter().map(|v| pair(&a, v)).collect();
        let j = pairings.iter().position(|&p| p != 0).expect("pivot survives");
        let mut b = pool.remove(j);
        if pairings[j] < 0 {
            b.iter_mut().for_each(|x| *x = -*x);
        }
        for v in pool.iter_mut() {
            let (va, vb) = (pair(v, &a), pair(v, &b));
            // v − ⟨v,b⟩a + ⟨v,a⟩b is orthogonal to both a and b.
            for i in 0..n {
                v[i] += -vb * a[i] + va * b[i];
            }
        }
        a_side.push(a);
        b_side.push(b);
    }
    a_side.extend(b_side);
    Ok(a_side)
}

/// Turns 2g homology generators into a canonical dissection.
pub fn canonical_dissection(dc: &DoubleComplex, basis: &[Chain]) -> Result<CanonicalDissection> {
    dc.require_closed()?;
    let form = pairing_matrix(dc, basis)?;
    let combos = symplectic_reduction(&form)?;
    let aleph: Vec<Chain> = combos
        .iter()
        .map(|row| {
            row.iter()
                .zip(basis)
                .fold(Chain::zero(Carrier::Diamond, 1), |acc, (&k, c)| &acc + &c.scaled(k))
        })
        .collect();
    let intersection = pairing_matrix(dc, &aleph)?;
    let g = aleph.len() / 2;
    let comps = aleph
        .iter()
        .map(|c| left_companions(dc, c))
        .collect::<Result<Vec<_>>>()?;
    let mut aleph_lambda = Vec::with_capacity(4 * g);
    aleph_lambda.extend((0..g).map(|k| comps[k].0.clone()));
    aleph_lambda.extend((0..g).map(|k| comps[k].1.clone()));
    aleph_lambda.extend((0..g).map(|k| comps[k + g].1.clone()));
    aleph_lambda.extend((0..g).map(|k| comps[k + g].0.clone()));
    Ok(CanonicalDissection { genus: g, aleph, aleph_lambda, intersection })
}

/// Canonical dissection from a tree-cotree cycle basis.
pub fn default_dissection(dc: &DoubleComplex) -> Result<CanonicalDissection> {
    let tree = spanning_tree(dc)?;
    let basis = cycle_basis(dc, &tree)?;
    canonical_dissection(dc, &basis)
}

/// The standard symplectic matrix [[0, I], [−I, 0]] of size 2g.
pub fn symplectic_j(g: usize) -> Vec<Vec<i64>> {
    (0..2 * g)
        .map(|i| {
            (0..2 * g)
                .map(|j| {
                    if i < g && j == i + g {
                        1
                    } else if i >= g && j + g == i {
                        -1
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect()
}

/// Intersection matrix of ℵ^Λ.
pub fn lambda_intersection_matrix(dc: &DoubleComplex, d: &CanonicalDissection) -> Vec<Vec<i64>> {
    d.aleph_lambda
        .iter()
        .map(|a| d.aleph_lambda.iter().map(|b| intersection_lambda(dc, a, b)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::average;
    use crate::complex::Walk;
    use crate::critical::{square_torus, tri_hex_torus, TriHexParams};

    #[test]
    fn tree_has_v_minus_one_edges() {
        let m = square_torus(2, 3, 0.5).unwrap();
        let t = spanning_tree(&m.complex).unwrap();
        assert_eq!(t.len(), 4 * 2 * 3 - 1);
        let single = crate::critical::single_rhombus(1.0).unwrap();
        assert_eq!(spanning_tree(&single.complex).unwrap().len(), 3);
    }

    #[test]
    fn cycle_basis_has_2g_closed_cycles() {
        for m in [
            square_torus(1, 1, 0.5).unwrap(),
            square_torus(2, 3, 0.5).unwrap(),
            tri_hex_torus(TriHexParams::equilateral(), 1, 1).unwrap(),
        ] {
            let dc = &m.complex;
            let basis = cycle_basis(dc, &spanning_tree(dc).unwrap()).unwrap();
            assert_eq!(basis.len(), 2);
            for c in &basis {
                assert!(boundary(dc, c).unwrap().is_zero());
            }
            // Independent: the pairing is nondegenerate.
            let i = intersection_diamond(dc, &basis[0], &basis[1]).unwrap();
            assert_eq!(i.abs(), 1);
        }
    }

    #[test]
    fn companions_are_homologous_to_the_cycle() {
        // dZ is closed with the same periods on ◊, Γ and Γ*.
        let m = square_torus(2, 3, 0.7).unwrap();
        let dc = &m.complex;
        let dzd = m.dz_diamond();
        let dzl = m.dz_lambda();
        assert!(average(dc, &dzd).unwrap().max_diff(&dzl) < 1e-14);
        let mut cycles = m.basis_hint.clone().unwrap();
        cycles.extend(cycle_basis(dc, &spanning_tree(dc).unwrap()).unwrap());
        for c in &cycles {
            let (cg, cd) = left_companions(dc, c).unwrap();
            assert_eq!(graph_of(dc, &cg), Some(VertexKind::Primal));
            assert_eq!(graph_of(dc, &cd), Some(VertexKind::Dual));
            assert!(boundary(dc, &cg).unwrap().is_zero());
            assert!(boundary(dc, &cd).unwrap().is_zero());
            let p = dzd.eval(c);
            assert!((dzl.eval(&cg) - p).norm() < 1e-12);
            assert!((dzl.eval(&cd) - p).norm() < 1e-12);
        }
    }

    #[test]
    fn face_boundary_companions_are_contractible() {
        let m = square_torus(2, 2, 0.5).unwrap();
        let dc = &m.complex;
        let face = boundary(dc, &Chain::cell(Carrier::Diamond, 2, 3, 1)).unwrap();
        let (cg, cd) = left_companions(dc, &face).unwrap();
        // The left of a counterclockwise face boundary is the face itself.
        assert!(cg.is_zero());
        assert!(cd.is_zero());
        let (rg, rd) = left_companions(dc, &(-&face)).unwrap();
        // Reversed, the companions circle the four corners from outside;
        // they bound, so every intersection with them vanishes.
        let basis = m.basis_hint.clone().unwrap();
        for b in &basis {
            let (bg, bd) = left_companions(dc, b).unwrap();
            assert_eq!(intersection_lambda(dc, &rg, &bd), 0);
            assert_eq!(intersection_lambda(dc, &bg, &rd), 0);
        }
    }

    #[test]
    fn reversed_cycle_negates_intersections() {
        let m = square_torus(2, 2, 0.5).unwrap();
        let dc = &m.complex;
        let h = m.basis_hint.clone().unwrap();
        let ab = intersection_diamond(dc, &h[0], &h[1]).unwrap();
        assert_eq!(ab, 1);
        assert_eq!(intersection_diamond(dc, &(-&h[0]), &h[1]).unwrap(), -1);
        assert_eq!(intersection_diamond(dc, &h[1], &h[0]).unwrap(), -1);
        assert_eq!(intersection_diamond(dc, &h[0], &h[0]).unwrap(), 0);
        // Both companion pairings agree.
        let (ag, ad) = left_companions(dc, &h[0]).unwrap();
        let (bg, bd) = left_companions(dc, &h[1]).unwrap();
        assert_eq!(intersection_lambda(dc, &ag, &bd), intersection_lambda(dc, &ad, &bg));
        assert_eq!(intersection_lambda(dc, &ag, &bg), 0);
    }

    #[test]
    fn adding_a_face_boundary_changes_nothing() {
        let m = square_torus(2, 2, 0.5).unwrap();
        let dc = &m.complex;
        let h = m.basis_hint.clone().unwrap();
        for q in 0..dc.quad_count() {
            let f = boundary(dc, &Chain::cell(Carrier::Diamond, 2, q, 1)).unwrap();
            let moved = &h[0] + &f;
            assert_eq!(intersection_diamond(dc, &moved, &h[1]).unwrap(), 1);
        }
    }

    #[test]
    fn dissection_of_hinted_basis_is_symplectic() {
        let m = square_torus(3, 2, 1.0).unwrap();
        let d = canonical_dissection(&m.complex, m.basis_hint.as_ref().unwrap()).unwrap();
        assert_eq!(d.intersection, symplectic_j(1));
        assert_eq!(d.aleph[0], m.basis_hint.as_ref().unwrap()[0]);
        let big = lambda_intersection_matrix(&m.complex, &d);
        assert_eq!(big, symplectic_j(2));
        // Swapped input is repaired by a sign.
        let h = m.basis_hint.clone().unwrap();
        let d2 = canonical_dissection(&m.complex, &[h[1].clone(), h[0].clone()]).unwrap();
        assert_eq!(d2.intersection, symplectic_j(1));
    }

    #[test]
    fn reduction_handles_non_standard_unimodular_forms() {
        // a, b, a + b, ... on a genus-2 form written in a scrambled basis.
        let j = symplectic_j(2);
        let t: Vec<Vec<i64>> = vec![
            vec![1, 0, 2, 0],
            vec![1, 1, 0, 3],
            vec![0, 0, 1, 0],
            vec![0, 1, 1, 2],
        ];
        // form' = T J Tᵀ
        let form: Vec<Vec<i64>> = (0..4)
            .map(|i| {
                (0..4)
                    .map(|l| {
                        (0..4)
                            .flat_map(|k| (0..4).map(move |m| (k, m)))
                            .map(|(k, m)| t[i][k] * j[k][m] * t[l][m])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        let rows = symplectic_reduction(&form).unwrap();
        let pair = |u: &[i64], v: &[i64]| -> i64 {
            (0..4).flat_map(|a| (0..4).map(move |b| (a, b))).map(|(a, b)| u[a] * form[a][b] * v[b]).sum()
        };
        let got: Vec<Vec<i64>> = rows.iter().map(|u| rows.iter().map(|v| pair(u, v)).collect()).collect();
        assert_eq!(got, j);
    }

    #[test]
    fn doubled_cycle_is_degenerate() {
        let m = square_torus(1, 2, 0.5).unwrap();
        let h = m.basis_hint.clone().unwrap();
        let doubled = [h[0].scaled(2), h[1].clone()];
        assert_eq!(
            canonical_dissection(&m.complex, &doubled).unwrap_err(),
            Error::DegeneratePairing
        );
    }

    #[test]
    fn default_dissection_on_tri_hex() {
        let m = tri_hex_torus(TriHexParams::equilateral(), 2, 3).unwrap();
        let d = default_dissection(&m.complex).unwrap();
        assert_eq!(d.genus, 1);
        assert_eq!(d.intersection, symplectic_j(1));
        assert_eq!(lambda_intersection_matrix(&m.complex, &d), symplectic_j(2));
        for (i, c) in d.aleph_lambda.iter().enumerate() {
            let expect = if i == 0 || i == 3 { VertexKind::Primal } else { VertexKind::Dual };
            assert_eq!(graph_of(&m.complex, c), Some(expect));
        }
    }

    #[test]
    fn walk_based_companions_match_chain_based() {
        let m = square_torus(2, 2, 0.5).unwrap();
        let dc = &m.complex;
        let h = &m.basis_hint.as_ref().unwrap()[0];
        let w = &cycle_to_walks(dc, h).unwrap()[0];
        let again = Walk::from_steps(dc, w.vertices[0], w.steps.clone()).unwrap();
        assert_eq!(again.chain(), *h);
    }
}
