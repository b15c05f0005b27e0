//! Young diagrams for the change of base point of discrete powers.
//!
//! A diagram codes the pointwise product (Z^{k₁})^{ℓ₁}(Z^{k₂})^{ℓ₂}… column by
//! column: it has ℓ_j columns of height k_j.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::powers::powers;
use super::CriticalMap;
use crate::complex::{Carrier, Cochain};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YoungDiagram {
    /// Column heights, non-increasing.
    columns: Vec<usize>,
}

impl YoungDiagram {
    pub fn from_columns(heights: &[usize]) -> Result<Self> {
        if heights.contains(&0) {
            return Err(Error::Invalid("column heights must be positive".into()));
        }
        let mut columns = heights.to_vec();
        columns.sort_unstable_by(|a, b| b.cmp(a));
        Ok(YoungDiagram { columns })
    }

    /// Builds a diagram from its row lengths, top row first.
    pub fn from_rows(rows: &[usize]) -> Result<Self> {
        Self::from_columns(&conjugate(rows))
    }

    pub fn columns(&self) -> &[usize] {
        &self.columns
    }

    pub fn rows(&self) -> Vec<usize> {
        conjugate(&self.columns)
    }

    /// Pairs (k_j, ℓ_j) with k₁ > k₂ > ….
    pub fn parts(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &c in &self.columns {
            match out.last_mut() {
                Some((k, l)) if *k == c => *l += 1,
                _ => out.push((c, 1)),
            }
        }
        out
    }

    /// Total degree k = Σ k_j ℓ_j.
    pub fn degree(&self) -> usize {
        self.columns.iter().sum()
    }

    /// Number of factors ℓ = Σ ℓ_j.
    pub fn length(&self) -> usize {
        self.columns.len()
    }

    /// c(Y) = (−1)^{k+ℓ} k!/Π(k_j!)^{ℓ_j} · ℓ!/Πℓ_j!.
    pub fn coefficient(&self) -> i128 {
        let (k, l) = (self.degree(), self.length());
        let mut c = factorial(k) * factorial(l);
        for (kj, lj) in self.parts() {
            c /= factorial(kj).pow(lj as u32) * factorial(lj);
        }
        if (k + l) % 2 == 1 {
            -c
        } else {
            c
        }
    }

    /// The monomial at a point where `zb[k] = Z^k(b)`.
    pub fn evaluate(&self, zb: &[Complex64]) -> Complex64 {
        self.columns.iter().map(|&c| zb[c]).product()
    }
}

impl fmt::Display for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.rows().iter().map(|r| r.to_string()).collect();
        write!(f, "[{}]", rows.join(","))
    }
}

fn conjugate(parts: &[usize]) -> Vec<usize> {
    let max = parts.iter().copied().max().unwrap_or(0);
    (1..=max).map(|i| parts.iter().filter(|&&p| p >= i).count()).collect()
}

fn factorial(n: usize) -> i128 {
    (1..=n as i128).product()
}

fn binomial(n: usize, k: usize) -> i128 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// All diagrams of a given degree, i.e. the partitions of `degree`.
pub fn diagrams(degree: usize) -> Vec<YoungDiagram> {
    fn go(rest: usize, max: usize, acc: &mut Vec<usize>, out: &mut Vec<YoungDiagram>) {
        if rest == 0 {
            out.push(YoungDiagram { columns: acc.clone() });
            return;
        }
        for c in (1..=max.min(rest)).rev() {
            acc.push(c);
            go(rest - c, c, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(degree, degree, &mut Vec::new(), &mut out);
    out
}

/// B^j = Σ_Y c(Y) Y over diagrams of degree j.
pub fn b_expansion(j: usize) -> Vec<(YoungDiagram, i128)> {
    diagrams(j).into_iter().map(|y| {
        let c = y.coefficient();
        (y, c)
    }).collect()
}

/// B^j expanded symbolically from B^0 = 1 and
/// B^k = Σ_{j<k} C(k,j)(−1)^{k+j+1} Z^{k−j} B^j.
pub fn b_recursive(jmax: usize) -> Vec<BTreeMap<YoungDiagram, i128>> {
    let mut out: Vec<BTreeMap<YoungDiagram, i128>> = vec![BTreeMap::from([(
        YoungDiagram { columns: Vec::new() },
        1,
    )])];
    for k in 1..=jmax {
        let mut bk = BTreeMap::new();
        for (j, bj) in out.iter().enumerate() {
            let sign = if (k + j + 1) % 2 == 0 { 1 } else { -1 };
            let factor = sign * binomial(k, j);
            for (y, c) in bj {
                let mut cols = y.columns.clone();
                cols.push(k - j);
                let y2 = YoungDiagram::from_columns(&cols).expect("positive heights");
                *bk.entry(y2).or_insert(0) += factor * c;
            }
        }
        bk.retain(|_, c| *c != 0);
        out.push(bk);
    }
    out
}

/// B^0(b), …, B^jmax(b) by the numeric recursion.
pub fn b_values_recursive(zb: &[Complex64], jmax: usize) -> Vec<Complex64> {
    let mut b = vec![Complex64::new(1.0, 0.0)];
    for k in 1..=jmax {
        let mut s = Complex64::new(0.0, 0.0);
        for j in 0..k {
            let sign = if (k + j + 1) % 2 == 0 { 1.0 } else { -1.0 };
            s += zb[k - j] * b[j] * (sign * binomial(k, j) as f64);
        }
        b.push(s);
    }
    b
}

/// B^0(b), …, B^jmax(b) as sums over Young diagrams.
pub fn b_values_young(zb: &[Complex64], jmax: usize) -> Vec<Complex64> {
    (0..=jmax)
        .map(|j| b_expansion(j).iter().map(|(y, c)| y.evaluate(zb) * *c as f64).sum())
        .collect()
}

/// Which route evaluates B^j(b).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BRoute {
    Recursion,
    Young,
}

/// ζ^k for ζ = a(Z − b): a^k Σ_j C(k,j)(−1)^j Z^{k−j} B^j(b).
pub fn translated_powers(
    m: &CriticalMap,
    a: Complex64,
    b: usize,
    k: usize,
    route: BRoute,
) -> Result<Cochain> {
    let p = powers(m, k)?;
    let zb: Vec<Complex64> = p.values.iter().map(|z| z.values[b]).collect();
    let bj = match route {
        BRoute::Recursion => b_values_recursive(&zb, k),
        BRoute::Young => b_values_young(&zb, k),
    };
    let mut out = Cochain::zeros(Carrier::Lambda, 0, m.complex.vertex_count());
    for (j, bjv) in bj.iter().enumerate() {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        out.axpy(*bjv * sign * binomial(k, j) as f64, &p.values[k - j]);
    }
    Ok(out.scale(a.powu(k as u32)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::powers::power;
    use crate::critical::{square_patch, tri_sextant, TriHexParams};

    fn row(rows: &[usize]) -> YoungDiagram {
        YoungDiagram::from_rows(rows).unwrap()
    }

    /// The rows B^0 … B^6 as (row lengths, coefficient).
    fn table() -> Vec<Vec<(Vec<usize>, i128)>> {
        vec![
            vec![(vec![], 1)],
            vec![(vec![1], 1)],
            vec![(vec![1, 1], -1), (vec![2], 2)],
            vec![(vec![1, 1, 1], 1), (vec![2, 1], -6), (vec![3], 6)],
            vec![(vec![1, 1, 1, 1], -1), (vec![2, 1, 1], 8), (vec![2, 2], 6), (vec![3, 1], -36), (vec![4], 24)],
            vec![
                (vec![1, 1, 1, 1, 1], 1),
                (vec![2, 1, 1, 1], -10),
                (vec![2, 2, 1], -20),
                (vec![3, 1, 1], 60),
                (vec![3, 2], 90),
                (vec![4, 1], -240),
                (vec![5], 120),
            ],
            vec![
                (vec![1, 1, 1, 1, 1, 1], -1),
                (vec![2, 1, 1, 1, 1], 12),
                (vec![2, 2, 1, 1], 30),
                (vec![3, 1, 1, 1], -90),
                (vec![2, 2, 2], 20),
                (vec![3, 2, 1], -360),
                (vec![4, 1, 1], 480),
                (vec![3, 3], -90),
                (vec![4, 2], 1080),
                (vec![5, 1], -1800),
                (vec![6], 720),
            ],
        ]
    }

    #[test]
    fn rows_and_columns() {
        let y = row(&[7, 6, 2]);
        assert_eq!(y.parts(), vec![(3, 2), (2, 4), (1, 1)]);
        assert_eq!(y.degree(), 15);
        assert_eq!(y.rows(), vec![7, 6, 2]);
        assert_eq!(y.to_string(), "[7,6,2]");
    }

    #[test]
    fn worked_coefficients() {
        for n in 1..=8usize {
            let nf: i128 = (1..=n as i128).product();
            assert_eq!(row(&[n]).coefficient(), nf);
            let sign = if n % 2 == 1 { 1 } else { -1 };
            assert_eq!(YoungDiagram::from_columns(&[n]).unwrap().coefficient(), sign);
            // A column of n with one extra box in the first row.
            if n >= 2 {
                let y = YoungDiagram::from_columns(&[n, 1]).unwrap();
                assert_eq!(y.coefficient(), sign * 2 * (n as i128 + 1));
            }
            // A row of n with one box below the first.
            if n >= 2 {
                assert_eq!(row(&[n, 1]).coefficient(), -(nf * (n as i128 + 1)) * n as i128 / 2);
            }
        }
    }

    #[test]
    fn table_rows_reproduced() {
        for (j, expected) in table().into_iter().enumerate() {
            let got: BTreeMap<YoungDiagram, i128> = b_expansion(j).into_iter().collect();
            let want: BTreeMap<YoungDiagram, i128> =
                expected.iter().map(|(r, c)| (row(r), *c)).collect();
            assert_eq!(got, want, "degree {j}");
        }
    }

    #[test]
    fn recursion_agrees_with_coefficient_formula() {
        let rec = b_recursive(10);
        for (j, bj) in rec.iter().enumerate() {
            let formula: BTreeMap<YoungDiagram, i128> = b_expansion(j).into_iter().collect();
            assert_eq!(bj, &formula, "degree {j}");
        }
    }

    #[test]
    fn coefficients_sum_to_one() {
        for j in 1..=8 {
            assert_eq!(b_expansion(j).iter().map(|(_, c)| c).sum::<i128>(), 1);
        }
    }

    #[test]
    fn translated_powers_match_the_rebased_map() {
        let m = tri_sextant(TriHexParams::from_angles(1.0, 1.1, std::f64::consts::PI - 2.1), 4).unwrap();
        let pos = m.positions.as_ref().unwrap();
        let a = Complex64::new(0.7, 0.4);
        for b in [m.origin, 3, 11] {
            let moved: Vec<Complex64> = pos.iter().map(|p| a * (p - pos[b])).collect();
            let zeta = CriticalMap::from_positions(moved, m.complex.quads(), b).unwrap();
            for k in 0..=8 {
                let direct = power(&zeta, k).unwrap();
                let scale = direct.max_norm().max(1.0);
                let r = translated_powers(&m, a, b, k, BRoute::Recursion).unwrap();
                let y = translated_powers(&m, a, b, k, BRoute::Young).unwrap();
                assert!(r.max_diff(&y) <= 1e-10 * scale, "k={k}");
                assert!(r.max_diff(&direct) <= 1e-9 * scale, "k={k} b={b}: {}", r.max_diff(&direct));
            }
        }
    }

    #[test]
    fn trivial_translation() {
        let m = square_patch(2, 0.8).unwrap();
        for k in 0..=5 {
            let t = translated_powers(&m, Complex64::new(1.0, 0.0), m.origin, k, BRoute::Young).unwrap();
            assert!(t.max_diff(&power(&m, k).unwrap()) < 1e-12);
        }
    }
}
