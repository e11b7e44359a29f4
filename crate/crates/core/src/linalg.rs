//! Dense exact linear algebra: rational rank and integer lattice bases.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exact::{Exponent, Polynomial, Rational};

/// Rank of a rational matrix by fraction-exact Gaussian elimination.
pub fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            if row[col].is_zero() {
                continue;
            }
            let factor = &row[col] / &pivot_row[col];
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                *x -= &factor * p;
            }
        }
        rank += 1;
    }
    rank
}

/// Coefficient matrix of a list of polynomials, one row each, columns
/// indexed by the union of their exponents.
pub fn coefficient_matrix(polys: &[Polynomial]) -> Vec<Vec<Rational>> {
    let support: BTreeSet<&Exponent> = polys.iter().flat_map(|p| p.exponents()).collect();
    polys
        .iter()
        .map(|p| support.iter().map(|e| p.coeff(e)).collect())
        .collect()
}

pub fn polynomial_rank(polys: &[Polynomial]) -> usize {
    rank(coefficient_matrix(polys))
}

/// Row-style Hermite normal form of the lattice spanned by integer vectors.
/// Returns the nonzero rows; pivots are positive and entries above each
/// pivot are reduced into `[0, pivot)`.
pub fn hermite_normal_form(vectors: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let Some(n) = vectors.first().map(Vec::len) else {
        return Vec::new();
    };
    let mut rows: Vec<Vec<BigInt>> = vectors.to_vec();
    let mut out: Vec<Vec<BigInt>> = Vec::new();
    for col in 0..n {
        loop {
            // Euclid on column `col` across the remaining rows.
            let mut nonzero: Vec<usize> = (0..rows.len()).filter(|&r| !rows[r][col].is_zero()).collect();
            if nonzero.is_empty() {
                break;
            }
            nonzero.sort_by(|&a, &b| rows[a][col].abs().cmp(&rows[b][col].abs()));
            let p = nonzero[0];
            if nonzero.len() == 1 {
                let mut pivot = rows.swap_remove(p);
                if pivot[col].is_negative() {
                    pivot.iter_mut().for_each(|x| *x = -x.clone());
                }
                out.push(pivot);
                break;
            }
            let pivot = rows[p].clone();
            for &r in &nonzero[1..] {
                let q = rows[r][col].div_floor(&pivot[col]);
                for c in col..n {
                    let delta = &q * &pivot[c];
                    rows[r][c] -= delta;
                }
            }
        }
    }
    for i in 0..out.len() {
        let (above, rest) = out.split_at_mut(i);
        let row = &rest[0];
        let col = row.iter().position(|x| !x.is_zero()).expect("nonzero row");
        let pivot = &row[col];
        for other in above.iter_mut() {
            let q = other[col].div_floor(pivot);
            if !q.is_zero() {
                for (x, y) in other.iter_mut().zip(row).skip(col).take(n - col) {
                    *x -= &q * y;
                }
            }
        }
    }
    out
}

/// Lattice index data of the subgroup generated by `vectors` in `Z^n`:
/// `(rank, index)` where `index` is `|Z^n / L|` when the rank is full.
pub fn lattice_rank_and_index(vectors: &[Vec<BigInt>]) -> (usize, Option<BigInt>) {
    let Some(n) = vectors.first().map(Vec::len) else {
        return (0, None);
    };
    let hnf = hermite_normal_form(vectors);
    if hnf.len() < n {
        return (hnf.len(), None);
    }
    let det = hnf
        .iter()
        .enumerate()
        .fold(BigInt::one(), |acc, (i, row)| acc * &row[i]);
    (n, Some(det.abs()))
}

/// Whether the integer vectors generate `Z^n` as a group.
pub fn generates_full_lattice(vectors: &[Vec<BigInt>], n: usize) -> bool {
    if n == 0 {
        return true;
    }
    if vectors.is_empty() {
        return false;
    }
    matches!(lattice_rank_and_index(vectors), (r, Some(idx)) if r == n && idx.is_one())
}

/// Pairwise differences `s - s0` of a point set, as integer vectors.
pub fn differences(points: &BTreeSet<Exponent>) -> Vec<Vec<BigInt>> {
    let mut iter = points.iter();
    let Some(base) = iter.next() else {
        return Vec::new();
    };
    iter.map(|p| (p - base).entries().iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn rank_small() {
        let m = vec![vec![int(1), int(2)], vec![int(2), int(4)], vec![int(0), int(1)]];
        assert_eq!(rank(m), 2);
        assert_eq!(rank(Vec::new()), 0);
    }

    #[test]
    fn hnf_of_two_three() {
        let hnf = hermite_normal_form(&[big(&[2]), big(&[3])]);
        assert_eq!(hnf, vec![big(&[1])]);
        assert!(generates_full_lattice(&[big(&[2]), big(&[3])], 1));
        assert!(!generates_full_lattice(&[big(&[2]), big(&[4])], 1));
    }

    #[test]
    fn index_in_plane() {
        let (r, idx) = lattice_rank_and_index(&[big(&[2, 0]), big(&[0, 1]), big(&[4, 3])]);
        assert_eq!(r, 2);
        assert_eq!(idx, Some(BigInt::from(2)));
        assert_eq!(lattice_rank_and_index(&[big(&[1, 1]), big(&[2, 2])]).0, 1);
        assert!(generates_full_lattice(&[big(&[1, 0]), big(&[0, 1]), big(&[1, 1])], 2));
    }

    #[test]
    fn hnf_reduced_above_pivot() {
        let hnf = hermite_normal_form(&[big(&[3, 5]), big(&[0, 2])]);
        assert_eq!(hnf, vec![big(&[3, 1]), big(&[0, 2])]);
    }
}
