use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::polytope::{Halfspace, RationalPolytope};
use crate::exact::{primitive_integer, Rational};
use crate::{Error, Result};

pub(crate) type Point = Vec<Rational>;

fn sub(a: &[Rational], b: &[Rational]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn dot_int(normal: &[BigInt], x: &[Rational]) -> Rational {
    normal
        .iter()
        .zip(x)
        .map(|(a, b)| Rational::from_integer(a.clone()) * b)
        .sum()
}

/// Reduced row echelon form; returns the nonzero rows and pivot columns.
pub(crate) fn rref(mut rows: Vec<Point>) -> (Vec<Point>, Vec<usize>) {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Basis of `{y : row . y = 0 for all rows}` in canonical form: the RREF of
/// the null space, each vector scaled to a primitive integer vector whose
/// first nonzero entry is positive.
pub(crate) fn null_space(rows: &[Point], n: usize) -> Vec<Vec<BigInt>> {
    let (r, pivots) = rref(rows.to_vec());
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut basis: Vec<Point> = free
        .iter()
        .map(|&f| {
            let mut y = vec![Rational::zero(); n];
            y[f] = Rational::from_integer(1.into());
            for (row, &pc) in r.iter().zip(&pivots) {
                y[pc] = -row[f].clone();
            }
            y
        })
        .collect();
    if !basis.is_empty() {
        basis = rref(basis).0;
    }
    basis.iter().map(|y| canonical_sign(primitive_integer(y))).collect()
}

pub(crate) fn canonical_sign(v: Vec<BigInt>) -> Vec<BigInt> {
    match v.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => v.into_iter().map(|x| -x).collect(),
        _ => v,
    }
}

fn cross2(o: &[Rational], a: &[Rational], b: &[Rational]) -> Rational {
    (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
}

fn cross3(a: &[Rational], b: &[Rational]) -> Point {
    vec![
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn halfspace(normal_rat: &[Rational], through: &[Rational]) -> Halfspace {
    let normal = primitive_integer(normal_rat);
    let offset = dot_int(&normal, through);
    Halfspace { normal, offset }
}

/// Convex hull of a point set inside `Q^k` for `k <= 3`, full-dimensional
/// in the projected coordinates. Returns extreme point indices and facets.
fn full_hull(points: &[Point], k: usize) -> (Vec<usize>, Vec<Halfspace>) {
    match k {
        0 => (vec![0], Vec::new()),
        1 => {
            let lo = (0..points.len()).min_by(|&a, &b| points[a][0].cmp(&points[b][0])).unwrap();
            let hi = (0..points.len()).max_by(|&a, &b| points[a][0].cmp(&points[b][0])).unwrap();
            let one = Rational::from_integer(1.into());
            let facets = vec![
                halfspace(&[-one.clone()], &points[lo]),
                halfspace(&[one], &points[hi]),
            ];
            (vec![lo, hi], facets)
        }
        2 => hull_2d(points),
        _ => hull_3d(points),
    }
}

/// Andrew's monotone chain; returns vertices counter-clockwise starting at
/// the lex-smallest point, collinear points dropped.
fn hull_2d(points: &[Point]) -> (Vec<usize>, Vec<Halfspace>) {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| points[a].cmp(&points[b]));
    let mut chain: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for pass in 0..2 {
        let start = chain.len();
        let iter: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(idx.iter())
        } else {
            Box::new(idx.iter().rev())
        };
        for &i in iter {
            while chain.len() >= start + 2 {
                let o = &points[chain[chain.len() - 2]];
                let a = &points[chain[chain.len() - 1]];
                if cross2(o, a, &points[i]).is_positive() {
                    break;
                }
                chain.pop();
            }
            chain.push(i);
        }
        chain.pop();
    }
    let facets = (0..chain.len())
        .map(|i| {
            let a = &points[chain[i]];
            let b = &points[chain[(i + 1) % chain.len()]];
            let d = sub(b, a);
            halfspace(&[d[1].clone(), -d[0].clone()], a)
        })
        .collect();
    (chain, facets)
}

/// Exact 3-d hull by facet enumeration over point triples. Quartic in the
/// number of points, which is fine at the sizes handled here.
fn hull_3d(points: &[Point]) -> (Vec<usize>, Vec<Halfspace>) {
    let n = points.len();
    let mut facets: BTreeSet<Halfspace> = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let normal = cross3(&sub(&points[j], &points[i]), &sub(&points[k], &points[i]));
                if normal.iter().all(Zero::is_zero) {
                    continue;
                }
                let h = halfspace(&normal, &points[i]);
                let mut above = false;
                let mut below = false;
                for p in points {
                    let s = dot_int(&h.normal, p) - &h.offset;
                    above |= s.is_positive();
                    below |= s.is_negative();
                    if above && below {
                        break;
                    }
                }
                match (above, below) {
                    (false, _) => {
                        facets.insert(h);
                    }
                    (true, false) => {
                        facets.insert(Halfspace {
                            normal: h.normal.iter().map(|x| -x).collect(),
                            offset: -h.offset,
                        });
                    }
                    _ => {}
                }
            }
        }
    }
    let facets: Vec<Halfspace> = facets.into_iter().collect();
    let vertices = (0..n)
        .filter(|&i| {
            let tight: Vec<Point> = facets
                .iter()
                .filter(|h| dot_int(&h.normal, &points[i]) == h.offset)
                .map(|h| h.normal.iter().map(|x| Rational::from_integer(x.clone())).collect())
                .collect();
            rref(tight).1.len() == 3
        })
        .collect();
    (vertices, facets)
}

/// Exact convex hull of rational points in dimension at most 3.
///
/// Lower-dimensional point sets are handled by working in a coordinate
/// projection of their affine hull: the equalities cut out the affine hull
/// and the facet inequalities only involve the projected coordinates.
pub fn hull(points: &[Point]) -> Result<RationalPolytope> {
    let Some(first) = points.first() else {
        return Err(Error::Input("hull of an empty point set".into()));
    };
    let n = first.len();
    if n > 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    if points.iter().any(|p| p.len() != n) {
        return Err(Error::Input("points of mixed dimension".into()));
    }
    let unique: Vec<Point> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let base = unique[0].clone();
    let directions: Vec<Point> = unique[1..].iter().map(|p| sub(p, &base)).collect();
    let (_, coords) = rref(directions.clone());
    let k = coords.len();

    let equalities: Vec<Halfspace> = if k == n {
        Vec::new()
    } else {
        let dirs = if directions.is_empty() {
            vec![vec![Rational::zero(); n]]
        } else {
            directions
        };
        null_space(&dirs, n)
            .into_iter()
            .map(|normal| {
                let offset = dot_int(&normal, &base);
                Halfspace { normal, offset }
            })
            .collect()
    };

    let projected: Vec<Point> = unique
        .iter()
        .map(|p| coords.iter().map(|&c| p[c].clone()).collect())
        .collect();
    let (vertex_idx, proj_facets) = full_hull(&projected, k);
    let mut facets: Vec<Halfspace> = proj_facets
        .into_iter()
        .map(|h| {
            let mut normal = vec![BigInt::zero(); n];
            for (slot, &c) in coords.iter().enumerate() {
                normal[c] = h.normal[slot].clone();
            }
            Halfspace { normal, offset: h.offset }
        })
        .collect();
    facets.sort();
    let mut vertices: Vec<Point> = vertex_idx.iter().map(|&i| unique[i].clone()).collect();
    if k != 2 {
        vertices.sort();
    }
    Ok(RationalPolytope::from_parts(n, vertices, facets, equalities))
}
