use num_traits::ToPrimitive;

use crate::body::RationalPolytope;
use crate::exact::to_f64;
use crate::quant::compensated_sum;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub point: Vec<f64>,
    /// Measure of the grid cell clipped to the polytope.
    pub weight: f64,
}

/// Midpoint rule on a uniform grid of cubes of side `1 / resolution`,
/// clipped to a full-dimensional polytope. Each node sits at the centroid
/// of its clipped cell. Nodes are ordered row-major by cell index.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    polytope: RationalPolytope,
    resolution: u32,
    nodes: Vec<Node>,
    volume: f64,
}

/// Integer form of `normal . c / r <= offset` for lattice corners `c`.
struct IntFacet {
    normal: Vec<i128>,
    numer: i128,
    denom: i128,
}

impl IntFacet {
    fn slack(&self, corner: &[i64], r: i128) -> i128 {
        let dot: i128 = self.normal.iter().zip(corner).map(|(a, &c)| a * c as i128).sum();
        self.numer * r - self.denom * dot
    }
}

type Plane = (Vec<f64>, f64);

impl QuadratureGrid {
    pub fn new(polytope: &RationalPolytope, resolution: u32) -> Result<Self> {
        let n = polytope.ambient_dim();
        if resolution == 0 {
            return Err(Error::Config("resolution must be positive".into()));
        }
        if !(1..=3).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        if !polytope.is_full_dimensional() {
            return Err(Error::Domain(format!(
                "quadrature needs a full-dimensional polytope, got {} with affine dimension {}",
                polytope.summary(),
                polytope.affine_dim()
            )));
        }
        let overflow = || Error::Config("polytope coordinates too large for the quadrature grid".into());
        let facets: Vec<IntFacet> = polytope
            .facets()
            .iter()
            .map(|h| {
                Some(IntFacet {
                    normal: h.normal.iter().map(|x| x.to_i128()).collect::<Option<_>>()?,
                    numer: h.offset.numer().to_i128()?,
                    denom: h.offset.denom().to_i128()?,
                })
            })
            .collect::<Option<_>>()
            .ok_or_else(overflow)?;
        let planes = polytope.facets_f64();
        let r = resolution as i64;
        let bbox = polytope.bounding_box()?;
        let lo: Vec<i64> = bbox.iter().map(|b| b.0 * r).collect();
        let counts: Vec<i64> = bbox.iter().map(|b| (b.1 - b.0) * r).collect();
        let h = 1.0 / resolution as f64;

        let total: i64 = counts.iter().product();
        let mut nodes = Vec::new();
        let mut corner = vec![0i64; n];
        for flat in 0..total {
            let mut rest = flat;
            let mut index = vec![0i64; n];
            for axis in (0..n).rev() {
                index[axis] = lo[axis] + rest % counts[axis];
                rest /= counts[axis];
            }
            let mut inside_all = true;
            let mut outside = false;
            for f in &facets {
                let mut any_in = false;
                let mut all_in = true;
                for mask in 0..(1u32 << n) {
                    for (axis, c) in corner.iter_mut().enumerate() {
                        *c = index[axis] + ((mask >> axis) & 1) as i64;
                    }
                    match f.slack(&corner, r as i128).signum() {
                        1 => any_in = true,
                        -1 => all_in = false,
                        _ => {}
                    }
                }
                if !any_in {
                    outside = true;
                    break;
                }
                inside_all &= all_in;
            }
            if outside {
                continue;
            }
            let cell_lo: Vec<f64> = index.iter().map(|&i| i as f64 * h).collect();
            let cell_hi: Vec<f64> = index.iter().map(|&i| (i + 1) as f64 * h).collect();
            let node = if inside_all {
                Node {
                    point: index.iter().map(|&i| (i as f64 + 0.5) * h).collect(),
                    weight: h.powi(n as i32),
                }
            } else {
                match clip_box(&cell_lo, &cell_hi, &planes) {
                    Some((weight, point)) if weight > 0.0 => Node { point, weight },
                    _ => continue,
                }
            };
            nodes.push(node);
        }
        let volume = match polytope.volume() {
            Some(v) => to_f64(&v),
            None => {
                let lo: Vec<f64> = bbox.iter().map(|b| b.0 as f64).collect();
                let hi: Vec<f64> = bbox.iter().map(|b| b.1 as f64).collect();
                clip_box(&lo, &hi, &planes).map_or(0.0, |c| c.0)
            }
        };
        let grid = QuadratureGrid {
            polytope: polytope.clone(),
            resolution,
            nodes,
            volume,
        };
        let measured = grid.total_measure();
        if (measured - volume).abs() > 1e-12 * volume.max(f64::MIN_POSITIVE) {
            return Err(Error::Domain(format!(
                "quadrature measure {measured} does not match the volume {volume}"
            )));
        }
        Ok(grid)
    }

    pub fn polytope(&self) -> &RationalPolytope {
        &self.polytope
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.polytope.ambient_dim()
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn total_measure(&self) -> f64 {
        compensated_sum(self.nodes.iter().map(|n| n.weight))
    }
}

/// Measure and centroid of a box intersected with `a . x <= b` planes.
fn clip_box(lo: &[f64], hi: &[f64], planes: &[Plane]) -> Option<(f64, Vec<f64>)> {
    match lo.len() {
        1 => {
            let (mut a, mut b) = (lo[0], hi[0]);
            for (n, off) in planes {
                if n[0] > 0.0 {
                    b = b.min(off / n[0]);
                } else if n[0] < 0.0 {
                    a = a.max(off / n[0]);
                }
            }
            (b > a).then(|| (b - a, vec![0.5 * (a + b)]))
        }
        2 => {
            let poly = clip_polygon(rectangle(lo, hi), planes.iter().map(|(n, b)| ([n[0], n[1]], *b)));
            polygon_moments(&poly).filter(|m| m.0 > 0.0).map(|(a, cx, cy)| (a, vec![cx, cy]))
        }
        _ => clip_box_3d(lo, hi, planes),
    }
}

fn rectangle(lo: &[f64], hi: &[f64]) -> Vec<[f64; 2]> {
    vec![[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]]
}

/// Sutherland-Hodgman clipping of a convex polygon.
fn clip_polygon(mut poly: Vec<[f64; 2]>, planes: impl Iterator<Item = ([f64; 2], f64)>) -> Vec<[f64; 2]> {
    for (n, b) in planes {
        if poly.is_empty() {
            break;
        }
        let side = |p: &[f64; 2]| b - n[0] * p[0] - n[1] * p[1];
        let mut out = Vec::with_capacity(poly.len() + 1);
        for i in 0..poly.len() {
            let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
            let (sp, sq) = (side(&p), side(&q));
            if sp >= 0.0 {
                out.push(p);
            }
            if (sp > 0.0 && sq < 0.0) || (sp < 0.0 && sq > 0.0) {
                let t = sp / (sp - sq);
                out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            }
        }
        poly = out;
    }
    poly
}

/// Area and centroid by the shoelace formula.
fn polygon_moments(poly: &[[f64; 2]]) -> Option<(f64, f64, f64)> {
    if poly.len() < 3 {
        return None;
    }
    let (mut a2, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        let cross = p[0] * q[1] - q[0] * p[1];
        a2 += cross;
        cx += (p[0] + q[0]) * cross;
        cy += (p[1] + q[1]) * cross;
    }
    if a2 <= 0.0 {
        return None;
    }
    Some((a2 / 2.0, cx / (3.0 * a2), cy / (3.0 * a2)))
}

/// Slices along the last axis. Between consecutive vertex heights the
/// section area is quadratic and its first moments cubic, so Simpson's
/// rule on each piece is exact.
fn clip_box_3d(lo: &[f64], hi: &[f64], planes: &[Plane]) -> Option<(f64, Vec<f64>)> {
    let mut all: Vec<Plane> = planes.to_vec();
    for axis in 0..3 {
        let mut e = vec![0.0; 3];
        e[axis] = 1.0;
        all.push((e.clone(), hi[axis]));
        e[axis] = -1.0;
        all.push((e, -lo[axis]));
    }
    let scale = hi.iter().zip(lo).map(|(a, b)| (a - b).abs()).fold(1.0, f64::max);
    let tol = 1e-12 * scale;
    let mut heights = vec![lo[2], hi[2]];
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            for k in j + 1..all.len() {
                if let Some(x) = solve3(&all[i], &all[j], &all[k]) {
                    if all.iter().all(|(n, b)| n[0] * x[0] + n[1] * x[1] + n[2] * x[2] <= b + tol) {
                        heights.push(x[2]);
                    }
                }
            }
        }
    }
    heights.sort_by(f64::total_cmp);
    heights.dedup_by(|a, b| (*a - *b).abs() <= tol);
    let section = |z: f64| {
        let poly = clip_polygon(
            rectangle(lo, hi),
            planes.iter().map(|(n, b)| ([n[0], n[1]], b - n[2] * z)),
        );
        polygon_moments(&poly).map_or([0.0; 4], |(a, cx, cy)| [a, a * cx, a * cy, a * z])
    };
    let mut acc = [0.0f64; 4];
    for w in heights.windows(2) {
        let (za, zb) = (w[0], w[1]);
        if zb - za <= tol {
            continue;
        }
        let (fa, fm, fb) = (section(za), section(0.5 * (za + zb)), section(zb));
        for c in 0..4 {
            acc[c] += (zb - za) / 6.0 * (fa[c] + 4.0 * fm[c] + fb[c]);
        }
    }
    (acc[0] > 0.0).then(|| (acc[0], vec![acc[1] / acc[0], acc[2] / acc[0], acc[3] / acc[0]]))
}

fn solve3(a: &Plane, b: &Plane, c: &Plane) -> Option<[f64; 3]> {
    let m = [&a.0, &b.0, &c.0];
    let rhs = [a.1, b.1, c.1];
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let base = [[m[0][0], m[0][1], m[0][2]], [m[1][0], m[1][1], m[1][2]], [m[2][0], m[2][1], m[2][2]]];
    let d = det(base);
    if d.abs() < 1e-12 {
        return None;
    }
    let mut x = [0.0; 3];
    for (col, xi) in x.iter_mut().enumerate() {
        let mut mm = base;
        for row in 0..3 {
            mm[row][col] = rhs[row];
        }
        *xi = det(mm) / d;
    }
    Some(x)
}
