use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::hull::{dot_int, hull, null_space, rref, Point};
use crate::exact::{int, parse_rational, ratio_literal, to_f64, Rational};
use crate::{Error, Result};

/// `normal . x <= offset` (or `=` when used as an equality), with `normal`
/// a primitive integer vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Halfspace {
    pub normal: Vec<BigInt>,
    pub offset: Rational,
}

impl Halfspace {
    /// `offset - normal . x`; nonnegative on the feasible side.
    pub fn slack(&self, x: &[Rational]) -> Rational {
        &self.offset - dot_int(&self.normal, x)
    }

    fn scaled(&self, d: &Rational) -> Halfspace {
        Halfspace {
            normal: self.normal.clone(),
            offset: &self.offset * d,
        }
    }
}

/// Exact polytope with both a vertex and a halfspace description.
///
/// Facets are inequalities `normal . x <= offset` with primitive normals.
/// When the polytope is not full-dimensional, `equalities` cut out its
/// affine hull; their normals are additionally sign-normalized (first
/// nonzero entry positive) and the facets then describe the polytope
/// relative to that affine hull.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPolytope {
    n: usize,
    vertices: Vec<Point>,
    facets: Vec<Halfspace>,
    equalities: Vec<Halfspace>,
}

impl RationalPolytope {
    pub(crate) fn from_parts(
        n: usize,
        vertices: Vec<Point>,
        facets: Vec<Halfspace>,
        equalities: Vec<Halfspace>,
    ) -> Self {
        RationalPolytope {
            n,
            vertices,
            facets,
            equalities,
        }
    }

    /// Builds the polytope cut out by halfspaces and equalities in
    /// dimension `n <= 3`. Errors when the region is empty or unbounded.
    pub fn from_h_rep(n: usize, facets: Vec<Halfspace>, equalities: Vec<Halfspace>) -> Result<Self> {
        if n > 3 {
            return Err(Error::UnsupportedDimension(n));
        }
        for h in facets.iter().chain(&equalities) {
            if h.normal.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: h.normal.len(),
                });
            }
        }
        let rows: Vec<Point> = facets
            .iter()
            .chain(&equalities)
            .map(|h| h.normal.iter().map(|x| Rational::from_integer(x.clone())).collect())
            .collect();
        if !recession_cone_trivial(&facets, &equalities, &rows, n) {
            return Err(Error::Unbounded);
        }
        // Vertices: feasible solutions of n linearly independent tight rows.
        let all: Vec<&Halfspace> = facets.iter().chain(&equalities).collect();
        let mut vertices: Vec<Point> = Vec::new();
        for subset in subsets(all.len(), n) {
            let system: Vec<Point> = subset
                .iter()
                .map(|&i| {
                    let mut row: Point = all[i].normal.iter().map(|x| Rational::from_integer(x.clone())).collect();
                    row.push(all[i].offset.clone());
                    row
                })
                .collect();
            let (r, pivots) = rref(system);
            if pivots.len() != n || pivots.contains(&n) {
                continue;
            }
            let x: Point = r.iter().map(|row| row[n].clone()).collect();
            let feasible = facets.iter().all(|h| !h.slack(&x).is_negative())
                && equalities.iter().all(|h| h.slack(&x).is_zero());
            if feasible {
                vertices.push(x);
            }
        }
        if n == 0 {
            vertices.push(Vec::new());
        }
        if vertices.is_empty() {
            return Err(Error::Input("the halfspaces describe an empty region".into()));
        }
        hull(&vertices)
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    pub fn equalities(&self) -> &[Halfspace] {
        &self.equalities
    }

    pub fn affine_dim(&self) -> usize {
        self.n - self.equalities.len()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.equalities.is_empty()
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.n
            && self.equalities.iter().all(|h| h.slack(x).is_zero())
            && self.facets.iter().all(|h| !h.slack(x).is_negative())
    }

    /// Strictly inside every facet (the relative interior).
    pub fn in_relative_interior(&self, x: &[Rational]) -> bool {
        x.len() == self.n
            && self.equalities.iter().all(|h| h.slack(x).is_zero())
            && self.facets.iter().all(|h| h.slack(x).is_positive())
    }

    pub fn contains_polytope(&self, other: &RationalPolytope) -> bool {
        other.vertices.iter().all(|v| self.contains(v))
    }

    /// The dilation `d * P`.
    pub fn scaled(&self, d: &Rational) -> RationalPolytope {
        RationalPolytope {
            n: self.n,
            vertices: self
                .vertices
                .iter()
                .map(|v| v.iter().map(|x| x * d).collect())
                .collect(),
            facets: self.facets.iter().map(|h| h.scaled(d)).collect(),
            equalities: self.equalities.iter().map(|h| h.scaled(d)).collect(),
        }
    }

    /// Length, area (shoelace) or 0 for a point, in the ambient dimension;
    /// `None` when not full-dimensional or in dimension 3.
    pub fn volume(&self) -> Option<Rational> {
        if !self.is_full_dimensional() {
            return None;
        }
        match self.n {
            0 => Some(int(1)),
            1 => Some(&self.vertices[1][0] - &self.vertices[0][0]),
            2 => {
                let v = &self.vertices;
                let mut twice = Rational::zero();
                for i in 0..v.len() {
                    let (a, b) = (&v[i], &v[(i + 1) % v.len()]);
                    twice += &a[0] * &b[1] - &b[0] * &a[1];
                }
                Some(twice / int(2))
            }
            _ => None,
        }
    }

    /// Integer bounding box `[floor(min), ceil(max)]` per coordinate.
    pub fn bounding_box(&self) -> Result<Vec<(i64, i64)>> {
        if self.vertices.is_empty() {
            return Err(Error::Unbounded);
        }
        (0..self.n)
            .map(|c| {
                let lo = self.vertices.iter().map(|v| &v[c]).min().expect("nonempty");
                let hi = self.vertices.iter().map(|v| &v[c]).max().expect("nonempty");
                let lo: i64 = lo.floor().to_integer().try_into().map_err(|_| Error::Unbounded)?;
                let hi: i64 = hi.ceil().to_integer().try_into().map_err(|_| Error::Unbounded)?;
                Ok((lo, hi))
            })
            .collect()
    }

    /// Checks that the two descriptions agree: every vertex satisfies all
    /// constraints and is tight on enough facets to be a vertex, every
    /// facet is tight on enough vertices, and the hull of the vertices
    /// reproduces the H-representation exactly.
    pub fn cross_validate(&self) -> Result<()> {
        let k = self.affine_dim();
        for v in &self.vertices {
            if !self.contains(v) {
                return Err(Error::Input(format!("vertex {} violates a constraint", fmt_point(v))));
            }
            let tight = self.facets.iter().filter(|h| h.slack(v).is_zero()).count();
            if tight < k {
                return Err(Error::Input(format!("vertex {} lies on only {tight} facets", fmt_point(v))));
            }
        }
        for h in &self.facets {
            let tight = self.vertices.iter().filter(|v| h.slack(v).is_zero()).count();
            if tight < k.max(1) {
                return Err(Error::Input("a facet touches too few vertices".into()));
            }
        }
        let rebuilt = hull(&self.vertices)?;
        if rebuilt.facets != self.facets || rebuilt.equalities != self.equalities {
            return Err(Error::Input("V-representation and H-representation disagree".into()));
        }
        Ok(())
    }

    /// Facets in floating point, for the numerical layer.
    pub fn facets_f64(&self) -> Vec<(Vec<f64>, f64)> {
        self.facets
            .iter()
            .map(|h| {
                (
                    h.normal.iter().map(|x| to_f64(&Rational::from_integer(x.clone()))).collect(),
                    to_f64(&h.offset),
                )
            })
            .collect()
    }

    pub fn vertices_f64(&self) -> Vec<Vec<f64>> {
        self.vertices.iter().map(|v| v.iter().map(to_f64).collect()).collect()
    }

    /// Short summary: `segment [a, b]` for one-dimensional bodies.
    pub fn summary(&self) -> String {
        if self.n == 1 && self.vertices.len() == 2 {
            return format!(
                "segment [{}, {}]",
                ratio_literal(&self.vertices[0][0]),
                ratio_literal(&self.vertices[1][0])
            );
        }
        let kind = match (self.affine_dim(), self.vertices.len()) {
            (0, _) => "point".to_string(),
            (1, _) => "segment".to_string(),
            (2, 3) => "triangle".to_string(),
            (2, 4) => "quadrilateral".to_string(),
            (2, m) => format!("{m}-gon"),
            (_, m) => format!("polytope with {m} vertices"),
        };
        let verts: Vec<String> = self.vertices.iter().map(|v| fmt_point(v)).collect();
        format!("{kind} conv{{{}}}", verts.join(", "))
    }
}

/// True when `{y : A y <= 0, E y = 0}` is `{0}`.
fn recession_cone_trivial(facets: &[Halfspace], equalities: &[Halfspace], rows: &[Point], n: usize) -> bool {
    if n == 0 {
        return true;
    }
    if rref(rows.to_vec()).1.len() < n {
        return false;
    }
    let in_cone = |y: &[BigInt]| {
        let yr: Point = y.iter().map(|x| Rational::from_integer(x.clone())).collect();
        facets.iter().all(|h| !dot_int(&h.normal, &yr).is_positive())
            && equalities.iter().all(|h| dot_int(&h.normal, &yr).is_zero())
    };
    for subset in subsets(rows.len(), n - 1) {
        let sys: Vec<Point> = subset.iter().map(|&i| rows[i].clone()).collect();
        let ns = null_space(&if sys.is_empty() { vec![vec![Rational::zero(); n]] } else { sys }, n);
        if ns.len() != 1 {
            continue;
        }
        let y = &ns[0];
        let neg: Vec<BigInt> = y.iter().map(|x| -x).collect();
        if in_cone(y) || in_cone(&neg) {
            return false;
        }
    }
    true
}

fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, k, &mut Vec::new(), &mut out);
    out
}

pub(crate) fn fmt_point(p: &[Rational]) -> String {
    let parts: Vec<String> = p.iter().map(ratio_literal).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_normal(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_halfspaces(hs: &[Halfspace]) -> String {
    let parts: Vec<String> = hs
        .iter()
        .map(|h| format!("{{normal: {}, offset: {}}}", fmt_normal(&h.normal), ratio_literal(&h.offset)))
        .collect();
    format!("[{}]", parts.join(", "))
}

/// `{vertices: [[p/q, ...], ...], facets: [{normal: [...], offset: p/q}, ...]}`
/// with an `equalities` list appended for lower-dimensional polytopes.
impl fmt::Display for RationalPolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verts: Vec<String> = self.vertices.iter().map(|v| fmt_point(v)).collect();
        write!(f, "{{vertices: [{}], facets: {}", verts.join(", "), fmt_halfspaces(&self.facets))?;
        if !self.equalities.is_empty() {
            write!(f, ", equalities: {}", fmt_halfspaces(&self.equalities))?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Atom(String, usize),
    List(Vec<Value>),
    Map(Vec<(String, Value)>),
}

struct BlockParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl BlockParser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::parse(self.pos + 1, msg)
    }

    fn ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn value(&mut self) -> Result<Value> {
        self.ws();
        match self.src.get(self.pos) {
            Some(b'[') => {
                self.pos += 1;
                let mut items = Vec::new();
                self.ws();
                if self.src.get(self.pos) == Some(&b']') {
                    self.pos += 1;
                    return Ok(Value::List(items));
                }
                loop {
                    items.push(self.value()?);
                    self.ws();
                    match self.src.get(self.pos) {
                        Some(b',') => self.pos += 1,
                        Some(b']') => {
                            self.pos += 1;
                            return Ok(Value::List(items));
                        }
                        _ => return Err(self.err("expected `,` or `]`")),
                    }
                }
            }
            Some(b'{') => {
                self.pos += 1;
                let mut entries = Vec::new();
                loop {
                    self.ws();
                    let start = self.pos;
                    while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphabetic() || self.src[self.pos] == b'_') {
                        self.pos += 1;
                    }
                    if start == self.pos {
                        return Err(self.err("expected a key"));
                    }
                    let key = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
                    self.expect(b':')?;
                    entries.push((key, self.value()?));
                    self.ws();
                    match self.src.get(self.pos) {
                        Some(b',') => self.pos += 1,
                        Some(b'}') => {
                            self.pos += 1;
                            return Ok(Value::Map(entries));
                        }
                        _ => return Err(self.err("expected `,` or `}`")),
                    }
                }
            }
            Some(_) => {
                let start = self.pos;
                while self.pos < self.src.len() && !b",]} \t\r\n".contains(&self.src[self.pos]) {
                    self.pos += 1;
                }
                if start == self.pos {
                    return Err(self.err("expected a value"));
                }
                Ok(Value::Atom(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned(), start + 1))
            }
            None => Err(self.err("unexpected end of input")),
        }
    }
}

fn as_list(v: &Value) -> Result<&[Value]> {
    match v {
        Value::List(items) => Ok(items),
        _ => Err(Error::Input("expected a list".into())),
    }
}

fn as_rational(v: &Value) -> Result<Rational> {
    match v {
        Value::Atom(s, col) => parse_rational(s).map_err(|e| match e {
            Error::Parse { column, message, .. } => Error::parse(col + column - 1, message),
            other => other,
        }),
        _ => Err(Error::Input("expected a rational literal".into())),
    }
}

fn as_halfspaces(v: &Value) -> Result<Vec<Halfspace>> {
    as_list(v)?
        .iter()
        .map(|item| {
            let Value::Map(entries) = item else {
                return Err(Error::Input("expected {normal, offset}".into()));
            };
            let get = |k: &str| {
                entries
                    .iter()
                    .find(|(key, _)| key == k)
                    .map(|(_, v)| v)
                    .ok_or_else(|| Error::Input(format!("missing `{k}`")))
            };
            let normal = as_list(get("normal")?)?
                .iter()
                .map(|x| {
                    let r = as_rational(x)?;
                    if !r.is_integer() {
                        return Err(Error::Input("facet normals must be integers".into()));
                    }
                    Ok(r.to_integer())
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Halfspace {
                normal,
                offset: as_rational(get("offset")?)?,
            })
        })
        .collect()
}

impl std::str::FromStr for RationalPolytope {
    type Err = Error;

    /// Parses the text block. With vertices present the block must agree
    /// with the exact hull of those vertices; with an empty vertex list the
    /// polytope is rebuilt from the halfspaces.
    fn from_str(s: &str) -> Result<Self> {
        let mut p = BlockParser { src: s.as_bytes(), pos: 0 };
        let v = p.value()?;
        p.ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing characters"));
        }
        let Value::Map(entries) = v else {
            return Err(Error::Input("expected a `{...}` polytope block".into()));
        };
        let mut vertices = Vec::new();
        let mut facets = Vec::new();
        let mut equalities = Vec::new();
        for (key, value) in &entries {
            match key.as_str() {
                "vertices" => {
                    vertices = as_list(value)?
                        .iter()
                        .map(|pt| as_list(pt)?.iter().map(as_rational).collect::<Result<Point>>())
                        .collect::<Result<Vec<_>>>()?
                }
                "facets" => facets = as_halfspaces(value)?,
                "equalities" => equalities = as_halfspaces(value)?,
                other => return Err(Error::Input(format!("unknown key `{other}`"))),
            }
        }
        if vertices.is_empty() {
            let n = facets
                .iter()
                .chain(&equalities)
                .map(|h| h.normal.len())
                .next()
                .ok_or_else(|| Error::Input("empty polytope block".into()))?;
            return RationalPolytope::from_h_rep(n, facets, equalities);
        }
        let rebuilt = hull(&vertices)?;
        let given = RationalPolytope {
            n: rebuilt.n,
            vertices,
            facets,
            equalities,
        };
        if given != rebuilt {
            return Err(Error::Input(
                "polytope block is not the canonical hull of its vertices".into(),
            ));
        }
        Ok(rebuilt)
    }
}
