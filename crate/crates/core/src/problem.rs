//! Problem files: a small TOML document describing the section space,
//! the valuation, the degrees to examine and optional quantization
//! settings.
//!
//! ```toml
//! name = "cusp"
//! n = 1
//! order = "lex"
//! generators = ["1", "u1^2", "u1^3"]
//! h = "1"
//! d = 1
//! d_max = 6
//!
//! [quantize]
//! eta = 0.5
//! epsilon = [1e-3]
//! ```

use std::fmt::Write as _;
use std::ops::Range;

use serde::Deserialize;
use toml::Spanned;

use crate::exact::{GroupOrder, Polynomial};
use crate::quant::{ConvexPotential, QuantConfig};
use crate::semigroup::{KhovanskiiBasis, SectionSpace};
use crate::valuation::Valuation;
use crate::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    name: Option<String>,
    n: usize,
    order: Option<Spanned<String>>,
    generators: Spanned<Vec<Spanned<String>>>,
    h: Option<Spanned<String>>,
    d: Option<Spanned<u32>>,
    d_max: Option<Spanned<u32>>,
    dim_h0: Option<usize>,
    covector: Option<Spanned<Vec<i64>>>,
    basis: Option<Vec<RawBasis>>,
    quantize: Option<RawQuantize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBasis {
    degree: Spanned<u32>,
    poly: Spanned<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuantize {
    potential: Option<Spanned<String>>,
    s_start: Option<f64>,
    s_factor: Option<f64>,
    s_count: Option<usize>,
    eta: Option<f64>,
    epsilon: Option<Vec<f64>>,
    resolution: Option<u32>,
    t0: Option<f64>,
    test_sections: Option<Vec<Spanned<String>>>,
    cap: Option<f64>,
}

/// A parsed problem file.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub name: Option<String>,
    pub n: usize,
    pub order: GroupOrder,
    pub generators: Vec<Polynomial>,
    pub h: Polynomial,
    pub d: u32,
    pub d_max: u32,
    pub dim_h0: Option<usize>,
    pub covector: Option<Vec<i64>>,
    /// Explicit Khovanskii basis as `(degree, element)`; the generators
    /// at degree 1 when absent.
    pub basis: Option<Vec<(u32, Polynomial)>>,
    pub quantize: Option<QuantConfig>,
}

/// 1-based line and column of a byte offset.
fn locate(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(offset, |i| offset - i - 1) + 1;
    (line, column)
}

struct Source<'a> {
    text: &'a str,
}

impl Source<'_> {
    fn error_at(&self, span: Range<usize>, message: impl Into<String>) -> Error {
        let (line, column) = locate(self.text, span.start);
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    /// Parses a quoted polynomial, mapping its error column into the file.
    fn polynomial(&self, n: usize, s: &Spanned<String>) -> Result<Polynomial> {
        let start = s.span().start + 1;
        Polynomial::parse(n, s.get_ref()).map_err(|e| match e {
            Error::Parse { column, message, .. } => self.error_at(start + column - 1..start, message),
            other => self.error_at(s.span(), other.to_string()),
        })
    }
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        let src = Source { text };
        let raw: RawProblem = toml::from_str(text).map_err(|e| {
            let span = e.span().unwrap_or(0..0);
            src.error_at(span, e.message().trim().to_string())
        })?;
        let n = raw.n;
        if n == 0 {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: "n must be positive".into(),
            });
        }
        let order = match &raw.order {
            None => GroupOrder::Lex,
            Some(o) => {
                let order: GroupOrder = o.get_ref().parse().map_err(|e: Error| src.error_at(o.span(), e.to_string()))?;
                order.check_dim(n).map_err(|e| src.error_at(o.span(), e.to_string()))?;
                order
            }
        };
        if raw.generators.get_ref().is_empty() {
            return Err(src.error_at(raw.generators.span(), "generators must not be empty"));
        }
        let generators = raw
            .generators
            .get_ref()
            .iter()
            .map(|g| {
                let p = src.polynomial(n, g)?;
                if p.is_zero() {
                    return Err(src.error_at(g.span(), "generators must be nonzero"));
                }
                Ok(p)
            })
            .collect::<Result<Vec<_>>>()?;
        let h = match &raw.h {
            None => Polynomial::one(n),
            Some(h) => {
                let p = src.polynomial(n, h)?;
                if p.is_zero() {
                    return Err(src.error_at(h.span(), "h must be nonzero"));
                }
                p
            }
        };
        let positive = |v: &Option<Spanned<u32>>, default: u32, key: &str| match v {
            None => Ok(default),
            Some(s) if *s.get_ref() == 0 => Err(src.error_at(s.span(), format!("{key} must be positive"))),
            Some(s) => Ok(*s.get_ref()),
        };
        let d = positive(&raw.d, 1, "d")?;
        let d_max = positive(&raw.d_max, 4, "d_max")?;
        let covector = match raw.covector {
            Some(c) if c.get_ref().len() != n => {
                return Err(src.error_at(c.span(), format!("covector must have {n} entries")))
            }
            c => c.map(Spanned::into_inner),
        };
        let basis = raw
            .basis
            .map(|elements| {
                elements
                    .iter()
                    .map(|b| {
                        if *b.degree.get_ref() == 0 {
                            return Err(src.error_at(b.degree.span(), "basis degrees must be positive"));
                        }
                        Ok((*b.degree.get_ref(), src.polynomial(n, &b.poly)?))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        let quantize = raw.quantize.map(|q| quant_config(&src, n, q)).transpose()?;
        Ok(ProblemFile {
            name: raw.name,
            n,
            order,
            generators,
            h,
            d,
            d_max,
            dim_h0: raw.dim_h0,
            covector,
            basis,
            quantize,
        })
    }

    pub fn valuation(&self) -> Result<Valuation> {
        Valuation::new(self.order.clone(), self.n, self.h.clone())
    }

    pub fn section_space(&self) -> Result<SectionSpace> {
        SectionSpace::new(1, self.generators.clone())
    }

    pub fn khovanskii_basis(&self, val: &Valuation) -> Result<KhovanskiiBasis> {
        match &self.basis {
            Some(b) => KhovanskiiBasis::new(val, b.clone()),
            None => KhovanskiiBasis::from_space(val, &self.section_space()?),
        }
    }

    /// Serializes back to a problem file that parses to `self`.
    pub fn to_toml(&self) -> String {
        let quote = |p: &Polynomial| format!("\"{p}\"");
        let list = |ps: &[Polynomial]| ps.iter().map(quote).collect::<Vec<_>>().join(", ");
        let mut out = String::new();
        if let Some(name) = &self.name {
            let _ = writeln!(out, "name = {}", toml::Value::String(name.clone()));
        }
        let _ = writeln!(out, "n = {}", self.n);
        let _ = writeln!(out, "order = \"{}\"", self.order);
        let _ = writeln!(out, "generators = [{}]", list(&self.generators));
        let _ = writeln!(out, "h = {}", quote(&self.h));
        let _ = writeln!(out, "d = {}", self.d);
        let _ = writeln!(out, "d_max = {}", self.d_max);
        if let Some(k) = self.dim_h0 {
            let _ = writeln!(out, "dim_h0 = {k}");
        }
        if let Some(c) = &self.covector {
            let _ = writeln!(out, "covector = {c:?}");
        }
        for (deg, p) in self.basis.iter().flatten() {
            let _ = write!(out, "\n[[basis]]\ndegree = {deg}\npoly = {}\n", quote(p));
        }
        if let Some(q) = &self.quantize {
            let _ = writeln!(out, "\n[quantize]");
            let _ = writeln!(out, "potential = \"{}\"", q.potential);
            let _ = writeln!(out, "s_start = {:?}", q.s_start);
            let _ = writeln!(out, "s_factor = {:?}", q.s_factor);
            let _ = writeln!(out, "s_count = {}", q.s_count);
            let _ = writeln!(out, "eta = {:?}", q.eta);
            let _ = writeln!(out, "epsilon = {:?}", q.epsilon);
            let _ = writeln!(out, "resolution = {}", q.resolution);
            let _ = writeln!(out, "t0 = {:?}", q.t0);
            let _ = writeln!(out, "test_sections = [{}]", list(&q.test_sections));
            let _ = writeln!(out, "cap = {:?}", q.cap);
        }
        out
    }
}

impl std::str::FromStr for ProblemFile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProblemFile::parse(s)
    }
}

fn quant_config(src: &Source, n: usize, q: RawQuantize) -> Result<QuantConfig> {
    let mut cfg = QuantConfig::defaults(n);
    if let Some(p) = &q.potential {
        cfg.potential = ConvexPotential::parse(n, p.get_ref()).map_err(|e| match e {
            Error::Parse { .. } => src.polynomial(n, p).err().unwrap_or(e),
            other => src.error_at(p.span(), other.to_string()),
        })?;
    }
    cfg.s_start = q.s_start.unwrap_or(cfg.s_start);
    cfg.s_factor = q.s_factor.unwrap_or(cfg.s_factor);
    cfg.s_count = q.s_count.unwrap_or(cfg.s_count);
    cfg.eta = q.eta.unwrap_or(cfg.eta);
    cfg.epsilon = q.epsilon.unwrap_or(cfg.epsilon);
    cfg.resolution = q.resolution.unwrap_or(cfg.resolution);
    cfg.t0 = q.t0.unwrap_or(cfg.t0);
    cfg.cap = q.cap.unwrap_or(cfg.cap);
    if let Some(ts) = &q.test_sections {
        cfg.test_sections = ts.iter().map(|t| src.polynomial(n, t)).collect::<Result<_>>()?;
    }
    cfg.validate()?;
    Ok(cfg)
}
