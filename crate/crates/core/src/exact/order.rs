use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use super::Exponent;
use crate::{Error, Result};

/// A translation-invariant total order on `Z^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub enum GroupOrder {
    #[default]
    Lex,
    /// Total degree first, then lex.
    GradedLex,
    /// Weighted degree first, then lex.
    Weighted(Vec<i64>),
}

impl GroupOrder {
    /// Same as [`compare`] but assumes matching lengths.
    pub fn cmp_unchecked(&self, a: &Exponent, b: &Exponent) -> Ordering {
        let lex = || a.entries().cmp(b.entries());
        match self {
            GroupOrder::Lex => lex(),
            GroupOrder::GradedLex => {
                let da: i64 = a.entries().iter().sum();
                let db: i64 = b.entries().iter().sum();
                da.cmp(&db).then_with(lex)
            }
            GroupOrder::Weighted(w) => a.dot(w).cmp(&b.dot(w)).then_with(lex),
        }
    }

    pub fn min<'a, I>(&self, items: I) -> Option<&'a Exponent>
    where
        I: IntoIterator<Item = &'a Exponent>,
    {
        items
            .into_iter()
            .min_by(|a, b| self.cmp_unchecked(a, b))
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        if let GroupOrder::Weighted(w) = self {
            if w.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: w.len(),
                });
            }
        }
        Ok(())
    }
}

pub fn compare(order: &GroupOrder, a: &Exponent, b: &Exponent) -> Result<Ordering> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    order.check_dim(a.dim())?;
    Ok(order.cmp_unchecked(a, b))
}

impl fmt::Display for GroupOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupOrder::Lex => write!(f, "lex"),
            GroupOrder::GradedLex => write!(f, "graded-lex"),
            GroupOrder::Weighted(w) => {
                let parts: Vec<String> = w.iter().map(|x| x.to_string()).collect();
                write!(f, "weighted:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for GroupOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "lex" => Ok(GroupOrder::Lex),
            "graded-lex" | "grlex" => Ok(GroupOrder::GradedLex),
            _ => {
                let rest = s
                    .strip_prefix("weighted:")
                    .ok_or_else(|| Error::Input(format!("unknown order `{s}`")))?;
                let w = rest
                    .split(',')
                    .map(|p| {
                        p.trim()
                            .parse::<i64>()
                            .map_err(|_| Error::Input(format!("bad weight `{p}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(GroupOrder::Weighted(w))
            }
        }
    }
}
