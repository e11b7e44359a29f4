//! The in-repo example problems: the rational cusp `t -> [t^2 : t^3 : 1]`,
//! the conic (Veronese) `t -> [1 : t : t^2]`, the Segre quadric and a
//! non-saturated "even" curve whose values generate only `2Z`.

use crate::exact::Polynomial;
use crate::semigroup::SectionSpace;
use crate::valuation::Valuation;

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub valuation: Valuation,
    pub space: SectionSpace,
}

fn build(name: &'static str, n: usize, gens: &[&str]) -> Fixture {
    let basis = gens
        .iter()
        .map(|s| Polynomial::parse(n, s).expect("fixture polynomial"))
        .collect();
    Fixture {
        name,
        valuation: Valuation::lex(n),
        space: SectionSpace::new(1, basis).expect("fixture basis"),
    }
}

pub fn cusp() -> Fixture {
    build("cusp", 1, &["1", "u1^2", "u1^3"])
}

pub fn veronese() -> Fixture {
    build("veronese", 1, &["1", "u1", "u1^2"])
}

pub fn segre() -> Fixture {
    build("segre", 2, &["1", "u1", "u2", "u1*u2"])
}

pub fn even() -> Fixture {
    build("even", 1, &["1", "u1^2", "u1^4"])
}

pub fn by_name(name: &str) -> Option<Fixture> {
    match name {
        "cusp" => Some(cusp()),
        "veronese" => Some(veronese()),
        "segre" => Some(segre()),
        "even" => Some(even()),
        _ => None,
    }
}
