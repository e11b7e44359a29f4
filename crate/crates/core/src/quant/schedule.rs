use serde::Serialize;

use crate::{Error, Result};

/// Two-phase deformation schedule: a linear ramp from 1 down to `t0` on
/// `[0, 1]`, then `t0 / s`.
///
/// No simulated quantity depends on `t`; it is reported alongside the
/// trace only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Schedule {
    t0: f64,
}

impl Schedule {
    pub fn new(t0: f64) -> Result<Self> {
        if !(t0 > 0.0 && t0 <= 1.0) {
            return Err(Error::Config(format!("t0 must lie in (0, 1], got {t0}")));
        }
        Ok(Schedule { t0 })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t(&self, s: f64) -> Result<f64> {
        if s.is_nan() || s < 0.0 {
            return Err(Error::Config(format!("schedule parameter must be nonnegative, got {s}")));
        }
        Ok(if s <= 1.0 {
            1.0 + (self.t0 - 1.0) * s
        } else {
            self.t0 / s
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn closed_form() {
        let sch = Schedule::new(0.5).unwrap();
        assert_eq!(sch.t(0.0).unwrap(), 1.0);
        assert_eq!(sch.t(1.0).unwrap(), 0.5);
        assert!((sch.t(11.0).unwrap() - 1.0 / 22.0).abs() < 1e-12);
        assert!(Schedule::new(0.0).is_err());
        assert!(Schedule::new(1.5).is_err());
        assert!(sch.t(-1.0).is_err());
    }

    proptest! {
        #[test]
        fn continuous_and_decreasing(t0 in 0.01f64..=1.0, s in 1.0f64..1e6, ds in 1e-6f64..10.0) {
            let sch = Schedule::new(t0).unwrap();
            let eps = 1e-9;
            prop_assert!((sch.t(1.0 - eps).unwrap() - sch.t(1.0 + eps).unwrap()).abs() < 1e-8);
            prop_assert!(sch.t(s + ds).unwrap() < sch.t(s).unwrap());
            if s > 100.0 * t0 {
                prop_assert!(sch.t(s).unwrap() < 1e-2);
            }
            prop_assert!(sch.t(s).unwrap() > 0.0);
        }
    }
}
