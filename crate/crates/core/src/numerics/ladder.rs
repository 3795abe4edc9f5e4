use super::{BigReal, MIN_DIGITS};
use crate::error::{Error, Result};

/// Below this magnitude agreement is judged in absolute rather than relative terms.
const ABSOLUTE_FLOOR_EXP: i32 = -300;

/// How a computation is re-run at growing precision until successive results agree.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecisionPolicy {
    pub start_digits: u32,
    pub growth_factor: f64,
    pub agreement_tol: f64,
    pub max_digits: u32,
}

impl Default for PrecisionPolicy {
    /// 50 → 100 → 200 → 400 → 800 → 1600 digits, agreement to 1e-10.
    fn default() -> Self {
        PrecisionPolicy {
            start_digits: 50,
            growth_factor: 2.0,
            agreement_tol: 1e-10,
            max_digits: 1600,
        }
    }
}

impl PrecisionPolicy {
    pub fn new(start_digits: u32, growth_factor: f64, agreement_tol: f64, max_digits: u32) -> Result<Self> {
        let p = PrecisionPolicy {
            start_digits,
            growth_factor,
            agreement_tol,
            max_digits,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.start_digits < MIN_DIGITS {
            return Err(Error::InvalidArgument(format!(
                "start_digits {} below minimum {MIN_DIGITS}",
                self.start_digits
            )));
        }
        if self.max_digits < self.start_digits {
            return Err(Error::InvalidArgument(format!(
                "max_digits {} below start_digits {}",
                self.max_digits, self.start_digits
            )));
        }
        if !(self.growth_factor > 1.0 && self.growth_factor.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "growth_factor {} must exceed 1",
                self.growth_factor
            )));
        }
        if !(self.agreement_tol > 0.0 && self.agreement_tol < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "agreement_tol {} must lie in (0, 1)",
                self.agreement_tol
            )));
        }
        Ok(())
    }

    /// Same policy started at a different rung.
    pub fn starting_at(&self, start_digits: u32) -> Self {
        PrecisionPolicy {
            start_digits,
            max_digits: self.max_digits.max(start_digits),
            ..self.clone()
        }
    }

    /// The precision ladder. The last rung is clamped to `max_digits`.
    pub fn rungs(&self) -> Vec<u32> {
        let mut out = vec![self.start_digits];
        let mut d = self.start_digits;
        while d < self.max_digits {
            let next = ((f64::from(d) * self.growth_factor).ceil() as u32).max(d + 1);
            d = next.min(self.max_digits);
            out.push(d);
        }
        out
    }

    /// Whether `coarse` agrees with the more precise `fine`.
    pub fn agrees(&self, coarse: &BigReal, fine: &BigReal) -> bool {
        self.agrees_scaled(coarse, fine, &fine.abs())
    }

    /// Agreement measured against an explicit scale (relative above 1e-300,
    /// absolute below).
    pub fn agrees_scaled(&self, coarse: &BigReal, fine: &BigReal, scale: &BigReal) -> bool {
        if coarse.is_nan() || fine.is_nan() {
            return false;
        }
        let digits = coarse.digits().max(fine.digits());
        let diff = (coarse - fine).abs();
        let tol = BigReal::from_f64(self.agreement_tol, digits);
        let floor = BigReal::pow10(ABSOLUTE_FLOOR_EXP, digits);
        if scale > &floor {
            diff <= &tol * scale
        } else {
            diff <= tol
        }
    }
}

/// Outcome of a precision escalation.
#[derive(Clone, Debug)]
pub struct Escalation<T> {
    pub value: T,
    pub converged: bool,
    /// Precision of the returned value.
    pub digits_used: u32,
}

/// Re-evaluates `eval` up the policy's ladder and returns the first value
/// that agrees with its successor to `agreement_tol`.
///
/// A rung whose evaluation fails is skipped. If no rung succeeds the last
/// error is returned wrapped in [`Error::NonEvaluable`].
pub fn escalate<F>(eval: F, policy: &PrecisionPolicy) -> Result<Escalation<BigReal>>
where
    F: FnMut(u32) -> Result<BigReal>,
{
    escalate_with(eval, policy, |coarse, fine| policy.agrees(coarse, fine))
}

/// [`escalate`] for arbitrary result types with a caller-supplied agreement test.
pub fn escalate_with<T, F, A>(mut eval: F, policy: &PrecisionPolicy, agree: A) -> Result<Escalation<T>>
where
    F: FnMut(u32) -> Result<T>,
    A: Fn(&T, &T) -> bool,
{
    policy.validate()?;
    let rungs = policy.rungs();
    let mut prev: Option<(T, u32)> = None;
    let mut last_err = None;
    for &digits in &rungs {
        match eval(digits) {
            Ok(v) => {
                if let Some((p, pd)) = prev.take() {
                    if agree(&p, &v) {
                        return Ok(Escalation {
                            value: p,
                            converged: true,
                            digits_used: pd,
                        });
                    }
                }
                prev = Some((v, digits));
            }
            Err(e) => {
                prev = None;
                last_err = Some(e);
            }
        }
    }
    match prev {
        Some((value, digits_used)) => Ok(Escalation {
            value,
            converged: false,
            digits_used,
        }),
        None => Err(Error::NonEvaluable {
            rungs: rungs.len(),
            last: Box::new(last_err.unwrap_or_else(|| Error::InvalidArgument("empty ladder".into()))),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_ladder_passes_through_the_300_digit_regime() {
        assert_eq!(PrecisionPolicy::default().rungs(), vec![50, 100, 200, 400, 800, 1600]);
        let p = PrecisionPolicy::new(60, 2.0, 1e-10, 1000).unwrap();
        assert_eq!(p.rungs(), vec![60, 120, 240, 480, 960, 1000]);
    }

    #[test]
    fn invalid_policies_are_rejected() {
        assert!(PrecisionPolicy::new(10, 2.0, 1e-10, 100).is_err());
        assert!(PrecisionPolicy::new(50, 2.0, 1e-10, 40).is_err());
        assert!(PrecisionPolicy::new(50, 1.0, 1e-10, 100).is_err());
        assert!(PrecisionPolicy::new(50, 2.0, 0.0, 100).is_err());
        assert!(PrecisionPolicy::new(50, 2.0, 1.0, 100).is_err());
    }

    #[test]
    fn constant_converges_at_first_rung() {
        let p = PrecisionPolicy::default();
        let out = escalate(|d| Ok(BigReal::from_i64(3, d)), &p).unwrap();
        assert!(out.converged);
        assert_eq!(out.digits_used, p.start_digits);
        assert_eq!(out.value.to_f64(), 3.0);
    }

    #[test]
    fn cancellation_forces_the_ladder() {
        // (1e30 + 1) - 1e30 is exactly 1 only once the working precision
        // covers 31 digits.
        let p = PrecisionPolicy::new(20, 1.6, 1e-10, 200).unwrap();
        let mut seen = Vec::new();
        let out = escalate(
            |d| {
                seen.push(d);
                let big = BigReal::pow10(30, d);
                Ok((&big + &BigReal::one(d)) - &big)
            },
            &p,
        )
        .unwrap();
        assert!(out.converged);
        assert!(out.digits_used >= 31);
        assert_eq!(out.value.to_f64(), 1.0);
        assert_eq!(seen, vec![20, 32, 52]);
        let at = |d: u32| {
            let big = BigReal::pow10(30, d);
            ((&big + &BigReal::one(d)) - &big).to_f64()
        };
        assert_eq!(at(30), 0.0);
        assert_eq!(at(31), 1.0);
    }

    #[test]
    fn non_agreement_reports_last_value_unconverged() {
        let p = PrecisionPolicy::new(20, 2.0, 1e-10, 80).unwrap();
        let out = escalate(|d| Ok(BigReal::from_i64(i64::from(d), d)), &p).unwrap();
        assert!(!out.converged);
        assert_eq!(out.digits_used, 80);
        assert_eq!(out.value.to_f64(), 80.0);
    }

    #[test]
    fn failures_at_every_rung_are_non_evaluable() {
        let p = PrecisionPolicy::new(20, 2.0, 1e-10, 80).unwrap();
        let err = escalate(|_| Err(Error::Domain("always".into())), &p).unwrap_err();
        assert!(matches!(err, Error::NonEvaluable { rungs: 3, .. }));
    }

    #[test]
    fn failing_low_rungs_are_skipped() {
        let p = PrecisionPolicy::new(20, 2.0, 1e-10, 160).unwrap();
        let out = escalate(
            |d| {
                if d < 80 {
                    Err(Error::Domain("too coarse".into()))
                } else {
                    Ok(BigReal::from_i64(7, d))
                }
            },
            &p,
        )
        .unwrap();
        assert!(out.converged);
        assert_eq!(out.digits_used, 80);
    }

    #[test]
    fn absolute_agreement_near_zero() {
        let p = PrecisionPolicy::default();
        let a = BigReal::pow10(-320, 50);
        let b = BigReal::zero(50);
        assert!(p.agrees(&a, &b));
        let c = BigReal::parse("1.000000001", 50).unwrap();
        assert!(!p.agrees(&c, &BigReal::one(50)));
        let c = BigReal::parse("1.00000000001", 50).unwrap();
        assert!(p.agrees(&c, &BigReal::one(50)));
    }

    #[test]
    fn monotone_refinement() {
        let p = PrecisionPolicy::new(15, 2.0, 1e-10, 400).unwrap();
        let eval = |d: u32| {
            let big = BigReal::pow10(40, d);
            Ok((&big + &BigReal::from_i64(5, d)) - &big)
        };
        let first = escalate(eval, &p).unwrap();
        let again = escalate(eval, &p.starting_at(first.digits_used)).unwrap();
        assert!(p.agrees(&first.value, &again.value));
        assert_eq!(first.value.serialize(), escalate(eval, &p).unwrap().value.serialize());
    }
}
