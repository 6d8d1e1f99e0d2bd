//! Probabilities derived from incidences.
//!
//! Everything here is exact except the correlation coefficient, which
//! involves a square root. For that one the square and the sign are kept
//! exactly and the coefficient itself is rendered as a decimal.

use std::cmp::Ordering;
use std::fmt;

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::laf::BoundAssignment;
use crate::logic::{incidence_of, Environment, Formula};
use crate::samplespace::SampleSpace;
use crate::Rational;

/// Default number of decimal digits in rendered values.
pub const DEFAULT_DIGITS: usize = 6;

/// `p(F) = wp(i(F))`.
pub fn prob(formula: &Formula, env: &Environment, space: &SampleSpace) -> Result<Rational> {
    space.wp(&incidence_of(formula, env, space)?)
}

/// `p(A|B) = wp(i(A) ∩ i(B)) / wp(i(B))`. Fails when `p(B) = 0`.
pub fn cond_prob(a: &Formula, b: &Formula, env: &Environment, space: &SampleSpace) -> Result<Rational> {
    let ib = incidence_of(b, env, space)?;
    let pb = space.wp(&ib)?;
    if pb.is_zero() {
        return Err(Error::ZeroProbabilityCondition(b.to_string()));
    }
    let ia = incidence_of(a, env, space)?;
    Ok(space.wp(&ia.intersection(&ib))? / pb)
}

/// Correlation coefficient `c(A,B)` of two sentences, defined by
/// `p(A&B) = p(A)p(B) + c·√(p(A)p(~A)p(B)p(~B))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correlation {
    /// `p(A&B) − p(A)p(B)`.
    pub covariance: Rational,
    /// `p(A)p(~A)p(B)p(~B)`.
    pub variance_product: Rational,
    /// `c²`, exact.
    pub squared: Rational,
}

impl Correlation {
    /// Builds the coefficient from the marginals and the joint probability.
    pub fn from_probabilities(pa: &Rational, pb: &Rational, pab: &Rational) -> Option<Correlation> {
        let one = Rational::one();
        let variance_product = pa * (&one - pa) * pb * (&one - pb);
        if variance_product.is_zero() {
            return None;
        }
        let covariance = pab - pa * pb;
        let squared = &covariance * &covariance / &variance_product;
        Some(Correlation {
            covariance,
            variance_product,
            squared,
        })
    }

    pub fn sign(&self) -> Ordering {
        self.covariance.cmp(&Rational::zero())
    }

    pub fn value(&self) -> f64 {
        let magnitude = self.squared.to_f64().unwrap_or(f64::NAN).sqrt();
        match self.sign() {
            Ordering::Less => -magnitude,
            _ => magnitude,
        }
    }

    /// `c` rounded half away from zero to `digits` decimals, from exact
    /// integer square roots.
    pub fn decimal(&self, digits: usize) -> String {
        let scale = num::pow(BigInt::from(10), 2 * (digits + 1));
        let scaled = (self.squared.numer() * scale) / self.squared.denom();
        let root = scaled.sqrt();
        let (mut q, r) = root.div_rem(&BigInt::from(10));
        if r >= BigInt::from(5) {
            q += 1;
        }
        let magnitude = Rational::new(q, num::pow(BigInt::from(10), digits));
        let value = if self.sign() == Ordering::Less {
            -magnitude
        } else {
            magnitude
        };
        format_decimal(&value, digits)
    }
}

/// Correlation of two sentences. Fails if either marginal is 0 or 1.
pub fn correlation(a: &Formula, b: &Formula, env: &Environment, space: &SampleSpace) -> Result<Correlation> {
    let ia = incidence_of(a, env, space)?;
    let ib = incidence_of(b, env, space)?;
    let pa = space.wp(&ia)?;
    let pb = space.wp(&ib)?;
    for (f, p) in [(a, &pa), (b, &pb)] {
        if p.is_zero() || p.is_one() {
            return Err(Error::DegenerateMarginal(f.to_string()));
        }
    }
    let pab = space.wp(&ia.intersection(&ib))?;
    Ok(Correlation::from_probabilities(&pa, &pb, &pab).expect("marginals checked"))
}

/// A closed interval of probabilities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbabilityInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl ProbabilityInterval {
    pub fn new(lo: Rational, hi: Rational) -> Option<Self> {
        (lo >= Rational::zero() && lo <= hi && hi <= Rational::one()).then_some(ProbabilityInterval { lo, hi })
    }

    pub fn contains(&self, p: &Rational) -> bool {
        &self.lo <= p && p <= &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

impl fmt::Display for ProbabilityInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_prob(&self.lo), format_prob(&self.hi))
    }
}

/// `[wp(inf(S)), wp(sup(S))]` for a sentence of a bound assignment.
pub fn prob_interval(
    sentence: &Formula,
    assignment: &BoundAssignment,
    space: &SampleSpace,
) -> Result<ProbabilityInterval> {
    let id = assignment
        .id_of(sentence)
        .ok_or_else(|| Error::UnknownSentence(sentence.to_string()))?;
    let (inf, sup) = assignment.bounds(id);
    if !inf.is_subset(sup) {
        return Err(Error::Inconsistent(sentence.to_string()));
    }
    let interval = ProbabilityInterval::new(space.wp(inf)?, space.wp(sup)?);
    Ok(interval.expect("inf ⊆ sup implies an ordered interval"))
}

/// Decimal rendering rounded half away from zero, trailing zeros trimmed.
pub fn format_decimal(value: &Rational, digits: usize) -> String {
    let scale = num::pow(BigInt::from(10), digits);
    let scaled = value.abs() * Rational::from_integer(scale.clone());
    let rounded = (scaled + Rational::new(BigInt::one(), BigInt::from(2)))
        .floor()
        .to_integer();
    let (int, frac) = rounded.div_rem(&scale);
    let sign = if value.is_negative() && !rounded.is_zero() {
        "-"
    } else {
        ""
    };
    if digits == 0 || frac.is_zero() {
        return format!("{sign}{int}");
    }
    let frac = format!("{:0>width$}", frac.to_string(), width = digits);
    format!("{sign}{int}.{}", frac.trim_end_matches('0'))
}

/// `num/den (= decimal)`, or just the integer when the value is whole.
pub fn format_prob(value: &Rational) -> String {
    if value.is_integer() {
        value.to_integer().to_string()
    } else {
        format!(
            "{}/{} (= {})",
            value.numer(),
            value.denom(),
            format_decimal(value, DEFAULT_DIGITS)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse;
    use crate::samplespace::Incidence;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn env(a: impl IntoIterator<Item = usize>, b: impl IntoIterator<Item = usize>) -> (SampleSpace, Environment) {
        let w = SampleSpace::uniform(10).unwrap();
        let mut env = Environment::new();
        env.insert("A", Incidence::from_indices(10, a).unwrap()).unwrap();
        env.insert("B", Incidence::from_indices(10, b).unwrap()).unwrap();
        (w, env)
    }

    fn f(text: &str) -> Formula {
        parse(text).unwrap()
    }

    #[test]
    fn prob_examples() {
        let (w, e) = env(0..=4, 3..=6);
        assert_eq!(prob(&Formula::True, &e, &w).unwrap(), r(1, 1));
        assert_eq!(prob(&Formula::False, &e, &w).unwrap(), r(0, 1));
        assert_eq!(prob(&f("A & B"), &e, &w).unwrap(), r(1, 5));
    }

    #[test]
    fn cond_examples() {
        let (w, e) = env(0..=4, 3..=6);
        assert_eq!(cond_prob(&f("A"), &f("A"), &e, &w).unwrap(), r(1, 1));
        assert_eq!(cond_prob(&f("A"), &f("B"), &e, &w).unwrap(), r(1, 2));
        assert!(matches!(
            cond_prob(&f("A"), &Formula::False, &e, &w),
            Err(Error::ZeroProbabilityCondition(_))
        ));
    }

    #[test]
    fn correlation_examples() {
        let (w, e) = env(0..=4, 3..=6);
        let c = correlation(&f("A"), &f("B"), &e, &w).unwrap();
        assert!(c.covariance.is_zero());
        assert_eq!(c.decimal(6), "0");

        let (w, e) = env(0..=4, 0..=3);
        let c = correlation(&f("A"), &f("B"), &e, &w).unwrap();
        // (0.4 − 0.2)² / (0.25·0.24) = 2/3
        assert_eq!(c.squared, r(2, 3));
        assert_eq!(c.decimal(5), "0.8165");
        assert_eq!(c.decimal(6), "0.816497");
        assert!((c.value() - 0.816_496_580_927_726).abs() < 1e-12);

        let c = correlation(&f("A"), &f("~A"), &e, &w).unwrap();
        assert_eq!(c.squared, r(1, 1));
        assert_eq!(c.sign(), Ordering::Less);
        assert_eq!(c.decimal(6), "-1");

        assert!(matches!(
            correlation(&f("A | ~A"), &f("B"), &e, &w),
            Err(Error::DegenerateMarginal(_))
        ));
    }

    #[test]
    fn decimals() {
        assert_eq!(format_decimal(&r(1, 5), 6), "0.2");
        assert_eq!(format_decimal(&r(1, 3), 6), "0.333333");
        assert_eq!(format_decimal(&r(2, 3), 6), "0.666667");
        assert_eq!(format_decimal(&r(-1, 8), 2), "-0.13");
        assert_eq!(format_decimal(&r(-1, 1000), 2), "0");
        assert_eq!(format_decimal(&r(7, 2), 0), "4");
        assert_eq!(format_prob(&r(1, 5)), "1/5 (= 0.2)");
        assert_eq!(format_prob(&r(1, 1)), "1");
        assert_eq!(format_prob(&r(0, 1)), "0");
    }

    #[test]
    fn interval_validation() {
        assert!(ProbabilityInterval::new(r(1, 2), r(1, 3)).is_none());
        assert!(ProbabilityInterval::new(r(-1, 2), r(1, 3)).is_none());
        let i = ProbabilityInterval::new(r(1, 5), r(7, 10)).unwrap();
        assert!(i.contains(&r(1, 2)));
        assert!(!i.contains(&r(4, 5)));
        assert_eq!(i.to_string(), "[1/5 (= 0.2), 7/10 (= 0.7)]");
    }

    #[test]
    fn interval_from_bounds() {
        let w = SampleSpace::uniform(10).unwrap();
        let mut fa = BoundAssignment::new(10);
        let s = fa.register(&f("s"));
        let t = fa.register(&f("t"));
        fa.register(&f("u"));
        let q = fa.register(&f("q"));
        fa.constrain(
            s,
            &Incidence::from_indices(10, [3, 4]).unwrap(),
            &Incidence::from_indices(10, 0..=6).unwrap(),
        )
        .unwrap();
        let exact = Incidence::from_indices(10, [1, 8]).unwrap();
        fa.constrain(t, &exact, &exact).unwrap();
        fa.constrain(
            q,
            &Incidence::from_indices(10, [0]).unwrap(),
            &Incidence::from_indices(10, [1]).unwrap(),
        )
        .unwrap();

        let i = prob_interval(&f("s"), &fa, &w).unwrap();
        assert_eq!((i.lo, i.hi), (r(1, 5), r(7, 10)));
        assert!(prob_interval(&f("t"), &fa, &w).unwrap().is_point());
        let i = prob_interval(&f("u"), &fa, &w).unwrap();
        assert_eq!((i.lo, i.hi), (r(0, 1), r(1, 1)));
        assert!(matches!(
            prob_interval(&f("v"), &fa, &w),
            Err(Error::UnknownSentence(_))
        ));
        assert!(matches!(prob_interval(&f("q"), &fa, &w), Err(Error::Inconsistent(_))));
    }
}
