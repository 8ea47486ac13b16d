//! Exact rational arithmetic for edge-density comparisons.
//!
//! Density decisions (is `|E(S)|/|S|` at least `|E|/|V|`?) must not depend on
//! floating-point rounding, so densities are carried as reduced integer
//! fractions and compared by cross-multiplication in 128-bit arithmetic.

use serde::Serialize;
use std::cmp::Ordering;
use std::fmt;

/// A reduced fraction `num/den` with `den >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Rational {
    num: i64,
    den: i64,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rational {
    /// Builds `num/den` in lowest terms. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "rational with zero denominator");
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num, den).max(1);
        Rational {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub fn zero() -> Self {
        Rational { num: 0, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        // Denominators are positive, so cross-multiplication preserves order.
        let lhs = self.num as i128 * other.den as i128;
        let rhs = other.num as i128 * self.den as i128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_to_lowest_terms() {
        let r = Rational::new(21, 14);
        assert_eq!((r.num(), r.den()), (3, 2));
        assert_eq!(r, Rational::new(3, 2));
        assert_eq!(r.to_string(), "3/2");
    }

    #[test]
    fn normalizes_sign_into_numerator() {
        let r = Rational::new(3, -6);
        assert_eq!((r.num(), r.den()), (-1, 2));
    }

    #[test]
    fn orders_by_exact_value() {
        // 21/14 = 3/2 > 7/5 = 28/20, the comparison that decides the
        // two-cluster dumbbell verdict.
        assert!(Rational::new(21, 14) > Rational::new(28, 20));
        assert!(Rational::new(1, 1) < Rational::new(13, 12));
        assert_eq!(
            Rational::new(2, 4).cmp(&Rational::new(1, 2)),
            Ordering::Equal
        );
    }

    #[test]
    fn integers_display_without_denominator() {
        assert_eq!(Rational::new(4, 4).to_string(), "1");
        assert_eq!(Rational::zero().to_string(), "0");
    }
}
