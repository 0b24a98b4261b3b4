//! Exact money arithmetic in integer cents.
//!
//! All ledger, welfare, and price math in the workspace runs on [`Money`]
//! so sums are order-independent and never accumulate floating-point drift.
//! On the wire and in dataset files money serializes as a plain integer
//! number of cents (fields are named `*_cents` by convention).

use serde::{Deserialize, Serialize};
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

/// A signed dollar amount with cent precision, stored as integer cents.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Money(i64);

impl Money {
    pub const ZERO: Money = Money(0);

    pub const fn from_cents(cents: i64) -> Self {
        Money(cents)
    }

    pub const fn cents(self) -> i64 {
        self.0
    }

    /// Round a dollar amount to cents, half away from zero.
    pub fn from_dollars(dollars: f64) -> Self {
        let cents = (dollars * 100.0).abs() + 0.5;
        let cents = cents.floor() as i64;
        Money(if dollars < 0.0 { -cents } else { cents })
    }

    pub fn as_dollars(self) -> f64 {
        self.0 as f64 / 100.0
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// Scale by a ratio, rounding half away from zero once at the end.
    /// Integral factors stay cent-exact.
    pub fn scale(self, factor: f64) -> Self {
        if factor.fract() == 0.0 && factor.abs() < 1e15 {
            Money(self.0 * factor as i64)
        } else {
            Money::from_dollars(self.as_dollars() * factor)
        }
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        write!(f, "{}${}.{:02}", sign, abs / 100, abs % 100)
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0 + rhs.0)
    }
}

impl AddAssign for Money {
    fn add_assign(&mut self, rhs: Money) {
        self.0 += rhs.0;
    }
}

impl Sub for Money {
    type Output = Money;
    fn sub(self, rhs: Money) -> Money {
        Money(self.0 - rhs.0)
    }
}

impl SubAssign for Money {
    fn sub_assign(&mut self, rhs: Money) {
        self.0 -= rhs.0;
    }
}

impl Neg for Money {
    type Output = Money;
    fn neg(self) -> Money {
        Money(-self.0)
    }
}

impl Mul<i64> for Money {
    type Output = Money;
    fn mul(self, rhs: i64) -> Money {
        Money(self.0 * rhs)
    }
}

impl Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        Money(iter.map(|m| m.0).sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_formats_dollars_and_cents() {
        assert_eq!(Money::from_cents(559).to_string(), "$5.59");
        assert_eq!(Money::from_cents(-1200).to_string(), "-$12.00");
        assert_eq!(Money::ZERO.to_string(), "$0.00");
        assert_eq!(Money::from_cents(5).to_string(), "$0.05");
    }

    #[test]
    fn from_dollars_rounds_half_up() {
        assert_eq!(Money::from_dollars(5.59).cents(), 559);
        assert_eq!(Money::from_dollars(10.995).cents(), 1100);
        assert_eq!(Money::from_dollars(0.004).cents(), 0);
        assert_eq!(Money::from_dollars(-2.005).cents(), -201);
    }

    #[test]
    fn integral_scale_is_exact() {
        assert_eq!(Money::from_cents(1099).scale(2.0).cents(), 2198);
        assert_eq!(Money::from_cents(559).scale(1.0).cents(), 559);
    }

    #[test]
    fn sums_are_exact() {
        let total: Money = [559, 951, 1099].iter().map(|&c| Money::from_cents(c)).sum();
        assert_eq!(total.cents(), 2609);
    }
}
