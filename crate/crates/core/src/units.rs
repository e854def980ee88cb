//! Exact money and bandwidth-fraction arithmetic.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign};

use crate::bidder::Price;

/// Denominator shared by [`Amount`] and [`Share`].
pub const SCALE: u64 = 10_000;

/// Money in 1/10000 currency units.
///
/// Exclusive-use payments are whole units; shared-channel payments carry a
/// bandwidth fraction with four decimal places, so this stays exact.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Amount(u64);

impl Amount {
    pub const ZERO: Amount = Amount(0);

    pub fn from_units(units: u64) -> Self {
        Amount(units * SCALE)
    }

    pub fn from_raw(raw: u64) -> Self {
        Amount(raw)
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    /// `price * count * share`.
    pub fn of(price: Price, count: u32, share: Share) -> Self {
        Amount(price as u64 * count as u64 * share.basis_points() as u64)
    }

    /// Whole currency units, half rounded up.
    pub fn rounded(self) -> u64 {
        (self.0 + SCALE / 2) / SCALE
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / SCALE as f64
    }

    pub fn is_whole(self) -> bool {
        self.0 % SCALE == 0
    }
}

impl Add for Amount {
    type Output = Amount;
    fn add(self, rhs: Amount) -> Amount {
        Amount(self.0 + rhs.0)
    }
}

impl AddAssign for Amount {
    fn add_assign(&mut self, rhs: Amount) {
        self.0 += rhs.0;
    }
}

impl Sum for Amount {
    fn sum<I: Iterator<Item = Amount>>(iter: I) -> Amount {
        iter.fold(Amount::ZERO, Add::add)
    }
}

impl fmt::Display for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let whole = self.0 / SCALE;
        let frac = self.0 % SCALE;
        if frac == 0 {
            write!(f, "{whole}")
        } else {
            let digits = format!("{frac:04}");
            write!(f, "{whole}.{}", digits.trim_end_matches('0'))
        }
    }
}

/// Fraction of a channel's bandwidth in basis points, `0..=10000`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Share(u16);

impl Share {
    pub const FULL: Share = Share(SCALE as u16);
    pub const ZERO: Share = Share(0);

    pub fn from_basis_points(bp: u16) -> Option<Self> {
        (bp as u64 <= SCALE).then_some(Share(bp))
    }

    /// Nearest basis point; `None` outside `[0, 1]`.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !(0.0..=1.0).contains(&x) {
            return None;
        }
        Some(Share((x * SCALE as f64).round() as u16))
    }

    pub fn basis_points(self) -> u16 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / SCALE as f64
    }
}

impl Default for Share {
    fn default() -> Self {
        Share::FULL
    }
}

impl fmt::Display for Share {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_half_up() {
        assert_eq!(Amount::from_raw(25_000).rounded(), 3);
        assert_eq!(Amount::from_raw(24_999).rounded(), 2);
        assert_eq!(Amount::of(7, 1, Share::from_f64(0.3).unwrap()).rounded(), 2);
    }

    #[test]
    fn display_trims() {
        assert_eq!(Amount::from_units(12).to_string(), "12");
        assert_eq!(Amount::from_raw(21_000).to_string(), "2.1");
        assert_eq!(Amount::from_raw(5).to_string(), "0.0005");
    }

    #[test]
    fn share_bounds() {
        assert!(Share::from_f64(1.2).is_none());
        assert!(Share::from_basis_points(10_001).is_none());
        assert_eq!(Share::from_f64(0.4).unwrap().basis_points(), 4000);
    }
}
