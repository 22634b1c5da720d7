use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Exact non-negative ratio used to express a power limit relative to the
/// summed test power of all modules. `0.5` is half of that sum.
///
/// Parsed from decimal (`0.35`) or `num/den` notation and always kept reduced,
/// so budget arithmetic never touches floating point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PowerFraction {
    num: u64,
    den: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid power fraction `{0}`: expected a non-negative decimal such as 0.5 or a ratio such as 1/2")]
pub struct ParseFractionError(pub String);

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl PowerFraction {
    pub const ZERO: Self = Self { num: 0, den: 1 };
    pub const ONE: Self = Self { num: 1, den: 1 };

    /// Panics if `den` is zero.
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd(num, den).max(1);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    pub fn numer(self) -> u64 {
        self.num
    }

    pub fn denom(self) -> u64 {
        self.den
    }

    pub fn is_at_least_one(self) -> bool {
        self.num >= self.den
    }

    /// `floor(self * total)`.
    pub fn floor_of(self, total: u64) -> u64 {
        let v = u128::from(self.num) * u128::from(total) / u128::from(self.den);
        u64::try_from(v).unwrap_or(u64::MAX)
    }
}

impl FromStr for PowerFraction {
    type Err = ParseFractionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseFractionError(s.to_string());
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let num: u64 = n.trim().parse().map_err(|_| err())?;
            let den: u64 = d.trim().parse().map_err(|_| err())?;
            if den == 0 {
                return Err(err());
            }
            return Ok(Self::new(num, den));
        }
        let (int, frac) = t.split_once('.').unwrap_or((t, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(err());
        }
        let digits_ok = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
        if !digits_ok(int) || !digits_ok(frac) || frac.len() > 18 {
            return Err(err());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| err())? };
        let frac_v: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| err())? };
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac_v))
            .ok_or_else(err)?;
        Ok(Self::new(num, den))
    }
}

impl fmt::Display for PowerFraction {
    /// Exact decimal when the denominator allows it, `num/den` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = self.den;
        let (mut twos, mut fives) = (0u32, 0u32);
        while d.is_multiple_of(2) {
            d /= 2;
            twos += 1;
        }
        while d.is_multiple_of(5) {
            d /= 5;
            fives += 1;
        }
        if d != 1 {
            return write!(f, "{}/{}", self.num, self.den);
        }
        let places = twos.max(fives);
        let int = self.num / self.den;
        if places == 0 {
            return write!(f, "{int}");
        }
        let scale = 10u128.pow(places);
        let rem = u128::from(self.num % self.den) * scale / u128::from(self.den);
        write!(f, "{int}.{rem:0width$}", width = places as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_and_ratios() {
        assert_eq!("0.5".parse::<PowerFraction>().unwrap(), PowerFraction::new(1, 2));
        assert_eq!(".25".parse::<PowerFraction>().unwrap(), PowerFraction::new(1, 4));
        assert_eq!("2".parse::<PowerFraction>().unwrap(), PowerFraction::new(2, 1));
        assert_eq!("3/9".parse::<PowerFraction>().unwrap(), PowerFraction::new(1, 3));
        for bad in ["", ".", "-0.5", "1/0", "abc", "0.5.1", "50%"] {
            assert!(bad.parse::<PowerFraction>().is_err(), "{bad}");
        }
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(PowerFraction::new(5, 10).to_string(), "0.5");
        assert_eq!(PowerFraction::new(3, 10).to_string(), "0.3");
        assert_eq!(PowerFraction::new(0, 7).to_string(), "0");
        assert_eq!(PowerFraction::new(5, 4).to_string(), "1.25");
        assert_eq!(PowerFraction::new(1, 3).to_string(), "1/3");
        assert_eq!(PowerFraction::new(1, 40).to_string(), "0.025");
    }

    #[test]
    fn floors() {
        assert_eq!(PowerFraction::new(1, 2).floor_of(100), 50);
        assert_eq!(PowerFraction::new(1, 3).floor_of(100), 33);
        assert_eq!(PowerFraction::ZERO.floor_of(100), 0);
    }
}
