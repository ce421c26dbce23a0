//! Prime field arithmetic and exact rational parameters.

use core::fmt;
use core::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
}

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(small) {
            return n == small;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n + 1;
    while !is_prime(c) {
        c += 1;
    }
    c
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// The field of residues modulo a prime `p`. Elements are represented by
/// their canonical residue in `0..p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if is_prime(p) {
            Ok(Self { p })
        } else {
            Err(FieldError::NotPrime(p))
        }
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.p as usize
    }

    /// Canonical residue of a signed integer.
    #[inline]
    pub fn reduce(&self, c: i64) -> u64 {
        c.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn reduce_i128(&self, c: i128) -> u64 {
        c.rem_euclid(self.p as i128) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.p)
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        pow_mod(a, e, self.p)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        let a = a % self.p;
        if a == 0 {
            None
        } else {
            Some(pow_mod(a, self.p - 2, self.p))
        }
    }

    /// `a * c` for a signed integer coefficient `c`.
    #[inline]
    pub fn scale(&self, c: i64, a: u64) -> u64 {
        self.mul(self.reduce(c), a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot parse {0:?} as a non-negative rational")]
    Parse(alloc::string::String),
}

/// Non-negative rational `num / den`, kept in lowest terms.
///
/// Used for density parameters such as ε and β so that threshold tests like
/// `α ≤ εp` are decided exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: u64,
    den: u64,
}

impl Rational {
    pub fn new(num: u64, den: u64) -> Result<Self, RationalError> {
        if den == 0 {
            return Err(RationalError::ZeroDenominator);
        }
        let g = gcd(num, den).max(1);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub const fn integer(n: u64) -> Self {
        Self { num: n, den: 1 }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// `self ≥ 1`.
    pub fn at_least_one(&self) -> bool {
        self.num >= self.den
    }

    /// Exact test of `value ≤ self · scale`.
    pub fn admits(&self, value: u64, scale: u64) -> bool {
        value as u128 * self.den as u128 <= self.num as u128 * scale as u128
    }

    /// `⌊self · scale⌋`.
    pub fn floor_times(&self, scale: u64) -> u64 {
        (self.num as u128 * scale as u128 / self.den as u128) as u64
    }

    /// `⌈self · scale⌉`.
    pub fn ceil_times(&self, scale: u64) -> u64 {
        let n = self.num as u128 * scale as u128;
        n.div_ceil(self.den as u128) as u64
    }

    /// `scale / self`, as an exact rational. `None` when `self` is zero.
    pub fn recip_times(&self, scale: u64) -> Option<Rational> {
        if self.num == 0 {
            return None;
        }
        let n = scale as u128 * self.den as u128;
        let d = self.num as u128;
        let g = gcd128(n, d);
        let (n, d) = (n / g, d / g);
        if n > u64::MAX as u128 || d > u64::MAX as u128 {
            return None;
        }
        Some(Rational {
            num: n as u64,
            den: d as u64,
        })
    }

    pub fn partial_cmp_value(&self, other: &Rational) -> core::cmp::Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

fn gcd128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.partial_cmp_value(other)
    }
}

impl FromStr for Rational {
    type Err = RationalError;

    /// Accepts `a/b`, integers, and plain decimals such as `0.25`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || RationalError::Parse(alloc::string::String::from(s));
        if let Some((n, d)) = s.split_once('/') {
            let n: u64 = n.trim().parse().map_err(|_| bad())?;
            let d: u64 = d.trim().parse().map_err(|_| bad())?;
            return Rational::new(n, d);
        }
        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        let all_digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
        if !all_digits(int_part) || !all_digits(frac_part) || frac_part.len() > 18 {
            return Err(bad());
        }
        let den = 10u64.pow(frac_part.len() as u32);
        let int: u64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| bad())?
        };
        let frac: u64 = if frac_part.is_empty() {
            0
        } else {
            frac_part.parse().map_err(|_| bad())?
        };
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(bad)?;
        Rational::new(num, den)
    }
}

impl fmt::Display for Rational {
    /// Finite decimal when the denominator divides a power of ten, else `a/b`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = self.den;
        let mut twos = 0u32;
        let mut fives = 0u32;
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
        let digits = twos.max(fives);
        if digits == 0 {
            return write!(f, "{}", self.num);
        }
        let scale = 10u128.pow(digits);
        let scaled = self.num as u128 * (scale / self.den as u128);
        let int = scaled / scale;
        let frac = scaled % scale;
        write!(f, "{}.{:0width$}", int, frac, width = digits as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn primality_matches_trial_division() {
        let trial = |n: u64| {
            n >= 2
                && (2..n)
                    .take_while(|d| d * d <= n)
                    .all(|d| !n.is_multiple_of(d))
        };
        for n in 0..5000 {
            assert_eq!(is_prime(n), trial(n), "n = {n}");
        }
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn field_inverse_roundtrip() {
        let f = PrimeField::new(101).unwrap();
        for a in 1..101 {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
        assert_eq!(f.inv(0), None);
        assert_eq!(f.reduce(-3), 98);
        assert!(PrimeField::new(91).is_err());
    }

    #[test]
    fn rational_parse_and_display() {
        let r: Rational = "0.25".parse().unwrap();
        assert_eq!((r.num(), r.den()), (1, 4));
        assert_eq!(r.to_string(), "0.25");
        assert_eq!("1.0".parse::<Rational>().unwrap().to_string(), "1");
        assert_eq!("1/3".parse::<Rational>().unwrap().to_string(), "1/3");
        assert!("-0.5".parse::<Rational>().is_err());
        assert!("".parse::<Rational>().is_err());
        let eps: Rational = "0.5".parse().unwrap();
        assert!(eps.admits(50, 101));
        assert!(!eps.admits(51, 101));
        assert_eq!(eps.floor_times(101), 50);
        assert_eq!(eps.ceil_times(101), 51);
    }
}
