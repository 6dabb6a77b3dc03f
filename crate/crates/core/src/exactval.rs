//! Exact values of the form `±sqrt(p/q)`.
//!
//! Every Clebsch-Gordan coefficient is a signed square root of a rational.
//! Storage keeps `p/q` in lowest terms only; square factors are left inside
//! the radical, so equality is a plain comparison of `(sign, num, den)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Mul, Neg};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `sign * sqrt(num / den)` in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SqrtRationalRepr", into = "SqrtRationalRepr")]
pub struct SqrtRational {
    sign: Sign,
    num: BigUint,
    den: BigUint,
}

impl SqrtRational {
    pub fn zero() -> Self {
        SqrtRational {
            sign: Sign::NoSign,
            num: BigUint::zero(),
            den: BigUint::one(),
        }
    }

    pub fn one() -> Self {
        SqrtRational {
            sign: Sign::Plus,
            num: BigUint::one(),
            den: BigUint::one(),
        }
    }

    /// `sign(s) * sqrt(p/q)`, reduced to lowest terms.
    pub fn from_signed_ratio(s: &BigInt, p: BigUint, q: BigUint) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::canonical(s.sign(), p, q))
    }

    /// Convenience constructor for small radicands; `sign` is taken by its signum.
    pub fn from_parts(sign: i64, p: u64, q: u64) -> Result<Self> {
        Self::from_signed_ratio(&BigInt::from(sign), BigUint::from(p), BigUint::from(q))
    }

    /// Inverse of [`SqrtRational::square_signed`]: `sign(r) * sqrt(|r|)`.
    pub fn from_signed_square(r: &BigRational) -> Self {
        let sign = r.numer().sign() * r.denom().sign();
        let num = r.numer().magnitude().clone();
        let den = r.denom().magnitude().clone();
        Self::canonical(sign, num, den)
    }

    fn canonical(sign: Sign, p: BigUint, q: BigUint) -> Self {
        if sign == Sign::NoSign || p.is_zero() {
            return Self::zero();
        }
        let g = p.gcd(&q);
        SqrtRational {
            sign,
            num: p / &g,
            den: q / g,
        }
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// `-1`, `0` or `+1`.
    pub fn signum(&self) -> i8 {
        match self.sign {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn num(&self) -> &BigUint {
        &self.num
    }

    pub fn den(&self) -> &BigUint {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.sign == Sign::NoSign
    }

    /// The signed square `sign(x) * x^2`, i.e. `sign * num / den`.
    pub fn square_signed(&self) -> BigRational {
        BigRational::new(
            BigInt::from_biguint(self.sign, self.num.clone()),
            BigInt::from(self.den.clone()),
        )
    }

    /// The plain square `x^2 = num / den`.
    pub fn square(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num.clone()), BigInt::from(self.den.clone()))
    }

    /// Exact sum. Both operands must be rational multiples of one radical.
    pub fn add(&self, other: &SqrtRational) -> Result<SqrtRational> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        // self / other = ±sqrt(ratio); ratio must be a rational square.
        let cross_num = &self.num * &other.den;
        let cross_den = &self.den * &other.num;
        let product = &cross_num * &cross_den;
        let root = product.sqrt();
        if &root * &root != product {
            return Err(Error::IncompatibleRadicals(
                format!("{}/{}", self.num, self.den),
                format!("{}/{}", other.num, other.den),
            ));
        }
        // |self| / |other| = root / cross_den
        let ratio = BigRational::new(BigInt::from(root), BigInt::from(cross_den));
        let signed_ratio = if self.sign == other.sign { ratio } else { -ratio };
        let other_sign = if other.sign == Sign::Minus {
            -BigRational::one()
        } else {
            BigRational::one()
        };
        // self + other = other * (1 + self/other)
        let factor = other_sign * (BigRational::one() + signed_ratio);
        let factor_sq_signed = &factor * factor.abs();
        Ok(SqrtRational::from_signed_square(&factor_sq_signed) * other.abs())
    }

    pub fn abs(&self) -> SqrtRational {
        let mut out = self.clone();
        if out.sign == Sign::Minus {
            out.sign = Sign::Plus;
        }
        out
    }

    pub fn to_f64(&self) -> f64 {
        let value = (self.num.to_f64().unwrap_or(f64::NAN) / self.den.to_f64().unwrap_or(f64::NAN)).sqrt();
        match self.sign {
            Sign::Minus => -value,
            Sign::NoSign => 0.0,
            Sign::Plus => value,
        }
    }

    /// Correctly rounded (half-up) decimal expansion with `digits` significant digits.
    pub fn to_decimal(&self, digits: u32) -> String {
        let digits = digits.max(1);
        if self.is_zero() {
            return place_point("0".repeat(digits as usize), digits as i64 - 1);
        }
        let p = &self.num;
        let q = &self.den;
        let mut exp = decimal_exponent(p, q);
        let mut decimals = digits as i64 - 1 - exp;
        let mut mantissa = rounded_scaled_sqrt(p, q, decimals);
        let limit = BigUint::from(10u32).pow(digits);
        if mantissa >= limit {
            // rounding carried into a new leading digit
            mantissa /= 10u32;
            exp += 1;
            decimals = digits as i64 - 1 - exp;
        }
        let text = place_point(mantissa.to_string(), decimals);
        if self.sign == Sign::Minus {
            format!("-{text}")
        } else {
            text
        }
    }

    /// Pulls square factors up to `1000^2` out of the radical, e.g. `sqrt(8/9)` -> `2/3*sqrt(2)`.
    pub fn to_surd_string(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let (outer_n, inner_n) = split_square_factors(&self.num);
        let (outer_d, inner_d) = split_square_factors(&self.den);
        // sqrt(a/b) = sqrt(a*b)/b keeps the radical integral
        let radicand = &inner_n * &inner_d;
        let outer_den = &outer_d * &inner_d;
        let g = outer_n.gcd(&outer_den);
        let (on, od) = (&outer_n / &g, &outer_den / &g);
        let mut out = String::new();
        if self.sign == Sign::Minus {
            out.push('-');
        }
        let coeff = if od.is_one() {
            on.to_string()
        } else {
            format!("{on}/{od}")
        };
        if radicand.is_one() {
            out.push_str(&coeff);
        } else if coeff == "1" {
            out.push_str(&format!("sqrt({radicand})"));
        } else {
            out.push_str(&format!("{coeff}*sqrt({radicand})"));
        }
        out
    }
}

impl Default for SqrtRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl Mul for &SqrtRational {
    type Output = SqrtRational;

    fn mul(self, rhs: &SqrtRational) -> SqrtRational {
        let sign = self.sign * rhs.sign;
        SqrtRational::canonical(sign, &self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Mul for SqrtRational {
    type Output = SqrtRational;

    fn mul(self, rhs: SqrtRational) -> SqrtRational {
        &self * &rhs
    }
}

impl Neg for SqrtRational {
    type Output = SqrtRational;

    fn neg(mut self) -> SqrtRational {
        self.sign = -self.sign;
        self
    }
}

impl PartialOrd for SqrtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SqrtRational {
    /// Numeric order.
    fn cmp(&self, other: &Self) -> Ordering {
        self.square_signed().cmp(&other.square_signed())
    }
}

/// `"0"`, `"1"`, `"-1"`, or `"±sqrt(p/q)"` (`"sqrt(p)"` when `q = 1`).
impl fmt::Display for SqrtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = if self.sign == Sign::Minus { "-" } else { "" };
        if self.is_zero() {
            f.write_str("0")
        } else if self.num.is_one() && self.den.is_one() {
            write!(f, "{prefix}1")
        } else if self.den.is_one() {
            write!(f, "{prefix}sqrt({})", self.num)
        } else {
            write!(f, "{prefix}sqrt({}/{})", self.num, self.den)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SqrtRationalRepr {
    sign: i8,
    num: String,
    den: String,
}

impl From<SqrtRational> for SqrtRationalRepr {
    fn from(v: SqrtRational) -> Self {
        SqrtRationalRepr {
            sign: v.signum(),
            num: v.num.to_string(),
            den: v.den.to_string(),
        }
    }
}

impl TryFrom<SqrtRationalRepr> for SqrtRational {
    type Error = Error;

    fn try_from(r: SqrtRationalRepr) -> Result<Self> {
        let parse = |s: &str| {
            s.parse::<BigUint>()
                .map_err(|_| Error::Malformed(format!("not a non-negative integer: {s:?}")))
        };
        let num = parse(&r.num)?;
        let den = parse(&r.den)?;
        if !matches!(r.sign, -1..=1) {
            return Err(Error::Malformed(format!("sign must be -1, 0 or 1, got {}", r.sign)));
        }
        if (r.sign == 0) != num.is_zero() {
            return Err(Error::Malformed("sign is zero exactly when num is zero".into()));
        }
        SqrtRational::from_signed_ratio(&BigInt::from(r.sign), num, den)
    }
}

/// `floor(log10(sqrt(p/q)))` for `p > 0`.
fn decimal_exponent(p: &BigUint, q: &BigUint) -> i64 {
    // sqrt(p/q) >= 10^e  <=>  p * 10^{-2e} >= q  (or p >= q * 10^{2e})
    let at_least = |e: i64| -> bool {
        if e >= 0 {
            *p >= q * pow10(2 * e as u64)
        } else {
            p * pow10((-2 * e) as u64) >= *q
        }
    };
    let bits = p.bits() as f64 - q.bits() as f64;
    let mut e = (bits * std::f64::consts::LOG10_2 / 2.0).floor() as i64;
    while !at_least(e) {
        e -= 1;
    }
    while at_least(e + 1) {
        e += 1;
    }
    e
}

/// `round(sqrt(p/q) * 10^t)`, half-up, exact.
fn rounded_scaled_sqrt(p: &BigUint, q: &BigUint, t: i64) -> BigUint {
    let (a, b) = if t >= 0 {
        (p * pow10(2 * t as u64), q.clone())
    } else {
        (p.clone(), q * pow10((-2 * t) as u64))
    };
    let floor = (&a / &b).sqrt();
    let twice_plus_one: BigUint = &floor * 2u32 + 1u32;
    // round up iff sqrt(a/b) >= floor + 1/2  <=>  4a >= b (2 floor + 1)^2
    if a * 4u32 >= b * &twice_plus_one * &twice_plus_one {
        floor + 1u32
    } else {
        floor
    }
}

fn pow10(e: u64) -> BigUint {
    BigUint::from(10u32).pow(e)
}

fn place_point(digits: String, decimals: i64) -> String {
    if decimals <= 0 {
        let mut s = digits;
        s.extend(std::iter::repeat_n('0', (-decimals) as usize));
        return s;
    }
    let decimals = decimals as usize;
    let padded = if digits.len() <= decimals {
        format!("{}{}", "0".repeat(decimals + 1 - digits.len()), digits)
    } else {
        digits
    };
    let (int, frac) = padded.split_at(padded.len() - decimals);
    format!("{int}.{frac}")
}

fn split_square_factors(value: &BigUint) -> (BigUint, BigUint) {
    let mut outer = BigUint::one();
    let mut inner = value.clone();
    let mut f = 2u32;
    while f <= 1000 {
        let sq = BigUint::from(f * f);
        while (&inner % &sq).is_zero() {
            inner /= &sq;
            outer *= f;
        }
        f += 1;
    }
    (outer, inner)
}
