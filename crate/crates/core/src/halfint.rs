//! Half-integer angular momenta stored as doubled integers.
//!
//! A spin-`J` object is bookkept as `j = 2J` two-state constituents, of which
//! `u = J + M` point up and `d = J - M` point down. All three are plain
//! non-negative integers, so no fractions ever enter index arithmetic.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// An angular momentum `J >= 0`, stored as `2J`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TwoJ(u32);

impl TwoJ {
    pub const ZERO: TwoJ = TwoJ(0);

    pub const fn new(twice: u32) -> Self {
        TwoJ(twice)
    }

    /// `2J`, which is also the number of spin-1/2 constituents.
    pub const fn twice(self) -> u32 {
        self.0
    }

    pub fn is_half_odd(self) -> bool {
        self.0 % 2 == 1
    }

    /// All projections `M = J, J-1, ..., -J`.
    pub fn projections(self) -> impl DoubleEndedIterator<Item = Projection> {
        let j = self.0 as i32;
        (0..=self.0).rev().map(move |u| Projection(2 * u as i32 - j))
    }

    /// The projection with `u` constituents pointing up.
    pub fn projection_from_u(self, u: u32) -> Result<Projection> {
        if u > self.0 {
            return Err(Error::ProjectionOutOfRange {
                j: self.to_string(),
                m: format_doubled(2 * u as i64 - self.0 as i64),
            });
        }
        Ok(Projection(2 * u as i32 - self.0 as i32))
    }
}

impl fmt::Display for TwoJ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_doubled(self.0 as i64))
    }
}

impl FromStr for TwoJ {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_half_integer(s)
    }
}

/// A magnetic projection `M`, stored as `2M`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Projection(i32);

impl Projection {
    pub const fn new(twice_m: i32) -> Self {
        Projection(twice_m)
    }

    pub const fn twice_m(self) -> i32 {
        self.0
    }

    /// Checks parity and `|M| <= J` against the owning momentum.
    pub fn validate(self, j: TwoJ) -> Result<()> {
        if (self.0 - j.0 as i32).rem_euclid(2) != 0 {
            return Err(Error::ParityMismatch {
                j: j.to_string(),
                m: self.to_string(),
            });
        }
        if self.0.unsigned_abs() > j.0 {
            return Err(Error::ProjectionOutOfRange {
                j: j.to_string(),
                m: self.to_string(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_doubled(self.0 as i64))
    }
}

impl FromStr for Projection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_projection(s)
    }
}

impl std::ops::Neg for Projection {
    type Output = Projection;

    fn neg(self) -> Projection {
        Projection(-self.0)
    }
}

impl std::ops::Add for Projection {
    type Output = Projection;

    fn add(self, rhs: Projection) -> Projection {
        Projection(self.0 + rhs.0)
    }
}

/// Two momenta coupled to `J = J1 + J2 - n`, i.e. with `n` spin-0 pairs removed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CouplingSpec {
    j1: TwoJ,
    j2: TwoJ,
    n: u32,
}

impl CouplingSpec {
    pub fn new(j1: TwoJ, j2: TwoJ, n: u32) -> Result<Self> {
        let max = j1.0.min(j2.0);
        if n > max {
            return Err(Error::PairCountOutOfRange { n, max });
        }
        Ok(CouplingSpec { j1, j2, n })
    }

    /// Builds the spec from a requested total momentum, enforcing the triangle rule.
    pub fn from_total(j1: TwoJ, j2: TwoJ, total: TwoJ) -> Result<Self> {
        let sum = j1.0 + j2.0;
        let diff = j1.0.abs_diff(j2.0);
        if total.0 > sum || total.0 < diff || !(sum - total.0).is_multiple_of(2) {
            return Err(Error::Triangle {
                j1: j1.to_string(),
                j2: j2.to_string(),
                j: total.to_string(),
            });
        }
        Ok(CouplingSpec {
            j1,
            j2,
            n: (sum - total.0) / 2,
        })
    }

    pub fn j1(&self) -> TwoJ {
        self.j1
    }

    pub fn j2(&self) -> TwoJ {
        self.j2
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn total(&self) -> TwoJ {
        TwoJ(self.j1.0 + self.j2.0 - 2 * self.n)
    }
}

/// Parses `"k"`, `"k/2"`, `"k.0"` or `"k.5"` into a doubled non-negative value.
///
/// ```
/// use cgomega::halfint::parse_half_integer;
/// assert_eq!(parse_half_integer("3/2").unwrap().twice(), 3);
/// assert_eq!(parse_half_integer("2.5").unwrap().twice(), 5);
/// ```
pub fn parse_half_integer(text: &str) -> Result<TwoJ> {
    let doubled = parse_doubled(text)?;
    if doubled < 0 {
        return Err(Error::NegativeMomentum(text.trim().to_string()));
    }
    u32::try_from(doubled)
        .map(TwoJ)
        .map_err(|_| Error::InvalidHalfInteger(text.trim().to_string()))
}

/// Signed variant of [`parse_half_integer`] for magnetic projections.
pub fn parse_projection(text: &str) -> Result<Projection> {
    let doubled = parse_doubled(text)?;
    i32::try_from(doubled)
        .map(Projection)
        .map_err(|_| Error::InvalidHalfInteger(text.trim().to_string()))
}

fn parse_doubled(text: &str) -> Result<i64> {
    let trimmed = text.trim();
    let bad = || Error::InvalidHalfInteger(trimmed.to_string());
    let (negative, body) = match trimmed.as_bytes().first() {
        Some(b'-') => (true, &trimmed[1..]),
        Some(b'+') => (false, &trimmed[1..]),
        _ => (false, trimmed),
    };
    let digits = |s: &str| -> Result<i64> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        s.parse::<i64>().ok().filter(|v| *v <= i32::MAX as i64).ok_or_else(bad)
    };

    let doubled = if let Some((whole, den)) = body.split_once('/') {
        let k = digits(whole)?;
        match digits(den)? {
            1 => 2 * k,
            2 => k,
            _ => return Err(bad()),
        }
    } else if let Some((whole, frac)) = body.split_once('.') {
        let k = digits(whole)?;
        let (head, tail) = frac.split_at(frac.len().min(1));
        if !tail.bytes().all(|b| b == b'0') {
            return Err(bad());
        }
        match head {
            "0" => 2 * k,
            "5" => 2 * k + 1,
            _ => return Err(bad()),
        }
    } else {
        2 * digits(body)?
    };
    Ok(if negative { -doubled } else { doubled })
}

/// Renders a doubled value as `k/2` when odd and as a plain integer otherwise.
pub fn format_doubled(doubled: i64) -> String {
    if doubled % 2 == 0 {
        (doubled / 2).to_string()
    } else {
        format!("{doubled}/2")
    }
}

/// Number of up constituents, `u = J + M`.
pub fn u_of(j: TwoJ, m: Projection) -> Result<u32> {
    m.validate(j)?;
    Ok(((j.0 as i32 + m.0) / 2) as u32)
}

/// Number of down constituents, `d = J - M`.
pub fn d_of(j: TwoJ, m: Projection) -> Result<u32> {
    m.validate(j)?;
    Ok(((j.0 as i32 - m.0) / 2) as u32)
}

/// `J1 + J2, J1 + J2 - 1, ..., |J1 - J2|`.
pub fn allowed_total_j(j1: TwoJ, j2: TwoJ) -> Vec<TwoJ> {
    let top = j1.0 + j2.0;
    (0..=j1.0.min(j2.0)).map(|n| TwoJ(top - 2 * n)).collect()
}
