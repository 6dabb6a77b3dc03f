//! Coupled states by seeding and lowering, in high-precision fixed point.
//!
//! For each `J` from `J1 + J2` down to `|J1 - J2|` the top state `|J,J>` is
//! the unit vector in the `M = J` block orthogonal to every `|J',J>` with
//! `J' > J`, with the component on the largest `M1` made positive. The rest
//! of the multiplet follows from
//! `J- |J,M> = sqrt((J+M)(J-M+1)) |J,M-1>` with `J- = J1- + J2-`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactval::SqrtRational;
use crate::halfint::TwoJ;
use crate::tables::CgKey;

const GUARD_BITS: u64 = 64;
pub const MIN_PRECISION_DIGITS: u32 = 30;

/// A real number `raw / 2^bits` carrying its own scale.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HighPrecision {
    raw: BigInt,
    bits: u64,
}

impl HighPrecision {
    fn zero(bits: u64) -> Self {
        HighPrecision { raw: BigInt::zero(), bits }
    }

    fn from_raw(raw: BigInt, bits: u64) -> Self {
        HighPrecision { raw, bits }
    }

    /// `sqrt(p/q)` rounded down to the scale.
    fn sqrt_ratio(p: &BigUint, q: &BigUint, bits: u64) -> Self {
        let scaled = (p << (2 * bits)) / q;
        HighPrecision {
            raw: BigInt::from(scaled.sqrt()),
            bits,
        }
    }

    /// The exact value rounded to this scale.
    pub fn from_exact(v: &SqrtRational, bits: u64) -> Self {
        let mag = Self::sqrt_ratio(v.num(), v.den(), bits);
        HighPrecision {
            raw: BigInt::from_biguint(v.sign(), mag.raw.magnitude().clone()),
            bits,
        }
    }

    fn mul(&self, other: &HighPrecision) -> HighPrecision {
        HighPrecision {
            raw: (&self.raw * &other.raw) >> self.bits,
            bits: self.bits,
        }
    }

    fn div(&self, other: &HighPrecision) -> HighPrecision {
        HighPrecision {
            raw: (&self.raw << self.bits) / &other.raw,
            bits: self.bits,
        }
    }

    fn add_assign(&mut self, other: &HighPrecision) {
        self.raw += &other.raw;
    }

    fn sub_assign(&mut self, other: &HighPrecision) {
        self.raw -= &other.raw;
    }

    fn sqrt(&self) -> HighPrecision {
        HighPrecision {
            raw: BigInt::from((self.raw.magnitude() << self.bits).sqrt()),
            bits: self.bits,
        }
    }

    pub fn sign(&self) -> Sign {
        self.raw.sign()
    }

    pub fn to_f64(&self) -> f64 {
        let shift = self.bits.saturating_sub(60);
        let head = (&self.raw >> shift).to_f64().unwrap_or(f64::NAN);
        head / 2f64.powi((self.bits - shift) as i32)
    }

    /// `true` when `|self - exact| <= 10^-exp10`.
    pub fn within(&self, exact: &SqrtRational, exp10: u32) -> bool {
        let target = HighPrecision::from_exact(exact, self.bits);
        let gap = (&self.raw - &target.raw).abs();
        // gap / 2^bits <= 10^-e  <=>  gap * 10^e <= 2^bits
        gap * BigInt::from(10u32).pow(exp10) <= BigInt::from(1u8) << self.bits
    }

    /// Absolute difference to an exact value as `f64` (for reporting).
    pub fn distance(&self, exact: &SqrtRational) -> f64 {
        let target = HighPrecision::from_exact(exact, self.bits);
        HighPrecision::from_raw(&self.raw - &target.raw, self.bits).to_f64().abs()
    }

    /// Truncated decimal expansion with `decimals` digits after the point.
    pub fn to_decimal(&self, decimals: u32) -> String {
        let scaled = (self.raw.magnitude() * BigUint::from(10u32).pow(decimals)) >> self.bits;
        let digits = format!("{:0>width$}", scaled.to_string(), width = decimals as usize + 1);
        let (int, frac) = digits.split_at(digits.len() - decimals as usize);
        let sign = if self.raw.is_negative() { "-" } else { "" };
        if decimals == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }
}

/// All coefficients of one `(J1, J2)` pair from the lowering recursion.
#[derive(Clone, Debug)]
pub struct RecursionTable {
    pub j1: TwoJ,
    pub j2: TwoJ,
    pub precision_digits: u32,
    pub entries: BTreeMap<CgKey, HighPrecision>,
}

impl RecursionTable {
    pub fn get(&self, key: &CgKey) -> Option<&HighPrecision> {
        self.entries.get(key)
    }
}

/// One multiplet member `|J,M>`, stored on its diagonal `u1 + u2 = s` indexed by `u1 - lo`.
struct BlockVector {
    lo: u32,
    comps: Vec<HighPrecision>,
}

fn dot(a: &[HighPrecision], b: &[HighPrecision], bits: u64) -> HighPrecision {
    let raw: BigInt = a.iter().zip(b).map(|(x, y)| &x.raw * &y.raw).sum();
    HighPrecision::from_raw(raw >> bits, bits)
}

/// Builds every `<(M1,M2)|J,M>` by Gram-Schmidt seeding and repeated lowering.
pub fn lowering_recursion_table(j1: TwoJ, j2: TwoJ, precision_digits: u32) -> Result<RecursionTable> {
    if precision_digits < MIN_PRECISION_DIGITS {
        return Err(Error::PrecisionTooLow {
            min: MIN_PRECISION_DIGITS,
            got: precision_digits,
        });
    }
    let bits = (precision_digits as f64 * std::f64::consts::LOG2_10).ceil() as u64 + GUARD_BITS;
    let (a, b) = (j1.twice(), j2.twice());
    let span = |s: u32| (s.saturating_sub(b), s.min(a));

    // states[n][s] = |J = J1+J2-n, M> on diagonal s
    let mut states: Vec<BTreeMap<u32, BlockVector>> = Vec::new();
    let residual_exp = precision_digits / 2;

    for n in 0..=a.min(b) {
        let two_j = a + b - 2 * n;
        let top = a + b - n;
        let (lo, hi) = span(top);
        let dim = (hi - lo + 1) as usize;

        // seed: start from the largest-M1 basis vector, remove earlier multiplets
        let mut seed = vec![HighPrecision::zero(bits); dim];
        seed[dim - 1] = HighPrecision::from_raw(BigInt::from(1u8) << bits, bits);
        for _pass in 0..2 {
            for earlier in &states {
                let prev = &earlier[&top];
                let overlap = dot(&seed, &prev.comps, bits);
                for (c, p) in seed.iter_mut().zip(&prev.comps) {
                    c.sub_assign(&overlap.mul(p));
                }
            }
        }
        let norm = dot(&seed, &seed, bits).sqrt();
        if norm.raw.is_zero() {
            return Err(Error::PrecisionExhausted {
                residual: "0".into(),
                limit_exp: residual_exp,
            });
        }
        for c in seed.iter_mut() {
            *c = c.div(&norm);
        }
        if seed[dim - 1].raw.is_negative() {
            for c in seed.iter_mut() {
                c.raw = -c.raw.clone();
            }
        }
        for earlier in &states {
            let overlap = dot(&seed, &earlier[&top].comps, bits);
            let limit = HighPrecision::from_raw(
                (BigInt::from(1u8) << bits) / BigInt::from(10u32).pow(residual_exp),
                bits,
            );
            if overlap.raw.abs() > limit.raw {
                return Err(Error::PrecisionExhausted {
                    residual: format!("{:e}", overlap.to_f64().abs()),
                    limit_exp: residual_exp,
                });
            }
        }

        let mut multiplet = BTreeMap::new();
        multiplet.insert(top, BlockVector { lo, comps: seed });

        // lower from M = J down to M = -J
        for s in (n + 1..=top).rev() {
            let current = &multiplet[&s];
            let (nlo, nhi) = span(s - 1);
            let mut next = vec![HighPrecision::zero(bits); (nhi - nlo + 1) as usize];
            // J+M and J-M+1 for the state being lowered
            let two_m = 2 * s as i64 - (a + b) as i64;
            let j_plus_m = ((two_j as i64 + two_m) / 2) as u64;
            let j_minus_m_plus_1 = ((two_j as i64 - two_m) / 2 + 1) as u64;
            let norm = BigUint::from(j_plus_m * j_minus_m_plus_1);
            for (i, c) in current.comps.iter().enumerate() {
                if c.raw.is_zero() {
                    continue;
                }
                let u1 = current.lo + i as u32;
                let u2 = s - u1;
                if u1 > 0 {
                    let ladder = BigUint::from(u1 as u64 * (a - u1 + 1) as u64);
                    let f = HighPrecision::sqrt_ratio(&ladder, &norm, bits);
                    next[(u1 - 1 - nlo) as usize].add_assign(&c.mul(&f));
                }
                if u2 > 0 {
                    let ladder = BigUint::from(u2 as u64 * (b - u2 + 1) as u64);
                    let f = HighPrecision::sqrt_ratio(&ladder, &norm, bits);
                    next[(u1 - nlo) as usize].add_assign(&c.mul(&f));
                }
            }
            multiplet.insert(s - 1, BlockVector { lo: nlo, comps: next });
        }
        states.push(multiplet);
    }

    let mut entries = BTreeMap::new();
    for (n, multiplet) in states.into_iter().enumerate() {
        let two_j = a + b - 2 * n as u32;
        for (s, block) in multiplet {
            for (i, c) in block.comps.into_iter().enumerate() {
                let u1 = block.lo + i as u32;
                let u2 = s - u1;
                entries.insert(CgKey::from_counts(j1, j2, two_j, u1, u2), c);
            }
        }
    }
    Ok(RecursionTable {
        j1,
        j2,
        precision_digits,
        entries,
    })
}
