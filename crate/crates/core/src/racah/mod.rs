//! Independent oracles for the counting-matrix engine.
//!
//! [`racah_cg`] evaluates the Racah sum exactly with factorials, written in
//! constituent counts `u = J + M`, `d = J - M`. [`recursion`] builds every
//! coupled state by Gram-Schmidt seeding and repeated lowering in high
//! precision. [`verify`] compares the engine against both.

pub mod recursion;
pub mod verify;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::binomial::factorials;
use crate::error::Result;
use crate::exactval::SqrtRational;
use crate::halfint::{u_of, CouplingSpec, Projection, TwoJ};

pub use recursion::{lowering_recursion_table, HighPrecision, RecursionTable};
pub use verify::{verify_against_oracles, verify_with, VerificationReport, VerifyOptions};

/// The Racah sum split into its diagonal-constant radicand and the signed term sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RacahTermSum {
    /// `(j+1) u! d! (j1-n)! (j2-n)! u1! d1! u2! d2! / ((j+1+n)! n!)`
    pub prefactor: BigRational,
    /// `sum_k (-1)^k C(n,k) / ((d1-k)! (u1-n+k)! (d2-n+k)! (u2-k)!)`
    pub term_sum: BigRational,
}

impl RacahTermSum {
    pub fn value(&self) -> SqrtRational {
        let signed_square = &self.term_sum * self.term_sum.abs() * &self.prefactor;
        SqrtRational::from_signed_square(&signed_square)
    }

    /// Largest numerator or denominator among the pieces, in bits.
    pub fn max_bits(&self) -> u64 {
        [
            self.prefactor.numer(),
            self.prefactor.denom(),
            self.term_sum.numer(),
            self.term_sum.denom(),
        ]
        .iter()
        .map(|x| x.bits())
        .max()
        .unwrap_or(0)
    }
}

/// Racah evaluator with a reusable factorial table.
#[derive(Clone, Debug)]
pub struct RacahEvaluator {
    fact: Vec<BigUint>,
}

impl RacahEvaluator {
    /// Table large enough for all couplings with `2J1 + 2J2 <= max_sum`.
    pub fn new(max_sum: u32) -> Self {
        RacahEvaluator {
            fact: factorials(max_sum + 1),
        }
    }

    fn ensure(&mut self, top: u32) {
        if (top as usize) >= self.fact.len() {
            self.fact = factorials(top);
        }
    }

    fn f(&self, k: u32) -> &BigUint {
        &self.fact[k as usize]
    }

    /// Term sum and prefactor for `<(M1,M2)|J,M1+M2>`; `None` when `|M1+M2| > J`.
    pub fn terms(
        &mut self,
        j1: TwoJ,
        m1: Projection,
        j2: TwoJ,
        m2: Projection,
        total: TwoJ,
    ) -> Result<Option<RacahTermSum>> {
        let spec = CouplingSpec::from_total(j1, j2, total)?;
        let u1 = u_of(j1, m1)?;
        let u2 = u_of(j2, m2)?;
        let (a, b, n) = (j1.twice(), j2.twice(), spec.n());
        let (d1, d2) = (a - u1, b - u2);
        if u1 + u2 < n || d1 + d2 < n {
            return Ok(None);
        }
        let (u, d, j) = (u1 + u2 - n, d1 + d2 - n, a + b - 2 * n);
        self.ensure(a + b + 1);

        let k_min = [0i64, n as i64 - u1 as i64, n as i64 - d2 as i64]
            .into_iter()
            .max()
            .unwrap();
        let k_max = [n, d1, u2].into_iter().min().unwrap() as i64;

        let prefactor = BigRational::new(
            BigInt::from(
                BigUint::from(j + 1)
                    * self.f(u)
                    * self.f(d)
                    * self.f(a - n)
                    * self.f(b - n)
                    * self.f(u1)
                    * self.f(d1)
                    * self.f(u2)
                    * self.f(d2),
            ),
            BigInt::from(self.f(j + 1 + n) * self.f(n)),
        );

        if k_min > k_max {
            return Ok(Some(RacahTermSum {
                prefactor,
                term_sum: BigRational::zero(),
            }));
        }
        let (k_min, k_max) = (k_min as u32, k_max as u32);

        // Scale every term by the common denominator D built from the largest
        // factorial in each slot, so the sum runs over integers.
        let top = [
            d1 - k_min,
            u1 + k_max - n,
            d2 + k_max - n,
            u2 - k_min,
        ];
        let common = self.f(top[0]) * self.f(top[1]) * self.f(top[2]) * self.f(top[3]);
        let mut sum = BigInt::zero();
        for k in k_min..=k_max {
            let binom = self.f(n) / (self.f(k) * self.f(n - k));
            let slots = [d1 - k, u1 + k - n, d2 + k - n, u2 - k];
            let mut term = binom;
            for (hi, lo) in top.iter().zip(slots) {
                term *= self.f(*hi) / self.f(lo);
            }
            if k % 2 == 0 {
                sum += BigInt::from(term);
            } else {
                sum -= BigInt::from(term);
            }
        }
        Ok(Some(RacahTermSum {
            prefactor,
            term_sum: BigRational::new(sum, BigInt::from(common)),
        }))
    }

    pub fn cg(&mut self, j1: TwoJ, m1: Projection, j2: TwoJ, m2: Projection, total: TwoJ) -> Result<SqrtRational> {
        Ok(self
            .terms(j1, m1, j2, m2, total)?
            .map_or_else(SqrtRational::zero, |t| t.value()))
    }
}

/// `<(M1,M2)|J,M1+M2>` from the Racah sum, exactly.
///
/// ```
/// use cgomega::{racah::racah_cg, Projection, SqrtRational, TwoJ};
/// let v = racah_cg(TwoJ::new(3), Projection::new(1), TwoJ::new(2), Projection::new(0), TwoJ::new(3)).unwrap();
/// assert_eq!(v, SqrtRational::from_parts(1, 1, 15).unwrap());
/// ```
pub fn racah_cg(j1: TwoJ, m1: Projection, j2: TwoJ, m2: Projection, total: TwoJ) -> Result<SqrtRational> {
    RacahEvaluator::new(j1.twice() + j2.twice()).cg(j1, m1, j2, m2, total)
}

/// As [`racah_cg`] with an explicit `M`; zero unless `M = M1 + M2`.
pub fn racah_cg_m(
    j1: TwoJ,
    m1: Projection,
    j2: TwoJ,
    m2: Projection,
    total: TwoJ,
    m: Projection,
) -> Result<SqrtRational> {
    if m != m1 + m2 {
        // still reject malformed quantum numbers
        u_of(j1, m1)?;
        u_of(j2, m2)?;
        CouplingSpec::from_total(j1, j2, total)?;
        return Ok(SqrtRational::zero());
    }
    racah_cg(j1, m1, j2, m2, total)
}
