//! Pascal rows and factorials over big integers.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

/// Row `n` of Pascal's triangle: `C(n, 0), ..., C(n, n)`.
pub fn pascal_row(n: u32) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigUint::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * (n - k) / (k + 1);
        row.push(c.clone());
    }
    row
}

/// `C(n, k)` extended by zero outside `0 <= k <= n` (and for negative `n`).
pub fn binomial(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    let mut c = BigUint::one();
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    BigInt::from(c)
}

/// Lookup into a precomputed Pascal row that returns zero off the row.
pub(crate) fn row_at(row: &[BigUint], k: i64) -> Option<&BigUint> {
    usize::try_from(k).ok().and_then(|k| row.get(k))
}

/// `0!, 1!, ..., n!`.
pub fn factorials(n: u32) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut f = BigUint::one();
    out.push(f.clone());
    for i in 1..=n {
        f *= i;
        out.push(f.clone());
    }
    out
}
