//! Counting matrices whose diagonals hold squared Clebsch-Gordan coefficients.
//!
//! Every matrix here is a `(2J1+1) x (2J2+1)` grid of signed big integers.
//! Row index is `u1` (constituents of the first momentum pointing up, first
//! row `u1 = 0`), column index is `u2`. A diagonal `u1 + u2 = const` collects
//! the uncoupled states with a fixed `M = M1 + M2`.
//!
//! For coupling to `J = J1 + J2 - n`, the matrix `Ω_n` satisfies
//!
//! ```text
//! <(M1,M2)|J,M> = sign(cell) * sqrt(|cell| / sum of |cells| on its diagonal)
//! ```
//!
//! `Ω_n` is built as the signed componentwise product of the spin-0 pair
//! matrix `(Λ-V)^[n]` with the residual stretched matrix `Ω~_n`, or by either
//! of two squared forms. All routes agree up to a positive factor per
//! diagonal, which extraction cancels.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binomial::{factorials, pascal_row, row_at};
use crate::error::{Error, Result};
use crate::exactval::SqrtRational;
use crate::halfint::{u_of, Projection, TwoJ};

const PARALLEL_CELLS: usize = 1024;

/// Construction route for `Ω_n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// `(Λ-V)^[n] ∘ Ω~_n`
    #[default]
    Product,
    /// `Ω~_n^|2| ∘ Ω_0^-1`
    TildeSquared,
    /// `((Λ-V)^[n])^|2| ∘ Ω_0`
    LvSquared,
}

impl Route {
    pub const ALL: [Route; 3] = [Route::Product, Route::TildeSquared, Route::LvSquared];

    pub fn name(self) -> &'static str {
        match self {
            Route::Product => "product",
            Route::TildeSquared => "tilde-squared",
            Route::LvSquared => "lv-squared",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "product" => Ok(Route::Product),
            "tilde-squared" => Ok(Route::TildeSquared),
            "lv-squared" => Ok(Route::LvSquared),
            _ => Err(Error::UnknownRoute(s.to_string())),
        }
    }
}

/// A `(j1+1) x (j2+1)` grid of signed integers tagged with `(J1, J2, n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OmegaMatrix {
    j1: TwoJ,
    j2: TwoJ,
    n: u32,
    cells: Vec<BigInt>,
}

/// One cell of a [`Diagonal`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalEntry {
    pub u1: u32,
    pub u2: u32,
    pub value: BigInt,
}

/// Cells with a fixed `u1 + u2`, ordered from down-left to up-right
/// (decreasing `u1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagonal {
    pub u_sum: u32,
    pub entries: Vec<DiagonalEntry>,
}

impl Diagonal {
    /// Normalization of the diagonal; signs do not count.
    pub fn abs_sum(&self) -> BigUint {
        self.entries.iter().map(|e| e.value.magnitude()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.value.is_zero())
    }

    /// Coefficients read off this diagonal, in entry order.
    pub fn coefficients(&self) -> Vec<(u32, u32, SqrtRational)> {
        let total = self.abs_sum();
        self.entries
            .iter()
            .map(|e| (e.u1, e.u2, cell_coefficient(&e.value, &total)))
            .collect()
    }
}

fn cell_coefficient(cell: &BigInt, diagonal_sum: &BigUint) -> SqrtRational {
    if diagonal_sum.is_zero() || cell.is_zero() {
        return SqrtRational::zero();
    }
    SqrtRational::from_signed_ratio(cell, cell.magnitude().clone(), diagonal_sum.clone())
        .expect("diagonal sum is nonzero")
}

impl OmegaMatrix {
    /// Builds a matrix cell by cell; `f` receives `(u1, u2)`.
    pub fn from_fn<F>(j1: TwoJ, j2: TwoJ, n: u32, f: F) -> Self
    where
        F: Fn(u32, u32) -> BigInt + Sync,
    {
        let cols = j2.twice() as usize + 1;
        let len = (j1.twice() as usize + 1) * cols;
        let at = |i: usize| f((i / cols) as u32, (i % cols) as u32);
        let cells = if len >= PARALLEL_CELLS {
            (0..len).into_par_iter().map(at).collect()
        } else {
            (0..len).map(at).collect()
        };
        OmegaMatrix { j1, j2, n, cells }
    }

    /// Builds a matrix from explicit rows; row count must be `2J1+1`, row length `2J2+1`.
    pub fn from_rows<T: Into<BigInt> + Clone>(j1: TwoJ, j2: TwoJ, n: u32, rows: &[Vec<T>]) -> Result<Self> {
        let (r, c) = (j1.twice() as usize + 1, j2.twice() as usize + 1);
        let got_cols = rows.first().map_or(0, Vec::len);
        if rows.len() != r || rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch {
                left_rows: r,
                left_cols: c,
                right_rows: rows.len(),
                right_cols: got_cols,
            });
        }
        let cells = rows.iter().flatten().cloned().map(Into::into).collect();
        Ok(OmegaMatrix { j1, j2, n, cells })
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

    pub fn rows(&self) -> usize {
        self.j1.twice() as usize + 1
    }

    pub fn cols(&self) -> usize {
        self.j2.twice() as usize + 1
    }

    pub fn get(&self, u1: u32, u2: u32) -> Result<&BigInt> {
        if u1 as usize >= self.rows() || u2 as usize >= self.cols() {
            return Err(Error::IndexOutOfBounds {
                u1,
                u2,
                rows: self.rows(),
                cols: self.cols(),
            });
        }
        Ok(&self.cells[u1 as usize * self.cols() + u2 as usize])
    }

    fn at(&self, u1: u32, u2: u32) -> &BigInt {
        &self.cells[u1 as usize * self.cols() + u2 as usize]
    }

    pub fn cells(&self) -> &[BigInt] {
        &self.cells
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        self.cells.chunks(self.cols()).map(<[BigInt]>::to_vec).collect()
    }

    /// Rows as `i64`, if every cell fits.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        self.cells
            .chunks(self.cols())
            .map(|row| row.iter().map(ToPrimitive::to_i64).collect())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.cells.iter().all(Zero::is_zero)
    }

    /// Largest cell magnitude in bits.
    pub fn max_bits(&self) -> u64 {
        self.cells.iter().map(BigInt::bits).max().unwrap_or(0)
    }

    fn same_shape(&self, other: &OmegaMatrix) -> Result<()> {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return Err(Error::DimensionMismatch {
                left_rows: self.rows(),
                left_cols: self.cols(),
                right_rows: other.rows(),
                right_cols: other.cols(),
            });
        }
        Ok(())
    }

    /// The diagonal `u1 + u2 = u_sum`.
    pub fn diagonal(&self, u_sum: u32) -> Diagonal {
        let (j1, j2) = (self.j1.twice(), self.j2.twice());
        let lo = u_sum.saturating_sub(j2);
        let hi = u_sum.min(j1);
        let entries = if lo > hi {
            Vec::new()
        } else {
            (lo..=hi)
                .rev()
                .map(|u1| DiagonalEntry {
                    u1,
                    u2: u_sum - u1,
                    value: self.at(u1, u_sum - u1).clone(),
                })
                .collect()
        };
        Diagonal { u_sum, entries }
    }

    /// All diagonals, `u_sum = 0 ..= j1 + j2`.
    pub fn diagonals(&self) -> impl Iterator<Item = Diagonal> + '_ {
        (0..=self.j1.twice() + self.j2.twice()).map(move |s| self.diagonal(s))
    }

    /// Cellwise signed square `x^|2| = sign(x) x^2`.
    pub fn signed_square(&self) -> OmegaMatrix {
        OmegaMatrix {
            cells: self.cells.iter().map(signed_square).collect(),
            ..self.clone()
        }
    }

    /// The matrix divided by the gcd of its cells (unchanged when all cells are zero).
    pub fn primitive(&self) -> OmegaMatrix {
        let content = self.cells.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if content.is_zero() || content.is_one() {
            return self.clone();
        }
        OmegaMatrix {
            cells: self.cells.iter().map(|c| c / &content).collect(),
            ..self.clone()
        }
    }

    /// Cellwise multiple by a scalar.
    pub fn scaled(&self, factor: &BigInt) -> OmegaMatrix {
        OmegaMatrix {
            cells: self.cells.iter().map(|c| c * factor).collect(),
            ..self.clone()
        }
    }

    /// `≐`: every diagonal of `other` is a positive multiple of the same diagonal of `self`.
    pub fn is_equivalent(&self, other: &OmegaMatrix) -> bool {
        if self.same_shape(other).is_err() {
            return false;
        }
        self.diagonals().zip(other.diagonals()).all(|(a, b)| {
            let pivot = a.entries.iter().zip(&b.entries).find(|(x, _)| !x.value.is_zero());
            match pivot {
                None => b.is_zero(),
                Some((pa, pb)) => {
                    pa.value.sign() == pb.value.sign()
                        && a.entries
                            .iter()
                            .zip(&b.entries)
                            .all(|(x, y)| &x.value * &pb.value == &y.value * &pa.value)
                }
            }
        })
    }

    /// Rows top to bottom (`u1 = 0 ..= j1`), each a comma-separated list.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for row in self.cells.chunks(self.cols()) {
            let line: Vec<String> = row.iter().map(ToString::to_string).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for OmegaMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}

#[derive(Serialize, Deserialize)]
struct OmegaMatrixRepr {
    #[serde(rename = "twoJ1")]
    two_j1: u32,
    #[serde(rename = "twoJ2")]
    two_j2: u32,
    n: u32,
    cells: Vec<Vec<String>>,
}

impl Serialize for OmegaMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OmegaMatrixRepr {
            two_j1: self.j1.twice(),
            two_j2: self.j2.twice(),
            n: self.n,
            cells: self
                .cells
                .chunks(self.cols())
                .map(|r| r.iter().map(ToString::to_string).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for OmegaMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = OmegaMatrixRepr::deserialize(d)?;
        let rows = repr
            .cells
            .iter()
            .map(|r| r.iter().map(|c| c.parse::<BigInt>()).collect::<std::result::Result<Vec<_>, _>>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        OmegaMatrix::from_rows(TwoJ::new(repr.two_j1), TwoJ::new(repr.two_j2), repr.n, &rows)
            .map_err(D::Error::custom)
    }
}

fn signed_square(x: &BigInt) -> BigInt {
    x * x.abs()
}

/// Signed componentwise product of two nonzero cells: `sign(a) |a| |b|`.
fn signed_product(a: &BigInt, b: &BigInt) -> Option<BigInt> {
    if a.is_zero() || b.is_zero() {
        return Some(BigInt::zero());
    }
    if a.sign() != b.sign() {
        return None;
    }
    Some(BigInt::from_biguint(a.sign(), a.magnitude() * b.magnitude()))
}

/// `Ω_0[u1][u2] = C(j1, u1) C(j2, u2)`, the outer product of two Pascal rows.
pub fn omega0(j1: TwoJ, j2: TwoJ) -> OmegaMatrix {
    let r1 = pascal_row(j1.twice());
    let r2 = pascal_row(j2.twice());
    OmegaMatrix::from_fn(j1, j2, 0, |u1, u2| {
        BigInt::from(&r1[u1 as usize] * &r2[u2 as usize])
    })
}

/// `Λ = u1 d2` (up-down pairs) and `V = d1 u2` (down-up pairs).
pub fn lambda_and_v(j1: TwoJ, j2: TwoJ) -> (OmegaMatrix, OmegaMatrix) {
    let (a, b) = (j1.twice(), j2.twice());
    let lambda = OmegaMatrix::from_fn(j1, j2, 1, |u1, u2| BigInt::from(u1 as u64 * (b - u2) as u64));
    let v = OmegaMatrix::from_fn(j1, j2, 1, |u1, u2| BigInt::from((a - u1) as u64 * u2 as u64));
    (lambda, v)
}

/// Falling products `x (x-1) ... (x-m+1)` for `x <= max_x`, `m <= max_m`.
struct FallingTable {
    rows: Vec<Vec<BigUint>>,
}

impl FallingTable {
    fn new(max_x: u32, max_m: u32) -> Self {
        let rows = (0..=max_x)
            .map(|x| {
                let mut acc = BigUint::one();
                let mut row = vec![acc.clone()];
                for i in 0..max_m {
                    // once a factor reaches zero the product stays zero
                    acc *= x.saturating_sub(i);
                    row.push(acc.clone());
                }
                row
            })
            .collect();
        FallingTable { rows }
    }

    fn get(&self, x: u32, m: u32) -> &BigUint {
        &self.rows[x as usize][m as usize]
    }
}

/// `(Λ-V)^[n]`: `n` successive spin-0 pairs with depletion of the available constituents.
///
/// Cell `= sum_k (-1)^k C(n,k) (u1 d2)^[n-k] (d1 u2)^[k]`, where `(x y)^[m]` is the
/// product of falling factorials of length `m`. Vanishes identically for
/// `n > min(j1, j2)`.
pub fn lambda_minus_v_pow(j1: TwoJ, j2: TwoJ, n: u32) -> OmegaMatrix {
    let (a, b) = (j1.twice(), j2.twice());
    let falling = FallingTable::new(a.max(b), n);
    let choose = pascal_row(n);
    OmegaMatrix::from_fn(j1, j2, n, |u1, u2| {
        let (d1, d2) = (a - u1, b - u2);
        let mut acc = BigInt::zero();
        for k in 0..=n {
            let up_down = falling.get(u1, n - k) * falling.get(d2, n - k);
            if up_down.is_zero() {
                continue;
            }
            let down_up = falling.get(d1, k) * falling.get(u2, k);
            if down_up.is_zero() {
                continue;
            }
            let term = BigInt::from(&choose[k as usize] * up_down * down_up);
            if k % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    })
}

fn check_pairs(j1: TwoJ, j2: TwoJ, n: u32) -> Result<()> {
    let max = j1.twice().min(j2.twice());
    if n > max {
        return Err(Error::PairCountOutOfRange { n, max });
    }
    Ok(())
}

/// `Ω~_n`: the residual `2J-2n` constituents coupled to their maximum,
/// `sum_k (-1)^k C(n,k) C(j1-n, u1-(n-k)) C(j2-n, u2-k)`.
pub fn tilde_omega(j1: TwoJ, j2: TwoJ, n: u32) -> Result<OmegaMatrix> {
    check_pairs(j1, j2, n)?;
    let r1 = pascal_row(j1.twice() - n);
    let r2 = pascal_row(j2.twice() - n);
    let choose = pascal_row(n);
    Ok(OmegaMatrix::from_fn(j1, j2, n, |u1, u2| {
        let mut acc = BigInt::zero();
        for k in 0..=n {
            let (Some(c1), Some(c2)) = (
                row_at(&r1, u1 as i64 - (n - k) as i64),
                row_at(&r2, u2 as i64 - k as i64),
            ) else {
                continue;
            };
            let term = BigInt::from(&choose[k as usize] * c1 * c2);
            if k % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }))
}

/// Signed componentwise product. Both factors must agree in sign wherever both are nonzero.
pub fn hadamard_signed(a: &OmegaMatrix, b: &OmegaMatrix) -> Result<OmegaMatrix> {
    a.same_shape(b)?;
    let cols = a.cols();
    let cells = a
        .cells
        .iter()
        .zip(&b.cells)
        .enumerate()
        .map(|(i, (x, y))| {
            signed_product(x, y).ok_or(Error::SignMismatch {
                u1: (i / cols) as u32,
                u2: (i % cols) as u32,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OmegaMatrix { cells, ..a.clone() })
}

/// Integer form of the componentwise reciprocal of `Ω_0`: `L / Ω_0[u1][u2]`
/// with `L` the least common multiple of all cells.
pub fn omega0_reciprocal(j1: TwoJ, j2: TwoJ) -> OmegaMatrix {
    let base = omega0(j1, j2);
    let lcm = base.cells.iter().fold(BigInt::one(), |acc, c| acc.lcm(c));
    OmegaMatrix {
        cells: base.cells.iter().map(|c| &lcm / c).collect(),
        ..base
    }
}

/// `Ω_n` for `J = J1 + J2 - n` by the chosen route.
pub fn omega_n(j1: TwoJ, j2: TwoJ, n: u32, route: Route) -> Result<OmegaMatrix> {
    check_pairs(j1, j2, n)?;
    let mut out = match route {
        Route::Product => hadamard_signed(&lambda_minus_v_pow(j1, j2, n).primitive(), &tilde_omega(j1, j2, n)?)?,
        Route::TildeSquared => {
            let squared = tilde_omega(j1, j2, n)?.signed_square();
            let reciprocal = omega0_reciprocal(j1, j2);
            OmegaMatrix {
                cells: squared.cells.iter().zip(&reciprocal.cells).map(|(s, r)| s * r).collect(),
                ..squared
            }
        }
        Route::LvSquared => {
            let squared = lambda_minus_v_pow(j1, j2, n).primitive().signed_square();
            let base = omega0(j1, j2);
            OmegaMatrix {
                cells: squared.cells.iter().zip(&base.cells).map(|(s, c)| s * c).collect(),
                ..squared
            }
        }
    };
    out.n = n;
    Ok(out)
}

/// `sign(cell) sqrt(|cell| / sum of |cells| on the diagonal u1 + u2)`.
pub fn extract_cg(m: &OmegaMatrix, u1: u32, u2: u32) -> Result<SqrtRational> {
    let cell = m.get(u1, u2)?;
    Ok(cell_coefficient(cell, &m.diagonal(u1 + u2).abs_sum()))
}

/// Closed form for the stretched coupling `J = J1 + J2`:
/// `sqrt( j1! j2! / j! * u! d! / (u1! d1! u2! d2!) )`.
pub fn stretched_cg(j1: TwoJ, m1: Projection, j2: TwoJ, m2: Projection) -> Result<SqrtRational> {
    let u1 = u_of(j1, m1)?;
    let u2 = u_of(j2, m2)?;
    let (a, b) = (j1.twice(), j2.twice());
    let (d1, d2) = (a - u1, b - u2);
    let f = factorials(a + b);
    let at = |k: u32| &f[k as usize];
    let num = at(a) * at(b) * at(u1 + u2) * at(d1 + d2);
    let den = at(a + b) * at(u1) * at(d1) * at(u2) * at(d2);
    SqrtRational::from_signed_ratio(&BigInt::from_biguint(Sign::Plus, BigUint::one()), num, den)
}

/// `<(M1,M2)|J,M1+M2>` read off a single `Ω_n`.
///
/// ```
/// use cgomega::omega::{coefficient, Route};
/// use cgomega::{Projection, SqrtRational, TwoJ};
/// let v = coefficient(TwoJ::new(3), Projection::new(-1), TwoJ::new(2), Projection::new(2), TwoJ::new(3), Route::Product).unwrap();
/// assert_eq!(v, SqrtRational::from_parts(-1, 8, 15).unwrap());
/// ```
pub fn coefficient(
    j1: TwoJ,
    m1: Projection,
    j2: TwoJ,
    m2: Projection,
    total: TwoJ,
    route: Route,
) -> Result<SqrtRational> {
    let spec = crate::halfint::CouplingSpec::from_total(j1, j2, total)?;
    let u1 = u_of(j1, m1)?;
    let u2 = u_of(j2, m2)?;
    extract_cg(&omega_n(j1, j2, spec.n(), route)?, u1, u2)
}
