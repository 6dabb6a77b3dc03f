//! Complete coefficient tables for one `(J1, J2)` pair and their serializations.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactval::SqrtRational;
use crate::halfint::{allowed_total_j, format_doubled, Projection, TwoJ};
use crate::omega::{omega_n, OmegaMatrix, Route};
use crate::racah::RacahEvaluator;

/// `(2J, 2M, 2M1, 2M2)`; ordering sorts by `J`, then `M`, then `M1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CgKey {
    #[serde(rename = "twoJ")]
    pub two_j: u32,
    #[serde(rename = "twoM")]
    pub two_m: i32,
    #[serde(rename = "twoM1")]
    pub two_m1: i32,
    #[serde(rename = "twoM2")]
    pub two_m2: i32,
}

impl CgKey {
    pub fn new(total: TwoJ, m1: Projection, m2: Projection) -> Self {
        CgKey {
            two_j: total.twice(),
            two_m: m1.twice_m() + m2.twice_m(),
            two_m1: m1.twice_m(),
            two_m2: m2.twice_m(),
        }
    }

    /// Key for `J = two_j / 2` at the uncoupled cell `(u1, u2)`.
    pub fn from_counts(j1: TwoJ, j2: TwoJ, two_j: u32, u1: u32, u2: u32) -> Self {
        let two_m1 = 2 * u1 as i32 - j1.twice() as i32;
        let two_m2 = 2 * u2 as i32 - j2.twice() as i32;
        CgKey {
            two_j,
            two_m: two_m1 + two_m2,
            two_m1,
            two_m2,
        }
    }

    pub fn total(&self) -> TwoJ {
        TwoJ::new(self.two_j)
    }

    pub fn m(&self) -> Projection {
        Projection::new(self.two_m)
    }

    pub fn m1(&self) -> Projection {
        Projection::new(self.two_m1)
    }

    pub fn m2(&self) -> Projection {
        Projection::new(self.two_m2)
    }

    /// `(J, -M, -M1, -M2)`.
    pub fn reflected(&self) -> CgKey {
        CgKey {
            two_j: self.two_j,
            two_m: -self.two_m,
            two_m1: -self.two_m1,
            two_m2: -self.two_m2,
        }
    }
}

/// Where a table's values came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    Omega(Route),
    Racah,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Omega(r) => f.write_str(r.name()),
            Provenance::Racah => f.write_str("racah"),
        }
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("racah") {
            Ok(Provenance::Racah)
        } else {
            s.parse().map(Provenance::Omega)
        }
    }
}

/// All coefficients `<(M1,M2)|J,M>` for one `(J1, J2)`.
///
/// Every cell of every physical diagonal is stored, including accidental
/// zeros; keys violating `M = M1 + M2` or `|M| <= J` are absent and read as zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CGTable {
    pub j1: TwoJ,
    pub j2: TwoJ,
    pub provenance: Provenance,
    pub entries: BTreeMap<CgKey, SqrtRational>,
}

/// Output formats for [`render`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "text" | "txt" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::UnknownFormat(s.to_string())),
        }
    }
}

/// Number of stored entries for a pair: every cell of each physical diagonal, over all `J`.
pub fn expected_entry_count(j1: TwoJ, j2: TwoJ) -> usize {
    let (a, b) = (j1.twice() as usize, j2.twice() as usize);
    (0..=a.min(b))
        .map(|n| {
            (n..=a + b - n)
                .map(|s| s.min(a) + 1 - s.saturating_sub(b))
                .sum::<usize>()
        })
        .sum()
}

fn collect_matrix(m: &OmegaMatrix, entries: &mut Vec<(CgKey, SqrtRational)>) {
    let (a, b, n) = (m.j1().twice(), m.j2().twice(), m.n());
    let two_j = a + b - 2 * n;
    for s in n..=a + b - n {
        for (u1, u2, v) in m.diagonal(s).coefficients() {
            entries.push((CgKey::from_counts(m.j1(), m.j2(), two_j, u1, u2), v));
        }
    }
}

/// Builds `Ω_n` for `n = 0 ..= min(2J1, 2J2)` and reads off every physical diagonal.
pub fn build_table(j1: TwoJ, j2: TwoJ, route: Route) -> Result<CGTable> {
    build_table_with_stats(j1, j2, route).map(|(t, _)| t)
}

/// As [`build_table`], also returning the largest matrix cell in bits.
pub fn build_table_with_stats(j1: TwoJ, j2: TwoJ, route: Route) -> Result<(CGTable, u64)> {
    let parts = (0..=j1.twice().min(j2.twice()))
        .into_par_iter()
        .map(|n| {
            let m = omega_n(j1, j2, n, route)?;
            let mut out = Vec::new();
            collect_matrix(&m, &mut out);
            Ok((out, m.max_bits()))
        })
        .collect::<Result<Vec<_>>>()?;
    let bits = parts.iter().map(|(_, b)| *b).max().unwrap_or(0);
    let entries = parts.into_iter().flat_map(|(e, _)| e).collect();
    Ok((
        CGTable {
            j1,
            j2,
            provenance: Provenance::Omega(route),
            entries,
        },
        bits,
    ))
}

/// The same table evaluated entry by entry from the Racah sum.
pub fn racah_table(j1: TwoJ, j2: TwoJ) -> Result<CGTable> {
    racah_table_with_stats(j1, j2).map(|(t, _)| t)
}

/// As [`racah_table`], also returning the largest intermediate in bits.
pub fn racah_table_with_stats(j1: TwoJ, j2: TwoJ) -> Result<(CGTable, u64)> {
    let keys = physical_keys(j1, j2);
    let evaluator = RacahEvaluator::new(j1.twice() + j2.twice());
    let values = keys
        .par_iter()
        .map_init(
            || evaluator.clone(),
            |ev, k| {
                let terms = ev.terms(j1, k.m1(), j2, k.m2(), k.total())?;
                Ok(terms.map_or((SqrtRational::zero(), 0), |t| (t.value(), t.max_bits())))
            },
        )
        .collect::<Result<Vec<_>>>()?;
    let bits = values.iter().map(|(_, b)| *b).max().unwrap_or(0);
    let entries = keys.into_iter().zip(values.into_iter().map(|(v, _)| v)).collect();
    Ok((
        CGTable {
            j1,
            j2,
            provenance: Provenance::Racah,
            entries,
        },
        bits,
    ))
}

/// Every key a complete table stores, in sorted order.
pub fn physical_keys(j1: TwoJ, j2: TwoJ) -> Vec<CgKey> {
    let mut keys = Vec::with_capacity(expected_entry_count(j1, j2));
    let (a, b) = (j1.twice(), j2.twice());
    for total in allowed_total_j(j1, j2) {
        let n = (a + b - total.twice()) / 2;
        for s in n..=a + b - n {
            for u1 in s.saturating_sub(b)..=s.min(a) {
                keys.push(CgKey::from_counts(j1, j2, total.twice(), u1, s - u1));
            }
        }
    }
    keys.sort();
    keys
}

impl CGTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Stored value, or zero for keys outside the selection rules.
    pub fn get(&self, key: &CgKey) -> SqrtRational {
        self.entries.get(key).cloned().unwrap_or_default()
    }

    pub fn coefficient(&self, total: TwoJ, m1: Projection, m2: Projection) -> SqrtRational {
        self.get(&CgKey::new(total, m1, m2))
    }

    /// Entries grouped by `(2J, 2M)`, in key order.
    pub fn rows(&self) -> BTreeMap<(u32, i32), Vec<(CgKey, &SqrtRational)>> {
        let mut rows: BTreeMap<(u32, i32), Vec<(CgKey, &SqrtRational)>> = BTreeMap::new();
        for (k, v) in &self.entries {
            rows.entry((k.two_j, k.two_m)).or_default().push((*k, v));
        }
        rows
    }

    /// Same coefficients, regardless of provenance.
    pub fn same_values(&self, other: &CGTable) -> bool {
        self.j1 == other.j1 && self.j2 == other.j2 && self.entries == other.entries
    }

    /// Row checks: every `|J,M>` has unit norm, and rows with equal `M` and
    /// different `J` are orthogonal. Returns the offending `(2J, 2J', 2M)`.
    pub fn row_unitarity_failures(&self) -> (usize, Vec<(u32, u32, i32)>) {
        type Row<'a> = Vec<(CgKey, &'a SqrtRational)>;
        let rows = self.rows();
        let mut by_m: BTreeMap<i32, Vec<(u32, &Row)>> = BTreeMap::new();
        for ((two_j, two_m), row) in &rows {
            by_m.entry(*two_m).or_default().push((*two_j, row));
        }
        let mut checks = 0;
        let mut failures = Vec::new();
        for (two_m, group) in by_m {
            for (i, (ja, ra)) in group.iter().enumerate() {
                for (jb, rb) in &group[i..] {
                    checks += 1;
                    let expect_one = ja == jb;
                    if !row_overlap_is(ra, rb, expect_one) {
                        failures.push((*ja, *jb, two_m));
                    }
                }
            }
        }
        (checks, failures)
    }

    /// Column checks: for every `(M1, M2)`, `sum_J <(M1,M2)|J,M>^2 = 1`.
    pub fn column_unitarity_failures(&self) -> (usize, Vec<(i32, i32)>) {
        let mut cols: BTreeMap<(i32, i32), BigRational> = BTreeMap::new();
        for (k, v) in &self.entries {
            *cols.entry((k.two_m1, k.two_m2)).or_insert_with(BigRational::zero) += v.square();
        }
        let expected = (self.j1.twice() as usize + 1) * (self.j2.twice() as usize + 1);
        let mut failures: Vec<(i32, i32)> = cols
            .iter()
            .filter(|(_, s)| !s.is_one())
            .map(|(k, _)| *k)
            .collect();
        if cols.len() != expected {
            failures.push((i32::MIN, i32::MIN));
        }
        (cols.len(), failures)
    }
}

fn row_overlap_is(a: &[(CgKey, &SqrtRational)], b: &[(CgKey, &SqrtRational)], one: bool) -> bool {
    if one {
        let norm: BigRational = a.iter().map(|(_, v)| v.square()).sum();
        return norm.is_one();
    }
    let b_by_m1: BTreeMap<i32, &SqrtRational> = b.iter().map(|(k, v)| (k.two_m1, *v)).collect();
    let mut acc = SqrtRational::zero();
    for (k, v) in a {
        if let Some(w) = b_by_m1.get(&k.two_m1) {
            match acc.add(&(*v * *w)) {
                Ok(next) => acc = next,
                Err(_) => return false,
            }
        }
    }
    acc.is_zero()
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    #[serde(rename = "twoJ1")]
    two_j1: u32,
    #[serde(rename = "twoJ2")]
    two_j2: u32,
    route: String,
    entries: Vec<EntryRepr>,
}

#[derive(Serialize, Deserialize)]
struct EntryRepr {
    #[serde(rename = "twoJ")]
    two_j: u32,
    #[serde(rename = "twoM")]
    two_m: i32,
    #[serde(rename = "twoM1")]
    two_m1: i32,
    #[serde(rename = "twoM2")]
    two_m2: i32,
    sign: i8,
    num: String,
    den: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    decimal: Option<String>,
}

/// Renders a table as human text, JSON or CSV.
///
/// Text groups lines by `(J, M)` and writes each coefficient over the
/// normalization of its `Ω_n` diagonal (product route), so `|2,1>` reads
/// `sqrt(2/4)|(1,0)> + sqrt(2/4)|(0,1)>`.
pub fn render(table: &CGTable, format: Format, digits: Option<u32>) -> Result<String> {
    match format {
        Format::Text => render_text(table, digits),
        Format::Json => render_json(table, digits),
        Format::Csv => Ok(render_csv(table, digits)),
    }
}

/// Parses [`render`]'s JSON output back into a table.
pub fn parse_json(text: &str) -> Result<CGTable> {
    let repr: TableRepr = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    let mut entries = BTreeMap::new();
    for e in repr.entries {
        if e.two_m != e.two_m1 + e.two_m2 {
            return Err(Error::Malformed(format!(
                "entry twoM = {} differs from twoM1 + twoM2 = {}",
                e.two_m,
                e.two_m1 + e.two_m2
            )));
        }
        let key = CgKey {
            two_j: e.two_j,
            two_m: e.two_m,
            two_m1: e.two_m1,
            two_m2: e.two_m2,
        };
        let value: SqrtRational = serde_json::from_value(serde_json::json!({
            "sign": e.sign, "num": e.num, "den": e.den
        }))
        .map_err(|err| Error::Malformed(err.to_string()))?;
        entries.insert(key, value);
    }
    Ok(CGTable {
        j1: TwoJ::new(repr.two_j1),
        j2: TwoJ::new(repr.two_j2),
        provenance: repr.route.parse()?,
        entries,
    })
}

fn render_json(table: &CGTable, digits: Option<u32>) -> Result<String> {
    let repr = TableRepr {
        two_j1: table.j1.twice(),
        two_j2: table.j2.twice(),
        route: table.provenance.to_string(),
        entries: table
            .entries
            .iter()
            .map(|(k, v)| EntryRepr {
                two_j: k.two_j,
                two_m: k.two_m,
                two_m1: k.two_m1,
                two_m2: k.two_m2,
                sign: v.signum(),
                num: v.num().to_string(),
                den: v.den().to_string(),
                decimal: digits.map(|d| v.to_decimal(d)),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&repr).map_err(|e| Error::Malformed(e.to_string()))
}

fn render_csv(table: &CGTable, digits: Option<u32>) -> String {
    let mut out = String::from("twoJ,twoM,twoM1,twoM2,sign,num,den");
    if digits.is_some() {
        out.push_str(",decimal");
    }
    out.push('\n');
    for (k, v) in &table.entries {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{}",
            k.two_j,
            k.two_m,
            k.two_m1,
            k.two_m2,
            v.signum(),
            v.num(),
            v.den()
        );
        if let Some(d) = digits {
            let _ = write!(out, ",{}", v.to_decimal(d));
        }
        out.push('\n');
    }
    out
}

/// Text form of one term: `sqrt(a/s)` with `s` the diagonal normalization
/// when the stored value is a whole number of `1/s` units.
fn term_text(v: &SqrtRational, display_den: Option<&BigUint>) -> String {
    if v.num() == v.den() {
        return String::new();
    }
    if let Some(s) = display_den {
        let scaled = v.num() * s;
        if (&scaled % v.den()).is_zero() {
            return format!("sqrt({}/{})", scaled / v.den(), s);
        }
    }
    if v.den().is_one() {
        format!("sqrt({})", v.num())
    } else {
        format!("sqrt({}/{})", v.num(), v.den())
    }
}

fn render_text(table: &CGTable, digits: Option<u32>) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# J1 = {}, J2 = {} ({})",
        table.j1, table.j2, table.provenance
    );
    let (a, b) = (table.j1.twice(), table.j2.twice());
    let rows = table.rows();
    let mut current_j = None;
    for ((two_j, two_m), row) in rows.iter().rev() {
        if current_j != Some(*two_j) {
            current_j = Some(*two_j);
            let _ = writeln!(out, "\nJ = {}", format_doubled(*two_j as i64));
        }
        // display denominators from the product-route diagonal
        let n = (a + b - two_j) / 2;
        let s = ((*two_m as i64 + (a + b) as i64) / 2) as u32;
        let display_den = omega_n(table.j1, table.j2, n, Route::Product)
            .ok()
            .map(|m| m.diagonal(s).abs_sum());
        let mut line = format!(
            "|{},{}> =",
            format_doubled(*two_j as i64),
            format_doubled(*two_m as i64)
        );
        let mut first = true;
        let mut decimals = Vec::new();
        // decreasing M1
        for (k, v) in row.iter().rev() {
            if v.is_zero() {
                continue;
            }
            let neg = v.signum() < 0;
            let op = match (first, neg) {
                (true, false) => " ",
                (true, true) => " -",
                (false, false) => " + ",
                (false, true) => " - ",
            };
            first = false;
            let _ = write!(
                line,
                "{op}{}|({},{})>",
                term_text(v, display_den.as_ref()),
                format_doubled(k.two_m1 as i64),
                format_doubled(k.two_m2 as i64)
            );
            if let Some(d) = digits {
                decimals.push(v.to_decimal(d));
            }
        }
        if first {
            line.push_str(" 0");
        }
        out.push_str(&line);
        if !decimals.is_empty() {
            let _ = write!(out, "    # {}", decimals.join(", "));
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(x: u32) -> TwoJ {
        TwoJ::new(x)
    }

    fn sr(s: i64, a: u64, b: u64) -> SqrtRational {
        SqrtRational::from_parts(s, a, b).unwrap()
    }

    fn key(two_j: u32, m1: i32, m2: i32) -> CgKey {
        CgKey::new(t(two_j), Projection::new(m1), Projection::new(m2))
    }

    #[test]
    fn one_one_table() {
        let table = build_table(t(2), t(2), Route::Product).unwrap();
        assert_eq!(table.len(), 19);
        assert_eq!(expected_entry_count(t(2), t(2)), 19);
        assert_eq!(table.get(&key(4, 2, 2)), SqrtRational::one());
        assert_eq!(table.get(&key(4, 2, 0)), sr(1, 2, 4));
        assert_eq!(table.get(&key(4, 0, 0)), sr(1, 4, 6));
        assert_eq!(table.get(&key(4, 2, -2)), sr(1, 1, 6));
        // accidental zero is stored; forbidden keys are absent but read as zero
        assert!(table.entries.contains_key(&key(2, 0, 0)));
        assert!(table.get(&key(2, 0, 0)).is_zero());
        assert!(!table.entries.contains_key(&key(0, 2, 0)));
    }

    #[test]
    fn singlet_table() {
        let table = build_table(t(1), t(1), Route::Product).unwrap();
        assert_eq!(table.len(), 6);
        assert_eq!(table.rows().len(), 4);
        assert_eq!(table.get(&key(0, 1, -1)), sr(1, 1, 2));
        assert_eq!(table.get(&key(0, -1, 1)), sr(-1, 1, 2));
    }

    #[test]
    fn scalar_pair() {
        let table = build_table(t(0), t(0), Route::Product).unwrap();
        assert_eq!(table.len(), 1);
        assert_eq!(table.get(&key(0, 0, 0)), SqrtRational::one());
    }

    #[test]
    fn text_rows_group_by_multiplet() {
        let table = build_table(t(2), t(2), Route::Product).unwrap();
        let text = render(&table, Format::Text, None).unwrap();
        assert!(text.contains("|2,1> = sqrt(2/4)|(1,0)> + sqrt(2/4)|(0,1)>\n"), "{text}");
        assert!(text.contains("|2,2> = |(1,1)>\n"));
        assert!(text.contains("|2,0> = sqrt(1/6)|(1,-1)> + sqrt(4/6)|(0,0)> + sqrt(1/6)|(-1,1)>\n"));

        let table = build_table(t(3), t(2), Route::TildeSquared).unwrap();
        let text = render(&table, Format::Text, None).unwrap();
        assert!(text.contains(
            "|3/2,1/2> = sqrt(6/15)|(3/2,-1)> + sqrt(1/15)|(1/2,0)> - sqrt(8/15)|(-1/2,1)>\n"
        ));
    }

    #[test]
    fn csv_header_and_rows() {
        let table = build_table(t(1), t(1), Route::Product).unwrap();
        let csv = render(&table, Format::Csv, None).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("twoJ,twoM,twoM1,twoM2,sign,num,den"));
        assert_eq!(lines.next(), Some("0,0,-1,1,-1,1,2"));
        let with_dec = render(&table, Format::Csv, Some(5)).unwrap();
        assert!(with_dec.starts_with("twoJ,twoM,twoM1,twoM2,sign,num,den,decimal\n0,0,-1,1,-1,1,2,-0.70711\n"));
    }

    #[test]
    fn json_round_trip() {
        for route in Route::ALL {
            let table = build_table(t(3), t(2), route).unwrap();
            let json = render(&table, Format::Json, Some(8)).unwrap();
            assert_eq!(parse_json(&json).unwrap(), table);
        }
        let racah = racah_table(t(2), t(1)).unwrap();
        let json = render(&racah, Format::Json, None).unwrap();
        assert_eq!(parse_json(&json).unwrap(), racah);
        assert!(parse_json("{}").is_err());
    }

    #[test]
    fn unknown_format() {
        assert_eq!("xml".parse::<Format>(), Err(Error::UnknownFormat("xml".into())));
        assert_eq!("CSV".parse::<Format>(), Ok(Format::Csv));
    }

    #[test]
    fn unitarity_both_ways() {
        let table = build_table(t(3), t(2), Route::Product).unwrap();
        let (rows, row_fail) = table.row_unitarity_failures();
        assert!(rows > 0 && row_fail.is_empty());
        let (cols, col_fail) = table.column_unitarity_failures();
        assert_eq!(cols, 12);
        assert!(col_fail.is_empty());

        let mut broken = table.clone();
        broken.entries.insert(key(5, 3, 2), sr(1, 1, 2));
        assert!(!broken.row_unitarity_failures().1.is_empty());
        assert!(!broken.column_unitarity_failures().1.is_empty());
    }

    #[test]
    fn keys_cover_expected_count() {
        for (a, b) in [(0, 0), (1, 1), (3, 2), (4, 7), (12, 12)] {
            let keys = physical_keys(t(a), t(b));
            assert_eq!(keys.len(), expected_entry_count(t(a), t(b)));
        }
    }
}
