//! Engine-versus-oracle comparison for one `(J1, J2)` pair.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::halfint::TwoJ;
use crate::omega::{stretched_cg, Route};
use crate::racah::recursion::lowering_recursion_table;
use crate::tables::{build_table, physical_keys, racah_table, CGTable, CgKey};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub routes: Vec<Route>,
    /// Digits for the recursion oracle; `None` skips it.
    pub precision_digits: Option<u32>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            routes: Route::ALL.to_vec(),
            precision_digits: Some(50),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pair {
    #[serde(rename = "twoJ1")]
    pub two_j1: u32,
    #[serde(rename = "twoJ2")]
    pub two_j2: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub name: String,
    pub run: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub check: String,
    #[serde(rename = "twoJ")]
    pub two_j: u32,
    #[serde(rename = "twoM")]
    pub two_m: i32,
    #[serde(rename = "twoM1")]
    pub two_m1: i32,
    #[serde(rename = "twoM2")]
    pub two_m2: i32,
    pub engine: String,
    pub oracle: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub pair: Pair,
    pub checks: Vec<CheckSummary>,
    pub checks_run: usize,
    pub failures: Vec<Failure>,
}

impl VerificationReport {
    fn new(j1: TwoJ, j2: TwoJ) -> Self {
        VerificationReport {
            pair: Pair {
                two_j1: j1.twice(),
                two_j2: j2.twice(),
            },
            checks: Vec::new(),
            checks_run: 0,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, name: &str, run: usize, failures: Vec<Failure>) {
        self.checks.push(CheckSummary {
            name: name.to_string(),
            run,
            failed: failures.len(),
        });
        self.checks_run += run;
        self.failures.extend(failures);
    }
}

fn failure(check: &str, key: &CgKey, engine: impl ToString, oracle: impl ToString) -> Failure {
    Failure {
        check: check.to_string(),
        two_j: key.two_j,
        two_m: key.two_m,
        two_m1: key.two_m1,
        two_m2: key.two_m2,
        engine: engine.to_string(),
        oracle: oracle.to_string(),
    }
}

/// Every route against the Racah sum and the recursion, plus the table invariants.
pub fn verify_against_oracles(j1: TwoJ, j2: TwoJ) -> Result<VerificationReport> {
    verify_with(j1, j2, &VerifyOptions::default())
}

pub fn verify_with(j1: TwoJ, j2: TwoJ, options: &VerifyOptions) -> Result<VerificationReport> {
    let mut report = VerificationReport::new(j1, j2);
    let keys = physical_keys(j1, j2);
    let racah = racah_table(j1, j2)?;
    let (a, b) = (j1.twice(), j2.twice());

    let mut tables: Vec<CGTable> = Vec::new();
    for &route in &options.routes {
        let table = build_table(j1, j2, route)?;
        let name = format!("racah:{}", route.name());
        let mut fails: Vec<Failure> = keys
            .iter()
            .filter_map(|k| {
                let (e, o) = (table.get(k), racah.get(k));
                (e != o).then(|| failure(&name, k, &e, &o))
            })
            .collect();
        for k in table.entries.keys().filter(|k| !racah.entries.contains_key(k)) {
            fails.push(failure(&name, k, table.get(k), "absent"));
        }
        report.record(&name, keys.len(), fails);
        tables.push(table);
    }

    if let Some((first, rest)) = tables.split_first() {
        for other in rest {
            let name = format!("routes:{}={}", first.provenance, other.provenance);
            let fails = keys
                .iter()
                .filter(|k| first.get(k) != other.get(k))
                .map(|k| failure(&name, k, first.get(k), other.get(k)))
                .collect();
            report.record(&name, keys.len(), fails);
        }
    }

    let subject = tables.first().unwrap_or(&racah);

    let (run, rows) = subject.row_unitarity_failures();
    let fails = rows
        .into_iter()
        .map(|(ja, jb, m)| Failure {
            check: "unitarity:rows".into(),
            two_j: ja,
            two_m: m,
            two_m1: jb as i32,
            two_m2: 0,
            engine: "overlap".into(),
            oracle: if ja == jb { "1" } else { "0" }.into(),
        })
        .collect();
    report.record("unitarity:rows", run, fails);

    let (run, cols) = subject.column_unitarity_failures();
    let fails = cols
        .into_iter()
        .map(|(m1, m2)| Failure {
            check: "unitarity:columns".into(),
            two_j: 0,
            two_m: m1.wrapping_add(m2),
            two_m1: m1,
            two_m2: m2,
            engine: "sum of squares".into(),
            oracle: "1".into(),
        })
        .collect();
    report.record("unitarity:columns", run, fails);

    let fails = keys
        .iter()
        .filter_map(|k| {
            let n = (a + b - k.two_j) / 2;
            let v = subject.get(k);
            let mirrored = subject.get(&k.reflected());
            let expected = if n % 2 == 0 { mirrored } else { -mirrored };
            (v != expected).then(|| failure("reflection", k, &v, &expected))
        })
        .collect();
    report.record("reflection", keys.len(), fails);

    let stretched: Vec<&CgKey> = keys.iter().filter(|k| k.two_j == a + b).collect();
    let mut fails = Vec::new();
    for k in &stretched {
        let closed = stretched_cg(j1, k.m1(), j2, k.m2())?;
        let v = subject.get(k);
        if v != closed {
            fails.push(failure("stretched", k, &v, &closed));
        }
    }
    report.record("stretched", stretched.len(), fails);

    if let Some(digits) = options.precision_digits {
        let recursion = lowering_recursion_table(j1, j2, digits)?;
        let exp10 = digits.saturating_sub(10);
        let fails = keys
            .iter()
            .filter_map(|k| {
                let exact = racah.get(k);
                match recursion.get(k) {
                    Some(approx) if approx.within(&exact, exp10) => None,
                    Some(approx) => Some(failure("recursion", k, approx.to_decimal(digits), &exact)),
                    None => Some(failure("recursion", k, "absent", &exact)),
                }
            })
            .collect();
        report.record("recursion", keys.len(), fails);
    }

    Ok(report)
}
