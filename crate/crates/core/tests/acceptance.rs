//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::time::{Duration, Instant};

use cgomega::binomial::binomial;
use cgomega::effort::compare_effort;
use cgomega::omega::{
    extract_cg, lambda_and_v, lambda_minus_v_pow, omega0, omega0_reciprocal, omega_n, stretched_cg, tilde_omega,
    OmegaMatrix,
};
use cgomega::racah::{lowering_recursion_table, racah_cg_m};
use cgomega::tables::{build_table, physical_keys, racah_table, CgKey};
use cgomega::{Projection, Route, SqrtRational, TwoJ};
use num_traits::Zero;
use rayon::prelude::*;

const MATRIX_BUDGET: Duration = Duration::from_millis(1);
const ORACLE_BUDGET: Duration = Duration::from_secs(10);
const RECURSION_BUDGET: Duration = Duration::from_secs(30);
const RECURSION_DIGITS: u32 = 50;
const RECURSION_TOLERANCE_EXP: u32 = 40;

fn t(x: u32) -> TwoJ {
    TwoJ::new(x)
}

fn p(x: i32) -> Projection {
    Projection::new(x)
}

fn sr(s: i64, a: u64, b: u64) -> SqrtRational {
    SqrtRational::from_parts(s, a, b).unwrap()
}

fn rows(m: &OmegaMatrix) -> Vec<Vec<i64>> {
    m.to_i64_rows().expect("small cells")
}

fn fastest<T>(f: impl Fn() -> T) -> (T, Duration) {
    let mut best = Duration::MAX;
    let mut out = f();
    for _ in 0..5 {
        let start = Instant::now();
        out = f();
        best = best.min(start.elapsed());
    }
    (out, best)
}

struct Outcome {
    ok: bool,
    detail: String,
}

fn golden_matrices() -> Outcome {
    let (a, b) = (t(3), t(2));
    type Build = Box<dyn Fn() -> OmegaMatrix>;
    let cases: Vec<(&str, Build, Vec<Vec<i64>>, bool)> = vec![
        ("omega0(1,1)", Box::new(|| omega0(t(2), t(2))), vec![vec![1, 2, 1], vec![2, 4, 2], vec![1, 2, 1]], false),
        (
            "omega0(3/2,1)",
            Box::new(move || omega0(a, b)),
            vec![vec![1, 2, 1], vec![3, 6, 3], vec![3, 6, 3], vec![1, 2, 1]],
            false,
        ),
        (
            "lambda",
            Box::new(move || lambda_and_v(a, b).0),
            vec![vec![0, 0, 0], vec![2, 1, 0], vec![4, 2, 0], vec![6, 3, 0]],
            false,
        ),
        (
            "v",
            Box::new(move || lambda_and_v(a, b).1),
            vec![vec![0, 3, 6], vec![0, 2, 4], vec![0, 1, 2], vec![0, 0, 0]],
            false,
        ),
        (
            "lambda-v",
            Box::new(move || lambda_minus_v_pow(a, b, 1)),
            vec![vec![0, -3, -6], vec![2, -1, -4], vec![4, 1, -2], vec![6, 3, 0]],
            false,
        ),
        (
            "(lambda-v)^[2]",
            Box::new(move || lambda_minus_v_pow(a, b, 2)),
            vec![vec![0, 0, 12], vec![0, -4, 4], vec![4, -4, 0], vec![12, 0, 0]],
            false,
        ),
        (
            "(lambda-v)^[2] / 4",
            Box::new(move || lambda_minus_v_pow(a, b, 2).primitive()),
            vec![vec![0, 0, 3], vec![0, -1, 1], vec![1, -1, 0], vec![3, 0, 0]],
            false,
        ),
        (
            "tilde omega_1",
            Box::new(move || tilde_omega(a, b, 1).unwrap()),
            vec![vec![0, -1, -1], vec![1, -1, -2], vec![2, 1, -1], vec![1, 1, 0]],
            false,
        ),
        (
            "tilde omega_2",
            Box::new(move || tilde_omega(a, b, 2).unwrap()),
            vec![vec![0, 0, 1], vec![0, -2, 1], vec![1, -2, 0], vec![1, 0, 0]],
            false,
        ),
        (
            "omega_1",
            Box::new(move || omega_n(a, b, 1, Route::Product).unwrap()),
            vec![vec![0, -3, -6], vec![2, -1, -8], vec![8, 1, -2], vec![6, 3, 0]],
            false,
        ),
        (
            "omega_2",
            Box::new(move || omega_n(a, b, 2, Route::Product).unwrap()),
            vec![vec![0, 0, 3], vec![0, -2, 1], vec![1, -2, 0], vec![3, 0, 0]],
            false,
        ),
        (
            "tilde omega_2 signed square",
            Box::new(move || tilde_omega(a, b, 2).unwrap().signed_square()),
            vec![vec![0, 0, 1], vec![0, -4, 1], vec![1, -4, 0], vec![1, 0, 0]],
            false,
        ),
        (
            "omega0 reciprocal",
            Box::new(move || omega0_reciprocal(a, b)),
            vec![vec![6, 3, 6], vec![2, 1, 2], vec![2, 1, 2], vec![6, 3, 6]],
            false,
        ),
        (
            "omega_2 via tilde squared",
            Box::new(move || omega_n(a, b, 2, Route::TildeSquared).unwrap()),
            vec![vec![0, 0, 6], vec![0, -4, 2], vec![2, -4, 0], vec![6, 0, 0]],
            true,
        ),
    ];

    let mut bad = Vec::new();
    let mut slowest = Duration::ZERO;
    for (name, build, expected, equivalent_to_product) in &cases {
        let (m, took) = fastest(build);
        slowest = slowest.max(took);
        if rows(&m) != *expected {
            bad.push(format!("{name} = {:?}", rows(&m)));
        }
        if *equivalent_to_product && !m.is_equivalent(&omega_n(a, b, 2, Route::Product).unwrap()) {
            bad.push(format!("{name} not equivalent to product route"));
        }
        if took > MATRIX_BUDGET {
            bad.push(format!("{name} took {took:?}"));
        }
    }
    Outcome {
        ok: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{} matrices exact, slowest {:?}", cases.len(), slowest)
        } else {
            bad.join("; ")
        },
    }
}

fn golden_decompositions() -> Outcome {
    let key = |j: u32, m1: i32, m2: i32| CgKey::new(t(j), p(m1), p(m2));
    let one_one = build_table(t(2), t(2), Route::Product).unwrap();
    let halves = build_table(t(1), t(1), Route::Product).unwrap();
    let three_halves = build_table(t(3), t(2), Route::Product).unwrap();
    let expected = [
        // |2,M> rows
        (&one_one, key(4, 2, 2), SqrtRational::one()),
        (&one_one, key(4, 2, 0), sr(1, 2, 4)),
        (&one_one, key(4, 0, 2), sr(1, 2, 4)),
        (&one_one, key(4, 2, -2), sr(1, 1, 6)),
        (&one_one, key(4, 0, 0), sr(1, 4, 6)),
        (&one_one, key(4, -2, 2), sr(1, 1, 6)),
        (&one_one, key(4, 0, -2), sr(1, 2, 4)),
        (&one_one, key(4, -2, 0), sr(1, 2, 4)),
        (&one_one, key(4, -2, -2), SqrtRational::one()),
        // |1,0> and |0,0> for two spin-1/2
        (&halves, key(2, 1, -1), sr(1, 1, 2)),
        (&halves, key(2, -1, 1), sr(1, 1, 2)),
        (&halves, key(0, 1, -1), sr(1, 1, 2)),
        (&halves, key(0, -1, 1), sr(-1, 1, 2)),
        // |3/2,1/2>
        (&three_halves, key(3, 3, -2), sr(1, 6, 15)),
        (&three_halves, key(3, 1, 0), sr(1, 1, 15)),
        (&three_halves, key(3, -1, 2), sr(-1, 8, 15)),
    ];
    let bad: Vec<String> = expected
        .iter()
        .filter(|(table, k, v)| table.get(k) != *v)
        .map(|(table, k, v)| format!("{k:?}: got {} want {v}", table.get(k)))
        .collect();
    // number of M rows per J
    let row_sizes = [
        (&one_one, 4u32, 5usize),
        (&halves, 2, 3),
        (&halves, 0, 1),
    ];
    let mut extra = Vec::new();
    for (table, two_j, rows) in row_sizes {
        let count = table.rows().keys().filter(|(j, _)| *j == two_j).count();
        if count != rows {
            extra.push(format!("J={two_j}/2 has {count} rows"));
        }
    }
    let ok = bad.is_empty() && extra.is_empty();
    Outcome {
        ok,
        detail: if ok {
            format!("{} published coefficients exact", expected.len())
        } else {
            [bad, extra].concat().join("; ")
        },
    }
}

fn sweep_pairs(max: u32) -> Vec<(u32, u32)> {
    (0..=max).flat_map(|b| (0..=b).map(move |a| (a, b))).collect()
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let results: Vec<(usize, Vec<String>)> = sweep_pairs(12)
        .par_iter()
        .map(|&(a, b)| {
            let racah = racah_table(t(a), t(b)).unwrap();
            let mut count = 0;
            let mut bad = Vec::new();
            for route in Route::ALL {
                let table = build_table(t(a), t(b), route).unwrap();
                if table.entries.len() != racah.entries.len() {
                    bad.push(format!("({a},{b}) {route:?} size {}", table.entries.len()));
                }
                for (k, v) in &racah.entries {
                    count += 1;
                    if table.get(k) != *v {
                        bad.push(format!("({a},{b}) {route:?} {k:?}"));
                    }
                }
            }
            (count, bad)
        })
        .collect();
    let took = start.elapsed();
    let count: usize = results.iter().map(|r| r.0).sum();
    let bad: Vec<String> = results.into_iter().flat_map(|r| r.1).collect();
    let ok = bad.is_empty() && took < ORACLE_BUDGET;
    Outcome {
        ok,
        detail: if bad.is_empty() {
            format!("{count} coefficients (3 routes) equal to Racah in {took:?}")
        } else {
            format!("{} mismatches, first {}", bad.len(), bad[0])
        },
    }
}

fn recursion_oracle() -> Outcome {
    let start = Instant::now();
    let results: Vec<(usize, Vec<String>)> = sweep_pairs(8)
        .par_iter()
        .map(|&(a, b)| {
            let racah = racah_table(t(a), t(b)).unwrap();
            let approx = lowering_recursion_table(t(a), t(b), RECURSION_DIGITS).unwrap();
            let mut bad = Vec::new();
            for (k, v) in &racah.entries {
                match approx.get(k) {
                    Some(x) if x.within(v, RECURSION_TOLERANCE_EXP) => {}
                    _ => bad.push(format!("({a},{b}) {k:?}")),
                }
            }
            (racah.entries.len(), bad)
        })
        .collect();
    let took = start.elapsed();
    let count: usize = results.iter().map(|r| r.0).sum();
    let bad: Vec<String> = results.into_iter().flat_map(|r| r.1).collect();
    let ok = bad.is_empty() && took < RECURSION_BUDGET;
    Outcome {
        ok,
        detail: if bad.is_empty() {
            format!("{count} coefficients within 1e-{RECURSION_TOLERANCE_EXP} at {RECURSION_DIGITS} digits in {took:?}")
        } else {
            format!("{} outside tolerance, first {}", bad.len(), bad[0])
        },
    }
}

fn property_suites() -> Outcome {
    let pairs: Vec<(u32, u32)> = (0..=12).flat_map(|a| (0..=12).map(move |b| (a, b))).collect();
    let failures: Vec<String> = pairs
        .par_iter()
        .flat_map_iter(|&(a, b)| pair_properties(a, b))
        .collect();
    Outcome {
        ok: failures.is_empty(),
        detail: if failures.is_empty() {
            format!(
                "vandermonde, unitarity, reflection, nilpotency, selection zeros, stretched over {} pairs",
                pairs.len()
            )
        } else {
            format!("{} failures, first {}", failures.len(), failures[0])
        },
    }
}

fn pair_properties(a: u32, b: u32) -> Vec<String> {
    let (j1, j2) = (t(a), t(b));
    let mut bad = Vec::new();

    let base = omega0(j1, j2);
    for s in 0..=a + b {
        let sum = base.diagonal(s).abs_sum();
        if num_bigint::BigInt::from(sum) != binomial((a + b) as i64, s as i64) {
            bad.push(format!("vandermonde ({a},{b}) s={s}"));
        }
    }

    let table = build_table(j1, j2, Route::Product).unwrap();
    if !table.row_unitarity_failures().1.is_empty() {
        bad.push(format!("row unitarity ({a},{b})"));
    }
    if !table.column_unitarity_failures().1.is_empty() {
        bad.push(format!("column unitarity ({a},{b})"));
    }

    for n in 0..=a.min(b) {
        for route in Route::ALL {
            let m = omega_n(j1, j2, n, route).unwrap();
            for u1 in 0..=a {
                for u2 in 0..=b {
                    let v = extract_cg(&m, u1, u2).unwrap();
                    let w = extract_cg(&m, a - u1, b - u2).unwrap();
                    let w = if n % 2 == 0 { w } else { -w };
                    if v != w {
                        bad.push(format!("reflection ({a},{b}) n={n} {route:?} ({u1},{u2})"));
                    }
                    let s = u1 + u2;
                    let physical = n <= s && s <= a + b - n;
                    if !physical && !m.get(u1, u2).unwrap().is_zero() {
                        bad.push(format!("support ({a},{b}) n={n} {route:?} ({u1},{u2})"));
                    }
                }
            }
        }
    }

    for n in a.min(b) + 1..=a.min(b) + 3 {
        if !lambda_minus_v_pow(j1, j2, n).is_zero() {
            bad.push(format!("nilpotency ({a},{b}) n={n}"));
        }
    }

    // M != M1 + M2, and |M1 + M2| > J, both vanish
    let keys = physical_keys(j1, j2);
    for total in cgomega::halfint::allowed_total_j(j1, j2) {
        for m1 in j1.projections() {
            for m2 in j2.projections() {
                for m in total.projections() {
                    if m != m1 + m2 && !racah_cg_m(j1, m1, j2, m2, total, m).unwrap().is_zero() {
                        bad.push(format!("selection ({a},{b}) {total}:{m} {m1} {m2}"));
                    }
                }
                let k = CgKey::new(total, m1, m2);
                if (k.two_m.unsigned_abs() > total.twice()) != keys.binary_search(&k).is_err() {
                    bad.push(format!("key set ({a},{b}) {k:?}"));
                }
                if k.two_m.unsigned_abs() > total.twice() && !table.get(&k).is_zero() {
                    bad.push(format!("forbidden value ({a},{b}) {k:?}"));
                }
            }
        }
    }

    for u1 in 0..=a {
        for u2 in 0..=b {
            let m1 = p(2 * u1 as i32 - a as i32);
            let m2 = p(2 * u2 as i32 - b as i32);
            if stretched_cg(j1, m1, j2, m2).unwrap() != extract_cg(&base, u1, u2).unwrap() {
                bad.push(format!("stretched ({a},{b}) ({u1},{u2})"));
            }
        }
    }
    bad
}

fn effort_claim() -> Outcome {
    match compare_effort(t(60), t(60), Route::Product, 1, 100, 2024) {
        Ok(r) => Outcome {
            ok: r.agree() && r.sampled == 100,
            detail: format!(
                "2J1=2J2=60: {} entries, omega {:.2}s ({} bits), racah {:.2}s ({} bits), {}/{} samples agree",
                r.entries,
                r.omega_seconds,
                r.omega_max_bits,
                r.racah_seconds,
                r.racah_max_bits,
                r.sampled - r.sample_mismatches.len(),
                r.sampled
            ),
        },
        Err(e) => Outcome {
            ok: false,
            detail: e.to_string(),
        },
    }
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 6] = [
        ("1 golden matrices", golden_matrices),
        ("2 golden decompositions", golden_decompositions),
        ("3 oracle equivalence 2J<=12", oracle_equivalence),
        ("4 recursion oracle 2J<=8", recursion_oracle),
        ("5 property suites 2J<=12", property_suites),
        ("6 effort at 2J=60", effort_claim),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = run();
        let mark = if outcome.ok { "PASS" } else { "FAIL" };
        println!("acceptance {name}: {mark} ({})", outcome.detail);
        if !outcome.ok {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("acceptance: {failed} of 6 criteria failed");
        std::process::exit(1);
    }
    println!("acceptance: all 6 criteria passed");
}
