use std::collections::BTreeSet;
use std::io::Write;
use std::time::Instant;

use cauchon_core::counting::{
    cauchon_s, gamma_size, kaneko_sum_squares, poly_bernoulli_nn, rank_count, rank_root, stirling2,
    stirling2_inclusion_exclusion,
};
use cauchon_core::diagrams::{build_w_r, build_w_r_gamma, enumerate_gamma, enumerate_w, is_diagram, survives};
use cauchon_core::qminors::{census_of, classify_all};
use cauchon_core::qtorus::check_q_quantum;
use cauchon_core::restoration::{delete_derivations, pivot_checks_performed, restore, zero_pattern};
use cauchon_core::{Diagram, Monomial, QLaurent, QuantumMatrix, RVector, TorusElement, TorusPresentation, MAX_GRID};
use clap::ValueEnum;
use num_bigint::BigUint;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::commands::{check_range, symbolic_limit, MAX_COUNT_LARGE};
use crate::output::{csv_field, write_json, CliError, CliResult, Format};

pub const FUZZ_SEED: u64 = 0x5eed_cafe;
pub const FUZZ_CASES: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Suite {
    Counts,
    Enumeration,
    Census,
    Roundtrip,
    Quantum,
    Vanishing,
    Theorem,
    Gamma,
    Fuzz,
    All,
}

impl Suite {
    const EACH: [Suite; 9] = [
        Suite::Counts,
        Suite::Enumeration,
        Suite::Census,
        Suite::Roundtrip,
        Suite::Quantum,
        Suite::Vanishing,
        Suite::Theorem,
        Suite::Gamma,
        Suite::Fuzz,
    ];

    fn name(self) -> &'static str {
        match self {
            Suite::Counts => "counts",
            Suite::Enumeration => "enumeration",
            Suite::Census => "census",
            Suite::Roundtrip => "roundtrip",
            Suite::Quantum => "quantum",
            Suite::Vanishing => "vanishing",
            Suite::Theorem => "theorem",
            Suite::Gamma => "gamma",
            Suite::Fuzz => "fuzz",
            Suite::All => "all",
        }
    }

    fn symbolic(self) -> bool {
        matches!(self, Suite::Census | Suite::Roundtrip | Suite::Quantum | Suite::Vanishing | Suite::Theorem)
    }

    fn limit(self, allow_large: bool) -> usize {
        match self {
            Suite::Counts if allow_large => MAX_COUNT_LARGE,
            Suite::Enumeration if !allow_large => 5,
            s if s.symbolic() => symbolic_limit(allow_large),
            _ => MAX_GRID,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
}

struct Recorder {
    checks: Vec<Check>,
}

impl Recorder {
    fn run(&mut self, suite: Suite, name: &str, f: impl FnOnce() -> CliResult<(bool, String)>) -> CliResult<()> {
        let start = Instant::now();
        let (passed, detail) = f()?;
        self.checks.push(Check {
            suite: suite.name(),
            name: name.to_string(),
            passed,
            detail,
            elapsed_ms: start.elapsed().as_millis(),
        });
        Ok(())
    }
}

pub fn verify(n: usize, suite: Suite, allow_large: bool, format: Format, out: &mut dyn Write) -> CliResult<bool> {
    let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    for s in &suites {
        check_range(n, s.limit(allow_large), &format!("suite {}", s.name()), !allow_large)?;
    }
    let mut rec = Recorder { checks: Vec::new() };
    let restored = if suites.iter().any(|s| s.symbolic()) { Some(restore_all(n)?) } else { None };
    for s in suites {
        match s {
            Suite::Counts => counts(&mut rec, n)?,
            Suite::Enumeration => enumeration(&mut rec, n)?,
            Suite::Census => census(&mut rec, n)?,
            Suite::Roundtrip => roundtrip(&mut rec, n, restored.as_deref().expect("restored"))?,
            Suite::Quantum => quantum(&mut rec, n, restored.as_deref().expect("restored"))?,
            Suite::Vanishing => vanishing(&mut rec, n, restored.as_deref().expect("restored"))?,
            Suite::Theorem => theorem(&mut rec, n, restored.as_deref().expect("restored"))?,
            Suite::Gamma => gamma(&mut rec, n)?,
            Suite::Fuzz => fuzz(&mut rec, n)?,
            Suite::All => unreachable!("expanded above"),
        }
    }
    let passed = rec.checks.iter().all(|c| c.passed);
    report(&rec.checks, n, passed, format, out)?;
    Ok(passed)
}

fn report(checks: &[Check], n: usize, passed: bool, format: Format, out: &mut dyn Write) -> CliResult<()> {
    match format {
        Format::Ascii => {
            for c in checks {
                writeln!(
                    out,
                    "[{}] {}/{}: {} ({} ms)",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.suite,
                    c.name,
                    c.detail,
                    c.elapsed_ms
                )?;
            }
            writeln!(out, "pivot checks: {}", pivot_checks_performed())?;
            writeln!(out, "{}", if passed { "all checks passed" } else { "some checks FAILED" })?;
        }
        Format::Json => write_json(
            out,
            &json!({"n": n, "passed": passed, "pivot_checks": pivot_checks_performed(), "checks": checks}),
        )?,
        Format::Csv => {
            writeln!(out, "suite,check,passed,detail,elapsed_ms")?;
            for c in checks {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    c.suite,
                    csv_field(&c.name),
                    c.passed,
                    csv_field(&c.detail),
                    c.elapsed_ms
                )?;
            }
        }
    }
    Ok(())
}

fn restore_all(n: usize) -> CliResult<Vec<(Diagram, QuantumMatrix)>> {
    let p = TorusPresentation::new(n);
    let diagrams: Vec<Diagram> = enumerate_w(n)?.collect();
    diagrams
        .into_par_iter()
        .map(|w| restore(&p, &w).map(|m| (w, m)))
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Invariant(e.to_string()))
}

fn counts(rec: &mut Recorder, n: usize) -> CliResult<()> {
    rec.run(Suite::Counts, "triple agreement", || {
        let mut bad = Vec::new();
        for m in 1..=n {
            let c = cauchon_s(m);
            if c != poly_bernoulli_nn(m) || c != kaneko_sum_squares(m) {
                bad.push(m);
            }
        }
        Ok((bad.is_empty(), format!("n = 1..={n}, total {} at n = {n}, disagreements {bad:?}", cauchon_s(n))))
    })?;
    rec.run(Suite::Counts, "rank counts sum to total", || {
        let sum: BigUint = (0..=n).map(|t| rank_count(n, t)).sum();
        Ok((sum == cauchon_s(n), format!("sum {sum}")))
    })?;
    rec.run(Suite::Counts, "stirling recurrence vs inclusion-exclusion", || {
        let m = n + 1;
        let ok = (0..=m).all(|a| (0..=m).all(|b| stirling2(a, b) == stirling2_inclusion_exclusion(a, b)));
        Ok((ok, format!("S(a,b) for a,b <= {m}")))
    })
}

fn enumeration(rec: &mut Recorder, n: usize) -> CliResult<()> {
    rec.run(Suite::Enumeration, "count matches closed form", || {
        let mut count: u64 = 0;
        let mut prev: Option<Diagram> = None;
        let mut sorted = true;
        let mut valid = true;
        for w in enumerate_w(n)? {
            count += 1;
            valid &= is_diagram(w.grid());
            if let Some(p) = &prev {
                sorted &= p < &w;
            }
            prev = Some(w);
        }
        let expected = cauchon_s(n);
        let ok = BigUint::from(count) == expected && sorted && valid;
        Ok((ok, format!("{count} diagrams, expected {expected}, sorted {sorted}, valid {valid}")))
    })
}

fn census(rec: &mut Recorder, n: usize) -> CliResult<()> {
    rec.run(Suite::Census, "rank census vs closed form", || {
        let records = classify_all(n).map_err(|e| CliError::Invariant(e.to_string()))?;
        let census = census_of(&records);
        let expected: Vec<BigUint> = (0..=n).map(|t| rank_count(n, t)).collect();
        let got: Vec<BigUint> = (0..=n).map(|t| BigUint::from(census.get(&t).copied().unwrap_or(0))).collect();
        let gap_free = records.iter().all(|r| r.gap_free);
        let witnesses = records.iter().all(|r| r.witness.as_ref().map_or(0, |m| m.size()) == r.rank);
        let ok = got == expected && gap_free && witnesses;
        let show = |v: &[BigUint]| v.iter().map(BigUint::to_string).collect::<Vec<_>>().join(",");
        Ok((ok, format!("census {{{}}} expected {{{}}}, gap_free {gap_free}", show(&got), show(&expected))))
    })
}

fn roundtrip(rec: &mut Recorder, n: usize, restored: &[(Diagram, QuantumMatrix)]) -> CliResult<()> {
    rec.run(Suite::Roundtrip, "delete(restore(w)) = initial", || {
        let p = TorusPresentation::new(n);
        let good = restored
            .par_iter()
            .map(|(w, m)| {
                delete_derivations(&p, m)
                    .map(|d| d == QuantumMatrix::initial(&p, w.grid()))
                    .map_err(|e| CliError::Invariant(e.to_string()))
            })
            .collect::<CliResult<Vec<bool>>>()?
            .into_iter()
            .filter(|&b| b)
            .count();
        Ok((good == restored.len(), format!("{good}/{} round trips", restored.len())))
    })
}

fn quantum(rec: &mut Recorder, n: usize, restored: &[(Diagram, QuantumMatrix)]) -> CliResult<()> {
    rec.run(Suite::Quantum, "restored matrices are q-quantum", || {
        let p = TorusPresentation::new(n);
        let bad: Vec<String> = restored
            .par_iter()
            .filter(|(_, m)| !check_q_quantum(&p, m).is_empty())
            .map(|(w, _)| w.to_string())
            .collect();
        Ok((bad.is_empty(), format!("{}/{} pass, failures {bad:?}", restored.len() - bad.len(), restored.len())))
    })
}

fn vanishing(rec: &mut Recorder, n: usize, restored: &[(Diagram, QuantumMatrix)]) -> CliResult<()> {
    rec.run(Suite::Vanishing, "zeros lie inside the diagram", || {
        let bad = restored.iter().filter(|(w, m)| !zero_pattern(m).is_subset(w.grid())).count();
        Ok((bad == 0, format!("{} diagrams, {bad} with a zero outside w", restored.len())))
    })?;
    rec.run(Suite::Vanishing, "vanishing on w_r", || {
        let mut pairs = 0usize;
        let mut bad = 0usize;
        for t in 0..=n {
            for r in RVector::all(n, t) {
                let w_r = build_w_r(&r);
                for (_, m) in restored.iter().filter(|(w, _)| w_r.is_subset(w.grid())) {
                    pairs += 1;
                    bad += usize::from(!w_r.cells().all(|c| m.get(c.row, c.col).is_zero()));
                }
            }
        }
        Ok((bad == 0, format!("{pairs} pairs (r, w containing w_r), {bad} failures")))
    })
}

fn theorem(rec: &mut Recorder, n: usize, restored: &[(Diagram, QuantumMatrix)]) -> CliResult<()> {
    rec.run(Suite::Theorem, "w_r,gamma family equals the surviving diagrams", || {
        let mut families = 0usize;
        let mut bad = Vec::new();
        for t in 0..=n {
            for r in RVector::all(n, t) {
                families += 1;
                let constructed: Vec<Diagram> = enumerate_gamma(&r)
                    .iter()
                    .map(|g| build_w_r_gamma(&r, g))
                    .collect::<Result<_, _>>()
                    .map_err(|e| CliError::Invariant(e.to_string()))?;
                let set: BTreeSet<Diagram> = constructed.iter().cloned().collect();
                let surviving: BTreeSet<Diagram> =
                    restored.iter().filter(|(_, m)| survives(&r, m)).map(|(w, _)| *w).collect();
                let size_ok = BigUint::from(constructed.len()) == gamma_size(&r);
                if set.len() != constructed.len() || set != surviving || !size_ok {
                    bad.push(r.to_string());
                }
            }
        }
        Ok((bad.is_empty(), format!("{families} vectors r, mismatches {bad:?}")))
    })
}

fn gamma(rec: &mut Recorder, n: usize) -> CliResult<()> {
    rec.run(Suite::Gamma, "sum of |Gamma_r| over R_t", || {
        let mut bad = Vec::new();
        for m in 1..=n {
            for t in 0..=m {
                let rs = RVector::all(m, t);
                let sum: BigUint = rs.iter().map(gamma_size).sum();
                let listed = rs.iter().all(|r| {
                    let gs = enumerate_gamma(r);
                    BigUint::from(gs.len()) == gamma_size(r) && gs.iter().all(|g| g.is_in(r))
                });
                if sum != rank_root(m, t) || !listed {
                    bad.push((m, t));
                }
            }
        }
        Ok((bad.is_empty(), format!("all (n, t) with n <= {n}, failures {bad:?}")))
    })
}

fn random_coeff(rng: &mut StdRng) -> QLaurent {
    QLaurent::from_terms((0..rng.gen_range(1..=2)).map(|_| (rng.gen_range(-2i32..=2), rng.gen_range(-3i64..=3))))
}

fn random_monomial(rng: &mut StdRng, n: usize) -> Monomial {
    Monomial::from_exponents((0..n * n).map(|_| rng.gen_range(-2..=2)).collect())
}

fn random_element(rng: &mut StdRng, n: usize) -> TorusElement {
    TorusElement::from_terms((0..rng.gen_range(0..=3)).map(|_| (random_monomial(rng, n), random_coeff(rng))))
}

fn fuzz(rec: &mut Recorder, n: usize) -> CliResult<()> {
    let dim = n.min(3);
    rec.run(Suite::Fuzz, "torus ring axioms", || {
        let p = TorusPresentation::new(dim);
        let mut rng = StdRng::seed_from_u64(FUZZ_SEED);
        let mut failures = 0usize;
        for _ in 0..FUZZ_CASES {
            let a = random_element(&mut rng, dim);
            let b = random_element(&mut rng, dim);
            let c = random_element(&mut rng, dim);
            let assoc = p.mul(&p.mul(&a, &b), &c) == p.mul(&a, &p.mul(&b, &c));
            let left = p.mul(&a, &b.add(&c)) == p.mul(&a, &b).add(&p.mul(&a, &c));
            let right = p.mul(&a.add(&b), &c) == p.mul(&a, &c).add(&p.mul(&b, &c));
            let mono =
                TorusElement::monomial(random_monomial(&mut rng, dim), QLaurent::term(-1, rng.gen_range(-3..=3)));
            let inv = p.invert_monomial(&mono).map_err(|e| CliError::Invariant(e.to_string()))?;
            let units = p.mul(&mono, &inv) == p.one() && p.mul(&inv, &mono) == p.one();
            failures += usize::from(!(assoc && left && right && units));
        }
        Ok((
            failures == 0,
            format!("{FUZZ_CASES} cases on {dim}x{dim} generators, seed {FUZZ_SEED:#x}, {failures} failures"),
        ))
    })?;
    rec.run(Suite::Fuzz, "coefficient ring axioms", || {
        let mut rng = StdRng::seed_from_u64(FUZZ_SEED ^ 1);
        let mut failures = 0usize;
        for _ in 0..FUZZ_CASES {
            let (a, b, c) = (random_coeff(&mut rng), random_coeff(&mut rng), random_coeff(&mut rng));
            let ok = &(&a * &b) * &c == &a * &(&b * &c)
                && &a * &(&b + &c) == &(&a * &b) + &(&a * &c)
                && &a * &b == &b * &a
                && a.to_string().parse::<QLaurent>().ok().as_ref() == Some(&a);
            failures += usize::from(!ok);
        }
        Ok((failures == 0, format!("{FUZZ_CASES} cases, seed {:#x}, {failures} failures", FUZZ_SEED ^ 1)))
    })
}
