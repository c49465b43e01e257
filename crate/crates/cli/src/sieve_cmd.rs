use rayon::prelude::*;

use modmoon_core::haupt::{j_coefficients, HauptSeed};
use modmoon_core::replicate::Bounds;
use modmoon_core::sieve::{
    conclude, filter_inequalities, max_depth, Conclusion, Schedule, SieveNode, ENDGAME_DEPTH, PRIMES,
};
use modmoon_core::BigInt;

use crate::data::{extended, seed};
use crate::output::Report;
use crate::CliError;

/// c⁺ terms needed by `conclude` to re-extend the survivor to q^45.
const CPLUS_TERMS: u32 = 100;
const CONCLUDE_TERMS: u32 = 45;
/// Enough c⁺ for the even-divisor terms of the sieve region.
const SIEVE_CPLUS_TERMS: u32 = 40;

pub struct PrimeRun {
    pub p: u32,
    pub survivors: Vec<SieveNode>,
    pub counts: Vec<usize>,
    pub cplus: Vec<BigInt>,
}

fn check_depth(depth: u8) -> Result<(), CliError> {
    if depth == 0 || depth > max_depth() {
        return Err(CliError::Usage(format!("depth must be in 1..={}", max_depth())));
    }
    Ok(())
}

fn check_prime(p: u32) -> Result<(), CliError> {
    if !PRIMES.contains(&p) {
        return Err(CliError::Usage(format!("prime {p} is not one of {PRIMES:?}")));
    }
    Ok(())
}

/// Level-by-level search; each frontier is expanded in parallel and sorted.
pub fn run_prime(seeds: &[HauptSeed], p: u32, depth: u8, cplus_terms: u32) -> Result<PrimeRun, CliError> {
    let class = seed(seeds, &format!("{p}A"))?;
    let cplus = extended(class, cplus_terms)?;
    let schedule = Schedule::new(p, &cplus, Bounds::default()).map_err(|e| CliError::Failure(e.to_string()))?;
    let mut frontier = vec![SieveNode::root()];
    let mut counts = vec![1];
    for _ in 0..depth {
        let mut next: Vec<SieveNode> = frontier.par_iter().flat_map_iter(|n| schedule.expand(n)).collect();
        next.sort();
        counts.push(next.len());
        frontier = next;
    }
    Ok(PrimeRun { p, survivors: frontier, counts, cplus })
}

fn residue_string(n: &SieveNode) -> String {
    n.residues.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",")
}

/// Survivor rows for one prime; returns whether the table rows are all matched with the right count.
fn table_rows(report: &mut Report, seeds: &[HauptSeed], run: &PrimeRun, depth: u8) -> bool {
    let rows: Vec<&HauptSeed> = seeds.iter().filter(|s| s.p == run.p && !s.label.is_empty()).collect();
    let mut matched = vec![false; rows.len()];
    for s in &run.survivors {
        let hit = rows.iter().position(|r| s.matches(&r.sieve_seeds()));
        if let Some(i) = hit {
            matched[i] = true;
        }
        report.row([
            run.p.to_string(),
            depth.to_string(),
            residue_string(s),
            hit.map(|i| rows[i].label.clone()).unwrap_or_else(|| "-".into()),
        ]);
    }
    let all = matched.iter().all(|&m| m);
    let count_ok = if run.p == 13 { run.survivors.len() >= rows.len() } else { run.survivors.len() == rows.len() };
    all && count_ok
}

pub fn sieve_run(seeds: &[HauptSeed], p: u32, depth: u8) -> Result<Report, CliError> {
    check_prime(p)?;
    check_depth(depth)?;
    let run = run_prime(seeds, p, depth, SIEVE_CPLUS_TERMS)?;
    let mut report = Report::new("sieve run", &["p", "depth", "residues", "match"]);
    let ok = table_rows(&mut report, seeds, &run, depth);
    report.note("survivors", run.survivors.len());
    report.note("level_counts", run.counts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","));
    report.note("status", if ok { "match" } else { "mismatch" });
    Ok(report)
}

/// Every prime; the report's status is `match` only if every prime matches.
pub fn sieve_all(seeds: &[HauptSeed], depth: u8) -> Result<(Report, bool), CliError> {
    check_depth(depth)?;
    let mut report = Report::new("sieve all", &["p", "depth", "residues", "match"]);
    let mut all_ok = true;
    for p in PRIMES {
        let run = run_prime(seeds, p, depth, SIEVE_CPLUS_TERMS)?;
        let ok = table_rows(&mut report, seeds, &run, depth);
        report.note(&format!("p{p:02}_survivors"), run.survivors.len());
        report.note(&format!("p{p:02}_status"), if ok { "match" } else { "mismatch" });
        all_ok &= ok;
    }
    report.note("status", if all_ok { "match" } else { "mismatch" });
    Ok((report, all_ok))
}

pub fn verify(seeds: &[HauptSeed], primes: &[u32], depth: u8) -> Result<(Report, bool), CliError> {
    check_depth(depth)?;
    if depth < ENDGAME_DEPTH {
        return Err(CliError::Usage(format!(
            "depth {depth} is too small for the inequality endgame (need at least {ENDGAME_DEPTH})"
        )));
    }
    for &p in primes {
        check_prime(p)?;
    }
    let j = j_coefficients(5);
    let mut report = Report::new("verify-theorem41", &["p", "survivors", "after_inequalities", "verdict", "note"]);
    let mut all = true;
    for &p in primes {
        let run = run_prime(seeds, p, depth, CPLUS_TERMS)?;
        let kept = filter_inequalities(p, &run.survivors, &run.cplus, &j).map_err(|e| CliError::Usage(e.to_string()))?;
        let (verdict, note) = match conclude(p, &kept, &run.cplus, CONCLUDE_TERMS) {
            Conclusion::H1Vanishes { caveat } => ("H1_vanishes", caveat.unwrap_or_else(|| "-".into())),
            Conclusion::Inconclusive { reason } => {
                all = false;
                ("inconclusive", reason)
            }
        };
        report.row([p.to_string(), run.survivors.len().to_string(), kept.len().to_string(), verdict.into(), note]);
    }
    report.note("status", if all { "H1_vanishes" } else { "inconclusive" });
    Ok((report, all))
}
