//! Wall-clock comparison of the period/reversibility methods over a rule
//! suite, with a per-run timeout. Timeouts are recorded, never fatal.

use std::path::Path;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use lcarev::oracle::{dfa_period_bounded, tms_period, OracleError};
use lcarev::period::{rule_period_with, DEFAULT_DEGREE_CAP};
use lcarev::rule::Rule;
use lcarev::sbp::{reversible_residues_sbp_with, SbpError};

use crate::{CliError, Ctx};

const DEFAULT_BENCH_BUDGET: Duration = Duration::from_secs(10);

/// The twelve rules of the period-method comparison, sizes 5 through 27.
const DEFAULT_SUITE: &[&str] = &[
    "10011",
    "1000011",
    "101100011",
    "10000001001",
    "1000010011001",
    "101100000000011",
    "10000000000101101",
    "1000000000010000001",
    "100000000000000001001",
    "10000000000000000000011",
    "1000000000000000000011011",
    "100000000000000000110000011",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
enum BenchMethod {
    #[serde(rename = "TMS")]
    Tms,
    #[serde(rename = "DFA")]
    Dfa,
    #[serde(rename = "PP")]
    Pp,
    #[serde(rename = "SBP")]
    Sbp,
}

const ALL_METHODS: [BenchMethod; 4] =
    [BenchMethod::Tms, BenchMethod::Dfa, BenchMethod::Pp, BenchMethod::Sbp];

#[derive(Deserialize)]
struct SuiteEntry {
    rule: String,
    left: Option<usize>,
    methods: Option<Vec<BenchMethod>>,
}

#[derive(Clone, Serialize)]
struct BenchRecord {
    method: BenchMethod,
    rule: String,
    left: usize,
    size: usize,
    elapsed_s: f64,
    timeout: bool,
    outcome: Option<String>,
}

fn load_suite(path: Option<&Path>) -> Result<Vec<SuiteEntry>, CliError> {
    match path {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str(&text).map_err(|e| CliError::Io(format!("suite file: {e}")))
        }
        None => Ok(DEFAULT_SUITE
            .iter()
            .map(|rule| SuiteEntry { rule: rule.to_string(), left: None, methods: None })
            .collect()),
    }
}

/// One timed execution. `Ok(Some(text))` is a result, `Ok(None)` a timeout.
fn run_once(
    method: BenchMethod,
    rule: &Rule,
    ctx: &Ctx,
    budget: Duration,
) -> Result<Option<String>, CliError> {
    let deadline = Instant::now() + budget;
    match method {
        BenchMethod::Pp => {
            let result = rule_period_with(rule, &ctx.factorizer, DEFAULT_DEGREE_CAP)?;
            Ok(Some(result.period.to_string()))
        }
        BenchMethod::Dfa => match dfa_period_bounded(rule, Some(deadline)) {
            Ok(period) => Ok(Some(period.to_string())),
            Err(OracleError::Budget { .. }) => Ok(None),
            Err(e) => Err(e.into()),
        },
        BenchMethod::Tms => match tms_period(rule, Some(deadline)) {
            Ok(period) => Ok(Some(period.to_string())),
            Err(OracleError::Budget { .. }) => Ok(None),
            Err(e) => Err(e.into()),
        },
        BenchMethod::Sbp => {
            // full residue enumeration; enormous periods exhaust the step
            // budget and count as a timeout-class outcome
            let steps = budget_steps(budget);
            match reversible_residues_sbp_with(rule, &ctx.factorizer, DEFAULT_DEGREE_CAP, steps) {
                Ok(report) => Ok(Some(format!(
                    "{} residue(s) of {}",
                    report.residues.len(),
                    report.period
                ))),
                Err(SbpError::StepBudget { .. }) => Ok(None),
                Err(e) => Err(e.into()),
            }
        }
    }
}

/// Rough step allowance for the SBP walk under a wall-clock budget.
fn budget_steps(budget: Duration) -> u64 {
    (budget.as_secs_f64() * 2e6) as u64
}

pub(crate) fn cmd_bench(ctx: &Ctx, suite_path: Option<&Path>) -> Result<(), CliError> {
    let suite = load_suite(suite_path)?;
    let budget = ctx.budget.unwrap_or(DEFAULT_BENCH_BUDGET);
    let mut records = Vec::new();
    for entry in &suite {
        let left = entry.left.unwrap_or_else(|| Rule::symmetric_split(entry.rule.len().max(1)));
        let rule = Rule::parse(&entry.rule, left)?;
        let methods = entry.methods.clone().unwrap_or_else(|| ALL_METHODS.to_vec());
        for method in methods {
            // one discarded warm-up, then the median of three runs;
            // a warm-up timeout records the cell as timed out
            let start = Instant::now();
            let warm = run_once(method, &rule, ctx, budget)?;
            let warm_elapsed = start.elapsed();
            let record = match warm {
                None => BenchRecord {
                    method,
                    rule: rule.text(),
                    left,
                    size: rule.size(),
                    elapsed_s: warm_elapsed.as_secs_f64(),
                    timeout: true,
                    outcome: None,
                },
                Some(_) => {
                    let mut times = Vec::with_capacity(3);
                    let mut outcome = None;
                    let mut timed_out = false;
                    for _ in 0..3 {
                        let start = Instant::now();
                        match run_once(method, &rule, ctx, budget)? {
                            Some(text) => {
                                times.push(start.elapsed().as_secs_f64());
                                outcome = Some(text);
                            }
                            None => {
                                timed_out = true;
                                times.push(budget.as_secs_f64());
                            }
                        }
                    }
                    times.sort_by(f64::total_cmp);
                    BenchRecord {
                        method,
                        rule: rule.text(),
                        left,
                        size: rule.size(),
                        elapsed_s: times[times.len() / 2],
                        timeout: timed_out,
                        outcome,
                    }
                }
            };
            records.push(record);
        }
    }
    ctx.save_factor_cache();
    render(ctx, &records);
    Ok(())
}

#[derive(Serialize)]
struct BenchJson {
    budget_s: f64,
    records: Vec<BenchRecord>,
}

fn render(ctx: &Ctx, records: &[BenchRecord]) {
    if ctx.json {
        let budget_s = ctx.budget.unwrap_or(DEFAULT_BENCH_BUDGET).as_secs_f64();
        println!(
            "{}",
            serde_json::to_string(&BenchJson { budget_s, records: records.to_vec() })
                .expect("serializable")
        );
        return;
    }
    // one row per rule, method columns, mirroring the paper's layout
    let mut rules: Vec<(usize, String)> = Vec::new();
    for r in records {
        if !rules.iter().any(|(_, text)| *text == r.rule) {
            rules.push((r.size, r.rule.clone()));
        }
    }
    println!("{:>4}  {:<28} {:>12} {:>12} {:>12} {:>12}", "size", "rule", "TMS", "DFA", "PP", "SBP");
    for (size, rule_text) in &rules {
        let cell = |m: BenchMethod| -> String {
            records
                .iter()
                .find(|r| r.rule == *rule_text && r.method == m)
                .map(|r| {
                    if r.timeout {
                        "timeout".to_string()
                    } else {
                        format!("{:.4}s", r.elapsed_s)
                    }
                })
                .unwrap_or_else(|| "-".to_string())
        };
        println!(
            "{:>4}  {:<28} {:>12} {:>12} {:>12} {:>12}",
            size,
            rule_text,
            cell(BenchMethod::Tms),
            cell(BenchMethod::Dfa),
            cell(BenchMethod::Pp),
            cell(BenchMethod::Sbp),
        );
    }
}
