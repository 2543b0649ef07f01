//! Rendering for every command, text and JSON. JSON field order follows
//! struct declaration order and is stable across runs.

use num_bigint::BigUint;
use serde::Serialize;

use lcarev::gen::GenOutput;
use lcarev::gf2poly::Poly;
use lcarev::intfactor::FactoredInt;
use lcarev::oracle::Node;
use lcarev::period::{PeriodResult, PeriodTable};
use lcarev::report::ReversibilityReport;
use lcarev::rule::{poly_to_rule, Rule};
use lcarev::sbp::SubsetNode;

use crate::{Ctx, Method};

#[derive(Serialize)]
struct PolyJson {
    bits: String,
    sparse: String,
}

impl PolyJson {
    fn new(f: &Poly) -> Self {
        PolyJson { bits: f.to_bit_string(), sparse: f.to_sparse_string() }
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string(value).expect("serializable"));
}

#[derive(Serialize)]
struct FactorPeriodJson {
    poly: PolyJson,
    multiplicity: u32,
    period: String,
}

#[derive(Serialize)]
struct PeriodJson {
    rule: Option<String>,
    left: Option<usize>,
    poly: PolyJson,
    period: String,
    power_part: String,
    factors: Vec<FactorPeriodJson>,
}

pub(crate) fn render_period(ctx: &Ctx, rule: Option<&Rule>, f: &Poly, result: &PeriodResult) {
    if ctx.json {
        print_json(&PeriodJson {
            rule: rule.map(|r| r.text()),
            left: rule.map(|r| r.left()),
            poly: PolyJson::new(f),
            period: result.period.to_string(),
            power_part: result.power_part.to_string(),
            factors: result
                .factor_periods
                .iter()
                .map(|(g, e, p)| FactorPeriodJson {
                    poly: PolyJson::new(g),
                    multiplicity: *e,
                    period: p.to_string(),
                })
                .collect(),
        });
        return;
    }
    if let Some(r) = rule {
        println!("rule    {}", r);
    }
    println!("poly    {} = {}", f.to_bit_string(), f.to_sparse_string());
    println!("period  {}", result.period);
    if result.factor_periods.len() > 1 || result.factor_periods.iter().any(|(_, e, _)| *e > 1) {
        for (g, e, p) in &result.factor_periods {
            println!("factor  {}^{}  period {}", g.to_bit_string(), e, p);
        }
        println!("power   {}", result.power_part);
    }
}

#[derive(Serialize)]
struct ResiduesJson {
    rule: String,
    left: usize,
    method: &'static str,
    period: String,
    residues: Vec<u64>,
}

pub(crate) fn render_report(ctx: &Ctx, report: &ReversibilityReport, method: Method) {
    let method = match method {
        Method::Sbp => "sbp",
        Method::Dfa => "dfa",
        Method::Matrix => "matrix",
    };
    if ctx.json {
        print_json(&ResiduesJson {
            rule: report.rule.text(),
            left: report.rule.left(),
            method,
            period: report.period.to_string(),
            residues: report.residues.iter().copied().collect(),
        });
        return;
    }
    println!("rule    {}", report.rule);
    println!("method  {}", method);
    println!("{}", report);
}

#[derive(Serialize)]
struct UnilateralJson {
    rule: String,
    left: usize,
    period: String,
    residues: Vec<u64>,
    route: &'static str,
}

pub(crate) fn render_unilateral(ctx: &Ctx, rule: &Rule, reversible: bool) {
    let route = if reversible { "unilateral" } else { "one-sided" };
    if ctx.json {
        print_json(&UnilateralJson {
            rule: rule.text(),
            left: rule.left(),
            period: "1".to_string(),
            residues: if reversible { vec![0] } else { vec![] },
            route,
        });
        return;
    }
    println!("rule    {}", rule);
    if reversible {
        println!("reversible for every n ({route})");
    } else {
        println!("irreversible for every n ({route})");
    }
}

#[derive(Serialize)]
struct MatrixResiduesJson {
    rule: String,
    left: usize,
    method: &'static str,
    period: String,
    reversible_n: Vec<usize>,
}

pub(crate) fn render_matrix_residues(ctx: &Ctx, rule: &Rule, period: &BigUint, dets: &[bool]) {
    let reversible: Vec<usize> =
        dets.iter().enumerate().filter(|(_, &d)| d).map(|(i, _)| i + 1).collect();
    if ctx.json {
        print_json(&MatrixResiduesJson {
            rule: rule.text(),
            left: rule.left(),
            method: "matrix",
            period: period.to_string(),
            reversible_n: reversible,
        });
        return;
    }
    println!("rule    {}", rule);
    println!("period  {} (from the polynomial)", period);
    println!(
        "det(M_n) = 1 for n = {}",
        reversible.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", ")
    );
}

#[derive(Serialize)]
struct CheckJson {
    rule: String,
    left: usize,
    n: String,
    reversible: bool,
    route: &'static str,
    period: Option<String>,
    residue: Option<u64>,
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn render_check(
    ctx: &Ctx,
    rule: &Rule,
    n: &BigUint,
    reversible: bool,
    route: &'static str,
    period: Option<&BigUint>,
    residue: Option<u64>,
) {
    if ctx.json {
        print_json(&CheckJson {
            rule: rule.text(),
            left: rule.left(),
            n: n.to_string(),
            reversible,
            route,
            period: period.map(|p| p.to_string()),
            residue,
        });
        return;
    }
    let verdict = if reversible { "reversible" } else { "irreversible" };
    match period {
        Some(p) => println!(
            "rule {} with n = {}: {} (n mod {} = {}, via {})",
            rule,
            n,
            verdict,
            p,
            residue.unwrap_or(0),
            route
        ),
        None => println!("rule {} with n = {}: {} (via {})", rule, n, verdict, route),
    }
}

#[derive(Serialize)]
struct GenItemJson {
    poly: PolyJson,
    rule: String,
    left: usize,
    period: String,
}

#[derive(Serialize)]
struct GenerateJson {
    period: String,
    t: u32,
    odd_part: Vec<(String, u32)>,
    g_mode: &'static str,
    g_values: Vec<(String, String)>,
    lower_bound: String,
    count: usize,
    skipped_over_cap: u64,
    truncated: bool,
    items: Vec<GenItemJson>,
}

pub(crate) fn render_generate(
    ctx: &Ctx,
    out: &GenOutput,
    bound: &BigUint,
    paper_mode: bool,
    all_splits: bool,
) {
    let mut items = Vec::new();
    for (f, rule) in out.polynomials.iter().zip(&out.rules) {
        if all_splits && rule.size() >= 3 {
            for left in 1..rule.size() - 1 {
                let r = poly_to_rule(f, left).expect("constant term 1");
                items.push((f, r));
            }
        } else {
            items.push((f, rule.clone()));
        }
    }
    if ctx.json {
        print_json(&GenerateJson {
            period: out.spec.target.to_string(),
            t: out.spec.two_exponent,
            odd_part: out.spec.odd_part.iter().map(|(m, e)| (m.to_string(), *e)).collect(),
            g_mode: if paper_mode { "paper" } else { "exact" },
            g_values: out
                .g_values
                .iter()
                .map(|(m, g)| (m.to_string(), g.to_string()))
                .collect(),
            lower_bound: bound.to_string(),
            count: items.len(),
            skipped_over_cap: out.skipped_over_cap,
            truncated: out.truncated,
            items: items
                .iter()
                .map(|(f, r)| GenItemJson {
                    poly: PolyJson::new(f),
                    rule: r.text(),
                    left: r.left(),
                    period: out.spec.target.to_string(),
                })
                .collect(),
        });
        return;
    }
    println!(
        "period {} = 2^{} * {}",
        out.spec.target,
        out.spec.two_exponent,
        out.spec
            .odd_part
            .iter()
            .map(|(m, e)| format!("{m}^{e}"))
            .collect::<Vec<_>>()
            .join(" * ")
    );
    for (m, g) in &out.g_values {
        println!("g({m}) = {g}");
    }
    println!(
        "lower bound ({}) = {}",
        if paper_mode { "paper g=1" } else { "exact g" },
        bound
    );
    println!("emitted {} polynomial(s){}", items.len(), if out.truncated { " (truncated)" } else { "" });
    if out.skipped_over_cap > 0 {
        println!("skipped {} candidate(s) over the degree cap", out.skipped_over_cap);
    }
    for (f, r) in &items {
        println!("  {}  rule {}", f.to_bit_string(), r);
    }
}

#[derive(Serialize)]
struct FactoredJson {
    value: String,
    factors: Vec<(String, u32)>,
}

pub(crate) fn render_factored(ctx: &Ctx, f: &FactoredInt) {
    if ctx.json {
        print_json(&FactoredJson {
            value: f.value().to_string(),
            factors: f.factors().iter().map(|(p, e)| (p.to_string(), *e)).collect(),
        });
        return;
    }
    let parts: Vec<String> = f
        .factors()
        .iter()
        .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
        .collect();
    println!("{} = {}", f.value(), if parts.is_empty() { "1".into() } else { parts.join(" * ") });
}

#[derive(Serialize)]
struct TableJson {
    max_degree: usize,
    path: String,
    entries: Vec<TableRowJson>,
}

#[derive(Serialize)]
struct TableRowJson {
    degree: usize,
    poly: String,
    period: String,
}

pub(crate) fn render_table(ctx: &Ctx, table: &PeriodTable, path: &std::path::Path) {
    let rows = table.rows();
    if ctx.json {
        print_json(&TableJson {
            max_degree: table.max_degree(),
            path: path.display().to_string(),
            entries: rows
                .iter()
                .map(|(d, f, p)| TableRowJson {
                    degree: *d,
                    poly: f.to_bit_string(),
                    period: p.to_string(),
                })
                .collect(),
        });
        return;
    }
    println!("wrote {} irreducibles (degree <= {}) to {}", rows.len(), table.max_degree(), path.display());
    for (d, f, p) in &rows {
        println!("{:>3}  {:<20} {}", d, f.to_bit_string(), p);
    }
}

#[derive(Serialize)]
struct SimulateJson {
    rule: String,
    left: usize,
    n: usize,
    steps: Vec<String>,
}

pub(crate) fn render_simulation(ctx: &Ctx, rule: &Rule, trace: &[String]) {
    if ctx.json {
        print_json(&SimulateJson {
            rule: rule.text(),
            left: rule.left(),
            n: trace.first().map(String::len).unwrap_or(0),
            steps: trace.to_vec(),
        });
        return;
    }
    for (t, line) in trace.iter().enumerate() {
        println!("t={t:<4} {line}");
    }
}

#[derive(Serialize)]
struct DfaNodeJson {
    tuples: Vec<String>,
    reversible: bool,
}

#[derive(Serialize)]
struct DfaCycleJson {
    period: usize,
    nodes: Vec<DfaNodeJson>,
}

pub(crate) fn dfa_cycle_json(cycle: &[Node], flags: &[bool]) -> String {
    let doc = DfaCycleJson {
        period: cycle.len(),
        nodes: cycle
            .iter()
            .zip(flags)
            .map(|(node, &reversible)| DfaNodeJson {
                tuples: (0..node.tuples().len()).map(|i| node.tuple_string(i)).collect(),
                reversible,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

#[derive(Serialize)]
struct TraceLineJson {
    step: u64,
    rows: Vec<String>,
    rank: usize,
    reversible: bool,
}

pub(crate) fn trace_line(step: u64, subset: &SubsetNode, rank: usize) -> String {
    let rr = subset.rows().len();
    serde_json::to_string(&TraceLineJson {
        step,
        rows: (0..rr).map(|j| subset.row_string(j)).collect(),
        rank,
        reversible: rank == rr,
    })
    .expect("serializable")
}
