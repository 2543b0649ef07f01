//! `lcarev`: reversibility of 1D linear cellular automata over GF(2)
//! under null boundary conditions.

mod bench;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_traits::ToPrimitive;

use lcarev::gen::{count_lower_bound, generate_polynomials_with, GenError};
use lcarev::gf2poly::{Poly, PolyError};
use lcarev::intfactor::{FactorError, Factorizer};
use lcarev::oracle::{
    dfa_cycle, node_reversible, reversible_residues_matrix, OracleError,
};
use lcarev::period::{
    rule_period_with, PeriodError, PeriodTable, DEFAULT_DEGREE_CAP,
};
use lcarev::rule::{
    classify, normalize_rule, rule_to_poly, step_config, Configuration, Rule, RuleClass, RuleError,
};
use lcarev::sbp::{
    reversible_point_query_with, reversible_residues_sbp_with, walk_sbp, SbpError,
    DEFAULT_STEP_BUDGET,
};

#[derive(Parser)]
#[command(name = "lcarev", version, about = "Reversibility of 1D linear cellular automata over GF(2) under null boundaries")]
struct Cli {
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Left radius rL: how many coefficients sit left of the cell
    /// (default: floor((m-1)/2))
    #[arg(long, global = true)]
    left: Option<usize>,
    /// Factor-cache JSON file (env: LCAREV_FACTOR_CACHE)
    #[arg(long, global = true, env = "LCAREV_FACTOR_CACHE")]
    factor_cache: Option<PathBuf>,
    /// Period-table JSON file (env: LCAREV_PERIOD_TABLE)
    #[arg(long, global = true, env = "LCAREV_PERIOD_TABLE")]
    period_table: Option<PathBuf>,
    /// Wall-clock budget in seconds (bench cells and factorization)
    #[arg(long, global = true)]
    budget: Option<f64>,
    /// Emit every bilateral split of each generated rule
    #[arg(long, global = true)]
    all_splits: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RuleInput {
    /// Rule coefficient string, e.g. 11001
    #[arg(long)]
    rule: String,
}

#[derive(Subcommand)]
enum Command {
    /// Period of reversibility of a rule or polynomial
    Period {
        #[arg(long, conflicts_with = "poly")]
        rule: Option<String>,
        /// Polynomial, MSB-first bits ("1011") or sparse ("x^3+x+1")
        #[arg(long)]
        poly: Option<String>,
    },
    /// Reversible residues of the cell count within one period
    Residues {
        #[command(flatten)]
        input: RuleInput,
        #[arg(long, value_enum, default_value_t = Method::Sbp)]
        method: Method,
        /// Scan limit for the matrix method (default 3 * period)
        #[arg(long)]
        n_max: Option<usize>,
        /// Dump the DFA node cycle as JSON to this file
        #[arg(long)]
        emit_dfa: Option<PathBuf>,
        /// Dump SBP rows and ranks as JSON lines to this file
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Is the n-cell LCA under this rule reversible?
    Check {
        #[command(flatten)]
        input: RuleInput,
        #[arg(short, long)]
        n: BigUint,
    },
    /// Generate rules whose period of reversibility is T
    Generate {
        /// Target period
        t: BigUint,
        /// Emit at most this many polynomials (smallest degrees first)
        #[arg(long, default_value_t = 512)]
        limit: usize,
        /// Which g values the lower bound uses
        #[arg(long, value_enum, default_value_t = GMode::Exact)]
        g_mode: GMode,
    },
    /// Prime factorization of an integer
    Factor {
        n: BigUint,
    },
    /// Build the irreducible-polynomial period table and write it
    Table {
        #[arg(long, default_value_t = 12)]
        max_degree: usize,
    },
    /// Time the period methods (TMS / DFA / PP) and SBP over a rule suite
    Bench {
        /// Suite file: JSON list of {rule, left?, methods?}
        #[arg(long)]
        suite: Option<PathBuf>,
    },
    /// Evolve a configuration and print each step
    Simulate {
        #[command(flatten)]
        input: RuleInput,
        /// Initial configuration, leftmost cell first
        #[arg(long)]
        init: String,
        #[arg(long, default_value_t = 1)]
        steps: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Sbp,
    Dfa,
    Matrix,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GMode {
    /// g(m) = 1 for every prime, reproducing the paper's totals
    Paper,
    /// g(m) computed as phi(m)/ord_m(2)
    Exact,
}

/// Error wrapper that fixes one exit code per error family.
#[derive(Debug)]
enum CliError {
    /// Malformed domain input (exit 3)
    Input(String),
    /// All-zero rule (exit 4)
    ZeroRule,
    /// A size or combination cap was exceeded (exit 5)
    Cap(String),
    /// A time or step budget ran out (exit 6)
    Budget(String),
    /// File or cache trouble (exit 7)
    Io(String),
    /// Internal invariant failure (exit 1)
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 3,
            CliError::ZeroRule => 4,
            CliError::Cap(_) => 5,
            CliError::Budget(_) => 6,
            CliError::Io(_) => 7,
            CliError::Internal(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Input(m)
            | CliError::Cap(m)
            | CliError::Budget(m)
            | CliError::Io(m)
            | CliError::Internal(m) => m.clone(),
            CliError::ZeroRule => "rule has no nonzero coefficient".to_string(),
        }
    }
}

impl From<RuleError> for CliError {
    fn from(e: RuleError) -> Self {
        match e {
            RuleError::ZeroRule => CliError::ZeroRule,
            RuleError::CapExceeded { .. } => CliError::Cap(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::CapExceeded(..) => CliError::Cap(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<FactorError> for CliError {
    fn from(e: FactorError) -> Self {
        match e {
            FactorError::Timeout { .. } => CliError::Budget(e.to_string()),
            FactorError::Zero => CliError::Input(e.to_string()),
            FactorError::Cache { .. } => CliError::Io(e.to_string()),
        }
    }
}

impl From<PeriodError> for CliError {
    fn from(e: PeriodError) -> Self {
        match e {
            PeriodError::CapExceeded { .. } => CliError::Cap(e.to_string()),
            PeriodError::Factor(f) => f.into(),
            PeriodError::Poly(p) => p.into(),
            PeriodError::Rule(r) => r.into(),
            PeriodError::Table { .. } => CliError::Io(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<SbpError> for CliError {
    fn from(e: SbpError) -> Self {
        match e {
            SbpError::StepBudget { .. } => CliError::Budget(e.to_string()),
            SbpError::CapExceeded { .. } => CliError::Cap(e.to_string()),
            SbpError::CycleMismatch => CliError::Internal(e.to_string()),
            SbpError::Period(p) => p.into(),
            SbpError::NotNormalized => CliError::Input(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::CapExceeded { .. } => CliError::Cap(e.to_string()),
            OracleError::Budget { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<GenError> for CliError {
    fn from(e: GenError) -> Self {
        match e {
            GenError::CapExceeded { .. } | GenError::TooManyCombinations { .. } => {
                CliError::Cap(e.to_string())
            }
            GenError::Factor(f) => f.into(),
            GenError::Period(p) => p.into(),
            GenError::Poly(p) => p.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

struct Ctx {
    factorizer: Factorizer,
    table: Option<PeriodTable>,
    table_path: PathBuf,
    json: bool,
    left: Option<usize>,
    budget: Option<Duration>,
    all_splits: bool,
}

impl Ctx {
    fn build(cli: &Cli) -> Result<Ctx, CliError> {
        let factor_budget = cli
            .budget
            .map(Duration::from_secs_f64)
            .unwrap_or(lcarev::intfactor::DEFAULT_BUDGET);
        let factorizer = match &cli.factor_cache {
            Some(path) => Factorizer::with_cache_file(factor_budget, path)?,
            None => Factorizer::new(factor_budget),
        };
        let table_path = cli
            .period_table
            .clone()
            .unwrap_or_else(|| PathBuf::from("period_table.json"));
        let table = if table_path.exists() {
            Some(PeriodTable::load(&table_path)?)
        } else {
            None
        };
        Ok(Ctx {
            factorizer,
            table,
            table_path,
            json: cli.json,
            left: cli.left,
            budget: cli.budget.map(Duration::from_secs_f64),
            all_splits: cli.all_splits,
        })
    }

    fn parse_rule(&self, text: &str) -> Result<Rule, CliError> {
        let left = self.left.unwrap_or_else(|| Rule::symmetric_split(text.len().max(1)));
        Ok(Rule::parse(text, left)?)
    }

    fn save_factor_cache(&self) {
        // best effort; the cache is an accelerator, not an output
        let _ = self.factorizer.save();
    }
}

fn main() -> ExitCode {
    // die quietly when a pipe reader (head, less) goes away
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let ctx = Ctx::build(cli)?;
    match &cli.command {
        Command::Period { rule, poly } => cmd_period(&ctx, rule.as_deref(), poly.as_deref()),
        Command::Residues { input, method, n_max, emit_dfa, trace } => {
            cmd_residues(&ctx, &input.rule, *method, *n_max, emit_dfa.as_deref(), trace.as_deref())
        }
        Command::Check { input, n } => cmd_check(&ctx, &input.rule, n),
        Command::Generate { t, limit, g_mode } => cmd_generate(&ctx, t, Some(*limit), *g_mode),
        Command::Factor { n } => cmd_factor(&ctx, n),
        Command::Table { max_degree } => cmd_table(&ctx, *max_degree),
        Command::Bench { suite } => bench::cmd_bench(&ctx, suite.as_deref()),
        Command::Simulate { input, init, steps } => cmd_simulate(&ctx, &input.rule, init, *steps),
    }
}

fn cmd_period(ctx: &Ctx, rule: Option<&str>, poly: Option<&str>) -> Result<(), CliError> {
    let (f, rule_desc) = match (rule, poly) {
        (Some(text), None) => {
            let r = ctx.parse_rule(text)?;
            let (norm, _) = normalize_rule(&r)?;
            (rule_to_poly(&norm), Some(r))
        }
        (None, Some(text)) => (text.parse::<Poly>()?, None),
        _ => return Err(CliError::Input("pass exactly one of --rule or --poly".into())),
    };
    let result = if f.degree() == Some(0) {
        // the identity rule's polynomial is the constant 1
        lcarev::PeriodResult {
            period: BigUint::from(1u32),
            factor_periods: Vec::new(),
            power_part: BigUint::from(1u32),
        }
    } else {
        lcarev::period::poly_period_with(&f, &ctx.factorizer, DEFAULT_DEGREE_CAP)?
    };
    ctx.save_factor_cache();
    output::render_period(ctx, rule_desc.as_ref(), &f, &result);
    Ok(())
}

fn cmd_residues(
    ctx: &Ctx,
    rule_text: &str,
    method: Method,
    n_max: Option<usize>,
    emit_dfa: Option<&std::path::Path>,
    trace: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let raw = ctx.parse_rule(rule_text)?;
    let norm = match classify(&raw)? {
        RuleClass::Bilateral(norm) => norm,
        RuleClass::AlwaysReversible => {
            output::render_unilateral(ctx, &raw, true);
            return Ok(());
        }
        RuleClass::NeverReversible => {
            output::render_unilateral(ctx, &raw, false);
            return Ok(());
        }
    };
    let report = match method {
        Method::Sbp => reversible_residues_sbp_with(
            &norm,
            &ctx.factorizer,
            DEFAULT_DEGREE_CAP,
            DEFAULT_STEP_BUDGET,
        )?,
        Method::Dfa => lcarev::oracle::reversible_residues_dfa(&norm)?,
        Method::Matrix => {
            let period = rule_period_with(&norm, &ctx.factorizer, DEFAULT_DEGREE_CAP)?.period;
            let scan = n_max
                .or_else(|| period.to_usize().and_then(|p| p.checked_mul(3)))
                .filter(|&n| n <= 1 << 14)
                .ok_or_else(|| {
                    CliError::Cap("matrix scan too large; pass --n-max".to_string())
                })?;
            let dets = reversible_residues_matrix(&norm, scan);
            ctx.save_factor_cache();
            output::render_matrix_residues(ctx, &norm, &period, &dets);
            return Ok(());
        }
    };
    if let Some(path) = emit_dfa {
        let max_nodes = report.period.to_u64().unwrap_or(u64::MAX).min(1 << 16);
        let cycle = dfa_cycle(&norm, max_nodes)?;
        let flags: Vec<bool> = cycle.iter().map(node_reversible).collect();
        std::fs::write(path, output::dfa_cycle_json(&cycle, &flags))?;
    }
    if let Some(path) = trace {
        let steps = report.period.to_u64().unwrap_or(0);
        let mut lines = String::new();
        walk_sbp(&norm, steps, |step, subset, rank| {
            lines.push_str(&output::trace_line(step, subset, rank));
            lines.push('\n');
        })?;
        std::fs::write(path, lines)?;
    }
    ctx.save_factor_cache();
    output::render_report(ctx, &report, method);
    Ok(())
}

fn cmd_check(ctx: &Ctx, rule_text: &str, n: &BigUint) -> Result<(), CliError> {
    let raw = ctx.parse_rule(rule_text)?;
    match classify(&raw)? {
        RuleClass::AlwaysReversible => {
            output::render_check(ctx, &raw, n, true, "unilateral", None, None);
        }
        RuleClass::NeverReversible => {
            output::render_check(ctx, &raw, n, false, "one-sided", None, None);
        }
        RuleClass::Bilateral(norm) => {
            let answer = reversible_point_query_with(
                &norm,
                n,
                &ctx.factorizer,
                DEFAULT_DEGREE_CAP,
                DEFAULT_STEP_BUDGET,
            )?;
            ctx.save_factor_cache();
            output::render_check(
                ctx,
                &norm,
                n,
                answer.reversible,
                "sbp",
                Some(&answer.period.period),
                Some(answer.residue),
            );
        }
    }
    Ok(())
}

fn cmd_generate(ctx: &Ctx, t: &BigUint, limit: Option<usize>, g_mode: GMode) -> Result<(), CliError> {
    let out = generate_polynomials_with(t, limit, &ctx.factorizer, ctx.table.as_ref())?;
    let bound = match g_mode {
        GMode::Exact => out.lower_bound.clone(),
        GMode::Paper => {
            let ones = vec![BigUint::from(1u32); out.spec.odd_part.len()];
            count_lower_bound(&out.spec, &ones)
        }
    };
    ctx.save_factor_cache();
    output::render_generate(ctx, &out, &bound, g_mode == GMode::Paper, ctx.all_splits);
    Ok(())
}

fn cmd_factor(ctx: &Ctx, n: &BigUint) -> Result<(), CliError> {
    let factored = ctx.factorizer.factor(n)?;
    ctx.save_factor_cache();
    output::render_factored(ctx, &factored);
    Ok(())
}

fn cmd_table(ctx: &Ctx, max_degree: usize) -> Result<(), CliError> {
    let table = PeriodTable::build(max_degree, &ctx.factorizer)?;
    table.save(&ctx.table_path)?;
    ctx.save_factor_cache();
    output::render_table(ctx, &table, &ctx.table_path);
    Ok(())
}

fn cmd_simulate(ctx: &Ctx, rule_text: &str, init: &str, steps: usize) -> Result<(), CliError> {
    let rule = ctx.parse_rule(rule_text)?;
    let mut config = Configuration::parse(init)?;
    let mut trace = vec![config.text()];
    for _ in 0..steps {
        config = step_config(&rule, &config);
        trace.push(config.text());
    }
    output::render_simulation(ctx, &rule, &trace);
    Ok(())
}
