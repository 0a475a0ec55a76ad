//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::classes::{brute_force_class_sizes, class_size, enumerate_admissible, total_models, AdmissibleTuple};
use crate::combinatorics::{brute_force_partition_count, check_growth_bound, check_stirling_bounds, stirling_r_assoc};
use crate::complexity::{build_cover_graph, complexity_report, min_cover, upper_bound, SearchCaps};
use crate::distribution::{
    build_distribution, dominating_class_sweep, entropy_vs_depth, estimate_separation_probability,
    exact_separation_probability, format_sig, majority_report, sig6, verify_monotone_connection_with, DRule,
    MonotoneMode, CSV_HEADER,
};
use crate::error::{Error, Result};
use crate::game::{equivalence_grid, trace, GameCaps, GamePosition, Winner};
use crate::logic::{ModelProfile, PointedProfile, Vocabulary};

#[derive(Debug, Parser)]
#[command(
    name = "gmlu",
    version,
    about = "Equivalence classes, entropies and description complexity for graded modal logic"
)]
pub struct Cli {
    /// Comma-separated proposition symbols.
    #[arg(long, global = true, default_value = "p")]
    pub tau: String,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Seed for sampling commands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(flatten)]
    pub caps: CapArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Limits for the exponential searches.
#[derive(Debug, Clone, Args)]
pub struct CapArgs {
    /// Largest formula size the exact search may reach.
    #[arg(long, global = true, env = "GMLU_MAX_FORMULA_SIZE", default_value_t = 16)]
    pub max_formula_size: u64,

    /// Largest domain size for exact search and game solving.
    #[arg(long, global = true, env = "GMLU_MAX_EXACT_N", default_value_t = 6)]
    pub max_exact_n: u64,

    /// Largest game resource `r`.
    #[arg(long, global = true, env = "GMLU_MAX_GAME_RESOURCE", default_value_t = 7)]
    pub max_game_resource: u64,

    /// Largest number of pointed models across both sides of a game.
    #[arg(long, global = true, env = "GMLU_MAX_GAME_SIDE", default_value_t = 4)]
    pub max_game_side: usize,

    /// Largest support for the exhaustive cover search.
    #[arg(long, global = true, env = "GMLU_MAX_COVER_SUPPORT", default_value_t = 16)]
    pub max_cover_support: usize,
}

#[derive(Debug, Clone, Args)]
pub struct Size {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub d: u64,
}

#[derive(Debug, Clone, Args)]
pub struct TupleArgs {
    #[command(flatten)]
    pub size: Size,
    /// Tuple entries in type order, e.g. `0,1`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub tuple: Vec<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the (n,d)-admissible tuples.
    Tuples(Size),
    /// Exact size and probability of one class.
    ClassSize {
        #[command(flatten)]
        args: TupleArgs,
        /// Also count by enumerating all labeled models.
        #[arg(long)]
        brute_force: bool,
    },
    /// Class distribution and its two entropies.
    Entropy(Size),
    /// Entropies for every depth 1..=n.
    EntropySweep {
        #[arg(long)]
        n: u64,
    },
    /// Bounds, cover cost and optionally the exact description complexity.
    Complexity {
        #[command(flatten)]
        args: TupleArgs,
        /// Run the exhaustive formula search.
        #[arg(long)]
        exact: bool,
    },
    /// Cover graph and minimum cover.
    Cover(TupleArgs),
    #[command(subcommand)]
    Game(GameCommand),
    #[command(subcommand)]
    Phase(PhaseCommand),
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Debug, Clone, Args)]
pub struct GameArgs {
    #[arg(long)]
    pub d: u64,
    /// Resource.
    #[arg(long)]
    pub r: u64,
    /// Pointed model on side A as `counts@type`, e.g. `1,2@1`; repeatable.
    #[arg(long = "a", required = true)]
    pub a: Vec<String>,
    /// Pointed model on side B; repeatable.
    #[arg(long = "b", required = true)]
    pub b: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum GameCommand {
    /// Decide the winner.
    Solve(GameArgs),
    /// Print S's winning strategy and the formula it yields.
    Trace(GameArgs),
}

#[derive(Debug, Subcommand)]
pub enum PhaseCommand {
    /// Majority-class report against the two depth thresholds.
    Majority(Size),
    /// Candidate and maximum class probabilities along a depth rule.
    Sweep {
        /// `sqrt-below:A`, `quarter-below:A`, `sqrt-above:A`, `ceil-share` or `const:D`.
        #[arg(long, value_parser = parse_rule)]
        rule: DRule,
        #[arg(long, value_delimiter = ',', required = true)]
        ns: Vec<u64>,
    },
    /// Sampled and exact probability that two random models are separated.
    Separation {
        #[command(flatten)]
        size: Size,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Bounds,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Class sizes against enumeration of all labeled models.
    Counting {
        #[arg(long, default_value_t = 8)]
        max_n: u64,
    },
    /// Bounds on associated Stirling numbers and the partition recurrence.
    Stirling {
        #[arg(long, default_value_t = 30)]
        max_n: u64,
        #[arg(long, default_value_t = 4)]
        max_m: u64,
        #[arg(long, default_value_t = 5)]
        max_r: u64,
        /// Largest n for the partition enumeration.
        #[arg(long, default_value_t = 9)]
        partition_max_n: u64,
    },
    /// Size and complexity monotonicity on comparable tuples.
    Monotone {
        #[command(flatten)]
        size: Size,
        #[arg(long, value_enum, default_value_t = ModeArg::Bounds)]
        mode: ModeArg,
    },
    /// Game solver against the formula search on an exhaustive grid (|τ| = 1).
    GameTheorem {
        #[arg(long, default_value_t = 3)]
        max_n: u64,
        #[arg(long, default_value_t = 2)]
        max_d: u64,
        #[arg(long, default_value_t = 6)]
        max_r: u64,
        #[arg(long, default_value_t = 2)]
        max_side: usize,
    },
}

fn parse_rule(s: &str) -> std::result::Result<DRule, String> {
    DRule::parse(s).map_err(|e| e.to_string())
}

/// What a subcommand produced.
struct Report {
    command: &'static str,
    result: Value,
    table: Option<Table>,
    seed: Option<u64>,
    /// False when a verification found a violation.
    passed: bool,
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str], rows: Vec<Vec<String>>) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows }
    }
}

impl Report {
    fn new(command: &'static str, result: impl Serialize) -> Result<Self> {
        let result = serde_json::to_value(result).map_err(|e| Error::Domain(format!("serialization failed: {e}")))?;
        Ok(Self { command, result, table: None, seed: None, passed: true })
    }

    fn table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    fn passed(mut self, passed: bool) -> Self {
        self.passed = passed;
        self
    }
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

/// Runs the CLI on `args` and returns the exit code: 0 on success, 2 on a
/// usage error, 1 on a computation error or failed verification.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let vocab = match Vocabulary::parse_list(&cli.tau) {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    let outcome = execute(&cli, &vocab).and_then(|report| {
        let text = render(&cli, &vocab, &report)?;
        Ok((report.passed, text))
    });
    match outcome {
        Ok((passed, text)) => {
            let _ = out.write_all(text.as_bytes());
            if passed {
                0
            } else {
                let _ = writeln!(err, "error: verification failed");
                1
            }
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Compute(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn tuple_of(vocab: &Vocabulary, args: &TupleArgs) -> Result<AdmissibleTuple> {
    AdmissibleTuple::for_vocabulary(vocab, args.tuple.clone(), args.size.n, args.size.d)
}

fn search_caps(cli: &Cli, d: u64) -> SearchCaps {
    SearchCaps { max_n: cli.caps.max_exact_n, max_d: d.max(1), ..SearchCaps::default() }
}

fn game_caps(cli: &Cli) -> GameCaps {
    GameCaps {
        max_n: cli.caps.max_exact_n,
        max_r: cli.caps.max_game_resource,
        max_side_total: cli.caps.max_game_side,
        max_symbols: GameCaps::default().max_symbols,
    }
}

fn parse_pointed(vocab: &Vocabulary, text: &str) -> std::result::Result<PointedProfile, Failure> {
    let (counts, point) = text
        .split_once('@')
        .ok_or_else(|| Failure::Usage(format!("pointed model `{text}` must look like `counts@type`")))?;
    let counts: Vec<u64> = counts
        .split(',')
        .map(|c| c.trim().parse::<u64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Failure::Usage(format!("bad counts in `{text}`")))?;
    let point: usize = point.trim().parse().map_err(|_| Failure::Usage(format!("bad point type in `{text}`")))?;
    Ok(PointedProfile::new(ModelProfile::for_vocabulary(vocab, counts)?, point)?)
}

fn position_of(vocab: &Vocabulary, g: &GameArgs) -> std::result::Result<GamePosition, Failure> {
    let a = g.a.iter().map(|s| parse_pointed(vocab, s)).collect::<std::result::Result<Vec<_>, _>>()?;
    let b = g.b.iter().map(|s| parse_pointed(vocab, s)).collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(GamePosition::new(g.r, a, b)?)
}

fn execute(cli: &Cli, vocab: &Vocabulary) -> std::result::Result<Report, Failure> {
    let report = match &cli.command {
        Command::Tuples(s) => {
            let tuples = enumerate_admissible(s.n, s.d, vocab)?;
            let rows = tuples.iter().map(|t| vec![t.to_string(), class_size(t).to_string()]).collect();
            let list: Vec<Value> =
                tuples.iter().map(|t| json!({ "entries": t.entries(), "size": class_size(t).to_string() })).collect();
            Report::new("tuples", json!({ "n": s.n, "d": s.d, "count": tuples.len(), "tuples": list }))?
                .table(Table::new(&["tuple", "size"], rows))
        }
        Command::ClassSize { args, brute_force } => {
            let t = tuple_of(vocab, args)?;
            let size = class_size(&t);
            let total = total_models(t.n(), vocab.type_count());
            let mut result = json!({
                "tuple": t.entries(),
                "n": t.n(),
                "d": t.d(),
                "size": size.to_string(),
                "total": total.to_string(),
                "probability": num_rational::BigRational::new(size.clone().into(), total.clone().into()).to_string(),
            });
            if *brute_force {
                let counted = brute_force_class_sizes(t.n(), t.d(), vocab)?.get(t.entries()).copied().unwrap_or(0);
                result["brute_force_size"] = json!(counted.to_string());
                result["brute_force_matches"] = json!(size == counted.into());
            }
            let row = vec![t.to_string(), size.to_string(), total.to_string()];
            Report::new("class-size", result)?.table(Table::new(&["tuple", "size", "total"], vec![row]))
        }
        Command::Entropy(s) => {
            let dist = build_distribution(s.n, s.d, vocab)?;
            let (h_s, h_b) = (dist.shannon_entropy(), dist.boltzmann_entropy());
            let result = json!({
                "n": s.n,
                "d": s.d,
                "classes": dist.entries.len(),
                "h_s": h_s,
                "h_b": h_b,
                "sum": h_s + h_b,
                "expected_sum": (vocab.len() as u64 * s.n) as f64,
                "distribution": dist.entries,
            });
            Report::new("entropy", result)?.table(Table::new(&CSV_HEADER, dist.csv_rows()))
        }
        Command::EntropySweep { n } => {
            let table = entropy_vs_depth(*n, vocab)?;
            let rows = table
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.d.to_string(),
                        r.classes.to_string(),
                        format_sig(r.h_s),
                        format_sig(r.h_b),
                        format_sig(r.sum),
                    ]
                })
                .collect();
            Report::new("entropy-sweep", &table)?.table(Table::new(&["d", "classes", "h_s", "h_b", "sum"], rows))
        }
        Command::Complexity { args, exact } => {
            let t = tuple_of(vocab, args)?;
            let exact = if *exact {
                let budget = upper_bound(&t).size;
                if budget > cli.caps.max_formula_size {
                    return Err(Error::ScaleCap(format!(
                        "upper bound {budget} exceeds the formula size cap {}",
                        cli.caps.max_formula_size
                    ))
                    .into());
                }
                Some((budget, search_caps(cli, t.d())))
            } else {
                None
            };
            let r = complexity_report(&t, vocab, exact, cli.caps.max_cover_support)?;
            let row = vec![
                t.to_string(),
                r.lower.to_string(),
                r.upper.to_string(),
                r.exact.map_or_else(String::new, |e| e.to_string()),
                r.cover_cost.to_string(),
            ];
            Report::new("complexity", &r)?
                .table(Table::new(&["tuple", "lower", "upper", "exact", "cover_cost"], vec![row]))
        }
        Command::Cover(args) => {
            let t = tuple_of(vocab, args)?;
            let graph = build_cover_graph(&t);
            let cover = min_cover(&graph, cli.caps.max_cover_support)?;
            Report::new("cover", json!({ "graph": graph, "min_cover": cover }))?
        }
        Command::Game(GameCommand::Solve(g)) | Command::Game(GameCommand::Trace(g)) => {
            let pos = position_of(vocab, g)?;
            let strategy = trace(&pos, g.d, game_caps(cli))?;
            let winner = if strategy.is_some() { Winner::S } else { Winner::D };
            let formula = strategy.as_ref().map(|s| s.formula());
            let mut result = json!({
                "position": pos,
                "d": g.d,
                "winner": winner,
                "formula": formula.as_ref().map(|f| f.to_text(vocab)),
                "formula_size": formula.as_ref().map(|f| f.size()),
            });
            let name = if let Command::Game(GameCommand::Trace(_)) = &cli.command {
                result["strategy"] = serde_json::to_value(&strategy).map_err(|e| Failure::Compute(e.to_string()))?;
                "game trace"
            } else {
                "game solve"
            };
            Report::new(name, result)?
        }
        Command::Phase(PhaseCommand::Majority(s)) => {
            let r = majority_report(s.n, s.d, vocab)?;
            let row = vec![
                s.n.to_string(),
                s.d.to_string(),
                serde_json::to_value(r.clause)
                    .map_err(|e| Failure::Compute(e.to_string()))?
                    .as_str()
                    .unwrap_or("")
                    .to_string(),
                r.max_tuple.to_string(),
                format_sig(r.max_probability),
                r.has_majority.to_string(),
            ];
            Report::new("phase majority", &r)?
                .table(Table::new(&["n", "d", "clause", "max_tuple", "max_probability", "has_majority"], vec![row]))
        }
        Command::Phase(PhaseCommand::Sweep { rule, ns }) => {
            let rows = dominating_class_sweep(*rule, vocab, ns)?;
            let table = rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.d.to_string(),
                        format_sig(r.candidate_probability_f64),
                        r.max_tuple.to_string(),
                        format_sig(r.max_probability_f64),
                    ]
                })
                .collect();
            Report::new("phase sweep", json!({ "rule": rule, "rows": rows }))?
                .table(Table::new(&["n", "d", "candidate_probability", "max_tuple", "max_probability"], table))
        }
        Command::Phase(PhaseCommand::Separation { size, trials }) => {
            let est = estimate_separation_probability(size.n, size.d, vocab, *trials, cli.seed)?;
            let exact = exact_separation_probability(size.n, size.d, vocab)?;
            let exact_f64 = sig6(num_traits::ToPrimitive::to_f64(&exact).unwrap_or(f64::NAN));
            let row = vec![
                size.n.to_string(),
                size.d.to_string(),
                est.trials.to_string(),
                format_sig(est.probability),
                format_sig(exact_f64),
            ];
            let mut report = Report::new(
                "phase separation",
                json!({ "estimate": est, "exact_probability": exact.to_string(), "exact_probability_f64": exact_f64 }),
            )?
            .table(Table::new(&["n", "d", "trials", "estimate", "exact"], vec![row]));
            report.seed = Some(cli.seed);
            report
        }
        Command::Verify(v) => verify(cli, vocab, v)?,
    };
    Ok(report)
}

fn verify(cli: &Cli, vocab: &Vocabulary, v: &VerifyCommand) -> std::result::Result<Report, Failure> {
    Ok(match v {
        VerifyCommand::Counting { max_n } => {
            let mut cases = 0;
            let mut mismatches = Vec::new();
            for n in 1..=*max_n {
                for d in 1..=n {
                    let brute = brute_force_class_sizes(n, d, vocab)?;
                    let tuples = enumerate_admissible(n, d, vocab)?;
                    let mut sum = num_bigint::BigUint::from(0u32);
                    let mut ok = brute.len() == tuples.len();
                    for t in &tuples {
                        let size = class_size(t);
                        ok &= brute.get(t.entries()).map(|&c| size == c.into()).unwrap_or(false);
                        sum += size;
                    }
                    ok &= sum == total_models(n, vocab.type_count());
                    cases += 1;
                    if !ok {
                        mismatches.push(json!({ "n": n, "d": d }));
                    }
                }
            }
            let pass = mismatches.is_empty();
            Report::new("verify counting", json!({ "cases": cases, "mismatches": mismatches, "pass": pass }))?
                .passed(pass)
        }
        VerifyCommand::Stirling { max_n, max_m, max_r, partition_max_n } => {
            let (mut bounds, mut growth, mut parts) = (0, 0, 0);
            let mut failures = Vec::new();
            for m in 1..=*max_m {
                for r in 1..=*max_r {
                    for n in m * r..=*max_n {
                        bounds += 1;
                        let c = check_stirling_bounds(n, m, r)?;
                        if !c.holds {
                            failures.push(json!({ "check": "bounds", "n": n, "m": m, "r": r }));
                        }
                        if n > m * r {
                            growth += 1;
                            if !check_growth_bound(n, m, r)?.holds {
                                failures.push(json!({ "check": "growth", "n": n, "m": m, "r": r }));
                            }
                        }
                    }
                }
            }
            for n in 1..=*partition_max_n {
                for m in 1..=n {
                    for r in 1..=n / m {
                        parts += 1;
                        let brute = brute_force_partition_count(n, m, r)?;
                        if stirling_r_assoc(n, m, r)? != brute.into() {
                            failures.push(json!({ "check": "partitions", "n": n, "m": m, "r": r }));
                        }
                    }
                }
            }
            let pass = failures.is_empty();
            let result = json!({
                "bounds_checked": bounds,
                "growth_checked": growth,
                "partitions_checked": parts,
                "failures": failures,
                "pass": pass,
            });
            Report::new("verify stirling", result)?.passed(pass)
        }
        VerifyCommand::Monotone { size, mode } => {
            let mode = match mode {
                ModeArg::Exact => MonotoneMode::Exact,
                ModeArg::Bounds => MonotoneMode::Bounds,
            };
            let r = verify_monotone_connection_with(size.n, size.d, vocab, mode, search_caps(cli, size.d))?;
            let pass = r.all_pass;
            Report::new("verify monotone", &r)?.passed(pass)
        }
        VerifyCommand::GameTheorem { max_n, max_d, max_r, max_side } => {
            if vocab.len() != 1 {
                return Err(Failure::Usage("the game grid runs over a single proposition symbol".into()));
            }
            let g = equivalence_grid(*max_n, *max_d, *max_r, *max_side)?;
            let pass = g.disagreements.is_empty();
            let result = json!({
                "instances": g.instances,
                "s_wins": g.s_wins,
                "disagreements": g.disagreements,
                "pass": pass,
            });
            Report::new("verify game-theorem", result)?.passed(pass)
        }
    })
}

/// Rounds every float in the tree to six significant digits.
fn round_floats(v: &mut Value) {
    match v {
        Value::Number(num) if num.is_f64() => {
            if let Some(x) = num.as_f64().and_then(|x| serde_json::Number::from_f64(sig6(x))) {
                *num = x;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn render(cli: &Cli, vocab: &Vocabulary, report: &Report) -> std::result::Result<String, Failure> {
    let type_order = vocab.type_names();
    match cli.format {
        Format::Json => {
            let mut doc = json!({
                "command": report.command,
                "vocabulary": vocab.symbols(),
                "type_order": type_order,
                "result": report.result,
            });
            if let Some(seed) = report.seed {
                doc["seed"] = json!(seed);
            }
            round_floats(&mut doc);
            let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Compute(e.to_string()))?;
            text.push('\n');
            Ok(text)
        }
        Format::Csv => {
            let table = report
                .table
                .as_ref()
                .ok_or_else(|| Failure::Usage(format!("`{}` has no CSV output; use json or text", report.command)))?;
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Failure::Compute(e.to_string());
            w.write_record(&table.header).map_err(io)?;
            for row in &table.rows {
                w.write_record(row).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Failure::Compute(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Failure::Compute(e.to_string()))
        }
        Format::Text => {
            let mut text = format!("{}\ntypes: {}\n", report.command, type_order.join(", "));
            if let Some(seed) = report.seed {
                text.push_str(&format!("seed: {seed}\n"));
            }
            let mut result = report.result.clone();
            round_floats(&mut result);
            flatten("", &result, &mut text);
            Ok(text)
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                flatten(&key(k), child, out);
            }
        }
        Value::Array(items) if items.iter().any(|i| i.is_object() || i.is_array()) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), child, out);
            }
        }
        Value::String(s) => out.push_str(&format!("{prefix}: {s}\n")),
        other => out.push_str(&format!("{prefix}: {other}\n")),
    }
}
