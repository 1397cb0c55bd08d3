//! The `nimedge` command line. Every command prints JSON on stdout except
//! `report --format csv|table` and `dot`.
//!
//! Exit codes: 0 success, 1 computation error, 2 usage error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nimedge::constructions::{
    p2k_multicoloring, p2k_nim_claim, tail_construction, verify_layout, P2kLayout,
};
use nimedge::ledger::{self, LedgerRecord};
use nimedge::nim::{nim_edges_anchored_with, nim_edges_with, NimOptions};
use nimedge::search::{
    compare_to_turan, construction_seed, exhaustive_f_with, extremal_graph, hill_climb_f,
    ExhaustiveOptions, HillOptions, SeedConstruction,
};
use nimedge::turan::{
    extremal_path_graph, path_length, turan_number, turan_oracle_with, MethodChoice, OracleOptions,
};
use nimedge::{parse_pattern, EdgeColoring, Error, PatternGraph};

#[derive(Parser, Debug)]
#[command(
    name = "nimedge",
    version,
    about = "NIM edges of edge-colored complete graphs"
)]
struct Cli {
    /// Ledger file (default: $NIMEDGE_LEDGER, then ./nimedge-ledger.jsonl).
    #[arg(long, global = true)]
    ledger: Option<PathBuf>,
    /// Do not append a ledger record.
    #[arg(long, global = true)]
    no_ledger: bool,
    /// Worker threads; 0 means all cores.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

fn pattern_arg(s: &str) -> Result<PatternGraph, String> {
    parse_pattern(s).map_err(|e| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build one of the explicit colorings and write it as JSON.
    Construct {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        n: usize,
        /// Path parameter for p2k (H = P_2k); number of colors for overlay.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_parser = pattern_arg)]
        pattern: Option<PatternGraph>,
        /// Number of K_{l-1} cliques in an extremal path graph.
        #[arg(long)]
        t: Option<usize>,
        /// Output file; the p2k layout goes next to it as <file>.layout.json.
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// NIM report of a coloring, or the decomposition check of a p2k layout.
    Verify {
        #[arg(long)]
        coloring: Option<PathBuf>,
        #[arg(long, value_parser = pattern_arg)]
        pattern: Option<PatternGraph>,
        /// Use one anchored search per edge instead of coverage marking.
        #[arg(long)]
        anchored: bool,
        #[arg(long)]
        layout: Option<PathBuf>,
    },
    /// Turan number ex(n, H).
    Turan {
        #[arg(long, value_parser = pattern_arg)]
        pattern: PatternGraph,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
    },
    /// Maximise the NIM count over k-colorings.
    Search {
        #[arg(long, value_parser = pattern_arg)]
        pattern: PatternGraph,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, value_enum)]
        seed_construction: Option<SeedArg>,
        /// Leaf budget for exhaustive search.
        #[arg(long)]
        budget: Option<u64>,
        /// Seed of the ChaCha8 generator behind random starts.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        iterations: usize,
        #[arg(long, default_value_t = 1)]
        restarts: usize,
    },
    /// Summarise the ledger.
    Report {
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
    },
    /// Parse a pattern and print its structure.
    Pattern {
        #[arg(value_parser = pattern_arg)]
        spec: PatternGraph,
    },
    /// Graphviz rendering of a pattern or of one color class.
    Dot {
        #[arg(long, value_parser = pattern_arg, conflicts_with = "coloring")]
        pattern: Option<PatternGraph>,
        #[arg(long, requires = "color")]
        coloring: Option<PathBuf>,
        #[arg(long)]
        color: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Overlay,
    Tail,
    P2k,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Formula,
    Oracle,
    Auto,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Hill,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SeedArg {
    Overlay,
    Tail,
    P2k,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Table,
}

enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

type Outcome = Result<Output, Failure>;

enum Output {
    Json(Value),
    Text(String),
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.map_or_else(|| usage(format!("missing required option --{flag}")), Ok)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result serialization")
}

fn read_coloring(path: &Path) -> Result<EdgeColoring, Failure> {
    let text = std::fs::read_to_string(path).map_err(Error::from)?;
    Ok(EdgeColoring::from_json(&text)?)
}

fn layout_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".layout.json");
    PathBuf::from(s)
}

struct Ctx {
    ledger: Option<PathBuf>,
    threads: usize,
}

impl Ctx {
    fn record(&self, command: &str, parameters: Value, result: &Value) -> Result<(), Failure> {
        if let Some(path) = &self.ledger {
            ledger::append(
                path,
                &LedgerRecord::new(command, parameters, result.clone()),
            )?;
        }
        Ok(())
    }
}

fn construct(
    family: FamilyArg,
    n: usize,
    k: Option<usize>,
    pattern: Option<PatternGraph>,
    t: Option<usize>,
    output: Option<PathBuf>,
) -> Outcome {
    let mut summary = json!({"n": n});
    let coloring = match family {
        FamilyArg::P2k => {
            let k = required(k, "k")?;
            let (c, layout) = p2k_multicoloring(n, k)?;
            let claim = p2k_nim_claim(n, k)?;
            summary["family"] = json!("p2k");
            summary["pattern"] = json!(format!("path:{}", 2 * k));
            summary["expected_nim"] = to_value(&claim);
            if let Some(out) = &output {
                let side = layout_path(out);
                let text = serde_json::to_string_pretty(&layout).map_err(Error::from)?;
                std::fs::write(&side, text).map_err(Error::from)?;
                summary["layout"] = json!(side);
            }
            c
        }
        FamilyArg::Tail => {
            let h = required(pattern, "pattern")?;
            let inst = tail_construction(n, &h)?;
            summary["family"] = json!("tail");
            summary["pattern"] = json!(h.spec());
            summary["a"] = json!(inst.a);
            summary["expected_nim"] = json!(nimedge::constructions::tail_nim_value(n, inst.a));
            inst.coloring
        }
        FamilyArg::Overlay => {
            let h = required(pattern, "pattern")?;
            let colors = k.unwrap_or(2);
            summary["family"] = json!("overlay");
            summary["pattern"] = json!(h.spec());
            match (t, path_length(h.graph())) {
                (Some(t), Some(l)) => {
                    let red = extremal_path_graph(n, l, t)?;
                    let two = nimedge::constructions::extremal_overlay(n, &h, &red)?;
                    EdgeColoring::new(n, colors, two.colors().to_vec())?
                }
                (Some(_), None) => return usage("--t only applies to path patterns"),
                (None, _) => {
                    let red = extremal_graph(n, &h)?;
                    summary["red_edges"] = json!(red.edge_count());
                    construction_seed(SeedConstruction::Overlay, n, colors, &h)?
                }
            }
        }
    };
    summary["k"] = json!(coloring.color_count());
    match output {
        Some(out) => {
            std::fs::write(&out, coloring.to_json()).map_err(Error::from)?;
            summary["output"] = json!(out);
            Ok(Output::Json(summary))
        }
        None => Ok(Output::Json(coloring.to_json_value())),
    }
}

fn execute(cli: Cli) -> Outcome {
    let ctx = Ctx {
        ledger: if cli.no_ledger {
            None
        } else {
            Some(cli.ledger.clone().unwrap_or_else(ledger::ledger_path))
        },
        threads: cli.threads,
    };
    match cli.command {
        Command::Construct {
            family,
            n,
            k,
            pattern,
            t,
            output,
        } => construct(family, n, k, pattern, t, output),
        Command::Verify {
            coloring,
            pattern,
            anchored,
            layout,
        } => {
            if let Some(path) = layout {
                let text = std::fs::read_to_string(&path).map_err(Error::from)?;
                let layout: P2kLayout = serde_json::from_str(&text).map_err(Error::from)?;
                return Ok(Output::Json(to_value(&verify_layout(&layout))));
            }
            let path = required(coloring, "coloring")?;
            let h = required(pattern, "pattern")?;
            let c = read_coloring(&path)?;
            let opts = NimOptions {
                threads: ctx.threads,
                ..NimOptions::default()
            };
            let report = if anchored {
                nim_edges_anchored_with(&c, &h, &opts)?
            } else {
                nim_edges_with(&c, &h, &opts)?
            };
            let value = to_value(&report);
            ctx.record(
                "verify",
                json!({"coloring": c.to_json_value(), "pattern": h.spec(), "anchored": anchored}),
                &value,
            )?;
            Ok(Output::Json(value))
        }
        Command::Turan { pattern, n, method } => {
            let result = match method {
                MethodArg::Formula => turan_number(n, &pattern, MethodChoice::Formula)?,
                MethodArg::Auto => turan_number(n, &pattern, MethodChoice::Auto)?,
                MethodArg::Oracle => turan_oracle_with(
                    n,
                    &pattern,
                    &OracleOptions {
                        threads: ctx.threads,
                        ..OracleOptions::default()
                    },
                )?,
            };
            let value = to_value(&result);
            ctx.record(
                "turan",
                json!({"n": n, "pattern": pattern.spec(), "method": format!("{method:?}").to_lowercase()}),
                &value,
            )?;
            Ok(Output::Json(value))
        }
        Command::Search {
            pattern,
            n,
            k,
            mode,
            seed_construction,
            budget,
            seed,
            iterations,
            restarts,
        } => {
            let seed_kind = seed_construction.map(|s| match s {
                SeedArg::Overlay => SeedConstruction::Overlay,
                SeedArg::Tail => SeedConstruction::Tail,
                SeedArg::P2k => SeedConstruction::P2k,
            });
            let result = match mode {
                ModeArg::Exhaustive => {
                    let mut opts = ExhaustiveOptions {
                        threads: ctx.threads,
                        ..ExhaustiveOptions::default()
                    };
                    if let Some(b) = budget {
                        opts.budget = b;
                    }
                    exhaustive_f_with(n, k, &pattern, &opts)?
                }
                ModeArg::Hill => hill_climb_f(
                    n,
                    k,
                    &pattern,
                    &HillOptions {
                        seed,
                        iterations,
                        restarts,
                        seed_construction: seed_kind,
                        ..HillOptions::default()
                    },
                )?,
            };
            let mut value = to_value(&result);
            ctx.record(
                "search",
                json!({
                    "n": n, "k": k, "pattern": pattern.spec(),
                    "mode": format!("{mode:?}").to_lowercase(),
                    "seed_construction": seed_kind, "budget": budget,
                    "seed": seed, "iterations": iterations, "restarts": restarts,
                }),
                &value,
            )?;
            if let Ok(cmp) = compare_to_turan(&result) {
                value["turan_comparison"] = to_value(&cmp);
            }
            Ok(Output::Json(value))
        }
        Command::Report { format } => {
            let path = ctx.ledger.unwrap_or_else(ledger::ledger_path);
            let records = ledger::read(&path)?;
            let summary = ledger::summarize(&records)?;
            Ok(match format {
                FormatArg::Json => Output::Json(to_value(&summary)),
                FormatArg::Csv => Output::Text(ledger::render_csv(&summary)),
                FormatArg::Table => Output::Text(ledger::render_table(&summary)),
            })
        }
        Command::Pattern { spec } => Ok(Output::Json(to_value(&spec.summary()))),
        Command::Dot {
            pattern,
            coloring,
            color,
        } => match (pattern, coloring, color) {
            (Some(h), None, _) => Ok(Output::Text(h.graph().to_dot("H"))),
            (None, Some(path), Some(i)) => Ok(Output::Text(read_coloring(&path)?.class_to_dot(i)?)),
            _ => usage("dot needs --pattern, or --coloring with --color"),
        },
    }
}

/// Runs one command line, writing results to `out` and diagnostics to
/// `err`, and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match execute(cli) {
        Ok(Output::Json(v)) => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json"));
            0
        }
        Ok(Output::Text(t)) => {
            let _ = write!(out, "{t}");
            0
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Compute(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
