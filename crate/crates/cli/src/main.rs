use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use pwpath::gen::GenSpec;
use pwpath::grammar::pda_to_cfg;
use pwpath::network::{network_to_dot, network_to_text, parse_network, Network};
use pwpath::oracle::{brute_force_retrying, OracleOutcome};
use pwpath::pathfinder::{run_pipeline, Objective, Solution};
use pwpath::pda::{build_pda, transform_pda};
use pwpath::trace::{check_feasible, Route};

/// Shortest feasible paths through networks with encapsulation and
/// decapsulation.
#[derive(Parser)]
#[command(name = "pwpath", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an optimal feasible path.
    Solve {
        /// Topology document, or `-` for stdin.
        topology: String,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Hops)]
        objective: ObjectiveArg,
        #[arg(long, value_enum, default_value_t = Emit::Result)]
        emit: Emit,
    },
    /// Check a path against a topology.
    Verify {
        topology: String,
        /// JSON object with a `path` array alternating nodes and symbols.
        path: String,
        /// Also compare the path's cost with a brute-force optimum.
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Hops)]
        objective: ObjectiveArg,
    },
    /// Print an intermediate artifact.
    Export {
        topology: String,
        #[arg(long, value_enum)]
        what: What,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print a random topology.
    Gen {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        protocols: usize,
        #[arg(long, default_value_t = 0.4)]
        edge_prob: f64,
        #[arg(long, default_value_t = 0.3)]
        function_density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Time every stage over growing random instances.
    Bench {
        #[arg(long, default_value_t = 4)]
        min_nodes: usize,
        #[arg(long, default_value_t = 10)]
        max_nodes: usize,
        #[arg(long, default_value_t = 2)]
        protocols: usize,
        #[arg(long, default_value_t = 0.4)]
        edge_prob: f64,
        #[arg(long, default_value_t = 0.3)]
        function_density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Adaptations)]
        objective: ObjectiveArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Hops,
    Adaptations,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Hops => Objective::MinHops,
            ObjectiveArg::Adaptations => Objective::MinAdaptations,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Result,
    Trace,
    Word,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum What {
    Network,
    Pda,
    Tpda,
    Cfg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Dot,
    Text,
}

/// Exit 2: the inputs are unusable. Exit 3: the solver contradicted itself.
enum Failure {
    Input(anyhow::Error),
    Internal(anyhow::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Internal(e.into())
    }
}

type Outcome = Result<u8, Failure>;

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading stdin").map_err(Failure::Input)?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {path}")).map_err(Failure::Input)
    }
}

fn load(path: &str) -> Result<Network, Failure> {
    let text = read_input(path)?;
    parse_network(&text).with_context(|| format!("invalid topology {path}")).map_err(Failure::Input)
}

fn solve(topology: &str, objective: Objective, emit: Emit) -> Outcome {
    let net = load(topology)?;
    let (solution, _) = run_pipeline(&net, objective).map_err(|e| Failure::Internal(e.into()))?;
    let mut out = io::stdout().lock();
    match solution {
        Solution::Infeasible => {
            writeln!(out, "no feasible path")?;
            Ok(1)
        }
        Solution::Feasible(r) => {
            let doc = r.to_document(net.names());
            match emit {
                Emit::Result => {
                    let json = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Internal(e.into()))?;
                    writeln!(out, "{json}")?;
                }
                Emit::Trace => writeln!(out, "{}", doc.trace)?,
                Emit::Word => writeln!(out, "{}", doc.word)?,
            }
            Ok(0)
        }
    }
}

#[derive(Deserialize)]
struct PathDoc {
    path: Vec<String>,
}

fn verify(topology: &str, path: &str, oracle: bool, objective: Objective) -> Outcome {
    let net = load(topology)?;
    let text = read_input(path)?;
    let doc: PathDoc = serde_json::from_str(&text)
        .with_context(|| format!("invalid path document {path}"))
        .map_err(Failure::Input)?;
    let route = Route::parse(net.names(), &doc.path).map_err(|e| Failure::Input(e.into()))?;
    let mut out = io::stdout().lock();
    let seq = match check_feasible(&net, &route) {
        Ok(seq) => seq,
        Err(reason) => {
            writeln!(out, "infeasible: {reason}")?;
            return Ok(1);
        }
    };
    if !oracle {
        writeln!(out, "feasible")?;
        return Ok(0);
    }
    let cost = match objective {
        Objective::MinHops => route.hops(),
        Objective::MinAdaptations => seq.adaptations(),
    };
    match brute_force_retrying(&net, objective, 4) {
        Ok(OracleOutcome::Optimum { cost: best, .. }) if best == cost => writeln!(out, "feasible; optimal")?,
        Ok(OracleOutcome::Optimum { cost: best, .. }) => {
            writeln!(out, "feasible; not optimal ({objective} {cost}, optimum {best})")?
        }
        Ok(OracleOutcome::NoFeasiblePath) => {
            return Err(Failure::Internal(anyhow!("oracle found no path although the given one is feasible")))
        }
        Err(e) => writeln!(out, "feasible; oracle inconclusive: {e}")?,
    }
    Ok(0)
}

fn export(topology: &str, what: What, format: Format) -> Outcome {
    let net = load(topology)?;
    let text = match (what, format) {
        (What::Network, Format::Dot) => network_to_dot(&net),
        (What::Network, Format::Text) => network_to_text(&net),
        (What::Pda, Format::Dot) => build_pda(&net).to_dot(),
        (What::Pda, Format::Text) => build_pda(&net).to_text(),
        (What::Tpda, Format::Dot) => transform_pda(&build_pda(&net)).to_dot(),
        (What::Tpda, Format::Text) => transform_pda(&build_pda(&net)).to_text(),
        (What::Cfg, Format::Text) => pda_to_cfg(&transform_pda(&build_pda(&net))).to_text(),
        (What::Cfg, Format::Dot) => {
            return Err(Failure::Input(anyhow!("the grammar has no dot form, use --format text")))
        }
    };
    io::stdout().lock().write_all(text.as_bytes())?;
    Ok(0)
}

fn gen(spec: GenSpec) -> Outcome {
    let doc = spec.document().map_err(|e| Failure::Input(e.into()))?;
    let json = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Internal(e.into()))?;
    writeln!(io::stdout().lock(), "{json}")?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn bench(
    min_nodes: usize,
    max_nodes: usize,
    protocols: usize,
    edge_probability: f64,
    function_density: f64,
    seed: u64,
    objective: Objective,
) -> Outcome {
    if min_nodes > max_nodes {
        return Err(Failure::Input(anyhow!("--min-nodes exceeds --max-nodes")));
    }
    let mut out = io::stdout().lock();
    writeln!(
        out,
        "{:>5} {:>3} {:>6} {:>6} {:>8} {:>8} {:>9} {:>6} {:>4} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "|V|", "|A|", "|Q|", "bound", "|δ|", "|N|", "|P|", "sweeps", "ℓ",
        "build_us", "xform_us", "cfg_us", "lval_us", "word_us", "total_us"
    )?;
    let mut violations = Vec::new();
    let mut last_q = 0;
    for nodes in min_nodes..=max_nodes {
        let spec = GenSpec { node_count: nodes, protocol_count: protocols, edge_probability, function_density, seed };
        let net = spec.generate().map_err(|e| Failure::Input(e.into()))?;
        let (_, stats) = run_pipeline(&net, objective).map_err(|e| Failure::Internal(e.into()))?;
        let bound = 2 + (nodes - 1) * protocols;
        let t = stats.timings;
        writeln!(
            out,
            "{:>5} {:>3} {:>6} {:>6} {:>8} {:>8} {:>9} {:>6} {:>4} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
            nodes,
            protocols,
            stats.states,
            bound,
            stats.transitions,
            stats.nonterminals,
            stats.productions,
            stats.sweeps,
            stats.axiom_length.to_string(),
            t.build.as_micros(),
            t.transform.as_micros(),
            t.grammar.as_micros(),
            t.lvalues.as_micros(),
            t.word.as_micros() + t.path.as_micros(),
            t.total().as_micros(),
        )?;
        if stats.states > bound {
            violations.push(format!("|V|={nodes}: |Q| above bound"));
        }
        if stats.states < last_q {
            violations.push(format!("|V|={nodes}: |Q| decreased"));
        }
        if stats.sweeps > stats.nonterminals {
            violations.push(format!("|V|={nodes}: more sweeps than nonterminals"));
        }
        last_q = stats.states;
    }
    if violations.is_empty() {
        writeln!(out, "bounds: ok")?;
        Ok(0)
    } else {
        writeln!(out, "bounds: violated: {}", violations.join("; "))?;
        Ok(1)
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Solve { topology, objective, emit } => solve(&topology, objective.into(), emit),
        Command::Verify { topology, path, oracle, objective } => verify(&topology, &path, oracle, objective.into()),
        Command::Export { topology, what, format } => export(&topology, what, format),
        Command::Gen { nodes, protocols, edge_prob, function_density, seed } => gen(GenSpec {
            node_count: nodes,
            protocol_count: protocols,
            edge_probability: edge_prob,
            function_density,
            seed,
        }),
        Command::Bench { min_nodes, max_nodes, protocols, edge_prob, function_density, seed, objective } => {
            bench(min_nodes, max_nodes, protocols, edge_prob, function_density, seed, objective.into())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(3)
        }
    }
}
