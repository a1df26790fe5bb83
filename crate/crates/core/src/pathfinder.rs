//! The end-to-end solver: network to automaton to grammar to shortest word,
//! and the word back to a concrete path.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grammar::{l_values, pda_to_cfg, shortest_word, Length};
use crate::network::{Names, Network, NodeId};
use crate::pda::{build_pda, expand_f, render_word, transform_pda, InputSymbol};
use crate::trace::{transition_for, FeasiblePath, LinkSymbol, Route, Trace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Objective {
    #[serde(rename = "hops")]
    MinHops,
    #[serde(rename = "adaptations")]
    MinAdaptations,
}

impl Objective {
    pub fn as_str(self) -> &'static str {
        match self {
            Objective::MinHops => "hops",
            Objective::MinAdaptations => "adaptations",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hops" => Ok(Objective::MinHops),
            "adaptations" => Ok(Objective::MinAdaptations),
            other => Err(format!("unknown objective {other:?}, expected hops or adaptations")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathResult {
    pub objective: Objective,
    pub path: FeasiblePath,
    /// The shortest word of the grammar, indexed letters included.
    pub word: Vec<InputSymbol>,
    pub trace: Trace,
    pub hops: usize,
    pub adaptations: usize,
}

/// Serialized form of a [`PathResult`]. Field order is part of the format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultDoc {
    pub objective: Objective,
    pub word: String,
    pub trace: String,
    pub path: Vec<String>,
    pub hops: usize,
    pub adaptations: usize,
}

impl PathResult {
    pub fn to_document(&self, names: &Names) -> ResultDoc {
        ResultDoc {
            objective: self.objective,
            word: render_word(names, &self.word),
            trace: self.trace.render(names),
            path: self.path.route().render(names),
            hops: self.hops,
            adaptations: self.adaptations,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Feasible(Box<PathResult>),
    /// The destination cannot be reached by any feasible path.
    Infeasible,
}

impl Solution {
    pub fn feasible(&self) -> Option<&PathResult> {
        match self {
            Solution::Feasible(r) => Some(r),
            Solution::Infeasible => None,
        }
    }
}

/// Failures that mean the pipeline contradicts itself; they never happen on
/// a correct build.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("no path of the network carries the trace")]
    NoMatchingPath,
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

/// Picks one predecessor while reading a path backwards out of the layers.
pub trait PredecessorPolicy {
    /// `candidates` is non-empty and sorted by node id. `layer` is the index
    /// of the link being undone, counted from 0 at the source.
    fn choose(&self, layer: usize, to: NodeId, candidates: &[NodeId]) -> NodeId;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SmallestNodeId;

impl PredecessorPolicy for SmallestNodeId {
    fn choose(&self, _layer: usize, _to: NodeId, candidates: &[NodeId]) -> NodeId {
        candidates[0]
    }
}

pub fn find_path(net: &Network, trace: &Trace) -> Result<FeasiblePath, SolveError> {
    find_path_with(net, trace, &SmallestNodeId)
}

/// Layered forward sweep over the links that can carry each symbol in turn,
/// then a backward walk choosing one predecessor per layer.
pub fn find_path_with(
    net: &Network,
    trace: &Trace,
    policy: &dyn PredecessorPolicy,
) -> Result<FeasiblePath, SolveError> {
    let symbols = trace.symbols();
    if symbols.is_empty() {
        return Err(SolveError::NoMatchingPath);
    }
    let n = net.node_count();
    let source = net.source();
    // reached[i][v]: v is the head of an admitted link at step i
    let mut reached = vec![vec![false; n]; symbols.len() + 1];
    reached[0][source.index()] = true;
    for (i, &x) in symbols.iter().enumerate() {
        let (prev, rest) = reached.split_at_mut(i + 1);
        let (prev, next) = (&prev[i], &mut rest[0]);
        for u in net.nodes().filter(|u| prev[u.index()]) {
            if !admits_from(net, symbols, i, u, x) {
                continue;
            }
            for &v in net.successors(u) {
                if v != source && net.caps(v).incoming.contains(&x.protocol) {
                    next[v.index()] = true;
                }
            }
        }
    }
    if !reached[symbols.len()][net.destination().index()] {
        return Err(SolveError::NoMatchingPath);
    }

    let mut nodes = vec![net.destination()];
    for i in (0..symbols.len()).rev() {
        let to = *nodes.last().unwrap();
        let candidates: Vec<NodeId> = net
            .nodes()
            .filter(|&u| reached[i][u.index()] && net.has_link(u, to))
            .filter(|&u| admits_from(net, symbols, i, u, symbols[i]))
            .collect();
        if candidates.is_empty() {
            return Err(SolveError::Inconsistent("layer without predecessor".into()));
        }
        let chosen = policy.choose(i, to, &candidates);
        if !candidates.contains(&chosen) {
            return Err(SolveError::Inconsistent("policy chose a non-candidate".into()));
        }
        nodes.push(chosen);
    }
    nodes.reverse();
    FeasiblePath::new(net, Route::new(nodes, trace.clone()))
        .map_err(|e| SolveError::Inconsistent(format!("recovered path is infeasible: {e}")))
}

/// Whether `u` can put symbol `i` on an outgoing link, given what it
/// received on the previous one.
fn admits_from(net: &Network, symbols: &[LinkSymbol], i: usize, u: NodeId, x: LinkSymbol) -> bool {
    if !net.caps(u).outgoing.contains(&x.protocol) {
        return false;
    }
    if i == 0 {
        return true;
    }
    match transition_for(symbols[i - 1], x) {
        Some(f) => net.supports(u, &f),
        None => false,
    }
}

/// Wall time spent in each stage of one run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StageTimings {
    pub build: Duration,
    pub transform: Duration,
    pub grammar: Duration,
    pub lvalues: Duration,
    pub word: Duration,
    pub path: Duration,
}

impl StageTimings {
    pub fn total(&self) -> Duration {
        self.build + self.transform + self.grammar + self.lvalues + self.word + self.path
    }
}

/// Sizes of the intermediate objects of one run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PipelineStats {
    pub states: usize,
    pub transitions: usize,
    pub nonterminals: usize,
    pub productions: usize,
    pub sweeps: usize,
    pub axiom_length: Length,
    pub timings: StageTimings,
}

/// Runs every stage and reports sizes and timings alongside the answer.
pub fn run_pipeline(net: &Network, objective: Objective) -> Result<(Solution, PipelineStats), SolveError> {
    let mut timings = StageTimings::default();
    let clock = Instant::now();
    let pda = build_pda(net);
    timings.build = clock.elapsed();
    let pda = if objective == Objective::MinAdaptations {
        let clock = Instant::now();
        let t = transform_pda(&pda);
        timings.transform = clock.elapsed();
        t
    } else {
        pda
    };

    let clock = Instant::now();
    let cfg = pda_to_cfg(&pda);
    timings.grammar = clock.elapsed();
    let clock = Instant::now();
    let l = l_values(&cfg);
    timings.lvalues = clock.elapsed();
    let mut stats = PipelineStats {
        states: pda.states().len(),
        transitions: pda.transitions().len(),
        nonterminals: cfg.nonterminals().len(),
        productions: cfg.productions().len(),
        sweeps: l.sweeps(),
        axiom_length: l.get(cfg.axiom()),
        timings,
    };

    let clock = Instant::now();
    let derivation = match shortest_word(&cfg, &l) {
        Ok(d) => d,
        Err(_) => {
            stats.timings.word = clock.elapsed();
            return Ok((Solution::Infeasible, stats));
        }
    };
    stats.timings.word = clock.elapsed();
    let word = derivation.word;

    let clock = Instant::now();
    let plain = match objective {
        Objective::MinHops => word.clone(),
        Objective::MinAdaptations => expand_f(&word),
    };
    let symbols = plain
        .iter()
        .map(|s| s.link_symbol().ok_or_else(|| SolveError::Inconsistent("indexed letter after expansion".into())))
        .collect::<Result<Vec<_>, _>>()?;
    let trace = Trace::new(symbols);
    let path = find_path(net, &trace)?;
    stats.timings.path = clock.elapsed();

    let hops = trace.len();
    let adaptations = match objective {
        Objective::MinHops => path.adaptations(),
        Objective::MinAdaptations => word.len() - 1,
    };
    if adaptations != path.adaptations() || hops != path.hops() {
        return Err(SolveError::Inconsistent(format!(
            "word implies {hops} hops and {adaptations} adaptations, path has {} and {}",
            path.hops(),
            path.adaptations()
        )));
    }
    let result = PathResult { objective, path, word, trace, hops, adaptations };
    Ok((Solution::Feasible(Box::new(result)), stats))
}

pub fn solve(net: &Network, objective: Objective) -> Result<Solution, SolveError> {
    run_pipeline(net, objective).map(|(s, _)| s)
}
