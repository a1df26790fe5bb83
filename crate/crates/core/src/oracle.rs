//! Brute-force reference solver. It searches configurations of a concrete
//! walk through the network directly from the feasibility rules and shares
//! nothing with the automaton pipeline.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::network::{AdaptationFunction, Network, NodeId, Protocol};
use crate::pathfinder::Objective;
use crate::trace::{FeasiblePath, LinkSymbol, Route, Trace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    Optimum { cost: usize, witness: FeasiblePath },
    NoFeasiblePath,
}

impl OracleOutcome {
    pub fn cost(&self) -> Option<usize> {
        match self {
            OracleOutcome::Optimum { cost, .. } => Some(*cost),
            OracleOutcome::NoFeasiblePath => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    /// Some configuration was cut off by the stack bound and the answer
    /// might depend on it.
    #[error("search truncated at stack depth {bound}")]
    BoundExceeded { bound: usize },
    #[error("stack bound must be at least 1")]
    InvalidBound,
}

/// `2 * |V| * |A|`.
pub fn default_stack_bound(net: &Network) -> usize {
    2 * net.node_count() * net.protocol_count()
}

/// Where a walk stands: the node just entered, the symbol it arrived with,
/// and the encapsulations still open as (inner, outer) pairs, innermost
/// first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Config {
    node: NodeId,
    arrived: LinkSymbol,
    stack: Vec<(Protocol, Protocol)>,
}

/// Exhaustive 0-1 breadth-first search for a cheapest feasible walk.
///
/// With `MinHops` every link costs 1; with `MinAdaptations` a link costs 1
/// when the node it leaves encapsulates or decapsulates and 0 otherwise.
/// Configurations whose stack would grow beyond `stack_bound` are dropped.
/// The result is exact whenever no dropped configuration could have led to
/// something cheaper; otherwise `BoundExceeded` is returned.
pub fn brute_force(net: &Network, objective: Objective, stack_bound: usize) -> Result<OracleOutcome, OracleError> {
    if stack_bound == 0 {
        return Err(OracleError::InvalidBound);
    }
    let source = net.source();
    let destination = net.destination();
    if net.caps(destination).incoming.is_empty() {
        return Ok(OracleOutcome::NoFeasiblePath);
    }
    if !walk_exists(net) {
        return Ok(OracleOutcome::NoFeasiblePath);
    }
    let useful = reaches_destination(net);
    // a pair nobody can decapsulate never leaves the stack
    let closable = |pair: (Protocol, Protocol)| {
        net.nodes().any(|u| net.supports(u, &AdaptationFunction::Decapsulation { inner: pair.0, outer: pair.1 }))
    };

    let mut best: HashMap<Config, usize> = HashMap::new();
    let mut parent: HashMap<Config, Option<Config>> = HashMap::new();
    let mut queue: VecDeque<(usize, Config, Option<Config>)> = VecDeque::new();
    // cheapest lower bound over dropped configurations
    let mut truncated: Option<usize> = None;

    for &v in net.successors(source) {
        if v == source || !useful[v.index()] {
            continue;
        }
        for &x in &net.caps(source).outgoing {
            if !net.caps(v).incoming.contains(&x) {
                continue;
            }
            for arrived in [LinkSymbol::plain(x), LinkSymbol::barred(x)] {
                let c = Config { node: v, arrived, stack: Vec::new() };
                let cost = usize::from(objective == Objective::MinHops);
                queue.push_back((cost, c, None));
            }
        }
    }

    while let Some((cost, c, from)) = queue.pop_front() {
        if best.get(&c).is_some_and(|&b| b <= cost) {
            continue;
        }
        best.insert(c.clone(), cost);
        parent.insert(c.clone(), from);

        if c.node == destination && !c.arrived.barred && c.stack.is_empty() {
            if truncated.is_some_and(|lb| lb < cost) {
                return Err(OracleError::BoundExceeded { bound: stack_bound });
            }
            let witness = rebuild(net, &parent, c);
            return Ok(OracleOutcome::Optimum { cost, witness });
        }

        for f in net.functions(c.node) {
            let Some((out, stack)) = apply(*f, &c) else { continue };
            let step = match objective {
                Objective::MinHops => 1,
                Objective::MinAdaptations => usize::from(!f.is_passive()),
            };
            if stack.len() > stack_bound {
                let lb = cost + step + stack.len();
                truncated = Some(truncated.map_or(lb, |t| t.min(lb)));
                continue;
            }
            if stack.len() > c.stack.len() && !closable(*stack.last().unwrap()) {
                continue;
            }
            for &v in net.successors(c.node) {
                if v == source || !useful[v.index()] || !net.caps(v).incoming.contains(&out) {
                    continue;
                }
                for arrived in [LinkSymbol::plain(out), LinkSymbol::barred(out)] {
                    let next = Config { node: v, arrived, stack: stack.clone() };
                    if best.get(&next).is_some_and(|&b| b <= cost + step) {
                        continue;
                    }
                    if step == 0 {
                        queue.push_front((cost, next, Some(c.clone())));
                    } else {
                        queue.push_back((cost + step, next, Some(c.clone())));
                    }
                }
            }
        }
    }
    match truncated {
        Some(_) => Err(OracleError::BoundExceeded { bound: stack_bound }),
        None => Ok(OracleOutcome::NoFeasiblePath),
    }
}

/// Runs the search with the default bound, doubling it after each
/// `BoundExceeded`, at most `attempts` times in total.
pub fn brute_force_retrying(
    net: &Network,
    objective: Objective,
    attempts: usize,
) -> Result<OracleOutcome, OracleError> {
    let mut bound = default_stack_bound(net).max(1);
    let mut last = Err(OracleError::InvalidBound);
    for _ in 0..attempts {
        last = brute_force(net, objective, bound);
        if !matches!(last, Err(OracleError::BoundExceeded { .. })) {
            break;
        }
        bound *= 2;
    }
    last
}

/// The protocol the node emits and the resulting stack, if `f` applies to
/// what arrived.
fn apply(f: AdaptationFunction, c: &Config) -> Option<(Protocol, Vec<(Protocol, Protocol)>)> {
    let s = c.arrived;
    match f {
        AdaptationFunction::Passive(x) if !s.barred && s.protocol == x => Some((x, c.stack.clone())),
        AdaptationFunction::Encapsulation { from, to } if !s.barred && s.protocol == from => {
            let mut stack = c.stack.clone();
            stack.push((from, to));
            Some((to, stack))
        }
        AdaptationFunction::Decapsulation { inner, outer } if s.barred && s.protocol == outer => {
            let mut stack = c.stack.clone();
            (stack.pop() == Some((inner, outer))).then_some((inner, stack))
        }
        _ => None,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Effect {
    Keep,
    Push((Protocol, Protocol)),
    Pop((Protocol, Protocol)),
}

/// Decides whether any feasible walk exists, ignoring cost, by saturating
/// the relation "from key k1 the walk can reach key k2 leaving the stack as
/// it found it". A key is a node together with the symbol it arrived with.
fn walk_exists(net: &Network) -> bool {
    let width = 2 * net.protocol_count();
    let n = net.node_count() * width;
    let key = |node: NodeId, s: LinkSymbol| node.index() * width + 2 * s.protocol.index() + usize::from(s.barred);
    let source = net.source();

    let mut edges: Vec<Vec<(Effect, usize)>> = vec![Vec::new(); n];
    for u in net.nodes().filter(|&u| u != source) {
        for p in net.protocols() {
            for arrived in [LinkSymbol::plain(p), LinkSymbol::barred(p)] {
                for f in net.functions(u) {
                    let (out, effect) = match *f {
                        AdaptationFunction::Passive(x) if !arrived.barred && p == x => (x, Effect::Keep),
                        AdaptationFunction::Encapsulation { from, to } if !arrived.barred && p == from => {
                            (to, Effect::Push((from, to)))
                        }
                        AdaptationFunction::Decapsulation { inner, outer } if arrived.barred && p == outer => {
                            (inner, Effect::Pop((inner, outer)))
                        }
                        _ => continue,
                    };
                    for &v in net.successors(u) {
                        if v != source && net.caps(v).incoming.contains(&out) {
                            for t in [LinkSymbol::plain(out), LinkSymbol::barred(out)] {
                                edges[key(u, arrived)].push((effect, key(v, t)));
                            }
                        }
                    }
                }
            }
        }
    }

    let mut same = vec![false; n * n];
    for k in 0..n {
        same[k * n + k] = true;
    }
    let mut changed = true;
    while changed {
        changed = false;
        for k1 in 0..n {
            for k2 in 0..n {
                if !same[k1 * n + k2] {
                    continue;
                }
                for &(effect, k3) in &edges[k2] {
                    match effect {
                        Effect::Keep => {
                            if !same[k1 * n + k3] {
                                same[k1 * n + k3] = true;
                                changed = true;
                            }
                        }
                        Effect::Push(pair) => {
                            for k4 in 0..n {
                                if !same[k3 * n + k4] {
                                    continue;
                                }
                                for &(e, k5) in &edges[k4] {
                                    if e == Effect::Pop(pair) && !same[k1 * n + k5] {
                                        same[k1 * n + k5] = true;
                                        changed = true;
                                    }
                                }
                            }
                        }
                        Effect::Pop(_) => {}
                    }
                }
            }
        }
    }

    let destination = net.destination();
    for &v in net.successors(source) {
        if v == source {
            continue;
        }
        for &x in net.caps(source).outgoing.iter().filter(|x| net.caps(v).incoming.contains(x)) {
            for first in [LinkSymbol::plain(x), LinkSymbol::barred(x)] {
                for q in net.protocols() {
                    if same[key(v, first) * n + key(destination, LinkSymbol::plain(q))] {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Nodes from which the destination is reachable without passing the
/// source.
fn reaches_destination(net: &Network) -> Vec<bool> {
    let n = net.node_count();
    let mut preds = vec![Vec::new(); n];
    for (u, v) in net.links() {
        preds[v.index()].push(u);
    }
    let mut seen = vec![false; n];
    let mut todo = vec![net.destination()];
    seen[net.destination().index()] = true;
    while let Some(v) = todo.pop() {
        for &u in &preds[v.index()] {
            if u != net.source() && !seen[u.index()] {
                seen[u.index()] = true;
                todo.push(u);
            }
        }
    }
    seen
}

fn rebuild(net: &Network, parent: &HashMap<Config, Option<Config>>, goal: Config) -> FeasiblePath {
    let mut nodes = Vec::new();
    let mut symbols = Vec::new();
    let mut cur = Some(goal);
    while let Some(c) = cur {
        nodes.push(c.node);
        symbols.push(c.arrived);
        cur = parent[&c].clone();
    }
    nodes.push(net.source());
    nodes.reverse();
    symbols.reverse();
    FeasiblePath::new(net, Route::new(nodes, Trace::new(symbols))).expect("oracle witness must be feasible")
}
