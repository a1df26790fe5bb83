//! Link symbols, traces and the feasibility check for concrete paths.

use thiserror::Error;

use crate::network::{AdaptationFunction, Names, Network, NodeId, Protocol};

const MACRON: char = '\u{0304}';

/// A protocol as carried over one link; `barred` marks that the receiving
/// node decapsulates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkSymbol {
    pub protocol: Protocol,
    pub barred: bool,
}

impl LinkSymbol {
    pub fn plain(protocol: Protocol) -> Self {
        LinkSymbol { protocol, barred: false }
    }

    pub fn barred(protocol: Protocol) -> Self {
        LinkSymbol { protocol, barred: true }
    }

    pub fn render(&self, names: &Names) -> String {
        let mut s = names.protocol(self.protocol).to_string();
        if self.barred {
            s.push(MACRON);
        }
        s
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SymbolError {
    #[error("empty symbol")]
    Empty,
    #[error("unknown protocol in symbol {0:?}")]
    UnknownProtocol(String),
    #[error("symbol {0:?} carries an index")]
    Indexed(String),
}

/// Splits `name`, `namē`, `~name` and subscripted forms like `b̄₂` into
/// (protocol name, barred, index).
pub(crate) fn split_symbol(text: &str) -> Result<(&str, bool, u32), SymbolError> {
    let mut rest = text.trim();
    let mut index = 0u32;
    let mut digits = 0u32;
    let mut scale = 1u32;
    while let Some(c) = rest.chars().next_back() {
        if ('\u{2080}'..='\u{2089}').contains(&c) {
            index += (c as u32 - 0x2080) * scale;
            scale = scale.saturating_mul(10);
            digits += 1;
            rest = &rest[..rest.len() - c.len_utf8()];
        } else {
            break;
        }
    }
    if digits == 0 {
        index = 1;
    }
    let mut barred = false;
    if let Some(stripped) = rest.strip_suffix(MACRON) {
        rest = stripped;
        barred = true;
    }
    if let Some(stripped) = rest.strip_prefix('~') {
        rest = stripped;
        barred = true;
    }
    if rest.is_empty() || index == 0 {
        return Err(SymbolError::Empty);
    }
    Ok((rest, barred, index))
}

pub fn parse_link_symbol(names: &Names, text: &str) -> Result<LinkSymbol, SymbolError> {
    let (name, barred, index) = split_symbol(text)?;
    if index != 1 {
        return Err(SymbolError::Indexed(text.to_string()));
    }
    let protocol = names
        .protocol_id(name)
        .ok_or_else(|| SymbolError::UnknownProtocol(text.to_string()))?;
    Ok(LinkSymbol { protocol, barred })
}

/// The sequence of link symbols along a path.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Trace(Vec<LinkSymbol>);

impl Trace {
    pub fn new(symbols: Vec<LinkSymbol>) -> Self {
        Trace(symbols)
    }

    pub fn symbols(&self) -> &[LinkSymbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn render(&self, names: &Names) -> String {
        self.0.iter().map(|s| s.render(names)).collect::<Vec<_>>().join(" ")
    }

    /// Parses a whitespace separated trace such as `a b b̄ a`.
    pub fn parse(names: &Names, text: &str) -> Result<Trace, SymbolError> {
        text.split_whitespace()
            .map(|t| parse_link_symbol(names, t))
            .collect::<Result<Vec<_>, _>>()
            .map(Trace)
    }
}

impl From<Vec<LinkSymbol>> for Trace {
    fn from(symbols: Vec<LinkSymbol>) -> Self {
        Trace(symbols)
    }
}

/// A candidate path: node sequence plus the symbol used on each link.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Route {
    pub nodes: Vec<NodeId>,
    pub trace: Trace,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RouteParseError {
    #[error("a path alternates nodes and symbols and has odd length, got {0} items")]
    Shape(usize),
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

impl Route {
    pub fn new(nodes: Vec<NodeId>, trace: Trace) -> Self {
        Route { nodes, trace }
    }

    /// Parses the alternating form `S, a, U, b, ..., D`.
    pub fn parse<S: AsRef<str>>(names: &Names, items: &[S]) -> Result<Route, RouteParseError> {
        if items.len().is_multiple_of(2) {
            return Err(RouteParseError::Shape(items.len()));
        }
        let mut nodes = Vec::new();
        let mut symbols = Vec::new();
        for (i, item) in items.iter().enumerate() {
            let item = item.as_ref().trim();
            if i % 2 == 0 {
                nodes.push(
                    names
                        .node_id(item)
                        .ok_or_else(|| RouteParseError::UnknownNode(item.to_string()))?,
                );
            } else {
                symbols.push(parse_link_symbol(names, item)?);
            }
        }
        Ok(Route { nodes, trace: Trace(symbols) })
    }

    /// The alternating form, one string per node or symbol.
    pub fn render(&self, names: &Names) -> Vec<String> {
        let mut out = Vec::with_capacity(self.nodes.len() * 2);
        for (i, &n) in self.nodes.iter().enumerate() {
            if i > 0 {
                if let Some(s) = self.trace.symbols().get(i - 1) {
                    out.push(s.render(names));
                }
            }
            out.push(names.node(n).to_string());
        }
        out
    }

    pub fn hops(&self) -> usize {
        self.trace.len()
    }

    /// Whether some link is traversed more than once.
    pub fn repeats_link(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.nodes.windows(2).any(|w| !seen.insert((w[0], w[1])))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceError {
    #[error("path has {nodes} nodes but {symbols} symbols")]
    Length { nodes: usize, symbols: usize },
    #[error("symbol at position {position} is barred and followed by its own protocol")]
    SelfDecapsulation { position: usize },
}

/// The function a node applies, given the symbols on its incoming and
/// outgoing links.
pub fn transition_for(incoming: LinkSymbol, outgoing: LinkSymbol) -> Option<AdaptationFunction> {
    let (x, y) = (incoming.protocol, outgoing.protocol);
    match (incoming.barred, x == y) {
        (false, true) => Some(AdaptationFunction::Passive(x)),
        (false, false) => Some(AdaptationFunction::Encapsulation { from: x, to: y }),
        (true, false) => Some(AdaptationFunction::Decapsulation { inner: y, outer: x }),
        (true, true) => None,
    }
}

/// The transition sequence of a path: one function per intermediate node.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TransitionSeq(Vec<AdaptationFunction>);

impl TransitionSeq {
    pub fn items(&self) -> &[AdaptationFunction] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The same sequence without passive entries.
    pub fn well_parenthesized(&self) -> Vec<AdaptationFunction> {
        self.0.iter().copied().filter(|f| !f.is_passive()).collect()
    }

    pub fn adaptations(&self) -> usize {
        self.0.iter().filter(|f| !f.is_passive()).count()
    }
}

pub fn trace_transitions(trace: &Trace) -> Result<TransitionSeq, TraceError> {
    trace
        .symbols()
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            transition_for(w[0], w[1]).ok_or(TraceError::SelfDecapsulation { position: i + 1 })
        })
        .collect::<Result<Vec<_>, _>>()
        .map(TransitionSeq)
}

pub fn transition_sequence(route: &Route) -> Result<TransitionSeq, TraceError> {
    if route.nodes.len() != route.trace.len() + 1 {
        return Err(TraceError::Length { nodes: route.nodes.len(), symbols: route.trace.len() });
    }
    trace_transitions(&route.trace)
}

/// Generalized Dyck membership: every decapsulation closes the most recent
/// open encapsulation of the same pair, and nothing stays open. Passive
/// entries are ignored.
pub fn is_valid_sequence(seq: &[AdaptationFunction]) -> bool {
    let mut open = Vec::new();
    for f in seq {
        match *f {
            AdaptationFunction::Encapsulation { from, to } => open.push((from, to)),
            AdaptationFunction::Decapsulation { inner, outer } => {
                if open.pop() != Some((inner, outer)) {
                    return false;
                }
            }
            AdaptationFunction::Passive(_) => {}
        }
    }
    open.is_empty()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Infeasibility {
    #[error("path has {nodes} nodes but {symbols} symbols")]
    Shape { nodes: usize, symbols: usize },
    #[error("path does not start at the source")]
    WrongStart,
    #[error("path does not end at the destination")]
    WrongEnd,
    #[error("no link from {0} to {1}")]
    MissingLink(String, String),
    #[error("path re-enters the source")]
    ReentersSource,
    #[error("invalid trace: {0}")]
    MalformedTrace(#[from] TraceError),
    #[error("last symbol is barred but the destination decapsulates nothing")]
    BarredLast,
    #[error("invalid parenthesization")]
    InvalidParenthesization,
    #[error("node {node} does not support {function}")]
    Unsupported { node: String, function: String },
    #[error("protocol {protocol} cannot leave {node}")]
    NotSendable { node: String, protocol: String },
    #[error("protocol {protocol} cannot enter {node}")]
    NotReceivable { node: String, protocol: String },
}

/// Checks a route against the network, reporting the first violated rule.
///
/// The source only ever appears as the first node: it emits the first
/// symbol and never relays.
pub fn check_feasible(net: &Network, route: &Route) -> Result<TransitionSeq, Infeasibility> {
    let names = net.names();
    let nodes = &route.nodes;
    let symbols = route.trace.symbols();
    if nodes.len() < 2 || nodes.len() != symbols.len() + 1 {
        return Err(Infeasibility::Shape { nodes: nodes.len(), symbols: symbols.len() });
    }
    if nodes[0] != net.source() {
        return Err(Infeasibility::WrongStart);
    }
    if *nodes.last().unwrap() != net.destination() {
        return Err(Infeasibility::WrongEnd);
    }
    for w in nodes.windows(2) {
        if !net.has_link(w[0], w[1]) {
            return Err(Infeasibility::MissingLink(
                names.node(w[0]).to_string(),
                names.node(w[1]).to_string(),
            ));
        }
    }
    if nodes[1..].contains(&net.source()) {
        return Err(Infeasibility::ReentersSource);
    }
    let seq = transition_sequence(route)?;
    if symbols.last().unwrap().barred {
        return Err(Infeasibility::BarredLast);
    }
    if !is_valid_sequence(seq.items()) {
        return Err(Infeasibility::InvalidParenthesization);
    }
    for (i, f) in seq.items().iter().enumerate() {
        let node = nodes[i + 1];
        if !net.supports(node, f) {
            return Err(Infeasibility::Unsupported {
                node: names.node(node).to_string(),
                function: f.render(names),
            });
        }
    }
    for (i, s) in symbols.iter().enumerate() {
        let (from, to) = (nodes[i], nodes[i + 1]);
        if !net.caps(from).outgoing.contains(&s.protocol) {
            return Err(Infeasibility::NotSendable {
                node: names.node(from).to_string(),
                protocol: names.protocol(s.protocol).to_string(),
            });
        }
        if !net.caps(to).incoming.contains(&s.protocol) {
            return Err(Infeasibility::NotReceivable {
                node: names.node(to).to_string(),
                protocol: names.protocol(s.protocol).to_string(),
            });
        }
    }
    Ok(seq)
}

pub fn is_feasible_path(net: &Network, route: &Route) -> bool {
    check_feasible(net, route).is_ok()
}

/// A route known to be feasible, with its metrics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasiblePath {
    route: Route,
    hops: usize,
    adaptations: usize,
}

impl FeasiblePath {
    pub fn new(net: &Network, route: Route) -> Result<FeasiblePath, Infeasibility> {
        let seq = check_feasible(net, &route)?;
        Ok(FeasiblePath { hops: route.hops(), adaptations: seq.adaptations(), route })
    }

    pub fn route(&self) -> &Route {
        &self.route
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.route.nodes
    }

    pub fn trace(&self) -> &Trace {
        &self.route.trace
    }

    pub fn hops(&self) -> usize {
        self.hops
    }

    pub fn adaptations(&self) -> usize {
        self.adaptations
    }

    pub fn into_route(self) -> Route {
        self.route
    }
}
