//! Problem instances: protocols, nodes, links and per-node adaptation functions.
//!
//! Node and protocol names are interned into dense indices. Both name tables
//! are sorted, so index order is lexicographic name order; every iteration in
//! the crate that needs a deterministic order relies on this.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a node in a [`Network`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub fn from_index(index: usize) -> Self {
        NodeId(index as u32)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A letter of the protocol alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Protocol(u16);

impl Protocol {
    pub fn from_index(index: usize) -> Self {
        Protocol(index as u16)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// How a protocol crosses a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AdaptationFunction {
    /// `(from, to)`: wrap `from` inside `to`.
    Encapsulation { from: Protocol, to: Protocol },
    /// `(p, p)`: forward `p` unchanged.
    Passive(Protocol),
    /// `(inner, outer)` barred: unwrap `inner` from `outer`.
    Decapsulation { inner: Protocol, outer: Protocol },
}

impl AdaptationFunction {
    /// Protocol the node receives when applying this function.
    pub fn received(&self) -> Protocol {
        match *self {
            AdaptationFunction::Encapsulation { from, .. } => from,
            AdaptationFunction::Passive(p) => p,
            AdaptationFunction::Decapsulation { outer, .. } => outer,
        }
    }

    /// Protocol the node sends after applying this function.
    pub fn sent(&self) -> Protocol {
        match *self {
            AdaptationFunction::Encapsulation { to, .. } => to,
            AdaptationFunction::Passive(p) => p,
            AdaptationFunction::Decapsulation { inner, .. } => inner,
        }
    }

    pub fn is_passive(&self) -> bool {
        matches!(self, AdaptationFunction::Passive(_))
    }

    pub fn render(&self, names: &Names) -> String {
        match *self {
            AdaptationFunction::Encapsulation { from, to } => {
                format!("({},{})", names.protocol(from), names.protocol(to))
            }
            AdaptationFunction::Passive(p) => {
                format!("({},{})", names.protocol(p), names.protocol(p))
            }
            AdaptationFunction::Decapsulation { inner, outer } => {
                format!("({},{})\u{0304}", names.protocol(inner), names.protocol(outer))
            }
        }
    }
}

/// Shared, sorted name tables for nodes and protocols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Names {
    nodes: Arc<[String]>,
    protocols: Arc<[String]>,
}

impl Names {
    pub fn node(&self, id: NodeId) -> &str {
        &self.nodes[id.index()]
    }

    pub fn protocol(&self, p: Protocol) -> &str {
        &self.protocols[p.index()]
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.nodes
            .binary_search_by(|n| n.as_str().cmp(name))
            .ok()
            .map(NodeId::from_index)
    }

    pub fn protocol_id(&self, name: &str) -> Option<Protocol> {
        self.protocols
            .binary_search_by(|n| n.as_str().cmp(name))
            .ok()
            .map(Protocol::from_index)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn protocol_count(&self) -> usize {
        self.protocols.len()
    }

    pub fn protocols(&self) -> impl Iterator<Item = Protocol> {
        (0..self.protocols.len()).map(Protocol::from_index)
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId::from_index)
    }
}

/// In, Out and Pass sets of a node.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Capabilities {
    pub incoming: BTreeSet<Protocol>,
    pub outgoing: BTreeSet<Protocol>,
    pub passive: BTreeSet<Protocol>,
}

impl Capabilities {
    pub fn from_functions<'a>(functions: impl IntoIterator<Item = &'a AdaptationFunction>) -> Self {
        let mut caps = Capabilities::default();
        for f in functions {
            caps.incoming.insert(f.received());
            caps.outgoing.insert(f.sent());
            if let AdaptationFunction::Passive(p) = *f {
                caps.passive.insert(p);
            }
        }
        caps
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetworkError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("the protocol alphabet is empty")]
    EmptyAlphabet,
    #[error("invalid protocol name {0:?}")]
    InvalidProtocolName(String),
    #[error("invalid node name {0:?}")]
    InvalidNodeName(String),
    #[error("protocol {0:?} declared twice")]
    DuplicateProtocol(String),
    #[error("node {0:?} declared twice")]
    DuplicateNode(String),
    #[error("link {0:?} -> {1:?} declared twice")]
    DuplicateLink(String, String),
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("unknown protocol {0:?}")]
    UnknownProtocol(String),
    #[error("node {node:?} adapts protocol {protocol:?} into itself")]
    SelfAdaptation { node: String, protocol: String },
    #[error("{kind} function at node {node:?} needs a second protocol `b`")]
    MissingCarrier { node: String, kind: &'static str },
    #[error("passive function at node {node:?} must not name a second protocol")]
    PassiveWithCarrier { node: String },
    #[error("source and destination are the same node {0:?}")]
    SourceIsDestination(String),
}

/// Topology document as read from and written to disk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyDoc {
    pub protocols: Vec<String>,
    pub nodes: Vec<NodeDoc>,
    pub links: Vec<(String, String)>,
    pub source: String,
    pub destination: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub id: String,
    #[serde(default)]
    pub functions: Vec<FunctionDoc>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionKind {
    Encap,
    Passive,
    Decap,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionDoc {
    pub kind: FunctionKind,
    pub a: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
}

impl FunctionDoc {
    pub fn encap(a: &str, b: &str) -> Self {
        FunctionDoc { kind: FunctionKind::Encap, a: a.into(), b: Some(b.into()) }
    }

    pub fn passive(a: &str) -> Self {
        FunctionDoc { kind: FunctionKind::Passive, a: a.into(), b: None }
    }

    pub fn decap(a: &str, b: &str) -> Self {
        FunctionDoc { kind: FunctionKind::Decap, a: a.into(), b: Some(b.into()) }
    }
}

/// A validated, immutable problem instance.
#[derive(Clone, Debug)]
pub struct Network {
    names: Names,
    links: BTreeSet<(NodeId, NodeId)>,
    successors: Vec<Vec<NodeId>>,
    functions: Vec<BTreeSet<AdaptationFunction>>,
    capabilities: Vec<Capabilities>,
    source: NodeId,
    destination: NodeId,
}

/// Characters reserved by the symbol notation (bar, subscripts, `~` prefix).
fn valid_protocol_name(name: &str) -> bool {
    !name.is_empty()
        && !name.starts_with('~')
        && name.chars().all(|c| {
            !c.is_whitespace() && c != '\u{0304}' && !('\u{2080}'..='\u{2089}').contains(&c)
        })
}

fn valid_node_name(name: &str) -> bool {
    !name.is_empty() && !name.chars().any(char::is_whitespace)
}

pub fn parse_network(text: &str) -> Result<Network, NetworkError> {
    let doc: TopologyDoc =
        serde_json::from_str(text).map_err(|e| NetworkError::Syntax(e.to_string()))?;
    Network::from_document(&doc)
}

impl Network {
    pub fn from_document(doc: &TopologyDoc) -> Result<Network, NetworkError> {
        if doc.protocols.is_empty() {
            return Err(NetworkError::EmptyAlphabet);
        }
        let mut protocols = doc.protocols.clone();
        for p in &protocols {
            if !valid_protocol_name(p) {
                return Err(NetworkError::InvalidProtocolName(p.clone()));
            }
        }
        protocols.sort();
        if let Some(w) = protocols.windows(2).find(|w| w[0] == w[1]) {
            return Err(NetworkError::DuplicateProtocol(w[0].clone()));
        }

        let mut nodes: Vec<String> = doc.nodes.iter().map(|n| n.id.clone()).collect();
        for n in &nodes {
            if !valid_node_name(n) {
                return Err(NetworkError::InvalidNodeName(n.clone()));
            }
        }
        nodes.sort();
        if let Some(w) = nodes.windows(2).find(|w| w[0] == w[1]) {
            return Err(NetworkError::DuplicateNode(w[0].clone()));
        }

        let names = Names { nodes: nodes.into(), protocols: protocols.into() };
        let node = |name: &str| {
            names.node_id(name).ok_or_else(|| NetworkError::UnknownNode(name.to_string()))
        };
        let proto = |name: &str| {
            names
                .protocol_id(name)
                .ok_or_else(|| NetworkError::UnknownProtocol(name.to_string()))
        };

        let mut functions = vec![BTreeSet::new(); names.node_count()];
        for n in &doc.nodes {
            let id = node(&n.id)?;
            for f in &n.functions {
                let a = proto(&f.a)?;
                let carrier = |kind| match &f.b {
                    Some(b) => proto(b),
                    None => Err(NetworkError::MissingCarrier { node: n.id.clone(), kind }),
                };
                let function = match f.kind {
                    FunctionKind::Passive => {
                        if f.b.is_some() {
                            return Err(NetworkError::PassiveWithCarrier { node: n.id.clone() });
                        }
                        AdaptationFunction::Passive(a)
                    }
                    FunctionKind::Encap => {
                        AdaptationFunction::Encapsulation { from: a, to: carrier("encap")? }
                    }
                    FunctionKind::Decap => {
                        AdaptationFunction::Decapsulation { inner: a, outer: carrier("decap")? }
                    }
                };
                if !function.is_passive() && function.received() == function.sent() {
                    return Err(NetworkError::SelfAdaptation {
                        node: n.id.clone(),
                        protocol: f.a.clone(),
                    });
                }
                functions[id.index()].insert(function);
            }
        }

        let mut links = BTreeSet::new();
        for (from, to) in &doc.links {
            if !links.insert((node(from)?, node(to)?)) {
                return Err(NetworkError::DuplicateLink(from.clone(), to.clone()));
            }
        }
        let source = node(&doc.source)?;
        let destination = node(&doc.destination)?;
        if source == destination {
            return Err(NetworkError::SourceIsDestination(doc.source.clone()));
        }

        let mut successors = vec![Vec::new(); names.node_count()];
        for &(u, v) in &links {
            successors[u.index()].push(v);
        }
        let capabilities = functions.iter().map(Capabilities::from_functions).collect();
        Ok(Network { names, links, successors, functions, capabilities, source, destination })
    }

    pub fn to_document(&self) -> TopologyDoc {
        let p = |x| self.names.protocol(x).to_string();
        let nodes = self
            .names
            .nodes()
            .map(|u| NodeDoc {
                id: self.names.node(u).to_string(),
                functions: self.functions[u.index()]
                    .iter()
                    .map(|f| match *f {
                        AdaptationFunction::Encapsulation { from, to } => FunctionDoc {
                            kind: FunctionKind::Encap,
                            a: p(from),
                            b: Some(p(to)),
                        },
                        AdaptationFunction::Passive(x) => {
                            FunctionDoc { kind: FunctionKind::Passive, a: p(x), b: None }
                        }
                        AdaptationFunction::Decapsulation { inner, outer } => FunctionDoc {
                            kind: FunctionKind::Decap,
                            a: p(inner),
                            b: Some(p(outer)),
                        },
                    })
                    .collect(),
            })
            .collect();
        TopologyDoc {
            protocols: self.names.protocols().map(p).collect(),
            nodes,
            links: self
                .links
                .iter()
                .map(|&(u, v)| (self.names.node(u).to_string(), self.names.node(v).to_string()))
                .collect(),
            source: self.names.node(self.source).to_string(),
            destination: self.names.node(self.destination).to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("topology serializes")
    }

    pub fn names(&self) -> &Names {
        &self.names
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn destination(&self) -> NodeId {
        self.destination
    }

    pub fn node_count(&self) -> usize {
        self.names.node_count()
    }

    pub fn protocol_count(&self) -> usize {
        self.names.protocol_count()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        self.names.nodes()
    }

    pub fn protocols(&self) -> impl Iterator<Item = Protocol> {
        self.names.protocols()
    }

    pub fn links(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.links.iter().copied()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn has_link(&self, from: NodeId, to: NodeId) -> bool {
        self.links.contains(&(from, to))
    }

    /// Successors of `node`, in ascending id order.
    pub fn successors(&self, node: NodeId) -> &[NodeId] {
        &self.successors[node.index()]
    }

    /// The set P(U) of adaptation functions of `node`.
    pub fn functions(&self, node: NodeId) -> &BTreeSet<AdaptationFunction> {
        &self.functions[node.index()]
    }

    pub fn supports(&self, node: NodeId, function: &AdaptationFunction) -> bool {
        self.functions[node.index()].contains(function)
    }

    pub fn caps(&self, node: NodeId) -> &Capabilities {
        &self.capabilities[node.index()]
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.names.node_id(name)
    }

    pub fn protocol_by_name(&self, name: &str) -> Option<Protocol> {
        self.names.protocol_id(name)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown node {0:?}")]
pub struct UnknownNode(pub String);

/// In, Out and Pass of the node called `node`.
pub fn capabilities(net: &Network, node: &str) -> Result<Capabilities, UnknownNode> {
    net.node_by_name(node)
        .map(|id| net.caps(id).clone())
        .ok_or_else(|| UnknownNode(node.to_string()))
}

/// Graphviz rendering of the topology; functions are listed under each node.
pub fn network_to_dot(net: &Network) -> String {
    let names = net.names();
    let mut out = String::from("digraph network {\n  rankdir=LR;\n");
    for u in net.nodes() {
        let funcs: Vec<String> = net.functions(u).iter().map(|f| f.render(names)).collect();
        let shape = if u == net.source() || u == net.destination() { "doublecircle" } else { "circle" };
        out.push_str(&format!(
            "  \"{}\" [shape={}, xlabel=\"{}\"];\n",
            dot_escape(names.node(u)),
            shape,
            dot_escape(&funcs.join(" "))
        ));
    }
    for (u, v) in net.links() {
        out.push_str(&format!(
            "  \"{}\" -> \"{}\";\n",
            dot_escape(names.node(u)),
            dot_escape(names.node(v))
        ));
    }
    out.push_str("}\n");
    out
}

pub fn network_to_text(net: &Network) -> String {
    let names = net.names();
    let mut out = String::new();
    let protocols: Vec<&str> = net.protocols().map(|p| names.protocol(p)).collect();
    out.push_str(&format!("protocols: {}\n", protocols.join(" ")));
    out.push_str(&format!("source: {}\n", names.node(net.source())));
    out.push_str(&format!("destination: {}\n", names.node(net.destination())));
    out.push_str("nodes:\n");
    for u in net.nodes() {
        let funcs: Vec<String> = net.functions(u).iter().map(|f| f.render(names)).collect();
        out.push_str(&format!("  {}: {}\n", names.node(u), funcs.join(" ")));
    }
    out.push_str("links:\n");
    for (u, v) in net.links() {
        out.push_str(&format!("  {} -> {}\n", names.node(u), names.node(v)));
    }
    out
}

pub(crate) fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Index lookups used by a few hot loops.
pub(crate) fn index_map<T: Copy + Eq + std::hash::Hash>(items: &[T]) -> HashMap<T, usize> {
    items.iter().enumerate().map(|(i, &t)| (t, i)).collect()
}
