//! Seeded random instances.
//!
//! Every node and every ordered node pair draws from its own stream, derived
//! from the seed and its indices. Growing `node_count` therefore keeps the
//! functions and links among the existing nodes unchanged.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::network::{FunctionDoc, Network, NodeDoc, TopologyDoc};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenSpec {
    pub node_count: usize,
    pub protocol_count: usize,
    pub edge_probability: f64,
    pub function_density: f64,
    pub seed: u64,
}

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("need at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("need at least 1 protocol")]
    NoProtocols,
    #[error("{name} must lie in [0, 1], got {value}")]
    OutOfRange { name: &'static str, value: f64 },
}

const NODE_TAG: u64 = 1;
const LINK_TAG: u64 = 2;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn stream(seed: u64, tag: u64, i: usize, j: usize) -> ChaCha8Rng {
    let mut h = splitmix(seed);
    for part in [tag, i as u64, j as u64] {
        h = splitmix(h ^ part);
    }
    ChaCha8Rng::seed_from_u64(h)
}

pub fn protocol_names(count: usize) -> Vec<String> {
    if count <= 26 {
        (0..count).map(|i| char::from(b'a' + i as u8).to_string()).collect()
    } else {
        let width = (count - 1).to_string().len();
        (0..count).map(|i| format!("p{i:0width$}")).collect()
    }
}

pub fn node_names(count: usize) -> Vec<String> {
    let width = count.saturating_sub(1).to_string().len();
    (0..count).map(|i| format!("n{i:0width$}")).collect()
}

impl GenSpec {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.node_count < 2 {
            return Err(GenError::TooFewNodes(self.node_count));
        }
        if self.protocol_count == 0 {
            return Err(GenError::NoProtocols);
        }
        for (name, value) in [("edge probability", self.edge_probability), ("function density", self.function_density)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(GenError::OutOfRange { name, value });
            }
        }
        Ok(())
    }

    /// The topology document. Node `n0` is the source and the last node the
    /// destination. Each node forwards each protocol passively with
    /// probability `max(0.5, density)` and holds each encapsulation and each
    /// decapsulation with probability `density`.
    pub fn document(&self) -> Result<TopologyDoc, GenError> {
        self.validate()?;
        let protocols = protocol_names(self.protocol_count);
        let nodes = node_names(self.node_count);
        let passive_p = self.function_density.max(0.5);

        let mut node_docs = Vec::with_capacity(nodes.len());
        for (i, id) in nodes.iter().enumerate() {
            let mut rng = stream(self.seed, NODE_TAG, i, 0);
            let mut functions = Vec::new();
            for a in &protocols {
                if rng.gen_bool(passive_p) {
                    functions.push(FunctionDoc::passive(a));
                }
            }
            for a in &protocols {
                for b in protocols.iter().filter(|b| *b != a) {
                    if rng.gen_bool(self.function_density) {
                        functions.push(FunctionDoc::encap(a, b));
                    }
                    if rng.gen_bool(self.function_density) {
                        functions.push(FunctionDoc::decap(a, b));
                    }
                }
            }
            node_docs.push(NodeDoc { id: id.clone(), functions });
        }

        let mut links = Vec::new();
        for i in 0..nodes.len() {
            for j in (0..nodes.len()).filter(|&j| j != i) {
                if stream(self.seed, LINK_TAG, i, j).gen_bool(self.edge_probability) {
                    links.push((nodes[i].clone(), nodes[j].clone()));
                }
            }
        }

        Ok(TopologyDoc {
            protocols,
            nodes: node_docs,
            links,
            source: nodes[0].clone(),
            destination: nodes[nodes.len() - 1].clone(),
        })
    }

    pub fn generate(&self) -> Result<Network, GenError> {
        let doc = self.document()?;
        Ok(Network::from_document(&doc).expect("generated topology is valid"))
    }
}
