//! Shortest feasible paths through networks whose nodes adapt protocols by
//! encapsulation, decapsulation or passive forwarding.
//!
//! A network is compiled into a push-down automaton, the automaton into a
//! context-free grammar, and a shortest word of that grammar is turned back
//! into a path.

pub mod gen;
pub mod grammar;
pub mod network;
pub mod oracle;
pub mod pathfinder;
pub mod pda;
pub mod trace;

/// Small topologies used by examples and tests.
pub mod samples {
    /// Two nodes joined by one link, both forwarding `a`.
    pub const EX0: &str = include_str!("../fixtures/ex0.json");
    /// Tunnel of `a` over `b` between `U` and `W`.
    pub const EX1: &str = include_str!("../fixtures/ex1.json");
    /// A tunnel whose only optimum crosses the link `X -> Y` twice.
    pub const LOOP: &str = include_str!("../fixtures/loop.json");
}
