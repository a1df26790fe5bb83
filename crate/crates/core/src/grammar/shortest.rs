use std::fmt;

use super::{Cfg, LValueMap, NtId, Symbol};
use crate::pda::InputSymbol;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub word: Vec<InputSymbol>,
    /// Indices into [`Cfg::productions`], in leftmost-derivation order.
    pub steps: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NoWord;

impl fmt::Display for NoWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("the grammar generates no word")
    }
}

impl std::error::Error for NoWord {}

/// Leftmost derivation of a shortest word. Each nonterminal is rewritten by
/// the first production, in insertion order, whose right-hand side attains
/// its l-value. A unit production that would close a cycle of unit
/// rewrites is passed over.
pub fn shortest_word(cfg: &Cfg, l: &LValueMap) -> Result<Derivation, NoWord> {
    if !l.get(cfg.axiom()).is_finite() {
        return Err(NoWord);
    }
    let n = cfg.nonterminals().len();
    let mut start = vec![0usize; n + 1];
    for p in cfg.productions() {
        start[p.lhs.index() + 1] += 1;
    }
    for i in 0..n {
        start[i + 1] += start[i];
    }
    let mut fill = start.clone();
    let mut by_lhs = vec![0usize; cfg.productions().len()];
    for (i, p) in cfg.productions().iter().enumerate() {
        by_lhs[fill[p.lhs.index()]] = i;
        fill[p.lhs.index()] += 1;
    }

    let mut word = Vec::new();
    let mut steps = Vec::new();
    // pending symbols, leftmost on top; the chain tracks unit rewrites since
    // the last terminal was emitted
    let mut pending = vec![Symbol::Nonterminal(cfg.axiom())];
    let mut unit_chain: Vec<NtId> = Vec::new();
    while let Some(sym) = pending.pop() {
        let x = match sym {
            Symbol::Terminal(t) => {
                word.push(t);
                unit_chain.clear();
                continue;
            }
            Symbol::Nonterminal(x) => x,
        };
        unit_chain.push(x);
        let target = l.get(x);
        let chosen = by_lhs[start[x.index()]..start[x.index() + 1]].iter().copied().find(|&i| {
            let p = &cfg.productions()[i];
            if l.rhs_length(p) != target {
                return false;
            }
            match p.rhs.as_slice() {
                [Symbol::Nonterminal(y)] => !unit_chain.contains(y),
                _ => true,
            }
        });
        let i = chosen.expect("finite l-value without an attaining production");
        steps.push(i);
        let p = &cfg.productions()[i];
        if !matches!(p.rhs.as_slice(), [Symbol::Nonterminal(_)]) {
            unit_chain.clear();
        }
        pending.extend(p.rhs.iter().rev().copied());
    }
    Ok(Derivation { word, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{l_values, pda_to_cfg};
    use crate::network::parse_network;
    use crate::pda::{build_pda, render_word, transform_pda};
    use crate::samples;

    #[test]
    fn worked_example_word() {
        let net = parse_network(samples::EX1).unwrap();
        let cfg = pda_to_cfg(&transform_pda(&build_pda(&net)));
        let l = l_values(&cfg);
        let d = shortest_word(&cfg, &l).unwrap();
        assert_eq!(render_word(net.names(), &d.word), "a b\u{0304}\u{2082} a");
        assert_eq!(d.steps.len(), 5);
    }

    #[test]
    fn no_word_when_destination_unreachable() {
        let mut doc = parse_network(samples::EX1).unwrap().to_document();
        doc.links.retain(|l| l.1 != "D");
        let net = crate::network::Network::from_document(&doc).unwrap();
        let cfg = pda_to_cfg(&build_pda(&net));
        let l = l_values(&cfg);
        assert_eq!(shortest_word(&cfg, &l), Err(NoWord));
    }
}
