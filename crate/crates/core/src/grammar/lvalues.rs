use std::fmt;

use super::{Cfg, NtId, Production, Symbol};

/// A derivation length, with `u32::MAX` standing for "no terminal word".
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Length(u32);

impl Length {
    pub const INFINITE: Length = Length(u32::MAX);

    pub fn finite(n: u32) -> Length {
        assert!(n != u32::MAX, "length overflow");
        Length(n)
    }

    pub fn is_finite(self) -> bool {
        self.0 != u32::MAX
    }

    pub fn get(self) -> Option<u32> {
        self.is_finite().then_some(self.0)
    }

    pub fn saturating_add(self, other: Length) -> Length {
        if !self.is_finite() || !other.is_finite() {
            return Length::INFINITE;
        }
        Length(self.0.saturating_add(other.0))
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.get() {
            Some(n) => write!(f, "{n}"),
            None => f.write_str("\u{221e}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LValueMap {
    values: Vec<Length>,
    sweeps: usize,
}

impl LValueMap {
    pub fn get(&self, id: NtId) -> Length {
        self.values[id.index()]
    }

    pub fn values(&self) -> &[Length] {
        &self.values
    }

    /// Passes over the production list, counting the last one that changed
    /// nothing.
    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// Length contributed by a right-hand side under the current values.
    pub fn rhs_length(&self, p: &Production) -> Length {
        rhs_length(&self.values, p)
    }
}

fn rhs_length(values: &[Length], p: &Production) -> Length {
    p.rhs.iter().fold(Length(0), |acc, s| match s {
        Symbol::Terminal(_) => acc.saturating_add(Length(1)),
        Symbol::Nonterminal(n) => acc.saturating_add(values[n.index()]),
    })
}

/// Length of a shortest terminal word derivable from each nonterminal.
/// Values are updated in place during each pass and passes repeat until one
/// leaves every value unchanged.
pub fn l_values(cfg: &Cfg) -> LValueMap {
    let mut values = vec![Length::INFINITE; cfg.nonterminals().len()];
    let mut sweeps = 0;
    loop {
        sweeps += 1;
        let mut changed = false;
        for p in cfg.productions() {
            let len = rhs_length(&values, p);
            let slot = &mut values[p.lhs.index()];
            if len < *slot {
                *slot = len;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    LValueMap { values, sweeps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{pda_to_cfg, Nonterminal};
    use crate::network::{parse_network, Protocol};
    use crate::pda::{build_pda, transform_pda, InputSymbol, PdaState, StackSymbol};
    use crate::samples;

    #[test]
    fn saturating_arithmetic() {
        assert_eq!(Length(2).saturating_add(Length(3)), Length(5));
        assert_eq!(Length(2).saturating_add(Length::INFINITE), Length::INFINITE);
        assert_eq!(Length::INFINITE.to_string(), "\u{221e}");
        assert_eq!(Length(u32::MAX - 1).saturating_add(Length(7)), Length::INFINITE);
    }

    #[test]
    fn worked_example_values() {
        let net = parse_network(samples::EX1).unwrap();
        let tpda = transform_pda(&build_pda(&net));
        let cfg = pda_to_cfg(&tpda);
        let l = l_values(&cfg);
        assert_eq!(l.get(cfg.axiom()), Length(3));
        let a = net.protocol_by_name("a").unwrap();
        let v = net.node_by_name("V").unwrap();
        let d = net.node_by_name("D").unwrap();
        let b = net.protocol_by_name("b").unwrap();
        let vbad = Nonterminal::Triple(PdaState::NodeProto(v, b), StackSymbol::Proto(a), PdaState::NodeProto(d, a));
        assert_eq!(l.get(cfg.id_of(&vbad).unwrap()), Length(1));
        // plain grammar: the full trace
        let plain = pda_to_cfg(&build_pda(&net));
        assert_eq!(l_values(&plain).get(plain.axiom()), Length(4));
    }

    #[test]
    fn empty_language_is_infinite() {
        let names = parse_network(samples::EX0).unwrap().names().clone();
        let mut cfg = Cfg::new(names);
        let x = cfg.add_nonterminal(Nonterminal::Triple(PdaState::Start, StackSymbol::Bottom, PdaState::Final));
        let t = Symbol::Terminal(InputSymbol::plain(Protocol::from_index(0)));
        cfg.add_production(cfg.axiom(), &[Symbol::Nonterminal(x)]);
        cfg.add_production(x, &[t, Symbol::Nonterminal(x)]);
        let l = l_values(&cfg);
        assert_eq!(l.get(cfg.axiom()), Length::INFINITE);
        assert_eq!(l.sweeps(), 1);
    }
}
