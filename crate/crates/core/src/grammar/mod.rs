//! Context-free grammar generating the language of a push-down automaton,
//! plus shortest-derivation lengths and shortest-word extraction.

mod lvalues;
mod shortest;

use std::collections::{BTreeSet, HashMap};

use arrayvec::ArrayVec;

use crate::network::{index_map, Names};
use crate::pda::{InputSymbol, Pda, PdaState, StackAction, StackSymbol};

pub use lvalues::{l_values, LValueMap, Length};
pub use shortest::{shortest_word, Derivation, NoWord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Nonterminal {
    Axiom,
    /// `[U α V]`: runs from `U` to `V` that consume `α` off the stack.
    Triple(PdaState, StackSymbol, PdaState),
}

impl Nonterminal {
    pub fn render(&self, names: &Names) -> String {
        match self {
            Nonterminal::Axiom => "[S_G]".to_string(),
            Nonterminal::Triple(u, a, v) => {
                format!("[{} {} {}]", u.render(names), a.render(names), v.render(names))
            }
        }
    }
}

/// Dense nonterminal handle inside one [`Cfg`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NtId(u32);

impl NtId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    Terminal(InputSymbol),
    Nonterminal(NtId),
}

pub type Rhs = ArrayVec<Symbol, 3>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Production {
    pub lhs: NtId,
    pub rhs: Rhs,
}

/// A grammar whose productions keep insertion order; that order breaks ties
/// wherever a shortest choice is ambiguous.
#[derive(Clone, Debug)]
pub struct Cfg {
    names: Names,
    nonterminals: Vec<Nonterminal>,
    ids: HashMap<Nonterminal, NtId>,
    terminals: BTreeSet<InputSymbol>,
    productions: Vec<Production>,
}

impl Cfg {
    /// An empty grammar holding only the axiom.
    pub fn new(names: Names) -> Cfg {
        let mut cfg = Cfg {
            names,
            nonterminals: Vec::new(),
            ids: HashMap::new(),
            terminals: BTreeSet::new(),
            productions: Vec::new(),
        };
        cfg.add_nonterminal(Nonterminal::Axiom);
        cfg
    }

    pub fn add_nonterminal(&mut self, nt: Nonterminal) -> NtId {
        if let Some(&id) = self.ids.get(&nt) {
            return id;
        }
        let id = NtId(self.nonterminals.len() as u32);
        self.nonterminals.push(nt);
        self.ids.insert(nt, id);
        id
    }

    /// Appends a production. Panics on an empty or over-long right-hand side
    /// or an undeclared nonterminal.
    pub fn add_production(&mut self, lhs: NtId, rhs: &[Symbol]) {
        assert!(!rhs.is_empty(), "epsilon productions are not supported");
        for s in rhs {
            match *s {
                Symbol::Terminal(t) => {
                    self.terminals.insert(t);
                }
                Symbol::Nonterminal(n) => assert!(n.index() < self.nonterminals.len()),
            }
        }
        let rhs = Rhs::try_from(rhs).expect("right-hand side longer than three symbols");
        self.productions.push(Production { lhs, rhs });
    }

    pub fn names(&self) -> &Names {
        &self.names
    }

    pub fn axiom(&self) -> NtId {
        NtId(0)
    }

    pub fn nonterminals(&self) -> &[Nonterminal] {
        &self.nonterminals
    }

    pub fn nonterminal(&self, id: NtId) -> Nonterminal {
        self.nonterminals[id.index()]
    }

    pub fn id_of(&self, nt: &Nonterminal) -> Option<NtId> {
        self.ids.get(nt).copied()
    }

    pub fn terminals(&self) -> &BTreeSet<InputSymbol> {
        &self.terminals
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn render_production(&self, p: &Production) -> String {
        let rhs: Vec<String> = p
            .rhs
            .iter()
            .map(|s| match s {
                Symbol::Terminal(t) => t.render(&self.names),
                Symbol::Nonterminal(n) => self.nonterminal(*n).render(&self.names),
            })
            .collect();
        format!("{} -> {}", self.nonterminal(p.lhs).render(&self.names), rhs.join(" "))
    }

    /// One production per line, in insertion order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.productions {
            out.push_str(&self.render_production(p));
            out.push('\n');
        }
        out
    }
}

/// Triple-construction from an automaton accepting by empty stack.
///
/// The single ε-transition leaving `S_A` keeps the stack like a passive
/// transition and reads nothing, so it yields unit productions
/// `[S_A Z₀ W] -> [U_x Z₀ W]`.
pub fn pda_to_cfg(pda: &Pda) -> Cfg {
    let states: Vec<PdaState> = pda.states().iter().copied().collect();
    let stack: Vec<StackSymbol> = pda.stack_alphabet().iter().copied().collect();
    let q = states.len();
    let g = stack.len();
    let state_idx = index_map(&states);
    let stack_idx = index_map(&stack);

    let mut cfg = Cfg::new(pda.names().clone());
    let mut dense = vec![u32::MAX; q * g * q];
    let mut nt = |cfg: &mut Cfg, u: usize, a: usize, v: usize| -> Symbol {
        let slot = &mut dense[(u * g + a) * q + v];
        if *slot == u32::MAX {
            *slot = cfg.add_nonterminal(Nonterminal::Triple(states[u], stack[a], states[v])).0;
        }
        Symbol::Nonterminal(NtId(*slot))
    };

    let start = state_idx[&PdaState::Start];
    let bottom = stack_idx[&StackSymbol::Bottom];
    let axiom = cfg.axiom();
    for v in 0..q {
        let rhs = nt(&mut cfg, start, bottom, v);
        cfg.add_production(axiom, &[rhs]);
    }

    for t in pda.transitions() {
        let u = state_idx[&t.from];
        let v = state_idx[&t.to];
        let a = stack_idx[&t.pop];
        match (t.input, t.action) {
            (Some(x), StackAction::Pop) => {
                let Symbol::Nonterminal(lhs) = nt(&mut cfg, u, a, v) else { unreachable!() };
                cfg.add_production(lhs, &[Symbol::Terminal(x)]);
            }
            (input, StackAction::Keep) => {
                for w in 0..q {
                    let Symbol::Nonterminal(lhs) = nt(&mut cfg, u, a, w) else { unreachable!() };
                    let next = nt(&mut cfg, v, a, w);
                    match input {
                        Some(x) => cfg.add_production(lhs, &[Symbol::Terminal(x), next]),
                        None => cfg.add_production(lhs, &[next]),
                    }
                }
            }
            (Some(x), StackAction::Push(p)) => {
                let pushed = stack_idx[&StackSymbol::Proto(p)];
                for w in 0..q {
                    for w2 in 0..q {
                        let Symbol::Nonterminal(lhs) = nt(&mut cfg, u, a, w2) else { unreachable!() };
                        let inner = nt(&mut cfg, v, pushed, w);
                        let rest = nt(&mut cfg, w, a, w2);
                        cfg.add_production(lhs, &[Symbol::Terminal(x), inner, rest]);
                    }
                }
            }
            (None, action) => unreachable!("ε-transition with {action:?}"),
        }
    }
    // input letters never used by a transition are still part of the alphabet
    cfg.terminals.extend(pda.input_alphabet().iter().copied());
    cfg
}
