//! Push-down automaton whose accepted words are the traces of feasible paths.
//!
//! A state `U_x` means "at node U, having received protocol x". The stack
//! holds encapsulated protocols, top last, over the bottom marker `Z₀`.

mod morphism;
mod transform;

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use crate::network::{dot_escape, AdaptationFunction, Names, Network, NodeId, Protocol};
use crate::trace::{split_symbol, LinkSymbol, SymbolError};

pub use morphism::{compress_g, expand_f};
pub use transform::{passive_distances, transform_pda, PassiveDistances};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PdaState {
    Start,
    NodeProto(NodeId, Protocol),
    Final,
}

impl PdaState {
    pub fn protocol(&self) -> Option<Protocol> {
        match *self {
            PdaState::NodeProto(_, p) => Some(p),
            _ => None,
        }
    }

    pub fn render(&self, names: &Names) -> String {
        match *self {
            PdaState::Start => "S_A".to_string(),
            PdaState::Final => "D_A".to_string(),
            PdaState::NodeProto(n, p) => format!("{}_{}", names.node(n), names.protocol(p)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StackSymbol {
    Bottom,
    Proto(Protocol),
}

impl StackSymbol {
    pub fn render(&self, names: &Names) -> String {
        match *self {
            StackSymbol::Bottom => "Z\u{2080}".to_string(),
            StackSymbol::Proto(p) => names.protocol(p).to_string(),
        }
    }
}

/// An input letter. `index` counts how many link symbols the letter stands
/// for; index 1 is the plain alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InputSymbol {
    pub protocol: Protocol,
    pub barred: bool,
    pub index: u32,
}

impl InputSymbol {
    pub fn plain(protocol: Protocol) -> Self {
        InputSymbol { protocol, barred: false, index: 1 }
    }

    pub fn barred(protocol: Protocol) -> Self {
        InputSymbol { protocol, barred: true, index: 1 }
    }

    pub fn with_index(self, index: u32) -> Self {
        InputSymbol { index, ..self }
    }

    pub fn link_symbol(&self) -> Option<LinkSymbol> {
        (self.index == 1).then_some(LinkSymbol { protocol: self.protocol, barred: self.barred })
    }

    pub fn render(&self, names: &Names) -> String {
        let mut s = names.protocol(self.protocol).to_string();
        if self.barred {
            s.push('\u{0304}');
        }
        if self.index != 1 {
            for d in self.index.to_string().chars() {
                s.push(char::from_u32(0x2080 + d.to_digit(10).unwrap()).unwrap());
            }
        }
        s
    }
}

impl From<LinkSymbol> for InputSymbol {
    fn from(s: LinkSymbol) -> Self {
        InputSymbol { protocol: s.protocol, barred: s.barred, index: 1 }
    }
}

pub fn parse_input_symbol(names: &Names, text: &str) -> Result<InputSymbol, SymbolError> {
    let (name, barred, index) = split_symbol(text)?;
    let protocol = names
        .protocol_id(name)
        .ok_or_else(|| SymbolError::UnknownProtocol(text.to_string()))?;
    Ok(InputSymbol { protocol, barred, index })
}

pub fn parse_word(names: &Names, text: &str) -> Result<Vec<InputSymbol>, SymbolError> {
    text.split_whitespace().map(|t| parse_input_symbol(names, t)).collect()
}

pub fn render_word(names: &Names, word: &[InputSymbol]) -> String {
    word.iter().map(|s| s.render(names)).collect::<Vec<_>>().join(" ")
}

/// What a transition does to the stack after popping its `pop` symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StackAction {
    /// Put the popped symbol back.
    Keep,
    /// Put the popped symbol back, then push the protocol on top of it.
    Push(Protocol),
    /// Leave the popped symbol off.
    Pop,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TransitionKind {
    Initial,
    Passive,
    Push,
    Pop,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PdaTransition {
    pub from: PdaState,
    /// `None` reads nothing (ε).
    pub input: Option<InputSymbol>,
    pub pop: StackSymbol,
    pub action: StackAction,
    pub to: PdaState,
}

impl PdaTransition {
    pub fn kind(&self) -> TransitionKind {
        match (self.input, self.action) {
            (None, _) => TransitionKind::Initial,
            (Some(_), StackAction::Keep) => TransitionKind::Passive,
            (Some(_), StackAction::Push(_)) => TransitionKind::Push,
            (Some(_), StackAction::Pop) => TransitionKind::Pop,
        }
    }

    /// The pushed sequence β, top first.
    pub fn pushed(&self) -> Vec<StackSymbol> {
        match self.action {
            StackAction::Keep => vec![self.pop],
            StackAction::Push(p) => vec![StackSymbol::Proto(p), self.pop],
            StackAction::Pop => Vec::new(),
        }
    }

    fn render_pushed(&self, names: &Names) -> String {
        let pushed = self.pushed();
        if pushed.is_empty() {
            "\u{2205}".to_string()
        } else {
            pushed.iter().map(|s| s.render(names)).collect()
        }
    }

    fn render_input(&self, names: &Names) -> String {
        self.input.map_or_else(|| "\u{03b5}".to_string(), |s| s.render(names))
    }

    /// `(from, input, pop, pushed, to)`.
    pub fn render(&self, names: &Names) -> String {
        format!(
            "({}, {}, {}, {}, {})",
            self.from.render(names),
            self.render_input(names),
            self.pop.render(names),
            self.render_pushed(names),
            self.to.render(names)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pda {
    names: Names,
    states: BTreeSet<PdaState>,
    input_alphabet: BTreeSet<InputSymbol>,
    stack_alphabet: BTreeSet<StackSymbol>,
    transitions: BTreeSet<PdaTransition>,
}

impl Pda {
    pub fn names(&self) -> &Names {
        &self.names
    }

    pub fn states(&self) -> &BTreeSet<PdaState> {
        &self.states
    }

    pub fn input_alphabet(&self) -> &BTreeSet<InputSymbol> {
        &self.input_alphabet
    }

    pub fn stack_alphabet(&self) -> &BTreeSet<StackSymbol> {
        &self.stack_alphabet
    }

    pub fn transitions(&self) -> &BTreeSet<PdaTransition> {
        &self.transitions
    }

    pub fn start(&self) -> PdaState {
        PdaState::Start
    }

    pub fn bottom(&self) -> StackSymbol {
        StackSymbol::Bottom
    }

    pub fn final_state(&self) -> PdaState {
        PdaState::Final
    }

    pub fn contains(&self, t: &PdaTransition) -> bool {
        self.transitions.contains(t)
    }

    /// Transitions grouped by source state, in set order.
    pub fn outgoing(&self) -> BTreeMap<PdaState, Vec<PdaTransition>> {
        let mut map: BTreeMap<PdaState, Vec<PdaTransition>> = BTreeMap::new();
        for t in &self.transitions {
            map.entry(t.from).or_default().push(*t);
        }
        map
    }

    pub fn to_text(&self) -> String {
        let names = &self.names;
        let join = |items: Vec<String>| items.join(" ");
        let mut out = String::new();
        out.push_str(&format!(
            "states: {}\n",
            join(self.states.iter().map(|s| s.render(names)).collect())
        ));
        out.push_str(&format!(
            "input: {}\n",
            join(self.input_alphabet.iter().map(|s| s.render(names)).collect())
        ));
        out.push_str(&format!(
            "stack: {}\n",
            join(self.stack_alphabet.iter().map(|s| s.render(names)).collect())
        ));
        out.push_str("start: S_A\nbottom: Z\u{2080}\nfinal: D_A\ntransitions:\n");
        for t in &self.transitions {
            out.push_str(&t.render(names));
            out.push('\n');
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let names = &self.names;
        let mut out = String::from("digraph pda {\n  rankdir=LR;\n");
        for s in &self.states {
            let shape = if *s == PdaState::Final { "doublecircle" } else { "circle" };
            out.push_str(&format!("  \"{}\" [shape={}];\n", dot_escape(&s.render(names)), shape));
        }
        for t in &self.transitions {
            let label = format!(
                "{}, {}/{}",
                t.render_input(names),
                t.pop.render(names),
                t.render_pushed(names)
            );
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
                dot_escape(&t.from.render(names)),
                dot_escape(&t.to.render(names)),
                dot_escape(&label)
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// Compiles a network into a push-down automaton accepting exactly the
/// traces of its feasible paths.
pub fn build_pda(net: &Network) -> Pda {
    let names = net.names().clone();
    let source = net.source();
    let destination = net.destination();

    let mut input_alphabet = BTreeSet::new();
    let mut stack_alphabet = BTreeSet::from([StackSymbol::Bottom]);
    for p in net.protocols() {
        input_alphabet.insert(InputSymbol::plain(p));
        input_alphabet.insert(InputSymbol::barred(p));
        stack_alphabet.insert(StackSymbol::Proto(p));
    }

    let mut states = BTreeSet::from([PdaState::Start, PdaState::Final]);
    for u in net.nodes().filter(|&u| u != source) {
        for &x in &net.caps(u).incoming {
            states.insert(PdaState::NodeProto(u, x));
        }
    }
    let has_state = |node: NodeId, p: Protocol| node != source && net.caps(node).incoming.contains(&p);

    let mut transitions = BTreeSet::new();
    for &v in net.successors(source) {
        for &x in &net.caps(source).outgoing {
            if has_state(v, x) {
                transitions.insert(PdaTransition {
                    from: PdaState::Start,
                    input: None,
                    pop: StackSymbol::Bottom,
                    action: StackAction::Keep,
                    to: PdaState::NodeProto(v, x),
                });
            }
        }
    }

    for (u, v) in net.links().filter(|&(u, _)| u != source) {
        let caps = net.caps(u);
        for f in net.functions(u) {
            match *f {
                AdaptationFunction::Passive(x) | AdaptationFunction::Encapsulation { from: x, .. } => {
                    for &alpha in stack_alphabet.iter().filter(|&&a| a != StackSymbol::Proto(x)) {
                        if caps.passive.contains(&x) && has_state(v, x) {
                            transitions.insert(PdaTransition {
                                from: PdaState::NodeProto(u, x),
                                input: Some(InputSymbol::plain(x)),
                                pop: alpha,
                                action: StackAction::Keep,
                                to: PdaState::NodeProto(v, x),
                            });
                        }
                        if let AdaptationFunction::Encapsulation { to: y, .. } = *f {
                            if has_state(v, y) {
                                transitions.insert(PdaTransition {
                                    from: PdaState::NodeProto(u, x),
                                    input: Some(InputSymbol::plain(x)),
                                    pop: alpha,
                                    action: StackAction::Push(x),
                                    to: PdaState::NodeProto(v, y),
                                });
                            }
                        }
                    }
                }
                AdaptationFunction::Decapsulation { inner: y, outer: x } => {
                    // The protocol sent on (U, V) is the inner one, so the
                    // target state V_y must exist.
                    if has_state(v, y) {
                        transitions.insert(PdaTransition {
                            from: PdaState::NodeProto(u, x),
                            input: Some(InputSymbol::barred(x)),
                            pop: StackSymbol::Proto(y),
                            action: StackAction::Pop,
                            to: PdaState::NodeProto(v, y),
                        });
                    }
                }
            }
        }
    }

    for &x in &net.caps(destination).incoming {
        transitions.insert(PdaTransition {
            from: PdaState::NodeProto(destination, x),
            input: Some(InputSymbol::plain(x)),
            pop: StackSymbol::Bottom,
            action: StackAction::Pop,
            to: PdaState::Final,
        });
    }

    Pda { names, states, input_alphabet, stack_alphabet, transitions }
}

fn apply(stack: &[StackSymbol], t: &PdaTransition) -> Option<Vec<StackSymbol>> {
    if stack.last() != Some(&t.pop) {
        return None;
    }
    let mut next = stack[..stack.len() - 1].to_vec();
    match t.action {
        StackAction::Keep => next.push(t.pop),
        StackAction::Push(p) => {
            next.push(t.pop);
            next.push(StackSymbol::Proto(p));
        }
        StackAction::Pop => {}
    }
    Some(next)
}

/// Whether some run reads `word` and ends in the final state with an empty
/// stack.
pub fn accepts(pda: &Pda, word: &[InputSymbol]) -> bool {
    let outgoing = pda.outgoing();
    let mut seen = HashSet::new();
    let mut todo = vec![(0usize, PdaState::Start, vec![StackSymbol::Bottom])];
    while let Some((pos, state, stack)) = todo.pop() {
        if state == PdaState::Final && pos == word.len() && stack.is_empty() {
            return true;
        }
        if !seen.insert((pos, state, stack.clone())) {
            continue;
        }
        for t in outgoing.get(&state).into_iter().flatten() {
            let next_pos = match t.input {
                None => pos,
                Some(s) if word.get(pos) == Some(&s) => pos + 1,
                Some(_) => continue,
            };
            if let Some(next) = apply(&stack, t) {
                todo.push((next_pos, t.to, next));
            }
        }
    }
    false
}

/// Every accepted word whose total weight is at most `budget`. Each letter
/// must weigh at least 1; with `|_| 1` this is the language up to a length.
pub fn enumerate_accepted(
    pda: &Pda,
    budget: usize,
    weight: impl Fn(&InputSymbol) -> usize,
) -> BTreeSet<Vec<InputSymbol>> {
    let outgoing = pda.outgoing();
    let mut words = BTreeSet::new();
    let mut seen = HashSet::new();
    let start = (PdaState::Start, vec![StackSymbol::Bottom], Vec::new(), 0usize);
    let mut queue = VecDeque::from([start]);
    while let Some((state, stack, word, spent)) = queue.pop_front() {
        if state == PdaState::Final && stack.is_empty() {
            words.insert(word.clone());
        }
        if !seen.insert((state, stack.clone(), word.clone())) {
            continue;
        }
        for t in outgoing.get(&state).into_iter().flatten() {
            let cost = t.input.as_ref().map_or(0, &weight);
            if spent + cost > budget {
                continue;
            }
            if let Some(next) = apply(&stack, t) {
                let mut w = word.clone();
                w.extend(t.input);
                queue.push_back((t.to, next, w, spent + cost));
            }
        }
    }
    words
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::parse_network;
    use crate::samples;

    fn ex1() -> (Network, Pda) {
        let net = parse_network(samples::EX1).unwrap();
        let pda = build_pda(&net);
        (net, pda)
    }

    fn listing(pda: &Pda) -> Vec<String> {
        pda.transitions().iter().map(|t| t.render(pda.names())).collect()
    }

    #[test]
    fn encapsulating_link_yields_pushes() {
        let (_, pda) = ex1();
        let l = listing(&pda);
        assert!(l.contains(&"(U_a, a, Z\u{2080}, aZ\u{2080}, V_b)".to_string()));
        assert!(l.contains(&"(U_a, a, b, ab, V_b)".to_string()));
    }

    #[test]
    fn passive_and_pop_transitions() {
        let (_, pda) = ex1();
        let l = listing(&pda);
        assert!(l.contains(&"(V_b, b, Z\u{2080}, Z\u{2080}, W_b)".to_string()));
        assert!(l.contains(&"(V_b, b, a, a, W_b)".to_string()));
        assert!(l.contains(&"(W_b, b\u{0304}, a, \u{2205}, D_a)".to_string()));
    }

    #[test]
    fn worked_example_full_listing() {
        let (_, pda) = ex1();
        let expected = [
            "(S_A, \u{03b5}, Z\u{2080}, Z\u{2080}, U_a)",
            "(U_a, a, Z\u{2080}, aZ\u{2080}, V_b)",
            "(U_a, a, b, ab, V_b)",
            "(V_b, b, Z\u{2080}, Z\u{2080}, W_b)",
            "(V_b, b, a, a, W_b)",
            "(W_b, b\u{0304}, a, \u{2205}, D_a)",
            "(D_a, a, Z\u{2080}, \u{2205}, D_A)",
        ];
        let mut got = listing(&pda);
        let mut want: Vec<String> = expected.iter().map(|s| s.to_string()).collect();
        got.sort();
        want.sort();
        assert_eq!(got, want);
        // S_A, U_a, V_b, W_a, W_b, D_a, D_A
        assert_eq!(pda.states().len(), 7);
    }

    #[test]
    fn minimal_instance() {
        let net = parse_network(samples::EX0).unwrap();
        let pda = build_pda(&net);
        let states: Vec<String> = pda.states().iter().map(|s| s.render(pda.names())).collect();
        assert_eq!(states, ["S_A", "D_a", "D_A"]);
        assert_eq!(
            listing(&pda),
            ["(S_A, \u{03b5}, Z\u{2080}, Z\u{2080}, D_a)", "(D_a, a, Z\u{2080}, \u{2205}, D_A)"]
        );
        let a = InputSymbol::plain(net.protocol_by_name("a").unwrap());
        assert!(accepts(&pda, &[a]));
        assert!(!accepts(&pda, &[]));
        assert!(!accepts(&pda, &[a, a]));
        let lang = enumerate_accepted(&pda, 4, |_| 1);
        assert_eq!(lang, BTreeSet::from([vec![a]]));
    }

    #[test]
    fn acceptance_on_worked_example() {
        let (net, pda) = ex1();
        let names = net.names();
        assert!(accepts(&pda, &parse_word(names, "a b b\u{0304} a").unwrap()));
        assert!(!accepts(&pda, &parse_word(names, "a a").unwrap()));
        assert!(!accepts(&pda, &parse_word(names, "a b b a").unwrap()));
        let lang = enumerate_accepted(&pda, 8, |_| 1);
        assert_eq!(lang.len(), 1);
    }

    #[test]
    fn state_bound() {
        let (net, pda) = ex1();
        assert!(pda.states().len() <= 2 + (net.node_count() - 1) * net.protocol_count());
    }

    #[test]
    fn dot_output_is_stable() {
        let (_, pda) = ex1();
        let dot = pda.to_dot();
        assert_eq!(dot, build_pda(&parse_network(samples::EX1).unwrap()).to_dot());
        assert!(dot.contains("\"U_a\" -> \"V_b\" [label=\"a, Z\u{2080}/aZ\u{2080}\"];"));
        assert!(dot.starts_with("digraph pda {"));
    }

    #[test]
    fn input_symbol_notation() {
        let (net, _) = ex1();
        let names = net.names();
        let b = names.protocol_id("b").unwrap();
        let s = InputSymbol::barred(b).with_index(12);
        assert_eq!(s.render(names), "b\u{0304}\u{2081}\u{2082}");
        assert_eq!(parse_input_symbol(names, &s.render(names)), Ok(s));
        assert_eq!(s.link_symbol(), None);
    }
}
