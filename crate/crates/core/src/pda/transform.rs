use std::collections::BTreeSet;

use super::{InputSymbol, Pda, PdaState, PdaTransition, TransitionKind};
use crate::network::Protocol;

/// All-pairs passive distances inside the sub-automaton of one protocol.
#[derive(Clone, Debug)]
pub struct PassiveDistances {
    protocol: Protocol,
    states: Vec<PdaState>,
    dist: Vec<Option<u32>>,
}

impl PassiveDistances {
    pub fn protocol(&self) -> Protocol {
        self.protocol
    }

    /// States `U_x` of the sub-automaton, in ascending order.
    pub fn states(&self) -> &[PdaState] {
        &self.states
    }

    /// Number of passive transitions on a shortest run from `from` to `to`;
    /// `None` when unreachable or when either state is outside the
    /// sub-automaton.
    pub fn get(&self, from: PdaState, to: PdaState) -> Option<u32> {
        let i = self.states.binary_search(&from).ok()?;
        let j = self.states.binary_search(&to).ok()?;
        self.dist[i * self.states.len() + j]
    }
}

/// Floyd-Warshall over the transitions between states indexed by `x`.
pub fn passive_distances(pda: &Pda, x: Protocol) -> PassiveDistances {
    let states: Vec<PdaState> =
        pda.states().iter().copied().filter(|s| s.protocol() == Some(x)).collect();
    let n = states.len();
    let mut dist = vec![None; n * n];
    for i in 0..n {
        dist[i * n + i] = Some(0);
    }
    for t in pda.transitions() {
        // only passive transitions connect two states of the same protocol
        if let (Ok(i), Ok(j)) = (states.binary_search(&t.from), states.binary_search(&t.to)) {
            debug_assert_eq!(t.kind(), TransitionKind::Passive);
            if i != j {
                dist[i * n + j] = Some(1);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            let Some(ik) = dist[i * n + k] else { continue };
            for j in 0..n {
                if let Some(kj) = dist[k * n + j] {
                    let through = ik + kj;
                    if dist[i * n + j].is_none_or(|d| through < d) {
                        dist[i * n + j] = Some(through);
                    }
                }
            }
        }
    }
    PassiveDistances { protocol: x, states, dist }
}

/// Adds bypass transitions so that a run of passive transitions followed by
/// one more transition can be read as a single indexed letter.
///
/// For every pair `U_x, V_x` at finite passive distance `d`, each transition
/// leaving `V_x` towards a state other than `U_x` is copied onto `U_x` with
/// its letter indexed by `d + 1`. Nothing is removed.
pub fn transform_pda(pda: &Pda) -> Pda {
    let mut out = pda.clone();
    let outgoing = pda.outgoing();
    let protocols: BTreeSet<Protocol> = pda.states().iter().filter_map(|s| s.protocol()).collect();
    for x in protocols {
        let distances = passive_distances(pda, x);
        for &u in distances.states() {
            for &v in distances.states() {
                let Some(d) = distances.get(u, v) else { continue };
                let index = d + 1;
                out.input_alphabet.insert(InputSymbol::plain(x).with_index(index));
                out.input_alphabet.insert(InputSymbol::barred(x).with_index(index));
                for t in outgoing.get(&v).into_iter().flatten() {
                    let Some(letter) = t.input else { continue };
                    if t.to == u {
                        continue;
                    }
                    out.transitions.insert(PdaTransition {
                        from: u,
                        input: Some(letter.with_index(index)),
                        ..*t
                    });
                }
            }
        }
    }
    out
}
