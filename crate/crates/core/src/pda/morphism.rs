//! Expansion of indexed letters into plain runs, and its shortest inverse.

use super::InputSymbol;

/// `a_i` becomes `i` copies of `a`; barred `a_i` becomes `i - 1` copies of
/// `a` followed by one barred `a`.
pub fn expand_f(word: &[InputSymbol]) -> Vec<InputSymbol> {
    let mut out = Vec::with_capacity(word.len());
    for s in word {
        let plain = InputSymbol::plain(s.protocol);
        if s.barred {
            out.extend(std::iter::repeat_n(plain, s.index as usize - 1));
            out.push(InputSymbol::barred(s.protocol));
        } else {
            out.extend(std::iter::repeat_n(plain, s.index as usize));
        }
    }
    out
}

/// The shortest indexed word that expands to `word`: every maximal run of a
/// plain letter collapses into one letter, absorbing a directly following
/// barred copy of the same protocol.
pub fn compress_g(word: &[InputSymbol]) -> Vec<InputSymbol> {
    let word = if word.iter().all(|s| s.index == 1) { word.to_vec() } else { expand_f(word) };
    let mut out = Vec::new();
    let mut i = 0;
    while i < word.len() {
        let s = word[i];
        if s.barred {
            out.push(s);
            i += 1;
            continue;
        }
        let run = word[i..].iter().take_while(|&&t| t == s).count();
        match word.get(i + run) {
            Some(next) if next.barred && next.protocol == s.protocol => {
                out.push(InputSymbol::barred(s.protocol).with_index(run as u32 + 1));
                i += run + 1;
            }
            _ => {
                out.push(s.with_index(run as u32));
                i += run;
            }
        }
    }
    out
}
