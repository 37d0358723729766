//! Reference evaluator for sentence scoring, written against the tree as a
//! plain head array rather than the library's types. Values are computed
//! iteratively, deepest nodes first.

#![allow(dead_code)]

use emolex::deptree::{ParsedSentence, TokenNode};
use emolex::wordlex::{PolarityLexicon, PosClass, ShifterInventory};

fn intensify(strength: f64, v: f64) -> f64 {
    v * (1.0 + strength)
}

fn negate(v: f64, shift: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v - shift * v.signum()
    }
}

fn modify(m: f64, h: f64) -> f64 {
    if m * h >= 0.0 {
        m + h
    } else if m.abs() >= h.abs() {
        m
    } else {
        h.abs() * m.signum()
    }
}

pub const POLARITIES: [i32; 5] = [-5, -3, 0, 3, 5];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    Adj(i32),
    Noun(i32),
    Negator,
    Intensifier(f64),
}

/// Lemma and tag the library sees for a node kind.
pub fn surface(kind: Kind) -> (String, &'static str) {
    match kind {
        Kind::Adj(p) => (format!("adj{p}"), "JJ"),
        Kind::Noun(p) => (format!("noun{p}"), "NN"),
        Kind::Negator => ("not".to_string(), "RB"),
        Kind::Intensifier(0.25) => ("very".to_string(), "RB"),
        Kind::Intensifier(-0.3) => ("slightly".to_string(), "RB"),
        Kind::Intensifier(s) => panic!("no bundled intensifier with strength {s}"),
    }
}

/// Word lexicon with an entry for every polarity used by the enumeration.
pub fn oracle_lexicon() -> PolarityLexicon {
    let mut lex = PolarityLexicon::new("oracle");
    for p in POLARITIES {
        lex.insert(&format!("adj{p}"), PosClass::Adj, p as f64).unwrap();
        lex.insert(&format!("noun{p}"), PosClass::Noun, p as f64).unwrap();
    }
    lex
}

pub fn oracle_shifters() -> ShifterInventory {
    ShifterInventory::bundled()
}

pub fn build_sentence(heads: &[usize], kinds: &[Kind]) -> ParsedSentence {
    let tokens = heads
        .iter()
        .zip(kinds)
        .enumerate()
        .map(|(i, (&h, &k))| {
            let (lemma, tag) = surface(k);
            TokenNode::new(i + 1, &lemma, &lemma, tag, h, "dep")
        })
        .collect();
    ParsedSentence::new(None, tokens).expect("enumerated trees are valid")
}

/// Every head array over `n` nodes (1-based heads, 0 = root) forming a tree.
pub fn all_trees(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let total = (n + 1).pow(n as u32);
    for code in 0..total {
        let mut heads = Vec::with_capacity(n);
        let mut c = code;
        for _ in 0..n {
            heads.push(c % (n + 1));
            c /= n + 1;
        }
        if heads.iter().filter(|&&h| h == 0).count() != 1 {
            continue;
        }
        if heads.iter().enumerate().any(|(i, &h)| h == i + 1) {
            continue;
        }
        let acyclic = (1..=n).all(|start| {
            let mut v = start;
            for _ in 0..=n {
                if v == 0 {
                    return true;
                }
                v = heads[v - 1];
            }
            false
        });
        if acyclic {
            out.push(heads);
        }
    }
    out
}

fn depth_of(heads: &[usize], v: usize) -> usize {
    let mut d = 0;
    let mut x = v;
    while heads[x - 1] != 0 {
        x = heads[x - 1];
        d += 1;
    }
    d
}

fn dominates(heads: &[usize], ancestor: usize, v: usize) -> bool {
    let mut x = v;
    loop {
        if x == ancestor {
            return true;
        }
        if x == 0 {
            return false;
        }
        x = heads[x - 1];
    }
}

/// Reference score of a sentence without contrast connectors or punctuation.
pub fn reference_score(heads: &[usize], kinds: &[Kind], negation_shift: f64) -> f64 {
    let n = heads.len();
    let own = |v: usize| match kinds[v - 1] {
        Kind::Adj(p) | Kind::Noun(p) => p as f64,
        _ => 0.0,
    };
    let is_word = |v: usize| matches!(kinds[v - 1], Kind::Adj(_) | Kind::Noun(_));
    let modifies = |c: usize, h: usize| match kinds[c - 1] {
        Kind::Adj(_) => true,
        Kind::Noun(_) => matches!(kinds[h - 1], Kind::Noun(_)),
        _ => false,
    };

    // scope and anchor of each negator
    let mut negations_at = vec![0usize; n + 1];
    let mut scope_of = vec![vec![false; n + 1]; n + 1];
    for k in 1..=n {
        if kinds[k - 1] != Kind::Negator {
            continue;
        }
        let base = if heads[k - 1] == 0 { k } else { heads[k - 1] };
        let members: Vec<usize> = (k + 1..=n).filter(|&j| dominates(heads, base, j)).collect();
        if let Some(&anchor) = members.iter().min_by_key(|&&j| (depth_of(heads, j), j)) {
            negations_at[anchor] += 1;
            for &j in &members {
                scope_of[anchor][j] = true;
            }
        }
    }

    let mut order: Vec<usize> = (1..=n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(depth_of(heads, v)));
    let mut value = vec![0.0; n + 1];
    for v in order {
        let children: Vec<usize> = (1..=n).filter(|&c| heads[c - 1] == v).collect();
        let fold = |subset: &[usize]| {
            let mut acc = own(v);
            for &c in subset {
                if is_word(c) && modifies(c, v) {
                    acc = modify(value[c], acc);
                } else {
                    acc += value[c];
                }
            }
            for &c in subset {
                if let Kind::Intensifier(s) = kinds[c - 1] {
                    acc = intensify(s, acc);
                }
            }
            acc
        };
        value[v] = if negations_at[v] == 0 {
            fold(&children)
        } else {
            let inside: Vec<usize> = children.iter().copied().filter(|&c| scope_of[v][c]).collect();
            let mut acc = fold(&inside);
            for _ in 0..negations_at[v] {
                acc = negate(acc, negation_shift);
            }
            acc + children.iter().filter(|&&c| !scope_of[v][c]).map(|&c| value[c]).sum::<f64>()
        };
    }
    let root = heads.iter().position(|&h| h == 0).expect("one root") + 1;
    value[root]
}

/// Every assignment of word kinds and at most one shifter of `shifter` kind.
pub fn labelings(n: usize, shifter: Option<Kind>) -> Vec<Vec<Kind>> {
    let word_kinds: Vec<Kind> =
        POLARITIES.iter().flat_map(|&p| [Kind::Adj(p), Kind::Noun(p)]).collect();
    let mut out = Vec::new();
    let shifter_positions: Vec<Option<usize>> = match shifter {
        None => vec![None],
        Some(_) => (0..n).map(Some).collect(),
    };
    for pos in shifter_positions {
        let slots = n - usize::from(pos.is_some());
        let combos = word_kinds.len().pow(slots as u32);
        for code in 0..combos {
            let mut c = code;
            let mut kinds = Vec::with_capacity(n);
            for i in 0..n {
                if Some(i) == pos {
                    kinds.push(shifter.expect("shifter position implies kind"));
                } else {
                    kinds.push(word_kinds[c % word_kinds.len()]);
                    c /= word_kinds.len();
                }
            }
            out.push(kinds);
        }
    }
    out
}
