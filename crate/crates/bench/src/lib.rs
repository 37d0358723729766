//! Synthetic inputs shared by the benchmarks.

use emolex::deptree::{ParsedSentence, TokenNode};
use emolex::emoji::EmojiKey;
use emolex::label::SentimentLabel;

const WORDS: &[(&str, &str)] = &[
    ("very", "RB"),
    ("happy", "JJ"),
    ("not", "RB"),
    ("sad", "JJ"),
    ("face", "NN"),
    ("but", "CC"),
    ("love", "VB"),
    ("dark", "JJ"),
    ("humor", "NN"),
    ("table", "NN"),
];

/// A right-branching sentence of `n` tokens cycling through a small vocabulary.
pub fn chain_sentence(n: usize) -> ParsedSentence {
    let tokens = (1..=n)
        .map(|i| {
            let (w, pos) = WORDS[i % WORDS.len()];
            let head = if i == 1 { 0 } else { i - 1 };
            TokenNode::new(i, w, w, pos, head, "dep")
        })
        .collect();
    ParsedSentence::new(None, tokens).expect("chain is a tree")
}

/// A flat sentence of `n` tokens, all attached to token 1.
pub fn flat_sentence(n: usize) -> ParsedSentence {
    let tokens = (1..=n)
        .map(|i| {
            let (w, pos) = WORDS[i % WORDS.len()];
            TokenNode::new(i, w, w, pos, if i == 1 { 0 } else { 1 }, "dep")
        })
        .collect();
    ParsedSentence::new(None, tokens).expect("flat is a tree")
}

/// `docs` labeled documents, each with a few emojis from a pool of 50.
pub fn labeled_corpus(docs: usize) -> Vec<(SentimentLabel, Vec<EmojiKey>)> {
    (0..docs)
        .map(|d| {
            let label = SentimentLabel::ALL[d % 3];
            let emojis = (0..3)
                .map(|k| {
                    let cp = 0x1F600 + ((d * 7 + k * 13) % 50) as u32;
                    EmojiKey::new(vec![char::from_u32(cp).expect("emoticon block")]).expect("nonempty")
                })
                .collect();
            (label, emojis)
        })
        .collect()
}
