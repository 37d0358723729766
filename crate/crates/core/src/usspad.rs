//! Unsupervised sentiment propagation across dependency trees.
//!
//! Word polarities from a [`PolarityLexicon`] are combined bottom-up over a
//! [`ParsedSentence`]. Each node starts from its own polarity and folds in its
//! dependents in surface order:
//!
//! * adjective/adverb dependents, and nouns modifying nouns, go through
//!   [`compose_modifier`]; every other dependent is summed,
//! * intensifier dependents then rescale the accumulated value
//!   ([`apply_intensification`]),
//! * at the anchor of a negation scope (the shallowest token of the scope),
//!   the in-scope part of the value is shifted by [`apply_negation`] before
//!   out-of-scope dependents are added,
//! * adversative/concessive connectors split the sentence into clauses whose
//!   values are combined with [`apply_adversative`] / [`apply_concessive`].

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::deptree::{self, ParsedDocument, ParsedSentence, TokenNode};
use crate::emoji::EmojiKey;
use crate::label::SentimentLabel;
use crate::textnorm::PlaceholderKind;
use crate::wordlex::{PolarityLexicon, PosClass, ShifterInventory, ShifterRole};

/// How sentence scores are aggregated into a document score.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregation {
    Mean,
    Sum,
}

impl FromStr for Aggregation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "mean" => Ok(Aggregation::Mean),
            "sum" => Ok(Aggregation::Sum),
            other => Err(format!("unknown aggregation `{other}` (expected mean or sum)")),
        }
    }
}

impl fmt::Display for Aggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Aggregation::Mean => "mean",
            Aggregation::Sum => "sum",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationConfig {
    /// Polarity shift applied by a negation scope, on the word scale.
    pub negation_shift: f64,
    /// Weight of the dominant clause in contrast constructions (> 1).
    pub adversative_amplify: f64,
    /// Scores within `[-neutral_band, neutral_band]` classify as neutral.
    pub neutral_band: f64,
    /// Maps an emoji score in (-1, 1) onto the word scale.
    pub emoji_scale: f64,
    pub doc_aggregation: Aggregation,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        PropagationConfig {
            negation_shift: 4.0,
            adversative_amplify: 1.5,
            neutral_band: 0.0,
            emoji_scale: 5.0,
            doc_aggregation: Aggregation::Mean,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Malformed { line: usize },
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`")]
    BadValue { key: String, value: String },
    #[error("{0}")]
    Invalid(&'static str),
}

impl PropagationConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.negation_shift > 0.0 && self.negation_shift.is_finite()) {
            return Err(ConfigError::Invalid("negation_shift must be > 0"));
        }
        if !(self.adversative_amplify > 1.0 && self.adversative_amplify.is_finite()) {
            return Err(ConfigError::Invalid("adversative_amplify must be > 1"));
        }
        if !(self.neutral_band >= 0.0 && self.neutral_band.is_finite()) {
            return Err(ConfigError::Invalid("neutral_band must be >= 0"));
        }
        if !(self.emoji_scale > 0.0 && self.emoji_scale.is_finite()) {
            return Err(ConfigError::Invalid("emoji_scale must be > 0"));
        }
        Ok(())
    }

    /// Sets one field by name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = || ConfigError::BadValue { key: key.to_string(), value: value.to_string() };
        let num = || value.trim().parse::<f64>().map_err(|_| bad());
        match key.trim() {
            "negation_shift" => self.negation_shift = num()?,
            "adversative_amplify" => self.adversative_amplify = num()?,
            "neutral_band" => self.neutral_band = num()?,
            "emoji_scale" => self.emoji_scale = num()?,
            "doc_aggregation" => self.doc_aggregation = value.parse().map_err(|_| bad())?,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Parses a flat `key = value` file on top of the defaults.
    pub fn from_kv_str(text: &str) -> Result<Self, ConfigError> {
        let mut config = PropagationConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Malformed { line: i + 1 })?;
            config.set(k.trim(), v.trim())?;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn to_kv_string(&self) -> String {
        format!(
            "negation_shift = {}\nadversative_amplify = {}\nneutral_band = {}\nemoji_scale = {}\ndoc_aggregation = {}\n",
            self.negation_shift, self.adversative_amplify, self.neutral_band, self.emoji_scale, self.doc_aggregation
        )
    }
}

/// Real-valued sentiment of a sentence or document.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SentimentScore(pub f64);

impl SentimentScore {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Source of emoji scores in (-1, 1), keyed by modifier-stripped codepoints.
pub trait EmojiScores: Sync {
    fn emoji_score(&self, key: &EmojiKey) -> Option<f64>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegationScope {
    /// Index of the negator token.
    pub negator: usize,
    /// Indices of the negated tokens, ascending.
    pub scope: BTreeSet<usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScoreError {
    #[error("document `{0}` has no sentences")]
    EmptyDocument(String),
}

// ---------------------------------------------------------------------------
// Elementary treatments

/// Rescales `head_value` by `1 + strength`.
pub fn apply_intensification(child_strength: f64, head_value: f64) -> f64 {
    head_value * (1.0 + child_strength)
}

/// Moves a nonzero value `shift` units toward (and past) zero.
pub fn apply_negation(value: f64, shift: f64) -> f64 {
    if value > 0.0 {
        value - shift
    } else if value < 0.0 {
        value + shift
    } else {
        0.0
    }
}

/// Combines a modifier with its head. Agreeing signs add up; on a conflict
/// the modifier's sign wins with the larger of the two magnitudes.
pub fn compose_modifier(modifier_value: f64, head_value: f64) -> f64 {
    if modifier_value == 0.0 || head_value == 0.0 || modifier_value.signum() == head_value.signum() {
        modifier_value + head_value
    } else {
        modifier_value.signum() * modifier_value.abs().max(head_value.abs())
    }
}

/// The clause carrying an adversative connector dominates.
pub fn apply_adversative(clause_with_connector: f64, other_clause: f64, amplify: f64) -> f64 {
    amplify * clause_with_connector + other_clause / amplify
}

/// The clause carrying a concessive connector is the weaker one.
pub fn apply_concessive(clause_with_connector: f64, other_clause: f64, amplify: f64) -> f64 {
    clause_with_connector / amplify + amplify * other_clause
}

/// `+1` above `band`, `-1` below `-band`, neutral otherwise (ties included).
pub fn classify(score: f64, band: f64) -> SentimentLabel {
    if score > band {
        SentimentLabel::Positive
    } else if score < -band {
        SentimentLabel::Negative
    } else {
        SentimentLabel::Neutral
    }
}

fn is_terminal_punct(token: &TokenNode) -> bool {
    !token.form.is_empty() && token.form.chars().all(|c| matches!(c, '.' | '!' | '?' | '…'))
}

fn is_clause_comma(token: &TokenNode) -> bool {
    matches!(token.form.as_str(), "," | ";")
}

fn is_punct(token: &TokenNode) -> bool {
    !token.form.is_empty() && token.form.chars().all(|c| c.is_ascii_punctuation() || c == '…')
}

fn role_of(token: &TokenNode, shifters: &ShifterInventory) -> Option<ShifterRole> {
    if token.is_emoji() {
        return None;
    }
    shifters.role(&token.lookup_lemma())
}

/// Negation scopes of a sentence, one per negator token in surface order.
///
/// The scope of a negator covers the tokens of its head's subtree that
/// follow it, up to the first contrast connector or sentence-final
/// punctuation after it. A negator attached to the root scopes over its own
/// subtree.
pub fn detect_negation_scopes(sentence: &ParsedSentence, shifters: &ShifterInventory) -> Vec<NegationScope> {
    let tokens = sentence.tokens();
    let mut scopes = Vec::new();
    for tok in tokens {
        if role_of(tok, shifters) != Some(ShifterRole::Negator) {
            continue;
        }
        let boundary = tokens[tok.index..]
            .iter()
            .find(|t| {
                is_terminal_punct(t)
                    || matches!(role_of(t, shifters), Some(ShifterRole::Adversative | ShifterRole::Concessive))
            })
            .map_or(usize::MAX, |t| t.index);
        let base = if tok.head == 0 { tok.index } else { tok.head };
        let scope: BTreeSet<usize> =
            sentence.subtree(base).into_iter().filter(|&j| j > tok.index && j < boundary).collect();
        scopes.push(NegationScope { negator: tok.index, scope });
    }
    scopes
}

/// Polarity a token contributes by itself.
pub fn node_polarity(
    token: &TokenNode,
    words: &PolarityLexicon,
    shifters: &ShifterInventory,
    emojis: Option<&dyn EmojiScores>,
    config: &PropagationConfig,
) -> f64 {
    if token.is_emoji() {
        let Some(lex) = emojis else { return 0.0 };
        return deptree::emoji_keys_of_form(&token.form, &token.lemma)
            .iter()
            .map(|k| config.emoji_scale * lex.emoji_score(&k.base()).unwrap_or(0.0))
            .sum();
    }
    if role_of(token, shifters).is_some() || PlaceholderKind::is_placeholder(&token.form) {
        return 0.0;
    }
    words.lookup(&token.lookup_lemma(), PosClass::from_tag(&token.pos)).unwrap_or(0.0)
}

// ---------------------------------------------------------------------------
// Propagation

/// Scores sentences and documents with fixed lexica and configuration.
#[derive(Clone, Copy)]
pub struct Scorer<'a> {
    pub words: &'a PolarityLexicon,
    pub shifters: &'a ShifterInventory,
    pub emojis: Option<&'a dyn EmojiScores>,
    pub config: &'a PropagationConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ClauseKind {
    Main,
    Adversative,
    Concessive,
}

struct Clause {
    kind: ClauseKind,
    /// `member[i]` for 1-based token index `i`.
    member: Vec<bool>,
    has_content: bool,
}

struct SentenceState<'s> {
    sentence: &'s ParsedSentence,
    own: Vec<f64>,
    roles: Vec<Option<ShifterRole>>,
    classes: Vec<Option<PosClass>>,
    /// Scopes anchored at each token (1-based).
    anchored: Vec<Vec<usize>>,
    scopes: Vec<NegationScope>,
}

impl<'a> Scorer<'a> {
    pub fn new(
        words: &'a PolarityLexicon,
        shifters: &'a ShifterInventory,
        emojis: Option<&'a dyn EmojiScores>,
        config: &'a PropagationConfig,
    ) -> Self {
        Scorer { words, shifters, emojis, config }
    }

    pub fn node_polarity(&self, token: &TokenNode) -> f64 {
        node_polarity(token, self.words, self.shifters, self.emojis, self.config)
    }

    pub fn score_sentence(&self, sentence: &ParsedSentence) -> SentimentScore {
        let n = sentence.len();
        let mut own = vec![0.0; n + 1];
        let mut roles = vec![None; n + 1];
        let mut classes = vec![None; n + 1];
        for t in sentence.tokens() {
            own[t.index] = self.node_polarity(t);
            roles[t.index] = role_of(t, self.shifters);
            classes[t.index] = if t.is_emoji() { None } else { PosClass::from_tag(&t.pos) };
        }
        let scopes = detect_negation_scopes(sentence, self.shifters);
        let mut anchored = vec![Vec::new(); n + 1];
        for (k, scope) in scopes.iter().enumerate() {
            if let Some(anchor) = scope.scope.iter().copied().min_by_key(|&j| (sentence.depth(j), j)) {
                anchored[anchor].push(k);
            }
        }
        let state = SentenceState { sentence, own, roles, classes, anchored, scopes };
        let clauses = self.split_clauses(&state);
        SentimentScore(self.combine_clauses(&state, &clauses))
    }

    pub fn score_document(&self, doc: &ParsedDocument) -> Result<SentimentScore, ScoreError> {
        if doc.sentences.is_empty() {
            return Err(ScoreError::EmptyDocument(doc.id.clone()));
        }
        let total: f64 = doc.sentences.iter().map(|s| self.score_sentence(s).0).sum();
        Ok(SentimentScore(match self.config.doc_aggregation {
            Aggregation::Sum => total,
            Aggregation::Mean => total / doc.sentences.len() as f64,
        }))
    }

    fn split_clauses(&self, st: &SentenceState) -> Vec<Clause> {
        let tokens = st.sentence.tokens();
        let n = tokens.len();
        let mut clauses: Vec<Clause> = Vec::new();
        let mut current = Clause { kind: ClauseKind::Main, member: vec![false; n + 1], has_content: false };
        for t in tokens {
            let kind = match st.roles[t.index] {
                Some(ShifterRole::Adversative) => Some(ClauseKind::Adversative),
                Some(ShifterRole::Concessive) => Some(ClauseKind::Concessive),
                _ => None,
            };
            if let Some(kind) = kind {
                clauses.push(current);
                current = Clause { kind, member: vec![false; n + 1], has_content: false };
            }
            current.member[t.index] = true;
            current.has_content |= !is_punct(t);
        }
        clauses.push(current);

        // A leading concessive clause ("although X, Y") ends at its first comma;
        // what follows is the clause it concedes to.
        if clauses.len() >= 2 && !clauses[0].has_content && clauses[1].kind == ClauseKind::Concessive {
            let conc = &clauses[1];
            let first = (1..=n).find(|&i| conc.member[i]).unwrap_or(1);
            if let Some(comma) = (first + 1..=n).find(|&i| conc.member[i] && is_clause_comma(&tokens[i - 1])) {
                let mut rest = Clause { kind: ClauseKind::Main, member: vec![false; n + 1], has_content: false };
                let mut head_part = Clause { kind: ClauseKind::Concessive, member: vec![false; n + 1], has_content: false };
                for i in 1..=n {
                    if !conc.member[i] {
                        continue;
                    }
                    let target = if i <= comma { &mut head_part } else { &mut rest };
                    target.member[i] = true;
                    target.has_content |= !is_punct(&tokens[i - 1]);
                }
                let leading = clauses.remove(0);
                clauses.remove(0);
                // leading punctuation (if any) joins the conceded clause
                for i in 1..=n {
                    if leading.member[i] {
                        rest.member[i] = true;
                    }
                }
                clauses.insert(0, rest);
                clauses.insert(0, head_part);
            }
        }
        clauses
    }

    fn combine_clauses(&self, st: &SentenceState, clauses: &[Clause]) -> f64 {
        let amp = self.config.adversative_amplify;
        let mut iter = clauses.iter();
        let first = iter.next().expect("at least one clause");
        let mut result = self.clause_value(st, first);
        if first.kind == ClauseKind::Concessive {
            // leading concessive clause followed by the clause it concedes to
            if let Some(second) = iter.next() {
                result = apply_concessive(result, self.clause_value(st, second), amp);
            } else {
                result /= amp;
            }
        }
        for clause in iter {
            let v = self.clause_value(st, clause);
            result = match clause.kind {
                ClauseKind::Adversative => apply_adversative(v, result, amp),
                ClauseKind::Concessive => apply_concessive(v, result, amp),
                ClauseKind::Main => result + v,
            };
        }
        result
    }

    fn clause_value(&self, st: &SentenceState, clause: &Clause) -> f64 {
        st.sentence
            .tokens()
            .iter()
            .filter(|t| clause.member[t.index] && (t.head == 0 || !clause.member[t.head]))
            .map(|t| self.node_value(st, t.index, &clause.member))
            .sum()
    }

    fn is_modifier(&self, st: &SentenceState, child: usize, head: usize) -> bool {
        match st.classes[child] {
            Some(PosClass::Adj | PosClass::Adv) => true,
            Some(PosClass::Noun) => st.classes[head] == Some(PosClass::Noun),
            _ => false,
        }
    }

    /// Value of the subtree at `v`, restricted to tokens of the clause.
    fn node_value(&self, st: &SentenceState, v: usize, clause: &[bool]) -> f64 {
        let children: Vec<usize> = st
            .sentence
            .child_indices(v)
            .expect("valid index")
            .iter()
            .copied()
            .filter(|&c| clause[c])
            .collect();
        let anchored = &st.anchored[v];
        if anchored.is_empty() {
            return self.accumulate(st, v, &children, clause);
        }
        let in_scope = |c: usize| anchored.iter().any(|&k| st.scopes[k].scope.contains(&c));
        let (inside, outside): (Vec<usize>, Vec<usize>) = children.iter().partition(|&&c| in_scope(c));
        let mut acc = self.accumulate(st, v, &inside, clause);
        for _ in anchored {
            acc = apply_negation(acc, self.config.negation_shift);
        }
        for c in outside {
            acc += self.node_value(st, c, clause);
        }
        acc
    }

    fn accumulate(&self, st: &SentenceState, v: usize, children: &[usize], clause: &[bool]) -> f64 {
        let mut acc = st.own[v];
        for &c in children {
            let cv = self.node_value(st, c, clause);
            if st.roles[c].is_none() && self.is_modifier(st, c, v) {
                acc = compose_modifier(cv, acc);
            } else {
                acc += cv;
            }
        }
        for &c in children {
            if let Some(ShifterRole::Intensifier(strength)) = st.roles[c] {
                acc = apply_intensification(strength, acc);
            }
        }
        acc
    }
}
