//! Emoji sentiment lexica: occurrence tallies, smoothed distributions and
//! their mean, built from labeled corpora or from scored descriptions.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::deptree::ParsedDocument;
use crate::emoji::EmojiKey;
use crate::label::SentimentLabel;
use crate::usspad::{EmojiScores, PropagationConfig, Scorer};
use crate::wordlex::{PolarityLexicon, ShifterInventory};

/// Tolerance for the distribution and score invariants.
pub const INVARIANT_TOLERANCE: f64 = 1e-12;

/// Maximum accepted gap between a recomputed score and a reference file's score.
pub const REFERENCE_SCORE_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct SentimentCounts {
    pub neg: u64,
    pub neu: u64,
    pub pos: u64,
}

impl SentimentCounts {
    pub fn new(neg: u64, neu: u64, pos: u64) -> Self {
        SentimentCounts { neg, neu, pos }
    }

    pub fn total(&self) -> u64 {
        self.neg + self.neu + self.pos
    }

    pub fn add(&mut self, label: SentimentLabel) {
        match label {
            SentimentLabel::Negative => self.neg += 1,
            SentimentLabel::Neutral => self.neu += 1,
            SentimentLabel::Positive => self.pos += 1,
        }
    }

    pub fn merge(self, other: SentimentCounts) -> SentimentCounts {
        SentimentCounts { neg: self.neg + other.neg, neu: self.neu + other.neu, pos: self.pos + other.pos }
    }

    pub fn swapped(self) -> SentimentCounts {
        SentimentCounts { neg: self.pos, neu: self.neu, pos: self.neg }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SentimentDistribution {
    pub p_neg: f64,
    pub p_neu: f64,
    pub p_pos: f64,
}

impl SentimentDistribution {
    pub fn uniform() -> Self {
        SentimentDistribution { p_neg: 1.0 / 3.0, p_neu: 1.0 / 3.0, p_pos: 1.0 / 3.0 }
    }

    /// The distribution whose mean is `score`, keeping as much mass as
    /// possible uniform. Used where only a score is known.
    pub fn from_score(score: f64) -> Self {
        let rest = (1.0 - score.abs()) / 3.0;
        SentimentDistribution { p_neg: (-score).max(0.0) + rest, p_neu: rest, p_pos: score.max(0.0) + rest }
    }

    pub fn sum(&self) -> f64 {
        self.p_neg + self.p_neu + self.p_pos
    }
}

/// Laplace smoothing over the three classes: `p_c = (N(c)+1)/(N+3)`.
pub fn smooth(counts: SentimentCounts) -> SentimentDistribution {
    let denom = (counts.total() + 3) as f64;
    SentimentDistribution {
        p_neg: (counts.neg + 1) as f64 / denom,
        p_neu: (counts.neu + 1) as f64 / denom,
        p_pos: (counts.pos + 1) as f64 / denom,
    }
}

/// Mean of the distribution over the labels -1, 0, +1.
pub fn sentiment_score(dist: &SentimentDistribution) -> f64 {
    dist.p_pos - dist.p_neg
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LexiconSource {
    Annotated,
    Unsupervised,
    Description,
    Averaged,
    Imported,
}

impl LexiconSource {
    pub fn as_str(self) -> &'static str {
        match self {
            LexiconSource::Annotated => "annotated",
            LexiconSource::Unsupervised => "unsupervised",
            LexiconSource::Description => "description",
            LexiconSource::Averaged => "averaged",
            LexiconSource::Imported => "imported",
        }
    }
}

impl fmt::Display for LexiconSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LexiconSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "annotated" => Ok(LexiconSource::Annotated),
            "unsupervised" => Ok(LexiconSource::Unsupervised),
            "description" => Ok(LexiconSource::Description),
            "averaged" => Ok(LexiconSource::Averaged),
            "imported" => Ok(LexiconSource::Imported),
            other => Err(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmojiLexiconEntry {
    pub key: EmojiKey,
    pub short_name: String,
    pub counts: SentimentCounts,
    pub distribution: SentimentDistribution,
    pub score: f64,
    pub source: LexiconSource,
}

impl EmojiLexiconEntry {
    pub fn from_counts(key: EmojiKey, counts: SentimentCounts, source: LexiconSource) -> Self {
        let distribution = smooth(counts);
        EmojiLexiconEntry { key, short_name: String::new(), counts, score: sentiment_score(&distribution), distribution, source }
    }

    pub fn from_score(key: EmojiKey, score: f64, source: LexiconSource) -> Self {
        let distribution = SentimentDistribution::from_score(score);
        EmojiLexiconEntry { key, short_name: String::new(), counts: SentimentCounts::default(), distribution, score, source }
    }

    /// Checks that the distribution sums to one and the score is its mean.
    pub fn check_invariants(&self) -> Result<(), String> {
        let d = &self.distribution;
        if (d.sum() - 1.0).abs() > INVARIANT_TOLERANCE {
            return Err(format!("distribution sums to {}", d.sum()));
        }
        if [d.p_neg, d.p_neu, d.p_pos].iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err("probability outside [0, 1]".to_string());
        }
        if (self.score - sentiment_score(d)).abs() > INVARIANT_TOLERANCE {
            return Err(format!("score {} differs from p_pos - p_neg = {}", self.score, sentiment_score(d)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EmojiLexicon {
    pub name: String,
    pub entries: BTreeMap<EmojiKey, EmojiLexiconEntry>,
}

impl EmojiLexicon {
    pub fn new(name: impl Into<String>) -> Self {
        EmojiLexicon { name: name.into(), entries: BTreeMap::new() }
    }

    pub fn get(&self, key: &EmojiKey) -> Option<&EmojiLexiconEntry> {
        self.entries.get(key)
    }

    pub fn insert(&mut self, entry: EmojiLexiconEntry) {
        self.entries.insert(entry.key.clone(), entry);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &EmojiLexiconEntry> {
        self.entries.values()
    }

    /// Fills empty short names from `names`.
    pub fn fill_names(&mut self, names: &HashMap<EmojiKey, String>) {
        for entry in self.entries.values_mut() {
            if entry.short_name.is_empty() {
                if let Some(name) = names.get(&entry.key) {
                    entry.short_name = name.clone();
                }
            }
        }
    }
}

impl EmojiScores for EmojiLexicon {
    fn emoji_score(&self, key: &EmojiKey) -> Option<f64> {
        self.entries.get(key).map(|e| e.score)
    }
}

// ---------------------------------------------------------------------------
// Building

/// Counts every emoji occurrence under its document's label. Keys are the
/// modifier-stripped base sequences.
pub fn tally(corpus: &[(SentimentLabel, Vec<EmojiKey>)]) -> BTreeMap<EmojiKey, SentimentCounts> {
    corpus
        .par_iter()
        .fold(BTreeMap::new, |mut acc: BTreeMap<EmojiKey, SentimentCounts>, (label, emojis)| {
            for key in emojis {
                acc.entry(key.base()).or_default().add(*label);
            }
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (key, counts) in b {
                let slot = a.entry(key).or_default();
                *slot = slot.merge(counts);
            }
            a
        })
}

/// Tally, smooth and score every emoji of a labeled corpus.
pub fn build_ranking(corpus: &[(SentimentLabel, Vec<EmojiKey>)], name: &str, source: LexiconSource) -> EmojiLexicon {
    let mut lex = EmojiLexicon::new(name);
    for (key, counts) in tally(corpus) {
        lex.insert(EmojiLexiconEntry::from_counts(key, counts, source));
    }
    lex
}

/// Squashes an unbounded description score into (-1, 1).
pub fn squash_description_score(w: f64, emoji_scale: f64) -> f64 {
    w / (w.abs() + emoji_scale)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DescriptionError {
    #[error("no description text for {0}")]
    MissingDescription(EmojiKey),
}

/// One emoji's parsed description.
#[derive(Debug, Clone)]
pub struct DescribedEmoji {
    pub key: EmojiKey,
    pub short_name: String,
    pub parse: ParsedDocument,
}

/// Scores each description and maps the score onto the emoji scale. Emoji
/// tokens inside descriptions contribute nothing: no emoji lexicon exists yet.
pub fn description_lexicon(
    descriptions: &[DescribedEmoji],
    words: &PolarityLexicon,
    shifters: &ShifterInventory,
    config: &PropagationConfig,
) -> Result<EmojiLexicon, DescriptionError> {
    let scorer = Scorer::new(words, shifters, None, config);
    let scored: Vec<Result<EmojiLexiconEntry, DescriptionError>> = descriptions
        .par_iter()
        .map(|d| {
            let w = scorer
                .score_document(&d.parse)
                .map_err(|_| DescriptionError::MissingDescription(d.key.clone()))?
                .value();
            let key = d.key.base();
            let mut entry = EmojiLexiconEntry::from_score(key, squash_description_score(w, config.emoji_scale), LexiconSource::Description);
            entry.short_name = d.short_name.clone();
            Ok(entry)
        })
        .collect();
    let mut lex = EmojiLexicon::new("description");
    for entry in scored {
        lex.insert(entry?);
    }
    Ok(lex)
}

fn mean_distribution(a: &SentimentDistribution, b: &SentimentDistribution) -> SentimentDistribution {
    SentimentDistribution {
        p_neg: (a.p_neg + b.p_neg) / 2.0,
        p_neu: (a.p_neu + b.p_neu) / 2.0,
        p_pos: (a.p_pos + b.p_pos) / 2.0,
    }
}

/// Mean of two lexica on shared emojis; emojis in only one are copied.
pub fn average_lexica(a: &EmojiLexicon, b: &EmojiLexicon) -> EmojiLexicon {
    let mut out = EmojiLexicon::new(format!("mean({},{})", a.name, b.name));
    for key in a.entries.keys().chain(b.entries.keys()) {
        if out.entries.contains_key(key) {
            continue;
        }
        let entry = match (a.get(key), b.get(key)) {
            (Some(x), Some(y)) => {
                let distribution = mean_distribution(&x.distribution, &y.distribution);
                let short_name = if x.short_name.is_empty() { y.short_name.clone() } else { x.short_name.clone() };
                EmojiLexiconEntry {
                    key: key.clone(),
                    short_name,
                    counts: x.counts.merge(y.counts),
                    score: sentiment_score(&distribution),
                    distribution,
                    source: LexiconSource::Averaged,
                }
            }
            (Some(x), None) | (None, Some(x)) => EmojiLexiconEntry { source: LexiconSource::Averaged, ..x.clone() },
            (None, None) => unreachable!("key comes from one of the lexica"),
        };
        out.insert(entry);
    }
    out
}

// ---------------------------------------------------------------------------
// CSV I/O

#[derive(Debug, Error)]
pub enum CsvSchemaError {
    #[error("row {row}: {reason}")]
    MalformedCsv { row: usize, reason: String },
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub const NATIVE_HEADER: [&str; 10] =
    ["codepoints", "short_name", "n_neg", "n_neu", "n_pos", "p_neg", "p_neu", "p_pos", "score", "source"];

/// Writes the native schema. The score column is regenerated from the distribution.
pub fn export_lexicon<W: Write>(lex: &EmojiLexicon, out: W) -> Result<(), CsvSchemaError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(NATIVE_HEADER)?;
    for e in lex.iter() {
        let d = &e.distribution;
        w.write_record([
            e.key.to_string(),
            e.short_name.clone(),
            e.counts.neg.to_string(),
            e.counts.neu.to_string(),
            e.counts.pos.to_string(),
            d.p_neg.to_string(),
            d.p_neu.to_string(),
            d.p_pos.to_string(),
            sentiment_score(d).to_string(),
            e.source.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn column_index(headers: &csv::StringRecord, name: &str) -> Result<usize, CsvSchemaError> {
    headers
        .iter()
        .position(|h| h.trim().eq_ignore_ascii_case(name))
        .ok_or_else(|| CsvSchemaError::MissingColumn(name.to_string()))
}

fn field<T: FromStr>(record: &csv::StringRecord, idx: usize, row: usize, what: &str) -> Result<T, CsvSchemaError> {
    let raw = record.get(idx).unwrap_or("").trim();
    raw.parse()
        .map_err(|_| CsvSchemaError::MalformedCsv { row, reason: format!("bad {what} `{raw}`") })
}

/// Reads the native schema, validating every entry's invariants.
pub fn load_lexicon<R: Read>(input: R, name: &str) -> Result<EmojiLexicon, CsvSchemaError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let headers = r.headers()?.clone();
    for h in headers.iter() {
        if !NATIVE_HEADER.contains(&h) {
            return Err(CsvSchemaError::UnknownColumn(h.to_string()));
        }
    }
    let idx: Vec<usize> = NATIVE_HEADER.iter().map(|c| column_index(&headers, c)).collect::<Result<_, _>>()?;
    let mut lex = EmojiLexicon::new(name);
    for (i, record) in r.records().enumerate() {
        let row = i + 2;
        let record = record?;
        let key: EmojiKey = field(&record, idx[0], row, "codepoints")?;
        let entry = EmojiLexiconEntry {
            key: key.clone(),
            short_name: record.get(idx[1]).unwrap_or("").to_string(),
            counts: SentimentCounts {
                neg: field(&record, idx[2], row, "n_neg")?,
                neu: field(&record, idx[3], row, "n_neu")?,
                pos: field(&record, idx[4], row, "n_pos")?,
            },
            distribution: SentimentDistribution {
                p_neg: field(&record, idx[5], row, "p_neg")?,
                p_neu: field(&record, idx[6], row, "p_neu")?,
                p_pos: field(&record, idx[7], row, "p_pos")?,
            },
            score: field(&record, idx[8], row, "score")?,
            source: field(&record, idx[9], row, "source")?,
        };
        entry.check_invariants().map_err(|reason| CsvSchemaError::MalformedCsv { row, reason })?;
        if lex.entries.contains_key(&key) {
            return Err(CsvSchemaError::MalformedCsv { row, reason: format!("duplicate key {key}") });
        }
        lex.insert(entry);
    }
    Ok(lex)
}

/// Result of importing a reference ranking.
#[derive(Debug, Clone)]
pub struct ReferenceImport {
    pub lexicon: EmojiLexicon,
    /// Rows whose file score disagrees with the recomputed one by more than
    /// [`REFERENCE_SCORE_TOLERANCE`]: (row, key, file score, recomputed score).
    pub mismatches: Vec<(usize, EmojiKey, f64, f64)>,
}

/// Reads a reference ranking in the public column layout (`Emoji`,
/// `Unicode codepoint`, `Occurrences`, `Negative`, `Neutral`, `Positive`,
/// `Unicode name`, and optionally a score column).
pub fn import_reference_csv<R: Read>(input: R) -> Result<ReferenceImport, CsvSchemaError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(input);
    let headers = r.headers()?.clone();
    let c_emoji = column_index(&headers, "Emoji").ok();
    let c_cp = column_index(&headers, "Unicode codepoint").ok();
    if c_emoji.is_none() && c_cp.is_none() {
        return Err(CsvSchemaError::MissingColumn("Unicode codepoint".to_string()));
    }
    let c_neg = column_index(&headers, "Negative")?;
    let c_neu = column_index(&headers, "Neutral")?;
    let c_pos = column_index(&headers, "Positive")?;
    let c_occ = column_index(&headers, "Occurrences").ok();
    let c_name = column_index(&headers, "Unicode name").ok();
    let c_score = ["Sentiment score", "Score", "score"].iter().find_map(|n| column_index(&headers, n).ok());

    let mut lexicon = EmojiLexicon::new("reference");
    let mut mismatches = Vec::new();
    for (i, record) in r.records().enumerate() {
        let row = i + 2;
        let record = record?;
        let key = match (c_cp.and_then(|c| record.get(c)), c_emoji.and_then(|c| record.get(c))) {
            (Some(cp), _) if !cp.trim().is_empty() => cp
                .trim()
                .parse::<EmojiKey>()
                .map_err(|e| CsvSchemaError::MalformedCsv { row, reason: e.to_string() })?,
            (_, Some(text)) => EmojiKey::from_str_chars(text.trim())
                .ok_or_else(|| CsvSchemaError::MalformedCsv { row, reason: "empty emoji".to_string() })?,
            _ => return Err(CsvSchemaError::MalformedCsv { row, reason: "no codepoint".to_string() }),
        };
        let counts = SentimentCounts {
            neg: field(&record, c_neg, row, "Negative")?,
            neu: field(&record, c_neu, row, "Neutral")?,
            pos: field(&record, c_pos, row, "Positive")?,
        };
        if let Some(c) = c_occ {
            let occ: u64 = field(&record, c, row, "Occurrences")?;
            if occ != counts.total() {
                return Err(CsvSchemaError::MalformedCsv {
                    row,
                    reason: format!("Occurrences {occ} differs from class total {}", counts.total()),
                });
            }
        }
        let mut entry = EmojiLexiconEntry::from_counts(key.base(), counts, LexiconSource::Imported);
        if let Some(c) = c_score {
            let file_score: f64 = field(&record, c, row, "score")?;
            if (file_score - entry.score).abs() > REFERENCE_SCORE_TOLERANCE {
                mismatches.push((row, entry.key.clone(), file_score, entry.score));
                entry.distribution = SentimentDistribution::from_score(file_score);
                entry.score = file_score;
            }
        }
        entry.short_name = c_name.and_then(|c| record.get(c)).unwrap_or("").trim().to_lowercase();
        if let Some(existing) = lexicon.entries.get(&entry.key) {
            // skin-tone variants fold into their base
            let counts = existing.counts.merge(entry.counts);
            let name = existing.short_name.clone();
            entry = EmojiLexiconEntry::from_counts(entry.key.clone(), counts, LexiconSource::Imported);
            entry.short_name = name;
        }
        lexicon.insert(entry);
    }
    Ok(ReferenceImport { lexicon, mismatches })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(s: &str) -> EmojiKey {
        EmojiKey::from_str_chars(s).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn smoothing_examples() {
        assert_eq!(smooth(SentimentCounts::new(0, 0, 0)), SentimentDistribution::uniform());
        let d = smooth(SentimentCounts::new(4, 6, 10));
        assert!(close(d.p_neg, 5.0 / 23.0) && close(d.p_neu, 7.0 / 23.0) && close(d.p_pos, 11.0 / 23.0));
        assert!(close(sentiment_score(&d), 6.0 / 23.0));
        let d = smooth(SentimentCounts::new(1, 2, 4));
        assert_eq!((d.p_neg, d.p_neu, d.p_pos), (0.2, 0.3, 0.5));
        assert_eq!(sentiment_score(&d), 0.3);
        assert_eq!(sentiment_score(&SentimentDistribution::uniform()), 0.0);
    }

    fn corpus_1_2_4() -> Vec<(SentimentLabel, Vec<EmojiKey>)> {
        let mut c = vec![(SentimentLabel::Negative, vec![key("😂")])];
        c.extend((0..2).map(|_| (SentimentLabel::Neutral, vec![key("😂")])));
        c.extend((0..4).map(|_| (SentimentLabel::Positive, vec![key("😂")])));
        c
    }

    #[test]
    fn tally_examples() {
        assert!(tally(&[]).is_empty());
        let t = tally(&[(SentimentLabel::Positive, vec![key("😂")])]);
        assert_eq!(t[&key("😂")], SentimentCounts::new(0, 0, 1));
        assert_eq!(tally(&corpus_1_2_4())[&key("😂")], SentimentCounts::new(1, 2, 4));
        let twice = tally(&[(SentimentLabel::Negative, vec![key("😂"), key("😂")])]);
        assert_eq!(twice[&key("😂")], SentimentCounts::new(2, 0, 0));
    }

    #[test]
    fn skin_tones_fold_into_base() {
        let toned = EmojiKey::new(vec!['\u{1F44D}', '\u{1F3FD}']).unwrap();
        let t = tally(&[(SentimentLabel::Positive, vec![toned]), (SentimentLabel::Negative, vec![key("👍")])]);
        assert_eq!(t.len(), 1);
        assert_eq!(t[&key("👍")], SentimentCounts::new(1, 0, 1));
    }

    #[test]
    fn ranking_and_label_swap() {
        let lex = build_ranking(&corpus_1_2_4(), "r", LexiconSource::Annotated);
        assert_eq!(lex.get(&key("😂")).unwrap().score, 0.3);
        assert!(build_ranking(&[(SentimentLabel::Positive, vec![])], "r", LexiconSource::Annotated).is_empty());
        let flipped: Vec<_> = corpus_1_2_4().into_iter().map(|(l, e)| (l.flipped(), e)).collect();
        let lex2 = build_ranking(&flipped, "r", LexiconSource::Annotated);
        assert!(close(lex2.get(&key("😂")).unwrap().score, -0.3));
    }

    #[test]
    fn squashing_is_bounded_and_sign_preserving() {
        assert_eq!(squash_description_score(0.0, 5.0), 0.0);
        assert_eq!(squash_description_score(5.0, 5.0), 0.5);
        assert_eq!(squash_description_score(-5.0, 5.0), -0.5);
        assert!(squash_description_score(1e9, 5.0) < 1.0);
    }

    #[test]
    fn from_score_distribution_is_consistent() {
        for s in [-0.99, -0.5, 0.0, 0.3, 0.75] {
            let e = EmojiLexiconEntry::from_score(key("😂"), s, LexiconSource::Description);
            e.check_invariants().unwrap();
            assert!(close(e.score, s));
        }
    }

    #[test]
    fn averaging() {
        let mut a = EmojiLexicon::new("a");
        a.insert(EmojiLexiconEntry::from_score(key("😂"), 0.4, LexiconSource::Description));
        a.insert(EmojiLexiconEntry::from_score(key("😢"), -0.5, LexiconSource::Description));
        let mut b = EmojiLexicon::new("b");
        b.insert(EmojiLexiconEntry::from_score(key("😂"), 0.2, LexiconSource::Unsupervised));
        let m = average_lexica(&a, &b);
        assert!(close(m.get(&key("😂")).unwrap().score, 0.3));
        assert_eq!(m.get(&key("😢")).unwrap().score, -0.5);
        assert_eq!(m.get(&key("😢")).unwrap().source, LexiconSource::Averaged);
        let same = average_lexica(&a, &a);
        for e in a.iter() {
            assert!(close(same.get(&e.key).unwrap().score, e.score));
        }
        let ba = average_lexica(&b, &a);
        for e in m.iter() {
            assert_eq!(ba.get(&e.key).unwrap().score, e.score);
        }
    }

    #[test]
    fn native_round_trip() {
        let mut lex = build_ranking(&corpus_1_2_4(), "r", LexiconSource::Annotated);
        let mut d = EmojiLexiconEntry::from_score(key("😢"), -1.0 / 7.0, LexiconSource::Description);
        d.short_name = "crying face, \"sad\"".into();
        lex.insert(d);
        let mut buf = Vec::new();
        export_lexicon(&lex, &mut buf).unwrap();
        let back = load_lexicon(buf.as_slice(), "r").unwrap();
        assert_eq!(back, lex);
    }

    #[test]
    fn native_schema_errors() {
        let bad = "codepoints,short_name,n_neg,n_neu,n_pos,p_neg,p_neu,p_pos,score,source,extra\n";
        assert!(matches!(load_lexicon(bad.as_bytes(), "x"), Err(CsvSchemaError::UnknownColumn(c)) if c == "extra"));
        let missing = "codepoints,short_name\n";
        assert!(matches!(load_lexicon(missing.as_bytes(), "x"), Err(CsvSchemaError::MissingColumn(_))));
        let inconsistent = format!("{}\nU+1F602,,1,2,4,0.2,0.3,0.5,0.4,annotated\n", NATIVE_HEADER.join(","));
        assert!(matches!(load_lexicon(inconsistent.as_bytes(), "x"), Err(CsvSchemaError::MalformedCsv { row: 2, .. })));
        let empty = NATIVE_HEADER.join(",") + "\n";
        assert!(load_lexicon(empty.as_bytes(), "x").unwrap().is_empty());
    }

    const REF_HEADER: &str = "Emoji,Unicode codepoint,Occurrences,Position,Negative,Neutral,Positive,Unicode name,Unicode block\n";

    #[test]
    fn reference_import() {
        let csv = format!("{REF_HEADER}😂,0x1f602,7,0.8,1,2,4,FACE WITH TEARS OF JOY,Emoticons\n");
        let imp = import_reference_csv(csv.as_bytes()).unwrap();
        let e = imp.lexicon.get(&key("😂")).unwrap();
        assert_eq!(e.score, 0.3);
        assert_eq!(e.short_name, "face with tears of joy");
        assert_eq!(e.source, LexiconSource::Imported);
        assert!(imp.mismatches.is_empty());
        assert!(import_reference_csv(REF_HEADER.as_bytes()).unwrap().lexicon.is_empty());
    }

    #[test]
    fn reference_import_score_column() {
        let header = "Emoji,Unicode codepoint,Occurrences,Negative,Neutral,Positive,Sentiment score\n";
        let ok = format!("{header}😂,0x1f602,7,1,2,4,0.3\n");
        assert!(import_reference_csv(ok.as_bytes()).unwrap().mismatches.is_empty());
        // unsmoothed fraction 3/7 differs from 0.3 by more than the tolerance
        let off = format!("{header}😂,0x1f602,7,1,2,4,0.428571\n");
        let imp = import_reference_csv(off.as_bytes()).unwrap();
        assert_eq!(imp.mismatches.len(), 1);
        let e = imp.lexicon.get(&key("😂")).unwrap();
        assert_eq!(e.score, 0.428571);
        e.check_invariants().unwrap();
    }

    #[test]
    fn reference_import_errors() {
        let csv = "Emoji,Unicode codepoint,Negative,Neutral\n";
        assert!(matches!(import_reference_csv(csv.as_bytes()), Err(CsvSchemaError::MissingColumn(c)) if c == "Positive"));
        let csv = format!("{REF_HEADER}😂,0x1f602,7,0.8,1,x,4,FACE,Emoticons\n");
        assert!(matches!(import_reference_csv(csv.as_bytes()), Err(CsvSchemaError::MalformedCsv { row: 2, .. })));
    }
}
