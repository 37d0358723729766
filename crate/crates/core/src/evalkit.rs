//! Agreement with gold labels and correlation between emoji lexica.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::emoji::EmojiKey;
use crate::emojirank::{EmojiLexicon, EmojiLexiconEntry};
use crate::label::SentimentLabel;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("length mismatch: {pred} predictions vs {gold} gold labels")]
    LengthMismatch { pred: usize, gold: usize },
    #[error("nothing to evaluate")]
    Empty,
    #[error("series is constant; correlation undefined")]
    ConstantSeries,
    #[error("correlation needs at least 2 paired values, found {0}")]
    InsufficientOverlap(usize),
}

/// Gold × predicted counts, indexed by [`SentimentLabel::index`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    pub counts: [[u64; 3]; 3],
}

impl ConfusionMatrix {
    pub fn get(&self, gold: SentimentLabel, pred: SentimentLabel) -> u64 {
        self.counts[gold.index()][pred.index()]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..3).map(|i| self.counts[i][i]).sum()
    }
}

pub fn confusion(pred: &[SentimentLabel], gold: &[SentimentLabel]) -> Result<ConfusionMatrix, EvalError> {
    if pred.len() != gold.len() {
        return Err(EvalError::LengthMismatch { pred: pred.len(), gold: gold.len() });
    }
    if pred.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut cm = ConfusionMatrix::default();
    for (p, g) in pred.iter().zip(gold) {
        cm.counts[g.index()][p.index()] += 1;
    }
    Ok(cm)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub accuracy: f64,
    pub p_macro: f64,
    pub f_macro: f64,
    pub total: u64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Precision, recall and F1 of one class; 0/0 terms are 0.
pub fn class_scores(cm: &ConfusionMatrix, class: SentimentLabel) -> (f64, f64, f64) {
    let c = class.index();
    let tp = cm.counts[c][c] as f64;
    let predicted: u64 = (0..3).map(|g| cm.counts[g][c]).sum();
    let actual: u64 = cm.counts[c].iter().sum();
    let p = ratio(tp, predicted as f64);
    let r = ratio(tp, actual as f64);
    (p, r, ratio(2.0 * p * r, p + r))
}

/// Accuracy over all classes; precision and F macro-averaged over the
/// positive and negative classes only.
pub fn metrics(cm: &ConfusionMatrix) -> MetricReport {
    let (pp, _, fp) = class_scores(cm, SentimentLabel::Positive);
    let (pn, _, fn_) = class_scores(cm, SentimentLabel::Negative);
    MetricReport {
        accuracy: ratio(cm.trace() as f64, cm.total() as f64),
        p_macro: (pp + pn) / 2.0,
        f_macro: (fp + fn_) / 2.0,
        total: cm.total(),
    }
}

impl MetricReport {
    /// Machine-readable `key=value` lines.
    pub fn to_kv(&self) -> String {
        format!(
            "accuracy={:.6}\np_macro={:.6}\nf_macro={:.6}\nn={}\n",
            self.accuracy, self.p_macro, self.f_macro, self.total
        )
    }
}

impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<10} {:>8}", "metric", "value")?;
        writeln!(f, "{:<10} {:>8.3}", "accuracy", self.accuracy)?;
        writeln!(f, "{:<10} {:>8.3}", "P_macro", self.p_macro)?;
        writeln!(f, "{:<10} {:>8.3}", "F_macro", self.f_macro)?;
        write!(f, "{:<10} {:>8}", "n", self.total)
    }
}

pub fn confusion_table(cm: &ConfusionMatrix) -> String {
    let mut s = format!("{:<10}{:>6}{:>6}{:>6}\n", "gold\\pred", "-1", "0", "+1");
    for g in SentimentLabel::ALL {
        let _ = writeln!(
            s,
            "{:<10}{:>6}{:>6}{:>6}",
            g.to_string(),
            cm.get(g, SentimentLabel::Negative),
            cm.get(g, SentimentLabel::Neutral),
            cm.get(g, SentimentLabel::Positive)
        );
    }
    s
}

// ---------------------------------------------------------------------------
// Correlation

pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, EvalError> {
    if x.len() != y.len() {
        return Err(EvalError::LengthMismatch { pred: x.len(), gold: y.len() });
    }
    if x.len() < 2 {
        return Err(EvalError::InsufficientOverlap(x.len()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(EvalError::ConstantSeries);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks; tied values share the mean of their positions.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, EvalError> {
    if x.len() != y.len() {
        return Err(EvalError::LengthMismatch { pred: x.len(), gold: y.len() });
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Entries by total occurrences descending, codepoints ascending on ties.
pub fn top_n_by_occurrence(lex: &EmojiLexicon, n: usize) -> Vec<&EmojiLexiconEntry> {
    let mut entries: Vec<&EmojiLexiconEntry> = lex.iter().collect();
    entries.sort_by(|a, b| b.counts.total().cmp(&a.counts.total()).then_with(|| a.key.cmp(&b.key)));
    entries.truncate(n);
    entries
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub r_score: f64,
    pub r_rank: f64,
    pub n: usize,
    /// (key, score in a, score in b) for every compared emoji.
    pub pairs: Vec<(EmojiKey, f64, f64)>,
}

impl CorrelationReport {
    pub fn scatter_tsv(&self) -> String {
        let mut s = String::new();
        for (k, a, b) in &self.pairs {
            let _ = writeln!(s, "{k}\t{a}\t{b}");
        }
        s
    }

    pub fn to_kv(&self) -> String {
        format!("r_score={:.6}\nr_rank={:.6}\nn={}\n", self.r_score, self.r_rank, self.n)
    }
}

impl fmt::Display for CorrelationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<8} {:>8}", "metric", "value")?;
        writeln!(f, "{:<8} {:>8.4}", "r_score", self.r_score)?;
        writeln!(f, "{:<8} {:>8.4}", "r_rank", self.r_rank)?;
        write!(f, "{:<8} {:>8}", "n", self.n)
    }
}

/// Correlates the scores of `a` and `b` over the top `n` emojis of `b`
/// (by occurrence) that `a` also contains.
pub fn compare_lexica(a: &EmojiLexicon, b: &EmojiLexicon, n: usize) -> Result<CorrelationReport, EvalError> {
    let mut pairs: Vec<(EmojiKey, f64, f64)> = top_n_by_occurrence(b, n)
        .into_iter()
        .filter_map(|eb| a.get(&eb.key).map(|ea| (eb.key.clone(), ea.score, eb.score)))
        .collect();
    if pairs.len() < 2 {
        return Err(EvalError::InsufficientOverlap(pairs.len()));
    }
    pairs.sort_by(|x, y| x.0.cmp(&y.0));
    let xs: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.2).collect();
    Ok(CorrelationReport { r_score: pearson(&xs, &ys)?, r_rank: spearman(&xs, &ys)?, n: pairs.len(), pairs })
}
