//! Word polarity lexica on the shared [-5, +5] scale, and shifter inventories.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

pub const SCALE_MIN: f64 = -5.0;
pub const SCALE_MAX: f64 = 5.0;

/// Coarse part-of-speech class used to qualify lexicon entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PosClass {
    Adj,
    Adv,
    Noun,
    Verb,
    Any,
}

impl PosClass {
    /// Maps a tagger tag (Penn, UPOS or EAGLES-style) to a class; `None` for
    /// tags outside the four open classes.
    pub fn from_tag(tag: &str) -> Option<PosClass> {
        match tag {
            "ADJ" => return Some(PosClass::Adj),
            "ADV" => return Some(PosClass::Adv),
            "NOUN" | "PROPN" => return Some(PosClass::Noun),
            "VERB" => return Some(PosClass::Verb),
            "ADP" | "AUX" | "CCONJ" | "DET" | "INTJ" | "NUM" | "PART" | "PRON" | "PUNCT" | "SCONJ" | "SYM" | "X" => {
                return None
            }
            _ => {}
        }
        if tag.starts_with("JJ") {
            Some(PosClass::Adj)
        } else if tag.starts_with("RB") {
            Some(PosClass::Adv)
        } else if tag.starts_with("NN") {
            Some(PosClass::Noun)
        } else if tag.starts_with("VB") {
            Some(PosClass::Verb)
        } else {
            // EAGLES: first letter carries the category
            match tag.chars().next() {
                Some('A') if tag.len() > 1 => Some(PosClass::Adj),
                Some('R') if tag.len() > 1 => Some(PosClass::Adv),
                Some('N') if tag.len() > 1 => Some(PosClass::Noun),
                Some('V') if tag.len() > 1 => Some(PosClass::Verb),
                _ => None,
            }
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PosClass::Adj => "adj",
            PosClass::Adv => "adv",
            PosClass::Noun => "noun",
            PosClass::Verb => "verb",
            PosClass::Any => "any",
        }
    }

    /// Universal tag for this class, used by the heuristic parse.
    pub fn universal_tag(self) -> Option<&'static str> {
        match self {
            PosClass::Adj => Some("ADJ"),
            PosClass::Adv => Some("ADV"),
            PosClass::Noun => Some("NOUN"),
            PosClass::Verb => Some("VERB"),
            PosClass::Any => None,
        }
    }
}

impl fmt::Display for PosClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PosClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "adj" | "a" | "jj" => Ok(PosClass::Adj),
            "adv" | "r" | "rb" => Ok(PosClass::Adv),
            "noun" | "n" | "nn" => Ok(PosClass::Noun),
            "verb" | "v" | "vb" => Ok(PosClass::Verb),
            "any" | "" | "_" => Ok(PosClass::Any),
            other => Err(other.to_string()),
        }
    }
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("line {line}: duplicate entry ({lemma}, {pos})")]
    DuplicateEntry { line: usize, lemma: String, pos: PosClass },
    #[error("line {line}: polarity {value} outside [-5, 5]")]
    OutOfScale { line: usize, value: f64 },
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// Map from (lemma, POS class) to a real polarity in [-5, +5].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolarityLexicon {
    pub name: String,
    entries: BTreeMap<(String, PosClass), f64>,
}

impl PolarityLexicon {
    pub fn new(name: impl Into<String>) -> Self {
        PolarityLexicon { name: name.into(), entries: BTreeMap::new() }
    }

    /// The demonstration lexicon shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_reader(crate::data::DEMO_LEXICON.as_bytes(), "demo").expect("bundled lexicon is valid")
    }

    /// Inserts one entry. Line 0 is used for programmatic inserts in errors.
    pub fn insert(&mut self, lemma: &str, pos: PosClass, polarity: f64) -> Result<(), LexiconError> {
        self.insert_at(0, lemma, pos, polarity)
    }

    fn insert_at(&mut self, line: usize, lemma: &str, pos: PosClass, polarity: f64) -> Result<(), LexiconError> {
        if !polarity.is_finite() || !(SCALE_MIN..=SCALE_MAX).contains(&polarity) {
            return Err(LexiconError::OutOfScale { line, value: polarity });
        }
        let key = (lemma.to_lowercase(), pos);
        if self.entries.contains_key(&key) {
            return Err(LexiconError::DuplicateEntry { line, lemma: key.0, pos });
        }
        self.entries.insert(key, polarity);
        Ok(())
    }

    /// Reads `lemma<TAB>pos?<TAB>polarity` rows; a two-column row omits the POS.
    pub fn from_reader<R: BufRead>(reader: R, name: &str) -> Result<Self, LexiconError> {
        let mut lex = PolarityLexicon::new(name);
        for (i, line) in reader.lines().enumerate() {
            let lineno = i + 1;
            let line = line.map_err(|source| LexiconError::Io { path: name.to_string(), source })?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let (lemma, pos, value) = match cols.as_slice() {
                [lemma, value] => (*lemma, "", *value),
                [lemma, pos, value] => (*lemma, *pos, *value),
                _ => {
                    return Err(LexiconError::MalformedRow {
                        line: lineno,
                        reason: format!("expected 2 or 3 columns, found {}", cols.len()),
                    })
                }
            };
            let lemma = lemma.trim();
            if lemma.is_empty() {
                return Err(LexiconError::MalformedRow { line: lineno, reason: "empty lemma".into() });
            }
            let pos: PosClass = pos
                .parse()
                .map_err(|p| LexiconError::MalformedRow { line: lineno, reason: format!("unknown POS `{p}`") })?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| LexiconError::MalformedRow { line: lineno, reason: format!("bad polarity `{value}`") })?;
            lex.insert_at(lineno, lemma, pos, value)?;
        }
        Ok(lex)
    }

    pub fn load(path: &Path, name: &str) -> Result<Self, LexiconError> {
        let file = File::open(path).map_err(|source| LexiconError::Io { path: path.display().to_string(), source })?;
        Self::from_reader(BufReader::new(file), name).map_err(|e| match e {
            LexiconError::Io { source, .. } => LexiconError::Io { path: path.display().to_string(), source },
            other => other,
        })
    }

    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for ((lemma, pos), value) in &self.entries {
            writeln!(out, "{lemma}\t{pos}\t{value}")?;
        }
        Ok(())
    }

    /// Exact (lemma, class) match first, then (lemma, any).
    pub fn lookup(&self, lemma: &str, pos: Option<PosClass>) -> Option<f64> {
        let lemma = lemma.to_lowercase();
        if let Some(p) = pos.filter(|p| *p != PosClass::Any) {
            if let Some(v) = self.entries.get(&(lemma.clone(), p)) {
                return Some(*v);
            }
        }
        self.entries.get(&(lemma, PosClass::Any)).copied()
    }

    /// The class of a lemma when the lexicon knows it under exactly one open class.
    pub fn sole_class(&self, lemma: &str) -> Option<PosClass> {
        let lemma = lemma.to_lowercase();
        let mut classes = self
            .entries
            .range((lemma.clone(), PosClass::Adj)..=(lemma, PosClass::Any))
            .map(|((_, p), _)| *p)
            .filter(|p| *p != PosClass::Any);
        let first = classes.next()?;
        if classes.next().is_none() {
            Some(first)
        } else {
            None
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, PosClass, f64)> {
        self.entries.iter().map(|((l, p), v)| (l.as_str(), *p, *v))
    }

    /// Copy with every polarity passed through `f`, clamped to the scale.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> PolarityLexicon {
        PolarityLexicon {
            name: self.name.clone(),
            entries: self.entries.iter().map(|(k, v)| (k.clone(), f(*v).clamp(SCALE_MIN, SCALE_MAX))).collect(),
        }
    }
}

/// Union of both lexica; shared keys get the unweighted mean, others are copied.
pub fn merge_lexica(a: &PolarityLexicon, b: &PolarityLexicon) -> PolarityLexicon {
    let mut entries = a.entries.clone();
    for (key, vb) in &b.entries {
        entries.entry(key.clone()).and_modify(|va| *va = (*va + vb) / 2.0).or_insert(*vb);
    }
    let name = if a.name == b.name { a.name.clone() } else { format!("{}+{}", a.name, b.name) };
    PolarityLexicon { name, entries }
}

// ---------------------------------------------------------------------------
// Shifters

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShifterRole {
    Negator,
    /// Strength in [-1, 1]; positive amplifies, negative attenuates.
    Intensifier(f64),
    Adversative,
    Concessive,
}

#[derive(Debug, Error)]
pub enum ShifterError {
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("line {line}: `{lemma}` is already listed as another shifter kind")]
    Overlap { line: usize, lemma: String },
    #[error("line {line}: intensifier strength {value} outside [-1, 1]")]
    StrengthOutOfRange { line: usize, value: f64 },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// Negators, intensifiers and contrast connectors. The four sets are disjoint.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ShifterInventory {
    pub negators: BTreeSet<String>,
    pub intensifiers: BTreeMap<String, f64>,
    pub adversative_connectors: BTreeSet<String>,
    pub concessive_connectors: BTreeSet<String>,
}

impl ShifterInventory {
    pub fn bundled() -> Self {
        Self::from_reader(crate::data::SHIFTERS.as_bytes()).expect("bundled shifter table is valid")
    }

    /// Reads `lemma<TAB>kind<TAB>strength?` rows.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self, ShifterError> {
        let mut inv = ShifterInventory::default();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|source| ShifterError::Io { path: "<reader>".into(), source })?;
            let lineno = i + 1;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            let malformed = |reason: String| ShifterError::MalformedRow { line: lineno, reason };
            let (lemma, kind, strength) = match cols.as_slice() {
                [lemma, kind] => (*lemma, *kind, None),
                [lemma, kind, strength] => (*lemma, *kind, Some(*strength)),
                _ => return Err(malformed(format!("expected 2 or 3 columns, found {}", cols.len()))),
            };
            let role = match kind {
                "negator" => ShifterRole::Negator,
                "adversative" => ShifterRole::Adversative,
                "concessive" => ShifterRole::Concessive,
                "intensifier" => {
                    let s = strength.ok_or_else(|| malformed("intensifier needs a strength".into()))?;
                    let value: f64 = s.parse().map_err(|_| malformed(format!("bad strength `{s}`")))?;
                    ShifterRole::Intensifier(value)
                }
                other => return Err(malformed(format!("unknown kind `{other}`"))),
            };
            inv.insert_at(lineno, lemma, role)?;
        }
        Ok(inv)
    }

    pub fn load(path: &Path) -> Result<Self, ShifterError> {
        let file = File::open(path).map_err(|source| ShifterError::Io { path: path.display().to_string(), source })?;
        Self::from_reader(BufReader::new(file))
    }

    pub fn insert(&mut self, lemma: &str, role: ShifterRole) -> Result<(), ShifterError> {
        self.insert_at(0, lemma, role)
    }

    fn insert_at(&mut self, line: usize, lemma: &str, role: ShifterRole) -> Result<(), ShifterError> {
        let lemma = lemma.to_lowercase();
        if lemma.is_empty() {
            return Err(ShifterError::MalformedRow { line, reason: "empty lemma".into() });
        }
        if self.role(&lemma).is_some() {
            return Err(ShifterError::Overlap { line, lemma });
        }
        match role {
            ShifterRole::Negator => {
                self.negators.insert(lemma);
            }
            ShifterRole::Intensifier(s) => {
                if !(-1.0..=1.0).contains(&s) {
                    return Err(ShifterError::StrengthOutOfRange { line, value: s });
                }
                self.intensifiers.insert(lemma, s);
            }
            ShifterRole::Adversative => {
                self.adversative_connectors.insert(lemma);
            }
            ShifterRole::Concessive => {
                self.concessive_connectors.insert(lemma);
            }
        }
        Ok(())
    }

    pub fn role(&self, lemma: &str) -> Option<ShifterRole> {
        if self.negators.contains(lemma) {
            Some(ShifterRole::Negator)
        } else if let Some(s) = self.intensifiers.get(lemma) {
            Some(ShifterRole::Intensifier(*s))
        } else if self.adversative_connectors.contains(lemma) {
            Some(ShifterRole::Adversative)
        } else if self.concessive_connectors.contains(lemma) {
            Some(ShifterRole::Concessive)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn load_and_lookup() {
        let lex = PolarityLexicon::from_reader("grumpy\tadj\t-3\n".as_bytes(), "t").unwrap();
        assert_eq!(lex.lookup("grumpy", Some(PosClass::Adj)), Some(-3.0));
        assert_eq!(lex.lookup("Grumpy", Some(PosClass::Adj)), Some(-3.0));
        // no (grumpy, any) entry to fall back to
        assert_eq!(lex.lookup("grumpy", Some(PosClass::Noun)), None);
        assert_eq!(lex.lookup("unknown", None), None);
    }

    #[test]
    fn empty_file() {
        assert!(PolarityLexicon::from_reader("".as_bytes(), "e").unwrap().is_empty());
        assert!(PolarityLexicon::from_reader("# only a comment\n\n".as_bytes(), "e").unwrap().is_empty());
    }

    #[test]
    fn load_errors() {
        assert!(matches!(
            PolarityLexicon::from_reader("great\tadj\t7\n".as_bytes(), "t"),
            Err(LexiconError::OutOfScale { line: 1, .. })
        ));
        assert!(matches!(
            PolarityLexicon::from_reader("a\t1\nA\tany\t2\n".as_bytes(), "t"),
            Err(LexiconError::DuplicateEntry { line: 2, .. })
        ));
        assert!(matches!(
            PolarityLexicon::from_reader("a\tadj\tx\n".as_bytes(), "t"),
            Err(LexiconError::MalformedRow { line: 1, .. })
        ));
        assert!(matches!(
            PolarityLexicon::from_reader("a\tzz\t1\n".as_bytes(), "t"),
            Err(LexiconError::MalformedRow { line: 1, .. })
        ));
        assert!(matches!(
            PolarityLexicon::from_reader("lonely\n".as_bytes(), "t"),
            Err(LexiconError::MalformedRow { line: 1, .. })
        ));
    }

    #[test]
    fn pos_entry_shadows_any() {
        let lex = PolarityLexicon::from_reader("fine\tany\t1\nfine\tadj\t2\n".as_bytes(), "t").unwrap();
        assert_eq!(lex.lookup("fine", Some(PosClass::Adj)), Some(2.0));
        assert_eq!(lex.lookup("fine", Some(PosClass::Noun)), Some(1.0));
        assert_eq!(lex.lookup("fine", None), Some(1.0));
    }

    #[test]
    fn merge_examples() {
        let mut a = PolarityLexicon::new("a");
        a.insert("good", PosClass::Any, 4.0).unwrap();
        let mut b = PolarityLexicon::new("b");
        b.insert("good", PosClass::Any, 3.0).unwrap();
        assert_eq!(merge_lexica(&a, &b).lookup("good", None), Some(3.5));

        let mut bad = PolarityLexicon::new("a");
        bad.insert("bad", PosClass::Any, -3.0).unwrap();
        let merged = merge_lexica(&bad, &PolarityLexicon::new("b"));
        assert_eq!(merged.lookup("bad", None), Some(-3.0));
        assert_eq!(merge_lexica(&a, &a), a);
    }

    #[test]
    fn pos_tags() {
        assert_eq!(PosClass::from_tag("JJR"), Some(PosClass::Adj));
        assert_eq!(PosClass::from_tag("VBG"), Some(PosClass::Verb));
        assert_eq!(PosClass::from_tag("NNS"), Some(PosClass::Noun));
        assert_eq!(PosClass::from_tag("RB"), Some(PosClass::Adv));
        assert_eq!(PosClass::from_tag("ADJ"), Some(PosClass::Adj));
        assert_eq!(PosClass::from_tag("AQ0CS0"), Some(PosClass::Adj));
        assert_eq!(PosClass::from_tag("DT"), None);
        assert_eq!(PosClass::from_tag("ADP"), None);
        assert_eq!(PosClass::from_tag("EMOJI"), None);
    }

    #[test]
    fn shifters() {
        let inv = ShifterInventory::bundled();
        assert_eq!(inv.role("not"), Some(ShifterRole::Negator));
        assert_eq!(inv.role("very"), Some(ShifterRole::Intensifier(0.25)));
        assert_eq!(inv.role("extremely"), Some(ShifterRole::Intensifier(0.5)));
        assert_eq!(inv.role("slightly"), Some(ShifterRole::Intensifier(-0.3)));
        assert_eq!(inv.role("but"), Some(ShifterRole::Adversative));
        assert_eq!(inv.role("although"), Some(ShifterRole::Concessive));
        assert_eq!(inv.role("cat"), None);

        assert!(matches!(
            ShifterInventory::from_reader("not\tnegator\nnot\tadversative\n".as_bytes()),
            Err(ShifterError::Overlap { line: 2, .. })
        ));
        assert!(matches!(
            ShifterInventory::from_reader("very\tintensifier\t1.5\n".as_bytes()),
            Err(ShifterError::StrengthOutOfRange { line: 1, .. })
        ));
        assert!(matches!(
            ShifterInventory::from_reader("very\tintensifier\n".as_bytes()),
            Err(ShifterError::MalformedRow { line: 1, .. })
        ));
    }

    #[test]
    fn bundled_lexicon_loads() {
        let lex = PolarityLexicon::bundled();
        assert!(lex.len() > 50);
        assert!(lex.iter().all(|(_, _, v)| (SCALE_MIN..=SCALE_MAX).contains(&v)));
    }
}
