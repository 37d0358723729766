//! Restores informal text toward plain language and locates emoji occurrences.
//!
//! The corpus-level order applied by [`Normalizer::normalize_corpus`] is fixed:
//! duplicate/retweet removal, placeholders, abbreviations, elongation, entity
//! masking, and finally emoji tagging. Emoji occurrences are always recorded
//! against the raw text, before any rewriting.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;
use std::sync::OnceLock;

use regex::Regex;
use thiserror::Error;

use crate::emoji::{self, EmojiKey, ZWJ};
use crate::label::SentimentLabel;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("line {line}: malformed row (expected {expected})")]
    MalformedRow { line: usize, expected: &'static str },
    #[error("line {line}: duplicate entry `{key}`")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: unknown entity label `{label}`")]
    UnknownLabel { line: usize, label: String },
    #[error("line {line}: invalid sentiment label `{label}`")]
    BadLabel { line: usize, label: String },
    #[error("line {line}: empty document id")]
    EmptyId { line: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A document of the input corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub id: String,
    pub text: String,
    pub language: String,
    pub label: Option<SentimentLabel>,
}

impl RawDocument {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        RawDocument { id: id.into(), text: text.into(), language: "en".to_string(), label: None }
    }

    pub fn with_label(mut self, label: SentimentLabel) -> Self {
        self.label = Some(label);
        self
    }
}

/// Iterates non-comment, non-blank lines of a TSV table with 1-based line numbers.
fn table_rows<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String), std::io::Error>> {
    reader.lines().enumerate().filter_map(|(i, line)| match line {
        Ok(l) => {
            let trimmed = l.trim_end_matches('\r');
            if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
                None
            } else {
                Some(Ok((i + 1, trimmed.to_string())))
            }
        }
        Err(e) => Some(Err(e)),
    })
}

/// Reads a corpus in `id<TAB>label<TAB>text` form. The label column may be
/// empty; a two-column row is read as `id<TAB>text`.
pub fn read_corpus<R: BufRead>(reader: R) -> Result<Vec<RawDocument>, TableError> {
    let mut docs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.splitn(3, '\t').collect();
        let (id, label, text) = match cols.as_slice() {
            [id, label, text] => (*id, *label, *text),
            [id, text] => (*id, "", *text),
            _ => return Err(TableError::MalformedRow { line: lineno, expected: "id<TAB>label?<TAB>text" }),
        };
        if id.is_empty() {
            return Err(TableError::EmptyId { line: lineno });
        }
        let label = if label.trim().is_empty() {
            None
        } else {
            Some(
                label
                    .parse::<SentimentLabel>()
                    .map_err(|_| TableError::BadLabel { line: lineno, label: label.to_string() })?,
            )
        };
        docs.push(RawDocument { id: id.to_string(), text: text.to_string(), language: "en".to_string(), label });
    }
    Ok(docs)
}

pub fn write_corpus<'a, W: Write>(
    mut out: W,
    docs: impl IntoIterator<Item = (&'a str, Option<SentimentLabel>, &'a str)>,
) -> std::io::Result<()> {
    for (id, label, text) in docs {
        let label = label.map(|l| l.to_string()).unwrap_or_default();
        writeln!(out, "{id}\t{label}\t{text}")?;
    }
    Ok(())
}

/// Drops retweets (`RT ` prefix) and byte-identical repeats, keeping order.
pub fn dedupe_corpus(docs: Vec<RawDocument>) -> Vec<RawDocument> {
    let mut seen = HashSet::new();
    docs.into_iter()
        .filter(|d| !d.text.starts_with("RT ") && seen.insert(d.text.clone()))
        .collect()
}

// ---------------------------------------------------------------------------
// Emoji occurrences

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmojiOccurrence {
    pub codepoints: Vec<char>,
    /// Offset in characters into the source text.
    pub char_offset: usize,
    /// Length in characters.
    pub length: usize,
}

impl EmojiOccurrence {
    pub fn key(&self) -> EmojiKey {
        EmojiKey::new(self.codepoints.clone()).expect("occurrences are nonempty")
    }

    /// Lexicon key: codepoints with modifiers stripped.
    pub fn base_key(&self) -> EmojiKey {
        self.key().base()
    }
}

fn scan_emojis(chars: &[char]) -> Vec<EmojiOccurrence> {
    let mut out = Vec::new();
    let len = chars.len();
    let mut i = 0;
    while i < len {
        let c = chars[i];
        if !emoji::is_emoji_scalar(c) {
            i += 1;
            continue;
        }
        let start = i;
        let mut cps = vec![c];
        i += 1;
        if emoji::is_regional_indicator(c) && i < len && emoji::is_regional_indicator(chars[i]) {
            cps.push(chars[i]);
            i += 1;
        } else if !emoji::is_regional_indicator(c) {
            loop {
                while i < len && emoji::is_modifier(chars[i]) {
                    cps.push(chars[i]);
                    i += 1;
                }
                if i + 1 < len && chars[i] == ZWJ && emoji::is_emoji_scalar(chars[i + 1]) {
                    cps.push(ZWJ);
                    cps.push(chars[i + 1]);
                    i += 2;
                    continue;
                }
                break;
            }
        }
        out.push(EmojiOccurrence { length: cps.len(), codepoints: cps, char_offset: start });
    }
    out
}

/// All emoji occurrences in reading order. A base emoji together with its
/// skin-tone/variation modifiers and joiner-linked continuations is one
/// occurrence; a pair of regional indicators is one flag.
pub fn extract_emojis(text: &str) -> Vec<EmojiOccurrence> {
    let chars: Vec<char> = text.chars().collect();
    scan_emojis(&chars)
}

pub const EMOJI_OPEN: &str = "[emoji]";
pub const EMOJI_CLOSE: &str = "[/emoji]";

/// Replaces each raw emoji with `[emoji]U+XXXX[/emoji]`. A space is inserted
/// between the tag and an adjacent non-space character so that downstream
/// tokenizers see the tag as its own token.
pub fn tag_embedded_emojis(description: &str) -> String {
    let chars: Vec<char> = description.chars().collect();
    let occurrences = scan_emojis(&chars);
    if occurrences.is_empty() {
        return description.to_string();
    }
    let mut out = String::with_capacity(description.len() + occurrences.len() * 24);
    let mut pos = 0;
    for occ in &occurrences {
        out.extend(&chars[pos..occ.char_offset]);
        if out.chars().next_back().is_some_and(|c| !c.is_whitespace()) {
            out.push(' ');
        }
        out.push_str(EMOJI_OPEN);
        out.push_str(&occ.key().to_string());
        out.push_str(EMOJI_CLOSE);
        pos = occ.char_offset + occ.length;
        if chars.get(pos).is_some_and(|c| !c.is_whitespace()) {
            out.push(' ');
        }
    }
    out.extend(&chars[pos..]);
    out
}

// ---------------------------------------------------------------------------
// Placeholders

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlaceholderKind {
    Hashtag,
    User,
    Url,
}

impl PlaceholderKind {
    pub fn token(self) -> &'static str {
        match self {
            Self::Hashtag => "HASHTAG",
            Self::User => "USER",
            Self::Url => "URL",
        }
    }

    /// True when `token` is one of the neutral placeholder tokens.
    pub fn is_placeholder(token: &str) -> bool {
        matches!(token, "HASHTAG" | "USER" | "URL")
    }
}

/// A token removed by [`replace_placeholders`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub kind: PlaceholderKind,
    pub original: String,
    /// Character offset in the input text.
    pub char_offset: usize,
}

fn placeholder_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"(?P<url>(?:https?://|www\.)[^\s]+)|(?P<user>@\w+)|(?P<tag>#\w+)").expect("valid regex")
    })
}

/// Replaces hashtags, user mentions and URLs by `HASHTAG`, `USER` and `URL`.
/// `@`/`#` glued to a preceding word character (e.g. e-mail addresses) is left alone.
pub fn replace_placeholders(text: &str) -> (String, Vec<Artifact>) {
    let mut out = String::with_capacity(text.len());
    let mut artifacts = Vec::new();
    let mut last = 0;
    let mut chars_before = 0;
    for caps in placeholder_regex().captures_iter(text) {
        let m = caps.get(0).expect("whole match");
        let kind = if caps.name("url").is_some() {
            PlaceholderKind::Url
        } else if caps.name("user").is_some() {
            PlaceholderKind::User
        } else {
            PlaceholderKind::Hashtag
        };
        let glued = text[..m.start()].chars().next_back().is_some_and(|c| c.is_alphanumeric() || c == '_');
        if glued && kind != PlaceholderKind::Url {
            continue;
        }
        out.push_str(&text[last..m.start()]);
        chars_before += text[last..m.start()].chars().count();
        artifacts.push(Artifact { kind, original: m.as_str().to_string(), char_offset: chars_before });
        chars_before += m.as_str().chars().count();
        out.push_str(kind.token());
        last = m.end();
    }
    out.push_str(&text[last..]);
    (out, artifacts)
}

// ---------------------------------------------------------------------------
// Elongation

fn collapse_runs(token: &str, keep: usize) -> String {
    let chars: Vec<char> = token.chars().collect();
    let mut out = String::with_capacity(token.len());
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let mut j = i;
        while j < chars.len() && chars[j] == c {
            j += 1;
        }
        let run = j - i;
        let emit = if c.is_alphabetic() && run >= 3 { keep } else { run };
        out.extend(std::iter::repeat_n(c, emit));
        i = j;
    }
    out
}

/// Collapses runs of three or more identical letters to two. If that form
/// is not a known word but the single-letter collapse is, the latter wins.
pub fn reduce_elongation(token: &str, known_words: &HashSet<String>) -> String {
    let two = collapse_runs(token, 2);
    if two == token || known_words.contains(&two.to_lowercase()) {
        return two;
    }
    let one = collapse_runs(token, 1);
    if known_words.contains(&one.to_lowercase()) {
        one
    } else {
        two
    }
}

fn letters_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\p{L}+").expect("valid regex"))
}

/// Applies [`reduce_elongation`] to every alphabetic run of `text`.
pub fn reduce_elongation_text(text: &str, known_words: &HashSet<String>) -> String {
    letters_regex().replace_all(text, |caps: &regex::Captures| reduce_elongation(&caps[0], known_words)).into_owned()
}

pub fn read_word_list<R: BufRead>(reader: R) -> Result<HashSet<String>, TableError> {
    let mut words = HashSet::new();
    for row in table_rows(reader) {
        let (_, line) = row?;
        words.insert(line.trim().to_lowercase());
    }
    Ok(words)
}

// ---------------------------------------------------------------------------
// Abbreviations

/// Case-insensitive abbreviation → expansion map.
#[derive(Debug, Clone, Default)]
pub struct AbbreviationTable {
    entries: HashMap<String, String>,
}

fn word_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[\w']+").expect("valid regex"))
}

impl AbbreviationTable {
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self, TableError> {
        let mut table = AbbreviationTable::default();
        for row in table_rows(reader) {
            let (line, text) = row?;
            let (abbr, expansion) = text
                .split_once('\t')
                .filter(|(a, e)| !a.trim().is_empty() && !e.trim().is_empty())
                .ok_or(TableError::MalformedRow { line, expected: "abbreviation<TAB>expansion" })?;
            table.insert(abbr.trim(), expansion.trim()).map_err(|key| TableError::Duplicate { line, key })?;
        }
        Ok(table)
    }

    /// Inserts an entry; returns the normalized key on a case-insensitive clash.
    pub fn insert(&mut self, abbreviation: &str, expansion: &str) -> Result<(), String> {
        let key = abbreviation.to_lowercase();
        if self.entries.contains_key(&key) {
            return Err(key);
        }
        self.entries.insert(key, expansion.to_string());
        Ok(())
    }

    pub fn get(&self, token: &str) -> Option<&str> {
        self.entries.get(&token.to_lowercase()).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Replaces whole tokens found in `table`, case-insensitively.
pub fn expand_abbreviations(text: &str, table: &AbbreviationTable) -> String {
    if table.is_empty() {
        return text.to_string();
    }
    word_regex()
        .replace_all(text, |caps: &regex::Captures| match table.get(&caps[0]) {
            Some(expansion) => expansion.to_string(),
            None => caps[0].to_string(),
        })
        .into_owned()
}

// ---------------------------------------------------------------------------
// Entities

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntityLabel {
    Person,
    Organization,
    Location,
    Date,
}

impl EntityLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Person => "Person",
            Self::Organization => "Organization",
            Self::Location => "Location",
            Self::Date => "Date",
        }
    }
}

impl fmt::Display for EntityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntityLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Person" => Ok(Self::Person),
            "Organization" => Ok(Self::Organization),
            "Location" => Ok(Self::Location),
            "Date" => Ok(Self::Date),
            other => Err(other.to_string()),
        }
    }
}

/// Surface form → entity label. Multi-word surface forms match token sequences
/// separated by whitespace; 4-digit tokens are always masked as [`EntityLabel::Date`].
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    entries: HashMap<String, EntityLabel>,
    max_words: usize,
}

fn year_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^[0-9]{4}$").expect("valid regex"))
}

fn entity_token_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\w+").expect("valid regex"))
}

impl Gazetteer {
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self, TableError> {
        let mut gaz = Gazetteer::default();
        for row in table_rows(reader) {
            let (line, text) = row?;
            let (surface, label) = text
                .split_once('\t')
                .ok_or(TableError::MalformedRow { line, expected: "surface<TAB>label" })?;
            let label: EntityLabel =
                label.trim().parse().map_err(|label| TableError::UnknownLabel { line, label })?;
            let surface = surface.split_whitespace().collect::<Vec<_>>().join(" ");
            if surface.is_empty() {
                return Err(TableError::MalformedRow { line, expected: "surface<TAB>label" });
            }
            if gaz.entries.contains_key(&surface) {
                return Err(TableError::Duplicate { line, key: surface });
            }
            gaz.insert(&surface, label);
        }
        Ok(gaz)
    }

    pub fn insert(&mut self, surface: &str, label: EntityLabel) {
        let words = surface.split_whitespace().count();
        self.max_words = self.max_words.max(words);
        self.entries.insert(surface.split_whitespace().collect::<Vec<_>>().join(" "), label);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Whole-token replacement of gazetteer entries (longest match first) and years.
pub fn mask_entities(text: &str, gazetteer: &Gazetteer) -> String {
    let tokens: Vec<regex::Match> = entity_token_regex().find_iter(text).collect();
    let mut out = String::with_capacity(text.len());
    let mut last = 0;
    let mut t = 0;
    while t < tokens.len() {
        let mut matched = None;
        let longest = gazetteer.max_words.min(tokens.len() - t);
        for n in (1..=longest).rev() {
            let span = &tokens[t..t + n];
            let contiguous = span.windows(2).all(|w| text[w[0].end()..w[1].start()].chars().all(char::is_whitespace)
                && w[0].end() < w[1].start());
            if !contiguous {
                continue;
            }
            let surface = span.iter().map(|m| m.as_str()).collect::<Vec<_>>().join(" ");
            if let Some(label) = gazetteer.entries.get(&surface) {
                matched = Some((n, *label));
                break;
            }
        }
        if matched.is_none() && year_regex().is_match(tokens[t].as_str()) {
            matched = Some((1, EntityLabel::Date));
        }
        match matched {
            Some((n, label)) => {
                out.push_str(&text[last..tokens[t].start()]);
                out.push_str(label.as_str());
                last = tokens[t + n - 1].end();
                t += n;
            }
            None => t += 1,
        }
    }
    out.push_str(&text[last..]);
    out
}

// ---------------------------------------------------------------------------
// Documents

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RemovalFlags {
    pub retweet: bool,
    pub duplicate: bool,
}

impl RemovalFlags {
    pub fn any(&self) -> bool {
        self.retweet || self.duplicate
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedDocument {
    pub id: String,
    pub label: Option<SentimentLabel>,
    pub normalized_text: String,
    /// Occurrences located in the raw text, before any rewriting.
    pub emojis: Vec<EmojiOccurrence>,
    pub artifacts: Vec<Artifact>,
    pub removed: RemovalFlags,
}

/// Bundles the tables used by the normalization pipeline.
#[derive(Debug, Clone, Default)]
pub struct Normalizer {
    pub abbreviations: AbbreviationTable,
    pub gazetteer: Gazetteer,
    pub known_words: HashSet<String>,
}

impl Normalizer {
    /// Normalizer loaded with the tables shipped in the crate's `data/` directory.
    pub fn bundled() -> Self {
        Normalizer {
            abbreviations: AbbreviationTable::from_reader(crate::data::ABBREVIATIONS.as_bytes())
                .expect("bundled abbreviation table is valid"),
            gazetteer: Gazetteer::from_reader(crate::data::GAZETTEER.as_bytes()).expect("bundled gazetteer is valid"),
            known_words: read_word_list(crate::data::KNOWN_WORDS.as_bytes()).expect("bundled word list is valid"),
        }
    }

    /// Rewrites one text: placeholders, abbreviations, elongation, entities, emoji tags.
    pub fn normalize_text(&self, text: &str) -> (String, Vec<Artifact>) {
        let (t, artifacts) = replace_placeholders(text);
        let t = expand_abbreviations(&t, &self.abbreviations);
        let t = reduce_elongation_text(&t, &self.known_words);
        let t = mask_entities(&t, &self.gazetteer);
        (tag_embedded_emojis(&t), artifacts)
    }

    pub fn normalize(&self, doc: &RawDocument) -> NormalizedDocument {
        let emojis = extract_emojis(&doc.text);
        let (normalized_text, artifacts) = self.normalize_text(&doc.text);
        NormalizedDocument {
            id: doc.id.clone(),
            label: doc.label,
            normalized_text,
            emojis,
            artifacts,
            removed: RemovalFlags::default(),
        }
    }

    /// Normalizes every document; removed ones keep their flags set and an
    /// empty text. Output order equals input order.
    pub fn normalize_corpus(&self, docs: &[RawDocument]) -> Vec<NormalizedDocument> {
        use rayon::prelude::*;
        let mut seen = HashSet::new();
        let flags: Vec<RemovalFlags> = docs
            .iter()
            .map(|d| {
                let retweet = d.text.starts_with("RT ");
                let duplicate = !retweet && !seen.insert(d.text.as_str());
                RemovalFlags { retweet, duplicate }
            })
            .collect();
        docs.par_iter()
            .zip(flags.par_iter())
            .map(|(doc, flags)| {
                if flags.any() {
                    NormalizedDocument {
                        id: doc.id.clone(),
                        label: doc.label,
                        normalized_text: String::new(),
                        emojis: extract_emojis(&doc.text),
                        artifacts: Vec::new(),
                        removed: *flags,
                    }
                } else {
                    self.normalize(doc)
                }
            })
            .collect()
    }
}
