//! Reading and writing the staged files.

use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use emolex::deptree::{read_conllu, recover_emoji_tokens};
use emolex::emojirank::{export_lexicon, load_lexicon};
use emolex::textnorm::{read_corpus, RawDocument};
use emolex::usspad::Aggregation;
use emolex::{EmojiKey, EmojiLexicon, ParsedDocument, PolarityLexicon, PropagationConfig, SentimentLabel, ShifterInventory};

use crate::error::Failure;
use crate::ModelArgs;

pub fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

pub fn read_to_string(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

/// Writes `contents` through `fill`, creating the parent directory if needed.
pub fn write_with<F>(path: &Path, fill: F) -> Result<(), Failure>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<(), Failure>,
{
    let fail = |e: std::io::Error| Failure::usage(format!("cannot write {}: {e}", path.display()));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(fail)?;
    }
    let mut out = BufWriter::new(File::create(path).map_err(fail)?);
    fill(&mut out)?;
    out.flush().map_err(fail)
}

pub fn io_fail(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::usage(format!("cannot write {}: {e}", path.display()))
}

pub struct Model {
    pub words: PolarityLexicon,
    pub shifters: ShifterInventory,
    pub config: PropagationConfig,
}

pub fn load_model(args: &ModelArgs) -> Result<Model, Failure> {
    let words = match &args.lexicon {
        Some(p) => PolarityLexicon::load(p, "lexicon").map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?,
        None => PolarityLexicon::bundled(),
    };
    let shifters = match &args.shifters {
        Some(p) => ShifterInventory::load(p).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?,
        None => ShifterInventory::bundled(),
    };
    let mut config = match &args.config {
        Some(p) => PropagationConfig::from_kv_str(&read_to_string(p)?)
            .map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?,
        None => PropagationConfig::default(),
    };
    if let Some(v) = args.negation_shift {
        config.negation_shift = v;
    }
    if let Some(v) = args.adversative_amplify {
        config.adversative_amplify = v;
    }
    if let Some(v) = args.neutral_band {
        config.neutral_band = v;
    }
    if let Some(v) = args.emoji_scale {
        config.emoji_scale = v;
    }
    if let Some(v) = &args.doc_aggregation {
        config.doc_aggregation = v.parse::<Aggregation>().map_err(Failure::usage)?;
    }
    config.validate().map_err(|e| Failure::usage(format!("configuration: {e}")))?;
    Ok(Model { words, shifters, config })
}

/// Reads CoNLL-U documents and collapses their emoji tags into single tokens.
pub fn load_parses(path: &Path) -> Result<Vec<ParsedDocument>, Failure> {
    let docs = read_conllu(open(path)?).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    docs.into_iter()
        .map(|d| recover_emoji_tokens(d).map_err(|e| Failure::invalid(format!("{}: {e}", path.display()))))
        .collect()
}

pub fn load_emoji_lexicon(path: &Path) -> Result<EmojiLexicon, Failure> {
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("lexicon");
    load_lexicon(open(path)?, name).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

pub fn save_emoji_lexicon(lex: &EmojiLexicon, path: &Path) -> Result<(), Failure> {
    write_with(path, |out| {
        export_lexicon(lex, out).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
    })
}

pub fn load_corpus(path: &Path) -> Result<Vec<RawDocument>, Failure> {
    read_corpus(open(path)?).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

/// Iterates data rows of a TSV file: blank lines and `#` comments skipped.
fn data_lines(path: &Path) -> Result<Vec<(usize, String)>, Failure> {
    let mut rows = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        rows.push((i + 1, line.to_string()));
    }
    Ok(rows)
}

pub fn parse_key(text: &str) -> Option<EmojiKey> {
    text.parse::<EmojiKey>().ok().or_else(|| EmojiKey::from_str_chars(text.trim()))
}

/// Emoji keys listed one per line.
pub fn load_key_list(path: &Path) -> Result<Vec<EmojiKey>, Failure> {
    data_lines(path)?
        .into_iter()
        .map(|(line, text)| {
            parse_key(text.trim())
                .ok_or_else(|| Failure::invalid(format!("{}:{line}: not an emoji key: `{text}`", path.display())))
        })
        .collect()
}

pub struct DescriptionRow {
    pub key: EmojiKey,
    pub short_name: String,
    pub text: String,
}

pub fn load_descriptions(path: &Path) -> Result<Vec<DescriptionRow>, Failure> {
    data_lines(path)?
        .into_iter()
        .map(|(line, text)| {
            let bad = |why: &str| Failure::invalid(format!("{}:{line}: {why}", path.display()));
            let cols: Vec<&str> = text.splitn(3, '\t').collect();
            let [key, short_name, body] = cols.as_slice() else {
                return Err(bad("expected key<TAB>short_name<TAB>text"));
            };
            let key = parse_key(key).ok_or_else(|| bad("bad emoji key"))?;
            Ok(DescriptionRow { key, short_name: short_name.to_string(), text: body.to_string() })
        })
        .collect()
}

pub fn write_descriptions(path: &Path, rows: &[DescriptionRow]) -> Result<(), Failure> {
    write_with(path, |out| {
        for r in rows {
            let flat = |s: &str| s.replace(['\t', '\n', '\r'], " ");
            writeln!(out, "{}\t{}\t{}", r.key, flat(&r.short_name), flat(&r.text)).map_err(io_fail(path))?;
        }
        Ok(())
    })
}

/// Predictions written by `score`: id, score, label.
pub fn load_predictions(path: &Path) -> Result<Vec<(String, SentimentLabel)>, Failure> {
    data_lines(path)?
        .into_iter()
        .map(|(line, text)| {
            let bad = |why: &str| Failure::invalid(format!("{}:{line}: {why}", path.display()));
            let cols: Vec<&str> = text.split('\t').collect();
            let [id, _score, label] = cols.as_slice() else {
                return Err(bad("expected id<TAB>score<TAB>label"));
            };
            let label = label.trim().parse::<SentimentLabel>().map_err(|_| bad("bad label"))?;
            Ok((id.to_string(), label))
        })
        .collect()
}

/// Short names carried by a lexicon, for filling in another one.
pub fn names_of(lex: &EmojiLexicon) -> HashMap<EmojiKey, String> {
    lex.iter()
        .filter(|e| !e.short_name.is_empty())
        .map(|e| (e.key.clone(), e.short_name.clone()))
        .collect()
}
