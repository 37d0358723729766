use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use log::{info, warn};
use rayon::prelude::*;

use emolex::deptree::{plain_heuristic_parse, recover_emoji_tokens};
use emolex::emojirank::{
    average_lexica, build_ranking, description_lexicon, import_reference_csv, DescribedEmoji, LexiconSource,
};
use emolex::evalkit::{compare_lexica, confusion, confusion_table, metrics};
use emolex::pediaclient::{fetch_all, Fetcher, FixtureStore, PediaError};
use emolex::textnorm::{extract_emojis, write_corpus, Normalizer};
use emolex::usspad::{classify, EmojiScores, Scorer};
use emolex::{EmojiKey, EmojiLexicon, ParsedDocument, SentimentLabel};

use crate::error::Failure;
use crate::inputs::{self, io_fail, write_with, Model};
use crate::{ModelArgs, Variant, VariantKind};

pub fn normalize(input: &Path, output: &Path, sidecar: &Path) -> Result<(), Failure> {
    let docs = inputs::load_corpus(input)?;
    let normalized = Normalizer::bundled().normalize_corpus(&docs);
    for d in normalized.iter().filter(|d| d.removed.any()) {
        let why = if d.removed.retweet { "retweet" } else { "duplicate" };
        info!("dropping {} ({why})", d.id);
    }
    let kept: Vec<_> = normalized.iter().filter(|d| !d.removed.any()).collect();
    write_with(output, |out| {
        write_corpus(&mut *out, kept.iter().map(|d| (d.id.as_str(), d.label, d.normalized_text.as_str())))
            .map_err(io_fail(output))
    })?;
    write_with(sidecar, |out| {
        for d in &kept {
            for occ in &d.emojis {
                writeln!(out, "{}\t{}\t{}\t{}", d.id, occ.char_offset, occ.length, occ.key()).map_err(io_fail(sidecar))?;
            }
        }
        Ok(())
    })
}

pub struct FetchOptions {
    pub emojis: PathBuf,
    pub fixtures: PathBuf,
    pub online: bool,
    pub delay_ms: u64,
    pub base_url: Option<String>,
    pub first_paragraph_only: bool,
    pub out: PathBuf,
}

pub fn fetch_descriptions(opts: &FetchOptions) -> Result<(), Failure> {
    let keys = inputs::load_key_list(&opts.emojis)?;
    let store = FixtureStore::new(&opts.fixtures);
    let fetcher = opts.online.then(|| {
        let delay = Duration::from_millis(opts.delay_ms);
        match &opts.base_url {
            Some(url) => Fetcher::new(url, delay),
            None => Fetcher::from_env(delay),
        }
    });
    let results = fetch_all(&keys, &store, fetcher.as_ref());
    let mut rows = Vec::new();
    let mut misses = Vec::new();
    for (key, result) in keys.iter().zip(results) {
        match result {
            Ok(record) => rows.push(inputs::DescriptionRow {
                key: record.key.clone(),
                text: record.text(opts.first_paragraph_only),
                short_name: record.short_name,
            }),
            Err(PediaError::Io { path, source }) => {
                return Err(Failure::usage(format!("{}: {source}", path.display())));
            }
            Err(e) => {
                eprintln!("missing {key} ({}): {e}", key.as_text());
                misses.push(key.to_string());
            }
        }
    }
    inputs::write_descriptions(&opts.out, &rows)?;
    if misses.is_empty() {
        Ok(())
    } else {
        Err(Failure::Partial(format!("{} of {} descriptions unavailable: {}", misses.len(), keys.len(), misses.join(", "))))
    }
}

pub fn build_desc_lexicon(
    model_args: &ModelArgs,
    descriptions: &Path,
    parses: Option<&Path>,
    plain_heuristic: bool,
    out: &Path,
) -> Result<(), Failure> {
    let model = inputs::load_model(model_args)?;
    let rows = inputs::load_descriptions(descriptions)?;
    let described: Vec<DescribedEmoji> = if plain_heuristic {
        warn!("plain heuristic parses: flat trees, degraded scores");
        let normalizer = Normalizer::bundled();
        let tagger = |w: &str| model.words.sole_class(w).and_then(|c| c.universal_tag());
        rows.iter()
            .map(|r| {
                let (text, _) = normalizer.normalize_text(&r.text);
                let parse = plain_heuristic_parse(&r.key.to_string(), &text, &tagger);
                let parse = recover_emoji_tokens(parse).map_err(|e| Failure::invalid(e.to_string()))?;
                Ok(DescribedEmoji { key: r.key.clone(), short_name: r.short_name.clone(), parse })
            })
            .collect::<Result<_, Failure>>()?
    } else {
        let path = parses.expect("clap requires --parses without --plain-heuristic");
        let mut by_key: HashMap<EmojiKey, ParsedDocument> = HashMap::new();
        for doc in inputs::load_parses(path)? {
            let key = inputs::parse_key(&doc.id).ok_or_else(|| {
                Failure::invalid(format!("{}: document id `{}` is not an emoji key", path.display(), doc.id))
            })?;
            by_key.insert(key, doc);
        }
        rows.iter()
            .map(|r| {
                let parse = by_key.remove(&r.key).ok_or_else(|| {
                    Failure::invalid(format!("missing parse for {} ({}) in {}", r.key, r.short_name, path.display()))
                })?;
                Ok(DescribedEmoji { key: r.key.clone(), short_name: r.short_name.clone(), parse })
            })
            .collect::<Result<_, Failure>>()?
    };
    let lex = description_lexicon(&described, &model.words, &model.shifters, &model.config)
        .map_err(|e| Failure::invalid(e.to_string()))?;
    inputs::save_emoji_lexicon(&lex, out)
}

/// Scores documents in input order.
fn score_documents(
    model: &Model,
    emojis: Option<&dyn EmojiScores>,
    docs: &[ParsedDocument],
) -> Result<Vec<(f64, SentimentLabel)>, Failure> {
    let scorer = Scorer::new(&model.words, &model.shifters, emojis, &model.config);
    docs.par_iter()
        .map(|d| {
            let s = scorer.score_document(d).map_err(|e| Failure::invalid(e.to_string()))?.value();
            Ok((s, classify(s, model.config.neutral_band)))
        })
        .collect()
}

pub fn score(
    model_args: &ModelArgs,
    parses: &Path,
    variant: Variant,
    emoji_lexicon: Option<&Path>,
    out: &Path,
) -> Result<(), Failure> {
    let model = inputs::load_model(model_args)?;
    let lex = match (variant, emoji_lexicon) {
        (Variant::A1, Some(_)) => {
            warn!("A1 ignores emoji polarity; --emoji-lexicon is unused");
            None
        }
        (Variant::A1, None) => None,
        (_, Some(p)) => Some(inputs::load_emoji_lexicon(p)?),
        (v, None) => return Err(Failure::usage(format!("variant {v:?} needs --emoji-lexicon"))),
    };
    let docs = inputs::load_parses(parses)?;
    let scored = score_documents(&model, lex.as_ref().map(|l| l as &dyn EmojiScores), &docs)?;
    write_with(out, |w| {
        for (doc, (s, label)) in docs.iter().zip(&scored) {
            writeln!(w, "{}\t{s:.6}\t{label}", doc.id).map_err(io_fail(out))?;
        }
        Ok(())
    })
}

/// Labels each document and builds a ranking over the emojis it contains.
fn ranking_from_scores(
    model: &Model,
    emojis: Option<&dyn EmojiScores>,
    docs: &[ParsedDocument],
    name: &str,
) -> Result<EmojiLexicon, Failure> {
    let scored = score_documents(model, emojis, docs)?;
    let corpus: Vec<(SentimentLabel, Vec<EmojiKey>)> =
        docs.iter().zip(scored).map(|(d, (_, label))| (label, d.emoji_keys())).collect();
    Ok(build_ranking(&corpus, name, LexiconSource::Unsupervised))
}

pub fn variant(
    model_args: &ModelArgs,
    kind: VariantKind,
    parses: &Path,
    desc_lexicon: Option<&Path>,
    e2_lexicon: Option<&Path>,
    out: &Path,
) -> Result<(), Failure> {
    let model = inputs::load_model(model_args)?;
    let desc = desc_lexicon.map(inputs::load_emoji_lexicon).transpose()?;
    let need_desc = || desc.as_ref().ok_or_else(|| Failure::usage(format!("variant {kind:?} needs --desc-lexicon")));
    let mut lex = match kind {
        VariantKind::E1 => ranking_from_scores(&model, None, &inputs::load_parses(parses)?, "E1")?,
        VariantKind::E2 => ranking_from_scores(&model, Some(need_desc()?), &inputs::load_parses(parses)?, "E2")?,
        VariantKind::E3 => {
            let d = need_desc()?;
            let e2 = match e2_lexicon {
                Some(p) => inputs::load_emoji_lexicon(p)?,
                None => ranking_from_scores(&model, Some(d), &inputs::load_parses(parses)?, "E2")?,
            };
            let mut avg = average_lexica(d, &e2);
            avg.name = "E3".to_string();
            avg
        }
    };
    if let Some(d) = &desc {
        lex.fill_names(&inputs::names_of(d));
    }
    inputs::save_emoji_lexicon(&lex, out)
}

pub fn rank(corpus: &Path, name: &str, out: &Path) -> Result<(), Failure> {
    let docs = inputs::load_corpus(corpus)?;
    let mut labelled = Vec::with_capacity(docs.len());
    for d in &docs {
        match d.label {
            Some(label) => labelled.push((label, extract_emojis(&d.text).iter().map(|o| o.base_key()).collect())),
            None => warn!("{} has no label; skipped", d.id),
        }
    }
    let lex = build_ranking(&labelled, name, LexiconSource::Annotated);
    inputs::save_emoji_lexicon(&lex, out)
}

pub fn eval(pred: &Path, gold: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let predictions = inputs::load_predictions(pred)?;
    let gold_docs = inputs::load_corpus(gold)?;
    let gold_by_id: HashMap<&str, Option<SentimentLabel>> =
        gold_docs.iter().map(|d| (d.id.as_str(), d.label)).collect();
    let mut p = Vec::with_capacity(predictions.len());
    let mut g = Vec::with_capacity(predictions.len());
    for (id, label) in &predictions {
        match gold_by_id.get(id.as_str()) {
            Some(Some(gold_label)) => {
                p.push(*label);
                g.push(*gold_label);
            }
            Some(None) => return Err(Failure::invalid(format!("{}: document {id} has no gold label", gold.display()))),
            None => return Err(Failure::invalid(format!("{}: no gold document {id}", gold.display()))),
        }
    }
    if gold_docs.len() > predictions.len() {
        warn!("{} gold documents have no prediction", gold_docs.len() - predictions.len());
    }
    let cm = confusion(&p, &g).map_err(|e| Failure::invalid(e.to_string()))?;
    let report = metrics(&cm);
    println!("{report}");
    println!("{}", confusion_table(&cm));
    if let Some(path) = out {
        write_with(path, |w| w.write_all(report.to_kv().as_bytes()).map_err(io_fail(path)))?;
    }
    Ok(())
}

pub fn correlate(a: &Path, b: &Path, top_n: usize, scatter: Option<&Path>, out: Option<&Path>) -> Result<(), Failure> {
    let la = inputs::load_emoji_lexicon(a)?;
    let lb = inputs::load_emoji_lexicon(b)?;
    let report = compare_lexica(&la, &lb, top_n).map_err(|e| Failure::invalid(e.to_string()))?;
    println!("{report}");
    if let Some(path) = scatter {
        write_with(path, |w| w.write_all(report.scatter_tsv().as_bytes()).map_err(io_fail(path)))?;
    }
    if let Some(path) = out {
        write_with(path, |w| w.write_all(report.to_kv().as_bytes()).map_err(io_fail(path)))?;
    }
    Ok(())
}

pub fn import_reference(input: &Path, out: &Path) -> Result<(), Failure> {
    let imported =
        import_reference_csv(inputs::open(input)?).map_err(|e| Failure::invalid(format!("{}: {e}", input.display())))?;
    for (row, key, file, recomputed) in &imported.mismatches {
        warn!("row {row}: {key} score {file} differs from recomputed {recomputed:.4}");
    }
    println!("imported {} emojis", imported.lexicon.len());
    inputs::save_emoji_lexicon(&imported.lexicon, out)
}
