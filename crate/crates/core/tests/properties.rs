use std::collections::HashSet;

use emolex::deptree::{emit_conllu, parse_conllu, ParsedDocument, ParsedSentence, TokenNode};
use emolex::emoji::EmojiKey;
use emolex::emojirank::{
    average_lexica, build_ranking, sentiment_score, smooth, EmojiLexicon, EmojiLexiconEntry, LexiconSource,
    SentimentCounts,
};
use emolex::evalkit::{average_ranks, confusion, metrics, pearson, spearman};
use emolex::label::SentimentLabel;
use emolex::pediaclient::{encode_query, extract_description};
use emolex::textnorm::{extract_emojis, reduce_elongation, tag_embedded_emojis};
use emolex::usspad::{PropagationConfig, Scorer};
use emolex::wordlex::{PolarityLexicon, PosClass, ShifterInventory};
use proptest::prelude::*;

fn counts() -> impl Strategy<Value = SentimentCounts> {
    (0u64..1000, 0u64..1000, 0u64..1000).prop_map(|(a, b, c)| SentimentCounts::new(a, b, c))
}

fn label() -> impl Strategy<Value = SentimentLabel> {
    prop_oneof![Just(SentimentLabel::Negative), Just(SentimentLabel::Neutral), Just(SentimentLabel::Positive)]
}

fn emoji_char() -> impl Strategy<Value = char> {
    (0x1F600u32..0x1F650).prop_map(|c| char::from_u32(c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn smoothed_distribution_is_proper(c in counts()) {
        let d = smooth(c);
        for p in [d.p_neg, d.p_neu, d.p_pos] {
            prop_assert!(p > 0.0 && p < 1.0);
        }
        prop_assert!((d.sum() - 1.0).abs() <= 1e-12);
        let s = sentiment_score(&d);
        prop_assert!(s > -1.0 && s < 1.0);
    }

    #[test]
    fn class_swap_negates_score(c in counts()) {
        prop_assert_eq!(sentiment_score(&smooth(c.swapped())), -sentiment_score(&smooth(c)));
    }

    #[test]
    fn adding_occurrences_moves_score_monotonically(c in counts()) {
        let s = sentiment_score(&smooth(c));
        let with = |l| { let mut c2 = c; c2.add(l); sentiment_score(&smooth(c2)) };
        prop_assert!(with(SentimentLabel::Positive) >= s);
        prop_assert!(with(SentimentLabel::Negative) <= s);
        let n = with(SentimentLabel::Neutral);
        if s == 0.0 {
            prop_assert_eq!(n, 0.0);
        } else {
            prop_assert!(n.abs() < s.abs() && n.signum() == s.signum());
        }
    }

    #[test]
    fn ranking_ignores_document_order(
        docs in prop::collection::vec((label(), prop::collection::vec(emoji_char(), 0..4)), 0..40),
        seed in any::<u64>(),
    ) {
        let corpus: Vec<(SentimentLabel, Vec<EmojiKey>)> = docs
            .iter()
            .map(|(l, cs)| (*l, cs.iter().map(|c| EmojiKey::new(vec![*c]).unwrap()).collect()))
            .collect();
        let mut shuffled = corpus.clone();
        // deterministic rotation + reversal permutation
        let k = if shuffled.is_empty() { 0 } else { (seed as usize) % shuffled.len() };
        shuffled.rotate_left(k);
        shuffled.reverse();
        prop_assert_eq!(
            build_ranking(&corpus, "r", LexiconSource::Annotated),
            build_ranking(&shuffled, "r", LexiconSource::Annotated)
        );
    }

    #[test]
    fn averaging_is_commutative_and_idempotent(
        xs in prop::collection::btree_map(emoji_char(), -0.99f64..0.99, 0..10),
        ys in prop::collection::btree_map(emoji_char(), -0.99f64..0.99, 0..10),
    ) {
        let lex = |m: &std::collections::BTreeMap<char, f64>| {
            let mut l = EmojiLexicon::new("x");
            for (c, s) in m {
                l.insert(EmojiLexiconEntry::from_score(EmojiKey::new(vec![*c]).unwrap(), *s, LexiconSource::Description));
            }
            l
        };
        let (a, b) = (lex(&xs), lex(&ys));
        let ab = average_lexica(&a, &b);
        let ba = average_lexica(&b, &a);
        for e in ab.iter() {
            prop_assert!((ba.get(&e.key).unwrap().score - e.score).abs() <= 1e-15);
            prop_assert!(e.check_invariants().is_ok());
        }
        let aa = average_lexica(&a, &a);
        for e in a.iter() {
            prop_assert!((aa.get(&e.key).unwrap().score - e.score).abs() <= 1e-15);
        }
    }

    #[test]
    fn query_encoding_round_trips(cps in prop::collection::vec(any::<char>(), 1..8)) {
        let key = EmojiKey::new(cps.clone()).unwrap();
        let q = encode_query(&key);
        let decoded: Vec<u8> = percent_encoding::percent_decode_str(&q.encoded).collect();
        let text: String = cps.iter().collect();
        prop_assert_eq!(decoded, text.as_bytes().to_vec());
        prop_assert!(q.encoded.chars().all(|c| c == '%' || c.is_ascii_digit() || c.is_ascii_uppercase()));
    }

    #[test]
    fn pearson_symmetric_bounded_and_affine(
        xy in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 3..30),
        a in 0.1f64..10.0,
        b in -10.0f64..10.0,
    ) {
        let (x, y): (Vec<f64>, Vec<f64>) = xy.into_iter().unzip();
        if let (Ok(r), Ok(r2)) = (pearson(&x, &y), pearson(&y, &x)) {
            prop_assert!((r - r2).abs() <= 1e-9);
            prop_assert!((-1.0..=1.0).contains(&r));
            let ax: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            prop_assert!((pearson(&ax, &y).unwrap() - r).abs() <= 1e-9);
            prop_assert!((pearson(&x, &x).unwrap() - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn spearman_is_pearson_on_ranks(xy in prop::collection::vec((0u8..6, 0u8..6), 3..30)) {
        let x: Vec<f64> = xy.iter().map(|p| p.0 as f64).collect();
        let y: Vec<f64> = xy.iter().map(|p| p.1 as f64).collect();
        match (spearman(&x, &y), pearson(&average_ranks(&x), &average_ranks(&y))) {
            (Ok(s), Ok(p)) => prop_assert_eq!(s, p),
            (Err(e1), Err(e2)) => prop_assert_eq!(e1, e2),
            other => prop_assert!(false, "disagree: {:?}", other),
        }
    }

    #[test]
    fn metrics_ignore_joint_permutation(pairs in prop::collection::vec((label(), label()), 1..40), k in 0usize..40) {
        let (pred, gold): (Vec<_>, Vec<_>) = pairs.iter().copied().unzip();
        let m = metrics(&confusion(&pred, &gold).unwrap());
        let mut rotated = pairs.clone();
        rotated.rotate_left(k % pairs.len());
        let (pred2, gold2): (Vec<_>, Vec<_>) = rotated.into_iter().unzip();
        let m2 = metrics(&confusion(&pred2, &gold2).unwrap());
        prop_assert_eq!(m, m2);
        prop_assert!((0.0..=1.0).contains(&m.accuracy));
        prop_assert!((0.0..=1.0).contains(&m.p_macro) && (0.0..=1.0).contains(&m.f_macro));
    }

    #[test]
    fn extracted_emojis_cover_their_text(parts in prop::collection::vec(
        prop_oneof![
            "[a-z ]{0,5}".prop_map(|s| s),
            emoji_char().prop_map(|c| c.to_string()),
            Just("\u{1F44D}\u{1F3FD}".to_string()),
            Just("\u{1F468}\u{200D}\u{1F4BB}".to_string()),
            Just("\u{1F1EF}\u{1F1F5}".to_string()),
        ], 0..10)) {
        let text: String = parts.concat();
        let chars: Vec<char> = text.chars().collect();
        let mut last_end = 0;
        for occ in extract_emojis(&text) {
            prop_assert!(occ.char_offset >= last_end);
            prop_assert_eq!(&chars[occ.char_offset..occ.char_offset + occ.length], occ.codepoints.as_slice());
            last_end = occ.char_offset + occ.length;
        }
        let tagged = tag_embedded_emojis(&text);
        prop_assert!(extract_emojis(&tagged).is_empty());
    }

    #[test]
    fn elongation_is_idempotent(word in "[a-z]{1,4}", run in 3usize..8, tail in "[a-z]{0,3}") {
        let known: HashSet<String> = ["cool", "good", "so"].iter().map(|s| s.to_string()).collect();
        let last = word.chars().last().unwrap();
        let token = format!("{word}{}{tail}", last.to_string().repeat(run));
        let once = reduce_elongation(&token, &known);
        prop_assert_eq!(reduce_elongation(&once, &known), once.clone());
        prop_assert!(!once.contains(&last.to_string().repeat(3)));
    }

    #[test]
    fn extraction_never_yields_markup(body in "[a-z<>/&; ]{0,60}") {
        let html = format!("<html><body><p>{body}</p></body></html>");
        if let Ok((_, paras)) = extract_description(&html) {
            prop_assert!(paras.iter().all(|p| !p.contains('<')));
        }
    }
}

fn random_tree() -> impl Strategy<Value = Vec<usize>> {
    // head of node i (1-based) is chosen among earlier nodes, then relabeled by a rotation
    (1usize..8).prop_flat_map(|n| {
        (prop::collection::vec(any::<prop::sample::Index>(), n), 0..n).prop_map(move |(picks, rot)| {
            let mut heads = vec![0usize; n];
            for i in 1..n {
                heads[i] = picks[i].index(i) + 1;
            }
            // rotate positions so the root is not always first
            let perm: Vec<usize> = (0..n).map(|i| (i + rot) % n).collect();
            let mut out = vec![0usize; n];
            for old in 0..n {
                out[perm[old]] = if heads[old] == 0 { 0 } else { perm[heads[old] - 1] + 1 };
            }
            out
        })
    })
}

fn word_kind() -> impl Strategy<Value = (bool, i32)> {
    (any::<bool>(), -5i32..=5)
}

fn sentence(heads: &[usize], words: &[(bool, i32)], extra: &[(usize, &str)]) -> ParsedSentence {
    let tokens = heads
        .iter()
        .enumerate()
        .map(|(i, &h)| {
            if let Some((_, lemma)) = extra.iter().find(|(pos, _)| *pos == i) {
                return TokenNode::new(i + 1, lemma, lemma, "RB", h, "advmod");
            }
            let (adj, p) = words[i];
            let lemma = format!("w{p}");
            TokenNode::new(i + 1, &lemma, &lemma, if adj { "JJ" } else { "NN" }, h, "dep")
        })
        .collect();
    ParsedSentence::new(None, tokens).unwrap()
}

fn word_lexicon(sign: f64) -> PolarityLexicon {
    let mut lex = PolarityLexicon::new("w");
    for p in -5..=5 {
        lex.insert(&format!("w{p}"), PosClass::Any, sign * p as f64).unwrap();
    }
    lex
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn negating_the_lexicon_negates_scores(
        heads in random_tree(),
        words in prop::collection::vec(word_kind(), 8),
        intensifier in prop::option::of((0usize..8, prop_oneof![Just("very"), Just("slightly"), Just("extremely")])),
    ) {
        let n = heads.len();
        let extra: Vec<(usize, &str)> = intensifier.into_iter().filter(|(i, _)| *i < n).collect();
        let s = sentence(&heads, &words, &extra);
        let shifters = ShifterInventory::bundled();
        let config = PropagationConfig::default();
        let (pos, neg) = (word_lexicon(1.0), word_lexicon(-1.0));
        let a = Scorer::new(&pos, &shifters, None, &config).score_sentence(&s).value();
        let b = Scorer::new(&neg, &shifters, None, &config).score_sentence(&s).value();
        prop_assert!((a + b).abs() <= 1e-9, "{} vs {}", a, b);
    }

    #[test]
    fn all_zero_polarities_score_zero(heads in random_tree(), neg_at in prop::option::of(0usize..8)) {
        let n = heads.len();
        let words = vec![(true, 0); 8];
        let extra: Vec<(usize, &str)> = neg_at.into_iter().filter(|i| *i < n).map(|i| (i, "not")).collect();
        let s = sentence(&heads, &words, &extra);
        let shifters = ShifterInventory::bundled();
        let config = PropagationConfig::default();
        let lex = word_lexicon(1.0);
        prop_assert_eq!(Scorer::new(&lex, &shifters, None, &config).score_sentence(&s).value(), 0.0);
    }

    #[test]
    fn conllu_round_trips(trees in prop::collection::vec(random_tree(), 1..4)) {
        let words = vec![(true, 1); 8];
        let doc = ParsedDocument {
            id: "d1".into(),
            sentences: trees.iter().enumerate().map(|(k, h)| {
                let s = sentence(h, &words, &[]);
                ParsedSentence::new(Some(format!("d1-{k}")), s.tokens().to_vec()).unwrap()
            }).collect(),
            emoji_tags: vec![],
        };
        let text = emit_conllu(std::slice::from_ref(&doc));
        let back = parse_conllu(&text).unwrap();
        prop_assert_eq!(back, vec![doc]);
    }
}
