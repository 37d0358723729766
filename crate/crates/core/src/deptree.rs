//! Validated dependency trees read from CoNLL-U.

use std::fmt::Write as _;
use std::io::BufRead;
use std::sync::OnceLock;

use regex::Regex;
use thiserror::Error;

use crate::emoji::EmojiKey;
use crate::textnorm::{self, EMOJI_CLOSE, EMOJI_OPEN};

/// POS tag given to tokens that stand for an emoji.
pub const EMOJI_POS: &str = "EMOJI";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenNode {
    /// 1-based position in the sentence.
    pub index: usize,
    pub form: String,
    pub lemma: String,
    pub pos: String,
    /// Index of the governor, 0 for the root.
    pub head: usize,
    pub deprel: String,
}

impl TokenNode {
    pub fn new(index: usize, form: &str, lemma: &str, pos: &str, head: usize, deprel: &str) -> Self {
        TokenNode {
            index,
            form: form.to_string(),
            lemma: lemma.to_string(),
            pos: pos.to_string(),
            head,
            deprel: deprel.to_string(),
        }
    }

    pub fn is_emoji(&self) -> bool {
        self.pos == EMOJI_POS
    }

    /// Lowercased lemma, falling back to the form when the lemma is missing.
    pub fn lookup_lemma(&self) -> String {
        if self.lemma.is_empty() || self.lemma == "_" {
            self.form.to_lowercase()
        } else {
            self.lemma.to_lowercase()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("sentence has no tokens")]
    Empty,
    #[error("token index {found} out of sequence (expected {expected})")]
    NonSequential { expected: usize, found: usize },
    #[error("token {index} has head {head} outside the sentence")]
    DanglingHead { index: usize, head: usize },
    #[error("tokens {first} and {second} are both attached to the root")]
    MultipleRoots { first: usize, second: usize },
    #[error("head relation contains a cycle through token {index}")]
    Cycle { index: usize },
    #[error("token index {0} out of range")]
    IndexOutOfRange(usize),
}

impl TreeError {
    /// Token index the error points at, when it points at one.
    fn token(&self) -> Option<usize> {
        match self {
            TreeError::Empty => None,
            TreeError::NonSequential { found, .. } => Some(*found),
            TreeError::DanglingHead { index, .. } => Some(*index),
            TreeError::MultipleRoots { second, .. } => Some(*second),
            TreeError::Cycle { index } => Some(*index),
            TreeError::IndexOutOfRange(i) => Some(*i),
        }
    }
}

/// A rooted dependency tree over the tokens of one sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedSentence {
    pub id: Option<String>,
    tokens: Vec<TokenNode>,
    /// `children[i]` lists the dependents of token `i` (slot 0 is the virtual root).
    children: Vec<Vec<usize>>,
}

impl ParsedSentence {
    pub fn new(id: Option<String>, tokens: Vec<TokenNode>) -> Result<Self, TreeError> {
        let n = tokens.len();
        if n == 0 {
            return Err(TreeError::Empty);
        }
        for (pos, tok) in tokens.iter().enumerate() {
            if tok.index != pos + 1 {
                return Err(TreeError::NonSequential { expected: pos + 1, found: tok.index });
            }
        }
        let mut root = None;
        for tok in &tokens {
            if tok.head == tok.index {
                return Err(TreeError::Cycle { index: tok.index });
            }
            if tok.head > n {
                return Err(TreeError::DanglingHead { index: tok.index, head: tok.head });
            }
            if tok.head == 0 {
                if let Some(first) = root {
                    return Err(TreeError::MultipleRoots { first, second: tok.index });
                }
                root = Some(tok.index);
            }
        }
        // 0 = unvisited, 1 = on the current path, 2 = reaches the root
        let mut state = vec![0u8; n + 1];
        state[0] = 2;
        for start in 1..=n {
            let mut path = Vec::new();
            let mut cur = start;
            while state[cur] == 0 {
                state[cur] = 1;
                path.push(cur);
                cur = tokens[cur - 1].head;
            }
            if state[cur] == 1 {
                return Err(TreeError::Cycle { index: cur });
            }
            for p in path {
                state[p] = 2;
            }
        }
        if root.is_none() {
            // unreachable for finite trees without a cycle, kept for clarity
            return Err(TreeError::Cycle { index: 1 });
        }
        let mut children = vec![Vec::new(); n + 1];
        for tok in &tokens {
            children[tok.head].push(tok.index);
        }
        Ok(ParsedSentence { id, tokens, children })
    }

    pub fn tokens(&self) -> &[TokenNode] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token at 1-based `index`.
    pub fn token(&self, index: usize) -> Option<&TokenNode> {
        index.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    pub fn root(&self) -> &TokenNode {
        let idx = self.children[0][0];
        &self.tokens[idx - 1]
    }

    /// Dependents of `index` in surface order.
    pub fn children(&self, index: usize) -> Result<Vec<&TokenNode>, TreeError> {
        Ok(self.child_indices(index)?.iter().map(|&c| &self.tokens[c - 1]).collect())
    }

    pub fn child_indices(&self, index: usize) -> Result<&[usize], TreeError> {
        if index == 0 || index > self.tokens.len() {
            return Err(TreeError::IndexOutOfRange(index));
        }
        Ok(&self.children[index])
    }

    /// Number of edges between `index` and the root (root has depth 0).
    pub fn depth(&self, index: usize) -> usize {
        let mut d = 0;
        let mut cur = self.tokens[index - 1].head;
        while cur != 0 {
            d += 1;
            cur = self.tokens[cur - 1].head;
        }
        d
    }

    /// All indices in the subtree rooted at `index` (inclusive), ascending.
    pub fn subtree(&self, index: usize) -> Vec<usize> {
        let mut out = vec![index];
        let mut i = 0;
        while i < out.len() {
            out.extend_from_slice(&self.children[out[i]]);
            i += 1;
        }
        out.sort_unstable();
        out
    }
}

/// An emoji recovered from a `[emoji]…[/emoji]` span or a raw emoji token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmojiTag {
    /// 0-based sentence position in the document.
    pub sentence: usize,
    /// 1-based token index in that sentence.
    pub token: usize,
    pub codepoints: EmojiKey,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParsedDocument {
    pub id: String,
    pub sentences: Vec<ParsedSentence>,
    pub emoji_tags: Vec<EmojiTag>,
}

impl ParsedDocument {
    /// Emoji keys (modifiers stripped) in reading order.
    pub fn emoji_keys(&self) -> Vec<EmojiKey> {
        self.emoji_tags.iter().map(|t| t.codepoints.base()).collect()
    }

    /// Emoji keys attached to one token.
    pub fn emojis_at(&self, sentence: usize, token: usize) -> impl Iterator<Item = &EmojiKey> {
        self.emoji_tags.iter().filter(move |t| t.sentence == sentence && t.token == token).map(|t| &t.codepoints)
    }
}

// ---------------------------------------------------------------------------
// CoNLL-U

#[derive(Debug, Error)]
pub enum ConlluError {
    #[error("line {line} (sentence {sent}): malformed line: {reason}")]
    MalformedLine { line: usize, sent: String, reason: String },
    #[error("line {line} (sentence {sent}): dependency cycle")]
    CycleDetected { line: usize, sent: String },
    #[error("line {line} (sentence {sent}): more than one root")]
    MultipleRoots { line: usize, sent: String },
    #[error("line {line} (sentence {sent}): head points outside the sentence")]
    DanglingHead { line: usize, sent: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

struct PendingSentence {
    id: Option<String>,
    tokens: Vec<TokenNode>,
    lines: Vec<usize>,
    start_line: usize,
}

impl PendingSentence {
    fn label(&self) -> String {
        self.id.clone().unwrap_or_else(|| format!("starting at line {}", self.start_line))
    }
}

#[derive(Default)]
struct DocBuilder {
    docs: Vec<ParsedDocument>,
    /// True while sentences are being collected under an explicit `newdoc`.
    explicit: bool,
}

impl DocBuilder {
    fn push_sentence(&mut self, sentence: ParsedSentence) {
        if !self.explicit {
            let id = sentence.id.clone().unwrap_or_else(|| format!("s{}", self.docs.len() + 1));
            self.docs.push(ParsedDocument { id, ..Default::default() });
        }
        self.docs.last_mut().expect("a document is open").sentences.push(sentence);
    }
}

fn finish_sentence(pending: &mut Option<PendingSentence>, builder: &mut DocBuilder) -> Result<(), ConlluError> {
    let Some(p) = pending.take() else { return Ok(()) };
    if p.tokens.is_empty() {
        return Ok(());
    }
    let sent = p.label();
    let line_of = |err: &TreeError| {
        err.token().and_then(|t| p.lines.get(t.wrapping_sub(1)).copied()).unwrap_or(p.start_line)
    };
    match ParsedSentence::new(p.id.clone(), p.tokens.clone()) {
        Ok(s) => {
            builder.push_sentence(s);
            Ok(())
        }
        Err(e) => {
            let line = line_of(&e);
            Err(match e {
                TreeError::Cycle { .. } => ConlluError::CycleDetected { line, sent },
                TreeError::MultipleRoots { .. } => ConlluError::MultipleRoots { line, sent },
                TreeError::DanglingHead { .. } => ConlluError::DanglingHead { line, sent },
                other => ConlluError::MalformedLine { line, sent, reason: other.to_string() },
            })
        }
    }
}

/// Reads CoNLL-U. `# newdoc id = …` starts a document that collects the
/// following sentences; sentences before any `newdoc` each form their own
/// document named after their `sent_id`. Multiword ranges and empty nodes
/// are skipped. XPOS is preferred over UPOS when both are present.
pub fn parse_conllu(input: &str) -> Result<Vec<ParsedDocument>, ConlluError> {
    read_conllu(input.as_bytes())
}

pub fn read_conllu<R: BufRead>(reader: R) -> Result<Vec<ParsedDocument>, ConlluError> {
    let mut builder = DocBuilder::default();
    let mut pending: Option<PendingSentence> = None;
    let mut next_sent_id: Option<String> = None;

    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        let lineno = i + 1;
        if line.trim().is_empty() {
            finish_sentence(&mut pending, &mut builder)?;
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(id) = comment.strip_prefix("newdoc id").map(|r| r.trim_start().trim_start_matches('=').trim()) {
                finish_sentence(&mut pending, &mut builder)?;
                builder.docs.push(ParsedDocument { id: id.to_string(), ..Default::default() });
                builder.explicit = true;
            } else if comment.starts_with("newdoc") {
                finish_sentence(&mut pending, &mut builder)?;
                let id = format!("doc{}", builder.docs.len() + 1);
                builder.docs.push(ParsedDocument { id, ..Default::default() });
                builder.explicit = true;
            } else if let Some(id) = comment.strip_prefix("sent_id").map(|r| r.trim_start().trim_start_matches('=').trim()) {
                if let Some(p) = pending.as_mut().filter(|p| p.tokens.is_empty()) {
                    p.id = Some(id.to_string());
                } else {
                    next_sent_id = Some(id.to_string());
                }
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let p = pending.get_or_insert_with(|| PendingSentence {
            id: next_sent_id.take(),
            tokens: Vec::new(),
            lines: Vec::new(),
            start_line: lineno,
        });
        if cols.len() != 10 {
            return Err(ConlluError::MalformedLine {
                line: lineno,
                sent: p.label(),
                reason: format!("expected 10 tab-separated columns, found {}", cols.len()),
            });
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let malformed = |reason: String| ConlluError::MalformedLine { line: lineno, sent: p.label(), reason };
        let index: usize = cols[0].parse().map_err(|_| malformed(format!("bad ID `{}`", cols[0])))?;
        let head: usize = cols[6].parse().map_err(|_| malformed(format!("bad HEAD `{}`", cols[6])))?;
        if index != p.tokens.len() + 1 {
            return Err(malformed(format!("ID {} out of sequence", index)));
        }
        let pos = if cols[4] != "_" { cols[4] } else { cols[3] };
        p.tokens.push(TokenNode::new(index, cols[1], cols[2], pos, head, cols[7]));
        p.lines.push(lineno);
    }
    finish_sentence(&mut pending, &mut builder)?;
    Ok(builder.docs)
}

/// Writes documents as CoNLL-U. The single POS tag goes to the XPOS column.
pub fn emit_conllu(docs: &[ParsedDocument]) -> String {
    let mut out = String::new();
    for doc in docs {
        let _ = writeln!(out, "# newdoc id = {}", doc.id);
        for sentence in &doc.sentences {
            if let Some(id) = &sentence.id {
                let _ = writeln!(out, "# sent_id = {id}");
            }
            for t in sentence.tokens() {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t_\t{}\t_\t{}\t{}\t_\t_",
                    t.index,
                    t.form,
                    if t.lemma.is_empty() { "_" } else { &t.lemma },
                    if t.pos.is_empty() { "_" } else { &t.pos },
                    t.head,
                    if t.deprel.is_empty() { "_" } else { &t.deprel },
                );
            }
            out.push('\n');
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Emoji tag recovery

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmojiTagError {
    #[error("document {doc}, sentence {sentence}: `[emoji]` at token {token} is never closed")]
    UnclosedEmojiTag { doc: String, sentence: usize, token: usize },
    #[error("document {doc}, sentence {sentence}: emoji tag at token {token} holds no codepoint")]
    EmptyEmojiTag { doc: String, sentence: usize, token: usize },
}

fn codepoint_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[Uu]\+([0-9A-Fa-f]{4,6})").expect("valid regex"))
}

fn tag_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\[emoji\](.*?)\[/emoji\]").expect("valid regex"))
}

/// Codepoint keys inside every `[emoji]…[/emoji]` pair of `text`. `None` if a pair is empty.
fn keys_in_tags(text: &str) -> Option<Vec<EmojiKey>> {
    let mut keys = Vec::new();
    for caps in tag_regex().captures_iter(text) {
        let cps: Vec<char> = codepoint_regex()
            .captures_iter(&caps[1])
            .filter_map(|c| u32::from_str_radix(&c[1], 16).ok().and_then(char::from_u32))
            .collect();
        keys.push(EmojiKey::new(cps)?);
    }
    if keys.is_empty() {
        None
    } else {
        Some(keys)
    }
}

/// Emoji keys carried by the form of an emoji token: tagged codepoints, raw
/// emoji, or failing both the lemma read as one codepoint sequence.
pub fn emoji_keys_of_form(form: &str, lemma: &str) -> Vec<EmojiKey> {
    if let Some(keys) = keys_in_tags(form) {
        return keys;
    }
    let raw = textnorm::extract_emojis(form);
    if !raw.is_empty() {
        return raw.iter().map(|o| o.key()).collect();
    }
    lemma.parse::<EmojiKey>().map(|k| vec![k]).unwrap_or_default()
}

struct Span {
    start: usize,
    end: usize,
    form: String,
    keys: Vec<EmojiKey>,
}

/// Collapses `[emoji] U+XXXX [/emoji]` spans, however the tokenizer split
/// them, into one token tagged [`EMOJI_POS`], and tags tokens made only of raw
/// emoji. The merged token keeps the attachment of the span's shallowest token.
pub fn recover_emoji_tokens(doc: ParsedDocument) -> Result<ParsedDocument, EmojiTagError> {
    let mut sentences = Vec::with_capacity(doc.sentences.len());
    let mut tags = Vec::new();
    for (si, sentence) in doc.sentences.into_iter().enumerate() {
        let tokens = sentence.tokens();
        let n = tokens.len();
        let mut spans: Vec<Span> = Vec::new();
        let mut i = 0;
        while i < n {
            if tokens[i].is_emoji() {
                i += 1;
                continue;
            }
            let first = tokens[i].form.as_str();
            let may_open = !first.is_empty() && (EMOJI_OPEN.starts_with(first) || first.starts_with(EMOJI_OPEN));
            if may_open {
                let mut acc = String::new();
                let mut j = i;
                let opened = loop {
                    acc.push_str(&tokens[j].form);
                    if acc.starts_with(EMOJI_OPEN) {
                        break true;
                    }
                    if !EMOJI_OPEN.starts_with(acc.as_str()) || j + 1 == n {
                        break false;
                    }
                    j += 1;
                };
                if opened {
                    while !acc[EMOJI_OPEN.len()..].contains(EMOJI_CLOSE) {
                        j += 1;
                        if j == n {
                            return Err(EmojiTagError::UnclosedEmojiTag { doc: doc.id, sentence: si, token: i + 1 });
                        }
                        acc.push_str(&tokens[j].form);
                    }
                    let keys = keys_in_tags(&acc).ok_or_else(|| EmojiTagError::EmptyEmojiTag {
                        doc: doc.id.clone(),
                        sentence: si,
                        token: i + 1,
                    })?;
                    spans.push(Span { start: i, end: j, form: acc, keys });
                    i = j + 1;
                    continue;
                }
            }
            let raw = textnorm::extract_emojis(first);
            let covered: usize = raw.iter().map(|o| o.length).sum();
            if !raw.is_empty() && covered == first.chars().count() {
                spans.push(Span {
                    start: i,
                    end: i,
                    form: first.to_string(),
                    keys: raw.iter().map(|o| o.key()).collect(),
                });
            }
            i += 1;
        }
        if spans.is_empty() {
            sentences.push(sentence);
            continue;
        }

        // old 1-based index -> new 1-based index
        let mut new_index = vec![0usize; n + 1];
        let mut representative = vec![true; n + 1];
        let mut span_of = vec![None; n + 1];
        for (k, span) in spans.iter().enumerate() {
            let members = (span.start + 1)..=(span.end + 1);
            let rep = members
                .clone()
                .min_by_key(|&m| (sentence.depth(m), m))
                .expect("span is nonempty");
            for m in members {
                representative[m] = m == rep;
                span_of[m] = Some(k);
            }
        }
        let mut next = 0;
        for old in 1..=n {
            if representative[old] {
                next += 1;
            }
            new_index[old] = next;
        }
        // members of a span all map onto the representative's slot
        for span in &spans {
            let members = (span.start + 1)..=(span.end + 1);
            let rep = members.clone().find(|&m| representative[m]).expect("one representative");
            for m in members {
                new_index[m] = new_index[rep];
            }
        }
        let mut rebuilt = Vec::with_capacity(next);
        for old in 1..=n {
            if !representative[old] {
                continue;
            }
            let tok = &tokens[old - 1];
            let head = if tok.head == 0 { 0 } else { new_index[tok.head] };
            let idx = new_index[old];
            match span_of[old] {
                Some(k) => {
                    let span = &spans[k];
                    for key in &span.keys {
                        tags.push(EmojiTag { sentence: si, token: idx, codepoints: key.clone() });
                    }
                    let lemma = span.keys.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" ");
                    rebuilt.push(TokenNode::new(idx, &span.form, &lemma, EMOJI_POS, head, &tok.deprel));
                }
                None => rebuilt.push(TokenNode { index: idx, head, ..tok.clone() }),
            }
        }
        let rebuilt = ParsedSentence::new(sentence.id.clone(), rebuilt)
            .expect("merging at the shallowest span token preserves the tree");
        sentences.push(rebuilt);
    }
    let mut emoji_tags = doc.emoji_tags;
    emoji_tags.extend(tags);
    Ok(ParsedDocument { id: doc.id, sentences, emoji_tags })
}

/// Degraded fallback when no external parser is available: one sentence
/// per text, every token attached to the first token `tagger` marks as a verb
/// (or to token 1 when there is none). `tagger` maps a lowercased word to a
/// coarse tag such as `ADJ` or `VERB`. Surrounding ASCII punctuation is
/// split off into `PUNCT` tokens.
pub fn plain_heuristic_parse(id: &str, text: &str, tagger: &dyn Fn(&str) -> Option<&'static str>) -> ParsedDocument {
    let mut forms: Vec<String> = Vec::new();
    for raw in text.split_whitespace() {
        if raw.starts_with(EMOJI_OPEN) || raw.contains(EMOJI_CLOSE) {
            forms.push(raw.to_string());
            continue;
        }
        let lead: String = raw.chars().take_while(|c| c.is_ascii_punctuation()).collect();
        let rest = &raw[lead.len()..];
        let core_len = rest.trim_end_matches(|c: char| c.is_ascii_punctuation()).len();
        let (core, trail) = rest.split_at(core_len);
        forms.extend(lead.chars().map(String::from));
        if !core.is_empty() {
            forms.push(core.to_string());
        }
        forms.extend(trail.chars().map(String::from));
    }
    if forms.is_empty() {
        return ParsedDocument { id: id.to_string(), ..Default::default() };
    }
    let tags: Vec<&str> = forms
        .iter()
        .map(|f| {
            if f.chars().all(|c| c.is_ascii_punctuation()) {
                "PUNCT"
            } else {
                tagger(&f.to_lowercase()).unwrap_or("X")
            }
        })
        .collect();
    let anchor = tags.iter().position(|t| *t == "VERB").map_or(1, |p| p + 1);
    let tokens: Vec<TokenNode> = forms
        .iter()
        .zip(&tags)
        .enumerate()
        .map(|(i, (f, pos))| {
            let index = i + 1;
            let (head, rel) = if index == anchor { (0, "root") } else { (anchor, "dep") };
            TokenNode::new(index, f, &f.to_lowercase(), pos, head, rel)
        })
        .collect();
    let sentence = ParsedSentence::new(Some(format!("{id}-1")), tokens).expect("flat tree is valid");
    ParsedDocument { id: id.to_string(), sentences: vec![sentence], emoji_tags: Vec::new() }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LAUGHING: &str = "\
# newdoc id = U+1F602
# sent_id = 1
1\tA\ta\tDET\tDT\t_\t3\tdet\t_\t_
2\tlaughing\tlaugh\tVERB\tVBG\t_\t3\tamod\t_\t_
3\temoji\temoji\tNOUN\tNN\t_\t0\troot\t_\t_

";

    #[test]
    fn parses_running_example() {
        let docs = parse_conllu(LAUGHING).unwrap();
        assert_eq!(docs.len(), 1);
        assert_eq!(docs[0].id, "U+1F602");
        let s = &docs[0].sentences[0];
        assert_eq!(s.root().form, "emoji");
        assert_eq!(s.root().pos, "NN");
        let kids: Vec<&str> = s.children(3).unwrap().iter().map(|t| t.form.as_str()).collect();
        assert_eq!(kids, vec!["A", "laughing"]);
        let laughing = s.token(2).unwrap();
        assert_eq!((laughing.lemma.as_str(), laughing.pos.as_str()), ("laugh", "VBG"));
    }

    #[test]
    fn empty_stream() {
        assert!(parse_conllu("").unwrap().is_empty());
    }

    #[test]
    fn self_head_is_cycle() {
        let bad = "1\ta\ta\t_\tDT\t_\t1\tdep\t_\t_\n";
        assert!(matches!(parse_conllu(bad), Err(ConlluError::CycleDetected { line: 1, .. })));
    }

    #[test]
    fn tree_errors_carry_location() {
        let two_roots = "# sent_id = s9\n1\ta\ta\t_\tDT\t_\t0\tdep\t_\t_\n2\tb\tb\t_\tNN\t_\t0\troot\t_\t_\n";
        match parse_conllu(two_roots) {
            Err(ConlluError::MultipleRoots { line, sent }) => {
                assert_eq!(line, 3);
                assert_eq!(sent, "s9");
            }
            other => panic!("unexpected {other:?}"),
        }
        let dangling = "1\ta\ta\t_\tDT\t_\t5\tdep\t_\t_\n";
        assert!(matches!(parse_conllu(dangling), Err(ConlluError::DanglingHead { line: 1, .. })));
        let short = "1\ta\ta\t_\tDT\n";
        assert!(matches!(parse_conllu(short), Err(ConlluError::MalformedLine { line: 1, .. })));
        let cycle = "1\ta\ta\t_\tDT\t_\t2\tdep\t_\t_\n2\tb\tb\t_\tNN\t_\t1\tdep\t_\t_\n3\tc\tc\t_\tNN\t_\t0\troot\t_\t_\n";
        assert!(matches!(parse_conllu(cycle), Err(ConlluError::CycleDetected { .. })));
    }

    #[test]
    fn skips_ranges_and_empty_nodes() {
        let input = "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n1\tdo\tdo\tAUX\tVBP\t_\t3\taux\t_\t_\n2\tn't\tnot\tPART\tRB\t_\t3\tadvmod\t_\t_\n2.1\tx\tx\t_\t_\t_\t_\t_\t_\t_\n3\tgo\tgo\tVERB\t_\t_\t0\troot\t_\t_\n";
        let docs = parse_conllu(input).unwrap();
        let s = &docs[0].sentences[0];
        assert_eq!(s.len(), 3);
        // UPOS fallback when XPOS is absent
        assert_eq!(s.token(3).unwrap().pos, "VERB");
    }

    #[test]
    fn children_errors_and_leaves() {
        let docs = parse_conllu(LAUGHING).unwrap();
        let s = &docs[0].sentences[0];
        assert!(s.children(1).unwrap().is_empty());
        assert_eq!(s.children(4), Err(TreeError::IndexOutOfRange(4)));
        assert_eq!(s.children(0), Err(TreeError::IndexOutOfRange(0)));
        let total: usize = (1..=s.len()).map(|i| s.children(i).unwrap().len()).sum();
        assert_eq!(total + 1, s.len());
    }

    #[test]
    fn sentences_without_newdoc_are_documents() {
        let input = "# sent_id = a\n1\tx\tx\t_\tNN\t_\t0\troot\t_\t_\n\n# sent_id = b\n1\ty\ty\t_\tNN\t_\t0\troot\t_\t_\n";
        let docs = parse_conllu(input).unwrap();
        assert_eq!(docs.iter().map(|d| d.id.as_str()).collect::<Vec<_>>(), vec!["a", "b"]);
    }

    fn sentence(forms: &[(&str, usize)]) -> ParsedDocument {
        let tokens = forms
            .iter()
            .enumerate()
            .map(|(i, (f, h))| TokenNode::new(i + 1, f, f, "NN", *h, "dep"))
            .collect();
        ParsedDocument {
            id: "d".into(),
            sentences: vec![ParsedSentence::new(None, tokens).unwrap()],
            emoji_tags: vec![],
        }
    }

    #[test]
    fn recovers_split_tag() {
        // sadness [emoji] U+1F62D [/emoji]
        let doc = sentence(&[("sadness", 0), ("[emoji]", 3), ("U+1F62D", 1), ("[/emoji]", 3)]);
        let out = recover_emoji_tokens(doc).unwrap();
        let s = &out.sentences[0];
        assert_eq!(s.len(), 2);
        let emoji = s.token(2).unwrap();
        assert_eq!(emoji.pos, EMOJI_POS);
        assert_eq!(emoji.head, 1);
        assert_eq!(out.emoji_tags.len(), 1);
        assert_eq!(out.emoji_tags[0].codepoints.to_string(), "U+1F62D");
        assert_eq!(out.emoji_tags[0].token, 2);
    }

    #[test]
    fn recovers_bracket_split_and_glued_tags() {
        let doc = sentence(&[
            ("see", 0),
            ("[", 1),
            ("emoji", 2),
            ("]", 2),
            ("U+1F602", 2),
            ("[", 2),
            ("/emoji", 2),
            ("]", 2),
            ("and", 1),
            ("[emoji]U+1F62D[/emoji]", 9),
        ]);
        let out = recover_emoji_tokens(doc).unwrap();
        let s = &out.sentences[0];
        assert_eq!(s.len(), 4);
        assert_eq!(s.tokens().iter().filter(|t| t.is_emoji()).count(), 2);
        assert_eq!(s.token(4).unwrap().head, 3);
        let keys: Vec<String> = out.emoji_tags.iter().map(|t| t.codepoints.to_string()).collect();
        assert_eq!(keys, vec!["U+1F602", "U+1F62D"]);
    }

    #[test]
    fn no_tags_is_identity() {
        let doc = parse_conllu(LAUGHING).unwrap().remove(0);
        assert_eq!(recover_emoji_tokens(doc.clone()).unwrap(), doc);
    }

    #[test]
    fn unclosed_tag() {
        let doc = sentence(&[("x", 0), ("[emoji]", 1), ("U+1F62D", 1)]);
        assert!(matches!(
            recover_emoji_tokens(doc),
            Err(EmojiTagError::UnclosedEmojiTag { token: 2, .. })
        ));
    }

    #[test]
    fn raw_emoji_tokens_are_tagged() {
        let doc = sentence(&[("love", 0), ("😂", 1)]);
        let out = recover_emoji_tokens(doc).unwrap();
        assert!(out.sentences[0].token(2).unwrap().is_emoji());
        assert_eq!(out.emoji_keys()[0].to_string(), "U+1F602");
    }

    #[test]
    fn root_inside_span_stays_root() {
        // the tag token that is the root represents the whole span
        let doc = sentence(&[("[emoji]", 2), ("U+1F62D", 0), ("[/emoji]", 2), ("wow", 2)]);
        let out = recover_emoji_tokens(doc).unwrap();
        let s = &out.sentences[0];
        assert_eq!(s.root().pos, EMOJI_POS);
        assert_eq!(s.token(2).unwrap().head, 1);
    }

    #[test]
    fn heuristic_parse_is_flat() {
        let tagger = |w: &str| if w == "love" { Some("VERB") } else { None };
        let doc = plain_heuristic_parse("d", "I love it, [emoji]U+1F602[/emoji]!", &tagger);
        let s = &doc.sentences[0];
        let forms: Vec<&str> = s.tokens().iter().map(|t| t.form.as_str()).collect();
        assert_eq!(forms, vec!["I", "love", "it", ",", "[emoji]U+1F602[/emoji]!"]);
        assert_eq!(s.root().form, "love");
        assert!(s.tokens().iter().filter(|t| t.index != 2).all(|t| t.head == 2));
        assert_eq!(s.token(4).unwrap().pos, "PUNCT");

        let flat = plain_heuristic_parse("d", "no verbs here", &|_: &str| None);
        assert_eq!(flat.sentences[0].root().index, 1);
    }
}
