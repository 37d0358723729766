//! Emoji description pages: query encoding, a fixture store that doubles as
//! the fetch cache, a polite HTTP fetcher and tolerant HTML extraction.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Mutex, OnceLock};
use std::thread;
use std::time::{Duration, Instant};

use regex::Regex;
use thiserror::Error;

use crate::emoji::EmojiKey;

/// Environment variable overriding the description source.
pub const BASE_URL_ENV: &str = "EMOJIPEDIA_BASE_URL";
pub const DEFAULT_BASE_URL: &str = "https://emojipedia.org";
pub const MIN_DELAY: Duration = Duration::from_secs(1);
pub const MAX_IN_FLIGHT: usize = 2;
pub const MAX_RETRIES: u32 = 3;

#[derive(Debug, Error)]
pub enum PediaError {
    #[error("{0} is not in the fixture store")]
    NotInFixtures(EmojiKey),
    #[error("HTTP status {0}")]
    HttpFailure(u16),
    #[error("no description found in page")]
    NoDescriptionFound,
    #[error("transport error: {0}")]
    Transport(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmojiQuery {
    pub key: EmojiKey,
    pub encoded: String,
}

/// Percent-encodes every UTF-8 byte of the sequence as `%HH`.
pub fn encode_query(key: &EmojiKey) -> EmojiQuery {
    let mut encoded = String::new();
    for b in key.as_text().bytes() {
        encoded.push_str(&format!("%{b:02X}"));
    }
    EmojiQuery { key: key.clone(), encoded }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescriptionRecord {
    pub key: EmojiKey,
    pub short_name: String,
    pub paragraphs: Vec<String>,
    pub fetched_at: String,
    pub source_url: String,
}

impl DescriptionRecord {
    /// Description text: every paragraph, or only the first.
    pub fn text(&self, first_paragraph_only: bool) -> String {
        if first_paragraph_only {
            self.paragraphs.first().cloned().unwrap_or_default()
        } else {
            self.paragraphs.join("\n")
        }
    }
}

// ---------------------------------------------------------------------------
// HTML extraction

fn tag_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"<(/?)([A-Za-z][A-Za-z0-9]*)([^>]*)>").expect("valid regex"))
}

fn comment_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?s)<!--.*?-->|<!\[CDATA\[.*?\]\]>|<![^>]*>").expect("valid regex"))
}

fn entity_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"&(#[0-9]+|#[xX][0-9A-Fa-f]+|[A-Za-z]+);").expect("valid regex"))
}

/// Decodes the common named entities and numeric references. A decoded `<`
/// becomes `‹` so that plain text never carries markup delimiters.
pub fn decode_entities(text: &str) -> String {
    let decoded = entity_regex().replace_all(text, |caps: &regex::Captures| {
        let body = &caps[1];
        let c = if let Some(hex) = body.strip_prefix("#x").or_else(|| body.strip_prefix("#X")) {
            u32::from_str_radix(hex, 16).ok().and_then(char::from_u32)
        } else if let Some(dec) = body.strip_prefix('#') {
            dec.parse().ok().and_then(char::from_u32)
        } else {
            match body {
                "amp" => Some('&'),
                "lt" => Some('<'),
                "gt" => Some('>'),
                "quot" => Some('"'),
                "apos" => Some('\''),
                "nbsp" => Some(' '),
                "ndash" => Some('–'),
                "mdash" => Some('—'),
                "hellip" => Some('…'),
                "lsquo" => Some('‘'),
                "rsquo" => Some('’'),
                "ldquo" => Some('“'),
                "rdquo" => Some('”'),
                _ => None,
            }
        };
        match c {
            Some(c) => c.to_string(),
            None => caps[0].to_string(),
        }
    });
    decoded.replace('<', "‹")
}

fn normalize_ws(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn clean_title(raw: &str) -> String {
    let mut t = normalize_ws(&decode_entities(raw));
    for sep in [" — ", " - ", " | ", " – "] {
        if let Some(i) = t.find(sep) {
            t.truncate(i);
        }
    }
    let t = t.trim_start_matches(|c: char| !c.is_alphanumeric()).trim();
    let t = t.strip_suffix(" Emoji").or_else(|| t.strip_suffix(" emoji")).unwrap_or(t);
    t.trim().to_lowercase()
}

fn is_heading(name: &str) -> bool {
    matches!(name, "h1" | "h2" | "h3" | "h4" | "h5" | "h6")
}

fn is_excluded_heading(text: &str) -> bool {
    text.contains("Copy") || text.contains("Codepoints")
}

/// Short name and description paragraphs of a page.
///
/// Paragraphs are collected from the description section (an element whose
/// class mentions `description`, else the body) up to the first heading
/// mentioning Copy or Codepoints.
pub fn extract_description(html: &str) -> Result<(String, Vec<String>), PediaError> {
    let html = comment_regex().replace_all(html, " ");
    let html = html.as_ref();

    let mut short_name = String::new();
    let mut start = 0;
    let mut description_start = None;
    let mut body_start = None;
    let mut title_open = None;
    for caps in tag_regex().captures_iter(html) {
        let m = caps.get(0).expect("match");
        let name = caps[2].to_ascii_lowercase();
        let closing = !caps[1].is_empty();
        match (name.as_str(), closing) {
            ("title", false) => title_open = Some(m.end()),
            ("title", true) => {
                if let Some(open) = title_open.take() {
                    if short_name.is_empty() {
                        short_name = clean_title(&html[open..m.start()]);
                    }
                }
            }
            ("body", false) if body_start.is_none() => body_start = Some(m.end()),
            (_, false)
                if description_start.is_none()
                    && !matches!(name.as_str(), "meta" | "link")
                    && caps[3].to_ascii_lowercase().contains("description") =>
            {
                description_start = Some(m.end())
            }
            _ => {}
        }
    }
    if let Some(s) = description_start.or(body_start) {
        start = s;
    }

    let mut paragraphs = Vec::new();
    let mut para: Option<String> = None;
    let mut heading: Option<String> = None;
    let mut skip_depth = 0usize;
    let mut cursor = start;
    let flush = |para: &mut Option<String>, paragraphs: &mut Vec<String>| {
        if let Some(p) = para.take() {
            let p = normalize_ws(&decode_entities(&p));
            if !p.is_empty() {
                paragraphs.push(p);
            }
        }
    };
    for caps in tag_regex().captures_iter(&html[start..]) {
        let m = caps.get(0).expect("match");
        let (tag_start, tag_end) = (start + m.start(), start + m.end());
        let text = &html[cursor..tag_start.max(cursor)];
        cursor = tag_end;
        if skip_depth == 0 {
            if let Some(h) = heading.as_mut() {
                h.push_str(text);
            } else if let Some(p) = para.as_mut() {
                p.push_str(text);
            }
        }
        let name = caps[2].to_ascii_lowercase();
        let closing = !caps[1].is_empty();
        match name.as_str() {
            "script" | "style" => {
                if closing {
                    skip_depth = skip_depth.saturating_sub(1);
                } else if !caps[3].trim_end().ends_with('/') {
                    skip_depth += 1;
                }
            }
            _ if skip_depth > 0 => {}
            "p" => {
                flush(&mut para, &mut paragraphs);
                if !closing {
                    para = Some(String::new());
                }
            }
            "br" => {
                if let Some(p) = para.as_mut() {
                    p.push(' ');
                }
            }
            n if is_heading(n) => {
                if closing {
                    if let Some(h) = heading.take() {
                        if is_excluded_heading(&decode_entities(&h)) {
                            break;
                        }
                    }
                } else {
                    flush(&mut para, &mut paragraphs);
                    heading = Some(String::new());
                }
            }
            "div" | "section" | "ul" | "ol" | "li" | "table" | "article" | "footer" | "header" | "nav" => {
                flush(&mut para, &mut paragraphs);
            }
            _ => {
                // inline markup is flattened; keep word boundaries
                if let Some(p) = para.as_mut() {
                    if matches!(name.as_str(), "td" | "th" | "dd" | "dt") {
                        p.push(' ');
                    }
                }
            }
        }
    }
    flush(&mut para, &mut paragraphs);
    if paragraphs.is_empty() {
        return Err(PediaError::NoDescriptionFound);
    }
    Ok((short_name, paragraphs))
}

// ---------------------------------------------------------------------------
// Fixture store

/// Directory of cached pages, `U+XXXX[-U+YYYY].html` plus a `.meta` sidecar
/// of `key=value` lines (`short_name`, `fetched_at`, `source_url`).
#[derive(Debug, Clone)]
pub struct FixtureStore {
    pub dir: PathBuf,
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> PediaError + '_ {
    move |source| PediaError::Io { path: path.to_path_buf(), source }
}

fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), PediaError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("record"),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp).map_err(io_err(&tmp))?;
        f.write_all(contents).map_err(io_err(&tmp))?;
        f.sync_all().map_err(io_err(&tmp))?;
    }
    fs::rename(&tmp, path).map_err(io_err(path))
}

impl FixtureStore {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        FixtureStore { dir: dir.into() }
    }

    pub fn html_path(&self, key: &EmojiKey) -> PathBuf {
        self.dir.join(format!("{}.html", key.file_stem()))
    }

    pub fn meta_path(&self, key: &EmojiKey) -> PathBuf {
        self.dir.join(format!("{}.meta", key.file_stem()))
    }

    pub fn contains(&self, key: &EmojiKey) -> bool {
        self.html_path(key).is_file()
    }

    /// Keys of every cached page, sorted.
    pub fn keys(&self) -> Result<Vec<EmojiKey>, PediaError> {
        let mut keys = Vec::new();
        for entry in fs::read_dir(&self.dir).map_err(io_err(&self.dir))? {
            let entry = entry.map_err(io_err(&self.dir))?;
            let name = entry.file_name();
            let Some(stem) = name.to_str().and_then(|n| n.strip_suffix(".html")) else { continue };
            if let Ok(key) = stem.parse::<EmojiKey>() {
                keys.push(key);
            }
        }
        keys.sort();
        Ok(keys)
    }

    /// Reads a cached record. Never touches the network.
    pub fn load(&self, key: &EmojiKey) -> Result<DescriptionRecord, PediaError> {
        let html_path = self.html_path(key);
        let html = match fs::read_to_string(&html_path) {
            Ok(h) => h,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(PediaError::NotInFixtures(key.clone())),
            Err(e) => return Err(PediaError::Io { path: html_path, source: e }),
        };
        let (title_name, paragraphs) = extract_description(&html)?;
        let mut record = DescriptionRecord {
            key: key.clone(),
            short_name: title_name,
            paragraphs,
            fetched_at: String::new(),
            source_url: String::new(),
        };
        let meta_path = self.meta_path(key);
        if let Ok(meta) = fs::read_to_string(&meta_path) {
            for line in meta.lines() {
                let Some((k, v)) = line.split_once('=') else { continue };
                let v = v.trim().to_string();
                match k.trim() {
                    "short_name" if !v.is_empty() => record.short_name = v,
                    "fetched_at" => record.fetched_at = v,
                    "source_url" => record.source_url = v,
                    _ => {}
                }
            }
        }
        Ok(record)
    }

    /// Stores a fetched page and its metadata, each written atomically.
    pub fn save(&self, record: &DescriptionRecord, html: &str) -> Result<(), PediaError> {
        fs::create_dir_all(&self.dir).map_err(io_err(&self.dir))?;
        write_atomic(&self.html_path(&record.key), html.as_bytes())?;
        let meta = format!(
            "short_name={}\nfetched_at={}\nsource_url={}\n",
            record.short_name, record.fetched_at, record.source_url
        );
        write_atomic(&self.meta_path(&record.key), meta.as_bytes())
    }
}

// ---------------------------------------------------------------------------
// Fetching

/// HTTP client with a shared politeness delay between request starts.
pub struct Fetcher {
    agent: ureq::Agent,
    pub base_url: String,
    delay: Duration,
    next_slot: Mutex<Option<Instant>>,
}

fn is_loopback(url: &str) -> bool {
    let rest = url.split_once("://").map_or(url, |(_, r)| r);
    let host = rest.split(['/', ':']).next().unwrap_or("");
    matches!(host, "localhost" | "127.0.0.1") || rest.starts_with("[::1]")
}

impl Fetcher {
    /// `delay` below one second is honoured only for loopback mirrors.
    pub fn new(base_url: &str, delay: Duration) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(30)))
            .http_status_as_error(false)
            .user_agent("emolex/0.1 (description fetcher)")
            .build()
            .into();
        let base_url = base_url.trim_end_matches('/').to_string();
        let delay = if is_loopback(&base_url) { delay } else { delay.max(MIN_DELAY) };
        Fetcher { agent, base_url, delay, next_slot: Mutex::new(None) }
    }

    /// Base URL from [`BASE_URL_ENV`], else the public site.
    pub fn from_env(delay: Duration) -> Self {
        let base = std::env::var(BASE_URL_ENV).unwrap_or_else(|_| DEFAULT_BASE_URL.to_string());
        Self::new(&base, delay)
    }

    pub fn delay(&self) -> Duration {
        self.delay
    }

    pub fn query_url(&self, key: &EmojiKey) -> String {
        format!("{}/search/?q={}", self.base_url, encode_query(key).encoded)
    }

    fn wait_turn(&self) {
        let wait = {
            let mut slot = self.next_slot.lock().expect("rate limiter poisoned");
            let now = Instant::now();
            let start = slot.map_or(now, |s| s.max(now));
            *slot = Some(start + self.delay);
            start - now
        };
        if !wait.is_zero() {
            thread::sleep(wait);
        }
    }

    /// GETs the page for `key`, retrying server errors with backoff.
    pub fn fetch_html(&self, key: &EmojiKey) -> Result<(String, String), PediaError> {
        let url = self.query_url(key);
        let mut attempt = 0;
        loop {
            self.wait_turn();
            let outcome = match self.agent.get(&url).call() {
                Ok(mut resp) => {
                    let status = resp.status().as_u16();
                    if status == 200 {
                        let body = resp
                            .body_mut()
                            .read_to_string()
                            .map_err(|e| PediaError::Transport(e.to_string()))?;
                        return Ok((body, url));
                    }
                    Err(PediaError::HttpFailure(status))
                }
                Err(e) => Err(PediaError::Transport(e.to_string())),
            };
            let retryable = matches!(outcome, Err(PediaError::HttpFailure(s)) if s >= 500)
                || matches!(outcome, Err(PediaError::Transport(_)));
            if !retryable || attempt >= MAX_RETRIES {
                return outcome;
            }
            attempt += 1;
            log::warn!("{url}: {:?}, retry {attempt}/{MAX_RETRIES}", outcome.as_ref().err());
            thread::sleep(self.delay * (1 << attempt));
        }
    }
}

/// Cache hit, else (when `fetcher` is given) fetch, parse and store.
pub fn fetch_description(
    key: &EmojiKey,
    store: &FixtureStore,
    fetcher: Option<&Fetcher>,
) -> Result<DescriptionRecord, PediaError> {
    match store.load(key) {
        Err(PediaError::NotInFixtures(_)) => {}
        other => return other,
    }
    let Some(fetcher) = fetcher else {
        return Err(PediaError::NotInFixtures(key.clone()));
    };
    let (html, url) = fetcher.fetch_html(key)?;
    let (short_name, paragraphs) = extract_description(&html)?;
    let record = DescriptionRecord {
        key: key.clone(),
        short_name,
        paragraphs,
        fetched_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        source_url: url,
    };
    store.save(&record, &html)?;
    Ok(record)
}

/// Resolves many keys with at most [`MAX_IN_FLIGHT`] requests in flight.
/// Results come back in input order.
pub fn fetch_all(
    keys: &[EmojiKey],
    store: &FixtureStore,
    fetcher: Option<&Fetcher>,
) -> Vec<Result<DescriptionRecord, PediaError>> {
    let next = AtomicUsize::new(0);
    let results: Vec<Mutex<Option<Result<DescriptionRecord, PediaError>>>> =
        keys.iter().map(|_| Mutex::new(None)).collect();
    let workers = MAX_IN_FLIGHT.min(keys.len()).max(1);
    thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= keys.len() {
                    break;
                }
                let r = fetch_description(&keys[i], store, fetcher);
                *results[i].lock().expect("result slot") = Some(r);
            });
        }
    });
    results
        .into_iter()
        .map(|m| m.into_inner().expect("result slot").expect("every key processed"))
        .collect()
}
