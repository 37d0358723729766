//! Bundled emoji range table and the codepoint-sequence key used by every lexicon.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Identifies the range table below. Bump when the ranges change so that
/// lexica built with different tables can be told apart.
pub const RANGE_TABLE_VERSION: &str = "emolex-ranges-1 (Unicode 13.0 pictographic blocks)";

/// Scalars that start an emoji occurrence. Sorted, non-overlapping, inclusive.
const BASE_RANGES: &[(u32, u32)] = &[
    (0x2194, 0x2199),
    (0x21A9, 0x21AA),
    (0x231A, 0x231B),
    (0x2328, 0x2328),
    (0x23CF, 0x23CF),
    (0x23E9, 0x23F3),
    (0x23F8, 0x23FA),
    (0x25AA, 0x25AB),
    (0x25B6, 0x25B6),
    (0x25C0, 0x25C0),
    (0x25FB, 0x25FE),
    (0x2600, 0x26FF), // Miscellaneous Symbols
    (0x2700, 0x27BF), // Dingbats
    (0x2934, 0x2935),
    (0x2B05, 0x2B07),
    (0x2B1B, 0x2B1C),
    (0x2B50, 0x2B50),
    (0x2B55, 0x2B55),
    (0x3030, 0x3030),
    (0x303D, 0x303D),
    (0x3297, 0x3297),
    (0x3299, 0x3299),
    (0x1F004, 0x1F004),
    (0x1F0CF, 0x1F0CF),
    (0x1F170, 0x1F1FF), // enclosed alphanumerics, regional indicators
    (0x1F201, 0x1F251),
    (0x1F300, 0x1F5FF), // Miscellaneous Symbols and Pictographs
    (0x1F600, 0x1F64F), // Emoticons
    (0x1F680, 0x1F6FF), // Transport and Map Symbols
    (0x1F7E0, 0x1F7EB),
    (0x1F90C, 0x1F9FF), // Supplemental Symbols and Pictographs
    (0x1FA70, 0x1FAFF), // Symbols and Pictographs Extended-A
];

pub const ZWJ: char = '\u{200D}';
pub const VS15: char = '\u{FE0E}';
pub const VS16: char = '\u{FE0F}';
pub const KEYCAP: char = '\u{20E3}';

fn in_ranges(c: char, ranges: &[(u32, u32)]) -> bool {
    let cp = c as u32;
    ranges
        .binary_search_by(|&(lo, hi)| {
            if hi < cp {
                std::cmp::Ordering::Less
            } else if lo > cp {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Equal
            }
        })
        .is_ok()
}

/// Fitzpatrick skin tone modifiers U+1F3FB..U+1F3FF.
pub fn is_skin_tone(c: char) -> bool {
    ('\u{1F3FB}'..='\u{1F3FF}').contains(&c)
}

pub fn is_regional_indicator(c: char) -> bool {
    ('\u{1F1E6}'..='\u{1F1FF}').contains(&c)
}

/// Tag characters used by subdivision flags.
pub fn is_tag(c: char) -> bool {
    ('\u{E0020}'..='\u{E007F}').contains(&c)
}

/// Scalars that attach to a preceding base without starting an occurrence.
pub fn is_modifier(c: char) -> bool {
    is_skin_tone(c) || c == VS15 || c == VS16 || c == KEYCAP || is_tag(c)
}

/// True for any scalar in the emoji range table (including skin tones).
pub fn is_emoji_scalar(c: char) -> bool {
    in_ranges(c, BASE_RANGES)
}

/// Ordered codepoint sequence identifying an emoji.
///
/// Written as space-separated `U+XXXX` items, e.g. `U+1F468 U+200D U+1F469`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EmojiKey(Vec<char>);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KeyParseError {
    #[error("empty codepoint sequence")]
    Empty,
    #[error("malformed codepoint `{0}` (expected U+XXXX)")]
    Malformed(String),
}

impl EmojiKey {
    pub fn new(codepoints: Vec<char>) -> Option<Self> {
        if codepoints.is_empty() {
            None
        } else {
            Some(EmojiKey(codepoints))
        }
    }

    pub fn from_str_chars(s: &str) -> Option<Self> {
        Self::new(s.chars().collect())
    }

    pub fn codepoints(&self) -> &[char] {
        &self.0
    }

    /// Key with skin tones, variation selectors and tag characters removed.
    /// Lexicon entries aggregate across these presentational variants.
    pub fn base(&self) -> EmojiKey {
        let stripped: Vec<char> = self
            .0
            .iter()
            .copied()
            .filter(|&c| !(is_skin_tone(c) || c == VS15 || c == VS16 || is_tag(c)))
            .collect();
        if stripped.is_empty() {
            // a lone modifier keeps itself as its key
            self.clone()
        } else {
            EmojiKey(stripped)
        }
    }

    /// The emoji as a string of scalars.
    pub fn as_text(&self) -> String {
        self.0.iter().collect()
    }

    /// Codepoints joined by `-`, used for fixture file names.
    pub fn file_stem(&self) -> String {
        self.0
            .iter()
            .map(|c| format!("U+{:04X}", *c as u32))
            .collect::<Vec<_>>()
            .join("-")
    }
}

impl fmt::Display for EmojiKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "U+{:04X}", *c as u32)?;
        }
        Ok(())
    }
}

/// Parses one `U+XXXX` (also accepts `0xXXXX`) item.
pub fn parse_codepoint(item: &str) -> Result<char, KeyParseError> {
    let hex = item
        .strip_prefix("U+")
        .or_else(|| item.strip_prefix("u+"))
        .or_else(|| item.strip_prefix("0x"))
        .or_else(|| item.strip_prefix("0X"))
        .ok_or_else(|| KeyParseError::Malformed(item.to_string()))?;
    if hex.is_empty() || hex.len() > 6 {
        return Err(KeyParseError::Malformed(item.to_string()));
    }
    u32::from_str_radix(hex, 16)
        .ok()
        .and_then(char::from_u32)
        .ok_or_else(|| KeyParseError::Malformed(item.to_string()))
}

impl FromStr for EmojiKey {
    type Err = KeyParseError;

    /// Accepts space- or dash-separated `U+XXXX` items.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let cps = s
            .split(|c: char| c.is_whitespace() || c == '-')
            .filter(|t| !t.is_empty())
            .map(parse_codepoint)
            .collect::<Result<Vec<_>, _>>()?;
        EmojiKey::new(cps).ok_or(KeyParseError::Empty)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_are_sorted_and_disjoint() {
        for w in BASE_RANGES.windows(2) {
            assert!(w[0].0 <= w[0].1);
            assert!(w[0].1 < w[1].0, "{:X?} overlaps {:X?}", w[0], w[1]);
        }
    }

    #[test]
    fn classification() {
        assert!(is_emoji_scalar('😂'));
        assert!(is_emoji_scalar('❤'));
        assert!(is_emoji_scalar('✨'));
        assert!(!is_emoji_scalar('a'));
        assert!(!is_emoji_scalar('©'));
        assert!(is_modifier('\u{1F3FD}'));
        assert!(is_modifier(VS16));
        assert!(!is_modifier(ZWJ));
    }

    #[test]
    fn key_display_and_parse() {
        let key = EmojiKey::from_str_chars("😂").unwrap();
        assert_eq!(key.to_string(), "U+1F602");
        assert_eq!("U+1F602".parse::<EmojiKey>().unwrap(), key);
        assert_eq!("0x1f602".parse::<EmojiKey>().unwrap(), key);
        let seq: EmojiKey = "U+2764 U+FE0F".parse().unwrap();
        assert_eq!(seq.file_stem(), "U+2764-U+FE0F");
        assert_eq!("U+2764-U+FE0F".parse::<EmojiKey>().unwrap(), seq);
        assert_eq!(seq.base().to_string(), "U+2764");
        assert!("".parse::<EmojiKey>().is_err());
        assert!("U+ZZ".parse::<EmojiKey>().is_err());
        assert!("U+D800".parse::<EmojiKey>().is_err());
    }

    #[test]
    fn base_strips_skin_tone_but_keeps_zwj() {
        let key = EmojiKey::new(vec!['\u{1F468}', '\u{1F3FD}', ZWJ, '\u{1F4BB}']).unwrap();
        assert_eq!(key.base().codepoints(), &['\u{1F468}', ZWJ, '\u{1F4BB}']);
        let lone = EmojiKey::new(vec!['\u{1F3FB}']).unwrap();
        assert_eq!(lone.base(), lone);
    }
}
