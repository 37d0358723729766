use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Three-way sentiment class of a document or an emoji occurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SentimentLabel {
    Negative,
    Neutral,
    Positive,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid sentiment label `{0}` (expected -1, 0 or 1)")]
pub struct LabelParseError(pub String);

impl SentimentLabel {
    pub const ALL: [SentimentLabel; 3] = [Self::Negative, Self::Neutral, Self::Positive];

    pub fn value(self) -> i8 {
        match self {
            Self::Negative => -1,
            Self::Neutral => 0,
            Self::Positive => 1,
        }
    }

    /// Position in `[Negative, Neutral, Positive]`, used for table indexing.
    pub fn index(self) -> usize {
        (self.value() + 1) as usize
    }

    pub fn from_value(value: i8) -> Option<Self> {
        match value {
            -1 => Some(Self::Negative),
            0 => Some(Self::Neutral),
            1 => Some(Self::Positive),
            _ => None,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Self::Negative => Self::Positive,
            Self::Neutral => Self::Neutral,
            Self::Positive => Self::Negative,
        }
    }
}

impl fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

impl FromStr for SentimentLabel {
    type Err = LabelParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "-1" => Ok(Self::Negative),
            "0" => Ok(Self::Neutral),
            "1" | "+1" => Ok(Self::Positive),
            other => Err(LabelParseError(other.to_string())),
        }
    }
}
