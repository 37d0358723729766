//! Tables shipped with the crate. All of them can be replaced by user files.

pub const DEMO_LEXICON: &str = include_str!("../data/demo_lexicon.tsv");
pub const SHIFTERS: &str = include_str!("../data/shifters.tsv");
pub const ABBREVIATIONS: &str = include_str!("../data/abbreviations.tsv");
pub const GAZETTEER: &str = include_str!("../data/gazetteer.tsv");
pub const KNOWN_WORDS: &str = include_str!("../data/known_words.txt");
