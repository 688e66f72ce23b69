//! CMU-dictionary-style pronunciation lexicon.

use std::collections::HashMap;

use super::{parse_err, AlignError};

/// Word -> pronunciation variants, looked up case-insensitively. Variant
/// entries like `WORD(2)` are kept as alternates under the same headword.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: HashMap<String, Vec<Vec<String>>>,
}

impl Lexicon {
    /// All pronunciations for a word, in file order.
    pub fn lookup(&self, word: &str) -> &[Vec<String>] {
        self.entries
            .get(&word.to_lowercase())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Parses rows of `WORD  PH1 PH2 ...`. Comment lines starting with `;;;`
/// and blank lines are skipped.
pub fn parse_lexicon(text: &str) -> Result<Lexicon, AlignError> {
    let mut entries: HashMap<String, Vec<Vec<String>>> = HashMap::new();
    for (zero_line, raw) in text.lines().enumerate() {
        let line_no = zero_line + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with(";;;") {
            continue;
        }
        let mut fields = line.split_whitespace();
        let head = fields.next().ok_or_else(|| parse_err(line_no, "empty row"))?;
        let phones: Vec<String> = fields.map(str::to_string).collect();
        if phones.is_empty() {
            return Err(parse_err(line_no, format!("no phones for word {head:?}")));
        }
        let word = strip_variant(head).to_lowercase();
        if word.is_empty() {
            return Err(parse_err(line_no, format!("bad headword {head:?}")));
        }
        entries.entry(word).or_default().push(phones);
    }
    Ok(Lexicon { entries })
}

/// `WORD(2)` -> `WORD`.
fn strip_variant(head: &str) -> &str {
    match head.find('(') {
        Some(i) if head.ends_with(')') => &head[..i],
        _ => head,
    }
}
