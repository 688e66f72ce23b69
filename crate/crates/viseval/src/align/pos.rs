//! Ingested part-of-speech tags, one per word token.

use serde::{Deserialize, Serialize};

use super::{parse_err, AlignError};

/// The five target classes plus a catch-all for everything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PosTag {
    Noun,
    Pron,
    Verb,
    Adj,
    Det,
    Other,
}

impl PosTag {
    /// Tags outside the five target classes normalize to `Other`.
    pub fn parse(s: &str) -> PosTag {
        match s {
            "NOUN" => PosTag::Noun,
            "PRON" => PosTag::Pron,
            "VERB" => PosTag::Verb,
            "ADJ" => PosTag::Adj,
            "DET" => PosTag::Det,
            _ => PosTag::Other,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            PosTag::Noun => "NOUN",
            PosTag::Pron => "PRON",
            PosTag::Verb => "VERB",
            PosTag::Adj => "ADJ",
            PosTag::Det => "DET",
            PosTag::Other => "OTHER",
        }
    }
}

impl std::fmt::Display for PosTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `(token index, tag)` pairs referencing an alignment track's word tier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosTrack {
    pub tags: Vec<(usize, PosTag)>,
}

impl PosTrack {
    /// Token indices carrying `tag`, in track order.
    pub fn tokens_with(&self, tag: PosTag) -> Vec<usize> {
        self.tags.iter().filter(|(_, t)| *t == tag).map(|(i, _)| *i).collect()
    }
}

/// Parses rows of `token_index \t tag`. Index range against the alignment
/// is checked later, when the track is applied.
pub fn parse_pos_track(text: &str) -> Result<PosTrack, AlignError> {
    let mut tags = Vec::new();
    for (zero_line, raw) in text.lines().enumerate() {
        let line_no = zero_line + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let (index, tag) = match (fields.next(), fields.next()) {
            (Some(i), Some(t)) => (i.trim(), t.trim()),
            _ => return Err(parse_err(line_no, "expected `token_index<TAB>tag`")),
        };
        let index: usize = index
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad token index {index:?}")))?;
        tags.push((index, PosTag::parse(tag)));
    }
    Ok(PosTrack { tags })
}
