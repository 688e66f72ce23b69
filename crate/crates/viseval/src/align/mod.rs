//! Forced-alignment ingestion: TextGrid parsing, phone-to-viseme mapping,
//! pronunciation lexica, POS tracks, and per-frame linguistic labels.

mod lexicon;
mod pos;
mod textgrid;
mod viseme;

pub use lexicon::{parse_lexicon, Lexicon};
pub use pos::{parse_pos_track, PosTag, PosTrack};
pub use textgrid::parse_textgrid;
pub use viseme::{phones_to_visemes, strip_stress, VisemeMap, SILENCE_VISEME};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlignError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing interval tier {0:?}")]
    MissingTier(String),
    #[error("line {line}: interval [{start}, {end}] has end <= start")]
    BadInterval { line: usize, start: f64, end: f64 },
    #[error("line {line}: interval starting at {start} overlaps the previous interval")]
    NonMonotone { line: usize, start: f64 },
    #[error("phone {0:?} is not in the viseme map")]
    UnmappedPhone(String),
    #[error("viseme label {0:?} is not in the viseme alphabet")]
    BadVisemeLabel(String),
    #[error("fps must be positive")]
    BadFps,
}

pub(crate) fn parse_err(line: usize, message: impl Into<String>) -> AlignError {
    AlignError::Parse { line, message: message.into() }
}

/// A labeled time span in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub label: String,
    pub start: f64,
    pub end: f64,
}

/// Word and phone tiers from a forced aligner. Intervals within each tier
/// are sorted, non-overlapping, and strictly positive in length; silence
/// spans are represented as gaps, not intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentTrack {
    pub words: Vec<Interval>,
    pub phones: Vec<Interval>,
}

impl AlignmentTrack {
    /// Index of the word interval containing time `t` under [start, end).
    pub fn word_at(&self, t: f64) -> Option<usize> {
        self.words.iter().position(|iv| iv.start <= t && t < iv.end)
    }

    pub fn phone_at(&self, t: f64) -> Option<&Interval> {
        self.phones.iter().find(|iv| iv.start <= t && t < iv.end)
    }
}

/// Per-frame linguistic labels derived from an alignment track.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameLabel {
    pub viseme: String,
    pub word_index: Option<usize>,
    pub phone: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameLabels {
    labels: Vec<FrameLabel>,
    num_words: usize,
    fps: f64,
}

impl FrameLabels {
    pub fn labels(&self) -> &[FrameLabel] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_words(&self) -> usize {
        self.num_words
    }

    pub fn fps(&self) -> f64 {
        self.fps
    }

    /// Frame indices labeled with word `word_index`.
    pub fn word_frames(&self, word_index: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.word_index == Some(word_index))
            .map(|(i, _)| i)
            .collect()
    }

    /// Maximal contiguous runs of frames labeled with viseme `viseme`,
    /// ordered by start frame.
    pub fn viseme_runs(&self, viseme: &str) -> Vec<(usize, usize)> {
        let mut runs = Vec::new();
        let mut start: Option<usize> = None;
        for (i, l) in self.labels.iter().enumerate() {
            if l.viseme == viseme {
                start.get_or_insert(i);
            } else if let Some(s) = start.take() {
                runs.push((s, i - 1));
            }
        }
        if let Some(s) = start {
            runs.push((s, self.labels.len() - 1));
        }
        runs
    }
}

/// Labels each frame with the intervals containing its center time
/// `(i + 0.5) / fps`. Interval membership is half-open: [start, end).
/// Frames outside every phone interval are labeled silence.
pub fn frame_labels(
    track: &AlignmentTrack,
    map: &VisemeMap,
    fps: f64,
    n_frames: usize,
) -> Result<FrameLabels, AlignError> {
    if fps.is_nan() || fps <= 0.0 {
        return Err(AlignError::BadFps);
    }
    let mut labels = Vec::with_capacity(n_frames);
    for i in 0..n_frames {
        let t = (i as f64 + 0.5) / fps;
        let word_index = track.word_at(t);
        let phone = track.phone_at(t).map(|iv| iv.label.clone());
        let viseme = match &phone {
            Some(p) => map.viseme_for(p)?.to_string(),
            None => SILENCE_VISEME.to_string(),
        };
        labels.push(FrameLabel { viseme, word_index, phone });
    }
    Ok(FrameLabels { labels, num_words: track.words.len(), fps })
}
