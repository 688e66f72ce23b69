//! The six challenge corruptions: frame masks plus seeded white-noise
//! substitution, and discovery of visemically equivalent word pairs.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::align::{phones_to_visemes, AlignError, FrameLabels, Lexicon, PosTag, PosTrack, VisemeMap};
use crate::media::{noise_frame, Clip, MediaError, PadMask};

/// Salt that separates the noise stream from the index-sampling stream, so
/// a mask sidecar's seed regenerates identical noise regardless of how the
/// indices were drawn.
const NOISE_STREAM_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Error)]
pub enum CorruptError {
    #[error("corruption rate {0} outside (0, 1)")]
    RateOutOfRange(f64),
    #[error("mask needs {needed} frames but only {available} are eligible")]
    TooFewFrames { needed: usize, available: usize },
    #[error("no run {occurrence} of viseme {viseme:?} in the labels")]
    NoVisemeTarget { viseme: String, occurrence: usize },
    #[error("no token carries tag {tag}")]
    NoPosTarget { tag: PosTag },
    #[error("word span {first}..={last} covers no frames")]
    EmptySpan { first: usize, last: usize },
    #[error("token index {index} out of range for {num_words} words")]
    TokenOutOfRange { index: usize, num_words: usize },
    #[error("word span {first}..={last} invalid for {num_words} words")]
    BadSpan { first: usize, last: usize, num_words: usize },
    #[error("mask index {index} out of range for {n_frames} frames")]
    MaskOutOfRange { index: usize, n_frames: usize },
    #[error("min_shared must be at least 1")]
    MinSharedTooSmall,
    #[error(transparent)]
    Align(#[from] AlignError),
    #[error(transparent)]
    Media(#[from] MediaError),
}

/// Which of the six challenge corruptions produced a mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorruptionKind {
    Random,
    Visemic,
    InterWord,
    IntraWord,
    Prefix,
    Suffix,
    Pos,
}

impl CorruptionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CorruptionKind::Random => "random",
            CorruptionKind::Visemic => "visemic",
            CorruptionKind::InterWord => "inter_word",
            CorruptionKind::IntraWord => "intra_word",
            CorruptionKind::Prefix => "prefix",
            CorruptionKind::Suffix => "suffix",
            CorruptionKind::Pos => "pos",
        }
    }
}

impl std::fmt::Display for CorruptionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The corrupted frame indices, their provenance, and the seed that
/// regenerates the substituted noise. Serializes to the mask sidecar
/// schema: `{ "kind", "indices", "params", "seed" }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorruptionMask {
    pub kind: CorruptionKind,
    pub indices: Vec<usize>,
    pub params: BTreeMap<String, serde_json::Value>,
    pub seed: u64,
}

impl CorruptionMask {
    fn new(
        kind: CorruptionKind,
        indices: impl IntoIterator<Item = usize>,
        params: BTreeMap<String, serde_json::Value>,
        seed: u64,
    ) -> Self {
        let set: BTreeSet<usize> = indices.into_iter().collect();
        CorruptionMask { kind, indices: set.into_iter().collect(), params, seed }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("mask serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// A clip whose masked frames have been replaced by seeded uniform noise;
/// every other frame is bit-identical to the source.
#[derive(Debug, Clone, PartialEq)]
pub struct CorruptedClip {
    clip: Clip,
    mask: CorruptionMask,
}

impl CorruptedClip {
    /// Reassembles a corrupted clip loaded from disk with its mask
    /// sidecar. The caller vouches that the masked frames already hold the
    /// substituted noise; only index bounds are checked here.
    pub fn from_parts(clip: Clip, mask: CorruptionMask) -> Result<Self, CorruptError> {
        let n = clip.num_frames();
        if let Some(&index) = mask.indices.iter().find(|&&i| i >= n) {
            return Err(CorruptError::MaskOutOfRange { index, n_frames: n });
        }
        Ok(CorruptedClip { clip, mask })
    }

    pub fn clip(&self) -> &Clip {
        &self.clip
    }

    pub fn mask(&self) -> &CorruptionMask {
        &self.mask
    }

    pub fn into_parts(self) -> (Clip, CorruptionMask) {
        (self.clip, self.mask)
    }
}

/// round-half-away-from-zero, the one rounding rule used for every count
/// derived from a rate or fraction.
pub fn round_count(x: f64) -> usize {
    x.round() as usize
}

fn check_rate(rate: f64) -> Result<(), CorruptError> {
    if rate > 0.0 && rate < 1.0 {
        Ok(())
    } else {
        Err(CorruptError::RateOutOfRange(rate))
    }
}

fn eligible_indices(n_frames: usize, pad: &PadMask) -> Vec<usize> {
    (0..n_frames).filter(|i| !pad.contains(*i)).collect()
}

fn param(v: impl Into<serde_json::Value>) -> serde_json::Value {
    v.into()
}

/// Replaces the masked frames of `clip` with uniform noise drawn from the
/// mask's seed. Deterministic: the same (clip, mask) pair always yields the
/// same bytes.
pub fn apply_mask(clip: &Clip, mask: CorruptionMask) -> Result<CorruptedClip, CorruptError> {
    let n = clip.num_frames();
    if let Some(&index) = mask.indices.iter().find(|&&i| i >= n) {
        return Err(CorruptError::MaskOutOfRange { index, n_frames: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mask.seed ^ NOISE_STREAM_SALT);
    let mut frames = clip.frames().to_vec();
    for &i in &mask.indices {
        frames[i] = noise_frame(clip.width(), clip.height(), &mut rng);
    }
    let clip = clip.with_frames(frames)?;
    Ok(CorruptedClip { clip, mask })
}

/// Mask of `round(rate * n_frames)` indices drawn uniformly without
/// replacement from the non-padded frames.
pub fn mask_random(
    n_frames: usize,
    pad: &PadMask,
    rate: f64,
    seed: u64,
) -> Result<CorruptionMask, CorruptError> {
    check_rate(rate)?;
    let k = round_count(rate * n_frames as f64);
    let eligible = eligible_indices(n_frames, pad);
    if k > eligible.len() {
        return Err(CorruptError::TooFewFrames { needed: k, available: eligible.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = rand::seq::index::sample(&mut rng, eligible.len(), k);
    let indices: Vec<usize> = picks.iter().map(|i| eligible[i]).collect();
    let mut params = BTreeMap::new();
    params.insert("rate".into(), param(rate));
    Ok(CorruptionMask::new(CorruptionKind::Random, indices, params, seed))
}

/// Mask of the first `round(rate * n_frames)` non-padded frames.
pub fn mask_prefix(
    n_frames: usize,
    pad: &PadMask,
    rate: f64,
    seed: u64,
) -> Result<CorruptionMask, CorruptError> {
    check_rate(rate)?;
    let k = round_count(rate * n_frames as f64);
    let eligible = eligible_indices(n_frames, pad);
    if k > eligible.len() {
        return Err(CorruptError::TooFewFrames { needed: k, available: eligible.len() });
    }
    let indices: Vec<usize> = eligible[..k].to_vec();
    let mut params = BTreeMap::new();
    params.insert("rate".into(), param(rate));
    Ok(CorruptionMask::new(CorruptionKind::Prefix, indices, params, seed))
}

/// Mask of the last `round(rate * n_frames)` non-padded frames.
pub fn mask_suffix(
    n_frames: usize,
    pad: &PadMask,
    rate: f64,
    seed: u64,
) -> Result<CorruptionMask, CorruptError> {
    check_rate(rate)?;
    let k = round_count(rate * n_frames as f64);
    let eligible = eligible_indices(n_frames, pad);
    if k > eligible.len() {
        return Err(CorruptError::TooFewFrames { needed: k, available: eligible.len() });
    }
    let indices: Vec<usize> = eligible[eligible.len() - k..].to_vec();
    let mut params = BTreeMap::new();
    params.insert("rate".into(), param(rate));
    Ok(CorruptionMask::new(CorruptionKind::Suffix, indices, params, seed))
}

/// Mask covering the `occurrence`-th (1-based) maximal contiguous run of
/// frames labeled with `viseme`.
pub fn mask_viseme(
    labels: &FrameLabels,
    pad: &PadMask,
    viseme: &str,
    occurrence: usize,
    seed: u64,
) -> Result<CorruptionMask, CorruptError> {
    let runs = labels.viseme_runs(viseme);
    let no_target = || CorruptError::NoVisemeTarget {
        viseme: viseme.to_string(),
        occurrence,
    };
    if occurrence == 0 {
        return Err(no_target());
    }
    let &(start, end) = runs.get(occurrence - 1).ok_or_else(no_target)?;
    let indices = (start..=end).filter(|i| !pad.contains(*i));
    let mut params = BTreeMap::new();
    params.insert("viseme".into(), param(viseme));
    params.insert("occurrence".into(), param(occurrence));
    Ok(CorruptionMask::new(CorruptionKind::Visemic, indices, params, seed))
}

/// Mask covering the middle of a word span's frame run, protecting
/// `max(1, round(0.1 * |S|))` frames at each end. Single-token spans are
/// `IntraWord`, longer spans `InterWord`.
pub fn mask_ngram(
    labels: &FrameLabels,
    pad: &PadMask,
    span: (usize, usize),
    seed: u64,
) -> Result<CorruptionMask, CorruptError> {
    let (first, last) = span;
    let num_words = labels.num_words();
    if first > last || last >= num_words {
        return Err(CorruptError::BadSpan { first, last, num_words });
    }
    let start_frames = labels.word_frames(first);
    let end_frames = labels.word_frames(last);
    let (Some(&start), Some(&end)) = (start_frames.first(), end_frames.last()) else {
        return Err(CorruptError::EmptySpan { first, last });
    };
    let span_len = end - start + 1;
    let guard = std::cmp::max(1, round_count(0.1 * span_len as f64));
    let corrupt_lo = start + guard;
    let corrupt_hi = (end + 1).saturating_sub(guard);
    let indices = (corrupt_lo..corrupt_hi).filter(|i| !pad.contains(*i));
    let kind = if first == last { CorruptionKind::IntraWord } else { CorruptionKind::InterWord };
    let mut params = BTreeMap::new();
    params.insert("span".into(), param(vec![first, last]));
    params.insert("guard_frames".into(), param(guard));
    Ok(CorruptionMask::new(kind, indices, params, seed))
}

/// Mask covering every frame of every token tagged `tag`.
pub fn mask_pos(
    labels: &FrameLabels,
    pad: &PadMask,
    pos: &PosTrack,
    tag: PosTag,
    seed: u64,
) -> Result<CorruptionMask, CorruptError> {
    let tokens = pos.tokens_with(tag);
    if tokens.is_empty() {
        return Err(CorruptError::NoPosTarget { tag });
    }
    let num_words = labels.num_words();
    let mut indices = BTreeSet::new();
    for token in tokens {
        if token >= num_words {
            return Err(CorruptError::TokenOutOfRange { index: token, num_words });
        }
        indices.extend(labels.word_frames(token));
    }
    let indices = indices.into_iter().filter(|i| !pad.contains(*i));
    let mut params = BTreeMap::new();
    params.insert("tag".into(), param(tag.as_str()));
    Ok(CorruptionMask::new(CorruptionKind::Pos, indices, params, seed))
}

pub fn corrupt_random(
    clip: &Clip,
    pad: &PadMask,
    rate: f64,
    seed: u64,
) -> Result<CorruptedClip, CorruptError> {
    apply_mask(clip, mask_random(clip.num_frames(), pad, rate, seed)?)
}

pub fn corrupt_prefix(
    clip: &Clip,
    pad: &PadMask,
    rate: f64,
    seed: u64,
) -> Result<CorruptedClip, CorruptError> {
    apply_mask(clip, mask_prefix(clip.num_frames(), pad, rate, seed)?)
}

pub fn corrupt_suffix(
    clip: &Clip,
    pad: &PadMask,
    rate: f64,
    seed: u64,
) -> Result<CorruptedClip, CorruptError> {
    apply_mask(clip, mask_suffix(clip.num_frames(), pad, rate, seed)?)
}

pub fn corrupt_viseme(
    clip: &Clip,
    labels: &FrameLabels,
    pad: &PadMask,
    viseme: &str,
    occurrence: usize,
    seed: u64,
) -> Result<CorruptedClip, CorruptError> {
    apply_mask(clip, mask_viseme(labels, pad, viseme, occurrence, seed)?)
}

pub fn corrupt_ngram(
    clip: &Clip,
    labels: &FrameLabels,
    pad: &PadMask,
    span: (usize, usize),
    seed: u64,
) -> Result<CorruptedClip, CorruptError> {
    apply_mask(clip, mask_ngram(labels, pad, span, seed)?)
}

pub fn corrupt_pos(
    clip: &Clip,
    labels: &FrameLabels,
    pad: &PadMask,
    pos: &PosTrack,
    tag: PosTag,
    seed: u64,
) -> Result<CorruptedClip, CorruptError> {
    apply_mask(clip, mask_pos(labels, pad, pos, tag, seed)?)
}

/// Salt for the gram-sampling stream, distinct from noise and index
/// sampling.
const GRAM_STREAM_SALT: u64 = 0x517C_C1B7_2722_0A95;

/// Picks one word span for an n-gram corruption: unigrams `(i, i)` or
/// bigrams `(i, i+1)`. A `fraction` below 1 first thins the candidate list
/// to `round(fraction * count)` seeded samples, mirroring challenge-set
/// subsampling. Returns `None` when no candidate survives.
pub fn sample_gram_span(
    num_words: usize,
    bigram: bool,
    fraction: f64,
    seed: u64,
) -> Result<Option<(usize, usize)>, CorruptError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(CorruptError::RateOutOfRange(fraction));
    }
    let candidates: Vec<(usize, usize)> = if bigram {
        (0..num_words.saturating_sub(1)).map(|i| (i, i + 1)).collect()
    } else {
        (0..num_words).map(|i| (i, i)).collect()
    };
    if candidates.is_empty() {
        return Ok(None);
    }
    let count = round_count(fraction * candidates.len() as f64);
    if count == 0 {
        return Ok(None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ GRAM_STREAM_SALT);
    let mut sampled: Vec<usize> =
        rand::seq::index::sample(&mut rng, candidates.len(), count).into_iter().collect();
    sampled.sort_unstable();
    let choice = sampled[rand::RngExt::random_range(&mut rng, 0..sampled.len())];
    Ok(Some(candidates[choice]))
}

/// Two words whose viseme strings share a substring of the requested
/// length, plus where that substring sits in each word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisemicPair {
    pub word_a: String,
    pub word_b: String,
    pub shared: Vec<String>,
    pub offset_a: usize,
    pub offset_b: usize,
}

impl VisemicPair {
    /// The first viseme of the shared substring: the corruption target.
    pub fn target(&self) -> &str {
        &self.shared[0]
    }
}

/// Finds word pairs whose viseme strings share a common substring of
/// length >= `min_shared`, reporting the longest such substring per pair.
/// Identical headwords are excluded; homophonous distinct words are not.
pub fn find_visemic_pairs(
    lexicon: &Lexicon,
    map: &VisemeMap,
    min_shared: usize,
) -> Result<Vec<VisemicPair>, CorruptError> {
    if min_shared == 0 {
        return Err(CorruptError::MinSharedTooSmall);
    }
    let mut words: Vec<&str> = lexicon.words().collect();
    words.sort_unstable();

    // Viseme strings per word, all pronunciation variants.
    let mut visemes: Vec<Vec<Vec<String>>> = Vec::with_capacity(words.len());
    for word in &words {
        let variants = lexicon
            .lookup(word)
            .iter()
            .map(|phones| phones_to_visemes(phones, map))
            .collect::<Result<Vec<_>, _>>()?;
        visemes.push(variants);
    }

    // Bucket words by every length-`min_shared` window of their viseme
    // strings; only words sharing a bucket can form a pair.
    let mut buckets: std::collections::HashMap<Vec<&str>, Vec<usize>> =
        std::collections::HashMap::new();
    for (w, variants) in visemes.iter().enumerate() {
        for vs in variants {
            if vs.len() < min_shared {
                continue;
            }
            for window in vs.windows(min_shared) {
                let key: Vec<&str> = window.iter().map(String::as_str).collect();
                let entry = buckets.entry(key).or_default();
                if entry.last() != Some(&w) {
                    entry.push(w);
                }
            }
        }
    }

    let mut candidates: BTreeSet<(usize, usize)> = BTreeSet::new();
    for members in buckets.values() {
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                candidates.insert((a.min(b), a.max(b)));
            }
        }
    }

    let mut pairs = Vec::new();
    for (a, b) in candidates {
        // (len, off_a, off_b, index of the word-a variant that matched)
        let mut best: Option<(usize, usize, usize, usize)> = None;
        for (va_idx, va) in visemes[a].iter().enumerate() {
            for vb in &visemes[b] {
                if let Some((len, off_a, off_b)) = longest_common_substring(va, vb) {
                    let better = match best {
                        None => true,
                        Some(cur) => {
                            len > cur.0 || (len == cur.0 && (off_a, off_b) < (cur.1, cur.2))
                        }
                    };
                    if better {
                        best = Some((len, off_a, off_b, va_idx));
                    }
                }
            }
        }
        if let Some((len, off_a, off_b, va_idx)) = best {
            if len >= min_shared {
                let shared = visemes[a][va_idx][off_a..off_a + len].to_vec();
                pairs.push(VisemicPair {
                    word_a: words[a].to_string(),
                    word_b: words[b].to_string(),
                    shared,
                    offset_a: off_a,
                    offset_b: off_b,
                });
            }
        }
    }
    Ok(pairs)
}

/// Longest common substring of two label sequences as (length, offset in
/// a, offset in b); ties prefer the smallest offsets.
fn longest_common_substring(a: &[String], b: &[String]) -> Option<(usize, usize, usize)> {
    if a.is_empty() || b.is_empty() {
        return None;
    }
    let mut best: Option<(usize, usize, usize)> = None;
    let mut prev = vec![0usize; b.len() + 1];
    for (i, a_label) in a.iter().enumerate() {
        let mut row = vec![0usize; b.len() + 1];
        for (j, b_label) in b.iter().enumerate() {
            if a_label == b_label {
                let len = prev[j] + 1;
                row[j + 1] = len;
                let cand = (len, i + 1 - len, j + 1 - len);
                let better = match best {
                    None => true,
                    Some(cur) => len > cur.0 || (len == cur.0 && (cand.1, cand.2) < (cur.1, cur.2)),
                };
                if better {
                    best = Some(cand);
                }
            }
        }
        prev = row;
    }
    best
}
