//! viseval: corruption generation and viseme-aware evaluation for
//! speech-video frame interpolation.
//!
//! The library covers the full pipeline the `viseval` binary drives:
//!
//! - [`media`]: clips as unit-interval frame sequences, PNG/raw I/O,
//!   fixed-length standardization with noise padding.
//! - [`align`]: TextGrid parsing, phone-to-viseme mapping, lexica, POS
//!   tracks, and per-frame labels.
//! - [`corrupt`]: the six challenge corruptions (random, visemic,
//!   inter/intra-word, prefix, suffix, POS-tagged) and visemic word-pair
//!   discovery.
//! - [`roi`]: mouth boxes from ingested landmarks and frame cropping.
//! - [`metrics`]: MSE, L1, PSNR, and windowed SSIM, full-frame and
//!   ROI-masked, over selectable frame sets.
//! - [`baselines`]: hold/linear reconstructors and the freeze synthetic.
//! - [`report`]: grouped aggregation, dataset statistics, CSV/JSON.

pub mod align;
pub mod baselines;
pub mod corrupt;
pub mod media;
pub mod metrics;
pub mod report;
pub mod roi;

pub use align::{frame_labels, parse_lexicon, parse_pos_track, parse_textgrid, AlignmentTrack, FrameLabels, Lexicon, PosTag, PosTrack, VisemeMap};
pub use baselines::{reconstruct_hold, reconstruct_linear, synth_freeze};
pub use corrupt::{
    apply_mask, corrupt_ngram, corrupt_pos, corrupt_prefix, corrupt_random, corrupt_suffix,
    corrupt_viseme, find_visemic_pairs, sample_gram_span, CorruptedClip, CorruptionKind,
    CorruptionMask, VisemicPair,
};
pub use media::{
    load_clip, load_clip_auto, standardize_length, write_clip, Clip, ClipFormat, ClipManifest,
    Frame, PadMask,
};
pub use metrics::{
    evaluate_pair, l1, mse, psnr, psnr_from_mse, roi_metrics, ssim, total_loss, FrameSetSelector,
    MetricsReport, Scope,
};
pub use report::{
    aggregate, dataset_stats, AggregateTable, ClipReport, CorruptionInfo, DatasetStats, GroupBy,
};
pub use roi::{crop_roi, parse_landmarks, RoiBox, RoiTrack};
