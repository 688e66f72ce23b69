use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use viseval::{
    evaluate_pair, load_clip_auto, parse_landmarks, reconstruct_hold, reconstruct_linear,
    standardize_length, Clip, ClipReport, CorruptedClip, CorruptionMask, FrameSetSelector,
    PadMask, RoiTrack, Scope,
};

use crate::common::{
    discover_clips, find_clip, run_over_items, sidecar_path, write_file_atomic, ClipEntry,
    Outcome, LANDMARKS_SUFFIX, MASK_SUFFIX, REPORT_SUFFIX,
};

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Ground-truth corpus directory
    #[arg(long)]
    pub original: PathBuf,
    /// Corrupted corpus directory (with mask sidecars)
    #[arg(long)]
    pub corrupted: Option<PathBuf>,
    /// Directory of externally reconstructed clips
    #[arg(long, conflicts_with = "model")]
    pub reconstruction: Option<PathBuf>,
    /// Built-in baseline reconstructor to run instead
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Output directory for per-clip report JSON
    #[arg(long)]
    pub output: PathBuf,
    /// Landmark source adding ROI-masked metrics: a directory of
    /// <id>.landmarks.json sidecars, or one landmarks file used for all
    #[arg(long)]
    pub roi: Option<PathBuf>,
    /// Margin fraction when reducing landmark polygons to boxes
    #[arg(long, default_value_t = 0.10)]
    pub roi_margin: f64,
    /// Frame set to pool metrics over
    #[arg(long, value_enum, default_value_t = ScopeArg::Corrupted)]
    pub scope: ScopeArg,
    /// Include per-frame metric vectors in reports
    #[arg(long)]
    pub per_frame: bool,
    /// Model name recorded in reports (defaults to the baseline name, or
    /// "external" for --reconstruction)
    #[arg(long)]
    pub model_name: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelArg {
    Hold,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScopeArg {
    Corrupted,
    Whole,
}

pub fn run(args: &EvaluateArgs) -> Result<Outcome> {
    if args.model.is_none() && args.reconstruction.is_none() {
        bail!("one of --model or --reconstruction is required");
    }
    if args.model.is_some() && args.corrupted.is_none() {
        bail!("--model baselines reconstruct from --corrupted clips");
    }
    if args.scope == ScopeArg::Corrupted && args.corrupted.is_none() {
        bail!("--scope corrupted needs --corrupted mask sidecars");
    }
    let roots = args.corrupted.as_deref().unwrap_or(&args.original);
    let clips = discover_clips(roots)?;
    fs::create_dir_all(&args.output)?;

    Ok(run_over_items(&clips, |c| &c.id, |entry| evaluate_one(args, entry)))
}

fn read_mask(corrupted_root: &Path, id: &str) -> Result<Option<CorruptionMask>> {
    let path = sidecar_path(corrupted_root, id, MASK_SUFFIX);
    if !path.is_file() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Some(CorruptionMask::from_json(&text).with_context(|| format!("parsing {}", path.display()))?))
}

/// Noise padding recorded by `corrupt --standardize`, if any.
fn pad_from_mask(mask: &CorruptionMask) -> PadMask {
    let indices = mask
        .params
        .get("pad")
        .and_then(|v| v.as_array())
        .map(|xs| xs.iter().filter_map(|x| x.as_u64()).map(|x| x as usize).collect::<Vec<_>>())
        .unwrap_or_default();
    PadMask::from_indices(indices)
}

fn align_original(original: Clip, mask: Option<&CorruptionMask>, want_frames: usize) -> Result<Clip> {
    if original.num_frames() == want_frames {
        return Ok(original);
    }
    let Some(mask) = mask else {
        bail!(
            "original has {} frames but the comparison needs {}",
            original.num_frames(),
            want_frames
        );
    };
    let target = mask.params.get("target_len").and_then(|v| v.as_u64());
    let pad_seed = mask.params.get("pad_seed").and_then(|v| v.as_u64());
    match (target, pad_seed) {
        (Some(target), Some(seed)) if target as usize == want_frames => {
            Ok(standardize_length(&original, target as usize, seed)?.0)
        }
        _ => bail!(
            "original has {} frames, corrupted has {}, and the mask sidecar \
             records no matching standardization",
            original.num_frames(),
            want_frames
        ),
    }
}

fn load_roi(args: &EvaluateArgs, id: &str, clip: &Clip) -> Result<Option<RoiTrack>> {
    let Some(source) = &args.roi else { return Ok(None) };
    let path = if source.is_dir() {
        sidecar_path(source, id, LANDMARKS_SUFFIX)
    } else {
        source.clone()
    };
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let track = parse_landmarks(
        &text,
        (clip.width(), clip.height()),
        clip.num_frames(),
        args.roi_margin,
    )?;
    Ok(Some(track))
}

fn evaluate_one(args: &EvaluateArgs, entry: &ClipEntry) -> Result<()> {
    let (corrupted_clip, mask) = match &args.corrupted {
        Some(root) => {
            let centry = find_clip(root, &entry.id)?;
            let (clip, _) = load_clip_auto(&centry.path)?;
            let mask = read_mask(root, &entry.id)?;
            (Some(clip), mask)
        }
        None => (None, None),
    };

    let original_entry = find_clip(&args.original, &entry.id)?;
    let (original, manifest) = load_clip_auto(&original_entry.path)?;
    let pad = mask.as_ref().map(pad_from_mask).unwrap_or_default();

    let (reconstruction, model_name) = match (args.model, &args.reconstruction) {
        (Some(model), _) => {
            let clip = corrupted_clip.clone().expect("checked in run()");
            let mask = mask
                .clone()
                .with_context(|| format!("no {MASK_SUFFIX} sidecar for clip {}", entry.id))?;
            let corrupted = CorruptedClip::from_parts(clip, mask)?;
            match model {
                ModelArg::Hold => (reconstruct_hold(&corrupted)?, "hold"),
                ModelArg::Linear => (reconstruct_linear(&corrupted)?, "linear"),
            }
        }
        (None, Some(root)) => {
            let rentry = find_clip(root, &entry.id)?;
            (load_clip_auto(&rentry.path)?.0, "external")
        }
        (None, None) => unreachable!("validated in run()"),
    };
    let model_name = args.model_name.clone().unwrap_or_else(|| model_name.to_string());

    let original = align_original(original, mask.as_ref(), reconstruction.num_frames())?;

    let (selector, scope) = match args.scope {
        ScopeArg::Corrupted => {
            let mask = mask
                .as_ref()
                .with_context(|| format!("no {MASK_SUFFIX} sidecar for clip {}", entry.id))?;
            (FrameSetSelector::corrupted_only(mask, &pad), Scope::CorruptedOnly)
        }
        ScopeArg::Whole => (FrameSetSelector::whole_clip(&pad), Scope::WholeClip),
    };

    let roi = load_roi(args, &entry.id, &original)?;
    let metrics = evaluate_pair(&original, &reconstruction, &selector, roi.as_ref(), args.per_frame)?;

    let report = ClipReport {
        clip_id: entry.id.clone(),
        speaker_id: manifest.speaker_id,
        model: model_name,
        scope,
        corruption: mask.as_ref().map(Into::into),
        metrics,
    };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    write_file_atomic(&sidecar_path(&args.output, &entry.id, REPORT_SUFFIX), text.as_bytes())
}
