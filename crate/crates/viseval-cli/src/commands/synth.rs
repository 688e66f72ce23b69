use std::fs;
use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use viseval::{load_clip_auto, synth_freeze};

use crate::common::{discover_clips, run_over_items, write_clip_atomic, Outcome};

use super::corrupt::FormatArg;

/// Builds the two-frame freeze synthetic for every clip: first frame
/// repeated for the front half, last frame for the back half.
#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Input corpus directory
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory for the synthetic clips
    #[arg(long)]
    pub output: PathBuf,
    /// Output storage format (defaults to each input clip's format)
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

pub fn run(args: &SynthArgs) -> Result<Outcome> {
    let clips = discover_clips(&args.input)?;
    fs::create_dir_all(&args.output)?;
    Ok(run_over_items(
        &clips,
        |c| &c.id,
        |entry| {
            let (clip, _) = load_clip_auto(&entry.path)?;
            let frozen = synth_freeze(&clip)?;
            let format = args.format.map(Into::into).unwrap_or(entry.format);
            write_clip_atomic(&frozen, &args.output, &entry.id, format)
        },
    ))
}
