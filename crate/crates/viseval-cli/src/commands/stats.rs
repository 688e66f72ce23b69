use std::fs;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use viseval::media::{manifest_path_for, read_manifest};
use viseval::report::{dataset_stats, StatsEntry};

use crate::common::{discover_clips, emit_document, sidecar_path, Outcome, TRANSCRIPT_SUFFIX};

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Corpus directory
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = StatsFormat::Text)]
    pub format: StatsFormat,
    /// Write here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StatsFormat {
    Text,
    Json,
}

pub fn run(args: &StatsArgs) -> Result<Outcome> {
    let clips = discover_clips(&args.input)?;
    let mut entries = Vec::with_capacity(clips.len());
    for clip in &clips {
        let manifest = read_manifest(&manifest_path_for(&clip.path))?;
        let transcript = manifest.transcript.clone().or_else(|| {
            fs::read_to_string(sidecar_path(&args.input, &clip.id, TRANSCRIPT_SUFFIX))
                .ok()
                .map(|t| t.trim().to_string())
        });
        entries.push(StatsEntry {
            speaker_id: manifest.speaker_id,
            transcript,
            num_frames: manifest.num_frames,
            fps: manifest.fps,
        });
    }
    let stats = dataset_stats(&entries);

    let rendered = match args.format {
        StatsFormat::Json => {
            let mut s = serde_json::to_string_pretty(&stats)?;
            s.push('\n');
            s
        }
        StatsFormat::Text => format!(
            "# Sp (speakers):        {}\n\
             # Ut (utterances):      {}\n\
             # WI (word instances):  {}\n\
             Vo (vocabulary):        {}\n\
             Avg. video length (s):  {:.3}\n",
            stats.num_speakers,
            stats.num_utterances,
            stats.num_word_instances,
            stats.vocabulary,
            stats.avg_video_len_s,
        ),
    };
    emit_document(args.output.as_deref(), &rendered)?;
    Ok(Outcome::Clean)
}
