use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use viseval::{find_visemic_pairs, parse_lexicon, VisemeMap};

use crate::common::{emit_document, Outcome};

#[derive(Debug, Args)]
pub struct PairsArgs {
    /// CMU-format pronunciation lexicon
    #[arg(long)]
    pub lexicon: PathBuf,
    /// Minimum shared viseme substring length
    #[arg(long, default_value_t = 3)]
    pub min_shared: usize,
    /// Custom phone-to-viseme TSV
    #[arg(long)]
    pub viseme_map: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = PairsFormat::Tsv)]
    pub format: PairsFormat,
    /// Write here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PairsFormat {
    Tsv,
    Json,
}

pub fn run(args: &PairsArgs) -> Result<Outcome> {
    let text = fs::read_to_string(&args.lexicon)
        .with_context(|| format!("reading {}", args.lexicon.display()))?;
    let lexicon = parse_lexicon(&text)?;
    let map = match &args.viseme_map {
        Some(p) => {
            let tsv = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            VisemeMap::parse_tsv(&tsv)?
        }
        None => VisemeMap::default_map(),
    };
    let pairs = find_visemic_pairs(&lexicon, &map, args.min_shared)?;

    let rendered = match args.format {
        PairsFormat::Tsv => {
            let mut out = String::from("word_a\tword_b\tshared\ttarget\toffset_a\toffset_b\n");
            for p in &pairs {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\n",
                    p.word_a,
                    p.word_b,
                    p.shared.join(""),
                    p.target(),
                    p.offset_a,
                    p.offset_b,
                ));
            }
            out
        }
        PairsFormat::Json => {
            let rows: Vec<serde_json::Value> = pairs
                .iter()
                .map(|p| {
                    serde_json::json!({
                        "word_a": p.word_a,
                        "word_b": p.word_b,
                        "shared": p.shared,
                        "target": p.target(),
                        "offset_a": p.offset_a,
                        "offset_b": p.offset_b,
                    })
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&rows)?;
            s.push('\n');
            s
        }
    };
    emit_document(args.output.as_deref(), &rendered)?;
    Ok(Outcome::Clean)
}
