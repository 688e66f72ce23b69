use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};
use viseval::corrupt::{
    apply_mask, mask_ngram, mask_pos, mask_prefix, mask_random, mask_suffix, mask_viseme,
    sample_gram_span,
};
use viseval::{
    frame_labels, load_clip_auto, parse_pos_track, parse_textgrid, standardize_length, ClipFormat,
    PadMask, PosTag, VisemeMap,
};

use crate::common::{
    discover_clips, per_clip_seed, run_over_items, sidecar_path, textgrid_path, write_clip_atomic,
    write_file_atomic, ClipEntry, Outcome, MASK_SUFFIX, POS_SUFFIX,
};

#[derive(Debug, Args)]
pub struct CorruptArgs {
    /// Input corpus directory
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory for corrupted clips and mask sidecars
    #[arg(long)]
    pub output: PathBuf,
    /// Which challenge corruption to generate
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Frame fraction for random/prefix/suffix corruption
    #[arg(long)]
    pub rate: Option<f64>,
    /// Global seed; combined with each clip id via FNV-1a
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Viseme label to corrupt (visemic kind)
    #[arg(long)]
    pub viseme: Option<String>,
    /// Which run of the viseme to corrupt, 1-based
    #[arg(long, default_value_t = 1)]
    pub occurrence: usize,
    /// Explicit word span FIRST,LAST for gram corruption
    #[arg(long)]
    pub span: Option<String>,
    /// Fraction of candidate grams kept before the per-clip pick
    #[arg(long, default_value_t = 1.0)]
    pub gram_fraction: f64,
    /// POS tag whose words get corrupted (pos kind)
    #[arg(long)]
    pub tag: Option<String>,
    /// Custom phone-to-viseme TSV (defaults to the built-in table)
    #[arg(long)]
    pub viseme_map: Option<PathBuf>,
    /// Pad with noise or truncate every clip to this frame count first
    #[arg(long)]
    pub standardize: Option<usize>,
    /// Output storage format (defaults to each input clip's format)
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Random,
    #[value(alias = "viseme")]
    Visemic,
    Interword,
    Intraword,
    Prefix,
    Suffix,
    Pos,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Png,
    Raw,
}

impl From<FormatArg> for ClipFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Png => ClipFormat::PngSequence,
            FormatArg::Raw => ClipFormat::RawRgb8,
        }
    }
}

fn load_viseme_map(path: Option<&PathBuf>) -> Result<VisemeMap> {
    match path {
        Some(p) => {
            let text =
                fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(VisemeMap::parse_tsv(&text)?)
        }
        None => Ok(VisemeMap::default_map()),
    }
}

fn parse_span(text: &str) -> Result<(usize, usize)> {
    let (a, b) = text
        .split_once(',')
        .with_context(|| format!("span {text:?} is not FIRST,LAST"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

pub fn run(args: &CorruptArgs) -> Result<Outcome> {
    match args.kind {
        KindArg::Random | KindArg::Prefix | KindArg::Suffix => {
            if args.rate.is_none() {
                bail!("--kind {:?} requires --rate", args.kind);
            }
        }
        KindArg::Visemic => {
            if args.viseme.is_none() {
                bail!("--kind visemic requires --viseme");
            }
        }
        KindArg::Pos => {
            if args.tag.is_none() {
                bail!("--kind pos requires --tag");
            }
        }
        KindArg::Interword | KindArg::Intraword => {}
    }
    let map = load_viseme_map(args.viseme_map.as_ref())?;
    let clips = discover_clips(&args.input)?;
    fs::create_dir_all(&args.output)?;

    Ok(run_over_items(&clips, |c| &c.id, |entry| corrupt_one(args, &map, entry)))
}

fn corrupt_one(args: &CorruptArgs, map: &VisemeMap, entry: &ClipEntry) -> Result<()> {
    let (clip, manifest) = load_clip_auto(&entry.path)?;
    let seed = per_clip_seed(args.seed, &entry.id);
    let (clip, pad) = match args.standardize {
        Some(target) => standardize_length(&clip, target, seed)?,
        None => (clip, PadMask::empty()),
    };
    let n = clip.num_frames();

    let mut mask = match args.kind {
        KindArg::Random => mask_random(n, &pad, args.rate.unwrap(), seed)?,
        KindArg::Prefix => mask_prefix(n, &pad, args.rate.unwrap(), seed)?,
        KindArg::Suffix => mask_suffix(n, &pad, args.rate.unwrap(), seed)?,
        KindArg::Visemic | KindArg::Interword | KindArg::Intraword | KindArg::Pos => {
            let tg_path = textgrid_path(&args.input, &entry.id)?;
            let text = fs::read_to_string(&tg_path)
                .with_context(|| format!("reading {}", tg_path.display()))?;
            let track = parse_textgrid(&text)
                .with_context(|| format!("parsing {}", tg_path.display()))?;
            let labels = frame_labels(&track, map, manifest.fps, n)?;
            match args.kind {
                KindArg::Visemic => mask_viseme(
                    &labels,
                    &pad,
                    args.viseme.as_deref().unwrap(),
                    args.occurrence,
                    seed,
                )?,
                KindArg::Interword | KindArg::Intraword => {
                    let bigram = matches!(args.kind, KindArg::Interword);
                    let span = match &args.span {
                        Some(s) => parse_span(s)?,
                        None => {
                            sample_gram_span(labels.num_words(), bigram, args.gram_fraction, seed)?
                                .ok_or_else(|| anyhow!("no gram candidate in this clip"))?
                        }
                    };
                    mask_ngram(&labels, &pad, span, seed)?
                }
                KindArg::Pos => {
                    let pos_path = sidecar_path(&args.input, &entry.id, POS_SUFFIX);
                    let text = fs::read_to_string(&pos_path)
                        .with_context(|| format!("reading {}", pos_path.display()))?;
                    let pos = parse_pos_track(&text)?;
                    let tag = PosTag::parse(args.tag.as_deref().unwrap());
                    mask_pos(&labels, &pad, &pos, tag, seed)?
                }
                _ => unreachable!(),
            }
        }
    };

    if let Some(target) = args.standardize {
        mask.params
            .insert("pad".into(), serde_json::Value::from(pad.iter().collect::<Vec<_>>()));
        mask.params.insert("pad_seed".into(), serde_json::Value::from(seed));
        mask.params.insert("target_len".into(), serde_json::Value::from(target));
    }

    let corrupted = apply_mask(&clip, mask)?;
    let format = args.format.map(Into::into).unwrap_or(entry.format);
    write_clip_atomic(corrupted.clip(), &args.output, &entry.id, format)?;
    let mut sidecar = corrupted.mask().to_json();
    sidecar.push('\n');
    write_file_atomic(&sidecar_path(&args.output, &entry.id, MASK_SUFFIX), sidecar.as_bytes())?;
    Ok(())
}
