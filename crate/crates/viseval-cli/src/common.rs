//! Shared batch plumbing: clip discovery, sidecar naming, per-clip
//! seeding, bounded parallelism, and atomic output publication.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{bail, Context, Result};
use viseval::{Clip, ClipFormat};

/// How a finished subcommand reports per-clip failures.
pub enum Outcome {
    Clean,
    Partial(usize),
}

pub const MASK_SUFFIX: &str = ".mask.json";
pub const REPORT_SUFFIX: &str = ".report.json";
pub const LANDMARKS_SUFFIX: &str = ".landmarks.json";
pub const POS_SUFFIX: &str = ".pos.tsv";
pub const TRANSCRIPT_SUFFIX: &str = ".txt";

#[derive(Debug, Clone)]
pub struct ClipEntry {
    pub id: String,
    pub path: PathBuf,
    pub format: ClipFormat,
}

/// Finds clips in a corpus directory: subdirectories holding a
/// `manifest.json` (PNG sequences) and `<id>.rgb` files with a matching
/// `<id>.json` manifest, sorted by id.
pub fn discover_clips(root: &Path) -> Result<Vec<ClipEntry>> {
    let mut out = Vec::new();
    let entries =
        fs::read_dir(root).with_context(|| format!("reading corpus dir {}", root.display()))?;
    for entry in entries {
        let entry = entry?;
        let path = entry.path();
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.starts_with('.') {
            continue;
        }
        if path.is_dir() {
            if path.join("manifest.json").is_file() {
                out.push(ClipEntry { id: name, path, format: ClipFormat::PngSequence });
            }
        } else if path.extension().and_then(|e| e.to_str()) == Some("rgb")
            && path.with_extension("json").is_file()
        {
            let id = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            out.push(ClipEntry { id, path, format: ClipFormat::RawRgb8 });
        }
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    if out.is_empty() {
        bail!("no clips found in {}", root.display());
    }
    Ok(out)
}

/// Locates the stored clip for `id` under `root`, either layout.
pub fn find_clip(root: &Path, id: &str) -> Result<ClipEntry> {
    let dir = root.join(id);
    if dir.is_dir() && dir.join("manifest.json").is_file() {
        return Ok(ClipEntry { id: id.to_string(), path: dir, format: ClipFormat::PngSequence });
    }
    let raw = root.join(format!("{id}.rgb"));
    if raw.is_file() && raw.with_extension("json").is_file() {
        return Ok(ClipEntry { id: id.to_string(), path: raw, format: ClipFormat::RawRgb8 });
    }
    bail!("clip {id:?} not found in {}", root.display());
}

pub fn sidecar_path(root: &Path, id: &str, suffix: &str) -> PathBuf {
    root.join(format!("{id}{suffix}"))
}

/// The alignment TextGrid for a clip, trying both extension casings.
pub fn textgrid_path(root: &Path, id: &str) -> Result<PathBuf> {
    for suffix in [".TextGrid", ".textgrid"] {
        let p = sidecar_path(root, id, suffix);
        if p.is_file() {
            return Ok(p);
        }
    }
    bail!("no TextGrid alignment for clip {id:?} in {}", root.display());
}

/// Per-clip seed: FNV-1a 64 of the clip id, XORed with the global seed.
/// Results are therefore independent of batch composition and order.
pub fn per_clip_seed(global_seed: u64, clip_id: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in clip_id.as_bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h ^ global_seed
}

/// Worker count: `VISEVAL_THREADS` when set, else available parallelism.
pub fn thread_count() -> usize {
    std::env::var("VISEVAL_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, usize::from))
}

/// Runs `work` over every item from a bounded worker pool, printing one
/// line per failed item. Items are independent, so scheduling cannot
/// change any output.
pub fn run_over_items<T: Sync>(
    items: &[T],
    name: impl Fn(&T) -> &str + Sync,
    work: impl Fn(&T) -> Result<()> + Sync,
) -> Outcome {
    let cursor = AtomicUsize::new(0);
    let failures: Mutex<Vec<(usize, anyhow::Error)>> = Mutex::new(Vec::new());
    let workers = thread_count().min(items.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = cursor.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                if let Err(err) = work(&items[i]) {
                    failures.lock().unwrap().push((i, err));
                }
            });
        }
    });
    let mut failures = failures.into_inner().unwrap();
    failures.sort_by_key(|(i, _)| *i);
    let count = failures.len();
    for (i, err) in failures {
        eprintln!("clip {}: {err:#}", name(&items[i]));
    }
    if count == 0 {
        Outcome::Clean
    } else {
        Outcome::Partial(count)
    }
}

/// Writes via a hidden temp sibling plus rename, so readers and parallel
/// runs never observe partial files.
pub fn write_file_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let parent = path.parent().context("output path has no parent")?;
    fs::create_dir_all(parent)?;
    let file_name = path.file_name().context("output path has no file name")?.to_string_lossy();
    let tmp = parent.join(format!(".{file_name}.tmp"));
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("publishing {}", path.display()))?;
    Ok(())
}

/// Stages a clip under a hidden name and renames it into place.
pub fn write_clip_atomic(
    clip: &Clip,
    out_root: &Path,
    id: &str,
    format: ClipFormat,
) -> Result<()> {
    fs::create_dir_all(out_root)?;
    match format {
        ClipFormat::PngSequence => {
            let tmp = out_root.join(format!(".{id}.tmp"));
            let _ = fs::remove_dir_all(&tmp);
            viseval::write_clip(clip, &tmp, format)?;
            let target = out_root.join(id);
            let _ = fs::remove_dir_all(&target);
            fs::rename(&tmp, &target)
                .with_context(|| format!("publishing {}", target.display()))?;
        }
        ClipFormat::RawRgb8 => {
            let tmp_rgb = out_root.join(format!(".{id}.tmp.rgb"));
            viseval::write_clip(clip, &tmp_rgb, format)?;
            fs::rename(&tmp_rgb, out_root.join(format!("{id}.rgb")))?;
            fs::rename(tmp_rgb.with_extension("json"), out_root.join(format!("{id}.json")))?;
        }
    }
    Ok(())
}

/// Writes to the given file atomically, or to stdout when no path is set.
pub fn emit_document(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => write_file_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
