//! Fixture corpus builders and binary invocation helpers shared by the
//! CLI and acceptance test targets.

use std::f64::consts::TAU;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use viseval::{Clip, ClipFormat, Frame};

pub fn viseval_bin() -> &'static str {
    env!("CARGO_BIN_EXE_viseval")
}

pub fn run_cli(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(viseval_bin());
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("viseval binary runs")
}

pub fn assert_exit(output: &Output, code: i32) {
    assert_eq!(
        output.status.code(),
        Some(code),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

/// A smooth, slowly drifting sinusoid pattern: consecutive frames are
/// similar, distant frames differ, all values stay inside (0, 1).
pub fn natural_clip(id: &str, speaker: &str, w: u32, h: u32, n: usize, fps: f64) -> Clip {
    let phase_of = |x: u32, y: u32, c: usize, t: usize| {
        TAU * (f64::from(x) / f64::from(w) + 0.5 * f64::from(y) / f64::from(h))
            + 0.06 * t as f64
            + 2.1 * c as f64
    };
    let frames = (0..n)
        .map(|t| {
            let mut data = Vec::with_capacity(w as usize * h as usize * 3);
            for y in 0..h {
                for x in 0..w {
                    for c in 0..3 {
                        data.push((0.5 + 0.45 * phase_of(x, y, c, t).sin()) as f32);
                    }
                }
            }
            Frame::new(w, h, data).unwrap()
        })
        .collect();
    Clip::new(frames, fps, id, speaker, Some("the answer million".to_string())).unwrap()
}

/// A long-format TextGrid with words the/answer/million and a phone tier
/// whose "M" span is the only bilabial (viseme "p") run.
pub fn textgrid_text(duration: f64) -> String {
    let words = [
        ("", 0.0, 0.1),
        ("the", 0.1, 0.3),
        ("answer", 0.3, 0.6),
        ("million", 0.6, 0.9),
        ("", 0.9, 1.0),
    ];
    let phones = [
        ("sil", 0.0, 0.1),
        ("DH", 0.1, 0.2),
        ("AH0", 0.2, 0.3),
        ("AE1", 0.3, 0.45),
        ("N", 0.45, 0.52),
        ("S", 0.52, 0.6),
        ("M", 0.6, 0.7),
        ("IH1", 0.7, 0.78),
        ("L", 0.78, 0.83),
        ("Y", 0.83, 0.86),
        ("AH0", 0.86, 0.88),
        ("N", 0.88, 0.9),
        ("sil", 0.9, 1.0),
    ];
    let mut s = String::from(
        "File type = \"ooTextFile\"\nObject class = \"TextGrid\"\n\nxmin = 0\n",
    );
    s.push_str(&format!("xmax = {duration:.6}\ntiers? <exists>\nsize = 2\nitem []:\n"));
    let render = |s: &mut String, index: usize, name: &str, tier: &[(&str, f64, f64)]| {
        s.push_str(&format!("    item [{index}]:\n"));
        s.push_str("        class = \"IntervalTier\"\n");
        s.push_str(&format!("        name = \"{name}\"\n"));
        s.push_str(&format!("        xmin = 0\n        xmax = {duration:.6}\n"));
        s.push_str(&format!("        intervals: size = {}\n", tier.len()));
        for (k, (label, a, b)) in tier.iter().enumerate() {
            s.push_str(&format!("        intervals [{}]:\n", k + 1));
            s.push_str(&format!("            xmin = {:.6}\n", a * duration));
            s.push_str(&format!("            xmax = {:.6}\n", b * duration));
            s.push_str(&format!("            text = \"{label}\"\n"));
        }
    };
    render(&mut s, 1, "words", &words);
    render(&mut s, 2, "phones", &phones);
    s
}

pub const POS_TSV: &str = "0\tDET\n1\tNOUN\n2\tNOUN\n";

pub fn landmarks_text(n_frames: usize, bx: (u32, u32, u32, u32)) -> String {
    let entry = format!("{{\"box\": [{}, {}, {}, {}]}}", bx.0, bx.1, bx.2, bx.3);
    let entries: Vec<String> = (0..n_frames).map(|_| entry.clone()).collect();
    format!("[{}]\n", entries.join(", "))
}

/// Writes `n_clips` PNG-sequence clips with alignment, POS, and landmark
/// sidecars; returns the clip ids.
pub fn write_corpus(
    root: &Path,
    n_clips: usize,
    w: u32,
    h: u32,
    frames: usize,
    fps: f64,
) -> Vec<String> {
    fs::create_dir_all(root).unwrap();
    let mut ids = Vec::new();
    for k in 0..n_clips {
        let id = format!("clip{k:03}");
        let speaker = format!("spk{:02}", k % 5);
        let clip = natural_clip(&id, &speaker, w, h, frames, fps);
        viseval::write_clip(&clip, &root.join(&id), ClipFormat::PngSequence).unwrap();
        let duration = frames as f64 / fps;
        fs::write(root.join(format!("{id}.TextGrid")), textgrid_text(duration)).unwrap();
        fs::write(root.join(format!("{id}.pos.tsv")), POS_TSV).unwrap();
        fs::write(
            root.join(format!("{id}.landmarks.json")),
            landmarks_text(frames, (w / 4, h / 4, 3 * w / 4, 3 * h / 4)),
        )
        .unwrap();
        ids.push(id);
    }
    ids
}

pub const LEXICON: &str = "\
MILLION  M IH1 L Y AH0 N
BILLION  B IH1 L Y AH0 N
PROBABLY  P R AA1 B AH0 B L IY0
POSSIBLY  P AA1 S AH0 B L IY0
CAT  K AE1 T
DOG  D AO1 G
";

/// Snapshot of every regular file under a directory as (relative path,
/// bytes), sorted, for byte-level determinism comparisons.
pub fn dir_snapshot(root: &Path) -> Vec<(String, Vec<u8>)> {
    fn walk(dir: &Path, root: &Path, out: &mut Vec<(String, Vec<u8>)>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(&path, root, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.push((rel, fs::read(&path).unwrap()));
            }
        }
    }
    let mut out = Vec::new();
    walk(root, root, &mut out);
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}
