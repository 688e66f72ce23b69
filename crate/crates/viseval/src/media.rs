//! Clip storage: frame sequences with unit-interval pixels, PNG-sequence and
//! raw RGB8 I/O, and fixed-length standardization with noise padding.

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use rand::RngExt;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MediaError {
    #[error("clip must contain at least one frame")]
    EmptyClip,
    #[error("frame {index} is {got_w}x{got_h}, expected {want_w}x{want_h}")]
    FrameDimensionMismatch {
        index: usize,
        got_w: u32,
        got_h: u32,
        want_w: u32,
        want_h: u32,
    },
    #[error("pixel data length {got} does not match {width}x{height}x3 = {want}")]
    BadFrameLength { got: usize, width: u32, height: u32, want: usize },
    #[error("pixel value {value} outside [0,1] at offset {offset}")]
    PixelOutOfRange { value: f32, offset: usize },
    #[error("{path}: raw file holds {got} bytes, manifest implies {want} (w*h*3*n)")]
    RawSizeMismatch { path: PathBuf, got: usize, want: usize },
    #[error("{path}: expected {want} frames, found {got}")]
    MissingFrames { path: PathBuf, want: usize, got: usize },
    #[error("{path}: frame numbering is not contiguous from 0 (missing index {missing})")]
    NonContiguousFrames { path: PathBuf, missing: usize },
    #[error("{path}: frame file name is not a frame index")]
    BadFrameName { path: PathBuf },
    #[error("{path}: png is {got_w}x{got_h}, manifest says {want_w}x{want_h}")]
    PngDimensionMismatch { path: PathBuf, got_w: u32, got_h: u32, want_w: u32, want_h: u32 },
    #[error("{path}: unsupported png format (need 8-bit RGB or RGBA)")]
    UnsupportedPng { path: PathBuf },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: png codec error: {source}")]
    PngDecode {
        path: PathBuf,
        #[source]
        source: png::DecodingError,
    },
    #[error("{path}: png codec error: {source}")]
    PngEncode {
        path: PathBuf,
        #[source]
        source: png::EncodingError,
    },
    #[error("{path}: manifest error: {source}")]
    Manifest {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("target length must be at least 1")]
    BadTarget,
}

fn io_err(path: &Path, source: std::io::Error) -> MediaError {
    MediaError::Io { path: path.to_path_buf(), source }
}

/// One RGB frame, row-major, channels interleaved, every value in [0,1].
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    width: u32,
    height: u32,
    data: Vec<f32>,
}

impl Frame {
    pub fn new(width: u32, height: u32, data: Vec<f32>) -> Result<Self, MediaError> {
        let want = width as usize * height as usize * 3;
        if data.len() != want {
            return Err(MediaError::BadFrameLength { got: data.len(), width, height, want });
        }
        for (offset, &v) in data.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(MediaError::PixelOutOfRange { value: v, offset });
            }
        }
        Ok(Frame { width, height, data })
    }

    /// A frame filled with one constant value.
    pub fn constant(width: u32, height: u32, value: f32) -> Result<Self, MediaError> {
        Frame::new(width, height, vec![value; width as usize * height as usize * 3])
    }

    pub fn from_u8(width: u32, height: u32, bytes: &[u8]) -> Result<Self, MediaError> {
        let data = bytes.iter().map(|&b| f32::from(b) / 255.0).collect();
        Frame::new(width, height, data)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    /// Pixel value at (x, y) for channel c (0=R, 1=G, 2=B).
    pub fn get(&self, x: u32, y: u32, c: usize) -> f32 {
        self.data[(y as usize * self.width as usize + x as usize) * 3 + c]
    }

    pub fn to_u8(&self) -> Vec<u8> {
        self.data.iter().map(|&v| quantize(v)).collect()
    }
}

fn quantize(v: f32) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Sidecar manifest describing a stored clip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipManifest {
    pub width: u32,
    pub height: u32,
    pub fps: f64,
    pub num_frames: usize,
    pub clip_id: String,
    pub speaker_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transcript: Option<String>,
}

/// A fixed-size frame sequence with identity and timing metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Clip {
    frames: Vec<Frame>,
    fps: f64,
    clip_id: String,
    speaker_id: String,
    transcript: Option<String>,
}

impl Clip {
    pub fn new(
        frames: Vec<Frame>,
        fps: f64,
        clip_id: impl Into<String>,
        speaker_id: impl Into<String>,
        transcript: Option<String>,
    ) -> Result<Self, MediaError> {
        let first = frames.first().ok_or(MediaError::EmptyClip)?;
        let (w, h) = (first.width, first.height);
        for (index, f) in frames.iter().enumerate() {
            if f.width != w || f.height != h {
                return Err(MediaError::FrameDimensionMismatch {
                    index,
                    got_w: f.width,
                    got_h: f.height,
                    want_w: w,
                    want_h: h,
                });
            }
        }
        Ok(Clip {
            frames,
            fps,
            clip_id: clip_id.into(),
            speaker_id: speaker_id.into(),
            transcript,
        })
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn frame(&self, i: usize) -> &Frame {
        &self.frames[i]
    }

    pub fn num_frames(&self) -> usize {
        self.frames.len()
    }

    pub fn width(&self) -> u32 {
        self.frames[0].width
    }

    pub fn height(&self) -> u32 {
        self.frames[0].height
    }

    pub fn fps(&self) -> f64 {
        self.fps
    }

    pub fn clip_id(&self) -> &str {
        &self.clip_id
    }

    pub fn speaker_id(&self) -> &str {
        &self.speaker_id
    }

    pub fn transcript(&self) -> Option<&str> {
        self.transcript.as_deref()
    }

    /// Rebuild this clip with a different frame vector, keeping metadata.
    pub fn with_frames(&self, frames: Vec<Frame>) -> Result<Self, MediaError> {
        Clip::new(frames, self.fps, self.clip_id.clone(), self.speaker_id.clone(), self.transcript.clone())
    }

    pub fn with_clip_id(mut self, clip_id: impl Into<String>) -> Self {
        self.clip_id = clip_id.into();
        self
    }

    pub fn manifest(&self) -> ClipManifest {
        ClipManifest {
            width: self.width(),
            height: self.height(),
            fps: self.fps,
            num_frames: self.num_frames(),
            clip_id: self.clip_id.clone(),
            speaker_id: self.speaker_id.clone(),
            transcript: self.transcript.clone(),
        }
    }
}

/// Frame indices that were appended as noise padding. Excluded from all
/// metric evaluation and never corrupted.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadMask {
    indices: BTreeSet<usize>,
}

impl PadMask {
    pub fn empty() -> Self {
        PadMask::default()
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        PadMask { indices: indices.into_iter().collect() }
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.contains(&index)
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }
}

/// Storage format for a clip on disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClipFormat {
    /// Directory of `NNNNNN.png` files plus `manifest.json`.
    PngSequence,
    /// `<clip>.rgb` byte stream plus `<clip>.json` manifest.
    RawRgb8,
}

/// Uniform-noise frame from a seeded stream.
pub fn noise_frame(width: u32, height: u32, rng: &mut ChaCha8Rng) -> Frame {
    let n = width as usize * height as usize * 3;
    let data: Vec<f32> = (0..n).map(|_| rng.random::<f32>()).collect();
    Frame { width, height, data }
}

pub fn read_manifest(path: &Path) -> Result<ClipManifest, MediaError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| MediaError::Manifest { path: path.to_path_buf(), source: e })
}

pub fn write_manifest(path: &Path, manifest: &ClipManifest) -> Result<(), MediaError> {
    let text = serde_json::to_string_pretty(manifest)
        .map_err(|e| MediaError::Manifest { path: path.to_path_buf(), source: e })?;
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Loads a clip from a PNG-sequence directory or a raw `.rgb` file.
///
/// Pixels are converted as `v / 255.0` exactly. PNG frames are ordered by
/// ascending filename index; raw frames by file order.
pub fn load_clip(path: &Path, manifest: &ClipManifest) -> Result<Clip, MediaError> {
    let frames = if path.is_dir() {
        load_png_frames(path, manifest)?
    } else {
        load_raw_frames(path, manifest)?
    };
    Clip::new(
        frames,
        manifest.fps,
        manifest.clip_id.clone(),
        manifest.speaker_id.clone(),
        manifest.transcript.clone(),
    )
}

fn load_png_frames(dir: &Path, manifest: &ClipManifest) -> Result<Vec<Frame>, MediaError> {
    let mut indexed: Vec<(usize, PathBuf)> = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| io_err(dir, e))? {
        let entry = entry.map_err(|e| io_err(dir, e))?;
        let p = entry.path();
        if p.extension().and_then(|e| e.to_str()) != Some("png") {
            continue;
        }
        let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("");
        let index: usize = stem
            .parse()
            .map_err(|_| MediaError::BadFrameName { path: p.clone() })?;
        indexed.push((index, p));
    }
    indexed.sort_by_key(|(i, _)| *i);

    for (pos, (index, _)) in indexed.iter().enumerate() {
        if *index != pos {
            return Err(MediaError::NonContiguousFrames { path: dir.to_path_buf(), missing: pos });
        }
    }
    if indexed.len() != manifest.num_frames {
        return Err(MediaError::MissingFrames {
            path: dir.to_path_buf(),
            want: manifest.num_frames,
            got: indexed.len(),
        });
    }

    indexed.iter().map(|(_, p)| load_png_frame(p, manifest)).collect()
}

fn load_png_frame(path: &Path, manifest: &ClipManifest) -> Result<Frame, MediaError> {
    let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
    let decoder = png::Decoder::new(std::io::BufReader::new(file));
    let mut reader = decoder
        .read_info()
        .map_err(|e| MediaError::PngDecode { path: path.to_path_buf(), source: e })?;
    let mut buf = vec![0u8; reader.output_buffer_size().unwrap_or(0)];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| MediaError::PngDecode { path: path.to_path_buf(), source: e })?;
    if info.width != manifest.width || info.height != manifest.height {
        return Err(MediaError::PngDimensionMismatch {
            path: path.to_path_buf(),
            got_w: info.width,
            got_h: info.height,
            want_w: manifest.width,
            want_h: manifest.height,
        });
    }
    if info.bit_depth != png::BitDepth::Eight {
        return Err(MediaError::UnsupportedPng { path: path.to_path_buf() });
    }
    let rgb: Vec<u8> = match info.color_type {
        png::ColorType::Rgb => buf[..info.buffer_size()].to_vec(),
        png::ColorType::Rgba => buf[..info.buffer_size()]
            .chunks_exact(4)
            .flat_map(|px| [px[0], px[1], px[2]])
            .collect(),
        _ => return Err(MediaError::UnsupportedPng { path: path.to_path_buf() }),
    };
    Frame::from_u8(info.width, info.height, &rgb)
}

fn load_raw_frames(path: &Path, manifest: &ClipManifest) -> Result<Vec<Frame>, MediaError> {
    let mut bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| io_err(path, e))?;
    let frame_len = manifest.width as usize * manifest.height as usize * 3;
    let want = frame_len * manifest.num_frames;
    if bytes.len() != want {
        return Err(MediaError::RawSizeMismatch { path: path.to_path_buf(), got: bytes.len(), want });
    }
    bytes
        .chunks_exact(frame_len)
        .map(|chunk| Frame::from_u8(manifest.width, manifest.height, chunk))
        .collect()
}

/// Writes a clip to disk along with its manifest.
///
/// For `PngSequence`, `path` is the clip directory (created if absent) and
/// frames become zero-padded `NNNNNN.png` files next to `manifest.json`.
/// For `RawRgb8`, `path` is the `.rgb` file and the manifest is written as
/// `<stem>.json` beside it.
pub fn write_clip(clip: &Clip, path: &Path, format: ClipFormat) -> Result<(), MediaError> {
    let manifest = clip.manifest();
    match format {
        ClipFormat::PngSequence => {
            fs::create_dir_all(path).map_err(|e| io_err(path, e))?;
            for (i, frame) in clip.frames().iter().enumerate() {
                write_png_frame(&path.join(format!("{i:06}.png")), frame)?;
            }
            write_manifest(&path.join("manifest.json"), &manifest)
        }
        ClipFormat::RawRgb8 => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
                }
            }
            let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
            let mut out = BufWriter::new(file);
            for frame in clip.frames() {
                out.write_all(&frame.to_u8()).map_err(|e| io_err(path, e))?;
            }
            out.flush().map_err(|e| io_err(path, e))?;
            write_manifest(&path.with_extension("json"), &manifest)
        }
    }
}

fn write_png_frame(path: &Path, frame: &Frame) -> Result<(), MediaError> {
    let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), frame.width, frame.height);
    encoder.set_color(png::ColorType::Rgb);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder
        .write_header()
        .map_err(|e| MediaError::PngEncode { path: path.to_path_buf(), source: e })?;
    writer
        .write_image_data(&frame.to_u8())
        .map_err(|e| MediaError::PngEncode { path: path.to_path_buf(), source: e })?;
    Ok(())
}

/// Locates the manifest for a stored clip: `manifest.json` inside a
/// PNG-sequence directory, or `<stem>.json` next to a raw `.rgb` file.
pub fn manifest_path_for(clip_path: &Path) -> PathBuf {
    if clip_path.is_dir() {
        clip_path.join("manifest.json")
    } else {
        clip_path.with_extension("json")
    }
}

/// Loads a clip given only its storage path, reading the manifest from the
/// conventional location.
pub fn load_clip_auto(clip_path: &Path) -> Result<(Clip, ClipManifest), MediaError> {
    let manifest = read_manifest(&manifest_path_for(clip_path))?;
    let clip = load_clip(clip_path, &manifest)?;
    Ok((clip, manifest))
}

/// Pads a short clip with seeded uniform noise or truncates a long one so
/// the result has exactly `target` frames. Padded indices are reported so
/// they can be excluded downstream.
pub fn standardize_length(
    clip: &Clip,
    target: usize,
    rng_seed: u64,
) -> Result<(Clip, PadMask), MediaError> {
    if target == 0 {
        return Err(MediaError::BadTarget);
    }
    let n = clip.num_frames();
    if n == target {
        return Ok((clip.clone(), PadMask::empty()));
    }
    if n > target {
        let frames = clip.frames()[..target].to_vec();
        return Ok((clip.with_frames(frames)?, PadMask::empty()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut frames = clip.frames().to_vec();
    for _ in n..target {
        frames.push(noise_frame(clip.width(), clip.height(), &mut rng));
    }
    let pad = PadMask::from_indices(n..target);
    Ok((clip.with_frames(frames)?, pad))
}
