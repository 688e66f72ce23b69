//! Per-frame mouth regions from ingested facial landmarks, and cropping.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corrupt::round_count;
use crate::media::Frame;

#[derive(Debug, Error)]
pub enum RoiError {
    #[error("landmark track has {got} entries for a {want}-frame clip")]
    LengthMismatch { got: usize, want: usize },
    #[error("frame {frame}: {message}")]
    BadEntry { frame: usize, message: String },
    #[error("frame {frame}: box [{x0},{y0},{x1},{y1}] degenerate or outside {width}x{height}")]
    BadBox { frame: usize, x0: u32, y0: u32, x1: u32, y1: u32, width: u32, height: u32 },
    #[error("landmark json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Half-open pixel box [x0, x1) x [y0, y1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoiBox {
    pub x0: u32,
    pub y0: u32,
    pub x1: u32,
    pub y1: u32,
}

impl RoiBox {
    pub fn width(&self) -> u32 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> u32 {
        self.y1 - self.y0
    }

    pub fn full_frame(width: u32, height: u32) -> Self {
        RoiBox { x0: 0, y0: 0, x1: width, y1: height }
    }

    fn valid_for(&self, width: u32, height: u32) -> bool {
        self.x0 < self.x1 && self.x1 <= width && self.y0 < self.y1 && self.y1 <= height
    }
}

/// Per-frame mouth boxes; `None` where no landmarks were available.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoiTrack {
    boxes: Vec<Option<RoiBox>>,
}

impl RoiTrack {
    pub fn from_boxes(boxes: Vec<Option<RoiBox>>) -> Self {
        RoiTrack { boxes }
    }

    pub fn boxes(&self) -> &[Option<RoiBox>] {
        &self.boxes
    }

    pub fn get(&self, frame: usize) -> Option<RoiBox> {
        self.boxes.get(frame).copied().flatten()
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    /// Fraction of frames that carry a box.
    pub fn coverage(&self) -> f64 {
        if self.boxes.is_empty() {
            return 0.0;
        }
        self.boxes.iter().filter(|b| b.is_some()).count() as f64 / self.boxes.len() as f64
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum LandmarkEntry {
    Points { points: Vec<(f64, f64)> },
    Box { #[serde(rename = "box")] bbox: (u32, u32, u32, u32) },
}

/// Parses a landmark JSON document: one entry per frame, each either a
/// mouth polygon (`{"points": [[x,y],...]}`), a precomputed box
/// (`{"box": [x0,y0,x1,y1]}`), or `null`.
///
/// Polygons reduce to their bounding box expanded by `margin` of the box
/// size per side (rounded), then clamped to the frame. Precomputed boxes
/// are clamped as-is.
pub fn parse_landmarks(
    text: &str,
    clip_dims: (u32, u32),
    n_frames: usize,
    margin: f64,
) -> Result<RoiTrack, RoiError> {
    let entries: Vec<Option<LandmarkEntry>> = serde_json::from_str(text)?;
    if entries.len() != n_frames {
        return Err(RoiError::LengthMismatch { got: entries.len(), want: n_frames });
    }
    let (width, height) = clip_dims;
    let mut boxes = Vec::with_capacity(entries.len());
    for (frame, entry) in entries.into_iter().enumerate() {
        let bx = match entry {
            None => None,
            Some(LandmarkEntry::Points { points }) => {
                Some(box_from_points(&points, frame, width, height, margin)?)
            }
            Some(LandmarkEntry::Box { bbox: (x0, y0, x1, y1) }) => {
                let clamped = RoiBox { x0, y0, x1: x1.min(width), y1: y1.min(height) };
                if !clamped.valid_for(width, height) {
                    return Err(RoiError::BadBox { frame, x0, y0, x1, y1, width, height });
                }
                Some(clamped)
            }
        };
        boxes.push(bx);
    }
    Ok(RoiTrack { boxes })
}

fn box_from_points(
    points: &[(f64, f64)],
    frame: usize,
    width: u32,
    height: u32,
    margin: f64,
) -> Result<RoiBox, RoiError> {
    if points.is_empty() {
        return Err(RoiError::BadEntry { frame, message: "empty point list".into() });
    }
    let mut min_x = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for &(x, y) in points {
        if !x.is_finite() || !y.is_finite() {
            return Err(RoiError::BadEntry { frame, message: "non-finite point".into() });
        }
        min_x = min_x.min(x);
        max_x = max_x.max(x);
        min_y = min_y.min(y);
        max_y = max_y.max(y);
    }
    let x0 = min_x.floor();
    let y0 = min_y.floor();
    let x1 = max_x.ceil();
    let y1 = max_y.ceil();
    let dx = round_count(margin * (x1 - x0)) as f64;
    let dy = round_count(margin * (y1 - y0)) as f64;
    let bx = RoiBox {
        x0: (x0 - dx).max(0.0) as u32,
        y0: (y0 - dy).max(0.0) as u32,
        x1: ((x1 + dx).min(f64::from(width))).max(0.0) as u32,
        y1: ((y1 + dy).min(f64::from(height))).max(0.0) as u32,
    };
    if !bx.valid_for(width, height) {
        return Err(RoiError::BadBox {
            frame,
            x0: bx.x0,
            y0: bx.y0,
            x1: bx.x1,
            y1: bx.y1,
            width,
            height,
        });
    }
    Ok(bx)
}

/// Extracts the sub-image covered by `box_`; output is
/// `(x1-x0) x (y1-y0)`. The box must be valid for the frame.
pub fn crop_roi(frame: &Frame, box_: RoiBox) -> Frame {
    let (w, h) = (box_.width(), box_.height());
    let mut data = Vec::with_capacity(w as usize * h as usize * 3);
    for y in box_.y0..box_.y1 {
        for x in box_.x0..box_.x1 {
            for c in 0..3 {
                data.push(frame.get(x, y, c));
            }
        }
    }
    Frame::new(w, h, data).expect("crop of a valid frame is valid")
}
