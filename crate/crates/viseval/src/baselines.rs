//! Non-learned reference reconstructors, plus the two-frame freeze
//! synthesis used to demonstrate what whole-clip metrics fail to see.

use thiserror::Error;

use crate::corrupt::CorruptedClip;
use crate::media::{Clip, Frame, MediaError};

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("every frame is corrupted; nothing to reconstruct from")]
    AllFramesCorrupted,
    #[error("freeze synthesis needs at least 2 frames, got {0}")]
    ClipTooShort(usize),
    #[error(transparent)]
    Media(#[from] MediaError),
}

/// Replaces each masked frame with the nearest preceding uncorrupted
/// frame, falling back to the nearest following one at the clip start.
pub fn reconstruct_hold(corrupted: &CorruptedClip) -> Result<Clip, BaselineError> {
    let clip = corrupted.clip();
    let n = clip.num_frames();
    let masked: Vec<bool> = (0..n).map(|i| corrupted.mask().contains(i)).collect();
    if masked.iter().all(|&m| m) {
        return Err(BaselineError::AllFramesCorrupted);
    }
    let mut frames: Vec<Frame> = clip.frames().to_vec();
    for i in 0..n {
        if !masked[i] {
            continue;
        }
        let source = (0..i)
            .rev()
            .find(|&j| !masked[j])
            .or_else(|| (i + 1..n).find(|&j| !masked[j]))
            .expect("an uncorrupted frame exists");
        frames[i] = clip.frame(source).clone();
    }
    Ok(clip.with_frames(frames)?)
}

/// Linearly interpolates each masked run from its bracketing uncorrupted
/// frames; runs with only one valid side fall back to holding that side.
pub fn reconstruct_linear(corrupted: &CorruptedClip) -> Result<Clip, BaselineError> {
    let clip = corrupted.clip();
    let n = clip.num_frames();
    let masked: Vec<bool> = (0..n).map(|i| corrupted.mask().contains(i)).collect();
    if masked.iter().all(|&m| m) {
        return Err(BaselineError::AllFramesCorrupted);
    }
    let mut frames: Vec<Frame> = clip.frames().to_vec();
    let mut i = 0;
    while i < n {
        if !masked[i] {
            i += 1;
            continue;
        }
        let run_start = i;
        let mut run_end = i;
        while run_end + 1 < n && masked[run_end + 1] {
            run_end += 1;
        }
        let before = run_start.checked_sub(1).filter(|&j| !masked[j]);
        let after = Some(run_end + 1).filter(|&j| j < n);
        for (k, frame) in frames.iter_mut().enumerate().take(run_end + 1).skip(run_start) {
            *frame = match (before, after) {
                (Some(j), Some(m)) => lerp_frames(clip.frame(j), clip.frame(m), j, m, k),
                (Some(j), None) => clip.frame(j).clone(),
                (None, Some(m)) => clip.frame(m).clone(),
                (None, None) => unreachable!("run covers the whole clip"),
            };
        }
        i = run_end + 1;
    }
    Ok(clip.with_frames(frames)?)
}

/// Pixelwise `((k-i)*f_j + (i-j)*f_k) / (k-j)`, evaluated in f64 with a
/// single division so index-linear sequences reconstruct exactly.
fn lerp_frames(fj: &Frame, fk: &Frame, j: usize, k: usize, i: usize) -> Frame {
    let wj = (k - i) as f64;
    let wk = (i - j) as f64;
    let denom = (k - j) as f64;
    let data: Vec<f32> = fj
        .data()
        .iter()
        .zip(fk.data())
        .map(|(&a, &b)| (((wj * f64::from(a)) + (wk * f64::from(b))) / denom) as f32)
        .collect();
    Frame::new(fj.width(), fj.height(), data).expect("lerp of unit-interval pixels stays in range")
}

/// The two-frame synthetic of the metric-deficiency demonstration: the
/// first frame repeated ceil(n/2) times, then the last frame floor(n/2)
/// times.
pub fn synth_freeze(clip: &Clip) -> Result<Clip, BaselineError> {
    let n = clip.num_frames();
    if n < 2 {
        return Err(BaselineError::ClipTooShort(n));
    }
    let head = n.div_ceil(2);
    let first = clip.frame(0).clone();
    let last = clip.frame(n - 1).clone();
    let frames: Vec<Frame> = (0..n).map(|i| if i < head { first.clone() } else { last.clone() }).collect();
    Ok(clip.with_frames(frames)?)
}
