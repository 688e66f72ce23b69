//! Full-frame and ROI-masked reconstruction metrics: MSE, L1, PSNR, and
//! windowed SSIM, restricted to an evaluated frame set.
//!
//! All pooling runs frame-major, row-major in double precision, so results
//! are bit-stable regardless of caller-side parallelism.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corrupt::CorruptionMask;
use crate::media::{Clip, Frame, PadMask};
use crate::roi::{crop_roi, RoiTrack};

/// SSIM window edge (Wang et al. defaults).
pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;
/// Peak signal value; pixels live in [0, 1].
pub const PEAK: f64 = 1.0;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("clips are {a_w}x{a_h}x{a_n} vs {b_w}x{b_h}x{b_n}")]
    DimensionMismatch { a_w: u32, a_h: u32, a_n: usize, b_w: u32, b_h: u32, b_n: usize },
    #[error("evaluated frame set is empty")]
    EmptyEvaluatedSet,
    #[error("selector index {index} out of range for {n_frames} frames")]
    FrameIndexOutOfRange { index: usize, n_frames: usize },
    #[error("frame of {width}x{height} is smaller than the {window}x{window} SSIM window")]
    FrameTooSmall { width: u32, height: u32, window: usize },
    #[error("no ROI box on any evaluated frame")]
    ZeroRoiCoverage,
    #[error("ROI track has {got} entries for a {want}-frame clip")]
    RoiTrackLength { got: usize, want: usize },
}

/// Which frames to pool over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scope {
    /// Only the frames the corruption mask names.
    #[serde(rename = "corrupted")]
    CorruptedOnly,
    /// Every frame of the clip.
    #[serde(rename = "whole")]
    WholeClip,
}

impl Scope {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scope::CorruptedOnly => "corrupted",
            Scope::WholeClip => "whole",
        }
    }
}

/// Selects the evaluated frame set: the masked frames or the whole clip,
/// always minus padding.
#[derive(Debug, Clone, Default)]
pub struct FrameSetSelector {
    scope: Option<BTreeSet<usize>>,
    pad: BTreeSet<usize>,
}

impl FrameSetSelector {
    pub fn corrupted_only(mask: &CorruptionMask, pad: &PadMask) -> Self {
        FrameSetSelector {
            scope: Some(mask.indices.iter().copied().collect()),
            pad: pad.iter().collect(),
        }
    }

    pub fn whole_clip(pad: &PadMask) -> Self {
        FrameSetSelector { scope: None, pad: pad.iter().collect() }
    }

    pub fn scope(&self) -> Scope {
        if self.scope.is_some() {
            Scope::CorruptedOnly
        } else {
            Scope::WholeClip
        }
    }

    /// Ascending evaluated frame indices for an `n_frames`-long clip.
    pub fn evaluated(&self, n_frames: usize) -> Result<Vec<usize>, MetricsError> {
        let frames: Vec<usize> = match &self.scope {
            Some(mask) => {
                if let Some(&index) = mask.iter().find(|&&i| i >= n_frames) {
                    return Err(MetricsError::FrameIndexOutOfRange { index, n_frames });
                }
                mask.iter().copied().filter(|i| !self.pad.contains(i)).collect()
            }
            None => (0..n_frames).filter(|i| !self.pad.contains(i)).collect(),
        };
        if frames.is_empty() {
            return Err(MetricsError::EmptyEvaluatedSet);
        }
        Ok(frames)
    }
}

fn check_dims(a: &Clip, b: &Clip) -> Result<(), MetricsError> {
    if a.width() != b.width() || a.height() != b.height() || a.num_frames() != b.num_frames() {
        return Err(MetricsError::DimensionMismatch {
            a_w: a.width(),
            a_h: a.height(),
            a_n: a.num_frames(),
            b_w: b.width(),
            b_h: b.height(),
            b_n: b.num_frames(),
        });
    }
    Ok(())
}

fn frame_sq_abs_sums(a: &Frame, b: &Frame) -> (f64, f64) {
    let mut sq = 0.0f64;
    let mut abs = 0.0f64;
    for (&x, &y) in a.data().iter().zip(b.data()) {
        let d = f64::from(x) - f64::from(y);
        sq += d * d;
        abs += d.abs();
    }
    (sq, abs)
}

/// Mean squared difference pooled over all pixels of all evaluated frames.
pub fn mse(a: &Clip, b: &Clip, sel: &FrameSetSelector) -> Result<f64, MetricsError> {
    check_dims(a, b)?;
    let frames = sel.evaluated(a.num_frames())?;
    let mut sum = 0.0f64;
    let mut count = 0usize;
    for &i in &frames {
        let (sq, _) = frame_sq_abs_sums(a.frame(i), b.frame(i));
        sum += sq;
        count += a.frame(i).data().len();
    }
    Ok(sum / count as f64)
}

/// Mean absolute difference pooled over all pixels of all evaluated frames.
pub fn l1(a: &Clip, b: &Clip, sel: &FrameSetSelector) -> Result<f64, MetricsError> {
    check_dims(a, b)?;
    let frames = sel.evaluated(a.num_frames())?;
    let mut sum = 0.0f64;
    let mut count = 0usize;
    for &i in &frames {
        let (_, abs) = frame_sq_abs_sums(a.frame(i), b.frame(i));
        sum += abs;
        count += a.frame(i).data().len();
    }
    Ok(sum / count as f64)
}

/// `10 * log10(PEAK^2 / mse)` in dB; zero MSE maps to the +inf sentinel.
pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (PEAK * PEAK / mse).log10()
    }
}

/// PSNR from the pooled MSE over the evaluated frames.
pub fn psnr(a: &Clip, b: &Clip, sel: &FrameSetSelector) -> Result<f64, MetricsError> {
    Ok(psnr_from_mse(mse(a, b, sel)?))
}

/// Mean windowed SSIM over the evaluated frames: per-channel 11x11
/// Gaussian window (sigma 1.5), valid positions only, averaged over
/// windows, then channels, then frames.
pub fn ssim(a: &Clip, b: &Clip, sel: &FrameSetSelector) -> Result<f64, MetricsError> {
    check_dims(a, b)?;
    let frames = sel.evaluated(a.num_frames())?;
    let mut sum = 0.0f64;
    for &i in &frames {
        sum += ssim_frame(a.frame(i), b.frame(i))?;
    }
    Ok(sum / frames.len() as f64)
}

/// SSIM of one frame pair: mean of the three per-channel values.
pub fn ssim_frame(a: &Frame, b: &Frame) -> Result<f64, MetricsError> {
    let (w, h) = (a.width() as usize, a.height() as usize);
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(MetricsError::FrameTooSmall {
            width: a.width(),
            height: a.height(),
            window: SSIM_WINDOW,
        });
    }
    let kernel = gaussian_kernel();
    let mut total = 0.0f64;
    for c in 0..3 {
        total += ssim_channel(a, b, c, &kernel);
    }
    Ok(total / 3.0)
}

/// Normalized 1-D Gaussian; the 2-D window is its outer product.
fn gaussian_kernel() -> [f64; SSIM_WINDOW] {
    let half = (SSIM_WINDOW / 2) as f64;
    let mut k = [0.0; SSIM_WINDOW];
    let mut sum = 0.0;
    for (i, v) in k.iter_mut().enumerate() {
        let d = i as f64 - half;
        *v = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
        sum += *v;
    }
    for v in &mut k {
        *v /= sum;
    }
    k
}

/// Valid-mode separable Gaussian filter of a `w x h` plane.
fn gaussian_filter(plane: &[f64], w: usize, h: usize, kernel: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let ow = w - SSIM_WINDOW + 1;
    let oh = h - SSIM_WINDOW + 1;
    let mut horizontal = vec![0.0f64; ow * h];
    for y in 0..h {
        for x in 0..ow {
            let mut acc = 0.0;
            for (d, &kv) in kernel.iter().enumerate() {
                acc += kv * plane[y * w + x + d];
            }
            horizontal[y * ow + x] = acc;
        }
    }
    let mut out = vec![0.0f64; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            let mut acc = 0.0;
            for (d, &kv) in kernel.iter().enumerate() {
                acc += kv * horizontal[(y + d) * ow + x];
            }
            out[y * ow + x] = acc;
        }
    }
    out
}

fn channel_plane(frame: &Frame, c: usize) -> Vec<f64> {
    frame.data().iter().skip(c).step_by(3).map(|&v| f64::from(v)).collect()
}

fn ssim_channel(a: &Frame, b: &Frame, c: usize, kernel: &[f64; SSIM_WINDOW]) -> f64 {
    let (w, h) = (a.width() as usize, a.height() as usize);
    let pa = channel_plane(a, c);
    let pb = channel_plane(b, c);
    let paa: Vec<f64> = pa.iter().map(|v| v * v).collect();
    let pbb: Vec<f64> = pb.iter().map(|v| v * v).collect();
    let pab: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();

    let mu_a = gaussian_filter(&pa, w, h, kernel);
    let mu_b = gaussian_filter(&pb, w, h, kernel);
    let m_aa = gaussian_filter(&paa, w, h, kernel);
    let m_bb = gaussian_filter(&pbb, w, h, kernel);
    let m_ab = gaussian_filter(&pab, w, h, kernel);

    let c1 = (SSIM_K1 * PEAK) * (SSIM_K1 * PEAK);
    let c2 = (SSIM_K2 * PEAK) * (SSIM_K2 * PEAK);
    let mut sum = 0.0f64;
    for i in 0..mu_a.len() {
        let (ma, mb) = (mu_a[i], mu_b[i]);
        let va = m_aa[i] - ma * ma;
        let vb = m_bb[i] - mb * mb;
        let cov = m_ab[i] - ma * mb;
        let num = (2.0 * ma * mb + c1) * (2.0 * cov + c2);
        let den = (ma * ma + mb * mb + c1) * (va + vb + c2);
        sum += num / den;
    }
    sum / mu_a.len() as f64
}

/// `L_total`: the frame loss plus the ROI loss.
pub fn total_loss(frame_l1: f64, roi_l1: f64) -> f64 {
    frame_l1 + roi_l1
}

/// ROI-masked metrics plus how much of the evaluated set had boxes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoiMetricsReport {
    pub mse: f64,
    pub l1: f64,
    #[serde(with = "psnr_serde")]
    pub psnr_db: f64,
    pub ssim: f64,
    pub coverage: f64,
    pub evaluated_frames: usize,
}

/// Metrics on mouth crops: both clips are cropped with the same
/// ground-truth box per frame; frames without a box are skipped and
/// reported through `coverage`.
pub fn roi_metrics(
    a: &Clip,
    b: &Clip,
    sel: &FrameSetSelector,
    roi: &RoiTrack,
) -> Result<RoiMetricsReport, MetricsError> {
    check_dims(a, b)?;
    if roi.len() != a.num_frames() {
        return Err(MetricsError::RoiTrackLength { got: roi.len(), want: a.num_frames() });
    }
    let frames = sel.evaluated(a.num_frames())?;
    let mut sq_sum = 0.0f64;
    let mut abs_sum = 0.0f64;
    let mut count = 0usize;
    let mut ssim_sum = 0.0f64;
    let mut covered = 0usize;
    for &i in &frames {
        let Some(bx) = roi.get(i) else { continue };
        let ca = crop_roi(a.frame(i), bx);
        let cb = crop_roi(b.frame(i), bx);
        let (sq, abs) = frame_sq_abs_sums(&ca, &cb);
        sq_sum += sq;
        abs_sum += abs;
        count += ca.data().len();
        ssim_sum += ssim_frame(&ca, &cb)?;
        covered += 1;
    }
    if covered == 0 {
        return Err(MetricsError::ZeroRoiCoverage);
    }
    let mse = sq_sum / count as f64;
    Ok(RoiMetricsReport {
        mse,
        l1: abs_sum / count as f64,
        psnr_db: psnr_from_mse(mse),
        ssim: ssim_sum / covered as f64,
        coverage: covered as f64 / frames.len() as f64,
        evaluated_frames: covered,
    })
}

/// Per-frame metric vectors over the evaluated indices, for recomputing
/// alternative aggregations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerFrameMetrics {
    pub frames: Vec<usize>,
    pub mse: Vec<f64>,
    pub l1: Vec<f64>,
    #[serde(with = "psnr_vec_serde")]
    pub psnr_db: Vec<f64>,
    pub ssim: Vec<f64>,
}

/// Per-clip metric values, full-frame and optionally ROI-masked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub mse: f64,
    pub l1: f64,
    #[serde(with = "psnr_serde")]
    pub psnr_db: f64,
    pub ssim: f64,
    pub evaluated_frames: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_frame: Option<PerFrameMetrics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roi: Option<RoiMetricsReport>,
}

/// Computes the full report for a reconstruction `b` of ground truth `a`.
pub fn evaluate_pair(
    a: &Clip,
    b: &Clip,
    sel: &FrameSetSelector,
    roi: Option<&RoiTrack>,
    per_frame: bool,
) -> Result<MetricsReport, MetricsError> {
    check_dims(a, b)?;
    let frames = sel.evaluated(a.num_frames())?;

    let mut sq_sum = 0.0f64;
    let mut abs_sum = 0.0f64;
    let mut count = 0usize;
    let mut ssim_sum = 0.0f64;
    let mut pf = PerFrameMetrics {
        frames: Vec::new(),
        mse: Vec::new(),
        l1: Vec::new(),
        psnr_db: Vec::new(),
        ssim: Vec::new(),
    };
    for &i in &frames {
        let (sq, abs) = frame_sq_abs_sums(a.frame(i), b.frame(i));
        let pixels = a.frame(i).data().len();
        let s = ssim_frame(a.frame(i), b.frame(i))?;
        sq_sum += sq;
        abs_sum += abs;
        count += pixels;
        ssim_sum += s;
        if per_frame {
            let frame_mse = sq / pixels as f64;
            pf.frames.push(i);
            pf.mse.push(frame_mse);
            pf.l1.push(abs / pixels as f64);
            pf.psnr_db.push(psnr_from_mse(frame_mse));
            pf.ssim.push(s);
        }
    }
    let mse = sq_sum / count as f64;
    Ok(MetricsReport {
        mse,
        l1: abs_sum / count as f64,
        psnr_db: psnr_from_mse(mse),
        ssim: ssim_sum / frames.len() as f64,
        evaluated_frames: frames.len(),
        per_frame: per_frame.then_some(pf),
        roi: match roi {
            Some(track) => Some(roi_metrics(a, b, sel, track)?),
            None => None,
        },
    })
}

/// Serializes +inf PSNR as the string "inf"; JSON has no infinity literal.
pub mod psnr_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum NumOrInf {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match NumOrInf::deserialize(d)? {
            NumOrInf::Num(v) => Ok(v),
            NumOrInf::Str(s) if s == "inf" => Ok(f64::INFINITY),
            NumOrInf::Str(s) => Err(serde::de::Error::custom(format!("bad PSNR value {s:?}"))),
        }
    }
}

/// Vector variant of [`psnr_serde`].
pub mod psnr_vec_serde {
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(vs: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(vs.len()))?;
        for v in vs {
            if v.is_infinite() {
                seq.serialize_element("inf")?;
            } else {
                seq.serialize_element(v)?;
            }
        }
        seq.end()
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum NumOrInf {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let raw = Vec::<NumOrInf>::deserialize(d)?;
        raw.into_iter()
            .map(|v| match v {
                NumOrInf::Num(v) => Ok(v),
                NumOrInf::Str(s) if s == "inf" => Ok(f64::INFINITY),
                NumOrInf::Str(s) => {
                    Err(serde::de::Error::custom(format!("bad PSNR value {s:?}")))
                }
            })
            .collect()
    }
}
