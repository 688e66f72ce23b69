//! Aggregation of per-clip metrics into grouped tables, dataset
//! statistics, and CSV/JSON emission.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corrupt::{CorruptionKind, CorruptionMask};
use crate::metrics::{psnr_serde, MetricsReport, Scope};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("no reports to aggregate")]
    Empty,
    #[error("table json: {0}")]
    Json(#[from] serde_json::Error),
}

/// One aggregated row: uniform per-clip means of each metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub group: String,
    pub n: usize,
    pub mse: f64,
    pub l1: f64,
    pub ssim: f64,
    #[serde(with = "psnr_serde")]
    pub psnr_db: f64,
}

/// Rows in lexicographic group order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AggregateTable {
    pub rows: Vec<AggregateRow>,
}

/// Mean that is invariant under input permutation: values are sorted
/// before summation so the float reduction order is fixed.
fn stable_mean(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum::<f64>() / values.len() as f64
}

/// Groups reports by key and takes uniform per-clip means.
pub fn aggregate(reports: &[(String, MetricsReport)]) -> Result<AggregateTable, ReportError> {
    if reports.is_empty() {
        return Err(ReportError::Empty);
    }
    let mut groups: BTreeMap<&str, Vec<&MetricsReport>> = BTreeMap::new();
    for (key, report) in reports {
        groups.entry(key).or_default().push(report);
    }
    let rows = groups
        .into_iter()
        .map(|(group, members)| {
            let mut mse: Vec<f64> = members.iter().map(|r| r.mse).collect();
            let mut l1: Vec<f64> = members.iter().map(|r| r.l1).collect();
            let mut ssim: Vec<f64> = members.iter().map(|r| r.ssim).collect();
            let mut psnr: Vec<f64> = members.iter().map(|r| r.psnr_db).collect();
            AggregateRow {
                group: group.to_string(),
                n: members.len(),
                mse: stable_mean(&mut mse),
                l1: stable_mean(&mut l1),
                ssim: stable_mean(&mut ssim),
                psnr_db: stable_mean(&mut psnr),
            }
        })
        .collect();
    Ok(AggregateTable { rows })
}

/// Corpus-level counts in the shape of the dataset-statistics tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub num_speakers: usize,
    pub num_utterances: usize,
    pub num_word_instances: usize,
    pub vocabulary: usize,
    pub avg_video_len_s: f64,
}

/// Inputs to [`dataset_stats`], one per clip.
#[derive(Debug, Clone)]
pub struct StatsEntry {
    pub speaker_id: String,
    pub transcript: Option<String>,
    pub num_frames: usize,
    pub fps: f64,
}

/// Counts speakers, utterances, word instances (whitespace tokens,
/// lowercased), and vocabulary over a clip corpus.
pub fn dataset_stats(entries: &[StatsEntry]) -> DatasetStats {
    let mut speakers = BTreeSet::new();
    let mut vocab = BTreeSet::new();
    let mut word_instances = 0usize;
    let mut total_len = 0.0f64;
    for entry in entries {
        speakers.insert(entry.speaker_id.as_str());
        if let Some(text) = &entry.transcript {
            for token in text.split_whitespace() {
                word_instances += 1;
                vocab.insert(token.to_lowercase());
            }
        }
        if entry.fps > 0.0 {
            total_len += entry.num_frames as f64 / entry.fps;
        }
    }
    DatasetStats {
        num_speakers: speakers.len(),
        num_utterances: entries.len(),
        num_word_instances: word_instances,
        vocabulary: vocab.len(),
        avg_video_len_s: if entries.is_empty() { 0.0 } else { total_len / entries.len() as f64 },
    }
}

/// Corruption provenance carried inside a per-clip report: the sidecar
/// minus the frame index list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorruptionInfo {
    pub kind: CorruptionKind,
    pub params: BTreeMap<String, serde_json::Value>,
    pub seed: u64,
    pub num_corrupted: usize,
}

impl From<&CorruptionMask> for CorruptionInfo {
    fn from(mask: &CorruptionMask) -> Self {
        CorruptionInfo {
            kind: mask.kind,
            params: mask.params.clone(),
            seed: mask.seed,
            num_corrupted: mask.len(),
        }
    }
}

/// The per-clip report document the evaluator writes and the aggregator
/// reads back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipReport {
    pub clip_id: String,
    pub speaker_id: String,
    pub model: String,
    pub scope: Scope,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corruption: Option<CorruptionInfo>,
    pub metrics: MetricsReport,
}

/// Grouping axes for [`aggregate`], one per reference table layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupBy {
    Viseme,
    Corruption,
    Pos,
    Model,
}

impl ClipReport {
    /// The aggregation key for this report, if it carries the grouped
    /// attribute.
    pub fn group_key(&self, by: GroupBy) -> Option<String> {
        match by {
            GroupBy::Model => Some(self.model.clone()),
            GroupBy::Viseme => self
                .corruption
                .as_ref()?
                .params
                .get("viseme")?
                .as_str()
                .map(String::from),
            GroupBy::Pos => {
                self.corruption.as_ref()?.params.get("tag")?.as_str().map(String::from)
            }
            GroupBy::Corruption => {
                let c = self.corruption.as_ref()?;
                Some(match c.params.get("rate").and_then(serde_json::Value::as_f64) {
                    Some(rate) => format!("{}/{rate:.2}", c.kind),
                    None => c.kind.to_string(),
                })
            }
        }
    }
}

pub const CSV_HEADER: &str = "group,n,mse,l1,ssim,psnr_db";

/// Formats with 6 significant digits; infinities print as "inf".
pub fn format_sig6(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".to_string() } else { "-inf".to_string() };
    }
    if v == 0.0 {
        return "0.000000".to_string();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{v:.decimals$}")
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Emits the table as CSV with a stable column order.
pub fn emit_csv(table: &AggregateTable) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in &table.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            csv_field(&row.group),
            row.n,
            format_sig6(row.mse),
            format_sig6(row.l1),
            format_sig6(row.ssim),
            format_sig6(row.psnr_db),
        ));
    }
    out
}

/// Emits the table as JSON with full float precision, so parsing it back
/// reproduces the table exactly.
pub fn emit_json(table: &AggregateTable) -> Result<String, ReportError> {
    Ok(serde_json::to_string_pretty(table)?)
}

pub fn parse_json(text: &str) -> Result<AggregateTable, ReportError> {
    Ok(serde_json::from_str(text)?)
}
