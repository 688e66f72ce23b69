//! Praat long-format TextGrid parsing (Montreal Forced Aligner output).

use super::{parse_err, AlignError, AlignmentTrack, Interval};

/// Labels an aligner emits for non-speech spans. These intervals become
/// gaps rather than entries in the parsed tiers.
const SILENCE_LABELS: [&str; 5] = ["", "sil", "sp", "spn", "<eps>"];

#[derive(Debug)]
struct RawInterval {
    start: Option<f64>,
    end: Option<f64>,
    text: Option<String>,
    line: usize,
}

#[derive(Debug)]
struct RawTier {
    name: Option<String>,
    class: Option<String>,
    intervals: Vec<RawInterval>,
    current: Option<RawInterval>,
}

impl RawTier {
    fn finish_interval(&mut self) -> Result<(), AlignError> {
        if let Some(iv) = self.current.take() {
            if iv.start.is_none() || iv.end.is_none() || iv.text.is_none() {
                return Err(parse_err(iv.line, "interval is missing xmin, xmax, or text"));
            }
            self.intervals.push(iv);
        }
        Ok(())
    }
}

/// Parses the "words" and "phones" interval tiers out of a long-format
/// TextGrid. Numeric times are taken verbatim from the document; empty and
/// silence-labeled intervals are dropped (their span stays as a gap).
pub fn parse_textgrid(text: &str) -> Result<AlignmentTrack, AlignError> {
    let head: String = text.lines().take(5).collect();
    if !head.contains("TextGrid") {
        return Err(parse_err(1, "not a Praat TextGrid document"));
    }

    let mut tiers: Vec<RawTier> = Vec::new();
    let mut saw_item = false;

    for (zero_line, raw) in text.lines().enumerate() {
        let line_no = zero_line + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }

        if line.starts_with("item [") || line.starts_with("item[") {
            saw_item = true;
            if line.contains("[]") {
                continue; // the "item []:" list header
            }
            if let Some(tier) = tiers.last_mut() {
                tier.finish_interval()?;
            }
            tiers.push(RawTier { name: None, class: None, intervals: Vec::new(), current: None });
            continue;
        }

        if line.starts_with("intervals [") || line.starts_with("intervals[") {
            let tier = tiers
                .last_mut()
                .ok_or_else(|| parse_err(line_no, "interval outside of any tier"))?;
            tier.finish_interval()?;
            tier.current = Some(RawInterval { start: None, end: None, text: None, line: line_no });
            continue;
        }

        let Some(eq) = line.find('=') else { continue };
        let key = line[..eq].trim();
        let value = line[eq + 1..].trim();
        let tier = tiers.last_mut();

        match (key, tier) {
            ("class", Some(t)) if t.current.is_none() => {
                t.class = Some(unquote(value, line_no)?);
            }
            ("name", Some(t)) if t.current.is_none() => {
                t.name = Some(unquote(value, line_no)?);
            }
            ("xmin", Some(t)) => {
                if let Some(iv) = t.current.as_mut() {
                    iv.start = Some(parse_time(value, line_no)?);
                }
            }
            ("xmax", Some(t)) => {
                if let Some(iv) = t.current.as_mut() {
                    iv.end = Some(parse_time(value, line_no)?);
                }
            }
            ("text", Some(t)) => {
                if let Some(iv) = t.current.as_mut() {
                    iv.text = Some(unquote(value, line_no)?);
                }
            }
            _ => {}
        }
    }

    if let Some(tier) = tiers.last_mut() {
        tier.finish_interval()?;
    }
    if !saw_item {
        return Err(parse_err(1, "no tiers found; is this a long-format TextGrid?"));
    }

    let words = take_tier(&tiers, "words")?;
    let phones = take_tier(&tiers, "phones")?;
    Ok(AlignmentTrack { words, phones })
}

fn take_tier(tiers: &[RawTier], name: &str) -> Result<Vec<Interval>, AlignError> {
    let tier = tiers
        .iter()
        .find(|t| t.class.as_deref() == Some("IntervalTier") && t.name.as_deref() == Some(name))
        .ok_or_else(|| AlignError::MissingTier(name.to_string()))?;

    let mut out = Vec::new();
    let mut prev_end = f64::NEG_INFINITY;
    for iv in &tier.intervals {
        let (start, end) = (iv.start.unwrap(), iv.end.unwrap());
        if end <= start {
            return Err(AlignError::BadInterval { line: iv.line, start, end });
        }
        if start < prev_end {
            return Err(AlignError::NonMonotone { line: iv.line, start });
        }
        prev_end = end;
        let label = iv.text.as_deref().unwrap();
        if SILENCE_LABELS.contains(&label) {
            continue;
        }
        out.push(Interval { label: label.to_string(), start, end });
    }
    Ok(out)
}

fn parse_time(value: &str, line: usize) -> Result<f64, AlignError> {
    value
        .parse()
        .map_err(|_| parse_err(line, format!("bad numeric time {value:?}")))
}

fn unquote(value: &str, line: usize) -> Result<String, AlignError> {
    let inner = value
        .strip_prefix('"')
        .and_then(|v| v.strip_suffix('"'))
        .ok_or_else(|| parse_err(line, format!("expected quoted string, got {value:?}")))?;
    Ok(inner.replace("\"\"", "\""))
}
