use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use viseval::report::{aggregate, emit_csv, emit_json, GroupBy};
use viseval::ClipReport;

use crate::common::{emit_document, Outcome};

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory of per-clip *.report.json files
    #[arg(long)]
    pub reports: PathBuf,
    /// Grouping axis for the aggregated table
    #[arg(long, value_enum)]
    pub group_by: GroupByArg,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
    /// Write here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GroupByArg {
    Viseme,
    Corruption,
    Pos,
    Model,
}

impl From<GroupByArg> for GroupBy {
    fn from(g: GroupByArg) -> Self {
        match g {
            GroupByArg::Viseme => GroupBy::Viseme,
            GroupByArg::Corruption => GroupBy::Corruption,
            GroupByArg::Pos => GroupBy::Pos,
            GroupByArg::Model => GroupBy::Model,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TableFormat {
    Csv,
    Json,
}

pub fn run(args: &ReportArgs) -> Result<Outcome> {
    let mut paths: Vec<PathBuf> = fs::read_dir(&args.reports)
        .with_context(|| format!("reading {}", args.reports.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.file_name().is_some_and(|n| n.to_string_lossy().ends_with(".report.json")))
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("no *.report.json files in {}", args.reports.display());
    }

    let group_by: GroupBy = args.group_by.into();
    let mut keyed = Vec::new();
    let mut failures = 0usize;
    for path in &paths {
        let parsed: Result<ClipReport> = fs::read_to_string(path)
            .map_err(anyhow::Error::from)
            .and_then(|text| Ok(serde_json::from_str(&text)?));
        match parsed {
            Ok(report) => {
                // Reports without the grouped attribute simply don't
                // contribute a row.
                if let Some(key) = report.group_key(group_by) {
                    keyed.push((key, report.metrics));
                }
            }
            Err(err) => {
                failures += 1;
                eprintln!("report {}: {err:#}", path.display());
            }
        }
    }
    if keyed.is_empty() {
        bail!("no report carries the {:?} grouping attribute", args.group_by);
    }

    let table = aggregate(&keyed)?;
    let rendered = match args.format {
        TableFormat::Csv => emit_csv(&table),
        TableFormat::Json => {
            let mut s = emit_json(&table)?;
            s.push('\n');
            s
        }
    };
    emit_document(args.output.as_deref(), &rendered)?;
    Ok(if failures == 0 { Outcome::Clean } else { Outcome::Partial(failures) })
}
