use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::verify::Report;
use crate::Outcome;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub file: String,
    pub name: String,
    pub n: Option<usize>,
    pub partition: String,
    pub signs: String,
    #[serde(rename = "dim_gL")]
    pub dim_gl: Option<usize>,
    pub berger: String,
    pub realize: String,
    pub probe_rank: Option<usize>,
    pub probe_residual: Option<f64>,
    pub status: String,
}

impl SummaryRow {
    fn failing(&self) -> bool {
        self.status != "pass"
    }
}

fn verdict(flag: Option<bool>) -> String {
    match flag {
        Some(true) => "pass",
        Some(false) => "fail",
        None => "-",
    }
    .to_string()
}

pub fn row_for(path: &Path) -> SummaryRow {
    let file = path.display().to_string();
    let parsed = fs::read_to_string(path)
        .map_err(|e| e.to_string())
        .and_then(|t| serde_json::from_str::<Report>(&t).map_err(|e| e.to_string()));
    match parsed {
        Ok(r) => {
            let probe = r.stages.probe.as_ref();
            let span = probe.and_then(|p| p.span.as_ref());
            SummaryRow {
                file,
                n: Some(r.n),
                partition: r.partition.clone(),
                signs: r.signs.clone(),
                dim_gl: r.stages.berger.as_ref().map(|b| b.dim_gl).or(span.map(|s| s.dim_gl)),
                berger: verdict(r.stages.berger.as_ref().map(|b| b.passed)),
                realize: verdict(r.stages.realize.as_ref().map(|s| s.passed)),
                probe_rank: span.map(|s| s.span_rank),
                probe_residual: span.map(|s| s.max_membership_residual),
                status: if r.passed { "pass" } else { "fail" }.to_string(),
                name: r.name,
            }
        }
        Err(e) => SummaryRow {
            file,
            name: path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
            n: None,
            partition: String::new(),
            signs: String::new(),
            dim_gl: None,
            berger: "-".into(),
            realize: "-".into(),
            probe_rank: None,
            probe_residual: None,
            status: format!("error: {e}"),
        },
    }
}

/// Rows with failing or unreadable reports first, input order otherwise.
pub fn summarize(files: &[PathBuf]) -> Vec<SummaryRow> {
    let mut rows: Vec<SummaryRow> = files.iter().map(|p| row_for(p)).collect();
    rows.sort_by_key(|r| !r.failing());
    rows
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_else(|| "-".into())
}

pub fn render_table(rows: &[SummaryRow]) -> String {
    let header =
        ["name", "n", "partition", "signs", "dim_gL", "berger", "realize", "probe_rank", "probe_residual", "status"];
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.name.clone(),
                opt(&r.n),
                r.partition.clone(),
                r.signs.clone(),
                opt(&r.dim_gl),
                r.berger.clone(),
                r.realize.clone(),
                opt(&r.probe_rank),
                r.probe_residual.map(|v| format!("{v:.2e}")).unwrap_or_else(|| "-".into()),
                r.status.clone(),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|c| cells.iter().map(|row| row[c].chars().count()).chain([header[c].len()]).max().unwrap_or(0))
        .collect();
    let line = |row: Vec<String>| {
        let padded: Vec<String> = row.iter().zip(&widths).map(|(s, &w)| format!("{s:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.iter().map(|s| s.to_string()).collect());
    for row in cells {
        out += &line(row);
    }
    out
}

pub fn write_csv(rows: &[SummaryRow], path: &Path) -> Result<(), String> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| e.to_string())?;
    for row in rows {
        writer.serialize(row).map_err(|e| e.to_string())?;
    }
    writer.flush().map_err(|e| e.to_string())
}

/// `report`: prints the table, optionally writes CSV. Exit 0 when every row
/// passes, 1 when some verification failed, 2 when a file was unreadable.
pub fn cmd_report(files: &[PathBuf], csv_out: Option<&Path>) -> (Outcome, Vec<SummaryRow>, String) {
    let rows = summarize(files);
    let table = render_table(&rows);
    let mut outcome = rows.iter().fold(Outcome::Pass, |acc, r| {
        acc.max(match r.status.as_str() {
            "pass" => Outcome::Pass,
            "fail" => Outcome::Fail,
            _ => Outcome::InputError,
        })
    });
    if let Some(path) = csv_out {
        if let Err(e) = write_csv(&rows, path) {
            eprintln!("error: cannot write {}: {e}", path.display());
            outcome = Outcome::InputError;
        }
    }
    (outcome, rows, table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_gives_header_only() {
        let (outcome, rows, table) = cmd_report(&[], None);
        assert_eq!(outcome, Outcome::Pass);
        assert!(rows.is_empty());
        assert_eq!(table.lines().count(), 1);
    }

    #[test]
    fn unreadable_file_is_an_error_row() {
        let row = row_for(Path::new("/nonexistent/report.json"));
        assert!(row.status.starts_with("error"));
        assert_eq!(row.name, "report");
    }
}
