use std::path::Path;

use crate::report::{OutputFile, RunReport, Series};
use crate::store::{sha256_hex, write_atomic};

#[derive(Debug, thiserror::Error)]
pub enum PlotError {
    #[error("unknown series {name:?}; available: {available:?}")]
    UnknownSeries { name: String, available: Vec<String> },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn series_csv(series: &Series) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&series.columns).expect("in-memory write");
    for row in &series.rows {
        w.write_record(row.iter().map(|v| v.to_string())).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Writes `<name>.csv` into `dir` for every selected series; `None` selects all.
pub fn emit_plot_data(report: &RunReport, selection: Option<&[String]>, dir: &Path) -> Result<Vec<OutputFile>, PlotError> {
    let all = &report.body.series;
    let names: Vec<String> = match selection {
        Some(sel) => sel.to_vec(),
        None => all.keys().cloned().collect(),
    };
    let mut chosen = Vec::with_capacity(names.len());
    for name in names {
        match all.get(&name) {
            Some(s) => chosen.push((name, s)),
            None => {
                return Err(PlotError::UnknownSeries {
                    name,
                    available: all.keys().cloned().collect(),
                })
            }
        }
    }
    let mut out = Vec::new();
    for (name, series) in chosen {
        let bytes = series_csv(series);
        let file = format!("{name}.csv");
        write_atomic(&dir.join(&file), &bytes)?;
        out.push(OutputFile {
            path: file,
            sha256: sha256_hex(&bytes),
        });
    }
    Ok(out)
}
