//! Result emission: deterministic JSON or CSV, plus optional two-column
//! plot-data files for each sweep.

use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use serde_json::Value;

use crate::config::RunConfig;
use crate::Format;

/// A command outcome: a JSON document, flattened CSV rows, optional sweep
/// series for plot-data emission, and the process exit code.
pub struct Outcome {
    pub document: Value,
    pub csv: Vec<Vec<String>>,
    pub sweeps: Vec<Sweep>,
    pub exit_code: u8,
}

pub struct Sweep {
    pub name: String,
    pub header: String,
    pub columns: (Vec<f64>, Vec<f64>),
}

pub fn emit(
    cfg: &RunConfig,
    cli_path: &Option<PathBuf>,
    cli_format: Option<Format>,
    out: &Outcome,
) -> anyhow::Result<()> {
    let format = cli_format.unwrap_or(match cfg.output.format.as_deref() {
        Some("csv") => Format::Csv,
        _ => Format::Json,
    });
    let text = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&out.document)?;
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::new();
            for row in &out.csv {
                s.push_str(&row.join(","));
                s.push('\n');
            }
            s
        }
    };
    let path = cli_path
        .clone()
        .or_else(|| cfg.output.path.clone().map(PathBuf::from));
    match path {
        Some(p) => std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }

    if cfg.output.plot_data {
        let dir = PathBuf::from(cfg.output.plot_dir.as_deref().unwrap_or("plots"));
        std::fs::create_dir_all(&dir)?;
        for sweep in &out.sweeps {
            let mut body = format!("# {}\n", sweep.header);
            for (x, y) in sweep.columns.0.iter().zip(sweep.columns.1.iter()) {
                body.push_str(&format!("{x:.17e} {y:.17e}\n"));
            }
            let file = dir.join(format!("{}.dat", sweep.name));
            std::fs::write(&file, body)
                .with_context(|| format!("writing {}", file.display()))?;
        }
    }
    Ok(())
}
