use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::ExperimentConfig;
use crate::{CliError, SCHEMA_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    CertificationFailed,
    Violation,
}

impl Status {
    pub fn exit_code(&self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::CertificationFailed => 2,
            Status::Violation => 3,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Toolkit {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct Document {
    pub schema_version: u32,
    pub toolkit: Toolkit,
    pub command: &'static str,
    pub task: &'static str,
    pub config: Value,
    pub config_sha256: String,
    pub seed: u64,
    pub provenance: Value,
    pub status: Status,
    pub result: Value,
}

impl Document {
    pub fn new(command: &'static str, task: &'static str, config: &ExperimentConfig) -> Self {
        let echo = config.echo();
        let bytes = serde_json::to_vec(&echo).expect("echo serializes");
        Self {
            schema_version: SCHEMA_VERSION,
            toolkit: Toolkit {
                name: "rimbound",
                version: env!("CARGO_PKG_VERSION"),
            },
            command,
            task,
            config: echo,
            config_sha256: hex(&Sha256::digest(&bytes)),
            seed: config.seed,
            provenance: Value::Null,
            status: Status::Ok,
            result: Value::Null,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::with_capacity(2 * bytes.len()), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub document: Document,
    /// ε sweep as CSV, for tasks that produce one.
    pub csv: Option<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        self.document.status.exit_code()
    }

    fn stem(&self) -> String {
        match self.document.command {
            "compare" => "compare".to_string(),
            _ => self.document.task.to_string(),
        }
    }

    /// Writes `<stem>.json` and, if present, `<stem>_sweep.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", dir.display()));
        std::fs::create_dir_all(dir).map_err(io)?;
        let mut written = Vec::new();
        let json = dir.join(format!("{}.json", self.stem()));
        std::fs::write(&json, self.document.to_json()).map_err(io)?;
        written.push(json);
        if let Some(csv) = &self.csv {
            let path = dir.join(format!("{}_sweep.csv", self.stem()));
            std::fs::write(&path, csv).map_err(io)?;
            written.push(path);
        }
        Ok(written)
    }
}

/// One row per (ε, j, k) entry of the quadratic-form matrices.
pub fn sweep_csv(samples: &[rimbound::rayleigh_ritz::FormSample]) -> String {
    let mut out = String::from("epsilon,j,k,re_h,im_h\n");
    for s in samples {
        for (j, (row_re, row_im)) in s.h_re.iter().zip(&s.h_im).enumerate() {
            for (k, (re, im)) in row_re.iter().zip(row_im).enumerate() {
                let _ = writeln!(out, "{:e},{j},{k},{re:e},{im:e}", s.epsilon);
            }
        }
    }
    out
}
