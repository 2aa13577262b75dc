use std::io::Write;
use std::path::PathBuf;

use arithdyn::{Error, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Report envelope. The timestamp is left out under `--reproducible`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Envelope<T> {
    pub command: String,
    pub version: String,
    pub config: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub report: T,
}

pub struct Sink {
    pub out: Option<PathBuf>,
    pub reproducible: bool,
    pub command: String,
    pub config: String,
}

impl Sink {
    fn write(&self, bytes: &[u8]) -> Result<()> {
        let io = |e: std::io::Error| Error::InvalidInput(format!("cannot write output: {e}"));
        match &self.out {
            Some(p) => std::fs::write(p, bytes).map_err(io),
            None => {
                let mut s = std::io::stdout().lock();
                s.write_all(bytes).and_then(|_| s.flush()).map_err(io)
            }
        }
    }

    /// Serialize, check that the document parses back into the report type
    /// unchanged, then write it.
    pub fn json<T: Serialize + DeserializeOwned>(&self, report: T) -> Result<()> {
        let env = Envelope {
            command: self.command.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: self.config.clone(),
            timestamp: (!self.reproducible).then(|| {
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0)
            }),
            report,
        };
        let text = round_trip(&env)?;
        self.write(format!("{text}\n").as_bytes())
    }

    pub fn csv(&self, header: &[String], rows: &[Vec<String>]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
        w.write_record(header).map_err(err)?;
        for r in rows {
            w.write_record(r).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
        self.write(&bytes)
    }
}

/// Pretty JSON for `value`, after checking it re-validates against its own type.
pub fn round_trip<T: Serialize + DeserializeOwned>(value: &T) -> Result<String> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::InvariantViolation(format!("serialize: {e}")))?;
    let back: T = serde_json::from_str(&text)
        .map_err(|e| Error::InvariantViolation(format!("report does not match its schema: {e}")))?;
    let again = serde_json::to_string_pretty(&back).map_err(|e| Error::InvariantViolation(e.to_string()))?;
    if again != text {
        return Err(Error::InvariantViolation("report changed on round trip".into()));
    }
    Ok(text)
}
