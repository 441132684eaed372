//! Artifact headers and atomic file output.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, SCHEMA_VERSION};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactHeader {
    pub schema_version: u32,
    pub config_hash: String,
    pub seed: u64,
}

impl ArtifactHeader {
    pub fn new(config: &ExperimentConfig) -> ArtifactHeader {
        ArtifactHeader {
            schema_version: SCHEMA_VERSION,
            config_hash: config.hash(),
            seed: config.seed,
        }
    }

    /// Comment line that leads every CSV artifact.
    pub fn csv_comment(&self) -> String {
        format!(
            "# schema_version={} config_hash={} seed={}\n",
            self.schema_version, self.config_hash, self.seed
        )
    }
}

/// A JSON artifact: header fields flattened next to the payload.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonArtifact<T> {
    #[serde(flatten)]
    pub header: ArtifactHeader,
    pub payload: T,
}

pub fn to_json_artifact<T: Serialize>(header: &ArtifactHeader, payload: &T) -> Result<String> {
    let v = JsonArtifact {
        header: header.clone(),
        payload,
    };
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

/// Writes `bytes` to a sibling temporary file, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(io)?;
        }
    }
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "artifact".into());
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp).map_err(io)?;
        f.write_all(bytes).map_err(io)?;
        f.sync_all().map_err(io)?;
    }
    fs::rename(&tmp, path).map_err(io)
}
