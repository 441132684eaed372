use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use reslab_core::artifact::{to_json_artifact, write_atomic, ArtifactHeader};
use reslab_core::{DiscreteMeasure, ExperimentConfig};
use serde::Serialize;

use crate::args::Cli;
use crate::error::{usage, CliError, CliResult};

pub const OUT_DIR_ENV: &str = "RESLAB_OUT_DIR";

pub struct Context {
    pub config: ExperimentConfig,
    pub out_dir: PathBuf,
}

impl Context {
    pub fn from_cli(cli: &Cli) -> CliResult<Context> {
        let mut config = match &cli.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
                serde_json::from_str::<ExperimentConfig>(&text)
                    .map_err(|e| usage(format!("invalid config {}: {e}", path.display())))?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = cli.seed {
            config.seed = seed;
            config.probe.seed = seed;
        }
        let out_dir = cli
            .out_dir
            .clone()
            .or_else(|| env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .or_else(|| config.out_dir.clone())
            .unwrap_or_else(|| PathBuf::from("."));
        Ok(Context { config, out_dir })
    }

    pub fn header(&self) -> ArtifactHeader {
        ArtifactHeader::new(&self.config)
    }

    /// Output paths are taken relative to the output directory.
    pub fn output(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.out_dir.join(path)
        }
    }

    pub fn write(&self, path: &Path, bytes: &[u8]) -> CliResult<PathBuf> {
        let target = self.output(path);
        write_atomic(&target, bytes).map_err(|e| CliError::Failure(e.to_string()))?;
        Ok(target)
    }

    pub fn write_json<T: Serialize>(&self, path: &Path, payload: &T) -> CliResult<PathBuf> {
        let text = to_json_artifact(&self.header(), payload)?;
        self.write(path, text.as_bytes())
    }

    /// Input paths are used as given when they exist, otherwise looked up
    /// in the output directory.
    pub fn input(&self, path: &Path) -> PathBuf {
        if path.exists() || path.is_absolute() {
            path.to_path_buf()
        } else {
            self.out_dir.join(path)
        }
    }

    pub fn load_measure(&self, path: &Path) -> CliResult<DiscreteMeasure> {
        DiscreteMeasure::load(&self.input(path)).map_err(|e| usage(format!("cannot load measure: {e}")))
    }
}
