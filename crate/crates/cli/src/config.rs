//! Optional TOML defaults for the command-line flags.
//!
//! Every key mirrors a flag; explicit flags always win. Unknown keys are
//! rejected so typos surface instead of silently falling back to defaults.

use std::path::PathBuf;

use geotop::error::{Error, Result};
use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: Option<PathBuf>,
    pub method: Option<String>,
    pub rounds: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub thresholds: Option<usize>,
    pub trees: Option<usize>,
    pub count: Option<usize>,
}

pub fn load(path: &std::path::Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_config_parses() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(
            &path,
            "dataset = \"data\"\nmethod = \"lkc\"\nrounds = 9\nseed = 3\nout = \"o\"\nthresholds = 50\ntrees = 7\ncount = 12\n",
        )
        .unwrap();
        let cfg = load(&path).unwrap();
        assert_eq!(cfg.dataset.as_deref(), Some(std::path::Path::new("data")));
        assert_eq!(cfg.method.as_deref(), Some("lkc"));
        assert_eq!(cfg.rounds, Some(9));
        assert_eq!(cfg.seed, Some(3));
        assert_eq!(cfg.thresholds, Some(50));
        assert_eq!(cfg.trees, Some(7));
        assert_eq!(cfg.count, Some(12));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "sed = 3\n").unwrap();
        assert!(matches!(load(&path), Err(Error::Config(_))));
    }
}
