//! Artifact plumbing: spec-argument loading, atomic writes, config
//! sidecars, and the error-to-exit-code policy.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use minkfield::Error;

use crate::config::ExperimentConfig;

/// A failure carrying the process exit code it should produce: 2 for input
/// and environment problems, 1 for numeric or verification failures.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match &e {
            // The field cannot exist or the run cannot meet its numeric
            // contract: a result-level failure.
            Error::NotPositiveSemidefinite { .. }
            | Error::AcceptanceTooLow { .. }
            | Error::QuadratureNotConverged { .. } => 1,
            // Everything else is a malformed or unsupported input.
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Failure {
        Failure::input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::input(e.to_string())
    }
}

/// Loads a spec argument: `@file` or a bare path reads the file, anything
/// that starts with `{` or `[` is taken as inline JSON.
pub fn load_spec_arg(arg: &str) -> Result<String, Failure> {
    let read = |path: &str| {
        fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("cannot read spec file {path}: {e}")))
    };
    if let Some(path) = arg.strip_prefix('@') {
        read(path)
    } else if arg.trim_start().starts_with(['{', '[']) {
        Ok(arg.to_string())
    } else {
        read(arg)
    }
}

/// Parses strict JSON, labelling errors with what was being parsed.
pub fn parse_spec<T: serde::de::DeserializeOwned>(what: &str, text: &str) -> Result<T, Failure> {
    serde_json::from_str(text)
        .map_err(|e| Failure::input(format!("invalid {what} spec: {e}")))
}

/// Writes bytes atomically: temp file in the target directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path)
        .map_err(|e| Failure::input(format!("cannot persist {}: {}", path.display(), e.error)))?;
    Ok(())
}

/// Writes an artifact plus its `<stem>.config.json` sidecar and prints the
/// one-line summary for each.
pub fn write_artifact(
    dir: &Path,
    name: &str,
    bytes: &[u8],
    config: &ExperimentConfig,
) -> Result<PathBuf, Failure> {
    let path = dir.join(name);
    write_atomic(&path, bytes)?;
    println!("wrote {} ({} bytes)", path.display(), bytes.len());

    let stem = name.rsplit_once('.').map_or(name, |(s, _)| s);
    let sidecar = dir.join(format!("{stem}.config.json"));
    let mut text = serde_json::to_string_pretty(config)?;
    text.push('\n');
    write_atomic(&sidecar, text.as_bytes())?;
    println!("wrote {} (resolved config)", sidecar.display());
    Ok(path)
}

/// Pretty JSON with a trailing newline, for all JSON artifacts.
pub fn to_json_bytes<T: serde::Serialize>(value: &T) -> Result<Vec<u8>, Failure> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text.into_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inline_json_passes_through_and_files_load() {
        assert_eq!(load_spec_arg("{\"a\":1}").unwrap(), "{\"a\":1}");
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("spec.json");
        fs::write(&path, "{\"b\":2}").unwrap();
        let at = format!("@{}", path.display());
        assert_eq!(load_spec_arg(&at).unwrap(), "{\"b\":2}");
        assert_eq!(load_spec_arg(path.to_str().unwrap()).unwrap(), "{\"b\":2}");
        assert!(load_spec_arg("@missing.json").is_err());
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.txt");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"two");
    }

    #[test]
    fn numeric_errors_map_to_exit_1_and_input_errors_to_2() {
        let numeric = Failure::from(Error::NotPositiveSemidefinite {
            min_eig: -1.0,
            trace: 1.0,
        });
        assert_eq!(numeric.code, 1);
        let input = Failure::from(Error::InvalidParameter("x".into()));
        assert_eq!(input.code, 2);
    }
}
