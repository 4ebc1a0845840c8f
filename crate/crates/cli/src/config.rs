//! Key-value configuration files.
//!
//! Each non-blank line is `key = value`; `#` starts a comment. Keys are the
//! long flag names (`lambda-grid` or `lambda_grid`). The entries are turned
//! into flags placed before the real command-line arguments, and every
//! option overrides earlier occurrences of itself, so flags win.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use crate::error::{CliError, CliResult};

/// Options that take no value; `true` enables them, `false` leaves them off.
const SWITCHES: &[&str] = &["normalize", "baselines"];

pub fn parse_config(path: &Path) -> CliResult<Vec<(String, String)>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
    let mut entries = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::config(format!("{}:{}: expected `key = value`", path.display(), n + 1))
        })?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() || !key.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '-') {
            return Err(CliError::config(format!("{}:{}: bad key `{key}`", path.display(), n + 1)));
        }
        if key == "config" {
            return Err(CliError::config(format!("{}:{}: config files cannot nest", path.display(), n + 1)));
        }
        entries.push((key, value.trim().to_string()));
    }
    Ok(entries)
}

/// Location of the `--config` value in `args`, if any.
fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut iter = args.iter();
    while let Some(arg) = iter.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            return iter.next().cloned();
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(OsString::from(v));
        }
    }
    None
}

/// Inserts the config file's entries right after the subcommand name.
pub fn expand_args(args: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let entries = parse_config(Path::new(&path))?;
    let mut injected = Vec::new();
    for (key, value) in entries {
        if SWITCHES.contains(&key.as_str()) {
            match value.as_str() {
                "true" => injected.push(OsString::from(format!("--{key}"))),
                "false" => {}
                other => {
                    return Err(CliError::config(format!("`{key}` must be true or false, got `{other}`")))
                }
            }
        } else {
            injected.push(OsString::from(format!("--{key}")));
            injected.push(OsString::from(value));
        }
    }
    let split = args.len().min(2);
    let mut out: Vec<OsString> = args[..split].to_vec();
    out.extend(injected);
    out.extend_from_slice(&args[split..]);
    Ok(out)
}
