//! `--config` files: one `key = value` per line, `#` starts a comment.
//!
//! Entries are turned into `--key=value` flags placed directly after the
//! subcommand name, ahead of the user's own flags, so the command line wins.

use std::ffi::OsString;
use std::path::Path;

use clap::{ArgAction, CommandFactory};

use crate::args::Cli;
use crate::CliError;

pub fn parse_file(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut entries = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("config line {}: expected key = value", no + 1)));
        };
        entries.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(entries)
}

/// Removes `--config FILE` from `argv` and splices the file's entries in as flags.
pub fn expand(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut iter = argv.into_iter();
    while let Some(arg) = iter.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            let value = iter.next().ok_or_else(|| CliError::Usage("--config needs a file".into()))?;
            path = Some(value);
        } else if let Some(v) = s.strip_prefix("--config=") {
            path = Some(OsString::from(v));
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| CliError::Usage(format!("--config {}: {e}", path.to_string_lossy())))?;
    let entries = parse_file(&text)?;

    let command = Cli::command();
    let Some((pos, sub)) = rest
        .iter()
        .enumerate()
        .skip(1)
        .find_map(|(i, a)| command.find_subcommand(a.to_string_lossy().as_ref()).map(|s| (i, s)))
    else {
        return Err(CliError::Usage("--config needs a subcommand".into()));
    };
    let mut flags = Vec::new();
    for (key, value) in entries {
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()) && a.get_id() != "config")
            .ok_or_else(|| CliError::Usage(format!("unknown config key '{key}' for '{}'", sub.get_name())))?;
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            match value.as_str() {
                "true" => flags.push(OsString::from(format!("--{key}"))),
                "false" => {}
                _ => return Err(CliError::Usage(format!("config key '{key}' takes true or false"))),
            }
        } else {
            flags.push(OsString::from(format!("--{key}={value}")));
        }
    }
    rest.splice(pos + 1..pos + 1, flags);
    Ok(rest)
}
