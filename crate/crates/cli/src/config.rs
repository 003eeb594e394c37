//! `key = value` config files. Entries become `--key=value` flags placed
//! before the user's own flags, so anything given on the command line wins.

use std::ffi::OsString;
use std::path::Path;

use crate::CliError;

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected `key = value`", n + 1))
        })?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(CliError::Usage(format!("config line {}: bad key `{}`", n + 1, k.trim())));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

fn is_global_with_value(arg: &str) -> bool {
    arg == "--config" || arg == "--output"
}

/// Finds `--config`, reads it and splices its entries after the subcommand.
///
/// Returns the rewritten argv and the config path, if any.
pub fn merge_config(args: Vec<OsString>) -> Result<(Vec<OsString>, Option<String>), CliError> {
    let strs: Vec<String> = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let mut path = None;
    for (i, a) in strs.iter().enumerate() {
        if a == "--config" {
            path = strs.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else {
        return Ok((args, None));
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| CliError::Usage(format!("cannot read config `{path}`: {e}")))?;
    let entries = parse_config(&text)?;

    // Position of the subcommand: first token that is not a global option.
    let mut i = 1;
    while i < strs.len() && strs[i].starts_with("--") {
        i += if is_global_with_value(&strs[i]) { 2 } else { 1 };
    }
    if i >= strs.len() {
        return Ok((args, Some(path)));
    }
    let mut out: Vec<OsString> = args[..=i].to_vec();
    for (k, v) in entries {
        match v.as_str() {
            "true" => out.push(format!("--{k}").into()),
            "false" => {}
            _ => out.push(format!("--{k}={v}").into()),
        }
    }
    out.extend_from_slice(&args[i + 1..]);
    Ok((out, Some(path)))
}
