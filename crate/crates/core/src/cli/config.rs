//! Flat `key = value` config files merged underneath command-line flags.

use std::collections::BTreeSet;
use std::path::Path;

use clap::CommandFactory;

use super::args::Cli;

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            format!(
                "config line {}: expected key=value, got '{line}'",
                lineno + 1
            )
        })?;
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() {
            return Err(format!("config line {}: empty key", lineno + 1));
        }
        pairs.push((key.to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

fn config_path(argv: &[String]) -> Result<Option<String>, String> {
    let mut found = None;
    let mut iter = argv.iter().skip(1);
    while let Some(arg) = iter.next() {
        if arg == "--config" {
            found = Some(
                iter.next()
                    .cloned()
                    .ok_or_else(|| "--config requires a path".to_string())?,
            );
        } else if let Some(path) = arg.strip_prefix("--config=") {
            found = Some(path.to_string());
        }
    }
    Ok(found)
}

/// Returns `argv` with the config file's settings inserted right after the
/// subcommand, so that explicit flags (which come later) win.
pub fn merge_config(argv: &[String]) -> Result<Vec<String>, Vec<String>> {
    let Some(path) = config_path(argv).map_err(|e| vec![e])? else {
        return Ok(argv.to_vec());
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| vec![format!("cannot read config file '{path}': {e}")])?;
    let pairs = parse_config(&text).map_err(|e| vec![e])?;

    let cmd = Cli::command();
    let Some((pos, sub)) = argv
        .iter()
        .enumerate()
        .skip(1)
        .find_map(|(i, a)| cmd.find_subcommand(a).map(|s| (i, s)))
    else {
        // let clap report the missing subcommand
        return Ok(argv.to_vec());
    };

    let mut known = BTreeSet::new();
    let mut switches = BTreeSet::new();
    for arg in sub.get_arguments() {
        if let Some(long) = arg.get_long() {
            known.insert(long.to_string());
            if !arg.get_action().takes_values() {
                switches.insert(long.to_string());
            }
        }
    }

    let mut errors = Vec::new();
    let mut injected = Vec::new();
    for (key, value) in pairs {
        if key == "config" || key == "help" || key == "version" || !known.contains(&key) {
            errors.push(format!(
                "unknown config key '{key}' for subcommand '{}'",
                sub.get_name()
            ));
            continue;
        }
        if switches.contains(&key) {
            match value.as_str() {
                "true" | "1" | "yes" => injected.push(format!("--{key}")),
                "false" | "0" | "no" => {}
                other => errors.push(format!(
                    "config key '{key}' expects true or false, got '{other}'"
                )),
            }
        } else {
            injected.push(format!("--{key}={value}"));
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    let mut merged = argv[..=pos].to_vec();
    merged.extend(injected);
    merged.extend_from_slice(&argv[pos + 1..]);
    Ok(merged)
}
