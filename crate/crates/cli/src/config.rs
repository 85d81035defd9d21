//! Flat `key = value` configuration files merged into the argument vector.

use clap::CommandFactory;
use std::path::Path;

use crate::args::Cli;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigEntry {
    pub key: String,
    pub value: String,
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config(text: &str) -> Result<Vec<ConfigEntry>, String> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) =
            line.split_once('=').ok_or_else(|| format!("config line {}: expected key = value, got '{raw}'", n + 1))?;
        let key = k.trim().trim_start_matches("--").to_string();
        if key.is_empty() {
            return Err(format!("config line {}: empty key", n + 1));
        }
        out.push(ConfigEntry { key, value: v.trim().to_string() });
    }
    Ok(out)
}

/// Value of `--name VALUE` or `--name=VALUE` in an argument vector.
pub fn flag_value(argv: &[String], name: &str) -> Option<String> {
    let long = format!("--{name}");
    let eq = format!("--{name}=");
    argv.iter().enumerate().find_map(|(i, a)| {
        if a == &long {
            argv.get(i + 1).cloned()
        } else {
            a.strip_prefix(&eq).map(str::to_string)
        }
    })
}

fn has_flag(argv: &[String], name: &str) -> bool {
    let long = format!("--{name}");
    let eq = format!("--{name}=");
    argv.iter().any(|a| a == &long || a.starts_with(&eq))
}

/// Index of the subcommand token in argv.
pub fn subcommand_index(argv: &[String]) -> Option<usize> {
    let cmd = Cli::command();
    let names: Vec<String> = cmd.get_subcommands().map(|s| s.get_name().to_string()).collect();
    let mut i = 1;
    while i < argv.len() {
        let a = &argv[i];
        if names.iter().any(|n| n == a) {
            return Some(i);
        }
        // global flags that take a value
        if (a == "--config" || a == "--out-dir" || a == "--replay") && i + 1 < argv.len() {
            i += 2;
        } else {
            i += 1;
        }
    }
    None
}

/// Inserts config entries after the subcommand for every flag that argv does
/// not already set, so command-line flags win.
pub fn merge_config(argv: &[String], entries: &[ConfigEntry]) -> Result<Vec<String>, String> {
    let Some(at) = subcommand_index(argv) else {
        return Ok(argv.to_vec());
    };
    let root = Cli::command();
    let sub = root.find_subcommand(&argv[at]).expect("known subcommand");
    let mut extra = Vec::new();
    for e in entries {
        if e.key == "config" {
            return Err("config files cannot nest".into());
        }
        if has_flag(argv, &e.key) {
            continue;
        }
        let arg = sub
            .get_arguments()
            .chain(root.get_arguments())
            .find(|a| a.get_long() == Some(e.key.as_str()))
            .ok_or_else(|| format!("config key '{}' is not a flag of {}", e.key, argv[at]))?;
        if arg.get_action().takes_values() {
            extra.push(format!("--{}={}", e.key, e.value));
        } else {
            match e.value.as_str() {
                "true" | "1" | "yes" => extra.push(format!("--{}", e.key)),
                "false" | "0" | "no" => {}
                v => return Err(format!("config key '{}' is a switch, got '{v}'", e.key)),
            }
        }
    }
    let mut out = argv[..=at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&argv[at + 1..]);
    Ok(out)
}

pub fn load_and_merge(argv: &[String]) -> Result<Vec<String>, String> {
    match flag_value(argv, "config") {
        None => Ok(argv.to_vec()),
        Some(path) => {
            let text = std::fs::read_to_string(Path::new(&path)).map_err(|e| format!("config {path}: {e}"))?;
            merge_config(argv, &parse_config(&text)?)
        }
    }
}
