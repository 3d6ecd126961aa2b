//! `--config` support: a flat JSON object whose keys are long flag names.
//! Its entries are spliced in ahead of the command-line flags, so anything
//! given explicitly wins.

use std::path::Path;

use serde_json::{Map, Value};

/// Finds the value of `--config` (either `--config PATH` or `--config=PATH`).
pub fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

pub fn load(path: &Path) -> Result<Map<String, Value>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(format!("{}: expected a JSON object", path.display())),
        Err(e) => Err(format!("{}: {e}", path.display())),
    }
}

/// Converts config entries to flags. Keys may use `_` or `-`; arrays become
/// comma lists, `true` becomes a bare switch and `false`/`null` are dropped.
pub fn to_flags(map: &Map<String, Value>) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    for (key, value) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        if flag == "--config" {
            continue;
        }
        match value {
            Value::Bool(true) => out.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                let parts: Result<Vec<String>, String> = items.iter().map(|v| scalar(key, v)).collect();
                out.push(flag);
                out.push(parts?.join(","));
            }
            v => {
                out.push(flag);
                out.push(scalar(key, v)?);
            }
        }
    }
    Ok(out)
}

fn scalar(key: &str, v: &Value) -> Result<String, String> {
    match v {
        Value::Number(n) => Ok(n.to_string()),
        Value::String(s) => Ok(s.clone()),
        _ => Err(format!("config key `{key}`: unsupported value {v}")),
    }
}

/// Inserts `flags` right after the subcommand name so they parse as
/// subcommand flags and are overridden by later explicit ones.
pub fn splice(argv: &[String], flags: Vec<String>, subcommands: &[&str]) -> Vec<String> {
    let Some(pos) = argv.iter().position(|a| subcommands.contains(&a.as_str())) else {
        return argv.to_vec();
    };
    let mut out = argv[..=pos].to_vec();
    out.extend(flags);
    out.extend_from_slice(&argv[pos + 1..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn flags_from_json() {
        let map: Map<String, Value> =
            serde_json::from_str(r#"{"n_max": 4, "beta": [1.5, 2], "kernel": "standard", "verbose": true, "off": false}"#)
                .unwrap();
        let flags = to_flags(&map).unwrap();
        assert_eq!(flags, args("--beta 1.5,2 --kernel standard --n-max 4 --verbose"));
    }

    #[test]
    fn splice_after_subcommand() {
        let argv = args("yukawa --config c.json ebar3 --format csv");
        assert_eq!(config_path(&argv).as_deref(), Some("c.json"));
        let out = splice(&argv, args("--format json"), &["ebar3"]);
        assert_eq!(out, args("yukawa --config c.json ebar3 --format json --format csv"));
    }
}
