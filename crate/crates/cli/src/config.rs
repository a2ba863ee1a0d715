//! Config files. Keys mirror long flags (`mask-rate` or `mask_rate`); arrays become
//! repeated flags; `true` becomes a bare flag. A `subcommand` key supplies the
//! subcommand when the command line has none, so a recorded `run_config` block can be
//! replayed directly.

use std::ffi::OsString;
use std::path::Path;

use mlmask_core::Error;
use serde_json::Value;

pub const SUBCOMMANDS: &[&str] = &["pack", "pmi-build", "mask", "stats", "ppl", "pll", "metric"];

/// Keys that never turn into flags.
const RESERVED: &[&str] = &["subcommand", "config"];

/// Value of `--config` on the raw command line, if any.
pub fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter().skip(1);
    while let Some(arg) = it.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(rest) = s.strip_prefix("--config=") {
            return Some(rest.into());
        }
    }
    None
}

pub fn load(path: &Path) -> Result<serde_json::Map<String, Value>, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    let value: Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(json_err) => {
            let table: toml::Table = toml::from_str(&text).map_err(|toml_err| {
                Error::Config(format!(
                    "config {} is neither JSON ({json_err}) nor TOML ({toml_err})",
                    path.display()
                ))
            })?;
            serde_json::to_value(table)
                .map_err(|e| Error::Config(format!("config {}: {e}", path.display())))?
        }
    };
    match value {
        Value::Object(map) => Ok(map),
        _ => Err(Error::Config(format!(
            "config {} must be a table of flags",
            path.display()
        ))),
    }
}

fn has_flag(argv: &[OsString], flag: &str) -> bool {
    let with_eq = format!("{flag}=");
    argv.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag || s.starts_with(&with_eq)
    })
}

fn scalar(key: &str, v: &Value) -> Result<String, Error> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(Error::Config(format!(
            "config key {key:?} must hold strings, numbers or booleans"
        ))),
    }
}

/// Appends every config entry whose flag is absent from `argv`.
pub fn merge(
    mut argv: Vec<OsString>,
    config: &serde_json::Map<String, Value>,
) -> Result<Vec<OsString>, Error> {
    let has_subcommand = argv
        .iter()
        .skip(1)
        .any(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()));
    if !has_subcommand {
        if let Some(sub) = config.get("subcommand") {
            let sub = scalar("subcommand", sub)?;
            let at = 1.min(argv.len());
            for (i, word) in sub.split_whitespace().enumerate() {
                argv.insert(at + i, word.into());
            }
        }
    }
    for (key, value) in config {
        if RESERVED.contains(&key.as_str()) {
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        if has_flag(&argv, &flag) {
            continue;
        }
        match value {
            Value::Bool(true) => argv.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                for item in items {
                    argv.push(flag.clone().into());
                    argv.push(scalar(key, item)?.into());
                }
            }
            other => {
                argv.push(flag.into());
                argv.push(scalar(key, other)?.into());
            }
        }
    }
    Ok(argv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn command_line_wins_and_arrays_repeat() {
        let cfg: serde_json::Map<String, Value> = serde_json::from_str(
            r#"{"mask_rate": [0.15, 0.4], "seed": 3, "strategy": "span", "verbose": true, "x": false}"#,
        )
        .unwrap();
        let argv = merge(os(&["mlmask", "stats", "spans", "--seed=9"]), &cfg).unwrap();
        assert_eq!(
            argv,
            os(&[
                "mlmask",
                "stats",
                "spans",
                "--seed=9",
                "--mask-rate",
                "0.15",
                "--mask-rate",
                "0.4",
                "--strategy",
                "span",
                "--verbose"
            ])
        );
    }

    #[test]
    fn subcommand_from_config() {
        let cfg: serde_json::Map<String, Value> =
            serde_json::from_str(r#"{"subcommand": "metric normalize", "baseline": 0.15}"#)
                .unwrap();
        let argv = merge(os(&["mlmask", "--config", "c.json"]), &cfg).unwrap();
        assert_eq!(
            argv,
            os(&[
                "mlmask",
                "metric",
                "normalize",
                "--config",
                "c.json",
                "--baseline",
                "0.15"
            ])
        );
        assert_eq!(config_path(&argv), Some("c.json".into()));
    }

    #[test]
    fn nested_values_rejected() {
        let cfg: serde_json::Map<String, Value> =
            serde_json::from_str(r#"{"input": {"a": 1}}"#).unwrap();
        assert!(merge(os(&["mlmask", "mask"]), &cfg).is_err());
    }
}
