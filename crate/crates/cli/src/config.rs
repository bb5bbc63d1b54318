use std::ffi::OsString;

use serde::Deserialize;
use serde_json::Value;

pub const SCHEMA: &str = "linnik-lab/1";

/// A run configuration file.
///
/// `global` holds top-level flags (seed, cache, threads, out, format); `args` holds the
/// flags of `command`. Keys are flag names without the leading dashes. Flags given on
/// the command line win over the file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: String,
    #[serde(default)]
    pub command: Option<String>,
    #[serde(default)]
    pub global: serde_json::Map<String, Value>,
    #[serde(default)]
    pub args: serde_json::Map<String, Value>,
}

fn scalar(v: &Value) -> Result<String, String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Array(items) => {
            let nested = items.iter().any(Value::is_array);
            let parts = items.iter().map(scalar).collect::<Result<Vec<_>, _>>()?;
            Ok(parts.join(if nested { ";" } else { "," }))
        }
        other => Err(format!("unsupported config value {other}")),
    }
}

fn flags(map: &serde_json::Map<String, Value>) -> Result<Vec<OsString>, String> {
    let mut out = Vec::new();
    for (k, v) in map {
        match v {
            Value::Bool(true) => out.push(format!("--{k}").into()),
            Value::Bool(false) | Value::Null => {}
            v => {
                out.push(format!("--{k}").into());
                out.push(scalar(v)?.into());
            }
        }
    }
    Ok(out)
}

/// Pulls `--config <path>` out of argv and splices the file's flags in front of the
/// user's, so that later (user) occurrences override them.
pub fn expand(argv: Vec<OsString>, subcommands: &[&str]) -> Result<Vec<OsString>, String> {
    let mut path = None;
    let mut rest = Vec::with_capacity(argv.len());
    let mut it = argv.into_iter();
    if let Some(prog) = it.next() {
        rest.push(prog);
    }
    while let Some(a) = it.next() {
        let s = a.to_string_lossy().into_owned();
        if s == "--config" {
            path = Some(
                it.next()
                    .ok_or("--config needs a path")?
                    .to_string_lossy()
                    .into_owned(),
            );
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let text =
        std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let cfg: RunConfig =
        serde_json::from_str(&text).map_err(|e| format!("invalid config {path}: {e}"))?;
    if cfg.schema != SCHEMA {
        return Err(format!(
            "config schema is {:?}, expected {SCHEMA:?}",
            cfg.schema
        ));
    }
    let mut out = vec![rest[0].clone()];
    out.extend(flags(&cfg.global)?);
    let pos = rest
        .iter()
        .position(|a| subcommands.contains(&a.to_string_lossy().as_ref()));
    match pos {
        Some(i) => {
            if let Some(c) = &cfg.command {
                if rest[i].to_string_lossy() != c.as_str() {
                    return Err(format!(
                        "config is for {c:?} but {:?} was requested",
                        rest[i]
                    ));
                }
            }
            out.extend(rest[1..=i].iter().cloned());
            out.extend(flags(&cfg.args)?);
            out.extend(rest[i + 1..].iter().cloned());
        }
        None => {
            out.extend(rest[1..].iter().cloned());
            let c = cfg
                .command
                .ok_or("config names no command and none was given")?;
            out.push(c.into());
            out.extend(flags(&cfg.args)?);
        }
    }
    Ok(out)
}
