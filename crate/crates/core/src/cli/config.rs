//! `--config` files: flat `key=value` lines mirroring the long flags. The
//! entries are spliced in right after the subcommand path, ahead of the
//! user's own flags, so that flags given on the command line win.

use std::ffi::OsString;

const SUBCOMMANDS: &[&str] = &[
    "fire-verify",
    "bvt",
    "graph",
    "bs-distance",
    "sample",
    "intensity-check",
    "histogram",
    "nbhd",
    "hyperfinite",
    "expansion",
    "robustness",
];
const GLOBAL_WITH_VALUE: &[&str] = &["--workers", "--output", "--config"];
const BOOL_FLAGS: &[&str] = &["oracle"];

/// Parses `key=value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value, got {line:?}", i + 1))?;
        let key = k.trim().trim_start_matches("--");
        if key.is_empty() || key == "config" {
            return Err(format!("config line {}: invalid key {k:?}", i + 1));
        }
        out.push((key.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn config_args(entries: &[(String, String)]) -> Result<Vec<OsString>, String> {
    let mut args = Vec::new();
    for (k, v) in entries {
        if BOOL_FLAGS.contains(&k.as_str()) {
            match v.as_str() {
                "true" => args.push(format!("--{k}").into()),
                "false" => {}
                _ => return Err(format!("config key {k} expects true or false, got {v:?}")),
            }
        } else {
            args.push(format!("--{k}").into());
            args.push(v.into());
        }
    }
    Ok(args)
}

/// Removes `--config PATH` from `args` and splices in the file's entries.
pub fn apply_config_file(mut args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let mut path = None;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy().into_owned();
        if a == "--config" {
            if i + 1 >= args.len() {
                return Err("--config needs a path".into());
            }
            path = Some(args.remove(i + 1));
            args.remove(i);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.into());
            args.remove(i);
        } else {
            i += 1;
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.to_string_lossy()))?;
    let extra = config_args(&parse_config(&text)?)?;

    let mut at = 1;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy();
        if GLOBAL_WITH_VALUE.contains(&a.as_ref()) {
            i += 2;
        } else if a.starts_with("--") && GLOBAL_WITH_VALUE.iter().any(|g| a.starts_with(&format!("{g}="))) {
            i += 1;
        } else if SUBCOMMANDS.contains(&a.as_ref()) {
            i += 1;
            at = i;
        } else {
            break;
        }
    }
    args.splice(at..at, extra);
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn parses_lines() {
        let e = parse_config("# run\ndelta = 0.1\n--samples=5000\n\noracle=true\n").unwrap();
        assert_eq!(e[0], ("delta".into(), "0.1".into()));
        assert_eq!(e[1], ("samples".into(), "5000".into()));
        assert!(parse_config("delta 0.1").unwrap_err().contains("line 1"));
    }

    #[test]
    fn splices_after_subcommands() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "p=0.3\nsamples=10\n").unwrap();
        let args = os(&["irelab", "--workers", "2", "bvt", "sample", "--config", path.to_str().unwrap(), "--p", "0.5"]);
        let out = apply_config_file(args).unwrap();
        assert_eq!(
            out,
            os(&["irelab", "--workers", "2", "bvt", "sample", "--p", "0.3", "--samples", "10", "--p", "0.5"])
        );
    }

    #[test]
    fn bool_flags() {
        assert_eq!(config_args(&[("oracle".into(), "true".into())]).unwrap(), os(&["--oracle"]));
        assert!(config_args(&[("oracle".into(), "false".into())]).unwrap().is_empty());
        assert!(config_args(&[("oracle".into(), "yes".into())]).is_err());
    }
}
