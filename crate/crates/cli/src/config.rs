//! `--config FILE` overlay: flat `key=value` lines become `--key value`
//! flags inserted ahead of the command-line flags, so explicit flags win.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use crate::error::CliError;

/// Parses overlay text into flag arguments. Blank lines and `#` comments are
/// skipped. `key=true` becomes a bare `--key`; `key=false` is dropped.
pub fn parse_overlay(text: &str) -> Result<Vec<String>, String> {
    let mut args = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!("line {}: expected key=value, got {line:?}", n + 1));
        };
        let key = key.trim().trim_start_matches("--");
        let value = value.trim();
        if key.is_empty() || key == "config" {
            return Err(format!("line {}: invalid key {key:?}", n + 1));
        }
        match value {
            "true" => args.push(format!("--{key}")),
            "false" => {}
            _ => {
                args.push(format!("--{key}"));
                args.push(value.to_string());
            }
        }
    }
    Ok(args)
}

fn config_path(args: &[OsString]) -> Result<Option<OsString>, CliError> {
    for (i, a) in args.iter().enumerate() {
        let Some(s) = a.to_str() else { continue };
        if s == "--" {
            break;
        }
        if s == "--config" {
            return match args.get(i + 1) {
                Some(p) => Ok(Some(p.clone())),
                None => Err(CliError::Config("--config needs a file".into())),
            };
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Ok(Some(p.into()));
        }
    }
    Ok(None)
}

/// Returns `args` with the overlay flags spliced in right after the
/// subcommand name.
pub fn apply_overlay(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&args)? else {
        return Ok(args);
    };
    let path = Path::new(&path);
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let extra = parse_overlay(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    // first argument after the program name that is not a flag
    let Some(sub) = args
        .iter()
        .skip(1)
        .position(|a| !a.to_str().is_some_and(|s| s.starts_with('-')))
    else {
        return Ok(args);
    };
    let at = sub + 2;
    let mut out = args[..at].to_vec();
    out.extend(extra.into_iter().map(OsString::from));
    out.extend_from_slice(&args[at..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlay_lines() {
        let text = "# tuning\nstep-ns = 0.01\n\nnormalize=true\nverbose=false\n--cost=sad\n";
        assert_eq!(
            parse_overlay(text).unwrap(),
            ["--step-ns", "0.01", "--normalize", "--cost", "sad"]
        );
        assert!(parse_overlay("oops").unwrap_err().contains("line 1"));
        assert!(parse_overlay("config=x").is_err());
    }

    #[test]
    fn splices_after_subcommand() {
        let dir = std::env::temp_dir().join(format!("hlsloop-overlay-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let cfg = dir.join("run.cfg");
        fs::write(&cfg, "width=10\n").unwrap();
        let args: Vec<OsString> = [
            "hlsloop",
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--width",
            "20",
        ]
        .iter()
        .map(OsString::from)
        .collect();
        let out = apply_overlay(args).unwrap();
        let out: Vec<&str> = out.iter().map(|a| a.to_str().unwrap()).collect();
        assert_eq!(&out[..4], ["hlsloop", "simulate", "--width", "10"]);
        assert_eq!(&out[out.len() - 2..], ["--width", "20"]);
        fs::remove_dir_all(dir).unwrap();
    }
}
