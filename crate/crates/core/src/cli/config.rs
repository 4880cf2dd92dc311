//! Plain `key = value` defaults file. Blank lines and `#` comments are
//! skipped; command-line flags always win.

use std::path::{Path, PathBuf};

use super::format::MAX_PRECISION;

#[derive(Debug, Default, Clone, PartialEq)]
pub struct Config {
    pub precision: Option<usize>,
    pub out: Option<PathBuf>,
}

pub fn parse(text: &str) -> Result<Config, String> {
    let mut cfg = Config::default();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", n + 1))?;
        let value = value.trim();
        match key.trim() {
            "precision" => {
                let p = value
                    .parse::<usize>()
                    .map_err(|_| format!("config line {}: bad precision {value:?}", n + 1))?;
                cfg.precision = Some(p);
            }
            "out" => cfg.out = Some(PathBuf::from(value)),
            other => return Err(format!("config line {}: unknown key {other:?}", n + 1)),
        }
    }
    if let Some(p) = cfg.precision {
        check_precision(p)?;
    }
    Ok(cfg)
}

pub fn load(path: &Path) -> Result<Config, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    parse(&text)
}

pub fn check_precision(p: usize) -> Result<(), String> {
    if (1..=MAX_PRECISION).contains(&p) {
        Ok(())
    } else {
        Err(format!("precision must be in 1..={MAX_PRECISION}, got {p}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let cfg = parse("# defaults\nprecision = 8\n\nout=results # here\n").unwrap();
        assert_eq!(cfg.precision, Some(8));
        assert_eq!(cfg.out, Some(PathBuf::from("results")));
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(parse("colour = red").is_err());
        assert!(parse("precision").is_err());
        assert!(parse("precision = 0").is_err());
        assert!(parse("precision = x").is_err());
    }
}
