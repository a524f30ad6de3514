use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};

const KEYS: [&str; 10] = ["m", "t", "schedule", "steps", "step", "grid", "tol", "out", "mesh", "json"];

/// `key = value` lines; `#` starts a comment.
pub fn parse(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {}: expected key = value", k + 1);
        };
        let key = key.trim();
        if !KEYS.contains(&key) {
            bail!("config line {}: unknown key {key:?}", k + 1);
        }
        out.insert(key.to_string(), value.trim().to_string());
    }
    Ok(out)
}

pub fn load(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text)
}

/// Flag value, else config value, else `None`.
pub fn pick<T: std::str::FromStr>(flag: Option<T>, file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match file.get(key) {
        None => Ok(None),
        Some(v) => match v.parse() {
            Ok(x) => Ok(Some(x)),
            Err(_) => bail!("config value {v:?} for {key} does not parse"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_overrides() {
        let f = parse("# tower\nschedule = 3,5,7\nsteps=4\n").unwrap();
        assert_eq!(f["schedule"], "3,5,7");
        assert_eq!(pick::<usize>(None, &f, "steps").unwrap(), Some(4));
        assert_eq!(pick(Some(9usize), &f, "steps").unwrap(), Some(9));
        assert_eq!(pick::<f64>(None, &f, "t").unwrap(), None);
        assert!(parse("colour = red").is_err());
        assert!(parse("m").is_err());
        assert!(pick::<usize>(None, &f, "schedule").is_err());
    }
}
