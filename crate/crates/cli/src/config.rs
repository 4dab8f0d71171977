//! `key=value` configuration files. Flags given on the command line win.

use std::collections::BTreeMap;
use std::path::Path;

pub const KEYS: &[&str] = &[
    "m",
    "rank-bound",
    "depth-bound",
    "atlas-cache",
    "format",
    "seed",
    "mode",
    "threads",
    "exec",
    "clause-b",
    "swaps",
];

pub fn parse(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value", n + 1))?;
        let k = k.trim().replace('_', "-");
        if !KEYS.contains(&k.as_str()) {
            return Err(format!("line {}: unknown key `{k}`", n + 1));
        }
        out.insert(k, v.trim().to_string());
    }
    Ok(out)
}

pub fn load(path: &Path) -> Result<BTreeMap<String, String>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects() {
        let c = parse("# bounds\nrank_bound = 20\n\ndepth-bound=3\n").unwrap();
        assert_eq!(c["rank-bound"], "20");
        assert_eq!(c["depth-bound"], "3");
        assert!(parse("colour=blue").is_err());
        assert!(parse("m").is_err());
    }
}
