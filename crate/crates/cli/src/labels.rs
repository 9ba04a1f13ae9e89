//! Label files: one label per line in node order, or `id label` per line.
//! A JSON detect report is also accepted wherever labels are read for a graph.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use edgecount::graph::LoadedGraph;
use edgecount::Partition;

use crate::CliError;

pub fn read_to_string(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

enum Entries {
    Positional(Vec<String>),
    Keyed(Vec<(String, String)>),
}

fn parse_lines(text: &str, path: &Path) -> Result<Entries, CliError> {
    let mut positional = Vec::new();
    let mut keyed = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[..] {
            [label] => positional.push(label.to_string()),
            [id, label] => keyed.push((id.to_string(), label.to_string())),
            _ => return Err(CliError::Input(format!("{}: line {}: expected `label` or `id label`", path.display(), i + 1))),
        }
    }
    match (positional.is_empty(), keyed.is_empty()) {
        (false, true) => Ok(Entries::Positional(positional)),
        (true, false) => Ok(Entries::Keyed(keyed)),
        (true, true) => Err(CliError::Input(format!("{}: no labels", path.display()))),
        (false, false) => Err(CliError::Input(format!("{}: mixes one- and two-column lines", path.display()))),
    }
}

/// Maps exactly two distinct tokens to 1 and 0. `0`/`1` and `1`/`2` keep
/// their obvious meaning (`2` becomes 0); otherwise the first token seen is 1.
pub fn binarize(tokens: &[String], path: &Path) -> Result<Vec<u8>, CliError> {
    let mut distinct: Vec<&str> = Vec::new();
    for t in tokens {
        if !distinct.contains(&t.as_str()) {
            distinct.push(t);
        }
    }
    if distinct.len() != 2 {
        return Err(CliError::Input(format!("{}: expected exactly two distinct labels, found {}", path.display(), distinct.len())));
    }
    let mut sorted = distinct.clone();
    sorted.sort_unstable();
    let one = match sorted[..] {
        ["0", "1"] => "1",
        ["1", "2"] => "1",
        _ => distinct[0],
    };
    Ok(tokens.iter().map(|t| u8::from(t == one)).collect())
}

/// One-column label file, used by `eval`.
pub fn read_label_file(path: &Path) -> Result<Vec<u8>, CliError> {
    match parse_lines(&read_to_string(path)?, path)? {
        Entries::Positional(tokens) => binarize(&tokens, path),
        Entries::Keyed(_) => Err(CliError::Input(format!("{}: expected one label per line", path.display()))),
    }
}

fn from_report(text: &str, path: &Path) -> Result<Entries, CliError> {
    let bad = |what: &str| CliError::Input(format!("{}: report {what}", path.display()));
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| bad(&format!("is not valid JSON ({e})")))?;
    let ids = v.get("node_ids").and_then(|x| x.as_array()).ok_or_else(|| bad("has no node_ids"))?;
    let labels = v.get("labels").and_then(|x| x.as_array()).ok_or_else(|| bad("has no labels"))?;
    if ids.len() != labels.len() {
        return Err(bad("has node_ids and labels of different lengths"));
    }
    let mut keyed = Vec::with_capacity(ids.len());
    for (id, label) in ids.iter().zip(labels) {
        let id = id.as_str().ok_or_else(|| bad("has a non-string node id"))?;
        let label = label.as_u64().filter(|&l| l <= 1).ok_or_else(|| bad("has a label other than 0 or 1"))?;
        keyed.push((id.to_string(), label.to_string()));
    }
    Ok(Entries::Keyed(keyed))
}

/// Labels for every node of `loaded`, from a label file or a JSON report.
pub fn read_graph_labels(path: &Path, loaded: &LoadedGraph) -> Result<Partition, CliError> {
    let text = read_to_string(path)?;
    let entries = if text.trim_start().starts_with('{') { from_report(&text, path)? } else { parse_lines(&text, path)? };
    let n = loaded.node_ids.len();
    let tokens = match entries {
        Entries::Positional(tokens) => {
            if tokens.len() != n {
                return Err(CliError::Input(format!("{}: {} labels for {n} nodes", path.display(), tokens.len())));
            }
            tokens
        }
        Entries::Keyed(pairs) => {
            let index = loaded.index_of();
            let mut slots: Vec<Option<String>> = vec![None; n];
            let mut seen: HashSet<&str> = HashSet::new();
            for (id, label) in &pairs {
                let &i = index
                    .get(id.as_str())
                    .ok_or_else(|| CliError::Input(format!("{}: node `{id}` is not in the graph", path.display())))?;
                if !seen.insert(id) {
                    return Err(CliError::Input(format!("{}: node `{id}` labelled twice", path.display())));
                }
                slots[i] = Some(label.clone());
            }
            let missing = slots.iter().filter(|s| s.is_none()).count();
            if missing > 0 {
                return Err(CliError::Input(format!("{}: {missing} nodes have no label", path.display())));
            }
            slots.into_iter().flatten().collect()
        }
    };
    Ok(Partition::new(binarize(&tokens, path)?)?)
}
