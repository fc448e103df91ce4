use std::path::{Path, PathBuf};

use serde_json::Value;

use super::{DatasetError, ProblemRecord, Source, MAX_DEPTH};
use crate::voting::Label;

/// Loads ProofWriter OWA questions from a `.jsonl` file or from every
/// `.jsonl` file of a directory (in file-name order).
///
/// Both published layouts are accepted: the `meta-*.jsonl` layout
/// (`theory` plus a `questions` object keyed `Q1`, `Q2`, ...) and the plain
/// layout (`context` plus a `questions` list). Each question becomes one
/// record with id `<theory id>-<question id>`.
pub fn load_proofwriter(path: &Path) -> Result<Vec<ProblemRecord>, DatasetError> {
    let files: Vec<PathBuf> = if path.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(path)
            .map_err(|e| DatasetError::io(path, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
            .collect();
        files.sort();
        files
    } else {
        vec![path.to_owned()]
    };
    if files.is_empty() {
        return Err(DatasetError::EmptyDirectory(path.to_owned()));
    }
    let mut out = Vec::new();
    for file in files {
        let text = std::fs::read_to_string(&file).map_err(|e| DatasetError::io(&file, e))?;
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let malformed = |message: String| DatasetError::Malformed { path: file.clone(), line: i + 1, message };
            let v: Value = serde_json::from_str(line).map_err(|e| malformed(e.to_string()))?;
            theory_records(&v, &mut out).map_err(malformed)?;
        }
    }
    Ok(out)
}

/// Splits a theory paragraph into sentences at `.`, `!` or `?` followed by
/// whitespace or the end of text.
pub fn split_sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut start = 0;
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    for (k, &(i, c)) in chars.iter().enumerate() {
        let at_end = chars.get(k + 1).is_none_or(|(_, n)| n.is_whitespace());
        if matches!(c, '.' | '!' | '?') && at_end {
            let s = text[start..i + c.len_utf8()].trim();
            if !s.is_empty() {
                out.push(s.to_owned());
            }
            start = i + c.len_utf8();
        }
    }
    let rest = text[start..].trim();
    if !rest.is_empty() {
        out.push(rest.to_owned());
    }
    out
}

fn answer_label(v: &Value) -> Result<Label, String> {
    match v {
        Value::Bool(true) => Ok(Label::True),
        Value::Bool(false) => Ok(Label::False),
        Value::String(s) => match s.parse::<Label>() {
            Ok(Label::Error) | Err(_) => Err(format!("unrecognized answer `{s}`")),
            Ok(l) => Ok(l),
        },
        other => Err(format!("unrecognized answer {other}")),
    }
}

fn depth_of(v: Option<&Value>) -> Result<u8, String> {
    let d = v.and_then(Value::as_u64).ok_or("question without a proof depth")?;
    if d > MAX_DEPTH as u64 {
        return Err(format!("proof depth {d} exceeds {MAX_DEPTH}"));
    }
    Ok(d as u8)
}

fn theory_records(v: &Value, out: &mut Vec<ProblemRecord>) -> Result<(), String> {
    let id = v.get("id").and_then(Value::as_str).ok_or("missing `id`")?;
    let theory = v
        .get("theory")
        .or_else(|| v.get("context"))
        .and_then(Value::as_str)
        .ok_or("missing `theory`/`context`")?;
    let premises_nl = split_sentences(theory);
    let mut push = |qid: &str, text: &str, label: Label, depth: u8| {
        out.push(ProblemRecord {
            id: format!("{id}-{qid}"),
            premises_nl: premises_nl.clone(),
            conclusion_nl: text.trim().to_owned(),
            premises_fol: None,
            conclusion_fol: None,
            gold_label: label,
            depth: Some(depth),
            source: Source::ProofWriterOwa,
        });
    };
    match v.get("questions") {
        Some(Value::Object(qs)) => {
            // Keys are Q1..Qn; order them numerically.
            let mut keys: Vec<&String> = qs.keys().collect();
            keys.sort_by_key(|k| (k.trim_start_matches('Q').parse::<u64>().unwrap_or(u64::MAX), k.to_string()));
            for k in keys {
                let q = &qs[k];
                let text = q.get("question").and_then(Value::as_str).ok_or("question without text")?;
                let label = answer_label(q.get("answer").ok_or("question without answer")?)?;
                push(k, text, label, depth_of(q.get("QDep"))?);
            }
        }
        Some(Value::Array(qs)) => {
            for (n, q) in qs.iter().enumerate() {
                let qid = q.get("id").and_then(Value::as_str).map_or_else(|| format!("Q{}", n + 1), str::to_owned);
                let qid = qid.strip_prefix(&format!("{id}-")).unwrap_or(&qid).to_owned();
                let text = q.get("text").and_then(Value::as_str).ok_or("question without text")?;
                let label = answer_label(q.get("label").ok_or("question without label")?)?;
                let depth = q.get("meta").and_then(|m| m.get("QDep"));
                push(&qid, text, label, depth_of(depth)?);
            }
        }
        _ => return Err("missing `questions`".into()),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sentence_split() {
        assert_eq!(
            split_sentences("Bob is big. The cat is red! If x then y."),
            vec!["Bob is big.", "The cat is red!", "If x then y."]
        );
        assert_eq!(split_sentences("Dr. 3.5 is odd"), vec!["Dr.", "3.5 is odd"]);
    }

    #[test]
    fn meta_layout() {
        let dir = tempfile::tempdir().unwrap();
        let line = r#"{"id": "AttNoneg-OWA-D3-1", "theory": "Bob is big. Big people are kind.", "questions": {"Q2": {"question": "Bob is not kind.", "answer": false, "QDep": 1}, "Q1": {"question": "Bob is red.", "answer": "Unknown", "QDep": 0}}}"#;
        std::fs::write(dir.path().join("meta-test.jsonl"), format!("{line}\n")).unwrap();
        let recs = load_proofwriter(dir.path()).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].id, "AttNoneg-OWA-D3-1-Q1");
        assert_eq!(recs[0].gold_label, Label::Uncertain);
        assert_eq!(recs[1].gold_label, Label::False);
        assert_eq!(recs[1].depth, Some(1));
        assert_eq!(recs[0].premises_nl.len(), 2);
    }

    #[test]
    fn plain_layout() {
        let dir = tempfile::tempdir().unwrap();
        let line = r#"{"id": "T7", "context": "Anne is nice.", "questions": [{"id": "T7-1", "text": "Anne is nice.", "label": true, "meta": {"QDep": 0}}]}"#;
        let path = dir.path().join("dev.jsonl");
        std::fs::write(&path, line).unwrap();
        let recs = load_proofwriter(&path).unwrap();
        assert_eq!(recs[0].id, "T7-1");
        assert_eq!(recs[0].gold_label, Label::True);
    }

    #[test]
    fn empty_directory_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(load_proofwriter(dir.path()), Err(DatasetError::EmptyDirectory(_))));
    }
}
