use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{DatasetError, ProblemRecord, Source};
use crate::prover::{decide, ProofLimits};
use crate::syntax::{parse_closed, Dialect, ParseOptions};
use crate::voting::Label;

/// Reads a FOLIO JSONL file. Record ids are `folio-train-N` / `folio-val-N`
/// where `N` is the 0-based line number. The split is taken from the file
/// name (`train` → training split, anything else → validation).
pub fn load_folio(path: &Path) -> Result<Vec<ProblemRecord>, DatasetError> {
    let text = std::fs::read_to_string(path).map_err(|e| DatasetError::io(path, e))?;
    let name = path.file_name().map(|n| n.to_string_lossy().to_lowercase()).unwrap_or_default();
    let source = if name.contains("train") { Source::FolioTrain } else { Source::FolioVal };
    parse_folio(&text, source).map_err(|(line, message)| DatasetError::Malformed {
        path: path.to_owned(),
        line,
        message,
    })
}

/// Parses FOLIO JSONL text; errors carry the 1-based line number.
pub fn parse_folio(text: &str, source: Source) -> Result<Vec<ProblemRecord>, (usize, String)> {
    let prefix = match source {
        Source::FolioTrain => "folio-train",
        _ => "folio-val",
    };
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let v: Value = serde_json::from_str(line).map_err(|e| (i + 1, e.to_string()))?;
        let rec = folio_record(&v, format!("{prefix}-{i}"), source).map_err(|m| (i + 1, m))?;
        out.push(rec);
    }
    Ok(out)
}

// Premise fields are either a list of strings or one newline-separated string.
fn text_list(v: &Value, field: &str) -> Result<Option<Vec<String>>, String> {
    match v.get(field) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(
            s.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::to_owned).collect(),
        )),
        Some(Value::Array(items)) => items
            .iter()
            .map(|x| x.as_str().map(|s| s.trim().to_owned()).ok_or_else(|| format!("`{field}` holds a non-string")))
            .collect::<Result<Vec<_>, _>>()
            .map(Some),
        Some(_) => Err(format!("`{field}` must be a string or a list")),
    }
}

fn folio_record(v: &Value, id: String, source: Source) -> Result<ProblemRecord, String> {
    let premises_nl = text_list(v, "premises")?.ok_or("missing `premises`")?;
    let conclusion_nl = v
        .get("conclusion")
        .and_then(Value::as_str)
        .ok_or("missing `conclusion`")?
        .trim()
        .to_owned();
    let label = v.get("label").and_then(Value::as_str).ok_or("missing `label`")?;
    let gold_label: Label = label.parse().map_err(|e| format!("{e}"))?;
    if gold_label == Label::Error {
        return Err("gold label cannot be Error".into());
    }
    Ok(ProblemRecord {
        id,
        premises_nl,
        conclusion_nl,
        premises_fol: text_list(v, "premises-FOL")?,
        conclusion_fol: v.get("conclusion-FOL").and_then(Value::as_str).map(|s| s.trim().to_owned()),
        gold_label,
        depth: None,
        source,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterReason {
    UnbalancedParens,
    LabelMismatch,
    CountMismatch,
    /// Gold FOL that fails to parse for a reason other than parentheses.
    ParseError,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub removed_ids: Vec<String>,
    pub reasons: BTreeMap<String, FilterReason>,
    /// Human-readable explanation per removed id.
    pub details: BTreeMap<String, String>,
}

impl FilterReport {
    pub fn count(&self, reason: FilterReason) -> usize {
        self.reasons.values().filter(|r| **r == reason).count()
    }
}

fn balanced(s: &str) -> bool {
    let mut depth = 0i64;
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}

fn check(rec: &ProblemRecord, limits: &ProofLimits) -> Option<(FilterReason, String)> {
    let (Some(pfol), Some(cfol)) = (&rec.premises_fol, &rec.conclusion_fol) else {
        return Some((FilterReason::ParseError, "missing gold FOL".into()));
    };
    if let Some(bad) = pfol.iter().chain(std::iter::once(cfol)).find(|s| !balanced(s)) {
        return Some((FilterReason::UnbalancedParens, bad.clone()));
    }
    if pfol.len() != rec.premises_nl.len() {
        return Some((
            FilterReason::CountMismatch,
            format!("{} premises, {} gold formulas", rec.premises_nl.len(), pfol.len()),
        ));
    }
    let options = ParseOptions { dialect: Dialect::Folio };
    let mut premises = Vec::with_capacity(pfol.len());
    for s in pfol {
        match parse_closed(s, options, true) {
            Ok(f) => premises.push(f),
            Err(d) => return Some((FilterReason::ParseError, format!("{s}: {d}"))),
        }
    }
    let conclusion = match parse_closed(cfol, options, true) {
        Ok(f) => f,
        Err(d) => return Some((FilterReason::ParseError, format!("{cfol}: {d}"))),
    };
    match decide(&premises, &conclusion, limits) {
        Ok(v) if v.label == rec.gold_label => None,
        Ok(v) => Some((
            FilterReason::LabelMismatch,
            format!("gold {}, prover {}{}", rec.gold_label, v.label, if v.flags.resource_limited { " (limit hit)" } else { "" }),
        )),
        Err(e) => Some((FilterReason::LabelMismatch, e.to_string())),
    }
}

/// Removes records whose gold annotation is unusable: unbalanced
/// parentheses, premise/formula count mismatch, unparsable formulas, or a
/// gold label the prover does not reproduce. Checks run in that order and
/// the first failing one is reported. Records are checked in parallel; the
/// kept list preserves input order.
pub fn validate_folio(records: &[ProblemRecord], limits: &ProofLimits) -> (Vec<ProblemRecord>, FilterReport) {
    let verdicts: Vec<_> = records.par_iter().map(|r| check(r, limits)).collect();
    let mut kept = Vec::new();
    let mut report = FilterReport::default();
    for (rec, verdict) in records.iter().zip(verdicts) {
        match verdict {
            None => kept.push(rec.clone()),
            Some((reason, detail)) => {
                report.removed_ids.push(rec.id.clone());
                report.reasons.insert(rec.id.clone(), reason);
                report.details.insert(rec.id.clone(), detail);
            }
        }
    }
    (kept, report)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROWS: &str = r#"{"premises": ["All cats are animals.", "Tom is a cat."], "premises-FOL": ["∀x (Cat(x) → Animal(x))", "Cat(tom)"], "conclusion": "Tom is an animal.", "conclusion-FOL": "Animal(tom)", "label": "True"}
{"premises": "All cats are animals.\nTom is a cat.\nTom sleeps.", "premises-FOL": "∀x (Cat(x) → Animal(x))\nCat(tom)", "conclusion": "Tom is an animal.", "conclusion-FOL": "Animal(tom)", "label": "True"}
{"premises": ["Tom is a cat."], "premises-FOL": ["Cat(tom))"], "conclusion": "Tom is a cat.", "conclusion-FOL": "Cat(tom)", "label": "True"}
{"premises": ["Tom is a cat."], "premises-FOL": ["Cat(tom)"], "conclusion": "Tom is a dog.", "conclusion-FOL": "Dog(tom)", "label": "False"}
"#;

    #[test]
    fn loads_both_premise_layouts() {
        let recs = parse_folio(ROWS, Source::FolioVal).unwrap();
        assert_eq!(recs.len(), 4);
        assert_eq!(recs[1].premises_nl.len(), 3);
        assert_eq!(recs[1].premises_fol.as_ref().unwrap().len(), 2);
        assert_eq!(recs[0].id, "folio-val-0");
    }

    #[test]
    fn filter_reasons() {
        let recs = parse_folio(ROWS, Source::FolioVal).unwrap();
        let (kept, report) = validate_folio(&recs, &ProofLimits::default());
        assert_eq!(kept.len(), 1);
        assert_eq!(report.reasons["folio-val-1"], FilterReason::CountMismatch);
        assert_eq!(report.reasons["folio-val-2"], FilterReason::UnbalancedParens);
        assert_eq!(report.reasons["folio-val-3"], FilterReason::LabelMismatch);
        assert_eq!(report.removed_ids.len(), report.reasons.len());
    }

    #[test]
    fn corrupt_line_is_named() {
        let text = format!("{}not json\n", ROWS.lines().next().unwrap().to_owned() + "\n");
        assert_eq!(parse_folio(&text, Source::FolioVal).unwrap_err().0, 2);
        assert!(parse_folio("", Source::FolioVal).unwrap().is_empty());
    }
}
