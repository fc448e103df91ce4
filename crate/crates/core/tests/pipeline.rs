use std::sync::Mutex;

use neurosym_core::datasets::{ProblemRecord, Source};
use neurosym_core::generation::{
    ClientError, GenConfig, GenerationRequest, GeneratorClient, Mode, ReplayClient, ReplayRecord, StubClient,
};
use neurosym_core::pipeline::{read_run_records, run_dataset, run_problem, RunConfig, RunRecord};
use neurosym_core::voting::{majority_vote, Label};

fn problem(id: &str) -> ProblemRecord {
    ProblemRecord {
        id: id.into(),
        premises_nl: vec!["Tom is a cat.".into(), "All cats are animals.".into()],
        conclusion_nl: "Tom is an animal.".into(),
        premises_fol: None,
        conclusion_fol: None,
        gold_label: Label::True,
        depth: None,
        source: Source::FolioVal,
    }
}

fn config(mode: Mode, n: usize) -> RunConfig {
    RunConfig::new(mode, GenConfig { n_samples: n, k_shot: 1, ..GenConfig::default() })
}

/// Stub that remembers which problems it was asked about.
struct Recording {
    inner: StubClient,
    seen: Mutex<Vec<String>>,
}

impl GeneratorClient for Recording {
    fn complete(&self, req: &GenerationRequest<'_>) -> Result<Vec<String>, ClientError> {
        self.seen.lock().unwrap().push(req.problem_id.to_owned());
        if req.problem_id == "broken" {
            return Err(ClientError::Transport("connection reset".into()));
        }
        self.inner.complete(req)
    }

    fn kind(&self) -> &'static str {
        "recording"
    }
}

fn recording(script: &[&str]) -> Recording {
    Recording { inner: StubClient::new(script.iter().map(|s| s.to_string()).collect()), seen: Mutex::new(vec![]) }
}

fn replay(problem_id: &str, mode: Mode, completions: &[&str]) -> ReplayClient {
    ReplayClient::from_records(completions.iter().enumerate().map(|(i, c)| ReplayRecord {
        problem_id: problem_id.into(),
        mode,
        sample_index: i,
        completion: c.to_string(),
    }))
}

fn final_label(r: &RunRecord) -> Label {
    match r {
        RunRecord::Prediction(p) => p.vote.final_label,
        RunRecord::Failure(f) => panic!("unexpected failure {f:?}"),
    }
}

#[test]
fn naive_stub_run_preserves_order() {
    let problems: Vec<_> = ["a", "b", "c"].iter().map(|id| problem(id)).collect();
    let out = run_dataset(&StubClient::new(vec!["True".into()]), &config(Mode::Naive, 10), &problems, None).unwrap();
    let ids: Vec<&str> = out.iter().map(|r| r.problem_id()).collect();
    assert_eq!(ids, ["a", "b", "c"]);
    assert!(out.iter().all(|r| final_label(r) == Label::True));
}

#[test]
fn resume_only_regenerates_missing_problems() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("preds.jsonl");
    let problems: Vec<_> = ["a", "b", "c"].iter().map(|id| problem(id)).collect();
    let cfg = config(Mode::Naive, 3);

    let first = recording(&["True"]);
    run_dataset(&first, &cfg, &problems[..2], Some(&ck)).unwrap();
    // Simulate a crash mid-write.
    let mut text = std::fs::read_to_string(&ck).unwrap();
    text.push_str("{\"kind\": \"predic");
    std::fs::write(&ck, text).unwrap();

    let second = recording(&["True"]);
    let out = run_dataset(&second, &cfg, &problems, Some(&ck)).unwrap();
    assert_eq!(*second.seen.lock().unwrap(), ["c"]);
    assert_eq!(out.len(), 3);
    let on_disk = read_run_records(&ck).unwrap();
    assert_eq!(on_disk, out);
}

#[test]
fn transport_failure_is_recorded_and_run_continues() {
    let problems = vec![problem("broken"), problem("ok")];
    let out = run_dataset(&recording(&["False"]), &config(Mode::Naive, 2), &problems, None).unwrap();
    assert!(matches!(&out[0], RunRecord::Failure(f) if f.error.contains("connection reset")));
    assert_eq!(final_label(&out[1]), Label::False);
}

#[test]
fn seven_uncertain_outvote_three_true() {
    let mut labels = vec!["True"; 3];
    labels.extend(["Uncertain"; 7]);
    let client = replay("p", Mode::Naive, &labels);
    let pred = run_problem(&client, &config(Mode::Naive, 10), &problem("p")).unwrap();
    assert_eq!(pred.vote.final_label, Label::Uncertain);
}

#[test]
fn all_invalid_programs_vote_error() {
    let client = replay("p", Mode::Linc, &["FOL:\tall x. (Cat(x)\nFOL:\tAnimal(Tom)"; 10]);
    let pred = run_problem(&client, &config(Mode::Linc, 10), &problem("p")).unwrap();
    assert!(pred.per_sample_labels.iter().all(|l| *l == Label::Error));
    assert_eq!(pred.vote.final_label, Label::Error);
    assert_eq!(pred.notes.iter().filter(|n| n.contains("parenthesis")).count(), 10);
}

#[test]
fn syntax_error_sample_is_filtered_from_the_vote() {
    let client = replay(
        "p",
        Mode::Linc,
        &[
            "FOL:\tCat(Tom)\nFOL:\tall x. (Cat(x) -> Animal(x))\nFOL:\tAnimal(Tom)",
            "FOL:\tCat(Tom)\nFOL:\tall x. (Cat(x) -> Animal(x)))\nFOL:\tAnimal(Tom)",
            "FOL:\tCat(Tom)\nFOL:\tall x. (Cat(x) -> Animal(x))\nFOL:\tAnimal(Tom)",
            "FOL:\tCat(Tom)\nFOL:\tall x. (Cat(x) -> -Animal(x))\nFOL:\tAnimal(Tom)",
        ],
    );
    let pred = run_problem(&client, &config(Mode::Linc, 4), &problem("p")).unwrap();
    assert_eq!(pred.per_sample_labels, [Label::True, Label::Error, Label::True, Label::False]);
    assert_eq!(pred.vote.final_label, Label::True);
    assert_eq!(pred.vote, majority_vote(&pred.per_sample_labels).unwrap());
}

#[test]
fn premise_count_mismatch_is_noted_not_fatal() {
    let client = replay("p", Mode::Linc, &["FOL:\tCat(Tom) & all x. (Cat(x) -> Animal(x))\nFOL:\tAnimal(Tom)"]);
    let pred = run_problem(&client, &config(Mode::Linc, 1), &problem("p")).unwrap();
    assert_eq!(pred.per_sample_labels, [Label::True]);
    assert!(pred.notes[0].contains("1 premise formulas for 2 premises"));
}

#[test]
fn replay_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let client = replay("p", Mode::Cot, &["ANSWER:\tTrue", "ANSWER:\tFalse", "no answer"]);
    let cfg = config(Mode::Cot, 3);
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    run_dataset(&client, &cfg, &[problem("p")], Some(&a)).unwrap();
    run_dataset(&client, &cfg, &[problem("p")], Some(&b)).unwrap();
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}
