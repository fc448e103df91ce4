//! Given-clause saturation with binary resolution and factoring.
//!
//! Clauses are selected lightest first, ties broken by age (clause id).
//! New clauses subsumed by a kept clause are discarded; a newly activated
//! clause removes kept clauses it subsumes.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::unify::{match_term, unify, Substitution};
use crate::normalize::{Clause, ClauseOrigin, ClauseTerm, Literal};

/// Bounds on one saturation run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProofLimits {
    pub max_seconds: Duration,
    pub max_clauses: usize,
    /// Generated clauses heavier than this (symbol count) are discarded.
    pub max_clause_weight: usize,
    /// Checked once per given clause; setting it stops the run as limit-hit.
    #[serde(skip)]
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Default for ProofLimits {
    fn default() -> Self {
        ProofLimits {
            max_seconds: Duration::from_secs(10),
            max_clauses: 100_000,
            max_clause_weight: 64,
            cancel: None,
        }
    }
}

impl ProofLimits {
    pub fn with_seconds(secs: f64) -> Self {
        ProofLimits { max_seconds: Duration::from_secs_f64(secs), ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SaturationStatus {
    Refuted,
    Saturated,
    LimitHit,
}

pub type ClauseId = usize;

/// One inference of a refutation. `result` is the normalized conclusion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum ProofStep {
    Resolve {
        id: ClauseId,
        left: ClauseId,
        left_literal: usize,
        right: ClauseId,
        right_literal: usize,
        /// Added to every variable of `right` before unification.
        right_offset: u32,
        unifier: Substitution,
        result: Clause,
    },
    Factor {
        id: ClauseId,
        parent: ClauseId,
        first: usize,
        second: usize,
        unifier: Substitution,
        result: Clause,
    },
}

impl ProofStep {
    pub fn id(&self) -> ClauseId {
        match self {
            ProofStep::Resolve { id, .. } | ProofStep::Factor { id, .. } => *id,
        }
    }

    pub fn result(&self) -> &Clause {
        match self {
            ProofStep::Resolve { result, .. } | ProofStep::Factor { result, .. } => result,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Proof {
    /// Input clauses used by the refutation, with their ids.
    pub inputs: Vec<(ClauseId, Clause)>,
    /// Inferences in derivation order; the last one yields the empty clause
    /// unless an input clause was already empty.
    pub steps: Vec<ProofStep>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error("step {0} refers to unknown clause {1}")]
    UnknownParent(ClauseId, ClauseId),
    #[error("step {0}: literal index out of range")]
    BadLiteral(ClauseId),
    #[error("step {0}: unifier does not make the selected literals complementary/equal")]
    NotUnified(ClauseId),
    #[error("step {0}: recomputed clause differs from the recorded one")]
    WrongResult(ClauseId),
    #[error("proof does not end in the empty clause")]
    NoEmptyClause,
}

impl Proof {
    /// Re-derives every step from its recorded parents and unifier and checks
    /// that the final clause is empty.
    pub fn replay(&self) -> Result<(), ReplayError> {
        let mut known: Vec<(ClauseId, Clause)> = self.inputs.clone();
        let lookup = |known: &[(ClauseId, Clause)], step: ClauseId, id: ClauseId| {
            known
                .iter()
                .find(|(k, _)| *k == id)
                .map(|(_, c)| c.clone())
                .ok_or(ReplayError::UnknownParent(step, id))
        };
        for step in &self.steps {
            let recomputed = match step {
                ProofStep::Resolve { id, left, left_literal, right, right_literal, right_offset, unifier, .. } => {
                    let l = lookup(&known, *id, *left)?;
                    let r = shift(&lookup(&known, *id, *right)?, *right_offset);
                    let (Some(a), Some(b)) = (l.literals.get(*left_literal), r.literals.get(*right_literal)) else {
                        return Err(ReplayError::BadLiteral(*id));
                    };
                    if a.positive == b.positive
                        || unifier.apply_literal(a) != unifier.apply_literal(b).negated()
                    {
                        return Err(ReplayError::NotUnified(*id));
                    }
                    resolvent(&l, *left_literal, &r, *right_literal, unifier)
                }
                ProofStep::Factor { id, parent, first, second, unifier, .. } => {
                    let p = lookup(&known, *id, *parent)?;
                    let (Some(a), Some(b)) = (p.literals.get(*first), p.literals.get(*second)) else {
                        return Err(ReplayError::BadLiteral(*id));
                    };
                    if unifier.apply_literal(a) != unifier.apply_literal(b) {
                        return Err(ReplayError::NotUnified(*id));
                    }
                    factor(&p, unifier)
                }
            };
            let recorded = step.result();
            match recomputed {
                Some(c) if c.literals == recorded.literals => {}
                _ => return Err(ReplayError::WrongResult(step.id())),
            }
            known.push((step.id(), recorded.clone()));
        }
        let last = self
            .steps
            .last()
            .map(|s| s.result().clone())
            .or_else(|| self.inputs.iter().find(|(_, c)| c.is_empty()).map(|(_, c)| c.clone()));
        match last {
            Some(c) if c.is_empty() => Ok(()),
            _ => Err(ReplayError::NoEmptyClause),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaturationOutcome {
    pub status: SaturationStatus,
    /// Derived clauses that were kept.
    pub derived_count: usize,
    /// Present exactly when `status` is `Refuted`.
    pub proof: Option<Proof>,
}

fn shift(c: &Clause, offset: u32) -> Clause {
    Clause {
        literals: c
            .literals
            .iter()
            .map(|l| l.map_vars(&mut |v| ClauseTerm::Var(v + offset)))
            .collect(),
        origin: c.origin,
    }
}

fn resolvent(left: &Clause, li: usize, right: &Clause, ri: usize, s: &Substitution) -> Option<Clause> {
    let lits = left
        .literals
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != li)
        .map(|(_, l)| s.apply_literal(l))
        .chain(
            right
                .literals
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != ri)
                .map(|(_, l)| s.apply_literal(l)),
        )
        .collect();
    Clause::normalized(lits, ClauseOrigin::Derived)
}

fn factor(parent: &Clause, s: &Substitution) -> Option<Clause> {
    Clause::normalized(parent.literals.iter().map(|l| s.apply_literal(l)).collect(), ClauseOrigin::Derived)
}

/// Cheap necessary condition for subsumption: a bitset of
/// (predicate, polarity) hashes.
fn feature_bits(c: &Clause) -> u64 {
    c.literals.iter().fold(0u64, |acc, l| {
        let mut h: u64 = if l.positive { 0x9e37_79b9 } else { 0x7f4a_7c15 };
        for b in l.predicate.bytes() {
            h = h.wrapping_mul(31).wrapping_add(b as u64);
        }
        h = h.wrapping_mul(31).wrapping_add(l.args.len() as u64);
        acc | (1u64 << (h % 64))
    })
}

/// `sub` subsumes `target` if some substitution maps the literals of `sub`
/// injectively into those of `target`.
pub fn subsumes(sub: &Clause, target: &Clause) -> bool {
    if sub.literals.len() > target.literals.len() {
        return false;
    }
    let mut used = vec![false; target.literals.len()];
    let mut theta = Vec::new();
    subsumes_from(&sub.literals, &target.literals, 0, &mut used, &mut theta)
}

fn subsumes_from(
    sub: &[Literal],
    target: &[Literal],
    i: usize,
    used: &mut [bool],
    theta: &mut Vec<(u32, ClauseTerm)>,
) -> bool {
    let Some(lit) = sub.get(i) else { return true };
    for (j, t) in target.iter().enumerate() {
        if used[j] || t.positive != lit.positive || t.predicate != lit.predicate || t.args.len() != lit.args.len() {
            continue;
        }
        let mark = theta.len();
        if lit.args.iter().zip(&t.args).all(|(p, q)| match_term(p, q, theta)) {
            used[j] = true;
            if subsumes_from(sub, target, i + 1, used, theta) {
                return true;
            }
            used[j] = false;
        }
        theta.truncate(mark);
    }
    false
}

enum Derivation {
    Input,
    Step(ProofStep),
}

struct Stored {
    clause: Clause,
    bits: u64,
    derivation: Derivation,
    alive: bool,
}

struct State<'l> {
    store: Vec<Stored>,
    active: Vec<ClauseId>,
    passive: BinaryHeap<Reverse<(usize, ClauseId)>>,
    limits: &'l ProofLimits,
    weight_dropped: bool,
    derived: usize,
}

enum Added {
    Kept,
    Discarded,
    Empty(ClauseId),
}

impl<'l> State<'l> {
    fn forward_subsumed(&self, c: &Clause, bits: u64) -> bool {
        self.store.iter().any(|s| {
            s.alive && s.bits & !bits == 0 && s.clause.literals.len() <= c.literals.len() && subsumes(&s.clause, c)
        })
    }

    fn add(&mut self, clause: Clause, derivation: Derivation) -> Added {
        let derived = matches!(derivation, Derivation::Step(_));
        if derived && clause.weight() > self.limits.max_clause_weight {
            self.weight_dropped = true;
            return Added::Discarded;
        }
        let bits = feature_bits(&clause);
        if !clause.is_empty() && self.forward_subsumed(&clause, bits) {
            return Added::Discarded;
        }
        let id = self.store.len();
        let empty = clause.is_empty();
        let weight = clause.weight();
        self.store.push(Stored { clause, bits, derivation, alive: true });
        if derived {
            self.derived += 1;
        }
        if empty {
            return Added::Empty(id);
        }
        self.passive.push(Reverse((weight, id)));
        Added::Kept
    }

    fn back_subsume(&mut self, given: ClauseId) {
        let (gc, gbits) = (self.store[given].clause.clone(), self.store[given].bits);
        for (id, s) in self.store.iter_mut().enumerate() {
            if id != given && s.alive && gbits & !s.bits == 0 && subsumes(&gc, &s.clause) {
                s.alive = false;
            }
        }
        let store = &self.store;
        self.active.retain(|id| store[*id].alive);
    }

    fn proof(&self, empty: ClauseId) -> Proof {
        let mut needed = vec![false; self.store.len()];
        let mut stack = vec![empty];
        while let Some(id) = stack.pop() {
            if needed[id] {
                continue;
            }
            needed[id] = true;
            match &self.store[id].derivation {
                Derivation::Input => {}
                Derivation::Step(ProofStep::Resolve { left, right, .. }) => {
                    stack.push(*left);
                    stack.push(*right);
                }
                Derivation::Step(ProofStep::Factor { parent, .. }) => stack.push(*parent),
            }
        }
        let mut inputs = Vec::new();
        let mut steps = Vec::new();
        for (id, s) in self.store.iter().enumerate() {
            if !needed[id] {
                continue;
            }
            match &s.derivation {
                Derivation::Input => inputs.push((id, s.clause.clone())),
                Derivation::Step(step) => steps.push(step.clone()),
            }
        }
        Proof { inputs, steps }
    }

    fn outcome(&self, status: SaturationStatus, proof: Option<Proof>) -> SaturationOutcome {
        SaturationOutcome { status, derived_count: self.derived, proof }
    }
}

/// Runs the given-clause loop on `clauses` until the empty clause is derived,
/// no unprocessed clause remains, or a limit trips.
///
/// A run that discarded clauses for exceeding the weight bound cannot claim
/// saturation and reports `LimitHit` instead.
pub fn saturate(clauses: &[Clause], limits: &ProofLimits) -> SaturationOutcome {
    let start = Instant::now();
    let mut st = State {
        store: Vec::new(),
        active: Vec::new(),
        passive: BinaryHeap::new(),
        limits,
        weight_dropped: false,
        derived: 0,
    };
    for c in clauses {
        let Some(c) = Clause::normalized(c.literals.clone(), c.origin) else { continue };
        if let Added::Empty(id) = st.add(c, Derivation::Input) {
            return st.outcome(SaturationStatus::Refuted, Some(st.proof(id)));
        }
    }
    let cancelled = || limits.cancel.as_ref().is_some_and(|c| c.load(Ordering::Relaxed));
    while let Some(Reverse((_, given))) = st.passive.pop() {
        if start.elapsed() > limits.max_seconds || st.store.len() > limits.max_clauses || cancelled() {
            return st.outcome(SaturationStatus::LimitHit, None);
        }
        if !st.store[given].alive {
            continue;
        }
        st.back_subsume(given);
        st.active.push(given);

        let mut new: Vec<(Clause, ProofStep)> = Vec::new();
        let gclause = st.store[given].clause.clone();
        for i in 0..gclause.literals.len() {
            for j in i + 1..gclause.literals.len() {
                let (a, b) = (&gclause.literals[i], &gclause.literals[j]);
                if a.positive != b.positive {
                    continue;
                }
                if let Some(s) = unify(a, b) {
                    if let Some(result) = factor(&gclause, &s) {
                        let step = ProofStep::Factor {
                            id: 0,
                            parent: given,
                            first: i,
                            second: j,
                            unifier: s,
                            result: result.clone(),
                        };
                        new.push((result, step));
                    }
                }
            }
        }
        let offset = gclause.max_var().map_or(0, |m| m + 1);
        for &other in &st.active {
            let oclause = shift(&st.store[other].clause, offset);
            for (li, l) in gclause.literals.iter().enumerate() {
                for (ri, r) in oclause.literals.iter().enumerate() {
                    if l.positive == r.positive || l.predicate != r.predicate {
                        continue;
                    }
                    let Some(s) = unify(l, r) else { continue };
                    let Some(result) = resolvent(&gclause, li, &oclause, ri, &s) else { continue };
                    let step = ProofStep::Resolve {
                        id: 0,
                        left: given,
                        left_literal: li,
                        right: other,
                        right_literal: ri,
                        right_offset: offset,
                        unifier: s,
                        result: result.clone(),
                    };
                    new.push((result, step));
                }
            }
        }
        for (clause, mut step) in new {
            let next_id = st.store.len();
            match &mut step {
                ProofStep::Resolve { id, .. } | ProofStep::Factor { id, .. } => *id = next_id,
            }
            if let Added::Empty(id) = st.add(clause, Derivation::Step(step)) {
                return st.outcome(SaturationStatus::Refuted, Some(st.proof(id)));
            }
        }
    }
    let status = if st.weight_dropped { SaturationStatus::LimitHit } else { SaturationStatus::Saturated };
    st.outcome(status, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalize::ClausifySession;
    use crate::syntax::parse;

    fn clauses(src: &[&str]) -> Vec<Clause> {
        let fs: Vec<_> = src.iter().map(|s| parse(s).unwrap()).collect();
        let mut session = ClausifySession::for_formulas(&fs);
        fs.iter()
            .enumerate()
            .flat_map(|(i, f)| session.clausify(f, ClauseOrigin::Premise(i)).unwrap())
            .collect()
    }

    #[test]
    fn direct_contradiction() {
        let out = saturate(&clauses(&["P(A)", "-P(A)"]), &ProofLimits::default());
        assert_eq!(out.status, SaturationStatus::Refuted);
        let proof = out.proof.unwrap();
        assert_eq!(proof.steps.len(), 1);
        proof.replay().unwrap();
    }

    #[test]
    fn nothing_to_resolve() {
        let out = saturate(&clauses(&["P(A)"]), &ProofLimits::default());
        assert_eq!(out.status, SaturationStatus::Saturated);
        assert!(out.proof.is_none());
    }

    #[test]
    fn modus_ponens_refutation() {
        let out = saturate(
            &clauses(&["all x. (P(x) -> Q(x))", "P(A)", "-Q(A)"]),
            &ProofLimits::default(),
        );
        assert_eq!(out.status, SaturationStatus::Refuted);
        out.proof.unwrap().replay().unwrap();
    }

    #[test]
    fn factoring_is_needed() {
        // {P(x) | P(y)}, {-P(u) | -P(v)} is unsatisfiable only via factoring.
        let out = saturate(
            &clauses(&["all x. all y. (P(x) | P(y))", "all u. all v. (-P(u) | -P(v))"]),
            &ProofLimits::default(),
        );
        assert_eq!(out.status, SaturationStatus::Refuted);
        out.proof.unwrap().replay().unwrap();
    }

    #[test]
    fn tampered_proof_fails_replay() {
        let out = saturate(
            &clauses(&["all x. (P(x) -> Q(x))", "P(A)", "-Q(A)"]),
            &ProofLimits::default(),
        );
        let mut proof = out.proof.unwrap();
        if let Some(ProofStep::Resolve { unifier, .. }) = proof.steps.first_mut() {
            *unifier = Substitution::new();
        }
        assert!(proof.replay().is_err());
    }

    #[test]
    fn runaway_skolem_recursion_hits_limit() {
        let cs = clauses(&["P(A)", "all x. (P(x) -> exists y. (R(x, y) & P(y)))", "-Q(A)"]);
        let limits = ProofLimits { max_clause_weight: 12, ..ProofLimits::default() };
        let out = saturate(&cs, &limits);
        assert_eq!(out.status, SaturationStatus::LimitHit);
    }

    #[test]
    fn cancellation_stops_the_run() {
        let flag = Arc::new(AtomicBool::new(true));
        let limits = ProofLimits { cancel: Some(flag), ..ProofLimits::default() };
        let out = saturate(&clauses(&["P(A)", "all x. (P(x) -> Q(x))"]), &limits);
        assert_eq!(out.status, SaturationStatus::LimitHit);
    }

    #[test]
    fn subsumption() {
        let general = Clause::normalized(
            vec![Literal::new(true, "P", vec![ClauseTerm::Var(0)])],
            ClauseOrigin::Derived,
        )
        .unwrap();
        let specific = Clause::normalized(
            vec![
                Literal::new(true, "P", vec![ClauseTerm::constant("A")]),
                Literal::new(false, "Q", vec![ClauseTerm::Var(0)]),
            ],
            ClauseOrigin::Derived,
        )
        .unwrap();
        assert!(subsumes(&general, &specific));
        assert!(!subsumes(&specific, &general));
    }
}
