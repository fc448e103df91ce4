//! Refutation prover and the three-way entailment decision built on it.

mod saturate;
mod unify;

pub use saturate::{
    saturate, subsumes, ClauseId, Proof, ProofLimits, ProofStep, ReplayError, SaturationOutcome,
    SaturationStatus,
};
pub use unify::{unify, unify_terms, Substitution};

use serde::{Deserialize, Serialize};

use crate::normalize::{Clause, ClauseOrigin, ClausifySession, NormalizeError};
use crate::syntax::Formula;
use crate::voting::Label;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictFlags {
    /// A run stopped on a limit and the other direction did not refute, so
    /// `Uncertain` may be an artifact of the bounds.
    pub resource_limited: bool,
    /// The premises alone are contradictory.
    pub premises_inconsistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub label: Label,
    pub flags: VerdictFlags,
    /// Premises plus the negated conclusion.
    pub forward: SaturationOutcome,
    /// Premises plus the conclusion.
    pub backward: SaturationOutcome,
}

fn refuted(o: &SaturationOutcome) -> bool {
    o.status == SaturationStatus::Refuted
}

/// Decides whether `premises` entail `conclusion` (True), its negation
/// (False), or neither (Uncertain).
///
/// Formulas must be closed. Both directions are attempted; contradictory
/// premises yield Uncertain with `premises_inconsistent` set.
pub fn decide(premises: &[Formula], conclusion: &Formula, limits: &ProofLimits) -> Result<Verdict, NormalizeError> {
    let mut session = ClausifySession::for_formulas(premises.iter().chain(std::iter::once(conclusion)));
    let mut base: Vec<Clause> = Vec::new();
    for (i, p) in premises.iter().enumerate() {
        base.extend(session.clausify(p, ClauseOrigin::Premise(i))?);
    }
    let negated = session.clausify(&Formula::not(conclusion.clone()), ClauseOrigin::NegatedConclusion)?;
    let positive = session.clausify(conclusion, ClauseOrigin::Conclusion)?;

    let with = |extra: Vec<Clause>| {
        let mut cs = base.clone();
        cs.extend(extra);
        cs
    };
    let forward = saturate(&with(negated), limits);
    let backward = saturate(&with(positive), limits);

    let mut flags = VerdictFlags::default();
    if refuted(&forward) || refuted(&backward) {
        let alone = saturate(&base, limits);
        flags.premises_inconsistent =
            refuted(&alone) || (refuted(&forward) && refuted(&backward));
    }
    let limited = |o: &SaturationOutcome| o.status == SaturationStatus::LimitHit;
    let label = if flags.premises_inconsistent {
        Label::Uncertain
    } else if refuted(&forward) {
        Label::True
    } else if refuted(&backward) {
        Label::False
    } else {
        flags.resource_limited = limited(&forward) || limited(&backward);
        Label::Uncertain
    };
    Ok(Verdict { label, flags, forward, backward })
}
