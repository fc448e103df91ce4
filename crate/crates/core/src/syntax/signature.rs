use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::ast::{Formula, Term};
use super::diagnostic::{DiagnosticKind, Span, SyntaxDiagnostic};

/// Observed uses of every non-logical symbol across a set of formulas.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    /// Predicate symbol → arities it was applied with.
    pub predicates: BTreeMap<String, BTreeSet<usize>>,
    /// Function and constant symbol → arities (0 for constants).
    pub functions: BTreeMap<String, BTreeSet<usize>>,
    #[serde(skip)]
    first_seen: BTreeMap<String, usize>,
}

impl Signature {
    pub fn from_formulas<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> Self {
        let mut sig = Signature::default();
        for (i, f) in formulas.into_iter().enumerate() {
            sig.add_formula(f, i);
        }
        sig
    }

    fn add_formula(&mut self, f: &Formula, index: usize) {
        match f {
            Formula::Atom(p, args) => {
                self.predicates.entry(p.clone()).or_default().insert(args.len());
                self.first_seen.entry(p.clone()).or_insert(index);
                for a in args {
                    self.add_term(a, index);
                }
            }
            Formula::Not(g) | Formula::ForAll(_, g) | Formula::Exists(_, g) => self.add_formula(g, index),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                self.add_formula(a, index);
                self.add_formula(b, index);
            }
        }
    }

    fn add_term(&mut self, t: &Term, index: usize) {
        match t {
            Term::Variable(_) => {}
            Term::Constant(c) => {
                self.functions.entry(c.clone()).or_default().insert(0);
                self.first_seen.entry(c.clone()).or_insert(index);
            }
            Term::Application(f, args) => {
                self.functions.entry(f.clone()).or_default().insert(args.len());
                self.first_seen.entry(f.clone()).or_insert(index);
                for a in args {
                    self.add_term(a, index);
                }
            }
        }
    }

    /// Every symbol name, predicate or term-level.
    pub fn symbols(&self) -> BTreeSet<&str> {
        self.predicates
            .keys()
            .chain(self.functions.keys())
            .map(String::as_str)
            .collect()
    }

    pub fn is_valid(&self) -> bool {
        self.diagnostics().is_empty()
    }

    /// One diagnostic per offending symbol, sorted by symbol name. Arities are
    /// listed in descending order so the result does not depend on formula
    /// order.
    pub fn diagnostics(&self) -> Vec<SyntaxDiagnostic> {
        let mut out = Vec::new();
        for name in self.symbols() {
            let pred = self.predicates.get(name);
            let func = self.functions.get(name);
            let all: BTreeSet<usize> = pred.into_iter().chain(func).flatten().copied().collect();
            let mixed = pred.is_some() && func.is_some();
            if all.len() < 2 && !mixed {
                continue;
            }
            let arities: Vec<usize> = all.into_iter().rev().collect();
            let listing = arities
                .iter()
                .map(|a| format!("{name}/{a}"))
                .collect::<Vec<_>>()
                .join(", ");
            let (kind, message) = if arities.len() >= 2 {
                (
                    DiagnosticKind::MultipleArity,
                    format!("The following symbols are used with multiple arities: {listing}."),
                )
            } else {
                (
                    DiagnosticKind::MixedRole,
                    format!("Symbol used both as a predicate and as a term: {listing}."),
                )
            };
            out.push(SyntaxDiagnostic {
                kind,
                symbol: Some(name.to_owned()),
                arities: Some(arities),
                location: Span::default(),
                formula: self.first_seen.get(name).copied(),
                message,
            });
        }
        out
    }
}

/// Merges the symbol uses of `formulas` and rejects any symbol seen with more
/// than one arity or in both predicate and term position.
pub fn check_signature(formulas: &[Formula]) -> Result<Signature, Vec<SyntaxDiagnostic>> {
    let sig = Signature::from_formulas(formulas);
    let diags = sig.diagnostics();
    if diags.is_empty() {
        Ok(sig)
    } else {
        Err(diags)
    }
}
