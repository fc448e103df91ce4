//! Conversion of closed formulas into clause normal form.
//!
//! The pipeline is `to_nnf` → `skolemize` → drop universals → distribute
//! `|` over `&`. Distribution is direct (no definitional CNF), guarded by a
//! per-formula clause-count bound.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{Formula, Term};

pub const DEFAULT_MAX_CLAUSES_PER_FORMULA: usize = 10_000;

/// Term inside a clause. Variables are numbered per clause and print as
/// `v0`, `v1`, …; constants are zero-argument functions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClauseTerm {
    Var(u32),
    Fn(String, Vec<ClauseTerm>),
}

impl ClauseTerm {
    pub fn constant(name: impl Into<String>) -> Self {
        ClauseTerm::Fn(name.into(), Vec::new())
    }

    pub fn weight(&self) -> usize {
        match self {
            ClauseTerm::Var(_) => 1,
            ClauseTerm::Fn(_, args) => 1 + args.iter().map(ClauseTerm::weight).sum::<usize>(),
        }
    }

    pub fn contains_var(&self, v: u32) -> bool {
        match self {
            ClauseTerm::Var(w) => *w == v,
            ClauseTerm::Fn(_, args) => args.iter().any(|a| a.contains_var(v)),
        }
    }

    pub fn max_var(&self) -> Option<u32> {
        match self {
            ClauseTerm::Var(v) => Some(*v),
            ClauseTerm::Fn(_, args) => args.iter().filter_map(ClauseTerm::max_var).max(),
        }
    }

    pub(crate) fn map_vars(&self, f: &mut impl FnMut(u32) -> ClauseTerm) -> ClauseTerm {
        match self {
            ClauseTerm::Var(v) => f(*v),
            ClauseTerm::Fn(name, args) => {
                ClauseTerm::Fn(name.clone(), args.iter().map(|a| a.map_vars(f)).collect())
            }
        }
    }
}

impl fmt::Display for ClauseTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClauseTerm::Var(v) => write!(f, "v{v}"),
            ClauseTerm::Fn(name, args) => {
                f.write_str(name)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub positive: bool,
    pub predicate: String,
    pub args: Vec<ClauseTerm>,
}

impl Literal {
    pub fn new(positive: bool, predicate: impl Into<String>, args: Vec<ClauseTerm>) -> Self {
        Literal { positive, predicate: predicate.into(), args }
    }

    pub fn negated(&self) -> Literal {
        Literal { positive: !self.positive, ..self.clone() }
    }

    pub fn weight(&self) -> usize {
        1 + self.args.iter().map(ClauseTerm::weight).sum::<usize>()
    }

    pub fn is_complement_of(&self, other: &Literal) -> bool {
        self.positive != other.positive && self.predicate == other.predicate && self.args == other.args
    }

    pub fn max_var(&self) -> Option<u32> {
        self.args.iter().filter_map(ClauseTerm::max_var).max()
    }

    pub(crate) fn map_vars(&self, f: &mut impl FnMut(u32) -> ClauseTerm) -> Literal {
        Literal {
            positive: self.positive,
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|a| a.map_vars(f)).collect(),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("-")?;
        }
        write!(f, "{}", ClauseTerm::Fn(self.predicate.clone(), self.args.clone()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "index")]
pub enum ClauseOrigin {
    Premise(usize),
    NegatedConclusion,
    Conclusion,
    Derived,
}

/// A disjunction of literals; all variables implicitly universal. The empty
/// clause denotes a contradiction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Clause {
    pub literals: Vec<Literal>,
    pub origin: ClauseOrigin,
}

impl Clause {
    /// Builds a clause, merging duplicate literals and renumbering variables
    /// `0..n` by first occurrence. Returns `None` for tautologies.
    pub fn normalized(literals: Vec<Literal>, origin: ClauseOrigin) -> Option<Clause> {
        let mut kept: Vec<Literal> = Vec::with_capacity(literals.len());
        for lit in literals {
            if kept.iter().any(|k| k.is_complement_of(&lit)) {
                return None;
            }
            if !kept.contains(&lit) {
                kept.push(lit);
            }
        }
        let mut renaming: HashMap<u32, u32> = HashMap::new();
        let literals = kept
            .iter()
            .map(|l| {
                l.map_vars(&mut |v| {
                    let next = renaming.len() as u32;
                    ClauseTerm::Var(*renaming.entry(v).or_insert(next))
                })
            })
            .collect();
        Some(Clause { literals, origin })
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.literals.iter().map(Literal::weight).sum()
    }

    pub fn max_var(&self) -> Option<u32> {
        self.literals.iter().filter_map(Literal::max_var).max()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.literals.is_empty() {
            return f.write_str("$false");
        }
        for (i, l) in self.literals.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("clause explosion: formula expands to more than {limit} clauses")]
    ClauseExplosion { limit: usize },
}

/// Negation normal form: implications and biconditionals eliminated,
/// negations pushed onto atoms, double negations removed.
pub fn to_nnf(f: &Formula) -> Formula {
    nnf(f, true)
}

fn nnf(f: &Formula, positive: bool) -> Formula {
    match (f, positive) {
        (Formula::Atom(..), true) => f.clone(),
        (Formula::Atom(..), false) => Formula::not(f.clone()),
        (Formula::Not(g), _) => nnf(g, !positive),
        (Formula::And(a, b), true) => Formula::and(nnf(a, true), nnf(b, true)),
        (Formula::And(a, b), false) => Formula::or(nnf(a, false), nnf(b, false)),
        (Formula::Or(a, b), true) => Formula::or(nnf(a, true), nnf(b, true)),
        (Formula::Or(a, b), false) => Formula::and(nnf(a, false), nnf(b, false)),
        (Formula::Implies(a, b), true) => Formula::or(nnf(a, false), nnf(b, true)),
        (Formula::Implies(a, b), false) => Formula::and(nnf(a, true), nnf(b, false)),
        (Formula::Iff(a, b), true) => Formula::and(
            Formula::or(nnf(a, false), nnf(b, true)),
            Formula::or(nnf(a, true), nnf(b, false)),
        ),
        (Formula::Iff(a, b), false) => Formula::and(
            Formula::or(nnf(a, true), nnf(b, true)),
            Formula::or(nnf(a, false), nnf(b, false)),
        ),
        (Formula::ForAll(v, body), true) => Formula::forall(v.clone(), nnf(body, true)),
        (Formula::ForAll(v, body), false) => Formula::exists(v.clone(), nnf(body, false)),
        (Formula::Exists(v, body), true) => Formula::exists(v.clone(), nnf(body, true)),
        (Formula::Exists(v, body), false) => Formula::forall(v.clone(), nnf(body, false)),
    }
}

/// State shared by every formula clausified for one problem: the Skolem
/// counter and the set of names Skolem symbols must avoid.
#[derive(Clone, Debug)]
pub struct ClausifySession {
    next_skolem: usize,
    next_rename: usize,
    reserved: BTreeSet<String>,
    pub max_clauses_per_formula: usize,
}

impl Default for ClausifySession {
    fn default() -> Self {
        ClausifySession::new(std::iter::empty::<String>())
    }
}

impl ClausifySession {
    /// `reserved` lists user symbols; generated Skolem names skip them.
    pub fn new<S: Into<String>>(reserved: impl IntoIterator<Item = S>) -> Self {
        ClausifySession {
            next_skolem: 0,
            next_rename: 0,
            reserved: reserved.into_iter().map(Into::into).collect(),
            max_clauses_per_formula: DEFAULT_MAX_CLAUSES_PER_FORMULA,
        }
    }

    /// Session whose Skolem names avoid every symbol in `formulas`.
    pub fn for_formulas<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> Self {
        let sig = crate::syntax::Signature::from_formulas(formulas);
        let names: Vec<String> = sig.symbols().into_iter().map(str::to_owned).collect();
        ClausifySession::new(names)
    }

    fn fresh_skolem(&mut self) -> String {
        loop {
            let name = format!("sk{}", self.next_skolem);
            self.next_skolem += 1;
            if !self.reserved.contains(&name) {
                self.reserved.insert(name.clone());
                return name;
            }
        }
    }

    fn fresh_variable(&mut self, base: &str, in_use: &[String]) -> String {
        loop {
            let name = format!("{base}_{}", self.next_rename);
            self.next_rename += 1;
            if !in_use.contains(&name) {
                return name;
            }
        }
    }

    /// Replaces each existential by a fresh Skolem function of the
    /// universals enclosing it. `f` must be closed and in NNF.
    pub fn skolemize(&mut self, f: &Formula) -> Formula {
        let mut universals = Vec::new();
        self.skolemize_in(f, &mut universals)
    }

    fn skolemize_in(&mut self, f: &Formula, universals: &mut Vec<String>) -> Formula {
        match f {
            Formula::Atom(..) | Formula::Not(_) => f.clone(),
            Formula::And(a, b) => {
                Formula::and(self.skolemize_in(a, universals), self.skolemize_in(b, universals))
            }
            Formula::Or(a, b) => {
                Formula::or(self.skolemize_in(a, universals), self.skolemize_in(b, universals))
            }
            Formula::ForAll(v, body) => {
                // Rename a shadowing binder so Skolem terms built from the
                // outer variable cannot be captured below.
                let (v, body) = if universals.contains(v) {
                    let fresh = self.fresh_variable(v, universals);
                    let renamed = body.substitute(v, &Term::Variable(fresh.clone()));
                    (fresh, renamed)
                } else {
                    (v.clone(), (**body).clone())
                };
                universals.push(v.clone());
                let inner = self.skolemize_in(&body, universals);
                universals.pop();
                Formula::forall(v, inner)
            }
            Formula::Exists(v, body) => {
                let name = self.fresh_skolem();
                let witness = if universals.is_empty() {
                    Term::Constant(name)
                } else {
                    Term::Application(name, universals.iter().cloned().map(Term::Variable).collect())
                };
                let body = body.substitute(v, &witness);
                self.skolemize_in(&body, universals)
            }
            Formula::Implies(..) | Formula::Iff(..) => {
                let nnf = to_nnf(f);
                self.skolemize_in(&nnf, universals)
            }
        }
    }

    /// Full clausification of one closed formula.
    pub fn clausify(&mut self, f: &Formula, origin: ClauseOrigin) -> Result<Vec<Clause>, NormalizeError> {
        let sk = self.skolemize(&to_nnf(f));
        let mut next_var = 0u32;
        let mut env: Vec<(String, u32)> = Vec::new();
        let matrix = cnf(&sk, &mut env, &mut next_var, self.max_clauses_per_formula)?;
        let mut out: Vec<Clause> = Vec::with_capacity(matrix.len());
        for lits in matrix {
            if let Some(c) = Clause::normalized(lits, origin) {
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
        Ok(out)
    }
}

fn to_clause_term(t: &Term, env: &[(String, u32)]) -> ClauseTerm {
    match t {
        Term::Variable(v) => match env.iter().rev().find(|(n, _)| n == v) {
            Some((_, id)) => ClauseTerm::Var(*id),
            // Unreachable for closed input; keep the name as a constant.
            None => ClauseTerm::constant(v.clone()),
        },
        Term::Constant(c) => ClauseTerm::constant(c.clone()),
        Term::Application(fname, args) => {
            ClauseTerm::Fn(fname.clone(), args.iter().map(|a| to_clause_term(a, env)).collect())
        }
    }
}

fn cnf(
    f: &Formula,
    env: &mut Vec<(String, u32)>,
    next_var: &mut u32,
    limit: usize,
) -> Result<Vec<Vec<Literal>>, NormalizeError> {
    let lit = |positive: bool, p: &str, args: &[Term], env: &[(String, u32)]| {
        Literal::new(positive, p, args.iter().map(|a| to_clause_term(a, env)).collect())
    };
    Ok(match f {
        Formula::Atom(p, args) => vec![vec![lit(true, p, args, env)]],
        Formula::Not(inner) => match &**inner {
            Formula::Atom(p, args) => vec![vec![lit(false, p, args, env)]],
            other => return cnf(&to_nnf(&Formula::not(other.clone())), env, next_var, limit),
        },
        Formula::And(a, b) => {
            let mut left = cnf(a, env, next_var, limit)?;
            let right = cnf(b, env, next_var, limit)?;
            left.extend(right);
            if left.len() > limit {
                return Err(NormalizeError::ClauseExplosion { limit });
            }
            left
        }
        Formula::Or(a, b) => {
            let left = cnf(a, env, next_var, limit)?;
            let right = cnf(b, env, next_var, limit)?;
            if left.len().saturating_mul(right.len()) > limit {
                return Err(NormalizeError::ClauseExplosion { limit });
            }
            let mut out = Vec::with_capacity(left.len() * right.len());
            for l in &left {
                for r in &right {
                    let mut c = l.clone();
                    c.extend(r.iter().cloned());
                    out.push(c);
                }
            }
            out
        }
        Formula::ForAll(v, body) => {
            env.push((v.clone(), *next_var));
            *next_var += 1;
            let out = cnf(body, env, next_var, limit);
            env.pop();
            out?
        }
        Formula::Exists(..) | Formula::Implies(..) | Formula::Iff(..) => {
            unreachable!("cnf input is skolemized NNF")
        }
    })
}

/// Clausifies `f` in a fresh session whose Skolem names avoid the symbols
/// of `f`.
pub fn clausify(f: &Formula) -> Result<Vec<Clause>, NormalizeError> {
    ClausifySession::for_formulas([f]).clausify(f, ClauseOrigin::Premise(0))
}

/// Skolemizes `f` (closed, NNF) in a fresh session.
pub fn skolemize(f: &Formula) -> Formula {
    ClausifySession::for_formulas([f]).skolemize(f)
}
