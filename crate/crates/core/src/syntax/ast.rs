use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A first-order term.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Variable(String),
    Constant(String),
    /// A function application. The argument list is never empty; a
    /// zero-argument symbol is a [`Term::Constant`].
    Application(String, Vec<Term>),
}

/// A first-order formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    /// Predicate applied to arguments. An empty argument list is a
    /// propositional constant.
    Atom(String, Vec<Term>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    ForAll(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

/// True when `name` is spelled like a variable (lowercase ASCII initial).
pub fn is_variable_name(name: &str) -> bool {
    name.as_bytes().first().is_some_and(|b| b.is_ascii_lowercase())
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Variable(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Constant(name.into())
    }

    pub fn app(functor: impl Into<String>, args: Vec<Term>) -> Self {
        debug_assert!(!args.is_empty());
        Term::Application(functor.into(), args)
    }

    fn collect_vars<'a>(&'a self, bound: &[&str], seen: &mut Vec<&'a str>) {
        match self {
            Term::Variable(v) => {
                if !bound.contains(&v.as_str()) && !seen.contains(&v.as_str()) {
                    seen.push(v);
                }
            }
            Term::Constant(_) => {}
            Term::Application(_, args) => {
                for a in args {
                    a.collect_vars(bound, seen);
                }
            }
        }
    }

    fn has_var(&self, name: &str) -> bool {
        match self {
            Term::Variable(v) => v == name,
            Term::Constant(_) => false,
            Term::Application(_, args) => args.iter().any(|a| a.has_var(name)),
        }
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Variable(v) => {
                out.insert(v.clone());
            }
            Term::Constant(_) => {}
            Term::Application(_, args) => args.iter().for_each(|a| a.collect_names(out)),
        }
    }

    fn substitute(&self, var: &str, replacement: &Term) -> Term {
        match self {
            Term::Variable(v) if v == var => replacement.clone(),
            Term::Application(f, args) => Term::Application(
                f.clone(),
                args.iter().map(|a| a.substitute(var, replacement)).collect(),
            ),
            other => other.clone(),
        }
    }
}

impl Formula {
    pub fn atom(pred: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Atom(pred.into(), args)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Self {
        Formula::ForAll(var.into(), Box::new(body))
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Self {
        Formula::Exists(var.into(), Box::new(body))
    }

    /// Free variables in order of first occurrence (left to right).
    pub fn free_vars_ordered(&self) -> Vec<String> {
        let mut seen = Vec::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut seen);
        seen.into_iter().map(str::to_owned).collect()
    }

    /// Names occurring free, i.e. outside any quantifier that binds them.
    pub fn free_vars(&self) -> BTreeSet<String> {
        self.free_vars_ordered().into_iter().collect()
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, seen: &mut Vec<&'a str>) {
        match self {
            Formula::Atom(_, args) => {
                for a in args {
                    a.collect_vars(bound, seen);
                }
            }
            Formula::Not(f) => f.collect_free(bound, seen),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, seen);
                b.collect_free(bound, seen);
            }
            Formula::ForAll(v, body) | Formula::Exists(v, body) => {
                bound.push(v);
                body.collect_free(bound, seen);
                bound.pop();
            }
        }
    }

    /// Prefixes one universal quantifier per free variable, outermost first
    /// in order of first occurrence. Closed formulas are returned unchanged.
    pub fn close_universally(&self) -> Formula {
        self.free_vars_ordered()
            .into_iter()
            .rev()
            .fold(self.clone(), |body, v| Formula::forall(v, body))
    }

    /// Substitutes `replacement` for the free occurrences of `var`, renaming
    /// binders that would capture a variable of `replacement`.
    pub fn substitute(&self, var: &str, replacement: &Term) -> Formula {
        match self {
            Formula::Atom(p, args) => Formula::Atom(
                p.clone(),
                args.iter().map(|a| a.substitute(var, replacement)).collect(),
            ),
            Formula::Not(f) => Formula::not(f.substitute(var, replacement)),
            Formula::And(a, b) => {
                Formula::and(a.substitute(var, replacement), b.substitute(var, replacement))
            }
            Formula::Or(a, b) => {
                Formula::or(a.substitute(var, replacement), b.substitute(var, replacement))
            }
            Formula::Implies(a, b) => {
                Formula::implies(a.substitute(var, replacement), b.substitute(var, replacement))
            }
            Formula::Iff(a, b) => {
                Formula::iff(a.substitute(var, replacement), b.substitute(var, replacement))
            }
            Formula::ForAll(v, _) | Formula::Exists(v, _) if v == var => self.clone(),
            Formula::ForAll(v, body) | Formula::Exists(v, body) => {
                let (v, body) = if replacement.has_var(v) && body.free_vars().contains(var) {
                    let mut taken = body.free_vars();
                    replacement.collect_names(&mut taken);
                    let fresh = (0..)
                        .map(|i| format!("{v}_{i}"))
                        .find(|n| !taken.contains(n))
                        .expect("unbounded name supply");
                    (fresh.clone(), body.substitute(v, &Term::Variable(fresh)))
                } else {
                    (v.clone(), (**body).clone())
                };
                let body = body.substitute(var, replacement);
                match self {
                    Formula::ForAll(..) => Formula::forall(v, body),
                    _ => Formula::exists(v, body),
                }
            }
        }
    }

    /// Number of connective and quantifier nodes, used to bound work in
    /// callers that expand formulas.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(..) => 1,
            Formula::Not(f) | Formula::ForAll(_, f) | Formula::Exists(_, f) => 1 + f.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// Whether the printed form of this formula opens a quantifier scope that
    /// would swallow anything written after it.
    fn opens_scope(&self) -> bool {
        match self {
            Formula::ForAll(..) | Formula::Exists(..) => true,
            Formula::Not(f) => f.opens_scope(),
            _ => false,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Variable(n) | Term::Constant(n) => f.write_str(n),
            Term::Application(name, args) => {
                write!(f, "{name}(")?;
                write_args(f, args)?;
                f.write_str(")")
            }
        }
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Term]) -> fmt::Result {
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

fn write_operand(f: &mut fmt::Formatter<'_>, operand: &Formula) -> fmt::Result {
    if operand.opens_scope() {
        write!(f, "({operand})")
    } else {
        write!(f, "{operand}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, op, b) = match self {
            Formula::Atom(p, args) => {
                f.write_str(p)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    write_args(f, args)?;
                    f.write_str(")")?;
                }
                return Ok(());
            }
            Formula::Not(inner) => {
                f.write_str("-")?;
                return write!(f, "{inner}");
            }
            Formula::ForAll(v, body) => return write!(f, "all {v}. {body}"),
            Formula::Exists(v, body) => return write!(f, "exists {v}. {body}"),
            Formula::And(a, b) => (a, "&", b),
            Formula::Or(a, b) => (a, "|", b),
            Formula::Implies(a, b) => (a, "->", b),
            Formula::Iff(a, b) => (a, "<->", b),
        };
        f.write_str("(")?;
        write_operand(f, a)?;
        write!(f, " {op} ")?;
        write_operand(f, b)?;
        f.write_str(")")
    }
}
