use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::normalize::{ClauseTerm, Literal};

/// Variable bindings. Kept idempotent: no bound variable occurs in any
/// binding's right-hand side.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Substitution {
    bindings: BTreeMap<u32, ClauseTerm>,
}

impl Substitution {
    pub fn new() -> Self {
        Substitution::default()
    }

    pub fn get(&self, v: u32) -> Option<&ClauseTerm> {
        self.bindings.get(&v)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &ClauseTerm)> {
        self.bindings.iter().map(|(v, t)| (*v, t))
    }

    pub fn apply(&self, t: &ClauseTerm) -> ClauseTerm {
        t.map_vars(&mut |v| match self.bindings.get(&v) {
            Some(bound) => bound.clone(),
            None => ClauseTerm::Var(v),
        })
    }

    pub fn apply_literal(&self, l: &Literal) -> Literal {
        Literal {
            positive: l.positive,
            predicate: l.predicate.clone(),
            args: l.args.iter().map(|a| self.apply(a)).collect(),
        }
    }

    pub fn is_idempotent(&self) -> bool {
        self.bindings
            .values()
            .all(|t| self.bindings.keys().all(|v| !t.contains_var(*v)))
    }

    // Follows variable chains of a triangular substitution.
    fn walk<'a>(&'a self, mut t: &'a ClauseTerm) -> &'a ClauseTerm {
        while let ClauseTerm::Var(v) = t {
            match self.bindings.get(v) {
                Some(next) => t = next,
                None => break,
            }
        }
        t
    }

    fn occurs(&self, v: u32, t: &ClauseTerm) -> bool {
        match self.walk(t) {
            ClauseTerm::Var(w) => *w == v,
            ClauseTerm::Fn(_, args) => args.iter().any(|a| self.occurs(v, a)),
        }
    }

    fn unify_into(&mut self, a: &ClauseTerm, b: &ClauseTerm) -> bool {
        let a = self.walk(a).clone();
        let b = self.walk(b).clone();
        match (&a, &b) {
            (ClauseTerm::Var(x), ClauseTerm::Var(y)) if x == y => true,
            (ClauseTerm::Var(x), t) | (t, ClauseTerm::Var(x)) => {
                if self.occurs(*x, t) {
                    return false;
                }
                self.bindings.insert(*x, t.clone());
                true
            }
            (ClauseTerm::Fn(f, fa), ClauseTerm::Fn(g, ga)) => {
                f == g && fa.len() == ga.len() && fa.iter().zip(ga).all(|(x, y)| self.unify_into(x, y))
            }
        }
    }

    // Turns the triangular form built during unification into an
    // idempotent one.
    fn resolved(self) -> Substitution {
        let bindings = self
            .bindings
            .keys()
            .map(|&v| (v, self.fully_apply(&ClauseTerm::Var(v))))
            .collect();
        Substitution { bindings }
    }

    fn fully_apply(&self, t: &ClauseTerm) -> ClauseTerm {
        match self.walk(t) {
            ClauseTerm::Var(v) => ClauseTerm::Var(*v),
            ClauseTerm::Fn(f, args) => {
                ClauseTerm::Fn(f.clone(), args.iter().map(|a| self.fully_apply(a)).collect())
            }
        }
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "v{v} -> {t}")?;
        }
        f.write_str("}")
    }
}

/// Most general unifier of two terms.
pub fn unify_terms(a: &ClauseTerm, b: &ClauseTerm) -> Option<Substitution> {
    let mut s = Substitution::new();
    s.unify_into(a, b).then(|| s.resolved())
}

/// Most general unifier of two atoms, ignoring polarity. Fails on a
/// predicate or arity clash.
pub fn unify(a: &Literal, b: &Literal) -> Option<Substitution> {
    if a.predicate != b.predicate || a.args.len() != b.args.len() {
        return None;
    }
    let mut s = Substitution::new();
    a.args
        .iter()
        .zip(&b.args)
        .all(|(x, y)| s.unify_into(x, y))
        .then(|| s.resolved())
}

/// One-way matching: finds `θ` binding only variables of `pattern` with
/// `pattern θ == target`. Variables of `target` are treated as constants.
pub(crate) fn match_term(pattern: &ClauseTerm, target: &ClauseTerm, theta: &mut Vec<(u32, ClauseTerm)>) -> bool {
    match pattern {
        ClauseTerm::Var(v) => match theta.iter().find(|(w, _)| w == v) {
            Some((_, bound)) => bound == target,
            None => {
                theta.push((*v, target.clone()));
                true
            }
        },
        ClauseTerm::Fn(f, fa) => match target {
            ClauseTerm::Fn(g, ga) if f == g && fa.len() == ga.len() => {
                fa.iter().zip(ga).all(|(p, t)| match_term(p, t, theta))
            }
            _ => false,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(name: &str) -> ClauseTerm {
        ClauseTerm::constant(name)
    }

    fn v(i: u32) -> ClauseTerm {
        ClauseTerm::Var(i)
    }

    #[test]
    fn disjoint_bindings() {
        let a = Literal::new(true, "P", vec![v(0), c("A")]);
        let b = Literal::new(true, "P", vec![c("B"), v(1)]);
        let s = unify(&a, &b).unwrap();
        assert_eq!(s.get(0), Some(&c("B")));
        assert_eq!(s.get(1), Some(&c("A")));
        assert_eq!(s.apply_literal(&a), s.apply_literal(&b));
    }

    #[test]
    fn occurs_check() {
        let fx = ClauseTerm::Fn("F".into(), vec![v(0)]);
        assert!(unify_terms(&v(0), &fx).is_none());
    }

    #[test]
    fn predicate_clash() {
        let a = Literal::new(true, "P", vec![c("A")]);
        let b = Literal::new(true, "Q", vec![c("A")]);
        assert!(unify(&a, &b).is_none());
    }

    #[test]
    fn chained_bindings_are_resolved() {
        // P(x, y, F(y)) vs P(y, z, x): x=y, y=z, F(y)=x → occurs check fails.
        let a = Literal::new(true, "P", vec![v(0), v(1), ClauseTerm::Fn("F".into(), vec![v(1)])]);
        let b = Literal::new(true, "P", vec![v(1), v(2), v(0)]);
        assert!(unify(&a, &b).is_none());
        // P(x, G(y)) vs P(G(z), x): x=G(z), G(y)=G(z)
        let a = Literal::new(true, "P", vec![v(0), ClauseTerm::Fn("G".into(), vec![v(1)])]);
        let b = Literal::new(true, "P", vec![ClauseTerm::Fn("G".into(), vec![v(2)]), v(0)]);
        let s = unify(&a, &b).unwrap();
        assert!(s.is_idempotent());
        assert_eq!(s.apply_literal(&a), s.apply_literal(&b));
    }

    #[test]
    fn matching_is_one_way() {
        let mut theta = Vec::new();
        assert!(match_term(&v(0), &v(0), &mut theta));
        let mut theta = Vec::new();
        assert!(!match_term(&c("A"), &v(0), &mut theta));
    }
}
