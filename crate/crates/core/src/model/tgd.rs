use std::collections::BTreeSet;
use std::fmt;

use super::{Atom, Symbol, Term};

/// A tuple-generating dependency `body -> head`.
///
/// Head variables that do not occur in the body are existentially
/// quantified. The body is kept as a list so that non-LAV input can be
/// represented and reported; every operation past validation requires
/// exactly one body atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tgd {
    pub body: Vec<Atom>,
    pub head: Vec<Atom>,
}

impl Tgd {
    pub fn new(body: Vec<Atom>, head: Vec<Atom>) -> Self {
        Tgd { body, head }
    }

    /// A LAV dependency with a single body atom.
    pub fn lav(body: Atom, head: Vec<Atom>) -> Self {
        Tgd { body: vec![body], head }
    }

    pub fn is_lav(&self) -> bool {
        self.body.len() == 1
    }

    pub fn body_atom(&self) -> Option<&Atom> {
        match self.body.as_slice() {
            [a] => Some(a),
            _ => None,
        }
    }

    /// Universally quantified variables (those of the body).
    pub fn frontier(&self) -> BTreeSet<Symbol> {
        self.body.iter().flat_map(|a| a.variables()).cloned().collect()
    }

    /// Head variables absent from the body, in order of first occurrence.
    pub fn existentials(&self) -> Vec<Symbol> {
        let frontier = self.frontier();
        let mut out: Vec<Symbol> = Vec::new();
        for v in self.head.iter().flat_map(|a| a.variables()) {
            if !frontier.contains(v) && !out.contains(v) {
                out.push(v.clone());
            }
        }
        out
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.body.iter().chain(self.head.iter())
    }

    pub fn mentions_constants(&self) -> bool {
        self.atoms()
            .flat_map(|a| a.args.iter())
            .any(|t| matches!(t, Term::Const(_)))
    }

    pub fn max_arity(&self) -> usize {
        self.atoms().map(Atom::arity).max().unwrap_or(0)
    }
}

impl fmt::Display for Tgd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(" -> ")?;
        for (i, a) in self.head.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn existentials_are_head_only_variables() {
        let tgd = Tgd::lav(
            Atom::new("r1", vec![Term::var("X"), Term::var("Y")]),
            vec![
                Atom::new("r2", vec![Term::var("W"), Term::var("Z")]),
                Atom::new("r3", vec![Term::var("Y"), Term::var("W")]),
            ],
        );
        let ex: Vec<_> = tgd.existentials().iter().map(|s| s.to_string()).collect();
        assert_eq!(ex, ["W", "Z"]);
        assert_eq!(tgd.frontier().len(), 2);
    }
}
