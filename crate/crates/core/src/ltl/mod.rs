//! Linear temporal logic over finite traces.
//!
//! Formulas are immutable trees. The module offers progression (rewriting a
//! formula against one truth assignment), a direct finite-trace evaluator,
//! boolean simplification, and a text grammar for rendering and parsing.

mod eval;
mod progress;
mod simplify;
mod text;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

pub use eval::{end_eval, eval_finite};
pub use progress::{progress, progress_trace};
pub use simplify::simplify;
pub use text::{parse, render, RenderMode};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LtlError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("cannot render a formula containing a true/false constant")]
    ConstantLeaf,
}

/// An LTL formula. `Eventually`, `Always` and `Or` are kept as first-class
/// constructors so that rendering reproduces them verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(Arc<str>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Eventually(Box<Formula>),
    Always(Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl AsRef<str>) -> Self {
        Formula::Atom(Arc::from(name.as_ref()))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    pub fn until(l: Formula, r: Formula) -> Self {
        Formula::Until(Box::new(l), Box::new(r))
    }

    pub fn eventually(f: Formula) -> Self {
        Formula::Eventually(Box::new(f))
    }

    pub fn always(f: Formula) -> Self {
        Formula::Always(Box::new(f))
    }

    /// Right-nested conjunction `f1 and (f2 and (... fn))`, preserving order.
    /// Returns `None` for an empty input.
    pub fn conjunction<I>(parts: I) -> Option<Formula>
    where
        I: IntoIterator<Item = Formula>,
        I::IntoIter: DoubleEndedIterator,
    {
        parts
            .into_iter()
            .rev()
            .reduce(|acc, f| Formula::and(f, acc))
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Formula::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Formula::False)
    }

    /// Number of node levels in the tree; a single leaf has depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::Not(f) | Formula::Next(f) | Formula::Eventually(f) | Formula::Always(f) => {
                1 + f.depth()
            }
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Until(l, r) => {
                1 + l.depth().max(r.depth())
            }
        }
    }

    /// All atom names occurring in the formula, sorted.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                out.insert(a.to_string());
            }
            Formula::Not(f) | Formula::Next(f) | Formula::Eventually(f) | Formula::Always(f) => {
                f.collect_atoms(out)
            }
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Until(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    pub fn has_constant(&self) -> bool {
        match self {
            Formula::True | Formula::False => true,
            Formula::Atom(_) => false,
            Formula::Not(f) | Formula::Next(f) | Formula::Eventually(f) | Formula::Always(f) => {
                f.has_constant()
            }
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Until(l, r) => {
                l.has_constant() || r.has_constant()
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            _ => match render(self, RenderMode::SingleToken) {
                Ok(s) => f.write_str(&s),
                Err(_) => write!(f, "{:?}", self),
            },
        }
    }
}

/// The set of propositions true at one step.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthAssignment(BTreeSet<String>);

impl TruthAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, prop: &str) -> bool {
        self.0.contains(prop)
    }

    pub fn insert(&mut self, prop: impl Into<String>) -> bool {
        self.0.insert(prop.into())
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_subset(&self, other: &TruthAssignment) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl<S: Into<String>> FromIterator<S> for TruthAssignment {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        TruthAssignment(iter.into_iter().map(Into::into).collect())
    }
}

/// A finite sequence of truth assignments.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace(pub Vec<TruthAssignment>);

impl Trace {
    pub fn new(steps: Vec<TruthAssignment>) -> Self {
        Trace(steps)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn steps(&self) -> &[TruthAssignment] {
        &self.0
    }
}

impl FromIterator<TruthAssignment> for Trace {
    fn from_iter<I: IntoIterator<Item = TruthAssignment>>(iter: I) -> Self {
        Trace(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjunction_is_right_nested() {
        let f = Formula::conjunction(["a", "b", "c"].map(Formula::atom)).unwrap();
        assert_eq!(
            f,
            Formula::and(
                Formula::atom("a"),
                Formula::and(Formula::atom("b"), Formula::atom("c"))
            )
        );
        assert!(Formula::conjunction(Vec::<Formula>::new()).is_none());
    }

    #[test]
    fn depth_counts_levels() {
        assert_eq!(Formula::atom("p").depth(), 1);
        assert_eq!(Formula::eventually(Formula::atom("p")).depth(), 2);
        let f = Formula::until(Formula::atom("p"), Formula::next(Formula::atom("q")));
        assert_eq!(f.depth(), 3);
    }
}
