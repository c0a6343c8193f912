use super::Formula;

/// Boolean constant folding, applied bottom-up.
///
/// Each local rule returns either a constant or an already simplified child,
/// so one bottom-up pass reaches the fixpoint. Conjunct order is untouched.
pub fn simplify(phi: &Formula) -> Formula {
    match phi {
        Formula::True | Formula::False | Formula::Atom(_) => phi.clone(),
        Formula::Not(f) => mk_not(simplify(f)),
        Formula::And(l, r) => mk_and(simplify(l), simplify(r)),
        Formula::Or(l, r) => mk_or(simplify(l), simplify(r)),
        Formula::Next(f) => Formula::next(simplify(f)),
        Formula::Until(l, r) => Formula::until(simplify(l), simplify(r)),
        Formula::Eventually(f) => Formula::eventually(simplify(f)),
        Formula::Always(f) => Formula::always(simplify(f)),
    }
}

pub(super) fn mk_not(f: Formula) -> Formula {
    match f {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        Formula::Not(inner) => *inner,
        other => Formula::not(other),
    }
}

pub(super) fn mk_and(l: Formula, r: Formula) -> Formula {
    match (l, r) {
        (Formula::False, _) | (_, Formula::False) => Formula::False,
        (Formula::True, f) | (f, Formula::True) => f,
        (l, r) => Formula::and(l, r),
    }
}

pub(super) fn mk_or(l: Formula, r: Formula) -> Formula {
    match (l, r) {
        (Formula::True, _) | (_, Formula::True) => Formula::True,
        (Formula::False, f) | (f, Formula::False) => f,
        (l, r) => Formula::or(l, r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        Formula::atom(s)
    }

    #[test]
    fn identity_and_double_negation() {
        let f = Formula::and(Formula::True, Formula::eventually(p("p")));
        assert_eq!(simplify(&f), Formula::eventually(p("p")));
        assert_eq!(simplify(&Formula::not(Formula::not(p("p")))), p("p"));
        let g = Formula::or(Formula::False, Formula::and(Formula::True, p("q")));
        assert_eq!(simplify(&g), p("q"));
    }

    #[test]
    fn absorbing_constants() {
        assert_eq!(simplify(&Formula::and(p("a"), Formula::False)), Formula::False);
        assert_eq!(simplify(&Formula::or(p("a"), Formula::True)), Formula::True);
        assert_eq!(simplify(&Formula::not(Formula::True)), Formula::False);
        assert_eq!(simplify(&Formula::not(Formula::False)), Formula::True);
    }

    #[test]
    fn folds_under_temporal_operators() {
        let f = Formula::next(Formula::and(Formula::True, p("a")));
        assert_eq!(simplify(&f), Formula::next(p("a")));
    }

    #[test]
    fn keeps_conjunct_order() {
        let f = Formula::and(p("b"), Formula::and(Formula::True, p("a")));
        assert_eq!(simplify(&f), Formula::and(p("b"), p("a")));
    }

    #[test]
    fn idempotent() {
        let f = Formula::not(Formula::not(Formula::or(
            Formula::not(Formula::not(Formula::False)),
            Formula::and(p("x"), Formula::not(Formula::False)),
        )));
        let once = simplify(&f);
        assert_eq!(simplify(&once), once);
        assert_eq!(once, p("x"));
    }
}
