use super::{Formula, Trace};

/// Finite-trace satisfaction at position 0.
///
/// Positions run over `0..=len`; position `len` is the empty suffix, where
/// formulas are judged by [`end_eval`]. `next f` at position `i < len`
/// looks at `i + 1`, and until/eventually need a witness strictly inside the
/// trace.
pub fn eval_finite(trace: &Trace, phi: &Formula) -> bool {
    holds(trace, 0, phi)
}

/// Truth of `phi` on the empty suffix: every pending obligation fails.
pub fn end_eval(phi: &Formula) -> bool {
    match phi {
        Formula::True => true,
        Formula::False | Formula::Atom(_) | Formula::Next(_) | Formula::Until(..) => false,
        Formula::Not(f) => !end_eval(f),
        Formula::And(l, r) => end_eval(l) && end_eval(r),
        Formula::Or(l, r) => end_eval(l) || end_eval(r),
        // true until f
        Formula::Eventually(_) => false,
        // not eventually not f
        Formula::Always(_) => true,
    }
}

fn holds(trace: &Trace, i: usize, phi: &Formula) -> bool {
    let steps = trace.steps();
    let n = steps.len();
    if i >= n {
        return end_eval(phi);
    }
    match phi {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(p) => steps[i].contains(p),
        Formula::Not(f) => !holds(trace, i, f),
        Formula::And(l, r) => holds(trace, i, l) && holds(trace, i, r),
        Formula::Or(l, r) => holds(trace, i, l) || holds(trace, i, r),
        Formula::Next(f) => holds(trace, i + 1, f),
        Formula::Until(l, r) => {
            for j in i..n {
                if holds(trace, j, r) {
                    return true;
                }
                if !holds(trace, j, l) {
                    return false;
                }
            }
            false
        }
        Formula::Eventually(f) => (i..n).any(|j| holds(trace, j, f)),
        Formula::Always(f) => (i..n).all(|j| holds(trace, j, f)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::TruthAssignment;

    fn p(s: &str) -> Formula {
        Formula::atom(s)
    }

    fn trace(steps: &[&[&str]]) -> Trace {
        steps
            .iter()
            .map(|s| s.iter().copied().collect::<TruthAssignment>())
            .collect()
    }

    #[test]
    fn eventually_with_witness() {
        assert!(eval_finite(&trace(&[&["p"]]), &Formula::eventually(p("p"))));
    }

    #[test]
    fn strong_next_needs_a_following_step() {
        assert!(!eval_finite(&trace(&[&[]]), &Formula::next(p("p"))));
        assert!(eval_finite(&trace(&[&[], &["p"]]), &Formula::next(p("p"))));
    }

    #[test]
    fn until_brute_force_two_steps() {
        let phi = Formula::until(p("p"), p("q"));
        assert!(eval_finite(&trace(&[&["p"], &["q"]]), &phi));
        let all: [&[&str]; 4] = [&[], &["p"], &["q"], &["p", "q"]];
        for a in all {
            for b in all {
                let t = trace(&[a, b]);
                let expect = a.contains(&"q") || (a.contains(&"p") && b.contains(&"q"));
                assert_eq!(eval_finite(&t, &phi), expect, "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn end_values() {
        assert!(end_eval(&Formula::True));
        assert!(!end_eval(&Formula::eventually(p("p"))));
        assert!(end_eval(&Formula::not(Formula::next(p("p")))));
        assert!(end_eval(&Formula::always(p("p"))));
        assert!(!end_eval(&p("p")));
    }

    #[test]
    fn empty_trace_uses_end_values() {
        let t = Trace::default();
        assert!(eval_finite(&t, &Formula::True));
        assert!(!eval_finite(&t, &Formula::eventually(p("p"))));
        assert!(eval_finite(&t, &Formula::not(p("p"))));
    }
}
