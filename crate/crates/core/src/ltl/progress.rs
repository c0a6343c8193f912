use super::simplify::simplify;
use super::{Formula, Trace, TruthAssignment};

/// Progress `phi` through one truth assignment and simplify the result.
///
/// The residual holds on a suffix exactly when `phi` holds on the suffix
/// prefixed by `sigma`.
pub fn progress(sigma: &TruthAssignment, phi: &Formula) -> Formula {
    simplify(&expand(sigma, phi))
}

/// Left fold of [`progress`] over the trace. An empty trace returns `phi`.
pub fn progress_trace(trace: &Trace, phi: &Formula) -> Formula {
    trace
        .steps()
        .iter()
        .fold(phi.clone(), |acc, sigma| progress(sigma, &acc))
}

fn expand(sigma: &TruthAssignment, phi: &Formula) -> Formula {
    match phi {
        Formula::True => Formula::True,
        Formula::False => Formula::False,
        Formula::Atom(p) => {
            if sigma.contains(p) {
                Formula::True
            } else {
                Formula::False
            }
        }
        Formula::Not(f) => Formula::not(expand(sigma, f)),
        Formula::And(l, r) => Formula::and(expand(sigma, l), expand(sigma, r)),
        Formula::Or(l, r) => Formula::or(expand(sigma, l), expand(sigma, r)),
        Formula::Next(f) => (**f).clone(),
        Formula::Until(l, r) => Formula::or(
            expand(sigma, r),
            Formula::and(expand(sigma, l), phi.clone()),
        ),
        // eventually f = true until f
        Formula::Eventually(f) => Formula::or(expand(sigma, f), phi.clone()),
        // always f = not eventually not f, with the negations pushed through
        Formula::Always(f) => Formula::and(expand(sigma, f), phi.clone()),
    }
}
