//! Structural facts every misère quotient satisfies.

use super::context::ClosedContext;
use crate::monoid::{iso, structure_report, BipartiteMonoid};

/// Checks a quotient `m` with map `phi` on the components of `ctx` and
/// returns a description of every violated property.
pub fn quotient_invariant_violations(ctx: &ClosedContext, m: &BipartiteMonoid, phi: &[usize]) -> Vec<String> {
    let mut out = Vec::new();
    let n = m.size();
    let image = |c: usize| -> Vec<usize> {
        ctx.sparse_options(c)
            .iter()
            .map(|o| {
                o.iter()
                    .fold(m.identity(), |acc, &(d, e)| m.mul(acc, m.pow(phi[d as usize], e as u64)))
            })
            .collect()
    };
    if n > 1 {
        if !n.is_multiple_of(2) {
            out.push(format!("odd order {n}"));
        }
        for x in 0..n {
            if !(0..n).any(|y| m.is_p(m.mul(x, y))) {
                out.push(format!("no y with {}y in P", m.label(x)));
            }
        }
        let report = structure_report(m);
        if !report.kernel_is_group {
            out.push("kernel is not a group".into());
        }
        if !report.kernel_meets_p {
            out.push("kernel does not meet P".into());
        }
    }
    for c in 1..ctx.len() {
        for o in image(c) {
            if o == phi[c] {
                out.push(format!("Phi({}) equals the image of one of its options", ctx.components()[c].name));
            }
        }
    }
    if let Some(star) = ctx.star() {
        let a = phi[star];
        if m.mul(a, a) != m.identity() {
            out.push("a^2 != 1".into());
        }
        if !m.is_p(a) {
            out.push("a = Phi(*) is not in P".into());
        }
        for c in 0..ctx.len() {
            if m.mul(phi[c], a) == phi[c] {
                out.push(format!("Phi({0}) = Phi({0} + *)", ctx.components()[c].name));
            }
        }
    }
    let (r1, _) = m.reduce();
    let (r2, _) = r1.reduce();
    if r1.size() != n || !matches!(iso(&r1, &r2), Ok(Some(_))) {
        out.push("reduce is not idempotent on the quotient".into());
    }
    out
}
