//! Pretending functions of octal games and misère periodicity.

use serde::{Deserialize, Serialize};

use super::compute::{extend_quotient, search, search_with_cover, QuotientCaps};
use super::context::{ClosedContext, Sparse};
use super::oracle::{Cover, OutcomeOracle};
use super::QuotientError;
use crate::monoid::{make_tn, BipartiteMonoid};
use crate::octal::{grundy_sequence, OctalCode};

/// Seed tests carried from one partial quotient to the next.
const SEED_LIMIT: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PretendingEntry {
    pub heap: usize,
    /// Index of the partial quotient this value lives in.
    pub snapshot: usize,
    pub phi: usize,
    pub label: String,
    pub grundy: u32,
    /// Earlier heap whose value was reused because the option images agree.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reused_from: Option<usize>,
}

/// A partial quotient `Q_n` computed at heap `heap` and valid until the
/// next snapshot; `phi[m]` is its value on `H_m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientSnapshot {
    pub heap: usize,
    pub monoid: BipartiteMonoid,
    pub phi: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub heap: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Pretending {
    pub code: OctalCode,
    pub entries: Vec<PretendingEntry>,
    pub snapshots: Vec<QuotientSnapshot>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncated: Option<Truncation>,
}

impl Pretending {
    /// Largest heap with a computed value.
    pub fn max_heap(&self) -> usize {
        self.entries.len() - 1
    }

    /// The partial quotient in force at heap `m`.
    pub fn snapshot_at(&self, m: usize) -> Option<&QuotientSnapshot> {
        self.entries.get(m).map(|e| &self.snapshots[e.snapshot])
    }

    /// `Phi_m(H_n)` for `n <= m`.
    pub fn phi_at(&self, m: usize, n: usize) -> Option<usize> {
        if n > m {
            return None;
        }
        self.snapshot_at(m)?.phi.get(n).copied()
    }

    /// Heaps at which the partial quotient was recomputed.
    pub fn growth_points(&self) -> Vec<usize> {
        self.snapshots.iter().map(|s| s.heap).collect()
    }
}

fn image(m: &BipartiteMonoid, phi: &[usize], s: &Sparse) -> usize {
    s.iter()
        .fold(m.identity(), |acc, &(c, e)| m.mul(acc, m.pow(phi[c as usize], e as u64)))
}

fn option_images(ctx: &ClosedContext, m: &BipartiteMonoid, phi: &[usize], c: usize) -> Vec<usize> {
    let mut v: Vec<usize> = ctx.sparse_options(c).iter().map(|o| image(m, phi, o)).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Per element, a position of least total heap size mapping to it. Moves
/// lower the total size, so replacing a part by its lightest representative
/// keeps outcome search well founded.
fn lightest_reps(m: &BipartiteMonoid, phi: &[usize], weight: &[usize]) -> Vec<Sparse> {
    let q = m.size();
    let mut best: Vec<Option<(usize, Sparse)>> = vec![None; q];
    best[m.identity()] = Some((0, Sparse::new()));
    let mut done = vec![false; q];
    // Dijkstra over the Cayley graph of the component images.
    while let Some(x) = (0..q)
        .filter(|&x| !done[x] && best[x].is_some())
        .min_by_key(|&x| best[x].as_ref().map(|b| b.0))
    {
        done[x] = true;
        let (w, s) = best[x].clone().expect("reached");
        for c in 1..phi.len() {
            let y = m.mul(x, phi[c]);
            let wy = w + weight[c];
            if best[y].as_ref().is_none_or(|b| wy < b.0) {
                let mut t = s.clone();
                match t.iter_mut().find(|(d, _)| *d as usize == c) {
                    Some(entry) => entry.1 += 1,
                    None => {
                        t.push((c as u16, 1));
                        t.sort_unstable();
                    }
                }
                best[y] = Some((wy, t));
            }
        }
    }
    best.into_iter().map(|b| b.map(|b| b.1).unwrap_or_default()).collect()
}

/// Computes `Phi(H_n)` for `n = 0..=n_max` heap by heap. A new heap whose
/// option images match those of an earlier heap reuses that heap's value
/// and leaves the quotient unchanged; otherwise the partial quotient is
/// recomputed with the earlier one answering positions of smaller heaps.
pub fn pretending_function(code: &OctalCode, n_max: usize, caps: QuotientCaps) -> Result<Pretending, QuotientError> {
    let grundy = grundy_sequence(code, n_max);
    let mut ctx = ClosedContext::octal(code);
    let mut oracle = OutcomeOracle::new(caps.memo_max);
    let mut comp_phi = vec![0usize];
    let mut first_heap = vec![0usize];
    let mut seed: Vec<Sparse> = Vec::new();
    let mut reps: Vec<Sparse> = vec![Sparse::new()];
    let trivial = make_tn(0).expect("T0");
    let mut snapshots = vec![QuotientSnapshot {
        heap: 0,
        monoid: trivial,
        phi: vec![0],
    }];
    let mut entries = vec![PretendingEntry {
        heap: 0,
        snapshot: 0,
        phi: 0,
        label: "1".into(),
        grundy: 0,
        reused_from: None,
    }];
    let mut truncated = None;
    for n in 1..=n_max {
        let (_, c, is_new) = ctx.push_heap()?;
        let reused_from;
        if !is_new {
            reused_from = Some(first_heap[c]);
        } else {
            first_heap.push(n);
            let current = &snapshots.last().expect("snapshot").monoid;
            let target = option_images(&ctx, current, &comp_phi, c);
            let cover = Cover::new(current.clone(), comp_phi.clone());
            if let Some(d) = (1..c).find(|&d| option_images(&ctx, current, &comp_phi, d) == target) {
                comp_phi.push(comp_phi[d]);
                reused_from = Some(first_heap[d]);
            } else if let Some(x) = {
                oracle.set_cover(Some(cover.clone()));
                let found = extend_quotient(&ctx, &mut oracle, current, &comp_phi, &reps, caps.max_states);
                oracle.set_cover(None);
                found?
            } {
                comp_phi.push(x);
                reused_from = None;
            } else {
                // First guess with smaller heaps collapsed to class
                // representatives; only a certified guess is kept.
                let mut guess_oracle = OutcomeOracle::new(caps.memo_max);
                guess_oracle.set_cover(Some(Cover {
                    canonical: Some(lightest_reps(current, &comp_phi, &first_heap)),
                    ..cover.clone()
                }));
                let guess = match search(&ctx, &mut guess_oracle, caps, seed.clone()) {
                    Ok((r, t)) if r.is_verified() => Some((r, t)),
                    _ => None,
                };
                let (result, tests) = match guess {
                    Some(found) => found,
                    None => search_with_cover(&ctx, &mut oracle, caps, std::mem::take(&mut seed), Some(cover))?,
                };
                seed = tests.into_iter().take(SEED_LIMIT).collect();
                if !result.is_verified() {
                    let reason = result
                        .evidence
                        .reason
                        .map_or_else(|| "undetermined".to_string(), |r| format!("{r:?}"));
                    truncated = Some(Truncation { heap: n, reason });
                    break;
                }
                comp_phi = result.phi.clone();
                reps = result.reps.clone();
                let monoid = result.monoid.expect("verified result has a monoid");
                let phi = (0..=n)
                    .map(|h| comp_phi[ctx.heap_component(h).expect("heap pushed")])
                    .collect();
                snapshots.push(QuotientSnapshot { heap: n, monoid, phi });
                let s = snapshots.len() - 1;
                let value = snapshots[s].phi[n];
                entries.push(PretendingEntry {
                    heap: n,
                    snapshot: s,
                    phi: value,
                    label: snapshots[s].monoid.label(value),
                    grundy: grundy[n],
                    reused_from: None,
                });
                continue;
            }
        }
        let s = snapshots.len() - 1;
        let value = comp_phi[c];
        snapshots[s].phi.push(value);
        entries.push(PretendingEntry {
            heap: n,
            snapshot: s,
            phi: value,
            label: snapshots[s].monoid.label(value),
            grundy: grundy[n],
            reused_from,
        });
    }
    Ok(Pretending {
        code: code.clone(),
        entries,
        snapshots,
        truncated,
    })
}

/// A certified misère period: `Phi_M(H_{n+p}) = Phi_M(H_n)` for every
/// `n0 <= n < 2 n0 + p + k` inside the single partial quotient `Q_M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MisereCertificate {
    pub code: OctalCode,
    pub n0: usize,
    pub p: usize,
    pub k: usize,
    #[serde(rename = "M")]
    pub m: usize,
    /// Half-open range of checked `n`.
    pub window: (usize, usize),
    pub quotient_order: usize,
    /// `Phi_M(H_n)` for `n = 0..=M`, as element labels.
    pub values: Vec<String>,
}

/// Smallest `p`, then smallest `n0`, whose window fits in the data.
pub fn detect_misere_period(data: &Pretending) -> Option<MisereCertificate> {
    let k = data.code.k();
    let n_max = data.max_heap();
    for p in 1..=n_max {
        for n0 in 0.. {
            let m = 2 * n0 + 2 * p + k;
            if m > n_max {
                break;
            }
            let hi = 2 * n0 + p + k;
            if (n0..hi).all(|n| data.phi_at(m, n + p) == data.phi_at(m, n)) {
                let snap = data.snapshot_at(m)?;
                return Some(MisereCertificate {
                    code: data.code.clone(),
                    n0,
                    p,
                    k,
                    m,
                    window: (n0, hi),
                    quotient_order: snap.monoid.size(),
                    values: (0..=m).map(|n| snap.monoid.label(snap.phi[n])).collect(),
                });
            }
        }
    }
    None
}

/// An uncertified period seen in the final partial quotient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservedPeriod {
    pub p: usize,
    pub n0: usize,
    pub n_max: usize,
}

/// Smallest `p` (then `n0`) with `Phi_N(H_{n+p}) = Phi_N(H_n)` for all
/// `n0 <= n <= N - p`, where the matching stretch spans at least
/// `min_periods` full periods.
pub fn observe_misere_period(data: &Pretending, min_periods: usize) -> Option<ObservedPeriod> {
    let n_max = data.max_heap();
    let phi = |n| data.phi_at(n_max, n);
    for p in 1..=n_max {
        let n0 = (0..=n_max - p)
            .rev()
            .find(|&n| phi(n + p) != phi(n))
            .map_or(0, |n| n + 1);
        if n_max + 1 - n0 >= min_periods * p {
            return Some(ObservedPeriod { p, n0, n_max });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::classify_tame;

    fn code(s: &str) -> OctalCode {
        s.parse().unwrap()
    }

    #[test]
    fn kayles_first_heaps() {
        let p = pretending_function(&code("0.77"), 6, QuotientCaps::default()).unwrap();
        let labels: Vec<&str> = p.entries.iter().map(|e| e.label.as_str()).collect();
        assert_eq!(&labels[..3], ["1", "a", "b"]);
        assert!(p.truncated.is_none());
    }

    #[test]
    fn dawson_first_heaps() {
        let p = pretending_function(&code("0.07"), 3, QuotientCaps::default()).unwrap();
        assert_eq!(p.phi_at(3, 0), p.phi_at(3, 1));
        assert_eq!(p.phi_at(3, 2), p.phi_at(3, 3));
        let m = &p.snapshot_at(3).unwrap().monoid;
        assert_eq!(p.phi_at(3, 0), Some(m.identity()));
    }

    #[test]
    fn nim_like_codes_stay_tame() {
        let p = pretending_function(&code("0.07"), 8, QuotientCaps::default()).unwrap();
        for s in &p.snapshots[..2] {
            assert!(classify_tame(&s.monoid).is_some());
        }
    }

    #[test]
    fn constant_sequence_has_period_one() {
        // 0.1: only a single box can be removed, and only as a whole strip.
        let p = pretending_function(&code("0.1"), 12, QuotientCaps::default()).unwrap();
        let cert = detect_misere_period(&p).unwrap();
        assert_eq!(cert.p, 1);
        assert!(cert.m <= 12);
        assert!(detect_misere_period(&pretending_function(&code("0.07"), 4, QuotientCaps::default()).unwrap()).is_none());
    }
}
