use std::collections::HashMap;

use misere_core::games::{builtin, Arena, GameId, Outcome, PlayConvention};
use misere_core::monoid::{classify_tame, iso, make_r8, make_tn, structure_report};
use misere_core::octal::OctalCode;
use misere_core::quotient::{
    compute_quotient, position_outcome_via_quotient, pretending_function, quotient_invariant_violations,
    verify_quotient, ClosedContext, OutcomeOracle, Position, QuotientCaps, QuotientResult,
};
use proptest::prelude::*;
use proptest::sample::Index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Misère outcomes of positions computed with arena sums only.
struct SumOracle<'a> {
    arena: &'a mut Arena,
    games: Vec<GameId>,
    memo: HashMap<Vec<u32>, bool>,
}

impl<'a> SumOracle<'a> {
    fn new(arena: &'a mut Arena, ctx: &ClosedContext) -> Self {
        let games = ctx.components().iter().map(|c| c.game.unwrap()).collect();
        SumOracle {
            arena,
            games,
            memo: HashMap::new(),
        }
    }

    fn is_p(&mut self, v: &[u32]) -> bool {
        if let Some(&p) = self.memo.get(v) {
            return p;
        }
        let mut g = self.arena.zero();
        for (c, &e) in v.iter().enumerate() {
            for _ in 0..e {
                g = self.arena.sum(g, self.games[c]).unwrap();
            }
        }
        let p = self.arena.outcome(g, PlayConvention::Misere).is_p();
        self.memo.insert(v.to_vec(), p);
        p
    }
}

/// Every exponent vector with entries at most `b` (the zero component stays 0).
fn region(len: usize, b: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0u32; len]];
    for c in 1..len {
        let mut next = Vec::new();
        for v in &out {
            for e in 0..=b {
                let mut w = v.clone();
                w[c] = e;
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// Brute-force distinguishability on the box of side `b`: two positions are
/// identified when no position of the box separates them.
fn box_classes(arena: &mut Arena, ctx: &ClosedContext, b: u32) -> (Vec<Vec<u32>>, Vec<Vec<bool>>) {
    let mut o = SumOracle::new(arena, ctx);
    let xs = region(ctx.len(), b);
    let sigs = xs
        .iter()
        .map(|x| {
            xs.iter()
                .map(|z| {
                    let s: Vec<u32> = x.iter().zip(z).map(|(a, b)| a + b).collect();
                    o.is_p(&s)
                })
                .collect()
        })
        .collect();
    (xs, sigs)
}

fn assert_box_agrees(arena: &mut Arena, ctx: &ClosedContext, r: &QuotientResult, b: u32) {
    let (xs, sigs) = box_classes(arena, ctx, b);
    let mut by_sig: HashMap<&Vec<bool>, usize> = HashMap::new();
    let mut by_phi: HashMap<usize, &Vec<bool>> = HashMap::new();
    for (x, sig) in xs.iter().zip(&sigs) {
        let phi = r.phi_of(&Position(x.clone())).unwrap();
        assert_eq!(*by_sig.entry(sig).or_insert(phi), phi, "{x:?}");
        assert_eq!(*by_phi.entry(phi).or_insert(sig), sig, "{x:?}");
        let truth = sig[0];
        assert_eq!(position_outcome_via_quotient(r, &Position(x.clone())).unwrap().is_p(), truth);
    }
}

fn context(arena: &mut Arena, names: &[&str]) -> ClosedContext {
    let gens: Vec<GameId> = names
        .iter()
        .map(|n| builtin(n, arena).unwrap_or_else(|| arena.parse(n).unwrap()))
        .collect();
    ClosedContext::from_games(arena, &gens).unwrap()
}

#[test]
fn box_oracle_agrees_on_fixtures() {
    for (names, b, order) in [
        (&["*"][..], 4, 2),
        (&["*2"][..], 4, 6),
        (&["*4"][..], 3, 10),
        (&["star2sharp320"][..], 3, 8),
    ] {
        let mut a = Arena::new();
        let ctx = context(&mut a, names);
        let r = compute_quotient(&ctx, QuotientCaps::default()).unwrap();
        assert!(r.is_verified(), "{names:?}");
        assert_eq!(r.monoid.as_ref().unwrap().size(), order);
        assert_box_agrees(&mut a, &ctx, &r, b);
    }
}

#[test]
fn named_quotients() {
    for (n, g) in [(1, "*"), (2, "*2"), (3, "*4")] {
        let mut a = Arena::new();
        let ctx = context(&mut a, &[g]);
        let m = compute_quotient(&ctx, QuotientCaps::default()).unwrap().monoid.unwrap();
        assert!(iso(&m, &make_tn(n).unwrap()).unwrap().is_some());
        assert_eq!(classify_tame(&m), Some(n));
    }
    let mut a = Arena::new();
    let ctx = context(&mut a, &["star2sharp320"]);
    let r = compute_quotient(&ctx, QuotientCaps::default()).unwrap();
    let m = r.monoid.as_ref().unwrap();
    assert!(iso(m, &make_r8()).unwrap().is_some());
    assert_eq!(classify_tame(m), None);
    let zero = a.zero();
    let ctx0 = ClosedContext::from_games(&a, &[zero]).unwrap();
    let t0 = compute_quotient(&ctx0, QuotientCaps::default()).unwrap();
    assert_eq!(t0.monoid.unwrap().size(), 1);
}

#[test]
fn lookups() {
    let mut a = Arena::new();
    let ctx = context(&mut a, &["*2"]);
    let r = compute_quotient(&ctx, QuotientCaps::default()).unwrap();
    let m = r.monoid.as_ref().unwrap();
    let x = r.phi_of(&Position(vec![0, 1, 2])).unwrap();
    assert_eq!(m.label(x), "ab2");
    assert_eq!(position_outcome_via_quotient(&r, &Position(vec![0, 1, 2])).unwrap(), Outcome::N);
    assert_eq!(position_outcome_via_quotient(&r, &Position(vec![0, 0, 0])).unwrap(), Outcome::N);

    let ctx = context(&mut a, &["star2sharp320"]);
    let r = compute_quotient(&ctx, QuotientCaps::default()).unwrap();
    let c = ctx.component_of(builtin("C", &mut a).unwrap()).unwrap();
    let star = ctx.star().unwrap();
    let pos = Position::from_pairs(ctx.len(), &[(c, 1), (star, 1)]);
    let mut o = SumOracle::new(&mut a, &ctx);
    assert!(!o.is_p(&pos.0));
    assert_eq!(position_outcome_via_quotient(&r, &pos).unwrap(), Outcome::N);
    // C = *2# lies in the kernel.
    let m = r.monoid.as_ref().unwrap();
    assert!(structure_report(m).kernel.contains(&r.phi[c]));
}

#[test]
fn verify_quotient_examples() {
    let mut a = Arena::new();
    let ctx = context(&mut a, &["*2"]);
    let t2 = make_tn(2).unwrap();
    let (ea, eb) = (t2.element("a").unwrap(), t2.element("b").unwrap());
    let id = t2.identity();
    assert!(verify_quotient(&ctx, &t2, &[id, ea, eb]).unwrap());
    assert!(!verify_quotient(&ctx, &t2, &[id, eb, ea]).unwrap());
    let t1 = make_tn(1).unwrap();
    let a1 = t1.element("a").unwrap();
    assert!(!verify_quotient(&ctx, &t1, &[t1.identity(), a1, a1]).unwrap());
}

fn e_context() -> (ClosedContext, usize, usize, usize, usize, usize) {
    let mut a = Arena::new();
    let ctx = context(&mut a, &["E"]);
    let idx = |a: &mut Arena, n: &str| ctx.component_of(builtin(n, a).unwrap()).unwrap();
    let (ca, cb, cc, cd, ce) = (idx(&mut a, "A"), idx(&mut a, "B"), idx(&mut a, "C"), idx(&mut a, "D"), idx(&mut a, "E"));
    (ctx, ca, cb, cc, cd, ce)
}

#[test]
fn multiples_of_e() {
    let (ctx, _, _, _, _, ce) = e_context();
    let mut o = OutcomeOracle::new(10_000_000);
    let p: Vec<u32> = (1..=16)
        .filter(|&m| o.outcome(&ctx, &Position::from_pairs(ctx.len(), &[(ce, m)])).unwrap().is_p())
        .collect();
    assert_eq!(p, [1, 4, 7, 10, 12, 14, 16]);
}

#[test]
fn e_parity_rule() {
    let (ctx, ca, cb, cc, cd, ce) = e_context();
    let mut o = OutcomeOracle::new(10_000_000);
    for k in 3..=5 {
        for i in 0..=5 {
            for j in 0..=5 {
                for l in 0..=5 {
                    for m in 0..=5 {
                        let pos = Position::from_pairs(ctx.len(), &[(ca, i), (cb, j), (cc, k), (cd, l), (ce, m)]);
                        let expected = (i + l) % 2 == 0 && (j + m) % 2 == 0;
                        assert_eq!(o.outcome(&ctx, &pos).unwrap().is_p(), expected, "{i} {j} {k} {l} {m}");
                    }
                }
            }
        }
    }
}

#[test]
fn large_odd_multiples_of_d() {
    let (ctx, _, _, _, cd, ce) = e_context();
    let mut o = OutcomeOracle::new(10_000_000);
    for l in [9, 11, 13] {
        for m in 0..=l + 10 {
            let pos = Position::from_pairs(ctx.len(), &[(cd, l), (ce, m)]);
            assert_eq!(o.outcome(&ctx, &pos).unwrap().is_p(), m == l + 7, "l={l} m={m}");
        }
    }
}

#[test]
fn e_is_undetermined_with_a_large_d_family() {
    let (ctx, _, _, _, cd, _) = e_context();
    let r = compute_quotient(&ctx, QuotientCaps::default()).unwrap();
    assert!(!r.is_verified());
    let fam = r.evidence.families.iter().find(|f| f.component == cd).unwrap();
    assert!(fam.multiples.len() >= 8);
    // Check every witness independently.
    let mut o = OutcomeOracle::new(10_000_000);
    for (k1, k2, x) in &fam.witnesses {
        let mut p1 = x.clone();
        p1.0[cd] += k1;
        let mut p2 = x.clone();
        p2.0[cd] += k2;
        assert_ne!(o.outcome(&ctx, &p1).unwrap(), o.outcome(&ctx, &p2).unwrap());
    }
}

fn octal_context(code: &str, n: usize) -> ClosedContext {
    let code: OctalCode = code.parse().unwrap();
    let mut ctx = ClosedContext::octal(&code);
    for _ in 0..n {
        ctx.push_heap().unwrap();
    }
    ctx
}

#[test]
fn reused_values_match_a_fresh_computation() {
    for (code, n_max) in [("0.77", 11), ("0.07", 12), ("0.75", 12)] {
        let p = pretending_function(&code.parse().unwrap(), n_max, QuotientCaps::default()).unwrap();
        let growth = p.growth_points();
        for n in 1..=n_max {
            if growth.contains(&n) || n % 3 != 0 {
                continue;
            }
            let ctx = octal_context(code, n);
            let fresh = compute_quotient(&ctx, QuotientCaps::default()).unwrap();
            let snap = p.snapshot_at(n).unwrap();
            assert!(iso(fresh.monoid.as_ref().unwrap(), &snap.monoid).unwrap().is_some(), "{code} {n}");
        }
    }
}

#[test]
fn partial_quotients_can_split_classes() {
    // In Kayles, H5 + H5 is identified with 0 until heap 9 joins.
    let p = pretending_function(&"0.77".parse().unwrap(), 9, QuotientCaps::default()).unwrap();
    let before = p.snapshot_at(8).unwrap();
    let after = p.snapshot_at(9).unwrap();
    let m = &before.monoid;
    assert_eq!(m.mul(before.phi[5], before.phi[5]), m.identity());
    let m = &after.monoid;
    assert_ne!(m.mul(after.phi[5], after.phi[5]), m.identity());
    // A witness: some X with H9 separates 2 H5 from 0.
    let ctx = octal_context("0.77", 9);
    let mut o = OutcomeOracle::new(10_000_000);
    let h = |n: usize| ctx.heap_component(n).unwrap();
    let mut found = false;
    for i in 0..=9 {
        for j in i..=9 {
            let x = Position::from_pairs(ctx.len(), &[(h(9), 1), (h(i), 1), (h(j), 1)]);
            let mut y = x.clone();
            y.0[h(5)] += 2;
            if o.outcome(&ctx, &x).unwrap() != o.outcome(&ctx, &y).unwrap() {
                found = true;
            }
        }
    }
    assert!(found);
}

#[test]
fn dawson_partial_quotients_turn_wild_at_heap_ten() {
    let p = pretending_function(&"0.07".parse().unwrap(), 12, QuotientCaps::default()).unwrap();
    for n in 0..=9 {
        assert!(classify_tame(&p.snapshot_at(n).unwrap().monoid).is_some(), "heap {n}");
    }
    let q10 = &p.snapshot_at(10).unwrap().monoid;
    assert_eq!(classify_tame(q10), None);
    assert_eq!(q10.size(), 12);
}

#[test]
fn octal_partial_quotients_satisfy_invariants() {
    for code in ["0.75", "0.77", "0.07"] {
        let p = pretending_function(&code.parse().unwrap(), 12, QuotientCaps::default()).unwrap();
        for s in &p.snapshots {
            let ctx = octal_context(code, s.heap);
            let phi: Vec<usize> = (0..ctx.len())
                .map(|c| {
                    let n = (0..=s.heap).find(|&n| ctx.heap_component(n) == Some(c)).unwrap();
                    s.phi[n]
                })
                .collect();
            assert!(verify_quotient(&ctx, &s.monoid, &phi).unwrap(), "{code} {}", s.heap);
            assert!(quotient_invariant_violations(&ctx, &s.monoid, &phi).is_empty(), "{code} {}", s.heap);
        }
    }
}

fn dag() -> impl Strategy<Value = Vec<Vec<Index>>> {
    prop::collection::vec(prop::collection::vec(any::<Index>(), 1..4), 1..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quotient_lookups_are_sound(shape in dag(), seed in any::<u64>()) {
        let mut a = Arena::new();
        let mut games = vec![a.zero()];
        for opts in &shape {
            let o = opts.iter().map(|ix| games[ix.index(games.len())]).collect();
            let g = a.intern(o);
            games.push(g);
        }
        let top = *games.last().unwrap();
        let ctx = ClosedContext::from_games(&a, &[top]).unwrap();
        let caps = QuotientCaps { q_max: 64, memo_max: 1_000_000, ..QuotientCaps::default() };
        let r = compute_quotient(&ctx, caps).unwrap();
        if !r.is_verified() {
            return Ok(());
        }
        let m = r.monoid.as_ref().unwrap();
        prop_assert!(quotient_invariant_violations(&ctx, m, &r.phi).is_empty());
        prop_assert!(verify_quotient(&ctx, m, &r.phi).unwrap());
        if ctx.len() <= 5 {
            assert_box_agrees(&mut a, &ctx, &r, 2);
        }
        let bound = 2 * r.evidence.r;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut o = OutcomeOracle::new(5_000_000);
        for _ in 0..64 {
            let v: Vec<u32> = (0..ctx.len()).map(|c| if c == 0 { 0 } else { rng.gen_range(0..=bound.min(6)) }).collect();
            let pos = Position(v);
            prop_assert_eq!(position_outcome_via_quotient(&r, &pos).unwrap(), o.outcome(&ctx, &pos).unwrap());
        }
    }
}
