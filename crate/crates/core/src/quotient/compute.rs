//! Candidate construction and certification of misère quotients.
//!
//! Candidates come from a breadth-first search over positions: a position
//! starts a new class when its outcome signature against the current test
//! set is new. The candidate is then certified exactly: with `Phi` a
//! homomorphism onto a finite monoid, the condition
//! `Phi(X) in P <=> X != 0 and Phi(X') not in P for every option X'`
//! only depends on `Phi(X)` and on which `u` make some `Phi(X') u` a
//! P-element, and both update under adding a component, so it is checked
//! on the finite automaton of those pairs. Failures yield a concrete
//! position whose walk suffixes are added as new tests.

use std::cmp::Reverse;
use std::collections::VecDeque;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use super::context::{ClosedContext, Position, Sparse};
use super::oracle::{add, Cover, OutcomeOracle};
use super::QuotientError;
use crate::games::Outcome;
use crate::monoid::BipartiteMonoid;

const NONE: u32 = u32::MAX;

/// Search limits. `r_init`/`r_max` bound the exponent of any component in
/// a class representative; `q_max` bounds the number of classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientCaps {
    pub r_init: u32,
    pub r_max: u32,
    pub q_max: usize,
    pub memo_max: usize,
    pub max_rounds: usize,
    pub max_states: usize,
}

impl Default for QuotientCaps {
    fn default() -> Self {
        QuotientCaps {
            r_init: 4,
            r_max: 32,
            q_max: 256,
            memo_max: 10_000_000,
            max_rounds: 4096,
            max_states: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuotientStatus {
    Verified,
    Undetermined,
}

/// Which cap stopped the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Undetermined {
    ClassCap,
    ExponentCap,
    MemoCap,
    RoundCap,
    StateCap,
}

/// Multiples `k*g` of one component that are pairwise distinguishable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultipleFamily {
    pub component: usize,
    pub name: String,
    pub multiples: Vec<u32>,
    /// `(k1, k2, X)`: exactly one of `k1*g + X`, `k2*g + X` is a P-position.
    pub witnesses: Vec<(u32, u32, Position)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub r: u32,
    pub q_max: usize,
    pub classes: usize,
    pub tests: usize,
    pub rounds: usize,
    pub refinements: usize,
    pub automaton_states: usize,
    pub oracle_evaluations: u64,
    pub memo_entries: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<Undetermined>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub families: Vec<MultipleFamily>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuotientResult {
    pub status: QuotientStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monoid: Option<BipartiteMonoid>,
    /// Quotient map on each component (empty when undetermined).
    pub phi: Vec<usize>,
    pub components: Vec<String>,
    pub evidence: Evidence,
    /// One representative position per element, indexed like the monoid.
    #[serde(skip)]
    pub(crate) reps: Vec<Sparse>,
}

impl QuotientResult {
    pub fn is_verified(&self) -> bool {
        self.status == QuotientStatus::Verified
    }

    /// `Phi` of a position: the product of component images.
    pub fn phi_of(&self, pos: &Position) -> Result<usize, QuotientError> {
        let m = self.monoid.as_ref().ok_or(QuotientError::Undetermined)?;
        if pos.0.len() != self.phi.len() {
            return Err(QuotientError::PositionShape {
                expected: self.phi.len(),
                got: pos.0.len(),
            });
        }
        Ok(pos
            .0
            .iter()
            .zip(&self.phi)
            .fold(m.identity(), |acc, (&e, &x)| m.mul(acc, m.pow(x, e as u64))))
    }
}

/// Outcome of a position read off a verified quotient.
pub fn position_outcome_via_quotient(result: &QuotientResult, pos: &Position) -> Result<Outcome, QuotientError> {
    if !result.is_verified() {
        return Err(QuotientError::Undetermined);
    }
    let x = result.phi_of(pos)?;
    let m = result.monoid.as_ref().expect("verified result has a monoid");
    Ok(Outcome::from_is_p(m.is_p(x)))
}

pub fn compute_quotient(ctx: &ClosedContext, caps: QuotientCaps) -> Result<QuotientResult, QuotientError> {
    let mut oracle = OutcomeOracle::new(caps.memo_max);
    compute_quotient_with(ctx, &mut oracle, caps, &[])
}

/// Like [`compute_quotient`] but reuses `oracle` and starts from extra test
/// positions.
pub fn compute_quotient_with(
    ctx: &ClosedContext,
    oracle: &mut OutcomeOracle,
    caps: QuotientCaps,
    seed: &[Position],
) -> Result<QuotientResult, QuotientError> {
    let seed = seed
        .iter()
        .map(|p| ctx.to_sparse(p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(search(ctx, oracle, caps, seed)?.0)
}

/// Per-type data for the certification automaton: components with the same
/// image and the same option images behave identically.
struct TypeInfo {
    image: usize,
    option_images: Vec<usize>,
    component: usize,
}

fn component_types(
    m: &BipartiteMonoid,
    components: impl IntoIterator<Item = usize>,
    image: impl Fn(usize) -> usize,
    option_images: impl Fn(usize) -> Vec<usize>,
) -> Vec<TypeInfo> {
    let mut types: Vec<TypeInfo> = Vec::new();
    let mut index: FxHashMap<(usize, Vec<usize>), usize> = FxHashMap::default();
    for c in components {
        let mut opts = option_images(c);
        opts.sort_unstable();
        opts.dedup();
        let img = image(c);
        index.entry((img, opts.clone())).or_insert_with(|| {
            types.push(TypeInfo {
                image: img,
                option_images: opts,
                component: c,
            });
            types.len() - 1
        });
    }
    let _ = m;
    types
}

enum Certification {
    Holds { states: usize },
    /// Counts per type of a position where the condition fails.
    Fails { counts: Vec<u32>, states: usize },
    TooManyStates,
}

fn certify(m: &BipartiteMonoid, types: &[TypeInfo], max_states: usize) -> Certification {
    let q = m.size();
    let words = q.div_ceil(64);
    // rows[x] = { u : xu in P }.
    let rows: Vec<Vec<u64>> = (0..q)
        .map(|x| {
            let mut r = vec![0u64; words];
            for u in 0..q {
                if m.is_p(m.mul(x, u)) {
                    r[u / 64] |= 1 << (u % 64);
                }
            }
            r
        })
        .collect();
    let has = |bits: &[u64], u: usize| bits[u / 64] >> (u % 64) & 1 == 1;
    // State: (Phi(X), X != 0, U) with U the union of the rows of the option
    // images of X. The condition reads `Phi(X) in P <=> X != 0 and 1 not in U`.
    type State = (u32, bool, Vec<u64>);
    let start: State = (m.identity() as u32, false, vec![0; words]);
    let mut seen: FxHashMap<State, u32> = FxHashMap::default();
    let mut states: Vec<State> = vec![start.clone()];
    let mut parent: Vec<(u32, u16)> = vec![(NONE, 0)];
    seen.insert(start, 0);
    let mut queue = VecDeque::from([0u32]);
    while let Some(s) = queue.pop_front() {
        let (x, nonzero, u_set) = states[s as usize].clone();
        let x = x as usize;
        if m.is_p(x) != (nonzero && !has(&u_set, m.identity())) {
            let mut counts = vec![0u32; types.len()];
            let mut cur = s;
            while parent[cur as usize].0 != NONE {
                let (prev, ty) = parent[cur as usize];
                counts[ty as usize] += 1;
                cur = prev;
            }
            return Certification::Fails {
                counts,
                states: states.len(),
            };
        }
        for (ty, info) in types.iter().enumerate() {
            let g = info.image;
            let mut next = vec![0u64; words];
            for u in 0..q {
                if has(&u_set, m.mul(g, u)) {
                    next[u / 64] |= 1 << (u % 64);
                }
            }
            for &w in &info.option_images {
                for (a, b) in next.iter_mut().zip(&rows[m.mul(x, w)]) {
                    *a |= b;
                }
            }
            let key: State = (m.mul(x, g) as u32, true, next);
            if !seen.contains_key(&key) {
                if states.len() >= max_states {
                    return Certification::TooManyStates;
                }
                let id = states.len() as u32;
                seen.insert(key.clone(), id);
                states.push(key);
                parent.push((s, ty as u16));
                queue.push_back(id);
            }
        }
    }
    Certification::Holds {
        states: states.len(),
    }
}

/// Certifies an externally supplied quotient: `phi` must be surjective,
/// send 0 to the identity, and satisfy the outcome condition everywhere.
pub fn verify_quotient(ctx: &ClosedContext, m: &BipartiteMonoid, phi: &[usize]) -> Result<bool, QuotientError> {
    if phi.len() != ctx.len() {
        return Err(QuotientError::PhiShape {
            expected: ctx.len(),
            got: phi.len(),
        });
    }
    if let Some(&x) = phi.iter().find(|&&x| x >= m.size()) {
        return Err(QuotientError::Monoid(crate::monoid::MonoidError::OutOfRange {
            x,
            y: 0,
            value: x,
        }));
    }
    if !m.is_reduced() {
        return Err(QuotientError::NotReduced);
    }
    if phi[0] != m.identity() || !m.generated(phi).iter().all(|&b| b) {
        return Ok(false);
    }
    let image_of = |s: &Sparse| {
        s.iter()
            .fold(m.identity(), |acc, &(c, e)| m.mul(acc, m.pow(phi[c as usize], e as u64)))
    };
    let types = component_types(
        m,
        1..ctx.len(),
        |c| phi[c],
        |c| ctx.sparse_options(c).iter().map(image_of).collect(),
    );
    match certify(m, &types, QuotientCaps::default().max_states) {
        Certification::Holds { .. } => Ok(true),
        Certification::Fails { .. } => Ok(false),
        Certification::TooManyStates => Err(QuotientError::Inconsistent(
            "certification automaton exceeded its state cap".into(),
        )),
    }
}

struct Candidate {
    reps: Vec<Sparse>,
    trans: Vec<Vec<u32>>,
    sigs: Vec<Vec<u64>>,
    cut: bool,
}

enum Stop {
    Cap(Undetermined),
    Fail(QuotientError),
}

impl From<QuotientError> for Stop {
    fn from(e: QuotientError) -> Self {
        match e {
            QuotientError::MemoCapacity { .. } => Stop::Cap(Undetermined::MemoCap),
            other => Stop::Fail(other),
        }
    }
}

struct Search<'a> {
    ctx: &'a ClosedContext,
    oracle: &'a mut OutcomeOracle,
    caps: QuotientCaps,
    gens: Vec<usize>,
    tests: Vec<Sparse>,
    test_set: FxHashSet<Sparse>,
    /// Signatures against a prefix of `tests`; tests are only appended.
    sig_cache: FxHashMap<Sparse, (Vec<u64>, usize)>,
    evidence: Evidence,
}

fn unit(c: usize) -> Sparse {
    Sparse::from_slice(&[(c as u16, 1)])
}

impl Search<'_> {
    fn add_test(&mut self, t: Sparse) -> bool {
        if self.test_set.insert(t.clone()) {
            self.tests.push(t);
            true
        } else {
            false
        }
    }

    fn signature(&mut self, y: &Sparse) -> Result<Vec<u64>, QuotientError> {
        let (mut sig, done) = self.sig_cache.remove(y).unwrap_or_default();
        sig.resize(self.tests.len().div_ceil(64), 0);
        let star = self.ctx.star();
        for i in done..self.tests.len() {
            if self.oracle.is_p(self.ctx, &add(y, &self.tests[i], star))? {
                sig[i / 64] |= 1 << (i % 64);
            }
        }
        self.sig_cache.insert(y.clone(), (sig.clone(), self.tests.len()));
        Ok(sig)
    }

    fn bfs(&mut self, r: u32) -> Result<Candidate, Stop> {
        let star = self.ctx.star();
        let mut reps: Vec<Sparse> = vec![Sparse::new()];
        let mut sigs = vec![self.signature(&reps[0])?];
        let mut index: FxHashMap<Vec<u64>, u32> = FxHashMap::default();
        index.insert(sigs[0].clone(), 0);
        let mut trans: Vec<Vec<u32>> = Vec::new();
        let mut cut = false;
        let mut x = 0;
        while x < reps.len() {
            let mut row = vec![NONE; self.gens.len()];
            for (gi, &g) in self.gens.clone().iter().enumerate() {
                let y = add(&reps[x], &unit(g), star);
                let exp = y.iter().find(|&&(c, _)| c as usize == g).map_or(0, |&(_, e)| e);
                if exp as u32 > r {
                    cut = true;
                    continue;
                }
                let sig = self.signature(&y)?;
                let id = match index.get(&sig) {
                    Some(&id) => id,
                    None => {
                        if reps.len() >= self.caps.q_max {
                            self.evidence.classes = reps.len() + 1;
                            return Err(Stop::Cap(Undetermined::ClassCap));
                        }
                        let id = reps.len() as u32;
                        index.insert(sig.clone(), id);
                        reps.push(y);
                        sigs.push(sig);
                        id
                    }
                };
                row[gi] = id;
            }
            trans.push(row);
            x += 1;
        }
        Ok(Candidate {
            reps,
            trans,
            sigs,
            cut,
        })
    }

    fn first_difference(a: &[u64], b: &[u64]) -> usize {
        a.iter()
            .zip(b)
            .enumerate()
            .find(|(_, (x, y))| x != y)
            .map(|(i, (x, y))| i * 64 + (x ^ y).trailing_zeros() as usize)
            .expect("distinct classes have distinct signatures")
    }

    fn noncommuting(c: &Candidate) -> Option<(usize, usize, usize)> {
        let k = c.trans.first().map_or(0, Vec::len);
        for x in 0..c.reps.len() {
            for i in 0..k {
                for j in i + 1..k {
                    let a = c.trans[c.trans[x][i] as usize][j];
                    let b = c.trans[c.trans[x][j] as usize][i];
                    if a != b {
                        return Some((x, i, j));
                    }
                }
            }
        }
        None
    }

    fn walk(&self, c: &Candidate, mut x: usize, s: &Sparse, gen_of: &[usize]) -> usize {
        for &(comp, e) in s {
            for _ in 0..e {
                x = c.trans[x][gen_of[comp as usize]] as usize;
            }
        }
        x
    }

    /// Adds every suffix of the canonical walk along `y` as a test.
    fn add_suffixes(&mut self, y: &Sparse) -> usize {
        let mut added = 0;
        let mut rest = y.clone();
        while !rest.is_empty() {
            added += self.add_test(rest.clone()) as usize;
            if rest[0].1 == 1 {
                rest.remove(0);
            } else {
                rest[0].1 -= 1;
            }
        }
        added
    }

    fn undetermined(&mut self, reason: Undetermined, r: u32) -> QuotientResult {
        self.evidence.reason = Some(reason);
        self.evidence.r = r;
        self.evidence.families = self.families();
        self.result(QuotientStatus::Undetermined, None, Vec::new())
    }

    fn result(&mut self, status: QuotientStatus, monoid: Option<BipartiteMonoid>, phi: Vec<usize>) -> QuotientResult {
        self.evidence.q_max = self.caps.q_max;
        self.evidence.tests = self.tests.len();
        self.evidence.oracle_evaluations = self.oracle.evaluations();
        self.evidence.memo_entries = self.oracle.memo_len();
        QuotientResult {
            status,
            monoid,
            phi,
            components: self.ctx.components().iter().map(|c| c.name.clone()).collect(),
            evidence: self.evidence.clone(),
            reps: Vec::new(),
        }
    }

    /// Pairwise-distinguishable multiples of each component, found with
    /// tests of the form `m*h` and `* + m*h`.
    fn families(&mut self) -> Vec<MultipleFamily> {
        const K: u32 = 16;
        const M: u16 = 24;
        let star = self.ctx.star();
        let mut witnesses: Vec<Sparse> = vec![Sparse::new()];
        for &h in &self.gens {
            for m in 1..=M {
                let base = Sparse::from_slice(&[(h as u16, m)]);
                let mut with_star = base.clone();
                if let Some(s) = star {
                    with_star = add(&base, &unit(s), star);
                }
                witnesses.push(base);
                witnesses.push(with_star);
            }
        }
        witnesses.sort();
        witnesses.dedup();
        let mut out = Vec::new();
        for g in self.gens.clone() {
            if Some(g) == star {
                continue;
            }
            let mut members: Vec<(u32, Vec<bool>)> = Vec::new();
            'k: for k in 1..=K {
                let kg = Sparse::from_slice(&[(g as u16, k as u16)]);
                let mut sig = Vec::with_capacity(witnesses.len());
                for w in &witnesses {
                    match self.oracle.is_p(self.ctx, &add(&kg, w, star)) {
                        Ok(v) => sig.push(v),
                        Err(_) => break 'k,
                    }
                }
                if members.iter().all(|(_, s)| *s != sig) {
                    members.push((k, sig));
                }
            }
            let mut pairs = Vec::new();
            for (i, (k1, s1)) in members.iter().enumerate() {
                for (k2, s2) in &members[i + 1..] {
                    let w = s1.iter().zip(s2).position(|(a, b)| a != b).expect("distinct signatures");
                    pairs.push((*k1, *k2, self.ctx.to_dense(&witnesses[w])));
                }
            }
            out.push(MultipleFamily {
                component: g,
                name: self.ctx.components()[g].name.clone(),
                multiples: members.iter().map(|(k, _)| *k).collect(),
                witnesses: pairs,
            });
        }
        out
    }

    fn run(&mut self) -> Result<(QuotientResult, Vec<Sparse>), QuotientError> {
        let mut r = self.caps.r_init.max(1).min(self.caps.r_max.max(1));
        let mut gen_of = vec![usize::MAX; self.ctx.len()];
        for (i, &g) in self.gens.iter().enumerate() {
            gen_of[g] = i;
        }
        for round in 0..self.caps.max_rounds {
            self.evidence.rounds = round + 1;
            let cand = match self.bfs(r) {
                Ok(c) => c,
                Err(Stop::Cap(reason)) => return Ok((self.undetermined(reason, r), self.tests.clone())),
                Err(Stop::Fail(e)) => return Err(e),
            };
            self.evidence.classes = cand.reps.len();
            let mut grew = false;
            for rep in &cand.reps {
                grew |= self.add_test(rep.clone());
            }
            if grew {
                continue;
            }
            if cand.cut {
                if r >= self.caps.r_max {
                    return Ok((self.undetermined(Undetermined::ExponentCap, r), self.tests.clone()));
                }
                r = (r * 2).min(self.caps.r_max);
                continue;
            }
            if let Some((x, i, j)) = Self::noncommuting(&cand) {
                let a = cand.trans[cand.trans[x][i] as usize][j] as usize;
                let b = cand.trans[cand.trans[x][j] as usize][i] as usize;
                let t0 = self.tests[Self::first_difference(&cand.sigs[a], &cand.sigs[b])].clone();
                let star = self.ctx.star();
                let added = self.add_test(add(&unit(self.gens[i]), &t0, star)) as usize
                    + self.add_test(add(&unit(self.gens[j]), &t0, star)) as usize;
                if added == 0 {
                    return Err(QuotientError::Inconsistent("non-commuting candidate without a new test".into()));
                }
                self.evidence.refinements += 1;
                continue;
            }
            let q = cand.reps.len();
            let mut table = Vec::with_capacity(q * q);
            for x in 0..q {
                for y in 0..q {
                    table.push(self.walk(&cand, x, &cand.reps[y], &gen_of) as u32);
                }
            }
            let p = (0..q).filter(|&x| cand.sigs[x][0] & 1 == 1);
            let m = BipartiteMonoid::new(q, table, 0, p, None)?;
            let types = component_types(
                &m,
                self.gens.iter().copied(),
                |c| cand.trans[0][gen_of[c]] as usize,
                |c| {
                    self.ctx
                        .sparse_options(c)
                        .iter()
                        .map(|o| self.walk(&cand, 0, o, &gen_of))
                        .collect()
                },
            );
            match certify(&m, &types, self.caps.max_states) {
                Certification::Holds { states } => {
                    self.evidence.automaton_states = states;
                    self.evidence.r = r;
                    let (monoid, phi, perm) = self.finalize(&cand, &m, &gen_of)?;
                    let mut result = self.result(QuotientStatus::Verified, Some(monoid), phi);
                    result.reps = vec![Sparse::new(); q];
                    for (old, &new) in perm.iter().enumerate() {
                        result.reps[new] = cand.reps[old].clone();
                    }
                    return Ok((result, self.tests.clone()));
                }
                Certification::TooManyStates => {
                    return Ok((self.undetermined(Undetermined::StateCap, r), self.tests.clone()));
                }
                Certification::Fails { counts, states } => {
                    self.evidence.automaton_states = states;
                    let mut x = Sparse::new();
                    for (ty, &n) in counts.iter().enumerate() {
                        if n > 0 {
                            let s = Sparse::from_slice(&[(types[ty].component as u16, n as u16)]);
                            x = add(&x, &s, self.ctx.star());
                        }
                    }
                    let mut ys = vec![x.clone()];
                    for (i, &(c, e)) in x.iter().enumerate() {
                        let mut rest = x.clone();
                        if e == 1 {
                            rest.remove(i);
                        } else {
                            rest[i].1 -= 1;
                        }
                        for o in self.ctx.sparse_options(c as usize) {
                            ys.push(add(&rest, o, self.ctx.star()));
                        }
                    }
                    let mut added = 0;
                    for y in ys {
                        let truth = match self.oracle.is_p(self.ctx, &y) {
                            Ok(v) => v,
                            Err(e) => match Stop::from(e) {
                                Stop::Cap(reason) => {
                                    return Ok((self.undetermined(reason, r), self.tests.clone()))
                                }
                                Stop::Fail(e) => return Err(e),
                            },
                        };
                        let class = self.walk(&cand, 0, &y, &gen_of);
                        if m.is_p(class) != truth {
                            added += self.add_suffixes(&y);
                        }
                    }
                    if added == 0 {
                        return Err(QuotientError::Inconsistent(
                            "certification failure without a new distinguishing test".into(),
                        ));
                    }
                    self.evidence.refinements += 1;
                }
            }
        }
        Ok((self.undetermined(Undetermined::RoundCap, r), self.tests.clone()))
    }

    /// Orders classes by minimal representative, names generators and
    /// elements, and returns the relabeled monoid with `Phi` per component.
    fn finalize(
        &self,
        cand: &Candidate,
        m: &BipartiteMonoid,
        gen_of: &[usize],
    ) -> Result<(BipartiteMonoid, Vec<usize>, Vec<usize>), QuotientError> {
        let q = m.size();
        let steps: Vec<usize> = (0..self.gens.len())
            .map(|gi| cand.trans[0][gi] as usize)
            .collect();
        let order_keys = minimal_words(m, &steps);
        let mut order: Vec<usize> = (0..q).collect();
        order.sort_by_key(|&x| {
            let (d, v) = &order_keys[x];
            (*d, Reverse(v.clone()))
        });
        let mut perm = vec![0; q];
        for (new, &old) in order.iter().enumerate() {
            perm[old] = new;
        }
        let sorted = m.permuted(&perm);
        let mut phi = vec![sorted.identity(); self.ctx.len()];
        for &g in &self.gens {
            phi[g] = perm[cand.trans[0][gen_of[g]] as usize];
        }
        let labels = label_elements(&sorted, &phi[1..]);
        let monoid = sorted.with_labels(labels)?;
        if !monoid.is_reduced() {
            return Err(QuotientError::Inconsistent("certified candidate is not reduced".into()));
        }
        Ok((monoid, phi, perm))
    }
}

/// For each element, the least `(length, exponent vector)` over words in
/// `steps` that reach it from the identity; larger leading exponents first.
fn minimal_words(m: &BipartiteMonoid, steps: &[usize]) -> Vec<(u32, Vec<u32>)> {
    let q = m.size();
    let mut best: Vec<Option<(u32, Vec<u32>)>> = vec![None; q];
    let mut layer: FxHashMap<usize, Vec<u32>> = FxHashMap::default();
    layer.insert(m.identity(), vec![0; steps.len()]);
    let mut d = 0;
    let mut found = 0;
    while found < q && !layer.is_empty() && d <= 2 * q as u32 + 2 {
        for (&x, v) in &layer {
            if best[x].is_none() {
                best[x] = Some((d, v.clone()));
                found += 1;
            }
        }
        let mut next: FxHashMap<usize, Vec<u32>> = FxHashMap::default();
        for (&x, v) in &layer {
            for (i, &g) in steps.iter().enumerate() {
                let y = m.mul(x, g);
                let mut w = v.clone();
                w[i] += 1;
                match next.get_mut(&y) {
                    Some(cur) if Reverse(&w) < Reverse(cur) => *cur = w,
                    Some(_) => {}
                    None => {
                        next.insert(y, w);
                    }
                }
            }
        }
        layer = next;
        d += 1;
    }
    best.into_iter()
        .map(|b| b.unwrap_or((u32::MAX, Vec::new())))
        .collect()
}

fn letter_name(i: usize) -> String {
    if i < 26 {
        char::from(b'a' + i as u8).to_string()
    } else {
        format!("g{i}_")
    }
}

/// Letters `a, b, c, ...` go to component images not generated by earlier
/// letters. Each element is labeled by its least exponent vector, comparing
/// the last letter first, so words avoid later letters where possible.
fn label_elements(m: &BipartiteMonoid, images: &[usize]) -> Vec<String> {
    let mut letters: Vec<usize> = Vec::new();
    for &img in images {
        if !m.generated(&letters)[img] {
            letters.push(img);
        }
    }
    least_vectors(m, &letters)
        .into_iter()
        .map(|v| {
            let mut s = String::new();
            for (i, &e) in v.iter().enumerate() {
                if e > 0 {
                    s.push_str(&letter_name(i));
                    if e > 1 {
                        s.push_str(&e.to_string());
                    }
                }
            }
            if s.is_empty() {
                s.push('1');
            }
            s
        })
        .collect()
}

/// Least exponent vector per element under the order comparing the last
/// letter's exponent first.
fn least_vectors(m: &BipartiteMonoid, letters: &[usize]) -> Vec<Vec<u32>> {
    let q = m.size();
    let rev_less = |a: &[u32], b: &[u32]| a.iter().rev().lt(b.iter().rev());
    let mut best: Vec<Option<Vec<u32>>> = vec![None; q];
    best[m.identity()] = Some(Vec::new());
    for &g in letters {
        let mut powers = vec![m.identity()];
        loop {
            let next = m.mul(*powers.last().expect("nonempty"), g);
            if powers.contains(&next) {
                break;
            }
            powers.push(next);
        }
        let mut next: Vec<Option<Vec<u32>>> = vec![None; q];
        for (e, &pw) in powers.iter().enumerate() {
            let mut fresh: Vec<Option<Vec<u32>>> = vec![None; q];
            for (y, v) in best.iter().enumerate() {
                let Some(v) = v else { continue };
                let x = m.mul(y, pw);
                if next[x].is_some() {
                    continue;
                }
                if fresh[x].as_ref().is_none_or(|cur| rev_less(v, &cur[..cur.len() - 1])) {
                    let mut w = v.clone();
                    w.push(e as u32);
                    fresh[x] = Some(w);
                }
            }
            for (x, f) in fresh.into_iter().enumerate() {
                if f.is_some() {
                    next[x] = f;
                }
            }
        }
        best = next;
    }
    best.into_iter().map(|b| b.unwrap_or_default()).collect()
}

/// Runs the search and also returns the final test set, which callers may
/// use to seed later searches.
pub(crate) fn search(
    ctx: &ClosedContext,
    oracle: &mut OutcomeOracle,
    caps: QuotientCaps,
    seed: Vec<Sparse>,
) -> Result<(QuotientResult, Vec<Sparse>), QuotientError> {
    let gens: Vec<usize> = (1..ctx.len()).collect();
    let mut s = Search {
        ctx,
        oracle,
        caps,
        gens: gens.clone(),
        tests: Vec::new(),
        test_set: FxHashSet::default(),
        sig_cache: FxHashMap::default(),
        evidence: Evidence::default(),
    };
    s.add_test(Sparse::new());
    for &g in &gens {
        s.add_test(unit(g));
    }
    for t in seed {
        s.add_test(t);
    }
    s.run()
}

/// Tries to keep a verified quotient `m` when component `c` (the last one)
/// joins the context. `reps[y]` is a position of class `y` built from the
/// earlier components. Since `m` is reduced, at most one element matches the
/// outcomes of `c + reps[y]`; it is accepted only if the certification
/// automaton holds for the extended map.
pub(crate) fn extend_quotient(
    ctx: &ClosedContext,
    oracle: &mut OutcomeOracle,
    m: &BipartiteMonoid,
    phi: &[usize],
    reps: &[Sparse],
    max_states: usize,
) -> Result<Option<usize>, QuotientError> {
    let c = phi.len();
    debug_assert_eq!(c + 1, ctx.len());
    let star = ctx.star();
    let mut truth = Vec::with_capacity(reps.len());
    for r in reps {
        truth.push(oracle.is_p(ctx, &add(r, &unit(c), star))?);
    }
    let Some(x) = (0..m.size()).find(|&x| (0..m.size()).all(|y| m.is_p(m.mul(x, y)) == truth[y])) else {
        return Ok(None);
    };
    let mut ext = phi.to_vec();
    ext.push(x);
    let image_of = |s: &Sparse| {
        s.iter()
            .fold(m.identity(), |acc, &(d, e)| m.mul(acc, m.pow(ext[d as usize], e as u64)))
    };
    let types = component_types(
        m,
        1..ctx.len(),
        |d| ext[d],
        |d| ctx.sparse_options(d).iter().map(image_of).collect(),
    );
    Ok(match certify(m, &types, max_states) {
        Certification::Holds { .. } => Some(x),
        _ => None,
    })
}

/// Search against a context whose leading components are already solved.
pub(crate) fn search_with_cover(
    ctx: &ClosedContext,
    oracle: &mut OutcomeOracle,
    caps: QuotientCaps,
    seed: Vec<Sparse>,
    cover: Option<Cover>,
) -> Result<(QuotientResult, Vec<Sparse>), QuotientError> {
    oracle.set_cover(cover);
    let out = search(ctx, oracle, caps, seed);
    oracle.set_cover(None);
    out
}
