//! Memoized misère outcomes of positions in a closed context.

use std::io::{Read, Write};

use rustc_hash::FxHashMap;

use super::context::{reduce_star, ClosedContext, Position, Sparse};
use super::QuotientError;
use crate::games::Outcome;
use crate::monoid::BipartiteMonoid;

pub const MEMO_MAGIC: &[u8; 6] = b"MQMEMO";
pub const MEMO_VERSION: u32 = 1;

/// A verified quotient of the first `covered` components. Positions built
/// only from those components are answered by a table lookup.
#[derive(Debug, Clone)]
pub struct Cover {
    pub monoid: BipartiteMonoid,
    /// Quotient map on components `0..covered`.
    pub phi: Vec<usize>,
    /// When set, the covered part of every position is replaced by the
    /// representative of its class. Outcomes are then only a guess (classes
    /// may split once more components join) and need certifying.
    pub(crate) canonical: Option<Vec<Sparse>>,
}

impl Cover {
    pub fn new(monoid: BipartiteMonoid, phi: Vec<usize>) -> Self {
        Cover {
            monoid,
            phi,
            canonical: None,
        }
    }

    fn image(&self, s: &[(u16, u16)]) -> usize {
        let m = &self.monoid;
        s.iter()
            .fold(m.identity(), |acc, &(c, e)| m.mul(acc, m.pow(self.phi[c as usize], e as u64)))
    }

    fn canonicalize(&self, s: Sparse, star: Option<usize>) -> Sparse {
        let Some(reps) = &self.canonical else { return s };
        let split = s.partition_point(|&(c, _)| (c as usize) < self.phi.len());
        if split == s.len() {
            return s;
        }
        let rep = &reps[self.image(&s[..split])];
        if s[..split] == rep[..] {
            return s;
        }
        add(rep, &Sparse::from_slice(&s[split..]), star)
    }

    fn covers(&self, s: &Sparse) -> bool {
        s.last().is_none_or(|&(c, _)| (c as usize) < self.phi.len())
    }

    fn is_p(&self, s: &Sparse) -> bool {
        self.monoid.is_p(self.image(s))
    }
}

/// `a + b` for sparse vectors, with `*` reduced mod 2.
pub(crate) fn add(a: &Sparse, b: &Sparse, star: Option<usize>) -> Sparse {
    let mut out = Sparse::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push(b[j]);
            j += 1;
        } else {
            out.push((a[i].0, a[i].1 + b[j].1));
            i += 1;
            j += 1;
        }
    }
    if let Some(star) = star {
        reduce_star(&mut out, star);
    }
    out
}

/// All options of a position.
fn options_of(ctx: &ClosedContext, s: &Sparse) -> Vec<Sparse> {
    let star = ctx.star();
    let mut out = Vec::new();
    for (i, &(c, e)) in s.iter().enumerate() {
        let mut rest = s.clone();
        if e == 1 {
            rest.remove(i);
        } else {
            rest[i].1 = e - 1;
        }
        for o in ctx.sparse_options(c as usize) {
            out.push(add(&rest, o, star));
        }
    }
    out
}

struct Frame {
    key: Sparse,
    options: Vec<Sparse>,
    next: usize,
}

/// Misère outcome oracle with a memo keyed by canonical exponent vectors.
#[derive(Debug, Clone)]
pub struct OutcomeOracle {
    memo: FxHashMap<Sparse, bool>,
    cover: Option<Cover>,
    cap: usize,
    evaluations: u64,
}

impl OutcomeOracle {
    pub fn new(cap: usize) -> Self {
        OutcomeOracle {
            memo: FxHashMap::default(),
            cover: None,
            cap,
            evaluations: 0,
        }
    }

    pub fn set_cover(&mut self, cover: Option<Cover>) {
        self.cover = cover;
    }

    pub fn set_cap(&mut self, cap: usize) {
        self.cap = cap;
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    /// Number of positions whose outcome was derived by search.
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    fn lookup(&self, s: &Sparse) -> Option<bool> {
        if s.is_empty() {
            return Some(false);
        }
        if let Some(&v) = self.memo.get(s) {
            return Some(v);
        }
        match &self.cover {
            Some(cover) if cover.covers(s) => Some(cover.is_p(s)),
            _ => None,
        }
    }

    fn store(&mut self, key: Sparse, value: bool) -> Result<(), QuotientError> {
        if self.memo.len() >= self.cap {
            return Err(QuotientError::MemoCapacity { cap: self.cap });
        }
        self.evaluations += 1;
        self.memo.insert(key, value);
        Ok(())
    }

    /// Misère outcome of a dense position.
    pub fn outcome(&mut self, ctx: &ClosedContext, pos: &Position) -> Result<Outcome, QuotientError> {
        let s = ctx.to_sparse(pos)?;
        Ok(Outcome::from_is_p(self.is_p(ctx, &s)?))
    }

    /// True iff the canonical position `root` is a misère P-position.
    pub(crate) fn is_p(&mut self, ctx: &ClosedContext, root: &Sparse) -> Result<bool, QuotientError> {
        let root = &self.canonical(root.clone(), ctx.star());
        if let Some(v) = self.lookup(root) {
            return Ok(v);
        }
        let mut stack = vec![self.frame(ctx, root.clone())];
        while let Some(top) = stack.last_mut() {
            if top.next == top.options.len() {
                // Every option is N (or there are none, and then it is N).
                let value = !top.options.is_empty();
                let frame = stack.pop().expect("nonempty stack");
                self.store(frame.key, value)?;
                continue;
            }
            match self.lookup(&top.options[top.next]) {
                Some(true) => {
                    let frame = stack.pop().expect("nonempty stack");
                    self.store(frame.key, false)?;
                }
                Some(false) => top.next += 1,
                None => {
                    let child = top.options[top.next].clone();
                    let frame = self.frame(ctx, child);
                    stack.push(frame);
                }
            }
        }
        Ok(self.lookup(root).expect("root was evaluated"))
    }

    fn canonical(&self, s: Sparse, star: Option<usize>) -> Sparse {
        match &self.cover {
            Some(cover) => cover.canonicalize(s, star),
            None => s,
        }
    }

    fn frame(&self, ctx: &ClosedContext, key: Sparse) -> Frame {
        let star = ctx.star();
        let mut options: Vec<Sparse> = options_of(ctx, &key)
            .into_iter()
            .map(|o| self.canonical(o, star))
            .collect();
        // Try options with a known outcome first: a known P option settles it.
        options.sort_by_key(|o| match self.lookup(o) {
            Some(true) => 0,
            None => 1,
            Some(false) => 2,
        });
        Frame {
            key,
            options,
            next: 0,
        }
    }

    /// Writes the memo as `MQMEMO`, version, fingerprint, count, then per
    /// entry: length, `(component, exponent)` pairs and the outcome byte.
    pub fn write_snapshot<W: Write>(&self, w: &mut W, fingerprint: u64) -> Result<(), QuotientError> {
        w.write_all(MEMO_MAGIC)?;
        w.write_all(&MEMO_VERSION.to_le_bytes())?;
        w.write_all(&fingerprint.to_le_bytes())?;
        w.write_all(&(self.memo.len() as u64).to_le_bytes())?;
        let mut entries: Vec<(&Sparse, &bool)> = self.memo.iter().collect();
        entries.sort();
        for (key, &value) in entries {
            w.write_all(&(key.len() as u16).to_le_bytes())?;
            for &(c, e) in key {
                w.write_all(&c.to_le_bytes())?;
                w.write_all(&e.to_le_bytes())?;
            }
            w.write_all(&[value as u8])?;
        }
        Ok(())
    }

    /// Loads entries written by [`Self::write_snapshot`]. Returns the number
    /// of entries read; a snapshot for a different context is rejected.
    pub fn read_snapshot<R: Read>(&mut self, r: &mut R, fingerprint: u64) -> Result<usize, QuotientError> {
        let mut magic = [0u8; 6];
        r.read_exact(&mut magic)?;
        if &magic != MEMO_MAGIC {
            return Err(QuotientError::Snapshot("bad magic".into()));
        }
        let version = u32::from_le_bytes(read_array(r)?);
        if version != MEMO_VERSION {
            return Err(QuotientError::Snapshot(format!("unsupported version {version}")));
        }
        if u64::from_le_bytes(read_array(r)?) != fingerprint {
            return Err(QuotientError::Snapshot("fingerprint mismatch".into()));
        }
        let count = u64::from_le_bytes(read_array(r)?) as usize;
        for _ in 0..count {
            let len = u16::from_le_bytes(read_array(r)?) as usize;
            let mut key = Sparse::with_capacity(len);
            for _ in 0..len {
                let c = u16::from_le_bytes(read_array(r)?);
                let e = u16::from_le_bytes(read_array(r)?);
                key.push((c, e));
            }
            let [value] = read_array::<1, _>(r)?;
            self.memo.insert(key, value != 0);
        }
        Ok(count)
    }
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N], QuotientError> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}
