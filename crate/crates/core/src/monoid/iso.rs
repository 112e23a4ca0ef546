//! Isomorphism search for bipartite monoids.

use super::{make_tn, BipartiteMonoid, MonoidError, MAX_TN};

/// Largest monoid order accepted by [`iso`].
pub const ISO_SIZE_LIMIT: usize = 512;

/// Per-element invariants that any isomorphism must preserve.
fn invariants(m: &BipartiteMonoid) -> Vec<(bool, bool, usize, usize, usize)> {
    let n = m.size();
    (0..n)
        .map(|x| {
            let (index, period) = m.index_period(x);
            let p_multiples = (0..n).filter(|&y| m.is_p(m.mul(x, y))).count();
            (m.is_p(x), m.is_idempotent(x), index, period, p_multiples)
        })
        .collect()
}

struct Search<'a> {
    m1: &'a BipartiteMonoid,
    m2: &'a BipartiteMonoid,
    inv1: Vec<(bool, bool, usize, usize, usize)>,
    inv2: Vec<(bool, bool, usize, usize, usize)>,
    gens: Vec<usize>,
}

impl Search<'_> {
    /// Extends `gens[i] -> images[i]` to the generated submonoid, or fails
    /// on a conflict.
    fn propagate(&self, images: &[usize]) -> Option<Vec<usize>> {
        let n = self.m1.size();
        let mut f = vec![usize::MAX; n];
        let mut used = vec![false; n];
        f[self.m1.identity()] = self.m2.identity();
        used[self.m2.identity()] = true;
        let mut queue = vec![self.m1.identity()];
        while let Some(x) = queue.pop() {
            for (&g, &h) in self.gens.iter().zip(images) {
                let y = self.m1.mul(x, g);
                let fy = self.m2.mul(f[x], h);
                if f[y] == usize::MAX {
                    if used[fy] || self.inv1[y] != self.inv2[fy] {
                        return None;
                    }
                    f[y] = fy;
                    used[fy] = true;
                    queue.push(y);
                } else if f[y] != fy {
                    return None;
                }
            }
        }
        Some(f)
    }

    fn run(&self, images: &mut Vec<usize>) -> Option<Vec<usize>> {
        let f = self.propagate(images)?;
        if images.len() == self.gens.len() {
            return self.m1.is_homomorphism(self.m2, &f).then_some(f);
        }
        let g = self.gens[images.len()];
        for h in 0..self.m2.size() {
            if self.inv1[g] != self.inv2[h] {
                continue;
            }
            images.push(h);
            if let Some(found) = self.run(images) {
                return Some(found);
            }
            images.pop();
        }
        None
    }
}

/// Finds a bijection `f` with `f(xy) = f(x)f(y)`, `f(1) = 1` and
/// `x in P <=> f(x) in P`, if one exists.
pub fn iso(m1: &BipartiteMonoid, m2: &BipartiteMonoid) -> Result<Option<Vec<usize>>, MonoidError> {
    for m in [m1, m2] {
        if m.size() > ISO_SIZE_LIMIT {
            return Err(MonoidError::TooLarge {
                size: m.size(),
                limit: ISO_SIZE_LIMIT,
            });
        }
    }
    if m1.size() != m2.size() {
        return Ok(None);
    }
    let inv1 = invariants(m1);
    let inv2 = invariants(m2);
    let mut s1 = inv1.clone();
    let mut s2 = inv2.clone();
    s1.sort_unstable();
    s2.sort_unstable();
    if s1 != s2 {
        return Ok(None);
    }
    let search = Search {
        m1,
        m2,
        inv1,
        inv2,
        gens: m1.generating_set(),
    };
    Ok(search.run(&mut Vec::new()))
}

/// Returns `n` when `m` is isomorphic to `T_n`.
pub fn classify_tame(m: &BipartiteMonoid) -> Option<u32> {
    let n = match m.size() {
        1 => 0,
        2 => 1,
        s => {
            let k = s.checked_sub(2)?;
            if !k.is_power_of_two() || k < 4 {
                return None;
            }
            k.trailing_zeros()
        }
    };
    if n > MAX_TN {
        return None;
    }
    let tn = make_tn(n).ok()?;
    iso(m, &tn).ok().flatten().map(|_| n)
}
