//! Random finite bipartite monoids and random surjective quotients of them.

use rand::seq::SliceRandom;
use rand::Rng;

use super::BipartiteMonoid;

/// Raw commutative monoid table with identity 0.
struct Table {
    size: usize,
    cells: Vec<u32>,
}

impl Table {
    fn mul(&self, x: usize, y: usize) -> usize {
        self.cells[x * self.size + y] as usize
    }
}

/// Cyclic monoid `{1, x, ..., x^(i+p-1)}` with `x^(i+p) = x^i`.
fn cyclic(index: usize, period: usize) -> Table {
    let size = index + period;
    let reduce = |k: usize| if k < size { k } else { index + (k - index) % period };
    let cells = (0..size)
        .flat_map(|a| (0..size).map(move |b| reduce(a + b) as u32))
        .collect();
    Table { size, cells }
}

fn direct_product(a: &Table, b: &Table) -> Table {
    let size = a.size * b.size;
    let mut cells = Vec::with_capacity(size * size);
    for x in 0..size {
        let (xa, xb) = (x / b.size, x % b.size);
        for y in 0..size {
            let (ya, yb) = (y / b.size, y % b.size);
            cells.push((a.mul(xa, ya) * b.size + b.mul(xb, yb)) as u32);
        }
    }
    Table { size, cells }
}

fn random_table<R: Rng>(rng: &mut R, max_size: usize) -> Table {
    let mut t = Table {
        size: 1,
        cells: vec![0],
    };
    for _ in 0..3 {
        let index = rng.gen_range(0..=2);
        let period = rng.gen_range(1..=3);
        if t.size * (index + period) > max_size {
            break;
        }
        t = direct_product(&t, &cyclic(index, period));
    }
    t
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut root = x;
    while parent[root] != root {
        root = parent[root];
    }
    let mut y = x;
    while parent[y] != root {
        let next = parent[y];
        parent[y] = root;
        y = next;
    }
    root
}

/// Smallest congruence containing `pairs`: class index for each element.
fn congruence_closure(t: &Table, pairs: &[(usize, usize)]) -> Vec<usize> {
    let n = t.size;
    let mut parent: Vec<usize> = (0..n).collect();
    for &(x, y) in pairs {
        let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
        parent[rx] = ry;
    }
    loop {
        let mut changed = false;
        for x in 0..n {
            let rx = find(&mut parent, x);
            for g in 0..n {
                let (a, b) = (t.mul(x, g), t.mul(rx, g));
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra] = rb;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut class = vec![usize::MAX; n];
    let mut next = 0;
    let mut out = vec![0; n];
    for x in 0..n {
        let r = find(&mut parent, x);
        if class[r] == usize::MAX {
            class[r] = next;
            next += 1;
        }
        out[x] = class[r];
    }
    out
}

/// A random monoid `M` of order at most `max_size`, a random surjective
/// bipartite homomorphism `f: M -> S`, and `S`.
///
/// `M` is a product of cyclic monoids, `S` its quotient by a congruence
/// generated from a few random pairs, and `P` is pulled back from a random
/// subset of `S`, so `f` preserves `P` in both directions.
pub fn random_quotient_pair<R: Rng>(
    rng: &mut R,
    max_size: usize,
) -> (BipartiteMonoid, BipartiteMonoid, Vec<usize>) {
    let t = random_table(rng, max_size.max(1));
    let n = t.size;
    let pair_count = rng.gen_range(0..=2);
    let pairs: Vec<(usize, usize)> = (0..pair_count)
        .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
        .collect();
    let f = congruence_closure(&t, &pairs);
    let k = f.iter().max().map_or(1, |&c| c + 1);
    let mut reps = vec![usize::MAX; k];
    for x in (0..n).rev() {
        reps[f[x]] = x;
    }
    let mut s_cells = Vec::with_capacity(k * k);
    for &x in &reps {
        for &y in &reps {
            s_cells.push(f[t.mul(x, y)] as u32);
        }
    }
    let mut s_p: Vec<usize> = (0..k).filter(|_| rng.gen_bool(0.4)).collect();
    s_p.shuffle(rng);
    let m_p: Vec<usize> = (0..n).filter(|&x| s_p.contains(&f[x])).collect();
    let m = BipartiteMonoid::new(n, t.cells, 0, m_p, None).expect("product of cyclic monoids");
    let s = BipartiteMonoid::new(k, s_cells, f[0], s_p, None).expect("quotient by a congruence");
    (m, s, f)
}

/// A random bipartite monoid of order at most `max_size`.
pub fn random_monoid<R: Rng>(rng: &mut R, max_size: usize) -> BipartiteMonoid {
    random_quotient_pair(rng, max_size).1
}
