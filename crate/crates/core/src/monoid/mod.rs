//! Finite commutative bipartite monoids stored as Cayley tables.

mod iso;
mod named;
mod presentation;
pub mod random;
mod structure;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use iso::{classify_tame, iso, ISO_SIZE_LIMIT};
pub use named::{make_r8, make_tn, MAX_TN};
pub use presentation::{check_presentation, Presentation, Word};
pub use structure::{structure_report, ArchimedeanComponent, IdempotentLattice, StructureReport};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MonoidError {
    #[error("monoid must have at least one element")]
    Empty,
    #[error("table has {got} entries, expected {expected}")]
    TableShape { expected: usize, got: usize },
    #[error("table entry {value} at ({x}, {y}) is out of range")]
    OutOfRange { x: usize, y: usize, value: usize },
    #[error("element {0} is not a valid identity")]
    Identity(usize),
    #[error("not commutative: {x}*{y} != {y}*{x}")]
    NotCommutative { x: usize, y: usize },
    #[error("not associative: ({x}*{y})*{w} != {x}*({y}*{w})")]
    NotAssociative { x: usize, y: usize, w: usize },
    #[error("P contains out-of-range element {0}")]
    BadP(usize),
    #[error("{got} labels given for {size} elements")]
    Labels { size: usize, got: usize },
    #[error("size {size} exceeds the limit of {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("presentation syntax: {0}")]
    Presentation(String),
    #[error("{got} generator images given for {expected} generators")]
    GeneratorCount { expected: usize, got: usize },
}

/// A commutative monoid with a distinguished subset `P`.
///
/// Construction validates closure, identity, commutativity and associativity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteMonoid {
    size: usize,
    table: Vec<u32>,
    identity: usize,
    p: Vec<bool>,
    labels: Option<Vec<String>>,
}

impl BipartiteMonoid {
    pub fn new(
        size: usize,
        table: Vec<u32>,
        identity: usize,
        p: impl IntoIterator<Item = usize>,
        labels: Option<Vec<String>>,
    ) -> Result<Self, MonoidError> {
        if size == 0 {
            return Err(MonoidError::Empty);
        }
        if table.len() != size * size {
            return Err(MonoidError::TableShape {
                expected: size * size,
                got: table.len(),
            });
        }
        for x in 0..size {
            for y in 0..size {
                let v = table[x * size + y] as usize;
                if v >= size {
                    return Err(MonoidError::OutOfRange { x, y, value: v });
                }
            }
        }
        if identity >= size {
            return Err(MonoidError::Identity(identity));
        }
        let mut flags = vec![false; size];
        for x in p {
            if x >= size {
                return Err(MonoidError::BadP(x));
            }
            flags[x] = true;
        }
        if let Some(l) = &labels {
            if l.len() != size {
                return Err(MonoidError::Labels {
                    size,
                    got: l.len(),
                });
            }
        }
        let m = BipartiteMonoid {
            size,
            table,
            identity,
            p: flags,
            labels,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<(), MonoidError> {
        let n = self.size;
        for x in 0..n {
            if self.mul(self.identity, x) != x {
                return Err(MonoidError::Identity(self.identity));
            }
            for y in x + 1..n {
                if self.mul(x, y) != self.mul(y, x) {
                    return Err(MonoidError::NotCommutative { x, y });
                }
            }
        }
        // Light's test: associativity only needs checking with a generator
        // in the middle position.
        for g in self.generating_set() {
            for x in 0..n {
                let xg = self.mul(x, g);
                for y in 0..n {
                    if self.mul(xg, y) != self.mul(x, self.mul(g, y)) {
                        return Err(MonoidError::NotAssociative { x, y: g, w: y });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x * self.size + y] as usize
    }

    pub fn is_p(&self, x: usize) -> bool {
        self.p[x]
    }

    pub fn p_elements(&self) -> Vec<usize> {
        (0..self.size).filter(|&x| self.p[x]).collect()
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, x: usize) -> String {
        match &self.labels {
            Some(l) => l[x].clone(),
            None => x.to_string(),
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, MonoidError> {
        if labels.len() != self.size {
            return Err(MonoidError::Labels {
                size: self.size,
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Looks up an element by label.
    pub fn element(&self, label: &str) -> Option<usize> {
        self.labels.as_ref()?.iter().position(|l| l == label)
    }

    pub fn product<I: IntoIterator<Item = usize>>(&self, xs: I) -> usize {
        xs.into_iter().fold(self.identity, |acc, x| self.mul(acc, x))
    }

    pub fn pow(&self, x: usize, k: u64) -> usize {
        let mut acc = self.identity;
        for _ in 0..k {
            acc = self.mul(acc, x);
        }
        acc
    }

    pub fn is_idempotent(&self, x: usize) -> bool {
        self.mul(x, x) == x
    }

    /// Index and period of the cyclic subsemigroup `x, x^2, ...`: the least
    /// `i >= 1, p >= 1` with `x^(i+p) = x^i`.
    pub fn index_period(&self, x: usize) -> (usize, usize) {
        let mut first_seen = vec![usize::MAX; self.size];
        let mut power = x;
        let mut e = 1;
        loop {
            if first_seen[power] != usize::MAX {
                let i = first_seen[power];
                return (i, e - i);
            }
            first_seen[power] = e;
            power = self.mul(power, x);
            e += 1;
        }
    }

    /// Submonoid generated by `gens`, as a membership vector.
    pub fn generated(&self, gens: &[usize]) -> Vec<bool> {
        let mut member = vec![false; self.size];
        member[self.identity] = true;
        let mut queue = vec![self.identity];
        while let Some(x) = queue.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !member[y] {
                    member[y] = true;
                    queue.push(y);
                }
            }
        }
        member
    }

    /// A generating set chosen greedily in element order.
    pub fn generating_set(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut member = self.generated(&gens);
        for x in 0..self.size {
            if !member[x] {
                gens.push(x);
                member = self.generated(&gens);
            }
        }
        gens
    }

    /// True iff `xz in P <=> yz in P` for every `z`.
    pub fn indistinguishable(&self, x: usize, y: usize) -> bool {
        (0..self.size).all(|z| self.p[self.mul(x, z)] == self.p[self.mul(y, z)])
    }

    fn signatures(&self) -> Vec<Vec<u64>> {
        let words = self.size.div_ceil(64);
        (0..self.size)
            .map(|x| {
                let mut sig = vec![0u64; words];
                for z in 0..self.size {
                    if self.p[self.mul(x, z)] {
                        sig[z / 64] |= 1 << (z % 64);
                    }
                }
                sig
            })
            .collect()
    }

    pub fn is_reduced(&self) -> bool {
        let sigs = self.signatures();
        let mut sorted: Vec<&Vec<u64>> = sigs.iter().collect();
        sorted.sort();
        sorted.windows(2).all(|w| w[0] != w[1])
    }

    /// Quotient by indistinguishability, with the projection from `self`.
    /// Classes are numbered by their smallest member.
    pub fn reduce(&self) -> (BipartiteMonoid, Vec<usize>) {
        let sigs = self.signatures();
        let mut class_of = vec![usize::MAX; self.size];
        let mut reps: Vec<usize> = Vec::new();
        let mut by_sig: std::collections::HashMap<&Vec<u64>, usize> = Default::default();
        for x in 0..self.size {
            let c = *by_sig.entry(&sigs[x]).or_insert_with(|| {
                reps.push(x);
                reps.len() - 1
            });
            class_of[x] = c;
        }
        let k = reps.len();
        let mut table = Vec::with_capacity(k * k);
        for &rx in &reps {
            for &ry in &reps {
                table.push(class_of[self.mul(rx, ry)] as u32);
            }
        }
        let p = (0..k).filter(|&c| self.p[reps[c]]);
        let labels = self
            .labels
            .as_ref()
            .map(|l| reps.iter().map(|&r| l[r].clone()).collect());
        let reduced = BipartiteMonoid::new(k, table, class_of[self.identity], p, labels)
            .expect("reduction of a valid bipartite monoid is valid");
        (reduced, class_of)
    }

    /// Relabels elements: element `x` of `self` becomes `perm[x]`.
    pub fn permuted(&self, perm: &[usize]) -> BipartiteMonoid {
        let n = self.size;
        let mut table = vec![0u32; n * n];
        for x in 0..n {
            for y in 0..n {
                table[perm[x] * n + perm[y]] = perm[self.mul(x, y)] as u32;
            }
        }
        let labels = self.labels.as_ref().map(|l| {
            let mut out = vec![String::new(); n];
            for x in 0..n {
                out[perm[x]] = l[x].clone();
            }
            out
        });
        BipartiteMonoid::new(
            n,
            table,
            perm[self.identity],
            (0..n).filter(|&x| self.p[x]).map(|x| perm[x]),
            labels,
        )
        .expect("permutation preserves validity")
    }

    /// Checks that `f` (indexed by elements of `self`) is a bipartite monoid
    /// homomorphism into `target`.
    pub fn is_homomorphism(&self, target: &BipartiteMonoid, f: &[usize]) -> bool {
        f.len() == self.size
            && f[self.identity] == target.identity
            && (0..self.size).all(|x| self.p[x] == target.p[f[x]])
            && (0..self.size)
                .all(|x| (0..self.size).all(|y| f[self.mul(x, y)] == target.mul(f[x], f[y])))
    }
}

/// JSON form: `{size, identity, table (row-major), P (sorted indices), labels}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonoidJson {
    pub size: usize,
    pub identity: usize,
    pub table: Vec<u32>,
    #[serde(rename = "P")]
    pub p: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl From<&BipartiteMonoid> for MonoidJson {
    fn from(m: &BipartiteMonoid) -> Self {
        MonoidJson {
            size: m.size,
            identity: m.identity,
            table: m.table.clone(),
            p: m.p_elements(),
            labels: m.labels.clone(),
        }
    }
}

impl TryFrom<MonoidJson> for BipartiteMonoid {
    type Error = MonoidError;

    fn try_from(j: MonoidJson) -> Result<Self, Self::Error> {
        BipartiteMonoid::new(j.size, j.table, j.identity, j.p, j.labels)
    }
}

impl Serialize for BipartiteMonoid {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MonoidJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BipartiteMonoid {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let j = MonoidJson::deserialize(deserializer)?;
        BipartiteMonoid::try_from(j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Klein four-group {1, a, b, ab} with P = {a, b}.
    pub(crate) fn klein() -> BipartiteMonoid {
        let table = (0..4u32)
            .flat_map(|x| (0..4u32).map(move |y| x ^ y))
            .collect();
        BipartiteMonoid::new(4, table, 0, [1, 2], None).unwrap()
    }

    #[test]
    fn validation_rejects_bad_tables() {
        assert_eq!(
            BipartiteMonoid::new(0, vec![], 0, [], None),
            Err(MonoidError::Empty)
        );
        assert!(matches!(
            BipartiteMonoid::new(2, vec![0, 1, 1], 0, [], None),
            Err(MonoidError::TableShape { .. })
        ));
        // Left-zero style table: not commutative.
        assert!(matches!(
            BipartiteMonoid::new(3, vec![0, 1, 2, 1, 1, 1, 2, 2, 1], 0, [], None),
            Err(MonoidError::NotCommutative { .. })
        ));
        assert!(matches!(
            BipartiteMonoid::new(2, vec![0, 1, 1, 1], 1, [], None),
            Err(MonoidError::Identity(1))
        ));
        assert!(matches!(
            BipartiteMonoid::new(2, vec![0, 1, 1, 0], 0, [2], None),
            Err(MonoidError::BadP(2))
        ));
        // Commutative with identity 0, but (1*1)*2 = 2*2 = 1 while 1*(1*2) = 1*1 = 2.
        let t = vec![0, 1, 2, 1, 2, 1, 2, 1, 1];
        assert!(matches!(
            BipartiteMonoid::new(3, t, 0, [], None),
            Err(MonoidError::NotAssociative { .. })
        ));
    }

    #[test]
    fn klein_reduces_to_two_elements() {
        let m = klein();
        assert!(m.indistinguishable(1, 2));
        assert!(m.indistinguishable(0, 3));
        assert!(!m.indistinguishable(0, 1));
        assert!(!m.is_reduced());
        let (r, proj) = m.reduce();
        assert_eq!(r.size(), 2);
        assert_eq!(proj, vec![0, 1, 1, 0]);
        assert!(r.is_reduced());
        assert_eq!(r.p_elements(), vec![1]);
        assert_eq!(r.mul(1, 1), r.identity());
        assert!(m.is_homomorphism(&r, &proj));
    }

    #[test]
    fn trivial_monoid_is_reduced() {
        let m = BipartiteMonoid::new(1, vec![0], 0, [], None).unwrap();
        assert!(m.is_reduced());
        assert_eq!(m.reduce().0, m);
    }

    #[test]
    fn index_and_period() {
        let t2 = make_tn(2).unwrap();
        let b = t2.element("b").unwrap();
        assert_eq!(t2.index_period(b), (1, 2));
        let a = t2.element("a").unwrap();
        assert_eq!(t2.index_period(a), (1, 2));
        assert_eq!(t2.index_period(t2.identity()), (1, 1));
        let r8 = make_r8();
        let t = r8.element("t").unwrap();
        assert_eq!(r8.index_period(t), (2, 1));
    }

    #[test]
    fn json_round_trip() {
        let t2 = make_tn(2).unwrap();
        let text = serde_json::to_string(&t2).unwrap();
        assert!(text.contains("\"P\""));
        let back: BipartiteMonoid = serde_json::from_str(&text).unwrap();
        assert_eq!(back, t2);
        let bad = r#"{"size":2,"identity":0,"table":[0,1,1,1],"P":[1]}"#;
        assert!(serde_json::from_str::<BipartiteMonoid>(bad).is_ok());
        let bad = r#"{"size":2,"identity":1,"table":[0,1,1,1],"P":[1]}"#;
        assert!(serde_json::from_str::<BipartiteMonoid>(bad).is_err());
    }
}
