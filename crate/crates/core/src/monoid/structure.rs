//! Idempotents, mutual divisibility, the kernel group, Archimedean
//! components and the idempotent lattice of a finite commutative monoid.

use std::collections::BTreeMap;

use serde::Serialize;

use super::BipartiteMonoid;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArchimedeanComponent {
    pub idempotent: usize,
    pub elements: Vec<usize>,
    /// How many elements of the component lie in the m.d. class of its idempotent.
    pub group_part: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdempotentLattice {
    pub elements: Vec<usize>,
    /// `leq[i][j]` iff `elements[i] <= elements[j]`, i.e. their product is `elements[i]`.
    pub leq: Vec<Vec<bool>>,
    /// Indices into `elements`.
    pub meet: Vec<Vec<usize>>,
    pub join: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub idempotents: Vec<usize>,
    /// Product of all idempotents.
    pub z: usize,
    /// The m.d. class of `z`.
    pub kernel: Vec<usize>,
    /// Cayley table of the kernel, indexed by position in `kernel`.
    pub kernel_table: Vec<Vec<usize>>,
    /// Kernel isomorphism type as prime-power cyclic orders, ascending.
    pub kernel_type: Vec<u64>,
    pub md_classes: Vec<Vec<usize>>,
    pub archimedean_components: Vec<ArchimedeanComponent>,
    pub lattice: IdempotentLattice,
    pub kernel_is_group: bool,
    /// `x -> zx` is a homomorphism onto the kernel.
    pub zx_maps_onto_kernel: bool,
    pub kernel_meets_p: bool,
    pub is_normal: bool,
    pub is_regular: bool,
    /// Number of maximal subgroups (m.d. classes of idempotents).
    pub maximal_subgroups: usize,
    /// How many of those meet `P`. Reported only; nothing is asserted.
    pub maximal_subgroups_meeting_p: usize,
}

impl StructureReport {
    /// Finds the m.d. class containing `x`.
    pub fn md_class_of(&self, x: usize) -> &[usize] {
        self.md_classes
            .iter()
            .find(|c| c.contains(&x))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }
}

/// Principal ideal `xQ` of each element as a bitset.
fn principal_ideals(m: &BipartiteMonoid) -> Vec<Vec<u64>> {
    let n = m.size();
    let words = n.div_ceil(64);
    (0..n)
        .map(|x| {
            let mut ideal = vec![0u64; words];
            for y in 0..n {
                let v = m.mul(x, y);
                ideal[v / 64] |= 1 << (v % 64);
            }
            ideal
        })
        .collect()
}

/// Unique idempotent power of `x`.
pub(crate) fn idempotent_power(m: &BipartiteMonoid, x: usize) -> usize {
    let mut power = x;
    loop {
        if m.is_idempotent(power) {
            return power;
        }
        power = m.mul(power, x);
    }
}

pub fn structure_report(m: &BipartiteMonoid) -> StructureReport {
    let n = m.size();
    let idempotents: Vec<usize> = (0..n).filter(|&x| m.is_idempotent(x)).collect();
    let z = m.product(idempotents.iter().copied());

    let ideals = principal_ideals(m);
    let mut classes: BTreeMap<&Vec<u64>, Vec<usize>> = BTreeMap::new();
    for x in 0..n {
        classes.entry(&ideals[x]).or_default().push(x);
    }
    let mut md_classes: Vec<Vec<usize>> = classes.into_values().collect();
    md_classes.sort();
    let class_index = |x: usize| md_classes.iter().position(|c| c.contains(&x)).unwrap();

    let kernel = md_classes[class_index(z)].clone();
    let pos_in_kernel = |x: usize| kernel.iter().position(|&k| k == x);
    let kernel_table: Vec<Vec<usize>> = kernel
        .iter()
        .map(|&x| {
            kernel
                .iter()
                .map(|&y| pos_in_kernel(m.mul(x, y)).unwrap_or(usize::MAX))
                .collect()
        })
        .collect();
    let kernel_is_group = kernel_table.iter().flatten().all(|&v| v != usize::MAX)
        && kernel.iter().all(|&x| m.mul(z, x) == x)
        && kernel
            .iter()
            .all(|&x| kernel.iter().any(|&y| m.mul(x, y) == z));
    let kernel_type = if kernel_is_group {
        abelian_type(m, &kernel, z)
    } else {
        Vec::new()
    };

    let zx: Vec<usize> = (0..n).map(|x| m.mul(z, x)).collect();
    let zx_maps_onto_kernel = zx.iter().all(|v| kernel.contains(v))
        && kernel.iter().all(|k| zx.contains(k))
        && (0..n).all(|x| (0..n).all(|y| zx[m.mul(x, y)] == m.mul(zx[x], zx[y])));

    let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for x in 0..n {
        comps.entry(idempotent_power(m, x)).or_default().push(x);
    }
    let archimedean_components = comps
        .into_iter()
        .map(|(e, elements)| {
            let group = &md_classes[class_index(e)];
            let group_part = elements.iter().filter(|x| group.contains(x)).count();
            ArchimedeanComponent {
                idempotent: e,
                elements,
                group_part,
            }
        })
        .collect();

    let lattice = idempotent_lattice(m, &idempotents);

    let kernel_p: Vec<usize> = kernel.iter().copied().filter(|&x| m.is_p(x)).collect();
    let maximal_subgroups_meeting_p = idempotents
        .iter()
        .filter(|&&e| md_classes[class_index(e)].iter().any(|&x| m.is_p(x)))
        .count();

    StructureReport {
        z,
        kernel_meets_p: !kernel_p.is_empty(),
        is_normal: kernel_p == [z],
        is_regular: kernel_p.len() == 1,
        maximal_subgroups: idempotents.len(),
        maximal_subgroups_meeting_p,
        idempotents,
        kernel,
        kernel_table,
        kernel_type,
        md_classes,
        archimedean_components,
        lattice,
        kernel_is_group,
        zx_maps_onto_kernel,
    }
}

fn idempotent_lattice(m: &BipartiteMonoid, idempotents: &[usize]) -> IdempotentLattice {
    let k = idempotents.len();
    let at = |x: usize| idempotents.iter().position(|&e| e == x).unwrap();
    let leq: Vec<Vec<bool>> = idempotents
        .iter()
        .map(|&x| idempotents.iter().map(|&y| m.mul(x, y) == x).collect())
        .collect();
    let meet = (0..k)
        .map(|i| (0..k).map(|j| at(m.mul(idempotents[i], idempotents[j]))).collect())
        .collect();
    let join = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let upper = (0..k).filter(|&w| leq[i][w] && leq[j][w]).map(|w| idempotents[w]);
                    at(m.product(upper))
                })
                .collect()
        })
        .collect();
    IdempotentLattice {
        elements: idempotents.to_vec(),
        leq,
        meet,
        join,
    }
}

fn element_order(m: &BipartiteMonoid, x: usize, identity: usize) -> u64 {
    let mut power = x;
    let mut order = 1;
    while power != identity {
        power = m.mul(power, x);
        order += 1;
    }
    order
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut primes = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            primes.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        primes.push(n);
    }
    primes
}

/// Elementary divisors of a finite abelian group given by its elements and identity.
fn abelian_type(m: &BipartiteMonoid, group: &[usize], identity: usize) -> Vec<u64> {
    let orders: Vec<u64> = group
        .iter()
        .map(|&x| element_order(m, x, identity))
        .collect();
    let mut divisors = Vec::new();
    for p in prime_factors(group.len() as u64) {
        // c[j] = log_p #{x : x^(p^j) = 1}; c[j] - c[j-1] counts factors of order >= p^j.
        let mut logs = vec![0u32];
        let mut pk = 1u64;
        loop {
            pk *= p;
            let count = orders.iter().filter(|&&o| pk.is_multiple_of(o)).count() as u64;
            let log = count.ilog(p);
            if log == *logs.last().unwrap() {
                break;
            }
            logs.push(log);
        }
        let at_least: Vec<u32> = logs.windows(2).map(|w| w[1] - w[0]).collect();
        for (j, &cnt) in at_least.iter().enumerate() {
            let next = at_least.get(j + 1).copied().unwrap_or(0);
            for _ in 0..cnt - next {
                divisors.push(p.pow(j as u32 + 1));
            }
        }
    }
    divisors.sort_unstable();
    divisors
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::{make_r8, make_tn};

    fn labels(m: &BipartiteMonoid, xs: &[usize]) -> Vec<String> {
        let mut l: Vec<String> = xs.iter().map(|&x| m.label(x)).collect();
        l.sort();
        l
    }

    #[test]
    fn t2_report() {
        let t2 = make_tn(2).unwrap();
        let r = structure_report(&t2);
        assert_eq!(labels(&t2, &r.idempotents), ["1", "b2"]);
        assert_eq!(t2.label(r.z), "b2");
        assert_eq!(labels(&t2, &r.kernel), ["ab", "ab2", "b", "b2"]);
        assert_eq!(r.kernel_type, vec![2, 2]);
        assert!(r.is_normal && r.is_regular && r.kernel_is_group && r.zx_maps_onto_kernel);
        let md: Vec<Vec<String>> = r.md_classes.iter().map(|c| labels(&t2, c)).collect();
        assert!(md.contains(&vec!["1".to_string(), "a".to_string()]));
        assert_eq!(md.len(), 2);
    }

    #[test]
    fn r8_report() {
        let r8 = make_r8();
        let r = structure_report(&r8);
        let md: Vec<Vec<String>> = r.md_classes.iter().map(|c| labels(&r8, c)).collect();
        assert_eq!(md.len(), 3);
        for class in [vec!["1", "a"], vec!["ab", "ab2", "b", "b2"], vec!["at", "t"]] {
            assert!(md.iter().any(|c| c == &class), "{class:?}");
        }
        let arch: Vec<Vec<String>> = r
            .archimedean_components
            .iter()
            .map(|c| labels(&r8, &c.elements))
            .collect();
        assert_eq!(arch.len(), 2);
        assert!(arch.contains(&vec!["1".into(), "a".into()]));
        assert!(arch.contains(
            &["ab", "ab2", "at", "b", "b2", "t"]
                .iter()
                .map(|s| s.to_string())
                .collect()
        ));
        let big = r.archimedean_components.iter().find(|c| c.elements.len() == 6).unwrap();
        assert_eq!(big.group_part, 4);
        assert_eq!(r.kernel_type, vec![2, 2]);
    }

    #[test]
    fn trivial_report() {
        let t0 = make_tn(0).unwrap();
        let r = structure_report(&t0);
        assert_eq!(r.kernel, vec![0]);
        assert_eq!(r.lattice.elements, vec![0]);
        assert!(r.kernel_type.is_empty());
        assert!(!r.kernel_meets_p);
    }

    #[test]
    fn t3_kernel_type() {
        let t3 = make_tn(3).unwrap();
        let r = structure_report(&t3);
        assert_eq!(r.kernel.len(), 8);
        assert_eq!(r.kernel_type, vec![2, 2, 2]);
    }

    #[test]
    fn cyclic_group_types() {
        // Z_12 = Z_4 x Z_3.
        let n = 12;
        let table = (0..n).flat_map(|x| (0..n).map(move |y| ((x + y) % n) as u32)).collect();
        let m = BipartiteMonoid::new(n, table, 0, [], None).unwrap();
        let r = structure_report(&m);
        assert_eq!(r.kernel_type, vec![3, 4]);
        assert_eq!(r.idempotents, vec![0]);
    }

    #[test]
    fn lattice_of_a_chain() {
        // {1, e, 0} with e idempotent: 0 <= e <= 1.
        let table = vec![0, 1, 2, 1, 1, 2, 2, 2, 2];
        let m = BipartiteMonoid::new(3, table, 0, [1], None).unwrap();
        let r = structure_report(&m);
        assert_eq!(r.idempotents, vec![0, 1, 2]);
        assert_eq!(r.z, 2);
        let l = &r.lattice;
        assert!(l.leq[2][1] && l.leq[1][0] && !l.leq[0][1]);
        assert_eq!(l.join[1][2], 1);
        assert_eq!(l.meet[0][1], 1);
    }
}
