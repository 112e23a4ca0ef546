use super::{BipartiteMonoid, MonoidError};

/// Largest `n` accepted by [`make_tn`] (`|T_10| = 1026`).
pub const MAX_TN: u32 = 10;

/// Generator letters after `a`: `b, c, d, ...` stand for `b_1, b_2, ...`.
fn letter(i: usize) -> char {
    (b'b' + i as u8) as char
}

/// The tame quotient `T_n`, i.e. the misère quotient of Nim heaps up to
/// `*2^(n-1)`: `<a, b_1..b_{n-1} | a^2 = 1, b_i^3 = b_i, b_1^2 = ... = b_{n-1}^2>`
/// with `P = {a, b_1^2}`.
///
/// Elements are enumerated in normal form `a^e * w` where `w` is `1` or a
/// kernel word: a nonempty product of distinct `b_i`, or `z = b_1^2`.
pub fn make_tn(n: u32) -> Result<BipartiteMonoid, MonoidError> {
    if n > MAX_TN {
        return Err(MonoidError::TooLarge {
            size: (1usize << n) + 2,
            limit: (1usize << MAX_TN) + 2,
        });
    }
    match n {
        0 => BipartiteMonoid::new(1, vec![0], 0, [], Some(vec!["1".into()])),
        1 => BipartiteMonoid::new(2, vec![0, 1, 1, 0], 0, [1], Some(vec!["1".into(), "a".into()])),
        _ => {
            let bits = (n - 1) as usize;
            // (a exponent, None for units or Some(subset of b's) for the kernel);
            // the empty subset in the kernel is z.
            let mut elems: Vec<(u8, Option<usize>)> = vec![(0, None), (1, None)];
            for s in (1..1usize << bits).chain(std::iter::once(0)) {
                elems.push((0, Some(s)));
                elems.push((1, Some(s)));
            }
            let index = |e: u8, s: Option<usize>| -> usize {
                match s {
                    None => e as usize,
                    Some(0) => elems.len() - 2 + e as usize,
                    Some(s) => 2 + 2 * (s - 1) + e as usize,
                }
            };
            let size = elems.len();
            let mut table = Vec::with_capacity(size * size);
            for &(e1, s1) in &elems {
                for &(e2, s2) in &elems {
                    let s = match (s1, s2) {
                        (None, None) => None,
                        (Some(s), None) | (None, Some(s)) => Some(s),
                        (Some(s), Some(t)) => Some(s ^ t),
                    };
                    table.push(index(e1 ^ e2, s) as u32);
                }
            }
            let first = letter(0);
            let labels = elems
                .iter()
                .map(|&(e, s)| {
                    let mut l = String::new();
                    if e == 1 {
                        l.push('a');
                    }
                    match s {
                        None if e == 0 => l.push('1'),
                        None => {}
                        Some(0) => {
                            l.push(first);
                            l.push('2');
                        }
                        Some(s) => {
                            for i in 0..bits {
                                if s >> i & 1 == 1 {
                                    l.push(letter(i));
                                }
                            }
                        }
                    }
                    l
                })
                .collect();
            let z = index(0, Some(0));
            BipartiteMonoid::new(size, table, 0, [1, z], Some(labels))
        }
    }
}

/// `R_8 = <a, b, t | a^2 = 1, b^3 = b, t^2 = b^2, bt = b>` with `P = {a, b^2}`.
pub fn make_r8() -> BipartiteMonoid {
    // Non-`a` part: 0 = 1, 1 = t, 2 = b, 3 = z (= b^2).
    const ONE: usize = 0;
    const T: usize = 1;
    const B: usize = 2;
    const Z: usize = 3;
    let core = |x: usize, y: usize| -> usize {
        match (x, y) {
            (ONE, v) | (v, ONE) => v,
            (T, T) => Z,
            (T, v) | (v, T) => v,
            (B, B) => Z,
            (B, Z) | (Z, B) => B,
            _ => Z,
        }
    };
    // Element order 1, a, b, ab, z, az, t, at.
    let elems: [(u8, usize); 8] = [
        (0, ONE),
        (1, ONE),
        (0, B),
        (1, B),
        (0, Z),
        (1, Z),
        (0, T),
        (1, T),
    ];
    let index = |e: u8, c: usize| elems.iter().position(|&x| x == (e, c)).unwrap();
    let mut table = Vec::with_capacity(64);
    for &(e1, c1) in &elems {
        for &(e2, c2) in &elems {
            table.push(index(e1 ^ e2, core(c1, c2)) as u32);
        }
    }
    let labels = ["1", "a", "b", "ab", "b2", "ab2", "t", "at"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    BipartiteMonoid::new(8, table, 0, [1, 4], Some(labels)).expect("R8 table is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tn_orders() {
        assert_eq!(make_tn(0).unwrap().size(), 1);
        assert_eq!(make_tn(1).unwrap().size(), 2);
        for n in 2..=6 {
            assert_eq!(make_tn(n).unwrap().size(), (1 << n) + 2);
        }
        assert!(make_tn(MAX_TN + 1).is_err());
    }

    #[test]
    fn t2_elements_and_p() {
        let t2 = make_tn(2).unwrap();
        let mut labels: Vec<_> = t2.labels().unwrap().to_vec();
        labels.sort();
        assert_eq!(labels, ["1", "a", "ab", "ab2", "b", "b2"]);
        let p: Vec<_> = t2.p_elements().iter().map(|&x| t2.label(x)).collect();
        assert_eq!(p, ["a", "b2"]);
        let a = t2.element("a").unwrap();
        let b = t2.element("b").unwrap();
        assert_eq!(t2.mul(a, a), t2.identity());
        assert_eq!(t2.pow(b, 3), b);
        assert_eq!(t2.mul(b, b), t2.element("b2").unwrap());
        assert!(t2.is_reduced());
    }

    #[test]
    fn t3_listing() {
        let t3 = make_tn(3).unwrap();
        assert_eq!(t3.size(), 10);
        let b = t3.element("b").unwrap();
        let c = t3.element("c").unwrap();
        assert_eq!(t3.mul(b, b), t3.mul(c, c));
        assert_eq!(t3.pow(c, 3), c);
        assert!(t3.is_reduced());
    }

    #[test]
    fn r8_relations() {
        let r8 = make_r8();
        let e = |l: &str| r8.element(l).unwrap();
        assert_eq!(r8.mul(e("a"), e("a")), e("1"));
        assert_eq!(r8.pow(e("b"), 3), e("b"));
        assert_eq!(r8.mul(e("t"), e("t")), e("b2"));
        assert_eq!(r8.mul(e("b"), e("t")), e("b"));
        assert_eq!(r8.mul(e("a"), e("t")), e("at"));
        assert!(r8.is_reduced());
        let p: Vec<_> = r8.p_elements().iter().map(|&x| r8.label(x)).collect();
        assert_eq!(p, ["a", "b2"]);
    }
}
