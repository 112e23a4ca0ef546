use misere_core::games::{Arena, GameId, Outcome, PlayConvention};
use misere_core::octal::{
    detect_normal_period, grundy_sequence, misere_nim_outcome, normal_nim_outcome, OctalCode,
};

fn code(s: &str) -> OctalCode {
    s.parse().unwrap()
}

/// Heap `H_n` as an arena game, built from the move rules alone.
fn heap_games(c: &OctalCode, n_max: usize, a: &mut Arena) -> Vec<GameId> {
    let mut heaps: Vec<GameId> = Vec::new();
    for n in 0..=n_max {
        let mut opts = Vec::new();
        for pos in c.heap_moves(n) {
            let parts: Vec<GameId> = pos.heaps().iter().map(|&h| heaps[h]).collect();
            opts.push(a.sum_all(&parts).unwrap());
        }
        heaps.push(a.intern(opts));
    }
    heaps
}

const CODES: [&str; 8] = ["0.77", "0.07", "0.137", "0.4", "0.6", "0.3122", "0.75", "0.007"];

#[test]
fn grundy_sequence_matches_game_trees() {
    for s in CODES {
        let c = code(s);
        let mut a = Arena::new();
        let heaps = heap_games(&c, 12, &mut a);
        let seq = grundy_sequence(&c, 12);
        for n in 0..=12 {
            assert_eq!(seq[n], a.grundy(heaps[n]), "{s} H{n}");
        }
    }
}

#[test]
fn three_box_strip_brute_force() {
    // Single-box moves only, from the end or a whole strip of one.
    let c = code("0.3");
    let mut a = Arena::new();
    let heaps = heap_games(&c, 4, &mut a);
    let values: Vec<u32> = heaps.iter().map(|&g| a.grundy(g)).collect();
    assert_eq!(values, grundy_sequence(&c, 4));
    assert_eq!(values, [0, 1, 0, 1, 0]);
}

#[test]
fn heap_moves_shrink_by_at_most_k() {
    for s in CODES {
        let c = code(s);
        for n in 0..40 {
            for m in c.heap_moves(n) {
                assert!(m.total() < n && n <= m.total() + c.k(), "{s} {n}");
                assert!(m.heaps().iter().all(|&h| h > 0));
            }
        }
    }
}

#[test]
fn certificates_hold_beyond_their_window() {
    for s in ["0.77", "0.07", "0.137", "0.4", "0.6", "0.75"] {
        let c = code(s);
        let values = grundy_sequence(&c, 600);
        let Some(cert) = detect_normal_period(&c, &values) else {
            continue;
        };
        assert!(cert.verify(&values), "{s}");
        let (lo, hi) = cert.window;
        assert_eq!(hi, 2 * cert.n0 + cert.p + cert.k);
        assert!((lo..hi).all(|n| values[n] == values[n + cert.p]));
        let long = grundy_sequence(&c, 2000);
        for n in cert.n0..=2000 - cert.p {
            assert_eq!(long[n], long[n + cert.p], "{s} n={n}");
        }
    }
}

#[test]
fn known_periods() {
    let kayles = code("0.77");
    assert_eq!(detect_normal_period(&kayles, &grundy_sequence(&kayles, 500)).unwrap().p, 12);
    let dawson = code("0.07");
    let cert = detect_normal_period(&dawson, &grundy_sequence(&dawson, 500)).unwrap();
    assert_eq!(cert.p, 34);
    assert_eq!(cert.k, 2);
    let hard = code("0.007");
    assert!(detect_normal_period(&hard, &grundy_sequence(&hard, 10_000)).is_none());
}

#[test]
fn nim_formulas_match_game_sums() {
    let mut a = Arena::new();
    for h1 in 0..=6u32 {
        for h2 in h1..=6 {
            for h3 in h2..=6 {
                for h4 in h3..=6 {
                    let heaps = [h1, h2, h3, h4];
                    let gs: Vec<GameId> = heaps.iter().map(|&h| a.nim_heap(h)).collect();
                    let g = a.sum_all(&gs).unwrap();
                    let hs: Vec<u64> = heaps.iter().map(|&h| h as u64).collect();
                    assert_eq!(misere_nim_outcome(&hs), a.outcome(g, PlayConvention::Misere));
                    assert_eq!(normal_nim_outcome(&hs), a.outcome(g, PlayConvention::Normal));
                }
            }
        }
    }
    assert_eq!(misere_nim_outcome(&[1]), Outcome::P);
}
