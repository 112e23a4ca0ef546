//! Impartial game positions stored as hash-consed nodes in an [`Arena`].
//!
//! Every game is identified with its set of options. The arena interns each
//! option set exactly once, so two games with isomorphic trees always share a
//! [`GameId`]. Grundy value, both outcomes and birthday are computed once at
//! intern time, which makes every query a read-only lookup.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Opaque game identifier, valid only within the arena that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GameId(u32);

impl GameId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Winner under perfect play: the previous player (`P`) or the next player (`N`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    P,
    N,
}

impl Outcome {
    pub fn is_p(self) -> bool {
        self == Outcome::P
    }

    pub fn from_is_p(is_p: bool) -> Self {
        if is_p {
            Outcome::P
        } else {
            Outcome::N
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::P => "P",
            Outcome::N => "N",
        })
    }
}

/// Normal play: last player to move wins. Misère play: last player to move loses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlayConvention {
    Normal,
    Misere,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GameError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("nesting depth exceeds the configured limit of {limit}")]
    DepthLimit { limit: usize },
    #[error("arena capacity of {capacity} games exhausted")]
    Capacity { capacity: usize },
    #[error("unknown built-in game `{0}`")]
    UnknownBuiltin(String),
}

/// Resource limits for an [`Arena`].
#[derive(Debug, Clone, Copy)]
pub struct ArenaConfig {
    /// Maximum brace nesting accepted by the parser.
    pub max_depth: usize,
    /// Maximum number of distinct games; enforced by [`Arena::sum`].
    pub capacity: usize,
}

impl Default for ArenaConfig {
    fn default() -> Self {
        ArenaConfig {
            max_depth: 64,
            capacity: 1 << 22,
        }
    }
}

#[derive(Debug, Clone)]
struct Node {
    options: Box<[GameId]>,
    grundy: u32,
    misere_p: bool,
    birthday: u32,
    /// `Some(n)` when the game is the nim-heap `*n`.
    nim: Option<u32>,
}

/// Hash-consing store of game positions.
#[derive(Debug, Clone)]
pub struct Arena {
    nodes: Vec<Node>,
    index: HashMap<Box<[GameId]>, GameId>,
    sums: HashMap<(GameId, GameId), GameId>,
    heaps: Vec<GameId>,
    config: ArenaConfig,
}

impl Default for Arena {
    fn default() -> Self {
        Self::new()
    }
}

impl Arena {
    pub fn new() -> Self {
        Self::with_config(ArenaConfig::default())
    }

    pub fn with_config(config: ArenaConfig) -> Self {
        let mut arena = Arena {
            nodes: Vec::new(),
            index: HashMap::new(),
            sums: HashMap::new(),
            heaps: Vec::new(),
            config,
        };
        let zero = arena.intern(Vec::new());
        arena.heaps.push(zero);
        arena
    }

    pub fn config(&self) -> ArenaConfig {
        self.config
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The game with no options.
    pub fn zero(&self) -> GameId {
        GameId(0)
    }

    /// Returns the game whose options are exactly `options` (duplicates are merged).
    pub fn intern(&mut self, mut options: Vec<GameId>) -> GameId {
        options.sort_unstable();
        options.dedup();
        if let Some(&id) = self.index.get(options.as_slice()) {
            return id;
        }
        let mut seen = Vec::with_capacity(options.len() + 1);
        let mut misere_p = !options.is_empty();
        let mut birthday = 0;
        // Options of a nim-heap are distinct heaps, so values below len() cover 0..len().
        let mut is_heap = true;
        for &o in &options {
            let node = &self.nodes[o.index()];
            seen.push(node.grundy);
            misere_p &= !node.misere_p;
            birthday = birthday.max(node.birthday + 1);
            is_heap &= node.nim.is_some_and(|v| (v as usize) < options.len());
        }
        let nim = is_heap.then_some(options.len() as u32);
        let grundy = mex(seen);
        let id = GameId(u32::try_from(self.nodes.len()).expect("arena index overflow"));
        let options: Box<[GameId]> = options.into_boxed_slice();
        self.nodes.push(Node {
            options: options.clone(),
            grundy,
            misere_p,
            birthday,
            nim,
        });
        self.index.insert(options, id);
        id
    }

    /// The nim-heap `*n` with options `{0, *, ..., *(n-1)}`.
    pub fn nim_heap(&mut self, n: u32) -> GameId {
        while self.heaps.len() <= n as usize {
            let options = self.heaps.clone();
            let heap = self.intern(options);
            self.heaps.push(heap);
        }
        self.heaps[n as usize]
    }

    pub fn options(&self, g: GameId) -> &[GameId] {
        &self.nodes[g.index()].options
    }

    pub fn birthday(&self, g: GameId) -> u32 {
        self.nodes[g.index()].birthday
    }

    pub fn grundy(&self, g: GameId) -> u32 {
        self.nodes[g.index()].grundy
    }

    pub fn outcome(&self, g: GameId, convention: PlayConvention) -> Outcome {
        let node = &self.nodes[g.index()];
        let is_p = match convention {
            PlayConvention::Normal => node.grundy == 0,
            PlayConvention::Misere => node.misere_p,
        };
        Outcome::from_is_p(is_p)
    }

    /// Returns `Some(n)` when `g` is the nim-heap `*n`.
    pub fn as_nim_heap(&self, g: GameId) -> Option<u32> {
        self.nodes[g.index()].nim
    }

    /// Disjunctive sum, memoized on the unordered pair of ids.
    pub fn sum(&mut self, g: GameId, h: GameId) -> Result<GameId, GameError> {
        let capacity = self.config.capacity;
        let id = self.sum_inner(g, h);
        if self.nodes.len() > capacity {
            return Err(GameError::Capacity { capacity });
        }
        Ok(id)
    }

    fn sum_inner(&mut self, g: GameId, h: GameId) -> GameId {
        let zero = self.zero();
        if g == zero {
            return h;
        }
        if h == zero {
            return g;
        }
        let key = if g <= h { (g, h) } else { (h, g) };
        if let Some(&s) = self.sums.get(&key) {
            return s;
        }
        let mut options = Vec::with_capacity(self.options(g).len() + self.options(h).len());
        for i in 0..self.options(g).len() {
            let g2 = self.nodes[g.index()].options[i];
            options.push(self.sum_inner(g2, h));
        }
        for i in 0..self.options(h).len() {
            let h2 = self.nodes[h.index()].options[i];
            options.push(self.sum_inner(g, h2));
        }
        let s = self.intern(options);
        self.sums.insert(key, s);
        s
    }

    /// Sum of a list of games (0 for an empty list).
    pub fn sum_all(&mut self, games: &[GameId]) -> Result<GameId, GameError> {
        let mut acc = self.zero();
        for &g in games {
            acc = self.sum(acc, g)?;
        }
        Ok(acc)
    }

    /// Parses the brace/star notation: `0`, `*`, `*k`, `{g, g, ...}`.
    pub fn parse(&mut self, text: &str) -> Result<GameId, GameError> {
        let mut parser = Parser {
            bytes: text.as_bytes(),
            pos: 0,
            max_depth: self.config.max_depth,
        };
        let g = parser.game(self, 0)?;
        parser.skip_ws();
        if parser.pos != parser.bytes.len() {
            return Err(parser.error("trailing input"));
        }
        Ok(g)
    }

    /// Renders `g` so that [`Arena::parse`] returns the same id. Nim-heaps
    /// print as `0`, `*`, `*n`; other games print their options in id order.
    pub fn render(&self, g: GameId) -> String {
        let mut out = String::new();
        self.render_into(g, &mut out);
        out
    }

    fn render_into(&self, g: GameId, out: &mut String) {
        match self.as_nim_heap(g) {
            Some(0) => out.push('0'),
            Some(1) => out.push('*'),
            Some(n) => {
                let _ = write!(out, "*{n}");
            }
            None => {
                out.push('{');
                for (i, &o) in self.options(g).iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    self.render_into(o, out);
                }
                out.push('}');
            }
        }
    }

    /// All subpositions of the given games (each listed once), children before parents.
    pub fn subpositions(&self, roots: &[GameId]) -> Vec<GameId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut order = Vec::new();
        let mut stack: Vec<(GameId, usize)> = Vec::new();
        for &r in roots {
            if seen[r.index()] {
                continue;
            }
            seen[r.index()] = true;
            stack.push((r, 0));
            while let Some(&mut (g, ref mut next)) = stack.last_mut() {
                let opts = self.options(g);
                if *next < opts.len() {
                    let child = opts[*next];
                    *next += 1;
                    if !seen[child.index()] {
                        seen[child.index()] = true;
                        stack.push((child, 0));
                    }
                } else {
                    order.push(g);
                    stack.pop();
                }
            }
        }
        order
    }
}

/// Least natural number not in `values`.
pub fn mex<I: IntoIterator<Item = u32>>(values: I) -> u32 {
    let mut present: Vec<bool> = Vec::new();
    for v in values {
        let v = v as usize;
        if v >= present.len() {
            present.resize(v + 1, false);
        }
        present[v] = true;
    }
    present.iter().position(|&p| !p).unwrap_or(present.len()) as u32
}

/// Nim addition (bitwise exclusive or).
pub fn nim_add(a: u64, b: u64) -> u64 {
    a ^ b
}

/// Misère mex rule for a game whose options are the nim-heaps `*a_i`.
///
/// Applies only when some `a_i` is 0 or 1; returns `None` otherwise, and for an
/// empty option list.
pub fn misere_mex(option_heaps: &[u32]) -> Option<u32> {
    if option_heaps.iter().any(|&a| a <= 1) {
        Some(mex(option_heaps.iter().copied()))
    } else {
        None
    }
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 6] = ["A", "B", "C", "D", "E", "star2sharp320"];

/// Named games that the star/brace grammar cannot spell compactly:
/// `A = *`, `B = *2`, `C = {B}`, `D = {C, 0}`, `E = {D, 0}` and
/// `star2sharp320 = {0, *2, *3, C}`.
pub fn builtin(name: &str, arena: &mut Arena) -> Option<GameId> {
    let zero = arena.zero();
    let b = arena.nim_heap(2);
    let c = arena.intern(vec![b]);
    let g = match name {
        "A" => arena.nim_heap(1),
        "B" => b,
        "C" => c,
        "D" => arena.intern(vec![c, zero]),
        "E" => {
            let d = arena.intern(vec![c, zero]);
            arena.intern(vec![d, zero])
        }
        "star2sharp320" => {
            let s3 = arena.nim_heap(3);
            arena.intern(vec![zero, b, s3, c])
        }
        _ => return None,
    };
    Some(g)
}

/// Resolves a built-in name, falling back to [`Arena::parse`].
pub fn resolve_game(text: &str, arena: &mut Arena) -> Result<GameId, GameError> {
    match builtin(text.trim(), arena) {
        Some(g) => Ok(g),
        None => arena.parse(text),
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    max_depth: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> GameError {
        GameError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn game(&mut self, arena: &mut Arena, depth: usize) -> Result<GameId, GameError> {
        if depth > self.max_depth {
            return Err(GameError::DepthLimit {
                limit: self.max_depth,
            });
        }
        match self.peek() {
            Some(b'0') => {
                self.pos += 1;
                Ok(arena.zero())
            }
            Some(b'*') => {
                self.pos += 1;
                self.skip_ws();
                let start = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if start == self.pos {
                    return Ok(arena.nim_heap(1));
                }
                let digits = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap_or("");
                let n: u32 = digits.parse().map_err(|_| GameError::Syntax {
                    pos: start,
                    msg: "heap size out of range".into(),
                })?;
                if n as usize > self.max_depth {
                    return Err(GameError::DepthLimit {
                        limit: self.max_depth,
                    });
                }
                Ok(arena.nim_heap(n))
            }
            Some(b'{') => {
                self.pos += 1;
                let mut options = Vec::new();
                if self.peek() == Some(b'}') {
                    self.pos += 1;
                    return Ok(arena.intern(options));
                }
                loop {
                    options.push(self.game(arena, depth + 1)?);
                    match self.peek() {
                        Some(b',') => self.pos += 1,
                        Some(b'}') => {
                            self.pos += 1;
                            return Ok(arena.intern(options));
                        }
                        _ => return Err(self.error("expected `,` or `}`")),
                    }
                }
            }
            Some(_) => Err(self.error("expected `0`, `*` or `{`")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}
