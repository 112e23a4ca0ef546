use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use rustc_hash::FxHasher;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::QuotientError;
use crate::games::{Arena, GameId};
use crate::octal::OctalCode;

/// Largest number of components a context may hold (memo keys use `u16`).
pub const MAX_COMPONENTS: usize = u16::MAX as usize;

/// Sparse exponent vector: `(component, exponent)` sorted by component,
/// exponents positive, the zero component never present.
pub(crate) type Sparse = SmallVec<[(u16, u16); 6]>;

/// Dense exponent vector over the components of a context.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Position(pub Vec<u32>);

impl Position {
    pub fn zero(len: usize) -> Self {
        Position(vec![0; len])
    }

    pub fn unit(len: usize, component: usize) -> Self {
        let mut v = vec![0; len];
        v[component] = 1;
        Position(v)
    }

    /// Builds a position from `(component, exponent)` pairs.
    pub fn from_pairs(len: usize, pairs: &[(usize, u32)]) -> Self {
        let mut v = vec![0; len];
        for &(c, e) in pairs {
            v[c] += e;
        }
        Position(v)
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }
}

/// One element of the hereditary closure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Component {
    pub name: String,
    /// Normal-play Grundy value.
    pub grundy: u32,
    #[serde(skip)]
    pub game: Option<GameId>,
}

/// The hereditary closure of a generator set, as components with options
/// given by positions. Component 0 is always the game 0.
#[derive(Debug, Clone)]
pub struct ClosedContext {
    components: Vec<Component>,
    options: Vec<Vec<Sparse>>,
    by_options: HashMap<Vec<Sparse>, usize>,
    star: Option<usize>,
    /// For octal contexts: component of each heap `H_n`.
    heaps: Vec<usize>,
    code: Option<OctalCode>,
}

impl ClosedContext {
    fn empty() -> Self {
        let mut ctx = ClosedContext {
            components: Vec::new(),
            options: Vec::new(),
            by_options: HashMap::new(),
            star: None,
            heaps: Vec::new(),
            code: None,
        };
        ctx.add_component("0".into(), Vec::new(), None, 0);
        ctx
    }

    fn add_component(&mut self, name: String, options: Vec<Sparse>, game: Option<GameId>, grundy: u32) -> usize {
        let idx = self.components.len();
        if options.len() == 1 && options[0].is_empty() {
            self.star = Some(idx);
        }
        self.by_options.insert(options.clone(), idx);
        self.options.push(options);
        self.components.push(Component { name, grundy, game });
        idx
    }

    /// The closure of `generators`: every subposition becomes a component,
    /// ordered by birthday and then arena id.
    pub fn from_games(arena: &Arena, generators: &[GameId]) -> Result<Self, QuotientError> {
        let mut subs = arena.subpositions(generators);
        if subs.len() > MAX_COMPONENTS {
            return Err(QuotientError::TooManyComponents {
                size: subs.len(),
                limit: MAX_COMPONENTS,
            });
        }
        subs.sort_by_key(|&g| (arena.birthday(g), g));
        let mut ctx = ClosedContext::empty();
        ctx.components[0].game = Some(arena.zero());
        let mut index: HashMap<GameId, usize> = HashMap::from([(arena.zero(), 0)]);
        for g in subs {
            if g == arena.zero() {
                continue;
            }
            let mut options: Vec<Sparse> = arena
                .options(g)
                .iter()
                .map(|o| {
                    let c = index[o];
                    let mut s = Sparse::new();
                    if c != 0 {
                        s.push((c as u16, 1));
                    }
                    s
                })
                .collect();
            options.sort();
            let name = arena.render(g);
            let idx = ctx.add_component(name, options, Some(g), arena.grundy(g));
            index.insert(g, idx);
        }
        Ok(ctx)
    }

    /// An octal context holding only `H_0`; grow it with [`Self::push_heap`].
    pub fn octal(code: &OctalCode) -> Self {
        let mut ctx = ClosedContext::empty();
        ctx.heaps.push(0);
        ctx.code = Some(code.clone());
        ctx
    }

    /// Adds the next heap `H_n` and returns `(n, component, is_new)`. Heaps
    /// identical to an earlier game share its component.
    pub fn push_heap(&mut self) -> Result<(usize, usize, bool), QuotientError> {
        let code = self.code.clone().expect("push_heap needs an octal context");
        let n = self.heaps.len();
        let mut options: Vec<Sparse> = code
            .heap_moves(n)
            .iter()
            .map(|pos| {
                let mut s = Sparse::new();
                for &h in pos.heaps() {
                    let c = self.heaps[h];
                    if c == 0 {
                        continue;
                    }
                    match s.iter_mut().find(|(x, _)| *x as usize == c) {
                        Some(entry) => entry.1 += 1,
                        None => s.push((c as u16, 1)),
                    }
                }
                s.sort_unstable();
                if let Some(star) = self.star {
                    reduce_star(&mut s, star);
                }
                s
            })
            .collect();
        options.sort();
        options.dedup();
        if let Some(&c) = self.by_options.get(&options) {
            self.heaps.push(c);
            return Ok((n, c, false));
        }
        if self.components.len() >= MAX_COMPONENTS {
            return Err(QuotientError::TooManyComponents {
                size: self.components.len() + 1,
                limit: MAX_COMPONENTS,
            });
        }
        let grundy = crate::games::mex(options.iter().map(|o| {
            o.iter()
                .filter(|&&(_, e)| e % 2 == 1)
                .fold(0, |acc, &(c, _)| acc ^ self.components[c as usize].grundy)
        }));
        let c = self.add_component(format!("H{n}"), options, None, grundy);
        self.heaps.push(c);
        Ok((n, c, true))
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// The component that is the game `*`, if present.
    pub fn star(&self) -> Option<usize> {
        self.star
    }

    /// Component of heap `H_n` in an octal context.
    pub fn heap_component(&self, n: usize) -> Option<usize> {
        self.heaps.get(n).copied()
    }

    pub fn heap_count(&self) -> usize {
        self.heaps.len()
    }

    pub fn code(&self) -> Option<&OctalCode> {
        self.code.as_ref()
    }

    /// Component index of an arena game, if it lies in the closure.
    pub fn component_of(&self, g: GameId) -> Option<usize> {
        self.components.iter().position(|c| c.game == Some(g))
    }

    /// Options of a component as dense positions.
    pub fn options(&self, component: usize) -> Vec<Position> {
        self.options[component]
            .iter()
            .map(|s| self.to_dense(s))
            .collect()
    }

    pub(crate) fn sparse_options(&self, component: usize) -> &[Sparse] {
        &self.options[component]
    }

    pub(crate) fn to_dense(&self, s: &Sparse) -> Position {
        let mut v = vec![0; self.len()];
        for &(c, e) in s {
            v[c as usize] = e as u32;
        }
        Position(v)
    }

    /// Canonical sparse form: drops the zero component and reduces `*` mod 2.
    pub(crate) fn to_sparse(&self, pos: &Position) -> Result<Sparse, QuotientError> {
        if pos.0.len() != self.len() {
            return Err(QuotientError::PositionShape {
                expected: self.len(),
                got: pos.0.len(),
            });
        }
        let mut s = Sparse::new();
        for (c, &e) in pos.0.iter().enumerate().skip(1) {
            let e = if Some(c) == self.star { e % 2 } else { e };
            if e > 0 {
                let e = u16::try_from(e).map_err(|_| QuotientError::ExponentOverflow(e))?;
                s.push((c as u16, e));
            }
        }
        Ok(s)
    }

    /// Stable fingerprint of the option structure, used to key memo snapshots.
    pub fn fingerprint(&self) -> u64 {
        let mut h = FxHasher::default();
        self.options.hash(&mut h);
        h.finish()
    }
}

/// `*` + `*` = 0 in misère play, so only the parity of `*` matters.
pub(crate) fn reduce_star(s: &mut Sparse, star: usize) {
    if let Some(i) = s.iter().position(|&(c, _)| c as usize == star) {
        if s[i].1.is_multiple_of(2) {
            s.remove(i);
        } else {
            s[i].1 = 1;
        }
    }
}
