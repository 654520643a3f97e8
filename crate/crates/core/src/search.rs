//! Shortest-chain search for mixed and Day conditions in free algebras.

use crate::condition::{ChainCondition, ConditionSpec, DayLink, DayVariant, Family, Side, TermChain};
use crate::error::{Error, Result};
use crate::free::FreeAlgebra;
use crate::term::Term;
use std::collections::HashMap;

/// Interns restricted tables to small integer ids.
#[derive(Default)]
struct Interner {
    ids: HashMap<Vec<u8>, u32>,
}

impl Interner {
    fn id(&mut self, key: Vec<u8>) -> u32 {
        let next = self.ids.len() as u32;
        *self.ids.entry(key).or_insert(next)
    }
}

fn key_of(elem: &[u8], coords: &[usize]) -> Vec<u8> {
    coords.iter().map(|&c| elem[c]).collect()
}

/// Per-element link keys of a ternary free algebra.
pub struct ChainIndex<'a> {
    free: &'a FreeAlgebra,
    /// Key of `u(x, x, z)` and of `u(x, z, z)`.
    key_x: Vec<u32>,
    key_z: Vec<u32>,
    idem: Vec<bool>,
    start: u32,
    end: u32,
}

impl<'a> ChainIndex<'a> {
    pub fn new(free: &'a FreeAlgebra) -> Result<Self> {
        if free.k != 3 {
            return Err(Error::Shape("chain search needs a free algebra on three generators".into()));
        }
        let mut cx = Vec::new();
        let mut cz = Vec::new();
        let mut idem_coords = Vec::new();
        let mut start_vals = Vec::new();
        let mut end_vals = Vec::new();
        let missing = || Error::Shape("free algebra lacks a needed coordinate".into());
        for (g, alg) in free.generators.iter().enumerate() {
            let s = alg.size;
            for a in 0..s {
                for c in 0..s {
                    cx.push(free.coordinate(g, &[a, a, c]).ok_or_else(missing)?);
                    cz.push(free.coordinate(g, &[a, c, c]).ok_or_else(missing)?);
                    start_vals.push(a as u8);
                    end_vals.push(c as u8);
                    idem_coords.push((free.coordinate(g, &[a, c, a]).ok_or_else(missing)?, a as u8));
                }
            }
        }
        let mut interner = Interner::default();
        let start = interner.id(start_vals);
        let end = interner.id(end_vals);
        let mut key_x = Vec::with_capacity(free.len());
        let mut key_z = Vec::with_capacity(free.len());
        let mut idem = Vec::with_capacity(free.len());
        for i in 0..free.len() {
            let e = free.element(i);
            key_x.push(interner.id(key_of(e, &cx)));
            key_z.push(interner.id(key_of(e, &cz)));
            idem.push(idem_coords.iter().all(|&(c, v)| e[c] == v));
        }
        Ok(ChainIndex {
            free,
            key_x,
            key_z,
            idem,
            start,
            end,
        })
    }

    fn key(&self, side: Side, u: usize) -> u32 {
        match side {
            Side::X => self.key_x[u],
            Side::Z => self.key_z[u],
        }
    }

    fn chain_terms(&self, middle: &[usize]) -> Vec<Term> {
        let mut terms = vec![Term::Var(0)];
        terms.extend(middle.iter().map(|&u| self.free.term(u)));
        terms.push(Term::Var(2));
        terms
    }

    /// Layered search for a chain of exactly the spec's length.
    pub fn find(&self, spec: &ConditionSpec) -> Option<TermChain> {
        let n = spec.n;
        if n == 1 {
            return (self.start == self.end).then(|| TermChain {
                condition: ChainCondition::Mixed(spec.clone()),
                terms: vec![Term::Var(0), Term::Var(2)],
            });
        }
        let total = self.free.len();
        // parents[h][u] = predecessor in layer h-1 (layer indices from 1)
        let mut layers: Vec<HashMap<usize, usize>> = Vec::new();
        let mut incoming: HashMap<u32, usize> = HashMap::from([(self.start, usize::MAX)]);
        for h in 1..n {
            let l = spec.l_at(h);
            let mut layer = HashMap::new();
            for u in 0..total {
                if spec.idem_at(h) && !self.idem[u] {
                    continue;
                }
                if let Some(&p) = incoming.get(&self.key(l, u)) {
                    layer.insert(u, p);
                }
            }
            if layer.is_empty() {
                return None;
            }
            let r = spec.r_at(h);
            let mut next: HashMap<u32, usize> = HashMap::new();
            let mut members: Vec<usize> = layer.keys().copied().collect();
            members.sort_unstable();
            for &u in &members {
                next.entry(self.key(r, u)).or_insert(u);
            }
            incoming = next;
            layers.push(layer);
        }
        let last = *incoming.get(&self.end)?;
        let mut middle = vec![last];
        for h in (1..n - 1).rev() {
            let cur = *middle.last().unwrap();
            middle.push(layers[h][&cur]);
        }
        middle.reverse();
        Some(TermChain {
            condition: ChainCondition::Mixed(spec.clone()),
            terms: self.chain_terms(&middle),
        })
    }

    /// Least `n <= max_n` admitting any normalized mixed condition with idempotency everywhere.
    pub fn find_mixed(&self, max_n: usize) -> Option<TermChain> {
        if self.start == self.end {
            let spec = ConditionSpec::new(1, vec![], vec![], vec![]).unwrap();
            return self.find(&spec);
        }
        let total = self.free.len();
        let mut incoming: HashMap<u32, (usize, Side)> =
            HashMap::from([(self.start, (usize::MAX, Side::X))]);
        // per layer: (element, l side) -> parent state
        let mut layers: Vec<HashMap<(usize, Side), (usize, Side)>> = Vec::new();
        for n in 2..=max_n {
            let mut layer = HashMap::new();
            for u in 0..total {
                if !self.idem[u] {
                    continue;
                }
                for side in [Side::X, Side::Z] {
                    if let Some(&p) = incoming.get(&self.key(side, u)) {
                        layer.insert((u, side), p);
                    }
                }
            }
            if layer.is_empty() {
                return None;
            }
            let mut states: Vec<(usize, Side)> = layer.keys().copied().collect();
            states.sort_unstable_by_key(|&(u, s)| (u, s == Side::Z));
            let mut next = HashMap::new();
            for &(u, l) in &states {
                next.entry(self.key(l.flip(), u)).or_insert((u, l));
            }
            layers.push(layer);
            if let Some(&last) = next.get(&self.end) {
                let mut path = vec![last];
                for h in (1..n - 1).rev() {
                    let cur = *path.last().unwrap();
                    path.push(layers[h][&cur]);
                }
                path.reverse();
                let spec = ConditionSpec::new(
                    n,
                    path.iter().map(|p| p.1).collect(),
                    path.iter().map(|p| p.1.flip()).collect(),
                    vec![true; n - 1],
                )
                .unwrap();
                let middle: Vec<usize> = path.iter().map(|p| p.0).collect();
                return Some(TermChain {
                    condition: ChainCondition::Mixed(spec),
                    terms: self.chain_terms(&middle),
                });
            }
            incoming = next;
        }
        None
    }
}

/// Single-spec search.
pub fn find_chain(free: &FreeAlgebra, spec: &ConditionSpec) -> Result<Option<TermChain>> {
    Ok(ChainIndex::new(free)?.find(spec))
}

/// Outcome of a Day search.
#[derive(Debug, Clone)]
pub struct DayResult {
    /// Minimal `m` and witness, when found.
    pub chain: Option<TermChain>,
    /// True if the search space was exhausted without reaching the target.
    pub exhausted: bool,
    /// Largest `m` for which absence was established.
    pub searched_to: usize,
}

/// Alternating breadth-first search for Day terms in a four-generated free algebra.
pub fn find_day_chain(free: &FreeAlgebra, variant: DayVariant, max_m: usize) -> Result<DayResult> {
    if free.k != 4 {
        return Err(Error::Shape("Day search needs a free algebra on four generators".into()));
    }
    let missing = || Error::Shape("free algebra lacks a needed coordinate".into());
    let mut d0 = Vec::new();
    let mut outer = Vec::new();
    let mut inner = Vec::new();
    for (g, alg) in free.generators.iter().enumerate() {
        let s = alg.size;
        for a in 0..s {
            for b in 0..s {
                d0.push((free.coordinate(g, &[a, b, b, a]).ok_or_else(missing)?, a as u8));
            }
            for d in 0..s {
                outer.push(free.coordinate(g, &[a, a, d, d]).ok_or_else(missing)?);
            }
            for b in 0..s {
                for d in 0..s {
                    inner.push(free.coordinate(g, &[a, b, b, d]).ok_or_else(missing)?);
                }
            }
        }
    }
    let mut interner = Interner::default();
    let nodes: Vec<usize> = (0..free.len())
        .filter(|&u| {
            let e = free.element(u);
            d0.iter().all(|&(c, v)| e[c] == v)
        })
        .collect();
    let mut key_outer = HashMap::new();
    let mut key_inner = HashMap::new();
    let mut group_outer: HashMap<u32, Vec<usize>> = HashMap::new();
    let mut group_inner: HashMap<u32, Vec<usize>> = HashMap::new();
    for &u in &nodes {
        let e = free.element(u);
        let ko = interner.id(key_of(e, &outer));
        let ki = interner.id(key_of(e, &inner));
        key_outer.insert(u, ko);
        key_inner.insert(u, ki);
        group_outer.entry(ko).or_default().push(u);
        group_inner.entry(ki).or_default().push(u);
    }
    let x = free.projections[0];
    let w = free.projections[3];
    let mut visited: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    visited.insert((x, 0), (usize::MAX, 0));
    let mut frontier = vec![x];
    for k in 0..max_m {
        let link = variant.link(k);
        let (keys, groups) = match link {
            DayLink::Outer => (&key_outer, &group_outer),
            DayLink::Inner => (&key_inner, &group_inner),
        };
        let parity = (k + 1) % 2;
        let mut next = Vec::new();
        for &u in &frontier {
            for &v in &groups[&keys[&u]] {
                if let std::collections::hash_map::Entry::Vacant(slot) = visited.entry((v, parity)) {
                    slot.insert((u, k % 2));
                    next.push(v);
                }
            }
        }
        next.sort_unstable();
        if next.contains(&w) {
            let mut path = vec![w];
            let mut state = (w, parity);
            while let Some(&(p, pp)) = visited.get(&state) {
                if p == usize::MAX {
                    break;
                }
                path.push(p);
                state = (p, pp);
            }
            path.reverse();
            let m = k + 1;
            let mut terms: Vec<Term> = path.iter().map(|&u| free.term(u)).collect();
            terms[0] = Term::Var(0);
            terms[m] = Term::Var(3);
            return Ok(DayResult {
                chain: Some(TermChain {
                    condition: ChainCondition::Day { variant, m },
                    terms,
                }),
                exhausted: false,
                searched_to: k,
            });
        }
        if next.is_empty() {
            return Ok(DayResult {
                chain: None,
                exhausted: true,
                searched_to: usize::MAX,
            });
        }
        frontier = next;
    }
    Ok(DayResult {
        chain: None,
        exhausted: false,
        searched_to: max_m,
    })
}

/// Argument tuples needed by the Day equations: `b = c`, or `a = b` and `c = d`.
pub fn day_points(t: &[usize]) -> bool {
    t[1] == t[2] || (t[0] == t[1] && t[2] == t[3])
}

/// Result of a level search for one family.
#[derive(Debug, Clone)]
pub enum LevelOutcome {
    Found(TermChain),
    /// No chain up to the given length.
    NoneUpTo(usize),
}

/// Least `n` in `min_n..=max_n` with a chain of the family.
pub fn find_level(free: &FreeAlgebra, family: Family, max_n: usize) -> Result<LevelOutcome> {
    let index = ChainIndex::new(free)?;
    find_level_indexed(&index, family, max_n)
}

pub fn find_level_indexed(index: &ChainIndex, family: Family, max_n: usize) -> Result<LevelOutcome> {
    if family.is_day() {
        return Err(Error::Invalid(format!("{family} is not a ternary family")));
    }
    if family == Family::MixedMinimal {
        return Ok(match index.find_mixed(max_n) {
            Some(c) => LevelOutcome::Found(c),
            None => LevelOutcome::NoneUpTo(max_n),
        });
    }
    for n in family.min_n()..=max_n {
        let spec = family.spec(n).expect("family defined at n");
        if let Some(chain) = index.find(&spec) {
            return Ok(LevelOutcome::Found(chain));
        }
    }
    Ok(LevelOutcome::NoneUpTo(max_n))
}

/// True when the first and last projections coincide (a trivial variety).
pub fn is_trivial(free: &FreeAlgebra) -> bool {
    free.projections[0] == free.projections[free.k - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{FiniteAlgebra, Operation};
    use crate::condition::verify_condition;
    use crate::free::build_free_algebra;

    fn ternary(name: &str, f: impl Fn(usize, usize, usize) -> usize) -> FiniteAlgebra {
        FiniteAlgebra::new(
            name,
            2,
            vec![Operation {
                name: "t".into(),
                arity: 3,
                table: FiniteAlgebra::table_from_fn(2, 3, |a| f(a[0], a[1], a[2])),
            }],
        )
        .unwrap()
    }

    fn majority() -> FiniteAlgebra {
        ternary("maj", |a, b, c| usize::from(a + b + c >= 2))
    }

    fn pixley() -> FiniteAlgebra {
        // x y' + x z + y' z
        ternary("pix", |x, y, z| {
            let ny = 1 - y;
            (x & ny) | (x & z) | (ny & z)
        })
    }

    #[test]
    fn majority_levels() {
        let f = build_free_algebra(&[majority()], 3, 1000).unwrap();
        let j = find_chain(&f, &Family::Jonsson.spec(2).unwrap()).unwrap().unwrap();
        assert_eq!(j.terms[1].to_string(), "t(x,y,z)");
        assert!(find_chain(&f, &Family::Alvin.spec(2).unwrap()).unwrap().is_none());
        match find_level(&f, Family::Alvin, 5).unwrap() {
            LevelOutcome::Found(c) => {
                assert_eq!(c.condition.length(), 3);
                assert!(verify_condition(&c, &[majority()]).unwrap().is_none());
            }
            other => panic!("{other:?}"),
        }
        match find_level(&f, Family::MixedMinimal, 5).unwrap() {
            LevelOutcome::Found(c) => assert_eq!(c.condition.length(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pixley_is_alvin_two() {
        let f = build_free_algebra(&[pixley()], 3, 1000).unwrap();
        let c = find_chain(&f, &Family::Alvin.spec(2).unwrap()).unwrap().unwrap();
        assert!(verify_condition(&c, &[pixley()]).unwrap().is_none());
    }

    #[test]
    fn day_levels_of_majority() {
        let f = crate::free::build_free_algebra_on(
            &[majority()],
            4,
            day_points,
            crate::free::Limits::elements(10_000),
        )
        .unwrap();
        let s = find_day_chain(&f, DayVariant::Standard, 10).unwrap();
        let c = s.chain.unwrap();
        assert_eq!(c.condition.length(), 3);
        assert!(verify_condition(&c, &[majority()]).unwrap().is_none());
        let r = find_day_chain(&f, DayVariant::Reversed, 10).unwrap();
        assert_eq!(r.chain.unwrap().condition.length(), 4);
    }

    #[test]
    fn trivial_generator() {
        let one = FiniteAlgebra::new(
            "1",
            1,
            vec![Operation {
                name: "t".into(),
                arity: 3,
                table: vec![0],
            }],
        )
        .unwrap();
        let f = build_free_algebra(&[one], 4, 10).unwrap();
        assert!(is_trivial(&f));
        let r = find_day_chain(&f, DayVariant::Standard, 5).unwrap();
        assert_eq!(r.chain.unwrap().condition.length(), 1);
    }
}
