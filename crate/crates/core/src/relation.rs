//! Partitions, bit-matrix relations and congruence generation.

use crate::algebra::{close_set, FiniteAlgebra};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{HashSet, VecDeque};

/// Largest universe accepted by congruence generation.
pub const CONGRUENCE_GUARD: usize = 4096;

/// Union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![1; n],
        }
    }

    pub fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    /// Returns true if the two classes were distinct.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (big, small) = if self.rank[ra] >= self.rank[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small] = big;
        self.rank[big] += self.rank[small];
        true
    }
}

/// An equivalence relation stored as a union-find forest plus canonical block labels.
#[derive(Debug, Clone)]
pub struct Partition {
    parent: Vec<usize>,
    /// Block number of each element; blocks numbered by least element.
    label: Vec<usize>,
}

impl PartialEq for Partition {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label
    }
}
impl Eq for Partition {}

impl std::hash::Hash for Partition {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.label.hash(state);
    }
}

impl Partition {
    pub fn from_union_find(mut uf: UnionFind) -> Self {
        let n = uf.parent.len();
        let roots: Vec<usize> = (0..n).map(|i| uf.find(i)).collect();
        let mut label = vec![usize::MAX; n];
        let mut root_label = vec![usize::MAX; n];
        let mut next = 0;
        for i in 0..n {
            let r = roots[i];
            if root_label[r] == usize::MAX {
                root_label[r] = next;
                next += 1;
            }
            label[i] = root_label[r];
        }
        Partition {
            parent: roots,
            label,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_union_find(UnionFind::new(n))
    }

    pub fn full(n: usize) -> Self {
        let mut uf = UnionFind::new(n);
        for i in 1..n {
            uf.union(0, i);
        }
        Self::from_union_find(uf)
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut uf = UnionFind::new(n);
        let mut seen = vec![false; n];
        for b in blocks {
            for &e in b {
                if e >= n {
                    return Err(Error::ElementOutOfRange(e));
                }
                if seen[e] {
                    return Err(Error::Invalid(format!("element {e} in two blocks")));
                }
                seen[e] = true;
                uf.union(b[0], e);
            }
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::Invalid(format!("element {missing} in no block")));
        }
        Ok(Self::from_union_find(uf))
    }

    /// Partition whose blocks are the classes of `key`.
    pub fn from_key<K: Eq + std::hash::Hash>(n: usize, key: impl Fn(usize) -> K) -> Self {
        let mut first = std::collections::HashMap::new();
        let mut uf = UnionFind::new(n);
        for i in 0..n {
            let r = *first.entry(key(i)).or_insert(i);
            uf.union(r, i);
        }
        Self::from_union_find(uf)
    }

    pub fn size(&self) -> usize {
        self.label.len()
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.label[a] == self.label[b]
    }

    pub fn block_of(&self, a: usize) -> usize {
        self.label[a]
    }

    /// Forest parents (each element points at its class root).
    pub fn parents(&self) -> &[usize] {
        &self.parent
    }

    pub fn num_blocks(&self) -> usize {
        self.label.iter().max().map_or(0, |m| m + 1)
    }

    /// Sorted blocks of sorted elements, ordered by least element.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_blocks()];
        for (i, &l) in self.label.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    pub fn join(&self, other: &Partition) -> Partition {
        let n = self.size();
        let mut uf = UnionFind::new(n);
        for i in 0..n {
            uf.union(i, self.parent[i]);
            uf.union(i, other.parent[i]);
        }
        Self::from_union_find(uf)
    }

    pub fn meet(&self, other: &Partition) -> Partition {
        Self::from_key(self.size(), |i| (self.label[i], other.label[i]))
    }

    pub fn leq(&self, other: &Partition) -> bool {
        (0..self.size()).all(|i| other.related(i, self.parent[i]))
    }

    pub fn to_relation(&self) -> BinaryRelation {
        let n = self.size();
        let mut r = BinaryRelation::empty(n);
        for b in self.blocks() {
            for &i in &b {
                for &j in &b {
                    r.set(i, j);
                }
            }
        }
        r
    }

    /// True if every operation preserves the relation.
    pub fn is_congruence(&self, alg: &FiniteAlgebra) -> bool {
        is_compatible(alg, |a, b| self.related(a, b), |i| self.parent[i])
    }
}

/// Canonical JSON form of a partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionJson {
    pub size: usize,
    pub blocks: Vec<Vec<usize>>,
}

impl From<&Partition> for PartitionJson {
    fn from(p: &Partition) -> Self {
        PartitionJson {
            size: p.size(),
            blocks: p.blocks(),
        }
    }
}

impl TryFrom<PartitionJson> for Partition {
    type Error = Error;
    fn try_from(j: PartitionJson) -> Result<Self> {
        Partition::from_blocks(j.size, &j.blocks)
    }
}

fn is_compatible(
    alg: &FiniteAlgebra,
    related: impl Fn(usize, usize) -> bool,
    rep: impl Fn(usize) -> usize,
) -> bool {
    // compatibility of an equivalence reduces to translations of (rep(i), i)
    let n = alg.size;
    let mut args = vec![0usize; crate::algebra::MAX_ARITY];
    for (oi, op) in alg.operations.iter().enumerate() {
        let ar = op.arity;
        if ar == 0 {
            continue;
        }
        let others = n.pow(ar as u32 - 1);
        for i in 0..n {
            let r = rep(i);
            if r == i {
                continue;
            }
            for pos in 0..ar {
                for c in 0..others {
                    crate::algebra::decode_into(c, n, &mut args[..ar - 1]);
                    let mut full = Vec::with_capacity(ar);
                    full.extend_from_slice(&args[..pos]);
                    full.push(r);
                    full.extend_from_slice(&args[pos..ar - 1]);
                    let u = alg.apply(oi, &full);
                    full[pos] = i;
                    let v = alg.apply(oi, &full);
                    if !related(u, v) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// A binary relation as a row-major bit matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryRelation {
    size: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BinaryRelation {
    pub fn empty(size: usize) -> Self {
        let words = size.div_ceil(64).max(1);
        BinaryRelation {
            size,
            words,
            bits: vec![0; words * size],
        }
    }

    pub fn diagonal(size: usize) -> Self {
        let mut r = Self::empty(size);
        for i in 0..size {
            r.set(i, i);
        }
        r
    }

    pub fn full(size: usize) -> Self {
        let mut r = Self::empty(size);
        for i in 0..size {
            for j in 0..size {
                r.set(i, j);
            }
        }
        r
    }

    pub fn from_pairs(size: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut r = Self::empty(size);
        for &(a, b) in pairs {
            if a >= size || b >= size {
                return Err(Error::ElementOutOfRange(a.max(b)));
            }
            r.set(a, b);
        }
        Ok(r)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> bool {
        self.bits[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize) {
        self.bits[a * self.words + b / 64] |= 1 << (b % 64);
    }

    fn row(&self, a: usize) -> &[u64] {
        &self.bits[a * self.words..(a + 1) * self.words]
    }

    pub fn row_iter(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.size).filter(move |&b| self.get(a, b))
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.size {
            for b in self.row_iter(a) {
                out.push((a, b));
            }
        }
        out
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.size != other.size {
            return Err(Error::SizeMismatch(self.size, other.size));
        }
        Ok(())
    }

    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut r = self.clone();
        for (w, o) in r.bits.iter_mut().zip(&other.bits) {
            *w &= o;
        }
        Ok(r)
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut r = self.clone();
        for (w, o) in r.bits.iter_mut().zip(&other.bits) {
            *w |= o;
        }
        Ok(r)
    }

    /// Relational product: a (self ∘ other) c iff a self b other c for some b.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut r = Self::empty(self.size);
        for a in 0..self.size {
            let base = a * self.words;
            for b in self.row_iter(a) {
                for (k, w) in other.row(b).iter().enumerate() {
                    r.bits[base + k] |= w;
                }
            }
        }
        Ok(r)
    }

    pub fn converse(&self) -> Self {
        let mut r = Self::empty(self.size);
        for (a, b) in self.pairs() {
            r.set(b, a);
        }
        r
    }

    pub fn transitive_closure(&self) -> Self {
        // Warshall on bit rows
        let mut r = self.clone();
        let w = self.words;
        for k in 0..self.size {
            let row_k: Vec<u64> = r.row(k).to_vec();
            for a in 0..self.size {
                if r.get(a, k) {
                    for (j, x) in row_k.iter().enumerate() {
                        r.bits[a * w + j] |= x;
                    }
                }
            }
        }
        r
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// Least pair of `self` not in `other`.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize)> {
        (0..self.size).find_map(|a| {
            self.row_iter(a)
                .find(|&b| !other.get(a, b))
                .map(|b| (a, b))
        })
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.size).all(|i| self.get(i, i))
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.converse()
    }

    pub fn is_transitive(&self) -> bool {
        self.compose(self).unwrap().is_subset(self)
    }

    /// True if closed under every operation applied componentwise.
    pub fn is_admissible(&self, alg: &FiniteAlgebra) -> bool {
        let pairs = self.pairs();
        let arities: Vec<usize> = alg.operations.iter().map(|o| o.arity).collect();
        let mut ok = true;
        for (oi, &ar) in arities.iter().enumerate() {
            crate::algebra::for_each_fresh_tuple(ar, 0, pairs.len(), |idx| {
                if !ok {
                    return;
                }
                let l: Vec<usize> = idx.iter().map(|&i| pairs[i].0).collect();
                let r: Vec<usize> = idx.iter().map(|&i| pairs[i].1).collect();
                if !self.get(alg.apply(oi, &l), alg.apply(oi, &r)) {
                    ok = false;
                }
            });
        }
        ok
    }
}

/// Canonical JSON form of a relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationJson {
    pub size: usize,
    pub pairs: Vec<(usize, usize)>,
}

impl From<&BinaryRelation> for RelationJson {
    fn from(r: &BinaryRelation) -> Self {
        RelationJson {
            size: r.size(),
            pairs: r.pairs(),
        }
    }
}

fn guard(alg: &FiniteAlgebra) -> Result<()> {
    if alg.size > CONGRUENCE_GUARD {
        return Err(Error::Guard(format!(
            "universe {} exceeds {}",
            alg.size, CONGRUENCE_GUARD
        )));
    }
    Ok(())
}

/// Least congruence containing all `pairs`, by translation closure on a worklist.
pub fn congruence_generated(alg: &FiniteAlgebra, pairs: &[(usize, usize)]) -> Result<Partition> {
    guard(alg)?;
    let n = alg.size;
    let mut uf = UnionFind::new(n);
    let mut work = VecDeque::new();
    for &(a, b) in pairs {
        if a >= n || b >= n {
            return Err(Error::ElementOutOfRange(a.max(b)));
        }
        if uf.union(a, b) {
            work.push_back((a, b));
        }
    }
    let mut consts = vec![0usize; crate::algebra::MAX_ARITY];
    let mut full = Vec::with_capacity(crate::algebra::MAX_ARITY);
    while let Some((a, b)) = work.pop_front() {
        for (oi, op) in alg.operations.iter().enumerate() {
            let ar = op.arity;
            if ar == 0 {
                continue;
            }
            let others = n.pow(ar as u32 - 1);
            for pos in 0..ar {
                for c in 0..others {
                    crate::algebra::decode_into(c, n, &mut consts[..ar - 1]);
                    full.clear();
                    full.extend_from_slice(&consts[..pos]);
                    full.push(a);
                    full.extend_from_slice(&consts[pos..ar - 1]);
                    let u = alg.apply(oi, &full);
                    full[pos] = b;
                    let v = alg.apply(oi, &full);
                    if uf.union(u, v) {
                        work.push_back((u, v));
                    }
                }
            }
        }
    }
    Ok(Partition::from_union_find(uf))
}

/// Least congruence identifying `a` and `b`.
pub fn principal_congruence(alg: &FiniteAlgebra, a: usize, b: usize) -> Result<Partition> {
    congruence_generated(alg, &[(a, b)])
}

/// Every congruence: joins of principal congruences plus the identity, sorted canonically.
pub fn all_congruences(alg: &FiniteAlgebra, max_count: usize) -> Result<Vec<Partition>> {
    guard(alg)?;
    let n = alg.size;
    let mut principals: Vec<Partition> = Vec::new();
    let mut seen: HashSet<Partition> = HashSet::new();
    for a in 0..n {
        for b in a + 1..n {
            let p = principal_congruence(alg, a, b)?;
            if seen.insert(p.clone()) {
                principals.push(p);
            }
        }
    }
    let id = Partition::identity(n);
    let mut all: Vec<Partition> = vec![id.clone()];
    let mut set: HashSet<Partition> = HashSet::from([id]);
    for p in &principals {
        if set.insert(p.clone()) {
            all.push(p.clone());
        }
    }
    let mut i = 0;
    while i < all.len() {
        for p in &principals {
            let j = all[i].join(p);
            if set.insert(j.clone()) {
                all.push(j);
                if all.len() > max_count {
                    return Err(Error::Guard(format!("more than {max_count} congruences")));
                }
            }
        }
        i += 1;
    }
    if all.len() > max_count {
        return Err(Error::Guard(format!("more than {max_count} congruences")));
    }
    all.sort_by(|a, b| {
        a.num_blocks()
            .cmp(&b.num_blocks())
            .reverse()
            .then_with(|| a.blocks().cmp(&b.blocks()))
    });
    Ok(all)
}

/// Least relation containing `pairs` (and the diagonal if `reflexive`) closed under operations.
pub fn adm_closure(
    alg: &FiniteAlgebra,
    pairs: &[(usize, usize)],
    reflexive: bool,
) -> Result<BinaryRelation> {
    let n = alg.size;
    let mut seeds: Vec<(usize, usize)> = Vec::new();
    if reflexive {
        seeds.extend((0..n).map(|i| (i, i)));
    }
    for &(a, b) in pairs {
        if a >= n || b >= n {
            return Err(Error::ElementOutOfRange(a.max(b)));
        }
        seeds.push((a, b));
    }
    let arities: Vec<usize> = alg.operations.iter().map(|o| o.arity).collect();
    let closed = close_set(seeds, &arities, |oi, args| {
        let l: Vec<usize> = args.iter().map(|p| p.0).collect();
        let r: Vec<usize> = args.iter().map(|p| p.1).collect();
        (alg.apply(oi, &l), alg.apply(oi, &r))
    });
    BinaryRelation::from_pairs(n, &closed)
}

/// Coordinate tuples of a subuniverse of a product, in subalgebra order.
#[derive(Debug, Clone)]
pub struct ProductSub {
    pub tuples: Vec<Vec<usize>>,
}

/// Restriction of a product of partitions to the listed tuples.
pub fn induced_congruence(factors: &[Partition], sub: &ProductSub) -> Result<Partition> {
    for t in &sub.tuples {
        if t.len() != factors.len() {
            return Err(Error::Invalid("tuple length differs from factor count".into()));
        }
        for (c, p) in t.iter().zip(factors) {
            if *c >= p.size() {
                return Err(Error::ElementOutOfRange(*c));
            }
        }
    }
    Ok(Partition::from_key(sub.tuples.len(), |i| {
        sub.tuples[i]
            .iter()
            .zip(factors)
            .map(|(&c, p)| p.block_of(c))
            .collect::<Vec<_>>()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Operation;

    pub(crate) fn chain(k: usize) -> FiniteAlgebra {
        FiniteAlgebra::new(
            "C",
            k,
            vec![
                Operation {
                    name: "meet".into(),
                    arity: 2,
                    table: FiniteAlgebra::table_from_fn(k, 2, |a| a[0].min(a[1])),
                },
                Operation {
                    name: "join".into(),
                    arity: 2,
                    table: FiniteAlgebra::table_from_fn(k, 2, |a| a[0].max(a[1])),
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn principal_on_chains() {
        assert_eq!(
            principal_congruence(&chain(2), 0, 1).unwrap(),
            Partition::full(2)
        );
        let g = principal_congruence(&chain(4), 1, 2).unwrap();
        assert_eq!(g.blocks(), vec![vec![0], vec![1, 2], vec![3]]);
        assert_eq!(
            principal_congruence(&chain(4), 2, 2).unwrap(),
            Partition::identity(4)
        );
        let b = congruence_generated(&chain(4), &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(b.blocks(), vec![vec![0, 1], vec![2, 3]]);
        assert!(b.is_congruence(&chain(4)));
        assert_eq!(congruence_generated(&chain(4), &[]).unwrap(), Partition::identity(4));
    }

    #[test]
    fn congruence_counts() {
        assert_eq!(all_congruences(&chain(2), 100).unwrap().len(), 2);
        assert_eq!(all_congruences(&chain(3), 100).unwrap().len(), 4);
        assert_eq!(all_congruences(&chain(1), 100).unwrap().len(), 1);
        assert!(all_congruences(&chain(4), 3).is_err());
    }

    #[test]
    fn relation_algebra_basics() {
        let c4 = chain(4);
        let b = congruence_generated(&c4, &[(0, 1), (2, 3)]).unwrap().to_relation();
        let g = principal_congruence(&c4, 1, 2).unwrap().to_relation();
        let bg = b.compose(&g).unwrap();
        assert!(bg.get(0, 2));
        assert_eq!(bg.converse(), g.compose(&b).unwrap());
        assert_eq!(b.compose(&b).unwrap(), b);
        assert_eq!(b.meet(&BinaryRelation::full(4)).unwrap(), b);
        assert!(b.is_admissible(&c4));
        let bgb = bg.compose(&b).unwrap();
        let gbg = g.compose(&b).unwrap().compose(&g).unwrap();
        assert_eq!(bgb.first_difference(&gbg), Some((0, 3)));
    }

    #[test]
    fn adm_closure_basics() {
        let c4 = chain(4);
        assert_eq!(adm_closure(&c4, &[], true).unwrap(), BinaryRelation::diagonal(4));
        let b = congruence_generated(&c4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(adm_closure(&c4, &b.to_relation().pairs(), false).unwrap(), b.to_relation());
        let r = adm_closure(&c4, &[(0, 2)], true).unwrap();
        assert!(r.is_admissible(&c4));
        assert!(r.is_reflexive());
    }

    #[test]
    fn induced_restriction() {
        let p = Partition::from_blocks(2, &[vec![0, 1]]).unwrap();
        let id = Partition::identity(2);
        let sub = ProductSub {
            tuples: vec![vec![0, 0], vec![1, 0], vec![1, 1]],
        };
        let q = induced_congruence(&[p, id], &sub).unwrap();
        assert_eq!(q.blocks(), vec![vec![0, 1], vec![2]]);
    }
}
