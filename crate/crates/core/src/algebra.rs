//! Finite algebras given by operation tables.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};

/// Largest supported operation arity.
pub const MAX_ARITY: usize = 4;

/// A named operation with a flat table, row-major with the last argument fastest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Operation {
    pub name: String,
    pub arity: usize,
    pub table: Vec<u32>,
}

/// A finite algebra on the universe `0..size`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteAlgebra {
    pub name: String,
    pub size: usize,
    pub operations: Vec<Operation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

/// Unvalidated algebra description as read from JSON.
#[derive(Debug, Clone, Deserialize)]
pub struct RawAlgebra {
    pub name: String,
    pub size: usize,
    pub operations: Vec<RawOperation>,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RawOperation {
    pub name: String,
    pub arity: usize,
    pub table: Vec<i64>,
}

/// Checks every invariant of a raw description and returns the algebra.
pub fn validate_algebra(raw: RawAlgebra) -> Result<FiniteAlgebra> {
    let mut ops = Vec::with_capacity(raw.operations.len());
    for op in raw.operations {
        let mut table = Vec::with_capacity(op.table.len());
        for (pos, &v) in op.table.iter().enumerate() {
            if v < 0 || v as u64 >= raw.size as u64 {
                return Err(Error::EntryOutOfRange {
                    op: op.name.clone(),
                    pos,
                    value: v.max(0) as usize,
                    size: raw.size,
                });
            }
            table.push(v as u32);
        }
        ops.push(Operation {
            name: op.name,
            arity: op.arity,
            table,
        });
    }
    let mut alg = FiniteAlgebra::new(&raw.name, raw.size, ops)?;
    alg.labels = raw.labels;
    Ok(alg)
}

impl FiniteAlgebra {
    pub fn new(name: &str, size: usize, operations: Vec<Operation>) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyUniverse);
        }
        let mut seen = HashSet::new();
        for op in &operations {
            if op.arity > MAX_ARITY {
                return Err(Error::Arity {
                    op: op.name.clone(),
                    arity: op.arity,
                });
            }
            let expected = size.pow(op.arity as u32);
            if op.table.len() != expected {
                return Err(Error::TableLength {
                    op: op.name.clone(),
                    got: op.table.len(),
                    expected,
                });
            }
            if let Some(pos) = op.table.iter().position(|&v| v as usize >= size) {
                return Err(Error::EntryOutOfRange {
                    op: op.name.clone(),
                    pos,
                    value: op.table[pos] as usize,
                    size,
                });
            }
            if !seen.insert(op.name.clone()) {
                return Err(Error::DuplicateName(op.name.clone()));
            }
        }
        Ok(FiniteAlgebra {
            name: name.to_string(),
            size,
            operations,
            labels: None,
        })
    }

    /// Builds an operation by evaluating `f` on every argument tuple.
    pub fn table_from_fn(size: usize, arity: usize, mut f: impl FnMut(&[usize]) -> usize) -> Vec<u32> {
        let total = size.pow(arity as u32);
        let mut args = vec![0usize; arity];
        let mut table = Vec::with_capacity(total);
        for idx in 0..total {
            decode_into(idx, size, &mut args);
            table.push(f(&args) as u32);
        }
        table
    }

    pub fn op_index(&self, name: &str) -> Option<usize> {
        self.operations.iter().position(|o| o.name == name)
    }

    pub fn op(&self, name: &str) -> Result<&Operation> {
        self.operations
            .iter()
            .find(|o| o.name == name)
            .ok_or_else(|| Error::UnknownOperation(name.to_string()))
    }

    /// Applies operation `idx` to `args`.
    #[inline]
    pub fn apply(&self, idx: usize, args: &[usize]) -> usize {
        let op = &self.operations[idx];
        op.table[encode(args, self.size)] as usize
    }

    /// Operation names and arities in order.
    pub fn signature(&self) -> Vec<(String, usize)> {
        self.operations
            .iter()
            .map(|o| (o.name.clone(), o.arity))
            .collect()
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }
}

/// Mixed-radix index of a tuple over a uniform base, first argument most significant.
#[inline]
pub fn encode(args: &[usize], size: usize) -> usize {
    args.iter().fold(0, |acc, &a| acc * size + a)
}

/// Inverse of [`encode`] for a tuple of `out.len()` entries.
#[inline]
pub fn decode_into(mut idx: usize, size: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = idx % size;
        idx /= size;
    }
}

/// Enumerates every tuple in `[0, n)^arity` that has at least one entry `>= fresh`,
/// each exactly once; `fresh == 0` enumerates all tuples, including the empty one.
pub fn for_each_fresh_tuple(arity: usize, fresh: usize, n: usize, mut f: impl FnMut(&[usize])) {
    if arity == 0 {
        if fresh == 0 {
            f(&[]);
        }
        return;
    }
    let mut args = vec![0usize; arity];
    for p in 0..arity {
        // positions before p take old values, p a fresh one, after p anything
        let ranges: Vec<(usize, usize)> = (0..arity)
            .map(|i| match i.cmp(&p) {
                std::cmp::Ordering::Less => (0, fresh),
                std::cmp::Ordering::Equal => (fresh, n),
                std::cmp::Ordering::Greater => (0, n),
            })
            .collect();
        if ranges.iter().any(|&(lo, hi)| lo >= hi) {
            continue;
        }
        for (i, r) in ranges.iter().enumerate() {
            args[i] = r.0;
        }
        'outer: loop {
            f(&args);
            let mut i = arity;
            loop {
                if i == 0 {
                    break 'outer;
                }
                i -= 1;
                args[i] += 1;
                if args[i] < ranges[i].1 {
                    continue 'outer;
                }
                args[i] = ranges[i].0;
            }
        }
    }
}

/// A direct product together with its coordinate maps.
#[derive(Debug, Clone)]
pub struct Product {
    pub algebra: FiniteAlgebra,
    pub radices: Vec<usize>,
}

impl Product {
    /// Coordinates of a product element, first factor most significant.
    pub fn decode(&self, mut e: usize) -> Vec<usize> {
        let mut out = vec![0; self.radices.len()];
        for (slot, &r) in out.iter_mut().zip(&self.radices).rev() {
            *slot = e % r;
            e /= r;
        }
        out
    }

    pub fn encode(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.radices)
            .fold(0, |acc, (&c, &r)| acc * r + c)
    }
}

/// Mixed-radix encoding of coordinates.
pub fn encode_mixed(coords: &[usize], radices: &[usize]) -> usize {
    coords
        .iter()
        .zip(radices)
        .fold(0, |acc, (&c, &r)| acc * r + c)
}

/// Checks that all algebras share operation names and arities in order.
pub fn check_same_signature(algebras: &[FiniteAlgebra]) -> Result<()> {
    let first = algebras
        .first()
        .ok_or_else(|| Error::Signature("no algebras".into()))?
        .signature();
    for a in &algebras[1..] {
        if a.signature() != first {
            return Err(Error::Signature(format!(
                "{} and {} differ",
                algebras[0].name, a.name
            )));
        }
    }
    Ok(())
}

/// Direct product with coordinatewise operations.
pub fn direct_product(algebras: &[FiniteAlgebra]) -> Result<Product> {
    check_same_signature(algebras)?;
    let radices: Vec<usize> = algebras.iter().map(|a| a.size).collect();
    let size: usize = radices.iter().product();
    let name = algebras
        .iter()
        .map(|a| a.name.as_str())
        .collect::<Vec<_>>()
        .join(" x ");
    let proto = Product {
        algebra: FiniteAlgebra {
            name: name.clone(),
            size,
            operations: vec![],
            labels: None,
        },
        radices: radices.clone(),
    };
    let mut ops = Vec::new();
    for (oi, op) in algebras[0].operations.iter().enumerate() {
        let table = FiniteAlgebra::table_from_fn(size, op.arity, |args| {
            let coords: Vec<Vec<usize>> = args.iter().map(|&a| proto.decode(a)).collect();
            let out: Vec<usize> = algebras
                .iter()
                .enumerate()
                .map(|(j, alg)| {
                    let sub: Vec<usize> = coords.iter().map(|c| c[j]).collect();
                    alg.apply(oi, &sub)
                })
                .collect();
            proto.encode(&out)
        });
        ops.push(Operation {
            name: op.name.clone(),
            arity: op.arity,
            table,
        });
    }
    Ok(Product {
        algebra: FiniteAlgebra::new(&name, size, ops)?,
        radices,
    })
}

/// Reduct keeping the selected operations, renamed and in the given order.
pub fn reindex_operations(alg: &FiniteAlgebra, selection: &[(&str, &str)]) -> Result<FiniteAlgebra> {
    let mut ops = Vec::new();
    for (old, new) in selection {
        let op = alg.op(old)?;
        ops.push(Operation {
            name: new.to_string(),
            arity: op.arity,
            table: op.table.clone(),
        });
    }
    let mut out = FiniteAlgebra::new(&alg.name, alg.size, ops)?;
    out.labels = alg.labels.clone();
    Ok(out)
}

/// Closes a seed list under generic operations; returns elements in discovery order.
pub fn close_set<T, F>(seeds: Vec<T>, arities: &[usize], mut apply: F) -> Vec<T>
where
    T: Clone + Eq + std::hash::Hash,
    F: FnMut(usize, &[&T]) -> T,
{
    let mut elems: Vec<T> = Vec::new();
    let mut index: HashMap<T, usize> = HashMap::new();
    for s in seeds {
        if !index.contains_key(&s) {
            index.insert(s.clone(), elems.len());
            elems.push(s);
        }
    }
    let mut old = 0;
    while old < elems.len() {
        let n = elems.len();
        let mut found = Vec::new();
        for (oi, &ar) in arities.iter().enumerate() {
            for_each_fresh_tuple(ar, old, n, |args| {
                let refs: Vec<&T> = args.iter().map(|&i| &elems[i]).collect();
                let v = apply(oi, &refs);
                if !index.contains_key(&v) {
                    index.insert(v.clone(), usize::MAX);
                    found.push(v);
                }
            });
        }
        old = n;
        for v in found {
            index.insert(v.clone(), elems.len());
            elems.push(v);
        }
    }
    elems
}

/// A subalgebra with an order-preserving renumbering.
#[derive(Debug, Clone)]
pub struct Subalgebra {
    /// Sorted elements of the parent algebra.
    pub elements: Vec<usize>,
    pub algebra: FiniteAlgebra,
    /// Parent element to subalgebra index.
    pub map: HashMap<usize, usize>,
}

/// Least subuniverse containing `seeds`, with its induced subalgebra.
pub fn generate_subuniverse(alg: &FiniteAlgebra, seeds: &[usize]) -> Result<Subalgebra> {
    if seeds.is_empty() {
        return Err(Error::EmptySeeds);
    }
    if let Some(&bad) = seeds.iter().find(|&&s| s >= alg.size) {
        return Err(Error::ElementOutOfRange(bad));
    }
    let arities: Vec<usize> = alg.operations.iter().map(|o| o.arity).collect();
    let mut elems = close_set(seeds.to_vec(), &arities, |oi, args| {
        let a: Vec<usize> = args.iter().map(|&&v| v).collect();
        alg.apply(oi, &a)
    });
    elems.sort_unstable();
    restrict(alg, &elems)
}

/// Induced subalgebra on a closed, sorted element list.
pub fn restrict(alg: &FiniteAlgebra, elements: &[usize]) -> Result<Subalgebra> {
    let map: HashMap<usize, usize> = elements.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let n = elements.len();
    let mut ops = Vec::new();
    for (oi, op) in alg.operations.iter().enumerate() {
        let mut err = None;
        let table = FiniteAlgebra::table_from_fn(n, op.arity, |args| {
            let parent: Vec<usize> = args.iter().map(|&a| elements[a]).collect();
            let v = alg.apply(oi, &parent);
            match map.get(&v) {
                Some(&i) => i,
                None => {
                    err = Some(v);
                    0
                }
            }
        });
        if let Some(v) = err {
            return Err(Error::Invalid(format!("element set not closed: produces {v}")));
        }
        ops.push(Operation {
            name: op.name.clone(),
            arity: op.arity,
            table,
        });
    }
    Ok(Subalgebra {
        elements: elements.to_vec(),
        algebra: FiniteAlgebra::new(&alg.name, n, ops)?,
        map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn majority2() -> FiniteAlgebra {
        let t = FiniteAlgebra::table_from_fn(2, 3, |a| {
            if a[0] + a[1] + a[2] >= 2 {
                1
            } else {
                0
            }
        });
        FiniteAlgebra::new(
            "maj",
            2,
            vec![Operation {
                name: "m".into(),
                arity: 3,
                table: t,
            }],
        )
        .unwrap()
    }

    #[test]
    fn validation_errors() {
        let meet = Operation {
            name: "meet".into(),
            arity: 2,
            table: vec![0, 0, 0, 1],
        };
        assert!(FiniteAlgebra::new("2", 2, vec![meet.clone()]).is_ok());
        let short = Operation {
            table: vec![0, 0, 0],
            ..meet.clone()
        };
        let e = FiniteAlgebra::new("2", 2, vec![short]).unwrap_err();
        assert!(e.to_string().contains("table length"));
        let raw = RawAlgebra {
            name: "c4".into(),
            size: 4,
            operations: vec![RawOperation {
                name: "f".into(),
                arity: 1,
                table: vec![0, 1, 5, 3],
            }],
            labels: None,
        };
        assert!(validate_algebra(raw)
            .unwrap_err()
            .to_string()
            .contains("entry out of range"));
        let e = FiniteAlgebra::new("2", 2, vec![meet.clone(), meet]).unwrap_err();
        assert!(matches!(e, Error::DuplicateName(_)));
    }

    #[test]
    fn fresh_tuples_cover_exactly_once() {
        for ar in 0..4 {
            for fresh in 0..4 {
                let mut seen = HashSet::new();
                for_each_fresh_tuple(ar, fresh, 4, |t| {
                    assert!(seen.insert(t.to_vec()));
                    assert!(fresh == 0 || t.iter().any(|&v| v >= fresh));
                });
                let old = if fresh == 0 { 0 } else { fresh.pow(ar as u32) };
                let expected = 4usize.pow(ar as u32) - old;
                assert_eq!(seen.len(), expected, "arity {ar} fresh {fresh}");
            }
        }
    }

    #[test]
    fn product_of_majorities() {
        let m = majority2();
        let p = direct_product(&[m.clone(), m.clone()]).unwrap();
        assert_eq!(p.algebra.size, 4);
        let a = p.encode(&[0, 1]);
        let b = p.encode(&[1, 0]);
        assert_eq!(p.decode(p.algebra.apply(0, &[a, a, b])), vec![0, 1]);
        let sub = generate_subuniverse(&p.algebra, &[a, b]).unwrap();
        assert_eq!(sub.elements, {
            let mut v = vec![a, b];
            v.sort();
            v
        });
        let single = direct_product(&[m.clone()]).unwrap();
        assert_eq!(single.algebra.operations, m.operations);
    }

    #[test]
    fn reindex_renames() {
        let m = majority2();
        let r = reindex_operations(&m, &[("m", "t1")]).unwrap();
        assert_eq!(r.operations[0].name, "t1");
        assert_eq!(r.operations[0].table, m.operations[0].table);
        assert!(reindex_operations(&m, &[("q", "t1")]).is_err());
        assert!(reindex_operations(&m, &[("m", "a"), ("m", "a")]).is_err());
    }
}
