//! Free algebras of finitely generated varieties, as subpowers generated by projections.
//!
//! An element is the concatenation, over the generator algebras, of the values
//! of a term at a fixed list of argument tuples ("points"). With all tuples as
//! points this is the free algebra itself; a smaller point set gives the
//! projection of the free algebra onto those coordinates, which is enough for
//! conditions whose equations only evaluate terms at those tuples.

use crate::algebra::{check_same_signature, decode_into, encode, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::term::Term;
use rayon::prelude::*;
use std::collections::HashMap;
use std::time::Instant;

/// How an element was first produced.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Prov {
    Var(usize),
    App(usize, Vec<u32>),
}

#[derive(Debug, Clone)]
pub struct FreeAlgebra {
    pub generators: Vec<FiniteAlgebra>,
    pub k: usize,
    /// Encoded argument tuples per generator.
    pub points: Vec<Vec<u32>>,
    offsets: Vec<usize>,
    width: usize,
    data: Vec<u8>,
    pub provenance: Vec<Prov>,
    index: HashMap<Box<[u8]>, u32>,
    /// Element index of each projection.
    pub projections: Vec<usize>,
    /// False when a budget stopped the closure early.
    pub complete: bool,
}

/// Limits for a closure run.
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub max_elements: usize,
    pub deadline: Option<Instant>,
}

impl Limits {
    pub fn elements(max_elements: usize) -> Self {
        Limits {
            max_elements,
            deadline: None,
        }
    }

    pub fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

/// Default element cap for three generators.
pub const F3_CAP: usize = 100_000;
/// Default element cap for four generators.
pub const F4_CAP: usize = 2_000_000;

/// The full free algebra on `k` generators.
pub fn build_free_algebra(generators: &[FiniteAlgebra], k: usize, budget: usize) -> Result<FreeAlgebra> {
    build_free_algebra_on(generators, k, |_| true, Limits::elements(budget))
}

/// The projection of the free algebra onto the tuples accepted by `keep`.
pub fn build_free_algebra_on(
    generators: &[FiniteAlgebra],
    k: usize,
    keep: impl Fn(&[usize]) -> bool,
    limits: Limits,
) -> Result<FreeAlgebra> {
    check_same_signature(generators)?;
    if k == 0 {
        return Err(Error::Invalid("arity must be at least 1".into()));
    }
    if let Some(g) = generators.iter().find(|g| g.size > 256) {
        return Err(Error::Invalid(format!(
            "generator {} has more than 256 elements",
            g.name
        )));
    }
    let mut points = Vec::new();
    let mut tuple = vec![0; k];
    for g in generators {
        let total = g.size.pow(k as u32);
        let mut pts = Vec::new();
        for i in 0..total {
            decode_into(i, g.size, &mut tuple);
            if keep(&tuple) {
                pts.push(i as u32);
            }
        }
        points.push(pts);
    }
    let mut offsets = Vec::new();
    let mut width = 0;
    for p in &points {
        offsets.push(width);
        width += p.len();
    }
    let mut fa = FreeAlgebra {
        generators: generators.to_vec(),
        k,
        points,
        offsets,
        width,
        data: Vec::new(),
        provenance: Vec::new(),
        index: HashMap::new(),
        projections: Vec::new(),
        complete: true,
    };
    for v in 0..k {
        let mut table = Vec::with_capacity(width);
        for (g, pts) in generators.iter().zip(&fa.points) {
            for &p in pts {
                decode_into(p as usize, g.size, &mut tuple);
                table.push(tuple[v] as u8);
            }
        }
        let idx = match fa.index.get(table.as_slice()) {
            Some(&i) => i as usize,
            None => fa.push(table, Prov::Var(v)),
        };
        fa.projections.push(idx);
    }
    fa.close(limits);
    Ok(fa)
}

impl FreeAlgebra {
    fn push(&mut self, table: Vec<u8>, prov: Prov) -> usize {
        let i = self.provenance.len();
        self.data.extend_from_slice(&table);
        self.index.insert(table.into_boxed_slice(), i as u32);
        self.provenance.push(prov);
        i
    }

    pub fn len(&self) -> usize {
        self.provenance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.provenance.is_empty()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn element(&self, i: usize) -> &[u8] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    pub fn find(&self, table: &[u8]) -> Option<usize> {
        self.index.get(table).map(|&i| i as usize)
    }

    /// Coordinate of argument tuple `tuple` in generator `g`, if it is a point.
    pub fn coordinate(&self, g: usize, tuple: &[usize]) -> Option<usize> {
        let code = encode(tuple, self.generators[g].size) as u32;
        self.points[g]
            .binary_search(&code)
            .ok()
            .map(|p| self.offsets[g] + p)
    }

    /// Applies signature operation `oi` to elements coordinatewise.
    pub fn apply(&self, oi: usize, args: &[usize], out: &mut Vec<u8>) {
        out.clear();
        let mut vals = [0usize; crate::algebra::MAX_ARITY];
        for (g, alg) in self.generators.iter().enumerate() {
            let table = &alg.operations[oi].table;
            let off = self.offsets[g];
            for c in off..off + self.points[g].len() {
                for (j, &a) in args.iter().enumerate() {
                    vals[j] = self.data[a * self.width + c] as usize;
                }
                out.push(table[encode(&vals[..args.len()], alg.size)] as u8);
            }
        }
    }

    fn close(&mut self, limits: Limits) {
        let arities: Vec<usize> = self.generators[0]
            .operations
            .iter()
            .map(|o| o.arity)
            .collect();
        let mut old = 0;
        while old < self.len() {
            let n = self.len();
            let mut found: Vec<(Vec<u8>, Prov)> = Vec::new();
            for (oi, &ar) in arities.iter().enumerate() {
                if ar == 0 {
                    if old == 0 {
                        let mut out = Vec::new();
                        self.apply(oi, &[], &mut out);
                        if self.find(&out).is_none() {
                            found.push((out, Prov::App(oi, vec![])));
                        }
                    }
                    continue;
                }
                let this = &*self;
                let chunks: Vec<Vec<(Vec<u8>, Prov)>> = (0..n)
                    .into_par_iter()
                    .map(|first| {
                        let mut local = Vec::new();
                        let mut seen: std::collections::HashSet<Vec<u8>> = Default::default();
                        let mut out = Vec::with_capacity(this.width);
                        let mut args = vec![first; ar];
                        let rest_fresh = if first >= old { 0 } else { old };
                        crate::algebra::for_each_fresh_tuple(ar - 1, rest_fresh, n, |rest| {
                            args[1..].copy_from_slice(rest);
                            this.apply(oi, &args, &mut out);
                            if this.find(&out).is_none() && !seen.contains(&out) {
                                seen.insert(out.clone());
                                local.push((
                                    out.clone(),
                                    Prov::App(oi, args.iter().map(|&a| a as u32).collect()),
                                ));
                            }
                        });
                        local
                    })
                    .collect();
                found.extend(chunks.into_iter().flatten());
            }
            old = n;
            for (table, prov) in found {
                if self.find(&table).is_none() {
                    if self.len() >= limits.max_elements {
                        self.complete = false;
                        return;
                    }
                    self.push(table, prov);
                }
            }
            if limits.expired() && old < self.len() {
                self.complete = false;
                return;
            }
        }
    }

    /// Provenance term of element `i`, over the variables `x, y, z, w, ...`.
    pub fn term(&self, i: usize) -> Term {
        let mut memo: HashMap<usize, Term> = HashMap::new();
        self.term_memo(i, &mut memo)
    }

    fn term_memo(&self, i: usize, memo: &mut HashMap<usize, Term>) -> Term {
        if let Some(t) = memo.get(&i) {
            return t.clone();
        }
        let t = match &self.provenance[i] {
            Prov::Var(v) => Term::Var(*v),
            Prov::App(oi, args) => {
                let name = self.generators[0].operations[*oi].name.clone();
                let sub = args
                    .iter()
                    .map(|&a| self.term_memo(a as usize, memo))
                    .collect();
                Term::App(name, sub)
            }
        };
        memo.insert(i, t.clone());
        t
    }

    /// Element of a term, evaluated on the points of every generator.
    pub fn eval_term(&self, term: &Term) -> Result<Vec<u8>> {
        let mut out = Vec::with_capacity(self.width);
        let mut tuple = vec![0; self.k];
        let mut stack = Vec::new();
        for (g, alg) in self.generators.iter().enumerate() {
            let c = crate::term::CompiledTerm::new(term, alg)?;
            for &p in &self.points[g] {
                decode_into(p as usize, alg.size, &mut tuple);
                out.push(c.eval(alg, &tuple, &mut stack) as u8);
            }
        }
        Ok(out)
    }

    /// Raw parts for serialization.
    pub fn raw_data(&self) -> &[u8] {
        &self.data
    }

    /// Rebuilds from serialized parts.
    pub fn from_parts(
        generators: Vec<FiniteAlgebra>,
        k: usize,
        points: Vec<Vec<u32>>,
        data: Vec<u8>,
        provenance: Vec<Prov>,
        projections: Vec<usize>,
        complete: bool,
    ) -> Result<FreeAlgebra> {
        let mut offsets = Vec::new();
        let mut width = 0;
        for p in &points {
            offsets.push(width);
            width += p.len();
        }
        if data.len() != width * provenance.len() {
            return Err(Error::Schema("free algebra data length mismatch".into()));
        }
        let mut index = HashMap::new();
        for i in 0..provenance.len() {
            index.insert(
                data[i * width..(i + 1) * width].to_vec().into_boxed_slice(),
                i as u32,
            );
        }
        Ok(FreeAlgebra {
            generators,
            k,
            points,
            offsets,
            width,
            data,
            provenance,
            index,
            projections,
            complete,
        })
    }
}
