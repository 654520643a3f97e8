//! Factories for lattice and Boolean reducts, the subalgebra B(a,d), the
//! counterexample instances and the Polin fixture.

use crate::algebra::{check_same_signature, close_set, encode_mixed, FiniteAlgebra, Operation};
use crate::condition::{ChainCondition, Family, TermChain};
use crate::error::{Error, Result};
use crate::relation::{induced_congruence, Partition, ProductSub};
use crate::relexpr::{
    check_inclusion, eval_rel_expr, lhs_abgb, modular_identity, mv, reversed_modular_identity,
    Binding, Identity, Inclusion, RelExpr,
};
use crate::term::{check_equation, term_table, EqCheck, Equation, Term};
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

/// Largest B(a,d) whose operation tables are built eagerly by the induction.
pub const TABLE_CAP: usize = 256;
/// Default cap on the induction depth.
pub const INDUCTION_CAP: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseKind {
    Chain(usize),
    Bool2,
    Bool4,
}

impl BaseKind {
    /// Accepts `chain:K`, `bool2`, `bool4`.
    pub fn parse(s: &str) -> Result<BaseKind> {
        match s {
            "bool2" => Ok(BaseKind::Bool2),
            "bool4" => Ok(BaseKind::Bool4),
            _ => {
                let k = s
                    .strip_prefix("chain:")
                    .and_then(|k| k.parse().ok())
                    .ok_or_else(|| Error::Invalid(format!("unknown base {s}")))?;
                Ok(BaseKind::Chain(k))
            }
        }
    }

    fn label(self) -> String {
        match self {
            BaseKind::Chain(k) => format!("C{k}"),
            BaseKind::Bool2 => "2".into(),
            BaseKind::Bool4 => "4".into(),
        }
    }
}

fn binary(name: &str, size: usize, f: impl Fn(usize, usize) -> usize) -> Operation {
    Operation {
        name: name.into(),
        arity: 2,
        table: FiniteAlgebra::table_from_fn(size, 2, |a| f(a[0], a[1])),
    }
}

/// Chain lattice or Boolean algebra with `meet`, `join` (and `comp`).
pub fn make_base(kind: BaseKind) -> Result<FiniteAlgebra> {
    let (size, mut ops, labels) = match kind {
        BaseKind::Chain(k) => {
            if k == 0 {
                return Err(Error::Invalid("chain needs at least one element".into()));
            }
            (k, vec![binary("meet", k, usize::min), binary("join", k, usize::max)], None)
        }
        BaseKind::Bool2 | BaseKind::Bool4 => {
            let size = if kind == BaseKind::Bool2 { 2 } else { 4 };
            let ops = vec![binary("meet", size, |a, b| a & b), binary("join", size, |a, b| a | b)];
            let labels = (size == 4).then(|| vec!["0".into(), "1".into(), "1'".into(), "2".into()]);
            (size, ops, labels)
        }
    };
    if matches!(kind, BaseKind::Bool2 | BaseKind::Bool4) {
        ops.push(Operation {
            name: "comp".into(),
            arity: 1,
            table: (0..size).map(|x| (size - 1 - x) as u32).collect(),
        });
    }
    let mut alg = FiniteAlgebra::new(&kind.label(), size, ops)?;
    alg.labels = labels;
    Ok(alg)
}

/// Reduct recipes; operations come out as `t1..t{n-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Recipe {
    Bak { n: usize },
    Ba { n: usize },
    Lin { i: usize, n: usize },
    Ain { i: usize, n: usize },
    LinMid { n: usize },
    AinMid { n: usize },
    AinStar { i: usize, n: usize },
    PlusWrap(Box<Recipe>),
}

impl Recipe {
    fn boolean(&self) -> bool {
        match self {
            Recipe::Ba { .. } | Recipe::Ain { .. } | Recipe::AinMid { .. } | Recipe::AinStar { .. } => true,
            Recipe::PlusWrap(r) => r.boolean(),
            _ => false,
        }
    }

    fn superscript(&self) -> String {
        match self {
            Recipe::Bak { n } | Recipe::Ba { n } => format!("^r{n}"),
            Recipe::Lin { i, n } | Recipe::Ain { i, n } => format!("^{{{i},{n}}}"),
            Recipe::LinMid { n } | Recipe::AinMid { n } => format!("^{{{},{n}}}", n / 2),
            Recipe::AinStar { i, n } => format!("^{{{i},{n},*}}"),
            Recipe::PlusWrap(r) => {
                let inner = r.superscript();
                format!("{}+", inner)
            }
        }
    }
}

fn m(a: Term, b: Term) -> Term {
    Term::app("meet", vec![a, b])
}
fn j(a: Term, b: Term) -> Term {
    Term::app("join", vec![a, b])
}
fn c(a: Term) -> Term {
    Term::app("comp", vec![a])
}
fn x() -> Term {
    Term::Var(0)
}
fn y() -> Term {
    Term::Var(1)
}
fn z() -> Term {
    Term::Var(2)
}

/// `xy + xz + yz`.
pub fn majority_term() -> Term {
    j(j(m(x(), y()), m(x(), z())), m(y(), z()))
}

/// `xy' + xz + y'z`.
pub fn pixley_term() -> Term {
    j(j(m(x(), c(y())), m(x(), z())), m(c(y()), z()))
}

fn indexed_terms(i: usize, n: usize, first: Term, last: Term) -> Result<Vec<Term>> {
    if i == 0 || 2 * i >= n {
        return Err(Error::Invalid(format!("index {i} out of range for n = {n}")));
    }
    Ok((1..n)
        .map(|h| {
            if h < i {
                x()
            } else if h == i {
                first.clone()
            } else if h < n - i {
                m(x(), z())
            } else if h == n - i {
                last.clone()
            } else {
                z()
            }
        })
        .collect())
}

fn mid_terms(n: usize, middle: Term) -> Result<Vec<Term>> {
    if n < 2 || n % 2 == 1 {
        return Err(Error::Invalid(format!("middle reduct needs even n, got {n}")));
    }
    let l = n / 2;
    Ok((1..n)
        .map(|h| match h.cmp(&l) {
            std::cmp::Ordering::Less => x(),
            std::cmp::Ordering::Equal => middle.clone(),
            std::cmp::Ordering::Greater => z(),
        })
        .collect())
}

/// The term formulas `t1..t{n-1}` of a recipe over `meet`, `join`, `comp`.
pub fn recipe_terms(recipe: &Recipe) -> Result<Vec<Term>> {
    let lat_first = || m(x(), j(y(), z()));
    let lat_last = || m(z(), j(y(), x()));
    let bool_first = || m(x(), j(c(y()), z()));
    let bool_last = || m(z(), j(c(y()), x()));
    match *recipe {
        Recipe::Bak { n } | Recipe::Ba { n } if n < 3 => {
            Err(Error::Invalid(format!("construction needs n >= 3, got {n}")))
        }
        Recipe::Bak { n } => indexed_terms(1, n, lat_first(), lat_last()),
        Recipe::Ba { n } => indexed_terms(1, n, bool_first(), bool_last()),
        Recipe::Lin { i, n } if 2 * i == n => mid_terms(n, majority_term()),
        Recipe::Ain { i, n } if 2 * i == n => mid_terms(n, pixley_term()),
        Recipe::Lin { i, n } => indexed_terms(i, n, lat_first(), lat_last()),
        Recipe::Ain { i, n } => indexed_terms(i, n, bool_first(), bool_last()),
        Recipe::AinStar { i, n } => indexed_terms(i, n, bool_first(), lat_last()),
        Recipe::LinMid { n } => mid_terms(n, majority_term()),
        Recipe::AinMid { n } => mid_terms(n, pixley_term()),
        Recipe::PlusWrap(ref inner) => {
            let mut terms = vec![x()];
            terms.extend(recipe_terms(inner)?);
            terms.push(z());
            Ok(terms)
        }
    }
}

/// Evaluates a recipe over a base lattice or Boolean algebra.
pub fn make_reduct(recipe: &Recipe, base: &FiniteAlgebra) -> Result<FiniteAlgebra> {
    if base.op_index("meet").is_none() || base.op_index("join").is_none() {
        return Err(Error::Invalid(format!("base {} lacks meet/join", base.name)));
    }
    if recipe.boolean() && base.op_index("comp").is_none() {
        return Err(Error::Invalid(format!("base {} lacks a complement", base.name)));
    }
    let terms = recipe_terms(recipe)?;
    let offset = usize::from(!matches!(recipe, Recipe::PlusWrap(_)));
    let mut ops = Vec::with_capacity(terms.len());
    for (k, t) in terms.iter().enumerate() {
        ops.push(Operation {
            name: format!("t{}", k + offset),
            arity: 3,
            table: term_table(t, base, 3)?,
        });
    }
    let name = format!("{}{}", base.name, recipe.superscript());
    let mut alg = FiniteAlgebra::new(&name, base.size, ops)?;
    alg.labels = base.labels.clone();
    Ok(alg)
}

fn projection(size: usize, coord: usize, name: String) -> Operation {
    Operation {
        name,
        arity: 3,
        table: FiniteAlgebra::table_from_fn(size, 3, |a| a[coord]),
    }
}

fn require_ternary(alg: &FiniteAlgebra) -> Result<()> {
    match alg.operations.iter().find(|o| o.arity != 3) {
        Some(o) => Err(Error::Arity {
            op: o.name.clone(),
            arity: o.arity,
        }),
        None => Ok(()),
    }
}

/// Adds the projections `t0` and `t{k+1}` around `k` ternary operations `t1..tk`.
pub fn plus_wrap(alg: &FiniteAlgebra) -> Result<FiniteAlgebra> {
    require_ternary(alg)?;
    let k = alg.operations.len();
    let mut ops = vec![projection(alg.size, 0, "t0".into())];
    ops.extend(alg.operations.iter().cloned());
    ops.push(projection(alg.size, 2, format!("t{}", k + 1)));
    let mut out = FiniteAlgebra::new(&format!("{}+", alg.name), alg.size, ops)?;
    out.labels = alg.labels.clone();
    Ok(out)
}

fn name_index(name: &str) -> Option<usize> {
    let digits = name.trim_start_matches(|c: char| !c.is_ascii_digit());
    if digits.is_empty() || name.len() == digits.len() {
        return None;
    }
    digits.parse().ok()
}

/// Relabels ternary operations `s0..s{n-2}` as `t1..t{n-1}`: an operation whose
/// name ends in `k` becomes `t{k+1}`, otherwise position decides. With `plus`,
/// the projections `t0 = x` and `tn = z` are added around them.
pub fn shift_pad(d: &FiniteAlgebra, plus: bool) -> Result<FiniteAlgebra> {
    require_ternary(d)?;
    let indices: Vec<usize> = match d.operations.iter().map(|o| name_index(&o.name)).collect::<Option<Vec<_>>>() {
        Some(ix) if ix.windows(2).all(|w| w[0] + 1 == w[1]) => ix,
        _ => (0..d.operations.len()).collect(),
    };
    let mut ops: Vec<Operation> = d
        .operations
        .iter()
        .zip(&indices)
        .map(|(o, k)| Operation {
            name: format!("t{}", k + 1),
            arity: 3,
            table: o.table.clone(),
        })
        .collect();
    if plus {
        let first = indices.first().map_or(1, |k| k + 1);
        let last = indices.last().map_or(0, |k| k + 1);
        if first == 0 {
            return Err(Error::Shape("no room for a leading projection".into()));
        }
        ops.insert(0, projection(d.size, 0, format!("t{}", first - 1)));
        ops.push(projection(d.size, 2, format!("t{}", last + 1)));
    }
    let mut out = FiniteAlgebra::new(&format!("shift({})", d.name), d.size, ops)?;
    out.labels = d.labels.clone();
    Ok(out)
}

/// Generators of the varieties `V_n^a .. V_n^d` and `V_n^g` over the two-element bases.
pub fn variety_preset(name: char, n: usize) -> Result<Vec<FiniteAlgebra>> {
    if n < 2 {
        return Err(Error::Invalid(format!("preset needs n >= 2, got {n}")));
    }
    if name == 'd' && n < 4 {
        return Err(Error::Invalid(format!("preset d needs n >= 4, got {n}")));
    }
    let l = n / 2;
    let lattice = make_base(BaseKind::Chain(2))?;
    let boolean = make_base(BaseKind::Bool2)?;
    let mut out = Vec::new();
    for i in 1..=l {
        let use_lattice = match name {
            'a' => i % 2 == 1,
            'b' => i % 2 == 0,
            'c' => true,
            'd' => i != 1,
            'g' => false,
            _ => return Err(Error::Invalid(format!("unknown preset {name}"))),
        };
        let (recipe, base) = if use_lattice {
            (Recipe::Lin { i, n }, &lattice)
        } else {
            (Recipe::Ain { i, n }, &boolean)
        };
        out.push(make_reduct(&recipe, base)?);
    }
    Ok(out)
}

/// The operation-symbol chain `x, t1, ..., t{n-1}, z` of a preset's generators.
pub fn operation_chain(family: Family, n: usize) -> Result<TermChain> {
    let spec = family
        .spec(n)
        .ok_or_else(|| Error::Invalid(format!("{family} undefined at n = {n}")))?;
    let mut terms = vec![x()];
    terms.extend((1..n).map(|h| Term::op_vars(&format!("t{h}"), &[0, 1, 2])));
    terms.push(z());
    TermChain::new(ChainCondition::Mixed(spec), terms)
}

/// The four shapes of Construction-style subuniverse members.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BType {
    I,
    II,
    III,
    IV,
}

impl fmt::Display for BType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BType::I => "I",
            BType::II => "II",
            BType::III => "III",
            BType::IV => "IV",
        })
    }
}

/// First matching type in the order I, II, III, IV.
pub fn classify(t: &[usize], zeros: [usize; 3], a: usize, d: usize) -> Option<BType> {
    let [z1, z2, z3] = zeros;
    if t[1] == z2 && t[3] == a {
        Some(BType::I)
    } else if t[0] == z1 && t[1] == z2 {
        Some(BType::II)
    } else if t[0] == z1 && t[3] == d {
        Some(BType::III)
    } else if t[2] == z3 {
        Some(BType::IV)
    } else {
        None
    }
}

fn op_name(h: usize) -> String {
    format!("t{h}")
}

/// Checks the premises on A1..A4: zero absorption on A1..A3, and projections at
/// the ends plus middle idempotency on A4. Returns `n`.
pub fn check_b_premises(comps: &[FiniteAlgebra], zeros: [usize; 3]) -> Result<usize> {
    if comps.len() != 4 {
        return Err(Error::Invalid("B(a,d) needs four component algebras".into()));
    }
    check_same_signature(comps)?;
    let n = comps[0].operations.len() + 1;
    if n < 3 {
        return Err(Error::Precondition(format!("B(a,d) needs n >= 3, got {n}")));
    }
    for (k, o) in comps[0].operations.iter().enumerate() {
        if o.arity != 3 || o.name != op_name(k + 1) {
            return Err(Error::Precondition(format!(
                "component operations must be ternary t1..t{}",
                n - 1
            )));
        }
    }
    for (jdx, alg) in comps[..3].iter().enumerate() {
        let zero = zeros[jdx];
        if zero >= alg.size {
            return Err(Error::ElementOutOfRange(zero));
        }
        for h in 1..n {
            let oi = h - 1;
            for u in 0..alg.size {
                for v in 0..alg.size {
                    if h <= n - 2 && alg.apply(oi, &[zero, u, v]) != zero {
                        return Err(Error::Precondition(format!(
                            "A{}: 0 = t{h}(0,y,z) fails at y={u}, z={v}",
                            jdx + 1
                        )));
                    }
                    if h >= 2 && alg.apply(oi, &[u, v, zero]) != zero {
                        return Err(Error::Precondition(format!(
                            "A{}: t{h}(x,y,0) = 0 fails at x={u}, y={v}",
                            jdx + 1
                        )));
                    }
                }
            }
        }
    }
    let a4 = std::slice::from_ref(&comps[3]);
    let t = |h: usize| Term::op_vars(&op_name(h), &[0, 1, 2]);
    let mut eqs = vec![
        ("t1 = x".to_string(), Equation::new(t(1), x(), 3)),
        (format!("t{} = z", n - 1), Equation::new(t(n - 1), z(), 3)),
    ];
    for h in 2..=n - 2 {
        eqs.push((
            format!("x = t{h}(x,y,x)"),
            Equation::new(Term::op_vars(&op_name(h), &[0, 1, 0]), x(), 2),
        ));
    }
    for (label, eq) in eqs {
        if let EqCheck::Fails { assignment, .. } = check_equation(a4, &eq)? {
            return Err(Error::Precondition(format!("A4: {label} fails at {assignment:?}")));
        }
    }
    Ok(n)
}

/// The subuniverse B(a,d) of A1×A2×A3×A4 together with its induced algebra.
#[derive(Debug, Clone)]
pub struct BOfAd {
    pub components: Vec<FiniteAlgebra>,
    pub zeros: [usize; 3],
    pub a: usize,
    pub d: usize,
    /// Members in lexicographic order.
    pub tuples: Vec<Vec<usize>>,
    pub algebra: FiniteAlgebra,
}

impl BOfAd {
    pub fn classify(&self, t: &[usize]) -> Option<BType> {
        classify(t, self.zeros, self.a, self.d)
    }

    pub fn index_of(&self, t: &[usize]) -> Option<usize> {
        self.tuples.binary_search_by(|u| u.as_slice().cmp(t)).ok()
    }
}

/// Members of B(a,d) in lexicographic order, without operation tables.
pub fn b_universe(comps: &[FiniteAlgebra], zeros: [usize; 3], a: usize, d: usize) -> Vec<Vec<usize>> {
    let sizes: Vec<usize> = comps.iter().map(|c| c.size).collect();
    let mut out = Vec::new();
    for p in 0..sizes[0] {
        for q in 0..sizes[1] {
            for r in 0..sizes[2] {
                for s in 0..sizes[3] {
                    let t = vec![p, q, r, s];
                    if classify(&t, zeros, a, d).is_some() {
                        out.push(t);
                    }
                }
            }
        }
    }
    out
}

fn apply_coordinatewise(comps: &[FiniteAlgebra], oi: usize, args: &[&Vec<usize>]) -> Vec<usize> {
    comps
        .iter()
        .enumerate()
        .map(|(k, alg)| {
            let a: Vec<usize> = args.iter().map(|t| t[k]).collect();
            alg.apply(oi, &a)
        })
        .collect()
}

/// Operation tables of the sub-product on `tuples` (sorted); errors if not closed.
pub fn tuple_algebra(name: &str, comps: &[FiniteAlgebra], tuples: &[Vec<usize>]) -> Result<FiniteAlgebra> {
    let radix: Vec<usize> = comps.iter().map(|c| c.size).collect();
    let product = radix.iter().try_fold(1usize, |p, &r| p.checked_mul(r));
    // dense lookup from product codes to tuple indices when the product is small
    let dense: Option<Vec<u32>> = product.filter(|&p| p <= 1 << 24).map(|p| {
        let mut index = vec![u32::MAX; p];
        for (i, t) in tuples.iter().enumerate() {
            index[encode_mixed(t, &radix)] = i as u32;
        }
        index
    });
    let sparse: HashMap<&[usize], u32> = if dense.is_some() {
        HashMap::new()
    } else {
        tuples.iter().enumerate().map(|(i, t)| (t.as_slice(), i as u32)).collect()
    };
    let size = tuples.len();
    let mut ops = Vec::new();
    for (oi, op) in comps[0].operations.iter().enumerate() {
        let ar = op.arity;
        let rows: usize = size.pow(ar.saturating_sub(1) as u32);
        let firsts: Vec<usize> = if ar == 0 { vec![0] } else { (0..size).collect() };
        let chunks: Vec<Result<Vec<u32>>> = firsts
            .par_iter()
            .map(|&first| {
                let count = if ar == 0 { 1 } else { rows };
                let mut out = Vec::with_capacity(count);
                let mut idx = vec![0usize; ar];
                let mut v = vec![0usize; comps.len()];
                for r in 0..count {
                    if ar > 0 {
                        idx[0] = first;
                        crate::algebra::decode_into(r, size, &mut idx[1..]);
                    }
                    for (k, alg) in comps.iter().enumerate() {
                        let at = idx.iter().fold(0, |acc, &i| acc * alg.size + tuples[i][k]);
                        v[k] = alg.operations[oi].table[at] as usize;
                    }
                    let found = match &dense {
                        Some(index) => index[encode_mixed(&v, &radix)],
                        None => sparse.get(v.as_slice()).copied().unwrap_or(u32::MAX),
                    };
                    match found {
                        u32::MAX => {
                            let args: Vec<&Vec<usize>> = idx.iter().map(|&i| &tuples[i]).collect();
                            return Err(Error::Invalid(format!("not closed: {}{args:?} = {v:?}", op.name)));
                        }
                        e => out.push(e),
                    }
                }
                Ok(out)
            })
            .collect();
        let mut table = Vec::with_capacity(size.pow(ar as u32));
        for chunk in chunks {
            table.extend(chunk?);
        }
        ops.push(Operation {
            name: op.name.clone(),
            arity: ar,
            table,
        });
    }
    let mut alg = FiniteAlgebra::new(name, size, ops)?;
    alg.labels = Some(
        tuples
            .iter()
            .map(|t| {
                let parts: Vec<String> = t.iter().map(|v| v.to_string()).collect();
                format!("({})", parts.join(","))
            })
            .collect(),
    );
    Ok(alg)
}

/// Builds B(a,d) after checking the premises; closure is re-verified while
/// building the tables.
pub fn make_b_of_ad(comps: &[FiniteAlgebra], zeros: [usize; 3], a: usize, d: usize) -> Result<BOfAd> {
    check_b_premises(comps, zeros)?;
    for e in [a, d] {
        if e >= comps[3].size {
            return Err(Error::ElementOutOfRange(e));
        }
    }
    let tuples = b_universe(comps, zeros, a, d);
    let algebra = tuple_algebra("B(a,d)", comps, &tuples).map_err(|e| match e {
        Error::Invalid(msg) => Error::Invalid(format!("B(a,d) {msg}")),
        other => other,
    })?;
    Ok(BOfAd {
        components: comps.to_vec(),
        zeros,
        a,
        d,
        tuples,
        algebra,
    })
}

/// Right-hand side shape of an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Chi {
    /// Alternating chain of `r` factors, as in the numbered clauses.
    Alternating(usize),
    /// An arbitrary expression over `a`, `b`, `g`.
    Expr(RelExpr),
}

/// Data on A4: the algebra with `t1..t{n-1}`, its congruences and elements.
#[derive(Debug, Clone)]
pub struct A4Data {
    pub algebra: FiniteAlgebra,
    pub alpha: Partition,
    pub beta: Partition,
    pub gamma: Partition,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
}

impl A4Data {
    fn binding(&self) -> Binding {
        binding_of(&self.alpha, &self.beta, &self.gamma)
    }
}

fn binding_of(alpha: &Partition, beta: &Partition, gamma: &Partition) -> Binding {
    let mut b = Binding::new();
    b.insert('a', alpha.to_relation());
    b.insert('b', beta.to_relation());
    b.insert('g', gamma.to_relation());
    b
}

#[derive(Debug, Clone)]
pub enum WitnessKind {
    Thmbak { a4: A4Data, chi: Chi },
    Thmbakbis { a4: A4Data, chi: Chi },
    /// `delta` and `eps` are `'b'` or `'g'`; ignored for alternating `chi`.
    ThmbaIii { a4: A4Data, chi: Chi, delta: char, eps: char },
    ThmbaIv { a4: A4Data, chi: Chi, delta: char, eps: char },
    BakerPlus,
    Induction { family: char, n: usize },
}

/// A finite algebra with congruences and an identity expected to fail at a pair.
#[derive(Debug, Clone)]
pub struct CounterexampleInstance {
    pub name: String,
    pub algebra: FiniteAlgebra,
    /// Component tuples of the elements (one entry for one-factor instances).
    pub tuples: Vec<Vec<usize>>,
    /// Size of the full B(a,d) before any restriction.
    pub full_size: usize,
    pub bindings: BTreeMap<char, Partition>,
    pub identity: Identity,
    pub elements: Vec<(String, usize)>,
    pub expected: (usize, usize),
}

/// Outcome of checking an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceCheck {
    pub congruences: bool,
    pub pair_in_lhs: bool,
    pub pair_in_rhs: bool,
    pub inclusion: Inclusion,
}

impl InstanceCheck {
    /// The identity fails at the designated pair.
    pub fn fails_as_expected(&self) -> bool {
        self.congruences && self.pair_in_lhs && !self.pair_in_rhs
    }
}

impl CounterexampleInstance {
    pub fn binding(&self) -> Binding {
        self.bindings.iter().map(|(&k, p)| (k, p.to_relation())).collect()
    }

    pub fn element(&self, name: &str) -> Option<usize> {
        self.elements.iter().find(|(n, _)| n == name).map(|&(_, e)| e)
    }

    pub fn check(&self) -> Result<InstanceCheck> {
        let binding = self.binding();
        let congruences = self.bindings.values().all(|p| p.is_congruence(&self.algebra));
        let lhs = eval_rel_expr(&self.identity.lhs, &binding, &self.algebra)?;
        let rhs = eval_rel_expr(&self.identity.rhs, &binding, &self.algebra)?;
        let (p, q) = self.expected;
        Ok(InstanceCheck {
            congruences,
            pair_in_lhs: lhs.get(p, q),
            pair_in_rhs: rhs.get(p, q),
            inclusion: check_inclusion(&self.identity, &binding, &self.algebra)?,
        })
    }

    /// Restriction to the subalgebra generated by the named elements.
    pub fn compact(&self) -> Result<CounterexampleInstance> {
        let seeds: Vec<usize> = self.elements.iter().map(|&(_, e)| e).collect();
        let sub = crate::algebra::generate_subuniverse(&self.algebra, &seeds)?;
        let mut bindings = BTreeMap::new();
        for (&k, p) in &self.bindings {
            let key: Vec<usize> = sub.elements.iter().map(|&e| p.block_of(e)).collect();
            bindings.insert(k, Partition::from_key(sub.elements.len(), |i| key[i]));
        }
        let mut algebra = sub.algebra;
        algebra.name = format!("Sg({})", self.name);
        algebra.labels = self
            .algebra
            .labels
            .as_ref()
            .map(|l| sub.elements.iter().map(|&e| l[e].clone()).collect());
        Ok(CounterexampleInstance {
            name: algebra.name.clone(),
            tuples: sub.elements.iter().map(|&e| self.tuples[e].clone()).collect(),
            full_size: self.full_size,
            bindings,
            identity: self.identity.clone(),
            elements: self.elements.iter().map(|(n, e)| (n.clone(), sub.map[e])).collect(),
            expected: (sub.map[&self.expected.0], sub.map[&self.expected.1]),
            algebra,
        })
    }
}

/// Least `(a, b, c, d)` with `a α d`, `a β b αγ c β d` and `(a,d)` outside `chi`.
pub fn find_a4_witness(
    alg: &FiniteAlgebra,
    alpha: &Partition,
    beta: &Partition,
    gamma: &Partition,
    chi: &RelExpr,
) -> Result<Option<(usize, usize, usize, usize)>> {
    let binding = binding_of(alpha, beta, gamma);
    let rhs = eval_rel_expr(chi, &binding, alg)?;
    let ag = alpha.meet(gamma);
    for a in 0..alg.size {
        for d in 0..alg.size {
            if !alpha.related(a, d) || rhs.get(a, d) {
                continue;
            }
            for b in 0..alg.size {
                if !beta.related(a, b) {
                    continue;
                }
                if let Some(c) = (0..alg.size).find(|&c| ag.related(b, c) && beta.related(c, d)) {
                    return Ok(Some((a, b, c, d)));
                }
            }
        }
    }
    Ok(None)
}

/// Least `(a, b, d)` with `a α d`, `a β b γ d` and `(a,d)` outside `chi`.
pub fn find_a4_witness_bg(
    alg: &FiniteAlgebra,
    alpha: &Partition,
    beta: &Partition,
    gamma: &Partition,
    chi: &RelExpr,
) -> Result<Option<(usize, usize, usize)>> {
    let binding = binding_of(alpha, beta, gamma);
    let rhs = eval_rel_expr(chi, &binding, alg)?;
    for a in 0..alg.size {
        for d in 0..alg.size {
            if !alpha.related(a, d) || rhs.get(a, d) {
                continue;
            }
            if let Some(b) = (0..alg.size).find(|&b| beta.related(a, b) && gamma.related(b, d)) {
                return Ok(Some((a, b, d)));
            }
        }
    }
    Ok(None)
}

fn blocks(size: usize, blocks: &[&[usize]]) -> Partition {
    let owned: Vec<Vec<usize>> = blocks.iter().map(|b| b.to_vec()).collect();
    Partition::from_blocks(size, &owned).expect("fixed partition")
}

fn var(ch: char) -> RelExpr {
    RelExpr::Var(ch)
}

/// Right side of the A4 failure a numbered clause assumes.
fn chi_on_a4(kind: &str, chi: &Chi) -> RelExpr {
    match chi {
        Chi::Expr(e) => e.clone(),
        Chi::Alternating(r) => match kind {
            "thmbak" => RelExpr::alt_chain(mv('a', 'b'), mv('a', 'g'), *r),
            _ => RelExpr::alt_chain(mv('a', 'g'), mv('a', 'b'), *r),
        },
    }
}

/// Shape of one of the proofs: bases, factor congruences, elements and identity.
struct Plan {
    name: String,
    bases: [FiniteAlgebra; 3],
    beta: [Partition; 3],
    gamma: [Partition; 3],
    elements: Vec<(String, [usize; 3], usize)>,
    identity: Identity,
    expected: (usize, usize),
}

fn lhs_bg() -> RelExpr {
    RelExpr::meet(var('a'), RelExpr::compose(var('b'), var('g')))
}

fn plan(kind: &WitnessKind, n: usize) -> Result<(Plan, &A4Data)> {
    let chain = |k| -> Result<FiniteAlgebra> { make_reduct(&Recipe::Bak { n }, &make_base(BaseKind::Chain(k))?) };
    let boolean = |kind| -> Result<FiniteAlgebra> { make_reduct(&Recipe::Ba { n }, &make_base(kind)?) };
    let full2 = Partition::full(2);
    let id2 = Partition::identity(2);
    match kind {
        WitnessKind::Thmbak { a4, chi } => {
            let bs = blocks(4, &[&[0, 1], &[2, 3]]);
            let gs = blocks(4, &[&[0], &[1, 2], &[3]]);
            let rhs = match chi {
                Chi::Alternating(r) => RelExpr::alt_chain(mv('a', 'g'), mv('a', 'b'), r + 6),
                Chi::Expr(e) => {
                    let side = || vec![var('g'), mv('a', 'b'), var('g')];
                    let mut f = side();
                    f.push(e.clone());
                    f.extend(side());
                    RelExpr::compose_all(f)
                }
            };
            Ok((
                Plan {
                    name: "thmbak".into(),
                    bases: [chain(4)?, chain(4)?, chain(2)?],
                    beta: [bs.clone(), bs, full2],
                    gamma: [gs.clone(), gs, id2],
                    elements: vec![
                        ("c0".into(), [3, 0, 1], a4.a),
                        ("c1".into(), [2, 1, 0], a4.b),
                        ("c2".into(), [1, 2, 0], a4.c),
                        ("c3".into(), [0, 3, 1], a4.d),
                    ],
                    identity: Identity::new(lhs_abgb(), rhs),
                    expected: (0, 3),
                },
                a4,
            ))
        }
        WitnessKind::Thmbakbis { a4, chi } => {
            let bs = blocks(3, &[&[0], &[1, 2]]);
            let gs = blocks(3, &[&[0, 1], &[2]]);
            let rhs = match chi {
                Chi::Alternating(r) => RelExpr::alt_chain(mv('a', 'g'), mv('a', 'b'), r + 4),
                Chi::Expr(e) => {
                    let side = || RelExpr::meet(var('a'), RelExpr::compose(var('g'), var('b')));
                    RelExpr::compose_all(vec![side(), e.clone(), side()])
                }
            };
            Ok((
                Plan {
                    name: "thmbakbis".into(),
                    bases: [chain(3)?, chain(3)?, chain(2)?],
                    beta: [bs.clone(), gs.clone(), full2.clone()],
                    gamma: [gs, bs, full2],
                    elements: vec![
                        ("c0".into(), [2, 0, 1], a4.a),
                        ("c1".into(), [1, 1, 0], a4.b),
                        ("c2".into(), [0, 2, 1], a4.d),
                    ],
                    identity: Identity::new(lhs_bg(), rhs),
                    expected: (0, 2),
                },
                a4,
            ))
        }
        WitnessKind::ThmbaIii { a4, chi, delta, eps } | WitnessKind::ThmbaIv { a4, chi, delta, eps } => {
            let iii = matches!(kind, WitnessKind::ThmbaIii { .. });
            for ch in [*delta, *eps] {
                if ch != 'b' && ch != 'g' {
                    return Err(Error::Invalid(format!("delta/epsilon must be b or g, got {ch}")));
                }
            }
            // 4 = {0, 1, 1', 2} encoded as 0, 1, 2, 3.
            let bs = blocks(4, &[&[1, 3], &[0, 2]]);
            let gs = blocks(4, &[&[0, 1], &[2, 3]]);
            let rhs = match chi {
                Chi::Alternating(r) if iii => RelExpr::alt_chain(mv('a', 'b'), mv('a', 'g'), r + 2),
                _ => RelExpr::compose_all(vec![
                    mv('a', *delta),
                    chi_on_a4("thmba", chi),
                    mv('a', *eps),
                ]),
            };
            let (beta, gamma, elements, lhs, expected) = if iii {
                (
                    [bs.clone(), bs, full2.clone()],
                    [gs.clone(), gs, full2],
                    vec![
                        ("c0".into(), [3, 0, 1], a4.a),
                        ("c1".into(), [1, 0, 0], a4.b),
                        ("c2".into(), [0, 1, 0], a4.c),
                        ("c3".into(), [0, 3, 1], a4.d),
                    ],
                    lhs_abgb(),
                    (0, 3),
                )
            } else {
                (
                    [bs.clone(), gs.clone(), full2.clone()],
                    [gs, bs, full2],
                    vec![
                        ("c0".into(), [3, 0, 1], a4.a),
                        ("c1".into(), [1, 1, 0], a4.b),
                        ("c2".into(), [0, 3, 1], a4.d),
                    ],
                    lhs_bg(),
                    (0, 2),
                )
            };
            Ok((
                Plan {
                    name: if iii { "thmba-iii" } else { "thmba-iv" }.into(),
                    bases: [boolean(BaseKind::Bool4)?, boolean(BaseKind::Bool4)?, boolean(BaseKind::Bool2)?],
                    beta,
                    gamma,
                    elements,
                    identity: Identity::new(lhs, rhs),
                    expected,
                },
                a4,
            ))
        }
        _ => Err(Error::Invalid("not a construction-based instance".into())),
    }
}

fn a4_of(kind: &WitnessKind) -> Option<&A4Data> {
    match kind {
        WitnessKind::Thmbak { a4, .. }
        | WitnessKind::Thmbakbis { a4, .. }
        | WitnessKind::ThmbaIii { a4, .. }
        | WitnessKind::ThmbaIv { a4, .. } => Some(a4),
        _ => None,
    }
}

/// Checks that the A4 data witnesses the failure the proof starts from.
fn check_a4_failure(kind: &WitnessKind) -> Result<()> {
    let a4 = a4_of(kind).expect("construction kind");
    let binding = a4.binding();
    let alg = &a4.algebra;
    let (lhs, chi, name) = match kind {
        WitnessKind::Thmbak { chi, .. } => (lhs_abgb(), chi_on_a4("thmbak", chi), "thmbak"),
        WitnessKind::Thmbakbis { chi, .. } => (lhs_bg(), chi_on_a4("thmbakbis", chi), "thmbakbis"),
        WitnessKind::ThmbaIii { chi, .. } => (lhs_abgb(), chi_on_a4("thmba", chi), "thmba-iii"),
        WitnessKind::ThmbaIv { chi, .. } => (lhs_bg(), chi_on_a4("thmba", chi), "thmba-iv"),
        _ => unreachable!(),
    };
    for p in [&a4.alpha, &a4.beta, &a4.gamma] {
        if p.size() != alg.size || !p.is_congruence(alg) {
            return Err(Error::Precondition(format!("{name}: A4 binding is not a congruence")));
        }
    }
    let l = eval_rel_expr(&lhs, &binding, alg)?;
    let r = eval_rel_expr(&chi, &binding, alg)?;
    if !l.get(a4.a, a4.d) || r.get(a4.a, a4.d) {
        return Err(Error::Precondition(format!(
            "{name}: the identity does not fail on A4 at ({}, {})",
            a4.a, a4.d
        )));
    }
    let chain_ok = match kind {
        WitnessKind::Thmbak { .. } | WitnessKind::ThmbaIii { .. } => {
            a4.beta.related(a4.a, a4.b)
                && a4.alpha.related(a4.b, a4.c)
                && a4.gamma.related(a4.b, a4.c)
                && a4.beta.related(a4.c, a4.d)
        }
        _ => a4.beta.related(a4.a, a4.b) && a4.gamma.related(a4.b, a4.d),
    };
    if !chain_ok {
        return Err(Error::Precondition(format!("{name}: b, c do not link a to d")));
    }
    Ok(())
}

/// Assembles an instance from A1..A3 bases, A4 data and the proof's choices.
/// With `compact`, the algebra is the subalgebra generated by the named elements.
fn assemble(p: Plan, a4: &A4Data, compact: bool) -> Result<CounterexampleInstance> {
    let n = a4.algebra.operations.len() + 1;
    let comps = vec![p.bases[0].clone(), p.bases[1].clone(), p.bases[2].clone(), a4.algebra.clone()];
    check_b_premises(&comps, [0, 0, 0])?;
    let (a, d) = (a4.a, a4.d);
    let full = b_universe(&comps, [0, 0, 0], a, d);
    let named: Vec<(String, Vec<usize>)> = p
        .elements
        .iter()
        .map(|(nm, head, last)| (nm.clone(), vec![head[0], head[1], head[2], *last]))
        .collect();
    for (nm, t) in &named {
        if classify(t, [0, 0, 0], a, d).is_none() {
            return Err(Error::Invalid(format!("{nm} = {t:?} is not in B(a,d)")));
        }
    }
    let tuples = if compact {
        let arities: Vec<usize> = comps[0].operations.iter().map(|o| o.arity).collect();
        let seeds = named.iter().map(|(_, t)| t.clone()).collect();
        let mut t = close_set(seeds, &arities, |oi, args| apply_coordinatewise(&comps, oi, args));
        t.sort();
        for u in &t {
            if classify(u, [0, 0, 0], a, d).is_none() {
                return Err(Error::Invalid(format!("B(a,d) not closed: produced {u:?}")));
            }
        }
        t
    } else {
        full.clone()
    };
    let name = format!("{}(n={n}){}", p.name, if compact { "'" } else { "" });
    let algebra = tuple_algebra(&name, &comps, &tuples)?;
    let sub = ProductSub { tuples: tuples.clone() };
    let one = |s| Partition::full(s);
    let zero = |s| Partition::identity(s);
    let s = [comps[0].size, comps[1].size, comps[2].size];
    let alpha = induced_congruence(&[one(s[0]), one(s[1]), zero(s[2]), a4.alpha.clone()], &sub)?;
    let [b0, b1, b2] = p.beta;
    let [g0, g1, g2] = p.gamma;
    let beta = induced_congruence(&[b0, b1, b2, a4.beta.clone()], &sub)?;
    let gamma = induced_congruence(&[g0, g1, g2, a4.gamma.clone()], &sub)?;
    let find = |t: &Vec<usize>| tuples.binary_search(t).expect("named element present");
    let elements: Vec<(String, usize)> = named.iter().map(|(nm, t)| (nm.clone(), find(t))).collect();
    let expected = (elements[p.expected.0].1, elements[p.expected.1].1);
    Ok(CounterexampleInstance {
        name,
        algebra,
        tuples,
        full_size: full.len(),
        bindings: BTreeMap::from([('a', alpha), ('b', beta), ('g', gamma)]),
        identity: p.identity,
        elements,
        expected,
    })
}

/// Builds an instance; see [`WitnessKind`].
pub fn witness_instance(kind: &WitnessKind) -> Result<CounterexampleInstance> {
    witness_instance_with(kind, None)
}

/// As [`witness_instance`], forcing (`Some(true)`) or forbidding (`Some(false)`)
/// restriction to the subalgebra generated by the named elements; by default
/// only oversized B(a,d) are restricted.
pub fn witness_instance_with(kind: &WitnessKind, compact: Option<bool>) -> Result<CounterexampleInstance> {
    match kind {
        WitnessKind::BakerPlus => {
            let (p, a4) = baker_plus_plan(false)?;
            assemble(p, &a4, compact.unwrap_or(false))
        }
        WitnessKind::Induction { family, n } => induction(*family, *n, compact),
        _ => {
            check_a4_failure(kind)?;
            let a4 = a4_of(kind).expect("construction kind");
            let n = a4.algebra.operations.len() + 1;
            let (p, a4) = plan(kind, n)?;
            let comps_size = p.bases.iter().map(|b| b.size).product::<usize>() * a4.algebra.size;
            let compact = compact.unwrap_or(comps_size > 4 * TABLE_CAP);
            assemble(p, a4, compact)
        }
    }
}

/// The n = 3 instances with a one-element fourth factor: 5-step reversed
/// modularity and two weakenings of `a(b o g) <= a(g o b)` all fail. The
/// last one only fails in the subalgebra generated by `c0, c1, c2`.
pub fn baker_plus_instances() -> Result<Vec<CounterexampleInstance>> {
    let mut out = vec![witness_instance(&WitnessKind::BakerPlus)?];
    let ident = |s: &str| crate::relexpr::parse_identity(s);
    for (i, text) in ["a(b o g) <= a(g o b) o a(g o b)", "a(b o g) <= g o ab o ag o b"].into_iter().enumerate() {
        let (mut p, a4) = baker_plus_plan(true)?;
        p.name = format!("baker-plus-{}", i + 2);
        p.identity = ident(text)?;
        out.push(assemble(p, &a4, i == 1)?);
    }
    Ok(out)
}

fn baker_plus_plan(bis: bool) -> Result<(Plan, A4Data)> {
    let trivial = FiniteAlgebra::new(
        "1",
        1,
        vec![
            Operation { name: "t1".into(), arity: 3, table: vec![0] },
            Operation { name: "t2".into(), arity: 3, table: vec![0] },
        ],
    )?;
    let a4 = A4Data {
        algebra: trivial,
        alpha: Partition::full(1),
        beta: Partition::full(1),
        gamma: Partition::full(1),
        a: 0,
        b: 0,
        c: 0,
        d: 0,
    };
    let k = if bis {
        WitnessKind::Thmbakbis { a4: a4.clone(), chi: Chi::Alternating(0) }
    } else {
        WitnessKind::Thmbak { a4: a4.clone(), chi: Chi::Alternating(0) }
    };
    let (mut p, _) = plan(&k, 3)?;
    p.name = "baker-plus".into();
    p.identity = reversed_modular_identity(5);
    Ok((p, a4))
}

/// Base instances of the induction: lattices are not 3-permutable, and the
/// Pixley algebra is nontrivial.
fn induction_base(family: char) -> Result<CounterexampleInstance> {
    let (algebra, bindings, identity, elements) = match family {
        'a' => {
            let alg = make_reduct(&Recipe::LinMid { n: 2 }, &make_base(BaseKind::Chain(4))?)?;
            let b = BTreeMap::from([
                ('a', Partition::full(4)),
                ('b', blocks(4, &[&[0, 1], &[2, 3]])),
                ('g', blocks(4, &[&[0], &[1, 2], &[3]])),
            ]);
            (alg, b, reversed_modular_identity(3), [0, 1, 2, 3])
        }
        'b' => {
            let alg = make_reduct(&Recipe::AinMid { n: 2 }, &make_base(BaseKind::Bool2)?)?;
            let b = BTreeMap::from([
                ('a', Partition::full(2)),
                ('b', Partition::identity(2)),
                ('g', Partition::full(2)),
            ]);
            (alg, b, modular_identity(1), [0, 0, 1, 1])
        }
        _ => return Err(Error::Invalid(format!("induction family must be a or b, got {family}"))),
    };
    let size = algebra.size;
    Ok(CounterexampleInstance {
        name: format!("induction-{family}(n=2)"),
        tuples: (0..size).map(|e| vec![e]).collect(),
        full_size: size,
        bindings,
        identity,
        elements: ["c0", "c1", "c2", "c3"]
            .iter()
            .zip(elements)
            .map(|(n, e)| (n.to_string(), e))
            .collect(),
        expected: (elements[0], elements[3]),
        algebra,
    })
}

/// The chain of instances for even `n`: family `a` fails `2n-1`-reversed
/// modularity, family `b` fails `2n-3`-modularity.
fn induction(family: char, n: usize, compact: Option<bool>) -> Result<CounterexampleInstance> {
    if n < 2 || n % 2 == 1 {
        return Err(Error::Invalid(format!("induction needs even n >= 2, got {n}")));
    }
    if n > INDUCTION_CAP {
        return Err(Error::Budget(format!("induction capped at n = {INDUCTION_CAP}")));
    }
    if n == 2 {
        return induction_base(family);
    }
    let other = match family {
        'a' => 'b',
        'b' => 'a',
        _ => return Err(Error::Invalid(format!("induction family must be a or b, got {family}"))),
    };
    let prev = induction(other, n - 2, None)?;
    let d = plus_wrap(&prev.algebra)?;
    let e = |k: &str| prev.element(k).expect("named element");
    let a4 = A4Data {
        algebra: shift_pad(&d, false)?,
        alpha: prev.bindings[&'a'].clone(),
        beta: prev.bindings[&'b'].clone(),
        gamma: prev.bindings[&'g'].clone(),
        a: e("c0"),
        b: e("c1"),
        c: e("c2"),
        d: e("c3"),
    };
    let kind = if family == 'a' {
        WitnessKind::Thmbak { a4, chi: Chi::Alternating(2 * n - 7) }
    } else {
        WitnessKind::ThmbaIii { a4, chi: Chi::Alternating(2 * n - 5), delta: 'b', eps: 'g' }
    };
    let mut inst = witness_instance_with(&kind, compact)?;
    inst.name = format!("induction-{family}(n={n}){}", if inst.algebra.size < inst.full_size { "'" } else { "" });
    inst.algebra.name = inst.name.clone();
    Ok(inst)
}

/// The Polin fixture: two algebras of type (2,1,1) and the chain `x, t1, t2, t3, z`.
#[derive(Debug, Clone)]
pub struct PolinFixture {
    pub external: FiniteAlgebra,
    pub internal: FiniteAlgebra,
    pub chain: TermChain,
}

impl PolinFixture {
    pub fn algebras(&self) -> Vec<FiniteAlgebra> {
        vec![self.external.clone(), self.internal.clone()]
    }
}

/// `x +_e y = (x⁺ y⁺)⁺`.
pub fn external_join(a: Term, b: Term) -> Term {
    let p = |t| Term::app("plus", vec![t]);
    p(Term::app("meet", vec![p(a), p(b)]))
}

/// `x +_i y = (x' y')'`.
pub fn internal_join(a: Term, b: Term) -> Term {
    let q = |t| Term::app("prime", vec![t]);
    q(Term::app("meet", vec![q(a), q(b)]))
}

pub fn polin_fixture() -> Result<PolinFixture> {
    let meet = || binary("meet", 2, |a, b| a & b);
    let unary = |name: &str, f: fn(usize) -> usize| Operation {
        name: name.into(),
        arity: 1,
        table: (0..2).map(|v| f(v) as u32).collect(),
    };
    let external = FiniteAlgebra::new(
        "A_e",
        2,
        vec![meet(), unary("plus", |v| 1 - v), unary("prime", |v| v)],
    )?;
    let internal = FiniteAlgebra::new(
        "A_i",
        2,
        vec![meet(), unary("plus", |_| 1), unary("prime", |v| 1 - v)],
    )?;
    let prime = |t| Term::app("prime", vec![t]);
    let t1 = m(x(), external_join(y(), z()));
    let t2 = internal_join(
        internal_join(m(x(), z()), m(x(), prime(y()))),
        m(z(), prime(y())),
    );
    let t3 = m(z(), external_join(y(), x()));
    let spec = Family::Jswitch.spec(4).expect("jswitch is defined at 4");
    let chain = TermChain::new(ChainCondition::Mixed(spec), vec![x(), t1, t2, t3, z()])?;
    Ok(PolinFixture { external, internal, chain })
}


#[cfg(test)]
mod induction_tests {
    use super::*;

    fn run(family: char, n: usize) -> CounterexampleInstance {
        let inst = witness_instance(&WitnessKind::Induction { family, n }).unwrap();
        let check = inst.check().unwrap();
        eprintln!("{} size {} full {} {check:?}", inst.name, inst.algebra.size, inst.full_size);
        assert!(check.fails_as_expected(), "{}: {check:?}", inst.name);
        inst
    }

    #[test]
    fn bases_fail() {
        run('a', 2);
        run('b', 2);
    }

    #[test]
    fn depth_four() {
        assert_eq!(run('a', 4).full_size, 40);
        let b = run('b', 4);
        assert_eq!(b.full_size, 74);
        let c = b.compact().unwrap();
        eprintln!("compact b4 {}", c.algebra.size);
        assert!(c.check().unwrap().fails_as_expected());
    }

    #[test]
    fn depth_six() {
        run('a', 6);
        run('b', 6);
    }
}

#[cfg(test)]
mod witness_tests {
    use super::*;

    /// A4 with `t1 = x`, majority in the middle and `t3 = z` on the 4-chain.
    fn majority_a4() -> FiniteAlgebra {
        let maj = make_reduct(&Recipe::LinMid { n: 2 }, &make_base(BaseKind::Chain(4)).unwrap()).unwrap();
        shift_pad(&plus_wrap(&maj).unwrap(), false).unwrap()
    }

    fn bg_data(chi: &RelExpr) -> A4Data {
        let algebra = majority_a4();
        let alpha = Partition::full(4);
        let beta = blocks(4, &[&[0, 1], &[2, 3]]);
        let gamma = blocks(4, &[&[0], &[1, 2], &[3]]);
        let (a, b, d) = find_a4_witness_bg(&algebra, &alpha, &beta, &gamma, chi).unwrap().unwrap();
        A4Data { algebra, alpha, beta, gamma, a, b, c: b, d }
    }

    #[test]
    fn bakbis_generated_subalgebra() {
        let chi = RelExpr::alt_chain(mv('a', 'g'), mv('a', 'b'), 2);
        let kind = WitnessKind::Thmbakbis { a4: bg_data(&chi), chi: Chi::Alternating(2) };
        let full = witness_instance_with(&kind, Some(false)).unwrap();
        assert!(full.check().unwrap().fails_as_expected());
        let sub = witness_instance_with(&kind, Some(true)).unwrap();
        assert!(sub.check().unwrap().fails_as_expected());
        assert_eq!(sub.tuples.iter().filter(|t| t[0] == 2).count(), 1);
        assert_eq!(full.compact().unwrap().algebra.size, sub.algebra.size);
    }

    #[test]
    fn thmba_iv_fails() {
        let chi = RelExpr::alt_chain(mv('a', 'g'), mv('a', 'b'), 2);
        let kind = WitnessKind::ThmbaIv { a4: bg_data(&chi), chi: Chi::Expr(chi), delta: 'b', eps: 'g' };
        let inst = witness_instance(&kind).unwrap();
        assert!(inst.check().unwrap().fails_as_expected());
    }

    #[test]
    fn vacuous_a4_rejected() {
        let chi = RelExpr::alt_chain(mv('a', 'g'), mv('a', 'b'), 2);
        let mut a4 = bg_data(&chi);
        a4.d = a4.a;
        let kind = WitnessKind::Thmbakbis { a4, chi: Chi::Alternating(2) };
        assert!(matches!(witness_instance(&kind), Err(Error::Precondition(_))));
    }
}
