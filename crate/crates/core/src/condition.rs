//! Mixed Maltsev conditions, Day conditions, term chains and their equation lists.

use crate::algebra::FiniteAlgebra;
use crate::error::{Error, Result};
use crate::term::{check_equation, EqCheck, Equation, Term};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Value substituted in the middle argument of a linking equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    X,
    Z,
}

impl Side {
    pub fn var(self) -> Term {
        match self {
            Side::X => Term::Var(0),
            Side::Z => Term::Var(2),
        }
    }

    pub fn flip(self) -> Side {
        match self {
            Side::X => Side::Z,
            Side::Z => Side::X,
        }
    }
}

/// A mixed condition: `t_h(x, r(h), z) = t_{h+1}(x, l(h+1), z)` with per-index idempotency.
///
/// Vectors are indexed by `h - 1` for `h = 1..n-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConditionSpec {
    pub n: usize,
    pub l: Vec<Side>,
    pub r: Vec<Side>,
    pub idem: Vec<bool>,
}

impl ConditionSpec {
    /// Rejects specs with a redundant index (`l(h) = r(h)`).
    pub fn new(n: usize, l: Vec<Side>, r: Vec<Side>, idem: Vec<bool>) -> Result<Self> {
        let spec = Self::unchecked(n, l, r, idem)?;
        if let Some(h) = (0..n.saturating_sub(1)).find(|&i| spec.l[i] == spec.r[i]) {
            return Err(Error::Invalid(format!(
                "redundant index {}: l(h) = r(h)",
                h + 1
            )));
        }
        Ok(spec)
    }

    fn unchecked(n: usize, l: Vec<Side>, r: Vec<Side>, idem: Vec<bool>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("chain length must be positive".into()));
        }
        let m = n - 1;
        if l.len() != m || r.len() != m || idem.len() != m {
            return Err(Error::Invalid(format!(
                "expected {m} entries in l, r and idem"
            )));
        }
        Ok(ConditionSpec { n, l, r, idem })
    }

    /// Drops every index with `l(h) = r(h)`, shortening the chain accordingly.
    pub fn normalized(n: usize, l: Vec<Side>, r: Vec<Side>, idem: Vec<bool>) -> Result<Self> {
        let s = Self::unchecked(n, l, r, idem)?;
        let keep: Vec<usize> = (0..n - 1).filter(|&i| s.l[i] != s.r[i]).collect();
        Self::new(
            keep.len() + 1,
            keep.iter().map(|&i| s.l[i]).collect(),
            keep.iter().map(|&i| s.r[i]).collect(),
            keep.iter().map(|&i| s.idem[i]).collect(),
        )
    }

    /// `l(h)` for `1 <= h <= n-1`; `X` at the projection ends.
    pub fn l_at(&self, h: usize) -> Side {
        if h == 0 || h >= self.n {
            Side::X
        } else {
            self.l[h - 1]
        }
    }

    pub fn r_at(&self, h: usize) -> Side {
        if h == 0 || h >= self.n {
            Side::X
        } else {
            self.r[h - 1]
        }
    }

    pub fn idem_at(&self, h: usize) -> bool {
        h > 0 && h < self.n && self.idem[h - 1]
    }

    /// Compact text like `n=3 l=xz r=zx idem=11`.
    pub fn describe(&self) -> String {
        let s = |v: &[Side]| {
            v.iter()
                .map(|s| if *s == Side::X { 'x' } else { 'z' })
                .collect::<String>()
        };
        let i: String = self.idem.iter().map(|&b| if b { '1' } else { '0' }).collect();
        format!("n={} l={} r={} idem={}", self.n, s(&self.l), s(&self.r), i)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DayVariant {
    Standard,
    Reversed,
}

/// Link pattern of a Day chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DayLink {
    /// `u_k(x,x,w,w) = u_{k+1}(x,x,w,w)`
    Outer,
    /// `u_k(x,y,y,w) = u_{k+1}(x,y,y,w)`
    Inner,
}

impl DayVariant {
    pub fn link(self, k: usize) -> DayLink {
        match (self, k % 2 == 0) {
            (DayVariant::Standard, true) | (DayVariant::Reversed, false) => DayLink::Outer,
            _ => DayLink::Inner,
        }
    }
}

impl DayLink {
    pub fn args(self) -> [Term; 4] {
        let (x, y, w) = (Term::Var(0), Term::Var(1), Term::Var(3));
        match self {
            DayLink::Outer => [x.clone(), x, w.clone(), w],
            DayLink::Inner => [x, y.clone(), y, w],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChainCondition {
    Mixed(ConditionSpec),
    Day { variant: DayVariant, m: usize },
}

impl ChainCondition {
    pub fn length(&self) -> usize {
        match self {
            ChainCondition::Mixed(s) => s.n,
            ChainCondition::Day { m, .. } => *m,
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            ChainCondition::Mixed(_) => 3,
            ChainCondition::Day { .. } => 4,
        }
    }

    pub fn tag(&self) -> String {
        match self {
            ChainCondition::Mixed(s) => format!("mixed {}", s.describe()),
            ChainCondition::Day {
                variant: DayVariant::Standard,
                m,
            } => format!("day m={m}"),
            ChainCondition::Day {
                variant: DayVariant::Reversed,
                m,
            } => format!("reversed-day m={m}"),
        }
    }
}

/// A labelled equation of a condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedEquation {
    pub label: String,
    pub equation: Equation,
}

impl fmt::Display for NamedEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.label, self.equation)
    }
}

/// Terms `t_0..t_n` (or `u_0..u_m`) witnessing a condition, outer projections included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermChain {
    pub condition: ChainCondition,
    pub terms: Vec<Term>,
}

impl TermChain {
    pub fn new(condition: ChainCondition, terms: Vec<Term>) -> Result<Self> {
        if terms.len() != condition.length() + 1 {
            return Err(Error::Shape(format!(
                "{} needs {} terms, got {}",
                condition.tag(),
                condition.length() + 1,
                terms.len()
            )));
        }
        Ok(TermChain { condition, terms })
    }

    pub fn strings(&self) -> Vec<String> {
        self.terms.iter().map(|t| t.to_string()).collect()
    }

    /// Equation list of the condition instantiated on these terms.
    pub fn equations(&self) -> Vec<NamedEquation> {
        condition_equations(&self.condition, &self.terms)
    }
}

fn ternary(t: &Term, a: Term, b: Term, c: Term) -> Term {
    t.substitute(&[a, b, c])
}

/// Expands a condition to its equations over the given terms, in checking order.
pub fn condition_equations(cond: &ChainCondition, terms: &[Term]) -> Vec<NamedEquation> {
    let mut out = Vec::new();
    let mut push = |label: String, lhs: Term, rhs: Term, nvars: usize| {
        out.push(NamedEquation {
            label,
            equation: Equation::new(lhs, rhs, nvars),
        })
    };
    match cond {
        ChainCondition::Mixed(spec) => {
            let n = spec.n;
            let (x, y, z) = (Term::Var(0), Term::Var(1), Term::Var(2));
            push("t0 = x".into(), terms[0].clone(), x.clone(), 3);
            for h in 0..n {
                let lhs = ternary(&terms[h], x.clone(), spec.r_at(h).var(), z.clone());
                let rhs = ternary(&terms[h + 1], x.clone(), spec.l_at(h + 1).var(), z.clone());
                push(format!("link {h}"), lhs, rhs, 3);
                if h + 1 < n && spec.idem_at(h + 1) {
                    push(
                        format!("idem {}", h + 1),
                        ternary(&terms[h + 1], x.clone(), y.clone(), x.clone()),
                        x.clone(),
                        3,
                    );
                }
            }
            push(format!("t{n} = z"), terms[n].clone(), z, 3);
        }
        ChainCondition::Day { variant, m } => {
            let m = *m;
            let (x, y, w) = (Term::Var(0), Term::Var(1), Term::Var(3));
            push("u0 = x".into(), terms[0].clone(), x.clone(), 4);
            for k in 0..m {
                let args = variant.link(k).args();
                push(
                    format!("link {k}"),
                    terms[k].substitute(&args),
                    terms[k + 1].substitute(&args),
                    4,
                );
                if k + 1 < m {
                    push(
                        format!("d0 {}", k + 1),
                        terms[k + 1].substitute(&[x.clone(), y.clone(), y.clone(), x.clone()]),
                        x.clone(),
                        4,
                    );
                }
            }
            push(format!("u{m} = w"), terms[m].clone(), w, 4);
        }
    }
    out
}

/// First failing equation of a chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub equation: NamedEquation,
    pub algebra: usize,
    pub assignment: Vec<usize>,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} fails in algebra {} at {:?}",
            self.equation, self.algebra, self.assignment
        )
    }
}

/// Checks every equation of the chain's condition; reports the first failure.
pub fn verify_condition(chain: &TermChain, algebras: &[FiniteAlgebra]) -> Result<Option<Failure>> {
    if chain.terms.len() != chain.condition.length() + 1 {
        return Err(Error::Shape("term count does not match condition".into()));
    }
    for eq in chain.equations() {
        if let EqCheck::Fails {
            algebra,
            assignment,
        } = check_equation(algebras, &eq.equation)?
        {
            return Ok(Some(Failure {
                equation: eq,
                algebra,
                assignment,
            }));
        }
    }
    Ok(None)
}

/// Checks `t_i(x,y,z) = t_{n-i}(z,y,x)` for `0 <= i <= n/2`.
pub fn is_specular_chain(chain: &TermChain, algebras: &[FiniteAlgebra]) -> Result<bool> {
    if chain.condition.arity() != 3 {
        return Err(Error::Shape("specularity needs a ternary chain".into()));
    }
    let n = chain.terms.len() - 1;
    for i in 0..=n / 2 {
        let lhs = chain.terms[i].clone();
        let rhs = chain.terms[n - i].rename_vars(&[2, 1, 0]);
        if !check_equation(algebras, &Equation::new(lhs, rhs, 3))?.holds() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Named level families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Jonsson,
    Alvin,
    Directed,
    MixedMinimal,
    Pixley,
    HmPermutable,
    Gumm,
    DdAlvin,
    Switch,
    Jswitch,
    DirectedGumm,
    TwoHeaded,
    DirectedAlvinHeads,
    Modular,
    ReversedModular,
}

pub const TERNARY_FAMILIES: [Family; 13] = [
    Family::Jonsson,
    Family::Alvin,
    Family::Directed,
    Family::MixedMinimal,
    Family::Pixley,
    Family::HmPermutable,
    Family::Gumm,
    Family::DdAlvin,
    Family::Switch,
    Family::Jswitch,
    Family::DirectedGumm,
    Family::TwoHeaded,
    Family::DirectedAlvinHeads,
];

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Jonsson => "jonsson",
            Family::Alvin => "alvin",
            Family::Directed => "directed",
            Family::MixedMinimal => "mixed-minimal",
            Family::Pixley => "pixley",
            Family::HmPermutable => "hm-permutable",
            Family::Gumm => "gumm",
            Family::DdAlvin => "dd-alvin",
            Family::Switch => "switch",
            Family::Jswitch => "jswitch",
            Family::DirectedGumm => "directed-gumm",
            Family::TwoHeaded => "two-headed-directed-gumm",
            Family::DirectedAlvinHeads => "directed-alvin-heads",
            Family::Modular => "modular",
            Family::ReversedModular => "reversed-modular",
        }
    }

    pub fn parse(s: &str) -> Result<Family> {
        let all = TERNARY_FAMILIES
            .iter()
            .chain(&[Family::Modular, Family::ReversedModular]);
        for &f in all {
            if f.name() == s {
                return Ok(f);
            }
        }
        match s {
            "mixed" => Ok(Family::MixedMinimal),
            "reversed" => Ok(Family::ReversedModular),
            "two-headed" => Ok(Family::TwoHeaded),
            _ => Err(Error::Invalid(format!("unknown family {s}"))),
        }
    }

    pub fn is_day(self) -> bool {
        matches!(self, Family::Modular | Family::ReversedModular)
    }

    /// Smallest chain length at which the family is defined.
    pub fn min_n(self) -> usize {
        match self {
            Family::TwoHeaded | Family::DirectedAlvinHeads => 4,
            Family::Modular | Family::ReversedModular => 1,
            _ => 2,
        }
    }

    /// The condition of this family at length `n` (none for the mixed minimum and Day families).
    pub fn spec(self, n: usize) -> Option<ConditionSpec> {
        if self.is_day() || self == Family::MixedMinimal || n < self.min_n() {
            return None;
        }
        let hs = 1..n;
        let jon = |h: usize| {
            if h % 2 == 1 {
                (Side::X, Side::Z)
            } else {
                (Side::Z, Side::X)
            }
        };
        let alv = |h: usize| {
            let (l, r) = jon(h);
            (l.flip(), r.flip())
        };
        let fwd = (Side::X, Side::Z);
        let bwd = (Side::Z, Side::X);
        let (links, idem): (Vec<(Side, Side)>, Vec<bool>) = hs
            .map(|h| match self {
                Family::Jonsson => (jon(h), true),
                Family::Alvin => (alv(h), true),
                Family::Directed => (fwd, true),
                Family::Pixley => (bwd, true),
                Family::HmPermutable => (bwd, false),
                Family::Gumm => (alv(h), h != 1),
                Family::DdAlvin => (alv(h), h != 1 && h != n - 1),
                Family::Switch => (alv(h), h % 2 == 0),
                Family::Jswitch => (jon(h), h % 2 == 1),
                Family::DirectedGumm => {
                    if h == n - 1 {
                        (bwd, false)
                    } else {
                        (fwd, true)
                    }
                }
                Family::TwoHeaded | Family::DirectedAlvinHeads => {
                    let head = h == 1 || h == n - 1;
                    let link = if head { bwd } else { fwd };
                    (link, !head || self == Family::DirectedAlvinHeads)
                }
                _ => unreachable!(),
            })
            .unzip();
        Some(
            ConditionSpec::new(
                n,
                links.iter().map(|p| p.0).collect(),
                links.iter().map(|p| p.1).collect(),
                idem,
            )
            .expect("preset specs are normalized"),
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
