//! Level reports: searched levels, transform-derived bounds and the
//! theorem-bound cross-checks between them.

use crate::algebra::FiniteAlgebra;
use crate::condition::{verify_condition, ChainCondition, DayVariant, Family, TermChain};
use crate::error::Result;
use crate::free::{FreeAlgebra, Limits, F3_CAP, F4_CAP};
use crate::io::{cached_free_algebra, Cache};
use crate::search::{day_points, find_day_chain, find_level_indexed, is_trivial, ChainIndex, LevelOutcome};
use crate::term::Term;
use crate::transform::{apply_transform, Rule};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Exact,
    LowerBound,
    UpperBound,
    Timeout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Search,
    Transform,
}

/// One preset's result. For `lower_bound` the level is at least `value`; for
/// `upper_bound` at most `value`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelEntry {
    pub status: Status,
    pub value: Option<usize>,
    pub witness: Vec<String>,
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub degenerate: bool,
}

impl LevelEntry {
    fn timeout(method: Method, note: &str) -> Self {
        LevelEntry {
            status: Status::Timeout,
            value: None,
            witness: Vec::new(),
            method,
            note: Some(note.into()),
            degenerate: false,
        }
    }

    pub fn exact(&self) -> Option<usize> {
        (self.status == Status::Exact).then_some(self.value).flatten()
    }

    /// Known interval `[lo, hi]` for the level.
    pub fn interval(&self) -> (usize, Option<usize>) {
        match (self.status, self.value) {
            (Status::Exact, Some(v)) => (v, Some(v)),
            (Status::LowerBound, Some(v)) => (v, None),
            (Status::UpperBound, Some(v)) => (0, Some(v)),
            _ => (0, None),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    pub max_n: usize,
    pub max_m: usize,
    pub f3_cap: usize,
    pub f4_cap: usize,
    /// Search Day chains in F(4); otherwise only transform bounds are used.
    pub day_search: bool,
    pub budget_ms: Option<u64>,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_n: 8,
            max_m: 16,
            f3_cap: F3_CAP,
            f4_cap: F4_CAP,
            day_search: true,
            budget_ms: None,
        }
    }
}

/// The variety fails `steps`-step (reversed) modularity, so its level exceeds `steps`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityFailure {
    pub family: Family,
    pub steps: usize,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelReport {
    pub generators: Vec<String>,
    pub levels: BTreeMap<String, LevelEntry>,
    pub free3_size: Option<usize>,
    pub free4_size: Option<usize>,
    pub budgets: Budgets,
}

impl LevelReport {
    pub fn get(&self, family: Family) -> Option<&LevelEntry> {
        self.levels.get(family.name())
    }

    pub fn exact(&self, family: Family) -> Option<usize> {
        self.get(family).and_then(LevelEntry::exact)
    }
}

fn limits(cap: usize, deadline: Option<Instant>) -> Limits {
    Limits {
        max_elements: cap,
        deadline,
    }
}

fn verified(chain: &TermChain, gens: &[FiniteAlgebra]) -> Result<bool> {
    Ok(verify_condition(chain, gens)?.is_none())
}

fn other(v: DayVariant) -> DayVariant {
    match v {
        DayVariant::Standard => DayVariant::Reversed,
        DayVariant::Reversed => DayVariant::Standard,
    }
}

fn variant_of(f: Family) -> DayVariant {
    if f == Family::ReversedModular {
        DayVariant::Reversed
    } else {
        DayVariant::Standard
    }
}

/// Prepends `x` to a Day chain, giving a chain of the other variant one step longer.
pub fn day_shift(chain: &TermChain) -> Option<TermChain> {
    let ChainCondition::Day { variant, m } = chain.condition else {
        return None;
    };
    let mut terms = vec![Term::Var(0)];
    terms.extend(chain.terms.iter().cloned());
    Some(TermChain {
        condition: ChainCondition::Day {
            variant: other(variant),
            m: m + 1,
        },
        terms,
    })
}

/// Reads an even-length Day chain backwards with `x, y, z, w` reversed, giving
/// a chain of the other variant of the same length.
pub fn day_reverse(chain: &TermChain) -> Option<TermChain> {
    let ChainCondition::Day { variant, m } = chain.condition else {
        return None;
    };
    if m % 2 == 1 {
        return None;
    }
    let swap: Vec<Term> = (0..4).rev().map(Term::Var).collect();
    Some(TermChain {
        condition: ChainCondition::Day {
            variant: other(variant),
            m,
        },
        terms: chain.terms.iter().rev().map(|t| t.substitute(&swap)).collect(),
    })
}

/// Sources of transform bounds: input family, rule, output variant.
const TRANSFORM_SOURCES: [(Family, Rule, DayVariant); 4] = [
    (Family::Jonsson, Rule::DayFromJonsson, DayVariant::Standard),
    (Family::Directed, Rule::DayFromDirected, DayVariant::Standard),
    (Family::Alvin, Rule::RdayFromAlvin, DayVariant::Reversed),
    (Family::TwoHeaded, Rule::RdayFromTwoheaded, DayVariant::Reversed),
];

/// Per-variant state of the Day sandwich.
#[derive(Default)]
struct DayState {
    lo: usize,
    hi: Option<usize>,
    chain: Option<TermChain>,
    searched: Option<usize>,
    search_found: bool,
    timeout: bool,
    notes: Vec<String>,
}

impl DayState {
    fn offer(&mut self, chain: TermChain, note: String) {
        let m = chain.condition.length();
        if self.hi.is_none_or(|h| m < h) {
            self.hi = Some(m);
            self.chain = Some(chain);
            self.notes.push(note);
        }
    }
}

/// Levels of the variety generated by `generators` for each preset.
pub fn level_report(
    generators: &[FiniteAlgebra],
    presets: &[Family],
    budgets: &Budgets,
    evidence: &[IdentityFailure],
) -> Result<LevelReport> {
    level_report_cached(generators, presets, budgets, evidence, None)
}

/// As [`level_report`], reusing free algebras from `cache`.
pub fn level_report_cached(
    generators: &[FiniteAlgebra],
    presets: &[Family],
    budgets: &Budgets,
    evidence: &[IdentityFailure],
    cache: Option<&Cache>,
) -> Result<LevelReport> {
    let deadline = budgets
        .budget_ms
        .map(|ms| Instant::now() + Duration::from_millis(ms));
    let mut levels = BTreeMap::new();
    let ternary: Vec<Family> = presets.iter().copied().filter(|f| !f.is_day()).collect();
    let wants_day = presets.iter().any(|f| f.is_day());
    let mut found: BTreeMap<Family, TermChain> = BTreeMap::new();
    let mut free3_size = None;
    let mut trivial = false;

    // Transform bounds need the chains of their source families even when not requested.
    let mut needed = ternary.clone();
    if wants_day {
        for (f, _, _) in TRANSFORM_SOURCES {
            if !needed.contains(&f) {
                needed.push(f);
            }
        }
    }
    if !needed.is_empty() {
        let free = cached_free_algebra(cache, generators, 3, "all", |_| true, limits(budgets.f3_cap, deadline))?;
        free3_size = Some(free.len());
        trivial = is_trivial(&free);
        let index = ChainIndex::new(&free)?;
        for &f in &needed {
            let entry = if trivial {
                LevelEntry {
                    status: Status::Exact,
                    value: Some(1),
                    witness: vec!["x".into(), "z".into()],
                    method: Method::Search,
                    note: Some("trivial variety".into()),
                    degenerate: true,
                }
            } else {
                ternary_entry(&free, &index, f, budgets.max_n, generators, &mut found)?
            };
            if ternary.contains(&f) {
                levels.insert(f.name().to_string(), entry);
            }
        }
    }

    let mut free4_size = None;
    if wants_day {
        let day = day_entries(generators, presets, budgets, evidence, deadline, &found, trivial, cache, &mut free4_size)?;
        levels.extend(day);
    }

    Ok(LevelReport {
        generators: generators.iter().map(|g| g.name.clone()).collect(),
        levels,
        free3_size,
        free4_size,
        budgets: budgets.clone(),
    })
}

fn ternary_entry(
    free: &FreeAlgebra,
    index: &ChainIndex,
    f: Family,
    max_n: usize,
    gens: &[FiniteAlgebra],
    found: &mut BTreeMap<Family, TermChain>,
) -> Result<LevelEntry> {
    Ok(match find_level_indexed(index, f, max_n)? {
        LevelOutcome::Found(chain) => {
            let n = chain.condition.length();
            if !verified(&chain, gens)? {
                return Err(crate::Error::Invalid(format!("{f} witness at n={n} does not verify")));
            }
            let entry = LevelEntry {
                status: if free.complete { Status::Exact } else { Status::UpperBound },
                value: Some(n),
                witness: chain.strings(),
                method: Method::Search,
                note: (!free.complete).then(|| "F(3) truncated by budget".into()),
                degenerate: false,
            };
            found.insert(f, chain);
            entry
        }
        LevelOutcome::NoneUpTo(n) if free.complete => LevelEntry {
            status: Status::LowerBound,
            value: Some(n + 1),
            witness: Vec::new(),
            method: Method::Search,
            note: Some(format!("no chain up to n={n}")),
            degenerate: false,
        },
        LevelOutcome::NoneUpTo(_) => LevelEntry::timeout(Method::Search, "F(3) truncated by budget"),
    })
}

#[allow(clippy::too_many_arguments)]
fn day_entries(
    gens: &[FiniteAlgebra],
    presets: &[Family],
    budgets: &Budgets,
    evidence: &[IdentityFailure],
    deadline: Option<Instant>,
    found: &BTreeMap<Family, TermChain>,
    trivial: bool,
    cache: Option<&Cache>,
    free4_size: &mut Option<usize>,
) -> Result<BTreeMap<String, LevelEntry>> {
    let mut out = BTreeMap::new();
    let day_presets: Vec<Family> = presets.iter().copied().filter(|f| f.is_day()).collect();
    if trivial {
        for f in day_presets {
            out.insert(
                f.name().to_string(),
                LevelEntry {
                    status: Status::Exact,
                    value: Some(0),
                    witness: vec!["x".into()],
                    method: Method::Search,
                    note: Some("trivial variety".into()),
                    degenerate: true,
                },
            );
        }
        return Ok(out);
    }
    let mut states: BTreeMap<DayVariant, DayState> = BTreeMap::new();
    for v in [DayVariant::Standard, DayVariant::Reversed] {
        states.insert(v, DayState { lo: 1, ..Default::default() });
    }
    for e in evidence {
        if let Some(st) = states.get_mut(&variant_of(e.family)) {
            if e.steps + 1 > st.lo {
                st.lo = e.steps + 1;
                st.notes.push(format!("fails {} steps: {}", e.steps, e.source));
            }
        }
    }
    for (f, rule, v) in TRANSFORM_SOURCES {
        let Some(chain) = found.get(&f) else { continue };
        let Ok(out_chain) = apply_transform(rule, chain) else { continue };
        if verified(&out_chain, gens)? {
            let m = out_chain.condition.length();
            states
                .get_mut(&v)
                .expect("both variants")
                .offer(out_chain, format!("{rule} on {f} level gives {m}"));
        }
    }

    if budgets.day_search {
        let free = cached_free_algebra(cache, gens, 4, "day", day_points, limits(budgets.f4_cap, deadline))?;
        *free4_size = Some(free.len());
        for v in [DayVariant::Standard, DayVariant::Reversed] {
            let st = states.get_mut(&v).expect("both variants");
            let limit = match st.hi {
                Some(h) => budgets.max_m.min(h.saturating_sub(1)),
                None => budgets.max_m,
            };
            if limit == 0 {
                continue;
            }
            let res = find_day_chain(&free, v, limit)?;
            match res.chain {
                Some(chain) if verified(&chain, gens)? => {
                    let m = chain.condition.length();
                    st.hi = Some(m);
                    st.chain = Some(chain);
                    if free.complete {
                        st.search_found = true;
                        st.lo = st.lo.max(m);
                    }
                }
                Some(_) => {
                    return Err(crate::Error::Invalid("Day witness does not verify".into()));
                }
                None if free.complete => {
                    st.searched = Some(if res.exhausted { usize::MAX } else { limit });
                    st.lo = st.lo.max(limit.saturating_add(1));
                }
                None => st.timeout = true,
            }
        }
    }

    // Sandwich: the two variants differ by at most one, and an even level on one
    // side bounds the other.
    for _ in 0..2 {
        for v in [DayVariant::Standard, DayVariant::Reversed] {
            let (lo_o, hi_o, chain_o) = {
                let o = &states[&other(v)];
                (o.lo, o.hi, o.chain.clone())
            };
            let st = states.get_mut(&v).expect("both variants");
            st.lo = st.lo.max(lo_o.saturating_sub(1));
            if let (Some(h), Some(c)) = (hi_o, chain_o) {
                if st.hi.is_none_or(|mine| h + 1 < mine) {
                    if let Some(shifted) = day_shift(&c) {
                        if verified(&shifted, gens)? {
                            st.offer(shifted, format!("prepending x to the {} chain", h));
                        }
                    }
                }
            }
            if let Some(c) = states[&other(v)].chain.clone() {
                if let Some(rev) = day_reverse(&c) {
                    let m = rev.condition.length();
                    let st = states.get_mut(&v).expect("both variants");
                    if st.hi.is_none_or(|mine| m < mine) && verified(&rev, gens)? {
                        st.offer(rev, format!("reversing the even {m} chain"));
                    }
                }
            }
        }
    }

    for f in day_presets {
        let st = &states[&variant_of(f)];
        let method = if st.search_found { Method::Search } else { Method::Transform };
        let note = (!st.notes.is_empty()).then(|| st.notes.join("; "));
        let witness = st.chain.as_ref().map(|c| c.strings()).unwrap_or_default();
        let entry = match st.hi {
            Some(h) if h <= st.lo => LevelEntry {
                status: Status::Exact,
                value: Some(h),
                witness,
                method,
                note,
                degenerate: false,
            },
            Some(h) => LevelEntry {
                status: Status::UpperBound,
                value: Some(h),
                witness,
                method,
                note,
                degenerate: false,
            },
            None if st.timeout => LevelEntry::timeout(Method::Search, "F(4) truncated by budget"),
            None => LevelEntry {
                status: Status::LowerBound,
                value: Some(st.lo),
                witness: Vec::new(),
                method: if st.searched.is_some() { Method::Search } else { Method::Transform },
                note,
                degenerate: false,
            },
        };
        out.insert(f.name().to_string(), entry);
    }
    Ok(out)
}

/// A violated theorem bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub rule: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule, self.detail)
    }
}

/// Checks the theorem bounds between levels wherever both sides are known.
/// Returns the violations and the number of rules that could be applied.
pub fn check_theorem_bounds(report: &LevelReport) -> (Vec<Violation>, usize) {
    let exact = |f: Family| {
        report
            .get(f)
            .filter(|e| !e.degenerate)
            .and_then(LevelEntry::exact)
    };
    let lower = |f: Family| report.get(f).filter(|e| !e.degenerate).map(|e| e.interval().0);
    let mut violations = Vec::new();
    let mut applied = 0;
    let mut bound = |rule: &str, src: Option<usize>, target: Family, cap: &dyn Fn(usize) -> Option<usize>| {
        let (Some(n), Some(lo)) = (src, lower(target)) else { return };
        let Some(c) = cap(n) else { return };
        if report.get(target).is_some_and(|e| e.status == Status::Timeout) {
            return;
        }
        applied += 1;
        if lo > c {
            violations.push(Violation {
                rule: rule.into(),
                detail: format!("{target} level at least {lo} exceeds {c}"),
            });
        }
    };
    use Family::*;
    bound("day from jonsson", exact(Jonsson), Modular, &|n| Some(2 * n - 1));
    bound("reversed day from alvin", exact(Alvin), ReversedModular, &|n| {
        (n % 2 == 0 && n >= 4).then(|| 2 * n - 3)
    });
    bound("day from directed", exact(Directed), Modular, &|n| Some(2 * n - 1));
    bound("jonsson from mixed", exact(MixedMinimal), Jonsson, &|n| Some(2 * n - 2));
    bound("alvin from jonsson", exact(Jonsson), Alvin, &|n| Some(n + 1));
    bound("jonsson from alvin", exact(Alvin), Jonsson, &|n| Some(n + 1));
    bound("jonsson from odd alvin", exact(Alvin), Jonsson, &|n| (n % 2 == 1).then_some(n));
    bound("alvin from odd jonsson", exact(Jonsson), Alvin, &|n| (n % 2 == 1).then_some(n));
    bound("reversed from modular", exact(Modular), ReversedModular, &|m| Some(m + 1));
    bound("modular from reversed", exact(ReversedModular), Modular, &|m| Some(m + 1));
    bound("reversed from even modular", exact(Modular), ReversedModular, &|m| (m % 2 == 0).then_some(m));
    bound("modular from even reversed", exact(ReversedModular), Modular, &|m| (m % 2 == 0).then_some(m));
    drop(bound);
    // For odd k, k-distributive and k-alvin coincide; so an even level on one
    // side is a floor for the other.
    let upper = |f: Family| report.get(f).filter(|e| !e.degenerate).and_then(|e| e.interval().1);
    let mut floor = |rule: &str, src: Option<usize>, target: Family| {
        let (Some(n), Some(hi)) = (src.filter(|n| n % 2 == 0), upper(target)) else { return };
        applied += 1;
        if hi < n {
            violations.push(Violation {
                rule: rule.into(),
                detail: format!("{target} level at most {hi} is below {n}"),
            });
        }
    };
    floor("jonsson from even alvin", exact(Alvin), Jonsson);
    floor("alvin from even jonsson", exact(Jonsson), Alvin);
    (violations, applied)
}
