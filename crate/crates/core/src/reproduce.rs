//! Reproduction targets: level table rows, counterexample witnesses, the
//! Polin fixture and the transformer suite, compared against embedded goldens.

use crate::algebra::FiniteAlgebra;
use crate::condition::{verify_condition, Family, TermChain};
use crate::constructions::{
    baker_plus_instances, operation_chain, polin_fixture, variety_preset, witness_instance_with,
    CounterexampleInstance, WitnessKind, INDUCTION_CAP,
};
use crate::error::{Error, Result};
use crate::free::{build_free_algebra_on, Limits};
use crate::io::Cache;
use crate::level::{check_theorem_bounds, level_report_cached, Budgets, IdentityFailure, LevelReport, Status};
use crate::search::{find_level, LevelOutcome};
use crate::term::{check_equation, EqCheck, Equation, Term};
use crate::transform::{apply_transform, relabel, Rule};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Largest `n` for table rows.
pub const SUMUP_CAP: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    SumupRow { variety: char, n: usize },
    BuhWitness { family: char, n: usize },
    BakerPlus,
    Polin,
    TransformSuite,
}

impl Target {
    /// `sumup-row:a:2`, `buh-witness:b:4`, `baker-plus`, `polin`, `transform-suite`.
    pub fn parse(s: &str) -> Result<Target> {
        let parts: Vec<&str> = s.split(':').collect();
        let letter = |p: &str| -> Result<char> {
            let mut cs = p.chars();
            match (cs.next(), cs.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(Error::Invalid(format!("expected a single letter, got {p}"))),
            }
        };
        let num = |p: &str| p.parse::<usize>().map_err(|_| Error::Invalid(format!("bad number {p}")));
        match parts.as_slice() {
            ["sumup-row", v, n] => Ok(Target::SumupRow { variety: letter(v)?, n: num(n)? }),
            ["buh-witness", f, n] => Ok(Target::BuhWitness { family: letter(f)?, n: num(n)? }),
            ["baker-plus"] => Ok(Target::BakerPlus),
            ["polin"] => Ok(Target::Polin),
            ["transform-suite"] => Ok(Target::TransformSuite),
            _ => Err(Error::Invalid(format!("unknown target {s}"))),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::SumupRow { variety, n } => write!(f, "sumup-row:{variety}:{n}"),
            Target::BuhWitness { family, n } => write!(f, "buh-witness:{family}:{n}"),
            Target::BakerPlus => f.write_str("baker-plus"),
            Target::Polin => f.write_str("polin"),
            Target::TransformSuite => f.write_str("transform-suite"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Match,
    Mismatch,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub item: String,
    pub expected: String,
    pub actual: String,
    pub status: RowStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReproduceReport {
    pub target: String,
    pub rows: Vec<Row>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<LevelReport>,
}

impl ReproduceReport {
    /// 0 when every row matches, 3 if any timed out, else 1.
    pub fn exit_code(&self) -> i32 {
        if self.rows.iter().any(|r| r.status == RowStatus::Timeout) {
            3
        } else if self.rows.iter().all(|r| r.status == RowStatus::Match) {
            0
        } else {
            1
        }
    }

    /// Plain-text table, one row per line.
    pub fn render(&self) -> String {
        let mut out = format!("target {}\n", self.target);
        for r in &self.rows {
            let status = match r.status {
                RowStatus::Match => "match",
                RowStatus::Mismatch => "MISMATCH",
                RowStatus::Timeout => "TIMEOUT",
            };
            out.push_str(&format!(
                "{:<56} expected {:<16} actual {:<16} {status}\n",
                r.item, r.expected, r.actual
            ));
            if let Some(d) = &r.detail {
                out.push_str(&format!("    {d}\n"));
            }
        }
        out
    }
}

fn row(item: impl Into<String>, expected: impl Into<String>, actual: impl Into<String>, ok: bool) -> Row {
    Row {
        item: item.into(),
        expected: expected.into(),
        actual: actual.into(),
        status: if ok { RowStatus::Match } else { RowStatus::Mismatch },
        detail: None,
    }
}

/// Levels of `V_n^v` from the table, and from the Pixley-variety proposition for `g`.
pub fn sumup_golden(variety: char, n: usize) -> Result<Vec<(Family, usize)>> {
    use Family::*;
    let bad = || Err(Error::Invalid(format!("no table column for {variety} at n = {n}")));
    if n < 2 {
        return bad();
    }
    let pixley_row = |n: usize| {
        vec![(Jonsson, n), (Alvin, n), (Modular, n), (ReversedModular, n), (HmPermutable, n), (Pixley, n)]
    };
    let row = |dist: Option<usize>, alv: usize, modl: usize, rev: Option<usize>, dir: usize, heads: Option<usize>| {
        let mut v = Vec::new();
        if let Some(d) = dist {
            v.extend([(Jonsson, d), (Jswitch, d)]);
        }
        v.extend([(Alvin, alv), (Gumm, alv), (Switch, alv), (Modular, modl)]);
        if let Some(r) = rev {
            v.push((ReversedModular, r));
        }
        v.extend([(Directed, dir), (MixedMinimal, dir)]);
        if let Some(h) = heads {
            v.extend([(TwoHeaded, h), (DirectedAlvinHeads, h)]);
        }
        v
    };
    let starred = |v: usize| (n >= 4).then_some(v);
    Ok(match variety {
        'a' if n % 2 == 0 => row(Some(n), n + 1, 2 * n - 1, Some(2 * n), n, Some(n + 2)),
        'b' if n % 2 == 0 => {
            let mut v = row(starred(n + 1), n, 2 * n - 2, starred(2 * n - 3), n, starred(n));
            if n == 2 {
                // V_2^b is generated by the same algebra as V_2^g.
                for (f, l) in pixley_row(2) {
                    if !v.iter().any(|(g, _)| *g == f) {
                        v.push((f, l));
                    }
                }
            }
            v
        }
        'c' => row(Some(2 * n - 2), 2 * n - 1, 2 * n - 1, Some(2 * n), n, Some(n + 2)),
        'd' if n >= 4 => row(Some(2 * n - 3), 2 * n - 4, 2 * n - 2, Some(2 * n - 3), n, Some(n)),
        'g' => pixley_row(n),
        _ => return bad(),
    })
}

/// Counterexample lower bound for `V_n^a`: the induction instance of family `a`
/// is a subalgebra of a product of generators of the variety.
fn induction_evidence(variety: char, n: usize) -> Result<Vec<(IdentityFailure, CounterexampleInstance)>> {
    if variety != 'a' || n % 2 == 1 || n > INDUCTION_CAP {
        return Ok(Vec::new());
    }
    let inst = witness_instance_with(&WitnessKind::Induction { family: 'a', n }, None)?;
    let ev = IdentityFailure {
        family: Family::ReversedModular,
        steps: 2 * n - 1,
        source: inst.name.clone(),
    };
    Ok(vec![(ev, inst)])
}

#[derive(Debug, Clone)]
pub struct ReproduceSpec {
    pub target: Target,
    pub budgets: Budgets,
}

pub fn run_reproduce(spec: &ReproduceSpec, cache: Option<&Cache>) -> Result<ReproduceReport> {
    let target = spec.target.to_string();
    match spec.target {
        Target::SumupRow { variety, n } => sumup_row(variety, n, &spec.budgets, cache),
        Target::BuhWitness { family, n } => {
            if n > INDUCTION_CAP {
                return Err(Error::Invalid(format!("witnesses are capped at n = {INDUCTION_CAP}")));
            }
            let rows = buh_rows(family, n)?;
            Ok(ReproduceReport { target, rows, levels: None })
        }
        Target::BakerPlus => {
            let mut rows = Vec::new();
            for inst in baker_plus_instances()? {
                rows.push(instance_row(&inst)?);
            }
            Ok(ReproduceReport { target, rows, levels: None })
        }
        Target::Polin => Ok(ReproduceReport { target, rows: polin_rows()?, levels: None }),
        Target::TransformSuite => Ok(ReproduceReport {
            target,
            rows: transform_suite(&spec.budgets)?,
            levels: None,
        }),
    }
}

fn instance_row(inst: &CounterexampleInstance) -> Result<Row> {
    let check = inst.check()?;
    let (p, q) = inst.expected;
    let ok = check.fails_as_expected();
    let actual = if check.pair_in_rhs { "holds at pair" } else { "fails at pair" };
    let mut r = row(
        format!("{}: {}", inst.name, inst.identity),
        "fails at pair",
        if check.congruences { actual } else { "not congruences" },
        ok,
    );
    r.detail = Some(format!(
        "|B| = {} of {}; pair {:?} {:?}; first failure {:?}",
        inst.algebra.size, inst.full_size, inst.tuples[p], inst.tuples[q], check.inclusion
    ));
    Ok(r)
}

fn buh_rows(family: char, n: usize) -> Result<Vec<Row>> {
    let inst = witness_instance_with(&WitnessKind::Induction { family, n }, None)?;
    let mut rows = vec![instance_row(&inst)?];
    if inst.algebra.size == inst.full_size && inst.tuples[0].len() > 1 {
        rows.push(instance_row(&inst.compact()?)?);
    }
    Ok(rows)
}

fn sumup_row(variety: char, n: usize, budgets: &Budgets, cache: Option<&Cache>) -> Result<ReproduceReport> {
    if n > SUMUP_CAP {
        return Err(Error::Invalid(format!("table rows are capped at n = {SUMUP_CAP}")));
    }
    let golden = sumup_golden(variety, n)?;
    let gens = variety_preset(variety, n)?;
    let presets: Vec<Family> = golden.iter().map(|&(f, _)| f).collect();
    let mut rows = Vec::new();
    let mut evidence = Vec::new();
    for (ev, inst) in induction_evidence(variety, n)? {
        let r = instance_row(&inst)?;
        if r.status == RowStatus::Match {
            evidence.push(ev);
        }
        rows.push(r);
    }
    let report = level_report_cached(&gens, &presets, budgets, &evidence, cache)?;
    for (f, want) in golden {
        let entry = report.get(f).expect("requested preset");
        let (actual, status) = match (entry.status, entry.value) {
            (Status::Exact, Some(v)) => (v.to_string(), if v == want { RowStatus::Match } else { RowStatus::Mismatch }),
            (Status::UpperBound, Some(v)) => (format!("<= {v}"), RowStatus::Mismatch),
            (Status::LowerBound, Some(v)) => (format!(">= {v}"), RowStatus::Mismatch),
            _ => ("timeout".into(), RowStatus::Timeout),
        };
        rows.push(Row {
            item: format!("V_{n}^{variety} {f}"),
            expected: want.to_string(),
            actual,
            status,
            detail: None,
        });
    }
    let (violations, applied) = check_theorem_bounds(&report);
    let mut r = row(
        format!("V_{n}^{variety} theorem bounds ({applied} applied)"),
        "0 violations",
        format!("{} violations", violations.len()),
        violations.is_empty(),
    );
    if !violations.is_empty() {
        r.detail = Some(violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "));
    }
    rows.push(r);
    Ok(ReproduceReport {
        target: Target::SumupRow { variety, n }.to_string(),
        rows,
        levels: Some(report),
    })
}

fn polin_rows() -> Result<Vec<Row>> {
    let p = polin_fixture()?;
    let algs = p.algebras();
    let mut rows = Vec::new();
    let v = verify_condition(&p.chain, &algs)?;
    rows.push(row(
        "polin terms: jswitch(4) equations",
        "hold",
        v.as_ref().map_or("hold".to_string(), |f| f.to_string()),
        v.is_none(),
    ));
    let x = Term::Var(0);
    let t2 = p.chain.terms[2].clone();
    let idem = Equation::new(t2.substitute(&[x.clone(), Term::Var(1), x.clone()]), x, 2);
    let got = check_equation(std::slice::from_ref(&p.external), &idem)?;
    let actual = match &got {
        EqCheck::Holds => "holds".to_string(),
        EqCheck::Fails { assignment, .. } => format!("fails at x={}, y={}", assignment[0], assignment[1]),
    };
    rows.push(row("polin t2(x,y,x) = x in A_e", "fails at x=1, y=0", actual.clone(), actual == "fails at x=1, y=0"));
    Ok(rows)
}

/// Inputs of the transformer suite: name, generators, chain.
pub fn transform_inputs(budgets: &Budgets) -> Result<Vec<(String, Vec<FiniteAlgebra>, TermChain)>> {
    let mut out = vec![(
        "majority".to_string(),
        variety_preset('a', 2)?,
        operation_chain(Family::Jonsson, 2)?,
    )];
    for (v, n, f) in [
        ('a', 4, Family::Jonsson),
        ('b', 4, Family::Alvin),
        ('c', 3, Family::Directed),
        ('d', 4, Family::TwoHeaded),
    ] {
        let gens = variety_preset(v, n)?;
        let free = build_free_algebra_on(&gens, 3, |_| true, Limits::elements(budgets.f3_cap))?;
        match find_level(&free, f, budgets.max_n)? {
            LevelOutcome::Found(c) if c.condition.length() == n => {
                out.push((format!("V_{n}^{v} {f} (search)"), gens.clone(), c));
            }
            _ => return Err(Error::Invalid(format!("no {f} chain of length {n} for V_{n}^{v}"))),
        }
        out.push((format!("V_{n}^{v} {f} (operations)"), gens, operation_chain(f, n)?));
    }
    Ok(out)
}

const SUITE_RULES: [&str; 10] = [
    "day_from_jonsson",
    "rday_from_alvin",
    "day_from_directed",
    "rday_from_twoheaded",
    "directed_from_jonsson4",
    "specularize-all",
    "specularize-odd",
    "specularize-even",
    "jonsson_from_alvin_shift",
    "jonsson_from_alvin_shift-noappend",
];

/// Condition the input chain must satisfy for the rule to apply.
fn required_family(rule: Rule) -> Option<Family> {
    match rule {
        Rule::DayFromJonsson | Rule::DirectedFromJonsson4 => Some(Family::Jonsson),
        Rule::RdayFromAlvin | Rule::JonssonFromAlvinShift { .. } => Some(Family::Alvin),
        Rule::DayFromDirected => Some(Family::Directed),
        Rule::RdayFromTwoheaded => Some(Family::TwoHeaded),
        Rule::Specularize { target, .. } if target != Family::Directed => Some(target),
        Rule::Specularize { .. } => None,
    }
}

fn verifies_as(chain: &TermChain, family: Family, gens: &[FiniteAlgebra]) -> Result<bool> {
    let Some(spec) = family.spec(chain.condition.length()) else {
        return Ok(false);
    };
    Ok(verify_condition(&relabel(chain, spec)?, gens)?.is_none())
}

fn transform_suite(budgets: &Budgets) -> Result<Vec<Row>> {
    let inputs = transform_inputs(budgets)?;
    let mut rows = Vec::new();
    for name in SUITE_RULES {
        let rule = Rule::parse(name)?;
        let mut applied = 0;
        for (input, gens, chain) in &inputs {
            let chain = match required_family(rule) {
                Some(f) if !verifies_as(chain, f, gens)? => continue,
                Some(f) => relabel(chain, f.spec(chain.condition.length()).expect("verified family"))?,
                None => chain.clone(),
            };
            let chain = &chain;
            let Ok(out) = apply_transform(rule, chain) else { continue };
            applied += 1;
            let v = verify_condition(&out, gens)?;
            let mut r = row(
                format!("{name} on {input} -> {}", out.condition.tag()),
                "verified",
                v.as_ref().map_or("verified", |_| "fails"),
                v.is_none(),
            );
            r.detail = v.map(|f| f.to_string());
            rows.push(r);
            if rule == Rule::RdayFromAlvin {
                // The idempotency of t1 and t{n-1} is never used.
                let n = chain.condition.length();
                let weak = relabel(chain, Family::DdAlvin.spec(n).expect("dd-alvin defined"))?;
                let input_ok = verify_condition(&weak, gens)?.is_none();
                let out = apply_transform(rule, &weak)?;
                let v = verify_condition(&out, gens)?;
                rows.push(row(
                    format!("{name} on {input} as dd-alvin -> {}", out.condition.tag()),
                    "verified",
                    if input_ok && v.is_none() { "verified" } else { "fails" },
                    input_ok && v.is_none(),
                ));
            }
        }
        if applied == 0 {
            rows.push(row(format!("{name}"), "applied at least once", "no applicable input", false));
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(t: &str) -> ReproduceReport {
        let spec = ReproduceSpec { target: Target::parse(t).unwrap(), budgets: Budgets::default() };
        run_reproduce(&spec, None).unwrap()
    }

    #[test]
    fn targets_parse_and_print() {
        for t in ["sumup-row:a:2", "buh-witness:b:4", "baker-plus", "polin", "transform-suite"] {
            assert_eq!(Target::parse(t).unwrap().to_string(), t);
        }
        assert!(Target::parse("sumup-row:ab:2").is_err());
    }

    #[test]
    fn row_a2_matches() {
        let r = run("sumup-row:a:2");
        assert_eq!(r.exit_code(), 0, "{}", r.render());
    }

    #[test]
    fn caps_are_usage_errors() {
        let spec = ReproduceSpec { target: Target::parse("sumup-row:a:6").unwrap(), budgets: Budgets::default() };
        assert!(matches!(run_reproduce(&spec, None), Err(Error::Invalid(_))));
        let spec = ReproduceSpec { target: Target::parse("buh-witness:a:8").unwrap(), budgets: Budgets::default() };
        assert!(matches!(run_reproduce(&spec, None), Err(Error::Invalid(_))));
    }

    #[test]
    fn polin_and_transforms() {
        assert_eq!(run("polin").exit_code(), 0);
        let r = run("transform-suite");
        assert_eq!(r.exit_code(), 0, "{}", r.render());
    }
}
