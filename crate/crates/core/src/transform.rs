//! Explicit term-chain transformations between conditions.

use crate::condition::{ChainCondition, ConditionSpec, DayVariant, Family, TermChain};
use crate::error::{Error, Result};
use crate::term::Term;
use std::fmt;

/// Which indices `specularize` rewrites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    DayFromJonsson,
    RdayFromAlvin,
    DayFromDirected,
    RdayFromTwoheaded,
    DirectedFromJonsson4,
    /// `s_h = t_h(x, t_h(x,y,z), z)` on the selected indices; output labelled with `target`.
    Specularize { parity: Parity, target: Family },
    /// Prepends `x` to an alvin chain; optionally appends `z`.
    JonssonFromAlvinShift { append: bool },
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::DayFromJonsson => "day_from_jonsson",
            Rule::RdayFromAlvin => "rday_from_alvin",
            Rule::DayFromDirected => "day_from_directed",
            Rule::RdayFromTwoheaded => "rday_from_twoheaded",
            Rule::DirectedFromJonsson4 => "directed_from_jonsson4",
            Rule::Specularize { .. } => "specularize",
            Rule::JonssonFromAlvinShift { .. } => "jonsson_from_alvin_shift",
        }
    }

    pub fn parse(s: &str) -> Result<Rule> {
        Ok(match s {
            "day_from_jonsson" => Rule::DayFromJonsson,
            "rday_from_alvin" => Rule::RdayFromAlvin,
            "day_from_directed" => Rule::DayFromDirected,
            "rday_from_twoheaded" => Rule::RdayFromTwoheaded,
            "directed_from_jonsson4" => Rule::DirectedFromJonsson4,
            "specularize" | "specularize-all" => Rule::Specularize {
                parity: Parity::All,
                target: Family::Directed,
            },
            "specularize-odd" => Rule::Specularize {
                parity: Parity::Odd,
                target: Family::Jonsson,
            },
            "specularize-even" => Rule::Specularize {
                parity: Parity::Even,
                target: Family::Alvin,
            },
            "jonsson_from_alvin_shift" => Rule::JonssonFromAlvinShift { append: true },
            "jonsson_from_alvin_shift-noappend" => Rule::JonssonFromAlvinShift { append: false },
            _ => return Err(Error::Invalid(format!("unknown rule {s}"))),
        })
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn mixed_spec<'a>(chain: &'a TermChain, rule: Rule) -> Result<&'a ConditionSpec> {
    match &chain.condition {
        ChainCondition::Mixed(s) => Ok(s),
        _ => Err(Error::Shape(format!("{rule} needs a ternary chain"))),
    }
}

/// Requires the input's links to be those of `family` at its length.
fn require_links(spec: &ConditionSpec, family: Family, rule: Rule) -> Result<()> {
    let want = family
        .spec(spec.n)
        .ok_or_else(|| Error::Shape(format!("{rule}: {family} undefined at n={}", spec.n)))?;
    if want.l != spec.l || want.r != spec.r {
        return Err(Error::Shape(format!(
            "{rule} needs {family} links, got {}",
            spec.describe()
        )));
    }
    Ok(())
}

/// `t(a, b, c)` over the four variables `x, y, z, w`.
fn t4(t: &Term, a: usize, b: usize, c: usize) -> Term {
    t.substitute(&[Term::Var(a), Term::Var(b), Term::Var(c)])
}

const X: usize = 0;
const Y: usize = 1;
const Z: usize = 2;
const W: usize = 3;

/// Applies a rule; the output still needs [`crate::condition::verify_condition`].
pub fn apply_transform(rule: Rule, chain: &TermChain) -> Result<TermChain> {
    let spec = mixed_spec(chain, rule)?;
    let n = spec.n;
    let t = &chain.terms;
    match rule {
        Rule::DayFromJonsson => {
            require_links(spec, Family::Jonsson, rule)?;
            let mut u = vec![Term::Var(X)];
            for k in 1..n {
                let (a, b) = (t4(&t[k], X, Y, W), t4(&t[k], X, Z, W));
                if k % 2 == 1 {
                    u.extend([a, b]);
                } else {
                    u.extend([b, a]);
                }
            }
            u.push(Term::Var(W));
            day(DayVariant::Standard, 2 * n - 1, u)
        }
        Rule::DayFromDirected => {
            require_links(spec, Family::Directed, rule)?;
            let mut u = vec![Term::Var(X)];
            for term in &t[1..n] {
                u.extend([t4(term, X, Y, W), t4(term, X, Z, W)]);
            }
            u.push(Term::Var(W));
            day(DayVariant::Standard, 2 * n - 1, u)
        }
        Rule::RdayFromAlvin => {
            if n < 4 || n % 2 == 1 {
                return Err(Error::Shape(format!("{rule} needs even n >= 4, got {n}")));
            }
            require_links(spec, Family::Alvin, rule)?;
            let m = 2 * n - 3;
            let mut u = vec![Term::Var(X)];
            for j in 1..=2 * n - 4 {
                let (i, rem) = ((j - 1) / 4, (j - 1) % 4);
                let term = match rem {
                    0 => t4(&t[2 * i + 1], X, Y, W),
                    1 => t4(&t[2 * i + 2], X, Y, W),
                    2 => t4(&t[2 * i + 2], X, Z, W),
                    _ => t4(&t[2 * i + 3], X, Z, W),
                };
                u.push(term);
            }
            u[1] = t4(&t[1], X, Y, Z);
            u[2 * n - 4] = t4(&t[n - 1], Y, Z, W);
            u.push(Term::Var(W));
            day(DayVariant::Reversed, m, u)
        }
        Rule::RdayFromTwoheaded => {
            if n < 4 {
                return Err(Error::Shape(format!("{rule} needs n >= 4, got {n}")));
            }
            require_links(spec, Family::TwoHeaded, rule)?;
            let mut u = vec![Term::Var(X), t4(&t[1], X, Y, Z)];
            for term in &t[2..n - 1] {
                u.extend([t4(term, X, Y, W), t4(term, X, Z, W)]);
            }
            u.push(t4(&t[n - 1], Y, Z, W));
            u.push(Term::Var(W));
            day(DayVariant::Reversed, 2 * n - 3, u)
        }
        Rule::DirectedFromJonsson4 => {
            if n != 4 {
                return Err(Error::Shape(format!("{rule} needs n = 4, got {n}")));
            }
            require_links(spec, Family::Jonsson, rule)?;
            let v = |i| Term::Var(i);
            let app = |term: &Term, a: Term, b: Term, c: Term| term.substitute(&[a, b, c]);
            let s1 = app(
                &t[1],
                t[1].clone(),
                app(&t[3], v(X), v(X), v(Y)),
                app(&t[3], v(X), v(X), v(Z)),
            );
            let s2 = app(
                &t[2],
                app(&t[2], v(X), v(Z), v(Z)),
                t[2].clone(),
                app(&t[2], v(X), v(X), v(Z)),
            );
            let s3 = app(
                &t[3],
                app(&t[1], v(X), v(Z), v(Z)),
                app(&t[1], v(Y), v(Z), v(Z)),
                t[3].clone(),
            );
            TermChain::new(
                ChainCondition::Mixed(Family::Directed.spec(4).unwrap()),
                vec![v(X), s1, s2, s3, v(Z)],
            )
        }
        Rule::Specularize { parity, target } => {
            let out_spec = target
                .spec(n)
                .ok_or_else(|| Error::Shape(format!("{target} undefined at n={n}")))?;
            let terms = t
                .iter()
                .enumerate()
                .map(|(h, term)| {
                    let pick = match parity {
                        Parity::All => true,
                        Parity::Odd => h % 2 == 1,
                        Parity::Even => h % 2 == 0,
                    };
                    if pick && h > 0 && h < n {
                        term.substitute(&[Term::Var(X), term.clone(), Term::Var(Z)])
                    } else {
                        term.clone()
                    }
                })
                .collect();
            TermChain::new(ChainCondition::Mixed(out_spec), terms)
        }
        Rule::JonssonFromAlvinShift { append } => {
            require_links(spec, Family::Alvin, rule)?;
            let mut terms = vec![Term::Var(X)];
            terms.extend(t.iter().cloned());
            if append {
                terms.push(Term::Var(Z));
            }
            let out_n = terms.len() - 1;
            TermChain::new(
                ChainCondition::Mixed(Family::Jonsson.spec(out_n).unwrap()),
                terms,
            )
        }
    }
}

fn day(variant: DayVariant, m: usize, terms: Vec<Term>) -> Result<TermChain> {
    TermChain::new(ChainCondition::Day { variant, m }, terms)
}

/// Replaces a chain's condition (used to re-check inputs under weaker conditions).
pub fn relabel(chain: &TermChain, spec: ConditionSpec) -> Result<TermChain> {
    TermChain::new(ChainCondition::Mixed(spec), chain.terms.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(family: Family, n: usize) -> TermChain {
        let mut terms = vec![Term::Var(0)];
        for h in 1..n {
            terms.push(Term::op_vars(&format!("t{h}"), &[0, 1, 2]));
        }
        terms.push(Term::Var(2));
        TermChain::new(ChainCondition::Mixed(family.spec(n).unwrap()), terms).unwrap()
    }

    fn strings(c: &TermChain) -> Vec<String> {
        c.strings()
    }

    #[test]
    fn day_from_majority() {
        let maj = TermChain::new(
            ChainCondition::Mixed(Family::Jonsson.spec(2).unwrap()),
            vec![Term::Var(0), Term::op_vars("m", &[0, 1, 2]), Term::Var(2)],
        )
        .unwrap();
        let d = apply_transform(Rule::DayFromJonsson, &maj).unwrap();
        assert_eq!(strings(&d), vec!["x", "m(x,y,w)", "m(x,z,w)", "w"]);
    }

    #[test]
    fn alvin_table_rows() {
        let d = apply_transform(Rule::RdayFromAlvin, &chain(Family::Alvin, 4)).unwrap();
        assert_eq!(
            strings(&d),
            vec!["x", "t1(x,y,z)", "t2(x,y,w)", "t2(x,z,w)", "t3(y,z,w)", "w"]
        );
        let d = apply_transform(Rule::RdayFromAlvin, &chain(Family::Alvin, 6)).unwrap();
        assert_eq!(
            strings(&d),
            vec![
                "x", "t1(x,y,z)", "t2(x,y,w)", "t2(x,z,w)", "t3(x,z,w)", "t3(x,y,w)",
                "t4(x,y,w)", "t4(x,z,w)", "t5(y,z,w)", "w"
            ]
        );
        let d = apply_transform(Rule::RdayFromAlvin, &chain(Family::Alvin, 8)).unwrap();
        assert_eq!(
            strings(&d)[5..=12],
            [
                "t3(x,y,w)", "t4(x,y,w)", "t4(x,z,w)", "t5(x,z,w)", "t5(x,y,w)", "t6(x,y,w)",
                "t6(x,z,w)", "t7(y,z,w)"
            ]
        );
        assert!(apply_transform(Rule::RdayFromAlvin, &chain(Family::Alvin, 5)).is_err());
        assert!(apply_transform(Rule::RdayFromAlvin, &chain(Family::Jonsson, 4)).is_err());
    }

    #[test]
    fn two_headed_rows() {
        let d = apply_transform(Rule::RdayFromTwoheaded, &chain(Family::TwoHeaded, 5)).unwrap();
        assert_eq!(
            strings(&d),
            vec![
                "x", "t1(x,y,z)", "t2(x,y,w)", "t2(x,z,w)", "t3(x,y,w)", "t3(x,z,w)",
                "t4(y,z,w)", "w"
            ]
        );
    }

    #[test]
    fn shift_lengths() {
        let a = chain(Family::Alvin, 2);
        let j = apply_transform(Rule::JonssonFromAlvinShift { append: true }, &a).unwrap();
        assert_eq!(j.condition.length(), 4);
        let j = apply_transform(Rule::JonssonFromAlvinShift { append: false }, &a).unwrap();
        assert_eq!(j.condition.length(), 3);
    }
}
