//! Term trees, their evaluation, and exhaustive equation checking.

use crate::algebra::{decode_into, FiniteAlgebra};
use crate::error::{Error, Result};
use std::fmt;

/// Display names for the first variables; later ones print as `x6`, `x7`, ...
pub const VAR_NAMES: [&str; 6] = ["x", "y", "z", "w", "v", "u"];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    App(String, Vec<Term>),
}

pub fn var_name(i: usize) -> String {
    VAR_NAMES
        .get(i)
        .map(|s| s.to_string())
        .unwrap_or_else(|| format!("x{i}"))
}

impl Term {
    pub fn app(op: &str, args: Vec<Term>) -> Term {
        Term::App(op.to_string(), args)
    }

    /// Shorthand for an operation applied to variables.
    pub fn op_vars(op: &str, vars: &[usize]) -> Term {
        Term::App(op.to_string(), vars.iter().map(|&v| Term::Var(v)).collect())
    }

    /// Replaces each variable `i` by `subst[i]`.
    pub fn substitute(&self, subst: &[Term]) -> Term {
        match self {
            Term::Var(i) => subst[*i].clone(),
            Term::App(op, args) => {
                Term::App(op.clone(), args.iter().map(|a| a.substitute(subst)).collect())
            }
        }
    }

    /// Replaces each variable `i` by variable `map[i]`.
    pub fn rename_vars(&self, map: &[usize]) -> Term {
        let subst: Vec<Term> = map.iter().map(|&v| Term::Var(v)).collect();
        self.substitute(&subst)
    }

    /// One more than the largest variable index.
    pub fn var_bound(&self) -> usize {
        match self {
            Term::Var(i) => i + 1,
            Term::App(_, args) => args.iter().map(Term::var_bound).max().unwrap_or(0),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn parse(text: &str) -> Result<Term> {
        let mut p = TermParser {
            s: text.as_bytes(),
            pos: 0,
        };
        let t = p.term()?;
        p.ws();
        if p.pos != p.s.len() {
            return Err(Error::Parse {
                pos: p.pos,
                msg: "trailing input".into(),
            });
        }
        Ok(t)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "{}", var_name(*i)),
            Term::App(op, args) => {
                write!(f, "{op}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

struct TermParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl TermParser<'_> {
    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn term(&mut self) -> Result<Term> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len()
            && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected identifier");
        }
        let ident = std::str::from_utf8(&self.s[start..self.pos]).unwrap().to_string();
        self.ws();
        if self.pos < self.s.len() && self.s[self.pos] == b'(' {
            self.pos += 1;
            let mut args = Vec::new();
            self.ws();
            if self.pos < self.s.len() && self.s[self.pos] == b')' {
                self.pos += 1;
                return Ok(Term::App(ident, args));
            }
            loop {
                args.push(self.term()?);
                self.ws();
                match self.s.get(self.pos) {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        return Ok(Term::App(ident, args));
                    }
                    _ => return self.err("expected ',' or ')'"),
                }
            }
        }
        if let Some(i) = VAR_NAMES.iter().position(|&v| v == ident) {
            return Ok(Term::Var(i));
        }
        if let Some(rest) = ident.strip_prefix('x') {
            if let Ok(i) = rest.parse::<usize>() {
                return Ok(Term::Var(i));
            }
        }
        Err(Error::Parse {
            pos: start,
            msg: format!("unknown variable {ident}"),
        })
    }
}

/// A term resolved against one algebra, evaluated with a value stack.
#[derive(Debug, Clone)]
pub struct CompiledTerm {
    nodes: Vec<Node>,
    size: usize,
}

#[derive(Debug, Clone, Copy)]
enum Node {
    Var(usize),
    Op(usize, usize),
}

impl CompiledTerm {
    pub fn new(term: &Term, alg: &FiniteAlgebra) -> Result<Self> {
        let mut nodes = Vec::new();
        compile(term, alg, &mut nodes)?;
        Ok(CompiledTerm {
            nodes,
            size: alg.size,
        })
    }

    pub fn eval(&self, alg: &FiniteAlgebra, assignment: &[usize], stack: &mut Vec<usize>) -> usize {
        stack.clear();
        for node in &self.nodes {
            match *node {
                Node::Var(i) => stack.push(assignment[i]),
                Node::Op(oi, ar) => {
                    let base = stack.len() - ar;
                    let idx = stack[base..].iter().fold(0, |acc, &a| acc * self.size + a);
                    stack.truncate(base);
                    stack.push(alg.operations[oi].table[idx] as usize);
                }
            }
        }
        stack[0]
    }
}

fn compile(term: &Term, alg: &FiniteAlgebra, out: &mut Vec<Node>) -> Result<()> {
    match term {
        Term::Var(i) => out.push(Node::Var(*i)),
        Term::App(name, args) => {
            let oi = alg
                .op_index(name)
                .ok_or_else(|| Error::UnknownOperation(name.clone()))?;
            let ar = alg.operations[oi].arity;
            if ar != args.len() {
                return Err(Error::ArityMismatch {
                    op: name.clone(),
                    expected: ar,
                    got: args.len(),
                });
            }
            for a in args {
                compile(a, alg, out)?;
            }
            out.push(Node::Op(oi, ar));
        }
    }
    Ok(())
}

/// Evaluates `term` in `alg` under `assignment`.
pub fn eval_term(term: &Term, alg: &FiniteAlgebra, assignment: &[usize]) -> Result<usize> {
    if term.var_bound() > assignment.len() {
        return Err(Error::Invalid("assignment too short".into()));
    }
    if let Some(&bad) = assignment.iter().find(|&&a| a >= alg.size) {
        return Err(Error::ElementOutOfRange(bad));
    }
    let c = CompiledTerm::new(term, alg)?;
    Ok(c.eval(alg, assignment, &mut Vec::new()))
}

/// Table of a term as a function `A^nvars -> A`, first variable most significant.
pub fn term_table(term: &Term, alg: &FiniteAlgebra, nvars: usize) -> Result<Vec<u32>> {
    let c = CompiledTerm::new(term, alg)?;
    let total = alg.size.pow(nvars as u32);
    let mut args = vec![0; nvars];
    let mut stack = Vec::new();
    Ok((0..total)
        .map(|i| {
            decode_into(i, alg.size, &mut args);
            c.eval(alg, &args, &mut stack) as u32
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
    pub nvars: usize,
}

impl Equation {
    pub fn new(lhs: Term, rhs: Term, nvars: usize) -> Self {
        Equation { lhs, rhs, nvars }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EqCheck {
    Holds,
    Fails {
        algebra: usize,
        assignment: Vec<usize>,
    },
}

impl EqCheck {
    pub fn holds(&self) -> bool {
        matches!(self, EqCheck::Holds)
    }
}

/// Exhaustive check in every algebra; the witness is the least (algebra, assignment).
pub fn check_equation(algebras: &[FiniteAlgebra], eq: &Equation) -> Result<EqCheck> {
    if eq.lhs.var_bound() > eq.nvars || eq.rhs.var_bound() > eq.nvars {
        return Err(Error::Invalid(format!("equation {eq} uses undeclared variables")));
    }
    let compiled: Vec<(CompiledTerm, CompiledTerm)> = algebras
        .iter()
        .map(|a| Ok((CompiledTerm::new(&eq.lhs, a)?, CompiledTerm::new(&eq.rhs, a)?)))
        .collect::<Result<_>>()?;
    let mut stack = Vec::new();
    let mut args = vec![0; eq.nvars];
    for (ai, (alg, (l, r))) in algebras.iter().zip(&compiled).enumerate() {
        let total = alg.size.pow(eq.nvars as u32);
        for i in 0..total {
            decode_into(i, alg.size, &mut args);
            if l.eval(alg, &args, &mut stack) != r.eval(alg, &args, &mut stack) {
                return Ok(EqCheck::Fails {
                    algebra: ai,
                    assignment: args,
                });
            }
        }
    }
    Ok(EqCheck::Holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Operation;

    fn chain_lattice(k: usize) -> FiniteAlgebra {
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
    fn parse_and_print() {
        let t = Term::parse("t1(x, t1(x,y,z), z)").unwrap();
        assert_eq!(t.to_string(), "t1(x,t1(x,y,z),z)");
        assert_eq!(Term::parse(&t.to_string()).unwrap(), t);
        assert_eq!(Term::parse("f(x7)").unwrap(), Term::op_vars("f", &[7]));
        assert!(Term::parse("f(x,").is_err());
        assert!(Term::parse("q").is_err());
    }

    #[test]
    fn evaluation_on_chain() {
        let c4 = chain_lattice(4);
        // x(y+z)
        let t = Term::parse("meet(x,join(y,z))").unwrap();
        assert_eq!(eval_term(&t, &c4, &[3, 0, 1]).unwrap(), 1);
        assert!(eval_term(&Term::parse("nope(x)").unwrap(), &c4, &[0]).is_err());
        assert!(eval_term(&Term::parse("meet(x)").unwrap(), &c4, &[0]).is_err());
    }

    #[test]
    fn equation_witness_is_least() {
        let c2 = chain_lattice(2);
        let eq = Equation::new(
            Term::Var(0),
            Term::parse("meet(x,join(z,z))").unwrap(),
            3,
        );
        assert_eq!(
            check_equation(&[c2.clone()], &eq).unwrap(),
            EqCheck::Fails {
                algebra: 0,
                assignment: vec![1, 0, 0]
            }
        );
        let absorb = Equation::new(Term::Var(0), Term::parse("meet(x,join(x,y))").unwrap(), 2);
        assert!(check_equation(&[c2], &absorb).unwrap().holds());
    }
}
