//! Relation expressions over meet, compose, converse and closures, with a text syntax.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! identity := expr "<=" expr
//! expr     := meet ("o" meet)*                 left-associative composition
//! meet     := unary (["&"] unary)*             juxtaposition is intersection
//! unary    := "~" unary | postfix
//! postfix  := atom ("^" int)*
//! atom     := var | "0" | "1" | "(" expr ")" | "cl(" expr "," expr ")"
//!           | "alt(" expr "," expr "," int ")" | "tc(" expr ")"
//! ```
//!
//! Variables are the letters `a`..`z` other than `o`; `alpha`, `beta`, `gamma`
//! stand for `a`, `b`, `g`.

use crate::algebra::FiniteAlgebra;
use crate::error::{Error, Result};
use crate::relation::{adm_closure, BinaryRelation};
use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RelExpr {
    Var(char),
    /// The identity relation.
    Zero,
    /// The full relation.
    One,
    Meet(Box<RelExpr>, Box<RelExpr>),
    Compose(Box<RelExpr>, Box<RelExpr>),
    Converse(Box<RelExpr>),
    Power(Box<RelExpr>, u32),
    Closure(Box<RelExpr>, Box<RelExpr>),
    Transitive(Box<RelExpr>),
}

impl RelExpr {
    pub fn var(c: char) -> Self {
        RelExpr::Var(c)
    }
    pub fn meet(a: RelExpr, b: RelExpr) -> Self {
        RelExpr::Meet(Box::new(a), Box::new(b))
    }
    pub fn compose(a: RelExpr, b: RelExpr) -> Self {
        RelExpr::Compose(Box::new(a), Box::new(b))
    }
    pub fn converse(a: RelExpr) -> Self {
        RelExpr::Converse(Box::new(a))
    }
    pub fn power(a: RelExpr, k: u32) -> Self {
        RelExpr::Power(Box::new(a), k)
    }
    pub fn closure(a: RelExpr, b: RelExpr) -> Self {
        RelExpr::Closure(Box::new(a), Box::new(b))
    }
    pub fn transitive(a: RelExpr) -> Self {
        RelExpr::Transitive(Box::new(a))
    }

    /// Left-associated composition of the given factors; the empty chain is `0`.
    pub fn compose_all(factors: Vec<RelExpr>) -> Self {
        let mut it = factors.into_iter();
        match it.next() {
            None => RelExpr::Zero,
            Some(first) => it.fold(first, RelExpr::compose),
        }
    }

    /// `first ∘ second ∘ first ∘ ...` with `k` factors.
    pub fn alt_chain(first: RelExpr, second: RelExpr, k: usize) -> Self {
        let factors = (0..k)
            .map(|i| if i % 2 == 0 { first.clone() } else { second.clone() })
            .collect();
        Self::compose_all(factors)
    }

    pub fn vars(&self) -> Vec<char> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<char>) {
        match self {
            RelExpr::Var(c) => out.push(*c),
            RelExpr::Zero | RelExpr::One => {}
            RelExpr::Meet(a, b) | RelExpr::Compose(a, b) | RelExpr::Closure(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            RelExpr::Converse(a) | RelExpr::Power(a, _) | RelExpr::Transitive(a) => {
                a.collect_vars(out)
            }
        }
    }

    pub fn parse(text: &str) -> Result<RelExpr> {
        let mut p = Parser::new(text)?;
        let e = p.expr()?;
        p.expect_end()?;
        Ok(e)
    }

    fn level(&self) -> u8 {
        match self {
            RelExpr::Compose(..) => 0,
            RelExpr::Meet(..) => 1,
            RelExpr::Converse(..) => 2,
            _ => 3,
        }
    }

    fn print(&self, ctx: u8) -> String {
        if self.level() < ctx {
            return format!("({})", self.print(0));
        }
        match self {
            RelExpr::Var(c) => c.to_string(),
            RelExpr::Zero => "0".into(),
            RelExpr::One => "1".into(),
            RelExpr::Compose(a, b) => format!("{} o {}", a.print(0), b.print(1)),
            RelExpr::Meet(a, b) => juxtapose(&a.print(1), &b.print(2)),
            RelExpr::Converse(a) => format!("~{}", a.print(2)),
            RelExpr::Power(a, k) => format!("{}^{}", a.print(3), k),
            RelExpr::Closure(a, b) => format!("cl({}, {})", a.print(0), b.print(0)),
            RelExpr::Transitive(a) => format!("tc({})", a.print(0)),
        }
    }
}

const ALIASES: [(&str, char); 3] = [("alpha", 'a'), ("beta", 'b'), ("gamma", 'g')];
const KEYWORDS: [&str; 3] = ["cl", "alt", "tc"];

/// Concatenates two meet operands unless the joined letter run would read as a
/// word or two numerals would merge.
fn juxtapose(left: &str, right: &str) -> String {
    let tail: String = left
        .chars()
        .rev()
        .take_while(|c| c.is_ascii_alphabetic())
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .collect();
    let head: String = right.chars().take_while(|c| c.is_ascii_alphabetic()).collect();
    let run = format!("{tail}{head}");
    let after = right[head.len()..].chars().next();
    let alias = !head.is_empty() && ALIASES.iter().any(|(w, _)| *w == run);
    let keyword = after == Some('(')
        && (KEYWORDS.contains(&run.as_str()) || KEYWORDS.contains(&head.as_str()));
    let digits = left.ends_with(|c: char| c.is_ascii_digit()) && right.starts_with(|c: char| c.is_ascii_digit());
    if digits || (!tail.is_empty() && (alias || keyword)) {
        format!("{left} & {right}")
    } else {
        format!("{left}{right}")
    }
}

impl fmt::Display for RelExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.print(0))
    }
}

/// An inclusion `lhs ⊆ rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Identity {
    pub lhs: RelExpr,
    pub rhs: RelExpr,
}

impl Identity {
    pub fn new(lhs: RelExpr, rhs: RelExpr) -> Self {
        Identity { lhs, rhs }
    }

    pub fn parse(text: &str) -> Result<Identity> {
        parse_identity(text)
    }

    pub fn vars(&self) -> Vec<char> {
        let mut v = self.lhs.vars();
        v.extend(self.rhs.vars());
        v.sort_unstable();
        v.dedup();
        v
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <= {}", self.lhs, self.rhs)
    }
}

pub fn parse_identity(text: &str) -> Result<Identity> {
    let mut p = Parser::new(text)?;
    let lhs = p.expr()?;
    match p.peek() {
        Tok::Leq => p.bump(),
        _ => return p.err("expected '<='"),
    };
    let rhs = p.expr()?;
    p.expect_end()?;
    Ok(Identity { lhs, rhs })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Var(char),
    Num(u32),
    Kw(&'static str),
    Compose,
    Amp,
    Tilde,
    Caret,
    LParen,
    RParen,
    Comma,
    Leq,
    End,
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    i: usize,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < b.len() && b[i].is_ascii_alphabetic() {
                i += 1;
            }
            let run = &text[start..i];
            if let Some((_, v)) = ALIASES.iter().find(|(w, _)| *w == run) {
                out.push((Tok::Var(*v), start));
                continue;
            }
            let mut j = i;
            while j < b.len() && b[j].is_ascii_whitespace() {
                j += 1;
            }
            if let Some(kw) = KEYWORDS.iter().find(|&&k| k == run) {
                if b.get(j) == Some(&b'(') {
                    out.push((Tok::Kw(kw), start));
                    continue;
                }
            }
            for (k, ch) in run.chars().enumerate() {
                let tok = if ch == 'o' {
                    Tok::Compose
                } else if ch.is_ascii_lowercase() {
                    Tok::Var(ch)
                } else {
                    return Err(Error::Parse {
                        pos: start + k,
                        msg: format!("unexpected character '{ch}'"),
                    });
                };
                out.push((tok, start + k));
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            let v: u32 = text[start..i].parse().map_err(|_| Error::Parse {
                pos: start,
                msg: "number too large".into(),
            })?;
            out.push((Tok::Num(v), start));
            continue;
        }
        let tok = match c {
            b'&' => Tok::Amp,
            b'~' => Tok::Tilde,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'<' if b.get(i + 1) == Some(&b'=') => {
                out.push((Tok::Leq, i));
                i += 2;
                continue;
            }
            _ => {
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("unexpected character '{}'", c as char),
                })
            }
        };
        out.push((tok, i));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        Ok(Parser {
            toks: lex(text)?,
            i: 0,
        })
    }

    fn peek(&self) -> Tok {
        self.toks[self.i].0.clone()
    }

    fn pos(&self) -> usize {
        self.toks[self.i].1
    }

    fn bump(&mut self) {
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(&format!("expected {what}"))
        }
    }

    fn expect_end(&self) -> Result<()> {
        if self.peek() == Tok::End {
            Ok(())
        } else {
            self.err("unexpected trailing input")
        }
    }

    fn number(&mut self) -> Result<u32> {
        match self.peek() {
            Tok::Num(k) => {
                self.bump();
                Ok(k)
            }
            _ => self.err("expected number"),
        }
    }

    fn expr(&mut self) -> Result<RelExpr> {
        let mut e = self.meet()?;
        while self.peek() == Tok::Compose {
            self.bump();
            let r = self.meet()?;
            e = RelExpr::compose(e, r);
        }
        Ok(e)
    }

    fn starts_unary(t: &Tok) -> bool {
        matches!(
            t,
            Tok::Var(_) | Tok::Num(_) | Tok::Kw(_) | Tok::Tilde | Tok::LParen
        )
    }

    fn meet(&mut self) -> Result<RelExpr> {
        let mut e = self.unary()?;
        loop {
            let t = self.peek();
            if t == Tok::Amp {
                self.bump();
            } else if !Self::starts_unary(&t) {
                break;
            }
            let r = self.unary()?;
            e = RelExpr::meet(e, r);
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<RelExpr> {
        if self.peek() == Tok::Tilde {
            self.bump();
            return Ok(RelExpr::converse(self.unary()?));
        }
        let mut e = self.atom()?;
        while self.peek() == Tok::Caret {
            self.bump();
            let k = self.number()?;
            e = RelExpr::power(e, k);
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<RelExpr> {
        match self.peek() {
            Tok::Var(c) => {
                self.bump();
                Ok(RelExpr::Var(c))
            }
            Tok::Num(0) => {
                self.bump();
                Ok(RelExpr::Zero)
            }
            Tok::Num(1) => {
                self.bump();
                Ok(RelExpr::One)
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Kw(kw) => {
                self.bump();
                self.expect(Tok::LParen, "'('")?;
                let a = self.expr()?;
                let e = match kw {
                    "tc" => RelExpr::transitive(a),
                    "cl" => {
                        self.expect(Tok::Comma, "','")?;
                        let b = self.expr()?;
                        RelExpr::closure(a, b)
                    }
                    _ => {
                        self.expect(Tok::Comma, "','")?;
                        let b = self.expr()?;
                        self.expect(Tok::Comma, "','")?;
                        let k = self.number()?;
                        RelExpr::alt_chain(a, b, k as usize)
                    }
                };
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            _ => self.err("expected operand"),
        }
    }
}

/// Variable assignment for expression evaluation.
pub type Binding = HashMap<char, BinaryRelation>;

/// Evaluates an expression on the universe of `alg`.
pub fn eval_rel_expr(expr: &RelExpr, binding: &Binding, alg: &FiniteAlgebra) -> Result<BinaryRelation> {
    let n = alg.size;
    Ok(match expr {
        RelExpr::Var(c) => {
            let r = binding
                .get(c)
                .ok_or_else(|| Error::UnboundVariable(c.to_string()))?;
            if r.size() != n {
                return Err(Error::SizeMismatch(r.size(), n));
            }
            r.clone()
        }
        RelExpr::Zero => BinaryRelation::diagonal(n),
        RelExpr::One => BinaryRelation::full(n),
        RelExpr::Meet(a, b) => eval_rel_expr(a, binding, alg)?.meet(&eval_rel_expr(b, binding, alg)?)?,
        RelExpr::Compose(a, b) => {
            eval_rel_expr(a, binding, alg)?.compose(&eval_rel_expr(b, binding, alg)?)?
        }
        RelExpr::Converse(a) => eval_rel_expr(a, binding, alg)?.converse(),
        RelExpr::Power(a, k) => {
            let base = eval_rel_expr(a, binding, alg)?;
            let mut acc = BinaryRelation::diagonal(n);
            for i in 0..*k {
                acc = if i == 0 { base.clone() } else { acc.compose(&base)? };
            }
            acc
        }
        RelExpr::Closure(a, b) => {
            let u = eval_rel_expr(a, binding, alg)?.union(&eval_rel_expr(b, binding, alg)?)?;
            adm_closure(alg, &u.pairs(), false)?
        }
        RelExpr::Transitive(a) => eval_rel_expr(a, binding, alg)?.transitive_closure(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Inclusion {
    Holds,
    Fails(usize, usize),
}

impl Inclusion {
    pub fn holds(&self) -> bool {
        matches!(self, Inclusion::Holds)
    }
}

/// Evaluates both sides; the witness is the least pair of `lhs \ rhs`.
pub fn check_inclusion(identity: &Identity, binding: &Binding, alg: &FiniteAlgebra) -> Result<Inclusion> {
    let l = eval_rel_expr(&identity.lhs, binding, alg)?;
    let r = eval_rel_expr(&identity.rhs, binding, alg)?;
    Ok(match l.first_difference(&r) {
        None => Inclusion::Holds,
        Some((a, b)) => Inclusion::Fails(a, b),
    })
}

/// Shorthand for the meet `ab` of two variables.
pub fn mv(a: char, b: char) -> RelExpr {
    RelExpr::meet(RelExpr::Var(a), RelExpr::Var(b))
}

/// `α(β ∘ αγ ∘ β)`, the left side of the modularity-type identities.
pub fn lhs_abgb() -> RelExpr {
    RelExpr::meet(
        RelExpr::Var('a'),
        RelExpr::compose_all(vec![RelExpr::Var('b'), mv('a', 'g'), RelExpr::Var('b')]),
    )
}

/// `αβ ∘ αγ ∘ ...` with `k` factors (standard Day-level identity at k).
pub fn modular_identity(k: usize) -> Identity {
    Identity::new(lhs_abgb(), RelExpr::alt_chain(mv('a', 'b'), mv('a', 'g'), k))
}

/// `αγ ∘ αβ ∘ ...` with `k` factors (reversed Day-level identity at k).
pub fn reversed_modular_identity(k: usize) -> Identity {
    Identity::new(lhs_abgb(), RelExpr::alt_chain(mv('a', 'g'), mv('a', 'b'), k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_example() {
        let id = parse_identity("a(b o g) <= ab o ag o ab").unwrap();
        let lhs = RelExpr::meet(
            RelExpr::var('a'),
            RelExpr::compose(RelExpr::var('b'), RelExpr::var('g')),
        );
        let rhs = RelExpr::compose(RelExpr::compose(mv('a', 'b'), mv('a', 'g')), mv('a', 'b'));
        assert_eq!(id, Identity::new(lhs, rhs));
        assert_eq!(id.to_string(), "a(b o g) <= ab o ag o ab");
    }

    #[test]
    fn error_positions() {
        match parse_identity("a((") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 3),
            other => panic!("{other:?}"),
        }
        assert!(RelExpr::parse("a $ b").is_err());
        assert!(RelExpr::parse("a o").is_err());
    }

    #[test]
    fn aliases_keywords_and_lowering() {
        assert_eq!(
            RelExpr::parse("alpha & beta").unwrap(),
            RelExpr::parse("ab").unwrap()
        );
        assert_eq!(
            RelExpr::parse("alt(ab, ag, 3)").unwrap(),
            RelExpr::parse("ab o ag o ab").unwrap()
        );
        assert_eq!(RelExpr::parse("alt(a, b, 0)").unwrap(), RelExpr::Zero);
        assert_eq!(RelExpr::parse("alt(a, b, 1)").unwrap(), RelExpr::var('a'));
        assert_eq!(RelExpr::parse("aob").unwrap(), RelExpr::parse("a o b").unwrap());
        let e = RelExpr::parse("~a^2 cl(b,g) tc(a o b)").unwrap();
        assert_eq!(RelExpr::parse(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn awkward_juxtapositions_round_trip() {
        let word = "alpha".chars().map(RelExpr::Var).reduce(RelExpr::meet).unwrap();
        let printed = word.to_string();
        assert_eq!(RelExpr::parse(&printed).unwrap(), word);
        let kw = RelExpr::meet(
            RelExpr::var('c'),
            RelExpr::Converse(Box::new(RelExpr::var('l'))),
        );
        assert_eq!(RelExpr::parse(&kw.to_string()).unwrap(), kw);
        let cl = RelExpr::meet(RelExpr::var('c'), RelExpr::closure(RelExpr::var('a'), RelExpr::var('b')));
        assert_eq!(RelExpr::parse(&cl.to_string()).unwrap(), cl);
        let left_kw = RelExpr::meet(
            RelExpr::meet(RelExpr::var('c'), RelExpr::var('l')),
            RelExpr::compose(RelExpr::var('a'), RelExpr::var('b')),
        );
        assert_eq!(RelExpr::parse(&left_kw.to_string()).unwrap(), left_kw);
    }
}
