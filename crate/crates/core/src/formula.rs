//! Prenex first-order formulas with a negation-normal-form matrix, their
//! textual syntax, and Tarskian evaluation on finite structures.
//!
//! Syntax example: `EXISTS x1 FORALL x2 . (E(x1,x2) & !E(x2,x1)) | x1=x2`.
//! `TRUE` and `FALSE` are the empty conjunction and disjunction. A term is a
//! schema constant if the schema declares it, otherwise a variable.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::CoreError;
use crate::structure::{Element, Schema, Structure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Quantifier {
    Exists,
    Forall,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn name(&self) -> &str {
        match self {
            Term::Var(s) | Term::Const(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Atom {
    Rel { relation: String, args: Vec<Term> },
    Eq(Term, Term),
}

/// Quantifier-free formula in negation normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Nnf {
    Lit { atom: Atom, positive: bool },
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
}

impl Nnf {
    pub const TRUE: Nnf = Nnf::And(Vec::new());
    pub const FALSE: Nnf = Nnf::Or(Vec::new());

    pub fn negate(&self) -> Nnf {
        match self {
            Nnf::Lit { atom, positive } => Nnf::Lit {
                atom: atom.clone(),
                positive: !positive,
            },
            Nnf::And(parts) => Nnf::Or(parts.iter().map(|p| p.negate()).collect()),
            Nnf::Or(parts) => Nnf::And(parts.iter().map(|p| p.negate()).collect()),
        }
    }

    fn terms<'a>(&'a self, out: &mut Vec<&'a Term>) {
        match self {
            Nnf::Lit { atom, .. } => match atom {
                Atom::Rel { args, .. } => out.extend(args.iter()),
                Atom::Eq(a, b) => {
                    out.push(a);
                    out.push(b);
                }
            },
            Nnf::And(parts) | Nnf::Or(parts) => {
                for p in parts {
                    p.terms(out);
                }
            }
        }
    }
}

/// A prenex formula: quantifier prefix, NNF matrix, and the ordered list of
/// free variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    pub prefix: Vec<(Quantifier, String)>,
    pub matrix: Nnf,
    pub free_vars: Vec<String>,
}

impl Formula {
    /// Build and validate: prefix variables pairwise distinct and disjoint
    /// from free variables; every matrix variable bound or free.
    pub fn new(
        prefix: Vec<(Quantifier, String)>,
        matrix: Nnf,
        free_vars: Vec<String>,
    ) -> Result<Self, CoreError> {
        let mut bound = BTreeSet::new();
        for (_, v) in &prefix {
            if !bound.insert(v.clone()) {
                return Err(CoreError::InvalidStructure(format!(
                    "variable `{v}` quantified twice"
                )));
            }
        }
        for v in &free_vars {
            if bound.contains(v) {
                return Err(CoreError::InvalidStructure(format!(
                    "variable `{v}` both free and bound"
                )));
            }
        }
        let free: BTreeSet<&String> = free_vars.iter().collect();
        let mut terms = Vec::new();
        matrix.terms(&mut terms);
        for t in terms {
            if let Term::Var(v) = t {
                if !bound.contains(v) && !free.contains(v) {
                    return Err(CoreError::UnboundVariable(v.clone()));
                }
            }
        }
        Ok(Formula {
            prefix,
            matrix,
            free_vars,
        })
    }

    pub fn quantifier_count(&self) -> usize {
        self.prefix.len()
    }

    /// For prenex formulas the quantifier rank equals the prefix length.
    pub fn quantifier_rank(&self) -> usize {
        self.prefix.len()
    }

    /// Parse the textual syntax against a schema (so constant names resolve).
    pub fn parse(text: &str, schema: &Schema) -> Result<Self, CoreError> {
        Parser::new(text, schema).parse_formula()
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (q, v) in &self.prefix {
            match q {
                Quantifier::Exists => write!(f, "EXISTS {v} ")?,
                Quantifier::Forall => write!(f, "FORALL {v} ")?,
            }
        }
        if !self.prefix.is_empty() {
            write!(f, ". ")?;
        }
        write_nnf(f, &self.matrix, 0)
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, t: &Term) -> fmt::Result {
    write!(f, "{}", t.name())
}

// precedence: 0 = or-context, 1 = and-context
fn write_nnf(f: &mut fmt::Formatter<'_>, n: &Nnf, prec: u8) -> fmt::Result {
    match n {
        Nnf::Lit { atom, positive } => {
            if !positive {
                write!(f, "!")?;
            }
            match atom {
                Atom::Rel { relation, args } => {
                    write!(f, "{relation}(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write_term(f, a)?;
                    }
                    write!(f, ")")
                }
                Atom::Eq(a, b) => {
                    if !positive {
                        // rendered as !x=y; re-parsed as the negated atom
                        write!(f, "(")?;
                        write_term(f, a)?;
                        write!(f, "=")?;
                        write_term(f, b)?;
                        write!(f, ")")
                    } else {
                        write_term(f, a)?;
                        write!(f, "=")?;
                        write_term(f, b)
                    }
                }
            }
        }
        Nnf::And(parts) => {
            if parts.is_empty() {
                return write!(f, "TRUE");
            }
            if parts.len() == 1 {
                return write_nnf(f, &parts[0], prec);
            }
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    write!(f, " & ")?;
                }
                write_nnf(f, p, 1)?;
            }
            Ok(())
        }
        Nnf::Or(parts) => {
            if parts.is_empty() {
                return write!(f, "FALSE");
            }
            if parts.len() == 1 {
                return write_nnf(f, &parts[0], prec);
            }
            let need_parens = prec >= 1;
            if need_parens {
                write!(f, "(")?;
            }
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    write!(f, " | ")?;
                }
                write_nnf(f, p, 0)?;
            }
            if need_parens {
                write!(f, ")")?;
            }
            Ok(())
        }
    }
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    schema: &'a Schema,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Exists,
    Forall,
    Dot,
    LParen,
    RParen,
    Comma,
    Amp,
    Pipe,
    Bang,
    Eq,
    Neq,
    True,
    False,
}

fn tokenize(text: &str) -> Result<Vec<Token>, CoreError> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '.' => {
                tokens.push(Token::Dot);
                i += 1;
            }
            '(' => {
                tokens.push(Token::LParen);
                i += 1;
            }
            ')' => {
                tokens.push(Token::RParen);
                i += 1;
            }
            ',' => {
                tokens.push(Token::Comma);
                i += 1;
            }
            '&' => {
                tokens.push(Token::Amp);
                i += 1;
            }
            '|' => {
                tokens.push(Token::Pipe);
                i += 1;
            }
            '=' => {
                tokens.push(Token::Eq);
                i += 1;
            }
            '!' => {
                if i + 1 < chars.len() && chars[i + 1] == '=' {
                    tokens.push(Token::Neq);
                    i += 2;
                } else {
                    tokens.push(Token::Bang);
                    i += 1;
                }
            }
            c if c.is_alphanumeric() || c == '_' || c == '\'' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
                {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                tokens.push(match word.as_str() {
                    "EXISTS" => Token::Exists,
                    "FORALL" => Token::Forall,
                    "TRUE" => Token::True,
                    "FALSE" => Token::False,
                    _ => Token::Ident(word),
                });
            }
            other => {
                return Err(CoreError::parse(
                    format!("offset {i}"),
                    format!("unexpected character `{other}`"),
                ))
            }
        }
    }
    Ok(tokens)
}

impl<'a> Parser<'a> {
    fn new(text: &str, schema: &'a Schema) -> Self {
        Parser {
            tokens: tokenize(text).unwrap_or_default(),
            pos: 0,
            schema,
        }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Token) -> Result<(), CoreError> {
        let got = self.bump();
        if got.as_ref() == Some(&t) {
            Ok(())
        } else {
            Err(CoreError::parse(
                format!("token {}", self.pos),
                format!("expected {t:?}, found {got:?}"),
            ))
        }
    }

    fn parse_formula(mut self) -> Result<Formula, CoreError> {
        let mut prefix = Vec::new();
        loop {
            match self.peek() {
                Some(Token::Exists) | Some(Token::Forall) => {
                    let q = if matches!(self.bump(), Some(Token::Exists)) {
                        Quantifier::Exists
                    } else {
                        Quantifier::Forall
                    };
                    match self.bump() {
                        Some(Token::Ident(v)) => prefix.push((q, v)),
                        got => {
                            return Err(CoreError::parse(
                                format!("token {}", self.pos),
                                format!("expected variable after quantifier, found {got:?}"),
                            ))
                        }
                    }
                }
                _ => break,
            }
        }
        if !prefix.is_empty() {
            self.expect(Token::Dot)?;
        }
        let raw = self.parse_or()?;
        if self.pos != self.tokens.len() {
            return Err(CoreError::parse(
                format!("token {}", self.pos),
                "trailing input after formula",
            ));
        }
        let matrix = to_nnf(&raw, false);
        // free variables: matrix variables not bound by the prefix, sorted
        let mut terms = Vec::new();
        matrix.terms(&mut terms);
        let bound: BTreeSet<&str> = prefix.iter().map(|(_, v)| v.as_str()).collect();
        let mut free: BTreeSet<String> = BTreeSet::new();
        for t in terms {
            if let Term::Var(v) = t {
                if !bound.contains(v.as_str()) {
                    free.insert(v.clone());
                }
            }
        }
        Formula::new(prefix, matrix, free.into_iter().collect())
    }

    fn parse_or(&mut self) -> Result<Raw, CoreError> {
        let mut parts = vec![self.parse_and()?];
        while self.peek() == Some(&Token::Pipe) {
            self.bump();
            parts.push(self.parse_and()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Raw::Or(parts)
        })
    }

    fn parse_and(&mut self) -> Result<Raw, CoreError> {
        let mut parts = vec![self.parse_unary()?];
        while self.peek() == Some(&Token::Amp) {
            self.bump();
            parts.push(self.parse_unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Raw::And(parts)
        })
    }

    fn parse_unary(&mut self) -> Result<Raw, CoreError> {
        match self.peek() {
            Some(Token::Bang) => {
                self.bump();
                Ok(Raw::Not(Box::new(self.parse_unary()?)))
            }
            Some(Token::LParen) => {
                self.bump();
                let inner = self.parse_or()?;
                self.expect(Token::RParen)?;
                // allow (a=b) = c chains? no: just return inner
                Ok(inner)
            }
            Some(Token::True) => {
                self.bump();
                Ok(Raw::And(vec![]))
            }
            Some(Token::False) => {
                self.bump();
                Ok(Raw::Or(vec![]))
            }
            Some(Token::Ident(_)) => {
                let name = match self.bump() {
                    Some(Token::Ident(n)) => n,
                    _ => unreachable!(),
                };
                match self.peek() {
                    Some(Token::LParen) => {
                        self.bump();
                        let mut args = Vec::new();
                        loop {
                            match self.bump() {
                                Some(Token::Ident(a)) => args.push(self.term(a)),
                                got => {
                                    return Err(CoreError::parse(
                                        format!("token {}", self.pos),
                                        format!("expected term, found {got:?}"),
                                    ))
                                }
                            }
                            match self.bump() {
                                Some(Token::Comma) => continue,
                                Some(Token::RParen) => break,
                                got => {
                                    return Err(CoreError::parse(
                                        format!("token {}", self.pos),
                                        format!("expected `,` or `)`, found {got:?}"),
                                    ))
                                }
                            }
                        }
                        if self.schema.relation_index(&name).is_none() {
                            return Err(CoreError::UnknownSymbol(name));
                        }
                        Ok(Raw::Atom(Atom::Rel {
                            relation: name,
                            args,
                        }))
                    }
                    Some(Token::Eq) => {
                        self.bump();
                        let rhs = match self.bump() {
                            Some(Token::Ident(r)) => r,
                            got => {
                                return Err(CoreError::parse(
                                    format!("token {}", self.pos),
                                    format!("expected term after `=`, found {got:?}"),
                                ))
                            }
                        };
                        Ok(Raw::Atom(Atom::Eq(self.term(name), self.term(rhs))))
                    }
                    Some(Token::Neq) => {
                        self.bump();
                        let rhs = match self.bump() {
                            Some(Token::Ident(r)) => r,
                            got => {
                                return Err(CoreError::parse(
                                    format!("token {}", self.pos),
                                    format!("expected term after `!=`, found {got:?}"),
                                ))
                            }
                        };
                        Ok(Raw::Not(Box::new(Raw::Atom(Atom::Eq(
                            self.term(name),
                            self.term(rhs),
                        )))))
                    }
                    _ => Err(CoreError::parse(
                        format!("token {}", self.pos),
                        format!("dangling term `{name}`"),
                    )),
                }
            }
            got => Err(CoreError::parse(
                format!("token {}", self.pos),
                format!("expected formula, found {got:?}"),
            )),
        }
    }

    fn term(&self, name: String) -> Term {
        if self.schema.constant_index(&name).is_some() {
            Term::Const(name)
        } else {
            Term::Var(name)
        }
    }
}

enum Raw {
    Atom(Atom),
    Not(Box<Raw>),
    And(Vec<Raw>),
    Or(Vec<Raw>),
}

fn to_nnf(raw: &Raw, negated: bool) -> Nnf {
    match raw {
        Raw::Atom(a) => Nnf::Lit {
            atom: a.clone(),
            positive: !negated,
        },
        Raw::Not(inner) => to_nnf(inner, !negated),
        Raw::And(parts) => {
            let converted: Vec<Nnf> = parts.iter().map(|p| to_nnf(p, negated)).collect();
            if negated {
                Nnf::Or(converted)
            } else {
                Nnf::And(converted)
            }
        }
        Raw::Or(parts) => {
            let converted: Vec<Nnf> = parts.iter().map(|p| to_nnf(p, negated)).collect();
            if negated {
                Nnf::And(converted)
            } else {
                Nnf::Or(converted)
            }
        }
    }
}

/// Tarskian truth of `phi` on `s` under an assignment of the free variables.
/// The assignment must cover exactly the free variables.
pub fn evaluate(
    s: &Structure,
    phi: &Formula,
    assignment: &BTreeMap<String, Element>,
) -> Result<bool, CoreError> {
    let free: BTreeSet<&String> = phi.free_vars.iter().collect();
    for v in assignment.keys() {
        if !free.contains(v) {
            return Err(CoreError::UnboundVariable(format!(
                "assignment binds `{v}` which is not free"
            )));
        }
    }
    for v in &phi.free_vars {
        if !assignment.contains_key(v) {
            return Err(CoreError::UnboundVariable(v.clone()));
        }
    }
    // validate symbols against the schema
    let mut terms = Vec::new();
    phi.matrix.terms(&mut terms);
    for t in &terms {
        if let Term::Const(c) = t {
            if s.schema().constant_index(c).is_none() {
                return Err(CoreError::UnknownSymbol(c.clone()));
            }
        }
    }
    let mut env: BTreeMap<&str, Element> = BTreeMap::new();
    for (k, v) in assignment {
        env.insert(k.as_str(), *v);
    }
    eval_prefix(s, phi, 0, &mut env)
}

fn eval_prefix<'a>(
    s: &Structure,
    phi: &'a Formula,
    level: usize,
    env: &mut BTreeMap<&'a str, Element>,
) -> Result<bool, CoreError> {
    if level == phi.prefix.len() {
        return eval_nnf(s, &phi.matrix, env);
    }
    let (q, var) = &phi.prefix[level];
    let exists = *q == Quantifier::Exists;
    for e in s.elements() {
        env.insert(var.as_str(), e);
        let sub = eval_prefix(s, phi, level + 1, env)?;
        if sub == exists {
            env.remove(var.as_str());
            return Ok(exists);
        }
    }
    env.remove(var.as_str());
    Ok(!exists)
}

fn eval_term(
    s: &Structure,
    t: &Term,
    env: &BTreeMap<&str, Element>,
) -> Result<Element, CoreError> {
    match t {
        Term::Var(v) => env
            .get(v.as_str())
            .copied()
            .ok_or_else(|| CoreError::UnboundVariable(v.clone())),
        Term::Const(c) => {
            let idx = s
                .schema()
                .constant_index(c)
                .ok_or_else(|| CoreError::UnknownSymbol(c.clone()))?;
            Ok(s.constant_value(idx))
        }
    }
}

fn eval_nnf(
    s: &Structure,
    n: &Nnf,
    env: &BTreeMap<&str, Element>,
) -> Result<bool, CoreError> {
    match n {
        Nnf::Lit { atom, positive } => {
            let value = match atom {
                Atom::Rel { relation, args } => {
                    let idx = s
                        .schema()
                        .relation_index(relation)
                        .ok_or_else(|| CoreError::UnknownSymbol(relation.clone()))?;
                    let tuple: Vec<Element> = args
                        .iter()
                        .map(|a| eval_term(s, a, env))
                        .collect::<Result<_, _>>()?;
                    s.holds(idx, &tuple)
                }
                Atom::Eq(a, b) => eval_term(s, a, env)? == eval_term(s, b, env)?,
            };
            Ok(value == *positive)
        }
        Nnf::And(parts) => {
            for p in parts {
                if !eval_nnf(s, p, env)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Nnf::Or(parts) => {
            for p in parts {
                if eval_nnf(s, p, env)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn digraph(n: u32, edges: &[(u32, u32)]) -> Structure {
        let mut b = Structure::builder(Schema::digraph(), n);
        for &(u, v) in edges {
            b.add_edge("E", u, v).unwrap();
        }
        b.finish().unwrap()
    }

    #[test]
    fn exists_edge_on_single_edge_digraph() {
        let s = digraph(2, &[(0, 1)]);
        let phi = Formula::parse("EXISTS x1 EXISTS x2 . E(x1,x2)", s.schema()).unwrap();
        assert!(evaluate(&s, &phi, &BTreeMap::new()).unwrap());
        let empty = digraph(2, &[]);
        assert!(!evaluate(&empty, &phi, &BTreeMap::new()).unwrap());
    }

    #[test]
    fn self_loop_detection() {
        let s = digraph(3, &[(1, 1)]);
        let phi = Formula::parse("EXISTS x . E(x,x)", s.schema()).unwrap();
        assert!(evaluate(&s, &phi, &BTreeMap::new()).unwrap());
    }

    #[test]
    fn free_variable_assignment() {
        let s = digraph(2, &[(0, 1)]);
        let phi = Formula::parse("EXISTS y . E(x1,y)", s.schema()).unwrap();
        assert_eq!(phi.free_vars, vec!["x1".to_string()]);
        let mut asg = BTreeMap::new();
        asg.insert("x1".to_string(), 0);
        assert!(evaluate(&s, &phi, &asg).unwrap());
        asg.insert("x1".to_string(), 1);
        assert!(!evaluate(&s, &phi, &asg).unwrap());
    }

    #[test]
    fn parse_print_round_trip() {
        let schema = Schema::digraph();
        for text in [
            "EXISTS x1 FORALL x2 . (E(x1,x2) & !E(x2,x1)) | x1=x2",
            "E(x1,x1)",
            "TRUE",
            "FALSE",
            "FORALL x . E(x,x) | !(x=x)",
        ] {
            let phi = Formula::parse(text, &schema).unwrap();
            let printed = phi.to_string();
            let reparsed = Formula::parse(&printed, &schema).unwrap();
            assert_eq!(phi, reparsed, "round-trip failed for `{text}` -> `{printed}`");
        }
    }

    #[test]
    fn missing_assignment_is_error() {
        let s = digraph(1, &[]);
        let phi = Formula::parse("E(x1,x1)", s.schema()).unwrap();
        assert!(evaluate(&s, &phi, &BTreeMap::new()).is_err());
    }

    #[test]
    fn unknown_relation_is_error() {
        let schema = Schema::digraph();
        assert!(Formula::parse("Q(x1)", &schema).is_err());
    }

    #[test]
    fn bound_variable_renaming_is_invariant() {
        let s = digraph(3, &[(0, 1), (1, 2)]);
        let a = Formula::parse("EXISTS u FORALL v . E(u,v) | !E(v,u)", s.schema()).unwrap();
        let b = Formula::parse("EXISTS p FORALL q . E(p,q) | !E(q,p)", s.schema()).unwrap();
        assert_eq!(
            evaluate(&s, &a, &BTreeMap::new()).unwrap(),
            evaluate(&s, &b, &BTreeMap::new()).unwrap()
        );
    }

    #[test]
    fn arc_schema_usable() {
        let schema = Schema::colored_digraph();
        let phi = Formula::parse("EXISTS x . R(x) & G(x)", &schema).unwrap();
        assert_eq!(phi.quantifier_count(), 1);
        let _ = Arc::new(phi);
    }
}
