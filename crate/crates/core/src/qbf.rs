//! Quantified 3-CNF instances and the QDIMACS format.

use crate::error::CoreError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quant {
    Exists,
    Forall,
}

/// A literal: positive or negated occurrence of a 1-based variable.
pub type Literal = i32;

/// A quantified 3-CNF formula Q1 x1 ... Qn xn. C1 ∧ ... ∧ Cm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QbfInstance {
    pub prefix: Vec<Quant>,
    pub clauses: Vec<Vec<Literal>>,
}

impl QbfInstance {
    pub fn new(prefix: Vec<Quant>, clauses: Vec<Vec<Literal>>) -> Result<Self, CoreError> {
        let n = prefix.len() as i32;
        for (i, clause) in clauses.iter().enumerate() {
            if clause.len() > 3 {
                return Err(CoreError::Domain(format!(
                    "clause {} has {} literals; at most 3 allowed",
                    i + 1,
                    clause.len()
                )));
            }
            for &lit in clause {
                if lit == 0 || lit.abs() > n {
                    return Err(CoreError::Domain(format!(
                        "literal {lit} references an undeclared variable"
                    )));
                }
            }
        }
        Ok(QbfInstance { prefix, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.prefix.len()
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Does the prefix strictly alternate ∃∀∃∀... with an even length?
    pub fn is_alternating(&self) -> bool {
        self.prefix.len() % 2 == 0
            && self.prefix.iter().enumerate().all(|(i, q)| {
                if i % 2 == 0 {
                    *q == Quant::Exists
                } else {
                    *q == Quant::Forall
                }
            })
    }

    /// Rewrite into an equivalent instance whose prefix alternates ∃∀ and
    /// has even length, by inserting dummy variables that occur in no
    /// clause. Variables are renumbered; clause literals are remapped.
    pub fn pad_alternating(&self) -> QbfInstance {
        let mut prefix = Vec::new();
        let mut map = vec![0i32; self.prefix.len() + 1];
        for (i, q) in self.prefix.iter().enumerate() {
            let want = if prefix.len() % 2 == 0 {
                Quant::Exists
            } else {
                Quant::Forall
            };
            if *q != want {
                prefix.push(want); // dummy variable, occurs in no clause
            }
            prefix.push(*q);
            map[i + 1] = prefix.len() as i32;
        }
        if prefix.len() % 2 == 1 {
            prefix.push(Quant::Forall);
        }
        let clauses = self
            .clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&lit| lit.signum() * map[lit.unsigned_abs() as usize])
                    .collect()
            })
            .collect();
        QbfInstance { prefix, clauses }
    }

    /// Parse QDIMACS: `p cnf <vars> <clauses>`, quantifier lines `e ... 0` /
    /// `a ... 0` in prefix order, then clause lines terminated by 0.
    pub fn parse_qdimacs(text: &str) -> Result<Self, CoreError> {
        let mut nvars: Option<usize> = None;
        let mut order: Vec<(usize, Quant)> = Vec::new();
        let mut clauses: Vec<Vec<Literal>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            let loc = || format!("line {}", lineno + 1);
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let head = parts.next().unwrap();
            match head {
                "p" => {
                    if parts.next() != Some("cnf") {
                        return Err(CoreError::parse(loc(), "expected `p cnf`"));
                    }
                    nvars = Some(
                        parts
                            .next()
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| CoreError::parse(loc(), "bad variable count"))?,
                    );
                }
                "e" | "a" => {
                    let q = if head == "e" { Quant::Exists } else { Quant::Forall };
                    for tok in parts {
                        let v: i32 = tok
                            .parse()
                            .map_err(|_| CoreError::parse(loc(), "bad quantifier block"))?;
                        if v == 0 {
                            break;
                        }
                        if v < 0 {
                            return Err(CoreError::parse(loc(), "negative variable in prefix"));
                        }
                        order.push((v as usize, q));
                    }
                }
                tok => {
                    let mut clause = Vec::new();
                    let first: i32 = tok
                        .parse()
                        .map_err(|_| CoreError::parse(loc(), format!("unexpected token `{tok}`")))?;
                    if first != 0 {
                        clause.push(first);
                    }
                    for tok in parts {
                        let lit: i32 = tok
                            .parse()
                            .map_err(|_| CoreError::parse(loc(), "bad literal"))?;
                        if lit == 0 {
                            break;
                        }
                        clause.push(lit);
                    }
                    clauses.push(clause);
                }
            }
        }
        let nvars = nvars.ok_or_else(|| CoreError::parse("end of input", "missing `p cnf`"))?;
        // variables are renumbered into prefix order; unlisted variables are
        // appended as existential (standard QDIMACS free-variable reading)
        let mut map = vec![0i32; nvars + 1];
        let mut prefix = Vec::new();
        for (v, q) in &order {
            if *v > nvars {
                return Err(CoreError::parse(
                    "prefix",
                    format!("variable {v} exceeds declared count {nvars}"),
                ));
            }
            if map[*v] != 0 {
                return Err(CoreError::parse("prefix", format!("variable {v} quantified twice")));
            }
            prefix.push(*q);
            map[*v] = prefix.len() as i32;
        }
        for v in 1..=nvars {
            if map[v] == 0 {
                prefix.push(Quant::Exists);
                map[v] = prefix.len() as i32;
            }
        }
        let clauses = clauses
            .into_iter()
            .map(|c| {
                c.into_iter()
                    .map(|lit| {
                        let v = lit.unsigned_abs() as usize;
                        if v > nvars {
                            Err(CoreError::parse(
                                "clauses",
                                format!("literal {lit} exceeds declared count"),
                            ))
                        } else {
                            Ok(lit.signum() * map[v])
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        QbfInstance::new(prefix, clauses)
    }

    pub fn to_qdimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars(), self.num_clauses());
        let mut i = 0;
        while i < self.prefix.len() {
            let q = self.prefix[i];
            let mut j = i;
            while j < self.prefix.len() && self.prefix[j] == q {
                j += 1;
            }
            let tag = if q == Quant::Exists { 'e' } else { 'a' };
            let vars: Vec<String> = ((i + 1)..=j).map(|v| v.to_string()).collect();
            out.push_str(&format!("{} {} 0\n", tag, vars.join(" ")));
            i = j;
        }
        for clause in &self.clauses {
            let lits: Vec<String> = clause.iter().map(|l| l.to_string()).collect();
            out.push_str(&format!("{} 0\n", lits.join(" ")));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qdimacs_round_trip() {
        let f = QbfInstance::new(
            vec![Quant::Exists, Quant::Forall],
            vec![vec![1], vec![1, -2]],
        )
        .unwrap();
        let text = f.to_qdimacs();
        let g = QbfInstance::parse_qdimacs(&text).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn padding_makes_alternating_without_touching_clauses() {
        let f = QbfInstance::new(vec![Quant::Forall, Quant::Forall], vec![vec![1, -2]]).unwrap();
        let g = f.pad_alternating();
        assert!(g.is_alternating());
        assert_eq!(g.num_vars(), 4);
        // x1 -> x2, x2 -> x4
        assert_eq!(g.clauses, vec![vec![2, -4]]);
    }

    #[test]
    fn long_clause_rejected() {
        assert!(QbfInstance::new(vec![Quant::Exists], vec![vec![1, 1, 1, 1]]).is_err());
    }
}
