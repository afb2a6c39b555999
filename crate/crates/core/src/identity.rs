//! Single-identity linear conditions `t(u1,...,un) = t(v1,...,vn)` and
//! their assigned graphs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::DiGraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("function symbols differ: `{lhs}` vs `{rhs}`")]
    SymbolMismatch { lhs: String, rhs: String },
    #[error("argument counts differ: {lhs} vs {rhs}")]
    ArityMismatch { lhs: usize, rhs: usize },
    #[error("a loop condition needs at least one argument")]
    EmptyArgs,
    #[error("vertex {0} has no incident edge and cannot become a variable")]
    IsolatedVertex(usize),
}

/// A parsed identity `symbol(lhs) = symbol(rhs)`.
///
/// `variables` lists every name occurring in the identity in first-occurrence
/// order, scanning `lhs` and then `rhs`. Vertex `i` of [`condition_graph`]
/// is `variables[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LoopCondition {
    symbol: String,
    lhs: Vec<String>,
    rhs: Vec<String>,
    variables: Vec<String>,
}

impl LoopCondition {
    pub fn new(
        symbol: impl Into<String>,
        lhs: Vec<String>,
        rhs: Vec<String>,
    ) -> Result<Self, ParseError> {
        if lhs.len() != rhs.len() {
            return Err(ParseError::ArityMismatch {
                lhs: lhs.len(),
                rhs: rhs.len(),
            });
        }
        if lhs.is_empty() {
            return Err(ParseError::EmptyArgs);
        }
        let symbol = symbol.into();
        for name in std::iter::once(&symbol).chain(&lhs).chain(&rhs) {
            if !is_ident(name) {
                return Err(ParseError::Syntax {
                    pos: 0,
                    msg: format!("`{name}` is not an identifier"),
                });
            }
        }
        let mut variables: Vec<String> = Vec::new();
        for name in lhs.iter().chain(&rhs) {
            if !variables.contains(name) {
                variables.push(name.clone());
            }
        }
        Ok(LoopCondition {
            symbol,
            lhs,
            rhs,
            variables,
        })
    }

    /// Builds the condition whose assigned graph is `g`: one argument
    /// position per edge, in ascending edge order. Variable names come from
    /// the graph labels, or `x<i>` when unlabeled.
    pub fn from_graph(symbol: &str, g: &DiGraph) -> Result<Self, ParseError> {
        let mut touched = vec![false; g.vertex_count()];
        for &(a, b) in g.edges() {
            touched[a] = true;
            touched[b] = true;
        }
        if let Some(v) = touched.iter().position(|t| !t) {
            return Err(ParseError::IsolatedVertex(v));
        }
        let name = |v: usize| g.label(v);
        let (lhs, rhs) = g.edges().iter().map(|&(a, b)| (name(a), name(b))).unzip();
        LoopCondition::new(symbol, lhs, rhs)
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn arity(&self) -> usize {
        self.lhs.len()
    }

    pub fn lhs(&self) -> &[String] {
        &self.lhs
    }

    pub fn rhs(&self) -> &[String] {
        &self.rhs
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    fn index_of(&self, name: &str) -> usize {
        self.variables
            .iter()
            .position(|v| v == name)
            .expect("variable list covers both sides")
    }

    /// Left-hand side as variable indices.
    pub fn lhs_indices(&self) -> Vec<usize> {
        self.lhs.iter().map(|n| self.index_of(n)).collect()
    }

    /// Right-hand side as variable indices.
    pub fn rhs_indices(&self) -> Vec<usize> {
        self.rhs.iter().map(|n| self.index_of(n)).collect()
    }
}

impl fmt::Display for LoopCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{s}({})={s}({})",
            self.lhs.join(","),
            self.rhs.join(","),
            s = self.symbol
        )
    }
}

impl FromStr for LoopCondition {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_condition(s)
    }
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_')
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        self.skip_ws();
        match self.src[self.pos..].chars().next() {
            Some(found) if found == c => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(found) => self.error(format!("expected `{c}`, found `{found}`")),
            None => self.error(format!("expected `{c}`, found end of input")),
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn ident(&mut self) -> Result<&'a str, ParseError> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .find(|c: char| !(c.is_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        if len == 0 {
            return self.error("expected identifier");
        }
        self.pos += len;
        Ok(&rest[..len])
    }

    fn term(&mut self) -> Result<(&'a str, Vec<String>), ParseError> {
        let symbol = self.ident()?;
        self.expect('(')?;
        let mut args = Vec::new();
        if self.peek() == Some(')') {
            self.pos += 1;
            return Ok((symbol, args));
        }
        loop {
            args.push(self.ident()?.to_owned());
            match self.peek() {
                Some(',') => self.pos += 1,
                Some(')') => {
                    self.pos += 1;
                    return Ok((symbol, args));
                }
                Some(c) => return self.error(format!("expected `,` or `)`, found `{c}`")),
                None => return self.error("unterminated argument list"),
            }
        }
    }
}

/// Parses `ident(varlist) = ident(varlist)`; whitespace is insignificant.
pub fn parse_condition(text: &str) -> Result<LoopCondition, ParseError> {
    let mut cur = Cursor { src: text, pos: 0 };
    let (ls, lhs) = cur.term()?;
    cur.expect('=')?;
    let (rs, rhs) = cur.term()?;
    if cur.peek().is_some() {
        return cur.error("trailing input");
    }
    if ls != rs {
        return Err(ParseError::SymbolMismatch {
            lhs: ls.to_owned(),
            rhs: rs.to_owned(),
        });
    }
    LoopCondition::new(ls, lhs, rhs)
}

/// Canonical text form; inverse of [`parse_condition`].
pub fn print_condition(c: &LoopCondition) -> String {
    c.to_string()
}

/// The assigned graph: vertices are the variables, one edge `(u_i, v_i)` per
/// argument position, duplicates collapsed. Loops are kept as edges.
pub fn condition_graph(c: &LoopCondition) -> DiGraph {
    let edges = c.lhs_indices().into_iter().zip(c.rhs_indices());
    DiGraph::from_edges(c.variables.len(), edges)
        .expect("indices are in range")
        .with_labels(c.variables.clone())
        .expect("one label per variable")
}
