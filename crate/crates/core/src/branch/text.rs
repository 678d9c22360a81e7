use thiserror::Error;

use super::{BranchDecomposition, NodeId};
use crate::graph::EdgeId;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TextError {
    #[error("offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("offset {pos}: a node must join exactly two children")]
    Arity { pos: usize },
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    bd: BranchDecomposition,
}

impl Parser<'_> {
    fn skip(&mut self) {
        while self.pos < self.s.len() {
            match self.s[self.pos] {
                b'#' => {
                    while self.pos < self.s.len() && self.s[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn err(&self, msg: &str) -> TextError {
        TextError::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn node(&mut self) -> Result<NodeId, TextError> {
        self.skip();
        match self.s.get(self.pos) {
            Some(b'(') => {
                let open = self.pos;
                self.pos += 1;
                let mut kids = Vec::new();
                loop {
                    self.skip();
                    match self.s.get(self.pos) {
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        None => return Err(self.err("unclosed parenthesis")),
                        _ => kids.push(self.node()?),
                    }
                }
                match kids[..] {
                    [a, b] => Ok(self.bd.add_join(a, b)),
                    _ => Err(TextError::Arity { pos: open }),
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.s.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    self.pos += 1;
                }
                let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                let id: u32 = txt.parse().map_err(|_| self.err("edge id out of range"))?;
                Ok(self.bd.add_leaf(EdgeId(id)))
            }
            Some(_) => Err(self.err("expected '(' or an edge id")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Reads the nested-parentheses form written by
/// [`BranchDecomposition::to_text`]. `()` is the empty decomposition and `#`
/// starts a comment. Validity against a graph is checked separately.
pub fn parse_decomposition(text: &str) -> Result<BranchDecomposition, TextError> {
    let mut p = Parser { s: text.as_bytes(), pos: 0, bd: BranchDecomposition::new() };
    p.skip();
    let rest = &p.s[p.pos..];
    if rest.starts_with(b"(") && rest[1..].iter().find(|c| !c.is_ascii_whitespace()) == Some(&b')') {
        p.pos += 1;
        p.skip();
        p.pos += 1;
    } else {
        let root = p.node()?;
        p.bd.set_root(Some(root));
    }
    p.skip();
    if p.pos != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(p.bd)
}
