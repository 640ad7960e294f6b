//! Tiny textual circuit language, the compiler front end.
//!
//! ```text
//! # statements, one per line
//! input  x
//! input  y
//! const  mask = [1, -2, 0, 3]
//! s  = add x y
//! p  = mul s x
//! m  = ptmul p mask
//! r  = rotate m 3
//! output r
//! ```
//!
//! Values are ciphertexts except `const` bindings, which are plaintext
//! coefficient vectors (centered residues mod t, padded with zeros up to the
//! ring degree).  `add` accepts one constant operand; `mul` of two
//! ciphertexts is a tensor multiply; `ptmul` multiplies by a constant;
//! `rotate` applies the ring automorphism with the given odd exponent.

use crate::error::{CompileError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum CircuitOp {
    Input,
    Const(Vec<i64>),
    Add(u32, u32),
    Mul(u32, u32),
    PtMul(u32, u32),
    Rotate(u32, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitNode {
    pub name: String,
    pub op: CircuitOp,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    pub nodes: Vec<CircuitNode>,
    /// Node indices listed by `output` statements, in order.
    pub outputs: Vec<u32>,
}

impl Circuit {
    pub fn node(&self, idx: u32) -> &CircuitNode {
        &self.nodes[idx as usize]
    }

    pub fn is_const(&self, idx: u32) -> bool {
        matches!(self.node(idx).op, CircuitOp::Const(_))
    }

    /// Multiplicative depth of the deepest output, counting `mul` only.
    pub fn mul_depth(&self) -> usize {
        let mut depth = vec![0usize; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            depth[i] = match node.op {
                CircuitOp::Input | CircuitOp::Const(_) => 0,
                CircuitOp::Add(a, b) => depth[a as usize].max(depth[b as usize]),
                CircuitOp::Mul(a, b) => depth[a as usize].max(depth[b as usize]) + 1,
                CircuitOp::PtMul(a, _) | CircuitOp::Rotate(a, _) => depth[a as usize],
            };
        }
        self.outputs.iter().map(|&o| depth[o as usize]).max().unwrap_or(0)
    }
}

struct Parser<'a> {
    names: Vec<(String, u32)>,
    circuit: Circuit,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn lookup(&self, name: &str, line: usize) -> Result<u32> {
        self.names
            .iter()
            .find(|(n, _)| n == name)
            .map(|&(_, i)| i)
            .ok_or_else(|| CompileError::Parse {
                line,
                msg: format!("unknown name {name:?}"),
            })
    }

    fn bind(&mut self, name: &str, op: CircuitOp, line: usize) -> Result<u32> {
        if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            || name.starts_with(|c: char| c.is_ascii_digit())
            || name.is_empty()
        {
            return Err(CompileError::Parse {
                line,
                msg: format!("bad name {name:?}"),
            });
        }
        if self.names.iter().any(|(n, _)| n == name) {
            return Err(CompileError::Parse {
                line,
                msg: format!("duplicate name {name:?}"),
            });
        }
        let idx = self.circuit.nodes.len() as u32;
        self.circuit.nodes.push(CircuitNode {
            name: name.to_string(),
            op,
        });
        self.names.push((name.to_string(), idx));
        Ok(idx)
    }

    fn ct_operand(&self, name: &str, what: &'static str, line: usize) -> Result<u32> {
        let idx = self.lookup(name, line)?;
        if self.circuit.is_const(idx) {
            return Err(CompileError::Parse {
                line,
                msg: format!("{what} needs a ciphertext, {name:?} is a constant"),
            });
        }
        Ok(idx)
    }

    fn parse(mut self) -> Result<Circuit> {
        for (lineno, raw) in self.src.lines().enumerate() {
            let line = lineno + 1;
            let text = raw.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let fail = |msg: String| CompileError::Parse { line, msg };
            if let Some(rest) = text.strip_prefix("input ") {
                self.bind(rest.trim(), CircuitOp::Input, line)?;
            } else if let Some(rest) = text.strip_prefix("output ") {
                let idx = self.ct_operand(rest.trim(), "output", line)?;
                self.circuit.outputs.push(idx);
            } else if let Some(rest) = text.strip_prefix("const ") {
                let (name, body) = rest
                    .split_once('=')
                    .ok_or_else(|| fail("const needs `name = [..]`".into()))?;
                let body = body.trim();
                let inner = body
                    .strip_prefix('[')
                    .and_then(|b| b.strip_suffix(']'))
                    .ok_or_else(|| fail("const value must be a [..] list".into()))?;
                let mut coeffs = Vec::new();
                for part in inner.split(',') {
                    let part = part.trim();
                    if part.is_empty() {
                        continue;
                    }
                    coeffs.push(
                        part.parse::<i64>()
                            .map_err(|e| fail(format!("bad integer {part:?}: {e}")))?,
                    );
                }
                self.bind(name.trim(), CircuitOp::Const(coeffs), line)?;
            } else {
                let (name, body) = text
                    .split_once('=')
                    .ok_or_else(|| fail(format!("cannot parse {text:?}")))?;
                let words: Vec<&str> = body.split_whitespace().collect();
                let op = match words.as_slice() {
                    ["add", a, b] => {
                        let ia = self.lookup(a, line)?;
                        let ib = self.lookup(b, line)?;
                        if self.circuit.is_const(ia) && self.circuit.is_const(ib) {
                            return Err(fail("add needs at least one ciphertext".into()));
                        }
                        CircuitOp::Add(ia, ib)
                    }
                    ["mul", a, b] => {
                        let ia = self.ct_operand(a, "mul", line)?;
                        let ib = self.ct_operand(b, "mul", line)?;
                        CircuitOp::Mul(ia, ib)
                    }
                    ["ptmul", a, c] => {
                        let ia = self.ct_operand(a, "ptmul", line)?;
                        let ic = self.lookup(c, line)?;
                        if !self.circuit.is_const(ic) {
                            return Err(fail(format!("ptmul needs a constant, got {c:?}")));
                        }
                        CircuitOp::PtMul(ia, ic)
                    }
                    ["rotate", a, k] => {
                        let ia = self.ct_operand(a, "rotate", line)?;
                        let k: usize = k
                            .parse()
                            .map_err(|e| fail(format!("bad exponent {k:?}: {e}")))?;
                        if k % 2 == 0 {
                            return Err(fail(format!("rotation exponent {k} must be odd")));
                        }
                        CircuitOp::Rotate(ia, k)
                    }
                    _ => return Err(fail(format!("cannot parse {body:?}"))),
                };
                self.bind(name.trim(), op, line)?;
            }
        }
        if self.circuit.outputs.is_empty() {
            return Err(CompileError::Parse {
                line: self.src.lines().count(),
                msg: "circuit has no outputs".into(),
            });
        }
        Ok(self.circuit)
    }
}

pub fn parse_circuit(src: &str) -> Result<Circuit> {
    Parser {
        names: Vec::new(),
        circuit: Circuit::default(),
        src,
    }
    .parse()
}
