//! The textual expression language used by the CLI and test fixtures.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' int)?
//! base   := int | ident tick* | '(' expr ')' | '-' base
//! ident  := letter/underscore, then letters/digits/underscores
//! tick   := '\''
//! ```
//!
//! `^` binds tighter than `*`/`/`, which bind tighter than `+`/`-`; binary
//! operators are left associative and whitespace is insignificant. Exponents
//! are integer literals (an optional leading `-` is accepted).

use std::fmt::Write as _;
use std::sync::Arc;

use num::BigInt;

use crate::algebra::{Context, Derivation, Rat, RationalFunction, VarKind};
use crate::error::{Error, Result};

/// Abstract syntax tree of the expression language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprAst {
    Int(BigInt),
    /// Identifier with a number of derivative ticks (`y''` has two).
    Var { name: String, ticks: u32 },
    Neg(Box<ExprAst>),
    Bin {
        op: BinOp,
        lhs: Box<ExprAst>,
        rhs: Box<ExprAst>,
    },
    Pow { base: Box<ExprAst>, exp: i32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Parses `text`, reporting syntax errors with a byte offset.
pub fn parse(text: &str) -> Result<ExprAst> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<ExprAst> {
        let mut lhs = self.term()?;
        loop {
            self.skip_ws();
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            self.skip_ws();
            let rhs = self.term()?;
            lhs = ExprAst::Bin {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
    }

    fn term(&mut self) -> Result<ExprAst> {
        let mut lhs = self.factor()?;
        loop {
            self.skip_ws();
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            self.skip_ws();
            let rhs = self.factor()?;
            lhs = ExprAst::Bin {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
    }

    fn factor(&mut self) -> Result<ExprAst> {
        let base = self.base()?;
        self.skip_ws();
        if self.eat(b'^') {
            self.skip_ws();
            let exp = self.int_literal()?;
            return Ok(ExprAst::Pow {
                base: Box::new(base),
                exp,
            });
        }
        Ok(base)
    }

    fn int_literal(&mut self) -> Result<i32> {
        let start = self.pos;
        let neg = self.eat(b'-');
        let digits_start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits_start {
            self.pos = start;
            return Err(self.err("exponent must be an integer literal"));
        }
        let s = std::str::from_utf8(&self.bytes[digits_start..self.pos]).unwrap();
        let v: i32 = s.parse().map_err(|_| self.err("exponent out of range"))?;
        Ok(if neg { -v } else { v })
    }

    fn base(&mut self) -> Result<ExprAst> {
        self.skip_ws();
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.skip_ws();
                Ok(ExprAst::Neg(Box::new(self.base()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.skip_ws();
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(b) if b.is_ascii_digit() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
                Ok(ExprAst::Int(s.parse().unwrap()))
            }
            Some(b) if b.is_ascii_alphabetic() || b == b'_' => {
                let start = self.pos;
                while self
                    .peek()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.bytes[start..self.pos])
                    .unwrap()
                    .to_string();
                let mut ticks = 0;
                while self.eat(b'\'') {
                    ticks += 1;
                }
                Ok(ExprAst::Var { name, ticks })
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Precedence levels used by the printer.
fn prec(e: &ExprAst) -> u8 {
    match e {
        ExprAst::Bin {
            op: BinOp::Add | BinOp::Sub,
            ..
        } => 1,
        ExprAst::Bin {
            op: BinOp::Mul | BinOp::Div,
            ..
        }
        | ExprAst::Neg(_) => 2,
        ExprAst::Pow { .. } => 3,
        ExprAst::Int(_) | ExprAst::Var { .. } => 4,
    }
}

/// Prints with minimal parenthesization; `parse(format(e))` reproduces `e`
/// up to canonical association.
pub fn format(e: &ExprAst) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, 0, false);
    out
}

fn write_expr(out: &mut String, e: &ExprAst, parent_prec: u8, right_operand: bool) {
    let my = prec(e);
    let needs_parens = my < parent_prec || (my == parent_prec && right_operand && my <= 2);
    if needs_parens {
        out.push('(');
    }
    match e {
        ExprAst::Int(n) => {
            let _ = write!(out, "{n}");
        }
        ExprAst::Var { name, ticks } => {
            out.push_str(name);
            for _ in 0..*ticks {
                out.push('\'');
            }
        }
        ExprAst::Neg(inner) => {
            out.push('-');
            // Negation of a sum keeps explicit parentheses.
            write_expr(out, inner, 3, false);
        }
        ExprAst::Bin { op, lhs, rhs } => {
            let (sym, spaced) = match op {
                BinOp::Add => ("+", true),
                BinOp::Sub => ("-", true),
                BinOp::Mul => ("*", false),
                BinOp::Div => ("/", false),
            };
            write_expr(out, lhs, my, false);
            if spaced {
                let _ = write!(out, " {sym} ");
            } else {
                out.push_str(sym);
            }
            write_expr(out, rhs, my, true);
        }
        ExprAst::Pow { base, exp } => {
            write_expr(out, base, 4, false);
            let _ = write!(out, "^{exp}");
        }
    }
    if needs_parens {
        out.push(')');
    }
}

/// Lowers an AST to a rational function. Every identifier must be declared
/// in `ctx`; derivative ticks expand through `d`, so `y'` requires an image
/// for `y` (and fails where the derivation runs out of images).
pub fn lower(e: &ExprAst, ctx: &Arc<Context>, d: &Derivation) -> Result<RationalFunction> {
    match e {
        ExprAst::Int(n) => Ok(RationalFunction::constant(
            ctx,
            Rat::from_integer(n.clone()),
        )),
        ExprAst::Var { name, ticks } => {
            let v = ctx
                .lookup(name)
                .ok_or_else(|| Error::UndeclaredIdentifier(name.clone()))?;
            if *ticks > 0 && ctx.kind(v) != VarKind::Dependent {
                return Err(Error::TickOnNonDependent(name.clone()));
            }
            let mut r = RationalFunction::var(ctx, v);
            for _ in 0..*ticks {
                r = d.apply(&r)?;
            }
            Ok(r)
        }
        ExprAst::Neg(inner) => Ok(-&lower(inner, ctx, d)?),
        ExprAst::Bin { op, lhs, rhs } => {
            let a = lower(lhs, ctx, d)?;
            let b = lower(rhs, ctx, d)?;
            match op {
                BinOp::Add => Ok(&a + &b),
                BinOp::Sub => Ok(&a - &b),
                BinOp::Mul => Ok(&a * &b),
                BinOp::Div => a.div(&b),
            }
        }
        ExprAst::Pow { base, exp } => lower(base, ctx, d)?.pow_i(*exp),
    }
}

/// Parses and lowers in one step.
pub fn parse_expr(text: &str, ctx: &Arc<Context>, d: &Derivation) -> Result<RationalFunction> {
    lower(&parse(text)?, ctx, d)
}
