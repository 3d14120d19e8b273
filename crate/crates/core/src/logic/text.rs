//! Text syntax for formulas.
//!
//! ```text
//! or    := and ('\/' and)*
//! and   := unary ('/\' unary)*
//! unary := '~' unary | post
//! post  := atom ('(+)' number | '(-)' number)*
//! atom  := number | NAME '(' [or (',' or)*] ')' | 'Delta' JSON '(' … ')' | '(' or ')'
//! ```
//!
//! Numbers are `p/q`, integers or finite decimals. Modality names start with
//! a letter, `_`, `@`, `<` or `[` and run up to the next `(`. A Moss node is
//! written `Delta {"functor": …, "shape": …}(args)` with the shape's leaves
//! given as argument indices.

use std::sync::Arc;

use serde_json::Value;

use super::formula::{moss_header, moss_header_from_json, Formula};
use crate::error::{Error, Result};
use crate::fuzzy::Scalar;

const MOSS_KEYWORD: &str = "Delta";

pub fn parse(text: &str) -> Result<Arc<Formula>> {
    let mut p = Parser { text, pos: 0 };
    let f = p.or()?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{token}`")))
        }
    }

    fn or(&mut self) -> Result<Arc<Formula>> {
        let mut left = self.and()?;
        while self.eat("\\/") {
            let right = self.and()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Arc<Formula>> {
        let mut left = self.unary()?;
        while self.eat("/\\") {
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Arc<Formula>> {
        if self.eat("~") {
            return Ok(Formula::neg(self.unary()?));
        }
        self.post()
    }

    fn post(&mut self) -> Result<Arc<Formula>> {
        let mut f = self.atom()?;
        loop {
            if self.eat("(+)") {
                f = Formula::plus(f, self.number()?);
            } else if self.eat("(-)") {
                f = Formula::minus(f, self.number()?);
            } else {
                return Ok(f);
            }
        }
    }

    fn number(&mut self) -> Result<Scalar> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.text.as_bytes();
        let digits = |mut i: usize| {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            i
        };
        let mut end = digits(start);
        if end == start {
            return Err(self.error("expected a number"));
        }
        if end + 1 < bytes.len() && bytes[end] == b'.' && bytes[end + 1].is_ascii_digit() {
            end = digits(end + 1);
        }
        if end + 1 < bytes.len() && bytes[end] == b'/' && bytes[end + 1].is_ascii_digit() {
            end = digits(end + 1);
        }
        let c = Scalar::parse(&self.text[start..end]).map_err(|e| self.error(e.to_string()))?;
        self.pos = end;
        Ok(c)
    }

    fn atom(&mut self) -> Result<Arc<Formula>> {
        self.skip_ws();
        let Some(c) = self.rest().chars().next() else {
            return Err(self.error("unexpected end of input"));
        };
        if c.is_ascii_digit() {
            return Ok(Formula::constant(self.number()?));
        }
        if c == '(' {
            self.pos += 1;
            let f = self.or()?;
            self.expect(")")?;
            return Ok(f);
        }
        if !(c.is_alphabetic() || matches!(c, '_' | '@' | '<' | '[')) {
            return Err(self.error(format!("unexpected `{c}`")));
        }
        let start = self.pos;
        let len = self
            .rest()
            .find(|c: char| c.is_whitespace() || matches!(c, '(' | ')' | ','))
            .unwrap_or(self.rest().len());
        let name = &self.text[start..start + len];
        self.pos += len;
        if name == MOSS_KEYWORD {
            return self.moss();
        }
        let args = self.args()?;
        Ok(Formula::modal(name, args))
    }

    fn args(&mut self) -> Result<Vec<Arc<Formula>>> {
        self.expect("(")?;
        let mut args = Vec::new();
        if self.eat(")") {
            return Ok(args);
        }
        loop {
            args.push(self.or()?);
            if self.eat(")") {
                return Ok(args);
            }
            self.expect(",")?;
        }
    }

    fn moss(&mut self) -> Result<Arc<Formula>> {
        self.skip_ws();
        let at = self.pos;
        let mut stream = serde_json::Deserializer::from_str(self.rest()).into_iter::<Value>();
        let header = match stream.next() {
            Some(Ok(v)) => v,
            Some(Err(e)) => return Err(self.error(format!("bad Moss header: {e}"))),
            None => return Err(self.error("expected a Moss header")),
        };
        self.pos += stream.byte_offset();
        let (functor, shape) = moss_header_from_json(&header, "$").map_err(|e| Error::Syntax {
            offset: at,
            message: e.to_string(),
        })?;
        let args = self.args()?;
        Formula::moss(functor, shape, args).map_err(|e| Error::Syntax {
            offset: at,
            message: e.to_string(),
        })
    }
}

const OR: u8 = 1;
const AND: u8 = 2;
const UNARY: u8 = 3;
const POST: u8 = 4;
const ATOM: u8 = 5;

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        Formula::Neg(_) => UNARY,
        Formula::PlusC(..) | Formula::MinusC(..) => POST,
        _ => ATOM,
    }
}

/// Prints with the fewest parentheses that [`parse`] reads back to the same
/// tree. Constants come out in `p/q` form.
pub fn print(f: &Formula) -> String {
    let mut out = String::new();
    write(f, 0, &mut out);
    out
}

fn write(f: &Formula, min: u8, out: &mut String) {
    let wrap = precedence(f) < min;
    if wrap {
        out.push('(');
    }
    match f {
        Formula::Const(c) => out.push_str(&c.to_string()),
        Formula::Or(l, r) => {
            write(l, OR, out);
            out.push_str(" \\/ ");
            write(r, AND, out);
        }
        Formula::And(l, r) => {
            write(l, AND, out);
            out.push_str(" /\\ ");
            write(r, UNARY, out);
        }
        Formula::Neg(g) => {
            out.push('~');
            write(g, UNARY, out);
        }
        Formula::PlusC(g, c) | Formula::MinusC(g, c) => {
            write(g, POST, out);
            out.push_str(if matches!(f, Formula::PlusC(..)) {
                " (+) "
            } else {
                " (-) "
            });
            out.push_str(&c.to_string());
        }
        Formula::Modal { name, args } => {
            out.push_str(name);
            write_args(args, out);
        }
        Formula::MossDelta {
            functor,
            shape,
            args,
        } => {
            out.push_str(MOSS_KEYWORD);
            out.push(' ');
            out.push_str(&moss_header(functor, shape).to_string());
            write_args(args, out);
        }
    }
    if wrap {
        out.push(')');
    }
}

fn write_args(args: &[Arc<Formula>], out: &mut String) {
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write(a, 0, out);
    }
    out.push(')');
}
