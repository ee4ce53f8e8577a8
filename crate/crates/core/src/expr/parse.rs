//! Recursive-descent parser for metric component expressions.
//!
//! Grammar, loosest to tightest binding:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' exponent)?
//! exponent:= ['-'] INT | '(' ['-'] INT ')'
//! atom    := NUMBER | IDENT | FUNC '(' sum ')' | '(' sum ')'
//! ```
//!
//! Numbers (`3`, `0.25`, `1e-3`) are read as exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::ast::{Chart, Expr, Func};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

fn syntax(position: usize, expected: &[&str]) -> Error {
    Error::Syntax {
        position,
        expected: expected.iter().map(|s| s.to_string()).collect(),
    }
}

fn lex(source: &str) -> Result<Lexer> {
    let chars: Vec<char> = source.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            let (value, next) = lex_number(&chars, i)?;
            toks.push((Tok::Num(value), start));
            i = next;
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push((Tok::Ident(chars[start..i].iter().collect()), start));
        } else if "+-*/^()".contains(c) {
            toks.push((Tok::Sym(c), i));
            i += 1;
        } else {
            return Err(syntax(i, &["number", "identifier", "operator"]));
        }
    }
    toks.push((Tok::End, chars.len()));
    Ok(Lexer { toks })
}

fn lex_number(chars: &[char], mut i: usize) -> Result<(BigRational, usize)> {
    let start = i;
    let mut digits = String::new();
    let mut frac_len = 0u32;
    while i < chars.len() && chars[i].is_ascii_digit() {
        digits.push(chars[i]);
        i += 1;
    }
    if i < chars.len() && chars[i] == '.' {
        i += 1;
        while i < chars.len() && chars[i].is_ascii_digit() {
            digits.push(chars[i]);
            frac_len += 1;
            i += 1;
        }
    }
    if digits.is_empty() {
        return Err(syntax(start, &["digit"]));
    }
    let mut exponent: i64 = 0;
    if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
        let mut j = i + 1;
        let mut sign = 1;
        if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
            if chars[j] == '-' {
                sign = -1;
            }
            j += 1;
        }
        let exp_start = j;
        while j < chars.len() && chars[j].is_ascii_digit() {
            j += 1;
        }
        if j == exp_start {
            return Err(syntax(j, &["exponent digits"]));
        }
        let text: String = chars[exp_start..j].iter().collect();
        exponent = sign * text.parse::<i64>().map_err(|_| syntax(exp_start, &["small exponent"]))?;
        i = j;
    }
    let mantissa: BigInt = digits.parse().expect("digit string");
    let ten = BigRational::from_integer(BigInt::from(10));
    let scale = exponent - frac_len as i64;
    let factor = num_traits::pow(ten, scale.unsigned_abs() as usize);
    let m = BigRational::from_integer(mantissa);
    let value = if scale >= 0 { m * factor } else { m / factor };
    Ok((value, i))
}

struct Parser<'c> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    chart: &'c Chart,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(syntax(self.offset(), &[&format!("'{c}'")]))
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        loop {
            if self.eat('+') {
                lhs = Expr::add(lhs, self.product()?);
            } else if self.eat('-') {
                lhs = Expr::sub(lhs, self.product()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::mul(lhs, self.unary()?);
            } else if self.eat('/') {
                lhs = Expr::div(lhs, self.unary()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            Ok(Expr::neg(self.unary()?))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let k = if self.eat('(') {
            let k = self.integer_exponent()?;
            self.expect(')')?;
            k
        } else {
            self.integer_exponent()?
        };
        if *self.peek() == Tok::Sym('^') {
            return Err(syntax(self.offset(), &["operator other than '^' (parenthesize nested powers)"]));
        }
        Ok(Expr::pow(base, k))
    }

    fn integer_exponent(&mut self) -> Result<i32> {
        let position = self.offset();
        let negative = self.eat('-');
        match self.bump() {
            Tok::Num(n) if n.is_integer() => {
                let k = n
                    .to_integer()
                    .to_i32()
                    .ok_or_else(|| syntax(position, &["exponent within i32 range"]))?;
                Ok(if negative { -k } else { k })
            }
            _ => Err(syntax(position, &["integer exponent"])),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let position = self.offset();
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(Expr::constant(n))
            }
            Tok::Ident(name) => {
                self.bump();
                if let Some(f) = Func::from_name(&name) {
                    if !self.eat('(') {
                        return Err(syntax(self.offset(), &["'('"]));
                    }
                    let arg = self.sum()?;
                    self.expect(')')?;
                    return Ok(Expr::call(f, arg));
                }
                match self.chart.index_of(&name) {
                    Some(i) => Ok(Expr::var(i)),
                    None => Err(Error::UnknownVariable { name, position }),
                }
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            _ => Err(syntax(position, &["number", "variable", "function", "'('", "'-'"])),
        }
    }
}

/// Parses `source` against the coordinate names of `chart`.
pub fn parse(source: &str, chart: &Chart) -> Result<Expr> {
    let lexer = lex(source)?;
    let mut p = Parser {
        toks: lexer.toks,
        pos: 0,
        chart,
    };
    let e = p.sum()?;
    if *p.peek() != Tok::End {
        return Err(syntax(p.offset(), &["operator", "end of input"]));
    }
    Ok(e)
}
