//! The expression language: parsing and printing of operator expressions and
//! small programs of bindings and directives.
//!
//! ```text
//! expr   := term ("+" term)*
//! term   := factor ("*" factor)*
//! factor := number "*" factor | "I" | "mult(" sharp ")" | "fmult(" fn ")"
//!         | "adj(" expr ")" | "(" expr ")" | ident
//! number := real | "(" real "," real ")"
//! sharp  := sterm ("+" sterm)*          sterm := fn ("." fn)*
//! fn     := name [ "(" arg ("," arg)* ")" ]   arg := real | fn
//! ```

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::SymbolError;
use crate::funcat::{catalog, CatalogItem, ExtendedFunction, PeriodicFunction, SharpElement};
use crate::opalg::{builtins, OpExpr};

fn fmt_real(x: f64) -> String {
    format!("{x:?}")
}

fn fmt_scalar(z: C64) -> String {
    if z.im == 0.0 {
        fmt_real(z.re)
    } else {
        format!("({},{})", fmt_real(z.re), fmt_real(z.im))
    }
}

impl fmt::Display for OpExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpExpr::Identity => write!(f, "I"),
            OpExpr::Scalar(z, c) => match **c {
                OpExpr::Identity | OpExpr::Mult(_) | OpExpr::FMult(_) | OpExpr::Adjoint(_) => {
                    write!(f, "{} * {}", fmt_scalar(*z), c)
                }
                _ => write!(f, "{} * ({})", fmt_scalar(*z), c),
            },
            OpExpr::Mult(s) => write!(f, "mult({s})"),
            OpExpr::FMult(b) => write!(f, "fmult({b})"),
            OpExpr::Adjoint(c) => write!(f, "adj({c})"),
            OpExpr::Sum(cs) => {
                let parts: Vec<String> = cs
                    .iter()
                    .map(|c| if matches!(c, OpExpr::Sum(_)) { format!("({c})") } else { c.to_string() })
                    .collect();
                write!(f, "{}", parts.join(" + "))
            }
            OpExpr::Prod(cs) => {
                let parts: Vec<String> = cs
                    .iter()
                    .map(|c| match c {
                        OpExpr::Sum(_) | OpExpr::Prod(_) | OpExpr::Scalar(..) => format!("({c})"),
                        _ => c.to_string(),
                    })
                    .collect();
                write!(f, "{}", parts.join(" * "))
            }
        }
    }
}

/// A directive: a command name with raw arguments.
#[derive(Clone, Debug, PartialEq)]
pub struct Directive {
    pub command: String,
    pub args: Vec<String>,
}

/// Bindings and directives read from a program text.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct DslProgram {
    pub bindings: BTreeMap<String, OpExpr>,
    pub directives: Vec<Directive>,
}

impl fmt::Display for DslProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, e) in &self.bindings {
            writeln!(f, "{name} = {e}")?;
        }
        for d in &self.directives {
            if d.args.is_empty() {
                writeln!(f, "{}", d.command)?;
            } else {
                writeln!(f, "{} {}", d.command, d.args.join(" "))?;
            }
        }
        Ok(())
    }
}

/// Parses a program: `name = expr` bindings, `command args...` directives,
/// `#` comments. Bindings are visible to later lines.
pub fn parse(text: &str) -> Result<DslProgram, SymbolError> {
    let mut prog = DslProgram::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some((lhs, rhs)) = line.split_once('=') {
            let name = lhs.trim();
            if is_ident(name) {
                let col = raw.find('=').unwrap_or(0) + 2;
                let e = Parser::new(rhs, lineno + 1, col, &prog.bindings).parse_all()?;
                prog.bindings.insert(name.to_string(), e);
                continue;
            }
        }
        let mut words = line.split_whitespace();
        let command = words.next().unwrap_or_default().to_string();
        prog.directives.push(Directive { command, args: words.map(str::to_string).collect() });
    }
    Ok(prog)
}

/// Parses a single expression.
pub fn parse_expr(text: &str) -> Result<OpExpr, SymbolError> {
    parse_expr_with(text, &BTreeMap::new())
}

/// Parses a single expression with named bindings in scope.
pub fn parse_expr_with(text: &str, bindings: &BTreeMap<String, OpExpr>) -> Result<OpExpr, SymbolError> {
    Parser::new(text, 1, 1, bindings).parse_all()
}

/// Parses a function term such as `smoothstep(0,1)` or `exp2pi(b)`.
pub fn parse_function(text: &str) -> Result<CatalogItem, SymbolError> {
    let empty = BTreeMap::new();
    let mut p = Parser::new(text, 1, 1, &empty);
    let item = p.function()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.err("trailing input"));
    }
    Ok(item)
}

fn is_ident(s: &str) -> bool {
    let mut it = s.chars();
    matches!(it.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && it.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col0: usize,
    bindings: &'a BTreeMap<String, OpExpr>,
}

enum Arg {
    Num(f64),
    Item(CatalogItem),
}

impl<'a> Parser<'a> {
    fn new(text: &str, line: usize, col0: usize, bindings: &'a BTreeMap<String, OpExpr>) -> Self {
        Parser { chars: text.chars().collect(), pos: 0, line, col0, bindings }
    }

    fn err(&self, msg: impl Into<String>) -> SymbolError {
        SymbolError::Syntax { line: self.line, col: self.col0 + self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), SymbolError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn parse_all(mut self) -> Result<OpExpr, SymbolError> {
        let e = self.expr()?;
        self.skip_ws();
        if self.pos < self.chars.len() {
            return Err(self.err(format!("unexpected `{}`", self.chars[self.pos])));
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<OpExpr, SymbolError> {
        let mut terms = vec![self.term()?];
        while self.eat('+') {
            terms.push(self.term()?);
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { OpExpr::Sum(terms) })
    }

    fn term(&mut self) -> Result<OpExpr, SymbolError> {
        let mut factors = vec![self.factor()?];
        while self.eat('*') {
            factors.push(self.factor()?);
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { OpExpr::Prod(factors) })
    }

    fn starts_number(&mut self) -> bool {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '-' || c == '.' => true,
            Some('(') => {
                let save = self.pos;
                self.pos += 1;
                let ok = self.number_literal().is_ok() && self.peek() == Some(',');
                self.pos = save;
                ok
            }
            _ => false,
        }
    }

    fn number_literal(&mut self) -> Result<f64, SymbolError> {
        self.skip_ws();
        let start = self.pos;
        let mut end = self.pos;
        while end < self.chars.len() {
            let c = self.chars[end];
            let sign_ok = (c == '-' || c == '+') && (end == start || matches!(self.chars[end - 1], 'e' | 'E'));
            if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || sign_ok {
                end += 1;
            } else {
                break;
            }
        }
        let s: String = self.chars[start..end].iter().collect();
        match s.parse::<f64>() {
            Ok(v) => {
                self.pos = end;
                Ok(v)
            }
            Err(_) => Err(self.err(format!("bad number `{s}`"))),
        }
    }

    fn scalar_literal(&mut self) -> Result<C64, SymbolError> {
        if self.eat('(') {
            let re = self.number_literal()?;
            self.expect(',')?;
            let im = self.number_literal()?;
            self.expect(')')?;
            Ok(C64::new(re, im))
        } else {
            Ok(C64::new(self.number_literal()?, 0.0))
        }
    }

    fn ident(&mut self) -> Result<String, SymbolError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && (self.chars[self.pos].is_ascii_alphanumeric() || self.chars[self.pos] == '_') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a name"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn factor(&mut self) -> Result<OpExpr, SymbolError> {
        if self.starts_number() {
            let z = self.scalar_literal()?;
            self.expect('*')?;
            let inner = self.factor()?;
            return Ok(OpExpr::Scalar(z, Box::new(inner)));
        }
        if self.eat('(') {
            let e = self.expr()?;
            self.expect(')')?;
            return Ok(e);
        }
        let name = self.ident()?;
        match name.as_str() {
            "I" => Ok(OpExpr::Identity),
            "mult" => {
                self.expect('(')?;
                let s = self.sharp()?;
                self.expect(')')?;
                Ok(OpExpr::Mult(s))
            }
            "fmult" => {
                self.expect('(')?;
                let f = match self.function()? {
                    CatalogItem::Extended(f) => f,
                    _ => return Err(self.err("fmult needs a function with limits at both infinities")),
                };
                self.expect(')')?;
                Ok(OpExpr::FMult(f))
            }
            "adj" => {
                self.expect('(')?;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(OpExpr::Adjoint(Box::new(e)))
            }
            other => {
                if let Some(e) = self.bindings.get(other) {
                    Ok(e.clone())
                } else if let Some(e) = builtins::lookup(other) {
                    Ok(e)
                } else {
                    Err(SymbolError::UnknownName(other.to_string()))
                }
            }
        }
    }

    fn sharp(&mut self) -> Result<SharpElement, SymbolError> {
        let mut terms = self.sterm()?.terms;
        while self.eat('+') {
            terms.extend(self.sterm()?.terms);
        }
        Ok(SharpElement::new(terms))
    }

    fn sterm(&mut self) -> Result<SharpElement, SymbolError> {
        let mut items = vec![self.function()?];
        while self.eat('.') {
            items.push(self.function()?);
        }
        if let [CatalogItem::Extended(a), CatalogItem::Periodic(p)] = items.as_slice() {
            return Ok(SharpElement::new(vec![(a.clone(), p.clone())]));
        }
        let mut acc: Option<SharpElement> = None;
        for item in items {
            let s = match item {
                CatalogItem::Extended(a) => SharpElement::from_extended(a),
                CatalogItem::Periodic(p) => SharpElement::from_periodic(p),
                CatalogItem::Sharp(s) => s,
            };
            acc = Some(match acc {
                None => s,
                Some(prev) => prev.mul(&s),
            });
        }
        Ok(acc.unwrap())
    }

    fn args(&mut self) -> Result<Vec<Arg>, SymbolError> {
        let mut out = Vec::new();
        if !self.eat('(') {
            return Ok(out);
        }
        loop {
            let is_num = matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '-' || c == '.' || c == '+');
            if is_num {
                out.push(Arg::Num(self.number_literal()?));
            } else {
                out.push(Arg::Item(self.function()?));
            }
            if self.eat(')') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    fn function(&mut self) -> Result<CatalogItem, SymbolError> {
        let name = self.ident()?;
        let args = self.args()?;
        let ext = |a: &Arg| match a {
            Arg::Item(CatalogItem::Extended(f)) => Some(f.clone()),
            _ => None,
        };
        let num = |a: &Arg| match a {
            Arg::Num(v) => Some(*v),
            _ => None,
        };
        let bad = || SymbolError::BadParameters(format!("bad arguments for `{name}`"));
        let compound = match (name.as_str(), args.as_slice()) {
            ("exp2pi", [f]) => Some(ExtendedFunction::exp2pi(ext(f).ok_or_else(bad)?)),
            ("exp", [re, im, f]) => Some(ExtendedFunction::Exp {
                coef: C64::new(num(re).ok_or_else(bad)?, num(im).ok_or_else(bad)?),
                arg: Box::new(ext(f).ok_or_else(bad)?),
            }),
            ("sum", [f, g]) => Some(ext(f).ok_or_else(bad)?.add(ext(g).ok_or_else(bad)?)),
            ("prod", [f, g]) => Some(ext(f).ok_or_else(bad)?.mul(ext(g).ok_or_else(bad)?)),
            ("scale", [re, im, f]) => Some(ExtendedFunction::Scale(
                C64::new(num(re).ok_or_else(bad)?, num(im).ok_or_else(bad)?),
                Box::new(ext(f).ok_or_else(bad)?),
            )),
            ("conj", [f]) => Some(ExtendedFunction::Conj(Box::new(ext(f).ok_or_else(bad)?))),
            ("shift", [f, k]) => Some(ExtendedFunction::Shift(Box::new(ext(f).ok_or_else(bad)?), num(k).ok_or_else(bad)?)),
            ("exp2pi" | "exp" | "sum" | "prod" | "scale" | "conj" | "shift", _) => return Err(bad()),
            _ => None,
        };
        if let Some(f) = compound {
            return Ok(CatalogItem::Extended(f));
        }
        let mut nums = Vec::with_capacity(args.len());
        for a in &args {
            nums.push(num(a).ok_or_else(bad)?);
        }
        if name == "trig" {
            if nums.len() % 3 != 0 {
                return Err(bad());
            }
            let mut coeffs = Vec::new();
            for chunk in nums.chunks(3) {
                if chunk[0].fract() != 0.0 {
                    return Err(bad());
                }
                coeffs.push((chunk[0] as i64, C64::new(chunk[1], chunk[2])));
            }
            return Ok(CatalogItem::Periodic(PeriodicFunction::from_coeffs(coeffs)));
        }
        catalog(&name, &nums)
    }
}

/// `2 pi i`, the coefficient used by `t` and `exp2pi`.
pub fn two_pi_i() -> C64 {
    C64::new(0.0, 2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::normalize;

    #[test]
    fn parse_builtins() {
        let a1 = parse_expr("A1").unwrap();
        let expected = OpExpr::Sum(vec![
            OpExpr::Prod(vec![OpExpr::Mult(SharpElement::l()), OpExpr::FMult(ExtendedFunction::b())]),
            OpExpr::FMult(ExtendedFunction::c()),
        ]);
        assert_eq!(a1, expected);
        assert_eq!(parse_expr("I").unwrap(), OpExpr::Identity);
        assert_eq!(
            parse_expr("mult(c) * fmult(b)").unwrap(),
            OpExpr::Prod(vec![OpExpr::mult_ext(ExtendedFunction::c()), OpExpr::FMult(ExtendedFunction::b())])
        );
    }

    #[test]
    fn roundtrip_builtins() {
        for name in builtins::NAMES {
            let e = normalize(&builtins::lookup(name).unwrap());
            let printed = e.to_string();
            assert_eq!(parse_expr(&printed).unwrap(), e, "{printed}");
        }
    }

    #[test]
    fn scalars_and_sharp_terms() {
        let e = parse_expr("(0.5,-1.0) * mult(b . e_k(2) + c) + -2.0 * adj(B3)").unwrap();
        let n = normalize(&e);
        assert_eq!(parse_expr(&n.to_string()).unwrap(), n);
        let f = parse_expr("fmult(exp2pi(smoothstep(1.0,0.5)))").unwrap();
        assert_eq!(parse_expr(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn syntax_errors_have_location() {
        match parse_expr("A1 + ") {
            Err(SymbolError::Syntax { line: 1, col, .. }) => assert!(col >= 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_expr("mult(zz)"), Err(SymbolError::UnknownName(_))));
        assert!(matches!(parse_expr("fmult(l)"), Err(SymbolError::Syntax { .. })));
    }

    #[test]
    fn program_roundtrip() {
        let text = "x = A1 * A3\ny = 2.0 * fmult(c)\nindex x\ndelta1 y\n";
        let p = parse(text).unwrap();
        assert_eq!(p.bindings.len(), 2);
        assert_eq!(p.directives[0], Directive { command: "index".into(), args: vec!["x".into()] });
        let again = parse(&p.to_string()).unwrap();
        assert_eq!(again, p);
    }
}
