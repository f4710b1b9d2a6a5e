//! Lexer and recursive-descent parser for the expression language.
//!
//! Precedence, loosest first: `+ -`, `*`, unary `-`, `⊗`, `^` (graded product), `^int` (power).

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::scalars::Q;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

pub fn err(span: Span, msg: impl Into<String>) -> Error {
    Error::Parse { line: span.line, col: span.col, msg: msg.into() }
}

#[derive(Clone, PartialEq, Debug)]
pub enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    Tensor,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    span: Span,
}

fn lex(src: &str, line0: usize) -> Result<Vec<Token>> {
    let mut out = vec![];
    let (mut line, mut col) = (line0, 1usize);
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, col };
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token { tok: Tok::Int(s.parse().expect("digits")), span });
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token { tok: Tok::Ident(s), span });
            continue;
        }
        if c == '⊗' {
            out.push(Token { tok: Tok::Tensor, span });
            i += 1;
            col += 1;
            continue;
        }
        if "+-*/^()[],=&".contains(c) {
            let tok = if c == '&' { Tok::Tensor } else { Tok::Sym(c) };
            out.push(Token { tok, span });
            i += 1;
            col += 1;
            continue;
        }
        return Err(err(span, format!("unexpected character '{c}'")));
    }
    out.push(Token { tok: Tok::End, span: Span { line, col } });
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GenKind {
    X,
    Theta,
    Dx,
    Param,
    Eps,
    T,
    Dt,
}

#[derive(Clone, PartialEq, Debug)]
pub enum Ast {
    Num(Q, Span),
    Gen(GenKind, usize, Span),
    Var(String, Span),
    Neg(Box<Ast>, Span),
    Add(Box<Ast>, Box<Ast>, Span),
    Sub(Box<Ast>, Box<Ast>, Span),
    Mul(Box<Ast>, Box<Ast>, Span),
    Tensor(Box<Ast>, Box<Ast>, Span),
    Pow(Box<Ast>, i32, Span),
    /// s(...) or s^-1(...).
    Susp(Box<Ast>, Span),
    /// D[..]⊗...⊗D[..] written as a single Dop literal, or one D[..] factor; slots are 0-based.
    Slots(Vec<Vec<usize>>, Span),
    Call(String, Option<usize>, Vec<Ast>, Span),
}

impl Ast {
    pub fn span(&self) -> Span {
        match self {
            Ast::Num(_, s)
            | Ast::Gen(_, _, s)
            | Ast::Var(_, s)
            | Ast::Neg(_, s)
            | Ast::Add(_, _, s)
            | Ast::Sub(_, _, s)
            | Ast::Mul(_, _, s)
            | Ast::Tensor(_, _, s)
            | Ast::Pow(_, _, s)
            | Ast::Susp(_, s)
            | Ast::Slots(_, s)
            | Ast::Call(_, _, _, s) => *s,
        }
    }
}

/// Heads taking arguments, with their arity.
pub const HEADS: &[(&str, usize)] = &[
    ("d", 1),
    ("sbr", 2),
    ("gbr", 2),
    ("hoch", 1),
    ("cup", 2),
    ("hkr", 1),
    ("hkrp", 1),
    ("jw", 1),
    ("jwinv", 1),
    ("obr", 2),
    ("pi", 2),
    ("moyal", 0),
];

/// Bounds used to validate generator indices while parsing.
#[derive(Clone, Copy, Debug)]
pub struct Bounds {
    pub m: usize,
    pub g: usize,
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    bounds: Bounds,
    vars: &'a dyn Fn(&str) -> bool,
}

fn split_index(name: &str, prefix: &str) -> Option<usize> {
    let rest = name.strip_prefix(prefix)?;
    let rest = rest.strip_prefix('_').unwrap_or(rest);
    if rest.is_empty() || !rest.chars().all(|c| c.is_ascii_digit()) || rest.starts_with('0') {
        return None;
    }
    rest.parse().ok()
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }
    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }
    fn span(&self) -> Span {
        self.toks[self.pos].span
    }
    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }
    fn expect(&mut self, c: char) -> Result<()> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(err(self.span(), format!("expected '{c}', found {}", describe(self.peek()))))
        }
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut a = self.term()?;
        loop {
            let sp = self.span();
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    a = Ast::Add(Box::new(a), Box::new(self.term()?), sp);
                }
                Tok::Sym('-') => {
                    self.bump();
                    a = Ast::Sub(Box::new(a), Box::new(self.term()?), sp);
                }
                _ => return Ok(a),
            }
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let mut a = self.unary()?;
        while *self.peek() == Tok::Sym('*') {
            let sp = self.span();
            self.bump();
            a = Ast::Mul(Box::new(a), Box::new(self.unary()?), sp);
        }
        Ok(a)
    }

    fn unary(&mut self) -> Result<Ast> {
        if *self.peek() == Tok::Sym('-') {
            let sp = self.span();
            self.bump();
            return Ok(Ast::Neg(Box::new(self.unary()?), sp));
        }
        self.tensor()
    }

    fn tensor(&mut self) -> Result<Ast> {
        let mut a = self.wedge()?;
        while *self.peek() == Tok::Tensor {
            let sp = self.span();
            self.bump();
            a = Ast::Tensor(Box::new(a), Box::new(self.wedge()?), sp);
        }
        Ok(a)
    }

    fn power_follows(&self) -> bool {
        *self.peek() == Tok::Sym('^')
            && (matches!(self.peek_at(1), Tok::Int(_))
                || (*self.peek_at(1) == Tok::Sym('-') && matches!(self.peek_at(2), Tok::Int(_))))
    }

    fn wedge(&mut self) -> Result<Ast> {
        let mut a = self.power()?;
        while *self.peek() == Tok::Sym('^') {
            let sp = self.span();
            self.bump();
            a = Ast::Mul(Box::new(a), Box::new(self.power()?), sp);
        }
        Ok(a)
    }

    fn power(&mut self) -> Result<Ast> {
        let mut a = self.atom()?;
        while self.power_follows() {
            let sp = self.span();
            self.bump();
            let neg = *self.peek() == Tok::Sym('-');
            if neg {
                self.bump();
            }
            let t = self.bump();
            let Tok::Int(n) = t.tok else { unreachable!() };
            let k: i32 = n.try_into().map_err(|_| err(t.span, "exponent too large"))?;
            a = Ast::Pow(Box::new(a), if neg { -k } else { k }, sp);
        }
        Ok(a)
    }

    fn int_list(&mut self, close: char) -> Result<Vec<usize>> {
        let mut v = vec![];
        if *self.peek() == Tok::Sym(close) {
            self.bump();
            return Ok(v);
        }
        loop {
            let t = self.bump();
            match t.tok {
                Tok::Int(n) => {
                    let i: usize = (&n).try_into().unwrap_or(0);
                    if i == 0 || i > self.bounds.m {
                        return Err(err(t.span, format!("derivative index {n} outside 1..{}", self.bounds.m)));
                    }
                    v.push(i - 1);
                }
                other => return Err(err(t.span, format!("expected an index, found {}", describe(&other)))),
            }
            match self.bump() {
                Token { tok: Tok::Sym(','), .. } => continue,
                Token { tok: Tok::Sym(c), .. } if c == close => return Ok(v),
                t => return Err(err(t.span, format!("expected ',' or '{close}', found {}", describe(&t.tok)))),
            }
        }
    }

    fn args(&mut self) -> Result<Vec<Ast>> {
        self.expect('(')?;
        let mut v = vec![];
        if *self.peek() == Tok::Sym(')') {
            self.bump();
            return Ok(v);
        }
        loop {
            v.push(self.expr()?);
            match self.peek() {
                Tok::Sym(',') => {
                    self.bump();
                }
                Tok::Sym(')') => {
                    self.bump();
                    return Ok(v);
                }
                t => return Err(err(self.span(), format!("expected ',' or ')', found {}", describe(t)))),
            }
        }
    }

    fn atom(&mut self) -> Result<Ast> {
        let t = self.bump();
        let sp = t.span;
        match t.tok {
            Tok::Int(n) => {
                if *self.peek() == Tok::Sym('/') {
                    self.bump();
                    let d = self.bump();
                    let Tok::Int(dn) = d.tok else {
                        return Err(err(d.span, "expected a denominator"));
                    };
                    if dn == BigInt::from(0) {
                        return Err(err(d.span, "zero denominator"));
                    }
                    return Ok(Ast::Num(Q::new(n, dn), sp));
                }
                Ok(Ast::Num(Q::from_integer(n), sp))
            }
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => self.ident(name, sp),
            other => Err(err(sp, format!("unexpected {}", describe(&other)))),
        }
    }

    fn ident(&mut self, name: String, sp: Span) -> Result<Ast> {
        if name == "s" {
            if *self.peek() == Tok::Sym('^') {
                let ok = *self.peek_at(1) == Tok::Sym('-') && *self.peek_at(2) == Tok::Int(1.into());
                if !ok {
                    return Err(err(self.span(), "expected s^-1(...)"));
                }
                self.bump();
                self.bump();
                self.bump();
            }
            let a = self.args()?;
            if a.len() != 1 {
                return Err(err(sp, format!("s takes 1 argument, got {}", a.len())));
            }
            return Ok(Ast::Susp(Box::new(a.into_iter().next().unwrap()), sp));
        }
        if name == "D" {
            if *self.peek() == Tok::Sym('(') {
                self.bump();
                self.expect(')')?;
                return Ok(Ast::Slots(vec![], sp));
            }
            self.expect('[')?;
            return Ok(Ast::Slots(vec![self.int_list(']')?], sp));
        }
        if name == "Dop" {
            self.expect('[')?;
            let mut slots = vec![];
            if *self.peek() == Tok::Sym(']') {
                self.bump();
                return Ok(Ast::Slots(slots, sp));
            }
            loop {
                self.expect('[')?;
                slots.push(self.int_list(']')?);
                match self.bump() {
                    Token { tok: Tok::Sym(','), .. } => continue,
                    Token { tok: Tok::Sym(']'), .. } => return Ok(Ast::Slots(slots, sp)),
                    t => return Err(err(t.span, format!("expected ',' or ']', found {}", describe(&t.tok)))),
                }
            }
        }
        if let Some(&(head, arity)) = HEADS.iter().find(|(h, _)| *h == name) {
            if *self.peek() == Tok::Sym('(') {
                let a = self.args()?;
                if a.len() != arity {
                    return Err(err(sp, format!("{head} takes {arity} argument(s), got {}", a.len())));
                }
                return Ok(Ast::Call(head.into(), None, a, sp));
            }
        }
        if let Some(i) = split_index(&name, "ddx") {
            self.check_index(i, self.bounds.m, sp, "ddx")?;
            let a = self.args()?;
            if a.len() != 1 {
                return Err(err(sp, format!("ddx{i} takes 1 argument, got {}", a.len())));
            }
            return Ok(Ast::Call("ddx".into(), Some(i - 1), a, sp));
        }
        match name.as_str() {
            "eps" => return Ok(Ast::Gen(GenKind::Eps, 0, sp)),
            "t" => return Ok(Ast::Gen(GenKind::T, 0, sp)),
            "dt" => return Ok(Ast::Gen(GenKind::Dt, 0, sp)),
            _ => {}
        }
        for (prefix, kind, bound) in [
            ("x", GenKind::X, self.bounds.m),
            ("th", GenKind::Theta, self.bounds.m),
            ("dx", GenKind::Dx, self.bounds.m),
            ("e", GenKind::Param, self.bounds.g),
        ] {
            if let Some(i) = split_index(&name, prefix) {
                self.check_index(i, bound, sp, prefix)?;
                return Ok(Ast::Gen(kind, i - 1, sp));
            }
        }
        if (self.vars)(&name) {
            return Ok(Ast::Var(name, sp));
        }
        Err(err(sp, format!("unknown generator or name '{name}'")))
    }

    fn check_index(&self, i: usize, bound: usize, sp: Span, prefix: &str) -> Result<()> {
        if i > bound {
            return Err(err(sp, format!("unknown generator {prefix}{i}: index outside 1..{bound}")));
        }
        Ok(())
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("number {n}"),
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Sym(c) => format!("'{c}'"),
        Tok::Tensor => "'⊗'".into(),
        Tok::End => "end of input".into(),
    }
}

/// Parse one expression; `line0` numbers the first line, `vars` recognizes bound names.
pub fn parse_with(src: &str, line0: usize, bounds: Bounds, vars: &dyn Fn(&str) -> bool) -> Result<Ast> {
    let toks = lex(src, line0)?;
    let mut p = Parser { toks, pos: 0, bounds, vars };
    if *p.peek() == Tok::End {
        return Err(err(p.span(), "empty expression"));
    }
    let a = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(err(p.span(), format!("unexpected {}", describe(p.peek()))));
    }
    Ok(a)
}

pub fn parse(src: &str, bounds: Bounds) -> Result<Ast> {
    parse_with(src, 1, bounds, &|_| false)
}
