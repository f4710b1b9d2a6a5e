//! Session configuration and DSL source files.
//!
//! A file holds one declaration per line; `#` starts a comment.
//!
//! ```text
//! m = 3
//! g = 1
//! degrees = -1
//! N = 3
//! eps_floor = 0
//! W = 4
//! fixture = shear4
//! context = pd
//! alpha[1,2] = 1
//! omega[2,1] = 1
//! let mu = e1 * D[1]⊗D[2]⊗D[3]
//! ```
//!
//! Settings lines may appear anywhere; they are applied before any `let` is evaluated.
//! `alpha[i,j]` and `omega[i,j]` also set the antisymmetric partner entry.

use std::collections::BTreeMap;

use super::eval::{Env, Kind, Value};
use super::parse::{err, parse_with, Bounds, Span};
use crate::error::{Error, Result};
use crate::polyvectors::{PolyMatrix, SymplecticPair};
use crate::scalars::{Ctx, Poly, TruncationCtx};

#[derive(Clone, PartialEq, Debug, Default)]
pub struct SessionConfig {
    pub m: Option<usize>,
    pub g: Option<usize>,
    pub degrees: Option<Vec<i32>>,
    pub n: Option<u32>,
    pub eps_floor: Option<i32>,
    pub w: Option<usize>,
    pub seed: Option<u64>,
    pub fixture: Option<String>,
    pub context: Option<String>,
}

impl SessionConfig {
    /// Fields set in `o` win.
    pub fn overlay(&self, o: &SessionConfig) -> SessionConfig {
        SessionConfig {
            m: o.m.or(self.m),
            g: o.g.or(self.g),
            degrees: o.degrees.clone().or_else(|| self.degrees.clone()),
            n: o.n.or(self.n),
            eps_floor: o.eps_floor.or(self.eps_floor),
            w: o.w.or(self.w),
            seed: o.seed.or(self.seed),
            fixture: o.fixture.clone().or_else(|| self.fixture.clone()),
            context: o.context.clone().or_else(|| self.context.clone()),
        }
    }

    pub fn m(&self) -> usize {
        self.m.unwrap_or(2)
    }

    /// Parameter degrees; `g` alone gives degree -1 parameters.
    pub fn degrees(&self) -> Vec<i32> {
        match (&self.degrees, self.g) {
            (Some(d), _) => d.clone(),
            (None, Some(g)) => vec![-1; g],
            (None, None) => vec![],
        }
    }

    pub fn ctx(&self) -> Result<Ctx> {
        let degs = self.degrees();
        if let (Some(g), Some(d)) = (self.g, &self.degrees) {
            if g != d.len() {
                return Err(Error::Context(format!("g = {g} but {} degrees given", d.len())));
            }
        }
        let m = self.m();
        TruncationCtx::new(m, degs, self.n.unwrap_or(3), self.eps_floor.unwrap_or(-(m as i32)), self.w.unwrap_or(4))
    }

    pub fn bounds(&self) -> Bounds {
        Bounds { m: self.m(), g: self.degrees().len() }
    }
}

/// A loaded session: context, optional pair, and the named values in definition order.
#[derive(Clone, Debug)]
pub struct Session {
    pub config: SessionConfig,
    pub env: Env,
    pub order: Vec<String>,
}

const EXAMPLES: &[(&str, &str)] = &[
    ("penkava-schwarz", include_str!("../../data/penkava-schwarz.dsl")),
    ("moyal-r2", include_str!("../../data/moyal-r2.dsl")),
    ("moyal-r4", include_str!("../../data/moyal-r4.dsl")),
    ("standard2", include_str!("../../data/standard2.dsl")),
    ("standard4", include_str!("../../data/standard4.dsl")),
    ("shear4", include_str!("../../data/shear4.dsl")),
];

pub fn example_names() -> Vec<&'static str> {
    EXAMPLES.iter().map(|(n, _)| *n).collect()
}

pub fn example_source(name: &str) -> Result<&'static str> {
    EXAMPLES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .ok_or_else(|| Error::Argument(format!("unknown example '{name}' (known: {})", example_names().join(", "))))
}

pub fn load_example(name: &str, overrides: &SessionConfig) -> Result<Session> {
    Session::load(example_source(name)?, overrides)
}

enum Line<'a> {
    Setting(&'a str, &'a str, Span),
    Entry(&'a str, usize, usize, &'a str, Span),
    Let(&'a str, &'a str, Span),
}

fn strip_comment(l: &str) -> &str {
    l.split('#').next().unwrap_or("")
}

fn split_line(raw: &str, line: usize) -> Result<Option<Line<'_>>> {
    let text = strip_comment(raw);
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Ok(None);
    }
    let col = text.len() - text.trim_start().len() + 1;
    let span = Span { line, col };
    let Some(eq) = trimmed.find('=') else {
        return Err(err(span, "expected a declaration 'name = value'"));
    };
    let (lhs, rhs) = (trimmed[..eq].trim(), &trimmed[eq + 1..]);
    let rhs_col = col + eq + 1;
    let rspan = Span { line, col: rhs_col };
    if let Some(name) = lhs.strip_prefix("let ") {
        let name = name.trim();
        let ok = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ok {
            return Err(err(span, format!("bad name '{name}'")));
        }
        return Ok(Some(Line::Let(name, rhs, rspan)));
    }
    for key in ["alpha", "omega"] {
        if let Some(rest) = lhs.strip_prefix(key) {
            let inner = rest.trim().strip_prefix('[').and_then(|r| r.strip_suffix(']'));
            let ix: Vec<Option<usize>> =
                inner.map(|s| s.split(',').map(|p| p.trim().parse().ok()).collect()).unwrap_or_default();
            return match ix.as_slice() {
                [Some(i), Some(j)] if *i >= 1 && *j >= 1 => Ok(Some(Line::Entry(key, i - 1, j - 1, rhs, rspan))),
                _ => Err(err(span, format!("expected {key}[i,j]"))),
            };
        }
    }
    Ok(Some(Line::Setting(lhs, rhs.trim(), rspan)))
}

fn parse_num<T: std::str::FromStr>(v: &str, sp: Span, what: &str) -> Result<T> {
    v.parse().map_err(|_| err(sp, format!("{what} expects a number, got '{v}'")))
}

fn apply_setting(cfg: &mut SessionConfig, key: &str, v: &str, sp: Span) -> Result<()> {
    match key {
        "m" => cfg.m = Some(parse_num(v, sp, key)?),
        "g" => cfg.g = Some(parse_num(v, sp, key)?),
        "N" => cfg.n = Some(parse_num(v, sp, key)?),
        "eps_floor" => cfg.eps_floor = Some(parse_num(v, sp, key)?),
        "W" => cfg.w = Some(parse_num(v, sp, key)?),
        "seed" => cfg.seed = Some(parse_num(v, sp, key)?),
        "degrees" => {
            let d: Result<Vec<i32>> =
                v.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse_num(s.trim(), sp, key)).collect();
            cfg.degrees = Some(d?);
        }
        "fixture" => cfg.fixture = Some(v.to_string()),
        "context" => cfg.context = Some(v.to_string()),
        _ => return Err(err(sp, format!("unknown setting '{key}'"))),
    }
    Ok(())
}

impl Session {
    /// Load a source file; settings in `overrides` take precedence over the file's.
    pub fn load(src: &str, overrides: &SessionConfig) -> Result<Session> {
        let lines: Vec<(usize, Line)> = src
            .lines()
            .enumerate()
            .map(|(i, l)| split_line(l, i + 1).map(|x| x.map(|x| (i + 1, x))))
            .filter_map(|r| r.transpose())
            .collect::<Result<_>>()?;
        let mut file_cfg = SessionConfig::default();
        for (_, l) in &lines {
            if let Line::Setting(k, v, sp) = l {
                apply_setting(&mut file_cfg, k, v, *sp)?;
            }
        }
        let mut cfg = file_cfg.overlay(overrides);
        let base = match &cfg.fixture {
            Some(f) => Some(Session::fixture(f)?),
            None => None,
        };
        if let Some(b) = &base {
            if cfg.m.is_none() {
                cfg.m = b.config.m;
            }
        }
        let ctx = cfg.ctx()?;
        let bounds = cfg.bounds();
        let m = ctx.m;
        let mut alpha: Option<PolyMatrix> = None;
        let mut omega: Option<PolyMatrix> = None;
        let mut env = Env::new(&ctx, None);
        let mut order = vec![];
        for (_, l) in &lines {
            match l {
                Line::Setting(..) => {}
                Line::Entry(key, i, j, rhs, sp) => {
                    if *i >= m || *j >= m || i == j {
                        return Err(err(*sp, format!("{key}[{},{}] outside the off-diagonal of an {m}x{m} matrix", i + 1, j + 1)));
                    }
                    let v = Self::eval_line(&env, rhs, *sp, bounds)?;
                    let p = match v.coerce(Kind::Scalar) {
                        Some(Value::Scalar(p)) => p,
                        _ => return Err(err(*sp, format!("{key} entries are scalars"))),
                    };
                    let mat = if *key == "alpha" { &mut alpha } else { &mut omega };
                    let mat = mat.get_or_insert_with(|| vec![vec![Poly::zero(); m]; m]);
                    mat[*i][*j] = p.clone();
                    mat[*j][*i] = p.neg();
                }
                Line::Let(name, rhs, sp) => {
                    if env.pair.is_none() {
                        env.pair = Self::pair_from(&base, &alpha, &omega, m)?;
                    }
                    let v = Self::eval_line(&env, rhs, *sp, bounds)?;
                    if env.vars.insert(name.to_string(), v).is_none() {
                        order.push(name.to_string());
                    }
                }
            }
        }
        if env.pair.is_none() {
            env.pair = Self::pair_from(&base, &alpha, &omega, m)?;
        }
        Ok(Session { config: cfg, env, order })
    }

    fn pair_from(
        base: &Option<Session>,
        alpha: &Option<PolyMatrix>,
        omega: &Option<PolyMatrix>,
        m: usize,
    ) -> Result<Option<SymplecticPair>> {
        Ok(match (alpha, omega) {
            (Some(a), Some(o)) => Some(SymplecticPair::new(o.clone(), a.clone())?),
            (Some(a), None) => Some(SymplecticPair::new_unchecked(vec![vec![Poly::zero(); m]; m], a.clone())),
            (None, Some(_)) => return Err(Error::Argument("omega given without alpha".into())),
            (None, None) => base.as_ref().and_then(|b| b.env.pair.clone()),
        })
    }

    fn eval_line(env: &Env, rhs: &str, sp: Span, bounds: Bounds) -> Result<Value> {
        let lead = rhs.len() - rhs.trim_start().len();
        let ast = parse_with(rhs.trim_start(), sp.line, bounds, &|n| env.vars.contains_key(n)).map_err(|e| match e {
            Error::Parse { line, col, msg } if line == sp.line => Error::Parse { line, col: col + sp.col + lead - 1, msg },
            e => e,
        })?;
        env.eval(&ast)
    }

    /// A bundled symplectic fixture file.
    pub fn fixture(name: &str) -> Result<Session> {
        if !matches!(name, "standard2" | "standard4" | "shear4") {
            return Err(Error::Argument(format!("unknown fixture '{name}' (known: standard2, standard4, shear4)")));
        }
        Session::load(example_source(name)?, &SessionConfig::default())
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.env.vars.get(name)
    }

    /// The value named `mu`, else the last definition.
    pub fn main_value(&self) -> Option<(&str, &Value)> {
        if let Some(v) = self.env.vars.get("mu") {
            return Some(("mu", v));
        }
        self.order.last().map(|n| (n.as_str(), &self.env.vars[n]))
    }

    /// Parse and evaluate one expression in this session.
    pub fn eval_str(&self, src: &str) -> Result<Value> {
        let ast = parse_with(src, 1, self.config.bounds(), &|n| self.env.vars.contains_key(n))?;
        self.env.eval(&ast)
    }

    pub fn values(&self) -> BTreeMap<String, String> {
        self.env.vars.iter().map(|(k, v)| (k.clone(), v.text())).collect()
    }
}

/// Parse canonical text back into a value of the given kind.
pub fn parse_value(src: &str, kind: Kind, env: &Env) -> Result<Value> {
    let bounds = Bounds { m: env.ctx.m, g: env.ctx.g };
    let v = env.eval(&parse_with(src, 1, bounds, &|_| false)?)?;
    let got = v.kind();
    v.coerce(kind).ok_or_else(|| Error::Argument(format!("expected {}, got {}", kind.a_name(), got.a_name())))
}
