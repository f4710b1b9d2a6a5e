//! Evaluation of parsed expressions to kernel values, and their canonical printing.

use std::collections::BTreeMap;

use num_traits::One;

use super::parse::{err, Ast, GenKind, Span};
use crate::deformation::OmegaDgla;
use crate::error::Result;
use crate::forms::{de_rham_raw, j_omega_inv_raw, j_omega_raw, omega_bracket_raw, truncate_form};
use crate::grassmann::Grass;
use crate::polydiff::{
    cup, gerstenhaber_raw, hkr_embed_raw, hkr_project_raw, hochschild_raw, moyal_star, truncate_terms, PolyDiffOp,
    Terms,
};
use crate::polyvectors::{schouten_raw, truncate_pv, SymplecticPair};
use crate::scalars::{Ctx, Poly, SMono, XMono, Q};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Kind {
    Scalar,
    Pv,
    Form,
    SForm,
    Op,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Scalar => "scalar",
            Kind::Pv => "polyvector",
            Kind::Form => "form",
            Kind::SForm => "suspended form",
            Kind::Op => "operator",
        }
    }

    /// The name with its indefinite article.
    pub fn a_name(self) -> &'static str {
        match self {
            Kind::Scalar => "a scalar",
            Kind::Pv => "a polyvector",
            Kind::Form => "a form",
            Kind::SForm => "a suspended form",
            Kind::Op => "an operator",
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub enum Value {
    Scalar(Poly),
    Pv(Grass),
    Form(Grass),
    /// s^-1 of a form: an element of the Omega carrier.
    SForm(Grass),
    Op(Terms),
}

impl Value {
    pub fn kind(&self) -> Kind {
        match self {
            Value::Scalar(_) => Kind::Scalar,
            Value::Pv(_) => Kind::Pv,
            Value::Form(_) => Kind::Form,
            Value::SForm(_) => Kind::SForm,
            Value::Op(_) => Kind::Op,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Scalar(p) => p.is_zero(),
            Value::Pv(g) | Value::Form(g) | Value::SForm(g) => g.is_zero(),
            Value::Op(t) => t.is_empty(),
        }
    }

    /// Canonical text; `parse_value` inverts it.
    pub fn text(&self) -> String {
        match self {
            Value::Scalar(p) => p.text(),
            Value::Pv(g) => g.text("th"),
            Value::Form(g) => g.text("dx"),
            Value::SForm(g) => format!("s^-1({})", g.text("dx")),
            Value::Op(t) => op_text(t),
        }
    }

    /// Coerce to a target kind: scalars embed as degree-zero polyvectors and 0-forms, zero
    /// embeds everywhere.
    pub fn coerce(self, k: Kind) -> Option<Value> {
        if self.kind() == k {
            return Some(self);
        }
        match (self, k) {
            (Value::Scalar(p), Kind::Pv) => Some(Value::Pv(Grass::scalar(p))),
            (Value::Scalar(p), Kind::Form) => Some(Value::Form(Grass::scalar(p))),
            (v, Kind::SForm) if v.is_zero() => Some(Value::SForm(Grass::zero())),
            (v, Kind::Op) if v.is_zero() => Some(Value::Op(Terms::new())),
            (v, Kind::Scalar) if v.is_zero() => Some(Value::Scalar(Poly::zero())),
            (Value::Pv(g), Kind::Scalar) | (Value::Form(g), Kind::Scalar) if g.terms().all(|(k, _, _)| k == 0) => {
                Some(Value::Scalar(g.terms().fold(Poly::zero(), |mut p, (_, m, c)| {
                    p.add_term(*m, c.clone());
                    p
                })))
            }
            _ => None,
        }
    }
}

pub fn op_text(t: &Terms) -> String {
    crate::polydiff::terms_text(t)
}

/// Evaluation environment: context, optional symplectic pair, bound names.
#[derive(Clone, Debug)]
pub struct Env {
    pub ctx: Ctx,
    pub pair: Option<SymplecticPair>,
    pub vars: BTreeMap<String, Value>,
}

fn kind_err(sp: Span, what: &str, got: &[&Value]) -> crate::error::Error {
    let kinds: Vec<&str> = got.iter().map(|v| v.kind().name()).collect();
    err(sp, format!("{what} is not defined for {}", kinds.join(", ")))
}

impl Env {
    pub fn new(ctx: &Ctx, pair: Option<SymplecticPair>) -> Self {
        Env { ctx: ctx.clone(), pair, vars: BTreeMap::new() }
    }

    fn pair(&self, sp: Span, head: &str) -> Result<&SymplecticPair> {
        self.pair.as_ref().ok_or_else(|| err(sp, format!("{head} needs a symplectic pair (fixture or alpha/omega)")))
    }

    pub fn truncate(&self, v: Value) -> Value {
        let c = &self.ctx;
        match v {
            Value::Scalar(p) => Value::Scalar(p.truncate(c)),
            Value::Pv(g) => Value::Pv(truncate_pv(&g, c)),
            Value::Form(g) => Value::Form(g.map_polys(|_, p| p.truncate(c))),
            Value::SForm(g) => Value::SForm(truncate_form(&g, c)),
            Value::Op(t) => Value::Op(truncate_terms(&t, c)),
        }
    }

    pub fn eval(&self, a: &Ast) -> Result<Value> {
        let v = self.eval_raw(a)?;
        Ok(self.truncate(v))
    }

    fn eval_raw(&self, a: &Ast) -> Result<Value> {
        let c = &self.ctx;
        Ok(match a {
            Ast::Num(q, _) => Value::Scalar(Poly::constant(q.clone())),
            Ast::Gen(k, i, _) => match k {
                GenKind::X => Value::Scalar(Poly::x(*i)),
                GenKind::Eps => Value::Scalar(Poly::eps()),
                GenKind::Param => Value::Scalar(Poly::smono(SMono::param(*i))),
                GenKind::T => Value::Scalar(Poly::smono(SMono { t: 1, ..SMono::ONE })),
                GenKind::Dt => Value::Scalar(Poly::smono(SMono { dt: true, ..SMono::ONE })),
                GenKind::Theta => Value::Pv(Grass::gen(*i)),
                GenKind::Dx => Value::Form(Grass::gen(*i)),
            },
            Ast::Var(n, sp) => self.vars.get(n).cloned().ok_or_else(|| err(*sp, format!("unbound name '{n}'")))?,
            Ast::Neg(x, _) => self.scale(self.eval(x)?, &-Q::one()),
            Ast::Add(x, y, sp) => self.add(self.eval(x)?, self.eval(y)?, *sp, false)?,
            Ast::Sub(x, y, sp) => self.add(self.eval(x)?, self.eval(y)?, *sp, true)?,
            Ast::Mul(x, y, sp) => self.mul(self.eval(x)?, self.eval(y)?, *sp)?,
            Ast::Tensor(x, y, sp) => match (self.eval(x)?, self.eval(y)?) {
                (Value::Op(p), Value::Op(q)) => Value::Op(self.cup(&p, &q)),
                (u, v) => return Err(kind_err(*sp, "⊗", &[&u, &v])),
            },
            Ast::Pow(x, k, sp) => {
                let v = self.eval(x)?;
                let Value::Scalar(p) = &v else {
                    return Err(kind_err(*sp, "a power", &[&v]));
                };
                if *k < 0 {
                    if p.iter().count() != 1 {
                        return Err(err(*sp, "negative powers are defined only for eps"));
                    }
                    let (m, q) = p.iter().next().unwrap();
                    let only_eps = m.x == XMono::ONE && SMono { eps: 0, ..m.s } == SMono::ONE && q.is_one();
                    if !only_eps {
                        return Err(err(*sp, "negative powers are defined only for eps"));
                    }
                    return Ok(Value::Scalar(Poly::smono(SMono::eps(m.s.eps * k))));
                }
                let mut r = Poly::one();
                for _ in 0..*k {
                    r = r.mul(p, c);
                }
                Value::Scalar(r)
            }
            Ast::Susp(x, sp) => match self.eval(x)?.coerce(Kind::Form) {
                Some(Value::Form(g)) => Value::SForm(g),
                _ => return Err(err(*sp, "s(...) takes a form")),
            },
            Ast::Slots(s, _) => {
                let slots = s.iter().map(|ix| XMono::from_indices(ix)).collect::<Vec<_>>();
                let mut t = Terms::new();
                t.insert(slots, Poly::one());
                Value::Op(t)
            }
            Ast::Call(h, idx, args, sp) => self.call(h, *idx, args, *sp)?,
        })
    }

    fn cup(&self, p: &Terms, q: &Terms) -> Terms {
        let a = PolyDiffOp { ctx: self.ctx.clone(), terms: p.clone() };
        let b = PolyDiffOp { ctx: self.ctx.clone(), terms: q.clone() };
        cup(&a, &b).expect("same context").terms
    }

    fn scale(&self, v: Value, k: &Q) -> Value {
        match v {
            Value::Scalar(p) => Value::Scalar(p.scale(k)),
            Value::Pv(g) => Value::Pv(g.scale(k)),
            Value::Form(g) => Value::Form(g.scale(k)),
            Value::SForm(g) => Value::SForm(g.scale(k)),
            Value::Op(t) => Value::Op(t.into_iter().map(|(s, p)| (s, p.scale(k))).filter(|(_, p)| !p.is_zero()).collect()),
        }
    }

    fn unify(&self, u: Value, v: Value, sp: Span, what: &str) -> Result<(Value, Value)> {
        if u.kind() == v.kind() {
            return Ok((u, v));
        }
        if let Some(v2) = v.clone().coerce(u.kind()) {
            return Ok((u, v2));
        }
        if let Some(u2) = u.clone().coerce(v.kind()) {
            return Ok((u2, v));
        }
        Err(kind_err(sp, what, &[&u, &v]))
    }

    fn add(&self, u: Value, v: Value, sp: Span, sub: bool) -> Result<Value> {
        let v = if sub { self.scale(v, &-Q::one()) } else { v };
        let (u, v) = self.unify(u, v, sp, "a sum")?;
        Ok(match (u, v) {
            (Value::Scalar(a), Value::Scalar(b)) => Value::Scalar(a.add(&b)),
            (Value::Pv(a), Value::Pv(b)) => Value::Pv(a.add(&b)),
            (Value::Form(a), Value::Form(b)) => Value::Form(a.add(&b)),
            (Value::SForm(a), Value::SForm(b)) => Value::SForm(a.add(&b)),
            (Value::Op(a), Value::Op(b)) => {
                let mut t = a;
                for (k, p) in b {
                    let e = t.entry(k.clone()).or_insert_with(Poly::zero);
                    e.add_assign(&p);
                    if e.is_zero() {
                        t.remove(&k);
                    }
                }
                Value::Op(t)
            }
            _ => unreachable!(),
        })
    }

    /// Graded product: scalars multiply from the left, polyvectors and forms among themselves.
    fn mul(&self, u: Value, v: Value, sp: Span) -> Result<Value> {
        let c = &self.ctx;
        Ok(match (u, v) {
            (Value::Scalar(a), Value::Scalar(b)) => Value::Scalar(a.mul(&b, c)),
            (Value::Scalar(a), Value::Pv(g)) => Value::Pv(g.smul(&a, c)),
            (Value::Scalar(a), Value::Form(g)) => Value::Form(g.smul(&a, c)),
            (Value::Scalar(a), Value::Op(t)) => Value::Op(PolyDiffOp::new(c, t).smul(&a).terms),
            (Value::Pv(g), Value::Scalar(a)) => Value::Pv(g.mul(&Grass::scalar(a), c)),
            (Value::Form(g), Value::Scalar(a)) => Value::Form(g.mul(&Grass::scalar(a), c)),
            (Value::Pv(g), Value::Pv(h)) => Value::Pv(g.mul(&h, c)),
            (Value::Form(g), Value::Form(h)) => Value::Form(g.mul(&h, c)),
            (u, v) => {
                let hint = if u.kind() == Kind::SForm || v.kind() == Kind::SForm {
                    " (write scalars inside s(...))"
                } else {
                    ""
                };
                return Err(err(sp, format!("product is not defined for {}, {}{hint}", u.kind().name(), v.kind().name())));
            }
        })
    }

    fn arg(&self, a: &Ast, k: Kind, head: &str) -> Result<Value> {
        let v = self.eval(a)?;
        let got = v.kind();
        v.coerce(k).ok_or_else(|| err(a.span(), format!("{head} expects {}, got {}", k.a_name(), got.a_name())))
    }

    fn grass(&self, a: &Ast, k: Kind, head: &str) -> Result<Grass> {
        match self.arg(a, k, head)? {
            Value::Pv(g) | Value::Form(g) | Value::SForm(g) => Ok(g),
            _ => unreachable!(),
        }
    }

    fn terms(&self, a: &Ast, head: &str) -> Result<Terms> {
        match self.arg(a, Kind::Op, head)? {
            Value::Op(t) => Ok(t),
            _ => unreachable!(),
        }
    }

    fn call(&self, h: &str, idx: Option<usize>, args: &[Ast], sp: Span) -> Result<Value> {
        let c = &self.ctx;
        Ok(match h {
            "d" => match self.eval(&args[0])? {
                Value::SForm(g) => Value::SForm(de_rham_raw(&g, c)),
                v => match v.coerce(Kind::Form) {
                    Some(Value::Form(g)) => Value::Form(de_rham_raw(&g, c)),
                    _ => return Err(err(args[0].span(), "d expects a form")),
                },
            },
            "ddx" => {
                let i = idx.expect("index");
                match self.eval(&args[0])? {
                    Value::SForm(g) => Value::SForm(g.left_deriv(i, c)),
                    v => match v.coerce(Kind::Form) {
                        Some(Value::Form(g)) => Value::Form(g.left_deriv(i, c)),
                        _ => return Err(err(args[0].span(), "ddx expects a form")),
                    },
                }
            }
            "sbr" => {
                let a = self.grass(&args[0], Kind::Pv, h)?;
                let b = self.grass(&args[1], Kind::Pv, h)?;
                Value::Pv(schouten_raw(&a, &b, c))
            }
            "gbr" => Value::Op(gerstenhaber_raw(&self.terms(&args[0], h)?, &self.terms(&args[1], h)?, c)),
            "hoch" => Value::Op(hochschild_raw(&self.terms(&args[0], h)?, c)),
            "cup" => Value::Op(self.cup(&self.terms(&args[0], h)?, &self.terms(&args[1], h)?)),
            "hkr" => Value::Op(hkr_embed_raw(&self.grass(&args[0], Kind::Pv, h)?)),
            "hkrp" => Value::Pv(hkr_project_raw(&self.terms(&args[0], h)?)),
            "jw" => {
                let p = self.pair(sp, h)?;
                Value::SForm(j_omega_raw(&self.grass(&args[0], Kind::Pv, h)?, &p.omega, c))
            }
            "jwinv" => {
                let p = self.pair(sp, h)?;
                Value::Pv(j_omega_inv_raw(&self.grass(&args[0], Kind::SForm, h)?, &p.alpha, c))
            }
            "obr" => {
                let p = self.pair(sp, h)?;
                let a = self.grass(&args[0], Kind::SForm, h)?;
                let b = self.grass(&args[1], Kind::SForm, h)?;
                Value::SForm(omega_bracket_raw(&a, &b, &p.alpha, c))
            }
            "pi" => {
                let p = self.pair(sp, h)?;
                let a = self.grass(&args[0], Kind::SForm, h)?;
                let b = self.grass(&args[1], Kind::SForm, h)?;
                let l = OmegaDgla::new(c, Some(p), true);
                Value::SForm(crate::coderivations::pi_raw(&a, &b, p, &l))
            }
            "moyal" => {
                let p = self.pair(sp, h)?;
                let al = p.constant_alpha().map_err(|e| err(sp, e.to_string()))?;
                Value::Op(moyal_star(&al, c).map_err(|e| err(sp, e.to_string()))?.terms)
            }
            _ => return Err(err(sp, format!("unknown head '{h}'"))),
        })
    }
}
