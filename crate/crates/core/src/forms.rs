//! Exterior forms in dx^i over the scalar ring, the transport J_omega and the bracket [,]_omega.
//!
//! An `LOmegaElem` stores the desuspended form eta of s^-1 eta; a summand of form degree q
//! and scalar degree s has degree q - 1 + s.

use std::fmt;

use crate::error::{Error, Result};
use crate::grassmann::Grass;
use crate::polyvectors::{PolyMatrix, Polyvector, SymplecticPair};
use crate::scalars::{Ctx, Mono, Poly, SMono, TruncationCtx, Q};

/// Filtration weight of a summand c dx_I with |I| = q: order of eps^{max(q-1,0)} c.
pub fn form_weight(q: u32, m: &Mono) -> i64 {
    let shift = q.saturating_sub(1) as i32;
    (m.s.eps + shift).max(0) as i64 + m.s.p.iter().map(|&k| k as i64).sum::<i64>()
}

/// Order of eps^k c, the quantity compared against the m-adic thresholds.
fn shifted_order(m: &Mono, k: i32) -> i64 {
    (m.s.eps + k).max(0) as i64 + m.s.p.iter().map(|&k| k as i64).sum::<i64>()
}

pub fn truncate_form(g: &Grass, ctx: &TruncationCtx) -> Grass {
    g.filter_terms(|k, m| form_weight(k.count_ones(), m) <= ctx.n as i64 && m.s.eps >= ctx.eps_floor)
}

pub fn de_rham_raw(g: &Grass, ctx: &TruncationCtx) -> Grass {
    let mut r = Grass::zero();
    for i in 0..ctx.m {
        let di = g.deriv_x(i);
        if !di.is_zero() {
            r = r.add(&di.left_gen(i, ctx));
        }
    }
    r
}

/// [s^-1 eta1, s^-1 eta2]_omega on desuspended forms, untruncated.
pub fn omega_bracket_raw(a: &Grass, b: &Grass, alpha: &PolyMatrix, ctx: &TruncationCtx) -> Grass {
    let (even, odd) = a.parity_split(ctx);
    let eps = Poly::smono(SMono::eps(1));
    let mut r = Grass::zero();
    for (piece, odd_piece) in [(even, false), (odd, true)] {
        if piece.is_zero() {
            continue;
        }
        let ca: Vec<Grass> = (0..ctx.m).map(|i| piece.left_deriv(i, ctx)).collect();
        let cb: Vec<Grass> = (0..ctx.m).map(|j| b.left_deriv(j, ctx)).collect();
        let da: Vec<Grass> = (0..ctx.m).map(|i| piece.deriv_x(i)).collect();
        let db: Vec<Grass> = (0..ctx.m).map(|j| b.deriv_x(j)).collect();
        for i in 0..ctx.m {
            for j in 0..ctx.m {
                let aij = &alpha[i][j];
                if aij.is_zero() {
                    continue;
                }
                let mut acc = Grass::zero();
                if !ca[i].is_zero() && !cb[j].is_zero() {
                    let cc = ca[i].mul(&cb[j], ctx);
                    if !cc.is_zero() {
                        for k in 0..ctx.m {
                            let dk = aij.deriv(k);
                            if !dk.is_zero() {
                                acc = acc.add(&cc.smul(&dk, ctx).left_gen(k, ctx));
                            }
                        }
                    }
                }
                if !ca[i].is_zero() && !db[j].is_zero() {
                    let t = ca[i].mul(&db[j], ctx).smul(aij, ctx);
                    acc = if odd_piece { acc.add(&t) } else { acc.sub(&t) };
                }
                if !da[i].is_zero() && !cb[j].is_zero() {
                    acc = acc.add(&da[i].mul(&cb[j], ctx).smul(aij, ctx));
                }
                r = r.add(&acc.smul(&eps, ctx));
            }
        }
    }
    r
}

/// J_omega on generators: f -> f, theta_i -> eps^-1 omega_ij dx^j, extended multiplicatively.
pub fn j_omega_raw(v: &Grass, omega: &PolyMatrix, ctx: &TruncationCtx) -> Grass {
    let inv = Poly::smono(SMono::eps(-1));
    let images: Vec<Grass> = (0..ctx.m)
        .map(|i| {
            let mut g = Grass::zero();
            for j in 0..ctx.m {
                g.add_term(1 << j, &inv.mul(&omega[i][j], ctx));
            }
            g
        })
        .collect();
    substitute(v, &images, ctx)
}

/// J_omega^-1: dx^i -> eps alpha^{ij} theta_j.
pub fn j_omega_inv_raw(f: &Grass, alpha: &PolyMatrix, ctx: &TruncationCtx) -> Grass {
    let eps = Poly::smono(SMono::eps(1));
    let images: Vec<Grass> = (0..ctx.m)
        .map(|i| {
            let mut g = Grass::zero();
            for j in 0..ctx.m {
                g.add_term(1 << j, &eps.mul(&alpha[i][j], ctx));
            }
            g
        })
        .collect();
    substitute(f, &images, ctx)
}

fn substitute(v: &Grass, images: &[Grass], ctx: &TruncationCtx) -> Grass {
    let mut r = Grass::zero();
    for (mask, p) in &v.0 {
        let mut prod = Grass::scalar(p.clone());
        for i in 0..images.len() {
            if mask & (1 << i) != 0 {
                prod = prod.mul(&images[i], ctx);
            }
        }
        r = r.add(&prod);
    }
    r
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExteriorForm {
    pub ctx: Ctx,
    pub g: Grass,
}

impl ExteriorForm {
    pub fn new(ctx: &Ctx, g: Grass) -> Self {
        ExteriorForm { g: g.map_polys(|_, p| p.truncate(ctx)), ctx: ctx.clone() }
    }

    pub fn zero(ctx: &Ctx) -> Self {
        ExteriorForm { ctx: ctx.clone(), g: Grass::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.g.is_zero()
    }

    pub fn add(&self, o: &ExteriorForm) -> Result<ExteriorForm> {
        TruncationCtx::check_same(&self.ctx, &o.ctx)?;
        Ok(Self::new(&self.ctx, self.g.add(&o.g)))
    }

    pub fn wedge(&self, o: &ExteriorForm) -> Result<ExteriorForm> {
        TruncationCtx::check_same(&self.ctx, &o.ctx)?;
        Ok(Self::new(&self.ctx, self.g.mul(&o.g, &self.ctx)))
    }

    pub fn text(&self) -> String {
        self.g.text("dx")
    }
}

impl fmt::Display for ExteriorForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

pub fn de_rham(eta: &ExteriorForm) -> ExteriorForm {
    ExteriorForm::new(&eta.ctx, de_rham_raw(&eta.g, &eta.ctx))
}

/// Left derivative d/d(dx^i), with i 0-based.
pub fn contract_dx(i: usize, eta: &ExteriorForm) -> Result<ExteriorForm> {
    if i >= eta.ctx.m {
        return Err(Error::Argument(format!("dx{} out of range", i + 1)));
    }
    Ok(ExteriorForm::new(&eta.ctx, eta.g.left_deriv(i, &eta.ctx)))
}

/// Element s^-1 eta of L_Omega.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LOmegaElem {
    pub ctx: Ctx,
    pub g: Grass,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Space {
    L,
    LTilde,
    FL(u32),
    FLTilde(u32),
}

impl Space {
    pub fn name(&self) -> String {
        match self {
            Space::L => "L_Omega".into(),
            Space::LTilde => "L~_Omega".into(),
            Space::FL(k) => format!("F_{k} L_Omega"),
            Space::FLTilde(k) => format!("F_{k} L~_Omega"),
        }
    }
}

pub fn in_space(g: &Grass, space: Space) -> bool {
    g.terms().all(|(k, m, _)| {
        let q = k.count_ones() as i32;
        let l = |k: i64| m.s.eps >= -q && shifted_order(m, q) >= k;
        let lt = m.s.eps >= -(q - 1) && shifted_order(m, q - 1) >= 1;
        match space {
            Space::L => l(1),
            Space::LTilde => lt,
            Space::FL(k) => l(k as i64),
            Space::FLTilde(k) => lt && l(k as i64),
        }
    })
}

impl LOmegaElem {
    pub fn new(ctx: &Ctx, g: Grass) -> Self {
        LOmegaElem { g: truncate_form(&g, ctx), ctx: ctx.clone() }
    }

    pub fn zero(ctx: &Ctx) -> Self {
        LOmegaElem { ctx: ctx.clone(), g: Grass::zero() }
    }

    pub fn from_form(f: &ExteriorForm) -> Self {
        Self::new(&f.ctx, f.g.clone())
    }

    pub fn desuspend(&self) -> ExteriorForm {
        ExteriorForm::new(&self.ctx, self.g.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.g.is_zero()
    }

    /// Suspended degree q - 1 + scalar degree, if homogeneous.
    pub fn degree(&self) -> Result<Option<i32>> {
        Ok(self.g.degree(&self.ctx)?.map(|d| d - 1))
    }

    pub fn add(&self, o: &LOmegaElem) -> Result<LOmegaElem> {
        TruncationCtx::check_same(&self.ctx, &o.ctx)?;
        Ok(Self::new(&self.ctx, self.g.add(&o.g)))
    }

    pub fn sub(&self, o: &LOmegaElem) -> Result<LOmegaElem> {
        TruncationCtx::check_same(&self.ctx, &o.ctx)?;
        Ok(Self::new(&self.ctx, self.g.sub(&o.g)))
    }

    pub fn neg(&self) -> LOmegaElem {
        LOmegaElem { ctx: self.ctx.clone(), g: self.g.neg() }
    }

    pub fn scale(&self, c: &Q) -> LOmegaElem {
        Self::new(&self.ctx, self.g.scale(c))
    }

    pub fn membership(&self, space: Space) -> bool {
        in_space(&self.g, space)
    }

    /// Membership table over L, L~, F_k L, F_k L~ for k = 1..=kmax.
    pub fn membership_table(&self, kmax: u32) -> Vec<(String, bool)> {
        let mut v = vec![
            (Space::L.name(), self.membership(Space::L)),
            (Space::LTilde.name(), self.membership(Space::LTilde)),
        ];
        for k in 1..=kmax {
            v.push((Space::FL(k).name(), self.membership(Space::FL(k))));
            v.push((Space::FLTilde(k).name(), self.membership(Space::FLTilde(k))));
        }
        v
    }

    pub fn text(&self) -> String {
        format!("s^-1({})", self.g.text("dx"))
    }
}

impl fmt::Display for LOmegaElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

pub fn omega_bracket(a: &LOmegaElem, b: &LOmegaElem, pair: &SymplecticPair) -> Result<LOmegaElem> {
    TruncationCtx::check_same(&a.ctx, &b.ctx)?;
    if pair.m != a.ctx.m {
        return Err(Error::Argument("symplectic pair dimension differs from the context".into()));
    }
    a.degree()?;
    b.degree()?;
    let r = omega_bracket_raw(&a.g, &b.g, &pair.alpha, &a.ctx);
    let out = LOmegaElem::new(&a.ctx, r);
    if !out.membership(Space::L) && !out.is_zero() {
        return Err(Error::Membership("[,]_omega output leaves L_Omega".into()));
    }
    Ok(out)
}

pub fn j_omega(v: &Polyvector, pair: &SymplecticPair) -> Result<LOmegaElem> {
    if pair.m != v.ctx.m {
        return Err(Error::Argument("symplectic pair dimension differs from the context".into()));
    }
    if v.g.terms().any(|(_, m, _)| m.s.eps < 0 || m.s.m_order() < 1) {
        return Err(Error::Membership("J_omega input must lie in m * PV".into()));
    }
    Ok(LOmegaElem::new(&v.ctx, j_omega_raw(&v.g, &pair.omega, &v.ctx)))
}

pub fn j_omega_inv(a: &LOmegaElem, pair: &SymplecticPair) -> Result<Polyvector> {
    if pair.m != a.ctx.m {
        return Err(Error::Argument("symplectic pair dimension differs from the context".into()));
    }
    if !a.membership(Space::L) {
        return Err(Error::Membership("J_omega^-1 input must lie in L_Omega".into()));
    }
    Ok(Polyvector::new(&a.ctx, j_omega_inv_raw(&a.g, &pair.alpha, &a.ctx)))
}
