//! Filtered dg Lie algebras: Maurer-Cartan checks, gauge action, Kodaira-Spencer class,
//! shift and twist, Conditions 1-2 and 1-cells over the simplex.
//!
//! Every context's differential includes d_t = dt ∂_t, which vanishes on t-free elements,
//! so a context doubles as its own path carrier.

use std::fmt::Debug;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{form_weight, omega_bracket_raw, truncate_form};
use crate::grassmann::Grass;
use crate::polydiff::{self, ainfty_from_mc, gerstenhaber_raw, hkr_project_raw, Slots, Terms};
use crate::polyvectors::{schouten_raw, truncate_pv, Polyvector, SymplecticPair};
use crate::scalars::{factorial, Ctx, Mono, Poly, SMono, TruncationCtx, Q};

pub trait Dgla {
    type Elem: Clone + PartialEq + Debug;
    type Basis: Clone + Ord + Debug;

    fn ctx(&self) -> &Ctx;
    fn tag(&self) -> String;
    fn zero(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn scale(&self, a: &Self::Elem, c: &Q) -> Self::Elem;
    /// Scalar map applied to every coefficient (scalars sit to the left).
    fn map_scalars(&self, a: &Self::Elem, f: &dyn Fn(&Poly) -> Poly) -> Self::Elem;
    /// Graded left multiplication by a scalar.
    fn smul(&self, c: &Poly, a: &Self::Elem) -> Self::Elem;
    /// The carrier differential, without d_t and without truncation.
    fn d_raw(&self, a: &Self::Elem) -> Self::Elem;
    fn bracket_raw(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn truncate(&self, a: &Self::Elem) -> Self::Elem;
    fn degree(&self, a: &Self::Elem) -> Result<Option<i32>>;
    /// Filtration order of one basis element.
    fn basis_order(&self, b: &Self::Basis) -> i64;
    /// Weight compared against N by `truncate`.
    fn basis_weight(&self, b: &Self::Basis) -> i64 {
        self.basis_order(b)
    }
    fn basis_degree(&self, b: &Self::Basis) -> i32;
    fn basis_elem(&self, b: &Self::Basis) -> Self::Elem;
    fn expand(&self, a: &Self::Elem) -> Vec<(Self::Basis, Q)>;
    fn show(&self, a: &Self::Elem) -> String;

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.scale(a, &-Q::one())
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    /// Carrier differential plus d_t, truncated.
    fn d(&self, a: &Self::Elem) -> Self::Elem {
        let ctx = self.ctx().clone();
        let dt = self.map_scalars(a, &|p| p.d_t(&ctx));
        self.truncate(&self.add(&self.d_raw(a), &dt))
    }

    fn bracket(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.truncate(&self.bracket_raw(a, b))
    }

    /// Minimal filtration order, `None` for zero.
    fn order(&self, a: &Self::Elem) -> Option<i64> {
        self.expand(a).iter().map(|(b, _)| self.basis_order(b)).min()
    }

    /// d mu + 1/2 [mu, mu].
    fn mc_residual(&self, mu: &Self::Elem) -> Self::Elem {
        let half = Q::one() / Q::from_integer(2.into());
        self.truncate(&self.add(&self.d(mu), &self.scale(&self.bracket_raw(mu, mu), &half)))
    }

    /// Text of the lowest-order monomial of `a` (canonical order breaks ties).
    fn lowest_key(&self, a: &Self::Elem) -> Option<String> {
        let terms = self.expand(a);
        let best = terms.iter().min_by_key(|(b, _)| self.basis_order(b))?;
        Some(self.show(&self.scale(&self.basis_elem(&best.0), &best.1)))
    }

    fn eval_t(&self, a: &Self::Elem, v: &Q) -> Self::Elem {
        self.map_scalars(a, &|p| p.eval_t(v))
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Truncation {
    #[serde(rename = "N")]
    pub n: u32,
    pub eps_floor: i32,
    #[serde(rename = "W")]
    pub w: usize,
}

impl Truncation {
    pub fn of(ctx: &TruncationCtx) -> Self {
        Truncation { n: ctx.n, eps_floor: ctx.eps_floor, w: ctx.w }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Report {
    pub check: String,
    pub status: String,
    pub first_failure_key: Option<String>,
    pub context_tag: String,
    pub residual: String,
    pub truncation: Truncation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.status == "pass"
    }

    pub fn new(check: &str, pass: bool, ctx: &TruncationCtx, tag: &str) -> Self {
        Report {
            check: check.into(),
            status: if pass { "pass" } else { "fail" }.into(),
            first_failure_key: None,
            context_tag: tag.into(),
            residual: "0".into(),
            truncation: Truncation::of(ctx),
            reason: None,
        }
    }

    pub fn json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn residual_report<L: Dgla>(l: &L, check: &str, r: &L::Elem) -> Report {
    let mut rep = Report::new(check, l.is_zero(r), l.ctx(), &l.tag());
    rep.residual = l.show(r);
    rep.first_failure_key = l.lowest_key(r);
    rep
}

/// Checks d mu + 1/2 [mu, mu] = 0 mod truncation. A degree other than 1 or an order
/// below 1 is reported as a failure with a reason.
pub fn mc_check<L: Dgla>(mu: &L::Elem, l: &L) -> Result<Report> {
    let r = l.mc_residual(mu);
    let mut rep = residual_report(l, "mc", &r);
    match l.degree(mu) {
        Err(e) => {
            rep.status = "fail".into();
            rep.reason = Some(e.to_string());
        }
        Ok(Some(d)) if d != 1 => {
            rep.status = "fail".into();
            rep.reason = Some(format!("element has degree {d}, expected 1"));
        }
        _ => {}
    }
    if let Some(o) = l.order(mu) {
        if o < 1 {
            rep.status = "fail".into();
            rep.reason = Some(format!("element has filtration order {o}, expected >= 1"));
        }
    }
    Ok(rep)
}

/// e^{ad xi} mu - (e^{ad xi} - 1)/ad xi (d xi).
pub fn gauge_act<L: Dgla>(xi: &L::Elem, mu: &L::Elem, l: &L) -> Result<L::Elem> {
    if let Some(d) = l.degree(xi)? {
        if d != 0 {
            return Err(Error::Degree(format!("gauge parameter has degree {d}, expected 0")));
        }
    }
    if l.order(xi).map_or(false, |o| o < 1) {
        return Err(Error::Argument("gauge parameter must have filtration order >= 1".into()));
    }
    let guard = l.ctx().n as usize + 2;
    let mut out = mu.clone();
    let mut a = mu.clone();
    let mut b = l.d(xi);
    out = l.sub(&out, &b);
    for n in 1..=guard + 1 {
        a = l.bracket(xi, &a);
        b = l.bracket(xi, &b);
        if l.is_zero(&a) && l.is_zero(&b) {
            return Ok(l.truncate(&out));
        }
        if n > guard {
            break;
        }
        out = l.add(&out, &l.scale(&a, &(Q::one() / factorial(n as u32))));
        out = l.sub(&out, &l.scale(&b, &(Q::one() / factorial(n as u32 + 1))));
    }
    Err(Error::Contract("gauge series did not terminate within the truncation".into()))
}

/// A path a(t) + dt b(t) in L ⊗ Ω_1.
#[derive(Clone, PartialEq, Debug)]
pub struct PathElem<E> {
    pub a: E,
    pub b: E,
}

impl<E: Clone> PathElem<E> {
    pub fn constant(mu: &E, zero: E) -> Self {
        PathElem { a: mu.clone(), b: zero }
    }
}

pub fn path_total<L: Dgla>(eta: &PathElem<L::Elem>, l: &L) -> L::Elem {
    let dt = Poly::smono(SMono { dt: true, ..SMono::ONE });
    l.add(&eta.a, &l.smul(&dt, &eta.b))
}

/// Inverse of `path_total`: separate the dt-free part from the dt-coefficient.
pub fn path_split<L: Dgla>(total: &L::Elem, l: &L) -> PathElem<L::Elem> {
    let ctx = l.ctx().clone();
    let a = l.map_scalars(total, &|p| p.filter(|m| !m.s.dt));
    let b = l.map_scalars(total, &|p| {
        let mut r = Poly::zero();
        for (m, c) in p.iter() {
            if m.s.dt {
                let mut m2 = *m;
                m2.s.dt = false;
                // dt is stored to the right of the odd parameters.
                r.add_term(m2, if m2.s.parity(&ctx) { -c.clone() } else { c.clone() });
            }
        }
        r
    });
    PathElem { a, b }
}

/// MC equation in L ⊗ Ω_1 with differential d + d_t; returns the endpoints at t = 0, 1.
pub fn mc_path_check<L: Dgla>(eta: &PathElem<L::Elem>, l: &L) -> Result<(Report, L::Elem, L::Elem)> {
    let has_dt = |e: &L::Elem| {
        let found = std::cell::Cell::new(false);
        l.map_scalars(e, &|p| {
            if p.iter().any(|(m, _)| m.s.dt) {
                found.set(true);
            }
            p.clone()
        });
        found.get()
    };
    if has_dt(&eta.a) || has_dt(&eta.b) {
        return Err(Error::Argument("path components must not contain dt themselves".into()));
    }
    let total = path_total(eta, l);
    let mut rep = mc_check(&total, l)?;
    rep.check = "mc-path".into();
    let p0 = l.truncate(&l.eval_t(&eta.a, &Q::zero()));
    let p1 = l.truncate(&l.eval_t(&eta.a, &Q::one()));
    Ok((rep, p0, p1))
}

// ---------------------------------------------------------------- PV

#[derive(Clone, Debug)]
pub struct PvDgla {
    pub ctx: Ctx,
    /// eps * alpha, when the differential is [eps alpha, ]_S.
    pub eps_alpha: Option<Grass>,
}

impl PvDgla {
    pub fn new(ctx: &Ctx, pair: Option<&SymplecticPair>) -> Self {
        PvDgla { ctx: ctx.clone(), eps_alpha: pair.map(|p| p.eps_alpha(ctx).g) }
    }
}

fn grass_expand(g: &Grass) -> Vec<((u16, Mono), Q)> {
    g.terms().map(|(k, m, c)| ((k, *m), c.clone())).collect()
}

fn grass_basis(b: &(u16, Mono)) -> Grass {
    Grass::term(b.0, Poly::term(b.1, Q::one()))
}

impl Dgla for PvDgla {
    type Elem = Grass;
    type Basis = (u16, Mono);

    fn ctx(&self) -> &Ctx {
        &self.ctx
    }
    fn tag(&self) -> String {
        if self.eps_alpha.is_some() { "PV[eps alpha]" } else { "PV" }.into()
    }
    fn zero(&self) -> Grass {
        Grass::zero()
    }
    fn add(&self, a: &Grass, b: &Grass) -> Grass {
        a.add(b)
    }
    fn scale(&self, a: &Grass, c: &Q) -> Grass {
        a.scale(c)
    }
    fn map_scalars(&self, a: &Grass, f: &dyn Fn(&Poly) -> Poly) -> Grass {
        a.map_polys(|_, p| f(p))
    }
    fn smul(&self, c: &Poly, a: &Grass) -> Grass {
        a.smul(c, &self.ctx)
    }
    fn d_raw(&self, a: &Grass) -> Grass {
        match &self.eps_alpha {
            Some(ea) => schouten_raw(ea, a, &self.ctx),
            None => Grass::zero(),
        }
    }
    fn bracket_raw(&self, a: &Grass, b: &Grass) -> Grass {
        schouten_raw(a, b, &self.ctx)
    }
    fn truncate(&self, a: &Grass) -> Grass {
        truncate_pv(a, &self.ctx)
    }
    fn degree(&self, a: &Grass) -> Result<Option<i32>> {
        Ok(a.degree(&self.ctx)?.map(|d| d - 1))
    }
    fn basis_order(&self, b: &(u16, Mono)) -> i64 {
        b.1.s.m_order()
    }
    fn basis_degree(&self, b: &(u16, Mono)) -> i32 {
        b.0.count_ones() as i32 - 1 + b.1.s.degree(&self.ctx)
    }
    fn basis_elem(&self, b: &(u16, Mono)) -> Grass {
        grass_basis(b)
    }
    fn expand(&self, a: &Grass) -> Vec<((u16, Mono), Q)> {
        grass_expand(a)
    }
    fn show(&self, a: &Grass) -> String {
        a.text("th")
    }
}

// ---------------------------------------------------------------- PD

#[derive(Clone, Debug)]
pub struct PdDgla {
    pub ctx: Ctx,
    /// mu_alpha when the differential is twisted to ∂^Hoch + [mu_alpha, ]_G.
    pub twist: Option<Terms>,
}

impl PdDgla {
    pub fn new(ctx: &Ctx) -> Self {
        PdDgla { ctx: ctx.clone(), twist: None }
    }
}

impl Dgla for PdDgla {
    type Elem = Terms;
    type Basis = (Slots, Mono);

    fn ctx(&self) -> &Ctx {
        &self.ctx
    }
    fn tag(&self) -> String {
        if self.twist.is_some() { "PD-twisted" } else { "PD" }.into()
    }
    fn zero(&self) -> Terms {
        Terms::new()
    }
    fn add(&self, a: &Terms, b: &Terms) -> Terms {
        let mut r = a.clone();
        for (k, p) in b {
            let e = r.entry(k.clone()).or_default();
            e.add_assign(p);
            if e.is_zero() {
                r.remove(k);
            }
        }
        r
    }
    fn scale(&self, a: &Terms, c: &Q) -> Terms {
        if c.is_zero() {
            return Terms::new();
        }
        a.iter().map(|(k, p)| (k.clone(), p.scale(c))).collect()
    }
    fn map_scalars(&self, a: &Terms, f: &dyn Fn(&Poly) -> Poly) -> Terms {
        a.iter().map(|(k, p)| (k.clone(), f(p))).filter(|(_, p)| !p.is_zero()).collect()
    }
    fn smul(&self, c: &Poly, a: &Terms) -> Terms {
        self.map_scalars(a, &|p| c.mul(p, &self.ctx))
    }
    fn d_raw(&self, a: &Terms) -> Terms {
        let mut m = Terms::new();
        m.insert(vec![Default::default(); 2], Poly::one());
        if let Some(t) = &self.twist {
            m = self.add(&m, t);
        }
        gerstenhaber_raw(&m, a, &self.ctx)
    }
    fn bracket_raw(&self, a: &Terms, b: &Terms) -> Terms {
        gerstenhaber_raw(a, b, &self.ctx)
    }
    fn truncate(&self, a: &Terms) -> Terms {
        polydiff::truncate_terms(a, &self.ctx)
    }
    fn degree(&self, a: &Terms) -> Result<Option<i32>> {
        polydiff::PolyDiffOp { ctx: self.ctx.clone(), terms: a.clone() }.degree()
    }
    fn basis_order(&self, b: &(Slots, Mono)) -> i64 {
        b.1.s.m_order()
    }
    fn basis_degree(&self, b: &(Slots, Mono)) -> i32 {
        b.0.len() as i32 - 1 + b.1.s.degree(&self.ctx)
    }
    fn basis_elem(&self, b: &(Slots, Mono)) -> Terms {
        let mut t = Terms::new();
        t.insert(b.0.clone(), Poly::term(b.1, Q::one()));
        t
    }
    fn expand(&self, a: &Terms) -> Vec<((Slots, Mono), Q)> {
        a.iter().flat_map(|(k, p)| p.iter().map(move |(m, c)| ((k.clone(), *m), c.clone()))).collect()
    }
    fn show(&self, a: &Terms) -> String {
        polydiff::PolyDiffOp { ctx: self.ctx.clone(), terms: a.clone() }.text()
    }
}

// ---------------------------------------------------------------- Omega

/// s^-1 Omega with differential -d (or zero) and bracket [,]_omega (or zero).
#[derive(Clone, Debug)]
pub struct OmegaDgla {
    pub ctx: Ctx,
    pub pair: Option<SymplecticPair>,
    pub minus_d: bool,
}

impl OmegaDgla {
    pub fn new(ctx: &Ctx, pair: Option<&SymplecticPair>, minus_d: bool) -> Self {
        OmegaDgla { ctx: ctx.clone(), pair: pair.cloned(), minus_d }
    }
}

impl Dgla for OmegaDgla {
    type Elem = Grass;
    type Basis = (u16, Mono);

    fn ctx(&self) -> &Ctx {
        &self.ctx
    }
    fn tag(&self) -> String {
        let d = if self.minus_d { "-d" } else { "0" };
        let b = if self.pair.is_some() { "[,]_omega" } else { "0" };
        format!("Omega({d}, {b})")
    }
    fn zero(&self) -> Grass {
        Grass::zero()
    }
    fn add(&self, a: &Grass, b: &Grass) -> Grass {
        a.add(b)
    }
    fn scale(&self, a: &Grass, c: &Q) -> Grass {
        a.scale(c)
    }
    fn map_scalars(&self, a: &Grass, f: &dyn Fn(&Poly) -> Poly) -> Grass {
        a.map_polys(|_, p| f(p))
    }
    fn smul(&self, c: &Poly, a: &Grass) -> Grass {
        a.smul(c, &self.ctx)
    }
    fn d_raw(&self, a: &Grass) -> Grass {
        if self.minus_d {
            crate::forms::de_rham_raw(a, &self.ctx).neg()
        } else {
            Grass::zero()
        }
    }
    fn bracket_raw(&self, a: &Grass, b: &Grass) -> Grass {
        match &self.pair {
            Some(p) => omega_bracket_raw(a, b, &p.alpha, &self.ctx),
            None => Grass::zero(),
        }
    }
    fn truncate(&self, a: &Grass) -> Grass {
        truncate_form(a, &self.ctx)
    }
    fn degree(&self, a: &Grass) -> Result<Option<i32>> {
        Ok(a.degree(&self.ctx)?.map(|d| d - 1))
    }
    /// Order of eps^q c, the F_k L_Omega filtration.
    fn basis_order(&self, b: &(u16, Mono)) -> i64 {
        let q = b.0.count_ones() as i32;
        (b.1.s.eps + q).max(0) as i64 + b.1.s.p.iter().map(|&k| k as i64).sum::<i64>()
    }
    fn basis_weight(&self, b: &(u16, Mono)) -> i64 {
        form_weight(b.0.count_ones(), &b.1)
    }
    fn basis_degree(&self, b: &(u16, Mono)) -> i32 {
        b.0.count_ones() as i32 - 1 + b.1.s.degree(&self.ctx)
    }
    fn basis_elem(&self, b: &(u16, Mono)) -> Grass {
        grass_basis(b)
    }
    fn expand(&self, a: &Grass) -> Vec<((u16, Mono), Q)> {
        grass_expand(a)
    }
    fn show(&self, a: &Grass) -> String {
        format!("s^-1({})", a.text("dx"))
    }
}

/// The truncation weight used by the Omega carriers, exposed for filtration tests.
pub fn omega_weight(q: u32, m: &Mono) -> i64 {
    form_weight(q, m)
}

// ---------------------------------------------------------------- KS, conditions, shift

fn non_laurent_terms(t: &Terms) -> bool {
    t.values().all(|p| p.iter().all(|(m, _)| m.s.eps >= 0))
}

/// Kodaira-Spencer class: the order-one part of mu, checked Hochschild-closed, then projected.
pub fn ks_class(mu: &Terms, l: &PdDgla) -> Result<Polyvector> {
    if !non_laurent_terms(mu) {
        return Err(Error::Unsupported("KS class needs a carrier without negative eps powers".into()));
    }
    let first: Terms = l.map_scalars(mu, &|p| p.filter(|m| m.s.m_order() == 1));
    let dh = l.truncate(&polydiff::hochschild_raw(&first, &l.ctx));
    let dh1 = l.map_scalars(&dh, &|p| p.filter(|m| m.s.m_order() <= 1));
    if !dh1.is_empty() {
        return Err(Error::Precondition("order-one part of mu is not Hochschild-closed".into()));
    }
    Ok(Polyvector::new(&l.ctx, hkr_project_raw(&first)))
}

/// [kappa, kappa]_S = 0.
pub fn ks_integrability(kappa: &Polyvector) -> Result<Report> {
    if let Some(d) = kappa.degree()? {
        if d != 1 {
            return Err(Error::Degree(format!("kappa has degree {d}, expected 1")));
        }
    }
    let r = truncate_pv(&schouten_raw(&kappa.g, &kappa.g, &kappa.ctx), &kappa.ctx);
    let l = PvDgla::new(&kappa.ctx, None);
    Ok(residual_report(&l, "ks-integrability", &r))
}

/// The twisted context with differential ∂^Hoch + [mu_alpha, ]_G.
pub fn twist(l: &PdDgla, mu_alpha: &Terms) -> Result<PdDgla> {
    if l.twist.is_some() {
        return Err(Error::Context("context is already twisted".into()));
    }
    if !mc_check(mu_alpha, l)?.passed() {
        return Err(Error::Precondition("mu_alpha is not a Maurer-Cartan element".into()));
    }
    if l.is_zero(mu_alpha) {
        return Ok(l.clone());
    }
    Ok(PdDgla { ctx: l.ctx.clone(), twist: Some(mu_alpha.clone()) })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Forward: mu~ (MC in the twisted context) -> mu_alpha + mu~; inverse: mu -> mu - mu_alpha.
pub fn shift(mu: &Terms, mu_alpha: &Terms, plain: &PdDgla, dir: Direction) -> Result<(Terms, Report)> {
    let twisted = PdDgla { ctx: plain.ctx.clone(), twist: Some(mu_alpha.clone()) };
    let (src, dst): (&PdDgla, &PdDgla) = match dir {
        Direction::Forward => (&twisted, plain),
        Direction::Inverse => (plain, &twisted),
    };
    if !mc_check(mu, src)?.passed() {
        return Err(Error::Context(format!("input is not MC in {}", src.tag())));
    }
    let out = match dir {
        Direction::Forward => plain.truncate(&plain.add(mu_alpha, mu)),
        Direction::Inverse => plain.truncate(&plain.sub(mu, mu_alpha)),
    };
    let rep = mc_check(&out, dst)?;
    Ok((out, rep))
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ConditionsReport {
    pub condition1: bool,
    pub condition2: bool,
    /// Whether setting eps = 0 in the A-infinity structure leaves the bare product.
    pub eps_zero_reduces_to_product: bool,
    pub ks_class: String,
}

pub fn conditions_check(mu: &Terms, pair: &SymplecticPair, l: &PdDgla) -> Result<ConditionsReport> {
    let ks = ks_class(mu, l)?;
    let ea = Polyvector::new(&l.ctx, pair.eps_alpha(&l.ctx).g);
    let c1 = ks == ea;
    let mut c2 = true;
    for p in mu.values() {
        if !p.at_eps_zero()?.is_zero() {
            c2 = false;
        }
    }
    let op = polydiff::PolyDiffOp::new(&l.ctx, mu.clone());
    let a0 = ainfty_from_mc(&op)?.at_eps_zero()?;
    let reduces = a0.ms.iter().all(|(n, m)| {
        if *n == 2 {
            *m == polydiff::PolyDiffOp::product(&l.ctx)
        } else {
            m.is_zero()
        }
    });
    Ok(ConditionsReport { condition1: c1, condition2: c2, eps_zero_reduces_to_product: reduces, ks_class: ks.text() })
}

/// Maurer-Cartan element with an optional certificate.
#[derive(Clone, PartialEq, Debug)]
pub struct McElement<E> {
    pub value: E,
    pub certificate: Option<Report>,
}

impl<E: Clone> McElement<E> {
    pub fn checked<L: Dgla<Elem = E>>(value: E, l: &L) -> Result<Self> {
        let rep = mc_check(&value, l)?;
        Ok(McElement { value, certificate: Some(rep) })
    }

    pub fn is_certified(&self) -> bool {
        self.certificate.as_ref().map_or(false, |r| r.passed())
    }
}
