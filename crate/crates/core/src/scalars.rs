//! Graded base ring: Laurent series in `eps` over graded parameters `e1..eg`,
//! with polynomial coefficients in `x1..xm`.
//!
//! The path variables `t` (even, degree 0) and `dt` (odd, degree 1) live in the
//! same scalar monomials so that the Omega_1 extension of every context reuses
//! the Koszul-linear operations unchanged.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub const MAX_M: usize = 8;
pub const MAX_G: usize = 4;
const DT_BIT: u8 = 1 << MAX_G;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn factorial(n: u32) -> Q {
    (1..=n as i64).fold(Q::one(), |acc, k| acc * q(k))
}

pub fn fmt_q(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TruncationCtx {
    pub m: usize,
    pub g: usize,
    pub param_degrees: Vec<i32>,
    pub n: u32,
    pub eps_floor: i32,
    pub w: usize,
}

pub type Ctx = Arc<TruncationCtx>;

impl TruncationCtx {
    pub fn new(m: usize, param_degrees: Vec<i32>, n: u32, eps_floor: i32, w: usize) -> Result<Ctx> {
        if m == 0 || m > MAX_M {
            return Err(Error::Context(format!("m must lie in 1..={MAX_M}, got {m}")));
        }
        if param_degrees.len() > MAX_G {
            return Err(Error::Context(format!("at most {MAX_G} parameters supported")));
        }
        if let Some(d) = param_degrees.iter().find(|&&d| d > 0) {
            return Err(Error::Context(format!("parameter degrees must be <= 0, got {d}")));
        }
        if n < 1 {
            return Err(Error::Context("N must be >= 1".into()));
        }
        if eps_floor > 0 {
            return Err(Error::Context("eps_floor must be <= 0".into()));
        }
        if w < 2 {
            return Err(Error::Context("W must be >= 2".into()));
        }
        Ok(Arc::new(TruncationCtx { m, g: param_degrees.len(), param_degrees, n, eps_floor, w }))
    }

    /// g = 0, eps floor -m, W = 4.
    pub fn classical(m: usize, n: u32) -> Ctx {
        Self::new(m, vec![], n, -(m as i32), 4).expect("valid classical context")
    }

    pub fn odd_mask(&self) -> u8 {
        let mut b = 0u8;
        for (a, d) in self.param_degrees.iter().enumerate() {
            if d.rem_euclid(2) == 1 {
                b |= 1 << a;
            }
        }
        b
    }

    pub fn with_n(&self, n: u32) -> Result<Ctx> {
        Self::new(self.m, self.param_degrees.clone(), n, self.eps_floor, self.w)
    }

    pub fn same(a: &Ctx, b: &Ctx) -> bool {
        Arc::ptr_eq(a, b) || **a == **b
    }

    pub fn check_same(a: &Ctx, b: &Ctx) -> Result<()> {
        if Self::same(a, b) {
            Ok(())
        } else {
            Err(Error::Context("operands live in different truncation contexts".into()))
        }
    }
}

/// Scalar part of a monomial: eps^eps * e1^p1 ... * t^t * dt.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct SMono {
    pub eps: i32,
    pub p: [u8; MAX_G],
    pub t: u8,
    pub dt: bool,
}

impl SMono {
    pub const ONE: SMono = SMono { eps: 0, p: [0; MAX_G], t: 0, dt: false };

    pub fn eps(k: i32) -> Self {
        SMono { eps: k, ..Self::ONE }
    }

    pub fn param(a: usize) -> Self {
        let mut s = Self::ONE;
        s.p[a] = 1;
        s
    }

    pub fn degree(&self, ctx: &TruncationCtx) -> i32 {
        let mut d = self.dt as i32;
        for a in 0..ctx.g {
            d += self.p[a] as i32 * ctx.param_degrees[a];
        }
        d
    }

    pub fn parity(&self, ctx: &TruncationCtx) -> bool {
        self.degree(ctx).rem_euclid(2) == 1
    }

    fn odd_bits(&self, odd: u8) -> u8 {
        let mut b = 0u8;
        for a in 0..MAX_G {
            if odd & (1 << a) != 0 && self.p[a] > 0 {
                b |= 1 << a;
            }
        }
        if self.dt {
            b |= DT_BIT;
        }
        b
    }

    /// k0^+ + k1 + ... + kg.
    pub fn m_order(&self) -> i64 {
        self.eps.max(0) as i64 + self.p.iter().map(|&k| k as i64).sum::<i64>()
    }

    /// Graded product; `None` when an odd generator squares.
    pub fn mul(&self, o: &SMono, ctx: &TruncationCtx) -> Option<(bool, SMono)> {
        let odd = ctx.odd_mask();
        let a = self.odd_bits(odd);
        let b = o.odd_bits(odd);
        if a & b != 0 {
            return None;
        }
        let mut flips = 0u32;
        for j in 0..8 {
            if b & (1 << j) != 0 {
                flips += (a >> (j + 1)).count_ones();
            }
        }
        let mut r = *self;
        r.eps += o.eps;
        for i in 0..MAX_G {
            r.p[i] += o.p[i];
        }
        r.t += o.t;
        r.dt = self.dt || o.dt;
        Some((flips % 2 == 1, r))
    }

    pub fn is_one(&self) -> bool {
        *self == Self::ONE
    }
}

/// Exponent vector in x1..xm.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct XMono(pub [u8; MAX_M]);

impl XMono {
    pub const ONE: XMono = XMono([0; MAX_M]);

    pub fn var(i: usize) -> Self {
        let mut e = [0; MAX_M];
        e[i] = 1;
        XMono(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&k| k as u32).sum()
    }

    pub fn mul(&self, o: &XMono) -> XMono {
        let mut e = self.0;
        for i in 0..MAX_M {
            e[i] += o.0[i];
        }
        XMono(e)
    }

    /// d^alpha x^self = factor * x^(self - alpha).
    pub fn deriv_multi(&self, alpha: &XMono) -> Option<(u64, XMono)> {
        let mut f = 1u64;
        let mut e = self.0;
        for i in 0..MAX_M {
            let (a, k) = (self.0[i], alpha.0[i]);
            if k > a {
                return None;
            }
            for j in 0..k {
                f *= (a - j) as u64;
            }
            e[i] = a - k;
        }
        Some((f, XMono(e)))
    }

    /// Indices with multiplicity, 0-based.
    pub fn indices(&self) -> Vec<usize> {
        let mut v = vec![];
        for i in 0..MAX_M {
            for _ in 0..self.0[i] {
                v.push(i);
            }
        }
        v
    }

    pub fn from_indices(ix: &[usize]) -> XMono {
        let mut e = [0; MAX_M];
        for &i in ix {
            e[i] += 1;
        }
        XMono(e)
    }

    /// alpha! = prod alpha_i!
    pub fn factorial(&self) -> Q {
        self.0.iter().fold(Q::one(), |acc, &k| acc * factorial(k as u32))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Mono {
    pub s: SMono,
    pub x: XMono,
}

impl Mono {
    pub const ONE: Mono = Mono { s: SMono::ONE, x: XMono::ONE };

    pub fn text(&self) -> String {
        let mut f: Vec<String> = vec![];
        let pw = |name: String, k: i64| if k == 1 { name } else { format!("{name}^{k}") };
        if self.s.eps != 0 {
            f.push(pw("eps".into(), self.s.eps as i64));
        }
        for a in 0..MAX_G {
            if self.s.p[a] > 0 {
                f.push(pw(format!("e{}", a + 1), self.s.p[a] as i64));
            }
        }
        if self.s.t > 0 {
            f.push(pw("t".into(), self.s.t as i64));
        }
        if self.s.dt {
            f.push("dt".into());
        }
        for i in 0..MAX_M {
            if self.x.0[i] > 0 {
                f.push(pw(format!("x{}", i + 1), self.x.0[i] as i64));
            }
        }
        f.join(" * ")
    }
}

/// Context-free sparse series; the workhorse behind every container.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly(pub BTreeMap<Mono, Q>);

impl Poly {
    pub fn zero() -> Self {
        Poly(BTreeMap::new())
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Self::term(Mono::ONE, c)
    }

    pub fn term(m: Mono, c: Q) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn smono(s: SMono) -> Self {
        Self::term(Mono { s, x: XMono::ONE }, Q::one())
    }

    pub fn x(i: usize) -> Self {
        Self::term(Mono { s: SMono::ONE, x: XMono::var(i) }, Q::one())
    }

    pub fn eps() -> Self {
        Self::smono(SMono::eps(1))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mono, &Q)> {
        self.0.iter()
    }

    pub fn add_term(&mut self, m: Mono, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.0.entry(m).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(&m);
        }
    }

    pub fn add_assign(&mut self, o: &Poly) {
        for (m, c) in &o.0 {
            self.add_term(*m, c.clone());
        }
    }

    pub fn sub_assign(&mut self, o: &Poly) {
        for (m, c) in &o.0 {
            self.add_term(*m, -c.clone());
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        r.add_assign(o);
        r
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        r.sub_assign(o);
        r
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|(m, c)| (*m, -c.clone())).collect())
    }

    pub fn scale(&self, k: &Q) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|(m, c)| (*m, c * k)).collect())
    }

    /// Graded-commutative product without truncation.
    pub fn mul(&self, o: &Poly, ctx: &TruncationCtx) -> Poly {
        let mut r = Poly::zero();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &o.0 {
                if let Some((neg, s)) = m1.s.mul(&m2.s, ctx) {
                    let c = c1 * c2;
                    r.add_term(Mono { s, x: m1.x.mul(&m2.x) }, if neg { -c } else { c });
                }
            }
        }
        r
    }

    /// Left multiplication by a scalar monomial.
    pub fn smul(&self, s: &SMono, ctx: &TruncationCtx) -> Poly {
        Poly::smono(*s).mul(self, ctx)
    }

    pub fn deriv(&self, i: usize) -> Poly {
        self.deriv_multi(&XMono::var(i))
    }

    pub fn deriv_multi(&self, alpha: &XMono) -> Poly {
        let mut r = Poly::zero();
        for (m, c) in &self.0 {
            if let Some((f, x)) = m.x.deriv_multi(alpha) {
                r.add_term(Mono { s: m.s, x }, c * q(f as i64));
            }
        }
        r
    }

    /// Drop monomials of m-order > N or eps-exponent < eps_floor.
    pub fn truncate(&self, ctx: &TruncationCtx) -> Poly {
        Poly(
            self.0
                .iter()
                .filter(|(m, _)| m.s.m_order() <= ctx.n as i64 && m.s.eps >= ctx.eps_floor)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        )
    }

    pub fn filter(&self, f: impl Fn(&Mono) -> bool) -> Poly {
        Poly(self.0.iter().filter(|(m, _)| f(m)).map(|(m, c)| (*m, c.clone())).collect())
    }

    pub fn m_order(&self) -> Option<i64> {
        self.0.keys().map(|m| m.s.m_order()).min()
    }

    /// (-1)^{parity} applied termwise.
    pub fn parity_twist(&self, ctx: &TruncationCtx) -> Poly {
        Poly(
            self.0
                .iter()
                .map(|(m, c)| (*m, if m.s.parity(ctx) { -c.clone() } else { c.clone() }))
                .collect(),
        )
    }

    pub fn parity_split(&self, ctx: &TruncationCtx) -> (Poly, Poly) {
        (self.filter(|m| !m.s.parity(ctx)), self.filter(|m| m.s.parity(ctx)))
    }

    /// Common scalar degree; `Ok(None)` for zero.
    pub fn degree(&self, ctx: &TruncationCtx) -> Result<Option<i32>> {
        let mut d = None;
        for m in self.0.keys() {
            let k = m.s.degree(ctx);
            match d {
                None => d = Some(k),
                Some(e) if e != k => {
                    return Err(Error::Degree(format!("inhomogeneous scalar: degrees {e} and {k}")))
                }
                _ => {}
            }
        }
        Ok(d)
    }

    /// d_t as an odd derivation from the left: t^j -> j t^(j-1) dt.
    pub fn d_t(&self, ctx: &TruncationCtx) -> Poly {
        let mut r = Poly::zero();
        for (m, c) in &self.0 {
            if m.s.t == 0 || m.s.dt {
                continue;
            }
            let mut pre = m.s;
            pre.t = 0;
            let mut s = m.s;
            s.t -= 1;
            s.dt = true;
            let c = c * q(m.s.t as i64);
            r.add_term(Mono { s, x: m.x }, if pre.parity(ctx) { -c } else { c });
        }
        r
    }

    /// Substitute t = v, dt = 0.
    pub fn eval_t(&self, v: &Q) -> Poly {
        let mut r = Poly::zero();
        for (m, c) in &self.0 {
            if m.s.dt {
                continue;
            }
            let mut s = m.s;
            let k = s.t;
            s.t = 0;
            let f = (0..k).fold(Q::one(), |a, _| a * v);
            r.add_term(Mono { s, x: m.x }, c * f);
        }
        r
    }

    /// Substitute eps = 0 (terms with eps > 0 vanish).
    pub fn at_eps_zero(&self) -> Result<Poly> {
        if self.0.keys().any(|m| m.s.eps < 0) {
            return Err(Error::Argument("cannot set eps = 0 in a Laurent series".into()));
        }
        Ok(self.filter(|m| m.s.eps == 0))
    }

    pub fn has_t(&self) -> bool {
        self.0.keys().any(|m| m.s.t > 0 || m.s.dt)
    }

    pub fn text(&self) -> String {
        if self.0.is_empty() {
            return "0".into();
        }
        self.0
            .iter()
            .map(|(m, c)| {
                let f = m.text();
                if f.is_empty() {
                    fmt_q(c)
                } else {
                    format!("{} * {}", fmt_q(c), f)
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// A series bound to its truncation context.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BaseSeries {
    pub ctx: Ctx,
    pub poly: Poly,
}

impl BaseSeries {
    pub fn new(ctx: &Ctx, poly: Poly) -> Self {
        let poly = poly.truncate(ctx);
        BaseSeries { ctx: ctx.clone(), poly }
    }

    pub fn zero(ctx: &Ctx) -> Self {
        BaseSeries { ctx: ctx.clone(), poly: Poly::zero() }
    }

    pub fn one(ctx: &Ctx) -> Self {
        Self::new(ctx, Poly::one())
    }

    pub fn eps(ctx: &Ctx, k: i32) -> Self {
        Self::new(ctx, Poly::smono(SMono::eps(k)))
    }

    pub fn param(ctx: &Ctx, a: usize) -> Result<Self> {
        if a >= ctx.g {
            return Err(Error::Argument(format!("parameter e{} out of range", a + 1)));
        }
        Ok(Self::new(ctx, Poly::smono(SMono::param(a))))
    }

    pub fn x(ctx: &Ctx, i: usize) -> Result<Self> {
        if i >= ctx.m {
            return Err(Error::Argument(format!("x{} out of range", i + 1)));
        }
        Ok(Self::new(ctx, Poly::x(i)))
    }

    pub fn add(&self, o: &BaseSeries) -> Result<BaseSeries> {
        TruncationCtx::check_same(&self.ctx, &o.ctx)?;
        Ok(Self::new(&self.ctx, self.poly.add(&o.poly)))
    }

    pub fn sub(&self, o: &BaseSeries) -> Result<BaseSeries> {
        TruncationCtx::check_same(&self.ctx, &o.ctx)?;
        Ok(Self::new(&self.ctx, self.poly.sub(&o.poly)))
    }

    pub fn scale(&self, k: &Q) -> BaseSeries {
        Self::new(&self.ctx, self.poly.scale(k))
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn degree(&self) -> Result<Option<i32>> {
        self.poly.degree(&self.ctx)
    }
}

impl fmt::Display for BaseSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.poly.text())
    }
}

pub fn base_mul(a: &BaseSeries, b: &BaseSeries) -> Result<BaseSeries> {
    TruncationCtx::check_same(&a.ctx, &b.ctx)?;
    Ok(BaseSeries::new(&a.ctx, a.poly.mul(&b.poly, &a.ctx)))
}

/// Product over inversions (i < j, perm[i] > perm[j]) of (-1)^{deg_i deg_j};
/// `perm[i]` is the original slot placed at position i.
pub fn koszul_sign(perm: &[usize], degs: &[i32]) -> Result<i32> {
    if perm.len() != degs.len() {
        return Err(Error::Argument("permutation and degree list differ in length".into()));
    }
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return Err(Error::Argument("not a permutation".into()));
        }
        seen[p] = true;
    }
    let mut s = 1;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] && (degs[perm[i]] * degs[perm[j]]).rem_euclid(2) == 1 {
                s = -s;
            }
        }
    }
    Ok(s)
}

/// Minimal m-order over retained monomials; `None` stands for infinity.
pub fn m_order(a: &BaseSeries) -> Option<i64> {
    a.poly.m_order()
}

pub fn is_neg(c: &Q) -> bool {
    c.is_negative()
}
