//! Polydifferential operators with polynomial coefficients.
//!
//! A term `c * D[a0] ⊗ ... ⊗ D[ak]` acts by (a_0, ..., a_k) -> c * ∂^{a0} a_0 ... ∂^{ak} a_k.
//! The degree of such a term is k + (scalar degree of c).

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grassmann::{mask_indices, Grass};
use crate::polyvectors::Polyvector;
use crate::scalars::{factorial, fmt_q, q, Ctx, Mono, Poly, SMono, TruncationCtx, XMono, Q, MAX_M};

pub type Slots = Vec<XMono>;
pub type Terms = BTreeMap<Slots, Poly>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyDiffOp {
    pub ctx: Ctx,
    pub terms: Terms,
}

fn add_into(t: &mut Terms, k: Slots, p: &Poly) {
    if p.is_zero() {
        return;
    }
    let e = t.entry(k.clone()).or_default();
    e.add_assign(p);
    if e.is_zero() {
        t.remove(&k);
    }
}

fn merge(a: &Terms, b: &Terms, sign: bool) -> Terms {
    let mut r = a.clone();
    for (k, p) in b {
        add_into(&mut r, k.clone(), &if sign { p.neg() } else { p.clone() });
    }
    r
}

/// All ways to write alpha = g_0 + ... + g_{r-1}, with multinomial weight alpha!/prod g_j!.
pub fn distributions(alpha: &XMono, r: usize) -> Vec<(Q, Vec<XMono>)> {
    let mut out = vec![(Q::one(), vec![XMono::ONE; r])];
    for v in 0..MAX_M {
        let a = alpha.0[v];
        if a == 0 {
            continue;
        }
        let mut next = vec![];
        for (w, parts) in &out {
            for comp in compositions(a, r) {
                let mut ps = parts.clone();
                let mut denom = Q::one();
                for (j, &c) in comp.iter().enumerate() {
                    ps[j].0[v] = c;
                    denom *= factorial(c as u32);
                }
                next.push((w * factorial(a as u32) / denom, ps));
            }
        }
        out = next;
    }
    out
}

fn compositions(n: u8, r: usize) -> Vec<Vec<u8>> {
    if r == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    if r == 1 {
        return vec![vec![n]];
    }
    let mut out = vec![];
    for first in 0..=n {
        for mut rest in compositions(n - first, r - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn non_laurent(p: &Poly) -> bool {
    p.iter().all(|(m, _)| m.s.eps >= 0)
}

/// Pre-Lie insertion A ∘ B = sum_i (-1)^{i kB} A(.., B(a_i, ..), ..), with the Koszul
/// sign (-1)^{|c_B| kA} for moving B's scalar past A. Term pairs whose scalar order
/// already exceeds N are skipped.
pub fn pre_lie(a: &Terms, b: &Terms, ctx: &TruncationCtx) -> Terms {
    let mut r = Terms::new();
    for (sa, ca) in a {
        if sa.is_empty() {
            continue;
        }
        let ka = sa.len() as i64 - 1;
        let oa = ca.m_order().unwrap_or(0);
        for (sb, cb) in b {
            if non_laurent(ca) && non_laurent(cb) && oa + cb.m_order().unwrap_or(0) > ctx.n as i64 {
                continue;
            }
            let kb = sb.len() as i64 - 1;
            let x_free = cb.iter().all(|(m, _)| m.x.degree() == 0);
            let (even, odd) = cb.parity_split(ctx);
            for (piece, par) in [(even, 0i64), (odd, 1)] {
                if piece.is_zero() {
                    continue;
                }
                for i in 0..sa.len() {
                    let neg = (i as i64 * kb + par * ka).rem_euclid(2) == 1;
                    for (w, parts) in distributions(&sa[i], sb.len() + 1) {
                        if x_free && parts[0] != XMono::ONE {
                            continue;
                        }
                        let dcb = piece.deriv_multi(&parts[0]);
                        if dcb.is_zero() {
                            continue;
                        }
                        let mut c = ca.mul(&dcb, ctx).truncate(ctx).scale(&w);
                        if neg {
                            c = c.neg();
                        }
                        let mut slots = sa[..i].to_vec();
                        for (j, bj) in sb.iter().enumerate() {
                            slots.push(bj.mul(&parts[j + 1]));
                        }
                        slots.extend_from_slice(&sa[i + 1..]);
                        add_into(&mut r, slots, &c);
                    }
                }
            }
        }
    }
    r
}

/// Split by degree parity (arity - 1 + scalar parity).
pub fn degree_split(t: &Terms, ctx: &TruncationCtx) -> (Terms, Terms) {
    let mut even = Terms::new();
    let mut odd = Terms::new();
    for (k, p) in t {
        let (pe, po) = p.parity_split(ctx);
        let arity_odd = k.len() % 2 == 0;
        let (to_even, to_odd) = if arity_odd { (po, pe) } else { (pe, po) };
        add_into(&mut even, k.clone(), &to_even);
        add_into(&mut odd, k.clone(), &to_odd);
    }
    (even, odd)
}

/// [A, B]_G = A∘B - (-1)^{|A||B|} B∘A, applied to homogeneous pieces.
pub fn gerstenhaber_raw(a: &Terms, b: &Terms, ctx: &TruncationCtx) -> Terms {
    let (ae, ao) = degree_split(a, ctx);
    let (be, bo) = degree_split(b, ctx);
    let mut r = Terms::new();
    for (pa, da) in [(&ae, 0), (&ao, 1)] {
        if pa.is_empty() {
            continue;
        }
        for (pb, db) in [(&be, 0), (&bo, 1)] {
            if pb.is_empty() {
                continue;
            }
            let ab = pre_lie(pa, pb, ctx);
            let ba = pre_lie(pb, pa, ctx);
            r = merge(&r, &ab, false);
            r = merge(&r, &ba, da * db == 0);
        }
    }
    r
}

pub fn truncate_terms(t: &Terms, ctx: &TruncationCtx) -> Terms {
    let mut r = Terms::new();
    for (k, p) in t {
        add_into(&mut r, k.clone(), &p.truncate(ctx));
    }
    r
}

fn product_terms() -> Terms {
    let mut t = Terms::new();
    t.insert(vec![XMono::ONE, XMono::ONE], Poly::one());
    t
}

impl PolyDiffOp {
    pub fn new(ctx: &Ctx, terms: Terms) -> Self {
        PolyDiffOp { terms: truncate_terms(&terms, ctx), ctx: ctx.clone() }
    }

    pub fn zero(ctx: &Ctx) -> Self {
        PolyDiffOp { ctx: ctx.clone(), terms: Terms::new() }
    }

    pub fn term(ctx: &Ctx, c: Poly, slots: Slots) -> Self {
        let mut t = Terms::new();
        add_into(&mut t, slots, &c);
        Self::new(ctx, t)
    }

    /// The commutative product a0 ⊗ a1 -> a0 a1.
    pub fn product(ctx: &Ctx) -> Self {
        Self::new(ctx, product_terms())
    }

    /// The vector field ∂_i (0-based).
    pub fn partial(ctx: &Ctx, i: usize) -> Result<Self> {
        if i >= ctx.m {
            return Err(Error::Argument(format!("D[{}] out of range", i + 1)));
        }
        Ok(Self::term(ctx, Poly::one(), vec![XMono::var(i)]))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &PolyDiffOp) -> Result<PolyDiffOp> {
        TruncationCtx::check_same(&self.ctx, &o.ctx)?;
        Ok(Self::new(&self.ctx, merge(&self.terms, &o.terms, false)))
    }

    pub fn sub(&self, o: &PolyDiffOp) -> Result<PolyDiffOp> {
        TruncationCtx::check_same(&self.ctx, &o.ctx)?;
        Ok(Self::new(&self.ctx, merge(&self.terms, &o.terms, true)))
    }

    pub fn neg(&self) -> PolyDiffOp {
        PolyDiffOp { ctx: self.ctx.clone(), terms: self.terms.iter().map(|(k, p)| (k.clone(), p.neg())).collect() }
    }

    pub fn scale(&self, c: &Q) -> PolyDiffOp {
        Self::new(&self.ctx, self.terms.iter().map(|(k, p)| (k.clone(), p.scale(c))).collect())
    }

    /// Left multiplication by a scalar.
    pub fn smul(&self, c: &Poly) -> PolyDiffOp {
        Self::new(&self.ctx, self.terms.iter().map(|(k, p)| (k.clone(), c.mul(p, &self.ctx))).collect())
    }

    /// Degree k + scalar degree, if homogeneous.
    pub fn degree(&self) -> Result<Option<i32>> {
        let mut d = None;
        for (k, p) in &self.terms {
            for (m, _) in p.iter() {
                let e = k.len() as i32 - 1 + m.s.degree(&self.ctx);
                match d {
                    None => d = Some(e),
                    Some(x) if x != e => {
                        return Err(Error::Degree(format!("inhomogeneous operator: degrees {x} and {e}")))
                    }
                    _ => {}
                }
            }
        }
        Ok(d)
    }

    pub fn arities(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.terms.keys().map(|k| k.len()).collect();
        v.dedup();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn of_arity(&self, n: usize) -> PolyDiffOp {
        PolyDiffOp {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().filter(|(k, _)| k.len() == n).map(|(k, p)| (k.clone(), p.clone())).collect(),
        }
    }

    /// Largest slot order appearing in any term.
    pub fn max_slot_order(&self) -> u32 {
        self.terms.keys().flat_map(|k| k.iter().map(|a| a.degree())).max().unwrap_or(0)
    }

    pub fn m_order(&self) -> Option<i64> {
        self.terms.values().filter_map(|p| p.m_order()).min()
    }

    /// Apply the scalar map f to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&Poly) -> Poly) -> PolyDiffOp {
        Self::new(&self.ctx, self.terms.iter().map(|(k, p)| (k.clone(), f(p))).collect())
    }

    /// Evaluate on arguments with even scalar parts; terms of other arities are ignored.
    pub fn eval(&self, args: &[Poly]) -> Poly {
        let mut r = Poly::zero();
        for (k, c) in &self.terms {
            if k.len() != args.len() {
                continue;
            }
            r.add_assign(&eval_term(k, c, args, &self.ctx));
        }
        r.truncate(&self.ctx)
    }

    pub fn text(&self) -> String {
        terms_text(&self.terms)
    }
}

pub fn terms_text(t: &Terms) -> String {
    if t.is_empty() {
        return "0".into();
    }
    let mut out = vec![];
    for (k, p) in t {
        for (m, c) in p.iter() {
            let mut f = vec![fmt_q(c)];
            let mt = m.text();
            if !mt.is_empty() {
                f.push(mt);
            }
            f.push(slots_text(k));
            out.push(f.join(" * "));
        }
    }
    out.join(" + ")
}

pub fn slots_text(k: &Slots) -> String {
    if k.is_empty() {
        return "D()".into();
    }
    k.iter()
        .map(|a| format!("D[{}]", a.indices().iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")))
        .collect::<Vec<_>>()
        .join("⊗")
}

fn eval_term(k: &Slots, c: &Poly, args: &[Poly], ctx: &TruncationCtx) -> Poly {
    let mut v = c.clone();
    for (a, arg) in k.iter().zip(args) {
        let d = arg.deriv_multi(a);
        if d.is_zero() {
            return Poly::zero();
        }
        v = v.mul(&d, ctx);
    }
    v
}

impl fmt::Display for PolyDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

pub fn gerstenhaber(p: &PolyDiffOp, q: &PolyDiffOp) -> Result<PolyDiffOp> {
    TruncationCtx::check_same(&p.ctx, &q.ctx)?;
    p.degree()?;
    q.degree()?;
    Ok(PolyDiffOp::new(&p.ctx, gerstenhaber_raw(&p.terms, &q.terms, &p.ctx)))
}

pub fn hochschild_raw(p: &Terms, ctx: &TruncationCtx) -> Terms {
    gerstenhaber_raw(&product_terms(), p, ctx)
}

pub fn hochschild_d(p: &PolyDiffOp) -> PolyDiffOp {
    PolyDiffOp::new(&p.ctx, hochschild_raw(&p.terms, &p.ctx))
}

pub fn cup(p: &PolyDiffOp, o: &PolyDiffOp) -> Result<PolyDiffOp> {
    TruncationCtx::check_same(&p.ctx, &o.ctx)?;
    let mut t = Terms::new();
    for (k1, c1) in &p.terms {
        for (k2, c2) in &o.terms {
            let mut k = k1.clone();
            k.extend_from_slice(k2);
            add_into(&mut t, k, &c1.mul(c2, &p.ctx));
        }
    }
    Ok(PolyDiffOp::new(&p.ctx, t))
}

fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    if n == 0 {
        return vec![(vec![], false)];
    }
    let mut out = vec![];
    for (p, s) in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut v = p.clone();
            v.insert(pos, n - 1);
            let flips = (p.len() - pos) % 2 == 1;
            out.push((v, s ^ flips));
        }
    }
    out
}

/// c θ_{i0}...θ_{ik} -> sum_σ sgn(σ) c ∂_{iσ(k)} ⊗ ... ⊗ ∂_{iσ(0)}.
pub fn hkr_embed_raw(v: &Grass) -> Terms {
    let mut t = Terms::new();
    for (mask, c) in &v.0 {
        let ix = mask_indices(*mask);
        for (perm, neg) in permutations(ix.len()) {
            let slots: Slots = perm.iter().rev().map(|&j| XMono::var(ix[j])).collect();
            add_into(&mut t, slots, &if neg { c.neg() } else { c.clone() });
        }
    }
    t
}

pub fn hkr_embed(v: &Polyvector) -> Result<PolyDiffOp> {
    v.degree()?;
    Ok(PolyDiffOp::new(&v.ctx, hkr_embed_raw(&v.g)))
}

/// First-order antisymmetrisation, normalised so that project ∘ embed = id.
pub fn hkr_project_raw(p: &Terms) -> Grass {
    let mut g = Grass::zero();
    for (k, c) in p {
        if k.iter().any(|a| a.degree() != 1) {
            continue;
        }
        let ix: Vec<usize> = k.iter().map(|a| a.indices()[0]).collect();
        let mut sorted = ix.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        let mut inv = 0;
        for a in 0..ix.len() {
            for b in a + 1..ix.len() {
                if ix[a] > ix[b] {
                    inv += 1;
                }
            }
        }
        let n = ix.len();
        let kk = n as i64 - 1;
        let rev = (kk * (kk + 1) / 2) % 2 == 1;
        let w = Q::one() / factorial(n as u32);
        let w = if (inv % 2 == 1) ^ (rev && n > 0) { -w } else { w };
        g.add_term(sorted.iter().fold(0u16, |m, &i| m | (1 << i)), &c.scale(&w));
    }
    g
}

pub fn hkr_project(p: &PolyDiffOp) -> Polyvector {
    Polyvector::new(&p.ctx, hkr_project_raw(&p.terms))
}

/// mu = sum_{n>=1} (-eps)^n/n! (alpha^{ij} ∂_i ⊗ ∂_j)^n for constant alpha; the sign
/// makes hkr_project of the order-eps part equal to alpha.
pub fn moyal_star(alpha: &[Vec<Q>], ctx: &Ctx) -> Result<PolyDiffOp> {
    if alpha.len() != ctx.m {
        return Err(Error::Argument("alpha dimension differs from the context".into()));
    }
    let mut power: BTreeMap<(XMono, XMono), Q> = BTreeMap::new();
    power.insert((XMono::ONE, XMono::ONE), Q::one());
    let mut t = Terms::new();
    for n in 1..=ctx.n {
        let mut next: BTreeMap<(XMono, XMono), Q> = BTreeMap::new();
        for ((l, r), c) in &power {
            for i in 0..ctx.m {
                for j in 0..ctx.m {
                    if alpha[i][j].is_zero() {
                        continue;
                    }
                    let key = (l.mul(&XMono::var(i)), r.mul(&XMono::var(j)));
                    let e = next.entry(key).or_insert_with(Q::zero);
                    *e += c * &alpha[i][j];
                }
            }
        }
        next.retain(|_, c| !c.is_zero());
        power = next;
        let sign = if n % 2 == 1 { -Q::one() } else { Q::one() };
        let w = sign / factorial(n);
        for ((l, r), c) in &power {
            let coef = Poly::smono(SMono::eps(n as i32)).scale(&(c * &w));
            add_into(&mut t, vec![*l, *r], &coef);
        }
    }
    Ok(PolyDiffOp::new(ctx, t))
}

/// T_xi(a) = a + sum_k xi^k(a)/k! for an arity-one xi of positive order.
pub fn t_xi(xi: &PolyDiffOp, a: &Poly) -> Result<Poly> {
    if xi.terms.keys().any(|k| k.len() != 1) {
        return Err(Error::Argument("T_xi needs an arity-one operator".into()));
    }
    if xi.m_order().map_or(false, |o| o < 1) {
        return Err(Error::Argument("T_xi needs xi of m-order >= 1".into()));
    }
    let ctx = &xi.ctx;
    let mut r = a.truncate(ctx);
    let mut cur = r.clone();
    let mut k = 1u32;
    loop {
        cur = xi.eval(&[cur]).scale(&(Q::one() / q(k as i64)));
        if cur.is_zero() {
            break;
        }
        r.add_assign(&cur);
        k += 1;
        if k > ctx.n + 2 + 64 {
            return Err(Error::Contract("T_xi series does not terminate".into()));
        }
    }
    Ok(r.truncate(ctx))
}

/// The multiplications m_n of the A-infinity structure attached to an MC element.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AInftyStructure {
    pub ctx: Ctx,
    pub ms: BTreeMap<usize, PolyDiffOp>,
}

impl AInftyStructure {
    pub fn arity_cutoff(ctx: &TruncationCtx) -> usize {
        let dmax = ctx.param_degrees.iter().map(|d| -d).max().unwrap_or(0).max(1);
        2 + ctx.n as usize * dmax as usize
    }

    /// Sum of all m_n as one operator.
    pub fn total(&self) -> PolyDiffOp {
        let mut t = Terms::new();
        for op in self.ms.values() {
            t = merge(&t, &op.terms, false);
        }
        PolyDiffOp::new(&self.ctx, t)
    }

    /// (arity, operator term, coefficient) rows.
    pub fn table(&self) -> Vec<(usize, String, String)> {
        let mut rows = vec![];
        for (n, op) in &self.ms {
            for (k, p) in &op.terms {
                for (m, c) in p.iter() {
                    let key = [m.text(), slots_text(k)].into_iter().filter(|s| !s.is_empty()).collect::<Vec<_>>();
                    rows.push((*n, key.join(" * "), fmt_q(c)));
                }
            }
        }
        rows
    }

    /// Set eps = 0 in every m_n.
    pub fn at_eps_zero(&self) -> Result<AInftyStructure> {
        let mut ms = BTreeMap::new();
        for (n, op) in &self.ms {
            let mut t = Terms::new();
            for (k, p) in &op.terms {
                add_into(&mut t, k.clone(), &p.at_eps_zero()?);
            }
            ms.insert(*n, PolyDiffOp::new(&self.ctx, t));
        }
        Ok(AInftyStructure { ctx: self.ctx.clone(), ms })
    }
}

pub fn ainfty_from_mc(mu: &PolyDiffOp) -> Result<AInftyStructure> {
    let ctx = &mu.ctx;
    let cutoff = AInftyStructure::arity_cutoff(ctx);
    let mut ms: BTreeMap<usize, Terms> = BTreeMap::new();
    ms.insert(2, product_terms());
    for (k, p) in &mu.terms {
        let n = k.len();
        for (m, c) in p.iter() {
            let d = m.s.degree(ctx);
            if d != 2 - n as i32 {
                return Err(Error::MalformedMc(format!(
                    "term {} of arity {n} has scalar degree {d}, expected {}",
                    Mono::text(m),
                    2 - n as i32
                )));
            }
            if n > cutoff {
                return Err(Error::MalformedMc(format!("arity {n} exceeds the cutoff {cutoff}")));
            }
            add_into(ms.entry(n).or_default(), k.clone(), &Poly::term(*m, c.clone()));
        }
    }
    Ok(AInftyStructure {
        ctx: ctx.clone(),
        ms: ms.into_iter().map(|(n, t)| (n, PolyDiffOp::new(ctx, t))).collect(),
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum StasheffMode {
    /// Evaluate on monomial arguments of bounded degree.
    Evaluation { max_degree: u32 },
    /// Compute [M, M]_G symbolically.
    Symbolic,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct StasheffReport {
    pub status: bool,
    pub first_failing_arity: Option<usize>,
    pub checked_arities: Vec<usize>,
    pub slot_degree_bound: Option<u32>,
    pub mode: StasheffMode,
}

/// All x-monomials of total degree <= d in m variables.
pub fn monomials_upto(m: usize, d: u32) -> Vec<XMono> {
    let mut out = vec![XMono::ONE];
    for v in 0..m {
        let mut next = vec![];
        for x in &out {
            for e in 0..=(d - x.degree()) {
                let mut y = *x;
                y.0[v] = e as u8;
                next.push(y);
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// Stasheff relations as M∘M = 0 (equivalently [M, M]_G = 0) for arities 1..=max_arity.
pub fn ainfty_relations_check(a: &AInftyStructure, max_arity: usize, mode: StasheffMode) -> StasheffReport {
    let ctx = &a.ctx;
    let total = a.total();
    let arities: Vec<usize> = (1..=max_arity).collect();
    match mode {
        StasheffMode::Symbolic => {
            let sq = truncate_terms(&pre_lie(&total.terms, &total.terms, ctx), ctx);
            let first = arities.iter().copied().find(|&n| sq.keys().any(|k| k.len() == n));
            StasheffReport {
                status: first.is_none(),
                first_failing_arity: first,
                checked_arities: arities,
                slot_degree_bound: None,
                mode,
            }
        }
        StasheffMode::Evaluation { max_degree } => {
            let bound = max_degree.min(2 * total.max_slot_order());
            let monos: Vec<Poly> =
                monomials_upto(ctx.m, bound).into_iter().map(|x| Poly::term(Mono { s: SMono::ONE, x }, Q::one())).collect();
            let by_arity: BTreeMap<usize, Vec<(&Slots, &Poly)>> = total.terms.iter().fold(BTreeMap::new(), |mut acc, (k, p)| {
                acc.entry(k.len()).or_insert_with(Vec::new).push((k, p));
                acc
            });
            let mut first = None;
            'ar: for &n in &arities {
                let mut idx = vec![0usize; n];
                loop {
                    let args: Vec<Poly> = idx.iter().map(|&i| monos[i].clone()).collect();
                    if !stasheff_value(&by_arity, &args, ctx).is_zero() {
                        first = Some(n);
                        break 'ar;
                    }
                    let mut p = 0;
                    loop {
                        if p == n {
                            break;
                        }
                        idx[p] += 1;
                        if idx[p] < monos.len() {
                            break;
                        }
                        idx[p] = 0;
                        p += 1;
                    }
                    if p == n {
                        break;
                    }
                }
            }
            StasheffReport {
                status: first.is_none(),
                first_failing_arity: first,
                checked_arities: arities,
                slot_degree_bound: Some(bound),
                mode,
            }
        }
    }
}

/// (M∘M)(args) evaluated by nested application.
fn stasheff_value(by_arity: &BTreeMap<usize, Vec<(&Slots, &Poly)>>, args: &[Poly], ctx: &TruncationCtx) -> Poly {
    let n = args.len();
    let mut r = Poly::zero();
    for (&na, a_terms) in by_arity {
        if na == 0 || na > n + 1 {
            continue;
        }
        let nb = n + 1 - na;
        let Some(b_terms) = by_arity.get(&nb) else { continue };
        let ka = na as i64 - 1;
        let kb = nb as i64 - 1;
        for i in 0..na {
            for (sb, cb) in b_terms {
                let (even, odd) = cb.parity_split(ctx);
                for (piece, par) in [(even, 0i64), (odd, 1)] {
                    if piece.is_zero() {
                        continue;
                    }
                    let inner = eval_term(sb, &piece, &args[i..i + nb], ctx);
                    if inner.is_zero() {
                        continue;
                    }
                    let mut outer_args: Vec<Poly> = args[..i].to_vec();
                    outer_args.push(inner);
                    outer_args.extend_from_slice(&args[i + nb..]);
                    let neg = (i as i64 * kb + par * ka).rem_euclid(2) == 1;
                    for (sa, ca) in a_terms {
                        let v = eval_term(sa, ca, &outer_args, ctx);
                        if neg {
                            r.sub_assign(&v);
                        } else {
                            r.add_assign(&v);
                        }
                    }
                }
            }
        }
    }
    r.truncate(ctx)
}

/// Brute-force value of [P, Q]_G on arguments, straight from the insertion formula.
pub fn gerstenhaber_eval_oracle(p: &PolyDiffOp, qop: &PolyDiffOp, args: &[Poly]) -> Result<Poly> {
    let ctx = &p.ctx;
    let dp = p.degree()?.unwrap_or(0) as i64;
    let dq = qop.degree()?.unwrap_or(0) as i64;
    let insert = |a: &PolyDiffOp, b: &PolyDiffOp| -> Poly {
        let mut r = Poly::zero();
        for (sa, ca) in &a.terms {
            let na = sa.len();
            if na == 0 {
                continue;
            }
            for (sb, cb) in &b.terms {
                let nb = sb.len();
                if na + nb - 1 != args.len() {
                    continue;
                }
                let (even, odd) = cb.parity_split(ctx);
                for (piece, par) in [(even, 0i64), (odd, 1)] {
                    if piece.is_zero() {
                        continue;
                    }
                    for i in 0..na {
                        let inner = eval_term(sb, &piece, &args[i..i + nb], ctx);
                        let mut oa: Vec<Poly> = args[..i].to_vec();
                        oa.push(inner);
                        oa.extend_from_slice(&args[i + nb..]);
                        let v = eval_term(sa, ca, &oa, ctx);
                        if (i as i64 * (nb as i64 - 1) + par * (na as i64 - 1)).rem_euclid(2) == 1 {
                            r.sub_assign(&v);
                        } else {
                            r.add_assign(&v);
                        }
                    }
                }
            }
        }
        r
    };
    let ab = insert(p, qop);
    let ba = insert(qop, p);
    let r = if (dp * dq).rem_euclid(2) == 1 { ab.add(&ba) } else { ab.sub(&ba) };
    Ok(r.truncate(ctx))
}

impl PolyDiffOp {
    /// Coefficient of the given slot tuple.
    pub fn coeff(&self, slots: &[XMono]) -> Poly {
        self.terms.get(slots).cloned().unwrap_or_default()
    }

    /// Whether every coefficient is free of negative eps powers.
    pub fn is_non_laurent(&self) -> bool {
        self.terms.values().all(non_laurent)
    }

    pub fn max_abs_coeff(&self) -> Q {
        self.terms.values().flat_map(|p| p.iter().map(|(_, c)| c.abs())).max().unwrap_or_else(Q::zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx3() -> Ctx {
        TruncationCtx::classical(3, 3)
    }

    #[test]
    fn product_is_associative() {
        let c = ctx3();
        let m = PolyDiffOp::product(&c);
        assert!(gerstenhaber(&m, &m).unwrap().is_zero());
        assert!(hochschild_d(&m).is_zero());
    }

    #[test]
    fn vector_fields_are_cocycles() {
        let c = ctx3();
        let d1 = PolyDiffOp::partial(&c, 0).unwrap();
        let d2 = PolyDiffOp::partial(&c, 1).unwrap();
        assert!(hochschild_d(&d1).is_zero());
        assert!(gerstenhaber(&d1, &d2).unwrap().is_zero());
    }

    #[test]
    fn hkr_of_bivector() {
        let c = ctx3();
        let v = Polyvector::monomial(&c, Poly::one(), &[0, 1]).unwrap();
        let p = hkr_embed(&v).unwrap();
        let a = Poly::x(0).mul(&Poly::x(1), &c);
        let b = Poly::x(0);
        // ∂2 a ∂1 b - ∂1 a ∂2 b
        assert_eq!(p.eval(&[a, b]), Poly::x(0));
        assert_eq!(hkr_project(&p), v);
        assert!(hochschild_d(&p).is_zero());
    }

    #[test]
    fn distributions_count() {
        let a = XMono::from_indices(&[0, 0, 1]);
        let d = distributions(&a, 2);
        assert_eq!(d.len(), 6);
        let total: Q = d.iter().map(|(w, _)| w.clone()).sum();
        assert_eq!(total, q(8));
    }
}
