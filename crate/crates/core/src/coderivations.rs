//! The symmetric coalgebra S(s^-1 L) over a Q-basis of L, coderivations given by Taylor
//! coefficients, the coderivation Pi on suspended forms, exp(Pi) and MC pushforwards.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::deformation::{mc_check, path_split, Dgla, OmegaDgla, PathElem, PvDgla, Report};
use crate::error::{Error, Result};
use crate::forms::{in_space, j_omega_inv_raw, omega_bracket_raw, Space};
use crate::grassmann::Grass;
use crate::polyvectors::SymplecticPair;
use crate::scalars::{factorial, Mono, Poly, SMono, Q};

/// Linear combination of words; each word is a sorted list of basis elements of L,
/// read as s^-1 b_1 ... s^-1 b_n.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymTensor<B: Ord> {
    pub words: BTreeMap<Vec<B>, Q>,
}

impl<B: Ord + Clone> Default for SymTensor<B> {
    fn default() -> Self {
        SymTensor { words: BTreeMap::new() }
    }
}

/// Parity of s^-1 b.
fn spar<L: Dgla>(l: &L, b: &L::Basis) -> bool {
    (l.basis_degree(b) - 1).rem_euclid(2) == 1
}

/// Sort factors with Koszul signs; `None` if an odd factor repeats.
pub fn canonicalize<L: Dgla>(l: &L, mut f: Vec<L::Basis>) -> Option<(bool, Vec<L::Basis>)> {
    let mut neg = false;
    for i in 1..f.len() {
        let mut j = i;
        while j > 0 && f[j - 1] > f[j] {
            if spar(l, &f[j - 1]) && spar(l, &f[j]) {
                neg = !neg;
            }
            f.swap(j - 1, j);
            j -= 1;
        }
    }
    for w in f.windows(2) {
        if w[0] == w[1] && spar(l, &w[0]) {
            return None;
        }
    }
    Some((neg, f))
}

impl<B: Ord + Clone> SymTensor<B> {
    pub fn zero() -> Self {
        SymTensor { words: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn add_word(&mut self, w: Vec<B>, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.words.entry(w.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.words.remove(&w);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (w, c) in &o.words {
            r.add_word(w.clone(), c.clone());
        }
        r
    }

    pub fn scale(&self, k: &Q) -> Self {
        let mut r = Self::zero();
        for (w, c) in &self.words {
            r.add_word(w.clone(), c * k);
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-Q::one()))
    }

    pub fn max_len(&self) -> usize {
        self.words.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    pub fn of_len(&self, n: usize) -> Self {
        SymTensor { words: self.words.iter().filter(|(w, _)| w.len() == n).map(|(w, c)| (w.clone(), c.clone())).collect() }
    }
}

pub fn sym_from_elem<L: Dgla>(l: &L, a: &L::Elem) -> SymTensor<L::Basis> {
    let mut t = SymTensor::zero();
    for (b, c) in l.expand(a) {
        t.add_word(vec![b], c);
    }
    t
}

/// Length-one part read back as an element of L.
pub fn sym_project<L: Dgla>(l: &L, t: &SymTensor<L::Basis>) -> L::Elem {
    let mut r = l.zero();
    for (w, c) in &t.words {
        if w.len() == 1 {
            r = l.add(&r, &l.scale(&l.basis_elem(&w[0]), c));
        }
    }
    r
}

pub fn sym_mul<L: Dgla>(l: &L, a: &SymTensor<L::Basis>, b: &SymTensor<L::Basis>) -> SymTensor<L::Basis> {
    let mut r = SymTensor::zero();
    for (wa, ca) in &a.words {
        for (wb, cb) in &b.words {
            let mut f = wa.clone();
            f.extend_from_slice(wb);
            if let Some((neg, w)) = canonicalize(l, f) {
                let c = ca * cb;
                r.add_word(w, if neg { -c } else { c });
            }
        }
    }
    r
}

/// Koszul sign of moving the positions in `mask` to the front, keeping relative order.
fn front_sign<L: Dgla>(l: &L, w: &[L::Basis], mask: u32) -> bool {
    let mut neg = false;
    for j in 0..w.len() {
        if mask & (1 << j) == 0 || !spar(l, &w[j]) {
            continue;
        }
        for i in 0..j {
            if mask & (1 << i) == 0 && spar(l, &w[i]) {
                neg = !neg;
            }
        }
    }
    neg
}

fn pick<T: Clone>(w: &[T], mask: u32, inside: bool) -> Vec<T> {
    w.iter().enumerate().filter(|(i, _)| (mask & (1 << i) != 0) == inside).map(|(_, b)| b.clone()).collect()
}

/// One (p, n-p) shuffle summand of the reduced coproduct.
pub type Split<B> = (Vec<B>, Vec<B>, i32);

/// Reduced coproduct of a word: all splittings into two nonempty sub-words with Koszul signs.
pub fn comult<L: Dgla>(l: &L, w: &[L::Basis]) -> Vec<Split<L::Basis>> {
    let n = w.len();
    let mut out = vec![];
    if n < 2 {
        return out;
    }
    for mask in 1..(1u32 << n) - 1 {
        let sign = if front_sign(l, w, mask) { -1 } else { 1 };
        out.push((pick(w, mask, true), pick(w, mask, false), sign));
    }
    out
}

/// Δ applied to a tensor, as a map (left word, right word) -> coefficient.
pub fn comult_tensor<L: Dgla>(l: &L, t: &SymTensor<L::Basis>) -> BTreeMap<(Vec<L::Basis>, Vec<L::Basis>), Q> {
    let mut r: BTreeMap<(Vec<L::Basis>, Vec<L::Basis>), Q> = BTreeMap::new();
    for (w, c) in &t.words {
        for (a, b, s) in comult(l, w) {
            let e = r.entry((a, b)).or_insert_with(Q::zero);
            *e += if s < 0 { -c.clone() } else { c.clone() };
        }
    }
    r.retain(|_, c| !c.is_zero());
    r
}

type Taylor<'a, L> = Box<dyn Fn(&[<L as Dgla>::Basis]) -> Result<<L as Dgla>::Elem> + 'a>;

/// A coderivation of S(s^-1 L) given by its Taylor coefficients p∘D on canonical words.
pub struct Coderivation<'a, L: Dgla> {
    pub degree: i32,
    pub arities: Vec<usize>,
    pub taylor: Taylor<'a, L>,
}

impl<'a, L: Dgla> Coderivation<'a, L> {
    /// Extension to all words: sum over sub-words S of ± D(b_S) b_{S^c}.
    pub fn apply(&self, l: &L, t: &SymTensor<L::Basis>) -> Result<SymTensor<L::Basis>> {
        let mut r = SymTensor::zero();
        for (w, c) in &t.words {
            let n = w.len();
            for mask in 1..(1u32 << n) {
                let k = mask.count_ones() as usize;
                if !self.arities.contains(&k) {
                    continue;
                }
                let inner: Vec<L::Basis> = pick(w, mask, true);
                let rest: Vec<L::Basis> = pick(w, mask, false);
                let v = l.truncate(&(self.taylor)(&inner)?);
                if l.is_zero(&v) {
                    continue;
                }
                let neg = front_sign(l, w, mask);
                for (b, cb) in l.expand(&v) {
                    let mut f = vec![b];
                    f.extend_from_slice(&rest);
                    if let Some((n2, word)) = canonicalize(l, f) {
                        let coef = c * cb;
                        r.add_word(word, if neg ^ n2 { -coef } else { coef });
                    }
                }
            }
        }
        Ok(r)
    }
}

/// Chevalley-Eilenberg coderivation: D_1 = s^-1 ∂, D_2(v1, v2) = (-1)^{|v1|-1} s^-1 [v1, v2].
pub fn ce_coderivation<L: Dgla>(l: &L) -> Coderivation<'_, L> {
    Coderivation {
        degree: 1,
        arities: vec![1, 2],
        taylor: Box::new(move |w: &[L::Basis]| {
            Ok(match w.len() {
                1 => l.d(&l.basis_elem(&w[0])),
                2 => {
                    let v = l.bracket_raw(&l.basis_elem(&w[0]), &l.basis_elem(&w[1]));
                    if (l.basis_degree(&w[0]) - 1).rem_euclid(2) == 1 {
                        l.neg(&v)
                    } else {
                        v
                    }
                }
                _ => l.zero(),
            })
        }),
    }
}

/// p∘Π(s^-2 η1 s^-2 η2) = (-1)^{|η1|} s^-2 ε α^{ij} (∂η1/∂dx^i)(∂η2/∂dx^j), zero off length 2.
pub fn pi_raw(a: &Grass, b: &Grass, pair: &SymplecticPair, l: &OmegaDgla) -> Grass {
    let ctx = &l.ctx;
    let eps = Poly::smono(SMono::eps(1));
    let (even, odd) = a.parity_split(ctx);
    let mut r = Grass::zero();
    for (piece, neg) in [(even, false), (odd, true)] {
        if piece.is_zero() {
            continue;
        }
        for i in 0..ctx.m {
            let ci = piece.left_deriv(i, ctx);
            if ci.is_zero() {
                continue;
            }
            for j in 0..ctx.m {
                let aij = &pair.alpha[i][j];
                if aij.is_zero() {
                    continue;
                }
                let cj = b.left_deriv(j, ctx);
                if cj.is_zero() {
                    continue;
                }
                let t = ci.mul(&cj, ctx).smul(aij, ctx).smul(&eps, ctx);
                r = if neg { r.sub(&t) } else { r.add(&t) };
            }
        }
    }
    r
}

pub fn pi_coderivation<'a>(pair: &'a SymplecticPair, l: &'a OmegaDgla) -> Coderivation<'a, OmegaDgla> {
    Coderivation {
        degree: 0,
        arities: vec![2],
        taylor: Box::new(move |w: &[(u16, Mono)]| {
            let a = l.basis_elem(&w[0]);
            let b = l.basis_elem(&w[1]);
            let ok = |g: &Grass| in_space(&strip_t(g), Space::LTilde);
            if !ok(&a) && !ok(&b) {
                return Err(Error::Membership("Pi needs one argument in L~_Omega".into()));
            }
            Ok(pi_raw(&a, &b, pair, l))
        }),
    }
}

/// Forget t and dt, for membership tests on path-carrier elements.
fn strip_t(g: &Grass) -> Grass {
    g.map_polys(|_, p| {
        let mut r = Poly::zero();
        for (m, c) in p.iter() {
            let mut m2 = *m;
            m2.s.t = 0;
            m2.s.dt = false;
            r.add_term(m2, c.clone());
        }
        r
    })
}

/// [D, D'] = D∘D' - (-1)^{|D||D'|} D'∘D on a tensor.
pub fn coder_commutator<L: Dgla>(
    l: &L,
    d1: &Coderivation<L>,
    d2: &Coderivation<L>,
    t: &SymTensor<L::Basis>,
) -> Result<SymTensor<L::Basis>> {
    let a = d1.apply(l, &d2.apply(l, t)?)?;
    let b = d2.apply(l, &d1.apply(l, t)?)?;
    Ok(if (d1.degree * d2.degree).rem_euclid(2) == 1 { a.add(&b) } else { a.sub(&b) })
}

/// exp(±Π) = sum_m (±1)^m Π^m / m!; finite because Π shortens words.
pub struct ExpPi<'a> {
    pub pi: Coderivation<'a, OmegaDgla>,
    pub inverse: bool,
}

pub fn exp_pi<'a>(pair: &'a SymplecticPair, l: &'a OmegaDgla) -> (ExpPi<'a>, ExpPi<'a>) {
    (ExpPi { pi: pi_coderivation(pair, l), inverse: false }, ExpPi { pi: pi_coderivation(pair, l), inverse: true })
}

pub trait LinftyMorphism<L: Dgla> {
    /// p∘F on a tensor.
    fn taylor_apply(&self, l: &L, t: &SymTensor<L::Basis>) -> Result<L::Elem>;
}

pub struct IdentityMorphism;

impl<L: Dgla> LinftyMorphism<L> for IdentityMorphism {
    fn taylor_apply(&self, l: &L, t: &SymTensor<L::Basis>) -> Result<L::Elem> {
        Ok(sym_project(l, t))
    }
}

impl<'a> ExpPi<'a> {
    pub fn apply(&self, l: &OmegaDgla, t: &SymTensor<(u16, Mono)>) -> Result<SymTensor<(u16, Mono)>> {
        let mut out = t.clone();
        let mut cur = t.clone();
        let mut m = 1u32;
        while !cur.is_zero() {
            cur = self.pi.apply(l, &cur)?;
            let mut w = Q::one() / factorial(m);
            if self.inverse && m % 2 == 1 {
                w = -w;
            }
            out = out.add(&cur.scale(&w));
            m += 1;
        }
        Ok(out)
    }
}

impl<'a> LinftyMorphism<OmegaDgla> for ExpPi<'a> {
    fn taylor_apply(&self, l: &OmegaDgla, t: &SymTensor<(u16, Mono)>) -> Result<Grass> {
        Ok(sym_project(l, &self.apply(l, t)?))
    }
}

/// F_*(μ) = sum_n (1/n!) p∘F((s^-1 μ)^n). Terms beyond n = N / (minimal weight of μ) vanish
/// for filtration-compatible F; a bound above W is rejected.
pub fn pushforward_mc<L: Dgla, F: LinftyMorphism<L>>(f: &F, mu: &L::Elem, l: &L) -> Result<L::Elem> {
    let base = sym_from_elem(l, mu);
    if base.is_zero() {
        return Ok(l.zero());
    }
    let wmin = l.expand(mu).iter().map(|(b, _)| l.basis_weight(b)).min().unwrap_or(1);
    if wmin < 1 {
        return Err(Error::Contract("pushforward needs an element of truncation weight >= 1".into()));
    }
    let nmax = (l.ctx().n as i64 / wmin) as usize;
    if nmax > l.ctx().w {
        return Err(Error::Contract(format!("pushforward needs words of length {nmax}, beyond W = {}", l.ctx().w)));
    }
    let mut out = l.zero();
    let mut power = base.clone();
    for n in 1..=nmax.max(1) {
        let v = f.taylor_apply(l, &power)?;
        out = l.add(&out, &l.scale(&v, &(Q::one() / factorial(n as u32))));
        power = sym_mul(l, &power, &base);
    }
    Ok(l.truncate(&out))
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct PiReport {
    pub pi_nice_words: usize,
    pub pi_nice_failures: usize,
    pub pi_bracket_words: usize,
    pub pi_bracket_failures: usize,
    pub first_residual: Option<String>,
}

impl PiReport {
    pub fn passed(&self) -> bool {
        self.pi_nice_failures == 0 && self.pi_bracket_failures == 0
    }
}

pub fn tensor_text<L: Dgla>(l: &L, t: &SymTensor<L::Basis>) -> String {
    if t.is_zero() {
        return "0".into();
    }
    t.words
        .iter()
        .map(|(w, c)| {
            let f: Vec<String> = w.iter().map(|b| format!("s^-1[{}]", l.show(&l.basis_elem(b)))).collect();
            format!("{} * {}", crate::scalars::fmt_q(c), f.join(" "))
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Exact check of [Π, Q_{-d}] = Q_{[,]_ω} on length-2 words and [Π, Q_{[,]_ω}] = 0 on
/// length-3 words, each word a product of the given carrier elements.
pub fn verify_pi_identities(
    pair: &SymplecticPair,
    l_ctx: &crate::scalars::Ctx,
    pairs: &[(Grass, Grass)],
    triples: &[(Grass, Grass, Grass)],
) -> Result<PiReport> {
    let lz = OmegaDgla::new(l_ctx, None, true);
    let lb = OmegaDgla { ctx: l_ctx.clone(), pair: Some(pair.clone()), minus_d: false };
    let qd = ce_coderivation(&lz);
    let qb = ce_coderivation(&lb);
    let pi = pi_coderivation(pair, &lz);
    let mut rep = PiReport {
        pi_nice_words: pairs.len(),
        pi_nice_failures: 0,
        pi_bracket_words: triples.len(),
        pi_bracket_failures: 0,
        first_residual: None,
    };
    let word = |xs: &[&Grass]| {
        let mut t = sym_from_elem(&lz, xs[0]);
        for x in &xs[1..] {
            t = sym_mul(&lz, &t, &sym_from_elem(&lz, x));
        }
        t
    };
    for (a, b) in pairs {
        let w = word(&[a, b]);
        let lhs = coder_commutator(&lz, &pi, &qd, &w)?;
        let rhs = qb.apply(&lb, &w)?;
        let r = lhs.sub(&rhs);
        if !r.is_zero() {
            rep.pi_nice_failures += 1;
            rep.first_residual.get_or_insert_with(|| tensor_text(&lz, &r));
        }
    }
    for (a, b, c) in triples {
        let w = word(&[a, b, c]);
        let r = coder_commutator(&lz, &pi, &qb, &w)?;
        if !r.is_zero() {
            rep.pi_bracket_failures += 1;
            rep.first_residual.get_or_insert_with(|| tensor_text(&lz, &r));
        }
    }
    Ok(rep)
}

/// Output of the pipeline: MC elements at the form level and at the polyvector level.
#[derive(Clone, PartialEq, Debug)]
pub struct ThetaPiOutput {
    pub omega_level: Grass,
    pub omega_certificate: Report,
    pub pv_level: Grass,
    pub pv_certificate: Report,
    /// Whether the polyvector output lies in eps * m * PV.
    pub pv_in_tilde: bool,
}

/// η closed in L~_Ω  ->  exp(Π)_* η  ->  J_ω^-1, with MC certificates at both levels.
pub fn theta_pi_pipeline(eta: &Grass, pair: &SymplecticPair, ctx: &crate::scalars::Ctx) -> Result<ThetaPiOutput> {
    let lz = OmegaDgla::new(ctx, None, true);
    let lw = OmegaDgla::new(ctx, Some(pair), true);
    if !in_space(eta, Space::LTilde) {
        return Err(Error::Membership("pipeline input must lie in L~_Omega".into()));
    }
    if !mc_check(eta, &lz)?.passed() {
        return Err(Error::Precondition("pipeline input is not a closed degree-1 element".into()));
    }
    let (f, _) = exp_pi(pair, &lz);
    let out = pushforward_mc(&f, eta, &lz)?;
    let omega_certificate = mc_check(&out, &lw)?;
    let pv = crate::polyvectors::truncate_pv(&j_omega_inv_raw(&out, &pair.alpha, ctx), ctx);
    let lp = PvDgla::new(ctx, Some(pair));
    let pv_certificate = mc_check(&pv, &lp)?;
    let pv_in_tilde = pv.terms().all(|(_, m, _)| m.s.eps >= 1 && m.s.m_order() >= 2);
    Ok(ThetaPiOutput { omega_level: out, omega_certificate, pv_level: pv, pv_certificate, pv_in_tilde })
}

/// Pushforward of a path a + dt b through exp(Π), split back into its t and dt parts.
pub fn pushforward_path(eta: &PathElem<Grass>, pair: &SymplecticPair, l: &OmegaDgla) -> Result<PathElem<Grass>> {
    let total = crate::deformation::path_total(eta, l);
    let (f, _) = exp_pi(pair, l);
    let out = pushforward_mc(&f, &total, l)?;
    Ok(path_split(&out, l))
}

/// [,]_ω on carrier elements, exposed for direct tests of the Ω bracket.
pub fn omega_bracket_of(pair: &SymplecticPair, l: &OmegaDgla, a: &Grass, b: &Grass) -> Grass {
    l.truncate(&omega_bracket_raw(a, b, &pair.alpha, &l.ctx))
}
