//! Polynomials in odd generators (theta_i or dx^i) over the scalar ring.
//! Terms are stored as `coefficient * xi_I` with I a bitmask and the scalar on the left.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalars::{fmt_q, Mono, Poly, Q, TruncationCtx};

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Grass(pub BTreeMap<u16, Poly>);

pub fn mask_indices(mask: u16) -> Vec<usize> {
    (0..16).filter(|i| mask & (1 << i) != 0).collect()
}

pub fn indices_mask(ix: &[usize]) -> u16 {
    ix.iter().fold(0u16, |m, &i| m | (1 << i))
}

fn below(mask: u16, i: usize) -> u32 {
    (mask & ((1u16 << i) - 1)).count_ones()
}

fn above(mask: u16, i: usize) -> u32 {
    (mask >> (i + 1)).count_ones()
}

/// Sign of xi_I xi_J = +- xi_{I u J}.
pub fn merge_sign(a: u16, b: u16) -> bool {
    let mut flips = 0;
    for j in 0..16 {
        if b & (1 << j) != 0 {
            flips += above(a, j);
        }
    }
    flips % 2 == 1
}

impl Grass {
    pub fn zero() -> Self {
        Grass(BTreeMap::new())
    }

    pub fn scalar(p: Poly) -> Self {
        Self::term(0, p)
    }

    pub fn term(mask: u16, p: Poly) -> Self {
        let mut g = Grass::zero();
        g.add_term(mask, &p);
        g
    }

    pub fn gen(i: usize) -> Self {
        Self::term(1 << i, Poly::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add_term(&mut self, mask: u16, p: &Poly) {
        if p.is_zero() {
            return;
        }
        let e = self.0.entry(mask).or_default();
        e.add_assign(p);
        if e.is_zero() {
            self.0.remove(&mask);
        }
    }

    pub fn add(&self, o: &Grass) -> Grass {
        let mut r = self.clone();
        for (k, p) in &o.0 {
            r.add_term(*k, p);
        }
        r
    }

    pub fn sub(&self, o: &Grass) -> Grass {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Grass {
        Grass(self.0.iter().map(|(k, p)| (*k, p.neg())).collect())
    }

    pub fn scale(&self, c: &Q) -> Grass {
        let mut r = Grass::zero();
        for (k, p) in &self.0 {
            r.add_term(*k, &p.scale(c));
        }
        r
    }

    /// Left multiplication by a scalar.
    pub fn smul(&self, c: &Poly, ctx: &TruncationCtx) -> Grass {
        let mut r = Grass::zero();
        for (k, p) in &self.0 {
            r.add_term(*k, &c.mul(p, ctx));
        }
        r
    }

    pub fn mul(&self, o: &Grass, ctx: &TruncationCtx) -> Grass {
        let mut r = Grass::zero();
        for (i, p) in &self.0 {
            let odd_i = i.count_ones() % 2 == 1;
            for (j, s) in &o.0 {
                if i & j != 0 {
                    continue;
                }
                let s2 = if odd_i { s.parity_twist(ctx) } else { s.clone() };
                let mut prod = p.mul(&s2, ctx);
                if merge_sign(*i, *j) {
                    prod = prod.neg();
                }
                r.add_term(i | j, &prod);
            }
        }
        r
    }

    /// Left derivative d/dxi_i.
    pub fn left_deriv(&self, i: usize, ctx: &TruncationCtx) -> Grass {
        let mut r = Grass::zero();
        for (k, p) in &self.0 {
            if k & (1 << i) == 0 {
                continue;
            }
            let mut c = p.parity_twist(ctx);
            if below(*k, i) % 2 == 1 {
                c = c.neg();
            }
            r.add_term(k & !(1 << i), &c);
        }
        r
    }

    /// Right derivative.
    pub fn right_deriv(&self, i: usize) -> Grass {
        let mut r = Grass::zero();
        for (k, p) in &self.0 {
            if k & (1 << i) == 0 {
                continue;
            }
            let c = if above(*k, i) % 2 == 1 { p.neg() } else { p.clone() };
            r.add_term(k & !(1 << i), &c);
        }
        r
    }

    pub fn deriv_x(&self, i: usize) -> Grass {
        let mut r = Grass::zero();
        for (k, p) in &self.0 {
            r.add_term(*k, &p.deriv(i));
        }
        r
    }

    /// xi_i * self.
    pub fn left_gen(&self, i: usize, ctx: &TruncationCtx) -> Grass {
        let mut r = Grass::zero();
        for (k, p) in &self.0 {
            if k & (1 << i) != 0 {
                continue;
            }
            let mut c = p.parity_twist(ctx);
            if below(*k, i) % 2 == 1 {
                c = c.neg();
            }
            r.add_term(k | (1 << i), &c);
        }
        r
    }

    pub fn map_polys(&self, f: impl Fn(u16, &Poly) -> Poly) -> Grass {
        let mut r = Grass::zero();
        for (k, p) in &self.0 {
            r.add_term(*k, &f(*k, p));
        }
        r
    }

    pub fn filter_terms(&self, f: impl Fn(u16, &Mono) -> bool) -> Grass {
        self.map_polys(|k, p| p.filter(|m| f(k, m)))
    }

    pub fn terms(&self) -> impl Iterator<Item = (u16, &Mono, &Q)> {
        self.0.iter().flat_map(|(k, p)| p.iter().map(move |(m, c)| (*k, m, c)))
    }

    pub fn num_terms(&self) -> usize {
        self.0.values().map(|p| p.len()).sum()
    }

    /// Unshifted degree |I| + scalar degree, if homogeneous.
    pub fn degree(&self, ctx: &TruncationCtx) -> Result<Option<i32>> {
        let mut d = None;
        for (k, m, _) in self.terms() {
            let e = k.count_ones() as i32 + m.s.degree(ctx);
            match d {
                None => d = Some(e),
                Some(x) if x != e => {
                    return Err(Error::Degree(format!("inhomogeneous element: degrees {x} and {e}")))
                }
                _ => {}
            }
        }
        Ok(d)
    }

    /// Split by parity of the unshifted degree.
    pub fn parity_split(&self, ctx: &TruncationCtx) -> (Grass, Grass) {
        let odd = |k: u16, m: &Mono| (k.count_ones() as i32 + m.s.degree(ctx)).rem_euclid(2) == 1;
        (self.filter_terms(|k, m| !odd(k, m)), self.filter_terms(odd))
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.keys().filter(|k| **k != 0).map(|k| 15 - k.leading_zeros() as usize).max()
    }

    pub fn text(&self, gen: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = vec![];
        for (k, m, c) in self.terms() {
            let mut f: Vec<String> = vec![fmt_q(c)];
            let mt = m.text();
            if !mt.is_empty() {
                f.push(mt);
            }
            if k != 0 {
                f.push(mask_indices(k).iter().map(|i| format!("{gen}{}", i + 1)).collect::<Vec<_>>().join("^"));
            }
            out.push(f.join(" * "));
        }
        out.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::q;

    #[test]
    fn anticommuting_generators() {
        let c = TruncationCtx::classical(3, 2);
        let a = Grass::gen(1).mul(&Grass::gen(0), &c);
        assert_eq!(a, Grass::term(0b11, Poly::constant(q(-1))));
        assert!(Grass::gen(0).mul(&Grass::gen(0), &c).is_zero());
    }

    #[test]
    fn left_and_right_derivatives() {
        let c = TruncationCtx::classical(3, 2);
        let t12 = Grass::term(0b11, Poly::one());
        assert_eq!(t12.left_deriv(0, &c), Grass::gen(1));
        assert_eq!(t12.left_deriv(1, &c), Grass::gen(0).neg());
        assert_eq!(t12.right_deriv(1), Grass::gen(0));
        assert_eq!(t12.right_deriv(0), Grass::gen(1).neg());
    }
}
