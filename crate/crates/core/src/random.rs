//! Seeded generators for randomized identity tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grassmann::Grass;
use crate::polydiff::{Slots, Terms};
use crate::scalars::{q, qr, Mono, Poly, SMono, TruncationCtx, XMono, Q};

pub struct Gen {
    pub rng: ChaCha8Rng,
}

#[derive(Clone, Debug)]
pub struct Shape {
    /// Number of summands.
    pub terms: usize,
    /// Maximal x-degree of coefficients.
    pub x_degree: u32,
    /// Maximal number of odd generators or operator slots.
    pub width: usize,
    /// Maximal order of a slot multi-index.
    pub slot_order: u32,
}

impl Default for Shape {
    fn default() -> Self {
        Shape { terms: 3, x_degree: 2, width: 3, slot_order: 2 }
    }
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn small_q(&mut self) -> Q {
        let n = self.rng.gen_range(1..=4) as i64 * if self.rng.gen_bool(0.5) { 1 } else { -1 };
        if self.rng.gen_bool(0.2) {
            qr(n, 2)
        } else {
            q(n)
        }
    }

    pub fn xmono(&mut self, m: usize, max_deg: u32) -> XMono {
        let d = self.rng.gen_range(0..=max_deg);
        let mut x = XMono::ONE;
        for _ in 0..d {
            x.0[self.rng.gen_range(0..m)] += 1;
        }
        x
    }

    /// Random x-polynomial times a scalar monomial chosen from `scalars`.
    pub fn poly(&mut self, ctx: &TruncationCtx, scalars: &[SMono], shape: &Shape) -> Poly {
        let mut p = Poly::zero();
        for _ in 0..self.rng.gen_range(1..=shape.terms) {
            let s = scalars[self.rng.gen_range(0..scalars.len())];
            let x = self.xmono(ctx.m, shape.x_degree);
            p.add_term(Mono { s, x }, self.small_q());
        }
        p
    }

    pub fn subset(&mut self, m: usize, k: usize) -> u16 {
        let mut ix: Vec<usize> = (0..m).collect();
        let mut mask = 0u16;
        for _ in 0..k.min(m) {
            let j = self.rng.gen_range(0..ix.len());
            mask |= 1 << ix.remove(j);
        }
        mask
    }

    /// Homogeneous element with exactly `k` odd generators per term.
    pub fn grass_k(&mut self, ctx: &TruncationCtx, k: usize, scalars: &[SMono], shape: &Shape) -> Grass {
        let mut g = Grass::zero();
        for _ in 0..self.rng.gen_range(1..=shape.terms) {
            let mask = self.subset(ctx.m, k);
            let s = scalars[self.rng.gen_range(0..scalars.len())];
            let x = self.xmono(ctx.m, shape.x_degree);
            g.add_term(mask, &Poly::term(Mono { s, x }, self.small_q()));
        }
        g
    }

    /// Operator whose terms all have `arity` slots.
    pub fn op_terms(&mut self, ctx: &TruncationCtx, arity: usize, scalars: &[SMono], shape: &Shape) -> Terms {
        let mut t = Terms::new();
        for _ in 0..self.rng.gen_range(1..=shape.terms) {
            let slots: Slots = (0..arity).map(|_| self.xmono(ctx.m, shape.slot_order)).collect();
            let s = scalars[self.rng.gen_range(0..scalars.len())];
            let x = self.xmono(ctx.m, shape.x_degree);
            let c = Poly::term(Mono { s, x }, self.small_q());
            let e = t.entry(slots.clone()).or_default();
            e.add_assign(&c);
            if e.is_zero() {
                t.remove(&slots);
            }
        }
        t
    }

    /// Element of L~_Omega: forms of degree <= qmax with eps-power at least 2 - q
    /// (at least 2 for functions), optionally times the first parameter.
    pub fn ltilde_form(&mut self, ctx: &TruncationCtx, qmax: usize) -> Grass {
        let mut r = Grass::zero();
        for _ in 0..self.range(1, 2) {
            let k = self.range(0, qmax.min(ctx.m));
            let j = self.range(0, 1) as i32;
            let mut s = SMono::eps(if k == 0 { 2 + j } else { 2 - k as i32 + j });
            if ctx.g > 0 && self.range(0, 2) == 0 {
                s.p[0] = 1;
            }
            let shape = Shape { terms: 1, x_degree: 2, width: 3, slot_order: 1 };
            r = r.add(&self.grass_k(ctx, k, &[s], &shape));
        }
        r
    }

    pub fn pick<T: Clone>(&mut self, v: &[T]) -> T {
        v[self.rng.gen_range(0..v.len())].clone()
    }

    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.gen_range(lo..=hi)
    }
}
