//! Polyvector fields as polynomials in odd theta_i over the scalar ring, with the
//! Schouten bracket.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::grassmann::{indices_mask, mask_indices, Grass};
use crate::scalars::{Ctx, Poly, Q, SMono, TruncationCtx};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polyvector {
    pub ctx: Ctx,
    pub g: Grass,
}

/// m x m matrix of x-polynomials.
pub type PolyMatrix = Vec<Vec<Poly>>;

/// [u, v]_S = sum_i (u <-d/dtheta_i)(d_i v) - (d_i u)(d/dtheta_i-> v), untruncated.
pub fn schouten_raw(u: &Grass, v: &Grass, ctx: &TruncationCtx) -> Grass {
    let mut r = Grass::zero();
    for i in 0..ctx.m {
        let a = u.right_deriv(i);
        if !a.is_zero() {
            let dv = v.deriv_x(i);
            if !dv.is_zero() {
                r = r.add(&a.mul(&dv, ctx));
            }
        }
        let du = u.deriv_x(i);
        if !du.is_zero() {
            let b = v.left_deriv(i, ctx);
            if !b.is_zero() {
                r = r.sub(&du.mul(&b, ctx));
            }
        }
    }
    r
}

/// Drop terms beyond the polyvector truncation (raw m-order and eps floor).
pub fn truncate_pv(g: &Grass, ctx: &TruncationCtx) -> Grass {
    g.map_polys(|_, p| p.truncate(ctx))
}

impl Polyvector {
    pub fn new(ctx: &Ctx, g: Grass) -> Self {
        Polyvector { g: truncate_pv(&g, ctx), ctx: ctx.clone() }
    }

    pub fn zero(ctx: &Ctx) -> Self {
        Polyvector { ctx: ctx.clone(), g: Grass::zero() }
    }

    pub fn scalar(ctx: &Ctx, p: Poly) -> Self {
        Self::new(ctx, Grass::scalar(p))
    }

    pub fn theta(ctx: &Ctx, i: usize) -> Result<Self> {
        if i >= ctx.m {
            return Err(Error::Argument(format!("th{} out of range", i + 1)));
        }
        Ok(Self::new(ctx, Grass::gen(i)))
    }

    /// Monomial c * theta_{i0} ... theta_{ik} in the given order.
    pub fn monomial(ctx: &Ctx, c: Poly, ix: &[usize]) -> Result<Self> {
        let mut g = Grass::scalar(c);
        for &i in ix {
            if i >= ctx.m {
                return Err(Error::Argument(format!("th{} out of range", i + 1)));
            }
            g = g.right_mul_gen(i);
        }
        Ok(Self::new(ctx, g))
    }

    /// The bivector 1/2 alpha^{ij} theta_i theta_j.
    pub fn bivector(ctx: &Ctx, a: &PolyMatrix) -> Self {
        let mut g = Grass::zero();
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                g.add_term((1 << i) | (1 << j), &a[i][j]);
            }
        }
        Self::new(ctx, g)
    }

    pub fn is_zero(&self) -> bool {
        self.g.is_zero()
    }

    /// Shifted degree (#theta - 1) + scalar degree, if homogeneous.
    pub fn degree(&self) -> Result<Option<i32>> {
        Ok(self.g.degree(&self.ctx)?.map(|d| d - 1))
    }

    pub fn add(&self, o: &Polyvector) -> Result<Polyvector> {
        TruncationCtx::check_same(&self.ctx, &o.ctx)?;
        Ok(Self::new(&self.ctx, self.g.add(&o.g)))
    }

    pub fn sub(&self, o: &Polyvector) -> Result<Polyvector> {
        TruncationCtx::check_same(&self.ctx, &o.ctx)?;
        Ok(Self::new(&self.ctx, self.g.sub(&o.g)))
    }

    pub fn neg(&self) -> Polyvector {
        Polyvector { ctx: self.ctx.clone(), g: self.g.neg() }
    }

    pub fn scale(&self, c: &Q) -> Polyvector {
        Self::new(&self.ctx, self.g.scale(c))
    }

    pub fn smul(&self, c: &Poly) -> Polyvector {
        Self::new(&self.ctx, self.g.smul(c, &self.ctx))
    }

    /// Fully antisymmetric component v^{i0...ik} (0-based indices).
    pub fn component(&self, ix: &[usize]) -> Poly {
        let mut sorted = ix.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Poly::zero();
        }
        let mut inv = 0;
        for a in 0..ix.len() {
            for b in a + 1..ix.len() {
                if ix[a] > ix[b] {
                    inv += 1;
                }
            }
        }
        let c = self.g.0.get(&indices_mask(&sorted)).cloned().unwrap_or_default();
        if inv % 2 == 1 {
            c.neg()
        } else {
            c
        }
    }

    pub fn text(&self) -> String {
        self.g.text("th")
    }
}

impl fmt::Display for Polyvector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

impl Grass {
    /// self * xi_i.
    pub fn right_mul_gen(&self, i: usize) -> Grass {
        let mut r = Grass::zero();
        for (k, p) in &self.0 {
            if k & (1 << i) != 0 {
                continue;
            }
            let after = (k >> (i + 1)).count_ones();
            r.add_term(k | (1 << i), &if after % 2 == 1 { p.neg() } else { p.clone() });
        }
        r
    }
}

pub fn wedge(u: &Polyvector, v: &Polyvector) -> Result<Polyvector> {
    TruncationCtx::check_same(&u.ctx, &v.ctx)?;
    Ok(Polyvector::new(&u.ctx, u.g.mul(&v.g, &u.ctx)))
}

pub fn schouten(u: &Polyvector, v: &Polyvector) -> Result<Polyvector> {
    TruncationCtx::check_same(&u.ctx, &v.ctx)?;
    u.degree()?;
    v.degree()?;
    Ok(Polyvector::new(&u.ctx, schouten_raw(&u.g, &v.g, &u.ctx)))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymplecticPair {
    pub m: usize,
    pub omega: PolyMatrix,
    pub alpha: PolyMatrix,
}

fn check_matrix(a: &PolyMatrix, m: usize, name: &str) -> Result<()> {
    if a.len() != m || a.iter().any(|r| r.len() != m) {
        return Err(Error::Argument(format!("{name} must be {m}x{m}")));
    }
    for i in 0..m {
        for j in 0..m {
            if a[i][j] != a[j][i].neg() {
                return Err(Error::Argument(format!("{name} is not antisymmetric at ({},{})", i + 1, j + 1)));
            }
            if a[i][j].iter().any(|(mm, _)| !mm.s.is_one()) {
                return Err(Error::Argument(format!("{name} entries must be polynomials in x only")));
            }
        }
    }
    Ok(())
}

impl SymplecticPair {
    /// Checks alpha^{ij} omega_{jk} = delta and [alpha, alpha]_S = 0.
    pub fn new(omega: PolyMatrix, alpha: PolyMatrix) -> Result<Self> {
        let m = alpha.len();
        check_matrix(&omega, m, "omega")?;
        check_matrix(&alpha, m, "alpha")?;
        let ctx = TruncationCtx::classical(m, 1);
        for i in 0..m {
            for k in 0..m {
                let mut s = Poly::zero();
                for j in 0..m {
                    s.add_assign(&alpha[i][j].mul(&omega[j][k], &ctx));
                }
                let want = if i == k { Poly::one() } else { Poly::zero() };
                if s != want {
                    return Err(Error::Argument(format!(
                        "alpha * omega differs from the identity at ({},{})",
                        i + 1,
                        k + 1
                    )));
                }
            }
        }
        let pair = SymplecticPair { m, omega, alpha };
        if !pair.is_poisson() {
            return Err(Error::Argument("alpha violates the Jacobi identity".into()));
        }
        Ok(pair)
    }

    /// For controls: no inverse or Jacobi checks.
    pub fn new_unchecked(omega: PolyMatrix, alpha: PolyMatrix) -> Self {
        SymplecticPair { m: alpha.len(), omega, alpha }
    }

    /// alpha^{2i-1,2i} = 1 on R^m, omega its inverse.
    pub fn standard(m: usize) -> Result<Self> {
        if m % 2 != 0 || m == 0 {
            return Err(Error::Argument("standard pair needs even m".into()));
        }
        let mut alpha = vec![vec![Poly::zero(); m]; m];
        let mut omega = vec![vec![Poly::zero(); m]; m];
        for b in 0..m / 2 {
            let (i, j) = (2 * b, 2 * b + 1);
            alpha[i][j] = Poly::one();
            alpha[j][i] = Poly::constant(-Q::one());
            omega[j][i] = Poly::one();
            omega[i][j] = Poly::constant(-Q::one());
        }
        Self::new(omega, alpha)
    }

    pub fn is_poisson(&self) -> bool {
        let ctx = TruncationCtx::classical(self.m, 1);
        let a = Polyvector::bivector(&ctx, &self.alpha);
        schouten_raw(&a.g, &a.g, &ctx).is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.alpha.iter().flatten().all(|p| p.iter().all(|(mm, _)| mm.x.degree() == 0))
    }

    pub fn alpha_bivector(&self, ctx: &Ctx) -> Polyvector {
        Polyvector::bivector(ctx, &self.alpha)
    }

    /// eps * alpha as a polyvector.
    pub fn eps_alpha(&self, ctx: &Ctx) -> Polyvector {
        self.alpha_bivector(ctx).smul(&Poly::smono(SMono::eps(1)))
    }

    /// Constant alpha entries as rationals.
    pub fn constant_alpha(&self) -> Result<Vec<Vec<Q>>> {
        if !self.is_constant() {
            return Err(Error::Unsupported("alpha is not constant".into()));
        }
        Ok(self
            .alpha
            .iter()
            .map(|r| r.iter().map(|p| p.0.values().next().cloned().unwrap_or_else(Q::zero)).collect())
            .collect())
    }
}

pub fn theta_indices(mask: u16) -> Vec<usize> {
    mask_indices(mask)
}
