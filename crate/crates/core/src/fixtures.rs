//! Symplectic fixtures: the standard constant pair and a polynomial shear of it on R^4.

use crate::polyvectors::{PolyMatrix, SymplecticPair};
use crate::scalars::{q, Mono, Poly, SMono, XMono};

/// Sum of c * x^e terms, exponents given per variable.
pub fn xpoly(terms: &[(i64, &[u8])]) -> Poly {
    let mut p = Poly::zero();
    for (c, e) in terms {
        let mut x = XMono::ONE;
        x.0[..e.len()].copy_from_slice(e);
        p.add_term(Mono { s: SMono::ONE, x }, q(*c));
    }
    p
}

fn matrix(rows: Vec<Vec<Poly>>) -> PolyMatrix {
    rows
}

/// Pullback of the standard form along y = (x1, x2, x3 + x1^2, x4 + x1 x2).
pub fn shear4() -> SymplecticPair {
    let z = Poly::zero;
    let c = |k: i64| xpoly(&[(k, &[])]);
    let omega = matrix(vec![
        vec![z(), xpoly(&[(-2, &[2]), (-1, &[])]), xpoly(&[(1, &[0, 1])]), xpoly(&[(-2, &[1])])],
        vec![xpoly(&[(2, &[2]), (1, &[])]), z(), xpoly(&[(1, &[1])]), z()],
        vec![xpoly(&[(-1, &[0, 1])]), xpoly(&[(-1, &[1])]), z(), c(-1)],
        vec![xpoly(&[(2, &[1])]), z(), c(1), z()],
    ]);
    let alpha = matrix(vec![
        vec![z(), c(1), z(), xpoly(&[(-1, &[1])])],
        vec![c(-1), z(), xpoly(&[(2, &[1])]), xpoly(&[(1, &[0, 1])])],
        vec![z(), xpoly(&[(-2, &[1])]), z(), xpoly(&[(2, &[2]), (1, &[])])],
        vec![xpoly(&[(1, &[1])]), xpoly(&[(-1, &[0, 1])]), xpoly(&[(-2, &[2]), (-1, &[])]), z()],
    ]);
    SymplecticPair::new(omega, alpha).expect("shear fixture is symplectic")
}

/// Constant pair with alpha^{12} = 1 on R^2 (omega_{12} = -1).
pub fn standard2() -> SymplecticPair {
    SymplecticPair::standard(2).expect("standard pair")
}

pub fn standard4() -> SymplecticPair {
    SymplecticPair::standard(4).expect("standard pair")
}

/// alpha^{12} = x3, alpha^{34} = 1: not Poisson, since {x4, {x1, x2}} = -1. No omega is
/// attached; used only as a control for identities that need Jacobi.
pub fn non_poisson4() -> SymplecticPair {
    let z = Poly::zero;
    let c = |k: i64| xpoly(&[(k, &[])]);
    let alpha = matrix(vec![
        vec![z(), xpoly(&[(1, &[0, 0, 1])]), z(), z()],
        vec![xpoly(&[(-1, &[0, 0, 1])]), z(), z(), z()],
        vec![z(), z(), z(), c(1)],
        vec![z(), z(), c(-1), z()],
    ]);
    let zero = vec![vec![Poly::zero(); 4]; 4];
    SymplecticPair::new_unchecked(zero, alpha)
}

pub fn by_name(name: &str) -> Option<SymplecticPair> {
    match name {
        "standard2" => Some(standard2()),
        "standard4" => Some(standard4()),
        "shear4" => Some(shear4()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid() {
        assert!(!shear4().is_constant());
        assert!(standard4().is_constant());
        assert!(!non_poisson4().is_poisson());
    }
}
