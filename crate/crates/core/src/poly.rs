//! Polynomial phase-space symbols and the terminating Bopp-series star product.
//!
//! For polynomials the star product reduces to the finite sum
//! `A * B = sum_{s,t} (i hbar/2)^s (-i hbar/2)^t / (s! t!) (d_q^s d_p^t A)(d_p^s d_q^t B)`,
//! which is exact; no grids or truncation are involved.

use crate::{Error, Result};
use num_complex::Complex64;
use std::collections::BTreeMap;

pub const STAR_DEGREE_LIMIT: u32 = 12;

/// Sparse polynomial in (q, p): monomial exponents -> complex coefficient.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolySymbol {
    terms: BTreeMap<(u32, u32), Complex64>,
}

impl PolySymbol {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<Complex64>) -> Self {
        let mut s = Self::default();
        s.add_term(0, 0, c.into());
        s
    }

    pub fn q() -> Self {
        Self::monomial(1, 0, 1.0.into())
    }

    pub fn p() -> Self {
        Self::monomial(0, 1, 1.0.into())
    }

    pub fn monomial(q_pow: u32, p_pow: u32, coeff: Complex64) -> Self {
        let mut s = Self::default();
        s.add_term(q_pow, p_pow, coeff);
        s
    }

    pub fn add_term(&mut self, q_pow: u32, p_pow: u32, coeff: Complex64) {
        if coeff == Complex64::default() {
            return;
        }
        let entry = self.terms.entry((q_pow, p_pow)).or_default();
        *entry += coeff;
        if entry.norm() < 1e-300 {
            self.terms.remove(&(q_pow, p_pow));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Complex64)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(a, b)| a + b).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::default();
        for (&(a, b), &v) in &self.terms {
            out.add_term(a, b, v * c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(a, b), &v) in &other.terms {
            out.add_term(a, b, v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (&(a1, b1), &c1) in &self.terms {
            for (&(a2, b2), &c2) in &other.terms {
                out.add_term(a1 + a2, b1 + b2, c1 * c2);
            }
        }
        out
    }

    /// Partial derivative d_q^{dq} d_p^{dp}.
    pub fn deriv(&self, dq: u32, dp: u32) -> Self {
        let mut out = Self::default();
        for (&(a, b), &c) in &self.terms {
            if a >= dq && b >= dp {
                let mut f = 1.0;
                for t in 0..dq {
                    f *= (a - t) as f64;
                }
                for t in 0..dp {
                    f *= (b - t) as f64;
                }
                out.add_term(a - dq, b - dp, c * f);
            }
        }
        out
    }

    pub fn eval(&self, q: f64, p: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&(a, b), &c)| c * q.powi(a as i32) * p.powi(b as i32))
            .sum()
    }

    /// Max-norm distance of coefficients.
    pub fn coeff_distance(&self, other: &Self) -> f64 {
        let mut d = 0.0f64;
        for key in self.terms.keys().chain(other.terms.keys()) {
            let a = self.terms.get(key).copied().unwrap_or_default();
            let b = other.terms.get(key).copied().unwrap_or_default();
            d = d.max((a - b).norm());
        }
        d
    }

    /// Discrete L2 norm over the reference box [-1,1]^2 (17x17 samples).
    pub fn box_norm(&self) -> f64 {
        let n = 17;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let q = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
                let p = -1.0 + 2.0 * j as f64 / (n - 1) as f64;
                acc += self.eval(q, p).norm_sqr();
            }
        }
        (acc / (n * n) as f64).sqrt()
    }
}

/// Exact Moyal star product of two polynomial symbols.
pub fn star_poly(a: &PolySymbol, b: &PolySymbol, hbar: f64) -> Result<PolySymbol> {
    let deg = a.degree() + b.degree();
    if deg > STAR_DEGREE_LIMIT {
        return Err(Error::DegreeOverflow { degree: deg, limit: STAR_DEGREE_LIMIT });
    }
    let mut out = PolySymbol::default();
    let max_order = a.degree().min(b.degree());
    let mut fact = vec![1.0f64; (max_order + 1) as usize];
    for k in 1..fact.len() {
        fact[k] = fact[k - 1] * k as f64;
    }
    for s in 0..=max_order {
        for t in 0..=(max_order - s) {
            let da = a.deriv(s, t);
            if da.is_zero() {
                continue;
            }
            let db = b.deriv(t, s);
            if db.is_zero() {
                continue;
            }
            let coef = Complex64::new(0.0, hbar / 2.0).powu(s)
                * Complex64::new(0.0, -hbar / 2.0).powu(t)
                / (fact[s as usize] * fact[t as usize]);
            out = out.add(&da.mul(&db).scale(coef));
        }
    }
    Ok(out)
}

/// Moyal bracket `[A,B]_M = A*B - B*A`.
pub fn moyal_bracket(a: &PolySymbol, b: &PolySymbol, hbar: f64) -> Result<PolySymbol> {
    Ok(star_poly(a, b, hbar)?.sub(&star_poly(b, a, hbar)?))
}

/// Classical Poisson bracket `{A,B} = d_q A d_p B - d_p A d_q B`.
pub fn poisson_bracket(a: &PolySymbol, b: &PolySymbol) -> PolySymbol {
    a.deriv(1, 0).mul(&b.deriv(0, 1)).sub(&a.deriv(0, 1).mul(&b.deriv(1, 0)))
}

/// `e(hbar) = || [A,B]_M/(i hbar) - {A,B} ||` for each hbar in the sequence.
pub fn classical_limit_probe(a: &PolySymbol, b: &PolySymbol, hbars: &[f64]) -> Result<Vec<f64>> {
    let pb = poisson_bracket(a, b);
    hbars
        .iter()
        .map(|&h| {
            let mb = moyal_bracket(a, b, h)?;
            let scaled = mb.scale(Complex64::new(0.0, -1.0 / h));
            Ok(scaled.sub(&pb).box_norm())
        })
        .collect()
}
