//! Truncated harmonic-oscillator number basis: ladder matrices, Weyl
//! quantization of polynomial symbols, and the inverse map back to symbols.
//!
//! This is the operator-side oracle the star product is validated against.
//! The inverse direction evaluates coherent-state matrix elements
//! `<alpha|A|alpha>` (factorially convergent in the truncated basis), fits the
//! resulting polynomial, and removes the Gaussian smearing exactly; plain
//! offset-kernel quadrature cannot reach oracle tolerance on a truncated
//! matrix because the discarded top corner contributes O(1) ripple.

use crate::grid::PhaseGrid;
use crate::poly::PolySymbol;
use crate::{Error, Result};
use nalgebra::DMatrix;
use ndarray::Array2;
use num_complex::Complex64;

pub const WEYL_DEGREE_LIMIT: u32 = 6;

#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub data: DMatrix<Complex64>,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn identity(n: usize) -> Self {
        Self { data: DMatrix::identity(n, n) }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self { data: &self.data * &other.data }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { data: &self.data + &other.data }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { data: self.data.map(|v| v * c) }
    }

    pub fn hermitian_deviation(&self) -> f64 {
        (&self.data - self.data.adjoint()).map(|v| v.norm()).max()
    }
}

/// Annihilation operator on the number basis: `a|n> = sqrt(n)|n-1>`.
pub fn annihilation(n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |r, c| {
        if c == r + 1 {
            Complex64::new((c as f64).sqrt(), 0.0)
        } else {
            Complex64::default()
        }
    })
}

pub fn creation(n: usize) -> DMatrix<Complex64> {
    annihilation(n).adjoint()
}

/// Position matrix `Q = sqrt(hbar/2)(a + a^dag)`.
pub fn position_matrix(n: usize, hbar: f64) -> OperatorMatrix {
    let a = annihilation(n);
    let s = Complex64::new((hbar / 2.0).sqrt(), 0.0);
    OperatorMatrix { data: (&a + a.adjoint()).map(|v| v * s) }
}

/// Momentum matrix `P = i sqrt(hbar/2)(a^dag - a)`.
pub fn momentum_matrix(n: usize, hbar: f64) -> OperatorMatrix {
    let a = annihilation(n);
    let s = Complex64::new(0.0, (hbar / 2.0).sqrt());
    OperatorMatrix { data: (a.adjoint() - &a).map(|v| v * s) }
}

/// Weyl-symmetrized operator of a polynomial symbol on an `n`-dimensional
/// truncated basis, using McCoy's form
/// `W(q^a p^b) = 2^-a sum_j C(a,j) Q^j P^b Q^(a-j)`.
pub fn weyl_to_matrix(symbol: &PolySymbol, n: usize, hbar: f64) -> Result<OperatorMatrix> {
    let deg = symbol.degree();
    if deg > WEYL_DEGREE_LIMIT {
        return Err(Error::DegreeOverflow { degree: deg, limit: WEYL_DEGREE_LIMIT });
    }
    let q = position_matrix(n, hbar);
    let p = momentum_matrix(n, hbar);
    // commutator check on the block untouched by truncation
    let comm = q.mul(&p).data.clone() - p.mul(&q).data.clone();
    let block = n - deg as usize - 1;
    let mut dev = 0.0f64;
    for r in 0..block {
        for c in 0..block {
            let expect = if r == c { Complex64::new(0.0, hbar) } else { Complex64::default() };
            dev = dev.max((comm[(r, c)] - expect).norm());
        }
    }
    if dev > 1e-8 {
        return Err(Error::TruncationTooSevere { deviation: dev });
    }

    let mut q_pows = vec![DMatrix::identity(n, n)];
    let mut p_pows = vec![DMatrix::identity(n, n)];
    for k in 1..=deg as usize {
        q_pows.push(&q_pows[k - 1] * &q.data);
        p_pows.push(&p_pows[k - 1] * &p.data);
    }
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    for (&(a, b), &coeff) in symbol.terms() {
        let mut mono = DMatrix::<Complex64>::zeros(n, n);
        for j in 0..=a {
            let c = binomial(a, j);
            mono += (&q_pows[j as usize] * &p_pows[b as usize] * &q_pows[(a - j) as usize])
                .map(|v| v * c);
        }
        let norm = coeff / 2f64.powi(a as i32);
        out += mono.map(|v| v * norm);
    }
    Ok(OperatorMatrix { data: out })
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut v = 1.0;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

/// Coefficients `<n|alpha> = e^{-|alpha|^2/2} alpha^n / sqrt(n!)`.
fn coherent_vector(alpha: Complex64, n: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::default(); n];
    v[0] = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for k in 1..n {
        v[k] = v[k - 1] * alpha / (k as f64).sqrt();
    }
    v
}

/// Husimi-type functional `h(q,p) = <alpha(q,p)|A|alpha(q,p)>`,
/// `alpha = (q + i p)/sqrt(2 hbar)`.
pub fn coherent_expectation(op: &OperatorMatrix, q: f64, p: f64, hbar: f64) -> Complex64 {
    let alpha = Complex64::new(q, p) / (2.0 * hbar).sqrt();
    let v = coherent_vector(alpha, op.dim());
    let mut acc = Complex64::default();
    for r in 0..op.dim() {
        let mut row = Complex64::default();
        for c in 0..op.dim() {
            row += op.data[(r, c)] * v[c];
        }
        acc += v[r].conj() * row;
    }
    acc
}

/// Inverse Weyl map restricted to polynomial content of total degree <= `degree`.
///
/// Fits `<alpha|A|alpha>` on a Chebyshev tensor grid (exact for polynomial
/// content) and applies the inverse Weierstrass map
/// `A_W = e^{-(hbar/4) Laplacian} h`, a finite sum on polynomials.
pub fn matrix_to_symbol_poly(op: &OperatorMatrix, degree: u32, hbar: f64) -> Result<PolySymbol> {
    let d = degree as usize;
    let m = d + 1;
    let r = 2.5 * hbar.sqrt();
    // Chebyshev nodes on [-r, r]
    let nodes: Vec<f64> = (0..m)
        .map(|i| r * (std::f64::consts::PI * (2.0 * i as f64 + 1.0) / (2.0 * m as f64)).cos())
        .collect();
    let mut h = DMatrix::<Complex64>::zeros(m, m);
    for (i, &qi) in nodes.iter().enumerate() {
        for (j, &pj) in nodes.iter().enumerate() {
            h[(i, j)] = coherent_expectation(op, qi, pj, hbar);
        }
    }
    // tensor interpolation in scaled variables u = q/r, v = p/r
    let vand = DMatrix::<Complex64>::from_fn(m, m, |i, a| {
        Complex64::new((nodes[i] / r).powi(a as i32), 0.0)
    });
    let lu = vand.lu();
    // solve V * C * V^T = H:  tmp = V^-1 H, then V C^T = tmp^T
    let tmp = lu.solve(&h).ok_or(Error::QuadratureDivergence)?;
    let ct = lu
        .solve(&tmp.transpose())
        .ok_or(Error::QuadratureDivergence)?
        .transpose();
    let mut husimi_poly = PolySymbol::zero();
    for a in 0..m {
        for b in 0..m {
            let coeff = ct[(a, b)] / r.powi((a + b) as i32);
            if coeff.norm() > 1e-13 {
                husimi_poly.add_term(a as u32, b as u32, coeff);
            }
        }
    }
    // inverse Weierstrass: sum_k (-hbar/4)^k / k! Laplacian^k
    let mut out = PolySymbol::zero();
    let mut term = husimi_poly;
    let mut k = 0u32;
    loop {
        let factor = (-hbar / 4.0).powi(k as i32) / (1..=k).map(|x| x as f64).product::<f64>();
        out = out.add(&term.scale(Complex64::new(factor, 0.0)));
        term = term.deriv(2, 0).add(&term.deriv(0, 2));
        if term.is_zero() {
            break;
        }
        k += 1;
    }
    Ok(out)
}

/// Inverse Weyl map sampled on a phase-space grid.
pub fn matrix_to_symbol(
    op: &OperatorMatrix,
    grid: &PhaseGrid,
    degree: u32,
    hbar: f64,
) -> Result<Array2<Complex64>> {
    let poly = matrix_to_symbol_poly(op, degree, hbar)?;
    let qs = grid.q_values();
    let ps = grid.p_values();
    Ok(Array2::from_shape_fn((grid.n_q, grid.n_p), |(j, l)| poly.eval(qs[j], ps[l])))
}

/// Dimensionless Hermite functions `u_n(x)` (hbar = 1) at the given points.
pub fn hermite_functions(points: &[f64], n_max: usize) -> Vec<Vec<f64>> {
    let mut u = vec![vec![0.0; points.len()]; n_max];
    for (i, &x) in points.iter().enumerate() {
        u[0][i] = std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp();
        if n_max > 1 {
            u[1][i] = std::f64::consts::SQRT_2 * x * u[0][i];
        }
    }
    for k in 2..n_max {
        for (i, &x) in points.iter().enumerate() {
            u[k][i] =
                (2.0 / k as f64).sqrt() * x * u[k - 1][i] - ((k - 1) as f64 / k as f64).sqrt() * u[k - 2][i];
        }
    }
    u
}

/// Gauss-Hermite nodes and weights for weight `e^{-x^2}` via Golub-Welsch.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        jac[(k - 1, k)] = b;
        jac[(k, k - 1)] = b;
    }
    let eig = jac.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let w = std::f64::consts::PI.sqrt() * eig.eigenvectors[(0, i)].powi(2);
            (eig.eigenvalues[i], w)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}
