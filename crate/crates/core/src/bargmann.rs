//! Segal-Bargmann space: truncated coefficient vectors in the monomial basis
//! {z^n} with the Gaussian-weight inner product `<f|g> = sum n! conj(f_n) g_n`
//! (the closed form of the mu_1 integral), the transform pair to position
//! space, ladder actions, spectral time evolution, and Husimi fields.
//!
//! Everything here works in the dimensionless convention; dimensional
//! operators enter through a single mass-power scaling at the caller.

use crate::grid::{PhaseGrid, PlaneGrid};
use crate::oscbasis::{gauss_hermite, hermite_functions, OperatorMatrix};
use crate::states::WaveFunction;
use crate::wigner::WignerField;
use crate::{Error, Result};
use nalgebra::DMatrix;
use ndarray::Array2;
use num_complex::Complex64;
use std::io::Write;

pub const DEFAULT_TRUNCATION: usize = 64;
pub const GUARD_BAND: usize = 4;
const TAIL_LIMIT: f64 = 1e-8;
/// Factorials overflow f64 beyond 170!.
const MAX_TRUNCATION: usize = 160;

#[derive(Debug, Clone)]
pub struct SBFunction {
    /// Monomial coefficients c_0..c_{N-1}; the weight parameter t is fixed to 1.
    pub coeffs: Vec<Complex64>,
}

fn factorials(n: usize) -> Vec<f64> {
    let mut f = vec![1.0; n];
    for k in 1..n {
        f[k] = f[k - 1] * k as f64;
    }
    f
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut f = vec![0.0; n];
    for k in 1..n {
        f[k] = f[k - 1] + (k as f64).ln();
    }
    f
}

impl SBFunction {
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() > MAX_TRUNCATION {
            return Err(Error::ValidationError {
                field: "coeffs".into(),
                reason: format!("length must be in 1..={MAX_TRUNCATION}"),
            });
        }
        Ok(Self { coeffs })
    }

    pub fn zero(n: usize) -> Self {
        Self { coeffs: vec![Complex64::default(); n] }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn norm_sq(&self) -> f64 {
        let fact = factorials(self.len());
        self.coeffs.iter().zip(&fact).map(|(c, f)| f * c.norm_sqr()).sum()
    }

    /// Weighted share of the top guard band in the squared norm.
    pub fn tail_share(&self) -> f64 {
        let fact = factorials(self.len());
        let total: f64 = self.coeffs.iter().zip(&fact).map(|(c, f)| f * c.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let start = self.len().saturating_sub(GUARD_BAND);
        let tail: f64 = self.coeffs[start..]
            .iter()
            .zip(&fact[start..])
            .map(|(c, f)| f * c.norm_sqr())
            .sum();
        tail / total
    }

    pub fn is_admissible(&self) -> bool {
        self.tail_share() <= TAIL_LIMIT
    }

    /// Polynomial evaluation by Horner's rule.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::default();
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|v| v * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }
}

/// `<f|g> = sum_n n! conj(f_n) g_n`.
pub fn sb_inner(f: &SBFunction, g: &SBFunction) -> Complex64 {
    let n = f.len().min(g.len());
    let fact = factorials(n);
    (0..n).map(|k| fact[k] * f.coeffs[k].conj() * g.coeffs[k]).sum()
}

/// Transform a position-space wave function into SB coefficients.
///
/// The kernel integral against `e^{(-z^2 - q'^2 + 2 sqrt2 q' z)/2}/pi^{1/4}`
/// collapses, order by order in z, to Hermite-function overlaps:
/// `c_n = <u_n|psi>/sqrt(n!)`; the overlaps are evaluated trapezoidally on
/// the state's own grid (exponentially accurate for admitted packets).
pub fn sb_transform(psi: &WaveFunction, n_max: usize) -> Result<SBFunction> {
    if n_max == 0 || n_max > MAX_TRUNCATION {
        return Err(Error::ValidationError {
            field: "n_max".into(),
            reason: format!("must be in 1..={MAX_TRUNCATION}"),
        });
    }
    let qs = psi.grid.q_values();
    let u = hermite_functions(&qs, n_max);
    let dq = psi.grid.dq();
    let fact = factorials(n_max);
    let coeffs: Vec<Complex64> = (0..n_max)
        .map(|n| {
            let overlap: Complex64 =
                u[n].iter().zip(&psi.values).map(|(&un, v)| un * v).sum::<Complex64>() * dq;
            overlap / fact[n].sqrt()
        })
        .collect();
    let phi = SBFunction { coeffs };
    let share = phi.tail_share();
    if share > TAIL_LIMIT {
        return Err(Error::TruncationOverflow { share, limit: TAIL_LIMIT });
    }
    // mass that fell outside the basis entirely
    let deficit = (psi.norm_sq() - phi.norm_sq()).abs() / psi.norm_sq().max(1e-300);
    if deficit > TAIL_LIMIT {
        return Err(Error::TruncationOverflow { share: deficit, limit: TAIL_LIMIT });
    }
    Ok(phi)
}

/// Inverse transform by Gauss-Hermite quadrature of the contour kernel:
/// `psi(q') = e^{-q'^2/2} pi^{-3/4} sum_i w_i phi(sqrt2 q' + i sqrt2 s_i)`.
/// Exact (to roundoff) for truncated polynomials when the node count covers
/// the degree.
pub fn sb_inverse(phi: &SBFunction, grid: &PhaseGrid, hbar: f64) -> Result<WaveFunction> {
    let m = phi.len().max(40);
    let (nodes, weights) = gauss_hermite(m);
    for c in &phi.coeffs {
        if !c.is_finite() {
            return Err(Error::QuadratureDivergence);
        }
    }
    let prefactor = std::f64::consts::PI.powf(-0.75);
    let values: Vec<Complex64> = grid
        .q_values()
        .iter()
        .map(|&q| {
            let mut acc = Complex64::default();
            for (s, w) in nodes.iter().zip(&weights) {
                let z = Complex64::new(std::f64::consts::SQRT_2 * q, std::f64::consts::SQRT_2 * s);
                acc += w * phi.eval(z);
            }
            acc * prefactor * (-q * q / 2.0).exp()
        })
        .collect();
    WaveFunction::from_values(grid.clone(), values, hbar)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SBOp {
    /// d/dz
    Annihilate,
    /// multiplication by z
    Create,
    /// (z + d_z)/sqrt2
    Position,
    /// i (z - d_z)/sqrt2
    Momentum,
}

fn apply_annihilate(phi: &SBFunction) -> SBFunction {
    let n = phi.len();
    let mut out = vec![Complex64::default(); n];
    for k in 0..n - 1 {
        out[k] = (k + 1) as f64 * phi.coeffs[k + 1];
    }
    SBFunction { coeffs: out }
}

fn apply_create(phi: &SBFunction) -> Result<SBFunction> {
    let n = phi.len();
    let dropped = phi.coeffs[n - 1];
    if dropped != Complex64::default() {
        // the dropped coefficient would carry weight n! |c|^2 at index n
        let fact_n: f64 = (1..=n).map(|x| x as f64).product();
        let share = fact_n * dropped.norm_sqr() / phi.norm_sq().max(1e-300);
        if share > TAIL_LIMIT {
            return Err(Error::TruncationOverflow { share, limit: TAIL_LIMIT });
        }
    }
    let mut out = vec![Complex64::default(); n];
    for k in 1..n {
        out[k] = phi.coeffs[k - 1];
    }
    Ok(SBFunction { coeffs: out })
}

pub fn sb_apply(op: SBOp, phi: &SBFunction) -> Result<SBFunction> {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    match op {
        SBOp::Annihilate => Ok(apply_annihilate(phi)),
        SBOp::Create => apply_create(phi),
        SBOp::Position => {
            let z = apply_create(phi)?;
            let d = apply_annihilate(phi);
            Ok(z.add(&d)?.scale(Complex64::new(inv_sqrt2, 0.0)))
        }
        SBOp::Momentum => {
            let z = apply_create(phi)?;
            let d = apply_annihilate(phi);
            Ok(z.add(&d.scale(Complex64::new(-1.0, 0.0)))?.scale(Complex64::new(0.0, inv_sqrt2)))
        }
    }
}

/// Coefficient-space matrix of d/dz on the monomial basis.
pub fn annihilation_coeff_matrix(n: usize) -> OperatorMatrix {
    OperatorMatrix {
        data: DMatrix::from_fn(n, n, |r, c| {
            if c == r + 1 {
                Complex64::new(c as f64, 0.0)
            } else {
                Complex64::default()
            }
        }),
    }
}

/// Coefficient-space matrix of multiplication by z.
pub fn creation_coeff_matrix(n: usize) -> OperatorMatrix {
    OperatorMatrix {
        data: DMatrix::from_fn(n, n, |r, c| {
            if r == c + 1 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::default()
            }
        }),
    }
}

/// Dimensionless position operator `(z + d_z)/sqrt2` on coefficients.
pub fn position_coeff_matrix(n: usize) -> OperatorMatrix {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    creation_coeff_matrix(n).add(&annihilation_coeff_matrix(n)).scale(s)
}

/// Dimensionless momentum operator `i (z - d_z)/sqrt2` on coefficients.
pub fn momentum_coeff_matrix(n: usize) -> OperatorMatrix {
    let s = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
    creation_coeff_matrix(n)
        .add(&annihilation_coeff_matrix(n).scale(Complex64::new(-1.0, 0.0)))
        .scale(s)
}

/// `H = P^2/2m + potential_energy`, dimensional momentum `P = m P'`.
pub fn free_hamiltonian_matrix(n: usize, mass: f64, potential_energy: f64) -> OperatorMatrix {
    let p = momentum_coeff_matrix(n);
    let mut h = p.mul(&p).scale(Complex64::new(mass / 2.0, 0.0));
    for k in 0..n {
        h.data[(k, k)] += Complex64::new(potential_energy, 0.0);
    }
    h
}

/// Ring Hamiltonian `(P - q_c A)^2/2m` with `P = m P'`.
pub fn ring_hamiltonian_matrix(n: usize, mass: f64, charge_times_a: f64) -> OperatorMatrix {
    let p = momentum_coeff_matrix(n).scale(Complex64::new(mass, 0.0));
    let mut shifted = p;
    for k in 0..n {
        shifted.data[(k, k)] -= Complex64::new(charge_times_a, 0.0);
    }
    shifted.mul(&shifted).scale(Complex64::new(0.5 / mass, 0.0))
}

/// Oscillator Hamiltonian `omega (z d_z + 1/2)` on coefficients (diagonal).
pub fn oscillator_hamiltonian_matrix(n: usize, omega: f64) -> OperatorMatrix {
    OperatorMatrix {
        data: DMatrix::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::new(omega * (r as f64 + 0.5), 0.0)
            } else {
                Complex64::default()
            }
        }),
    }
}

/// Exact oscillator spectrum `E_n = omega (n + 1/2)` as realized on the basis.
pub fn harmonic_spectrum(n: usize, omega: f64) -> Vec<f64> {
    let h = oscillator_hamiltonian_matrix(n, omega);
    (0..n).map(|k| h.data[(k, k)].re).collect()
}

/// Spectral time evolution `phi(t) = exp(-i H t/hbar) phi(0)`.
///
/// `h` acts on monomial coefficients and must be Hermitian with respect to
/// the weighted inner product; the similarity `D H D^-1` with
/// `D = diag(sqrt(n!))` makes that ordinary Hermiticity, checked here.
pub fn sb_evolve(phi: &SBFunction, h: &OperatorMatrix, t: f64, hbar: f64) -> Result<SBFunction> {
    let n = phi.len();
    if h.dim() != n {
        return Err(Error::GridMismatch);
    }
    let lf = ln_factorials(n);
    let mut tilde = DMatrix::<Complex64>::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let v = h.data[(r, c)];
            if v != Complex64::default() {
                tilde[(r, c)] = v * (0.5 * (lf[r] - lf[c])).exp();
            }
        }
    }
    let scale = tilde.map(|v| v.norm()).max().max(1e-300);
    let dev = (&tilde - tilde.adjoint()).map(|v| v.norm()).max() / scale;
    if dev > 1e-10 {
        return Err(Error::NonHermitian { deviation: dev });
    }
    let eig = tilde.symmetric_eigen();
    // normalized-basis vector d = D c
    let d = nalgebra::DVector::from_fn(n, |k, _| phi.coeffs[k] * (0.5 * lf[k]).exp());
    let modes = eig.eigenvectors.adjoint() * d;
    let evolved = nalgebra::DVector::from_fn(n, |k, _| {
        modes[k] * Complex64::from_polar(1.0, -eig.eigenvalues[k] * t / hbar)
    });
    let back = &eig.eigenvectors * evolved;
    let coeffs: Vec<Complex64> = (0..n).map(|k| back[k] * (-0.5 * lf[k]).exp()).collect();
    Ok(SBFunction { coeffs })
}

#[derive(Debug, Clone)]
pub struct HusimiField {
    pub grid: PlaneGrid,
    pub values: Array2<f64>,
}

impl HusimiField {
    pub fn max(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |a, &v| a.min(v))
    }

    /// Integral under the fixed measure convention `2 d(re z) d(im z)`
    /// (the Jacobian of `z = (q - i p)/sqrt2`); the ground state normalizes
    /// to one and the pointwise bound `1/(2 pi)` is untouched.
    pub fn integral(&self) -> f64 {
        self.values.sum() * self.grid.d_re() * self.grid.d_im() * 2.0
    }

    /// Marginal over the imaginary axis (no physical meaning; the Husimi
    /// function has no marginal property).
    pub fn marginal_re(&self) -> Vec<f64> {
        let d = self.grid.d_im();
        (0..self.grid.n_re)
            .map(|i| (0..self.grid.n_im).map(|j| self.values[(i, j)]).sum::<f64>() * d)
            .collect()
    }

    /// CSV rows `re_z,im_z,h`, row-major, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "re_z,im_z,h")?;
        let res = self.grid.re_values();
        let ims = self.grid.im_values();
        for (i, &x) in res.iter().enumerate() {
            for (j, &y) in ims.iter().enumerate() {
                writeln!(out, "{:.16e},{:.16e},{:.16e}", x, y, self.values[(i, j)])?;
            }
        }
        Ok(())
    }
}

/// `H(z) = e^{-|z|^2} |phi(z)|^2 / (2 pi)` evaluated on the plane grid.
pub fn husimi_from_sb(phi: &SBFunction, plane: &PlaneGrid) -> HusimiField {
    let res = plane.re_values();
    let ims = plane.im_values();
    let values = Array2::from_shape_fn((plane.n_re, plane.n_im), |(i, j)| {
        let z = Complex64::new(res[i], ims[j]);
        (-z.norm_sqr()).exp() * phi.eval(z).norm_sqr() / (2.0 * std::f64::consts::PI)
    });
    HusimiField { grid: plane.clone(), values }
}

/// Gaussian smoothing of a Wigner field:
/// `H(z) = pi^-1 integral e^{-|sqrt2 z - q' + i p'|^2} W(q',p') dq' dp'`,
/// evaluated with separable kernels (the convolution never leaves the
/// dimensionless hbar = 1 setting of the transform).
pub fn husimi_from_wigner(w: &WignerField, plane: &PlaneGrid) -> Result<HusimiField> {
    if (w.hbar - 1.0).abs() > 1e-12 {
        return Err(Error::FormalismMismatch {
            formalism: "segal-bargmann".into(),
            reason: "Husimi smoothing is defined in the dimensionless hbar = 1 convention".into(),
        });
    }
    let qs = w.grid.q_values();
    let ps = w.grid.p_values();
    let res = plane.re_values();
    let ims = plane.im_values();
    let nq = w.grid.n_q;
    let np = w.grid.n_p;
    // K_x[i][j] = e^{-(sqrt2 x_i - q_j)^2}, K_y[l][k] = e^{-(sqrt2 y_l + p_k)^2}
    let kx: Vec<f64> = res
        .iter()
        .flat_map(|&x| qs.iter().map(move |&q| (-(std::f64::consts::SQRT_2 * x - q).powi(2)).exp()))
        .collect();
    let ky: Vec<f64> = ims
        .iter()
        .flat_map(|&y| ps.iter().map(move |&p| (-(std::f64::consts::SQRT_2 * y + p).powi(2)).exp()))
        .collect();
    let scale = w.grid.dq() * w.grid.dp() / std::f64::consts::PI;
    // tmp[j][l_img] = sum_k W[j][k] ky[l][k]
    let mut tmp = vec![0.0f64; nq * plane.n_im];
    for j in 0..nq {
        for l in 0..plane.n_im {
            let mut acc = 0.0;
            for k in 0..np {
                acc += w.values[(j, k)] * ky[l * np + k];
            }
            tmp[j * plane.n_im + l] = acc;
        }
    }
    let values = Array2::from_shape_fn((plane.n_re, plane.n_im), |(i, l)| {
        let mut acc = 0.0;
        for j in 0..nq {
            acc += kx[i * nq + j] * tmp[j * plane.n_im + l];
        }
        acc * scale
    });
    Ok(HusimiField { grid: plane.clone(), values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::make_gaussian_packet;
    use crate::wigner::wigner_from_position;
    use crate::PhysicalConstants;
    use approx::assert_abs_diff_eq;

    fn line_grid() -> PhaseGrid {
        PhaseGrid::line(-12.0, 12.0, 512, 1.0).unwrap()
    }

    fn ground_state() -> WaveFunction {
        make_gaussian_packet(&line_grid(), 0.0, 0.0, 1.0, &PhysicalConstants::default()).unwrap()
    }

    #[test]
    fn ground_state_maps_to_unit_constant() {
        let phi = sb_transform(&ground_state(), DEFAULT_TRUNCATION).unwrap();
        assert_abs_diff_eq!(phi.coeffs[0].re, 1.0, epsilon = 1e-10);
        for c in &phi.coeffs[1..] {
            assert!(c.norm() < 1e-10);
        }
        assert_abs_diff_eq!(phi.norm_sq(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn zero_input_zero_coeffs() {
        let grid = line_grid();
        let psi = WaveFunction::from_values(grid.clone(), vec![Complex64::default(); grid.n_q], 1.0).unwrap();
        let phi = sb_transform(&psi, 32).unwrap();
        assert!(phi.coeffs.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn hermite_eigenfunction_maps_to_monomial() {
        let grid = line_grid();
        let qs = grid.q_values();
        let u = hermite_functions(&qs, 6);
        let n = 3;
        let psi = WaveFunction::from_values(
            grid.clone(),
            u[n].iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            1.0,
        )
        .unwrap();
        let phi = sb_transform(&psi, 32).unwrap();
        for (k, c) in phi.coeffs.iter().enumerate() {
            if k == n {
                assert_abs_diff_eq!(c.re, 1.0 / 6f64.sqrt(), epsilon = 1e-10); // 1/sqrt(3!)
            } else {
                assert!(c.norm() < 1e-10, "k={k}");
            }
        }
    }

    #[test]
    fn inverse_of_unit_constant_is_gaussian() {
        let grid = line_grid();
        let phi = SBFunction::from_coeffs(vec![Complex64::new(1.0, 0.0); 1]).unwrap();
        let psi = sb_inverse(&phi, &grid, 1.0).unwrap();
        for (j, &q) in grid.q_values().iter().enumerate() {
            let expect = std::f64::consts::PI.powf(-0.25) * (-q * q / 2.0).exp();
            assert!((psi.values[j].re - expect).abs() < 1e-12, "q={q}");
            assert!(psi.values[j].im.abs() < 1e-14);
        }
    }

    #[test]
    fn inverse_of_z_is_first_excited() {
        let grid = line_grid();
        let phi = SBFunction::from_coeffs(vec![Complex64::default(), Complex64::new(1.0, 0.0)]).unwrap();
        let psi = sb_inverse(&phi, &grid, 1.0).unwrap();
        // z/sqrt(1!) is the normalized image of u_1; here phi = z so psi = u_1
        let qs = grid.q_values();
        let u = hermite_functions(&qs, 2);
        for (j, &expect) in u[1].iter().enumerate() {
            assert!((psi.values[j].re - expect).abs() < 1e-10);
        }
        // odd function with a single node at the origin
        assert!(psi.values[grid.n_q / 2].norm() < 1e-12);
    }

    #[test]
    fn roundtrip_random_packets() {
        let grid = line_grid();
        let c = PhysicalConstants::default();
        for (q0, p0, w) in [(0.5, 0.3, 1.0), (-1.0, -0.8, 1.2), (1.5, 0.0, 0.9)] {
            let psi = make_gaussian_packet(&grid, q0, p0, w, &c).unwrap();
            let phi = sb_transform(&psi, DEFAULT_TRUNCATION).unwrap();
            let back = sb_inverse(&phi, &grid, 1.0).unwrap();
            let mut l2 = 0.0;
            for (a, b) in psi.values.iter().zip(&back.values) {
                l2 += (a - b).norm_sqr() * grid.dq();
            }
            assert!(l2.sqrt() < 1e-8, "roundtrip L2 {} for ({q0},{p0},{w})", l2.sqrt());
        }
    }

    #[test]
    fn transform_isometry() {
        let grid = line_grid();
        let c = PhysicalConstants::default();
        let a = make_gaussian_packet(&grid, 0.4, 0.7, 1.1, &c).unwrap();
        let b = make_gaussian_packet(&grid, -0.6, -0.1, 0.95, &c).unwrap();
        let fa = sb_transform(&a, DEFAULT_TRUNCATION).unwrap();
        let fb = sb_transform(&b, DEFAULT_TRUNCATION).unwrap();
        let lhs = sb_inner(&fa, &fb);
        let rhs = a.inner(&b).unwrap();
        assert!((lhs - rhs).norm() < 1e-8, "isometry gap {}", (lhs - rhs).norm());
    }

    #[test]
    fn inner_product_monomials() {
        let mut f = SBFunction::zero(8);
        f.coeffs[3] = Complex64::new(1.0, 0.0);
        let mut g = SBFunction::zero(8);
        g.coeffs[3] = Complex64::new(1.0, 0.0);
        assert_abs_diff_eq!(sb_inner(&f, &g).re, 6.0, epsilon = 1e-14); // 3! = 6
        g.coeffs[3] = Complex64::default();
        g.coeffs[5] = Complex64::new(1.0, 0.0);
        assert!(sb_inner(&f, &g).norm() < 1e-15);
        // positive definiteness
        let h = SBFunction::from_coeffs(vec![
            Complex64::new(0.2, -0.1),
            Complex64::new(0.0, 0.4),
            Complex64::new(-0.3, 0.0),
        ])
        .unwrap();
        assert!(sb_inner(&h, &h).re > 0.0);
        assert!(sb_inner(&h, &h).im.abs() < 1e-16);
    }

    #[test]
    fn adjoint_relation() {
        // <d_z f | g> = <f | z g> exactly on coefficients
        let decay = |k: usize, re: f64, im: f64| {
            let mut fk = 1.0;
            for x in 1..=k {
                fk *= x as f64;
            }
            Complex64::new(re, im) * (0.8f64.powi(k as i32) / fk.sqrt())
        };
        let mut f = SBFunction::from_coeffs((0..16).map(|k| decay(k, 0.7, -0.2)).collect()).unwrap();
        let mut g = SBFunction::from_coeffs((0..16).map(|k| decay(k, -0.4, 0.9)).collect()).unwrap();
        f.coeffs[15] = Complex64::default();
        g.coeffs[15] = Complex64::default();
        let df = apply_annihilate(&f);
        let zg = apply_create(&g).unwrap();
        let lhs = sb_inner(&df, &g);
        let rhs = sb_inner(&f, &zg);
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1.0));
    }

    #[test]
    fn commutator_is_identity() {
        let mut phi = SBFunction::from_coeffs(
            (0..24)
                .map(|k| {
                    let mut fk = 1.0;
                    for x in 1..=k {
                        fk *= x as f64;
                    }
                    Complex64::new(0.9f64.powi(k as i32) / fk.sqrt(), 0.0)
                })
                .collect(),
        )
        .unwrap();
        phi.coeffs[23] = Complex64::default();
        let az = sb_apply(SBOp::Annihilate, &sb_apply(SBOp::Create, &phi).unwrap()).unwrap();
        let za = sb_apply(SBOp::Create, &sb_apply(SBOp::Annihilate, &phi).unwrap()).unwrap();
        // [d_z, z] phi = phi below the truncation guard
        for k in 0..phi.len() - 2 {
            let diff = az.coeffs[k] - za.coeffs[k] - phi.coeffs[k];
            assert!(diff.norm() < 1e-15, "k={k}");
        }
    }

    #[test]
    fn annihilate_vacuum() {
        let mut phi = SBFunction::zero(8);
        phi.coeffs[0] = Complex64::new(1.0, 0.0);
        let out = sb_apply(SBOp::Annihilate, &phi).unwrap();
        assert!(out.coeffs.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn create_overflow_guard() {
        let mut phi = SBFunction::zero(8);
        phi.coeffs[7] = Complex64::new(1.0, 0.0);
        assert!(matches!(sb_apply(SBOp::Create, &phi), Err(Error::TruncationOverflow { .. })));
    }

    /// Truncated coefficients of the ring image `e^{z^2/2 + a z}` with the
    /// top `guard` entries zeroed.
    fn ring_image(n: usize, a: Complex64, guard: usize) -> SBFunction {
        let mut coeffs = vec![Complex64::default(); n];
        for total in 0..n.saturating_sub(guard) {
            let mut acc = Complex64::default();
            let mut j = 0;
            while 2 * j <= total {
                let k = total - 2 * j;
                let mut term = Complex64::new(1.0, 0.0);
                for _ in 0..j {
                    term *= 0.5;
                }
                let mut jf = 1.0;
                for x in 1..=j {
                    jf *= x as f64;
                }
                let mut kf = 1.0;
                for x in 1..=k {
                    kf *= x as f64;
                }
                acc += term * a.powu(k as u32) / (jf * kf);
                j += 1;
            }
            coeffs[total] = acc;
        }
        SBFunction { coeffs }
    }

    #[test]
    fn ring_image_momentum_eigenvalue() {
        // phi_+ = e^{z(4 i sqrt(E/m) + z)/2} has dimensionless momentum p0/m;
        // the dimensional eigenvalue is sqrt(2 E m)
        let (e, m): (f64, f64) = (2.0, 1.0);
        let p_dimless = (2.0 * e / m).sqrt() / m;
        let a = Complex64::new(0.0, std::f64::consts::SQRT_2 * p_dimless);
        let phi = ring_image(48, a, 6);
        let p_phi = sb_apply(SBOp::Momentum, &phi).unwrap();
        for k in 1..40 {
            let expect = phi.coeffs[k] * p_dimless;
            assert!(
                (p_phi.coeffs[k] - expect).norm() < 1e-12 * phi.coeffs[k].norm().max(1e-6),
                "k={k}"
            );
        }
        // dimensional check: m * p' = sqrt(2 E m)
        assert_abs_diff_eq!(m * p_dimless, (2.0 * e * m).sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn harmonic_spectrum_exact() {
        let spec = harmonic_spectrum(64, 1.0);
        assert_abs_diff_eq!(spec[0], 0.5, epsilon = 1e-15);
        for (n, pair) in spec.windows(2).enumerate() {
            assert_abs_diff_eq!(pair[1] - pair[0], 1.0, epsilon = 1e-13);
            assert_abs_diff_eq!(pair[0], n as f64 + 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn spectrum_matches_number_basis_oracle() {
        // independent route: (P^2 + Q^2)/2 on the truncated number basis.
        // The truncated a a^dag corrupts one eigenvalue at (N-1)/2, so the
        // oracle basis is oversized and only the clean range is compared.
        let n = 128;
        let q = crate::oscbasis::position_matrix(n, 1.0);
        let p = crate::oscbasis::momentum_matrix(n, 1.0);
        let h = q.mul(&q).add(&p.mul(&p)).scale(Complex64::new(0.5, 0.0));
        let eig = h.data.symmetric_eigen();
        let mut evs: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        evs.sort_by(f64::total_cmp);
        let sb = harmonic_spectrum(64, 1.0);
        for (k, expect) in sb.iter().enumerate().take(60) {
            assert!((evs[k] - expect).abs() < 1e-10, "n={k}: {} vs {}", evs[k], expect);
        }
    }

    #[test]
    fn evolve_eigenstate_global_phase() {
        let n = 32;
        let h = oscillator_hamiltonian_matrix(n, 1.0);
        let mut phi = SBFunction::zero(n);
        phi.coeffs[2] = Complex64::new(1.0, 0.0) / 2f64.sqrt(); // normalized z^2/sqrt(2!)
        let t = 0.83;
        let out = sb_evolve(&phi, &h, t, 1.0).unwrap();
        let expect = Complex64::from_polar(1.0 / 2f64.sqrt(), -2.5 * t);
        assert!((out.coeffs[2] - expect).norm() < 1e-12);
    }

    #[test]
    fn evolve_t_zero_is_identity() {
        let n = 24;
        let h = free_hamiltonian_matrix(n, 1.0, 0.3);
        let phi = sb_transform(&ground_state(), n).unwrap();
        let out = sb_evolve(&phi, &h, 0.0, 1.0).unwrap();
        for (a, b) in out.coeffs.iter().zip(&phi.coeffs) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn coherent_superposition_revival() {
        // oscillator spectrum is equally spaced: |<phi(2 pi)|phi(0)>| = 1
        let n = 48;
        let grid = line_grid();
        let c = PhysicalConstants::default();
        let psi_a = make_gaussian_packet(&grid, 1.0, 0.0, 1.0, &c).unwrap();
        let psi_b = make_gaussian_packet(&grid, -1.0, 0.5, 1.0, &c).unwrap();
        let mut sum = WaveFunction::from_values(
            grid.clone(),
            psi_a.values.iter().zip(&psi_b.values).map(|(x, y)| x + y).collect(),
            1.0,
        )
        .unwrap();
        sum.normalize();
        let phi = sb_transform(&sum, n).unwrap();
        let h = oscillator_hamiltonian_matrix(n, 1.0);
        let out = sb_evolve(&phi, &h, 2.0 * std::f64::consts::PI, 1.0).unwrap();
        let overlap = sb_inner(&out, &phi);
        assert_abs_diff_eq!(overlap.norm(), 1.0, epsilon = 1e-10);
        // norm conserved
        assert_abs_diff_eq!(out.norm_sq(), phi.norm_sq(), epsilon = 1e-10);
    }

    #[test]
    fn non_hermitian_rejected() {
        let n = 8;
        let mut h = free_hamiltonian_matrix(n, 1.0, 0.0);
        h.data[(0, 3)] += Complex64::new(0.5, 0.2);
        let phi = SBFunction::zero(n);
        assert!(matches!(sb_evolve(&phi, &h, 1.0, 1.0), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn husimi_ground_state() {
        let plane = PlaneGrid::centered(5.0, 96).unwrap();
        let phi = SBFunction::from_coeffs(vec![Complex64::new(1.0, 0.0)]).unwrap();
        let h = husimi_from_sb(&phi, &plane);
        let two_pi = 2.0 * std::f64::consts::PI;
        // peak at the origin with value 1/(2 pi)
        let center = h.values[(48, 48)];
        assert_abs_diff_eq!(center, 1.0 / two_pi, epsilon = 1e-8);
        assert!(h.max() <= 1.0 / two_pi + 1e-9);
        assert!(h.min() >= -1e-12);
        assert_abs_diff_eq!(h.integral(), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn husimi_two_paths_agree() {
        let grid = PhaseGrid::line(-12.0, 12.0, 256, 1.0).unwrap();
        let c = PhysicalConstants::default();
        let plane = PlaneGrid::centered(4.5, 80).unwrap();
        let psi = make_gaussian_packet(&grid, 1.0, -0.7, 1.0, &c).unwrap();
        let phi = sb_transform(&psi, DEFAULT_TRUNCATION).unwrap();
        let ha = husimi_from_sb(&phi, &plane);
        let w = wigner_from_position(&psi).unwrap();
        let hb = husimi_from_wigner(&w, &plane).unwrap();
        let gap = ha
            .values
            .iter()
            .zip(hb.values.iter())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(gap < 1e-6, "two-path gap {gap}");
        // peak sits at z = (q0 - i p0)/sqrt2
        let (mut bi, mut bj, mut best) = (0, 0, 0.0);
        for i in 0..plane.n_re {
            for j in 0..plane.n_im {
                if ha.values[(i, j)] > best {
                    best = ha.values[(i, j)];
                    bi = i;
                    bj = j;
                }
            }
        }
        let x = plane.re_values()[bi];
        let y = plane.im_values()[bj];
        assert!((x - 1.0 / std::f64::consts::SQRT_2).abs() < plane.d_re());
        assert!((y + (-0.7) / std::f64::consts::SQRT_2).abs() < plane.d_im());
    }

    #[test]
    fn smoothing_removes_negativity() {
        let grid = PhaseGrid::line(-12.0, 12.0, 256, 1.0).unwrap();
        let qs = grid.q_values();
        let u = hermite_functions(&qs, 2);
        let psi = WaveFunction::from_values(
            grid.clone(),
            u[1].iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            1.0,
        )
        .unwrap();
        let w = wigner_from_position(&psi).unwrap();
        assert!(w.values.iter().fold(f64::INFINITY, |a, &v| a.min(v)) < -0.25);
        let plane = PlaneGrid::centered(4.5, 64).unwrap();
        let h = husimi_from_wigner(&w, &plane).unwrap();
        assert!(h.min() >= -1e-12, "smoothed min {}", h.min());
        let phi = sb_transform(&psi, 32).unwrap();
        let hs = husimi_from_sb(&phi, &plane);
        let gap = h
            .values
            .iter()
            .zip(hs.values.iter())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(gap < 1e-6);
    }

    #[test]
    fn no_marginal_property() {
        // integral of H over im z does NOT reproduce |psi(sqrt2 re z)|^2
        let grid = line_grid();
        let qs = grid.q_values();
        let u = hermite_functions(&qs, 2);
        let psi = WaveFunction::from_values(
            grid.clone(),
            u[1].iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            1.0,
        )
        .unwrap();
        let phi = sb_transform(&psi, 32).unwrap();
        let plane = PlaneGrid::centered(6.0, 128).unwrap();
        let h = husimi_from_sb(&phi, &plane);
        let marg = h.marginal_re();
        let mut l2 = 0.0;
        for (i, &x) in plane.re_values().iter().enumerate() {
            let q = std::f64::consts::SQRT_2 * x;
            let density = 2.0 * q * q / std::f64::consts::PI.sqrt() * (-q * q).exp() / 2f64.sqrt();
            // |u_1(q)|^2 = 2 q^2 e^{-q^2}/sqrt(pi)
            let exact = 2.0 * q * q * (-q * q).exp() / std::f64::consts::PI.sqrt();
            let _ = density;
            l2 += (marg[i] - exact).powi(2) * plane.d_re();
        }
        assert!(l2.sqrt() > 1e-3, "marginal gap unexpectedly small: {}", l2.sqrt());
    }
}
