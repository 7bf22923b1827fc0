//! Wigner and cross-Wigner fields built from wave functions.
//!
//! `W(q,p) = (2 pi hbar)^(-1) integral dy e^{-i p y/hbar} psi(q+y/2) psi*(q-y/2)`
//! is evaluated by resampling psi at half-step offsets with band-limited
//! interpolation and transforming over the offset axis. The momentum rows are
//! the Fourier conjugates of the position axis, so ring eigenmodes land on
//! single rows exactly.

use crate::fft::{fft_inplace, ifft_inplace, mode_numbers, upsample2};
use crate::grid::PhaseGrid;
use crate::states::{MomentumWaveFunction, WaveFunction};
use crate::{Error, Result};
use ndarray::Array2;
use num_complex::Complex64;
use std::io::Write;

const ALIAS_LIMIT: f64 = 1e-8;
const IMAG_RESIDUE_LIMIT: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct WignerField {
    pub grid: PhaseGrid,
    /// Real samples, shape (n_q, n_p).
    pub values: Array2<f64>,
    pub hbar: f64,
}

#[derive(Debug, Clone)]
pub struct CrossWignerField {
    pub grid: PhaseGrid,
    /// Complex samples, shape (n_q, n_p).
    pub values: Array2<Complex64>,
    pub hbar: f64,
}

/// Offset-correlation transform shared by every Wigner-type construction:
/// rows are FFTs over the offset index of `ua(q + y/2) * conj(ub(q - y/2))`.
fn offset_transform(
    ua: &[Complex64],
    ub: &[Complex64],
    grid: &PhaseGrid,
    hbar: f64,
) -> Result<Array2<Complex64>> {
    let n = grid.n_q;
    debug_assert_eq!(ua.len(), 2 * n);
    let dq = grid.dq();
    let modes = mode_numbers(n);
    // e^{-i p_min y_m / hbar} with y_m = m dq
    let phase: Vec<Complex64> = modes
        .iter()
        .map(|&m| Complex64::from_polar(1.0, -grid.p_min * m as f64 * dq / hbar))
        .collect();
    let scale = dq / (2.0 * std::f64::consts::PI * hbar);
    let mut out = Array2::<Complex64>::zeros((n, grid.n_p));
    let mut g = vec![Complex64::default(); n];
    let two_n = 2 * n as i64;
    let mut worst_boundary = 0.0f64;
    let mut peak = 0.0f64;
    // On a line the offset window is half-open, leaving the Nyquist bin
    // without a conjugate partner; dropping it keeps real fields exactly real
    // and changes the quadrature only by the (guarded) boundary correlation.
    // On a ring the full bin set is the exact DFT and must stay intact.
    let drop_unpaired = !grid.periodic_q;
    for j in 0..n {
        for (mi, &m) in modes.iter().enumerate() {
            let ip = (2 * j as i64 + m).rem_euclid(two_n) as usize;
            let im = (2 * j as i64 - m).rem_euclid(two_n) as usize;
            let corr = ua[ip] * ub[im].conj();
            let mag = corr.norm();
            if mag > peak {
                peak = mag;
            }
            if m == -(n as i64) / 2 {
                if mag > worst_boundary {
                    worst_boundary = mag;
                }
                if drop_unpaired {
                    g[mi] = Complex64::default();
                    continue;
                }
            }
            g[mi] = corr * phase[mi];
        }
        fft_inplace(&mut g);
        for l in 0..grid.n_p {
            out[(j, l)] = g[l] * scale;
        }
    }
    if !grid.periodic_q && peak > 0.0 && worst_boundary / peak > ALIAS_LIMIT {
        return Err(Error::AliasingDetected { magnitude: worst_boundary / peak, limit: ALIAS_LIMIT });
    }
    Ok(out)
}

pub fn wigner_from_position(psi: &WaveFunction) -> Result<WignerField> {
    let grid = &psi.grid;
    if !grid.momentum_is_conjugate(psi.hbar) {
        return Err(Error::GridMismatch);
    }
    let up = upsample2(&psi.values);
    let complex = offset_transform(&up, &up, grid, psi.hbar)?;
    let residue = complex.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    if residue > IMAG_RESIDUE_LIMIT {
        return Err(Error::AliasingDetected { magnitude: residue, limit: IMAG_RESIDUE_LIMIT });
    }
    Ok(WignerField { grid: grid.clone(), values: complex.mapv(|v| v.re), hbar: psi.hbar })
}

/// Mirror construction from the momentum representation, kernel `e^{+i q u/hbar}`.
///
/// On a ring the momentum amplitudes live on a discrete lattice, and
/// expanding the position-side construction in them yields the direct
/// summation over even lattice transfers implemented in
/// [`wigner_from_momentum_lattice`]; eigenmode spikes then concentrate on
/// single rows exactly. Line states use band-limited resampling of the
/// smooth momentum amplitude, mirroring the position route.
pub fn wigner_from_momentum(psi_tilde: &MomentumWaveFunction) -> Result<WignerField> {
    let grid = &psi_tilde.grid;
    let hbar = psi_tilde.hbar;
    if !grid.momentum_is_conjugate(hbar) {
        return Err(Error::GridMismatch);
    }
    if grid.periodic_q {
        return wigner_from_momentum_lattice(psi_tilde);
    }
    let n = grid.n_p;
    let dp = grid.dp();
    let up = upsample2(&psi_tilde.values);
    let modes = mode_numbers(n);
    let phase: Vec<Complex64> = modes
        .iter()
        .map(|&m| Complex64::from_polar(1.0, grid.q_min * m as f64 * dp / hbar))
        .collect();
    let scale = dp / (2.0 * std::f64::consts::PI * hbar);
    let mut values = Array2::<f64>::zeros((grid.n_q, n));
    let mut g = vec![Complex64::default(); n];
    let two_n = 2 * n as i64;
    let mut residue = 0.0f64;
    let drop_unpaired = !grid.periodic_q;
    for l in 0..n {
        for (mi, &m) in modes.iter().enumerate() {
            if drop_unpaired && m == -(n as i64) / 2 {
                g[mi] = Complex64::default();
                continue;
            }
            let ip = (2 * l as i64 + m).rem_euclid(two_n) as usize;
            let im = (2 * l as i64 - m).rem_euclid(two_n) as usize;
            g[mi] = up[ip] * up[im].conj() * phase[mi];
        }
        // W(q_j, p_l) = dp/(2 pi hbar) * sum_m g_m e^{+2 pi i j m/n}
        ifft_inplace(&mut g);
        for j in 0..grid.n_q {
            let v = g[j] * scale;
            residue = residue.max(v.im.abs());
            values[(j, l)] = v.re;
        }
    }
    if residue > IMAG_RESIDUE_LIMIT {
        return Err(Error::AliasingDetected { magnitude: residue, limit: IMAG_RESIDUE_LIMIT });
    }
    Ok(WignerField { grid: grid.clone(), values, hbar })
}

/// Direct summation over lattice transfers `u = 2 m dp` (the only ones a
/// lattice state supports):
/// `W(s_j, p_l) = (dp/2 pi hbar) sum_m e^{i s_j u_m/hbar} psi~[l+m] psi~*[l-m]`.
/// Algebraically identical to the position-side route for ring states below
/// the Nyquist mode.
fn wigner_from_momentum_lattice(psi_tilde: &MomentumWaveFunction) -> Result<WignerField> {
    let grid = &psi_tilde.grid;
    let hbar = psi_tilde.hbar;
    let n = grid.n_p;
    let dp = grid.dp();
    let scale = dp / (2.0 * std::f64::consts::PI * hbar);
    let qs = grid.q_values();
    let vals = &psi_tilde.values;
    let mut values = Array2::<f64>::zeros((grid.n_q, n));
    let mut residue = 0.0f64;
    for l in 0..n {
        let reach = l.min(n - 1 - l) as i64;
        for j in 0..grid.n_q {
            let mut acc = Complex64::default();
            for m in -reach..=reach {
                let a = vals[(l as i64 + m) as usize];
                let b = vals[(l as i64 - m) as usize];
                if a == Complex64::default() || b == Complex64::default() {
                    continue;
                }
                let u = 2.0 * m as f64 * dp;
                acc += a * b.conj() * Complex64::from_polar(1.0, qs[j] * u / hbar);
            }
            let v = acc * scale;
            residue = residue.max(v.im.abs());
            values[(j, l)] = v.re;
        }
    }
    if residue > IMAG_RESIDUE_LIMIT {
        return Err(Error::AliasingDetected { magnitude: residue, limit: IMAG_RESIDUE_LIMIT });
    }
    Ok(WignerField { grid: grid.clone(), values, hbar })
}

/// Complex cross term for the density component |psi_i><psi_j|.
pub fn cross_wigner(psi_i: &WaveFunction, psi_j: &WaveFunction) -> Result<CrossWignerField> {
    if psi_i.grid != psi_j.grid {
        return Err(Error::GridMismatch);
    }
    let ua = upsample2(&psi_i.values);
    let ub = upsample2(&psi_j.values);
    let values = offset_transform(&ua, &ub, &psi_i.grid, psi_i.hbar)?;
    Ok(CrossWignerField { grid: psi_i.grid.clone(), values, hbar: psi_i.hbar })
}

impl WignerField {
    pub fn integral(&self) -> f64 {
        self.values.sum() * self.grid.dq() * self.grid.dp()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, &v| a.max(v.abs()))
    }

    /// Phase-space purity integral `dq dp W^2`; equals `1/(2 pi hbar)` for pure states.
    pub fn purity(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.dq() * self.grid.dp()
    }

    pub fn marginal_position(&self) -> Vec<f64> {
        let dp = self.grid.dp();
        (0..self.grid.n_q)
            .map(|j| (0..self.grid.n_p).map(|l| self.values[(j, l)]).sum::<f64>() * dp)
            .collect()
    }

    pub fn marginal_momentum(&self) -> Vec<f64> {
        let dq = self.grid.dq();
        (0..self.grid.n_p)
            .map(|l| (0..self.grid.n_q).map(|j| self.values[(j, l)]).sum::<f64>() * dq)
            .collect()
    }

    /// `<A> = integral dq dp A(q,p) W(q,p)` with A sampled on the same grid.
    pub fn expectation(&self, symbol: &Array2<f64>) -> Result<f64> {
        if symbol.dim() != self.values.dim() {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(symbol.iter())
            .map(|(w, a)| w * a)
            .sum::<f64>()
            * self.grid.dq()
            * self.grid.dp())
    }

    /// CSV rows `q,p,w` in row-major q-then-p order, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "q,p,w")?;
        let qs = self.grid.q_values();
        let ps = self.grid.p_values();
        for (j, &q) in qs.iter().enumerate() {
            for (l, &p) in ps.iter().enumerate() {
                writeln!(out, "{:.16e},{:.16e},{:.16e}", q, p, self.values[(j, l)])?;
            }
        }
        Ok(())
    }
}

impl CrossWignerField {
    pub fn integral(&self) -> Complex64 {
        self.values.sum() * self.grid.dq() * self.grid.dp()
    }

    /// Complex position density `rho_ij(q) = psi_i(q) psi_j*(q)`.
    pub fn marginal_position(&self) -> Vec<Complex64> {
        let dp = self.grid.dp();
        (0..self.grid.n_q)
            .map(|j| (0..self.grid.n_p).map(|l| self.values[(j, l)]).sum::<Complex64>() * dp)
            .collect()
    }

    pub fn conj_transpose_of(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b.conj()).norm())
            .fold(0.0, f64::max)
    }
}
