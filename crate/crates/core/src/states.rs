//! Wave functions on the position and momentum axes and the unitary bridge
//! between them.
//!
//! Convention: `psi_tilde(p) = (2 pi hbar)^(-1/2) * integral dq e^{-i p q/hbar} psi(q)`,
//! discretized trapezoidally on the uniform grid. The momentum axis must be
//! the Fourier conjugate of the position axis (see [`PhaseGrid::line`]).

use crate::fft::{fft_inplace, ifft_inplace, mode_numbers};
use crate::grid::PhaseGrid;
use crate::{Error, PhysicalConstants, Result};
use num_complex::Complex64;

pub const NORM_TOL: f64 = 1e-10;
const TAIL_HARD_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct WaveFunction {
    pub grid: PhaseGrid,
    pub values: Vec<Complex64>,
    pub hbar: f64,
}

#[derive(Debug, Clone)]
pub struct MomentumWaveFunction {
    pub grid: PhaseGrid,
    pub values: Vec<Complex64>,
    pub hbar: f64,
}

impl WaveFunction {
    pub fn from_values(grid: PhaseGrid, values: Vec<Complex64>, hbar: f64) -> Result<Self> {
        if values.len() != grid.n_q {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, values, hbar })
    }

    /// Trapezoidal L2 norm squared (exact for periodic samples).
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dq()
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.grid.dq())
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sq().sqrt();
        if n > 0.0 {
            for v in &mut self.values {
                *v /= n;
            }
        }
    }

    /// Momentum expectation <psi|P|psi> via the spectral derivative.
    pub fn momentum_expectation(&self) -> f64 {
        let n = self.grid.n_q;
        let mut spec = self.values.clone();
        fft_inplace(&mut spec);
        let modes = mode_numbers(n);
        let l = self.grid.q_len();
        let mut num = 0.0;
        let mut den = 0.0;
        for (k, c) in spec.iter().enumerate() {
            let p = self.hbar * 2.0 * std::f64::consts::PI * modes[k] as f64 / l;
            num += p * c.norm_sqr();
            den += c.norm_sqr();
        }
        num / den
    }

    /// Apply -i*hbar d/dq spectrally.
    pub fn spectral_momentum(&self) -> Self {
        let n = self.grid.n_q;
        let mut spec = self.values.clone();
        fft_inplace(&mut spec);
        let modes = mode_numbers(n);
        let l = self.grid.q_len();
        for (k, c) in spec.iter_mut().enumerate() {
            let p = self.hbar * 2.0 * std::f64::consts::PI * modes[k] as f64 / l;
            *c *= p / n as f64;
        }
        ifft_inplace(&mut spec);
        Self { grid: self.grid.clone(), values: spec, hbar: self.hbar }
    }
}

impl MomentumWaveFunction {
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dp()
    }
}

/// Normalized Gaussian packet `psi(q) ~ exp(-(q-q0)^2/(2 w^2) + i p0 q/hbar)`.
pub fn make_gaussian_packet(
    grid: &PhaseGrid,
    center_q: f64,
    center_p: f64,
    width: f64,
    consts: &PhysicalConstants,
) -> Result<WaveFunction> {
    if !(width > 0.0) {
        return Err(Error::ValidationError {
            field: "width".into(),
            reason: format!("must be positive, got {width}"),
        });
    }
    let hbar = consts.hbar;
    let qs = grid.q_values();
    let values: Vec<Complex64> = qs
        .iter()
        .map(|&q| {
            let envelope = (-(q - center_q).powi(2) / (2.0 * width * width)).exp();
            Complex64::from_polar(envelope, center_p * q / hbar)
        })
        .collect();
    // Tail check against the peak before normalization (peak is 1).
    let tail = values[0].norm().max(values[grid.n_q - 1].norm());
    if tail > TAIL_HARD_LIMIT {
        return Err(Error::GridTooSmall { magnitude: tail, limit: TAIL_HARD_LIMIT });
    }
    let mut psi = WaveFunction::from_values(grid.clone(), values, hbar)?;
    psi.normalize();
    Ok(psi)
}

/// Periodic plane wave `e^{i k s}/sqrt(2 pi R)` with `k = index/R`; exact
/// momentum eigenvector `hbar*index/R` on the ring.
pub fn make_ring_mode(grid: &PhaseGrid, wavenumber_index: i64, consts: &PhysicalConstants) -> Result<WaveFunction> {
    let radius = grid.ring_radius().ok_or(Error::NotPeriodic)?;
    if wavenumber_index.unsigned_abs() as usize >= grid.n_q / 2 {
        return Err(Error::ValidationError {
            field: "wavenumber_index".into(),
            reason: format!("|index| must stay below Nyquist n/2 = {}", grid.n_q / 2),
        });
    }
    let norm = 1.0 / grid.q_len().sqrt();
    let k = wavenumber_index as f64 / radius;
    let values = grid
        .q_values()
        .iter()
        .map(|&s| Complex64::from_polar(norm, k * s))
        .collect();
    WaveFunction::from_values(grid.clone(), values, consts.hbar)
}

/// Unitary position -> momentum transform onto the conjugate momentum axis.
pub fn to_momentum(psi: &WaveFunction) -> Result<MomentumWaveFunction> {
    let grid = &psi.grid;
    let hbar = psi.hbar;
    if !grid.momentum_is_conjugate(hbar) {
        return Err(Error::GridMismatch);
    }
    let dq = grid.dq();
    let dp = grid.dp();
    // psi_t(p_l) = dq/sqrt(2 pi hbar) * e^{-i l dp q_min/hbar} * sum_j [psi_j e^{-i p_min q_j/hbar}] e^{-2 pi i j l/n}
    let mut work: Vec<Complex64> = psi
        .values
        .iter()
        .zip(grid.q_values())
        .map(|(v, q)| v * Complex64::from_polar(1.0, -grid.p_min * q / hbar))
        .collect();
    fft_inplace(&mut work);
    let scale = dq / (2.0 * std::f64::consts::PI * hbar).sqrt();
    let values: Vec<Complex64> = work
        .iter()
        .enumerate()
        .map(|(l, v)| v * Complex64::from_polar(scale, -(l as f64) * dp * grid.q_min / hbar))
        .collect();
    Ok(MomentumWaveFunction { grid: grid.clone(), values, hbar })
}

/// Inverse of [`to_momentum`]; roundtrip is the identity to machine accuracy.
pub fn to_position(psi_tilde: &MomentumWaveFunction) -> Result<WaveFunction> {
    let grid = &psi_tilde.grid;
    let hbar = psi_tilde.hbar;
    if !grid.momentum_is_conjugate(hbar) {
        return Err(Error::GridMismatch);
    }
    let dp = grid.dp();
    let mut work: Vec<Complex64> = psi_tilde
        .values
        .iter()
        .enumerate()
        .map(|(l, v)| v * Complex64::from_polar(1.0, (l as f64) * dp * grid.q_min / hbar))
        .collect();
    ifft_inplace(&mut work);
    let scale = dp / (2.0 * std::f64::consts::PI * hbar).sqrt();
    let values: Vec<Complex64> = work
        .iter()
        .zip(grid.q_values())
        .map(|(v, q)| v * Complex64::from_polar(scale, grid.p_min * q / hbar))
        .collect();
    Ok(WaveFunction { grid: grid.clone(), values, hbar })
}
