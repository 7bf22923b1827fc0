//! Uniform rectangular phase-space grids.
//!
//! The q axis holds `n_q` samples `q_min + j*dq` with `dq = (q_max-q_min)/n_q`;
//! the endpoint is excluded, which makes the axis FFT-ready. A periodic q axis
//! is interpreted as the arc length of a ring of circumference `q_max - q_min`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub q_min: f64,
    pub q_max: f64,
    pub n_q: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub n_p: usize,
    pub periodic_q: bool,
}

impl PhaseGrid {
    pub fn new(
        q_min: f64,
        q_max: f64,
        n_q: usize,
        p_min: f64,
        p_max: f64,
        n_p: usize,
        periodic_q: bool,
    ) -> crate::Result<Self> {
        if n_q < 2 || n_q % 2 != 0 || n_p < 2 || n_p % 2 != 0 {
            return Err(crate::Error::ValidationError {
                field: "n_q/n_p".into(),
                reason: format!("sample counts must be even and >= 2, got {n_q}, {n_p}"),
            });
        }
        if !(q_max > q_min) || !(p_max > p_min) {
            return Err(crate::Error::ValidationError {
                field: "q/p range".into(),
                reason: "axis maximum must exceed minimum".into(),
            });
        }
        Ok(Self { q_min, q_max, n_q, p_min, p_max, n_p, periodic_q })
    }

    /// Line grid on `[q_min, q_max)` with the Fourier-conjugate momentum axis
    /// for the given `hbar`: `dp = 2*pi*hbar/(n*dq)`, centered on zero.
    pub fn line(q_min: f64, q_max: f64, n: usize, hbar: f64) -> crate::Result<Self> {
        let dq = (q_max - q_min) / n as f64;
        let dp = 2.0 * std::f64::consts::PI * hbar / (n as f64 * dq);
        let p_min = -(n as f64 / 2.0) * dp;
        Self::new(q_min, q_max, n, p_min, -p_min, n, false)
    }

    /// Ring grid: arc length s in `[0, 2*pi*R)` with conjugate momenta spaced
    /// `hbar/R`, so ring modes sit exactly on momentum rows.
    pub fn ring(radius: f64, n: usize, hbar: f64) -> crate::Result<Self> {
        if !(radius > 0.0) {
            return Err(crate::Error::ValidationError {
                field: "radius".into(),
                reason: format!("must be positive, got {radius}"),
            });
        }
        let circumference = 2.0 * std::f64::consts::PI * radius;
        let dp = hbar / radius;
        let p_min = -(n as f64 / 2.0) * dp;
        Self::new(0.0, circumference, n, p_min, -p_min, n, true)
    }

    pub fn dq(&self) -> f64 {
        (self.q_max - self.q_min) / self.n_q as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / self.n_p as f64
    }

    pub fn q_len(&self) -> f64 {
        self.q_max - self.q_min
    }

    pub fn q_values(&self) -> Vec<f64> {
        (0..self.n_q).map(|j| self.q_min + j as f64 * self.dq()).collect()
    }

    pub fn p_values(&self) -> Vec<f64> {
        (0..self.n_p).map(|l| self.p_min + l as f64 * self.dp()).collect()
    }

    /// Ring radius implied by a periodic q axis.
    pub fn ring_radius(&self) -> Option<f64> {
        self.periodic_q.then(|| self.q_len() / (2.0 * std::f64::consts::PI))
    }

    /// Whether the p axis is the Fourier conjugate of the q axis at this hbar.
    pub fn momentum_is_conjugate(&self, hbar: f64) -> bool {
        let dp = 2.0 * std::f64::consts::PI * hbar / self.q_len();
        self.n_p == self.n_q
            && (self.dp() - dp).abs() <= 1e-12 * dp.abs()
            && (self.p_min + (self.n_p as f64 / 2.0) * dp).abs() <= 1e-9 * dp
    }

    pub fn same_axes(&self, other: &Self) -> bool {
        self == other
    }
}

/// Rectangular grid over the complex plane, for Husimi fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneGrid {
    pub re_min: f64,
    pub re_max: f64,
    pub n_re: usize,
    pub im_min: f64,
    pub im_max: f64,
    pub n_im: usize,
}

impl PlaneGrid {
    pub fn new(re_min: f64, re_max: f64, n_re: usize, im_min: f64, im_max: f64, n_im: usize) -> crate::Result<Self> {
        if n_re < 2 || n_im < 2 || !(re_max > re_min) || !(im_max > im_min) {
            return Err(crate::Error::ValidationError {
                field: "plane grid".into(),
                reason: "need >= 2 samples per axis and max > min".into(),
            });
        }
        Ok(Self { re_min, re_max, n_re, im_min, im_max, n_im })
    }

    /// Square grid centered on the origin.
    pub fn centered(half_extent: f64, n: usize) -> crate::Result<Self> {
        Self::new(-half_extent, half_extent, n, -half_extent, half_extent, n)
    }

    pub fn d_re(&self) -> f64 {
        (self.re_max - self.re_min) / self.n_re as f64
    }

    pub fn d_im(&self) -> f64 {
        (self.im_max - self.im_min) / self.n_im as f64
    }

    pub fn re_values(&self) -> Vec<f64> {
        (0..self.n_re).map(|j| self.re_min + j as f64 * self.d_re()).collect()
    }

    pub fn im_values(&self) -> Vec<f64> {
        (0..self.n_im).map(|j| self.im_min + j as f64 * self.d_im()).collect()
    }
}
