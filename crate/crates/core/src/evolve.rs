//! Moyal-bracket time evolution of (cross-)Wigner fields.
//!
//! The Hamiltonian `H = (p - q_c A)^2/2m + q_c phi(q, t)` with constant `A`
//! and piecewise-constant-in-time `phi` splits into a kinetic shear, exact in
//! the Fourier-over-q domain, and a potential twist, exact in the
//! Fourier-over-p domain. Strang composition of the two sub-flows conserves
//! the field integral to roundoff; for the scenarios here (potentials uniform
//! per region, or quadratic test cases) each sub-flow is the exact Moyal flow
//! of its own term.

use crate::fft::{fft_cols, fft_rows, mode_numbers};
use crate::grid::PhaseGrid;
use crate::wigner::{CrossWignerField, WignerField};
use crate::{Error, Result};
use ndarray::Array2;
use num_complex::Complex64;
use std::sync::Arc;

#[derive(Clone)]
pub enum SpatialPotential {
    Zero,
    Uniform(f64),
    Func(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for SpatialPotential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Zero => write!(f, "Zero"),
            Self::Uniform(v) => write!(f, "Uniform({v})"),
            Self::Func(_) => write!(f, "Func(..)"),
        }
    }
}

impl SpatialPotential {
    pub fn eval(&self, q: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Uniform(v) => *v,
            Self::Func(f) => f(q),
        }
    }

    /// Uniform potentials commute with everything on the Wigner side.
    fn is_uniform(&self) -> bool {
        matches!(self, Self::Zero | Self::Uniform(_))
    }
}

#[derive(Debug, Clone)]
pub struct PotentialStage {
    /// Stage is active for t < t_end; the last stage extends past its t_end.
    pub t_end: f64,
    pub phi: SpatialPotential,
}

/// `H = (p - charge*vector_potential)^2 / (2 mass) + charge * phi(q, t)`.
#[derive(Debug, Clone)]
pub struct HamiltonianSpec {
    pub mass: f64,
    pub charge: f64,
    /// Constant tangential vector potential (ring scenarios); zero on a line.
    pub vector_potential: f64,
    pub stages: Vec<PotentialStage>,
}

impl HamiltonianSpec {
    pub fn free(mass: f64) -> Self {
        Self {
            mass,
            charge: 0.0,
            vector_potential: 0.0,
            stages: vec![PotentialStage { t_end: f64::INFINITY, phi: SpatialPotential::Zero }],
        }
    }

    pub fn with_potential(mass: f64, charge: f64, phi: SpatialPotential) -> Self {
        Self {
            mass,
            charge,
            vector_potential: 0.0,
            stages: vec![PotentialStage { t_end: f64::INFINITY, phi }],
        }
    }

    fn max_abs_potential_energy(&self, grid: &PhaseGrid) -> f64 {
        let qs = grid.q_values();
        self.stages
            .iter()
            .map(|s| {
                qs.iter()
                    .map(|&q| (self.charge * s.phi.eval(q)).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Step bound `0.1 * min(dq*m/p_max, hbar/max|q_c phi|)`.
    pub fn dt_bound(&self, grid: &PhaseGrid, hbar: f64) -> f64 {
        let p_max = grid.p_values().iter().fold(0.0f64, |a, &p| a.max(p.abs()));
        let kinetic = grid.dq() * self.mass / p_max;
        let vmax = self.max_abs_potential_energy(grid);
        let potential = if vmax > 0.0 { hbar / vmax } else { f64::INFINITY };
        0.1 * kinetic.min(potential)
    }
}

const TRACE_DRIFT_LIMIT: f64 = 1e-6;

/// Evolve a complex phase-space field under the Moyal equation
/// `dW/dt = [H, W]_M / (i hbar)` from t=0 to `t_final`.
pub fn evolve_field(
    field: &Array2<Complex64>,
    grid: &PhaseGrid,
    spec: &HamiltonianSpec,
    t_final: f64,
    dt: f64,
    hbar: f64,
) -> Result<Array2<Complex64>> {
    if !(dt > 0.0) || !(t_final >= 0.0) {
        return Err(Error::ValidationError {
            field: "dt/t_final".into(),
            reason: "need dt > 0 and t_final >= 0".into(),
        });
    }
    let bound = spec.dt_bound(grid, hbar);
    if dt > bound * (1.0 + 1e-12) {
        return Err(Error::ValidationError {
            field: "dt".into(),
            reason: format!("dt = {dt} exceeds the stability bound {bound}"),
        });
    }
    let (n, m) = (grid.n_q, grid.n_p);
    let mut data: Vec<Complex64> = field.iter().copied().collect();
    let trace0 = data.iter().sum::<Complex64>();

    let kq: Vec<f64> = mode_numbers(n)
        .iter()
        .map(|&mm| 2.0 * std::f64::consts::PI * mm as f64 / grid.q_len())
        .collect();
    let lam: Vec<f64> = mode_numbers(m)
        .iter()
        .map(|&mm| 2.0 * std::f64::consts::PI * mm as f64 / (grid.p_max - grid.p_min))
        .collect();
    let ps = grid.p_values();
    let qs = grid.q_values();
    let b = spec.charge * spec.vector_potential;

    let mut t = 0.0;
    for (si, stage) in spec.stages.iter().enumerate() {
        let stage_end = if si + 1 == spec.stages.len() { t_final } else { stage.t_end.min(t_final) };
        if stage_end <= t + 1e-15 {
            continue;
        }
        let duration = stage_end - t;
        let steps = (duration / dt).ceil().max(1.0) as usize;
        let h = duration / steps as f64;

        // kinetic phase: exp(-i h k (p - b)/m), exact Moyal flow of (p-b)^2/2m.
        // The unpaired Nyquist mode gets the real part of its phase so real
        // fields stay real (it has no conjugate partner to balance it).
        let kin: Vec<Complex64> = (0..n * m)
            .map(|idx| {
                let i = idx / m;
                let theta = -h * kq[i] * (ps[idx % m] - b) / spec.mass;
                if i == n / 2 {
                    Complex64::new(theta.cos(), 0.0)
                } else {
                    Complex64::from_polar(1.0, theta)
                }
            })
            .collect();
        let uniform = stage.phi.is_uniform();
        // potential phase for a half step: exp(-i (h/2) [V(q - hbar l/2) - V(q + hbar l/2)]/hbar)
        let pot_half: Vec<Complex64> = if uniform {
            Vec::new()
        } else {
            (0..n * m)
                .map(|idx| {
                    let q = qs[idx / m];
                    let li = idx % m;
                    let dv = spec.charge
                        * (stage.phi.eval(q - hbar * lam[li] / 2.0)
                            - stage.phi.eval(q + hbar * lam[li] / 2.0));
                    let theta = -0.5 * h * dv / hbar;
                    if li == m / 2 {
                        Complex64::new(theta.cos(), 0.0)
                    } else {
                        Complex64::from_polar(1.0, theta)
                    }
                })
                .collect()
        };

        let apply_pot = |data: &mut Vec<Complex64>, twice: bool| {
            fft_rows(data, n, m, false);
            if twice {
                for (v, ph) in data.iter_mut().zip(&pot_half) {
                    *v *= ph * ph;
                }
            } else {
                for (v, ph) in data.iter_mut().zip(&pot_half) {
                    *v *= ph;
                }
            }
            fft_rows(data, n, m, true);
            let s = 1.0 / m as f64;
            for v in data.iter_mut() {
                *v *= s;
            }
        };
        let apply_kin = |data: &mut Vec<Complex64>| {
            fft_cols(data, n, m, false);
            for (v, ph) in data.iter_mut().zip(&kin) {
                *v *= ph;
            }
            fft_cols(data, n, m, true);
            let s = 1.0 / n as f64;
            for v in data.iter_mut() {
                *v *= s;
            }
        };

        if uniform {
            for _ in 0..steps {
                apply_kin(&mut data);
            }
        } else {
            apply_pot(&mut data, false);
            for k in 0..steps {
                apply_kin(&mut data);
                if k + 1 < steps {
                    apply_pot(&mut data, true);
                }
            }
            apply_pot(&mut data, false);
        }
        t = stage_end;
        if t >= t_final {
            break;
        }
    }

    let trace1 = data.iter().sum::<Complex64>();
    if t_final > 0.0 {
        let drift = (trace1 - trace0).norm() * grid.dq() * grid.dp() / t_final.max(1.0);
        if drift > TRACE_DRIFT_LIMIT {
            return Err(Error::StabilityViolation { drift, limit: TRACE_DRIFT_LIMIT });
        }
    }
    Ok(Array2::from_shape_vec((n, m), data).unwrap())
}

/// Exact Moyal flow of the purely kinetic Hamiltonian `(p - b)^2/2m` with
/// `b = charge * vector_potential`, applied in a single spectral sweep.
///
/// The kinetic twist is the whole evolution operator when the scalar
/// potential is spatially uniform (uniform potentials commute with every
/// Wigner function), so this is not an approximation; the Strang-stepped
/// [`evolve_field`] serves as its cross-check.
pub fn kinetic_flow_exact(
    field: &Array2<Complex64>,
    grid: &PhaseGrid,
    mass: f64,
    b: f64,
    t: f64,
) -> Array2<Complex64> {
    let (n, m) = (grid.n_q, grid.n_p);
    let mut data: Vec<Complex64> = field.iter().copied().collect();
    let kq: Vec<f64> = mode_numbers(n)
        .iter()
        .map(|&mm| 2.0 * std::f64::consts::PI * mm as f64 / grid.q_len())
        .collect();
    let ps = grid.p_values();
    fft_cols(&mut data, n, m, false);
    for (idx, v) in data.iter_mut().enumerate() {
        let i = idx / m;
        let theta = -t * kq[i] * (ps[idx % m] - b) / mass;
        if i == n / 2 {
            *v *= theta.cos();
        } else {
            *v *= Complex64::from_polar(1.0, theta);
        }
    }
    fft_cols(&mut data, n, m, true);
    let s = 1.0 / n as f64;
    for v in &mut data {
        *v *= s;
    }
    Array2::from_shape_vec((n, m), data).unwrap()
}

/// Evolve a real Wigner field; the imaginary residue picked up by the
/// numerics is checked and discarded.
pub fn evolve_wigner(
    w: &WignerField,
    spec: &HamiltonianSpec,
    t_final: f64,
    dt: f64,
) -> Result<WignerField> {
    let complex = w.values.mapv(|v| Complex64::new(v, 0.0));
    let out = evolve_field(&complex, &w.grid, spec, t_final, dt, w.hbar)?;
    let residue = out.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    if residue > 1e-10 * t_final.max(1.0) {
        return Err(Error::StabilityViolation { drift: residue, limit: 1e-10 });
    }
    Ok(WignerField { grid: w.grid.clone(), values: out.mapv(|v| v.re), hbar: w.hbar })
}

pub fn evolve_cross_wigner(
    w: &CrossWignerField,
    spec: &HamiltonianSpec,
    t_final: f64,
    dt: f64,
) -> Result<CrossWignerField> {
    let out = evolve_field(&w.values, &w.grid, spec, t_final, dt, w.hbar)?;
    Ok(CrossWignerField { grid: w.grid.clone(), values: out, hbar: w.hbar })
}
