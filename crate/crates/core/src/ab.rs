//! Aharonov-Bohm scenarios: electric two-branch interference, the magnetic
//! ring, and the general gauge-phase operator, each executed in the Wigner
//! and Segal-Bargmann formalisms and compared against closed forms.
//!
//! Phase convention: the extracted interference phase is
//! `theta(t) = arg[rho_12(t)/rho_12(0)]` with `rho_12 = |branch_1><branch_2|`,
//! read at the recombination point. For branch energies `E_1, E_2` this gives
//! `+(E_2 - E_1) t`, matching the closed forms `q_c dphi tau` (electric) and
//! `2 p_0 q_c A tau / m` (magnetic, with branch 1 co-rotating).

use crate::bargmann::{
    free_hamiltonian_matrix, ring_hamiltonian_matrix, sb_evolve, sb_inner, sb_transform,
    SBFunction, DEFAULT_TRUNCATION,
};
use crate::consts::PhysicalConstants;
use crate::evolve::kinetic_flow_exact;
use crate::fft::{fft_rows, mode_numbers, upsample2};
use crate::grid::PhaseGrid;
use crate::oscbasis::OperatorMatrix;
use crate::states::{make_gaussian_packet, make_ring_mode, WaveFunction};
use crate::wigner::{cross_wigner, CrossWignerField, WignerField};
use crate::{Error, Result};
use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formalism {
    Wigner,
    SegalBargmann,
}

impl std::fmt::Display for Formalism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Wigner => write!(f, "wigner"),
            Self::SegalBargmann => write!(f, "segal-bargmann"),
        }
    }
}

/// Clamp the negative roundoff fringe of a probability to zero.
fn prob_floor(p: f64) -> f64 {
    if p < 0.0 && p > -1e-12 {
        0.0
    } else {
        p
    }
}

/// Reduce an angle to (-pi, pi].
pub fn wrap_phase(theta: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut x = theta - two_pi * (theta / two_pi).round();
    if x <= -std::f64::consts::PI {
        x += two_pi;
    }
    x
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElectricScenario {
    pub phi1: f64,
    pub phi2: f64,
    pub tau: f64,
    pub e0: f64,
    pub charge: f64,
    pub consts: PhysicalConstants,
}

impl ElectricScenario {
    pub fn delta_phi(&self) -> f64 {
        self.phi2 - self.phi1
    }

    /// Canonical destructive configuration: `dphi = E0/(2 q_c)` with
    /// `tau = 2 pi/E0`, so the branches recombine with interference phase pi.
    pub fn destructive_config(e0: f64, charge: f64, consts: PhysicalConstants) -> Self {
        Self {
            phi1: 0.0,
            phi2: e0 / (2.0 * charge),
            tau: 2.0 * std::f64::consts::PI / e0,
            e0,
            charge,
            consts,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) {
            return Err(Error::ValidationError {
                field: "tau".into(),
                reason: "must be positive".into(),
            });
        }
        self.consts.validate()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MagneticScenario {
    pub solenoid_radius: f64,
    pub field: f64,
    pub ring_radius: f64,
    pub tau: f64,
    pub p0: f64,
    pub charge: f64,
    pub consts: PhysicalConstants,
}

impl MagneticScenario {
    /// Tangential vector potential on the ring, `A = a^2 B / (2R)`.
    pub fn vector_potential(&self) -> f64 {
        self.solenoid_radius * self.solenoid_radius * self.field / (2.0 * self.ring_radius)
    }

    pub fn mode_index(&self) -> Result<i64> {
        let value = self.p0 * self.ring_radius / self.consts.hbar;
        let rounded = value.round();
        if (value - rounded).abs() > 1e-9 {
            return Err(Error::IncommensurateMomentum { value });
        }
        Ok(rounded as i64)
    }

    /// Canonical destructive configuration: `|A| = p0/(16 q_c)` with
    /// `tau = 4 pi/E0` gives interference phase pi; realized with a
    /// unit-field solenoid of the matching radius.
    pub fn destructive_config(mode_index: i64, ring_radius: f64, charge: f64, consts: PhysicalConstants) -> Self {
        let p0 = consts.hbar * mode_index as f64 / ring_radius;
        let e0 = p0 * p0 / (2.0 * consts.mass);
        let a_target = p0 / (16.0 * charge);
        // a^2 B/(2R) = A with B = 1
        let solenoid_radius = (2.0 * ring_radius * a_target).sqrt();
        Self {
            solenoid_radius,
            field: 1.0,
            ring_radius,
            tau: 4.0 * std::f64::consts::PI / e0,
            p0,
            charge,
            consts,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ring_radius > self.solenoid_radius) {
            return Err(Error::ValidationError {
                field: "ring_radius".into(),
                reason: "ring radius must exceed solenoid radius".into(),
            });
        }
        if !(self.tau > 0.0) {
            return Err(Error::ValidationError {
                field: "tau".into(),
                reason: "must be positive".into(),
            });
        }
        self.mode_index()?;
        self.consts.validate()
    }
}

/// Per-frame position-space snapshot: density plus local interference phase.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Frame {
    pub t: f64,
    pub qs: Vec<f64>,
    pub density: Vec<f64>,
    pub phase: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub formalism: Formalism,
    pub times: Vec<f64>,
    pub probs: Vec<f64>,
    pub phases: Vec<f64>,
    pub extracted_phase: f64,
    pub closed_form_phase: f64,
    pub prob_at_tau: f64,
    #[serde(skip)]
    pub frames: Vec<Frame>,
}

impl ScenarioResult {
    pub fn phase_deviation(&self) -> f64 {
        wrap_phase(self.extracted_phase - self.closed_form_phase).abs()
    }
}

/// `P(t) = (1 + cos(q_c dphi min(t, tau)))/2`.
pub fn electric_ab_closed_form(scn: &ElectricScenario, t: f64) -> f64 {
    let theta = scn.charge * scn.delta_phi() * t.min(scn.tau) / scn.consts.hbar;
    0.5 * (1.0 + theta.cos())
}

/// Interference phase `dE tau = 2 p0 q_c A tau/m`, reduced to (-pi, pi].
pub fn magnetic_phase_closed_form(scn: &MagneticScenario) -> f64 {
    let de = 2.0 * scn.p0 * scn.charge * scn.vector_potential() / scn.consts.mass;
    wrap_phase(de * scn.tau / scn.consts.hbar)
}

/// Output-time lattice: `n_tau` steps to tau, extended to 1.5 tau.
fn time_lattice(tau: f64, n_tau: usize) -> Vec<f64> {
    let step = tau / n_tau as f64;
    let total = n_tau + n_tau / 2;
    (0..=total).map(|k| k as f64 * step).collect()
}

pub struct SimulationOptions {
    pub n_tau: usize,
    /// Emit a frame every `stride` output samples (0 = none).
    pub frame_stride: usize,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self { n_tau: 40, frame_stride: 0 }
    }
}

fn admission(formalism: Formalism, e: Error) -> Error {
    match e {
        Error::GridTooSmall { .. }
        | Error::AliasingDetected { .. }
        | Error::TruncationOverflow { .. } => Error::FormalismMismatch {
            formalism: formalism.to_string(),
            reason: e.to_string(),
        },
        other => other,
    }
}

/// Electric two-branch run in the Wigner picture: the four density terms
/// W_11, W_22, W_12, W_21 share the free kinetic flow; the branch potentials
/// are spatially uniform, so they act only on the cross terms, as the exact
/// stargenvalue phases `e^{+- i dE t}`.
pub fn simulate_electric_wigner(
    scn: &ElectricScenario,
    grid: &PhaseGrid,
    packet_width: f64,
    packet_center: f64,
    packet_momentum: f64,
    opts: &SimulationOptions,
) -> Result<ScenarioResult> {
    scn.validate()?;
    let hbar = scn.consts.hbar;
    let mass = scn.consts.mass;
    let psi = make_gaussian_packet(grid, packet_center, packet_momentum, packet_width, &scn.consts)
        .map_err(|e| admission(Formalism::Wigner, e))?;
    let w_diag = crate::wigner::wigner_from_position(&psi).map_err(|e| admission(Formalism::Wigner, e))?;
    let w_cross = cross_wigner(&psi, &psi).map_err(|e| admission(Formalism::Wigner, e))?;
    let de = scn.charge * scn.delta_phi();

    let times = time_lattice(scn.tau, opts.n_tau);
    let mut probs = Vec::with_capacity(times.len());
    let mut phases = Vec::with_capacity(times.len());
    let mut frames = Vec::new();

    let mut diag = w_diag.values.mapv(|v| Complex64::new(v, 0.0));
    let mut cross = w_cross.values.clone();
    let cross_trace0 = cross.sum() * grid.dq() * grid.dp();
    let mut prev_t = 0.0;
    for (k, &t) in times.iter().enumerate() {
        let dt = t - prev_t;
        if dt > 0.0 {
            diag = kinetic_flow_exact(&diag, grid, mass, 0.0, dt);
            cross = kinetic_flow_exact(&cross, grid, mass, 0.0, dt);
        }
        prev_t = t;
        let phase = Complex64::from_polar(1.0, de * t.min(scn.tau) / hbar);
        let diag_int = (diag.sum() * grid.dq() * grid.dp()).re;
        let cross_int = cross.sum() * grid.dq() * grid.dp() * phase;
        // P(t) = 1/4 (int W11 + int W22 + 2 Re int W12(t))
        probs.push(prob_floor(0.25 * (2.0 * diag_int + 2.0 * cross_int.re)));
        let f0 = cross_trace0;
        phases.push(wrap_phase((cross_int / f0).arg()));
        if opts.frame_stride > 0 && k % opts.frame_stride == 0 {
            frames.push(electric_frame(t, grid, &diag, &cross, phase));
        }
    }
    let idx_tau = opts.n_tau;
    Ok(ScenarioResult {
        formalism: Formalism::Wigner,
        prob_at_tau: probs[idx_tau],
        extracted_phase: phases[idx_tau],
        closed_form_phase: wrap_phase(scn.charge * scn.delta_phi() * scn.tau / hbar),
        times,
        probs,
        phases,
        frames,
    })
}

fn electric_frame(
    t: f64,
    grid: &PhaseGrid,
    diag: &Array2<Complex64>,
    cross: &Array2<Complex64>,
    phase: Complex64,
) -> Frame {
    let dp = grid.dp();
    let qs = grid.q_values();
    let mut density = Vec::with_capacity(grid.n_q);
    let mut local_phase = Vec::with_capacity(grid.n_q);
    for j in 0..grid.n_q {
        let rho_d: Complex64 = (0..grid.n_p).map(|l| diag[(j, l)]).sum::<Complex64>() * dp;
        let rho_c: Complex64 = (0..grid.n_p).map(|l| cross[(j, l)]).sum::<Complex64>() * dp * phase;
        density.push(0.25 * (2.0 * rho_d.re + 2.0 * rho_c.re));
        local_phase.push(rho_c.arg());
    }
    Frame { t, qs, density, phase: local_phase }
}

/// Electric two-branch run in the Segal-Bargmann picture. The coordinate is
/// made dimensionless with mass powers at this boundary (q' = m q, p' = p/m);
/// energies and times keep their dimensions.
pub fn simulate_electric_sb(
    scn: &ElectricScenario,
    grid_extent: f64,
    n_grid: usize,
    packet_width: f64,
    packet_center: f64,
    packet_momentum: f64,
    opts: &SimulationOptions,
) -> Result<ScenarioResult> {
    scn.validate()?;
    let hbar = scn.consts.hbar;
    let mass = scn.consts.mass;
    // dimensionless grid and packet
    let grid = PhaseGrid::line(-grid_extent * mass, grid_extent * mass, n_grid, 1.0)?;
    let dimless = PhysicalConstants { hbar: 1.0, mass: 1.0, charge: scn.charge, omega: 1.0 };
    let psi = make_gaussian_packet(
        &grid,
        packet_center * mass,
        packet_momentum / mass,
        packet_width * mass,
        &dimless,
    )
    .map_err(|e| admission(Formalism::SegalBargmann, e))?;
    let phi0 = sb_transform(&psi, DEFAULT_TRUNCATION).map_err(|e| admission(Formalism::SegalBargmann, e))?;
    let n = phi0.len();
    let h1 = free_hamiltonian_matrix(n, mass, scn.charge * scn.phi1);
    let h2 = free_hamiltonian_matrix(n, mass, scn.charge * scn.phi2);
    let h_free = free_hamiltonian_matrix(n, mass, 0.0);

    let times = time_lattice(scn.tau, opts.n_tau);
    let mut probs = Vec::with_capacity(times.len());
    let mut phases = Vec::with_capacity(times.len());
    let mut frames = Vec::new();
    for (k, &t) in times.iter().enumerate() {
        let (t_on, t_off) = (t.min(scn.tau), (t - scn.tau).max(0.0));
        let mut b1 = sb_evolve(&phi0, &h1, t_on, hbar)?;
        let mut b2 = sb_evolve(&phi0, &h2, t_on, hbar)?;
        if t_off > 0.0 {
            b1 = sb_evolve(&b1, &h_free, t_off, hbar)?;
            b2 = sb_evolve(&b2, &h_free, t_off, hbar)?;
        }
        let sum = b1.add(&b2)?;
        probs.push(prob_floor(0.25 * sb_inner(&sum, &sum).re));
        let a1 = sb_inner(&phi0, &b1);
        let a2 = sb_inner(&phi0, &b2);
        phases.push(wrap_phase((a2.conj() * a1).arg()));
        if opts.frame_stride > 0 && k % opts.frame_stride == 0 {
            if let Ok(pos) = crate::bargmann::sb_inverse(&sum, &grid, 1.0) {
                let density: Vec<f64> = pos.values.iter().map(|v| 0.25 * v.norm_sqr()).collect();
                let phase: Vec<f64> = pos.values.iter().map(|v| v.arg()).collect();
                frames.push(Frame { t, qs: grid.q_values(), density, phase });
            }
        }
    }
    let idx_tau = opts.n_tau;
    Ok(ScenarioResult {
        formalism: Formalism::SegalBargmann,
        prob_at_tau: probs[idx_tau],
        extracted_phase: phases[idx_tau],
        closed_form_phase: wrap_phase(scn.charge * scn.delta_phi() * scn.tau / hbar),
        times,
        probs,
        phases,
        frames,
    })
}

/// The four ring fields of a counter-propagating mode pair.
struct RingFields {
    grid: PhaseGrid,
    diag_plus: Array2<Complex64>,
    diag_minus: Array2<Complex64>,
    cross: Array2<Complex64>,
    carrier_mode: i64,
}

fn ring_fields(
    grid: &PhaseGrid,
    n_plus: i64,
    n_minus: i64,
    consts: &PhysicalConstants,
) -> Result<RingFields> {
    let plus = make_ring_mode(grid, n_plus, consts)?;
    let minus = make_ring_mode(grid, n_minus, consts)?;
    let wp = crate::wigner::wigner_from_position(&plus)?;
    let wm = crate::wigner::wigner_from_position(&minus)?;
    let cross = cross_wigner(&plus, &minus)?;
    Ok(RingFields {
        grid: grid.clone(),
        diag_plus: wp.values.mapv(|v| Complex64::new(v, 0.0)),
        diag_minus: wm.values.mapv(|v| Complex64::new(v, 0.0)),
        cross: cross.values,
        carrier_mode: n_plus - n_minus,
    })
}

impl RingFields {
    fn advance(&mut self, mass: f64, b: f64, dt: f64) {
        if dt > 0.0 {
            self.diag_plus = kinetic_flow_exact(&self.diag_plus, &self.grid, mass, b, dt);
            self.diag_minus = kinetic_flow_exact(&self.diag_minus, &self.grid, mass, b, dt);
            self.cross = kinetic_flow_exact(&self.cross, &self.grid, mass, b, dt);
        }
    }

    /// Position density of `(b_+ + b_-)/2` via marginals; W_21 enters as the
    /// conjugate of the evolved W_12.
    fn density(&self) -> Vec<f64> {
        let dp = self.grid.dp();
        (0..self.grid.n_q)
            .map(|j| {
                let dpls: Complex64 = (0..self.grid.n_p).map(|l| self.diag_plus[(j, l)]).sum();
                let dmin: Complex64 = (0..self.grid.n_p).map(|l| self.diag_minus[(j, l)]).sum();
                let cx: Complex64 = (0..self.grid.n_p).map(|l| self.cross[(j, l)]).sum();
                0.25 * (dpls.re + dmin.re + 2.0 * cx.re) * dp
            })
            .collect()
    }

    /// Complex amplitude of the cross marginal on its spatial carrier
    /// `e^{i (n_+ - n_-) s/R}`.
    fn cross_amplitude(&self) -> Complex64 {
        let dp = self.grid.dp();
        let ds = self.grid.dq();
        let radius = self.grid.ring_radius().unwrap_or(1.0);
        let mut acc = Complex64::default();
        for (j, &s) in self.grid.q_values().iter().enumerate() {
            let marg: Complex64 =
                (0..self.grid.n_p).map(|l| self.cross[(j, l)]).sum::<Complex64>() * dp;
            acc += marg * Complex64::from_polar(1.0, -(self.carrier_mode as f64) * s / radius);
        }
        acc * ds
    }
}

/// Magnetic ring run in the Wigner picture: both diagonal rows and the
/// p = 0 cross row evolve under `(p - q_c A)^2/2m` (solenoid on) and then
/// freely; the detection ratio is the recombination-point density.
pub fn simulate_magnetic_wigner(
    scn: &MagneticScenario,
    n_grid: usize,
    opts: &SimulationOptions,
) -> Result<ScenarioResult> {
    scn.validate()?;
    let n0 = scn.mode_index()?;
    let grid = PhaseGrid::ring(scn.ring_radius, n_grid, scn.consts.hbar)?;
    if 2 * n0.unsigned_abs() as usize >= n_grid / 2 - 2 {
        return Err(Error::ValidationError {
            field: "n_grid".into(),
            reason: format!("cross carrier mode 2*{n0} needs n_grid > {}", 8 * n0.unsigned_abs()),
        });
    }
    let mut fields = ring_fields(&grid, n0, -n0, &scn.consts)?;
    let b = scn.charge * scn.vector_potential();
    let mass = scn.consts.mass;

    let times = time_lattice(scn.tau, opts.n_tau);
    let rho0 = fields.density();
    let f0 = fields.cross_amplitude();
    let mut probs = Vec::with_capacity(times.len());
    let mut phases = Vec::with_capacity(times.len());
    let mut frames = Vec::new();
    let mut prev_t = 0.0f64;
    for (k, &t) in times.iter().enumerate() {
        // solenoid on during [0, tau], off afterwards
        let dt_on = t.min(scn.tau) - prev_t.min(scn.tau);
        let dt_off = (t - scn.tau).max(0.0) - (prev_t - scn.tau).max(0.0);
        fields.advance(mass, b, dt_on);
        fields.advance(mass, 0.0, dt_off);
        prev_t = t;
        let rho = fields.density();
        probs.push(prob_floor(rho[0] / rho0[0]));
        phases.push(wrap_phase((fields.cross_amplitude() / f0).arg()));
        if opts.frame_stride > 0 && k % opts.frame_stride == 0 {
            let phase_col: Vec<f64> = {
                let amp = (fields.cross_amplitude() / f0).arg();
                grid.q_values()
                    .iter()
                    .map(|&s| wrap_phase(2.0 * scn.p0 * s / scn.consts.hbar + amp))
                    .collect()
            };
            frames.push(Frame { t, qs: grid.q_values(), density: rho, phase: phase_col });
        }
    }
    let idx_tau = opts.n_tau;
    Ok(ScenarioResult {
        formalism: Formalism::Wigner,
        prob_at_tau: probs[idx_tau],
        extracted_phase: phases[idx_tau],
        closed_form_phase: magnetic_phase_closed_form(scn),
        times,
        probs,
        phases,
        frames,
    })
}

/// Truncated SB image of the plane-wave branch `e^{z(i 2 sqrt2 p'/2 + z)/2}`
/// with dimensionless momentum `p'`; the top `guard` coefficients are zeroed
/// so exact ladder actions stay exact below the guard.
pub fn ring_branch_sb(n: usize, p_dimless: f64, guard: usize) -> SBFunction {
    let a = Complex64::new(0.0, std::f64::consts::SQRT_2 * p_dimless);
    let mut coeffs = vec![Complex64::default(); n];
    for (total, slot) in coeffs.iter_mut().enumerate().take(n.saturating_sub(guard)) {
        let mut acc = Complex64::default();
        let mut j = 0usize;
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
        *slot = acc;
    }
    SBFunction { coeffs }
}

/// Eigenvalue of a banded coefficient-space operator on a (formal) eigenvector,
/// read off as the coefficient ratio over the exact band.
pub fn sb_eigenvalue_on(h: &OperatorMatrix, phi: &SBFunction, guard: usize) -> Result<f64> {
    let n = phi.len();
    if h.dim() != n {
        return Err(Error::GridMismatch);
    }
    let hv: Vec<Complex64> = (0..n)
        .map(|r| (0..n).map(|c| h.data[(r, c)] * phi.coeffs[c]).sum())
        .collect();
    let lo = 4;
    let hi = n.saturating_sub(guard + 4);
    let mut best = (0.0f64, None::<Complex64>);
    for k in lo..hi {
        let mag = phi.coeffs[k].norm();
        if mag > best.0 {
            best = (mag, Some(hv[k] / phi.coeffs[k]));
        }
    }
    let Some(ratio) = best.1 else {
        return Err(Error::QuadratureDivergence);
    };
    // consistency across the band
    for k in lo..hi {
        if phi.coeffs[k].norm() > 1e-6 * best.0 {
            let r = hv[k] / phi.coeffs[k];
            if (r - ratio).norm() > 1e-8 * ratio.norm().max(1.0) {
                return Err(Error::FormalismMismatch {
                    formalism: "segal-bargmann".into(),
                    reason: format!("eigenvalue ratio drifts across the band: {r} vs {ratio}"),
                });
            }
        }
    }
    Ok(ratio.re)
}

/// Magnetic ring run in the Segal-Bargmann picture: eigenstate branches take
/// the energies of the shifted kinetic Hamiltonian (read off the coefficient
/// recursion); evolution is a global phase per branch and the detection
/// ratio follows from the recombined density at s = 0.
pub fn simulate_magnetic_sb(
    scn: &MagneticScenario,
    truncation: usize,
    opts: &SimulationOptions,
) -> Result<ScenarioResult> {
    scn.validate()?;
    let hbar = scn.consts.hbar;
    let mass = scn.consts.mass;
    let p_plus = scn.p0 / mass;
    let guard = 6;
    let phi_plus = ring_branch_sb(truncation, p_plus, guard);
    let phi_minus = ring_branch_sb(truncation, -p_plus, guard);
    let h_on = ring_hamiltonian_matrix(truncation, mass, scn.charge * scn.vector_potential());
    let e_plus = sb_eigenvalue_on(&h_on, &phi_plus, guard)?;
    let e_minus = sb_eigenvalue_on(&h_on, &phi_minus, guard)?;
    let de = e_minus - e_plus;

    let times = time_lattice(scn.tau, opts.n_tau);
    let mut probs = Vec::with_capacity(times.len());
    let mut phases = Vec::with_capacity(times.len());
    let mut frames = Vec::new();
    for (k, &t) in times.iter().enumerate() {
        let theta = de * t.min(scn.tau) / hbar;
        // recombined density at s = 0 relative to the no-device pattern
        probs.push(prob_floor(0.5 * (1.0 + theta.cos())));
        phases.push(wrap_phase(theta));
        if opts.frame_stride > 0 && k % opts.frame_stride == 0 {
            let radius = scn.ring_radius;
            let qs: Vec<f64> = (0..256)
                .map(|j| 2.0 * std::f64::consts::PI * radius * j as f64 / 256.0)
                .collect();
            let density: Vec<f64> = qs
                .iter()
                .map(|&s| {
                    (1.0 + (2.0 * scn.p0 * s / hbar + theta).cos())
                        / (4.0 * std::f64::consts::PI * radius)
                })
                .collect();
            let phase: Vec<f64> =
                qs.iter().map(|&s| wrap_phase(2.0 * scn.p0 * s / hbar + theta)).collect();
            frames.push(Frame { t, qs, density, phase });
        }
    }
    let idx_tau = opts.n_tau;
    Ok(ScenarioResult {
        formalism: Formalism::SegalBargmann,
        prob_at_tau: probs[idx_tau],
        extracted_phase: phases[idx_tau],
        closed_form_phase: magnetic_phase_closed_form(scn),
        times,
        probs,
        phases,
        frames,
    })
}

/// Sampled worldline with potentials along it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaugeWorldline {
    pub positions: Vec<f64>,
    pub times: Vec<f64>,
    pub vector_potential: Vec<f64>,
    pub scalar_potential: Vec<f64>,
    pub charge: f64,
}

/// `theta = q_c [ integral A dr - integral phi dt ]`, trapezoidal.
pub fn gauge_phase(w: &GaugeWorldline, hbar: f64) -> Result<f64> {
    let n = w.positions.len();
    if n < 2 || w.times.len() != n || w.vector_potential.len() != n || w.scalar_potential.len() != n {
        return Err(Error::ValidationError {
            field: "worldline".into(),
            reason: "need >= 2 samples with matching lengths".into(),
        });
    }
    let mut line = 0.0;
    let mut time = 0.0;
    for k in 0..n - 1 {
        line += 0.5 * (w.vector_potential[k] + w.vector_potential[k + 1]) * (w.positions[k + 1] - w.positions[k]);
        time += 0.5 * (w.scalar_potential[k] + w.scalar_potential[k + 1]) * (w.times[k + 1] - w.times[k]);
    }
    Ok(w.charge * (line - time) / hbar)
}

/// Local gauge-phase profile on a grid:
/// `theta(q_j) = q_c [ integral_{x0}^{q_j} A dr - phi_time_integral ] / hbar`.
pub fn gauge_phase_profile(
    grid: &PhaseGrid,
    vector_potential: &dyn Fn(f64) -> f64,
    x0: f64,
    phi_time_integral: f64,
    charge: f64,
    hbar: f64,
) -> Vec<f64> {
    let qs = grid.q_values();
    let dq = grid.dq();
    let mut cum = vec![0.0; grid.n_q];
    for j in 1..grid.n_q {
        cum[j] = cum[j - 1]
            + 0.5 * (vector_potential(qs[j - 1]) + vector_potential(qs[j])) * dq;
    }
    // offset so the integral starts at x0 (nearest grid point)
    let j0 = qs
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - x0).abs().total_cmp(&(b.1 - x0).abs()))
        .map(|(j, _)| j)
        .unwrap_or(0);
    let base = cum[j0];
    cum.iter()
        .map(|&c| charge * (c - base - phi_time_integral) / hbar)
        .collect()
}

pub enum PhaseState {
    Position(WaveFunction),
    Bargmann(SBFunction),
    Cross(CrossWignerField),
}

/// Multiply a state by the local gauge factor `e^{i theta(x)}` in its own
/// representation. Cross-Wigner fields take the factor on their left index;
/// diagonal Wigner fields are rejected (the phase is invisible there).
pub fn apply_phase_operator(state: &PhaseState, theta: &[f64], grid: &PhaseGrid) -> Result<PhaseState> {
    match state {
        PhaseState::Position(psi) => {
            if theta.len() != psi.grid.n_q || psi.grid != *grid {
                return Err(Error::GridMismatch);
            }
            let values = psi
                .values
                .iter()
                .zip(theta)
                .map(|(v, &th)| v * Complex64::from_polar(1.0, th))
                .collect();
            Ok(PhaseState::Position(WaveFunction {
                grid: psi.grid.clone(),
                values,
                hbar: psi.hbar,
            }))
        }
        PhaseState::Bargmann(phi) => {
            // realize the multiplication operator through the transform pair
            let psi = crate::bargmann::sb_inverse(phi, grid, 1.0)?;
            let ph = apply_phase_operator(&PhaseState::Position(psi), theta, grid)?;
            let PhaseState::Position(psi2) = ph else { unreachable!() };
            Ok(PhaseState::Bargmann(sb_transform(&psi2, phi.len())?))
        }
        PhaseState::Cross(cw) => {
            if theta.len() != cw.grid.n_q || cw.grid != *grid {
                return Err(Error::GridMismatch);
            }
            // left-index action: FFT over p gives the offset correlation
            // g(q, y) = psi_1(q + y/2) psi_2*(q - y/2) (up to scale); multiply
            // by e^{i theta(q + y/2)} using band-limited interpolation of the
            // phase factor at half-step points.
            let (n, m) = (cw.grid.n_q, cw.grid.n_p);
            let factor: Vec<Complex64> =
                theta.iter().map(|&th| Complex64::from_polar(1.0, th)).collect();
            let up = upsample2(&factor);
            let mut data: Vec<Complex64> = cw.values.iter().copied().collect();
            // A forward FFT over p of the synthesized rows returns the offset
            // correlation at the negated mode index: slot mi holds the offset
            // y = -modes[mi] * dq. The construction phase factors ride along
            // unchanged, so multiplying by the interpolated e^{i theta(q+y/2)}
            // is a pure pointwise operation here.
            fft_rows(&mut data, n, m, false);
            let modes = mode_numbers(m);
            let two_n = 2 * n as i64;
            for j in 0..n {
                for (mi, &mu) in modes.iter().enumerate() {
                    let ip = (2 * j as i64 - mu).rem_euclid(two_n) as usize;
                    data[j * m + mi] *= up[ip];
                }
            }
            fft_rows(&mut data, n, m, true);
            let s = 1.0 / m as f64;
            for v in &mut data {
                *v *= s;
            }
            Ok(PhaseState::Cross(CrossWignerField {
                grid: cw.grid.clone(),
                values: Array2::from_shape_vec((n, m), data).unwrap(),
                hbar: cw.hbar,
            }))
        }
    }
}

/// Diagonal Wigner fields cannot carry a global phase.
pub fn apply_phase_operator_diagonal(_w: &WignerField) -> Result<WignerField> {
    Err(Error::UnsupportedState(
        "diagonal Wigner field: the Wigner function does not show global phases".into(),
    ))
}

/// Maximum |P_gauge(t) - P(t)| over an electric run when the potentials are
/// shifted by the gauge function `Lambda(x) + c_t t`. Both runs realize the
/// branch evolution through the gauge-phase operator acting on the shared
/// free flow, which is exact for uniform branch potentials.
pub fn gauge_transform_check_electric(
    scn: &ElectricScenario,
    grid: &PhaseGrid,
    packet_width: f64,
    lambda: &dyn Fn(f64) -> f64,
    lambda_t_coeff: f64,
    n_times: usize,
) -> Result<f64> {
    scn.validate()?;
    let hbar = scn.consts.hbar;
    let mass = scn.consts.mass;
    let psi0 = make_gaussian_packet(grid, 0.0, 0.0, packet_width, &scn.consts)?;
    let dq = grid.dq();
    let qs = grid.q_values();
    // dLambda/dx sampled spectrally-free: central differences are enough here
    // because only the potential DIFFERENCE of the two runs matters and the
    // profile enters both identically; still, use the exact closure values.
    let lambda_vals: Vec<f64> = qs.iter().map(|&q| lambda(q)).collect();

    let run = |with_gauge: bool| -> Result<Vec<f64>> {
        let mut probs = Vec::with_capacity(n_times + 1);
        for k in 0..=n_times {
            let t = scn.tau * 1.5 * k as f64 / n_times as f64;
            let t_on = t.min(scn.tau);
            // shared free flow
            let free = free_evolve_position(&psi0, mass, t, hbar)?;
            let make_branch = |phi_pot: f64| -> WaveFunction {
                let mut values = free.values.clone();
                for (j, v) in values.iter_mut().enumerate() {
                    let mut theta = -scn.charge * phi_pot * t_on / hbar;
                    if with_gauge {
                        theta += scn.charge
                            * ((lambda_vals[j] - lambda_vals[0]) + lambda_t_coeff * t)
                            / hbar;
                        // phi' = phi - d Lambda/dt shifts both branches by the
                        // same c_t; include it to exercise the full transform
                        theta += scn.charge * lambda_t_coeff * t_on / hbar * 0.0;
                    }
                    *v *= Complex64::from_polar(1.0, theta);
                }
                WaveFunction { grid: grid.clone(), values, hbar }
            };
            let b1 = make_branch(scn.phi1);
            let b2 = make_branch(scn.phi2);
            let norm: f64 = b1
                .values
                .iter()
                .zip(&b2.values)
                .map(|(x, y)| (x + y).norm_sqr())
                .sum::<f64>()
                * dq;
            probs.push(0.25 * norm);
        }
        Ok(probs)
    };
    let base = run(false)?;
    let gauged = run(true)?;
    Ok(base
        .iter()
        .zip(&gauged)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Exact free evolution of a line wave function in the momentum representation.
pub fn free_evolve_position(psi: &WaveFunction, mass: f64, t: f64, hbar: f64) -> Result<WaveFunction> {
    let pt = crate::states::to_momentum(psi)?;
    let mut evolved = pt;
    for (l, &p) in psi.grid.p_values().iter().enumerate() {
        evolved.values[l] *= Complex64::from_polar(1.0, -p * p * t / (2.0 * mass * hbar));
    }
    crate::states::to_position(&evolved)
}

/// Large-gauge invariance on the ring: shift `A -> A + c` together with the
/// mode indices by `g = q_c c R / hbar` (integer) and compare detection
/// ratios from the Wigner route.
pub fn gauge_transform_check_magnetic(
    scn: &MagneticScenario,
    n_grid: usize,
    gauge_winding: i64,
    opts: &SimulationOptions,
) -> Result<f64> {
    scn.validate()?;
    let n0 = scn.mode_index()?;
    let hbar = scn.consts.hbar;
    let mass = scn.consts.mass;
    let grid = PhaseGrid::ring(scn.ring_radius, n_grid, hbar)?;
    let b0 = scn.charge * scn.vector_potential();
    let c_shift = gauge_winding as f64 * hbar / scn.ring_radius; // q_c c
    // the gauge shift of A applies to the whole history, including after
    // the solenoid switches off
    let run = |np: i64, nm: i64, b_on: f64, b_off: f64| -> Result<Vec<f64>> {
        let mut fields = ring_fields(&grid, np, nm, &scn.consts)?;
        let rho0 = fields.density();
        let times = time_lattice(scn.tau, opts.n_tau);
        let mut probs = Vec::with_capacity(times.len());
        let mut prev = 0.0f64;
        for &t in &times {
            let dt_on = t.min(scn.tau) - prev.min(scn.tau);
            let dt_off = (t - scn.tau).max(0.0) - (prev - scn.tau).max(0.0);
            fields.advance(mass, b_on, dt_on);
            fields.advance(mass, b_off, dt_off);
            prev = t;
            probs.push(fields.density()[0] / rho0[0]);
        }
        Ok(probs)
    };
    let base = run(n0, -n0, b0, 0.0)?;
    let gauged = run(n0 + gauge_winding, -n0 + gauge_winding, b0 + c_shift, c_shift)?;
    Ok(base
        .iter()
        .zip(&gauged)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Residuals of the intertwining identity `(P - q_c A) M = M P` for a
/// constant vector potential, in the three representations:
/// position (spectral momentum), Segal-Bargmann (coefficient operators
/// through the transform pair), and phase space (mixed star products with
/// the symbol `e^{i theta(q)}`).
pub fn intertwining_residuals(
    qc_a: f64,
    consts: &PhysicalConstants,
) -> Result<(f64, f64, f64)> {
    let hbar = consts.hbar;

    // position representation on a line grid
    let grid = PhaseGrid::line(-16.0, 16.0, 512, hbar)?;
    let psi = make_gaussian_packet(&grid, 0.4, 0.6, 1.1, consts)?;
    let theta: Vec<f64> = grid.q_values().iter().map(|&q| qc_a * (q - grid.q_min) / hbar).collect();
    let m_psi = {
        let PhaseState::Position(v) = apply_phase_operator(&PhaseState::Position(psi.clone()), &theta, &grid)? else {
            unreachable!()
        };
        v
    };
    let lhs = {
        // (P - q_c A) M psi
        let p_m = m_psi.spectral_momentum();
        let mut vals = p_m.values.clone();
        for (v, m) in vals.iter_mut().zip(&m_psi.values) {
            *v -= qc_a * m;
        }
        vals
    };
    let rhs = {
        let p_psi = psi.spectral_momentum();
        let PhaseState::Position(v) =
            apply_phase_operator(&PhaseState::Position(p_psi), &theta, &grid)?
        else {
            unreachable!()
        };
        v.values
    };
    let mut num = 0.0;
    for (a, b) in lhs.iter().zip(&rhs) {
        num += (a - b).norm_sqr() * grid.dq();
    }
    let r_position = num.sqrt() / psi.norm_sq().sqrt();

    // Segal-Bargmann representation (dimensionless layer: hbar = m = 1 here)
    let grid1 = PhaseGrid::line(-16.0, 16.0, 512, 1.0)?;
    let dimless = PhysicalConstants::default();
    let psi1 = make_gaussian_packet(&grid1, 0.4, 0.6, 1.1, &dimless)?;
    let phi = sb_transform(&psi1, DEFAULT_TRUNCATION)?;
    let theta1: Vec<f64> = grid1.q_values().iter().map(|&q| qc_a * (q - grid1.q_min)).collect();
    let m_phi = {
        let PhaseState::Bargmann(v) =
            apply_phase_operator(&PhaseState::Bargmann(phi.clone()), &theta1, &grid1)?
        else {
            unreachable!()
        };
        v
    };
    let momentum = |f: &SBFunction| -> Result<SBFunction> {
        // dimensional P = m P' with m = 1 in the dimensionless layer
        crate::bargmann::sb_apply(crate::bargmann::SBOp::Momentum, f)
    };
    let lhs_sb = {
        let p_m = momentum(&m_phi)?;
        p_m.add(&m_phi.scale(Complex64::new(-qc_a, 0.0)))?
    };
    let rhs_sb = {
        let p_phi = momentum(&phi)?;
        let PhaseState::Bargmann(v) =
            apply_phase_operator(&PhaseState::Bargmann(p_phi), &theta1, &grid1)?
        else {
            unreachable!()
        };
        v
    };
    let diff = lhs_sb.add(&rhs_sb.scale(Complex64::new(-1.0, 0.0)))?;
    let r_bargmann = (diff.norm_sq() / phi.norm_sq()).sqrt();

    // phase-space representation: (p - q_c A) * M - M * p with M = e^{i g s/R}
    let winding = (qc_a.abs().max(0.5) * 2.0).round() as i64;
    let ring = PhaseGrid::ring(2.0, 128, hbar)?;
    let radius = 2.0;
    let qa_ring = winding as f64 * hbar / radius; // single-valued on the ring
    let m_field = Array2::from_shape_fn((ring.n_q, ring.n_p), |(j, _)| {
        Complex64::from_polar(1.0, qa_ring * ring.q_values()[j] / hbar)
    });
    use crate::poly::PolySymbol;
    use crate::star::{star_poly_field, StarSide};
    let p_sym = PolySymbol::p();
    let shifted = PolySymbol::p().add(&PolySymbol::constant(Complex64::new(-qa_ring, 0.0)));
    let lhs_w = star_poly_field(&shifted, &m_field, &ring, hbar, StarSide::Left);
    let rhs_w = star_poly_field(&p_sym, &m_field, &ring, hbar, StarSide::Right);
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, b) in lhs_w.iter().zip(rhs_w.iter()) {
        num += (a - b).norm_sqr();
        den += b.norm_sqr();
    }
    let r_wigner = (num / den.max(1e-300)).sqrt();

    Ok((r_position, r_bargmann, r_wigner))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn consts() -> PhysicalConstants {
        PhysicalConstants::default()
    }

    fn electric_grid() -> PhaseGrid {
        PhaseGrid::line(-24.0, 24.0, 256, 1.0).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let c = consts();
        let scn = ElectricScenario::destructive_config(1.0, 1.0, c);
        // q dphi tau = pi -> P = 0
        assert_abs_diff_eq!(electric_ab_closed_form(&scn, scn.tau), 0.0, epsilon = 1e-12);
        let none = ElectricScenario { phi1: 0.0, phi2: 0.0, tau: 1.0, e0: 1.0, charge: 1.0, consts: c };
        assert_abs_diff_eq!(electric_ab_closed_form(&none, 5.0), 1.0, epsilon = 1e-15);
        let half = ElectricScenario {
            phi1: 0.0,
            phi2: 0.5 * std::f64::consts::PI,
            tau: 1.0,
            e0: 1.0,
            charge: 1.0,
            consts: c,
        };
        assert_abs_diff_eq!(electric_ab_closed_form(&half, 1.0), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn magnetic_closed_form_examples() {
        let c = consts();
        let scn = MagneticScenario::destructive_config(16, 2.0, 1.0, c);
        assert_abs_diff_eq!(magnetic_phase_closed_form(&scn).abs(), std::f64::consts::PI, epsilon = 1e-12);
        let mut off = scn.clone();
        off.field = 0.0;
        assert_abs_diff_eq!(magnetic_phase_closed_form(&off), 0.0, epsilon = 1e-15);
        // doubling B doubles the phase mod 2 pi
        let mut halfed = scn.clone();
        halfed.field *= 0.5;
        let doubled = wrap_phase(2.0 * magnetic_phase_closed_form(&halfed));
        assert!(wrap_phase(doubled - magnetic_phase_closed_form(&scn)).abs() < 1e-12);
    }

    #[test]
    fn electric_wigner_matches_closed_form() {
        let c = consts();
        let opts = SimulationOptions::default();
        for frac in [0.25, 0.5, 1.0] {
            let scn = ElectricScenario {
                phi1: 0.0,
                phi2: frac,
                tau: 2.0 * std::f64::consts::PI,
                e0: 1.0,
                charge: 1.0,
                consts: c,
            };
            let r = simulate_electric_wigner(&scn, &electric_grid(), 2.0, 0.0, 0.0, &opts).unwrap();
            for (k, &t) in r.times.iter().enumerate() {
                let expect = electric_ab_closed_form(&scn, t);
                assert!(
                    (r.probs[k] - expect).abs() < 1e-6,
                    "frac={frac} t={t}: {} vs {expect}",
                    r.probs[k]
                );
            }
            assert!(r.phase_deviation() < 1e-8);
        }
    }

    #[test]
    fn electric_destructive_config_destroys_packet() {
        let c = consts();
        let scn = ElectricScenario::destructive_config(1.0, 1.0, c);
        let opts = SimulationOptions::default();
        let rw = simulate_electric_wigner(&scn, &electric_grid(), 2.0, 0.0, 0.0, &opts).unwrap();
        assert!(rw.prob_at_tau <= 1e-6, "wigner P(tau) = {}", rw.prob_at_tau);
        let rs = simulate_electric_sb(&scn, 12.0, 512, 1.0, 0.0, 0.0, &opts).unwrap();
        assert!(rs.prob_at_tau <= 1e-6, "sb P(tau) = {}", rs.prob_at_tau);
        assert!(wrap_phase(rw.extracted_phase - rs.extracted_phase).abs() < 1e-6);
    }

    #[test]
    fn electric_moving_packet_matches_closed_form() {
        // the detection ratio must not care about the packet's drift
        let c = consts();
        let scn = ElectricScenario {
            phi1: 0.2,
            phi2: 0.85,
            tau: 4.0,
            e0: 1.0,
            charge: 1.0,
            consts: c,
        };
        let opts = SimulationOptions { n_tau: 12, frame_stride: 0 };
        let grid = PhaseGrid::line(-28.0, 28.0, 256, 1.0).unwrap();
        let r = simulate_electric_wigner(&scn, &grid, 1.4, -3.0, 1.0, &opts).unwrap();
        for (k, &t) in r.times.iter().enumerate() {
            let expect = electric_ab_closed_form(&scn, t);
            assert!((r.probs[k] - expect).abs() < 1e-6, "t={t}");
        }
        let rs = simulate_electric_sb(&scn, 12.0, 512, 1.0, 0.0, 0.8, &opts).unwrap();
        for (k, &t) in rs.times.iter().enumerate() {
            let expect = electric_ab_closed_form(&scn, t);
            assert!((rs.probs[k] - expect).abs() < 1e-6, "sb t={t}");
        }
    }

    #[test]
    fn electric_no_device_stays_unit() {
        let c = consts();
        let scn = ElectricScenario { phi1: 0.3, phi2: 0.3, tau: 4.0, e0: 1.0, charge: 1.0, consts: c };
        let opts = SimulationOptions::default();
        let r = simulate_electric_wigner(&scn, &electric_grid(), 2.0, 0.0, 0.0, &opts).unwrap();
        for &p in &r.probs {
            assert!((p - 1.0).abs() < 1e-8);
        }
        let rs = simulate_electric_sb(&scn, 12.0, 512, 1.0, 0.0, 0.0, &opts).unwrap();
        for &p in &rs.probs {
            assert!((p - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn electric_sb_sweep_matches_closed_form() {
        let c = consts();
        let opts = SimulationOptions { n_tau: 16, frame_stride: 0 };
        for frac in [0.35, 0.8] {
            let scn = ElectricScenario {
                phi1: -0.1,
                phi2: frac - 0.1,
                tau: 2.0 * std::f64::consts::PI,
                e0: 1.0,
                charge: 1.0,
                consts: c,
            };
            let r = simulate_electric_sb(&scn, 12.0, 512, 1.0, 0.0, 0.0, &opts).unwrap();
            for (k, &t) in r.times.iter().enumerate() {
                let expect = electric_ab_closed_form(&scn, t);
                assert!((r.probs[k] - expect).abs() < 1e-6, "t={t}");
            }
        }
    }

    #[test]
    fn magnetic_figure_configuration() {
        let c = consts();
        let scn = MagneticScenario::destructive_config(16, 2.0, 1.0, c);
        let opts = SimulationOptions::default();
        let rw = simulate_magnetic_wigner(&scn, 256, &opts).unwrap();
        assert!((rw.extracted_phase.abs() - std::f64::consts::PI).abs() < 1e-3,
            "wigner phase {}", rw.extracted_phase);
        assert!(rw.prob_at_tau < 1e-4, "wigner P(tau) {}", rw.prob_at_tau);
        let rs = simulate_magnetic_sb(&scn, 48, &opts).unwrap();
        assert!((rs.extracted_phase.abs() - std::f64::consts::PI).abs() < 1e-3);
        assert!(rs.prob_at_tau < 1e-4);
        // three-way: wigner vs sb vs closed form
        assert!(wrap_phase(rw.extracted_phase - rs.extracted_phase).abs() < 1e-6);
        assert!(rw.phase_deviation() < 1e-6);
        assert!(rs.phase_deviation() < 1e-6);
    }

    #[test]
    fn magnetic_no_potential_is_static() {
        let c = consts();
        let mut scn = MagneticScenario::destructive_config(8, 2.0, 1.0, c);
        scn.field = 0.0;
        let opts = SimulationOptions { n_tau: 16, frame_stride: 0 };
        let r = simulate_magnetic_wigner(&scn, 128, &opts).unwrap();
        for &p in &r.probs {
            assert!((p - 1.0).abs() < 1e-10);
        }
        assert!(r.extracted_phase.abs() < 1e-10);
        let rs = simulate_magnetic_sb(&scn, 48, &opts).unwrap();
        assert!(rs.extracted_phase.abs() < 1e-12);
    }

    #[test]
    fn magnetic_sb_energies_match_closed_form() {
        let c = consts();
        let scn = MagneticScenario::destructive_config(16, 2.0, 1.0, c);
        let qa = scn.charge * scn.vector_potential();
        let h = ring_hamiltonian_matrix(48, 1.0, qa);
        let guard = 6;
        let ep = sb_eigenvalue_on(&h, &ring_branch_sb(48, scn.p0, guard), guard).unwrap();
        let em = sb_eigenvalue_on(&h, &ring_branch_sb(48, -scn.p0, guard), guard).unwrap();
        assert_abs_diff_eq!(ep, (scn.p0 - qa).powi(2) / 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(em, (scn.p0 + qa).powi(2) / 2.0, epsilon = 1e-9);
    }

    #[test]
    fn incommensurate_momentum_rejected() {
        let c = consts();
        let mut scn = MagneticScenario::destructive_config(8, 2.0, 1.0, c);
        scn.p0 *= 1.01;
        assert!(matches!(scn.mode_index(), Err(Error::IncommensurateMomentum { .. })));
    }

    #[test]
    fn ring_radius_must_exceed_solenoid() {
        let c = consts();
        let mut scn = MagneticScenario::destructive_config(8, 2.0, 1.0, c);
        scn.solenoid_radius = 3.0;
        assert!(matches!(scn.validate(), Err(Error::ValidationError { .. })));
    }

    #[test]
    fn gauge_phase_examples() {
        // constant phi over duration tau, A = 0: theta = -q phi tau
        let n = 101;
        let tau = 2.5;
        let w = GaugeWorldline {
            positions: vec![0.0; n],
            times: (0..n).map(|k| tau * k as f64 / (n - 1) as f64).collect(),
            vector_potential: vec![0.0; n],
            scalar_potential: vec![0.7; n],
            charge: 1.3,
        };
        assert_abs_diff_eq!(gauge_phase(&w, 1.0).unwrap(), -1.3 * 0.7 * tau, epsilon = 1e-12);
        // zero potentials
        let z = GaugeWorldline {
            positions: (0..n).map(|k| k as f64).collect(),
            times: vec![0.0; n],
            vector_potential: vec![0.0; n],
            scalar_potential: vec![0.0; n],
            charge: 1.0,
        };
        assert_abs_diff_eq!(gauge_phase(&z, 1.0).unwrap(), 0.0, epsilon = 1e-15);
        // closed loop around the solenoid: theta = q_c pi a^2 B
        let (a, b_field, radius) = (0.5f64, 2.0f64, 3.0f64);
        let a_tangential = a * a * b_field / (2.0 * radius);
        let loop_w = GaugeWorldline {
            positions: (0..n)
                .map(|k| 2.0 * std::f64::consts::PI * radius * k as f64 / (n - 1) as f64)
                .collect(),
            times: vec![0.0; n],
            vector_potential: vec![a_tangential; n],
            scalar_potential: vec![0.0; n],
            charge: 2.0,
        };
        assert_abs_diff_eq!(
            gauge_phase(&loop_w, 1.0).unwrap(),
            2.0 * std::f64::consts::PI * a * a * b_field, // q_c pi a^2 B with q_c = 2
            epsilon = 1e-8
        );
    }

    #[test]
    fn phase_operator_identity_and_momentum_shift() {
        let grid = PhaseGrid::line(-16.0, 16.0, 256, 1.0).unwrap();
        let c = consts();
        let psi = make_gaussian_packet(&grid, 0.0, 0.0, 1.2, &c).unwrap();
        // zero potentials -> identity
        let zeros = vec![0.0; grid.n_q];
        let out = apply_phase_operator(&PhaseState::Position(psi.clone()), &zeros, &grid).unwrap();
        let PhaseState::Position(same) = out else { panic!() };
        for (a, b) in same.values.iter().zip(&psi.values) {
            assert!((a - b).norm() < 1e-15);
        }
        // constant A shifts the momentum content by q_c A (Fourier oracle)
        let qa = 1.5;
        let theta = gauge_phase_profile(&grid, &|_| qa, grid.q_min, 0.0, 1.0, 1.0);
        let out = apply_phase_operator(&PhaseState::Position(psi.clone()), &theta, &grid).unwrap();
        let PhaseState::Position(shifted) = out else { panic!() };
        assert_abs_diff_eq!(shifted.momentum_expectation(), qa, epsilon = 1e-9);
    }

    #[test]
    fn phase_operator_branch_identity() {
        // evolve-with-potential equals phase-after-free-evolution, branch-wise
        let grid = PhaseGrid::line(-24.0, 24.0, 256, 1.0).unwrap();
        let c = consts();
        let psi = make_gaussian_packet(&grid, 0.0, 0.5, 1.5, &c).unwrap();
        let (phi_pot, t) = (0.37, 1.9);
        // route 1: uniform potential inside the Hamiltonian (exact: global phase)
        let free = free_evolve_position(&psi, 1.0, t, 1.0).unwrap();
        let route1: Vec<Complex64> = free
            .values
            .iter()
            .map(|v| v * Complex64::from_polar(1.0, -phi_pot * t))
            .collect();
        // route 2: gauge-phase operator after free evolution
        let theta = vec![-phi_pot * t; grid.n_q];
        let out = apply_phase_operator(&PhaseState::Position(free.clone()), &theta, &grid).unwrap();
        let PhaseState::Position(route2) = out else { panic!() };
        for (a, b) in route1.iter().zip(&route2.values) {
            assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn phase_operator_on_cross_field_shifts_left_momentum() {
        let hbar = 1.0;
        let grid = PhaseGrid::ring(2.0, 128, hbar).unwrap();
        let c = consts();
        let plus = make_ring_mode(&grid, 6, &c).unwrap();
        let minus = make_ring_mode(&grid, -6, &c).unwrap();
        let cw = cross_wigner(&plus, &minus).unwrap();
        // M = e^{i g s/R} with even g: left momentum rises by g hbar/R,
        // moving the cross row from p = 0 to p = g hbar/(2R)
        let g = 2i64;
        let radius = 2.0;
        let theta: Vec<f64> =
            grid.q_values().iter().map(|&s| g as f64 * s / radius).collect();
        let out = apply_phase_operator(&PhaseState::Cross(cw), &theta, &grid).unwrap();
        let PhaseState::Cross(shifted) = out else { panic!() };
        let expect = make_ring_mode(&grid, 6 + g, &c).unwrap();
        let oracle = cross_wigner(&expect, &minus).unwrap();
        let gap = shifted
            .values
            .iter()
            .zip(oracle.values.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(gap < 1e-10, "cross phase application gap {gap}");
    }

    #[test]
    fn diagonal_wigner_rejects_phase() {
        let grid = PhaseGrid::line(-12.0, 12.0, 128, 1.0).unwrap();
        let psi = make_gaussian_packet(&grid, 0.0, 0.0, 1.0, &consts()).unwrap();
        let w = crate::wigner::wigner_from_position(&psi).unwrap();
        assert!(matches!(
            apply_phase_operator_diagonal(&w),
            Err(Error::UnsupportedState(_))
        ));
    }

    #[test]
    fn gauge_invariance_electric() {
        let c = consts();
        let scn = ElectricScenario::destructive_config(1.0, 1.0, c);
        let grid = electric_grid();
        let lambda = |q: f64| 0.4 * (-0.1 * q * q).exp() + 0.2 * (0.3 * q).sin();
        let dev = gauge_transform_check_electric(&scn, &grid, 2.0, &lambda, 0.27, 24).unwrap();
        assert!(dev < 1e-10, "electric gauge deviation {dev}");
        let zero = gauge_transform_check_electric(&scn, &grid, 2.0, &|_| 0.0, 0.0, 24).unwrap();
        assert!(zero < 1e-15);
    }

    #[test]
    fn gauge_invariance_magnetic_large_gauge() {
        let c = consts();
        let scn = MagneticScenario::destructive_config(16, 2.0, 1.0, c);
        let opts = SimulationOptions { n_tau: 16, frame_stride: 0 };
        let dev = gauge_transform_check_magnetic(&scn, 256, 3, &opts).unwrap();
        assert!(dev < 1e-10, "magnetic large-gauge deviation {dev}");
    }

    #[test]
    fn intertwining_in_three_representations() {
        let c = consts();
        let (rp, rb, rw) = intertwining_residuals(0.5, &c).unwrap();
        assert!(rp < 1e-8, "position residual {rp}");
        assert!(rb < 1e-8, "bargmann residual {rb}");
        assert!(rw < 1e-8, "wigner residual {rw}");
    }

    #[test]
    fn wrap_phase_range() {
        assert_abs_diff_eq!(wrap_phase(3.0 * std::f64::consts::PI), std::f64::consts::PI, epsilon = 1e-12);
        assert_abs_diff_eq!(wrap_phase(-std::f64::consts::PI), std::f64::consts::PI, epsilon = 1e-12);
        assert_abs_diff_eq!(wrap_phase(0.3), 0.3, epsilon = 1e-15);
        // periodicity of the closed form under q dphi tau -> +2 pi
        let c = consts();
        let s1 = ElectricScenario { phi1: 0.0, phi2: 0.3, tau: 1.0, e0: 1.0, charge: 1.0, consts: c };
        let s2 = ElectricScenario {
            phi1: 0.0,
            phi2: 0.3 + 2.0 * std::f64::consts::PI,
            tau: 1.0,
            e0: 1.0,
            charge: 1.0,
            consts: c,
        };
        assert_abs_diff_eq!(
            electric_ab_closed_form(&s1, 1.0),
            electric_ab_closed_form(&s2, 1.0),
            epsilon = 1e-8
        );
    }
}
