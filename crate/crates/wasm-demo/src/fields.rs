//! Field computations behind the browser demo, kept free of wasm types so
//! they build and test on any target.
//!
//! Fields are computed on a wide internal grid (superpositions spread their
//! offset correlations far past the visible window) and cropped to the
//! central block for display.

use num_complex::Complex64;
use phasespace::ab::{
    electric_ab_closed_form, simulate_electric_wigner, ElectricScenario, SimulationOptions,
};
use phasespace::bargmann::husimi_from_wigner;
use phasespace::states::WaveFunction;
use phasespace::wigner::{wigner_from_position, WignerField};
use phasespace::{PhaseGrid, PhysicalConstants, PlaneGrid};

const INTERNAL_EXTENT: f64 = 20.0;
const INTERNAL_N: usize = 256;

/// Half-width of the view window returned for an n x n crop.
pub fn view_half_extent(n: usize) -> f64 {
    let n = crop_n(n);
    n as f64 / 2.0 * (2.0 * INTERNAL_EXTENT / INTERNAL_N as f64)
}

fn crop_n(n: usize) -> usize {
    n.clamp(32, 160) & !1
}

fn clamp_params(q0: f64, p0: f64, width: f64, separation: f64) -> (f64, f64, f64, f64) {
    (
        q0.clamp(-3.0, 3.0),
        p0.clamp(-3.0, 3.0),
        width.clamp(0.6, 1.6),
        separation.clamp(0.0, 6.0),
    )
}

/// Normalized packet or two-packet superposition used by the demo views.
fn demo_state(
    grid: &PhaseGrid,
    q0: f64,
    p0: f64,
    width: f64,
    separation: f64,
) -> Result<WaveFunction, phasespace::Error> {
    let c = PhysicalConstants::default();
    if separation.abs() < 1e-9 {
        return phasespace::states::make_gaussian_packet(grid, q0, p0, width, &c);
    }
    let a = phasespace::states::make_gaussian_packet(grid, q0 - separation / 2.0, p0, width, &c)?;
    let b = phasespace::states::make_gaussian_packet(grid, q0 + separation / 2.0, -p0, width, &c)?;
    let values: Vec<Complex64> = a.values.iter().zip(&b.values).map(|(x, y)| x + y).collect();
    let mut sum = WaveFunction::from_values(grid.clone(), values, 1.0)?;
    sum.normalize();
    Ok(sum)
}

fn demo_wigner(q0: f64, p0: f64, width: f64, separation: f64) -> Result<WignerField, String> {
    let grid = PhaseGrid::line(-INTERNAL_EXTENT, INTERNAL_EXTENT, INTERNAL_N, 1.0)
        .map_err(|e| e.to_string())?;
    let psi = demo_state(&grid, q0, p0, width, separation).map_err(|e| e.to_string())?;
    wigner_from_position(&psi).map_err(|e| e.to_string())
}

/// Row-major n x n crop of the Wigner field around the origin; superpositions
/// show the negative interference fringes between the two humps.
pub fn wigner_field(q0: f64, p0: f64, width: f64, separation: f64, n: usize) -> Result<Vec<f64>, String> {
    let (q0, p0, width, separation) = clamp_params(q0, p0, width, separation);
    let n = crop_n(n);
    let w = demo_wigner(q0, p0, width, separation)?;
    let off = (INTERNAL_N - n) / 2;
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = w.values[(off + i, off + j)];
        }
    }
    Ok(out)
}

/// Row-major n x n Husimi view of the same state over the matching (q, p)
/// window (q = sqrt2 re z, p = -sqrt2 im z): smoothing removes every
/// negative fringe.
pub fn husimi_field(q0: f64, p0: f64, width: f64, separation: f64, n: usize) -> Result<Vec<f64>, String> {
    let (q0, p0, width, separation) = clamp_params(q0, p0, width, separation);
    let n = crop_n(n);
    let w = demo_wigner(q0, p0, width, separation)?;
    let half = view_half_extent(n) / std::f64::consts::SQRT_2;
    let plane = PlaneGrid::centered(half, n).map_err(|e| e.to_string())?;
    let h = husimi_from_wigner(&w, &plane).map_err(|e| e.to_string())?;
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = h.values[(i, n - 1 - j)];
        }
    }
    Ok(out)
}

/// Interleaved rows `t, P_sim(t), P_closed(t)` for the electric scenario.
pub fn electric_ab_curve(dphi: f64, charge: f64, tau: f64, n_tau: usize) -> Result<Vec<f64>, String> {
    let scn = ElectricScenario {
        phi1: 0.0,
        phi2: dphi.clamp(-4.0, 4.0),
        tau: tau.clamp(0.1, 50.0),
        e0: 1.0,
        charge: charge.clamp(-4.0, 4.0),
        consts: PhysicalConstants::default(),
    };
    let grid = PhaseGrid::line(-24.0, 24.0, 128, 1.0).map_err(|e| e.to_string())?;
    let opts = SimulationOptions { n_tau: n_tau.clamp(4, 200), frame_stride: 0 };
    let r = simulate_electric_wigner(&scn, &grid, 2.0, 0.0, 0.0, &opts).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(3 * r.times.len());
    for (k, &t) in r.times.iter().enumerate() {
        out.push(t);
        out.push(r.probs[k]);
        out.push(electric_ab_closed_form(&scn, t));
    }
    Ok(out)
}
