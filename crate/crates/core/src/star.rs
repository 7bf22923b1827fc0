//! Grid-sampled symbols and the spectral star product.
//!
//! In the double-Fourier domain the bidifferential exponential of the Moyal
//! product becomes a multiplicative twist on the convolution of the spectra:
//! `G^(K,L) = sum_{k1+k2=K, l1+l2=L} A^(k1,l1) B^(k2,l2) e^{i hbar (l1 k2 - l2 k1)/2}`.
//!
//! Grid symbols must be effectively band-limited; coordinate-polynomial
//! symbols are admitted through [`GridSymbol::from_poly_windowed`], which
//! blends them to zero with a Gaussian-tailed radial window. The star product
//! is non-local with reach `~sqrt(hbar)`, so the window's flat core has to
//! extend well past the region where values are to be trusted.

use crate::fft::{fft_cols, fft_inplace, fft_rows, ifft_inplace, mode_numbers};
use crate::grid::PhaseGrid;
use crate::poly::PolySymbol;
use crate::special::erfc;
use crate::{Error, Result};
use ndarray::Array2;
use num_complex::Complex64;

const BAND_LIMIT_SHARE: f64 = 1e-8;
const RESULT_BAND_SHARE: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct GridSymbol {
    pub grid: PhaseGrid,
    pub values: Array2<Complex64>,
}

impl GridSymbol {
    /// Wrap raw samples, enforcing the band-limit admission rule: the top 1%
    /// frequency shell must carry less than 1e-8 of the spectral energy.
    pub fn from_samples(grid: PhaseGrid, values: Array2<Complex64>) -> Result<Self> {
        if values.dim() != (grid.n_q, grid.n_p) {
            return Err(Error::GridMismatch);
        }
        let share = top_shell_share(&values, 0.99);
        if share > BAND_LIMIT_SHARE {
            return Err(Error::BandwidthExceeded { share, limit: BAND_LIMIT_SHARE });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: PhaseGrid, f: impl Fn(f64, f64) -> Complex64) -> Result<Self> {
        let qs = grid.q_values();
        let ps = grid.p_values();
        let values = Array2::from_shape_fn((grid.n_q, grid.n_p), |(j, l)| f(qs[j], ps[l]));
        Self::from_samples(grid, values)
    }

    /// Sample a polynomial times the radial window `erfc((r - core)/width)/2`.
    /// Values are unmodified for `r` well inside `core` and reach zero with
    /// Gaussian tails before the domain edge.
    pub fn from_poly_windowed(grid: PhaseGrid, poly: &PolySymbol, core: f64, width: f64) -> Result<Self> {
        let qs = grid.q_values();
        let ps = grid.p_values();
        let values = Array2::from_shape_fn((grid.n_q, grid.n_p), |(j, l)| {
            let r = (qs[j] * qs[j] + ps[l] * ps[l]).sqrt();
            poly.eval(qs[j], ps[l]) * (0.5 * erfc((r - core) / width))
        });
        Self::from_samples(grid, values)
    }

    pub fn max_abs_on(&self, region: impl Fn(f64, f64) -> bool) -> f64 {
        let qs = self.grid.q_values();
        let ps = self.grid.p_values();
        let mut m = 0.0f64;
        for j in 0..self.grid.n_q {
            for l in 0..self.grid.n_p {
                if region(qs[j], ps[l]) {
                    m = m.max(self.values[(j, l)].norm());
                }
            }
        }
        m
    }
}

/// Energy share of the outermost `1 - inner` frequency shell (max norm).
fn top_shell_share(values: &Array2<Complex64>, inner: f64) -> f64 {
    let (n, m) = values.dim();
    let mut spec: Vec<Complex64> = values.iter().copied().collect();
    fft_rows(&mut spec, n, m, false);
    fft_cols(&mut spec, n, m, false);
    let mq = mode_numbers(n);
    let mp = mode_numbers(m);
    let mut total = 0.0;
    let mut shell = 0.0;
    for j in 0..n {
        for l in 0..m {
            let e = spec[j * m + l].norm_sqr();
            total += e;
            let rq = mq[j].unsigned_abs() as f64 / (n as f64 / 2.0);
            let rp = mp[l].unsigned_abs() as f64 / (m as f64 / 2.0);
            if rq.max(rp) >= inner {
                shell += e;
            }
        }
    }
    if total == 0.0 {
        0.0
    } else {
        shell / total
    }
}

/// Spectral Moyal star product of two grid symbols.
pub fn star_grid(a: &GridSymbol, b: &GridSymbol, hbar: f64) -> Result<GridSymbol> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    let grid = &a.grid;
    let (n, m) = (grid.n_q, grid.n_p);
    let norm = 1.0 / (n * m) as f64;
    let mut fa: Vec<Complex64> = a.values.iter().copied().collect();
    let mut fb: Vec<Complex64> = b.values.iter().copied().collect();
    fft_rows(&mut fa, n, m, false);
    fft_cols(&mut fa, n, m, false);
    fft_rows(&mut fb, n, m, false);
    fft_cols(&mut fb, n, m, false);
    for v in fa.iter_mut().chain(fb.iter_mut()) {
        *v *= norm;
    }
    let kq: Vec<f64> = mode_numbers(n)
        .iter()
        .map(|&mm| 2.0 * std::f64::consts::PI * mm as f64 / grid.q_len())
        .collect();
    let kp: Vec<f64> = mode_numbers(m)
        .iter()
        .map(|&mm| 2.0 * std::f64::consts::PI * mm as f64 / (grid.p_max - grid.p_min))
        .collect();
    // twist table T[i][j] = e^{-i hbar kq[i] kp[j] / 2}
    let twist: Vec<Complex64> = (0..n * m)
        .map(|idx| Complex64::from_polar(1.0, -hbar / 2.0 * kq[idx / m] * kp[idx % m]))
        .collect();

    let mut g = vec![Complex64::default(); n * m];
    let mut col_a = vec![Complex64::default(); n];
    let mut col_b = vec![Complex64::default(); n];
    for j1 in 0..m {
        for j2 in 0..m {
            for i in 0..n {
                // A column dressed with e^{-i hbar l2 k1/2}, B with e^{+i hbar l1 k2/2}
                col_a[i] = fa[i * m + j1] * twist[i * m + j2];
                col_b[i] = fb[i * m + j2] * twist[i * m + j1].conj();
            }
            fft_inplace(&mut col_a);
            fft_inplace(&mut col_b);
            for i in 0..n {
                col_a[i] *= col_b[i];
            }
            ifft_inplace(&mut col_a);
            let lt = (j1 + j2) % m;
            let inv = 1.0 / n as f64;
            for i in 0..n {
                g[i * m + lt] += col_a[i] * inv;
            }
        }
    }
    let mut spec = Array2::from_shape_vec((n, m), g.clone()).unwrap();
    let share = top_shell_share_spec(&spec, 0.99);
    if share > RESULT_BAND_SHARE {
        return Err(Error::BandwidthExceeded { share, limit: RESULT_BAND_SHARE });
    }
    // synthesize values: unnormalized inverse FFT of the coefficient array
    let slice = spec.as_slice_mut().unwrap();
    fft_rows(slice, n, m, true);
    fft_cols(slice, n, m, true);
    Ok(GridSymbol { grid: grid.clone(), values: spec })
}

fn top_shell_share_spec(spec: &Array2<Complex64>, inner: f64) -> f64 {
    let (n, m) = spec.dim();
    let mq = mode_numbers(n);
    let mp = mode_numbers(m);
    let mut total = 0.0;
    let mut shell = 0.0;
    for j in 0..n {
        for l in 0..m {
            let e = spec[(j, l)].norm_sqr();
            total += e;
            let rq = mq[j].unsigned_abs() as f64 / (n as f64 / 2.0);
            let rp = mp[l].unsigned_abs() as f64 / (m as f64 / 2.0);
            if rq.max(rp) >= inner {
                shell += e;
            }
        }
    }
    if total == 0.0 {
        0.0
    } else {
        shell / total
    }
}

pub enum StarSide {
    /// `H * W`
    Left,
    /// `W * H`
    Right,
}

/// Star product of a polynomial symbol with a grid field via the terminating
/// Groenewold series; field derivatives are spectral, polynomial factors exact.
pub fn star_poly_field(
    h: &PolySymbol,
    field: &Array2<Complex64>,
    grid: &PhaseGrid,
    hbar: f64,
    side: StarSide,
) -> Array2<Complex64> {
    let (n, m) = (grid.n_q, grid.n_p);
    debug_assert_eq!(field.dim(), (n, m));
    let mut spec: Vec<Complex64> = field.iter().copied().collect();
    fft_rows(&mut spec, n, m, false);
    fft_cols(&mut spec, n, m, false);
    let norm = 1.0 / (n * m) as f64;
    for v in &mut spec {
        *v *= norm;
    }
    let kq: Vec<f64> = mode_numbers(n)
        .iter()
        .map(|&mm| 2.0 * std::f64::consts::PI * mm as f64 / grid.q_len())
        .collect();
    let kp: Vec<f64> = mode_numbers(m)
        .iter()
        .map(|&mm| 2.0 * std::f64::consts::PI * mm as f64 / (grid.p_max - grid.p_min))
        .collect();
    let qs = grid.q_values();
    let ps = grid.p_values();
    let deg = h.degree();
    let mut fact = vec![1.0f64; (deg + 1) as usize];
    for k in 1..fact.len() {
        fact[k] = fact[k - 1] * k as f64;
    }
    let mut out = Array2::<Complex64>::zeros((n, m));
    let mut work = vec![Complex64::default(); n * m];
    for s in 0..=deg {
        for t in 0..=(deg - s) {
            // H-side derivative: d_q^s d_p^t for Left, d_q^t d_p^s for Right
            let dh = match side {
                StarSide::Left => h.deriv(s, t),
                StarSide::Right => h.deriv(t, s),
            };
            if dh.is_zero() {
                continue;
            }
            // field derivative: d_p^s d_q^t for Left, d_p^t d_q^s for Right
            let (dq_ord, dp_ord) = match side {
                StarSide::Left => (t, s),
                StarSide::Right => (s, t),
            };
            for j in 0..n {
                for l in 0..m {
                    let mul = Complex64::new(0.0, kq[j]).powu(dq_ord)
                        * Complex64::new(0.0, kp[l]).powu(dp_ord);
                    work[j * m + l] = spec[j * m + l] * mul;
                }
            }
            fft_rows(&mut work, n, m, true);
            fft_cols(&mut work, n, m, true);
            let coef = Complex64::new(0.0, hbar / 2.0).powu(s)
                * Complex64::new(0.0, -hbar / 2.0).powu(t)
                / (fact[s as usize] * fact[t as usize]);
            for j in 0..n {
                for l in 0..m {
                    out[(j, l)] += coef * dh.eval(qs[j], ps[l]) * work[j * m + l];
                }
            }
        }
    }
    out
}

/// Normalized residual of the stargenvalue equation:
/// `||H*W - E W|| / ||W||` (Left) or `||W*H - E W|| / ||W||` (Right).
pub fn stargen_residual(
    h: &PolySymbol,
    field: &Array2<Complex64>,
    grid: &PhaseGrid,
    energy: f64,
    side: StarSide,
    hbar: f64,
) -> f64 {
    let hw = star_poly_field(h, field, grid, hbar, side);
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, b) in hw.iter().zip(field.iter()) {
        num += (a - b * energy).norm_sqr();
        den += b.norm_sqr();
    }
    (num / den).sqrt()
}
