//! Declarative scenario configs, the runner that turns them into result
//! files, parameter sweeps, and the self-check suite.
//!
//! Configs are flat JSON documents; unknown scenario kinds and inconsistent
//! parameters are rejected with the offending field named. All emitted files
//! are written to a temporary sibling and renamed into place, so failed runs
//! leave no partial outputs. Numbers serialize with 17 significant digits.

use crate::ab::{
    electric_ab_closed_form, gauge_transform_check_electric, magnetic_phase_closed_form,
    simulate_electric_sb, simulate_electric_wigner, simulate_magnetic_sb,
    simulate_magnetic_wigner, wrap_phase, ElectricScenario, Formalism, Frame, MagneticScenario,
    ScenarioResult, SimulationOptions,
};
use crate::consts::PhysicalConstants;
use crate::evolve::{evolve_wigner, HamiltonianSpec};
use crate::grid::PhaseGrid;
use crate::states::make_gaussian_packet;
use crate::wigner::wigner_from_position;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Free,
    Electric,
    Magnetic,
    GaugeCheck,
    PropertySuite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormalismChoice {
    Wigner,
    SegalBargmann,
    Both,
}

impl FormalismChoice {
    pub fn list(self) -> Vec<Formalism> {
        match self {
            Self::Wigner => vec![Formalism::Wigner],
            Self::SegalBargmann => vec![Formalism::SegalBargmann],
            Self::Both => vec![Formalism::Wigner, Formalism::SegalBargmann],
        }
    }
}

fn default_one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioKind,

    #[serde(default = "default_one")]
    pub hbar: f64,
    #[serde(default = "default_one")]
    pub mass: f64,
    #[serde(default = "default_one")]
    pub charge: f64,
    #[serde(default = "default_one")]
    pub omega: f64,

    #[serde(default = "defaults::formalism")]
    pub formalism: FormalismChoice,
    #[serde(default)]
    pub stride: usize,
    #[serde(default = "defaults::n_tau")]
    pub n_tau: usize,

    // grid / packet
    #[serde(default = "defaults::grid_extent")]
    pub grid_extent: f64,
    #[serde(default = "defaults::n_grid")]
    pub n_grid: usize,
    #[serde(default = "defaults::packet_width")]
    pub packet_width: f64,
    #[serde(default)]
    pub packet_center: f64,
    #[serde(default)]
    pub packet_momentum: f64,

    // electric scenario
    #[serde(default)]
    pub dphi: Option<f64>,
    #[serde(default)]
    pub phi1: Option<f64>,
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default = "default_one")]
    pub e0: f64,

    // magnetic scenario
    #[serde(default)]
    pub ring_radius: Option<f64>,
    #[serde(default)]
    pub solenoid_radius: Option<f64>,
    #[serde(default)]
    pub b_field: Option<f64>,
    #[serde(default)]
    pub mode_index: Option<i64>,

    // free scenario
    #[serde(default = "default_one")]
    pub t_final: f64,

    // gauge check
    #[serde(default = "defaults::gauge_trials")]
    pub gauge_trials: usize,
    #[serde(default = "defaults::seed")]
    pub seed: u64,
}

mod defaults {
    pub fn formalism() -> super::FormalismChoice {
        super::FormalismChoice::Both
    }
    pub fn n_tau() -> usize {
        40
    }
    pub fn grid_extent() -> f64 {
        24.0
    }
    pub fn n_grid() -> usize {
        256
    }
    pub fn packet_width() -> f64 {
        2.0
    }
    pub fn gauge_trials() -> usize {
        4
    }
    pub fn seed() -> u64 {
        7
    }
}

/// Parse and validate a JSON config document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| {
        Error::ParseError(format!("line {}, column {}: {}", e.line(), e.column(), e))
    })?;
    validate_config(&cfg)?;
    Ok(cfg)
}

fn validate_config(cfg: &RunConfig) -> Result<()> {
    let consts = cfg.consts();
    consts.validate()?;
    if cfg.n_grid < 8 || cfg.n_grid % 2 != 0 {
        return Err(Error::ValidationError {
            field: "n_grid".into(),
            reason: "must be even and at least 8".into(),
        });
    }
    if cfg.n_tau == 0 {
        return Err(Error::ValidationError { field: "n_tau".into(), reason: "must be positive".into() });
    }
    match cfg.scenario {
        ScenarioKind::Electric | ScenarioKind::GaugeCheck => {
            if cfg.dphi.is_none() {
                return Err(Error::ValidationError {
                    field: "dphi".into(),
                    reason: "electric scenario requires the branch potential difference".into(),
                });
            }
            let _ = cfg.electric_scenario()?;
        }
        ScenarioKind::Magnetic => {
            let _ = cfg.magnetic_scenario()?;
        }
        ScenarioKind::Free => {
            if !(cfg.t_final > 0.0) {
                return Err(Error::ValidationError {
                    field: "t_final".into(),
                    reason: "must be positive".into(),
                });
            }
        }
        ScenarioKind::PropertySuite => {}
    }
    Ok(())
}

impl RunConfig {
    pub fn consts(&self) -> PhysicalConstants {
        PhysicalConstants { hbar: self.hbar, mass: self.mass, charge: self.charge, omega: self.omega }
    }

    pub fn electric_scenario(&self) -> Result<ElectricScenario> {
        let dphi = self.dphi.ok_or_else(|| Error::ValidationError {
            field: "dphi".into(),
            reason: "missing".into(),
        })?;
        let phi1 = self.phi1.unwrap_or(0.0);
        let scn = ElectricScenario {
            phi1,
            phi2: phi1 + dphi,
            tau: self.tau.unwrap_or(2.0 * std::f64::consts::PI / self.e0),
            e0: self.e0,
            charge: self.charge,
            consts: self.consts(),
        };
        scn.validate()?;
        Ok(scn)
    }

    pub fn magnetic_scenario(&self) -> Result<MagneticScenario> {
        let mode = self.mode_index.unwrap_or(16);
        let ring_radius = self.ring_radius.unwrap_or(2.0);
        let consts = self.consts();
        let mut scn = MagneticScenario::destructive_config(mode, ring_radius, self.charge, consts);
        if let Some(a) = self.solenoid_radius {
            scn.solenoid_radius = a;
        }
        if let Some(b) = self.b_field {
            scn.field = b;
        }
        if let Some(t) = self.tau {
            scn.tau = t;
        }
        scn.validate()?;
        Ok(scn)
    }

    fn options(&self) -> SimulationOptions {
        SimulationOptions { n_tau: self.n_tau, frame_stride: self.stride }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FormalismSummary {
    pub formalism: String,
    pub extracted_phase: f64,
    pub closed_form_phase: f64,
    pub abs_phase_deviation: f64,
    pub prob_at_tau: f64,
    pub closed_form_prob_at_tau: f64,
    pub abs_prob_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub scenario: ScenarioKind,
    pub formalisms: Vec<FormalismSummary>,
    /// Pairwise |phase_wigner - phase_sb| when both ran.
    pub cross_formalism_phase_deviation: Option<f64>,
    pub detail: serde_json::Value,
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn write_timeseries(path: &Path, result: &ScenarioResult) -> Result<()> {
    let mut buf = Vec::new();
    writeln!(buf, "t,prob,phase")?;
    for ((t, p), ph) in result.times.iter().zip(&result.probs).zip(&result.phases) {
        writeln!(buf, "{:.16e},{:.16e},{:.16e}", t, p, ph)?;
    }
    atomic_write(path, &buf)
}

fn write_frames(dir: &Path, frames: &[Frame]) -> Result<()> {
    for (k, frame) in frames.iter().enumerate() {
        let mut buf = Vec::new();
        writeln!(buf, "q,density,phase")?;
        for ((q, d), ph) in frame.qs.iter().zip(&frame.density).zip(&frame.phase) {
            writeln!(buf, "{:.16e},{:.16e},{:.16e}", q, d, ph)?;
        }
        atomic_write(&dir.join(format!("frame_{k}.csv")), &buf)?;
    }
    Ok(())
}

fn summarize(result: &ScenarioResult, closed_prob: f64) -> FormalismSummary {
    FormalismSummary {
        formalism: result.formalism.to_string(),
        extracted_phase: result.extracted_phase,
        closed_form_phase: result.closed_form_phase,
        abs_phase_deviation: result.phase_deviation(),
        prob_at_tau: result.prob_at_tau,
        closed_form_prob_at_tau: closed_prob,
        abs_prob_deviation: (result.prob_at_tau - closed_prob).abs(),
    }
}

/// Execute a config, writing `result.json`, `timeseries*.csv` and frame files
/// into `out_dir`.
pub fn run(cfg: &RunConfig, out_dir: &Path) -> Result<RunSummary> {
    validate_config(cfg)?;
    std::fs::create_dir_all(out_dir)?;
    let summary = match cfg.scenario {
        ScenarioKind::Electric => run_electric(cfg, out_dir)?,
        ScenarioKind::Magnetic => run_magnetic(cfg, out_dir)?,
        ScenarioKind::Free => run_free(cfg, out_dir)?,
        ScenarioKind::GaugeCheck => run_gauge_check(cfg, out_dir)?,
        ScenarioKind::PropertySuite => run_property_suite(cfg, out_dir)?,
    };
    atomic_write(
        &out_dir.join("result.json"),
        serde_json::to_string_pretty(&summary)
            .map_err(|e| Error::ParseError(e.to_string()))?
            .as_bytes(),
    )?;
    Ok(summary)
}

fn timeseries_name(f: Formalism, primary: bool) -> String {
    if primary {
        "timeseries.csv".into()
    } else {
        format!("timeseries_{}.csv", f.to_string().replace('-', "_"))
    }
}

fn run_electric(cfg: &RunConfig, out_dir: &Path) -> Result<RunSummary> {
    let scn = cfg.electric_scenario()?;
    let opts = cfg.options();
    let mut results = Vec::new();
    for f in cfg.formalism.list() {
        let r = match f {
            Formalism::Wigner => {
                let grid = PhaseGrid::line(-cfg.grid_extent, cfg.grid_extent, cfg.n_grid, cfg.hbar)?;
                simulate_electric_wigner(
                    &scn,
                    &grid,
                    cfg.packet_width,
                    cfg.packet_center,
                    cfg.packet_momentum,
                    &opts,
                )?
            }
            Formalism::SegalBargmann => simulate_electric_sb(
                &scn,
                cfg.grid_extent / 2.0,
                cfg.n_grid.max(512),
                cfg.packet_width / 2.0,
                cfg.packet_center,
                cfg.packet_momentum,
                &opts,
            )?,
        };
        results.push(r);
    }
    let closed_prob = electric_ab_closed_form(&scn, scn.tau);
    finish_run(cfg, out_dir, results, closed_prob, serde_json::json!({ "scenario": scn }))
}

fn run_magnetic(cfg: &RunConfig, out_dir: &Path) -> Result<RunSummary> {
    let scn = cfg.magnetic_scenario()?;
    let opts = cfg.options();
    let mut results = Vec::new();
    for f in cfg.formalism.list() {
        let r = match f {
            Formalism::Wigner => simulate_magnetic_wigner(&scn, cfg.n_grid, &opts)?,
            Formalism::SegalBargmann => simulate_magnetic_sb(&scn, 48, &opts)?,
        };
        results.push(r);
    }
    let closed_phase = magnetic_phase_closed_form(&scn);
    let closed_prob = 0.5 * (1.0 + closed_phase.cos());
    finish_run(cfg, out_dir, results, closed_prob, serde_json::json!({ "scenario": scn }))
}

fn finish_run(
    cfg: &RunConfig,
    out_dir: &Path,
    results: Vec<ScenarioResult>,
    closed_prob: f64,
    detail: serde_json::Value,
) -> Result<RunSummary> {
    for (i, r) in results.iter().enumerate() {
        write_timeseries(&out_dir.join(timeseries_name(r.formalism, i == 0)), r)?;
        if i == 0 && cfg.stride > 0 {
            write_frames(out_dir, &r.frames)?;
        }
    }
    let cross = if results.len() == 2 {
        Some(wrap_phase(results[0].extracted_phase - results[1].extracted_phase).abs())
    } else {
        None
    };
    Ok(RunSummary {
        scenario: cfg.scenario,
        formalisms: results.iter().map(|r| summarize(r, closed_prob)).collect(),
        cross_formalism_phase_deviation: cross,
        detail,
    })
}

fn run_free(cfg: &RunConfig, out_dir: &Path) -> Result<RunSummary> {
    let consts = cfg.consts();
    let grid = PhaseGrid::line(-cfg.grid_extent, cfg.grid_extent, cfg.n_grid, cfg.hbar)?;
    let psi = make_gaussian_packet(&grid, cfg.packet_center, cfg.packet_momentum, cfg.packet_width, &consts)?;
    let w0 = wigner_from_position(&psi)?;
    let spec = HamiltonianSpec::free(cfg.mass);
    let dt = spec.dt_bound(&grid, cfg.hbar);
    let n_out = cfg.n_tau;
    let mut times = Vec::new();
    let mut traces = Vec::new();
    let mut frames = Vec::new();
    let mut w = w0.clone();
    for k in 0..=n_out {
        let t = cfg.t_final * k as f64 / n_out as f64;
        if k > 0 {
            w = evolve_wigner(&w, &spec, cfg.t_final / n_out as f64, dt)?;
        }
        times.push(t);
        traces.push(w.integral());
        if cfg.stride > 0 && k % cfg.stride == 0 {
            let density = w.marginal_position();
            let phase = vec![0.0; grid.n_q];
            frames.push(Frame { t, qs: grid.q_values(), density, phase });
        }
    }
    // analytic shear oracle at t_final
    let qs = grid.q_values();
    let ps = grid.p_values();
    let mut worst = 0.0f64;
    for j in 0..grid.n_q {
        for l in 0..grid.n_p {
            let q_back = qs[j] - ps[l] * cfg.t_final / cfg.mass;
            let w_exact = analytic_gaussian_wigner(
                q_back,
                ps[l],
                cfg.packet_center,
                cfg.packet_momentum,
                cfg.packet_width,
                cfg.hbar,
            );
            worst = worst.max((w.values[(j, l)] - w_exact).abs());
        }
    }
    let trace_drift = traces
        .iter()
        .map(|tr| (tr - traces[0]).abs())
        .fold(0.0, f64::max);
    let mut buf = Vec::new();
    writeln!(buf, "t,prob,phase")?;
    for (t, tr) in times.iter().zip(&traces) {
        writeln!(buf, "{:.16e},{:.16e},{:.16e}", t, tr, 0.0)?;
    }
    atomic_write(&out_dir.join("timeseries.csv"), &buf)?;
    write_frames(out_dir, &frames)?;
    let mut wbuf = Vec::new();
    w.write_csv(&mut wbuf)?;
    atomic_write(&out_dir.join("wigner_final.csv"), &wbuf)?;
    if (cfg.hbar - 1.0).abs() < 1e-12 {
        let plane = crate::grid::PlaneGrid::centered(cfg.grid_extent / std::f64::consts::SQRT_2, 96)?;
        let h = crate::bargmann::husimi_from_wigner(&w, &plane)?;
        let mut hbuf = Vec::new();
        h.write_csv(&mut hbuf)?;
        atomic_write(&out_dir.join("husimi_final.csv"), &hbuf)?;
    }
    Ok(RunSummary {
        scenario: cfg.scenario,
        formalisms: Vec::new(),
        cross_formalism_phase_deviation: None,
        detail: serde_json::json!({
            "shear_oracle_max_abs_error": worst,
            "trace_drift": trace_drift,
            "steps": (cfg.t_final / dt).ceil(),
        }),
    })
}

/// Closed-form Wigner function of a Gaussian packet.
fn analytic_gaussian_wigner(q: f64, p: f64, q0: f64, p0: f64, width: f64, hbar: f64) -> f64 {
    let sq = (q - q0) / width;
    let sp = (p - p0) * width / hbar;
    (-(sq * sq) - sp * sp).exp() / (std::f64::consts::PI * hbar)
}

fn run_gauge_check(cfg: &RunConfig, out_dir: &Path) -> Result<RunSummary> {
    use rand::{Rng, SeedableRng};
    let scn = cfg.electric_scenario()?;
    let grid = PhaseGrid::line(-cfg.grid_extent, cfg.grid_extent, cfg.n_grid, cfg.hbar)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut deviations = Vec::new();
    for _ in 0..cfg.gauge_trials {
        let amp: f64 = rng.random_range(-1.0..1.0);
        let freq: f64 = rng.random_range(0.1..0.5);
        let width: f64 = rng.random_range(0.05..0.2);
        let ct: f64 = rng.random_range(-0.5..0.5);
        let lambda = move |q: f64| amp * (-width * q * q).exp() + 0.3 * amp * (freq * q).sin();
        let dev =
            gauge_transform_check_electric(&scn, &grid, cfg.packet_width, &lambda, ct, cfg.n_tau)?;
        deviations.push(dev);
    }
    let max_dev = deviations.iter().copied().fold(0.0, f64::max);
    let mut buf = Vec::new();
    writeln!(buf, "t,prob,phase")?;
    atomic_write(&out_dir.join("timeseries.csv"), &buf)?;
    Ok(RunSummary {
        scenario: cfg.scenario,
        formalisms: Vec::new(),
        cross_formalism_phase_deviation: None,
        detail: serde_json::json!({
            "gauge_trials": cfg.gauge_trials,
            "max_probability_deviation": max_dev,
            "per_trial": deviations,
        }),
    })
}

fn run_property_suite(cfg: &RunConfig, out_dir: &Path) -> Result<RunSummary> {
    let checks = suite();
    let passed = checks.iter().filter(|c| c.passed).count();
    let mut buf = Vec::new();
    writeln!(buf, "t,prob,phase")?;
    atomic_write(&out_dir.join("timeseries.csv"), &buf)?;
    Ok(RunSummary {
        scenario: cfg.scenario,
        formalisms: Vec::new(),
        cross_formalism_phase_deviation: None,
        detail: serde_json::json!({
            "passed": passed,
            "failed": checks.len() - passed,
            "checks": checks,
        }),
    })
}

/// Replace one parameter of a config by name.
pub fn override_param(cfg: &RunConfig, name: &str, value: f64) -> Result<RunConfig> {
    let mut out = cfg.clone();
    match name {
        "dphi" => out.dphi = Some(value),
        "phi1" => out.phi1 = Some(value),
        "tau" => out.tau = Some(value),
        "e0" => out.e0 = value,
        "charge" => out.charge = value,
        "hbar" => out.hbar = value,
        "mass" => out.mass = value,
        "b_field" => out.b_field = Some(value),
        "solenoid_radius" => out.solenoid_radius = Some(value),
        "ring_radius" => out.ring_radius = Some(value),
        "mode_index" => out.mode_index = Some(value as i64),
        "packet_width" => out.packet_width = value,
        "packet_center" => out.packet_center = value,
        "packet_momentum" => out.packet_momentum = value,
        "t_final" => out.t_final = value,
        other => {
            return Err(Error::ValidationError {
                field: other.into(),
                reason: "unknown sweep parameter".into(),
            })
        }
    }
    validate_config(&out)?;
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub value: f64,
    pub out_dir: PathBuf,
    pub summary: RunSummary,
}

/// Run the config once per parameter value, each into its own subdirectory,
/// and write an aggregate `sweep_summary.json`.
pub fn sweep(cfg: &RunConfig, param: &str, values: &[f64], out_root: &Path) -> Result<Vec<SweepEntry>> {
    std::fs::create_dir_all(out_root)?;
    let mut entries = Vec::new();
    for &v in values {
        let sub = out_root.join(format!("{param}={v}"));
        let cfg_v = override_param(cfg, param, v)?;
        let summary = run(&cfg_v, &sub)?;
        entries.push(SweepEntry { value: v, out_dir: sub, summary });
    }
    atomic_write(
        &out_root.join("sweep_summary.json"),
        serde_json::to_string_pretty(&entries)
            .map_err(|e| Error::ParseError(e.to_string()))?
            .as_bytes(),
    )?;
    Ok(entries)
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> SuiteCheck {
    SuiteCheck { name: name.into(), passed, detail }
}

/// Fast self-check battery over all modules; mirrors the acceptance criteria
/// at reduced size.
pub fn suite() -> Vec<SuiteCheck> {
    use crate::poly::{classical_limit_probe, moyal_bracket, star_poly, PolySymbol};
    use num_complex::Complex64;
    let mut out = Vec::new();
    let consts = PhysicalConstants::default();

    // Wigner construction battery
    {
        let grid = PhaseGrid::line(-12.0, 12.0, 256, 1.0).unwrap();
        let psi = make_gaussian_packet(&grid, 0.4, -0.8, 1.1, &consts).unwrap();
        match wigner_from_position(&psi) {
            Ok(w) => {
                let norm_err = (w.integral() - 1.0).abs();
                let bound_ok = w.max_abs() <= (1.0 / std::f64::consts::PI) * (1.0 + 1e-9);
                let marg = w.marginal_position();
                let mut l2 = 0.0;
                for (j, m) in marg.iter().enumerate() {
                    l2 += (m - psi.values[j].norm_sqr()).powi(2) * grid.dq();
                }
                let ok = norm_err < 1e-6 && bound_ok && l2.sqrt() < 1e-6;
                out.push(check(
                    "wigner-normalization-bound-marginals",
                    ok,
                    format!("norm err {norm_err:.2e}, marginal L2 {:.2e}", l2.sqrt()),
                ));
            }
            Err(e) => out.push(check("wigner-normalization-bound-marginals", false, e.to_string())),
        }
    }

    // star product identities and oracle
    {
        let h = 1.0;
        let s = star_poly(&PolySymbol::q(), &PolySymbol::p(), h).unwrap();
        let mut expect = PolySymbol::monomial(1, 1, Complex64::new(1.0, 0.0));
        expect.add_term(0, 0, Complex64::new(0.0, 0.5));
        let id_err = s.coeff_distance(&expect);
        let br = moyal_bracket(&PolySymbol::q(), &PolySymbol::p(), h).unwrap();
        let br_err = br.coeff_distance(&PolySymbol::constant(Complex64::new(0.0, 1.0)));
        out.push(check(
            "star-poly-canonical-identities",
            id_err < 1e-14 && br_err < 1e-14,
            format!("q*p err {id_err:.2e}, bracket err {br_err:.2e}"),
        ));

        let a = PolySymbol::monomial(2, 0, Complex64::new(0.8, 0.0))
            .add(&PolySymbol::monomial(1, 1, Complex64::new(-0.3, 0.0)));
        let b = PolySymbol::monomial(0, 2, Complex64::new(1.2, 0.0))
            .add(&PolySymbol::monomial(1, 0, Complex64::new(0.5, 0.0)));
        let ok = (|| -> Result<f64> {
            let ma = crate::oscbasis::weyl_to_matrix(&a, 64, h)?;
            let mb = crate::oscbasis::weyl_to_matrix(&b, 64, h)?;
            let sym = crate::oscbasis::matrix_to_symbol_poly(&ma.mul(&mb), 4, h)?;
            Ok(sym.coeff_distance(&star_poly(&a, &b, h)?))
        })();
        match ok {
            Ok(d) => out.push(check("star-vs-matrix-oracle", d < 1e-8, format!("coeff distance {d:.2e}"))),
            Err(e) => out.push(check("star-vs-matrix-oracle", false, e.to_string())),
        }
    }

    // classical limit rate
    {
        let a = crate::poly::PolySymbol::monomial(4, 0, Complex64::new(1.0, 0.0));
        let b = crate::poly::PolySymbol::monomial(0, 4, Complex64::new(1.0, 0.0));
        let errs = classical_limit_probe(&a, &b, &[1.0, 0.5, 0.25]).unwrap();
        let r1 = errs[0] / errs[1];
        let r2 = errs[1] / errs[2];
        let ok = (3.5..=4.5).contains(&r1) && (3.5..=4.5).contains(&r2);
        out.push(check("classical-limit-quadratic-rate", ok, format!("ratios {r1:.3}, {r2:.3}")));
    }

    // Segal-Bargmann battery
    {
        let grid = PhaseGrid::line(-12.0, 12.0, 512, 1.0).unwrap();
        let psi = make_gaussian_packet(&grid, 0.7, 0.4, 1.0, &consts).unwrap();
        let r = (|| -> Result<(f64, f64)> {
            let phi = crate::bargmann::sb_transform(&psi, 64)?;
            let back = crate::bargmann::sb_inverse(&phi, &grid, 1.0)?;
            let mut l2 = 0.0;
            for (a, b) in psi.values.iter().zip(&back.values) {
                l2 += (a - b).norm_sqr() * grid.dq();
            }
            let spec = crate::bargmann::harmonic_spectrum(64, 1.0);
            let spec_err = spec
                .iter()
                .enumerate()
                .take(60)
                .map(|(n, e)| (e - (n as f64 + 0.5)).abs())
                .fold(0.0, f64::max);
            Ok((l2.sqrt(), spec_err))
        })();
        match r {
            Ok((l2, spec_err)) => out.push(check(
                "segal-bargmann-roundtrip-spectrum",
                l2 < 1e-8 && spec_err < 1e-10,
                format!("roundtrip L2 {l2:.2e}, spectrum err {spec_err:.2e}"),
            )),
            Err(e) => out.push(check("segal-bargmann-roundtrip-spectrum", false, e.to_string())),
        }
    }

    // two-path Husimi
    {
        let grid = PhaseGrid::line(-12.0, 12.0, 256, 1.0).unwrap();
        let plane = crate::grid::PlaneGrid::centered(4.5, 64).unwrap();
        let psi = make_gaussian_packet(&grid, -0.5, 0.9, 1.0, &consts).unwrap();
        let r = (|| -> Result<f64> {
            let phi = crate::bargmann::sb_transform(&psi, 64)?;
            let ha = crate::bargmann::husimi_from_sb(&phi, &plane);
            let w = wigner_from_position(&psi)?;
            let hb = crate::bargmann::husimi_from_wigner(&w, &plane)?;
            Ok(ha
                .values
                .iter()
                .zip(hb.values.iter())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max))
        })();
        match r {
            Ok(gap) => out.push(check("husimi-two-path", gap < 1e-6, format!("Linf gap {gap:.2e}"))),
            Err(e) => out.push(check("husimi-two-path", false, e.to_string())),
        }
    }

    // AB electric + magnetic against closed forms
    {
        let scn = ElectricScenario::destructive_config(1.0, 1.0, consts);
        let grid = PhaseGrid::line(-24.0, 24.0, 256, 1.0).unwrap();
        let opts = SimulationOptions { n_tau: 16, frame_stride: 0 };
        let r = simulate_electric_wigner(&scn, &grid, 2.0, 0.0, 0.0, &opts);
        match r {
            Ok(r) => out.push(check(
                "electric-ab-destructive",
                r.prob_at_tau <= 1e-6,
                format!("P(tau) = {:.2e}", r.prob_at_tau),
            )),
            Err(e) => out.push(check("electric-ab-destructive", false, e.to_string())),
        }
        let mscn = MagneticScenario::destructive_config(16, 2.0, 1.0, consts);
        match simulate_magnetic_wigner(&mscn, 256, &opts) {
            Ok(r) => out.push(check(
                "magnetic-ab-pi-phase",
                (r.extracted_phase.abs() - std::f64::consts::PI).abs() < 1e-3 && r.prob_at_tau < 1e-4,
                format!("phase {:.6}, P(tau) {:.2e}", r.extracted_phase, r.prob_at_tau),
            )),
            Err(e) => out.push(check("magnetic-ab-pi-phase", false, e.to_string())),
        }
    }

    // gauge machinery
    {
        match crate::ab::intertwining_residuals(0.5, &consts) {
            Ok((rp, rb, rw)) => out.push(check(
                "gauge-intertwining-three-representations",
                rp < 1e-8 && rb < 1e-8 && rw < 1e-8,
                format!("residuals {rp:.2e} / {rb:.2e} / {rw:.2e}"),
            )),
            Err(e) => out.push(check("gauge-intertwining-three-representations", false, e.to_string())),
        }
    }

    out
}
