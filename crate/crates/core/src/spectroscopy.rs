//! Quantum-defect spectroscopy: Rydberg–Ritz fits, ionization thresholds and
//! pair-state Förster defects.
//!
//! Level energies are E(n) = E_I − Ry/(n − δ(n))² in cm⁻¹; residuals and
//! uncertainties are reported in MHz.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::angular::Term;
use crate::constants::MHZ_PER_CM1;
use crate::error::{Error, Result};
use crate::lm::{LmConfig, levenberg_marquardt, weighted_linear_fit};
use crate::species::{AtomicSpecies, DefectModel, ritz_delta};

/// Default per-level uncertainty, MHz.
pub const DEFAULT_SIGMA_MHZ: f64 = 4.0;

const BUNDLED_YB174_3S1: &str = include_str!("../data/yb174_3s1_energies.csv");

/// One measured level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyRecord {
    pub n: u32,
    pub energy_cm1: f64,
    pub sigma_mhz: f64,
}

#[derive(Debug, Deserialize)]
struct EnergyRow {
    n: u32,
    energy_cm1: f64,
    sigma_mhz: Option<f64>,
}

/// Read `n,energy_cm1[,sigma_mhz]` CSV. Repeated rows with identical values
/// are merged; conflicting repeats are an error.
pub fn read_energies<R: Read>(reader: R) -> Result<Vec<EnergyRecord>> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut by_n: BTreeMap<u32, EnergyRecord> = BTreeMap::new();
    for row in csv.deserialize::<EnergyRow>() {
        let row = row?;
        let sigma = row.sigma_mhz.unwrap_or(DEFAULT_SIGMA_MHZ);
        if !row.energy_cm1.is_finite() || !(sigma > 0.0) {
            return Err(Error::Data(format!("invalid energy row for n = {}", row.n)));
        }
        let rec = EnergyRecord { n: row.n, energy_cm1: row.energy_cm1, sigma_mhz: sigma };
        match by_n.get(&row.n) {
            Some(prev) if prev.energy_cm1 != rec.energy_cm1 => {
                return Err(Error::Data(format!("conflicting energies for n = {}", row.n)));
            }
            _ => {
                by_n.insert(row.n, rec);
            }
        }
    }
    if by_n.is_empty() {
        return Err(Error::InsufficientData("energy file has no records".into()));
    }
    Ok(by_n.into_values().collect())
}

pub fn load_energies(path: &Path) -> Result<Vec<EnergyRecord>> {
    read_energies(std::fs::File::open(path)?)
}

/// The bundled ¹⁷⁴Yb 6sns ³S₁ level energies, n = 28–100.
pub fn bundled_yb174_3s1() -> Vec<EnergyRecord> {
    read_energies(BUNDLED_YB174_3S1.as_bytes()).expect("bundled data parses")
}

/// Raw text of the bundled table.
pub fn bundled_yb174_3s1_csv() -> &'static str {
    BUNDLED_YB174_3S1
}

/// δ = n − √(Ry/(E_I − E)).
pub fn defect_from_energy(record: &EnergyRecord, ionization_energy_cm1: f64, rydberg_constant_cm1: f64) -> Result<f64> {
    let binding = ionization_energy_cm1 - record.energy_cm1;
    if !(binding > 0.0) {
        return Err(Error::AboveThreshold { energy: record.energy_cm1, threshold: ionization_energy_cm1 });
    }
    Ok(record.n as f64 - (rydberg_constant_cm1 / binding).sqrt())
}

/// E = E_I − Ry/(n − δ)².
pub fn energy_from_defect(n: u32, delta: f64, ionization_energy_cm1: f64, rydberg_constant_cm1: f64) -> f64 {
    let n_star = n as f64 - delta;
    ionization_energy_cm1 - rydberg_constant_cm1 / (n_star * n_star)
}

/// Level energy of a series under a defect model.
pub fn energy_of(model: &DefectModel, n: u32, ionization_energy_cm1: f64, rydberg_constant_cm1: f64) -> f64 {
    energy_from_defect(n, model.delta(n as f64), ionization_energy_cm1, rydberg_constant_cm1)
}

/// Per-level fit residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub n: u32,
    pub energy_cm1: f64,
    pub fitted_cm1: f64,
    /// measured − fitted.
    pub residual_mhz: f64,
}

/// Fitted extended Rydberg–Ritz model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RitzModel {
    /// δ₀, δ₂, δ₄, …
    pub coefficients: Vec<f64>,
    pub uncertainties: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    /// Inclusive n range used in the fit.
    pub range: (u32, u32),
    pub ionization_energy_cm1: f64,
    /// Present when the threshold was a free parameter.
    pub ionization_energy_sigma_cm1: Option<f64>,
    pub rydberg_constant_cm1: f64,
    pub residuals: Vec<Residual>,
    pub rms_mhz: f64,
    pub chi2: f64,
    pub degrees_of_freedom: usize,
}

impl RitzModel {
    pub fn delta(&self, n: f64) -> f64 {
        ritz_delta(&self.coefficients, n)
    }

    pub fn energy(&self, n: u32) -> f64 {
        energy_from_defect(n, self.delta(n as f64), self.ionization_energy_cm1, self.rydberg_constant_cm1)
    }

    pub fn defect_model(&self) -> DefectModel {
        DefectModel::Ritz { coefficients: self.coefficients.clone() }
    }

    /// measured − model at the level `record`, MHz.
    pub fn deviation_mhz(&self, record: &EnergyRecord) -> f64 {
        (record.energy_cm1 - self.energy(record.n)) * MHZ_PER_CM1
    }
}

/// Settings for [`fit_ritz`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RitzFitOptions {
    /// Highest inverse power of (n − δ₀) kept; must be even.
    pub order: usize,
    /// Inclusive n window.
    pub range: (u32, u32),
    pub ionization_energy_cm1: f64,
    pub rydberg_constant_cm1: f64,
    /// Fit E_I jointly with the defect parameters.
    pub free_threshold: bool,
}

impl RitzFitOptions {
    pub fn for_species(species: &AtomicSpecies, order: usize, range: (u32, u32)) -> Self {
        RitzFitOptions {
            order,
            range,
            ionization_energy_cm1: species.ionization_energy_cm1,
            rydberg_constant_cm1: species.rydberg_constant_cm1,
            free_threshold: false,
        }
    }
}

fn select(records: &[EnergyRecord], range: (u32, u32)) -> Vec<EnergyRecord> {
    records.iter().filter(|r| r.n >= range.0 && r.n <= range.1).copied().collect()
}

/// Best δ₂, δ₄, … for fixed δ₀ by linear least squares on the observed
/// defects, and the weighted residual sum of squares.
fn project_defects(ns: &[f64], obs: &[f64], w: &[f64], d0: f64, extra: usize) -> Option<(Vec<f64>, f64)> {
    let y: Vec<f64> = obs.iter().map(|d| d - d0).collect();
    if extra == 0 {
        let ssr = y.iter().zip(w).map(|(v, w)| w * v * v).sum();
        return Some((Vec::new(), ssr));
    }
    let design = DMatrix::from_fn(ns.len(), extra, |i, j| {
        let x = 1.0 / ((ns[i] - d0) * (ns[i] - d0));
        x.powi(j as i32 + 1)
    });
    weighted_linear_fit(&design, &y, w)
}

/// Starting point from a one-dimensional search over δ₀ with the remaining
/// coefficients projected out.
fn initial_ritz(ns: &[f64], obs: &[f64], w: &[f64], extra: usize) -> Result<Vec<f64>> {
    if extra == 0 {
        let sw: f64 = w.iter().sum();
        let mean = obs.iter().zip(w).map(|(d, w)| d * w).sum::<f64>() / sw;
        return Ok(vec![mean]);
    }
    let lo = obs.iter().cloned().fold(f64::INFINITY, f64::min) - 0.25;
    let hi = obs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 0.25;
    let cost = |d0: f64| project_defects(ns, obs, w, d0, extra).map(|(_, s)| s).unwrap_or(f64::INFINITY);
    let steps = 4000;
    let h = (hi - lo) / steps as f64;
    let (mut best, mut best_cost) = (lo, f64::INFINITY);
    for i in 0..=steps {
        let d0 = lo + h * i as f64;
        let c = cost(d0);
        if c < best_cost {
            best = d0;
            best_cost = c;
        }
    }
    // Golden-section refinement inside the winning cell.
    let (mut a, mut b) = (best - h, best + h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    let (mut fc, mut fd) = (cost(c), cost(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = cost(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = cost(d);
        }
    }
    let d0 = 0.5 * (a + b);
    let (rest, _) = project_defects(ns, obs, w, d0, extra)
        .ok_or_else(|| Error::Nonconvergence("defect-space projection is singular".into()))?;
    let mut p = vec![d0];
    p.extend(rest);
    Ok(p)
}

/// Weighted nonlinear least-squares fit of the extended Rydberg–Ritz model.
pub fn fit_ritz(records: &[EnergyRecord], options: RitzFitOptions) -> Result<RitzModel> {
    if options.order % 2 != 0 {
        return Err(Error::InvalidParameter(format!("Ritz order must be even, got {}", options.order)));
    }
    let data = select(records, options.range);
    let n_params = options.order / 2 + 1 + usize::from(options.free_threshold);
    if data.len() < options.order + 2 || data.len() <= n_params {
        return Err(Error::InsufficientData(format!(
            "{} levels in n = {}..={} for an order-{} fit",
            data.len(),
            options.range.0,
            options.range.1,
            options.order
        )));
    }
    let ry = options.rydberg_constant_cm1;
    let e_i = options.ionization_energy_cm1;
    let ns: Vec<f64> = data.iter().map(|r| r.n as f64).collect();
    let sig: Vec<f64> = data.iter().map(|r| r.sigma_mhz / MHZ_PER_CM1).collect();
    let obs = data
        .iter()
        .map(|r| defect_from_energy(r, e_i, ry))
        .collect::<Result<Vec<f64>>>()?;
    // σ_δ = σ_E n*³ / (2 Ry)
    let w: Vec<f64> = data
        .iter()
        .zip(&obs)
        .zip(&sig)
        .map(|((r, d), s)| {
            let ns = r.n as f64 - d;
            let sd = s * ns.powi(3) / (2.0 * ry);
            1.0 / (sd * sd)
        })
        .collect();
    let extra = options.order / 2;
    let mut p0 = initial_ritz(&ns, &obs, &w, extra)?;
    if options.free_threshold {
        p0.push(e_i);
    }

    let n_ritz = extra + 1;
    let free = options.free_threshold;
    let energies: Vec<f64> = data.iter().map(|r| r.energy_cm1).collect();
    let model_energy = |p: &[f64], n: f64| {
        let ei = if free { p[n_ritz] } else { e_i };
        let ns = n - ritz_delta(&p[..n_ritz], n);
        ei - ry / (ns * ns)
    };
    let model = |p: &[f64]| -> Result<(Vec<f64>, DMatrix<f64>)> {
        let mut r = Vec::with_capacity(ns.len());
        let mut jac = DMatrix::zeros(ns.len(), p.len());
        for (i, &n) in ns.iter().enumerate() {
            let e = model_energy(p, n);
            if !e.is_finite() {
                return Err(Error::Nonconvergence("model energy is not finite".into()));
            }
            r.push((e - energies[i]) / sig[i]);
            let d0 = p[0];
            let x = 1.0 / ((n - d0) * (n - d0));
            let n_star = n - ritz_delta(&p[..n_ritz], n);
            let de_ddelta = -2.0 * ry / n_star.powi(3);
            // δ₀ enters both linearly and through every denominator.
            let h = 1e-7;
            let mut plus = p.to_vec();
            let mut minus = p.to_vec();
            plus[0] += h;
            minus[0] -= h;
            jac[(i, 0)] = (model_energy(&plus, n) - model_energy(&minus, n)) / (2.0 * h) / sig[i];
            for j in 1..n_ritz {
                jac[(i, j)] = de_ddelta * x.powi(j as i32) / sig[i];
            }
            if free {
                jac[(i, n_ritz)] = 1.0 / sig[i];
            }
        }
        Ok((r, jac))
    };
    let sol = levenberg_marquardt(model, &p0, LmConfig::default())?;
    let cov = &sol.covariance;
    let unc = sol.uncertainties();
    let fitted_ei = if free { sol.params[n_ritz] } else { e_i };
    let coefficients = sol.params[..n_ritz].to_vec();
    let residuals: Vec<Residual> = data
        .iter()
        .map(|r| {
            let fitted = model_energy(&sol.params, r.n as f64);
            Residual { n: r.n, energy_cm1: r.energy_cm1, fitted_cm1: fitted, residual_mhz: (r.energy_cm1 - fitted) * MHZ_PER_CM1 }
        })
        .collect();
    let rms = (residuals.iter().map(|r| r.residual_mhz * r.residual_mhz).sum::<f64>() / residuals.len() as f64).sqrt();
    Ok(RitzModel {
        coefficients,
        uncertainties: unc[..n_ritz].to_vec(),
        covariance: (0..cov.nrows()).map(|i| (0..cov.ncols()).map(|j| cov[(i, j)]).collect()).collect(),
        range: options.range,
        ionization_energy_cm1: fitted_ei,
        ionization_energy_sigma_cm1: free.then(|| unc[n_ritz]),
        rydberg_constant_cm1: ry,
        residuals,
        rms_mhz: rms,
        chi2: sol.chi2,
        degrees_of_freedom: data.len() - sol.params.len(),
    })
}

/// Joint fit of E_I and a constant defect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdFit {
    pub ionization_energy_cm1: f64,
    pub ionization_energy_sigma_cm1: f64,
    pub delta: f64,
    pub delta_sigma: f64,
    pub range: (u32, u32),
    pub residuals: Vec<Residual>,
    pub rms_mhz: f64,
    pub chi2: f64,
}

impl ThresholdFit {
    pub fn ionization_energy_sigma_mhz(&self) -> f64 {
        self.ionization_energy_sigma_cm1 * MHZ_PER_CM1
    }
}

/// Fit E = E_I − Ry/(n − δ)² with both E_I and δ free over an inclusive window.
pub fn fit_threshold(records: &[EnergyRecord], range: (u32, u32), rydberg_constant_cm1: f64) -> Result<ThresholdFit> {
    let data = select(records, range);
    if data.len() < 3 {
        return Err(Error::InsufficientData(format!("{} levels in n = {}..={}", data.len(), range.0, range.1)));
    }
    let ry = rydberg_constant_cm1;
    let ns: Vec<f64> = data.iter().map(|r| r.n as f64).collect();
    let es: Vec<f64> = data.iter().map(|r| r.energy_cm1).collect();
    let sig: Vec<f64> = data.iter().map(|r| r.sigma_mhz / MHZ_PER_CM1).collect();
    let w: Vec<f64> = sig.iter().map(|s| 1.0 / (s * s)).collect();
    let sw: f64 = w.iter().sum();

    // For fixed δ the best E_I is a weighted mean; scan δ for the start.
    let profile = |d: f64| {
        let ei = ns.iter().zip(&es).zip(&w).map(|((n, e), w)| w * (e + ry / ((n - d) * (n - d)))).sum::<f64>() / sw;
        let cost = ns
            .iter()
            .zip(&es)
            .zip(&w)
            .map(|((n, e), w)| {
                let r = ei - ry / ((n - d) * (n - d)) - e;
                w * r * r
            })
            .sum::<f64>();
        (ei, cost)
    };
    let n_min = ns.iter().cloned().fold(f64::INFINITY, f64::min);
    let upper = (n_min - 1.0).max(0.5);
    let steps = 20_000;
    let mut best = (0.0, f64::INFINITY);
    for i in 0..=steps {
        let d = upper * i as f64 / steps as f64;
        let (_, c) = profile(d);
        if c < best.1 {
            best = (d, c);
        }
    }
    let (ei0, _) = profile(best.0);
    let model = |p: &[f64]| -> Result<(Vec<f64>, DMatrix<f64>)> {
        let mut r = Vec::with_capacity(ns.len());
        let mut jac = DMatrix::zeros(ns.len(), 2);
        for (i, &n) in ns.iter().enumerate() {
            let n_star = n - p[1];
            r.push((p[0] - ry / (n_star * n_star) - es[i]) / sig[i]);
            jac[(i, 0)] = 1.0 / sig[i];
            jac[(i, 1)] = -2.0 * ry / n_star.powi(3) / sig[i];
        }
        Ok((r, jac))
    };
    let sol = levenberg_marquardt(model, &[ei0, best.0], LmConfig::default())?;
    let unc = sol.uncertainties();
    let residuals: Vec<Residual> = data
        .iter()
        .map(|r| {
            let fitted = energy_from_defect(r.n, sol.params[1], sol.params[0], ry);
            Residual { n: r.n, energy_cm1: r.energy_cm1, fitted_cm1: fitted, residual_mhz: (r.energy_cm1 - fitted) * MHZ_PER_CM1 }
        })
        .collect();
    let rms = (residuals.iter().map(|r| r.residual_mhz * r.residual_mhz).sum::<f64>() / residuals.len() as f64).sqrt();
    Ok(ThresholdFit {
        ionization_energy_cm1: sol.params[0],
        ionization_energy_sigma_cm1: unc[0],
        delta: sol.params[1],
        delta_sigma: unc[1],
        range,
        residuals,
        rms_mhz: rms,
        chi2: sol.chi2,
    })
}

/// A level (n, series) within a pair state.
pub type Level = (u32, Term);

/// Energy mismatch of a dipole-coupled pair channel, in MHz, signed as
/// E(in₁) + E(in₂) − E(out₁) − E(out₂): negative when the outgoing pair lies
/// above the incoming one.
pub fn forster_defect(species: &AtomicSpecies, pair_in: [Level; 2], pair_out: [Level; 2]) -> Result<f64> {
    let level = |(n, term): Level| -> Result<f64> {
        let model = species.defect_model(&term)?;
        Ok(energy_of(model, n, species.ionization_energy_cm1, species.rydberg_constant_cm1))
    };
    // Differences of binding energies avoid cancelling the large E_I.
    let binding = |lv: Level| -> Result<f64> { Ok(level(lv)? - species.ionization_energy_cm1) };
    let e_in = binding(pair_in[0])? + binding(pair_in[1])?;
    let e_out = binding(pair_out[0])? + binding(pair_out[1])?;
    Ok((e_in - e_out) * MHZ_PER_CM1)
}
