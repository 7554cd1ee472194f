//! Trap-induced loss: photoionization rates extracted from lifetime-vs-power
//! data, and isolated-core autoionization estimates.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::beam::TweezerBeam;
use crate::constants::{HBAR, SPEED_OF_LIGHT, angular_frequency};
use crate::error::{Error, Result};
use crate::potential::{RydbergState, core_shift};
use crate::species::AtomicSpecies;

/// Relative lifetime uncertainty assumed when a file gives none.
pub const DEFAULT_RELATIVE_SIGMA: f64 = 0.06;

const SYNTHETIC_74_3P2: &str = include_str!("../data/synthetic_74_3p2_lifetimes.csv");

/// Lifetime measured at one trap power (SI units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LifetimeRecord {
    pub power_w: f64,
    pub lifetime_s: f64,
    pub sigma_s: f64,
}

impl LifetimeRecord {
    pub fn new(power_w: f64, lifetime_s: f64, sigma_s: f64) -> Result<Self> {
        if !(power_w >= 0.0 && power_w.is_finite()) || !(lifetime_s > 0.0 && lifetime_s.is_finite()) || !(sigma_s > 0.0) {
            return Err(Error::Data(format!(
                "invalid lifetime record: P = {power_w} W, tau = {lifetime_s} s, sigma = {sigma_s} s"
            )));
        }
        Ok(LifetimeRecord { power_w, lifetime_s, sigma_s })
    }

    pub fn rate(&self) -> f64 {
        1.0 / self.lifetime_s
    }

    /// σ_Γ = σ_τ / τ².
    pub fn rate_sigma(&self) -> f64 {
        self.sigma_s / (self.lifetime_s * self.lifetime_s)
    }
}

#[derive(Debug, Deserialize)]
struct LifetimeRow {
    power_mw: f64,
    lifetime_us: f64,
    sigma_us: Option<f64>,
}

/// Read `power_mw,lifetime_us[,sigma_us]` CSV; lines starting with `#` are comments.
pub fn read_lifetimes<R: Read>(reader: R) -> Result<Vec<LifetimeRecord>> {
    let mut csv = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut out = Vec::new();
    for row in csv.deserialize::<LifetimeRow>() {
        let row = row?;
        let sigma = row.sigma_us.unwrap_or(DEFAULT_RELATIVE_SIGMA * row.lifetime_us);
        out.push(LifetimeRecord::new(row.power_mw * 1e-3, row.lifetime_us * 1e-6, sigma * 1e-6)?);
    }
    if out.is_empty() {
        return Err(Error::InsufficientData("lifetime file has no records".into()));
    }
    Ok(out)
}

pub fn load_lifetimes(path: &Path) -> Result<Vec<LifetimeRecord>> {
    read_lifetimes(std::fs::File::open(path)?)
}

/// Synthetic 74 ³P₂ lifetime-vs-power set generated from Γ₀ = 1/(83 µs) and a
/// 22 % lifetime reduction at 9 mW. Not measured data.
pub fn synthetic_74_3p2() -> Vec<LifetimeRecord> {
    read_lifetimes(SYNTHETIC_74_3P2.as_bytes()).expect("bundled data parses")
}

pub fn synthetic_74_3p2_csv() -> &'static str {
    SYNTHETIC_74_3P2
}

/// Γ = Γ₀ + γ_PI·P and the derived cross section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotoionizationFit {
    /// Zero-power decay rate, s⁻¹.
    pub gamma0: f64,
    pub gamma0_sigma: f64,
    /// s⁻¹ W⁻¹.
    pub gamma_pi: f64,
    pub gamma_pi_sigma: f64,
    /// cov(Γ₀, γ_PI).
    pub covariance: f64,
    /// m².
    pub cross_section_m2: f64,
    pub cross_section_sigma_m2: f64,
    /// Intensity at the atom per watt used for the conversion, W/m² per W.
    pub intensity_per_watt: f64,
    pub photon_energy_j: f64,
    pub chi2: f64,
    pub degrees_of_freedom: usize,
}

impl PhotoionizationFit {
    /// 1/Γ₀.
    pub fn natural_lifetime(&self) -> f64 {
        1.0 / self.gamma0
    }

    pub fn natural_lifetime_sigma(&self) -> f64 {
        self.gamma0_sigma / (self.gamma0 * self.gamma0)
    }

    pub fn rate_at(&self, power_w: f64) -> f64 {
        self.gamma0 + self.gamma_pi * power_w
    }
}

/// Weighted straight-line fit of Γ = 1/τ against power.
///
/// σ_PI = γ_PI ħω / (I/P). The intensity per watt is the beam's peak value
/// times `thermal_factor` (1 for an atom at the focus; < 1 approximates a
/// thermal average over the trap).
pub fn fit_photoionization(records: &[LifetimeRecord], beam: &TweezerBeam, thermal_factor: f64) -> Result<PhotoionizationFit> {
    if !(thermal_factor > 0.0 && thermal_factor <= 1.0) {
        return Err(Error::InvalidParameter(format!("thermal factor must be in (0, 1], got {thermal_factor}")));
    }
    let mut powers: Vec<f64> = records.iter().map(|r| r.power_w).collect();
    powers.sort_by(f64::total_cmp);
    powers.dedup();
    if powers.len() < 3 {
        return Err(Error::InsufficientData(format!("{} distinct powers; at least 3 are needed", powers.len())));
    }
    let (mut s, mut sx, mut sxx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for r in records {
        let w = 1.0 / r.rate_sigma().powi(2);
        let (x, y) = (r.power_w, r.rate());
        s += w;
        sx += w * x;
        sxx += w * x * x;
        sy += w * y;
        sxy += w * x * y;
    }
    let det = s * sxx - sx * sx;
    if !(det > 1e-12 * s * sxx) {
        return Err(Error::InsufficientData("power values are degenerate".into()));
    }
    let gamma0 = (sxx * sy - sx * sxy) / det;
    let gamma_pi = (s * sxy - sx * sy) / det;
    if !(gamma0 > 0.0) {
        return Err(Error::Data(format!("fitted zero-power decay rate {gamma0:.4e} s^-1 is not positive")));
    }
    let chi2 = records
        .iter()
        .map(|r| ((r.rate() - gamma0 - gamma_pi * r.power_w) / r.rate_sigma()).powi(2))
        .sum();
    let intensity_per_watt = beam.intensity_per_watt() * thermal_factor;
    let photon = HBAR * angular_frequency(beam.wavelength);
    let conv = photon / intensity_per_watt;
    let gamma_pi_sigma = (s / det).sqrt();
    Ok(PhotoionizationFit {
        gamma0,
        gamma0_sigma: (sxx / det).sqrt(),
        gamma_pi,
        gamma_pi_sigma,
        covariance: -sx / det,
        cross_section_m2: gamma_pi * conv,
        cross_section_sigma_m2: gamma_pi_sigma * conv,
        intensity_per_watt,
        photon_energy_j: photon,
        chi2,
        degrees_of_freedom: records.len() - 2,
    })
}

/// Fractional lifetime reduction 1 − Γ₀/(Γ₀ + γ_PI·P).
pub fn trapped_lifetime_reduction(fit: &PhotoionizationFit, power_w: f64) -> f64 {
    1.0 - fit.gamma0 / fit.rate_at(power_w)
}

/// Contribution of one core transition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRate {
    pub label: String,
    /// Core resonance minus trap frequency, Hz.
    pub detuning_hz: f64,
    /// γ′/n*³, s⁻¹.
    pub width_s: f64,
    pub rate_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutoionizationEstimate {
    pub n_star: f64,
    /// |U_c| at the focus, Hz.
    pub core_depth_hz: f64,
    pub channels: Vec<ChannelRate>,
    pub rate_s: f64,
    /// rate·n*³, s⁻¹.
    pub scaled_rate_s: f64,
    /// None when the rate vanishes.
    pub lifetime_s: Option<f64>,
}

/// Isolated-core estimate Σⱼ (γ′ⱼ/n*³)·U₀/Δⱼ, with U₀ the core light shift at
/// the focus and Δⱼ the detuning of core line j from the trap light.
pub fn autoionization_rate(state: &RydbergState, species: &AtomicSpecies, beam: &TweezerBeam) -> Result<AutoionizationEstimate> {
    if species.core_channels.is_empty() {
        return Err(Error::InvalidParameter(format!("species {} has no core transitions", species.name)));
    }
    let u0 = core_shift(species, beam, beam.focus).abs();
    let trap_hz = SPEED_OF_LIGHT / beam.wavelength;
    let n3 = state.n_star.powi(3);
    let mut channels = Vec::with_capacity(species.core_channels.len());
    for ch in &species.core_channels {
        let detuning = SPEED_OF_LIGHT / ch.wavelength - trap_hz;
        if detuning == 0.0 {
            return Err(Error::InvalidParameter(format!("trap light is resonant with core line {}", ch.label)));
        }
        let width = ch.autoionization_width / n3;
        channels.push(ChannelRate {
            label: ch.label.clone(),
            detuning_hz: detuning,
            width_s: width,
            rate_s: width * u0 / detuning.abs(),
        });
    }
    let rate: f64 = channels.iter().map(|c| c.rate_s).sum();
    Ok(AutoionizationEstimate {
        n_star: state.n_star,
        core_depth_hz: u0,
        channels,
        rate_s: rate,
        scaled_rate_s: rate * n3,
        lifetime_s: (rate > 0.0).then(|| 1.0 / rate),
    })
}
