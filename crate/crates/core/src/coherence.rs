//! Monte Carlo Ramsey and spin-echo contrast for two Rydberg levels with a
//! differential light shift, dephased by thermal motion in a harmonic trap.
//!
//! Near the focus the differential shift seen by an atom is
//! Δν(x) = Δν₀ (1 − V(x)/U₀) with V the trap potential energy above the
//! bottom, so an orbit with per-axis energies Eᵢ has the averaged shift
//! Δν₀ (1 − Σ Eᵢ / (2U₀)).
//!
//! Atoms thermalize at temperature T in a loading trap of depth U_load and are
//! transferred suddenly into the Rydberg trap of depth U₀: velocities are
//! unchanged and potential energies scale by U₀/U_load.

use std::f64::consts::TAU;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beam::TweezerBeam;
use crate::constants::{BOLTZMANN, PLANCK};
use crate::error::{Error, Result};

/// Atoms per independent random stream.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DephasingScenario {
    /// Differential shift at the trap bottom, Hz (either sign).
    pub differential_shift_hz: f64,
    pub temperature_k: f64,
    /// Depth U₀ of the trap during the sequence, Hz.
    pub depth_hz: f64,
    /// Depth of the trap the atoms thermalized in, Hz.
    pub loading_depth_hz: f64,
    /// Two radial and one axial trap frequency, Hz.
    pub trap_frequencies_hz: [f64; 3],
    /// Population lifetime, s; `f64::INFINITY` for none.
    pub t1_s: f64,
    pub ensemble_size: usize,
    pub seed: u64,
}

impl DephasingScenario {
    /// Thermalized in the same trap, frozen motion, no T₁ decay.
    pub fn new(differential_shift_hz: f64, temperature_k: f64, depth_hz: f64) -> Self {
        DephasingScenario {
            differential_shift_hz,
            temperature_k,
            depth_hz,
            loading_depth_hz: depth_hz,
            trap_frequencies_hz: [0.0; 3],
            t1_s: f64::INFINITY,
            ensemble_size: 100_000,
            seed: 0,
        }
    }

    pub fn with_loading_depth(mut self, depth_hz: f64) -> Self {
        self.loading_depth_hz = depth_hz;
        self
    }

    pub fn with_trap_frequencies(mut self, f: [f64; 3]) -> Self {
        self.trap_frequencies_hz = f;
        self
    }

    /// Harmonic frequencies of a Gaussian tweezer of depth `depth_hz`.
    pub fn with_tweezer(self, beam: &TweezerBeam, mass_kg: f64) -> Self {
        let f = trap_frequencies(self.depth_hz, beam, mass_kg);
        self.with_trap_frequencies(f)
    }

    pub fn with_t1(mut self, t1_s: f64) -> Self {
        self.t1_s = t1_s;
        self
    }

    pub fn with_ensemble(mut self, size: usize, seed: u64) -> Self {
        self.ensemble_size = size;
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(format!("dephasing scenario: {what}")));
        if !self.differential_shift_hz.is_finite() {
            return bad("differential shift must be finite");
        }
        if !(self.temperature_k >= 0.0 && self.temperature_k.is_finite()) {
            return bad("temperature must be >= 0");
        }
        if !(self.depth_hz > 0.0) || !(self.loading_depth_hz > 0.0) {
            return bad("trap depths must be positive");
        }
        if self.trap_frequencies_hz.iter().any(|f| !(*f >= 0.0 && f.is_finite())) {
            return bad("trap frequencies must be finite and >= 0");
        }
        if !(self.t1_s > 0.0) {
            return bad("T1 must be positive");
        }
        if self.ensemble_size == 0 {
            return bad("ensemble size must be >= 1");
        }
        Ok(())
    }

    fn decay(&self, t: f64) -> f64 {
        if self.t1_s.is_infinite() { 1.0 } else { (-t / self.t1_s).exp() }
    }
}

/// Radial, radial, axial harmonic frequencies (Hz) of a Gaussian tweezer of
/// depth `depth_hz`: ω_r = √(4U/(m w₀²)), ω_z = √(2U/(m z_R²)).
pub fn trap_frequencies(depth_hz: f64, beam: &TweezerBeam, mass_kg: f64) -> [f64; 3] {
    let u = depth_hz.abs() * PLANCK;
    let radial = (4.0 * u / (mass_kg * beam.waist * beam.waist)).sqrt() / TAU;
    let zr = beam.rayleigh_range();
    let axial = (2.0 * u / (mass_kg * zr * zr)).sqrt() / TAU;
    [radial, radial, axial]
}

/// One axis of a sampled orbit: energy (Hz) and the phase such that the
/// potential energy is E·cos²(ωt + φ).
#[derive(Debug, Clone, Copy)]
struct Axis {
    energy: f64,
    phase: f64,
}

type Atom = [Axis; 3];

fn sample_chunk(s: &DephasingScenario, chunk: usize, len: usize) -> Vec<Atom> {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    rng.set_stream(chunk as u64);
    // ⟨K⟩ = kT/2 per axis; ⟨V⟩ = kT/2 · U₀/U_load after the transfer.
    let kt = BOLTZMANN * s.temperature_k / PLANCK;
    let sv = (0.5 * kt).sqrt();
    let su = (0.5 * kt * s.depth_hz / s.loading_depth_hz).sqrt();
    (0..len)
        .map(|_| {
            std::array::from_fn(|_| {
                let u: f64 = su * Distribution::<f64>::sample(&StandardNormal, &mut rng);
                let v: f64 = sv * Distribution::<f64>::sample(&StandardNormal, &mut rng);
                Axis { energy: u * u + v * v, phase: (-v).atan2(u) }
            })
        })
        .collect()
}

/// Sum of `f` over the ensemble, chunked so the result does not depend on
/// the thread count.
fn ensemble_sum<T, F>(s: &DephasingScenario, zero: T, f: F) -> T
where
    T: Send + std::ops::Add<Output = T>,
    F: Fn(&[Atom]) -> T + Sync,
{
    let chunks = s.ensemble_size.div_ceil(CHUNK);
    let parts: Vec<T> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK.min(s.ensemble_size - c * CHUNK);
            f(&sample_chunk(s, c, len))
        })
        .collect();
    parts.into_iter().fold(zero, |a, b| a + b)
}

fn orbit_shift(s: &DephasingScenario, atom: &Atom) -> f64 {
    let e: f64 = atom.iter().map(|a| a.energy).sum();
    s.differential_shift_hz * (1.0 - e / (2.0 * s.depth_hz))
}

/// Echo phase φ(0→t/2) − φ(t/2→t). The static part of the shift cancels;
/// what remains comes from the motion-driven oscillation of V(t).
fn echo_phase(s: &DephasingScenario, atom: &Atom, t: f64) -> f64 {
    let half = 0.5 * t;
    let mut d = 0.0;
    for (axis, f) in atom.iter().zip(s.trap_frequencies_hz) {
        if f == 0.0 {
            continue;
        }
        let w = TAU * f;
        let p2 = 2.0 * axis.phase;
        d += axis.energy
            * (2.0 * (2.0 * w * half + p2).sin() - p2.sin() - (4.0 * w * half + p2).sin())
            / (4.0 * w);
    }
    -TAU * s.differential_shift_hz * d / s.depth_hz
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContrastCurve {
    pub times_s: Vec<f64>,
    pub contrast: Vec<f64>,
    /// First 1/e crossing (linear interpolation); None if not reached.
    pub decay_time_s: Option<f64>,
}

impl ContrastCurve {
    fn new(times_s: Vec<f64>, contrast: Vec<f64>) -> Self {
        let decay_time_s = one_over_e(&times_s, &contrast);
        ContrastCurve { times_s, contrast, decay_time_s }
    }
}

fn one_over_e(t: &[f64], c: &[f64]) -> Option<f64> {
    let target = (-1.0f64).exp();
    let i = c.iter().position(|&x| x <= target)?;
    if i == 0 {
        return Some(t[0]);
    }
    let (t0, t1, c0, c1) = (t[i - 1], t[i], c[i - 1], c[i]);
    Some(t0 + (c0 - target) * (t1 - t0) / (c0 - c1))
}

fn phasor_sums<F>(s: &DephasingScenario, times: &[f64], phase: F) -> Vec<f64>
where
    F: Fn(&Atom, f64) -> f64 + Sync,
{
    let m = times.len();
    let sums = ensemble_sum(s, PairVec::zeros(m), |atoms| {
        let mut acc = PairVec::zeros(m);
        for atom in atoms {
            for (j, &t) in times.iter().enumerate() {
                let (sn, cs) = phase(atom, t).sin_cos();
                acc.re[j] += cs;
                acc.im[j] += sn;
            }
        }
        acc
    });
    let n = s.ensemble_size as f64;
    (0..m)
        .map(|j| (sums.re[j].hypot(sums.im[j]) / n).min(1.0) * s.decay(times[j]))
        .collect()
}

/// Accumulator of complex sums per time point.
#[derive(Clone)]
struct PairVec {
    re: Vec<f64>,
    im: Vec<f64>,
}

impl PairVec {
    fn zeros(m: usize) -> Self {
        PairVec { re: vec![0.0; m], im: vec![0.0; m] }
    }
}

impl std::ops::Add for PairVec {
    type Output = PairVec;
    fn add(mut self, o: PairVec) -> PairVec {
        for (a, b) in self.re.iter_mut().zip(o.re) {
            *a += b;
        }
        for (a, b) in self.im.iter_mut().zip(o.im) {
            *a += b;
        }
        self
    }
}

/// Ramsey (π/2 – t – π/2) contrast with orbit-averaged static shifts.
pub fn ramsey_contrast(scenario: &DephasingScenario, times_s: &[f64]) -> Result<ContrastCurve> {
    scenario.validate()?;
    let c = phasor_sums(scenario, times_s, |atom, t| TAU * orbit_shift(scenario, atom) * t);
    Ok(ContrastCurve::new(times_s.to_vec(), c))
}

/// Hahn-echo (π/2 – t/2 – π – t/2 – π/2) contrast at total free time t, with
/// the shift following each atom's harmonic trajectory.
pub fn echo_contrast(scenario: &DephasingScenario, times_s: &[f64]) -> Result<ContrastCurve> {
    scenario.validate()?;
    let c = phasor_sums(scenario, times_s, |atom, t| echo_phase(scenario, atom, t));
    Ok(ContrastCurve::new(times_s.to_vec(), c))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftDistribution {
    pub mean_hz: f64,
    pub std_hz: f64,
    pub samples: usize,
}

/// Mean and spread of the orbit-averaged differential shift over the ensemble.
pub fn thermal_shift_distribution(scenario: &DephasingScenario) -> Result<ShiftDistribution> {
    scenario.validate()?;
    // Accumulate about Δν₀ to avoid cancellation in the variance.
    let sums = ensemble_sum(scenario, Moments::default(), |atoms| {
        let mut m = Moments::default();
        for a in atoms {
            let d = orbit_shift(scenario, a) - scenario.differential_shift_hz;
            m.s1 += d;
            m.s2 += d * d;
        }
        m
    });
    let n = scenario.ensemble_size as f64;
    let mean = sums.s1 / n;
    let var = if scenario.ensemble_size > 1 { ((sums.s2 - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    Ok(ShiftDistribution {
        mean_hz: scenario.differential_shift_hz + mean,
        std_hz: var.sqrt(),
        samples: scenario.ensemble_size,
    })
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    s1: f64,
    s2: f64,
}

impl std::ops::Add for Moments {
    type Output = Moments;
    fn add(self, o: Moments) -> Moments {
        Moments { s1: self.s1 + o.s1, s2: self.s2 + o.s2 }
    }
}

/// Evenly spaced times `start, start+step, … ≤ stop`.
pub fn time_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::InvalidParameter(format!("invalid time grid {start}:{stop}:{step}")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + step * i as f64).collect())
}
