//! Total Rydberg trapping potential: ion-core light shift plus the
//! ponderomotive energy of the Rydberg electron averaged over its orbit.
//!
//! Energies are frequencies (h·Hz). A negative total at the focus is a trap;
//! [`TrapDepth::depth_hz`] reports U(∞) − U(focus), positive when trapping.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angular::{HalfInt, Term, angular_factor};
use crate::beam::{IntensityField, TensorField, TweezerBeam, Vec3, decompose};
use crate::constants::{ponderomotive_polarizability_au, shift_hz_per_intensity};
use crate::error::{Error, Result};
use crate::radial::{EffectiveQuantumNumber, RadialGrid, interpolated_reduced_element};
use crate::species::AtomicSpecies;

/// A Rydberg level |n, term, M⟩ with its effective quantum number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RydbergState {
    pub species: String,
    pub n: u32,
    pub term: Term,
    pub m: HalfInt,
    pub n_star: f64,
}

impl RydbergState {
    /// Uses the species' defect model for the series.
    pub fn new(species: &AtomicSpecies, n: u32, term: Term, m: HalfInt) -> Result<Self> {
        let delta = species.quantum_defect(&term, n)?;
        Self::with_defect(&species.name, n, term, m, delta)
    }

    /// Uses an explicit quantum defect.
    pub fn with_defect(species: &str, n: u32, term: Term, m: HalfInt, delta: f64) -> Result<Self> {
        if m.twice().abs() > term.j.twice() || (term.j.twice() - m.twice()) % 2 != 0 {
            return Err(Error::InvalidQuantumNumbers(format!("M = {m} is not a projection of {term}")));
        }
        let n_star = n as f64 - delta;
        if n_star <= term.l as f64 {
            return Err(Error::InvalidQuantumNumbers(format!(
                "n = {n} with defect {delta} leaves n* = {n_star:.3}, not above L = {}",
                term.l
            )));
        }
        Ok(RydbergState { species: species.to_string(), n, term, m, n_star })
    }

    pub fn effective(&self) -> EffectiveQuantumNumber {
        EffectiveQuantumNumber { n_star: self.n_star }
    }
}

/// Contribution of one multipole rank to the ponderomotive shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankContribution {
    pub k: u32,
    pub angular_factor: f64,
    /// ⟨n* L|f_k0|n* L⟩, W/m².
    pub radial_element_w_m2: f64,
    pub shift_hz: f64,
}

/// Decomposition of the potential at one nuclear position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialBreakdown {
    pub core_hz: f64,
    pub ponderomotive: Vec<RankContribution>,
    pub total_hz: f64,
    /// Ground-state light shift at the same point, if the species provides one.
    pub ground_hz: Option<f64>,
}

impl PotentialBreakdown {
    pub fn ponderomotive_hz(&self) -> f64 {
        self.ponderomotive.iter().map(|c| c.shift_hz).sum()
    }
}

/// Ponderomotive shift per unit intensity, Hz per W/m²: e²/(2ε₀c m_e ω²)/h.
pub fn ponderomotive_coefficient(wavelength: f64) -> f64 {
    shift_hz_per_intensity(ponderomotive_polarizability_au(wavelength))
}

/// U_c = −α_c I(R)/(2ε₀c), in Hz.
pub fn core_shift<F: IntensityField + ?Sized>(species: &AtomicSpecies, field: &F, nucleus: Vec3) -> f64 {
    shift_hz_per_intensity(species.core_polarizability_au) * field.intensity(nucleus)
}

/// Ground-state light shift in Hz.
pub fn ground_shift<F: IntensityField + ?Sized>(species: &AtomicSpecies, field: &F, nucleus: Vec3) -> Result<f64> {
    let alpha = species
        .ground_polarizability_au
        .ok_or_else(|| Error::InvalidParameter(format!("species {} has no ground-state polarizability", species.name)))?;
    Ok(shift_hz_per_intensity(alpha) * field.intensity(nucleus))
}

/// U_r = (e²/2ε₀c m_e ω²) Σ_k A_k(term, M) ⟨n* L|f_k0|n* L⟩.
///
/// Only even ranks k ≤ min(2J, 2L) contribute. If the field was decomposed to
/// a lower rank the call fails unless `allow_truncation` is set.
pub fn ponderomotive_shift(state: &RydbergState, field: &TensorField, allow_truncation: bool) -> Result<Vec<RankContribution>> {
    let needed = (state.term.j.twice() as u32).min(2 * state.term.l);
    let needed = needed - needed % 2;
    if (field.k_max() as u32) < needed && !allow_truncation {
        return Err(Error::Truncation { k_max: field.k_max() as u32, needed });
    }
    let top = needed.min(field.k_max() as u32);
    let coeff = ponderomotive_coefficient(field.wavelength());
    let mut out = Vec::new();
    for k in (0..=top).step_by(2) {
        let a = angular_factor(&state.term, k, state.m)?;
        if a == 0.0 {
            out.push(RankContribution { k, angular_factor: 0.0, radial_element_w_m2: 0.0, shift_hz: 0.0 });
            continue;
        }
        let element = interpolated_reduced_element(state.effective(), state.term.l, k, field)?;
        out.push(RankContribution { k, angular_factor: a, radial_element_w_m2: element, shift_hz: coeff * a * element });
    }
    Ok(out)
}

/// Depth of the potential for one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapDepth {
    pub n: u32,
    pub n_star: f64,
    /// U(∞) − U(focus); positive = trapping.
    pub depth_hz: f64,
    pub core_depth_hz: f64,
    pub ponderomotive_depth_hz: f64,
    pub ground_depth_hz: Option<f64>,
    pub ratio_to_ground: Option<f64>,
}

/// Evaluates potentials for one species and beam, caching tensor fields per
/// nuclear position.
pub struct TrapCalculator {
    pub species: AtomicSpecies,
    pub beam: TweezerBeam,
    grid: Arc<RadialGrid>,
    k_max: usize,
    fields: Mutex<HashMap<[u64; 3], Arc<TensorField>>>,
}

/// Principal quantum number the default calculator grid accommodates.
pub const DEFAULT_N_MAX: u32 = 150;

impl TrapCalculator {
    pub fn new(species: AtomicSpecies, beam: TweezerBeam) -> Self {
        Self::with_grid(species, beam, Arc::new(RadialGrid::default_for(DEFAULT_N_MAX)), 4)
    }

    pub fn with_grid(species: AtomicSpecies, beam: TweezerBeam, grid: Arc<RadialGrid>, k_max: usize) -> Self {
        if let Some(w) = beam.paraxial_warning() {
            log::warn!("{w}");
        }
        TrapCalculator { species, beam, grid, k_max, fields: Mutex::new(HashMap::new()) }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Seed the field cache, e.g. from a bundle on disk.
    pub fn insert_field(&self, field: TensorField) {
        let key = field.nucleus().map(f64::to_bits);
        self.fields.lock().expect("field cache poisoned").insert(key, Arc::new(field));
    }

    /// Tensor field about `nucleus`, decomposed on first use.
    pub fn field_at(&self, nucleus: Vec3) -> Result<Arc<TensorField>> {
        let key = nucleus.map(f64::to_bits);
        if let Some(f) = self.fields.lock().expect("field cache poisoned").get(&key) {
            return Ok(Arc::clone(f));
        }
        let field = Arc::new(decompose(&self.beam, nucleus, Arc::clone(&self.grid), self.k_max)?);
        self.fields
            .lock()
            .expect("field cache poisoned")
            .insert(key, Arc::clone(&field));
        Ok(field)
    }

    pub fn state(&self, n: u32, term: Term, m: HalfInt) -> Result<RydbergState> {
        RydbergState::new(&self.species, n, term, m)
    }

    pub fn breakdown_at(&self, state: &RydbergState, nucleus: Vec3) -> Result<PotentialBreakdown> {
        let field = self.field_at(nucleus)?;
        let ponderomotive = ponderomotive_shift(state, &field, false)?;
        let core_hz = core_shift(&self.species, &self.beam, nucleus);
        let total_hz = core_hz + ponderomotive.iter().map(|c| c.shift_hz).sum::<f64>();
        let ground_hz = ground_shift(&self.species, &self.beam, nucleus).ok();
        Ok(PotentialBreakdown { core_hz, ponderomotive, total_hz, ground_hz })
    }

    pub fn breakdown(&self, state: &RydbergState) -> Result<PotentialBreakdown> {
        self.breakdown_at(state, self.beam.focus)
    }

    /// Ground-state depth at the focus (positive for an attractive trap).
    pub fn ground_depth(&self) -> Result<f64> {
        Ok(-ground_shift(&self.species, &self.beam, self.beam.focus)?)
    }

    pub fn trap_depth(&self, state: &RydbergState) -> Result<TrapDepth> {
        let b = self.breakdown(state)?;
        let ground = b.ground_hz.map(|g| -g);
        let depth = -b.total_hz;
        Ok(TrapDepth {
            n: state.n,
            n_star: state.n_star,
            depth_hz: depth,
            core_depth_hz: -b.core_hz,
            ponderomotive_depth_hz: -b.ponderomotive_hz(),
            ground_depth_hz: ground,
            ratio_to_ground: ground.filter(|g| *g != 0.0).map(|g| depth / g),
        })
    }

    /// Depths for every n in `ns` of one series, M = lowest projection.
    pub fn depth_scan(&self, term: Term, ns: &[u32]) -> Result<Vec<TrapDepth>> {
        self.field_at(self.beam.focus)?;
        ns.par_iter()
            .map(|&n| {
                let state = self.state(n, term, term.lowest_projection())?;
                self.trap_depth(&state)
            })
            .collect()
    }

    /// Light shift of every M sublevel relative to the M-averaged shift.
    pub fn tensor_splitting(&self, n: u32, term: Term) -> Result<BTreeMap<HalfInt, f64>> {
        let field = self.field_at(self.beam.focus)?;
        let mut shifts = BTreeMap::new();
        for m in term.projections() {
            let state = self.state(n, term, m)?;
            let total: f64 = ponderomotive_shift(&state, &field, false)?.iter().map(|c| c.shift_hz).sum();
            shifts.insert(m, total);
        }
        let mean = shifts.values().sum::<f64>() / shifts.len() as f64;
        for v in shifts.values_mut() {
            *v -= mean;
        }
        // Symmetrize ±M so rounding in the two evaluations cannot split them.
        let keys: Vec<HalfInt> = shifts.keys().copied().collect();
        for m in keys {
            if m.twice() > 0 {
                let avg = 0.5 * (shifts[&m] + shifts[&(-m)]);
                shifts.insert(m, avg);
                shifts.insert(-m, avg);
            }
        }
        Ok(shifts)
    }

    /// U(a) − U(b) at the focus. The core terms are identical and omitted, so
    /// the result does not depend on α_c at all.
    pub fn differential_shift(&self, a: &RydbergState, b: &RydbergState) -> Result<f64> {
        if a.species != b.species {
            return Err(Error::InvalidParameter(format!("states belong to {} and {}", a.species, b.species)));
        }
        if a == b {
            return Ok(0.0);
        }
        let field = self.field_at(self.beam.focus)?;
        let ua: f64 = ponderomotive_shift(a, &field, false)?.iter().map(|c| c.shift_hz).sum();
        let ub: f64 = ponderomotive_shift(b, &field, false)?.iter().map(|c| c.shift_hz).sum();
        Ok(ua - ub)
    }

    /// Copy of this calculator at a different power, reusing cached fields
    /// (every shift is linear in power).
    pub fn at_power(&self, power: f64) -> TrapCalculator {
        let factor = if self.beam.power > 0.0 { power / self.beam.power } else { 0.0 };
        let beam = self.beam.with_power(power);
        let calc = TrapCalculator {
            species: self.species.clone(),
            beam,
            grid: Arc::clone(&self.grid),
            k_max: self.k_max,
            fields: Mutex::new(HashMap::new()),
        };
        if factor > 0.0 {
            for field in self.fields.lock().expect("field cache poisoned").values() {
                calc.insert_field(field.scaled(factor));
            }
        }
        calc
    }

    /// Power at which `state` has the requested depth.
    pub fn power_for_depth(&self, state: &RydbergState, depth_hz: f64) -> Result<f64> {
        let d = self.trap_depth(state)?.depth_hz;
        if d == 0.0 || self.beam.power == 0.0 || d.signum() != depth_hz.signum() {
            return Err(Error::InvalidParameter(format!(
                "state n={} {} has depth {d:.3e} Hz at {:.3e} W, cannot reach {depth_hz:.3e} Hz",
                state.n, state.term, self.beam.power
            )));
        }
        Ok(self.beam.power * depth_hz / d)
    }
}

/// Delivered-power fraction that makes `beam` produce `ground_depth_hz` for
/// the species' ground state at its nominal power.
pub fn calibrate_efficiency(species: &AtomicSpecies, beam: &TweezerBeam, ground_depth_hz: f64) -> Result<f64> {
    let full = TweezerBeam { efficiency: 1.0, ..*beam };
    let nominal = -ground_shift(species, &full, full.focus)?;
    if !(nominal > 0.0) {
        return Err(Error::InvalidParameter("ground state is not trapped by this beam".into()));
    }
    Ok(ground_depth_hz / nominal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam::UniformField;

    fn beam() -> TweezerBeam {
        TweezerBeam::new(532e-9, 650e-9, 9e-3).unwrap()
    }

    fn calc() -> TrapCalculator {
        TrapCalculator::with_grid(AtomicSpecies::yb174(), beam(), Arc::new(RadialGrid::default_for(110)), 4)
    }

    #[test]
    fn operating_point_efficiency_constant() {
        let e = calibrate_efficiency(&AtomicSpecies::yb174(), &beam(), 12e6).unwrap();
        assert!((e - crate::beam::OPERATING_POINT_EFFICIENCY).abs() < 1e-12);
    }

    fn t(s: &str) -> Term {
        s.parse().unwrap()
    }

    #[test]
    fn core_shift_sign_and_zero_power() {
        let yb = AtomicSpecies::yb174();
        assert!(core_shift(&yb, &beam(), [0.0; 3]) < 0.0);
        assert_eq!(core_shift(&yb, &beam().with_power(0.0), [0.0; 3]), 0.0);
        let calc = AtomicSpecies::yb174_calc();
        let ratio = core_shift(&calc, &beam(), [0.0; 3]) / ground_shift(&calc, &beam(), [0.0; 3]).unwrap();
        assert!((ratio - 96.0 / 275.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_field_gives_free_electron_shift() {
        let field = UniformField { intensity: 1e9, wavelength: 532e-9 };
        let grid = Arc::new(RadialGrid::default_for(80));
        let tf = decompose(&field, [0.0; 3], grid, 4).unwrap();
        let state = RydbergState::with_defect("x", 60, t("1D2"), HalfInt::ZERO, 2.7).unwrap();
        let parts = ponderomotive_shift(&state, &tf, false).unwrap();
        let total: f64 = parts.iter().map(|c| c.shift_hz).sum();
        let expected = ponderomotive_coefficient(532e-9) * 1e9;
        assert!((total / expected - 1.0).abs() < 1e-9);
        assert!(parts[1..].iter().all(|c| c.shift_hz.abs() < 1e-9 * expected));
    }

    #[test]
    fn point_like_limit() {
        let c = TrapCalculator::with_grid(AtomicSpecies::yb174(), beam(), Arc::new(RadialGrid::default_for(12)), 4);
        let s = RydbergState::with_defect("yb174", 5, t("3S1"), HalfInt::ZERO, 0.0).unwrap();
        let b = c.breakdown(&s).unwrap();
        let point = ponderomotive_coefficient(532e-9) * beam().peak();
        assert!((b.ponderomotive_hz() / point - 1.0).abs() < 1e-3);
    }

    #[test]
    fn truncation_is_reported() {
        let c = TrapCalculator::with_grid(AtomicSpecies::yb174(), beam(), Arc::new(RadialGrid::default_for(80)), 2);
        let s = RydbergState::with_defect("yb174", 60, t("1D2"), HalfInt::ZERO, 2.7).unwrap();
        assert!(matches!(c.breakdown(&s), Err(Error::Truncation { needed: 4, .. })));
        let field = c.field_at([0.0; 3]).unwrap();
        assert_eq!(ponderomotive_shift(&s, &field, true).unwrap().len(), 2);
    }

    #[test]
    fn degenerate_n_star_is_rejected() {
        assert!(RydbergState::with_defect("x", 5, t("3D1"), HalfInt::ZERO, 3.5).is_err());
        assert!(RydbergState::with_defect("x", 50, t("3P2"), HalfInt::int(3), 3.9).is_err());
    }

    #[test]
    fn magic_pair_has_identical_angular_structure() {
        let c = calc();
        let s = RydbergState::with_defect("yb174", 75, t("3S1"), HalfInt::int(-1), 4.439).unwrap();
        let p = RydbergState::with_defect("yb174", 75, t("3P0"), HalfInt::ZERO, 4.439).unwrap();
        let bs = c.breakdown(&s).unwrap();
        let bp = c.breakdown(&p).unwrap();
        assert_eq!(bs.ponderomotive.len(), 1);
        assert_eq!(bp.ponderomotive.len(), 1);
        assert_eq!(bs.ponderomotive[0].angular_factor, bp.ponderomotive[0].angular_factor);
        // Same n*: only the l-dependence of the radial element is left.
        let diff = c.differential_shift(&s, &p).unwrap();
        assert!(diff.abs() < 0.01 * bs.ponderomotive_hz().abs());
    }

    #[test]
    fn differential_shift_ignores_core() {
        let a = RydbergState::with_defect("yb174", 75, t("3S1"), HalfInt::ZERO, 4.439).unwrap();
        let b = RydbergState::with_defect("yb174", 74, t("3S1"), HalfInt::ZERO, 4.439).unwrap();
        let c1 = calc();
        let c2 = TrapCalculator::with_grid(
            AtomicSpecies::yb174().with_core_polarizability(10.0),
            beam(),
            Arc::new(RadialGrid::default_for(110)),
            4,
        );
        assert_eq!(c1.differential_shift(&a, &b).unwrap(), c2.differential_shift(&a, &b).unwrap());
        assert_eq!(c1.differential_shift(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn tensor_splitting_pattern() {
        let c = calc();
        let s = c.tensor_splitting(74, t("3P2")).unwrap();
        assert_eq!(s.len(), 5);
        let sum: f64 = s.values().sum();
        assert!(sum.abs() < 1e-9 * s[&HalfInt::int(2)].abs());
        for m in 1..=2 {
            assert_eq!(s[&HalfInt::int(m)], s[&HalfInt::int(-m)]);
        }
        // Pure rank-2: shift ∝ 3M² − J(J+1).
        let unit = s[&HalfInt::int(0)] / -6.0;
        assert!((s[&HalfInt::int(1)] / unit + 3.0).abs() < 1e-9);
        assert!((s[&HalfInt::int(2)] / unit - 6.0).abs() < 1e-9);
        let j0 = c.tensor_splitting(74, t("3P0")).unwrap();
        assert_eq!(j0.values().copied().collect::<Vec<_>>(), vec![0.0]);
    }

    #[test]
    fn efficiency_calibration() {
        let yb = AtomicSpecies::yb174();
        let eff = calibrate_efficiency(&yb, &beam(), 12e6).unwrap();
        let b = beam().with_efficiency(eff).unwrap();
        let d = -ground_shift(&yb, &b, [0.0; 3]).unwrap();
        assert!((d - 12e6).abs() < 1e-6);
    }
}
