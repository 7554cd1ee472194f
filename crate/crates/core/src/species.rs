//! Atomic species presets: polarizabilities, Rydberg constants, ionization
//! energies and quantum-defect models.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::angular::Term;
use crate::error::{Error, Result};

/// Quantum defect of one series as a function of n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DefectModel {
    Constant { delta: f64 },
    /// δ(n) = δ₀ + δ₂/(n−δ₀)² + δ₄/(n−δ₀)⁴ + …, coefficients in that order.
    Ritz { coefficients: Vec<f64> },
}

impl DefectModel {
    pub fn delta(&self, n: f64) -> f64 {
        match self {
            DefectModel::Constant { delta } => *delta,
            DefectModel::Ritz { coefficients } => ritz_delta(coefficients, n),
        }
    }
}

/// Extended Rydberg–Ritz defect with the first coefficient inside the denominators.
pub fn ritz_delta(coefficients: &[f64], n: f64) -> f64 {
    let Some(&d0) = coefficients.first() else {
        return 0.0;
    };
    let x = 1.0 / ((n - d0) * (n - d0));
    let mut acc = d0;
    let mut pow = x;
    for c in &coefficients[1..] {
        acc += c * pow;
        pow *= x;
    }
    acc
}

/// An ion-core resonance that a trapped Rydberg atom can scatter on,
/// followed by autoionization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoreChannel {
    pub label: String,
    /// Core transition wavelength, m.
    pub wavelength: f64,
    /// Scaled autoionization width γ′, s⁻¹ (the rate is γ′/n*³).
    pub autoionization_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomicSpecies {
    pub name: String,
    pub description: String,
    /// Ion-core dynamic polarizability at the trap wavelength, a.u.
    pub core_polarizability_au: f64,
    /// Ground-state polarizability at the trap wavelength, a.u.
    pub ground_polarizability_au: Option<f64>,
    /// Ratio of the intermediate (imaging) state's polarizability to the ground state's.
    pub intermediate_ratio: Option<f64>,
    /// Mass-corrected Rydberg constant, cm⁻¹.
    pub rydberg_constant_cm1: f64,
    pub ionization_energy_cm1: f64,
    pub mass_amu: f64,
    /// Defect models keyed by term label ("3S1", "2D5/2", ...).
    pub defects: BTreeMap<String, DefectModel>,
    pub core_channels: Vec<CoreChannel>,
}

/// Published extended-Ritz parameters for the ¹⁷⁴Yb 6sns ³S₁ series.
pub const YB174_3S1_RITZ: [f64; 5] = [4.4382, 6.0, -1.8e4, 1.8e7, -7e9];
/// Constant defect of the ¹⁷⁴Yb 6snp ³P₂ series.
pub const YB174_3P2_DELTA: f64 = 3.923;
/// Working value for the 6snp ³P₀ series near n = 74, placing the 74 ³P₀ level
/// about 40 MHz from the midpoint of the 74/75 ³S₁ two-photon transition.
pub const YB174_3P0_DELTA: f64 = 3.955;
/// Yb⁰ ground-state polarizability at 532 nm, a.u., and a lower literature value.
pub const YB_GROUND_POLARIZABILITY: f64 = 275.0;
pub const YB_GROUND_POLARIZABILITY_ALT: f64 = 226.0;

impl AtomicSpecies {
    /// ¹⁷⁴Yb with the fitted core polarizability α_c(532 nm) = 107 a.u.
    pub fn yb174() -> Self {
        let mut defects = BTreeMap::new();
        defects.insert("3S1".into(), DefectModel::Ritz { coefficients: YB174_3S1_RITZ.to_vec() });
        defects.insert("3P2".into(), DefectModel::Constant { delta: YB174_3P2_DELTA });
        defects.insert("3P0".into(), DefectModel::Constant { delta: YB174_3P0_DELTA });
        AtomicSpecies {
            name: "yb174".into(),
            description: "174Yb, 6snl series, Yb+ 6s core; alpha_c fitted to the depth-vs-n crossover".into(),
            core_polarizability_au: 107.0,
            ground_polarizability_au: Some(YB_GROUND_POLARIZABILITY),
            intermediate_ratio: Some(0.39),
            rydberg_constant_cm1: 109_736.969_59,
            ionization_energy_cm1: 50_443.070_74,
            mass_amu: 173.938_862,
            defects,
            core_channels: vec![
                CoreChannel { label: "6s-6p1/2".into(), wavelength: 369e-9, autoionization_width: 1.2e15 },
                CoreChannel { label: "6s-6p3/2".into(), wavelength: 329e-9, autoionization_width: 2.4e15 },
            ],
        }
    }

    /// ¹⁷⁴Yb with the calculated core polarizability 96 a.u.
    pub fn yb174_calc() -> Self {
        AtomicSpecies {
            name: "yb174-calc".into(),
            description: "174Yb with the ab initio Yb+ polarizability alpha_c(532 nm) = 96 a.u.".into(),
            core_polarizability_au: 96.0,
            ..Self::yb174()
        }
    }

    /// ⁸⁷Rb alkali example (Rb⁺ core). No ground-state reference at 532 nm,
    /// where the ground state is anti-trapped.
    pub fn rb87() -> Self {
        let ritz = |d0: f64, d2: f64| DefectModel::Ritz { coefficients: vec![d0, d2] };
        let mut defects = BTreeMap::new();
        defects.insert("2S1/2".into(), ritz(3.131_180_4, 0.1784));
        defects.insert("2P1/2".into(), ritz(2.654_884_9, 0.2900));
        defects.insert("2P3/2".into(), ritz(2.641_673_7, 0.2950));
        defects.insert("2D3/2".into(), ritz(1.348_091_71, -0.602_86));
        defects.insert("2D5/2".into(), ritz(1.346_465_72, -0.596_00));
        AtomicSpecies {
            name: "rb87".into(),
            description: "87Rb alkali example with a Rb+ core".into(),
            core_polarizability_au: 9.1,
            ground_polarizability_au: None,
            intermediate_ratio: None,
            rydberg_constant_cm1: 109_736.605,
            ionization_energy_cm1: 33_690.946_44,
            mass_amu: 86.909_180_5,
            defects,
            core_channels: Vec::new(),
        }
    }

    pub fn presets() -> Vec<AtomicSpecies> {
        vec![Self::yb174(), Self::yb174_calc(), Self::rb87()]
    }

    pub fn preset(name: &str) -> Result<Self> {
        Self::presets()
            .into_iter()
            .find(|s| s.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown species preset `{name}` (yb174, yb174-calc, rb87)")))
    }

    /// Canonical serialization used for provenance hashing.
    pub fn fingerprint(&self) -> String {
        serde_json::to_string(self).expect("species serializes")
    }

    pub fn with_core_polarizability(mut self, alpha_au: f64) -> Self {
        self.core_polarizability_au = alpha_au;
        self
    }

    pub fn with_ground_polarizability(mut self, alpha_au: f64) -> Self {
        self.ground_polarizability_au = Some(alpha_au);
        self
    }

    pub fn with_defect(mut self, term: &Term, model: DefectModel) -> Self {
        self.defects.insert(term.to_string(), model);
        self
    }

    pub fn defect_model(&self, term: &Term) -> Result<&DefectModel> {
        self.defects
            .get(&term.to_string())
            .ok_or_else(|| Error::MissingDefectModel(format!("{term} in {}", self.name)))
    }

    /// δ for principal quantum number n of a series.
    pub fn quantum_defect(&self, term: &Term, n: u32) -> Result<f64> {
        Ok(self.defect_model(term)?.delta(n as f64))
    }

    pub fn mass_kg(&self) -> f64 {
        self.mass_amu * crate::constants::ATOMIC_MASS_UNIT
    }
}
