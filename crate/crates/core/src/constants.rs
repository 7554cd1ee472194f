//! Physical constants (CODATA 2018) and unit conversions.
//!
//! Every constant used anywhere in the crate lives here; [`table_hash`]
//! fingerprints the table for result provenance.

use sha2::{Digest, Sha256};

pub const PLANCK: f64 = 6.626_070_15e-34;
pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;
pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
pub const HARTREE: f64 = 4.359_744_722_207_1e-18;

/// Atomic unit of polarizability, 4πε₀a₀³, in C²·m²/J.
pub const AU_POLARIZABILITY: f64 = 1.648_777_274_36e-41;

/// MHz per cm⁻¹.
pub const MHZ_PER_CM1: f64 = 29_979.245_8;

/// Energy (J) to frequency (Hz).
#[inline]
pub fn joule_to_hz(e: f64) -> f64 {
    e / PLANCK
}

#[inline]
pub fn cm1_to_mhz(x: f64) -> f64 {
    x * MHZ_PER_CM1
}

#[inline]
pub fn mhz_to_cm1(x: f64) -> f64 {
    x / MHZ_PER_CM1
}

/// Angular frequency of light with vacuum wavelength `lambda` (m).
#[inline]
pub fn angular_frequency(lambda: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / lambda
}

/// Light shift per unit intensity, in Hz per (W/m²), for a polarizability
/// given in atomic units: U = −α I / (2ε₀c).
#[inline]
pub fn shift_hz_per_intensity(alpha_au: f64) -> f64 {
    -alpha_au * AU_POLARIZABILITY / (2.0 * VACUUM_PERMITTIVITY * SPEED_OF_LIGHT) / PLANCK
}

/// Ponderomotive polarizability −e²/(m_e ω²) in atomic units.
pub fn ponderomotive_polarizability_au(lambda: f64) -> f64 {
    let omega = angular_frequency(lambda);
    -ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (ELECTRON_MASS * omega * omega) / AU_POLARIZABILITY
}

const TABLE: &[(&str, f64)] = &[
    ("planck", PLANCK),
    ("speed_of_light", SPEED_OF_LIGHT),
    ("elementary_charge", ELEMENTARY_CHARGE),
    ("electron_mass", ELECTRON_MASS),
    ("vacuum_permittivity", VACUUM_PERMITTIVITY),
    ("bohr_radius", BOHR_RADIUS),
    ("boltzmann", BOLTZMANN),
    ("atomic_mass_unit", ATOMIC_MASS_UNIT),
    ("hartree", HARTREE),
    ("au_polarizability", AU_POLARIZABILITY),
    ("mhz_per_cm1", MHZ_PER_CM1),
];

/// Name/value pairs of the constants table, in a fixed order.
pub fn table() -> &'static [(&'static str, f64)] {
    TABLE
}

/// SHA-256 over the constants table and the species presets, hex encoded.
pub fn table_hash() -> String {
    let mut hasher = Sha256::new();
    for (name, value) in TABLE {
        hasher.update(format!("{name}={value:e}\n").as_bytes());
    }
    for species in crate::species::AtomicSpecies::presets() {
        hasher.update(species.fingerprint().as_bytes());
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polarizability_unit_matches_definition() {
        let derived = 4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY * BOHR_RADIUS.powi(3);
        assert!((derived / AU_POLARIZABILITY - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ponderomotive_polarizability_at_532nm() {
        // 1/ω² in atomic units with ω = E_photon / E_h.
        let omega_au = PLANCK * SPEED_OF_LIGHT / 532e-9 / HARTREE;
        let expected = -1.0 / (omega_au * omega_au);
        let got = ponderomotive_polarizability_au(532e-9);
        assert!((got / expected - 1.0).abs() < 1e-8, "{got} vs {expected}");
        assert!((got + 136.3).abs() < 0.1);
    }

    #[test]
    fn ponderomotive_scales_as_wavelength_squared() {
        let a = ponderomotive_polarizability_au(532e-9);
        let b = ponderomotive_polarizability_au(1064e-9);
        assert!((b / a - 4.0).abs() < 1e-12);
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(table_hash(), table_hash());
        assert_eq!(table_hash().len(), 64);
    }
}
