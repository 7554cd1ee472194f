//! Gaussian tweezer beams and their spherical-tensor decomposition about a
//! nuclear position.
//!
//! The intensity seen by the Rydberg electron at r⃗ relative to the nucleus at
//! R⃗ is expanded as I(R⃗ + r⃗) = Σ_kq f_kq(r; R⃗) C_q^(k)(r̂), with
//! f_kq(r) = √((2k+1)/4π) ∮ I(R⃗ + r⃗) Y_kq(r̂) dΩ evaluated numerically.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angular::{HalfInt, Term, wigner_3j};
use crate::constants::BOHR_RADIUS;
use crate::error::{Error, Result};
use crate::harmonics::{kq_index, real_spherical_harmonics};
use crate::quadrature::GaussLegendre;
use crate::radial::{GridSpec, RadialGrid, hydrogen_radial_at, outer_radius_for};

/// Largest rank the decomposition supports.
pub const MAX_RANK: usize = 12;

pub type Vec3 = [f64; 3];

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Anything that provides a scalar intensity in W/m² at lab positions in metres.
pub trait IntensityField: Sync {
    fn intensity(&self, point: Vec3) -> f64;

    /// Reference intensity used for convergence tolerances.
    fn peak_intensity(&self) -> f64;

    fn wavelength(&self) -> f64;

    /// An axis of rotational symmetry (point on the axis, unit direction), if any.
    fn symmetry_axis(&self) -> Option<(Vec3, Vec3)> {
        None
    }
}

/// Delivered-power fraction at which a 532 nm, w₀ = 650 nm tweezer gives a
/// 12 MHz Yb ground-state depth (α = 275 a.u.) at 9 mW.
pub const OPERATING_POINT_EFFICIENCY: f64 = 0.686_508_783_578_224_3;

/// Paraxial TEM₀₀ tweezer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TweezerBeam {
    /// Vacuum wavelength, m.
    pub wavelength: f64,
    /// 1/e² intensity radius at the focus, m.
    pub waist: f64,
    /// Power incident on the objective, W.
    pub power: f64,
    /// Fraction of `power` that reaches the focus.
    pub efficiency: f64,
    pub focus: Vec3,
    /// Unit propagation direction.
    pub axis: Vec3,
}

impl TweezerBeam {
    pub fn new(wavelength: f64, waist: f64, power: f64) -> Result<Self> {
        if !(wavelength > 0.0) || !wavelength.is_finite() {
            return Err(Error::InvalidParameter(format!("wavelength must be positive, got {wavelength}")));
        }
        if !(waist > 0.0) || !waist.is_finite() {
            return Err(Error::InvalidParameter(format!("waist must be positive, got {waist}")));
        }
        if !(power >= 0.0) || !power.is_finite() {
            return Err(Error::InvalidParameter(format!("power must be non-negative, got {power}")));
        }
        Ok(TweezerBeam { wavelength, waist, power, efficiency: 1.0, focus: [0.0; 3], axis: [0.0, 0.0, 1.0] })
    }

    pub fn with_power(mut self, power: f64) -> Self {
        self.power = power;
        self
    }

    pub fn with_efficiency(mut self, efficiency: f64) -> Result<Self> {
        if !(efficiency > 0.0 && efficiency <= 1.0) {
            return Err(Error::InvalidParameter(format!("efficiency must lie in (0, 1], got {efficiency}")));
        }
        self.efficiency = efficiency;
        Ok(self)
    }

    pub fn with_focus(mut self, focus: Vec3) -> Self {
        self.focus = focus;
        self
    }

    pub fn with_axis(mut self, axis: Vec3) -> Result<Self> {
        let norm = dot(axis, axis).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidParameter("beam axis must be a nonzero vector".into()));
        }
        self.axis = axis.map(|c| c / norm);
        Ok(self)
    }

    pub fn rayleigh_range(&self) -> f64 {
        PI * self.waist * self.waist / self.wavelength
    }

    /// Peak focal intensity per watt of incident power, m⁻².
    pub fn intensity_per_watt(&self) -> f64 {
        2.0 * self.efficiency / (PI * self.waist * self.waist)
    }

    /// I₀ = 2P/(πw₀²) with the delivered power.
    pub fn peak(&self) -> f64 {
        self.power * self.intensity_per_watt()
    }

    /// Whether the paraxial approximation is formally valid (w₀ ≥ λ/π).
    pub fn is_paraxial(&self) -> bool {
        self.waist >= self.wavelength / PI
    }

    /// Warning text for tightly focused beams where the paraxial profile is
    /// only approximate (w₀ below two wavelengths).
    pub fn paraxial_warning(&self) -> Option<String> {
        if !self.is_paraxial() {
            Some(format!(
                "waist {:.0} nm is below lambda/pi; the paraxial Gaussian profile is not valid",
                self.waist * 1e9
            ))
        } else if self.waist < 2.0 * self.wavelength {
            Some(format!(
                "waist {:.0} nm is only {:.2} wavelengths; paraxial profile is approximate",
                self.waist * 1e9,
                self.waist / self.wavelength
            ))
        } else {
            None
        }
    }
}

impl IntensityField for TweezerBeam {
    fn intensity(&self, point: Vec3) -> f64 {
        let d = sub(point, self.focus);
        let z = dot(d, self.axis);
        let rho2 = (dot(d, d) - z * z).max(0.0);
        let zr = self.rayleigh_range();
        let q = 1.0 + (z / zr) * (z / zr);
        self.peak() / q * (-2.0 * rho2 / (self.waist * self.waist * q)).exp()
    }

    fn peak_intensity(&self) -> f64 {
        self.peak()
    }

    fn wavelength(&self) -> f64 {
        self.wavelength
    }

    fn symmetry_axis(&self) -> Option<(Vec3, Vec3)> {
        Some((self.focus, self.axis))
    }
}

/// Spatially constant intensity; mostly useful as a test field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformField {
    pub intensity: f64,
    pub wavelength: f64,
}

impl IntensityField for UniformField {
    fn intensity(&self, _point: Vec3) -> f64 {
        self.intensity
    }

    fn peak_intensity(&self) -> f64 {
        self.intensity
    }

    fn wavelength(&self) -> f64 {
        self.wavelength
    }

    fn symmetry_axis(&self) -> Option<(Vec3, Vec3)> {
        Some(([0.0; 3], [0.0, 0.0, 1.0]))
    }
}

/// Controls for [`decompose_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecomposeOptions {
    /// Maximum allowed change of any profile between successive angular
    /// refinements, relative to the field's peak intensity.
    pub tolerance: f64,
    /// Starting Gauss–Legendre order in cos θ.
    pub initial_order: usize,
    /// Refinement stops with a nonconvergence error past this order.
    pub max_order: usize,
    /// Collapse the φ integral when R lies on a symmetry axis parallel to z.
    pub use_symmetry: bool,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions { tolerance: 1e-9, initial_order: 48, max_order: 768, use_symmetry: true }
    }
}

/// Radial profiles f_kq(r; R) for k ≤ k_max on a shared grid.
#[derive(Debug, Clone)]
pub struct TensorField {
    grid: Arc<RadialGrid>,
    nucleus: Vec3,
    k_max: usize,
    wavelength: f64,
    peak_intensity: f64,
    profiles: Vec<Vec<f64>>,
    /// Gauss–Legendre order at which the angular rule converged.
    pub angular_order: usize,
}

impl TensorField {
    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn grid_arc(&self) -> Arc<RadialGrid> {
        Arc::clone(&self.grid)
    }

    pub fn nucleus(&self) -> Vec3 {
        self.nucleus
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn peak_intensity(&self) -> f64 {
        self.peak_intensity
    }

    /// Profile f_kq sampled on [`TensorField::grid`].
    pub fn profile(&self, k: u32, q: i32) -> Result<&[f64]> {
        let k = k as usize;
        if k > self.k_max {
            return Err(Error::Truncation { k_max: self.k_max as u32, needed: k as u32 });
        }
        if q.unsigned_abs() as usize > k {
            return Err(Error::InvalidQuantumNumbers(format!("|q| = {} exceeds k = {k}", q.abs())));
        }
        Ok(&self.profiles[kq_index(k, q)])
    }

    /// Σ_kq f_kq(r) C_q^(k)(θ, φ): the intensity rebuilt from the expansion,
    /// with r in a₀ interpolated on the grid.
    pub fn reconstruct(&self, r: f64, cos_theta: f64, phi: f64) -> Option<f64> {
        let y = real_spherical_harmonics(self.k_max, cos_theta, phi);
        let mut acc = 0.0;
        for k in 0..=self.k_max {
            let c_norm = (4.0 * PI / (2 * k + 1) as f64).sqrt();
            for q in -(k as i32)..=(k as i32) {
                let idx = kq_index(k, q);
                acc += self.grid.interpolate(&self.profiles[idx], r)? * c_norm * y[idx];
            }
        }
        Some(acc)
    }

    /// Multiply every profile by `factor`.
    pub fn scaled(&self, factor: f64) -> TensorField {
        let mut out = self.clone();
        out.peak_intensity *= factor;
        for p in &mut out.profiles {
            for v in p.iter_mut() {
                *v *= factor;
            }
        }
        out
    }

    pub fn to_bundle(&self) -> TensorFieldBundle {
        let mut profiles = Vec::new();
        for k in 0..=self.k_max {
            for q in -(k as i32)..=(k as i32) {
                profiles.push(ProfileEntry { k: k as u32, q, values: self.profiles[kq_index(k, q)].clone() });
            }
        }
        TensorFieldBundle {
            grid: self.grid.spec(),
            nucleus_m: self.nucleus,
            k_max: self.k_max,
            wavelength_m: self.wavelength,
            peak_intensity_w_m2: self.peak_intensity,
            angular_order: self.angular_order,
            profiles,
        }
    }

    pub fn from_bundle(bundle: TensorFieldBundle) -> Result<Self> {
        let grid = Arc::new(RadialGrid::new(bundle.grid)?);
        let mut profiles = vec![Vec::new(); (bundle.k_max + 1) * (bundle.k_max + 1)];
        for entry in bundle.profiles {
            if entry.k as usize > bundle.k_max || entry.q.unsigned_abs() > entry.k || entry.values.len() != grid.len() {
                return Err(Error::Data(format!("malformed tensor-field profile k={} q={}", entry.k, entry.q)));
            }
            profiles[kq_index(entry.k as usize, entry.q)] = entry.values;
        }
        if profiles.iter().any(|p| p.len() != grid.len()) {
            return Err(Error::Data("tensor-field bundle is missing profiles".into()));
        }
        Ok(TensorField {
            grid,
            nucleus: bundle.nucleus_m,
            k_max: bundle.k_max,
            wavelength: bundle.wavelength_m,
            peak_intensity: bundle.peak_intensity_w_m2,
            profiles,
            angular_order: bundle.angular_order,
        })
    }
}

/// Serializable form of a [`TensorField`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorFieldBundle {
    pub grid: GridSpec,
    pub nucleus_m: Vec3,
    pub k_max: usize,
    pub wavelength_m: f64,
    pub peak_intensity_w_m2: f64,
    pub angular_order: usize,
    pub profiles: Vec<ProfileEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub k: u32,
    pub q: i32,
    pub values: Vec<f64>,
}

fn on_symmetry_axis<F: IntensityField + ?Sized>(field: &F, nucleus: Vec3) -> bool {
    let Some((point, axis)) = field.symmetry_axis() else {
        return false;
    };
    let parallel_to_z = axis[0].abs() < 1e-14 && axis[1].abs() < 1e-14;
    let d = sub(nucleus, point);
    let along = dot(d, axis);
    let perp2 = (dot(d, d) - along * along).max(0.0);
    let scale = dot(d, d).max(1e-24);
    parallel_to_z && perp2 <= 1e-24 * scale
}

/// One angular pass: profiles for every grid point with a given GL order.
fn angular_pass<F: IntensityField + ?Sized>(
    field: &F,
    nucleus: Vec3,
    grid: &RadialGrid,
    k_max: usize,
    order: usize,
    symmetric: bool,
) -> Vec<Vec<f64>> {
    let gl = GaussLegendre::cached(order);
    let n_phi = if symmetric { 1 } else { (2 * order).max(4 * k_max).max(8) };
    let n_kq = (k_max + 1) * (k_max + 1);
    let dphi = 2.0 * PI / n_phi as f64;

    // Direction cosines and weighted harmonics, shared by every radius.
    let mut dirs = Vec::with_capacity(gl.len() * n_phi);
    let mut ytab = Vec::with_capacity(gl.len() * n_phi * n_kq);
    for (&mu, &wmu) in gl.nodes.iter().zip(&gl.weights) {
        let sin_t = (1.0 - mu * mu).max(0.0).sqrt();
        for j in 0..n_phi {
            let phi = dphi * j as f64;
            dirs.push([sin_t * phi.cos(), sin_t * phi.sin(), mu]);
            let w = wmu * if symmetric { 2.0 * PI } else { dphi };
            let y = real_spherical_harmonics(k_max, mu, phi);
            for (idx, v) in y.into_iter().enumerate() {
                let k = (idx as f64).sqrt().floor();
                ytab.push(w * v * ((2.0 * k + 1.0) / (4.0 * PI)).sqrt());
            }
        }
    }

    let per_point: Vec<Vec<f64>> = grid
        .points()
        .par_iter()
        .map(|&r| {
            let r_m = r * BOHR_RADIUS;
            let mut acc = vec![0.0; n_kq];
            for (d, ys) in dirs.iter().zip(ytab.chunks_exact(n_kq)) {
                let p = [nucleus[0] + r_m * d[0], nucleus[1] + r_m * d[1], nucleus[2] + r_m * d[2]];
                let i = field.intensity(p);
                for (a, y) in acc.iter_mut().zip(ys) {
                    *a += i * y;
                }
            }
            if symmetric {
                for k in 0..=k_max {
                    for q in 1..=(k as i32) {
                        acc[kq_index(k, q)] = 0.0;
                        acc[kq_index(k, -q)] = 0.0;
                    }
                }
            }
            acc
        })
        .collect();

    let mut profiles = vec![vec![0.0; grid.len()]; n_kq];
    for (i, acc) in per_point.into_iter().enumerate() {
        for (idx, v) in acc.into_iter().enumerate() {
            profiles[idx][i] = v;
        }
    }
    profiles
}

/// Decompose with default options.
pub fn decompose<F: IntensityField + ?Sized>(field: &F, nucleus: Vec3, grid: Arc<RadialGrid>, k_max: usize) -> Result<TensorField> {
    decompose_with(field, nucleus, grid, k_max, DecomposeOptions::default())
}

/// Tensor decomposition of `field` about `nucleus` (metres) on `grid` (a₀).
///
/// The Gauss–Legendre order in cos θ is doubled until no profile changes by
/// more than `tolerance × I_peak`.
pub fn decompose_with<F: IntensityField + ?Sized>(
    field: &F,
    nucleus: Vec3,
    grid: Arc<RadialGrid>,
    k_max: usize,
    options: DecomposeOptions,
) -> Result<TensorField> {
    if k_max > MAX_RANK {
        return Err(Error::InvalidParameter(format!("k_max = {k_max} exceeds the supported maximum {MAX_RANK}")));
    }
    let symmetric = options.use_symmetry && on_symmetry_axis(field, nucleus);
    let scale = field.peak_intensity().abs().max(f64::MIN_POSITIVE);
    let mut order = options.initial_order.max(2 * k_max + 2);
    let mut previous = angular_pass(field, nucleus, &grid, k_max, order, symmetric);
    loop {
        let next_order = order * 2;
        if next_order > options.max_order {
            return Err(Error::Nonconvergence(format!(
                "angular quadrature did not converge to {:.1e} by order {order}",
                options.tolerance
            )));
        }
        let current = angular_pass(field, nucleus, &grid, k_max, next_order, symmetric);
        let change = previous
            .iter()
            .zip(&current)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0f64, f64::max);
        order = next_order;
        previous = current;
        if change <= options.tolerance * scale {
            break;
        }
        log::debug!("angular order {order}: max profile change {:.3e}", change / scale);
    }
    Ok(TensorField {
        grid,
        nucleus,
        k_max,
        wavelength: field.wavelength(),
        peak_intensity: field.peak_intensity(),
        profiles: previous,
        angular_order: order,
    })
}

/// Angular probability density of the Rydberg electron in |term, M⟩:
/// Σ_{M_L} |⟨L M_L, S M−M_L | J M⟩|² |Y_L^{M_L}(θ)|², independent of φ.
pub fn angular_density(term: &Term, m: HalfInt, cos_theta: f64) -> Result<f64> {
    if m.twice().abs() > term.j.twice() || (term.j.twice() - m.twice()) % 2 != 0 {
        return Err(Error::InvalidQuantumNumbers(format!("M = {m} is not a projection of {term}")));
    }
    let l = term.l as usize;
    let plm = crate::harmonics::normalized_associated_legendre(l, cos_theta);
    let mut density = 0.0;
    for ml in -(l as i32)..=(l as i32) {
        let ms = HalfInt::from_twice(m.twice() - 2 * ml);
        if ms.twice().abs() > term.spin.twice() {
            continue;
        }
        // ⟨j1 m1 j2 m2|J M⟩² = (2J+1) · 3j², the phase drops out.
        let three_j = wigner_3j(HalfInt::int(term.l as i32), term.spin, term.j, HalfInt::int(ml), ms, -m);
        let cg2 = (term.j.twice() + 1) as f64 * three_j * three_j;
        // |Y_l^m|² = P̄_l^|m|(cos θ)² / 2π
        let p = plm[crate::harmonics::lm_index(l, ml.unsigned_abs() as usize)];
        density += cg2 * p * p / (2.0 * PI);
    }
    Ok(density)
}

/// Controls for [`brute_force_average_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BruteForceOptions {
    /// Relative change tolerated when the rule is refined.
    pub tolerance: f64,
    pub radial_panels: usize,
    pub theta_points: usize,
    pub phi_points: usize,
    pub max_refinements: u32,
}

impl Default for BruteForceOptions {
    fn default() -> Self {
        BruteForceOptions { tolerance: 2e-5, radial_panels: 0, theta_points: 48, phi_points: 24, max_refinements: 4 }
    }
}

fn brute_force_pass<F: IntensityField + ?Sized>(
    field: &F,
    n: u32,
    term: &Term,
    m: HalfInt,
    nucleus: Vec3,
    panels: usize,
    n_theta: usize,
    n_phi: usize,
) -> Result<f64> {
    const PANEL_ORDER: usize = 12;
    let r_max = outer_radius_for(n);
    let gl_r = GaussLegendre::cached(PANEL_ORDER);
    let gl_t = GaussLegendre::cached(n_theta);

    // Polar rule in θ itself (not cos θ), with the sin θ Jacobian explicit.
    let mut polar = Vec::with_capacity(n_theta);
    for (&x, &w) in gl_t.nodes.iter().zip(&gl_t.weights) {
        let theta = 0.5 * PI * (x + 1.0);
        let ang = angular_density(term, m, theta.cos())?;
        polar.push((theta, 0.5 * PI * w * theta.sin() * ang));
    }
    let dphi = 2.0 * PI / n_phi as f64;
    let directions: Vec<(Vec3, f64)> = polar
        .iter()
        .flat_map(|&(theta, w)| {
            (0..n_phi).map(move |j| {
                let phi = (j as f64 + 0.5) * dphi;
                ([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()], w * dphi)
            })
        })
        .collect();

    let width = r_max / panels as f64;
    let total: f64 = (0..panels)
        .into_par_iter()
        .map(|p| {
            let a = width * p as f64;
            let mut acc = 0.0;
            for (&x, &w) in gl_r.nodes.iter().zip(&gl_r.weights) {
                let r = a + 0.5 * width * (x + 1.0);
                let rad = hydrogen_radial_at(n, term.l, r);
                let weight = 0.5 * width * w * r * r * rad * rad;
                if weight == 0.0 {
                    continue;
                }
                let r_m = r * BOHR_RADIUS;
                let mut shell = 0.0;
                for (d, wd) in &directions {
                    let point = [nucleus[0] + r_m * d[0], nucleus[1] + r_m * d[1], nucleus[2] + r_m * d[2]];
                    shell += wd * field.intensity(point);
                }
                acc += weight * shell;
            }
            acc
        })
        .sum();
    Ok(total)
}

/// Direct 3D quadrature of ∫ |ψ(r⃗)|² I(R⃗ + r⃗) d³r for the hydrogenic
/// radial function of integer `n` with the angular structure of |term, M⟩.
pub fn brute_force_average<F: IntensityField + ?Sized>(field: &F, n: u32, term: &Term, m: HalfInt, nucleus: Vec3) -> Result<f64> {
    brute_force_average_with(field, n, term, m, nucleus, BruteForceOptions::default())
}

pub fn brute_force_average_with<F: IntensityField + ?Sized>(
    field: &F,
    n: u32,
    term: &Term,
    m: HalfInt,
    nucleus: Vec3,
    options: BruteForceOptions,
) -> Result<f64> {
    if n == 0 || n > 150 || term.l >= n {
        return Err(Error::InvalidQuantumNumbers(format!("n = {n} cannot carry L = {}", term.l)));
    }
    // Roughly two panels per radial node keeps the Gauss rule well resolved.
    let mut panels = if options.radial_panels > 0 { options.radial_panels } else { (2 * n as usize).max(16) };
    let (mut n_theta, mut n_phi) = (options.theta_points, options.phi_points);
    let mut value = brute_force_pass(field, n, term, m, nucleus, panels, n_theta, n_phi)?;
    for _ in 0..options.max_refinements {
        let finer_r = brute_force_pass(field, n, term, m, nucleus, panels * 2, n_theta, n_phi)?;
        let finer_a = brute_force_pass(field, n, term, m, nucleus, panels, n_theta * 2, n_phi * 2)?;
        let scale = value.abs().max(f64::MIN_POSITIVE);
        let dr = (finer_r - value).abs() / scale;
        let da = (finer_a - value).abs() / scale;
        if dr <= options.tolerance && da <= options.tolerance {
            return Ok(finer_r + finer_a - value);
        }
        if dr > options.tolerance {
            panels *= 2;
        }
        if da > options.tolerance {
            n_theta *= 2;
            n_phi *= 2;
        }
        value = brute_force_pass(field, n, term, m, nucleus, panels, n_theta, n_phi)?;
    }
    Err(Error::Nonconvergence(format!(
        "3D intensity average for n = {n} did not settle within {:.1e}",
        options.tolerance
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_beam() -> TweezerBeam {
        TweezerBeam::new(532e-9, 650e-9, 9e-3).unwrap()
    }

    #[test]
    fn peak_intensity_formula() {
        let b = default_beam();
        let i0 = 2.0 * 9e-3 / (PI * 650e-9 * 650e-9);
        assert!((b.intensity([0.0; 3]) / i0 - 1.0).abs() < 1e-14);
        assert!((i0 - 1.356e10).abs() < 0.01e10);
        let at_waist = b.intensity([650e-9, 0.0, 0.0]);
        assert!((at_waist / i0 - (-2.0f64).exp()).abs() < 1e-14);
        let at_zr = b.intensity([0.0, 0.0, b.rayleigh_range()]);
        assert!((at_zr / i0 - 0.5).abs() < 1e-14);
    }

    #[test]
    fn tilted_axis_is_cylindrically_symmetric() {
        let b = default_beam().with_axis([1.0, 1.0, 0.0]).unwrap();
        let along = b.intensity([1e-6 / 2f64.sqrt(), 1e-6 / 2f64.sqrt(), 0.0]);
        let straight = default_beam().intensity([0.0, 0.0, 1e-6]);
        assert!((along - straight).abs() < 1e-6 * straight);
    }

    #[test]
    fn invalid_beams_are_rejected() {
        assert!(TweezerBeam::new(0.0, 1e-6, 1e-3).is_err());
        assert!(TweezerBeam::new(532e-9, -1.0, 1e-3).is_err());
        assert!(TweezerBeam::new(532e-9, 1e-6, -1e-3).is_err());
        assert!(default_beam().with_efficiency(1.5).is_err());
    }

    #[test]
    fn tight_focus_raises_warning() {
        let b = default_beam();
        assert!(b.is_paraxial());
        assert!(b.paraxial_warning().is_some());
        let wide = TweezerBeam::new(532e-9, 5e-6, 1e-3).unwrap();
        assert!(wide.paraxial_warning().is_none());
        let narrow = TweezerBeam::new(532e-9, 100e-9, 1e-3).unwrap();
        assert!(!narrow.is_paraxial());
    }

    #[test]
    fn uniform_field_decomposes_to_monopole() {
        let field = UniformField { intensity: 3.0, wavelength: 532e-9 };
        let grid = Arc::new(RadialGrid::sqrt_spaced(1e-3, 1000.0, 200).unwrap());
        let opts = DecomposeOptions { use_symmetry: false, initial_order: 8, ..Default::default() };
        let tf = decompose_with(&field, [1e-7, 0.0, 0.0], grid, 4, opts).unwrap();
        for v in tf.profile(0, 0).unwrap() {
            assert!((v - 3.0).abs() < 1e-12);
        }
        for k in 1..=4u32 {
            for q in -(k as i32)..=(k as i32) {
                assert!(tf.profile(k, q).unwrap().iter().all(|v| v.abs() < 1e-12));
            }
        }
    }

    #[test]
    fn on_axis_symmetry_shortcut_matches_general_rule() {
        let b = default_beam();
        let grid = Arc::new(RadialGrid::sqrt_spaced(1e-3, 3e4, 300).unwrap());
        let fast = decompose(&b, [0.0, 0.0, 2e-7], Arc::clone(&grid), 4).unwrap();
        let opts = DecomposeOptions { use_symmetry: false, ..Default::default() };
        let slow = decompose_with(&b, [0.0, 0.0, 2e-7], grid, 4, opts).unwrap();
        let i0 = b.peak();
        for k in 0..=4u32 {
            for (a, c) in fast.profile(k, 0).unwrap().iter().zip(slow.profile(k, 0).unwrap()) {
                assert!((a - c).abs() < 1e-10 * i0);
            }
            for q in 1..=(k as i32) {
                assert!(slow.profile(k, q).unwrap().iter().all(|v| v.abs() < 1e-6 * i0));
                assert!(slow.profile(k, -q).unwrap().iter().all(|v| v.abs() < 1e-6 * i0));
            }
        }
    }

    #[test]
    fn small_radius_limit_at_focus() {
        let b = default_beam();
        let grid = Arc::new(RadialGrid::default_for(40));
        let tf = decompose(&b, [0.0; 3], grid, 4).unwrap();
        let i0 = b.peak();
        assert!((tf.profile(0, 0).unwrap()[0] / i0 - 1.0).abs() < 1e-9);
        for k in 1..=4 {
            assert!(tf.profile(k, 0).unwrap()[0].abs() < 1e-9 * i0);
        }
    }

    #[test]
    fn odd_ranks_vanish_at_focus_but_not_off_focus() {
        let b = default_beam();
        let grid = Arc::new(RadialGrid::default_for(80));
        let at = decompose(&b, [0.0; 3], Arc::clone(&grid), 3).unwrap();
        assert!(at.profile(1, 0).unwrap().iter().all(|v| v.abs() < 1e-9 * b.peak()));
        let off = decompose(&b, [0.0, 0.0, 1e-6], grid, 3).unwrap();
        assert!(off.profile(1, 0).unwrap().iter().any(|v| v.abs() > 1e-4 * b.peak()));
    }

    #[test]
    fn rank_request_beyond_k_max_is_truncation() {
        let b = default_beam();
        let grid = Arc::new(RadialGrid::sqrt_spaced(1e-3, 100.0, 20).unwrap());
        let tf = decompose(&b, [0.0; 3], grid, 2).unwrap();
        assert!(matches!(tf.profile(4, 0), Err(Error::Truncation { .. })));
        assert!(decompose(&b, [0.0; 3], Arc::new(RadialGrid::default_for(2)), 13).is_err());
    }

    #[test]
    fn bundle_round_trip() {
        let b = default_beam();
        let grid = Arc::new(RadialGrid::sqrt_spaced(1e-3, 500.0, 40).unwrap());
        let tf = decompose(&b, [0.0; 3], grid, 2).unwrap();
        let json = serde_json::to_string(&tf.to_bundle()).unwrap();
        let back = TensorField::from_bundle(serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back.profile(2, 0).unwrap(), tf.profile(2, 0).unwrap());
        assert_eq!(back.grid(), tf.grid());
    }

    #[test]
    fn angular_density_is_normalized() {
        let gl = GaussLegendre::new(32);
        for label in ["3S1", "3P2", "1D2", "2D5/2", "3D3"] {
            let term: Term = label.parse().unwrap();
            for m in term.projections() {
                let total: f64 = gl
                    .nodes
                    .iter()
                    .zip(&gl.weights)
                    .map(|(&mu, &w)| 2.0 * PI * w * angular_density(&term, m, mu).unwrap())
                    .sum();
                assert!((total - 1.0).abs() < 1e-12, "{label} M={m}: {total}");
            }
        }
    }

    #[test]
    fn brute_force_uniform_and_point_like() {
        let term: Term = "3S1".parse().unwrap();
        let uniform = UniformField { intensity: 2.5, wavelength: 532e-9 };
        let v = brute_force_average(&uniform, 20, &term, HalfInt::ZERO, [0.0; 3]).unwrap();
        assert!((v / 2.5 - 1.0).abs() < 1e-6);
        let b = default_beam();
        let t1: Term = "1S0".parse().unwrap();
        let v = brute_force_average(&b, 1, &t1, HalfInt::ZERO, [0.0; 3]).unwrap();
        assert!((v / b.peak() - 1.0).abs() < 1e-3);
    }
}
