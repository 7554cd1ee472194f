//! Hydrogenic radial wavefunctions, radial grids and radial integrals.
//!
//! Everything here is in atomic units: radii in a₀, R_nl in a₀^(−3/2).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::beam::TensorField;
use crate::error::{Error, Result};
use crate::quadrature::simpson_weights;

/// Default number of radial samples.
pub const DEFAULT_GRID_POINTS: usize = 4000;
/// Default innermost radius in a₀.
pub const DEFAULT_R_MIN: f64 = 1e-3;

/// Spacing of a [`RadialGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridScheme {
    /// Uniform in s = √r: dense near the nucleus, still fine at the outer turning point.
    SquareRoot,
    Uniform,
}

/// Parameters that fully determine a grid; this is what gets serialized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub scheme: GridScheme,
    pub r_min: f64,
    pub r_max: f64,
    pub count: usize,
}

/// Monotone radial grid with precomputed quadrature weights, so that
/// ∫ g(r) dr ≈ Σ wᵢ g(rᵢ).
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    spec: GridSpec,
    points: Vec<f64>,
    weights: Vec<f64>,
}

/// Outer radius that comfortably contains the n-th shell: 2.5 n² a₀ plus a
/// margin of 50 n a₀ for the exponential tail at low n.
pub fn outer_radius_for(n: u32) -> f64 {
    let n = n as f64;
    2.5 * n * n + 50.0 * n
}

impl RadialGrid {
    pub fn new(spec: GridSpec) -> Result<Self> {
        if spec.count < 4 || !(spec.r_min >= 0.0) || !(spec.r_max > spec.r_min) {
            return Err(Error::InvalidParameter(format!("invalid radial grid {spec:?}")));
        }
        let (points, weights) = match spec.scheme {
            GridScheme::SquareRoot => {
                let (s0, s1) = (spec.r_min.sqrt(), spec.r_max.sqrt());
                let h = (s1 - s0) / (spec.count - 1) as f64;
                let sw = simpson_weights(spec.count, h);
                let mut pts = Vec::with_capacity(spec.count);
                let mut wts = Vec::with_capacity(spec.count);
                for (i, w) in sw.into_iter().enumerate() {
                    let s = s0 + h * i as f64;
                    pts.push(s * s);
                    wts.push(w * 2.0 * s);
                }
                (pts, wts)
            }
            GridScheme::Uniform => {
                let h = (spec.r_max - spec.r_min) / (spec.count - 1) as f64;
                let pts = (0..spec.count).map(|i| spec.r_min + h * i as f64).collect();
                (pts, simpson_weights(spec.count, h))
            }
        };
        Ok(RadialGrid { spec, points, weights })
    }

    /// Square-root grid with `count` points on [r_min, r_max].
    pub fn sqrt_spaced(r_min: f64, r_max: f64, count: usize) -> Result<Self> {
        Self::new(GridSpec { scheme: GridScheme::SquareRoot, r_min, r_max, count })
    }

    /// The default grid able to hold every n ≤ `n_max`.
    pub fn default_for(n_max: u32) -> Self {
        Self::sqrt_spaced(DEFAULT_R_MIN, outer_radius_for(n_max.max(1)), DEFAULT_GRID_POINTS)
            .expect("default grid parameters are valid")
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn r_max(&self) -> f64 {
        self.spec.r_max
    }

    /// Largest n whose default support fits on this grid.
    pub fn max_principal(&self) -> u32 {
        let mut n = 1;
        while outer_radius_for(n + 1) <= self.spec.r_max * (1.0 + 1e-12) {
            n += 1;
        }
        n
    }

    /// ∫ g(r) dr over the grid for sampled g.
    pub fn integrate(&self, samples: &[f64]) -> f64 {
        debug_assert_eq!(samples.len(), self.points.len());
        self.weights.iter().zip(samples).map(|(w, g)| w * g).sum()
    }

    /// Cubic interpolation of sampled `values` at radius `r`; constant
    /// continuation below the first point, `None` beyond the last.
    pub fn interpolate(&self, values: &[f64], r: f64) -> Option<f64> {
        let pts = &self.points;
        if r > *pts.last()? * (1.0 + 1e-12) {
            return None;
        }
        if r <= pts[0] {
            return Some(values[0]);
        }
        let i = pts.partition_point(|&p| p < r).clamp(1, pts.len() - 1);
        if pts.len() < 4 {
            let t = (r - pts[i - 1]) / (pts[i] - pts[i - 1]);
            return Some(values[i - 1] + t * (values[i] - values[i - 1]));
        }
        // Cubic Lagrange through the four nearest samples.
        let start = (i - 1).saturating_sub(1).min(pts.len() - 4);
        let xs = &pts[start..start + 4];
        let mut acc = 0.0;
        for a in 0..4 {
            let mut w = 1.0;
            for b in 0..4 {
                if a != b {
                    w *= (r - xs[b]) / (xs[a] - xs[b]);
                }
            }
            acc += w * values[start + a];
        }
        Some(acc)
    }
}

/// Effective principal quantum number n* = n − δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveQuantumNumber {
    pub n_star: f64,
}

impl EffectiveQuantumNumber {
    /// Checks n* > l.
    pub fn new(n_star: f64, l: u32) -> Result<Self> {
        if !n_star.is_finite() || n_star <= l as f64 {
            return Err(Error::InvalidQuantumNumbers(format!("n* = {n_star} must exceed l = {l}")));
        }
        Ok(EffectiveQuantumNumber { n_star })
    }

    pub fn from_defect(n: u32, delta: f64, l: u32) -> Result<Self> {
        Self::new(n as f64 - delta, l)
    }
}

/// R_nl sampled on a grid.
#[derive(Debug, Clone)]
pub struct RadialWavefunction {
    pub n: u32,
    pub l: u32,
    pub samples: Vec<f64>,
    pub grid: Arc<RadialGrid>,
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Normalised hydrogenic R_nl(r) at a single radius.
///
/// The generalised Laguerre polynomial is built by its three-term recurrence
/// with periodic rescaling, and the prefactor is assembled in log space, so
/// nothing overflows at n ≈ 150.
pub fn hydrogen_radial_at(n: u32, l: u32, r: f64) -> f64 {
    let nf = n as f64;
    let rho = 2.0 * r / nf;
    let m = n - l - 1;
    let alpha = (2 * l + 1) as f64;

    let mut scale = 0.0f64;
    let mut prev = 1.0f64;
    let mut cur = 1.0 + alpha - rho;
    if m == 0 {
        cur = 1.0;
    }
    for k in 1..m {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - rho) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        let mag = cur.abs();
        if mag > 1e150 {
            prev /= mag;
            cur /= mag;
            scale += mag.ln();
        }
    }
    if cur == 0.0 {
        return 0.0;
    }
    if l > 0 && rho == 0.0 {
        return 0.0;
    }
    let ln_norm = 0.5 * (3.0 * (2.0 / nf).ln() + ln_factorial(m) - (2.0 * nf).ln() - ln_factorial(n + l));
    let ln_rho_l = if l == 0 { 0.0 } else { l as f64 * rho.ln() };
    let ln_mag = ln_norm - 0.5 * rho + ln_rho_l + cur.abs().ln() + scale;
    cur.signum() * ln_mag.exp()
}

fn check_nl(n: u32, l: u32) -> Result<()> {
    if n == 0 || n > 150 || l >= n {
        return Err(Error::InvalidQuantumNumbers(format!("need 1 ≤ n ≤ 150 and 0 ≤ l < n, got n={n}, l={l}")));
    }
    Ok(())
}

/// Hydrogenic R_nl on `grid`.
pub fn hydrogen_radial(n: u32, l: u32, grid: &Arc<RadialGrid>) -> Result<RadialWavefunction> {
    check_nl(n, l)?;
    let samples = grid.points().iter().map(|&r| hydrogen_radial_at(n, l, r)).collect();
    Ok(RadialWavefunction { n, l, samples, grid: Arc::clone(grid) })
}

impl RadialWavefunction {
    /// Radial probability density r²R² on the grid.
    pub fn density(&self) -> Vec<f64> {
        self.grid
            .points()
            .iter()
            .zip(&self.samples)
            .map(|(r, v)| r * r * v * v)
            .collect()
    }

    /// ∫ r² R² dr.
    pub fn norm(&self) -> f64 {
        self.grid.integrate(&self.density())
    }

    /// ∫ r² R² g(r) dr.
    pub fn expectation<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        let d: Vec<f64> = self.grid.points().iter().zip(self.density()).map(|(&r, d)| d * g(r)).collect();
        self.grid.integrate(&d)
    }

    /// Sign changes of R_nl, ignoring the numerically-zero tail.
    pub fn node_count(&self) -> usize {
        let peak = self.samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let floor = peak * 1e-10;
        let mut last = 0.0f64;
        let mut count = 0;
        for &v in &self.samples {
            if v.abs() < floor {
                continue;
            }
            if last != 0.0 && v.signum() != last.signum() {
                count += 1;
            }
            last = v;
        }
        count
    }

    /// Radius beyond which r²R² has dropped below 10⁻¹⁶ of its maximum.
    pub fn support_radius(&self) -> f64 {
        let d = self.density();
        let peak = d.iter().cloned().fold(0.0f64, f64::max);
        let idx = d.iter().rposition(|&v| v > peak * 1e-16).unwrap_or(0);
        self.grid.points()[idx]
    }
}

/// ⟨r⟩ of the hydrogen state (n, l) in a₀.
pub fn expectation_radius(n: u32, l: u32) -> f64 {
    let (n, l) = (n as f64, l as f64);
    (3.0 * n * n - l * (l + 1.0)) / 2.0
}

/// ∫ r² R_nl(r)² f(r) dr for a profile sampled on `profile_grid`.
///
/// If the grids coincide the samples are used directly; otherwise the profile
/// is linearly interpolated onto the wavefunction grid, which must lie inside
/// the profile's radial range wherever the wavefunction has weight.
pub fn radial_integral(wf: &RadialWavefunction, profile_grid: &RadialGrid, profile: &[f64]) -> Result<f64> {
    if profile.len() != profile_grid.len() {
        return Err(Error::GridMismatch(format!(
            "profile has {} samples for a {}-point grid",
            profile.len(),
            profile_grid.len()
        )));
    }
    let density = wf.density();
    if *wf.grid == *profile_grid {
        let integrand: Vec<f64> = density.iter().zip(profile).map(|(d, f)| d * f).collect();
        return Ok(wf.grid.integrate(&integrand));
    }
    let support = wf.support_radius();
    if support > profile_grid.r_max() {
        return Err(Error::GridMismatch(format!(
            "profile ends at {:.1} a0 but the n={} wavefunction extends to {:.1} a0",
            profile_grid.r_max(),
            wf.n,
            support
        )));
    }
    let integrand: Vec<f64> = wf
        .grid
        .points()
        .iter()
        .zip(&density)
        .map(|(&r, d)| if r > support { 0.0 } else { d * profile_grid.interpolate(profile, r).unwrap_or(0.0) })
        .collect();
    Ok(wf.grid.integrate(&integrand))
}

/// Range of n* that [`interpolated_reduced_element`] accepts for this grid and l.
pub fn bracket_range(grid: &RadialGrid, l: u32) -> (f64, f64) {
    ((l + 2) as f64, (grid.max_principal().min(150) - 2) as f64)
}

/// Four-point Lagrange weights at offset t from node 0 of nodes −1, 0, 1, 2.
pub(crate) fn cubic_weights(t: f64) -> [f64; 4] {
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

/// Integer-n radial integral ⟨n l|f_k0|n l⟩ against a decomposed field.
pub fn integer_reduced_element(n: u32, l: u32, k: u32, field: &TensorField) -> Result<f64> {
    let grid = field.grid_arc();
    let wf = hydrogen_radial(n, l, &grid)?;
    radial_integral(&wf, &grid, field.profile(k, 0)?)
}

/// Effective radial element ⟨n* l‖f_k0‖n* l⟩ by cubic interpolation across
/// the four integer-n values that bracket n*.
pub fn interpolated_reduced_element(n_star: EffectiveQuantumNumber, l: u32, k: u32, field: &TensorField) -> Result<f64> {
    let (lo, hi) = bracket_range(field.grid(), l);
    let x = n_star.n_star;
    if x < lo || x > hi {
        return Err(Error::OutOfBracket { n_star: x, min: lo, max: hi });
    }
    let n0 = x.floor();
    let t = x - n0;
    let n0 = n0 as u32;
    if t == 0.0 {
        return integer_reduced_element(n0, l, k, field);
    }
    let weights = cubic_weights(t);
    let mut acc = 0.0;
    for (offset, w) in weights.iter().enumerate() {
        let n = n0 + offset as u32 - 1;
        acc += w * integer_reduced_element(n, l, k, field)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n_max: u32) -> Arc<RadialGrid> {
        Arc::new(RadialGrid::default_for(n_max))
    }

    #[test]
    fn ground_state_at_origin() {
        assert!((hydrogen_radial_at(1, 0, 0.0) - 2.0).abs() < 1e-14);
        assert!((hydrogen_radial_at(1, 0, 1.0) - 2.0 * (-1.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn closed_form_low_states() {
        // R_20 = (1/√2)(1 − r/2)e^{−r/2}, R_21 = (1/(2√6)) r e^{−r/2}
        for r in [0.0, 0.5, 2.0, 7.0] {
            let r20 = (1.0 / 2f64.sqrt()) * (1.0 - r / 2.0) * (-r / 2.0f64).exp();
            let r21 = r * (-r / 2.0f64).exp() / (2.0 * 6f64.sqrt());
            assert!((hydrogen_radial_at(2, 0, r) - r20).abs() < 1e-14, "{r}");
            assert!((hydrogen_radial_at(2, 1, r) - r21).abs() < 1e-14, "{r}");
        }
    }

    #[test]
    fn normalization_nodes_and_mean_radius() {
        let g = grid(120);
        for n in [1u32, 2, 5, 10, 30, 60, 75, 100, 120] {
            for l in 0..=3.min(n - 1) {
                let wf = hydrogen_radial(n, l, &g).unwrap();
                assert!((wf.norm() - 1.0).abs() < 1e-6, "norm n={n} l={l}: {}", wf.norm());
                assert_eq!(wf.node_count(), (n - l - 1) as usize, "nodes n={n} l={l}");
                let mean = wf.expectation(|r| r);
                let exact = expectation_radius(n, l);
                assert!((mean / exact - 1.0).abs() < 1e-4, "<r> n={n} l={l}: {mean} vs {exact}");
            }
        }
    }

    #[test]
    fn n150_does_not_overflow() {
        let g = grid(150);
        let wf = hydrogen_radial(150, 0, &g).unwrap();
        assert!(wf.samples.iter().all(|v| v.is_finite()));
        assert!((wf.norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn invalid_quantum_numbers() {
        let g = grid(10);
        assert!(hydrogen_radial(3, 3, &g).is_err());
        assert!(hydrogen_radial(0, 0, &g).is_err());
        assert!(hydrogen_radial(151, 0, &g).is_err());
    }

    #[test]
    fn expectation_radius_examples() {
        assert_eq!(expectation_radius(100, 0), 15000.0);
        assert_eq!(expectation_radius(1, 0), 1.5);
        assert_eq!(expectation_radius(75, 1), (3.0 * 75.0 * 75.0 - 2.0) / 2.0);
        let microns = expectation_radius(100, 0) * crate::constants::BOHR_RADIUS * 1e6;
        assert!((microns - 0.79).abs() < 0.01);
    }

    #[test]
    fn radial_integral_of_r_squared() {
        let g = grid(10);
        let wf = hydrogen_radial(1, 0, &g).unwrap();
        let ones = vec![1.0; g.len()];
        assert!((radial_integral(&wf, &g, &ones).unwrap() - 1.0).abs() < 1e-8);
        let r2: Vec<f64> = g.points().iter().map(|r| r * r).collect();
        assert!((radial_integral(&wf, &g, &r2).unwrap() - 3.0).abs() < 1e-8);
    }

    #[test]
    fn radial_integral_on_foreign_grid() {
        let g = grid(10);
        let coarse = RadialGrid::sqrt_spaced(0.0, 2000.0, 3001).unwrap();
        let wf = hydrogen_radial(3, 1, &g).unwrap();
        let prof: Vec<f64> = coarse.points().iter().map(|r| r.sqrt()).collect();
        let direct = wf.expectation(|r| r.sqrt());
        let v = radial_integral(&wf, &coarse, &prof).unwrap();
        assert!((v - direct).abs() < 1e-6 * direct);

        let short = RadialGrid::sqrt_spaced(0.0, 20.0, 101).unwrap();
        let prof = vec![1.0; short.len()];
        assert!(matches!(radial_integral(&wf, &short, &prof), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn cubic_weights_partition_unity() {
        for t in [0.0, 0.25, 0.5, 0.9] {
            let w = cubic_weights(t);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        }
        assert_eq!(cubic_weights(0.0), [0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn effective_quantum_number_rejects_small_values() {
        assert!(EffectiveQuantumNumber::new(1.5, 2).is_err());
        assert!(EffectiveQuantumNumber::from_defect(75, 4.439, 0).is_ok());
    }
}
