//! Small Levenberg–Marquardt solver for weighted least squares.
//!
//! The caller supplies already-weighted residuals rᵢ = (modelᵢ − dataᵢ)/σᵢ and
//! their Jacobian; the parameter covariance is then (JᵀJ)⁻¹.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmConfig {
    pub max_iterations: usize,
    /// Stop when χ² changes by less than this fraction.
    pub ftol: f64,
    /// Stop when every scaled parameter step is below this.
    pub xtol: f64,
    pub initial_lambda: f64,
}

impl Default for LmConfig {
    fn default() -> Self {
        LmConfig { max_iterations: 500, ftol: 1e-14, xtol: 1e-14, initial_lambda: 1e-3 }
    }
}

#[derive(Debug, Clone)]
pub struct LmSolution {
    pub params: Vec<f64>,
    pub residuals: Vec<f64>,
    pub chi2: f64,
    /// (JᵀJ)⁻¹ at the solution.
    pub covariance: DMatrix<f64>,
    pub iterations: usize,
}

impl LmSolution {
    pub fn uncertainties(&self) -> Vec<f64> {
        (0..self.params.len()).map(|i| self.covariance[(i, i)].max(0.0).sqrt()).collect()
    }
}

/// Minimise Σ rᵢ(p)². `model` returns the residual vector and the Jacobian
/// (rows = residuals, columns = parameters).
pub fn levenberg_marquardt<F>(mut model: F, p0: &[f64], config: LmConfig) -> Result<LmSolution>
where
    F: FnMut(&[f64]) -> Result<(Vec<f64>, DMatrix<f64>)>,
{
    let m = p0.len();
    let mut p = DVector::from_column_slice(p0);
    let (r0, j0) = model(p.as_slice())?;
    if r0.len() < m {
        return Err(Error::InsufficientData(format!("{} residuals for {m} parameters", r0.len())));
    }
    let mut r = DVector::from_vec(r0);
    let mut jac = j0;
    let mut chi2 = r.norm_squared();
    let mut lambda = config.initial_lambda;

    for iteration in 0..config.max_iterations {
        let jtj = jac.transpose() * &jac;
        let grad = jac.transpose() * &r;
        let diag: Vec<f64> = (0..m).map(|i| jtj[(i, i)].max(1e-300)).collect();

        let mut accepted = false;
        for _ in 0..60 {
            let mut a = jtj.clone();
            for i in 0..m {
                a[(i, i)] += lambda * diag[i];
            }
            let Some(step) = solve_scaled(&a, &(-&grad)) else {
                lambda *= 10.0;
                continue;
            };
            let trial = &p + &step;
            let Ok((rt, jt)) = model(trial.as_slice()) else {
                lambda *= 10.0;
                continue;
            };
            let rt = DVector::from_vec(rt);
            let chi2_t = rt.norm_squared();
            if chi2_t.is_finite() && chi2_t <= chi2 {
                let rel_change = (chi2 - chi2_t) / chi2.max(f64::MIN_POSITIVE);
                let small_step = (0..m).all(|i| step[i].abs() * diag[i].sqrt() <= config.xtol * (1.0 + chi2.sqrt()));
                p = trial;
                r = rt;
                jac = jt;
                chi2 = chi2_t;
                lambda = (lambda / 10.0).max(1e-15);
                accepted = true;
                if rel_change < config.ftol || small_step {
                    return finish(p, r, jac, chi2, iteration + 1);
                }
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            // No downhill step exists at any damping: a (numerical) minimum.
            return finish(p, r, jac, chi2, iteration + 1);
        }
    }
    Err(Error::Nonconvergence(format!(
        "Levenberg-Marquardt did not converge in {} iterations (chi2 = {chi2:.6e})",
        config.max_iterations
    )))
}

fn finish(p: DVector<f64>, r: DVector<f64>, jac: DMatrix<f64>, chi2: f64, iterations: usize) -> Result<LmSolution> {
    let jtj = jac.transpose() * &jac;
    let covariance = invert_scaled(&jtj)
        .ok_or_else(|| Error::Nonconvergence("normal matrix is singular at the solution".into()))?;
    Ok(LmSolution { params: p.as_slice().to_vec(), residuals: r.as_slice().to_vec(), chi2, covariance, iterations })
}

/// Solve A x = b after symmetric diagonal scaling, which keeps badly scaled
/// parameters (δ₈ ~ 10¹⁰ next to δ₀ ~ 1) well conditioned.
fn solve_scaled(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let n = a.nrows();
    let d: Vec<f64> = (0..n).map(|i| 1.0 / a[(i, i)].abs().max(1e-300).sqrt()).collect();
    let scaled = DMatrix::from_fn(n, n, |i, j| a[(i, j)] * d[i] * d[j]);
    let rhs = DVector::from_fn(n, |i, _| b[i] * d[i]);
    let y = scaled
        .clone()
        .cholesky()
        .map(|c| c.solve(&rhs))
        .or_else(|| scaled.lu().solve(&rhs))?;
    let x = DVector::from_fn(n, |i, _| y[i] * d[i]);
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Inverse of a symmetric positive-definite matrix via scaled Cholesky.
pub fn invert_scaled(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = a.nrows();
    let d: Vec<f64> = (0..n).map(|i| 1.0 / a[(i, i)].abs().max(1e-300).sqrt()).collect();
    let scaled = DMatrix::from_fn(n, n, |i, j| a[(i, j)] * d[i] * d[j]);
    let inv = scaled.cholesky()?.inverse();
    let out = DMatrix::from_fn(n, n, |i, j| inv[(i, j)] * d[i] * d[j]);
    out.iter().all(|v| v.is_finite()).then_some(out)
}

/// Weighted linear least squares: minimise Σ wᵢ (yᵢ − Σⱼ Aᵢⱼ xⱼ)².
/// Returns the solution and the weighted residual sum of squares.
pub fn weighted_linear_fit(design: &DMatrix<f64>, y: &[f64], weights: &[f64]) -> Option<(Vec<f64>, f64)> {
    let (rows, cols) = design.shape();
    let sw: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let a = DMatrix::from_fn(rows, cols, |i, j| design[(i, j)] * sw[i]);
    let b = DVector::from_fn(rows, |i, _| y[i] * sw[i]);
    let ata = a.transpose() * &a;
    let atb = a.transpose() * &b;
    let x = solve_scaled(&ata, &atb)?;
    let resid = &b - &a * &x;
    Some((x.as_slice().to_vec(), resid.norm_squared()))
}
