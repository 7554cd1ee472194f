//! C ABI over `rydtrap`.
//!
//! Every fallible function returns a [`RydtrapStatus`]; on failure a message
//! is available from [`rydtrap_last_error_message`] on the same thread.
//! Handles are opaque and must be released with their `_free` function.
//! Half-integer angular momenta are passed as twice their value.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, c_uint, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use num_traits::ToPrimitive;

use rydtrap::angular::{self, HalfInt, Term};
use rydtrap::beam::TweezerBeam;
use rydtrap::coherence::{self, ContrastCurve, DephasingScenario};
use rydtrap::loss::{self, LifetimeRecord};
use rydtrap::potential::TrapCalculator;
use rydtrap::species::AtomicSpecies;
use rydtrap::spectroscopy::{self, RitzFitOptions, RitzModel};
use rydtrap::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RydtrapStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad quantum numbers, term symbol, unit or parameter value.
    InvalidArgument = 2,
    /// Input data missing, malformed or inconsistent.
    Data = 3,
    Io = 4,
    Nonconvergence = 5,
    /// The caller's buffer is too small; the needed length was written.
    BufferTooSmall = 6,
    /// A Rust panic was caught at the boundary.
    Panic = 7,
}

impl From<&Error> for RydtrapStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidQuantumNumbers(_) | Error::UnsupportedTerm(_) | Error::Truncation { .. } | Error::InvalidParameter(_) => {
                RydtrapStatus::InvalidArgument
            }
            Error::Nonconvergence(_) => RydtrapStatus::Nonconvergence,
            Error::Io(_) => RydtrapStatus::Io,
            _ => RydtrapStatus::Data,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(RydtrapStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(RydtrapStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(RydtrapStatus::NullPointer, format!("{what} is NULL"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(RydtrapStatus::InvalidArgument, msg.into())
}

/// Run `f`, translating errors and panics into a status code.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> RydtrapStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RydtrapStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            RydtrapStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(format!("{what} is not UTF-8")))
}

unsafe fn term_arg(p: *const c_char) -> Result<Term, Failure> {
    Ok(str_arg(p, "term")?.parse::<Term>()?)
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn rydtrap_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rydtrap_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// ---------------------------------------------------------------- angular

/// Wigner 3j symbol; all arguments are twice the angular momentum.
///
/// # Safety
/// `out` must be NULL or point to writable memory.
#[no_mangle]
pub unsafe extern "C" fn rydtrap_wigner_3j(j1: c_int, j2: c_int, j3: c_int, m1: c_int, m2: c_int, m3: c_int, out: *mut f64) -> RydtrapStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if [j1, j2, j3].iter().any(|j| *j < 0) {
            return Err(invalid("angular momenta must be non-negative"));
        }
        let h = HalfInt::from_twice;
        *out = angular::wigner_3j(h(j1), h(j2), h(j3), h(m1), h(m2), h(m3));
        Ok(())
    })
}

/// Wigner 6j symbol; all arguments are twice the angular momentum.
///
/// # Safety
/// `out` must be NULL or point to writable memory.
#[no_mangle]
pub unsafe extern "C" fn rydtrap_wigner_6j(j1: c_int, j2: c_int, j3: c_int, j4: c_int, j5: c_int, j6: c_int, out: *mut f64) -> RydtrapStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if [j1, j2, j3, j4, j5, j6].iter().any(|j| *j < 0) {
            return Err(invalid("angular momenta must be non-negative"));
        }
        let h = HalfInt::from_twice;
        *out = angular::wigner_6j(h(j1), h(j2), h(j3), h(j4), h(j5), h(j6));
        Ok(())
    })
}

/// Exact angular factor of rank `k` for `term` at projection `twice_m / 2`,
/// as numerator / denominator.
///
/// # Safety
/// `term` must be a NUL-terminated string; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn rydtrap_angular_factor(
    term: *const c_char,
    k: c_uint,
    twice_m: c_int,
    numerator: *mut i64,
    denominator: *mut i64,
) -> RydtrapStatus {
    guard(|| {
        let t = term_arg(term)?;
        let num = out_ref(numerator, "numerator")?;
        let den = out_ref(denominator, "denominator")?;
        let r = angular::angular_factor_exact(&t, k, HalfInt::from_twice(twice_m))?;
        let overflow = || Failure(RydtrapStatus::Data, "angular factor does not fit in 64 bits".into());
        *num = r.numer().to_i64().ok_or_else(overflow)?;
        *den = r.denom().to_i64().ok_or_else(overflow)?;
        Ok(())
    })
}

// ---------------------------------------------------------------- potentials

/// Opaque trap calculator: a species preset plus a tweezer beam.
pub struct RydtrapCalculator(TrapCalculator);

/// Depth of one state; absent values are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RydtrapDepth {
    pub n_star: f64,
    /// U(∞) − U(focus), Hz; positive = trapped.
    pub depth_hz: f64,
    pub core_depth_hz: f64,
    pub ponderomotive_depth_hz: f64,
    pub ground_depth_hz: f64,
    pub ratio_to_ground: f64,
}

/// New calculator for `species` ("yb174", "yb174-calc", "rb87") and a
/// Gaussian beam. `efficiency` is the delivered fraction of `power_w`.
///
/// # Safety
/// `species` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rydtrap_calculator_new(
    species: *const c_char,
    wavelength_m: f64,
    waist_m: f64,
    power_w: f64,
    efficiency: f64,
    out: *mut *mut RydtrapCalculator,
) -> RydtrapStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let s = AtomicSpecies::preset(str_arg(species, "species")?)?;
        let beam = TweezerBeam::new(wavelength_m, waist_m, power_w)?.with_efficiency(efficiency)?;
        *out = Box::into_raw(Box::new(RydtrapCalculator(TrapCalculator::new(s, beam))));
        Ok(())
    })
}

/// Release a calculator. NULL is ignored.
///
/// # Safety
/// `calc` must come from [`rydtrap_calculator_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rydtrap_calculator_free(calc: *mut RydtrapCalculator) {
    if !calc.is_null() {
        drop(Box::from_raw(calc));
    }
}

unsafe fn calc_ref<'a>(calc: *const RydtrapCalculator) -> Result<&'a TrapCalculator, Failure> {
    calc.as_ref().map(|c| &c.0).ok_or_else(|| null("calculator"))
}

/// Trap depth of `n term` at projection `twice_m / 2`.
///
/// # Safety
/// Pointers must be valid; `term` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn rydtrap_trap_depth(
    calc: *const RydtrapCalculator,
    n: c_uint,
    term: *const c_char,
    twice_m: c_int,
    out: *mut RydtrapDepth,
) -> RydtrapStatus {
    guard(|| {
        let c = calc_ref(calc)?;
        let t = term_arg(term)?;
        let out = out_ref(out, "out")?;
        let d = c.trap_depth(&c.state(n, t, HalfInt::from_twice(twice_m))?)?;
        *out = RydtrapDepth {
            n_star: d.n_star,
            depth_hz: d.depth_hz,
            core_depth_hz: d.core_depth_hz,
            ponderomotive_depth_hz: d.ponderomotive_depth_hz,
            ground_depth_hz: d.ground_depth_hz.unwrap_or(f64::NAN),
            ratio_to_ground: d.ratio_to_ground.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// M-resolved tensor shifts (Hz, relative to the M average) for M = −J … J.
/// `len` receives 2J+1; if `capacity` is smaller, nothing else is written
/// and `RYDTRAP_STATUS_BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `shifts_hz` must have room for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn rydtrap_tensor_splitting(
    calc: *const RydtrapCalculator,
    n: c_uint,
    term: *const c_char,
    shifts_hz: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> RydtrapStatus {
    guard(|| {
        let c = calc_ref(calc)?;
        let t = term_arg(term)?;
        let len = out_ref(len, "len")?;
        let needed = (t.j.twice() + 1) as usize;
        *len = needed;
        if capacity < needed {
            return Err(Failure(RydtrapStatus::BufferTooSmall, format!("need room for {needed} shifts")));
        }
        let shifts = c.tensor_splitting(n, t)?;
        let out = slice_mut(shifts_hz, needed, "shifts_hz")?;
        for (o, v) in out.iter_mut().zip(shifts.values()) {
            *o = *v;
        }
        Ok(())
    })
}

/// U(a) − U(b) at the focus, Hz. Independent of the core polarizability.
///
/// # Safety
/// Pointers must be valid; terms NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn rydtrap_differential_shift(
    calc: *const RydtrapCalculator,
    n_a: c_uint,
    term_a: *const c_char,
    twice_m_a: c_int,
    n_b: c_uint,
    term_b: *const c_char,
    twice_m_b: c_int,
    out_hz: *mut f64,
) -> RydtrapStatus {
    guard(|| {
        let c = calc_ref(calc)?;
        let a = c.state(n_a, term_arg(term_a)?, HalfInt::from_twice(twice_m_a))?;
        let b = c.state(n_b, term_arg(term_b)?, HalfInt::from_twice(twice_m_b))?;
        *out_ref(out_hz, "out_hz")? = c.differential_shift(&a, &b)?;
        Ok(())
    })
}

// ---------------------------------------------------------------- spectroscopy

/// Opaque fitted Rydberg–Ritz model.
pub struct RydtrapRitzModel(RitzModel);

unsafe fn ritz_common(
    records: Vec<spectroscopy::EnergyRecord>,
    order: c_uint,
    n_min: c_uint,
    n_max: c_uint,
    out: *mut *mut RydtrapRitzModel,
) -> Result<(), Failure> {
    let out = out_ref(out, "out")?;
    let species = AtomicSpecies::yb174();
    let opts = RitzFitOptions::for_species(&species, order as usize, (n_min, n_max));
    let model = spectroscopy::fit_ritz(&records, opts)?;
    *out = Box::into_raw(Box::new(RydtrapRitzModel(model)));
    Ok(())
}

/// Fit the bundled ¹⁷⁴Yb ³S₁ energies over the inclusive window [n_min, n_max].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rydtrap_ritz_fit_bundled(order: c_uint, n_min: c_uint, n_max: c_uint, out: *mut *mut RydtrapRitzModel) -> RydtrapStatus {
    guard(|| ritz_common(spectroscopy::bundled_yb174_3s1(), order, n_min, n_max, out))
}

/// Fit energies from a CSV file (`n,energy_cm1[,sigma_mhz]`) using the
/// ¹⁷⁴Yb threshold and Rydberg constant.
///
/// # Safety
/// `path` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rydtrap_ritz_fit_csv(
    path: *const c_char,
    order: c_uint,
    n_min: c_uint,
    n_max: c_uint,
    out: *mut *mut RydtrapRitzModel,
) -> RydtrapStatus {
    guard(|| {
        let records = spectroscopy::load_energies(Path::new(str_arg(path, "path")?))?;
        ritz_common(records, order, n_min, n_max, out)
    })
}

/// Release a model. NULL is ignored.
///
/// # Safety
/// `model` must come from a `rydtrap_ritz_fit_*` call and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rydtrap_ritz_free(model: *mut RydtrapRitzModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// δ₀, δ₂, … and their 1σ uncertainties. Same buffer protocol as
/// [`rydtrap_tensor_splitting`].
///
/// # Safety
/// `values` and `sigmas` must each hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn rydtrap_ritz_coefficients(
    model: *const RydtrapRitzModel,
    values: *mut f64,
    sigmas: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> RydtrapStatus {
    guard(|| {
        let m = &model.as_ref().ok_or_else(|| null("model"))?.0;
        let len = out_ref(len, "len")?;
        let needed = m.coefficients.len();
        *len = needed;
        if capacity < needed {
            return Err(Failure(RydtrapStatus::BufferTooSmall, format!("need room for {needed} coefficients")));
        }
        slice_mut(values, needed, "values")?.copy_from_slice(&m.coefficients);
        slice_mut(sigmas, needed, "sigmas")?.copy_from_slice(&m.uncertainties);
        Ok(())
    })
}

/// RMS residual of the fit, MHz.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rydtrap_ritz_rms_mhz(model: *const RydtrapRitzModel, out: *mut f64) -> RydtrapStatus {
    guard(|| {
        let m = &model.as_ref().ok_or_else(|| null("model"))?.0;
        *out_ref(out, "out")? = m.rms_mhz;
        Ok(())
    })
}

/// Model energy of level `n`, cm⁻¹.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rydtrap_ritz_energy_cm1(model: *const RydtrapRitzModel, n: c_uint, out: *mut f64) -> RydtrapStatus {
    guard(|| {
        let m = &model.as_ref().ok_or_else(|| null("model"))?.0;
        *out_ref(out, "out")? = m.energy(n);
        Ok(())
    })
}

// ---------------------------------------------------------------- losses

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RydtrapPhotoionization {
    pub gamma0_per_s: f64,
    pub gamma0_sigma_per_s: f64,
    pub gamma_pi_per_s_per_w: f64,
    pub gamma_pi_sigma_per_s_per_w: f64,
    pub cross_section_m2: f64,
    pub cross_section_sigma_m2: f64,
}

/// Weighted fit of Γ = Γ₀ + γ_PI·P to `len` lifetime measurements. A
/// non-positive sigma selects the default 6% relative uncertainty.
///
/// # Safety
/// The three arrays must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rydtrap_photoionization_fit(
    power_w: *const f64,
    lifetime_s: *const f64,
    sigma_s: *const f64,
    len: usize,
    wavelength_m: f64,
    waist_m: f64,
    thermal_factor: f64,
    out: *mut RydtrapPhotoionization,
) -> RydtrapStatus {
    guard(|| {
        let p = slice(power_w, len, "power_w")?;
        let tau = slice(lifetime_s, len, "lifetime_s")?;
        let sig = slice(sigma_s, len, "sigma_s")?;
        let out = out_ref(out, "out")?;
        let records = p
            .iter()
            .zip(tau)
            .zip(sig)
            .map(|((&p, &t), &s)| LifetimeRecord::new(p, t, if s > 0.0 { s } else { loss::DEFAULT_RELATIVE_SIGMA * t }))
            .collect::<Result<Vec<_>, _>>()?;
        let beam = TweezerBeam::new(wavelength_m, waist_m, 0.0)?;
        let fit = loss::fit_photoionization(&records, &beam, thermal_factor)?;
        *out = RydtrapPhotoionization {
            gamma0_per_s: fit.gamma0,
            gamma0_sigma_per_s: fit.gamma0_sigma,
            gamma_pi_per_s_per_w: fit.gamma_pi,
            gamma_pi_sigma_per_s_per_w: fit.gamma_pi_sigma,
            cross_section_m2: fit.cross_section_m2,
            cross_section_sigma_m2: fit.cross_section_sigma_m2,
        };
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RydtrapAutoionization {
    pub n_star: f64,
    pub core_depth_hz: f64,
    pub rate_per_s: f64,
    /// rate·n*³
    pub scaled_rate_per_s: f64,
    /// Infinite when the rate vanishes.
    pub lifetime_s: f64,
}

/// Isolated-core autoionization estimate for `n term` in the calculator's beam.
///
/// # Safety
/// Pointers must be valid; `term` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn rydtrap_autoionization(
    calc: *const RydtrapCalculator,
    n: c_uint,
    term: *const c_char,
    out: *mut RydtrapAutoionization,
) -> RydtrapStatus {
    guard(|| {
        let c = calc_ref(calc)?;
        let t = term_arg(term)?;
        let out = out_ref(out, "out")?;
        let state = c.state(n, t, t.lowest_projection())?;
        let e = loss::autoionization_rate(&state, &c.species, &c.beam)?;
        *out = RydtrapAutoionization {
            n_star: e.n_star,
            core_depth_hz: e.core_depth_hz,
            rate_per_s: e.rate_s,
            scaled_rate_per_s: e.scaled_rate_s,
            lifetime_s: e.lifetime_s.unwrap_or(f64::INFINITY),
        };
        Ok(())
    })
}

// ---------------------------------------------------------------- coherence

/// Thermal dephasing scenario. Use an infinite `t1_s` for no population decay.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RydtrapDephasing {
    pub differential_shift_hz: f64,
    pub temperature_k: f64,
    pub depth_hz: f64,
    /// Depth of the trap the atoms were cooled in.
    pub loading_depth_hz: f64,
    /// Radial, radial, axial.
    pub trap_frequencies_hz: [f64; 3],
    pub t1_s: f64,
    pub ensemble_size: usize,
    pub seed: u64,
}

unsafe fn contrast(
    scenario: *const RydtrapDephasing,
    times_s: *const f64,
    len: usize,
    contrast_out: *mut f64,
    decay_time_s: *mut f64,
    echo: bool,
) -> Result<(), Failure> {
    let s = scenario.as_ref().ok_or_else(|| null("scenario"))?;
    let times = slice(times_s, len, "times_s")?;
    let sc = DephasingScenario::new(s.differential_shift_hz, s.temperature_k, s.depth_hz)
        .with_loading_depth(s.loading_depth_hz)
        .with_trap_frequencies(s.trap_frequencies_hz)
        .with_t1(s.t1_s)
        .with_ensemble(s.ensemble_size, s.seed);
    let curve: ContrastCurve = if echo { coherence::echo_contrast(&sc, times)? } else { coherence::ramsey_contrast(&sc, times)? };
    slice_mut(contrast_out, len, "contrast_out")?.copy_from_slice(&curve.contrast);
    if let Some(d) = decay_time_s.as_mut() {
        *d = curve.decay_time_s.unwrap_or(f64::NAN);
    }
    Ok(())
}

/// Ramsey contrast at `len` times. `decay_time_s` (may be NULL) receives the
/// 1/e time, or NaN if the curve stays above 1/e.
///
/// # Safety
/// `times_s` and `contrast_out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rydtrap_ramsey_contrast(
    scenario: *const RydtrapDephasing,
    times_s: *const f64,
    len: usize,
    contrast_out: *mut f64,
    decay_time_s: *mut f64,
) -> RydtrapStatus {
    guard(|| contrast(scenario, times_s, len, contrast_out, decay_time_s, false))
}

/// Spin-echo contrast; total sequence time t with the π pulse at t/2.
///
/// # Safety
/// As for [`rydtrap_ramsey_contrast`].
#[no_mangle]
pub unsafe extern "C" fn rydtrap_echo_contrast(
    scenario: *const RydtrapDephasing,
    times_s: *const f64,
    len: usize,
    contrast_out: *mut f64,
    decay_time_s: *mut f64,
) -> RydtrapStatus {
    guard(|| contrast(scenario, times_s, len, contrast_out, decay_time_s, true))
}
