//! Trapping potentials, state-dependent light shifts, loss rates and coherence
//! estimates for alkaline-earth (and alkali) Rydberg atoms held in focused
//! red-detuned optical tweezers.
//!
//! The ponderomotive energy of the Rydberg electron is obtained by expanding
//! the tweezer intensity in spherical tensors about the nucleus and combining
//! hydrogenic radial integrals with Wigner–Eckart angular factors. The ion
//! core contributes an ordinary dipole light shift.
//!
//! Module map:
//!
//! * [`angular`]: 3j/6j symbols and term-resolved angular factors.
//! * [`radial`]: hydrogenic radial functions, grids and radial integrals.
//! * [`beam`]: Gaussian tweezer intensity and its tensor decomposition.
//! * [`species`]: atomic species presets and quantum-defect models.
//! * [`potential`]: core + ponderomotive potentials, depths and shifts.
//! * [`spectroscopy`]: Rydberg–Ritz fits, thresholds, Förster defects.
//! * [`loss`]: photoionization fits and autoionization estimates.
//! * [`coherence`]: Monte Carlo Ramsey / echo contrast.
//! * [`cli`]: command-line front end.

pub mod angular;
pub mod beam;
pub mod cli;
pub mod coherence;
pub mod constants;
pub mod error;
pub mod harmonics;
pub mod lm;
pub mod loss;
pub mod potential;
pub mod quadrature;
pub mod radial;
pub mod species;
pub mod spectroscopy;

pub use error::{Error, Result};
