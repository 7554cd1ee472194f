//! `rydtrap` command line: argument grammar, dispatch and serialization.

mod output;
pub mod units;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{Value, json};
use sha2::{Digest, Sha256};

pub use output::{Provenance, ResultEnvelope, Table};
use output::{cell, num, write_text};

use crate::angular::{HalfInt, Term, angular_table, angular_table_csv};
use crate::beam::{BruteForceOptions, OPERATING_POINT_EFFICIENCY, TensorField, TensorFieldBundle, TweezerBeam, brute_force_average_with};
use crate::coherence::{ContrastCurve, DephasingScenario, echo_contrast, ramsey_contrast, thermal_shift_distribution, trap_frequencies};
use crate::constants::MHZ_PER_CM1;
use crate::error::{Error, Result};
use crate::loss::{autoionization_rate, fit_photoionization, load_lifetimes, synthetic_74_3p2, trapped_lifetime_reduction};
use crate::potential::{RydbergState, TrapCalculator, calibrate_efficiency, ponderomotive_shift};
use crate::radial::{RadialGrid, hydrogen_radial};
use crate::species::{AtomicSpecies, DefectModel};
use crate::spectroscopy::{
    EnergyRecord, RitzFitOptions, bundled_yb174_3s1, fit_ritz, fit_threshold, forster_defect, load_energies,
};

/// Environment variable naming the tensor-field cache directory.
pub const CACHE_ENV: &str = "RYDTRAP_CACHE_DIR";

#[derive(Debug, Parser)]
#[command(name = "rydtrap", version, about = "Rydberg-atom trapping potentials, light shifts, losses and coherence in optical tweezers")]
pub struct Cli {
    /// Output format [default: csv for tabular commands, json otherwise]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads [default: available parallelism]
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact angular factors for k = 0, 2, 4 of the tabulated terms.
    AngularTable,
    /// Trap depth at the focus for one level or an n range of a series.
    TrapDepth(TrapDepthArgs),
    /// M-resolved tensor light shifts of one level.
    TensorShift(TensorShiftArgs),
    /// Differential light shift between two series over an n range.
    MagicScan(MagicScanArgs),
    /// Extended Rydberg–Ritz fit of level energies.
    RitzFit(RitzFitArgs),
    /// Joint fit of the ionization energy and a constant quantum defect.
    ThresholdFit(ThresholdFitArgs),
    /// Förster defect of a pair-state channel.
    Forster(ForsterArgs),
    /// Photoionization fit of lifetime-vs-power data.
    PiFit(PiFitArgs),
    /// Isolated-core autoionization estimate.
    Autoion(AutoionArgs),
    /// Monte Carlo Ramsey contrast.
    RamseySim(CoherenceArgs),
    /// Monte Carlo Hahn-echo contrast.
    EchoSim(CoherenceArgs),
    /// Tensor-decomposed shift against direct 3D quadrature.
    OracleCheck(OracleArgs),
    /// Dump a hydrogenic radial wavefunction (debugging aid).
    Radial(RadialArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::AngularTable => "angular-table",
            Command::TrapDepth(_) => "trap-depth",
            Command::TensorShift(_) => "tensor-shift",
            Command::MagicScan(_) => "magic-scan",
            Command::RitzFit(_) => "ritz-fit",
            Command::ThresholdFit(_) => "threshold-fit",
            Command::Forster(_) => "forster",
            Command::PiFit(_) => "pi-fit",
            Command::Autoion(_) => "autoion",
            Command::RamseySim(_) => "ramsey-sim",
            Command::EchoSim(_) => "echo-sim",
            Command::OracleCheck(_) => "oracle-check",
            Command::Radial(_) => "radial",
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::AngularTable | Command::TrapDepth(_) | Command::MagicScan(_) | Command::RamseySim(_) | Command::EchoSim(_) | Command::Radial(_) => {
                Format::Csv
            }
            _ => Format::Json,
        }
    }
}

fn term_arg(s: &str) -> std::result::Result<String, String> {
    s.parse::<Term>().map(|t| t.to_string()).map_err(|e| e.to_string())
}

fn projection_arg(s: &str) -> std::result::Result<String, String> {
    s.parse::<HalfInt>().map(|m| m.to_string()).map_err(|e| e.to_string())
}

fn parse_term(s: &str) -> Result<Term> {
    s.parse()
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpeciesArgs {
    /// Species preset: yb174, yb174-calc, rb87.
    #[arg(long, default_value = "yb174")]
    pub species: String,

    /// Override the core polarizability, e.g. `96au`.
    #[arg(long, value_parser = units::polarizability)]
    #[serde(rename = "alpha_core_au")]
    pub alpha_core: Option<f64>,

    /// Override the ground-state polarizability, e.g. `226au`.
    #[arg(long, value_parser = units::polarizability)]
    #[serde(rename = "alpha_ground_au")]
    pub alpha_ground: Option<f64>,
}

impl SpeciesArgs {
    pub fn resolve(&self) -> Result<AtomicSpecies> {
        let mut s = AtomicSpecies::preset(&self.species)?;
        if let Some(a) = self.alpha_core {
            s = s.with_core_polarizability(a);
        }
        if let Some(a) = self.alpha_ground {
            s = s.with_ground_polarizability(a);
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BeamArgs {
    #[arg(long, value_parser = units::length, default_value = "532nm")]
    #[serde(rename = "wavelength_m")]
    pub wavelength: f64,

    /// 1/e² intensity radius at the focus.
    #[arg(long, value_parser = units::length, default_value = "650nm")]
    #[serde(rename = "waist_m")]
    pub waist: f64,

    #[arg(long, value_parser = units::power, default_value = "9mW")]
    #[serde(rename = "power_w")]
    pub power: f64,

    /// Fraction of the nominal power reaching the atom [default: the
    /// operating point where 9 mW gives a 12 MHz Yb ground-state depth]
    #[arg(long, value_parser = units::fraction, conflicts_with = "ground_depth")]
    pub efficiency: Option<f64>,

    /// Calibrate the efficiency so the ground state has this depth at --power.
    #[arg(long, value_parser = units::frequency)]
    #[serde(rename = "ground_depth_hz")]
    pub ground_depth: Option<f64>,
}

impl BeamArgs {
    pub fn resolve(&self, species: &AtomicSpecies) -> Result<TweezerBeam> {
        let beam = TweezerBeam::new(self.wavelength, self.waist, self.power)?;
        let eff = match (self.efficiency, self.ground_depth) {
            (Some(e), _) => e,
            (None, Some(d)) => {
                let e = calibrate_efficiency(species, &beam, d)?;
                if !(e > 0.0 && e <= 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "a {:.4} MHz ground depth needs efficiency {e:.4} at {:.4} mW",
                        d * 1e-6,
                        self.power * 1e3
                    )));
                }
                e
            }
            (None, None) => OPERATING_POINT_EFFICIENCY,
        };
        beam.with_efficiency(eff)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrapDepthArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub species: SpeciesArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub beam: BeamArgs,
    /// Series term, e.g. 3S1, 1D2, 2P3/2.
    #[arg(long, value_parser = term_arg, default_value = "3S1")]
    pub series: String,
    /// Single principal quantum number (otherwise --n-min..=--n-max).
    #[arg(long, conflicts_with_all = ["n_min", "n_max"])]
    pub n: Option<u32>,
    #[arg(long, default_value_t = 40)]
    pub n_min: u32,
    #[arg(long, default_value_t = 140)]
    pub n_max: u32,
    /// Magnetic projection [default: lowest non-negative]
    #[arg(long, value_parser = projection_arg, allow_hyphen_values = true)]
    pub m: Option<String>,
    /// Constant quantum defect for the series, replacing the species model.
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TensorShiftArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub species: SpeciesArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub beam: BeamArgs,
    #[arg(long, value_parser = term_arg, default_value = "3P2")]
    pub series: String,
    #[arg(long, default_value_t = 74)]
    pub n: u32,
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MagicScanArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub species: SpeciesArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub beam: BeamArgs,
    #[arg(long, value_parser = term_arg, default_value = "3S1")]
    pub series_a: String,
    #[arg(long, value_parser = term_arg, default_value = "3P0")]
    pub series_b: String,
    #[arg(long, value_parser = projection_arg, allow_hyphen_values = true)]
    pub m_a: Option<String>,
    #[arg(long, value_parser = projection_arg, allow_hyphen_values = true)]
    pub m_b: Option<String>,
    #[arg(long, default_value_t = 60)]
    pub n_min: u32,
    #[arg(long, default_value_t = 90)]
    pub n_max: u32,
    /// n_b = n_a + offset.
    #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
    pub offset: i32,
    /// Give b the same n* as a instead of its own defect.
    #[arg(long)]
    pub same_n_star: bool,
    /// Rescale each row to the power at which level a has this depth.
    #[arg(long, value_parser = units::frequency)]
    #[serde(rename = "rydberg_depth_hz")]
    pub rydberg_depth: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RitzFitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub species: SpeciesArgs,
    /// CSV `n,energy_cm1[,sigma_mhz]` [default: bundled 174Yb 3S1 table]
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Inclusive n window a:b.
    #[arg(long, default_value = "36:79")]
    pub range: String,
    /// Highest even power of 1/(n − δ₀).
    #[arg(long, default_value_t = 8)]
    pub order: usize,
    /// Also fit the ionization energy.
    #[arg(long)]
    pub free_threshold: bool,
    /// Ionization energy, e.g. `50443.07074cm-1` [default: species preset]
    #[arg(long, value_parser = units::wavenumber)]
    #[serde(rename = "ionization_energy_cm1")]
    pub ionization_energy: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ThresholdFitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub species: SpeciesArgs,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "60:80")]
    pub range: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ForsterArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub species: SpeciesArgs,
    /// `n:term,n:term->n:term,n:term`
    #[arg(long, default_value = "80:3S1,80:3S1->80:3P2,79:3P2")]
    pub channel: String,
    /// Constant defect override `TERM=VALUE`; repeatable.
    #[arg(long = "delta", value_name = "TERM=VALUE")]
    pub deltas: Vec<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PiFitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub beam: BeamArgs,
    /// CSV `power_mw,lifetime_us[,sigma_us]`.
    #[arg(long, required_unless_present = "synthetic_74_3p2")]
    pub input: Option<PathBuf>,
    /// Use the bundled synthetic 74 3P2 set.
    #[arg(long, conflicts_with = "input")]
    pub synthetic_74_3p2: bool,
    /// Intensity reduction for a thermal atom (1 = at the focus).
    #[arg(long, value_parser = units::fraction, default_value = "1")]
    pub thermal_factor: f64,
    /// Powers for the reduction table.
    #[arg(long, value_parser = units::power, value_delimiter = ',', default_value = "3mW,6mW,9mW,12mW")]
    #[serde(rename = "reduction_powers_w")]
    pub at: Vec<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AutoionArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub species: SpeciesArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub beam: BeamArgs,
    #[arg(long, value_parser = term_arg, default_value = "3S1")]
    pub series: String,
    #[arg(long, default_value_t = 75)]
    pub n: u32,
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CoherenceArgs {
    /// Differential shift at the trap bottom.
    #[arg(long, value_parser = units::frequency, allow_hyphen_values = true)]
    #[serde(rename = "dnu_hz")]
    pub dnu: f64,
    #[arg(long, value_parser = units::temperature)]
    #[serde(rename = "temperature_k")]
    pub temp: f64,
    /// Depth of the trap during the sequence.
    #[arg(long, value_parser = units::frequency)]
    #[serde(rename = "depth_hz")]
    pub depth: f64,
    /// Depth of the ground-state trap the atoms were cooled in before the
    /// (sudden) excitation; pass the --depth value for atoms thermalized in
    /// the sequence trap itself. The default is the Yb operating point.
    #[arg(long, value_parser = units::frequency, default_value = "12MHz")]
    #[serde(rename = "loading_depth_hz")]
    pub loading_depth: f64,
    /// Population lifetime [default: none]
    #[arg(long, value_parser = units::time)]
    #[serde(rename = "t1_s")]
    pub t1: Option<f64>,
    /// Ensemble size.
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// start:stop:step
    #[arg(long, default_value = "0:60us:1us")]
    pub times: String,
    /// Radial,radial,axial frequencies [default: harmonic tweezer at --depth]
    #[arg(long, value_parser = units::frequency, value_delimiter = ',', num_args = 3)]
    #[serde(rename = "trap_frequencies_hz")]
    pub trap_freq: Option<Vec<f64>>,
    #[arg(long, value_parser = units::length, default_value = "532nm")]
    #[serde(rename = "wavelength_m")]
    pub wavelength: f64,
    #[arg(long, value_parser = units::length, default_value = "650nm")]
    #[serde(rename = "waist_m")]
    pub waist: f64,
    #[arg(long, default_value = "yb174")]
    pub species: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OracleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub species: SpeciesArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub beam: BeamArgs,
    #[arg(long, value_parser = term_arg, value_delimiter = ',', default_value = "3S1,1D2")]
    pub series: Vec<String>,
    #[arg(long = "n", value_delimiter = ',', default_value = "40,60,75,100")]
    pub ns: Vec<u32>,
    /// Allowed relative difference.
    #[arg(long, default_value_t = 5e-3)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RadialArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 0)]
    pub l: u32,
    #[arg(long, default_value_t = 2000)]
    pub points: usize,
}

/// A finished command: JSON payload plus an optional CSV rendering.
struct Outcome {
    data: Value,
    table: Option<Table>,
    raw_csv: Option<String>,
    /// Nonzero exit code to report after writing the result.
    status: i32,
}

impl Outcome {
    fn new(data: Value, table: Table) -> Self {
        Outcome { data, table: Some(table), raw_csv: None, status: 0 }
    }

    fn json_only(data: Value) -> Self {
        Outcome { data, table: None, raw_csv: None, status: 0 }
    }
}

/// Parse `argv`, run, write the result; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Execute a parsed command and write its output.
pub fn run(cli: &Cli) -> Result<i32> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::InvalidParameter("--threads must be at least 1".into()));
        }
        // Fails only if the pool is already set up, e.g. in tests.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let (envelope, outcome) = execute_full(&cli.command)?;
    let format = cli.format.unwrap_or_else(|| cli.command.default_format());
    let text = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&envelope)?;
            s.push('\n');
            s
        }
        Format::Csv => match (&outcome.raw_csv, &outcome.table) {
            (Some(raw), _) => raw.clone(),
            (None, Some(t)) => t.to_csv()?,
            (None, None) => {
                return Err(Error::InvalidParameter(format!("{} has no CSV form; use --format json", cli.command.name())));
            }
        },
    };
    write_text(&text, cli.output.as_deref())?;
    Ok(outcome.status)
}

/// Run a command and wrap its payload; nothing is written.
pub fn execute(command: &Command) -> Result<ResultEnvelope> {
    execute_full(command).map(|(e, _)| e)
}

fn execute_full(command: &Command) -> Result<(ResultEnvelope, Outcome)> {
    let (config, outcome) = match command {
        Command::AngularTable => (json!({}), angular_table_cmd()?),
        Command::TrapDepth(a) => (serde_json::to_value(a)?, trap_depth_cmd(a)?),
        Command::TensorShift(a) => (serde_json::to_value(a)?, tensor_shift_cmd(a)?),
        Command::MagicScan(a) => (serde_json::to_value(a)?, magic_scan_cmd(a)?),
        Command::RitzFit(a) => (serde_json::to_value(a)?, ritz_fit_cmd(a)?),
        Command::ThresholdFit(a) => (serde_json::to_value(a)?, threshold_fit_cmd(a)?),
        Command::Forster(a) => (serde_json::to_value(a)?, forster_cmd(a)?),
        Command::PiFit(a) => (serde_json::to_value(a)?, pi_fit_cmd(a)?),
        Command::Autoion(a) => (serde_json::to_value(a)?, autoion_cmd(a)?),
        Command::RamseySim(a) => (serde_json::to_value(a)?, coherence_cmd(a, false)?),
        Command::EchoSim(a) => (serde_json::to_value(a)?, coherence_cmd(a, true)?),
        Command::OracleCheck(a) => (serde_json::to_value(a)?, oracle_cmd(a)?),
        Command::Radial(a) => (serde_json::to_value(a)?, radial_cmd(a)?),
    };
    let envelope = ResultEnvelope {
        command: command.name().to_string(),
        config,
        data: outcome.data.clone(),
        provenance: Provenance::current(),
    };
    Ok((envelope, outcome))
}

fn beam_json(beam: &TweezerBeam) -> Value {
    json!({
        "wavelength_m": beam.wavelength,
        "waist_m": beam.waist,
        "power_w": beam.power,
        "efficiency": beam.efficiency,
        "rayleigh_range_m": beam.rayleigh_range(),
        "peak_intensity_w_m2": beam.peak(),
    })
}

fn with_delta(species: AtomicSpecies, term: &Term, delta: Option<f64>) -> AtomicSpecies {
    match delta {
        Some(d) => species.with_defect(term, DefectModel::Constant { delta: d }),
        None => species,
    }
}

fn projection(term: &Term, m: &Option<String>) -> Result<HalfInt> {
    match m {
        Some(s) => s.parse(),
        None => Ok(term.lowest_projection()),
    }
}

/// Calculator whose focal tensor field is read from / written to the cache
/// directory when `RYDTRAP_CACHE_DIR` is set.
fn calculator(species: AtomicSpecies, beam: TweezerBeam) -> Result<TrapCalculator> {
    let calc = TrapCalculator::new(species, beam);
    let Some(dir) = std::env::var_os(CACHE_ENV).map(PathBuf::from) else {
        return Ok(calc);
    };
    let path = dir.join(format!("field-{}.json", cache_key(&calc)?));
    if let Some(field) = read_cached_field(&path) {
        calc.insert_field(field);
        return Ok(calc);
    }
    let field = calc.field_at(calc.beam.focus)?;
    if let Err(e) = write_cached_field(&dir, &path, &field) {
        log::warn!("could not write tensor-field cache {}: {e}", path.display());
    }
    Ok(calc)
}

fn cache_key(calc: &TrapCalculator) -> Result<String> {
    let key = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "beam": calc.beam,
        "grid": calc.grid().spec(),
        "k_max": calc.k_max(),
    });
    let digest = Sha256::digest(serde_json::to_vec(&key)?);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

fn read_cached_field(path: &Path) -> Option<TensorField> {
    let text = std::fs::read_to_string(path).ok()?;
    let bundle: TensorFieldBundle = match serde_json::from_str(&text) {
        Ok(b) => b,
        Err(e) => {
            log::warn!("ignoring unreadable cache entry {}: {e}", path.display());
            return None;
        }
    };
    TensorField::from_bundle(bundle).ok()
}

fn write_cached_field(dir: &Path, path: &Path, field: &TensorField) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, serde_json::to_vec(&field.to_bundle())?)?;
    std::fs::rename(tmp, path)?;
    Ok(())
}

fn angular_table_cmd() -> Result<Outcome> {
    let rows: Vec<Value> = angular_table()
        .iter()
        .map(|r| {
            json!({
                "term": r.term.to_string(),
                "m": r.m.to_string(),
                "k0": r.factors[0].to_string(),
                "k2": r.factors[1].to_string(),
                "k4": r.factors[2].to_string(),
            })
        })
        .collect();
    Ok(Outcome { data: json!({ "rows": rows }), table: None, raw_csv: Some(angular_table_csv()), status: 0 })
}

fn trap_depth_cmd(a: &TrapDepthArgs) -> Result<Outcome> {
    let term = parse_term(&a.series)?;
    let species = with_delta(a.species.resolve()?, &term, a.delta);
    let beam = a.beam.resolve(&species)?;
    let m = projection(&term, &a.m)?;
    let ns: Vec<u32> = match a.n {
        Some(n) => vec![n],
        None if a.n_max >= a.n_min => (a.n_min..=a.n_max).collect(),
        None => return Err(Error::InvalidParameter("--n-max is below --n-min".into())),
    };
    let calc = calculator(species, beam)?;
    use rayon::prelude::*;
    let rows: Vec<_> = ns
        .par_iter()
        .map(|&n| -> Result<_> {
            let state = calc.state(n, term, m)?;
            let b = calc.breakdown(&state)?;
            let d = calc.trap_depth(&state)?;
            Ok((b, d))
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(&[
        "n", "n_star", "u_core_mhz", "u_pond_mhz", "u_total_mhz", "depth_mhz", "ground_depth_mhz", "ratio_to_ground",
    ]);
    let mut json_rows = Vec::new();
    for (b, d) in &rows {
        let mhz = |x: f64| x * 1e-6;
        table.push([
            d.n.to_string(),
            num(d.n_star),
            num(mhz(b.core_hz)),
            num(mhz(b.ponderomotive_hz())),
            num(mhz(b.total_hz)),
            num(mhz(d.depth_hz)),
            cell(d.ground_depth_hz.map(mhz)),
            cell(d.ratio_to_ground),
        ]);
        json_rows.push(json!({
            "n": d.n,
            "n_star": d.n_star,
            "u_core_mhz": mhz(b.core_hz),
            "u_pond_mhz": mhz(b.ponderomotive_hz()),
            "u_pond_by_rank_mhz": b.ponderomotive.iter().map(|c| json!({"k": c.k, "angular_factor": c.angular_factor, "shift_mhz": mhz(c.shift_hz)})).collect::<Vec<_>>(),
            "u_total_mhz": mhz(b.total_hz),
            "depth_mhz": mhz(d.depth_hz),
            "ground_depth_mhz": d.ground_depth_hz.map(mhz),
            "ratio_to_ground": d.ratio_to_ground,
        }));
    }
    let data = json!({
        "species": calc.species.name,
        "series": term.to_string(),
        "m": m.to_string(),
        "beam": beam_json(&calc.beam),
        "rows": json_rows,
    });
    Ok(Outcome::new(data, table))
}

fn tensor_shift_cmd(a: &TensorShiftArgs) -> Result<Outcome> {
    let term = parse_term(&a.series)?;
    let species = with_delta(a.species.resolve()?, &term, a.delta);
    let beam = a.beam.resolve(&species)?;
    let calc = calculator(species, beam)?;
    let shifts = calc.tensor_splitting(a.n, term)?;
    let max = shifts.values().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = shifts.values().cloned().fold(f64::INFINITY, f64::min);
    let spread = if shifts.is_empty() { 0.0 } else { max - min };
    let mut table = Table::new(&["m", "shift_khz"]);
    let mut rows = Vec::new();
    for (m, v) in &shifts {
        table.push([m.to_string(), num(v * 1e-3)]);
        rows.push(json!({"m": m.to_string(), "shift_khz": v * 1e-3}));
    }
    let state = calc.state(a.n, term, term.lowest_projection())?;
    let depth = calc.trap_depth(&state)?;
    let data = json!({
        "n": a.n,
        "series": term.to_string(),
        "n_star": state.n_star,
        "beam": beam_json(&calc.beam),
        "depth_mhz": depth.depth_hz * 1e-6,
        "ground_depth_mhz": depth.ground_depth_hz.map(|g| g * 1e-6),
        "spread_khz": spread * 1e-3,
        "shifts": rows,
    });
    Ok(Outcome::new(data, table))
}

fn magic_scan_cmd(a: &MagicScanArgs) -> Result<Outcome> {
    let ta = parse_term(&a.series_a)?;
    let tb = parse_term(&a.series_b)?;
    let species = a.species.resolve()?;
    let beam = a.beam.resolve(&species)?;
    let ma = projection(&ta, &a.m_a)?;
    let mb = projection(&tb, &a.m_b)?;
    if a.n_max < a.n_min {
        return Err(Error::InvalidParameter("--n-max is below --n-min".into()));
    }
    let calc = calculator(species, beam)?;
    let mut table = Table::new(&["n_a", "n_b", "n_star_a", "n_star_b", "depth_a_mhz", "differential_khz", "fraction_of_depth"]);
    let mut rows = Vec::new();
    for na in a.n_min..=a.n_max {
        let nb = na as i64 + a.offset as i64;
        if nb < 1 {
            return Err(Error::InvalidParameter(format!("n_b = {nb} for n_a = {na}")));
        }
        let nb = nb as u32;
        let sa = calc.state(na, ta, ma)?;
        let sb = if a.same_n_star {
            RydbergState::with_defect(&calc.species.name, nb, tb, mb, nb as f64 - sa.n_star)?
        } else {
            calc.state(nb, tb, mb)?
        };
        let depth = calc.trap_depth(&sa)?.depth_hz;
        let mut diff = calc.differential_shift(&sa, &sb)?;
        let mut shown_depth = depth;
        if let Some(target) = a.rydberg_depth {
            if depth <= 0.0 {
                return Err(Error::InvalidParameter(format!("n = {na} {ta} is not trapped; cannot rescale to a depth")));
            }
            diff *= target / depth;
            shown_depth = target;
        }
        let frac = diff / shown_depth;
        table.push([
            na.to_string(),
            nb.to_string(),
            num(sa.n_star),
            num(sb.n_star),
            num(shown_depth * 1e-6),
            num(diff * 1e-3),
            num(frac),
        ]);
        rows.push(json!({
            "n_a": na, "n_b": nb, "n_star_a": sa.n_star, "n_star_b": sb.n_star,
            "depth_a_mhz": shown_depth * 1e-6, "differential_khz": diff * 1e-3, "fraction_of_depth": frac,
        }));
    }
    let data = json!({
        "series_a": ta.to_string(), "m_a": ma.to_string(),
        "series_b": tb.to_string(), "m_b": mb.to_string(),
        "beam": beam_json(&calc.beam),
        "rows": rows,
    });
    Ok(Outcome::new(data, table))
}

fn energies(input: &Option<PathBuf>) -> Result<Vec<EnergyRecord>> {
    match input {
        Some(p) => load_energies(p),
        None => Ok(bundled_yb174_3s1()),
    }
}

fn range_arg(s: &str) -> Result<(u32, u32)> {
    let r = units::int_range(s).map_err(Error::InvalidParameter)?;
    Ok((*r.start(), *r.end()))
}

fn ritz_fit_cmd(a: &RitzFitArgs) -> Result<Outcome> {
    let species = a.species.resolve()?;
    let records = energies(&a.input)?;
    let range = range_arg(&a.range)?;
    let mut opts = RitzFitOptions::for_species(&species, a.order, range);
    if let Some(e) = a.ionization_energy {
        opts.ionization_energy_cm1 = e;
    }
    opts.free_threshold = a.free_threshold;
    let fit = fit_ritz(&records, opts)?;
    let coefficients: Vec<Value> = fit
        .coefficients
        .iter()
        .zip(&fit.uncertainties)
        .enumerate()
        .map(|(i, (v, s))| json!({"name": format!("delta{}", 2 * i), "value": v, "sigma": s}))
        .collect();
    let extrapolation: Vec<Value> = records
        .iter()
        .filter(|r| r.n < range.0 || r.n > range.1)
        .map(|r| {
            json!({
                "n": r.n,
                "measured_cm1": r.energy_cm1,
                "model_cm1": fit.energy(r.n),
                "measured_minus_model_mhz": fit.deviation_mhz(r),
            })
        })
        .collect();
    let mut table = Table::new(&["n", "energy_cm1", "fitted_cm1", "residual_mhz"]);
    for r in &fit.residuals {
        table.push([r.n.to_string(), num(r.energy_cm1), num(r.fitted_cm1), num(r.residual_mhz)]);
    }
    let data = json!({
        "range": [range.0, range.1],
        "order": a.order,
        "levels": fit.residuals.len(),
        "coefficients": coefficients,
        "ionization_energy_cm1": fit.ionization_energy_cm1,
        "ionization_energy_sigma_mhz": fit.ionization_energy_sigma_cm1.map(|s| s * MHZ_PER_CM1),
        "rydberg_constant_cm1": fit.rydberg_constant_cm1,
        "rms_mhz": fit.rms_mhz,
        "chi2": fit.chi2,
        "degrees_of_freedom": fit.degrees_of_freedom,
        "covariance": fit.covariance,
        "residuals": fit.residuals.iter().map(|r| json!({"n": r.n, "energy_cm1": r.energy_cm1, "fitted_cm1": r.fitted_cm1, "residual_mhz": r.residual_mhz})).collect::<Vec<_>>(),
        "extrapolation": extrapolation,
    });
    Ok(Outcome::new(data, table))
}

fn threshold_fit_cmd(a: &ThresholdFitArgs) -> Result<Outcome> {
    let species = a.species.resolve()?;
    let records = energies(&a.input)?;
    let range = range_arg(&a.range)?;
    let fit = fit_threshold(&records, range, species.rydberg_constant_cm1)?;
    let mut table = Table::new(&["n", "energy_cm1", "fitted_cm1", "residual_mhz"]);
    for r in &fit.residuals {
        table.push([r.n.to_string(), num(r.energy_cm1), num(r.fitted_cm1), num(r.residual_mhz)]);
    }
    let data = json!({
        "range": [range.0, range.1],
        "ionization_energy_cm1": fit.ionization_energy_cm1,
        "ionization_energy_sigma_mhz": fit.ionization_energy_sigma_mhz(),
        "offset_from_preset_mhz": (fit.ionization_energy_cm1 - species.ionization_energy_cm1) * MHZ_PER_CM1,
        "delta": fit.delta,
        "delta_sigma": fit.delta_sigma,
        "rms_mhz": fit.rms_mhz,
        "chi2": fit.chi2,
        "residuals": fit.residuals.iter().map(|r| json!({"n": r.n, "energy_cm1": r.energy_cm1, "fitted_cm1": r.fitted_cm1, "residual_mhz": r.residual_mhz})).collect::<Vec<_>>(),
    });
    Ok(Outcome::new(data, table))
}

fn parse_level(s: &str) -> Result<(u32, Term)> {
    let (n, t) = s
        .trim()
        .split_once(':')
        .ok_or_else(|| Error::InvalidParameter(format!("level `{s}` must be n:term")))?;
    let n: u32 = n.parse().map_err(|_| Error::InvalidParameter(format!("malformed n in `{s}`")))?;
    Ok((n, t.parse()?))
}

fn parse_pair(s: &str) -> Result<[(u32, Term); 2]> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| Error::InvalidParameter(format!("pair `{s}` must be n:term,n:term")))?;
    Ok([parse_level(a)?, parse_level(b)?])
}

fn forster_cmd(a: &ForsterArgs) -> Result<Outcome> {
    let mut species = a.species.resolve()?;
    for d in &a.deltas {
        let (t, v) = d
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("--delta `{d}` must be TERM=VALUE")))?;
        let term: Term = t.parse()?;
        let v: f64 = v.parse().map_err(|_| Error::InvalidParameter(format!("malformed defect in `{d}`")))?;
        species = species.with_defect(&term, DefectModel::Constant { delta: v });
    }
    let (pin, pout) = a
        .channel
        .split_once("->")
        .ok_or_else(|| Error::InvalidParameter(format!("channel `{}` must be in->out", a.channel)))?;
    let pin = parse_pair(pin)?;
    let pout = parse_pair(pout)?;
    let defect = forster_defect(&species, pin, pout)?;
    let level = |(n, t): (u32, Term)| -> Result<Value> {
        let delta = species.quantum_defect(&t, n)?;
        Ok(json!({"n": n, "term": t.to_string(), "delta": delta, "n_star": n as f64 - delta}))
    };
    let data = json!({
        "channel": a.channel,
        "convention": "E(in1) + E(in2) - E(out1) - E(out2)",
        "defect_mhz": defect,
        "incoming": [level(pin[0])?, level(pin[1])?],
        "outgoing": [level(pout[0])?, level(pout[1])?],
    });
    Ok(Outcome::json_only(data))
}

fn pi_fit_cmd(a: &PiFitArgs) -> Result<Outcome> {
    // The conversion only needs the beam geometry; efficiency is still honoured.
    let yb = AtomicSpecies::yb174();
    let beam = a.beam.resolve(&yb)?;
    let (records, source) = match &a.input {
        Some(p) => (load_lifetimes(p)?, p.display().to_string()),
        None => (synthetic_74_3p2(), "bundled synthetic 74 3P2 set (not measured data)".to_string()),
    };
    let fit = fit_photoionization(&records, &beam, a.thermal_factor)?;
    let reductions: Vec<Value> = a
        .at
        .iter()
        .map(|&p| json!({"power_mw": p * 1e3, "reduction": trapped_lifetime_reduction(&fit, p), "lifetime_us": 1e6 / fit.rate_at(p)}))
        .collect();
    let data = json!({
        "source": source,
        "records": records.len(),
        "gamma0_per_s": fit.gamma0,
        "gamma0_sigma_per_s": fit.gamma0_sigma,
        "natural_lifetime_us": fit.natural_lifetime() * 1e6,
        "natural_lifetime_sigma_us": fit.natural_lifetime_sigma() * 1e6,
        "gamma_pi_per_s_per_w": fit.gamma_pi,
        "gamma_pi_sigma_per_s_per_w": fit.gamma_pi_sigma,
        "sigma_pi_m2": fit.cross_section_m2,
        "sigma_pi_sigma_m2": fit.cross_section_sigma_m2,
        "intensity_per_watt_w_m2": fit.intensity_per_watt,
        "chi2": fit.chi2,
        "degrees_of_freedom": fit.degrees_of_freedom,
        "reduction_at_power": reductions,
    });
    Ok(Outcome::json_only(data))
}

fn autoion_cmd(a: &AutoionArgs) -> Result<Outcome> {
    let term = parse_term(&a.series)?;
    let species = with_delta(a.species.resolve()?, &term, a.delta);
    let beam = a.beam.resolve(&species)?;
    let state = RydbergState::new(&species, a.n, term, term.lowest_projection())?;
    let est = autoionization_rate(&state, &species, &beam)?;
    let data = json!({
        "n": a.n,
        "series": term.to_string(),
        "n_star": est.n_star,
        "beam": beam_json(&beam),
        "core_depth_mhz": est.core_depth_hz * 1e-6,
        "channels": est.channels.iter().map(|c| json!({"label": c.label, "detuning_thz": c.detuning_hz * 1e-12, "width_per_s": c.width_s, "rate_per_s": c.rate_s})).collect::<Vec<_>>(),
        "rate_per_s": est.rate_s,
        "rate_times_n_star_cubed_per_s": est.scaled_rate_s,
        "lifetime_ms": est.lifetime_s.map(|t| t * 1e3),
    });
    Ok(Outcome::json_only(data))
}

fn coherence_cmd(a: &CoherenceArgs, echo: bool) -> Result<Outcome> {
    let times = units::time_grid(&a.times).map_err(Error::InvalidParameter)?;
    let freqs = match &a.trap_freq {
        Some(f) => [f[0], f[1], f[2]],
        None => {
            let species = AtomicSpecies::preset(&a.species)?;
            let beam = TweezerBeam::new(a.wavelength, a.waist, 0.0)?;
            trap_frequencies(a.depth, &beam, species.mass_kg())
        }
    };
    let scenario = DephasingScenario::new(a.dnu, a.temp, a.depth)
        .with_loading_depth(a.loading_depth)
        .with_trap_frequencies(freqs)
        .with_t1(a.t1.unwrap_or(f64::INFINITY))
        .with_ensemble(a.n, a.seed);
    let curve: ContrastCurve = if echo { echo_contrast(&scenario, &times)? } else { ramsey_contrast(&scenario, &times)? };
    let dist = thermal_shift_distribution(&scenario)?;
    let mut table = Table::new(&["t_us", "contrast"]);
    for (t, c) in curve.times_s.iter().zip(&curve.contrast) {
        table.push([num(t * 1e6), num(*c)]);
    }
    let data = json!({
        "sequence": if echo { "echo" } else { "ramsey" },
        "trap_frequencies_hz": freqs,
        "decay_time_us": curve.decay_time_s.map(|t| t * 1e6),
        "mean_shift_khz": dist.mean_hz * 1e-3,
        "shift_std_khz": dist.std_hz * 1e-3,
        "t_us": curve.times_s.iter().map(|t| t * 1e6).collect::<Vec<_>>(),
        "contrast": curve.contrast,
    });
    Ok(Outcome::new(data, table))
}

fn oracle_cmd(a: &OracleArgs) -> Result<Outcome> {
    let species = a.species.resolve()?;
    let beam = a.beam.resolve(&species)?;
    let calc = calculator(species, beam)?;
    let field = calc.field_at(calc.beam.focus)?;
    let mut table = Table::new(&["series", "n", "tensor_hz", "brute_force_hz", "relative_difference", "pass"]);
    let mut rows = Vec::new();
    let mut all_pass = true;
    for s in &a.series {
        let term = parse_term(s)?;
        for &n in &a.ns {
            // Integer n (δ = 0) so both paths use the same hydrogenic state.
            let state = RydbergState::with_defect(&calc.species.name, n, term, term.lowest_projection(), 0.0)?;
            let tensor: f64 = ponderomotive_shift(&state, &field, false)?.iter().map(|c| c.shift_hz).sum();
            let avg = brute_force_average_with(&calc.beam, n, &term, state.m, calc.beam.focus, BruteForceOptions::default())?;
            let brute = crate::potential::ponderomotive_coefficient(calc.beam.wavelength) * avg;
            let rel = ((tensor - brute) / brute).abs();
            let pass = rel <= a.tolerance;
            all_pass &= pass;
            table.push([term.to_string(), n.to_string(), num(tensor), num(brute), num(rel), pass.to_string()]);
            rows.push(json!({"series": term.to_string(), "n": n, "tensor_hz": tensor, "brute_force_hz": brute, "relative_difference": rel, "pass": pass}));
        }
    }
    let data = json!({"tolerance": a.tolerance, "all_pass": all_pass, "rows": rows});
    let mut out = Outcome::new(data, table);
    if !all_pass {
        out.status = 3;
    }
    Ok(out)
}

fn radial_cmd(a: &RadialArgs) -> Result<Outcome> {
    if a.points < 4 {
        return Err(Error::InvalidParameter("--points must be at least 4".into()));
    }
    let grid = Arc::new(RadialGrid::sqrt_spaced(crate::radial::DEFAULT_R_MIN, crate::radial::outer_radius_for(a.n), a.points)?);
    let wf = hydrogen_radial(a.n, a.l, &grid)?;
    let density = wf.density();
    let mut table = Table::new(&["r_bohr", "r_nl", "r2_r_nl2"]);
    for ((r, v), d) in grid.points().iter().zip(&wf.samples).zip(&density) {
        table.push([num(*r), num(*v), num(*d)]);
    }
    let data = json!({
        "n": a.n,
        "l": a.l,
        "norm": wf.norm(),
        "nodes": wf.node_count(),
        "mean_radius_bohr": wf.expectation(|r| r),
        "r_bohr": grid.points(),
        "r_nl": wf.samples,
    });
    Ok(Outcome::new(data, table))
}
