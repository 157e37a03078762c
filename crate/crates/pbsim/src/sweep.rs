//! Parameter sweeps, optimum search, and region-boundary location.
//!
//! A [`SweepSpec`] names a model, one swept axis, and a grid; [`run_sweep`]
//! solves every grid point and returns one [`ResultRow`] per point. Points
//! that fail individually are reported in-row with an error marker so a long
//! scan never aborts halfway. [`find_optimum`] locates the coupling that
//! minimises the second-order correlation and [`locate_region_boundaries`]
//! bisects the crossover points between correlation-ordering regions.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::DensityMatrix;
use crate::liouvillian::MasterEquation;
use crate::models::{
    build_one_cavity_hamiltonian, build_two_cavity_hamiltonian_reduced, one_cavity_channels,
    two_cavity_channels, two_cavity_drive_term, OneCavityParams, TwoCavityParams,
};
use crate::observables::{classify, correlation_report, CorrelationReport};
use crate::solvers::{evolve, evolve_with_step, steady_state_of, CachedSteadySolver, HamiltonianModel};

/// Number of grid points that share one cached factorisation.
const CHUNK: usize = 16;

/// Default Hilbert-space dimension cap for sweep points.
pub const DEFAULT_DIM_CAP: usize = 64;

/// Absolute axis tolerance for region-boundary bisection.
pub const BOUNDARY_TOL: f64 = 1e-4;

/// Which physical model a sweep runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    OneCavity,
    TwoCavityReduced,
    TwoCavityFull,
}

/// The quantity varied along the sweep grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Shared atom and mode detuning of the one-cavity model.
    Delta,
    /// Drive amplitude of the tripartite cavity in the one-cavity model.
    OmegaDrive,
    /// Effective atom-supermode coupling of the two-cavity model.
    GPrime,
    /// Evolution time; produces a trajectory instead of steady states.
    T,
}

impl SweepAxis {
    fn name(self) -> &'static str {
        match self {
            SweepAxis::Delta => "delta",
            SweepAxis::OmegaDrive => "omega_drive",
            SweepAxis::GPrime => "g_prime",
            SweepAxis::T => "t",
        }
    }
}

/// Columns requested in the sweep output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    MeanPhonon,
    G2,
    G3,
    G4,
    Region,
}

/// Every output column.
pub fn all_outputs() -> Vec<OutputKind> {
    vec![
        OutputKind::MeanPhonon,
        OutputKind::G2,
        OutputKind::G3,
        OutputKind::G4,
        OutputKind::Region,
    ]
}

/// Model parameters held fixed while the axis varies.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelParams {
    OneCavity(OneCavityParams),
    TwoCavity(TwoCavityParams),
}

impl ModelParams {
    fn n_trunc(&self) -> usize {
        match self {
            ModelParams::OneCavity(p) => p.n_trunc,
            ModelParams::TwoCavity(p) => p.n_trunc,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ModelParams::OneCavity(p) => p.validate(),
            ModelParams::TwoCavity(p) => p.validate(),
        }
    }
}

/// Numerical knobs that apply to every point of a sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Explicit integrator step for time sweeps; chosen automatically when absent.
    #[serde(default)]
    pub step: Option<f64>,
    /// Upper bound on the total Hilbert-space dimension per point.
    #[serde(default = "default_dim_cap")]
    pub dim_cap: usize,
}

fn default_dim_cap() -> usize {
    DEFAULT_DIM_CAP
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { step: None, dim_cap: DEFAULT_DIM_CAP }
    }
}

/// Full description of one sweep.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub model: ModelKind,
    pub axis: SweepAxis,
    /// Inclusive axis interval, in units of the linewidth for frequency-like
    /// axes and inverse linewidths for time.
    pub range: (f64, f64),
    /// Number of grid points, endpoints included.
    pub points: usize,
    pub fixed: ModelParams,
    pub outputs: Vec<OutputKind>,
    pub solver: SolverOptions,
}

impl SweepSpec {
    /// Checks internal consistency without solving anything.
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.range;
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Config("sweep range must be finite".into()));
        }
        if lo >= hi {
            return Err(Error::Config(format!(
                "sweep range must satisfy lo < hi, got [{lo}, {hi}]"
            )));
        }
        if self.points < 2 {
            return Err(Error::Config(format!(
                "sweep needs at least 2 points, got {}",
                self.points
            )));
        }
        if self.outputs.is_empty() {
            return Err(Error::Config("sweep requests no outputs".into()));
        }
        if self.solver.dim_cap < 4 {
            return Err(Error::Config(format!(
                "dimension cap {} is below the smallest usable space",
                self.solver.dim_cap
            )));
        }
        let dim = 2 * self.fixed.n_trunc();
        if dim > self.solver.dim_cap {
            return Err(Error::Config(format!(
                "total dimension {dim} exceeds cap {}",
                self.solver.dim_cap
            )));
        }
        match (&self.fixed, self.model) {
            (ModelParams::OneCavity(_), ModelKind::OneCavity) => {}
            (ModelParams::TwoCavity(_), ModelKind::TwoCavityReduced)
            | (ModelParams::TwoCavity(_), ModelKind::TwoCavityFull) => {}
            _ => {
                return Err(Error::Config(
                    "fixed parameters do not match the sweep model".into(),
                ))
            }
        }
        self.fixed.validate()?;
        match (self.model, self.axis) {
            (_, SweepAxis::T) => {}
            (ModelKind::OneCavity, SweepAxis::Delta | SweepAxis::OmegaDrive) => {}
            (ModelKind::TwoCavityReduced, SweepAxis::GPrime) => {}
            (m, a) => {
                return Err(Error::Config(format!(
                    "axis {} is not defined for model {:?}",
                    a.name(),
                    m
                )))
            }
        }
        if self.axis == SweepAxis::GPrime {
            if let ModelParams::TwoCavity(p) = &self.fixed {
                if p.g <= 0.0 {
                    return Err(Error::Config(
                        "coupling sweep needs a positive bare atom coupling".into(),
                    ));
                }
                if p.n_plus <= p.n_minus {
                    return Err(Error::Config(
                        "coupling sweep needs a photon imbalance between supermodes".into(),
                    ));
                }
            }
        }
        if self.model == ModelKind::TwoCavityFull && self.axis == SweepAxis::T {
            if let ModelParams::TwoCavity(p) = &self.fixed {
                if p.omega_m <= 0.0 {
                    return Err(Error::Config(
                        "time sweep of the full model needs a positive mechanical frequency".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// The evenly spaced axis grid, endpoints included.
    pub fn grid(&self) -> Vec<f64> {
        let (lo, hi) = self.range;
        let n = self.points;
        (0..n)
            .map(|i| lo + (hi - lo) * (i as f64) / ((n - 1) as f64))
            .collect()
    }
}

/// Observables at one grid point, with logarithms precomputed for plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub axis_value: f64,
    pub mean_phonon: f64,
    pub g2: f64,
    pub g3: f64,
    pub g4: f64,
    pub log10_g2: f64,
    pub log10_g3: f64,
    pub log10_g4: f64,
    /// Region label, empty when not requested, or `error:<kind>` for a
    /// point that failed to solve.
    pub region_label: String,
}

impl ResultRow {
    /// True when this row records a per-point failure.
    pub fn is_error(&self) -> bool {
        self.region_label.starts_with("error:")
    }

    fn error(axis_value: f64, err: &Error) -> ResultRow {
        ResultRow {
            axis_value,
            mean_phonon: f64::NAN,
            g2: f64::NAN,
            g3: f64::NAN,
            g4: f64::NAN,
            log10_g2: f64::NAN,
            log10_g3: f64::NAN,
            log10_g4: f64::NAN,
            region_label: format!("error:{}", err.slug()),
        }
    }

    fn from_report(axis_value: f64, report: &CorrelationReport, outputs: &[OutputKind]) -> ResultRow {
        let want = |k: OutputKind| outputs.contains(&k);
        let mask = |on: bool, v: f64| if on { v } else { f64::NAN };
        let g2 = mask(want(OutputKind::G2), report.g2);
        let g3 = mask(want(OutputKind::G3), report.g3);
        let g4 = mask(want(OutputKind::G4), report.g4);
        ResultRow {
            axis_value,
            mean_phonon: mask(want(OutputKind::MeanPhonon), report.mean_phonon),
            g2,
            g3,
            g4,
            log10_g2: g2.log10(),
            log10_g3: g3.log10(),
            log10_g4: g4.log10(),
            region_label: if want(OutputKind::Region) {
                report.region_label.to_string()
            } else {
                String::new()
            },
        }
    }
}

/// Builds the generator for one grid point of a steady-state sweep.
fn generator_at(spec: &SweepSpec, x: f64) -> Result<MasterEquation> {
    match (&spec.fixed, spec.model) {
        (ModelParams::OneCavity(base), ModelKind::OneCavity) => {
            let mut p = base.clone();
            match spec.axis {
                SweepAxis::Delta => p.delta = x,
                SweepAxis::OmegaDrive => p.omega_drive = x,
                _ => return Err(Error::Config("axis not defined for this model".into())),
            }
            p.validate()?;
            let h = build_one_cavity_hamiltonian(&p)?;
            MasterEquation::new(h, one_cavity_channels(&p)?)
        }
        (ModelParams::TwoCavity(base), ModelKind::TwoCavityReduced) => {
            let mut p = base.clone();
            if spec.axis == SweepAxis::GPrime {
                set_two_cavity_coupling(&mut p, x)?;
            } else {
                return Err(Error::Config("axis not defined for this model".into()));
            }
            p.validate()?;
            let h = build_two_cavity_hamiltonian_reduced(&p)?;
            MasterEquation::new(h, two_cavity_channels(&p)?)
        }
        _ => Err(Error::Config(
            "steady-state sweep is undefined for a time-dependent model".into(),
        )),
    }
}

/// Adjusts the mirror coupling so the effective atom-supermode coupling
/// equals `g_prime`.
fn set_two_cavity_coupling(p: &mut TwoCavityParams, g_prime: f64) -> Result<()> {
    let imbalance = p.n_plus.sqrt() - p.n_minus.sqrt();
    if imbalance <= 0.0 {
        return Err(Error::DivisionByZero("photon imbalance"));
    }
    if p.g <= 0.0 {
        return Err(Error::Config(
            "cannot realise a coupling with a vanishing bare atom coupling".into(),
        ));
    }
    if g_prime < 0.0 {
        return Err(Error::Config(format!(
            "effective coupling must be nonnegative, got {g_prime}"
        )));
    }
    let rate = g_prime / imbalance;
    p.g0 = 4.0 * p.j * rate / p.g;
    Ok(())
}

fn solve_point(
    spec: &SweepSpec,
    x: f64,
    cache: &Option<CachedSteadySolver>,
) -> Result<DensityMatrix> {
    let me = generator_at(spec, x)?;
    if let Some(cache) = cache {
        if let Some(rho) = cache.solve(&me)? {
            return Ok(rho);
        }
    }
    steady_state_of(&me)
}

fn steady_row(spec: &SweepSpec, x: f64, cache: &Option<CachedSteadySolver>) -> ResultRow {
    let outcome = solve_point(spec, x, cache).and_then(|rho| {
        let slot = rho.space().n_subsystems() - 1;
        correlation_report(&rho, slot)
    });
    match outcome {
        Ok(report) => ResultRow::from_report(x, &report, &spec.outputs),
        Err(err) => ResultRow::error(x, &err),
    }
}

fn run_steady_sweep(spec: &SweepSpec) -> Result<Vec<ResultRow>> {
    let grid = spec.grid();
    let n_chunks = (grid.len() + CHUNK - 1) / CHUNK;
    let chunks: Vec<Vec<ResultRow>> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let lo = ci * CHUNK;
            let hi = (lo + CHUNK).min(grid.len());
            let mid = (lo + hi) / 2;
            let cache = generator_at(spec, grid[mid])
                .ok()
                .and_then(|me| CachedSteadySolver::new(&me).ok());
            (lo..hi).map(|i| steady_row(spec, grid[i], &cache)).collect()
        })
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

fn run_time_sweep(spec: &SweepSpec) -> Result<Vec<ResultRow>> {
    let grid = spec.grid();
    let (model, channels) = match (&spec.fixed, spec.model) {
        (ModelParams::OneCavity(p), ModelKind::OneCavity) => {
            let h = build_one_cavity_hamiltonian(p)?;
            (HamiltonianModel::Static(h), one_cavity_channels(p)?)
        }
        (ModelParams::TwoCavity(p), ModelKind::TwoCavityReduced) => {
            let h = build_two_cavity_hamiltonian_reduced(p)?;
            (HamiltonianModel::Static(h), two_cavity_channels(p)?)
        }
        (ModelParams::TwoCavity(p), ModelKind::TwoCavityFull) => {
            let base = build_two_cavity_hamiltonian_reduced(p)?;
            let drive = two_cavity_drive_term(p)?;
            (
                HamiltonianModel::Rotating { base, drive },
                two_cavity_channels(p)?,
            )
        }
        _ => {
            return Err(Error::Config(
                "fixed parameters do not match the sweep model".into(),
            ))
        }
    };
    let rho0 = DensityMatrix::ground(model.space());
    let traj = match spec.solver.step {
        Some(step) => evolve_with_step(&model, &channels, &rho0, &grid, step)?,
        None => evolve(&model, &channels, &rho0, &grid)?,
    };
    let slot = model.space().n_subsystems() - 1;
    let rows = traj
        .times()
        .iter()
        .zip(traj.states())
        .map(|(&t, rho)| match correlation_report(rho, slot) {
            Ok(report) => ResultRow::from_report(t, &report, &spec.outputs),
            Err(err) => ResultRow::error(t, &err),
        })
        .collect();
    Ok(rows)
}

/// Runs every point of a sweep.
///
/// Steady-state axes are solved in index-ordered chunks that share one
/// cached factorisation, so results are identical for any thread count.
/// The time axis integrates a single trajectory from the joint ground
/// state. Individual points that fail are returned as error rows.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    match spec.axis {
        SweepAxis::T => run_time_sweep(spec),
        _ => run_steady_sweep(spec),
    }
}

/// Minimises a scalar function over `[a, b]` by golden-section search.
///
/// Returns the best evaluated point; ties prefer the smaller axis value.
/// The search stops once the bracket is narrower than `tol`.
pub fn golden_section<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::Config(format!(
            "search interval must satisfy a < b, got [{a}, {b}]"
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Config(format!("search tolerance must be positive, got {tol}")));
    }
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let inv_phi2 = 1.0 - inv_phi;
    let (mut a, mut b) = (a, b);
    let mut h = b - a;
    let mut x1 = a + inv_phi2 * h;
    let mut x2 = a + inv_phi * h;
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    let note = |x: f64, fx: f64, best: &mut (f64, f64)| {
        if fx < best.1 || (fx == best.1 && x < best.0) {
            *best = (x, fx);
        }
    };
    while h > tol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            h = b - a;
            x1 = a + inv_phi2 * h;
            f1 = f(x1)?;
            note(x1, f1, &mut best);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            h = b - a;
            x2 = a + inv_phi * h;
            f2 = f(x2)?;
            note(x2, f2, &mut best);
        }
    }
    let xm = 0.5 * (a + b);
    let fm = f(xm)?;
    note(xm, fm, &mut best);
    Ok(best)
}

/// Evaluates the steady-state second-order correlation at arbitrary axis
/// values, reusing one factorisation across nearby calls.
struct SteadyObjective<'a> {
    spec: &'a SweepSpec,
    cache: Option<CachedSteadySolver>,
}

impl<'a> SteadyObjective<'a> {
    fn new(spec: &'a SweepSpec) -> Self {
        SteadyObjective { spec, cache: None }
    }

    fn state(&mut self, x: f64) -> Result<DensityMatrix> {
        let me = generator_at(self.spec, x)?;
        if let Some(cache) = &self.cache {
            if let Some(rho) = cache.solve(&me)? {
                return Ok(rho);
            }
        }
        self.cache = CachedSteadySolver::new(&me).ok();
        if let Some(cache) = &self.cache {
            if let Some(rho) = cache.solve(&me)? {
                return Ok(rho);
            }
        }
        steady_state_of(&me)
    }

    fn report(&mut self, x: f64) -> Result<CorrelationReport> {
        let rho = self.state(x)?;
        let slot = rho.space().n_subsystems() - 1;
        correlation_report(&rho, slot)
    }

    fn g2(&mut self, x: f64) -> Result<f64> {
        Ok(self.report(x)?.g2)
    }
}

/// Locates the axis value that minimises the second-order correlation.
///
/// The sweep grid is scanned first; with `refine` the bracket around the
/// grid minimum is then narrowed by golden-section search. Ties prefer the
/// smaller axis value. A minimum on the grid boundary, where no bracket
/// exists, is an error.
pub fn find_optimum(spec: &SweepSpec, refine: bool) -> Result<(f64, f64)> {
    spec.validate()?;
    if spec.axis == SweepAxis::T {
        return Err(Error::Config(
            "optimum search is defined for steady-state axes only".into(),
        ));
    }
    let rows = run_sweep(spec)?;
    let mut best: Option<usize> = None;
    for (i, row) in rows.iter().enumerate() {
        if row.is_error() || !row.g2.is_finite() {
            continue;
        }
        match best {
            None => best = Some(i),
            Some(j) if row.g2 < rows[j].g2 => best = Some(i),
            _ => {}
        }
    }
    let i = best.ok_or_else(|| {
        Error::Solver("every sweep point failed; nothing to minimise".into())
    })?;
    let valid_left = i > 0 && !rows[i - 1].is_error() && rows[i - 1].g2.is_finite();
    let valid_right =
        i + 1 < rows.len() && !rows[i + 1].is_error() && rows[i + 1].g2.is_finite();
    if !valid_left || !valid_right {
        return Err(Error::BoundaryMinimum { axis_value: rows[i].axis_value });
    }
    if !refine {
        return Ok((rows[i].axis_value, rows[i].g2));
    }
    let a = rows[i - 1].axis_value;
    let b = rows[i + 1].axis_value;
    let mut objective = SteadyObjective::new(spec);
    let tol = 1e-6 * (b - a).max(1.0);
    let (x, fx) = golden_section(|x| objective.g2(x), a, b, tol)?;
    if rows[i].g2 < fx || (rows[i].g2 == fx && rows[i].axis_value < x) {
        Ok((rows[i].axis_value, rows[i].g2))
    } else {
        Ok((x, fx))
    }
}

/// One side of a region boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionSignature {
    pub label: String,
    pub ordering: String,
}

/// A bisected crossover between two correlation orderings.
#[derive(Debug, Clone)]
pub struct RegionBoundary {
    /// Axis value of the crossover, resolved to [`BOUNDARY_TOL`].
    pub axis_value: f64,
    pub below: RegionSignature,
    pub above: RegionSignature,
}

/// Outcome of a boundary scan.
#[derive(Debug, Clone)]
pub struct BoundaryScan {
    pub boundaries: Vec<RegionBoundary>,
    pub warnings: Vec<String>,
}

fn row_signature(row: &ResultRow) -> Option<RegionSignature> {
    if row.is_error() {
        return None;
    }
    if !(row.g2.is_finite() && row.g3.is_finite() && row.g4.is_finite()) {
        return None;
    }
    let (label, ordering) = classify(row.g2, row.g3, row.g4);
    Some(RegionSignature { label: label.as_str().to_string(), ordering })
}

fn report_signature(report: &CorrelationReport) -> RegionSignature {
    RegionSignature {
        label: report.region_label.to_string(),
        ordering: report.ordering.clone(),
    }
}

/// Bisects every ordering change in a completed detuning sweep.
///
/// `rows` must come from a sweep of at least 200 points so no region is
/// skipped between neighbouring grid points. Each sign change is narrowed
/// to [`BOUNDARY_TOL`] on the axis by re-solving at interval midpoints.
/// Fewer than two distinct orderings on the grid yields a warning instead
/// of boundaries.
pub fn locate_region_boundaries(spec: &SweepSpec, rows: &[ResultRow]) -> Result<BoundaryScan> {
    spec.validate()?;
    if spec.axis != SweepAxis::Delta {
        return Err(Error::Config(
            "boundary location is defined for detuning sweeps".into(),
        ));
    }
    if !spec.outputs.contains(&OutputKind::G2)
        || !spec.outputs.contains(&OutputKind::G3)
        || !spec.outputs.contains(&OutputKind::G4)
    {
        return Err(Error::Config(
            "boundary location needs g2, g3 and g4 in the sweep outputs".into(),
        ));
    }
    if rows.len() < 200 {
        return Err(Error::Config(format!(
            "boundary location needs at least 200 grid rows, got {}",
            rows.len()
        )));
    }
    let mut warnings = Vec::new();
    let mut distinct: Vec<&str> = Vec::new();
    let signatures: Vec<Option<RegionSignature>> = rows.iter().map(row_signature).collect();
    for sig in signatures.iter().flatten() {
        if !distinct.iter().any(|s| *s == sig.ordering) {
            distinct.push(&sig.ordering);
        }
    }
    if distinct.len() < 2 {
        warnings.push(
            "classification degenerate: fewer than two orderings on the grid".to_string(),
        );
        return Ok(BoundaryScan { boundaries: Vec::new(), warnings });
    }
    let failed = signatures.iter().filter(|s| s.is_none()).count();
    if failed > 0 {
        warnings.push(format!("{failed} grid rows failed and were skipped"));
    }
    let mut objective = SteadyObjective::new(spec);
    let mut boundaries = Vec::new();
    for i in 0..rows.len() - 1 {
        let (left, right) = match (&signatures[i], &signatures[i + 1]) {
            (Some(l), Some(r)) => (l, r),
            _ => continue,
        };
        if left.ordering == right.ordering {
            continue;
        }
        let mut lo = rows[i].axis_value;
        let mut hi = rows[i + 1].axis_value;
        let mut hi_sig = right.clone();
        while hi - lo > BOUNDARY_TOL {
            let mid = 0.5 * (lo + hi);
            let sig = report_signature(&objective.report(mid)?);
            if sig.ordering == left.ordering {
                lo = mid;
            } else {
                hi = mid;
                hi_sig = sig;
            }
        }
        if hi_sig.ordering != right.ordering {
            warnings.push(format!(
                "interval [{}, {}] contains more than one crossover",
                rows[i].axis_value,
                rows[i + 1].axis_value
            ));
        }
        boundaries.push(RegionBoundary {
            axis_value: 0.5 * (lo + hi),
            below: left.clone(),
            above: hi_sig,
        });
    }
    Ok(BoundaryScan { boundaries, warnings })
}

/// Pinned column header of the sweep CSV format.
pub const CSV_HEADER: &str = "axis,mean_phonon,g2,g3,g4,log10_g2,log10_g3,log10_g4,region";

/// Serialises rows to the sweep CSV format.
///
/// Floats are written in scientific notation with 17 significant digits so
/// parsing reproduces them bit-exactly; NaN and infinities round-trip too.
/// Lines end with a bare line feed on every platform.
pub fn csv_string(rows: &[ResultRow]) -> String {
    let mut out = String::with_capacity(64 + rows.len() * 200);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let _ = write!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
            row.axis_value,
            row.mean_phonon,
            row.g2,
            row.g3,
            row.g4,
            row.log10_g2,
            row.log10_g3,
            row.log10_g4,
            row.region_label
        );
    }
    out
}

/// Writes rows to `path` in the sweep CSV format.
pub fn emit_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    std::fs::write(path, csv_string(rows)).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_field(line_no: usize, field: &str) -> Result<f64> {
    field.parse::<f64>().map_err(|_| {
        Error::Config(format!("line {line_no}: unparseable number {field:?}"))
    })
}

/// Parses the sweep CSV format produced by [`emit_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => {
            return Err(Error::Config(format!(
                "unrecognised CSV header {:?}",
                other.unwrap_or("")
            )))
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let line_no = idx + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(Error::Config(format!(
                "line {line_no}: expected 9 fields, got {}",
                fields.len()
            )));
        }
        rows.push(ResultRow {
            axis_value: parse_field(line_no, fields[0])?,
            mean_phonon: parse_field(line_no, fields[1])?,
            g2: parse_field(line_no, fields[2])?,
            g3: parse_field(line_no, fields[3])?,
            g4: parse_field(line_no, fields[4])?,
            log10_g2: parse_field(line_no, fields[5])?,
            log10_g3: parse_field(line_no, fields[6])?,
            log10_g4: parse_field(line_no, fields[7])?,
            region_label: fields[8].to_string(),
        });
    }
    Ok(rows)
}
