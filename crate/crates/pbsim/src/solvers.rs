//! Steady-state and time-domain solvers for the master equation.
//!
//! The steady state solves `L vec(rho) = 0` with the trace constraint by
//! replacing the first row of `L` with the vectorized trace row and solving
//! against `e_1` via LU with partial pivoting. Sweeps reuse one factorization
//! per grid neighborhood and polish every nearby point by iterative
//! refinement, which turns each additional point into a handful of cheap
//! triangular solves.
//!
//! Time evolution is classical fixed-step RK4 on the density matrix, with the
//! right-hand side applied through the sparse structural form of the
//! generator rather than the dense superoperator.

use ndarray::{Array1, Array2, OwnedRepr};
use ndarray_linalg::solve::LUFactorized;
use ndarray_linalg::{FactorizeInto, OperationNorm, ReciprocalConditionNum, Solve, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{C64, DensityMatrix, HilbertSpace, Operator};
use crate::liouvillian::{
    CollapseChannel, Csr, Liouvillian, MasterEquation, RotatingDrive, unvectorize,
};

/// Condition-number estimate above which the trace-augmented system is
/// treated as degenerate and the SVD fallback takes over.
const CONDITION_LIMIT: f64 = 1e14;
/// Required steady-state residual `|| L vec(rho) ||_2`.
const STEADY_RESIDUAL_TOL: f64 = 1e-10;
/// Refinement target for the max-abs residual of the augmented system.
const REFINE_TOL: f64 = 1e-12;
/// Trace drift at which the integrator aborts.
const TRACE_DRIFT_LIMIT: f64 = 1e-6;

/// A time-ordered list of states produced by [`evolve`].
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl Trajectory {
    /// Sample times, strictly increasing.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// States aligned with [`Trajectory::times`].
    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    /// True when the trajectory has no samples.
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// A Hamiltonian that is either constant or carries one rotating term.
#[derive(Debug, Clone)]
pub enum HamiltonianModel {
    Static(Operator),
    Rotating { base: Operator, drive: RotatingDrive },
}

impl HamiltonianModel {
    /// The Hamiltonian evaluated at time `t`.
    pub fn at(&self, t: f64) -> Operator {
        match self {
            HamiltonianModel::Static(h) => h.clone(),
            HamiltonianModel::Rotating { base, drive } => base.add(&drive.at(t)),
        }
    }

    /// The time-independent part.
    pub fn static_part(&self) -> &Operator {
        match self {
            HamiltonianModel::Static(h) => h,
            HamiltonianModel::Rotating { base, .. } => base,
        }
    }

    /// The rotating term, when present.
    pub fn drive(&self) -> Option<&RotatingDrive> {
        match self {
            HamiltonianModel::Static(_) => None,
            HamiltonianModel::Rotating { drive, .. } => Some(drive),
        }
    }

    /// The space the Hamiltonian acts on.
    pub fn space(&self) -> &HilbertSpace {
        self.static_part().space()
    }
}

fn trace_augmented(l: &Liouvillian) -> Array2<C64> {
    let d = l.dim();
    let mut a = l.matrix().clone();
    for col in 0..d * d {
        a[[0, col]] = C64::new(0.0, 0.0);
    }
    for i in 0..d {
        a[[0, i * d + i]] = C64::new(1.0, 0.0);
    }
    a
}

fn unit_rhs(n: usize) -> Array1<C64> {
    let mut b = Array1::zeros(n);
    b[0] = C64::new(1.0, 0.0);
    b
}

fn symmetrize(rho: &Array2<C64>) -> Array2<C64> {
    let herm = rho.t().mapv(|v| v.conj());
    (rho + &herm).mapv(|v| v * C64::new(0.5, 0.0))
}

fn frobenius(m: &Array2<C64>) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn finalize_steady(
    space: &HilbertSpace,
    rho_raw: &Array2<C64>,
    residual: f64,
) -> Result<DensityMatrix> {
    if residual >= STEADY_RESIDUAL_TOL {
        return Err(Error::ResidualTooLarge {
            residual,
            tolerance: STEADY_RESIDUAL_TOL,
        });
    }
    DensityMatrix::new(space.clone(), symmetrize(rho_raw))
}

fn svd_null_state(l: &Liouvillian) -> Result<DensityMatrix> {
    let n = l.dim() * l.dim();
    let (_, s, vt) = l.matrix().svd(false, true)?;
    let vt = vt.ok_or_else(|| Error::Solver("SVD did not return right singular vectors".into()))?;
    let smax = s[0].max(f64::MIN_POSITIVE);
    if n >= 2 && s[n - 2] < 1e-10 * smax {
        return Err(Error::DegenerateSteadyState(format!(
            "kernel dimension exceeds one (second singular value {:.3e} of {:.3e})",
            s[n - 2],
            smax
        )));
    }
    let v = vt.row(n - 1).mapv(|x| x.conj());
    let rho = symmetrize(&unvectorize(&v.to_owned(), l.dim()));
    let tr = rho.diag().sum();
    if tr.norm() < 1e-8 * frobenius(&rho).max(f64::MIN_POSITIVE) {
        return Err(Error::DegenerateSteadyState(
            "kernel vector is traceless; no normalizable steady state".into(),
        ));
    }
    let rho = rho.mapv(|x| x / tr);
    let residual = frobenius(&l.apply(&rho));
    finalize_steady(l.space(), &rho, residual)
}

/// Solves `L vec(rho) = 0` with unit trace.
///
/// The trace-augmented system is LU-factorized; a condition estimate above
/// `1e14` (or an outright singular factorization) falls back to an SVD
/// null-space extraction and reports a degenerate steady state when the
/// kernel is not one-dimensional.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix> {
    let d = l.dim();
    let a = trace_augmented(l);
    let fact = match a.clone().factorize_into() {
        Ok(f) => f,
        Err(_) => return svd_null_state(l),
    };
    let rcond = fact.rcond()?;
    if !(rcond > 1.0 / CONDITION_LIMIT) {
        return svd_null_state(l);
    }
    let b = unit_rhs(d * d);
    let mut x = fact.solve_into(b.clone())?;
    // A bare LU solve is only normwise stable; the occupations of high Fock
    // levels sit many orders below the trace and need the componentwise
    // accuracy that iterative refinement restores.
    for _ in 0..2 {
        let r = &b - &a.dot(&x);
        let dx = fact.solve(&r)?;
        x += &dx;
    }
    let rho = unvectorize(&x, d);
    let residual = frobenius(&l.apply(&rho));
    finalize_steady(l.space(), &rho, residual)
}

/// Steady state of a generator in structural form; assembles the dense
/// superoperator once and defers to [`steady_state`].
pub fn steady_state_of(me: &MasterEquation) -> Result<DensityMatrix> {
    steady_state(&me.liouvillian()?)
}

/// One LU factorization reused as a preconditioner for nearby generators.
///
/// `solve` runs iterative refinement of the trace-augmented system with the
/// reference factorization; it reports `None` when the target generator is
/// too far from the reference for refinement to contract, in which case the
/// caller refactorizes.
pub(crate) struct CachedSteadySolver {
    dim: usize,
    fact: LUFactorized<OwnedRepr<Complex64>>,
}

impl CachedSteadySolver {
    pub(crate) fn new(me: &MasterEquation) -> Result<Self> {
        let l = me.liouvillian()?;
        let fact = trace_augmented(&l)
            .factorize_into()
            .map_err(|e| Error::Solver(format!("reference factorization failed: {e}")))?;
        Ok(Self { dim: me.dim(), fact })
    }

    pub(crate) fn solve(&self, me: &MasterEquation) -> Result<Option<DensityMatrix>> {
        if me.dim() != self.dim {
            return Ok(None);
        }
        let d = self.dim;
        let n = d * d;
        let mut x = self.fact.solve_into(unit_rhs(n))?;
        let mut rhodot = Array2::zeros((d, d));
        let mut tmp = Array2::zeros((d, d));
        let mut r: Array1<C64> = Array1::zeros(n);
        let mut prev_norm = f64::INFINITY;
        let mut stalls = 0u32;
        let mut corrections = 0u32;
        for _ in 0..40 {
            let rho = unvectorize(&x, d);
            me.apply_into(&rho, &mut rhodot, &mut tmp);
            let mut rnorm = 0.0f64;
            for j in 0..d {
                for i in 0..d {
                    let k = j * d + i;
                    r[k] = -rhodot[[i, j]];
                }
            }
            let trace: C64 = rho.diag().sum();
            r[0] = C64::new(1.0, 0.0) - trace;
            for v in r.iter() {
                rnorm = rnorm.max(v.norm());
            }
            // Accepting the bare solve would leave the smallest occupations
            // at normwise accuracy only; one correction pass makes the
            // residual componentwise small.
            if rnorm <= REFINE_TOL && corrections >= 1 {
                let residual = frobenius(&rhodot);
                return finalize_steady(me.space(), &rho, residual).map(Some);
            }
            if rnorm > 0.5 * prev_norm {
                stalls += 1;
                if stalls >= 2 {
                    return Ok(None);
                }
            } else {
                stalls = 0;
            }
            prev_norm = rnorm;
            let dx = self.fact.solve(&r)?;
            x += &dx;
            corrections += 1;
        }
        Ok(None)
    }
}

fn axpy(alpha: C64, x: &Array2<C64>, y: &mut Array2<C64>) {
    let xs = x.as_slice().expect("contiguous");
    let ys = y.as_slice_mut().expect("contiguous");
    for (yv, xv) in ys.iter_mut().zip(xs.iter()) {
        *yv += alpha * xv;
    }
}

struct RhsContext {
    me: MasterEquation,
    drive: Option<(Csr, Csr, f64, f64)>,
    tmp: Array2<C64>,
}

impl RhsContext {
    fn eval(&mut self, t: f64, rho: &Array2<C64>, out: &mut Array2<C64>) {
        self.me.apply_into(rho, out, &mut self.tmp);
        if let Some((v, vdag, amp, freq)) = &self.drive {
            let phase = C64::new(0.0, freq * t).exp();
            let c = C64::new(0.0, -amp) * phase;
            let c2 = C64::new(0.0, -amp) * phase.conj();
            v.left_mul_add(rho, c, out);
            v.right_mul_add(rho, -c, out);
            vdag.left_mul_add(rho, c2, out);
            vdag.right_mul_add(rho, -c2, out);
        }
    }
}

fn spectral_scale(h: &Operator, channels: &[CollapseChannel]) -> Result<f64> {
    let nrm = |m: &Array2<C64>| -> Result<f64> {
        Ok((m.opnorm_one()? * m.opnorm_inf()?).sqrt())
    };
    let mut s = 2.0 * nrm(h.matrix())?;
    for c in channels {
        let l = nrm(c.op().matrix())?;
        s += 2.0 * c.rate() * l * l;
    }
    Ok(s)
}

fn choose_step(
    h: &HamiltonianModel,
    channels: &[CollapseChannel],
    t_grid: &[f64],
    step: Option<f64>,
) -> Result<f64> {
    let freq = h.drive().map(|d| d.frequency).unwrap_or(0.0);
    if let Some(s) = step {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::StepSize(format!("step must be positive, got {s}")));
        }
        if freq > 0.0 && s * freq > 0.1 {
            return Err(Error::StepSize(format!(
                "step {s} does not resolve the drive: step * frequency = {:.3} exceeds 0.1",
                s * freq
            )));
        }
        return Ok(s);
    }
    if let Some(drive) = h.drive() {
        if !(drive.frequency > 0.0) {
            return Err(Error::InvalidFrequency(format!(
                "rotating drive frequency must be positive, got {}",
                drive.frequency
            )));
        }
        return Ok(0.02 / drive.frequency);
    }
    let min_spacing = t_grid
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let scale = spectral_scale(h.static_part(), channels)?;
    if scale <= 0.0 {
        return Ok(min_spacing);
    }
    Ok((0.05 / scale).min(min_spacing))
}

/// Integrates the master equation over `t_grid` with classical RK4,
/// choosing the step automatically: `0.02 / frequency` for rotating
/// Hamiltonians, and a drift-scaled step for static ones.
pub fn evolve(
    h: &HamiltonianModel,
    channels: &[CollapseChannel],
    rho0: &DensityMatrix,
    t_grid: &[f64],
) -> Result<Trajectory> {
    let step = choose_step(h, channels, t_grid, None)?;
    integrate(h, channels, rho0, t_grid, step)
}

/// [`evolve`] with an explicit step, which must still resolve any rotating
/// term (`step * frequency <= 0.1`).
pub fn evolve_with_step(
    h: &HamiltonianModel,
    channels: &[CollapseChannel],
    rho0: &DensityMatrix,
    t_grid: &[f64],
    step: f64,
) -> Result<Trajectory> {
    let step = choose_step(h, channels, t_grid, Some(step))?;
    integrate(h, channels, rho0, t_grid, step)
}

fn integrate(
    h: &HamiltonianModel,
    channels: &[CollapseChannel],
    rho0: &DensityMatrix,
    t_grid: &[f64],
    step: f64,
) -> Result<Trajectory> {
    if t_grid.is_empty() {
        return Err(Error::Config("time grid is empty".into()));
    }
    if t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::Config("time grid contains non-finite values".into()));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("time grid must be strictly increasing".into()));
    }
    if rho0.space() != h.space() {
        return Err(Error::InvalidDimension(
            "initial state does not live on the Hamiltonian's space".into(),
        ));
    }
    let me = MasterEquation::new(h.static_part().clone(), channels.to_vec())?;
    let drive = h.drive().map(|d| {
        (
            Csr::from_dense(d.op.matrix()),
            Csr::from_dense(d.op.dagger().matrix()),
            d.amplitude,
            d.frequency,
        )
    });
    let d = me.dim();
    let mut ctx = RhsContext {
        me,
        drive,
        tmp: Array2::zeros((d, d)),
    };

    let mut rho = rho0.matrix().clone();
    let mut k1 = Array2::zeros((d, d));
    let mut k2 = Array2::zeros((d, d));
    let mut k3 = Array2::zeros((d, d));
    let mut k4 = Array2::zeros((d, d));
    let mut stage = Array2::zeros((d, d));

    let mut times = Vec::with_capacity(t_grid.len());
    let mut states = Vec::with_capacity(t_grid.len());
    times.push(t_grid[0]);
    states.push(DensityMatrix::new(rho0.space().clone(), rho.clone())?);

    for w in t_grid.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let span = t1 - t0;
        let n_steps = (span / step).ceil().max(1.0) as usize;
        let hstep = span / n_steps as f64;
        let half = C64::new(0.5 * hstep, 0.0);
        let sixth = C64::new(hstep / 6.0, 0.0);
        let third = C64::new(hstep / 3.0, 0.0);
        for k in 0..n_steps {
            let t = t0 + k as f64 * hstep;
            ctx.eval(t, &rho, &mut k1);
            stage.assign(&rho);
            axpy(half, &k1, &mut stage);
            ctx.eval(t + 0.5 * hstep, &stage, &mut k2);
            stage.assign(&rho);
            axpy(half, &k2, &mut stage);
            ctx.eval(t + 0.5 * hstep, &stage, &mut k3);
            stage.assign(&rho);
            axpy(C64::new(hstep, 0.0), &k3, &mut stage);
            ctx.eval(t + hstep, &stage, &mut k4);
            axpy(sixth, &k1, &mut rho);
            axpy(third, &k2, &mut rho);
            axpy(third, &k3, &mut rho);
            axpy(sixth, &k4, &mut rho);

            let trace: C64 = rho.diag().sum();
            let drift = (trace - C64::new(1.0, 0.0)).norm();
            if drift > TRACE_DRIFT_LIMIT {
                return Err(Error::StepSize(format!(
                    "trace drift {drift:.3e} at t = {:.6} exceeds {TRACE_DRIFT_LIMIT:.1e}; reduce the step",
                    t + hstep
                )));
            }
        }
        let trace: C64 = rho.diag().sum();
        rho.mapv_inplace(|v| v / trace);
        times.push(t1);
        states.push(DensityMatrix::new(rho0.space().clone(), symmetrize(&rho))?);
    }
    Ok(Trajectory { times, states })
}
