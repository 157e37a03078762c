//! Lindblad generator assembly.
//!
//! The master equation
//!
//! ```text
//! d rho / dt = -i [H, rho] + sum_k r_k D[L_k] rho,
//! D[L] rho = L rho L† - (L†L rho + rho L†L) / 2
//! ```
//!
//! is represented two ways: as a dense superoperator acting on
//! column-stacked states (`vec(rho)[j*d + i] = rho[i, j]`, so
//! `vec(A rho B) = (Bᵀ ⊗ A) vec(rho)`), and as a [`MasterEquation`] that
//! applies the right-hand side directly to a `d × d` matrix through sparse
//! factors, which is far cheaper inside integrators and refinement loops.

use ndarray::linalg::kron;
use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{C64, HilbertSpace, Operator};

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J / K.
pub const K_BOLTZMANN: f64 = 1.380_649e-23;

/// Bose-Einstein occupation `1 / (exp(hbar omega / kB T) - 1)` for an angular
/// frequency in rad/s and a temperature in kelvin. Zero at `T = 0`.
pub fn thermal_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::InvalidFrequency(format!(
            "thermal occupation needs omega > 0, got {omega}"
        )));
    }
    if temperature < 0.0 {
        return Err(Error::InvalidFrequency(format!(
            "temperature must be nonnegative, got {temperature}"
        )));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * omega / (K_BOLTZMANN * temperature);
    Ok(1.0 / x.exp_m1())
}

/// Column-stacks a matrix into a vector: `v[j*d + i] = m[i, j]`.
pub fn vectorize(m: &Array2<C64>) -> Array1<C64> {
    let d = m.nrows();
    let mut v = Array1::zeros(d * d);
    for j in 0..d {
        for i in 0..d {
            v[j * d + i] = m[[i, j]];
        }
    }
    v
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &Array1<C64>, d: usize) -> Array2<C64> {
    let mut m = Array2::zeros((d, d));
    for j in 0..d {
        for i in 0..d {
            m[[i, j]] = v[j * d + i];
        }
    }
    m
}

/// A jump operator together with its nonnegative rate.
#[derive(Debug, Clone)]
pub struct CollapseChannel {
    op: Operator,
    rate: f64,
}

impl CollapseChannel {
    /// Pairs a jump operator with a rate, rejecting negative or non-finite rates.
    pub fn new(op: Operator, rate: f64) -> Result<Self> {
        if !rate.is_finite() || rate < 0.0 {
            return Err(Error::InvalidDimension(format!(
                "collapse rate must be finite and nonnegative, got {rate}"
            )));
        }
        Ok(Self { op, rate })
    }

    /// The jump operator.
    pub fn op(&self) -> &Operator {
        &self.op
    }

    /// The damping rate.
    pub fn rate(&self) -> f64 {
        self.rate
    }
}

/// Superoperator matrix of the dissipator `D[op]` under column stacking:
/// `conj(op) ⊗ op − (I ⊗ op†op + (op†op)ᵀ ⊗ I) / 2`.
pub fn dissipator(op: &Operator) -> Array2<C64> {
    let d = op.dim();
    let o = op.matrix();
    let o_conj = o.mapv(|v| v.conj());
    let odag_o = op.dagger().dot(op);
    let n = odag_o.matrix();
    let eye = Array2::<C64>::eye(d);
    let half = C64::new(0.5, 0.0);
    let mut s = kron(&o_conj, o);
    s = s - kron(&eye, n).mapv(|v| v * half);
    s = s - kron(&n.t().to_owned(), &eye).mapv(|v| v * half);
    s
}

/// Dense Lindblad superoperator on the column-stacked state space.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    space: HilbertSpace,
    matrix: Array2<C64>,
}

impl Liouvillian {
    /// The Hilbert space the generator acts on.
    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    /// Hilbert-space dimension `d` (the matrix is `d² × d²`).
    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    /// Borrow the superoperator matrix.
    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    /// Applies the generator to a density-matrix-shaped argument.
    pub fn apply(&self, rho: &Array2<C64>) -> Array2<C64> {
        let d = self.dim();
        let v = vectorize(rho);
        let w = self.matrix.dot(&v);
        unvectorize(&w, d)
    }
}

/// Assembles `L = -i(I ⊗ H - Hᵀ ⊗ I) + Σ_k rate_k · dissipator(op_k)` under
/// column stacking.
pub fn build_liouvillian(h: &Operator, channels: &[CollapseChannel]) -> Result<Liouvillian> {
    for c in channels {
        if c.op.space() != h.space() {
            return Err(Error::InvalidDimension(format!(
                "jump operator dimension {} does not match Hamiltonian dimension {}",
                c.op.dim(),
                h.dim()
            )));
        }
    }
    let d = h.dim();
    let eye = Array2::<C64>::eye(d);
    let hm = h.matrix();
    let minus_i = C64::new(0.0, -1.0);
    let mut l = (kron(&eye, hm) - kron(&hm.t().to_owned(), &eye)).mapv(|v| v * minus_i);
    for c in channels {
        if c.rate == 0.0 {
            continue;
        }
        let rate = C64::new(c.rate, 0.0);
        l = l + dissipator(&c.op).mapv(|v| v * rate);
    }
    Ok(Liouvillian {
        space: h.space().clone(),
        matrix: l,
    })
}

/// Compressed sparse rows over the exact nonzero entries of a dense matrix.
#[derive(Debug, Clone)]
pub(crate) struct Csr {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<C64>,
}

impl Csr {
    pub(crate) fn from_dense(m: &Array2<C64>) -> Self {
        let n = m.nrows();
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        indptr.push(0);
        for i in 0..n {
            for j in 0..n {
                let v = m[[i, j]];
                if v != Complex64::new(0.0, 0.0) {
                    indices.push(j);
                    data.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Self { n, indptr, indices, data }
    }

    /// `out += scale * self · b` for dense `b`.
    pub(crate) fn left_mul_add(&self, b: &Array2<C64>, scale: C64, out: &mut Array2<C64>) {
        let bs = b.as_slice().expect("contiguous matrix");
        let os = out.as_slice_mut().expect("contiguous matrix");
        let n = self.n;
        for i in 0..n {
            let row = &mut os[i * n..(i + 1) * n];
            for p in self.indptr[i]..self.indptr[i + 1] {
                let k = self.indices[p];
                let v = self.data[p] * scale;
                let bk = &bs[k * n..(k + 1) * n];
                for (r, bv) in row.iter_mut().zip(bk.iter()) {
                    *r += v * bv;
                }
            }
        }
    }

    /// `out += scale * b · self` for dense `b`.
    pub(crate) fn right_mul_add(&self, b: &Array2<C64>, scale: C64, out: &mut Array2<C64>) {
        let bs = b.as_slice().expect("contiguous matrix");
        let os = out.as_slice_mut().expect("contiguous matrix");
        let n = self.n;
        for k in 0..n {
            for p in self.indptr[k]..self.indptr[k + 1] {
                let j = self.indices[p];
                let v = self.data[p] * scale;
                for i in 0..n {
                    os[i * n + j] += bs[i * n + k] * v;
                }
            }
        }
    }
}

/// A single-frequency rotating Hamiltonian term
/// `amplitude * (op e^{i freq t} + op† e^{-i freq t})`.
#[derive(Debug, Clone)]
pub struct RotatingDrive {
    pub op: Operator,
    pub amplitude: f64,
    pub frequency: f64,
}

impl RotatingDrive {
    /// The term evaluated at time `t`, as a Hermitian operator.
    pub fn at(&self, t: f64) -> Operator {
        let phase = C64::new(0.0, self.frequency * t).exp() * C64::new(self.amplitude, 0.0);
        self.op
            .scale(phase)
            .add(&self.op.dagger().scale(phase.conj()))
    }
}

/// A Lindblad generator kept in structural form for fast application.
///
/// Stores the effective drift `K = -iH - (1/2) Σ_k r_k L_k†L_k` and the jump
/// operators, so the right-hand side can be evaluated as
/// `K rho + rho K† + Σ_k r_k L_k rho L_k†` without touching the `d² × d²`
/// superoperator.
#[derive(Debug, Clone)]
pub struct MasterEquation {
    space: HilbertSpace,
    hamiltonian: Operator,
    channels: Vec<CollapseChannel>,
    drift: Csr,
    drift_dag: Csr,
    jumps: Vec<(Csr, Csr, f64)>,
}

impl MasterEquation {
    /// Captures a Hamiltonian and channel set in applicable form.
    pub fn new(h: Operator, channels: Vec<CollapseChannel>) -> Result<Self> {
        for c in &channels {
            if c.op.space() != h.space() {
                return Err(Error::InvalidDimension(format!(
                    "jump operator dimension {} does not match Hamiltonian dimension {}",
                    c.op.dim(),
                    h.dim()
                )));
            }
        }
        let minus_i = C64::new(0.0, -1.0);
        let mut k = h.scale(minus_i);
        for c in &channels {
            if c.rate == 0.0 {
                continue;
            }
            let n = c.op.dagger().dot(&c.op);
            k = k.sub(&n.scale(C64::new(0.5 * c.rate, 0.0)));
        }
        let drift = Csr::from_dense(k.matrix());
        let drift_dag = Csr::from_dense(k.dagger().matrix());
        let jumps = channels
            .iter()
            .filter(|c| c.rate > 0.0)
            .map(|c| {
                (
                    Csr::from_dense(c.op.matrix()),
                    Csr::from_dense(c.op.dagger().matrix()),
                    c.rate,
                )
            })
            .collect();
        Ok(Self {
            space: h.space().clone(),
            hamiltonian: h,
            channels,
            drift,
            drift_dag,
            jumps,
        })
    }

    /// The Hilbert space the generator acts on.
    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    /// The static Hamiltonian.
    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    /// The channel set.
    pub fn channels(&self) -> &[CollapseChannel] {
        &self.channels
    }

    /// Evaluates the right-hand side into `out`; `tmp` is caller-provided scratch.
    pub fn apply_into(&self, rho: &Array2<C64>, out: &mut Array2<C64>, tmp: &mut Array2<C64>) {
        let one = C64::new(1.0, 0.0);
        out.fill(C64::new(0.0, 0.0));
        self.drift.left_mul_add(rho, one, out);
        self.drift_dag.right_mul_add(rho, one, out);
        for (l, ldag, rate) in &self.jumps {
            tmp.fill(C64::new(0.0, 0.0));
            l.left_mul_add(rho, one, tmp);
            ldag.right_mul_add(tmp, C64::new(*rate, 0.0), out);
        }
    }

    /// Evaluates the right-hand side, allocating the result.
    pub fn apply(&self, rho: &Array2<C64>) -> Array2<C64> {
        let d = self.dim();
        let mut out = Array2::zeros((d, d));
        let mut tmp = Array2::zeros((d, d));
        self.apply_into(rho, &mut out, &mut tmp);
        out
    }

    /// Assembles the dense superoperator for this generator.
    pub fn liouvillian(&self) -> Result<Liouvillian> {
        build_liouvillian(&self.hamiltonian, &self.channels)
    }
}
