//! Finite-dimensional Hilbert spaces, operators, and density matrices.
//!
//! A composite space is an ordered list of subsystem dimensions; the first
//! subsystem varies slowest in the Kronecker-product index. Operators carry
//! the space they act on so that algebraic combinations can be checked.

use ndarray::linalg::kron;
use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, Norm, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used for all matrices in this crate.
pub type C64 = Complex64;

/// Hermiticity tolerance for density matrices, in absolute matrix-entry terms.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Allowed deviation of a density-matrix trace from one.
pub const TRACE_TOL: f64 = 1e-9;
/// Most negative eigenvalue a density matrix may have before it is rejected.
pub const POSITIVITY_TOL: f64 = -1e-8;

/// An ordered tensor product of labeled finite-dimensional subsystems.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertSpace {
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl HilbertSpace {
    /// Builds a space from `(label, dimension)` pairs, slowest index first.
    pub fn new(subsystems: &[(&str, usize)]) -> Result<Self> {
        if subsystems.is_empty() {
            return Err(Error::InvalidDimension("space needs at least one subsystem".into()));
        }
        for (k, &(label, dim)) in subsystems.iter().enumerate() {
            if dim < 2 {
                return Err(Error::InvalidDimension(format!(
                    "subsystem '{label}' has dimension {dim}, minimum is 2"
                )));
            }
            if subsystems[..k].iter().any(|&(other, _)| other == label) {
                return Err(Error::InvalidDimension(format!(
                    "duplicate subsystem label '{label}'"
                )));
            }
        }
        Ok(Self {
            dims: subsystems.iter().map(|&(_, d)| d).collect(),
            labels: subsystems.iter().map(|&(l, _)| l.to_string()).collect(),
        })
    }

    /// Single-subsystem space.
    pub fn single(label: &str, dim: usize) -> Result<Self> {
        Self::new(&[(label, dim)])
    }

    /// Product of all subsystem dimensions.
    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Number of subsystems.
    pub fn n_subsystems(&self) -> usize {
        self.dims.len()
    }

    /// Dimension of the subsystem at `position`.
    pub fn dim(&self, position: usize) -> usize {
        self.dims[position]
    }

    /// Label of the subsystem at `position`.
    pub fn label(&self, position: usize) -> &str {
        &self.labels[position]
    }

    /// Position of the subsystem with the given label, if present.
    pub fn position_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Identity operator on the full space.
    pub fn identity(&self) -> Operator {
        Operator {
            space: self.clone(),
            matrix: Array2::eye(self.total_dim()),
        }
    }
}

/// A linear operator on a [`HilbertSpace`], stored dense.
#[derive(Debug, Clone)]
pub struct Operator {
    space: HilbertSpace,
    matrix: Array2<C64>,
}

impl Operator {
    /// Wraps a matrix, checking that it is square and matches the space dimension.
    pub fn new(space: HilbertSpace, matrix: Array2<C64>) -> Result<Self> {
        let d = space.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::InvalidDimension(format!(
                "matrix is {}x{} but the space has dimension {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { space, matrix })
    }

    /// Zero operator on `space`.
    pub fn zeros(space: &HilbertSpace) -> Self {
        let d = space.total_dim();
        Self {
            space: space.clone(),
            matrix: Array2::zeros((d, d)),
        }
    }

    /// The space this operator acts on.
    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Borrow the underlying matrix.
    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    /// Consume into the underlying matrix.
    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    /// Hermitian adjoint.
    pub fn dagger(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.t().mapv(|v| v.conj()),
        }
    }

    /// Matrix product `self * other` on the same space.
    pub fn dot(&self, other: &Operator) -> Self {
        assert_eq!(
            self.space, other.space,
            "operator product requires matching spaces"
        );
        Self {
            space: self.space.clone(),
            matrix: self.matrix.dot(&other.matrix),
        }
    }

    /// Scalar multiple.
    pub fn scale(&self, factor: C64) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.mapv(|v| v * factor),
        }
    }

    /// Sum of two operators on the same space.
    pub fn add(&self, other: &Operator) -> Self {
        assert_eq!(self.space, other.space, "operator sum requires matching spaces");
        Self {
            space: self.space.clone(),
            matrix: &self.matrix + &other.matrix,
        }
    }

    /// Difference of two operators on the same space.
    pub fn sub(&self, other: &Operator) -> Self {
        assert_eq!(
            self.space, other.space,
            "operator difference requires matching spaces"
        );
        Self {
            space: self.space.clone(),
            matrix: &self.matrix - &other.matrix,
        }
    }

    /// Commutator `[self, other]`.
    pub fn commutator(&self, other: &Operator) -> Self {
        self.dot(other).sub(&other.dot(self))
    }

    /// Trace.
    pub fn trace(&self) -> C64 {
        self.matrix.diag().sum()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// True when `self` equals its adjoint within `tol` per entry.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = self.dim();
        for i in 0..d {
            for j in i..d {
                if (self.matrix[[i, j]] - self.matrix[[j, i]].conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// Annihilation operator `b` on a single mode truncated to `n_trunc` number states,
/// with `<m| b |m+1> = sqrt(m+1)`.
pub fn annihilation(n_trunc: usize) -> Result<Operator> {
    if n_trunc < 2 {
        return Err(Error::InvalidDimension(format!(
            "mode truncation must keep at least 2 levels, got {n_trunc}"
        )));
    }
    let space = HilbertSpace::single("mode", n_trunc)?;
    let mut m = Array2::zeros((n_trunc, n_trunc));
    for k in 1..n_trunc {
        m[[k - 1, k]] = C64::new((k as f64).sqrt(), 0.0);
    }
    Operator::new(space, m)
}

/// Creation operator `b†`, the adjoint of [`annihilation`].
pub fn creation(n_trunc: usize) -> Result<Operator> {
    Ok(annihilation(n_trunc)?.dagger())
}

/// Number operator `b† b`.
pub fn number(n_trunc: usize) -> Result<Operator> {
    let space = HilbertSpace::single("mode", n_trunc)?;
    let mut m = Array2::zeros((n_trunc, n_trunc));
    for k in 0..n_trunc {
        m[[k, k]] = C64::new(k as f64, 0.0);
    }
    Operator::new(space, m)
}

/// Two-level raising, lowering, and inversion operators `(σ₊, σ₋, σ_z)` in the
/// basis `{|g> = e_0, |e> = e_1}`, so `σ₊|g> = |e>` and `σ_z = |e><e| - |g><g|`.
pub fn pauli_ops() -> (Operator, Operator, Operator) {
    let space = HilbertSpace::single("atom", 2).expect("two-level space");
    let mut sp = Array2::zeros((2, 2));
    sp[[1, 0]] = C64::new(1.0, 0.0);
    let mut sm = Array2::zeros((2, 2));
    sm[[0, 1]] = C64::new(1.0, 0.0);
    let mut sz = Array2::zeros((2, 2));
    sz[[0, 0]] = C64::new(-1.0, 0.0);
    sz[[1, 1]] = C64::new(1.0, 0.0);
    (
        Operator { space: space.clone(), matrix: sp },
        Operator { space: space.clone(), matrix: sm },
        Operator { space, matrix: sz },
    )
}

/// Lifts a single-subsystem operator into `target` at `position`, tensoring
/// identities on every other slot.
pub fn embed(op: &Operator, target: &HilbertSpace, position: usize) -> Result<Operator> {
    if position >= target.n_subsystems() {
        return Err(Error::InvalidEmbedding(format!(
            "position {position} out of range for a {}-subsystem space",
            target.n_subsystems()
        )));
    }
    if op.space.n_subsystems() != 1 {
        return Err(Error::InvalidEmbedding(
            "only single-subsystem operators can be embedded".into(),
        ));
    }
    if op.dim() != target.dim(position) {
        return Err(Error::InvalidEmbedding(format!(
            "operator dimension {} does not match subsystem '{}' dimension {}",
            op.dim(),
            target.label(position),
            target.dim(position)
        )));
    }
    let mut m = Array2::eye(1);
    for k in 0..target.n_subsystems() {
        if k == position {
            m = kron(&m, &op.matrix);
        } else {
            m = kron(&m, &Array2::eye(target.dim(k)));
        }
    }
    Operator::new(target.clone(), m)
}

/// A density matrix: Hermitian, unit-trace, positive within tolerance.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    space: HilbertSpace,
    matrix: Array2<C64>,
}

impl DensityMatrix {
    /// Wraps and validates a matrix as a physical state.
    pub fn new(space: HilbertSpace, matrix: Array2<C64>) -> Result<Self> {
        let d = space.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::InvalidDimension(format!(
                "state is {}x{} but the space has dimension {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let rho = Self { space, matrix };
        rho.validate()?;
        Ok(rho)
    }

    /// Pure state `|psi><psi|` from a normalized or unnormalized ket.
    pub fn from_pure(space: HilbertSpace, ket: &Array1<C64>) -> Result<Self> {
        let d = space.total_dim();
        if ket.len() != d {
            return Err(Error::InvalidDimension(format!(
                "ket has length {} but the space has dimension {d}",
                ket.len()
            )));
        }
        let norm = ket.norm_l2();
        if norm == 0.0 {
            return Err(Error::InvalidDimension("ket is the zero vector".into()));
        }
        let psi = ket.mapv(|v| v / C64::new(norm, 0.0));
        let mut m = Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                m[[i, j]] = psi[i] * psi[j].conj();
            }
        }
        Self::new(space, m)
    }

    /// Ground state `|0...0><0...0|` of the full space.
    pub fn ground(space: &HilbertSpace) -> Self {
        let d = space.total_dim();
        let mut m = Array2::zeros((d, d));
        m[[0, 0]] = C64::new(1.0, 0.0);
        Self {
            space: space.clone(),
            matrix: m,
        }
    }

    /// The space this state lives on.
    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    /// Borrow the underlying matrix.
    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    /// Consume into the underlying matrix.
    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    /// Trace of the state.
    pub fn trace(&self) -> C64 {
        self.matrix.diag().sum()
    }

    /// Checks hermiticity, unit trace, and positivity within the module tolerances.
    pub fn validate(&self) -> Result<()> {
        let d = self.matrix.nrows();
        for i in 0..d {
            for j in i..d {
                let dev = (self.matrix[[i, j]] - self.matrix[[j, i]].conj()).norm();
                if dev > HERMITICITY_TOL {
                    return Err(Error::InvalidDimension(format!(
                        "state is not Hermitian: |rho[{i},{j}] - conj(rho[{j},{i}])| = {dev:.3e}"
                    )));
                }
            }
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidDimension(format!(
                "state trace {tr} deviates from 1 beyond tolerance"
            )));
        }
        let min_eig = self.min_eigenvalue()?;
        if min_eig < POSITIVITY_TOL {
            return Err(Error::TruncationTooSmall { min_eigenvalue: min_eig });
        }
        Ok(())
    }

    /// Smallest eigenvalue of the Hermitian part of the state.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let herm = (&self.matrix + &self.matrix.t().mapv(|v| v.conj())).mapv(|v| 0.5 * v);
        let (eigs, _) = herm.eigh(UPLO::Lower)?;
        Ok(eigs.iter().cloned().fold(f64::INFINITY, f64::min))
    }
}

/// Expectation value `tr(op · rho)`.
pub fn expectation(op: &Operator, rho: &DensityMatrix) -> Result<C64> {
    if op.space != rho.space {
        return Err(Error::InvalidDimension(format!(
            "operator dimension {} does not match state dimension {}",
            op.dim(),
            rho.matrix.nrows()
        )));
    }
    let d = op.dim();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..d {
        for k in 0..d {
            acc += op.matrix[[i, k]] * rho.matrix[[k, i]];
        }
    }
    Ok(acc)
}
