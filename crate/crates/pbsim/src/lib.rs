//! Steady-state and time-domain simulation of phonon blockade in hybrid
//! atom-optomechanical cavities.
//!
//! The crate models a two-level atom coupled to a nanomechanical mode
//! through a driven cavity field, in two flavours: a single tripartite
//! cavity and a pair of coupled cavities whose antisymmetric supermode
//! carries the interaction. On top of the model builders sit a Lindblad
//! master-equation engine (dense steady-state solver plus a sparse
//! fixed-step integrator), phonon-counting statistics with a blockade
//! classifier, and a batch layer for parameter sweeps, optimum location,
//! and region-boundary scans driven by JSON configuration files.
//!
//! Quantities are expressed in units of the atom damping rate throughout;
//! Hilbert spaces are small by design (a qubit times one truncated
//! bosonic mode), which keeps dense linear algebra the fastest option.
//!
//! # Example
//!
//! ```
//! use pbsim::liouvillian::MasterEquation;
//! use pbsim::models::{build_one_cavity_hamiltonian, one_cavity_channels, OneCavityParams};
//! use pbsim::observables::correlation_report;
//! use pbsim::solvers::steady_state_of;
//!
//! let params = OneCavityParams { n_trunc: 8, ..OneCavityParams::default() };
//! let h = build_one_cavity_hamiltonian(&params).unwrap();
//! let me = MasterEquation::new(h, one_cavity_channels(&params).unwrap()).unwrap();
//! let rho = steady_state_of(&me).unwrap();
//! let report = correlation_report(&rho, 1).unwrap();
//! assert!(report.g2 < 1.0);
//! ```

pub mod config;
pub mod error;
pub mod hilbert;
pub mod liouvillian;
pub mod models;
pub mod observables;
pub mod solvers;
pub mod sweep;

pub use error::{Error, Result};
pub use hilbert::{DensityMatrix, HilbertSpace, Operator, C64};
