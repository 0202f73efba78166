//! Three-qubit entanglement dynamics under local Markov noise with tunable
//! pairwise cross-correlations.
//!
//! The crate is organized bottom-up:
//!
//! - [`qmat`]: small dense complex matrices, partial trace/transpose and a
//!   Hermitian Jacobi eigensolver.
//! - [`states`]: Pauli embeddings, the system Hamiltonian and the GHZ/W family.
//! - [`noise`]: the correlation matrix, its positivity test and the PQRS path.
//! - [`liouville`]: the correlated-noise master equation and a fixed-step RK4
//!   integrator.
//! - [`unravel`]: Monte-Carlo unraveling with correlated Gaussian kicks.
//! - [`entangle`]: bipartition, tripartite and pairwise negativities.
//! - [`closedform`]: analytic dephasing results.
//! - [`runner`]: scenarios, scans, CSV/SVG output and configuration.

pub mod closedform;
pub mod entangle;
pub mod error;
pub mod liouville;
pub mod noise;
pub mod qmat;
pub mod runner;
pub mod states;
pub mod unravel;

pub use error::{Error, Result};
pub use qmat::{ComplexMatrix, DensityMatrix, Qubit, C64};
