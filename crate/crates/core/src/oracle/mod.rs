//! Brute-force reference: the coupled electron–field Schrödinger equation in
//! a truncated number basis times a momentum grid, propagated exactly block
//! by block. Nothing here uses the closed-form results.

pub mod fock;
pub mod grid;
pub mod observe;
pub mod propagate;
pub mod run;
pub mod tridiag;

pub use fock::{initial_field_vector, FockBasis, InitialField};
pub use grid::{GaussianPacket, MomentumGrid};
pub use observe::{field_quadrature_stats, observables, observables_fd, overlap_f, Moments, RawMoments};
pub use propagate::{build_hamiltonian_block, JointState, Propagator};
pub use run::{write_csv, Oracle, OracleSample, OracleSetup};
