//! Simulation of single-qubit dynamics under a generalized PT-symmetric
//! (non-Hermitian) Hamiltonian.
//!
//! The non-unitary evolution e^{−iHt/ħ} is embedded into a two-qubit unitary
//! circuit (an ancilla rotation, two complementary controlled gates, and a
//! Hadamard) and recovered by post-selecting the ancilla in |0⟩. The crate
//! also compiles the circuit to photonic element settings (beam-splitter
//! split ratios and wave-plate chains via Jones calculus) and simulates
//! projective tomography of the post-selected state with Monte Carlo error
//! bars.
//!
//! - [`linalg`]: 2×2/4×4 complex matrices, closed-form and series matrix
//!   exponentials, partial trace, state-overlap metrics.
//! - [`model`]: the Hamiltonian family, phase classification, and the exact
//!   evolution used as the reference for everything else.
//! - [`dilation`]: circuit angles, gate construction, post-selection, and
//!   the executable identity behind the construction.
//! - [`optics`]: NPBS ratios and wave-plate chains realizing the gates.
//! - [`tomo`]: simulated photon-counting tomography with seeded resampling.

pub mod dilation;
pub mod linalg;
pub mod model;
pub mod optics;
pub mod tomo;

#[cfg(test)]
pub(crate) mod testutil;
