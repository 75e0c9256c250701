//! Entanglement measures for a few qubits and numerical checks of how
//! entanglement is shared among them.
//!
//! * [`qstate`]: pure states, density matrices, partial traces, spin flip,
//!   Haar sampling and the JSON state format.
//! * [`tangle2`]: two-qubit tangle, concurrence and entanglement of formation.
//! * [`three_tangle`]: the permutation-invariant three-way tangle and its
//!   equivalent forms.
//! * [`monogamy`]: checks of `tau_AB + tau_AC <= tau_A(BC)` and related
//!   identities, single-state and batched.
//! * [`convex_roof`]: upper bounds on the minimal average `tau_A(BC)` over
//!   pure-state decompositions of a mixed three-qubit state.

pub mod convex_roof;
pub mod error;
pub mod linalg;
pub mod monogamy;
pub mod qstate;
pub mod rng;
pub mod tangle2;
pub mod three_tangle;

pub use error::{Error, Result};
pub use qstate::{DensityMatrix, PureState, StateFile};
