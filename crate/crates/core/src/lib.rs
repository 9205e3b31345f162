//! All-to-all encode over prime fields under the synchronous p-port model.
//!
//! `K` processors each hold one element `x_k` of `F_q`; afterwards processor
//! `k` holds coordinate `k` of `x · A`. Protocols are state machines driven
//! by the round engine in [`netsim`], which enforces the port limits and
//! meters the round count `C1` and the per-round maximum message sizes `C2`.
//!
//! * [`universal`]: prepare-and-shoot, for any matrix.
//! * [`dft`]: butterfly network for the (digit-reversed) DFT matrix.
//! * [`vandermonde`]: structured Vandermonde matrices, their inverses and
//!   Lagrange matrices.
//! * [`orchestrate`]: `K x N` encodes on `N` processors.
//! * [`bounds`]: lower bounds and closed-form predictions.

pub mod bounds;
pub mod dft;
pub mod error;
pub mod gf;
pub mod linalg;
pub mod netsim;
pub mod orchestrate;
pub mod universal;
pub mod vandermonde;

pub use bounds::{bound_report, predict_costs, Algorithm, BoundReport};
pub use dft::{dft_params, run_dft, DftParams, TransformDirection};
pub use error::{Error, Result};
pub use gf::{Fe, PrimeField};
pub use linalg::{mat_vec_mul, MatrixFq};
pub use netsim::{run, CostReport, Protocol, SystemConfig, TraceEntry, Violation};
pub use orchestrate::run_orchestrated;
pub use universal::{ps_params, run_universal, PSParams, PrepareAndShoot};
pub use vandermonde::{run_lagrange, run_vandermonde, target_matrix, vdm_params, VdmParams};
