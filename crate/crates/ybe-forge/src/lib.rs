//! Numerical workbench for R-matrices of three-state U(1)-invariant spin chains.
//!
//! `tensor_core` holds the 3^L matrix type. `model_catalog` and
//! `rmatrix_catalog` hold the named Hamiltonians and R-matrices. The other
//! modules are built on those two.

pub mod tensor_core;
pub mod model_catalog;
pub mod rmatrix_catalog;
pub mod verifier;
pub mod reconstructor;
pub mod baxterizer;
pub mod cba_engine;
pub mod cli_reporting;
