//! An adaptive interior-penalty discontinuous Galerkin engine for the
//! linearized bending of creased elastic sheets: a fourth-order plate
//! problem with transmission conditions across a fold curve, discretized
//! with P_k elements (k = 2..4) on crease-fitted triangulations.

pub mod adapt;
pub mod assemble;
pub mod bench;
pub mod error;
pub mod estimate;
pub mod linalg;
pub mod mesh;
pub mod space;
pub mod theory;
pub mod vtk;
