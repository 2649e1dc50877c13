//! Weighted finite `ℓ^p` spaces, operators between them, p-norm estimation,
//! semi-inner products, hermitian operators and spatial partial isometries.

mod hermitian;
mod matrix;
mod norm;
mod space;
mod spatial;

pub use hermitian::{dual_operator, expm, is_diagonal_projection, is_hermitian, semi_inner_product, HERMITIAN_SAMPLES};
pub use matrix::Matrix;
pub use norm::{op_norm, op_norm_1, op_norm_inf, op_norm_with_start, NormConfig, NormEstimate};
pub use space::{matrix_from_json, matrix_to_json, LpOperator, OperatorFile, SpaceFile, WeightedLpSpace};
pub use spatial::{
    lamperti_decompose, spatial_compose, spatial_reverse, SpatialEntry, SpatialPartialIsometry, ISOMETRY_TOL,
    SPARSITY_THRESHOLD,
};
