//! Finite étale groupoids, their convolution algebras and representations
//! on weighted `ℓ^p` spaces.
//!
//! Numeric types are generic over the real scalar `T` (`f32` or `f64`);
//! the aliases at the crate root fix `T = f64`.

pub mod bitset;
pub mod bratteli;
pub mod convolution;
pub mod cuntz;
pub mod error;
pub mod groupoid;
pub mod linalg;
pub mod measure;
pub mod representation;
pub mod sample;
pub mod scalar;
pub mod semigroup;

pub use error::{Error, Result};
pub use groupoid::{ArrowId, FiniteGroupoid, ObjectId, Slice};
pub use scalar::{Real, C};

pub type Element = convolution::AlgebraElement<f64>;
pub type Measure = measure::ObjectMeasure<f64>;
pub type Space = linalg::WeightedLpSpace<f64>;
pub type Operator = linalg::LpOperator<f64>;
pub type Mat = linalg::Matrix<f64>;
pub type Spatial = linalg::SpatialPartialIsometry<f64>;
pub type BundleRep = representation::BundleRepresentation<f64>;
pub type Leavitt = cuntz::LeavittPolynomial<f64>;
pub type Tower = bratteli::TowerElement<f64>;
