//! Harmonic analysis on the finite-field cone.
//!
//! The crate builds F_q and F_q^d, the additive-character Fourier transform
//! on `(F_q^d, dx)` / `(F_q^d, dm)`, the cone and its surface measure, the
//! restricted averaging operator with its adjoint, and the test families
//! used to probe `L^p -> L^r` bounds.

pub mod error;
pub mod families;
pub mod field;
pub mod harmonic;
pub mod operators;
pub mod quadric;
pub mod subspace;
pub mod varieties;
pub mod vector;

pub use error::{Error, Result};
pub use families::{generate_family, FamilyMember, TestFamily};
pub use field::{FieldElement, FieldSpec};
pub use harmonic::{
    chi, convolve, fourier_hat, inverse_fourier, lp_norm, surface_norm, FunctionOnSpace,
    MeasureSide, Space,
};
pub use operators::{
    best_ratio, ratio, ConeOperator, Direction, ExponentPair, RatioResult,
};
pub use quadric::{cone_contains, gamma_form};
pub use subspace::{max_subspace_in_cone, Subspace, SubspaceSearch};
pub use varieties::{build_variety, SurfaceMeasure, Variety, VarietyKind};
pub use vector::{IndexCodec, PointVector};
