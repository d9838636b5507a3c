//! Exact computation in incidence algebras of finite posets, with tools to
//! decide, construct and verify bijective linear maps that preserve products
//! equal to primitive idempotents.

pub mod basis;
pub mod dense;
pub mod error;
pub mod incidence;
pub mod linalg;
pub mod linmaps;
pub mod poset;
pub mod preserver;
pub mod scalars;

pub use basis::BasisOrder;
pub use error::{Error, Result};
pub use incidence::{Algebra, IdempotentClass, IncidenceElement};
pub use linmaps::{AutomorphismDecomposition, Cocycle, LinearMap, PmVerdict};
pub use poset::{Poset, PosetAutomorphism};
pub use scalars::{Field, Fp, Prime, Scalar};
