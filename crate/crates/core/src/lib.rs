//! Exact verification of finite central-binomial and Catalan sum identities, together with the
//! integral machinery used to derive them.

pub mod catalog;
pub mod dsl;
pub mod error;
pub mod eval;
pub mod exact;
pub mod expr;
pub mod integrals;
pub mod numeric;
pub mod numeric_eval;
pub mod oracle;
pub mod quadrature;
pub mod report;
pub mod special;
pub mod transform;
pub mod verify;

pub use num_rational;
pub use error::{Error, Result};
pub use exact::{ComplexPiValue, PiScalar, PiValue};
pub use expr::{Case, CmpOp, Guard, Identity, Param, ParamBinding, ParamKind, Predicate, SumExpr};
