pub mod decay;
pub mod error;
pub mod field;
pub mod gallery;
pub mod ideal;
pub mod lift;
pub mod linalg;
pub mod par;
pub mod poly;
pub mod random;
pub mod tower;
pub mod truncate;

pub use decay::{DecayStream, FinFn, LevelStream, StreamSpec};
pub use error::{Error, Result};
pub use field::{Coeff, Field};
pub use ideal::{AdicIdeal, DyadicDistance, OrderValue, VariableSet};
pub use poly::{parse_poly, Monomial, Polynomial};
pub use tower::{theorem6_check, TowerElement, WitnessStrategy};
pub use truncate::{ModulePresentation, TruncatedElement};
