//! Number fields, embeddings, scalar backends and the structure of E (x) F.

pub mod backend;
pub mod ball;
pub mod cyclo;
pub mod decomp;
pub mod emat;
pub mod embed;
pub mod factor;
pub mod matrix;
pub mod modp;
pub mod numfield;
pub mod pair;
pub mod qpoly;
pub mod recognize;
pub mod scalar;

pub use backend::{Backend, BackendSpec};
pub use ball::Ball;
pub use cyclo::{Cyclo, CycloField};
pub use matrix::Matrix;
pub use numfield::{NfElem, NumberField};
pub use qpoly::{q, QPoly};
pub use recognize::Membership;
pub use scalar::{Scalar, ZeroTest};
pub use pair::FieldPair;
