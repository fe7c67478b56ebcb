//! Order-, fence- and parity-preserving partial injections of {1..n}: membership,
//! generators, the relation schema, normal forms, rewriting and canonical words.

pub mod canonical;
pub mod error;
pub mod limits;
pub mod monoid;
pub mod normalform;
pub mod points;
pub mod relations;
pub mod rewriter;
pub mod transformation;
pub mod verify;
pub mod word;

pub use error::{Error, Result};
pub use limits::Limits;
pub use points::PointSet;
pub use transformation::PartialInjection;
pub use word::{Block, BlockKind, Letter, LetterKind, Word};
