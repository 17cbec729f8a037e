pub mod bitseq;
pub mod codec;
pub mod duality;
pub mod error;
pub mod gen;
pub mod minheap;
pub mod mliq;
pub mod parens;
pub mod rmq;
pub mod tree;
pub mod verify;

pub use bitseq::BitSeq;
pub use error::{Error, Label, Result};
pub use parens::{BpSelected, ParenSeq, Tie, WeightSide};
pub use tree::{OrdinalTree, Relative};
