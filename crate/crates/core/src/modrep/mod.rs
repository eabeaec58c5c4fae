//! Modular representation theory of the constant part: Hom spaces, the
//! Jacobson radical, simples with projective covers, and summand counting.

mod decompose;
mod local;
mod module;
mod radical;

pub use decompose::{
    decompose_module, indecomposable_summands, simples_and_projective_covers, split_once,
    DecompositionReport, RepresentationData, SimpleProjectiveDatum,
};
pub use local::{pairing_rank, summand_multiplicity, summand_multiplicity_with, LocalEnd};
pub use module::{algebra_image, hom_space, KGModule};
pub use radical::{jacobson_radical, radical_of_matrix_algebra, Algebra};
