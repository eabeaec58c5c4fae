//! Frobenius pushforward summand structure of invariant rings `S^G` for small
//! linear actions of finite group schemes over finite fields.

pub mod error;
pub mod gf;
pub mod groupscheme;
pub mod modrep;
pub mod polyring;
pub mod equivmod;
pub mod diagmu;
pub mod invariants;
pub mod fsig;
pub mod config;
pub mod cli;

pub use error::{Error, Result};
