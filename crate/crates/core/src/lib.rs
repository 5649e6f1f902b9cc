//! Permutation groups, colored-digraph canonical forms and Cayley-isomorphism
//! machinery for small abelian groups.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod abgroups;
pub mod ci;
pub mod error;
pub mod graphs;
pub mod group;
pub mod perm;
pub mod pipeline;
pub mod two_closure;

pub use error::{Error, Result};
pub use group::{PermGroup, StabChain};
pub use perm::Perm;
