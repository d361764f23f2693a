//! Extremal computations on generalized directed hypergraphs (GDHs).
//!
//! A GDH theory fixes an arity `r` and a subgroup `J` of `S_r` acting on
//! tuple positions. A GDH over the theory is a set of vertices `0..n` together
//! with a set of orbit-edges: each edge is an orbit of r-tuples of distinct
//! vertices under `J`, stored by its lexicographically smallest tuple.
//!
//! Modules:
//! - [`perm_group`]: permutations, closures, subgroup enumeration, tuple orbits.
//! - [`graph`]: theories, GDHs, families, density, embeddings and copy counts.
//! - [`lagrangian`]: blowups, edge polynomials and blowup-density optimization.
//! - [`extremal`]: exact extremal numbers by branch and bound.
//! - [`lattice`]: moving graphs and families between nested theories.
//! - [`jump`]: jump certificates, degeneracy witnesses and catalogs.
//! - [`io`]: text formats, JSON records and run manifests.
//! - [`cli`]: the `gdh` command-line front end.

pub mod cli;
pub mod error;
pub mod extremal;
pub mod graph;
pub mod io;
pub mod jump;
pub mod lagrangian;
pub mod lattice;
pub mod perm_group;

pub use error::{GdhError, Result};
pub use graph::{Family, Gdh, Theory};
pub use perm_group::{Permutation, PermutationGroup};
