//! Rank-maximal and popular matchings in bipartite graphs where every vertex
//! carries a laminar family of classes, each with its own quota.

pub mod cpm;
pub mod crmm;
pub mod error;
pub mod flow;
pub mod gen;
pub mod instance;
pub mod matching;
pub mod oracle;
pub mod reduction;
pub mod tree;

pub use error::{Error, Result};
pub use instance::{ApplicantId, Edge, Instance, PostId, RawInstance, Side, Vertex};
pub use matching::{is_feasible, signature_of, Matching, Signature};
