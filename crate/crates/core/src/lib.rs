//! Constructive search for `k`-th powers of directed paths in tournaments.
//!
//! The pipeline: order the vertices so that few edges point backwards
//! ([`ordering`]), repeatedly extract a transitive `k`-block whose common
//! out-neighbourhood reaches far ahead ([`extraction`]), and chain the blocks
//! into a certified path power ([`builder`]). [`oracle`] provides exact
//! answers on small tournaments to check everything against.

pub mod bitset;
pub mod builder;
pub mod error;
pub mod experiment;
pub mod extraction;
pub mod oracle;
pub mod ordering;
pub mod params;
pub mod tournament;

pub use builder::{
    audit_certificate, build_path_power, certificate_length_bound, BuildOutcome, BuildResult,
    PathPowerCertificate, Strategy,
};
pub use error::{Error, Result};
pub use extraction::{certify_params, extract_step, find_transitive, Certification, StepWitness};
pub use oracle::{ell_exact, longest_path_power, verify_path_power, EllScope, SearchResult};
pub use ordering::{forward_edge_count, local_search, relocation_gain, Ordering, SearchPolicy};
pub use params::{LemmaParams, Mode};
pub use tournament::{gen_implicit, gen_random, gen_transitive, Tournament, Vertex};
