//! Workbench for explicit sparse pseudorandom graphs over finite fields:
//! constructions, forbidden-subgraph certificates, spectral audits, ordering
//! parameters, and the staged embedding engines built on them.

pub mod construct;
pub mod embed;
pub mod field;
pub mod forbid;
pub mod graph;
pub mod order;
pub mod spectral;

pub use construct::{CayleySpec, PointClass, ProjectivePoint};
pub use field::{FieldElement, FieldSpec};
pub use graph::{CertProvenance, EmbedMode, Embedding, Graph, JumbledCert};
pub use order::OrderingCertificate;
pub use spectral::{SpectralMethod, SpectralSummary};
