//! Fully dynamic approximate maximum matching.
//!
//! The engine maintains a random-greedy maximal matching `M_0` of the whole
//! graph, splits it into rank levels, grows bipartite second-stage graphs per
//! level whose greedy matchings `M_1..M_L` expose length-3 augmenting paths,
//! and keeps a near-maximum matching of the bounded-degree union
//! `M_0 ∪ ... ∪ M_L` as the answer.
//!
//! Module map:
//! - [`rank`], [`graph`]: identities, rank space, the dynamic graph and its
//!   random tape.
//! - [`rgmm`]: greedy matching of one graph/ranking pair under updates.
//! - [`pipeline`]: the full level structure and its update procedure.
//! - [`final_match`]: bounded-depth augmenting-path matcher on the union.
//! - [`oracle`]: exact matching, static reference construction and the
//!   statistical validators.

pub mod error;
pub mod final_match;
pub mod graph;
pub mod oracle;
pub mod pipeline;
pub mod rank;
pub mod rgmm;

pub use error::{FinalMatchError, GraphError, MatchingError, OracleError, PipelineError};
pub use graph::{EdgeRecord, Instance, InstanceConfig, LevelMap, Side, VertexTape};
pub use rank::{EdgeKey, Rank, VertexId};
pub use pipeline::{LevelState, Pipeline, Update, UpdateReport, VertexRole};
pub use rgmm::{DeltaList, MatchingState};
