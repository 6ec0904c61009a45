//! Oblivious stream generation, metered replay and validation suites for
//! the dynamic matching engine.

pub mod replay;
pub mod stream;
pub mod validate;

pub use replay::{replay, replay_with, MetricsRecord, ReplayConfig, ReplayError, Summary};
pub use stream::{check_replay_valid, generate_stream, read_stream, write_stream, Generator, Op, StreamError, StreamEvent, StreamSpec};
pub use validate::{audit_replay, run_suite, Checks, ReplayAudit, SuiteParams, SuiteReport, ValidateError};
