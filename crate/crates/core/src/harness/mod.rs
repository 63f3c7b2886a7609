//! Resource accounting for the pipeline under the semi-streaming and
//! Congested Clique models. Harnesses only count; results are those of the
//! in-memory call.

pub mod clique;
pub mod stream;

pub use clique::{run_congested_clique, CliqueAccount, CliqueBackend};
pub use stream::{run_streaming, EdgeStream, FileStream, MemoryStream, OneShot, StreamAccount, StreamBackend};
