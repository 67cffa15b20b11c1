//! The streaming model: replayable edge streams, metered passes and fixture generators.

mod format;
mod generate;
pub mod hub;
mod meter;
mod stream;

pub use format::{parse_stream, write_edges, write_stream};
pub use generate::{generate, generate_graph, layer_sizes, Generator, IndexLayout};
pub use hub::{Consumer, Hub, PartId};
pub use meter::{Meter, MeterReport, Pass, StreamSession, WordCount};
pub use stream::{EdgeUpdate, GraphStream, Model};
