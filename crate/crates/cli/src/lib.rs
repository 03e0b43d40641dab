//! Structure documents, checker batteries, constructions and round trips
//! behind the `homalg` command.

pub mod app;
pub mod battery;
pub mod construct;
pub mod doc;
pub mod error;
pub mod export;
pub mod load;
pub mod pipeline;
pub mod report;

pub use app::{run, Execution};
pub use doc::Document;
