//! Toy experiment: 2-D data embedded in `R^D`, decoded by an analytic map that
//! also responds to directions off the data plane.

mod decoder;
mod dist;
mod sweep;

pub use decoder::{Embedding, ToyDecoder};
pub use dist::ToyDistribution;
pub use sweep::{
    run_toy_dim, run_toy_sweep, sort_runs, sweep_rows, ToyCell, ToyDimRun, ToySweepConfig,
    ToySweepRow,
};
