pub mod drift;
pub mod error;
pub mod montecarlo;
pub mod path;
pub mod processes;
pub mod rng;
pub mod skorokhod;
pub mod stats;
pub mod wiener;

pub use error::{Error, Result};
pub use path::{modulus_of_continuity, running_min, Path, StepFunction, TimeGrid};
pub use rng::{Channel, RngStream};
pub use skorokhod::{
    ladder_transform, occupation_local_time, skorokhod_map, LadderPath, Side, SkorokhodSolution,
};
pub use wiener::sample_wiener;
