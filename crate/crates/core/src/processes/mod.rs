//! Samplers for the processes built on a Wiener path.

pub mod euler;
pub mod hard_membrane;
pub mod hitting;
pub mod ladder;
pub mod passage;
pub mod reflected;
pub mod skew;

pub use euler::{dt_policy_warning, euler_sde, recommended_dt, Barrier, BridgedExit, EulerStepper};
pub use hard_membrane::{sample_hard_membrane, HardMembraneParams, HardMembranePath};
pub use hitting::{first_hitting, Hit};
pub use ladder::{sample_geometric, sample_killed_ladder, KilledLadder};
pub use passage::PassageSampler;
pub use reflected::{sample_reflected_bm, sample_reflected_bm_with, Monitoring};
pub use skew::{
    sample_skew_bm, skew_step, skew_transition_cdf, skew_transition_density, SkewParams,
};
