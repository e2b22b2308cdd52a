//! Deterministic 2D closed-loop exploration simulator.

mod episode;
mod mapping;
mod sensor;
mod world;

pub use episode::{
    run_episode, EpisodeLog, Event, Method, Mode, Outcome, RobotState, SimConfig, Simulation, Summary, TickRecord,
};
pub use mapping::{integrate_scan, single_scan_esdf, HitMiss};
pub use sensor::{cast_ray, raycast_scan, SensorNoise};
pub use world::{parse_ascii_grid, AsciiMap, World, BUILTIN_MAPS};
