//! Instance generators: adversarial worst cases, seeded random coverage, and
//! the multi-vehicle camera scenario.

mod camera;
mod random;
mod worst_case;

pub use camera::{
    gen_camera_scenario, CameraInstance, CameraScenario, CameraScenarioSpec, Pose, VehiclePath,
};
pub use random::{gen_random_coverage, RandomCoverage, RandomCoverageSpec};
pub use worst_case::{
    gen_worst_case, gen_worst_case_a, gen_worst_case_b, WorstCaseInstance, WorstCaseSpec,
    WorstCaseVariant,
};

/// Splitmix64 step, used to derive independent per-index seeds from a master
/// seed so that parallel and serial runs see identical random streams.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
