//! Multi-vehicle camera scenario: each vehicle flies a quadratic Bezier path
//! and shoots side-looking images along it; an image of a target contributes
//! a bearing-only information matrix, and the team objective is the log ratio
//! of fused information to the prior.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::{InfoMatrix, LogDetFunction};
use crate::policies::ProblemInstance;
use crate::set::ElementSet;

/// Scenario parameters.  `Default` is the configuration used by the Monte
/// Carlo experiment: three vehicles, ten images each, three targets, a 90
/// degree side-looking field of view, and budgets k = m = 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraScenarioSpec {
    pub n_vehicles: usize,
    pub images_per_vehicle: usize,
    pub n_targets: usize,
    /// Focal length in pixels; with pixel noise it sets the bearing accuracy.
    pub focal_px: f64,
    pub noise_px: f64,
    pub fov_deg: f64,
    pub k: usize,
    pub m: usize,
    pub world_min: [f64; 2],
    pub world_max: [f64; 2],
    pub seed: u64,
}

impl Default for CameraScenarioSpec {
    fn default() -> Self {
        CameraScenarioSpec {
            n_vehicles: 3,
            images_per_vehicle: 10,
            n_targets: 3,
            focal_px: 50.0,
            noise_px: 1.0,
            fov_deg: 90.0,
            k: 2,
            m: 2,
            world_min: [0.0, 0.0],
            world_max: [100.0, 100.0],
            seed: 0,
        }
    }
}

impl CameraScenarioSpec {
    fn validate(&self) -> Result<()> {
        if self.n_vehicles == 0 || self.images_per_vehicle == 0 || self.n_targets == 0 {
            return Err(Error::InvalidSpec(
                "need at least one vehicle, one image per vehicle, and one target".into(),
            ));
        }
        let ground = self.n_vehicles * self.images_per_vehicle;
        if ground > crate::set::MAX_GROUND {
            return Err(Error::InvalidSpec(format!(
                "{ground} images requested, more than the supported {}",
                crate::set::MAX_GROUND
            )));
        }
        if !(self.focal_px > 0.0 && self.focal_px.is_finite()) {
            return Err(Error::InvalidSpec("focal length must be positive".into()));
        }
        if !(self.noise_px > 0.0 && self.noise_px.is_finite()) {
            return Err(Error::InvalidSpec("pixel noise must be positive".into()));
        }
        if !(self.fov_deg > 0.0 && self.fov_deg <= 360.0) {
            return Err(Error::InvalidSpec(format!(
                "field of view {} degrees outside (0, 360]",
                self.fov_deg
            )));
        }
        for axis in 0..2 {
            if !(self.world_min[axis] < self.world_max[axis])
                || !self.world_min[axis].is_finite()
                || !self.world_max[axis].is_finite()
            {
                return Err(Error::InvalidSpec("world bounds must be a nonempty box".into()));
            }
        }
        if self.k == 0 {
            return Err(Error::InvalidSpec("selection budget k must be positive".into()));
        }
        Ok(())
    }
}

/// Camera position and optical axis (unit vector) for one image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: [f64; 2],
    pub axis: [f64; 2],
}

/// One vehicle's Bezier control points and the poses sampled along it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehiclePath {
    pub start: [f64; 2],
    pub control: [f64; 2],
    pub end: [f64; 2],
    pub poses: Vec<Pose>,
}

/// Everything needed to reconstruct or plot a drawn scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraScenario {
    pub spec: CameraScenarioSpec,
    pub targets: Vec<[f64; 2]>,
    pub vehicles: Vec<VehiclePath>,
    /// For each image element (vehicle-major order), the target it measures.
    pub measured_target: Vec<Option<usize>>,
}

/// A drawn scenario with its objective and selection problem.
#[derive(Clone)]
pub struct CameraInstance {
    pub scenario: CameraScenario,
    pub instance: ProblemInstance,
    /// The same objective with its concrete type.
    pub logdet: LogDetFunction,
}

fn bezier_point(p0: [f64; 2], c: [f64; 2], p1: [f64; 2], t: f64) -> [f64; 2] {
    let a = (1.0 - t) * (1.0 - t);
    let b = 2.0 * (1.0 - t) * t;
    let d = t * t;
    [
        a * p0[0] + b * c[0] + d * p1[0],
        a * p0[1] + b * c[1] + d * p1[1],
    ]
}

fn bezier_tangent(p0: [f64; 2], c: [f64; 2], p1: [f64; 2], t: f64) -> [f64; 2] {
    [
        2.0 * (1.0 - t) * (c[0] - p0[0]) + 2.0 * t * (p1[0] - c[0]),
        2.0 * (1.0 - t) * (c[1] - p0[1]) + 2.0 * t * (p1[1] - c[1]),
    ]
}

/// Unit heading along the tangent; a degenerate tangent falls back to east.
fn unit_heading(tangent: [f64; 2]) -> [f64; 2] {
    let norm = (tangent[0] * tangent[0] + tangent[1] * tangent[1]).sqrt();
    if norm < 1e-12 {
        [1.0, 0.0]
    } else {
        [tangent[0] / norm, tangent[1] / norm]
    }
}

/// The camera looks out the right side of the vehicle: the heading rotated
/// by a quarter turn clockwise.
fn right_normal(heading: [f64; 2]) -> [f64; 2] {
    [heading[1], -heading[0]]
}

/// Index of the nearest target inside the field of view, if any.  Equidistant
/// targets resolve to the lower index.
fn visible_nearest(pos: [f64; 2], axis: [f64; 2], targets: &[[f64; 2]], cos_half_fov: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (idx, target) in targets.iter().enumerate() {
        let d = [target[0] - pos[0], target[1] - pos[1]];
        let r = (d[0] * d[0] + d[1] * d[1]).sqrt();
        if r < 1e-6 {
            continue;
        }
        if d[0] * axis[0] + d[1] * axis[1] < cos_half_fov * r {
            continue;
        }
        if best.map_or(true, |(_, br)| r < br) {
            best = Some((idx, r));
        }
    }
    best.map(|(idx, _)| idx)
}

/// Information matrix of one image: a pixel-noise bearing measurement of the
/// chosen target constrains the component perpendicular to the line of
/// sight, scaled by focal length over range.
fn image_info(
    pos: [f64; 2],
    axis: [f64; 2],
    targets: &[[f64; 2]],
    spec: &CameraScenarioSpec,
    cos_half_fov: f64,
) -> (Option<usize>, InfoMatrix) {
    let dim = 2 * targets.len();
    let mut info = InfoMatrix::zeros(dim);
    let measured = visible_nearest(pos, axis, targets, cos_half_fov);
    if let Some(idx) = measured {
        let target = targets[idx];
        let d = [target[0] - pos[0], target[1] - pos[1]];
        let r = (d[0] * d[0] + d[1] * d[1]).sqrt();
        let u = [d[0] / r, d[1] / r];
        let v = [-u[1], u[0]];
        let weight = (spec.focal_px / spec.noise_px).powi(2) / (r * r);
        info.add_scaled_outer(weight, &v, 2 * idx);
    }
    (measured, info)
}

/// Strength of the prior on every target coordinate.
const PRIOR_INFO: f64 = 0.01;

/// Draws a scenario and builds the selection problem over its images.
///
/// Random draws happen in a fixed order (target positions first, then each
/// vehicle's three control points), so `spec` and its seed pin the scenario
/// exactly.  Image elements are numbered vehicle-major; agent `v` owns ids
/// `v * images_per_vehicle ..` and the budgets are `spec.k` and `spec.m`.
pub fn gen_camera_scenario(spec: &CameraScenarioSpec) -> Result<CameraInstance> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let draw_point = |rng: &mut ChaCha8Rng| -> [f64; 2] {
        let x = rng.gen_range(spec.world_min[0]..=spec.world_max[0]);
        let y = rng.gen_range(spec.world_min[1]..=spec.world_max[1]);
        [x, y]
    };
    let targets: Vec<[f64; 2]> = (0..spec.n_targets).map(|_| draw_point(&mut rng)).collect();

    let cos_half_fov = (spec.fov_deg / 2.0).to_radians().cos();
    let dim = 2 * spec.n_targets;
    let mut vehicles = Vec::with_capacity(spec.n_vehicles);
    let mut element_info = Vec::with_capacity(spec.n_vehicles * spec.images_per_vehicle);
    let mut measured_target = Vec::new();
    let mut agents = Vec::with_capacity(spec.n_vehicles);
    for _ in 0..spec.n_vehicles {
        let start = draw_point(&mut rng);
        let control = draw_point(&mut rng);
        let end = draw_point(&mut rng);
        let mut poses = Vec::with_capacity(spec.images_per_vehicle);
        let mut own = ElementSet::empty();
        for j in 0..spec.images_per_vehicle {
            let t = if spec.images_per_vehicle == 1 {
                0.5
            } else {
                j as f64 / (spec.images_per_vehicle - 1) as f64
            };
            let position = bezier_point(start, control, end, t);
            let heading = unit_heading(bezier_tangent(start, control, end, t));
            let axis = right_normal(heading);
            let (measured, info) = image_info(position, axis, &targets, spec, cos_half_fov);
            own = own.with(element_info.len() as u32);
            poses.push(Pose { position, axis });
            element_info.push(info);
            measured_target.push(measured);
        }
        vehicles.push(VehiclePath { start, control, end, poses });
        agents.push(own);
    }

    let base = InfoMatrix::scaled_identity(dim, PRIOR_INFO);
    let logdet = LogDetFunction::new(base, element_info)?;
    let instance = ProblemInstance::new(
        std::sync::Arc::new(logdet.clone()),
        agents,
        spec.k,
        spec.m,
    )?;
    let scenario = CameraScenario { spec: *spec, targets, vehicles, measured_target };
    Ok(CameraInstance { scenario, instance, logdet })
}
