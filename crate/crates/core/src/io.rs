//! JSON file formats for instances and run traces.
//!
//! Instance files carry the objective (either weighted coverage or a
//! log-determinant model), the per-agent element sets, and the budgets.
//! Matrices round-trip losslessly because serde_json prints the shortest
//! representation that parses back to the same float.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::{CoverageFunction, InfoMatrix, LogDetFunction};
use crate::oracle::SetFunction;
use crate::policies::{AgentRecord, PolicyKind, ProblemInstance, RunTrace};
use crate::set::ElementSet;

pub const SCHEMA_VERSION: u32 = 1;

/// Objective payload of an instance file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "objective", rename_all = "lowercase")]
pub enum ObjectiveData {
    Coverage {
        cell_weights: Vec<u64>,
        element_cells: Vec<Vec<u32>>,
    },
    Logdet {
        /// Prior information matrix, by rows.
        prior: Vec<Vec<f64>>,
        /// Per-element information matrices, by rows.
        element_info: Vec<Vec<Vec<f64>>>,
    },
}

/// On-disk form of a selection problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub schema_version: u32,
    #[serde(flatten)]
    pub objective: ObjectiveData,
    /// Element ids visible to each agent, in acting order.
    pub agents: Vec<Vec<u32>>,
    pub k: usize,
    pub m: usize,
}

/// A parsed instance file: the problem plus the concrete objective.
pub struct LoadedInstance {
    pub file: InstanceFile,
    pub instance: ProblemInstance,
    pub objective: LoadedObjective,
}

/// Concrete objective recovered from a file.
#[derive(Debug, Clone)]
pub enum LoadedObjective {
    Coverage(CoverageFunction),
    Logdet(LogDetFunction),
}

impl InstanceFile {
    /// Captures a coverage-objective problem for saving.
    pub fn from_coverage(coverage: &CoverageFunction, instance: &ProblemInstance) -> Self {
        InstanceFile {
            schema_version: SCHEMA_VERSION,
            objective: ObjectiveData::Coverage {
                cell_weights: coverage.cell_weights().to_vec(),
                element_cells: (0..coverage.ground_size() as u32)
                    .map(|id| coverage.cells_of(id))
                    .collect(),
            },
            agents: instance.agent_elements.iter().map(|s| s.ids()).collect(),
            k: instance.k,
            m: instance.m,
        }
    }

    /// Captures a log-determinant problem for saving.
    pub fn from_logdet(logdet: &LogDetFunction, instance: &ProblemInstance) -> Self {
        InstanceFile {
            schema_version: SCHEMA_VERSION,
            objective: ObjectiveData::Logdet {
                prior: logdet.base().rows(),
                element_info: logdet.elements().iter().map(InfoMatrix::rows).collect(),
            },
            agents: instance.agent_elements.iter().map(|s| s.ids()).collect(),
            k: instance.k,
            m: instance.m,
        }
    }

    /// Validates the payload and builds the live problem.
    pub fn into_loaded(self) -> Result<LoadedInstance> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidSpec(format!(
                "unsupported schema version {}, this build reads {}",
                self.schema_version, SCHEMA_VERSION
            )));
        }
        let (objective, shared, ground): (LoadedObjective, Arc<dyn SetFunction>, usize) =
            match &self.objective {
                ObjectiveData::Coverage { cell_weights, element_cells } => {
                    let f = CoverageFunction::new(cell_weights.clone(), element_cells.clone())?;
                    let ground = f.ground_size();
                    (LoadedObjective::Coverage(f.clone()), Arc::new(f), ground)
                }
                ObjectiveData::Logdet { prior, element_info } => {
                    let base = InfoMatrix::from_rows(prior)?;
                    let elements = element_info
                        .iter()
                        .map(|rows| InfoMatrix::from_rows(rows))
                        .collect::<Result<Vec<_>>>()?;
                    let f = LogDetFunction::new(base, elements)?;
                    let ground = f.ground_size();
                    (LoadedObjective::Logdet(f.clone()), Arc::new(f), ground)
                }
            };
        let mut agent_sets = Vec::with_capacity(self.agents.len());
        for (i, ids) in self.agents.iter().enumerate() {
            for &id in ids {
                if id as usize >= ground {
                    return Err(Error::InvalidSpec(format!(
                        "agent {i} references element {id}, ground set has {ground}"
                    )));
                }
            }
            agent_sets.push(ids.iter().copied().collect::<ElementSet>());
        }
        let instance = ProblemInstance::new(shared, agent_sets, self.k, self.m)?;
        Ok(LoadedInstance { file: self, instance, objective })
    }
}

/// Writes an instance file as pretty JSON.
pub fn save_instance(path: &Path, file: &InstanceFile) -> Result<()> {
    let mut text = serde_json::to_string_pretty(file)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Reads and validates an instance file.
pub fn load_instance(path: &Path) -> Result<LoadedInstance> {
    let text = std::fs::read_to_string(path)?;
    let file: InstanceFile = serde_json::from_str(&text)?;
    file.into_loaded()
}

/// One agent's step in a trace file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceAgent {
    /// Selected element ids.
    pub x: Vec<u32>,
    /// Forwarded element ids.
    pub z: Vec<u32>,
    /// Objective gain of the selection over the prefix.
    pub marginal: f64,
}

/// On-disk form of a policy run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceFile {
    pub schema_version: u32,
    pub policy: PolicyKind,
    pub k: usize,
    pub m: usize,
    pub agents: Vec<TraceAgent>,
    pub f_total: f64,
}

impl TraceFile {
    pub fn from_trace(trace: &RunTrace) -> Self {
        TraceFile {
            schema_version: SCHEMA_VERSION,
            policy: trace.policy,
            k: trace.k,
            m: trace.m,
            agents: trace
                .agents
                .iter()
                .map(|a| TraceAgent {
                    x: a.selection.ids(),
                    z: a.message.ids(),
                    marginal: a.gain,
                })
                .collect(),
            f_total: trace.total,
        }
    }

    /// Rebuilds the in-memory trace, validating element ids.
    pub fn into_trace(self) -> Result<RunTrace> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidSpec(format!(
                "unsupported schema version {}, this build reads {}",
                self.schema_version, SCHEMA_VERSION
            )));
        }
        let mut agents = Vec::with_capacity(self.agents.len());
        for (i, a) in self.agents.iter().enumerate() {
            for &id in a.x.iter().chain(a.z.iter()) {
                if id as usize >= crate::set::MAX_GROUND {
                    return Err(Error::InvalidSpec(format!(
                        "agent {i} references element {id}, beyond the supported {}",
                        crate::set::MAX_GROUND
                    )));
                }
            }
            agents.push(AgentRecord {
                selection: a.x.iter().copied().collect(),
                message: a.z.iter().copied().collect(),
                gain: a.marginal,
            });
        }
        Ok(RunTrace { policy: self.policy, k: self.k, m: self.m, agents, total: self.f_total })
    }
}

/// Writes a run trace as pretty JSON.
pub fn save_trace(path: &Path, trace: &RunTrace) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&TraceFile::from_trace(trace))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Reads a trace file.
pub fn load_trace(path: &Path) -> Result<RunTrace> {
    let text = std::fs::read_to_string(path)?;
    let file: TraceFile = serde_json::from_str(&text)?;
    file.into_trace()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_camera_scenario, gen_worst_case_b, CameraScenarioSpec};
    use crate::oracle::EvalBudget;
    use crate::policies::{run_policy, PolicySpec};

    #[test]
    fn coverage_instance_round_trips_exactly() {
        let wc = gen_worst_case_b(3, 2, 2).unwrap();
        let file = InstanceFile::from_coverage(&wc.coverage, &wc.instance);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("wc.json");
        save_instance(&path, &file).unwrap();
        let loaded = load_instance(&path).unwrap();
        assert_eq!(loaded.file, file);
        assert_eq!(loaded.instance.agent_elements, wc.instance.agent_elements);
        assert_eq!(loaded.instance.k, 2);
        assert_eq!(loaded.instance.m, 2);
        match &loaded.objective {
            LoadedObjective::Coverage(c) => {
                assert_eq!(c.cell_weights(), wc.coverage.cell_weights());
                let all = ElementSet::full(c.ground_size());
                assert_eq!(c.eval_exact(all), wc.coverage.eval_exact(all));
            }
            LoadedObjective::Logdet(_) => panic!("wrong objective kind"),
        }
    }

    #[test]
    fn logdet_instance_round_trips_exactly() {
        let spec = CameraScenarioSpec {
            n_vehicles: 2,
            images_per_vehicle: 3,
            seed: 21,
            ..CameraScenarioSpec::default()
        };
        let cam = gen_camera_scenario(&spec).unwrap();
        let file = InstanceFile::from_logdet(&cam.logdet, &cam.instance);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cam.json");
        save_instance(&path, &file).unwrap();
        let loaded = load_instance(&path).unwrap();
        match &loaded.objective {
            LoadedObjective::Logdet(l) => {
                assert_eq!(l.base().rows(), cam.logdet.base().rows());
                let ours = cam.logdet.elements();
                let theirs = l.elements();
                assert_eq!(ours.len(), theirs.len());
                for (a, b) in ours.iter().zip(theirs) {
                    assert_eq!(a.rows(), b.rows());
                }
                let full = ElementSet::full(6);
                let fa = crate::oracle::SetFunction::eval(l, full).unwrap();
                let fb = crate::oracle::SetFunction::eval(&cam.logdet, full).unwrap();
                assert_eq!(fa, fb);
            }
            LoadedObjective::Coverage(_) => panic!("wrong objective kind"),
        }
    }

    #[test]
    fn malformed_files_are_rejected() {
        let wc = gen_worst_case_b(2, 2, 2).unwrap();
        let mut file = InstanceFile::from_coverage(&wc.coverage, &wc.instance);
        file.schema_version = 99;
        assert!(file.clone().into_loaded().is_err());
        file.schema_version = SCHEMA_VERSION;
        file.agents[0].push(200);
        assert!(file.into_loaded().is_err());

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("broken.json");
        std::fs::write(&path, "{\"schema_version\": 1").unwrap();
        assert!(load_instance(&path).is_err());
    }

    #[test]
    fn trace_round_trips() {
        let wc = gen_worst_case_b(3, 2, 2).unwrap();
        let trace = run_policy(
            &wc.instance,
            PolicySpec::new(crate::policies::PolicyKind::Augmented),
            EvalBudget::default(),
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.json");
        save_trace(&path, &trace).unwrap();
        let back = load_trace(&path).unwrap();
        assert_eq!(back, trace);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"f_total\""));
        assert!(text.contains("\"marginal\""));
    }

    #[test]
    fn bundled_demo_instance_behaves_as_documented() {
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../data/coverage_demo.json");
        let loaded = load_instance(&path).unwrap();
        assert_eq!(loaded.instance.n_agents(), 3);
        let ng = run_policy(
            &loaded.instance,
            PolicySpec::new(crate::policies::PolicyKind::Nominal),
            EvalBudget::default(),
        )
        .unwrap();
        let ag = run_policy(
            &loaded.instance,
            PolicySpec::new(crate::policies::PolicyKind::Augmented),
            EvalBudget::default(),
        )
        .unwrap();
        let opt = crate::analysis::brute_force_opt(&loaded.instance, EvalBudget::default())
            .unwrap();
        assert_eq!(ng.total, 4.0);
        assert_eq!(ag.total, 5.0);
        assert_eq!(opt.value, 5.0);
    }
}
