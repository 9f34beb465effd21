use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;
use crate::model::{OperationStep, StepTarget};
use crate::pid::Pid;

pub const MAX_DEPTH: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("operation {0} not found")]
    NotFound(Pid),
    #[error("step {step} needs {attribute}, which no earlier step produces and the operation does not receive")]
    Unsatisfiable { step: String, attribute: Pid },
    #[error("return attribute {0} is never produced")]
    UnproducedReturn(Pid),
    #[error("steps nested deeper than {MAX_DEPTH} levels")]
    TooDeep,
}

/// Where a value in the dataflow comes from or goes to.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Endpoint {
    Input,
    Step(u64),
    Output,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DataflowEdge {
    pub producer: Endpoint,
    pub attribute: Pid,
    pub consumer: Endpoint,
}

/// Stages of one step list. Steps in a stage may run concurrently; nested
/// step lists carry their own plan, keyed by the owning step index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StagePlan {
    pub stages: Vec<Vec<u64>>,
    pub dataflow_edges: Vec<DataflowEdge>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub nested: BTreeMap<u64, StagePlan>,
}

impl StagePlan {
    pub fn stage_of(&self, step: u64) -> Option<usize> {
        self.stages.iter().position(|s| s.contains(&step))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExecutionPlan {
    pub operation: Pid,
    #[serde(flatten)]
    pub plan: StagePlan,
}

/// Plans an operation's steps into stages.
pub fn plan(operation: &Pid, graph: &Graph) -> Result<ExecutionPlan, PlanError> {
    let op = graph
        .operation(operation)
        .ok_or_else(|| PlanError::NotFound(operation.clone()))?;
    let inputs = BTreeSet::from([op.executable_on.clone()]);
    Ok(ExecutionPlan {
        operation: operation.clone(),
        plan: plan_steps(&op.steps, &inputs, &op.returns, "", 0)?,
    })
}

/// Plans a step list whose scope starts with `inputs` bound and must end
/// with every attribute in `returns` bound.
///
/// A step lands in the earliest stage that is after the producers of what it
/// reads, after earlier writers of what it writes, and not before the stage
/// of the step preceding it.
pub fn plan_steps(
    steps: &[OperationStep],
    inputs: &BTreeSet<Pid>,
    returns: &[Pid],
    prefix: &str,
    depth: usize,
) -> Result<StagePlan, PlanError> {
    if depth > MAX_DEPTH {
        return Err(PlanError::TooDeep);
    }
    let mut producer: BTreeMap<Pid, (Endpoint, Option<usize>)> = inputs
        .iter()
        .map(|p| (p.clone(), (Endpoint::Input, None)))
        .collect();
    let mut stages: Vec<Vec<u64>> = Vec::new();
    let mut edges = Vec::new();
    let mut nested = BTreeMap::new();
    let mut floor = 0;
    for step in steps {
        let here = format!("{prefix}{}", step.index);
        let mut stage = floor;
        let mut reads = BTreeSet::new();
        for m in &step.input_mappings {
            let Some(a) = &m.input_attribute else { continue };
            if !reads.insert(a) {
                continue;
            }
            let (from, at) = producer.get(a).ok_or_else(|| PlanError::Unsatisfiable {
                step: here.clone(),
                attribute: a.clone(),
            })?;
            if let Some(s) = at {
                stage = stage.max(s + 1);
            }
            edges.push(DataflowEdge {
                producer: from.clone(),
                attribute: a.clone(),
                consumer: Endpoint::Step(step.index),
            });
        }
        let writes: BTreeSet<&Pid> = step.output_mappings.iter().map(|m| &m.output_attribute).collect();
        for a in &writes {
            if let Some((_, Some(s))) = producer.get(*a) {
                stage = stage.max(s + 1);
            }
        }
        if let StepTarget::Steps(inner) = &step.target {
            let scope: BTreeSet<Pid> = step
                .input_mappings
                .iter()
                .map(|m| m.output_attribute.clone())
                .collect();
            let needed: Vec<Pid> = step
                .output_mappings
                .iter()
                .filter_map(|m| m.input_attribute.clone())
                .collect();
            let sub = plan_steps(inner, &scope, &needed, &format!("{here}/"), depth + 1)?;
            nested.insert(step.index, sub);
        }
        if stages.len() <= stage {
            stages.resize(stage + 1, Vec::new());
        }
        stages[stage].push(step.index);
        floor = stage;
        for a in writes {
            producer.insert(a.clone(), (Endpoint::Step(step.index), Some(stage)));
        }
    }
    for r in returns {
        let (from, _) = producer
            .get(r)
            .ok_or_else(|| PlanError::UnproducedReturn(r.clone()))?;
        edges.push(DataflowEdge {
            producer: from.clone(),
            attribute: r.clone(),
            consumer: Endpoint::Output,
        });
    }
    Ok(StagePlan {
        stages,
        dataflow_edges: edges,
        nested,
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::model::AttributeMapping;

    fn pid(s: &str) -> Pid {
        Pid::parse(&format!("t/{s}")).unwrap()
    }

    fn step(index: u64, reads: &[&str], writes: &[&str]) -> OperationStep {
        let mut s = OperationStep::new(index, StepTarget::TechnologyInterface(pid("ti")));
        for r in reads {
            s = s.input(AttributeMapping::from_attribute(pid(r), pid("slot")));
        }
        for w in writes {
            s = s.output(AttributeMapping::from_attribute(pid("out"), pid(w)));
        }
        s
    }

    fn inputs() -> BTreeSet<Pid> {
        BTreeSet::from([pid("in")])
    }

    #[test]
    fn chain_needs_two_stages() {
        let steps = [step(0, &["in"], &["mid"]), step(1, &["mid"], &["res"])];
        let p = plan_steps(&steps, &inputs(), &[pid("res")], "", 0).unwrap();
        assert_eq!(p.stages, vec![vec![0], vec![1]]);
        assert_eq!(p.dataflow_edges.len(), 3);
    }

    #[test]
    fn independent_steps_share_a_stage() {
        let steps = [step(0, &["in"], &["a"]), step(1, &["in"], &["b"])];
        let p = plan_steps(&steps, &inputs(), &[pid("a"), pid("b")], "", 0).unwrap();
        assert_eq!(p.stages, vec![vec![0, 1]]);
    }

    #[test]
    fn unsatisfiable_input() {
        let steps = [step(0, &["ghost"], &["a"])];
        let err = plan_steps(&steps, &inputs(), &[], "", 0).unwrap_err();
        assert_eq!(
            err,
            PlanError::Unsatisfiable {
                step: "0".into(),
                attribute: pid("ghost")
            }
        );
        let err = plan_steps(&[], &inputs(), &[pid("x")], "", 0).unwrap_err();
        assert_eq!(err, PlanError::UnproducedReturn(pid("x")));
    }

    #[test]
    fn later_producer_does_not_satisfy_earlier_step() {
        let steps = [step(0, &["b"], &["a"]), step(1, &["in"], &["b"])];
        assert!(plan_steps(&steps, &inputs(), &[], "", 0).is_err());
    }

    #[test]
    fn nested_unit() {
        let inner = vec![step(0, &["slot"], &["x"])];
        let outer = OperationStep::new(0, StepTarget::Steps(inner))
            .input(AttributeMapping::from_attribute(pid("in"), pid("slot")))
            .output(AttributeMapping::from_attribute(pid("x"), pid("res")));
        let p = plan_steps(&[outer], &inputs(), &[pid("res")], "", 0).unwrap();
        assert_eq!(p.stages, vec![vec![0]]);
        assert_eq!(p.nested[&0].stages, vec![vec![0]]);
    }

    prop_compose! {
        fn arb_steps()(spec in prop::collection::vec(
            (prop::collection::vec(0usize..6, 0..3), prop::collection::vec(0usize..6, 0..3)),
            1..8,
        )) -> Vec<OperationStep> {
            let name = |i: usize| if i == 0 { "in".to_string() } else { format!("v{i}") };
            spec.iter().enumerate().map(|(i, (r, w))| {
                let reads: Vec<String> = r.iter().map(|x| name(*x)).collect();
                let writes: Vec<String> = w.iter().map(|x| name(*x + 1)).collect();
                let reads: Vec<&str> = reads.iter().map(String::as_str).collect();
                let writes: Vec<&str> = writes.iter().map(String::as_str).collect();
                step(i as u64, &reads, &writes)
            }).collect()
        }
    }

    proptest! {
        #[test]
        fn plan_is_sound(steps in arb_steps()) {
            if let Ok(p) = plan_steps(&steps, &inputs(), &[], "", 0) {
                let all: Vec<u64> = p.stages.iter().flatten().copied().collect();
                prop_assert_eq!(all.len(), steps.len());
                for e in &p.dataflow_edges {
                    if let (Endpoint::Step(a), Endpoint::Step(b)) = (&e.producer, &e.consumer) {
                        prop_assert!(p.stage_of(*a).unwrap() < p.stage_of(*b).unwrap());
                    }
                }
                let order: Vec<usize> = steps.iter().map(|s| p.stage_of(s.index).unwrap()).collect();
                prop_assert!(order.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }
}
