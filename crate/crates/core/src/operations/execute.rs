use std::collections::BTreeSet;
use std::thread;

use thiserror::Error;

use super::adapters::{AdapterError, AdapterRegistry};
use super::mapping::{check_binding, resolve_mapping, MappingError, ValueBinding};
use super::plan::{plan_steps, PlanError, StagePlan, MAX_DEPTH};
use crate::diagnostics::ValidationResult;
use crate::graph::Graph;
use crate::model::{Operation, OperationStep, StepTarget, Value};
use crate::pid::Pid;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("operation {0} not found")]
    NotFound(Pid),
    #[error("{0}")]
    Plan(#[from] PlanError),
    #[error("input does not conform to {attribute}")]
    InvalidInput {
        attribute: Pid,
        results: Vec<ValidationResult>,
    },
    #[error("{0}")]
    Adapter(#[from] AdapterError),
    #[error("{0}")]
    Mapping(#[from] MappingError),
    #[error("step {step}: {source}")]
    Step {
        step: String,
        #[source]
        source: Box<ExecError>,
    },
    #[error("return attribute {0} is unbound after all stages")]
    UnboundReturn(Pid),
    #[error("operations nested deeper than {MAX_DEPTH} levels")]
    RecursionLimit,
}

/// Runs operations against an immutable graph.
pub struct Executor<'a> {
    graph: &'a Graph,
    adapters: &'a AdapterRegistry,
    marker: String,
}

impl<'a> Executor<'a> {
    pub fn new(graph: &'a Graph, adapters: &'a AdapterRegistry) -> Self {
        Executor {
            graph,
            adapters,
            marker: crate::model::DEFAULT_MARKER.to_owned(),
        }
    }

    pub fn with_marker(mut self, marker: impl Into<String>) -> Self {
        self.marker = marker.into();
        self
    }

    /// Executes `operation` on `input` and returns the bindings of exactly
    /// its return attributes.
    pub fn run(&self, operation: &Pid, input: Value) -> Result<ValueBinding, ExecError> {
        let op = self.operation(operation)?;
        self.preflight(op)?;
        self.run_operation(op, input, 0)
    }

    fn operation(&self, pid: &Pid) -> Result<&'a Operation, ExecError> {
        self.graph
            .operation(pid)
            .ok_or_else(|| ExecError::NotFound(pid.clone()))
    }

    /// Plans every reachable operation and checks that every reachable
    /// interface has an adapter, before anything runs.
    fn preflight(&self, root: &Operation) -> Result<(), ExecError> {
        let mut seen = BTreeSet::from([root.pid.clone()]);
        let mut pending = vec![root];
        while let Some(op) = pending.pop() {
            self.plan_of(op)?;
            for target in op.referenced_targets() {
                match target {
                    StepTarget::TechnologyInterface(ti) => {
                        let ti = self
                            .graph
                            .interface(ti)
                            .ok_or_else(|| ExecError::NotFound(ti.clone()))?;
                        self.adapters.select(ti)?;
                    }
                    StepTarget::Operation(sub) => {
                        if seen.insert(sub.clone()) {
                            pending.push(self.operation(sub)?);
                        }
                    }
                    StepTarget::Steps(_) => {}
                }
            }
        }
        Ok(())
    }

    fn plan_of(&self, op: &Operation) -> Result<StagePlan, PlanError> {
        plan_steps(
            &op.steps,
            &BTreeSet::from([op.executable_on.clone()]),
            &op.returns,
            "",
            0,
        )
    }

    fn run_operation(
        &self,
        op: &Operation,
        input: Value,
        depth: usize,
    ) -> Result<ValueBinding, ExecError> {
        if depth > MAX_DEPTH {
            return Err(ExecError::RecursionLimit);
        }
        check_binding(&op.executable_on, &input, self.graph).map_err(|e| match e {
            MappingError::Invalid { attribute, results } => {
                ExecError::InvalidInput { attribute, results }
            }
            other => other.into(),
        })?;
        let plan = self.plan_of(op)?;
        let mut scope = ValueBinding::from([(op.executable_on.clone(), input)]);
        self.run_stages(&plan, &op.steps, &mut scope, "", depth)?;
        let mut out = ValueBinding::new();
        for r in &op.returns {
            let value = scope
                .remove(r)
                .ok_or_else(|| ExecError::UnboundReturn(r.clone()))?;
            check_binding(r, &value, self.graph)?;
            out.insert(r.clone(), value);
        }
        Ok(out)
    }

    fn run_stages(
        &self,
        plan: &StagePlan,
        steps: &[OperationStep],
        scope: &mut ValueBinding,
        prefix: &str,
        depth: usize,
    ) -> Result<(), ExecError> {
        for stage in &plan.stages {
            let members: Vec<&OperationStep> = steps
                .iter()
                .filter(|s| stage.contains(&s.index))
                .collect();
            let frozen: &ValueBinding = scope;
            let results: Vec<Result<ValueBinding, ExecError>> = if members.len() == 1 {
                vec![self.run_step(members[0], plan, frozen, prefix, depth)]
            } else {
                thread::scope(|s| {
                    let handles: Vec<_> = members
                        .iter()
                        .map(|step| s.spawn(move || self.run_step(step, plan, frozen, prefix, depth)))
                        .collect();
                    handles
                        .into_iter()
                        .map(|h| h.join().expect("step thread panicked"))
                        .collect()
                })
            };
            let mut merged = Vec::new();
            for r in results {
                merged.push(r?);
            }
            for produced in merged {
                scope.extend(produced);
            }
        }
        Ok(())
    }

    fn run_step(
        &self,
        step: &OperationStep,
        plan: &StagePlan,
        scope: &ValueBinding,
        prefix: &str,
        depth: usize,
    ) -> Result<ValueBinding, ExecError> {
        let here = format!("{prefix}{}", step.index);
        self.step_body(step, plan, scope, &here, depth)
            .map_err(|e| match e {
                nested @ ExecError::Step { .. } => nested,
                other => ExecError::Step {
                    step: here.clone(),
                    source: Box::new(other),
                },
            })
    }

    fn step_body(
        &self,
        step: &OperationStep,
        plan: &StagePlan,
        scope: &ValueBinding,
        here: &str,
        depth: usize,
    ) -> Result<ValueBinding, ExecError> {
        let mut local = ValueBinding::new();
        for m in &step.input_mappings {
            let v = resolve_mapping(m, scope, self.graph, &self.marker)?;
            local.insert(m.output_attribute.clone(), v);
        }
        let produced = match &step.target {
            StepTarget::TechnologyInterface(ti) => {
                let ti = self
                    .graph
                    .interface(ti)
                    .ok_or_else(|| ExecError::NotFound(ti.clone()))?;
                let out = self.adapters.invoke(ti, &local, self.graph)?;
                for (attr, value) in &out {
                    check_binding(attr, value, self.graph)?;
                }
                out
            }
            StepTarget::Operation(sub) => {
                let sub = self.operation(sub)?;
                let input = local
                    .remove(&sub.executable_on)
                    .ok_or_else(|| MappingError::Unbound(sub.executable_on.clone()))?;
                self.run_operation(sub, input, depth + 1)?
            }
            StepTarget::Steps(inner) => {
                if depth + 1 > MAX_DEPTH {
                    return Err(ExecError::RecursionLimit);
                }
                let nested = plan
                    .nested
                    .get(&step.index)
                    .expect("planned together with the parent");
                let mut inner_scope = local;
                self.run_stages(nested, inner, &mut inner_scope, &format!("{here}/"), depth + 1)?;
                inner_scope
            }
        };
        let mut out = ValueBinding::new();
        for m in &step.output_mappings {
            let v = resolve_mapping(m, &produced, self.graph, &self.marker)?;
            out.insert(m.output_attribute.clone(), v);
        }
        Ok(out)
    }
}

/// Executes with the default marker.
pub fn execute(
    operation: &Pid,
    input: Value,
    adapters: &AdapterRegistry,
    graph: &Graph,
) -> Result<ValueBinding, ExecError> {
    Executor::new(graph, adapters).run(operation, input)
}
