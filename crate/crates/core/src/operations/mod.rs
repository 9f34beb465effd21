//! Operation association, planning and execution.

pub mod adapters;
mod association;
pub mod dataflow;
mod execute;
mod mapping;
mod plan;

pub use adapters::{AdapterDeclaration, AdapterError, AdapterRegistry, Builtin, FixtureTable};
pub use association::{
    operations_for_attribute, operations_for_datatype, operations_for_record,
    AssociationMechanism, RecordOperations,
};
pub use execute::{execute, ExecError, Executor};
pub use mapping::{apply_mapping, check_binding, resolve_mapping, MappingError, ValueBinding};
pub use plan::{
    plan, plan_steps, DataflowEdge, Endpoint, ExecutionPlan, PlanError, StagePlan, MAX_DEPTH,
};
