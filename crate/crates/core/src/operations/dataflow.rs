//! Flow of values through an operation as a plain directed graph.
//!
//! Nodes are the operation, attributes, interfaces, steps and mappings.
//! Values enter at the operation's input attribute, pass through mappings
//! into interface slots, out of the interface, back through output
//! mappings, and return to the operation. Each output mapping also points
//! back at its step, so every step closes its own circle.

use std::fmt;

use crate::graph::cycles::elementary_cycles_of;
use crate::graph::Graph;
use crate::model::{AttributeMapping, Operation, OperationStep, StepTarget};
use crate::pid::Pid;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FlowNode {
    Operation(Pid),
    Attribute(Pid),
    Interface(Pid),
    Step(String),
    Mapping(String),
}

impl fmt::Display for FlowNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowNode::Operation(p) => write!(f, "operation {p}"),
            FlowNode::Attribute(p) => write!(f, "attribute {p}"),
            FlowNode::Interface(p) => write!(f, "interface {p}"),
            FlowNode::Step(s) => write!(f, "step {s}"),
            FlowNode::Mapping(s) => write!(f, "mapping {s}"),
        }
    }
}

pub fn dataflow_edges(op: &Operation, graph: &Graph) -> Vec<(FlowNode, FlowNode)> {
    let mut edges = vec![(
        FlowNode::Operation(op.pid.clone()),
        FlowNode::Attribute(op.executable_on.clone()),
    )];
    steps(&op.steps, "", graph, &mut edges);
    for r in &op.returns {
        edges.push((FlowNode::Attribute(r.clone()), FlowNode::Operation(op.pid.clone())));
    }
    edges
}

fn mapping(m: &AttributeMapping, name: String, edges: &mut Vec<(FlowNode, FlowNode)>) -> FlowNode {
    let node = FlowNode::Mapping(name);
    if let Some(input) = &m.input_attribute {
        edges.push((FlowNode::Attribute(input.clone()), node.clone()));
    }
    edges.push((node.clone(), FlowNode::Attribute(m.output_attribute.clone())));
    node
}

fn steps(list: &[OperationStep], prefix: &str, graph: &Graph, edges: &mut Vec<(FlowNode, FlowNode)>) {
    for step in list {
        let here = format!("{prefix}{}", step.index);
        let node = FlowNode::Step(here.clone());
        for (i, m) in step.input_mappings.iter().enumerate() {
            mapping(m, format!("{here}.in{i}"), edges);
        }
        for (i, m) in step.output_mappings.iter().enumerate() {
            let out = mapping(m, format!("{here}.out{i}"), edges);
            edges.push((out, node.clone()));
        }
        match &step.target {
            StepTarget::TechnologyInterface(ti) => {
                let ti_node = FlowNode::Interface(ti.clone());
                edges.push((node, ti_node.clone()));
                if let Some(ti) = graph.interface(ti) {
                    for a in &ti.inputs {
                        edges.push((FlowNode::Attribute(a.clone()), ti_node.clone()));
                    }
                    for a in &ti.outputs {
                        edges.push((ti_node.clone(), FlowNode::Attribute(a.clone())));
                    }
                }
            }
            StepTarget::Operation(sub) => {
                let sub_node = FlowNode::Operation(sub.clone());
                edges.push((node, sub_node.clone()));
                if let Some(sub) = graph.operation(sub) {
                    edges.push((FlowNode::Attribute(sub.executable_on.clone()), sub_node.clone()));
                    for r in &sub.returns {
                        edges.push((sub_node.clone(), FlowNode::Attribute(r.clone())));
                    }
                }
            }
            StepTarget::Steps(inner) => steps(inner, &format!("{here}/"), graph, edges),
        }
    }
}

/// Elementary circles of the operation's dataflow graph.
pub fn dataflow_cycles(op: &Operation, graph: &Graph) -> Vec<Vec<FlowNode>> {
    elementary_cycles_of(dataflow_edges(op, graph))
}
