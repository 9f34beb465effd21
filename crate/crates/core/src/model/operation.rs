use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::datatype::duplicates;
use super::meta::AdministrativeMetadata;
use super::value::Value;
use crate::pid::Pid;

pub const DEFAULT_MARKER: &str = "{{input}}";

/// Environment-independent description of a technology. Adapters are
/// opaque references to environment-specific implementations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct TechnologyInterface {
    pub pid: Pid,
    pub meta: AdministrativeMetadata,
    pub inputs: Vec<Pid>,
    pub outputs: Vec<Pid>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub adapters: Vec<Pid>,
}

impl TechnologyInterface {
    pub fn new(pid: Pid, name: &str, inputs: Vec<Pid>, outputs: Vec<Pid>) -> Self {
        Self {
            pid,
            meta: AdministrativeMetadata::named(name),
            inputs,
            outputs,
            adapters: Vec::new(),
        }
    }

    pub fn with_adapters(mut self, adapters: Vec<Pid>) -> Self {
        self.adapters = adapters;
        self
    }

    pub(crate) fn violations(&self, out: &mut Vec<String>) {
        self.meta.violations(out);
        duplicates("inputs", &self.inputs, out);
        duplicates("outputs", &self.outputs, out);
        duplicates("adapters", &self.adapters, out);
        let inputs: BTreeSet<_> = self.inputs.iter().collect();
        for both in self.outputs.iter().filter(|p| inputs.contains(p)) {
            out.push(format!("{both} is listed as both input and output"));
        }
    }
}

/// Wires one value into an attribute: a constant or an input attribute,
/// optionally narrowed to one list element and inserted into a template.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct AttributeMapping {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_attribute: Option<Pid>,
    pub output_attribute: Pid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant_value: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marker: Option<String>,
}

impl AttributeMapping {
    pub fn from_attribute(input: Pid, output: Pid) -> Self {
        Self {
            input_attribute: Some(input),
            output_attribute: output,
            constant_value: None,
            index: None,
            template: None,
            marker: None,
        }
    }

    pub fn constant(value: Value, output: Pid) -> Self {
        Self {
            input_attribute: None,
            output_attribute: output,
            constant_value: Some(value),
            index: None,
            template: None,
            marker: None,
        }
    }

    pub fn at_index(mut self, index: u64) -> Self {
        self.index = Some(index);
        self
    }

    pub fn with_template(mut self, template: impl Into<String>) -> Self {
        self.template = Some(template.into());
        self
    }

    pub fn with_marker(mut self, marker: impl Into<String>) -> Self {
        self.marker = Some(marker.into());
        self
    }

    pub fn effective_marker<'a>(&'a self, default: &'a str) -> &'a str {
        self.marker.as_deref().unwrap_or(default)
    }

    /// Applies index selection (0-based; a scalar counts as a one-element
    /// list) and then template substitution to a source value.
    pub fn transform(&self, source: &Value, default_marker: &str) -> Result<Value, String> {
        let mut value = source.clone();
        if let Some(index) = self.index {
            let elements = source.elements();
            value = elements
                .get(index as usize)
                .map(|v| (*v).clone())
                .ok_or_else(|| {
                    format!("index {index} out of range for {} value(s)", elements.len())
                })?;
        }
        if let Some(template) = &self.template {
            let marker = self.effective_marker(default_marker);
            value = Value::String(template.replace(marker, &value.text()));
        }
        Ok(value)
    }

    pub(crate) fn violations(&self, path: &str, out: &mut Vec<String>) {
        match (&self.input_attribute, &self.constant_value) {
            (None, None) => out.push(format!(
                "{path}: needs either inputAttribute or constantValue"
            )),
            (Some(_), Some(_)) => out.push(format!(
                "{path}: inputAttribute and constantValue are mutually exclusive"
            )),
            _ => {}
        }
        if let Some(marker) = &self.marker {
            if marker.is_empty() {
                out.push(format!("{path}: marker must not be empty"));
            } else if let Some(template) = &self.template {
                if !template.contains(marker.as_str()) {
                    out.push(format!(
                        "{path}: template does not contain the marker `{marker}`"
                    ));
                }
            }
        }
        if let Some(value) = &self.constant_value {
            if !value.is_homogeneous() {
                out.push(format!("{path}: constantValue contains a heterogeneous list"));
            }
        }
    }
}

/// What an operation step runs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub enum StepTarget {
    TechnologyInterface(Pid),
    Operation(Pid),
    Steps(Vec<OperationStep>),
}

/// A task inside an operation. Steps have no identity of their own.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct OperationStep {
    pub index: u64,
    pub target: StepTarget,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub input_mappings: Vec<AttributeMapping>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub output_mappings: Vec<AttributeMapping>,
}

impl OperationStep {
    pub fn new(index: u64, target: StepTarget) -> Self {
        Self {
            index,
            target,
            input_mappings: Vec::new(),
            output_mappings: Vec::new(),
        }
    }

    pub fn input(mut self, mapping: AttributeMapping) -> Self {
        self.input_mappings.push(mapping);
        self
    }

    pub fn output(mut self, mapping: AttributeMapping) -> Self {
        self.output_mappings.push(mapping);
        self
    }

    /// Every mapping of this step and of nested steps, depth first.
    pub fn all_mappings(&self) -> Vec<&AttributeMapping> {
        let mut out: Vec<&AttributeMapping> = self.input_mappings.iter().collect();
        if let StepTarget::Steps(inner) = &self.target {
            for step in inner {
                out.extend(step.all_mappings());
            }
        }
        out.extend(self.output_mappings.iter());
        out
    }
}

pub(crate) fn step_list_violations(path: &str, steps: &[OperationStep], out: &mut Vec<String>) {
    if steps.is_empty() {
        out.push(format!("{path} must not be empty"));
    }
    for pair in steps.windows(2) {
        if pair[1].index <= pair[0].index {
            out.push(format!(
                "{path}: indices must be strictly increasing ({} follows {})",
                pair[1].index, pair[0].index
            ));
        }
    }
    for (i, step) in steps.iter().enumerate() {
        let here = format!("{path}[{i}]");
        for (j, m) in step.input_mappings.iter().enumerate() {
            m.violations(&format!("{here}.inputMappings[{j}]"), out);
        }
        for (j, m) in step.output_mappings.iter().enumerate() {
            m.violations(&format!("{here}.outputMappings[{j}]"), out);
        }
        if let StepTarget::Steps(inner) = &step.target {
            step_list_violations(&format!("{here}.target.steps"), inner, out);
        }
    }
}

/// Technology-agnostic action executable on exactly one attribute.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Operation {
    pub pid: Pid,
    pub meta: AdministrativeMetadata,
    pub executable_on: Pid,
    pub returns: Vec<Pid>,
    pub steps: Vec<OperationStep>,
}

impl Operation {
    pub fn new(pid: Pid, name: &str, executable_on: Pid, returns: Vec<Pid>) -> Self {
        Self {
            pid,
            meta: AdministrativeMetadata::named(name),
            executable_on,
            returns,
            steps: Vec::new(),
        }
    }

    pub fn step(mut self, step: OperationStep) -> Self {
        self.steps.push(step);
        self
    }

    /// Step targets at any nesting depth that name an interface or operation.
    pub fn referenced_targets(&self) -> Vec<&StepTarget> {
        fn walk<'a>(steps: &'a [OperationStep], out: &mut Vec<&'a StepTarget>) {
            for step in steps {
                match &step.target {
                    StepTarget::Steps(inner) => walk(inner, out),
                    other => out.push(other),
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.steps, &mut out);
        out
    }

    pub fn all_mappings(&self) -> Vec<&AttributeMapping> {
        self.steps.iter().flat_map(|s| s.all_mappings()).collect()
    }

    pub(crate) fn violations(&self, out: &mut Vec<String>) {
        self.meta.violations(out);
        duplicates("returns", &self.returns, out);
        step_list_violations("steps", &self.steps, out);
    }
}
