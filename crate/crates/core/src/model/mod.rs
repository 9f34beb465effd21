//! Entities of the typing model.
//!
//! Data types come in two flavours, [`AtomicDataType`] (value syntax) and
//! [`TypeProfile`] (structure). [`Attribute`]s bind a data type to a PID so
//! that operations can attach to it. [`Operation`]s are built from
//! [`OperationStep`]s that call [`TechnologyInterface`]s or other operations,
//! wired together by [`AttributeMapping`]s.
//!
//! Every entity is an immutable value; the store replaces whole entities.

mod attribute;
mod datatype;
mod meta;
mod operation;
mod value;

use serde::{Deserialize, Serialize};

pub use attribute::{Attribute, CardinalityClass, CardinalityRange};
pub use datatype::{
    AtomicDataType, Combinator, PrimitiveKind, Restrictions, TypeProfile, ValidationPolicy,
};
pub use meta::{AdministrativeMetadata, Timestamp};
pub use operation::{
    AttributeMapping, Operation, OperationStep, StepTarget, TechnologyInterface, DEFAULT_MARKER,
};
pub use value::{Decimal, InformationRecord, Value};

use crate::pid::Pid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EntityKind {
    AtomicDataType,
    TypeProfile,
    Attribute,
    TechnologyInterface,
    Operation,
}

impl EntityKind {
    pub fn is_data_type(self) -> bool {
        matches!(self, EntityKind::AtomicDataType | EntityKind::TypeProfile)
    }
}

impl std::fmt::Display for EntityKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

/// Any PID-addressed entity, discriminated by `entityType` in documents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "entityType")]
pub enum Entity {
    AtomicDataType(AtomicDataType),
    TypeProfile(TypeProfile),
    Attribute(Attribute),
    TechnologyInterface(TechnologyInterface),
    Operation(Operation),
}

impl Entity {
    pub fn pid(&self) -> &Pid {
        match self {
            Entity::AtomicDataType(e) => &e.pid,
            Entity::TypeProfile(e) => &e.pid,
            Entity::Attribute(e) => &e.pid,
            Entity::TechnologyInterface(e) => &e.pid,
            Entity::Operation(e) => &e.pid,
        }
    }

    pub fn kind(&self) -> EntityKind {
        match self {
            Entity::AtomicDataType(_) => EntityKind::AtomicDataType,
            Entity::TypeProfile(_) => EntityKind::TypeProfile,
            Entity::Attribute(_) => EntityKind::Attribute,
            Entity::TechnologyInterface(_) => EntityKind::TechnologyInterface,
            Entity::Operation(_) => EntityKind::Operation,
        }
    }

    pub fn meta(&self) -> &AdministrativeMetadata {
        match self {
            Entity::AtomicDataType(e) => &e.meta,
            Entity::TypeProfile(e) => &e.meta,
            Entity::Attribute(e) => &e.meta,
            Entity::TechnologyInterface(e) => &e.meta,
            Entity::Operation(e) => &e.meta,
        }
    }

    pub fn meta_mut(&mut self) -> &mut AdministrativeMetadata {
        match self {
            Entity::AtomicDataType(e) => &mut e.meta,
            Entity::TypeProfile(e) => &mut e.meta,
            Entity::Attribute(e) => &mut e.meta,
            Entity::TechnologyInterface(e) => &mut e.meta,
            Entity::Operation(e) => &mut e.meta,
        }
    }

    pub fn name(&self) -> &str {
        &self.meta().name
    }

    /// Structural (single-entity) invariant violations, empty when the
    /// entity is well formed.
    pub fn structural_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        match self {
            Entity::AtomicDataType(e) => e.violations(&mut out),
            Entity::TypeProfile(e) => e.violations(&mut out),
            Entity::Attribute(e) => e.violations(&mut out),
            Entity::TechnologyInterface(e) => e.violations(&mut out),
            Entity::Operation(e) => e.violations(&mut out),
        }
        out
    }

    /// Equal up to the store-managed metadata stamps.
    pub fn same_content(&self, other: &Entity) -> bool {
        let mut a = self.clone();
        let mut b = other.clone();
        let (ma, mb) = (a.meta_mut(), b.meta_mut());
        if !ma.same_content(mb) {
            return false;
        }
        *ma = AdministrativeMetadata::default();
        *mb = AdministrativeMetadata::default();
        a == b
    }

    pub fn as_atomic(&self) -> Option<&AtomicDataType> {
        match self {
            Entity::AtomicDataType(e) => Some(e),
            _ => None,
        }
    }

    pub fn as_profile(&self) -> Option<&TypeProfile> {
        match self {
            Entity::TypeProfile(e) => Some(e),
            _ => None,
        }
    }

    pub fn as_attribute(&self) -> Option<&Attribute> {
        match self {
            Entity::Attribute(e) => Some(e),
            _ => None,
        }
    }

    pub fn as_interface(&self) -> Option<&TechnologyInterface> {
        match self {
            Entity::TechnologyInterface(e) => Some(e),
            _ => None,
        }
    }

    pub fn as_operation(&self) -> Option<&Operation> {
        match self {
            Entity::Operation(e) => Some(e),
            _ => None,
        }
    }
}

impl From<AtomicDataType> for Entity {
    fn from(e: AtomicDataType) -> Self {
        Entity::AtomicDataType(e)
    }
}

impl From<TypeProfile> for Entity {
    fn from(e: TypeProfile) -> Self {
        Entity::TypeProfile(e)
    }
}

impl From<Attribute> for Entity {
    fn from(e: Attribute) -> Self {
        Entity::Attribute(e)
    }
}

impl From<TechnologyInterface> for Entity {
    fn from(e: TechnologyInterface) -> Self {
        Entity::TechnologyInterface(e)
    }
}

impl From<Operation> for Entity {
    fn from(e: Operation) -> Self {
        Entity::Operation(e)
    }
}
