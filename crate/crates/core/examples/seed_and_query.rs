//! Loads the seed corpus into a store and asks a few questions of it.

use fdo_registry::operations::{operations_for_attribute, operations_for_datatype};
use fdo_registry::service::seed::{self, pid, seed_corpus};
use fdo_registry::store::GraphStore;
use fdo_registry::typing::parent_chain;

fn main() {
    let store = GraphStore::default();
    let outcomes = store.put_all(seed_corpus()).expect("seed corpus is valid");
    println!("stored {} entities", outcomes.len());

    let graph = store.graph();
    let chain = parent_chain(&graph, &pid(seed::ORCID_URL)).unwrap();
    println!("ORCiD-URL inherits along {chain:?}");

    let by_attribute = operations_for_attribute(&pid(seed::CONTACT), &graph).unwrap();
    println!("operations on contact: {by_attribute:?}");
    let by_type = operations_for_datatype(&pid("Checksum"), &graph).unwrap();
    println!("operations on Checksum values: {by_type:?}");
}
