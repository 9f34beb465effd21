//! Elementary cycles in the stored graph, and the store refusing a batch
//! that would close an inheritance loop.

use fdo_registry::graph::{EdgeLabel, Graph};
use fdo_registry::model::{Combinator, Entity, TypeProfile, ValidationPolicy};
use fdo_registry::pid::Pid;
use fdo_registry::store::GraphStore;

fn pid(s: &str) -> Pid {
    Pid::parse(&format!("demo/{s}")).unwrap()
}

fn profile(name: &str, parents: &[&str]) -> Entity {
    TypeProfile::new(pid(name), name, vec![], ValidationPolicy::new(Combinator::All, true))
        .with_parents(parents.iter().map(|p| pid(p)).collect())
        .into()
}

fn main() {
    let entities = vec![
        profile("a", &["b"]),
        profile("b", &["c", "a"]),
        profile("c", &["a"]),
        profile("d", &["d"]),
    ];
    let graph = Graph::from_entities(entities.clone());
    for cycle in graph.find_cycles(&[EdgeLabel::InheritsFrom]) {
        let names: Vec<&str> = cycle.iter().map(|p| p.suffix()).collect();
        println!("cycle {}", names.join(" -> "));
    }

    let store = GraphStore::default();
    match store.put_all(entities) {
        Ok(_) => println!("stored, which should not happen"),
        Err(e) => println!("store refused the batch: {e}"),
    }
    println!("store still holds {} entities", store.graph().len());
}
