//! Profile inheritance: C3 order for a diamond, and the fallback warning
//! for hierarchies C3 cannot order.

use fdo_registry::graph::Graph;
use fdo_registry::model::{Combinator, Entity, TypeProfile, ValidationPolicy};
use fdo_registry::pid::Pid;
use fdo_registry::typing::linearize;

fn pid(s: &str) -> Pid {
    Pid::parse(&format!("demo/{s}")).unwrap()
}

fn profile(name: &str, parents: &[&str]) -> Entity {
    TypeProfile::new(pid(name), name, vec![], ValidationPolicy::new(Combinator::All, true))
        .with_parents(parents.iter().map(|p| pid(p)).collect())
        .into()
}

fn show(graph: &Graph, of: &str) {
    let (lin, warnings) = linearize(graph, &pid(of)).unwrap();
    let order: Vec<&str> = lin.order.iter().map(|p| p.suffix()).collect();
    println!("{of}: {order:?} (consistent: {})", lin.consistent);
    for w in warnings {
        println!("  {w}");
    }
}

fn main() {
    let diamond = Graph::from_entities([
        profile("Base", &[]),
        profile("Left", &["Base"]),
        profile("Right", &["Base"]),
        profile("Leaf", &["Left", "Right"]),
    ]);
    show(&diamond, "Leaf");

    // X wants A before B, Y wants B before A
    let crossed = Graph::from_entities([
        profile("A", &[]),
        profile("B", &[]),
        profile("X", &["A", "B"]),
        profile("Y", &["B", "A"]),
        profile("Z", &["X", "Y"]),
    ]);
    show(&crossed, "Z");
}
