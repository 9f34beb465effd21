//! Plans and runs the seed's e-mail lookup. The python step is answered
//! from the bundled fixture table, so nothing outside the process runs.

use fdo_registry::model::Value;
use fdo_registry::operations::{execute, plan};
use fdo_registry::service::seed::{self, pid, seed_adapters, seed_corpus};
use fdo_registry::store::GraphStore;

fn main() {
    let store = GraphStore::default();
    store.put_all(seed_corpus()).unwrap();
    let graph = store.graph();
    let op = pid(seed::EMAIL_OPERATION);

    let p = plan(&op, &graph).unwrap();
    println!("stages: {:?}", p.plan.stages);
    for e in &p.plan.dataflow_edges {
        println!("  {:?} --{}--> {:?}", e.producer, e.attribute, e.consumer);
    }

    let adapters = seed_adapters();
    let out = execute(&op, Value::string(seed::TEST_ORCID_URL), &adapters, &graph).unwrap();
    for (attribute, value) in &out {
        println!("{attribute} = {value:?}");
    }

    match execute(&op, Value::string("https://orcid.org/0000-0001-0000-0009"), &adapters, &graph) {
        Ok(out) => println!("unexpected result {out:?}"),
        Err(e) => println!("unknown ORCiD: {e}"),
    }
}
