//! Checks two metadata records against the seed's kernel information profile.

use fdo_registry::diagnostics::has_errors;
use fdo_registry::model::{InformationRecord, Value};
use fdo_registry::service::seed::{self, pid, seed_corpus};
use fdo_registry::store::GraphStore;
use fdo_registry::validation::validate_record;

fn record(contact: &str) -> InformationRecord {
    let mut checksum = InformationRecord::new();
    checksum.insert(
        pid("hash"),
        Value::string("9f86d081884c7d659a2feaa0c55ad015a3bf4f1b2b0b822cd15d6c15b0f00a08"),
    );
    checksum.insert(pid("algorithm"), Value::string("sha256"));

    let mut r = InformationRecord::new();
    r.insert(pid("dateCreated"), Value::string("2024-03-01T12:00:00Z"));
    r.insert(pid(seed::CONTACT), Value::string(contact));
    r.insert(pid(seed::CHECKSUM), checksum.into());
    r
}

fn main() {
    let store = GraphStore::default();
    store.put_all(seed_corpus()).unwrap();
    let graph = store.graph();
    let kip = pid(seed::KIP);

    for contact in [seed::TEST_ORCID_URL, "mailto:someone@example.org"] {
        let results = validate_record(&record(contact), &kip, &graph);
        let verdict = if has_errors(&results) { "rejected" } else { "accepted" };
        println!("contact {contact}: {verdict}");
        for r in results {
            println!("  {r}");
        }
    }
}
