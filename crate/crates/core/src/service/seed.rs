//! A small, self-consistent corpus: URL types, an ISO 8601 date type, an
//! excerpt of a kernel information profile with an embedded checksum
//! profile, two technology interfaces, and the two example operations.

use crate::model::{
    AtomicDataType, Attribute, AttributeMapping, CardinalityRange, Combinator, Entity, Operation,
    OperationStep, PrimitiveKind, Restrictions, StepTarget, TechnologyInterface, TypeProfile,
    ValidationPolicy, Value,
};
use crate::operations::{AdapterRegistry, Builtin, FixtureTable};
use crate::pid::Pid;

pub const SEED_PREFIX: &str = "seed";

/// Lookup table that stands in for the ORCiD API and the integrity script.
pub const SEED_FIXTURE: &str = include_str!("../../fixtures/seed-fixture.tsv");

/// The public test ORCiD used throughout the examples.
pub const TEST_ORCID_URL: &str = "https://orcid.org/0000-0002-1825-0097";
pub const TEST_EMAIL: &str = "j.carberry@example.org";

pub fn pid(suffix: &str) -> Pid {
    Pid::new(SEED_PREFIX, suffix).expect("seed pids are well formed")
}

pub const URL: &str = "URL";
pub const ORCID_URL: &str = "ORCiD-URL";
pub const CONTACT: &str = "contact";
pub const CHECKSUM: &str = "checksum";
pub const KIP: &str = "helmholtz-kip";
pub const EMAIL_OPERATION: &str = "get-primary-email";
pub const DOWNLOAD_OPERATION: &str = "download-and-check";
pub const REGEX_INTERFACE: &str = "regex";
pub const PYTHON_INTERFACE: &str = "python-script";
pub const REGEX_ADAPTER: &str = "adapter-regex";
pub const PYTHON_ADAPTER: &str = "adapter-python-fixture";

fn atomic(suffix: &str, name: &str, kind: PrimitiveKind, r: Restrictions) -> Entity {
    AtomicDataType::new(pid(suffix), name, kind)
        .with_restrictions(r)
        .into()
}

fn child(suffix: &str, name: &str, parent: &str, r: Restrictions) -> Entity {
    AtomicDataType::new(pid(suffix), name, PrimitiveKind::String)
        .with_parent(pid(parent))
        .with_restrictions(r)
        .into()
}

fn attr(suffix: &str, ty: &str, card: CardinalityRange) -> Entity {
    Attribute::new(pid(suffix), suffix, pid(ty), card).into()
}

fn data_types() -> Vec<Entity> {
    vec![
        atomic("String", "String", PrimitiveKind::String, Restrictions::default()),
        atomic(
            URL,
            "URL",
            PrimitiveKind::String,
            Restrictions::regex(r"https?://[A-Za-z0-9.-]+(:[0-9]+)?(/[^\s]*)?"),
        ),
        child(
            ORCID_URL,
            "ORCiD-URL",
            URL,
            Restrictions::regex(r"https://orcid\.org/\d{4}-\d{4}-\d{4}-\d{3}[0-9X]"),
        ),
        child(
            "ORCiD",
            "ORCiD",
            "String",
            Restrictions::regex(r"\d{4}-\d{4}-\d{4}-\d{3}[0-9X]"),
        ),
        child(
            "EMail",
            "E-mail address",
            "String",
            Restrictions::regex(r"[^@\s]+@[^@\s]+\.[A-Za-z]+"),
        ),
        child(
            "ISO8601-Date",
            "ISO 8601 date-time",
            "String",
            Restrictions::regex(
                r"\d{4}-\d{2}-\d{2}(T\d{2}:\d{2}(:\d{2}(\.\d+)?)?(Z|[+-]\d{2}:\d{2}))?",
            ),
        ),
        child(
            "HexString",
            "Hexadecimal digest",
            "String",
            Restrictions::regex("[0-9a-f]{32,128}"),
        ),
        child(
            "HashAlgorithm",
            "Hash algorithm",
            "String",
            Restrictions {
                permitted_values: Some(
                    ["md5", "sha1", "sha256", "sha512"].map(Value::from).to_vec(),
                ),
                ..Restrictions::default()
            },
        ),
        TypeProfile::new(
            pid("Checksum"),
            "Checksum",
            vec![pid("hash"), pid("algorithm")],
            ValidationPolicy::new(Combinator::All, false),
        )
        .into(),
        TypeProfile::new(
            pid(KIP),
            "Helmholtz KIP (excerpt)",
            vec![pid("dateCreated"), pid("dateModified"), pid(CONTACT), pid(CHECKSUM)],
            ValidationPolicy::new(Combinator::All, true),
        )
        .into(),
    ]
}

fn attributes() -> Vec<Entity> {
    use CardinalityRange as C;
    vec![
        attr("dateCreated", "ISO8601-Date", C::mandatory()),
        attr("dateModified", "ISO8601-Date", C::optional()),
        attr(CONTACT, ORCID_URL, C::optional()),
        attr(CHECKSUM, "Checksum", C::mandatory()),
        attr("hash", "HexString", C::mandatory()),
        attr("algorithm", "HashAlgorithm", C::mandatory()),
        attr("regexInput", "String", C::mandatory()),
        attr("regexPattern", "String", C::mandatory()),
        attr("regexOutput", "String", C::unbounded(1)),
        attr("extractedOrcid", "ORCiD", C::mandatory()),
        attr("runCommand", "String", C::mandatory()),
        attr("returnValues", "String", C::unbounded(1)),
        attr("emailAddress", "EMail", C::mandatory()),
        attr("integrityStatus", "String", C::mandatory()),
    ]
}

fn interfaces() -> Vec<Entity> {
    vec![
        TechnologyInterface::new(
            pid(REGEX_INTERFACE),
            "Regex",
            vec![pid("regexInput"), pid("regexPattern")],
            vec![pid("regexOutput")],
        )
        .with_adapters(vec![pid(REGEX_ADAPTER)])
        .into(),
        TechnologyInterface::new(
            pid(PYTHON_INTERFACE),
            "Python Script",
            vec![pid("runCommand")],
            vec![pid("returnValues")],
        )
        .with_adapters(vec![pid(PYTHON_ADAPTER)])
        .into(),
    ]
}

fn operations() -> Vec<Entity> {
    let email = Operation::new(
        pid(EMAIL_OPERATION),
        "Get primary e-mail from ORCiD via API",
        pid(CONTACT),
        vec![pid("emailAddress")],
    )
    .step(
        OperationStep::new(0, StepTarget::TechnologyInterface(pid(REGEX_INTERFACE)))
            .input(AttributeMapping::from_attribute(pid(CONTACT), pid("regexInput")))
            .input(AttributeMapping::constant(
                Value::string(r"https://orcid\.org/(\d{4}-\d{4}-\d{4}-\d{3}[0-9X])"),
                pid("regexPattern"),
            ))
            .output(
                AttributeMapping::from_attribute(pid("regexOutput"), pid("extractedOrcid"))
                    .at_index(1),
            ),
    )
    .step(
        OperationStep::new(1, StepTarget::TechnologyInterface(pid(PYTHON_INTERFACE)))
            .input(
                AttributeMapping::from_attribute(pid("extractedOrcid"), pid("runCommand"))
                    .with_template("python fetch_email.py {{input}}"),
            )
            .output(
                AttributeMapping::from_attribute(pid("returnValues"), pid("emailAddress"))
                    .at_index(0),
            ),
    );
    let download = Operation::new(
        pid(DOWNLOAD_OPERATION),
        "Download Resource and Check Integrity",
        pid(CHECKSUM),
        vec![pid("integrityStatus")],
    )
    .step(
        OperationStep::new(0, StepTarget::TechnologyInterface(pid(PYTHON_INTERFACE)))
            .input(
                AttributeMapping::from_attribute(pid(CHECKSUM), pid("runCommand"))
                    .with_template("python download_and_verify.py {{input}}"),
            )
            .output(
                AttributeMapping::from_attribute(pid("returnValues"), pid("integrityStatus"))
                    .at_index(0),
            ),
    );
    vec![email.into(), download.into()]
}

/// Every seed entity, in no particular order.
pub fn seed_corpus() -> Vec<Entity> {
    let mut all = data_types();
    all.extend(attributes());
    all.extend(interfaces());
    all.extend(operations());
    all
}

/// Adapters that make both seed operations executable offline.
pub fn seed_adapters() -> AdapterRegistry {
    let table = FixtureTable::parse(SEED_FIXTURE).expect("seed fixture parses");
    let mut registry = AdapterRegistry::new();
    registry
        .register(pid(REGEX_ADAPTER), pid(REGEX_INTERFACE), Builtin::Regex)
        .register(
            pid(PYTHON_ADAPTER),
            pid(PYTHON_INTERFACE),
            Builtin::FixtureLookup(table),
        );
    registry
}
