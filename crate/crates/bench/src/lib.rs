//! Fixture access shared by the engine benchmarks.

use std::path::PathBuf;

use orbindex::io::model_doc::load_model;
use orbindex::sector::QuotientModel;

pub fn fixture(name: &str) -> QuotientModel {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    load_model(&p, None).unwrap_or_else(|e| panic!("{name}: {e}"))
}
