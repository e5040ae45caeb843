//! The 2015-2019 California AV crash corpus compiled into the binary.
//!
//! The corpus carries a `cluster_paper` attribute with the published group
//! number of each sequence; ids are synthetic (`g<group>-<seq#>-<copy#>`)
//! because the source reports identify crashes only by narrative.

use crate::corpus::{self, Corpus, IngestMode, MileageRecord};

pub const ALPHABET_CSV: &str = include_str!("../../../data/alphabet.csv");
pub const CORPUS_CSV: &str = include_str!("../../../data/corpus_2015_2019.csv");
pub const ATTRIBUTES_CSV: &str = include_str!("../../../data/attributes.csv");
pub const MILEAGE_CSV: &str = include_str!("../../../data/mileage.csv");

/// Attribute column holding the published group number (1..=7).
pub const CLUSTER_PAPER: &str = "cluster_paper";

/// The bundled 168-sequence corpus. The embedded data is validated by the
/// test suite, so loading cannot fail at runtime.
pub fn corpus() -> Corpus {
    let alphabet = corpus::load_alphabet(ALPHABET_CSV.as_bytes()).expect("bundled alphabet");
    corpus::load_corpus(
        CORPUS_CSV.as_bytes(),
        alphabet,
        Some(ATTRIBUTES_CSV.as_bytes()),
        IngestMode::Strict,
    )
    .expect("bundled corpus")
}

/// The bundled per-organization test mileage records.
pub fn mileage() -> Vec<MileageRecord> {
    corpus::load_mileage(MILEAGE_CSV.as_bytes()).expect("bundled mileage")
}
