//! Input resolution: explicit paths beat `$SEQCRASH_DATA`, which beats the
//! corpus compiled into the binary.

use std::fs;
use std::path::PathBuf;

use seqcrash::bundled;
use seqcrash::corpus::{load_alphabet, load_corpus, Corpus, IngestMode};
use seqcrash::Result;

use crate::GlobalOpts;

pub const DATA_ENV: &str = "SEQCRASH_DATA";

fn env_path(file: &str) -> Option<PathBuf> {
    std::env::var_os(DATA_ENV).map(|dir| PathBuf::from(dir).join(file))
}

enum Source {
    Bundled(&'static str),
    File(PathBuf),
}

impl Source {
    fn read(&self) -> Result<String> {
        match self {
            Source::Bundled(text) => Ok((*text).to_string()),
            Source::File(path) => Ok(fs::read_to_string(path)?),
        }
    }
}

fn resolve(explicit: &Option<String>, env_file: &str, bundled: &'static str) -> Source {
    if let Some(path) = explicit {
        return Source::File(PathBuf::from(path));
    }
    if let Some(path) = env_path(env_file) {
        return Source::File(path);
    }
    Source::Bundled(bundled)
}

pub fn load(opts: &GlobalOpts) -> Result<Corpus> {
    let alphabet_src = resolve(&opts.alphabet, "alphabet.csv", bundled::ALPHABET_CSV);
    let corpus_src = resolve(&opts.corpus, "corpus_2015_2019.csv", bundled::CORPUS_CSV);
    // Attribute ids must match the corpus, so the bundled attribute table
    // only applies when the corpus itself is the bundled one.
    let attr_src = match (&opts.attributes, &opts.corpus, env_path("attributes.csv")) {
        (Some(path), _, _) => Some(Source::File(PathBuf::from(path))),
        (None, Some(_), _) => None,
        (None, None, Some(path)) if path.is_file() => Some(Source::File(path)),
        (None, None, Some(_)) => None,
        (None, None, None) => Some(Source::Bundled(bundled::ATTRIBUTES_CSV)),
    };
    let alphabet = load_alphabet(alphabet_src.read()?.as_bytes())?;
    let mode = if opts.extend_alphabet {
        IngestMode::Extend
    } else {
        IngestMode::Strict
    };
    let attrs = attr_src.map(|s| s.read()).transpose()?;
    load_corpus(
        corpus_src.read()?.as_bytes(),
        alphabet,
        attrs.as_deref().map(str::as_bytes),
        mode,
    )
}

/// Load everything twice and require identical canonical serialization.
pub fn verify_seed_order(opts: &GlobalOpts) -> Result<()> {
    let first = load(opts)?;
    let second = load(opts)?;
    let same = first.to_sequences_csv() == second.to_sequences_csv()
        && first.to_alphabet_csv() == second.to_alphabet_csv()
        && first.to_attributes_csv() == second.to_attributes_csv();
    if same {
        Ok(())
    } else {
        Err(seqcrash::Error::Ingest {
            line: 0,
            message: "inputs did not reload deterministically".to_string(),
        })
    }
}
