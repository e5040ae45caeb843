//! Event alphabet, crash sequences, corpus ingestion and summary statistics.
//!
//! A corpus is an ordered collection of event sequences over a closed label
//! alphabet, optionally carrying per-sequence categorical attributes. All
//! types are immutable after construction and safe to share across threads.

use std::collections::HashMap;
use std::fmt;
use std::io::Read;

use crate::error::{Error, Result};

/// Separator between codes in the `sequence` CSV column.
pub const SEQ_SEPARATOR: char = '-';

/// Reserved category for missing attribute values.
pub const NA: &str = "n/a";

/// Who initiates the event, derived from the description prefix.
/// Informational only; plays no role in any computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Actor {
    Av,
    SecondParty,
    ThirdParty,
    Object,
}

impl Actor {
    fn from_description(desc: &str) -> Actor {
        if desc.starts_with("v1 ") || desc == "v1" {
            Actor::Av
        } else if desc.starts_with("v2 ") || desc == "v2" {
            Actor::SecondParty
        } else if desc.starts_with("v3 ") || desc == "v3" {
            Actor::ThirdParty
        } else {
            Actor::Object
        }
    }
}

impl fmt::Display for Actor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Actor::Av => "AV",
            Actor::SecondParty => "SECOND_PARTY",
            Actor::ThirdParty => "THIRD_PARTY",
            Actor::Object => "OBJECT",
        };
        f.write_str(s)
    }
}

/// One encoded event kind: a short code plus its free-text description.
#[derive(Debug, Clone)]
pub struct EventLabel {
    pub code: String,
    pub description: String,
    pub actor: Actor,
}

/// Index of a label within its alphabet. Only meaningful together with the
/// alphabet that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelId(u16);

impl LabelId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// The closed, ordered set of event labels. Iteration order is insertion
/// order, which fixes matrix row/column indexing downstream.
#[derive(Debug, Clone, Default)]
pub struct EventAlphabet {
    labels: Vec<EventLabel>,
    by_code: HashMap<String, LabelId>,
}

fn validate_code(code: &str) -> std::result::Result<(), &'static str> {
    if code.is_empty() {
        return Err("empty code");
    }
    if code.len() > 4 {
        return Err("code longer than 4 characters");
    }
    if !code
        .chars()
        .all(|c| c.is_ascii_uppercase() || c.is_ascii_digit())
    {
        return Err("code must be uppercase letters/digits with no separators");
    }
    Ok(())
}

impl EventAlphabet {
    pub fn new() -> EventAlphabet {
        EventAlphabet::default()
    }

    /// Build an alphabet from (code, description) pairs, preserving order.
    pub fn from_pairs<I, S, T>(pairs: I) -> Result<EventAlphabet>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        let mut alphabet = EventAlphabet::new();
        for (line, (code, desc)) in pairs.into_iter().enumerate() {
            alphabet.push_at_line(code.into(), desc.into(), line + 2)?;
        }
        Ok(alphabet)
    }

    fn push_at_line(&mut self, code: String, description: String, line: usize) -> Result<LabelId> {
        validate_code(&code).map_err(|reason| Error::InvalidCode {
            line,
            code: code.clone(),
            reason,
        })?;
        if self.by_code.contains_key(&code) {
            return Err(Error::DuplicateCode { line, code });
        }
        let id = LabelId(self.labels.len() as u16);
        let actor = Actor::from_description(&description);
        self.by_code.insert(code.clone(), id);
        self.labels.push(EventLabel {
            code,
            description,
            actor,
        });
        Ok(id)
    }

    /// Append a label; errors mirror ingestion errors but without a useful
    /// line number.
    pub fn push(&mut self, code: &str, description: &str) -> Result<LabelId> {
        self.push_at_line(code.to_string(), description.to_string(), 0)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, id: LabelId) -> &EventLabel {
        &self.labels[id.index()]
    }

    pub fn code(&self, id: LabelId) -> &str {
        &self.labels[id.index()].code
    }

    pub fn id_of(&self, code: &str) -> Option<LabelId> {
        self.by_code.get(code).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &EventLabel> {
        self.labels.iter()
    }

    pub fn ids(&self) -> impl Iterator<Item = LabelId> + '_ {
        (0..self.labels.len()).map(|i| LabelId(i as u16))
    }
}

/// One crash: an identifier plus the ordered event codes, interned against
/// the governing alphabet.
#[derive(Debug, Clone)]
pub struct EventSequence {
    id: String,
    events: Vec<LabelId>,
}

impl EventSequence {
    pub fn new(id: impl Into<String>, events: Vec<LabelId>) -> EventSequence {
        EventSequence {
            id: id.into(),
            events,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn events(&self) -> &[LabelId] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Hyphen-joined code string, e.g. `S1-PR2-X21`.
    pub fn joined(&self, alphabet: &EventAlphabet) -> String {
        let codes: Vec<&str> = self.events.iter().map(|&e| alphabet.code(e)).collect();
        codes.join("-")
    }
}

/// Per-sequence categorical attributes. Every declared attribute has a value
/// for every row; absent values are the literal `n/a` category.
#[derive(Debug, Clone, Default)]
pub struct AttributeTable {
    schema: Vec<String>,
    rows: HashMap<String, Vec<String>>,
}

impl AttributeTable {
    pub fn schema(&self) -> &[String] {
        &self.schema
    }

    pub fn has_attribute(&self, name: &str) -> bool {
        self.schema.iter().any(|a| a == name)
    }

    fn attr_index(&self, name: &str) -> Option<usize> {
        self.schema.iter().position(|a| a == name)
    }

    /// Value of `attr` for sequence `id`; `n/a` for rows never listed.
    pub fn value(&self, id: &str, attr: &str) -> Option<&str> {
        let idx = self.attr_index(attr)?;
        Some(
            self.rows
                .get(id)
                .map(|vals| vals[idx].as_str())
                .unwrap_or(NA),
        )
    }
}

/// A validated multiset of event sequences plus optional attributes.
/// Sequence order is the source file order.
#[derive(Debug, Clone)]
pub struct Corpus {
    alphabet: EventAlphabet,
    sequences: Vec<EventSequence>,
    attributes: Option<AttributeTable>,
}

impl Corpus {
    pub fn new(
        alphabet: EventAlphabet,
        sequences: Vec<EventSequence>,
        attributes: Option<AttributeTable>,
    ) -> Corpus {
        Corpus {
            alphabet,
            sequences,
            attributes,
        }
    }

    pub fn alphabet(&self) -> &EventAlphabet {
        &self.alphabet
    }

    pub fn sequences(&self) -> &[EventSequence] {
        &self.sequences
    }

    pub fn sequence(&self, i: usize) -> &EventSequence {
        &self.sequences[i]
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    pub fn attributes(&self) -> Option<&AttributeTable> {
        self.attributes.as_ref()
    }

    /// New corpus with one extra attribute column, one value per sequence in
    /// corpus order. Used to inject cluster labels for cross-tabulation.
    pub fn with_attribute(&self, name: &str, values: &[String]) -> Corpus {
        assert_eq!(values.len(), self.sequences.len(), "one value per sequence");
        let mut table = self.attributes.clone().unwrap_or_default();
        let old_len = table.schema.len();
        // Replace an existing column of the same name rather than duplicating.
        let replace = table.attr_index(name);
        if replace.is_none() {
            table.schema.push(name.to_string());
        }
        for (seq, value) in self.sequences.iter().zip(values) {
            let row = table
                .rows
                .entry(seq.id().to_string())
                .or_insert_with(|| vec![NA.to_string(); old_len]);
            match replace {
                Some(idx) => row[idx] = value.clone(),
                None => row.push(value.clone()),
            }
        }
        Corpus {
            alphabet: self.alphabet.clone(),
            sequences: self.sequences.clone(),
            attributes: Some(table),
        }
    }

    /// Serialize the sequences back to the `id,sequence` CSV form.
    pub fn to_sequences_csv(&self) -> String {
        let mut out = String::from("id,sequence\n");
        for seq in &self.sequences {
            out.push_str(seq.id());
            out.push(',');
            out.push_str(&seq.joined(&self.alphabet));
            out.push('\n');
        }
        out
    }

    /// Serialize the alphabet back to the `code,description` CSV form.
    pub fn to_alphabet_csv(&self) -> String {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(["code", "description"])
            .expect("in-memory write");
        for label in self.alphabet.iter() {
            wtr.write_record([&label.code, &label.description])
                .expect("in-memory write");
        }
        String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    /// Serialize attributes (if any) with rows in corpus order.
    pub fn to_attributes_csv(&self) -> Option<String> {
        let table = self.attributes.as_ref()?;
        let mut wtr = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["id".to_string()];
        header.extend(table.schema.iter().cloned());
        wtr.write_record(&header).expect("in-memory write");
        for seq in &self.sequences {
            let mut record = vec![seq.id().to_string()];
            for attr in &table.schema {
                record.push(table.value(seq.id(), attr).unwrap_or(NA).to_string());
            }
            wtr.write_record(&record).expect("in-memory write");
        }
        Some(String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("utf-8"))
    }
}

/// Whether unknown codes abort ingestion or extend the alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IngestMode {
    #[default]
    Strict,
    Extend,
}

fn csv_reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(source)
}

/// Load an alphabet from `code,description` CSV.
pub fn load_alphabet<R: Read>(source: R) -> Result<EventAlphabet> {
    let mut reader = csv_reader(source);
    let mut alphabet = EventAlphabet::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2; // 1-based, after the header
        let record = record.map_err(|e| Error::Ingest {
            line,
            message: e.to_string(),
        })?;
        if record.len() != 2 {
            return Err(Error::Ingest {
                line,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        alphabet.push_at_line(record[0].to_string(), record[1].to_string(), line)?;
    }
    Ok(alphabet)
}

/// Load a corpus from `id,sequence` CSV, validating every code against
/// `alphabet`. `attr_source`, when given, is `id,<attr1>,<attr2>,...` CSV
/// whose ids must all exist in the corpus.
pub fn load_corpus<R: Read, A: Read>(
    seq_source: R,
    alphabet: EventAlphabet,
    attr_source: Option<A>,
    mode: IngestMode,
) -> Result<Corpus> {
    let mut alphabet = alphabet;
    let mut reader = csv_reader(seq_source);
    let mut sequences = Vec::new();
    let mut seen_ids: HashMap<String, usize> = HashMap::new();

    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::Ingest {
            line,
            message: e.to_string(),
        })?;
        if record.len() != 2 {
            return Err(Error::Ingest {
                line,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let id = record[0].trim().to_string();
        if id.is_empty() {
            return Err(Error::Ingest {
                line,
                message: "empty id".to_string(),
            });
        }
        if seen_ids.insert(id.clone(), line).is_some() {
            return Err(Error::DuplicateId { line, id });
        }
        let cell = record[1].trim();
        if cell.is_empty() {
            return Err(Error::EmptySequence { line, id });
        }
        let mut events = Vec::new();
        for code in cell.split(SEQ_SEPARATOR) {
            if code.is_empty() {
                return Err(Error::Ingest {
                    line,
                    message: "empty code between separators".to_string(),
                });
            }
            let label = match alphabet.id_of(code) {
                Some(label) => label,
                None => match mode {
                    IngestMode::Strict => {
                        return Err(Error::UnknownCode {
                            line,
                            id,
                            code: code.to_string(),
                        })
                    }
                    IngestMode::Extend => {
                        alphabet.push_at_line(code.to_string(), "(auto)".to_string(), line)?
                    }
                },
            };
            events.push(label);
        }
        sequences.push(EventSequence::new(id, events));
    }

    let attributes = match attr_source {
        None => None,
        Some(source) => {
            let mut reader = csv_reader(source);
            let header = reader.headers().map_err(|e| Error::Ingest {
                line: 1,
                message: e.to_string(),
            })?;
            if header.is_empty() || &header[0] != "id" {
                return Err(Error::Ingest {
                    line: 1,
                    message: "attribute header must start with `id`".to_string(),
                });
            }
            let schema: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
            let mut rows = HashMap::new();
            for (i, record) in reader.records().enumerate() {
                let line = i + 2;
                let record = record.map_err(|e| Error::Ingest {
                    line,
                    message: e.to_string(),
                })?;
                if record.len() != schema.len() + 1 {
                    return Err(Error::Ingest {
                        line,
                        message: format!(
                            "expected {} fields, found {}",
                            schema.len() + 1,
                            record.len()
                        ),
                    });
                }
                let id = record[0].trim().to_string();
                if !seen_ids.contains_key(&id) {
                    return Err(Error::UnknownAttributeId { line, id });
                }
                let values: Vec<String> = record
                    .iter()
                    .skip(1)
                    .map(|v| {
                        let v = v.trim();
                        if v.is_empty() {
                            NA.to_string()
                        } else {
                            v.to_string()
                        }
                    })
                    .collect();
                rows.insert(id, values);
            }
            Some(AttributeTable { schema, rows })
        }
    };

    Ok(Corpus {
        alphabet,
        sequences,
        attributes,
    })
}

/// Summary record for a corpus.
#[derive(Debug, Clone)]
pub struct CorpusStats {
    pub sequences: usize,
    pub events: usize,
    pub min_len: usize,
    pub max_len: usize,
    /// Exact ratio events / sequences; display rounding is the caller's call.
    pub mean_len: f64,
    /// Occurrence count per label, in alphabet order. Counts events, not
    /// containing sequences; mining with max_len = 1 gives the containment
    /// basis and attribute tables may carry a third, report-level basis.
    pub label_counts: Vec<(String, usize)>,
}

impl CorpusStats {
    /// Mean length rounded to one decimal, the customary report format.
    pub fn mean_len_1dp(&self) -> f64 {
        (self.mean_len * 10.0).round() / 10.0
    }
}

pub fn corpus_stats(corpus: &Corpus) -> Result<CorpusStats> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut counts = vec![0usize; corpus.alphabet().len()];
    let mut events = 0usize;
    let mut min_len = usize::MAX;
    let mut max_len = 0usize;
    for seq in corpus.sequences() {
        events += seq.len();
        min_len = min_len.min(seq.len());
        max_len = max_len.max(seq.len());
        for &e in seq.events() {
            counts[e.index()] += 1;
        }
    }
    Ok(CorpusStats {
        sequences: corpus.len(),
        events,
        min_len,
        max_len,
        mean_len: events as f64 / corpus.len() as f64,
        label_counts: corpus
            .alphabet()
            .iter()
            .zip(&counts)
            .map(|(label, &c)| (label.code.clone(), c))
            .collect(),
    })
}

/// Test mileage and crash count for one organization.
#[derive(Debug, Clone)]
pub struct MileageRecord {
    pub organization: String,
    pub miles: u64,
    pub crashes: u64,
}

/// Crash rate per million vehicle-miles, exact and rounded.
#[derive(Debug, Clone)]
pub struct CrashRate {
    pub organization: String,
    pub rate_per_million: f64,
    pub rounded: u64,
}

/// Rates per organization plus an aggregate `All` row.
pub fn crash_rates(records: &[MileageRecord]) -> Result<Vec<CrashRate>> {
    let mut out = Vec::with_capacity(records.len() + 1);
    let mut total_miles = 0u64;
    let mut total_crashes = 0u64;
    for rec in records {
        if rec.miles == 0 {
            return Err(Error::ZeroMiles {
                organization: rec.organization.clone(),
            });
        }
        total_miles += rec.miles;
        total_crashes += rec.crashes;
        let rate = rec.crashes as f64 / (rec.miles as f64 / 1_000_000.0);
        out.push(CrashRate {
            organization: rec.organization.clone(),
            rate_per_million: rate,
            rounded: rate.round() as u64,
        });
    }
    if total_miles > 0 {
        let rate = total_crashes as f64 / (total_miles as f64 / 1_000_000.0);
        out.push(CrashRate {
            organization: "All".to_string(),
            rate_per_million: rate,
            rounded: rate.round() as u64,
        });
    }
    Ok(out)
}

/// Load mileage records from `organization,miles,crashes` CSV.
pub fn load_mileage<R: Read>(source: R) -> Result<Vec<MileageRecord>> {
    let mut reader = csv_reader(source);
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::Ingest {
            line,
            message: e.to_string(),
        })?;
        if record.len() != 3 {
            return Err(Error::Ingest {
                line,
                message: format!("expected 3 fields, found {}", record.len()),
            });
        }
        let parse = |field: &str, what: &str| -> Result<u64> {
            field.trim().parse::<u64>().map_err(|_| Error::Ingest {
                line,
                message: format!("invalid {what}: {field:?}"),
            })
        };
        out.push(MileageRecord {
            organization: record[0].trim().to_string(),
            miles: parse(&record[1], "miles")?,
            crashes: parse(&record[2], "crashes")?,
        });
    }
    Ok(out)
}
