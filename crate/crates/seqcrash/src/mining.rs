//! Subsequence and n-gram frequency mining with per-sequence containment
//! counting: a pattern's count is the number of sequences containing it at
//! least once, not its total number of occurrences.

use std::collections::{HashMap, HashSet};

use crate::corpus::{Corpus, EventAlphabet, EventSequence, LabelId};
use crate::error::{Error, Result};

/// An ordered selection of label codes. `contiguous` patterns (n-grams)
/// must appear at adjacent positions; plain subsequences only in order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsequencePattern {
    pub elements: Vec<LabelId>,
    pub contiguous: bool,
}

impl SubsequencePattern {
    pub fn new(elements: Vec<LabelId>, contiguous: bool) -> SubsequencePattern {
        SubsequencePattern {
            elements,
            contiguous,
        }
    }

    pub fn joined(&self, alphabet: &EventAlphabet) -> String {
        let codes: Vec<&str> = self.elements.iter().map(|&e| alphabet.code(e)).collect();
        codes.join("-")
    }
}

/// True iff `pattern` occurs in `seq` (adjacent when contiguous).
pub fn contains_subsequence(seq: &EventSequence, pattern: &SubsequencePattern) -> bool {
    let events = seq.events();
    let pat = &pattern.elements;
    if pat.is_empty() {
        return true;
    }
    if pat.len() > events.len() {
        return false;
    }
    if pattern.contiguous {
        events.windows(pat.len()).any(|w| w == pat.as_slice())
    } else {
        let mut next = 0;
        for &e in events {
            if e == pat[next] {
                next += 1;
                if next == pat.len() {
                    return true;
                }
            }
        }
        false
    }
}

/// One mined pattern with its containment count.
#[derive(Debug, Clone)]
pub struct FrequencyRow {
    pub elements: Vec<LabelId>,
    pub count: usize,
}

impl FrequencyRow {
    /// Exact containment share in [0, 1].
    pub fn share(&self, corpus_size: usize) -> f64 {
        self.count as f64 / corpus_size as f64
    }

    /// Share rounded to a whole percent, the display form.
    pub fn share_percent(&self, corpus_size: usize) -> u32 {
        (100.0 * self.share(corpus_size)).round() as u32
    }

    pub fn joined(&self, alphabet: &EventAlphabet) -> String {
        let codes: Vec<&str> = self.elements.iter().map(|&e| alphabet.code(e)).collect();
        codes.join("-")
    }
}

/// Ranked containment counts. Rows are ordered by count descending, then
/// pattern length ascending, then lexicographically by codes.
#[derive(Debug, Clone)]
pub struct FrequencyTable {
    pub rows: Vec<FrequencyRow>,
    pub corpus_size: usize,
    pub contiguous: bool,
}

/// Distinct patterns of a single sequence, up to `max_len` elements.
fn sequence_patterns(
    events: &[LabelId],
    max_len: usize,
    contiguous: bool,
) -> HashSet<Vec<LabelId>> {
    let n = events.len();
    let mut out = HashSet::new();
    if contiguous {
        for len in 1..=max_len.min(n) {
            for w in events.windows(len) {
                out.insert(w.to_vec());
            }
        }
    } else {
        // Sequences here are short (the bundled maximum is 5), so the
        // 2^n - 1 subset enumeration is the whole search space.
        assert!(
            n < 64,
            "subsequence enumeration supports sequences of at most 63 events"
        );
        for mask in 1u64..(1u64 << n) {
            if (mask.count_ones() as usize) > max_len {
                continue;
            }
            let sub: Vec<LabelId> = (0..n)
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| events[i])
                .collect();
            out.insert(sub);
        }
    }
    out
}

/// Mine every pattern of length <= `max_len` occurring in at least one
/// sequence and return the `top_k` rows.
pub fn frequent_subsequences(
    corpus: &Corpus,
    max_len: usize,
    top_k: usize,
    contiguous: bool,
) -> Result<FrequencyTable> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut counts: HashMap<Vec<LabelId>, usize> = HashMap::new();
    for seq in corpus.sequences() {
        for pattern in sequence_patterns(seq.events(), max_len, contiguous) {
            *counts.entry(pattern).or_insert(0) += 1;
        }
    }
    let alphabet = corpus.alphabet();
    let mut rows: Vec<FrequencyRow> = counts
        .into_iter()
        .map(|(elements, count)| FrequencyRow { elements, count })
        .collect();
    rows.sort_by(|a, b| {
        b.count
            .cmp(&a.count)
            .then(a.elements.len().cmp(&b.elements.len()))
            .then_with(|| {
                let ka: Vec<&str> = a.elements.iter().map(|&e| alphabet.code(e)).collect();
                let kb: Vec<&str> = b.elements.iter().map(|&e| alphabet.code(e)).collect();
                ka.cmp(&kb)
            })
    });
    rows.truncate(top_k);
    Ok(FrequencyTable {
        rows,
        corpus_size: corpus.len(),
        contiguous,
    })
}
