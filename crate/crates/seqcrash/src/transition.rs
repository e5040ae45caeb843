//! First-order event-transition estimation from adjacent pairs.
//!
//! Counts n(AB) over all adjacent positions in all sequences. Two row
//! denominators are supported because the source conventions disagree: the
//! forward-probability definition divides by n(A) over all positions
//! (including sequence-final ones, so rows need not sum to 1), while the
//! stochastic-matrix convention divides by the count of non-final positions.

use std::collections::HashMap;

use crate::corpus::{Corpus, LabelId};
use crate::error::{Error, Result};

/// Row-denominator convention for transition probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Denominator {
    /// n(A): every occurrence of A, final positions included.
    #[default]
    AllOccurrences,
    /// Occurrences of A that have a successor; nonzero rows sum to 1.
    NonFinal,
}

/// k x k adjacency counts with per-label occurrence totals. Probabilities
/// are derived from exact count pairs on demand.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    codes: Vec<String>,
    by_code: HashMap<String, usize>,
    k: usize,
    counts: Vec<u64>,
    occurrences: Vec<u64>,
    nonfinal: Vec<u64>,
    denom: Denominator,
}

/// One focus-report row: rate of `code` transitioning to (or from) the
/// focal label, as an exact count/denominator pair plus its float value.
#[derive(Debug, Clone)]
pub struct FocusRate {
    pub code: String,
    pub count: u64,
    pub denominator: u64,
    pub probability: f64,
}

/// Incoming and outgoing transition rates around one focal label.
#[derive(Debug, Clone)]
pub struct FocusReport {
    pub focal: String,
    pub incoming: Vec<FocusRate>,
    pub outgoing: Vec<FocusRate>,
}

/// Count adjacent pairs across the corpus.
pub fn build_transition_matrix(corpus: &Corpus, denom: Denominator) -> TransitionMatrix {
    let alphabet = corpus.alphabet();
    let k = alphabet.len();
    let mut counts = vec![0u64; k * k];
    let mut occurrences = vec![0u64; k];
    let mut nonfinal = vec![0u64; k];
    for seq in corpus.sequences() {
        let events = seq.events();
        for &e in events {
            occurrences[e.index()] += 1;
        }
        for pair in events.windows(2) {
            let (a, b) = (pair[0].index(), pair[1].index());
            counts[a * k + b] += 1;
            nonfinal[a] += 1;
        }
    }
    TransitionMatrix {
        codes: alphabet.iter().map(|l| l.code.clone()).collect(),
        by_code: alphabet
            .iter()
            .enumerate()
            .map(|(i, l)| (l.code.clone(), i))
            .collect(),
        k,
        counts,
        occurrences,
        nonfinal,
        denom,
    }
}

impl TransitionMatrix {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn codes(&self) -> &[String] {
        &self.codes
    }

    pub fn denominator_convention(&self) -> Denominator {
        self.denom
    }

    pub fn index_of(&self, code: &str) -> Option<usize> {
        self.by_code.get(code).copied()
    }

    pub fn count(&self, a: usize, b: usize) -> u64 {
        self.counts[a * self.k + b]
    }

    pub fn count_by_id(&self, a: LabelId, b: LabelId) -> u64 {
        self.count(a.index(), b.index())
    }

    /// n(A): occurrences at any position.
    pub fn occurrences(&self, a: usize) -> u64 {
        self.occurrences[a]
    }

    /// Occurrences of A followed by some event.
    pub fn nonfinal_occurrences(&self, a: usize) -> u64 {
        self.nonfinal[a]
    }

    fn row_denominator(&self, a: usize) -> u64 {
        match self.denom {
            Denominator::AllOccurrences => self.occurrences[a],
            Denominator::NonFinal => self.nonfinal[a],
        }
    }

    /// p(A -> B) under the selected convention; 0 when the denominator is 0.
    pub fn probability(&self, a: usize, b: usize) -> f64 {
        let denom = self.row_denominator(a);
        if denom == 0 {
            0.0
        } else {
            self.count(a, b) as f64 / denom as f64
        }
    }

    /// The exact (count, denominator) pair behind `probability`.
    pub fn probability_pair(&self, a: usize, b: usize) -> (u64, u64) {
        (self.count(a, b), self.row_denominator(a))
    }

    /// p(A at p-1 | B at p) = n(AB) / n(B).
    pub fn reverse_conditional(&self, a: &str, b: &str) -> Result<f64> {
        let ai = self.lookup(a)?;
        let bi = self.lookup(b)?;
        if self.occurrences[bi] == 0 {
            return Err(Error::UndefinedConditional {
                code: b.to_string(),
            });
        }
        Ok(self.count(ai, bi) as f64 / self.occurrences[bi] as f64)
    }

    fn lookup(&self, code: &str) -> Result<usize> {
        self.index_of(code).ok_or_else(|| Error::UnknownLabel {
            code: code.to_string(),
        })
    }

    /// Incoming rows {A : n(A->focal) > 0} with p(A->focal) and outgoing
    /// rows {B : n(focal->B) > 0} with p(focal->B), each sorted by
    /// probability descending then code ascending.
    pub fn focus_report(&self, focal: &str) -> Result<FocusReport> {
        let f = self.lookup(focal)?;
        let mut incoming = Vec::new();
        let mut outgoing = Vec::new();
        for x in 0..self.k {
            let n_in = self.count(x, f);
            if n_in > 0 {
                incoming.push(FocusRate {
                    code: self.codes[x].clone(),
                    count: n_in,
                    denominator: self.row_denominator(x),
                    probability: self.probability(x, f),
                });
            }
            let n_out = self.count(f, x);
            if n_out > 0 {
                outgoing.push(FocusRate {
                    code: self.codes[x].clone(),
                    count: n_out,
                    denominator: self.row_denominator(f),
                    probability: self.probability(f, x),
                });
            }
        }
        let order = |a: &FocusRate, b: &FocusRate| {
            b.probability
                .partial_cmp(&a.probability)
                .expect("rates are finite")
                .then_with(|| a.code.cmp(&b.code))
        };
        incoming.sort_by(order);
        outgoing.sort_by(order);
        Ok(FocusReport {
            focal: focal.to_string(),
            incoming,
            outgoing,
        })
    }
}
