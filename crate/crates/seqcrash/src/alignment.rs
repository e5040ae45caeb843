//! Optimal-matching distances between event sequences.
//!
//! The distance between two sequences is the minimum total cost of indel and
//! substitution operations transforming one into the other, computed by
//! dynamic programming over two rolling rows. Disabled operations are
//! excluded from the minimum.

use rayon::prelude::*;

use crate::corpus::{Corpus, EventSequence, LabelId};
use crate::error::{Error, Result};

/// Operation costs defining an optimal-matching metric. A `None` cost
/// disables the operation; matches always cost 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CostScheme {
    indel: Option<f64>,
    substitution: Option<f64>,
    name: Option<String>,
}

impl CostScheme {
    /// Indels and substitutions, both cost 1.
    pub fn levenshtein() -> CostScheme {
        CostScheme {
            indel: Some(1.0),
            substitution: Some(1.0),
            name: Some("levenshtein".to_string()),
        }
    }

    /// Indels only, cost 1. Equals len(a) + len(b) - 2 * LCS(a, b).
    pub fn levenshtein_ii() -> CostScheme {
        CostScheme {
            indel: Some(1.0),
            substitution: None,
            name: Some("levenshtein2".to_string()),
        }
    }

    /// Substitutions only, cost 1; defined for equal-length sequences.
    pub fn hamming() -> CostScheme {
        CostScheme {
            indel: None,
            substitution: Some(1.0),
            name: Some("hamming".to_string()),
        }
    }

    pub fn custom(indel: Option<f64>, substitution: Option<f64>) -> Result<CostScheme> {
        if indel.is_none() && substitution.is_none() {
            return Err(Error::InvalidCostScheme(
                "at least one of indel/substitution must be enabled".to_string(),
            ));
        }
        for (what, cost) in [("indel", indel), ("substitution", substitution)] {
            if let Some(c) = cost {
                if !c.is_finite() || c < 0.0 {
                    return Err(Error::InvalidCostScheme(format!(
                        "{what} cost must be a nonnegative finite number, got {c}"
                    )));
                }
            }
        }
        Ok(CostScheme {
            indel,
            substitution,
            name: None,
        })
    }

    pub fn indel(&self) -> Option<f64> {
        self.indel
    }

    pub fn substitution(&self) -> Option<f64> {
        self.substitution
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Largest enabled operation cost, for distance upper bounds.
    pub fn max_enabled_cost(&self) -> f64 {
        self.indel
            .into_iter()
            .chain(self.substitution)
            .fold(0.0, f64::max)
    }
}

fn om_distance_events(a: &[LabelId], b: &[LabelId], scheme: &CostScheme) -> f64 {
    // Keep the shorter sequence along the rolling row.
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let indel = scheme.indel.unwrap_or(f64::INFINITY);
    let sub = scheme.substitution.unwrap_or(f64::INFINITY);

    // j = 0 must stay exactly 0 even when indels are disabled (0 * inf is NaN).
    let mut prev: Vec<f64> = (0..=short.len())
        .map(|j| if j == 0 { 0.0 } else { j as f64 * indel })
        .collect();
    let mut cur = vec![0.0; short.len() + 1];
    for (i, &li) in long.iter().enumerate() {
        cur[0] = (i + 1) as f64 * indel;
        for (j, &sj) in short.iter().enumerate() {
            let diag = prev[j] + if li == sj { 0.0 } else { sub };
            cur[j + 1] = diag.min(prev[j + 1] + indel).min(cur[j] + indel);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[short.len()]
}

/// Minimum alignment cost between two sequences under `scheme`.
pub fn om_distance(a: &EventSequence, b: &EventSequence, scheme: &CostScheme) -> Result<f64> {
    if scheme.indel.is_none() && a.len() != b.len() {
        return Err(Error::MetricDomain {
            id_a: a.id().to_string(),
            id_b: b.id().to_string(),
            message: format!(
                "indel-free scheme requires equal lengths, got {} and {}",
                a.len(),
                b.len()
            ),
        });
    }
    Ok(om_distance_events(a.events(), b.events(), scheme))
}

/// Symmetric pairwise dissimilarities with a zero diagonal, indexed in
/// corpus order.
#[derive(Debug, Clone)]
pub struct DissimilarityMatrix {
    ids: Vec<String>,
    n: usize,
    values: Vec<f64>,
}

impl DissimilarityMatrix {
    /// Wrap an explicit matrix, validating shape, symmetry, nonnegativity,
    /// and the zero diagonal.
    pub fn from_values(ids: Vec<String>, values: Vec<f64>) -> Result<DissimilarityMatrix> {
        let n = ids.len();
        if values.len() != n * n {
            return Err(Error::MetricDomain {
                id_a: String::new(),
                id_b: String::new(),
                message: format!("expected {} values for {} ids", n * n, n),
            });
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::MetricDomain {
                    id_a: ids[i].clone(),
                    id_b: ids[i].clone(),
                    message: "nonzero diagonal".to_string(),
                });
            }
            for j in (i + 1)..n {
                let (d, t) = (values[i * n + j], values[j * n + i]);
                if d != t || d < 0.0 || !d.is_finite() {
                    return Err(Error::MetricDomain {
                        id_a: ids[i].clone(),
                        id_b: ids[j].clone(),
                        message: "matrix must be symmetric and nonnegative".to_string(),
                    });
                }
            }
        }
        Ok(DissimilarityMatrix { ids, n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    /// Row sum; the k = 1 medoid minimizes this.
    pub fn row_sum(&self, i: usize) -> f64 {
        self.values[i * self.n..(i + 1) * self.n].iter().sum()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Pairwise distance matrix over the corpus. Upper-triangle cells are
/// computed independently (in parallel) and mirrored, so the result is
/// identical regardless of thread count.
pub fn distance_matrix(corpus: &Corpus, scheme: &CostScheme) -> Result<DissimilarityMatrix> {
    let n = corpus.len();
    let seqs = corpus.sequences();
    if scheme.indel.is_none() {
        for w in seqs.windows(2) {
            if w[0].len() != w[1].len() {
                return Err(Error::MetricDomain {
                    id_a: w[0].id().to_string(),
                    id_b: w[1].id().to_string(),
                    message: "indel-free scheme on mixed-length corpus".to_string(),
                });
            }
        }
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let computed: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| om_distance_events(seqs[i].events(), seqs[j].events(), scheme))
        .collect();
    let mut values = vec![0.0; n * n];
    for (&(i, j), &d) in pairs.iter().zip(&computed) {
        values[i * n + j] = d;
        values[j * n + i] = d;
    }
    Ok(DissimilarityMatrix {
        ids: seqs.iter().map(|s| s.id().to_string()).collect(),
        n,
        values,
    })
}
