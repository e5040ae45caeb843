//! Cross-tabulation and Pearson chi-square tests of independence.

use std::collections::{BTreeSet, HashMap};

use crate::corpus::{Corpus, NA};
use crate::error::{Error, Result};

/// Observed counts of category co-occurrence, with totals.
#[derive(Debug, Clone)]
pub struct ContingencyTable {
    row_categories: Vec<String>,
    col_categories: Vec<String>,
    counts: Vec<u64>,
    row_totals: Vec<u64>,
    col_totals: Vec<u64>,
    grand_total: u64,
}

impl ContingencyTable {
    /// Build from explicit counts in row-major order.
    pub fn from_counts(
        row_categories: Vec<String>,
        col_categories: Vec<String>,
        counts: Vec<u64>,
    ) -> Result<ContingencyTable> {
        let (r, c) = (row_categories.len(), col_categories.len());
        if counts.len() != r * c || r == 0 || c == 0 {
            return Err(Error::DegenerateTable(format!(
                "expected {r} x {c} counts, got {}",
                counts.len()
            )));
        }
        let mut row_totals = vec![0u64; r];
        let mut col_totals = vec![0u64; c];
        for i in 0..r {
            for j in 0..c {
                row_totals[i] += counts[i * c + j];
                col_totals[j] += counts[i * c + j];
            }
        }
        let grand_total = row_totals.iter().sum();
        Ok(ContingencyTable {
            row_categories,
            col_categories,
            counts,
            row_totals,
            col_totals,
            grand_total,
        })
    }

    pub fn rows(&self) -> usize {
        self.row_categories.len()
    }

    pub fn cols(&self) -> usize {
        self.col_categories.len()
    }

    pub fn row_categories(&self) -> &[String] {
        &self.row_categories
    }

    pub fn col_categories(&self) -> &[String] {
        &self.col_categories
    }

    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.cols() + j]
    }

    pub fn row_totals(&self) -> &[u64] {
        &self.row_totals
    }

    pub fn col_totals(&self) -> &[u64] {
        &self.col_totals
    }

    pub fn grand_total(&self) -> u64 {
        self.grand_total
    }
}

/// Cross-tabulate two attributes over the corpus. Categories are ordered
/// lexicographically for deterministic output; `drop_na` removes sequences
/// whose value is `n/a` in either attribute.
pub fn crosstab(
    corpus: &Corpus,
    row_attr: &str,
    col_attr: &str,
    drop_na: bool,
) -> Result<ContingencyTable> {
    let table = corpus.attributes().ok_or_else(|| Error::UnknownAttribute {
        name: row_attr.to_string(),
    })?;
    for name in [row_attr, col_attr] {
        if !table.has_attribute(name) {
            return Err(Error::UnknownAttribute {
                name: name.to_string(),
            });
        }
    }
    let mut pairs = Vec::with_capacity(corpus.len());
    let mut row_cats = BTreeSet::new();
    let mut col_cats = BTreeSet::new();
    for seq in corpus.sequences() {
        let rv = table.value(seq.id(), row_attr).unwrap_or(NA).to_string();
        let cv = table.value(seq.id(), col_attr).unwrap_or(NA).to_string();
        if drop_na && (rv == NA || cv == NA) {
            continue;
        }
        row_cats.insert(rv.clone());
        col_cats.insert(cv.clone());
        pairs.push((rv, cv));
    }
    if pairs.is_empty() {
        return Err(Error::EmptyTable);
    }
    let row_categories: Vec<String> = row_cats.into_iter().collect();
    let col_categories: Vec<String> = col_cats.into_iter().collect();
    let row_index: HashMap<&str, usize> = row_categories
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let col_index: HashMap<&str, usize> = col_categories
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let c = col_categories.len();
    let mut counts = vec![0u64; row_categories.len() * c];
    for (rv, cv) in &pairs {
        counts[row_index[rv.as_str()] * c + col_index[cv.as_str()]] += 1;
    }
    ContingencyTable::from_counts(row_categories, col_categories, counts)
}

/// Pearson chi-square test result.
#[derive(Debug, Clone)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    /// Expected counts, row-major.
    pub expected: Vec<f64>,
    /// Any expected cell below 5; the test still runs but is unreliable.
    pub low_expected_cells: bool,
}

/// Pearson chi-square test of independence without continuity correction.
pub fn chi_square(table: &ContingencyTable) -> Result<ChiSquareResult> {
    let (r, c) = (table.rows(), table.cols());
    if r < 2 || c < 2 {
        return Err(Error::DegenerateTable(format!("table is {r} x {c}")));
    }
    if table.grand_total() == 0 {
        return Err(Error::DegenerateTable("grand total is zero".to_string()));
    }
    if table.row_totals().contains(&0) {
        return Err(Error::DegenerateTable("all-zero row".to_string()));
    }
    if table.col_totals().contains(&0) {
        return Err(Error::DegenerateTable("all-zero column".to_string()));
    }
    let grand = table.grand_total() as f64;
    let mut statistic = 0.0;
    let mut expected = vec![0.0; r * c];
    let mut low = false;
    for i in 0..r {
        for j in 0..c {
            let e = table.row_totals()[i] as f64 * table.col_totals()[j] as f64 / grand;
            expected[i * c + j] = e;
            low |= e < 5.0;
            let o = table.count(i, j) as f64;
            statistic += (o - e) * (o - e) / e;
        }
    }
    let df = (r - 1) * (c - 1);
    Ok(ChiSquareResult {
        statistic,
        df,
        p_value: chi_square_p_value(statistic, df),
        expected,
        low_expected_cells: low,
    })
}

/// Upper-tail probability of the chi-square distribution: Q(df/2, x/2).
pub fn chi_square_p_value(statistic: f64, df: usize) -> f64 {
    gamma::regularized_upper(df as f64 / 2.0, statistic / 2.0)
}

/// Recode one attribute through a total category mapping, leaving the
/// original corpus untouched.
pub fn regroup(corpus: &Corpus, attr: &str, mapping: &HashMap<String, String>) -> Result<Corpus> {
    let table = corpus.attributes().ok_or_else(|| Error::UnknownAttribute {
        name: attr.to_string(),
    })?;
    if !table.has_attribute(attr) {
        return Err(Error::UnknownAttribute {
            name: attr.to_string(),
        });
    }
    let mut recoded = Vec::with_capacity(corpus.len());
    for seq in corpus.sequences() {
        let value = table.value(seq.id(), attr).unwrap_or(NA);
        let new = mapping.get(value).ok_or_else(|| Error::UnmappedCategory {
            category: value.to_string(),
        })?;
        recoded.push(new.clone());
    }
    Ok(corpus.with_attribute(attr, &recoded))
}

/// Regularized incomplete gamma functions, series + continued fraction.
mod gamma {
    const MAX_ITER: usize = 500;
    const EPS: f64 = 1e-15;
    const TINY: f64 = 1e-300;

    /// ln Gamma(x) for x > 0 (Lanczos approximation).
    pub fn ln_gamma(x: f64) -> f64 {
        const COEFFS: [f64; 6] = [
            76.18009172947146,
            -86.50532032941677,
            24.01409824083091,
            -1.231739572450155,
            0.1208650973866179e-2,
            -0.5395239384953e-5,
        ];
        let mut y = x;
        let tmp = x + 5.5;
        let tmp = tmp - (x + 0.5) * tmp.ln();
        let mut series = 1.000000000190015;
        for c in COEFFS {
            y += 1.0;
            series += c / y;
        }
        -tmp + (2.5066282746310005 * series / x).ln()
    }

    /// Lower regularized incomplete gamma P(a, x) by power series,
    /// convergent for x < a + 1.
    fn lower_series(a: f64, x: f64) -> f64 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * EPS {
                break;
            }
        }
        sum * (a * x.ln() - x - ln_gamma(a)).exp()
    }

    /// Upper regularized incomplete gamma Q(a, x) by Lentz's continued
    /// fraction, convergent for x >= a + 1.
    fn upper_continued_fraction(a: f64, x: f64) -> f64 {
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..=MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < EPS {
                break;
            }
        }
        h * (a * x.ln() - x - ln_gamma(a)).exp()
    }

    /// Q(a, x) = 1 - P(a, x), the upper regularized incomplete gamma.
    pub fn regularized_upper(a: f64, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        if a <= 0.0 {
            return 0.0;
        }
        if x < a + 1.0 {
            1.0 - lower_series(a, x)
        } else {
            upper_continued_fraction(a, x)
        }
    }
}

pub use gamma::regularized_upper;
