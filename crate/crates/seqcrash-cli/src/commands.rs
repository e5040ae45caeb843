//! Command implementations. Every command is deterministic: identical
//! inputs and flags produce byte-identical output regardless of thread
//! count.

use std::collections::HashMap;
use std::io::Write;

use serde_json::json;

use seqcrash::alignment::{distance_matrix, CostScheme, DissimilarityMatrix};
use seqcrash::clustering::{pam, silhouette, sweep_with_margin, Clustering};
use seqcrash::corpus::{corpus_stats, Corpus};
use seqcrash::mining::frequent_subsequences;
use seqcrash::stats::{chi_square, crosstab, regroup, ChiSquareResult, ContingencyTable};
use seqcrash::transition::{build_transition_matrix, Denominator, FocusReport};
use seqcrash::{Error, Result};

use crate::{inputs, report, Cli, Command, Denom, Format, Metric, MetricOpts};

pub fn run(cli: &Cli) -> Result<u8> {
    let opts = &cli.global;
    let fmt = Formatter {
        precision: cli.global.precision,
    };
    match &cli.command {
        Command::Ingest => {
            let corpus = inputs::load(opts)?;
            cmd_ingest(&corpus, cli.global.format, &fmt)
        }
        Command::Freq {
            max_len,
            top,
            contiguous,
        } => {
            let corpus = inputs::load(opts)?;
            cmd_freq(
                &corpus,
                *max_len,
                *top,
                *contiguous,
                cli.global.format,
                &fmt,
            )
        }
        Command::Transitions { focus, denom } => {
            let corpus = inputs::load(opts)?;
            cmd_transitions(&corpus, focus.as_deref(), *denom, cli.global.format, &fmt)
        }
        Command::Distmat { metric, condensed } => {
            let corpus = inputs::load(opts)?;
            cmd_distmat(&corpus, metric, *condensed, cli.global.format, &fmt)
        }
        Command::Cluster { k, metric } => {
            let corpus = inputs::load(opts)?;
            cmd_cluster(&corpus, *k, metric, cli.global.format, &fmt)
        }
        Command::Sweep {
            k_min,
            k_max,
            margin,
            metric,
        } => {
            let corpus = inputs::load(opts)?;
            cmd_sweep(
                &corpus,
                *k_min,
                *k_max,
                *margin,
                metric,
                cli.global.format,
                &fmt,
            )
        }
        Command::Crosstab {
            row,
            col,
            drop_na,
            regroup: regroup_file,
            cluster_k,
            metric,
        } => {
            let corpus = inputs::load(opts)?;
            cmd_crosstab(
                &corpus,
                row,
                col,
                *drop_na,
                regroup_file.as_deref(),
                *cluster_k,
                metric,
                cli.global.format,
                &fmt,
            )
        }
        Command::Report { out, check, metric } => {
            let corpus = inputs::load(opts)?;
            report::cmd_report(&corpus, out, *check, metric, &fmt)
        }
    }
}

/// Fixed-precision float formatting shared by all emitters.
pub struct Formatter {
    pub precision: usize,
}

impl Formatter {
    pub fn float(&self, x: f64) -> String {
        format!("{:.*}", self.precision, x)
    }

    /// Round for JSON so artifacts are stable across builds.
    pub fn json_num(&self, x: f64) -> serde_json::Value {
        let factor = 10f64.powi(self.precision as i32);
        json!((x * factor).round() / factor)
    }
}

pub fn build_scheme(opts: &MetricOpts) -> Result<CostScheme> {
    let base = match opts.metric {
        Metric::Levenshtein => CostScheme::levenshtein(),
        Metric::Levenshtein2 => CostScheme::levenshtein_ii(),
        Metric::Hamming => CostScheme::hamming(),
    };
    if opts.indel.is_none() && opts.sub.is_none() {
        return Ok(base);
    }
    CostScheme::custom(
        opts.indel.or(base.indel()),
        opts.sub.or(base.substitution()),
    )
}

fn write_csv<W: Write>(out: W, rows: &[Vec<String>]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    for row in rows {
        wtr.write_record(row)?;
    }
    wtr.flush()?;
    Ok(())
}

fn print_csv(rows: &[Vec<String>]) -> Result<()> {
    write_csv(std::io::stdout().lock(), rows)
}

fn print_json(value: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("valid JSON")
    );
}

fn cmd_ingest(corpus: &Corpus, format: Format, fmt: &Formatter) -> Result<u8> {
    let stats = corpus_stats(corpus)?;
    match format {
        Format::Csv => {
            let mut rows = vec![
                vec!["metric".to_string(), "value".to_string()],
                vec!["sequences".to_string(), stats.sequences.to_string()],
                vec!["events".to_string(), stats.events.to_string()],
                vec!["min_len".to_string(), stats.min_len.to_string()],
                vec!["max_len".to_string(), stats.max_len.to_string()],
                vec!["mean_len".to_string(), fmt.float(stats.mean_len)],
            ];
            for (code, count) in &stats.label_counts {
                rows.push(vec![format!("count_{code}"), count.to_string()]);
            }
            print_csv(&rows)?;
        }
        Format::Json => {
            let counts: serde_json::Map<String, serde_json::Value> = stats
                .label_counts
                .iter()
                .map(|(code, count)| (code.clone(), json!(count)))
                .collect();
            print_json(&json!({
                "sequences": stats.sequences,
                "events": stats.events,
                "min_len": stats.min_len,
                "max_len": stats.max_len,
                "mean_len": fmt.json_num(stats.mean_len),
                "label_counts": counts,
            }));
        }
    }
    Ok(0)
}

pub fn freq_rows(
    corpus: &Corpus,
    max_len: usize,
    top: usize,
    contiguous: bool,
) -> Result<Vec<(String, usize, u32)>> {
    let table = frequent_subsequences(corpus, max_len, top, contiguous)?;
    Ok(table
        .rows
        .iter()
        .map(|r| {
            (
                r.joined(corpus.alphabet()),
                r.count,
                r.share_percent(table.corpus_size),
            )
        })
        .collect())
}

fn cmd_freq(
    corpus: &Corpus,
    max_len: usize,
    top: usize,
    contiguous: bool,
    format: Format,
    _fmt: &Formatter,
) -> Result<u8> {
    let rows = freq_rows(corpus, max_len, top, contiguous)?;
    match format {
        Format::Csv => {
            let mut out = vec![vec![
                "pattern".to_string(),
                "count".to_string(),
                "share".to_string(),
            ]];
            for (pattern, count, pct) in &rows {
                out.push(vec![pattern.clone(), count.to_string(), format!("{pct}%")]);
            }
            print_csv(&out)?;
        }
        Format::Json => {
            let n = corpus.len();
            print_json(&json!({
                "corpus_size": n,
                "contiguous": contiguous,
                "rows": rows
                    .iter()
                    .map(|(pattern, count, pct)| {
                        json!({
                            "pattern": pattern,
                            "count": count,
                            "share": *count as f64 / n as f64,
                            "share_pct": pct,
                        })
                    })
                    .collect::<Vec<_>>(),
            }));
        }
    }
    Ok(0)
}

pub fn focus_report_rows(report: &FocusReport, fmt: &Formatter) -> Vec<Vec<String>> {
    let mut rows = vec![vec![
        "direction".to_string(),
        "label".to_string(),
        "count".to_string(),
        "probability".to_string(),
    ]];
    for (direction, rates) in [
        ("incoming", &report.incoming),
        ("outgoing", &report.outgoing),
    ] {
        for rate in rates {
            rows.push(vec![
                direction.to_string(),
                rate.code.clone(),
                rate.count.to_string(),
                fmt.float(rate.probability),
            ]);
        }
    }
    rows
}

fn cmd_transitions(
    corpus: &Corpus,
    focus: Option<&str>,
    denom: Denom,
    format: Format,
    fmt: &Formatter,
) -> Result<u8> {
    let denom = match denom {
        Denom::All => Denominator::AllOccurrences,
        Denom::Nonfinal => Denominator::NonFinal,
    };
    let tm = build_transition_matrix(corpus, denom);
    match focus {
        Some(focal) => {
            let report = tm.focus_report(focal)?;
            match format {
                Format::Csv => print_csv(&focus_report_rows(&report, fmt))?,
                Format::Json => {
                    let rates = |list: &[seqcrash::transition::FocusRate]| {
                        list.iter()
                            .map(|r| {
                                json!({
                                    "label": r.code,
                                    "count": r.count,
                                    "denominator": r.denominator,
                                    "probability": fmt.json_num(r.probability),
                                })
                            })
                            .collect::<Vec<_>>()
                    };
                    print_json(&json!({
                        "focal": report.focal,
                        "incoming": rates(&report.incoming),
                        "outgoing": rates(&report.outgoing),
                    }));
                }
            }
        }
        None => match format {
            Format::Csv => {
                let mut rows = Vec::with_capacity(tm.k() + 1);
                let mut header = vec!["from".to_string()];
                header.extend(tm.codes().iter().cloned());
                rows.push(header);
                for a in 0..tm.k() {
                    let mut row = vec![tm.codes()[a].clone()];
                    for b in 0..tm.k() {
                        row.push(fmt.float(tm.probability(a, b)));
                    }
                    rows.push(row);
                }
                print_csv(&rows)?;
            }
            Format::Json => {
                let matrix: Vec<Vec<serde_json::Value>> = (0..tm.k())
                    .map(|a| {
                        (0..tm.k())
                            .map(|b| fmt.json_num(tm.probability(a, b)))
                            .collect()
                    })
                    .collect();
                print_json(&json!({
                    "labels": tm.codes(),
                    "denominator": match tm.denominator_convention() {
                        Denominator::AllOccurrences => "all",
                        Denominator::NonFinal => "nonfinal",
                    },
                    "probabilities": matrix,
                }));
            }
        },
    }
    Ok(0)
}

fn cmd_distmat(
    corpus: &Corpus,
    metric: &MetricOpts,
    condensed: bool,
    format: Format,
    fmt: &Formatter,
) -> Result<u8> {
    let scheme = build_scheme(metric)?;
    let dm = distance_matrix(corpus, &scheme)?;
    match format {
        Format::Csv => {
            let rows = if condensed {
                let mut rows = vec![vec![
                    "id_i".to_string(),
                    "id_j".to_string(),
                    "dist".to_string(),
                ]];
                for i in 0..dm.n() {
                    for j in (i + 1)..dm.n() {
                        rows.push(vec![
                            dm.ids()[i].clone(),
                            dm.ids()[j].clone(),
                            fmt.float(dm.get(i, j)),
                        ]);
                    }
                }
                rows
            } else {
                let mut rows = Vec::with_capacity(dm.n() + 1);
                let mut header = vec!["id".to_string()];
                header.extend(dm.ids().iter().cloned());
                rows.push(header);
                for i in 0..dm.n() {
                    let mut row = vec![dm.ids()[i].clone()];
                    for j in 0..dm.n() {
                        row.push(fmt.float(dm.get(i, j)));
                    }
                    rows.push(row);
                }
                rows
            };
            print_csv(&rows)?;
        }
        Format::Json => {
            let values: Vec<Vec<serde_json::Value>> = (0..dm.n())
                .map(|i| (0..dm.n()).map(|j| fmt.json_num(dm.get(i, j))).collect())
                .collect();
            print_json(&json!({ "ids": dm.ids(), "values": values }));
        }
    }
    Ok(0)
}

/// CSV rows and JSON summary for one clustering.
pub fn clustering_outputs(
    corpus: &Corpus,
    dm: &DissimilarityMatrix,
    clustering: &Clustering,
    fmt: &Formatter,
) -> Result<(Vec<Vec<String>>, serde_json::Value)> {
    let sil = if clustering.k >= 2 {
        Some(silhouette(dm, clustering)?)
    } else {
        None
    };
    let mut rows = vec![vec![
        "id".to_string(),
        "cluster".to_string(),
        "silhouette".to_string(),
    ]];
    for (i, seq) in corpus.sequences().iter().enumerate() {
        rows.push(vec![
            seq.id().to_string(),
            (clustering.assignment[i] + 1).to_string(),
            sil.as_ref()
                .map(|s| fmt.float(s.widths[i]))
                .unwrap_or_default(),
        ]);
    }
    let medoid_ids: Vec<&str> = clustering
        .medoids
        .iter()
        .map(|&m| corpus.sequence(m).id())
        .collect();
    let medoid_seqs: Vec<String> = clustering
        .medoids
        .iter()
        .map(|&m| corpus.sequence(m).joined(corpus.alphabet()))
        .collect();
    let summary = json!({
        "k": clustering.k,
        "cost": fmt.json_num(clustering.cost),
        "medoid_ids": medoid_ids,
        "medoid_sequences": medoid_seqs,
        "sizes": clustering.cluster_sizes(),
        "cluster_silhouettes": sil
            .as_ref()
            .map(|s| s.per_cluster.iter().map(|&x| fmt.json_num(x)).collect::<Vec<_>>()),
        "overall_silhouette": sil.as_ref().map(|s| fmt.json_num(s.overall)),
        "zero_distance_medoids": clustering.zero_distance_medoids,
    });
    Ok((rows, summary))
}

fn cmd_cluster(
    corpus: &Corpus,
    k: usize,
    metric: &MetricOpts,
    format: Format,
    fmt: &Formatter,
) -> Result<u8> {
    let scheme = build_scheme(metric)?;
    let dm = distance_matrix(corpus, &scheme)?;
    let clustering = pam(&dm, k)?;
    let (rows, summary) = clustering_outputs(corpus, &dm, &clustering, fmt)?;
    match format {
        Format::Csv => {
            print_csv(&rows)?;
            // The JSON summary goes to stderr so stdout stays parseable CSV.
            eprintln!("{summary}");
        }
        Format::Json => {
            let assignments: Vec<serde_json::Value> = corpus
                .sequences()
                .iter()
                .enumerate()
                .map(|(i, seq)| {
                    json!({
                        "id": seq.id(),
                        "cluster": clustering.assignment[i] + 1,
                    })
                })
                .collect();
            print_json(&json!({ "summary": summary, "assignments": assignments }));
        }
    }
    Ok(0)
}

pub fn sweep_rows(rows: &[seqcrash::clustering::SweepRow], fmt: &Formatter) -> Vec<Vec<String>> {
    let mut out = vec![vec![
        "k".to_string(),
        "min_size".to_string(),
        "max_size".to_string(),
        "min_cluster_silhouette".to_string(),
        "max_cluster_silhouette".to_string(),
        "avg_silhouette".to_string(),
    ]];
    for row in rows {
        out.push(vec![
            row.k.to_string(),
            row.min_size.to_string(),
            row.max_size.to_string(),
            fmt.float(row.min_cluster_silhouette),
            fmt.float(row.max_cluster_silhouette),
            fmt.float(row.overall_silhouette),
        ]);
    }
    out
}

fn cmd_sweep(
    corpus: &Corpus,
    k_min: usize,
    k_max: usize,
    margin: f64,
    metric: &MetricOpts,
    format: Format,
    fmt: &Formatter,
) -> Result<u8> {
    let scheme = build_scheme(metric)?;
    let dm = distance_matrix(corpus, &scheme)?;
    let sweep = sweep_with_margin(&dm, k_min, k_max, margin)?;
    match format {
        Format::Csv => {
            print_csv(&sweep_rows(&sweep.rows, fmt))?;
            eprintln!("{}", json!({ "recommended_k": sweep.recommended }));
        }
        Format::Json => {
            print_json(&json!({
                "recommended_k": sweep.recommended,
                "rows": sweep.rows.iter().map(|r| {
                    json!({
                        "k": r.k,
                        "min_size": r.min_size,
                        "max_size": r.max_size,
                        "min_cluster_silhouette": fmt.json_num(r.min_cluster_silhouette),
                        "max_cluster_silhouette": fmt.json_num(r.max_cluster_silhouette),
                        "avg_silhouette": fmt.json_num(r.overall_silhouette),
                    })
                }).collect::<Vec<_>>(),
            }));
        }
    }
    Ok(0)
}

fn contingency_rows(table: &ContingencyTable) -> Vec<Vec<String>> {
    let mut rows = Vec::with_capacity(table.rows() + 1);
    let mut header = vec![String::new()];
    header.extend(table.col_categories().iter().cloned());
    header.push("total".to_string());
    rows.push(header);
    for i in 0..table.rows() {
        let mut row = vec![table.row_categories()[i].clone()];
        for j in 0..table.cols() {
            row.push(table.count(i, j).to_string());
        }
        row.push(table.row_totals()[i].to_string());
        rows.push(row);
    }
    let mut totals = vec!["total".to_string()];
    for j in 0..table.cols() {
        totals.push(table.col_totals()[j].to_string());
    }
    totals.push(table.grand_total().to_string());
    rows.push(totals);
    rows
}

fn chi_square_json(result: &ChiSquareResult, fmt: &Formatter) -> serde_json::Value {
    json!({
        "statistic": fmt.json_num(result.statistic),
        "df": result.df,
        "p_value": fmt.json_num(result.p_value),
        "warning": if result.low_expected_cells {
            json!("expected cell below 5")
        } else {
            serde_json::Value::Null
        },
    })
}

fn load_regroup_mapping(path: &str) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Ingest {
        line: 0,
        message: format!("invalid regroup JSON: {e}"),
    })?;
    let object = value.as_object().ok_or_else(|| Error::Ingest {
        line: 0,
        message: "regroup JSON must be an object of old -> new categories".to_string(),
    })?;
    let mut mapping = HashMap::new();
    for (k, v) in object {
        let new = v.as_str().ok_or_else(|| Error::Ingest {
            line: 0,
            message: format!("regroup value for {k:?} must be a string"),
        })?;
        mapping.insert(k.clone(), new.to_string());
    }
    Ok(mapping)
}

#[allow(clippy::too_many_arguments)]
fn cmd_crosstab(
    corpus: &Corpus,
    row: &str,
    col: &str,
    drop_na: bool,
    regroup_file: Option<&str>,
    cluster_k: Option<usize>,
    metric: &MetricOpts,
    format: Format,
    fmt: &Formatter,
) -> Result<u8> {
    let mut working = corpus.clone();
    if let Some(k) = cluster_k {
        let scheme = build_scheme(metric)?;
        let dm = distance_matrix(&working, &scheme)?;
        let clustering = pam(&dm, k)?;
        let labels: Vec<String> = clustering
            .assignment
            .iter()
            .map(|&c| (c + 1).to_string())
            .collect();
        working = working.with_attribute("cluster", &labels);
    }
    if let Some(path) = regroup_file {
        let mapping = load_regroup_mapping(path)?;
        working = regroup(&working, row, &mapping)?;
    }
    let table = crosstab(&working, row, col, drop_na)?;
    let test = chi_square(&table);
    match format {
        Format::Csv => {
            print_csv(&contingency_rows(&table))?;
            match &test {
                Ok(result) => eprintln!("{}", chi_square_json(result, fmt)),
                Err(err) => eprintln!("{}", json!({ "error": err.to_string() })),
            }
        }
        Format::Json => {
            let counts: Vec<Vec<u64>> = (0..table.rows())
                .map(|i| (0..table.cols()).map(|j| table.count(i, j)).collect())
                .collect();
            print_json(&json!({
                "rows": table.row_categories(),
                "cols": table.col_categories(),
                "counts": counts,
                "row_totals": table.row_totals(),
                "col_totals": table.col_totals(),
                "grand_total": table.grand_total(),
                "chi_square": match &test {
                    Ok(result) => chi_square_json(result, fmt),
                    Err(err) => json!({ "error": err.to_string() }),
                },
            }));
        }
    }
    // The tabulation succeeded; a chi-square domain failure still marks the
    // run as an analysis failure for scripting.
    match test {
        Ok(_) => Ok(0),
        Err(_) => Ok(1),
    }
}
