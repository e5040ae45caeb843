//! One-shot `report` command: writes the headline artifacts from the
//! bundled pipeline and optionally checks them against the published
//! values embedded below.

use std::fs;
use std::path::Path;

use seqcrash::alignment::distance_matrix;
use seqcrash::bundled::CLUSTER_PAPER;
use seqcrash::clustering::{pam, sweep, Clustering};
use seqcrash::corpus::{Corpus, NA};
use seqcrash::transition::{build_transition_matrix, Denominator};
use seqcrash::Result;

use crate::commands::{
    build_scheme, clustering_outputs, focus_report_rows, freq_rows, sweep_rows, Formatter,
};
use crate::MetricOpts;

/// Published top-15 subsequence table: pattern, containment count, percent.
const TOP15: [(&str, usize, u32); 15] = [
    ("X21", 155, 92),
    ("S1", 71, 42),
    ("S1-X21", 68, 40),
    ("DG", 41, 24),
    ("A1", 38, 23),
    ("A1-X21", 36, 21),
    ("D1", 32, 19),
    ("D1-X21", 32, 19),
    ("DG-X21", 32, 19),
    ("D1-DG", 16, 10),
    ("D1-DG-X21", 16, 10),
    ("ML2", 16, 10),
    ("ML2-X21", 15, 9),
    ("Y", 15, 9),
    ("Y-X21", 15, 9),
];

/// Published transition rates around disengagement, in whole percent.
const DG_INCOMING: [(&str, f64); 11] = [
    ("D1", 44.0),
    ("D2", 100.0),
    ("ML2", 31.0),
    ("ML3", 33.0),
    ("MR1", 43.0),
    ("MR2", 17.0),
    ("MR3", 50.0),
    ("PL2", 15.0),
    ("S1", 1.0),
    ("V2", 20.0),
    ("Y", 27.0),
];
const DG_OUTGOING: [(&str, f64); 11] = [
    ("X21", 51.0),
    ("X12", 10.0),
    ("X10", 7.0),
    ("MR1", 7.0),
    ("D1", 5.0),
    ("ML2", 5.0),
    ("V2", 5.0),
    ("B1", 2.0),
    ("L2", 2.0),
    ("ML1", 2.0),
    ("MR2", 2.0),
];

/// Published overall average silhouettes for k = 2..=10.
const SWEEP_SILHOUETTES: [f64; 9] = [0.36, 0.26, 0.32, 0.36, 0.40, 0.42, 0.42, 0.43, 0.45];
/// Published (min, max) cluster sizes for k = 2 and k = 7.
const SIZES_K2: (usize, usize) = (51, 117);
const SIZES_K7: (usize, usize) = (8, 57);
/// Published k = 7 group sizes, groups 1..=7.
const GROUP_SIZES: [usize; 7] = [35, 13, 57, 15, 9, 8, 31];

const MEMBERSHIP_TOLERANCE: usize = 5;
const SIZE_TOLERANCE: i64 = 3;
const SILHOUETTE_TOLERANCE: f64 = 0.05;
const RATE_TOLERANCE_PP: f64 = 1.0;

pub fn cmd_report(
    corpus: &Corpus,
    out_dir: &str,
    check: bool,
    metric: &MetricOpts,
    fmt: &Formatter,
) -> Result<u8> {
    let scheme = build_scheme(metric)?;

    // Compute everything before touching the filesystem.
    let freq = freq_rows(corpus, 5, 15, false)?;
    let tm = build_transition_matrix(corpus, Denominator::AllOccurrences);
    let dg = tm.focus_report("DG")?;
    let dm = distance_matrix(corpus, &scheme)?;
    let sweep_result = sweep(&dm, 2, 10)?;
    let clustering = pam(&dm, 7)?;
    let (cluster_csv, cluster_summary) = clustering_outputs(corpus, &dm, &clustering, fmt)?;

    let out = Path::new(out_dir);
    fs::create_dir_all(out)?;

    let mut freq_csv = vec![vec![
        "pattern".to_string(),
        "count".to_string(),
        "share".to_string(),
    ]];
    for (pattern, count, pct) in &freq {
        freq_csv.push(vec![pattern.clone(), count.to_string(), format!("{pct}%")]);
    }
    write_csv_file(&out.join("freq_top15.csv"), &freq_csv)?;
    write_csv_file(
        &out.join("transitions_dg.csv"),
        &focus_report_rows(&dg, fmt),
    )?;
    write_csv_file(&out.join("sweep.csv"), &sweep_rows(&sweep_result.rows, fmt))?;
    write_csv_file(&out.join("clusters_k7.csv"), &cluster_csv)?;
    fs::write(
        out.join("clusters_k7.json"),
        serde_json::to_string_pretty(&cluster_summary).expect("valid JSON") + "\n",
    )?;

    if !check {
        return Ok(0);
    }

    let mut diffs: Vec<String> = Vec::new();

    // Top-15 rows must match exactly, order-insensitively within tied counts.
    let mut got: Vec<(String, usize, u32)> = freq.clone();
    let mut want: Vec<(String, usize, u32)> = TOP15
        .iter()
        .map(|&(p, c, s)| (p.to_string(), c, s))
        .collect();
    got.sort();
    want.sort();
    if got != want {
        for (g, w) in got.iter().zip(&want) {
            if g != w {
                diffs.push(format!("freq row mismatch: got {g:?}, published {w:?}"));
            }
        }
        if got.len() != want.len() {
            diffs.push(format!(
                "freq rows: got {}, expected {}",
                got.len(),
                want.len()
            ));
        }
    }

    // Focal-DG rates within one percentage point.
    for (published, rates, direction) in [
        (&DG_INCOMING[..], &dg.incoming, "incoming"),
        (&DG_OUTGOING[..], &dg.outgoing, "outgoing"),
    ] {
        for &(code, pct) in published {
            match rates.iter().find(|r| r.code == code) {
                Some(rate) => {
                    let got_pct = 100.0 * rate.probability;
                    if (got_pct - pct).abs() > RATE_TOLERANCE_PP {
                        diffs.push(format!(
                            "transition {direction} {code}: {got_pct:.1}% vs published {pct}%"
                        ));
                    }
                }
                None => diffs.push(format!("transition {direction} {code}: missing")),
            }
        }
        if published.len() != rates.len() {
            diffs.push(format!(
                "transition {direction}: {} rows vs published {}",
                rates.len(),
                published.len()
            ));
        }
    }
    let outgoing_total: f64 = dg.outgoing.iter().map(|r| r.probability).sum();
    if (outgoing_total - 1.0).abs() > 1e-9 {
        diffs.push(format!(
            "outgoing rates sum to {outgoing_total}, expected 1"
        ));
    }

    // Sweep silhouettes and the k = 2 / k = 7 cluster sizes.
    for (row, &published) in sweep_result.rows.iter().zip(&SWEEP_SILHOUETTES) {
        if (row.overall_silhouette - published).abs() > SILHOUETTE_TOLERANCE {
            diffs.push(format!(
                "sweep k={}: avg silhouette {:.4} vs published {published}",
                row.k, row.overall_silhouette
            ));
        }
    }
    for (k, (min_want, max_want)) in [(2usize, SIZES_K2), (7, SIZES_K7)] {
        let row = sweep_result
            .rows
            .iter()
            .find(|r| r.k == k)
            .expect("k in sweep");
        if (row.min_size as i64 - min_want as i64).abs() > SIZE_TOLERANCE
            || (row.max_size as i64 - max_want as i64).abs() > SIZE_TOLERANCE
        {
            diffs.push(format!(
                "sweep k={k}: sizes {}..{} vs published {min_want}..{max_want}",
                row.min_size, row.max_size
            ));
        }
    }

    // k = 7 partition vs the published groups, up to relabeling.
    match published_groups(corpus) {
        Some(groups) => {
            let (disagreements, mapping) = best_relabeling(&clustering, &groups);
            if disagreements > MEMBERSHIP_TOLERANCE {
                diffs.push(format!(
                    "clusters k=7: {disagreements} membership disagreements (tolerance {MEMBERSHIP_TOLERANCE})"
                ));
            }
            let sizes = clustering.cluster_sizes();
            for (cluster, &group) in mapping.iter().enumerate() {
                let want = GROUP_SIZES[group - 1] as i64;
                let got = sizes[cluster] as i64;
                if (got - want).abs() > SIZE_TOLERANCE {
                    diffs.push(format!(
                        "clusters k=7: cluster for group {group} has {got} members vs published {want}"
                    ));
                }
            }
        }
        None => diffs.push("clusters k=7: corpus lacks the cluster_paper attribute".to_string()),
    }

    if diffs.is_empty() {
        println!("report check: all artifacts match the published values");
        Ok(0)
    } else {
        eprintln!("report check failed ({} differences):", diffs.len());
        for diff in &diffs {
            eprintln!("  {diff}");
        }
        Ok(1)
    }
}

fn write_csv_file(path: &Path, rows: &[Vec<String>]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    for row in rows {
        wtr.write_record(row)?;
    }
    let bytes = wtr.into_inner().map_err(|e| e.into_error())?;
    fs::write(path, bytes)?;
    Ok(())
}

fn published_groups(corpus: &Corpus) -> Option<Vec<usize>> {
    let table = corpus.attributes()?;
    if !table.has_attribute(CLUSTER_PAPER) {
        return None;
    }
    corpus
        .sequences()
        .iter()
        .map(|s| {
            table
                .value(s.id(), CLUSTER_PAPER)
                .filter(|v| *v != NA)
                .and_then(|v| v.parse::<usize>().ok())
                .filter(|&g| (1..=7).contains(&g))
        })
        .collect()
}

/// Best bijective relabeling of clusters onto groups 1..=7; returns the
/// disagreement count and the cluster -> group mapping.
fn best_relabeling(clustering: &Clustering, groups: &[usize]) -> (usize, Vec<usize>) {
    let k = clustering.k;
    // agreement[c][g-1]: members of cluster c published as group g.
    let mut agreement = vec![vec![0usize; k]; k];
    for (i, &c) in clustering.assignment.iter().enumerate() {
        agreement[c][groups[i] - 1] += 1;
    }
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best_mapping = perm.clone();
    let mut best_agree = 0usize;
    permutations(&mut perm, 0, &mut |p| {
        let agree: usize = (0..k).map(|c| agreement[c][p[c]]).sum();
        if agree > best_agree {
            best_agree = agree;
            best_mapping = p.to_vec();
        }
    });
    (
        clustering.assignment.len() - best_agree,
        best_mapping.iter().map(|&g| g + 1).collect(),
    )
}

fn permutations(items: &mut [usize], start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permutations(items, start + 1, visit);
        items.swap(start, i);
    }
}
