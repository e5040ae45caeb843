//! End-to-end checks of the bundled corpus against the published tables.

use seqcrash::alignment::{distance_matrix, CostScheme};
use seqcrash::bundled;
use seqcrash::clustering::{pam, silhouette, sweep};
use seqcrash::corpus::NA;

/// Published k=7 group sizes, by group number 1..=7.
const GROUP_SIZES: [usize; 7] = [35, 13, 57, 15, 9, 8, 31];

#[test]
fn distance_matrix_checksums_match_independent_transcription() {
    // Upper-triangle sums computed by a separate implementation working
    // from its own transcription of the source tables, not these CSVs.
    let corpus = bundled::corpus();
    let lev2 = distance_matrix(&corpus, &CostScheme::levenshtein_ii()).unwrap();
    let lev = distance_matrix(&corpus, &CostScheme::levenshtein()).unwrap();
    let upper_sum = |dm: &seqcrash::alignment::DissimilarityMatrix| -> f64 {
        let mut total = 0.0;
        for i in 0..dm.n() {
            for j in (i + 1)..dm.n() {
                total += dm.get(i, j);
            }
        }
        total
    };
    assert_eq!(upper_sum(&lev2), 49019.0);
    assert_eq!(upper_sum(&lev), 32312.0);
}

#[test]
fn contiguous_mining_matches_independent_counts() {
    use seqcrash::mining::frequent_subsequences;
    let corpus = bundled::corpus();
    let table = frequent_subsequences(&corpus, 5, usize::MAX, true).unwrap();
    let count_of = |pattern: &str| {
        table
            .rows
            .iter()
            .find(|r| r.joined(corpus.alphabet()) == pattern)
            .map(|r| r.count)
            .unwrap_or(0)
    };
    assert_eq!(count_of("S1-X21"), 45);
    assert_eq!(count_of("DG-X21"), 21);
    assert_eq!(count_of("D1-DG"), 14);
    assert_eq!(count_of("A1-X21"), 12);
}

#[test]
fn k7_partition_tracks_published_groups() {
    let corpus = bundled::corpus();
    let dm = distance_matrix(&corpus, &CostScheme::levenshtein_ii()).unwrap();
    let clustering = pam(&dm, 7).unwrap();
    assert_eq!(clustering.cost, 183.0);

    // Published group of every sequence, from the bundled attribute.
    let table = corpus.attributes().unwrap();
    let groups: Vec<usize> = corpus
        .sequences()
        .iter()
        .map(|s| {
            table
                .value(s.id(), bundled::CLUSTER_PAPER)
                .unwrap_or(NA)
                .parse::<usize>()
                .unwrap()
        })
        .collect();

    // Best relabeling: each PAM cluster maps to its dominant published group.
    let mut agree = 0usize;
    let mut mapped_sizes = [0usize; 7];
    for cluster in 0..7 {
        let members: Vec<usize> = (0..corpus.len())
            .filter(|&i| clustering.assignment[i] == cluster)
            .collect();
        let mut votes = [0usize; 8];
        for &i in &members {
            votes[groups[i]] += 1;
        }
        let dominant = (1..=7).max_by_key(|&g| votes[g]).unwrap();
        agree += votes[dominant];
        mapped_sizes[dominant - 1] = members.len();
    }
    let disagreements = corpus.len() - agree;
    assert!(
        disagreements <= 5,
        "membership disagreements {disagreements} > 5"
    );
    for (g, (&got, &want)) in mapped_sizes.iter().zip(&GROUP_SIZES).enumerate() {
        assert!(
            (got as i64 - want as i64).abs() <= 3,
            "group {} size {got} vs published {want}",
            g + 1
        );
    }
}

#[test]
fn sweep_matches_published_silhouette_column() {
    let published = [0.36, 0.26, 0.32, 0.36, 0.40, 0.42, 0.42, 0.43, 0.45];
    let corpus = bundled::corpus();
    let dm = distance_matrix(&corpus, &CostScheme::levenshtein_ii()).unwrap();
    let sweep = sweep(&dm, 2, 10).unwrap();
    assert_eq!(sweep.rows.len(), 9);
    for (row, &want) in sweep.rows.iter().zip(&published) {
        assert!(
            (row.overall_silhouette - want).abs() <= 0.05,
            "k={} overall {} vs published {}",
            row.k,
            row.overall_silhouette,
            want
        );
    }
    let k2 = &sweep.rows[0];
    assert_eq!((k2.min_size, k2.max_size), (51, 117));
    let k7 = &sweep.rows[5];
    assert!((k7.min_size as i64 - 8).abs() <= 3);
    assert!((k7.max_size as i64 - 57).abs() <= 3);
}

#[test]
fn k7_silhouette_detail() {
    let corpus = bundled::corpus();
    let dm = distance_matrix(&corpus, &CostScheme::levenshtein_ii()).unwrap();
    let clustering = pam(&dm, 7).unwrap();
    let sil = silhouette(&dm, &clustering).unwrap();
    assert!((sil.overall - 0.42).abs() <= 0.05);
    let mean = sil.widths.iter().sum::<f64>() / sil.widths.len() as f64;
    assert!((sil.overall - mean).abs() < 1e-12);
}
