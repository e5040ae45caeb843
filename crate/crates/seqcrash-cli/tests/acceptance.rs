#![allow(clippy::excessive_precision)]
//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured values (visible with `--nocapture`).
//!
//! Criteria 1-7 exercise the library directly; criterion 8 drives the
//! compiled `seqcrash` binary.

use std::collections::HashMap;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use seqcrash::alignment::{distance_matrix, om_distance, CostScheme, DissimilarityMatrix};
use seqcrash::bundled;
use seqcrash::clustering::{pam, sweep, Clustering};
use seqcrash::corpus::{corpus_stats, crash_rates, Corpus, EventSequence, LabelId, NA};
use seqcrash::mining::{contains_subsequence, frequent_subsequences, SubsequencePattern};
use seqcrash::stats::chi_square_p_value;
use seqcrash::transition::{build_transition_matrix, Denominator};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_seqcrash"))
}

// --- Criterion 1: top-15 subsequence ranking (exact), runtime < 0.1 s ---

#[test]
fn criterion_1_top15_subsequences_exact() {
    let expected: [(&str, usize, u32); 15] = [
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
    let corpus = bundled::corpus();
    let start = Instant::now();
    let table = frequent_subsequences(&corpus, 5, 15, false).unwrap();
    let elapsed = start.elapsed();

    let mut got: Vec<(String, usize, u32)> = table
        .rows
        .iter()
        .map(|r| {
            (
                r.joined(corpus.alphabet()),
                r.count,
                r.share_percent(table.corpus_size),
            )
        })
        .collect();
    let counts: Vec<usize> = got.iter().map(|r| r.1).collect();
    assert_eq!(
        counts,
        vec![155, 71, 68, 41, 38, 36, 32, 32, 32, 16, 16, 16, 15, 15, 15]
    );
    let mut want: Vec<(String, usize, u32)> = expected
        .iter()
        .map(|&(p, c, s)| (p.to_string(), c, s))
        .collect();
    got.sort();
    want.sort();
    assert_eq!(got, want, "top-15 rows differ from the published ranking");
    assert!(
        elapsed.as_secs_f64() < 0.1,
        "mining took {elapsed:?}, budget 0.1 s"
    );

    // The same 15 rows through the command line, checked byte-for-byte
    // under the documented tie-break order.
    let warmup = bin().args(["freq", "--top", "15"]).output().unwrap();
    assert!(warmup.status.success());
    let start = Instant::now();
    let output = bin().args(["freq", "--top", "15"]).output().unwrap();
    let cli_elapsed = start.elapsed();
    assert!(output.status.success());
    let expected_stdout = "pattern,count,share\n\
        X21,155,92%\nS1,71,42%\nS1-X21,68,40%\nDG,41,24%\nA1,38,23%\n\
        A1-X21,36,21%\nD1,32,19%\nD1-X21,32,19%\nDG-X21,32,19%\nML2,16,10%\n\
        D1-DG,16,10%\nD1-DG-X21,16,10%\nY,15,9%\nML2-X21,15,9%\nY-X21,15,9%\n";
    assert_eq!(String::from_utf8_lossy(&output.stdout), expected_stdout);
    assert!(
        cli_elapsed.as_secs_f64() < 0.1,
        "freq command took {cli_elapsed:?}, budget 0.1 s"
    );
    println!("ACCEPTANCE 1 PASS: all 15 rows exact (library {elapsed:?}, command {cli_elapsed:?})");
}

// --- Criterion 2: disengagement transition rates within 1 percentage point ---

#[test]
fn criterion_2_focal_dg_rates() {
    let incoming: [(&str, f64); 11] = [
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
    let outgoing: [(&str, f64); 11] = [
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
    let corpus = bundled::corpus();
    let tm = build_transition_matrix(&corpus, Denominator::AllOccurrences);
    let report = tm.focus_report("DG").unwrap();

    assert_eq!(report.incoming.len(), incoming.len());
    assert_eq!(report.outgoing.len(), outgoing.len());
    for (published, got) in [
        (&incoming[..], &report.incoming),
        (&outgoing[..], &report.outgoing),
    ] {
        for &(code, pct) in published {
            let rate = got
                .iter()
                .find(|r| r.code == code)
                .unwrap_or_else(|| panic!("missing rate for {code}"));
            let got_pct = 100.0 * rate.probability;
            assert!(
                (got_pct - pct).abs() <= 1.0,
                "{code}: {got_pct:.2}% vs published {pct}%"
            );
        }
    }
    let total: f64 = report.outgoing.iter().map(|r| r.probability).sum();
    assert!((total - 1.0).abs() < 1e-12, "outgoing rates sum to {total}");
    println!("ACCEPTANCE 2 PASS: all 22 focal-DG rates within 1pp, outgoing sums to 100%");
}

// --- Criterion 3: worked alignment example costs exactly one indel ---

#[test]
fn criterion_3_alignment_cost() {
    let corpus = bundled::corpus();
    let a = corpus.alphabet();
    let seq = |codes: &[&str]| {
        EventSequence::new(
            codes.join("-"),
            codes
                .iter()
                .map(|c| a.id_of(c).unwrap())
                .collect::<Vec<_>>(),
        )
    };
    let d = om_distance(
        &seq(&["S1", "PR2", "X21"]),
        &seq(&["S1", "A1", "PR2", "X21"]),
        &CostScheme::levenshtein(),
    )
    .unwrap();
    assert_eq!(d, 1.0);
    println!("ACCEPTANCE 3 PASS: Levenshtein(S1-PR2-X21, S1-A1-PR2-X21) = 1");
}

// --- Criterion 4: silhouette sweep within 0.05, sizes within 3 for k in {2, 7} ---

#[test]
fn criterion_4_sweep_matches_published_column() {
    let published = [0.36, 0.26, 0.32, 0.36, 0.40, 0.42, 0.42, 0.43, 0.45];
    let corpus = bundled::corpus();
    let dm = distance_matrix(&corpus, &CostScheme::levenshtein_ii()).unwrap();
    let result = sweep(&dm, 2, 10).unwrap();
    for (row, &want) in result.rows.iter().zip(&published) {
        assert!(
            (row.overall_silhouette - want).abs() <= 0.05,
            "k={}: {:.4} vs published {want}",
            row.k,
            row.overall_silhouette
        );
    }
    for (k, min_want, max_want) in [(2usize, 51i64, 117i64), (7, 8, 57)] {
        let row = result.rows.iter().find(|r| r.k == k).unwrap();
        assert!(
            (row.min_size as i64 - min_want).abs() <= 3
                && (row.max_size as i64 - max_want).abs() <= 3,
            "k={k}: sizes {}..{} vs published {min_want}..{max_want}",
            row.min_size,
            row.max_size
        );
    }
    let sils: Vec<String> = result
        .rows
        .iter()
        .map(|r| format!("{:.2}", r.overall_silhouette))
        .collect();
    println!(
        "ACCEPTANCE 4 PASS: sweep silhouettes [{}] within 0.05",
        sils.join(", ")
    );
}

// --- Criterion 5: seven-group partition near-reproduction at k = 7 ---

fn published_groups(corpus: &Corpus) -> Vec<usize> {
    let table = corpus.attributes().unwrap();
    corpus
        .sequences()
        .iter()
        .map(|s| {
            table
                .value(s.id(), bundled::CLUSTER_PAPER)
                .filter(|v| *v != NA)
                .unwrap()
                .parse()
                .unwrap()
        })
        .collect()
}

fn best_relabeling(clustering: &Clustering, groups: &[usize]) -> (usize, Vec<usize>) {
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
    let k = clustering.k;
    let mut agreement = vec![vec![0usize; k]; k];
    for (i, &c) in clustering.assignment.iter().enumerate() {
        agreement[c][groups[i] - 1] += 1;
    }
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = (0usize, perm.clone());
    permutations(&mut perm, 0, &mut |p| {
        let agree: usize = (0..k).map(|c| agreement[c][p[c]]).sum();
        if agree > best.0 {
            best = (agree, p.to_vec());
        }
    });
    (
        clustering.assignment.len() - best.0,
        best.1.iter().map(|&g| g + 1).collect(),
    )
}

#[test]
fn criterion_5_k7_partition_near_reproduction() {
    let group_sizes = [35usize, 13, 57, 15, 9, 8, 31];
    let corpus = bundled::corpus();
    let dm = distance_matrix(&corpus, &CostScheme::levenshtein_ii()).unwrap();
    let clustering = pam(&dm, 7).unwrap();
    let groups = published_groups(&corpus);
    let (disagreements, mapping) = best_relabeling(&clustering, &groups);
    assert!(
        disagreements <= 5,
        "membership disagreements {disagreements} > 5"
    );
    let sizes = clustering.cluster_sizes();
    for (cluster, &group) in mapping.iter().enumerate() {
        let want = group_sizes[group - 1] as i64;
        let got = sizes[cluster] as i64;
        assert!(
            (got - want).abs() <= 3,
            "cluster mapped to group {group}: size {got} vs published {want}"
        );
    }
    println!(
        "ACCEPTANCE 5 PASS: k=7 partition matches published groups with {disagreements} \
         disagreement(s), sizes {sizes:?}"
    );
}

// --- Criterion 6: per-organization crash rates (exact after rounding) ---

#[test]
fn criterion_6_crash_rates() {
    let expected_rounded = [15u64, 67, 10, 40, 11, 23, 37, 52];
    let rates = crash_rates(&bundled::mileage()).unwrap();
    assert_eq!(rates.len(), 9);
    for (rate, &want) in rates.iter().zip(&expected_rounded) {
        assert_eq!(rate.rounded, want, "{}", rate.organization);
    }
    let all = rates.last().unwrap();
    assert_eq!(all.organization, "All");
    assert_eq!(all.rounded, 28);
    println!("ACCEPTANCE 6 PASS: all 8 organization rates and the aggregate 28 exact");
}

// --- Criterion 7: property suites ---

const PROP_CODES: usize = 3;

fn random_events(rng: &mut ChaCha8Rng, len: usize) -> Vec<LabelId> {
    let corpus = bundled::corpus();
    let codes = ["S1", "A1", "X21"];
    (0..len)
        .map(|_| {
            corpus
                .alphabet()
                .id_of(codes[rng.gen_range(0..PROP_CODES)])
                .unwrap()
        })
        .collect()
}

fn sequence(events: Vec<LabelId>) -> EventSequence {
    EventSequence::new("r", events)
}

#[test]
fn criterion_7a_metric_axioms_on_1000_triples_per_scheme() {
    let mut rng = ChaCha8Rng::seed_from_u64(70_001);
    for scheme in [CostScheme::levenshtein(), CostScheme::levenshtein_ii()] {
        for _ in 0..1000 {
            let (la, lb, lc) = (
                rng.gen_range(1..=6),
                rng.gen_range(1..=6),
                rng.gen_range(1..=6),
            );
            let a = sequence(random_events(&mut rng, la));
            let b = sequence(random_events(&mut rng, lb));
            let c = sequence(random_events(&mut rng, lc));
            let dab = om_distance(&a, &b, &scheme).unwrap();
            let dba = om_distance(&b, &a, &scheme).unwrap();
            let dac = om_distance(&a, &c, &scheme).unwrap();
            let dbc = om_distance(&b, &c, &scheme).unwrap();
            assert!(dab >= 0.0);
            assert_eq!(dab, dba);
            assert_eq!(om_distance(&a, &a, &scheme).unwrap(), 0.0);
            assert!(dac <= dab + dbc, "triangle inequality");
        }
    }
    // Hamming on equal-length pairs.
    let scheme = CostScheme::hamming();
    for _ in 0..1000 {
        let len = rng.gen_range(1..=6);
        let a = sequence(random_events(&mut rng, len));
        let b = sequence(random_events(&mut rng, len));
        let c = sequence(random_events(&mut rng, len));
        let dab = om_distance(&a, &b, &scheme).unwrap();
        assert!(dab >= 0.0);
        assert_eq!(dab, om_distance(&b, &a, &scheme).unwrap());
        assert_eq!(om_distance(&a, &a, &scheme).unwrap(), 0.0);
        let dac = om_distance(&a, &c, &scheme).unwrap();
        let dbc = om_distance(&b, &c, &scheme).unwrap();
        assert!(dac <= dab + dbc);
    }
    println!("ACCEPTANCE 7a PASS: metric axioms on 1000 random triples per scheme");
}

/// Every sequence of length 1..=4 over a 3-letter alphabet.
fn all_short_sequences() -> Vec<Vec<LabelId>> {
    let corpus = bundled::corpus();
    let codes: Vec<LabelId> = ["S1", "A1", "X21"]
        .iter()
        .map(|c| corpus.alphabet().id_of(c).unwrap())
        .collect();
    let mut out = Vec::new();
    for len in 1..=4usize {
        let mut stack = vec![Vec::new()];
        for _ in 0..len {
            let mut next = Vec::new();
            for prefix in stack {
                for &c in &codes {
                    let mut seq: Vec<LabelId> = prefix.clone();
                    seq.push(c);
                    next.push(seq);
                }
            }
            stack = next;
        }
        out.extend(stack);
    }
    out
}

/// Exhaustive alignment search, independent of the DP implementation.
fn exhaustive_alignment(a: &[LabelId], b: &[LabelId], indel: f64, sub: f64) -> f64 {
    if a.is_empty() {
        return b.len() as f64 * indel;
    }
    if b.is_empty() {
        return a.len() as f64 * indel;
    }
    let delete = exhaustive_alignment(&a[1..], b, indel, sub) + indel;
    let insert = exhaustive_alignment(a, &b[1..], indel, sub) + indel;
    let align =
        exhaustive_alignment(&a[1..], &b[1..], indel, sub) + if a[0] == b[0] { 0.0 } else { sub };
    delete.min(insert).min(align)
}

#[test]
fn criterion_7b_om_equals_exhaustive_alignment_oracle() {
    let seqs = all_short_sequences();
    assert_eq!(seqs.len(), 3 + 9 + 27 + 81);
    let scheme = CostScheme::levenshtein();
    for a in &seqs {
        for b in &seqs {
            let got = om_distance(&sequence(a.clone()), &sequence(b.clone()), &scheme).unwrap();
            let want = exhaustive_alignment(a, b, 1.0, 1.0);
            assert_eq!(got, want, "{a:?} vs {b:?}");
        }
    }
    println!(
        "ACCEPTANCE 7b PASS: OM distance equals exhaustive alignment on all {} pairs",
        seqs.len() * seqs.len()
    );
}

#[test]
fn criterion_7c_levenshtein_ii_equals_lcs_identity() {
    fn is_subsequence(needle: &[LabelId], hay: &[LabelId]) -> bool {
        let mut it = hay.iter();
        needle.iter().all(|n| it.any(|h| h == n))
    }
    // Brute-force LCS: longest subset of the shorter side contained in the
    // longer side.
    fn lcs(a: &[LabelId], b: &[LabelId]) -> usize {
        let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
        let mut best = 0usize;
        for mask in 0u32..(1 << short.len()) {
            let sub: Vec<LabelId> = (0..short.len())
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| short[i])
                .collect();
            if sub.len() > best && is_subsequence(&sub, long) {
                best = sub.len();
            }
        }
        best
    }
    let seqs = all_short_sequences();
    let scheme = CostScheme::levenshtein_ii();
    for a in &seqs {
        for b in &seqs {
            let got = om_distance(&sequence(a.clone()), &sequence(b.clone()), &scheme).unwrap();
            let want = (a.len() + b.len() - 2 * lcs(a, b)) as f64;
            assert_eq!(got, want, "{a:?} vs {b:?}");
        }
    }
    println!("ACCEPTANCE 7c PASS: indel-only distance equals the LCS identity on all pairs");
}

#[test]
fn criterion_7d_nonfinal_rows_sum_to_one() {
    let corpus = bundled::corpus();
    let tm = build_transition_matrix(&corpus, Denominator::NonFinal);
    let mut stochastic_rows = 0;
    for a in 0..tm.k() {
        let row: f64 = (0..tm.k()).map(|b| tm.probability(a, b)).sum();
        if tm.nonfinal_occurrences(a) > 0 {
            assert!((row - 1.0).abs() <= 1e-12, "row {a} sums to {row}");
            stochastic_rows += 1;
        } else {
            assert_eq!(row, 0.0);
        }
    }
    println!("ACCEPTANCE 7d PASS: {stochastic_rows} nonzero rows sum to 1 within 1e-12");
}

#[test]
fn criterion_7e_mining_equals_brute_force_on_bundled_corpus() {
    let corpus = bundled::corpus();
    for contiguous in [false, true] {
        let table = frequent_subsequences(&corpus, 5, usize::MAX, contiguous).unwrap();
        // Oracle: collect candidate patterns by direct 2^len enumeration,
        // then count containment with the scan-based test.
        let mut candidates: std::collections::HashSet<Vec<LabelId>> =
            std::collections::HashSet::new();
        for seq in corpus.sequences() {
            let events = seq.events();
            let n = events.len();
            if contiguous {
                for len in 1..=n {
                    for w in events.windows(len) {
                        candidates.insert(w.to_vec());
                    }
                }
            } else {
                for mask in 1u64..(1 << n) {
                    let sub: Vec<LabelId> = (0..n)
                        .filter(|&i| mask >> i & 1 == 1)
                        .map(|i| events[i])
                        .collect();
                    candidates.insert(sub);
                }
            }
        }
        let mut oracle: HashMap<Vec<LabelId>, usize> = HashMap::new();
        for pattern in candidates {
            let p = SubsequencePattern::new(pattern.clone(), contiguous);
            let count = corpus
                .sequences()
                .iter()
                .filter(|s| contains_subsequence(s, &p))
                .count();
            oracle.insert(pattern, count);
        }
        assert_eq!(table.rows.len(), oracle.len());
        for row in &table.rows {
            assert_eq!(
                oracle[&row.elements],
                row.count,
                "pattern {:?}",
                row.joined(corpus.alphabet())
            );
        }
    }
    println!("ACCEPTANCE 7e PASS: mining equals the 2^len brute-force oracle, both modes");
}

fn blob_instance(rng: &mut ChaCha8Rng, n: usize, k: usize) -> DissimilarityMatrix {
    // k cluster centers separated by at least 10 in L1, points jittered
    // by at most 1 around their center.
    let centers: Vec<(f64, f64)> = loop {
        let candidate: Vec<(f64, f64)> = (0..k)
            .map(|_| (rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)))
            .collect();
        let separated = candidate.iter().enumerate().all(|(i, a)| {
            candidate[..i]
                .iter()
                .all(|b| (a.0 - b.0).abs() + (a.1 - b.1).abs() >= 10.0)
        });
        if separated {
            break candidate;
        }
    };
    let points: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let (cx, cy) = centers[i % k];
            (cx + rng.gen_range(-1.0..1.0), cy + rng.gen_range(-1.0..1.0))
        })
        .collect();
    let ids = (0..n).map(|i| format!("p{i}")).collect();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            values[i * n + j] =
                (points[i].0 - points[j].0).abs() + (points[i].1 - points[j].1).abs();
        }
    }
    DissimilarityMatrix::from_values(ids, values).unwrap()
}

fn exhaustive_medoid_cost(dm: &DissimilarityMatrix, k: usize) -> f64 {
    fn combos(
        n: usize,
        k: usize,
        start: usize,
        current: &mut Vec<usize>,
        best: &mut f64,
        dm: &DissimilarityMatrix,
    ) {
        if current.len() == k {
            let cost: f64 = (0..n)
                .map(|i| {
                    current
                        .iter()
                        .map(|&m| dm.get(i, m))
                        .fold(f64::INFINITY, f64::min)
                })
                .sum();
            if cost < *best {
                *best = cost;
            }
            return;
        }
        for m in start..n {
            current.push(m);
            combos(n, k, m + 1, current, best, dm);
            current.pop();
        }
    }
    let mut best = f64::INFINITY;
    combos(dm.n(), k, 0, &mut Vec::new(), &mut best, dm);
    best
}

#[test]
fn criterion_7f_pam_equals_exhaustive_search_on_small_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(70_006);
    let mut instances = 0;
    for _ in 0..300 {
        let n = rng.gen_range(3..=8);
        let k = rng.gen_range(1..=3.min(n));
        let dm = blob_instance(&mut rng, n, k);
        let clustering = pam(&dm, k).unwrap();
        let optimal = exhaustive_medoid_cost(&dm, k);
        assert!(
            (clustering.cost - optimal).abs() < 1e-9,
            "n={n} k={k}: PAM cost {} vs optimal {optimal}",
            clustering.cost
        );
        instances += 1;
    }
    // The published-style sanity case: two well-separated triples.
    let dm = DissimilarityMatrix::from_values(
        (0..6).map(|i| format!("p{i}")).collect(),
        vec![
            0., 1., 1., 9., 9., 9., //
            1., 0., 1., 9., 9., 9., //
            1., 1., 0., 9., 9., 9., //
            9., 9., 9., 0., 1., 1., //
            9., 9., 9., 1., 0., 1., //
            9., 9., 9., 1., 1., 0.,
        ],
    )
    .unwrap();
    let clustering = pam(&dm, 2).unwrap();
    assert_eq!(clustering.cost, exhaustive_medoid_cost(&dm, 2));
    println!("ACCEPTANCE 7f PASS: PAM equals exhaustive medoid search on {instances} instances");
}

#[test]
fn criterion_7g_chi_square_p_values_match_reference() {
    // Frozen 50-digit reference values of Q(df/2, x/2).
    let frozen: [(usize, f64, f64); 15] = [
        (1, 0.5, 0.47950012218695346),
        (1, 3.0, 0.083264516663550402),
        (1, 6.666666666666667, 0.0098232745075192464),
        (2, 1.0, 0.60653065971263342),
        (3, 7.81, 0.050106056350005941),
        (5, 15.09, 0.0099846249580604095),
        (6, 5.69, 0.45879635978900532),
        (6, 83.73, 6.0488591767068308e-16),
        (10, 3.94, 0.95001309079009072),
        (12, 42.4, 2.8518327665215644e-5),
        (24, 33.2, 0.099923344270194745),
        (40, 55.76, 0.049985926244196944),
        (40, 199.0, 5.6498352413316212e-23),
        (1, 200.0, 2.0884875837625448e-45),
        (17, 27.59, 0.049962898538035543),
    ];
    for &(df, x, want) in &frozen {
        let got = chi_square_p_value(x, df);
        assert!((got - want).abs() <= 1e-9, "df={df} x={x}: {got} vs {want}");
    }
    // Independent implementation cross-check over the required grid.
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let mut points = 0;
    for df in 1..=40usize {
        let reference = ChiSquared::new(df as f64).unwrap();
        let mut x = 0.0;
        while x <= 200.0 {
            let got = chi_square_p_value(x, df);
            let want = 1.0 - reference.cdf(x);
            assert!(
                (got - want).abs() <= 1e-6,
                "df={df} x={x}: {got} vs statrs {want}"
            );
            points += 1;
            x += 0.5;
        }
    }
    println!(
        "ACCEPTANCE 7g PASS: p-values match the frozen reference and statrs at {points} grid points"
    );
}

// --- Criterion 8: end-to-end report --check under 1 second ---

#[test]
fn criterion_8_report_check_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report");
    // Warm-up run so the timed run measures the pipeline, not page faults.
    let warmup = bin()
        .args(["report", "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(warmup.status.success());

    let start = Instant::now();
    let output = bin()
        .args(["report", "--check", "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    let elapsed = start.elapsed();
    assert!(
        output.status.success(),
        "report --check failed:\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "report --check took {elapsed:?}, budget 1 s"
    );
    for artifact in [
        "freq_top15.csv",
        "transitions_dg.csv",
        "sweep.csv",
        "clusters_k7.csv",
        "clusters_k7.json",
    ] {
        assert!(out.join(artifact).is_file(), "missing artifact {artifact}");
    }
    println!("ACCEPTANCE 8 PASS: report --check exit 0 in {elapsed:?}, all artifacts written");
}

// --- Supporting checks named alongside the criteria ---

#[test]
fn bundled_corpus_counts_match_data_section() {
    let corpus = bundled::corpus();
    let stats = corpus_stats(&corpus).unwrap();
    assert_eq!(stats.sequences, 168);
    assert_eq!(stats.events, 497);
    let get = |code: &str| {
        stats
            .label_counts
            .iter()
            .find(|(c, _)| c == code)
            .map(|(_, n)| *n)
            .unwrap()
    };
    assert_eq!(get("S1"), 76);
    assert_eq!(get("X21"), 155);
    assert_eq!(get("DG"), 41);
}
