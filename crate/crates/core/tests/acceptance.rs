//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! `DSOM_ACCEPTANCE=1,4,9` restricts the run to the listed criteria (7 always
//! reports on whatever runs were made).

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dsom::bench::{
    benchmark_matrix, fit_loglog, fit_quadratic, time_interleaved, time_variant, TimingRecord,
    DEFAULT_REPEATS,
};
use dsom::dissimilarity::{
    build_from_vectors, build_from_words, generate_uniform_square, levenshtein,
};
use dsom::som::{
    repr_brute_force, repr_early_stopping, repr_partial_sums, s_direct, train_with, Arith,
    DsomConfig, EpochObserver, EpochView, PartialSums, Prepared, SumsUpdate, TrainingResult,
    Variant,
};
use dsom::{DissimilarityMatrix, KernelSchedule, Layout, PriorGraph};

/// Tolerance on real-valued control runs.
const FLOAT_RELATIVE: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Per-epoch audit shared by every training run of the suite.

#[derive(Debug, Default)]
struct Audit {
    runs: usize,
    epochs: usize,
    /// s(j, m^l_j) > s(j, m^{l-1}_j) under epoch-l weights, for l >= 2.
    descent_violations: usize,
    descent_checks: usize,
    /// Partial-sum tables compared against a full recomputation.
    table_checks: usize,
    table_mismatches: usize,
    column_sum_mismatches: usize,
    block_epochs: usize,
    individual_epochs: usize,
    first_failure: Option<String>,
}

impl Audit {
    fn fail(&mut self, msg: String) {
        if self.first_failure.is_none() {
            self.first_failure = Some(msg);
        }
    }
}

struct Observer<'a> {
    audit: &'a mut Audit,
    variant: Variant,
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= FLOAT_RELATIVE * scale.abs().max(f64::MIN_POSITIVE)
}

impl<A: Arith> EpochObserver<A> for Observer<'_> {
    fn epoch_done(&mut self, v: &EpochView<'_, A>) {
        let audit = &mut *self.audit;
        audit.epochs += 1;
        match v.stats.update {
            SumsUpdate::Block => audit.block_epochs += 1,
            SumsUpdate::Individual => audit.individual_epochs += 1,
            _ => {}
        }

        if v.epoch >= 2 {
            for j in 0..v.prototypes.len() {
                let new = s_direct(j, v.prototypes[j], v.assignments, v.data, v.weights);
                let old = s_direct(
                    j,
                    v.previous_prototypes[j],
                    v.assignments,
                    v.data,
                    v.weights,
                );
                audit.descent_checks += 1;
                let ok = if A::EXACT {
                    new <= old
                } else {
                    let (n, o) = (A::score_to_f64(new), A::score_to_f64(old));
                    n <= o || close(n, o, o)
                };
                if !ok {
                    audit.descent_violations += 1;
                    let msg = format!(
                        "{} epoch {} model {}: descent violated",
                        self.variant, v.epoch, j
                    );
                    audit.fail(msg);
                }
            }
        }

        if matches!(self.variant, Variant::Memory | Variant::Fast) {
            let sums = v.partial_sums.expect("memory variants keep partial sums");
            let full = PartialSums::compute_full(v.clusters, v.data);
            audit.table_checks += 1;
            for k in 0..v.data.n() {
                let column: f64 = (0..v.data.n())
                    .map(|i| A::value_to_f64(v.data.get(i, k)))
                    .sum();
                let table_ok = if A::EXACT {
                    sums.candidate(k) == full.candidate(k)
                } else {
                    sums.candidate(k)
                        .iter()
                        .zip(full.candidate(k))
                        .all(|(&a, &b)| close(A::value_to_f64(a), A::value_to_f64(b), column))
                };
                if !table_ok {
                    audit.table_mismatches += 1;
                    let msg = format!(
                        "{} epoch {} candidate {}: D differs from recomputation",
                        self.variant, v.epoch, k
                    );
                    audit.fail(msg);
                }
                let colsum_ok = if A::EXACT {
                    let direct =
                        (0..v.data.n()).fold(A::Value::default(), |acc, i| acc + v.data.get(i, k));
                    sums.column_sum(k) == direct
                } else {
                    close(A::value_to_f64(sums.column_sum(k)), column, column)
                };
                if !colsum_ok {
                    audit.column_sum_mismatches += 1;
                    let msg = format!(
                        "{} epoch {} candidate {}: column sum broken",
                        self.variant, v.epoch, k
                    );
                    audit.fail(msg);
                }
            }
        }
    }
}

fn audited(
    config: &DsomConfig,
    data: &Prepared,
    graph: &PriorGraph,
    audit: &mut Audit,
) -> TrainingResult {
    audit.runs += 1;
    let mut obs = Observer {
        audit,
        variant: config.variant,
    };
    match data {
        Prepared::Exact(d) => train_with(config, d, graph, &mut obs),
        Prepared::Float(d) => train_with(config, d, graph, &mut obs),
    }
    .expect("training run")
}

fn prototype_file(r: &TrainingResult) -> String {
    let mut s = String::new();
    for (j, p) in r.prototypes.iter().enumerate() {
        let _ = writeln!(s, "{j} {p}");
    }
    s
}

fn assignment_file(r: &TrainingResult) -> String {
    let mut s = String::new();
    for (i, c) in r.assignments.iter().enumerate() {
        let _ = writeln!(s, "{i} {c}");
    }
    s
}

type Outcome = Result<String, String>;

// ---------------------------------------------------------------------------
// 1. Cross-variant identity.

fn random_words(count: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=10);
            (0..len)
                .map(|_| rng.gen_range(b'a'..=b'h') as char)
                .collect()
        })
        .collect()
}

/// Terms accumulated per epoch by each variant, for criterion 8.
#[derive(Default)]
struct TermLog {
    comparisons: usize,
    violations: Vec<String>,
}

fn identity_case(
    label: &str,
    matrix: &DissimilarityMatrix,
    side: usize,
    seeds: std::ops::Range<u64>,
    audit: &mut Audit,
    terms: &mut TermLog,
) -> Result<usize, String> {
    let data = Prepared::new(matrix).map_err(|e| e.to_string())?;
    if !data.is_exact() {
        return Err(format!("{label}: matrix is not integer-valued"));
    }
    let graph = PriorGraph::lattice(Layout::Hex, side).unwrap();
    let schedule = KernelSchedule::for_graph(&graph, 100).unwrap();
    let mut runs = 0;
    for seed in seeds {
        let results: Vec<TrainingResult> = Variant::ALL
            .iter()
            .map(|&v| audited(&DsomConfig::new(v, schedule, seed), &data, &graph, audit))
            .collect();
        runs += results.len();
        let (p0, a0) = (prototype_file(&results[0]), assignment_file(&results[0]));
        for (v, r) in Variant::ALL.iter().zip(&results).skip(1) {
            if prototype_file(r) != p0 || assignment_file(r) != a0 {
                return Err(format!("{label} seed {seed}: {v} differs from brute"));
            }
        }
        let partial = &results[1];
        for (v, r) in [
            (Variant::EarlyStop, &results[2]),
            (Variant::Fast, &results[4]),
        ] {
            for (e, p) in r.epochs.iter().zip(&partial.epochs) {
                terms.comparisons += 1;
                if e.terms_accumulated > p.terms_accumulated {
                    terms.violations.push(format!(
                        "{label} seed {seed} epoch {}: {v} {} > partial {}",
                        e.epoch, e.terms_accumulated, p.terms_accumulated
                    ));
                }
            }
        }
    }
    Ok(runs)
}

fn criterion_1(audit: &mut Audit, terms: &mut TermLog) -> Outcome {
    let mut runs = 0;
    for (n, side) in [(100, 4), (200, 5), (300, 7)] {
        let m = benchmark_matrix(n, 1000 + n as u64).unwrap();
        runs += identity_case(
            &format!("N={n} M={}", side * side),
            &m,
            side,
            0..20,
            audit,
            terms,
        )?;
    }
    let words = random_words(150, 42);
    let m = build_from_words(&words, false).unwrap();
    runs += identity_case("150 words", &m, 4, 0..20, audit, terms)?;
    Ok(format!(
        "{runs} runs, 5 variants bit-identical on every configuration"
    ))
}

// ---------------------------------------------------------------------------
// 2. Representation oracle.

fn random_integer_matrix(n: usize, max: u32, rng: &mut ChaCha8Rng) -> DissimilarityMatrix {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        for k in (i + 1)..n {
            let d = rng.gen_range(0..=max) as f64;
            v[i * n + k] = d;
            v[k * n + i] = d;
        }
    }
    DissimilarityMatrix::from_values(n, v).unwrap()
}

struct ReprOracle {
    orders: Vec<Vec<usize>>,
    checks: usize,
    mismatch: Option<String>,
}

impl<A: Arith> EpochObserver<A> for ReprOracle {
    fn epoch_done(&mut self, v: &EpochView<'_, A>) {
        let sums = v.partial_sums.expect("fast variant keeps partial sums");
        for j in 0..v.prototypes.len() {
            let (brute, _) = repr_brute_force(j, v.assignments, v.data, v.weights);
            let (partial, _) = repr_partial_sums(j, sums, v.weights);
            let (early, _) = repr_early_stopping(
                j,
                sums,
                v.weights,
                &self.orders[j],
                v.clusters,
                Some(v.previous_prototypes[j]),
            );
            let (cold, _) =
                repr_early_stopping(j, sums, v.weights, &self.orders[j], v.clusters, None);
            self.checks += 1;
            if (partial, early, cold) != (brute, brute, brute) && self.mismatch.is_none() {
                self.mismatch = Some(format!(
                    "epoch {} model {j}: brute {brute}, partial {partial}, early {early}, cold {cold}",
                    v.epoch
                ));
            }
        }
    }
}

fn criterion_2(audit: &mut Audit) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checks = 0;
    for instance in 0..200u64 {
        let side = rng.gen_range(1..=3);
        let n = rng.gen_range((side * side).max(2)..=40);
        // small value ranges force many exact ties
        let max = [3u32, 10, 1000][rng.gen_range(0..3)];
        let matrix = random_integer_matrix(n, max, &mut rng);
        let layout = if rng.gen_bool(0.5) {
            Layout::Hex
        } else {
            Layout::Rect
        };
        let graph = PriorGraph::lattice(layout, side).unwrap();
        let epochs = rng.gen_range(2..=15);
        let sigma_final = rng.gen_range(0.2..1.0);
        let sigma_initial = sigma_final + rng.gen_range(0.0..3.0);
        let schedule = KernelSchedule::new(epochs, sigma_initial, sigma_final).unwrap();
        let data = Prepared::new(&matrix).unwrap();
        let Prepared::Exact(exact) = &data else {
            return Err(format!(
                "instance {instance}: integer matrix not prepared exactly"
            ));
        };
        let config = DsomConfig::new(Variant::Fast, schedule, instance);
        let mut oracle = ReprOracle {
            orders: graph.representation_orders(),
            checks: 0,
            mismatch: None,
        };
        train_with(&config, exact, &graph, &mut oracle).unwrap();
        if let Some(m) = oracle.mismatch {
            return Err(format!("instance {instance} (N={n}, {layout} {side}): {m}"));
        }
        checks += oracle.checks;
        for v in Variant::ALL {
            audited(
                &DsomConfig::new(v, schedule, instance),
                &data,
                &graph,
                audit,
            );
        }
    }
    Ok(format!(
        "200 instances, {checks} model-epochs: partial and early stopping equal brute force"
    ))
}

// ---------------------------------------------------------------------------
// 3. Partial-sum table maintenance.

fn criterion_3(audit: &mut Audit) -> Outcome {
    let m = benchmark_matrix(200, 3).unwrap();
    let data = Prepared::new(&m).unwrap();
    let graph = PriorGraph::hex_grid(5).unwrap();
    let schedule = KernelSchedule::for_graph(&graph, 100).unwrap();
    for ratio in [1.0, 2.0, 7.0, 16.0] {
        for seed in 0..5 {
            for v in [Variant::Memory, Variant::Fast] {
                audited(
                    &DsomConfig::new(v, schedule, seed).with_ratio(ratio),
                    &data,
                    &graph,
                    audit,
                );
            }
        }
    }
    let exact_checks = audit.table_checks;
    let exact_bad = audit.table_mismatches + audit.column_sum_mismatches;

    // real-valued control
    let real = build_from_vectors(&generate_uniform_square(200, 3).unwrap()).unwrap();
    let data = Prepared::new(&real).unwrap();
    if data.is_exact() {
        return Err("control matrix unexpectedly integer-valued".into());
    }
    for seed in 0..3 {
        for v in [Variant::Memory, Variant::Fast] {
            audited(&DsomConfig::new(v, schedule, seed), &data, &graph, audit);
        }
    }
    let float_checks = audit.table_checks - exact_checks;
    let float_bad = audit.table_mismatches + audit.column_sum_mismatches - exact_bad;

    if exact_bad + float_bad > 0 {
        return Err(format!(
            "{exact_bad} exact and {float_bad} real-valued mismatches; first: {}",
            audit.first_failure.clone().unwrap_or_default()
        ));
    }
    if audit.block_epochs == 0 || audit.individual_epochs == 0 {
        return Err(format!(
            "update paths not both exercised: {} block, {} individual epochs",
            audit.block_epochs, audit.individual_epochs
        ));
    }
    Ok(format!(
        "{exact_checks} exact tables equal to recomputation ({} block / {} individual epochs), {float_checks} real-valued tables within {FLOAT_RELATIVE:e}",
        audit.block_epochs, audit.individual_epochs
    ))
}

// ---------------------------------------------------------------------------
// 4. Edit distance.

/// Full-table edit distance over code points.
fn oracle_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut t = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in t.iter_mut().enumerate() {
        row[0] = i;
    }
    for (k, cell) in t[0].iter_mut().enumerate() {
        *cell = k;
    }
    for i in 1..=a.len() {
        for k in 1..=b.len() {
            let sub = t[i - 1][k - 1] + usize::from(a[i - 1] != b[k - 1]);
            t[i][k] = sub.min(t[i - 1][k] + 1).min(t[i][k - 1] + 1);
        }
    }
    t[a.len()][b.len()]
}

fn criterion_4() -> Outcome {
    let alphabet: Vec<char> = "abcdeé中ß".chars().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let word = |rng: &mut ChaCha8Rng| -> String {
        let len = rng.gen_range(0..=20);
        (0..len)
            .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
            .collect()
    };
    for pair in 0..1000 {
        let a = word(&mut rng);
        let b = word(&mut rng);
        let (got, want) = (levenshtein(&a, &b), oracle_levenshtein(&a, &b));
        if got != want {
            return Err(format!(
                "pair {pair} ({a:?}, {b:?}): {got} != oracle {want}"
            ));
        }
    }
    for (a, b, d) in [("love", "lover", 1), ("a", "b", 1)] {
        if levenshtein(a, b) != d {
            return Err(format!("{a:?}/{b:?} gave {}", levenshtein(a, b)));
        }
    }
    Ok("1000 random pairs match the oracle; love/lover = 1, a/b = 1".into())
}

// ---------------------------------------------------------------------------
// 5 and 8. Speed ordering and early-stopping work.

#[derive(Default)]
struct LargeRun {
    partial_terms: u64,
    fast_terms: u64,
}

fn timed(
    config: DsomConfig,
    data: &Prepared,
    graph: &PriorGraph,
    repeats: usize,
    audit: &mut Audit,
) -> TimingRecord {
    audited(&config, data, graph, audit);
    time_variant(&config, data, graph, repeats).expect("timing")
}

fn criterion_5(audit: &mut Audit, terms: &mut TermLog, large: &mut Option<LargeRun>) -> Outcome {
    let m = benchmark_matrix(1500, 5).unwrap();
    let data = Prepared::new(&m).unwrap();
    let graph = PriorGraph::hex_grid(7).unwrap();
    let schedule = KernelSchedule::for_graph(&graph, 100).unwrap();
    eprintln!("  timing brute and partial at N=1500, M=49");
    let brute = timed(
        DsomConfig::new(Variant::Brute, schedule, 1),
        &data,
        &graph,
        2,
        audit,
    );
    let partial = timed(
        DsomConfig::new(Variant::Partial, schedule, 1),
        &data,
        &graph,
        DEFAULT_REPEATS,
        audit,
    );
    let first = brute.wall_seconds / partial.wall_seconds;

    let m = benchmark_matrix(1000, 6).unwrap();
    let data = Prepared::new(&m).unwrap();
    let graph = PriorGraph::hex_grid(15).unwrap();
    let schedule = KernelSchedule::for_graph(&graph, 100).unwrap();
    eprintln!("  timing partial and fast at N=1000, M=225");
    let p_cfg = DsomConfig::new(Variant::Partial, schedule, 1);
    let f_cfg = DsomConfig::new(Variant::Fast, schedule, 1);
    let p_run = audited(&p_cfg, &data, &graph, audit);
    let f_run = audited(&f_cfg, &data, &graph, audit);
    if !p_run.same_outcome(&f_run) {
        return Err("partial and fast differ at N=1000, M=225".into());
    }
    for (e, p) in f_run.epochs.iter().zip(&p_run.epochs) {
        terms.comparisons += 1;
        if e.terms_accumulated > p.terms_accumulated {
            terms.violations.push(format!(
                "N=1000 M=225 epoch {}: fast {} > partial {}",
                e.epoch, e.terms_accumulated, p.terms_accumulated
            ));
        }
    }
    *large = Some(LargeRun {
        partial_terms: p_run.epochs.iter().map(|e| e.terms_accumulated).sum(),
        fast_terms: f_run.epochs.iter().map(|e| e.terms_accumulated).sum(),
    });
    let partial_big = time_variant(&p_cfg, &data, &graph, 3).expect("timing");
    let fast_big = time_variant(&f_cfg, &data, &graph, 3).expect("timing");
    let second = partial_big.wall_seconds / fast_big.wall_seconds;

    let detail = format!(
        "N=1500 M=49: brute {:.3}s / partial {:.3}s = {first:.1}x (need >= 5); N=1000 M=225: partial {:.3}s / fast {:.3}s = {second:.2}x (need >= 1.2)",
        brute.wall_seconds, partial.wall_seconds, partial_big.wall_seconds, fast_big.wall_seconds
    );
    if first >= 5.0 && second >= 1.2 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_8(terms: &TermLog, large: &Option<LargeRun>) -> Outcome {
    if let Some(v) = terms.violations.first() {
        return Err(format!(
            "{} epochs exceed partial; first: {v}",
            terms.violations.len()
        ));
    }
    let Some(large) = large else {
        return Err("N=1000, M=225 run not made (criterion 5 skipped)".into());
    };
    let ratio = large.fast_terms as f64 / large.partial_terms as f64;
    let detail = format!(
        "{} epoch comparisons, none above partial; N=1000 M=225: fast {} / partial {} terms = {ratio:.3} (need < 0.9)",
        terms.comparisons, large.fast_terms, large.partial_terms
    );
    if ratio < 0.9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------------------
// 6. Cost-model shape.

fn criterion_6(audit: &mut Audit) -> Outcome {
    let mut setups = Vec::new();
    for n in [200, 400, 800] {
        let m = benchmark_matrix(n, 7).unwrap();
        for side in [5, 7] {
            let graph = PriorGraph::hex_grid(side).unwrap();
            let schedule = KernelSchedule::for_graph(&graph, 100).unwrap();
            setups.push((Prepared::new(&m).unwrap(), graph, schedule));
        }
    }
    let mut measure = |variant: Variant, repeats: usize| -> Vec<TimingRecord> {
        eprintln!("  timing {variant} on N in {{200, 400, 800}}, M in {{25, 49}}");
        let configs: Vec<DsomConfig> = setups
            .iter()
            .map(|s| DsomConfig::new(variant, s.2, 1))
            .collect();
        for (c, s) in configs.iter().zip(&setups) {
            audited(c, &s.0, &s.1, audit);
        }
        let runs: Vec<_> = configs
            .iter()
            .zip(&setups)
            .map(|(c, s)| (c, &s.0, &s.1))
            .collect();
        time_interleaved(&runs, repeats).expect("timing")
    };
    let brute = measure(Variant::Brute, 5);
    let partial = measure(Variant::Partial, DEFAULT_REPEATS);
    let ll = fit_loglog(&brute).map_err(|e| e.to_string())?;
    let q = fit_quadratic(&partial).map_err(|e| e.to_string())?;
    let alpha = ll.coefficient("alpha").unwrap();
    let beta = ll.coefficient("beta").unwrap();
    let delta = q.coefficient("delta").unwrap();
    let tau = q.coefficient("tau").unwrap();
    let detail = format!(
        "brute loglog alpha={alpha:.3} beta={beta:.3} nmse={:.4}; partial quadratic delta={delta:.3e} tau={tau:.3e} nmse={:.4}",
        ll.nmse, q.nmse
    );
    let ok = (1.8..=2.7).contains(&alpha)
        && (0.7..=1.4).contains(&beta)
        && ll.nmse < 0.1
        && q.nmse < 0.1
        && delta > 0.0
        && tau > 0.0;
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------------------
// 7. Per-model descent.

fn criterion_7(audit: &Audit) -> Outcome {
    let detail = format!(
        "{} runs, {} epochs, {} model-epoch checks, {} violations",
        audit.runs, audit.epochs, audit.descent_checks, audit.descent_violations
    );
    if audit.descent_violations == 0 && audit.descent_checks > 0 {
        Ok(detail)
    } else {
        Err(format!(
            "{detail}; first: {}",
            audit.first_failure.clone().unwrap_or_default()
        ))
    }
}

// ---------------------------------------------------------------------------
// 9. Manifest replay.

fn dsom(args: &[&str], cwd: &Path) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_dsom"))
        .args(args)
        .current_dir(cwd)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "dsom {}: exit {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

fn same_files(a: &Path, b: &Path, names: &[&str]) -> Result<(), String> {
    for name in names {
        let (pa, pb) = (a.join(name), b.join(name));
        let x = std::fs::read(&pa).map_err(|e| format!("{}: {e}", pa.display()))?;
        let y = std::fs::read(&pb).map_err(|e| format!("{}: {e}", pb.display()))?;
        if x != y {
            return Err(format!("{} and {} differ", pa.display(), pb.display()));
        }
    }
    Ok(())
}

fn replay_trial(t: usize, dir: &Path) -> Result<(), String> {
    let seed = (100 + t).to_string();
    let n = (80 + 10 * t).to_string();
    let grid = ["hex", "rect"][t % 2];
    let variant = Variant::ALL[t % 5].name();

    dsom(
        &["gen", "--n", &n, "--seed", &seed, "--out", "pts.csv"],
        dir,
    )?;
    dsom(
        &["dist", "pts.csv", "--integerize", "1e8", "--out", "m.txt"],
        dir,
    )?;
    std::fs::write(dir.join("words.txt"), random_words(40, t as u64).join("\n")).unwrap();
    let mut words = vec!["dist", "words.txt", "--kind", "words", "--out", "w.txt"];
    if t % 2 == 1 {
        words.push("--normalized");
    }
    dsom(&words, dir)?;
    dsom(
        &[
            "train",
            "m.txt",
            "--grid",
            grid,
            "--m",
            "4",
            "--epochs",
            "30",
            "--variant",
            variant,
            "--seed",
            &seed,
            "--out",
            "run",
        ],
        dir,
    )?;
    dsom(
        &[
            "verify", "w.txt", "--m", "3", "--epochs", "10", "--seeds", "2", "--seed", &seed,
            "--out", "check",
        ],
        dir,
    )?;

    std::fs::create_dir_all(dir.join("again")).unwrap();
    dsom(
        &["replay", "pts.csv.manifest.json", "--out", "again/pts.csv"],
        dir,
    )?;
    dsom(
        &["replay", "m.txt.manifest.json", "--out", "again/m.txt"],
        dir,
    )?;
    dsom(
        &["replay", "w.txt.manifest.json", "--out", "again/w.txt"],
        dir,
    )?;
    dsom(&["replay", "run/manifest.json", "--out", "again/run"], dir)?;
    dsom(
        &["replay", "check/manifest.json", "--out", "again/check"],
        dir,
    )?;

    same_files(dir, &dir.join("again"), &["pts.csv", "m.txt", "w.txt"])?;
    same_files(
        &dir.join("run"),
        &dir.join("again/run"),
        &[
            "prototypes.txt",
            "assignments.txt",
            "epochs.csv",
            "quantization_error.txt",
        ],
    )?;
    same_files(
        &dir.join("check"),
        &dir.join("again/check"),
        &["report.txt"],
    )
}

fn criterion_9() -> Outcome {
    let mut passed = 0;
    let mut failures = Vec::new();
    for t in 0..10 {
        let dir = tempfile::tempdir().unwrap();
        match replay_trial(t, dir.path()) {
            Ok(()) => passed += 1,
            Err(e) => failures.push(format!("trial {t}: {e}")),
        }
    }
    let detail = format!("{passed}/10 trials byte-identical (gen, dist, train, verify)");
    if passed == 10 {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", failures[0]))
    }
}

// ---------------------------------------------------------------------------

fn main() {
    let selected: Option<BTreeSet<u32>> = std::env::var("DSOM_ACCEPTANCE")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let wanted = |c: u32| selected.as_ref().is_none_or(|s| s.contains(&c));

    let mut audit = Audit::default();
    let mut terms = TermLog::default();
    let mut large = None;
    let mut results: Vec<(u32, &str, Outcome, f64)> = Vec::new();

    let mut run = |c: u32, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        if !wanted(c) {
            return;
        }
        eprintln!("criterion {c}: {name} ...");
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("criterion {c} [{tag}] {name}: {detail} ({secs:.1}s)");
        results.push((c, name, outcome, secs));
    };

    run(1, "cross-variant identity", &mut || {
        criterion_1(&mut audit, &mut terms)
    });
    run(2, "representation oracle", &mut || criterion_2(&mut audit));
    run(3, "partial-sum maintenance", &mut || {
        criterion_3(&mut audit)
    });
    run(4, "edit distance", &mut criterion_4);
    run(5, "speed ordering", &mut || {
        criterion_5(&mut audit, &mut terms, &mut large)
    });
    run(6, "cost-model shape", &mut || criterion_6(&mut audit));
    run(7, "per-model descent", &mut || criterion_7(&audit));
    run(8, "early-stopping work bound", &mut || {
        criterion_8(&terms, &large)
    });
    run(9, "manifest replay determinism", &mut criterion_9);

    let failed: Vec<u32> = results
        .iter()
        .filter(|r| r.2.is_err())
        .map(|r| r.0)
        .collect();
    println!(
        "acceptance: {} passed, {} failed",
        results.len() - failed.len(),
        failed.len()
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
