//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Reproduction criteria (1-4) run on the benchmark CSVs under data/ at the
//! repository root; property criteria (5-8) run on synthetic instances; the
//! determinism criterion (9) exercises the compiled binary end to end.

mod oracle;

use std::path::PathBuf;
use std::time::Instant;

use fedsvdd::data::{load_dataset, minmax_normalize, Dataset, DatasetFormat, Label, Scheme};
use fedsvdd::evaluation::{
    aggregate_differences, auc, run_generalization_experiment, run_plasticity_experiment,
    AlgorithmKind, ContrastAxis, ExperimentConfig, ExperimentReport, GeneralizationSettings,
};
use fedsvdd::protocols::{
    anonymise_support_vector, ensemble_predict, ensemble_score, run_esvdd, run_sve,
    EnsembleModel, FederationConfig, SveParams, SyntheticSamplerParams,
};
use fedsvdd::solver::{dual_objective, train_svdd, SolverSettings};
use fedsvdd::{Matrix, Prediction, SvddHyperparams};
use oracle::{auc_by_pairs, pgd_solve, XorShift};

const SEED: u64 = 42;

fn report(criterion: &str, ok: bool, detail: &str) {
    println!("[{criterion}] {}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{criterion} failed: {detail}");
}

fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn load_raw(name: &str) -> Dataset {
    load_dataset(data_path(name), DatasetFormat::CsvLabeled)
        .unwrap_or_else(|e| panic!("benchmark dataset {name} must be present: {e}"))
}

fn load_normalized(name: &str) -> Dataset {
    minmax_normalize(&load_raw(name), &[]).unwrap().0
}

fn base_config(algorithm: AlgorithmKind, k: usize, f: f64, scheme: Scheme) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(algorithm, k, f, scheme);
    cfg.seeds = vec![SEED];
    cfg
}

/// Run one algorithm over a federated grid; cells whose every sample fails
/// are skipped (their failures stay visible in the per-run detail of the
/// surviving report).
fn plasticity_grid(
    data: &Dataset,
    algorithm: AlgorithmKind,
    ks: &[usize],
    fs: &[f64],
    schemes: &[Scheme],
    anons: &[bool],
    samples: usize,
) -> ExperimentReport {
    let mut merged = ExperimentReport::default();
    for &k in ks {
        for &f in fs {
            for &scheme in schemes {
                for &anonymise in anons {
                    let mut cfg = base_config(algorithm, k, f, scheme);
                    cfg.anonymise = anonymise;
                    cfg.hyper_samples = samples;
                    if let Ok(part) = run_plasticity_experiment(data, &cfg) {
                        merged.merge(part);
                    }
                }
            }
        }
    }
    merged
}

fn best_mean(report: &ExperimentReport) -> f64 {
    report
        .rows
        .iter()
        .map(|r| r.auc_mean)
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn criterion_1_centralized_baselines_on_breast_cancer() {
    let t0 = Instant::now();
    let data = load_normalized("breast_cancer.csv");

    let mut ocsvm = base_config(AlgorithmKind::Ocsvm, 1, 1.0, Scheme::Iid);
    ocsvm.hyper_samples = 10;
    let ocsvm_mean = run_plasticity_experiment(&data, &ocsvm).unwrap().rows[0].auc_mean;

    let mut svdd = base_config(AlgorithmKind::Svdd, 1, 1.0, Scheme::Iid);
    svdd.hyper_samples = 10;
    let svdd_mean = run_plasticity_experiment(&data, &svdd).unwrap().rows[0].auc_mean;

    let ok = (ocsvm_mean - 0.98).abs() <= 0.03 && (svdd_mean - 0.93).abs() <= 0.05;
    report(
        "criterion 1",
        ok,
        &format!(
            "plasticity baselines on breast cancer: ocsvm auc {ocsvm_mean:.4} (target 0.98 +/- 0.03), \
             svdd auc {svdd_mean:.4} (target 0.93 +/- 0.05), {:.0}s",
            t0.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn criterion_2_esvdd_best_configuration() {
    let t0 = Instant::now();
    let ks = [2, 5, 10];
    let fs = [0.5, 1.0];
    let schemes = [Scheme::Iid, Scheme::Biased];
    let anons = [false, true];

    let breast = load_normalized("breast_cancer.csv");
    let breast_best = best_mean(&plasticity_grid(
        &breast,
        AlgorithmKind::Esvdd,
        &ks,
        &fs,
        &schemes,
        &anons,
        10,
    ));

    let letter = load_normalized("letter.csv");
    let letter_best = best_mean(&plasticity_grid(
        &letter,
        AlgorithmKind::Esvdd,
        &ks,
        &fs,
        &schemes,
        &anons,
        3,
    ));

    let ok = breast_best >= 0.90 && letter_best >= 0.70;
    report(
        "criterion 2",
        ok,
        &format!(
            "esvdd best configuration: breast cancer {breast_best:.4} (>= 0.90, reference 0.96), \
             letter {letter_best:.4} (>= 0.70, reference 0.79), {:.0}s",
            t0.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn criterion_3_nested_cross_validation_on_breast_cancer() {
    let t0 = Instant::now();
    let raw = load_raw("breast_cancer.csv");
    let settings = GeneralizationSettings::default();

    let mut best = [(AlgorithmKind::Sve, f64::NEG_INFINITY), (AlgorithmKind::Esvdd, f64::NEG_INFINITY)];
    for slot in &mut best {
        for k in [2, 5, 10] {
            for f in [0.5, 1.0] {
                for scheme in [Scheme::Iid, Scheme::Biased] {
                    for anonymise in [false, true] {
                        let mut cfg = base_config(slot.0, k, f, scheme);
                        cfg.anonymise = anonymise;
                        if let Ok(part) = run_generalization_experiment(&raw, &cfg, &settings) {
                            slot.1 = slot.1.max(part.rows[0].auc_mean);
                        }
                    }
                }
            }
        }
    }

    let sve_best = best[0].1;
    let esvdd_best = best[1].1;
    let ok = sve_best >= 0.95 && esvdd_best >= 0.93;
    report(
        "criterion 3",
        ok,
        &format!(
            "nested cross-validation on breast cancer: sve(+) {sve_best:.4} (>= 0.95, reference 0.99), \
             esvdd(+) {esvdd_best:.4} (>= 0.93, reference 0.98), {:.0}s",
            t0.elapsed().as_secs_f64()
        ),
    );
}

/// Pooled mean and spread of difference rows that satisfy `keep`.
fn pooled(
    rows: &[fedsvdd::evaluation::DifferenceRow],
    keep: impl Fn(&fedsvdd::evaluation::DifferenceRow) -> bool,
) -> (f64, f64, usize) {
    let mut weight = 0.0;
    let mut mean = 0.0;
    let mut second_moment = 0.0;
    let mut cells = 0;
    for row in rows.iter().filter(|r| keep(r)) {
        let w = row.n_pairs as f64;
        weight += w;
        mean += w * row.mean_diff;
        second_moment += w * (row.std_diff * row.std_diff + row.mean_diff * row.mean_diff);
        cells += 1;
    }
    assert!(weight > 0.0, "no difference rows matched the filter");
    mean /= weight;
    let variance = (second_moment / weight - mean * mean).max(0.0);
    (mean, variance.sqrt(), cells)
}

#[test]
fn criterion_4_qualitative_trend_reproduction() {
    let t0 = Instant::now();
    let ks = [2, 5];
    let schemes = [Scheme::Iid, Scheme::Biased];

    // (a) iid-vs-biased: near zero at full participation, positive at half.
    let mut split_ok = true;
    let mut split_detail = String::new();
    for (name, samples) in [
        ("breast_cancer.csv", 4),
        ("pen_global.csv", 4),
        ("satellite.csv", 3),
    ] {
        let data = load_normalized(name);
        let mut merged = ExperimentReport::default();
        for algorithm in [AlgorithmKind::Esvdd, AlgorithmKind::Sve] {
            merged.merge(plasticity_grid(
                &data,
                algorithm,
                &ks,
                &[0.5, 1.0],
                &schemes,
                &[false],
                samples,
            ));
        }
        let rows = aggregate_differences(&merged, ContrastAxis::SplitBias).unwrap();
        let (full, _, _) = pooled(&rows, |r| r.f == Some(1.0));
        let (half, _, _) = pooled(&rows, |r| r.f == Some(0.5));
        let ok_here = full.abs() <= 0.10 && half > 0.0;
        split_ok &= ok_here;
        split_detail.push_str(&format!(
            "{}: f=1 diff {full:+.3}, f=0.5 diff {half:+.3}; ",
            data.name()
        ));
    }

    // (b) anonymisation: small mean relative to its spread at f = 1.
    let mut anon_ok = true;
    let mut anon_detail = String::new();
    for name in ["breast_cancer.csv", "pen_global.csv"] {
        let data = load_normalized(name);
        let mut merged = ExperimentReport::default();
        for algorithm in [AlgorithmKind::Esvdd, AlgorithmKind::Sve] {
            merged.merge(plasticity_grid(
                &data,
                algorithm,
                &ks,
                &[1.0],
                &schemes,
                &[false, true],
                4,
            ));
        }
        let rows = aggregate_differences(&merged, ContrastAxis::Anonymisation).unwrap();
        let (mean, spread, _) = pooled(&rows, |_| true);
        let ok_here = mean.abs() <= spread.max(0.05);
        anon_ok &= ok_here;
        anon_detail.push_str(&format!(
            "{}: raw-minus-anonymised {mean:+.3} (spread {spread:.3}); ",
            data.name()
        ));
    }

    report(
        "criterion 4",
        split_ok && anon_ok,
        &format!(
            "trends: split bias [{split_detail}] anonymisation [{anon_detail}] {:.0}s",
            t0.elapsed().as_secs_f64()
        ),
    );
}

/// Example-level reference check beyond the pinned criteria: nested
/// cross-validation on letter with the configurations that favor local
/// specialization.
#[test]
fn reference_letter_generalization_level() {
    let raw = load_raw("letter.csv");
    let settings = GeneralizationSettings::default();
    let mut best = f64::NEG_INFINITY;
    for k in [5, 10] {
        let mut cfg = base_config(AlgorithmKind::Esvdd, k, 1.0, Scheme::Biased);
        cfg.anonymise = false;
        if let Ok(part) = run_generalization_experiment(&raw, &cfg, &settings) {
            best = best.max(part.rows[0].auc_mean);
        }
    }
    report(
        "reference letter",
        best >= 0.70,
        &format!("esvdd nested cross-validation on letter: {best:.4} (reference 0.78)"),
    );
}

#[test]
fn criterion_5_solver_oracle_suite() {
    let t0 = Instant::now();
    let mut rng = XorShift::new(0x5eed_cafe);
    let mut worst_gap: f64 = 0.0;
    for case in 0..200 {
        let n = 2 + rng.below(11); // 2..=12
        let d = 1 + rng.below(4); // 1..=4
        let points = rng.points(n, d);
        let c = rng.range((1.0 / n as f64).min(1.0), 1.0);
        let gamma = rng.range(0.5, 4.0);

        let data = Matrix::from_rows(&points).unwrap();
        let hp = SvddHyperparams::new(c, gamma).unwrap();
        let model = train_svdd(&data, hp, &SolverSettings::defaults(n))
            .unwrap_or_else(|e| panic!("case {case}: {e}"));
        let pgd = pgd_solve(&points, gamma, c, 1e-10, 2_000_000);
        let gap = (dual_objective(&model) - pgd.objective).abs();
        worst_gap = worst_gap.max(gap);
        assert!(gap < 1e-6, "case {case}: objective gap {gap}");

        // KKT structure on every instance.
        let total: f64 = model.multipliers().iter().sum();
        assert!((total - 1.0).abs() <= 1e-8, "case {case}: sum(beta) {total}");
        assert!(model.n_support_vectors() <= n);
        for &b in model.multipliers() {
            assert!(b > 0.0 && b <= c + 1e-10, "case {case}: beta {b}");
        }
        let margin = model.margin_indices();
        for i in 0..model.n_support_vectors() {
            let r2 = model.r_squared(model.support_vectors().row(i)).unwrap();
            assert!(r2 >= -1e-9, "case {case}: negative r2");
            if margin.contains(&i) {
                assert!((r2 - model.radius_squared()).abs() < 1e-5, "case {case}: margin SV");
            } else {
                assert!(r2 >= model.radius_squared() - 1e-5, "case {case}: bounded SV");
            }
        }
    }
    report(
        "criterion 5",
        true,
        &format!(
            "200 random instances (n <= 12, d <= 4): SMO matches the projected-gradient \
             oracle within 1e-6 (worst gap {worst_gap:.2e}), KKT invariants hold, {:.0}s",
            t0.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn criterion_6_reduction_identities() {
    let t0 = Instant::now();
    let mut rng = XorShift::new(0xdead_beef);

    // ESVDD with one client and no anonymisation is centralized training.
    for case in 0..50 {
        let n = 5 + rng.below(36);
        let d = 1 + rng.below(3);
        let rows = rng.points(n, d);
        let pool = Matrix::from_rows(&rows).unwrap();
        let c = rng.range((1.0 / n as f64).max(0.2), 1.0);
        let hp = SvddHyperparams::new(c, 1.0).unwrap();
        let config = FederationConfig::new(1, 1.0, Scheme::Iid, case as u64).unwrap();
        let run = run_esvdd(
            &[pool.clone()],
            hp,
            &config,
            &SyntheticSamplerParams::defaults(n),
            false,
        )
        .unwrap();
        let central = train_svdd(&pool, hp, &SolverSettings::defaults(n)).unwrap();
        for probe in rng.points(20, d) {
            let a = ensemble_score(&run.ensemble, &probe).unwrap();
            let b = central.score(&probe).unwrap();
            assert!(a == b, "case {case}: ensemble {a} != centralized {b}");
        }
    }

    // Score/predict consistency on ten thousand (ensemble, point) pairs.
    let mut checked = 0usize;
    while checked < 10_000 {
        let members = 1 + rng.below(4);
        let d = 1 + rng.below(3);
        let models: Vec<_> = (0..members)
            .map(|_| {
                let n = 2 + rng.below(6);
                let data = Matrix::from_rows(&rng.points(n, d)).unwrap();
                train_svdd(
                    &data,
                    SvddHyperparams::new(rng.range(0.5, 1.0), rng.range(0.5, 2.0)).unwrap(),
                    &SolverSettings::defaults(n),
                )
                .unwrap()
            })
            .collect();
        let ensemble = EnsembleModel::new(models).unwrap();
        for _ in 0..100 {
            let probe: Vec<f64> = (0..d).map(|_| rng.range(-1.0, 2.0)).collect();
            let score = ensemble_score(&ensemble, &probe).unwrap();
            let label = ensemble_predict(&ensemble, &probe).unwrap();
            assert_eq!(label == Prediction::Inlier, score >= 0.0);
            checked += 1;
        }
    }

    report(
        "criterion 6",
        true,
        &format!(
            "single-client esvdd equals centralized scores exactly on 50 datasets; \
             ensemble score/predict consistent on {checked} pairs, {:.0}s",
            t0.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn criterion_7_anonymisation_contract() {
    let t0 = Instant::now();
    let params = SveParams::default(); // sigma 1, tau 1e-3
    let mut rng = XorShift::new(0xabcd_1234);
    let mut fallbacks = 0usize;
    let mut checked_svs = 0usize;
    for case in 0..100 {
        let n = 6 + rng.below(25);
        let d = 1 + rng.below(4);
        let rows = rng.points(n, d);
        let data = Matrix::from_rows(&rows).unwrap();
        let c = rng.range((1.0 / n as f64).max(0.3), 1.0);
        let model = train_svdd(
            &data,
            SvddHyperparams::new(c, rng.range(0.5, 3.0)).unwrap(),
            &SolverSettings::defaults(n),
        )
        .unwrap();
        for i in 0..model.n_support_vectors() {
            let v = model.support_vectors().row(i).to_vec();
            let out =
                anonymise_support_vector(&model, &v, &params, (case * 1000 + i) as u64).unwrap();
            if out.fell_back {
                fallbacks += 1;
                assert_eq!(out.point, v, "fallback must return the original vector");
            } else {
                let diff =
                    (model.r_squared(&v).unwrap() - model.r_squared(&out.point).unwrap()).abs();
                assert!(diff <= params.tau, "case {case}: diff {diff} > tau");
            }
            checked_svs += 1;
        }
    }

    // Privacy hygiene: with anonymisation on, nothing the server sees equals
    // a raw client point.
    let mut leaked = 0usize;
    for case in 0..20 {
        let d = 2 + rng.below(3);
        let n_a = 10 + rng.below(15);
        let n_b = 10 + rng.below(15);
        let pools = [
            Matrix::from_rows(&rng.points(n_a, d)).unwrap(),
            Matrix::from_rows(&rng.points(n_b, d)).unwrap(),
        ];
        let config = FederationConfig::new(2, 1.0, Scheme::Iid, 7000 + case).unwrap();
        let hp = SvddHyperparams::new(0.5, 1.0).unwrap();
        let run = run_sve(&pools, hp, &config, &params, true).unwrap();
        for sent in run.elected.iter_rows() {
            for pool in &pools {
                for raw in pool.iter_rows() {
                    if sent == raw {
                        leaked += 1;
                    }
                }
            }
        }
    }

    let ok = leaked == 0;
    report(
        "criterion 7",
        ok,
        &format!(
            "anonymisation contract held on {checked_svs} support vectors across 100 models \
             ({fallbacks} fallbacks); {leaked} exact matches between transmitted and raw points, {:.0}s",
            t0.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn criterion_8_auc_matches_exhaustive_pair_counting() {
    let t0 = Instant::now();
    let mut cases = 0usize;
    for n in 2..=8usize {
        // Every label pattern with both classes present.
        for mask_bits in 1..(1u32 << n) - 1 {
            let mask: Vec<bool> = (0..n).map(|i| mask_bits >> i & 1 == 1).collect();
            let labels: Vec<Label> = mask
                .iter()
                .map(|&a| if a { Label::Anomaly } else { Label::Normal })
                .collect();
            // Tie-heavy score vectors from a 3-letter alphabet plus two
            // deterministic smooth ones.
            let mut score_sets: Vec<Vec<f64>> = vec![
                (0..n).map(|i| (i as f64 * 0.7).sin()).collect(),
                (0..n).map(|i| (n - i) as f64).collect(),
            ];
            for pattern in 0..3usize.pow(3.min(n as u32)) {
                let mut p = pattern;
                let scores: Vec<f64> = (0..n)
                    .map(|i| {
                        let v = if i < 3 {
                            let v = [0.0, 0.5, 1.0][p % 3];
                            p /= 3;
                            v
                        } else {
                            [0.0, 0.5, 1.0][i % 3]
                        };
                        v
                    })
                    .collect();
                score_sets.push(scores);
            }
            for scores in &score_sets {
                let fast = auc(scores, &labels).unwrap().auc;
                let slow = auc_by_pairs(scores, &mask);
                assert!(
                    (fast - slow).abs() < 1e-12,
                    "n={n} mask={mask_bits:b}: {fast} vs {slow}"
                );
                cases += 1;
            }
        }
    }
    report(
        "criterion 8",
        true,
        &format!(
            "rank-statistic AUC equals exhaustive pair counting on {cases} enumerated inputs, {:.0}s",
            t0.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn criterion_9_end_to_end_determinism() {
    let t0 = Instant::now();
    let bin = env!("CARGO_BIN_EXE_fedsvdd");
    let base = std::env::temp_dir().join(format!("fedsvdd-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&base).unwrap();
    let dataset = base.join("synthetic.csv");

    let generate = std::process::Command::new(bin)
        .args([
            "generate-data",
            "--n-normal",
            "120",
            "--n-anomaly",
            "12",
            "--dimensions",
            "3",
            "--seed",
            "5",
            "--out",
        ])
        .arg(&dataset)
        .output()
        .unwrap();
    assert!(generate.status.success(), "generate-data failed");

    let run = |out: &str| {
        let out_dir = base.join(out);
        let status = std::process::Command::new(bin)
            .args([
                "run",
                "--datasets",
                dataset.to_str().unwrap(),
                "--algorithms",
                "svdd,esvdd,sve",
                "--k",
                "2",
                "--f",
                "1.0",
                "--schemes",
                "iid,biased",
                "--anonymise",
                "false,true",
                "--hyper-samples",
                "3",
                "--seed",
                "7",
                "--out",
            ])
            .arg(&out_dir)
            .output()
            .unwrap();
        assert!(
            status.status.success(),
            "run failed: {}",
            String::from_utf8_lossy(&status.stderr)
        );
        out_dir
    };
    let first = run("first");
    let second = run("second");

    let mut identical = true;
    let mut compared = Vec::new();
    for file in [
        "report.csv",
        "report_detail.json",
        "diff_split_bias.csv",
        "diff_anonymisation.csv",
    ] {
        let a = std::fs::read(first.join(file)).unwrap();
        let b = std::fs::read(second.join(file)).unwrap();
        identical &= a == b;
        compared.push(file);
    }
    std::fs::remove_dir_all(&base).ok();

    report(
        "criterion 9",
        identical,
        &format!(
            "two cmd_run executions produced byte-identical {} ({:.0}s)",
            compared.join(", "),
            t0.elapsed().as_secs_f64()
        ),
    );
}
