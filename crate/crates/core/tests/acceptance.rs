//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Run with `cargo test --release --test acceptance`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use startle_surprise::dsp::{
    design_butterworth, design_notch, preprocess_recording, BiquadCascade, FilterKind,
    PreprocessConfig,
};
use startle_surprise::epoch::{balance_baseline, build_dataset, EpochingConfig, DEFAULT_BASELINE_GUARD_S};
use startle_surprise::eval::{
    featurize, kfold, late_fuse, run_experiment, run_pipeline, shuffle_labels, split_train_test,
    ComparisonTask, ExperimentConfig, ExperimentReport, NoopObserver, PipelineConfig, SignalSource,
};
use startle_surprise::models::{
    dual_objective, kernel_matrix, solve_smo, train_gbt, train_gnb, GbtParams, Kernel, ModelKind,
    Prediction,
};
use startle_surprise::synth::{synth_benchmark, EffectParams, RecordingSpec};
use startle_surprise::{ClassLabel, Window};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

// ---------------------------------------------------------------- filters

fn measured_db(filter: &BiquadCascade, f: f64) -> f64 {
    let z1 = Complex64::from_polar(1.0, -2.0 * PI * f / filter.fs_hz());
    let z2 = z1 * z1;
    let h = filter.sections().iter().fold(Complex64::new(1.0, 0.0), |acc, s| {
        acc * (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2)
    });
    20.0 * h.norm().log10()
}

fn warp(f: f64, fs: f64) -> f64 {
    (PI * f / fs).tan()
}

/// Butterworth magnitude after bilinear mapping with pre-warped edges;
/// `n` is the prototype order.
fn analytic_db(kind: FilterKind, n: i32, cutoffs: &[f64], fs: f64, f: f64) -> f64 {
    let w = warp(f, fs);
    let ratio = match kind {
        FilterKind::Lowpass => w / warp(cutoffs[0], fs),
        FilterKind::Highpass => warp(cutoffs[0], fs) / w,
        FilterKind::Bandpass => {
            let (w1, w2) = (warp(cutoffs[0], fs), warp(cutoffs[1], fs));
            (w * w - w1 * w2) / (w * (w2 - w1))
        }
        FilterKind::Notch => unreachable!(),
    };
    -10.0 * (1.0 + ratio.abs().powi(2 * n)).log10()
}

fn notch_db(f0: f64, q: f64, fs: f64, f: f64) -> f64 {
    let w0 = 2.0 * PI * f0 / fs;
    let alpha = w0.sin() / (2.0 * q);
    let z1 = Complex64::from_polar(1.0, -2.0 * PI * f / fs);
    let z2 = z1 * z1;
    let h = (1.0 - 2.0 * w0.cos() * z1 + z2) / ((1.0 + alpha) - 2.0 * w0.cos() * z1 + (1.0 - alpha) * z2);
    20.0 * h.norm().log10()
}

fn criterion_filters() -> Outcome {
    let start = Instant::now();
    let fs = 1000.0;
    let freqs: Vec<f64> = (0..50).map(|i| 0.05 * (9000.0f64).powf(i as f64 / 49.0)).collect();
    let designs: [(&str, FilterKind, Vec<f64>); 5] = [
        ("ecg_hp", FilterKind::Highpass, vec![0.6]),
        ("ecg_lp", FilterKind::Lowpass, vec![100.0]),
        ("ppg_bp", FilterKind::Bandpass, vec![0.5, 5.0]),
        ("eda_resp_lp", FilterKind::Lowpass, vec![5.0]),
        ("notch", FilterKind::Notch, vec![50.0]),
    ];
    let mut worst = 0.0f64;
    for (_, kind, cutoffs) in &designs {
        let filter = if *kind == FilterKind::Notch {
            design_notch(cutoffs[0], 30.0, fs).unwrap()
        } else {
            design_butterworth(4, *kind, cutoffs, fs).unwrap()
        };
        for &f in &freqs {
            let want = if *kind == FilterKind::Notch {
                notch_db(cutoffs[0], 30.0, fs, f)
            } else {
                analytic_db(*kind, 4, cutoffs, fs, f)
            };
            worst = worst.max((measured_db(&filter, f) - want).abs());
        }
    }
    let hp = design_butterworth(4, FilterKind::Highpass, &[0.6], fs).unwrap();
    let octave = -measured_db(&hp, 0.3);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 0.5 && (octave - 24.0).abs() <= 0.5 && secs < 1.0,
        format!("max |measured - analytic| = {worst:.2e} dB over 5 designs x 50 freqs; HP attenuation one octave below = {octave:.2} dB; {secs:.3} s"),
    )
}

// -------------------------------------------------------------------- SMO

fn grid_max(k: &[Vec<f64>], y: &[f64], steps: usize) -> f64 {
    let h = 1.0 / steps as f64;
    let q: Vec<Vec<f64>> = (0..6).map(|i| (0..6).map(|j| y[i] * y[j] * k[i][j]).collect()).collect();
    let mut best = f64::NEG_INFINITY;
    let mut a = [0.0f64; 6];
    let mut idx = [0usize; 5];
    loop {
        for t in 0..5 {
            a[t] = idx[t] as f64 * h;
        }
        let s: f64 = (0..5).map(|t| y[t] * a[t]).sum();
        a[5] = -y[5] * s;
        if (-1e-12..=1.0 + 1e-12).contains(&a[5]) {
            let mut quad = 0.0;
            for i in 0..6 {
                for j in 0..6 {
                    quad += a[i] * a[j] * q[i][j];
                }
            }
            best = best.max(a.iter().sum::<f64>() - 0.5 * quad);
        }
        let mut t = 0;
        while t < 5 {
            idx[t] += 1;
            if idx[t] <= steps {
                break;
            }
            idx[t] = 0;
            t += 1;
        }
        if t == 5 {
            return best;
        }
    }
}

fn criterion_smo() -> Outcome {
    let start = Instant::now();
    let (c, tol) = (1.0, 1e-3);
    let results: Vec<(f64, f64, f64)> = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let x: Vec<Vec<f64>> = (0..6).map(|_| vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]).collect();
            let mut y: Vec<f64> = (0..6).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
            y[0] = 1.0;
            y[1] = -1.0;
            let k = kernel_matrix(Kernel::Linear, &x);
            let sol = solve_smo(&k, &y, c, tol, 100 * 36);
            let obj = dual_objective(&k, &y, &sol.alpha);
            let brute = grid_max(&k, &y, 20);
            let mut kkt = 0.0f64;
            for i in 0..6 {
                let f: f64 = (0..6).map(|j| sol.alpha[j] * y[j] * k[i][j]).sum::<f64>() + sol.bias;
                let m = y[i] * f;
                let v = if sol.alpha[i] <= 1e-12 {
                    (1.0 - m).max(0.0)
                } else if sol.alpha[i] >= c - 1e-12 {
                    (m - 1.0).max(0.0)
                } else {
                    (m - 1.0).abs()
                };
                kkt = kkt.max(v);
            }
            let balance: f64 = sol.alpha.iter().zip(&y).map(|(a, y)| a * y).sum::<f64>().abs();
            assert!(sol.alpha.iter().all(|a| (0.0..=c).contains(a)));
            (obj - brute, kkt, balance)
        })
        .collect();
    let worst_obj = results.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let worst_kkt = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let worst_bal = results.iter().map(|r| r.2).fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst_obj >= -1e-3 && worst_kkt <= tol && worst_bal <= 1e-6 && secs < 30.0,
        format!("min(SMO - grid max) = {worst_obj:.2e}; max KKT violation = {worst_kkt:.2e} (tol {tol}); max |sum a y| = {worst_bal:.1e}; {secs:.1} s"),
    )
}

// -------------------------------------------------------------------- GNB

fn criterion_gnb() -> Outcome {
    let classes = [ClassLabel::Startle, ClassLabel::Surprise];
    let mut label_mismatches = 0;
    let mut worst = 0.0f64;
    let mut points = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for &c in &classes {
            let n = rng.gen_range(2..20);
            let dist = Normal::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.2..3.0)).unwrap();
            for _ in 0..n {
                x.push(vec![dist.sample(&mut rng)]);
                y.push(c);
            }
        }
        let model = train_gnb(&x, &y, &classes).unwrap();

        // Closed form: prior * N(x; mean, var) per class, normalized.
        let n = x.len() as f64;
        let var_of = |v: &[f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            (m, v.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / v.len() as f64)
        };
        let all: Vec<f64> = x.iter().map(|r| r[0]).collect();
        let floor = 1e-9 * var_of(&all).1;
        let stats: Vec<(f64, f64, f64)> = classes
            .iter()
            .map(|c| {
                let v: Vec<f64> = x.iter().zip(&y).filter(|(_, l)| *l == c).map(|(r, _)| r[0]).collect();
                let (m, var) = var_of(&v);
                (v.len() as f64 / n, m, var.max(floor))
            })
            .collect();
        for _ in 0..25 {
            let q = rng.gen_range(-6.0..6.0);
            let log_joint: Vec<f64> = stats
                .iter()
                .map(|(p, m, v)| p.ln() - 0.5 * (2.0 * PI * v).ln() - (q - m) * (q - m) / (2.0 * v))
                .collect();
            let top = log_joint[0].max(log_joint[1]);
            let z: f64 = log_joint.iter().map(|l| (l - top).exp()).sum();
            let post: Vec<f64> = log_joint.iter().map(|l| (l - top).exp() / z).collect();
            let want = if post[1] > post[0] { classes[1] } else { classes[0] };
            let got = model.predict(&[q]);
            if got.label != want {
                label_mismatches += 1;
            }
            for (i, c) in classes.iter().enumerate() {
                worst = worst.max((got.score(*c).unwrap() - post[i]).abs());
            }
            points += 1;
        }
    }
    outcome(
        label_mismatches == 0 && worst <= 1e-12,
        format!("{points} queries on 100 instances: {label_mismatches} label mismatches, max posterior difference {worst:.1e}"),
    )
}

// -------------------------------------------------------------------- GBT

fn criterion_gbt() -> Outcome {
    let mut increases = 0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_classes = if seed % 2 == 0 { 2 } else { 3 };
        let classes = &ClassLabel::ALL[..n_classes];
        let n = rng.gen_range(20..60);
        let x: Vec<Vec<f64>> = (0..n).map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let mut y: Vec<ClassLabel> = (0..n).map(|_| classes[rng.gen_range(0..n_classes)]).collect();
        y[..n_classes].copy_from_slice(classes);
        let params = GbtParams {
            n_rounds: 30,
            eta: rng.gen_range(0.05..1.0),
            max_depth: rng.gen_range(1..4),
            ..GbtParams::default()
        };
        let model = train_gbt(&x, &y, classes, &params).unwrap();
        increases += model.train_loss.windows(2).filter(|w| w[1] > w[0]).count();
    }

    let mut stump_hits = 0;
    let mut stump_total = 0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let threshold = rng.gen_range(-0.5..0.5);
        let feature = rng.gen_range(0..3);
        let x: Vec<Vec<f64>> = (0..40).map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let y: Vec<ClassLabel> = x
            .iter()
            .map(|r| if r[feature] > threshold { ClassLabel::Startle } else { ClassLabel::Surprise })
            .collect();
        let classes = [ClassLabel::Startle, ClassLabel::Surprise];
        if !classes.iter().all(|c| y.contains(c)) {
            continue;
        }
        let params = GbtParams { n_rounds: 20, eta: 0.3, max_depth: 1, ..GbtParams::default() };
        let model = train_gbt(&x, &y, &classes, &params).unwrap();
        stump_hits += x.iter().zip(&y).filter(|(r, l)| model.predict(r).label == **l).count();
        stump_total += x.len();
    }
    outcome(
        increases == 0 && stump_hits == stump_total,
        format!("{increases} loss increases over 20 runs x 30 rounds; depth-1 stumps {stump_hits}/{stump_total} correct on threshold data"),
    )
}

// ------------------------------------------------------ fusion and splits

/// Score vectors in sixteenths, voted label first; sums are exact.
const TWO_CLASS_SCORES: [[u32; 2]; 4] = [[9, 7], [10, 6], [12, 4], [16, 0]];
const THREE_CLASS_SCORES: [[u32; 3]; 5] = [[8, 4, 4], [8, 6, 2], [8, 2, 6], [12, 2, 2], [6, 5, 5]];

fn oracle_fuse(classes: &[ClassLabel], votes: &[usize], scores: &[Vec<u32>]) -> ClassLabel {
    let k = classes.len();
    let mut count = vec![0; k];
    for &v in votes {
        count[v] += 1;
    }
    let top = *count.iter().max().unwrap();
    let tied: Vec<usize> = (0..k).filter(|&c| count[c] == top).collect();
    let sum = |c: usize| scores.iter().map(|s| s[c]).sum::<u32>();
    let best_sum = tied.iter().map(|&c| sum(c)).max().unwrap();
    classes[*tied.iter().find(|&&c| sum(c) == best_sum).unwrap()]
}

fn enumerate_fusion(classes: &[ClassLabel], templates: &[Vec<u32>]) -> (usize, usize) {
    let k = classes.len();
    // Each voter picks a label and a template; the template's first entry
    // goes to the voted label and the rest fill the others in order.
    let choices = k * templates.len();
    let total = choices.pow(4);
    let mut mismatches = 0;
    for code in 0..total {
        let mut rest = code;
        let mut votes = Vec::new();
        let mut scores = Vec::new();
        let mut preds = Vec::new();
        for _ in 0..4 {
            let choice = rest % choices;
            rest /= choices;
            let (label, t) = (choice % k, choice / k);
            let mut s = vec![0u32; k];
            s[label] = templates[t][0];
            let mut others = templates[t][1..].iter();
            for (c, slot) in s.iter_mut().enumerate() {
                if c != label {
                    *slot = *others.next().unwrap();
                }
            }
            preds.push(Prediction {
                label: classes[label],
                scores: classes.iter().zip(&s).map(|(c, v)| (*c, *v as f64 / 16.0)).collect(),
            });
            votes.push(label);
            scores.push(s);
        }
        if late_fuse(&preds).unwrap() != oracle_fuse(classes, &votes, &scores) {
            mismatches += 1;
        }
    }
    (total, mismatches)
}

fn criterion_fusion_and_splits() -> Outcome {
    let two: Vec<Vec<u32>> = TWO_CLASS_SCORES.iter().map(|s| s.to_vec()).collect();
    let three: Vec<Vec<u32>> = THREE_CLASS_SCORES.iter().map(|s| s.to_vec()).collect();
    let (n2, m2) = enumerate_fusion(&ClassLabel::ALL[..2], &two);
    let (n3, m3) = enumerate_fusion(&ClassLabel::ALL, &three);

    let mut split_failures = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_classes = rng.gen_range(2..=3);
        let mut labels = Vec::new();
        for c in &ClassLabel::ALL[..n_classes] {
            labels.extend(std::iter::repeat_n(*c, rng.gen_range(5..40)));
        }
        let n = labels.len();
        let (train, test) = split_train_test(&labels, 0.8, seed).unwrap();
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        let partition = all == (0..n).collect::<Vec<_>>();
        let stratified = ClassLabel::ALL[..n_classes].iter().all(|c| {
            let n_c = labels.iter().filter(|l| *l == c).count();
            let t_c = test.iter().filter(|&&i| labels[i] == *c).count();
            t_c == ((0.2 * n_c as f64).round() as usize).max(1)
        });
        let repeat = split_train_test(&labels, 0.8, seed).unwrap() == (train, test);

        let folds = kfold(&labels, 5, seed).unwrap();
        let mut seen: Vec<usize> = folds.concat();
        seen.sort_unstable();
        let fold_partition = folds.len() == 5 && seen == (0..n).collect::<Vec<_>>();
        let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        let balanced = sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1
            && ClassLabel::ALL[..n_classes].iter().all(|c| {
                let per: Vec<usize> = folds.iter().map(|f| f.iter().filter(|&&i| labels[i] == *c).count()).collect();
                per.iter().max().unwrap() - per.iter().min().unwrap() <= 1
            });
        if !(partition && stratified && repeat && fold_partition && balanced) {
            split_failures += 1;
        }
    }

    let labels: Vec<ClassLabel> = [ClassLabel::Startle, ClassLabel::Surprise]
        .iter()
        .flat_map(|c| std::iter::repeat_n(*c, 17))
        .collect();
    let (train, test) = split_train_test(&labels, 0.8, 0).unwrap();
    let per_class = |idx: &[usize], c: ClassLabel| idx.iter().filter(|&&i| labels[i] == c).count();
    let ok_17 = [ClassLabel::Startle, ClassLabel::Surprise]
        .iter()
        .all(|&c| per_class(&train, c) == 14 && per_class(&test, c) == 3);

    outcome(
        m2 == 0 && m3 == 0 && split_failures == 0 && ok_17,
        format!(
            "late_fuse vs enumeration: {m2}/{n2} (2 classes) and {m3}/{n3} (3 classes) mismatches; split/kfold property failures {split_failures}/100 seeds; 17 per class -> {}/{} per class",
            per_class(&train, ClassLabel::Startle),
            per_class(&test, ClassLabel::Startle)
        ),
    )
}

// ------------------------------------------------------ synthetic benchmark

const BENCHMARK_SEED: u64 = 7;
const SINGLE: [SignalSource; 4] = SignalSource::MODALITIES;

fn acc(report: &ExperimentReport, task: ComparisonTask, w: u32, s: SignalSource, m: ModelKind) -> f64 {
    report.cell(task, w, s, m).expect("cell present").mean_accuracy
}

fn best_three_class_late(report: &ExperimentReport) -> (ModelKind, f64) {
    ModelKind::ALL
        .iter()
        .map(|&m| {
            let mean = Window::ALL
                .iter()
                .map(|w| acc(report, ComparisonTask::ThreeClass, w.whole_seconds(), SignalSource::LateFusion, m))
                .sum::<f64>()
                / Window::ALL.len() as f64;
            (m, mean)
        })
        .fold((ModelKind::Svm, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
}

fn criterion_benchmark(report: &ExperimentReport, secs: f64) -> Outcome {
    let start = Instant::now();
    let (model, late) = best_three_class_late(report);
    let best_cell = Window::ALL
        .iter()
        .flat_map(|w| ModelKind::ALL.map(|m| acc(report, ComparisonTask::ThreeClass, w.whole_seconds(), SignalSource::LateFusion, m)))
        .fold(0.0, f64::max);

    let recordings = synth_benchmark(17, &RecordingSpec::default(), BENCHMARK_SEED, &EffectParams::default()).unwrap();
    let clean: Vec<_> = recordings
        .par_iter()
        .map(|r| preprocess_recording(r, &PreprocessConfig::default()).unwrap())
        .collect();
    let mut shuffled = BTreeMap::new();
    for w in Window::ALL {
        let cfg = EpochingConfig::new(w, DEFAULT_BASELINE_GUARD_S).unwrap();
        let data = featurize(&balance_baseline(build_dataset(&clean, &cfg).unwrap())).unwrap();
        shuffled.insert(w, shuffle_labels(&data, 99 + w.whole_seconds() as u64));
    }
    let cfg = ExperimentConfig {
        tasks: vec![ComparisonTask::ThreeClass],
        ..ExperimentConfig::default()
    };
    let null = run_experiment(&shuffled, &cfg, &NoopObserver).unwrap();
    let (null_model, null_late) = best_three_class_late(&null);
    let null_accs: Vec<f64> = null.cells.iter().map(|c| c.mean_accuracy).collect();
    let null_mean = null_accs.iter().sum::<f64>() / null_accs.len() as f64;
    let lo = null_accs.iter().cloned().fold(1.0, f64::min);
    let hi = null_accs.iter().cloned().fold(0.0, f64::max);
    let chance = 1.0 / 3.0;
    let total = secs + start.elapsed().as_secs_f64();
    outcome(
        late >= 0.90 && (null_late - chance).abs() <= 0.15 && (null_mean - chance).abs() <= 0.15 && total < 300.0,
        format!(
            "three-class late fusion, best model {} averaged over windows = {late:.3} (best cell {best_cell:.3}); shuffled labels: {} late fusion {null_late:.3}, mean over {} cells {null_mean:.3}, range [{lo:.3}, {hi:.3}]; {total:.0} s",
            model.name(),
            null_model.name(),
            null_accs.len()
        ),
    )
}

fn criterion_pattern(report: &ExperimentReport) -> Outcome {
    let mut wins = 0;
    let mut groups = 0;
    for task in ComparisonTask::ALL {
        for w in Window::ALL {
            for m in ModelKind::ALL {
                let w = w.whole_seconds();
                let best_single = SINGLE.iter().map(|&s| acc(report, task, w, s, m)).fold(0.0, f64::max);
                if acc(report, task, w, SignalSource::LateFusion, m) >= best_single {
                    wins += 1;
                }
                groups += 1;
            }
        }
    }
    let share = wins as f64 / groups as f64;
    outcome(
        share >= 0.80,
        format!("late fusion >= best single modality in {wins}/{groups} (task, window, model) cells = {:.1}%", 100.0 * share),
    )
}

fn criterion_determinism(first: &ExperimentReport, recordings: &[startle_surprise::RawRecording]) -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let second = pool.install(|| run_pipeline(recordings, &PipelineConfig::default())).unwrap();
    let csv_same = first.to_csv() == second.to_csv();
    let json_same = first.summary_json() == second.summary_json();
    outcome(
        csv_same && json_same && first.cells.len() == 288,
        format!(
            "{} cells; report CSV identical: {csv_same}; summary JSON identical: {json_same} (second run on a 3-thread pool)",
            first.cells.len()
        ),
    )
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome)> = vec![
        (1, "filter fidelity", criterion_filters()),
        (2, "SMO optimality", criterion_smo()),
        (3, "GNB oracle", criterion_gnb()),
        (4, "GBT training", criterion_gbt()),
        (5, "fusion and splits", criterion_fusion_and_splits()),
    ];

    let start = Instant::now();
    let recordings = synth_benchmark(17, &RecordingSpec::default(), BENCHMARK_SEED, &EffectParams::default()).unwrap();
    let report = run_pipeline(&recordings, &PipelineConfig::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    results.push((6, "synthetic benchmark", criterion_benchmark(&report, secs)));
    results.push((7, "late fusion pattern", criterion_pattern(&report)));
    results.push((8, "sweep determinism", criterion_determinism(&report, &recordings)));

    let mut failed = 0;
    for (n, name, o) in &results {
        println!("{} {n} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
