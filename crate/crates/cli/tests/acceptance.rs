//! Acceptance suite. Prints one PASS/FAIL line per criterion; run with
//! `cargo test -p pvbounds-cli --test acceptance -- --nocapture` to see them.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use pvbounds::analytic::special::{
    chi_square_quantile, reg_gamma_lower, reg_gamma_upper, std_normal_cdf, std_normal_quantile,
};
use pvbounds::analytic::{
    analytic_curves, analytic_grid, label_bias, monte_carlo_curve_oracle, ppv_f1_form, F1PpvForm, Scorer,
};
use pvbounds::complexity::{
    order_coefficient_lower_bound, shattering_count, verify_level_set_optimality, FiniteFunctionClass,
    FiniteInstance, PoolClass, SearchBudget,
};
use pvbounds::rng::SampleRng;
use pvbounds::{
    bias_bound, build_band, compute_curves, deviation_halfwidth_fixed, growth_bound, select_accuracy,
    select_maximin_lcb, BandConfig, BandMode, BandRow, ConfidenceBand, ScoredDataset, Side,
};
use pvbounds_cli::commands::random_instance;
use pvbounds_cli::coverage::{coverage_experiment, CoverageConfig};

const BIN: &str = env!("CARGO_BIN_EXE_pvbounds");
const GOLDEN: &str = include_str!("../../core/tests/data/special_golden.txt");

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    check(elapsed.as_secs_f64() < limit_s, || {
        format!("took {:.2} s, limit {limit_s} s", elapsed.as_secs_f64())
    })
}

fn random_dataset(rng: &mut SampleRng, max_n: u64, levels: u64) -> ScoredDataset {
    let n = 2 + rng.below(max_n - 1) as usize;
    let scores: Vec<f64> = (0..n).map(|_| rng.below(levels) as f64).collect();
    let labels: Vec<u8> = (0..n).map(|_| u8::from(rng.bernoulli(0.4))).collect();
    ScoredDataset::from_scores_labels(&scores, &labels).unwrap()
}

fn c1_counting_identity() -> Outcome {
    let start = Instant::now();
    let mut rng = SampleRng::new(1);
    for trial in 0..1000 {
        let ds = random_dataset(&mut rng, 500, if trial % 2 == 0 { 5 } else { 1 << 30 });
        let curves = compute_curves(&ds);
        let (n, pos) = (curves.n(), curves.positives());
        for p in curves.points() {
            let k = p.k;
            check(p.true_positives + (n - k - p.true_negatives) == pos, || {
                format!("trial {trial}, k {k}: TP + FN != P")
            })?;
            check(
                p.ppv_hat == p.true_positives as f64 / k as f64
                    && p.npv_hat == p.true_negatives as f64 / (n - k) as f64,
                || format!("trial {trial}, k {k}: estimates are not TP/k, TN/(n-k)"),
            )?;
            let lhs = k as f64 * p.ppv_hat + (n - k) as f64 * (1.0 - p.npv_hat);
            check(lhs.round() == pos as f64 && (lhs - pos as f64).abs() < 1e-9, || {
                format!("trial {trial}, k {k}: {lhs} vs {pos}")
            })?;
        }
    }
    within(start.elapsed(), 10.0)?;
    Ok(format!("1000 datasets in {:.2} s", start.elapsed().as_secs_f64()))
}

fn c2_confusion_matrix() -> Outcome {
    // 190 predicted positive (90 true), 910 predicted negative (900 true).
    let mut labels = vec![1u8; 90];
    labels.extend(vec![0; 100]);
    labels.extend(vec![1; 10]);
    labels.extend(vec![0; 900]);
    let scores: Vec<f64> = (0..labels.len()).map(|i| -(i as f64)).collect();
    let curves = compute_curves(&ScoredDataset::from_scores_labels(&scores, &labels).unwrap());
    let p = curves.point(190).unwrap();
    check(
        (p.true_positives, p.k, p.true_negatives, curves.n() - p.k) == (90, 190, 900, 910),
        || format!("counts {p:?}"),
    )?;
    check(p.ppv_hat == 90.0 / 190.0 && p.npv_hat == 900.0 / 910.0, || format!("{p:?}"))?;
    Ok(format!("ppv = 90/190 = {}, npv = 900/910 = {}", p.ppv_hat, p.npv_hat))
}

fn c3_band_values() -> Outcome {
    let dev = deviation_halfwidth_fixed(10_000, 5000, 0.05, Side::Ppv).unwrap();
    let bias = bias_bound(10_000, 5000, Side::Ppv).unwrap();
    check((dev - 0.052138).abs() < 1e-6, || format!("deviation {dev}"))?;
    check((bias - 0.012533).abs() < 1e-6, || format!("bias {bias}"))?;
    check((dev - 0.05213898159084058).abs() < 1e-12, || format!("deviation {dev}"))?;
    check((bias - 0.012533768077226857).abs() < 1e-12, || format!("bias {bias}"))?;
    check((dev + bias - 0.06467).abs() < 1e-4, || format!("total {}", dev + bias))?;
    Ok(format!("deviation {dev:.6} + bias {bias:.6} = {:.6}", dev + bias))
}

fn c4_coverage() -> Outcome {
    let start = Instant::now();
    let report = coverage_experiment(&CoverageConfig {
        n: 2000,
        d: 2,
        delta: 0.05,
        reps: 50,
        master_seed: 20_240_601,
        mode: BandMode::Fixed,
        scorer: Scorer::Eta,
    })
    .map_err(|e| e.to_string())?;
    check(report.coverage >= 0.95, || format!("coverage {}", report.coverage))?;
    within(start.elapsed(), 60.0)?;
    Ok(format!("coverage {} over 50 replications", report.coverage))
}

const ALPHAS: [f64; 3] = [0.25, 0.5, 0.75];

fn c5_analytic_vs_oracle() -> Outcome {
    for p in analytic_grid(2, 512).map_err(|e| e.to_string())? {
        let a = p.alpha;
        let ppv = (3.0 - 3.0 * a + a * a) / 3.0;
        let npv = 1.0 - (1.0 - a) * (1.0 - a) / 3.0;
        check((p.ppv_eta - ppv).abs() < 1e-8 && (p.npv_eta - npv).abs() < 1e-8, || {
            format!("alpha {a}: {p:?}")
        })?;
    }
    let oracle = monte_carlo_curve_oracle(1_000_000, 2, Scorer::Eta, &ALPHAS, 5).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for e in &oracle {
        let t = analytic_curves(e.alpha, 2).unwrap();
        let zp = (e.ppv - t.ppv_eta).abs() / e.ppv_se;
        let zn = (e.npv - t.npv_eta).abs() / e.npv_se;
        check(zp <= 3.0 && zn <= 3.0, || format!("alpha {}: z = {zp:.2}, {zn:.2}", e.alpha))?;
        worst = worst.max(zp).max(zn);
    }
    Ok(format!("grid within 1e-8; oracle within {worst:.2} standard errors"))
}

fn c6_f1_resolution() -> Outcome {
    let oracle = monte_carlo_curve_oracle(1_000_000, 2, Scorer::F1, &ALPHAS, 6).map_err(|e| e.to_string())?;
    let agrees = |form| {
        oracle
            .iter()
            .all(|e| (e.ppv - ppv_f1_form(e.alpha, 2, form).unwrap()).abs() <= 3.0 * e.ppv_se)
    };
    let (corrected, uncorrected) = (agrees(F1PpvForm::Corrected), agrees(F1PpvForm::Uncorrected));
    check(corrected && !uncorrected, || {
        format!("corrected agrees: {corrected}, uncorrected agrees: {uncorrected}")
    })?;
    // The shipped curve is the corrected form.
    for e in &oracle {
        let shipped = analytic_curves(e.alpha, 2).unwrap().ppv_f1;
        let form = ppv_f1_form(e.alpha, 2, F1PpvForm::Corrected).unwrap();
        check((shipped - form).abs() < 1e-15, || format!("alpha {}", e.alpha))?;
    }
    let end = ppv_f1_form(1.0 - 1e-9, 2, F1PpvForm::Corrected).unwrap();
    check((end - label_bias(2)).abs() < 1e-6, || format!("endpoint {end}"))?;
    Ok("only the corrected ppv form matches the oracle".into())
}

fn c7_level_sets() -> Outcome {
    let start = Instant::now();
    let mut instances = vec![
        FiniteInstance::parse(&["1/2", "1/2"], &["4/5", "1/5"]).unwrap(),
        FiniteInstance::parse(&["1/5", "3/10", "1/2"], &["2/7", "2/7", "2/7"]).unwrap(),
    ];
    let mut rng = SampleRng::new(7);
    instances.extend((0..200).map(|_| random_instance(&mut rng, 10)));
    for (i, inst) in instances.iter().enumerate() {
        let r = verify_level_set_optimality(inst).map_err(|e| e.to_string())?;
        check(r.holds, || format!("instance {i}: {r:?}"))?;
    }
    within(start.elapsed(), 30.0)?;
    Ok(format!("{} instances in {:.2} s", instances.len(), start.elapsed().as_secs_f64()))
}

fn c8_combinatorics() -> Outcome {
    let mut rng = SampleRng::new(8);
    for trial in 0..100 {
        let m = 1 + rng.below(16) as usize;
        let n = 1 + rng.below(8) as usize;
        let levels = if trial % 2 == 0 { 3 } else { 1 << 20 };
        let rows = (0..m)
            .map(|_| (0..n).map(|_| rng.below(levels) as f64).collect())
            .collect();
        let class = FiniteFunctionClass::from_rows(rows).unwrap();
        let pi = shattering_count(&class).map_err(|e| e.to_string())?;
        check(pi <= m.min(1 << n), || format!("trial {trial}: pi {pi}"))?;
        let pool = PoolClass::new(class, None);
        for k in 1..=n {
            let theta = order_coefficient_lower_bound(&pool, n, k, SearchBudget::default()).unwrap();
            check(theta.value <= pi, || format!("trial {trial}, k {k}: theta {} > pi {pi}", theta.value))?;
        }
    }
    for n in 1..=200usize {
        for d in 1..=n {
            let g = growth_bound(n, d).unwrap();
            let closed = d as f64 * (1.0 + (n as f64 / d as f64).ln());
            check(g.ln_exact() <= closed + 1e-9, || format!("n {n}, d {d}"))?;
        }
    }
    let g = growth_bound(100, 2).unwrap().exact;
    check(g == 5051u32.into(), || format!("growth_bound(100, 2) = {g}"))?;
    Ok("theta <= pi on 100 classes; Sauer-Shelah sums within (en/d)^d; growth_bound(100, 2) = 5051".into())
}

fn first_argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best + 1
}

fn c9_selection() -> Outcome {
    let mut rng = SampleRng::new(9);
    let mut ties = 0;
    for trial in 0..1000 {
        let ds = random_dataset(&mut rng, 80, 4);
        let curves = compute_curves(&ds);
        let correct: Vec<f64> = curves
            .points()
            .iter()
            .map(|p| (p.true_positives + p.true_negatives) as f64)
            .collect();
        let want = first_argmax(&correct);
        let max = correct[want - 1];
        if correct.iter().filter(|&&c| c == max).count() > 1 {
            ties += 1;
        }
        check(select_accuracy(&curves).k == want, || format!("trial {trial}: accuracy"))?;

        let n = curves.n();
        let rows: Vec<BandRow> = (1..n)
            .map(|k| {
                let p = rng.below(5) as f64 / 4.0;
                let q = rng.below(5) as f64 / 4.0;
                BandRow {
                    k,
                    alpha: k as f64 / n as f64,
                    ppv_hat: p,
                    ppv_lo: p,
                    ppv_hi: 1.0,
                    npv_hat: q,
                    npv_lo: q,
                    npv_hi: 1.0,
                    ppv_deviation: 0.0,
                    ppv_bias: 0.0,
                    npv_deviation: 0.0,
                    npv_bias: 0.0,
                }
            })
            .collect();
        let mins: Vec<f64> = rows.iter().map(|r| r.ppv_lo.min(r.npv_lo)).collect();
        let band = ConfidenceBand {
            n,
            delta: 0.05,
            mode: BandMode::Fixed,
            rows,
        };
        check(select_maximin_lcb(&band).unwrap().k == first_argmax(&mins), || {
            format!("trial {trial}: maximin on synthetic band")
        })?;
        let built = build_band(&curves, &BandConfig::fixed(0.3)).unwrap();
        let mins: Vec<f64> = built.rows.iter().map(|r| r.ppv_lo.min(r.npv_lo)).collect();
        check(select_maximin_lcb(&built).unwrap().k == first_argmax(&mins), || {
            format!("trial {trial}: maximin on built band")
        })?;
    }
    Ok(format!("1000 instances, {ties} with tied accuracy maxima"))
}

fn c10_special_functions() -> Outcome {
    let mut count = 0;
    for line in GOLDEN.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let f: Vec<&str> = line.split_whitespace().collect();
        let x: f64 = f[2].parse().unwrap();
        let want: f64 = f[3].parse().unwrap();
        let rel = |got: f64| (got - want).abs() / want.abs().max(1e-300);
        let ok = match f[0] {
            "gamma_q" => rel(reg_gamma_upper(f[1].parse().unwrap(), x).unwrap()) <= 1e-10,
            "gamma_p" => rel(reg_gamma_lower(f[1].parse().unwrap(), x).unwrap()) <= 1e-10,
            "normal_cdf" => (std_normal_cdf(x) - want).abs() <= 1e-12,
            "normal_quantile" => (std_normal_quantile(x).unwrap() - want).abs() <= 1e-10 * want.abs().max(1e-5),
            "chi2_quantile" => rel(chi_square_quantile(f[1].parse().unwrap(), x).unwrap()) <= 1e-10,
            other => return Err(format!("unknown function {other}")),
        };
        check(ok, || format!("golden entry failed: {line}"))?;
        count += 1;
    }
    check(count >= 40, || format!("only {count} entries"))?;
    Ok(format!("{count} golden entries"))
}

fn run_bin(dir: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    check(out.status.success(), || {
        format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr))
    })
}

fn c11_determinism() -> Outcome {
    let commands: Vec<(Vec<&str>, &str)> = vec![
        (vec!["simulate", "--n", "5000", "--d", "2", "--scorer", "f1", "--seed", "42", "--output", "s.csv"], "s.csv"),
        (vec!["curve", "--input", "s.csv", "--output", "c.csv"], "c.csv"),
        (vec!["bands", "--input", "s.csv", "--delta", "0.05", "--output", "b.csv"], "b.csv"),
        (
            vec!["bands", "--input", "s.csv", "--mode", "uniform", "--vc-dim", "2", "--trim", "0.1", "--output", "b.json"],
            "b.json",
        ),
        (vec!["select", "--input", "s.csv", "--rule", "maximin-lcb", "--output", "sel.csv"], "sel.csv"),
        (vec!["analytic", "--d", "3", "--grid", "512", "--output", "a.csv"], "a.csv"),
        (vec!["complexity", "--affine-pool=-2,-1,0,1,2", "--output", "cx.json"], "cx.json"),
        (vec!["check-theorem1", "--random", "50", "--seed", "3", "--output", "t1.csv"], "t1.csv"),
        (
            vec!["coverage", "--n", "1000", "--reps", "24", "--seed", "11", "--threads", "1", "--output", "cov.json"],
            "cov.json",
        ),
    ];
    let first = tempfile::tempdir().map_err(|e| e.to_string())?;
    let second = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (args, file) in &commands {
        run_bin(first.path(), args)?;
        let mut rerun = args.clone();
        if let Some(pos) = rerun.iter().position(|a| *a == "1") {
            if rerun[pos - 1] == "--threads" {
                rerun[pos] = "4";
            }
        }
        run_bin(second.path(), &rerun)?;
        let a = std::fs::read(first.path().join(file)).map_err(|e| e.to_string())?;
        let b = std::fs::read(second.path().join(file)).map_err(|e| e.to_string())?;
        check(!a.is_empty() && a == b, || format!("{file} differs between runs"))?;
    }
    Ok(format!("{} commands byte-identical on rerun (coverage with 1 vs 4 threads)", commands.len()))
}

#[test]
fn acceptance_criteria() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 11] = [
        ("counting identity", c1_counting_identity),
        ("imbalanced confusion matrix", c2_confusion_matrix),
        ("band half-width at n = 10^4, k = 5000", c3_band_values),
        ("Monte Carlo coverage", c4_coverage),
        ("analytic curves vs oracle", c5_analytic_vs_oracle),
        ("linear-score ppv form", c6_f1_resolution),
        ("level-set optimality brute force", c7_level_sets),
        ("combinatorics", c8_combinatorics),
        ("selection oracle equivalence", c9_selection),
        ("special-function golden table", c10_special_functions),
        ("determinism", c11_determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
