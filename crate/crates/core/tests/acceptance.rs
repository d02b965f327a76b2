//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use duelopt_core::harness::{
    execute, run_experiment, write_trace_csv, Algorithm, DomainSpec, ExperimentConfig, ExperimentResult, W1Spec,
    DEFAULT_DELTA,
};
use duelopt_core::optimizers::{phased_budget, smooth_budget};
use duelopt_core::{
    build_query_set, extract_gradient_estimates, make_quadratic, params_smooth, params_strong, resample_count,
    sample_sphere, ComparisonOracle, ObjectiveKind, Sign, Vector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;

/// Every harness run made by criteria 1 to 5, kept for the accounting and
/// determinism checks.
#[derive(Default)]
struct Runs {
    all: Vec<ExperimentResult>,
}

impl Runs {
    fn run(&mut self, cfg: ExperimentConfig) -> ExperimentResult {
        let r = execute(&cfg).expect("valid config");
        self.all.push(r.clone());
        r
    }
}

fn config(
    obj: ObjectiveKind,
    dim: usize,
    algo: Algorithm,
    m: usize,
    eps: f64,
    budget: Option<u64>,
    seed: u64,
) -> ExperimentConfig {
    ExperimentConfig {
        objective: obj,
        dim,
        algo,
        m,
        nu: 0.0,
        eps,
        budget,
        domain: DomainSpec::All,
        w1: W1Spec::Fill(0.5),
        seed,
        delta: DEFAULT_DELTA,
        out: None,
    }
}

fn subopt(r: &ExperimentResult) -> f64 {
    r.trace.last().f_runmin - r.known_min.unwrap()
}

fn f_w1(r: &ExperimentResult) -> f64 {
    r.trace.start.f_w
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t0 = Instant::now();
    let out = f();
    (out, t0.elapsed())
}

const D32: usize = 32;

fn experiment_ordering(runs: &mut Runs) -> Outcome {
    let grid: Vec<f64> = (0..13).map(|k| 1e-3 * 2f64.powi(k)).collect();
    let families = [(Algorithm::Batched, 6), (Algorithm::Battling, 6), (Algorithm::Pngd, 1)];
    let (result, elapsed) = timed(|| {
        families
            .iter()
            .map(|&(algo, m)| {
                // tune on seed 1, report on seed 2
                let (best, _) = grid
                    .iter()
                    .map(|&e| {
                        (
                            e,
                            subopt(&runs.run(config(ObjectiveKind::Quadratic, D32, algo, m, e, Some(5000), 1))),
                        )
                    })
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap();
                let r = runs.run(config(ObjectiveKind::Quadratic, D32, algo, m, best, Some(5000), 2));
                (algo, best, subopt(&r), f_w1(&r))
            })
            .collect::<Vec<_>>()
    });
    let [(_, eb, sb, f1), (_, el, sl, _), (_, es, ss, _)] = result[..] else {
        unreachable!()
    };
    let detail = format!(
        "subopt batched {sb:.3e} (eps {eb}) < battling {sl:.3e} (eps {el}) < single {ss:.3e} (eps {es}); bound {:.3}; {:.1}s",
        0.1 * f1,
        elapsed.as_secs_f64()
    );
    ensure(
        sb < sl && sl < ss && ss <= 0.1 * f1 && elapsed < Duration::from_secs(10),
        detail,
    )
}

fn convergence_to_optimum(runs: &mut Runs) -> Outcome {
    let ((q, s), elapsed) = timed(|| {
        let q = runs.run(config(
            ObjectiveKind::Quadratic,
            D32,
            Algorithm::Batched,
            6,
            0.05,
            Some(20_000),
            7,
        ));
        let s = runs.run(config(
            ObjectiveKind::Sinsum,
            D32,
            Algorithm::Batched,
            6,
            0.05,
            Some(20_000),
            7,
        ));
        (q.trace.last().f_runmin, s.trace.last().f_runmin)
    });
    ensure(
        q <= 1e-2 && s <= -28.5 && elapsed < Duration::from_secs(30),
        format!(
            "quadratic {q:.3e} <= 1e-2, sinsum {s:.4} <= -28.5; {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

/// Mean rounds to `0.05 f(w1)` over five seeds for each `m`, scaled by
/// `k(m)`; passes when the means decrease and the scaled values stay within
/// a factor of 3.
fn scaling(runs: &mut Runs, algo: Algorithm, ms: &[usize], k: impl Fn(usize) -> f64) -> Outcome {
    let f1 = 0.25 * D32 as f64;
    let eps = 0.05 * f1;
    let mut means = Vec::new();
    for &m in ms {
        let mut total = 0.0;
        for seed in 0..5 {
            let r = runs.run(config(
                ObjectiveKind::Quadratic,
                D32,
                algo,
                m,
                eps,
                Some(12_000),
                100 + seed,
            ));
            match r.rounds_to_eps {
                Some(t) => total += t as f64,
                None => return Err(format!("m = {m}, seed {seed}: eps not reached in 12000 rounds")),
            }
        }
        means.push(total / 5.0);
    }
    let scaled: Vec<f64> = ms.iter().zip(&means).map(|(&m, t)| t * k(m)).collect();
    let hi = scaled.iter().copied().fold(f64::MIN, f64::max);
    let lo = scaled.iter().copied().fold(f64::MAX, f64::min);
    let decreasing = means.windows(2).all(|w| w[1] < w[0]);
    let pairs: Vec<String> = ms
        .iter()
        .zip(means.iter().zip(&scaled))
        .map(|(m, (t, s))| format!("m={m}: {t:.0} ({s:.0})"))
        .collect();
    ensure(
        decreasing && hi / lo <= 3.0,
        format!("rounds (scaled) {}; spread {:.2}", pairs.join(", "), hi / lo),
    )
}

fn strong_convexity(runs: &mut Runs) -> Outcome {
    let (d, m, eps) = (8, 4, 0.05);
    let obj = make_quadratic(d).unwrap();
    let dist_sq = 0.25 * d as f64;
    let mut phased = Vec::new();
    let mut smooth = Vec::new();
    for e in [eps, eps / 10.0] {
        let sched = params_strong(
            e,
            obj.alpha().unwrap(),
            obj.beta(),
            d,
            dist_sq,
            m,
            duelopt_core::Mode::Batched,
        )
        .unwrap();
        let r = runs.run(config(
            ObjectiveKind::Quadratic,
            d,
            Algorithm::BatchedStrong,
            m,
            e,
            None,
            11,
        ));
        phased.push((sched.total_rounds(), r.trace.rounds(), subopt(&r), e));

        let p = params_smooth(e, obj.beta(), d, dist_sq, m, duelopt_core::Mode::Batched).unwrap();
        let r = runs.run(config(
            ObjectiveKind::Quadratic,
            d,
            Algorithm::Batched,
            m,
            e,
            Some(p.rounds),
            11,
        ));
        smooth.push((p.rounds, r.trace.rounds(), subopt(&r), e));
    }
    let reached = phased.iter().chain(&smooth).all(|&(t, ran, s, e)| t == ran && s <= e);
    let rp = phased[1].0 as f64 / phased[0].0 as f64;
    let rs = smooth[1].0 as f64 / smooth[0].0 as f64;
    ensure(
        reached && rp <= 3.0 && rs >= 7.0,
        format!(
            "phased {} -> {} rounds (ratio {rp:.2}), smooth {} -> {} rounds (ratio {rs:.2}); final subopt {:.1e}, {:.1e}, {:.1e}, {:.1e}",
            phased[0].0, phased[1].0, smooth[0].0, smooth[1].0, phased[0].2, phased[1].2, smooth[0].2, smooth[1].2
        ),
    )
}

fn estimator_band() -> Outcome {
    let d = 8;
    let f = make_quadratic(d).unwrap();
    let x = Vector::filled(d, 1.0).unwrap();
    let p = params_smooth(0.04, f.beta(), d, 0.25 * d as f64, 1, duelopt_core::Mode::Single).unwrap();
    let grad_norm = 2.0 * x.norm();
    let gamma = p.gamma;
    assert!(grad_norm > 1e6 * f.beta() * gamma * (d as f64).sqrt());
    let mut oracle = ComparisonOracle::exact(f);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let n = 100_000;
    let mut mean = Vector::zeros(d).unwrap();
    for _ in 0..n {
        let u = sample_sphere(d, 1.0, &mut rng).unwrap();
        let o = oracle
            .compare(&x.add_scaled(gamma, &u).unwrap(), &x.add_scaled(-gamma, &u).unwrap())
            .unwrap();
        mean.axpy(o.value() / n as f64, &u).unwrap();
    }
    let dir = x.scale(1.0 / x.norm());
    let cos = mean.dot(&dir).unwrap() / mean.norm();
    let mag = mean.norm();
    let sd = (d as f64).sqrt();
    let (lo, hi) = (0.9 / (20.0 * sd), 1.1 / sd);
    ensure(
        cos >= 0.99 && (lo..=hi).contains(&mag),
        format!("cosine {cos:.5}, magnitude {mag:.4} in [{lo:.4}, {hi:.4}]"),
    )
}

fn query_set_combinatorics() -> Outcome {
    let d = 8;
    let f = make_quadratic(d).unwrap();
    let mut oracle = ComparisonOracle::exact(f.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = Vec::new();
    let mut checked = 0u64;
    for l in 1..=4usize {
        for trial in 0..250 {
            let center = Vector::new((0..d).map(|_| rng.random_range(-2.0..2.0)).collect()).unwrap();
            let gamma = rng.random_range(0.01..0.5);
            let dirs: Vec<Vector> = (0..l)
                .map(|_| sample_sphere(d, 1.0 / (l as f64).sqrt(), &mut rng).unwrap())
                .collect();
            let qs = build_query_set(center.clone(), gamma, dirs.clone()).unwrap();
            let mut fail = |msg: String| failures.push(format!("l={l} trial {trial}: {msg}"));
            if qs.len() != 1 << l {
                fail(format!("size {}", qs.len()));
                continue;
            }
            for a in 0..qs.len() {
                let va = qs.vertex(a).unwrap();
                let mut opposing = 0;
                for b in 0..qs.len() {
                    let vb = qs.vertex(b).unwrap();
                    if va.hamming(&vb) != 1 {
                        continue;
                    }
                    opposing += 1;
                    let i = (0..l).find(|&i| va.signs()[i] != vb.signs()[i]).unwrap();
                    // a and b mirror each other along u_i about a point of the
                    // face spanned by the other directions
                    let diff = qs.points()[a].sub(&qs.points()[b]).unwrap();
                    let want = dirs[i].scale(2.0 * gamma * va.signs()[i] as f64);
                    let mut mid = qs.points()[a].add_scaled(1.0, &qs.points()[b]).unwrap().scale(0.5);
                    for (j, u) in dirs.iter().enumerate().filter(|&(j, _)| j != i) {
                        mid.axpy(-gamma * va.signs()[j] as f64, u).unwrap();
                    }
                    let e1 = diff.distance(&want).unwrap();
                    let e2 = mid.distance(&center).unwrap();
                    if e1 > 1e-10 || e2 > 1e-10 {
                        fail(format!("pair ({a},{b}) opposition error {e1:.1e} / {e2:.1e}"));
                    }
                }
                if opposing != l {
                    fail(format!("point {a} has {opposing} opposing neighbors"));
                }
            }
            let winner = oracle.battling_winner(qs.points()).unwrap();
            let est = extract_gradient_estimates(&qs, winner).unwrap();
            let vw = qs.vertex(winner).unwrap();
            let fw = f.eval(&qs.points()[winner]).unwrap();
            for (i, nb) in qs.neighbor_indices(winner).unwrap().into_iter().enumerate() {
                let s = Sign::of(fw - f.eval(&qs.points()[nb]).unwrap());
                let want = dirs[i].scale(s.value() * vw.signs()[i] as f64);
                checked += 1;
                if s != Sign::Minus || est[i].distance(&want).unwrap() > 1e-12 {
                    fail(format!("estimate {i} disagrees with the brute-force sign {s}"));
                }
            }
        }
    }
    ensure(
        failures.is_empty(),
        match failures.first() {
            None => format!("1000 sets, {checked} winner-neighbor pairs, zero failures"),
            Some(first) => format!("{} failures, first: {first}", failures.len()),
        },
    )
}

fn noisy_recovery() -> Outcome {
    let n = resample_count(0.25, 0.01).unwrap();
    let d = 8;
    let f = make_quadratic(d).unwrap();
    let mut oracle = ComparisonOracle::new(f.clone(), 0.25, 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut correct = 0;
    for _ in 0..1000 {
        let x = sample_sphere(d, rng.random_range(0.1..3.0), &mut rng).unwrap();
        let y = sample_sphere(d, rng.random_range(0.1..3.0), &mut rng).unwrap();
        let truth = Sign::of(f.eval(&x).unwrap() - f.eval(&y).unwrap());
        if oracle.resampled_compare(&x, &y, 0.01).unwrap() == truth {
            correct += 1;
        }
    }
    let calls = oracle.ledger().duel_queries();

    let mut cfg = config(
        ObjectiveKind::Quadratic,
        D32,
        Algorithm::Batched,
        6,
        0.05,
        Some(20_000),
        7,
    );
    cfg.nu = 0.25;
    let noisy = execute(&cfg).unwrap();
    cfg.nu = 0.0;
    let clean = execute(&cfg).unwrap();
    let fq = noisy.trace.last().f_runmin;
    let ratio = noisy.trace.last().duel_queries as f64 / clean.trace.last().duel_queries as f64;
    ensure(
        n == 43 && calls == 43_000 && correct >= 985 && fq <= 1e-2 && ratio <= 43.0,
        format!("N = {n}, {correct}/1000 majorities correct; noisy batched run f_runmin {fq:.3e} with {ratio}x the noiseless duels"),
    )
}

fn accounting(runs: &Runs) -> Outcome {
    let mut bad = Vec::new();
    for r in &runs.all {
        let c = &r.config;
        let obj = c.objective.build(c.dim).unwrap();
        let w1 = c.w1.build(c.dim).unwrap();
        let r0 = w1.sub(obj.known_minimizer().unwrap()).unwrap();
        let dist_sq = r0.dot(&r0).unwrap();
        let cpq = if c.nu > 0.0 {
            resample_count(c.nu, c.delta).unwrap()
        } else {
            1
        };
        let mode = c.algo.mode();
        let expected = if c.algo.is_phased() {
            let s = params_strong(c.eps, obj.alpha().unwrap(), obj.beta(), c.dim, dist_sq, c.m, mode).unwrap();
            let s = match c.budget {
                Some(b) => s.truncated(b),
                None => s,
            };
            phased_budget(&s, cpq)
        } else {
            let p = params_smooth(c.eps, obj.beta(), c.dim, dist_sq, c.m, mode).unwrap();
            smooth_budget(&p.with_rounds(c.budget.unwrap_or(p.rounds)), cpq)
        };
        let last = r.trace.last();
        if (last.duel_queries, last.multiwise_queries) != expected {
            bad.push(format!(
                "{} m={} eps={}: ledger ({}, {}) vs closed form {expected:?}",
                c.algo, c.m, c.eps, last.duel_queries, last.multiwise_queries
            ));
        }
    }
    ensure(
        bad.is_empty(),
        match bad.first() {
            None => format!("{} runs match their closed-form budgets", runs.all.len()),
            Some(b) => format!("{} mismatches, first: {b}", bad.len()),
        },
    )
}

fn determinism(runs: &Runs) -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    // one run from each algorithm family used above
    let mut picks: Vec<&ExperimentResult> = Vec::new();
    for algo in [
        Algorithm::Pngd,
        Algorithm::Batched,
        Algorithm::Battling,
        Algorithm::BatchedStrong,
    ] {
        if let Some(r) = runs.all.iter().find(|r| r.config.algo == algo) {
            picks.push(r);
        }
    }
    for (i, r) in picks.iter().enumerate() {
        let mut first = Vec::new();
        write_trace_csv(&mut first, &r.trace, r.known_min).unwrap();
        let mut cfg = r.config.clone();
        let path = dir.path().join(format!("run{i}.csv"));
        cfg.out = Some(path.clone());
        run_experiment(&cfg).map_err(|e| e.to_string())?;
        let second = std::fs::read(&path).map_err(|e| e.to_string())?;
        if first != second {
            return Err(format!(
                "{} m={} seed {}: CSV differs on rerun",
                cfg.algo, cfg.m, cfg.seed
            ));
        }
    }
    Ok(format!("{} reruns produced byte-identical CSV", picks.len()))
}

fn main() -> ExitCode {
    let mut runs = Runs::default();
    let mut failed = 0;
    let mut report = |n: u32, name: &str, f: &mut dyn FnMut(&mut Runs) -> Outcome, runs: &mut Runs| {
        let t0 = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(|| f(runs))).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = t0.elapsed().as_secs_f64();
        match out {
            Ok(d) => println!("PASS  {n:>2}. {name}: {d} [{secs:.1}s]"),
            Err(d) => {
                failed += 1;
                println!("FAIL  {n:>2}. {name}: {d} [{secs:.1}s]");
            }
        }
    };
    println!("acceptance suite");
    report(1, "experiment ordering", &mut experiment_ordering, &mut runs);
    report(2, "convergence to optimum", &mut convergence_to_optimum, &mut runs);
    report(
        3,
        "batched scaling",
        &mut |r| scaling(r, Algorithm::Batched, &[1, 2, 4, 8], |m| m as f64),
        &mut runs,
    );
    report(
        4,
        "battling scaling",
        &mut |r| {
            scaling(r, Algorithm::Battling, &[2, 4, 16, 256], |m| {
                duelopt_core::ell_m(m) as f64
            })
        },
        &mut runs,
    );
    report(5, "strong-convexity speedup", &mut strong_convexity, &mut runs);
    report(6, "estimator band", &mut |_| estimator_band(), &mut runs);
    report(
        7,
        "query-set combinatorics",
        &mut |_| query_set_combinatorics(),
        &mut runs,
    );
    report(8, "noisy recovery", &mut |_| noisy_recovery(), &mut runs);
    report(9, "sample accounting", &mut |r| accounting(r), &mut runs);
    report(10, "determinism", &mut |r| determinism(r), &mut runs);
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
