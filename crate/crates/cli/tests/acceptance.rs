//! Acceptance checks, one line per criterion. Exits non-zero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use projbound::bounds::{evaluate_all, find, BoundConfig, BoundId, BoundRecord, DEFAULT_BOUND_TOL};
use projbound::experiments::{
    default_epsilon_grid, equal_rank_suite_pair, example_41_pair, example_41_sweep, example_42_sweep,
    hermitian_suite_pair, intro_examples, mixed_suite_pair, mixed_suite_spec, SvProfile,
};
use projbound::identities::{all_identities, deviation_exact, trace_inequality_check, DeviationPair};
use projbound::pair::PerturbationPair;
use serde_json::Value;

const SEED: u64 = 2024;
const MIXED: u64 = 1000;
const EQUAL_RANK: u64 = 200;

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

fn within_time(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:?}, limit {limit:?}"))?;
    Ok(t)
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let grid = default_epsilon_grid();
    let report = example_41_sweep(&grid).map_err(|e| e.to_string())?;
    ensure(report.rows.len() == 90, || format!("{} rows", report.rows.len()))?;
    for row in &report.rows {
        let eps = row.epsilon.unwrap();
        let q = 1.0 / ((1.0 + eps) * (1.0 + eps));
        let chen = row.value(BoundId::ChenUp).unwrap_or(f64::NAN);
        let li = row.value(BoundId::LiUp).unwrap_or(f64::NAN);
        ensure(rel(chen, 1.0 + 1.0 / (eps * eps) + q) <= 1e-10, || {
            format!("CHEN_UP at {eps}: {chen}")
        })?;
        ensure(rel(li, 0.99 + q) <= 1e-10, || format!("LI_UP at {eps}: {li}"))?;
        for id in [BoundId::NewUp1, BoundId::NewUp2, BoundId::NewLow1, BoundId::NewLow2] {
            let v = row.value(id).unwrap_or(f64::NAN);
            ensure((v - 1.0).abs() <= 1e-10, || format!("{id} at {eps}: {v}"))?;
        }
    }
    let t = within_time(start, Duration::from_secs(1))?;
    Ok(format!("90 grid points in {t:?}"))
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let grid = default_epsilon_grid();
    let report = example_42_sweep(&grid).map_err(|e| e.to_string())?;
    for row in &report.rows {
        let eps = row.epsilon.unwrap();
        let v = |id| row.value(id).unwrap_or(f64::NAN);
        ensure((v(BoundId::CorUp1_1) - (1.0 + eps * eps)).abs() <= 1e-10, || {
            format!("CORUP_1_1 at {eps}")
        })?;
        ensure((v(BoundId::CorUp1_2) - 2.0).abs() <= 1e-10, || {
            format!("CORUP_1_2 at {eps}")
        })?;
        let q = (1.0 - eps).powi(2) / (1.0 + eps).powi(2);
        let chen = 1.0 + eps * eps + (1.0 + 1.0 / (eps * eps)) * q;
        let li = 2.0 + 2.0 * q / (eps * eps) - (1.0 - eps).powi(2) / (2.0 * eps * eps);
        ensure(rel(v(BoundId::ChenComb1), chen) <= 1e-10, || {
            format!("CHEN_COMB1 at {eps}")
        })?;
        ensure(rel(v(BoundId::LiComb1), li) <= 1e-10, || format!("LI_COMB1 at {eps}"))?;
        for id in [BoundId::CorLow1_1, BoundId::CorLow1_2] {
            let r = row.record(id).unwrap();
            let target = r.exact_target(&row.deviation);
            ensure((r.value - target).abs() <= 1e-10 * target.max(1.0), || {
                format!("{id} at {eps}: {} vs {target}", r.value)
            })?;
        }
    }
    let t = within_time(start, Duration::from_secs(1))?;
    Ok(format!("90 grid points in {t:?}"))
}

fn criterion_3() -> Verdict {
    let report = intro_examples().map_err(|e| e.to_string())?;
    let intro = &report.rows[0];
    let chen = intro.value(BoundId::ChenUp).unwrap_or(f64::NAN);
    let li = intro.value(BoundId::LiUp).unwrap_or(f64::NAN);
    ensure((chen - 25.0 / 4.0).abs() <= 1e-12, || format!("CHEN_UP = {chen}"))?;
    ensure((li - (18.0 + 3.0 * 65f64.sqrt()) / 4.0).abs() <= 1e-12, || {
        format!("LI_UP = {li}")
    })?;
    for row in &report.rows[1..] {
        let (c, l) = (row.value(BoundId::ChenUp).unwrap(), row.value(BoundId::LiUp).unwrap());
        ensure(l < c, || format!("{}: LI_UP {l} >= CHEN_UP {c}", row.label))?;
    }
    Ok(format!(
        "CHEN_UP {chen}, LI_UP {li}; LI_UP < CHEN_UP at eps 0.2, 0.5, 0.9"
    ))
}

struct Suite {
    pairs: Vec<PerturbationPair>,
    build: Duration,
}

fn suite() -> Suite {
    let start = Instant::now();
    let mut pairs: Vec<_> = (0..MIXED).map(|i| mixed_suite_pair(SEED, i).unwrap()).collect();
    pairs.extend((0..EQUAL_RANK).map(|i| equal_rank_suite_pair(SEED, i).unwrap()));
    Suite {
        pairs,
        build: start.elapsed(),
    }
}

fn criterion_4(s: &Suite) -> Verdict {
    let start = Instant::now();
    let mixed = &s.pairs[..MIXED as usize];
    let specs: Vec<_> = (0..MIXED).map(|i| mixed_suite_spec(SEED, i)).collect();
    let equal = mixed.iter().filter(|p| p.equal_rank()).count();
    let near = specs
        .iter()
        .filter(|s| matches!(s.sv_profile, SvProfile::Explicit(_)))
        .count();
    ensure(equal >= 200, || format!("only {equal} equal-rank pairs"))?;
    ensure(near == 100, || format!("{near} near-rank-deficient pairs"))?;
    let (mut checked, mut worst) = (0, 0.0f64);
    for (k, p) in mixed.iter().enumerate() {
        for r in all_identities(p).into_iter().filter(|r| r.applicable) {
            let scaled = r.abs_residual / r.lhs.abs().max(1.0);
            ensure(scaled <= 1e-9, || {
                format!("pair {k}: {} residual {:e}", r.identity_id, r.abs_residual)
            })?;
            worst = worst.max(scaled);
            checked += 1;
        }
    }
    let t = within_time(start, Duration::from_secs(30) - s.build)?;
    Ok(format!(
        "{checked} identities on {MIXED} pairs ({equal} equal-rank, {near} near-deficient), worst scaled residual {worst:.1e}, {:?}",
        t + s.build
    ))
}

struct Evaluated {
    dev: DeviationPair,
    records: Vec<BoundRecord>,
    pair_ranks: (usize, usize, usize),
}

fn evaluate(s: &Suite) -> Vec<Evaluated> {
    s.pairs
        .iter()
        .map(|p| Evaluated {
            dev: deviation_exact(p),
            records: evaluate_all(p, &BoundConfig::default()).unwrap(),
            pair_ranks: (p.rank_a(), p.rank_b(), p.shape().0),
        })
        .collect()
}

fn criterion_5(ev: &[Evaluated]) -> Verdict {
    let (mut checked, mut parametric) = (0, 0);
    for (k, e) in ev.iter().enumerate() {
        for r in e.records.iter().filter(|r| r.applicable) {
            ensure(r.holds(&e.dev, DEFAULT_BOUND_TOL), || {
                format!(
                    "pair {k}: {} {:?} = {} vs exact {}",
                    r.bound_id,
                    r.params,
                    r.value,
                    r.exact_target(&e.dev)
                )
            })?;
            checked += 1;
            parametric += usize::from(r.params.is_some());
        }
    }
    Ok(format!(
        "{checked} applicable records on {} pairs, {parametric} from the 5x5 parameter grid",
        ev.len()
    ))
}

fn criterion_6(ev: &[Evaluated]) -> Verdict {
    use BoundId::*;
    let pairs = [
        (NewUp1, ChenUp),
        (NewUp2, LiUp),
        (CorUp1_1, ChenComb1),
        (CorUp1_2, LiComb1),
        (NewUp1EqRank, ChenUpEqRank),
        (NewUp2EqRank, LiUpEqRank),
        (CorUp2_1, ChenComb2),
        (CorUp2_2, LiComb2),
    ];
    let mut compared = 0;
    for (k, e) in ev.iter().enumerate() {
        let value = |id| find(&e.records, id).filter(|r| r.applicable).map(|r| r.value);
        for (new, old) in pairs {
            if let (Some(x), Some(y)) = (value(new), value(old)) {
                ensure(x <= y + 1e-9, || format!("pair {k}: {new} = {x} > {old} = {y}"))?;
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} comparisons over {} pairs", ev.len()))
}

fn criterion_7(ev: &[Evaluated]) -> Verdict {
    let (mut low_branch, mut high_branch) = (0, 0);
    for (k, e) in ev.iter().enumerate() {
        let (r, s, m) = e.pair_ranks;
        if r + s <= m {
            low_branch += 1;
        } else {
            high_branch += 1;
        }
        let lo = find(&e.records, BoundId::RankLow).unwrap().value;
        let up = find(&e.records, BoundId::RankUp).unwrap().value;
        ensure(lo <= e.dev.primal + 1e-9 && e.dev.primal <= up + 1e-9, || {
            format!("pair {k}: {lo} <= {} <= {up} fails", e.dev.primal)
        })?;
    }
    ensure(low_branch > 0 && high_branch > 0, || {
        format!("branches hit {low_branch}/{high_branch}")
    })?;
    let p = example_41_pair(0.5).map_err(|e| e.to_string())?;
    let records = evaluate_all(&p, &BoundConfig::default()).map_err(|e| e.to_string())?;
    let lo = find(&records, BoundId::RankLow).unwrap().value;
    let up = find(&records, BoundId::RankUp).unwrap().value;
    ensure(lo == 1.0 && up == 1.0, || format!("diagonal example gives {lo}, {up}"))?;
    Ok(format!(
        "s + r <= m on {low_branch} pairs, s + r > m on {high_branch}; diagonal example gives 1 = 1"
    ))
}

fn criterion_8() -> Verdict {
    let mut orders = [0usize; 11];
    for k in 0..500 {
        let (m, n) = hermitian_suite_pair(SEED, k).map_err(|e| e.to_string())?;
        orders[m.rows()] += 1;
        let t = trace_inequality_check(&m, &n).map_err(|e| e.to_string())?;
        ensure(t.holds(1e-9), || format!("pair {k}: {t:?}"))?;
    }
    ensure(orders[2] > 0 && orders[10] > 0, || format!("orders drawn: {orders:?}"))?;
    Ok("500 Hermitian pairs of order 2 to 10".into())
}

fn bench_run(dir: &Path) -> Result<(), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_projbound"))
        .args([
            "bench",
            "--samples",
            "100",
            "--seed",
            "1",
            "--format",
            "csv,json",
            "--out",
        ])
        .arg(dir)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(o.status.success(), || String::from_utf8_lossy(&o.stderr).into_owned())
}

fn criterion_9() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (x, y) = (dir.path().join("first"), dir.path().join("second"));
    bench_run(&x)?;
    std::thread::sleep(Duration::from_millis(1100));
    bench_run(&y)?;
    let read = |p: &Path| std::fs::read(p).map_err(|e| e.to_string());
    for f in ["bench.csv", "bench-win-rates.csv"] {
        ensure(read(&x.join(f))? == read(&y.join(f))?, || format!("{f} differs"))?;
    }
    let strip = |p: &Path| -> Result<String, String> {
        let mut v: Value = serde_json::from_slice(&read(p)?).map_err(|e| e.to_string())?;
        v.as_object_mut()
            .and_then(|o| o.remove("generated_at"))
            .ok_or("no generated_at field")?;
        serde_json::to_string_pretty(&v).map_err(|e| e.to_string())
    };
    ensure(strip(&x.join("bench.json"))? == strip(&y.join("bench.json"))?, || {
        "bench.json differs".into()
    })?;
    Ok("bench.csv, bench-win-rates.csv and bench.json (minus generated_at) identical".into())
}

fn main() {
    let suite = suite();
    let evaluated = evaluate(&suite);
    let results: Vec<(u32, &str, Verdict)> = vec![
        (1, "first diagonal example", criterion_1()),
        (2, "second diagonal example", criterion_2()),
        (3, "neither classical bound dominates", criterion_3()),
        (4, "identity suite", criterion_4(&suite)),
        (5, "sandwich suite", criterion_5(&evaluated)),
        (6, "dominance suite", criterion_6(&evaluated)),
        (7, "rank bounds", criterion_7(&evaluated)),
        (8, "trace inequality", criterion_8()),
        (9, "bench determinism", criterion_9()),
    ];
    let mut failed = 0;
    for (n, name, verdict) in &results {
        match verdict {
            Ok(detail) => println!("criterion {n} ({name}): PASS - {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n} ({name}): FAIL - {why}");
            }
        }
    }
    println!("{} of {} criteria pass", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
