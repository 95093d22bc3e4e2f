use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use projbound::bounds::{evaluate_all, BoundConfig, BoundId, BoundRecord, Target};
use projbound::experiments::{
    default_epsilon_grid, example_41_sweep, example_42_sweep, intro_examples, parse_grid, tightness_benchmark,
    EnsembleSpec, SvProfile, SweepReport, SweepRow,
};
use projbound::identities::{all_identities, deviation_exact};
use projbound::linalg::TolerancePolicy;
use projbound::matrix_file::parse_matrix;
use projbound::pair::PerturbationPair;
use serde_json::{json, Value};

use crate::args::{
    BenchArgs, BoundOptions, BoundsArgs, Format, OutputArgs, PairArgs, ReproduceArgs, Scenario, SweepArgs,
};
use crate::error::{CliError, CliResult};
use crate::report::{json_number, to_json, Cell, Report, Table};
use crate::svg::{render, Chart, Series};

/// What a command found. Any failure turns into exit status 1.
#[derive(Debug, Default)]
pub struct Outcome {
    pub failures: usize,
    pub summary: String,
}

struct Artifact {
    name: String,
    bytes: Vec<u8>,
    /// Printed to stdout when no output directory is given.
    primary: bool,
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn formats(out: &OutputArgs, default: &[Format], allowed: &[Format], command: &str) -> CliResult<Vec<Format>> {
    let mut f = out.format.clone().unwrap_or_else(|| default.to_vec());
    f.sort();
    f.dedup();
    if f.is_empty() {
        return Err(CliError::Usage("--format needs at least one of csv, json, svg".into()));
    }
    if let Some(bad) = f.iter().find(|x| !allowed.contains(x)) {
        return Err(CliError::Usage(
            format!("{command} cannot write {bad:?} output").to_lowercase(),
        ));
    }
    if !(out.tol.is_finite() && out.tol >= 0.0) {
        return Err(CliError::Usage(format!(
            "--tol must be a non-negative number, got {}",
            out.tol
        )));
    }
    Ok(f)
}

fn emit(out: Option<&Path>, artifacts: &[Artifact]) -> CliResult<Vec<PathBuf>> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            artifacts
                .iter()
                .map(|a| {
                    let path = dir.join(&a.name);
                    std::fs::write(&path, &a.bytes).map_err(|e| CliError::io(&path, e))?;
                    Ok(path)
                })
                .collect()
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            for a in artifacts.iter().filter(|a| a.primary) {
                stdout.write_all(&a.bytes).map_err(|e| CliError::io("<stdout>", e))?;
            }
            Ok(Vec::new())
        }
    }
}

fn table_artifacts(stem: &str, report: &Report, formats: &[Format], primary: bool) -> CliResult<Vec<Artifact>> {
    let mut v = Vec::new();
    if formats.contains(&Format::Csv) {
        v.push(Artifact {
            name: format!("{stem}.csv"),
            bytes: report.table.to_csv()?,
            primary,
        });
    }
    if formats.contains(&Format::Json) {
        v.push(Artifact {
            name: format!("{stem}.json"),
            bytes: report.to_json()?,
            primary,
        });
    }
    Ok(v)
}

fn finish(out: Option<&Path>, artifacts: Vec<Artifact>, mut outcome: Outcome) -> CliResult<Outcome> {
    let written = emit(out, &artifacts)?;
    for p in written {
        outcome.summary.push_str(&format!("\nwrote {}", p.display()));
    }
    Ok(outcome)
}

fn read_matrix(path: &Path) -> CliResult<projbound::linalg::ComplexMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_matrix(&text).map_err(|source| CliError::InputFile {
        path: path.to_path_buf(),
        source,
    })
}

fn load_pair(args: &PairArgs) -> CliResult<PerturbationPair> {
    let policy = match args.rank_tol {
        None => TolerancePolicy::Default,
        Some(t) if t.is_finite() && t >= 0.0 => TolerancePolicy::Absolute(t),
        Some(t) => {
            return Err(CliError::Usage(format!(
                "--rank-tol must be a non-negative number, got {t}"
            )))
        }
    };
    Ok(PerturbationPair::with_policy(
        read_matrix(&args.a)?,
        read_matrix(&args.b)?,
        policy,
    )?)
}

fn pair_config(command: &str, args: &PairArgs, formats: &[Format]) -> Value {
    json!({
        "command": command,
        "a": args.a.display().to_string(),
        "b": args.b.display().to_string(),
        "tol": json_number(args.output.tol),
        "rank_tol": args.rank_tol.map_or(Value::Null, json_number),
        "formats": formats,
    })
}

fn pair_summary(pair: &PerturbationPair) -> Value {
    let dev = deviation_exact(pair);
    json!({
        "shape": [pair.shape().0, pair.shape().1],
        "rank_a": pair.rank_a(),
        "rank_b": pair.rank_b(),
        "primal": json_number(dev.primal),
        "dual": json_number(dev.dual),
    })
}

pub fn verify(args: &PairArgs) -> CliResult<Outcome> {
    let formats = formats(&args.output, &[Format::Csv], &[Format::Csv, Format::Json], "verify")?;
    let pair = load_pair(args)?;
    let tol = args.output.tol;
    let mut table = Table::new([
        "identity_id",
        "applicable",
        "lhs",
        "rhs",
        "abs_residual",
        "rel_residual",
        "status",
    ]);
    let (mut failures, mut checked) = (0, 0);
    for r in all_identities(&pair) {
        let id = Cell::text(r.identity_id.as_str());
        if !r.applicable {
            let lhs = Cell::Num(r.lhs);
            table.push(vec![
                id,
                Cell::Bool(false),
                lhs,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::text("n/a"),
            ]);
            continue;
        }
        let ok = r.within(tol);
        checked += 1;
        failures += usize::from(!ok);
        table.push(vec![
            id,
            Cell::Bool(true),
            Cell::Num(r.lhs),
            Cell::Num(r.rhs),
            Cell::Num(r.abs_residual),
            Cell::Num(r.abs_residual / r.lhs.abs().max(1.0)),
            Cell::text(if ok { "ok" } else { "FAIL" }),
        ]);
    }
    let mut aggregates = pair_summary(&pair);
    aggregates["checked"] = checked.into();
    aggregates["failed"] = failures.into();
    let report = Report {
        config: pair_config("verify", args, &formats),
        table,
        aggregates: Some(aggregates),
        generated_at: now(),
    };
    let outcome = Outcome {
        failures,
        summary: format!("verify: {checked} identities checked, {failures} outside tolerance {tol:e}"),
    };
    finish(
        args.output.out.as_deref(),
        table_artifacts("identities", &report, &formats, true)?,
        outcome,
    )
}

fn bound_config(opts: &BoundOptions) -> CliResult<BoundConfig> {
    let grid = parse_grid(&opts.param_grid)?;
    if let Some(p) = grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(CliError::Usage(format!("--param-grid value {p} outside [0, 1]")));
    }
    Ok(BoundConfig {
        param_grid: grid,
        force_general_rank: opts.force_general_rank,
    })
}

fn weights(r: &BoundRecord) -> (&'static str, f64, f64) {
    match r.target {
        Target::Primal => ("PRIMAL", 1.0, 0.0),
        Target::Combined { w_primal, w_dual } => ("COMBINED", w_primal, w_dual),
    }
}

pub fn bounds(args: &BoundsArgs) -> CliResult<Outcome> {
    let out = &args.pair.output;
    let formats = formats(out, &[Format::Csv], &[Format::Csv, Format::Json], "bounds")?;
    let config = bound_config(&args.bounds)?;
    let pair = load_pair(&args.pair)?;
    let dev = deviation_exact(&pair);
    let records = evaluate_all(&pair, &config)?;
    let mut table = Table::new([
        "bound_id",
        "kind",
        "target",
        "w_primal",
        "w_dual",
        "param_1",
        "param_2",
        "applicable",
        "value",
        "exact",
        "gap",
        "sandwich",
        "reason",
    ]);
    let mut failures = 0;
    for r in &records {
        let (target, wp, wd) = weights(r);
        let [p1, p2] = r.params.map_or([None, None], |[p, q]| [Some(p), Some(q)]);
        let exact = r.exact_target(&dev);
        let sandwich = if !r.applicable {
            "n/a"
        } else if r.holds(&dev, out.tol) {
            "ok"
        } else {
            failures += 1;
            "VIOLATED"
        };
        table.push(vec![
            Cell::text(r.bound_id.as_str()),
            Cell::text(format!("{:?}", r.kind).to_uppercase()),
            Cell::text(target),
            Cell::Num(wp),
            Cell::Num(wd),
            Cell::opt(p1),
            Cell::opt(p2),
            Cell::Bool(r.applicable),
            if r.applicable { Cell::Num(r.value) } else { Cell::Empty },
            Cell::Num(exact),
            if r.applicable {
                Cell::Num((r.value - exact).abs() / exact.abs().max(1.0))
            } else {
                Cell::Empty
            },
            Cell::text(sandwich),
            Cell::text(r.inapplicability_reason.clone().unwrap_or_default()),
        ]);
    }
    let mut cfg = pair_config("bounds", &args.pair, &formats);
    cfg["param_grid"] = to_json(&config.param_grid)?;
    cfg["force_general_rank"] = config.force_general_rank.into();
    let mut aggregates = pair_summary(&pair);
    aggregates["applicable"] = records.iter().filter(|r| r.applicable).count().into();
    aggregates["violations"] = failures.into();
    let report = Report {
        config: cfg,
        table,
        aggregates: Some(aggregates),
        generated_at: now(),
    };
    let outcome = Outcome {
        failures,
        summary: format!(
            "bounds: {} records, {} applicable, {failures} sandwich violations (primal {}, dual {})",
            records.len(),
            records.iter().filter(|r| r.applicable).count(),
            dev.primal,
            dev.dual
        ),
    };
    finish(
        out.out.as_deref(),
        table_artifacts("bounds", &report, &formats, true)?,
        outcome,
    )
}

fn epsilon_grid(spec: Option<&str>) -> CliResult<(Vec<f64>, String)> {
    match spec {
        Some(s) => Ok((parse_grid(s)?, s.to_string())),
        None => Ok((default_epsilon_grid(), "0.11:0.99:90".to_string())),
    }
}

fn value_of(row: &SweepRow, id: BoundId) -> Cell {
    Cell::opt(row.value(id))
}

/// One row per grid point: exact deviations, every non-parametric bound, then
/// the closed-form reference columns.
fn sweep_table(report: &SweepReport) -> Table {
    let first = &report.rows[0];
    let ids: Vec<BoundId> = first.records.iter().map(|r| r.bound_id).collect();
    let refs: Vec<&str> = first.references.iter().map(|r| r.name).collect();
    let mut columns = vec!["label", "epsilon", "exact_primal", "exact_dual"];
    columns.extend(ids.iter().map(|id| id.as_str()));
    columns.extend(refs.iter().copied());
    let mut table = Table::new(columns);
    for row in &report.rows {
        let mut cells = vec![
            Cell::text(row.label.clone()),
            Cell::opt(row.epsilon),
            Cell::Num(row.deviation.primal),
            Cell::Num(row.deviation.dual),
        ];
        cells.extend(ids.iter().map(|&id| value_of(row, id)));
        cells.extend(refs.iter().map(|name| Cell::opt(row.reference(name))));
        table.push(cells);
    }
    table
}

fn sweep_aggregates(report: &SweepReport, tol: f64) -> CliResult<(Value, usize)> {
    let violations = report.violations(tol).len();
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    Ok((
        json!({ "checks": to_json(&report.checks)?, "violations": violations }),
        violations + failed,
    ))
}

fn chart(report: &SweepReport, title: &str, y_label: &str, series: &[(&str, BoundId)], exact: Option<&str>) -> Chart {
    let mut s: Vec<Series> = series
        .iter()
        .map(|&(name, id)| Series {
            name: name.to_string(),
            points: report
                .rows
                .iter()
                .filter_map(|r| Some((r.epsilon?, r.value(id)?)))
                .collect(),
        })
        .collect();
    if let Some(name) = exact {
        s.push(Series {
            name: name.to_string(),
            points: report
                .rows
                .iter()
                .filter_map(|r| Some((r.epsilon?, r.deviation.primal)))
                .collect(),
        });
    }
    Chart {
        title: title.into(),
        x_label: "epsilon".into(),
        y_label: y_label.into(),
        series: s,
    }
}

const PRIMAL_LABEL: &str = "||P_B - P_A||_F^2";
const COMBINED_LABEL: &str = "combined deviation";

pub fn sweep(args: &SweepArgs) -> CliResult<Outcome> {
    let allowed = [Format::Csv, Format::Json, Format::Svg];
    let formats = formats(&args.output, &[Format::Csv], &allowed, "sweep")?;
    let report = match args.scenario {
        Scenario::Example41 | Scenario::Example42 => {
            let (grid, _) = epsilon_grid(args.grid.as_deref())?;
            if args.scenario == Scenario::Example41 {
                example_41_sweep(&grid)?
            } else {
                example_42_sweep(&grid)?
            }
        }
        Scenario::Intro => {
            if args.grid.is_some() {
                return Err(CliError::Usage("the intro scenario has a fixed grid".into()));
            }
            if formats.contains(&Format::Svg) {
                return Err(CliError::Usage(
                    "svg output needs an epsilon sweep, not the intro scenario".into(),
                ));
            }
            intro_examples()?
        }
    };
    let tol = args.output.tol;
    let (aggregates, failures) = sweep_aggregates(&report, tol)?;
    let config = json!({
        "command": "sweep",
        "scenario": args.scenario,
        "grid": epsilon_grid(args.grid.as_deref())?.1,
        "tol": json_number(tol),
        "formats": formats,
    });
    let rep = Report {
        config,
        table: sweep_table(&report),
        aggregates: Some(aggregates),
        generated_at: report.metadata.timestamp,
    };
    let mut artifacts = table_artifacts("sweep", &rep, &formats, true)?;
    if formats.contains(&Format::Svg) {
        use BoundId::*;
        let c = match args.scenario {
            Scenario::Example41 => chart(
                &report,
                "Primal bounds, first diagonal example",
                PRIMAL_LABEL,
                &[
                    ("CHEN_UP", ChenUp),
                    ("LI_UP", LiUp),
                    ("NEW_UP1", NewUp1),
                    ("NEW_UP2", NewUp2),
                    ("NEW_LOW1", NewLow1),
                    ("NEW_LOW2", NewLow2),
                ],
                Some("exact"),
            ),
            _ => chart(
                &report,
                "Combined bounds, second diagonal example",
                COMBINED_LABEL,
                &[
                    ("CHEN_COMB1", ChenComb1),
                    ("LI_COMB1", LiComb1),
                    ("CORUP_1_1", CorUp1_1),
                    ("CORUP_1_2", CorUp1_2),
                    ("CORLOW_1_1", CorLow1_1),
                    ("CORLOW_1_2", CorLow1_2),
                ],
                None,
            ),
        };
        artifacts.push(Artifact {
            name: "sweep.svg".into(),
            bytes: render(&c).into_bytes(),
            primary: true,
        });
    }
    let outcome = Outcome {
        failures,
        summary: format!(
            "sweep {}: {} rows, {} checks failed, {} sandwich violations",
            report.scenario_id,
            report.rows.len(),
            report.checks.iter().filter(|c| !c.passed).count(),
            report.violations(tol).len()
        ),
    };
    finish(args.output.out.as_deref(), artifacts, outcome)
}

fn primal_table(report: &SweepReport) -> Table {
    use BoundId::*;
    let ids = [ChenUp, LiUp, NewUp1, NewUp2, NewLow1, NewLow2];
    let mut columns = vec!["epsilon", "exact"];
    columns.extend(ids.iter().map(|id| id.as_str()));
    columns.extend(["chen_up_closed", "li_up_closed"]);
    let mut table = Table::new(columns);
    for row in &report.rows {
        let mut cells = vec![Cell::opt(row.epsilon), Cell::Num(row.deviation.primal)];
        cells.extend(ids.iter().map(|&id| value_of(row, id)));
        cells.extend(["chen_up_closed", "li_up_closed"].map(|n| Cell::opt(row.reference(n))));
        table.push(cells);
    }
    table
}

fn combined_table(report: &SweepReport) -> Table {
    use BoundId::*;
    let ids = [ChenComb1, LiComb1, CorUp1_1, CorUp1_2, CorLow1_1, CorLow1_2];
    let mut columns = vec!["epsilon", "c1", "c2", "c1_lower"];
    columns.extend(ids.iter().map(|id| id.as_str()));
    columns.extend(["chen_comb1_closed", "li_comb1_closed"]);
    let mut table = Table::new(columns);
    for row in &report.rows {
        // CORLOW_1_1 weights the dual term by max{a/b, b/a}.
        let c1_lower = row.record(CorLow1_1).map(|r| r.exact_target(&row.deviation));
        let mut cells = vec![
            Cell::opt(row.epsilon),
            Cell::opt(row.reference("c1")),
            Cell::opt(row.reference("c2")),
            Cell::opt(c1_lower),
        ];
        cells.extend(ids.iter().map(|&id| value_of(row, id)));
        cells.extend(["chen_comb1_closed", "li_comb1_closed"].map(|n| Cell::opt(row.reference(n))));
        table.push(cells);
    }
    table
}

pub fn reproduce(args: &ReproduceArgs) -> CliResult<Outcome> {
    let allowed = [Format::Csv, Format::Json, Format::Svg];
    let formats = formats(&args.output, &[Format::Csv, Format::Svg], &allowed, "reproduce")?;
    let (grid, grid_spec) = epsilon_grid(args.grid.as_deref())?;
    let tol = args.output.tol;
    let primal = example_41_sweep(&grid)?;
    let combined = example_42_sweep(&grid)?;
    let config = json!({
        "command": "reproduce",
        "grid": grid_spec,
        "tol": json_number(tol),
        "formats": formats,
    });
    let (agg1, f1) = sweep_aggregates(&primal, tol)?;
    let (agg2, f2) = sweep_aggregates(&combined, tol)?;
    let mut artifacts = table_artifacts(
        "tables1-2",
        &Report {
            config: config.clone(),
            table: primal_table(&primal),
            aggregates: Some(agg1),
            generated_at: primal.metadata.timestamp,
        },
        &formats,
        true,
    )?;
    artifacts.extend(table_artifacts(
        "tables3-4",
        &Report {
            config,
            table: combined_table(&combined),
            aggregates: Some(agg2),
            generated_at: combined.metadata.timestamp,
        },
        &formats,
        true,
    )?);
    if formats.contains(&Format::Svg) {
        use BoundId::*;
        let figures = [
            (
                "figure1-left",
                &primal,
                "CHEN_UP against NEW_UP1",
                PRIMAL_LABEL,
                [("CHEN_UP", ChenUp), ("NEW_UP1", NewUp1)],
            ),
            (
                "figure1-right",
                &primal,
                "LI_UP against NEW_UP2",
                PRIMAL_LABEL,
                [("LI_UP", LiUp), ("NEW_UP2", NewUp2)],
            ),
            (
                "figure2-left",
                &combined,
                "CHEN_COMB1 against CORUP_1_1",
                COMBINED_LABEL,
                [("CHEN_COMB1", ChenComb1), ("CORUP_1_1", CorUp1_1)],
            ),
            (
                "figure2-right",
                &combined,
                "LI_COMB1 against CORUP_1_2",
                COMBINED_LABEL,
                [("LI_COMB1", LiComb1), ("CORUP_1_2", CorUp1_2)],
            ),
        ];
        for (stem, report, title, y_label, series) in figures {
            let c = chart(report, title, y_label, &series, None);
            artifacts.push(Artifact {
                name: format!("{stem}.svg"),
                bytes: render(&c).into_bytes(),
                primary: false,
            });
        }
    }
    let out = args.output.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let outcome = Outcome {
        failures: f1 + f2,
        summary: format!(
            "reproduce: {} grid points, {} failed checks or violations",
            grid.len(),
            f1 + f2
        ),
    };
    finish(Some(&out), artifacts, outcome)
}

fn parse_profile(s: &str) -> CliResult<SvProfile> {
    if s == "uniform" {
        return Ok(SvProfile::Uniform);
    }
    match s.strip_prefix("geometric:").map(str::parse::<f64>) {
        Some(Ok(r)) if r.is_finite() && r >= 1.0 => Ok(SvProfile::Geometric(r)),
        _ => Err(CliError::Usage(format!(
            "--profile expects uniform or geometric:<ratio >= 1>, got {s:?}"
        ))),
    }
}

pub fn bench(args: &BenchArgs) -> CliResult<Outcome> {
    let formats = formats(&args.output, &[Format::Csv], &[Format::Csv, Format::Json], "bench")?;
    let config = bound_config(&args.bounds)?;
    let spec = EnsembleSpec {
        m: args.m,
        n: args.n,
        rank_a: args.rank_a,
        rank_b: args.rank_b,
        sv_profile: parse_profile(&args.profile)?,
        perturb_scale: args.perturb_scale,
        seed: args.seed,
    };
    let tol = args.output.tol;
    let rep = tightness_benchmark(&spec, args.samples, &config, tol)?;

    let mut gaps = Table::new([
        "bound_id",
        "param_1",
        "param_2",
        "samples",
        "mean_gap",
        "median_gap",
        "max_gap",
    ]);
    for g in &rep.gaps {
        let [p1, p2] = g.params.map_or([None, None], |[p, q]| [Some(p), Some(q)]);
        gaps.push(vec![
            Cell::text(g.bound_id.as_str()),
            Cell::opt(p1),
            Cell::opt(p2),
            Cell::Int(g.samples as u64),
            Cell::Num(g.mean),
            Cell::Num(g.median),
            Cell::Num(g.max),
        ]);
    }
    let mut wins = Table::new(["bound", "other", "comparisons", "wins", "ties", "rate"]);
    for w in &rep.win_rates {
        wins.push(vec![
            Cell::text(w.bound.as_str()),
            Cell::text(w.other.as_str()),
            Cell::Int(w.comparisons as u64),
            Cell::Int(w.wins as u64),
            Cell::Int(w.ties as u64),
            Cell::Num(w.rate),
        ]);
    }
    let cfg = json!({
        "command": "bench",
        "spec": to_json(&spec)?,
        "samples": args.samples,
        "tol": json_number(tol),
        "param_grid": to_json(&config.param_grid)?,
        "force_general_rank": config.force_general_rank,
        "formats": formats,
    });
    let aggregates = json!({
        "violation_count": rep.violation_count,
        "violations": to_json(&rep.violations)?,
        "win_rates": to_json(&rep.win_rates)?,
    });
    let report = Report {
        config: cfg.clone(),
        table: gaps,
        aggregates: Some(aggregates),
        generated_at: rep.timestamp,
    };
    let mut artifacts = table_artifacts("bench", &report, &formats, true)?;
    if formats.contains(&Format::Csv) {
        let w = Report {
            config: cfg,
            table: wins,
            aggregates: None,
            generated_at: rep.timestamp,
        };
        artifacts.extend(table_artifacts("bench-win-rates", &w, &[Format::Csv], false)?);
    }
    let outcome = Outcome {
        failures: rep.violation_count,
        summary: format!(
            "bench: {} samples, {} gap rows, {} sandwich violations",
            args.samples,
            rep.gaps.len(),
            rep.violation_count
        ),
    };
    finish(args.output.out.as_deref(), artifacts, outcome)
}
