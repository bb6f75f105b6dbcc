//! One function per subcommand. Each returns the JSON report plus an
//! optional tolerance-violation message; CSV side outputs are written
//! here so `main` only has to print and pick the exit code.

use crate::output::{csv_float, write_csv, WALL_TIME_NOTE};
use crate::{
    BridgesArgs, CliError, Command, CrArgs, FugacityIdentityArgs, PartitionCommand,
    PartitionRectArgs, PartitionStripArgs, RectIdentityArgs, SwapArgs, TriangleArgs,
    TwoPointArgs, VerifyCommand, WeightsArgs, YbArgs, YcArgs,
};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use saw_core::enumerate::{cr_residual, observable, partition_on};
use saw_core::fugacity::{check_fugacity_sum_rule, yc_convergence_report};
use saw_core::tiling::build_rect;
use saw_core::transfer::{
    strip_partition, two_point_alpha, yc_strip_report, ConvergenceStatus,
};
use saw_core::triangle::{bridge_decay_report, tri_partition};
use saw_core::weights::local_weights;
use saw_core::yangbaxter::{check_yb, column_swap_experiment};
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::path::Path;

/// Result of a subcommand: the stdout report, and the violation message
/// (naming the offending residual) when an asserted tolerance failed.
pub struct Outcome {
    pub report: Value,
    pub violation: Option<String>,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome { report, violation: None }
    }

    fn checked(report: Value, name: &str, residual: f64, tol: f64) -> Self {
        let violation = (residual > tol)
            .then(|| format!("{name} = {residual:.3e} exceeds tolerance {tol:.3e}"));
        Outcome { report, violation }
    }
}

fn emit_csv(path: &Path, header: &str, rows: &[String]) -> Result<(), CliError> {
    write_csv(path, header, rows)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn run(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Weights(args) => weights(args),
        Command::Verify(VerifyCommand::Yb(args)) => verify_yb(args),
        Command::Verify(VerifyCommand::Cr(args)) => verify_cr(args),
        Command::Verify(VerifyCommand::RectIdentity(args)) => verify_rect_identity(args),
        Command::Verify(VerifyCommand::FugacityIdentity(args)) => {
            verify_fugacity_identity(args)
        }
        Command::Partition(PartitionCommand::Rect(args)) => partition_rect(args),
        Command::Partition(PartitionCommand::Strip(args)) => partition_strip(args),
        Command::TwoPoint(args) => two_point(args),
        Command::SwapExperiment(args) => swap_experiment(args),
        Command::Triangle(args) => triangle(args),
        Command::Bridges(args) => bridges(args),
        Command::Yc(args) => yc(args),
    }
}

fn weights(args: &WeightsArgs) -> Result<Outcome, CliError> {
    let theta = saw_core::angle::parse_angle(&args.theta)?;
    let w = local_weights(theta)?;
    let sum_rule_residual = (w.v
        + w.u1 * (3.0 * theta / 8.0).cos()
        + w.u2 * (3.0 * (theta - PI) / 8.0).cos()
        - 1.0)
        .abs();
    if let Some(path) = &args.csv {
        let row = [theta, w.u1, w.u2, w.v, w.w1, w.w2]
            .map(csv_float)
            .join(",");
        emit_csv(path, "theta,u1,u2,v,w1,w2", &[row])?;
    }
    Ok(Outcome::ok(json!({
        "command": "weights",
        "theta": theta,
        "u1": w.u1,
        "u2": w.u2,
        "v": w.v,
        "w1": w.w1,
        "w2": w.w2,
        "sum_rule_residual": sum_rule_residual,
        "wall_time_note": WALL_TIME_NOTE,
    })))
}

fn verify_yb(args: &YbArgs) -> Result<Outcome, CliError> {
    if args.grid == 0 && args.random == 0 {
        return Err(CliError::Usage("nothing to check: grid and random are both 0".into()));
    }
    let mut worst = 0.0f64;
    let mut worst_triple = [0.0f64; 3];
    let mut checks = 0u64;
    let mut csv_rows = Vec::new();
    let mut record = |source: &str, dirs: [f64; 3], residual: f64| {
        if residual > worst {
            worst = residual;
            worst_triple = dirs;
        }
        checks += 1;
        csv_rows.push(format!(
            "{source},{},{},{},{}",
            csv_float(dirs[0]),
            csv_float(dirs[1]),
            csv_float(dirs[2]),
            csv_float(residual)
        ));
    };
    let step = PI / (2.0 * args.grid as f64 + 2.0);
    for i in 1..=args.grid {
        for j in 1..=args.grid {
            let (g1, g2) = (i as f64 * step, j as f64 * step);
            let yb = check_yb(0.0, g1, g1 + g2)?;
            record("grid", yb.directions, yb.residual);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    for _ in 0..args.random {
        let d1 = rng.random_range(-2.0..2.0);
        let g1 = rng.random_range(0.02..2.5);
        let g2 = rng.random_range(0.02..(PI - 0.02 - g1).max(0.03));
        let yb = check_yb(d1, d1 + g1, d1 + g1 + g2)?;
        record("random", yb.directions, yb.residual);
    }
    if let Some(path) = &args.csv {
        emit_csv(path, "source,d1,d2,d3,residual", &csv_rows)?;
    }
    let report = json!({
        "command": "verify yb",
        "grid": args.grid,
        "random_triples": args.random,
        "seed": args.seed,
        "tol": args.tol,
        "checks": checks,
        "max_residual": worst,
        "worst_triple": worst_triple,
        "wall_time_note": WALL_TIME_NOTE,
    });
    Ok(Outcome::checked(report, "max_residual", worst, args.tol))
}

fn verify_cr(args: &CrArgs) -> Result<Outcome, CliError> {
    let seq = args.angles.resolve()?;
    let dom = build_rect(&seq, args.half_height)?;
    let f = observable(&dom, args.fugacity)?;
    let skip_last_column = args.fugacity.is_some_and(|y| y != 1.0);
    let residual = cr_residual(&dom, &f, skip_last_column);
    let report = json!({
        "command": "verify cr",
        "thetas": seq.thetas(),
        "width": seq.len(),
        "half_height": args.half_height,
        "fugacity": args.fugacity,
        "skip_last_column": skip_last_column,
        "tol": args.tol,
        "residual": residual,
        "wall_time_note": WALL_TIME_NOTE,
    });
    Ok(Outcome::checked(report, "residual", residual, args.tol))
}

fn verify_rect_identity(args: &RectIdentityArgs) -> Result<Outcome, CliError> {
    let seq = args.angles.resolve()?;
    let part = partition_on(&build_rect(&seq, args.half_height)?, 1.0, 1.0)?;
    let residual = part.identity_residual();
    let report = json!({
        "command": "verify rect-identity",
        "thetas": seq.thetas(),
        "width": seq.len(),
        "half_height": args.half_height,
        "walks": part.walks,
        "a": part.a,
        "b": part.b,
        "d": part.d,
        "e": part.e,
        "tol": args.tol,
        "residual": residual,
        "wall_time_note": WALL_TIME_NOTE,
    });
    Ok(Outcome::checked(report, "residual", residual, args.tol))
}

fn verify_fugacity_identity(args: &FugacityIdentityArgs) -> Result<Outcome, CliError> {
    let seq = args.angles.resolve()?;
    let rule = check_fugacity_sum_rule(&seq, args.half_height, args.fugacity)?;
    let report = json!({
        "command": "verify fugacity-identity",
        "thetas": seq.thetas(),
        "width": rule.width,
        "half_height": rule.half_height,
        "fugacity": rule.y,
        "a": rule.a,
        "b": rule.b,
        "d": rule.d,
        "e": rule.e,
        "coefficient": rule.coefficient,
        "tol": args.tol,
        "residual": rule.residual,
        "wall_time_note": WALL_TIME_NOTE,
    });
    Ok(Outcome::checked(report, "residual", rule.residual, args.tol))
}

fn partition_rect(args: &PartitionRectArgs) -> Result<Outcome, CliError> {
    let seq = args.angles.resolve()?;
    let part = partition_on(
        &build_rect(&seq, args.half_height)?,
        args.length_weight,
        args.fugacity,
    )?;
    let identity_residual =
        (args.length_weight == 1.0 && args.fugacity == 1.0).then(|| part.identity_residual());
    Ok(Outcome::ok(json!({
        "command": "partition rect",
        "thetas": seq.thetas(),
        "width": part.width,
        "half_height": part.half_height,
        "length_weight": args.length_weight,
        "fugacity": args.fugacity,
        "walks": part.walks,
        "a": part.a,
        "b": part.b,
        "d": part.d,
        "e": part.e,
        "identity_residual": identity_residual,
        "wall_time_note": WALL_TIME_NOTE,
    })))
}

fn partition_strip(args: &PartitionStripArgs) -> Result<Outcome, CliError> {
    let seq = args.angles.resolve()?;
    let rep = strip_partition(&seq, args.fugacity)?;
    let status = match rep.status {
        ConvergenceStatus::Converged { l } => json!({ "converged": true, "height": l }),
        ConvergenceStatus::Diverged { l_max, rel_delta } => json!({
            "converged": false,
            "height_ceiling": l_max,
            "rel_delta": rel_delta,
        }),
    };
    Ok(Outcome::ok(json!({
        "command": "partition strip",
        "thetas": rep.thetas,
        "width": rep.width,
        "fugacity": rep.y,
        "a": rep.a,
        "b": rep.b,
        "d": rep.d,
        "e": rep.e,
        "status": status,
        "identity_residual": rep.identity_residual,
        "growth_rate": rep.lambda,
        "wall_time_note": WALL_TIME_NOTE,
    })))
}

fn two_point(args: &TwoPointArgs) -> Result<Outcome, CliError> {
    let seq = args.angles.resolve()?;
    let value = two_point_alpha(&seq, args.half_height, args.from, args.to, args.fugacity)?;
    Ok(Outcome::ok(json!({
        "command": "two-point",
        "thetas": seq.thetas(),
        "width": seq.len(),
        "half_height": args.half_height,
        "from_row": args.from,
        "to_row": args.to,
        "fugacity": args.fugacity,
        "value": value,
        "wall_time_note": WALL_TIME_NOTE,
    })))
}

fn parse_i64_list(text: &str, flag: &str) -> Result<Vec<i64>, CliError> {
    text.split(',')
        .map(|token| {
            token.trim().parse::<i64>().map_err(|_| {
                CliError::Usage(format!("bad integer '{}' in --{flag}", token.trim()))
            })
        })
        .collect()
}

fn swap_experiment(args: &SwapArgs) -> Result<Outcome, CliError> {
    let seq = args.angles.resolve()?;
    let rows = parse_i64_list(&args.rows, "rows")?;
    let [s1, s2] = rows[..] else {
        return Err(CliError::Usage(format!(
            "--rows needs exactly two entries, got {}",
            rows.len()
        )));
    };
    let heights = parse_i64_list(&args.heights, "heights")?;
    if heights.is_empty() {
        return Err(CliError::Usage("--heights needs at least one entry".into()));
    }
    let exp = column_swap_experiment(&seq, args.column, s1, s2, &heights)?;
    let final_gap = *exp.gaps.last().expect("heights checked nonempty");
    if let Some(path) = &args.csv {
        let rows: Vec<String> = exp
            .heights
            .iter()
            .zip(&exp.original)
            .zip(&exp.swapped)
            .zip(&exp.gaps)
            .map(|(((h, o), s), g)| {
                format!("{h},{},{},{}", csv_float(*o), csv_float(*s), csv_float(*g))
            })
            .collect();
        emit_csv(path, "height,original,swapped,gap", &rows)?;
    }
    Ok(Outcome::ok(json!({
        "command": "swap-experiment",
        "thetas": seq.thetas(),
        "column": exp.column,
        "rows": [exp.rows.0, exp.rows.1],
        "heights": exp.heights,
        "original": exp.original,
        "swapped": exp.swapped,
        "gaps": exp.gaps,
        "final_gap": final_gap,
        "wall_time_note": WALL_TIME_NOTE,
    })))
}

fn triangle(args: &TriangleArgs) -> Result<Outcome, CliError> {
    let tri = tri_partition(args.level)?;
    let residual = tri.identity_residual();
    if let Some(path) = &args.csv {
        let row = format!(
            "{},{},{},{},{}",
            tri.level,
            tri.walks,
            csv_float(tri.a_delta),
            csv_float(tri.d_delta),
            csv_float(residual)
        );
        emit_csv(path, "level,walks,a_delta,d_delta,residual", &[row])?;
    }
    let report = json!({
        "command": "triangle",
        "level": tri.level,
        "side": 2 * tri.level + 1,
        "walks": tri.walks,
        "a_delta": tri.a_delta,
        "d_delta": tri.d_delta,
        "tol": args.tol,
        "residual": residual,
        "wall_time_note": WALL_TIME_NOTE,
    });
    Ok(Outcome::checked(report, "residual", residual, args.tol))
}

fn bridges(args: &BridgesArgs) -> Result<Outcome, CliError> {
    let rep = bridge_decay_report(args.t_max)?;
    if let Some(path) = &args.csv {
        let rows: Vec<String> = rep
            .rows
            .iter()
            .map(|r| {
                format!(
                    "{},{},{},{},{}",
                    r.width,
                    csv_float(r.a),
                    csv_float(r.b),
                    r.triangle_cap.map(csv_float).unwrap_or_default(),
                    csv_float(r.cubic_partial)
                )
            })
            .collect();
        emit_csv(path, "width,a,b,triangle_cap,cubic_partial", &rows)?;
    }
    let rows: Vec<Value> = rep
        .rows
        .iter()
        .map(|r| {
            json!({
                "width": r.width,
                "a": r.a,
                "b": r.b,
                "triangle_cap": r.triangle_cap,
                "cubic_partial": r.cubic_partial,
            })
        })
        .collect();
    Ok(Outcome::ok(json!({
        "command": "bridges",
        "t_max": args.t_max,
        "rows": rows,
        "concatenation": {
            "lhs": rep.concatenation.lhs,
            "rhs_truncated": rep.concatenation.rhs_truncated,
            "dropped_terms": rep.concatenation.dropped_terms,
            "strip_width": rep.concatenation.strip_width,
            "strip_half_height": rep.concatenation.strip_half_height,
        },
        "wall_time_note": WALL_TIME_NOTE,
    })))
}

fn yc(args: &YcArgs) -> Result<Outcome, CliError> {
    if let Some(t_max) = args.convergence {
        let mixed = args.angles.try_resolve()?;
        let rep = yc_convergence_report(mixed.as_ref(), t_max)?;
        if let Some(path) = &args.csv {
            let rows: Vec<String> = rep
                .rows
                .iter()
                .map(|r| format!("{},{},{}", r.width, csv_float(r.y_c), csv_float(r.gap)))
                .collect();
            emit_csv(path, "width,y_c,gap", &rows)?;
        }
        let rows: Vec<Value> = rep
            .rows
            .iter()
            .map(|r| json!({ "width": r.width, "y_c": r.y_c, "gap": r.gap }))
            .collect();
        let mixed = rep.mixed.map(|m| {
            json!({
                "thetas": m.thetas,
                "y_c": m.y_c,
                "uniform_y_c": m.uniform_y_c,
            })
        });
        return Ok(Outcome::ok(json!({
            "command": "yc",
            "mode": "convergence",
            "t_max": t_max,
            "rows": rows,
            "mixed": mixed,
            "wall_time_note": WALL_TIME_NOTE,
        })));
    }
    if args.csv.is_some() {
        return Err(CliError::Usage(
            "--csv is only defined together with --convergence".into(),
        ));
    }
    let seq = args.angles.resolve()?;
    let rep = yc_strip_report(&seq)?;
    let bracket_width = rep.hi - rep.lo;
    let report = json!({
        "command": "yc",
        "mode": "single",
        "thetas": seq.thetas(),
        "width": seq.len(),
        "tol": args.tol,
        "y_c": rep.y_c,
        "lower": rep.lo,
        "upper": rep.hi,
        "bracket_width": bracket_width,
        "growth_rate_at_lower": rep.lambda_lo,
        "growth_rate_at_upper": rep.lambda_hi,
        "wall_time_note": WALL_TIME_NOTE,
    });
    Ok(Outcome::checked(report, "bracket_width", bracket_width, args.tol))
}
