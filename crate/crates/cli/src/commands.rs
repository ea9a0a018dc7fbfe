//! The four subcommands. Each writes its artefacts into the output directory
//! and reports whether its built-in checks passed.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use fracrate_core::energies::{
    decompose_rate, dirichlet, gagliardo_fourier, limit_functional, write_report, EnergyRow, Method,
};
use fracrate_core::fields::sample;
use fracrate_core::flows::{convergence_study, dissipation_audit, evolve, export_trajectory, FlowSpec, Trajectory};
use fracrate_core::fmtnum::sig12;
use fracrate_core::operators::OperatorSpec;
use fracrate_core::symbols::{check_m_bounds, GridSymbols, Order, SymbolTable};
use fracrate_core::verify::{resolve, run_suite, BOUND_TOLERANCE, CHECKS, DISSIPATION_TOLERANCE, IDENTITY_TOLERANCE, REALSPACE_TOLERANCE};
use fracrate_core::Error;

use crate::config::{default_xi, Command, Format, RunConfig, DEFAULT_HORIZON, DEFAULT_SAMPLE_TIMES};
use crate::Failure;

/// Energy may rise by at most this much (relative) between samples.
const MONOTONE_SLACK: f64 = 1e-10;

pub struct Outcome {
    pub passed: bool,
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
}

/// Invalid parameters surface as configuration errors, everything else as
/// numerical failures.
pub fn classify(e: Error) -> Failure {
    match e {
        Error::InvalidInput(_) | Error::Parse(_) | Error::PrecisionGuard { .. } | Error::CostGuard(_) => {
            Failure::Config(e.to_string())
        }
        other => Failure::Numerical(other.to_string()),
    }
}

pub fn run(c: &RunConfig) -> Result<Outcome, Failure> {
    std::fs::create_dir_all(&c.output_dir).map_err(io(&c.output_dir))?;
    let mut outcome = match &c.command {
        Command::Symbols { xi } => symbols(c, xi.clone().unwrap_or_else(default_xi)),
        Command::Energies { realspace } => energies(c, *realspace),
        Command::Flow { horizon, sample_times, export_trajectories } => {
            let horizon = horizon.unwrap_or(DEFAULT_HORIZON);
            let times = sample_times.clone().unwrap_or_else(|| DEFAULT_SAMPLE_TIMES.iter().map(|t| t * horizon).collect());
            flow(c, horizon, &times, *export_trajectories)
        }
        Command::Verify { only } => verify(c, only.as_deref()),
    }?;
    let echo = c.output_dir.join("config.json");
    write_json(&echo, c)?;
    outcome.files.push(echo);
    Ok(outcome)
}

fn symbols(c: &RunConfig, xi: Vec<f64>) -> Result<Outcome, Failure> {
    let dim = c.grid.dim;
    let mut files = Vec::new();
    let mut summary = Vec::new();
    let orders = c.s_values.iter().map(|&s| Order::Fractional(s)).chain([Order::Limit]);
    for order in orders {
        let table = SymbolTable::build(dim, order, &xi, &c.quadrature).map_err(classify)?;
        let stem = match order {
            Order::Fractional(s) => format!("symbols_N{dim}_s{s}"),
            Order::Limit => format!("symbols_N{dim}_LIMIT"),
        };
        let path = match c.format {
            Format::Csv => {
                let path = c.output_dir.join(format!("{stem}.csv"));
                table.write_csv(create(&path)?).map_err(classify)?;
                path
            }
            Format::Json => {
                let path = c.output_dir.join(format!("{stem}.json"));
                write_json(&path, &table)?;
                path
            }
        };
        files.push(path);
    }
    // The bounds are stated for ξ ≠ 0; at the origin both sides vanish.
    let radii: Vec<f64> = xi.iter().copied().filter(|&x| x > 0.0).collect();
    let bounds = if radii.is_empty() {
        None
    } else {
        Some(check_m_bounds(dim, &radii, BOUND_TOLERANCE, &c.quadrature).map_err(classify)?)
    };
    let passed = bounds.as_ref().map_or(true, |b| b.all_hold());
    let path = c.output_dir.join(format!("bounds_N{dim}.json"));
    write_json(&path, &BoundsFile { dim, all_hold: passed, report: bounds.as_ref() })?;
    files.push(path);
    let failing = bounds.as_ref().map_or(0, |b| b.rows.iter().filter(|r| !r.holds).count());
    summary.push(format!("N={dim}: {} radii, {} orders, {failing} bound violations", xi.len(), c.s_values.len() + 1));
    Ok(Outcome { passed, files, summary })
}

#[derive(Serialize)]
struct BoundsFile<'a> {
    dim: usize,
    all_hold: bool,
    report: Option<&'a fracrate_core::symbols::BoundsReport>,
}

fn energies(c: &RunConfig, realspace: bool) -> Result<Outcome, Failure> {
    if realspace && c.grid.dim != 1 {
        return Err(Failure::Config("the real-space path is one-dimensional".into()));
    }
    let bank = GridSymbols::new(c.grid, c.quadrature).map_err(classify)?;
    let u = sample(&c.grid, &c.profile).map_err(classify)?;
    let label = c.profile.label();
    let g1 = dirichlet(&u, &bank).map_err(classify)?;
    let mut methods = vec![Method::Fourier];
    if realspace {
        methods.push(Method::RealSpace);
    }
    let mut rows = Vec::new();
    for &method in &methods {
        for &s in &c.s_values {
            rows.push(EnergyRow {
                profile: label.clone(),
                dim: c.grid.dim,
                s: Some(s),
                breakdown: decompose_rate(&u, s, &bank, method).map_err(classify)?,
                g1,
                gs: Some(gagliardo_fourier(&u, s, &bank).map_err(classify)?),
            });
        }
        rows.push(EnergyRow {
            profile: label.clone(),
            dim: c.grid.dim,
            s: None,
            breakdown: limit_functional(&u, &bank, method).map_err(classify)?,
            g1,
            gs: None,
        });
    }
    let mut worst = 0.0f64;
    let mut passed = true;
    for r in &rows {
        let b = &r.breakdown;
        let scale = b.total.abs().max(b.a_term.abs() + b.b_term.abs() + b.j_term.abs()).max(f64::MIN_POSITIVE);
        let relative = b.identity_residual() / scale;
        let tolerance = match b.method {
            Method::Fourier => IDENTITY_TOLERANCE,
            Method::RealSpace => REALSPACE_TOLERANCE,
        };
        worst = worst.max(relative);
        passed &= relative <= tolerance;
    }
    let path = match c.format {
        Format::Csv => {
            let path = c.output_dir.join("energies.csv");
            write_report(&rows, create(&path)?).map_err(classify)?;
            path
        }
        Format::Json => {
            let path = c.output_dir.join("energies.json");
            write_json(&path, &rows)?;
            path
        }
    };
    let summary = vec![format!("{label}: {} rows, worst relative decomposition residual {}", rows.len(), sig12(worst))];
    Ok(Outcome { passed, files: vec![path], summary })
}

fn flow(c: &RunConfig, horizon: f64, times: &[f64], export: bool) -> Result<Outcome, Failure> {
    let bank = GridSymbols::new(c.grid, c.quadrature).map_err(classify)?;
    let u0 = sample(&c.grid, &c.profile).map_err(classify)?;
    let table = convergence_study(&u0, &c.s_values, horizon, times, &bank).map_err(classify)?;
    let mut files = Vec::new();
    let path = match c.format {
        Format::Csv => {
            let path = c.output_dir.join("convergence.csv");
            table.write_csv(create(&path)?).map_err(classify)?;
            path
        }
        Format::Json => {
            let path = c.output_dir.join("convergence.json");
            write_json(&path, &table)?;
            path
        }
    };
    files.push(path);

    let mut flows: Vec<(String, Trajectory)> = Vec::new();
    let limit = FlowSpec::new(OperatorSpec::LimitOperator, horizon, times.to_vec()).map_err(classify)?;
    flows.push(("limit".into(), evolve(&limit, &u0, &bank).map_err(classify)?));
    for &s in &c.s_values {
        let spec = FlowSpec::new(OperatorSpec::RateOperator(s), horizon, times.to_vec()).map_err(classify)?;
        flows.push((format!("s{s}"), evolve(&spec, &u0, &bank).map_err(classify)?));
    }

    let path = c.output_dir.join("dissipation.csv");
    let mut out = create(&path)?;
    let w = |r: std::io::Result<()>| r.map_err(io(&path));
    w(writeln!(out, "flow,t0,t1,energy_change,dissipated,residual,relative_residual"))?;
    let mut passed = true;
    let mut worst = 0.0f64;
    for (name, traj) in &flows {
        for d in dissipation_audit(traj) {
            w(writeln!(
                out,
                "{name},{},{},{},{},{},{}",
                sig12(d.t0),
                sig12(d.t1),
                sig12(d.energy_change),
                sig12(d.dissipated),
                sig12(d.residual),
                sig12(d.relative_residual)
            ))?;
            worst = worst.max(d.relative_residual);
            passed &= d.relative_residual <= DISSIPATION_TOLERANCE;
        }
        let slack = MONOTONE_SLACK * (1.0 + traj.energies[0].abs());
        passed &= traj.energies.windows(2).all(|e| e[1] <= e[0] + slack);
    }
    w(out.flush())?;
    files.push(path);

    if export {
        for (name, traj) in &flows {
            let dir = c.output_dir.join("trajectories").join(name);
            export_trajectory(traj, &dir).map_err(classify)?;
            files.push(dir);
        }
    }

    let mut summary: Vec<String> = table
        .rows
        .iter()
        .map(|r| format!("s={}: sup L2 distance {}, H1 seminorm {}", r.s, sig12(r.sup_l2), sig12(r.h1_seminorm_sq)))
        .collect();
    summary.push(format!("worst relative dissipation residual {}", sig12(worst)));
    Ok(Outcome { passed, files, summary })
}

fn verify(c: &RunConfig, only: Option<&[String]>) -> Result<Outcome, Failure> {
    let ids: Vec<usize> = match only {
        None => CHECKS.iter().map(|c| c.0).collect(),
        Some(sel) => sel
            .iter()
            .map(|s| resolve(s).ok_or_else(|| Failure::Config(format!("unknown check '{s}'"))))
            .collect::<Result<_, _>>()?,
    };
    let manifest = run_suite(&ids, &c.quadrature).map_err(classify)?;
    let mut files = Vec::new();
    let path = c.output_dir.join("manifest.json");
    write_json(&path, &manifest)?;
    files.push(path);
    if c.format == Format::Csv {
        let path = c.output_dir.join("checks.csv");
        let mut out = create(&path)?;
        let w = |r: std::io::Result<()>| r.map_err(io(&path));
        w(writeln!(out, "id,name,measurement,value,comparison,limit,passed"))?;
        for check in &manifest.checks {
            for m in &check.measurements {
                w(writeln!(
                    out,
                    "{},{},\"{}\",{},{},{},{}",
                    check.id,
                    check.name,
                    m.label.replace('"', "'"),
                    sig12(m.value),
                    m.comparison.symbol(),
                    sig12(m.limit),
                    m.passed
                ))?;
            }
        }
        w(out.flush())?;
        files.push(path);
    }
    let summary = manifest
        .checks
        .iter()
        .map(|r| format!("[{}] {:>2} {:<26} {:>7.2}s", if r.passed { "PASS" } else { "FAIL" }, r.id, r.name, r.seconds))
        .collect();
    Ok(Outcome { passed: manifest.all_passed, files, summary })
}

fn io(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::Numerical(format!("{}: {e}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(io(path))
}

/// Pretty JSON with every float rounded to twelve significant digits.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut v = serde_json::to_value(value).map_err(|e| Failure::Numerical(e.to_string()))?;
    round_floats(&mut v);
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, &v).map_err(|e| Failure::Numerical(e.to_string()))?;
    writeln!(out).and_then(|_| out.flush()).map_err(io(path))
}

fn round_floats(v: &mut serde_json::Value) {
    use serde_json::Value;
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            // sig12 always parses back; non-finite values never reach JSON.
            if let Some(r) = sig12(x).parse::<f64>().ok().and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}
