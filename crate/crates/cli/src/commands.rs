use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, ensure, Context, Result};
use qsteer::assemblage::{build_assemblage, steering_figure, Assemblage, MeasurementSet};
use qsteer::factory::{t_state, unsteerable_mixture, werner};
use qsteer::gmodel::{circle_model, great_circle, mix_gmodels, werner_singlet_model, ExtremeGModel, GModelFile, HiddenGrid};
use qsteer::lp::{build_steering_lp, export_lp, min_s_with, SolverRegistry, SteerabilityReport, Verdict};
use qsteer::qubit::{TwoQubitState, Vec3};
use qsteer::sphere::Icosphere;
use rayon::prelude::*;
use serde_json::json;

use crate::output::emit;
use crate::source::{parse_list, parse_triple, state_from_spec, StateArgs};
use crate::{LpArgs, ModelKind};

/// Grids above this level make the LP impractically large.
const MAX_GRID_LEVEL: u32 = 6;
/// Slack allowed in the monotonicity checks of `converge`.
const MONOTONICITY_TOL: f64 = 1e-7;
/// Exit status for a failed solver-integrity check.
const EXIT_INTEGRITY: u8 = 4;

fn grid(level: u32) -> Result<Arc<HiddenGrid>> {
    ensure!(level <= MAX_GRID_LEVEL, "--grid {level} exceeds the supported maximum {MAX_GRID_LEVEL}");
    Ok(Arc::new(HiddenGrid::icosphere(level)))
}

fn measurements(spec: &str) -> Result<MeasurementSet> {
    MeasurementSet::parse(spec).with_context(|| format!("--measurements {spec}"))
}

fn check_solver(name: &str) -> Result<()> {
    SolverRegistry::default().create(name).map(|_| ()).context("--solver")
}

fn solve(state: &TwoQubitState, set: &MeasurementSet, grid: Arc<HiddenGrid>, solver: &str) -> Result<SteerabilityReport> {
    let solver = SolverRegistry::default().create(solver)?;
    Ok(min_s_with(&build_assemblage(state, set), grid, solver.as_ref())?)
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    ensure!(jobs >= 1, "--jobs must be at least 1");
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?)
}

pub fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::UnsteerableForSet => 0,
        Verdict::SteerableForSet => 2,
        Verdict::Inconclusive => 3,
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::UnsteerableForSet => "unsteerable-for-set",
        Verdict::SteerableForSet => "steerable-for-set",
        Verdict::Inconclusive => "inconclusive",
    }
}

pub fn analyze(state: &StateArgs, lp: &LpArgs, out: Option<&Path>) -> Result<u8> {
    let rho = state.load()?;
    let set = measurements(&lp.measurements)?;
    check_solver(&lp.solver)?;
    let report = solve(&rho, &set, grid(lp.grid)?, &lp.solver)?;
    let mut doc = serde_json::to_value(&report)?;
    if let Some(file) = report.lhs_model_file() {
        doc["lhs_model"] = serde_json::to_value(file?)?;
    }
    doc["state"] = json!({ "g": (0..4).map(|i| (0..4).map(|j| rho.g()[(i, j)]).collect::<Vec<_>>()).collect::<Vec<_>>() });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    emit(out, &text)?;
    eprintln!(
        "s_value = {:.10}  verdict = {}  status = {:?}",
        report.s_value,
        verdict_name(report.verdict),
        report.status
    );
    Ok(verdict_code(report.verdict))
}

/// Parameters `start, start + step, ..., <= stop`; empty when `stop < start`.
pub fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = spec
        .split(':')
        .map(|x| x.trim().parse::<f64>().with_context(|| format!("--range: `{x}` is not a number")))
        .collect::<Result<_>>()?;
    let [start, stop, step] = <[f64; 3]>::try_from(parts.as_slice()).map_err(|_| anyhow::anyhow!("--range must be start:stop:step"))?;
    ensure!(step > 0.0 && step.is_finite(), "--range step must be positive");
    if stop < start {
        return Ok(Vec::new());
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect())
}

enum Family {
    Werner,
    Mixture(TwoQubitState),
}

impl Family {
    fn parse(spec: &str) -> Result<Self> {
        if spec == "werner" {
            return Ok(Self::Werner);
        }
        if let Some(t) = spec.strip_prefix("mixture:") {
            let [t1, t2, t3] = parse_triple(t).map_err(anyhow::Error::msg).context("--family")?;
            return Ok(Self::Mixture(t_state(t1, t2, t3).context("--family")?));
        }
        bail!("--family: unknown family `{spec}` (expected `werner` or `mixture:<t1,t2,t3>`)")
    }

    fn state(&self, p: f64) -> Result<TwoQubitState> {
        Ok(match self {
            Self::Werner => werner(p)?,
            Self::Mixture(c) => unsteerable_mixture(p, c)?,
        })
    }
}

pub fn sweep(family: &str, range: &str, lp: &LpArgs, jobs: usize, out: Option<&Path>) -> Result<u8> {
    let family = Family::parse(family)?;
    let params = parse_range(range)?;
    let set = measurements(&lp.measurements)?;
    let grid = grid(lp.grid)?;
    check_solver(&lp.solver)?;
    let states: Vec<TwoQubitState> = params
        .iter()
        .map(|&p| family.state(p).with_context(|| format!("--range value {p}")))
        .collect::<Result<_>>()?;
    let reports: Vec<Result<SteerabilityReport>> = pool(jobs)?.install(|| {
        states
            .par_iter()
            .map(|s| solve(s, &set, grid.clone(), &lp.solver))
            .collect()
    });
    let mut csv = String::from("param,s_value,verdict,residual\n");
    for (p, r) in params.iter().zip(reports) {
        let r = r?;
        let res = &r.residuals;
        let residual = res.primal.max(res.dual).max(res.gap).max(res.complementarity);
        let _ = writeln!(csv, "{p},{},{},{residual:e}", r.s_value, verdict_name(r.verdict));
    }
    emit(out, &csv)?;
    Ok(0)
}

pub fn figure(state: &StateArgs, level: u32, out: Option<&Path>) -> Result<u8> {
    ensure!(level <= MAX_GRID_LEVEL, "--directions {level} exceeds {MAX_GRID_LEVEL}");
    let fig = steering_figure(&state.load()?);
    let mut csv = String::from("dir_x,dir_y,dir_z,x,y,z\n");
    for d in Icosphere::new(level).vertices {
        let p = fig.point(&d);
        let _ = writeln!(csv, "{},{},{},{},{},{}", d.x, d.y, d.z, p.x, p.y, p.z);
    }
    emit(out, &csv)?;
    Ok(0)
}

fn parse_counts<T: std::str::FromStr>(flag: &str, spec: &str) -> Result<Vec<T>> {
    spec.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|_| anyhow::anyhow!("{flag}: `{x}` is not a count")))
        .collect()
}

pub fn converge(
    state: &StateArgs,
    counts: &str,
    levels: &str,
    solver: &str,
    jobs: usize,
    out: Option<&Path>,
) -> Result<u8> {
    let rho = state.load()?;
    let counts: Vec<usize> = parse_counts("--counts", counts)?;
    let mut levels: Vec<u32> = parse_counts("--levels", levels)?;
    levels.sort_unstable();
    levels.dedup();
    check_solver(solver)?;
    let sets = MeasurementSet::nested_fibonacci(&counts).context("--counts")?;
    let grids: Vec<Arc<HiddenGrid>> = levels.iter().map(|&l| grid(l)).collect::<Result<_>>()?;
    let cells: Vec<(usize, usize)> = (0..grids.len()).flat_map(|g| (0..sets.len()).map(move |m| (g, m))).collect();
    let reports: Vec<SteerabilityReport> = pool(jobs)?
        .install(|| {
            cells
                .par_iter()
                .map(|&(g, m)| solve(&rho, &sets[m], grids[g].clone(), solver))
                .collect::<Result<Vec<_>>>()
        })?;
    let labels: Vec<String> = sets.iter().map(|m| m.label().to_string()).collect();
    let table: Vec<Vec<f64>> = (0..grids.len())
        .map(|g| (0..sets.len()).map(|m| reports[g * sets.len() + m].s_value).collect())
        .collect();
    let violations = monotonicity_violations(&levels, &labels, &table);
    if !violations.is_empty() {
        for v in &violations {
            eprintln!("monotonicity violation: {v}");
        }
        return Ok(EXIT_INTEGRITY);
    }

    let mut csv = String::from("level,measurements,count,s_value,verdict\n");
    for (i, &(g, m)) in cells.iter().enumerate() {
        let r = &reports[i];
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            levels[g],
            csv_field(sets[m].label()),
            sets[m].len(),
            r.s_value,
            verdict_name(r.verdict)
        );
    }
    emit(out, &csv)?;
    Ok(0)
}

/// Quotes a CSV field when it holds a separator or a quote.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Breaches of "nondecreasing along nested sets, nonincreasing along finer grids" in a
/// table indexed `[level][set]`, plus cells without an optimum.
pub fn monotonicity_violations(levels: &[u32], labels: &[String], table: &[Vec<f64>]) -> Vec<String> {
    let mut out = Vec::new();
    for (g, row) in table.iter().enumerate() {
        for (m, &s) in row.iter().enumerate() {
            if !s.is_finite() {
                out.push(format!("no optimum at level {} with {}", levels[g], labels[m]));
                continue;
            }
            if m > 0 && s < row[m - 1] - MONOTONICITY_TOL {
                out.push(format!(
                    "level {}: {} gives {s} below {} for {}",
                    levels[g],
                    labels[m],
                    row[m - 1],
                    labels[m - 1]
                ));
            }
            if g > 0 && s > table[g - 1][m] + MONOTONICITY_TOL {
                out.push(format!(
                    "{}: level {} gives {s} above {} at level {}",
                    labels[m],
                    levels[g],
                    table[g - 1][m],
                    levels[g - 1]
                ));
            }
        }
    }
    out
}

pub fn model(kind: ModelKind, radius: f64, ring: usize, spec: &str, level: u32, out: Option<&Path>) -> Result<u8> {
    let set = measurements(spec)?;
    let z = Vec3::z();
    ensure!(ring == 0 || ring >= 3, "--ring needs 0 or at least 3 nodes");
    let g = if ring == 0 { grid(level)? } else { Arc::new(grid(level)?.with_extra_nodes(&great_circle(&z, ring))?) };
    let m = match kind {
        ModelKind::Singlet => werner_singlet_model(g, &set),
        ModelKind::Circle => {
            ensure!(radius > 0.0 && radius <= 0.5, "--radius must lie in (0, 1/2]");
            ensure!(ring >= 3, "the circle model needs --ring of at least 3 nodes");
            let target = build_assemblage(&t_state(-2.0 * radius, -2.0 * radius, 0.0)?, &set);
            circle_model(g, &target, &z, radius)?
        }
    };
    emit(out, &(GModelFile::from_model(&m)?.to_json()? + "\n"))?;
    eprintln!("S = {:.12}", m.s_quantity());
    Ok(0)
}

pub fn mix(models: &[PathBuf], targets: &[String], weights: &str, out: Option<&Path>) -> Result<u8> {
    let weights = parse_list(weights).map_err(anyhow::Error::msg).context("--weights")?;
    ensure!(
        models.len() == targets.len() && models.len() == weights.len(),
        "need one --target and one weight per --model"
    );
    let loaded: Vec<ExtremeGModel> = models
        .iter()
        .map(|p| -> Result<ExtremeGModel> {
            let text = std::fs::read_to_string(p).with_context(|| format!("--model {}", p.display()))?;
            Ok(GModelFile::from_json(&text)
                .and_then(GModelFile::into_model)
                .with_context(|| format!("--model {}", p.display()))?)
        })
        .collect::<Result<_>>()?;
    let states: Vec<TwoQubitState> = targets.iter().map(|t| state_from_spec(t)).collect::<Result<_>>()?;
    let asm: Vec<Assemblage> = states
        .iter()
        .zip(&loaded)
        .map(|(s, m)| build_assemblage(s, m.measurements()))
        .collect();
    let mixed = mix_gmodels(
        &loaded.iter().collect::<Vec<_>>(),
        &weights,
        &asm.iter().collect::<Vec<_>>(),
    )?;
    let target = Assemblage::mix(&asm.iter().collect::<Vec<_>>(), &weights)?;
    let check = mixed.check(&target, f64::INFINITY)?;
    emit(out, &(GModelFile::from_model(&mixed)?.to_json()? + "\n"))?;
    eprintln!(
        "S = {:.12}  max residual against the mixed state = {:.3e}",
        mixed.s_quantity(),
        check.max_residual()
    );
    Ok(0)
}

pub fn export(state: &StateArgs, lp: &LpArgs, out: Option<&Path>) -> Result<u8> {
    let rho = state.load()?;
    let set = measurements(&lp.measurements)?;
    let steering = build_steering_lp(&build_assemblage(&rho, &set), grid(lp.grid)?)?;
    emit(out, &export_lp(steering.program()))?;
    Ok(0)
}
