use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::info;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use super::config::{Experiment, ExperimentConfig, Format, OutputSpec};
use super::presets::figure_preset;
use crate::classical::ClassicalWalker;
use crate::coin::{lyapunov_estimate, phase_portrait, sample_cue, torus_coverage};
use crate::error::{Error, Result};
use crate::matkernel::DftPlan;
use crate::observables::{
    diffusive_time, fgr_fidelity, fidelity_matrix, ks_against_cdf, median_diffusive_time, mp_cdf, mp_density,
    mp_support, page_value, shannon_entropy, variance, von_neumann_entropy,
};
use crate::par::{self, Execution};
use crate::walk::{
    coin_density_with, position_distribution_with, walker_density_with, PositionDistribution, SectorBlocks,
    SectorState, WalkConfig, WalkerBasis,
};

/// Steps between SectorState checkpoints.
pub const CHECKPOINT_EVERY: usize = 500;
/// Points in the Marchenko–Pastur reference curve written next to spectra.
const MP_REFERENCE_POINTS: usize = 201;

#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Write into a non-empty output directory.
    pub force: bool,
    /// Continue from checkpoints left by an interrupted run.
    pub resume: bool,
    /// Overrides `outputs.dir`, which is otherwise taken relative to
    /// `config_dir`.
    pub out_dir: Option<PathBuf>,
    /// Directory that relative coin and output paths are resolved against.
    pub config_dir: PathBuf,
    pub exec: Execution,
    /// Abort with [`Error::Interrupted`] right after the checkpoint at this
    /// step, leaving the checkpoint behind.
    pub interrupt_after: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            force: false,
            resume: false,
            out_dir: None,
            config_dir: PathBuf::from("."),
            exec: Execution::default(),
            interrupt_after: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    /// Path relative to the output directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    /// The preset expanded from a `figure` experiment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolved: Option<ExperimentConfig>,
    pub library_version: String,
    pub wall_time_seconds: f64,
    pub seeds: Vec<u64>,
    pub outputs: Vec<OutputRecord>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

/// Full round-trip decimal: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

struct Sink {
    root: PathBuf,
    formats: OutputSpec,
    records: Vec<OutputRecord>,
}

impl Sink {
    fn write(&mut self, rel: &Path, contents: &[u8]) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        let rel_str = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
        self.records.push(OutputRecord {
            path: rel_str,
            sha256: hex::encode(Sha256::digest(contents)),
            bytes: contents.len() as u64,
        });
        Ok(())
    }

    fn csv(&mut self, dir: &Path, name: &str, header: &str, rows: impl IntoIterator<Item = String>) -> Result<()> {
        if !self.formats.wants(Format::Csv) {
            return Ok(());
        }
        let mut text = String::from(header);
        text.push('\n');
        for row in rows {
            text.push_str(&row);
            text.push('\n');
        }
        self.write(&dir.join(name), text.as_bytes())
    }

    fn json(&mut self, dir: &Path, name: &str, value: &serde_json::Value) -> Result<()> {
        if !self.formats.wants(Format::Json) {
            return Ok(());
        }
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(&dir.join(name), text.as_bytes())
    }
}

fn dir_is_nonempty(path: &Path) -> bool {
    fs::read_dir(path).map(|mut d| d.next().is_some()).unwrap_or(false)
}

/// Executes a validated config and writes its outputs; the manifest is
/// written last.
pub fn run(config: &ExperimentConfig, opts: &RunOptions) -> Result<RunManifest> {
    config.validate()?;
    let started = Instant::now();
    let resolved = match &config.experiment {
        Experiment::Figure { name } => {
            let mut preset = figure_preset(name)?;
            preset.outputs = config.outputs.clone();
            Some(preset)
        }
        _ => None,
    };
    let effective = resolved.as_ref().unwrap_or(config);
    let root = opts
        .out_dir
        .clone()
        .or_else(|| config.outputs.dir.as_ref().map(|d| opts.config_dir.join(d)))
        .ok_or_else(|| Error::InvalidConfig { path: "outputs.dir".into(), message: "missing".into() })?;
    if dir_is_nonempty(&root) {
        if !(opts.force || opts.resume) {
            return Err(Error::OutputExists(root));
        }
        let stale = root.join(MANIFEST_FILE);
        if stale.exists() {
            fs::remove_file(&stale).map_err(|e| Error::io(&stale, e))?;
        }
    }
    fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;

    let mut sink = Sink { root: root.clone(), formats: config.outputs.clone(), records: Vec::new() };
    let mut seeds = Vec::new();
    for (name, job) in effective.jobs()? {
        let sub = name.map(PathBuf::from).unwrap_or_default();
        if sub.as_os_str().is_empty() {
            info!("running {} job", job.experiment.kind());
        } else {
            info!("running {} job `{}`", job.experiment.kind(), sub.display());
        }
        for s in job.seeds() {
            if !seeds.contains(&s) {
                seeds.push(s);
            }
        }
        run_job(&job, &sub, opts, &mut sink)?;
    }
    let checkpoints = root.join(CHECKPOINT_DIR);
    if checkpoints.exists() {
        fs::remove_dir_all(&checkpoints).map_err(|e| Error::io(&checkpoints, e))?;
    }

    let manifest = RunManifest {
        config: config.clone(),
        resolved,
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_seconds: started.elapsed().as_secs_f64(),
        seeds,
        outputs: sink.records,
    };
    let path = root.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

pub fn read_manifest(dir: impl AsRef<Path>) -> Result<RunManifest> {
    let path = dir.as_ref().join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn run_job(job: &ExperimentConfig, sub: &Path, opts: &RunOptions, sink: &mut Sink) -> Result<()> {
    match &job.experiment {
        Experiment::Portrait { n_orbits, n_steps, seed, cells } => {
            run_portrait(job, *n_orbits, *n_steps, *seed, *cells, sub, sink)
        }
        Experiment::TdSweep { m_values, n_offset, seeds } => {
            run_td_sweep(job, m_values, *n_offset, seeds, sub, opts, sink)
        }
        Experiment::Classical {} => run_classical(job, sub, sink),
        Experiment::Figure { .. } => unreachable!("figure presets are expanded before running"),
        _ => run_walk(job, sub, opts, sink),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
struct FidelityRow {
    t: usize,
    delta: i64,
    re: f64,
    im: f64,
    folded_delta: i64,
    folded_abs: f64,
    sector_average_abs: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
struct EntropyRow {
    t: usize,
    s_coin: f64,
    s_walker: f64,
    s_classical: f64,
}

/// Everything a quantum-walk job accumulates; stored with checkpoints.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
struct WalkSeries {
    distributions: Vec<(usize, Vec<f64>)>,
    variance: Vec<(usize, f64)>,
    fidelity: Vec<FidelityRow>,
    entropy: Vec<EntropyRow>,
    spectra: Vec<(usize, Vec<f64>)>,
}

const CHECKPOINT_DIR: &str = "checkpoints";

fn checkpoint_paths(root: &Path, sub: &Path) -> (PathBuf, PathBuf) {
    let stem = if sub.as_os_str().is_empty() { "main".to_string() } else { sub.to_string_lossy().replace('/', "_") };
    let dir = root.join(CHECKPOINT_DIR);
    (dir.join(format!("{stem}.sec")), dir.join(format!("{stem}.json")))
}

fn fold_delta(delta: i64, n: usize) -> i64 {
    let n = n as i64;
    let d = delta.rem_euclid(n);
    d.min(n - d)
}

struct Sampler<'a> {
    job: &'a ExperimentConfig,
    walk: &'a WalkConfig,
    plan: DftPlan,
    exec: Execution,
    classical: Option<ClassicalWalker>,
}

impl Sampler<'_> {
    fn wants_variance(&self) -> bool {
        matches!(self.job.experiment, Experiment::Walk {})
    }

    fn distribution(&self, state: &SectorState) -> Result<PositionDistribution> {
        position_distribution_with(state, &self.plan)
    }

    fn after_step(&mut self, state: &SectorState, series: &mut WalkSeries) -> Result<()> {
        if let Some(c) = self.classical.as_mut() {
            while c.t() < state.t() {
                c.step();
            }
        }
        if self.wants_variance() {
            series.variance.push((state.t(), variance(&self.distribution(state)?)));
        }
        Ok(())
    }

    fn sample(&mut self, state: &SectorState, series: &mut WalkSeries) -> Result<()> {
        let t = state.t();
        let n = self.walk.n_sites();
        match &self.job.experiment {
            Experiment::Walk {} => series.distributions.push((t, self.distribution(state)?.probs)),
            Experiment::Fidelity { deltas } => {
                let f = fidelity_matrix(state);
                for &delta in deltas {
                    let z = f.echo(0, delta);
                    let folded = fold_delta(delta, n);
                    series.fidelity.push(FidelityRow {
                        t,
                        delta,
                        re: z.re,
                        im: z.im,
                        folded_delta: folded,
                        folded_abs: f.echo(0, folded).norm(),
                        sector_average_abs: f.sector_average(delta).norm(),
                    });
                }
            }
            Experiment::Entropy { .. } => {
                let s_coin = von_neumann_entropy(&coin_density_with(state, self.exec))?;
                let s_walker = von_neumann_entropy(&walker_density_with(state, WalkerBasis::Momentum, self.exec))?;
                let classical = self.classical.as_ref().expect("entropy runs track the classical walker");
                let s_classical = shannon_entropy(&classical.distribution().to_position_distribution());
                series.entropy.push(EntropyRow { t, s_coin, s_walker, s_classical });
            }
            Experiment::Spectra { window: [a, b] } => {
                if (*a..=*b).contains(&t) {
                    let rho = if self.walk.coin_dim() <= n {
                        coin_density_with(state, self.exec)
                    } else {
                        walker_density_with(state, WalkerBasis::Momentum, self.exec)
                    };
                    series.spectra.push((t, rho.eigenvalues()?));
                }
            }
            _ => unreachable!(),
        }
        Ok(())
    }
}

fn run_walk(job: &ExperimentConfig, sub: &Path, opts: &RunOptions, sink: &mut Sink) -> Result<()> {
    let walk = job.walk_config(&opts.config_dir)?;
    let run = job.run.clone().expect("validated");
    let blocks = SectorBlocks::new(&walk);
    let n = walk.n_sites();
    let m = walk.coin_dim();
    let (state_path, series_path) = checkpoint_paths(&sink.root, sub);

    let mut sampler = Sampler {
        job,
        walk: &walk,
        plan: DftPlan::new(n),
        exec: opts.exec,
        classical: matches!(job.experiment, Experiment::Entropy { .. }).then(|| ClassicalWalker::new(n)).transpose()?,
    };
    let resumed = if opts.resume && state_path.exists() && series_path.exists() {
        let state = SectorState::read_checkpoint(&state_path, walk.initial_site())?;
        let text = fs::read_to_string(&series_path).map_err(|e| Error::io(&series_path, e))?;
        info!("resuming `{}` from t = {}", sub.display(), state.t());
        Some((state, serde_json::from_str::<WalkSeries>(&text)?))
    } else {
        None
    };
    let (mut state, mut series) = match resumed {
        Some(r) => r,
        None => {
            let state = SectorState::initial(&walk);
            let mut series = WalkSeries::default();
            sampler.after_step(&state, &mut series)?;
            sampler.sample(&state, &mut series)?;
            (state, series)
        }
    };
    if let Some(c) = sampler.classical.as_mut() {
        while c.t() < state.t() {
            c.step();
        }
    }
    while state.t() < run.t_max {
        state.advance(&blocks, 1, opts.exec);
        let t = state.t();
        sampler.after_step(&state, &mut series)?;
        if t % run.sample_every == 0 || t == run.t_max {
            sampler.sample(&state, &mut series)?;
        }
        if t % CHECKPOINT_EVERY == 0 && t < run.t_max {
            if let Some(dir) = state_path.parent() {
                fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            state.write_checkpoint(&state_path)?;
            let text = serde_json::to_string(&series)?;
            fs::write(&series_path, text).map_err(|e| Error::io(&series_path, e))?;
            info!("checkpoint `{}` at t = {t}", sub.display());
            if opts.interrupt_after == Some(t) {
                return Err(Error::Interrupted(t));
            }
        }
    }

    let origin = walk.initial_site();
    match &job.experiment {
        Experiment::Walk {} => {
            write_distributions(sink, sub, origin, &series.distributions)?;
            write_variance(sink, sub, &series.variance)?;
        }
        Experiment::Fidelity { .. } => {
            let rows = series.fidelity.iter().map(|r| {
                let (cosine, exponential) = fgr_fidelity(r.folded_delta, n, r.t);
                format!(
                    "{},{},{},{},{},{},{},{},{},{}",
                    r.t,
                    r.delta,
                    fmt_f64(r.re),
                    fmt_f64(r.im),
                    fmt_f64(r.re.hypot(r.im)),
                    r.folded_delta,
                    fmt_f64(r.folded_abs),
                    fmt_f64(r.sector_average_abs),
                    fmt_f64(cosine),
                    fmt_f64(exponential)
                )
            });
            sink.csv(
                sub,
                "fidelity.csv",
                "t,delta,re,im,abs,folded_delta,folded_abs,sector_average_abs,fgr_cosine,fgr_exponential",
                rows.collect::<Vec<_>>(),
            )?;
        }
        Experiment::Entropy { saturation_window } => {
            let rows = series
                .entropy
                .iter()
                .map(|r| format!("{},{},{},{}", r.t, fmt_f64(r.s_coin), fmt_f64(r.s_walker), fmt_f64(r.s_classical)));
            sink.csv(sub, "entropy.csv", "t,s_quantum,s_walker,s_classical", rows.collect::<Vec<_>>())?;
            let gap = series.entropy.iter().map(|r| (r.s_coin - r.s_walker).abs()).fold(0.0, f64::max);
            let saturation = saturation_window.map(|[a, b]| {
                let vals: Vec<f64> =
                    series.entropy.iter().filter(|r| (a..=b).contains(&r.t)).map(|r| r.s_coin).collect();
                json!({ "window": [a, b], "mean": vals.iter().sum::<f64>() / vals.len().max(1) as f64 })
            });
            sink.json(
                sub,
                "entropy.json",
                &json!({
                    "m": m,
                    "n": n,
                    "page_value": page_value(m.min(n), m.max(n)),
                    "entropy_bound": (m.min(n) as f64).ln(),
                    "max_subsystem_gap": gap,
                    "saturation": saturation,
                }),
            )?;
        }
        Experiment::Spectra { window } => {
            let (n1, n2) = (m.min(n), m.max(n));
            let mut pool: Vec<f64> = series.spectra.iter().flat_map(|(_, v)| v.iter().copied()).collect();
            pool.sort_by(f64::total_cmp);
            sink.csv(sub, "spectrum.csv", "eigenvalue", pool.iter().map(|&x| fmt_f64(x)).collect::<Vec<_>>())?;
            let (lo, hi) = mp_support(n1, n2);
            let reference = (0..MP_REFERENCE_POINTS).map(|i| {
                let x = lo + (hi - lo) * i as f64 / (MP_REFERENCE_POINTS - 1) as f64;
                format!("{},{}", fmt_f64(x), fmt_f64(mp_density(x, n1, n2)))
            });
            sink.csv(sub, "mp_reference.csv", "lambda,density", reference.collect::<Vec<_>>())?;
            sink.json(
                sub,
                "spectrum.json",
                &json!({
                    "window": window,
                    "sample_every": run.sample_every,
                    "snapshots": series.spectra.len(),
                    "m": m,
                    "n": n,
                    "subsystem": if m <= n { "coin" } else { "walker" },
                    "n1": n1,
                    "n2": n2,
                    "mp_support": [lo, hi],
                    "ks_distance": ks_against_cdf(&pool, |x| mp_cdf(x, n1, n2)),
                }),
            )?;
        }
        _ => unreachable!(),
    }
    Ok(())
}

fn write_distributions(sink: &mut Sink, sub: &Path, origin: usize, rows: &[(usize, Vec<f64>)]) -> Result<()> {
    let mut lines = Vec::new();
    for (t, probs) in rows {
        let dist = PositionDistribution { t: *t, origin, probs: probs.clone() };
        for (label, p) in dist.centered() {
            lines.push(format!("{t},{label},{}", fmt_f64(p)));
        }
    }
    sink.csv(sub, "p_nt.csv", "t,n,p", lines)
}

fn write_variance(sink: &mut Sink, sub: &Path, rows: &[(usize, f64)]) -> Result<()> {
    sink.csv(
        sub,
        "variance.csv",
        "t,variance",
        rows.iter().map(|(t, v)| format!("{t},{}", fmt_f64(*v))).collect::<Vec<_>>(),
    )
}

fn run_classical(job: &ExperimentConfig, sub: &Path, sink: &mut Sink) -> Result<()> {
    let n = job.lattice.as_ref().expect("validated").n;
    let run = job.run.clone().expect("validated");
    let mut walker = ClassicalWalker::new(n)?;
    let mut distributions = Vec::new();
    let mut variances = Vec::new();
    let mut entropies = Vec::new();
    loop {
        let t = walker.t();
        let dist = walker.distribution().to_position_distribution();
        variances.push((t, variance(&dist)));
        if t % run.sample_every == 0 || t == run.t_max {
            entropies.push(format!("{t},{}", fmt_f64(shannon_entropy(&dist))));
            distributions.push((t, dist.probs));
        }
        if t == run.t_max {
            break;
        }
        walker.step();
    }
    write_distributions(sink, sub, 0, &distributions)?;
    write_variance(sink, sub, &variances)?;
    sink.csv(sub, "entropy.csv", "t,s_classical", entropies)
}

fn run_portrait(
    job: &ExperimentConfig,
    n_orbits: usize,
    n_steps: usize,
    seed: u64,
    cells: usize,
    sub: &Path,
    sink: &mut Sink,
) -> Result<()> {
    let params = job.coin.as_ref().expect("validated").harper_params()?;
    let orbits = phase_portrait(params, n_orbits, n_steps, seed);
    let mut lines = Vec::with_capacity(n_orbits * n_steps);
    for orbit in &orbits {
        for (step, pt) in orbit.points.iter().enumerate() {
            lines.push(format!("{},{step},{},{}", orbit.id, fmt_f64(pt.q), fmt_f64(pt.p)));
        }
    }
    sink.csv(sub, "portrait.csv", "orbit,step,q,p", lines)?;
    let lyapunov = lyapunov_estimate(params, orbits[0].points[0], n_steps.max(LYAPUNOV_MIN_STEPS))?;
    sink.json(
        sub,
        "portrait.json",
        &json!({
            "g": params.g(),
            "tau": params.tau(),
            "n_orbits": n_orbits,
            "n_steps": n_steps,
            "seed": seed,
            "cells": cells,
            "coverage": torus_coverage(&orbits, cells),
            "lyapunov": lyapunov,
        }),
    )
}

const LYAPUNOV_MIN_STEPS: usize = 10_000;

/// Variance series of a CUE walk started at site 0 in coin state 0.
pub fn cue_variance_series(m: usize, n: usize, seed: u64, t_max: usize, exec: Execution) -> Result<Vec<(usize, f64)>> {
    let walk = WalkConfig::new(sample_cue(m, seed)?, n)?;
    let blocks = SectorBlocks::new(&walk);
    let plan = DftPlan::new(n);
    let mut state = SectorState::initial(&walk);
    let mut out = vec![(0, 0.0)];
    for _ in 0..t_max {
        state.advance(&blocks, 1, exec);
        out.push((state.t(), variance(&position_distribution_with(&state, &plan)?)));
    }
    Ok(out)
}

fn run_td_sweep(
    job: &ExperimentConfig,
    m_values: &[usize],
    n_offset: usize,
    seeds: &[u64],
    sub: &Path,
    opts: &RunOptions,
    sink: &mut Sink,
) -> Result<()> {
    let t_max = job.run.as_ref().expect("validated").t_max;
    let pairs: Vec<(usize, u64)> = m_values.iter().flat_map(|&m| seeds.iter().map(move |&s| (m, s))).collect();
    let results = par::map_slice(opts.exec, &pairs, |&(m, seed)| {
        cue_variance_series(m, m + n_offset, seed, t_max, Execution::Sequential)
    });
    let mut td_lines = Vec::new();
    let mut var_lines = Vec::new();
    let mut per_m: Vec<(usize, Vec<Option<usize>>)> = m_values.iter().map(|&m| (m, Vec::new())).collect();
    for (&(m, seed), series) in pairs.iter().zip(results) {
        let series = series?;
        let td = diffusive_time(&series);
        td_lines.push(format!(
            "{m},{},{seed},{}",
            m + n_offset,
            td.map_or("not_reached".to_string(), |t| t.to_string())
        ));
        for (t, v) in &series {
            var_lines.push(format!("{m},{seed},{t},{}", fmt_f64(*v)));
        }
        per_m.iter_mut().find(|(mm, _)| *mm == m).expect("listed").1.push(td);
    }
    sink.csv(sub, "td.csv", "m,n,seed,t_d", td_lines)?;
    sink.csv(sub, "td_variance.csv", "m,seed,t,variance", var_lines)?;
    let summary: Vec<String> = per_m
        .iter()
        .map(|(m, tds)| {
            let median = median_diffusive_time(tds).map_or("not_reached".to_string(), fmt_f64);
            format!("{m},{},{median},{}", m + n_offset, tds.iter().filter(|t| t.is_some()).count())
        })
        .collect();
    sink.csv(sub, "td_summary.csv", "m,n,median_t_d,reached", summary)
}
