//! Subcommand implementations behind the `spc` binary. Each command reads
//! its section of the [`RunConfig`], writes its artifacts and returns a
//! one-line summary.

use std::path::Path;

use log::info;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::artifacts::{config_hash, ArtifactWriter};
use crate::config::{PinKind, RunConfig, ScalingMode};
use crate::error::{Result, SpcError};
use crate::evolution::{
    box_normalized_phi, decay_time, outgoing_spectrum, propagate, static_decay_with_profile, EvolutionResult,
    Spectrum, StaticDecay,
};
use crate::numerics::linspace;
use crate::scattering::{
    fit_constants, numerator_constant, resonance_k_grid, scan_resonance, ConstantPin, ResonanceProfile,
};
use crate::statics::{critical_at, find_critical_coupling, track_eigenvalue, CriticalData};
use crate::studies::{
    scaling_study, short_time_study, spectrum_dichotomy, static_scaling_study, with_jobs, RunRecord, StudyOutcome,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Critical,
    Track,
    Resonance,
    Fit,
    Evolve,
    StaticDecay,
    ShortTime,
    Scaling,
    SpectrumCompare,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Critical,
        Command::Track,
        Command::Resonance,
        Command::Fit,
        Command::Evolve,
        Command::StaticDecay,
        Command::ShortTime,
        Command::Scaling,
        Command::SpectrumCompare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Critical => "critical",
            Command::Track => "track",
            Command::Resonance => "resonance",
            Command::Fit => "fit",
            Command::Evolve => "evolve",
            Command::StaticDecay => "static-decay",
            Command::ShortTime => "short-time",
            Command::Scaling => "scaling",
            Command::SpectrumCompare => "spectrum-compare",
        }
    }

    pub fn parse(name: &str) -> Option<Command> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }
}

const S_SURVIVAL: [&str; 2] = ["s", "survival"];
const K_WEIGHT: [&str; 2] = ["k", "weight"];
const PROFILE: [&str; 3] = ["sigma", "k", "phi_out_sq"];

struct Context<'a> {
    cfg: &'a RunConfig,
    out: ArtifactWriter,
}

impl Context<'_> {
    /// Critical data for the configured model; "auto" runs the search and
    /// records the result in `critical.json`.
    fn critical(&mut self) -> Result<CriticalData> {
        let grid = self.cfg.radial_grid()?;
        let template = self.cfg.template_model();
        let critical = if self.cfg.lambda_is_auto() {
            find_critical_coupling(&template, &grid, self.cfg.model.search)?
        } else {
            critical_at(&template, &grid)?
        };
        self.out.log(&format!("lambda_c = {}", critical.lambda_c))?;
        let mut v = serde_json::to_value(critical.summary()).map_err(|e| SpcError::Usage(e.to_string()))?;
        v["lambda_c_source"] = json!(if self.cfg.lambda_is_auto() { "auto" } else { "config" });
        v["uncertainty"] = json!(critical.uncertainty);
        self.out.json("critical.json", &v)?;
        Ok(critical)
    }

    fn evolution_csv(&mut self, name: &str, run: &EvolutionResult) -> Result<()> {
        let rows: Vec<Vec<f64>> = run.times.iter().zip(&run.survival).map(|(&s, &p)| vec![s, p]).collect();
        self.out.csv(name, &S_SURVIVAL, &rows)
    }

    fn spectrum_csv(&mut self, name: &str, spectrum: &Spectrum) -> Result<()> {
        let rows: Vec<Vec<f64>> = spectrum.samples.iter().map(|s| vec![s.k, s.weight]).collect();
        self.out.csv(name, &K_WEIGHT, &rows)
    }

    fn profile_csv(&mut self, name: &str, profiles: &[ResonanceProfile]) -> Result<()> {
        let rows: Vec<Vec<f64>> = profiles
            .iter()
            .flat_map(|p| p.samples.iter().map(move |s| vec![p.sigma, s.k, s.phi_out_sq]))
            .collect();
        self.out.csv(name, &PROFILE, &rows)
    }

    fn run_metadata(&self, run: &EvolutionResult, critical: &CriticalData, s_d: Option<f64>) -> Value {
        json!({
            "epsilon": run.schedule.epsilon,
            "schedule": run.schedule,
            "grid": critical.phi.grid,
            "model": critical.model,
            "norm_drift": run.norm_drift,
            "s_d": s_d,
            "steps": run.steps,
            "step": run.step,
        })
    }

    fn scans(&self, critical: &CriticalData, sigmas: &[f64]) -> Result<Vec<ResonanceProfile>> {
        sigmas
            .par_iter()
            .map(|&s| scan_resonance(critical, s, &resonance_k_grid(s)))
            .collect()
    }
}

/// Loads the configuration, runs `command` on a pool of at most `jobs`
/// threads and writes artifacts below `out` (or the configured output
/// directory). Returns the one-line summary.
pub fn run(command: Command, config_path: &Path, out: Option<&Path>, jobs: Option<usize>) -> Result<String> {
    let (cfg, raw) = RunConfig::load(config_path)?;
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.clone())
        .ok_or_else(|| SpcError::Config("no output directory: pass --out or set \"output\"".into()))?;
    let hash = config_hash(&raw);
    let writer = ArtifactWriter::create(&dir, &hash)?;
    let mut ctx = Context { cfg: &cfg, out: writer };
    ctx.out.log(&format!("command {}", command.name()))?;
    let result = with_jobs(jobs, || dispatch(command, &mut ctx))?;
    match result {
        Ok(summary) => {
            ctx.out.log(&summary)?;
            ctx.out.finish()?;
            Ok(summary)
        }
        Err(e) => {
            ctx.out.log(&format!("error: {e}"))?;
            Err(e)
        }
    }
}

fn dispatch(command: Command, ctx: &mut Context) -> Result<String> {
    match command {
        Command::Critical => cmd_critical(ctx),
        Command::Track => cmd_track(ctx),
        Command::Resonance => cmd_resonance(ctx),
        Command::Fit => cmd_fit(ctx),
        Command::Evolve => cmd_evolve(ctx),
        Command::StaticDecay => cmd_static_decay(ctx),
        Command::ShortTime => cmd_short_time(ctx),
        Command::Scaling => cmd_scaling(ctx),
        Command::SpectrumCompare => cmd_spectrum_compare(ctx),
    }
}

fn cmd_critical(ctx: &mut Context) -> Result<String> {
    let c = ctx.critical()?;
    Ok(format!(
        "critical: lambda_c = {:.9}, C0 = {:.6}, identity_residual = {:.3e}",
        c.lambda_c, c.c0, c.identity_residual
    ))
}

fn cmd_track(ctx: &mut Context) -> Result<String> {
    let section = RunConfig::section(&ctx.cfg.track, "track")?;
    let grid = ctx.cfg.radial_grid()?;
    let mut model = ctx.cfg.template_model();
    if ctx.cfg.lambda_is_auto() {
        model = ctx.critical()?.model;
    }
    let track = track_eigenvalue(&model, &grid, &section.sigmas)?;
    let rows: Vec<Vec<f64>> = track
        .samples
        .iter()
        .map(|s| vec![s.sigma, s.energy, s.kappa, s.identity_residual])
        .collect();
    ctx.out.csv("track.csv", &["sigma", "energy", "kappa", "identity_residual"], &rows)?;
    ctx.out.json(
        "track.json",
        &json!({
            "sigma_c": track.sigma_c,
            "de_dsigma": track.de_dsigma,
            "kappa_sq_fit": track.kappa_sq_fit,
            "diagnostic": track.diagnostic,
        }),
    )?;
    Ok(format!(
        "track: {} samples, sigma_c = {:.4e}{}",
        track.samples.len(),
        track.sigma_c,
        track.diagnostic.as_deref().map(|d| format!(" ({d})")).unwrap_or_default()
    ))
}

fn peaks(profiles: &[ResonanceProfile]) -> Value {
    Value::Array(
        profiles
            .iter()
            .map(|p| json!({"sigma": p.sigma, "k_peak": p.k_peak, "delta_width": p.delta_width, "peak_value": p.peak_value}))
            .collect(),
    )
}

fn cmd_resonance(ctx: &mut Context) -> Result<String> {
    let section = RunConfig::section(&ctx.cfg.resonance, "resonance")?;
    let critical = ctx.critical()?;
    let profiles = ctx.scans(&critical, &section.sigmas)?;
    ctx.profile_csv("profile.csv", &profiles)?;
    ctx.out.json("resonance.json", &json!({ "profiles": peaks(&profiles) }))?;
    Ok(format!("resonance: {} profiles scanned", profiles.len()))
}

fn cmd_fit(ctx: &mut Context) -> Result<String> {
    let section = RunConfig::section(&ctx.cfg.fit, "fit")?;
    let critical = ctx.critical()?;
    let profiles = ctx.scans(&critical, &section.sigmas)?;
    ctx.profile_csv("profile.csv", &profiles)?;
    let pin = match section.pin {
        PinKind::C => ConstantPin::C(numerator_constant(&critical)?),
        PinKind::C0 => ConstantPin::C0(critical.c0),
    };
    let (constants, diagnostics) = fit_constants(&profiles, pin)?;
    ctx.out.json("constants.json", &constants)?;
    ctx.out.json("fit_diagnostics.json", &json!({ "diagnostics": diagnostics, "profiles": peaks(&profiles) }))?;
    Ok(format!(
        "fit: C0 = {:.5}, |C2| = {:.5}, |C3| = {:.5}, residual = {:.3}",
        constants.c0, constants.abs_c2, constants.abs_c3, constants.fit_residual
    ))
}

fn cmd_evolve(ctx: &mut Context) -> Result<String> {
    let section = RunConfig::section(&ctx.cfg.evolve, "evolve")?.clone();
    let critical = ctx.critical()?;
    let phi = box_normalized_phi(&critical)?;
    let run = propagate(
        &critical.model,
        &critical.phi.grid,
        &section.schedule,
        &phi,
        &phi,
        &ctx.cfg.propagation_options(),
    )?;
    let s_d = decay_time(&run).ok();
    ctx.evolution_csv("evolution.csv", &run)?;
    if let Some(w) = &section.spectrum {
        let spectrum = outgoing_spectrum(&run, &critical, &linspace(w.k_min, w.k_max, w.k_points))?;
        ctx.spectrum_csv("spectrum.csv", &spectrum)?;
    }
    let meta = ctx.run_metadata(&run, &critical, s_d);
    ctx.out.json("run.json", &meta)?;
    Ok(format!(
        "evolve: {} steps, final survival = {:.6}, s_d = {}, norm drift = {:.2e}",
        run.steps,
        run.survival.last().copied().unwrap_or(f64::NAN),
        s_d.map_or("none".to_string(), |s| format!("{s:.6e}")),
        run.norm_drift
    ))
}

fn cmd_static_decay(ctx: &mut Context) -> Result<String> {
    let section = RunConfig::section(&ctx.cfg.static_decay, "static_decay")?.clone();
    let critical = ctx.critical()?;
    let options = ctx.cfg.propagation_options();
    let profiles = ctx.scans(&critical, &section.sigmas)?;
    let jobs: Vec<(usize, usize)> = (0..profiles.len())
        .flat_map(|i| (0..section.epsilons.len()).map(move |j| (i, j)))
        .collect();
    let runs: Vec<(StaticDecay, EvolutionResult)> = jobs
        .par_iter()
        .map(|&(i, j)| static_decay_with_profile(&critical, &profiles[i], section.epsilons[j], &options))
        .collect::<Result<_>>()?;
    let mut records = Vec::new();
    for ((i, j), (decay, run)) in jobs.iter().zip(&runs) {
        ctx.evolution_csv(&format!("evolution_sigma{i}_eps{j}.csv"), run)?;
        records.push(decay.clone());
    }
    let worst = records
        .iter()
        .map(|d| d.ratio())
        .max_by(|a, b| a.ln().abs().total_cmp(&b.ln().abs()))
        .unwrap_or(f64::NAN);
    ctx.out.json("static_decay.json", &json!({ "runs": records }))?;
    Ok(format!("static-decay: {} runs, ratio farthest from 1 = {worst:.3}", records.len()))
}

fn cmd_short_time(ctx: &mut Context) -> Result<String> {
    let section = RunConfig::section(&ctx.cfg.short_time, "short_time")?.clone();
    let critical = ctx.critical()?;
    let study = short_time_study(&critical, &section, &ctx.cfg.propagation_options())?;
    ctx.out.json(
        "short_time.json",
        &json!({
            "a_fit": study.a_fit,
            "S_fit": study.duration_fit,
            "control": study.control,
            "runs": study.runs,
            "excluded_runs": study.excluded_runs,
        }),
    )?;
    Ok(format!(
        "short-time: slope in a = {:.4}, slope in S = {:.4}, control p = {:.2e}",
        study.a_fit.slope, study.duration_fit.slope, study.control.p_measured
    ))
}

fn write_study(ctx: &mut Context, outcome: &StudyOutcome) -> Result<()> {
    for (i, r) in outcome.runs.iter().enumerate() {
        if !r.times.is_empty() {
            let rows: Vec<Vec<f64>> = r.times.iter().zip(&r.survival).map(|(&s, &p)| vec![s, p]).collect();
            ctx.out.csv(&format!("evolution_eps{i}.csv"), &S_SURVIVAL, &rows)?;
        }
    }
    let runs: Vec<&RunRecord> = outcome.runs.iter().collect();
    ctx.out.json("study.json", &outcome.summary())?;
    ctx.out.json("runs.json", &json!({ "runs": runs, "fit": outcome.fit }))
}

fn cmd_scaling(ctx: &mut Context) -> Result<String> {
    let section = RunConfig::section(&ctx.cfg.scaling, "scaling")?.clone();
    let critical = ctx.critical()?;
    let options = ctx.cfg.propagation_options();
    let outcome = match section.mode {
        ScalingMode::Full => {
            let s_max = section
                .s_max
                .ok_or_else(|| SpcError::Config("scaling.s_max is required in full mode".into()))?;
            scaling_study(&critical, &section.epsilons, s_max, &options)?
        }
        ScalingMode::Static => {
            let table = section
                .sigma_table
                .as_ref()
                .ok_or_else(|| SpcError::Config("scaling.sigma_table is required in static mode".into()))?;
            static_scaling_study(&critical, &section.epsilons, table, &options)?
        }
    };
    info!("scaling fit {:?}", outcome.summary());
    write_study(ctx, &outcome)?;
    let s = outcome.summary();
    Ok(format!(
        "scaling: slope = {:.4} ± {:.4}, r_squared = {:.5}, excluded_runs = {}",
        s.slope, s.stderr, s.r_squared, s.excluded_runs
    ))
}

fn cmd_spectrum_compare(ctx: &mut Context) -> Result<String> {
    let section = RunConfig::section(&ctx.cfg.spectrum_compare, "spectrum_compare")?.clone();
    let critical = ctx.critical()?;
    let (profile, runs) = spectrum_dichotomy(&critical, &section, &ctx.cfg.propagation_options())?;
    ctx.profile_csv("profile.csv", std::slice::from_ref(&profile))?;
    let mut summary = Vec::new();
    let mut doc = serde_json::Map::new();
    for r in &runs {
        ctx.evolution_csv(&format!("evolution_{}.csv", r.label), &r.evolution)?;
        ctx.spectrum_csv(&format!("spectrum_{}.csv", r.label), &r.spectrum)?;
        let meta = ctx.run_metadata(&r.evolution, &critical, decay_time(&r.evolution).ok());
        doc.insert(
            r.label.to_string(),
            json!({
                "comparison": r.comparison,
                "continuum_weight": r.spectrum.continuum_weight,
                "bound_weight": r.spectrum.bound_weight,
                "remainder": r.spectrum.remainder,
                "spectrum_peak": r.spectrum.peak(),
                "run": meta,
            }),
        );
        summary.push(format!("{} {:?} (L1 = {:.3})", r.label, r.comparison.class, r.comparison.l1_distance));
    }
    doc.insert("profile_k_peak".into(), json!(profile.k_peak));
    ctx.out.json("comparison.json", &Value::Object(doc))?;
    Ok(format!("spectrum-compare: {}", summary.join(", ")))
}
