//! Experiment drivers behind each subcommand.
//!
//! Every driver derives its randomness from `RngState::new(config.seed)`
//! through fixed split indices, so a config reproduces its outputs exactly.
//! LV-RAE runs share these splits:
//!
//! | index | stream |
//! |---|---|
//! | 0 | base map |
//! | 1 | autoencoder init |
//! | 2 | stage-1 batches |
//! | 3 | held-out evaluation signals |
//! | 4 | discriminator init |
//! | 5 | stage-2 batches |
//! | 7 | evaluation noise |
//! | 8 | amplification probes |
//! | 9 | generation pipeline |

use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use lvrae_core::lvrae::{
    lvrae_generation_pipeline, stage1_train, stage2_finetune, BaseMap, Discriminator, GenResult, LvraeModel,
    SignalSource, Stage1Trace, Stage2Config, Stage2Trace,
};
use lvrae_core::manifold::{run_toy_dim, sort_runs, sweep_rows, ToyDimRun};
use lvrae_core::metrics::{amplification, cknna, energy_distance, mse, psnr};
use lvrae_core::numerics::{gaussian, layer_norm_rows};
use lvrae_core::{Mat, RngState};
use rayon::prelude::*;
use serde::Serialize;

use crate::checkpoint;
use crate::config::{save_config, ExperimentConfig, ExperimentKind, LvraeConfig};
use crate::gradcheck::{self, CheckResult};
use crate::svg::emit_scatter_svg;
use crate::table::{self, fmt_num, Cell, Table};
use crate::LabError;

const SPLIT_BASE_MAP: u64 = 0;
const SPLIT_INIT: u64 = 1;
const SPLIT_STAGE1: u64 = 2;
const SPLIT_HELDOUT: u64 = 3;
const SPLIT_DISC: u64 = 4;
const SPLIT_STAGE2: u64 = 5;
const SPLIT_EVAL_NOISE: u64 = 7;
const SPLIT_AMPLIFICATION: u64 = 8;
const SPLIT_GEN: u64 = 9;

/// Runs `config.experiment`, writing `config.json` and all results under
/// `config.out_dir`.
pub fn run(config: &ExperimentConfig) -> Result<(), LabError> {
    let out = PathBuf::from(&config.out_dir);
    fs::create_dir_all(&out).map_err(|e| LabError::io(&out, e))?;
    save_config(config, &out.join("config.json"))?;
    info!("{} -> {}", config.experiment.name(), out.display());
    match config.experiment {
        ExperimentKind::ToySweep => toy_sweep(config, &out).map(|_| ()),
        ExperimentKind::LvraeTrain => lvrae_train(config, &out).map(|_| ()),
        ExperimentKind::LvraeNoiseft => lvrae_noiseft(config, &out).map(|_| ()),
        ExperimentKind::LvraeGen => lvrae_gen(config, &out).map(|_| ()),
        ExperimentKind::GradCheck => grad_check(config, &out).map(|_| ()),
        ExperimentKind::Metrics => metrics(config, &out).map(|_| ()),
    }
}

fn pool(threads: usize) -> Result<rayon::ThreadPool, LabError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| LabError::Usage(format!("cannot start worker pool: {e}")))
}

// ---- toy sweep ----

pub fn toy_sweep(config: &ExperimentConfig, out: &Path) -> Result<Vec<ToyDimRun>, LabError> {
    let toy = &config.toy;
    let root = RngState::new(config.seed);
    let mut runs = pool(config.threads)?.install(|| {
        (0..toy.dims.len())
            .into_par_iter()
            .map(|i| {
                let run = run_toy_dim(toy, i, &root);
                if let Ok(r) = &run {
                    info!("toy D={} done, final loss {}", r.dim, fmt_num(r.train_loss_final()));
                }
                run
            })
            .collect::<lvrae_core::Result<Vec<_>>>()
    })?;
    sort_runs(&mut runs);

    let mut t = Table::new(table::TOY_SWEEP);
    for r in sweep_rows(&runs, toy.n_samples) {
        t.push(vec![
            r.dim.into(),
            r.alpha.into(),
            r.seed.into(),
            r.energy_distance.into(),
            r.train_loss_final.into(),
            r.n_samples.into(),
        ]);
    }
    t.write(&out.join("toy_sweep.csv"))?;
    for r in &runs {
        table::trace_table(&r.loss_trace).write(&out.join(format!("loss_trace_d{}.csv", r.dim)))?;
        table::samples_table(&r.truth).write(&out.join(format!("truth_d{}.csv", r.dim)))?;
        for c in &r.cells {
            let tag = format!("d{}_a{}", r.dim, fmt_num(c.alpha));
            table::samples_table(&c.decoded).write(&out.join(format!("samples_{tag}.csv")))?;
            if config.svg {
                emit_scatter_svg(
                    &r.truth,
                    &c.decoded,
                    ["ground truth", "decoded"],
                    &format!("D = {}, alpha = {}", r.dim, fmt_num(c.alpha)),
                    &out.join(format!("scatter_{tag}.svg")),
                )?;
            }
        }
    }
    let failed: Vec<String> = runs
        .iter()
        .filter_map(|r| r.failure.as_ref().map(|f| format!("D={}: {f}", r.dim)))
        .collect();
    if !failed.is_empty() {
        return Err(LabError::Numerical(failed.join("; ")));
    }
    Ok(runs)
}

// ---- LV-RAE shared pieces ----

pub fn signal_source(l: &LvraeConfig) -> Result<SignalSource, LabError> {
    Ok(SignalSource::new(l.signal.clone())?)
}

pub fn base_map(config: &ExperimentConfig) -> Result<BaseMap, LabError> {
    let l = &config.lvrae;
    let mut rng = RngState::new(config.seed).split(SPLIT_BASE_MAP);
    Ok(BaseMap::with_feature_std(&l.signal, l.latent_dim, l.feature_std, &mut rng)?)
}

/// Held-out signals, never seen in training.
pub fn heldout(config: &ExperimentConfig, src: &SignalSource) -> Mat {
    let mut rng = RngState::new(config.seed).split(SPLIT_HELDOUT);
    src.batch(config.lvrae.eval_samples, &mut rng).0
}

pub fn train_stage1(
    config: &ExperimentConfig,
    phi: &BaseMap,
    src: &SignalSource,
) -> Result<(LvraeModel, Stage1Trace), LabError> {
    let l = &config.lvrae;
    let root = RngState::new(config.seed);
    let mut m = LvraeModel::new(phi, &l.encoder_hidden, &l.decoder_hidden, &mut root.split(SPLIT_INIT))?;
    let trace = stage1_train(&mut m, phi, src, &l.weights, &l.stage1, &mut root.split(SPLIT_STAGE1))?;
    Ok((m, trace))
}

/// Decoder fine-tuned with `σ ~ U(0, tau)` and the fixed-σ ablation, both
/// from the same discriminator init and batch stream.
pub struct FineTuned {
    pub random: LvraeModel,
    pub random_trace: Stage2Trace,
    pub fixed: LvraeModel,
    pub fixed_trace: Stage2Trace,
}

fn finetune_one(
    config: &ExperimentConfig,
    m: &LvraeModel,
    phi: &BaseMap,
    src: &SignalSource,
    fixed_sigma: Option<f64>,
) -> Result<(LvraeModel, Stage2Trace, Discriminator), LabError> {
    let l = &config.lvrae;
    let root = RngState::new(config.seed);
    let mut ft = m.clone();
    let mut disc = Discriminator::new(phi.signal_dim(), &l.disc_hidden, &mut root.split(SPLIT_DISC))?;
    let cfg = Stage2Config {
        fixed_sigma,
        ..l.stage2.clone()
    };
    let trace = stage2_finetune(&mut ft, phi, &mut disc, src, &l.weights, &cfg, &mut root.split(SPLIT_STAGE2))?;
    for w in &trace.warnings {
        warn!("stage 2: {w}");
    }
    Ok((ft, trace, disc))
}

pub fn finetune(
    config: &ExperimentConfig,
    m: &LvraeModel,
    phi: &BaseMap,
    src: &SignalSource,
) -> Result<(FineTuned, Discriminator), LabError> {
    let (random, random_trace, disc) = finetune_one(config, m, phi, src, None)?;
    let (fixed, fixed_trace, _) = finetune_one(config, m, phi, src, Some(config.lvrae.ablation_sigma))?;
    Ok((
        FineTuned {
            random,
            random_trace,
            fixed,
            fixed_trace,
        },
        disc,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconScore {
    pub mse: f64,
    pub psnr: f64,
    /// Mean high-band energy of the reconstructions over that of the inputs.
    pub high_band_ratio: f64,
}

pub fn score(src: &SignalSource, x: &Mat, xbar: &Mat, peak: f64) -> Result<ReconScore, LabError> {
    Ok(ReconScore {
        mse: mse(x.as_slice(), xbar.as_slice())?,
        psnr: psnr(x.as_slice(), xbar.as_slice(), peak)?,
        high_band_ratio: src.high_band_energy(xbar)? / src.high_band_energy(x)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stage1Eval {
    /// Decoding the full latent `z`.
    pub from_z: ReconScore,
    /// Decoding `layer_norm(u)`, i.e. without the residual.
    pub from_u: ReconScore,
    /// `cknna(z, u)` on the held-out set.
    pub cknna_zu: f64,
}

pub fn evaluate_stage1(
    m: &LvraeModel,
    phi: &BaseMap,
    src: &SignalSource,
    x: &Mat,
    k: usize,
) -> Result<Stage1Eval, LabError> {
    let u = phi.features_rows(x)?;
    let z = m.encode_rows(phi, x)?;
    let zu = layer_norm_rows(&u, phi.ln())?;
    let peak = x.max_abs();
    Ok(Stage1Eval {
        from_z: score(src, x, &m.reconstruct_rows(&z)?, peak)?,
        from_u: score(src, x, &m.reconstruct_rows(&zu)?, peak)?,
        cknna_zu: cknna(&z, &u, k)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub decoder: &'static str,
    pub noise_level: f64,
    pub score: ReconScore,
    /// `cknna(X̄, X)`.
    pub cknna: f64,
}

/// Every decoder on `z + level · ε` for every level, with the same `ε` for all
/// decoders at a given level.
pub fn noise_ablation(
    config: &ExperimentConfig,
    decoders: &[(&'static str, &LvraeModel)],
    src: &SignalSource,
    z: &Mat,
    x: &Mat,
) -> Result<Vec<AblationRow>, LabError> {
    let l = &config.lvrae;
    let noise_root = RngState::new(config.seed).split(SPLIT_EVAL_NOISE);
    let peak = x.max_abs();
    let mut rows = Vec::new();
    for (li, &level) in l.eval_noise_levels.iter().enumerate() {
        let eps = gaussian(&mut noise_root.split(li as u64), z.rows(), z.cols());
        let mut zz = z.clone();
        zz.add_scaled(&eps, level)?;
        for &(name, m) in decoders {
            let xbar = m.reconstruct_rows(&zz)?;
            rows.push(AblationRow {
                decoder: name,
                noise_level: level,
                score: score(src, x, &xbar, peak)?,
                cknna: cknna(&xbar, x, l.cknna_k)?,
            });
        }
    }
    Ok(rows)
}

/// Mean finite-difference amplification of every decoder, with identical probes.
pub fn amplification_rows(
    config: &ExperimentConfig,
    decoders: &[(&'static str, &LvraeModel)],
    z: &Mat,
) -> Result<Vec<(&'static str, f64)>, LabError> {
    let l = &config.lvrae;
    let rng = RngState::new(config.seed).split(SPLIT_AMPLIFICATION);
    decoders
        .iter()
        .map(|&(name, m)| {
            let a = amplification(
                |zz| m.reconstruct_rows(zz),
                z,
                l.amplification_delta,
                l.amplification_trials,
                &mut rng.clone(),
            )?;
            Ok((name, a))
        })
        .collect()
}

// ---- checkpoint reuse ----

#[derive(Serialize)]
struct Stage1Key<'a> {
    seed: u64,
    lvrae: Stage1Fields<'a>,
}

#[derive(Serialize)]
struct Stage1Fields<'a> {
    signal: &'a lvrae_core::lvrae::SignalSpec,
    latent_dim: usize,
    feature_std: f64,
    encoder_hidden: &'a [usize],
    decoder_hidden: &'a [usize],
    weights: &'a lvrae_core::lvrae::LossWeights,
    stage1: &'a lvrae_core::lvrae::Stage1Config,
}

#[derive(Serialize)]
struct Stage2Key<'a> {
    stage1: Stage1Key<'a>,
    disc_hidden: &'a [usize],
    stage2: &'a Stage2Config,
}

fn stage1_key(config: &ExperimentConfig) -> Stage1Key<'_> {
    let l = &config.lvrae;
    Stage1Key {
        seed: config.seed,
        lvrae: Stage1Fields {
            signal: &l.signal,
            latent_dim: l.latent_dim,
            feature_std: l.feature_std,
            encoder_hidden: &l.encoder_hidden,
            decoder_hidden: &l.decoder_hidden,
            weights: &l.weights,
            stage1: &l.stage1,
        },
    }
}

fn key_json<T: Serialize>(key: &T) -> String {
    serde_json::to_string_pretty(key).expect("key serializes") + "\n"
}

fn write_text(path: &Path, text: &str) -> Result<(), LabError> {
    fs::write(path, text).map_err(|e| LabError::io(path, e))
}

fn key_matches(path: &Path, expected: &str) -> bool {
    fs::read_to_string(path).map(|s| s == expected).unwrap_or(false)
}

fn checkpoint_dir(out: &Path) -> Result<PathBuf, LabError> {
    let dir = out.join("checkpoints");
    fs::create_dir_all(&dir).map_err(|e| LabError::io(&dir, e))?;
    Ok(dir)
}

fn save_stage1(dir: &Path, config: &ExperimentConfig, phi: &BaseMap, m: &LvraeModel) -> Result<(), LabError> {
    checkpoint::save_mlp(&m.encoder, &dir.join("encoder.lvrm"))?;
    checkpoint::save_mlp(&m.decoder, &dir.join("decoder.lvrm"))?;
    checkpoint::save_layer_norm(&m.latent_ln, &dir.join("latent_ln.lvrv"))?;
    checkpoint::save_base_map(phi, &dir.join("base_map.lvrv"))?;
    write_text(&dir.join("stage1_key.json"), &key_json(&stage1_key(config)))
}

/// Stage-1 model from `out/checkpoints` if it was trained with the same
/// settings, otherwise trained now and saved there.
pub fn stage1_model(
    config: &ExperimentConfig,
    out: &Path,
    phi: &BaseMap,
    src: &SignalSource,
) -> Result<LvraeModel, LabError> {
    let dir = checkpoint_dir(out)?;
    if key_matches(&dir.join("stage1_key.json"), &key_json(&stage1_key(config))) {
        info!("reusing stage-1 checkpoints in {}", dir.display());
        return Ok(LvraeModel::from_parts(
            checkpoint::load_mlp(&dir.join("encoder.lvrm"))?,
            checkpoint::load_layer_norm(&dir.join("latent_ln.lvrv"))?,
            checkpoint::load_mlp(&dir.join("decoder.lvrm"))?,
        )?);
    }
    let (m, trace) = train_stage1(config, phi, src)?;
    write_stage1_trace(out, &trace)?;
    save_stage1(&dir, config, phi, &m)?;
    Ok(m)
}

fn write_stage1_trace(out: &Path, trace: &Stage1Trace) -> Result<(), LabError> {
    let mut t = Table::new(table::STAGE1_TRACE);
    for (i, (r, a)) in trace.rec.iter().zip(&trace.align).enumerate() {
        t.push(vec![i.into(), (*r).into(), (*a).into()]);
    }
    t.write(&out.join("stage1_trace.csv"))
}

fn write_stage2_trace(path: &Path, trace: &Stage2Trace) -> Result<(), LabError> {
    let mut t = Table::new(table::STAGE2_TRACE);
    for i in 0..trace.rec.len() {
        t.push(vec![
            i.into(),
            trace.rec[i].into(),
            trace.gan[i].into(),
            trace.disc[i].into(),
            trace.gan_weight[i].into(),
        ]);
    }
    t.write(path)
}

// ---- LV-RAE subcommands ----

pub fn lvrae_train(config: &ExperimentConfig, out: &Path) -> Result<Stage1Eval, LabError> {
    let src = signal_source(&config.lvrae)?;
    let phi = base_map(config)?;
    let (m, trace) = train_stage1(config, &phi, &src)?;
    write_stage1_trace(out, &trace)?;
    save_stage1(&checkpoint_dir(out)?, config, &phi, &m)?;
    let x = heldout(config, &src);
    let e = evaluate_stage1(&m, &phi, &src, &x, config.lvrae.cknna_k)?;
    let u = phi.features_rows(&x)?;
    let zu = layer_norm_rows(&u, phi.ln())?;
    let mut t = Table::new(table::STAGE1_EVAL);
    t.push(vec![
        "z".into(),
        e.from_z.mse.into(),
        e.from_z.psnr.into(),
        e.from_z.high_band_ratio.into(),
        e.cknna_zu.into(),
    ]);
    t.push(vec![
        "layer_norm_u".into(),
        e.from_u.mse.into(),
        e.from_u.psnr.into(),
        e.from_u.high_band_ratio.into(),
        cknna(&zu, &u, config.lvrae.cknna_k)?.into(),
    ]);
    t.write(&out.join("stage1_eval.csv"))?;
    info!(
        "stage 1: mse z {} vs u {}, cknna {}",
        fmt_num(e.from_z.mse),
        fmt_num(e.from_u.mse),
        fmt_num(e.cknna_zu)
    );
    Ok(e)
}

pub struct NoiseFtOutcome {
    pub ablation: Vec<AblationRow>,
    pub amplification: Vec<(&'static str, f64)>,
}

pub fn lvrae_noiseft(config: &ExperimentConfig, out: &Path) -> Result<NoiseFtOutcome, LabError> {
    let src = signal_source(&config.lvrae)?;
    let phi = base_map(config)?;
    let m = stage1_model(config, out, &phi, &src)?;
    let (ft, disc) = finetune(config, &m, &phi, &src)?;
    write_stage2_trace(&out.join("stage2_trace_random.csv"), &ft.random_trace)?;
    write_stage2_trace(&out.join("stage2_trace_fixed.csv"), &ft.fixed_trace)?;
    save_finetuned(config, out, &ft.random, &disc)?;
    checkpoint::save_mlp(&ft.fixed.decoder, &checkpoint_dir(out)?.join("decoder_fixed.lvrm"))?;

    let x = heldout(config, &src);
    let z = m.encode_rows(&phi, &x)?;
    let decoders = [("stage1", &m), ("random_sigma", &ft.random), ("fixed_sigma", &ft.fixed)];
    let ablation = noise_ablation(config, &decoders, &src, &z, &x)?;
    let mut t = Table::new(table::NOISE_ABLATION);
    for r in &ablation {
        t.push(vec![
            r.decoder.into(),
            r.noise_level.into(),
            r.score.mse.into(),
            r.score.psnr.into(),
            r.cknna.into(),
        ]);
    }
    t.write(&out.join("noise_ablation.csv"))?;
    let amp = amplification_rows(config, &decoders, &z)?;
    let mut t = Table::new(table::AMPLIFICATION);
    for (name, a) in &amp {
        t.push(vec![(*name).into(), config.lvrae.amplification_delta.into(), (*a).into()]);
    }
    t.write(&out.join("amplification.csv"))?;
    Ok(NoiseFtOutcome {
        ablation,
        amplification: amp,
    })
}

fn stage2_key_json(config: &ExperimentConfig) -> String {
    let l = &config.lvrae;
    let stage2 = Stage2Config {
        fixed_sigma: None,
        ..l.stage2.clone()
    };
    key_json(&Stage2Key {
        stage1: stage1_key(config),
        disc_hidden: &l.disc_hidden,
        stage2: &stage2,
    })
}

fn save_finetuned(config: &ExperimentConfig, out: &Path, ft: &LvraeModel, disc: &Discriminator) -> Result<(), LabError> {
    let dir = checkpoint_dir(out)?;
    checkpoint::save_mlp(&ft.decoder, &dir.join("decoder_ft.lvrm"))?;
    checkpoint::save_mlp(&disc.net, &dir.join("discriminator.lvrm"))?;
    write_text(&dir.join("stage2_key.json"), &stage2_key_json(config))
}

/// Random-σ fine-tuned model, reusing checkpoints when the settings match.
pub fn finetuned_model(
    config: &ExperimentConfig,
    out: &Path,
    phi: &BaseMap,
    src: &SignalSource,
) -> Result<LvraeModel, LabError> {
    let m = stage1_model(config, out, phi, src)?;
    let dir = checkpoint_dir(out)?;
    if key_matches(&dir.join("stage2_key.json"), &stage2_key_json(config)) {
        info!("reusing fine-tuned decoder in {}", dir.display());
        let decoder = checkpoint::load_mlp(&dir.join("decoder_ft.lvrm"))?;
        return Ok(LvraeModel::from_parts(m.encoder, m.latent_ln, decoder)?);
    }
    let (ft, trace, disc) = finetune_one(config, &m, phi, src, None)?;
    write_stage2_trace(&out.join("stage2_trace_random.csv"), &trace)?;
    save_finetuned(config, out, &ft, &disc)?;
    Ok(ft)
}

pub fn generation(
    config: &ExperimentConfig,
    m: &LvraeModel,
    phi: &BaseMap,
    src: &SignalSource,
) -> Result<GenResult, LabError> {
    let rng = RngState::new(config.seed).split(SPLIT_GEN);
    Ok(lvrae_generation_pipeline(m, phi, src, &config.lvrae.gen, &rng)?)
}

pub fn lvrae_gen(config: &ExperimentConfig, out: &Path) -> Result<GenResult, LabError> {
    let src = signal_source(&config.lvrae)?;
    let phi = base_map(config)?;
    let ft = finetuned_model(config, out, &phi, &src)?;
    let g = generation(config, &ft, &phi, &src)?;
    table::trace_table(&g.loss_trace).write(&out.join("gen_loss_trace.csv"))?;
    let mut t = Table::new(table::SIGMA_SWEEP);
    for &(s, d) in &g.curve {
        t.push(vec![s.into(), d.into()]);
    }
    t.write(&out.join("sigma_sweep.csv"))?;
    if let Some((s, d)) = g.best() {
        info!("best sigma_bar {} (energy distance {})", fmt_num(s), fmt_num(d));
    }
    Ok(g)
}

// ---- checks and metrics ----

pub fn grad_check(config: &ExperimentConfig, out: &Path) -> Result<Vec<CheckResult>, LabError> {
    let results = gradcheck::run_all(&config.grad_check, &RngState::new(config.seed))?;
    let mut t = Table::new(table::GRAD_CHECK);
    for r in &results {
        t.push(vec![r.name.into(), r.max_rel_err.into(), r.tolerance.into(), r.passed().into()]);
    }
    t.write(&out.join("grad_check.csv"))?;
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed()).map(|r| r.name).collect();
    if !failed.is_empty() {
        return Err(LabError::Numerical(format!("gradient checks failed: {}", failed.join(", "))));
    }
    Ok(results)
}

pub fn metrics(config: &ExperimentConfig, out: &Path) -> Result<Vec<(String, f64)>, LabError> {
    let mc = &config.metrics;
    let path = |p: &Option<String>, key: &str| {
        p.as_deref().map(PathBuf::from).ok_or_else(|| LabError::Config {
            path: format!("metrics.{key}"),
            message: "a CSV path is required".into(),
        })
    };
    let a = table::read_matrix(&path(&mc.reference, "reference")?)?;
    let b = table::read_matrix(&path(&mc.candidate, "candidate")?)?;
    let mut values = vec![("energy_distance".to_string(), energy_distance(&a, &b)?)];
    if a.shape() == b.shape() {
        let peak = mc.peak.unwrap_or_else(|| a.max_abs());
        values.push(("mse".into(), mse(a.as_slice(), b.as_slice())?));
        values.push(("psnr_analog".into(), psnr(a.as_slice(), b.as_slice(), peak)?));
        if a.rows() > mc.cknna_k + 1 {
            values.push(("cknna".into(), cknna(&a, &b, mc.cknna_k)?));
        }
    }
    let mut t = Table::new(table::METRICS);
    for (k, v) in &values {
        t.push(vec![Cell::Text(k.clone()), (*v).into()]);
    }
    t.write(&out.join("metrics.csv"))?;
    Ok(values)
}
