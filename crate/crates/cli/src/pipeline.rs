//! End-to-end scenario execution: transfer → optics → noise → similarity →
//! retrieval.

use std::path::{Path, PathBuf};
use std::time::Instant;

use ndarray::Array2;
use num_complex::Complex64;
use qtransfer_core::export::write_distribution_csv;
use qtransfer_core::lattice::distribution_of;
use qtransfer_core::mask::DEFAULT_SAMPLES_1D;
use qtransfer_core::mask::DEFAULT_SAMPLES_2D;
use qtransfer_core::optics::{
    bin_to_modes, far_field_of, field_from_kernel, sample_poisson, simulate_bolduc, EncodeMode, PoissonSample,
};
use qtransfer_core::retrieval::{align_phase_weighted, gs_retrieve, GsConfig};
use qtransfer_core::{
    dense_from_kernel, kernel_from_phase, kernel_from_phase_2d, random_unitary, similarity, transfer_general,
    ConvolutionKernel, Distribution, Error, PhaseMask, UnitaryOperator,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::output::{emit_plot_data, grid_binary_bytes, write_atomic, PhaseGrids};
use crate::scenario::{Scenario, UnitarySource, MAX_LEAKAGE};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_OUT_DIR: &str = "qtransfer-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stages {
    pub optics: bool,
    pub retrieval: bool,
}

impl Stages {
    pub const TRANSFER: Stages = Stages {
        optics: false,
        retrieval: false,
    };
    pub const SIMULATE: Stages = Stages {
        optics: true,
        retrieval: false,
    };
    pub const RETRIEVE: Stages = Stages {
        optics: false,
        retrieval: true,
    };
    pub const ALL: Stages = Stages {
        optics: true,
        retrieval: true,
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Output root; each scenario writes to `<root>/<name>`. `None` uses the
    /// scenario's own `output` or [`DEFAULT_OUT_DIR`].
    pub out_root: Option<PathBuf>,
    pub seed_override: Option<u64>,
    /// Transfer fidelity must reach `1 - tolerance`.
    pub tolerance: f64,
    pub stages: Stages,
    pub write_files: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            out_root: None,
            seed_override: None,
            tolerance: DEFAULT_TOLERANCE,
            stages: Stages::ALL,
            write_files: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeRow {
    pub m: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_y: Option<i32>,
    pub p_theory: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_sampled: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poisson_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalSummary {
    pub n_runs: usize,
    pub n_iters: usize,
    pub best_run_index: usize,
    pub final_error: f64,
    pub run_final_errors: Vec<f64>,
    pub aligned_rms: f64,
    pub twin: bool,
    pub trace_monotone: bool,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Timings {
    pub transfer_ms: f64,
    pub optics_ms: f64,
    pub retrieval_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub name: String,
    pub dims: usize,
    pub modes_per_axis: usize,
    pub window: usize,
    pub transfer_fidelity: f64,
    pub success_probability: f64,
    pub expected_success_probability: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_leakage: Option<f64>,
    pub window_leakage: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub similarity_noiseless: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub similarity_sampled: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts_total: Option<u64>,
    pub modes: Vec<ModeRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retrieval: Option<RetrievalSummary>,
    pub timings: Timings,
    pub passed: bool,
}

/// Report plus the in-memory artifacts that only go to files.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub phases: Option<PhaseGrids>,
    pub far_intensity: Option<Array2<f64>>,
    pub sample: Option<PoissonSample>,
    pub theory: Distribution,
    pub out_dir: PathBuf,
}

/// The idler field shown to the camera and its sampled grid size.
struct Display {
    field: Array2<Complex64>,
    kernel: ConvolutionKernel,
    samples: usize,
}

fn default_samples(dims: usize) -> usize {
    if dims == 1 {
        DEFAULT_SAMPLES_1D
    } else {
        DEFAULT_SAMPLES_2D
    }
}

fn build_unitary(s: &Scenario) -> CliResult<(UnitaryOperator, Option<f64>, usize)> {
    let l = s.lattice;
    match &s.unitary {
        UnitarySource::Random { seed } => Ok((random_unitary(&l, *seed), None, default_samples(l.dims()))),
        UnitarySource::Mask { samples, .. } => {
            let profile = s.profile()?.expect("mask source");
            let n = samples.unwrap_or_else(|| default_samples(l.dims()));
            let mask = PhaseMask::sample(&profile, &l, n)?;
            let kernel = if l.dims() == 1 {
                kernel_from_phase(&mask)?
            } else {
                kernel_from_phase_2d(&mask)?
            };
            if kernel.leakage() >= MAX_LEAKAGE {
                return Err(CliError::Physics(Error::InvalidConfig(format!(
                    "kernel leakage {:.2e} exceeds {MAX_LEAKAGE:.0e}; enlarge the lattice",
                    kernel.leakage()
                ))));
            }
            Ok((dense_from_kernel(&kernel)?, Some(kernel.leakage()), n))
        }
    }
}

/// Resolves where a scenario's files go.
pub fn output_dir(s: &Scenario, opts: &RunOptions) -> PathBuf {
    match (&opts.out_root, &s.output) {
        (Some(root), _) => root.join(&s.name),
        (None, Some(dir)) => dir.clone(),
        (None, None) => Path::new(DEFAULT_OUT_DIR).join(&s.name),
    }
}

pub fn load_scenario(path: &Path, opts: &RunOptions) -> CliResult<Scenario> {
    let mut s = Scenario::load(path).map_err(|e| CliError::loading(path, e))?;
    if let Some(seed) = opts.seed_override {
        s.override_seeds(seed);
    }
    Ok(s)
}

pub fn run_scenario(path: &Path, opts: &RunOptions) -> CliResult<RunOutput> {
    let s = load_scenario(path, opts)?;
    run_loaded(&s, opts)
}

pub fn run_loaded(s: &Scenario, opts: &RunOptions) -> CliResult<RunOutput> {
    let l = s.lattice;
    let mut timings = Timings::default();

    let t0 = Instant::now();
    let (u, kernel_leakage, samples) = build_unitary(s)?;
    let phi0 = s.input_state()?;
    let transfer = transfer_general(&u, &phi0)?;
    let idler = distribution_of(&transfer.idler_state);
    let (theory, window_leakage) = idler.on_window(s.camera.window)?;
    timings.transfer_ms = ms(t0);

    let display = if opts.stages.optics || opts.stages.retrieval {
        let kernel = ConvolutionKernel::new(l, transfer.idler_state.amplitudes().to_vec())?;
        let samples = samples.max(2 * l.modes_per_axis());
        let field = field_from_kernel(&kernel, samples)?;
        let field = match s.encoding {
            EncodeMode::PhaseOnly => field.mapv(|v| Complex64::from_polar(1.0, v.arg())),
            EncodeMode::Bolduc => field,
        };
        Some(Display { field, kernel, samples })
    } else {
        None
    };

    let mut sim_similarity = None;
    let mut sampled_similarity = None;
    let mut sample = None;
    let mut counts_total = None;
    if let (true, Some(d)) = (opts.stages.optics, &display) {
        let t1 = Instant::now();
        let binned = match s.encoding {
            EncodeMode::PhaseOnly => bin_to_modes(
                &far_field_of(&d.field, l.dims(), l.period(), s.camera.pixels_per_mode)?,
                &s.camera,
            )?,
            EncodeMode::Bolduc => simulate_bolduc(&d.kernel, d.samples, &s.camera)?,
        };
        let simulated = binned.distribution.with_zeroth_order_leakage(s.noise.zeroth_order)?;
        sim_similarity = Some(similarity(&simulated, &theory)?);
        let drawn = sample_poisson(&simulated, s.camera.counts_total, s.noise.seed)?;
        if let Some(f) = &drawn.frequencies {
            sampled_similarity = Some(similarity(f, &theory)?);
            counts_total = Some(drawn.total());
            sample = Some(drawn);
        }
        timings.optics_ms = ms(t1);
    }

    let mut retrieval = None;
    let mut phases = None;
    let mut far_intensity = None;
    if let (true, Some(d)) = (opts.stages.retrieval, &display) {
        let cfg = s.retrieval.unwrap_or_else(|| {
            if l.dims() == 1 {
                GsConfig::one_d()
            } else {
                GsConfig::two_d()
            }
        });
        if s.retrieval.is_some() || opts.stages == Stages::RETRIEVE {
            let t2 = Instant::now();
            let far = far_field_of(&d.field, l.dims(), l.period(), 1)?;
            let near = d.field.mapv(|v| v.norm());
            let peak = near.iter().cloned().fold(0.0, f64::max);
            let near = near.mapv(|v| v / peak);
            let res = gs_retrieve(&near, &far, &cfg)?;
            let reference = d.field.mapv(|v| v.arg());
            let al = align_phase_weighted(&res.phase, &reference, &near)?;
            timings.retrieval_ms = ms(t2);
            retrieval = Some(RetrievalSummary {
                n_runs: cfg.n_runs,
                n_iters: cfg.n_iters,
                best_run_index: res.best_run_index,
                final_error: res.final_error,
                run_final_errors: res.runs.iter().map(|r| r.final_error).collect(),
                aligned_rms: al.rms,
                twin: al.twin,
                trace_monotone: res.error_trace.windows(2).all(|w| w[1] <= w[0] + 1e-12),
                wall_ms: timings.retrieval_ms,
            });
            phases = Some(PhaseGrids {
                reference,
                retrieved: al.aligned,
            });
            far_intensity = Some(far.data().clone());
        }
    }

    let errors = sample.as_ref().map(|s| s.errors());
    let modes = theory
        .probabilities()
        .iter()
        .enumerate()
        .map(|(f, p)| {
            let idx = theory.lattice().index_at(f);
            ModeRow {
                m: idx.x,
                m_y: (l.dims() == 2).then_some(idx.y),
                p_theory: *p,
                p_sampled: sample.as_ref().and_then(|s| s.frequencies.as_ref()).map(|fr| fr.probabilities()[f]),
                count: sample.as_ref().map(|s| s.counts[f]),
                poisson_error: errors.as_ref().map(|e| e[f]),
            }
        })
        .collect();

    let in_unit = |v: Option<f64>| v.is_none_or(|x| (0.0..=1.0).contains(&x));
    let passed = transfer.fidelity_vs_direct >= 1.0 - opts.tolerance
        && in_unit(sim_similarity)
        && in_unit(sampled_similarity)
        && retrieval.as_ref().is_none_or(|r| r.trace_monotone);
    let report = RunReport {
        name: s.name.clone(),
        dims: l.dims(),
        modes_per_axis: l.modes_per_axis(),
        window: s.camera.window,
        transfer_fidelity: transfer.fidelity_vs_direct,
        success_probability: transfer.success_probability,
        expected_success_probability: 1.0 / l.mode_count() as f64,
        kernel_leakage,
        window_leakage,
        similarity_noiseless: sim_similarity,
        similarity_sampled: sampled_similarity,
        counts_total,
        modes,
        retrieval,
        timings,
        passed,
    };
    let out = RunOutput {
        out_dir: output_dir(s, opts),
        report,
        phases,
        far_intensity,
        sample,
        theory,
    };
    if opts.write_files {
        write_outputs(&out)?;
    }
    Ok(out)
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

pub fn write_outputs(out: &RunOutput) -> CliResult<()> {
    let dir = &out.out_dir;
    let mut theory = Vec::new();
    write_distribution_csv(&out.theory, None, &mut theory)?;
    write_atomic(&dir.join("theory.csv"), &theory)?;
    if let (Some(sample), Some(freq)) = (&out.sample, out.sample.as_ref().and_then(|s| s.frequencies.as_ref())) {
        let mut buf = Vec::new();
        write_distribution_csv(freq, Some(sample), &mut buf)?;
        write_atomic(&dir.join("sampled.csv"), &buf)?;
    }
    if let Some(far) = &out.far_intensity {
        write_atomic(&dir.join("far_intensity.bin"), &grid_binary_bytes(far))?;
    }
    if let Some(r) = &out.report.retrieval {
        let json = serde_json::to_vec_pretty(r).expect("retrieval summary serializes");
        write_atomic(&dir.join("gs_report.json"), &json)?;
    }
    emit_plot_data(&out.report, out.phases.as_ref(), dir)?;
    let json = serde_json::to_vec_pretty(&out.report).expect("report serializes");
    write_atomic(&dir.join("report.json"), &json)
}

/// Phase-only field with uniform amplitude, for retrieval on external data.
pub fn uniform_amplitude(dim: (usize, usize)) -> Array2<f64> {
    Array2::ones(dim)
}

/// Relative far-field reproduction error of a retrieved phase.
pub fn far_field_mismatch(phase: &Array2<f64>, near: &Array2<f64>, far_centered: &Array2<f64>) -> CliResult<f64> {
    Ok(qtransfer_core::retrieval::forward_intensity_error(phase, near, far_centered)?)
}
