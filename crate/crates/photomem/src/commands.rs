// SPDX-License-Identifier: Apache-2.0
//! Subcommand implementations. Each returns a serializable report; the CLI
//! layer prints it and the files named in it are already written.

use std::path::{Path, PathBuf};

use photomem_core::energy::{classification_energy, energy_report, mapping_energy, RunDescription};
use photomem_core::pipeline::{activation_mask, sample_waveform};
use photomem_core::robustness::{self, SweepReport};
use photomem_core::wta::{self, shift_flips};
use photomem_core::{
    dataset, ColumnCurrents, Crossbar, EnergyLedger, MotionClass, MotionTrajectory, Occluder,
    Readout, SampleVector, SensingSurface, SweepConfig,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::formats;

#[derive(Debug, Clone, Serialize)]
pub struct GenerateReport {
    pub waveform_csv: PathBuf,
    pub direction: MotionClass,
    pub source: &'static str,
    pub sample_rate_hz: f64,
    pub points: usize,
    pub span_ms: (f64, f64),
    pub trajectory: MotionTrajectory,
    pub surface: SensingSurface,
}

#[derive(Debug, Clone, Default)]
pub struct GenerateArgs {
    pub direction: Option<MotionClass>,
    pub speed_m_s: Option<f64>,
    pub occluder_x_m: Option<f64>,
    pub occluder_y_m: Option<f64>,
    pub output: Option<PathBuf>,
}

/// Synthesizes a sweep and writes the waveform CSV plus a JSON sidecar next
/// to it.
pub fn generate(cfg: &RunConfig, args: &GenerateArgs) -> Result<GenerateReport> {
    let direction = args.direction.unwrap_or(MotionClass::LeftToRight);
    let mut traj = cfg.trajectory(direction);
    if let Some(v) = args.speed_m_s {
        traj.speed_m_s = v;
    }
    traj.occluder = Occluder {
        size_x_m: args.occluder_x_m.unwrap_or(traj.occluder.size_x_m),
        size_y_m: args.occluder_y_m.unwrap_or(traj.occluder.size_y_m),
        ..traj.occluder
    };
    let surface = cfg.surface()?;
    let w = surface.simulate_motion(&traj, cfg.motion.sample_rate_hz)?;
    let path = args
        .output
        .clone()
        .unwrap_or_else(|| cfg.output_dir.join(format!("waveform_{direction}.csv")));
    formats::write_file(&path, &formats::waveform_to_csv(&w))?;
    let report = GenerateReport {
        waveform_csv: path.clone(),
        direction,
        source: "synthetic",
        sample_rate_hz: cfg.motion.sample_rate_hz,
        points: w.points().len(),
        span_ms: w.span_ms(),
        trajectory: traj,
        surface,
    };
    formats::write_file(&path.with_extension("json"), &to_json(&report))?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleReport {
    pub samples_csv: PathBuf,
    pub label: Option<MotionClass>,
    pub times_ms: Vec<f64>,
    pub amplitudes_v: Vec<f64>,
    pub mask: String,
}

/// Samples a waveform CSV at the configured instants.
pub fn sample(
    cfg: &RunConfig,
    input: &Path,
    label: Option<MotionClass>,
    output: Option<&Path>,
) -> Result<SampleReport> {
    let w = formats::read_waveform(input)?.with_label(label);
    let v = sample_waveform(&w, &cfg.sampling)?;
    let path = output.map(Path::to_path_buf).unwrap_or_else(|| {
        let stem = input
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("input");
        cfg.output_dir.join(format!("samples_{stem}.csv"))
    });
    formats::write_file(&path, &formats::samples_to_csv(std::slice::from_ref(&v)))?;
    Ok(SampleReport {
        samples_csv: path,
        label: v.label(),
        times_ms: cfg.sampling.times().collect(),
        amplitudes_v: v.amplitudes().to_vec(),
        mask: activation_mask(&v, cfg.crossbar.read_threshold_v).to_bitstring(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassLedger {
    pub class: MotionClass,
    pub ledger: EnergyLedger,
}

#[derive(Debug, Clone, Serialize)]
pub struct MapReport {
    pub crossbar_csv: PathBuf,
    pub programming: photomem_core::ProgrammingPath,
    pub labels: Vec<Option<MotionClass>>,
    /// `[row][col]`.
    pub resistance_ohm: Vec<Vec<f64>>,
    pub mapping_energy: Vec<ClassLedger>,
    pub total_j: f64,
}

fn input_vectors(cfg: &RunConfig, input: Option<&Path>) -> Result<Vec<SampleVector>> {
    match input {
        None => Ok(dataset::sample_vectors()),
        Some(p) => formats::read_samples(p, &cfg.sampling),
    }
}

/// Maps the labelled vectors of `input` (default: the reference set) into a
/// fresh crossbar.
pub fn map_crossbar(cfg: &RunConfig, input: Option<&Path>) -> Result<Crossbar> {
    let vectors = input_vectors(cfg, input)?;
    let mut x = cfg.blank_crossbar()?;
    x.map_labelled(&vectors)?;
    Ok(x)
}

pub fn map(cfg: &RunConfig, input: Option<&Path>, output: Option<&Path>) -> Result<MapReport> {
    let x = map_crossbar(cfg, input)?;
    let path = output
        .map(Path::to_path_buf)
        .unwrap_or_else(|| cfg.output_dir.join("crossbar.csv"));
    formats::write_file(&path, &formats::crossbar_to_csv(&x))?;
    let mut ledgers = Vec::new();
    let mut total = EnergyLedger::new();
    for class in x.labels().iter().flatten() {
        let l = mapping_energy(*class, &cfg.energy)?;
        total.merge(l.clone());
        ledgers.push(ClassLedger {
            class: *class,
            ledger: l,
        });
    }
    let report = MapReport {
        crossbar_csv: path,
        programming: x.programming_path(),
        labels: x.labels().to_vec(),
        resistance_ohm: x.resistance_grid(),
        mapping_energy: ledgers,
        total_j: total.total(),
    };
    formats::write_file(&cfg.output_dir.join("map_report.json"), &to_json(&report))?;
    Ok(report)
}

/// Loads a crossbar dump, or maps the reference set when none is given.
pub fn load_crossbar(cfg: &RunConfig, state: Option<&Path>) -> Result<Crossbar> {
    match state {
        None => map_crossbar(cfg, None),
        Some(p) if !p.exists() => Err(CliError::Lifecycle(format!(
            "no crossbar state at {}; run `map` first",
            p.display()
        ))),
        Some(p) => cfg.configure(formats::read_crossbar(p, cfg.device_curves()?)?),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ColumnReading {
    pub label: Option<MotionClass>,
    pub current_a: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationRecord {
    pub input: String,
    pub label: Option<MotionClass>,
    pub mask: String,
    pub winner: Option<MotionClass>,
    pub winner_index: usize,
    pub margin: f64,
    pub tie: bool,
    pub currents: Vec<ColumnReading>,
    pub energy: EnergyLedger,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    pub readout: Readout,
    pub results: Vec<ClassificationRecord>,
}

pub fn classify_vector(
    cfg: &RunConfig,
    x: &Crossbar,
    input: String,
    v: &SampleVector,
) -> Result<ClassificationRecord> {
    let mask = activation_mask(v, cfg.crossbar.read_threshold_v);
    let currents = x.column_currents(&mask)?;
    let r = wta::classify(&currents)?;
    let energy_class = v
        .label()
        .or(r.winner)
        .or_else(|| MotionClass::from_index(r.winner_index))
        .ok_or_else(|| CliError::Parameter("cannot attribute classification energy".into()))?;
    Ok(ClassificationRecord {
        input,
        label: v.label(),
        mask: mask.to_bitstring(),
        winner: r.winner,
        winner_index: r.winner_index,
        margin: r.relative_margin,
        tie: r.tie,
        currents: readings(&currents),
        energy: classification_energy(energy_class, &cfg.energy)?,
    })
}

fn readings(c: &ColumnCurrents) -> Vec<ColumnReading> {
    c.currents()
        .iter()
        .zip(c.labels())
        .map(|(&current_a, &label)| ColumnReading { label, current_a })
        .collect()
}

/// What to classify.
#[derive(Debug, Clone)]
pub enum ClassifyInput {
    /// Every reference vector.
    Reference,
    /// One reference vector.
    Class(MotionClass),
    /// A waveform or sample-vector CSV, optionally selecting a labelled row.
    File(PathBuf, Option<MotionClass>),
}

pub fn classify(
    cfg: &RunConfig,
    input: &ClassifyInput,
    state: Option<&Path>,
    output: Option<&Path>,
) -> Result<ClassifyReport> {
    let x = load_crossbar(cfg, state)?;
    if !x.is_fully_mapped() {
        return Err(CliError::Lifecycle(
            "crossbar has unmapped columns; run `map` first".into(),
        ));
    }
    let vectors: Vec<(String, SampleVector)> = match input {
        ClassifyInput::Reference => dataset::sample_vectors()
            .into_iter()
            .map(|v| (format!("reference:{}", v.label().expect("labelled")), v))
            .collect(),
        ClassifyInput::Class(c) => vec![(format!("reference:{c}"), dataset::sample_vector(*c))],
        ClassifyInput::File(p, label) => {
            let text = formats::read_file(p)?;
            let name = p.display().to_string();
            if formats::is_sample_file(&text) {
                let all = formats::parse_samples(p, &text, &cfg.sampling)?;
                let picked: Vec<SampleVector> = match label {
                    Some(l) => all.into_iter().filter(|v| v.label() == Some(*l)).collect(),
                    None => all,
                };
                if picked.is_empty() {
                    return Err(CliError::Parameter(format!(
                        "{name} has no vector labelled {label:?}"
                    )));
                }
                picked.into_iter().map(|v| (name.clone(), v)).collect()
            } else {
                let w = formats::parse_waveform(p, &text)?.with_label(*label);
                vec![(name, sample_waveform(&w, &cfg.sampling)?)]
            }
        }
    };
    let results = vectors
        .into_iter()
        .map(|(name, v)| classify_vector(cfg, &x, name, &v))
        .collect::<Result<Vec<_>>>()?;
    let report = ClassifyReport {
        readout: x.readout(),
        results,
    };
    let path = output
        .map(Path::to_path_buf)
        .unwrap_or_else(|| cfg.output_dir.join("classify_report.json"));
    formats::write_file(&path, &to_json(&report))?;
    Ok(report)
}

pub const MARGIN_HEADER: [&str; 7] = [
    "class",
    "p_dec",
    "p_inc",
    "winner_a",
    "runner_up_a",
    "margin",
    "flips",
];

/// Margin of the noise-free winner after a deterministic shift of every
/// competitor, per class and level pair. Negative margins mean a flip.
pub fn margin_rows(report: &SweepReport) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for c in &report.classes {
        let i = &c.currents_a;
        let w = (0..i.len()).fold(0, |b, k| if i[k] > i[b] { k } else { b });
        for &d in &report.levels {
            for &u in &report.levels {
                let winner = i[w] * (1.0 - d / 100.0);
                let runner = (0..i.len())
                    .filter(|&k| k != w)
                    .map(|k| i[k] * (1.0 + u / 100.0))
                    .fold(f64::NEG_INFINITY, f64::max);
                let margin = if winner > 0.0 {
                    (winner - runner) / winner
                } else {
                    0.0
                };
                rows.push(vec![
                    c.class.code().to_owned(),
                    d.to_string(),
                    u.to_string(),
                    winner.to_string(),
                    runner.to_string(),
                    margin.to_string(),
                    shift_flips(i, w, d / 100.0, u / 100.0).to_string(),
                ]);
            }
        }
    }
    rows
}

pub fn sweep(
    cfg: &RunConfig,
    sweep: &SweepConfig,
    state: Option<&Path>,
    input: Option<&Path>,
) -> Result<SweepReport> {
    let x = load_crossbar(cfg, state)?;
    let vectors = input_vectors(cfg, input)?;
    let report = robustness::run_sweep(&x, &vectors, sweep)?;
    let dir = &cfg.output_dir;
    formats::write_file(&dir.join("sweep_report.json"), &to_json(&report))?;
    formats::write_file(
        &dir.join("sweep_failing.csv"),
        &formats::failing_to_csv(&report.failing),
    )?;
    formats::write_file(
        &dir.join("sweep_margins.csv"),
        &formats::table_to_csv(&MARGIN_HEADER, &margin_rows(&report)),
    )?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub run: RunDescription,
    pub ledger: EnergyLedger,
    pub total_j: f64,
    pub total_si: String,
}

pub fn energy(cfg: &RunConfig, run: &RunDescription) -> Result<EnergyReport> {
    let ledger = energy_report(run, &cfg.energy)?;
    let total_j = ledger.total();
    let report = EnergyReport {
        run: run.clone(),
        ledger,
        total_j,
        total_si: photomem_core::energy::format_si(total_j),
    };
    formats::write_file(
        &cfg.output_dir.join("energy_report.json"),
        &to_json(&report),
    )?;
    formats::write_file(
        &cfg.output_dir.join("energy_ledger.csv"),
        &formats::ledger_to_csv(&report.ledger),
    )?;
    Ok(report)
}

/// Tolerance on reproduced column totals, in amperes.
pub const TOTAL_TOLERANCE_A: f64 = 0.01e-6;

#[derive(Debug, Clone, Serialize)]
pub struct CellCheck {
    pub row: usize,
    pub col: usize,
    pub expected_ohm: f64,
    pub got_ohm: f64,
    pub delta_ohm: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TotalCheck {
    pub incoming: MotionClass,
    pub col: usize,
    pub expected_a: f64,
    pub got_a: f64,
    pub delta_a: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReplayReport {
    pub readout: Readout,
    pub programming: photomem_core::ProgrammingPath,
    pub resistance: Vec<CellCheck>,
    pub totals: Vec<TotalCheck>,
    pub masks: Vec<(MotionClass, String)>,
    pub resistance_pass: bool,
    pub totals_pass: bool,
}

impl ReplayReport {
    /// Pass/fail matrices for the terminal.
    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "resistance grid ({:?} programming)\n",
            self.programming
        ));
        for r in 0..dataset::ROWS {
            s.push_str(&format!("  row {r}:"));
            for c in self.resistance.iter().filter(|c| c.row == r) {
                s.push_str(&format!(
                    "  {:>9.0} {}",
                    c.got_ohm,
                    if c.pass { "ok  " } else { "FAIL" }
                ));
            }
            s.push('\n');
        }
        s.push_str(&format!(
            "column totals ({:?} readout, tolerance 0.01 uA)\n",
            self.readout
        ));
        for class in MotionClass::ALL {
            s.push_str(&format!("  {class}:"));
            for t in self.totals.iter().filter(|t| t.incoming == class) {
                s.push_str(&format!(
                    "  {:>7.3} uA ({:+.3}) {}",
                    t.got_a * 1e6,
                    t.delta_a * 1e6,
                    if t.pass { "ok  " } else { "FAIL" }
                ));
            }
            s.push('\n');
        }
        s.push_str(&format!(
            "resistance grid: {}; column totals: {}\n",
            verdict(self.resistance_pass),
            verdict(self.totals_pass)
        ));
        s
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Re-derives the resistance grid from the reference vectors and the column
/// totals from that grid, and compares both with the embedded references.
pub fn replay_tables(cfg: &RunConfig, export: Option<&Path>) -> Result<ReplayReport> {
    let x = map_crossbar(cfg, None)?;
    let mut resistance = Vec::new();
    for r in 0..x.rows().min(dataset::ROWS) {
        for c in 0..x.cols().min(dataset::COLS) {
            let expected = dataset::expected_resistance(r, c);
            let got = x.resistance(r, c);
            resistance.push(CellCheck {
                row: r,
                col: c,
                expected_ohm: expected,
                got_ohm: got,
                delta_ohm: got - expected,
                pass: got == expected,
            });
        }
    }
    let mut totals = Vec::new();
    let mut masks = Vec::new();
    for class in MotionClass::ALL {
        let mask = activation_mask(
            &dataset::sample_vector(class),
            cfg.crossbar.read_threshold_v,
        );
        masks.push((class, mask.to_bitstring()));
        let got = x.column_currents(&mask)?;
        for (c, (&g, e)) in got
            .currents()
            .iter()
            .zip(dataset::expected_totals(class))
            .enumerate()
        {
            totals.push(TotalCheck {
                incoming: class,
                col: c,
                expected_a: e,
                got_a: g,
                delta_a: g - e,
                pass: (g - e).abs() <= TOTAL_TOLERANCE_A + 1e-15,
            });
        }
    }
    let report = ReplayReport {
        readout: x.readout(),
        programming: x.programming_path(),
        resistance_pass: resistance.iter().all(|c| c.pass),
        totals_pass: totals.iter().all(|t| t.pass),
        resistance,
        totals,
        masks,
    };
    formats::write_file(
        &cfg.output_dir.join("replay_report.json"),
        &to_json(&report),
    )?;
    if let Some(dir) = export {
        formats::write_file(
            &dir.join("program_curve.csv"),
            &formats::program_curve_to_csv(&dataset::PROGRAM_POINTS),
        )?;
        formats::write_file(
            &dir.join("read_curve.csv"),
            &formats::read_curve_to_csv(&dataset::READ_POINTS),
        )?;
        formats::write_file(
            &dir.join("replay_table.csv"),
            &formats::replay_table_to_csv(&dataset::replay_table()),
        )?;
        formats::write_file(
            &dir.join("samples.csv"),
            &formats::samples_to_csv(&dataset::sample_vectors()),
        )?;
    }
    Ok(report)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}
