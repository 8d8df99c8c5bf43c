// SPDX-License-Identifier: Apache-2.0
//! CSV file formats. Every file has a header row and SI units named by the
//! column suffix.

use std::path::Path;
use std::str::FromStr;

use csv::StringRecord;
use photomem_core::energy::EnergyLedger;
use photomem_core::robustness::FailingScenario;
use photomem_core::surface::WaveformPoint;
use photomem_core::{
    Crossbar, DeviceCurves, MotionClass, ReplayTable, SampleVector, SamplingPlan, SynapseMode,
    SynapseState, Waveform, WaveformSource,
};

use crate::error::{CliError, Result};

pub const WAVEFORM_HEADER: [&str; 2] = ["time_ms", "voltage_v"];
pub const CROSSBAR_HEADER: [&str; 5] = ["row", "col", "mode", "resistance_ohm", "label"];
pub const PROGRAM_HEADER: [&str; 2] = ["v_set_v", "resistance_ohm"];
pub const READ_HEADER: [&str; 2] = ["resistance_ohm", "current_a"];
pub const REPLAY_HEADER: [&str; 3] = ["row", "col", "current_a"];
pub const FAILING_HEADER: [&str; 7] = [
    "class",
    "p_dec",
    "p_inc",
    "competitor",
    "variant",
    "winner_before",
    "winner_after",
];
pub const LEDGER_HEADER: [&str; 3] = ["phase", "label", "energy_j"];

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("ascii output")
}

fn row(w: &mut csv::Writer<Vec<u8>>, fields: &[String]) {
    w.write_record(fields).expect("in-memory writer");
}

fn header(w: &mut csv::Writer<Vec<u8>>, names: &[&str]) {
    w.write_record(names).expect("in-memory writer");
}

fn label_str(label: Option<MotionClass>) -> String {
    label.map(|l| l.code().to_owned()).unwrap_or_default()
}

/// Data rows with their 1-based line numbers, after checking the header.
fn records(path: &Path, text: &str, expected: &[&str]) -> Result<Vec<(u64, StringRecord)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let found = rdr
        .headers()
        .map_err(|e| CliError::parse(path, 1, None, e.to_string()))?
        .clone();
    if found.is_empty() || (found.len() == 1 && found[0].is_empty()) {
        return Err(CliError::parse(path, 1, None, "file is empty"));
    }
    let found_names: Vec<&str> = found.iter().map(str::trim).collect();
    if found_names != expected {
        return Err(CliError::parse(
            path,
            1,
            None,
            format!(
                "expected header {}, found {}",
                expected.join(","),
                found_names.join(",")
            ),
        ));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::parse(path, line, None, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        out.push((line, rec));
    }
    if out.is_empty() {
        return Err(CliError::parse(path, 2, None, "no data rows"));
    }
    Ok(out)
}

fn field<T: FromStr>(
    path: &Path,
    line: u64,
    rec: &StringRecord,
    idx: usize,
    name: &str,
) -> Result<T> {
    let raw = rec.get(idx).unwrap_or("").trim();
    raw.parse()
        .map_err(|_| CliError::parse(path, line, Some(name), format!("cannot parse {raw:?}")))
}

fn opt_label(path: &Path, line: u64, raw: &str, name: &str) -> Result<Option<MotionClass>> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(None);
    }
    raw.parse()
        .map(Some)
        .map_err(|_| CliError::parse(path, line, Some(name), format!("unknown class {raw:?}")))
}

pub fn waveform_to_csv(w: &Waveform) -> String {
    let mut out = writer();
    header(&mut out, &WAVEFORM_HEADER);
    for p in w.points() {
        row(&mut out, &[p.time_ms.to_string(), p.voltage_v.to_string()]);
    }
    finish(out)
}

pub fn parse_waveform(path: &Path, text: &str) -> Result<Waveform> {
    let mut points = Vec::new();
    for (line, rec) in records(path, text, &WAVEFORM_HEADER)? {
        let t = field(path, line, &rec, 0, WAVEFORM_HEADER[0])?;
        let v = field(path, line, &rec, 1, WAVEFORM_HEADER[1])?;
        points.push(WaveformPoint::new(t, v));
    }
    Ok(Waveform::new(points, WaveformSource::Recorded, None)?)
}

pub fn read_waveform(path: &Path) -> Result<Waveform> {
    parse_waveform(path, &read_file(path)?)
}

pub fn sample_header(count: usize) -> Vec<String> {
    std::iter::once("label".to_owned())
        .chain((0..count).map(|i| format!("a{i}_v")))
        .collect()
}

pub fn samples_to_csv(vectors: &[SampleVector]) -> String {
    let count = vectors.first().map_or(0, SampleVector::len);
    let mut out = writer();
    row(&mut out, &sample_header(count));
    for v in vectors {
        let mut fields = vec![label_str(v.label())];
        fields.extend(v.amplitudes().iter().map(f64::to_string));
        row(&mut out, &fields);
    }
    finish(out)
}

pub fn parse_samples(path: &Path, text: &str, plan: &SamplingPlan) -> Result<Vec<SampleVector>> {
    let names = sample_header(plan.count);
    let expected: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut out = Vec::new();
    for (line, rec) in records(path, text, &expected)? {
        let label = opt_label(path, line, rec.get(0).unwrap_or(""), "label")?;
        let amps = (1..=plan.count)
            .map(|i| field(path, line, &rec, i, &names[i]))
            .collect::<Result<Vec<f64>>>()?;
        out.push(SampleVector::new(amps, *plan, label)?);
    }
    Ok(out)
}

pub fn read_samples(path: &Path, plan: &SamplingPlan) -> Result<Vec<SampleVector>> {
    parse_samples(path, &read_file(path)?, plan)
}

/// True when the first line looks like a sample-vector file.
pub fn is_sample_file(text: &str) -> bool {
    text.lines()
        .next()
        .is_some_and(|l| l.trim_start().starts_with("label"))
}

pub fn crossbar_to_csv(x: &Crossbar) -> String {
    let mut out = writer();
    header(&mut out, &CROSSBAR_HEADER);
    for r in 0..x.rows() {
        for c in 0..x.cols() {
            let cell = x.cell(r, c);
            row(
                &mut out,
                &[
                    r.to_string(),
                    c.to_string(),
                    cell.mode.as_str().to_owned(),
                    cell.resistance_ohm.to_string(),
                    label_str(x.labels()[c]),
                ],
            );
        }
    }
    finish(out)
}

/// Rebuilds a crossbar from its state dump. Replay and readout settings are
/// not part of the dump.
pub fn parse_crossbar(path: &Path, text: &str, curves: DeviceCurves) -> Result<Crossbar> {
    let mut entries = Vec::new();
    for (line, rec) in records(path, text, &CROSSBAR_HEADER)? {
        let r: usize = field(path, line, &rec, 0, "row")?;
        let c: usize = field(path, line, &rec, 1, "col")?;
        let mode_raw = rec.get(2).unwrap_or("").trim();
        let mode = SynapseMode::parse(mode_raw).ok_or_else(|| {
            CliError::parse(
                path,
                line,
                Some("mode"),
                format!("unknown mode {mode_raw:?}"),
            )
        })?;
        let ohm: f64 = field(path, line, &rec, 3, "resistance_ohm")?;
        let label = opt_label(path, line, rec.get(4).unwrap_or(""), "label")?;
        entries.push((
            line,
            r,
            c,
            SynapseState {
                mode,
                resistance_ohm: ohm,
            },
            label,
        ));
    }
    let rows = entries.iter().map(|e| e.1).max().unwrap_or(0) + 1;
    let cols = entries.iter().map(|e| e.2).max().unwrap_or(0) + 1;
    let mut cells: Vec<Option<SynapseState>> = vec![None; rows * cols];
    let mut labels: Vec<Option<Option<MotionClass>>> = vec![None; cols];
    for (line, r, c, state, label) in entries {
        let slot = &mut cells[r * cols + c];
        if slot.is_some() {
            return Err(CliError::parse(
                path,
                line,
                None,
                format!("cell ({r}, {c}) listed twice"),
            ));
        }
        *slot = Some(state);
        match labels[c] {
            None => labels[c] = Some(label),
            Some(prev) if prev != label => {
                return Err(CliError::parse(
                    path,
                    line,
                    Some("label"),
                    format!("column {c} has conflicting labels"),
                ))
            }
            Some(_) => {}
        }
    }
    let cells = cells
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            s.ok_or_else(|| {
                CliError::parse(
                    path,
                    0,
                    None,
                    format!("cell ({}, {}) missing", i / cols, i % cols),
                )
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let labels = labels.into_iter().map(Option::flatten).collect();
    Ok(Crossbar::from_cells(rows, cols, cells, labels, curves)?)
}

pub fn read_crossbar(path: &Path, curves: DeviceCurves) -> Result<Crossbar> {
    parse_crossbar(path, &read_file(path)?, curves)
}

fn pairs_to_csv(names: &[&str], points: &[(f64, f64)]) -> String {
    let mut out = writer();
    header(&mut out, names);
    for (a, b) in points {
        row(&mut out, &[a.to_string(), b.to_string()]);
    }
    finish(out)
}

fn parse_pairs(path: &Path, text: &str, names: &[&str]) -> Result<Vec<(f64, f64)>> {
    records(path, text, names)?
        .into_iter()
        .map(|(line, rec)| {
            Ok((
                field(path, line, &rec, 0, names[0])?,
                field(path, line, &rec, 1, names[1])?,
            ))
        })
        .collect()
}

pub fn program_curve_to_csv(points: &[(f64, f64)]) -> String {
    pairs_to_csv(&PROGRAM_HEADER, points)
}

pub fn read_curve_to_csv(points: &[(f64, f64)]) -> String {
    pairs_to_csv(&READ_HEADER, points)
}

pub fn read_program_curve(path: &Path) -> Result<Vec<(f64, f64)>> {
    parse_pairs(path, &read_file(path)?, &PROGRAM_HEADER)
}

pub fn read_read_curve(path: &Path) -> Result<Vec<(f64, f64)>> {
    parse_pairs(path, &read_file(path)?, &READ_HEADER)
}

pub fn replay_table_to_csv(t: &ReplayTable) -> String {
    let mut out = writer();
    header(&mut out, &REPLAY_HEADER);
    for r in 0..t.rows() {
        for c in 0..t.cols() {
            row(
                &mut out,
                &[r.to_string(), c.to_string(), t.get(r, c).to_string()],
            );
        }
    }
    finish(out)
}

pub fn parse_replay_table(path: &Path, text: &str) -> Result<ReplayTable> {
    let mut entries = Vec::new();
    for (line, rec) in records(path, text, &REPLAY_HEADER)? {
        let r: usize = field(path, line, &rec, 0, "row")?;
        let c: usize = field(path, line, &rec, 1, "col")?;
        let i: f64 = field(path, line, &rec, 2, "current_a")?;
        entries.push((r, c, i));
    }
    let rows = entries.iter().map(|e| e.0).max().unwrap_or(0) + 1;
    let cols = entries.iter().map(|e| e.1).max().unwrap_or(0) + 1;
    if entries.len() != rows * cols {
        return Err(CliError::parse(
            path,
            0,
            None,
            format!(
                "{} entries do not fill a {rows}x{cols} table",
                entries.len()
            ),
        ));
    }
    let mut grid = vec![f64::NAN; rows * cols];
    for (r, c, i) in entries {
        grid[r * cols + c] = i;
    }
    Ok(ReplayTable::new(rows, cols, grid)?)
}

pub fn read_replay_table(path: &Path) -> Result<ReplayTable> {
    parse_replay_table(path, &read_file(path)?)
}

pub fn failing_to_csv(failing: &[FailingScenario]) -> String {
    let mut out = writer();
    header(&mut out, &FAILING_HEADER);
    for f in failing {
        row(
            &mut out,
            &[
                f.class.code().to_owned(),
                f.p_dec.to_string(),
                f.p_inc.to_string(),
                label_str(f.competitor),
                f.variant.to_string(),
                label_str(f.winner_before),
                label_str(f.winner_after),
            ],
        );
    }
    finish(out)
}

pub fn ledger_to_csv(l: &EnergyLedger) -> String {
    let mut out = writer();
    header(&mut out, &LEDGER_HEADER);
    for e in l.entries() {
        row(
            &mut out,
            &[
                e.phase.as_str().to_owned(),
                e.label.clone(),
                e.energy_j.to_string(),
            ],
        );
    }
    finish(out)
}

/// Generic header-plus-rows writer for report tables.
pub fn table_to_csv(names: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = writer();
    header(&mut out, names);
    for r in rows {
        row(&mut out, r);
    }
    finish(out)
}
