use std::path::PathBuf;

use kgpilot::classical::{integrate_classical, ClassicalPath, CONJUGATION_TOLERANCE};
use kgpilot::guidance::DEFAULT_SCAN_POINTS;
use kgpilot::stressenergy::FlowDegeneracy;
use kgpilot::{
    effective_mass_negative_intervals, eigen_flow, eval_field, fermi_transport, gauss_flux,
    integrate, negativity_scan, polar, roots_of_s0, stress_tensor, superluminal_intervals,
    v_debroglie, v_energy, v_modified, DyadFrame, EigenFlow, Error, EventKind, GaussFlux,
    InitialCondition, StopReason, TrajectoryRecord, WaveState,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::output::{cell, csv, json, num, write_atomic};
use crate::CliError;

pub const SCAN_COLUMNS: [&str; 12] = [
    "x",
    "re_phi",
    "im_phi",
    "dens",
    "S0",
    "S1",
    "j0",
    "v_debroglie",
    "v_modified",
    "v_energy",
    "eff_mass_sq",
    "flags",
];
pub const TRACE_COLUMNS: [&str; 5] = ["tau", "x", "t", "dtdtau", "dxdtau"];
pub const DYAD_COLUMNS: [&str; 7] = ["tau", "x", "t", "e0_t", "e0_x", "e1_t", "e1_x"];
pub const CLASSICAL_COLUMNS: [&str; 5] = ["X", "x", "p", "H", "zeta"];

/// Files written by a command, plus human-readable notes.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub notes: Vec<String>,
}

struct Writer {
    dir: PathBuf,
    outcome: Outcome,
}

impl Writer {
    fn new(cfg: &RunConfig) -> Result<Self, CliError> {
        std::fs::create_dir_all(&cfg.out)?;
        Ok(Self {
            dir: cfg.out.clone(),
            outcome: Outcome::default(),
        })
    }

    fn put(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        write_atomic(&path, contents)?;
        self.outcome.files.push(path);
        Ok(())
    }

    fn config(&mut self, cfg: &RunConfig) -> Result<(), CliError> {
        self.put("run_config.json", &json(cfg))
    }
}

fn uniform(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub x: f64,
    pub re_phi: f64,
    pub im_phi: f64,
    pub dens: f64,
    #[serde(rename = "S0")]
    pub s0: Option<f64>,
    #[serde(rename = "S1")]
    pub s1: Option<f64>,
    pub j0: Option<f64>,
    pub v_debroglie: Option<f64>,
    pub v_modified: Option<f64>,
    pub v_energy: Option<f64>,
    pub eff_mass_sq: Option<f64>,
    pub flags: Vec<&'static str>,
}

impl ScanRow {
    fn cells(&self) -> Vec<String> {
        vec![
            num(self.x),
            num(self.re_phi),
            num(self.im_phi),
            num(self.dens),
            cell(self.s0),
            cell(self.s1),
            cell(self.j0),
            cell(self.v_debroglie),
            cell(self.v_modified),
            cell(self.v_energy),
            cell(self.eff_mass_sq),
            self.flags.join(";"),
        ]
    }
}

fn flag(flags: &mut Vec<&'static str>, f: &'static str) {
    if !flags.contains(&f) {
        flags.push(f);
    }
}

/// One scan row; `S0`, `S1` are the covariant phase gradients.
pub fn scan_row(state: &WaveState<f64>, x: f64, t: f64, eps_node: f64) -> Result<ScanRow, Error> {
    let f = eval_field(state, x, t)?;
    let p = polar(&f, eps_node);
    let m0 = state.rest_mass();
    let mut flags = Vec::new();
    let j0 = (m0 > 0.0).then(|| -(f.value.conj() * f.dt).im / m0);
    if j0.is_none() {
        flag(&mut flags, "degenerate");
    }
    let mut row = ScanRow {
        x,
        re_phi: f.value.re,
        im_phi: f.value.im,
        dens: f.density(),
        s0: None,
        s1: None,
        j0,
        v_debroglie: None,
        v_modified: None,
        v_energy: None,
        eff_mass_sq: None,
        flags,
    };
    if p.near_node {
        flag(&mut row.flags, "node");
        row.j0 = None;
        return Ok(row);
    }
    row.s0 = Some(p.s_cov[0]);
    row.s1 = Some(p.s_cov[1]);
    row.eff_mass_sq = Some(m0 * m0 + p.box_r_over_r);
    match (v_debroglie(&p), v_modified(&p)) {
        (Ok(a), Ok(b)) => {
            row.v_debroglie = Some(a);
            row.v_modified = Some(b);
        }
        _ => flag(&mut row.flags, "pole"),
    }
    match stress_tensor(&p, m0).and_then(|t| v_energy(&t)) {
        Ok(v) => row.v_energy = Some(v),
        Err(_) => flag(&mut row.flags, "degenerate"),
    }
    Ok(row)
}

pub fn scan_rows(cfg: &RunConfig) -> Result<Vec<ScanRow>, CliError> {
    let state = cfg.state()?;
    let (lo, hi) = cfg.x_range()?;
    let eps = state.node_tolerance(cfg.t, cfg.grid_n.max(DEFAULT_SCAN_POINTS));
    let xs = uniform(lo, hi, cfg.grid_n);
    let rows: Result<Vec<ScanRow>, Error> = xs
        .par_iter()
        .map(|&x| scan_row(&state, x, cfg.t, eps))
        .collect();
    Ok(rows?)
}

pub fn cmd_scan(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rows = scan_rows(cfg)?;
    let mut w = Writer::new(cfg)?;
    match cfg.format {
        Format::Csv => w.put(
            "scan.csv",
            &csv(&SCAN_COLUMNS, rows.iter().map(ScanRow::cells)),
        )?,
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                t: f64,
                rows: &'a [ScanRow],
            }
            w.put(
                "scan.json",
                &json(&Doc {
                    t: cfg.t,
                    rows: &rows,
                }),
            )?
        }
    }
    w.config(cfg)?;
    w.outcome
        .notes
        .push(format!("{} rows at t = {}", rows.len(), cfg.t));
    Ok(w.outcome)
}

/// Result of one initial condition in a trace batch.
pub struct TraceItem {
    pub ic: InitialCondition<f64>,
    pub record: Result<TrajectoryRecord<f64>, Error>,
    pub dyad: Option<Result<Vec<DyadFrame<f64>>, Error>>,
}

pub fn trace_batch(cfg: &RunConfig) -> Result<Vec<TraceItem>, CliError> {
    let state = cfg.state()?;
    let integ = cfg.integrator()?;
    let ics = cfg.initial_conditions()?;
    Ok(ics
        .par_iter()
        .map(|&ic| {
            let record = integrate(&state, cfg.law, ic, &integ);
            let dyad = match (&record, cfg.dyad) {
                (Ok(r), true) => Some(fermi_transport(r, DyadFrame::standard())),
                _ => None,
            };
            TraceItem { ic, record, dyad }
        })
        .collect())
}

#[derive(Serialize)]
struct EventOut {
    kind: EventKind,
    tau: f64,
    x: f64,
    t: f64,
}

#[derive(Serialize)]
struct TraceEntry {
    index: usize,
    x0: f64,
    t0: f64,
    file: Option<String>,
    dyad_file: Option<String>,
    samples: usize,
    stop: Option<StopReason>,
    self_intersections: usize,
    t_monotone: Option<bool>,
    max_abs_slope: Option<f64>,
    max_dyad_drift: Option<f64>,
    events: Vec<EventOut>,
    error: Option<String>,
    dyad_error: Option<String>,
}

#[derive(Serialize)]
struct TraceSidecar {
    law: String,
    step: f64,
    tau_span: f64,
    trajectories: Vec<TraceEntry>,
    failures: usize,
    self_intersections: usize,
}

fn trace_table(r: &TrajectoryRecord<f64>, format: Format) -> String {
    match format {
        Format::Csv => csv(
            &TRACE_COLUMNS,
            r.samples
                .iter()
                .map(|s| vec![num(s.tau), num(s.x), num(s.t), num(s.dtau_t), num(s.dtau_x)]),
        ),
        Format::Json => json(
            &r.samples
                .iter()
                .map(|s| [s.tau, s.x, s.t, s.dtau_t, s.dtau_x])
                .collect::<Vec<_>>(),
        ),
    }
}

fn dyad_table(r: &TrajectoryRecord<f64>, frames: &[DyadFrame<f64>], format: Format) -> String {
    let rows = r.samples.iter().zip(frames).map(|(s, f)| {
        [
            s.tau,
            s.x,
            s.t,
            f.e_time.t,
            f.e_time.x,
            f.e_space.t,
            f.e_space.x,
        ]
    });
    match format {
        Format::Csv => csv(
            &DYAD_COLUMNS,
            rows.map(|r| r.iter().map(|&v| num(v)).collect()),
        ),
        Format::Json => json(&rows.collect::<Vec<_>>()),
    }
}

pub fn cmd_trace(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let batch = trace_batch(cfg)?;
    let mut w = Writer::new(cfg)?;
    let ext = match cfg.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let mut entries = Vec::with_capacity(batch.len());
    for (i, item) in batch.iter().enumerate() {
        let mut e = TraceEntry {
            index: i,
            x0: item.ic.x0,
            t0: item.ic.t0,
            file: None,
            dyad_file: None,
            samples: 0,
            stop: None,
            self_intersections: 0,
            t_monotone: None,
            max_abs_slope: None,
            max_dyad_drift: None,
            events: vec![],
            error: None,
            dyad_error: None,
        };
        match &item.record {
            Ok(r) => {
                let name = format!("trajectory_{i:02}.{ext}");
                w.put(&name, &trace_table(r, cfg.format))?;
                e.file = Some(name);
                e.samples = r.samples.len();
                e.stop = Some(r.stop);
                e.self_intersections = r.count(EventKind::SelfIntersection);
                e.t_monotone = Some(r.t_is_monotone());
                e.max_abs_slope = Some(
                    r.samples
                        .iter()
                        .map(|s| (s.dtau_x / s.dtau_t).abs())
                        .fold(0.0, f64::max),
                );
                e.events = r
                    .events
                    .iter()
                    .map(|v| EventOut {
                        kind: v.kind,
                        tau: v.tau,
                        x: v.x,
                        t: v.t,
                    })
                    .collect();
                match &item.dyad {
                    Some(Ok(frames)) => {
                        let name = format!("dyad_{i:02}.{ext}");
                        w.put(&name, &dyad_table(r, frames, cfg.format))?;
                        e.dyad_file = Some(name);
                        e.max_dyad_drift =
                            Some(frames.iter().map(|f| f.drift()).fold(0.0, f64::max));
                    }
                    Some(Err(err)) => e.dyad_error = Some(err.to_string()),
                    None => {}
                }
            }
            Err(err) => e.error = Some(err.to_string()),
        }
        entries.push(e);
    }
    let failures = entries.iter().filter(|e| e.error.is_some()).count();
    let loops = entries.iter().map(|e| e.self_intersections).sum();
    let sidecar = TraceSidecar {
        law: cfg.law.to_string(),
        step: cfg.step,
        tau_span: cfg.tau_span,
        trajectories: entries,
        failures,
        self_intersections: loops,
    };
    w.put("events.json", &json(&sidecar))?;
    w.config(cfg)?;
    w.outcome.notes.push(format!(
        "{} trajectories under {}, {failures} failed, {loops} self-intersections",
        batch.len(),
        cfg.law
    ));
    if failures == batch.len() {
        return Err(CliError::Runtime(format!(
            "all {failures} initial conditions failed; see events.json"
        )));
    }
    Ok(w.outcome)
}

#[derive(Debug, Serialize)]
pub struct RootEntry {
    pub x: f64,
    /// `|S_0|` re-evaluated at the refined root.
    pub residual: f64,
}

#[derive(Debug, Serialize)]
pub struct DegeneracyEntry {
    pub x: f64,
    pub kind: &'static str,
}

#[derive(Debug, Serialize)]
pub struct FluxEntry {
    pub rect: [f64; 4],
    pub edge_n: usize,
    pub bottom: f64,
    pub top: f64,
    pub left: f64,
    pub right: f64,
    pub net: f64,
}

#[derive(Debug, Serialize)]
pub struct Diagnosis {
    pub t: f64,
    pub grid_n: usize,
    pub s0_roots: Vec<RootEntry>,
    pub superluminal_intervals: Vec<(f64, f64)>,
    pub j0_negative_intervals: Vec<(f64, f64)>,
    pub effective_mass_negative_intervals: Vec<(f64, f64)>,
    pub eigen_degeneracies: Vec<DegeneracyEntry>,
    pub gauss_flux: FluxEntry,
}

pub fn diagnose(cfg: &RunConfig) -> Result<Diagnosis, CliError> {
    let state = cfg.state()?;
    let (lo, hi) = cfg.x_range()?;
    let n = cfg.grid_n;
    let t = cfg.t;
    let s0_roots = roots_of_s0(&state, t, (lo, hi), n)
        .into_iter()
        .map(|x| {
            let residual = state
                .polar_at(x, t, 0.0)
                .map(|p| p.s_cov[0].abs())
                .unwrap_or(f64::NAN);
            RootEntry { x, residual }
        })
        .collect();
    let eps = state.node_tolerance(t, n.max(DEFAULT_SCAN_POINTS));
    let eigen_degeneracies = uniform(lo, hi, n)
        .par_iter()
        .filter_map(|&x| {
            let p = state.polar_at(x, t, eps).ok()?;
            if p.near_node {
                return None;
            }
            let kind = match eigen_flow(&stress_tensor(&p, state.rest_mass()).ok()?) {
                EigenFlow::Complex { .. } => "complex",
                EigenFlow::Real(pair) if pair.degeneracy == Some(FlowDegeneracy::Null) => "null",
                EigenFlow::Real(_) => return None,
            };
            Some(DegeneracyEntry { x, kind })
        })
        .collect();
    let rect = cfg.flux_rect();
    let GaussFlux {
        bottom,
        top,
        left,
        right,
        net,
    } = gauss_flux(&state, &rect, cfg.flux_n)?;
    Ok(Diagnosis {
        t,
        grid_n: n,
        s0_roots,
        superluminal_intervals: superluminal_intervals(&state, t, (lo, hi), n),
        j0_negative_intervals: negativity_scan(&state, t, (lo, hi), n),
        effective_mass_negative_intervals: effective_mass_negative_intervals(
            &state,
            t,
            (lo, hi),
            n,
        ),
        eigen_degeneracies,
        gauss_flux: FluxEntry {
            rect: cfg.rect,
            edge_n: cfg.flux_n,
            bottom,
            top,
            left,
            right,
            net,
        },
    })
}

pub fn cmd_diagnose(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let report = diagnose(cfg)?;
    let mut w = Writer::new(cfg)?;
    w.put("diagnose.json", &json(&report))?;
    w.config(cfg)?;
    w.outcome.notes.push(format!(
        "{} S0 roots, gauss flux net {:e}",
        report.s0_roots.len(),
        report.gauss_flux.net
    ));
    Ok(w.outcome)
}

fn classical_table(path: &ClassicalPath<f64>, zeta: i8, format: Format) -> String {
    let rows = path
        .samples
        .iter()
        .map(|s| [s.time, s.x, s.momentum, s.hamiltonian]);
    match format {
        Format::Csv => csv(
            &CLASSICAL_COLUMNS,
            rows.map(|r| {
                let mut v: Vec<String> = r.iter().map(|&c| num(c)).collect();
                v.push(zeta.to_string());
                v
            }),
        ),
        Format::Json => json(
            &rows
                .map(|r| (r[0], r[1], r[2], r[3], zeta))
                .collect::<Vec<_>>(),
        ),
    }
}

#[derive(Serialize)]
struct ClassicalSummary {
    samples: usize,
    max_shell_drift: f64,
    conjugate_max_deviation: Option<f64>,
    conjugate_agree: Option<bool>,
}

pub fn cmd_classical(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let s0 = cfg.classical_state()?;
    let pot = &cfg.classical.potential;
    let runtime = |e: Error| match e {
        Error::InvalidConfig(_) => CliError::Core(e),
        other => CliError::Runtime(other.to_string()),
    };
    let path = integrate_classical(&s0, pot, cfg.classical.x_span, cfg.step).map_err(runtime)?;
    let twin = if cfg.classical.conjugate {
        let flipped = kgpilot::ClassicalState {
            sector: kgpilot::Sector::from_zeta(-i64::from(s0.sector.zeta()))?,
            charge: -s0.charge,
            ..s0
        };
        Some((
            flipped,
            integrate_classical(&flipped, pot, cfg.classical.x_span, cfg.step).map_err(runtime)?,
        ))
    } else {
        None
    };
    let ext = match cfg.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let mut w = Writer::new(cfg)?;
    w.put(
        &format!("classical.{ext}"),
        &classical_table(&path, s0.sector.zeta(), cfg.format),
    )?;
    let mut summary = ClassicalSummary {
        samples: path.samples.len(),
        max_shell_drift: path.max_shell_drift(),
        conjugate_max_deviation: None,
        conjugate_agree: None,
    };
    if let Some((flipped, other)) = &twin {
        w.put(
            &format!("classical_conjugate.{ext}"),
            &classical_table(other, flipped.sector.zeta(), cfg.format),
        )?;
        let dev = path
            .samples
            .iter()
            .zip(&other.samples)
            .fold(0.0f64, |m, (a, b)| {
                m.max((a.x - b.x).abs())
                    .max((a.momentum - b.momentum).abs())
            });
        summary.conjugate_max_deviation = Some(dev);
        summary.conjugate_agree = Some(dev <= CONJUGATION_TOLERANCE);
    }
    w.put("classical_summary.json", &json(&summary))?;
    w.config(cfg)?;
    w.outcome.notes.push(format!(
        "{} samples, max shell drift {:e}",
        summary.samples, summary.max_shell_drift
    ));
    Ok(w.outcome)
}
