//! Single-point pipeline, grid sweeps and their tabular output.

mod config;
mod presets;
mod table;

pub use config::{parse_config, parse_config_with, CouplingMode, DriveConfig};
pub use presets::{preset, presets, Preset};
pub use table::{emit, emit_to_path, Cell, Format, ResultTable};

use rayon::prelude::*;
use serde::Serialize;

use crate::constants::TWO_PI;
use crate::error::{Error, Result};
use crate::lyapunov::{self, CovarianceMatrix};
use crate::mean_field::{self, SteadyAmplitudes};
use crate::measures::{self, MeasureKind, MeasureSet};
use crate::model::LinearModel;
use crate::params::{lookup, ParamSpec, SystemParams};

/// How a point is evaluated, independent of where it sits in a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub coupling: CouplingMode,
    pub drives: DriveConfig,
    pub measures: Vec<MeasureKind>,
}

impl Default for Evaluation {
    fn default() -> Self {
        Self {
            coupling: CouplingMode::Direct,
            drives: DriveConfig::default(),
            measures: MeasureKind::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureReport {
    pub stable: bool,
    /// Largest real part of the drift spectrum, rad/s.
    pub max_real: f64,
    /// Absent for unstable points.
    pub measures: Option<MeasureSet>,
    /// Parameters the drift matrix was built from.
    pub params: SystemParams,
    pub mean_field: Option<SteadyAmplitudes>,
}

impl MeasureReport {
    pub fn reason(&self) -> Option<&'static str> {
        (!self.stable).then_some("unstable")
    }
}

/// Resolve parameters, build the model, gate on stability, solve for the
/// covariance and evaluate the requested measures.
pub fn run_point(params: &SystemParams, eval: &Evaluation) -> Result<MeasureReport> {
    params.validate()?;
    let (params, mean_field) = match eval.coupling {
        CouplingMode::Direct => (params.clone(), None),
        CouplingMode::MeanField => {
            let drives = eval.drives.resolve(params);
            let sol = mean_field::solve_self_consistent(params, &drives)
                .map_err(|e| e.in_stage("mean-field"))?;
            let resolved = mean_field::resolve(params, &sol.amplitudes)
                .map_err(|e| e.in_stage("mean-field"))?;
            (resolved, Some(sol.amplitudes))
        }
    };
    let model = LinearModel::<f64>::new(&params).map_err(|e| e.in_stage("model-core"))?;
    let stability =
        lyapunov::stability_check(&model.drift).map_err(|e| e.in_stage("lyapunov-engine"))?;
    if !stability.stable {
        return Ok(MeasureReport {
            stable: false,
            max_real: stability.max_real,
            measures: None,
            params,
            mean_field,
        });
    }
    let cov = lyapunov::solve_lyapunov(&model.drift, &model.diffusion)
        .map_err(|e| e.in_stage("lyapunov-engine"))?;
    check_physical(&cov).map_err(|e| e.in_stage("lyapunov-engine"))?;
    let measures = MeasureSet::compute(&cov, &eval.measures)
        .map_err(|e| e.in_stage("entanglement-measures"))?;
    Ok(MeasureReport {
        stable: true,
        max_real: stability.max_real,
        measures: Some(measures),
        params,
        mean_field,
    })
}

/// Steady state of the full system, for callers that want `V` itself.
pub fn steady_state(params: &SystemParams) -> Result<CovarianceMatrix> {
    let model = LinearModel::<f64>::new(params)?;
    let cov = lyapunov::solve_lyapunov(&model.drift, &model.diffusion)?;
    check_physical(&cov)?;
    Ok(cov)
}

fn check_physical(cov: &CovarianceMatrix) -> Result<()> {
    let nu = cov.symplectic_eigenvalues()?[0];
    if nu < 0.5 - 1e-8 {
        return Err(Error::Nonphysical(format!(
            "steady state violates the uncertainty relation (smallest symplectic eigenvalue {nu:.6})"
        )));
    }
    Ok(())
}

/// A linear grid axis over one registry parameter, in configuration units.
#[derive(Clone, Debug)]
pub struct Axis {
    pub param: &'static ParamSpec,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(param: &str, start: f64, stop: f64, count: usize) -> Result<Self> {
        let param = lookup(param)?;
        if count < 2 {
            return Err(Error::Config(format!(
                "axis `{}` needs count ≥ 2, got {count}",
                param.name
            )));
        }
        if !start.is_finite() || !stop.is_finite() {
            return Err(Error::Config(format!(
                "axis `{}` has non-finite bounds",
                param.name
            )));
        }
        Ok(Self {
            param,
            start,
            stop,
            count,
        })
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            return self.stop;
        }
        self.start + (self.stop - self.start) * i as f64 / (self.count - 1) as f64
    }

    pub fn header(&self) -> String {
        format!("{} [{}]", self.param.name, self.param.unit.label())
    }
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    /// Parameters not set by an axis.
    pub base: SystemParams,
    pub eval: Evaluation,
    /// Evaluate each point at +|Δ̂_B| and −|Δ̂_B| and report contrast ratios.
    pub nonreciprocity: bool,
    /// Zero axes evaluate the base point once; row-major over the rest.
    pub axes: Vec<Axis>,
}

impl SweepSpec {
    pub fn new(base: SystemParams) -> Self {
        Self {
            base,
            eval: Evaluation::default(),
            nonreciprocity: false,
            axes: Vec::new(),
        }
    }

    pub fn with_axis(mut self, param: &str, start: f64, stop: f64, count: usize) -> Result<Self> {
        self.axes.push(Axis::new(param, start, stop, count)?);
        self.check()?;
        Ok(self)
    }

    pub fn check(&self) -> Result<()> {
        if self.axes.len() > 2 {
            return Err(Error::Config("at most two sweep axes are supported".into()));
        }
        if self.axes.len() == 2 && self.axes[0].param.name == self.axes[1].param.name {
            return Err(Error::Config(format!(
                "both axes sweep `{}`",
                self.axes[0].param.name
            )));
        }
        if self.eval.measures.is_empty() {
            return Err(Error::Config("no measures requested".into()));
        }
        self.base
            .validate()
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Axis coordinates of grid point `k` in row-major order.
    pub fn coordinates(&self, mut k: usize) -> Vec<f64> {
        let mut idx = vec![0; self.axes.len()];
        for (slot, axis) in idx.iter_mut().zip(&self.axes).rev() {
            *slot = k % axis.count;
            k /= axis.count;
        }
        idx.iter()
            .zip(&self.axes)
            .map(|(&i, a)| a.value(i))
            .collect()
    }

    pub fn params_at(&self, coords: &[f64]) -> Result<SystemParams> {
        let mut p = self.base.clone();
        for (axis, &v) in self.axes.iter().zip(coords) {
            p.set(axis.param.name, v)?;
        }
        Ok(p)
    }

    pub fn columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = self.axes.iter().map(Axis::header).collect();
        let status = ["stable", "reason", "max_re [Hz]"];
        let measures = measures::column_names(&self.eval.measures);
        if self.nonreciprocity {
            for suffix in ["pos", "neg"] {
                cols.extend(status.iter().map(|s| suffixed(s, suffix)));
                cols.extend(measures.iter().map(|s| suffixed(s, suffix)));
            }
            cols.extend(contrast_columns(&self.eval.measures));
        } else {
            cols.extend(status.iter().map(|s| s.to_string()));
            cols.extend(measures);
        }
        cols
    }
}

fn suffixed(name: &str, suffix: &str) -> String {
    match name.split_once(' ') {
        Some((head, unit)) => format!("{head}_{suffix} {unit}"),
        None => format!("{name}_{suffix}"),
    }
}

fn contrast_columns(kinds: &[MeasureKind]) -> Vec<String> {
    let mut cols = Vec::new();
    if kinds.contains(&MeasureKind::Entanglement) {
        cols.extend(
            measures::pairs()
                .iter()
                .map(|(a, b)| format!("C_E_{a}_{b}")),
        );
    }
    if kinds.contains(&MeasureKind::Contangle) {
        cols.extend(
            measures::triples()
                .iter()
                .map(|(a, b, c)| format!("C_R_{a}_{b}_{c}")),
        );
    }
    cols
}

type Outcome = Result<MeasureReport>;

fn status_cells(outcome: &Outcome, kinds: &[MeasureKind]) -> Vec<Cell> {
    let width = measures::column_names(kinds).len();
    match outcome {
        Ok(r) => {
            let mut cells = vec![
                Cell::Bool(r.stable),
                r.reason().map_or(Cell::Empty, |s| Cell::Text(s.into())),
                Cell::Num(r.max_real / TWO_PI),
            ];
            match &r.measures {
                Some(m) => cells.extend(m.values(kinds).into_iter().map(Cell::from)),
                None => cells.extend(std::iter::repeat_n(Cell::Empty, width)),
            }
            cells
        }
        Err(e) => {
            let mut cells = vec![
                Cell::Bool(false),
                Cell::Text(e.reason_code().into()),
                Cell::Empty,
            ];
            cells.extend(std::iter::repeat_n(Cell::Empty, width));
            cells
        }
    }
}

fn measure_set(outcome: &Outcome) -> Option<&MeasureSet> {
    outcome.as_ref().ok().and_then(|r| r.measures.as_ref())
}

fn contrast_cells(plus: &Outcome, minus: &Outcome, kinds: &[MeasureKind]) -> Vec<Cell> {
    let (p, m) = (measure_set(plus), measure_set(minus));
    let ratio = |a: Option<f64>, b: Option<f64>| match (a, b) {
        (Some(a), Some(b)) => measures::contrast_ratio(a, b).map_or(Cell::Empty, Cell::Num),
        _ => Cell::Empty,
    };
    let mut cells = Vec::new();
    if kinds.contains(&MeasureKind::Entanglement) {
        for (a, b) in measures::pairs() {
            cells.push(ratio(
                p.and_then(|s| s.entanglement(a, b)),
                m.and_then(|s| s.entanglement(a, b)),
            ));
        }
    }
    if kinds.contains(&MeasureKind::Contangle) {
        for (a, b, c) in measures::triples() {
            cells.push(ratio(
                p.and_then(|s| s.contangle(a, b, c)),
                m.and_then(|s| s.contangle(a, b, c)),
            ));
        }
    }
    cells
}

/// One grid point: its reports (one, or `+`/`−` for nonreciprocity) and row.
pub struct PointResult {
    pub coordinates: Vec<f64>,
    pub outcomes: Vec<Outcome>,
}

impl SweepSpec {
    pub fn evaluate(&self, k: usize) -> PointResult {
        let coordinates = self.coordinates(k);
        let outcomes = match self.params_at(&coordinates) {
            Err(e) => vec![Err(e)],
            Ok(p) if self.nonreciprocity => {
                let shift = p.barnett_shift.abs();
                [shift, -shift]
                    .into_iter()
                    .map(|s| {
                        run_point(
                            &SystemParams {
                                barnett_shift: s,
                                ..p.clone()
                            },
                            &self.eval,
                        )
                    })
                    .collect()
            }
            Ok(p) => vec![run_point(&p, &self.eval)],
        };
        PointResult {
            coordinates,
            outcomes,
        }
    }

    fn row(&self, point: &PointResult) -> Vec<Cell> {
        let kinds = &self.eval.measures;
        let mut row: Vec<Cell> = point.coordinates.iter().map(|&v| Cell::Num(v)).collect();
        if self.nonreciprocity {
            let (plus, minus) = match point.outcomes.as_slice() {
                [p, m] => (p, m),
                [e] => (e, e),
                _ => unreachable!("a point has one or two outcomes"),
            };
            row.extend(status_cells(plus, kinds));
            row.extend(status_cells(minus, kinds));
            row.extend(contrast_cells(plus, minus, kinds));
        } else {
            row.extend(status_cells(&point.outcomes[0], kinds));
        }
        row
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))
}

/// Evaluates every grid point with `workers` threads; rows come back in
/// grid order whatever the scheduling.
pub fn run_sweep_points(spec: &SweepSpec, workers: usize) -> Result<Vec<PointResult>> {
    spec.check()?;
    let n = spec.len();
    Ok(pool(workers)?.install(|| (0..n).into_par_iter().map(|k| spec.evaluate(k)).collect()))
}

pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<ResultTable> {
    let points = run_sweep_points(spec, workers)?;
    Ok(ResultTable {
        columns: spec.columns(),
        rows: points.iter().map(|p| spec.row(p)).collect(),
    })
}
