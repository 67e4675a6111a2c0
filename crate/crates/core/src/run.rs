//! Evaluates a [`RunConfig`] into a table and writes it as CSV or JSON.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::config::{Format, Output, RunConfig, SweepVariable};
use crate::error::Error;
use crate::fluctuations::{self, Analysis};
use crate::model::PhysicalParams;
use crate::spectrum;
use crate::steadystate::{self, SteadyState};

/// Relative Lyapunov residual accepted by `--verify`.
pub const VERIFY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub jobs: usize,
    pub verify: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            jobs: 1,
            verify: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(usize),
    Num(f64),
    Bool(bool),
    Text(String),
    Missing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    /// Numeric values of a column, with `NaN` for non-numeric cells.
    pub fn numbers(&self, name: &str) -> Vec<f64> {
        let Some(idx) = self.column(name) else {
            return Vec::new();
        };
        self.rows
            .iter()
            .map(|row| match row[idx] {
                Cell::Num(x) => x,
                Cell::Int(i) => i as f64,
                _ => f64::NAN,
            })
            .collect()
    }
}

/// A sweep point that did not evaluate cleanly.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFailure {
    pub index: usize,
    pub status: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub table: Table,
    pub failures: Vec<PointFailure>,
}

pub fn run(config: &RunConfig, options: &RunOptions) -> Result<RunResult, Error> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs.max(1))
        .build()
        .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))?;
    let spectrum_run = config.outputs.contains(&Output::Spectrum);
    Ok(pool.install(|| {
        if spectrum_run {
            run_spectrum(config)
        } else {
            run_points(config, options)
        }
    }))
}

fn wants_covariance(config: &RunConfig) -> bool {
    config.outputs.contains(&Output::Fluctuations) || config.outputs.contains(&Output::Entanglement)
}

fn point_columns(config: &RunConfig, options: &RunOptions) -> Vec<&'static str> {
    let mut columns = vec!["index", "delta_c", "omega_sw", "temperature"];
    if config.outputs.contains(&Output::Steady) {
        columns.extend(["alpha2", "beta1_2", "delta_d", "g", "omega_m"]);
    }
    if config.outputs.contains(&Output::Resonance) {
        columns.push("delta_c_res");
    }
    if wants_covariance(config) {
        columns.push("stable");
    }
    if config.outputs.contains(&Output::Fluctuations) {
        columns.extend(["delta_n_ph", "delta_n_b"]);
    }
    if config.outputs.contains(&Output::Entanglement) {
        columns.push("e_n");
    }
    if options.verify && wants_covariance(config) {
        columns.push("lyapunov_residual");
    }
    columns.push("status");
    columns
}

fn point_params(config: &RunConfig, value: Option<f64>) -> PhysicalParams {
    let mut params = config.params;
    if let (Some(sweep), Some(x)) = (&config.sweep, value) {
        match sweep.variable {
            SweepVariable::DeltaC => params.delta_c = x,
            SweepVariable::OmegaSw => params.omega_sw = x,
            SweepVariable::Temperature => params.temperature = x,
            SweepVariable::Omega => {}
        }
    }
    params
}

struct Evaluated {
    row: Vec<Cell>,
    failure: Option<(String, String)>,
}

fn run_points(config: &RunConfig, options: &RunOptions) -> RunResult {
    let columns = point_columns(config, options);
    let values: Vec<Option<f64>> = match &config.sweep {
        Some(sweep) => sweep.range.values().into_iter().map(Some).collect(),
        None => vec![None],
    };
    let evaluated: Vec<Evaluated> = values
        .par_iter()
        .enumerate()
        .map(|(index, value)| evaluate_point(config, options, index, *value))
        .collect();
    let mut rows = Vec::with_capacity(evaluated.len());
    let mut failures = Vec::new();
    for (index, e) in evaluated.into_iter().enumerate() {
        if let Some((status, message)) = e.failure {
            failures.push(PointFailure {
                index,
                status,
                message,
            });
        }
        rows.push(e.row);
    }
    RunResult {
        table: Table { columns, rows },
        failures,
    }
}

fn evaluate_point(
    config: &RunConfig,
    options: &RunOptions,
    index: usize,
    value: Option<f64>,
) -> Evaluated {
    let params = point_params(config, value);
    let outputs = &config.outputs;
    let mut row = vec![
        Cell::Int(index),
        Cell::Num(params.delta_c),
        Cell::Num(params.omega_sw),
        Cell::Num(params.temperature),
    ];
    let mut failure: Option<Error> = None;

    let state = match steadystate::solve_steady_state(&params) {
        Ok(s) => Some(s),
        Err(e) => {
            failure = Some(e);
            None
        }
    };
    if outputs.contains(&Output::Steady) {
        match &state {
            Some(s) => row.extend(
                [
                    s.alpha * s.alpha,
                    s.beta_1 * s.beta_1,
                    s.delta_d,
                    s.coupling_g,
                    s.omega_m,
                ]
                .map(Cell::Num),
            ),
            None => row.extend(std::iter::repeat_n(Cell::Missing, 5)),
        }
    }
    if outputs.contains(&Output::Resonance) {
        match steadystate::resonance_detuning(&params) {
            Ok(x) => row.push(Cell::Num(x)),
            Err(e) => {
                failure.get_or_insert(e);
                row.push(Cell::Missing);
            }
        }
    }
    if wants_covariance(config) {
        let analysis = match &state {
            Some(s) => covariance_analysis(s, &params),
            None => Err(Error::Domain("no steady state".into())),
        };
        let stable = state
            .as_ref()
            .map(|s| fluctuations::build_drift(s, &params).stable);
        row.push(stable.map_or(Cell::Missing, Cell::Bool));
        let analysis = match analysis {
            Ok(a) => Some(a),
            Err(e) => {
                if state.is_some() {
                    failure.get_or_insert(e);
                }
                None
            }
        };
        if outputs.contains(&Output::Fluctuations) {
            match &analysis {
                Some(a) => row.extend([
                    Cell::Num(a.report.delta_n_ph),
                    Cell::Num(a.report.delta_n_b),
                ]),
                None => row.extend([Cell::Missing, Cell::Missing]),
            }
        }
        if outputs.contains(&Output::Entanglement) {
            row.push(
                analysis
                    .as_ref()
                    .map_or(Cell::Missing, |a| Cell::Num(a.report.log_negativity)),
            );
        }
        if options.verify {
            match &analysis {
                Some(a) => {
                    let residual = fluctuations::lyapunov_residual(
                        &a.drift.a_upper,
                        &a.covariance.v,
                        &a.drift.d_upper,
                    );
                    let scale = a.drift.d_upper.amax().max(1.0);
                    row.push(Cell::Num(residual));
                    if residual > VERIFY_TOLERANCE * scale {
                        failure.get_or_insert(Error::Domain(format!(
                            "Lyapunov residual {residual:e} exceeds {:e}",
                            VERIFY_TOLERANCE * scale
                        )));
                    }
                }
                None => row.push(Cell::Missing),
            }
        }
    }
    let failure = failure.map(|e| {
        let status = match &e {
            Error::Domain(m) if m.starts_with("Lyapunov residual") => "verify_failed".to_string(),
            other => other.kind().to_string(),
        };
        (status, e.to_string())
    });
    row.push(Cell::Text(
        failure
            .as_ref()
            .map_or_else(|| "ok".to_string(), |(s, _)| s.clone()),
    ));
    Evaluated { row, failure }
}

fn covariance_analysis(state: &SteadyState, params: &PhysicalParams) -> Result<Analysis, Error> {
    let drift = fluctuations::build_drift(state, params);
    let covariance = fluctuations::solve_lyapunov(&drift)?;
    let report = fluctuations::fluctuation_report(&covariance)?;
    Ok(Analysis {
        state: *state,
        drift,
        covariance,
        report,
    })
}

const SPECTRUM_COLUMNS: [&str; 7] = [
    "omega",
    "omega_norm",
    "omega_eff",
    "gamma_eff",
    "chi_abs2",
    "s_x",
    "peak",
];

fn run_spectrum(config: &RunConfig) -> RunResult {
    let params = config.params;
    let steady = config.outputs.contains(&Output::Steady);
    let mut columns = vec!["index", "delta_c", "omega_sw", "temperature"];
    if steady {
        columns.extend(["alpha2", "beta1_2", "delta_d", "g", "omega_m"]);
    }
    columns.extend(SPECTRUM_COLUMNS);
    columns.push("status");
    let base = |index: usize| {
        vec![
            Cell::Int(index),
            Cell::Num(params.delta_c),
            Cell::Num(params.omega_sw),
            Cell::Num(params.temperature),
        ]
    };

    let state = match steadystate::solve_steady_state(&params) {
        Ok(s) => s,
        Err(e) => {
            let mut row = base(0);
            row.extend(std::iter::repeat_n(Cell::Missing, columns.len() - 5));
            row.push(Cell::Text(e.kind().to_string()));
            return RunResult {
                table: Table {
                    columns,
                    rows: vec![row],
                },
                failures: vec![PointFailure {
                    index: 0,
                    status: e.kind().to_string(),
                    message: e.to_string(),
                }],
            };
        }
    };
    let grid: Vec<f64> = match &config.sweep {
        Some(sweep) => sweep
            .range
            .values()
            .into_iter()
            .map(|x| x * state.omega_m)
            .collect(),
        None => spectrum::default_grid(&state),
    };
    let steady_cells = [
        state.alpha * state.alpha,
        state.beta_1 * state.beta_1,
        state.delta_d,
        state.coupling_g,
        state.omega_m,
    ];
    let with_state = |index: usize| {
        let mut row = base(index);
        if steady {
            row.extend(steady_cells.map(Cell::Num));
        }
        row
    };

    match spectrum::power_spectrum(&grid, &state, &params) {
        Ok(result) => {
            let peaks: Vec<bool> = {
                let mut flags = vec![false; grid.len()];
                for (i, w) in grid.iter().enumerate() {
                    flags[i] = result.peak_frequencies.contains(w);
                }
                flags
            };
            let rows = result
                .points
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let mut row = with_state(i);
                    row.extend([
                        Cell::Num(p.omega),
                        Cell::Num(p.omega / state.omega_m),
                        Cell::Num(p.omega_eff),
                        Cell::Num(p.gamma_eff),
                        Cell::Num(p.chi_abs2),
                        Cell::Num(p.s_x),
                        Cell::Bool(peaks[i]),
                    ]);
                    row.push(Cell::Text("ok".into()));
                    row
                })
                .collect();
            RunResult {
                table: Table { columns, rows },
                failures: Vec::new(),
            }
        }
        Err(e) => {
            let status = e.kind().to_string();
            let rows = grid
                .iter()
                .enumerate()
                .map(|(i, &w)| {
                    let mut row = with_state(i);
                    row.extend([Cell::Num(w), Cell::Num(w / state.omega_m)]);
                    row.extend(std::iter::repeat_n(
                        Cell::Missing,
                        SPECTRUM_COLUMNS.len() - 2,
                    ));
                    row.push(Cell::Text(status.clone()));
                    row
                })
                .collect();
            RunResult {
                table: Table { columns, rows },
                failures: vec![PointFailure {
                    index: 0,
                    status,
                    message: e.to_string(),
                }],
            }
        }
    }
}

fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn write_table<W: Write>(table: &Table, format: Format, writer: W) -> io::Result<()> {
    match format {
        Format::Csv => write_csv(table, writer),
        Format::Json => write_json(table, writer),
    }
}

fn write_csv<W: Write>(table: &Table, writer: W) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(&table.columns)?;
    for row in &table.rows {
        out.write_record(row.iter().map(|cell| match cell {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format_number(*x),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }))?;
    }
    out.flush()
}

fn write_json<W: Write>(table: &Table, mut writer: W) -> io::Result<()> {
    use serde_json::{Map, Number, Value};
    let records: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let mut object = Map::new();
            for (name, cell) in table.columns.iter().zip(row) {
                let value = match cell {
                    Cell::Int(i) => Value::from(*i),
                    Cell::Num(x) => Number::from_f64(*x).map_or(Value::Null, Value::Number),
                    Cell::Bool(b) => Value::Bool(*b),
                    Cell::Text(s) => Value::String(s.clone()),
                    Cell::Missing => Value::Null,
                };
                object.insert((*name).to_string(), value);
            }
            Value::Object(object)
        })
        .collect();
    serde_json::to_writer_pretty(&mut writer, &records)?;
    writeln!(writer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn run_text(text: &str) -> RunResult {
        run(&parse_config(text).unwrap(), &RunOptions::default()).unwrap()
    }

    #[test]
    fn single_point_steady_row() {
        let r = run_text("");
        assert_eq!(r.table.rows.len(), 1);
        assert!(r.failures.is_empty());
        let state = steadystate::solve_steady_state(&parse_config("").unwrap().params).unwrap();
        assert_eq!(r.table.numbers("alpha2")[0], state.alpha * state.alpha);
        assert_eq!(r.table.rows[0].last(), Some(&Cell::Text("ok".into())));
    }

    #[test]
    fn sweep_rows_are_ordered_regardless_of_jobs() {
        let config = parse_config(
            "sweep=delta_c\nrange=28800,29100,31\noutputs=steady,fluctuations,entanglement",
        )
        .unwrap();
        let serial = run(
            &config,
            &RunOptions {
                jobs: 1,
                verify: true,
            },
        )
        .unwrap();
        let parallel = run(
            &config,
            &RunOptions {
                jobs: 4,
                verify: true,
            },
        )
        .unwrap();
        assert_eq!(serial, parallel);
        let dc = serial.table.numbers("delta_c");
        assert!(dc.windows(2).all(|w| w[1] > w[0]));
        assert!(serial.failures.is_empty(), "{:?}", serial.failures);
    }

    #[test]
    fn resonance_column() {
        let r = run_text("outputs=resonance");
        assert!((r.table.numbers("delta_c_res")[0] - 28966.0).abs() < 2.0);
    }

    #[test]
    fn unstable_points_are_reported() {
        // At κ = 24.3 without collisions the side mode is unstable at 28700.
        let r = run_text(
            "kappa=24.3\nsweep=delta_c\nrange=28500,28700,2\noutputs=steady,fluctuations,entanglement",
        );
        assert_eq!(r.table.rows.len(), 2);
        assert_eq!(r.failures.len(), 1);
        assert_eq!(r.failures[0].index, 1);
        assert_eq!(r.failures[0].status, "unstable");
        let stable = r.table.column("stable").unwrap();
        assert_eq!(r.table.rows[0][stable], Cell::Bool(true));
        assert_eq!(r.table.rows[1][stable], Cell::Bool(false));
        assert!(r.table.numbers("alpha2")[1] > 0.0);
        assert!(r.table.numbers("e_n")[1].is_nan());
        assert_eq!(r.table.rows[1].last(), Some(&Cell::Text("unstable".into())));
    }

    #[test]
    fn spectrum_uses_default_grid() {
        let r = run_text("outputs=spectrum");
        assert_eq!(r.table.rows.len(), spectrum::DEFAULT_GRID_POINTS);
        let norm = r.table.numbers("omega_norm");
        assert_eq!(norm[0], 0.0);
        assert!((norm[norm.len() - 1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn csv_numbers_keep_full_precision() {
        let table = Table {
            columns: vec!["x", "flag", "missing"],
            rows: vec![vec![Cell::Num(0.1 + 0.2), Cell::Bool(true), Cell::Missing]],
        };
        let mut buf = Vec::new();
        write_table(&table, Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let field = text.lines().nth(1).unwrap().split(',').next().unwrap();
        assert_eq!(field.parse::<f64>().unwrap(), 0.1 + 0.2);
    }

    #[test]
    fn json_maps_nan_to_null() {
        let table = Table {
            columns: vec!["x"],
            rows: vec![vec![Cell::Num(f64::NAN)]],
        };
        let mut buf = Vec::new();
        write_table(&table, Format::Json, &mut buf).unwrap();
        let value: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert!(value[0]["x"].is_null());
    }
}
