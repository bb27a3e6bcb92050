//! Sweep orchestration and CSV emission.
//!
//! CSV columns, in this order:
//!
//! | column         | content                                                    |
//! |----------------|------------------------------------------------------------|
//! | `sweep_value`  | value of the swept variable at this point                  |
//! | `engine`       | `closed`, `asymptotic` or `mc`                             |
//! | `metric`       | quantity reported, e.g. `e2e_outage`, `mesh_outage`        |
//! | `value`        | outage probability; `nan` when the engine failed           |
//! | `ci_halfwidth` | half-width of the Monte Carlo interval; empty for analytic |
//!
//! Rows follow the sweep order, engines in the order requested.

use crate::model::{at_point, build, derive_seed};
use crate::scenario::{Engine, Scenario};
use crate::validate::sweep_name;
use backhaul_core::channels::AbsorptionModel;
use rayon::prelude::*;
use std::io::Write;

pub const HEADER: [&str; 5] = ["sweep_value", "engine", "metric", "value", "ci_halfwidth"];

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub sweep_value: f64,
    pub engine: Engine,
    pub metric: &'static str,
    pub value: f64,
    pub ci_halfwidth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub rows: Vec<Row>,
    /// one message per failed (point, engine)
    pub failures: Vec<String>,
}

/// Evaluates every (sweep point, engine) pair of a validated scenario. MC at
/// point i uses a seed derived from `seed` and i alone, so output does not
/// depend on the worker count.
pub fn run(s: &Scenario, absorption: &AbsorptionModel, seed: u64) -> Report {
    let sweep = s.sweep.as_ref().expect("validated scenario has a sweep");
    let metric = s.metric();
    let per_point: Vec<Vec<(Row, Option<String>)>> = sweep
        .values()
        .into_par_iter()
        .enumerate()
        .map(|(i, x)| {
            let eval = build(&at_point(s, x), absorption);
            s.engines
                .iter()
                .map(|&engine| {
                    let result = eval
                        .as_ref()
                        .map_err(Clone::clone)
                        .and_then(|e| e.run(engine, derive_seed(seed, i)));
                    let (value, ci, failure) = match result {
                        Ok(est) => (est.value, (engine == Engine::Mc).then_some(est.ci_halfwidth), None),
                        Err(e) => (
                            f64::NAN,
                            None,
                            Some(format!(
                                "{} = {x}, engine {}: {e}",
                                sweep_name(sweep.variable),
                                engine.as_str()
                            )),
                        ),
                    };
                    let row = Row {
                        sweep_value: x,
                        engine,
                        metric,
                        value,
                        ci_halfwidth: ci,
                    };
                    (row, failure)
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (row, failure) in per_point.into_iter().flatten() {
        rows.push(row);
        failures.extend(failure);
    }
    Report { rows, failures }
}

/// Shortest round-trip form; scientific for probabilities so tiny values
/// stay compact.
fn number(v: f64, scientific: bool) -> String {
    if v.is_nan() {
        "nan".into()
    } else if scientific {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

pub fn write_csv<W: Write>(out: W, rows: &[Row]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            number(r.sweep_value, false),
            r.engine.as_str().to_string(),
            r.metric.to_string(),
            number(r.value, true),
            r.ci_halfwidth.map_or(String::new(), |h| number(h, true)),
        ])?;
    }
    w.flush()?;
    Ok(())
}
