//! Row computation for the three models.
//!
//! Every row is a pure function of the config and its `(t_f, T)` key, so rows
//! can be computed on any number of workers and sorted afterwards.

use std::cmp::Ordering;

use aia_core::lindblad::{self, OpenParams};
use aia_core::lz::{self, LzParams, Scenario};
use aia_core::tfi::{self, TfiParams, TfiScenario};
use aia_core::ModelError;
use rayon::prelude::*;

use crate::config::{Model, ScenarioSel, SweepConfig};
use crate::output::ScanPoint;

/// One CSV row. `None` fields are written as empty cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepRow {
    pub t_f: f64,
    pub temperature: Option<f64>,
    pub d_adi: Option<f64>,
    pub d_adi1: Option<f64>,
    pub d_aia: [Option<f64>; 4],
    pub d_opt: Option<f64>,
    pub dtau: [Option<f64>; 4],
    pub dtau_opt: Option<f64>,
    pub err: String,
}

impl SweepRow {
    fn new(t_f: f64, temperature: Option<f64>) -> Self {
        Self { t_f, temperature, ..Default::default() }
    }

    /// True when the exact reference state could not be computed.
    pub fn failed(&self) -> bool {
        self.d_adi.is_none() && !self.err.is_empty()
    }

    fn note(&mut self, what: &str, e: ModelError) {
        if !self.err.is_empty() {
            self.err.push_str("; ");
        }
        self.err.push_str(&format!("{what}: {e}"));
    }

    /// Stores `r` or records its error under `what`.
    fn record<T>(&mut self, what: &str, r: Result<T, ModelError>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.note(what, e);
                None
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub with_temperature: bool,
}

impl SweepOutput {
    pub fn all_failed(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(SweepRow::failed)
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        crate::output::write_sweep_csv(out, &self.rows, self.with_temperature)
    }
}

/// Runs `f` on a dedicated pool of `threads` workers, or on the global pool.
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool construction")
            .install(f),
        None => f(),
    }
}

fn row_keys(cfg: &SweepConfig) -> Vec<(f64, Option<f64>)> {
    let tfs = cfg.grid.values();
    match cfg.model {
        Model::Open => tfs.iter().flat_map(|&t| cfg.temperatures.iter().map(move |&temp| (t, Some(temp)))).collect(),
        _ => tfs.into_iter().map(|t| (t, None)).collect(),
    }
}

pub fn run_sweep(cfg: &SweepConfig) -> SweepOutput {
    let mut rows: Vec<SweepRow> = row_keys(cfg).into_par_iter().map(|(t, temp)| compute_row(cfg, t, temp)).collect();
    rows.sort_by(|a, b| {
        a.t_f
            .total_cmp(&b.t_f)
            .then_with(|| a.temperature.partial_cmp(&b.temperature).unwrap_or(Ordering::Equal))
    });
    SweepOutput { rows, with_temperature: cfg.model == Model::Open }
}

pub fn compute_row(cfg: &SweepConfig, t_f: f64, temperature: Option<f64>) -> SweepRow {
    let mut row = SweepRow::new(t_f, temperature);
    match cfg.model {
        Model::Lz => lz_row(cfg, &mut row),
        Model::Tfi => tfi_row(cfg, &mut row),
        Model::Open => open_row(cfg, &mut row, temperature.expect("open rows carry a temperature")),
    }
    row
}

fn rules(cfg: &SweepConfig) -> impl Iterator<Item = u8> + '_ {
    cfg.scenarios.iter().filter_map(|s| match s {
        ScenarioSel::Rule(i) => Some(*i),
        ScenarioSel::Opt => None,
    })
}

fn wants_opt(cfg: &SweepConfig) -> bool {
    cfg.scenarios.contains(&ScenarioSel::Opt)
}

fn lz_row(cfg: &SweepConfig, row: &mut SweepRow) {
    let Some(p) = row.record("params", LzParams::new(cfg.x, cfg.z_i, cfg.z_f, row.t_f)) else { return };
    let Some(exact) = row.record("exact", lz::evolve_schrodinger(&p, cfg.tolerances)) else { return };
    row.d_adi = row.record("adiabatic", lz::adiabatic_state(&p).map(|s| lz::state_distance(&exact, &s)));
    row.d_adi1 = row.record("first-order", lz::adiabatic_first_order(&p).map(|s| lz::state_distance(&exact, &s)));
    for i in rules(cfg) {
        let st = lz::switching_times(&p, Scenario::from_index(i).expect("validated scenario"));
        let d = lz::aia_state(&p, &st).map(|s| lz::state_distance(&exact, &s));
        let k = usize::from(i - 1);
        row.d_aia[k] = row.record(&format!("scenario {i}"), d);
        row.dtau[k] = Some(st.dtau());
    }
    if wants_opt(cfg) {
        if let Some(o) = row.record("opt", lz::optimize_dtau_against(&p, &exact)) {
            row.d_opt = Some(o.distance);
            row.dtau_opt = Some(o.dtau);
        }
    }
}

fn tfi_row(cfg: &SweepConfig, row: &mut SweepRow) {
    let Some(p) = row.record("params", TfiParams::new(cfg.chain_length, cfg.h_i, cfg.h_f, row.t_f)) else { return };
    let Some(exact) = row.record("exact", tfi::evolve_register(&p, cfg.tolerances)) else { return };
    let adi = tfi::adiabatic_register(&p).and_then(|a| tfi::register_distance(&exact, &a));
    row.d_adi = row.record("adiabatic", adi);
    for i in rules(cfg) {
        let sc = if i == 1 { TfiScenario::KibbleZurek } else { TfiScenario::ModifiedKibbleZurek };
        let Some(st) = row.record(&format!("scenario {i} times"), tfi::switching_times_tfi(&p, sc)) else { continue };
        let d = tfi::aia_register(&p, &st).and_then(|a| tfi::register_distance(&exact, &a));
        let k = usize::from(i - 1);
        row.d_aia[k] = row.record(&format!("scenario {i}"), d);
        row.dtau[k] = Some(st.dtau());
    }
    if wants_opt(cfg) {
        if let Some(o) = row.record("opt", tfi::optimize_dtau_tfi_against(&p, &exact)) {
            row.d_opt = Some(o.distance);
            row.dtau_opt = Some(o.dtau);
        }
    }
}

fn open_row(cfg: &SweepConfig, row: &mut SweepRow, temperature: f64) {
    let params = OpenParams::new(cfg.x, cfg.z_i, cfg.z_f, row.t_f, temperature, cfg.g);
    let Some(p) = row.record("params", params) else { return };
    let Some(exact) = row.record("exact", lindblad::evolve_master(&p, cfg.tolerances)) else { return };
    let adi = lindblad::adiabatic_state_open(&p).and_then(|a| lindblad::trace_distance(&exact, &a));
    row.d_adi = row.record("adiabatic", adi);
    for i in rules(cfg) {
        let st = lindblad::switching_times_open(&p, Scenario::from_index(i).expect("validated scenario"));
        let d = lindblad::aia_state_open(&p, &st).and_then(|a| lindblad::trace_distance(&exact, &a));
        let k = usize::from(i - 1);
        row.d_aia[k] = row.record(&format!("scenario {i}"), d);
        row.dtau[k] = Some(st.dtau());
    }
    if wants_opt(cfg) {
        if let Some(o) = row.record("opt", lindblad::optimize_dtau_open_against(&p, &exact)) {
            row.d_opt = Some(o.distance);
            row.dtau_opt = Some(o.dtau);
        }
    }
}

/// Symmetric grid on `[-span, span]`; an odd count puts a node at 0.
pub fn dtau_grid(span: f64, points: usize) -> Vec<f64> {
    let m = (points.max(2) - 1) as f64;
    (0..points).map(|i| span * (2.0 * i as f64 - m) / m).collect()
}

/// AIA distance on a dense centred Δτ grid at a single `t_f`.
pub fn run_dtau_scan(cfg: &SweepConfig, t_f: f64) -> Result<Vec<ScanPoint>, ModelError> {
    let span = cfg.dtau_span.map_or(t_f, |s| s.min(t_f));
    let grid = dtau_grid(span, cfg.dtau_points);
    let point = |temperature, dtau, r: Result<f64, ModelError>| match r {
        Ok(d) => ScanPoint { temperature, dtau, distance: Some(d), err: String::new() },
        Err(e) => ScanPoint { temperature, dtau, distance: None, err: e.to_string() },
    };
    let points = match cfg.model {
        Model::Lz => {
            let p = LzParams::new(cfg.x, cfg.z_i, cfg.z_f, t_f)?;
            let exact = lz::evolve_schrodinger(&p, cfg.tolerances)?;
            grid.par_iter().map(|&d| point(None, d, lz::aia_distance_for_dtau(&p, &exact, d))).collect()
        }
        Model::Tfi => {
            let p = TfiParams::new(cfg.chain_length, cfg.h_i, cfg.h_f, t_f)?;
            let exact = tfi::evolve_register(&p, cfg.tolerances)?;
            grid.par_iter().map(|&d| point(None, d, tfi::aia_distance_for_dtau(&p, &exact, d))).collect()
        }
        Model::Open => {
            let mut all = Vec::with_capacity(grid.len() * cfg.temperatures.len());
            for &temp in &cfg.temperatures {
                let p = OpenParams::new(cfg.x, cfg.z_i, cfg.z_f, t_f, temp, cfg.g)?;
                let exact = lindblad::evolve_master(&p, cfg.tolerances)?;
                let part: Vec<_> = grid
                    .par_iter()
                    .map(|&d| point(Some(temp), d, lindblad::aia_distance_open_for_dtau(&p, &exact, d)))
                    .collect();
                all.extend(part);
            }
            all
        }
    };
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_symmetric_with_zero() {
        let g = dtau_grid(10.0, 5);
        assert_eq!(g, vec![-10.0, -5.0, 0.0, 5.0, 10.0]);
        let g = dtau_grid(3.0, 2001);
        assert_eq!(g[1000], 0.0);
        assert!(g.iter().zip(g.iter().rev()).all(|(a, b)| a == &-b));
    }

    #[test]
    fn row_keys_cover_temperatures() {
        let mut cfg = SweepConfig::parse("tf_min = 1\ntf_max = 10\ntf_points = 3", Model::Open).unwrap();
        cfg.temperatures = vec![0.5, 0.1];
        assert_eq!(row_keys(&cfg).len(), 6);
    }

    #[test]
    fn failed_row_keeps_error_text() {
        let mut cfg = SweepConfig::defaults(Model::Lz);
        cfg.tolerances = aia_core::numkit::Tolerances::new(-1.0, 1e-9);
        let row = compute_row(&cfg, 1.0, None);
        assert!(row.failed());
        assert!(row.err.starts_with("exact:"), "{}", row.err);
    }

    #[test]
    fn lz_row_is_populated() {
        let cfg = SweepConfig::parse("tf_min = 1\ntf_max = 2", Model::Lz).unwrap();
        let row = compute_row(&cfg, 50.0, None);
        assert!(row.err.is_empty(), "{}", row.err);
        assert!(row.d_adi1.is_some() && row.d_aia.iter().all(Option::is_some) && row.d_opt.is_some());
        // the optimizer can only improve on every centred rule it scanned past
        assert!(row.d_opt.unwrap() <= row.d_adi.unwrap() + 1e-12);
    }
}
