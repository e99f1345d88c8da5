use anyhow::{anyhow, Result};
use cox_core::feshbach::{self, FieldSpec, FieldUnits, Scenario};
use cox_core::{FeshbachData, FieldModel};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::args::{Cli, FeshbachArgs, FeshbachMode, FitArgs, ScanArgs};
use crate::config::Config;
use crate::output::{Cell, Csv, Outputs};

/// Points on the a(B) curve written by `fit`.
const CURVE_POINTS: usize = 600;

#[derive(Deserialize)]
struct FitConfig {
    a_bg: f64,
    b0: f64,
    gamma_b: f64,
    alpha1: Option<f64>,
    field: Value,
    window: Option<[f64; 2]>,
    #[serde(default)]
    steps: Option<usize>,
}

pub fn run(cli: &Cli, a: &FeshbachArgs) -> Result<()> {
    match &a.mode {
        FeshbachMode::Fit(x) => fit(cli, x),
        FeshbachMode::Scan(x) => scan(cli, x),
    }
}

fn reduced_spec(m: &FieldModel) -> FieldSpec {
    FieldSpec {
        delta0: m.delta0,
        mu_mag: m.mu_mag,
        b0: m.b0,
        units: FieldUnits::Reduced,
        mass_u: None,
    }
}

fn fit(cli: &Cli, x: &FitArgs) -> Result<()> {
    let cfg = Config::load(cli.config.as_deref())?;
    let fc: FitConfig = serde_json::from_value(cfg.root.clone())?;
    // the field model is anchored at the resonance position unless it says otherwise
    let mut field = fc.field.clone();
    if let Some(obj) = field.as_object_mut() {
        obj.entry("b0").or_insert(json!(fc.b0));
    }
    let spec: FieldSpec = serde_json::from_value(field)?;
    let alpha1 = x
        .alpha1
        .or(fc.alpha1)
        .ok_or_else(|| anyhow!("missing `alpha1` (config field or --alpha1)"))?;
    let data = FeshbachData {
        a_bg: fc.a_bg,
        b0: fc.b0,
        gamma_b: fc.gamma_b,
        field: spec.model(),
        alpha1,
    };
    let window = fc.window.map(|[lo, hi]| (lo, hi));
    let fit = feshbach::fit_from_feshbach_data(&data, window)?;
    let p = fit.params;

    let half = 3.0 * fc.gamma_b.abs();
    let mut csv = Csv::new(&["B", "a", "a_single_pole"]);
    for i in 0..CURVE_POINTS {
        let b = fc.b0 - half + 2.0 * half * (i as f64 + 0.5) / CURVE_POINTS as f64;
        let exact = feshbach::a_of_b(&p, &fit.field, b).unwrap_or(f64::NAN);
        csv.row(&[
            Cell::F(b),
            Cell::F(exact),
            Cell::F(feshbach::approx_a_of_b(fc.a_bg, fc.b0, fc.gamma_b, b)),
        ]);
    }

    let report = json!({
        "params": p,
        "field": fit.field,
        "kappa2_squared_slope_per_field_unit": -fit.field.mu_mag,
        "model_a_bg": feshbach::abg(&p),
        "model_b0": feshbach::resonance_field(&p, &fit.field).ok(),
        "model_gamma_b": feshbach::width_gamma_b(&p, &fit.field).ok(),
        "warnings": fit.warnings,
    });
    let mut out = Outputs::new(&cli.out, "feshbach fit", cli.config.as_deref())?;
    out.write_json("fit.json", &report)?;
    out.write_csv("a_of_b.csv", &csv)?;
    if let Some([lo, hi]) = fc.window {
        let scenario = Scenario {
            params: p,
            field: reduced_spec(&fit.field),
            window: [lo, hi],
            steps: fc.steps.unwrap_or(feshbach::DEFAULT_STEPS),
        };
        out.write_json("scenario.json", &scenario)?;
    }
    for w in &fit.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "alpha1 = {}, alpha2 = {}, beta = {}, kappa1 = {}",
        p.alpha1(),
        p.alpha2(),
        p.beta(),
        p.kappa1()
    );
    out.finish(&cfg.root)
}

fn scan(cli: &Cli, x: &ScanArgs) -> Result<()> {
    let cfg = Config::load(cli.config.as_deref())?;
    if cli.config.is_none() {
        return Err(anyhow!("feshbach scan needs --config with a scenario"));
    }
    let mut s: Scenario = serde_json::from_value(cfg.root.clone())?;
    if let Some(lo) = x.lo {
        s.window[0] = lo;
    }
    if let Some(hi) = x.hi {
        s.window[1] = hi;
    }
    if let Some(n) = x.steps {
        s.steps = n;
    }
    let model = s.field.model();
    let run = feshbach::continue_spectrum_in_b(&s.params, &model, (s.window[0], s.window[1]), s.steps)?;

    let nz = 4;
    let mut header = vec!["B".to_string()];
    for j in 1..=nz {
        header.push(format!("re_E_{j}"));
        header.push(format!("im_E_{j}"));
    }
    header.extend(["E_bare_1", "E_bare_2", "event_flag"].map(String::from));
    let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    for pt in &run.points {
        let mut cells = vec![Cell::F(pt.b)];
        for j in 0..nz {
            let e = pt.zeros.get(j).map(|z| z.energy);
            cells.push(Cell::F(e.map_or(f64::NAN, |e| e.re)));
            cells.push(Cell::F(e.map_or(f64::NAN, |e| e.im)));
        }
        cells.push(Cell::F(pt.bare.0));
        cells.push(Cell::F(pt.bare.1));
        let flag = pt.events.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(";");
        cells.push(Cell::S(&flag));
        csv.row(&cells);
    }
    let mut out = Outputs::new(&cli.out, "feshbach scan", cli.config.as_deref())?;
    out.write_csv("trajectory.csv", &csv)?;
    out.write_json(
        "events.json",
        &json!({"events": run.events, "warnings": run.warnings, "truncated_at": run.truncated_at}),
    )?;
    for w in &run.warnings {
        eprintln!("warning: {w}");
    }
    for e in &run.events {
        println!("{} at B = {}", e.kind.as_str(), e.b);
    }
    out.finish(&serde_json::to_value(&s)?)
}
