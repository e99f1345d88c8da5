use anyhow::Result;
use cox_core::{CoxParamsN, FactorizationState};
use serde_json::json;

use crate::args::{Cli, PotentialArgs};
use crate::config::Config;
use crate::output::{Csv, Outputs};

pub const DEFAULT_POINTS: usize = 1000;

pub fn run(cli: &Cli, a: &PotentialArgs) -> Result<()> {
    let cfg = Config::load(cli.config.as_deref())?;
    // an N-channel config gives thresholds, factorization energy and the upper triangle of U0
    let (general, echo) = if cfg.params_object().get("thresholds").is_some() {
        let p: CoxParamsN = serde_json::from_value(cfg.params_object().clone())?;
        let echo = serde_json::to_value(&p)?;
        (p, echo)
    } else {
        let p = cfg.two_channel(&a.params)?;
        (p.to_general(), serde_json::to_value(p)?)
    };
    let state = FactorizationState::new(general)?;
    let kappa_min = state.params().kappa().iter().copied().fold(f64::INFINITY, f64::min);
    let r_max = a.r_max.or(cfg.f64("r_max")?).unwrap_or((30.0 / kappa_min).max(20.0));
    let n = a.n.or(cfg.usize("n")?).unwrap_or(DEFAULT_POINTS);
    let grid = state.potential_grid(r_max, n)?;

    let nc = state.params().n_channels();
    let mut header = vec!["r".to_string()];
    for i in 0..nc {
        for j in i..nc {
            header.push(format!("v{}{}", i + 1, j + 1));
        }
    }
    let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    for s in &grid {
        let mut row = vec![s.r];
        for i in 0..nc {
            for j in i..nc {
                row.push(s.v[(i, j)]);
            }
        }
        csv.floats(&row);
    }
    let mut out = Outputs::new(&cli.out, "potential", cli.config.as_deref())?;
    out.write_csv("potential.csv", &csv)?;
    println!("potential: {n} points on [0, {r_max}]");
    out.finish(&json!({"params": echo, "r_max": r_max, "n": n}))
}
