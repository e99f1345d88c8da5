use anyhow::Result;
use cox_core::observables;
use serde_json::json;

use crate::args::{Cli, ObservablesArgs};
use crate::config::Config;
use crate::output::{Csv, Outputs};

pub const DEFAULT_ENERGIES: usize = 1000;

pub fn run(cli: &Cli, a: &ObservablesArgs) -> Result<()> {
    let cfg = Config::load(cli.config.as_deref())?;
    let p = cfg.two_channel(&a.params)?;
    super::require_regular(&p)?;
    let n = a.n.or(cfg.usize("n")?).unwrap_or(DEFAULT_ENERGIES);
    let samples = observables::scan(&p, &observables::energy_grid(&p, n))?;

    let mut csv = Csv::new(&["E", "k", "re_S", "im_S", "delta_rad", "sigma"]);
    for s in &samples {
        csv.floats(&[s.energy, s.k, s.s.re, s.s.im, s.delta, s.sigma]);
    }
    let a_len = observables::scattering_length(&p);
    let mut out = Outputs::new(&cli.out, "observables", cli.config.as_deref())?;
    out.write_csv("observables.csv", &csv)?;
    out.write_json(
        "observables.json",
        &json!({
            "params": p,
            "scattering_length": a_len,
            "threshold_phase": observables::threshold_phase(&p),
            "n": n,
        }),
    )?;
    println!("scattering length a = {a_len}");
    out.finish(&json!({"params": p, "n": n}))
}
