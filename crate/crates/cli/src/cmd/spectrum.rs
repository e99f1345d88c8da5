use anyhow::Result;
use cox_core::spectrum::spectrum_report;
use serde::Serialize;
use serde_json::json;

use crate::args::{Cli, ParamArgs};
use crate::config::Config;
use crate::output::{Cell, Csv, Outputs};

#[derive(Serialize)]
struct Summary<'a> {
    params: cox_core::TwoChannelParams,
    n_b: u8,
    n_r: u8,
    n_b_from_zeros: u8,
    consistent: bool,
    max_residual: f64,
    bound: cox_core::BoundCount,
    zeros: &'a [cox_core::SpectralZero],
    warnings: Vec<String>,
}

pub fn run(cli: &Cli, a: &ParamArgs) -> Result<()> {
    let cfg = Config::load(cli.config.as_deref())?;
    let p = cfg.two_channel(a)?;
    super::require_regular(&p)?;
    let r = spectrum_report(&p);

    let mut warnings = Vec::new();
    if r.bound.degenerate {
        warnings.push("bound-state count on a boundary: a zero sits at k = 0 or p = 0".to_string());
    }
    if r.transition {
        warnings.push("resonance count on a boundary: zeros collide on the imaginary axis".to_string());
    }
    if !r.consistent {
        warnings.push(format!(
            "formula gives n_b = {} but {} zeros classify as bound",
            r.n_b, r.n_b_from_zeros
        ));
    }
    for z in r.zeros.iter().filter(|z| z.degenerate) {
        warnings.push(format!("double zero at k = {} + {}i", z.k.re, z.k.im));
    }
    for z in r.zeros.iter().filter(|z| z.uncoupled) {
        warnings.push(format!(
            "uncoupled zero at k = {}i: p is not fixed by the coupling",
            z.k.im
        ));
    }

    let mut csv = Csv::new(&["re_k", "im_k", "re_p", "im_p", "kind", "residual"]);
    for z in &r.zeros {
        csv.row(&[
            Cell::F(z.k.re),
            Cell::F(z.k.im),
            Cell::F(z.p.re),
            Cell::F(z.p.im),
            Cell::S(z.kind.as_str()),
            Cell::F(z.residual),
        ]);
    }
    let summary = Summary {
        params: p,
        n_b: r.n_b,
        n_r: r.n_r,
        n_b_from_zeros: r.n_b_from_zeros,
        consistent: r.consistent,
        max_residual: r.max_residual,
        bound: r.bound,
        zeros: &r.zeros,
        warnings,
    };
    let mut out = Outputs::new(&cli.out, "spectrum", cli.config.as_deref())?;
    out.write_csv("zeros.csv", &csv)?;
    out.write_json("spectrum.json", &summary)?;
    println!("n_b = {}, n_r = {}", r.n_b, r.n_r);
    for w in &summary.warnings {
        eprintln!("warning: {w}");
    }
    out.finish(&json!({ "params": p }))
}
