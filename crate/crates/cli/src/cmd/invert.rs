use anyhow::{anyhow, Result};
use cox_core::inverse::{self, Branch, InversionResult, ResonanceSpec};
use serde_json::{json, Value};

use crate::args::{BranchArg, Cli, InvertArgs, InvertKind};
use crate::config::{required, Config};
use crate::output::{Cell, Csv, Outputs};

/// Gap between the deepest prescribed binding momentum and the default `kappa1`.
pub const KAPPA1_MARGIN: f64 = 0.01;

pub fn run(cli: &Cli, a: &InvertArgs) -> Result<()> {
    let cfg = Config::load(cli.config.as_deref())?;
    let (name, result, echo): (&str, InversionResult, Value) = match &a.kind {
        InvertKind::Resonance(x) => {
            let delta = required(x.delta, &cfg, "delta")?;
            let er = required(x.er, &cfg, "er")?;
            let ei = required(x.ei, &cfg, "ei")?;
            let beta = required(x.beta, &cfg, "beta")?;
            let kappa1 = x.kappa1.or(cfg.f64("kappa1")?).unwrap_or(1.0);
            let spec = ResonanceSpec::new(delta, er, ei)?;
            let r = inverse::from_resonance(&spec, beta, kappa1)?;
            (
                "resonance",
                r,
                json!({"delta": delta, "er": er, "ei": ei, "beta": beta, "kappa1": kappa1}),
            )
        }
        InvertKind::Bound2(x) => {
            let l1 = required(x.l1, &cfg, "l1")?;
            let l2 = required(x.l2, &cfg, "l2")?;
            let beta = required(x.beta, &cfg, "beta")?;
            let delta = required(x.delta, &cfg, "delta")?;
            let branch = match (x.branch, cfg.str("branch")?) {
                (Some(BranchArg::Upper), _) | (None, Some("upper")) => Branch::Upper,
                (Some(BranchArg::Lower), _) | (None, Some("lower")) => Branch::Lower,
                (None, Some(other)) => return Err(anyhow!("branch must be `upper` or `lower`, got `{other}`")),
                (None, None) => return Err(anyhow!("missing `branch` (config field or --branch)")),
            };
            let kappa1 = x.kappa1.or(cfg.f64("kappa1")?).unwrap_or(l1.max(l2) + KAPPA1_MARGIN);
            let (lo, hi) = (l1.min(l2), l1.max(l2));
            let r = inverse::from_two_bound(lo, hi, delta, beta, kappa1, branch)?;
            let echo = json!({"l1": l1, "l2": l2, "beta": beta, "delta": delta, "branch": branch, "kappa1": kappa1});
            ("bound2", r, echo)
        }
        InvertKind::Bound1(x) => {
            let lb = required(x.lb, &cfg, "lb")?;
            let alpha1 = required(x.alpha1, &cfg, "alpha1")?;
            let beta = required(x.beta, &cfg, "beta")?;
            let delta = required(x.delta, &cfg, "delta")?;
            let kappa1 = x.kappa1.or(cfg.f64("kappa1")?).unwrap_or(lb + KAPPA1_MARGIN);
            let r = inverse::from_one_bound(lb, alpha1, beta, delta, kappa1)?;
            let echo = json!({"lb": lb, "alpha1": alpha1, "beta": beta, "delta": delta, "kappa1": kappa1});
            ("bound1", r, echo)
        }
        InvertKind::Resbound(x) => {
            let delta = required(x.delta, &cfg, "delta")?;
            let er = required(x.er, &cfg, "er")?;
            let ei = required(x.ei, &cfg, "ei")?;
            let lb = required(x.lb, &cfg, "lb")?;
            let kappa1 = x.kappa1.or(cfg.f64("kappa1")?).unwrap_or(lb + KAPPA1_MARGIN);
            let spec = ResonanceSpec::new(delta, er, ei)?;
            let r = inverse::from_resonance_with_bound(&spec, lb, kappa1)?;
            let echo = json!({"delta": delta, "er": er, "ei": ei, "lb": lb, "kappa1": kappa1});
            ("resbound", r, echo)
        }
    };

    let mut csv = Csv::new(&["re_k", "im_k", "re_p", "im_p", "kind", "residual"]);
    for z in &result.zeros {
        csv.row(&[
            Cell::F(z.k.re),
            Cell::F(z.k.im),
            Cell::F(z.p.re),
            Cell::F(z.p.im),
            Cell::S(z.kind.as_str()),
            Cell::F(z.residual),
        ]);
    }
    let mut out = Outputs::new(&cli.out, &format!("invert {name}"), cli.config.as_deref())?;
    out.write_json("inversion.json", &result)?;
    out.write_csv("zeros.csv", &csv)?;
    let p = result.params;
    println!(
        "alpha1 = {}, alpha2 = {}, beta = {}, delta = {}, kappa1 = {}",
        p.alpha1(),
        p.alpha2(),
        p.beta(),
        p.delta(),
        p.kappa1()
    );
    out.finish(&echo)
}
