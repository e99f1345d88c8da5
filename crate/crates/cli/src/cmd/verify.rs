use anyhow::Result;
use cox_core::oracle::{compare, OracleReport, Tolerances};
use cox_core::{sampling, TwoChannelParams};
use serde_json::{json, Value};

use crate::args::{Cli, ParamArgs, VerifyArgs};
use crate::config::{two_channel_from, Config};
use crate::exit::{fail, VERIFY_FAILED};
use crate::output::{Cell, Csv, Outputs};

pub fn run(cli: &Cli, a: &VerifyArgs) -> Result<()> {
    let cfg = Config::load(cli.config.as_deref())?;
    let tol = cli.tol.map(Tolerances::uniform).unwrap_or_default();

    // (label, integrated parameters, closed-form parameters)
    let mut cases: Vec<(String, TwoChannelParams, TwoChannelParams)> = Vec::new();
    let echo: Value = if let (Some(seed), false) = (cli.seed, cfg.has_params(&a.params)) {
        let mut rng = sampling::rng(seed);
        for i in 0..a.draws {
            let p = sampling::draw_regular(&mut rng);
            cases.push((format!("draw{i}"), p, p));
        }
        json!({"seed": seed, "draws": a.draws, "tolerances": tol})
    } else {
        let p = cfg.two_channel(&a.params)?;
        super::require_regular(&p)?;
        // `reference_params` supplies the closed-form side, e.g. to check sensitivity
        let reference = match cfg.root.get("reference_params") {
            Some(v) => two_channel_from(v, &ParamArgs::default())?,
            None => p,
        };
        cases.push(("params".into(), p, reference));
        json!({"params": p, "reference_params": reference, "tolerances": tol})
    };

    let mut csv = Csv::new(&["case", "quantity", "analytic", "numeric", "error", "tol", "pass"]);
    let mut reports: Vec<(String, OracleReport)> = Vec::new();
    for (label, num, ana) in &cases {
        let r = compare(num, ana, &tol)?;
        for c in &r.rows {
            csv.row(&[
                Cell::S(label),
                Cell::S(&c.quantity),
                Cell::F(c.analytic),
                Cell::F(c.numeric),
                Cell::F(c.error),
                Cell::F(c.tol),
                Cell::U(c.pass as u64),
            ]);
        }
        reports.push((label.clone(), r));
    }
    let all_pass = reports.iter().all(|(_, r)| r.pass);
    let worst = reports
        .iter()
        .filter_map(|(l, r)| r.worst().map(|c| (l, c)))
        .max_by(|x, y| x.1.severity().total_cmp(&y.1.severity()));

    let mut out = Outputs::new(&cli.out, "verify", cli.config.as_deref())?;
    out.write_csv("verify.csv", &csv)?;
    let cases_json: Vec<_> = reports.iter().map(|(l, r)| json!({"case": l, "report": r})).collect();
    out.write_json("verify.json", &json!({"pass": all_pass, "cases": cases_json}))?;
    out.finish(&echo)?;

    for (label, r) in &reports {
        for c in &r.rows {
            println!(
                "{} {label} {}: analytic {} numeric {} error {:e} (tol {:e})",
                if c.pass { "ok  " } else { "FAIL" },
                c.quantity,
                c.analytic,
                c.numeric,
                c.error,
                c.tol
            );
        }
    }
    match worst {
        Some((label, c)) if !all_pass => Err(fail(
            VERIFY_FAILED,
            format!(
                "verification failed; worst offender {label} {}: error {:e} > tol {:e}",
                c.quantity, c.error, c.tol
            ),
        )),
        _ => Ok(()),
    }
}
