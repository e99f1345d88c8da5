use anyhow::Result;
use cox_core::spectrum::{atlas, region_adjacency, region_components};
use cox_core::AtlasConfig;
use serde_json::json;

use crate::args::{AtlasArgs, Cli};
use crate::config::Config;
use crate::output::{Cell, Csv, Outputs};

pub fn run(cli: &Cli, a: &AtlasArgs) -> Result<()> {
    let cfg = Config::load(cli.config.as_deref())?;
    let d = AtlasConfig::default();
    let config = AtlasConfig {
        delta_d: a.delta_d.or(cfg.f64("delta_d")?).unwrap_or(d.delta_d),
        lo: a.lo.or(cfg.f64("lo")?).unwrap_or(d.lo),
        hi: a.hi.or(cfg.f64("hi")?).unwrap_or(d.hi),
        n: a.n.or(cfg.usize("n")?).unwrap_or(d.n),
    };
    let grid = atlas(&config)?;

    let mut csv = Csv::new(&["a1_over_beta", "a2_over_beta", "n_b", "n_r", "degenerate_flag"]);
    for g in &grid {
        csv.row(&[
            Cell::F(g.a1_over_beta),
            Cell::F(g.a2_over_beta),
            Cell::U(g.n_b as u64),
            Cell::U(g.n_r as u64),
            Cell::U(g.degenerate as u64),
        ]);
    }
    let components: Vec<_> = region_components(&grid, config.n)
        .into_iter()
        .map(|((n_b, n_r), count)| json!({"n_b": n_b, "n_r": n_r, "components": count}))
        .collect();
    let adjacency: Vec<_> = region_adjacency(&grid, config.n)
        .into_iter()
        .map(|(x, y)| json!([[x.0, x.1], [y.0, y.1]]))
        .collect();
    let mut out = Outputs::new(&cli.out, "atlas", cli.config.as_deref())?;
    out.write_csv("atlas.csv", &csv)?;
    out.write_json(
        "atlas.json",
        &json!({"config": config, "regions": components, "adjacency": adjacency}),
    )?;
    println!("atlas: {} points, {} labelled regions", grid.len(), components.len());
    out.finish(&serde_json::to_value(config)?)
}
