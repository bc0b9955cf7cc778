//! The `table` and `bench` subcommands.

use std::time::Instant;

use adindex_core::macdonald::{
    coefficient_table, index, specialize_index, table_csv, table_json, IndexSpec, Representation, Specialization,
};
use adindex_core::{Error, Result, Series, Truncation};
use serde::{Deserialize, Serialize};

use crate::args::{BenchArgs, TableArgs, TableFormat};

pub fn table(args: &TableArgs) -> Result<String> {
    let trunc = Truncation::new(args.nq, args.nt);
    let series = match args.rep.parse::<Representation>() {
        Ok(rep) => index(&IndexSpec::new(args.k, rep, trunc)?)?,
        Err(_) => {
            let mode: Specialization = args.rep.parse().map_err(|_| {
                Error::Usage(format!(
                    "unknown rep `{}`; expected bosonic, fermionic, fermionic2, original, schur or hall-littlewood",
                    args.rep
                ))
            })?;
            if mode == Specialization::Schur && args.nq > args.nt {
                return Err(Error::Usage(format!("schur needs nq <= nt, got nq={} nt={}", args.nq, args.nt)));
            }
            let f = index(&IndexSpec::new(args.k, Representation::Fermionic, trunc)?)?;
            specialize_index(&f, mode)?
        }
    };
    Ok(render(&series, args.format))
}

fn render(series: &Series, format: TableFormat) -> String {
    let rows = coefficient_table(series);
    match format {
        TableFormat::Csv => table_csv(&rows),
        TableFormat::Json => table_json(&rows) + "\n",
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub k: usize,
    pub rep: String,
    pub nq: u32,
    pub nt: u32,
    pub runs: usize,
    pub terms: usize,
    pub min_ms: f64,
    pub mean_ms: f64,
}

pub fn bench(args: &BenchArgs) -> Result<Vec<BenchRow>> {
    let reps = args
        .rep
        .iter()
        .map(|r| r.parse::<Representation>())
        .collect::<Result<Vec<_>>>()?;
    let trunc = Truncation::new(args.nq, args.nt);
    let runs = args.reps.max(1);
    let mut rows = Vec::new();
    for k in 1..=args.kmax {
        for &rep in &reps {
            let spec = IndexSpec::new(k, rep, trunc)?;
            let mut times = Vec::with_capacity(runs);
            let mut terms = 0;
            for _ in 0..runs {
                let started = Instant::now();
                terms = index(&spec)?.len();
                times.push(started.elapsed().as_secs_f64() * 1e3);
            }
            let min_ms = times.iter().cloned().fold(f64::INFINITY, f64::min);
            let mean_ms = times.iter().sum::<f64>() / runs as f64;
            rows.push(BenchRow { k, rep: rep.name().to_string(), nq: args.nq, nt: args.nt, runs, terms, min_ms, mean_ms });
        }
    }
    Ok(rows)
}

pub fn render_bench(rows: &[BenchRow], json: bool) -> String {
    let mut out = String::new();
    if json {
        for r in rows {
            out.push_str(&serde_json::to_string(r).expect("row serializes"));
            out.push('\n');
        }
        return out;
    }
    out.push_str(&format!("{:>3} {:<11} {:>8} {:>12} {:>12}\n", "k", "rep", "terms", "min ms", "mean ms"));
    for r in rows {
        out.push_str(&format!(
            "{:>3} {:<11} {:>8} {:>12.2} {:>12.2}\n",
            r.k, r.rep, r.terms, r.min_ms, r.mean_ms
        ));
    }
    out
}
