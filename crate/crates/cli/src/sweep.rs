use std::fmt::Write as _;
use std::path::Path;

use matdelay_core::stability::{check_global_conditions, classify_equilibrium};
use matdelay_core::{boundary_equilibria, solve_coexistence, EquilibriumKind, FunctionalResponse, ModelSpec};
use rayon::prelude::*;

use crate::config::{Scenario, SweepDoc};
use crate::error::CliError;

pub const HEADER: &str = "k2,d,tau_m,tau_M,R,coexists,thm7_pass,thm8_pass,rightmost_re";

struct Point {
    k2: Option<f64>,
    d: f64,
    tau_m: f64,
    tau_max: f64,
}

fn with_k2(r: FunctionalResponse, k2: f64) -> Option<FunctionalResponse> {
    match r {
        FunctionalResponse::BeddingtonDeAngelis { b, k1, .. } => Some(FunctionalResponse::BeddingtonDeAngelis { b, k1, k2 }),
        FunctionalResponse::CrowleyMartin { b, k1, .. } => Some(FunctionalResponse::CrowleyMartin { b, k1, k2 }),
        _ => None,
    }
}

fn current_k2(r: &FunctionalResponse) -> Option<f64> {
    match r {
        FunctionalResponse::BeddingtonDeAngelis { k2, .. } | FunctionalResponse::CrowleyMartin { k2, .. } => Some(*k2),
        _ => None,
    }
}

fn grid(base: &ModelSpec, doc: &SweepDoc) -> Result<Vec<Point>, CliError> {
    let k2s: Vec<Option<f64>> = match &doc.k2 {
        Some(v) => {
            if current_k2(&base.response).is_none() {
                return Err(CliError::Config(format!(
                    "sweep.k2 needs a response with k2, got {}",
                    base.response.kind_name()
                )));
            }
            v.iter().map(|&k| Some(k)).collect()
        }
        None => vec![current_k2(&base.response)],
    };
    let ds = doc.d.clone().unwrap_or_else(|| vec![base.params.d]);
    let tms = doc.tau_m.clone().unwrap_or_else(|| vec![base.delay.tau_m()]);
    let tmaxs = doc.tau_max.clone().unwrap_or_else(|| vec![base.delay.tau_max()]);
    let mut pts = Vec::new();
    for &k2 in &k2s {
        for &d in &ds {
            for &tau_m in &tms {
                for &tau_max in &tmaxs {
                    pts.push(Point { k2, d, tau_m, tau_max });
                }
            }
        }
    }
    Ok(pts)
}

fn opt(v: Option<impl std::fmt::Debug>) -> String {
    v.map_or_else(String::new, |v| format!("{v:?}"))
}

fn row(base: &ModelSpec, p: &Point) -> Result<String, CliError> {
    let mut spec = base.clone();
    spec.params.d = p.d;
    spec.delay = spec.delay.with_bounds(p.tau_m, p.tau_max);
    if let Some(k2) = p.k2 {
        if let Some(r) = with_k2(spec.response, k2) {
            spec.response = r;
        }
    }
    let r = spec.reproduction_number();
    let coexist = solve_coexistence(&spec).ok();
    let eq = match coexist {
        Some(e) => e,
        None => boundary_equilibria(&spec)
            .into_iter()
            .find(|e| e.kind == EquilibriumKind::PredatorExtinction)
            .ok_or_else(|| CliError::Numerical("no predator-free equilibrium".into()))?,
    };
    let conds = coexist.and_then(|e| check_global_conditions(&spec, &e).ok());
    let rightmost = classify_equilibrium(&spec, &eq)
        .map_err(|e| CliError::Numerical(format!("d = {}, tau_m = {}: {e}", p.d, p.tau_m)))?
        .spectrum
        .abscissa;
    Ok(format!(
        "{},{:?},{:?},{:?},{:?},{},{},{},{:?}",
        opt(p.k2),
        p.d,
        spec.delay.tau_m(),
        spec.delay.tau_max(),
        r,
        coexist.is_some(),
        opt(conds.map(|c| c.local_stability)),
        opt(conds.map(|c| c.global_attraction)),
        rightmost
    ))
}

/// Rows are written in grid order: `k2` outermost, `tau_M` innermost.
pub fn render(s: &Scenario) -> Result<String, CliError> {
    let doc = s.sweep.clone().unwrap_or_default();
    let pts = grid(&s.spec, &doc)?;
    let rows = pts.par_iter().map(|p| row(&s.spec, p)).collect::<Result<Vec<_>, _>>()?;
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    for r in rows {
        let _ = writeln!(out, "{r}");
    }
    Ok(out)
}

pub fn run(s: &Scenario, out: &Path) -> Result<(), CliError> {
    let csv = render(s)?;
    let path = out.join("sweep.csv");
    std::fs::write(&path, csv)?;
    println!("{}", path.display());
    Ok(())
}
