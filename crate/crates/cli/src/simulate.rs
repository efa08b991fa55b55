use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use matdelay_core::{integrate, IntegrationError, Trajectory};

use crate::config::Scenario;
use crate::error::CliError;
use crate::svg::{self, Panel, Series};

pub fn run(s: &Scenario, out: &Path) -> Result<(), CliError> {
    let history = s.history.materialize(&s.spec);
    let report = history.check(&s.spec);
    if !report.is_admissible() {
        return Err(CliError::Config(format!("history is not admissible: {report:?}")));
    }
    match integrate(&s.spec, &history, &s.stepper) {
        Ok(traj) => {
            write_outputs(s, &traj, out)?;
            let fin = traj.final_state();
            println!(
                "{}",
                serde_json::json!({
                    "t_end": fin.t,
                    "final": {"x": fin.x, "y": fin.y, "yj": fin.yj},
                    "accepted_steps": traj.dense().accepted_steps(),
                    "rejected_steps": traj.dense().rejected_steps(),
                    "csv": out.join(&s.output.csv),
                })
            );
            Ok(())
        }
        Err(e) => {
            if let Some(partial) = e.partial() {
                write_outputs(s, partial, out)?;
            }
            Err(match e {
                IntegrationError::InvalidConfig(m) => CliError::Config(m),
                IntegrationError::InvalidHistory(m) => CliError::Config(m),
                other => CliError::Numerical(other.to_string()),
            })
        }
    }
}

fn write_outputs(s: &Scenario, traj: &Trajectory, out: &Path) -> Result<(), CliError> {
    let file = File::create(out.join(&s.output.csv))?;
    traj.write_csv(BufWriter::new(file), s.output.stride)?;
    if let Some(name) = &s.output.svg {
        std::fs::write(out.join(name), chart(traj))?;
    }
    Ok(())
}

const MAX_POINTS: usize = 2000;

fn chart(traj: &Trajectory) -> String {
    let n = traj.dense().times().len();
    let stride = n.div_ceil(MAX_POINTS).max(1);
    let idx: Vec<usize> = (0..n).filter(|i| i % stride == 0 || *i == n - 1).collect();
    let pick = |f: &dyn Fn(usize) -> f64| idx.iter().map(|&i| f(i)).collect::<Vec<f64>>();
    let vals = traj.dense().values();
    let t = pick(&|i| traj.dense().times()[i]);
    let x = pick(&|i| vals[i][0]);
    let y = pick(&|i| vals[i][1]);
    let yj = pick(&|i| vals[i][2]);
    let tau = pick(&|i| traj.node_tau()[i]);
    svg::render(
        &t,
        &[
            Panel {
                title: "populations",
                series: vec![
                    Series { label: "x (prey)", color: "#1f77b4", values: &x },
                    Series { label: "y (mature)", color: "#d62728", values: &y },
                    Series { label: "yj (juvenile)", color: "#2ca02c", values: &yj },
                ],
            },
            Panel { title: "maturation delay tau(y)", series: vec![Series { label: "tau", color: "#444", values: &tau }] },
        ],
    )
}
