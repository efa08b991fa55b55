//! Property checks on one scenario, reported as JUnit XML and CSV.

use std::fmt::Write as _;
use std::path::Path;

use matdelay_core::analysis::{
    boundedness_certificate, extrapolated_bounds, global_attraction_probe, permanence_probe, random_histories,
    spanning_histories, AnalysisError, Outcome, TauHat,
};
use matdelay_core::model::validate;
use matdelay_core::stability::{check_global_conditions, classify_equilibrium, StabilityVerdict};
use matdelay_core::{integrate, EquilibriumKind, FunctionalResponse, IntegrationError};

use crate::config::Scenario;
use crate::error::CliError;
use crate::reports::all_equilibria;
use crate::svg::escape;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Reported for information; not a pass/fail criterion.
    Skipped,
}

#[derive(Debug, Clone)]
pub struct CheckRow {
    pub check: String,
    pub metric: &'static str,
    pub value: f64,
    pub threshold: String,
    pub status: Status,
    pub message: String,
}

impl CheckRow {
    fn new(check: impl Into<String>, metric: &'static str, value: f64, threshold: impl Into<String>, passed: bool) -> Self {
        Self {
            check: check.into(),
            metric,
            value,
            threshold: threshold.into(),
            status: if passed { Status::Pass } else { Status::Fail },
            message: String::new(),
        }
    }

    fn info(check: impl Into<String>, metric: &'static str, value: f64, message: impl Into<String>) -> Self {
        Self { check: check.into(), metric, value, threshold: String::new(), status: Status::Skipped, message: message.into() }
    }

    fn note(mut self, m: impl Into<String>) -> Self {
        self.message = m.into();
        self
    }
}

fn bool_value(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

const YJ_TOL: f64 = 1e-5;
const BOUND_SLACK: f64 = 0.01;
const RESIDUAL_TOL: f64 = 1e-10;
const R_BAND: f64 = 1e-3;
const BRACKET_GAP: f64 = 1e-6;

pub fn checks(s: &Scenario) -> Result<Vec<CheckRow>, CliError> {
    let spec = &s.spec;
    let mut rows = Vec::new();

    for c in validate(spec, 64).checks {
        rows.push(CheckRow::new(format!("hypothesis.{}", c.name), "passed", bool_value(c.passed), "1", c.passed).note(c.detail));
    }

    let history = s.history.materialize(spec);
    let hrep = history.check(spec);
    rows.push(CheckRow::new("history.admissible", "passed", bool_value(hrep.is_admissible()), "1", hrep.is_admissible()));
    rows.push(CheckRow::info("history.juvenile_consistency", "relative_gap", hrep.consistency_gap, "warning only"));
    if !hrep.is_admissible() {
        return Ok(rows);
    }

    let traj = integrate(spec, &history, &s.stepper).map_err(|e| match e {
        IntegrationError::InvalidConfig(m) | IntegrationError::InvalidHistory(m) => CliError::Config(m),
        other => CliError::Numerical(other.to_string()),
    })?;

    let min_corr = traj.min_stage_correction();
    rows.push(CheckRow::new("engine.correction_positive", "min_correction", min_corr, "> 0", min_corr > 0.0));
    let lag_ok = traj.lag_strictly_increasing();
    rows.push(CheckRow::new("engine.lag_increasing", "passed", bool_value(lag_ok), "1", lag_ok));

    let tau_max = spec.delay.tau_max();
    let times = traj.dense().times();
    let start = times.partition_point(|&t| t < tau_max);
    let stride = ((times.len() - start) / 400).max(1);
    let mut worst = 0.0f64;
    for i in (start..times.len()).step_by(stride) {
        let yj = traj.dense().values()[i][2];
        let integral = traj.yj_integral(times[i]).map_err(|e| CliError::Numerical(e.to_string()))?;
        worst = worst.max((yj - integral).abs() / yj.max(s.stepper.atol));
    }
    rows.push(CheckRow::new("engine.yj_conservation", "max_rel_err", worst, format!("{YJ_TOL:e}"), worst <= YJ_TOL));

    let tail = s.verify.tail_fraction;
    match boundedness_certificate(spec, &traj, tail) {
        Ok(c) => {
            let ratio = c.observed_v_sup / c.v_limit;
            rows.push(CheckRow::new("analysis.boundedness", "v_sup_over_limit", ratio, "1.01", c.holds(spec.params.k, BOUND_SLACK)));
        }
        Err(AnalysisError::InsufficientHorizon { window, needed }) => rows.push(CheckRow::info(
            "analysis.boundedness",
            "tail_window",
            window,
            format!("tail window shorter than {needed}"),
        )),
        Err(e) => return Err(CliError::Numerical(e.to_string())),
    }

    let r = spec.reproduction_number();
    let eqs = all_equilibria(spec)?;
    let max_res = eqs.iter().map(|e| e.residual).fold(0.0, f64::max);
    rows.push(CheckRow::new("equilibria.residual", "max_residual", max_res, format!("{RESIDUAL_TOL:e}"), max_res <= RESIDUAL_TOL));
    let coexist = eqs.iter().find(|e| e.kind == EquilibriumKind::Coexistence).copied();
    let near_one = (r - 1.0).abs() < R_BAND;
    if near_one {
        rows.push(CheckRow::info("equilibria.coexistence_iff_R_above_one", "R", r, "within 1e-3 of the threshold"));
    } else {
        let ok = coexist.is_some() == (r > 1.0);
        rows.push(CheckRow::new("equilibria.coexistence_iff_R_above_one", "R", r, "1", ok));
    }

    if near_one {
        rows.push(CheckRow::info("analysis.dichotomy", "R", r, "within 1e-3 of the threshold"));
    } else {
        let hs = spanning_histories(spec, s.verify.dichotomy_histories);
        match permanence_probe(spec, &hs, s.stepper.t_end, tail, &s.stepper) {
            Ok(v) => {
                let ok = (v.outcome == Outcome::Permanent) == (r > 1.0);
                rows.push(CheckRow::new("analysis.dichotomy", "R", r, "1", ok).note(format!("{:?}", v.outcome)));
            }
            Err(e) => rows.push(CheckRow::new("analysis.dichotomy", "R", r, "1", false).note(e.to_string())),
        }
    }

    for eq in &eqs {
        let cls = classify_equilibrium(spec, eq).map_err(|e| CliError::Numerical(e.to_string()))?;
        let name = format!("stability.{}", serde_json::to_value(eq.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default());
        let decided = !matches!(cls.verdict, StabilityVerdict::Unsupported | StabilityVerdict::NeutrallyStable)
            && cls.numeric_verdict != StabilityVerdict::NeutrallyStable;
        if decided {
            let ok = cls.verdict == cls.numeric_verdict;
            rows.push(
                CheckRow::new(name, "rightmost_re", cls.spectrum.abscissa, "sign matches verdict", ok)
                    .note(format!("{} vs numeric {}", cls.verdict.as_str(), cls.numeric_verdict.as_str())),
            );
        } else {
            rows.push(CheckRow::info(
                name,
                "rightmost_re",
                cls.spectrum.abscissa,
                format!("{} (numeric {})", cls.verdict.as_str(), cls.numeric_verdict.as_str()),
            ));
        }
    }

    if let (Some(eq), FunctionalResponse::BeddingtonDeAngelis { .. }) = (coexist, spec.response) {
        let cond = check_global_conditions(spec, &eq).map_err(|e| CliError::Numerical(e.to_string()))?;
        rows.push(CheckRow::info("conditions.local_stability", "k2_local_margin", cond.margins.k2_local, format!("holds = {}", cond.local_stability)));
        rows.push(CheckRow::info(
            "conditions.global_attraction",
            "capacity_recruitment_margin",
            cond.margins.capacity_recruitment,
            format!("holds = {}", cond.global_attraction),
        ));
        if cond.global_attraction {
            let eps = [1e-2, 1e-3, 1e-4];
            for (tau_hat, label, gating) in
                [(TauHat::AtEquilibrium, "brackets.tau_at_equilibrium", true), (TauHat::AtZero, "brackets.tau_at_zero", false)]
            {
                let res = extrapolated_bounds(spec, &eq, &eps, 500, tau_hat);
                let (gap, msg) = match &res {
                    Ok(b) => (b.gap_to_equilibrium, format!("limits {:?}", b.extrapolated)),
                    Err(e) => (f64::NAN, e.to_string()),
                };
                let row = if gating {
                    CheckRow::new(label, "extrapolated_gap", gap, format!("{BRACKET_GAP:e}"), res.is_ok() && gap <= BRACKET_GAP)
                        .note(msg)
                } else {
                    CheckRow::info(label, "extrapolated_gap", gap, msg)
                };
                rows.push(row);
            }
            let hs = random_histories(spec, &eq, s.verify.attraction_histories, s.seed);
            let horizon = s.verify.attraction_horizon.unwrap_or(500.0 / spec.params.d);
            match global_attraction_probe(spec, &eq, &hs, horizon, &s.stepper) {
                Ok(rep) => {
                    let w = rep.runs[rep.worst];
                    rows.push(
                        CheckRow::new(
                            "analysis.global_attraction",
                            "worst_rel_err",
                            w.rel_err_x.max(w.rel_err_y),
                            "1e-4",
                            rep.all_converged,
                        )
                        .note(format!("{} histories, horizon {horizon}", rep.runs.len())),
                    );
                }
                Err(e) => rows.push(CheckRow::new("analysis.global_attraction", "worst_rel_err", f64::NAN, "1e-4", false).note(e.to_string())),
            }
        }
    }
    Ok(rows)
}

pub fn junit(rows: &[CheckRow]) -> String {
    let failures = rows.iter().filter(|r| r.status == Status::Fail).count();
    let skipped = rows.iter().filter(|r| r.status == Status::Skipped).count();
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        r#"<testsuite name="matdelay-verify" tests="{}" failures="{failures}" skipped="{skipped}">"#,
        rows.len()
    );
    for r in rows {
        let _ = write!(out, r#"  <testcase classname="verify" name="{}">"#, escape(&r.check));
        let detail = escape(&format!("{} = {:?} (threshold {}) {}", r.metric, r.value, r.threshold, r.message));
        match r.status {
            Status::Pass => {}
            Status::Fail => {
                let _ = write!(out, r#"<failure message="{detail}"/>"#);
            }
            Status::Skipped => {
                let _ = write!(out, r#"<skipped message="{detail}"/>"#);
            }
        }
        out.push_str("</testcase>\n");
    }
    out.push_str("</testsuite>\n");
    out
}

pub fn csv(rows: &[CheckRow]) -> String {
    let mut out = String::from("check,metric,value,threshold,passed\n");
    for r in rows {
        let passed = match r.status {
            Status::Pass => "true",
            Status::Fail => "false",
            Status::Skipped => "skipped",
        };
        let _ = writeln!(out, "{},{},{:?},{},{passed}", r.check, r.metric, r.value, r.threshold);
    }
    out
}

pub fn run(s: &Scenario, out: &Path) -> Result<(), CliError> {
    let rows = checks(s)?;
    std::fs::write(out.join("verify.xml"), junit(&rows))?;
    std::fs::write(out.join("verify.csv"), csv(&rows))?;
    for r in &rows {
        let tag = match r.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "INFO",
        };
        println!("{tag} {} {} = {:?}", r.check, r.metric, r.value);
    }
    match rows.iter().filter(|r| r.status == Status::Fail).count() {
        0 => Ok(()),
        n => Err(CliError::ChecksFailed(n)),
    }
}
