//! JSON reports for `equilibria` and `stability`.

use std::path::Path;

use matdelay_core::equilibria::EquilibriumError;
use matdelay_core::stability::{check_global_conditions, classify_equilibrium, ConditionReport};
use matdelay_core::{boundary_equilibria, solve_coexistence, Equilibrium, EquilibriumKind, ModelSpec};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Scenario;
use crate::error::CliError;
use crate::EqChoice;

#[derive(Serialize)]
struct EquilibriaReport {
    equilibria: Vec<Equilibrium>,
    #[serde(rename = "R")]
    r: f64,
}

/// Boundary equilibria plus the coexistence point when it exists.
pub fn all_equilibria(spec: &ModelSpec) -> Result<Vec<Equilibrium>, CliError> {
    let mut eqs = boundary_equilibria(spec);
    match solve_coexistence(spec) {
        Ok(e) => eqs.push(e),
        Err(EquilibriumError::NotFound { .. }) => {}
        Err(e) => return Err(CliError::Numerical(e.to_string())),
    }
    Ok(eqs)
}

fn emit(value: &Value, out: Option<&Path>, name: &str) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(e.to_string()))?;
    println!("{text}");
    if let Some(dir) = out {
        std::fs::write(dir.join(name), format!("{text}\n"))?;
    }
    Ok(())
}

pub fn equilibria(s: &Scenario, out: Option<&Path>) -> Result<(), CliError> {
    let report = EquilibriaReport { equilibria: all_equilibria(&s.spec)?, r: s.spec.reproduction_number() };
    let value = serde_json::to_value(&report).map_err(|e| CliError::Numerical(e.to_string()))?;
    emit(&value, out, "equilibria.json")
}

/// `conditions` is present only for a Beddington–DeAngelis coexistence
/// point.
pub fn stability_report(spec: &ModelSpec, eq: &Equilibrium) -> Result<(Value, Option<ConditionReport>), CliError> {
    let cls = classify_equilibrium(spec, eq).map_err(|e| CliError::Numerical(e.to_string()))?;
    let conditions = check_global_conditions(spec, eq).ok();
    let c = &cls.coefficients;
    let rightmost = cls.spectrum.rightmost().map_or(
        json!({"re": null, "im": null}),
        |z| json!({"re": z.re, "im": z.im.abs()}),
    );
    let value = json!({
        "equilibrium": eq,
        "coefficients": {"A": c.a, "B": c.b, "C": c.c, "D": c.d, "eta": c.eta},
        "verdict": cls.verdict,
        "route": cls.route,
        "numeric_verdict": cls.numeric_verdict,
        "conditions": conditions,
        "rightmost": rightmost,
    });
    Ok((value, conditions))
}

pub fn stability(s: &Scenario, choice: Option<EqChoice>, out: Option<&Path>) -> Result<(), CliError> {
    let eqs = all_equilibria(&s.spec)?;
    let find = |k: EquilibriumKind| eqs.iter().find(|e| e.kind == k).copied();
    let eq = match choice {
        Some(EqChoice::Trivial) => find(EquilibriumKind::Trivial),
        Some(EqChoice::PredatorExtinction) => find(EquilibriumKind::PredatorExtinction),
        Some(EqChoice::Coexistence) => {
            Some(find(EquilibriumKind::Coexistence).ok_or_else(|| {
                CliError::Usage(format!("no coexistence equilibrium (R = {})", s.spec.reproduction_number()))
            })?)
        }
        None => find(EquilibriumKind::Coexistence).or_else(|| find(EquilibriumKind::PredatorExtinction)),
    }
    .ok_or_else(|| CliError::Numerical("requested equilibrium not found".into()))?;
    let (value, _) = stability_report(&s.spec, &eq)?;
    emit(&value, out, "stability.json")
}
