//! On-disk scenario format: UTF-8 JSON with complex numbers as [re, im]
//! pairs, vectors as arrays of complex and matrices as arrays of rows.

use histories::engine::{HistorySpec, ObservableSpec};
use histories::density::CompositeHistorySpec;
use histories::inequality::{ChshSetup, DichotomicSchedule};
use histories::qubit::z_observable;
use histories::tensor::{Operator, StateVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub type CNum = [f64; 2];
pub type CVec = Vec<CNum>;
pub type CMat = Vec<Vec<CNum>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasurementDef {
    pub name: String,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<CVec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompositeDef {
    pub dim_a: usize,
    pub dim_b: usize,
    pub measurements_a: Vec<MeasurementDef>,
    pub measurements_b: Vec<MeasurementDef>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LgDef {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unitaries: Option<Vec<CMat>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_observable: Option<MeasurementDef>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChshDef {
    pub a1: MeasurementDef,
    pub b1: MeasurementDef,
    pub a2: MeasurementDef,
    pub b2: MeasurementDef,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub dimension: usize,
    pub initial_state: CVec,
    pub evolutions: Vec<CMat>,
    pub measurements: Vec<MeasurementDef>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub composite: Option<CompositeDef>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lg: Option<LgDef>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chsh: Option<ChshDef>,
}

fn validation(msg: String) -> CliError {
    CliError::validation(msg)
}

pub fn load_scenario(path: &str) -> Result<ScenarioFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| validation(format!("cannot read scenario {path}: {e}")))?;
    parse_scenario(&text)
}

pub fn parse_scenario(text: &str) -> Result<ScenarioFile, CliError> {
    let scenario: ScenarioFile = serde_json::from_str(text)
        .map_err(|e| validation(format!("scenario parse error at line {}: {e}", e.line())))?;
    // Validate everything eagerly so errors name the offending entry.
    build_spec(&scenario)?;
    if scenario.composite.is_some() {
        build_composite(&scenario)?;
    }
    if scenario.lg.is_some() {
        build_lg(&scenario)?;
    }
    if scenario.chsh.is_some() {
        build_chsh(&scenario)?;
    }
    Ok(scenario)
}

pub fn to_state(v: &CVec, what: &str) -> Result<StateVector, CliError> {
    let entries: Vec<Complex64> = v.iter().map(|c| Complex64::new(c[0], c[1])).collect();
    let state =
        StateVector::new(entries).map_err(|e| validation(format!("{what}: {e}")))?;
    state
        .check_normalized(1e-10)
        .map_err(|e| validation(format!("{what}: {e}")))?;
    Ok(state)
}

pub fn to_operator(m: &CMat, what: &str) -> Result<Operator, CliError> {
    let n = m.len();
    let mut entries = Vec::with_capacity(n * n);
    for (r, row) in m.iter().enumerate() {
        if row.len() != n {
            return Err(validation(format!(
                "{what}: row {r} has {} entries, expected {n}",
                row.len()
            )));
        }
        entries.extend(row.iter().map(|c| Complex64::new(c[0], c[1])));
    }
    Operator::new(n, entries).map_err(|e| validation(format!("{what}: {e}")))
}

pub fn to_unitary(m: &CMat, what: &str) -> Result<Operator, CliError> {
    let op = to_operator(m, what)?;
    op.check_unitary(1e-10)
        .map_err(|e| validation(format!("{what}: {e}")))?;
    Ok(op)
}

pub fn to_observable(def: &MeasurementDef, what: &str) -> Result<ObservableSpec, CliError> {
    let eigenvectors: Result<Vec<StateVector>, CliError> = def
        .eigenvectors
        .iter()
        .enumerate()
        .map(|(k, v)| to_state(v, &format!("{what}: eigenvector {k} of {}", def.name)))
        .collect();
    ObservableSpec::new(&def.name, def.eigenvalues.clone(), eigenvectors?)
        .map_err(|e| validation(format!("{what} ({}): {e}", def.name)))
}

pub fn build_spec(sc: &ScenarioFile) -> Result<HistorySpec, CliError> {
    if sc.initial_state.len() != sc.dimension {
        return Err(validation(format!(
            "initial_state has {} entries, expected dimension {}",
            sc.initial_state.len(),
            sc.dimension
        )));
    }
    let initial = to_state(&sc.initial_state, "initial_state")?;
    let evolutions: Result<Vec<Operator>, CliError> = sc
        .evolutions
        .iter()
        .enumerate()
        .map(|(k, m)| to_unitary(m, &format!("evolutions[{k}]")))
        .collect();
    let bases: Result<Vec<ObservableSpec>, CliError> = sc
        .measurements
        .iter()
        .enumerate()
        .map(|(k, d)| to_observable(d, &format!("measurements[{k}]")))
        .collect();
    HistorySpec::with_bases(initial, evolutions?, bases?)
        .map_err(|e| validation(format!("scenario: {e}")))
}

pub fn build_composite(sc: &ScenarioFile) -> Result<CompositeHistorySpec, CliError> {
    let comp = sc
        .composite
        .as_ref()
        .ok_or_else(|| validation("scenario has no composite block".into()))?;
    if comp.dim_a * comp.dim_b != sc.dimension {
        return Err(validation(format!(
            "composite dims {}x{} do not match dimension {}",
            comp.dim_a, comp.dim_b, sc.dimension
        )));
    }
    let initial = to_state(&sc.initial_state, "initial_state")?;
    let evolutions: Result<Vec<Operator>, CliError> = sc
        .evolutions
        .iter()
        .enumerate()
        .map(|(k, m)| to_unitary(m, &format!("evolutions[{k}]")))
        .collect();
    let ma: Result<Vec<ObservableSpec>, CliError> = comp
        .measurements_a
        .iter()
        .enumerate()
        .map(|(k, d)| to_observable(d, &format!("composite.measurements_a[{k}]")))
        .collect();
    let mb: Result<Vec<ObservableSpec>, CliError> = comp
        .measurements_b
        .iter()
        .enumerate()
        .map(|(k, d)| to_observable(d, &format!("composite.measurements_b[{k}]")))
        .collect();
    CompositeHistorySpec::new(comp.dim_a, comp.dim_b, initial, evolutions?, ma?, mb?)
        .map_err(|e| validation(format!("composite block: {e}")))
}

pub fn build_lg(sc: &ScenarioFile) -> Result<DichotomicSchedule, CliError> {
    let lg = sc
        .lg
        .as_ref()
        .ok_or_else(|| validation("scenario has no lg block".into()))?;
    if let Some(theta) = lg.theta {
        return Ok(DichotomicSchedule::precession(theta));
    }
    let mats = lg.unitaries.as_ref().ok_or_else(|| {
        validation("lg block needs either theta or three explicit unitaries".into())
    })?;
    if mats.len() != 3 {
        return Err(validation(format!(
            "lg block has {} unitaries, expected 3",
            mats.len()
        )));
    }
    let u: Result<Vec<Operator>, CliError> = mats
        .iter()
        .enumerate()
        .map(|(k, m)| to_unitary(m, &format!("lg.unitaries[{k}]")))
        .collect();
    let u = u?;
    let q = match &lg.q_observable {
        Some(def) => to_observable(def, "lg.q_observable")?,
        None => z_observable(),
    };
    let initial = to_state(&sc.initial_state, "initial_state")?;
    DichotomicSchedule::new(initial, [u[0].clone(), u[1].clone(), u[2].clone()], q)
        .map_err(|e| validation(format!("lg block: {e}")))
}

pub fn build_chsh(sc: &ScenarioFile) -> Result<ChshSetup, CliError> {
    let chsh = sc
        .chsh
        .as_ref()
        .ok_or_else(|| validation("scenario has no chsh block".into()))?;
    if sc.evolutions.len() != 2 {
        return Err(validation(format!(
            "chsh needs exactly 2 evolutions, scenario has {}",
            sc.evolutions.len()
        )));
    }
    Ok(ChshSetup {
        initial: to_state(&sc.initial_state, "initial_state")?,
        u1: to_unitary(&sc.evolutions[0], "evolutions[0]")?,
        u2: to_unitary(&sc.evolutions[1], "evolutions[1]")?,
        a1: to_observable(&chsh.a1, "chsh.a1")?,
        b1: to_observable(&chsh.b1, "chsh.b1")?,
        a2: to_observable(&chsh.a2, "chsh.a2")?,
        b2: to_observable(&chsh.b2, "chsh.b2")?,
        reference: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_equal() {
        for name in ["xz-example", "bell2-chsh", "precession-lg"] {
            let text = crate::builtin_scenario(name).unwrap();
            let loaded = parse_scenario(text).unwrap();
            let serialized = serde_json::to_string(&loaded).unwrap();
            let reloaded = parse_scenario(&serialized).unwrap();
            assert_eq!(serialized, serde_json::to_string(&reloaded).unwrap());
        }
    }

    #[test]
    fn parse_error_reports_the_line() {
        let err = parse_scenario("{\n  \"dimension\": oops\n}").unwrap_err();
        assert!(err.message().contains("line 2"), "{}", err.message());
    }
}
