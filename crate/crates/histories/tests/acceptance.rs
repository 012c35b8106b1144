//! End-to-end acceptance suite. Each criterion prints one pass/fail line;
//! the test fails if any criterion does.

use histories::density::{
    density_from_history_vector, space_reduce, subsystem_sequence_probability, time_reduce,
    von_neumann_entropy, CompositeHistorySpec, LogBase, Subsystem,
};
use histories::engine::{sequences, HistorySpec, Measurement, ObservableSpec};
use histories::inequality::{
    chsh_evaluate, lg_evaluate, lg_interference_decomposition, random_schedule, ChshMode,
    ChshSetup, DichotomicSchedule,
};
use histories::observables::two_time_intermediate_state;
use histories::protocol::{verify_protocol_equivalence, CloneGate};
use histories::qubit::{x_observable, z_observable};
use histories::tensor::{Operator, StateVector};
use histories::{Complex64, HistoryError};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn check(ok: bool, detail: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(detail)
    }
}

fn random_state(rng: &mut ChaCha8Rng, d: usize) -> StateVector {
    loop {
        let v = StateVector::new(
            (0..d)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect(),
        )
        .unwrap();
        if v.norm() > 1e-3 {
            return v.normalized().unwrap();
        }
    }
}

fn random_unitary(rng: &mut ChaCha8Rng, d: usize) -> Operator {
    let mut cols: Vec<StateVector> = Vec::new();
    while cols.len() < d {
        let mut v = random_state(rng, d);
        for c in &cols {
            let overlap = c.inner(&v);
            v = v.sub(&c.scale(overlap));
        }
        if v.norm() > 1e-6 {
            cols.push(v.normalized().unwrap());
        }
    }
    let mut u = Operator::zeros(d);
    for (k, c) in cols.iter().enumerate() {
        for (row, z) in c.entries().iter().enumerate() {
            u.set(row, k, *z);
        }
    }
    u
}

fn random_basis(rng: &mut ChaCha8Rng, d: usize) -> ObservableSpec {
    let u = random_unitary(rng, d);
    let eigenvectors = (0..d)
        .map(|k| StateVector::new((0..d).map(|row| u.get(row, k)).collect()).unwrap())
        .collect();
    ObservableSpec::new("R", (0..d).map(|k| k as f64).collect(), eigenvectors).unwrap()
}

fn random_spec(rng: &mut ChaCha8Rng, d: usize, n: usize) -> HistorySpec {
    HistorySpec::new(
        random_state(rng, d),
        (0..n).map(|_| random_unitary(rng, d)).collect(),
        (0..n)
            .map(|_| Measurement::Basis(random_basis(rng, d)))
            .collect(),
    )
    .unwrap()
}

fn criterion_1() -> Result<(), String> {
    let psi = StateVector::from_real(&[SQRT_HALF, SQRT_HALF]).unwrap();
    let id = Operator::identity(2);
    let x_spec = HistorySpec::with_bases(
        psi.clone(),
        vec![id.clone(), id.clone()],
        vec![x_observable(), x_observable()],
    )
    .unwrap();
    let hv = x_spec.history_vector().unwrap();
    let content = hv.content();
    check(
        content.len() == 1
            && content[0].0 == &vec![0, 0]
            && (content[0].1 - Complex64::ONE).norm() <= 1e-12,
        format!("X-measurement content {content:?}"),
    )?;

    let z_spec = HistorySpec::with_bases(
        psi,
        vec![id.clone(), id],
        vec![z_observable(), z_observable()],
    )
    .unwrap();
    let hv = z_spec.history_vector().unwrap();
    let expected = [SQRT_HALF, 0.0, 0.0, SQRT_HALF];
    for (alpha, want) in sequences(&[2, 2]).zip(expected) {
        let got = hv.amplitude(&alpha);
        check(
            (got - Complex64::new(want, 0.0)).norm() <= 1e-12,
            format!("Z amplitude at {alpha:?}: {got} vs {want}"),
        )?;
    }
    Ok(())
}

fn criterion_2() -> Result<(), String> {
    let report = chsh_evaluate(&ChshSetup::standard(), ChshMode::FixedBasis, 1e-10)
        .map_err(|e| e.to_string())?;
    let expected = [SQRT_HALF, SQRT_HALF, SQRT_HALF, -SQRT_HALF];
    for (got, want) in report.averages.iter().zip(expected) {
        check(
            (got - want).abs() <= 1e-12,
            format!("fixed-basis average {got} vs {want}"),
        )?;
    }
    check(
        (report.s - 2.0 * std::f64::consts::SQRT_2).abs() <= 1e-12,
        format!("S = {}", report.s),
    )
}

fn criterion_3() -> Result<(), String> {
    let report = chsh_evaluate(&ChshSetup::standard(), ChshMode::PerPair, 1e-10)
        .map_err(|e| e.to_string())?;
    // Report order (A1A2, A1B2, B1A2, B1B2).
    let expected = [-SQRT_HALF, -SQRT_HALF, SQRT_HALF, -SQRT_HALF];
    for (got, want) in report.averages.iter().zip(expected) {
        check(
            (got - want).abs() <= 1e-12,
            format!("per-pair average {got} vs {want}"),
        )?;
    }
    check(
        (report.s_after_a1_flip - 2.0 * std::f64::consts::SQRT_2).abs() <= 1e-12,
        format!("flipped S = {}", report.s_after_a1_flip),
    )?;
    let tables = report.tables.as_ref().ok_or("per-pair tables missing")?;
    for (table, average) in tables.iter().zip(report.averages) {
        let total: f64 = table.probabilities.iter().flatten().sum();
        check(
            (total - 1.0).abs() <= 1e-10,
            format!("table ({}, {}) sums to {total}", table.first, table.second),
        )?;
        let signs = [1.0, -1.0];
        let mut e = 0.0;
        for (i, s1) in signs.iter().enumerate() {
            for (j, s2) in signs.iter().enumerate() {
                e += s1 * s2 * table.probabilities[i][j];
            }
        }
        check(
            (e - average).abs() <= 1e-12,
            format!("table average {e} vs reported {average}"),
        )?;
    }
    Ok(())
}

fn lg_sweep() -> Result<(usize, usize), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut consistent_count = 0;
    for case in 0..1200 {
        let sched = random_schedule(&mut rng, case % 3 == 0);
        let report = lg_evaluate(&sched, 1e-10).map_err(|e| e.to_string())?;
        if report.consistent {
            consistent_count += 1;
            check(
                (-3.0 - 1e-9..=1.0 + 1e-9).contains(&report.k),
                format!("case {case}: consistent schedule with K = {}", report.k),
            )?;
        }
        let decomp = lg_interference_decomposition(&sched).map_err(|e| e.to_string())?;
        check(
            decomp.residual <= 1e-9,
            format!("case {case}: decomposition residual {}", decomp.residual),
        )?;
        check(
            decomp.max_last_slot_interference <= 1e-12,
            format!(
                "case {case}: last-slot interference {}",
                decomp.max_last_slot_interference
            ),
        )?;
    }
    Ok((1200, consistent_count))
}

fn criterion_6() -> Result<(), String> {
    let sched = DichotomicSchedule::precession(std::f64::consts::FRAC_PI_3);
    let report = lg_evaluate(&sched, 1e-10).map_err(|e| e.to_string())?;
    check(
        (report.k - 1.5).abs() <= 1e-10 && report.violated,
        format!("K = {}, violated = {}", report.k, report.violated),
    )
}

fn criterion_7() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for case in 0..100 {
        let d = if case % 2 == 0 { 2 } else { 3 };
        let n = if case % 3 == 0 { 2 } else { 3 };
        let spec = random_spec(&mut rng, d, n);
        let protocol_check =
            verify_protocol_equivalence(&spec, 1e-10).map_err(|e| e.to_string())?;
        check(
            protocol_check.equivalent,
            format!(
                "case {case} (d={d}, n={n}): residual {}",
                protocol_check.max_abs_diff
            ),
        )?;
    }
    for d in 2..=8 {
        let basis = random_basis(&mut rng, d);
        let gate = CloneGate::new(&basis).map_err(|e| e.to_string())?;
        check(
            gate.matrix().is_unitary(1e-12),
            format!("clone gate not unitary for d = {d}"),
        )?;
    }
    let cnot = Operator::from_real(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ])
    .unwrap();
    let gate = CloneGate::new(&z_observable()).map_err(|e| e.to_string())?;
    check(
        gate.matrix().max_abs_diff(&cnot) == 0.0,
        "d=2 clone gate differs from CNOT".into(),
    )
}

fn criterion_8() -> Result<(), String> {
    // The two-time entangled state: psi = (|1> - |0>)/sqrt(2), U2 = X, Z measurements.
    let bell2 = HistorySpec::with_bases(
        StateVector::from_real(&[-SQRT_HALF, SQRT_HALF]).unwrap(),
        vec![Operator::identity(2), histories::qubit::pauli_x()],
        vec![z_observable(), z_observable()],
    )
    .unwrap()
    .history_vector()
    .unwrap();
    let rho = density_from_history_vector(&bell2).map_err(|e| e.to_string())?;
    let pure_entropy = von_neumann_entropy(&rho, LogBase::Natural).map_err(|e| e.to_string())?;
    check(
        pure_entropy.abs() <= 1e-9,
        format!("pure-state entropy {pure_entropy}"),
    )?;
    let s1 = von_neumann_entropy(
        &time_reduce(&rho, &[1]).map_err(|e| e.to_string())?,
        LogBase::Natural,
    )
    .map_err(|e| e.to_string())?;
    check(
        (s1 - std::f64::consts::LN_2).abs() <= 1e-10,
        format!("time-reduced entropy {s1}"),
    )?;
    let s2 = von_neumann_entropy(
        &time_reduce(&rho, &[2]).map_err(|e| e.to_string())?,
        LogBase::Natural,
    )
    .map_err(|e| e.to_string())?;
    check(
        (s1 - s2).abs() <= 1e-9,
        format!("Schmidt asymmetry {s1} vs {s2}"),
    )?;

    // Correlated composite spec: Tr(rho^A P_alpha) = sum_beta p(alpha, beta).
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let spec = CompositeHistorySpec::new(
        2,
        2,
        random_state(&mut rng, 4),
        vec![random_unitary(&mut rng, 4), random_unitary(&mut rng, 4)],
        vec![z_observable(), x_observable()],
        vec![x_observable(), z_observable()],
    )
    .map_err(|e| e.to_string())?;
    let _ = space_reduce(&spec, Subsystem::A).map_err(|e| e.to_string())?;
    for alpha in sequences(&[2, 2]) {
        let via_density = subsystem_sequence_probability(&spec, Subsystem::A, &alpha)
            .map_err(|e| e.to_string())?;
        let mut via_marginal = 0.0;
        for beta in sequences(&[2, 2]) {
            via_marginal += spec
                .joint_probability(&alpha, &beta)
                .map_err(|e| e.to_string())?;
        }
        check(
            (via_density - via_marginal).abs() <= 1e-12,
            format!("marginal mismatch at {alpha:?}: {via_density} vs {via_marginal}"),
        )?;
    }

    // Factorized evolution: Alice's statistics match her standalone spec.
    let psi_a = random_state(&mut rng, 2);
    let psi_b = random_state(&mut rng, 2);
    let ua: Vec<Operator> = (0..2).map(|_| random_unitary(&mut rng, 2)).collect();
    let ub: Vec<Operator> = (0..2).map(|_| random_unitary(&mut rng, 2)).collect();
    let factorized = CompositeHistorySpec::new(
        2,
        2,
        psi_a.kron(&psi_b),
        ua.iter().zip(&ub).map(|(a, b)| a.kron(b)).collect(),
        vec![z_observable(), x_observable()],
        vec![x_observable(), z_observable()],
    )
    .map_err(|e| e.to_string())?;
    let standalone = HistorySpec::with_bases(
        psi_a,
        ua,
        vec![z_observable(), x_observable()],
    )
    .unwrap();
    for alpha in sequences(&[2, 2]) {
        let reduced = subsystem_sequence_probability(&factorized, Subsystem::A, &alpha)
            .map_err(|e| e.to_string())?;
        let direct = standalone
            .sequence_probability(&alpha)
            .map_err(|e| e.to_string())?;
        check(
            (reduced - direct).abs() <= 1e-12,
            format!("standalone mismatch at {alpha:?}: {reduced} vs {direct}"),
        )?;
    }
    Ok(())
}

fn criterion_9() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for case in 0..200 {
        let d = if case % 2 == 0 { 2 } else { 3 };
        let n = 1 + case % 3;
        let spec = random_spec(&mut rng, d, n);
        let report = spec.marginal_checks().map_err(|e| e.to_string())?;
        check(
            (report.total_probability - 1.0).abs() <= 1e-10,
            format!("case {case}: total probability {}", report.total_probability),
        )?;
        for (slot, r) in report.amplitude_residuals.iter().enumerate() {
            check(
                *r <= 1e-12,
                format!("case {case}: amplitude residual {r} at slot {}", slot + 1),
            )?;
        }
        check(
            report.last_slot_probability_residual <= 1e-12,
            format!(
                "case {case}: last-slot residual {}",
                report.last_slot_probability_residual
            ),
        )?;
    }
    Ok(())
}

fn criterion_10() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    for case in 0..100 {
        let spec = random_spec(&mut rng, 2, 2);
        let b2 = random_basis(&mut rng, 2);
        let slot1 = spec.measurements()[0].basis().unwrap().clone();
        for beta2 in 0..2 {
            let inter = match two_time_intermediate_state(&spec, &b2, beta2) {
                Ok(i) => i,
                Err(HistoryError::ZeroPostselection) => continue,
                Err(e) => return Err(e.to_string()),
            };
            let replaced = HistorySpec::with_bases(
                spec.initial().clone(),
                spec.evolutions().to_vec(),
                vec![slot1.clone(), b2.clone()],
            )
            .unwrap();
            for beta1 in 0..2 {
                let p = replaced
                    .sequence_probability(&[beta1, beta2])
                    .map_err(|e| e.to_string())?;
                let overlap = slot1.eigenvectors()[beta1].inner(&inter.state).norm_sqr();
                let weighted = inter.normalization * overlap;
                check(
                    (p - weighted).abs() <= 1e-12,
                    format!("case {case}: p({beta1},{beta2}) = {p} vs {weighted}"),
                )?;
            }
        }
    }
    // Orthogonal postselection raises the declared error.
    let spec = HistorySpec::with_bases(
        StateVector::basis(2, 0),
        vec![Operator::identity(2), Operator::identity(2)],
        vec![z_observable(), z_observable()],
    )
    .unwrap();
    match two_time_intermediate_state(&spec, &z_observable(), 1) {
        Err(HistoryError::ZeroPostselection) => Ok(()),
        other => Err(format!("expected ZeroPostselection, got {other:?}")),
    }
}

#[test]
fn acceptance() {
    let sweep = lg_sweep();
    let (sweep45, filtered) = match &sweep {
        Ok(pair) => *pair,
        Err(_) => (0, 0),
    };
    let criteria: Vec<(&str, Result<(), String>)> = vec![
        ("1. X/Z example amplitudes", criterion_1()),
        ("2. temporal CHSH, fixed-basis mode", criterion_2()),
        ("3. temporal CHSH, per-pair mode", criterion_3()),
        (
            "4. consistent-set LG bound over random schedules",
            sweep.clone().map(|_| ()).and_then(|()| {
                if sweep45 >= 1000 && filtered > 0 {
                    Ok(())
                } else {
                    Err(format!("{filtered} consistent of {sweep45}"))
                }
            }),
        ),
        (
            "5. LG decomposition identity and vanishing last-slot terms",
            sweep.map(|_| ()),
        ),
        ("6. LG violation at theta = pi/3", criterion_6()),
        ("7. protocol equivalence and clone gate", criterion_7()),
        ("8. density reductions and entropy", criterion_8()),
        ("9. sum rules on random specs", criterion_9()),
        ("10. intermediate-state weighted Born rule", criterion_10()),
    ];
    let mut failures = Vec::new();
    for (name, result) in criteria {
        match result {
            Ok(()) => println!("PASS {name}"),
            Err(detail) => {
                println!("FAIL {name}: {detail}");
                failures.push(name);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
