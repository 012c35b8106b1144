//! Observables on history space: multitime projectors and averages,
//! single-time non-basis observables, and the two-time intermediate-state
//! construction.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{sequences, HistorySpec, HistoryVector, Measurement, ObservableSpec};
use crate::error::{HistoryError, Result};
use crate::tensor::{Operator, StateVector, STRUCT_TOL};

/// Normalizations at or below this are treated as impossible postselection.
pub const ZERO_POSTSELECTION_TOL: f64 = 1e-14;

/// A sum of weighted placement terms; each term places one operator per
/// chosen slot, with identity on the slots left out.
#[derive(Debug, Clone)]
pub struct HistoryOperator {
    slot_dims: Vec<usize>,
    terms: Vec<(Complex64, BTreeMap<usize, Operator>)>,
}

impl HistoryOperator {
    pub fn new(slot_dims: Vec<usize>) -> Self {
        Self {
            slot_dims,
            terms: Vec::new(),
        }
    }

    /// Single product term with weight 1. Slots are 1-based.
    pub fn product(slot_dims: Vec<usize>, placements: &[(usize, Operator)]) -> Result<Self> {
        let mut op = Self::new(slot_dims);
        op.add_term(Complex64::ONE, placements)?;
        Ok(op)
    }

    pub fn add_term(&mut self, weight: Complex64, placements: &[(usize, Operator)]) -> Result<()> {
        let n = self.slot_dims.len();
        let mut map = BTreeMap::new();
        for (slot, op) in placements {
            if *slot < 1 || *slot > n {
                return Err(HistoryError::SlotOutOfRange(*slot, n));
            }
            if op.dim() != self.slot_dims[slot - 1] {
                return Err(HistoryError::DimensionMismatch {
                    expected: self.slot_dims[slot - 1],
                    got: op.dim(),
                });
            }
            if map.insert(*slot, op.clone()).is_some() {
                return Err(HistoryError::DuplicateLabel(format!("t{slot}")));
            }
        }
        self.terms.push((weight, map));
        Ok(())
    }

    /// Dense matrix on the full product space (slot 1 outermost).
    pub fn dense(&self) -> Operator {
        let total: usize = self.slot_dims.iter().product();
        let mut out = Operator::zeros(total);
        for (weight, placements) in &self.terms {
            let mut term = Operator::identity(1);
            for (slot, dim) in self.slot_dims.iter().enumerate() {
                let factor = placements
                    .get(&(slot + 1))
                    .cloned()
                    .unwrap_or_else(|| Operator::identity(*dim));
                term = term.kron(&factor);
            }
            out = out.add(&term.scale(*weight));
        }
        out
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.dense().is_hermitian(tol)
    }
}

/// Rank-1 projector placements at a subset of slots (1-based).
#[derive(Debug, Clone)]
pub struct MultitimeProjector {
    placements: BTreeMap<usize, StateVector>,
}

impl MultitimeProjector {
    pub fn new(placements: Vec<(usize, StateVector)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (slot, v) in placements {
            if slot == 0 {
                return Err(HistoryError::SlotOutOfRange(0, 0));
            }
            v.check_normalized(1e-12)?;
            if map.insert(slot, v).is_some() {
                return Err(HistoryError::DuplicateLabel(format!("t{slot}")));
            }
        }
        Ok(Self { placements: map })
    }

    pub fn placements(&self) -> &BTreeMap<usize, StateVector> {
        &self.placements
    }

    fn check_against(&self, hv: &HistoryVector) -> Result<()> {
        for (slot, v) in &self.placements {
            if *slot > hv.n() {
                return Err(HistoryError::SlotOutOfRange(*slot, hv.n()));
            }
            let dim = hv.slot_bases()[slot - 1][0].dim();
            if v.dim() != dim {
                return Err(HistoryError::DimensionMismatch {
                    expected: dim,
                    got: v.dim(),
                });
            }
        }
        Ok(())
    }
}

/// Born-rule probability <Psi| P |Psi> of a multitime projector.
pub fn multitime_probability(hv: &HistoryVector, proj: &MultitimeProjector) -> Result<f64> {
    proj.check_against(hv)?;
    // <Psi|P|Psi> = |P_half Psi|^2 with P_half the same rank-1 projections;
    // computed as an overlap contraction per stored amplitude.
    let mut total = Complex64::ZERO;
    for (alpha, amp) in hv.iter() {
        for (beta, bmp) in hv.iter() {
            let mut ov = amp * bmp.conj();
            for slot in 1..=hv.n() {
                let va = &hv.slot_bases()[slot - 1][alpha[slot - 1]];
                let vb = &hv.slot_bases()[slot - 1][beta[slot - 1]];
                match proj.placements.get(&slot) {
                    // <b_slot|g><g|a_slot>
                    Some(g) => ov *= vb.inner(g) * g.inner(va),
                    None => {
                        if alpha[slot - 1] != beta[slot - 1] {
                            ov = Complex64::ZERO;
                        }
                    }
                }
                if ov == Complex64::ZERO {
                    break;
                }
            }
            total += ov;
        }
    }
    Ok(total.re)
}

/// Average of the eigenvalue product over the chosen slots (1-based):
/// sum over alpha of p(alpha) times the product of the slot eigenvalues.
pub fn multitime_average(hv: &HistoryVector, slots: &[usize]) -> Result<f64> {
    for &slot in slots {
        if slot < 1 || slot > hv.n() {
            return Err(HistoryError::SlotOutOfRange(slot, hv.n()));
        }
    }
    let mut avg = 0.0;
    for (alpha, amp) in hv.iter() {
        let mut product = 1.0;
        for &slot in slots {
            product *= hv.slot_eigenvalues()[slot - 1][alpha[slot - 1]];
        }
        avg += amp.norm_sqr() * product;
    }
    Ok(avg)
}

/// Expectation of a history observable with the imaginary part kept as a
/// numerical diagnostic.
#[derive(Debug, Clone, Copy)]
pub struct Expectation {
    pub value: f64,
    pub imaginary_residual: f64,
}

/// <Psi| op |Psi> on the dense embedding of the history vector.
pub fn history_expectation(hv: &HistoryVector, op: &HistoryOperator) -> Result<Expectation> {
    let dense_op = op.dense();
    if !dense_op.is_hermitian(STRUCT_TOL) {
        return Err(HistoryError::NotHermitian(dense_op.hermiticity_residual()));
    }
    let psi = hv.dense();
    if psi.dim() != dense_op.dim() {
        return Err(HistoryError::DimensionMismatch {
            expected: psi.dim(),
            got: dense_op.dim(),
        });
    }
    let value = psi.inner(&dense_op.apply(&psi));
    Ok(Expectation {
        value: value.re,
        imaginary_residual: value.im,
    })
}

/// Probability of outcome `beta` of the non-basis observable `b` measured at
/// slot `i` (1-based), the earlier slots being measured in the spec's own
/// bases: sum over the first i-1 outcomes of p(alpha_1..alpha_{i-1}, beta).
pub fn local_nonbasis_probability(
    spec: &HistorySpec,
    slot: usize,
    b: &ObservableSpec,
    beta: usize,
) -> Result<f64> {
    let n = spec.n();
    if slot < 1 || slot > n {
        return Err(HistoryError::SlotOutOfRange(slot, n));
    }
    if b.dim() != spec.dim() {
        return Err(HistoryError::DimensionMismatch {
            expected: spec.dim(),
            got: b.dim(),
        });
    }
    if beta >= b.dim() {
        return Err(HistoryError::OutcomeOutOfRange {
            slot,
            index: beta,
            dim: b.dim(),
        });
    }
    // Only measurements antecedent to slot i matter.
    let mut measurements: Vec<Measurement> = spec.measurements()[..slot - 1].to_vec();
    measurements.push(Measurement::Basis(b.clone()));
    let truncated = HistorySpec::new(
        spec.initial().clone(),
        spec.evolutions()[..slot].to_vec(),
        measurements,
    )?;
    let counts = truncated.outcome_counts();
    let mut total = 0.0;
    for prefix in sequences(&counts[..slot - 1]) {
        let mut alpha = prefix;
        alpha.push(beta);
        total += truncated.sequence_probability(&alpha)?;
    }
    Ok(total)
}

/// Postselected state at t1 of a two-slot spec, given the outcome `beta2`
/// of a final observable `b2`.
#[derive(Debug, Clone)]
pub struct IntermediateState {
    pub state: StateVector,
    /// N = sum over alpha_1 of p(psi, alpha_1, beta_2).
    pub normalization: f64,
}

pub fn two_time_intermediate_state(
    spec: &HistorySpec,
    b2: &ObservableSpec,
    beta2: usize,
) -> Result<IntermediateState> {
    if spec.n() != 2 {
        return Err(HistoryError::Invalid(format!(
            "intermediate state needs a two-slot spec, got n = {}",
            spec.n()
        )));
    }
    let slot1 = spec.measurements()[0]
        .basis()
        .ok_or(HistoryError::DegenerateMeasurement(1))?;
    let replaced = HistorySpec::new(
        spec.initial().clone(),
        spec.evolutions().to_vec(),
        vec![
            Measurement::Basis(slot1.clone()),
            Measurement::Basis(b2.clone()),
        ],
    )?;
    let dim = spec.dim();
    let mut unnormalized = vec![Complex64::ZERO; dim];
    let mut normalization = 0.0;
    for alpha1 in 0..dim {
        let amp = replaced.amplitude(&[alpha1, beta2])?;
        normalization += amp.norm_sqr();
        for (e, v) in unnormalized
            .iter_mut()
            .zip(slot1.eigenvectors()[alpha1].entries())
        {
            *e += amp * v;
        }
    }
    if normalization <= ZERO_POSTSELECTION_TOL {
        return Err(HistoryError::ZeroPostselection);
    }
    let state = StateVector::new(unnormalized)?.normalized()?;
    Ok(IntermediateState {
        state,
        normalization,
    })
}

/// Draws outcome sequences from the exact distribution of a history vector.
/// Demonstration output only; every reported statistic in the crate comes
/// from exact enumeration.
pub fn sample_sequences(hv: &HistoryVector, count: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table: Vec<(&Vec<usize>, f64)> = hv.iter().map(|(a, z)| (a, z.norm_sqr())).collect();
    let mut draws = Vec::with_capacity(count);
    for _ in 0..count {
        let mut x: f64 = rng.gen();
        let mut chosen = table.last().map(|(a, _)| (*a).clone()).unwrap_or_default();
        for (alpha, p) in &table {
            if x < *p {
                chosen = (*alpha).clone();
                break;
            }
            x -= p;
        }
        draws.push(chosen);
    }
    draws
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::{
        chsh_a2_observable, chsh_b2_observable, pauli_x, pauli_z, rotation_y, x_observable,
        z_observable,
    };
    use approx::assert_abs_diff_eq;

    const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn zz_spec() -> HistorySpec {
        HistorySpec::with_bases(
            StateVector::from_real(&[SQRT_HALF, SQRT_HALF]).unwrap(),
            vec![Operator::identity(2), Operator::identity(2)],
            vec![z_observable(), z_observable()],
        )
        .unwrap()
    }

    fn bell2_spec() -> HistorySpec {
        HistorySpec::with_bases(
            StateVector::from_real(&[-SQRT_HALF, SQRT_HALF]).unwrap(),
            vec![Operator::identity(2), pauli_x()],
            vec![z_observable(), z_observable()],
        )
        .unwrap()
    }

    fn random_qubit_spec(seed: u64, n: usize) -> HistorySpec {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = StateVector::new(vec![
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
        ])
        .unwrap()
        .normalized()
        .unwrap();
        let evolutions = (0..n)
            .map(|_| rotation_y(rng.gen::<f64>() * std::f64::consts::TAU))
            .collect();
        let bases = (0..n)
            .map(|_| {
                crate::qubit::rotated_z_observable("Q", rng.gen::<f64>() * std::f64::consts::TAU)
            })
            .collect();
        HistorySpec::with_bases(psi, evolutions, bases).unwrap()
    }

    #[test]
    fn multitime_probability_single_slot() {
        let hv = zz_spec().history_vector().unwrap();
        let proj = MultitimeProjector::new(vec![(1, StateVector::basis(2, 0))]).unwrap();
        assert_abs_diff_eq!(
            multitime_probability(&hv, &proj).unwrap(),
            0.5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn multitime_probability_singlet_plus_zero() {
        let hv = bell2_spec().history_vector().unwrap();
        let plus = StateVector::from_real(&[SQRT_HALF, SQRT_HALF]).unwrap();
        let proj =
            MultitimeProjector::new(vec![(1, plus), (2, StateVector::basis(2, 0))]).unwrap();
        assert_abs_diff_eq!(
            multitime_probability(&hv, &proj).unwrap(),
            0.25,
            epsilon = 1e-12
        );
    }

    #[test]
    fn multitime_probability_reproduces_sequence_probability() {
        for seed in 0..20 {
            let spec = random_qubit_spec(seed, 3);
            let hv = spec.history_vector().unwrap();
            for alpha in sequences(&spec.outcome_counts()) {
                let placements: Vec<(usize, StateVector)> = alpha
                    .iter()
                    .enumerate()
                    .map(|(i, &k)| (i + 1, hv.slot_bases()[i][k].clone()))
                    .collect();
                let proj = MultitimeProjector::new(placements).unwrap();
                let born = multitime_probability(&hv, &proj).unwrap();
                let direct = spec.sequence_probability(&alpha).unwrap();
                assert!((born - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn multitime_probability_completeness() {
        let spec = random_qubit_spec(3, 3);
        let hv = spec.history_vector().unwrap();
        // A complete set of placements at slots {1, 3} must sum to 1.
        let mut total = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                let proj = MultitimeProjector::new(vec![
                    (1, hv.slot_bases()[0][a].clone()),
                    (3, hv.slot_bases()[2][b].clone()),
                ])
                .unwrap();
                total += multitime_probability(&hv, &proj).unwrap();
            }
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn multitime_average_correlations() {
        let bell2 = bell2_spec().history_vector().unwrap();
        assert_abs_diff_eq!(multitime_average(&bell2, &[1, 2]).unwrap(), -1.0, epsilon = 1e-12);
        let zz = zz_spec().history_vector().unwrap();
        assert_abs_diff_eq!(multitime_average(&zz, &[1, 2]).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn multitime_average_precession_correlator() {
        // Z measured at three slots with rotation theta = pi/3 per step:
        // the (1,2) correlator is cos(theta) = 1/2.
        let theta = std::f64::consts::FRAC_PI_3;
        let spec = HistorySpec::with_bases(
            StateVector::basis(2, 0),
            vec![rotation_y(theta); 3],
            vec![z_observable(); 3],
        )
        .unwrap();
        let hv = spec.history_vector().unwrap();
        assert_abs_diff_eq!(multitime_average(&hv, &[1, 2]).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn multitime_average_matches_diagonal_history_expectation() {
        // Two independent code paths: eigenvalue-product enumeration vs the
        // dense quadratic form with the diagonal observable placed.
        for seed in 0..10 {
            let spec = random_qubit_spec(seed, 3);
            let hv = spec.history_vector().unwrap();
            let ops: Vec<(usize, Operator)> = (1..=3)
                .map(|slot| {
                    let mut m = Operator::zeros(2);
                    for (lambda, v) in hv.slot_eigenvalues()[slot - 1]
                        .iter()
                        .zip(&hv.slot_bases()[slot - 1])
                    {
                        m = m.add(&v.outer(v).scale(Complex64::new(*lambda, 0.0)));
                    }
                    (slot, m)
                })
                .collect();
            let op = HistoryOperator::product(vec![2, 2, 2], &ops).unwrap();
            let via_expectation = history_expectation(&hv, &op).unwrap().value;
            let via_enumeration = multitime_average(&hv, &[1, 2, 3]).unwrap();
            assert!((via_expectation - via_enumeration).abs() < 1e-12);
        }
    }

    #[test]
    fn history_expectation_chsh_values() {
        let hv = bell2_spec().history_vector().unwrap();
        let a2 = chsh_a2_observable().operator();
        let b2 = chsh_b2_observable().operator();
        let xa2 = HistoryOperator::product(vec![2, 2], &[(1, pauli_x()), (2, a2)]).unwrap();
        let zb2 = HistoryOperator::product(vec![2, 2], &[(1, pauli_z()), (2, b2)]).unwrap();
        assert_abs_diff_eq!(
            history_expectation(&hv, &xa2).unwrap().value,
            SQRT_HALF,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            history_expectation(&hv, &zb2).unwrap().value,
            -SQRT_HALF,
            epsilon = 1e-12
        );
    }

    #[test]
    fn history_expectation_identity_is_one() {
        let hv = bell2_spec().history_vector().unwrap();
        let id = HistoryOperator::product(vec![2, 2], &[]).unwrap();
        assert_abs_diff_eq!(history_expectation(&hv, &id).unwrap().value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn history_expectation_rejects_non_hermitian() {
        let hv = zz_spec().history_vector().unwrap();
        let bad = Operator::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let op = HistoryOperator::product(vec![2, 2], &[(1, bad)]).unwrap();
        assert!(history_expectation(&hv, &op).is_err());
    }

    #[test]
    fn local_nonbasis_probability_first_slot() {
        // i = 1 reduces to |<beta| U1 |psi>|^2.
        let spec = random_qubit_spec(7, 3);
        let b = x_observable();
        for beta in 0..2 {
            let p = local_nonbasis_probability(&spec, 1, &b, beta).unwrap();
            let evolved = spec.evolutions()[0].apply(spec.initial());
            let direct = b.eigenvectors()[beta].inner(&evolved).norm_sqr();
            assert!((p - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn local_nonbasis_probability_after_z_measurement() {
        // psi = |+>, Z at t1, then X = +1 at t2: both Z branches contribute
        // 1/2 * 1/2, totalling 1/2.
        let spec = zz_spec();
        let p = local_nonbasis_probability(&spec, 2, &x_observable(), 0).unwrap();
        assert_abs_diff_eq!(p, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn local_nonbasis_probability_is_complete() {
        for seed in 0..20 {
            let spec = random_qubit_spec(seed, 3);
            let b = crate::qubit::rotated_z_observable("B", 0.3 + seed as f64);
            for slot in 1..=3 {
                let total: f64 = (0..2)
                    .map(|beta| local_nonbasis_probability(&spec, slot, &b, beta).unwrap())
                    .sum();
                assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn local_nonbasis_probability_matches_born_rule_on_history_vector() {
        // The Born form <Psi| P_beta |Psi> matches the operational sum when
        // the projector sits at the final measured slot of the history
        // vector whose last observable is b itself (for earlier slots the
        // full vector keeps the slot's own device active, which decoheres
        // the slot and changes the statistics).
        for seed in 0..20 {
            let spec = random_qubit_spec(seed, 3);
            let b = crate::qubit::rotated_z_observable("B", 1.1 * (seed as f64 + 1.0));
            for slot in 1..=3 {
                let mut measurements = spec.measurements()[..slot - 1].to_vec();
                measurements.push(Measurement::Basis(b.clone()));
                let truncated = HistorySpec::new(
                    spec.initial().clone(),
                    spec.evolutions()[..slot].to_vec(),
                    measurements,
                )
                .unwrap();
                let hv = truncated.history_vector().unwrap();
                for beta in 0..2 {
                    let operational =
                        local_nonbasis_probability(&spec, slot, &b, beta).unwrap();
                    let proj = MultitimeProjector::new(vec![(
                        slot,
                        b.eigenvectors()[beta].clone(),
                    )])
                    .unwrap();
                    let born = multitime_probability(&hv, &proj).unwrap();
                    assert!(
                        (operational - born).abs() < 1e-12,
                        "slot {slot} beta {beta}: {operational} vs {born}"
                    );
                }
            }
        }
    }

    #[test]
    fn local_basis_probability_reproduces_marginal() {
        // With b equal to the slot's own observable the result is the plain
        // marginal over the other slots.
        for seed in 0..10 {
            let spec = random_qubit_spec(seed, 3);
            let hv = spec.history_vector().unwrap();
            for slot in 1..=3 {
                let own = spec.measurements()[slot - 1].basis().unwrap().clone();
                for beta in 0..2 {
                    let p = local_nonbasis_probability(&spec, slot, &own, beta).unwrap();
                    let marginal: f64 = hv
                        .iter()
                        .filter(|(alpha, _)| alpha[slot - 1] == beta)
                        .map(|(_, a)| a.norm_sqr())
                        .sum();
                    assert!((p - marginal).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn intermediate_state_of_bell2_spec() {
        let spec = bell2_spec();
        let inter = two_time_intermediate_state(&spec, &z_observable(), 0).unwrap();
        assert_abs_diff_eq!(inter.normalization, 0.5, epsilon = 1e-12);
        // psi_1 = |1> up to phase.
        assert_abs_diff_eq!(inter.state.entries()[1].norm(), 1.0, epsilon = 1e-12);
        assert!(inter.state.entries()[0].norm() < 1e-12);
    }

    #[test]
    fn intermediate_state_zero_postselection_errors() {
        // U2 = I keeps psi in the Z basis plane; postselect on an outcome
        // orthogonal to everything reachable.
        let spec = HistorySpec::with_bases(
            StateVector::basis(2, 0),
            vec![Operator::identity(2), Operator::identity(2)],
            vec![z_observable(), z_observable()],
        )
        .unwrap();
        // After a Z measurement of |0> the state is |0>; outcome |1> of Z at
        // t2 is unreachable.
        assert!(matches!(
            two_time_intermediate_state(&spec, &z_observable(), 1),
            Err(HistoryError::ZeroPostselection)
        ));
    }

    #[test]
    fn intermediate_state_weighted_born_identity() {
        // p(beta_1, beta_2) = N <psi_1| P_beta1 |psi_1>, both sides computed
        // independently.
        for seed in 0..30 {
            let spec = random_qubit_spec(seed, 2);
            let hv = spec.history_vector().unwrap();
            let b1 = crate::qubit::rotated_z_observable("B1", 0.7 * (seed as f64 + 1.0));
            let b2 = crate::qubit::rotated_z_observable("B2", 1.3 * (seed as f64 + 1.0));
            for beta2 in 0..2 {
                let inter = match two_time_intermediate_state(&spec, &b2, beta2) {
                    Ok(i) => i,
                    Err(HistoryError::ZeroPostselection) => continue,
                    Err(e) => panic!("{e}"),
                };
                for beta1 in 0..2 {
                    let proj = MultitimeProjector::new(vec![
                        (1, b1.eigenvectors()[beta1].clone()),
                        (2, b2.eigenvectors()[beta2].clone()),
                    ])
                    .unwrap();
                    let born = multitime_probability(&hv, &proj).unwrap();
                    let overlap =
                        b1.eigenvectors()[beta1].inner(&inter.state).norm_sqr();
                    let weighted = inter.normalization * overlap;
                    assert!(
                        (born - weighted).abs() < 1e-12,
                        "seed {seed}: {born} vs {weighted}"
                    );
                }
            }
        }
    }

    #[test]
    fn intermediate_state_abl_probabilities_sum_to_one() {
        for seed in 0..20 {
            let spec = random_qubit_spec(seed, 2);
            let b2 = crate::qubit::rotated_z_observable("B2", 0.9 * (seed as f64 + 1.0));
            let Ok(inter) = two_time_intermediate_state(&spec, &b2, 0) else {
                continue;
            };
            let slot1 = spec.measurements()[0].basis().unwrap();
            let replaced = HistorySpec::with_bases(
                spec.initial().clone(),
                spec.evolutions().to_vec(),
                vec![slot1.clone(), b2.clone()],
            )
            .unwrap();
            let mut total = 0.0;
            for alpha1 in 0..2 {
                let p = replaced.amplitude(&[alpha1, 0]).unwrap().norm_sqr()
                    / inter.normalization;
                assert!(p >= -1e-15);
                total += p;
            }
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let hv = zz_spec().history_vector().unwrap();
        let a = sample_sequences(&hv, 50, 42);
        let b = sample_sequences(&hv, 50, 42);
        assert_eq!(a, b);
        for draw in &a {
            assert!(draw == &vec![0, 0] || draw == &vec![1, 1]);
        }
    }
}
