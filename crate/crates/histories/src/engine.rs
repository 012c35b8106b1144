//! Chain operators, history amplitudes, sequence probabilities, decoherence
//! functionals and the history vector.
//!
//! A [`HistorySpec`] fixes the initial state, the unitary evolution between
//! consecutive measurement times and the observable measured at each time.
//! From it every quantity of the formalism follows: the amplitude of an
//! outcome sequence, its probability, the decoherence functional between two
//! sequences, and the normalized superposition of all histories (the
//! [`HistoryVector`]).

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{HistoryError, Result};
use crate::tensor::{LabeledSpace, Operator, StateVector, STRUCT_TOL};

/// Default cap on the number of enumerated outcome sequences.
pub const DEFAULT_CAP: usize = 1 << 20;

/// Amplitudes at or below this magnitude do not count as history content.
pub const PRUNE_TOL: f64 = 1e-12;

/// A complete orthonormal eigenbasis with real eigenvalue labels for one
/// time slot. Outcomes are referenced by 0-based index, never by eigenvalue
/// equality, so duplicate eigenvalues stay distinct.
#[derive(Debug, Clone)]
pub struct ObservableSpec {
    name: String,
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<StateVector>,
}

impl ObservableSpec {
    pub fn new(
        name: impl Into<String>,
        eigenvalues: Vec<f64>,
        eigenvectors: Vec<StateVector>,
    ) -> Result<Self> {
        let name = name.into();
        if eigenvectors.is_empty() || eigenvalues.len() != eigenvectors.len() {
            return Err(HistoryError::Invalid(format!(
                "observable '{name}': {} eigenvalues but {} eigenvectors",
                eigenvalues.len(),
                eigenvectors.len()
            )));
        }
        let dim = eigenvectors[0].dim();
        if eigenvectors.len() != dim {
            return Err(HistoryError::Invalid(format!(
                "observable '{name}': {} eigenvectors do not form a complete basis in dimension {dim}",
                eigenvectors.len()
            )));
        }
        let mut max_residual = 0.0f64;
        for (i, vi) in eigenvectors.iter().enumerate() {
            if vi.dim() != dim {
                return Err(HistoryError::DimensionMismatch {
                    expected: dim,
                    got: vi.dim(),
                });
            }
            for (j, vj) in eigenvectors.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                max_residual = max_residual.max((vi.inner(vj).norm() - expected).abs());
            }
        }
        if max_residual > STRUCT_TOL {
            return Err(HistoryError::NotOrthonormal(max_residual));
        }
        if eigenvalues.iter().any(|x| !x.is_finite()) {
            return Err(HistoryError::Invalid(format!(
                "observable '{name}': non-finite eigenvalue"
            )));
        }
        Ok(Self {
            name,
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.eigenvectors[0].dim()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[StateVector] {
        &self.eigenvectors
    }

    /// Rank-1 projector onto outcome `k`.
    pub fn projector(&self, k: usize) -> Operator {
        self.eigenvectors[k].outer(&self.eigenvectors[k])
    }

    /// The Hermitian operator with this eigensystem.
    pub fn operator(&self) -> Operator {
        let mut m = Operator::zeros(self.dim());
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            m = m.add(&v.outer(v).scale(Complex64::new(*lambda, 0.0)));
        }
        m
    }

    /// Joint observable on a composite system, outcome index `a * other.dim() + b`.
    pub fn joint_with(&self, other: &ObservableSpec) -> Result<ObservableSpec> {
        let mut eigenvalues = Vec::new();
        let mut eigenvectors = Vec::new();
        for (la, va) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            for (lb, vb) in other.eigenvalues.iter().zip(&other.eigenvectors) {
                eigenvalues.push(la * lb);
                eigenvectors.push(va.kron(vb));
            }
        }
        ObservableSpec::new(
            format!("{}(x){}", self.name, other.name),
            eigenvalues,
            eigenvectors,
        )
    }

    /// True iff the eigenvalues are exactly {+1, -1} (in any order).
    pub fn is_dichotomic(&self) -> bool {
        self.eigenvalues.len() == 2
            && self.eigenvalues.contains(&1.0)
            && self.eigenvalues.contains(&-1.0)
    }
}

/// A complete set of mutually orthogonal Hermitian projectors, possibly of
/// rank > 1, for chain-operator work with degenerate outcomes.
#[derive(Debug, Clone)]
pub struct ProjectorSet {
    dim: usize,
    projectors: Vec<Operator>,
}

impl ProjectorSet {
    pub fn new(projectors: Vec<Operator>) -> Result<Self> {
        if projectors.is_empty() {
            return Err(HistoryError::Invalid("empty projector set".into()));
        }
        let dim = projectors[0].dim();
        let mut max_residual = 0.0f64;
        let mut sum = Operator::zeros(dim);
        for (i, p) in projectors.iter().enumerate() {
            if p.dim() != dim {
                return Err(HistoryError::DimensionMismatch {
                    expected: dim,
                    got: p.dim(),
                });
            }
            max_residual = max_residual.max(p.hermiticity_residual());
            for (j, q) in projectors.iter().enumerate() {
                let prod = p.matmul(q);
                let expected = if i == j { p.clone() } else { Operator::zeros(dim) };
                max_residual = max_residual.max(prod.max_abs_diff(&expected));
            }
            sum = sum.add(p);
        }
        max_residual = max_residual.max(sum.max_abs_diff(&Operator::identity(dim)));
        if max_residual > STRUCT_TOL {
            return Err(HistoryError::BadProjectorSet(max_residual));
        }
        Ok(Self { dim, projectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn projectors(&self) -> &[Operator] {
        &self.projectors
    }
}

/// What gets measured at one time slot.
#[derive(Debug, Clone)]
pub enum Measurement {
    /// A complete set of commuting observables, i.e. a rank-1 eigenbasis.
    Basis(ObservableSpec),
    /// A general (possibly degenerate) complete projector set.
    Projectors(ProjectorSet),
}

impl Measurement {
    pub fn dim(&self) -> usize {
        match self {
            Measurement::Basis(b) => b.dim(),
            Measurement::Projectors(p) => p.dim(),
        }
    }

    pub fn outcome_count(&self) -> usize {
        match self {
            Measurement::Basis(b) => b.dim(),
            Measurement::Projectors(p) => p.projectors().len(),
        }
    }

    pub fn projector(&self, k: usize) -> Operator {
        match self {
            Measurement::Basis(b) => b.projector(k),
            Measurement::Projectors(p) => p.projectors()[k].clone(),
        }
    }

    pub fn basis(&self) -> Option<&ObservableSpec> {
        match self {
            Measurement::Basis(b) => Some(b),
            Measurement::Projectors(_) => None,
        }
    }
}

/// Initial state, unitary schedule and one measurement per time slot.
#[derive(Debug, Clone)]
pub struct HistorySpec {
    initial: StateVector,
    evolutions: Vec<Operator>,
    measurements: Vec<Measurement>,
}

impl HistorySpec {
    pub fn new(
        initial: StateVector,
        evolutions: Vec<Operator>,
        measurements: Vec<Measurement>,
    ) -> Result<Self> {
        initial.check_normalized(1e-12)?;
        if evolutions.len() != measurements.len() {
            return Err(HistoryError::LengthMismatch {
                evolutions: evolutions.len(),
                measurements: measurements.len(),
            });
        }
        if evolutions.is_empty() {
            return Err(HistoryError::Invalid("spec has no time slots".into()));
        }
        let dim = initial.dim();
        for u in &evolutions {
            if u.dim() != dim {
                return Err(HistoryError::DimensionMismatch {
                    expected: dim,
                    got: u.dim(),
                });
            }
            u.check_unitary(STRUCT_TOL)?;
        }
        for m in &measurements {
            if m.dim() != dim {
                return Err(HistoryError::DimensionMismatch {
                    expected: dim,
                    got: m.dim(),
                });
            }
        }
        Ok(Self {
            initial,
            evolutions,
            measurements,
        })
    }

    /// Spec with rank-1 measurements given as observables.
    pub fn with_bases(
        initial: StateVector,
        evolutions: Vec<Operator>,
        bases: Vec<ObservableSpec>,
    ) -> Result<Self> {
        Self::new(
            initial,
            evolutions,
            bases.into_iter().map(Measurement::Basis).collect(),
        )
    }

    pub fn initial(&self) -> &StateVector {
        &self.initial
    }

    pub fn dim(&self) -> usize {
        self.initial.dim()
    }

    /// Number of measured times.
    pub fn n(&self) -> usize {
        self.measurements.len()
    }

    pub fn evolutions(&self) -> &[Operator] {
        &self.evolutions
    }

    pub fn measurements(&self) -> &[Measurement] {
        &self.measurements
    }

    /// Outcome count per slot.
    pub fn outcome_counts(&self) -> Vec<usize> {
        self.measurements.iter().map(|m| m.outcome_count()).collect()
    }

    fn check_alpha(&self, alpha: &[usize]) -> Result<()> {
        if alpha.len() != self.n() {
            return Err(HistoryError::DimensionMismatch {
                expected: self.n(),
                got: alpha.len(),
            });
        }
        for (i, (&k, m)) in alpha.iter().zip(&self.measurements).enumerate() {
            if k >= m.outcome_count() {
                return Err(HistoryError::OutcomeOutOfRange {
                    slot: i + 1,
                    index: k,
                    dim: m.outcome_count(),
                });
            }
        }
        Ok(())
    }

    /// All slot bases, failing on the first degenerate measurement.
    fn bases(&self) -> Result<Vec<&ObservableSpec>> {
        self.measurements
            .iter()
            .enumerate()
            .map(|(i, m)| m.basis().ok_or(HistoryError::DegenerateMeasurement(i + 1)))
            .collect()
    }

    fn check_cap(&self, cap: usize) -> Result<usize> {
        let mut total = 1usize;
        for c in self.outcome_counts() {
            total = total
                .checked_mul(c)
                .ok_or(HistoryError::EnumerationCap { total: usize::MAX, cap })?;
        }
        if total > cap {
            return Err(HistoryError::EnumerationCap { total, cap });
        }
        Ok(total)
    }

    /// Chain operator C = P_{a_n} U(t_n,t_{n-1}) ... P_{a_1} U(t_1,t_0) P_psi.
    pub fn chain_operator(&self, alpha: &[usize]) -> Result<Operator> {
        self.check_alpha(alpha)?;
        let mut c = self.initial.outer(&self.initial);
        for ((u, m), &k) in self.evolutions.iter().zip(&self.measurements).zip(alpha) {
            c = m.projector(k).matmul(&u.matmul(&c));
        }
        Ok(c)
    }

    /// History amplitude A(psi, alpha) by the direct alternating-product
    /// formula. Requires rank-1 measurements.
    pub fn amplitude(&self, alpha: &[usize]) -> Result<Complex64> {
        self.check_alpha(alpha)?;
        let bases = self.bases()?;
        let mut amp = Complex64::ONE;
        let mut state = self.initial.clone();
        let n = self.n();
        for (i, (u, basis)) in self.evolutions.iter().zip(&bases).enumerate() {
            let evolved = u.apply(&state);
            let k = alpha[i];
            amp *= basis.eigenvectors()[k].inner(&evolved);
            if i + 1 < n {
                state = basis.eigenvectors()[k].clone();
            }
        }
        Ok(amp)
    }

    /// p(alpha): |A|^2 for rank-1 measurements, Tr(C C^dagger) in general.
    /// The two routes agree within arithmetic tolerance when both exist.
    pub fn sequence_probability(&self, alpha: &[usize]) -> Result<f64> {
        match self.amplitude(alpha) {
            Ok(a) => Ok(a.norm_sqr()),
            Err(HistoryError::DegenerateMeasurement(_)) => {
                let c = self.chain_operator(alpha)?;
                Ok(c.matmul(&c.adjoint()).trace().re)
            }
            Err(e) => Err(e),
        }
    }

    /// Decoherence functional D(alpha, beta) = Tr(C_alpha C_beta^dagger).
    pub fn decoherence_functional(&self, alpha: &[usize], beta: &[usize]) -> Result<Complex64> {
        let ca = self.chain_operator(alpha)?;
        let cb = self.chain_operator(beta)?;
        Ok(ca.matmul(&cb.adjoint()).trace())
    }

    /// Checks the decoherence condition |2 Re D(alpha, beta)| <= tol for
    /// every pair of distinct sequences.
    pub fn is_consistent_set(&self, tol: f64) -> Result<ConsistencyReport> {
        self.is_consistent_set_with_cap(tol, DEFAULT_CAP)
    }

    pub fn is_consistent_set_with_cap(&self, tol: f64, cap: usize) -> Result<ConsistencyReport> {
        self.check_cap(cap)?;
        let counts = self.outcome_counts();
        let all: Vec<Vec<usize>> = sequences(&counts).collect();
        // Chain operators are reused across the O(N^2) pair loop.
        let chains: Vec<Operator> = all
            .iter()
            .map(|a| self.chain_operator(a))
            .collect::<Result<_>>()?;
        let mut max_residual = 0.0f64;
        let mut witness = None;
        for i in 0..all.len() {
            for j in (i + 1)..all.len() {
                let d = chains[i].matmul(&chains[j].adjoint()).trace();
                let interference = (2.0 * d.re).abs();
                if interference > max_residual {
                    max_residual = interference;
                    if interference > tol {
                        witness = Some((all[i].clone(), all[j].clone()));
                    }
                }
            }
        }
        Ok(ConsistencyReport {
            consistent: max_residual <= tol,
            max_interference: max_residual,
            witness,
        })
    }

    /// Builds the history vector, the normalized superposition of all
    /// outcome sequences weighted by their amplitudes.
    ///
    /// Amplitudes are propagated along the outcome tree rather than
    /// recomputed per sequence, so this is an independent code path from
    /// [`HistorySpec::amplitude`].
    pub fn history_vector(&self) -> Result<HistoryVector> {
        self.history_vector_with_cap(DEFAULT_CAP)
    }

    pub fn history_vector_with_cap(&self, cap: usize) -> Result<HistoryVector> {
        self.check_cap(cap)?;
        let bases = self.bases()?;
        let mut amplitudes = BTreeMap::new();
        let mut prefix = Vec::with_capacity(self.n());
        self.walk_amplitudes(
            0,
            &self.initial,
            Complex64::ONE,
            &bases,
            &mut prefix,
            &mut amplitudes,
        );
        let hv = HistoryVector {
            outcome_dims: self.outcome_counts(),
            slot_eigenvalues: bases.iter().map(|b| b.eigenvalues().to_vec()).collect(),
            slot_bases: bases
                .iter()
                .map(|b| b.eigenvectors().to_vec())
                .collect(),
            composite: None,
            amplitudes,
        };
        let norm = hv.norm();
        if (norm - 1.0).abs() > STRUCT_TOL {
            return Err(HistoryError::NotNormalized(norm));
        }
        Ok(hv)
    }

    fn walk_amplitudes(
        &self,
        slot: usize,
        state: &StateVector,
        coeff: Complex64,
        bases: &[&ObservableSpec],
        prefix: &mut Vec<usize>,
        out: &mut BTreeMap<Vec<usize>, Complex64>,
    ) {
        let evolved = self.evolutions[slot].apply(state);
        for (k, eigvec) in bases[slot].eigenvectors().iter().enumerate() {
            let amp = coeff * eigvec.inner(&evolved);
            if amp.norm() == 0.0 {
                continue;
            }
            prefix.push(k);
            if slot + 1 == self.n() {
                out.insert(prefix.clone(), amp);
            } else {
                self.walk_amplitudes(slot + 1, eigvec, amp, bases, prefix, out);
            }
            prefix.pop();
        }
    }

    /// Spec restricted to the kept slots (1-based, ascending). Dropped slots
    /// are unmeasured: their unitaries are composed into the evolution of
    /// the next kept slot, with no projector inserted.
    pub fn reduce_schedule(&self, keep: &[usize]) -> Result<HistorySpec> {
        if keep.is_empty() {
            return Err(HistoryError::EmptyKeep);
        }
        let n = self.n();
        for w in keep.windows(2) {
            if w[0] >= w[1] {
                return Err(HistoryError::Invalid(
                    "kept slots must be strictly ascending".into(),
                ));
            }
        }
        if keep[0] < 1 || *keep.last().unwrap() > n {
            return Err(HistoryError::SlotOutOfRange(*keep.last().unwrap(), n));
        }
        let mut evolutions = Vec::with_capacity(keep.len());
        let mut measurements = Vec::with_capacity(keep.len());
        let mut prev = 0usize;
        for &slot in keep {
            let mut u = Operator::identity(self.dim());
            // U(t_slot, t_prev) = U_slot ... U_{prev+1}
            for i in prev..slot {
                u = self.evolutions[i].matmul(&u);
            }
            evolutions.push(u);
            measurements.push(self.measurements[slot - 1].clone());
            prev = slot;
        }
        HistorySpec::new(self.initial.clone(), evolutions, measurements)
    }

    /// Verifies the amplitude and probability sum rules against shorter
    /// specs obtained by composing unitaries across a deleted slot.
    ///
    /// The amplitude rule holds for every deletable slot i < n (summing the
    /// last slot leaves a dangling evolution, so only the probability rule
    /// applies there). Intermediate-slot probability residuals are
    /// generally nonzero and reported as diagnostics.
    pub fn marginal_checks(&self) -> Result<MarginalReport> {
        self.marginal_checks_with_cap(DEFAULT_CAP)
    }

    pub fn marginal_checks_with_cap(&self, cap: usize) -> Result<MarginalReport> {
        self.check_cap(cap)?;
        self.bases()?;
        let n = self.n();
        let counts = self.outcome_counts();
        let mut amplitude_residuals = Vec::new();
        let mut intermediate_probability_residuals = Vec::new();
        let mut last_slot_probability_residual = 0.0f64;

        for deleted in 1..=n {
            if n == 1 {
                break;
            }
            let keep: Vec<usize> = (1..=n).filter(|&s| s != deleted).collect();
            let reduced = self.reduce_schedule(&keep)?;
            let reduced_counts = reduced.outcome_counts();
            let mut amp_residual = 0.0f64;
            let mut prob_residual = 0.0f64;
            for beta in sequences(&reduced_counts) {
                let mut amp_sum = Complex64::ZERO;
                let mut prob_sum = 0.0f64;
                for k in 0..counts[deleted - 1] {
                    let mut full = beta.clone();
                    full.insert(deleted - 1, k);
                    let a = self.amplitude(&full)?;
                    amp_sum += a;
                    prob_sum += a.norm_sqr();
                }
                let short_amp = reduced.amplitude(&beta)?;
                amp_residual = amp_residual.max((amp_sum - short_amp).norm());
                prob_residual = prob_residual.max((prob_sum - short_amp.norm_sqr()).abs());
            }
            if deleted < n {
                amplitude_residuals.push(amp_residual);
                intermediate_probability_residuals.push(prob_residual);
            } else {
                last_slot_probability_residual = prob_residual;
            }
        }

        let total_probability: f64 = sequences(&counts)
            .map(|a| self.amplitude(&a).map(|z| z.norm_sqr()))
            .sum::<Result<f64>>()?;

        Ok(MarginalReport {
            amplitude_residuals,
            last_slot_probability_residual,
            intermediate_probability_residuals,
            total_probability,
        })
    }
}

/// Verdict of the decoherence-condition scan.
#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    pub consistent: bool,
    /// Largest |2 Re D(alpha, beta)| over distinct pairs.
    pub max_interference: f64,
    /// A violating pair, present iff `consistent` is false.
    pub witness: Option<(Vec<usize>, Vec<usize>)>,
}

/// Sum-rule residuals of a spec.
#[derive(Debug, Clone)]
pub struct MarginalReport {
    /// Amplitude sum-rule residual for each deletable slot 1..n-1.
    pub amplitude_residuals: Vec<f64>,
    /// Probability sum-rule residual when the last slot is summed out.
    pub last_slot_probability_residual: f64,
    /// Probability residuals for intermediate slots; nonzero in general,
    /// reported for diagnostics only.
    pub intermediate_probability_residuals: Vec<f64>,
    /// Sum of all sequence probabilities, expected 1.
    pub total_probability: f64,
}

/// The normalized superposition of all histories of a spec, stored sparsely
/// and keyed by outcome tuple in lexicographic order.
#[derive(Debug, Clone)]
pub struct HistoryVector {
    outcome_dims: Vec<usize>,
    slot_eigenvalues: Vec<Vec<f64>>,
    slot_bases: Vec<Vec<StateVector>>,
    /// Set when built from a composite A/B spec: (dim_a, dim_b) per slot,
    /// outcome index a * dim_b + b.
    composite: Option<(usize, usize)>,
    amplitudes: BTreeMap<Vec<usize>, Complex64>,
}

impl HistoryVector {
    #[cfg(test)]
    pub(crate) fn from_parts(
        outcome_dims: Vec<usize>,
        slot_eigenvalues: Vec<Vec<f64>>,
        slot_bases: Vec<Vec<StateVector>>,
        composite: Option<(usize, usize)>,
        amplitudes: BTreeMap<Vec<usize>, Complex64>,
    ) -> Self {
        Self {
            outcome_dims,
            slot_eigenvalues,
            slot_bases,
            composite,
            amplitudes,
        }
    }

    pub fn n(&self) -> usize {
        self.outcome_dims.len()
    }

    pub fn outcome_dims(&self) -> &[usize] {
        &self.outcome_dims
    }

    pub fn slot_eigenvalues(&self) -> &[Vec<f64>] {
        &self.slot_eigenvalues
    }

    pub fn slot_bases(&self) -> &[Vec<StateVector>] {
        &self.slot_bases
    }

    pub fn composite_dims(&self) -> Option<(usize, usize)> {
        self.composite
    }

    pub(crate) fn set_composite(&mut self, dims: (usize, usize)) {
        self.composite = Some(dims);
    }

    /// Amplitude of one outcome sequence (implicit zeros included).
    pub fn amplitude(&self, alpha: &[usize]) -> Complex64 {
        self.amplitudes
            .get(alpha)
            .copied()
            .unwrap_or(Complex64::ZERO)
    }

    pub fn probability(&self, alpha: &[usize]) -> f64 {
        self.amplitude(alpha).norm_sqr()
    }

    /// Stored (nonzero) amplitudes in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (&Vec<usize>, &Complex64)> {
        self.amplitudes.iter()
    }

    /// Histories with |amplitude| above the prune tolerance.
    pub fn content(&self) -> Vec<(&Vec<usize>, &Complex64)> {
        self.amplitudes
            .iter()
            .filter(|(_, a)| a.norm() > PRUNE_TOL)
            .collect()
    }

    /// All outcome sequences of the underlying slot structure, including
    /// those with zero amplitude.
    pub fn all_sequences(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        sequences(&self.outcome_dims)
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .values()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// The dense embedding: sum of amplitudes times the Kronecker products
    /// of the slot eigenvectors, in the computational representation.
    pub fn dense(&self) -> StateVector {
        let total: usize = self.slot_bases.iter().map(|b| b[0].dim()).product();
        let mut entries = vec![Complex64::ZERO; total];
        for (alpha, amp) in &self.amplitudes {
            let mut ket = self.slot_bases[0][alpha[0]].clone();
            for (slot, &k) in alpha.iter().enumerate().skip(1) {
                ket = ket.kron(&self.slot_bases[slot][k]);
            }
            for (e, k) in entries.iter_mut().zip(ket.entries()) {
                *e += amp * k;
            }
        }
        StateVector::new(entries).expect("dense embedding is finite")
    }

    /// Labeled axes of the dense embedding: one axis per slot, or A/B axes
    /// per slot for composite history vectors.
    pub fn labeled_space(&self) -> LabeledSpace {
        use crate::tensor::{AxisLabel, Factor};
        let axes = match self.composite {
            None => self
                .slot_bases
                .iter()
                .enumerate()
                .map(|(i, b)| (AxisLabel::slot(i + 1), b[0].dim()))
                .collect(),
            Some((da, db)) => (1..=self.n())
                .flat_map(|i| {
                    [
                        (AxisLabel::slot_factor(i, Factor::A), da),
                        (AxisLabel::slot_factor(i, Factor::B), db),
                    ]
                })
                .collect(),
        };
        LabeledSpace::new(axes).expect("slot labels are unique")
    }
}

/// Lexicographic enumeration of outcome sequences with the given per-slot
/// counts.
pub fn sequences(dims: &[usize]) -> SequenceIter {
    SequenceIter {
        dims: dims.to_vec(),
        next: if dims.contains(&0) {
            None
        } else {
            Some(vec![0; dims.len()])
        },
    }
}

pub struct SequenceIter {
    dims: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Iterator for SequenceIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for k in (0..self.dims.len()).rev() {
            succ[k] += 1;
            if succ[k] < self.dims[k] {
                self.next = Some(succ);
                break;
            }
            succ[k] = 0;
        }
        Some(current)
    }
}
