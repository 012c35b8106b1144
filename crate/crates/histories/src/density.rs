//! History density matrices, space and time reduction, von Neumann entropy
//! and product-vs-entangled classification of history states.
//!
//! Space and time correlations are treated symmetrically: both reductions
//! are partial traces of the same density matrix, distinguished only by
//! which labeled axes get traced.

use num_complex::Complex64;

use crate::engine::{sequences, HistorySpec, HistoryVector, ObservableSpec};
use crate::error::{HistoryError, Result};
use crate::observables::MultitimeProjector;
use crate::tensor::{partial_trace, AxisLabel, Factor, LabeledSpace, Operator, StateVector};

/// Eigenvalues of a density matrix may undershoot zero by at most this much.
pub const PSD_TOL: f64 = 1e-9;

/// Logarithm base for entropies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogBase {
    Natural,
    Two,
}

/// A Hermitian, positive, unit-trace operator on a labeled product of
/// time-slot spaces (optionally with A/B factors per slot).
#[derive(Debug, Clone)]
pub struct HistoryDensityMatrix {
    space: LabeledSpace,
    matrix: Operator,
}

impl HistoryDensityMatrix {
    pub fn new(space: LabeledSpace, matrix: Operator) -> Result<Self> {
        if matrix.dim() != space.total_dim() {
            return Err(HistoryError::DimensionMismatch {
                expected: space.total_dim(),
                got: matrix.dim(),
            });
        }
        let herm = matrix.hermiticity_residual();
        if herm > 1e-10 {
            return Err(HistoryError::NotHermitian(herm));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > 1e-10 || trace.im.abs() > 1e-10 {
            return Err(HistoryError::Invalid(format!(
                "density matrix trace is {trace}, expected 1"
            )));
        }
        let (eigenvalues, _) = matrix.hermitian_eig(1e-10)?;
        if eigenvalues[0] < -PSD_TOL {
            return Err(HistoryError::NotPositive(eigenvalues[0]));
        }
        Ok(Self { space, matrix })
    }

    pub fn space(&self) -> &LabeledSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    /// Tr(rho^2); 1 for pure states.
    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).trace().re
    }

    /// Slots covered by the space, ascending, with their total dimension.
    pub fn slot_dims(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for (label, dim) in self.space.axes() {
            match out.last_mut() {
                Some((slot, total)) if *slot == label.slot => *total *= dim,
                _ => out.push((label.slot, *dim)),
            }
        }
        out
    }
}

/// Weighted ensemble of history vectors on a shared slot structure.
#[derive(Debug, Clone)]
pub struct HistoryEnsemble {
    members: Vec<(f64, HistoryVector)>,
}

impl HistoryEnsemble {
    pub fn new(members: Vec<(f64, HistoryVector)>) -> Result<Self> {
        if members.is_empty() {
            return Err(HistoryError::EmptyEnsemble);
        }
        let weight_sum: f64 = members.iter().map(|(p, _)| p).sum();
        if members.iter().any(|(p, _)| *p < 0.0) || (weight_sum - 1.0).abs() > 1e-12 {
            return Err(HistoryError::BadWeights(weight_sum));
        }
        let space = members[0].1.labeled_space();
        for (_, hv) in &members[1..] {
            if hv.labeled_space() != space {
                return Err(HistoryError::Invalid(
                    "ensemble members live on different spaces".into(),
                ));
            }
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(f64, HistoryVector)] {
        &self.members
    }
}

/// rho = |Psi><Psi| of a single history vector.
pub fn density_from_history_vector(hv: &HistoryVector) -> Result<HistoryDensityMatrix> {
    let psi = hv.dense();
    HistoryDensityMatrix::new(hv.labeled_space(), psi.outer(&psi))
}

/// rho = sum_i p_i |Psi_i><Psi_i|.
pub fn density_from_ensemble(ensemble: &HistoryEnsemble) -> Result<HistoryDensityMatrix> {
    let space = ensemble.members()[0].1.labeled_space();
    let mut matrix = Operator::zeros(space.total_dim());
    for (weight, hv) in ensemble.members() {
        let psi = hv.dense();
        matrix = matrix.add(&psi.outer(&psi).scale(Complex64::new(*weight, 0.0)));
    }
    HistoryDensityMatrix::new(space, matrix)
}

/// Tr(rho P) for a projector that places a rank-1 state at every slot.
pub fn probability_from_density(
    rho: &HistoryDensityMatrix,
    proj: &MultitimeProjector,
) -> Result<f64> {
    let slot_dims = rho.slot_dims();
    let mut dense = Operator::identity(1);
    for (slot, dim) in &slot_dims {
        let v = proj.placements().get(slot).ok_or_else(|| {
            HistoryError::Invalid(format!("projector must cover slot {slot}"))
        })?;
        if v.dim() != *dim {
            return Err(HistoryError::DimensionMismatch {
                expected: *dim,
                got: v.dim(),
            });
        }
        dense = dense.kron(&v.outer(v));
    }
    if proj.placements().len() != slot_dims.len() {
        return Err(HistoryError::Invalid(
            "projector places states outside the density matrix slots".into(),
        ));
    }
    Ok(rho.matrix().matmul(&dense).trace().re)
}

/// Partial trace over the complement of `keep` (1-based slots).
pub fn time_reduce(rho: &HistoryDensityMatrix, keep: &[usize]) -> Result<HistoryDensityMatrix> {
    if keep.is_empty() {
        return Err(HistoryError::EmptyKeep);
    }
    let traced: Vec<AxisLabel> = rho
        .space()
        .labels()
        .into_iter()
        .filter(|l| !keep.contains(&l.slot))
        .collect();
    if traced.is_empty() {
        return Ok(rho.clone());
    }
    let (matrix, space) = partial_trace(rho.matrix(), rho.space(), &traced)?;
    HistoryDensityMatrix::new(space, matrix)
}

/// Which spatial factor to keep in a space reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Partial trace over the other spatial factor at every slot.
pub fn space_reduce_density(
    rho: &HistoryDensityMatrix,
    keep: Subsystem,
) -> Result<HistoryDensityMatrix> {
    let traced_factor = match keep {
        Subsystem::A => Factor::B,
        Subsystem::B => Factor::A,
    };
    let traced: Vec<AxisLabel> = rho
        .space()
        .labels()
        .into_iter()
        .filter(|l| l.factor == Some(traced_factor))
        .collect();
    if traced.is_empty() {
        return Err(HistoryError::Invalid(
            "density matrix has no spatial factors to trace".into(),
        ));
    }
    let (matrix, space) = partial_trace(rho.matrix(), rho.space(), &traced)?;
    // Relabel t_i.A (or t_i.B) back to plain slots.
    let relabeled = LabeledSpace::new(
        space
            .axes()
            .iter()
            .map(|(l, d)| (AxisLabel::slot(l.slot), *d))
            .collect(),
    )?;
    HistoryDensityMatrix::new(relabeled, matrix)
}

/// S = -Tr(rho log rho), with 0 log 0 = 0 and eigenvalues in [-PSD_TOL, 0)
/// clipped to zero.
pub fn von_neumann_entropy(rho: &HistoryDensityMatrix, base: LogBase) -> Result<f64> {
    let (eigenvalues, _) = rho.matrix().hermitian_eig(1e-10)?;
    let mut s = 0.0;
    for lambda in eigenvalues {
        if lambda < -PSD_TOL {
            return Err(HistoryError::NotPositive(lambda));
        }
        if lambda > 0.0 {
            s -= lambda * lambda.ln();
        }
    }
    Ok(match base {
        LogBase::Natural => s,
        LogBase::Two => s / std::f64::consts::LN_2,
    })
}

/// Schmidt analysis of a history vector across a bipartition of its axes.
#[derive(Debug, Clone)]
pub struct SchmidtReport {
    pub product: bool,
    /// Singular values of the reshaped amplitude tensor, descending.
    pub spectrum: Vec<f64>,
}

/// Reshapes the amplitude tensor across `cut` (one side of the bipartition)
/// and reports whether the state factorizes there.
pub fn is_product_history(
    hv: &HistoryVector,
    cut: &[AxisLabel],
    tol: f64,
) -> Result<SchmidtReport> {
    let space = hv.labeled_space();
    let all = space.labels();
    let mut left_pos = Vec::new();
    for label in cut {
        let p = space.position(label)?;
        if left_pos.contains(&p) {
            return Err(HistoryError::DuplicateLabel(label.to_string()));
        }
        left_pos.push(p);
    }
    if left_pos.is_empty() || left_pos.len() == all.len() {
        return Err(HistoryError::TrivialCut);
    }
    let right_pos: Vec<usize> = (0..all.len()).filter(|p| !left_pos.contains(p)).collect();
    let dims: Vec<usize> = space.axes().iter().map(|(_, d)| *d).collect();
    let rows: usize = left_pos.iter().map(|&p| dims[p]).product();
    let cols: usize = right_pos.iter().map(|&p| dims[p]).product();

    let mut entries = vec![Complex64::ZERO; rows * cols];
    for alpha in hv.all_sequences() {
        let amp = hv.amplitude(&alpha);
        if amp == Complex64::ZERO {
            continue;
        }
        let axis_idx = axis_indices(hv, &alpha);
        let mut row = 0usize;
        for &p in &left_pos {
            row = row * dims[p] + axis_idx[p];
        }
        let mut col = 0usize;
        for &p in &right_pos {
            col = col * dims[p] + axis_idx[p];
        }
        entries[row * cols + col] = amp;
    }
    let spectrum = Operator::singular_values_rect(rows, cols, &entries);
    let product = spectrum.len() < 2 || spectrum[1] <= tol;
    Ok(SchmidtReport { product, spectrum })
}

/// Per-axis indices of an outcome sequence, splitting composite slot
/// outcomes into their (a, b) parts.
fn axis_indices(hv: &HistoryVector, alpha: &[usize]) -> Vec<usize> {
    match hv.composite_dims() {
        None => alpha.to_vec(),
        Some((_, db)) => alpha.iter().flat_map(|&k| [k / db, k % db]).collect(),
    }
}

/// A bipartite system measured locally on both factors at every slot.
#[derive(Debug, Clone)]
pub struct CompositeHistorySpec {
    dim_a: usize,
    dim_b: usize,
    joint: HistorySpec,
}

impl CompositeHistorySpec {
    /// `initial` and `evolutions` act on the joint d_A * d_B space; the
    /// per-slot local observables combine into joint eigenbases with
    /// outcome index a * d_B + b.
    pub fn new(
        dim_a: usize,
        dim_b: usize,
        initial: StateVector,
        evolutions: Vec<Operator>,
        measurements_a: Vec<ObservableSpec>,
        measurements_b: Vec<ObservableSpec>,
    ) -> Result<Self> {
        if measurements_a.len() != measurements_b.len() {
            return Err(HistoryError::LengthMismatch {
                evolutions: measurements_a.len(),
                measurements: measurements_b.len(),
            });
        }
        for (a, b) in measurements_a.iter().zip(&measurements_b) {
            if a.dim() != dim_a || b.dim() != dim_b {
                return Err(HistoryError::DimensionMismatch {
                    expected: dim_a,
                    got: a.dim(),
                });
            }
        }
        let bases: Vec<ObservableSpec> = measurements_a
            .iter()
            .zip(&measurements_b)
            .map(|(a, b)| a.joint_with(b))
            .collect::<Result<_>>()?;
        let joint = HistorySpec::with_bases(initial, evolutions, bases)?;
        Ok(Self { dim_a, dim_b, joint })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn joint_spec(&self) -> &HistorySpec {
        &self.joint
    }

    /// Joint history vector with composite axis structure.
    pub fn history_vector(&self) -> Result<HistoryVector> {
        let mut hv = self.joint.history_vector()?;
        hv.set_composite((self.dim_a, self.dim_b));
        Ok(hv)
    }

    /// Joint probability p(alpha, beta) of local outcome sequences.
    pub fn joint_probability(&self, alpha: &[usize], beta: &[usize]) -> Result<f64> {
        let joint: Vec<usize> = alpha
            .iter()
            .zip(beta)
            .map(|(&a, &b)| a * self.dim_b + b)
            .collect();
        self.joint.sequence_probability(&joint)
    }
}

/// Builds |Psi_AB>, embeds it as a density matrix and traces out the other
/// factor at every slot.
pub fn space_reduce(
    spec: &CompositeHistorySpec,
    keep: Subsystem,
) -> Result<HistoryDensityMatrix> {
    let hv = spec.history_vector()?;
    let rho = density_from_history_vector(&hv)?;
    space_reduce_density(&rho, keep)
}

/// Tr(rho^A P_alpha) for Alice's outcome sequence in her own measured bases.
pub fn subsystem_sequence_probability(
    spec: &CompositeHistorySpec,
    keep: Subsystem,
    outcomes: &[usize],
) -> Result<f64> {
    let reduced = space_reduce(spec, keep)?;
    let placements: Vec<(usize, StateVector)> = outcomes
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let joint = spec.joint_spec().measurements()[i].basis().expect("rank-1");
            // Recover the local eigenvector from the joint basis ordering.
            let (da, db) = spec.dims();
            let joint_index = match keep {
                Subsystem::A => k * db, // b = 0 representative
                Subsystem::B => k,      // a = 0 representative
            };
            let joint_vec = &joint.eigenvectors()[joint_index];
            (i + 1, extract_local_factor(joint_vec, da, db, keep))
        })
        .collect();
    let proj = MultitimeProjector::new(placements)?;
    probability_from_density(&reduced, &proj)
}

/// Pulls the `keep` factor out of a product vector v_a (x) v_b.
fn extract_local_factor(
    joint: &StateVector,
    da: usize,
    db: usize,
    keep: Subsystem,
) -> StateVector {
    // The joint eigenvectors are Kronecker products by construction, so one
    // nonzero column/row determines the factor up to phase.
    let entries = joint.entries();
    match keep {
        Subsystem::A => {
            let b0 = (0..db)
                .max_by(|&x, &y| {
                    let nx: f64 = (0..da).map(|a| entries[a * db + x].norm_sqr()).sum();
                    let ny: f64 = (0..da).map(|a| entries[a * db + y].norm_sqr()).sum();
                    nx.partial_cmp(&ny).unwrap()
                })
                .unwrap();
            let v: Vec<Complex64> = (0..da).map(|a| entries[a * db + b0]).collect();
            StateVector::new(v).unwrap().normalized().unwrap()
        }
        Subsystem::B => {
            let a0 = (0..da)
                .max_by(|&x, &y| {
                    let nx: f64 = (0..db).map(|b| entries[x * db + b].norm_sqr()).sum();
                    let ny: f64 = (0..db).map(|b| entries[y * db + b].norm_sqr()).sum();
                    nx.partial_cmp(&ny).unwrap()
                })
                .unwrap();
            let v: Vec<Complex64> = (0..db).map(|b| entries[a0 * db + b]).collect();
            StateVector::new(v).unwrap().normalized().unwrap()
        }
    }
}

/// Sum over Bob's outcomes of the joint probabilities with Alice's fixed.
pub fn marginal_over_other(
    spec: &CompositeHistorySpec,
    keep: Subsystem,
    outcomes: &[usize],
) -> Result<f64> {
    let (da, db) = spec.dims();
    let other_dim = match keep {
        Subsystem::A => db,
        Subsystem::B => da,
    };
    let mut total = 0.0;
    for other in sequences(&vec![other_dim; outcomes.len()]) {
        total += match keep {
            Subsystem::A => spec.joint_probability(outcomes, &other)?,
            Subsystem::B => spec.joint_probability(&other, outcomes)?,
        };
    }
    Ok(total)
}
