//! Dense complex linear algebra with labeled tensor axes.
//!
//! Everything downstream (history vectors, density matrices, the clone-gate
//! protocol) is built on the three types here: [`StateVector`], [`Operator`]
//! and [`LabeledSpace`]. The temporal product between time slots and the
//! spatial product between subsystems share the same Kronecker arithmetic;
//! only the axis labels tell them apart.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{HistoryError, Result};

/// Default tolerance for structural checks (unitarity, Hermiticity,
/// orthonormality).
pub const STRUCT_TOL: f64 = 1e-10;
/// Default tolerance for arithmetic identities.
pub const ARITH_TOL: f64 = 1e-12;

fn check_finite(entries: &[Complex64]) -> Result<()> {
    for (i, z) in entries.iter().enumerate() {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(HistoryError::NonFinite(i));
        }
    }
    Ok(())
}

/// A dense complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    entries: Vec<Complex64>,
}

impl StateVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        check_finite(&entries)?;
        if entries.is_empty() {
            return Err(HistoryError::Invalid("empty state vector".into()));
        }
        Ok(Self { entries })
    }

    /// Vector from real entries.
    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis ket |k⟩ in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut entries = vec![Complex64::ZERO; dim];
        entries[k] = Complex64::ONE;
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Fails unless the Euclidean norm is 1 within `tol`.
    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() > tol {
            return Err(HistoryError::NotNormalized(n));
        }
        Ok(())
    }

    /// Returns the unit vector along `self`.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(HistoryError::Invalid("cannot normalize the zero vector".into()));
        }
        Ok(Self {
            entries: self.entries.iter().map(|z| z / n).collect(),
        })
    }

    /// ⟨self|other⟩, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |self⟩⟨other|.
    pub fn outer(&self, other: &Self) -> Operator {
        let d = self.dim();
        let mut entries = Vec::with_capacity(d * other.dim());
        for a in &self.entries {
            for b in &other.entries {
                entries.push(a * b.conj());
            }
        }
        Operator {
            dim: d,
            entries,
        }
    }

    /// Kronecker product, `self`'s axes before `other`'s.
    pub fn kron(&self, other: &Self) -> Self {
        let mut entries = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.entries {
            for b in &other.entries {
                entries.push(a * b);
            }
        }
        Self { entries }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            entries: self.entries.iter().map(|z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }
}

/// A dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl Operator {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(HistoryError::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        check_finite(&entries)?;
        Ok(Self { dim, entries })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(HistoryError::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::new(dim, entries)
    }

    pub fn from_real(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex64::ZERO; dim * dim];
        for k in 0..dim {
            entries[k * dim + k] = Complex64::ONE;
        }
        Self { dim, entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::ZERO; dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut entries = vec![Complex64::ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                entries[c * d + r] = self.entries[r * d + c].conj();
            }
        }
        Self { dim: d, entries }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|k| self.get(k, k)).sum()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut entries = vec![Complex64::ZERO; d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a == Complex64::ZERO {
                    continue;
                }
                for c in 0..d {
                    entries[r * d + c] += a * other.entries[k * d + c];
                }
            }
        }
        Self { dim: d, entries }
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        debug_assert_eq!(self.dim, v.dim());
        let d = self.dim;
        let mut entries = vec![Complex64::ZERO; d];
        for (r, entry) in entries.iter_mut().enumerate() {
            let mut acc = Complex64::ZERO;
            for c in 0..d {
                acc += self.entries[r * d + c] * v.entries()[c];
            }
            *entry = acc;
        }
        StateVector { entries }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Kronecker product, `self`'s axes before `other`'s.
    pub fn kron(&self, other: &Self) -> Self {
        let (da, db) = (self.dim, other.dim);
        let d = da * db;
        let mut entries = vec![Complex64::ZERO; d * d];
        for ra in 0..da {
            for ca in 0..da {
                let a = self.entries[ra * da + ca];
                if a == Complex64::ZERO {
                    continue;
                }
                for rb in 0..db {
                    for cb in 0..db {
                        entries[(ra * db + rb) * d + (ca * db + cb)] =
                            a * other.entries[rb * db + cb];
                    }
                }
            }
        }
        Self { dim: d, entries }
    }

    /// Largest entrywise |a - b|.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// True iff max-abs entry of U†U − I is ≤ `tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.adjoint()
            .matmul(self)
            .max_abs_diff(&Operator::identity(self.dim))
            <= tol
    }

    pub fn check_unitary(&self, tol: f64) -> Result<()> {
        let residual = self
            .adjoint()
            .matmul(self)
            .max_abs_diff(&Operator::identity(self.dim));
        if residual > tol {
            return Err(HistoryError::NotUnitary(residual));
        }
        Ok(())
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    /// Eigendecomposition of a Hermitian operator.
    ///
    /// Returns eigenvalues in ascending order with matching orthonormal
    /// eigenvectors. Fails if the input is not Hermitian within `tol`.
    pub fn hermitian_eig(&self, tol: f64) -> Result<(Vec<f64>, Vec<StateVector>)> {
        let residual = self.hermiticity_residual();
        if residual > tol {
            return Err(HistoryError::NotHermitian(residual));
        }
        let d = self.dim;
        // nalgebra is column-major; from_row_slice handles the transposition.
        let m = DMatrix::<Complex64>::from_row_slice(d, d, &self.entries);
        let eig = m.symmetric_eigen();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors: Vec<StateVector> = order
            .iter()
            .map(|&k| StateVector {
                entries: eig.eigenvectors.column(k).iter().copied().collect(),
            })
            .collect();
        Ok((values, vectors))
    }

    /// Singular values of the `rows` x `cols` matrix stored row-major in
    /// `entries` (used for Schmidt spectra, where the matrix is in general
    /// rectangular).
    pub fn singular_values_rect(rows: usize, cols: usize, entries: &[Complex64]) -> Vec<f64> {
        let m = DMatrix::<Complex64>::from_row_slice(rows, cols, entries);
        let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        sv
    }
}

/// Spatial factor of one time slot in a composite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Factor {
    A,
    B,
}

impl std::fmt::Display for Factor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Factor::A => write!(f, "A"),
            Factor::B => write!(f, "B"),
        }
    }
}

/// Identifies one tensor axis: a time slot, optionally narrowed to one
/// spatial factor of that slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AxisLabel {
    pub slot: usize,
    pub factor: Option<Factor>,
}

impl AxisLabel {
    pub fn slot(slot: usize) -> Self {
        Self { slot, factor: None }
    }

    pub fn slot_factor(slot: usize, factor: Factor) -> Self {
        Self {
            slot,
            factor: Some(factor),
        }
    }
}

impl std::fmt::Display for AxisLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.factor {
            None => write!(f, "t{}", self.slot),
            Some(factor) => write!(f, "t{}.{}", self.slot, factor),
        }
    }
}

/// An ordered list of labeled axes; the flattening order is the axis order
/// (first axis outermost).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledSpace {
    axes: Vec<(AxisLabel, usize)>,
}

impl LabeledSpace {
    pub fn new(axes: Vec<(AxisLabel, usize)>) -> Result<Self> {
        for (i, (label, dim)) in axes.iter().enumerate() {
            if *dim == 0 {
                return Err(HistoryError::Invalid(format!("axis {label} has dimension 0")));
            }
            if axes[..i].iter().any(|(l, _)| l == label) {
                return Err(HistoryError::DuplicateLabel(label.to_string()));
            }
        }
        Ok(Self { axes })
    }

    /// n time-slot axes t1..tn, each of dimension `dim`.
    pub fn slots(n: usize, dim: usize) -> Self {
        Self {
            axes: (1..=n).map(|i| (AxisLabel::slot(i), dim)).collect(),
        }
    }

    pub fn axes(&self) -> &[(AxisLabel, usize)] {
        &self.axes
    }

    pub fn labels(&self) -> Vec<AxisLabel> {
        self.axes.iter().map(|(l, _)| *l).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.axes.iter().map(|(_, d)| d).product()
    }

    pub fn position(&self, label: &AxisLabel) -> Result<usize> {
        self.axes
            .iter()
            .position(|(l, _)| l == label)
            .ok_or_else(|| HistoryError::UnknownLabel(label.to_string()))
    }

    /// Row-major strides of the axes.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.axes.len()];
        for i in (0..self.axes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.axes[i + 1].1;
        }
        strides
    }
}

/// Kronecker product of two states or two operators; `x`'s axes come first.
///
/// Both the temporal product between slots and the spatial product between
/// subsystems reduce to this.
pub fn tensor_product_states(x: &StateVector, y: &StateVector) -> StateVector {
    x.kron(y)
}

pub fn tensor_product_operators(x: &Operator, y: &Operator) -> Operator {
    x.kron(y)
}

/// Partial trace of `rho` over the axes named in `traced`.
///
/// Axis order of the remaining space is preserved. Tracing every axis is
/// allowed and yields the 1x1 operator `[Tr(rho)]`.
pub fn partial_trace(
    rho: &Operator,
    space: &LabeledSpace,
    traced: &[AxisLabel],
) -> Result<(Operator, LabeledSpace)> {
    if rho.dim() != space.total_dim() {
        return Err(HistoryError::DimensionMismatch {
            expected: space.total_dim(),
            got: rho.dim(),
        });
    }
    let mut traced_pos = Vec::new();
    for label in traced {
        let p = space.position(label)?;
        if traced_pos.contains(&p) {
            return Err(HistoryError::DuplicateLabel(label.to_string()));
        }
        traced_pos.push(p);
    }
    let strides = space.strides();
    let kept_pos: Vec<usize> = (0..space.axes().len())
        .filter(|p| !traced_pos.contains(p))
        .collect();
    let kept_axes: Vec<(AxisLabel, usize)> =
        kept_pos.iter().map(|&p| space.axes()[p]).collect();
    let out_space = LabeledSpace::new(kept_axes)?;
    let out_dim = out_space.total_dim();
    let traced_dims: Vec<usize> = traced_pos.iter().map(|&p| space.axes()[p].1).collect();
    let traced_total: usize = traced_dims.iter().product();

    // Offsets into the flattened full index for each kept and traced
    // multi-index, then sum rho over the traced diagonal.
    let kept_offsets = enumerate_offsets(&kept_pos, space, &strides);
    let traced_offsets = enumerate_offsets(&traced_pos, space, &strides);
    debug_assert_eq!(kept_offsets.len(), out_dim);
    debug_assert_eq!(traced_offsets.len(), traced_total);

    let mut out = Operator::zeros(out_dim);
    for (r_out, &r_off) in kept_offsets.iter().enumerate() {
        for (c_out, &c_off) in kept_offsets.iter().enumerate() {
            let mut acc = Complex64::ZERO;
            for &t_off in &traced_offsets {
                acc += rho.get(r_off + t_off, c_off + t_off);
            }
            out.set(r_out, c_out, acc);
        }
    }
    Ok((out, out_space))
}

/// Flattened offsets of all multi-indices over the axes at `positions`,
/// in row-major order of those axes.
fn enumerate_offsets(positions: &[usize], space: &LabeledSpace, strides: &[usize]) -> Vec<usize> {
    let dims: Vec<usize> = positions.iter().map(|&p| space.axes()[p].1).collect();
    let total: usize = dims.iter().product();
    let mut offsets = Vec::with_capacity(total);
    let mut idx = vec![0usize; dims.len()];
    for _ in 0..total {
        let off: usize = idx
            .iter()
            .zip(positions)
            .map(|(&i, &p)| i * strides[p])
            .sum();
        offsets.push(off);
        for k in (0..dims.len()).rev() {
            idx[k] += 1;
            if idx[k] < dims[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    if dims.is_empty() {
        // Tracing nothing (or keeping nothing): a single empty multi-index.
        return vec![0];
    }
    offsets
}
