//! Leggett-Garg and temporal CHSH inequalities.
//!
//! The LG correlators come from genuinely two-time schedules (the unmeasured
//! intermediate unitary is composed away); the three-time schedule supplies
//! the joint probabilities and the interference terms that connect the two
//! pictures. The temporal CHSH quantity is evaluated both from a single
//! reference history vector and from one history vector per observable pair.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use num_complex::Complex64;

use crate::engine::{HistorySpec, HistoryVector, ObservableSpec};
use crate::error::{HistoryError, Result};
use crate::observables::{history_expectation, multitime_average, HistoryOperator};
use crate::qubit::z_observable;
use crate::tensor::{Operator, StateVector};

/// Index positions of the +1 and -1 eigenvalues of a dichotomic observable.
fn sign_indices(obs: &ObservableSpec) -> Result<(usize, usize)> {
    let ev = obs.eigenvalues();
    if ev.len() == 2 {
        if (ev[0] - 1.0).abs() < 1e-12 && (ev[1] + 1.0).abs() < 1e-12 {
            return Ok((0, 1));
        }
        if (ev[0] + 1.0).abs() < 1e-12 && (ev[1] - 1.0).abs() < 1e-12 {
            return Ok((1, 0));
        }
    }
    Err(HistoryError::NotDichotomic(ev.to_vec()))
}

/// A dichotomic observable Q measured at three successive times.
#[derive(Debug, Clone)]
pub struct DichotomicSchedule {
    spec: HistorySpec,
    idx_plus: usize,
    idx_minus: usize,
}

impl DichotomicSchedule {
    /// `unitaries[0]` evolves the initial state to the first measurement,
    /// the others connect consecutive measurements.
    pub fn new(
        initial: StateVector,
        unitaries: [Operator; 3],
        q: ObservableSpec,
    ) -> Result<Self> {
        let (idx_plus, idx_minus) = sign_indices(&q)?;
        let spec = HistorySpec::with_bases(
            initial,
            unitaries.to_vec(),
            vec![q.clone(), q.clone(), q],
        )?;
        Ok(Self {
            spec,
            idx_plus,
            idx_minus,
        })
    }

    /// Rotation by `theta` in the ZX plane between consecutive Z
    /// measurements, starting from |0>.
    pub fn precession(theta: f64) -> Self {
        let u = crate::qubit::rotation_y(theta);
        Self::new(
            StateVector::basis(2, 0),
            [u.clone(), u.clone(), u],
            z_observable(),
        )
        .expect("precession schedule is valid")
    }

    pub fn spec(&self) -> &HistorySpec {
        &self.spec
    }

    /// Outcome index for a sign (+1 or -1).
    fn index(&self, sign: i8) -> usize {
        if sign > 0 {
            self.idx_plus
        } else {
            self.idx_minus
        }
    }

    /// Joint probability of the signed outcome triple.
    pub fn probability(&self, signs: [i8; 3]) -> Result<f64> {
        let alpha: Vec<usize> = signs.iter().map(|&s| self.index(s)).collect();
        self.spec.sequence_probability(&alpha)
    }

    /// Interference term with the summed-out slot (1-based) starred: twice
    /// the real part of the decoherence functional between the two histories
    /// that differ only there.
    pub fn interference(&self, star_slot: usize, others: [i8; 2]) -> Result<f64> {
        if !(1..=3).contains(&star_slot) {
            return Err(HistoryError::SlotOutOfRange(star_slot, 3));
        }
        let mut plus = Vec::with_capacity(3);
        let mut minus = Vec::with_capacity(3);
        let mut fixed = others.iter();
        for slot in 1..=3 {
            if slot == star_slot {
                plus.push(self.idx_plus);
                minus.push(self.idx_minus);
            } else {
                let s = *fixed.next().expect("two fixed outcomes");
                plus.push(self.index(s));
                minus.push(self.index(s));
            }
        }
        let d = self.spec.decoherence_functional(&plus, &minus)?;
        Ok(2.0 * d.re)
    }
}

/// The two-time correlator <Q_i Q_j> from a schedule with only slots i and j
/// measured (the intermediate unitary is composed into the evolution).
pub fn two_time_correlator(sched: &DichotomicSchedule, i: usize, j: usize) -> Result<f64> {
    if i >= j {
        return Err(HistoryError::Invalid(format!(
            "correlator needs i < j, got ({i}, {j})"
        )));
    }
    let reduced = sched.spec().reduce_schedule(&[i, j])?;
    let hv = reduced.history_vector()?;
    multitime_average(&hv, &[1, 2])
}

/// Leggett-Garg evaluation of a three-time dichotomic schedule.
#[derive(Debug, Clone)]
pub struct LGReport {
    pub c12: f64,
    pub c13: f64,
    pub c23: f64,
    /// K = C12 + C23 - C13; classically bounded by [-3, 1].
    pub k: f64,
    /// Interference with the first slot starred, indexed by the signs of
    /// (q2, q3): [0] is +1, [1] is -1.
    pub i_first: [[f64; 2]; 2],
    /// Interference with the middle slot starred, indexed by (q1, q3).
    pub i_middle: [[f64; 2]; 2],
    /// All eight interference magnitudes within tolerance.
    pub consistent: bool,
    pub violated: bool,
}

const SIGNS: [i8; 2] = [1, -1];

pub fn lg_evaluate(sched: &DichotomicSchedule, tol: f64) -> Result<LGReport> {
    let c12 = two_time_correlator(sched, 1, 2)?;
    let c13 = two_time_correlator(sched, 1, 3)?;
    let c23 = two_time_correlator(sched, 2, 3)?;
    let k = c12 + c23 - c13;
    let mut i_first = [[0.0; 2]; 2];
    let mut i_middle = [[0.0; 2]; 2];
    for (a, &qa) in SIGNS.iter().enumerate() {
        for (b, &qb) in SIGNS.iter().enumerate() {
            i_first[a][b] = sched.interference(1, [qa, qb])?;
            i_middle[a][b] = sched.interference(2, [qa, qb])?;
        }
    }
    let consistent = i_first
        .iter()
        .chain(&i_middle)
        .flatten()
        .all(|v| v.abs() <= tol);
    let violated = k > 1.0 + tol || k < -3.0 - tol;
    Ok(LGReport {
        c12,
        c13,
        c23,
        k,
        i_first,
        i_middle,
        consistent,
        violated,
    })
}

/// Outcome of checking K against its probability-plus-interference form.
#[derive(Debug, Clone, Copy)]
pub struct DecompositionReport {
    /// |K_direct - K_decomposed|.
    pub residual: f64,
    /// Largest |interference| with the last slot starred; zero in exact
    /// arithmetic because the final-slot sum rule always holds.
    pub max_last_slot_interference: f64,
}

/// K = 1 - sum_q [4 p(q,-q,q) - I(*,q,q) + I(*,q,-q) + I(q,*,q) - I(q,*,-q)].
pub fn lg_interference_decomposition(sched: &DichotomicSchedule) -> Result<DecompositionReport> {
    let report = lg_evaluate(sched, 1e-10)?;
    let mut rhs = 1.0;
    for &q in &SIGNS {
        let p = sched.probability([q, -q, q])?;
        let qi = if q > 0 { 0 } else { 1 };
        let qn = 1 - qi;
        rhs -= 4.0 * p - report.i_first[qi][qi] + report.i_first[qi][qn]
            + report.i_middle[qi][qi]
            - report.i_middle[qi][qn];
    }
    let mut max_last = 0.0_f64;
    for &qa in &SIGNS {
        for &qb in &SIGNS {
            max_last = max_last.max(sched.interference(3, [qa, qb])?.abs());
        }
    }
    Ok(DecompositionReport {
        residual: (report.k - rhs).abs(),
        max_last_slot_interference: max_last,
    })
}

/// Seeded random qubit schedule; with `consistent` the unitaries are
/// diagonal in the measured basis, which makes every history pair decohere.
pub fn random_schedule(rng: &mut ChaCha8Rng, consistent: bool) -> DichotomicSchedule {
    let initial = random_qubit_state(rng);
    let unitaries = if consistent {
        [
            random_diagonal_unitary(rng),
            random_diagonal_unitary(rng),
            random_diagonal_unitary(rng),
        ]
    } else {
        [
            random_su2(rng),
            random_su2(rng),
            random_su2(rng),
        ]
    };
    DichotomicSchedule::new(initial, unitaries, z_observable())
        .expect("random schedule is valid")
}

fn random_qubit_state(rng: &mut ChaCha8Rng) -> StateVector {
    loop {
        let v = StateVector::new(vec![
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
        ])
        .unwrap();
        if v.norm() > 1e-3 {
            return v.normalized().unwrap();
        }
    }
}

fn random_su2(rng: &mut ChaCha8Rng) -> Operator {
    let (a, b) = loop {
        let a = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        let b = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if n > 1e-3 {
            break (a / n, b / n);
        }
    };
    Operator::new(2, vec![a, -b.conj(), b, a.conj()]).unwrap()
}

fn random_diagonal_unitary(rng: &mut ChaCha8Rng) -> Operator {
    let phases = [
        Complex64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU),
        Complex64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU),
    ];
    Operator::new(
        2,
        vec![phases[0], Complex64::ZERO, Complex64::ZERO, phases[1]],
    )
    .unwrap()
}

/// Which of the two published evaluation procedures to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChshMode {
    /// One history vector from a reference schedule; averages are two-time
    /// operator expectations on it.
    FixedBasis,
    /// One history vector per observable pair; averages come from the
    /// pair's own outcome statistics.
    PerPair,
}

/// Initial state, two evolution steps and the four dichotomic observables.
#[derive(Debug, Clone)]
pub struct ChshSetup {
    pub initial: StateVector,
    pub u1: Operator,
    pub u2: Operator,
    pub a1: ObservableSpec,
    pub b1: ObservableSpec,
    pub a2: ObservableSpec,
    pub b2: ObservableSpec,
    /// Measurement bases for the fixed-basis reference schedule; defaults
    /// to the computational (Z) basis at both slots.
    pub reference: Option<(ObservableSpec, ObservableSpec)>,
}

impl ChshSetup {
    /// The standard setup: psi = (|1> - |0>)/sqrt(2), U1 = I, U2 = X,
    /// A1 = X, B1 = Z, A2 = -(Z+X)/sqrt(2), B2 = (Z-X)/sqrt(2).
    pub fn standard() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            initial: StateVector::from_real(&[-s, s]).unwrap(),
            u1: Operator::identity(2),
            u2: crate::qubit::pauli_x(),
            a1: crate::qubit::x_observable(),
            b1: z_observable(),
            a2: crate::qubit::chsh_a2_observable(),
            b2: crate::qubit::chsh_b2_observable(),
            reference: None,
        }
    }
}

/// Joint outcome probabilities of one observable pair, indexed by the signs
/// of (q1, q2): [0] is +1, [1] is -1.
#[derive(Debug, Clone)]
pub struct PairTable {
    pub first: String,
    pub second: String,
    pub probabilities: [[f64; 2]; 2],
}

/// Temporal CHSH evaluation.
#[derive(Debug, Clone)]
pub struct ChshReport {
    pub mode: ChshMode,
    /// Ordered (A1A2, A1B2, B1A2, B1B2).
    pub averages: [f64; 4],
    /// S = E(A1,A2) + E(A1,B2) + E(B1,A2) - E(B1,B2).
    pub s: f64,
    /// S after redefining A1 -> -A1.
    pub s_after_a1_flip: f64,
    /// Joint probability tables; per-pair mode only.
    pub tables: Option<Vec<PairTable>>,
    pub violated: bool,
}

pub fn chsh_evaluate(setup: &ChshSetup, mode: ChshMode, tol: f64) -> Result<ChshReport> {
    for obs in [&setup.a1, &setup.b1, &setup.a2, &setup.b2] {
        sign_indices(obs)?;
    }
    let pairs = [
        (&setup.a1, &setup.a2),
        (&setup.a1, &setup.b2),
        (&setup.b1, &setup.a2),
        (&setup.b1, &setup.b2),
    ];
    let mut averages = [0.0; 4];
    let mut tables = None;
    match mode {
        ChshMode::FixedBasis => {
            let (r1, r2) = match &setup.reference {
                Some((r1, r2)) => (r1.clone(), r2.clone()),
                None => (z_observable(), z_observable()),
            };
            let hv = HistorySpec::with_bases(
                setup.initial.clone(),
                vec![setup.u1.clone(), setup.u2.clone()],
                vec![r1, r2],
            )?
            .history_vector()?;
            let dims = vec![setup.initial.dim(), setup.initial.dim()];
            for (k, (o1, o2)) in pairs.iter().enumerate() {
                let op = HistoryOperator::product(
                    dims.clone(),
                    &[(1, o1.operator()), (2, o2.operator())],
                )?;
                averages[k] = history_expectation(&hv, &op)?.value;
            }
        }
        ChshMode::PerPair => {
            let mut built = Vec::with_capacity(4);
            for (k, (o1, o2)) in pairs.iter().enumerate() {
                let hv = HistorySpec::with_bases(
                    setup.initial.clone(),
                    vec![setup.u1.clone(), setup.u2.clone()],
                    vec![(*o1).clone(), (*o2).clone()],
                )?
                .history_vector()?;
                averages[k] = multitime_average(&hv, &[1, 2])?;
                built.push(pair_table(&hv, o1, o2)?);
            }
            tables = Some(built);
        }
    }
    let s = averages[0] + averages[1] + averages[2] - averages[3];
    let s_after_a1_flip = -averages[0] - averages[1] + averages[2] - averages[3];
    let violated = s.abs() > 2.0 + tol || s_after_a1_flip.abs() > 2.0 + tol;
    Ok(ChshReport {
        mode,
        averages,
        s,
        s_after_a1_flip,
        tables,
        violated,
    })
}

fn pair_table(hv: &HistoryVector, o1: &ObservableSpec, o2: &ObservableSpec) -> Result<PairTable> {
    let (p1, m1) = sign_indices(o1)?;
    let (p2, m2) = sign_indices(o2)?;
    let idx1 = [p1, m1];
    let idx2 = [p2, m2];
    let mut probabilities = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            probabilities[a][b] = hv.probability(&[idx1[a], idx2[b]]);
        }
    }
    Ok(PairTable {
        first: o1.name().to_string(),
        second: o2.name().to_string(),
        probabilities,
    })
}
