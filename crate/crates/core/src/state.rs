//! The three-detector density matrix at leading order in the coupling, its
//! reductions, and the l1-norm of coherence.
//!
//! Basis order, with occupation written as `|A B C>`:
//! `|000>, |001>, |010>, |100>, |011>, |101>, |110>, |111>`.

use std::fmt::Write as _;
use std::ops::{Index, IndexMut};

use num_complex::Complex;

use crate::closed_form::{all_pair_amplitudes, probabilities, PairAmplitudes, Probabilities};
use crate::error::{Error, Result};
use crate::geometry::{GeometryConfig, Label, Pair};
use crate::scalar::Real;

pub const BASIS_LABELS: [&str; 8] = [
    "|000>", "|001>", "|010>", "|100>", "|011>", "|101>", "|110>", "|111>",
];

/// Occupations `(A, B, C)` of each basis vector.
const BASIS_BITS: [[usize; 3]; 8] = [
    [0, 0, 0],
    [0, 0, 1],
    [0, 1, 0],
    [1, 0, 0],
    [0, 1, 1],
    [1, 0, 1],
    [1, 1, 0],
    [1, 1, 1],
];

/// Entries that may be nonzero at this order.
const SUPPORT: [[bool; 8]; 8] = {
    let mut m = [[false; 8]; 8];
    m[0][0] = true;
    let mut k = 4;
    while k < 7 {
        m[0][k] = true;
        m[k][0] = true;
        k += 1;
    }
    let mut i = 1;
    while i < 4 {
        let mut j = 1;
        while j < 4 {
            m[i][j] = true;
            j += 1;
        }
        i += 1;
    }
    m
};

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> SquareMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        Self {
            dim,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).fold(Complex::new(T::zero(), T::zero()), |acc, i| {
            acc + self[(i, i)]
        })
    }

    /// `max |ρ_ij - conj(ρ_ji)|`.
    pub fn hermiticity_residual(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue, treating the matrix as Hermitian.
    pub fn min_eigenvalue(&self) -> f64 {
        let m = nalgebra::DMatrix::from_fn(self.dim, self.dim, |i, j| {
            let v = self[(i, j)];
            Complex::new(v.re.as_f64(), v.im.as_f64())
        });
        nalgebra::SymmetricEigen::new(m)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn scaled(&self, k: T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|v| v * k).collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for SquareMatrix<T> {
    type Output = Complex<T>;

    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for SquareMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.dim + j]
    }
}

/// Sum of `|ρ_ij|` over all `i != j`.
pub fn l1_coherence<T: Real>(matrix: &SquareMatrix<T>) -> T {
    let n = matrix.dim();
    let mut total = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                total += matrix[(i, j)].norm();
            }
        }
    }
    total
}

#[derive(Debug, Clone, PartialEq)]
pub struct TripartiteState<T> {
    pub rho: SquareMatrix<T>,
    pub probs: Probabilities<T>,
    /// `AB`, `BC`, `AC`.
    pub pairs: [PairAmplitudes<T>; 3],
}

/// Places `P`, `C`, `X` into the 8×8 matrix.
///
/// Fails when `P_A + P_B + P_C >= 1`, where the leading-order truncation is
/// meaningless.
pub fn assemble_state<T: Real>(
    probs: Probabilities<T>,
    pairs: [PairAmplitudes<T>; 3],
) -> Result<TripartiteState<T>> {
    let total = probs.total();
    if !(total < T::one()) {
        return Err(Error::NonPerturbative {
            total: total.as_f64(),
        });
    }
    let re = |v: T| Complex::new(v, T::zero());
    let [ab, bc, ac] = pairs;
    let mut rho = SquareMatrix::zeros(8);

    rho[(0, 0)] = re(T::one() - total);
    rho[(4, 0)] = bc.x;
    rho[(5, 0)] = ac.x;
    rho[(6, 0)] = ab.x;
    rho[(0, 4)] = bc.x.conj();
    rho[(0, 5)] = ac.x.conj();
    rho[(0, 6)] = ab.x.conj();

    rho[(1, 1)] = re(probs.of(Label::C));
    rho[(2, 2)] = re(probs.of(Label::B));
    rho[(3, 3)] = re(probs.of(Label::A));
    rho[(2, 1)] = bc.c;
    rho[(3, 1)] = ac.c;
    rho[(3, 2)] = ab.c;
    rho[(1, 2)] = bc.c.conj();
    rho[(1, 3)] = ac.c.conj();
    rho[(2, 3)] = ab.c.conj();

    Ok(TripartiteState { rho, probs, pairs })
}

impl<T: Real> TripartiteState<T> {
    /// Closed-form state for a placement, at unit coupling.
    pub fn from_config(config: &GeometryConfig<T>) -> Result<Self> {
        assemble_state(probabilities(config)?, all_pair_amplitudes(config)?)
    }

    /// Same state at coupling `λ`: every `P`, `C`, `X` picks up `λ²`.
    pub fn rescaled(&self, lambda: T) -> Result<Self> {
        assemble_state(
            self.probs.rescaled(lambda),
            self.pairs.map(|p| p.rescaled(lambda)),
        )
    }

    pub fn pair(&self, pair: Pair) -> &PairAmplitudes<T> {
        &self.pairs[pair.index()]
    }

    pub fn coherence(&self) -> T {
        l1_coherence(&self.rho)
    }

    /// `2 Σ (|X| + |C|)` over the three pairs, without touching the matrix.
    pub fn coherence_from_amplitudes(&self) -> T {
        let two = T::lit(2.0);
        self.pairs
            .iter()
            .fold(T::zero(), |acc, p| acc + two * (p.x.norm() + p.c.norm()))
    }

    /// Largest magnitude among entries that must vanish at this order.
    pub fn off_support_max(&self) -> T {
        let mut worst = T::zero();
        for (i, row) in SUPPORT.iter().enumerate() {
            for (j, allowed) in row.iter().enumerate() {
                if !allowed {
                    worst = worst.max(self.rho[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// Labeled rows of `re, im` pairs with 12 significant digits.
    pub fn to_labeled_rows(&self) -> String {
        let mut out = String::new();
        out.push_str("# rows and columns ordered |A B C>\nrow");
        for label in BASIS_LABELS {
            let _ = write!(out, ",re{label},im{label}");
        }
        out.push('\n');
        for (i, label) in BASIS_LABELS.iter().enumerate() {
            out.push_str(label);
            for j in 0..8 {
                let v = self.rho[(i, j)];
                let _ = write!(out, ",{:.11e},{:.11e}", v.re, v.im);
            }
            out.push('\n');
        }
        out
    }
}

/// Partial trace keeping `keep` (in that order, first label most significant).
pub fn partial_trace<T: Real>(state: &TripartiteState<T>, keep: &[Label]) -> SquareMatrix<T> {
    let traced: Vec<usize> = Label::ALL
        .iter()
        .filter(|l| !keep.contains(l))
        .map(|l| l.index())
        .collect();
    let sub_index = |bits: &[usize; 3]| {
        keep.iter()
            .fold(0usize, |acc, l| (acc << 1) | bits[l.index()])
    };
    let mut out = SquareMatrix::zeros(1 << keep.len());
    for (i, bi) in BASIS_BITS.iter().enumerate() {
        for (j, bj) in BASIS_BITS.iter().enumerate() {
            if traced.iter().all(|&t| bi[t] == bj[t]) {
                out[(sub_index(bi), sub_index(bj))] += state.rho[(i, j)];
            }
        }
    }
    out
}

/// Two-detector state in the basis `|00>, |01>, |10>, |11>` of `(D, D')`.
pub fn reduce_pair<T: Real>(state: &TripartiteState<T>, pair: Pair) -> SquareMatrix<T> {
    let (a, b) = pair.members();
    partial_trace(state, &[a, b])
}

pub fn reduce_single<T: Real>(state: &TripartiteState<T>, label: Label) -> SquareMatrix<T> {
    partial_trace(state, &[label])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Additivity<T> {
    /// Sum of the three pair-reduced coherences.
    pub lhs: T,
    /// Coherence of the full state.
    pub rhs: T,
    pub residual: T,
}

pub fn additivity_check<T: Real>(state: &TripartiteState<T>) -> Additivity<T> {
    let lhs = Pair::ALL.iter().fold(T::zero(), |acc, &p| {
        acc + l1_coherence(&reduce_pair(state, p))
    });
    let rhs = state.coherence();
    Additivity {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    }
}
