//! Dense reference implementation used to validate the fast path.
//!
//! Unlike [`crate::walk`], this module keeps the oracle control qubit and
//! builds every operator of one search iteration as an explicit dense matrix
//! on the full `2 * m * 2^m`-dimensional register:
//!
//! ```text
//! W = (I_2 (x) S) * O * C0_hat * C1_hat * O
//! ```
//!
//! where `O` flips the control on marked nodes, `C0_hat` applies the
//! traversing coin on the control-0 sector, `C1_hat` applies minus identity
//! on the control-1 sector, and `S` is the hypercube shift. Nothing here is
//! optimized — straight matrix-vector products — which is exactly what makes
//! it a trustworthy cross-check for the elided-control fast path.
//!
//! Index layout: `q * (m * 2^m) + d * 2^m + j` for control `q`, direction
//! `d`, node `j`.

use num_complex::Complex;
use num_traits::Zero;

use crate::coin::HouseholderCoin;
use crate::walk::WalkState;
use crate::{cf, QrwsError, WalkFloat};

/// Largest register size for which the dense construction is practical.
pub const MAX_DENSE_M: usize = 5;

/// Dense factor matrices for one search iteration with the control qubit
/// retained.
#[derive(Debug, Clone)]
pub struct DenseReference<T: WalkFloat> {
    m: usize,
    n: usize,
    dim: usize,
    oracle: Vec<Complex<T>>,
    coin0: Vec<Complex<T>>,
    coin1: Vec<Complex<T>>,
    shift: Vec<Complex<T>>,
}

fn matvec<T: WalkFloat>(mat: &[Complex<T>], vec: &[Complex<T>]) -> Vec<Complex<T>> {
    let dim = vec.len();
    let mut out = vec![Complex::<T>::zero(); dim];
    for (r, o) in out.iter_mut().enumerate() {
        let row = &mat[r * dim..(r + 1) * dim];
        let mut acc = Complex::<T>::zero();
        for (a, b) in row.iter().zip(vec) {
            acc = acc + *a * *b;
        }
        *o = acc;
    }
    out
}

fn matmul<T: WalkFloat>(a: &[Complex<T>], b: &[Complex<T>], dim: usize) -> Vec<Complex<T>> {
    let mut out = vec![Complex::<T>::zero(); dim * dim];
    for r in 0..dim {
        for k in 0..dim {
            let ark = a[r * dim + k];
            if ark == Complex::zero() {
                continue;
            }
            let brow = &b[k * dim..(k + 1) * dim];
            let orow = &mut out[r * dim..(r + 1) * dim];
            for (o, x) in orow.iter_mut().zip(brow) {
                *o = *o + ark * *x;
            }
        }
    }
    out
}

impl<T: WalkFloat> DenseReference<T> {
    /// Builds the four factor matrices for the given coin and marked set.
    pub fn new(m: usize, coin: &HouseholderCoin<T>, marked: &[usize]) -> Result<Self, QrwsError> {
        if !(2..=MAX_DENSE_M).contains(&m) {
            return Err(QrwsError::RegisterSize {
                m,
                min: 2,
                max: MAX_DENSE_M,
            });
        }
        if coin.m() != m {
            return Err(QrwsError::InvalidParameter {
                name: "coin",
                reason: format!("coin dimension {} does not match m = {m}", coin.m()),
            });
        }
        let n = 1usize << m;
        if let Some(&bad) = marked.iter().find(|&&h| h >= n) {
            return Err(QrwsError::MarkedVertex {
                marked: bad,
                m,
                size: n,
            });
        }
        let dim = 2 * m * n;
        let half = m * n;
        let idx = |q: usize, d: usize, j: usize| q * half + d * n + j;
        let one = Complex::new(T::one(), T::zero());
        let mut is_marked = vec![false; n];
        for &h in marked {
            is_marked[h] = true;
        }

        // Oracle: control flips on marked nodes.
        let mut oracle = vec![Complex::<T>::zero(); dim * dim];
        for q in 0..2 {
            for d in 0..m {
                for j in 0..n {
                    let q_out = if is_marked[j] { 1 - q } else { q };
                    oracle[idx(q_out, d, j) * dim + idx(q, d, j)] = one;
                }
            }
        }

        // Traversing coin on the control-0 sector, identity elsewhere.
        let cm = coin.matrix();
        let mut coin0 = vec![Complex::<T>::zero(); dim * dim];
        for j in 0..n {
            for r in 0..m {
                for c in 0..m {
                    coin0[idx(0, r, j) * dim + idx(0, c, j)] = cm[r * m + c];
                }
            }
        }
        for d in 0..m {
            for j in 0..n {
                coin0[idx(1, d, j) * dim + idx(1, d, j)] = one;
            }
        }

        // Marking coin: minus identity on the control-1 sector.
        let mut coin1 = vec![Complex::<T>::zero(); dim * dim];
        for d in 0..m {
            for j in 0..n {
                coin1[idx(0, d, j) * dim + idx(0, d, j)] = one;
                coin1[idx(1, d, j) * dim + idx(1, d, j)] = -one;
            }
        }

        // Shift, acting identically on both control sectors.
        let mut shift = vec![Complex::<T>::zero(); dim * dim];
        for q in 0..2 {
            for d in 0..m {
                for j in 0..n {
                    shift[idx(q, d, j ^ (1 << d)) * dim + idx(q, d, j)] = one;
                }
            }
        }

        Ok(DenseReference {
            m,
            n,
            dim,
            oracle,
            coin0,
            coin1,
            shift,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Control in `|0>`, directions and nodes in the uniform superposition.
    pub fn initial_state(&self) -> Vec<Complex<T>> {
        let mut state = vec![Complex::<T>::zero(); self.dim];
        let amp = T::one() / cf::<T>((self.m * self.n) as f64).sqrt();
        for entry in state.iter_mut().take(self.m * self.n) {
            *entry = Complex::new(amp, T::zero());
        }
        state
    }

    /// One full iteration: the factor matrices applied right-to-left.
    pub fn iterate(&self, state: Vec<Complex<T>>) -> Vec<Complex<T>> {
        let state = matvec(&self.oracle, &state);
        let state = matvec(&self.coin1, &state);
        let state = matvec(&self.coin0, &state);
        let state = matvec(&self.oracle, &state);
        matvec(&self.shift, &state)
    }

    /// Runs `iterations` full iterations from the initial state.
    pub fn run(&self, iterations: usize) -> Vec<Complex<T>> {
        let mut state = self.initial_state();
        for _ in 0..iterations {
            state = self.iterate(state);
        }
        state
    }

    /// The control-0 sector of a dense state (the part mirrored by the fast
    /// path).
    pub fn walk_sector<'a>(&self, state: &'a [Complex<T>]) -> &'a [Complex<T>] {
        &state[..self.m * self.n]
    }

    /// Largest amplitude magnitude left in the control-1 sector; zero up to
    /// rounding at iteration boundaries.
    pub fn control_residual(&self, state: &[Complex<T>]) -> T {
        state[self.m * self.n..]
            .iter()
            .map(|a| a.norm())
            .fold(T::zero(), |acc, x| if x > acc { x } else { acc })
    }

    /// The fully multiplied-out iteration matrix `(I (x) S) O C0 C1 O`.
    /// Quadratic storage — intended for small cross-checks only.
    pub fn iteration_matrix(&self) -> Vec<Complex<T>> {
        let a = matmul(&self.coin1, &self.oracle, self.dim);
        let b = matmul(&self.coin0, &a, self.dim);
        let c = matmul(&self.oracle, &b, self.dim);
        matmul(&self.shift, &c, self.dim)
    }
}

/// Dense block-diagonal matrix of the conditional coin on the control-free
/// `m * 2^m` space: traversing-coin block per unmarked node, minus identity
/// per marked node. Index layout matches [`WalkState`] (direction-major).
pub fn conditional_coin_matrix<T: WalkFloat>(
    coin: &HouseholderCoin<T>,
    marked: &[usize],
) -> Vec<Complex<T>> {
    let m = coin.m();
    let n = 1usize << m;
    let dim = m * n;
    let cm = coin.matrix();
    let one = Complex::new(T::one(), T::zero());
    let mut is_marked = vec![false; n];
    for &h in marked {
        is_marked[h] = true;
    }
    let mut out = vec![Complex::<T>::zero(); dim * dim];
    for j in 0..n {
        if is_marked[j] {
            for d in 0..m {
                out[(d * n + j) * dim + (d * n + j)] = -one;
            }
        } else {
            for r in 0..m {
                for c in 0..m {
                    out[(r * n + j) * dim + (c * n + j)] = cm[r * m + c];
                }
            }
        }
    }
    out
}

/// Compares a dense state's walk sector against a fast-path state; returns
/// the maximum absolute amplitude difference.
pub fn max_amplitude_deviation<T: WalkFloat>(
    dense_walk_sector: &[Complex<T>],
    fast: &WalkState<T>,
) -> T {
    dense_walk_sector
        .iter()
        .zip(fast.amplitudes())
        .map(|(a, b)| (*a - *b).norm())
        .fold(T::zero(), |acc, x| if x > acc { x } else { acc })
}
