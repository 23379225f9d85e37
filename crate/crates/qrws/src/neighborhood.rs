//! Hamming-neighborhood combinatorics and the neighbor-measurement
//! aggregates.
//!
//! Measuring the walk output at the marked node alone gives `P_W`; also
//! accepting the first (and second) Hamming neighbors gives `P_F` (`P_S`).
//! Orders above 2 are enumerable via [`hamming_neighbors`] but deliberately
//! not aggregated — their probability mass does not justify the extra
//! measurements.

use serde::{Deserialize, Serialize};

use crate::walk::iteration_count;
use crate::{cf, to_f64, QrwsError, WalkFloat};

/// Number of nodes at Hamming distance exactly `o` from any fixed node:
/// the binomial coefficient `m choose o`.
pub fn neighbor_count(m: usize, o: usize) -> Result<usize, QrwsError> {
    if o > m {
        return Err(QrwsError::ShellOrder { order: o, m });
    }
    let o = o.min(m - o.min(m));
    let mut acc: u128 = 1;
    for i in 0..o {
        acc = acc * (m - i) as u128 / (i + 1) as u128;
    }
    Ok(acc as usize)
}

/// All nodes at Hamming distance exactly `o` from `j`, sorted ascending.
pub fn hamming_neighbors(j: usize, m: usize, o: usize) -> Result<Vec<usize>, QrwsError> {
    let n = 1usize << m;
    if j >= n {
        return Err(QrwsError::MarkedVertex {
            marked: j,
            m,
            size: n,
        });
    }
    if o > m {
        return Err(QrwsError::ShellOrder { order: o, m });
    }
    if o == 0 {
        return Ok(vec![j]);
    }
    // Enumerate all masks of popcount o (Gosper's hack), XOR onto j.
    let mut out = Vec::with_capacity(neighbor_count(m, o)?);
    let mut mask: usize = (1 << o) - 1;
    while mask < n {
        out.push(j ^ mask);
        let low = mask & mask.wrapping_neg();
        let carry = mask + low;
        if carry >= n {
            break;
        }
        mask = carry | (((mask ^ carry) / low) >> 2);
    }
    out.sort_unstable();
    Ok(out)
}

/// Probability mass split by Hamming shell around the marked node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborAggregate<T: WalkFloat> {
    /// `P_W` — probability at the marked node itself.
    pub p_marked: T,
    /// Summed probability over the first Hamming shell.
    pub p_first_sum: T,
    /// Summed probability over the second Hamming shell.
    pub p_second_sum: T,
    /// Everything at Hamming distance 3 or more.
    pub residue: T,
    /// Node counts per shell: marked, first, second, remainder.
    pub counts: [usize; 4],
}

impl<T: WalkFloat> NeighborAggregate<T> {
    /// `P_W`.
    pub fn p_w(&self) -> T {
        self.p_marked
    }

    /// `P_F = P_W + first-shell sum`.
    pub fn p_f(&self) -> T {
        self.p_marked + self.p_first_sum
    }

    /// `P_S = P_F + second-shell sum`.
    pub fn p_s(&self) -> T {
        self.p_f() + self.p_second_sum
    }
}

/// Splits a node distribution into marked / first / second / remainder
/// probability around `marked`.
pub fn aggregate<T: WalkFloat>(
    distribution: &[T],
    marked: usize,
    m: usize,
) -> Result<NeighborAggregate<T>, QrwsError> {
    let n = 1usize << m;
    if distribution.len() != n {
        return Err(QrwsError::InvalidParameter {
            name: "distribution",
            reason: format!("length {} does not match 2^{m} = {n}", distribution.len()),
        });
    }
    if marked >= n {
        return Err(QrwsError::MarkedVertex {
            marked,
            m,
            size: n,
        });
    }
    let total: T = distribution.iter().copied().sum();
    if to_f64((total - T::one()).abs()) > 1e-9 {
        return Err(QrwsError::NotNormalized {
            total: to_f64(total),
            tolerance: 1e-9,
        });
    }
    let mut sums = [T::zero(); 4];
    let mut counts = [0usize; 4];
    for (j, &p) in distribution.iter().enumerate() {
        let shell = ((j ^ marked).count_ones() as usize).min(3);
        sums[shell] += p;
        counts[shell] += 1;
    }
    Ok(NeighborAggregate {
        p_marked: sums[0],
        p_first_sum: sums[1],
        p_second_sum: sums[2],
        residue: sums[3],
        counts,
    })
}

/// Measurement strategy: which shells get measured classically after the
/// walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasurementStrategy {
    /// Marked node only.
    None,
    /// Marked node plus first neighbors.
    First,
    /// Marked node plus first and second neighbors.
    Second,
}

impl std::str::FromStr for MeasurementStrategy {
    type Err = QrwsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(MeasurementStrategy::None),
            "first" => Ok(MeasurementStrategy::First),
            "second" => Ok(MeasurementStrategy::Second),
            other => Err(QrwsError::InvalidParameter {
                name: "strategy",
                reason: format!("unknown measurement strategy `{other}`"),
            }),
        }
    }
}

/// Cost summary of one search run under a measurement strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementBudget {
    /// Classical measurements per run: 1, 1+m, or 1+m+m(m-1)/2.
    pub classical_measurements: usize,
    /// Oracle calls in the quantum part: 2 per iteration.
    pub oracle_calls_per_run: usize,
    /// Step budget with the classical measurements counted as steps
    /// alongside the iterations (the neighbor-measurement cost accounting).
    pub effective_step_count: usize,
}

/// Budgets for running the search and measuring under `strategy`.
pub fn measurement_budget(m: usize, strategy: MeasurementStrategy) -> Result<MeasurementBudget, QrwsError> {
    if m < 2 {
        return Err(QrwsError::RegisterSize { m, min: 2, max: crate::walk::MAX_M });
    }
    let k = iteration_count(m);
    let extra = match strategy {
        MeasurementStrategy::None => 0,
        MeasurementStrategy::First => m,
        MeasurementStrategy::Second => m + m * (m - 1) / 2,
    };
    Ok(MeasurementBudget {
        classical_measurements: 1 + extra,
        oracle_calls_per_run: 2 * k,
        effective_step_count: k + extra,
    })
}

/// Uniform-distribution helper used by tests and the report: the aggregate of
/// the flat distribution is just the shell counts over `2^m`.
pub fn uniform_aggregate<T: WalkFloat>(m: usize) -> Result<NeighborAggregate<T>, QrwsError> {
    let n = 1usize << m;
    let p = T::one() / cf::<T>(n as f64);
    let dist = vec![p; n];
    aggregate(&dist, 0, m)
}
