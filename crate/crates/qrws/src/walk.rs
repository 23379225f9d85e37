//! Walk state, iteration operators, and the standard / alternating runners.
//!
//! The register is the product of an m-dimensional direction (coin) space and
//! the 2^m hypercube nodes. Amplitudes are stored direction-major:
//! `amps[d * 2^m + j]` holds `psi(d, j)`. The oracle control qubit is not
//! stored — the oracle-coin-oracle sandwich of one search iteration acts on
//! the retained registers as a *conditional coin*: the traversing coin on the
//! blocks of unmarked nodes and minus identity on marked blocks. This is
//! exact and the control provably returns to its initial state after every
//! iteration (the dense reference in [`crate::dense`] keeps the control qubit
//! and confirms the equivalence).

use num_complex::Complex;
use num_traits::Zero;

use crate::coin::HouseholderCoin;
use crate::{cf, to_f64, QrwsError, WalkFloat};

/// Largest supported register size; the state takes `m * 2^m` complex
/// entries, which is already ~0.5 GiB at m = 24.
pub const MAX_M: usize = 30;

/// Validates a register size for walk construction.
fn check_m(m: usize) -> Result<(), QrwsError> {
    if !(2..=MAX_M).contains(&m) {
        return Err(QrwsError::RegisterSize {
            m,
            min: 2,
            max: MAX_M,
        });
    }
    Ok(())
}

/// State vector of the walk: `m * 2^m` complex amplitudes, direction-major.
#[derive(Debug, Clone)]
pub struct WalkState<T: WalkFloat> {
    m: usize,
    n: usize,
    amps: Vec<Complex<T>>,
}

impl<T: WalkFloat> WalkState<T> {
    /// Uniform superposition over directions and nodes: every amplitude
    /// `1/sqrt(m * 2^m)`.
    pub fn uniform(m: usize) -> Result<Self, QrwsError> {
        check_m(m)?;
        let n = 1usize << m;
        let amp = T::one() / cf::<T>((m * n) as f64).sqrt();
        Ok(WalkState {
            m,
            n,
            amps: vec![Complex::new(amp, T::zero()); m * n],
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of hypercube nodes, `2^m`.
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amps
    }

    /// Amplitude `psi(d, j)`.
    pub fn amplitude(&self, d: usize, j: usize) -> Complex<T> {
        self.amps[d * self.n + j]
    }

    /// Squared norm of the state (1 up to rounding for any walk product).
    pub fn norm_squared(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Node marginal `p(j) = sum_d |psi(d, j)|^2`.
    pub fn node_distribution(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.n];
        for d in 0..self.m {
            let row = &self.amps[d * self.n..(d + 1) * self.n];
            for (p, a) in out.iter_mut().zip(row) {
                *p += a.norm_sqr();
            }
        }
        out
    }

    /// Total probability on a set of nodes.
    pub fn probability_of(&self, nodes: &[usize]) -> T {
        let mut p = T::zero();
        for &j in nodes {
            for d in 0..self.m {
                p += self.amps[d * self.n + j].norm_sqr();
            }
        }
        p
    }

    /// Applies the oracle-sandwiched coin pair of one search iteration: the
    /// traversing coin on every unmarked node block, minus identity on marked
    /// blocks.
    pub fn apply_conditional_coin(&mut self, coin: &HouseholderCoin<T>, marked: &[usize]) {
        debug_assert_eq!(coin.m(), self.m);
        // Save the marked columns, run the uniform coin pass over everything,
        // then overwrite the marked columns with their negation. Cheaper than
        // branching per node in the hot loop.
        let mut saved = Vec::with_capacity(marked.len() * self.m);
        for &h in marked {
            for d in 0..self.m {
                saved.push(self.amps[d * self.n + h]);
            }
        }
        self.apply_coin_everywhere(coin);
        let mut it = saved.into_iter();
        for &h in marked {
            for d in 0..self.m {
                self.amps[d * self.n + h] = -it.next().expect("saved amplitude");
            }
        }
    }

    /// Applies the traversing coin to every node block (no oracle anywhere).
    pub fn apply_coin_everywhere(&mut self, coin: &HouseholderCoin<T>) {
        debug_assert_eq!(coin.m(), self.m);
        let phase = coin.phase();
        let weight = coin.weight();
        let mut colsum = vec![Complex::<T>::zero(); self.n];
        for d in 0..self.m {
            let row = &self.amps[d * self.n..(d + 1) * self.n];
            for (s, a) in colsum.iter_mut().zip(row) {
                *s += *a;
            }
        }
        for d in 0..self.m {
            let row = &mut self.amps[d * self.n..(d + 1) * self.n];
            for (a, s) in row.iter_mut().zip(&colsum) {
                *a = phase * (*a - weight * *s);
            }
        }
    }

    /// Hypercube shift: amplitude at `(d, j)` moves to `(d, j XOR 2^d)`.
    /// Exact permutation.
    pub fn apply_shift(&mut self) {
        for d in 0..self.m {
            let bit = 1usize << d;
            let row = &mut self.amps[d * self.n..(d + 1) * self.n];
            for j in 0..self.n {
                if j & bit == 0 {
                    row.swap(j, j | bit);
                }
            }
        }
    }

    /// One full search iteration: conditional coin, then shift. Costs two
    /// oracle calls.
    pub fn standard_iteration(&mut self, coin: &HouseholderCoin<T>, marked: &[usize]) {
        self.apply_conditional_coin(coin, marked);
        self.apply_shift();
    }

    /// One oracle-free step for the even iterations of the alternating
    /// runner.
    pub fn walk_only_iteration(&mut self, coin: &HouseholderCoin<T>, variant: WalkOnlyVariant) {
        self.apply_coin_everywhere(coin);
        if variant == WalkOnlyVariant::WithShift {
            self.apply_shift();
        }
    }
}

/// Shape of the oracle-free even step of the alternating runner.
///
/// The coin-only form leaves the node marginal untouched (the coin is
/// block-diagonal in the node index), which stalls the search: an alternating
/// run at the Grover point cycles back to its start every two iterations and
/// the marked-node probability never grows. The default therefore completes
/// the step with the shift, which empirically reproduces the standard
/// runner's marked-node probability with half the oracle calls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkOnlyVariant {
    /// Coin on every block; no shift, no oracle.
    Literal,
    /// Coin on every block, then the shift (default).
    WithShift,
}

impl Default for WalkOnlyVariant {
    fn default() -> Self {
        WalkOnlyVariant::WithShift
    }
}

/// Runner selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    Standard,
    Alternating,
}

impl Default for RunMode {
    fn default() -> Self {
        RunMode::Standard
    }
}

/// Full description of one run.
#[derive(Debug, Clone)]
pub struct RunConfig<T: WalkFloat> {
    pub m: usize,
    /// Marked node set (sorted, deduplicated by [`RunConfig::validate`]).
    pub marked: Vec<usize>,
    pub phi: T,
    pub zeta: T,
    /// `None` selects the size-derived budget: [`iteration_count`] for the
    /// standard runner, rounded down to even for the alternating runner.
    pub iterations: Option<usize>,
    pub mode: RunMode,
    pub alternating_variant: WalkOnlyVariant,
}

impl<T: WalkFloat> RunConfig<T> {
    pub fn new(m: usize, marked: Vec<usize>, phi: T, zeta: T) -> Self {
        RunConfig {
            m,
            marked,
            phi,
            zeta,
            iterations: None,
            mode: RunMode::Standard,
            alternating_variant: WalkOnlyVariant::default(),
        }
    }

    pub fn with_iterations(mut self, iterations: Option<usize>) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn with_mode(mut self, mode: RunMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_variant(mut self, variant: WalkOnlyVariant) -> Self {
        self.alternating_variant = variant;
        self
    }

    /// Checks ranges and normalizes the marked set (sorted, unique).
    pub fn validate(&mut self) -> Result<(), QrwsError> {
        check_m(self.m)?;
        let n = 1usize << self.m;
        self.marked.sort_unstable();
        self.marked.dedup();
        if let Some(&bad) = self.marked.iter().find(|&&h| h >= n) {
            return Err(QrwsError::MarkedVertex {
                marked: bad,
                m: self.m,
                size: n,
            });
        }
        if !self.phi.is_finite() || !self.zeta.is_finite() {
            return Err(QrwsError::InvalidParameter {
                name: "phi/zeta",
                reason: "coin phases must be finite".into(),
            });
        }
        Ok(())
    }

    fn coin(&self) -> Result<HouseholderCoin<T>, QrwsError> {
        HouseholderCoin::new(self.m, self.phi, self.zeta)
    }

    fn budget(&self) -> usize {
        match self.iterations {
            Some(t) => t,
            None => match self.mode {
                RunMode::Standard => iteration_count(self.m),
                // Even totals pair every oracle iteration with a free one;
                // odd totals leave a dangling oracle step that destroys the
                // agreement with the standard runner.
                RunMode::Alternating => iteration_count(self.m) / 2 * 2,
            },
        }
    }
}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct SimulationResult<T: WalkFloat> {
    /// Final node marginal, length `2^m`.
    pub distribution: Vec<T>,
    /// Probability on the marked set after each iteration (length =
    /// `iterations_run`).
    pub trace: Vec<T>,
    pub oracle_calls: usize,
    pub iterations_run: usize,
    /// Final state, for callers that need amplitudes.
    pub state: WalkState<T>,
}

impl<T: WalkFloat> SimulationResult<T> {
    /// Probability on the marked set in the final state.
    pub fn marked_probability(&self, marked: &[usize]) -> T {
        marked.iter().map(|&j| self.distribution[j]).sum()
    }
}

/// Number of iterations after which the marked-node probability first peaks:
/// `ceil(pi/2 * sqrt(2^(m-1)))`.
pub fn iteration_count(m: usize) -> usize {
    let half = 2f64.powi(m as i32 - 1);
    (std::f64::consts::FRAC_PI_2 * half.sqrt()).ceil() as usize
}

/// The uniform starting state; free-function form of [`WalkState::uniform`].
pub fn uniform_initial_state<T: WalkFloat>(m: usize) -> Result<WalkState<T>, QrwsError> {
    WalkState::uniform(m)
}

fn run_common<T: WalkFloat>(
    config: &RunConfig<T>,
    alternating: bool,
) -> Result<SimulationResult<T>, QrwsError> {
    let mut cfg = config.clone();
    cfg.validate()?;
    let coin = cfg.coin()?;
    let total = cfg.budget();
    let mut state = WalkState::<T>::uniform(cfg.m)?;
    let mut trace = Vec::with_capacity(total);
    let mut oracle_calls = 0usize;
    for t in 1..=total {
        if alternating && t % 2 == 0 {
            state.walk_only_iteration(&coin, cfg.alternating_variant);
        } else {
            state.standard_iteration(&coin, &cfg.marked);
            oracle_calls += 2;
        }
        trace.push(state.probability_of(&cfg.marked));
    }
    let distribution = state.node_distribution();
    let total_p: T = distribution.iter().copied().sum();
    let drift = (total_p - T::one()).abs();
    if to_f64(drift) > 1e-9 {
        return Err(QrwsError::NotNormalized {
            total: to_f64(total_p),
            tolerance: 1e-9,
        });
    }
    Ok(SimulationResult {
        distribution,
        trace,
        oracle_calls,
        iterations_run: total,
        state,
    })
}

/// Runs the standard search: uniform start, then `iterations` (or the
/// size-derived budget) of conditional coin + shift.
pub fn run_standard<T: WalkFloat>(config: &RunConfig<T>) -> Result<SimulationResult<T>, QrwsError> {
    run_common(config, false)
}

/// Runs the alternating search: the oracle-sandwiched step on odd iterations
/// (1-based), the oracle-free step on even ones.
pub fn run_alternating<T: WalkFloat>(
    config: &RunConfig<T>,
) -> Result<SimulationResult<T>, QrwsError> {
    run_common(config, true)
}

/// Dispatches on `config.mode`.
pub fn run<T: WalkFloat>(config: &RunConfig<T>) -> Result<SimulationResult<T>, QrwsError> {
    match config.mode {
        RunMode::Standard => run_standard(config),
        RunMode::Alternating => run_alternating(config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detrand::SplitMix64;
    use approx::assert_abs_diff_eq;

    const PI: f64 = std::f64::consts::PI;

    fn grover_config(m: usize) -> RunConfig<f64> {
        RunConfig::new(m, vec![2], PI, PI)
    }

    fn random_state(m: usize, seed: u64) -> WalkState<f64> {
        let mut st = WalkState::<f64>::uniform(m).unwrap();
        let mut gen = SplitMix64::new(seed);
        let mut norm = 0.0;
        for a in st.amplitudes_mut() {
            *a = num_complex::Complex64::new(gen.next_in(-1.0, 1.0), gen.next_in(-1.0, 1.0));
            norm += a.norm_sqr();
        }
        let scale = norm.sqrt().recip();
        for a in st.amplitudes_mut() {
            *a *= scale;
        }
        st
    }

    #[test]
    fn uniform_state_has_equal_amplitudes() {
        let st = uniform_initial_state::<f64>(6).unwrap();
        assert_eq!(st.amplitudes().len(), 384);
        let expect = 1.0 / 384f64.sqrt();
        for a in st.amplitudes() {
            assert_abs_diff_eq!(a.re, expect, epsilon = 1e-16);
            assert_eq!(a.im, 0.0);
        }
        assert_abs_diff_eq!(st.norm_squared(), 1.0, epsilon = 1e-14);

        let st2 = uniform_initial_state::<f64>(2).unwrap();
        assert_eq!(st2.amplitudes().len(), 8);
        assert_abs_diff_eq!(st2.amplitude(1, 3).re, 1.0 / 8f64.sqrt(), epsilon = 1e-16);
    }

    #[test]
    fn tiny_registers_are_rejected() {
        assert!(matches!(
            uniform_initial_state::<f64>(1),
            Err(QrwsError::RegisterSize { m: 1, .. })
        ));
        assert!(uniform_initial_state::<f64>(0).is_err());
    }

    #[test]
    fn shift_moves_single_amplitude() {
        let mut st = WalkState::<f64>::uniform(3).unwrap();
        for a in st.amplitudes_mut() {
            *a = num_complex::Complex64::new(0.0, 0.0);
        }
        let n = st.node_count();
        st.amplitudes_mut()[0 * n + 5] = num_complex::Complex64::new(1.0, 0.0);
        st.apply_shift();
        assert_eq!(st.amplitude(0, 4).re, 1.0);
        assert_eq!(st.amplitude(0, 5).re, 0.0);
    }

    #[test]
    fn shift_is_an_involution() {
        let st = random_state(4, 11);
        let mut moved = st.clone();
        moved.apply_shift();
        moved.apply_shift();
        for (a, b) in st.amplitudes().iter().zip(moved.amplitudes()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn uniform_state_is_shift_invariant() {
        let mut st = WalkState::<f64>::uniform(3).unwrap();
        let before = st.amplitudes().to_vec();
        st.apply_shift();
        assert_eq!(before, st.amplitudes());
    }

    #[test]
    fn grover_coin_fixes_uniform_state_without_marks() {
        let mut st = WalkState::<f64>::uniform(4).unwrap();
        let coin = HouseholderCoin::grover(4).unwrap();
        let before = st.amplitudes().to_vec();
        st.apply_conditional_coin(&coin, &[]);
        for (a, b) in st.amplitudes().iter().zip(&before) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-14);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-14);
        }
    }

    #[test]
    fn marked_block_is_exactly_negated() {
        let mut st = random_state(3, 5);
        let coin = HouseholderCoin::new(3, 1.2, 0.7).unwrap();
        let before = st.clone();
        st.apply_conditional_coin(&coin, &[0]);
        for d in 0..3 {
            assert_eq!(st.amplitude(d, 0), -before.amplitude(d, 0));
        }
    }

    #[test]
    fn operators_preserve_the_norm() {
        let mut st = random_state(5, 99);
        let coin = HouseholderCoin::new(5, 2.8, 1.1).unwrap();
        for step in 0..20 {
            if step % 2 == 0 {
                st.apply_conditional_coin(&coin, &[3, 17]);
            } else {
                st.apply_shift();
            }
            assert_abs_diff_eq!(st.norm_squared(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn iteration_count_matches_the_formula() {
        assert_eq!(iteration_count(2), 3);
        assert_eq!(iteration_count(4), 5);
        assert_eq!(iteration_count(6), 9);
        assert_eq!(iteration_count(10), 36);
        assert_eq!(iteration_count(11), 51);
    }

    #[test]
    fn standard_run_reproduces_the_reference_peak() {
        let out = run_standard(&grover_config(6)).unwrap();
        assert_eq!(out.iterations_run, 9);
        assert_eq!(out.oracle_calls, 18);
        assert_abs_diff_eq!(out.distribution[2], 0.41176545167342693, epsilon = 1e-12);
    }

    #[test]
    fn m6_trace_matches_reference_values() {
        let cfg = grover_config(6).with_iterations(Some(18));
        let out = run_standard(&cfg).unwrap();
        let expect = [
            0.015624999999999997,
            0.085069444444444434,
            0.085069444444444434,
            0.20166752400548688,
            0.20166752400548685,
            0.33015191832207125,
            0.33015191832207141,
            0.41176545167342693,
            0.41176545167342693,
            0.38676070321522121,
            0.38676070321522121,
            0.28284336499810303,
            0.28284336499810309,
            0.20105985541676333,
            0.20105985541676347,
            0.059083179071071946,
            0.059083179071072009,
            0.0021788908755648664,
        ];
        for (got, want) in out.trace.iter().zip(expect) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn m4_trace_matches_reference_values() {
        let out = run_standard(&grover_config(4)).unwrap();
        let expect = [0.0625, 0.25, 0.25, 0.390625, 0.390625];
        assert_eq!(out.trace.len(), 5);
        for (got, want) in out.trace.iter().zip(expect) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_iterations_return_the_uniform_distribution() {
        let cfg = grover_config(6).with_iterations(Some(0));
        let out = run_standard(&cfg).unwrap();
        assert_eq!(out.oracle_calls, 0);
        assert!(out.trace.is_empty());
        for p in &out.distribution {
            assert_abs_diff_eq!(*p, 1.0 / 64.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn empty_marked_set_keeps_the_marginal_uniform() {
        let mut cfg = grover_config(5);
        cfg.marked.clear();
        let out = run_standard(&cfg).unwrap();
        assert_eq!(out.oracle_calls, 2 * out.iterations_run);
        for p in &out.distribution {
            assert_abs_diff_eq!(*p, 1.0 / 32.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn marked_choice_only_relabels_the_distribution() {
        let base = run_standard(&RunConfig::new(4, vec![0], PI, PI)).unwrap();
        let other = run_standard(&RunConfig::new(4, vec![5], PI, PI)).unwrap();
        assert_abs_diff_eq!(
            base.distribution[0],
            other.distribution[5],
            epsilon = 1e-12
        );
        for j in 0..16 {
            assert_abs_diff_eq!(
                other.distribution[j],
                base.distribution[j ^ 5],
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn alternating_with_shift_matches_marked_probability_at_half_cost() {
        let std_out = run_standard(&grover_config(4)).unwrap();
        let alt_out = run_alternating(&grover_config(4).with_mode(RunMode::Alternating)).unwrap();
        assert_eq!(alt_out.iterations_run, 4);
        assert_eq!(alt_out.oracle_calls, 4);
        assert_eq!(std_out.oracle_calls, 10);
        assert_abs_diff_eq!(
            alt_out.distribution[2],
            std_out.distribution[2],
            epsilon = 1e-12
        );
        // The full node distributions agree on the marked node but not on the
        // rest: only even Hamming shells take part in the amplification.
        // Reference deviation computed independently.
        let max_dev = alt_out
            .distribution
            .iter()
            .zip(&std_out.distribution)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert_abs_diff_eq!(max_dev, 0.046875, epsilon = 1e-12);
    }

    #[test]
    fn alternating_literal_variant_stalls_at_the_initial_probability() {
        let cfg = grover_config(4)
            .with_mode(RunMode::Alternating)
            .with_variant(WalkOnlyVariant::Literal)
            .with_iterations(Some(6));
        let out = run_alternating(&cfg).unwrap();
        for p in &out.trace {
            assert_abs_diff_eq!(*p, 0.0625, epsilon = 1e-12);
        }
    }

    #[test]
    fn literal_walk_only_step_fixes_the_uniform_state() {
        let mut st = WalkState::<f64>::uniform(6).unwrap();
        let coin = HouseholderCoin::grover(6).unwrap();
        let before = st.amplitudes().to_vec();
        st.walk_only_iteration(&coin, WalkOnlyVariant::Literal);
        for (a, b) in st.amplitudes().iter().zip(&before) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-14);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-14);
        }
    }

    #[test]
    fn with_shift_walk_only_twice_fixes_the_uniform_state() {
        let mut st = WalkState::<f64>::uniform(4).unwrap();
        let coin = HouseholderCoin::grover(4).unwrap();
        let before = st.amplitudes().to_vec();
        st.walk_only_iteration(&coin, WalkOnlyVariant::WithShift);
        st.walk_only_iteration(&coin, WalkOnlyVariant::WithShift);
        for (a, b) in st.amplitudes().iter().zip(&before) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-14);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-14);
        }
    }

    #[test]
    fn multiple_marked_nodes_are_supported() {
        let mut cfg = RunConfig::new(3, vec![1, 3, 3], PI, PI);
        cfg.validate().unwrap();
        assert_eq!(cfg.marked, vec![1, 3]);
        let out = run_standard(&cfg).unwrap();
        let direct = out.distribution[1] + out.distribution[3];
        assert_abs_diff_eq!(*out.trace.last().unwrap(), direct, epsilon = 1e-12);
    }

    #[test]
    fn out_of_range_marked_node_is_rejected() {
        let mut cfg = RunConfig::new(3, vec![8], PI, PI);
        assert!(matches!(
            cfg.validate(),
            Err(QrwsError::MarkedVertex { marked: 8, .. })
        ));
    }

    #[test]
    fn f32_run_agrees_with_f64_at_single_precision() {
        let cfg32 = RunConfig::<f32>::new(4, vec![2], std::f32::consts::PI, std::f32::consts::PI);
        let out32 = run_standard(&cfg32).unwrap();
        let out64 = run_standard(&grover_config(4)).unwrap();
        assert_abs_diff_eq!(
            out32.distribution[2] as f64,
            out64.distribution[2],
            epsilon = 1e-5
        );
    }
}
