//! Generalized Householder coin and the `zeta(phi)` dependence laws.
//!
//! The traversing coin acting on the m-dimensional direction register is the
//! rank-one unitary update
//!
//! ```text
//! C0(phi, zeta) = e^{i zeta} (I - (1 - e^{i phi}) |chi><chi|)
//! ```
//!
//! with `|chi>` the uniform superposition over the m directions. `phi = zeta =
//! pi` recovers the Grover diffusion coin. The four dependence laws constrain
//! `zeta` as a function of `phi` along the high-success-probability stripe of
//! the two-phase landscape; the machine-learned variant takes an external
//! per-size coefficient `alpha`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::{cf, QrwsError, WalkFloat};

/// Phase-dependence law selecting `zeta` from `phi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DependenceLaw {
    /// `zeta = pi` regardless of `phi`.
    Const,
    /// `zeta = -2 phi + 3 pi`.
    Linear,
    /// `zeta = -2 phi + 3 pi - sin(2 phi) / (2 pi)`.
    NlFixed,
    /// `zeta = -2 phi + 3 pi + alpha sin(2 phi)` with an externally supplied
    /// per-size `alpha`.
    NlMl,
}

impl DependenceLaw {
    /// All four laws, in presentation order.
    pub const ALL: [DependenceLaw; 4] = [
        DependenceLaw::Const,
        DependenceLaw::Linear,
        DependenceLaw::NlFixed,
        DependenceLaw::NlMl,
    ];

    /// The name used on the command line and in artifact files.
    pub fn cli_name(&self) -> &'static str {
        match self {
            DependenceLaw::Const => "const",
            DependenceLaw::Linear => "linear",
            DependenceLaw::NlFixed => "nl-fixed",
            DependenceLaw::NlMl => "nl-ml",
        }
    }

    /// Whether this law needs an `alpha` coefficient.
    pub fn requires_alpha(&self) -> bool {
        matches!(self, DependenceLaw::NlMl)
    }

    /// Evaluates `zeta(phi)`.
    ///
    /// `alpha` is consulted only by [`DependenceLaw::NlMl`]; passing `None`
    /// for that law is an error, passing `Some` for any other law is ignored.
    pub fn zeta<T: WalkFloat>(&self, phi: T, alpha: Option<T>) -> Result<T, QrwsError> {
        let pi = T::PI();
        let three_pi = pi + pi + pi;
        let two = cf::<T>(2.0);
        Ok(match self {
            DependenceLaw::Const => pi,
            DependenceLaw::Linear => three_pi - two * phi,
            DependenceLaw::NlFixed => three_pi - two * phi - (two * phi).sin() / (two * pi),
            DependenceLaw::NlMl => {
                let a = alpha.ok_or(QrwsError::InvalidParameter {
                    name: "alpha",
                    reason: "law nl-ml requires an alpha coefficient".into(),
                })?;
                three_pi - two * phi + a * (two * phi).sin()
            }
        })
    }
}

impl fmt::Display for DependenceLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for DependenceLaw {
    type Err = QrwsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "const" => Ok(DependenceLaw::Const),
            "linear" => Ok(DependenceLaw::Linear),
            "nl-fixed" => Ok(DependenceLaw::NlFixed),
            "nl-ml" => Ok(DependenceLaw::NlMl),
            other => Err(QrwsError::UnknownLaw(other.to_string())),
        }
    }
}

/// Evaluates the dependence law; free-function form of [`DependenceLaw::zeta`].
pub fn zeta_of_phi<T: WalkFloat>(
    law: DependenceLaw,
    phi: T,
    alpha: Option<T>,
) -> Result<T, QrwsError> {
    law.zeta(phi, alpha)
}

/// Per-register-size table of `alpha` coefficients for the machine-learned
/// law.
///
/// The coefficients are produced by an external optimization over the
/// robustness window and supplied as a JSON object mapping the register size
/// to the coefficient, e.g. `{"6": -0.159, "8": -0.218}`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AlphaTable {
    map: BTreeMap<usize, f64>,
}

impl AlphaTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, m: usize, alpha: f64) {
        self.map.insert(m, alpha);
    }

    pub fn get(&self, m: usize) -> Option<f64> {
        self.map.get(&m).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.map.iter().map(|(&m, &a)| (m, a))
    }

    /// Looks up the coefficient for `m`, failing fast when absent.
    pub fn resolve<T: WalkFloat>(&self, m: usize) -> Result<T, QrwsError> {
        let a = self.get(m).ok_or(QrwsError::MissingAlpha { m })?;
        Ok(cf::<T>(a))
    }

    /// Parses a `{"m": alpha}` JSON object.
    pub fn from_json_str(text: &str) -> Result<Self, QrwsError> {
        let raw: BTreeMap<String, f64> =
            serde_json::from_str(text).map_err(|e| QrwsError::InvalidParameter {
                name: "alpha_table",
                reason: format!("expected a JSON object mapping m to alpha: {e}"),
            })?;
        let mut table = AlphaTable::new();
        for (key, value) in raw {
            let m: usize = key.parse().map_err(|_| QrwsError::InvalidParameter {
                name: "alpha_table",
                reason: format!("key `{key}` is not a register size"),
            })?;
            table.insert(m, value);
        }
        Ok(table)
    }

    /// The coefficients shipped with the crate (`data/alpha_ml.json`), tuned
    /// per register size to widen the stability window of the `nl-ml` law.
    pub fn builtin() -> &'static AlphaTable {
        static TABLE: OnceLock<AlphaTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            AlphaTable::from_json_str(include_str!("../../../data/alpha_ml.json"))
                .expect("embedded alpha table must parse")
        })
    }
}

/// The generalized Householder coin `e^{i zeta} (I - (1 - e^{i phi})
/// |chi><chi|)` acting on an m-dimensional direction register.
///
/// `phi` and `zeta` are kept exactly as given; they are reduced modulo `2 pi`
/// only when forming the complex exponentials, so callers may use unreduced
/// law outputs (the linear law leaves `(0, 2 pi)` for small `phi`) without
/// accuracy surprises.
#[derive(Debug, Clone, Copy)]
pub struct HouseholderCoin<T: WalkFloat> {
    m: usize,
    phi: T,
    zeta: T,
    /// `e^{i zeta}`.
    phase: Complex<T>,
    /// `(1 - e^{i phi}) / m`.
    weight: Complex<T>,
}

fn unit_phasor<T: WalkFloat>(angle: T) -> Complex<T> {
    let two_pi = T::PI() + T::PI();
    let mut reduced = angle % two_pi;
    if reduced < T::zero() {
        reduced += two_pi;
    }
    Complex::new(reduced.cos(), reduced.sin())
}

impl<T: WalkFloat> HouseholderCoin<T> {
    /// Builds the coin. `m` is the direction-register dimension (at least 1);
    /// both phases must be finite.
    pub fn new(m: usize, phi: T, zeta: T) -> Result<Self, QrwsError> {
        if m == 0 {
            return Err(QrwsError::InvalidParameter {
                name: "m",
                reason: "coin dimension must be at least 1".into(),
            });
        }
        if !phi.is_finite() || !zeta.is_finite() {
            return Err(QrwsError::InvalidParameter {
                name: "phi/zeta",
                reason: "coin phases must be finite".into(),
            });
        }
        let one = Complex::new(T::one(), T::zero());
        let m_scalar = cf::<T>(m as f64);
        let weight = (one - unit_phasor(phi)) / m_scalar;
        Ok(HouseholderCoin {
            m,
            phi,
            zeta,
            phase: unit_phasor(zeta),
            weight,
        })
    }

    /// The Grover diffusion coin, `phi = zeta = pi`.
    pub fn grover(m: usize) -> Result<Self, QrwsError> {
        Self::new(m, T::PI(), T::PI())
    }

    /// Builds the coin with `zeta` tied to `phi` through a dependence law.
    pub fn from_law(
        m: usize,
        phi: T,
        law: DependenceLaw,
        alpha: Option<T>,
    ) -> Result<Self, QrwsError> {
        let zeta = law.zeta(phi, alpha)?;
        Self::new(m, phi, zeta)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn phi(&self) -> T {
        self.phi
    }

    pub fn zeta(&self) -> T {
        self.zeta
    }

    /// `e^{i zeta}` — the global phase factor.
    pub fn phase(&self) -> Complex<T> {
        self.phase
    }

    /// `(1 - e^{i phi}) / m` — the rank-one update weight, already divided by
    /// the register dimension.
    pub fn weight(&self) -> Complex<T> {
        self.weight
    }

    /// Applies the coin in place to one direction-register block of length
    /// `m`.
    pub fn apply_block(&self, block: &mut [Complex<T>]) {
        debug_assert_eq!(block.len(), self.m);
        let sum: Complex<T> = block.iter().copied().sum();
        let shift = self.weight * sum;
        for amp in block.iter_mut() {
            *amp = self.phase * (*amp - shift);
        }
    }

    /// The dense m-by-m coin matrix, row-major.
    pub fn matrix(&self) -> Vec<Complex<T>> {
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.m * self.m];
        let diag = self.phase * (Complex::new(T::one(), T::zero()) - self.weight);
        let off = -self.phase * self.weight;
        for r in 0..self.m {
            for c in 0..self.m {
                out[r * self.m + c] = if r == c { diag } else { off };
            }
        }
        out
    }
}

/// Applies `coin` to one direction-register block; free-function form of
/// [`HouseholderCoin::apply_block`].
pub fn apply_householder_block<T: WalkFloat>(coin: &HouseholderCoin<T>, block: &mut [Complex<T>]) {
    coin.apply_block(block)
}

/// The dense coin matrix; free-function form of [`HouseholderCoin::matrix`].
pub fn coin_matrix<T: WalkFloat>(coin: &HouseholderCoin<T>) -> Vec<Complex<T>> {
    coin.matrix()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn grover_coin_m2_is_the_swap_matrix() {
        let coin = HouseholderCoin::<f64>::grover(2).unwrap();
        let m = coin.matrix();
        let expect = [0.0, 1.0, 1.0, 0.0];
        for (entry, want) in m.iter().zip(expect) {
            assert_abs_diff_eq!(entry.re, want, epsilon = 1e-15);
            assert_abs_diff_eq!(entry.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_phases_give_the_identity() {
        let coin = HouseholderCoin::<f64>::new(4, 0.0, 0.0).unwrap();
        let m = coin.matrix();
        for r in 0..4 {
            for c in 0..4 {
                let want = if r == c { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(m[r * 4 + c].re, want, epsilon = 1e-15);
                assert_abs_diff_eq!(m[r * 4 + c].im, 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn coin_is_unitary() {
        for &(phi, zeta) in &[(0.7, 2.9), (PI, PI), (5.5, 0.3), (2.0, -4.0)] {
            let coin = HouseholderCoin::<f64>::new(5, phi, zeta).unwrap();
            let m = coin.matrix();
            for r in 0..5 {
                for c in 0..5 {
                    let mut acc = num_complex::Complex64::new(0.0, 0.0);
                    for k in 0..5 {
                        acc += m[r * 5 + k] * m[c * 5 + k].conj();
                    }
                    let want = if r == c { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(acc.re, want, epsilon = 1e-14);
                    assert_abs_diff_eq!(acc.im, 0.0, epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn negating_both_phases_conjugates_the_coin() {
        let a = HouseholderCoin::<f64>::new(3, 1.3, 2.1).unwrap().matrix();
        let b = HouseholderCoin::<f64>::new(3, -1.3, -2.1).unwrap().matrix();
        for (x, y) in a.iter().zip(&b) {
            assert_abs_diff_eq!(x.re, y.re, epsilon = 1e-14);
            assert_abs_diff_eq!(x.im, -y.im, epsilon = 1e-14);
        }
    }

    #[test]
    fn apply_block_matches_the_dense_matrix() {
        let coin = HouseholderCoin::<f64>::new(5, 2.2, 4.7).unwrap();
        let m = coin.matrix();
        let mut block: Vec<num_complex::Complex64> = (0..5)
            .map(|i| num_complex::Complex64::new(0.3 + 0.11 * i as f64, -0.2 + 0.07 * i as f64))
            .collect();
        let mut dense = vec![num_complex::Complex64::new(0.0, 0.0); 5];
        for r in 0..5 {
            for c in 0..5 {
                dense[r] += m[r * 5 + c] * block[c];
            }
        }
        coin.apply_block(&mut block);
        for (fast, slow) in block.iter().zip(&dense) {
            assert_abs_diff_eq!(fast.re, slow.re, epsilon = 1e-14);
            assert_abs_diff_eq!(fast.im, slow.im, epsilon = 1e-14);
        }
    }

    #[test]
    fn dependence_laws_match_reference_values() {
        // Reference values computed with an independent implementation.
        let cases: &[(DependenceLaw, f64, Option<f64>, f64)] = &[
            (DependenceLaw::Const, 0.5, None, 3.1415926535897931),
            (DependenceLaw::Const, 5.0, None, 3.1415926535897931),
            (DependenceLaw::Linear, 0.5, None, 8.4247779607693793),
            (DependenceLaw::Linear, 2.5, None, 4.4247779607693793),
            (DependenceLaw::Linear, 5.0, None, -0.57522203923062065),
            (DependenceLaw::NlFixed, 0.5, None, 8.2908536940687974),
            (DependenceLaw::NlFixed, 2.5, None, 4.5773954991328285),
            (DependenceLaw::NlFixed, 5.0, None, -0.48863839028623335),
            (DependenceLaw::NlMl, 0.5, Some(-0.218), 8.2413372860812579),
            (DependenceLaw::NlMl, 2.5, Some(-0.218), 4.6338234526459434),
            (DependenceLaw::NlMl, 5.0, Some(-0.218), -0.45662543705673803),
        ];
        for &(law, phi, alpha, want) in cases {
            let got = zeta_of_phi(law, phi, alpha).unwrap();
            assert_abs_diff_eq!(got, want, epsilon = 1e-14);
        }
    }

    #[test]
    fn nl_ml_without_alpha_fails_fast() {
        assert!(zeta_of_phi::<f64>(DependenceLaw::NlMl, 1.0, None).is_err());
    }

    #[test]
    fn law_names_round_trip() {
        for law in DependenceLaw::ALL {
            assert_eq!(law.cli_name().parse::<DependenceLaw>().unwrap(), law);
        }
        assert!(matches!(
            "grover".parse::<DependenceLaw>(),
            Err(QrwsError::UnknownLaw(_))
        ));
    }

    #[test]
    fn builtin_alpha_table_covers_the_simulated_sizes() {
        let table = AlphaTable::builtin();
        for m in 4..=11 {
            assert!(table.get(m).is_some(), "alpha missing for m={m}");
        }
        assert_abs_diff_eq!(
            table.get(6).unwrap(),
            -std::f64::consts::FRAC_1_PI / 2.0,
            epsilon = 1e-15
        );
        assert!(matches!(
            table.resolve::<f64>(99),
            Err(QrwsError::MissingAlpha { m: 99 })
        ));
    }

    #[test]
    fn alpha_table_rejects_malformed_json() {
        assert!(AlphaTable::from_json_str("[1,2]").is_err());
        assert!(AlphaTable::from_json_str("{\"x\": 0.1}").is_err());
        let ok = AlphaTable::from_json_str("{\"6\": -0.159}").unwrap();
        assert_eq!(ok.get(6), Some(-0.159));
    }
}
