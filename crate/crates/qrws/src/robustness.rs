//! Phase sweeps, the robustness window ε at threshold Ω, and the λ/Λ
//! interval-stability metrics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coin::DependenceLaw;
use crate::neighborhood::aggregate;
use crate::walk::{run_standard, RunConfig};
use crate::{cf, to_f64, QrwsError, WalkFloat};

/// Default robustness threshold.
pub const DEFAULT_OMEGA: f64 = 0.9;
/// Default φ grid step (radians).
pub const DEFAULT_GRID_STEP: f64 = 0.005;

/// Which success-probability aggregate a curve tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NeighborLevel {
    /// `P_W` — marked node only.
    Walk,
    /// `P_F` — marked node plus first neighbors.
    First,
    /// `P_S` — marked node plus first and second neighbors.
    Second,
}

impl NeighborLevel {
    pub const ALL: [NeighborLevel; 3] =
        [NeighborLevel::Walk, NeighborLevel::First, NeighborLevel::Second];

    pub fn cli_name(&self) -> &'static str {
        match self {
            NeighborLevel::Walk => "walk",
            NeighborLevel::First => "first",
            NeighborLevel::Second => "second",
        }
    }
}

impl std::fmt::Display for NeighborLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl std::str::FromStr for NeighborLevel {
    type Err = QrwsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "walk" | "w" => Ok(NeighborLevel::Walk),
            "first" | "f" => Ok(NeighborLevel::First),
            "second" | "s" => Ok(NeighborLevel::Second),
            other => Err(QrwsError::InvalidParameter {
                name: "level",
                reason: format!("unknown neighbor level `{other}` (walk, first, second)"),
            }),
        }
    }
}

/// The symmetric φ grid `pi + k*h` for `k in [-K, K]`, `K = ceil(pi/h) - 1`.
/// Endpoints 0 and 2π are excluded by construction and π is always on the
/// grid.
pub fn default_phi_grid<T: WalkFloat>(step: T) -> Result<Vec<T>, QrwsError> {
    let pi = T::PI();
    if !(step > T::zero() && step < pi) {
        return Err(QrwsError::InvalidParameter {
            name: "grid_step",
            reason: "step must lie in (0, pi)".into(),
        });
    }
    let k_max = (pi / step).ceil().to_i64_checked().ok_or(QrwsError::InvalidParameter {
        name: "grid_step",
        reason: "step too small for an addressable grid".into(),
    })? - 1;
    let mut out = Vec::with_capacity((2 * k_max + 1) as usize);
    for k in -k_max..=k_max {
        out.push(pi + cf::<T>(k as f64) * step);
    }
    Ok(out)
}

trait CeilToI64 {
    fn to_i64_checked(self) -> Option<i64>;
}

impl<T: WalkFloat> CeilToI64 for T {
    fn to_i64_checked(self) -> Option<i64> {
        let x = to_f64(self);
        if x.is_finite() && x.abs() < 9e15 {
            Some(x as i64)
        } else {
            None
        }
    }
}

/// One sweep sample: the coin phases and the three aggregates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow<T: WalkFloat> {
    pub phi: T,
    pub zeta: T,
    pub p_w: T,
    pub p_f: T,
    pub p_s: T,
}

/// A completed φ sweep for one `(m, law)` pair.
#[derive(Debug, Clone)]
pub struct PhiSweep<T: WalkFloat> {
    pub m: usize,
    pub law: DependenceLaw,
    pub marked: usize,
    pub rows: Vec<SweepRow<T>>,
}

impl<T: WalkFloat> PhiSweep<T> {
    /// Extracts one aggregate as a [`ProbabilityCurve`].
    pub fn curve(&self, level: NeighborLevel) -> Result<ProbabilityCurve<T>, QrwsError> {
        let phis = self.rows.iter().map(|r| r.phi).collect();
        let values = self
            .rows
            .iter()
            .map(|r| match level {
                NeighborLevel::Walk => r.p_w,
                NeighborLevel::First => r.p_f,
                NeighborLevel::Second => r.p_s,
            })
            .collect();
        ProbabilityCurve::new(self.m, self.law, level, phis, values)
    }
}

/// Sweeps φ over `grid` for one `(m, law)` pair: each grid point runs the
/// standard search with `zeta = law(phi)` and aggregates the final
/// distribution. Rows come back in grid order regardless of scheduling.
pub fn sweep_phi<T: WalkFloat>(
    m: usize,
    marked: usize,
    law: DependenceLaw,
    alpha: Option<T>,
    grid: &[T],
) -> Result<PhiSweep<T>, QrwsError> {
    if law.requires_alpha() && alpha.is_none() {
        return Err(QrwsError::MissingAlpha { m });
    }
    let rows: Result<Vec<SweepRow<T>>, QrwsError> = grid
        .par_iter()
        .map(|&phi| {
            let zeta = law.zeta(phi, alpha)?;
            let out = run_standard(&RunConfig::new(m, vec![marked], phi, zeta))?;
            let agg = aggregate(&out.distribution, marked, m)?;
            Ok(SweepRow {
                phi,
                zeta,
                p_w: agg.p_w(),
                p_f: agg.p_f(),
                p_s: agg.p_s(),
            })
        })
        .collect();
    Ok(PhiSweep {
        m,
        law,
        marked,
        rows: rows?,
    })
}

/// One heatmap sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatmapCell<T: WalkFloat> {
    pub phi: T,
    pub zeta: T,
    pub p_w: T,
}

/// Decoupled (φ, ζ) sweep of the marked-node probability. Cells are emitted
/// φ-major (all ζ for the first φ, then the next φ, ...).
pub fn sweep_heatmap<T: WalkFloat>(
    m: usize,
    marked: usize,
    phi_grid: &[T],
    zeta_grid: &[T],
) -> Result<Vec<HeatmapCell<T>>, QrwsError> {
    let pairs: Vec<(T, T)> = phi_grid
        .iter()
        .flat_map(|&phi| zeta_grid.iter().map(move |&zeta| (phi, zeta)))
        .collect();
    pairs
        .par_iter()
        .map(|&(phi, zeta)| {
            let out = run_standard(&RunConfig::new(m, vec![marked], phi, zeta))?;
            Ok(HeatmapCell {
                phi,
                zeta,
                p_w: out.distribution[marked],
            })
        })
        .collect()
}

/// A probability curve over a uniform φ grid, tagged with its origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityCurve<T: WalkFloat> {
    pub m: usize,
    pub law: DependenceLaw,
    pub level: NeighborLevel,
    phis: Vec<T>,
    values: Vec<T>,
}

impl<T: WalkFloat> ProbabilityCurve<T> {
    /// Validates ordering, uniform spacing (within 1e-12), and probability
    /// range.
    pub fn new(
        m: usize,
        law: DependenceLaw,
        level: NeighborLevel,
        phis: Vec<T>,
        values: Vec<T>,
    ) -> Result<Self, QrwsError> {
        if phis.len() != values.len() {
            return Err(QrwsError::InvalidCurve(format!(
                "{} phi samples but {} values",
                phis.len(),
                values.len()
            )));
        }
        if phis.len() < 2 {
            return Err(QrwsError::InvalidCurve(
                "curve needs at least two samples".into(),
            ));
        }
        let step = phis[1] - phis[0];
        if step <= T::zero() {
            return Err(QrwsError::InvalidCurve("phi must be strictly increasing".into()));
        }
        for w in phis.windows(2) {
            let d = w[1] - w[0];
            if to_f64((d - step).abs()) > 1e-12 {
                return Err(QrwsError::InvalidCurve(format!(
                    "non-uniform grid: step {} vs {}",
                    to_f64(d),
                    to_f64(step)
                )));
            }
        }
        for &v in &values {
            let v = to_f64(v);
            if !(-1e-9..=1.0 + 1e-9).contains(&v) {
                return Err(QrwsError::InvalidCurve(format!(
                    "value {v} outside [0, 1]"
                )));
            }
        }
        Ok(ProbabilityCurve {
            m,
            law,
            level,
            phis,
            values,
        })
    }

    pub fn phis(&self) -> &[T] {
        &self.phis
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.phis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phis.is_empty()
    }

    /// Grid spacing.
    pub fn step(&self) -> T {
        self.phis[1] - self.phis[0]
    }

    /// Index of the grid point at (or within 1e-9 of) φ=π, if present.
    pub fn pi_index(&self) -> Option<usize> {
        let pi = T::PI();
        let mut best = 0usize;
        let mut best_d = T::infinity();
        for (i, &p) in self.phis.iter().enumerate() {
            let d = (p - pi).abs();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        if to_f64(best_d) < 1e-9 {
            Some(best)
        } else {
            None
        }
    }
}

/// Robustness summary for one curve at one threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport<T: WalkFloat> {
    pub omega: T,
    pub phi_max: T,
    pub p_max: T,
    /// Half-width of the widest symmetric grid interval around `phi_max` on
    /// which the curve stays at or above `omega * p_max`.
    pub epsilon: T,
}

/// Finds `p_max`, `phi_max` (ties broken toward φ closest to π, then toward
/// the smaller φ), and the symmetric robustness half-width ε.
///
/// Scanning outward from `phi_max`, each side's extent is the distance to the
/// last compliant grid point before the first violator; a side with no
/// violator is capped at the distance from `phi_max` to the domain edge (0 or
/// 2π). ε is the smaller of the two sides.
pub fn robustness_epsilon<T: WalkFloat>(
    curve: &ProbabilityCurve<T>,
    omega: T,
) -> Result<RobustnessReport<T>, QrwsError> {
    if !(omega > T::zero() && omega < T::one()) {
        return Err(QrwsError::InvalidParameter {
            name: "omega",
            reason: "threshold must lie in (0, 1)".into(),
        });
    }
    let phis = curve.phis();
    let values = curve.values();
    let pi = T::PI();
    let two_pi = pi + pi;
    let step = curve.step();

    let p_max = values
        .iter()
        .copied()
        .fold(T::neg_infinity(), |a, b| if b > a { b } else { a });
    // Tie-break among exact maxima: closest to pi, then smaller phi. The
    // ascending scan makes "smaller phi" automatic on distance ties.
    let mut i_max = 0usize;
    let mut best_dist = T::infinity();
    for (i, (&p, &phi)) in values.iter().zip(phis).enumerate() {
        if p == p_max {
            let d = (phi - pi).abs();
            if d < best_dist {
                best_dist = d;
                i_max = i;
            }
        }
    }
    let phi_max = phis[i_max];
    let threshold = omega * p_max;

    let mut left_steps = 0usize;
    while i_max >= left_steps + 1 && values[i_max - left_steps - 1] >= threshold {
        left_steps += 1;
    }
    let left = if i_max >= left_steps + 1 {
        cf::<T>(left_steps as f64) * step
    } else {
        phi_max
    };

    let mut right_steps = 0usize;
    while i_max + right_steps + 1 < values.len() && values[i_max + right_steps + 1] >= threshold {
        right_steps += 1;
    }
    let right = if i_max + right_steps + 1 < values.len() {
        cf::<T>(right_steps as f64) * step
    } else {
        two_pi - phi_max
    };

    Ok(RobustnessReport {
        omega,
        phi_max,
        p_max,
        epsilon: if left < right { left } else { right },
    })
}

/// Pointwise λ curves; entries are `None` where a denominator fell below
/// 1e-12.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaCurves<T: WalkFloat> {
    pub phis: Vec<T>,
    /// `lambda_1(phi) = [P_F(phi)/P_F(pi)] / [P_W(phi)/P_W(pi)]`.
    pub lambda1: Vec<Option<T>>,
    /// `lambda_2(phi) = [P_S(phi)/P_S(pi)] / [P_F(phi)/P_F(pi)]`.
    pub lambda2: Vec<Option<T>>,
}

/// λ report: the curves plus their interval averages.
#[derive(Debug, Clone)]
pub struct LambdaReport<T: WalkFloat> {
    pub curves: LambdaCurves<T>,
    pub capital_lambda1: T,
    pub capital_lambda2: T,
    /// Integration interval `[pi, pi + epsilon]`.
    pub interval: (T, T),
}

const DENOMINATOR_FLOOR: f64 = 1e-12;

/// Builds the pointwise λ curves from the three aggregates of one sweep.
pub fn lambda_curves<T: WalkFloat>(
    w: &ProbabilityCurve<T>,
    f: &ProbabilityCurve<T>,
    s: &ProbabilityCurve<T>,
) -> Result<LambdaCurves<T>, QrwsError> {
    if w.len() != f.len() || f.len() != s.len() {
        return Err(QrwsError::InvalidCurve(
            "lambda inputs must share one grid".into(),
        ));
    }
    for ((pw, pf), ps) in w.phis().iter().zip(f.phis()).zip(s.phis()) {
        if to_f64((*pw - *pf).abs()) > 1e-12 || to_f64((*pf - *ps).abs()) > 1e-12 {
            return Err(QrwsError::InvalidCurve(
                "lambda inputs must share one grid".into(),
            ));
        }
    }
    let i_pi = w.pi_index().ok_or_else(|| {
        QrwsError::InvalidCurve("normalization point pi is not on the grid".into())
    })?;
    let w_pi = w.values()[i_pi];
    let f_pi = f.values()[i_pi];
    let s_pi = s.values()[i_pi];
    for (name, v) in [("P_W", w_pi), ("P_F", f_pi), ("P_S", s_pi)] {
        if to_f64(v) < DENOMINATOR_FLOOR {
            return Err(QrwsError::InvalidCurve(format!(
                "{name}(pi) = {} is too small to normalize by",
                to_f64(v)
            )));
        }
    }
    let floor = cf::<T>(DENOMINATOR_FLOOR);
    let lambda1 = w
        .values()
        .iter()
        .zip(f.values())
        .map(|(&pw, &pf)| {
            if pw < floor {
                None
            } else {
                Some((pf / f_pi) / (pw / w_pi))
            }
        })
        .collect();
    let lambda2 = f
        .values()
        .iter()
        .zip(s.values())
        .map(|(&pf, &ps)| {
            if pf < floor {
                None
            } else {
                Some((ps / s_pi) / (pf / f_pi))
            }
        })
        .collect();
    Ok(LambdaCurves {
        phis: w.phis().to_vec(),
        lambda1,
        lambda2,
    })
}

/// Interval average of a λ curve over `[pi, pi + epsilon]`, minus one:
/// trapezoid rule on the existing grid, no re-simulation.
pub fn capital_lambda<T: WalkFloat>(
    phis: &[T],
    lambda: &[Option<T>],
    epsilon: T,
) -> Result<T, QrwsError> {
    if phis.len() != lambda.len() || phis.len() < 2 {
        return Err(QrwsError::InvalidCurve("malformed lambda curve".into()));
    }
    let step = phis[1] - phis[0];
    let pi = T::PI();
    let mut i_pi = None;
    for (i, &p) in phis.iter().enumerate() {
        if to_f64((p - pi).abs()) < 1e-9 {
            i_pi = Some(i);
            break;
        }
    }
    let i_pi = i_pi.ok_or_else(|| {
        QrwsError::InvalidCurve("normalization point pi is not on the grid".into())
    })?;
    let steps = to_f64(epsilon / step).round() as usize;
    if steps < 1 {
        return Err(QrwsError::InsufficientResolution {
            epsilon: to_f64(epsilon),
            step: to_f64(step),
        });
    }
    if i_pi + steps >= phis.len() {
        return Err(QrwsError::InvalidCurve(
            "integration interval extends past the grid".into(),
        ));
    }
    let mut integral = T::zero();
    for i in i_pi..i_pi + steps {
        let a = lambda[i].ok_or_else(|| {
            QrwsError::InvalidCurve("masked lambda sample inside the integration interval".into())
        })?;
        let b = lambda[i + 1].ok_or_else(|| {
            QrwsError::InvalidCurve("masked lambda sample inside the integration interval".into())
        })?;
        integral += (a + b) * step / cf::<T>(2.0);
    }
    Ok(integral / epsilon - T::one())
}

/// Convenience: full λ pipeline for one sweep, using the W-level robustness
/// window of the same `(m, law)` at threshold `omega`.
pub fn lambda_report<T: WalkFloat>(
    sweep: &PhiSweep<T>,
    omega: T,
) -> Result<(LambdaReport<T>, RobustnessReport<T>), QrwsError> {
    let w = sweep.curve(NeighborLevel::Walk)?;
    let f = sweep.curve(NeighborLevel::First)?;
    let s = sweep.curve(NeighborLevel::Second)?;
    let rob = robustness_epsilon(&w, omega)?;
    let curves = lambda_curves(&w, &f, &s)?;
    let l1 = capital_lambda(&curves.phis, &curves.lambda1, rob.epsilon)?;
    let l2 = capital_lambda(&curves.phis, &curves.lambda2, rob.epsilon)?;
    let pi = T::PI();
    Ok((
        LambdaReport {
            curves,
            capital_lambda1: l1,
            capital_lambda2: l2,
            interval: (pi, pi + rob.epsilon),
        },
        rob,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const PI: f64 = std::f64::consts::PI;

    fn curve_from(values: Vec<f64>, step: f64) -> ProbabilityCurve<f64> {
        let half = (values.len() / 2) as isize;
        let phis = (0..values.len())
            .map(|i| PI + (i as isize - half) as f64 * step)
            .collect();
        ProbabilityCurve::new(4, DependenceLaw::Const, NeighborLevel::Walk, phis, values)
            .unwrap()
    }

    #[test]
    fn default_grid_shape() {
        let grid = default_phi_grid::<f64>(0.005).unwrap();
        assert_eq!(grid.len(), 1257);
        assert_eq!(grid[628], PI);
        assert!(grid[0] > 0.0 && *grid.last().unwrap() < 2.0 * PI);
        assert_abs_diff_eq!(grid[0], PI - 628.0 * 0.005, epsilon = 1e-12);

        let coarse = default_phi_grid::<f64>(1.0).unwrap();
        assert_eq!(coarse.len(), 7);
        assert_abs_diff_eq!(coarse[0], PI - 3.0, epsilon = 1e-15);
    }

    #[test]
    fn invalid_grid_steps_are_rejected() {
        assert!(default_phi_grid::<f64>(0.0).is_err());
        assert!(default_phi_grid::<f64>(-0.1).is_err());
        assert!(default_phi_grid::<f64>(4.0).is_err());
    }

    #[test]
    fn curve_validation_catches_structure_errors() {
        let bad = ProbabilityCurve::new(
            4,
            DependenceLaw::Const,
            NeighborLevel::Walk,
            vec![1.0, 1.1, 1.3],
            vec![0.1, 0.2, 0.3],
        );
        assert!(matches!(bad, Err(QrwsError::InvalidCurve(_))));
        let bad_range = ProbabilityCurve::new(
            4,
            DependenceLaw::Const,
            NeighborLevel::Walk,
            vec![1.0, 1.1],
            vec![0.1, 1.5],
        );
        assert!(bad_range.is_err());
    }

    #[test]
    fn symmetric_plateau_gives_the_plateau_halfwidth() {
        let curve = curve_from(vec![0.5, 0.8, 0.9, 1.0, 0.9, 0.8, 0.5], 0.1);
        let rep = robustness_epsilon(&curve, 0.9).unwrap();
        assert_abs_diff_eq!(rep.phi_max, PI, epsilon = 1e-15);
        assert_abs_diff_eq!(rep.epsilon, 0.1, epsilon = 1e-12);
    }

    #[test]
    fn square_pulse_epsilon_matches_its_half_width() {
        // 1 on (pi - 0.3, pi + 0.3), 0 elsewhere, grid step 0.05.
        let values: Vec<f64> = (-20..=20)
            .map(|k| if (k as f64 * 0.05).abs() < 0.3 { 1.0 } else { 0.0 })
            .collect();
        let curve = curve_from(values, 0.05);
        let rep = robustness_epsilon(&curve, 0.9).unwrap();
        assert!((rep.epsilon - 0.3).abs() <= 0.05 + 1e-12);
    }

    #[test]
    fn constant_curve_is_domain_edge_bounded() {
        let curve = curve_from(vec![0.25; 1257], 0.005);
        let rep = robustness_epsilon(&curve, 0.9).unwrap();
        assert_abs_diff_eq!(rep.phi_max, PI, epsilon = 1e-15);
        assert_abs_diff_eq!(rep.epsilon, PI, epsilon = 1e-12);
    }

    #[test]
    fn tie_break_prefers_the_smaller_phi() {
        let curve = curve_from(vec![1.0, 0.5, 1.0], 0.1);
        let rep = robustness_epsilon(&curve, 0.9).unwrap();
        assert_abs_diff_eq!(rep.phi_max, PI - 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(rep.epsilon, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn epsilon_is_monotone_in_omega() {
        let curve = curve_from(
            (-300..=300)
                .map(|k| {
                    let u = (k as f64 * 0.01).abs();
                    0.4 / (1.0 + (u / 0.8).powi(4))
                })
                .collect(),
            0.01,
        );
        let mut last = f64::INFINITY;
        for omega in [0.5, 0.7, 0.9, 0.95] {
            let rep = robustness_epsilon(&curve, omega).unwrap();
            assert!(rep.epsilon <= last + 1e-12);
            last = rep.epsilon;
        }
    }

    #[test]
    fn m4_sweep_reproduces_reference_robustness() {
        let grid = default_phi_grid::<f64>(0.005).unwrap();
        // (law, alpha, eps, |phi_max - pi|, p_max) from an independent
        // implementation.
        let cases = [
            (DependenceLaw::Const, None, 0.205, 0.0, 0.390625),
            (DependenceLaw::Linear, None, 1.24, 0.0, 0.390625),
            (DependenceLaw::NlFixed, None, 0.82, 0.405, 0.39213423477029652),
            (DependenceLaw::NlMl, Some(-0.056), 0.885, 0.355, 0.39128903299606266),
        ];
        for (law, alpha, eps, dist, p_max) in cases {
            let sweep = sweep_phi(4, 2, law, alpha, &grid).unwrap();
            let rep = robustness_epsilon(&sweep.curve(NeighborLevel::Walk).unwrap(), 0.9).unwrap();
            assert_abs_diff_eq!(rep.epsilon, eps, epsilon = 1e-12);
            assert_abs_diff_eq!((rep.phi_max - PI).abs(), dist, epsilon = 1e-9);
            assert_abs_diff_eq!(rep.p_max, p_max, epsilon = 1e-12);
        }
    }

    #[test]
    fn sweep_curves_are_mirror_symmetric() {
        let grid = default_phi_grid::<f64>(0.1).unwrap();
        let sweep = sweep_phi(4, 2, DependenceLaw::Linear, None, &grid).unwrap();
        let n = sweep.rows.len();
        for i in 0..n / 2 {
            let a = sweep.rows[i].p_w;
            let b = sweep.rows[n - 1 - i].p_w;
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn pointwise_aggregates_are_ordered() {
        let grid = default_phi_grid::<f64>(0.25).unwrap();
        for law in [DependenceLaw::Const, DependenceLaw::Linear, DependenceLaw::NlFixed] {
            let sweep = sweep_phi(5, 2, law, None, &grid).unwrap();
            for row in &sweep.rows {
                assert!(row.p_w <= row.p_f + 1e-12 && row.p_f <= row.p_s + 1e-12);
            }
        }
    }

    #[test]
    fn missing_alpha_fails_before_simulating() {
        let grid = default_phi_grid::<f64>(0.5).unwrap();
        assert!(matches!(
            sweep_phi(4, 2, DependenceLaw::NlMl, None, &grid),
            Err(QrwsError::MissingAlpha { m: 4 })
        ));
    }

    #[test]
    fn heatmap_hits_reference_values() {
        let cells = sweep_heatmap(4, 2, &[0.0, PI], &[1.7, PI]).unwrap();
        assert_eq!(cells.len(), 4);
        // phi = 0: the coin is a pure phase, the walk never concentrates.
        assert_abs_diff_eq!(cells[0].p_w, 0.0625, epsilon = 1e-10);
        assert_abs_diff_eq!(cells[1].p_w, 0.0625, epsilon = 1e-10);
        // Grover point.
        assert_abs_diff_eq!(cells[3].p_w, 0.390625, epsilon = 1e-12);
        assert_eq!(cells[1].phi, 0.0);
        assert_eq!(cells[2].zeta, 1.7);
    }

    #[test]
    fn lambda_normalizes_to_one_at_pi() {
        let grid = default_phi_grid::<f64>(0.005).unwrap();
        let sweep = sweep_phi(4, 2, DependenceLaw::Linear, None, &grid).unwrap();
        let curves = lambda_curves(
            &sweep.curve(NeighborLevel::Walk).unwrap(),
            &sweep.curve(NeighborLevel::First).unwrap(),
            &sweep.curve(NeighborLevel::Second).unwrap(),
        )
        .unwrap();
        let i_pi = 628;
        assert_abs_diff_eq!(curves.lambda1[i_pi].unwrap(), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(curves.lambda2[i_pi].unwrap(), 1.0, epsilon = 1e-9);
        // Symmetry about pi.
        for off in [10usize, 100, 300] {
            let a = curves.lambda1[i_pi - off].unwrap();
            let b = curves.lambda1[i_pi + off].unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn m4_lambda_averages_match_reference_values() {
        let grid = default_phi_grid::<f64>(0.005).unwrap();
        let cases = [
            (
                DependenceLaw::Linear,
                1.24,
                0.0057557114833859391,
                -0.0089941263737659538,
            ),
            (
                DependenceLaw::NlFixed,
                0.82,
                0.010801341363620987,
                -0.0060028631659623244,
            ),
        ];
        for (law, want_eps, want_l1, want_l2) in cases {
            let sweep = sweep_phi(4, 2, law, None, &grid).unwrap();
            let (report, rob) = lambda_report(&sweep, 0.9).unwrap();
            assert_abs_diff_eq!(rob.epsilon, want_eps, epsilon = 1e-12);
            assert_abs_diff_eq!(report.capital_lambda1, want_l1, epsilon = 1e-9);
            assert_abs_diff_eq!(report.capital_lambda2, want_l2, epsilon = 1e-9);
        }
    }

    #[test]
    fn lambda_average_demands_resolution() {
        let phis: Vec<f64> = (0..10).map(|i| PI + i as f64 * 0.1 - 0.5).collect();
        let lambda: Vec<Option<f64>> = vec![Some(1.0); 10];
        assert!(matches!(
            capital_lambda(&phis, &lambda, 0.01),
            Err(QrwsError::InsufficientResolution { .. })
        ));
        // Constant lambda integrates to zero excess.
        let l = capital_lambda(&phis, &lambda, 0.3).unwrap();
        assert_abs_diff_eq!(l, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn masked_points_inside_the_window_are_an_error() {
        let phis: Vec<f64> = (-3..=3).map(|k| PI + k as f64 * 0.1).collect();
        let mut lambda: Vec<Option<f64>> = vec![Some(1.0); 7];
        lambda[5] = None;
        assert!(capital_lambda(&phis, &lambda, 0.3).is_err());
        assert!(capital_lambda(&phis, &lambda, 0.1).is_ok());
    }
}
