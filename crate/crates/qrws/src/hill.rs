//! Hill-form regression of success-probability curves, secondary fits of the
//! Hill parameters across register sizes, and the closed-form robustness
//! predictions derived from them.

use serde::{Deserialize, Serialize};

use crate::coin::DependenceLaw;
use crate::robustness::{NeighborLevel, ProbabilityCurve};
use crate::{cf, to_f64, QrwsError, WalkFloat};

/// The Hill curve `f(phi) = b * kappa^eta / (u^eta + kappa^eta)` with
/// `u = |phi - pi|`. At `u = 0` the value is `b` exactly.
pub fn hill_eval<T: WalkFloat>(b: T, kappa: T, eta: T, phi: T) -> T {
    let u = (phi - T::PI()).abs();
    if u == T::zero() {
        return b;
    }
    let ke = kappa.powf(eta);
    b * ke / (u.powf(eta) + ke)
}

/// Fit window bounds (exclusive) used when the caller does not supply one.
/// The constant law has secondary humps outside the central third of the
/// domain, so its window is restricted to keep the regression unimodal.
pub fn default_fit_window<T: WalkFloat>(law: DependenceLaw) -> (T, T) {
    let pi = T::PI();
    match law {
        DependenceLaw::Const => (cf::<T>(2.0) * pi / cf::<T>(3.0), cf::<T>(4.0) * pi / cf::<T>(3.0)),
        _ => (T::zero(), pi + pi),
    }
}

/// Result of a three-parameter Hill regression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HillFit<T: WalkFloat> {
    pub m: usize,
    pub law: DependenceLaw,
    pub level: NeighborLevel,
    pub b: T,
    pub kappa: T,
    pub eta: T,
    /// Residual standard error `sqrt(SSR / (N - 3))`.
    pub sigma: T,
    /// Exclusive (lo, hi) window the samples were drawn from.
    pub window: (T, T),
    /// Number of samples inside the window.
    pub samples: usize,
    /// Levenberg-Marquardt iterations consumed.
    pub iterations: usize,
    /// Set when the fitted height exceeds the nominal bound 1.05. The fit is
    /// still reported; downstream consumers decide how to treat it.
    pub exceeds_nominal_height: bool,
}

const LM_MAX_ITERS: usize = 500;
const LM_REL_STEP: f64 = 1e-10;
const LM_LAMBDA_INIT: f64 = 1e-3;
const LM_LAMBDA_CAP: f64 = 1e12;
const NOMINAL_HEIGHT_BOUND: f64 = 1.05;

/// Solves `a x = b` by Gaussian elimination with partial pivoting. Returns
/// `None` when the system is numerically singular.
fn solve_linear<T: WalkFloat, const Q: usize>(
    mut a: [[T; Q]; Q],
    mut b: [T; Q],
) -> Option<[T; Q]> {
    for col in 0..Q {
        let mut pivot = col;
        for row in col + 1..Q {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if to_f64(a[pivot][col].abs()) < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..Q {
            let factor = a[row][col] / a[col][col];
            for k in col..Q {
                let delta = factor * a[col][k];
                a[row][k] = a[row][k] - delta;
            }
            b[row] = b[row] - factor * b[col];
        }
    }
    let mut x = [T::zero(); Q];
    for col in (0..Q).rev() {
        let mut acc = b[col];
        for k in col + 1..Q {
            acc = acc - a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Some(x)
}

/// Ordinary least squares through the normal equations for a fixed basis.
/// `rows[i]` is the design row for sample `i`. Returns the coefficients and
/// the sum of squared residuals.
fn linear_least_squares<T: WalkFloat, const Q: usize>(
    rows: &[[T; Q]],
    ys: &[T],
) -> Result<([T; Q], T), QrwsError> {
    let mut ata = [[T::zero(); Q]; Q];
    let mut atb = [T::zero(); Q];
    for (row, &y) in rows.iter().zip(ys) {
        for i in 0..Q {
            for j in 0..Q {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * y;
        }
    }
    let coeffs = solve_linear(ata, atb)
        .ok_or_else(|| QrwsError::FitFailure("singular least-squares system".into()))?;
    let mut ssr = T::zero();
    for (row, &y) in rows.iter().zip(ys) {
        let mut pred = T::zero();
        for i in 0..Q {
            pred += row[i] * coeffs[i];
        }
        let r = y - pred;
        ssr += r * r;
    }
    Ok((coeffs, ssr))
}

/// Damped Gauss-Newton (Levenberg-Marquardt) for a small parameter vector.
///
/// `eval` fills `(residuals, jacobian_rows)` for a parameter vector, where
/// `residuals[i] = y_i - f(x_i)` and `jacobian_rows[i][j] = df(x_i)/dp_j`.
/// Entries of `positive` mark parameters that must stay strictly positive;
/// trial steps violating that are rejected like any uphill step. Returns the
/// parameters, the final sum of squared residuals, and the iteration count.
fn levenberg_marquardt<T: WalkFloat, const Q: usize>(
    mut params: [T; Q],
    positive: [bool; Q],
    eval: &dyn Fn(&[T; Q]) -> (Vec<T>, Vec<[T; Q]>),
    max_iters: usize,
) -> Result<([T; Q], T, usize), QrwsError> {
    let ssr_of = |r: &[T]| -> T {
        let mut s = T::zero();
        for &ri in r {
            s += ri * ri;
        }
        s
    };
    let (mut residuals, mut jacobian) = eval(&params);
    let mut ssr = ssr_of(&residuals);
    if !to_f64(ssr).is_finite() {
        return Err(QrwsError::FitFailure(
            "initial parameters give non-finite residuals".into(),
        ));
    }
    let mut lambda = cf::<T>(LM_LAMBDA_INIT);
    let cap = cf::<T>(LM_LAMBDA_CAP);
    for iter in 1..=max_iters {
        let mut jtj = [[T::zero(); Q]; Q];
        let mut jtr = [T::zero(); Q];
        for (row, &r) in jacobian.iter().zip(&residuals) {
            for i in 0..Q {
                for j in 0..Q {
                    jtj[i][j] += row[i] * row[j];
                }
                jtr[i] += row[i] * r;
            }
        }
        let mut damped = jtj;
        for i in 0..Q {
            let d = jtj[i][i];
            let scale = if to_f64(d) > 1e-300 { d } else { T::one() };
            damped[i][i] = d + lambda * scale;
        }
        let step = match solve_linear(damped, jtr) {
            Some(s) => s,
            None => {
                lambda = (lambda * cf::<T>(10.0)).min(cap);
                continue;
            }
        };
        let mut trial = params;
        let mut admissible = true;
        let mut step_norm = T::zero();
        let mut param_norm = T::zero();
        for i in 0..Q {
            trial[i] += step[i];
            step_norm += step[i] * step[i];
            param_norm += params[i] * params[i];
            if !to_f64(trial[i]).is_finite() || (positive[i] && trial[i] <= T::zero()) {
                admissible = false;
            }
        }
        let rel = to_f64(step_norm).sqrt() / (to_f64(param_norm).sqrt() + 1e-300);
        let mut accepted = false;
        if admissible {
            let (trial_res, trial_jac) = eval(&trial);
            let trial_ssr = ssr_of(&trial_res);
            if to_f64(trial_ssr).is_finite() && trial_ssr < ssr {
                params = trial;
                residuals = trial_res;
                jacobian = trial_jac;
                ssr = trial_ssr;
                lambda = lambda / cf::<T>(10.0);
                accepted = true;
            }
        }
        // A negligible proposed step means a stationary point whether or not
        // it improved the residual; rejected larger steps just raise the
        // damping until the proposal shrinks below this gate.
        if rel < LM_REL_STEP {
            return Ok((params, ssr, iter));
        }
        if !accepted {
            lambda = (lambda * cf::<T>(10.0)).min(cap);
        }
    }
    Err(QrwsError::FitFailure(format!(
        "no convergence after {max_iters} damped Gauss-Newton iterations"
    )))
}

/// Fits the Hill form to one curve. `window` overrides the law-specific
/// default; bounds are exclusive.
pub fn hill_fit<T: WalkFloat>(
    curve: &ProbabilityCurve<T>,
    window: Option<(T, T)>,
) -> Result<HillFit<T>, QrwsError> {
    let (lo, hi) = window.unwrap_or_else(|| default_fit_window(curve.law));
    if !(hi > lo) {
        return Err(QrwsError::InvalidParameter {
            name: "window",
            reason: "upper bound must exceed lower bound".into(),
        });
    }
    let mut phis = Vec::new();
    let mut ys = Vec::new();
    for (&phi, &y) in curve.phis().iter().zip(curve.values()) {
        if phi > lo && phi < hi {
            phis.push(phi);
            ys.push(y);
        }
    }
    if phis.len() < 10 {
        return Err(QrwsError::InvalidParameter {
            name: "window",
            reason: format!(
                "only {} samples inside ({}, {}); need at least 10",
                phis.len(),
                to_f64(lo),
                to_f64(hi)
            ),
        });
    }

    let pi = T::PI();
    let b0 = ys
        .iter()
        .copied()
        .fold(T::neg_infinity(), |a, v| if v > a { v } else { a });
    if !(b0 > T::zero()) {
        return Err(QrwsError::FitFailure(
            "curve is non-positive inside the window".into(),
        ));
    }
    // Half width at half maximum, scanning right from the sample nearest pi;
    // a curve that never drops falls back to a quarter of the window span.
    let mut i_pi = 0usize;
    let mut best = T::infinity();
    for (i, &p) in phis.iter().enumerate() {
        let d = (p - pi).abs();
        if d < best {
            best = d;
            i_pi = i;
        }
    }
    let half = b0 / cf::<T>(2.0);
    let mut kappa0 = (*phis.last().unwrap() - phis[0]) / cf::<T>(4.0);
    for i in i_pi..phis.len() {
        if ys[i] < half {
            kappa0 = phis[i] - pi;
            break;
        }
    }
    if !(kappa0 > T::zero()) {
        kappa0 = (*phis.last().unwrap() - phis[0]) / cf::<T>(4.0);
    }
    let eta0 = cf::<T>(2.0);

    let eval = |p: &[T; 3]| -> (Vec<T>, Vec<[T; 3]>) {
        let (b, kappa, eta) = (p[0], p[1], p[2]);
        let ke = kappa.powf(eta);
        let ln_kappa = kappa.ln();
        let mut res = Vec::with_capacity(phis.len());
        let mut jac = Vec::with_capacity(phis.len());
        for (&phi, &y) in phis.iter().zip(&ys) {
            let u = (phi - pi).abs();
            if u == T::zero() {
                res.push(y - b);
                jac.push([T::one(), T::zero(), T::zero()]);
                continue;
            }
            let ue = u.powf(eta);
            let denom = ue + ke;
            let f = b * ke / denom;
            res.push(y - f);
            let d2 = denom * denom;
            jac.push([
                ke / denom,
                b * eta * kappa.powf(eta - T::one()) * ue / d2,
                b * ke * ue * (ln_kappa - u.ln()) / d2,
            ]);
        }
        (res, jac)
    };

    let (params, ssr, iterations) = levenberg_marquardt(
        [b0, kappa0, eta0],
        [true, true, true],
        &eval,
        LM_MAX_ITERS,
    )?;
    let dof = phis.len() - 3;
    let sigma = (ssr / cf::<T>(dof as f64)).sqrt();
    Ok(HillFit {
        m: curve.m,
        law: curve.law,
        level: curve.level,
        b: params[0],
        kappa: params[1],
        eta: params[2],
        sigma,
        window: (lo, hi),
        samples: phis.len(),
        iterations,
        exceeds_nominal_height: to_f64(params[0]) > NOMINAL_HEIGHT_BOUND,
    })
}

/// Which functional form won the cross-size κ regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KappaVariant {
    /// `kappa(x) = c1 * exp(c2 x) * x^c3` (c4 frozen at zero).
    ExponentialPower,
    /// `kappa(x) = c1 * x^c3 + c4` (c2 frozen at zero).
    PowerOffset,
    /// `kappa(x) = c1 * x^c3` (c2 and c4 frozen at zero).
    PurePower,
}

impl KappaVariant {
    /// Names of the coefficients pinned to zero for this variant.
    pub fn frozen(&self) -> &'static [&'static str] {
        match self {
            KappaVariant::ExponentialPower => &["c4"],
            KappaVariant::PowerOffset => &["c2"],
            KappaVariant::PurePower => &["c2", "c4"],
        }
    }
}

/// Cross-size regression of the three Hill parameters.
///
/// `b(x) = c1/x + c2`, `eta(x) = c1 x^2 + c2 x + c3`, and
/// `kappa(x) = c1 e^{c2 x} x^{c3} + c4` with per-variant frozen
/// coefficients. Coefficient arrays are always length four; frozen entries
/// are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondaryFit<T: WalkFloat> {
    pub ms: Vec<usize>,
    pub b_coeffs: [T; 2],
    pub b_sigma: T,
    pub eta_coeffs: [T; 3],
    pub eta_sigma: T,
    pub kappa_coeffs: [T; 4],
    pub kappa_sigma: T,
    pub kappa_variant: KappaVariant,
}

pub fn eval_b<T: WalkFloat>(coeffs: &[T; 2], x: T) -> T {
    coeffs[0] / x + coeffs[1]
}

pub fn eval_eta<T: WalkFloat>(coeffs: &[T; 3], x: T) -> T {
    (coeffs[0] * x + coeffs[1]) * x + coeffs[2]
}

pub fn eval_kappa<T: WalkFloat>(coeffs: &[T; 4], x: T) -> T {
    coeffs[0] * (coeffs[1] * x).exp() * x.powf(coeffs[2]) + coeffs[3]
}

/// Range of register sizes on which the fitted κ law must stay positive.
const KAPPA_VALIDITY: std::ops::RangeInclusive<usize> = 4..=25;

fn kappa_positive_on_validity<T: WalkFloat>(coeffs: &[T; 4]) -> bool {
    KAPPA_VALIDITY
        .clone()
        .all(|m| eval_kappa(coeffs, cf::<T>(m as f64)) > T::zero())
}

struct KappaCandidate<T: WalkFloat> {
    coeffs: [T; 4],
    sigma: T,
    variant: KappaVariant,
}

fn fit_kappa_variant<T: WalkFloat>(
    xs: &[T],
    kappas: &[T],
    variant: KappaVariant,
) -> Result<KappaCandidate<T>, QrwsError> {
    let n = xs.len();
    let logs: Vec<T> = kappas.iter().map(|&k| k.ln()).collect();
    // Log-linear warm starts: ln kappa = ln c1 + c2 x + c3 ln x, dropping the
    // terms the variant freezes.
    let (coeffs, q, ssr, iterations): ([T; 4], usize, T, usize) = match variant {
        KappaVariant::ExponentialPower => {
            let rows: Vec<[T; 3]> = xs.iter().map(|&x| [T::one(), x, x.ln()]).collect();
            let (init, _) = linear_least_squares(&rows, &logs)?;
            let eval = |p: &[T; 3]| -> (Vec<T>, Vec<[T; 3]>) {
                let mut res = Vec::with_capacity(n);
                let mut jac = Vec::with_capacity(n);
                for (&x, &y) in xs.iter().zip(kappas) {
                    let core = (p[1] * x).exp() * x.powf(p[2]);
                    let f = p[0] * core;
                    res.push(y - f);
                    jac.push([core, f * x, f * x.ln()]);
                }
                (res, jac)
            };
            let (p, ssr, iters) = levenberg_marquardt(
                [init[0].exp(), init[1], init[2]],
                [true, false, false],
                &eval,
                LM_MAX_ITERS,
            )?;
            ([p[0], p[1], p[2], T::zero()], 3, ssr, iters)
        }
        KappaVariant::PowerOffset => {
            let rows: Vec<[T; 2]> = xs.iter().map(|&x| [T::one(), x.ln()]).collect();
            let (init, _) = linear_least_squares(&rows, &logs)?;
            let eval = |p: &[T; 3]| -> (Vec<T>, Vec<[T; 3]>) {
                let mut res = Vec::with_capacity(n);
                let mut jac = Vec::with_capacity(n);
                for (&x, &y) in xs.iter().zip(kappas) {
                    let core = x.powf(p[1]);
                    res.push(y - (p[0] * core + p[2]));
                    jac.push([core, p[0] * core * x.ln(), T::one()]);
                }
                (res, jac)
            };
            let (p, ssr, iters) = levenberg_marquardt(
                [init[0].exp(), init[1], T::zero()],
                [true, false, false],
                &eval,
                LM_MAX_ITERS,
            )?;
            ([p[0], T::zero(), p[1], p[2]], 3, ssr, iters)
        }
        KappaVariant::PurePower => {
            let rows: Vec<[T; 2]> = xs.iter().map(|&x| [T::one(), x.ln()]).collect();
            let (init, _) = linear_least_squares(&rows, &logs)?;
            let eval = |p: &[T; 2]| -> (Vec<T>, Vec<[T; 2]>) {
                let mut res = Vec::with_capacity(n);
                let mut jac = Vec::with_capacity(n);
                for (&x, &y) in xs.iter().zip(kappas) {
                    let core = x.powf(p[1]);
                    res.push(y - p[0] * core);
                    jac.push([core, p[0] * core * x.ln()]);
                }
                (res, jac)
            };
            let (p, ssr, iters) = levenberg_marquardt(
                [init[0].exp(), init[1]],
                [true, false],
                &eval,
                LM_MAX_ITERS,
            )?;
            ([p[0], T::zero(), p[1], T::zero()], 2, ssr, iters)
        }
    };
    let _ = iterations;
    if n <= q {
        return Err(QrwsError::FitFailure(
            "not enough sizes for the kappa regression".into(),
        ));
    }
    let sigma = (ssr / cf::<T>((n - q) as f64)).sqrt();
    Ok(KappaCandidate {
        coeffs,
        sigma,
        variant,
    })
}

/// Fits all three secondary laws over matched per-size Hill parameters.
///
/// For κ the three variants are fitted independently; candidates are ranked
/// by residual error and the best one whose curve stays positive across the
/// validity range is kept.
pub fn secondary_fit<T: WalkFloat>(
    ms: &[usize],
    bs: &[T],
    kappas: &[T],
    etas: &[T],
) -> Result<SecondaryFit<T>, QrwsError> {
    let n = ms.len();
    if bs.len() != n || kappas.len() != n || etas.len() != n {
        return Err(QrwsError::InvalidParameter {
            name: "ms",
            reason: "parameter vectors must have one entry per size".into(),
        });
    }
    if n < 5 {
        return Err(QrwsError::InvalidParameter {
            name: "ms",
            reason: format!("need at least 5 sizes, got {n}"),
        });
    }
    for w in ms.windows(2) {
        if w[1] <= w[0] {
            return Err(QrwsError::InvalidParameter {
                name: "ms",
                reason: "sizes must be strictly increasing".into(),
            });
        }
    }
    for &k in kappas {
        if !(k > T::zero()) {
            return Err(QrwsError::InvalidParameter {
                name: "kappas",
                reason: "kappa values must be positive".into(),
            });
        }
    }
    let xs: Vec<T> = ms.iter().map(|&m| cf::<T>(m as f64)).collect();

    let b_rows: Vec<[T; 2]> = xs.iter().map(|&x| [T::one() / x, T::one()]).collect();
    let (b_coeffs, b_ssr) = linear_least_squares(&b_rows, bs)?;
    let b_sigma = (b_ssr / cf::<T>((n - 2) as f64)).sqrt();

    let eta_rows: Vec<[T; 3]> = xs.iter().map(|&x| [x * x, x, T::one()]).collect();
    let (eta_raw, eta_ssr) = linear_least_squares(&eta_rows, etas)?;
    let eta_sigma = (eta_ssr / cf::<T>((n - 3) as f64)).sqrt();

    let mut candidates = Vec::new();
    let mut failures = Vec::new();
    for variant in [
        KappaVariant::ExponentialPower,
        KappaVariant::PowerOffset,
        KappaVariant::PurePower,
    ] {
        match fit_kappa_variant(&xs, kappas, variant) {
            Ok(c) => candidates.push(c),
            Err(e) => failures.push(format!("{variant:?}: {e}")),
        }
    }
    candidates.sort_by(|a, b| {
        to_f64(a.sigma)
            .partial_cmp(&to_f64(b.sigma))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let winner = candidates
        .into_iter()
        .find(|c| kappa_positive_on_validity(&c.coeffs))
        .ok_or_else(|| {
            QrwsError::FitFailure(format!(
                "no kappa variant stays positive across sizes {}..={} ({})",
                KAPPA_VALIDITY.start(),
                KAPPA_VALIDITY.end(),
                failures.join("; ")
            ))
        })?;

    Ok(SecondaryFit {
        ms: ms.to_vec(),
        b_coeffs,
        b_sigma,
        eta_coeffs: eta_raw,
        eta_sigma,
        kappa_coeffs: winner.coeffs,
        kappa_sigma: winner.sigma,
        kappa_variant: winner.variant,
    })
}

/// Hill parameters predicted for one register size from a secondary fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolatedParams<T: WalkFloat> {
    pub m: usize,
    pub b: T,
    pub kappa: T,
    pub eta: T,
}

/// Evaluates the secondary laws at `m`. κ or η coming out non-positive means
/// the laws are being used outside their validity range, which is an error;
/// `b` is reported as evaluated and callers may clamp it to a probability.
pub fn extrapolate<T: WalkFloat>(
    fit: &SecondaryFit<T>,
    m: usize,
) -> Result<ExtrapolatedParams<T>, QrwsError> {
    let x = cf::<T>(m as f64);
    let kappa = eval_kappa(&fit.kappa_coeffs, x);
    let eta = eval_eta(&fit.eta_coeffs, x);
    if !(kappa > T::zero()) || !(eta > T::zero()) {
        return Err(QrwsError::FitFailure(format!(
            "secondary laws leave their validity range at m = {m} (kappa = {}, eta = {})",
            to_f64(kappa),
            to_f64(eta)
        )));
    }
    Ok(ExtrapolatedParams {
        m,
        b: eval_b(&fit.b_coeffs, x),
        kappa,
        eta,
    })
}

/// Closed-form robustness half-width of a Hill curve at threshold `omega`:
/// the curve drops to `omega` times its height at
/// `kappa * ((1 - omega)/omega)^(1/eta)`.
pub fn epsilon_tilde<T: WalkFloat>(kappa: T, eta: T, omega: T) -> Result<T, QrwsError> {
    if !(omega > T::zero() && omega < T::one()) {
        return Err(QrwsError::InvalidParameter {
            name: "omega",
            reason: "threshold must lie in (0, 1)".into(),
        });
    }
    if !(kappa > T::zero()) || !(eta > T::zero()) {
        return Err(QrwsError::InvalidParameter {
            name: "kappa",
            reason: "kappa and eta must be positive".into(),
        });
    }
    Ok(kappa * ((T::one() - omega) / omega).powf(T::one() / eta))
}

/// Ratio of closed-form robustness half-widths of two fitted curves,
/// `epsilon_tilde_a / epsilon_tilde_b`.
pub fn robustness_ratio<T: WalkFloat>(
    a: &HillFit<T>,
    b: &HillFit<T>,
    omega: T,
) -> Result<T, QrwsError> {
    Ok(epsilon_tilde(a.kappa, a.eta, omega)? / epsilon_tilde(b.kappa, b.eta, omega)?)
}

/// The κ-only shortcut for the robustness ratio. It silently assumes the two
/// exponents agree, which holds to good approximation only between the two
/// nonlinear laws; other pairings are refused.
pub fn robustness_ratio_simplified<T: WalkFloat>(
    a: &HillFit<T>,
    b: &HillFit<T>,
) -> Result<T, QrwsError> {
    for fit in [a, b] {
        match fit.law {
            DependenceLaw::NlFixed | DependenceLaw::NlMl => {}
            other => {
                return Err(QrwsError::InvalidParameter {
                    name: "law",
                    reason: format!(
                        "simplified ratio only applies to the nonlinear laws, got {other}"
                    ),
                })
            }
        }
    }
    if !(b.kappa > T::zero()) {
        return Err(QrwsError::InvalidParameter {
            name: "kappa",
            reason: "denominator kappa must be positive".into(),
        });
    }
    Ok(a.kappa / b.kappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::robustness::{default_phi_grid, sweep_phi};
    use approx::assert_abs_diff_eq;

    const PI: f64 = std::f64::consts::PI;

    fn synthetic_curve(b: f64, kappa: f64, eta: f64, step: f64) -> ProbabilityCurve<f64> {
        let phis = default_phi_grid::<f64>(step).unwrap();
        let values = phis.iter().map(|&p| hill_eval(b, kappa, eta, p)).collect();
        ProbabilityCurve::new(6, DependenceLaw::Linear, NeighborLevel::Walk, phis.clone(), values)
            .unwrap()
    }

    #[test]
    fn hill_eval_fixed_points() {
        assert_eq!(hill_eval(0.4, 1.0, 2.0, PI), 0.4);
        assert_abs_diff_eq!(hill_eval(0.4, 0.7, 3.5, PI + 0.7), 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(hill_eval(1.0, 1.0, 2.0, PI + 2.0), 0.2, epsilon = 1e-15);
        // Symmetry in |phi - pi|.
        assert_eq!(
            hill_eval(0.4, 1.0, 2.0, PI - 0.3),
            hill_eval(0.4, 1.0, 2.0, PI + 0.3)
        );
    }

    #[test]
    fn synthetic_hill_curve_is_recovered() {
        let curve = synthetic_curve(0.45, 0.8, 3.0, 0.005);
        let fit = hill_fit(&curve, None).unwrap();
        assert_abs_diff_eq!(fit.b, 0.45, epsilon = 1e-6);
        assert_abs_diff_eq!(fit.kappa, 0.8, epsilon = 1e-6);
        assert_abs_diff_eq!(fit.eta, 3.0, epsilon = 1e-6);
        assert!(fit.sigma < 1e-8);
        assert!(!fit.exceeds_nominal_height);
        assert_eq!(fit.samples, 1257);
        assert_eq!(fit.m, 6);
    }

    #[test]
    fn narrow_window_is_rejected() {
        let curve = synthetic_curve(0.45, 0.8, 3.0, 0.005);
        let err = hill_fit(&curve, Some((PI - 0.02, PI + 0.02))).unwrap_err();
        assert!(matches!(err, QrwsError::InvalidParameter { name: "window", .. }));
        assert!(err.is_validation());
    }

    #[test]
    fn m6_walk_fits_match_independent_reference() {
        let grid = default_phi_grid::<f64>(0.005).unwrap();
        // (law, b, kappa, eta, sigma, samples) from an independent
        // implementation of the same regression.
        let cases = [
            (
                DependenceLaw::Const,
                0.39581679293363714,
                0.28500666979624167,
                3.5657394928477242,
                0.019450589849155101,
                419,
            ),
            (
                DependenceLaw::Linear,
                0.38613529263493435,
                1.7016608544132017,
                3.1434839856508043,
                0.017835183482121875,
                1257,
            ),
        ];
        for (law, b, kappa, eta, sigma, samples) in cases {
            let sweep = sweep_phi(6, 2, law, None, &grid).unwrap();
            let fit = hill_fit(&sweep.curve(NeighborLevel::Walk).unwrap(), None).unwrap();
            assert_eq!(fit.samples, samples);
            assert_abs_diff_eq!(fit.b, b, epsilon = 5e-4);
            assert_abs_diff_eq!(fit.kappa, kappa, epsilon = 5e-4);
            assert_abs_diff_eq!(fit.eta, eta, epsilon = 5e-3);
            assert_abs_diff_eq!(fit.sigma, sigma, epsilon = 1e-6);
            assert!(!fit.exceeds_nominal_height);
        }
    }

    #[test]
    fn shrinking_the_const_window_cannot_worsen_the_fit() {
        let grid = default_phi_grid::<f64>(0.005).unwrap();
        let sweep = sweep_phi(6, 2, DependenceLaw::Const, None, &grid).unwrap();
        let curve = sweep.curve(NeighborLevel::Walk).unwrap();
        let wide = hill_fit(&curve, None).unwrap();
        let narrow = hill_fit(&curve, Some((PI - 0.6, PI + 0.6))).unwrap();
        assert!(narrow.samples < wide.samples);
        assert!(narrow.sigma <= wide.sigma + 1e-12);
    }

    #[test]
    fn secondary_eval_forms() {
        assert_abs_diff_eq!(
            eval_b(&[-0.285537, 0.452847], 6.0),
            0.4052575,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(eval_eta(&[0.25, -1.0, 3.0], 4.0), 3.0, epsilon = 1e-12);
        let kappa = eval_kappa(&[1.07763, -0.531884, 1.0, 0.0], 6.0);
        assert_abs_diff_eq!(kappa, 1.07763 * (-0.531884_f64 * 6.0).exp() * 6.0, epsilon = 1e-12);
        assert!(kappa > 0.0 && kappa < 0.3);
        // Frozen coefficients make the offset variants collapse correctly.
        assert_abs_diff_eq!(
            eval_kappa(&[2.0, 0.0, -1.0, 0.25], 4.0),
            0.75,
            epsilon = 1e-15
        );
    }

    #[test]
    fn synthetic_secondary_parameters_are_recovered() {
        let ms: Vec<usize> = (4..=10).collect();
        let xs: Vec<f64> = ms.iter().map(|&m| m as f64).collect();
        let bs: Vec<f64> = xs.iter().map(|&x| -0.28 / x + 0.45).collect();
        let etas: Vec<f64> = xs.iter().map(|&x| 0.04 * x * x - 0.3 * x + 3.9).collect();
        let kappas: Vec<f64> = xs.iter().map(|&x| 1.1 * (-0.5 * x).exp() * x).collect();
        let fit = secondary_fit(&ms, &bs, &kappas, &etas).unwrap();
        assert_abs_diff_eq!(fit.b_coeffs[0], -0.28, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.b_coeffs[1], 0.45, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.eta_coeffs[0], 0.04, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.eta_coeffs[1], -0.3, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.eta_coeffs[2], 3.9, epsilon = 1e-8);
        assert_eq!(fit.kappa_variant, KappaVariant::ExponentialPower);
        assert_abs_diff_eq!(fit.kappa_coeffs[0], 1.1, epsilon = 1e-6);
        assert_abs_diff_eq!(fit.kappa_coeffs[1], -0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(fit.kappa_coeffs[2], 1.0, epsilon = 1e-6);
        assert_eq!(fit.kappa_coeffs[3], 0.0);
        assert_eq!(fit.kappa_variant.frozen(), &["c4"]);

        let at6 = extrapolate(&fit, 6).unwrap();
        assert_abs_diff_eq!(at6.b, -0.28 / 6.0 + 0.45, epsilon = 1e-8);
        assert_abs_diff_eq!(at6.kappa, 1.1 * (-3.0_f64).exp() * 6.0, epsilon = 1e-6);
    }

    #[test]
    fn secondary_fit_validates_inputs() {
        let ms = vec![4, 5, 6, 7];
        let v = vec![0.4; 4];
        assert!(secondary_fit(&ms, &v, &v, &v).is_err());
        let ms = vec![4, 5, 5, 6, 7];
        let v = vec![0.4; 5];
        assert!(secondary_fit(&ms, &v, &v, &v).is_err());
        let ms = vec![4, 5, 6, 7, 8];
        let bad_kappa = vec![0.4, 0.3, -0.1, 0.2, 0.1];
        let v = vec![0.4; 5];
        assert!(secondary_fit(&ms, &v, &bad_kappa, &v).is_err());
    }

    #[test]
    fn epsilon_tilde_reference_points() {
        assert_abs_diff_eq!(
            epsilon_tilde(1.0, 2.0, 0.9).unwrap(),
            (1.0_f64 / 9.0).sqrt(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(epsilon_tilde(0.7, 3.0, 0.5).unwrap(), 0.7, epsilon = 1e-15);
        // Very steep curves keep nearly the full plateau half width.
        let steep: f64 = epsilon_tilde(0.8, 100.0, 0.9).unwrap();
        assert!((steep - 0.8).abs() / 0.8 < 0.03);
        assert!(epsilon_tilde(1.0, 2.0, 1.0).is_err());
        assert!(epsilon_tilde(-1.0, 2.0, 0.9).is_err());
    }

    fn fit_stub(law: DependenceLaw, kappa: f64, eta: f64) -> HillFit<f64> {
        HillFit {
            m: 6,
            law,
            level: NeighborLevel::Walk,
            b: 0.4,
            kappa,
            eta,
            sigma: 0.01,
            window: (0.0, 2.0 * PI),
            samples: 100,
            iterations: 10,
            exceeds_nominal_height: false,
        }
    }

    #[test]
    fn ratio_forms_agree_when_exponents_match() {
        let a = fit_stub(DependenceLaw::NlFixed, 1.5, 3.0);
        let b = fit_stub(DependenceLaw::NlMl, 1.2, 3.0);
        let full = robustness_ratio(&a, &b, 0.9).unwrap();
        let short = robustness_ratio_simplified(&a, &b).unwrap();
        assert_abs_diff_eq!(full, short, epsilon = 1e-15);
        assert_abs_diff_eq!(short, 1.25, epsilon = 1e-15);
    }

    #[test]
    fn ratio_forms_diverge_when_exponents_differ() {
        // (eta_b - eta_a) / (eta_a eta_b) = -1/20, so the full ratio carries
        // a 9^(1/20) factor the shortcut drops.
        let a = fit_stub(DependenceLaw::NlFixed, 1.0, 4.0);
        let b = fit_stub(DependenceLaw::NlMl, 1.0, 10.0 / 3.0);
        let full = robustness_ratio(&a, &b, 0.9).unwrap();
        let short = robustness_ratio_simplified(&a, &b).unwrap();
        assert_abs_diff_eq!(short, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(full, 9.0_f64.powf(0.05), epsilon = 1e-12);
        assert!((full - short).abs() > 0.1);
    }

    #[test]
    fn simplified_ratio_refuses_other_laws() {
        let a = fit_stub(DependenceLaw::Linear, 1.0, 3.0);
        let b = fit_stub(DependenceLaw::NlFixed, 1.0, 3.0);
        assert!(robustness_ratio_simplified(&a, &b).is_err());
        assert!(robustness_ratio_simplified(&b, &a).is_err());
        let c = fit_stub(DependenceLaw::Const, 1.0, 3.0);
        assert!(robustness_ratio_simplified(&c, &c).is_err());
        // The full form has no such restriction.
        assert!(robustness_ratio(&a, &b, 0.9).is_ok());
    }
}
