//! Independent check of the Hankel slopes by direct integration and shooting.
//!
//! The integration runs in double-double arithmetic with an embedded
//! Dormand–Prince pair. It starts
//! at a small `x₀ > 0` where the series in `t = √x` is still accurate, since the
//! atom equation's right side is singular at the origin.

mod rk;

use crate::algebra::BigFloat;
use crate::series::{evaluate_at, expand_memoized, EquationKind, SeriesError};
use rk::{div, hermite, next_factor, State, Tableau, R};
use twofloat::TwoFloat;

/// `u` above this value counts as divergence.
pub const BLOW_UP_THRESHOLD: f64 = 10.0;

/// Series order used to seed the integration.
pub const START_ORDER: usize = 30;

/// Tightest local tolerance the double-double stepper is asked to meet.
pub const MIN_TOL: f64 = 1e-21;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("step size underflow at x = {x}")]
    StepUnderflow { x: f64 },
    #[error("bracket endpoints both classify as {0:?}")]
    InvalidBracket(Classification),
    #[error("slope {slope} is undecided up to x = {x_max}")]
    Unresolved { slope: String, x_max: f64 },
    #[error("tolerance must be positive")]
    InvalidTolerance,
    #[error("x_max must be positive")]
    InvalidRange,
    #[error("output points must be non-negative and strictly increasing")]
    InvalidOutputs,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    BlowsUp,
    CrossesZero,
    Undecided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShootOutcome {
    pub classification: Classification,
    /// Where `u` crossed zero or passed the blow-up threshold.
    pub x_event: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub x: f64,
    pub u: f64,
    pub du: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub accepted: usize,
    pub rejected: usize,
}

/// Initial data taken from the truncated series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesStart {
    pub x0: f64,
    pub u: f64,
    pub du: f64,
    /// Magnitude of the last retained term at `t₀ = √x₀`.
    pub last_term: f64,
}

fn to_r(x: &BigFloat) -> R {
    let hi = x.to_f64();
    let lo = (x - &BigFloat::from_f64(hi, x.digits())).to_f64();
    TwoFloat::new_add(hi, lo)
}

fn r(x: f64) -> R {
    TwoFloat::from(x)
}

struct Series {
    coeffs: Vec<R>,
}

impl Series {
    fn new(kind: EquationKind, slope: &BigFloat, order: usize) -> Result<Self, SeriesError> {
        let order = order.max(crate::series::MIN_ORDER);
        let table = expand_memoized(kind, order)?;
        let digits = slope.digits().max(30);
        let s = &slope.with_digits(digits) / &BigFloat::from_int(2, digits);
        let coeffs = evaluate_at(&table, &s, order)?
            .iter()
            .map(to_r)
            .collect();
        Ok(Series { coeffs })
    }

    fn last_term(&self, t: f64) -> f64 {
        let k = self.coeffs.len() - 1;
        (self.coeffs[k].hi() * t.powi(k as i32)).abs()
    }

    /// `(u, u')` at `x = t²`, for `t > 0`.
    fn at(&self, t: R) -> (R, R) {
        let mut f = r(0.0);
        let mut df = r(0.0);
        for (j, c) in self.coeffs.iter().enumerate().rev() {
            f = f * t + *c;
            if j > 0 {
                df = df * t + *c * r(j as f64);
            }
        }
        (f * f, div(f * df, t))
    }
}

/// Largest `x₀ = t₀²` (with `t₀` a power of two, at most 1/2) whose last series
/// term is below `tol · 10⁻²`.
pub fn series_start(
    kind: EquationKind,
    slope: &BigFloat,
    tol: f64,
    order: usize,
) -> Result<SeriesStart, OracleError> {
    if !(tol > 0.0) {
        return Err(OracleError::InvalidTolerance);
    }
    let series = Series::new(kind, slope, order)?;
    Ok(start_from(&series, tol))
}

fn start_from(series: &Series, tol: f64) -> SeriesStart {
    let mut t = 0.5f64;
    while series.last_term(t) >= tol * 1e-2 && t > 1e-6 {
        t *= 0.5;
    }
    let (u, du) = series.at(r(t));
    SeriesStart {
        x0: t * t,
        u: u.hi(),
        du: du.hi(),
        last_term: series.last_term(t),
    }
}

fn rhs(kind: EquationKind) -> impl Fn(R, &State) -> State {
    move |x: R, y: &State| {
        let u = if y[0] > r(0.0) { y[0] } else { r(0.0) };
        let d2 = match kind {
            EquationKind::Atom => div(u * u * u, x).sqrt(),
            EquationKind::MagneticField => (x * u).sqrt(),
        };
        [y[1], d2]
    }
}

/// Bisection for `hermite(x) = level` on `[x0, x1]`, given a sign change.
fn locate(x0: R, y0: &State, x1: R, y1: &State, level: f64) -> f64 {
    let (mut a, mut b) = (x0, x1);
    let level = r(level);
    let below_at_a = y0[0] < level;
    for _ in 0..120 {
        let m = (a + b) * 0.5;
        if m <= a || m >= b {
            break;
        }
        if (hermite(x0, y0, x1, y1, m) < level) == below_at_a {
            a = m;
        } else {
            b = m;
        }
    }
    ((a + b) * 0.5).hi()
}

/// Integrates the boundary-value equation as an initial-value problem with
/// `u(0) = 1`, `u'(0) = slope`, sampling at `outputs`.
///
/// Outputs at or below `x₀` are read from the series.
pub fn integrate_ivp(
    kind: EquationKind,
    slope: &BigFloat,
    x_max: f64,
    tol: f64,
    outputs: &[f64],
) -> Result<(Trajectory, ShootOutcome), OracleError> {
    if !(tol > 0.0) {
        return Err(OracleError::InvalidTolerance);
    }
    if !(x_max > 0.0) {
        return Err(OracleError::InvalidRange);
    }
    if outputs.iter().any(|x| !(*x >= 0.0)) || outputs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(OracleError::InvalidOutputs);
    }
    let tol = tol.max(MIN_TOL);
    let series = Series::new(kind, slope, START_ORDER)?;
    let start = start_from(&series, tol);
    let f = rhs(kind);
    let tab = Tableau::new();

    let mut traj = Trajectory::default();
    let mut pending = outputs.iter().copied().peekable();
    while let Some(&x) = pending.peek() {
        if x > start.x0 {
            break;
        }
        let (u, du) = if x == 0.0 {
            (r(1.0), series.coeffs[2] * r(2.0))
        } else {
            series.at(r(x).sqrt())
        };
        traj.samples.push(Sample {
            x,
            u: u.hi(),
            du: du.hi(),
        });
        pending.next();
    }

    let mut x = r(start.x0);
    let (u0, du0) = series.at(x.sqrt());
    let mut y: State = [u0, du0];
    let mut h_prop = x * r(0.1);
    let x_end = r(x_max);
    loop {
        if x >= x_end {
            let outcome = ShootOutcome {
                classification: Classification::Undecided,
                x_event: None,
            };
            return Ok((traj, outcome));
        }
        let target = pending.peek().copied().filter(|&p| p < x_max).map_or(x_end, r);
        let clamped = h_prop >= target - x;
        let h = if clamped { target - x } else { h_prop };
        if h.hi() < 1e-28 * x.hi().max(1.0) {
            return Err(OracleError::StepUnderflow { x: x.hi() });
        }
        let (y_new, err) = tab.try_step(&f, x, &y, h, tol);
        let err = if y_new.iter().all(|v| v.is_valid()) {
            err
        } else {
            f64::INFINITY
        };
        if err > 1.0 {
            traj.rejected += 1;
            h_prop = h * r(next_factor(err));
            continue;
        }
        traj.accepted += 1;
        let x_new = if clamped { target } else { x + h };
        if y_new[0] <= r(0.0) {
            let outcome = ShootOutcome {
                classification: Classification::CrossesZero,
                x_event: Some(locate(x, &y, x_new, &y_new, 0.0)),
            };
            return Ok((traj, outcome));
        }
        if y_new[0] > r(BLOW_UP_THRESHOLD) {
            let outcome = ShootOutcome {
                classification: Classification::BlowsUp,
                x_event: Some(locate(x, &y, x_new, &y_new, BLOW_UP_THRESHOLD)),
            };
            return Ok((traj, outcome));
        }
        x = x_new;
        y = y_new;
        if clamped && pending.peek().map(|&p| r(p)) == Some(target) {
            traj.samples.push(Sample {
                x: x.hi(),
                u: y[0].hi(),
                du: y[1].hi(),
            });
            pending.next();
        } else {
            h_prop = h * r(next_factor(err));
        }
    }
}

/// Classifies a slope, pushing `x_max` outward while the trajectory is undecided.
pub fn classify(kind: EquationKind, slope: &BigFloat, tol: f64) -> Result<ShootOutcome, OracleError> {
    let mut x_max = 1e2;
    loop {
        let (_, outcome) = integrate_ivp(kind, slope, x_max, tol, &[])?;
        if outcome.classification != Classification::Undecided {
            return Ok(outcome);
        }
        if x_max >= 1e8 {
            return Err(OracleError::Unresolved {
                slope: slope.to_sig_string(20),
                x_max,
            });
        }
        x_max *= 10.0;
    }
}

/// Bisection on `u'(0)` until the bracket is narrower than `tol`.
///
/// The endpoints must classify differently, one diverging and one crossing
/// zero; this is re-checked at every halving.
pub fn shoot_slope(
    kind: EquationKind,
    bracket: (&BigFloat, &BigFloat),
    tol: &BigFloat,
) -> Result<BigFloat, OracleError> {
    if tol.signum() <= 0 {
        return Err(OracleError::InvalidTolerance);
    }
    let digits = bracket.0.digits().max(bracket.1.digits()).max(30);
    let (mut lo, mut hi) = (bracket.0.with_digits(digits), bracket.1.with_digits(digits));
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let int_tol = (tol.to_f64() * 1e-4).max(MIN_TOL);
    let class_lo = classify(kind, &lo, int_tol)?.classification;
    let class_hi = classify(kind, &hi, int_tol)?.classification;
    if class_lo == class_hi {
        return Err(OracleError::InvalidBracket(class_lo));
    }
    let two = BigFloat::from_int(2, digits);
    while &hi - &lo >= *tol {
        let mid = &(&lo + &hi) / &two;
        let class_mid = classify(kind, &mid, int_tol)?.classification;
        if class_mid == class_lo {
            lo = mid;
        } else if class_mid == class_hi {
            hi = mid;
        } else {
            return Err(OracleError::Unresolved {
                slope: mid.to_sig_string(20),
                x_max: 1e8,
            });
        }
    }
    Ok(&(&lo + &hi) / &two)
}
