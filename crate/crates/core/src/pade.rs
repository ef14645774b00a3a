//! `[M/N]` Padé approximants of `f(t)` and the reconstructed profile `u(x) = f(√x)²`.

use dashu_ratio::RBig;

use crate::algebra::{real_roots, BigFloat, UniPoly};
use crate::series::{evaluate_at, expand_memoized, EquationKind, SeriesError};

/// Decimal digits of slack allowed on top of the working precision when checking
/// the matching conditions and singular pivots.
pub const GUARD_DIGITS: u32 = 10;

pub const DEFAULT_M: usize = 5;
pub const DEFAULT_N: usize = 8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PadeError {
    #[error("need {needed} series coefficients for [{m}/{n}], got {got}")]
    TooFewCoefficients {
        m: usize,
        n: usize,
        needed: usize,
        got: usize,
    },
    #[error("denominator system for [{m}/{n}] is singular")]
    SingularSystem { m: usize, n: usize },
    #[error("matching conditions violated by {residual} after solving [{m}/{n}]")]
    InaccurateSolve { m: usize, n: usize, residual: String },
    #[error("x = {0} is negative")]
    NegativeArgument(String),
    #[error("denominator vanishes at t = {t}{}", .nearest.as_ref().map(|p| format!(" (nearest real pole t = {p})")).unwrap_or_default())]
    PoleEncountered { t: String, nearest: Option<String> },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `a(t)/b(t)` with `b_0 = 1`.
#[derive(Clone, Debug)]
pub struct PadeApproximant {
    pub m: usize,
    pub n: usize,
    pub a: Vec<BigFloat>,
    pub b: Vec<BigFloat>,
    /// The `u'(0)` value the series was evaluated at, when built via [`tf_table`].
    pub slope_used: Option<BigFloat>,
    /// Real zeros of `b` on `t > 0`, ascending.
    pub poles: Vec<BigFloat>,
    digits: u32,
}

fn horner(coeffs: &[BigFloat], t: &BigFloat) -> BigFloat {
    let mut acc = BigFloat::zero(t.digits());
    for c in coeffs.iter().rev() {
        acc = &(&acc * t) + c;
    }
    acc
}

impl PadeApproximant {
    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn numerator_at(&self, t: &BigFloat) -> BigFloat {
        horner(&self.a, t)
    }

    pub fn denominator_at(&self, t: &BigFloat) -> BigFloat {
        horner(&self.b, t)
    }

    /// Taylor coefficients of `a(t)/b(t)` through `t^order`.
    pub fn taylor(&self, order: usize) -> Vec<BigFloat> {
        let zero = BigFloat::zero(self.b[0].digits());
        let mut q: Vec<BigFloat> = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let mut acc = self.a.get(k).cloned().unwrap_or_else(|| zero.clone());
            for j in 1..=k.min(self.n) {
                acc = &acc - &(&self.b[j] * &q[k - j]);
            }
            q.push(&acc / &self.b[0]);
        }
        q
    }

    /// Largest `|taylor_k − c_k|` over `k ≤ M + N`.
    pub fn matching_residual(&self, coeffs: &[BigFloat]) -> BigFloat {
        let order = self.m + self.n;
        self.taylor(order)
            .iter()
            .zip(coeffs)
            .map(|(q, c)| (q - c).abs())
            .fold(BigFloat::zero(self.digits), |acc, d| if d > acc { d } else { acc })
    }
}

/// Builds `[M/N]` matching `coeffs` through `t^(M+N)`.
///
/// The coefficients are taken as the exact rationals they represent. The `N`
/// linear conditions on `t^(M+1) … t^(M+N)` are solved exactly for the
/// denominator, the numerator is the truncated product `b(t) · Σ c_k t^k`, and
/// only then is everything rounded to the working precision.
pub fn build_pade(coeffs: &[BigFloat], m: usize, n: usize) -> Result<PadeApproximant, PadeError> {
    let needed = m + n + 1;
    if coeffs.len() < needed {
        return Err(PadeError::TooFewCoefficients {
            m,
            n,
            needed,
            got: coeffs.len(),
        });
    }
    let digits = coeffs.iter().map(BigFloat::digits).min().unwrap_or(16);
    let exact: Vec<RBig> = coeffs[..needed].iter().map(BigFloat::to_rational).collect();
    let c = |idx: isize| -> RBig {
        if idx < 0 {
            RBig::ZERO
        } else {
            exact[idx as usize].clone()
        }
    };

    // rows i = 1..=N: sum_{k=1..N} b_k c_{M+i-k} = -c_{M+i}
    let system: Vec<Vec<RBig>> = (1..=n)
        .map(|i| {
            (1..=n)
                .map(|k| c(m as isize + i as isize - k as isize))
                .collect()
        })
        .collect();
    let rhs: Vec<RBig> = (1..=n).map(|i| -c((m + i) as isize)).collect();
    let tail = solve_exact(system, rhs).ok_or(PadeError::SingularSystem { m, n })?;

    let mut b = Vec::with_capacity(n + 1);
    b.push(RBig::ONE);
    b.extend(tail);
    let a: Vec<RBig> = (0..=m)
        .map(|i| (0..=i.min(n)).fold(RBig::ZERO, |acc, k| acc + &b[k] * &exact[i - k]))
        .collect();

    // Extra digits for a large denominator, so that rounding it keeps the
    // matching conditions at the working precision.
    let magnitude = b
        .iter()
        .filter_map(|x| BigFloat::from_rational(x, digits).abs().log10())
        .map(|l| l.to_f64().ceil().max(0.0) as u32)
        .max()
        .unwrap_or(0);
    let work = digits + GUARD_DIGITS + magnitude;
    let round = |v: &[RBig]| v.iter().map(|x| BigFloat::from_rational(x, work)).collect();
    let mut approx = PadeApproximant {
        m,
        n,
        a: round(&a),
        b: round(&b),
        slope_used: None,
        poles: Vec::new(),
        digits,
    };

    // Rounding a huge denominator can still break the matching.
    let scale = coeffs[..needed]
        .iter()
        .map(BigFloat::abs)
        .fold(BigFloat::one(digits), |acc, x| if x > acc { x } else { acc });
    let tol = &scale * &BigFloat::ten_pow_neg(digits.saturating_sub(GUARD_DIGITS), digits);
    let residual = approx.matching_residual(coeffs);
    if residual > tol {
        return Err(PadeError::InaccurateSolve {
            m,
            n,
            residual: residual.to_sig_string(6),
        });
    }
    approx.poles = positive_real_poles(&approx.b);
    Ok(approx)
}

/// Exact Gaussian elimination; `None` when the matrix is singular.
fn solve_exact(mut a: Vec<Vec<RBig>>, mut rhs: Vec<RBig>) -> Option<Vec<RBig>> {
    let n = rhs.len();
    for k in 0..n {
        let pr = (k..n).find(|&i| a[i][k] != RBig::ZERO)?;
        a.swap(k, pr);
        rhs.swap(k, pr);
        for i in k + 1..n {
            if a[i][k] == RBig::ZERO {
                continue;
            }
            let factor = &a[i][k] / &a[k][k];
            for j in k..n {
                let delta = &factor * &a[k][j];
                a[i][j] -= delta;
            }
            let delta = &factor * &rhs[k];
            rhs[i] -= delta;
        }
    }
    let mut x = vec![RBig::ZERO; n];
    for k in (0..n).rev() {
        let acc = (k + 1..n).fold(rhs[k].clone(), |acc, j| acc - &a[k][j] * &x[j]);
        x[k] = acc / &a[k][k];
    }
    Some(x)
}

/// Real zeros of the denominator on `t > 0`, located exactly on its rational image.
fn positive_real_poles(b: &[BigFloat]) -> Vec<BigFloat> {
    let poly = UniPoly::from_coeffs(b.iter().map(BigFloat::to_rational).collect());
    let Some(lead) = poly.leading().cloned() else {
        return Vec::new();
    };
    if poly.degree() == Some(0) {
        return Vec::new();
    }
    // Cauchy bound 1 + max |b_k / b_N|
    let bound = poly
        .coeffs()
        .iter()
        .map(|c| dashu_base::Abs::abs(c / &lead))
        .fold(RBig::ZERO, |acc, x| if x > acc { x } else { acc })
        + RBig::ONE;
    real_roots(&poly, &RBig::ZERO, &(bound + RBig::ONE), 20)
        .map(|roots| roots.into_iter().map(|r| r.value).collect())
        .unwrap_or_default()
}

/// `u(x) = [M/N](√x)²`.
pub fn eval_u(p: &PadeApproximant, x: &BigFloat) -> Result<BigFloat, PadeError> {
    if x.signum() < 0 {
        return Err(PadeError::NegativeArgument(x.to_sig_string(12)));
    }
    let digits = p.digits.min(x.digits());
    let x = x.with_digits(digits);
    let t = if x.is_zero() { x.clone() } else { x.sqrt() };
    let den = p.denominator_at(&t);
    let floor = BigFloat::ten_pow_neg(digits.saturating_sub(GUARD_DIGITS), digits);
    if den.abs() <= floor {
        let nearest = p
            .poles
            .iter()
            .min_by(|a, b| {
                let da = (*a - &t).abs();
                let db = (*b - &t).abs();
                da.partial_cmp(&db).expect("finite")
            })
            .map(|pole| pole.to_sig_string(12));
        return Err(PadeError::PoleEncountered {
            t: t.to_sig_string(12),
            nearest,
        });
    }
    let f = &p.numerator_at(&t) / &den;
    Ok(&f * &f)
}

/// One row of a `u(x)` table; failed rows keep their error.
#[derive(Clone, Debug)]
pub struct TableRow {
    pub x: BigFloat,
    pub u: Result<BigFloat, PadeError>,
}

/// Builds the `[M/N]` approximant at the given `u'(0)` and evaluates `u` on `xs`.
pub fn tf_table(
    kind: EquationKind,
    slope: &BigFloat,
    m: usize,
    n: usize,
    xs: &[BigFloat],
) -> Result<(PadeApproximant, Vec<TableRow>), PadeError> {
    let digits = slope.digits();
    let table = expand_memoized(kind, (m + n).max(crate::series::MIN_ORDER))?;
    let s = slope / &BigFloat::from_int(2, digits);
    let coeffs = evaluate_at(&table, &s, m + n)?;
    let mut approx = build_pade(&coeffs, m, n)?;
    approx.slope_used = Some(slope.clone());
    let rows = xs
        .iter()
        .map(|x| TableRow {
            x: x.clone(),
            u: eval_u(&approx, x),
        })
        .collect();
    Ok((approx, rows))
}
