//! Hankel determinants of the series coefficients and the converging root sequence.
//!
//! `H_D^d` is the determinant of the `D × D` matrix with entries `f_{i+j+d+1}`.
//! Each determinant is a polynomial in `s = f_2`; for fixed `d` one of its real roots
//! converges to `u'(0)/2` as `D` grows.

use dashu_ratio::RBig;
use rayon::prelude::*;

use crate::algebra::{bareiss_det, real_roots, AlgebraError, BigFloat, PolyMatrix, RealRoot, UniPoly};
use crate::series::{expand_memoized, EquationKind, SeriesError, SeriesTable};

pub const MIN_OFFSET: usize = 3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HankelError {
    #[error("offset d = {0} is invalid: d >= 3 is required because f_4 is the first coefficient that depends on f_2")]
    InvalidOffset(usize),
    #[error("Hankel dimension must be at least 1")]
    InvalidDimension,
    #[error("series table has order {available} but H_{dim}^{d} needs order {required}")]
    InsufficientOrder {
        dim: usize,
        d: usize,
        required: usize,
        available: usize,
    },
    #[error("no real root of H_{dim}^{d} in the search window; roots found elsewhere: [{}]", .roots.join(", "))]
    SequenceLost {
        dim: usize,
        d: usize,
        roots: Vec<String>,
    },
    #[error("H_{dim}^{d} is identically zero")]
    DegenerateDeterminant { dim: usize, d: usize },
    #[error("sequence needs at least two entries for a convergence diagnostic")]
    TooShort,
    #[error("invalid search window: {0}")]
    InvalidWindow(String),
    #[error("largest dimension must be at least 3, got {0}")]
    DimensionTooSmall(usize),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Equation, offset `d` and dimension `D = N + 1` of one Hankel determinant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HankelSpec {
    pub kind: EquationKind,
    pub d: usize,
    pub dim: usize,
}

impl HankelSpec {
    pub fn new(kind: EquationKind, d: usize, dim: usize) -> Result<Self, HankelError> {
        if d < MIN_OFFSET {
            return Err(HankelError::InvalidOffset(d));
        }
        if dim == 0 {
            return Err(HankelError::InvalidDimension);
        }
        Ok(HankelSpec { kind, d, dim })
    }

    /// Highest coefficient index the matrix touches: `2(D−1) + d + 1`.
    pub fn required_order(&self) -> usize {
        required_order(self.d, self.dim)
    }
}

pub fn required_order(d: usize, dim: usize) -> usize {
    2 * (dim - 1) + d + 1
}

/// The symmetric matrix `(f_{i+j+d+1})`.
pub fn hankel_matrix(table: &SeriesTable, spec: &HankelSpec) -> Result<PolyMatrix, HankelError> {
    let required = spec.required_order();
    if table.order() < required {
        return Err(HankelError::InsufficientOrder {
            dim: spec.dim,
            d: spec.d,
            required,
            available: table.order(),
        });
    }
    let f = table.coeffs();
    Ok(PolyMatrix::from_fn(spec.dim, |i, j| f[i + j + spec.d + 1].clone()))
}

/// `H_D^d` as an exact polynomial in `s`.
pub fn hankel_poly(table: &SeriesTable, spec: &HankelSpec) -> Result<UniPoly, HankelError> {
    Ok(bareiss_det(&hankel_matrix(table, spec)?))
}

/// One step of a root sequence.
#[derive(Clone, Debug)]
pub struct RootEntry {
    pub dim: usize,
    pub s_root: BigFloat,
    /// `u'(0)` estimate, `2 s_root`.
    pub slope: BigFloat,
    /// `log10 |slope_D − slope_{D−1}|`, absent for the first entry.
    pub log_diff: Option<BigFloat>,
    /// Real roots of `H_D^d` inside the window.
    pub candidates: usize,
    pub possibly_multiple: bool,
}

/// Root sequence `f_2^{[D,d]}` for `D = 2, 3, …` at fixed `d`.
#[derive(Clone, Debug)]
pub struct RootSequence {
    pub kind: EquationKind,
    pub d: usize,
    pub precision: u32,
    pub entries: Vec<RootEntry>,
}

impl RootSequence {
    pub fn last(&self) -> Option<&RootEntry> {
        self.entries.last()
    }

    /// Digits of agreement between the last two slope estimates, `⌊−L⌋`.
    pub fn converged_digits(&self) -> Option<u32> {
        let l = self.last()?.log_diff.as_ref()?.to_f64();
        Some((-l).floor().max(0.0) as u32)
    }
}

/// Default search window for `s`: `(−2, 0)`.
pub fn default_window() -> (RBig, RBig) {
    (RBig::from(-2), RBig::ZERO)
}

/// Follows the root of `H_D^d` for `D = 2 ..= d_max`.
///
/// For `D = 2` the root nearest the window midpoint is taken; afterwards the root
/// nearest the previous selection. Equidistant candidates resolve to the more
/// negative one. Roots are refined to `precision` decimal digits.
pub fn track_sequence(
    kind: EquationKind,
    d: usize,
    d_max: usize,
    precision: u32,
    window: &(RBig, RBig),
) -> Result<RootSequence, HankelError> {
    if d < MIN_OFFSET {
        return Err(HankelError::InvalidOffset(d));
    }
    if d_max < 3 {
        return Err(HankelError::DimensionTooSmall(d_max));
    }
    let (lo, hi) = window;
    if lo >= hi || *hi > RBig::ZERO || *lo < RBig::from(-2) {
        return Err(HankelError::InvalidWindow(format!(
            "({lo}, {hi}) must satisfy -2 <= lo < hi <= 0"
        )));
    }
    let table = expand_memoized(kind, required_order(d, d_max))?;

    // determinants and their roots are independent across D
    let per_dim: Vec<Result<(UniPoly, Vec<RealRoot>), HankelError>> = (2..=d_max)
        .into_par_iter()
        .map(|dim| {
            let spec = HankelSpec::new(kind, d, dim)?;
            let poly = hankel_poly(&table, &spec)?;
            if poly.is_zero() {
                return Err(HankelError::DegenerateDeterminant { dim, d });
            }
            let roots = real_roots(&poly, lo, hi, precision)?;
            Ok((poly, roots))
        })
        .collect();

    let midpoint = BigFloat::from_rational(&((lo + hi) / RBig::from(2)), precision);

    let mut entries: Vec<RootEntry> = Vec::new();
    for (dim, result) in (2..=d_max).zip(per_dim) {
        let (poly, roots) = result?;
        if roots.is_empty() {
            let everywhere = real_roots(&poly, &RBig::from(-1000), &RBig::from(1000), 12)
                .map(|r| r.iter().map(|x| x.value.to_sig_string(12)).collect())
                .unwrap_or_default();
            return Err(HankelError::SequenceLost {
                dim,
                d,
                roots: everywhere,
            });
        }
        let target = entries.last().map_or(&midpoint, |e| &e.s_root);
        let chosen = select_nearest(&roots, target);
        let s_root = chosen.value.clone();
        let slope = &s_root * &BigFloat::from_int(2, precision);
        let log_diff = entries
            .last()
            .map(|prev| log_difference(&slope, &prev.slope, precision));
        entries.push(RootEntry {
            dim,
            s_root,
            slope,
            log_diff,
            candidates: roots.len(),
            possibly_multiple: chosen.possibly_multiple,
        });
    }
    Ok(RootSequence {
        kind,
        d,
        precision,
        entries,
    })
}

/// `log10 |current − previous|`, saturating at `−precision` once the two agree to
/// the working precision.
pub fn log_difference(current: &BigFloat, previous: &BigFloat, precision: u32) -> BigFloat {
    let diff = (current - previous).abs();
    if diff <= BigFloat::ten_pow_neg(precision, precision + 2) {
        BigFloat::from_int(-(precision as i64), precision)
    } else {
        diff.log10().expect("positive difference")
    }
}

fn select_nearest<'a>(roots: &'a [RealRoot], target: &BigFloat) -> &'a RealRoot {
    // roots are ascending, so a strict comparison keeps the more negative on ties
    let mut best = &roots[0];
    let mut best_dist = (&best.value - target).abs();
    for r in &roots[1..] {
        let dist = (&r.value - target).abs();
        if dist < best_dist {
            best = r;
            best_dist = dist;
        }
    }
    best
}

/// The `(D, L)` columns of a sequence, for `D ≥ 3`.
pub fn diagnostics(seq: &RootSequence) -> Result<Vec<(usize, BigFloat)>, HankelError> {
    if seq.entries.len() < 2 {
        return Err(HankelError::TooShort);
    }
    Ok(seq
        .entries
        .iter()
        .filter_map(|e| e.log_diff.clone().map(|l| (e.dim, l)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ratio;
    use crate::series::expand;

    fn entry(dim: usize, slope: &str, log_diff: Option<BigFloat>) -> RootEntry {
        let slope = BigFloat::parse(slope, 30).unwrap();
        RootEntry {
            dim,
            s_root: &slope / &BigFloat::from_int(2, 30),
            slope,
            log_diff,
            candidates: 1,
            possibly_multiple: false,
        }
    }

    #[test]
    fn matrix_index_bookkeeping() {
        let t = expand(EquationKind::Atom, 12).unwrap();
        let m = hankel_matrix(&t, &HankelSpec::new(EquationKind::Atom, 3, 2).unwrap()).unwrap();
        let f = t.coeffs();
        assert_eq!(m.get(0, 0), &f[4]);
        assert_eq!(m.get(0, 1), &f[5]);
        assert_eq!(m.get(1, 0), &f[5]);
        assert_eq!(m.get(1, 1), &f[6]);

        let t = expand(EquationKind::MagneticField, 12).unwrap();
        let spec = HankelSpec::new(EquationKind::MagneticField, 4, 2).unwrap();
        let m = hankel_matrix(&t, &spec).unwrap();
        let f = t.coeffs();
        assert_eq!(m.get(0, 0), &f[5]);
        assert_eq!(m.get(0, 1), &f[6]);
        assert_eq!(m.get(1, 1), &f[7]);
    }

    #[test]
    fn matrices_are_symmetric() {
        let t = expand(EquationKind::Atom, 20).unwrap();
        for d in 3..=6 {
            for dim in 1..=5 {
                let spec = HankelSpec::new(EquationKind::Atom, d, dim).unwrap();
                assert!(hankel_matrix(&t, &spec).unwrap().is_symmetric());
            }
        }
    }

    #[test]
    fn insufficient_order_reports_requirement() {
        let t = expand(EquationKind::Atom, 6).unwrap();
        let spec = HankelSpec::new(EquationKind::Atom, 3, 3).unwrap();
        assert_eq!(
            hankel_matrix(&t, &spec).unwrap_err(),
            HankelError::InsufficientOrder { dim: 3, d: 3, required: 8, available: 6 }
        );
    }

    #[test]
    fn offset_below_three_is_rejected() {
        assert_eq!(
            HankelSpec::new(EquationKind::Atom, 2, 4).unwrap_err(),
            HankelError::InvalidOffset(2)
        );
    }

    #[test]
    fn low_dimension_determinants() {
        // f_4 f_6 - f_5^2 with f_4 = -s^2/2, f_5 = -4s/15, f_6 = s^3/2 - 1/18
        let t = expand(EquationKind::Atom, 8).unwrap();
        let p = hankel_poly(&t, &HankelSpec::new(EquationKind::Atom, 3, 2).unwrap()).unwrap();
        let expect = UniPoly::from_coeffs(vec![
            ratio(0, 1),
            ratio(0, 1),
            ratio(-13, 300),
            ratio(0, 1),
            ratio(0, 1),
            ratio(-1, 4),
        ]);
        assert_eq!(p, expect);

        // f_5 f_7 - f_6^2 with f_5 = 2/15, f_6 = s^3/2, f_7 = -8s/105
        let t = expand(EquationKind::MagneticField, 8).unwrap();
        let spec = HankelSpec::new(EquationKind::MagneticField, 4, 2).unwrap();
        let p = hankel_poly(&t, &spec).unwrap();
        let mut c = vec![ratio(0, 1); 7];
        c[1] = ratio(-16, 1575);
        c[6] = ratio(-1, 4);
        assert_eq!(p, UniPoly::from_coeffs(c));

        for d in 3..=6 {
            let spec = HankelSpec::new(EquationKind::Atom, d, 1).unwrap();
            let t = expand(EquationKind::Atom, 12).unwrap();
            assert_eq!(hankel_poly(&t, &spec).unwrap(), t.coeffs()[d + 1]);
        }
    }

    #[test]
    fn first_atom_root_is_a_cube_root() {
        let seq = track_sequence(EquationKind::Atom, 3, 3, 30, &default_window()).unwrap();
        let first = &seq.entries[0];
        assert_eq!(first.dim, 2);
        assert_eq!(first.candidates, 1);
        let expect = -(13.0f64 / 75.0).cbrt();
        assert!((first.s_root.to_f64() - expect).abs() < 1e-15);
        assert!((first.slope.to_f64() - 2.0 * expect).abs() < 1e-15);
        assert!(first.log_diff.is_none());
        assert!(seq.entries[1].log_diff.is_some());
    }

    #[test]
    fn tracking_is_deterministic() {
        let a = track_sequence(EquationKind::MagneticField, 4, 6, 30, &default_window()).unwrap();
        let b = track_sequence(EquationKind::MagneticField, 4, 6, 30, &default_window()).unwrap();
        for (x, y) in a.entries.iter().zip(&b.entries) {
            assert_eq!(x.s_root.to_rational(), y.s_root.to_rational());
        }
    }

    #[test]
    fn tracker_rejects_bad_inputs() {
        let w = default_window();
        assert!(matches!(
            track_sequence(EquationKind::Atom, 2, 5, 30, &w),
            Err(HankelError::InvalidOffset(2))
        ));
        assert!(matches!(
            track_sequence(EquationKind::Atom, 3, 2, 30, &w),
            Err(HankelError::DimensionTooSmall(2))
        ));
        let bad = (RBig::from(-3), RBig::ZERO);
        assert!(matches!(
            track_sequence(EquationKind::Atom, 3, 5, 30, &bad),
            Err(HankelError::InvalidWindow(_))
        ));
    }

    #[test]
    fn lost_sequence_is_reported() {
        // the D = 2 atom root sits near -0.5576; a window excluding it loses the sequence
        let w = (ratio(-1, 10), ratio(-1, 20));
        match track_sequence(EquationKind::Atom, 3, 3, 20, &w) {
            Err(HankelError::SequenceLost { dim, .. }) => assert_eq!(dim, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn log_difference_saturates() {
        let a = BigFloat::parse("-1.0", 40).unwrap();
        assert_eq!(log_difference(&a, &a, 40).to_f64(), -40.0);
        let b = BigFloat::parse("-1.11477", 40).unwrap();
        let c = BigFloat::parse("-1.58807", 40).unwrap();
        let l = log_difference(&c, &b, 40).to_f64();
        assert!((l - 0.4733f64.log10()).abs() < 1e-12);
    }

    #[test]
    fn diagnostics_examples() {
        let seq = RootSequence {
            kind: EquationKind::Atom,
            d: 3,
            precision: 30,
            entries: vec![
                entry(2, "-1.11477", None),
                entry(3, "-1.58807", Some(BigFloat::parse("0.47330", 30).unwrap().log10().unwrap())),
            ],
        };
        let l = diagnostics(&seq).unwrap();
        assert_eq!(l.len(), 1);
        assert_eq!(l[0].0, 3);
        assert!((l[0].1.to_f64() - (0.47330f64).log10()).abs() < 1e-12);
        assert!((l[0].1.to_f64() + 0.3249).abs() < 1e-4);

        let short = RootSequence { entries: vec![entry(2, "-1", None)], ..seq };
        assert_eq!(diagnostics(&short).unwrap_err(), HankelError::TooShort);
    }
}
