//! Taylor coefficients of the transformed Thomas–Fermi equations.
//!
//! With `x = t²` and `f(t) = √u(x)` both equations take the form
//!
//! ```text
//! t (f f'' + f'²) − f f' − S(t, f) = 0
//! ```
//!
//! where the source term is `S = 2 t² f³` for the isolated atom and `S = 2 t⁴ f`
//! for an atom in a strong magnetic field. Writing `f = Σ f_j t^j` with `f_0 = 1`,
//! `f_1 = 0` and the unknown `f_2 = s = u'(0)/2`, the coefficient of `t^(j-1)` in
//! the residual is linear in `f_j`, which gives every later coefficient as an exact
//! polynomial in `s`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use dashu_ratio::RBig;

use crate::algebra::{BigFloat, UniPoly};

/// Smallest expansion order accepted by [`expand`].
pub const MIN_ORDER: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("expansion order {0} is below the minimum of {MIN_ORDER}")]
    OrderTooSmall(usize),
    #[error("requested coefficient index {requested} exceeds table order {available}")]
    OrderExceeded { requested: usize, available: usize },
    #[error("coefficient table is inconsistent: {0}")]
    Inconsistent(String),
}

/// Which Thomas–Fermi equation is being solved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EquationKind {
    /// `u'' = √(u³/x)`
    Atom,
    /// `u'' = √(x u)`
    MagneticField,
}

impl EquationKind {
    pub const ALL: [EquationKind; 2] = [EquationKind::Atom, EquationKind::MagneticField];

    /// Short tag used on the command line and in cache files.
    pub fn tag(self) -> &'static str {
        match self {
            EquationKind::Atom => "atom",
            EquationKind::MagneticField => "magnetic",
        }
    }
}

impl fmt::Display for EquationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for EquationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "atom" => Ok(EquationKind::Atom),
            "magnetic" | "magnetic-field" | "magneticfield" => Ok(EquationKind::MagneticField),
            other => Err(format!("unknown equation `{other}` (expected atom or magnetic)")),
        }
    }
}

/// Exact coefficients `f_0 ..= f_order` as polynomials in `s = f_2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesTable {
    kind: EquationKind,
    coeffs: Vec<UniPoly>,
}

impl SeriesTable {
    /// Rebuilds a table from stored coefficients, checking the fixed leading terms
    /// and that every coefficient satisfies the recursion.
    pub fn from_coeffs(kind: EquationKind, coeffs: Vec<UniPoly>) -> Result<Self, SeriesError> {
        if coeffs.len() <= MIN_ORDER {
            return Err(SeriesError::OrderTooSmall(coeffs.len().saturating_sub(1)));
        }
        let reference = expand(kind, MIN_ORDER)?;
        if coeffs[..=MIN_ORDER] != reference.coeffs[..] {
            return Err(SeriesError::Inconsistent(
                "leading coefficients differ from the equation".into(),
            ));
        }
        for j in MIN_ORDER + 1..coeffs.len() {
            if next_coefficient(kind, &coeffs[..j]) != coeffs[j] {
                return Err(SeriesError::Inconsistent(format!("coefficient f_{j}")));
            }
        }
        Ok(SeriesTable { kind, coeffs })
    }

    pub fn kind(&self) -> EquationKind {
        self.kind
    }

    /// Highest index `j` available.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[UniPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Option<&UniPoly> {
        self.coeffs.get(j)
    }

    /// Appends coefficients until the table reaches `order`.
    pub fn extend_to(&mut self, order: usize) {
        while self.coeffs.len() <= order {
            let next = next_coefficient(self.kind, &self.coeffs);
            self.coeffs.push(next);
        }
    }

    /// A copy holding only `f_0 ..= f_order`.
    pub fn truncated(&self, order: usize) -> SeriesTable {
        SeriesTable {
            kind: self.kind,
            coeffs: self.coeffs[..=order.min(self.order())].to_vec(),
        }
    }

    /// `deg_s(f_j)` for every coefficient (`None` for identically zero ones).
    pub fn degrees(&self) -> Vec<Option<usize>> {
        self.coeffs.iter().map(UniPoly::degree).collect()
    }
}

/// Expands the series through `f_order`.
pub fn expand(kind: EquationKind, order: usize) -> Result<SeriesTable, SeriesError> {
    if order < MIN_ORDER {
        return Err(SeriesError::OrderTooSmall(order));
    }
    let mut table = SeriesTable {
        kind,
        coeffs: vec![UniPoly::one(), UniPoly::zero(), UniPoly::var()],
    };
    table.extend_to(order);
    Ok(table)
}

fn memo() -> &'static RwLock<HashMap<EquationKind, SeriesTable>> {
    static MEMO: OnceLock<RwLock<HashMap<EquationKind, SeriesTable>>> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

/// [`expand`] backed by a process-wide table per equation that only ever grows.
pub fn expand_memoized(kind: EquationKind, order: usize) -> Result<SeriesTable, SeriesError> {
    if order < MIN_ORDER {
        return Err(SeriesError::OrderTooSmall(order));
    }
    if let Some(t) = memo().read().unwrap().get(&kind) {
        if t.order() >= order {
            return Ok(t.truncated(order));
        }
    }
    let mut guard = memo().write().unwrap();
    let entry = guard
        .entry(kind)
        .or_insert_with(|| expand(kind, MIN_ORDER).expect("minimum order"));
    entry.extend_to(order);
    Ok(entry.truncated(order))
}

/// Seeds the in-process memo with a previously computed table.
pub fn seed_memo(table: SeriesTable) {
    let mut guard = memo().write().unwrap();
    let replace = guard
        .get(&table.kind)
        .is_none_or(|t| t.order() < table.order());
    if replace {
        guard.insert(table.kind, table);
    }
}

/// Numeric values of `f_0 ..= f_up_to` at a given slope parameter.
pub fn evaluate_at(
    table: &SeriesTable,
    s_value: &BigFloat,
    up_to: usize,
) -> Result<Vec<BigFloat>, SeriesError> {
    if up_to > table.order() {
        return Err(SeriesError::OrderExceeded {
            requested: up_to,
            available: table.order(),
        });
    }
    Ok(table.coeffs[..=up_to]
        .iter()
        .map(|p| p.eval_float(s_value))
        .collect())
}

/// Exact values of every coefficient at a rational slope parameter.
pub fn evaluate_exact(table: &SeriesTable, s_value: &RBig) -> Vec<RBig> {
    table.coeffs.iter().map(|p| p.eval(s_value)).collect()
}

/// Solves the coefficient of `t^(j-1)` of the residual for `f_j`, `j = known.len()`.
fn next_coefficient(kind: EquationKind, known: &[UniPoly]) -> UniPoly {
    let j = known.len();
    let mut trial: Vec<UniPoly> = known.to_vec();
    trial.push(UniPoly::zero());
    let r0 = residual_coefficient(kind, &trial, j - 1);
    trial[j] = UniPoly::one();
    let r1 = residual_coefficient(kind, &trial, j - 1);
    let linear = &r1 - &r0;
    assert!(
        linear.degree() == Some(0),
        "order-{j} residual must be linear in f_{j} with a constant coefficient"
    );
    let inv = RBig::ONE / linear.coeff(0);
    (-&r0).scale(&inv)
}

/// Coefficient of `t^k` in `t (f f'' + f'²) − f f' − S(t, f)`, with `f` treated as
/// zero beyond the slice.
fn residual_coefficient(kind: EquationKind, f: &[UniPoly], k: usize) -> UniPoly {
    let at = |i: usize| f.get(i);
    let mut acc = UniPoly::zero();

    // t (f f'' + f'^2): coefficient of t^(k-1) in f f'' + f'^2
    if k >= 1 {
        for i in 0..k {
            let m = k - 1 - i;
            if let (Some(a), Some(b)) = (at(i), at(m + 2)) {
                let w = RBig::from((m + 2) * (m + 1));
                acc = &acc + &(a * b).scale(&w);
            }
            if let (Some(a), Some(b)) = (at(i + 1), at(m + 1)) {
                let w = RBig::from((i + 1) * (m + 1));
                acc = &acc + &(a * b).scale(&w);
            }
        }
    }
    // - f f'
    for i in 0..=k {
        let m = k - i;
        if let (Some(a), Some(b)) = (at(i), at(m + 1)) {
            let w = RBig::from(m + 1);
            acc = &acc - &(a * b).scale(&w);
        }
    }
    // - source
    match kind {
        EquationKind::Atom => {
            if k >= 2 {
                let n = k - 2;
                let mut cube = UniPoly::zero();
                for i in 0..=n {
                    let Some(a) = at(i) else { continue };
                    for l in 0..=n - i {
                        if let (Some(b), Some(c)) = (at(l), at(n - i - l)) {
                            cube = &cube + &(&(a * b) * c);
                        }
                    }
                }
                acc = &acc - &cube.scale(&RBig::from(2u8));
            }
        }
        EquationKind::MagneticField => {
            if k >= 4 {
                if let Some(a) = at(k - 4) {
                    acc = &acc - &a.scale(&RBig::from(2u8));
                }
            }
        }
    }
    acc
}
