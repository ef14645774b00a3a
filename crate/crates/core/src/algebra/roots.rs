//! Real-root isolation with Sturm sequences and exact bisection refinement.

use dashu_int::{IBig, UBig};
use dashu_ratio::RBig;

use super::float::BigFloat;
use super::poly::UniPoly;
use super::zpoly::ZPoly;
use super::AlgebraError;

/// A refined real root together with the rational interval that isolated it.
#[derive(Clone, Debug)]
pub struct RealRoot {
    /// Midpoint of the final refinement interval.
    pub value: BigFloat,
    /// Isolating interval `(lo, hi]` before refinement.
    pub isolating: (RBig, RBig),
    /// Final bracket, narrower than `10^-precision`.
    pub bracket: (RBig, RBig),
    /// Set when the root is also a root of `gcd(p, p')`.
    pub possibly_multiple: bool,
}

/// Sturm chain of a square-free integer polynomial.
#[derive(Clone, Debug)]
pub(crate) struct SturmChain {
    seq: Vec<ZPoly>,
}

impl SturmChain {
    pub(crate) fn new(p: &ZPoly) -> Self {
        let mut seq = vec![p.clone(), p.derivative().primitive()];
        loop {
            let n = seq.len();
            if seq[n - 1].degree().unwrap_or(0) == 0 || seq[n - 1].is_zero() {
                break;
            }
            let r = seq[n - 2].signed_prem(&seq[n - 1]).neg().primitive();
            if r.is_zero() {
                break;
            }
            seq.push(r);
        }
        SturmChain { seq }
    }

    fn variations(&self, x: &RBig) -> usize {
        let num = x.numerator();
        let den = IBig::from(x.denominator().clone());
        let mut last = 0i8;
        let mut changes = 0;
        for p in &self.seq {
            let s = p.sign_at(num, &den);
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
        changes
    }

    /// Number of distinct roots in the half-open interval `(a, b]`.
    pub(crate) fn count(&self, a: &RBig, b: &RBig) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }
}

fn sign_at(p: &ZPoly, x: &RBig) -> i8 {
    p.sign_at(x.numerator(), &IBig::from(x.denominator().clone()))
}

fn half() -> RBig {
    RBig::from_parts(IBig::ONE, UBig::from(2u8))
}

/// Square-free part of a nonzero integer polynomial, plus `gcd(p, p')`.
fn square_free(p: &ZPoly) -> (ZPoly, ZPoly) {
    let g = p.gcd(&p.derivative());
    if g.degree() == Some(0) {
        (p.clone().primitive(), g)
    } else {
        (p.exact_div(&g).primitive(), g)
    }
}

/// Every real root of `p` in the open interval `(lo, hi)`, ascending.
///
/// Roots are isolated exactly with a Sturm sequence of the square-free part of
/// `p`, then refined by exact bisection until the bracket is narrower than
/// `10^-precision`. Each root is reported once regardless of multiplicity.
pub fn real_roots(
    p: &UniPoly,
    lo: &RBig,
    hi: &RBig,
    precision: u32,
) -> Result<Vec<RealRoot>, AlgebraError> {
    if p.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    if lo >= hi {
        return Err(AlgebraError::EmptyInterval);
    }
    let z = ZPoly::primitive_of(p);
    if z.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let (sf, g) = square_free(&z);
    let chain = SturmChain::new(&sf);
    let mult_chain = (g.degree().unwrap_or(0) > 0).then(|| SturmChain::new(&square_free(&g).0));

    let mut isolated = Vec::new();
    let mut stack = vec![(lo.clone(), hi.clone(), chain.count(lo, hi))];
    while let Some((a, b, c)) = stack.pop() {
        match c {
            0 => {}
            1 => isolated.push((a, b)),
            _ => {
                let mid = (&a + &b) * half();
                let left = chain.count(&a, &mid);
                stack.push((mid.clone(), b, c - left));
                stack.push((a, mid, left));
            }
        }
    }
    isolated.sort_by(|x, y| x.0.cmp(&y.0));

    let tol = RBig::from_parts(IBig::ONE, UBig::from(10u8).pow(precision as usize));
    let mut roots = Vec::with_capacity(isolated.len());
    for (a, b) in isolated {
        let sb = sign_at(&sf, &b);
        if sb == 0 && b == *hi {
            continue;
        }
        let possibly_multiple = mult_chain.as_ref().is_some_and(|mc| mc.count(&a, &b) > 0);
        let bracket = refine(&sf, a.clone(), b.clone(), sb, &tol);
        let mid = (&bracket.0 + &bracket.1) * half();
        roots.push(RealRoot {
            value: BigFloat::from_rational(&mid, precision + 2),
            isolating: (a, b),
            bracket,
            possibly_multiple,
        });
    }
    Ok(roots)
}

/// Shrinks `(a, b]` holding one simple root of `p` until narrower than `tol`.
fn refine(p: &ZPoly, mut a: RBig, mut b: RBig, sb: i8, tol: &RBig) -> (RBig, RBig) {
    if sb == 0 {
        return (b.clone(), b);
    }
    while &b - &a >= *tol {
        let mid = (&a + &b) * half();
        match sign_at(p, &mid) {
            0 => return (mid.clone(), mid),
            s if s == sb => b = mid,
            _ => a = mid,
        }
    }
    (a, b)
}
