//! Integer-coefficient polynomials used internally by elimination and root isolation.

use dashu_base::{Gcd, Sign, UnsignedAbs};
use dashu_int::{IBig, UBig};
use dashu_ratio::RBig;

use super::poly::UniPoly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct ZPoly {
    pub(crate) coeffs: Vec<IBig>,
}

impl ZPoly {
    pub(crate) fn zero() -> Self {
        ZPoly { coeffs: Vec::new() }
    }

    pub(crate) fn from_coeffs(mut coeffs: Vec<IBig>) -> Self {
        while coeffs.last().is_some_and(|c| *c == IBig::ZERO) {
            coeffs.pop();
        }
        ZPoly { coeffs }
    }

    /// `p * scale` where `scale` is a positive integer clearing every denominator.
    pub(crate) fn from_unipoly_scaled(p: &UniPoly, scale: &UBig) -> Self {
        let scale = IBig::from(scale.clone());
        Self::from_coeffs(
            p.coeffs()
                .iter()
                .map(|c| {
                    let (n, d) = c.clone().into_parts();
                    n * (&scale / IBig::from(d))
                })
                .collect(),
        )
    }

    /// A positive rational multiple of `p` with integer, coprime coefficients.
    pub(crate) fn primitive_of(p: &UniPoly) -> Self {
        let den = p
            .coeffs()
            .iter()
            .fold(UBig::ONE, |acc, c| lcm(&acc, c.denominator()));
        Self::from_unipoly_scaled(p, &den).primitive()
    }

    pub(crate) fn to_unipoly(&self) -> UniPoly {
        UniPoly::from_coeffs(self.coeffs.iter().cloned().map(RBig::from).collect())
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub(crate) fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub(crate) fn leading(&self) -> &IBig {
        self.coeffs.last().expect("nonzero polynomial")
    }

    pub(crate) fn content(&self) -> UBig {
        self.coeffs
            .iter()
            .filter(|c| **c != IBig::ZERO)
            .fold(UBig::ZERO, |acc, c| {
                if acc == UBig::ZERO {
                    c.unsigned_abs()
                } else {
                    (&acc).gcd(c.unsigned_abs())
                }
            })
    }

    /// Divides out the content, keeping the sign of every coefficient.
    pub(crate) fn primitive(self) -> Self {
        if self.is_zero() {
            return self;
        }
        let g = IBig::from(self.content());
        if g == IBig::ONE {
            return self;
        }
        ZPoly {
            coeffs: self.coeffs.into_iter().map(|c| c / &g).collect(),
        }
    }

    pub(crate) fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * IBig::from(k))
                .collect(),
        )
    }

    pub(crate) fn neg(self) -> Self {
        ZPoly {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }

    pub(crate) fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![IBig::ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == IBig::ZERO {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(out)
    }

    pub(crate) fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = IBig::ZERO;
        Self::from_coeffs(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).unwrap_or(&zero) - rhs.coeffs.get(k).unwrap_or(&zero)
                })
                .collect(),
        )
    }

    /// Quotient of an exact division; panics if `divisor` does not divide `self`.
    pub(crate) fn exact_div(&self, divisor: &Self) -> Self {
        let dd = divisor.degree().expect("division by the zero polynomial");
        if self.is_zero() {
            return Self::zero();
        }
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        let n = rem.len();
        assert!(n > dd, "inexact polynomial division");
        let mut quot = vec![IBig::ZERO; n - dd];
        for k in (0..quot.len()).rev() {
            let top = &rem[k + dd];
            if *top == IBig::ZERO {
                continue;
            }
            let q = top / lead;
            debug_assert!(&q * lead == *top, "inexact coefficient division");
            for (i, b) in divisor.coeffs.iter().enumerate() {
                rem[k + i] -= &q * b;
            }
            quot[k] = q;
        }
        debug_assert!(rem.iter().all(|c| *c == IBig::ZERO), "nonzero remainder");
        Self::from_coeffs(quot)
    }

    /// Remainder of `self` by `divisor` up to a positive constant factor.
    ///
    /// Uses the pseudo-remainder with multiplier `|lc|^(δ+1)`, so the sign of the
    /// true Euclidean remainder is preserved.
    pub(crate) fn signed_prem(&self, divisor: &Self) -> Self {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return self.clone();
        }
        let lead = divisor.leading().clone();
        let lead_abs = IBig::from((&lead).unsigned_abs());
        let lead_sign = if lead.sign() == Sign::Negative { -1 } else { 1 };
        let steps = rem.len() - dd;
        for k in (0..steps).rev() {
            // rem <- |lc| * rem - sign(lc) * rem_top * x^k * divisor
            let top = rem[k + dd].clone();
            for c in rem.iter_mut() {
                *c *= &lead_abs;
            }
            if top != IBig::ZERO {
                let t = if lead_sign < 0 { -top } else { top };
                for (i, b) in divisor.coeffs.iter().enumerate() {
                    rem[k + i] -= &t * b;
                }
            }
            debug_assert!(rem[k + dd] == IBig::ZERO);
        }
        rem.truncate(dd);
        Self::from_coeffs(rem)
    }

    /// Greatest common divisor up to sign, primitive.
    pub(crate) fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone().primitive(), other.clone().primitive());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.signed_prem(&b).primitive();
            a = b;
            b = r;
        }
        if !a.is_zero() && a.leading().sign() == Sign::Negative {
            a = a.neg();
        }
        a
    }

    /// Sign of `p(num/den)` for `den > 0`, computed exactly.
    pub(crate) fn sign_at(&self, num: &IBig, den: &IBig) -> i8 {
        if self.is_zero() {
            return 0;
        }
        // homogeneous Horner: sum c_k num^k den^(n-k)
        let mut acc = self.leading().clone();
        let mut den_pow = IBig::ONE;
        for c in self.coeffs.iter().rev().skip(1) {
            den_pow *= den;
            acc = acc * num + c * &den_pow;
        }
        match acc.sign() {
            _ if acc == IBig::ZERO => 0,
            Sign::Negative => -1,
            Sign::Positive => 1,
        }
    }
}

pub(crate) fn lcm(a: &UBig, b: &UBig) -> UBig {
    if *a == UBig::ZERO || *b == UBig::ZERO {
        return UBig::ZERO;
    }
    let g = a.gcd(b);
    a / g * b
}
