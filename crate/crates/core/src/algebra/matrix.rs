//! Square matrices of polynomials and their fraction-free determinant.

use dashu_int::{IBig, UBig};
use dashu_ratio::RBig;
use rayon::prelude::*;

use super::poly::UniPoly;
use super::zpoly::{lcm, ZPoly};

/// Row-major `dim × dim` matrix with [`UniPoly`] entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    dim: usize,
    entries: Vec<UniPoly>,
}

impl PolyMatrix {
    /// Panics if `dim == 0` or the entry count is not `dim²`.
    pub fn new(dim: usize, entries: Vec<UniPoly>) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        assert_eq!(entries.len(), dim * dim, "entry count must be dim²");
        PolyMatrix { dim, entries }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> UniPoly) -> Self {
        let entries = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .map(|(i, j)| f(i, j))
            .collect();
        Self::new(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &UniPoly {
        &self.entries[i * self.dim + j]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// Exact determinant by Bareiss fraction-free elimination.
///
/// Entries are scaled to integer polynomials by the common denominator `L`, the
/// elimination runs in `Z[s]` with exact divisions by the previous pivot, and the
/// result is divided by `L^dim`. A zero pivot column is handled by a row swap; a
/// column with no nonzero candidate yields the zero polynomial.
pub fn bareiss_det(m: &PolyMatrix) -> UniPoly {
    let n = m.dim;
    let scale = m
        .entries
        .iter()
        .flat_map(|p| p.coeffs().iter())
        .fold(UBig::ONE, |acc, c| lcm(&acc, c.denominator()));
    let mut rows: Vec<Vec<ZPoly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| ZPoly::from_unipoly_scaled(m.get(i, j), &scale))
                .collect()
        })
        .collect();

    let mut negate = false;
    let mut prev = ZPoly::from_coeffs(vec![IBig::ONE]);
    for k in 0..n.saturating_sub(1) {
        if rows[k][k].is_zero() {
            match (k + 1..n).find(|&i| !rows[i][k].is_zero()) {
                Some(i) => {
                    rows.swap(k, i);
                    negate = !negate;
                }
                None => return UniPoly::zero(),
            }
        }
        let (head, tail) = rows.split_at_mut(k + 1);
        let pivot_row = &head[k];
        let pivot = &pivot_row[k];
        tail.par_iter_mut().for_each(|row| {
            let factor = row[k].clone();
            for j in k + 1..n {
                let num = row[j].mul(pivot).sub(&factor.mul(&pivot_row[j]));
                row[j] = if k == 0 { num } else { num.exact_div(&prev) };
            }
            row[k] = ZPoly::zero();
        });
        prev = rows[k][k].clone();
    }

    let det = rows[n - 1][n - 1].to_unipoly();
    let denom = RBig::from(scale).pow(n as isize);
    let det = det.scale(&(RBig::ONE / denom));
    if negate {
        -det
    } else {
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cofactor_det(m: &PolyMatrix) -> UniPoly {
        fn rec(m: &PolyMatrix, rows: &[usize], cols: &[usize]) -> UniPoly {
            if rows.len() == 1 {
                return m.get(rows[0], cols[0]).clone();
            }
            let mut acc = UniPoly::zero();
            for (idx, &c) in cols.iter().enumerate() {
                let minor_cols: Vec<usize> =
                    cols.iter().copied().filter(|&x| x != c).collect();
                let term = m.get(rows[0], c) * &rec(m, &rows[1..], &minor_cols);
                acc = if idx % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
        let idx: Vec<usize> = (0..m.dim()).collect();
        rec(m, &idx, &idx)
    }

    #[test]
    fn one_by_one() {
        let m = PolyMatrix::new(1, vec![UniPoly::var()]);
        assert_eq!(bareiss_det(&m), UniPoly::var());
    }

    #[test]
    fn two_by_two() {
        let s = UniPoly::var();
        let m = PolyMatrix::new(2, vec![s.clone(), UniPoly::one(), UniPoly::one(), s]);
        assert_eq!(bareiss_det(&m), UniPoly::from_ratios(&[(-1, 1), (0, 1), (1, 1)]));
    }

    #[test]
    fn zero_leading_pivot_swaps_rows() {
        let s = UniPoly::var();
        let m = PolyMatrix::new(
            2,
            vec![UniPoly::zero(), s.clone(), UniPoly::one(), UniPoly::one()],
        );
        assert_eq!(bareiss_det(&m), -s);
    }

    fn small_entry() -> impl Strategy<Value = UniPoly> {
        prop::collection::vec((-5i64..=5, 1u64..=4), 0..=4)
            .prop_map(|v| UniPoly::from_ratios(&v))
    }

    fn matrix() -> impl Strategy<Value = PolyMatrix> {
        (1usize..=4).prop_flat_map(|dim| {
            prop::collection::vec(small_entry(), dim * dim)
                .prop_map(move |e| PolyMatrix::new(dim, e))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(150))]
        #[test]
        fn bareiss_matches_cofactor(m in matrix()) {
            prop_assert_eq!(bareiss_det(&m), cofactor_det(&m));
        }

        #[test]
        fn repeated_row_gives_zero(m in matrix()) {
            let n = m.dim();
            prop_assume!(n >= 2);
            let dup = PolyMatrix::from_fn(n, |i, j| {
                if i == n - 1 { m.get(0, j).clone() } else { m.get(i, j).clone() }
            });
            prop_assert!(bareiss_det(&dup).is_zero());
        }
    }
}
