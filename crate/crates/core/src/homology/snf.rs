use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Signed, ToPrimitive};

use crate::matrix::IntMatrix;
use crate::{Error, Result};

/// Smith normal form `U A V = D` of an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snf {
    /// Nonzero invariant factors, positive, each dividing the next.
    pub factors: Vec<u64>,
    pub u: Option<IntMatrix>,
    pub v: Option<IntMatrix>,
}

impl Snf {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Invariant factors greater than one.
    pub fn torsion(&self) -> Vec<u64> {
        self.factors.iter().copied().filter(|&d| d > 1).collect()
    }
}

trait Coef: Integer + Signed + Clone + CheckedAdd + CheckedSub + CheckedMul {}
impl<T: Integer + Signed + Clone + CheckedAdd + CheckedSub + CheckedMul> Coef for T {}

type Mat<T> = Vec<Vec<T>>;

/// Smith normal form, with the transforms if `transforms` is set.
///
/// Runs in `i64` with checked arithmetic and falls back to big integers on
/// overflow.
pub fn smith(a: &IntMatrix, transforms: bool) -> Result<Snf> {
    let m: Mat<i64> = a.to_rows();
    if let Some((d, u, v)) = snf_generic(m, a.rows(), a.cols(), transforms) {
        return Ok(Snf {
            factors: d.iter().map(|&x| x as u64).collect(),
            u: u.map(|u| IntMatrix::from_rows(&u)),
            v: v.map(|v| IntMatrix::from_rows(&v)),
        });
    }
    log::debug!("smith form of a {}x{} matrix overflowed i64, retrying with big integers", a.rows(), a.cols());
    let m: Mat<BigInt> = a.to_rows().into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
    let (d, u, v) = snf_generic(m, a.rows(), a.cols(), transforms).expect("big integers do not overflow");
    let small = |m: Mat<BigInt>| -> Result<IntMatrix> {
        let rows: Option<Vec<Vec<i64>>> = m.into_iter().map(|r| r.iter().map(ToPrimitive::to_i64).collect()).collect();
        rows.map(|r| IntMatrix::from_rows(&r))
            .ok_or_else(|| Error::Consistency("smith transform entries exceed 64 bits".into()))
    };
    let factors: Option<Vec<u64>> = d.iter().map(ToPrimitive::to_u64).collect();
    Ok(Snf {
        factors: factors.ok_or_else(|| Error::Consistency("invariant factor exceeds 64 bits".into()))?,
        u: u.map(small).transpose()?,
        v: v.map(small).transpose()?,
    })
}

fn ident<T: Coef>(n: usize) -> Mat<T> {
    (0..n).map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect()
}

/// `row[dst] -= q * row[src]`
fn row_axpy<T: Coef>(m: &mut Mat<T>, dst: usize, src: usize, q: &T) -> Option<()> {
    if q.is_zero() {
        return Some(());
    }
    let (a, b) = if dst < src {
        let (x, y) = m.split_at_mut(src);
        (&mut x[dst], &y[0])
    } else {
        let (x, y) = m.split_at_mut(dst);
        (&mut y[0], &x[src])
    };
    for (x, y) in a.iter_mut().zip(b.iter()) {
        if !y.is_zero() {
            *x = x.checked_sub(&q.checked_mul(y)?)?;
        }
    }
    Some(())
}

/// `col[dst] -= q * col[src]`
fn col_axpy<T: Coef>(m: &mut Mat<T>, dst: usize, src: usize, q: &T) -> Option<()> {
    if q.is_zero() {
        return Some(());
    }
    for row in m.iter_mut() {
        if !row[src].is_zero() {
            let v = row[dst].checked_sub(&q.checked_mul(&row[src])?)?;
            row[dst] = v;
        }
    }
    Some(())
}

fn swap_cols<T>(m: &mut Mat<T>, a: usize, b: usize) {
    if a != b {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
    }
}

#[allow(clippy::type_complexity)]
fn snf_generic<T: Coef>(mut m: Mat<T>, r: usize, c: usize, want: bool) -> Option<(Vec<T>, Option<Mat<T>>, Option<Mat<T>>)> {
    let mut u: Mat<T> = if want { ident(r) } else { Vec::new() };
    let mut v: Mat<T> = if want { ident(c) } else { Vec::new() };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < r.min(c) {
        // Pivot: smallest nonzero entry of the remaining block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..r {
            for j in t..c {
                if !m[i][j].is_zero() && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                    if m[i][j].abs().is_one() {
                        break;
                    }
                }
            }
            if best.is_some_and(|(bi, bj)| m[bi][bj].abs().is_one()) {
                break;
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        swap_cols(&mut m, t, pj);
        if want {
            u.swap(t, pi);
            swap_cols(&mut v, t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..r {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = m[i][t].div_floor(&m[t][t]);
                row_axpy(&mut m, i, t, &q)?;
                if want {
                    row_axpy(&mut u, i, t, &q)?;
                }
                if !m[i][t].is_zero() {
                    m.swap(t, i);
                    if want {
                        u.swap(t, i);
                    }
                    clean = false;
                }
            }
            for j in t + 1..c {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = m[t][j].div_floor(&m[t][t]);
                col_axpy(&mut m, j, t, &q)?;
                if want {
                    col_axpy(&mut v, j, t, &q)?;
                }
                if !m[t][j].is_zero() {
                    swap_cols(&mut m, t, j);
                    if want {
                        swap_cols(&mut v, t, j);
                    }
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let p = m[t][t].clone();
            if !p.abs().is_one() {
                let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !m[i][j].is_multiple_of(&p)));
                if let Some(i) = bad {
                    row_axpy(&mut m, t, i, &(-T::one()))?;
                    if want {
                        row_axpy(&mut u, t, i, &(-T::one()))?;
                    }
                    continue;
                }
            }
            break;
        }
        if m[t][t].is_negative() {
            for x in m[t].iter_mut() {
                *x = -x.clone();
            }
            if want {
                for x in u[t].iter_mut() {
                    *x = -x.clone();
                }
            }
        }
        diag.push(m[t][t].clone());
        t += 1;
    }
    Some((diag, want.then_some(u), want.then_some(v)))
}

/// Inverse of a unimodular matrix, or `None` if it is not unimodular.
pub fn unimodular_inverse(a: &IntMatrix) -> Result<Option<IntMatrix>> {
    if a.rows() != a.cols() {
        return Ok(None);
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Some(IntMatrix::zeros(0, 0)));
    }
    let s = smith(a, true)?;
    if s.rank() != n || s.factors.iter().any(|&d| d != 1) {
        return Ok(None);
    }
    // U A V = I, so A^{-1} = V U.
    Ok(Some(s.v.unwrap().mul(&s.u.unwrap())))
}

pub fn is_unimodular(a: &IntMatrix) -> Result<bool> {
    if a.rows() != a.cols() {
        return Ok(false);
    }
    let s = smith(a, false)?;
    Ok(s.rank() == a.rows() && s.factors.iter().all(|&d| d == 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn diag_matrix(s: &Snf, r: usize, c: usize) -> IntMatrix {
        let mut d = IntMatrix::zeros(r, c);
        for (i, &f) in s.factors.iter().enumerate() {
            d.set(i, i, f as i64);
        }
        d
    }

    #[test]
    fn known_form() {
        let a = IntMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = smith(&a, true).unwrap();
        assert_eq!(s.factors, vec![2, 6, 12]);
    }

    #[test]
    fn inverse_of_unimodular() {
        let a = IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]]);
        let inv = unimodular_inverse(&a).unwrap().unwrap();
        assert!(a.mul(&inv).is_identity());
        assert!(unimodular_inverse(&IntMatrix::from_rows(&[vec![2, 0], vec![0, 1]])).unwrap().is_none());
    }

    proptest! {
        #[test]
        fn transforms_reproduce_the_form(rows in prop::collection::vec(prop::collection::vec(-6i64..7, 4), 3)) {
            let a = IntMatrix::from_rows(&rows);
            let s = smith(&a, true).unwrap();
            let (u, v) = (s.u.clone().unwrap(), s.v.clone().unwrap());
            prop_assert_eq!(u.mul(&a).mul(&v), diag_matrix(&s, 3, 4));
            for w in s.factors.windows(2) {
                prop_assert_eq!(w[1] % w[0], 0);
            }
            prop_assert!(is_unimodular(&u).unwrap() && is_unimodular(&v).unwrap());
        }
    }
}
