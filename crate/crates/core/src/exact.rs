//! Exact rational moments and polynomial kernels.
//!
//! Available for Bergman and Fock profiles with integer `α`, for atoms (every
//! finite `f64` is a dyadic rational) and for raw moment lists. These anchor
//! the floating-point tolerances in the golden tests: Hankel determinants are
//! badly conditioned, so their exact values are the reference.

use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_rational::BigRational;
#[allow(unused_imports)] // shadowed by std float methods when std is linked
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

use crate::MeasureSpec;

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

fn integer_alpha(alpha: f64) -> Option<u64> {
    (alpha >= 0.0 && alpha == alpha.floor() && alpha < 1e6).then_some(alpha as u64)
}

impl MeasureSpec {
    /// Exact `s_d`, when the profile has rational moments.
    pub fn exact_moment(&self, d: usize) -> Option<BigRational> {
        self.validate().ok()?;
        let d = d as u64;
        match self {
            MeasureSpec::Bergman { alpha } => {
                let a = integer_alpha(*alpha)?;
                Some(BigRational::new(
                    factorial(d) * factorial(a),
                    factorial(d + a + 1),
                ))
            }
            MeasureSpec::Fock { alpha } => {
                let a = integer_alpha(*alpha)?;
                Some(BigRational::new(factorial(a + d), factorial(a)))
            }
            MeasureSpec::Atoms(atoms) => {
                let mut total = BigRational::zero();
                for atom in atoms {
                    let t = from_f64(atom.position)?;
                    let w = from_f64(atom.weight)?;
                    total += w * num_traits::pow(t, d as usize);
                }
                Some(total)
            }
            MeasureSpec::RawMoments(s) => from_f64(*s.get(d as usize)?),
        }
    }
}

/// Exact Hankel moment matrix `[s_{d+i+j}]_{i,j ≤ n}`.
pub fn hankel_matrix(spec: &MeasureSpec, d: usize, n: usize) -> Option<Vec<BigRational>> {
    let moments: Option<Vec<BigRational>> = (0..=2 * n).map(|k| spec.exact_moment(d + k)).collect();
    let moments = moments?;
    let m = n + 1;
    let mut out = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            out.push(moments[i + j].clone());
        }
    }
    Some(out)
}

/// Exact determinant by Gaussian elimination over the rationals.
pub fn determinant(a: &[BigRational], n: usize) -> BigRational {
    let mut m = a.to_vec();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r * n + col].is_zero()) else {
            return BigRational::zero();
        };
        if pivot != col {
            for k in 0..n {
                m.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        let p = m[col * n + col].clone();
        det *= &p;
        for row in col + 1..n {
            let factor = &m[row * n + col] / &p;
            if factor.is_zero() {
                continue;
            }
            for k in col..n {
                let delta = &factor * &m[col * n + k];
                m[row * n + k] -= delta;
            }
        }
    }
    det
}

/// Exact Hankel determinant `D_{d,n}`.
pub fn hankel_determinant(spec: &MeasureSpec, d: usize, n: usize) -> Option<BigRational> {
    Some(determinant(&hankel_matrix(spec, d, n)?, n + 1))
}

/// Monic orthogonal polynomials `π_0..π_n` of `x^d dμ` (coefficients in the
/// monomial basis, lowest degree first) and their squared norms `δ_k`.
///
/// `δ_k = D_{d,k} / D_{d,k−1}`, so the orthonormal polynomials are
/// `π_k / √δ_k`. Returns `None` if the measure has fewer than `n+1` support
/// points (some `δ_k` vanishes) or the moments are not rational.
pub fn monic_orthogonal(
    spec: &MeasureSpec,
    d: usize,
    n: usize,
) -> Option<(Vec<Vec<BigRational>>, Vec<BigRational>)> {
    let moments: Option<Vec<BigRational>> = (0..=2 * n).map(|k| spec.exact_moment(d + k)).collect();
    let moments = moments?;
    let inner = |p: &[BigRational], q: &[BigRational]| -> BigRational {
        let mut acc = BigRational::zero();
        for (i, a) in p.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in q.iter().enumerate() {
                if !b.is_zero() {
                    acc += a * b * &moments[i + j];
                }
            }
        }
        acc
    };
    let mut polys: Vec<Vec<BigRational>> = Vec::with_capacity(n + 1);
    let mut norms: Vec<BigRational> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut p = vec![BigRational::zero(); k + 1];
        p[k] = BigRational::one();
        let xk = p.clone();
        for (prev, delta) in polys.iter().zip(&norms) {
            let c = inner(&xk, prev) / delta;
            for (i, coef) in prev.iter().enumerate() {
                p[i] -= &c * coef;
            }
        }
        let delta = inner(&p, &p);
        if !delta.is_positive() {
            return None;
        }
        polys.push(p);
        norms.push(delta);
    }
    Some((polys, norms))
}

fn eval_poly(p: &[BigRational], x: &BigRational) -> BigRational {
    p.iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// Exact `Q_{d,n}(x, y) = Σ_k π_k(x) π_k(y) / δ_k`.
pub fn q_kernel(
    spec: &MeasureSpec,
    d: usize,
    n: usize,
    x: &BigRational,
    y: &BigRational,
) -> Option<BigRational> {
    let (polys, norms) = monic_orthogonal(spec, d, n)?;
    let mut acc = BigRational::zero();
    for (p, delta) in polys.iter().zip(&norms) {
        acc += eval_poly(p, x) * eval_poly(p, y) / delta;
    }
    Some(acc)
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn bergman_exact_moments() {
        let s = MeasureSpec::bergman(0.0).unwrap();
        assert_eq!(s.exact_moment(3).unwrap(), r(1, 4));
        let s = MeasureSpec::bergman(2.0).unwrap();
        // 3! 2! / 6! = 12/720
        assert_eq!(s.exact_moment(3).unwrap(), r(1, 60));
        assert!(MeasureSpec::bergman(0.5).unwrap().exact_moment(1).is_none());
    }

    #[test]
    fn fock_exact_moments() {
        let s = MeasureSpec::fock(1.0).unwrap();
        assert_eq!(s.exact_moment(3).unwrap(), r(24, 1));
    }

    #[test]
    fn two_point_hankel_determinant() {
        let s = MeasureSpec::atoms([(1.0, 1.0), (2.0, 1.0)]).unwrap();
        assert_eq!(hankel_determinant(&s, 0, 1).unwrap(), r(1, 1));
        // only two support points: the 3x3 Hankel matrix is singular
        assert_eq!(hankel_determinant(&s, 0, 2).unwrap(), r(0, 1));
        assert!(monic_orthogonal(&s, 0, 2).is_none());
    }

    #[test]
    fn legendre_on_unit_interval() {
        let s = MeasureSpec::bergman(0.0).unwrap();
        let (polys, norms) = monic_orthogonal(&s, 0, 1).unwrap();
        assert_eq!(polys[1], alloc::vec![r(-1, 2), r(1, 1)]);
        assert_eq!(norms[1], r(1, 12));
        assert_eq!(q_kernel(&s, 0, 1, &r(0, 1), &r(0, 1)).unwrap(), r(4, 1));
    }

    #[test]
    fn norms_are_determinant_ratios() {
        let s = MeasureSpec::fock(2.0).unwrap();
        let (_, norms) = monic_orthogonal(&s, 3, 3).unwrap();
        for (k, norm) in norms.iter().enumerate().skip(1) {
            let ratio =
                hankel_determinant(&s, 3, k).unwrap() / hankel_determinant(&s, 3, k - 1).unwrap();
            assert_eq!(*norm, ratio);
        }
    }
}
