//! Orthonormal polynomials `P_{d,0..n}` of the shifted measures `x^d dμ` and
//! their polynomial reproducing kernels `Q_{d,n}(x, y) = Σ_{k≤n} P_{d,k}(x) P_{d,k}(y)`.
//!
//! The production path never forms Hankel determinants. The measure is first
//! normalized to the probability measure `x^d dμ / s_d` (moments
//! `s_{d+j}/s_d`), its Gram matrix in the monomial basis is diagonally
//! equilibrated and Cholesky-factored, and the rows of the inverse factor give
//! the orthonormal coefficients. The scale `1/√s_d` is carried separately in
//! log form so large shifts never overflow.
//!
//! Atomic profiles take a different route: as `d` grows the mass of `x^d dμ`
//! concentrates on the outermost atoms and the monomial Gram matrix becomes
//! singular to working precision, so their coefficients come from the discrete
//! Stieltjes procedure run directly on the atoms.
//!
//! The determinant formulas `P_{d,n} = D_{d,n}(x) / √(D_{d,n−1} D_{d,n})` and
//! Heine's multiple-sum representation of `D_{d,n}` are provided as oracles.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by std float methods when std is linked
use num_traits::Float;

use crate::linalg;
use crate::{Error, MeasureSpec, Result};

/// Equilibrated Gram matrices with a larger condition number are rejected.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct OrthoBasis {
    d: usize,
    n: usize,
    /// Row-major `(n+1)²` lower-triangular coefficients of the orthonormal
    /// polynomials of `x^d dμ / s_d`, lowest degree first.
    unit: Vec<f64>,
    ln_moment: f64,
    cond_estimate: f64,
}

impl OrthoBasis {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Condition number of the diagonally equilibrated Gram matrix of
    /// `1, x, …, x^n` under `x^d dμ / s_d`.
    pub fn cond_estimate(&self) -> f64 {
        self.cond_estimate
    }

    /// `ln s_d`.
    pub fn ln_moment(&self) -> f64 {
        self.ln_moment
    }

    /// `1/√s_d`, the factor between the normalized and the true polynomials.
    pub fn scale(&self) -> f64 {
        (-0.5 * self.ln_moment).exp()
    }

    /// Monomial coefficients of `P_{d,k}`, lowest degree first.
    pub fn coefficients(&self, k: usize) -> Vec<f64> {
        let s = self.scale();
        self.unit_row(k).iter().map(|c| c * s).collect()
    }

    /// Coefficient rows of `P_{d,0..n}` padded to `n+1` columns.
    pub fn coefficient_table(&self) -> Vec<Vec<f64>> {
        let s = self.scale();
        let m = self.n + 1;
        (0..m)
            .map(|k| {
                self.unit[k * m..(k + 1) * m]
                    .iter()
                    .map(|c| c * s)
                    .collect()
            })
            .collect()
    }

    fn unit_row(&self, k: usize) -> &[f64] {
        let m = self.n + 1;
        &self.unit[k * m..k * m + k + 1]
    }

    /// Value of the orthonormal polynomial of `x^d dμ / s_d` of degree `k`.
    pub fn eval_unit(&self, k: usize, x: f64) -> f64 {
        horner(self.unit_row(k), x)
    }

    /// `P_{d,k}(x)`.
    ///
    /// # Panics
    /// If `k > n`.
    pub fn eval(&self, k: usize, x: f64) -> f64 {
        assert!(k <= self.n, "degree {k} above basis size {}", self.n);
        self.eval_unit(k, x) * self.scale()
    }

    /// `s_d · Q_{d,k}(x, y)`, the kernel of the normalized measure.
    pub fn q_unit(&self, k: usize, x: f64, y: f64) -> f64 {
        (0..=k.min(self.n))
            .map(|j| self.eval_unit(j, x) * self.eval_unit(j, y))
            .sum()
    }

    /// `Q_{d,k}(x, y)` for any `k ≤ n`; bases are nested, so a basis built to
    /// degree `n` serves every smaller degree.
    pub fn q(&self, k: usize, x: f64, y: f64) -> f64 {
        self.q_unit(k, x, y) * (-self.ln_moment).exp()
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Builds `P_{d,0..n}` for the measure `x^d dμ`.
pub fn build_basis(spec: &MeasureSpec, d: usize, n: usize) -> Result<OrthoBasis> {
    spec.validate()?;
    if let Some(available) = spec.support_size(d) {
        if n + 1 > available {
            return Err(Error::Rank {
                degree: n,
                needed: n + 1,
                available,
            });
        }
    }
    let m = n + 1;
    let ratios = (0..=2 * n)
        .map(|j| spec.moment_ratio(d, j))
        .collect::<Result<Vec<f64>>>()?;
    let ln_moment = spec.ln_moment(d)?;

    let diag: Vec<f64> = (0..m).map(|i| ratios[2 * i].sqrt()).collect();
    let mut equilibrated = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            equilibrated[i * m + j] = ratios[i + j] / (diag[i] * diag[j]);
        }
    }
    let cond_estimate = linalg::spd_condition(&equilibrated, m);

    let unit = if matches!(spec, MeasureSpec::Atoms(_)) {
        stieltjes_coefficients(spec, d, n)?
    } else {
        if !(cond_estimate <= CONDITION_LIMIT) {
            return Err(Error::Conditioning {
                cond: cond_estimate,
            });
        }
        let l = linalg::cholesky(&equilibrated, m).ok_or(Error::Conditioning {
            cond: cond_estimate,
        })?;
        let mut inv = linalg::invert_lower(&l, m);
        for k in 0..m {
            for j in 0..=k {
                inv[k * m + j] /= diag[j];
            }
        }
        inv
    };

    Ok(OrthoBasis {
        d,
        n,
        unit,
        ln_moment,
        cond_estimate,
    })
}

/// Discrete Stieltjes procedure on the atoms of `x^d dμ / s_d`.
fn stieltjes_coefficients(spec: &MeasureSpec, d: usize, n: usize) -> Result<Vec<f64>> {
    let atoms = spec.shifted_atoms(d)?;
    if atoms.len() < n + 1 {
        // weights of the innermost atoms underflowed
        return Err(Error::Conditioning {
            cond: f64::INFINITY,
        });
    }
    let m = n + 1;
    let nodes: Vec<f64> = atoms.iter().map(|a| a.position).collect();
    let probs: Vec<f64> = atoms.iter().map(|a| a.weight).collect();
    let norm_of = |vals: &[f64]| -> f64 { vals.iter().zip(&probs).map(|(v, p)| p * v * v).sum() };

    let mut unit = vec![0.0; m * m];
    let mut prev_vals = vec![0.0; nodes.len()];
    let mut prev_coeffs = vec![0.0; m];
    let mut cur_vals = vec![1.0; nodes.len()];
    let mut cur_coeffs = vec![0.0; m];
    cur_coeffs[0] = 1.0;
    let mut prev_norm = 1.0;
    let mut cur_norm = norm_of(&cur_vals);
    for k in 0..m {
        if !(cur_norm > 0.0) || !cur_norm.is_finite() {
            return Err(Error::Conditioning {
                cond: f64::INFINITY,
            });
        }
        let inv = 1.0 / cur_norm.sqrt();
        for j in 0..=k {
            unit[k * m + j] = cur_coeffs[j] * inv;
        }
        if k == n {
            break;
        }
        let a: f64 = cur_vals
            .iter()
            .zip(&nodes)
            .zip(&probs)
            .map(|((v, t), p)| p * t * v * v)
            .sum::<f64>()
            / cur_norm;
        let b = if k == 0 { 0.0 } else { cur_norm / prev_norm };
        let next_vals: Vec<f64> = (0..nodes.len())
            .map(|i| (nodes[i] - a) * cur_vals[i] - b * prev_vals[i])
            .collect();
        let mut next_coeffs = vec![0.0; m];
        for j in 0..=k {
            next_coeffs[j + 1] += cur_coeffs[j];
            next_coeffs[j] -= a * cur_coeffs[j] + b * prev_coeffs[j];
        }
        prev_vals = core::mem::replace(&mut cur_vals, next_vals);
        prev_coeffs = core::mem::replace(&mut cur_coeffs, next_coeffs);
        prev_norm = cur_norm;
        cur_norm = norm_of(&cur_vals);
    }
    Ok(unit)
}

/// `P_{d,k}(x)` for a one-off evaluation.
pub fn eval_p(basis: &OrthoBasis, k: usize, x: f64) -> Result<f64> {
    if k > basis.n {
        return Err(Error::Index(format!(
            "degree {k} above basis size {}",
            basis.n
        )));
    }
    Ok(basis.eval(k, x))
}

/// `Q_{d,n}(x, y)` built from scratch.
pub fn eval_q(spec: &MeasureSpec, d: usize, n: usize, x: f64, y: f64) -> Result<f64> {
    Ok(build_basis(spec, d, n)?.q(n, x, y))
}

/// `D_{d,n} = det[s_{d+i+j}]_{i,j≤n}` in floating point; `D_{d,−1} = 1`.
pub fn hankel_determinant(spec: &MeasureSpec, d: usize, n: Option<usize>) -> Result<f64> {
    let Some(n) = n else { return Ok(1.0) };
    let m = n + 1;
    let mut a = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            a[i * m + j] = spec.moment(d + i + j)?;
        }
    }
    Ok(linalg::determinant(&a, m))
}

/// `D_{d,n}(x)`: the Hankel determinant with its last row replaced by
/// `1, x, …, x^n`.
pub fn hankel_polynomial_determinant(
    spec: &MeasureSpec,
    d: usize,
    n: usize,
    x: f64,
) -> Result<f64> {
    let m = n + 1;
    let mut a = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..m {
            a[i * m + j] = spec.moment(d + i + j)?;
        }
    }
    for j in 0..m {
        a[n * m + j] = x.powi(j as i32);
    }
    Ok(linalg::determinant(&a, m))
}

/// `D_{d,n}(x) / √(D_{d,n−1} D_{d,n})`.
pub fn determinant_polynomial(spec: &MeasureSpec, d: usize, n: usize, x: f64) -> Result<f64> {
    let lower = hankel_determinant(spec, d, n.checked_sub(1))?;
    let upper = hankel_determinant(spec, d, Some(n))?;
    Ok(hankel_polynomial_determinant(spec, d, n, x)? / (lower * upper).sqrt())
}

fn combinations(len: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > len {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + len - k {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Heine's representation of `D_{d,n}` over an atomic profile: the sum over
/// `(n+1)`-subsets `S` of atoms of `Π_{i∈S} w_i t_i^d · Π_{j<k ∈ S} (t_j − t_k)²`.
pub fn heine_determinant(spec: &MeasureSpec, d: usize, n: usize) -> Result<f64> {
    let MeasureSpec::Atoms(atoms) = spec else {
        return Err(Error::Unsupported("Heine sums need an atomic measure"));
    };
    spec.validate()?;
    let mut total = 0.0;
    combinations(atoms.len(), n + 1, |subset| {
        let mut term = 1.0;
        for (a, &i) in subset.iter().enumerate() {
            term *= atoms[i].weight * atoms[i].position.powi(d as i32);
            for &j in &subset[a + 1..] {
                let gap = atoms[i].position - atoms[j].position;
                term *= gap * gap;
            }
        }
        total += term;
    });
    Ok(total)
}

/// Heine's representation of `D_{d,n}(x)`: the sum over `n`-subsets of
/// `Π_{i∈S} (x − t_i) w_i t_i^d · Π_{j<k ∈ S} (t_j − t_k)²`.
pub fn heine_polynomial_determinant(spec: &MeasureSpec, d: usize, n: usize, x: f64) -> Result<f64> {
    let MeasureSpec::Atoms(atoms) = spec else {
        return Err(Error::Unsupported("Heine sums need an atomic measure"));
    };
    spec.validate()?;
    if n == 0 {
        return Ok(1.0);
    }
    let mut total = 0.0;
    combinations(atoms.len(), n, |subset| {
        let mut term = 1.0;
        for (a, &i) in subset.iter().enumerate() {
            term *= (x - atoms[i].position) * atoms[i].weight * atoms[i].position.powi(d as i32);
            for &j in &subset[a + 1..] {
                let gap = atoms[i].position - atoms[j].position;
                term *= gap * gap;
            }
        }
        total += term;
    });
    Ok(total)
}

/// Relative discrepancy between `D_{d,n}` from the moment matrix and from
/// Heine's sum over the atoms.
pub fn heine_check(spec: &MeasureSpec, d: usize, n: usize) -> Result<f64> {
    let heine = heine_determinant(spec, d, n)?;
    let available = spec.support_size(d).unwrap_or(0);
    if heine == 0.0 || n + 1 > available {
        return Err(Error::Rank {
            degree: n,
            needed: n + 1,
            available,
        });
    }
    let direct = hankel_determinant(spec, d, Some(n))?;
    Ok((direct - heine).abs() / heine.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact;

    #[test]
    fn constant_bergman_polynomial() {
        let b = build_basis(&MeasureSpec::bergman(0.0).unwrap(), 0, 0).unwrap();
        assert_eq!(b.coefficients(0), alloc::vec![1.0]);
        assert_eq!(b.eval(0, 0.7), 1.0);
    }

    #[test]
    fn shifted_legendre() {
        let b = build_basis(&MeasureSpec::bergman(0.0).unwrap(), 0, 1).unwrap();
        let c = b.coefficients(1);
        let s3 = 3f64.sqrt();
        assert!((c[0] + s3).abs() < 1e-14 && (c[1] - 2.0 * s3).abs() < 1e-14);
        assert!(b.eval(1, 0.5).abs() < 1e-15);
        assert!((b.q(1, 0.0, 0.0) - 4.0).abs() < 1e-13);
    }

    #[test]
    fn laguerre_sign_convention() {
        let b = build_basis(&MeasureSpec::fock(0.0).unwrap(), 0, 1).unwrap();
        let c = b.coefficients(1);
        assert!((c[0] + 1.0).abs() < 1e-14 && (c[1] - 1.0).abs() < 1e-14);
        assert!((b.eval(1, 0.0) + 1.0).abs() < 1e-14);
    }

    #[test]
    fn degree_above_basis_is_an_index_error() {
        let b = build_basis(&MeasureSpec::fock(0.0).unwrap(), 0, 1).unwrap();
        assert!(matches!(eval_p(&b, 2, 0.0), Err(Error::Index(_))));
    }

    #[test]
    fn rank_error_for_small_atomic_support() {
        let spec = MeasureSpec::atoms([(0.0, 1.0), (1.0, 1.0)]).unwrap();
        assert!(build_basis(&spec, 0, 1).is_ok());
        assert!(matches!(build_basis(&spec, 1, 1), Err(Error::Rank { .. })));
    }

    #[test]
    fn conditioning_error_is_reported() {
        let spec = MeasureSpec::fock(0.0).unwrap();
        match build_basis(&spec, 0, 14) {
            Err(Error::Conditioning { cond }) => assert!(cond > CONDITION_LIMIT),
            other => panic!("expected conditioning error, got {other:?}"),
        }
    }

    #[test]
    fn nested_bases_agree() {
        let spec = MeasureSpec::bergman(1.5).unwrap();
        let small = build_basis(&spec, 4, 1).unwrap();
        let big = build_basis(&spec, 4, 3).unwrap();
        for x in [0.0, 0.3, 0.9] {
            assert!((small.q(1, x, 0.2) - big.q(1, x, 0.2)).abs() < 1e-11);
        }
    }

    #[test]
    fn atomic_kernel_matches_lagrange_form() {
        // exactly two atoms: Q_{d,1}(x,y) = Σ_k ℓ_k(x) ℓ_k(y) / (w_k t_k^d)
        let (t1, w1, t2, w2) = (1.0, 0.5, 4.0, 0.5);
        let spec = MeasureSpec::atoms([(t1, w1), (t2, w2)]).unwrap();
        for d in [0usize, 5, 30, 200] {
            let b = build_basis(&spec, d, 1).unwrap();
            let (x, y) = (0.7, 2.5);
            let l1 = |s: f64| (s - t2) / (t1 - t2);
            let l2 = |s: f64| (s - t1) / (t2 - t1);
            let direct =
                l1(x) * l1(y) / (w1 * t1.powi(d as i32)) + l2(x) * l2(y) / (w2 * t2.powi(d as i32));
            let got = b.q(1, x, y);
            assert!(
                (got - direct).abs() <= 1e-10 * direct.abs(),
                "d={d}: {got} vs {direct}"
            );
        }
    }

    #[test]
    fn heine_two_atoms() {
        let spec = MeasureSpec::atoms([(1.0, 1.0), (2.0, 1.0)]).unwrap();
        assert_eq!(heine_determinant(&spec, 0, 1).unwrap(), 1.0);
        assert!(heine_check(&spec, 0, 1).unwrap() <= 1e-12);
        let single = MeasureSpec::atoms([(3.0, 0.25)]).unwrap();
        assert_eq!(heine_check(&single, 0, 0).unwrap(), 0.0);
    }

    #[test]
    fn heine_three_atoms_shifted() {
        let spec = MeasureSpec::atoms([(1.0, 0.5), (3.0, 0.25), (4.0, 0.25)]).unwrap();
        assert!(heine_check(&spec, 1, 2).unwrap() <= 1e-10);
        let exact = exact::to_f64(&exact::hankel_determinant(&spec, 1, 2).unwrap());
        let heine = heine_determinant(&spec, 1, 2).unwrap();
        assert!((exact - heine).abs() <= 1e-13 * exact);
        assert!(heine_check(&MeasureSpec::bergman(0.0).unwrap(), 0, 1).is_err());
    }

    #[test]
    fn heine_polynomial_form() {
        let spec = MeasureSpec::atoms([(0.5, 1.0), (1.5, 2.0), (2.5, 0.5), (4.0, 1.0)]).unwrap();
        for n in 1..=3 {
            for x in [0.0, 1.0, 3.3] {
                let direct = hankel_polynomial_determinant(&spec, 2, n, x).unwrap();
                let heine = heine_polynomial_determinant(&spec, 2, n, x).unwrap();
                assert!((direct - heine).abs() <= 1e-9 * heine.abs().max(1.0));
            }
        }
    }
}
