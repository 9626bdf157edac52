//! The kernel series
//!
//! ```text
//! F(λ, x, y) = Σ_{d≥0} λ^d Q_{d,q−1}(x, y) + Σ_{d=1}^{q−1} λ̄^d Q_{d,q−1−d}(x, y)
//! ```
//!
//! and the reproducing kernel `R(z, w) = F(z·w̄, |z|², |w|²)` of the order-`q`
//! polyanalytic space of a rotation-invariant measure, together with the
//! orthonormal system `H_{m,n}` whose double sum it regroups.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by std float methods when std is linked
use num_traits::{Float, Zero};
use spin::RwLock;

use crate::orthopoly::{build_basis, OrthoBasis};
use crate::{Error, MeasureSpec, Result};

/// Stopping rule of the `d`-series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    /// Hard cap on the number of `d`-terms.
    pub max_terms: usize,
    /// A term is small when `|term| ≤ rel_tol · |partial sum|`.
    pub rel_tol: f64,
    /// Summation stops after this many small terms in a row.
    pub consecutive_small: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            max_terms: 512,
            rel_tol: 1e-12,
            consecutive_small: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelParams {
    spec: MeasureSpec,
    q: usize,
    trunc: TruncationPolicy,
}

impl KernelParams {
    pub fn new(spec: MeasureSpec, q: usize) -> Result<Self> {
        Self::with_policy(spec, q, TruncationPolicy::default())
    }

    pub fn with_policy(spec: MeasureSpec, q: usize, trunc: TruncationPolicy) -> Result<Self> {
        spec.validate()?;
        if q == 0 {
            return Err(Error::Parameter("order q must be at least 1".into()));
        }
        if let Some(count) = spec.positive_atom_count() {
            if q > count {
                return Err(Error::Parameter(format!(
                    "order {q} needs at least {q} strictly positive atoms, got {count}"
                )));
            }
        }
        if trunc.max_terms < q {
            return Err(Error::Parameter(format!(
                "max_terms {} is below the order {q}",
                trunc.max_terms
            )));
        }
        if !(trunc.rel_tol > 0.0) || trunc.consecutive_small == 0 {
            return Err(Error::Parameter(
                "rel_tol must be positive and consecutive_small at least 1".into(),
            ));
        }
        Ok(Self { spec, q, trunc })
    }

    pub fn spec(&self) -> &MeasureSpec {
        &self.spec
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn policy(&self) -> &TruncationPolicy {
        &self.trunc
    }
}

/// A kernel value together with how the series was cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub terms_used: usize,
    /// The hard cap (or the end of a raw moment list) was hit before the
    /// stopping rule fired.
    pub truncated: bool,
}

/// Anything that can be evaluated as `K(z, w)`.
pub trait ReproducingKernel: Sync {
    fn value(&self, z: Complex64, w: Complex64) -> Result<Complex64>;

    /// Polyanalytic order `q` of the space.
    fn order(&self) -> usize;
}

/// Series evaluator for one [`KernelParams`].
///
/// Orthonormal bases `P_{d,0..q−1}` are memoized per `d` behind a lock, so a
/// single evaluator can be shared across threads.
#[derive(Debug)]
pub struct SeriesKernel {
    params: KernelParams,
    bases: RwLock<Vec<Arc<OrthoBasis>>>,
}

impl Clone for SeriesKernel {
    fn clone(&self) -> Self {
        Self {
            params: self.params.clone(),
            bases: RwLock::new(self.bases.read().clone()),
        }
    }
}

impl SeriesKernel {
    pub fn new(params: KernelParams) -> Self {
        Self {
            params,
            bases: RwLock::new(Vec::new()),
        }
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    /// `P_{d,0..q−1}`, built on first use.
    pub fn basis(&self, d: usize) -> Result<Arc<OrthoBasis>> {
        if let Some(b) = self.bases.read().get(d) {
            return Ok(b.clone());
        }
        let mut cache = self.bases.write();
        while cache.len() <= d {
            let next = cache.len();
            let basis = build_basis(&self.params.spec, next, self.params.q - 1)?;
            cache.push(Arc::new(basis));
        }
        Ok(cache[d].clone())
    }

    /// Number of cached bases.
    pub fn cached_bases(&self) -> usize {
        self.bases.read().len()
    }

    /// `F_{q,s}(λ, x, y)`.
    pub fn f_qs(&self, lambda: Complex64, x: f64, y: f64) -> Result<SeriesValue> {
        if !(x >= 0.0 && y >= 0.0) {
            return Err(Error::Parameter(format!(
                "radial arguments must be non-negative, got ({x}, {y})"
            )));
        }
        let radius = self.params.spec.lambda_radius(self.params.q)?;
        let modulus = lambda.norm();
        if !(modulus < radius) {
            return Err(Error::Domain { modulus, radius });
        }
        let n = self.params.q - 1;
        let policy = &self.params.trunc;

        let mut sum = Complex64::zero();
        let mut terms_used = 0;
        let mut truncated = false;
        if modulus == 0.0 {
            sum += self.basis(0)?.q(n, x, y);
            terms_used = 1;
        } else {
            let ln_modulus = modulus.ln();
            let phase = lambda.arg();
            let mut small = 0;
            let mut converged = false;
            for d in 0..policy.max_terms {
                let basis = match self.basis(d) {
                    Ok(b) => b,
                    Err(Error::MomentUnavailable(_)) => break,
                    Err(e) => return Err(e),
                };
                let magnitude = (d as f64 * ln_modulus - basis.ln_moment()).exp();
                let term =
                    Complex64::from_polar(magnitude, d as f64 * phase) * basis.q_unit(n, x, y);
                sum += term;
                terms_used = d + 1;
                if term.norm() <= policy.rel_tol * sum.norm() {
                    small += 1;
                    if small >= policy.consecutive_small {
                        converged = true;
                        break;
                    }
                } else {
                    small = 0;
                }
            }
            truncated = !converged;
            for d in 1..self.params.q {
                let basis = self.basis(d)?;
                let magnitude = (d as f64 * ln_modulus - basis.ln_moment()).exp();
                sum += Complex64::from_polar(magnitude, -(d as f64) * phase)
                    * basis.q_unit(n - d, x, y);
            }
        }
        Ok(SeriesValue {
            value: sum,
            terms_used,
            truncated,
        })
    }

    fn check_point(&self, z: Complex64) -> Result<()> {
        let radius = self.params.spec.support_radius()?.radius;
        let modulus = z.norm();
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Parameter(format!("non-finite point {z}")));
        }
        // a finite atomic profile attains its outermost circle, and the
        // kernel is still defined there (the λ-radius check covers convergence)
        let atomic = matches!(self.params.spec, MeasureSpec::Atoms(_));
        let inside = if atomic {
            modulus <= radius
        } else {
            modulus < radius
        };
        if !inside {
            return Err(Error::Domain { modulus, radius });
        }
        Ok(())
    }

    /// `R(z, w) = F(z·w̄, |z|², |w|²)`.
    pub fn eval(&self, z: Complex64, w: Complex64) -> Result<SeriesValue> {
        self.check_point(z)?;
        self.check_point(w)?;
        self.f_qs(z * w.conj(), z.norm_sqr(), w.norm_sqr())
    }

    /// `H_{m,n}(z) = r^{|m−n|} ξ^m ξ̄^n P_{|m−n|, min(m,n)}(r²)` for `z = rξ`.
    pub fn h_basis(&self, m: usize, n: usize, z: Complex64) -> Result<Complex64> {
        if n >= self.params.q {
            return Err(Error::Index(format!(
                "second index {n} must be below the order {}",
                self.params.q
            )));
        }
        let d = m.abs_diff(n);
        let k = m.min(n);
        let basis = self.basis(d)?;
        let r2 = z.norm_sqr();
        if r2 == 0.0 {
            return Ok(if d == 0 {
                Complex64::from(basis.eval(k, 0.0))
            } else {
                Complex64::zero()
            });
        }
        // r^d / √s_d in log form; the shifted moments can overflow long before
        // the product does
        let magnitude = (0.5 * (d as f64 * r2.ln() - basis.ln_moment())).exp();
        let angle = if m >= n { z.arg() } else { -z.arg() } * d as f64;
        Ok(Complex64::from_polar(
            magnitude * basis.eval_unit(k, r2),
            angle,
        ))
    }

    /// `Σ_{n<q} Σ_{m≤M} H_{m,n}(z) conj(H_{m,n}(w))`.
    pub fn expansion_sum(&self, z: Complex64, w: Complex64, max_m: usize) -> Result<Complex64> {
        let mut sum = Complex64::zero();
        for n in 0..self.params.q {
            for m in 0..=max_m {
                sum += self.h_basis(m, n, z)? * self.h_basis(m, n, w)?.conj();
            }
        }
        Ok(sum)
    }

    /// `|Σ_{n<q} Σ_{m≤M} H_{m,n}(z) conj(H_{m,n}(w)) − R(z, w)|`.
    pub fn kernel_expansion_check(&self, z: Complex64, w: Complex64, max_m: usize) -> Result<f64> {
        let series = self.eval(z, w)?.value;
        Ok((self.expansion_sum(z, w, max_m)? - series).norm())
    }

    /// `√F(|z|², |z|², |z|²)`, the constant bounding point evaluation at `z`
    /// by the `L²(ν)` norm.
    pub fn point_bound(&self, z: Complex64) -> Result<f64> {
        self.check_point(z)?;
        let r2 = z.norm_sqr();
        Ok(self
            .f_qs(Complex64::from(r2), r2, r2)?
            .value
            .re
            .max(0.0)
            .sqrt())
    }
}

impl ReproducingKernel for SeriesKernel {
    fn value(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        Ok(self.eval(z, w)?.value)
    }

    fn order(&self) -> usize {
        self.params.q
    }
}

/// Kernel of a product of rotation-invariant measures on `ℂ^p`: the product
/// of the one-variable kernels.
pub fn product_kernel(
    factors: &[SeriesKernel],
    z: &[Complex64],
    w: &[Complex64],
) -> Result<SeriesValue> {
    if z.len() != factors.len() {
        return Err(Error::Shape {
            left: z.len(),
            right: factors.len(),
        });
    }
    if w.len() != factors.len() {
        return Err(Error::Shape {
            left: w.len(),
            right: factors.len(),
        });
    }
    let mut out = SeriesValue {
        value: Complex64::from(1.0),
        terms_used: 0,
        truncated: false,
    };
    for ((kernel, &zj), &wj) in factors.iter().zip(z).zip(w) {
        let v = kernel.eval(zj, wj)?;
        out.value *= v.value;
        out.terms_used = out.terms_used.max(v.terms_used);
        out.truncated |= v.truncated;
    }
    Ok(out)
}

/// Product of the per-coordinate point bounds.
pub fn product_point_bound(factors: &[SeriesKernel], z: &[Complex64]) -> Result<f64> {
    if z.len() != factors.len() {
        return Err(Error::Shape {
            left: z.len(),
            right: factors.len(),
        });
    }
    factors
        .iter()
        .zip(z)
        .map(|(k, &zj)| k.point_bound(zj))
        .product()
}
