//! Closed forms for the weighted Bergman and Fock profiles, and the Jacobi and
//! Laguerre machinery behind them.
//!
//! For `(1−t)^α dt` the kernel of the order-`q` space is
//!
//! ```text
//! K(z, w) = q (1 − z̄w)^{q−1} / (1 − z w̄)^{α+q+1}
//!           · Σ_{j<q} (−1)^j C(q−1, j) C(α+q+j, α+q−1) |φ_w(z)|^{2j}
//! ```
//!
//! obtained from `K(z, 0)` and the Möbius transformation rule. The variant with
//! an extra leading factor `C(α+q−1, α)` that circulates in the literature is
//! kept as [`bergman_kernel_published`]; it overshoots by exactly that factor.
//!
//! For `t^α e^{−t} dt / Γ(α+1)` the formula `e^{z w̄} L_{q−1}^{α+1}(|z−w|²)` is
//! the kernel only when `α = 0`. At other `α` even the analytic (`q = 1`)
//! kernel is of Mittag-Leffler type rather than exponential, so
//! [`fock_kernel`] is only a comparison target there.

use alloc::format;
use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by std float methods when std is linked
use num_traits::{Float, Zero};

use crate::kernelseries::ReproducingKernel;
use crate::special::{binomial, choose, gamma_ratio, ln_gamma, recip_gamma};
use crate::{Error, MeasureSpec, Result};

fn check_parameter(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > -1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "{name} must exceed -1, got {value}"
        )))
    }
}

fn check_unit_disc(z: Complex64) -> Result<()> {
    let modulus = z.norm();
    if !(modulus < 1.0) {
        return Err(Error::Domain {
            modulus,
            radius: 1.0,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

impl JacobiParams {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        check_parameter("a", a)?;
        check_parameter("b", b)?;
        Ok(Self { a, b, n })
    }
}

/// `P_n^{(a,b)}(1 − 2x)` from its expansion in powers of `x`.
pub fn jacobi_eval(p: JacobiParams, x: f64) -> f64 {
    let JacobiParams { a, b, n } = p;
    let nf = n as f64;
    // Γ(n+a+1) / (n! Γ(n+a+b+1))
    let lead = gamma_ratio(nf + a + 1.0, nf + a + b + 1.0) * recip_gamma(nf + 1.0);
    let mut sum = 0.0;
    let mut xj = 1.0;
    for j in 0..=n {
        let jf = j as f64;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * choose(n, j) * gamma_ratio(nf + jf + a + b + 1.0, jf + a + 1.0) * xj;
        xj *= x;
    }
    lead * sum
}

/// `∫₀¹ [P_n^{(a,d)}(2x−1)]² x^d (1−x)^a dx
///   = Γ(a+n+1) Γ(d+n+1) / (n! Γ(a+d+n+1) (a+d+2n+1))`.
pub fn jacobi_norm(a: f64, d: f64, n: usize) -> f64 {
    let nf = n as f64;
    let (l1, s1) = ln_gamma(a + nf + 1.0);
    let (l2, s2) = ln_gamma(d + nf + 1.0);
    let (l3, s3) = ln_gamma(a + d + nf + 1.0);
    let (l4, _) = ln_gamma(nf + 1.0);
    f64::from(s1 * s2 * s3) * (l1 + l2 - l3 - l4).exp() / (a + d + 2.0 * nf + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaguerreParams {
    pub beta: f64,
    pub n: usize,
}

impl LaguerreParams {
    pub fn new(beta: f64, n: usize) -> Result<Self> {
        check_parameter("beta", beta)?;
        Ok(Self { beta, n })
    }
}

/// `L_n^β(x)` by the three-term recurrence in `n`.
///
/// No parameter check: the shift identities also need `β ≤ −1`.
pub fn laguerre_eval(p: LaguerreParams, x: f64) -> f64 {
    laguerre(p.beta, p.n, x)
}

fn laguerre(beta: f64, n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + beta - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + beta - x) * cur - (kf + beta) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `L_n^β(x) = Σ_i (−1)^i C(n+β, n−i) x^i / i!`, the explicit sum.
pub fn laguerre_explicit(p: LaguerreParams, x: f64) -> f64 {
    let n = p.n;
    let mut sum = 0.0;
    let mut term = 1.0;
    for i in 0..=n {
        if i > 0 {
            term *= -x / i as f64;
        }
        // C(n+β, n−i) = Π_{k=1}^{n−i} (β+i+k)/k, as a product to keep the
        // oracle free of log-Gamma round-off
        let binom: f64 = (1..=n - i)
            .map(|k| (p.beta + (i + k) as f64) / k as f64)
            .product();
        sum += binom * term;
    }
    sum
}

fn residual(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / lhs.abs().max(1.0)
}

/// Product formula
/// `L_n^β(x) L_n^β(y) = Γ(β+n+1)/n! Σ_l (xy)^{n−l} L_l^{β+2n−2l}(x+y) / ((n−l)! Γ(β+n+1−l))`.
///
/// Returns `|lhs − rhs| / max(1, |lhs|)`.
pub fn bailey_residual(beta: f64, n: usize, x: f64, y: f64) -> f64 {
    let lhs = laguerre(beta, n, x) * laguerre(beta, n, y);
    let nf = n as f64;
    let (ln_n, _) = ln_gamma(nf + 1.0);
    let mut rhs = 0.0;
    for l in 0..=n {
        let k = n - l;
        let lf = l as f64;
        let (ln_k, _) = ln_gamma(k as f64 + 1.0);
        // Γ(β+n+1) / (n! (n−l)! Γ(β+n+1−l)), exactly 1 when n = 0
        let coef = gamma_ratio(beta + nf + 1.0, beta + nf + 1.0 - lf) * (-ln_n - ln_k).exp();
        rhs += coef * (x * y).powi(k as i32) * laguerre(beta + 2.0 * k as f64, l, x + y);
    }
    residual(lhs, rhs)
}

/// `L_n^β(x − y) = Σ_{r≤n} y^r/r! L_{n−r}^{β+r}(x)`.
pub fn shift_finite_residual(beta: f64, n: usize, x: f64, y: f64) -> f64 {
    let lhs = laguerre(beta, n, x - y);
    let mut rhs = 0.0;
    let mut coef = 1.0;
    for r in 0..=n {
        if r > 0 {
            coef *= y / r as f64;
        }
        rhs += coef * laguerre(beta + r as f64, n - r, x);
    }
    residual(lhs, rhs)
}

/// `L_n^β(x − y) = e^{−y} Σ_{r≥0} y^r/r! L_n^{β+r}(x)`, summed until the terms
/// stop mattering or `max_terms` is reached.
pub fn shift_series_residual(beta: f64, n: usize, x: f64, y: f64, max_terms: usize) -> f64 {
    let lhs = laguerre(beta, n, x - y);
    let mut sum = 0.0;
    let mut coef = (-y).exp();
    let mut small = 0;
    for r in 0..max_terms {
        if r > 0 {
            coef *= y / r as f64;
        }
        let term = coef * laguerre(beta + r as f64, n, x);
        sum += term;
        if r as f64 > y && term.abs() <= f64::EPSILON * sum.abs().max(f64::MIN_POSITIVE) {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
    }
    residual(lhs, sum)
}

fn bergman_sum(alpha: f64, q: usize, rho: f64) -> f64 {
    let aq = alpha + q as f64;
    let mut sum = 0.0;
    let mut power = 1.0;
    for j in 0..q {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * choose(q - 1, j) * binomial(aq + j as f64, aq - 1.0) * power;
        power *= rho;
    }
    sum
}

fn bergman_core(alpha: f64, q: usize, z: Complex64, w: Complex64) -> Result<Complex64> {
    check_parameter("alpha", alpha)?;
    if q == 0 {
        return Err(Error::Parameter("order q must be at least 1".into()));
    }
    check_unit_disc(z)?;
    check_unit_disc(w)?;
    let one = Complex64::from(1.0);
    let a = one - z * w.conj();
    let b = one - z.conj() * w;
    let rho = (z - w).norm_sqr() / a.norm_sqr();
    let prefactor = b.powi(q as i32 - 1) * a.powf(-(alpha + q as f64 + 1.0));
    Ok(prefactor * (q as f64 * bergman_sum(alpha, q, rho)))
}

/// Kernel of the order-`q` space over `(1−|z|²)^α dA/π` on the unit disc.
pub fn bergman_kernel(alpha: f64, q: usize, z: Complex64, w: Complex64) -> Result<Complex64> {
    bergman_core(alpha, q, z, w)
}

/// [`bergman_kernel`] times `C(α+q−1, α)`, the constant as usually printed.
pub fn bergman_kernel_published(
    alpha: f64,
    q: usize,
    z: Complex64,
    w: Complex64,
) -> Result<Complex64> {
    Ok(bergman_core(alpha, q, z, w)? * binomial(alpha + q as f64 - 1.0, alpha))
}

/// `e^{z w̄} L_{q−1}^{α+1}(|z−w|²)`.
pub fn fock_kernel(alpha: f64, q: usize, z: Complex64, w: Complex64) -> Result<Complex64> {
    check_parameter("alpha", alpha)?;
    if q == 0 {
        return Err(Error::Parameter("order q must be at least 1".into()));
    }
    if !(z.re.is_finite() && z.im.is_finite() && w.re.is_finite() && w.im.is_finite()) {
        return Err(Error::Parameter("non-finite point".into()));
    }
    Ok((z * w.conj()).exp() * laguerre(alpha + 1.0, q - 1, (z - w).norm_sqr()))
}

/// The disc automorphism `φ_w(z) = (z − w)/(1 − z w̄)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMap {
    w: Complex64,
}

impl MobiusMap {
    pub fn new(w: Complex64) -> Result<Self> {
        check_unit_disc(w)?;
        Ok(Self { w })
    }

    /// `φ_{−w}`, the inverse map.
    pub fn inverse(&self) -> Self {
        Self { w: -self.w }
    }

    pub fn center(&self) -> Complex64 {
        self.w
    }

    fn denominator(&self, z: Complex64) -> Complex64 {
        Complex64::from(1.0) - z * self.w.conj()
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (z - self.w) / self.denominator(z)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        Complex64::from(1.0 - self.w.norm_sqr()) / self.denominator(z).powi(2)
    }

    /// `φ'(z)^p` on the branch `(1−|w|²)^p (1 − z w̄)^{−2p}` with the principal
    /// power of `1 − z w̄`, which has positive real part on the disc.
    pub fn derivative_power(&self, z: Complex64, p: f64) -> Complex64 {
        self.denominator(z).powf(-2.0 * p) * (1.0 - self.w.norm_sqr()).powf(p)
    }
}

/// Relative residual of the transformation rule
///
/// ```text
/// K(z, ξ) = (φ'(z) conj φ'(ξ))^{(α+q+1)/2} / (conj φ'(z) φ'(ξ))^{(q−1)/2} · K(φ(z), φ(ξ))
/// ```
///
/// for the Bergman kernel, with powers taken on the branch of
/// [`MobiusMap::derivative_power`].
pub fn covariance_residual(
    alpha: f64,
    q: usize,
    map: &MobiusMap,
    z: Complex64,
    xi: Complex64,
) -> Result<f64> {
    let lhs = bergman_kernel(alpha, q, z, xi)?;
    let image = bergman_kernel(alpha, q, map.apply(z), map.apply(xi))?;
    let up = 0.5 * (alpha + q as f64 + 1.0);
    let down = 0.5 * (q as f64 - 1.0);
    let factor = map.derivative_power(z, up) * map.derivative_power(xi, up).conj()
        / (map.derivative_power(z, down).conj() * map.derivative_power(xi, down));
    let rhs = factor * image;
    Ok((lhs - rhs).norm() / lhs.norm().max(f64::MIN_POSITIVE))
}

/// Which closed formula a [`ClosedKernel`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedFamily {
    Bergman,
    BergmanPublished,
    Fock,
}

/// A closed formula packaged as a [`ReproducingKernel`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedKernel {
    pub family: ClosedFamily,
    pub alpha: f64,
    pub q: usize,
}

impl ClosedKernel {
    pub fn new(family: ClosedFamily, alpha: f64, q: usize) -> Result<Self> {
        check_parameter("alpha", alpha)?;
        if q == 0 {
            return Err(Error::Parameter("order q must be at least 1".into()));
        }
        Ok(Self { family, alpha, q })
    }

    /// The closed form matching a measure, if there is one.
    pub fn for_spec(spec: &MeasureSpec, q: usize) -> Result<Self> {
        match *spec {
            MeasureSpec::Bergman { alpha } => Self::new(ClosedFamily::Bergman, alpha, q),
            MeasureSpec::Fock { alpha } => Self::new(ClosedFamily::Fock, alpha, q),
            _ => Err(Error::Unsupported(
                "closed forms exist only for the Bergman and Fock profiles",
            )),
        }
    }

    /// Whether the formula is the true kernel of its measure.
    pub fn is_exact(&self) -> bool {
        match self.family {
            ClosedFamily::Bergman => true,
            ClosedFamily::BergmanPublished => self.alpha == 0.0 || self.q == 1,
            ClosedFamily::Fock => self.alpha == 0.0,
        }
    }
}

impl ReproducingKernel for ClosedKernel {
    fn value(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        match self.family {
            ClosedFamily::Bergman => bergman_kernel(self.alpha, self.q, z, w),
            ClosedFamily::BergmanPublished => bergman_kernel_published(self.alpha, self.q, z, w),
            ClosedFamily::Fock => fock_kernel(self.alpha, self.q, z, w),
        }
    }

    fn order(&self) -> usize {
        self.q
    }
}

/// `|a − b| / |b|`, or `|a|` when `b` vanishes.
pub fn relative_error(a: Complex64, b: Complex64) -> f64 {
    let scale = b.norm();
    if scale.is_zero() {
        a.norm()
    } else {
        (a - b).norm() / scale
    }
}
