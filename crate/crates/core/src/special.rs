//! Gamma-function helpers shared by the moment and closed-form code.
//!
//! Everything goes through `ln Γ` with an explicit sign so that ratios of
//! large Gamma values never overflow.

#[allow(unused_imports)] // shadowed by std float methods when std is linked
use num_traits::Float;

/// `ln|Γ(x)|` together with the sign of `Γ(x)`.
///
/// At the poles (non-positive integers) the magnitude is `+∞` and the sign is
/// reported as `+1`; callers that need `1/Γ` should use [`recip_gamma`].
pub fn ln_gamma(x: f64) -> (f64, i32) {
    if is_pole(x) {
        return (f64::INFINITY, 1);
    }
    let (value, sign) = libm::lgamma_r(x);
    (value, if sign < 0 { -1 } else { 1 })
}

pub fn gamma(x: f64) -> f64 {
    if is_pole(x) {
        return f64::NAN;
    }
    libm::tgamma(x)
}

/// `1/Γ(x)`, entire, zero at the poles.
pub fn recip_gamma(x: f64) -> f64 {
    if is_pole(x) {
        return 0.0;
    }
    let (lg, sign) = ln_gamma(x);
    f64::from(sign) * (-lg).exp()
}

/// `Γ(a)/Γ(b)` for arguments of either sign, via log-Gamma.
pub fn gamma_ratio(a: f64, b: f64) -> f64 {
    if is_pole(b) {
        return 0.0;
    }
    if is_pole(a) {
        return f64::NAN;
    }
    let (la, sa) = ln_gamma(a);
    let (lb, sb) = ln_gamma(b);
    f64::from(sa * sb) * (la - lb).exp()
}

/// Generalized binomial `Γ(a+1) / (Γ(b+1) Γ(a−b+1))` with real upper index.
pub fn binomial(a: f64, b: f64) -> f64 {
    if is_pole(b + 1.0) || is_pole(a - b + 1.0) {
        return 0.0;
    }
    if is_pole(a + 1.0) {
        return f64::NAN;
    }
    let (la, sa) = ln_gamma(a + 1.0);
    let (lb, sb) = ln_gamma(b + 1.0);
    let (lc, sc) = ln_gamma(a - b + 1.0);
    f64::from(sa * sb * sc) * (la - lb - lc).exp()
}

/// Integer binomial coefficient as a float, exact for results below 2^53.
pub fn choose(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}
