//! Product Gauss quadrature for rotation-invariant measures and the checks
//! built on it.
//!
//! A rule is a Gauss rule for the radial profile `μ` (built by Golub–Welsch
//! from this crate's own orthonormal polynomials, or the atoms themselves)
//! times the uniform rule with `N = 2·max_freq + 1` angles. For a monomial
//! `z^a z̄^b` the exact integral is `δ_{ab} s_a`, and the rule reproduces it
//! whenever
//!
//! * `a = b` and `a` is within the radial exactness degree, or
//! * `a ≠ b` and `a − b` is not a multiple of `N` (the angular sum vanishes).
//!
//! The checks use that criterion to refuse integrands the rule cannot resolve.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by std float methods when std is linked
use num_traits::{Float, Zero};

use crate::kernelseries::{ReproducingKernel, SeriesKernel};
use crate::linalg::{hermitian_eigenvalues, symmetric_eigen};
use crate::orthopoly::build_basis;
use crate::{Error, MeasureSpec, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    /// `(t_k, w_k)` on the radial-squared axis.
    pub radial: Vec<(f64, f64)>,
    pub angular_count: usize,
    /// Largest `j` with `∫ t^j dμ` integrated exactly; `usize::MAX` for atoms.
    pub exactness_degree: usize,
}

impl QuadratureRule {
    pub fn max_freq(&self) -> usize {
        (self.angular_count - 1) / 2
    }

    /// Whether the rule integrates `z^a z̄^b` exactly.
    pub fn resolves(&self, a: usize, b: usize) -> bool {
        if a == b {
            a <= self.exactness_degree
        } else {
            a.abs_diff(b) % self.angular_count != 0
        }
    }

    /// Quadrature points with their weights.
    pub fn points(&self) -> Vec<(Complex64, f64)> {
        let n = self.angular_count;
        let mut out = Vec::with_capacity(self.radial.len() * n);
        for &(t, w) in &self.radial {
            let r = t.sqrt();
            for j in 0..n {
                let theta = 2.0 * PI * j as f64 / n as f64;
                out.push((Complex64::from_polar(r, theta), w / n as f64));
            }
        }
        out
    }

    /// `Σ_k Σ_j w_k/N · f(√t_k e^{iθ_j})`.
    pub fn integrate<F: FnMut(Complex64) -> Complex64>(&self, mut f: F) -> Complex64 {
        self.points()
            .into_iter()
            .map(|(z, w)| f(z) * w)
            .fold(Complex64::zero(), |acc, v| acc + v)
    }

    /// Like [`integrate`](Self::integrate) for fallible integrands.
    pub fn try_integrate<F: FnMut(Complex64) -> Result<Complex64>>(
        &self,
        mut f: F,
    ) -> Result<Complex64> {
        let mut acc = Complex64::zero();
        for (z, w) in self.points() {
            acc += f(z)? * w;
        }
        Ok(acc)
    }
}

/// Gauss rule with `radial_nodes` nodes for `μ` times an angular grid
/// resolving frequencies up to `max_freq`.
///
/// The Jacobi matrix is read off the orthonormal coefficients of
/// `P_{0,0..n}`: with leading coefficients `ℓ_k`, the off-diagonal entries are
/// `b_k = ℓ_k/ℓ_{k+1}` and the diagonal follows from the subleading
/// coefficients. Nodes are its eigenvalues, weights `s_0` times the squared
/// first components of the eigenvectors.
pub fn build_rule(
    spec: &MeasureSpec,
    radial_nodes: usize,
    max_freq: usize,
) -> Result<QuadratureRule> {
    if radial_nodes == 0 {
        return Err(Error::Parameter(
            "at least one radial node is required".into(),
        ));
    }
    let angular_count = 2 * max_freq + 1;
    if let MeasureSpec::Atoms(atoms) = spec {
        spec.validate()?;
        return Ok(QuadratureRule {
            radial: atoms.iter().map(|a| (a.position, a.weight)).collect(),
            angular_count,
            exactness_degree: usize::MAX,
        });
    }
    let n = radial_nodes;
    let basis = build_basis(spec, 0, n)?;
    let rows: Vec<Vec<f64>> = (0..=n).map(|k| basis.coefficients(k)).collect();
    let mut jacobi = vec![0.0; n * n];
    for k in 0..n {
        let lead = rows[k][k];
        let b = lead / rows[k + 1][k + 1];
        let sub = if k > 0 { rows[k][k - 1] } else { 0.0 };
        let a = (sub - b * rows[k + 1][k]) / lead;
        jacobi[k * n + k] = a;
        if k + 1 < n {
            jacobi[k * n + k + 1] = b;
            jacobi[(k + 1) * n + k] = b;
        }
    }
    let (nodes, vectors) = symmetric_eigen(&jacobi, n);
    let s0 = spec.moment(0)?;
    let radial = nodes
        .iter()
        .enumerate()
        .map(|(k, &t)| (t, s0 * vectors[k] * vectors[k]))
        .collect();
    Ok(QuadratureRule {
        radial,
        angular_count,
        exactness_degree: 2 * n - 1,
    })
}

/// A finite sum `Σ c_{m,n} z^m z̄^n`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PolyanalyticPoly {
    coeffs: BTreeMap<(usize, usize), Complex64>,
}

impl PolyanalyticPoly {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = ((usize, usize), Complex64)>>(terms: I) -> Self {
        let mut p = Self::new();
        for ((m, n), c) in terms {
            p.add(m, n, c);
        }
        p
    }

    pub fn add(&mut self, m: usize, n: usize, c: Complex64) {
        let e = self.coeffs.entry((m, n)).or_insert_with(Complex64::zero);
        *e += c;
    }

    pub fn coefficient(&self, m: usize, n: usize) -> Complex64 {
        self.coeffs
            .get(&(m, n))
            .copied()
            .unwrap_or_else(Complex64::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), Complex64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| c.is_zero())
    }

    /// Smallest `q` such that no term carries `z̄^n` with `n ≥ q`.
    pub fn order(&self) -> usize {
        self.terms()
            .filter(|(_, c)| !c.is_zero())
            .map(|((_, n), _)| n + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn analytic_degree(&self) -> usize {
        self.terms().map(|((m, _), _)| m).max().unwrap_or(0)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let zc = z.conj();
        self.terms()
            .map(|((m, n), c)| c * z.powu(m as u32) * zc.powu(n as u32))
            .fold(Complex64::zero(), |acc, v| acc + v)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(&k, &c)| (k, c * s)).collect(),
        }
    }

    /// Largest coefficient difference.
    pub fn distance(&self, other: &Self) -> f64 {
        self.coeffs
            .keys()
            .chain(other.coeffs.keys())
            .map(|&(m, n)| (self.coefficient(m, n) - other.coefficient(m, n)).norm())
            .fold(0.0, f64::max)
    }

    /// Whether every monomial of `self · conj(other)` is resolved by `rule`.
    fn resolved_against(&self, other: &Self, rule: &QuadratureRule) -> bool {
        self.coeffs.keys().all(|&(a, b)| {
            other
                .coeffs
                .keys()
                .all(|&(c, d)| rule.resolves(a + d, b + c))
        })
    }
}

/// `H_{m,n}` as a polynomial: `Σ_j c_j z^{d+j} z̄^j` for `m ≥ n` (mirrored
/// otherwise), with `d = |m−n|` and `c_j` the coefficients of
/// `P_{d,min(m,n)}`.
pub fn h_polynomial(kernel: &SeriesKernel, m: usize, n: usize) -> Result<PolyanalyticPoly> {
    let q = kernel.params().q();
    if n >= q {
        return Err(Error::Index(format!(
            "second index {n} must be below the order {q}"
        )));
    }
    let d = m.abs_diff(n);
    let basis = kernel.basis(d)?;
    let coeffs = basis.coefficients(m.min(n));
    Ok(PolyanalyticPoly::from_terms(
        coeffs.into_iter().enumerate().map(|(j, c)| {
            let key = if m >= n { (d + j, j) } else { (j, d + j) };
            (key, Complex64::from(c))
        }),
    ))
}

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub check: String,
    pub parameters: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub notes: String,
}

impl VerificationReport {
    pub fn new(check: &str, parameters: String, max_error: f64, tolerance: f64) -> Self {
        Self {
            check: check.into(),
            parameters,
            max_error,
            tolerance,
            pass: max_error <= tolerance,
            notes: String::new(),
        }
    }

    pub fn with_notes(mut self, notes: String) -> Self {
        self.notes = notes;
        self
    }
}

fn describe(kernel: &SeriesKernel) -> String {
    let spec = kernel.params().spec();
    let q = kernel.params().q();
    match spec {
        MeasureSpec::Bergman { alpha } | MeasureSpec::Fock { alpha } => {
            format!("{} alpha={alpha} q={q}", spec.kind_name())
        }
        _ => format!("{} q={q}", spec.kind_name()),
    }
}

fn under_resolved(what: &str) -> Error {
    Error::Configuration(format!("quadrature rule does not resolve {what}"))
}

/// Gram matrix of `{H_{m,n} : m ≤ M, n < q}`; reports `max |G − I|`.
pub fn check_h_orthonormality(
    kernel: &SeriesKernel,
    max_m: usize,
    rule: &QuadratureRule,
    tolerance: f64,
) -> Result<VerificationReport> {
    let q = kernel.params().q();
    let mut polys = Vec::new();
    for n in 0..q {
        for m in 0..=max_m {
            polys.push(((m, n), h_polynomial(kernel, m, n)?));
        }
    }
    for (_, a) in &polys {
        for (_, b) in &polys {
            if !a.resolved_against(b, rule) {
                return Err(under_resolved("the H_{m,n} Gram integrands"));
            }
        }
    }
    let points = rule.points();
    let values: Vec<Vec<Complex64>> = polys
        .iter()
        .map(|&((m, n), _)| {
            points
                .iter()
                .map(|&(z, _)| kernel.h_basis(m, n, z))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    let mut at = (0, 0);
    for i in 0..polys.len() {
        for j in i..polys.len() {
            let g = values[i]
                .iter()
                .zip(&values[j])
                .zip(&points)
                .fold(Complex64::zero(), |acc, ((a, b), &(_, w))| {
                    acc + a * b.conj() * w
                });
            let target = if i == j { 1.0 } else { 0.0 };
            let err = (g - target).norm();
            if err > worst {
                worst = err;
                at = (i, j);
            }
        }
    }
    let (mi, mj) = (polys[at.0].0, polys[at.1].0);
    Ok(VerificationReport::new(
        "orthonormality",
        format!("{} M={max_m}", describe(kernel)),
        worst,
        tolerance,
    )
    .with_notes(format!("worst entry <H{:?}, H{:?}>", mi, mj)))
}

/// Radial degree and angular frequency a rule needs to reproduce `f` against
/// an order-`q` kernel.
pub fn reproducing_requirements(f: &PolyanalyticPoly, q: usize) -> (usize, usize) {
    let degree = f
        .terms()
        .map(|((a, b), _)| a.max(b) + q - 1)
        .max()
        .unwrap_or(0);
    let freq = f
        .terms()
        .map(|((a, b), _)| a.abs_diff(b) + q - 1)
        .max()
        .unwrap_or(0);
    (degree, freq)
}

fn check_rule_for(f: &PolyanalyticPoly, q: usize, rule: &QuadratureRule) -> Result<()> {
    if f.order() > q {
        return Err(Error::Parameter(format!(
            "test function has order {} above the kernel order {q}",
            f.order()
        )));
    }
    let (degree, freq) = reproducing_requirements(f, q);
    if degree > rule.exactness_degree || freq > rule.max_freq() {
        return Err(under_resolved("the reproducing integrands"));
    }
    Ok(())
}

/// `⟨f, K(·, z)⟩ = ∫ f(w) K(z, w) dν(w)`.
pub fn reproduce<K: ReproducingKernel + ?Sized>(
    kernel: &K,
    f: &PolyanalyticPoly,
    z: Complex64,
    rule: &QuadratureRule,
) -> Result<Complex64> {
    check_rule_for(f, kernel.order(), rule)?;
    rule.try_integrate(|w| Ok(f.eval(w) * kernel.value(z, w)?))
}

/// Reports `max_{f, z} |⟨f, K(·, z)⟩ − f(z)| / (1 + |f(z)|)`.
///
/// Exact up to the kernel tail beyond the angular resolution: terms of
/// `K(z, ·)` with frequency near `N` alias, so `max_freq` should be generous
/// compared with how slowly the kernel's Taylor coefficients decay at `z`.
pub fn check_reproducing<K: ReproducingKernel + ?Sized>(
    kernel: &K,
    label: &str,
    functions: &[PolyanalyticPoly],
    points: &[Complex64],
    rule: &QuadratureRule,
    tolerance: f64,
) -> Result<VerificationReport> {
    for f in functions {
        check_rule_for(f, kernel.order(), rule)?;
    }
    let nodes = rule.points();
    // f at the nodes, shared by every z
    let f_values: Vec<Vec<Complex64>> = functions
        .iter()
        .map(|f| nodes.iter().map(|&(w, _)| f.eval(w)).collect())
        .collect();
    let mut worst: f64 = 0.0;
    for &z in points {
        let k: Vec<Complex64> = nodes
            .iter()
            .map(|&(w, weight)| Ok(kernel.value(z, w)? * weight))
            .collect::<Result<_>>()?;
        for (f, values) in functions.iter().zip(&f_values) {
            let got = values
                .iter()
                .zip(&k)
                .fold(Complex64::zero(), |acc, (a, b)| acc + a * b);
            let want = f.eval(z);
            worst = worst.max((got - want).norm() / (1.0 + want.norm()));
        }
    }
    Ok(
        VerificationReport::new("reproducing", String::from(label), worst, tolerance).with_notes(
            format!("{} functions at {} points", functions.len(), points.len()),
        ),
    )
}

/// Orthogonal projection `Σ_{m≤M, n<q} ⟨g, H_{m,n}⟩ H_{m,n}` onto the order-`q`
/// space, truncated at `m ≤ M`.
pub fn project(
    kernel: &SeriesKernel,
    g: &PolyanalyticPoly,
    max_m: usize,
    rule: &QuadratureRule,
) -> Result<PolyanalyticPoly> {
    let q = kernel.params().q();
    let mut out = PolyanalyticPoly::new();
    for n in 0..q {
        for m in 0..=max_m {
            let h = h_polynomial(kernel, m, n)?;
            if !g.resolved_against(&h, rule) {
                return Err(under_resolved("the projection inner products"));
            }
            let c = rule.try_integrate(|w| Ok(g.eval(w) * kernel.h_basis(m, n, w)?.conj()))?;
            for ((a, b), hc) in h.terms() {
                out.add(a, b, c * hc);
            }
        }
    }
    Ok(out)
}

fn gram<K: ReproducingKernel + ?Sized>(kernel: &K, points: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = points.len();
    let mut g = vec![Complex64::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            g[i * n + j] = kernel.value(points[i], points[j])?;
        }
    }
    Ok(g)
}

/// Smallest eigenvalue of `[K(z_i, z_j)]` against `−tol · λ_max`; the error
/// reported is `max(0, −λ_min/λ_max)`.
pub fn check_gram_psd<K: ReproducingKernel + ?Sized>(
    kernel: &K,
    label: &str,
    points: &[Complex64],
    tolerance: f64,
) -> Result<VerificationReport> {
    if points.is_empty() {
        return Err(Error::Parameter("no points supplied".into()));
    }
    let n = points.len();
    let values = hermitian_eigenvalues(&gram(kernel, points)?, n);
    let lo = values[0];
    let hi = values[n - 1];
    let err = if hi > 0.0 {
        (-lo / hi).max(0.0)
    } else {
        f64::INFINITY
    };
    Ok(
        VerificationReport::new("psd", String::from(label), err, tolerance)
            .with_notes(format!("min eigenvalue {lo:e}, max eigenvalue {hi:e}")),
    )
}

/// `max |K(z_i, z_j) − conj K(z_j, z_i)| / (1 + |K(z_i, z_j)|)`.
pub fn check_hermitian<K: ReproducingKernel + ?Sized>(
    kernel: &K,
    label: &str,
    points: &[Complex64],
    tolerance: f64,
) -> Result<VerificationReport> {
    let n = points.len();
    let g = gram(kernel, points)?;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let a = g[i * n + j];
            worst = worst.max((a - g[j * n + i].conj()).norm() / (1.0 + a.norm()));
        }
    }
    Ok(VerificationReport::new(
        "hermitian",
        String::from(label),
        worst,
        tolerance,
    ))
}

/// Product of per-coordinate rules; integrand takes one point per coordinate.
pub fn integrate_product<F: FnMut(&[Complex64]) -> Result<Complex64>>(
    rules: &[QuadratureRule],
    mut f: F,
) -> Result<Complex64> {
    let grids: Vec<Vec<(Complex64, f64)>> = rules.iter().map(|r| r.points()).collect();
    if grids.iter().any(|g| g.is_empty()) {
        return Ok(Complex64::zero());
    }
    let mut index = vec![0usize; grids.len()];
    let mut point = vec![Complex64::zero(); grids.len()];
    let mut acc = Complex64::zero();
    loop {
        let mut w = 1.0;
        for (k, g) in grids.iter().enumerate() {
            point[k] = g[index[k]].0;
            w *= g[index[k]].1;
        }
        acc += f(&point)? * w;
        let mut k = grids.len();
        loop {
            if k == 0 {
                return Ok(acc);
            }
            k -= 1;
            index[k] += 1;
            if index[k] < grids[k].len() {
                break;
            }
            index[k] = 0;
        }
    }
}

/// Product of one-variable polynomials, `Π_j f_j(z_j)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProductPoly {
    pub factors: Vec<PolyanalyticPoly>,
}

impl ProductPoly {
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.factors
            .iter()
            .zip(z)
            .map(|(f, &zj)| f.eval(zj))
            .fold(Complex64::from(1.0), |acc, v| acc * v)
    }
}

/// Reproducing check for the product kernel `Π_j K_j` over the product rule;
/// reports `max_z |⟨f, K(·, z)⟩ − f(z)| / (1 + |f(z)|)`.
pub fn check_product_reproducing(
    factors: &[SeriesKernel],
    f: &ProductPoly,
    points: &[Vec<Complex64>],
    rules: &[QuadratureRule],
    tolerance: f64,
) -> Result<VerificationReport> {
    if f.factors.len() != factors.len() || rules.len() != factors.len() {
        return Err(Error::Shape {
            left: f.factors.len(),
            right: factors.len(),
        });
    }
    for ((fj, kj), rj) in f.factors.iter().zip(factors).zip(rules) {
        check_rule_for(fj, kj.params().q(), rj)?;
    }
    let mut worst: f64 = 0.0;
    for z in points {
        if z.len() != factors.len() {
            return Err(Error::Shape {
                left: z.len(),
                right: factors.len(),
            });
        }
        let got = integrate_product(rules, |w| {
            let k = crate::kernelseries::product_kernel(factors, z, w)?.value;
            Ok(f.eval(w) * k)
        })?;
        let want = f.eval(z);
        worst = worst.max((got - want).norm() / (1.0 + want.norm()));
    }
    Ok(VerificationReport::new(
        "product-reproducing",
        format!("p={}", factors.len()),
        worst,
        tolerance,
    ))
}
