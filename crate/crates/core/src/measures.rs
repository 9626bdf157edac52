//! Radial profiles of rotation-invariant measures and their moment sequences.
//!
//! A planar measure `ν` invariant under rotations is the image of `μ ⊗ σ`
//! under `(t, ξ) ↦ √t·ξ`, where `σ` is the normalized arc measure on the unit
//! circle and `μ` lives on `[0, ∞)`. Everything downstream only needs the
//! Stieltjes moments `s_d = ∫ t^d dμ(t)` of that radial-squared profile.
//!
//! The two weighted profiles are kept with the normalizations the closed forms
//! are calibrated to: the Bergman profile `(1−t)^α dt` on `[0, 1)` is *not*
//! normalized (`s_0 = 1/(α+1)`), the Fock profile `t^α e^{−t} dt / Γ(α+1)` is.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by std float methods when std is linked
use num_traits::Float;

use crate::special::ln_gamma;
use crate::{Error, Result};

/// Minimum number of raw moments needed to estimate a support radius.
pub const RAW_RADIUS_MIN_MOMENTS: usize = 16;

/// One point mass of a discrete radial profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    /// Position on the radial-squared axis, `t ≥ 0`.
    pub position: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSpec {
    /// `(1−t)^α dt` on `[0, 1)`, i.e. `ν = (1−|z|²)^α dA/π` on the unit disc.
    Bergman { alpha: f64 },
    /// `t^α e^{−t} dt / Γ(α+1)` on `[0, ∞)`.
    Fock { alpha: f64 },
    /// Finitely many point masses; `ν` is a union of weighted circles.
    Atoms(Vec<Atom>),
    /// Moments `s_0, …, s_{N−1}` supplied directly.
    RawMoments(Vec<f64>),
}

/// Radius `R_s` of the disc carrying the kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportRadius {
    /// `+∞` when the profile has unbounded support.
    pub radius: f64,
    /// Set when the value was estimated from finitely many moments.
    pub approximate: bool,
}

impl SupportRadius {
    fn exact(radius: f64) -> Self {
        Self {
            radius,
            approximate: false,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.radius.is_finite()
    }
}

impl MeasureSpec {
    pub fn bergman(alpha: f64) -> Result<Self> {
        let spec = Self::Bergman { alpha };
        spec.validate()?;
        Ok(spec)
    }

    pub fn fock(alpha: f64) -> Result<Self> {
        let spec = Self::Fock { alpha };
        spec.validate()?;
        Ok(spec)
    }

    /// Builds a discrete profile from `(position, weight)` pairs.
    pub fn atoms<I: IntoIterator<Item = (f64, f64)>>(atoms: I) -> Result<Self> {
        let spec = Self::Atoms(
            atoms
                .into_iter()
                .map(|(position, weight)| Atom { position, weight })
                .collect(),
        );
        spec.validate()?;
        Ok(spec)
    }

    pub fn raw_moments(moments: Vec<f64>) -> Result<Self> {
        let spec = Self::RawMoments(moments);
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Bergman { alpha } | Self::Fock { alpha } => {
                if !(alpha.is_finite() && *alpha > -1.0) {
                    return Err(Error::Parameter(format!(
                        "alpha must exceed -1, got {alpha}"
                    )));
                }
            }
            Self::Atoms(atoms) => {
                if atoms.is_empty() {
                    return Err(Error::Parameter("at least one atom is required".into()));
                }
                for (i, a) in atoms.iter().enumerate() {
                    if !(a.position.is_finite() && a.position >= 0.0) {
                        return Err(Error::Parameter(format!(
                            "atom position must be finite and non-negative, got {}",
                            a.position
                        )));
                    }
                    if !(a.weight.is_finite() && a.weight > 0.0) {
                        return Err(Error::Parameter(format!(
                            "atom weight must be finite and positive, got {}",
                            a.weight
                        )));
                    }
                    if atoms[..i].iter().any(|b| b.position == a.position) {
                        return Err(Error::Parameter(format!(
                            "duplicate atom position {}",
                            a.position
                        )));
                    }
                }
            }
            Self::RawMoments(s) => {
                if s.is_empty() {
                    return Err(Error::Parameter("no moments supplied".into()));
                }
                if let Some(bad) = s.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                    return Err(Error::Parameter(format!(
                        "moments must be finite and positive, got {bad}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Bergman { .. } => "bergman",
            Self::Fock { .. } => "fock",
            Self::Atoms(_) => "atoms",
            Self::RawMoments(_) => "raw",
        }
    }

    /// `ln s_d`, finite even when `s_d` itself overflows.
    pub fn ln_moment(&self, d: usize) -> Result<f64> {
        self.validate()?;
        let df = d as f64;
        Ok(match self {
            Self::Bergman { alpha } => {
                ln_gamma(df + 1.0).0 + ln_gamma(alpha + 1.0).0 - ln_gamma(df + alpha + 2.0).0
            }
            Self::Fock { alpha } => ln_gamma(alpha + df + 1.0).0 - ln_gamma(alpha + 1.0).0,
            Self::Atoms(atoms) => {
                let logs: Vec<f64> = atoms.iter().filter_map(|a| log_mass(a, d)).collect();
                log_sum_exp(&logs)
            }
            Self::RawMoments(s) => s.get(d).ok_or(Error::MomentUnavailable(d))?.ln(),
        })
    }

    /// The moment `s_d`. Overflows to `+∞` for very large `d` on unbounded
    /// profiles; use [`ln_moment`](Self::ln_moment) or
    /// [`moment_ratio`](Self::moment_ratio) there.
    pub fn moment(&self, d: usize) -> Result<f64> {
        match self {
            Self::RawMoments(s) => {
                self.validate()?;
                s.get(d).copied().ok_or(Error::MomentUnavailable(d))
            }
            Self::Atoms(atoms) => {
                self.validate()?;
                Ok(atoms
                    .iter()
                    .map(|a| a.weight * a.position.powi(d as i32))
                    .sum())
            }
            _ => Ok(self.ln_moment(d)?.exp()),
        }
    }

    /// The `j`-th moment of `x^d dμ`, which is `s_{d+j}`.
    pub fn shifted_moment(&self, d: usize, j: usize) -> Result<f64> {
        self.moment(d + j)
    }

    /// `s_{d+j} / s_d`: the `j`-th moment of the probability measure
    /// `x^d dμ / s_d`, computed without forming either moment.
    pub fn moment_ratio(&self, d: usize, j: usize) -> Result<f64> {
        self.validate()?;
        let df = d as f64;
        Ok(match self {
            Self::Bergman { alpha } => (0..j)
                .map(|i| {
                    let k = df + i as f64;
                    (k + 1.0) / (k + alpha + 2.0)
                })
                .product(),
            Self::Fock { alpha } => (0..j).map(|i| alpha + df + i as f64 + 1.0).product(),
            Self::Atoms(_) => self
                .shifted_atoms(d)?
                .iter()
                .map(|a| a.weight * a.position.powi(j as i32))
                .sum(),
            Self::RawMoments(s) => {
                let top = s.get(d + j).ok_or(Error::MomentUnavailable(d + j))?;
                let base = s.get(d).ok_or(Error::MomentUnavailable(d))?;
                top / base
            }
        })
    }

    /// Atoms of the normalized shifted measure `x^d dμ / s_d`, dropping any
    /// atom the shift annihilates. Only meaningful for [`MeasureSpec::Atoms`].
    pub fn shifted_atoms(&self, d: usize) -> Result<Vec<Atom>> {
        let Self::Atoms(atoms) = self else {
            return Err(Error::Unsupported("shifted atoms of a non-atomic measure"));
        };
        self.validate()?;
        let logs: Vec<(f64, f64)> = atoms
            .iter()
            .filter_map(|a| log_mass(a, d).map(|l| (a.position, l)))
            .collect();
        let total = log_sum_exp(&logs.iter().map(|p| p.1).collect::<Vec<_>>());
        Ok(logs
            .into_iter()
            .map(|(position, l)| Atom {
                position,
                weight: (l - total).exp(),
            })
            .filter(|a| a.weight > 0.0)
            .collect())
    }

    /// Number of support points of `x^d dμ`; `None` for infinite support.
    pub fn support_size(&self, d: usize) -> Option<usize> {
        match self {
            Self::Atoms(atoms) => Some(atoms.iter().filter(|a| d == 0 || a.position > 0.0).count()),
            _ => None,
        }
    }

    pub fn positive_atom_count(&self) -> Option<usize> {
        match self {
            Self::Atoms(atoms) => Some(atoms.iter().filter(|a| a.position > 0.0).count()),
            _ => None,
        }
    }

    pub fn support_radius(&self) -> Result<SupportRadius> {
        self.validate()?;
        match self {
            Self::Bergman { .. } => Ok(SupportRadius::exact(1.0)),
            Self::Fock { .. } => Ok(SupportRadius::exact(f64::INFINITY)),
            Self::Atoms(atoms) => {
                let top = atoms.iter().map(|a| a.position).fold(0.0, f64::max);
                Ok(SupportRadius::exact(top.sqrt()))
            }
            Self::RawMoments(s) => {
                if s.len() < RAW_RADIUS_MIN_MOMENTS {
                    return Err(Error::Estimation {
                        needed: RAW_RADIUS_MIN_MOMENTS,
                        available: s.len(),
                    });
                }
                // s_d^{1/(2d)} at the largest available order
                let d = s.len() - 1;
                Ok(SupportRadius {
                    radius: (s[d].ln() / (2.0 * d as f64)).exp(),
                    approximate: true,
                })
            }
        }
    }

    /// Radius of convergence in `λ` of the order-`q` kernel series.
    ///
    /// This is `R_s²` for profiles whose support accumulates at its supremum.
    /// For finitely many atoms the degree-`q−1` polynomial kernels of
    /// `x^d dμ` grow like `t_(q)^{−d}`, with `t_(q)` the `q`-th largest
    /// positive atom, so the series only converges for `|λ| < t_(q)`.
    pub fn lambda_radius(&self, q: usize) -> Result<f64> {
        match self {
            Self::Atoms(atoms) => {
                self.validate()?;
                let mut positions: Vec<f64> = atoms
                    .iter()
                    .map(|a| a.position)
                    .filter(|&t| t > 0.0)
                    .collect();
                positions.sort_by(|a, b| b.total_cmp(a));
                positions.get(q.max(1) - 1).copied().ok_or(Error::Rank {
                    degree: q.saturating_sub(1),
                    needed: q,
                    available: positions.len(),
                })
            }
            _ => {
                let r = self.support_radius()?.radius;
                Ok(r * r)
            }
        }
    }
}

fn log_mass(a: &Atom, d: usize) -> Option<f64> {
    if a.position > 0.0 {
        Some(a.weight.ln() + d as f64 * a.position.ln())
    } else if d == 0 {
        Some(a.weight.ln())
    } else {
        None
    }
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return top;
    }
    top + values.iter().map(|v| (v - top).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn bergman_third_moment() {
        let s = MeasureSpec::bergman(0.0).unwrap();
        assert!(close(s.moment(3).unwrap(), 0.25, 1e-15));
    }

    #[test]
    fn fock_total_mass() {
        assert_eq!(MeasureSpec::fock(0.0).unwrap().moment(0).unwrap(), 1.0);
    }

    #[test]
    fn atom_moment_is_direct_sum() {
        let s = MeasureSpec::atoms([(1.0, 0.5), (4.0, 0.5)]).unwrap();
        assert_eq!(s.moment(2).unwrap(), 8.5);
    }

    #[test]
    fn shifted_moments() {
        let b = MeasureSpec::bergman(0.0).unwrap();
        assert!(close(b.shifted_moment(1, 1).unwrap(), 1.0 / 3.0, 1e-15));
        let f = MeasureSpec::fock(1.0).unwrap();
        assert!(close(f.shifted_moment(2, 1).unwrap(), 24.0, 1e-13));
        for k in 0..6 {
            assert_eq!(f.shifted_moment(0, k).unwrap(), f.moment(k).unwrap());
        }
    }

    #[test]
    fn invalid_alpha_is_rejected() {
        assert!(matches!(
            MeasureSpec::bergman(-1.0),
            Err(Error::Parameter(_))
        ));
        let raw = MeasureSpec::Fock { alpha: -2.0 };
        assert!(matches!(raw.moment(0), Err(Error::Parameter(_))));
    }

    #[test]
    fn invalid_atoms_are_rejected() {
        assert!(MeasureSpec::atoms([(1.0, 0.5), (1.0, 0.2)]).is_err());
        assert!(MeasureSpec::atoms([(1.0, 0.0)]).is_err());
        assert!(MeasureSpec::atoms([(-1.0, 1.0)]).is_err());
        assert!(MeasureSpec::atoms(core::iter::empty()).is_err());
    }

    #[test]
    fn radii() {
        assert_eq!(
            MeasureSpec::bergman(2.5)
                .unwrap()
                .support_radius()
                .unwrap()
                .radius,
            1.0
        );
        assert!(MeasureSpec::fock(0.0)
            .unwrap()
            .support_radius()
            .unwrap()
            .radius
            .is_infinite());
        let a = MeasureSpec::atoms([(1.0, 0.3), (9.0, 0.7)]).unwrap();
        assert_eq!(a.support_radius().unwrap().radius, 3.0);
    }

    #[test]
    fn raw_radius_needs_enough_moments() {
        let short = MeasureSpec::raw_moments(alloc::vec![1.0, 0.5, 0.3]).unwrap();
        assert!(matches!(
            short.support_radius(),
            Err(Error::Estimation { .. })
        ));
        // moments of the uniform profile on [0, 4]: 4^d / (d+1)
        let s: Vec<f64> = (0..200).map(|d| 4f64.powi(d) / (d as f64 + 1.0)).collect();
        let r = MeasureSpec::raw_moments(s)
            .unwrap()
            .support_radius()
            .unwrap();
        assert!(r.approximate);
        assert!((r.radius - 2.0).abs() < 0.05);
    }

    #[test]
    fn ratios_match_moment_quotients() {
        for spec in [
            MeasureSpec::bergman(0.5).unwrap(),
            MeasureSpec::fock(1.5).unwrap(),
            MeasureSpec::atoms([(0.5, 1.0), (2.0, 0.25), (3.0, 2.0)]).unwrap(),
        ] {
            for d in [0, 3, 10] {
                for j in 0..5 {
                    let r = spec.moment_ratio(d, j).unwrap();
                    let q = spec.moment(d + j).unwrap() / spec.moment(d).unwrap();
                    assert!(close(r, q, 1e-12), "{spec:?} d={d} j={j}: {r} vs {q}");
                }
            }
        }
    }

    #[test]
    fn huge_orders_stay_finite_in_log_space() {
        let f = MeasureSpec::fock(0.0).unwrap();
        assert!(f.moment(400).unwrap().is_infinite());
        let ln = f.ln_moment(400).unwrap();
        assert!((ln - ln_gamma(401.0).0).abs() < 1e-9);
        assert!(close(f.moment_ratio(400, 2).unwrap(), 401.0 * 402.0, 1e-14));
    }

    #[test]
    fn lambda_radius_for_atoms_is_qth_largest() {
        let a = MeasureSpec::atoms([(0.0, 1.0), (1.0, 0.5), (4.0, 0.5), (9.0, 1.0)]).unwrap();
        assert_eq!(a.lambda_radius(1).unwrap(), 9.0);
        assert_eq!(a.lambda_radius(2).unwrap(), 4.0);
        assert_eq!(a.lambda_radius(3).unwrap(), 1.0);
        assert!(a.lambda_radius(4).is_err());
        assert_eq!(
            MeasureSpec::bergman(1.0).unwrap().lambda_radius(3).unwrap(),
            1.0
        );
    }

    #[test]
    fn shift_drops_atom_at_origin() {
        let a = MeasureSpec::atoms([(0.0, 1.0), (2.0, 1.0)]).unwrap();
        assert_eq!(a.support_size(0), Some(2));
        assert_eq!(a.support_size(1), Some(1));
        let shifted = a.shifted_atoms(3).unwrap();
        assert_eq!(shifted.len(), 1);
        assert_eq!(shifted[0].weight, 1.0);
    }
}
