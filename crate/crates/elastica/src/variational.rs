//! Closed-form energy quotients of the cn/sn profile family, their
//! maximization, and the quartic interpolation inequality they calibrate.
//!
//! The profile family consists of the mean-zero Neumann functions that make
//! the quotient ∫u⁴ / (2L·∫u²·∫u′²) stationary on an interval of length L.
//! Each member is a rescaled Jacobi cn or sn function indexed by a modulus
//! k ∈ (−1, 1); the quotient value has a closed form in K(k) and E(k), and
//! its supremum over the family is the sharp constant of the inequality
//! checked by [`verify_interpolation_inequality`].

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::elliptic::{complete_k_sums, elliptic_moments, i_cn6, jacobi};
use crate::{Error, Result};

/// Moduli within this distance of a branch junction snap onto it, removing
/// the 0/0 forms of the general quotient there.
const BRANCH_SNAP: f64 = 1e-12;

/// Upper bound for the sharp constant of the quartic interpolation
/// inequality: the supremum of [`q_value`] rounded up in the sixth decimal.
pub const INTERPOLATION_CONSTANT: f64 = 0.162278;

/// Iteration cap for the maximizer root-find.
const ROOT_MAX_ITER: usize = 200;

/// Branch of the profile family, keyed by where the modulus falls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QCase {
    /// k ∈ (1/√2, 1): u = 2k/√(2k²−1) · cn(s/√(2k²−1), k).
    A,
    /// k = 1/√2: u = √2 · cn(s, 1/√2).
    B,
    /// k ∈ (0, 1/√2): u = 2k/√(1−2k²) · cn(s/√(1−2k²), k).
    C,
    /// k = 0: u = cos s.
    D,
    /// k ∈ (−1, 0): u = 2|k|/√(k²+1) · sn(·, |k|), shifted by a quarter
    /// period so the interval starts at a Neumann point.
    E,
}

/// A modulus paired with its branch. Construct via [`QBranch::classify`],
/// which validates the range and snaps near-junction moduli.
#[derive(Debug, Clone, Copy)]
pub struct QBranch {
    case: QCase,
    k: f64,
}

impl QBranch {
    /// Sorts a modulus into its branch; snaps within [`BRANCH_SNAP`] of the
    /// junctions k = 0 and k = 1/√2.
    pub fn classify(k: f64) -> Result<QBranch> {
        if !k.is_finite() || k.abs() >= 1.0 {
            return Err(Error::domain(format!("modulus {k} outside (-1,1)")));
        }
        let (case, k) = if k.abs() < BRANCH_SNAP {
            (QCase::D, 0.0)
        } else if (k - FRAC_1_SQRT_2).abs() < BRANCH_SNAP {
            (QCase::B, FRAC_1_SQRT_2)
        } else if k > FRAC_1_SQRT_2 {
            (QCase::A, k)
        } else if k > 0.0 {
            (QCase::C, k)
        } else {
            (QCase::E, k)
        };
        Ok(QBranch { case, k })
    }

    pub fn case(&self) -> QCase {
        self.case
    }

    pub fn modulus(&self) -> f64 {
        self.k
    }

    /// Argument scale factor: the profile is a Jacobi function of s/scale.
    fn arg_scale(&self) -> f64 {
        let k2 = self.k * self.k;
        match self.case {
            QCase::A => (2.0 * k2 - 1.0).sqrt(),
            QCase::B | QCase::D => 1.0,
            QCase::C => (1.0 - 2.0 * k2).sqrt(),
            QCase::E => (k2 + 1.0).sqrt(),
        }
    }

    /// Length L of the profile's interval of definition [0, L]: one full
    /// period of the underlying Jacobi function (π for the cosine branch).
    pub fn length(&self) -> f64 {
        match self.case {
            QCase::D => PI,
            _ => {
                let (big_k, _, _) = complete_k_sums(self.k.abs())
                    .expect("classify admits only moduli with |k| < 1");
                2.0 * self.arg_scale() * big_k
            }
        }
    }

    /// The profile u(s) on [0, length()]; mean-zero with u′ = 0 at both ends.
    pub fn profile(&self, s: f64) -> Result<f64> {
        let scale = self.arg_scale();
        match self.case {
            QCase::D => Ok(s.cos()),
            QCase::A | QCase::C => {
                let amp = 2.0 * self.k / scale;
                Ok(amp * jacobi(s / scale, self.k)?.cn)
            }
            QCase::B => Ok(2.0_f64.sqrt() * jacobi(s, FRAC_1_SQRT_2)?.cn),
            QCase::E => {
                let kappa = -self.k;
                let amp = 2.0 * kappa / scale;
                let shift = 0.5 * self.length();
                Ok(amp * jacobi((s - shift) / scale, kappa)?.sn)
            }
        }
    }
}

/// Quotient over the cn branches (both sides of k = 1/√2), written in the
/// O(k⁴) remainder G so that numerator and denominator stay cancellation-free
/// down to k ≈ 0: with A = E − (1−k²)K = k²K/2 − G and
/// D₄ = k⁴·∫₀^K cn⁴ = (k⁴K + 2(1−2k²)G)/3,
///
///   Q = 1/(8K·A) · 1/(1 − (k² − 1/2)·A/D₄).
fn q_cn(k: f64) -> Result<f64> {
    let (big_k, _, g) = complete_k_sums(k)?;
    let k2 = k * k;
    let a = 0.5 * k2 * big_k - g;
    let d4 = (k2 * k2 * big_k + 2.0 * (1.0 - 2.0 * k2) * g) / 3.0;
    Ok(1.0 / (8.0 * big_k * a) / (1.0 - (k2 - 0.5) * a / d4))
}

/// Quotient over the sn branch, at modulus κ = −k ∈ (0, 1): with Δ = K − E
/// and M₄ = κ⁴·∫₀^K sn⁴ = (κ⁴K + 2(1+κ²)G)/3,
///
///   Q = 1/(8K·Δ) · 1/((κ² + 1)·Δ/(2M₄) − 1).
fn q_sn(kappa: f64) -> Result<f64> {
    let (big_k, kme, g) = complete_k_sums(kappa)?;
    let k2 = kappa * kappa;
    let m4 = (k2 * k2 * big_k + 2.0 * (1.0 + k2) * g) / 3.0;
    Ok(1.0 / (8.0 * big_k * kme) / (0.5 * (k2 + 1.0) * kme / m4 - 1.0))
}

/// The normalized quotient ∫u⁴ / (2L·∫u²·∫u′²) of the profile with modulus
/// k (integrals over half the period), by its closed form in K and E.
/// Snaps within 1e−12 of the branch junctions; |k| ≥ 1 is rejected.
pub fn q_value(k: f64) -> Result<f64> {
    let b = QBranch::classify(k)?;
    match b.case {
        QCase::D => Ok(1.5 / (PI * PI)),
        QCase::A | QCase::B | QCase::C => q_cn(b.k),
        QCase::E => q_sn(-b.k),
    }
}

/// 1/Q on (1/√2, 1) factors as F₁·F₂; this is d/dk log(F₁F₂), whose sign
/// change brackets the maximizer of Q.
fn log_deriv_inv_q(k: f64) -> Result<f64> {
    let (big_k, kme, g) = complete_k_sums(k)?;
    let e = big_k - kme;
    let k2 = k * k;
    let kp2 = 1.0 - k2;
    let a = 0.5 * k2 * big_k - g;
    let f1 = 8.0 * big_k * a;
    let f1p = 8.0 * a * a / (k * kp2) + 8.0 * k * big_k * big_k;
    let n2 = kp2 * big_k + (2.0 * k2 - 1.0) * e;
    let half_d2 = kp2 * (2.0 - 3.0 * k2) * big_k + 2.0 * (2.0 * k2 - 1.0) * e;
    let f2 = n2 / (2.0 * half_d2);
    let f2p = 1.5 * k * (kp2 * big_k * big_k + (2.0 * k2 - 1.0) * e * e - 2.0 * k2 * e * big_k)
        / (half_d2 * half_d2);
    Ok(f1p / f1 + f2p / f2)
}

/// The stationarity equation for the maximizer, in the expanded arrangement
/// used as an independent residual check on the root returned by
/// [`find_kmax`]; zero at the maximizing modulus.
fn stationarity_residual(k: f64) -> Result<f64> {
    let (big_k, kme, g) = complete_k_sums(k)?;
    let e = big_k - kme;
    let k2 = k * k;
    let kp2 = 1.0 - k2;
    let a = 0.5 * k2 * big_k - g;
    let n2 = kp2 * big_k + (2.0 * k2 - 1.0) * e;
    let half_d2 = kp2 * (2.0 - 3.0 * k2) * big_k + 2.0 * (2.0 * k2 - 1.0) * e;
    let lhs = kme / (k * a) + e / (k * kp2 * big_k);
    let rhs = 3.0 * k * (-kp2 * big_k * big_k + 2.0 * k2 * e * big_k - (2.0 * k2 - 1.0) * e * e)
        / (half_d2 * n2);
    Ok(lhs - rhs)
}

/// Maximizer of [`q_value`]: returns (k_max, q_value(k_max)).
///
/// Roots d/dk log(F₁F₂) on (1/√2, 1) by bisection refined with secant
/// proposals, then cross-checks the root against the expanded stationarity
/// equation to 1e−12.
pub fn find_kmax() -> Result<(f64, f64)> {
    let mut lo = 0.72;
    let mut hi = 0.98;
    let mut flo = log_deriv_inv_q(lo)?;
    let fhi = log_deriv_inv_q(hi)?;
    if !(flo < 0.0 && fhi > 0.0) {
        return Err(Error::numerical(
            "maximizer bracket [0.72, 0.98] does not change sign",
        ));
    }
    // Invariant: f(lo) < 0 < f(hi). Secant proposal on the bracket with the
    // Illinois weight halving: a retained endpoint has its stored value
    // halved, which keeps both ends moving and the convergence superlinear.
    let mut fhi_cur = fhi;
    let mut last_sign = 0i8;
    for _ in 0..ROOT_MAX_ITER {
        if hi - lo <= 2.0 * f64::EPSILON * hi {
            break;
        }
        let mut x = lo - flo * (hi - lo) / (fhi_cur - flo);
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let fx = log_deriv_inv_q(x)?;
        if fx == 0.0 {
            lo = x;
            hi = x;
            break;
        }
        if fx < 0.0 {
            lo = x;
            flo = fx;
            if last_sign == -1 {
                fhi_cur *= 0.5;
            }
            last_sign = -1;
        } else {
            hi = x;
            fhi_cur = fx;
            if last_sign == 1 {
                flo *= 0.5;
            }
            last_sign = 1;
        }
    }
    let k_max = 0.5 * (lo + hi);
    let residual = stationarity_residual(k_max)?;
    if residual.abs() > 1e-12 {
        return Err(Error::numerical(format!(
            "stationarity residual {residual:.3e} at k = {k_max} exceeds 1e-12"
        )));
    }
    Ok((k_max, q_value(k_max)?))
}

/// The modified quotient (∫u⁴ − 2L) / (2L·∫u²·∫u′²) on the upper cn branch
/// (half-period integrals), where the subtracted 2L uses that these profiles
/// satisfy u″ + u³/2 = u identically. Closed form:
///
///   Q̃ = (1 − (2k²−1)²·K/(4D₄)) · Q(k),   k ∈ (1/√2, 1).
pub fn q_tilde(k: f64) -> Result<f64> {
    if !(k > FRAC_1_SQRT_2 && k < 1.0) {
        return Err(Error::domain(format!("modulus {k} outside (1/sqrt2,1)")));
    }
    let (big_k, _, g) = complete_k_sums(k)?;
    let k2 = k * k;
    let d4 = (k2 * k2 * big_k + 2.0 * (1.0 - 2.0 * k2) * g) / 3.0;
    let t = 2.0 * k2 - 1.0;
    Ok((1.0 - t * t * big_k / (4.0 * d4)) * q_cn(k)?)
}

/// Integral data of the near-critical profile u = a·cn(s, k) on [0, 2K(k)],
/// with the amplitude chosen so that the scale-invariant product
/// L·∫u² equals 4π (the borderline value for flowing to a line).
#[derive(Debug, Clone, Copy)]
pub struct CriticalProfileReport {
    pub k: f64,
    /// Amplitude √(π/(K·∫₀^K cn²)) making L·∫u² = 4π.
    pub a_star: f64,
    /// ∫u² over [0, 2K]; equals 2π/K by the choice of a_star.
    pub int_u2: f64,
    /// ∫u⁴ over [0, 2K].
    pub int_u4: f64,
    /// ∫u′² over [0, 2K].
    pub int_du2: f64,
    /// ∫(u″ + u³/2)² over [0, 2K].
    pub int_residual2: f64,
    /// ∫u²·(−∫u′² + ∫u⁴/2) − 2L·∫(u″ + u³/2)²; positive means the
    /// energy-growth functional is not sign-definite at this profile.
    pub lhs: f64,
}

/// Evaluates [`CriticalProfileReport`] at modulus k through the closed-form
/// moment integrals.
pub fn critical_profile_report(k: f64) -> Result<CriticalProfileReport> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::domain(format!("modulus {k} outside (0,1)")));
    }
    let (big_k, _, _) = complete_k_sums(k)?;
    let m = elliptic_moments(k)?;
    let k2 = k * k;
    let a_star = (PI / (big_k * m.i_cn2)).sqrt();
    let a2 = a_star * a_star;
    let a4 = a2 * a2;
    let int_u2 = 2.0 * a2 * m.i_cn2;
    let int_u4 = 2.0 * a4 * m.i_cn4;
    let int_du2 = 2.0 * a2 * (m.i_sn2 - k2 * m.i_sn4);
    // u″ + u³/2 = α·cn + β·cn³ for the cn profile.
    let alpha = a_star * (2.0 * k2 - 1.0);
    let beta = 0.5 * a2 * a_star - 2.0 * a_star * k2;
    let int_residual2 =
        2.0 * (alpha * alpha * m.i_cn2 + 2.0 * alpha * beta * m.i_cn4 + beta * beta * i_cn6(k)?);
    let len = 2.0 * big_k;
    let lhs = int_u2 * (-int_du2 + 0.5 * int_u4) - 2.0 * len * int_residual2;
    Ok(CriticalProfileReport {
        k,
        a_star,
        int_u2,
        int_u4,
        int_du2,
        int_residual2,
        lhs,
    })
}

/// Outcome of checking ∫u⁴ ≤ C·L·∫u²·∫u′² on sampled data.
#[derive(Debug, Clone, Copy)]
pub struct InequalityCheck {
    /// ∫u⁴ of the even trigonometric interpolant of the samples.
    pub lhs4: f64,
    /// [`INTERPOLATION_CONSTANT`]·L·∫u²·∫u′².
    pub rhs: f64,
    /// lhs4 ≤ rhs·(1 + 1e−8).
    pub holds: bool,
}

/// Checks the quartic interpolation inequality on uniform samples of u over
/// [0, len].
///
/// The samples are expanded in the cosine basis (so u′ is evaluated
/// spectrally); ∫u² and ∫u′² follow from Parseval, and ∫u⁴ is integrated
/// exactly by the trapezoid rule on a 4× refined reconstruction, which
/// resolves every mode of the quartic. All integrals are those of the even
/// trigonometric interpolant of the samples.
///
/// Preconditions checked to 1e−8 (violations are domain errors carrying the
/// offending residual): at least 64 samples, trapezoid mean zero relative to
/// len·‖u‖∞, and vanishing end derivatives measured against a unit-amplitude
/// first-mode slope (sixth-order one-sided differences).
pub fn verify_interpolation_inequality(u: &[f64], len: f64) -> Result<InequalityCheck> {
    if u.len() < 64 {
        return Err(Error::domain(format!(
            "{} samples; at least 64 required",
            u.len()
        )));
    }
    if !(len > 0.0) || !len.is_finite() {
        return Err(Error::domain(format!("interval length {len} not positive")));
    }
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("samples contain a non-finite value"));
    }
    let n = u.len() - 1;
    let h = len / n as f64;
    let umax = u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if umax == 0.0 {
        return Ok(InequalityCheck {
            lhs4: 0.0,
            rhs: 0.0,
            holds: true,
        });
    }

    let trapezoid_mean: f64 =
        h * (0.5 * u[0] + u[1..n].iter().sum::<f64>() + 0.5 * u[n]);
    let mean_residual = trapezoid_mean.abs() / (len * umax);
    if mean_residual > 1e-8 {
        return Err(Error::domain(format!(
            "mean residual {mean_residual:.3e} exceeds 1e-8"
        )));
    }

    // Sixth-order one-sided first derivative at each end.
    const D6: [f64; 7] = [
        -49.0 / 20.0,
        6.0,
        -15.0 / 2.0,
        20.0 / 3.0,
        -15.0 / 4.0,
        6.0 / 5.0,
        -1.0 / 6.0,
    ];
    let dleft: f64 = D6.iter().enumerate().map(|(i, c)| c * u[i]).sum::<f64>() / h;
    let dright: f64 = -D6.iter().enumerate().map(|(i, c)| c * u[n - i]).sum::<f64>() / h;
    let slope_unit = 2.0 * PI * umax / len;
    for (side, d) in [("left", dleft), ("right", dright)] {
        let residual = d.abs() / slope_unit;
        if residual > 1e-8 {
            return Err(Error::domain(format!(
                "{side} end derivative residual {residual:.3e} exceeds 1e-8"
            )));
        }
    }

    // Cosine coefficients: u_j = c₀ + Σ_{1..n−1} c_m cos(πmj/n) + c_n(−1)^j.
    let table: Vec<f64> = (0..2 * n).map(|r| (PI * r as f64 / n as f64).cos()).collect();
    let mut coef = vec![0.0_f64; n + 1];
    for (m, cm) in coef.iter_mut().enumerate() {
        let mut acc = 0.5 * u[0];
        for (j, &uj) in u.iter().enumerate().take(n).skip(1) {
            acc += uj * table[(j * m) % (2 * n)];
        }
        acc += 0.5 * if m % 2 == 0 { u[n] } else { -u[n] };
        *cm = 2.0 * acc / n as f64;
    }
    coef[0] *= 0.5;
    coef[n] *= 0.5;

    let mut int_u2 = coef[0] * coef[0] * len;
    let mut int_du2 = 0.0;
    for (m, &cm) in coef.iter().enumerate().skip(1) {
        let freq = PI * m as f64 / len;
        int_u2 += 0.5 * len * cm * cm;
        int_du2 += 0.5 * len * freq * freq * cm * cm;
    }

    // Reconstruct on a 4× grid; the quartic of a degree-n cosine polynomial
    // has degree 4n, which 4n panels integrate exactly.
    let nf = 4 * n;
    let table_f: Vec<f64> = (0..2 * nf)
        .map(|r| (PI * r as f64 / nf as f64).cos())
        .collect();
    let mut int_u4 = 0.0;
    for j in 0..=nf {
        let mut v = 0.0;
        for (m, &cm) in coef.iter().enumerate() {
            v += cm * table_f[(j * m) % (2 * nf)];
        }
        let w = if j == 0 || j == nf { 0.5 } else { 1.0 };
        int_u4 += w * v * v * v * v;
    }
    int_u4 *= len / nf as f64;

    let rhs = INTERPOLATION_CONSTANT * len * int_u2 * int_du2;
    Ok(InequalityCheck {
        lhs4: int_u4,
        rhs,
        holds: int_u4 <= rhs * (1.0 + 1e-8),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_at_zero_and_junction() {
        assert_eq!(q_value(0.0).unwrap(), 1.5 / (PI * PI));
        let q_b = q_value(FRAC_1_SQRT_2).unwrap();
        assert!((q_b - 0.5 / PI).abs() < 1e-14, "q(1/sqrt2) = {q_b}");
    }

    #[test]
    fn q_rejects_out_of_range() {
        for bad in [1.0, -1.0, 1.2, -3.0, f64::NAN, f64::INFINITY] {
            assert!(q_value(bad).is_err(), "q_value({bad}) should fail");
        }
    }

    #[test]
    fn q_snaps_near_junctions() {
        assert_eq!(q_value(4e-13).unwrap(), q_value(0.0).unwrap());
        assert_eq!(
            q_value(FRAC_1_SQRT_2 + 4e-13).unwrap(),
            q_value(FRAC_1_SQRT_2).unwrap()
        );
    }

    #[test]
    fn q_one_sided_limits_match_junction_values() {
        let d = 1e-9;
        let q0 = q_value(0.0).unwrap();
        assert!((q_value(d).unwrap() - q0).abs() < 1e-8);
        assert!((q_value(-d).unwrap() - q0).abs() < 1e-8);
        let qb = q_value(FRAC_1_SQRT_2).unwrap();
        assert!((q_value(FRAC_1_SQRT_2 + d).unwrap() - qb).abs() < 1e-8);
        assert!((q_value(FRAC_1_SQRT_2 - d).unwrap() - qb).abs() < 1e-8);
    }

    #[test]
    fn q_vanishes_toward_unit_modulus() {
        let q_hi = q_value(0.999).unwrap();
        let q_lo = q_value(-0.999).unwrap();
        assert!(q_hi > 0.0 && q_hi < 0.12, "q(0.999) = {q_hi}");
        assert!(q_lo > 0.0 && q_lo < 0.12, "q(-0.999) = {q_lo}");
        assert!(q_value(0.9999).unwrap() < q_hi);
        assert!(q_value(-0.9999).unwrap() < q_lo);
    }

    #[test]
    fn maximizer_location_and_value() {
        let (k_max, c0) = find_kmax().unwrap();
        assert!((k_max - 0.8802924038863).abs() < 1e-10, "k_max = {k_max}");
        assert!((c0 - 0.162277833628).abs() < 1e-10, "c0 = {c0}");
    }

    #[test]
    fn quotient_below_bound_on_grid() {
        let n = 10_000;
        for i in 0..n {
            let k = -1.0 + 2.0 * (i as f64 + 0.5) / n as f64;
            let q = q_value(k).unwrap();
            assert!(q < INTERPOLATION_CONSTANT, "q({k}) = {q}");
        }
    }

    #[test]
    fn modified_quotient_domain_and_junction_behavior() {
        assert!(q_tilde(FRAC_1_SQRT_2).is_err());
        assert!(q_tilde(1.0).is_err());
        assert!(q_tilde(0.5).is_err());
        // The factor in front of Q tends to 1 at the junction, so Q̃ inherits
        // the junction value 1/(2π), approached from above because Q is
        // increasing there; Q̃ exceeding 1/(2π) anywhere is the point.
        let just_above = q_tilde(FRAC_1_SQRT_2 + 1e-6).unwrap();
        assert!(just_above > 0.5 / PI);
        assert!(just_above - 0.5 / PI < 1e-6);
        // Q̃ < Q pointwise: the numerator is reduced by a positive quantity.
        for i in 1..40 {
            let k = FRAC_1_SQRT_2 + (1.0 - FRAC_1_SQRT_2) * i as f64 / 40.0;
            assert!(q_tilde(k).unwrap() < q_value(k).unwrap(), "at k = {k}");
        }
    }

    #[test]
    fn critical_profile_pinned_values() {
        let r = critical_profile_report(0.71).unwrap();
        assert!((r.a_star - 1.41233776).abs() < 1e-7, "a_star = {}", r.a_star);
        assert!((r.int_u4 - 4.92029245).abs() < 1e-7, "int_u4 = {}", r.int_u4);
        assert!(
            (r.int_du2 - 2.45917590).abs() < 1e-7,
            "int_du2 = {}",
            r.int_du2
        );
        assert!(
            (r.int_residual2 - 0.0000273294).abs() < 1e-9,
            "int_residual2 = {}",
            r.int_residual2
        );
        assert!((r.lhs - 0.00307904).abs() < 1e-7, "lhs = {}", r.lhs);
        // The normalization the amplitude is built for.
        let (big_k, _, _) = complete_k_sums(0.71).unwrap();
        assert!((r.int_u2 - 2.0 * PI / big_k).abs() < 1e-13);
    }

    #[test]
    fn critical_profile_rejects_bad_modulus() {
        assert!(critical_profile_report(0.0).is_err());
        assert!(critical_profile_report(1.0).is_err());
        assert!(critical_profile_report(-0.5).is_err());
    }

    #[test]
    fn branch_lengths_are_positive_periods() {
        for k in [-0.95, -0.3, 0.0, 0.3, FRAC_1_SQRT_2, 0.8, 0.99] {
            let b = QBranch::classify(k).unwrap();
            assert!(b.length() > 0.0);
        }
        assert_eq!(QBranch::classify(0.0).unwrap().length(), PI);
    }

    #[test]
    fn profile_hits_neumann_endpoints() {
        // cn branches start at a crest (u = amplitude); the sn branch starts
        // at a trough. Either way the end values repeat the |amplitude|.
        for k in [-0.6, 0.4, 0.9] {
            let b = QBranch::classify(k).unwrap();
            let len = b.length();
            let u0 = b.profile(0.0).unwrap();
            let u1 = b.profile(len).unwrap();
            assert!(
                (u0.abs() - u1.abs()).abs() < 1e-12,
                "endpoint magnitudes differ at k = {k}: {u0} vs {u1}"
            );
        }
    }

    #[test]
    fn inequality_holds_for_pure_cosine() {
        let n = 256;
        let len = PI;
        let u: Vec<f64> = (0..=n)
            .map(|j| (PI * j as f64 / n as f64).cos())
            .collect();
        let chk = verify_interpolation_inequality(&u, len).unwrap();
        assert!(chk.holds);
        assert!((chk.lhs4 - 3.0 * len / 8.0).abs() < 1e-12);
        let expected_rhs = INTERPOLATION_CONSTANT * len * (len / 2.0) * (PI * PI / (2.0 * len));
        assert!((chk.rhs - expected_rhs).abs() < 1e-12);
    }

    #[test]
    fn inequality_rejects_bad_input() {
        let n = 256;
        let u: Vec<f64> = (0..=n)
            .map(|j| (PI * j as f64 / n as f64).cos())
            .collect();
        assert!(verify_interpolation_inequality(&u[..32], 1.0).is_err());
        assert!(verify_interpolation_inequality(&u, 0.0).is_err());
        assert!(verify_interpolation_inequality(&u, f64::NAN).is_err());
        // Constant offset breaks the mean-zero precondition.
        let shifted: Vec<f64> = u.iter().map(|v| v + 0.5).collect();
        assert!(verify_interpolation_inequality(&shifted, PI).is_err());
        // A sine has maximal end slope.
        let sine: Vec<f64> = (0..=n)
            .map(|j| (PI * j as f64 / n as f64).sin())
            .collect();
        assert!(verify_interpolation_inequality(&sine, PI).is_err());
    }

    #[test]
    fn inequality_scale_invariance() {
        let n = 128;
        let len = 2.7;
        let u: Vec<f64> = (0..=n)
            .map(|j| (PI * j as f64 / n as f64).cos() + 0.3 * (3.0 * PI * j as f64 / n as f64).cos())
            .collect();
        let base = verify_interpolation_inequality(&u, len).unwrap();
        let scaled: Vec<f64> = u.iter().map(|v| 7.5 * v).collect();
        let big = verify_interpolation_inequality(&scaled, len).unwrap();
        let ratio_base = base.lhs4 / base.rhs;
        let ratio_big = big.lhs4 / big.rhs;
        assert!((ratio_base - ratio_big).abs() < 1e-12);
        assert_eq!(base.holds, big.holds);
    }
}
