//! Complete and incomplete elliptic integrals and Jacobi elliptic functions.
//!
//! Everything here works with the modulus `k` (not the parameter `m = k²`).
//! Complete integrals use the arithmetic-geometric mean, the incomplete ones
//! a descending Landen chain respectively the AGM angle recursion, so the
//! whole module is dependency-free and converges quadratically.

use crate::{Error, Result};
use std::f64::consts::{FRAC_PI_2, PI};

/// AGM iterations are capped; quadratic convergence reaches f64 resolution in
/// well under ten steps for any modulus below 1 − 1e−16.
const AGM_MAX_ITER: usize = 32;

/// Descending Landen chains halve log(k) per step; 60 covers any admissible k.
const LANDEN_MAX_ITER: usize = 60;

/// Moduli below this are treated as zero by the Landen chains.
const LANDEN_CUTOFF: f64 = 1e-16;

fn check_modulus_open(k: f64) -> Result<()> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::domain(format!("modulus {k} outside [0,1)")));
    }
    Ok(())
}

fn check_modulus_closed(k: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::domain(format!("modulus {k} outside [0,1]")));
    }
    Ok(())
}

/// Below this modulus G switches to its power series: the AGM path forms
/// c₁ = (1 − √(1−k²))/2 with absolute error ~ε, so its relative error in
/// G grows like ε/k² and the series is the accurate branch.
const G_SERIES_CUTOFF: f64 = 0.02;

/// G = (K−E) − k²K/2 = (πk⁴/32)·(1 + ¾k² + …) for small k; truncation
/// after the k⁸ bracket term is below 1 ulp for k ≤ 0.02.
fn g_series(k: f64) -> f64 {
    let q = k * k;
    let bracket = 1.0
        + q * (0.75 + q * (75.0 / 128.0 + q * (245.0 / 512.0 + q * (6615.0 / 16384.0))));
    PI / 32.0 * q * q * bracket
}

/// AGM pass collecting the sums needed by K, K−E and the small-k stable
/// combination G = (K−E) − k²K/2 (the c₀ term removed from the c-sum).
///
/// Returns (K, K−E, G). All three carry full relative accuracy; in
/// particular K−E does not suffer the catastrophic cancellation of
/// computing K and E separately and subtracting (K−E ≈ πk²/4 as k → 0),
/// and G ≈ πk⁴/32 is likewise formed from intrinsically small terms.
fn agm_k_sums(k: f64) -> (f64, f64, f64) {
    let kp = ((1.0 - k) * (1.0 + k)).sqrt();
    let mut a = 1.0_f64;
    let mut b = kp;
    let mut c = k;
    // Σ 2^{n−1} c_n², split into the n=0 term and the rest.
    let first = 0.5 * c * c;
    let mut rest = 0.0_f64;
    let mut pow2 = 0.5;
    for _ in 0..AGM_MAX_ITER {
        if c.abs() <= 4.0 * f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        c = 0.5 * (a - b);
        b = (a * b).sqrt();
        a = an;
        pow2 *= 2.0;
        rest += pow2 * c * c;
    }
    let big_k = FRAC_PI_2 / a;
    let g = if k.abs() < G_SERIES_CUTOFF {
        g_series(k)
    } else {
        big_k * rest
    };
    (big_k, big_k * first + g, g)
}

/// Complete elliptic integral of the first kind K(k) = F(π/2, k).
pub fn complete_k(k: f64) -> Result<f64> {
    check_modulus_open(k)?;
    Ok(agm_k_sums(k).0)
}

/// Complete elliptic integral of the second kind E(k) = E(π/2, k).
pub fn complete_e(k: f64) -> Result<f64> {
    check_modulus_closed(k)?;
    if k == 1.0 {
        return Ok(1.0);
    }
    let (big_k, k_minus_e, _) = agm_k_sums(k);
    Ok(big_k - k_minus_e)
}

/// K(k) − E(k) without cancellation. Near k = 0 this difference is of order
/// k², so forming it from `complete_k` and `complete_e` loses half the
/// digits; the AGM c-sum yields it at full relative accuracy.
pub fn complete_k_minus_e(k: f64) -> Result<f64> {
    check_modulus_open(k)?;
    Ok(agm_k_sums(k).1)
}

/// (K, K−E, (K−E) − k²K/2) in one AGM pass; the third entry is the O(k⁴)
/// remainder that keeps the quotient formulas of the variational module
/// stable for small moduli.
pub(crate) fn complete_k_sums(k: f64) -> Result<(f64, f64, f64)> {
    check_modulus_open(k)?;
    Ok(agm_k_sums(k))
}

/// Splits phi = n·π + r with r ∈ [−π/2, π/2]; returns (n, r).
fn reduce_angle(phi: f64) -> (f64, f64) {
    let n = (phi / PI).round();
    (n, phi - n * PI)
}

/// Incomplete elliptic integral of the first kind F(φ, k), for any real φ.
pub fn incomplete_f(phi: f64, k: f64) -> Result<f64> {
    check_modulus_open(k)?;
    if phi == 0.0 {
        return Ok(0.0);
    }
    if k == 0.0 {
        return Ok(phi);
    }
    let (n, r) = reduce_angle(phi);
    // Descending Landen in the sine variable: each step maps
    // sin φ ↦ 2 sin φ / ((1+k₁)(1 + √(1 − k² sin²φ))) and multiplies the
    // result by (1+k₁); at vanishing modulus F(φ, 0) = φ = asin(sin φ).
    let mut s = r.sin();
    let mut kc = k;
    let mut prod = 1.0_f64;
    for _ in 0..LANDEN_MAX_ITER {
        if kc <= LANDEN_CUTOFF {
            break;
        }
        let kp = ((1.0 - kc) * (1.0 + kc)).sqrt();
        let k1 = (1.0 - kp) / (1.0 + kp);
        s = 2.0 * s / ((1.0 + k1) * (1.0 + ((1.0 - kc * s) * (1.0 + kc * s)).sqrt()));
        prod *= 1.0 + k1;
        kc = k1;
    }
    let f_r = prod * s.clamp(-1.0, 1.0).asin();
    if n == 0.0 {
        Ok(f_r)
    } else {
        Ok(f_r + 2.0 * n * complete_k(k)?)
    }
}

/// Incomplete elliptic integral of the second kind E(φ, k), for any real φ.
/// k = 1 is admitted: E(φ, 1) degenerates to sin on [−π/2, π/2] extended by
/// E(φ + π, 1) = E(φ, 1) + 2.
pub fn incomplete_e(phi: f64, k: f64) -> Result<f64> {
    check_modulus_closed(k)?;
    let (n, r) = reduce_angle(phi);
    if k == 1.0 {
        return Ok(r.sin() + 2.0 * n);
    }
    if k == 0.0 {
        return Ok(phi);
    }
    let (sign, r_abs) = if r < 0.0 { (-1.0, -r) } else { (1.0, r) };
    // AGM angle recursion (Abramowitz–Stegun 17.6): φ_{j+1} ≈ 2 φ_j with
    // tan(φ_{j+1} − φ_j) = (b_j/a_j) tan φ_j, branch chosen by rounding.
    let kp = ((1.0 - k) * (1.0 + k)).sqrt();
    let mut a = 1.0_f64;
    let mut b = kp;
    let mut c = k;
    let mut phi_j = r_abs;
    let mut csum = 0.5 * c * c;
    let mut sin_sum = 0.0_f64;
    let mut pow2 = 0.5;
    let mut denom = 1.0_f64; // 2^j
    for _ in 0..AGM_MAX_ITER {
        if c.abs() <= 4.0 * f64::EPSILON * a {
            break;
        }
        let dp = ((b / a) * phi_j.tan()).atan();
        let wind = ((phi_j - dp) / PI).round();
        phi_j += dp + wind * PI;
        denom *= 2.0;
        let an = 0.5 * (a + b);
        c = 0.5 * (a - b);
        b = (a * b).sqrt();
        a = an;
        pow2 *= 2.0;
        csum += pow2 * c * c;
        sin_sum += c * phi_j.sin();
    }
    let f = phi_j / (denom * a);
    let e_r = f * (1.0 - csum) + sin_sum;
    if n == 0.0 {
        return Ok(sign * e_r);
    }
    let (big_k, kme, _) = agm_k_sums(k);
    Ok(sign * e_r + 2.0 * n * (big_k - kme))
}

/// Jacobi elliptic function values at a common argument.
#[derive(Debug, Clone, Copy)]
pub struct JacobiTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
    /// Jacobi amplitude; the inverse of φ ↦ F(φ, k), continuous in s.
    pub am: f64,
}

/// sn, cn, dn, am at argument s and modulus k ∈ [0, 1).
pub fn jacobi(s: f64, k: f64) -> Result<JacobiTriple> {
    check_modulus_open(k)?;
    if k == 0.0 {
        return Ok(JacobiTriple {
            sn: s.sin(),
            cn: s.cos(),
            dn: 1.0,
            am: s,
        });
    }
    let big_k = complete_k(k)?;
    // s = 2qK + r with r ∈ [−K, K]; am(s) = qπ + am(r).
    let q = (s / (2.0 * big_k)).round();
    let r = s - 2.0 * q * big_k;

    // Descend the modulus chain, recording it for the way back up.
    let mut chain = [0.0_f64; LANDEN_MAX_ITER];
    let mut len = 0;
    let mut kc = k;
    let mut prod = 1.0_f64;
    while kc > LANDEN_CUTOFF && len < LANDEN_MAX_ITER {
        let kp = ((1.0 - kc) * (1.0 + kc)).sqrt();
        kc = (1.0 - kp) / (1.0 + kp);
        chain[len] = kc;
        len += 1;
        prod *= 1.0 + kc;
    }
    // At vanishing modulus the amplitude is the argument itself.
    let mut big_s = (r / prod).sin();
    // Ascending Gauss transformation for sn.
    for j in (0..len).rev() {
        let kj = chain[j];
        big_s = (1.0 + kj) * big_s / (1.0 + kj * big_s * big_s);
    }
    let am_r = big_s.clamp(-1.0, 1.0).asin();
    let am = q * PI + am_r;
    let sn = am.sin();
    let cn = am.cos();
    let dn = (1.0 - (k * sn) * (k * sn)).sqrt();
    Ok(JacobiTriple { sn, cn, dn, am })
}

/// The four moment integrals of sn and cn powers over [0, K(k)].
#[derive(Debug, Clone, Copy)]
pub struct Moments {
    /// ∫₀^K sn² ds = (K−E)/k²
    pub i_sn2: f64,
    /// ∫₀^K cn² ds = K − (K−E)/k²
    pub i_cn2: f64,
    /// ∫₀^K sn⁴ ds = (k²K − 2k²E + 2K − 2E)/(3k⁴)
    pub i_sn4: f64,
    /// ∫₀^K cn⁴ ds = (k⁴K − (5/3)k²K + (4/3)k²E + (2/3)(K−E))/k⁴
    pub i_cn4: f64,
}

/// Closed forms for ∫ sn², cn², sn⁴, cn⁴ over [0, K(k)].
///
/// The quartic moments are assembled from the O(k⁴) remainder G rather than
/// the printed K/E combination, which is the same value without the k→0
/// cancellation: k⁴·I_sn4 = (k⁴K + 2(1+k²)G)/3 and
/// k⁴·I_cn4 = (k⁴K + 2(1−2k²)G)/3.
pub fn elliptic_moments(k: f64) -> Result<Moments> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::domain(format!("modulus {k} outside (0,1)")));
    }
    let (big_k, kme, g) = agm_k_sums(k);
    let k2 = k * k;
    let k4 = k2 * k2;
    let i_sn2 = kme / k2;
    let i_cn2 = big_k - i_sn2;
    let i_sn4 = (k4 * big_k + 2.0 * (1.0 + k2) * g) / (3.0 * k4);
    let i_cn4 = (k4 * big_k + 2.0 * (1.0 - 2.0 * k2) * g) / (3.0 * k4);
    Ok(Moments {
        i_sn2,
        i_cn2,
        i_sn4,
        i_cn4,
    })
}

/// ∫₀^K cn⁶ ds via the recursion lowering cn⁶ to the quartic and quadratic
/// moments; used by the residual integral of the critical-amplitude report.
pub(crate) fn i_cn6(k: f64) -> Result<f64> {
    let m = elliptic_moments(k)?;
    let k2 = k * k;
    Ok((3.0 * (1.0 - k2) * m.i_cn2 - 4.0 * (1.0 - 2.0 * k2) * m.i_cn4) / (5.0 * k2))
}
