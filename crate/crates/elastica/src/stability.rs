//! Linear stability of the one-arch rectangular elastica: the quadratic
//! form of the linearised operator, evaluated on sampled test modes over
//! one arch `[0, 2K]` at modulus 1/√2.
//!
//! A negative form value on an admissible mode certifies an unstable
//! direction.

use crate::elliptic::{complete_k, jacobi};
use crate::{Error, Result};

const MODULUS: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Length of one arch of the elastica in arclength, `2K(1/√2)`.
pub fn arch_length() -> f64 {
    2.0 * complete_k(MODULUS).expect("modulus is fixed and valid")
}

/// Coefficients `(c2, c0)` of the linearised operator
/// `L v = v_ssss + (c2 v_s)_s + c0 v` at arclength `s`:
/// `c2 = 5 cn²(s)`, `c0 = 3 - 5 cn⁴(s)`.
pub fn linearized_coefficients(s: f64) -> Result<(f64, f64)> {
    let len = arch_length();
    if !s.is_finite() || s < 0.0 || s > len {
        return Err(Error::domain(format!(
            "arclength {s} outside the arch [0, {len}]"
        )));
    }
    let cn = jacobi(s, MODULUS)?.cn;
    let cn2 = cn * cn;
    Ok((5.0 * cn2, 3.0 - 5.0 * cn2 * cn2))
}

/// Variation sampled on a uniform arclength grid over one arch, with its
/// first two derivatives.
///
/// Admissibility: the first derivative vanishes at both ends (to 1e-10),
/// matching the perpendicular-contact constraint class. The panel count is
/// even so composite Simpson applies directly.
#[derive(Debug, Clone)]
pub struct TestMode {
    pub v: Vec<f64>,
    pub vp: Vec<f64>,
    pub vpp: Vec<f64>,
}

impl TestMode {
    /// `cos(half_waves · πs / 2K)` with analytic derivatives;
    /// `half_waves = 0` is the constant mode.
    pub fn cosine(half_waves: usize, panels: usize) -> Result<TestMode> {
        check_panels(panels)?;
        let len = arch_length();
        let w = half_waves as f64 * std::f64::consts::PI / len;
        let n = panels;
        let mut v = Vec::with_capacity(n + 1);
        let mut vp = Vec::with_capacity(n + 1);
        let mut vpp = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let s = len * i as f64 / n as f64;
            v.push((w * s).cos());
            vp.push(-w * (w * s).sin());
            vpp.push(-w * w * (w * s).cos());
        }
        // sin(half_waves·π) at the right end is exactly zero analytically.
        vp[0] = 0.0;
        vp[n] = 0.0;
        let mode = TestMode { v, vp, vpp };
        mode.validate()?;
        Ok(mode)
    }

    /// Builds a mode from samples alone; derivatives by fourth-order
    /// centred finite differences (one-sided at the ends).
    pub fn from_values(v: Vec<f64>) -> Result<TestMode> {
        if v.len() < 7 {
            return Err(Error::domain("mode needs at least 7 samples"));
        }
        check_panels(v.len() - 1)?;
        let n = v.len() - 1;
        let h = arch_length() / n as f64;

        let mut vp = vec![0.0; n + 1];
        let mut vpp = vec![0.0; n + 1];
        for i in 2..n - 1 {
            vp[i] = (-v[i + 2] + 8.0 * v[i + 1] - 8.0 * v[i - 1] + v[i - 2]) / (12.0 * h);
            vpp[i] = (-v[i + 2] + 16.0 * v[i + 1] - 30.0 * v[i] + 16.0 * v[i - 1]
                - v[i - 2])
                / (12.0 * h * h);
        }
        let d1 = |c: [f64; 5], at: usize, sign: f64| -> f64 {
            let pick = |k: usize| if sign > 0.0 { v[at + k] } else { v[at - k] };
            sign * (c[0] * pick(0) + c[1] * pick(1) + c[2] * pick(2) + c[3] * pick(3)
                + c[4] * pick(4))
                / (12.0 * h)
        };
        let fwd1 = [-25.0, 48.0, -36.0, 16.0, -3.0];
        let mid1 = [-3.0, -10.0, 18.0, -6.0, 1.0];
        vp[0] = d1(fwd1, 0, 1.0);
        vp[1] = d1(mid1, 0, 1.0) + 0.0;
        vp[n] = d1(fwd1, n, -1.0);
        vp[n - 1] = d1(mid1, n, -1.0);

        let d2 = |c: [f64; 6], at: usize, dir: isize| -> f64 {
            (0..6)
                .map(|k| c[k] * v[(at as isize + dir * k as isize) as usize])
                .sum::<f64>()
                / (12.0 * h * h)
        };
        let fwd2 = [45.0, -154.0, 214.0, -156.0, 61.0, -10.0];
        let mid2 = [10.0, -15.0, -4.0, 14.0, -6.0, 1.0];
        vpp[0] = d2(fwd2, 0, 1);
        vpp[1] = d2(mid2, 0, 1);
        vpp[n] = d2(fwd2, n, -1);
        vpp[n - 1] = d2(mid2, n, -1);

        let mode = TestMode { v, vp, vpp };
        mode.validate()?;
        Ok(mode)
    }

    pub fn panels(&self) -> usize {
        self.v.len() - 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.v.len() != self.vp.len() || self.v.len() != self.vpp.len() {
            return Err(Error::domain("mode sample lengths differ"));
        }
        check_panels(self.v.len().saturating_sub(1))?;
        for row in [&self.v, &self.vp, &self.vpp] {
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::domain("non-finite mode sample"));
            }
        }
        let n = self.v.len() - 1;
        if self.vp[0].abs() > 1e-10 || self.vp[n].abs() > 1e-10 {
            return Err(Error::domain(format!(
                "inadmissible mode: end slopes {:e}, {:e}",
                self.vp[0], self.vp[n]
            )));
        }
        Ok(())
    }
}

fn check_panels(panels: usize) -> Result<()> {
    if panels < 4 || panels % 2 != 0 {
        return Err(Error::domain("panel count must be even and at least 4"));
    }
    Ok(())
}

/// Default quadrature resolution: comfortably below 1e-8 absolute error
/// for the smooth integrands here.
pub const DEFAULT_PANELS: usize = 1 << 14;

/// The quadratic form
/// `B[v] = ∫ (v_ss² − 5 cn² v_s² + (3 − 5 cn⁴) v²) ds` over one arch,
/// by composite Simpson on the mode's own grid.
pub fn quad_form_b(mode: &TestMode) -> Result<f64> {
    bilinear_form_b(mode, mode)
}

/// Polarised version of [`quad_form_b`]; both modes must share a grid.
pub fn bilinear_form_b(a: &TestMode, b: &TestMode) -> Result<f64> {
    a.validate()?;
    b.validate()?;
    if a.v.len() != b.v.len() {
        return Err(Error::domain("modes sampled on different grids"));
    }
    let n = a.panels();
    let len = arch_length();
    let h = len / n as f64;
    let mut sum = 0.0;
    for i in 0..=n {
        let s = len * i as f64 / n as f64;
        let (c2, c0) = linearized_coefficients(s)?;
        let f = a.vpp[i] * b.vpp[i] - c2 * a.vp[i] * b.vp[i] + c0 * a.v[i] * b.v[i];
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sum += w * f;
    }
    Ok(sum * h / 3.0)
}

/// Generalised eigenvalues (ascending) of the form restricted to the span
/// of the first three cosine modes, against their L² Gram matrix. A
/// negative smallest eigenvalue certifies instability.
pub fn three_mode_spectrum(panels: usize) -> Result<[f64; 3]> {
    let modes = [
        TestMode::cosine(0, panels)?,
        TestMode::cosine(1, panels)?,
        TestMode::cosine(2, panels)?,
    ];
    let mut bm = [[0.0; 3]; 3];
    let mut gm = [[0.0; 3]; 3];
    let n = panels;
    let len = arch_length();
    let h = len / n as f64;
    for r in 0..3 {
        for c in 0..3 {
            bm[r][c] = bilinear_form_b(&modes[r], &modes[c])?;
            let mut sum = 0.0;
            for i in 0..=n {
                let w = if i == 0 || i == n {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                sum += w * modes[r].v[i] * modes[c].v[i];
            }
            gm[r][c] = sum * h / 3.0;
        }
    }

    // Reduce B x = λ G x to standard form with the Cholesky factor of G.
    let l = cholesky3(&gm)?;
    let linv_b = forward_sub3(&l, &bm);
    let mut a = [[0.0; 3]; 3];
    let bt = transpose3(&linv_b);
    let linv_bt = forward_sub3(&l, &bt);
    for r in 0..3 {
        for c in 0..3 {
            a[r][c] = 0.5 * (linv_bt[c][r] + linv_bt[r][c]);
        }
    }
    let mut eig = jacobi_eigen3(a);
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

fn cholesky3(g: &[[f64; 3]; 3]) -> Result<[[f64; 3]; 3]> {
    let mut l = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..=i {
            let mut s = g[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(Error::numerical("Gram matrix not positive definite"));
                }
                l[i][j] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Ok(l)
}

// Solves L X = M columnwise-by-rows for lower-triangular L.
fn forward_sub3(l: &[[f64; 3]; 3], m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut x = [[0.0; 3]; 3];
    for c in 0..3 {
        for r in 0..3 {
            let mut s = m[r][c];
            for k in 0..r {
                s -= l[r][k] * x[k][c];
            }
            x[r][c] = s / l[r][r];
        }
    }
    x
}

fn transpose3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut t = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            t[r][c] = m[c][r];
        }
    }
    t
}

// Cyclic Jacobi rotations on a symmetric 3x3 matrix.
fn jacobi_eigen3(mut a: [[f64; 3]; 3]) -> [f64; 3] {
    for _ in 0..50 {
        let off = a[0][1].abs().max(a[0][2].abs()).max(a[1][2].abs());
        if off < 1e-15 * (a[0][0].abs() + a[1][1].abs() + a[2][2].abs()).max(1.0) {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            if a[p][q].abs() < f64::MIN_POSITIVE {
                continue;
            }
            let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            let mut b = a;
            for k in 0..3 {
                b[p][k] = c * a[p][k] - s * a[q][k];
                b[q][k] = s * a[p][k] + c * a[q][k];
            }
            let tmp = b;
            for k in 0..3 {
                b[k][p] = c * tmp[k][p] - s * tmp[k][q];
                b[k][q] = s * tmp[k][p] + c * tmp[k][q];
            }
            a = b;
        }
    }
    [a[0][0], a[1][1], a[2][2]]
}


#[cfg(test)]
impl TestMode {
    // First derivative by the same fourth-order stencils as from_values,
    // without admissibility checks; test helper for operator application.
    fn from_values_unchecked_derivative(v: &[f64], h: f64) -> Vec<f64> {
        let n = v.len() - 1;
        let mut vp = vec![0.0; n + 1];
        for i in 2..n - 1 {
            vp[i] = (-v[i + 2] + 8.0 * v[i + 1] - 8.0 * v[i - 1] + v[i - 2]) / (12.0 * h);
        }
        let d1 = |c: [f64; 5], at: usize, sign: f64| -> f64 {
            let pick = |k: usize| {
                if sign > 0.0 {
                    v[at + k]
                } else {
                    v[at - k]
                }
            };
            sign * (c[0] * pick(0) + c[1] * pick(1) + c[2] * pick(2) + c[3] * pick(3)
                + c[4] * pick(4))
                / (12.0 * h)
        };
        let fwd1 = [-25.0, 48.0, -36.0, 16.0, -3.0];
        let mid1 = [-3.0, -10.0, 18.0, -6.0, 1.0];
        vp[0] = d1(fwd1, 0, 1.0);
        vp[1] = d1(mid1, 0, 1.0);
        vp[n] = d1(fwd1, n, -1.0);
        vp[n - 1] = d1(mid1, n, -1.0);
        vp
    }
}
