//! Initial-data generators and discrete-curve geometry.
//!
//! All curves live on the uniform partition ρ_j = −1 + 2j/J of [−1, 1].
//! Generators produce nodal positions, and nodal curvature vectors where a
//! closed form exists. Endpoints sit on vertical support lines, so curvature
//! vectors carry a vanishing first component at the boundary nodes; where an
//! end value is an exact zero of the underlying formula, roundoff dust is
//! cleared so the node sits in the constrained subspace exactly.

use crate::elliptic::{complete_e, complete_k, incomplete_e, jacobi};
use crate::{Error, Result, Vec2};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Piecewise-linear curve: J+1 nodal positions, optional nodal curvature
/// vectors. The partition is implicit (uniform on [−1, 1]).
#[derive(Debug, Clone)]
pub struct DiscreteCurve {
    /// Nodal positions, length J+1.
    pub x: Vec<Vec2>,
    /// Nodal curvature vectors, length J+1 when present; first components
    /// vanish at nodes 0 and J.
    pub y: Option<Vec<Vec2>>,
}

impl DiscreteCurve {
    /// Number of elements J.
    pub fn element_count(&self) -> usize {
        self.x.len() - 1
    }

    /// Partition width h = 2/J.
    pub fn h(&self) -> f64 {
        2.0 / self.element_count() as f64
    }

    /// Node coordinate ρ_j = −1 + 2j/J.
    pub fn rho(&self, j: usize) -> f64 {
        -1.0 + 2.0 * j as f64 / self.element_count() as f64
    }

    /// Checks the structural invariants: at least one element, finite
    /// positions, no degenerate element, and (when curvature vectors are
    /// present) matching length and exactly vanishing first components at
    /// the boundary nodes.
    pub fn validate(&self) -> Result<()> {
        if self.x.len() < 2 {
            return Err(Error::domain("curve needs at least two nodes"));
        }
        if self.x.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::domain("non-finite nodal position"));
        }
        for (e, w) in self.x.windows(2).enumerate() {
            if (w[1] - w[0]).norm() <= 0.0 {
                return Err(Error::domain(format!("zero-length element {e}")));
            }
        }
        if let Some(y) = &self.y {
            if y.len() != self.x.len() {
                return Err(Error::domain(format!(
                    "curvature node count {} does not match position node count {}",
                    y.len(),
                    self.x.len()
                )));
            }
            if y.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
                return Err(Error::domain("non-finite nodal curvature vector"));
            }
            let last = y.len() - 1;
            if y[0].x != 0.0 || y[last].x != 0.0 {
                return Err(Error::domain(
                    "curvature first component must vanish at the boundary nodes",
                ));
            }
        }
        Ok(())
    }
}

fn check_element_count(j: usize, min: usize, even: bool) -> Result<()> {
    if j < min {
        return Err(Error::domain(format!("element count {j} below minimum {min}")));
    }
    if even && j % 2 != 0 {
        return Err(Error::domain(format!("element count {j} must be even")));
    }
    Ok(())
}

/// Romberg levels; each level doubles the trapezoid point count.
const ROMBERG_MAX_LEVEL: usize = 20;
/// Absolute tolerance on the Romberg diagonal, per component.
const ROMBERG_TOL: f64 = 1e-12;

/// Romberg integration of a plane-vector integrand over [a, b].
fn romberg_vec2(f: &mut impl FnMut(f64) -> Result<Vec2>, a: f64, b: f64) -> Result<Vec2> {
    let width = b - a;
    let mut prev = vec![0.5 * width * (f(a)? + f(b)?)];
    for m in 1..ROMBERG_MAX_LEVEL {
        let n = 1usize << m;
        let step = width / n as f64;
        let mut sum = Vec2::ZERO;
        for i in 0..n / 2 {
            sum += f(a + (2 * i + 1) as f64 * step)?;
        }
        let mut row = Vec::with_capacity(m + 1);
        row.push(0.5 * prev[0] + step * sum);
        let mut pow4 = 1.0;
        for i in 1..=m {
            pow4 *= 4.0;
            let extr = row[i - 1] + (row[i - 1] - prev[i - 1]) / (pow4 - 1.0);
            row.push(extr);
        }
        if (row[m] - prev[m - 1]).norm() <= ROMBERG_TOL {
            return Ok(row[m]);
        }
        prev = row;
    }
    Err(Error::numerical(format!(
        "position integral did not reach {ROMBERG_TOL:.0e} within {ROMBERG_MAX_LEVEL} Romberg levels"
    )))
}

/// Wave curve with curvature u(s) = a·cn(s, k) over one half-wave
/// s ∈ [0, 2K(k)], integrated into positions through the tangent angle
/// θ(s) = (a/k)·atan2(k·sn, dn). The first half is accumulated element by
/// element with Romberg integration; the second half is the point reflection
/// of the first through the midpoint (the curvature is odd around s = K).
///
/// Curvature vectors come from the closed form y = u·(−sin θ, cos θ).
pub fn gen_critical(a: f64, k: f64, j_elems: usize) -> Result<DiscreteCurve> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(format!("amplitude {a} must be positive")));
    }
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::domain(format!("modulus {k} outside (0,1)")));
    }
    check_element_count(j_elems, 8, true)?;

    let big_k = complete_k(k)?;
    let s_total = 2.0 * big_k;
    let s_at = |j: usize| j as f64 * s_total / j_elems as f64;
    let theta = |s: f64| -> Result<f64> {
        let t = jacobi(s, k)?;
        Ok(a / k * f64::atan2(k * t.sn, t.dn))
    };
    let mut tangent = |s: f64| -> Result<Vec2> {
        let th = theta(s)?;
        Ok(Vec2::new(th.cos(), th.sin()))
    };

    let half = j_elems / 2;
    let mut x = vec![Vec2::ZERO; j_elems + 1];
    for j in 1..=half {
        let inc = romberg_vec2(&mut tangent, s_at(j - 1), s_at(j))?;
        x[j] = x[j - 1] + inc;
    }
    let centre = x[half];
    for j in half + 1..=j_elems {
        x[j] = 2.0 * centre - x[j_elems - j];
    }

    let mut y = Vec::with_capacity(j_elems + 1);
    for j in 0..=j_elems {
        let s = s_at(j);
        let u = a * jacobi(s, k)?.cn;
        let th = theta(s)?;
        y.push(u * Vec2::new(-th.sin(), th.cos()));
    }
    // θ(0) = 0 and θ(2K) = 0 exactly; clear the sin-roundoff at the ends.
    y[0].x = 0.0;
    y[j_elems].x = 0.0;

    let curve = DiscreteCurve { x, y: Some(y) };
    curve.validate()?;
    Ok(curve)
}

/// Elastica with m half-waves of its curvature cn-profile, scaled so the
/// endpoints sit on the vertical lines x¹ = 0 and x¹ = 2: with b = m(2E−K)
/// the arclength parametrisation is
/// γ(s) = ((2E(am(bs)) − bs)/b, −√2·cn(bs)/b), s ∈ [0, 2mK/b], at modulus
/// 1/√2. Curvature vectors use the closed form γ_ss = b·(−2 sn cn dn, √2 cn³).
pub fn gen_rect_elastica(m: usize, j_elems: usize) -> Result<DiscreteCurve> {
    if m < 1 {
        return Err(Error::domain("half-wave count m must be at least 1"));
    }
    check_element_count(j_elems, 8, false)?;

    let k = FRAC_1_SQRT_2;
    let big_k = complete_k(k)?;
    let big_e = complete_e(k)?;
    let b = m as f64 * (2.0 * big_e - big_k);
    let sq2 = 2.0_f64.sqrt();

    let mut x = Vec::with_capacity(j_elems + 1);
    let mut y = Vec::with_capacity(j_elems + 1);
    for j in 0..=j_elems {
        let u = 2.0 * m as f64 * big_k * j as f64 / j_elems as f64;
        let t = jacobi(u, k)?;
        let e_inc = incomplete_e(t.am, k)?;
        x.push(Vec2::new((2.0 * e_inc - u) / b, -sq2 * t.cn / b));
        y.push(b * Vec2::new(-2.0 * t.sn * t.cn * t.dn, sq2 * t.cn * t.cn * t.cn));
    }
    // sn vanishes at both ends (sn(0) exactly, sn(2mK) up to roundoff).
    y[0].x = 0.0;
    y[j_elems].x = 0.0;

    let curve = DiscreteCurve { x, y: Some(y) };
    curve.validate()?;
    Ok(curve)
}

/// Full elastica wave standing on a single vertical line: the arc between
/// two consecutive zero-curvature points (a quarter period off the arc used
/// by [`gen_rect_elastica`]), rotated a quarter turn. Both endpoints lie on
/// x¹ = 0, two units apart, with horizontal end tangents; the curvature
/// vanishes at the ends but its arclength derivative does not, so the curve
/// is not stationary. Returned without curvature vectors; flows initialise
/// them through the curvature projection.
pub fn gen_upright_elastica(j_elems: usize) -> Result<DiscreteCurve> {
    check_element_count(j_elems, 8, false)?;

    let k = FRAC_1_SQRT_2;
    let big_k = complete_k(k)?;
    let big_e = complete_e(k)?;
    let b = 2.0 * (2.0 * big_e - big_k);

    // Argument shift by K through the quarter-period identities
    // (k′ = k at this modulus):
    //   cn(u+K) = −k·sn/dn,  E(am(u+K)) = E(am u) + E − ½·sn·cn/dn·2,
    // which keeps the endpoint zeros exact at u = 0.
    let mut x = Vec::with_capacity(j_elems + 1);
    for j in 0..=j_elems {
        let u = 4.0 * big_k * j as f64 / j_elems as f64;
        let t = jacobi(u, k)?;
        let e_inc = incomplete_e(t.am, k)?;
        x.push(Vec2::new(
            -t.sn / (b * t.dn),
            (2.0 * e_inc - u - t.sn * t.cn / t.dn) / b,
        ));
    }
    // sn(4K) vanishes up to roundoff; both ends sit on the line exactly.
    x[0].x = 0.0;
    x[j_elems].x = 0.0;

    let curve = DiscreteCurve { x, y: None };
    curve.validate()?;
    Ok(curve)
}

/// Half of a figure-eight lemniscate, endpoints at (0, ±1) on the vertical
/// line x¹ = 0, crossing the origin at ρ = 0. The two branches use
/// sin(∓ρπ/2) for the radial factor, which makes the odd symmetry
/// x(−ρ) = −x(ρ) and the endpoint/centre zeros exact. Returned without
/// curvature vectors.
pub fn gen_lemniscate(j_elems: usize) -> Result<DiscreteCurve> {
    check_element_count(j_elems, 8, true)?;

    let mut x = Vec::with_capacity(j_elems + 1);
    for j in 0..=j_elems {
        let rho = -1.0 + 2.0 * j as f64 / j_elems as f64;
        let p = if rho < 0.0 {
            let amp = (-rho * PI / 2.0).sin().sqrt();
            let ang = (1.0 + rho) * PI / 4.0;
            Vec2::new(-amp * ang.sin(), amp * ang.cos())
        } else {
            let amp = (rho * PI / 2.0).sin().sqrt();
            let ang = (1.0 - rho) * PI / 4.0;
            Vec2::new(amp * ang.sin(), -amp * ang.cos())
        };
        x.push(p);
    }

    let curve = DiscreteCurve { x, y: None };
    curve.validate()?;
    Ok(curve)
}

/// Figure-eight: a rightward unit segment from the origin, a unit circle
/// traversed counterclockwise, another rightward unit segment, and a unit
/// circle traversed clockwise, concatenated C⁰ and sampled proportionally to
/// arclength. Total length 2 + 4π, total turning zero, endpoints on the
/// vertical lines x¹ = 0 and x¹ = 2. Returned without curvature vectors.
pub fn gen_figure_eight(j_elems: usize) -> Result<DiscreteCurve> {
    check_element_count(j_elems, 16, false)?;
    if j_elems % 4 != 0 {
        return Err(Error::domain(format!(
            "element count {j_elems} must be divisible by 4"
        )));
    }

    let total = 2.0 + 4.0 * PI;
    let mut x = Vec::with_capacity(j_elems + 1);
    for j in 0..=j_elems {
        let t = total * j as f64 / j_elems as f64;
        let p = if t <= 1.0 {
            Vec2::new(t, 0.0)
        } else if t <= 1.0 + 2.0 * PI {
            let phi = t - 1.0;
            Vec2::new(1.0 + phi.sin(), 1.0 - phi.cos())
        } else if t <= 2.0 + 2.0 * PI {
            Vec2::new(t - 2.0 * PI, 0.0)
        } else {
            let phi = t - (2.0 + 2.0 * PI);
            Vec2::new(2.0 + phi.sin(), -1.0 + phi.cos())
        };
        x.push(p);
    }

    let curve = DiscreteCurve { x, y: None };
    curve.validate()?;
    Ok(curve)
}

/// Horizontal segment between the lines x¹ = 0 and x¹ = 2, with vanishing
/// curvature vectors. A stationary state of the flow.
pub fn gen_line(j_elems: usize) -> Result<DiscreteCurve> {
    check_element_count(j_elems, 8, false)?;
    let x = (0..=j_elems)
        .map(|j| Vec2::new(2.0 * j as f64 / j_elems as f64, 0.0))
        .collect();
    let y = vec![Vec2::ZERO; j_elems + 1];
    let curve = DiscreteCurve { x, y: Some(y) };
    curve.validate()?;
    Ok(curve)
}

/// Element tangents/lengths and node normals/curvatures of a discrete curve.
#[derive(Debug, Clone)]
pub struct CurveGeometry {
    /// Unit tangent per element.
    pub tangents: Vec<Vec2>,
    /// Length per element, all positive.
    pub lengths: Vec<f64>,
    /// Unit normal per node: the +π/2 rotation of the normalised average of
    /// the adjacent element tangents (one-sided at the ends).
    pub normals: Vec<Vec2>,
    /// Scalar curvature κ_j = y_j·ν_j per node; present when the curve
    /// carries curvature vectors.
    pub kappa: Option<Vec<f64>>,
}

/// Extracts tangents, element lengths, node normals and (when curvature
/// vectors are present) nodal scalar curvatures.
pub fn geometry(curve: &DiscreteCurve) -> Result<CurveGeometry> {
    curve.validate()?;
    let j_elems = curve.element_count();

    let mut tangents = Vec::with_capacity(j_elems);
    let mut lengths = Vec::with_capacity(j_elems);
    for e in 0..j_elems {
        let d = curve.x[e + 1] - curve.x[e];
        let len = d.norm();
        tangents.push(d / len);
        lengths.push(len);
    }

    let mut normals = Vec::with_capacity(j_elems + 1);
    for j in 0..=j_elems {
        let avg = if j == 0 {
            tangents[0]
        } else if j == j_elems {
            tangents[j_elems - 1]
        } else {
            tangents[j - 1] + tangents[j]
        };
        let n = avg.norm();
        if n < 1e-12 {
            return Err(Error::numerical(format!(
                "adjacent tangents antiparallel at node {j}"
            )));
        }
        normals.push((avg / n).perp());
    }

    let kappa = curve
        .y
        .as_ref()
        .map(|y| (0..=j_elems).map(|j| y[j].dot(normals[j])).collect());

    Ok(CurveGeometry {
        tangents,
        lengths,
        normals,
        kappa,
    })
}

/// Shifts the length-weighted barycentre to the origin and rescales to unit
/// length. Curvature vectors, when present, are rescaled consistently.
pub fn normalize(curve: &DiscreteCurve) -> Result<DiscreteCurve> {
    let geom = geometry(curve)?;
    let total: f64 = geom.lengths.iter().sum();
    let mut bary = Vec2::ZERO;
    for (e, len) in geom.lengths.iter().enumerate() {
        bary += *len * 0.5 * (curve.x[e] + curve.x[e + 1]);
    }
    bary = bary / total;

    let x = curve.x.iter().map(|p| (*p - bary) / total).collect();
    let y = curve
        .y
        .as_ref()
        .map(|y| y.iter().map(|v| *v * total).collect());
    Ok(DiscreteCurve { x, y })
}
