//! Run diagnostics: discrete bending energies, the length-evolution
//! integrals, turning number, and a parametrisation-blind distance between
//! polylines.

use crate::curves::{geometry, normalize, DiscreteCurve};
use crate::vec2::Vec2;
use crate::{Error, Result};

/// One recorded state of a flow run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub length: f64,
    pub energy: f64,
    /// `energy * length`; invariant under the parabolic rescaling.
    pub scale_invariant: f64,
    pub int_ks2: f64,
    pub int_k4: f64,
    /// Step size used to advance from this state.
    pub dt: f64,
}

/// Time series of [`TraceRow`]s from a single run.
#[derive(Debug, Clone, Default)]
pub struct EnergyTrace {
    pub rows: Vec<TraceRow>,
}

impl EnergyTrace {
    pub fn new() -> Self {
        EnergyTrace { rows: Vec::new() }
    }

    pub fn push(&mut self, row: TraceRow) {
        self.rows.push(row);
    }

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    /// Column consistency: times strictly increasing, positive finite
    /// lengths, and `scale_invariant = energy * length` to 1e-13 relative.
    pub fn validate(&self) -> Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            let vals = [
                row.t,
                row.length,
                row.energy,
                row.scale_invariant,
                row.int_ks2,
                row.int_k4,
                row.dt,
            ];
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(Error::numerical(format!("non-finite trace row {i}")));
            }
            if row.length <= 0.0 {
                return Err(Error::numerical(format!(
                    "non-positive length in trace row {i}"
                )));
            }
            let prod = row.energy * row.length;
            if (row.scale_invariant - prod).abs()
                > 1e-13 * row.scale_invariant.abs().max(1.0)
            {
                return Err(Error::numerical(format!(
                    "scale_invariant deviates from energy*length in trace row {i}"
                )));
            }
            if i > 0 && row.t <= self.rows[i - 1].t {
                return Err(Error::numerical(format!(
                    "times not strictly increasing at trace row {i}"
                )));
            }
        }
        Ok(())
    }
}

/// Energy and length of one curve state.
#[derive(Debug, Clone, Copy)]
pub struct EnergySample {
    pub energy: f64,
    /// `energy * length`.
    pub scale_invariant: f64,
    pub length: f64,
}

/// Bending energy of the curvature field projected onto the normal space of
/// each element, with the tangential component discarded elementwise.
///
/// The integrand is piecewise quadratic (the tangent is an element
/// constant, the curvature field linear), so 2-point Gauss per element is
/// exact.
pub fn discrete_energy(curve: &DiscreteCurve) -> Result<EnergySample> {
    curve.validate()?;
    let y = curve
        .y
        .as_ref()
        .ok_or_else(|| Error::domain("discrete_energy: curvature field required"))?;
    let j_elems = curve.element_count();
    let h = curve.h();

    let g = 0.5 / 3.0_f64.sqrt();
    let gauss = [(0.5 - g, 0.5), (0.5 + g, 0.5)];

    let mut length = 0.0;
    let mut energy = 0.0;
    for e in 0..j_elems {
        let dx = (curve.x[e + 1] - curve.x[e]) / h;
        let sw = dx.norm();
        length += h * sw;
        for (xi, wg) in gauss {
            let yg = (1.0 - xi) * y[e] + xi * y[e + 1];
            let dot = yg.dot(dx) / sw;
            let py2 = (yg.norm_sq() - dot * dot).max(0.0);
            energy += 0.5 * h * wg * py2 * sw;
        }
    }
    Ok(EnergySample {
        energy,
        scale_invariant: energy * length,
        length,
    })
}

/// The two integrals steering the discrete length evolution, plus the
/// sufficient decrease test `int_k4 <= 2*int_ks2`.
#[derive(Debug, Clone, Copy)]
pub struct MonotonicityReport {
    /// First-difference approximation of the squared curvature gradient.
    pub int_ks2: f64,
    /// Trapezoid approximation of the fourth curvature moment.
    pub int_k4: f64,
    pub lhs_ok: bool,
}

/// Curvature integrals over arclength from nodal scalar curvatures.
///
/// `int_ks2` uses forward differences of nodal curvature over per-element
/// arclength; only sign and threshold decisions should consume it.
pub fn monotonicity_report(curve: &DiscreteCurve) -> Result<MonotonicityReport> {
    let geom = geometry(curve)?;
    let kappa = geom
        .kappa
        .ok_or_else(|| Error::domain("monotonicity_report: curvature field required"))?;

    let mut int_ks2 = 0.0;
    let mut int_k4 = 0.0;
    for (e, len) in geom.lengths.iter().enumerate() {
        let (kl, kr) = (kappa[e], kappa[e + 1]);
        int_ks2 += (kr - kl) * (kr - kl) / len;
        int_k4 += 0.5 * len * (kl.powi(4) + kr.powi(4));
    }
    Ok(MonotonicityReport {
        int_ks2,
        int_k4,
        lhs_ok: int_k4 <= 2.0 * int_ks2,
    })
}

/// Sum of signed exterior angles between consecutive element chords,
/// divided by 2π. Angles are wrapped to [-π, π).
pub fn turning_number(curve: &DiscreteCurve) -> Result<f64> {
    let geom = geometry_x_only(curve)?;
    let angles: Vec<f64> = geom.iter().map(|t| t.y.atan2(t.x)).collect();
    let tau = std::f64::consts::TAU;
    let mut total = 0.0;
    for w in angles.windows(2) {
        let d = (w[1] - w[0] + std::f64::consts::PI).rem_euclid(tau) - std::f64::consts::PI;
        total += d;
    }
    Ok(total / tau)
}

// Chord directions without requiring a curvature field or well-defined node
// normals (cusps are legal input here).
fn geometry_x_only(curve: &DiscreteCurve) -> Result<Vec<Vec2>> {
    curve.validate()?;
    Ok(curve
        .x
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            d / d.norm()
        })
        .collect())
}

/// Symmetric Hausdorff distance between the two polylines after both are
/// normalised, minimised over axis reflections and a vertical shift.
///
/// The shift search is a golden-section scan on [-1, 1] (40 iterations)
/// with the unshifted position kept as a candidate, so identical shapes
/// report a distance at roundoff level.
pub fn shape_distance(a: &DiscreteCurve, b: &DiscreteCurve) -> Result<f64> {
    let pa = normalize(a)?.x;
    let qb = normalize(b)?.x;

    let mut best = f64::INFINITY;
    for (sx, sy) in [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
        let q: Vec<Vec2> = qb.iter().map(|p| Vec2::new(sx * p.x, sy * p.y)).collect();
        let f = |delta: f64| hausdorff_shifted(&pa, &q, delta);

        best = best.min(f(0.0));

        let gr = (5.0_f64.sqrt() - 1.0) / 2.0;
        let (mut lo, mut hi) = (-1.0, 1.0);
        let mut c = hi - gr * (hi - lo);
        let mut d = lo + gr * (hi - lo);
        let (mut fc, mut fd) = (f(c), f(d));
        for _ in 0..40 {
            if fc < fd {
                hi = d;
                d = c;
                fd = fc;
                c = hi - gr * (hi - lo);
                fc = f(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + gr * (hi - lo);
                fd = f(d);
            }
        }
        best = best.min(fc.min(fd));
    }
    Ok(best)
}

// Symmetric Hausdorff distance between polyline p and polyline q shifted
// vertically by delta.
fn hausdorff_shifted(p: &[Vec2], q: &[Vec2], delta: f64) -> f64 {
    let qs: Vec<Vec2> = q.iter().map(|v| Vec2::new(v.x, v.y + delta)).collect();
    one_sided(p, &qs).max(one_sided(&qs, p))
}

// max over nodes of `from` of the distance to the polyline `to`.
fn one_sided(from: &[Vec2], to: &[Vec2]) -> f64 {
    let mut worst = 0.0_f64;
    for pt in from {
        let mut nearest = f64::INFINITY;
        for seg in to.windows(2) {
            let d = seg[1] - seg[0];
            let den = d.norm_sq();
            let t = if den > 0.0 {
                ((*pt - seg[0]).dot(d) / den).clamp(0.0, 1.0)
            } else {
                0.0
            };
            nearest = nearest.min((*pt - (seg[0] + t * d)).norm());
        }
        worst = worst.max(nearest);
    }
    worst
}
