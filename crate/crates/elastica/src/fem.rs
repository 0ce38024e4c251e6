//! Semi-implicit finite-element scheme for the flow: one banded linear
//! solve per time step determines the next positions and curvature field
//! together, followed by the time loop, fate classification of a run, and
//! bisection for the critical amplitude.
//!
//! Unknowns are interleaved nodewise as (x¹, x², y¹, y²), so every
//! coupling stays within a half-bandwidth of 7. First components of x and
//! y are pinned at both boundary nodes (the support lines are vertical);
//! the pinned columns are moved to the right-hand side before elimination.

use crate::curves::{gen_critical, DiscreteCurve};
use crate::diagnostics::{discrete_energy, monotonicity_report, EnergyTrace, TraceRow};
use crate::vec2::Vec2;
use crate::{Error, Result};

/// Square banded matrix with column-major band storage plus a right-hand
/// side, solved by LU with partial pivoting.
///
/// Entry (i, j) lives at `band[j*(kl+ku+1) + ku + i - j]` for
/// `j-ku <= i <= j+kl`. The assembled band is kept pristine through
/// `solve` so the residual bound can be enforced on every solve.
#[derive(Debug, Clone)]
pub struct BandedSystem {
    pub n: usize,
    pub kl: usize,
    pub ku: usize,
    pub band: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl BandedSystem {
    pub fn new(n: usize, kl: usize, ku: usize) -> Self {
        BandedSystem {
            n,
            kl,
            ku,
            band: vec![0.0; n * (kl + ku + 1)],
            rhs: vec![0.0; n],
        }
    }

    fn idx(&self, i: usize, j: usize) -> Option<usize> {
        let off = self.ku as isize + i as isize - j as isize;
        if i < self.n && j < self.n && off >= 0 && off <= (self.kl + self.ku) as isize {
            Some(j * (self.kl + self.ku + 1) + off as usize)
        } else {
            None
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.idx(i, j).map_or(0.0, |k| self.band[k])
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .idx(i, j)
            .unwrap_or_else(|| panic!("entry ({i},{j}) outside band"));
        self.band[k] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .idx(i, j)
            .unwrap_or_else(|| panic!("entry ({i},{j}) outside band"));
        self.band[k] += v;
    }

    /// Maximum row sum of absolute values.
    pub fn norm_inf(&self) -> f64 {
        let mut rowsum = vec![0.0; self.n];
        for j in 0..self.n {
            let lo = j.saturating_sub(self.ku);
            let hi = (j + self.kl).min(self.n - 1);
            for i in lo..=hi {
                rowsum[i] += self.get(i, j).abs();
            }
        }
        rowsum.into_iter().fold(0.0, f64::max)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut r = vec![0.0; self.n];
        for j in 0..self.n {
            let lo = j.saturating_sub(self.ku);
            let hi = (j + self.kl).min(self.n - 1);
            for i in lo..=hi {
                r[i] += self.get(i, j) * x[j];
            }
        }
        r
    }

    pub fn residual_inf(&self, sol: &[f64]) -> f64 {
        self.matvec(sol)
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Factors a copy of the band (partial pivoting, fill width kl+ku) and
    /// back-substitutes, then verifies
    /// `‖A·sol − rhs‖∞ ≤ 1e-10·(‖A‖∞·‖sol‖∞ + ‖rhs‖∞)`
    /// against the pristine band.
    pub fn solve(&self) -> Result<Vec<f64>> {
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        let ldf = 2 * kl + ku + 1;
        // Factor storage: entry (i, j) at fac[j*ldf + kl + ku + i - j],
        // rows j-kl-ku .. j+kl (the top kl rows take pivoting fill).
        let mut fac = vec![0.0; n * ldf];
        let fidx = |i: usize, j: usize| -> usize { j * ldf + kl + ku + i - j };
        for j in 0..n {
            let lo = j.saturating_sub(ku);
            let hi = (j + kl).min(n - 1);
            for i in lo..=hi {
                fac[fidx(i, j)] = self.get(i, j);
            }
        }

        let mut piv = vec![0usize; n];
        for j in 0..n {
            let hi = (j + kl).min(n - 1);
            let mut p = j;
            let mut pmax = fac[fidx(j, j)].abs();
            for i in j + 1..=hi {
                let v = fac[fidx(i, j)].abs();
                if v > pmax {
                    pmax = v;
                    p = i;
                }
            }
            if pmax == 0.0 {
                return Err(Error::numerical(format!("singular system at column {j}")));
            }
            piv[j] = p;
            let chi = (j + kl + ku).min(n - 1);
            if p != j {
                for c in j..=chi {
                    fac.swap(fidx(j, c), fidx(p, c));
                }
            }
            let pivot = fac[fidx(j, j)];
            for i in j + 1..=hi {
                let l = fac[fidx(i, j)] / pivot;
                fac[fidx(i, j)] = l;
                if l != 0.0 {
                    for c in j + 1..=chi {
                        fac[fidx(i, c)] -= l * fac[fidx(j, c)];
                    }
                }
            }
        }

        let mut x = self.rhs.clone();
        for j in 0..n {
            x.swap(j, piv[j]);
            let hi = (j + kl).min(n - 1);
            for i in j + 1..=hi {
                x[i] -= fac[fidx(i, j)] * x[j];
            }
        }
        for j in (0..n).rev() {
            x[j] /= fac[fidx(j, j)];
            let lo = j.saturating_sub(kl + ku);
            for i in lo..j {
                x[i] -= fac[fidx(i, j)] * x[j];
            }
        }

        let xmax = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let bmax = self.rhs.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let bound = 1e-10 * (self.norm_inf() * xmax + bmax);
        let res = self.residual_inf(&x);
        if !res.is_finite() || res > bound {
            return Err(Error::numerical(format!(
                "solve residual {res:e} exceeds bound {bound:e}"
            )));
        }
        Ok(x)
    }
}

/// Parameters of one flow run.
#[derive(Debug, Clone)]
pub struct FlowConfig {
    pub j: usize,
    pub dt0: f64,
    pub t_end: f64,
    pub adaptive: bool,
    /// Max per-step growth ratio of the adaptive step size.
    pub dt_growth_cap: f64,
    pub snapshot_times: Vec<f64>,
    /// Trace rows are recorded every `record_stride` steps (the initial and
    /// final states always are).
    pub record_stride: usize,
}

impl FlowConfig {
    pub fn new(j: usize, dt0: f64, t_end: f64) -> Self {
        FlowConfig {
            j,
            dt0,
            t_end,
            adaptive: false,
            dt_growth_cap: 1.05,
            snapshot_times: Vec::new(),
            record_stride: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.j < 8 {
            return Err(Error::domain("flow requires at least 8 elements"));
        }
        if !(self.dt0 > 0.0) || !self.dt0.is_finite() {
            return Err(Error::domain("dt0 must be positive"));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::domain("t_end must be positive"));
        }
        if !(self.dt_growth_cap >= 1.0) {
            return Err(Error::domain("dt_growth_cap must be at least 1"));
        }
        if self.record_stride == 0 {
            return Err(Error::domain("record_stride must be positive"));
        }
        if self.snapshot_times.iter().any(|t| !t.is_finite()) {
            return Err(Error::domain("snapshot times must be finite"));
        }
        Ok(())
    }
}

/// State of a flow run after `m` steps.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub t: f64,
    pub m: usize,
    pub curve: DiscreteCurve,
}

/// Curve captured at the step nearest a requested time.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub requested_t: f64,
    pub t: f64,
    pub curve: DiscreteCurve,
}

/// Everything a finished run produces.
#[derive(Debug, Clone)]
pub struct FlowOutcome {
    pub trace: EnergyTrace,
    pub snapshots: Vec<Snapshot>,
    pub final_state: FlowState,
}

const DEGENERATE_RATIO: f64 = 1e-12;

fn check_elements(curve: &DiscreteCurve) -> Result<()> {
    let geom_lengths: Vec<f64> = curve
        .x
        .windows(2)
        .map(|w| (w[1] - w[0]).norm())
        .collect();
    let mean = geom_lengths.iter().sum::<f64>() / geom_lengths.len() as f64;
    let min = geom_lengths.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < DEGENERATE_RATIO * mean {
        return Err(Error::numerical(format!(
            "degenerate element: min length {min:e} vs mean {mean:e}"
        )));
    }
    Ok(())
}

#[inline]
fn comp(v: Vec2, a: usize) -> f64 {
    if a == 0 {
        v.x
    } else {
        v.y
    }
}

/// Computes the curvature field of a bare polyline: the unique field with
/// vanishing first components at the boundary nodes that is weakly equal to
/// the second parameter derivative of the positions. Any curvature field
/// already present is ignored.
///
/// The two components decouple into tridiagonal weighted-mass systems;
/// the first component gets pinned ends, the second is free.
pub fn solve_y0(curve: &DiscreteCurve) -> Result<DiscreteCurve> {
    curve.validate()?;
    check_elements(curve)?;
    let j_elems = curve.element_count();
    let h = curve.h();
    let n = j_elems + 1;

    let mut y = vec![Vec2::ZERO; n];
    for comp_i in 0..2 {
        let mut sys = BandedSystem::new(n, 1, 1);
        for e in 0..j_elems {
            let a = (curve.x[e + 1] - curve.x[e]) / h;
            let w = a.norm_sq();
            sys.add(e, e, w * h / 3.0);
            sys.add(e + 1, e + 1, w * h / 3.0);
            sys.add(e, e + 1, w * h / 6.0);
            sys.add(e + 1, e, w * h / 6.0);
            let load = comp(a, comp_i);
            sys.rhs[e] += load;
            sys.rhs[e + 1] -= load;
        }
        if comp_i == 0 {
            for node in [0, n - 1] {
                let lo = node.saturating_sub(1);
                let hi = (node + 1).min(n - 1);
                for k in lo..=hi {
                    sys.set(node, k, 0.0);
                    sys.set(k, node, 0.0);
                }
                sys.set(node, node, 1.0);
                sys.rhs[node] = 0.0;
            }
        }
        let sol = sys.solve()?;
        let xmax = sol.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let bmax = sys.rhs.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let res = sys.residual_inf(&sol);
        if res > 1e-12 * (sys.norm_inf() * xmax + bmax) {
            return Err(Error::numerical(format!(
                "curvature projection residual {res:e} too large"
            )));
        }
        for (node, v) in sol.into_iter().enumerate() {
            if comp_i == 0 {
                y[node].x = v;
            } else {
                y[node].y = v;
            }
        }
    }
    y[0].x = 0.0;
    y[n - 1].x = 0.0;

    let out = DiscreteCurve {
        x: curve.x.clone(),
        y: Some(y),
    };
    out.validate()?;
    Ok(out)
}

/// Assembles the coupled linear system for one step of size `dt` from the
/// given state.
///
/// Row layout matches the unknown layout: position equations occupy the
/// x-rows, curvature-field equations the y-rows. All element integrals use
/// 3-point Gauss (exact: the integrands are polynomials of degree at most
/// four once the element-constant factors are pulled out).
pub fn assemble_step(state: &FlowState, dt: f64) -> Result<BandedSystem> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::domain("dt must be positive"));
    }
    state.curve.validate()?;
    check_elements(&state.curve)?;
    let y = state
        .curve
        .y
        .as_ref()
        .ok_or_else(|| Error::domain("step requires the curvature field"))?;
    let x = &state.curve.x;
    let j_elems = state.curve.element_count();
    let h = state.curve.h();

    let n = 4 * (j_elems + 1);
    let mut sys = BandedSystem::new(n, 7, 7);

    let s15 = 15.0_f64.sqrt() / 10.0;
    let gpts = [0.5 - s15, 0.5, 0.5 + s15];
    let gwts = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];
    let sgn = [-1.0, 1.0];

    let xdof = |node: usize, a: usize| 4 * node + a;
    let ydof = |node: usize, a: usize| 4 * node + 2 + a;

    for e in 0..j_elems {
        let a = (x[e + 1] - x[e]) / h;
        let w = a.norm_sq();
        let c = (y[e + 1] - y[e]) / h;
        let yloc = [y[e], y[e + 1]];
        let xloc = [x[e], x[e + 1]];

        let mut mm = [[0.0; 2]; 2];
        let mut phis = [[0.0; 2]; 3];
        let mut ygs = [Vec2::ZERO; 3];
        for g in 0..3 {
            phis[g] = [1.0 - gpts[g], gpts[g]];
            ygs[g] = phis[g][0] * yloc[0] + phis[g][1] * yloc[1];
            for i in 0..2 {
                for jl in 0..2 {
                    mm[i][jl] += h * gwts[g] * phis[g][i] * phis[g][jl];
                }
            }
        }

        for i in 0..2 {
            let node_i = e + i;
            for alpha in 0..2 {
                let row = xdof(node_i, alpha);

                // Time-derivative mass on the left, its known part on the
                // right; parameter-derivative coupling to the curvature field.
                let mut rhs = 0.0;
                for jl in 0..2 {
                    let node_j = e + jl;
                    sys.add(row, xdof(node_j, alpha), w / dt * mm[i][jl]);
                    rhs += w / dt * mm[i][jl] * comp(xloc[jl], alpha);
                    sys.add(row, ydof(node_j, alpha), -sgn[i] * sgn[jl] / h);
                }

                for g in 0..3 {
                    let wphi = gwts[g] * phis[g][i];
                    let yg = ygs[g];
                    let ady = a.dot(yg);
                    // Implicit couplings, moved left with sign flipped:
                    // 2(y'_rho·x_rho)(y·chi), w(y·y')(y·chi), F2·y'·chi.
                    for jl in 0..2 {
                        let node_j = e + jl;
                        for beta in 0..2 {
                            let col = ydof(node_j, beta);
                            let t3 = -2.0 * wphi * comp(yg, alpha) * sgn[jl] * comp(a, beta);
                            let t4 = -w * h * wphi * phis[g][jl] * comp(yg, alpha) * comp(yg, beta);
                            let f2 = 2.0 * (comp(c, alpha) * comp(a, beta)
                                - comp(a, alpha) * comp(c, beta))
                                + 2.0 * ady
                                    * (comp(a, alpha) * comp(yg, beta)
                                        - comp(yg, alpha) * comp(a, beta));
                            let t5 = -h * wphi * phis[g][jl] * f2;
                            sys.add(row, col, t3 + t4 + t5);
                        }
                    }
                    let f3 = -0.5 * (w * yg.norm_sq() - ady * ady);
                    rhs += h * wphi * f3 * comp(yg, alpha);
                }
                sys.rhs[row] += rhs;
            }
        }

        // Curvature-field equations: weighted mass against the new field
        // plus the parameter-derivative coupling to the new positions.
        for i in 0..2 {
            let node_i = e + i;
            for alpha in 0..2 {
                let row = ydof(node_i, alpha);
                for jl in 0..2 {
                    let node_j = e + jl;
                    sys.add(row, ydof(node_j, alpha), w * mm[i][jl]);
                    sys.add(row, xdof(node_j, alpha), sgn[i] * sgn[jl] / h);
                }
            }
        }
    }

    // Pinned unknowns: first components of x and y at both boundary nodes.
    // Move known values to the rhs, then blank each pinned row and column.
    let cons = [
        (xdof(0, 0), x[0].x),
        (ydof(0, 0), 0.0),
        (xdof(j_elems, 0), x[j_elems].x),
        (ydof(j_elems, 0), 0.0),
    ];
    for &(cd, val) in &cons {
        if val != 0.0 {
            let lo = cd.saturating_sub(7);
            let hi = (cd + 7).min(n - 1);
            for i in lo..=hi {
                sys.rhs[i] -= sys.get(i, cd) * val;
            }
        }
    }
    for &(cd, val) in &cons {
        let lo = cd.saturating_sub(7);
        let hi = (cd + 7).min(n - 1);
        for k in lo..=hi {
            sys.set(cd, k, 0.0);
            sys.set(k, cd, 0.0);
        }
        sys.set(cd, cd, 1.0);
        sys.rhs[cd] = val;
    }
    Ok(sys)
}

/// One step of size `dt`: assemble, solve, write back.
///
/// Pinned values are re-imposed exactly on the result, and the stepped
/// curve must still satisfy the element nondegeneracy bound.
pub fn step(state: &FlowState, dt: f64) -> Result<FlowState> {
    let sys = assemble_step(state, dt)?;
    let sol = sys.solve()?;
    let j_elems = state.curve.element_count();

    let mut x = Vec::with_capacity(j_elems + 1);
    let mut y = Vec::with_capacity(j_elems + 1);
    for node in 0..=j_elems {
        x.push(Vec2::new(sol[4 * node], sol[4 * node + 1]));
        y.push(Vec2::new(sol[4 * node + 2], sol[4 * node + 3]));
    }
    x[0].x = state.curve.x[0].x;
    x[j_elems].x = state.curve.x[j_elems].x;
    y[0].x = 0.0;
    y[j_elems].x = 0.0;

    let curve = DiscreteCurve { x, y: Some(y) };
    curve.validate()?;
    check_elements(&curve)?;
    Ok(FlowState {
        t: state.t + dt,
        m: state.m + 1,
        curve,
    })
}

fn polyline_length(curve: &DiscreteCurve) -> f64 {
    curve.x.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

fn trace_row(state: &FlowState, dt: f64) -> Result<TraceRow> {
    let sample = discrete_energy(&state.curve)?;
    let mono = monotonicity_report(&state.curve)?;
    Ok(TraceRow {
        t: state.t,
        length: sample.length,
        energy: sample.energy,
        scale_invariant: sample.scale_invariant,
        int_ks2: mono.int_ks2,
        int_k4: mono.int_k4,
        dt,
    })
}

/// Runs the flow to `t_end`.
///
/// A missing curvature field is computed by [`solve_y0`] first. When
/// `adaptive` is set, each step uses
/// `dt_m = min(dt0·(L_m/L_0)⁴, dt_growth_cap·dt_{m-1})`, the exact
/// fourth-power rescaling of the flow applied to the current length.
/// Snapshots capture the nearest stepped state to each requested time.
pub fn run_flow(config: &FlowConfig, initial: &DiscreteCurve) -> Result<FlowOutcome> {
    config.validate()?;
    if initial.element_count() != config.j {
        return Err(Error::domain(format!(
            "config expects {} elements, curve has {}",
            config.j,
            initial.element_count()
        )));
    }

    let start = if initial.y.is_some() {
        initial.clone()
    } else {
        solve_y0(initial)?
    };
    let mut state = FlowState {
        t: 0.0,
        m: 0,
        curve: start,
    };

    let mut pending: Vec<f64> = config.snapshot_times.clone();
    pending.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut snapshots = Vec::new();
    while let Some(&t_req) = pending.first() {
        if t_req <= 0.0 {
            pending.remove(0);
            snapshots.push(Snapshot {
                requested_t: t_req,
                t: state.t,
                curve: state.curve.clone(),
            });
        } else {
            break;
        }
    }

    let l0 = polyline_length(&state.curve);
    let mut trace = EnergyTrace::new();
    let mut dt_prev: Option<f64> = None;
    let mut last_recorded_t = f64::NEG_INFINITY;

    let t_tol = 1e-12 * config.t_end.max(1.0);
    while state.t < config.t_end - t_tol {
        let mut dt = if config.adaptive {
            let ratio = polyline_length(&state.curve) / l0;
            config.dt0 * ratio.powi(4)
        } else {
            config.dt0
        };
        if let Some(prev) = dt_prev {
            dt = dt.min(config.dt_growth_cap * prev);
        }

        if state.m % config.record_stride == 0 {
            trace.push(trace_row(&state, dt)?);
            last_recorded_t = state.t;
        }

        let crossing = pending
            .first()
            .map(|&t_req| t_req <= state.t + dt + t_tol)
            .unwrap_or(false);
        let before = if crossing { Some(state.clone()) } else { None };

        state = step(&state, dt).map_err(|e| {
            Error::numerical(format!("step {} at t={:.6e}: {e}", state.m, state.t))
        })?;
        dt_prev = Some(dt);

        while let Some(&t_req) = pending.first() {
            if t_req > state.t + t_tol {
                break;
            }
            pending.remove(0);
            let pick_before = before
                .as_ref()
                .map(|b| (t_req - b.t).abs() < (t_req - state.t).abs())
                .unwrap_or(false);
            let chosen = if pick_before {
                before.as_ref().unwrap()
            } else {
                &state
            };
            snapshots.push(Snapshot {
                requested_t: t_req,
                t: chosen.t,
                curve: chosen.curve.clone(),
            });
        }
    }

    if state.t > last_recorded_t {
        trace.push(trace_row(&state, dt_prev.unwrap_or(config.dt0))?);
    }
    for t_req in pending {
        snapshots.push(Snapshot {
            requested_t: t_req,
            t: state.t,
            curve: state.curve.clone(),
        });
    }
    trace.validate()?;
    Ok(FlowOutcome {
        trace,
        snapshots,
        final_state: state,
    })
}

/// Outcome of a run as far as the critical-amplitude search is concerned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fate {
    Line,
    Grows,
    Undecided,
}

/// Classifies a finished trace.
///
/// `Line` when the scale-invariant energy ever falls below 0.05·2π;
/// `Grows` when it ends above 1.02·2π with the last tenth of the samples
/// rising; `Undecided` otherwise.
pub fn classify_fate(trace: &EnergyTrace) -> Result<Fate> {
    if trace.rows.is_empty() {
        return Err(Error::domain("classify_fate: empty trace"));
    }
    let tau = std::f64::consts::TAU;
    if trace.rows.iter().any(|r| r.scale_invariant / tau < 0.05) {
        return Ok(Fate::Line);
    }
    let n = trace.rows.len();
    if n >= 2 {
        let count = (n / 10).max(2).min(n);
        let window = &trace.rows[n - count..];
        let rising = window
            .windows(2)
            .all(|w| w[1].scale_invariant >= w[0].scale_invariant)
            && window[count - 1].scale_invariant > window[0].scale_invariant;
        if rising && trace.rows[n - 1].scale_invariant / tau > 1.02 {
            return Ok(Fate::Grows);
        }
    }
    Ok(Fate::Undecided)
}

/// One amplitude probe of the bisection.
#[derive(Debug, Clone, Copy)]
pub struct ProbeRecord {
    pub amplitude: f64,
    pub fate: Fate,
}

/// Bracket plus the probes that produced it, in execution order.
#[derive(Debug, Clone)]
pub struct BisectReport {
    pub lower: f64,
    pub upper: f64,
    pub probes: Vec<ProbeRecord>,
}

/// Bisects the wave amplitude between a vanishing and a growing run.
///
/// Probes start from the near-critical wave curve (modulus 0.71) at the
/// given element count, run with fixed step `dt0` to `t_max`, and are
/// classified by [`classify_fate`]. An undecided probe is retried once
/// with a four times longer horizon. Probe amplitudes are rounded to the
/// requested resolution grid so the reported bracket endpoints are short
/// decimals.
pub fn bisect_critical_amplitude(
    j: usize,
    dt0: f64,
    a_lo: f64,
    a_hi: f64,
    resolution: f64,
    t_max: f64,
) -> Result<(f64, f64)> {
    bisect_critical_amplitude_report(j, dt0, a_lo, a_hi, resolution, t_max)
        .map(|r| (r.lower, r.upper))
}

/// [`bisect_critical_amplitude`] with the probe history kept.
pub fn bisect_critical_amplitude_report(
    j: usize,
    dt0: f64,
    a_lo: f64,
    a_hi: f64,
    resolution: f64,
    t_max: f64,
) -> Result<BisectReport> {
    if !(a_lo > 0.0 && a_hi > a_lo) {
        return Err(Error::domain("bracket must satisfy 0 < a_lo < a_hi"));
    }
    if !(resolution > 0.0) || !resolution.is_finite() {
        return Err(Error::domain("resolution must be positive"));
    }
    let mut probes = Vec::new();
    if resolution >= a_hi - a_lo {
        return Ok(BisectReport {
            lower: a_lo,
            upper: a_hi,
            probes,
        });
    }

    let probe = |a: f64| -> Result<Fate> {
        let mut horizon = t_max;
        for attempt in 0..2 {
            let curve = gen_critical(a, 0.71, j)?;
            let config = FlowConfig::new(j, dt0, horizon);
            let outcome = run_flow(&config, &curve)?;
            let fate = classify_fate(&outcome.trace)?;
            if fate != Fate::Undecided || attempt == 1 {
                return Ok(fate);
            }
            horizon *= 4.0;
        }
        unreachable!()
    };
    let record = |a: f64, probes: &mut Vec<ProbeRecord>| -> Result<Fate> {
        let fate = probe(a)?;
        probes.push(ProbeRecord { amplitude: a, fate });
        Ok(fate)
    };

    let fate_lo = record(a_lo, &mut probes)?;
    let fate_hi = record(a_hi, &mut probes)?;
    if fate_lo != Fate::Line || fate_hi != Fate::Grows {
        return Err(Error::domain(format!(
            "inconsistent bracket: a_lo={a_lo} -> {fate_lo:?}, a_hi={a_hi} -> {fate_hi:?}"
        )));
    }

    let (mut lo, mut hi) = (a_lo, a_hi);
    for _ in 0..200 {
        if hi - lo <= resolution {
            return Ok(BisectReport {
                lower: lo,
                upper: hi,
                probes,
            });
        }
        let mid = 0.5 * (lo + hi);
        let mut a = (mid / resolution).round() * resolution;
        if !(a > lo && a < hi) {
            a = mid;
        }
        match record(a, &mut probes)? {
            Fate::Line => lo = a,
            Fate::Grows => hi = a,
            Fate::Undecided => {
                return Err(Error::numerical(format!(
                    "probe at amplitude {a} still undecided after extended horizon"
                )))
            }
        }
    }
    Err(Error::numerical(
        "bisection failed to reach the requested resolution",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{gen_line, gen_rect_elastica, geometry};

    fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut m: Vec<Vec<f64>> = a.to_vec();
        let mut x = b.to_vec();
        for c in 0..n {
            let p = (c..n).max_by(|&i, &k| m[i][c].abs().total_cmp(&m[k][c].abs())).unwrap();
            m.swap(c, p);
            x.swap(c, p);
            for r in c + 1..n {
                let l = m[r][c] / m[c][c];
                for k in c..n {
                    m[r][k] -= l * m[c][k];
                }
                x[r] -= l * x[c];
            }
        }
        for c in (0..n).rev() {
            x[c] /= m[c][c];
            for r in 0..c {
                x[r] -= m[r][c] * x[c];
            }
        }
        x
    }

    #[test]
    fn banded_solver_matches_dense() {
        let n = 14;
        let (kl, ku) = (3, 2);
        let mut sys = BandedSystem::new(n, kl, ku);
        let mut dense = vec![vec![0.0; n]; n];
        let mut seed = 0x2545f4914f6cdd1d_u64;
        let mut rng = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                let v = rng() + if i == j { 4.0 } else { 0.0 };
                sys.set(i, j, v);
                dense[i][j] = v;
            }
        }
        for i in 0..n {
            sys.rhs[i] = rng();
        }
        let sol = sys.solve().unwrap();
        let want = dense_solve(&dense, &sys.rhs);
        for (a, b) in sol.iter().zip(&want) {
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn banded_solver_rejects_singular() {
        let mut sys = BandedSystem::new(4, 1, 1);
        sys.set(0, 0, 1.0);
        sys.set(1, 1, 1.0);
        sys.set(3, 3, 1.0);
        assert!(sys.solve().is_err());
    }

    #[test]
    fn straight_line_is_a_fixed_point() {
        let c = gen_line(16).unwrap();
        let state = FlowState { t: 0.0, m: 0, curve: c };
        let next = step(&state, 1e-3).unwrap();
        for (p, q) in next.curve.x.iter().zip(&state.curve.x) {
            assert!((*p - *q).norm() <= 1e-13);
        }
        for v in next.curve.y.as_ref().unwrap() {
            assert!(v.norm() <= 1e-13);
        }
    }

    #[test]
    fn vertical_translation_equivariance() {
        // Positions shift exactly; the curvature field re-extracts second
        // differences of the solved positions, which amplifies roundoff in
        // the inputs by 1/h^2, so it gets the coarser field tolerance.
        let c = solve_y0(&gen_critical(1.3, 0.71, 64).unwrap()).unwrap();
        let shifted = DiscreteCurve {
            x: c.x.iter().map(|p| *p + Vec2::new(0.0, 2.5)).collect(),
            y: c.y.clone(),
        };
        let s1 = step(&FlowState { t: 0.0, m: 0, curve: c }, 1e-4).unwrap();
        let s2 = step(&FlowState { t: 0.0, m: 0, curve: shifted }, 1e-4).unwrap();
        for (p, q) in s1.curve.x.iter().zip(&s2.curve.x) {
            assert!((*p + Vec2::new(0.0, 2.5) - *q).norm() <= 1e-13);
        }
        for (p, q) in s1
            .curve
            .y
            .as_ref()
            .unwrap()
            .iter()
            .zip(s2.curve.y.as_ref().unwrap())
        {
            assert!((*p - *q).norm() <= 1e-11);
        }
    }

    #[test]
    fn scale_equivariance_one_step() {
        let c = solve_y0(&gen_critical(1.3, 0.71, 64).unwrap()).unwrap();
        let lam = 2.0;
        let scaled = DiscreteCurve {
            x: c.x.iter().map(|p| *p / lam).collect(),
            y: c.y.as_ref().map(|y| y.iter().map(|v| lam * *v).collect()),
        };
        let dt = 1e-4;
        let s1 = step(&FlowState { t: 0.0, m: 0, curve: c }, dt).unwrap();
        let s2 = step(
            &FlowState { t: 0.0, m: 0, curve: scaled },
            dt / lam.powi(4),
        )
        .unwrap();
        for (p, q) in s1.curve.x.iter().zip(&s2.curve.x) {
            assert!((*p / lam - *q).norm() <= 1e-12, "{:?} vs {:?}", p, q);
        }
        for (p, q) in s1
            .curve
            .y
            .as_ref()
            .unwrap()
            .iter()
            .zip(s2.curve.y.as_ref().unwrap())
        {
            assert!((lam * *p - *q).norm() <= 1e-12 * lam);
        }
    }

    #[test]
    fn curvature_projection_matches_closed_form() {
        let err = |j: usize| {
            let c = gen_rect_elastica(1, j).unwrap();
            let solved = solve_y0(&DiscreteCurve { x: c.x.clone(), y: None }).unwrap();
            solved
                .y
                .as_ref()
                .unwrap()
                .iter()
                .zip(c.y.as_ref().unwrap())
                .map(|(a, b)| (*a - *b).norm())
                .fold(0.0_f64, f64::max)
        };
        let (e1, e2) = (err(256), err(512));
        let ratio = e1 / e2;
        assert!(e1 < 0.05, "error {e1}");
        assert!((3.4..=4.6).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn semicircle_curvature_near_unit() {
        let interior_dev = |j: usize| {
            let x: Vec<Vec2> = (0..=j)
                .map(|i| {
                    let th = std::f64::consts::PI * i as f64 / j as f64;
                    Vec2::new(th.cos(), th.sin())
                })
                .collect();
            let solved = solve_y0(&DiscreteCurve { x, y: None }).unwrap();
            let kappa = geometry(&solved).unwrap().kappa.unwrap();
            (j / 4..=3 * j / 4)
                .map(|i| (kappa[i].abs() - 1.0).abs())
                .fold(0.0_f64, f64::max)
        };
        let (d1, d2) = (interior_dev(128), interior_dev(256));
        assert!(d1 <= 1e-3, "deviation {d1}");
        let ratio = d1 / d2;
        assert!((3.4..=4.6).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn energy_moves_off_the_critical_amplitude() {
        // The very first step carries an O(dt) startup transient that
        // lowers the scale-invariant energy for any amplitude; the drift
        // direction is read off after a short run instead.
        let ehat = |c: &DiscreteCurve| discrete_energy(c).unwrap().scale_invariant;
        for (a, up) in [(1.5, true), (1.4, false)] {
            let c = gen_critical(a, 0.71, 1024).unwrap();
            let before = ehat(&c);
            let mut state = FlowState { t: 0.0, m: 0, curve: c };
            for _ in 0..50 {
                state = step(&state, 1e-4).unwrap();
            }
            let after = ehat(&state.curve);
            assert_eq!(after > before, up, "a={a}: {before} -> {after}");
        }
    }

    #[test]
    fn flow_records_and_snapshots() {
        let config = FlowConfig {
            snapshot_times: vec![0.0, 0.025, 9.0],
            ..FlowConfig::new(64, 1e-3, 0.05)
        };
        let c = gen_critical(1.4, 0.71, 64).unwrap();
        let out = run_flow(&config, &c).unwrap();
        out.trace.validate().unwrap();
        assert_eq!(out.trace.rows.len(), 51);
        assert_eq!(out.snapshots.len(), 3);
        assert_eq!(out.snapshots[0].t, 0.0);
        assert!((out.snapshots[1].t - 0.025).abs() <= 1e-3 + 1e-12);
        // Requests beyond the horizon resolve to the final state.
        assert!((out.snapshots[2].t - out.final_state.t).abs() <= 1e-12);
        let first = out.trace.rows.first().unwrap().scale_invariant;
        let last = out.trace.rows.last().unwrap().scale_invariant;
        assert!(last < first);
    }

    #[test]
    fn adaptive_steps_track_the_length_scale() {
        let config = FlowConfig {
            adaptive: true,
            ..FlowConfig::new(64, 1e-3, 0.03)
        };
        let c = gen_critical(1.4, 0.71, 64).unwrap();
        let out = run_flow(&config, &c).unwrap();
        let rows = &out.trace.rows;
        let l0 = rows[0].length;
        for row in rows.iter().take(rows.len() - 1) {
            let want = config.dt0 * (row.length / l0).powi(4);
            assert!(
                row.dt <= want * (1.0 + 1e-12),
                "dt {} above law {}",
                row.dt,
                want
            );
        }
    }

    #[test]
    fn fate_classification_thresholds() {
        let tau = std::f64::consts::TAU;
        let row = |t: f64, ehat: f64| TraceRow {
            t,
            length: 1.0,
            energy: ehat,
            scale_invariant: ehat,
            int_ks2: 0.0,
            int_k4: 0.0,
            dt: 1.0,
        };
        let mk = |vals: &[f64]| EnergyTrace {
            rows: vals
                .iter()
                .enumerate()
                .map(|(i, &v)| row(i as f64, v))
                .collect(),
        };
        assert_eq!(classify_fate(&mk(&[tau; 30])).unwrap(), Fate::Undecided);
        assert_eq!(
            classify_fate(&mk(&[tau, 0.5 * tau, 0.04 * tau])).unwrap(),
            Fate::Line
        );
        let growing: Vec<f64> = (0..30).map(|i| tau * (1.0 + 0.01 * i as f64)).collect();
        assert_eq!(classify_fate(&mk(&growing)).unwrap(), Fate::Grows);
        assert!(classify_fate(&EnergyTrace::new()).is_err());
    }

    #[test]
    fn bisect_degenerate_request_returns_bracket() {
        let got = bisect_critical_amplitude(64, 1e-3, 1.0, 1.05, 0.1, 0.1).unwrap();
        assert_eq!(got, (1.0, 1.05));
    }
}
