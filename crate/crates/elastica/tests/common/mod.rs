//! Reference numerics for the integration tests. Everything here is built
//! from textbook algorithms with no code shared with the library paths under
//! test: quadrature by adaptive Simpson, the Γ function by a Lanczos sum,
//! ODE integration by classical Runge–Kutta, and scalar maximisation by
//! golden-section search.
#![allow(dead_code)]

/// Adaptive Simpson quadrature of `f` over [a, b].
///
/// The recursion refines until the local Richardson estimate meets the
/// subinterval's share of `tol` or the depth cap is hit, so mildly noisy
/// integrands terminate.
pub fn adaptive_simpson(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &mut dyn FnMut(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    // Eight starter panels: a symmetric integrand can make the very first
    // refinement reproduce the coarse estimate exactly, silencing the error
    // estimate on the full interval.
    let mut total = 0.0;
    for p in 0..8 {
        let pa = a + (b - a) * p as f64 / 8.0;
        let pb = a + (b - a) * (p + 1) as f64 / 8.0;
        let fa = f(pa);
        let fb = f(pb);
        let m = 0.5 * (pa + pb);
        let fm = f(m);
        let whole = simpson(fa, fm, fb, pa, pb);
        total += recurse(f, pa, pb, fa, fm, fb, whole, 0.125 * tol, 40);
    }
    total
}

/// ∫₀^K f(sn, cn) du rewritten through sn = sin φ as
/// ∫₀^{π/2} f(sin φ, cos φ)/√(1−k²sin²φ) dφ, which quadrature handles
/// without touching any AGM or Landen code path.
pub fn jacobi_moment_quadrature(k: f64, f: &dyn Fn(f64, f64) -> f64) -> f64 {
    let k2 = k * k;
    adaptive_simpson(
        &mut |phi: f64| {
            let s = phi.sin();
            let c = phi.cos();
            f(s, c) / (1.0 - k2 * s * s).sqrt()
        },
        0.0,
        0.5 * std::f64::consts::PI,
        1e-13,
    )
}

/// Composite Simpson rule with `panels` even subdivisions; error O(h⁴) with
/// a deterministic evaluation count, for integrands too noisy for adaptive
/// refinement (finite-difference quotients).
pub fn composite_simpson(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    assert!(panels >= 2 && panels % 2 == 0);
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Γ(x) for x > 0 by the Lanczos approximation (g = 7, 9 terms), accurate to
/// about 2e−15 relative on the range used here. Arguments below one are
/// lifted into [1, 2) through Γ(x) = Γ(x+1)/x first.
pub fn gamma(mut x: f64) -> f64 {
    assert!(x > 0.0);
    let mut scale = 1.0;
    while x < 1.0 {
        scale /= x;
        x += 1.0;
    }
    scale * gamma_lanczos(x)
}

fn gamma_lanczos(x: f64) -> f64 {
    const G: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let z = x - 1.0;
    let mut acc = G[0];
    for (i, c) in G.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + 7.5;
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc
}

/// Classical fixed-step RK4 for an autonomous first-order system, advancing
/// `y` from 0 to `t` in `steps` equal steps.
pub fn rk4<const N: usize>(
    rhs: &dyn Fn(&[f64; N]) -> [f64; N],
    mut y: [f64; N],
    t: f64,
    steps: usize,
) -> [f64; N] {
    let h = t / steps as f64;
    let add = |a: &[f64; N], b: &[f64; N], s: f64| {
        let mut r = *a;
        for i in 0..N {
            r[i] += s * b[i];
        }
        r
    };
    for _ in 0..steps {
        let k1 = rhs(&y);
        let k2 = rhs(&add(&y, &k1, 0.5 * h));
        let k3 = rhs(&add(&y, &k2, 0.5 * h));
        let k4 = rhs(&add(&y, &k3, h));
        for i in 0..N {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    y
}

/// Golden-section search for the maximiser of a unimodal `f` on [a, b].
pub fn golden_max(f: &mut dyn FnMut(f64) -> f64, mut a: f64, mut b: f64, iters: u32) -> f64 {
    let gr = 0.5 * (5.0_f64.sqrt() - 1.0);
    let mut c = b - gr * (b - a);
    let mut d = a + gr * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
