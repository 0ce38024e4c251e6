//! Subcommand implementations. Tables go to stdout; flow runs write files
//! under the given prefix and print what they wrote.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use elastica::curves::{
    gen_critical, gen_figure_eight, gen_lemniscate, gen_line, gen_rect_elastica,
    gen_upright_elastica, DiscreteCurve,
};
use elastica::diagnostics::{discrete_energy, shape_distance};
use elastica::fem::{bisect_critical_amplitude_report, run_flow, Fate, FlowConfig};
use elastica::io::{read_snapshot, write_snapshot, write_trace};
use elastica::stability::{quad_form_b, three_mode_spectrum, TestMode, DEFAULT_PANELS};
use elastica::variational::{critical_profile_report, q_tilde, q_value};
use elastica::{Error, Result};

use crate::specfile;
use crate::{Command, Family, Initial};

/// 17 significant digits; reading the text back reproduces the value.
fn f17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Qfun { spec, kmin, kmax, n } => {
            let file: specfile::QfunParams = specfile::load(spec.as_deref(), "qfun")?;
            qfun(
                kmin.or(file.kmin).unwrap_or(-0.999),
                kmax.or(file.kmax).unwrap_or(0.999),
                n.or(file.n).unwrap_or(2001),
            )
        }
        Command::CriticalProfile { spec, k } => {
            let file: specfile::CriticalProfileParams =
                specfile::load(spec.as_deref(), "critical-profile")?;
            critical_profile(k.or(file.k).unwrap_or(0.71))
        }
        Command::Consistency { spec, j, which } => {
            let file: specfile::ConsistencyParams = specfile::load(spec.as_deref(), "consistency")?;
            let which = match (which, file.which) {
                (Some(w), _) => w,
                (None, Some(s)) => parse_variant::<Family>(&s)?,
                (None, None) => Family::Both,
            };
            consistency(
                &j.or(file.j).unwrap_or(vec![1024, 4096, 16384, 65536]),
                which,
            )
        }
        Command::Flow {
            spec,
            initial,
            a,
            k,
            m,
            upright,
            j,
            dt,
            adaptive,
            t_end,
            out,
            stride,
        } => {
            let file: specfile::FlowParams = specfile::load(spec.as_deref(), "flow")?;
            let initial = match (initial, file.initial) {
                (Some(i), _) => i,
                (None, Some(s)) => parse_variant::<Initial>(&s)?,
                (None, None) => Initial::Elastica,
            };
            flow(FlowArgs {
                initial,
                a: a.or(file.a).unwrap_or(1.5),
                k: k.or(file.k).unwrap_or(0.71),
                m: m.or(file.m).unwrap_or(1),
                upright: upright || file.upright.unwrap_or(false),
                j: j.or(file.j).unwrap_or(4096),
                dt: dt.or(file.dt).unwrap_or(1e-4),
                adaptive: adaptive || file.adaptive.unwrap_or(false),
                t_end: t_end.or(file.t_end).unwrap_or(1.0),
                out: out.or(file.out).unwrap_or_else(|| "flow".to_string()),
                stride: stride.or(file.stride).unwrap_or(1),
            })
        }
        Command::Bisect {
            spec,
            j,
            alo,
            ahi,
            res,
            tmax,
        } => {
            let file: specfile::BisectParams = specfile::load(spec.as_deref(), "bisect")?;
            bisect(
                j.or(file.j).unwrap_or(1024),
                alo.or(file.alo).unwrap_or(1.40),
                ahi.or(file.ahi).unwrap_or(1.50),
                res.or(file.res).unwrap_or(1e-4),
                tmax.or(file.tmax).unwrap_or(5.0),
            )
        }
        Command::Stability { spec, panels } => {
            let file: specfile::StabilityParams = specfile::load(spec.as_deref(), "stability")?;
            stability(panels.or(file.panels).unwrap_or(DEFAULT_PANELS))
        }
        Command::Compare {
            spec,
            snapshot,
            reference,
            ref_file,
        } => {
            let file: specfile::CompareParams = specfile::load(spec.as_deref(), "compare")?;
            let reference = match (reference, file.reference) {
                (Some(r), _) => Some(r),
                (None, Some(s)) => Some(parse_variant::<Initial>(&s)?),
                (None, None) => None,
            };
            compare(
                snapshot.or(file.snapshot),
                reference,
                ref_file.or(file.ref_file),
            )
        }
    }
}

/// Spec-file counterpart of clap's value parsing for enum flags.
fn parse_variant<T: ValueEnum>(s: &str) -> Result<T> {
    T::from_str(s, true).map_err(|_| Error::domain(format!("unknown value {s:?}")))
}

fn qfun(kmin: f64, kmax: f64, n: usize) -> Result<()> {
    if !(kmin < kmax) {
        return Err(Error::domain("qfun requires kmin < kmax"));
    }
    if n < 2 {
        return Err(Error::domain("qfun requires n >= 2"));
    }
    let mut out = String::with_capacity(n * 72 + 16);
    out.push_str("k,Q,Qtilde\n");
    for i in 0..n {
        let k = kmin + (kmax - kmin) * i as f64 / (n - 1) as f64;
        let q = q_value(k)?;
        let qt = if k > FRAC_1_SQRT_2 && k < 1.0 {
            f17(q_tilde(k)?)
        } else {
            String::new()
        };
        out.push_str(&format!("{},{},{qt}\n", f17(k), f17(q)));
    }
    print!("{out}");
    Ok(())
}

fn critical_profile(k: f64) -> Result<()> {
    let r = critical_profile_report(k)?;
    print!(
        "field,value\nk,{}\na_star,{}\nint_u2,{}\nint_u4,{}\nint_du2,{}\nint_residual2,{}\nlhs,{}\n",
        f17(r.k),
        f17(r.a_star),
        f17(r.int_u2),
        f17(r.int_u4),
        f17(r.int_du2),
        f17(r.int_residual2),
        f17(r.lhs)
    );
    Ok(())
}

fn consistency(j_list: &[usize], which: Family) -> Result<()> {
    if j_list.is_empty() {
        return Err(Error::domain("consistency requires at least one J"));
    }
    let a_star = critical_profile_report(0.71)?.a_star;
    let mut out = String::from("family,J,Ehat0_minus_2pi\n");
    for &j in j_list {
        if which != Family::Elastica {
            let e = discrete_energy(&gen_critical(a_star, 0.71, j)?)?;
            out.push_str(&format!("critical,{j},{}\n", f17(e.scale_invariant - TAU)));
        }
        if which != Family::Critical {
            let e = discrete_energy(&gen_rect_elastica(1, j)?)?;
            out.push_str(&format!("elastica,{j},{}\n", f17(e.scale_invariant - TAU)));
        }
    }
    print!("{out}");
    Ok(())
}

struct FlowArgs {
    initial: Initial,
    a: f64,
    k: f64,
    m: usize,
    upright: bool,
    j: usize,
    dt: f64,
    adaptive: bool,
    t_end: f64,
    out: String,
    stride: usize,
}

fn flow(args: FlowArgs) -> Result<()> {
    if args.upright && args.initial != Initial::Elastica {
        return Err(Error::domain("--upright applies only to --initial elastica"));
    }
    let curve = match args.initial {
        Initial::Critical => gen_critical(args.a, args.k, args.j)?,
        Initial::Elastica if args.upright => gen_upright_elastica(args.j)?,
        Initial::Elastica => gen_rect_elastica(args.m, args.j)?,
        Initial::Lemniscate => gen_lemniscate(args.j)?,
        Initial::Figure8 => gen_figure_eight(args.j)?,
        Initial::Line => gen_line(args.j)?,
    };

    let mut config = FlowConfig::new(args.j, args.dt, args.t_end);
    config.adaptive = args.adaptive;
    config.record_stride = args.stride;
    // Snapshots at t = 0 and at each power of ten up to the horizon.
    config.snapshot_times.push(0.0);
    let mut t = 1.0;
    while t < args.t_end {
        config.snapshot_times.push(t);
        t *= 10.0;
    }
    config.snapshot_times.push(args.t_end);

    let outcome = run_flow(&config, &curve)?;

    let trace_path = format!("{}_trace.csv", args.out);
    write_trace(&trace_path, &outcome.trace)?;
    println!("wrote {trace_path} rows={}", outcome.trace.rows.len());
    for snap in &outcome.snapshots {
        let path = format!("{}_t{}.dat", args.out, snap.requested_t);
        let meta = vec![
            ("t".to_string(), f17(snap.t)),
            ("J".to_string(), args.j.to_string()),
        ];
        write_snapshot(&path, &snap.curve, &meta)?;
        println!("wrote {path}");
    }
    let last = outcome.trace.last().expect("trace is never empty");
    println!(
        "final t={} length={} Ehat_over_2pi={}",
        f17(last.t),
        f17(last.length),
        f17(last.scale_invariant / TAU)
    );
    Ok(())
}

fn bisect(j: usize, alo: f64, ahi: f64, res: f64, tmax: f64) -> Result<()> {
    // Probe step follows the mesh: dt = 0.2048·h.
    let dt0 = 0.2048 * 2.0 / j as f64;
    let report = bisect_critical_amplitude_report(j, dt0, alo, ahi, res, tmax)?;
    let mut out = format!(
        "# bracket lower={} upper={}\namplitude,fate,Ehat0_over_2pi\n",
        f17(report.lower),
        f17(report.upper)
    );
    for probe in &report.probes {
        let fate = match probe.fate {
            Fate::Line => "line",
            Fate::Grows => "grows",
            Fate::Undecided => "undecided",
        };
        let e0 = discrete_energy(&gen_critical(probe.amplitude, 0.71, j)?)?;
        out.push_str(&format!(
            "{},{fate},{}\n",
            f17(probe.amplitude),
            f17(e0.scale_invariant / TAU)
        ));
    }
    print!("{out}");
    Ok(())
}

fn stability(panels: usize) -> Result<()> {
    let mut out = String::from("mode,B\n");
    for half_waves in 1..=3 {
        let b = quad_form_b(&TestMode::cosine(half_waves, panels)?)?;
        out.push_str(&format!("cosine_{half_waves},{}\n", f17(b)));
    }
    for (i, v) in three_mode_spectrum(panels)?.iter().enumerate() {
        out.push_str(&format!("spectrum_{},{}\n", i + 1, f17(*v)));
    }
    print!("{out}");
    Ok(())
}

fn compare(
    snapshot: Option<PathBuf>,
    reference: Option<Initial>,
    ref_file: Option<PathBuf>,
) -> Result<()> {
    let snapshot =
        snapshot.ok_or_else(|| Error::domain("compare requires --snapshot <file>"))?;
    let (curve, _) = read_snapshot(&snapshot)?;
    let j = curve.element_count();
    let (ref_curve, ref_name): (DiscreteCurve, String) = match (reference, ref_file) {
        (Some(_), Some(_)) => {
            return Err(Error::domain("--ref and --ref-file are mutually exclusive"))
        }
        (None, None) => return Err(Error::domain("compare requires --ref or --ref-file")),
        (Some(name), None) => {
            let c = match name {
                Initial::Critical => gen_critical(1.5, 0.71, j)?,
                Initial::Elastica => gen_rect_elastica(1, j)?,
                Initial::Lemniscate => gen_lemniscate(j)?,
                Initial::Figure8 => gen_figure_eight(j)?,
                Initial::Line => gen_line(j)?,
            };
            let label = name
                .to_possible_value()
                .expect("no skipped variants")
                .get_name()
                .to_string();
            (c, label)
        }
        (None, Some(path)) => (read_snapshot(&path)?.0, display_path(&path)),
    };
    let distance = shape_distance(&curve, &ref_curve)?;
    print!(
        "snapshot,reference,distance\n{},{ref_name},{}\n",
        display_path(&snapshot),
        f17(distance)
    );
    Ok(())
}

fn display_path(p: &Path) -> String {
    p.display().to_string()
}
