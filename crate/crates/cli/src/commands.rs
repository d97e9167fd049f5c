//! Subcommands. Each returns the summary object; files go to the output dir.

use rayon::prelude::*;
use saddleloop::bounds::{self, CharacteristicSet, Provenance};
use saddleloop::counting::{self, CountReport};
use saddleloop::dulac::{self, CoveringPoint, ZeroLocusCurve};
use saddleloop::fit::{self, AsymptoticModel};
use saddleloop::flow::IntegratorConfig;
use saddleloop::melnikov::{self, M1Decomposition};
use saddleloop::system::HamiltonianSystem;
use saddleloop::{Error, Rational64, C64};
use serde_json::{json, Map, Value};

use crate::config::{Command, RunConfig};
use crate::input::SystemFile;
use crate::plot::{Plot, Series};
use crate::report::{num, CliError, OutDir};

pub const DEGENERATE_WARNING: &str = "degenerate perturbation";

pub fn run(cfg: &RunConfig) -> Result<Value, CliError> {
    let out = OutDir::create(&cfg.output_dir)?;
    let system = match &cfg.system_file {
        Some(p) => Some(SystemFile::read(p)?),
        None => None,
    };
    let mut summary = match cfg.command {
        Command::Bounds => bounds_cmd(cfg)?,
        Command::Analyze => analyze(cfg, &build(system)?, &out)?,
        Command::Melnikov => melnikov_cmd(cfg, &build(system)?, &out)?,
        Command::Dulac => dulac_cmd(cfg, &build(system)?, &out)?,
        Command::ZeroLocus => zero_locus_cmd(cfg, &build(system)?, &out)?,
        Command::Count => count_cmd(cfg, &build(system)?, &out)?,
    };
    summary.insert(
        "command".into(),
        serde_json::to_value(cfg.command).expect("enum serializes"),
    );
    summary.insert("seed".into(), json!(cfg.seed));
    summary.entry("warnings").or_insert_with(|| json!([]));
    let v = Value::Object(summary);
    out.write_json("summary.json", &v)?;
    Ok(v)
}

fn build(sf: Option<SystemFile>) -> Result<HamiltonianSystem, CliError> {
    sf.ok_or_else(|| {
        CliError::validation("cli", "validate_config", "a system file is required".into())
    })?
    .build()
}

fn system_json(sys: &HamiltonianSystem) -> Value {
    let lp = &sys.lp;
    json!({
        "saddle1": [num(lp.saddle1.x), num(lp.saddle1.y)],
        "saddle2": [num(lp.saddle2.x), num(lp.saddle2.y)],
        "center": [num(lp.center.x), num(lp.center.y)],
        "annulus_sign": num(lp.annulus_sign),
        "s_max": num(lp.s_max()),
    })
}

pub fn parse_rational(s: &str) -> Result<Rational64, CliError> {
    s.trim().parse::<Rational64>().map_err(|_| {
        CliError::validation(
            "bounds",
            "parse_characteristic",
            format!("not a rational: {s:?}"),
        )
    })
}

fn rational_json(r: Rational64) -> Value {
    if r.is_integer() {
        json!(r.to_integer())
    } else {
        num(*r.numer() as f64 / *r.denom() as f64)
    }
}

fn model_json(m: &AsymptoticModel) -> Value {
    json!({
        "p": m.p.map(|r| r.to_string()),
        "p_raw": num(m.p_raw),
        "q": m.q,
        "c": num(m.c),
        "fit_rms": num(m.fit_rms),
    })
}

/// `s_j = (s_max / 4) 2^{-j}`, `n` points.
pub fn halving_grid(sys: &HamiltonianSystem, n: usize) -> Vec<f64> {
    let s0 = 0.25 * sys.lp.s_max();
    (0..n).map(|j| s0 * 0.5f64.powi(j as i32)).collect()
}

/// `M1`, its imaginary residue, and the log decomposition on a grid, one worker per point.
pub fn m1_table(
    sys: &HamiltonianSystem,
    grid: &[f64],
) -> Result<(Vec<C64>, M1Decomposition), CliError> {
    let rows: Vec<(C64, M1Decomposition)> = grid
        .par_iter()
        .map(|&s| {
            let m1 = melnikov::melnikov_M1(sys, &[s])
                .map_err(|e| CliError::core("melnikov", "melnikov_M1", e))?;
            let dec = melnikov::decompose_log(sys, &m1)
                .map_err(|e| CliError::core("melnikov", "decompose_log", e))?;
            Ok((m1.values[0], dec))
        })
        .collect::<Result<_, CliError>>()?;
    let mut dec = M1Decomposition {
        s: Vec::new(),
        m1: Vec::new(),
        f1: Vec::new(),
        f2: Vec::new(),
        f3: Vec::new(),
    };
    let mut raw = Vec::with_capacity(rows.len());
    for (v, d) in rows {
        raw.push(v);
        dec.s.extend(d.s);
        dec.m1.extend(d.m1);
        dec.f1.extend(d.f1);
        dec.f2.extend(d.f2);
        dec.f3.extend(d.f3);
    }
    Ok((raw, dec))
}

fn write_m1(out: &OutDir, raw: &[C64], dec: &M1Decomposition) -> Result<(), CliError> {
    let rows: Vec<Vec<f64>> = (0..dec.s.len())
        .map(|k| {
            vec![
                dec.s[k], raw[k].re, raw[k].im, dec.f1[k], dec.f2[k], dec.f3[k],
            ]
        })
        .collect();
    out.write_csv("m1.csv", &["s", "re_m1", "im_m1", "f1", "f2", "f3"], &rows)?;
    let pts = |v: &[f64]| {
        dec.s
            .iter()
            .copied()
            .zip(v.iter().copied())
            .collect::<Vec<_>>()
    };
    let plot = Plot {
        title: "First Melnikov function",
        xlabel: "s (log scale)",
        ylabel: "value",
        log_x: true,
        series: vec![
            Series {
                label: "M1",
                points: pts(&dec.m1),
                color: "black",
                markers: false,
            },
            Series {
                label: "f1",
                points: pts(&dec.f1),
                color: "#1f77b4",
                markers: true,
            },
            Series {
                label: "f2",
                points: pts(&dec.f2),
                color: "#ff7f0e",
                markers: true,
            },
            Series {
                label: "f3",
                points: pts(&dec.f3),
                color: "#2ca02c",
                markers: false,
            },
        ],
    };
    out.write_text("m1.svg", &plot.render())
}

/// Fits one characteristic number; a degenerate series becomes a warning.
fn fit_named(
    name: &str,
    grid: &[f64],
    values: &[f64],
    warnings: &mut Vec<String>,
) -> Result<Option<AsymptoticModel>, CliError> {
    match fit::characteristic_number(grid, values) {
        Ok(m) => {
            if m.p.is_none() {
                warnings.push(format!(
                    "{name}: exponent {:.4} is not a quarter-integer",
                    m.p_raw
                ));
            }
            Ok(Some(m))
        }
        Err(Error::Degenerate) => {
            warnings.push(format!("{name}: {DEGENERATE_WARNING}"));
            Ok(None)
        }
        Err(Error::NoisyTail) => {
            warnings.push(format!("{name}: fitted exponents disagree between decades"));
            Ok(None)
        }
        Err(e) => Err(CliError::core("fit", "characteristic_number", e)),
    }
}

fn bounds_json(cs: &CharacteristicSet) -> Map<String, Value> {
    let two = bounds::bound_two_saddle(cs);
    let mut m = Map::new();
    m.insert("nu_p".into(), json!(cs.nu_p.to_string()));
    m.insert("nu_d1".into(), json!(cs.nu_d1.to_string()));
    m.insert("nu_d2".into(), json!(cs.nu_d2.to_string()));
    m.insert("nu_d12".into(), json!(cs.nu_d12.to_string()));
    m.insert(
        "provenance".into(),
        serde_json::to_value(cs.provenance).expect("enum serializes"),
    );
    m.insert("bound_two_saddle".into(), rational_json(two));
    m.insert("bound_two_saddle_exact".into(), json!(two.to_string()));
    m.insert("bound".into(), json!(bounds::floor(two)));
    m.insert(
        "bound_homoclinic".into(),
        rational_json(bounds::bound_homoclinic(cs.nu_p, cs.nu_d1)),
    );
    m
}

fn bounds_cmd(cfg: &RunConfig) -> Result<Map<String, Value>, CliError> {
    let mut m = Map::new();
    if let Some(nu) = &cfg.nu {
        let r: Vec<Rational64> = nu
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<_, _>>()?;
        let cs = CharacteristicSet::new(r[0], r[1], r[2], r[3], Provenance::User)
            .map_err(|e| CliError::core("bounds", "bound_two_saddle", e))?;
        m.extend(bounds_json(&cs));
    }
    if let Some(ex) = &cfg.example {
        let r: Vec<Rational64> = ex
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<_, _>>()?;
        if r.iter().any(|v| *v < Rational64::from_integer(0)) {
            return Err(CliError::validation(
                "bounds",
                "compare_bounds",
                "p, q, p1, p2 must be nonnegative".into(),
            ));
        }
        let rep = bounds::compare_bounds(r[0], r[1], r[2], r[3]);
        let entries: Vec<Value> = rep
            .entries
            .iter()
            .map(|e| json!({"name": e.name, "value": rational_json(e.value), "exact": e.value.to_string(), "note": e.note}))
            .collect();
        m.insert("comparison".into(), json!({"p": rep.p.to_string(), "q": rep.q.to_string(), "p1": rep.p1.to_string(), "p2": rep.p2.to_string(), "entries": entries}));
    }
    Ok(m)
}

fn melnikov_cmd(
    cfg: &RunConfig,
    sys: &HamiltonianSystem,
    out: &OutDir,
) -> Result<Map<String, Value>, CliError> {
    let grid = halving_grid(sys, cfg.grid);
    let (raw, dec) = m1_table(sys, &grid)?;
    write_m1(out, &raw, &dec)?;
    let mut warnings = Vec::new();
    let mut m = Map::new();
    m.insert("system".into(), system_json(sys));
    m.insert("melnikov".into(), fits_json(&dec, &raw, &mut warnings)?.0);
    m.insert("warnings".into(), json!(warnings));
    Ok(m)
}

type Fits = [Option<AsymptoticModel>; 4];

fn fits_json(
    dec: &M1Decomposition,
    raw: &[C64],
    warnings: &mut Vec<String>,
) -> Result<(Value, Fits), CliError> {
    let fsum = dec.fsum();
    let fits: Fits = [
        fit_named("M1", &dec.s, &dec.m1, warnings)?,
        fit_named("f1", &dec.s, &dec.f1, warnings)?,
        fit_named("f2", &dec.s, &dec.f2, warnings)?,
        fit_named("f1+f2", &dec.s, &fsum, warnings)?,
    ];
    let scale = dec.m1.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let max_im = raw.iter().fold(0.0_f64, |a, v| a.max(v.im.abs()));
    let mj = |k: usize| fits[k].as_ref().map_or(Value::Null, model_json);
    let v = json!({
        "grid_points": dec.s.len(),
        "s_range": [num(dec.s[dec.s.len() - 1]), num(dec.s[0])],
        "max_abs_m1": num(scale),
        "max_abs_im_m1": num(max_im),
        "f3_roughness": num(dec.f3_roughness()),
        "model_m1": mj(0),
        "model_f1": mj(1),
        "model_f2": mj(2),
        "model_f1_plus_f2": mj(3),
    });
    Ok((v, fits))
}

/// Characteristic numbers from the fits: `nu_P` from `M1`, `nu_d1` from `f1`,
/// `nu_d2` from `f2`, `nu_d12` from `f1 + f2`.
fn characteristic_from(fits: &Fits) -> Option<CharacteristicSet> {
    let p: Vec<Rational64> = fits
        .iter()
        .map(|m| m.as_ref().and_then(|m| m.p))
        .collect::<Option<_>>()?;
    CharacteristicSet::new(p[0], p[1], p[2], p[3], Provenance::Fitted).ok()
}

fn analyze(
    cfg: &RunConfig,
    sys: &HamiltonianSystem,
    out: &OutDir,
) -> Result<Map<String, Value>, CliError> {
    let grid = halving_grid(sys, cfg.grid);
    let (raw, dec) = m1_table(sys, &grid)?;
    write_m1(out, &raw, &dec)?;
    let mut warnings = Vec::new();
    let mut m = Map::new();
    m.insert("system".into(), system_json(sys));
    let (mel, fits) = fits_json(&dec, &raw, &mut warnings)?;
    m.insert("melnikov".into(), mel);
    let cs = characteristic_from(&fits);
    match &cs {
        Some(cs) => {
            let b = bounds_json(cs);
            m.insert("bound_two_saddle".into(), b["bound_two_saddle"].clone());
            m.insert("bound".into(), b["bound"].clone());
            m.insert("bounds".into(), Value::Object(b));
        }
        None => {
            warnings.push("characteristic numbers unavailable; bound skipped".into());
            m.insert("bound".into(), Value::Null);
        }
    }
    if let (Some(eps), Some(r)) = (cfg.eps, cfg.radius) {
        let cfgi = IntegratorConfig::default();
        let rep = counting::count_zeros(sys, eps, r, cs.as_ref(), &cfgi)
            .map_err(|e| CliError::core("counting", "count_zeros", e))?;
        write_contour(out, &rep)?;
        m.insert("eps".into(), num(eps));
        m.insert("R".into(), num(r));
        m.insert("winding_count".into(), json!(rep.winding_count));
        m.insert("real_cycle_count".into(), json!(rep.real_cycle_count));
        m.insert("count".into(), count_json(&rep));
        let lo = if rep.s1 <= rep.s2 { 1 } else { 2 };
        let smax = sys.lp.s_max();
        match dulac::trace_zero_locus(sys, eps, lo, (-0.2 * smax, -0.02 * smax), 16, &cfgi) {
            Ok(curve) => {
                write_locus(out, &curve)?;
                m.insert("zero_locus".into(), locus_json(&curve));
            }
            Err(e) => warnings.push(format!("zero locus skipped: {e}")),
        }
    }
    m.insert("warnings".into(), json!(warnings));
    Ok(m)
}

fn count_json(rep: &CountReport) -> Value {
    json!({
        "eps": num(rep.eps),
        "R": num(rep.r),
        "s1": num(rep.s1),
        "s2": num(rep.s2),
        "winding_count": rep.winding_count,
        "winding_raw": num(rep.winding_raw),
        "real_cycle_count": rep.real_cycle_count,
        "real_zeros": rep.real_zeros.iter().map(|&z| num(z)).collect::<Vec<_>>(),
        "bound": rep.bound,
        "bound_exceeded": rep.bound_exceeded,
        "contour_samples": rep.trace.samples.len(),
    })
}

fn write_contour(out: &OutDir, rep: &CountReport) -> Result<(), CliError> {
    let rows: Vec<Vec<f64>> = rep
        .trace
        .samples
        .iter()
        .map(|s| vec![s.z.re, s.z.im, s.value.re, s.value.im, s.arg])
        .collect();
    out.write_csv(
        "contour.csv",
        &["re_z", "im_z", "re_disp", "im_disp", "arg_unwrapped"],
        &rows,
    )?;
    let plot = Plot {
        title: "Displacement argument along the upper boundary",
        xlabel: "sample index",
        ylabel: "unwrapped argument",
        log_x: false,
        series: vec![Series {
            label: "arg D",
            points: rep
                .trace
                .samples
                .iter()
                .enumerate()
                .map(|(k, s)| (k as f64, s.arg))
                .collect(),
            color: "black",
            markers: false,
        }],
    };
    out.write_text("contour.svg", &plot.render())
}

fn locus_json(c: &ZeroLocusCurve) -> Value {
    let conv: Vec<_> = c.samples.iter().filter(|s| s.converged).collect();
    json!({
        "eps": num(c.eps),
        "saddle": c.saddle_index,
        "order": c.order,
        "samples": c.samples.len(),
        "converged": conv.len(),
        "max_residual": num(conv.iter().fold(0.0_f64, |a, s| a.max(s.residual.abs()))),
        "max_abs_v_minus_pred": num(conv.iter().fold(0.0_f64, |a, s| a.max((s.v - s.v_pred).abs()))),
    })
}

fn write_locus(out: &OutDir, c: &ZeroLocusCurve) -> Result<(), CliError> {
    let rows: Vec<Vec<f64>> = c
        .samples
        .iter()
        .map(|s| vec![s.u, s.v, s.v_pred, s.residual])
        .collect();
    out.write_csv(
        "zero_locus.csv",
        &["u", "v_solved", "v_predicted", "residual"],
        &rows,
    )?;
    let plot = Plot {
        title: "Zero locus of Im d",
        xlabel: "u",
        ylabel: "v",
        log_x: false,
        series: vec![
            Series {
                label: "solved",
                points: c.samples.iter().map(|s| (s.u, s.v)).collect(),
                color: "black",
                markers: true,
            },
            Series {
                label: "predicted",
                points: c.samples.iter().map(|s| (s.u, s.v_pred)).collect(),
                color: "#d62728",
                markers: false,
            },
        ],
    };
    out.write_text("zero_locus.svg", &plot.render())
}

fn zero_locus_cmd(
    cfg: &RunConfig,
    sys: &HamiltonianSystem,
    out: &OutDir,
) -> Result<Map<String, Value>, CliError> {
    let eps = cfg.eps.expect("validated");
    let smax = sys.lp.s_max();
    let [a, b] = cfg.u_range.unwrap_or([-0.2 * smax, -0.02 * smax]);
    let curve = dulac::trace_zero_locus(
        sys,
        eps,
        cfg.saddle,
        (a, b),
        cfg.grid,
        &IntegratorConfig::tight(),
    )
    .map_err(|e| CliError::core("dulac", "trace_zero_locus", e))?;
    write_locus(out, &curve)?;
    let mut m = Map::new();
    m.insert("system".into(), system_json(sys));
    m.insert("zero_locus".into(), locus_json(&curve));
    Ok(m)
}

fn dulac_cmd(
    cfg: &RunConfig,
    sys: &HamiltonianSystem,
    out: &OutDir,
) -> Result<Map<String, Value>, CliError> {
    let z = CoveringPoint::new(cfg.rho.expect("validated"), cfg.phi.unwrap_or(0.0));
    let eps = cfg.eps.expect("validated");
    let d = dulac::dulac_map(sys, eps, cfg.saddle, z, &IntegratorConfig::tight())
        .map_err(|e| CliError::core("dulac", "dulac_map", e))?;
    let rows: Vec<Vec<f64>> = d
        .lift
        .iter()
        .enumerate()
        .map(|(k, p)| vec![k as f64, p[0].re, p[0].im, p[1].re, p[1].im])
        .collect();
    out.write_csv(
        "trajectories.csv",
        &["param", "re_x", "im_x", "re_y", "im_y"],
        &rows,
    )?;
    let mut m = Map::new();
    m.insert("system".into(), system_json(sys));
    m.insert(
        "dulac".into(),
        json!({
            "eps": num(eps),
            "saddle": cfg.saddle,
            "rho": num(z.rho),
            "phi": num(z.phi),
            "re_value": num(d.value.re),
            "im_value": num(d.value.im),
            "lift_samples": d.lift.len(),
        }),
    );
    Ok(m)
}

fn count_cmd(
    cfg: &RunConfig,
    sys: &HamiltonianSystem,
    out: &OutDir,
) -> Result<Map<String, Value>, CliError> {
    let eps = cfg.eps.expect("validated");
    let r = cfg.radius.expect("validated");
    let cs = match &cfg.nu {
        Some(nu) => {
            let v: Vec<Rational64> = nu
                .iter()
                .map(|s| parse_rational(s))
                .collect::<Result<_, _>>()?;
            Some(
                CharacteristicSet::new(v[0], v[1], v[2], v[3], Provenance::User)
                    .map_err(|e| CliError::core("bounds", "bound_two_saddle", e))?,
            )
        }
        None => None,
    };
    let rep = counting::count_zeros(sys, eps, r, cs.as_ref(), &IntegratorConfig::default())
        .map_err(|e| CliError::core("counting", "count_zeros", e))?;
    write_contour(out, &rep)?;
    let mut m = Map::new();
    m.insert("system".into(), system_json(sys));
    m.insert("winding_count".into(), json!(rep.winding_count));
    m.insert("real_cycle_count".into(), json!(rep.real_cycle_count));
    m.insert("bound".into(), json!(rep.bound));
    m.insert("count".into(), count_json(&rep));
    Ok(m)
}
