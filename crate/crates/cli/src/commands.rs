use std::collections::BTreeMap;

use serde_json::{json, Value};

use diamond_forests::affine::{
    kappa_bar, mgf_value, solve_riccati, AffineSetup, ForwardVarianceCurve, KernelSpec,
    RiccatiOptions,
};
use diamond_forests::expansion::{substitute, ExpansionKind, ExpansionRequest};
use diamond_forests::forest::{format_rational, Poly};
use diamond_forests::io::{read_chaos_kernel_file, read_forward_curve_file};
use diamond_forests::mc::{empirical_cumulants, empirical_mgf, simulate, SimConfig, SimModel};
use diamond_forests::models::bessel::{
    bessel_laplace, bessel_series_log_laplace, BesselSeriesOptions, BesselWeight,
};
use diamond_forests::models::cameron_martin::{
    cameron_martin_cgf, cameron_martin_cgf_coefficients, cameron_martin_q, CAMERON_MARTIN_RADIUS,
};
use diamond_forests::models::chaos::chaos2_cumulants;
use diamond_forests::models::levy::{levy_alpha, levy_cgf};
use diamond_forests::models::signature::{diamond_ito, diamond_strat, Word};
use diamond_forests::Error;

use crate::args::*;
use crate::output::{fmt_f64, Report};
use crate::{CliError, Result};

/// `a=1,b=-a^2/2` → symbol bindings.
pub fn parse_bindings(s: &str) -> Result<BTreeMap<String, Poly>> {
    let mut out = BTreeMap::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("binding `{part}` is not `symbol=value`")))?;
        out.insert(k.trim().to_string(), Poly::parse(v.trim())?);
    }
    Ok(out)
}

pub fn expand(a: &ExpandArgs) -> Result<Report> {
    let kind: ExpansionKind = a.kind.parse()?;
    let mut r = ExpansionRequest::new(kind, a.order)
        .with_order_cap(a.order_cap)
        .run()?;
    if let Some(b) = &a.bind {
        r = substitute(&r, &parse_bindings(b)?)?;
    }
    let mut rows = Vec::new();
    let orders: Vec<Value> = r
        .iter()
        .map(|(n, f)| {
            for (t, c) in f.terms() {
                rows.push(vec![
                    n.to_string(),
                    t.serialize().to_string(),
                    t.leaf_count().to_string(),
                    c.as_constant()
                        .map(|q| format_rational(&q))
                        .unwrap_or_else(|| c.to_string()),
                ]);
            }
            json!({
                "order": n,
                "forest": f.to_json(),
                "shapes": f.len(),
                "zero": f.is_zero(),
            })
        })
        .collect();
    let result = json!({
        "kind": a.kind.to_ascii_uppercase(),
        "alphabet": r.alphabet.iter().map(|l| l.as_str()).collect::<Vec<_>>(),
        "first_order": r.first_order,
        "max_order": r.max_order(),
        "symbols": r.symbols(),
        "orders": orders,
        "all_zero": r.is_identically_zero(),
    });
    Ok(Report::new(result).with_table(&["order", "shape", "leaves", "coeff"], rows))
}

pub fn levy(a: &LevyArgs) -> Result<Report> {
    let alpha = levy_alpha(a.order)?;
    let partial = levy_cgf(a.horizon, a.order)?;
    let closed = -a.horizon.cos().ln();
    let rows: Vec<Vec<String>> = alpha
        .iter()
        .map(|(n, q)| vec![n.to_string(), format_rational(q)])
        .collect();
    let result = json!({
        "alpha": alpha.iter().map(|(n, q)| json!({"n": n, "alpha": format_rational(q)})).collect::<Vec<_>>(),
        "cgf_partial": partial,
        "closed_form": closed,
        "abs_diff": (partial - closed).abs(),
    });
    Ok(Report::new(result).with_table(&["n", "alpha"], rows))
}

/// `log E exp(−λ∫₀¹B²)` for `λ` of either sign inside the radius.
fn cameron_martin_exact(lambda: f64) -> f64 {
    if lambda >= 0.0 {
        -0.5 * (2.0 * lambda).sqrt().cosh().ln()
    } else {
        -0.5 * (-2.0 * lambda).sqrt().cos().ln()
    }
}

pub fn cameron_martin(a: &CameronMartinArgs) -> Result<Report> {
    let q = cameron_martin_q(a.order)?;
    let coeffs = cameron_martin_cgf_coefficients(a.order)?;
    let rows: Vec<Vec<String>> = q
        .iter()
        .map(|(n, qn)| vec![n.to_string(), format_rational(qn), format_rational(&coeffs[n])])
        .collect();
    let mut result = json!({
        "q": q.iter().map(|(n, v)| json!({"n": n, "q": format_rational(v)})).collect::<Vec<_>>(),
        "cgf_coefficients": coeffs.iter().map(|(n, v)| json!({"n": n, "coeff": format_rational(v)})).collect::<Vec<_>>(),
        "radius": CAMERON_MARTIN_RADIUS,
    });
    if let Some(l) = a.lambda {
        let partial = cameron_martin_cgf(l, a.order)?;
        let closed = cameron_martin_exact(l);
        result["lambda"] = json!(l);
        result["cgf_partial"] = json!(partial);
        result["closed_form"] = json!(closed);
        result["abs_diff"] = json!((partial - closed).abs());
    }
    Ok(Report::new(result).with_table(&["n", "q", "cgf_coeff"], rows))
}

pub fn bessel(a: &BesselArgs) -> Result<Report> {
    let (weight, closed) = match a.weight {
        BesselWeightKind::Terminal => (
            BesselWeight::TerminalDirac,
            bessel_laplace(a.x, a.delta, a.lambda, a.horizon)?.ln(),
        ),
        BesselWeightKind::Constant => {
            if a.mu < 0.0 || a.lambda < 0.0 {
                return Err(Error::InvalidArgument("μ and λ must be non-negative".into()).into());
            }
            // E exp(−(β²/2)∫₀ᵀX) = cosh(βT)^{−δ/2} exp(−½xβ tanh βT)
            let beta = (2.0 * a.lambda * a.mu).sqrt();
            let bt = beta * a.horizon;
            (
                BesselWeight::Constant(a.mu),
                -0.5 * a.delta * bt.cosh().ln() - 0.5 * a.x * beta * bt.tanh(),
            )
        }
    };
    let opts = BesselSeriesOptions {
        n_max: a.n_max,
        grid: a.grid,
    };
    let series = bessel_series_log_laplace(&weight, a.x, a.delta, a.lambda, 0.0, a.horizon, opts)?;
    Ok(Report::new(json!({
        "log_laplace_series": series,
        "log_laplace_closed_form": closed,
        "laplace_series": series.exp(),
        "laplace_closed_form": closed.exp(),
        "abs_diff": (series.exp() - closed.exp()).abs(),
    })))
}

pub fn chaos2(a: &Chaos2Args) -> Result<Report> {
    let k = read_chaos_kernel_file(&a.kernel, a.horizon)?;
    let c = chaos2_cumulants(&k, a.order)?;
    let rows = c
        .iter()
        .enumerate()
        .map(|(i, v)| vec![(i + 1).to_string(), fmt_f64(*v)])
        .collect();
    Ok(Report::new(json!({
        "cells": k.cells(),
        "horizon": k.horizon(),
        "step": k.step(),
        "cumulants": c.iter().enumerate().map(|(i, v)| json!({"n": i + 1, "value": v})).collect::<Vec<_>>(),
    }))
    .with_table(&["n", "cumulant"], rows))
}

fn parse_word(s: &str) -> Result<Word> {
    let s = s.trim();
    if s.is_empty() || s.eq_ignore_ascii_case("empty") {
        return Ok(Word::empty());
    }
    Ok(s.parse()?)
}

fn letter(l: u8, name: &str) -> Result<u8> {
    if (1..=9).contains(&l) {
        Ok(l)
    } else {
        Err(CliError::Usage(format!("--{name} must be a letter 1-9, got {l}")))
    }
}

pub fn signature(a: &SignatureArgs) -> Result<Report> {
    let (wa, wb) = (parse_word(&a.left)?, parse_word(&a.right)?);
    let (i, j) = (letter(a.i, "i")?, letter(a.j, "j")?);
    let e = match a.calculus {
        Calculus::Ito => diamond_ito(&wa, i, &wb, j),
        Calculus::Strat => diamond_strat(&wa, i, &wb, j),
    };
    let mut rows = Vec::new();
    let terms: Vec<Value> = e
        .terms()
        .map(|(t, c)| {
            let words: Vec<String> = t.words.iter().map(|w| w.to_string()).collect();
            let power = if t.doubled_power % 2 == 0 {
                (t.doubled_power / 2).to_string()
            } else {
                format!("{}/2", t.doubled_power)
            };
            rows.push(vec![words.join(" "), power.clone(), format_rational(c)]);
            json!({"words": words, "power": power, "coeff": format_rational(c)})
        })
        .collect();
    Ok(Report::new(json!({
        "left": format!("{wa}{i}"),
        "right": format!("{wb}{j}"),
        "expression": e.to_string(),
        "terms": terms,
    }))
    .with_table(&["words", "power", "coeff"], rows))
}

/// `∫_T^{T+Δ} ξ₀(u) du` by the trapezoid rule on 256 cells.
fn curve_window(curve: &ForwardVarianceCurve, horizon: f64, delta: f64) -> f64 {
    let n = 256;
    let h = delta / n as f64;
    let inner: f64 = (1..n).map(|k| curve.at(horizon + k as f64 * h)).sum();
    h * (inner + 0.5 * (curve.at(horizon) + curve.at(horizon + delta)))
}

pub fn riccati(a: &RiccatiArgs) -> Result<Report> {
    let kernel = match a.kernel {
        KernelKind::Exp => KernelSpec::exponential(
            a.nu,
            a.lambda
                .ok_or_else(|| CliError::Usage("--kernel exp needs --lambda".into()))?,
        )?,
        KernelKind::Power => KernelSpec::power_law(
            a.nu,
            a.alpha
                .ok_or_else(|| CliError::Usage("--kernel power needs --alpha".into()))?,
        )?,
    };
    let setup = AffineSetup::new(kernel, a.rho, a.delta)?;
    let curve = match &a.curve {
        Some(p) => read_forward_curve_file(p)?,
        None => ForwardVarianceCurve::flat(a.xi0)?,
    };
    let zeta = a
        .zeta
        .unwrap_or_else(|| curve_window(&curve, a.horizon, a.delta));
    let sol = solve_riccati(&setup, (a.a, a.b, a.c), a.horizon, a.steps, RiccatiOptions::default())?;
    let log_mgf = mgf_value(&sol, a.x, &curve, zeta, 0.0, a.horizon)?;
    let grid = sol.grid.nodes();
    let rows = grid
        .iter()
        .zip(&sol.g)
        .map(|(t, g)| vec![fmt_f64(*t), fmt_f64(*g)])
        .collect();
    Ok(Report::new(json!({
        "grid": grid,
        "g": sol.g,
        "boundary_value": sol.boundary_value(),
        "kappa_bar_0": kappa_bar(&kernel, 0.0, a.delta),
        "zeta": zeta,
        "log_mgf": log_mgf,
        "mgf": log_mgf.exp(),
        "residual": sol.residual(),
    }))
    .with_table(&["tau", "g"], rows))
}

pub fn mc(a: &McArgs) -> Result<Report> {
    let model = match a.model {
        McModelName::BmDrift => SimModel::BrownianDrift {
            sigma: a.sigma.unwrap_or(1.0),
            mu: a.mu.unwrap_or(0.0),
            a0: a.a0.unwrap_or(0.0),
        },
        McModelName::LevyArea => SimModel::LevyArea,
        McModelName::Besq => SimModel::Besq {
            x0: a.x0.unwrap_or(1.0),
            delta: a.delta.unwrap_or(2.0),
        },
        McModelName::Heston => SimModel::Heston {
            xi0: a.xi0.unwrap_or(0.04),
            nu: a.nu.unwrap_or(0.3),
            lambda: a.lambda.unwrap_or(1.0),
            rho: a.rho.unwrap_or(-0.7),
            delta: a.delta.unwrap_or(0.1),
        },
        McModelName::StoppedBm => SimModel::StoppedBm {
            b0: a.b0.unwrap_or(0.0),
        },
        McModelName::Chaos2 => {
            let path = a
                .kernel
                .as_ref()
                .ok_or_else(|| CliError::Usage("--model chaos2 needs --kernel".into()))?;
            SimModel::Chaos2 {
                kernel: read_chaos_kernel_file(path, Some(a.horizon))?,
            }
        }
    };
    if !(1..=6).contains(&a.orders) {
        return Err(CliError::Usage(format!("--orders must be in 1..=6, got {}", a.orders)));
    }
    let cfg = SimConfig {
        model,
        n_paths: a.paths,
        n_steps: a.steps,
        horizon: a.horizon,
        seed: a.seed,
    };
    let samples = simulate(&cfg)?;
    let column = match &a.column {
        Some(c) => samples.require(c)?,
        None => samples.primary(),
    };
    let est = empirical_cumulants(column, a.orders)?;
    let mut estimates = serde_json::Map::new();
    let mut std_errors = serde_json::Map::new();
    let mut methods = serde_json::Map::new();
    let mut rows = Vec::new();
    for e in &est {
        let key = format!("k{}", e.order);
        estimates.insert(key.clone(), json!(e.value));
        std_errors.insert(key.clone(), json!(e.std_error));
        methods.insert(key, json!(e.method));
        rows.push(vec![
            e.order.to_string(),
            fmt_f64(e.value),
            fmt_f64(e.std_error),
            serde_json::to_value(e.method)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default(),
        ]);
    }
    let mut result = json!({
        "model": cfg.model.name(),
        "columns": samples.names(),
        "column": a.column.clone().unwrap_or_else(|| samples.names()[0].to_string()),
        "estimates": estimates,
        "std_errors": std_errors,
        "methods": methods,
        "diagnostics": samples.diagnostics,
    });
    if a.mgf_a.is_some() || a.mgf_b.is_some() || a.mgf_c.is_some() {
        let abc = (
            a.mgf_a.unwrap_or(0.0),
            a.mgf_b.unwrap_or(0.0),
            a.mgf_c.unwrap_or(0.0),
        );
        let m = empirical_mgf(&samples, abc)?;
        result["mgf"] = json!({
            "value": m.value,
            "std_error": m.std_error,
            "log_value": m.value.ln(),
            "log_std_error": m.std_error / m.value,
            "tail_share": m.tail_share,
            "tail_warning": m.tail_warning,
        });
    }
    Ok(Report::new(result).with_table(&["order", "value", "std_error", "method"], rows))
}
