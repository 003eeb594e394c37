//! Named verification suites for `verify`. Each check compares a library
//! result against an independent oracle and reports the gap and tolerance.

use nalgebra::DMatrix;
use num_traits::{Signed, Zero};
use serde::Serialize;
use serde_json::json;

use diamond_forests::affine::{
    mgf_value, solve_riccati, spx_expansion_terms, AffinePoint, AffineSetup,
    ForwardVarianceCurve, KernelSpec, RiccatiOptions,
};
use diamond_forests::expansion::{g_expansion, reorder_through};
use diamond_forests::forest::{rat, rational_to_f64, Poly, Rational};
use diamond_forests::mc::{empirical_cumulants, empirical_mgf, simulate, SimConfig, SimModel};
use diamond_forests::models::bessel::{
    bessel_laplace, bessel_series_log_laplace, BesselSeriesOptions, BesselWeight,
};
use diamond_forests::models::cameron_martin::{cameron_martin_cgf, cameron_martin_cgf_coefficients};
use diamond_forests::models::chaos::{chaos2_cumulants, Chaos2Kernel};
use diamond_forests::models::levy::{levy_alpha, levy_cgf};
use diamond_forests::Error;

use crate::args::{Suite, VerifyArgs};
use crate::output::{fmt_f64, Report};
use crate::Result;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `measured ≤ tolerance`.
    pub fn within(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            tolerance,
            pass: measured <= tolerance,
        }
    }

    pub fn exact(name: impl Into<String>, ok: bool) -> Self {
        Check {
            name: name.into(),
            measured: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            pass: ok,
        }
    }
}

pub fn verify(a: &VerifyArgs) -> Result<Report> {
    let checks = match a.suite {
        Suite::Reorder => reorder(a.order)?,
        Suite::Levy => levy()?,
        Suite::CameronMartin => cameron_martin()?,
        Suite::Bessel => bessel()?,
        Suite::Chaos2 => chaos2()?,
        Suite::HestonRiccati => heston_riccati()?,
        Suite::McCross => mc_cross(a.seed, a.paths)?,
    };
    let passed = checks.iter().all(|c| c.pass);
    let rows = checks
        .iter()
        .map(|c| {
            vec![
                c.name.clone(),
                fmt_f64(c.measured),
                fmt_f64(c.tolerance),
                if c.pass { "PASS" } else { "FAIL" }.to_string(),
            ]
        })
        .collect();
    let mut report = Report::new(json!({
        "suite": a.suite,
        "pass": passed,
        "checks": checks,
    }))
    .with_table(&["check", "measured", "tolerance", "verdict"], rows);
    report.passed = passed;
    Ok(report)
}

fn max_abs_coeff(p: &Poly) -> f64 {
    p.terms()
        .map(|(_, c)| rational_to_f64(&c.abs()))
        .fold(0.0, f64::max)
}

fn reorder(order: usize) -> Result<Vec<Check>> {
    let r = reorder_through(order)?;
    let g = g_expansion(order)?;
    let mut out = Vec::new();
    for n in 2..=order {
        let (fr, fg) = (r.order(n).expect("reordered"), g.order(n).expect("expanded"));
        let mut worst = 0.0f64;
        let mut trees: Vec<_> = fr.terms().map(|(t, _)| t.clone()).collect();
        trees.extend(fg.terms().map(|(t, _)| t.clone()));
        for t in trees {
            worst = worst.max(max_abs_coeff(&(&fr.coefficient(&t) - &fg.coefficient(&t))));
        }
        out.push(Check::within(format!("leaves={n} max coefficient diff"), worst, 0.0));
    }
    Ok(out)
}

/// Taylor coefficients of tan from `t' = 1 + t²`.
pub fn tan_coefficients(n_max: usize) -> Vec<Rational> {
    let mut c = vec![Rational::zero(); n_max + 1];
    for n in 0..n_max {
        let mut s = if n == 0 { rat(1, 1) } else { Rational::zero() };
        for i in 0..=n {
            s += &c[i] * &c[n - i];
        }
        c[n + 1] = s / rat(n as i64 + 1, 1);
    }
    c
}

fn levy() -> Result<Vec<Check>> {
    let alpha = levy_alpha(12)?;
    let tan = tan_coefficients(11);
    // −log cos T = Σ tan_{n−1} Tⁿ/n, so αₙ = tan_{n−1}.
    let exact = (2..=12).all(|n| alpha[&n] == tan[n - 1]);
    let partial = levy_cgf(0.5, 20)?;
    let closed = -(0.5f64).cos().ln();
    let domain = matches!(levy_cgf(std::f64::consts::FRAC_PI_2, 20), Err(Error::Domain(_)));
    Ok(vec![
        Check::exact("alpha_2..12 = tan Taylor coefficients", exact),
        Check::within("|cgf(0.5, 20) + log cos 0.5|", (partial - closed).abs(), 1e-8),
        Check::exact("T = π/2 refused", domain),
    ])
}

/// Taylor coefficients of `−½ log cosh √(2λ)` in λ via `n lₙ = n cₙ − Σ k l_k c_{n−k}`.
pub fn cosh_cgf_coefficients(n_max: usize) -> Vec<Rational> {
    // cosh √(2λ) = Σ (2λ)^k/(2k)!
    let mut c = vec![rat(1, 1)];
    let mut fact = Rational::from_integer(1.into());
    for k in 1..=n_max {
        fact = fact * rat((2 * k - 1) as i64, 1) * rat(2 * k as i64, 1);
        c.push(rat(2, 1).pow(k as i32) / &fact);
    }
    let mut l = vec![Rational::zero(); n_max + 1];
    for n in 1..=n_max {
        let mut s = &c[n] * rat(n as i64, 1);
        for k in 1..n {
            s -= &l[k] * &c[n - k] * rat(k as i64, 1);
        }
        l[n] = s / rat(n as i64, 1);
    }
    l.into_iter().map(|v| v * rat(-1, 2)).collect()
}

fn cameron_martin() -> Result<Vec<Check>> {
    let got = cameron_martin_cgf_coefficients(10)?;
    let want = cosh_cgf_coefficients(10);
    let exact = (1..=10).all(|n| got[&n] == want[n]);
    let first = got[&1].abs() == rat(1, 2) && got[&2].abs() == rat(1, 6) && got[&3].abs() == rat(4, 45);
    let closed = -0.5 * (1.0f64).sqrt().cosh().ln();
    Ok(vec![
        Check::exact("coefficients 1..10 = series of −½ log cosh √(2λ)", exact),
        Check::exact("|c1|, |c2|, |c3| = 1/2, 1/6, 4/45", first),
        Check::within(
            "|cgf(0.5, 40) − closed form|",
            (cameron_martin_cgf(0.5, 40)? - closed).abs(),
            1e-10,
        ),
    ])
}

fn bessel() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for lambda in [0.1, 0.5] {
        for delta in [0.0, 1.0, 2.0] {
            let closed = bessel_laplace(1.0, delta, lambda, 1.0)?;
            let series = bessel_series_log_laplace(
                &BesselWeight::TerminalDirac,
                1.0,
                delta,
                lambda,
                0.0,
                1.0,
                BesselSeriesOptions::default(),
            )?
            .exp();
            out.push(Check::within(
                format!("λ={lambda} δ={delta}: |series − closed form|"),
                (series - closed).abs(),
                1e-8,
            ));
        }
    }
    Ok(out)
}

/// Exact cumulants of `Σ_{i<j} F_ij ΔB_i ΔB_j`: `2^{n−1}(n−1)! tr(Gⁿ)` with `G = ½(F+Fᵀ)h`.
pub fn chaos2_trace_cumulants(k: &Chaos2Kernel, n_max: usize) -> Vec<f64> {
    let f = k.matrix();
    let g: DMatrix<f64> = (f + f.transpose()) * (0.5 * k.step());
    let mut p = g.clone();
    let mut out = vec![0.0];
    let mut fact = 1.0;
    for n in 2..=n_max {
        p = &p * &g;
        fact *= (n - 1) as f64;
        out.push(2f64.powi(n as i32 - 1) * fact * p.trace());
    }
    out
}

fn chaos2() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let grids = [64usize, 128, 256];
    let per_grid: Vec<Vec<f64>> = grids
        .iter()
        .map(|&m| chaos2_cumulants(&Chaos2Kernel::from_fn(1.0, m, |_, _| 1.0)?, 4))
        .collect::<std::result::Result<_, _>>()?;
    for (idx, want) in [(1usize, 0.5), (2, 1.0), (3, 3.0)] {
        let e: Vec<f64> = per_grid.iter().map(|c| (c[idx] - want).abs()).collect();
        let slope = (e[1] / e[2]).log2();
        out.push(Check::within(
            format!("κ{} grid slope |slope − 1|", idx + 1),
            (slope - 1.0).abs(),
            0.3,
        ));
        let rich = 2.0 * per_grid[2][idx] - per_grid[1][idx];
        out.push(Check::within(
            format!("κ{} Richardson limit vs {want}", idx + 1),
            (rich - want).abs(),
            e[2],
        ));
    }
    let k = Chaos2Kernel::from_fn(1.0, 128, |w, v| 1.0 + w - 0.5 * v * v)?;
    let rec = chaos2_cumulants(&k, 3)?;
    let tr = chaos2_trace_cumulants(&k, 3);
    out.push(Check::within("κ2 vs trace oracle", (rec[1] - tr[1]).abs(), 1e-12));
    Ok(out)
}

/// Classical Heston oracle: `y = cκ̄ + κ⋆g` solves `y' = ν g − λ y`, `g = C + ½(ρa + y)²`.
pub fn heston_ode(
    nu: f64,
    lambda: f64,
    rho: f64,
    (a, b, c): (f64, f64, f64),
    delta: f64,
    horizon: f64,
    steps: usize,
) -> Vec<f64> {
    let konst = b - 0.5 * a + 0.5 * (1.0 - rho * rho) * a * a;
    let g = |y: f64| konst + 0.5 * (rho * a + y).powi(2);
    let rhs = |y: f64| nu * g(y) - lambda * y;
    let h = horizon / steps as f64;
    let mut y = c * nu / lambda * -(-lambda * delta).exp_m1();
    let mut out = Vec::with_capacity(steps + 1);
    for _ in 0..=steps {
        out.push(g(y));
        let k1 = rhs(y);
        let k2 = rhs(y + 0.5 * h * k1);
        let k3 = rhs(y + 0.5 * h * k2);
        let k4 = rhs(y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    out
}

fn heston_riccati() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let (nu, lambda, rho, delta) = (0.3, 1.0, -0.7, 0.1);
    let setup = AffineSetup::new(KernelSpec::exponential(nu, lambda)?, rho, delta)?;
    let n = 1 << 12;
    for abc in [(0.25, 0.1, 0.0), (0.25, 0.1, 0.2)] {
        let sol = solve_riccati(&setup, abc, 1.0, n, RiccatiOptions::default())?;
        let ode = heston_ode(nu, lambda, rho, abc, delta, 1.0, n);
        let gap = sol.g.iter().zip(&ode).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        out.push(Check::within(format!("(a,b,c)={abc:?}: sup |g − ODE|"), gap, 1e-6));
    }
    for alpha in [0.6, 0.75] {
        let s = AffineSetup::new(KernelSpec::power_law(nu, alpha)?, rho, delta)?;
        let sol = solve_riccati(&s, (0.25, 0.1, 0.1), 1.0, 1024, RiccatiOptions::default())?;
        out.push(Check::within(format!("α={alpha}: residual"), sol.residual(), 1e-11));
    }
    for alpha in [0.6, 0.75] {
        let s = AffineSetup::new(KernelSpec::power_law(nu, alpha)?, rho, delta)?;
        let at = |tau: f64| -> Result<Vec<f64>> {
            let point = AffinePoint {
                curve: ForwardVarianceCurve::flat(0.04)?,
                t: 0.0,
                horizon: tau,
                x_t: 0.0,
                zeta_t: 0.0,
            };
            Ok(spx_expansion_terms(4, &s, &point, (0.25, 0.1, 0.0), 256)?)
        };
        let taus = [0.05, 0.1, 0.2];
        let terms: Vec<Vec<f64>> = taus.iter().map(|&tau| at(tau)).collect::<Result<_>>()?;
        for k in [3usize, 4] {
            let v: Vec<f64> = terms.iter().map(|t| t[k - 2]).collect();
            let slope = log_log_slope(&taus, &v);
            let want = 1.0 + (k as f64 - 2.0) * alpha;
            out.push(Check::within(
                format!("α={alpha}: 𝔾{k} scaling slope vs {want}"),
                (slope - want).abs() / want,
                0.02,
            ));
        }
    }
    Ok(out)
}

/// Least-squares slope of `log|v|` against `log x`.
fn log_log_slope(x: &[f64], v: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|x| x.ln()).collect();
    let lv: Vec<f64> = v.iter().map(|v| v.abs().ln()).collect();
    let n = x.len() as f64;
    let (mx, mv) = (lx.iter().sum::<f64>() / n, lv.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&lv).map(|(a, b)| (a - mx) * (b - mv)).sum();
    cov / lx.iter().map(|a| (a - mx).powi(2)).sum::<f64>()
}

fn three_se(name: &str, est: f64, se: f64, want: f64) -> Check {
    Check::within(format!("{name} (3 SE)"), (est - want).abs(), 3.0 * se)
}

fn mc_cross(seed: u64, paths: usize) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let cfg = |model, steps, horizon| SimConfig {
        model,
        n_paths: paths,
        n_steps: steps,
        horizon,
        seed,
    };

    let s = simulate(&cfg(
        SimModel::BrownianDrift {
            sigma: 0.5,
            mu: 0.2,
            a0: 0.0,
        },
        1,
        1.0,
    ))?;
    let e = empirical_cumulants(s.primary(), 3)?;
    out.push(three_se("bm-drift κ1", e[0].value, e[0].std_error, 0.2));
    out.push(three_se("bm-drift κ2", e[1].value, e[1].std_error, 0.25));

    let s = simulate(&cfg(SimModel::LevyArea, 1000, 1.0))?;
    let e = empirical_cumulants(s.primary(), 2)?;
    out.push(three_se("levy-area κ2", e[1].value, e[1].std_error, 1.0));

    let s = simulate(&cfg(SimModel::Besq { x0: 1.0, delta: 2.0 }, 1, 1.0))?;
    let m = empirical_mgf(&s, (-0.5, 0.0, 0.0))?;
    out.push(three_se(
        "besq E exp(−½X₁)",
        m.value,
        m.std_error,
        bessel_laplace(1.0, 2.0, 0.5, 1.0)?,
    ));

    let setup = AffineSetup::new(KernelSpec::exponential(0.3, 1.0)?, -0.7, 0.1)?;
    let abc = (0.25, 0.1, 0.0);
    let sol = solve_riccati(&setup, abc, 1.0, 1024, RiccatiOptions::default())?;
    let curve = ForwardVarianceCurve::flat(0.04)?;
    let exact = mgf_value(&sol, 0.0, &curve, 0.004, 0.0, 1.0)?;
    let s = simulate(&cfg(
        SimModel::Heston {
            xi0: 0.04,
            nu: 0.3,
            lambda: 1.0,
            rho: -0.7,
            delta: 0.1,
        },
        200,
        1.0,
    ))?;
    let m = empirical_mgf(&s, abc)?;
    out.push(three_se("heston log MGF", m.value.ln(), m.std_error / m.value, exact));

    let k = Chaos2Kernel::from_fn(1.0, 32, |w, v| 1.0 + w - v)?;
    let tr = chaos2_trace_cumulants(&k, 3);
    let s = simulate(&cfg(SimModel::Chaos2 { kernel: k }, 32, 1.0))?;
    let e = empirical_cumulants(s.primary(), 3)?;
    out.push(three_se("chaos2 κ2", e[1].value, e[1].std_error, tr[1]));
    out.push(three_se("chaos2 κ3", e[2].value, e[2].std_error, tr[2]));
    Ok(out)
}
