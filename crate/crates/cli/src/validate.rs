//! Invariant suites behind `specpot validate`.

use serde::Serialize;

use specpot::basis::BasisSpec;
use specpot::cdh::{eval_recursion, orthogonality_residual, PolyParams, Regime};
use specpot::hamiltonian::build_sigma;
use specpot::kinetic::{kinetic_matrix, t_oracle_matrix};
use specpot::lagint::{IntegralKey, Sign};
use specpot::linalg::SymMatrix;
use specpot::presets::{linspace, Preset};
use specpot::reconstruct::reconstruct_from_matrix;

use crate::config::{quad_order, RunConfig};
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub item: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
}

impl Summary {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

struct Collector {
    checks: Vec<Check>,
}

impl Collector {
    fn push(&mut self, suite: &'static str, item: String, residual: f64, tolerance: f64) {
        let pass = residual <= tolerance;
        self.checks.push(Check {
            suite,
            item,
            residual,
            tolerance,
            pass,
        });
    }
}

fn sigma(p: &PolyParams, order: usize, perturb: f64) -> Result<SymMatrix, CliError> {
    let mut s = build_sigma(p, order)?;
    if perturb != 0.0 {
        s.set(0, 0, s.get(0, 0) + perturb);
    }
    Ok(s)
}

/// `Σ·p⃗(s) = s·p⃗(s)` on every row whose stencil fits inside the truncation.
fn recursion(
    c: &mut Collector,
    p: &PolyParams,
    order: usize,
    perturb: f64,
) -> Result<(), CliError> {
    let order = order.clamp(3, 30);
    let sig = sigma(p, order, perturb)?;
    for s in [0.3, 1.7, 5.0, 12.0] {
        let v = eval_recursion(p, order - 1, s)?;
        let mut worst: f64 = 0.0;
        for i in 0..order - 1 {
            let lo = i.saturating_sub(1);
            let lhs: f64 = (lo..=i + 1).map(|j| sig.get(i, j) * v[j]).sum();
            let scale: f64 = (lo..=i + 1)
                .map(|j| (sig.get(i, j) * v[j]).abs())
                .sum::<f64>()
                + (s * v[i]).abs();
            worst = worst.max((lhs - s * v[i]).abs() / scale);
        }
        c.push("recursion", format!("s={s}"), worst, 1e-10);
    }
    Ok(())
}

fn orthogonality(c: &mut Collector, p: &PolyParams) -> Result<(), CliError> {
    let order = quad_order(24)?;
    let tol = match p.regime() {
        Regime::Mixed => 1e-8,
        Regime::Continuous => 1e-10,
    };
    for n in 0..=6 {
        for m in 0..=n {
            let r = orthogonality_residual(p, n, m, order)?;
            c.push("orthogonality", format!("n={n} m={m}"), r, tol);
        }
    }
    Ok(())
}

fn integrals(c: &mut Collector, spec: &BasisSpec) -> Result<(), CliError> {
    let order = quad_order(40)?;
    let mut taus = vec![0.0, 0.5, 1.0];
    if let Some(t) = spec.tau() {
        if !taus.contains(&t) {
            taus.push(t);
        }
    }
    for k in 0..=2usize {
        if !(spec.nu > k as f64 - 1.0) {
            continue;
        }
        for &tau in &taus {
            let key = IntegralKey::new(Sign::Minus, k, tau, spec.nu)?;
            let mut vals = Vec::new();
            for n in 0..=4 {
                for m in 0..=4 {
                    vals.push((key.evaluate(n, m)?, key.oracle(n, m, order)?));
                }
            }
            let top = vals.iter().map(|v| v.0.abs()).fold(0.0, f64::max);
            let worst = vals
                .iter()
                .map(|&(a, o)| {
                    if a == 0.0 {
                        o.abs() / top
                    } else {
                        ((a - o) / a).abs()
                    }
                })
                .fold(0.0, f64::max);
            c.push(
                "integrals",
                format!("nu={} k={k} tau={tau}", spec.nu),
                worst,
                1e-8,
            );
        }
    }
    Ok(())
}

fn kinetic(c: &mut Collector, spec: &BasisSpec) -> Result<(), CliError> {
    let size = 7;
    let a = kinetic_matrix(spec, size)?;
    let o = t_oracle_matrix(spec, size, quad_order(40)?)?;
    let top = a.entries().iter().map(|v| v.abs()).fold(0.0, f64::max);
    for n in 0..size {
        for m in n..size {
            let (x, y) = (a.get(n, m), o.get(n, m));
            let r = if x.abs() <= 1e-12 * top {
                y.abs() / top
            } else {
                ((x - y) / x).abs()
            };
            c.push("kinetic", format!("{} n={n} m={m}", spec.case), r, 1e-7);
        }
    }
    Ok(())
}

/// Morse column exactness and the closed-form round trip, using `Σ` with the
/// optional perturbation.
fn morse(c: &mut Collector, perturb: f64) -> Result<(), CliError> {
    let pre = Preset::by_name("fig4")?;
    let p = pre.poly_params()?;
    let spec = pre.basis_spec()?;
    let order = 100;
    let h = sigma(&p, order, perturb)?.scaled(0.5 * p.lambda * p.lambda);
    let v = h.sub(&kinetic_matrix(&spec, order)?)?;
    let col = v.column(0);
    let top = col.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let tail = col[3..].iter().map(|x| x.abs()).fold(0.0, f64::max);
    c.push("morse", "column tail m>=3".into(), tail / top, 1e-12);

    let xs = linspace(-5.0, 2.0, 400);
    let curve = reconstruct_from_matrix(&p, &spec, &v, 0, &xs)?;
    let a = pre.mu - 0.5;
    let l = p.lambda;
    let err = xs
        .iter()
        .zip(&curve.vs)
        .map(|(&x, v)| (v - 0.5 * l * l * (0.25 * (2.0 * l * x).exp() + a * (l * x).exp())).abs())
        .fold(0.0, f64::max);
    c.push("morse", "round trip on [-5, 2]".into(), err, 1e-8);
    Ok(())
}

/// Suites for each configuration; the Morse suite runs once.
pub fn run(cfgs: &[RunConfig], perturb: f64) -> Result<Summary, CliError> {
    let mut c = Collector { checks: Vec::new() };
    for cfg in cfgs {
        let p = cfg.params()?;
        let spec = cfg.basis()?;
        let start = c.checks.len();
        recursion(&mut c, &p, cfg.nmax, perturb)?;
        orthogonality(&mut c, &p)?;
        integrals(&mut c, &spec)?;
        kinetic(&mut c, &spec)?;
        if cfgs.len() > 1 {
            let tag = cfg.preset.clone().unwrap_or_else(|| cfg.case.to_string());
            for k in &mut c.checks[start..] {
                k.item = format!("{tag} {}", k.item);
            }
        }
    }
    morse(&mut c, perturb)?;
    let failed = c.checks.iter().filter(|k| !k.pass).count();
    Ok(Summary {
        passed: c.checks.len() - failed,
        failed,
        checks: c.checks,
    })
}

/// One line per suite, or one per check when `verbose`.
pub fn render(summary: &Summary, verbose: bool) -> String {
    let mut out = String::new();
    if verbose {
        out.push_str(&format!(
            "{:<14} {:<34} {:>12} {:>9}  status\n",
            "suite", "item", "residual", "tol"
        ));
        for k in &summary.checks {
            out.push_str(&format!(
                "{:<14} {:<34} {:>12.3e} {:>9.0e}  {}\n",
                k.suite,
                k.item,
                k.residual,
                k.tolerance,
                if k.pass { "PASS" } else { "FAIL" }
            ));
        }
    } else {
        let mut suites: Vec<&str> = Vec::new();
        for k in &summary.checks {
            if !suites.contains(&k.suite) {
                suites.push(k.suite);
            }
        }
        for s in suites {
            let (n, bad, worst) = summary
                .checks
                .iter()
                .filter(|k| k.suite == s)
                .fold((0, 0, 0.0f64), |(n, bad, w), k| {
                    (n + 1, bad + !k.pass as usize, w.max(k.residual))
                });
            out.push_str(&format!(
                "{} {s}: {n} checks, max residual {worst:.3e}\n",
                if bad == 0 { "PASS" } else { "FAIL" }
            ));
        }
    }
    out.push_str(&format!(
        "{} passed, {} failed\n",
        summary.passed, summary.failed
    ));
    out
}
