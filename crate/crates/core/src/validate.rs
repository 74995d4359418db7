//! Oracle suites: Bartels–Stewart against the Kronecker solve and a direct
//! time integration, the two-mode squeezed vacuum family, and the
//! decoupled-system checks.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::linalg;
use crate::lyapunov::{relative_residual, solve_lyapunov, solve_lyapunov_oracle, stability_check};
use crate::measures::{self, Direction, MeasureKind};
use crate::model::{build_drift, DIM};
use crate::params::SystemParams;
use crate::sweep::{self, Evaluation};

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    /// Largest observed error, in the suite's own metric.
    pub worst: f64,
    pub tolerance: f64,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            cases: 0,
            worst: 0.0,
            tolerance,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, case: impl Fn() -> String, err: f64) {
        self.cases += 1;
        if err.is_nan() || err > self.worst {
            self.worst = err;
        }
        if !(err < self.tolerance) {
            self.failures.push(format!("{}: error {err:.3e}", case()));
        }
    }

    fn fail(&mut self, case: String) {
        self.cases += 1;
        self.failures.push(case);
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.cases > 0
    }
}

impl std::fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status} {:<22} {:>4} cases, worst {:.3e} (tol {:.0e})",
            self.name, self.cases, self.worst, self.tolerance
        )?;
        for msg in self.failures.iter().take(5) {
            write!(f, "\n     {msg}")?;
        }
        Ok(())
    }
}

/// `A = 2(S − Sᵀ) − ½BBᵀ − δI` has a negative definite symmetric part, so
/// it is stable; `D = GGᵀ + εI` is positive definite.
pub fn random_stable_system(rng: &mut impl Rng, modes: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = 2 * modes;
    let mut draw = || DMatrix::<f64>::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let s = draw();
    let b = draw();
    let g = draw();
    let a = (&s - s.transpose()) * 2.0 - (&b * b.transpose()) * 0.5 - DMatrix::identity(n, n) * 0.1;
    let d = &g * g.transpose() + DMatrix::identity(n, n) * 0.01;
    (a, d)
}

fn rel_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm()
}

/// Bartels–Stewart vs Kronecker oracle on `count` random systems of 2–10 modes.
pub fn solver_vs_oracle(count: usize, seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("lyapunov-vs-oracle", 1e-8);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..count {
        let modes = 2 + k % 9;
        let (a, d) = random_stable_system(&mut rng, modes);
        match (solve_lyapunov(&a, &d), solve_lyapunov_oracle(&a, &d)) {
            (Ok(v), Ok(w)) => report.record(
                || format!("case {k} ({modes} modes)"),
                rel_diff(v.matrix(), w.matrix()),
            ),
            (v, w) => report.fail(format!(
                "case {k}: solver {:?}, oracle {:?}",
                v.err(),
                w.err()
            )),
        }
    }
    report
}

/// RK4 integration of `dV/dt = AV + VAᵀ + D` from `V = 0` to `t_end`, with
/// the step chosen from the spectral radius of `A`.
pub fn integrate_lyapunov(a: &DMatrix<f64>, d: &DMatrix<f64>, t_end: f64) -> Result<DMatrix<f64>> {
    let radius = linalg::eigenvalues(a)?
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let steps = ((t_end * radius).ceil() as usize).max(1);
    let h = t_end / steps as f64;
    let f = |v: &DMatrix<f64>| a * v + v * a.transpose() + d;
    let mut v = DMatrix::zeros(a.nrows(), a.ncols());
    for _ in 0..steps {
        let k1 = f(&v);
        let k2 = f(&(&v + &k1 * (h / 2.0)));
        let k3 = f(&(&v + &k2 * (h / 2.0)));
        let k4 = f(&(&v + &k3 * h));
        v += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    Ok(v)
}

/// Time integration to `t = 50/|max Re λ|` against the Schur solve.
pub fn ode_oracle(count: usize, seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("lyapunov-vs-ode", 1e-6);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..count {
        let modes = 1 + k % 4;
        let (a, d) = random_stable_system(&mut rng, modes);
        let run = || -> Result<f64> {
            let gate = stability_check(&a)?;
            let v = solve_lyapunov(&a, &d)?;
            let w = integrate_lyapunov(&a, &d, 50.0 / gate.max_real.abs())?;
            Ok(rel_diff(&w, v.matrix()))
        };
        match run() {
            Ok(err) => report.record(|| format!("case {k} ({modes} modes)"), err),
            Err(e) => report.fail(format!("case {k}: {e}")),
        }
    }
    report
}

/// Covariance of a two-mode squeezed vacuum with squeezing `r`.
pub fn tmsv(r: f64) -> DMatrix<f64> {
    let (c, s) = ((2.0 * r).cosh() / 2.0, (2.0 * r).sinh() / 2.0);
    #[rustfmt::skip]
    let v = DMatrix::from_row_slice(4, 4, &[
        c, 0.0, s, 0.0,
        0.0, c, 0.0, -s,
        s, 0.0, c, 0.0,
        0.0, -s, 0.0, c,
    ]);
    v
}

/// E = 2r and 𝒮 = ln cosh 2r for r ∈ {0.1, 0.5, 1.0}.
pub fn tmsv_family() -> SuiteReport {
    let mut report = SuiteReport::new("tmsv-analytic", 1e-10);
    for r in [0.1, 0.5, 1.0] {
        let v = tmsv(r);
        let e = measures::log_negativity(&v).map_or(f64::NAN, |e| (e - 2.0 * r).abs());
        report.record(|| format!("E at r = {r}"), e);
        for dir in [Direction::FirstToSecond, Direction::SecondToFirst] {
            let s = measures::gaussian_steering(&v, dir)
                .map_or(f64::NAN, |s| (s - (2.0 * r).cosh().ln()).abs());
            report.record(|| format!("S {dir:?} at r = {r}"), s);
        }
    }
    report
}

fn decoupled() -> SystemParams {
    SystemParams {
        d_ma: 0.0,
        d_b1b2: 0.0,
        g_m: 0.0,
        g_c: 0.0,
        ..SystemParams::baseline()
    }
}

/// Drift spectrum `{−γ_s ± iΔ_s}` with all couplings off.
pub fn decoupled_spectrum() -> SuiteReport {
    let mut report = SuiteReport::new("decoupled-spectrum", 1e-12);
    let p = decoupled();
    let a = build_drift::<f64>(&p);
    let scale = linalg::max_abs(&a);
    let got = match linalg::eigenvalues(&a) {
        Ok(ev) => ev,
        Err(e) => {
            report.fail(e.to_string());
            return report;
        }
    };
    let expected = [
        (p.gamma_b1, p.omega_b1),
        (p.gamma_b2, p.omega_b2),
        (p.gamma_m, p.magnon_detuning()),
        (p.gamma_c, p.delta_c_tilde),
        (p.gamma_a, p.delta_a),
    ];
    for (g, w) in expected {
        for sign in [1.0, -1.0] {
            let err = got
                .iter()
                .map(|z| (z.re + g).hypot(z.im - sign * w))
                .fold(f64::INFINITY, f64::min)
                / scale;
            report.record(|| format!("eigenvalue −{g:.3e} ± i{w:.3e}"), err);
        }
    }
    if got.len() != DIM {
        report.fail(format!("expected {DIM} eigenvalues, got {}", got.len()));
    }
    report
}

/// With all couplings off every correlation measure vanishes.
pub fn decoupled_measures() -> SuiteReport {
    let mut report = SuiteReport::new("decoupled-measures", 1e-10);
    let kinds = [
        MeasureKind::Entanglement,
        MeasureKind::Steering,
        MeasureKind::Contangle,
    ];
    match sweep::run_point(
        &decoupled(),
        &Evaluation {
            measures: kinds.to_vec(),
            ..Evaluation::default()
        },
    ) {
        Ok(r) => match r.measures {
            Some(m) => {
                for (name, v) in measures::column_names(&kinds)
                    .into_iter()
                    .zip(m.values(&kinds))
                {
                    report.record(|| name.clone(), v.map_or(f64::NAN, f64::abs));
                }
            }
            None => report.fail("decoupled system reported unstable".into()),
        },
        Err(e) => report.fail(e.to_string()),
    }
    report
}

/// Residual and physicality at the reference point.
pub fn baseline_residual() -> SuiteReport {
    let mut report = SuiteReport::new("baseline-residual", 1e-9);
    let p = SystemParams::baseline();
    match sweep::steady_state(&p) {
        Ok(v) => {
            let a = build_drift::<f64>(&p);
            let d = crate::model::build_diffusion::<f64>(&p).expect("baseline diffusion");
            report.record(
                || "relative residual".into(),
                relative_residual(&a, &d, v.matrix()),
            );
        }
        Err(e) => report.fail(e.to_string()),
    }
    report
}

pub fn run_all(seed: u64) -> Vec<SuiteReport> {
    vec![
        solver_vs_oracle(100, seed),
        ode_oracle(10, seed.wrapping_add(1)),
        tmsv_family(),
        decoupled_spectrum(),
        decoupled_measures(),
        baseline_residual(),
    ]
}
