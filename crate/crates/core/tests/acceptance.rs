//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_UNATTAINABLE` are evaluated exactly like the
//! others and print FAIL; the run only exits nonzero when some other
//! criterion fails or when a listed one starts passing.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use magnocorr::lyapunov::relative_residual;
use magnocorr::measures::{self, MeasureKind};
use magnocorr::model::{build_diffusion, build_drift};
use magnocorr::sweep::{self, Cell, Evaluation, SweepSpec};
use magnocorr::validate;
use magnocorr::{run_point, MeasureReport, MeasureSet, Mode, SystemParams};

/// The feedback ordering needs 𝓛 = 0.9 at Θ = 0, where the feedback-damped
/// optical rate γ_c(1 − 2𝓛) is negative and the drift is unstable.
const KNOWN_UNATTAINABLE: &[usize] = &[5];

const WB1: f64 = 20.15e6;

type Criterion = (&'static str, Box<dyn FnOnce() -> Outcome>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    o.detail = format!("{} [{:.2} s]", o.detail, took.as_secs_f64());
    if let Some(limit) = limit {
        if took > limit {
            o.pass = false;
            o.detail += &format!(" exceeds {} s", limit.as_secs_f64());
        }
    }
    o
}

fn point(p: &SystemParams) -> Result<MeasureReport, String> {
    run_point(p, &Evaluation::default()).map_err(|e| e.to_string())
}

fn measures_at(p: &SystemParams) -> Result<MeasureSet, String> {
    let r = point(p)?;
    r.measures
        .ok_or_else(|| format!("unstable (max Re λ = {:.3e} rad/s)", r.max_real))
}

fn at_zero_kelvin() -> SystemParams {
    SystemParams {
        temperature: 0.0,
        ..SystemParams::baseline()
    }
}

fn ground_state_cooling() -> Outcome {
    match measures_at(&SystemParams::baseline()) {
        Ok(m) => {
            let (n1, n2) = (m.phonons(Mode::B1).unwrap(), m.phonons(Mode::B2).unwrap());
            let pass = (n1 - 0.11).abs() <= 0.05 && (n2 - 0.08).abs() <= 0.05;
            outcome(
                pass,
                format!("n_b1 = {n1:.4} (0.11 ± 0.05), n_b2 = {n2:.4} (0.08 ± 0.05)"),
            )
        }
        Err(e) => outcome(false, e),
    }
}

fn baseline_entanglement() -> Outcome {
    match measures_at(&at_zero_kelvin()) {
        Ok(m) => {
            let e = m.entanglement(Mode::C, Mode::A).unwrap();
            let (s_ca, s_ac) = (
                m.steering(Mode::C, Mode::A).unwrap(),
                m.steering(Mode::A, Mode::C).unwrap(),
            );
            let pass = (0.05..=0.20).contains(&e) && s_ca == 0.0 && s_ac == 0.0;
            outcome(
                pass,
                format!("E_ca = {e:.4} in [0.05, 0.20], S_c→a = {s_ca}, S_a→c = {s_ac}"),
            )
        }
        Err(e) => outcome(false, e),
    }
}

fn zero_coupling_null() -> Outcome {
    let p = SystemParams {
        d_ma: 0.0,
        d_b1b2: 0.0,
        g_m: 0.0,
        g_c: 0.0,
        ..SystemParams::baseline()
    };
    let kinds = [
        MeasureKind::Entanglement,
        MeasureKind::Steering,
        MeasureKind::Contangle,
    ];
    match measures_at(&p) {
        Ok(m) => {
            let worst = m
                .values(&kinds)
                .into_iter()
                .map(|v| v.map_or(f64::NAN, f64::abs))
                .fold(0.0, f64::max);
            outcome(
                worst < 1e-10,
                format!(
                    "max |E|, |S|, |R| = {worst:.3e} over {} values",
                    m.values(&kinds).len()
                ),
            )
        }
        Err(e) => outcome(false, e),
    }
}

fn structural_zeros() -> Outcome {
    let grid = sweep::preset("fig2").unwrap().spec().unwrap();
    let start = Instant::now();
    let table = sweep::run_sweep(&grid, 1).unwrap();
    let grid_time = start.elapsed();
    let e_b1c = table.numbers("E_b1_c").unwrap();
    let stable = e_b1c.iter().filter(|v| v.is_some()).count();
    let worst_b1c = e_b1c.iter().flatten().fold(0.0f64, |a, b| a.max(*b));

    // The temperature scan at 𝓛 = Δ̂_B = 0, whose discussion states E_mc = 0.
    let scan = sweep::preset("fig8").unwrap().spec().unwrap();
    let e_mc = sweep::run_sweep(&scan, 1)
        .unwrap()
        .numbers("E_m_c")
        .unwrap();
    let worst_mc = e_mc.iter().flatten().fold(0.0f64, |a, b| a.max(*b));
    let mc_points = e_mc.iter().flatten().count();

    let pass = stable > 0
        && worst_b1c == 0.0
        && mc_points == e_mc.len()
        && worst_mc == 0.0
        && grid_time.as_secs_f64() < 30.0;
    outcome(
        pass,
        format!(
            "max E_b1c = {worst_b1c:.3e} on {stable}/{} stable grid points ({:.2} s grid), max E_mc = {worst_mc:.3e} on {mc_points} scan points",
            e_b1c.len(),
            grid_time.as_secs_f64()
        ),
    )
}

fn feedback_ordering() -> Outcome {
    let e_ca = |l: f64, b: f64| {
        let p = SystemParams {
            reflectivity: l,
            barnett_shift: b * 2.0 * std::f64::consts::PI * WB1,
            ..at_zero_kelvin()
        };
        measures_at(&p).map(|m| m.entanglement(Mode::C, Mode::A).unwrap())
    };
    let (both, fb, none) = (e_ca(0.9, 0.2), e_ca(0.9, 0.0), e_ca(0.0, 0.0));
    let show = |r: &Result<f64, String>| match r {
        Ok(v) => format!("{v:.4}"),
        Err(e) => e.clone(),
    };
    let detail = format!(
        "E_ca(0.9, 0.2) = {}; E_ca(0.9, 0) = {}; E_ca(0, 0) = {}",
        show(&both),
        show(&fb),
        show(&none)
    );
    match (both, fb, none) {
        (Ok(a), Ok(b), Ok(c)) => outcome(a > b && b > c && a > 1.0, detail),
        _ => outcome(false, detail),
    }
}

fn temperature_monotonicity() -> Outcome {
    let temps = [0.0, 0.05, 0.1, 0.2, 0.5];
    let sets: Result<Vec<_>, _> = temps
        .iter()
        .map(|&t| {
            measures_at(&SystemParams {
                temperature: t,
                ..SystemParams::baseline()
            })
        })
        .collect();
    let sets = match sets {
        Ok(s) => s,
        Err(e) => return outcome(false, e),
    };
    let mut checked = Vec::new();
    let mut broken = Vec::new();
    for (a, b) in measures::pairs() {
        let series: Vec<f64> = sets.iter().map(|m| m.entanglement(a, b).unwrap()).collect();
        if series[0] == 0.0 {
            continue;
        }
        checked.push(format!("{a}{b}"));
        if series.windows(2).any(|w| w[1] > w[0] + 1e-6) {
            broken.push(format!("{a}{b} {series:.4?}"));
        }
    }
    let pass = !checked.is_empty() && broken.is_empty();
    outcome(
        pass,
        format!(
            "non-increasing over {temps:?} K for {}; violations: {broken:?}",
            checked.join(" ")
        ),
    )
}

fn contrast_columns(table: &magnocorr::ResultTable) -> Vec<f64> {
    let cols: Vec<_> = table
        .columns
        .iter()
        .filter(|c| c.starts_with("C_"))
        .cloned()
        .collect();
    cols.iter()
        .flat_map(|c| table.numbers(c).unwrap().into_iter().flatten())
        .collect()
}

fn nonreciprocity_contract() -> Outcome {
    let scan = |barnett: f64| {
        let mut base = at_zero_kelvin();
        base.barnett_shift = barnett * 2.0 * std::f64::consts::PI * WB1;
        let mut spec = SweepSpec::new(base)
            .with_axis("delta_m_tilde", -2.0 * WB1, 2.0 * WB1, 81)
            .unwrap();
        spec.nonreciprocity = true;
        spec.eval.measures = vec![MeasureKind::Entanglement, MeasureKind::Contangle];
        sweep::run_sweep(&spec, 4).unwrap()
    };
    let off = contrast_columns(&scan(0.0));
    let on_table = scan(0.2);
    let mut best = (0.0, String::new());
    for c in on_table.columns.iter().filter(|c| c.starts_with("C_E_")) {
        for (k, v) in on_table.numbers(c).unwrap().into_iter().enumerate() {
            if let Some(v) = v.filter(|v| *v > best.0) {
                let dm = match on_table.rows[k][0] {
                    Cell::Num(x) => x / WB1,
                    _ => f64::NAN,
                };
                best = (v, format!("{c} at Δ̃_m = {dm:.2} ω_b1"));
            }
        }
    }
    let off_max = off.iter().fold(0.0f64, |a, b| a.max(*b));
    let pass = !off.is_empty() && off.iter().all(|v| *v == 0.0) && best.0 > 0.5;
    outcome(
        pass,
        format!(
            "Δ̂_B = 0: max C = {off_max} over {} values; Δ̂_B = 0.2ω_b1: max pair C = {:.3} ({})",
            off.len(),
            best.0,
            best.1
        ),
    )
}

fn solver_verification(preset_points: &[(SystemParams, &'static str)]) -> Outcome {
    let oracle = validate::solver_vs_oracle(100, 2024);
    let ode = validate::ode_oracle(10, 2025);
    let mut solves = 0;
    let mut worst = 0.0f64;
    for (p, _) in preset_points {
        if let Ok(v) = sweep::steady_state(p) {
            let a = build_drift::<f64>(p);
            let d = build_diffusion::<f64>(p).unwrap();
            worst = worst.max(relative_residual(&a, &d, v.matrix()));
            solves += 1;
        }
    }
    let pass = oracle.passed() && ode.passed() && solves > 0 && worst < 1e-9;
    outcome(
        pass,
        format!(
            "oracle worst {:.2e} on {} systems; ODE worst {:.2e} on {}; residual worst {worst:.2e} on {solves} physical preset solves",
            oracle.worst, oracle.cases, ode.worst, ode.cases
        ),
    )
}

fn analytic_oracles() -> Outcome {
    let tmsv = validate::tmsv_family();
    let mut reports = 0;
    let mut violations = BTreeMap::new();
    for preset in sweep::presets() {
        let spec = preset.spec().unwrap();
        for point in sweep::run_sweep_points(&spec, 8).unwrap() {
            for r in point.outcomes.iter().flatten() {
                if let Some(m) = &r.measures {
                    reports += 1;
                    for pair in m.hierarchy_violations() {
                        *violations.entry((preset.name, pair)).or_insert(0) += 1;
                    }
                }
            }
        }
    }
    let pass = tmsv.passed() && reports > 0 && violations.is_empty();
    outcome(
        pass,
        format!("TMSV worst {:.2e} on {} checks; hierarchy held on {reports} preset reports, violations {violations:?}", tmsv.worst, tmsv.cases),
    )
}

fn determinism() -> Outcome {
    let mut differing = Vec::new();
    let mut bytes = 0;
    for preset in sweep::presets() {
        let spec = preset.spec().unwrap();
        let csv = |workers| {
            let mut buf = Vec::new();
            sweep::emit(
                &sweep::run_sweep(&spec, workers).unwrap(),
                sweep::Format::Csv,
                &mut buf,
            )
            .unwrap();
            buf
        };
        let (one, eight) = (csv(1), csv(8));
        bytes += one.len();
        if one != eight {
            differing.push(preset.name);
        }
    }
    outcome(
        differing.is_empty(),
        format!(
            "{} presets, {bytes} CSV bytes, differing: {differing:?}",
            sweep::presets().len()
        ),
    )
}

fn preset_points() -> Vec<(SystemParams, &'static str)> {
    let mut out = Vec::new();
    for preset in sweep::presets() {
        let spec = preset.spec().unwrap();
        for k in 0..spec.len() {
            out.push((spec.params_at(&spec.coordinates(k)).unwrap(), preset.name));
        }
    }
    out
}

fn main() {
    let second = Some(Duration::from_secs(1));
    let criteria: Vec<Criterion> = vec![
        (
            "ground-state cooling",
            Box::new(move || timed(second, ground_state_cooling)),
        ),
        (
            "baseline entanglement point",
            Box::new(move || timed(second, baseline_entanglement)),
        ),
        (
            "zero-coupling null",
            Box::new(move || timed(second, zero_coupling_null)),
        ),
        (
            "structural zeros",
            Box::new(|| timed(None, structural_zeros)),
        ),
        (
            "feedback/Barnett ordering",
            Box::new(|| timed(None, feedback_ordering)),
        ),
        (
            "monotonicity in temperature",
            Box::new(|| timed(None, temperature_monotonicity)),
        ),
        (
            "nonreciprocity contract",
            Box::new(|| timed(None, nonreciprocity_contract)),
        ),
        (
            "solver verification",
            Box::new(|| {
                let points = preset_points();
                timed(Some(Duration::from_secs(60)), || {
                    solver_verification(&points)
                })
            }),
        ),
        (
            "analytic measure oracles",
            Box::new(|| timed(None, analytic_oracles)),
        ),
        ("determinism", Box::new(|| timed(None, determinism))),
    ];

    let mut unexpected = Vec::new();
    for (n, (name, run)) in criteria.into_iter().enumerate() {
        let n = n + 1;
        let o = run();
        let known = KNOWN_UNATTAINABLE.contains(&n);
        let status = match (o.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known unattainable)",
            (false, false) => "FAIL",
        };
        println!("criterion {n:>2} {status}: {name}: {}", o.detail);
        if o.pass == known {
            unexpected.push(n);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected acceptance results for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
