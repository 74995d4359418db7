use magnocorr::lyapunov::{relative_residual, solve_lyapunov};
use magnocorr::mean_field::{amplitudes_once, bare_detunings, solve_self_consistent};
use magnocorr::measures::{self, contrast_ratio, gaussian_steering, log_negativity, Direction};
use magnocorr::model::{build_diffusion, build_drift, feedback_rates};
use magnocorr::params::{hz, DriveParams};
use magnocorr::validate::random_stable_system;
use magnocorr::{Covariance, MeasureKind, MeasureSet, SystemParams};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const WB: f64 = 20.15e6;

prop_compose! {
    fn system()(
        dm in -2.0..2.0f64,
        dc in -2.0..2.0f64,
        dma in 0.0..3e6f64,
        db in 0.0..3e6f64,
        gm in 0.0..1e6f64,
        gc in 0.0..3e6f64,
        barnett in -0.3..0.3f64,
        l in 0.0..0.95f64,
        theta in -3.1..3.1f64,
        t in 0.0..1.0f64,
    ) -> SystemParams {
        let mut p = SystemParams::baseline();
        for (name, v) in [("delta_m_tilde", dm * WB), ("delta_c_tilde", dc * WB), ("D_ma", dma), ("D_b1b2", db), ("G_m", gm), ("G_c", gc), ("barnett_shift", barnett * WB)] {
            p.set(name, v).unwrap();
        }
        p.reflectivity = l;
        p.theta = theta;
        p.temperature = t;
        p
    }
}

fn rotation(n: usize, mode: usize, phi: f64) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * n, 2 * n);
    let (c, si) = (phi.cos(), phi.sin());
    let k = 2 * mode;
    s[(k, k)] = c;
    s[(k, k + 1)] = si;
    s[(k + 1, k)] = -si;
    s[(k + 1, k + 1)] = c;
    s
}

fn squeezer(r1: f64, r2: f64) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        r1.exp(),
        (-r1).exp(),
        r2.exp(),
        (-r2).exp(),
    ]))
}

fn two_mode_squeezer(r: f64) -> DMatrix<f64> {
    let (c, s) = (r.cosh(), r.sinh());
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        c, 0.0, s, 0.0,
        0.0, c, 0.0, -s,
        s, 0.0, c, 0.0,
        0.0, -s, 0.0, c,
    ]);
    m
}

fn beam_splitter(t: f64) -> DMatrix<f64> {
    let (c, s) = (t.cos(), t.sin());
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        c, 0.0, s, 0.0,
        0.0, c, 0.0, s,
        -s, 0.0, c, 0.0,
        0.0, -s, 0.0, c,
    ]);
    m
}

prop_compose! {
    /// `S diag(ν₁, ν₁, ν₂, ν₂) Sᵀ` with ν ≥ ½ and S a random symplectic.
    fn gaussian_state()(
        n1 in 0.0..3.0f64,
        n2 in 0.0..3.0f64,
        r in 0.0..1.2f64,
        q1 in -0.8..0.8f64,
        q2 in -0.8..0.8f64,
        bs in 0.0..3.2f64,
        phases in prop::array::uniform4(0.0..6.3f64),
    ) -> DMatrix<f64> {
        let s = rotation(2, 0, phases[0])
            * rotation(2, 1, phases[1])
            * beam_splitter(bs)
            * squeezer(q1, q2)
            * two_mode_squeezer(r)
            * rotation(2, 0, phases[2])
            * rotation(2, 1, phases[3]);
        let nu = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![n1 + 0.5, n1 + 0.5, n2 + 0.5, n2 + 0.5]));
        let v = &s * nu * s.transpose();
        (&v + v.transpose()) * 0.5
    }
}

fn swap_modes(v: &DMatrix<f64>) -> DMatrix<f64> {
    let perm = [2, 3, 0, 1];
    DMatrix::from_fn(4, 4, |i, j| v[(perm[i], perm[j])])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn barnett_flip_touches_only_the_magnon_rotation(p in system()) {
        let flipped = SystemParams { barnett_shift: -p.barnett_shift, ..p.clone() };
        let (a, b) = (build_drift::<f64>(&p), build_drift::<f64>(&flipped));
        for i in 0..10 {
            for j in 0..10 {
                if (i, j) != (4, 5) && (i, j) != (5, 4) {
                    prop_assert_eq!(a[(i, j)], b[(i, j)]);
                }
            }
        }
    }

    #[test]
    fn zero_reflectivity_is_feedback_free(gamma in 1.0..1e8f64, theta in -7.0..7.0f64) {
        let fb = feedback_rates(gamma, 0.0, theta).unwrap();
        prop_assert_eq!(fb.damping, gamma);
        prop_assert_eq!(fb.detuning_shift, 0.0);
        prop_assert_eq!(fb.noise_factor, 1.0);
    }

    #[test]
    fn model_matrices_are_deterministic_and_diffusion_nonnegative(p in system()) {
        prop_assert_eq!(build_drift::<f64>(&p), build_drift::<f64>(&p));
        let d = build_diffusion::<f64>(&p).unwrap();
        prop_assert_eq!(&d, &build_diffusion::<f64>(&p).unwrap());
        prop_assert!(d.diagonal().iter().all(|x| *x >= 0.0));
    }

    #[test]
    fn lyapunov_map_is_linear_in_noise(seed in any::<u64>(), modes in 1usize..=5, s in 1.0..50.0f64) {
        let (a, d) = random_stable_system(&mut ChaCha8Rng::seed_from_u64(seed), modes);
        let v = solve_lyapunov(&a, &d).unwrap();
        let w = solve_lyapunov(&a, &(&d * s)).unwrap();
        let err = (w.matrix() - v.matrix() * s).norm() / w.matrix().norm();
        prop_assert!(err < 1e-12, "{}", err);
        prop_assert!(relative_residual(&a, &d, v.matrix()) < 1e-9);
    }

    /// Stable points with 2 cos Θ ≥ 𝓛 give physical states with a small
    /// residual; outside that region feedback noise can fall below the
    /// vacuum level and the pipeline reports the point as nonphysical.
    #[test]
    fn stable_model_states_are_physical(p in system()) {
        prop_assume!(2.0 * p.theta.cos() >= p.reflectivity);
        let a = build_drift::<f64>(&p);
        let d = build_diffusion::<f64>(&p).unwrap();
        if let Ok(v) = solve_lyapunov(&a, &d) {
            prop_assert!(relative_residual(&a, &d, v.matrix()) < 1e-9);
            let nu = v.symplectic_eigenvalues().unwrap();
            prop_assert!(nu[0] >= 0.5 - 1e-8, "ν = {}", nu[0]);
            let m = MeasureSet::compute(&v, &MeasureKind::ALL).unwrap();
            prop_assert!(m.hierarchy_violations().is_empty());
        }
    }

    #[test]
    fn pair_symmetry(v in gaussian_state()) {
        let e = log_negativity(&v).unwrap();
        let e_swapped = log_negativity(&swap_modes(&v)).unwrap();
        prop_assert!((e - e_swapped).abs() < 1e-12, "{} vs {}", e, e_swapped);
        let s12 = gaussian_steering(&v, Direction::FirstToSecond).unwrap();
        let s21 = gaussian_steering(&swap_modes(&v), Direction::SecondToFirst).unwrap();
        prop_assert!((s12 - s21).abs() < 1e-12);
    }

    #[test]
    fn local_rotations_leave_measures_unchanged(v in gaussian_state(), mode in 0usize..2, phi in 0.0..6.3f64) {
        let r = rotation(2, mode, phi);
        let w = &r * &v * r.transpose();
        prop_assert!((log_negativity(&v).unwrap() - log_negativity(&w).unwrap()).abs() < 1e-10);
        for dir in [Direction::FirstToSecond, Direction::SecondToFirst] {
            let (a, b) = (gaussian_steering(&v, dir).unwrap(), gaussian_steering(&w, dir).unwrap());
            prop_assert!((a - b).abs() < 1e-10, "{:?}: {} vs {}", dir, a, b);
        }
    }

    #[test]
    fn steering_implies_entanglement(v in gaussian_state()) {
        let e = log_negativity(&v).unwrap();
        prop_assert!(e >= 0.0);
        for dir in [Direction::FirstToSecond, Direction::SecondToFirst] {
            let s = gaussian_steering(&v, dir).unwrap();
            prop_assert!(s >= 0.0);
            if s > 0.0 {
                prop_assert!(e > 0.0, "steering {} without entanglement", s);
            }
        }
    }

    #[test]
    fn contrast_bounds(a in 0.0..10.0f64, b in 0.0..10.0f64) {
        let c = contrast_ratio(a, b).unwrap();
        prop_assert!((0.0..=1.0).contains(&c));
        prop_assert_eq!(contrast_ratio(a, a).unwrap(), 0.0);
        if a > 0.0 {
            prop_assert_eq!(contrast_ratio(a, 0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn amplitudes_scale_linearly_without_back_action(k in 0.01..100.0f64, p in system()) {
        let mut drives = DriveParams::baseline(&p);
        drives.bare_d_mb1 = 0.0;
        drives.bare_d_cb2 = 0.0;
        let det = bare_detunings(&p).unwrap();
        let one = amplitudes_once(&p, &drives, det).unwrap();
        let scaled = DriveParams { rabi: drives.rabi * k, laser_coupling: drives.laser_coupling * k, ..drives.clone() };
        let many = amplitudes_once(&p, &scaled, det).unwrap();
        prop_assert!((many.m_avg - one.m_avg * k).norm() <= 1e-12 * many.m_avg.norm());
        prop_assert!((many.c_avg - one.c_avg * k).norm() <= 1e-12 * many.c_avg.norm());
    }

    #[test]
    fn converged_mean_field_is_a_fixed_point(power in 0.5e-3..8e-3f64, laser in 5e-3..50e-3f64) {
        let p = SystemParams::baseline();
        let drives = DriveParams::from_powers(&p, power, laser, 100e-6, hz(0.1), hz(100.0));
        let sc = solve_self_consistent(&p, &drives).unwrap();
        let a = sc.amplitudes;
        let again = amplitudes_once(&p, &drives, magnocorr::mean_field::Detunings { magnon: a.delta_m_eff, optical: a.delta_c_eff }).unwrap();
        prop_assert!(again.relative_change(&a) < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Monogamy of the residual contangle on model states drawn from the
    /// shipped presets. Squared log-negativity is only guaranteed monogamous
    /// for pure states, and mixed steady states do break it.
    #[test]
    #[ignore = "violated at physical preset states, see monogamy_counterexample"]
    fn contangle_is_nonnegative_on_preset_states(which in 0usize..64, point in 0usize..100_000) {
        let list = magnocorr::sweep::presets();
        let spec = list[which % list.len()].spec().unwrap();
        let coords = spec.coordinates(point % spec.len());
        let p = spec.params_at(&coords).unwrap();
        let Ok(v) = magnocorr::sweep::steady_state(&p) else { return Ok(()) };
        for (a, b, c) in measures::triples() {
            let v6 = Covariance::new(v.reduce(&[a, b, c]).unwrap()).unwrap();
            let r = measures::residual_contangle(v6.matrix()).unwrap();
            prop_assert!(r.min >= -1e-8, "{:?} at {:?}: {}", (a, b, c), coords, r.min);
        }
    }
}

/// A fig2 grid point where C_{a|b2 c} < C_{a|b2} + C_{a|c} by 3%, far above
/// rounding. Pairwise and one-vs-two negativities agree between the
/// closed form and the partial-transpose spectrum to 1e-12.
#[test]
fn monogamy_counterexample() {
    let spec = magnocorr::sweep::preset("fig2").unwrap().spec().unwrap();
    let p = spec
        .params_at(&[-1033333.3333333358, 11344102.564102568])
        .unwrap();
    let v = magnocorr::sweep::steady_state(&p).unwrap();
    let e = |modes: &[magnocorr::Mode]| {
        let sub = v.reduce(modes).unwrap();
        let via_pt = measures::bipartition_negativity(&sub, 0).unwrap();
        if modes.len() == 2 {
            assert!((log_negativity(&sub).unwrap() - via_pt).abs() < 1e-12);
        }
        via_pt
    };
    use magnocorr::Mode::{A, B2, C};
    let (ab, ac, abc) = (e(&[A, B2]), e(&[A, C]), e(&[A, B2, C]));
    let residual = abc * abc - ab * ab - ac * ac;
    assert!(residual < -1e-7, "{residual}");
    let r = measures::residual_contangle(&v.reduce(&[B2, C, A]).unwrap()).unwrap();
    assert!((r.min - residual).abs() < 1e-12);
}
