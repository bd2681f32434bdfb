use proptest::prelude::*;

use nonlocal_limit::analysis::{coarsen, l1_distance, Window};
use nonlocal_limit::model::KAPPA_SLACK;
use nonlocal_limit::{
    nonlocal_step, run_nonlocal, Grid1D, InitialDatum, KernelSpec, NonlocalState, SimConfig,
    VelocityModel,
};

fn config(
    n_cells: usize,
    datum: InitialDatum,
    kernel: KernelSpec,
    velocity: VelocityModel,
    t_end: f64,
) -> SimConfig {
    let grid = Grid1D::new(-2.0, 3.0, n_cells).unwrap();
    SimConfig::new(grid, datum, Some(kernel), velocity, t_end).unwrap()
}

/// Straight-line transcription of one step for `q = χ(0, 0.5)`, `V(w) = w`:
/// face values from the closed-form convolution of the sampled field,
/// upwind fluxes, and the step `cfl dx / (max V + (1 - e^{-dx/η}) ‖q‖∞)`.
#[test]
fn one_step_matches_hand_rolled_update() {
    let eta = 0.1;
    let n = 500;
    let cfg = config(
        n,
        InitialDatum::indicator(0.0, 0.5, 1.0).unwrap(),
        KernelSpec::exponential(eta).unwrap(),
        VelocityModel::Identity,
        0.3,
    );
    let s0 = NonlocalState::initial(&cfg).unwrap();
    let s1 = nonlocal_step(&s0, &cfg).unwrap();

    let g = cfg.grid();
    let dx = g.dx();
    let q0: Vec<f64> = (0..n)
        .map(|i| {
            let (a, b) = (g.face(i), g.face(i + 1));
            (b.min(0.5) - a.max(0.0)).max(0.0) / dx
        })
        .collect();
    let mut w = vec![0.0; n + 1];
    for (j, wj) in w.iter_mut().enumerate() {
        let x = g.face(j);
        for (i, qi) in q0.iter().enumerate().take(j) {
            let (a, b) = (g.face(i), g.face(i + 1));
            *wj += qi.abs() * (((b - x) / eta).exp() - ((a - x) / eta).exp());
        }
    }
    let mut flux = vec![0.0; n + 1];
    for j in 1..n {
        flux[j] = w[j] * q0[j - 1];
    }
    let max_v = w.iter().cloned().fold(0.0, f64::max);
    let linf = q0.iter().fold(0.0f64, |m, q| m.max(q.abs()));
    let dt = 0.5 * dx / (max_v + (1.0 - (-dx / eta).exp()) * linf);
    for i in 0..n {
        let expected = q0[i] - dt / dx * (flux[i + 1] - flux[i]);
        assert!(
            (s1.q.values()[i] - expected).abs() <= 1e-13,
            "cell {i}: {} vs {expected}",
            s1.q.values()[i]
        );
    }
    assert!((s1.time - dt).abs() <= 1e-15);
    assert_eq!(s1.step_index, 1);
}

#[test]
fn refinement_is_self_convergent() {
    let datum = InitialDatum::new(vec![-0.5, 0.0, 0.5], vec![-0.5, 1.0]).unwrap();
    let runs: Vec<_> = [250usize, 500, 1000, 2000]
        .iter()
        .map(|&n| {
            let cfg = config(
                n,
                datum.clone(),
                KernelSpec::exponential(0.1).unwrap(),
                VelocityModel::Identity,
                0.4,
            );
            run_nonlocal(&cfg).unwrap().final_snapshot().q.clone()
        })
        .collect();
    let diffs: Vec<f64> = runs
        .windows(2)
        .map(|w| {
            let fine = coarsen(&w[1], 2).unwrap();
            l1_distance(&w[0], &fine, Window::whole(w[0].grid())).unwrap()
        })
        .collect();
    assert!(diffs.windows(2).all(|d| d[1] < d[0]), "{diffs:?}");
}

#[test]
fn tabulated_kernel_run_respects_inflated_bound() {
    let datum = InitialDatum::new(vec![-0.5, 0.0, 0.5], vec![-0.5, 1.0]).unwrap();
    let kernel = KernelSpec::tabulated(0.2, vec![0.0, 3.0, 1.0, 2.0]).unwrap();
    let cfg = config(1000, datum, kernel, VelocityModel::Identity, 0.4);
    let r = run_nonlocal(&cfg).unwrap();
    assert!(r.diagnostics.max_linf() <= (1.0 + KAPPA_SLACK) + 1e-12);
    assert!(r.diagnostics.max_mass_drift() <= 1e-12);
    assert!(r.final_snapshot().w.is_some());
}

#[test]
fn negative_velocities_are_upwinded_per_face() {
    let datum = InitialDatum::new(vec![-0.5, 0.0, 0.5], vec![0.8, -0.4]).unwrap();
    let v = VelocityModel::tabulated(vec![0.0, 1.0], vec![-0.6, 0.6]).unwrap();
    let cfg = config(800, datum, KernelSpec::exponential(0.05).unwrap(), v, 0.5);
    let r = run_nonlocal(&cfg).unwrap();
    let d = &r.diagnostics;
    assert!(d.max_linf() <= 0.8 + 1e-12);
    assert!(d.max_mass_drift() <= 1e-12);
    assert!(d.max_l1_increase() <= 1e-12);
    // mass left of the datum shows the leftward transport at small |q|
    let q = &r.final_snapshot().q;
    let left: f64 = (0..q.grid().n_cells())
        .filter(|&i| q.grid().center(i) < -0.55)
        .map(|i| q.values()[i].abs())
        .sum();
    assert!(left > 0.0);
}

#[test]
fn retained_trajectory_follows_the_stride() {
    let datum = InitialDatum::indicator(0.0, 0.5, 1.0).unwrap();
    let cfg = config(
        400,
        datum,
        KernelSpec::exponential(0.1).unwrap(),
        VelocityModel::Identity,
        0.3,
    )
    .with_snapshot_stride(3)
    .unwrap();
    let r = run_nonlocal(&cfg).unwrap();
    assert_eq!(
        r.trajectory.len(),
        1 + r.steps / 3 + usize::from(!r.steps.is_multiple_of(3))
    );
    assert_eq!(r.trajectory.last().unwrap().time, 0.3);
    assert_eq!(r.diagnostics.rows.len(), r.steps + 1);
}

fn datum_strategy() -> impl Strategy<Value = InitialDatum> {
    (1usize..5, any::<u64>()).prop_flat_map(|(pieces, _)| {
        (
            prop::collection::vec(0.05f64..0.4, pieces),
            prop::collection::vec(-1.0f64..1.0, pieces),
        )
            .prop_map(|(widths, values)| {
                let mut b = vec![-0.8];
                for w in widths {
                    b.push(b.last().unwrap() + w);
                }
                InitialDatum::new(b, values).unwrap()
            })
    })
}

fn velocity_strategy() -> impl Strategy<Value = VelocityModel> {
    prop_oneof![
        Just(VelocityModel::Identity),
        Just(VelocityModel::Square),
        Just(VelocityModel::power(4).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn runs_conserve_mass_and_obey_the_maximum_principle(
        datum in datum_strategy(),
        velocity in velocity_strategy(),
        eta in 0.002f64..0.5,
    ) {
        let m0 = datum.linf_norm();
        let cfg = config(300, datum, KernelSpec::exponential(eta).unwrap(), velocity, 0.3);
        let r = run_nonlocal(&cfg).unwrap();
        let d = &r.diagnostics;
        let mass0 = d.rows[0].mass;
        prop_assert!(d.max_mass_drift() <= 1e-12 * (1.0 + mass0.abs()) * r.steps as f64);
        prop_assert!(d.max_linf() <= m0 + 1e-12);
        let scale = d.rows[0].l1.max(1.0);
        prop_assert!(d.max_l1_increase() <= 1e-12 * scale);
    }

    #[test]
    fn steps_preserve_shared_signs(
        datum in datum_strategy(),
        velocity in velocity_strategy(),
        eta in 0.002f64..0.5,
    ) {
        let cfg = config(200, datum, KernelSpec::exponential(eta).unwrap(), velocity, 0.3);
        let mut s = NonlocalState::initial(&cfg).unwrap();
        for _ in 0..20 {
            let next = nonlocal_step(&s, &cfg).unwrap();
            let (q, q1) = (s.q.values(), next.q.values());
            for i in 1..q.len() {
                if q[i] > 0.0 && q[i - 1] > 0.0 {
                    prop_assert!(q1[i] >= 0.0);
                }
                if q[i] < 0.0 && q[i - 1] < 0.0 {
                    prop_assert!(q1[i] <= 0.0);
                }
            }
            s = next;
        }
    }
}
