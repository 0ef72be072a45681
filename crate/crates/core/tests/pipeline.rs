use qsl_core::bath::{DrudeSpec, OhmicLikeSpec};
use qsl_core::dephasing::{build_trajectory, uniform_grid, BlochState};
use qsl_core::heom::{converge, exact_commuting_solution, plus_plus, step_doubling, HeomConfig};
use qsl_core::qsl::{qsl_dephasing_closed, qsl_generic};
use qsl_core::Execution;

#[test]
fn fourth_order_with_and_without_commuting_coupling() {
    let drude = DrudeSpec::new(0.05, 5.0).unwrap();
    for base in [
        HeomConfig::literal(1.0, 0.1, drude, 5.0),
        HeomConfig::transverse(1.0, 0.1, drude, 1.0),
        HeomConfig::transverse(1.0, 0.1, drude, 5.0),
    ] {
        let cfg = HeomConfig {
            depth: 3,
            t_max: 2.0,
            ..base
        };
        let sd = step_doubling(&cfg, &plus_plus()).unwrap();
        assert!((sd.ratio - 16.0).abs() < 2.0, "ratio {}", sd.ratio);
    }
}

#[test]
fn converged_hierarchy_tracks_oracle() {
    let cfg = HeomConfig {
        t_max: 4.0,
        ..HeomConfig::literal(1.0, 0.1, DrudeSpec::new(0.05, 5.0).unwrap(), 1.0)
    };
    let c = converge(&cfg, &plus_plus(), 1e-6).unwrap();
    let traj = &c.run.trajectory;
    for (t, s) in traj.grid().iter().zip(traj.states()).step_by(8) {
        let exact = exact_commuting_solution(&cfg, &plus_plus(), *t).unwrap();
        assert!(
            s.matrix().try_sub(exact.matrix()).unwrap().max_abs() < 1e-5,
            "t = {t}"
        );
    }
}

#[test]
fn sampled_bound_matches_closed_form_on_a_trajectory() {
    let spec = OhmicLikeSpec::new(0.2, 50.0, 1.0).unwrap();
    let (t, tau) = (0.5, 1.0);
    let grid = uniform_grid(t, t + tau, 801);
    let traj = build_trajectory(
        spec,
        1.0,
        1.0,
        BlochState::plus(),
        &grid,
        None,
        Execution::Sequential,
    )
    .unwrap()
    .to_state_trajectory()
    .unwrap();
    let sampled = qsl_generic(&traj, t, tau).unwrap();
    let closed = qsl_dephasing_closed(spec, 1.0, 1.0, BlochState::plus(), t, tau, None).unwrap();
    assert!((sampled.tau_qsl / closed.tau_qsl - 1.0).abs() < 1e-4);
}

#[test]
fn execution_modes_agree_bitwise() {
    let spec = OhmicLikeSpec::new(0.2, 50.0, 0.6).unwrap();
    let grid = uniform_grid(0.0, 2.0, 21);
    let run =
        |exec| build_trajectory(spec, 2.0, 1.0, BlochState::plus(), &grid, None, exec).unwrap();
    let (a, b) = (run(Execution::Sequential), run(Execution::Parallel));
    assert_eq!(a.gamma(), b.gamma());
    assert_eq!(a.q(), b.q());
}
