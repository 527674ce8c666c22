use lskum_core::runtime::exchange_ghosts;
use lskum_core::{
    deterministic_reduce, generate_rect_cloud, partition_cloud, run_fixed_point, run_recorded, store_equivalence_check,
    Bounds, Error, Field, FieldStore, Kernel, Layout, PointCloud, ReduceOp, ResidualMode, RunOptions, SchedulePolicy,
    SolverConfig,
};
use proptest::prelude::*;

fn bump_case(n: usize, iters: usize, cfl: f64) -> (PointCloud, RunOptions) {
    let cfg = SolverConfig::from_pairs([
        ("generate", format!("{n}x{n}").as_str()),
        ("jitter", "0.1"),
        ("bump", "0.05"),
        ("bump-radius", "0.2"),
        ("iters", iters.to_string().as_str()),
        ("cfl", cfl.to_string().as_str()),
    ])
    .unwrap();
    let mut cloud = cfg.build_cloud().unwrap();
    cfg.initialize(&mut cloud).unwrap();
    (cloud, cfg.run_options().unwrap())
}

fn solve(
    cloud: &mut PointCloud,
    parts: usize,
    opts: &RunOptions,
) -> lskum_core::Result<lskum_core::ConvergenceHistory> {
    let part = partition_cloud(cloud, parts)?;
    run_fixed_point(cloud, &part, opts)
}

fn solve_recorded(
    cloud: &mut PointCloud,
    parts: usize,
    opts: &RunOptions,
) -> lskum_core::Result<(lskum_core::ConvergenceHistory, Option<Error>)> {
    let part = partition_cloud(cloud, parts)?;
    run_recorded(cloud, &part, opts)
}

fn residue_bits(h: &lskum_core::ConvergenceHistory) -> Vec<u64> {
    h.records.iter().map(|r| r.residue.to_bits()).collect()
}

#[test]
fn zero_iterations_leave_the_state_alone() {
    let (mut cloud, mut opts) = bump_case(12, 0, 0.3);
    opts.n_iterations = 0;
    let before = cloud.store.clone();
    let part = partition_cloud(&cloud, 3).unwrap();
    let h = run_fixed_point(&mut cloud, &part, &opts).unwrap();
    assert!(h.records.is_empty());
    assert!(store_equivalence_check(&before, &cloud.store).unwrap());
}

#[test]
fn uniform_free_stream_is_a_fixed_point() {
    let cfg = SolverConfig::from_pairs([("generate", "20x20"), ("jitter", "0.1"), ("iters", "30")]).unwrap();
    let mut cloud = cfg.build_cloud().unwrap();
    cfg.initialize(&mut cloud).unwrap();
    let before = cloud.store.get4(77, Field::Prim);
    let part = partition_cloud(&cloud, 4).unwrap();
    let h = run_fixed_point(&mut cloud, &part, &cfg.run_options().unwrap()).unwrap();
    assert_eq!(h.iterations(), 30);
    assert!(h.records.iter().all(|r| r.residue == 0.0 && r.log10_rel == 0.0));
    assert_eq!(cloud.store.get4(77, Field::Prim), before);
}

#[test]
fn serial_and_parallel_runs_agree_bitwise() {
    let (cloud, mut opts) = bump_case(40, 40, 0.3);
    let mut serial = cloud.clone();
    let h1 = solve(&mut serial, 1, &opts).unwrap();
    opts.n_workers = 4;
    let mut parallel = cloud.clone();
    let h4 = solve(&mut parallel, 4, &opts).unwrap();
    assert_eq!(residue_bits(&h1), residue_bits(&h4));
    assert!(store_equivalence_check(&serial.store, &parallel.store).unwrap());
    assert!(h1.records.last().unwrap().residue > 0.0);
}

#[test]
fn shuffled_schedules_do_not_change_results() {
    let (cloud, mut opts) = bump_case(24, 12, 0.3);
    let mut reference = cloud.clone();
    let href = solve(&mut reference, 1, &opts).unwrap();
    for (parts, workers, seed) in [(8, 1, 1), (8, 3, 2), (5, 2, 3), (16, 4, 4), (3, 8, 5)] {
        opts.n_workers = workers;
        opts.schedule = SchedulePolicy::Shuffled(seed);
        let mut c = cloud.clone();
        let h = solve(&mut c, parts, &opts).unwrap();
        assert_eq!(
            residue_bits(&href),
            residue_bits(&h),
            "{parts} parts, {workers} workers"
        );
        assert!(store_equivalence_check(&reference.store, &c.store).unwrap());
    }
}

#[test]
fn layouts_and_residual_modes_agree_bitwise() {
    let (cloud, mut opts) = bump_case(16, 15, 0.3);
    let mut soa = cloud.clone();
    let hs = solve(&mut soa, 2, &opts).unwrap();
    let mut aos = cloud.clone().with_layout(Layout::Aos);
    opts.residual_mode = ResidualMode::Split4;
    let ha = solve(&mut aos, 2, &opts).unwrap();
    assert_eq!(residue_bits(&hs), residue_bits(&ha));
    assert!(store_equivalence_check(&soa.store, &aos.store.to_layout(Layout::Soa)).unwrap());
    assert!(ha.split && !hs.split);
}

#[test]
fn kernel_times_are_consistent() {
    let (mut cloud, mut opts) = bump_case(20, 10, 0.3);
    opts.residual_mode = ResidualMode::Split4;
    opts.n_workers = 2;
    let part = partition_cloud(&cloud, 4).unwrap();
    let h = run_fixed_point(&mut cloud, &part, &opts).unwrap();
    let report = h.report();
    assert!(report.kernels.total() <= report.total_seconds);
    let passes: f64 = Kernel::SPLIT.iter().map(|&k| report.kernels.get(k)).sum();
    let fr = report.kernels.get(Kernel::FluxResidual);
    assert!((passes - fr).abs() <= 1e-12 * fr.max(1e-300));
    assert!(report.rdp().unwrap() > 0.0);
    assert_eq!(report.rows().len(), 10);
}

#[test]
fn divergence_is_reported_identically_for_any_schedule() {
    let (cloud, opts) = bump_case(40, 200, 0.5);
    let mut outcomes = Vec::new();
    for (parts, workers, schedule) in [
        (1, 1, SchedulePolicy::InOrder),
        (4, 4, SchedulePolicy::InOrder),
        (8, 2, SchedulePolicy::Shuffled(7)),
    ] {
        let mut o = opts.clone();
        o.n_workers = workers;
        o.schedule = schedule;
        let mut c = cloud.clone();
        let before = c.store.clone();
        let (h, err) = solve_recorded(&mut c, parts, &o).unwrap();
        let err = err.expect("CFL 0.5 diverges on the second-order bump problem");
        let Error::Solver { iteration, .. } = &err else {
            panic!("{err:?}")
        };
        assert_eq!(h.iterations(), iteration - 1);
        assert!(store_equivalence_check(&before, &c.store).unwrap());
        outcomes.push((residue_bits(&h), err.to_string()));
    }
    assert!(outcomes.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn invalid_options_are_rejected() {
    let (mut cloud, opts) = bump_case(8, 1, 0.3);
    let part = partition_cloud(&cloud, 1).unwrap();
    for bad in [
        RunOptions {
            n_workers: 0,
            ..opts.clone()
        },
        RunOptions {
            n_inner: 0,
            ..opts.clone()
        },
        RunOptions {
            cfl: 0.0,
            ..opts.clone()
        },
    ] {
        assert!(matches!(
            run_fixed_point(&mut cloud, &part, &bad),
            Err(Error::InvalidArgument(_))
        ));
    }
    let other = generate_rect_cloud(5, 5, Bounds::unit(), 0.0, 0).unwrap();
    let wrong = partition_cloud(&other, 1).unwrap();
    assert!(run_fixed_point(&mut cloud, &wrong, &opts).is_err());
}

#[test]
fn partitioned_sums_are_bitwise_equal() {
    let cloud = generate_rect_cloud(30, 30, Bounds::unit(), 0.2, 8).unwrap();
    let values: Vec<f64> = (0..cloud.n_points())
        .map(|i| ((i * 7919) % 1013) as f64 * 1.1e-3 - 0.3)
        .collect();
    let expect = deterministic_reduce(&values, ReduceOp::Sum);
    for parts in [1, 2, 4, 8] {
        let part = partition_cloud(&cloud, parts).unwrap();
        // Each partition scatters its owned values back into the id space.
        let snaps = exchange_ghosts(&values, &part);
        let mut dense = vec![f64::NAN; values.len()];
        for (p, snap) in snaps.iter().enumerate() {
            for (l, &g) in part.locals[p].iter().enumerate() {
                dense[g] = snap[l];
            }
        }
        assert_eq!(deterministic_reduce(&dense, ReduceOp::Sum).to_bits(), expect.to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn partition_invariants(nx in 4usize..18, ny in 4usize..18, jitter in 0.0f64..0.3, seed in any::<u64>(), parts in 1usize..12) {
        let cloud = generate_rect_cloud(nx, ny, Bounds::unit(), jitter, seed).unwrap();
        let parts = parts.min(cloud.n_points());
        let part = partition_cloud(&cloud, parts).unwrap();
        // Locals partition the id space.
        let mut seen = vec![0u8; cloud.n_points()];
        for (p, locals) in part.locals.iter().enumerate() {
            for &g in locals {
                seen[g] += 1;
                prop_assert_eq!(part.color[g], p);
            }
        }
        prop_assert!(seen.iter().all(|&s| s == 1));
        // Ghosts are exactly the off-partition stencil members.
        for p in 0..parts {
            let mut want: Vec<usize> = part.locals[p]
                .iter()
                .flat_map(|&g| cloud.points[g].nbhs.iter().copied())
                .filter(|&i| part.color[i] != p)
                .collect();
            want.sort_unstable();
            want.dedup();
            prop_assert_eq!(&part.ghosts[p], &want);
        }
        prop_assert_eq!(partition_cloud(&cloud, parts).unwrap(), part);
    }
}
