use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use linchpin::chain::ChainOutput;
use linchpin::config::parse_config;
use linchpin::dist::RandomStream;
use linchpin::finite::{add_circulation, joint_transition_matrix, same_rate_check, FiniteJointTarget};
use linchpin::kernels::{FiniteKernel, FiniteMh, Proposal, RandomWalkMh};
use linchpin::models::RosenbrockTarget;
use linchpin::sampler::LinchpinSampler;

fn log_table() -> impl Strategy<Value = DMatrix<f64>> {
    (1usize..4, 3usize..6).prop_flat_map(|(nx, ny)| {
        prop::collection::vec(-4.0f64..4.0, nx * ny).prop_map(move |v| DMatrix::from_vec(nx, ny, v))
    })
}

fn row_sums_ok(p: &DMatrix<f64>) -> bool {
    p.iter().all(|&v| v >= 0.0) && p.row_iter().all(|r| (r.sum() - 1.0).abs() < 1e-12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composed_kernel_is_stochastic_and_invariant(table in log_table()) {
        let target = FiniteJointTarget::from_log_table(&table).unwrap();
        let mh = FiniteMh::neighbor_walk(target.ln_marginal()).unwrap().transition_matrix().unwrap();
        prop_assert!(row_sums_ok(&mh));
        let joint = joint_transition_matrix(&target, &mh).unwrap();
        prop_assert!(row_sums_ok(joint.transition()));
        prop_assert!(joint.check_invariance() < 1e-12);
        prop_assert!(joint.check_detailed_balance() < 1e-12);
    }

    #[test]
    fn circulation_keeps_invariance_and_same_rate(table in log_table()) {
        let target = FiniteJointTarget::from_log_table(&table).unwrap();
        let mh = FiniteMh::neighbor_walk(target.ln_marginal()).unwrap().transition_matrix().unwrap();
        let n = mh.nrows();
        let lazy = (DMatrix::identity(n, n) + mh) * 0.5;
        let p = add_circulation(&lazy, target.marginal(), [0, 1, 2]).unwrap();
        prop_assert!(row_sums_ok(&p));
        let marginal = target.marginal_spec(&p).unwrap();
        let joint = joint_transition_matrix(&target, &p).unwrap();
        prop_assert!(marginal.check_invariance() < 1e-12);
        prop_assert!(joint.check_invariance() < 1e-12);
        let report = same_rate_check(&joint, target.layout(), &marginal, 10).unwrap();
        prop_assert!(report.max_discrepancy < 1e-12);
        prop_assert!(report.max_start_x_dependence < 1e-12);
    }

    #[test]
    fn thinning_counts(len in 1usize..300, t in 1usize..20) {
        let mut out = ChainOutput::new(vec!["v".into()], 0, "test");
        for i in 0..len {
            out.push_row(i + 1, &[i as f64], true).unwrap();
        }
        let thinned = out.thin(t).unwrap();
        prop_assert_eq!(thinned.len(), len.div_ceil(t));
        prop_assert_eq!(thinned.column(0)[0], 0.0);
    }

    #[test]
    fn deferred_fill_draw_count(n in 1usize..400, thin in 1usize..25, seed in any::<u64>()) {
        let target = RosenbrockTarget::default();
        let kernel = RandomWalkMh::new(target.marginal_target(), 2.0, Proposal::Uniform).unwrap();
        let sampler = LinchpinSampler::new(kernel, target.conditional());
        let out = sampler
            .run_marginal_then_fill(vec![0.0], n, thin, vec!["x".into(), "y".into()], &mut RandomStream::new(seed))
            .unwrap();
        prop_assert_eq!(out.conditional_draws, n.div_ceil(thin));
        prop_assert_eq!(out.len(), n.div_ceil(thin));
    }

    #[test]
    fn csv_reals_round_trip(values in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::ZERO, 1..50)) {
        let mut out = ChainOutput::new(vec!["v".into()], 0, "test");
        for (i, v) in values.iter().enumerate() {
            out.push_row(i, &[*v], i % 2 == 0).unwrap();
        }
        let text = out.to_csv_string();
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let parsed: Vec<f64> = reader.records().map(|r| r.unwrap()[1].parse().unwrap()).collect();
        prop_assert_eq!(parsed, values);
    }

    #[test]
    fn config_text_round_trips(
        n in 2usize..100_000,
        thin in 1usize..50,
        seed in any::<u64>(),
        reps in 1usize..5,
        model in prop::sample::select(vec!["rosenbrock", "gaussian", "linear", "spike-slab", "var"]),
    ) {
        let text = format!("model = {model}\nn = {n}\nthin = {thin}\nseed = {seed}\nreplicates = {reps}\nburn_in = {}\n", n / 2);
        let cfg = parse_config(&text).unwrap();
        let again = parse_config(&cfg.to_text()).unwrap();
        prop_assert_eq!(&cfg, &again);
        prop_assert_eq!(cfg.to_text(), again.to_text());
    }

    #[test]
    fn substreams_are_reproducible(seed in any::<u64>(), i in 0u64..1000) {
        let mut a = RandomStream::new(seed).substream(i);
        let mut b = RandomStream::new(seed).substream(i);
        let mut c = RandomStream::new(seed).substream(i + 1);
        let xa: Vec<f64> = (0..8).map(|_| a.uniform()).collect();
        let xb: Vec<f64> = (0..8).map(|_| b.uniform()).collect();
        let xc: Vec<f64> = (0..8).map(|_| c.uniform()).collect();
        prop_assert_eq!(&xa, &xb);
        prop_assert_ne!(&xa, &xc);
    }
}

#[test]
fn marginal_of_log_table_sums_to_one() {
    let t = FiniteJointTarget::from_log_table(&DMatrix::from_row_slice(2, 3, &[0.0, 1.0, 2.0, -1.0, 0.5, 0.0])).unwrap();
    assert!((t.marginal().sum() - 1.0).abs() < 1e-14);
    assert!((t.joint().sum() - 1.0).abs() < 1e-14);
    let sums: DVector<f64> = t.conditional().row_sum().transpose();
    assert!(sums.iter().all(|v| (v - 1.0).abs() < 1e-14));
}
