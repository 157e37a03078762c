//! Randomized structural invariants: operator algebra, generator
//! structure, solver outputs, classification totality, optimizer
//! correctness, and the sweep/CSV round trip.

use ndarray::Array2;
use ndarray_linalg::{Eigh, UPLO};
use pbsim::hilbert::{annihilation, creation, embed, expectation, number, pauli_ops};
use pbsim::liouvillian::{
    build_liouvillian, unvectorize, vectorize, CollapseChannel, MasterEquation,
};
use pbsim::models::{
    build_one_cavity_hamiltonian, effective_coupling_one_cavity, effective_coupling_two_cavity,
    one_cavity_channels, supermode_coefficients, ExpansionOrder, OneCavityParams,
};
use pbsim::observables::{classify, classify_with, ordering_string, RegionLabel, TunnelingCriterion};
use pbsim::solvers::{evolve_with_step, steady_state_of, HamiltonianModel};
use pbsim::sweep::{
    csv_string, golden_section, parse_csv, run_sweep, ModelKind, ModelParams, OutputKind,
    ResultRow, SolverOptions, SweepAxis, SweepSpec,
};
use pbsim::{DensityMatrix, HilbertSpace, Operator, C64};
use proptest::prelude::*;

fn c64_strategy() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn matrix_strategy(d: usize) -> impl Strategy<Value = Array2<C64>> {
    proptest::collection::vec(c64_strategy(), d * d)
        .prop_map(move |v| Array2::from_shape_vec((d, d), v).expect("shape matches length"))
}

fn hermitian_strategy(d: usize) -> impl Strategy<Value = Array2<C64>> {
    matrix_strategy(d).prop_map(|m| {
        let adj = m.t().mapv(|v| v.conj());
        (&m + &adj).mapv(|v| 0.5 * v)
    })
}

/// Positive-definite unit-trace matrix built from a random square root.
fn density_strategy(d: usize) -> impl Strategy<Value = Array2<C64>> {
    matrix_strategy(d).prop_map(move |m| {
        let adj = m.t().mapv(|v| v.conj());
        let mut rho = m.dot(&adj);
        for i in 0..d {
            rho[(i, i)] += C64::new(1e-3, 0.0);
        }
        let tr: C64 = (0..d).map(|i| rho[(i, i)]).sum();
        rho.mapv(|v| v / tr)
    })
}

fn params_strategy() -> impl Strategy<Value = OneCavityParams> {
    (
        -0.5..0.5f64,
        40.0..120.0f64,
        1e-3..0.03f64,
        0.005..0.2f64,
        0.0..0.5f64,
        4usize..=7,
    )
        .prop_map(|(delta, omega_drive, eps, gamma_m, n_bth, n_trunc)| OneCavityParams {
            delta,
            omega_drive,
            eps,
            gamma_m,
            n_bth,
            n_trunc,
            ..OneCavityParams::default()
        })
}

fn max_abs(m: &Array2<C64>) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn hermiticity_defect(m: &Array2<C64>) -> f64 {
    let adj = m.t().mapv(|v| v.conj());
    max_abs(&(m - &adj))
}

#[test]
fn creation_is_the_adjoint_of_annihilation() {
    for n in 2..=20 {
        let a = annihilation(n).unwrap();
        let adiff = a.dagger().sub(&creation(n).unwrap());
        assert_eq!(adiff.max_abs(), 0.0, "adjoint mismatch at truncation {n}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn embedding_preserves_spectra_with_multiplicity(
        d_op in 2usize..=4,
        d_other in 2usize..=4,
        seed_matrix in matrix_strategy(4),
        position in 0usize..=1,
    ) {
        let m = seed_matrix.slice(ndarray::s![..d_op, ..d_op]).to_owned();
        let adj = m.t().mapv(|v| v.conj());
        let herm = (&m + &adj).mapv(|v| 0.5 * v);

        let single = HilbertSpace::single("probe", d_op).unwrap();
        let op = Operator::new(single, herm.clone()).unwrap();
        let dims: [usize; 2] = if position == 0 { [d_op, d_other] } else { [d_other, d_op] };
        let space = HilbertSpace::new(&[("s0", dims[0]), ("s1", dims[1])]).unwrap();
        let big = embed(&op, &space, position).unwrap();

        let small_eigs = herm.eigh(UPLO::Lower).unwrap().0;
        let big_eigs = big.matrix().eigh(UPLO::Lower).unwrap().0;

        let mut expected: Vec<f64> = small_eigs
            .iter()
            .flat_map(|&e| std::iter::repeat(e).take(d_other))
            .collect();
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut got: Vec<f64> = big_eigs.to_vec();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());

        prop_assert_eq!(expected.len(), got.len());
        for (e, g) in expected.iter().zip(&got) {
            prop_assert!((e - g).abs() <= 1e-9, "eigenvalue {e} reproduced as {g}");
        }
    }

    #[test]
    fn distinct_slot_operators_commute(
        m0 in matrix_strategy(3),
        m1 in matrix_strategy(4),
    ) {
        let space = HilbertSpace::new(&[("s0", 3), ("s1", 4)]).unwrap();
        let a = embed(
            &Operator::new(HilbertSpace::single("s0", 3).unwrap(), m0).unwrap(),
            &space,
            0,
        )
        .unwrap();
        let b = embed(
            &Operator::new(HilbertSpace::single("s1", 4).unwrap(), m1).unwrap(),
            &space,
            1,
        )
        .unwrap();
        prop_assert!(a.commutator(&b).max_abs() <= 1e-13);
    }

    #[test]
    fn expectation_is_linear_in_both_arguments(
        m1 in matrix_strategy(5),
        m2 in matrix_strategy(5),
        r1 in density_strategy(5),
        r2 in density_strategy(5),
        a in c64_strategy(),
        b in c64_strategy(),
        t in 0.0..1.0f64,
    ) {
        let space = HilbertSpace::single("mode", 5).unwrap();
        let o1 = Operator::new(space.clone(), m1).unwrap();
        let o2 = Operator::new(space.clone(), m2).unwrap();
        let rho1 = DensityMatrix::new(space.clone(), r1.clone()).unwrap();
        let rho2 = DensityMatrix::new(space.clone(), r2.clone()).unwrap();

        let combined = o1.scale(a).add(&o2.scale(b));
        let lhs = expectation(&combined, &rho1).unwrap();
        let rhs = a * expectation(&o1, &rho1).unwrap() + b * expectation(&o2, &rho1).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12);

        let mix = r1.mapv(|v| v * t) + r2.mapv(|v| v * (1.0 - t));
        let rho_mix = DensityMatrix::new(space, mix).unwrap();
        let lhs_state = expectation(&o1, &rho_mix).unwrap();
        let rhs_state = t * expectation(&o1, &rho1).unwrap()
            + (1.0 - t) * expectation(&o1, &rho2).unwrap();
        prop_assert!((lhs_state - rhs_state).norm() <= 1e-12);
    }

    #[test]
    fn generator_preserves_hermiticity(
        h_mat in hermitian_strategy(6),
        c_mat in matrix_strategy(6),
        rate in 0.01..2.0f64,
        rho_mat in hermitian_strategy(6),
    ) {
        let space = HilbertSpace::new(&[("atom", 2), ("mode", 3)]).unwrap();
        let h = Operator::new(space.clone(), h_mat).unwrap();
        let c = Operator::new(space.clone(), c_mat).unwrap();
        let l = build_liouvillian(&h, &[CollapseChannel::new(c, rate).unwrap()]).unwrap();

        let v = vectorize(&rho_mat);
        let image = unvectorize(&l.matrix().dot(&v), space.total_dim());
        let scale = f64::max(max_abs(&image), 1.0);
        prop_assert!(hermiticity_defect(&image) <= 1e-11 * scale);
    }

    #[test]
    fn evolution_preserves_state_invariants(
        h_mat in hermitian_strategy(6),
        c_mat in matrix_strategy(6),
        rate in 0.01..1.0f64,
        rho_mat in density_strategy(6),
    ) {
        let space = HilbertSpace::new(&[("atom", 2), ("mode", 3)]).unwrap();
        let h = HamiltonianModel::Static(Operator::new(space.clone(), h_mat).unwrap());
        let channels = vec![CollapseChannel::new(
            Operator::new(space.clone(), c_mat).unwrap(),
            rate,
        )
        .unwrap()];
        let rho0 = DensityMatrix::new(space, rho_mat).unwrap();

        let traj = evolve_with_step(&h, &channels, &rho0, &[0.0, 0.5, 1.0], 0.01).unwrap();
        for state in traj.states() {
            prop_assert!((state.trace().re - 1.0).abs() <= 1e-9);
            prop_assert!(state.trace().im.abs() <= 1e-12);
            prop_assert!(hermiticity_defect(state.matrix()) <= 1e-10);
            prop_assert!(state.min_eigenvalue().unwrap() >= -1e-7);
        }
    }

    #[test]
    fn steady_states_are_physical_and_stationary(p in params_strategy()) {
        let h = build_one_cavity_hamiltonian(&p).unwrap();
        let me = MasterEquation::new(h, one_cavity_channels(&p).unwrap()).unwrap();
        let rho = steady_state_of(&me).unwrap();

        rho.validate().unwrap();
        prop_assert!(rho.min_eigenvalue().unwrap() >= -1e-9);
        let drift = me.apply(rho.matrix());
        prop_assert!(max_abs(&drift) <= 1e-10);
    }

    #[test]
    fn hamiltonians_are_hermitian_and_conserve_excitations_without_drive(
        p in params_strategy(),
    ) {
        let h = build_one_cavity_hamiltonian(&p).unwrap();
        prop_assert!(hermiticity_defect(h.matrix()) <= 1e-12 * f64::max(h.max_abs(), 1.0));

        let undriven = OneCavityParams { eps: 0.0, ..p };
        let h0 = build_one_cavity_hamiltonian(&undriven).unwrap();
        let space = undriven.space().unwrap();
        let (plus, minus, _) = pauli_ops();
        let atom_number = embed(&plus.dot(&minus), &space, 0).unwrap();
        let phonon_number = embed(&number(undriven.n_trunc).unwrap(), &space, 1).unwrap();
        let total = atom_number.add(&phonon_number);
        prop_assert!(h0.commutator(&total).max_abs() <= 1e-12);
    }

    #[test]
    fn couplings_are_invariant_under_stated_rescalings(
        omega in 10.0..200.0f64,
        gamma_c in 0.5..2.0f64,
        delta_c in -0.5..0.5f64,
        scale in 0.1..10.0f64,
        gamma_tri in 1e-3..1e-2f64,
        n_minus in 0.0..10.0f64,
        diff in 10.0..60.0f64,
        shift in 0.0..20.0f64,
    ) {
        let n_cav = |omega: f64, delta_c: f64, gamma_c: f64| {
            omega * omega / (delta_c * delta_c + 0.25 * gamma_c * gamma_c)
        };
        let g_base = effective_coupling_one_cavity(gamma_tri, n_cav(omega, delta_c, gamma_c));
        let g_scaled = effective_coupling_one_cavity(
            gamma_tri,
            n_cav(scale * omega, scale * delta_c, scale * gamma_c),
        );
        prop_assert!((g_base - g_scaled).abs() <= 1e-12 * g_base.abs().max(1e-30));

        let n_plus = (n_minus.sqrt() + diff).powi(2);
        let g2_base = effective_coupling_two_cavity(gamma_tri, n_plus, n_minus);
        let shifted_minus = (n_minus.sqrt() + shift).powi(2);
        let shifted_plus = (n_minus.sqrt() + shift + diff).powi(2);
        let g2_shifted = effective_coupling_two_cavity(gamma_tri, shifted_plus, shifted_minus);
        prop_assert!((g2_base - g2_shifted).abs() <= 1e-9 * g2_base.abs().max(1e-30));
    }

    #[test]
    fn exact_supermode_coefficients_satisfy_the_mixing_identity(
        delta_b in -5.0..5.0f64,
        j in 0.05..5.0f64,
    ) {
        let (alpha, beta) = supermode_coefficients(delta_b, j, ExpansionOrder::Exact).unwrap();
        prop_assert!((alpha * alpha + beta * beta - 1.0).abs() <= 1e-12);
        let s = (delta_b * delta_b + j * j).sqrt();
        let expected_ratio = (s + delta_b) / j;
        prop_assert!((beta / alpha - expected_ratio).abs() <= 1e-9 * expected_ratio.max(1.0));
    }

    #[test]
    fn classification_is_total_and_labels_match_their_predicates(
        g2 in prop_oneof![0.0..3.0f64, Just(1.0)],
        g3 in prop_oneof![0.0..3.0f64, Just(1.0)],
        g4 in prop_oneof![0.0..3.0f64, Just(1.0)],
    ) {
        let (label, ordering) = classify(g2, g3, g4);

        let standard = g2 < 1.0 && g3 < 1.0 && g4 < 1.0;
        let nonstandard = g2 < 1.0 && (g3 > 1.0 || g4 > 1.0);
        let tunneling = g4 > g3 && g3 > g2 && g2 > 1.0;
        match label {
            RegionLabel::StandardPb => prop_assert!(standard),
            RegionLabel::NonStandardPb => prop_assert!(nonstandard),
            RegionLabel::PhononInducedTunneling => prop_assert!(tunneling),
            RegionLabel::Unclassified => {
                prop_assert!(!standard && !nonstandard && !tunneling)
            }
        }

        let mut names: Vec<&str> = ordering.split('>').collect();
        prop_assert_eq!(names.len(), 4);
        names.sort_unstable();
        prop_assert_eq!(names, vec!["1", "g2", "g3", "g4"]);
        prop_assert_eq!(ordering, ordering_string(g2, g3, g4));

        let (weak_label, _) = classify_with(g2, g3, g4, TunnelingCriterion::Weak);
        if label == RegionLabel::PhononInducedTunneling {
            prop_assert_eq!(weak_label, RegionLabel::PhononInducedTunneling);
        }
    }

    #[test]
    fn golden_section_localizes_quadratic_minima(
        a in -10.0..10.0f64,
        width in 0.5..10.0f64,
        offset in 0.05..0.95f64,
        curvature in 0.1..10.0f64,
        floor in -5.0..5.0f64,
    ) {
        let b = a + width;
        let m = a + offset * width;
        let f = |x: f64| Ok(curvature * (x - m) * (x - m) + floor);
        let (x, fx) = golden_section(f, a, b, 1e-7).unwrap();
        prop_assert!((x - m).abs() <= 1e-5, "minimum {m} located at {x}");
        prop_assert!(fx >= floor && fx <= floor + curvature * 1e-10 + 1e-12);
    }

    #[test]
    fn csv_round_trip_preserves_every_row(
        rows in proptest::collection::vec(
            (
                any::<f64>(),
                any::<f64>(),
                any::<f64>(),
                any::<f64>(),
                any::<f64>(),
                "[a-z0-9_:-]{0,12}",
            ),
            0..20,
        ),
    ) {
        let rows: Vec<ResultRow> = rows
            .into_iter()
            .map(|(axis, mean, g2, g3, g4, label)| ResultRow {
                axis_value: axis,
                mean_phonon: mean,
                g2,
                g3,
                g4,
                log10_g2: g2.abs().log10(),
                log10_g3: g3.abs().log10(),
                log10_g4: g4.abs().log10(),
                region_label: label,
            })
            .collect();

        let parsed = parse_csv(&csv_string(&rows)).unwrap();
        prop_assert_eq!(parsed.len(), rows.len());
        let same = |x: f64, y: f64| (x.is_nan() && y.is_nan()) || x.to_bits() == y.to_bits();
        for (before, after) in rows.iter().zip(&parsed) {
            prop_assert!(same(before.axis_value, after.axis_value));
            prop_assert!(same(before.mean_phonon, after.mean_phonon));
            prop_assert!(same(before.g2, after.g2));
            prop_assert!(same(before.g3, after.g3));
            prop_assert!(same(before.g4, after.g4));
            prop_assert!(same(before.log10_g2, after.log10_g2));
            prop_assert!(same(before.log10_g3, after.log10_g3));
            prop_assert!(same(before.log10_g4, after.log10_g4));
            prop_assert_eq!(&before.region_label, &after.region_label);
        }
    }
}

fn small_sweep_spec(points: usize, outputs: Vec<OutputKind>) -> SweepSpec {
    SweepSpec {
        model: ModelKind::OneCavity,
        axis: SweepAxis::Delta,
        range: (-0.3, 0.3),
        points,
        fixed: ModelParams::OneCavity(OneCavityParams {
            n_trunc: 5,
            ..OneCavityParams::default()
        }),
        outputs,
        solver: SolverOptions::default(),
    }
}

#[test]
fn steady_state_is_a_fixed_point_of_evolution() {
    let p = OneCavityParams { n_trunc: 6, ..OneCavityParams::default() };
    let h = build_one_cavity_hamiltonian(&p).unwrap();
    let channels = one_cavity_channels(&p).unwrap();
    let me = MasterEquation::new(h.clone(), channels.clone()).unwrap();
    let rho = steady_state_of(&me).unwrap();

    let traj = evolve_with_step(
        &HamiltonianModel::Static(h),
        &channels,
        &rho,
        &[0.0, 1.0],
        0.002,
    )
    .unwrap();
    let evolved = traj.states().last().unwrap();
    let diff = max_abs(&(evolved.matrix() - rho.matrix()));
    assert!(diff <= 1e-7, "steady state drifted by {diff:.3e} over one linewidth time");
}

#[test]
fn parallel_and_serial_sweeps_emit_identical_csv() {
    let spec = small_sweep_spec(18, vec![OutputKind::MeanPhonon, OutputKind::G2, OutputKind::Region]);

    let run_with_threads = |n: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
        pool.install(|| run_sweep(&spec).unwrap())
    };
    let serial = csv_string(&run_with_threads(1));
    let parallel = csv_string(&run_with_threads(4));
    assert_eq!(serial, parallel);
}

#[test]
fn repeated_sweeps_are_deterministic() {
    let spec = small_sweep_spec(11, pbsim::sweep::all_outputs());
    let first = csv_string(&run_sweep(&spec).unwrap());
    let second = csv_string(&run_sweep(&spec).unwrap());
    assert_eq!(first, second);
}

#[test]
fn emitted_region_labels_match_reclassification_of_parsed_rows() {
    let spec = small_sweep_spec(9, pbsim::sweep::all_outputs());
    let rows = parse_csv(&csv_string(&run_sweep(&spec).unwrap())).unwrap();
    assert_eq!(rows.len(), 9);
    for row in &rows {
        assert!(!row.is_error(), "unexpected failed point: {}", row.region_label);
        let (label, _) = classify(row.g2, row.g3, row.g4);
        assert_eq!(row.region_label, label.as_str());
    }
}

#[test]
fn fock_qubit_mixtures_show_no_two_phonon_coincidences() {
    let space = HilbertSpace::single("mode", 6).unwrap();
    for &p1 in &[0.2, 0.5, 0.9] {
        let mut m: Array2<C64> = Array2::zeros((6, 6));
        m[(0, 0)] = C64::new(1.0 - p1, 0.0);
        m[(1, 1)] = C64::new(p1, 0.0);
        let rho = DensityMatrix::new(space.clone(), m).unwrap();
        let g2 = pbsim::observables::g_n(&rho, 0, 2).unwrap();
        assert_eq!(g2, 0.0, "support on the lowest two levels must kill g2");
    }
}

#[test]
fn correlations_are_invariant_under_global_phase_rotation() {
    let p = OneCavityParams { n_trunc: 6, ..OneCavityParams::default() };
    let h = build_one_cavity_hamiltonian(&p).unwrap();
    let me = MasterEquation::new(h, one_cavity_channels(&p).unwrap()).unwrap();
    let rho = steady_state_of(&me).unwrap();
    let space = rho.space().clone();

    let n_op = embed(&number(p.n_trunc).unwrap(), &space, 1).unwrap();
    for &theta in &[0.3, 1.2, 2.9] {
        let phase = n_op.matrix().mapv(|v| (C64::new(0.0, theta) * v).exp());
        let mut u: Array2<C64> = Array2::zeros(phase.raw_dim());
        let d = space.total_dim();
        for i in 0..d {
            for j in 0..d {
                u[(i, j)] = if i == j { phase[(i, i)] } else { C64::new(0.0, 0.0) };
            }
        }
        let rotated = u.dot(rho.matrix()).dot(&u.t().mapv(|v| v.conj()));
        let rho_rot = DensityMatrix::new(space.clone(), rotated).unwrap();
        for n in 2..=4u32 {
            let before = pbsim::observables::g_n(&rho, 1, n).unwrap();
            let after = pbsim::observables::g_n(&rho_rot, 1, n).unwrap();
            assert!(
                (before - after).abs() <= 1e-10 * before.abs().max(1.0),
                "g{n} changed under phase rotation: {before:.12e} vs {after:.12e}"
            );
        }
    }
}

#[test]
fn failed_grid_points_become_error_rows_without_aborting() {
    let mut spec = small_sweep_spec(7, vec![OutputKind::MeanPhonon, OutputKind::G2]);
    spec.axis = SweepAxis::OmegaDrive;
    spec.range = (-50.0, 50.0);
    let rows = run_sweep(&spec).unwrap();
    assert_eq!(rows.len(), 7);
    let failed = rows.iter().filter(|r| r.is_error()).count();
    assert!(failed > 0, "negative drive amplitudes must fail validation");
    for row in rows.iter().filter(|r| r.is_error()) {
        assert!(row.mean_phonon.is_nan());
        assert!(row.region_label.starts_with("error:"));
    }
    for row in rows.iter().filter(|r| !r.is_error()) {
        assert!(row.mean_phonon.is_finite());
    }
}
