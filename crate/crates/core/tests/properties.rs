mod common;

use std::sync::Arc;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use qsteer::assemblage::{build_assemblage, steering_figure, Assemblage, AssemblageEntry, MeasurementSet};
use qsteer::factory::{decompose_abt, random_state, unsteerable_mixture, t_state, werner};
use qsteer::gmodel::{complete_to_lhs, scale_gmodel, to_extreme, HiddenGrid, SnapMode};
use qsteer::qubit::{Outcome, ProjectiveMeasurement, TwoQubitState, Vec3};

fn unit(v: [f64; 3]) -> Option<Vec3> {
    let v = Vec3::from(v);
    (v.norm() > 1e-3).then(|| v.normalize())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn density_and_g_round_trip(seed in any::<u64>()) {
        let s = random_state(seed);
        let back = TwoQubitState::from_density(&s.density());
        assert_abs_diff_eq!(*back.g(), *s.g(), epsilon = 1e-12);
        prop_assert!(s.a().norm() <= 1.0 + 1e-10 && s.b().norm() <= 1.0 + 1e-10);
    }

    #[test]
    fn assemblage_invariants(seed in any::<u64>(), x in prop::array::uniform3(-1.0f64..1.0)) {
        let Some(x) = unit(x) else { return Ok(()) };
        let s = random_state(seed);
        let set = MeasurementSet::new("x", vec![x]).unwrap();
        let asm = build_assemblage(&s, &set);
        let (p, m) = (asm.entry(0, Outcome::Plus), asm.entry(0, Outcome::Minus));
        prop_assert!((p.p + m.p - 1.0).abs() < 1e-12);
        assert_abs_diff_eq!(p.sv + m.sv, s.b(), epsilon = 1e-12);
        prop_assert!(p.sv.norm() <= p.p + 1e-12 && m.sv.norm() <= m.p + 1e-12);
        // conditioned states lie on the steering figure
        let fig = steering_figure(&s);
        assert_abs_diff_eq!(p.sv, fig.point(&x), epsilon = 1e-12);
    }

    #[test]
    fn joint_probabilities_form_a_distribution(
        seed in any::<u64>(),
        x in prop::array::uniform3(-1.0f64..1.0),
        y in prop::array::uniform3(-1.0f64..1.0),
    ) {
        let (Some(x), Some(y)) = (unit(x), unit(y)) else { return Ok(()) };
        let s = random_state(seed);
        let (a, b) = (ProjectiveMeasurement::new(x).unwrap(), ProjectiveMeasurement::new(y).unwrap());
        let mut total = 0.0;
        for oa in Outcome::ALL {
            for ob in Outcome::ALL {
                let p = s.joint_probability(&a, &b, oa, ob);
                prop_assert!(p >= -1e-12);
                total += p;
            }
        }
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn local_unitaries_act_as_rotations(seed in any::<u64>(), useed in any::<u64>()) {
        let s = random_state(seed);
        let mut rng = common::rng(useed);
        let (ua, ub) = (common::random_unitary(&mut rng), common::random_unitary(&mut rng));
        let conj = common::conjugate(&s, &ua, &ub);
        let rot = s.rotated(
            &qsteer::qubit::rotation_from_unitary(&ua),
            &qsteer::qubit::rotation_from_unitary(&ub),
        );
        assert_abs_diff_eq!(*conj.g(), *rot.g(), epsilon = 1e-12);
        prop_assert_eq!(conj.is_entangled_ppt(), s.is_entangled_ppt());
    }

    #[test]
    fn werner_shrinked_vectors_point_against_the_axis(p in 0.0f64..=1.0, x in prop::array::uniform3(-1.0f64..1.0)) {
        let Some(x) = unit(x) else { return Ok(()) };
        let set = MeasurementSet::new("x", vec![x]).unwrap();
        let asm = build_assemblage(&werner(p).unwrap(), &set);
        assert_abs_diff_eq!(asm.entry(0, Outcome::Plus).sv, -x * (p / 2.0), epsilon = 1e-12);
    }

    #[test]
    fn mixtures_with_the_circle_state_are_entangled(i in 1u32..=17) {
        let comp = t_state(-0.5, -0.5, 0.0).unwrap();
        prop_assert!(unsteerable_mixture(i as f64 / 100.0, &comp).unwrap().is_entangled_ppt());
    }

    #[test]
    fn decompositions_recombine(seed in any::<u64>(), shrink in 0.0f64..1.0) {
        let s = random_state(seed);
        let small = TwoQubitState::from_blocks(s.a() * shrink / 3.0, s.b() * shrink / 3.0, s.t() * shrink / 3.0).unwrap();
        let d = decompose_abt(&small).unwrap();
        assert_abs_diff_eq!(d.recombined(), *small.g(), epsilon = 1e-12);
        prop_assert!((d.c.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn to_extreme_preserves_mass_and_bounds_the_moment_shift(seed in any::<u64>(), level in 0u32..=3) {
        let set = MeasurementSet::fibonacci(5).unwrap();
        let grid = HiddenGrid::icosphere(level);
        let mut rng = common::rng(seed);
        let interior = common::random_interior_model(&set, &mut rng);
        let (ext, rep) = to_extreme(&interior, &grid, SnapMode::Nearest).unwrap();
        prop_assert!((ext.s_quantity() - interior.s_quantity()).abs() <= 1e-12);
        let surface: f64 = interior.atoms().iter().map(|a| a.mass * a.eta.norm()).sum();
        let chord = 2.0 * (grid.mesh_size() / 2.0).sin();
        prop_assert!(rep.max_moment_shift <= surface * chord + 1e-12);
        let r = ext.reconstruct();
        for (k, m) in interior.moments().iter().enumerate() {
            for o in Outcome::ALL {
                let d = (r.moment(k, o) - m[o.index()]).norm();
                prop_assert!(d <= rep.max_moment_shift + 1e-12);
            }
        }
        let (exact, rep) = to_extreme(&interior, &grid, SnapMode::Exact).unwrap();
        prop_assert!(rep.max_moment_shift <= 1e-12);
        let r = exact.reconstruct();
        for (k, m) in interior.moments().iter().enumerate() {
            for o in Outcome::ALL {
                prop_assert!((r.moment(k, o) - m[o.index()]).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn completion_and_scaling(seed in any::<u64>(), c in 0.0f64..=1.0, c0 in 0.01f64..=1.0) {
        let set = MeasurementSet::fibonacci(4).unwrap();
        let grid = Arc::new(HiddenGrid::icosphere(1));
        let mut rng = common::rng(seed);
        let model = common::random_mass_one_model(&grid, &set, &mut rng);
        let model = scale_gmodel(&model, 0.3 + 0.7 * c, 1.0).unwrap();
        let scaled = scale_gmodel(&model, c, c0).unwrap();
        prop_assert!((scaled.s_quantity() - c / c0 * model.s_quantity()).abs() <= 1e-12);
        // the model reproduces the assemblage it reconstructs
        let target = reconstructed_assemblage(&model);
        let lhs = complete_to_lhs(&model, &target, 1e-7).unwrap();
        prop_assert!((lhs.model().s_quantity() - 1.0).abs() <= 1e-10);
        prop_assert!(lhs.model().check(&target, 1e-7).unwrap().passed);
    }
}

/// The assemblage a sub-normalized model reproduces: `p = mass / S`, `s = moment`.
pub fn reconstructed_assemblage(model: &qsteer::gmodel::ExtremeGModel) -> Assemblage {
    let r = model.reconstruct();
    let entries: Vec<[AssemblageEntry; 2]> = (0..model.measurements().len())
        .map(|k| Outcome::ALL.map(|o| AssemblageEntry { p: r.probability(k, o).unwrap(), sv: r.moment(k, o) }))
        .collect();
    let bob = entries[0][0].sv + entries[0][1].sv;
    Assemblage::from_entries(model.measurements().clone(), entries, bob, 1e-9).unwrap()
}
