mod common;

use common::*;
use divcurl::geometry::Mat3;
use divcurl::StabilizationWeights;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_element_matrix_matches_bilinear_forms(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let mesh = random_box(&mut rng);
        let eps = random_spd(&mut rng);
        let rho = StabilizationWeights::new(
            rand::Rng::gen_range(&mut rng, 0.1..10.0),
            rand::Rng::gen_range(&mut rng, 0.1..10.0),
            rand::Rng::gen_range(&mut rng, 0.1..10.0),
        ).unwrap();
        let defect = element_oracle_defect(&mesh, &eps, &rho);
        prop_assert!(defect <= 1e-12, "relative defect {defect:e}");
    }

    #[test]
    fn weak_operators_satisfy_their_definitions_on_boxes(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let mesh = random_box(&mut rng);
        prop_assert!(weak_identity_defect(&mesh, &mut rng) <= 1e-12);
    }

    #[test]
    fn weak_operators_satisfy_their_definitions_on_parallelepipeds(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let mesh = random_parallelepiped(&mut rng);
        prop_assert!(weak_identity_defect(&mesh, &mut rng) <= 1e-12);
    }

    #[test]
    fn element_faces_close(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let mesh = random_parallelepiped(&mut rng);
        prop_assert!(mesh.closure_defect(&mesh.elements[0]).max_abs() <= 1e-12);
    }
}

#[test]
fn element_matrix_of_sheared_element_matches_forms() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..20 {
        let mesh = random_parallelepiped(&mut rng);
        let d = element_oracle_defect(&mesh, &Mat3::identity(), &StabilizationWeights::default());
        assert!(d <= 1e-12, "{d:e}");
    }
}

#[test]
fn manufactured_data_match_finite_differences() {
    let mut rng = StdRng::seed_from_u64(11);
    for s in MANUFACTURED {
        for eps in [Mat3::identity(), random_spd(&mut rng)] {
            let [f, g, div_g] = manufactured_defect(s, &eps, 300, &mut rng);
            assert!(f <= 1e-6 && g <= 1e-6 && div_g <= 1e-6, "{s}: f {f:e}, g {g:e}, div g {div_g:e}");
        }
    }
}

#[test]
fn jacobians_match_finite_differences() {
    let mut rng = StdRng::seed_from_u64(12);
    for s in MANUFACTURED {
        for _ in 0..200 {
            let p = sample_point(s, &mut rng);
            let jac = s.jacobian(p);
            for j in 0..3 {
                let col = fd_partial(&|x| s.u(x), p, j, fd_step(s, p));
                for i in 0..3 {
                    assert!((jac.get(i, j) - col[i]).abs() < 1e-6, "{s} at {p:?}");
                }
            }
        }
    }
}
