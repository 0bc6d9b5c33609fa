mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use common::{random_element, random_function, random_unit, rng, RandomScalar};
use crossed_ell1::matrix::ComplexMatrix;
use crossed_ell1::reps::{
    aperiodic_apply, delta_matrix, density_solve, find_intertwiner, periodic_rep_matrix, PeriodicRep, SeqVector,
    SolveOptions,
};
use crossed_ell1::{AlgebraElement, DynSystem, GaussianRational, Point, Scalar, C64};
use proptest::prelude::*;
use rand::Rng;

/// Periodic points of each backend that admits them.
fn periodic_cases() -> Vec<(Arc<DynSystem>, Vec<Point>)> {
    let perm = Arc::new(DynSystem::from_cycles(7, &[&[0, 1, 2, 3], &[4, 5]]).unwrap());
    let rot = Arc::new(DynSystem::rational_rotation(1, 4).unwrap());
    vec![
        (perm, vec![Point::Index(0), Point::Index(5), Point::Index(6)]),
        (rot, vec![Point::angle(0, 1), Point::angle(1, 4)]),
    ]
}

fn check_homomorphism<S: RandomScalar>(seed: u64, tol: f64) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    for (sys, pts) in periodic_cases() {
        for x in pts {
            let rep = PeriodicRep::new(&sys, x, random_unit::<S>(&mut r)).unwrap();
            let a: AlgebraElement<S> = random_element(&mut r, &sys, 5, 3);
            let b: AlgebraElement<S> = random_element(&mut r, &sys, 5, 3);
            let pa = periodic_rep_matrix(&rep, &a).unwrap();
            let pb = periodic_rep_matrix(&rep, &b).unwrap();
            let pab = periodic_rep_matrix(&rep, &a.multiply(&b).unwrap()).unwrap();
            prop_assert!(pab.max_abs_diff(&pa.mul(&pb)) <= tol);
            let pstar = periodic_rep_matrix(&rep, &a.involution().unwrap()).unwrap();
            prop_assert!(pstar.max_abs_diff(&pa.adjoint()) <= tol);
            let one = periodic_rep_matrix(&rep, &AlgebraElement::unit(&sys)).unwrap();
            prop_assert!(one.max_abs_diff(&ComplexMatrix::identity(rep.dim())) <= tol);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn periodic_reps_are_star_homomorphisms_exact(seed in any::<u64>()) {
        check_homomorphism::<GaussianRational>(seed, 0.0)?;
    }

    #[test]
    fn periodic_reps_are_star_homomorphisms_float(seed in any::<u64>()) {
        check_homomorphism::<C64>(seed, 1e-10)?;
    }

    #[test]
    fn sequence_rep_is_multiplicative(seed in any::<u64>()) {
        let sys = Arc::new(DynSystem::aperiodic_orbit(64).unwrap());
        let mut r = rng(seed);
        let a: AlgebraElement<GaussianRational> = random_element(&mut r, &sys, 4, 3);
        let b: AlgebraElement<GaussianRational> = random_element(&mut r, &sys, 4, 3);
        let v = SeqVector::new((-3..=3).map(|k| (k, GaussianRational::random(&mut r))));
        let x = Point::Orbit(r.random_range(-4..=4));
        let lhs = aperiodic_apply(&x, &a.multiply(&b).unwrap(), &v).unwrap();
        let rhs = aperiodic_apply(&x, &a, &aperiodic_apply(&x, &b, &v).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn delta_matrix_is_unitary_with_pth_power_lambda(p in 1usize..9, k in 0u64..12) {
        let lambda = GaussianRational::unit_sample(k, 12);
        let t = delta_matrix(p, &lambda).unwrap();
        prop_assert_eq!(t.mul(&t.adjoint()), ComplexMatrix::identity(p));
        prop_assert_eq!(t.pow(p as u32), ComplexMatrix::identity(p).scale(&lambda));
        for row in t.rows() {
            for z in row {
                prop_assert!(Scalar::is_zero(&z) || z == GaussianRational::one() || z == lambda);
            }
        }
    }

    #[test]
    fn alpha_is_conjugation_by_t(seed in any::<u64>()) {
        let mut r = rng(seed);
        for (sys, pts) in periodic_cases() {
            for x in pts {
                let rep = PeriodicRep::new(&sys, x, random_unit::<GaussianRational>(&mut r)).unwrap();
                let f = random_function::<GaussianRational>(&mut r, &sys);
                let t = delta_matrix(rep.dim(), rep.lambda()).unwrap();
                let rho = periodic_rep_matrix(&rep, &AlgebraElement::embed_function(&sys, f.clone()).unwrap()).unwrap();
                let alpha = AlgebraElement::embed_function(&sys, f.alpha_power(&sys, 1).unwrap()).unwrap();
                let lhs = periodic_rep_matrix(&rep, &alpha).unwrap();
                prop_assert_eq!(lhs, t.mul(&rho).mul(&t.adjoint()));
            }
        }
    }

    #[test]
    fn delta_transports_point_eigenspaces(seed in any::<u64>()) {
        // e_k spans the joint eigenspace of π(f) at σᵏx; π(δ)e_k must span
        // the one at σᵏ⁺¹x
        let mut r = rng(seed);
        for (sys, pts) in periodic_cases() {
            for x in pts {
                let rep = PeriodicRep::new(&sys, x.clone(), random_unit::<GaussianRational>(&mut r)).unwrap();
                let p = rep.dim();
                let d = periodic_rep_matrix(&rep, &AlgebraElement::delta_power(&sys, 1)).unwrap();
                let f = random_function::<GaussianRational>(&mut r, &sys);
                let pf = periodic_rep_matrix(&rep, &AlgebraElement::embed_function(&sys, f.clone()).unwrap()).unwrap();
                for k in 0..p {
                    let image: Vec<GaussianRational> = (0..p).map(|i| d[(i, k)].clone()).collect();
                    let support: Vec<usize> = (0..p).filter(|i| !Scalar::is_zero(&image[*i])).collect();
                    prop_assert_eq!(support, vec![(k + 1) % p]);
                    let y = sys.apply_sigma(&x, k as i64 + 1).unwrap();
                    let fy = f.evaluate(&sys, &y).unwrap();
                    for i in 0..p {
                        let lhs = (0..p).fold(GaussianRational::zero(), |s, j| s + pf[(i, j)].clone() * image[j].clone());
                        prop_assert_eq!(lhs, fy.clone() * image[i].clone());
                    }
                }
            }
        }
    }

    #[test]
    fn intertwiners_exist_along_an_orbit(seed in any::<u64>(), shift in 1i64..6) {
        let mut r = rng(seed);
        let sys = Arc::new(DynSystem::from_cycles(7, &[&[0, 1, 2, 3], &[4, 5]]).unwrap());
        let lambda = random_unit::<C64>(&mut r);
        let x = Point::Index(0);
        let y = sys.apply_sigma(&x, shift).unwrap();
        let r1 = PeriodicRep::new(&sys, x, lambda).unwrap();
        let r2 = PeriodicRep::new(&sys, y, lambda).unwrap();
        let u = find_intertwiner(&r1, &r2).unwrap().expect("same orbit and λ");
        prop_assert!(u.unitarity_defect() < 1e-10);
        let a: AlgebraElement<C64> = random_element(&mut r, &sys, 4, 3);
        let lhs = u.mul(&periodic_rep_matrix(&r1, &a).unwrap());
        let rhs = periodic_rep_matrix(&r2, &a).unwrap().mul(&u);
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }

    #[test]
    fn exact_solver_reproduces_tau(seed in any::<u64>()) {
        let sys = Arc::new(DynSystem::aperiodic_orbit(64).unwrap());
        let mut r = rng(seed);
        let x = Point::Orbit(r.random_range(-3..=3));
        let rho = random_vector(&mut r, 6);
        let tau = random_vector(&mut r, 6);
        prop_assume!(!rho.is_zero() && !tau.is_zero());
        let sol = density_solve(&sys, &x, &rho, &tau, &SolveOptions::default()).unwrap();
        prop_assert_eq!(aperiodic_apply(&x, &sol.a, &rho).unwrap(), tau.clone());
        let max_rho = rho.entries().map(|(_, z)| z.modulus()).fold(0.0, f64::max);
        prop_assert!(sol.a.one_norm() <= (1.0 + sol.epsilon) * tau.norm(crossed_ell1::reps::LpOrder::P(1)) / max_rho * (1.0 + 1e-12));
    }
}

fn random_vector(r: &mut common::TestRng, radius: i64) -> SeqVector<GaussianRational> {
    let entries: BTreeMap<i64, GaussianRational> = (0..r.random_range(1..=5))
        .map(|_| (r.random_range(-radius..=radius), GaussianRational::random(r)))
        .collect();
    SeqVector::new(entries)
}
