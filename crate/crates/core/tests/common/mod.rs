//! Random objects shared by the integration suites.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use crossed_ell1::dynsys::Backend;
use crossed_ell1::scalar::gaussian;
use crossed_ell1::sspace::{SSpaceSubset, TSubset};
use crossed_ell1::{AlgebraElement, DynSystem, FunctionOnX, GaussianRational, Point, Scalar, C64};
use crossed_ell1::ideals::PrimitiveIdealId;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Scalars that can be drawn at random: small Gaussian rationals, or floats
/// in the unit square.
pub trait RandomScalar: Scalar {
    fn random(rng: &mut TestRng) -> Self;
}

impl RandomScalar for GaussianRational {
    fn random(rng: &mut TestRng) -> Self {
        let den = rng.random_range(1..=4);
        gaussian(rng.random_range(-4..=4), rng.random_range(-4..=4), den)
    }
}

impl RandomScalar for C64 {
    fn random(rng: &mut TestRng) -> Self {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    }
}

/// Sometimes zero, so that sparse patterns occur.
fn sparse<S: RandomScalar>(rng: &mut TestRng) -> S {
    if rng.random_bool(0.3) {
        S::zero()
    } else {
        S::random(rng)
    }
}

pub fn random_perm(rng: &mut TestRng, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

pub fn random_finite_system(rng: &mut TestRng, max_n: usize) -> Arc<DynSystem> {
    let n = rng.random_range(1..=max_n);
    Arc::new(DynSystem::finite_permutation(random_perm(rng, n)).unwrap())
}

/// Cycles of a permutation, each starting at its smallest point, listed by
/// that point.
pub fn cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut c = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            c.push(i);
            i = perm[i];
        }
        out.push(c);
    }
    out
}

pub fn random_function<S: RandomScalar>(rng: &mut TestRng, sys: &DynSystem) -> FunctionOnX<S> {
    match sys.backend() {
        Backend::FinitePermutation { perm, .. } => FunctionOnX::table((0..perm.len()).map(|_| sparse(rng)).collect()),
        Backend::RationalRotation { .. } => {
            let terms = rng.random_range(1..=3);
            FunctionOnX::trig((0..terms).map(|_| (rng.random_range(-2..=2), S::random(rng))).collect::<Vec<_>>())
        }
        Backend::AperiodicOrbit { .. } => {
            let values: BTreeMap<i64, S> = (0..rng.random_range(1..=4))
                .map(|_| (rng.random_range(-3..=3), S::random(rng)))
                .collect();
            let tail = sparse(rng);
            FunctionOnX::orbit_table_with_tail(values, tail)
        }
    }
}

/// `Σ fₙδⁿ` with up to `terms` exponents in `-deg..=deg`.
pub fn random_element<S: RandomScalar>(
    rng: &mut TestRng,
    sys: &Arc<DynSystem>,
    deg: i64,
    terms: usize,
) -> AlgebraElement<S> {
    let k = rng.random_range(1..=terms);
    let coeffs: Vec<_> = (0..k)
        .map(|_| (rng.random_range(-deg..=deg), random_function(rng, sys)))
        .collect();
    AlgebraElement::new(sys, coeffs).unwrap()
}

pub fn random_nonzero_element<S: RandomScalar>(
    rng: &mut TestRng,
    sys: &Arc<DynSystem>,
    deg: i64,
    terms: usize,
) -> AlgebraElement<S> {
    loop {
        let a = random_element(rng, sys, deg, terms);
        if !a.is_zero() {
            return a;
        }
    }
}

/// An exact unit-modulus scalar, or a root of unity in float mode.
pub fn random_unit<S: Scalar>(rng: &mut TestRng) -> S {
    let m = rng.random_range(1..=12u64);
    S::unit_sample(rng.random_range(0..m), m)
}

/// `1 − λ̄δᵖ`, which every `π_{x,λ}` with `x` of period `p` sends to zero.
pub fn annihilator<S: Scalar>(sys: &Arc<DynSystem>, p: usize, lambda: &S) -> AlgebraElement<S> {
    AlgebraElement::scalar_series(sys, [(0, S::one()), (p as i64, -lambda.conj())]).unwrap()
}

/// The indicator of a set of points as an element of degree zero.
pub fn indicator<S: Scalar>(sys: &Arc<DynSystem>, pts: &[Point]) -> AlgebraElement<S> {
    AlgebraElement::embed_function(sys, FunctionOnX::indicator(sys, pts).unwrap()).unwrap()
}

pub fn random_tsubset(r: &mut TestRng) -> TSubset {
    match r.random_range(0..8) {
        0 => TSubset::empty(),
        1 => TSubset::full(),
        _ => {
            let arcs: Vec<(f64, f64)> = (0..r.random_range(0..3))
                .map(|_| (r.random_range(0.0..1.0), r.random_range(0.0..1.0)))
                .collect();
            let points: Vec<f64> = (0..r.random_range(0..3)).map(|_| r.random_range(0.0..1.0)).collect();
            TSubset::new(&arcs, &points).unwrap()
        }
    }
}

pub fn random_sspace_subset(r: &mut TestRng, orbits: usize) -> SSpaceSubset {
    let mut parts = Vec::new();
    for o in 0..orbits {
        if r.random_bool(0.7) {
            parts.push((o, random_tsubset(r)));
        }
    }
    SSpaceSubset::new(parts)
}

/// A random element that lies in `P_{ō,λ}` about half of the time.
pub fn element_near_ideal(
    r: &mut TestRng,
    sys: &Arc<DynSystem>,
    id: &PrimitiveIdealId<GaussianRational>,
) -> AlgebraElement<GaussianRational> {
    let PrimitiveIdealId::Periodic { orbit, lambda } = id else {
        unreachable!()
    };
    let b: AlgebraElement<GaussianRational> = random_element(r, sys, 3, 3);
    if r.random_bool(0.5) {
        return b;
    }
    let p = orbit.period().unwrap();
    let pts = orbit.points().unwrap();
    let others: Vec<_> = sys.points().unwrap().into_iter().filter(|y| !pts.contains(y)).collect();
    let c: AlgebraElement<GaussianRational> = random_element(r, sys, 2, 2);
    let member = b.multiply(&annihilator(sys, p, lambda)).unwrap();
    if others.is_empty() {
        member
    } else {
        member.add(&c.multiply(&indicator(sys, &others)).unwrap()).unwrap()
    }
}

pub fn random_periodic_ideal(r: &mut TestRng, sys: &Arc<DynSystem>) -> PrimitiveIdealId<GaussianRational> {
    let x = sys.points().unwrap().choose(r).unwrap().clone();
    PrimitiveIdealId::periodic(sys, &x, random_unit::<GaussianRational>(r)).unwrap()
}
