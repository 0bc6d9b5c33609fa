//! Primitive ideals and membership.
//!
//! For a finite orbit `ō` of period `p` and `λ ∈ T`, the kernel `P_{ō,λ}` of
//! `π_{x,λ}` consists of the `a = Σ fₙδⁿ` whose strand sums
//!
//! ```text
//! S_{j,y}(λ) = Σ_l λ^l f_{lp+j}(y),    j = 0..p−1,  y ∈ ō,
//! ```
//!
//! all vanish; `π_{x,λ}(a) = Σ_j diag(S_j)·T^j` and the `T^j` have disjoint
//! supports. Membership in every `P_{ō,λ}` at once, and in the kernel of an
//! aperiodic orbit, means that every `fₙ` vanishes on the orbit (closure).
//!
//! Aperiodic ideals are identified by a finite sample of the orbit closure
//! or, on the aperiodic model, by the whole orbit; containment of closures
//! is tested on these samples.

use std::sync::Arc;

use rayon::prelude::*;

use crate::algebra::AlgebraElement;
use crate::dynsys::{Backend, DynSystem, Orbit, Point};
use crate::function::FunctionOnX;
use crate::linalg::eigenvalues;
use crate::reps::{periodic_rep_matrix, PeriodicRep};
use crate::scalar::{is_unit_modulus, Scalar, C64, UNIT_TOL};
use crate::{Error, Result};

/// Default membership tolerance in floating point; exact fields use `0`.
pub const DEFAULT_TOL: f64 = 1e-9;

/// The tolerance to use for a scalar field when none is given.
pub fn default_tol<S: Scalar>() -> f64 {
    if S::EXACT {
        0.0
    } else {
        DEFAULT_TOL
    }
}

/// What is known about an orbit closure.
#[derive(Debug, Clone, PartialEq)]
pub enum OrbitClosure {
    /// Finitely many distinct points, treated as the whole closure.
    Sampled(Vec<Point>),
    /// The full orbit of a point of the aperiodic model (which is the whole
    /// space of that model).
    WholeOrbit(Point),
}

impl OrbitClosure {
    fn contains(&self, x: &Point) -> bool {
        match self {
            OrbitClosure::Sampled(pts) => pts.contains(x),
            OrbitClosure::WholeOrbit(base) => Orbit::Infinite { base: base.clone() }.contains(x),
        }
    }

    fn contains_closure(&self, other: &OrbitClosure) -> bool {
        match other {
            OrbitClosure::Sampled(pts) => pts.iter().all(|y| self.contains(y)),
            OrbitClosure::WholeOrbit(base) => match self {
                OrbitClosure::Sampled(_) => false,
                OrbitClosure::WholeOrbit(_) => self.contains(base),
            },
        }
    }
}

/// A primitive ideal: `P_{ō,λ}` for a finite orbit, or `P_{ō}` for the
/// closure of an infinite orbit.
#[derive(Debug, Clone, PartialEq)]
pub enum PrimitiveIdealId<S> {
    Periodic { orbit: Orbit, lambda: S },
    Aperiodic { closure: OrbitClosure },
}

impl<S: Scalar> PrimitiveIdealId<S> {
    /// `P_{ō,λ}` for the orbit of a periodic point `x`.
    pub fn periodic(sys: &DynSystem, x: &Point, lambda: S) -> Result<Self> {
        let orbit = sys.orbit(x)?;
        if orbit.period().is_none() {
            return Err(Error::AperiodicPoint(x.to_string()));
        }
        if !is_unit_modulus(&lambda) {
            return Err(Error::InvalidArgument(format!(
                "|λ| must be 1, got {}",
                lambda.modulus()
            )));
        }
        Ok(PrimitiveIdealId::Periodic { orbit, lambda })
    }

    /// An aperiodic ideal given by distinct sample points of its closure.
    pub fn sampled(sys: &DynSystem, points: Vec<Point>) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            sys.check_point(p)?;
            if points[..i].contains(p) {
                return Err(Error::InvalidArgument(format!("point {p} listed twice")));
            }
        }
        if points.is_empty() {
            return Err(Error::InvalidArgument("an orbit closure is nonempty".into()));
        }
        Ok(PrimitiveIdealId::Aperiodic {
            closure: OrbitClosure::Sampled(points),
        })
    }

    /// The kernel of `π_x` for an aperiodic point `x` of the aperiodic model.
    pub fn whole_orbit(sys: &DynSystem, x: &Point) -> Result<Self> {
        if sys.period(x)?.is_some() {
            return Err(Error::PeriodicPoint(x.to_string()));
        }
        Ok(PrimitiveIdealId::Aperiodic {
            closure: OrbitClosure::WholeOrbit(x.clone()),
        })
    }
}

fn finite_points(orbit: &Orbit) -> Result<&[Point]> {
    orbit
        .points()
        .ok_or_else(|| Error::AperiodicPoint(orbit.base().to_string()))
}

/// `S[j][i] = Σ_l λ^l f_{lp+j}(yᵢ)` for the orbit points `yᵢ` in orbit order.
pub fn strand_sums<S: Scalar>(a: &AlgebraElement<S>, orbit: &Orbit, lambda: &S) -> Result<Vec<Vec<S>>> {
    let pts = finite_points(orbit)?;
    let sys = a.system();
    let p = pts.len() as i64;
    let mut sums = vec![vec![S::zero(); pts.len()]; pts.len()];
    for (n, f) in a.coeffs() {
        let (l, j) = (n.div_euclid(p), n.rem_euclid(p) as usize);
        let w = lambda.powi(l);
        for (i, y) in pts.iter().enumerate() {
            let v = f.evaluate(sys, y)?;
            if !v.is_zero() {
                sums[j][i] = sums[j][i].clone() + w.clone() * v;
            }
        }
    }
    Ok(sums)
}

/// Whether every `fₙ` vanishes (within `tol`) at the given points.
fn vanishes_on<S: Scalar>(a: &AlgebraElement<S>, pts: &[Point], tol: f64) -> Result<bool> {
    let sys = a.system();
    for (_, f) in a.coeffs() {
        for y in pts {
            if !f.evaluate(sys, y)?.is_negligible(tol) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `a ∈ id`: all strand sums negligible for a periodic ideal, all
/// coefficients negligible on the closure for an aperiodic one. Use
/// `tol = 0` for exact decisions.
pub fn is_member<S: Scalar>(a: &AlgebraElement<S>, id: &PrimitiveIdealId<S>, tol: f64) -> Result<bool> {
    match id {
        PrimitiveIdealId::Periodic { orbit, lambda } => Ok(strand_sums(a, orbit, lambda)?
            .iter()
            .flatten()
            .all(|s| s.is_negligible(tol))),
        PrimitiveIdealId::Aperiodic {
            closure: OrbitClosure::Sampled(pts),
        } => vanishes_on(a, pts, tol),
        PrimitiveIdealId::Aperiodic {
            closure: OrbitClosure::WholeOrbit(x),
        } => {
            a.system().check_point(x)?;
            // the orbit is the whole model space
            Ok(a.coeffs().all(|(_, f)| match f {
                FunctionOnX::Orbit { values, tail } => {
                    tail.is_negligible(tol) && values.values().all(|v| v.is_negligible(tol))
                }
                _ => false,
            }))
        }
    }
}

/// `a ∈ P_{ō,λ}` for every `λ ∈ T`, decided from the coefficients: every
/// `fₙ` vanishes on `ō`.
pub fn is_member_all_lambda<S: Scalar>(a: &AlgebraElement<S>, orbit: &Orbit, tol: f64) -> Result<bool> {
    vanishes_on(a, finite_points(orbit)?, tol)
}

/// A point `λ` of `T` at which some strand sum of `a` on `ō` exceeds `tol`,
/// or `None` if `a` lies in every `P_{ō,λ}`.
///
/// Each strand sum is a Laurent polynomial in `λ` spanning at most `d + 1`
/// powers, so it cannot vanish at all of `4(d + 1)` distinct points unless
/// it is identically zero. If rounding hides every sample under `tol`, the
/// sample with the largest strand sum is returned.
pub fn witness_lambda<S: Scalar>(a: &AlgebraElement<S>, orbit: &Orbit, tol: f64) -> Result<Option<S>> {
    if is_member_all_lambda(a, orbit, tol)? {
        return Ok(None);
    }
    let p = finite_points(orbit)?.len() as i64;
    let mut lo = vec![i64::MAX; p as usize];
    let mut hi = vec![i64::MIN; p as usize];
    for n in a.support() {
        let (l, j) = (n.div_euclid(p), n.rem_euclid(p) as usize);
        lo[j] = lo[j].min(l);
        hi[j] = hi[j].max(l);
    }
    let d = (0..p as usize)
        .filter(|&j| lo[j] <= hi[j])
        .map(|j| (hi[j] - lo[j]) as u64)
        .max()
        .unwrap_or(0);
    let m = 4 * (d + 1);
    let mut best: Option<(f64, S)> = None;
    for k in 0..m {
        let lambda = S::unit_sample(k, m);
        let sums = strand_sums(a, orbit, &lambda)?;
        if sums.iter().flatten().any(|s| !s.is_negligible(tol)) {
            return Ok(Some(lambda));
        }
        let size = sums.iter().flatten().map(S::modulus).fold(0.0, f64::max);
        if best.as_ref().is_none_or(|(b, _)| size > *b) {
            best = Some((size, lambda));
        }
    }
    Ok(best.map(|(_, l)| l))
}

/// A primitive ideal not containing `a`, or `None` for `a = 0` (up to
/// `tol` in `‖·‖₁`).
///
/// On finite systems the orbits are tried in enumeration order and the
/// first one where `a` is not in every `P_{ō,λ}` yields `P_{ō,λ}` with `λ`
/// from [`witness_lambda`]. On the aperiodic model the kernel of the orbit
/// is returned, based at a point where some coefficient is nonzero.
pub fn radical_witness<S: Scalar>(a: &AlgebraElement<S>, tol: f64) -> Result<Option<PrimitiveIdealId<S>>> {
    let negligible = if tol == 0.0 {
        a.is_zero()
    } else {
        a.one_norm() <= tol
    };
    if negligible {
        return Ok(None);
    }
    let sys = a.system();
    match sys.backend() {
        Backend::FinitePermutation { .. } => {
            for orbit in sys.orbit_space()? {
                if let Some(lambda) = witness_lambda(a, &orbit, tol)? {
                    return Ok(Some(PrimitiveIdealId::Periodic { orbit, lambda }));
                }
            }
            // only reachable when every value is within tol but ‖a‖₁ > tol
            Ok(None)
        }
        Backend::AperiodicOrbit { .. } => {
            let base = a
                .coeffs()
                .find_map(|(_, f)| match f {
                    FunctionOnX::Orbit { values, tail } if tail.is_negligible(tol) => values
                        .iter()
                        .find(|(_, v)| !v.is_negligible(tol))
                        .map(|(k, _)| *k),
                    FunctionOnX::Orbit { values, .. } => {
                        // the tail value is attained just past the stored keys
                        Some(values.keys().next_back().map_or(0, |k| k + 1))
                    }
                    _ => None,
                })
                .unwrap_or(0);
            Ok(Some(PrimitiveIdealId::whole_orbit(sys, &Point::Orbit(base))?))
        }
        Backend::RationalRotation { .. } => Err(Error::Unsupported(
            "radical witnesses need a finite system or the aperiodic model".into(),
        )),
    }
}

fn lambda_eq<S: Scalar>(a: &S, b: &S) -> bool {
    if S::EXACT {
        a == b
    } else {
        (a.clone() - b.clone()).modulus() <= UNIT_TOL
    }
}

/// `id1 ⊆ id2`:
///
/// * periodic in periodic iff same orbit and same `λ`;
/// * aperiodic in aperiodic iff closure₁ ⊇ closure₂;
/// * aperiodic in periodic iff closure₁ ⊇ ō₂;
/// * periodic in aperiodic never.
pub fn ideal_inclusion<S: Scalar>(id1: &PrimitiveIdealId<S>, id2: &PrimitiveIdealId<S>) -> bool {
    use PrimitiveIdealId::*;
    match (id1, id2) {
        (Periodic { orbit: o1, lambda: l1 }, Periodic { orbit: o2, lambda: l2 }) => {
            o1.same_as(o2) && lambda_eq(l1, l2)
        }
        (Aperiodic { closure: c1 }, Aperiodic { closure: c2 }) => c1.contains_closure(c2),
        (Aperiodic { closure }, Periodic { orbit, .. }) => match orbit.points() {
            Some(pts) => pts.iter().all(|y| closure.contains(y)),
            None => false,
        },
        (Periodic { .. }, Aperiodic { .. }) => false,
    }
}

/// Membership of `a` and of `a*` in the same ideal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StarMembership {
    pub element: bool,
    pub adjoint: bool,
}

impl StarMembership {
    /// Primitive ideals are selfadjoint, so the two always agree.
    pub fn consistent(&self) -> bool {
        self.element == self.adjoint
    }
}

pub fn selfadjointness_check<S: Scalar>(
    a: &AlgebraElement<S>,
    id: &PrimitiveIdealId<S>,
    tol: f64,
) -> Result<StarMembership> {
    Ok(StarMembership {
        element: is_member(a, id, tol)?,
        adjoint: is_member(&a.involution()?, id, tol)?,
    })
}

/// The `m` points `e^{2πik/m}`.
pub fn unit_circle_samples(m: usize) -> Vec<C64> {
    (0..m as u64).map(|k| C64::unit_sample(k, m as u64)).collect()
}

/// The union over all orbits and the given `λ` of the eigenvalues of
/// `π_{x,λ}(a)`, sorted by real then imaginary part. This is a
/// representation-level spectrum; it is not claimed to equal the spectrum of
/// `a` in `ℓ¹(Σ)`.
pub fn spectrum_union<S: Scalar>(a: &AlgebraElement<S>, lambdas: &[C64]) -> Result<Vec<C64>> {
    let sys = a.system();
    if !sys.is_finite() {
        return Err(Error::Unsupported(
            "spectra are computed on finite permutation systems".into(),
        ));
    }
    let a = a.to_c64();
    let jobs: Vec<(Point, C64)> = sys
        .orbit_space()?
        .iter()
        .flat_map(|o| lambdas.iter().map(move |l| (o.base().clone(), *l)))
        .collect();
    let parts = jobs
        .par_iter()
        .map(|(x, l)| {
            let rep = PeriodicRep::new(sys, x.clone(), *l)?;
            Ok(eigenvalues(&periodic_rep_matrix(&rep, &a)?.to_dmatrix()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out: Vec<C64> = parts.into_iter().flatten().collect();
    out.sort_by(|u, v| u.re.total_cmp(&v.re).then(u.im.total_cmp(&v.im)));
    Ok(out)
}

/// An element of `keep` but not of `drop`, for distinct periodic ideals:
/// `1 − δᵖ/λ` when the orbits agree (it lies in `P_{ō,μ}` iff `μ = λ`), and
/// the indicator of the second orbit otherwise (it lies in every ideal of
/// the first orbit and in none of the second).
pub fn separating_element<S: Scalar>(
    sys: &Arc<DynSystem>,
    keep: &PrimitiveIdealId<S>,
    drop: &PrimitiveIdealId<S>,
) -> Result<AlgebraElement<S>> {
    let (PrimitiveIdealId::Periodic { orbit: o1, lambda: l1 }, PrimitiveIdealId::Periodic { orbit: o2, lambda: l2 }) =
        (keep, drop)
    else {
        return Err(Error::Unsupported("separation is built for periodic ideals".into()));
    };
    if o1.same_as(o2) {
        if lambda_eq(l1, l2) {
            return Err(Error::InvalidArgument("the ideals coincide".into()));
        }
        let p = finite_points(o1)?.len() as i64;
        AlgebraElement::scalar_series(sys, [(0, S::one()), (p, -(S::one() / l1.clone()))])
    } else {
        let f = FunctionOnX::indicator(sys, finite_points(o2)?)?;
        AlgebraElement::embed_function(sys, f)
    }
}
