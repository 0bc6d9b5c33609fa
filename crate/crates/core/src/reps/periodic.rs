//! Finite dimensional representations `π_{x,λ}` on `C^p`.
//!
//! With the basis `e_0, …, e_{p−1}` indexed by the orbit `x, σx, …, σ^{p−1}x`,
//! functions act diagonally, `ρ_x(f) = diag(f(x), f(σx), …, f(σ^{p−1}x))`,
//! and `δ` acts by the cyclic matrix `T_λ` with ones on the subdiagonal and
//! `λ` in the top-right corner:
//!
//! ```text
//! T_λ e_j = e_{j+1}   (j < p − 1),     T_λ e_{p−1} = λ e_0.
//! ```
//!
//! A transposed convention would break the covariance relation
//! `ρ(α(f)) = T ρ(f) T⁻¹`, which the tests check.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{same_system, AlgebraElement};
use crate::dynsys::{DynSystem, Point};
use crate::function::FunctionOnX;
use crate::linalg::{intertwining_system, null_space, unvec, RANK_REL_TOL};
use crate::matrix::ComplexMatrix;
use crate::scalar::{is_unit_modulus, Scalar, C64};
use crate::{Error, Result};

/// The representation `π_{x,λ}` for a point `x` of finite period.
#[derive(Debug, Clone)]
pub struct PeriodicRep<S> {
    sys: Arc<DynSystem>,
    x: Point,
    lambda: S,
    orbit: Vec<Point>,
}

impl<S: Scalar> PeriodicRep<S> {
    pub fn new(sys: &Arc<DynSystem>, x: Point, lambda: S) -> Result<Self> {
        let period = sys
            .period(&x)?
            .ok_or_else(|| Error::AperiodicPoint(x.to_string()))?;
        if !is_unit_modulus(&lambda) {
            return Err(Error::InvalidArgument(format!(
                "|λ| must be 1, got {}",
                lambda.modulus()
            )));
        }
        let orbit = (0..period as i64)
            .map(|j| sys.apply_sigma(&x, j))
            .collect::<Result<Vec<_>>>()?;
        Ok(PeriodicRep {
            sys: Arc::clone(sys),
            x,
            lambda,
            orbit,
        })
    }

    pub fn system(&self) -> &Arc<DynSystem> {
        &self.sys
    }

    pub fn base_point(&self) -> &Point {
        &self.x
    }

    pub fn lambda(&self) -> &S {
        &self.lambda
    }

    /// The dimension `p`, equal to the period of the base point.
    pub fn dim(&self) -> usize {
        self.orbit.len()
    }

    /// `x, σx, …, σ^{p−1}x`; basis vector `e_j` belongs to the `j`-th entry.
    pub fn orbit(&self) -> &[Point] {
        &self.orbit
    }

    /// Evaluates `f` along the orbit, giving the diagonal of `ρ_x(f)`.
    pub fn diagonal_of(&self, f: &FunctionOnX<S>) -> Result<Vec<S>> {
        self.orbit
            .iter()
            .map(|y| f.evaluate(&self.sys, y))
            .collect()
    }
}

/// The cyclic matrix `T_λ` of size `p`.
pub fn delta_matrix<S: Scalar>(p: usize, lambda: &S) -> Result<ComplexMatrix<S>> {
    if p < 1 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    if !is_unit_modulus(lambda) {
        return Err(Error::InvalidArgument(format!(
            "|λ| must be 1, got {}",
            lambda.modulus()
        )));
    }
    let mut m = ComplexMatrix::zeros(p);
    for j in 0..p - 1 {
        m[(j + 1, j)] = S::one();
    }
    m[(0, p - 1)] = lambda.clone();
    Ok(m)
}

/// `π_{x,λ}(a) = Σₙ ρ_x(fₙ)·T_λⁿ`.
pub fn periodic_rep_matrix<S: Scalar>(
    rep: &PeriodicRep<S>,
    a: &AlgebraElement<S>,
) -> Result<ComplexMatrix<S>> {
    if !same_system(&rep.sys, a.system()) {
        return Err(Error::SystemMismatch);
    }
    let p = rep.dim();
    let pi = p as i64;
    let mut m = ComplexMatrix::<S>::zeros(p);
    for (n, f) in a.coeffs() {
        let diag = rep.diagonal_of(f)?;
        // Tⁿ = λ^l·T^j for n = lp + j, and T^j e_k = e_{k+j} or λ·e_{k+j−p}
        let (l, j) = (n.div_euclid(pi), n.rem_euclid(pi) as usize);
        let lam_l = rep.lambda.powi(l);
        let lam_l1 = lam_l.clone() * rep.lambda.clone();
        for k in 0..p {
            let i = (k + j) % p;
            if diag[i].is_zero() {
                continue;
            }
            let factor = if k + j < p { &lam_l } else { &lam_l1 };
            m[(i, k)] = m[(i, k)].clone() + diag[i].clone() * factor.clone();
        }
    }
    Ok(m)
}

/// `δ` followed by a bump at each listed point (a point indicator on finite
/// systems).
fn generator_elements<S: Scalar>(
    sys: &Arc<DynSystem>,
    points: &[Point],
) -> Result<Vec<AlgebraElement<S>>> {
    let mut gens = vec![AlgebraElement::delta_power(sys, 1)];
    for y in points {
        let e = FunctionOnX::bump(sys, y, 0)?;
        gens.push(AlgebraElement::embed_function(sys, e)?);
    }
    Ok(gens)
}

/// Images of `δ` and of a bump at each orbit point, in orbit order. These
/// are `T_λ` and the diagonal matrix units, which generate the whole image.
pub fn rep_generators<S: Scalar>(rep: &PeriodicRep<S>) -> Result<Vec<ComplexMatrix<S>>> {
    generator_elements(&rep.sys, &rep.orbit)?
        .iter()
        .map(|g| periodic_rep_matrix(rep, g))
        .collect()
}

/// Dimension of `{M : MG = GM for every listed G}`, by singular-value rank
/// detection with relative threshold [`RANK_REL_TOL`].
pub fn commutant_dimension_of_set(matrices: &[DMatrix<C64>]) -> usize {
    let Some(first) = matrices.first() else {
        return 0;
    };
    let n = first.nrows();
    let pairs: Vec<_> = matrices.iter().map(|m| (m.clone(), m.clone())).collect();
    null_space(&intertwining_system(&pairs, n, n), RANK_REL_TOL).len()
}

/// Commutant dimension of `π_{x,λ}`; `1` certifies irreducibility.
pub fn commutant_dimension<S: Scalar>(rep: &PeriodicRep<S>) -> Result<usize> {
    let gens: Vec<_> = rep_generators(rep)?
        .iter()
        .map(ComplexMatrix::to_dmatrix)
        .collect();
    Ok(commutant_dimension_of_set(&gens))
}

/// The unitary `U` with `Ue_0 = e′_{p−1}` and `Ue_j = λe′_{j−1}` that
/// intertwines `π_{x,λ}` with `π_{σx,λ}`. `None` unless `rep2` sits at
/// `σx` with the same `λ`.
pub fn explicit_intertwiner<S: Scalar>(
    rep1: &PeriodicRep<S>,
    rep2: &PeriodicRep<S>,
) -> Result<Option<ComplexMatrix<S>>> {
    if !same_system(&rep1.sys, &rep2.sys) {
        return Err(Error::SystemMismatch);
    }
    if rep1.lambda != rep2.lambda || rep1.sys.apply_sigma(&rep1.x, 1)? != rep2.x {
        return Ok(None);
    }
    let p = rep1.dim();
    let mut u = ComplexMatrix::zeros(p);
    u[(p - 1, 0)] = S::one();
    for j in 1..p {
        u[(j - 1, j)] = rep1.lambda.clone();
    }
    Ok(Some(u))
}

/// An invertible `U` with `U·π₁(a) = π₂(a)·U`, normalised to be unitary, or
/// `None` when the representations are inequivalent.
///
/// Uses [`explicit_intertwiner`] when it applies. Otherwise the space of
/// solutions of `U·π₁(g) = π₂(g)·U` over the generators `g` is computed; a
/// random combination of a basis is tested for invertibility (three
/// attempts, seeded deterministically).
pub fn find_intertwiner<S: Scalar>(
    rep1: &PeriodicRep<S>,
    rep2: &PeriodicRep<S>,
) -> Result<Option<ComplexMatrix<C64>>> {
    if !same_system(&rep1.sys, &rep2.sys) {
        return Err(Error::SystemMismatch);
    }
    if rep1.dim() != rep2.dim() {
        return Ok(None);
    }
    if let Some(u) = explicit_intertwiner(rep1, rep2)? {
        return Ok(Some(u.to_c64()));
    }
    let p = rep1.dim();
    // the same algebra elements in both: δ and bumps on both orbits
    let mut points = rep1.orbit.clone();
    points.extend(rep2.orbit.iter().filter(|y| !rep1.orbit.contains(y)).cloned());
    let mut pairs = Vec::new();
    for g in generator_elements(&rep1.sys, &points)? {
        pairs.push((
            periodic_rep_matrix(rep1, &g)?.to_dmatrix(),
            periodic_rep_matrix(rep2, &g)?.to_dmatrix(),
        ));
    }
    let basis = null_space(&intertwining_system(&pairs, p, p), RANK_REL_TOL);
    if basis.is_empty() {
        return Ok(None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e11_u64);
    for _ in 0..3 {
        let mut v = DVector::<C64>::zeros(p * p);
        for b in &basis {
            let c = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            v += b * c;
        }
        let u = unvec(&v, p, p);
        if is_invertible(&u) {
            // Schur's lemma: U is a multiple of a unitary, and ‖unitary‖_F = √p
            let scale = (p as f64).sqrt() / u.norm();
            return Ok(Some(ComplexMatrix::from_dmatrix(&(u * C64::new(scale, 0.0)))));
        }
    }
    Ok(None)
}

/// Invertibility via the ratio of extreme singular values, the numerically
/// stable form of `det U ≠ 0`.
fn is_invertible(u: &DMatrix<C64>) -> bool {
    let sv = u.singular_values();
    let max = sv.max();
    max > 0.0 && sv.min() > RANK_REL_TOL * max
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{gaussian, GaussianRational};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn delta_matrix_examples() {
        let i = C64::new(0.0, 1.0);
        let t = delta_matrix(2, &i).unwrap();
        assert_eq!(t.rows(), vec![vec![c(0.0), i], vec![c(1.0), c(0.0)]]);
        let t1 = delta_matrix(1, &i).unwrap();
        assert_eq!(t1.rows(), vec![vec![i]]);
        assert!(delta_matrix(0, &i).is_err());
        assert!(delta_matrix(2, &c(2.0)).is_err());
    }

    #[test]
    fn delta_matrix_power_is_lambda() {
        let lam = C64::from_polar(1.0, std::f64::consts::TAU / 7.0);
        let t = delta_matrix(3, &lam).unwrap();
        let tp = t.pow(3);
        assert!(tp.max_abs_diff(&ComplexMatrix::identity(3).scale(&lam)) < 1e-15);
        assert!(t.unitarity_defect() < 1e-15);

        // exact: T^p = λ·I with no rounding at all
        let lam = GaussianRational::unit_sample(1, 7);
        let t = delta_matrix(3, &lam).unwrap();
        assert_eq!(t.pow(3), ComplexMatrix::identity(3).scale(&lam));
    }

    #[test]
    fn swap_examples() {
        let sys = Arc::new(DynSystem::finite_permutation(vec![1, 0]).unwrap());
        let rep = PeriodicRep::new(&sys, Point::Index(0), c(1.0)).unwrap();
        let f = AlgebraElement::embed_function(&sys, FunctionOnX::table(vec![c(5.0), c(7.0)])).unwrap();
        assert_eq!(
            periodic_rep_matrix(&rep, &f).unwrap(),
            ComplexMatrix::diagonal(vec![c(5.0), c(7.0)])
        );
        let d = AlgebraElement::delta_power(&sys, 1);
        assert_eq!(
            periodic_rep_matrix(&rep, &d).unwrap().rows(),
            vec![vec![c(0.0), c(1.0)], vec![c(1.0), c(0.0)]]
        );
    }

    #[test]
    fn three_cycle_monomial_matches_direct_product() {
        let sys = Arc::new(DynSystem::from_cycles(3, &[&[0, 1, 2]]).unwrap());
        let lam = gaussian(3, 4, 5);
        let rep = PeriodicRep::new(&sys, Point::Index(0), lam.clone()).unwrap();
        let f = FunctionOnX::table(vec![gaussian(1, 0, 1), gaussian(2, 0, 1), gaussian(3, 0, 1)]);
        let a = AlgebraElement::monomial(&sys, 2, f).unwrap();
        let t = delta_matrix(3, &lam).unwrap();
        let expected = ComplexMatrix::diagonal(vec![gaussian(1, 0, 1), gaussian(2, 0, 1), gaussian(3, 0, 1)])
            .mul(&t.mul(&t));
        assert_eq!(periodic_rep_matrix(&rep, &a).unwrap(), expected);
    }

    #[test]
    fn negative_powers_use_the_inverse() {
        let sys = Arc::new(DynSystem::from_cycles(3, &[&[0, 1, 2]]).unwrap());
        let lam = gaussian(0, 1, 1);
        let rep = PeriodicRep::new(&sys, Point::Index(1), lam).unwrap();
        let a = AlgebraElement::<GaussianRational>::delta_power(&sys, -4);
        let b = AlgebraElement::delta_power(&sys, 4);
        let prod = periodic_rep_matrix(&rep, &a)
            .unwrap()
            .mul(&periodic_rep_matrix(&rep, &b).unwrap());
        assert_eq!(prod, ComplexMatrix::identity(3));
    }

    #[test]
    fn commutant_examples() {
        let sys = Arc::new(DynSystem::from_cycles(5, &[&[0, 1, 2], &[3, 4]]).unwrap());
        let rep = PeriodicRep::new(&sys, Point::Index(0), c(-1.0)).unwrap();
        assert_eq!(commutant_dimension(&rep).unwrap(), 1);

        let r1 = PeriodicRep::new(&sys, Point::Index(3), c(1.0)).unwrap();
        let r2 = PeriodicRep::new(&sys, Point::Index(3), c(-1.0)).unwrap();
        let sum: Vec<_> = rep_generators(&r1)
            .unwrap()
            .iter()
            .zip(rep_generators(&r2).unwrap())
            .map(|(a, b)| a.block_diag(&b).to_dmatrix())
            .collect();
        assert_eq!(commutant_dimension_of_set(&sum), 2);

        assert_eq!(commutant_dimension_of_set(&[DMatrix::identity(2, 2)]), 4);
    }

    #[test]
    fn intertwiner_examples() {
        let sys = Arc::new(DynSystem::from_cycles(5, &[&[0, 1, 2], &[3, 4]]).unwrap());
        let lam = C64::from_polar(1.0, 0.7);
        let r0 = PeriodicRep::new(&sys, Point::Index(0), lam).unwrap();
        let r1 = PeriodicRep::new(&sys, Point::Index(1), lam).unwrap();
        let u = find_intertwiner(&r0, &r1).unwrap().unwrap();
        assert!(u.unitarity_defect() < 1e-12);
        for g in generator_elements(&sys, r0.orbit()).unwrap() {
            let g1 = periodic_rep_matrix(&r0, &g).unwrap();
            let g2 = periodic_rep_matrix(&r1, &g).unwrap();
            assert!(u.mul(&g1).max_abs_diff(&g2.mul(&u)) < 1e-12);
        }

        // non-adjacent base points go through the null-space search
        let r2 = PeriodicRep::new(&sys, Point::Index(2), lam).unwrap();
        let u = find_intertwiner(&r0, &r2).unwrap().unwrap();
        assert!(u.unitarity_defect() < 1e-10);

        let plus = PeriodicRep::new(&sys, Point::Index(0), c(1.0)).unwrap();
        let minus = PeriodicRep::new(&sys, Point::Index(0), c(-1.0)).unwrap();
        assert!(find_intertwiner(&plus, &minus).unwrap().is_none());

        let other = PeriodicRep::new(&sys, Point::Index(3), c(1.0)).unwrap();
        assert!(find_intertwiner(&plus, &other).unwrap().is_none());
    }

    #[test]
    fn rotation_reps_use_dirichlet_bumps() {
        let sys = Arc::new(DynSystem::rational_rotation(1, 4).unwrap());
        let rep = PeriodicRep::new(&sys, Point::angle(1, 8), C64::new(0.0, 1.0)).unwrap();
        assert_eq!(rep.dim(), 4);
        assert_eq!(commutant_dimension(&rep).unwrap(), 1);
        let gens = rep_generators(&rep).unwrap();
        for (k, g) in gens[1..].iter().enumerate() {
            let mut unit = vec![c(0.0); 4];
            unit[k] = c(1.0);
            assert!(g.max_abs_diff(&ComplexMatrix::diagonal(unit)) < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let sys = Arc::new(DynSystem::aperiodic_orbit(4).unwrap());
        assert!(matches!(
            PeriodicRep::new(&sys, Point::Orbit(0), c(1.0)),
            Err(Error::AperiodicPoint(_))
        ));
        let sys = Arc::new(DynSystem::one_point());
        assert!(PeriodicRep::new(&sys, Point::Index(0), c(0.5)).is_err());
    }
}
