//! Finitely supported elements `a = Σ fₙδⁿ` of `ℓ¹(Σ)`.
//!
//! Multiplication is the twisted convolution
//! `(ab)(n) = Σ_k a(k)·αᵏ(b(n−k))` with `α(f) = f ∘ σ⁻¹`, the involution is
//! `a*(n) = conj(αⁿ(a(−n)))`, and the norm is `‖a‖ = Σ‖fₙ‖_∞`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::dynsys::{DynSystem, Point};
use crate::function::FunctionOnX;
use crate::scalar::{add_down, add_up, Scalar, C64};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct AlgebraElement<S> {
    sys: Arc<DynSystem>,
    coeffs: BTreeMap<i64, FunctionOnX<S>>,
}

impl<S: Scalar> PartialEq for AlgebraElement<S> {
    fn eq(&self, other: &Self) -> bool {
        same_system(&self.sys, &other.sys) && self.coeffs == other.coeffs
    }
}

pub(crate) fn same_system(a: &Arc<DynSystem>, b: &Arc<DynSystem>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl<S: Scalar> AlgebraElement<S> {
    /// Builds `Σ fₙδⁿ`; repeated exponents are summed and zero coefficients
    /// dropped.
    pub fn new(
        sys: &Arc<DynSystem>,
        coeffs: impl IntoIterator<Item = (i64, FunctionOnX<S>)>,
    ) -> Result<Self> {
        let mut out = AlgebraElement::zero(sys);
        for (n, f) in coeffs {
            f.check_backend(sys)?;
            out.accumulate(n, f)?;
        }
        Ok(out)
    }

    pub fn zero(sys: &Arc<DynSystem>) -> Self {
        AlgebraElement {
            sys: Arc::clone(sys),
            coeffs: BTreeMap::new(),
        }
    }

    /// The unit `δ⁰`.
    pub fn unit(sys: &Arc<DynSystem>) -> Self {
        Self::delta_power(sys, 0)
    }

    /// `δⁿ`, the constant function 1 placed at exponent `n`.
    pub fn delta_power(sys: &Arc<DynSystem>, n: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(n, FunctionOnX::one(sys));
        AlgebraElement {
            sys: Arc::clone(sys),
            coeffs,
        }
    }

    /// `f·δⁿ`.
    pub fn monomial(sys: &Arc<DynSystem>, n: i64, f: FunctionOnX<S>) -> Result<Self> {
        Self::new(sys, [(n, f)])
    }

    /// `f ∈ C(X)` viewed as `f·δ⁰`.
    pub fn embed_function(sys: &Arc<DynSystem>, f: FunctionOnX<S>) -> Result<Self> {
        Self::monomial(sys, 0, f)
    }

    /// A scalar Laurent polynomial `Σ cₙδⁿ` with constant coefficients.
    pub fn scalar_series(
        sys: &Arc<DynSystem>,
        coeffs: impl IntoIterator<Item = (i64, S)>,
    ) -> Result<Self> {
        Self::new(
            sys,
            coeffs
                .into_iter()
                .map(|(n, c)| (n, FunctionOnX::constant(sys, c))),
        )
    }

    fn accumulate(&mut self, n: i64, f: FunctionOnX<S>) -> Result<()> {
        let sum = match self.coeffs.remove(&n) {
            Some(old) => old.add(&f)?,
            None => f,
        };
        if !sum.is_zero() {
            self.coeffs.insert(n, sum);
        }
        Ok(())
    }

    pub fn system(&self) -> &Arc<DynSystem> {
        &self.sys
    }

    pub fn coeff(&self, n: i64) -> Option<&FunctionOnX<S>> {
        self.coeffs.get(&n)
    }

    /// Nonzero coefficients in increasing exponent order.
    pub fn coeffs(&self) -> impl Iterator<Item = (i64, &FunctionOnX<S>)> {
        self.coeffs.iter().map(|(n, f)| (*n, f))
    }

    pub fn support(&self) -> Vec<i64> {
        self.coeffs.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if same_system(&self.sys, &other.sys) {
            Ok(())
        } else {
            Err(Error::SystemMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (n, f) in &other.coeffs {
            out.accumulate(*n, f.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, s: &S) -> Self {
        AlgebraElement {
            sys: Arc::clone(&self.sys),
            coeffs: self
                .coeffs
                .iter()
                .map(|(n, f)| (*n, f.scale(s)))
                .filter(|(_, f)| !f.is_zero())
                .collect(),
        }
    }

    /// Twisted convolution `(ab)(n) = Σ_k a(k)·αᵏ(b(n−k))`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = AlgebraElement::zero(&self.sys);
        for (k, f) in &self.coeffs {
            for (m, g) in &other.coeffs {
                let term = f.mul(&g.alpha_power(&self.sys, *k)?)?;
                out.accumulate(k + m, term)?;
            }
        }
        Ok(out)
    }

    /// `a*(n) = conj(αⁿ(a(−n)))`.
    pub fn involution(&self) -> Result<Self> {
        let mut out = AlgebraElement::zero(&self.sys);
        for (n, f) in &self.coeffs {
            out.accumulate(-n, f.alpha_power(&self.sys, -n)?.conj())?;
        }
        Ok(out)
    }

    pub fn is_selfadjoint(&self) -> Result<bool> {
        Ok(*self == self.involution()?)
    }

    /// `‖a‖ = Σₙ ‖fₙ‖_∞`.
    pub fn one_norm(&self) -> f64 {
        self.coeffs.values().map(|f| f.sup_norm(&self.sys)).fold(0.0, |s, x| s + x)
    }

    /// An interval containing the true norm, using outward rounding.
    pub fn one_norm_bounds(&self) -> (f64, f64) {
        self.coeffs.values().fold((0.0, 0.0), |(lo, hi), f| {
            let (l, h) = f.sup_norm_bounds(&self.sys);
            (add_down(lo, l), add_up(hi, h))
        })
    }

    /// `‖a − b‖ ≤ tol`.
    pub fn approx_equal(&self, other: &Self, tol: f64) -> Result<bool> {
        let d = self.sub(other)?;
        Ok(if tol == 0.0 {
            d.is_zero()
        } else {
            d.one_norm() <= tol
        })
    }

    /// Coefficientwise restriction to an invariant subset of a finite
    /// permutation system. Returns the subsystem (points relabelled in the
    /// order given) together with the restricted element.
    pub fn restrict_to_subsystem(&self, subset: &[Point]) -> Result<(Arc<DynSystem>, Self)> {
        let (sub, indices) = subsystem(&self.sys, subset)?;
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (n, f) in &self.coeffs {
            coeffs.push((*n, f.restrict(&indices)?));
        }
        let restricted = AlgebraElement::new(&sub, coeffs)?;
        Ok((sub, restricted))
    }

    /// Same system, values converted to double precision.
    pub fn to_c64(&self) -> AlgebraElement<C64> {
        AlgebraElement {
            sys: Arc::clone(&self.sys),
            coeffs: self
                .coeffs
                .iter()
                .map(|(n, f)| (*n, f.to_c64()))
                .filter(|(_, f)| !f.is_zero())
                .collect(),
        }
    }
}

/// The subsystem `(S, σ|_S)` of a finite permutation system on an invariant
/// subset `S`, with `S` relabelled `0..|S|` in the order given. Also returns
/// the original index of each new point.
pub fn subsystem(sys: &Arc<DynSystem>, subset: &[Point]) -> Result<(Arc<DynSystem>, Vec<usize>)> {
    if !sys.is_finite() {
        return Err(Error::Unsupported(
            "restriction needs a finite permutation system".into(),
        ));
    }
    let mut indices = Vec::with_capacity(subset.len());
    for p in subset {
        sys.check_point(p)?;
        match p {
            Point::Index(i) if !indices.contains(i) => indices.push(*i),
            _ => {
                return Err(Error::InvalidArgument(format!("point {p} listed twice")));
            }
        }
    }
    if !sys.is_invariant(subset)? {
        return Err(Error::NotInvariant);
    }
    let relabel: BTreeMap<usize, usize> = indices.iter().enumerate().map(|(k, i)| (*i, k)).collect();
    let mut perm = Vec::with_capacity(indices.len());
    for i in &indices {
        match sys.apply_sigma(&Point::Index(*i), 1)? {
            Point::Index(j) => perm.push(relabel[&j]),
            _ => unreachable!(),
        }
    }
    Ok((Arc::new(DynSystem::finite_permutation(perm)?), indices))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{gaussian, GaussianRational};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn swap() -> Arc<DynSystem> {
        Arc::new(DynSystem::finite_permutation(vec![1, 0]).unwrap())
    }

    #[test]
    fn one_point_reduces_to_laurent_multiplication() {
        // (δ + 2δ²)(3δ⁻¹) = 3 + 6δ
        let sys = Arc::new(DynSystem::one_point());
        let a = AlgebraElement::scalar_series(&sys, [(1, c(1.0)), (2, c(2.0))]).unwrap();
        let b = AlgebraElement::scalar_series(&sys, [(-1, c(3.0))]).unwrap();
        let expected = AlgebraElement::scalar_series(&sys, [(0, c(3.0)), (1, c(6.0))]).unwrap();
        assert_eq!(a.multiply(&b).unwrap(), expected);
    }

    #[test]
    fn swap_products_follow_the_definition() {
        // (fδ)(gδ) = f·α(g)·δ² with α(g) = g∘σ⁻¹ = (4, 3)
        let sys = swap();
        let f = FunctionOnX::table(vec![c(1.0), c(2.0)]);
        let g = FunctionOnX::table(vec![c(3.0), c(4.0)]);
        let a = AlgebraElement::monomial(&sys, 1, f).unwrap();
        let b = AlgebraElement::monomial(&sys, 1, g).unwrap();
        let h = FunctionOnX::table(vec![c(4.0), c(6.0)]);
        assert_eq!(a.multiply(&b).unwrap(), AlgebraElement::monomial(&sys, 2, h).unwrap());
    }

    #[test]
    fn unit_law() {
        let sys = swap();
        let a = AlgebraElement::new(
            &sys,
            [
                (0, FunctionOnX::table(vec![c(1.0), c(-2.0)])),
                (3, FunctionOnX::table(vec![C64::new(0.0, 1.0), c(5.0)])),
            ],
        )
        .unwrap();
        let one = AlgebraElement::unit(&sys);
        assert_eq!(a.multiply(&one).unwrap(), a);
        assert_eq!(one.multiply(&a).unwrap(), a);
    }

    #[test]
    fn involution_examples() {
        let sys = swap();
        let a = AlgebraElement::monomial(&sys, 1, FunctionOnX::table(vec![c(1.0), c(2.0)])).unwrap();
        let expected =
            AlgebraElement::monomial(&sys, -1, FunctionOnX::table(vec![c(2.0), c(1.0)])).unwrap();
        assert_eq!(a.involution().unwrap(), expected);
        let d = AlgebraElement::<C64>::delta_power(&sys, 1);
        assert_eq!(d.involution().unwrap(), AlgebraElement::delta_power(&sys, -1));
        let f = AlgebraElement::embed_function(&sys, FunctionOnX::table(vec![c(3.0), c(-1.0)])).unwrap();
        assert_eq!(f.involution().unwrap(), f);
    }

    #[test]
    fn delta_powers_and_norms() {
        let sys = swap();
        let d3 = AlgebraElement::<GaussianRational>::delta_power(&sys, 3);
        let dm3 = AlgebraElement::delta_power(&sys, -3);
        assert_eq!(d3.multiply(&dm3).unwrap(), AlgebraElement::unit(&sys));

        let f = FunctionOnX::table(vec![gaussian(3, 4, 1), gaussian(1, 0, 1)]);
        let g = FunctionOnX::table(vec![gaussian(0, 0, 1), gaussian(-2, 0, 1)]);
        let a = AlgebraElement::new(&sys, [(0, f), (1, g)]).unwrap();
        assert_eq!(a.one_norm(), 5.0 + 2.0);
        assert_eq!(a.scale(&gaussian(2, 0, 1)).one_norm(), 14.0);
    }

    #[test]
    fn zero_coefficients_are_pruned() {
        let sys = swap();
        let f = FunctionOnX::table(vec![c(1.0), c(2.0)]);
        let a = AlgebraElement::monomial(&sys, 2, f).unwrap();
        let z = a.sub(&a).unwrap();
        assert!(z.is_zero());
        assert!(z.support().is_empty());
        let zero_coeff = AlgebraElement::monomial(&sys, 1, FunctionOnX::table(vec![c(0.0), c(0.0)])).unwrap();
        assert!(zero_coeff.is_zero());
    }

    #[test]
    fn restriction_examples() {
        let sys = Arc::new(DynSystem::from_cycles(5, &[&[0, 1, 2], &[3, 4]]).unwrap());
        let f = FunctionOnX::table([1.0, 1.0, 1.0, 5.0, 7.0].map(c).to_vec());
        let a = AlgebraElement::embed_function(&sys, f).unwrap();
        let (sub, r) = a.restrict_to_subsystem(&[Point::Index(3), Point::Index(4)]).unwrap();
        assert_eq!(sub.size(), Some(2));
        assert_eq!(r.coeff(0), Some(&FunctionOnX::table(vec![c(5.0), c(7.0)])));
        let (sub, u) = AlgebraElement::<C64>::unit(&sys)
            .restrict_to_subsystem(&[Point::Index(3), Point::Index(4)])
            .unwrap();
        assert_eq!(u, AlgebraElement::unit(&sub));
        assert_eq!(
            a.restrict_to_subsystem(&[Point::Index(3)]).unwrap_err(),
            Error::NotInvariant
        );
    }

    #[test]
    fn system_mismatch_is_an_error() {
        let a = AlgebraElement::<C64>::unit(&swap());
        let b = AlgebraElement::<C64>::unit(&Arc::new(DynSystem::one_point()));
        assert_eq!(a.multiply(&b).unwrap_err(), Error::SystemMismatch);
        // structurally equal systems are the same system
        let c = AlgebraElement::<C64>::unit(&swap());
        assert!(a.multiply(&c).is_ok());
    }

    #[test]
    fn covariance_on_the_aperiodic_model() {
        let sys = Arc::new(DynSystem::aperiodic_orbit(8).unwrap());
        let f = FunctionOnX::orbit_table([(0, c(2.0)), (3, C64::new(1.0, -1.0))]);
        let d = AlgebraElement::delta_power(&sys, 1);
        let dinv = AlgebraElement::delta_power(&sys, -1);
        let lhs = d
            .multiply(&AlgebraElement::embed_function(&sys, f.clone()).unwrap())
            .unwrap()
            .multiply(&dinv)
            .unwrap();
        let rhs = AlgebraElement::embed_function(&sys, f.alpha_power(&sys, 1).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }
}
