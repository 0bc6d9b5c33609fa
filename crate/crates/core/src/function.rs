//! Continuous functions on `X`, one representation per backend.

use std::collections::BTreeMap;

use crate::dynsys::{Backend, DynSystem, Point};
use crate::scalar::{Scalar, C64};
use crate::{Error, Result};

/// Default number of sample points for trigonometric sup-norms.
pub const TRIG_SUP_SAMPLES: usize = 4096;

/// A function on the point set of a system.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionOnX<S> {
    /// One value per point of a finite permutation system.
    Table(Vec<S>),
    /// Fourier coefficients `c_m` of `θ ↦ Σ c_m e^{2πimθ}` on a rotation
    /// system. Zero coefficients are never stored.
    Trig(BTreeMap<i64, S>),
    /// Values at orbit indices of the aperiodic model, `tail` elsewhere.
    /// Entries equal to `tail` are never stored.
    Orbit { values: BTreeMap<i64, S>, tail: S },
}

fn mismatch(what: &str) -> Error {
    Error::BackendMismatch(what.to_string())
}

impl<S: Scalar> FunctionOnX<S> {
    pub fn table(values: Vec<S>) -> Self {
        FunctionOnX::Table(values)
    }

    pub fn trig(coeffs: impl IntoIterator<Item = (i64, S)>) -> Self {
        let mut map = BTreeMap::new();
        for (m, c) in coeffs {
            add_into(&mut map, m, c);
        }
        FunctionOnX::Trig(map)
    }

    /// An orbit table with zero tail.
    pub fn orbit_table(values: impl IntoIterator<Item = (i64, S)>) -> Self {
        Self::orbit_table_with_tail(values, S::zero())
    }

    pub fn orbit_table_with_tail(values: impl IntoIterator<Item = (i64, S)>, tail: S) -> Self {
        let values = values.into_iter().filter(|(_, v)| *v != tail).collect();
        FunctionOnX::Orbit { values, tail }
    }

    pub fn constant(sys: &DynSystem, c: S) -> Self {
        match sys.backend() {
            Backend::FinitePermutation { perm, .. } => FunctionOnX::Table(vec![c; perm.len()]),
            Backend::RationalRotation { .. } => Self::trig([(0, c)]),
            Backend::AperiodicOrbit { .. } => FunctionOnX::Orbit {
                values: BTreeMap::new(),
                tail: c,
            },
        }
    }

    pub fn zero(sys: &DynSystem) -> Self {
        Self::constant(sys, S::zero())
    }

    pub fn one(sys: &DynSystem) -> Self {
        Self::constant(sys, S::one())
    }

    /// Checks that the representation fits the system's backend.
    pub fn check_backend(&self, sys: &DynSystem) -> Result<()> {
        match (sys.backend(), self) {
            (Backend::FinitePermutation { perm, .. }, FunctionOnX::Table(v)) => {
                if v.len() == perm.len() {
                    Ok(())
                } else {
                    Err(mismatch(&format!(
                        "table has {} values for {} points",
                        v.len(),
                        perm.len()
                    )))
                }
            }
            (Backend::RationalRotation { .. }, FunctionOnX::Trig(_)) => Ok(()),
            (Backend::AperiodicOrbit { .. }, FunctionOnX::Orbit { .. }) => Ok(()),
            _ => Err(mismatch("function variant does not belong to this backend")),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FunctionOnX::Table(v) => v.iter().all(S::is_zero),
            FunctionOnX::Trig(c) => c.is_empty(),
            FunctionOnX::Orbit { values, tail } => values.is_empty() && tail.is_zero(),
        }
    }

    pub fn evaluate(&self, sys: &DynSystem, x: &Point) -> Result<S> {
        sys.check_point(x)?;
        match (self, x) {
            (FunctionOnX::Table(v), Point::Index(i)) => {
                v.get(*i).cloned().ok_or_else(|| mismatch("table too short"))
            }
            (FunctionOnX::Trig(c), Point::Angle(theta)) => {
                let mut acc = S::zero();
                for (m, cm) in c {
                    let e = S::cis_turns(m * theta.numer(), *theta.denom()).ok_or_else(|| {
                        Error::Inexact(format!("exp(2πi·{m}·{theta})"))
                    })?;
                    acc = acc + cm.clone() * e;
                }
                Ok(acc)
            }
            (FunctionOnX::Orbit { values, tail }, Point::Orbit(k)) => {
                Ok(values.get(k).cloned().unwrap_or_else(|| tail.clone()))
            }
            _ => Err(mismatch("point and function belong to different backends")),
        }
    }

    fn zip_with(&self, other: &Self, op: impl Fn(&S, &S) -> S) -> Result<Self> {
        match (self, other) {
            (FunctionOnX::Table(a), FunctionOnX::Table(b)) if a.len() == b.len() => Ok(
                FunctionOnX::Table(a.iter().zip(b).map(|(x, y)| op(x, y)).collect()),
            ),
            (
                FunctionOnX::Orbit { values: va, tail: ta },
                FunctionOnX::Orbit { values: vb, tail: tb },
            ) => {
                let tail = op(ta, tb);
                let mut values = BTreeMap::new();
                for k in va.keys().chain(vb.keys()) {
                    if values.contains_key(k) {
                        continue;
                    }
                    let x = va.get(k).unwrap_or(ta);
                    let y = vb.get(k).unwrap_or(tb);
                    let v = op(x, y);
                    if v != tail {
                        values.insert(*k, v);
                    }
                }
                Ok(FunctionOnX::Orbit { values, tail })
            }
            _ => Err(mismatch("operands use different representations")),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if let (FunctionOnX::Trig(a), FunctionOnX::Trig(b)) = (self, other) {
            let mut out = a.clone();
            for (m, c) in b {
                add_into(&mut out, *m, c.clone());
            }
            return Ok(FunctionOnX::Trig(out));
        }
        self.zip_with(other, |x, y| x.clone() + y.clone())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-S::one()))
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if let (FunctionOnX::Trig(a), FunctionOnX::Trig(b)) = (self, other) {
            let mut out = BTreeMap::new();
            for (m, c) in a {
                for (k, d) in b {
                    add_into(&mut out, m + k, c.clone() * d.clone());
                }
            }
            return Ok(FunctionOnX::Trig(out));
        }
        self.zip_with(other, |x, y| x.clone() * y.clone())
    }

    pub fn scale(&self, s: &S) -> Self {
        match self {
            FunctionOnX::Table(v) => FunctionOnX::Table(v.iter().map(|x| s.clone() * x.clone()).collect()),
            FunctionOnX::Trig(c) => Self::trig(c.iter().map(|(m, x)| (*m, s.clone() * x.clone()))),
            FunctionOnX::Orbit { values, tail } => Self::orbit_table_with_tail(
                values.iter().map(|(k, x)| (*k, s.clone() * x.clone())),
                s.clone() * tail.clone(),
            ),
        }
    }

    /// Pointwise complex conjugate.
    pub fn conj(&self) -> Self {
        match self {
            FunctionOnX::Table(v) => FunctionOnX::Table(v.iter().map(S::conj).collect()),
            // conj(Σ c_m e^{2πimθ}) = Σ conj(c_m) e^{−2πimθ}
            FunctionOnX::Trig(c) => FunctionOnX::Trig(c.iter().map(|(m, x)| (-m, x.conj())).collect()),
            FunctionOnX::Orbit { values, tail } => FunctionOnX::Orbit {
                values: values.iter().map(|(k, x)| (*k, x.conj())).collect(),
                tail: tail.conj(),
            },
        }
    }

    /// `αⁿ(f) = f ∘ σ⁻ⁿ`.
    pub fn alpha_power(&self, sys: &DynSystem, n: i64) -> Result<Self> {
        self.check_backend(sys)?;
        if n == 0 {
            return Ok(self.clone());
        }
        match (sys.backend(), self) {
            (Backend::FinitePermutation { .. }, FunctionOnX::Table(v)) => {
                let mut out = Vec::with_capacity(v.len());
                for x in 0..v.len() {
                    match sys.apply_sigma(&Point::Index(x), -n)? {
                        Point::Index(y) => out.push(v[y].clone()),
                        _ => unreachable!(),
                    }
                }
                Ok(FunctionOnX::Table(out))
            }
            (Backend::RationalRotation { p, q }, FunctionOnX::Trig(c)) => {
                // f(θ − n·p/q) multiplies c_m by exp(−2πi·m·n·p/q)
                let mut out = BTreeMap::new();
                for (m, cm) in c {
                    let turns = (m.rem_euclid(*q) * n.rem_euclid(*q)) % q * (p % q) % q;
                    let e = S::cis_turns(-turns, *q)
                        .ok_or_else(|| Error::Inexact(format!("exp(−2πi·{turns}/{q})")))?;
                    add_into(&mut out, *m, cm.clone() * e);
                }
                Ok(FunctionOnX::Trig(out))
            }
            (Backend::AperiodicOrbit { .. }, FunctionOnX::Orbit { values, tail }) => {
                Ok(FunctionOnX::Orbit {
                    values: values.iter().map(|(k, x)| (k + n, x.clone())).collect(),
                    tail: tail.clone(),
                })
            }
            _ => unreachable!("checked by check_backend"),
        }
    }

    /// The sup-norm. Trigonometric polynomials are sampled on a grid of at
    /// least [`TRIG_SUP_SAMPLES`] points that is invariant under the
    /// rotation, so the sampled value never overestimates and is preserved
    /// exactly by `α`.
    pub fn sup_norm(&self, sys: &DynSystem) -> f64 {
        match self {
            FunctionOnX::Table(v) => v.iter().map(S::modulus).fold(0.0, f64::max),
            FunctionOnX::Trig(c) => {
                if c.is_empty() {
                    return 0.0;
                }
                let q = match sys.backend() {
                    Backend::RationalRotation { q, .. } => *q as usize,
                    _ => 1,
                };
                let m = TRIG_SUP_SAMPLES.div_ceil(q) * q;
                let coeffs: Vec<(i64, C64)> = c.iter().map(|(k, v)| (*k, v.to_c64())).collect();
                (0..m)
                    .map(|j| {
                        coeffs
                            .iter()
                            .map(|(k, v)| {
                                let t = std::f64::consts::TAU * ((k * j as i64).rem_euclid(m as i64)) as f64
                                    / m as f64;
                                v * C64::new(t.cos(), t.sin())
                            })
                            .sum::<C64>()
                            .norm()
                    })
                    .fold(0.0, f64::max)
            }
            FunctionOnX::Orbit { values, tail } => values
                .values()
                .map(S::modulus)
                .fold(tail.modulus(), f64::max),
        }
    }

    /// An interval containing the true sup-norm. For trigonometric
    /// polynomials the lower end is the sampled maximum and the upper end
    /// the coefficient sum `Σ|c_m|`.
    pub fn sup_norm_bounds(&self, sys: &DynSystem) -> (f64, f64) {
        let fold = |it: &mut dyn Iterator<Item = &S>| {
            it.map(S::modulus_bounds)
                .fold((0.0f64, 0.0f64), |(lo, hi), (l, h)| (lo.max(l), hi.max(h)))
        };
        match self {
            FunctionOnX::Table(v) => fold(&mut v.iter()),
            FunctionOnX::Trig(c) => {
                let hi = c
                    .values()
                    .map(|v| v.modulus_bounds().1)
                    .fold(0.0, crate::scalar::add_up);
                let lo = self.sup_norm(sys) * (1.0 - 1e-15);
                (lo.min(hi), hi)
            }
            FunctionOnX::Orbit { values, tail } => {
                fold(&mut values.values().chain(std::iter::once(tail)))
            }
        }
    }

    /// A function with `f(x) = 1`, `f(σʲx) = 0` for `0 < |j| ≤ n` and
    /// sup-norm 1. On permutations and the aperiodic model it is the
    /// indicator of `x`; on rotations the normalised Dirichlet kernel
    /// `(1/q)·Σ_{m<q} e^{2πim(θ−x)}`, which vanishes on the rest of the orbit.
    pub fn bump(sys: &DynSystem, x: &Point, n: usize) -> Result<Self> {
        sys.check_point(x)?;
        if let Some(period) = sys.period(x)? {
            if 2 * n + 1 > period {
                return Err(Error::OrbitCollision {
                    period,
                    needed: 2 * n + 1,
                });
            }
        }
        match (sys.backend(), x) {
            (Backend::FinitePermutation { perm, .. }, Point::Index(i)) => {
                let mut v = vec![S::zero(); perm.len()];
                v[*i] = S::one();
                Ok(FunctionOnX::Table(v))
            }
            (Backend::RationalRotation { q, .. }, Point::Angle(theta)) => {
                let inv_q = S::one() / S::from_i64(*q);
                let mut coeffs = Vec::new();
                for m in 0..*q {
                    let e = S::cis_turns(-m * theta.numer(), *theta.denom())
                        .ok_or_else(|| Error::Inexact(format!("exp(−2πi·{m}·{theta})")))?;
                    coeffs.push((m, inv_q.clone() * e));
                }
                Ok(Self::trig(coeffs))
            }
            (Backend::AperiodicOrbit { .. }, Point::Orbit(k)) => {
                Ok(Self::orbit_table([(*k, S::one())]))
            }
            _ => unreachable!("checked by check_point"),
        }
    }

    /// On the aperiodic model: `0` at `σʲx` for `0 < |j| ≤ n` and `1`
    /// everywhere else. Unlike [`FunctionOnX::bump`] it keeps the far part
    /// of a sequence, so truncation errors stay visible.
    pub fn notch(sys: &DynSystem, x: &Point, n: usize) -> Result<Self> {
        match (sys.backend(), x) {
            (Backend::AperiodicOrbit { .. }, Point::Orbit(k)) => {
                let n = n as i64;
                let vals = (1..=n).flat_map(|j| [(k - j, S::zero()), (k + j, S::zero())]);
                Ok(Self::orbit_table_with_tail(vals, S::one()))
            }
            _ => Err(Error::Unsupported(
                "notch functions live on the aperiodic model".into(),
            )),
        }
    }

    /// Indicator of a set of points of a finite permutation system.
    pub fn indicator(sys: &DynSystem, points: &[Point]) -> Result<Self> {
        let n = sys
            .size()
            .ok_or_else(|| Error::Unsupported("indicators need a finite system".into()))?;
        let mut v = vec![S::zero(); n];
        for p in points {
            sys.check_point(p)?;
            if let Point::Index(i) = p {
                v[*i] = S::one();
            }
        }
        Ok(FunctionOnX::Table(v))
    }

    /// Restriction of a table to the listed points, in the listed order.
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        match self {
            FunctionOnX::Table(v) => indices
                .iter()
                .map(|&i| v.get(i).cloned().ok_or_else(|| mismatch("index outside table")))
                .collect::<Result<Vec<_>>>()
                .map(FunctionOnX::Table),
            _ => Err(Error::Unsupported("restriction needs a finite system".into())),
        }
    }

    /// Converts every value to double precision.
    pub fn to_c64(&self) -> FunctionOnX<C64> {
        match self {
            FunctionOnX::Table(v) => FunctionOnX::Table(v.iter().map(S::to_c64).collect()),
            FunctionOnX::Trig(c) => FunctionOnX::trig(c.iter().map(|(m, x)| (*m, x.to_c64()))),
            FunctionOnX::Orbit { values, tail } => FunctionOnX::orbit_table_with_tail(
                values.iter().map(|(k, x)| (*k, x.to_c64())),
                tail.to_c64(),
            ),
        }
    }
}

fn add_into<S: Scalar>(map: &mut BTreeMap<i64, S>, key: i64, value: S) {
    let sum = match map.remove(&key) {
        Some(old) => old + value,
        None => value,
    };
    if !sum.is_zero() {
        map.insert(key, sum);
    }
}
