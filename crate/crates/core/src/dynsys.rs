//! Computable dynamical systems `(X, σ)`.
//!
//! Three backends stand in for a general compact Hausdorff space with a
//! homeomorphism:
//!
//! * a permutation of `{0, …, N−1}` with the discrete topology;
//! * the rotation `θ ↦ θ + p/q (mod 1)` of the circle, on exact rationals;
//! * a model of one aperiodic orbit, whose points are the integer indices
//!   `k` standing for `σᵏx` and on which `σ(k) = k + 1`.
//!
//! Values are immutable after construction.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::{Error, Result};

/// A point of one of the three backends.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    /// A point `0..N` of a finite permutation system.
    Index(usize),
    /// An exact rational angle in `[0, 1)` (fraction of a turn).
    Angle(Ratio<i64>),
    /// The orbit index `k`, standing for `σᵏx` of the modelled base point.
    Orbit(i64),
}

impl Point {
    pub fn angle(num: i64, den: i64) -> Point {
        Point::Angle(Ratio::new(num, den))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Index(i) => write!(f, "{i}"),
            Point::Angle(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Point::Orbit(k) => write!(f, "σ^{k}x"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Backend {
    FinitePermutation { perm: Vec<usize>, inverse: Vec<usize> },
    RationalRotation { p: i64, q: i64 },
    AperiodicOrbit { window: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynSystem {
    backend: Backend,
}

/// An orbit `[x, σx, …, σ^{p−1}x]`, or the infinite orbit of a base point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Orbit {
    Finite(Vec<Point>),
    Infinite { base: Point },
}

impl Orbit {
    /// The number of points, `None` for an infinite orbit.
    pub fn period(&self) -> Option<usize> {
        match self {
            Orbit::Finite(pts) => Some(pts.len()),
            Orbit::Infinite { .. } => None,
        }
    }

    pub fn points(&self) -> Option<&[Point]> {
        match self {
            Orbit::Finite(pts) => Some(pts),
            Orbit::Infinite { .. } => None,
        }
    }

    pub fn base(&self) -> &Point {
        match self {
            Orbit::Finite(pts) => &pts[0],
            Orbit::Infinite { base } => base,
        }
    }

    pub fn contains(&self, x: &Point) -> bool {
        match self {
            Orbit::Finite(pts) => pts.contains(x),
            // the aperiodic model consists of a single orbit
            Orbit::Infinite { base } => {
                matches!((base, x), (Point::Orbit(_), Point::Orbit(_)))
            }
        }
    }

    /// Orbits as sets: equal point sets, regardless of the starting point.
    pub fn same_as(&self, other: &Orbit) -> bool {
        match (self, other) {
            (Orbit::Finite(a), Orbit::Finite(b)) => {
                a.len() == b.len() && b.iter().all(|y| a.contains(y))
            }
            (Orbit::Infinite { .. }, Orbit::Infinite { .. }) => self.contains(other.base()),
            _ => false,
        }
    }
}

/// Decidable system-level properties; `None` marks "not computed".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemPredicates {
    pub free: Option<bool>,
    pub topologically_free: Option<bool>,
    pub topologically_transitive: Option<bool>,
}

impl DynSystem {
    /// A permutation system; `perm[i]` is `σ(i)`.
    pub fn finite_permutation(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut inverse = vec![usize::MAX; n];
        for (i, &j) in perm.iter().enumerate() {
            if j >= n {
                return Err(Error::InvalidSystem(format!(
                    "image {j} of {i} is outside 0..{n}"
                )));
            }
            if inverse[j] != usize::MAX {
                return Err(Error::InvalidSystem(format!(
                    "not a bijection: {j} is the image of both {} and {i}",
                    inverse[j]
                )));
            }
            inverse[j] = i;
        }
        Ok(DynSystem {
            backend: Backend::FinitePermutation { perm, inverse },
        })
    }

    /// A permutation of `0..n` given as disjoint cycles `(a b c)`, meaning
    /// `a ↦ b ↦ c ↦ a`. Points not mentioned are fixed.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut seen = HashSet::new();
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                if a >= n || !seen.insert(a) {
                    return Err(Error::InvalidSystem(format!(
                        "cycle entry {a} repeated or outside 0..{n}"
                    )));
                }
                perm[a] = cycle[(k + 1) % cycle.len()];
            }
        }
        Self::finite_permutation(perm)
    }

    pub fn identity(n: usize) -> Self {
        Self::finite_permutation((0..n).collect()).expect("identity is a bijection")
    }

    /// The one-point system, whose algebra is the group algebra `ℓ¹(ℤ)`.
    pub fn one_point() -> Self {
        Self::identity(1)
    }

    pub fn rational_rotation(p: i64, q: i64) -> Result<Self> {
        if p <= 0 || q < 1 {
            return Err(Error::InvalidSystem(format!(
                "rotation p/q needs p > 0 and q ≥ 1, got {p}/{q}"
            )));
        }
        if p.gcd(&q) != 1 {
            return Err(Error::InvalidSystem(format!(
                "rotation p/q needs gcd(p, q) = 1, got {p}/{q}"
            )));
        }
        Ok(DynSystem {
            backend: Backend::RationalRotation { p, q },
        })
    }

    pub fn aperiodic_orbit(window: i64) -> Result<Self> {
        if window < 0 {
            return Err(Error::InvalidSystem(format!("negative window {window}")));
        }
        Ok(DynSystem {
            backend: Backend::AperiodicOrbit { window },
        })
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    /// Number of points of a finite permutation system.
    pub fn size(&self) -> Option<usize> {
        match &self.backend {
            Backend::FinitePermutation { perm, .. } => Some(perm.len()),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.backend, Backend::FinitePermutation { .. })
    }

    /// All points of a finite permutation system.
    pub fn points(&self) -> Option<Vec<Point>> {
        self.size().map(|n| (0..n).map(Point::Index).collect())
    }

    pub fn contains(&self, x: &Point) -> bool {
        match (&self.backend, x) {
            (Backend::FinitePermutation { perm, .. }, Point::Index(i)) => *i < perm.len(),
            (Backend::RationalRotation { .. }, Point::Angle(r)) => {
                !r.is_negative() && *r < Ratio::from_integer(1)
            }
            (Backend::AperiodicOrbit { .. }, Point::Orbit(_)) => true,
            _ => false,
        }
    }

    pub fn check_point(&self, x: &Point) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::PointOutsideDomain(x.to_string()))
        }
    }

    /// `σⁿ(x)`, exactly.
    pub fn apply_sigma(&self, x: &Point, n: i64) -> Result<Point> {
        self.check_point(x)?;
        Ok(match (&self.backend, x) {
            (Backend::FinitePermutation { perm, inverse }, Point::Index(i)) => {
                let (table, steps) = if n >= 0 {
                    (perm, n.unsigned_abs())
                } else {
                    (inverse, n.unsigned_abs())
                };
                let period = self.finite_period(*i) as u64;
                let mut y = *i;
                for _ in 0..steps % period {
                    y = table[y];
                }
                Point::Index(y)
            }
            (Backend::RationalRotation { p, q }, Point::Angle(theta)) => {
                let shift = Ratio::new((n.rem_euclid(*q)) * (p % q), *q);
                Point::Angle(frac(*theta + shift))
            }
            (Backend::AperiodicOrbit { .. }, Point::Orbit(k)) => Point::Orbit(k + n),
            _ => unreachable!("checked by check_point"),
        })
    }

    fn finite_period(&self, i: usize) -> usize {
        match &self.backend {
            Backend::FinitePermutation { perm, .. } => {
                let mut y = perm[i];
                let mut p = 1;
                while y != i {
                    y = perm[y];
                    p += 1;
                }
                p
            }
            _ => unreachable!(),
        }
    }

    /// The least `p ≥ 1` with `σᵖx = x`, or `None` for aperiodic points.
    pub fn period(&self, x: &Point) -> Result<Option<usize>> {
        self.check_point(x)?;
        Ok(match (&self.backend, x) {
            (Backend::FinitePermutation { .. }, Point::Index(i)) => Some(self.finite_period(*i)),
            (Backend::RationalRotation { q, .. }, _) => Some(*q as usize),
            _ => None,
        })
    }

    pub fn orbit(&self, x: &Point) -> Result<Orbit> {
        match self.period(x)? {
            Some(p) => {
                let mut pts = Vec::with_capacity(p);
                let mut y = x.clone();
                for _ in 0..p {
                    let next = self.apply_sigma(&y, 1)?;
                    pts.push(y);
                    y = next;
                }
                Ok(Orbit::Finite(pts))
            }
            None => Ok(Orbit::Infinite { base: x.clone() }),
        }
    }

    /// The orbit decomposition of a finite permutation system, ordered by
    /// smallest element, each orbit starting at its smallest element.
    pub fn orbit_space(&self) -> Result<Vec<Orbit>> {
        let n = self.size().ok_or_else(|| {
            Error::Unsupported("orbit space needs a finite permutation system".into())
        })?;
        let mut seen = vec![false; n];
        let mut orbits = Vec::new();
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let orbit = self.orbit(&Point::Index(i))?;
            for pt in orbit.points().unwrap_or(&[]) {
                if let Point::Index(j) = pt {
                    seen[*j] = true;
                }
            }
            orbits.push(orbit);
        }
        Ok(orbits)
    }

    /// Orbits of finitely many sample points, deduplicated. On a rational
    /// rotation two angles share an orbit iff `q·θ₁ ≡ q·θ₂ (mod 1)`.
    pub fn orbit_space_of_samples(&self, samples: &[Point]) -> Result<Vec<Orbit>> {
        match &self.backend {
            Backend::FinitePermutation { .. } => self.orbit_space(),
            Backend::RationalRotation { q, .. } => {
                let mut labels = BTreeSet::new();
                let mut orbits = Vec::new();
                for s in samples {
                    self.check_point(s)?;
                    if labels.insert(self.orbit_label(s)?) {
                        orbits.push(self.orbit(s)?);
                    }
                }
                debug_assert!(orbits.iter().all(|o| o.period() == Some(*q as usize)));
                Ok(orbits)
            }
            Backend::AperiodicOrbit { .. } => Err(Error::Unsupported(
                "the aperiodic model has a single infinite orbit".into(),
            )),
        }
    }

    /// The chart `θ ↦ q·θ mod 1` identifying rotation orbits with points of
    /// the circle.
    pub fn orbit_label(&self, x: &Point) -> Result<Ratio<i64>> {
        match (&self.backend, x) {
            (Backend::RationalRotation { q, .. }, Point::Angle(theta)) => {
                Ok(frac(*theta * Ratio::from_integer(*q)))
            }
            _ => Err(Error::Unsupported("orbit labels exist on rotations only".into())),
        }
    }

    pub fn predicates(&self) -> SystemPredicates {
        match &self.backend {
            Backend::FinitePermutation { perm, .. } => {
                let n = perm.len();
                let orbit_count = self.orbit_space().map(|o| o.len()).unwrap_or(0);
                // discrete topology: dense means equal, every point is periodic
                SystemPredicates {
                    free: Some(n == 0),
                    topologically_free: Some(n == 0),
                    topologically_transitive: Some(orbit_count <= 1),
                }
            }
            Backend::RationalRotation { .. } => SystemPredicates {
                free: Some(false),
                topologically_free: Some(false),
                topologically_transitive: None,
            },
            Backend::AperiodicOrbit { .. } => SystemPredicates {
                free: Some(true),
                topologically_free: Some(true),
                topologically_transitive: None,
            },
        }
    }

    /// Whether a finite point set is mapped onto itself by `σ`.
    pub fn is_invariant(&self, subset: &[Point]) -> Result<bool> {
        let set: HashSet<&Point> = subset.iter().collect();
        for x in subset {
            let y = self.apply_sigma(x, 1)?;
            if !set.contains(&y) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn frac(r: Ratio<i64>) -> Ratio<i64> {
    let f = r - r.floor();
    if f.is_zero() {
        Ratio::from_integer(0)
    } else {
        f
    }
}
