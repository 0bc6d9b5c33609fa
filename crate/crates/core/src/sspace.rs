//! The structure space of `ℓ¹(Σ)` for finite systems: subsets of
//! `Orb × T`, hull-kernel closures, Wiener witnesses and the
//! disjoint-circles / torus descriptions.
//!
//! Angles are fractions of a turn, `λ = e^{2πiθ}`.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_rational::Ratio;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::algebra::AlgebraElement;
use crate::dynsys::{Backend, DynSystem, Orbit, Point};
use crate::function::FunctionOnX;
use crate::scalar::C64;
use crate::{Error, Result};

/// `e^{2πiθ}`.
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, TAU * theta)
}

/// `θ mod 1` in `[0, 1)`.
pub fn wrap(theta: f64) -> f64 {
    let t = theta.rem_euclid(1.0);
    if t >= 1.0 {
        0.0
    } else {
        t
    }
}

/// Distance between two angles on the circle, in `[0, 1/2]`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = wrap(a - b);
    d.min(1.0 - d)
}

/// A finite union of closed arcs and points of `T`.
///
/// Arcs are stored as sorted, disjoint, non-touching intervals of `[0, 1]`;
/// an arc through angle `0` is kept as the two pieces `[s, 1]` and `[0, e]`,
/// so canonicalisation involves no arithmetic and is idempotent. Points are
/// sorted, in `[0, 1)`, and never inside an arc.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TSubset {
    intervals: Vec<(f64, f64)>,
    points: Vec<f64>,
}

impl TSubset {
    pub fn empty() -> Self {
        TSubset::default()
    }

    pub fn full() -> Self {
        TSubset {
            intervals: vec![(0.0, 1.0)],
            points: Vec::new(),
        }
    }

    /// Arcs `[lo, hi]` run counterclockwise from `lo` to `hi`; `hi < lo`
    /// wraps through `0`, and an arc of length `≥ 1` is the whole circle.
    pub fn new(arcs: &[(f64, f64)], points: &[f64]) -> Result<Self> {
        let mut intervals = Vec::new();
        let mut pts = Vec::new();
        for &(lo, hi) in arcs {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidArgument("arc ends must be finite".into()));
            }
            if hi - lo >= 1.0 {
                return Ok(TSubset::full());
            }
            let (s, e) = (wrap(lo), wrap(hi));
            if s == e {
                pts.push(s);
            } else if s < e {
                intervals.push((s, e));
            } else {
                intervals.push((s, 1.0));
                intervals.push((0.0, e));
            }
        }
        for &p in points {
            if !p.is_finite() {
                return Err(Error::InvalidArgument("points must be finite".into()));
            }
            pts.push(wrap(p));
        }
        Ok(Self::canonical(intervals, pts))
    }

    fn canonical(mut intervals: Vec<(f64, f64)>, mut points: Vec<f64>) -> Self {
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (s, e) in intervals {
            match merged.last_mut() {
                Some(last) if s <= last.1 => last.1 = last.1.max(e),
                _ => merged.push((s, e)),
            }
        }
        let set = TSubset {
            intervals: merged,
            points: Vec::new(),
        };
        points.sort_by(f64::total_cmp);
        points.dedup();
        points.retain(|p| !set.in_arcs(*p));
        TSubset {
            points,
            ..set
        }
    }

    fn in_arcs(&self, theta: f64) -> bool {
        let t = wrap(theta);
        self.intervals
            .iter()
            .any(|&(s, e)| (s <= t && t <= e) || (t == 0.0 && e == 1.0))
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty() && self.points.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.intervals == [(0.0, 1.0)]
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.in_arcs(theta) || self.points.contains(&wrap(theta))
    }

    /// The arcs as `[lo, hi]` pairs, rejoining the pieces split at `0`
    /// (such an arc has `hi < lo`).
    pub fn arcs(&self) -> Vec<(f64, f64)> {
        let mut iv = self.intervals.clone();
        if self.is_full() {
            return vec![(0.0, 1.0)];
        }
        if iv.len() >= 2 && iv[0].0 == 0.0 && iv[iv.len() - 1].1 == 1.0 {
            let first = iv.remove(0);
            let last = iv.pop().expect("two intervals");
            iv.push((last.0, first.1));
        }
        iv
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut iv = self.intervals.clone();
        iv.extend(&other.intervals);
        let mut pts = self.points.clone();
        pts.extend(&other.points);
        Self::canonical(iv, pts)
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.points.iter().all(|p| other.contains(*p))
            && self.intervals.iter().all(|&(s, e)| {
                other.intervals.iter().any(|&(s2, e2)| s2 <= s && e <= e2)
            })
    }

    /// Distance from `theta` to the set, `∞` for the empty set.
    pub fn distance(&self, theta: f64) -> f64 {
        if self.in_arcs(theta) {
            return 0.0;
        }
        let ends = self.intervals.iter().flat_map(|&(s, e)| [s, e]);
        ends.chain(self.points.iter().copied())
            .map(|p| angular_distance(theta, p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Roughly `m` points covering the set: each arc sampled evenly
    /// (endpoints included) in proportion to its length, plus every
    /// isolated point.
    pub fn sample(&self, m: usize) -> Vec<f64> {
        let total: f64 = self.intervals.iter().map(|(s, e)| e - s).sum();
        let mut out = Vec::new();
        for &(s, e) in &self.intervals {
            let k = ((m as f64) * (e - s) / total).ceil().max(2.0) as usize;
            out.extend((0..k).map(|i| s + (e - s) * i as f64 / (k - 1) as f64));
        }
        out.extend(&self.points);
        out
    }
}

/// Parameters for [`wiener_witness`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessOptions {
    /// Target bound for `|ĉ|` on the forbidden set.
    pub tol: f64,
    /// Largest admissible truncation order.
    pub max_n: usize,
    /// Minimal distance between `λ₀` and the forbidden set; the plateau's
    /// transitions have width `margin / 2`.
    pub margin: f64,
}

/// Default separation between `λ₀` and the forbidden set, in turns.
pub const DEFAULT_MARGIN: f64 = 1.0 / 64.0;
/// Quadrature points for the Fourier coefficients.
pub const QUADRATURE_POINTS: usize = 16384;
/// Sample points used to verify the bound on each forbidden arc.
pub const VERIFY_POINTS: usize = 8192;

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions {
            tol: 1e-3,
            max_n: 2000,
            margin: DEFAULT_MARGIN,
        }
    }
}

/// A finite sequence `(c_n)` with `ĉ(λ) = Σ c_n λⁿ` small on a forbidden set
/// and `ĉ(λ₀) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerWitness {
    pub coeffs: BTreeMap<i64, C64>,
    /// `Σ |c_n|`.
    pub l1_norm: f64,
    /// Largest sampled `|ĉ|` on the forbidden set.
    pub sup_on_forbidden: f64,
    /// `ĉ(λ₀)` after normalisation.
    pub value_at_lambda0: C64,
    /// Truncation order: `c_n = 0` for `|n| > n`.
    pub order: usize,
    /// Bound on the `ℓ¹` mass discarded by the truncation.
    pub tail_bound: f64,
}

impl WienerWitness {
    /// `ĉ(e^{2πiθ})`.
    pub fn evaluate(&self, theta: f64) -> C64 {
        evaluate_series(&self.coeffs, theta)
    }
}

fn evaluate_series(coeffs: &BTreeMap<i64, C64>, theta: f64) -> C64 {
    let top = coeffs.keys().map(|n| n.unsigned_abs()).max().unwrap_or(0) as usize;
    let z = cis(theta);
    // powers by repeated multiplication; |z| = 1 so z⁻ⁿ = conj(zⁿ)
    let mut powers = Vec::with_capacity(top + 1);
    let mut acc = C64::new(1.0, 0.0);
    for _ in 0..=top {
        powers.push(acc);
        acc *= z;
    }
    coeffs
        .iter()
        .map(|(n, c)| {
            let zn = powers[n.unsigned_abs() as usize];
            c * if *n < 0 { zn.conj() } else { zn }
        })
        .sum()
}

/// The `C¹` plateau: `1` within `r1` of `θ₀`, `0` beyond `r2`, a raised
/// cosine in between.
fn plateau(theta: f64, theta0: f64, r1: f64, r2: f64) -> f64 {
    let d = angular_distance(theta, theta0);
    if d <= r1 {
        1.0
    } else if d >= r2 {
        0.0
    } else {
        0.5 * (1.0 + (PI * (d - r1) / (r2 - r1)).cos())
    }
}

/// Builds a witness for `λ₀ = e^{2πiθ₀}` against a closed forbidden set.
///
/// The plateau `g` equals `1` near `λ₀` and vanishes at distance `≥ D` from
/// it, `D` being the distance from `λ₀` to the forbidden set; its
/// transitions have width `margin / 2`. Its Fourier coefficients are
/// computed by the periodic trapezoid rule on [`QUADRATURE_POINTS`] points.
/// Since `g''` has total variation `4π²/w²` for transition width `w`,
/// `|c_n| ≤ 1/(2πw²|n|³)` and the mass beyond `K` is at most `1/(2πw²K²)`.
/// The series is cut at the smallest `N` whose discarded mass `t` satisfies
/// `t ≤ tol/(1 + tol)`, which keeps `|ĉ| ≤ tol` on the forbidden set after
/// dividing by `ĉ(λ₀) ≥ 1 − t`; the bound is then checked by sampling each
/// forbidden arc at [`VERIFY_POINTS`] points.
pub fn wiener_witness(forbidden: &TSubset, theta0: f64, opts: &WitnessOptions) -> Result<WienerWitness> {
    if forbidden.is_full() {
        return Err(Error::InvalidArgument("the forbidden set is the whole circle".into()));
    }
    if !(opts.tol > 0.0) || !(opts.margin > 0.0 && opts.margin <= 0.25) {
        return Err(Error::InvalidArgument("need tol > 0 and 0 < margin ≤ 1/4".into()));
    }
    let theta0 = wrap(theta0);
    if forbidden.is_empty() {
        let coeffs = BTreeMap::from([(0, C64::new(1.0, 0.0))]);
        return Ok(WienerWitness {
            coeffs,
            l1_norm: 1.0,
            sup_on_forbidden: 0.0,
            value_at_lambda0: C64::new(1.0, 0.0),
            order: 0,
            tail_bound: 0.0,
        });
    }
    let dist = forbidden.distance(theta0);
    if dist < opts.margin {
        return Err(Error::InvalidArgument(format!(
            "λ₀ lies within {dist} of the forbidden set, margin is {}",
            opts.margin
        )));
    }
    let w = opts.margin / 2.0;
    let (r1, r2) = (dist - w, dist);

    let m = QUADRATURE_POINTS;
    let mut buf: Vec<C64> = (0..m)
        .map(|k| C64::new(plateau(k as f64 / m as f64, theta0, r1, r2), 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let coeff = |n: i64| buf[n.rem_euclid(m as i64) as usize] / m as f64;

    let half = (m / 2 - 1) as i64;
    let beyond = 1.0 / (2.0 * PI * w * w * (half as f64).powi(2));
    // suffix sums of |c_n| + |c_{−n}| for n ≤ half
    let mut tails = vec![0.0; half as usize + 2];
    for n in (1..=half).rev() {
        tails[n as usize] = tails[n as usize + 1] + coeff(n).norm() + coeff(-n).norm();
    }
    let budget = opts.tol / (1.0 + opts.tol);
    let order = (0..=opts.max_n.min(half as usize - 1))
        .find(|&n| tails[n + 1] + beyond <= budget)
        .ok_or_else(|| {
            Error::ToleranceNotMet(format!(
                "no truncation order up to {} reaches tol {}",
                opts.max_n, opts.tol
            ))
        })?;
    let tail_bound = tails[order + 1] + beyond;

    let n = order as i64;
    let raw: BTreeMap<i64, C64> = (-n..=n).map(|k| (k, coeff(k))).collect();
    let scale = evaluate_series(&raw, theta0);
    let coeffs: BTreeMap<i64, C64> = raw
        .into_iter()
        .map(|(k, c)| (k, c / scale))
        .filter(|(_, c)| *c != C64::new(0.0, 0.0))
        .collect();
    let sup = forbidden
        .intervals
        .iter()
        .flat_map(|&(s, e)| (0..VERIFY_POINTS).map(move |i| s + (e - s) * i as f64 / (VERIFY_POINTS - 1) as f64))
        .chain(forbidden.points.iter().copied())
        .collect::<Vec<f64>>()
        .par_iter()
        .map(|t| evaluate_series(&coeffs, *t).norm())
        .reduce(|| 0.0, f64::max);
    if sup > opts.tol {
        return Err(Error::ToleranceNotMet(format!(
            "sampled sup {sup:e} on the forbidden set exceeds {}",
            opts.tol
        )));
    }
    Ok(WienerWitness {
        l1_norm: coeffs.values().map(|c| c.norm()).fold(0.0, |s, x| s + x),
        value_at_lambda0: evaluate_series(&coeffs, theta0),
        coeffs,
        sup_on_forbidden: sup,
        order,
        tail_bound,
    })
}

/// `a = Σ aₙδⁿ` with `a_{lp+j} = c_l` (constant functions) for
/// `j = 0..p−1`. Every strand sum of `a` at `(ō, λ)` equals `ĉ(λ)`.
pub fn lift_witness(sys: &Arc<DynSystem>, orbit: &Orbit, witness: &WienerWitness) -> Result<AlgebraElement<C64>> {
    let p = orbit
        .period()
        .ok_or_else(|| Error::AperiodicPoint(orbit.base().to_string()))? as i64;
    AlgebraElement::scalar_series(
        sys,
        witness
            .coeffs
            .iter()
            .flat_map(|(l, c)| (0..p).map(move |j| (l * p + j, *c))),
    )
}

/// A subset of `Orb × T` for a finite system: orbit index (position in
/// [`DynSystem::orbit_space`]) to the set of `λ`. Missing orbits carry the
/// empty set.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SSpaceSubset {
    parts: BTreeMap<usize, TSubset>,
}

impl SSpaceSubset {
    pub fn new(parts: impl IntoIterator<Item = (usize, TSubset)>) -> Self {
        let mut out = SSpaceSubset::default();
        for (o, t) in parts {
            let merged = match out.parts.remove(&o) {
                Some(old) => old.union(&t),
                None => t,
            };
            if !merged.is_empty() {
                out.parts.insert(o, merged);
            }
        }
        out
    }

    pub fn get(&self, orbit: usize) -> TSubset {
        self.parts.get(&orbit).cloned().unwrap_or_default()
    }

    pub fn parts(&self) -> impl Iterator<Item = (usize, &TSubset)> {
        self.parts.iter().map(|(o, t)| (*o, t))
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, orbit: usize, theta: f64) -> bool {
        self.parts.get(&orbit).is_some_and(|t| t.contains(theta))
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.parts
            .iter()
            .all(|(o, t)| t.is_subset_of(&other.get(*o)))
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::new(self.parts.clone().into_iter().chain(other.parts.clone()))
    }

    /// Checks that every referenced orbit exists.
    pub fn validate(&self, sys: &DynSystem) -> Result<()> {
        let count = finite_orbits(sys)?.len();
        match self.parts.keys().find(|o| **o >= count) {
            Some(o) => Err(Error::InvalidArgument(format!(
                "orbit {o} does not exist, the system has {count}"
            ))),
            None => Ok(()),
        }
    }
}

fn finite_orbits(sys: &DynSystem) -> Result<Vec<Orbit>> {
    if !sys.is_finite() {
        return Err(Error::Unsupported(
            "the structure space is computed for finite permutation systems".into(),
        ));
    }
    sys.orbit_space()
}

/// The hull-kernel closure of `E`. Finite unions of closed arcs and points
/// are closed in each orbit's circle, and ideals of distinct orbits are
/// never contained in one another, so the closure is `E` itself.
pub fn hk_closure(sys: &DynSystem, e: &SSpaceSubset) -> Result<SSpaceSubset> {
    e.validate(sys)?;
    Ok(e.clone())
}

/// How a certificate separates a point from a closure.
#[derive(Debug, Clone, PartialEq)]
pub enum CertificateKind {
    /// The indicator of the orbit; `E` has nothing on it.
    OrbitIndicator,
    /// A lifted Wiener witness times the indicator of the orbit.
    LiftedWitness { order: usize, sup_on_forbidden: f64 },
}

/// An element lying in every ideal of a closure but not in `P_{ō,λ}`,
/// `λ = e^{2πi·angle}` (lying "within tol" when it is a lifted witness).
#[derive(Debug, Clone)]
pub struct Certificate {
    pub orbit: usize,
    pub angle: f64,
    pub element: AlgebraElement<C64>,
    pub kind: CertificateKind,
}

/// [`hk_closure`] together with certificates for the grid angles `k/m`
/// outside the closure. Grid points closer to `E` than `opts.margin` get no
/// certificate; their count is returned as well.
pub fn hk_closure_certified(
    sys: &Arc<DynSystem>,
    e: &SSpaceSubset,
    m: usize,
    opts: &WitnessOptions,
) -> Result<(SSpaceSubset, Vec<Certificate>, usize)> {
    let closure = hk_closure(sys, e)?;
    let orbits = finite_orbits(sys)?;
    let mut certs = Vec::new();
    let mut skipped = 0;
    for (o, orbit) in orbits.iter().enumerate() {
        let part = closure.get(o);
        let pts = orbit.points().expect("finite orbit");
        let indicator = AlgebraElement::embed_function(sys, FunctionOnX::indicator(sys, pts)?)?;
        for k in 0..m {
            let angle = k as f64 / m as f64;
            if part.contains(angle) {
                continue;
            }
            if part.is_empty() {
                certs.push(Certificate {
                    orbit: o,
                    angle,
                    element: indicator.clone(),
                    kind: CertificateKind::OrbitIndicator,
                });
                continue;
            }
            if part.distance(angle) < opts.margin {
                skipped += 1;
                continue;
            }
            let w = wiener_witness(&part, angle, opts)?;
            let element = lift_witness(sys, orbit, &w)?.multiply(&indicator)?;
            certs.push(Certificate {
                orbit: o,
                angle,
                element,
                kind: CertificateKind::LiftedWitness {
                    order: w.order,
                    sup_on_forbidden: w.sup_on_forbidden,
                },
            });
        }
    }
    Ok((closure, certs, skipped))
}

/// `Π(S)` for an invariant point set `S` of a finite system: every orbit
/// inside `S` with the whole circle. `S` is closed (the space is discrete),
/// so this is also its closure.
pub fn closure_of_point_set(sys: &DynSystem, s: &[Point]) -> Result<SSpaceSubset> {
    let orbits = finite_orbits(sys)?;
    for p in s {
        sys.check_point(p)?;
    }
    if !sys.is_invariant(s)? {
        return Err(Error::NotInvariant);
    }
    Ok(SSpaceSubset::new(
        orbits
            .iter()
            .enumerate()
            .filter(|(_, o)| s.contains(o.base()))
            .map(|(i, _)| (i, TSubset::full())),
    ))
}

/// One row of the rotation chart: `(θ, λ) ↦ (qθ mod 1, λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartRow {
    pub theta: Ratio<i64>,
    pub lambda: f64,
    pub orbit_coordinate: Ratio<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StructureDescription {
    /// One circle per orbit of a finite system.
    DisjointCircles { components: Vec<Vec<Point>> },
    /// A rational rotation by `p/q`: orbits are parametrised by `qθ mod 1`
    /// (the map `z ↦ z^q`), and the structure space is a torus.
    Torus { p: i64, q: i64, chart: Vec<ChartRow> },
}

impl StructureDescription {
    pub fn component_count(&self) -> usize {
        match self {
            StructureDescription::DisjointCircles { components } => components.len(),
            StructureDescription::Torus { .. } => 1,
        }
    }

    pub fn summary(&self) -> String {
        match self {
            StructureDescription::DisjointCircles { components } => {
                format!("disjoint union of {} circle(s)", components.len())
            }
            StructureDescription::Torus { q, .. } => format!("T × T, orbit chart z ↦ z^{q}"),
        }
    }
}

/// Describes the structure space. For rotations the chart is sampled at
/// `θ = i/8`, `λ = j/4`.
pub fn structure_space_describe(sys: &DynSystem) -> Result<StructureDescription> {
    match sys.backend() {
        Backend::FinitePermutation { .. } => Ok(StructureDescription::DisjointCircles {
            components: sys
                .orbit_space()?
                .into_iter()
                .map(|o| o.points().unwrap_or(&[]).to_vec())
                .collect(),
        }),
        Backend::RationalRotation { p, q } => {
            let mut chart = Vec::new();
            for i in 0..8 {
                let x = Point::angle(i, 8);
                let label = sys.orbit_label(&x)?;
                for j in 0..4 {
                    chart.push(ChartRow {
                        theta: Ratio::new(i, 8),
                        lambda: j as f64 / 4.0,
                        orbit_coordinate: label,
                    });
                }
            }
            Ok(StructureDescription::Torus { p: *p, q: *q, chart })
        }
        Backend::AperiodicOrbit { .. } => Err(Error::Unsupported(
            "no structure space description for the aperiodic model".into(),
        )),
    }
}
