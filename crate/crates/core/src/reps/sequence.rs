//! The representations `π^p_x` on two-sided sequences for an aperiodic
//! point `x`: `π(f)e_k = f(σᵏx)e_k` and `π(δ)e_k = e_{k+1}`, so
//!
//! ```text
//! (π(a)v)_m = Σₙ fₙ(σᵐx)·v_{m−n}.
//! ```
//!
//! Only finitely supported vectors are handled, on which every `π^p_x`
//! acts by the same formula; the order `p` only enters through norms.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::AlgebraElement;
use crate::dynsys::{DynSystem, Point};
use crate::function::FunctionOnX;
use crate::scalar::{add_down, add_up, Scalar};
use crate::{Error, Result};

/// The exponent of an `ℓ^p` norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpOrder {
    P(u32),
    Inf,
}

impl std::fmt::Display for LpOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LpOrder::P(p) => write!(f, "{p}"),
            LpOrder::Inf => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for LpOrder {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "∞" => Ok(LpOrder::Inf),
            _ => match s.parse::<u32>() {
                Ok(p) if p >= 1 => Ok(LpOrder::P(p)),
                _ => Err(Error::InvalidArgument(format!("bad norm order {s:?}"))),
            },
        }
    }
}

/// A finitely supported two-sided sequence `Σ v_k e_k`. Zero entries are
/// never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SeqVector<S> {
    entries: BTreeMap<i64, S>,
}

impl<S: Scalar> Default for SeqVector<S> {
    fn default() -> Self {
        SeqVector {
            entries: BTreeMap::new(),
        }
    }
}

impl<S: Scalar> SeqVector<S> {
    /// Repeated indices are summed.
    pub fn new(entries: impl IntoIterator<Item = (i64, S)>) -> Self {
        let mut v = SeqVector::default();
        for (k, x) in entries {
            v.add_at(k, x);
        }
        v
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// The basis vector `e_k`.
    pub fn basis(k: i64) -> Self {
        Self::new([(k, S::one())])
    }

    fn add_at(&mut self, k: i64, x: S) {
        let sum = match self.entries.remove(&k) {
            Some(old) => old + x,
            None => x,
        };
        if !sum.is_zero() {
            self.entries.insert(k, sum);
        }
    }

    pub fn get(&self, k: i64) -> S {
        self.entries.get(&k).cloned().unwrap_or_else(S::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (i64, &S)> {
        self.entries.iter().map(|(k, x)| (*k, x))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// `max |k|` over the support, `0` for the zero vector.
    pub fn radius(&self) -> usize {
        self.entries
            .keys()
            .map(|k| k.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, x) in &other.entries {
            out.add_at(*k, x.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::new(self.entries.iter().map(|(k, x)| (*k, s.clone() * x.clone())))
    }

    /// Moves the entry at `k` to `k + n`; this is `π(δⁿ)`.
    pub fn shift(&self, n: i64) -> Self {
        SeqVector {
            entries: self.entries.iter().map(|(k, x)| (k + n, x.clone())).collect(),
        }
    }

    /// Entries with `|k| ≤ n`.
    pub fn truncate(&self, n: usize) -> Self {
        self.filtered(|k| k.unsigned_abs() as usize <= n)
    }

    /// Entries with `|k| > n`.
    pub fn tail(&self, n: usize) -> Self {
        self.filtered(|k| k.unsigned_abs() as usize > n)
    }

    fn filtered(&self, keep: impl Fn(i64) -> bool) -> Self {
        SeqVector {
            entries: self
                .entries
                .iter()
                .filter(|(k, _)| keep(**k))
                .map(|(k, x)| (*k, x.clone()))
                .collect(),
        }
    }

    pub fn norm(&self, order: LpOrder) -> f64 {
        let moduli = self.entries.values().map(S::modulus);
        match order {
            LpOrder::Inf => moduli.fold(0.0, f64::max),
            LpOrder::P(1) => moduli.fold(0.0, |s, m| s + m),
            LpOrder::P(p) => moduli.fold(0.0, |s, m| s + m.powi(p as i32)).powf(1.0 / p as f64),
        }
    }

    /// An interval containing the true `ℓ¹` norm.
    pub fn l1_bounds(&self) -> (f64, f64) {
        self.entries.values().fold((0.0, 0.0), |(lo, hi), x| {
            let (l, h) = x.modulus_bounds();
            (add_down(lo, l), add_up(hi, h))
        })
    }

    /// Index of an entry of largest modulus. Ties go to the smallest `|n|`,
    /// then to the negative index.
    pub fn argmax(&self) -> Option<i64> {
        let mut best: Option<(i64, f64)> = None;
        for (k, x) in &self.entries {
            let m = x.modulus();
            let better = match best {
                None => true,
                Some((bk, bm)) => m > bm || (m == bm && (k.abs(), *k) < (bk.abs(), bk)),
            };
            if better {
                best = Some((*k, m));
            }
        }
        best.map(|(k, _)| k)
    }
}

fn check_aperiodic(sys: &DynSystem, x: &Point) -> Result<()> {
    match sys.period(x)? {
        None => Ok(()),
        Some(_) => Err(Error::PeriodicPoint(x.to_string())),
    }
}

/// `π_x(a)v`, computed exactly: `(π(a)v)_m = Σₙ fₙ(σᵐx)·v_{m−n}`.
pub fn aperiodic_apply<S: Scalar>(
    x: &Point,
    a: &AlgebraElement<S>,
    v: &SeqVector<S>,
) -> Result<SeqVector<S>> {
    let sys = a.system();
    check_aperiodic(sys, x)?;
    let mut out = SeqVector::zero();
    for (n, f) in a.coeffs() {
        for (k, vk) in v.entries() {
            let m = k + n;
            let fm = f.evaluate(sys, &sys.apply_sigma(x, m)?)?;
            if !fm.is_zero() {
                out.add_at(m, fm * vk.clone());
            }
        }
    }
    Ok(out)
}

/// The function used to cut a sequence down to `e_0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BumpShape {
    /// The indicator of `x`: kills every other entry.
    Indicator,
    /// `0` on `σʲx` for `0 < |j| ≤ N` and `1` elsewhere: only the entries
    /// with `|j| ≤ N` are removed, so the tail survives.
    Notch,
}

fn cutoff<S: Scalar>(sys: &DynSystem, x: &Point, n: usize, shape: BumpShape) -> Result<FunctionOnX<S>> {
    match shape {
        BumpShape::Indicator => FunctionOnX::bump(sys, x, n),
        BumpShape::Notch => FunctionOnX::notch(sys, x, n),
    }
}

/// `a = (Σ_{|n|≤N₂} μₙδⁿ)·f` with `f` cutting `ρ` down near `e_0`.
fn single_step<S: Scalar>(
    sys: &Arc<DynSystem>,
    x: &Point,
    tau: &SeqVector<S>,
    n1: usize,
    n2: usize,
    shape: BumpShape,
) -> Result<AlgebraElement<S>> {
    let f = AlgebraElement::embed_function(sys, cutoff(sys, x, n1, shape)?)?;
    let series = AlgebraElement::scalar_series(
        sys,
        tau.truncate(n2).entries().map(|(k, m)| (k, m.clone())),
    )?;
    series.multiply(&f)
}

/// One exact solve of `π¹_x(a)ρ = τ` for `ρ(0) = 1` with `‖a‖ ≤ ‖τ‖₁`.
///
/// With `N₁, N₂` the support radii of `ρ` and `τ`, `a` is
/// `(Σ_{|n|≤N₂} τₙδⁿ)·f` where `f` vanishes on `σʲx` for `0 < |j| ≤ N₁` and
/// is `1` elsewhere: `π(f)ρ = e_0`, hence `π(a)ρ = τ`. For `ρ = e_0` this
/// gives `f = 1`.
pub fn density_solve_onestep<S: Scalar>(
    sys: &Arc<DynSystem>,
    x: &Point,
    rho: &SeqVector<S>,
    tau: &SeqVector<S>,
) -> Result<AlgebraElement<S>> {
    check_aperiodic(sys, x)?;
    let r0 = rho.get(0);
    let unit = if S::EXACT {
        r0 == S::one()
    } else {
        (r0 - S::one()).modulus() <= 1e-12
    };
    if !unit {
        return Err(Error::InvalidArgument("ρ(0) must be 1".into()));
    }
    single_step(sys, x, tau, rho.radius(), tau.radius(), BumpShape::Notch)
}

/// How each step of [`density_solve`] truncates `ρ` and the current target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    /// Full supports: one step, zero residual.
    Exact,
    /// The smallest `(N₁, N₂)` (first `N₁`, then `N₂`) that keeps the step
    /// error below its budget `γʲ‖τ‖`, each optionally capped.
    /// Each step then has residual `< γʲ‖τ‖` and the loop runs until the
    /// residual vanishes or `max_steps` is reached.
    Minimal {
        max_n1: Option<usize>,
        max_n2: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub gamma: f64,
    pub max_steps: usize,
    pub truncation: Truncation,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            gamma: 0.5,
            max_steps: 64,
            truncation: Truncation::Exact,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DensitySolution<S> {
    pub a: AlgebraElement<S>,
    /// `‖τ − π(a₁ + … + a_j)ρ′‖₁` after each step `j`.
    pub residual_norms: Vec<f64>,
    /// `(N₁, N₂)` used in each step.
    pub truncations: Vec<(usize, usize)>,
    /// The index moved to `0` before solving.
    pub n0: i64,
    /// `max |ρₙ| = |ρ(n₀)|`.
    pub max_coefficient: f64,
    /// Achieved `ε` in `‖a‖ ≤ (1 + ε)‖τ‖ / max|ρₙ|`, from an upper bound of
    /// `‖a′‖` for the normalised problem.
    pub epsilon: f64,
}

impl<S> DensitySolution<S> {
    pub fn steps(&self) -> usize {
        self.residual_norms.len()
    }
}

/// Solves `π¹_x(a)ρ = τ` for arbitrary nonzero `ρ`.
///
/// `ρ` is first shifted and scaled so that an entry of largest modulus
/// becomes `ρ′(0) = 1`; the normalised problem is solved by successive
/// one-step approximations `a′ = a₁ + a₂ + …` with
/// `‖τ − π(a₁+…+a_j)ρ′‖ < γʲ‖τ‖` and `‖a_{j+1}‖ ≤` the current residual;
/// finally `a = a′·ρ(n₀)⁻¹δ^{−n₀}`.
pub fn density_solve<S: Scalar>(
    sys: &Arc<DynSystem>,
    x: &Point,
    rho: &SeqVector<S>,
    tau: &SeqVector<S>,
    opts: &SolveOptions,
) -> Result<DensitySolution<S>> {
    check_aperiodic(sys, x)?;
    if !(opts.gamma > 0.0 && opts.gamma < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "γ must lie in (0, 1), got {}",
            opts.gamma
        )));
    }
    let n0 = rho
        .argmax()
        .ok_or_else(|| Error::InvalidArgument("ρ must be nonzero".into()))?;
    let c = rho.get(n0);
    let max_coefficient = c.modulus();
    let mut rho_n = rho.shift(-n0).scale(&(S::one() / c.clone()));
    // exact even when the float quotient c/c is not
    rho_n.entries.insert(0, S::one());

    let tau_norm = tau.norm(LpOrder::P(1));
    let mut a_n = AlgebraElement::zero(sys);
    let mut residual = tau.clone();
    let mut residual_norms = Vec::new();
    let mut truncations = Vec::new();
    for step in 1..=opts.max_steps.max(1) {
        if residual.is_zero() {
            break;
        }
        let (n1, n2) = match opts.truncation {
            Truncation::Exact => (rho_n.radius(), residual.radius()),
            Truncation::Minimal { max_n1, max_n2 } => {
                let budget = opts.gamma.powi(step as i32) * tau_norm;
                let (n1, n2) = minimal_truncation(&rho_n, &residual, budget, max_n1, max_n2)
                    .ok_or_else(|| {
                        Error::ToleranceNotMet(format!(
                            "step {step}: truncation caps too small for budget {budget:e}"
                        ))
                    })?;
                (n1, n2)
            }
        };
        let a_j = single_step(sys, x, &residual, n1, n2, BumpShape::Notch)?;
        residual = residual.sub(&aperiodic_apply(x, &a_j, &rho_n)?);
        a_n = a_n.add(&a_j)?;
        residual_norms.push(residual.norm(LpOrder::P(1)));
        truncations.push((n1, n2));
        if opts.truncation == Truncation::Exact {
            break;
        }
    }

    let epsilon = if tau.is_zero() {
        0.0
    } else {
        (a_n.one_norm_bounds().1 / tau.l1_bounds().0 - 1.0).max(0.0)
    };
    let correction = AlgebraElement::scalar_series(sys, [(-n0, S::one() / c)])?;
    Ok(DensitySolution {
        a: a_n.multiply(&correction)?,
        residual_norms,
        truncations,
        n0,
        max_coefficient,
        epsilon,
    })
}

/// Smallest `(N₁, N₂)` in lexicographic order with
/// `‖r‖·‖ρ − ρ_{N₁}‖ + ‖r − r_{N₂}‖ < budget`, which bounds the residual of
/// one step. A small safety factor absorbs rounding in the float estimate.
fn minimal_truncation<S: Scalar>(
    rho: &SeqVector<S>,
    r: &SeqVector<S>,
    budget: f64,
    max_n1: Option<usize>,
    max_n2: Option<usize>,
) -> Option<(usize, usize)> {
    let budget = budget * (1.0 - 1e-9);
    let r_norm = r.norm(LpOrder::P(1));
    let top1 = max_n1.map_or(rho.radius(), |m| m.min(rho.radius()));
    let top2 = max_n2.map_or(r.radius(), |m| m.min(r.radius()));
    for n1 in 0..=top1 {
        let spent = r_norm * rho.tail(n1).norm(LpOrder::P(1));
        if spent >= budget {
            continue;
        }
        if let Some(n2) = (0..=top2).find(|&n2| spent + r.tail(n2).norm(LpOrder::P(1)) < budget) {
            return Some((n1, n2));
        }
    }
    None
}

#[derive(Debug, Clone)]
pub struct BasisExtraction<S> {
    /// `π^p_x(f)ρ′` for the normalised `ρ′`.
    pub vector: SeqVector<S>,
    /// `(Σ_{|n|>N} |ρ′ₙ|^p)^{1/p}`, an upper bound for `‖vector − e_0‖_p`.
    pub error_bound: f64,
    pub order: LpOrder,
    /// The index moved to `0` by the normalisation.
    pub n0: i64,
}

/// Normalises `ρ` (shift an entry of largest modulus to `0`, scale it to
/// `1`) and applies a cutoff `f` with `f(x) = 1`, `f(σʲx) = 0` for
/// `0 < |j| ≤ N`, `‖f‖ = 1`. The result is within the `ℓ^p` tail norm of
/// `ρ′` beyond `N` of `e_0`; with [`BumpShape::Notch`] the distance equals
/// that tail norm.
pub fn extract_basis_vector<S: Scalar>(
    sys: &Arc<DynSystem>,
    x: &Point,
    rho: &SeqVector<S>,
    n: usize,
    order: LpOrder,
    shape: BumpShape,
) -> Result<BasisExtraction<S>> {
    check_aperiodic(sys, x)?;
    let n0 = rho
        .argmax()
        .ok_or_else(|| Error::InvalidArgument("ρ must be nonzero".into()))?;
    let c = rho.get(n0);
    let mut rho_n = rho.shift(-n0).scale(&(S::one() / c));
    rho_n.entries.insert(0, S::one());
    let f = AlgebraElement::embed_function(sys, cutoff(sys, x, n, shape)?)?;
    Ok(BasisExtraction {
        vector: aperiodic_apply(x, &f, &rho_n)?,
        error_bound: rho_n.tail(n).norm(order),
        order,
        n0,
    })
}
