//! Scalar fields used for function values and coefficients.
//!
//! Two implementations exist: [`C64`] (double precision complex numbers) and
//! [`GaussianRational`] (complex numbers with arbitrary precision rational
//! parts). Everything in the algebra is generic over [`Scalar`], so the same
//! code path runs bit-exact on rational data and approximately on float data.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub type C64 = Complex<f64>;
pub type GaussianRational = Complex<BigRational>;

pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Div<Output = Self>
{
    /// Whether arithmetic in this field is exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn conj(&self) -> Self;
    fn modulus(&self) -> f64;
    /// An interval guaranteed to contain the true modulus.
    fn modulus_bounds(&self) -> (f64, f64);
    fn to_c64(&self) -> C64;
    /// Converts a float complex number. Exact fields convert the binary value
    /// exactly; `None` for non-finite input.
    fn from_c64(z: C64) -> Option<Self>;
    fn from_i64(n: i64) -> Self;
    /// `exp(2πi·num/den)`, or `None` when the field cannot hold it.
    fn cis_turns(num: i64, den: i64) -> Option<Self>;
    /// A unit-modulus sample point near `exp(2πi·k/m)`. Distinct `k` in
    /// `0..m` give distinct points; float fields return the root of unity
    /// itself, exact fields a nearby rational point of the unit circle.
    fn unit_sample(k: u64, m: u64) -> Self;
    /// `re + i·im` from exact rational parts, rounded for float fields.
    fn from_ratio(re: &BigRational, im: &BigRational) -> Self;
    /// The exact rational parts, `None` for float fields.
    fn exact_parts(&self) -> Option<(BigRational, BigRational)>;

    /// Tests `|self| ≤ tol`; a zero tolerance is an exact zero test.
    fn is_negligible(&self, tol: f64) -> bool {
        if tol == 0.0 {
            self.is_zero()
        } else {
            self.modulus() <= tol
        }
    }

    /// Integer power; negative exponents invert.
    fn powi(&self, n: i64) -> Self {
        let mut base = if n < 0 {
            <Self as Scalar>::one() / self.clone()
        } else {
            self.clone()
        };
        let mut e = n.unsigned_abs();
        let mut acc = <Self as Scalar>::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
}

fn turn_fraction(num: i64, den: i64) -> (i64, i64) {
    let r = num.rem_euclid(den);
    let g = num_integer::gcd(r, den).max(1);
    (r / g, den / g)
}

impl Scalar for C64 {
    const EXACT: bool = false;

    fn from_ratio(re: &BigRational, im: &BigRational) -> Self {
        Complex::new(rat_to_f64(re), rat_to_f64(im))
    }
    fn exact_parts(&self) -> Option<(BigRational, BigRational)> {
        None
    }

    fn zero() -> Self {
        Complex::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn modulus(&self) -> f64 {
        self.norm()
    }
    fn modulus_bounds(&self) -> (f64, f64) {
        let m = self.norm();
        if m == 0.0 {
            return (0.0, 0.0);
        }
        (m.next_down().next_down().max(0.0), m.next_up().next_up())
    }
    fn to_c64(&self) -> C64 {
        *self
    }
    fn from_c64(z: C64) -> Option<Self> {
        (z.re.is_finite() && z.im.is_finite()).then_some(z)
    }
    fn from_i64(n: i64) -> Self {
        Complex::new(n as f64, 0.0)
    }
    fn cis_turns(num: i64, den: i64) -> Option<Self> {
        if den == 0 {
            return None;
        }
        let (r, d) = turn_fraction(num, den);
        // exact values at quarter turns keep unit-law tests bit-exact
        if r == 0 {
            return Some(<Self as Scalar>::one());
        } else if 4 * r == d {
            return Some(Complex::new(0.0, 1.0));
        } else if 2 * r == d {
            return Some(Complex::new(-1.0, 0.0));
        } else if 4 * r == 3 * d {
            return Some(Complex::new(0.0, -1.0));
        }
        let theta = std::f64::consts::TAU * (r as f64) / (d as f64);
        Some(Complex::new(theta.cos(), theta.sin()))
    }
    fn unit_sample(k: u64, m: u64) -> Self {
        Self::cis_turns(k as i64, m as i64).unwrap_or_else(<Self as Scalar>::one)
    }
}

fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl Scalar for GaussianRational {
    const EXACT: bool = true;

    fn from_ratio(re: &BigRational, im: &BigRational) -> Self {
        Complex::new(re.clone(), im.clone())
    }
    fn exact_parts(&self) -> Option<(BigRational, BigRational)> {
        Some((self.re.clone(), self.im.clone()))
    }

    fn zero() -> Self {
        Complex::new(BigRational::zero(), BigRational::zero())
    }
    fn one() -> Self {
        Complex::new(BigRational::one(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn modulus(&self) -> f64 {
        let sq = &self.re * &self.re + &self.im * &self.im;
        rat_to_f64(&sq).sqrt()
    }
    fn modulus_bounds(&self) -> (f64, f64) {
        if Scalar::is_zero(self) {
            return (0.0, 0.0);
        }
        let m = self.modulus();
        let lo = m.next_down().next_down().next_down().max(0.0);
        (lo, m.next_up().next_up().next_up())
    }
    fn to_c64(&self) -> C64 {
        Complex::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
    fn from_c64(z: C64) -> Option<Self> {
        Some(Complex::new(
            BigRational::from_float(z.re)?,
            BigRational::from_float(z.im)?,
        ))
    }
    fn from_i64(n: i64) -> Self {
        Complex::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }
    fn cis_turns(num: i64, den: i64) -> Option<Self> {
        if den == 0 {
            return None;
        }
        let (r, d) = turn_fraction(num, den);
        let int = |n: i64| BigRational::from_integer(BigInt::from(n));
        if r == 0 {
            Some(<Self as Scalar>::one())
        } else if 4 * r == d {
            Some(Complex::new(int(0), int(1)))
        } else if 2 * r == d {
            Some(Complex::new(int(-1), int(0)))
        } else if 4 * r == 3 * d {
            Some(Complex::new(int(0), int(-1)))
        } else {
            None
        }
    }
    fn unit_sample(k: u64, m: u64) -> Self {
        if let Some(z) = Self::cis_turns(k as i64, m as i64) {
            return z;
        }
        // stereographic parametrisation: t ↦ ((1 − t²) + 2ti)/(1 + t²)
        // lies exactly on the unit circle for every rational t
        let half_angle = std::f64::consts::PI * (k % m) as f64 / m as f64;
        // t rounded to a multiple of 2⁻¹⁶: keeps numbers small, and tan has
        // slope ≥ 1 so distinct k stay distinct for m below ~2·10⁵
        let scaled = (half_angle.tan() * 65536.0).round() as i64;
        let t = BigRational::new(BigInt::from(scaled), BigInt::from(65536));
        let t2 = &t * &t;
        let one = BigRational::one();
        let den = &one + &t2;
        let two = BigRational::from_integer(BigInt::from(2));
        Complex::new((&one - &t2) / &den, (two * t) / den)
    }
}

/// Tolerance for unit-modulus checks in floating point.
pub const UNIT_TOL: f64 = 1e-12;

/// `|z| = 1`, exactly for exact fields and within [`UNIT_TOL`] otherwise.
pub fn is_unit_modulus<S: Scalar>(z: &S) -> bool {
    if S::EXACT {
        z.clone() * z.conj() == <S as Scalar>::one()
    } else {
        (z.modulus() - 1.0).abs() <= UNIT_TOL
    }
}

/// Builds a Gaussian rational `re_num/den + i·im_num/den`.
pub fn gaussian(re_num: i64, im_num: i64, den: i64) -> GaussianRational {
    let d = BigInt::from(den);
    Complex::new(
        BigRational::new(BigInt::from(re_num), d.clone()),
        BigRational::new(BigInt::from(im_num), d),
    )
}

/// Squared modulus of a Gaussian rational, exact.
pub fn modulus_squared(z: &GaussianRational) -> BigRational {
    &z.re * &z.re + &z.im * &z.im
}

/// `true` when `z` lies exactly on the unit circle.
pub fn is_exact_unit(z: &GaussianRational) -> bool {
    modulus_squared(z).is_one()
}

/// Sum of upper bounds, rounded upward, for an interval-safe norm estimate.
pub(crate) fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s == 0.0 {
        0.0
    } else {
        s.next_up()
    }
}

pub(crate) fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s <= 0.0 {
        0.0
    } else {
        s.next_down()
    }
}
