//! Closed forms for the transition probability `P_D` and the pair amplitudes
//! `C_{DD'}`, `X_{DD'}` of static detectors with Gaussian switching, next to
//! a Dirichlet plane. Everything here is evaluated at unit coupling; see
//! [`PairAmplitudes::rescaled`] for the `λ²` factor.
//!
//! The auxiliary functions are
//!
//! ```text
//! f(d, S) = (e^(-d²/4)/d) { Im[e^(iSd/2) erf((S + id)/2)] - sin(Sd/2) }
//! g(d, Δ) = (e^(-d²/4)/d) { Im[e^(iΔd/2) erf((Δ + id)/2)] + i cos(Δd/2) }
//! ```
//!
//! Writing `erf = 1 - e^(-z²) erfcx(z)` turns the real parts into
//! `-e^(-S²/4) Im[erfcx((S + id)/2)] / d`, which is how they are evaluated:
//! the `e^(d²/4)` growth of `erf` never materialises. Note that this also
//! shows `f` falls off like `2 e^(-S²/4) / (√π d²)`, not like a Gaussian.

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::geometry::{pair_distances, DetectorSpec, GeometryConfig, Label, Pair, PairDistances};
use crate::scalar::Real;
use crate::special_fn::erfcx;

/// Below this distance the auxiliary functions switch to their Taylor series.
pub const SMALL_DISTANCE: f64 = 1e-3;

/// Negative probabilities above this are treated as rounding and clamped.
pub const PROBABILITY_CLAMP: f64 = 1e-12;

fn inv_four_sqrt_pi<T: Real>() -> T {
    T::one() / (T::lit(4.0) * T::PI().sqrt())
}

fn erfcx_real<T: Real>(x: T) -> Result<T> {
    Ok(erfcx(Complex::new(x, T::zero()))?.re)
}

/// Even Taylor coefficients `[f0, f2, f4]` of `f(d, S)` about `d = 0`.
pub(crate) fn f_taylor<T: Real>(gap_sum: T) -> Result<[T; 3]> {
    let s = gap_sum;
    let s2 = s * s;
    let e = (-s2 / T::lit(4.0)).exp();
    let sp = T::PI().sqrt();
    let x = sp * erfcx_real(s / T::lit(2.0))?;
    let f0 = e * (T::one() - s * x / T::lit(2.0)) / sp;
    let f2 =
        e * (s * (s2 + T::lit(6.0)) * x - (T::lit(2.0) * s2 + T::lit(8.0))) / (T::lit(48.0) * sp);
    let f4 = e
        * ((T::lit(2.0) * s2 * s2 + T::lit(36.0) * s2 + T::lit(64.0))
            - s * (s2 * s2 + T::lit(20.0) * s2 + T::lit(60.0)) * x)
        / (T::lit(3840.0) * sp);
    Ok([f0, f2, f4])
}

pub(crate) fn f_series<T: Real>(d: T, gap_sum: T) -> Result<T> {
    let [f0, f2, f4] = f_taylor(gap_sum)?;
    let d2 = d * d;
    Ok(f0 + d2 * (f2 + d2 * f4))
}

pub(crate) fn f_direct<T: Real>(d: T, gap_sum: T) -> Result<T> {
    let z = Complex::new(gap_sum, d) / T::lit(2.0);
    let w = erfcx(z)?;
    Ok(-(-gap_sum * gap_sum / T::lit(4.0)).exp() * w.im / d)
}

/// `f(d, S)` with `S = (Ω + Ω')σ >= 0`. Finite at `d = 0`.
pub fn f_aux<T: Real>(d: T, gap_sum: T) -> Result<T> {
    if !(gap_sum >= T::zero()) || !gap_sum.is_finite() {
        return Err(invalid(
            "gap_sum",
            format!("must be finite and >= 0, got {gap_sum}"),
        ));
    }
    if !(d >= T::zero()) {
        return Err(invalid("d", format!("distance must be >= 0, got {d}")));
    }
    if d.is_infinite() {
        return Ok(T::zero());
    }
    if d < T::lit(SMALL_DISTANCE) {
        f_series(d, gap_sum)
    } else {
        f_direct(d, gap_sum)
    }
}

/// `g(d, Δ)` with `Δ = (Ω' - Ω)σ` of either sign.
///
/// The real part is even in `Δ` and finite as `d → 0`; the imaginary part
/// `e^(-d²/4) cos(Δd/2) / d` has a genuine pole there, so `d = 0` is an error.
pub fn g_aux<T: Real>(d: T, gap_diff: T) -> Result<Complex<T>> {
    if !gap_diff.is_finite() {
        return Err(invalid("gap_diff", "must be finite"));
    }
    if !(d > T::zero()) {
        return Err(invalid("d", format!("distance must be > 0, got {d}")));
    }
    if d.is_infinite() {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    let delta = gap_diff.abs();
    let half = T::lit(0.5);
    let envelope = (-d * d / T::lit(4.0)).exp();
    let re = f_aux(d, delta)? + envelope * (delta * d * half).sin() / d;
    let im = envelope * (delta * d * half).cos() / d;
    Ok(Complex::new(re, im))
}

/// Unclamped `P_D` for a detector at height `z` (units of σ).
///
/// `z = ∞` gives the free-space value.
pub fn transition_probability_raw<T: Real>(gap: T, z: T) -> Result<T> {
    if !(gap >= T::zero()) || !gap.is_finite() {
        return Err(invalid(
            "gap",
            format!("must be finite and >= 0, got {gap}"),
        ));
    }
    if !(z >= T::zero()) {
        return Err(invalid("z", format!("height must be >= 0, got {z}")));
    }
    let two = T::lit(2.0);
    let image = two * z;
    let s = two * gap;
    if image < T::lit(SMALL_DISTANCE) {
        // f(0) - f(2z) straight from the series, no cancellation against the
        // free bracket.
        let [_, f2, f4] = f_taylor(s)?;
        let d2 = image * image;
        return Ok(-d2 * (f2 + d2 * f4) * inv_four_sqrt_pi::<T>());
    }
    let free = free_transition_probability(gap)?;
    Ok(free - f_aux(image, s)? * inv_four_sqrt_pi::<T>())
}

/// `[e^(-Ω²) - √π Ω erfc(Ω)] / (4π)`, the probability without a mirror.
pub fn free_transition_probability<T: Real>(gap: T) -> Result<T> {
    let bracket = (-gap * gap).exp() * (T::one() - T::PI().sqrt() * gap * erfcx_real(gap)?);
    Ok(bracket / (T::lit(4.0) * T::PI()))
}

/// Clamps rounding-level negatives to zero. Returns the value and whether
/// the clamp fired.
pub fn clamp_probability<T: Real>(p: T) -> Result<(T, bool)> {
    if p >= T::zero() {
        Ok((p, false))
    } else if p > -T::lit(PROBABILITY_CLAMP) {
        Ok((T::zero(), true))
    } else {
        Err(Error::NegativeProbability { value: p.as_f64() })
    }
}

/// `P_D` at unit coupling for a detector with gap `Ωσ` at height `z/σ`.
pub fn transition_probability<T: Real>(gap: T, z: T) -> Result<T> {
    Ok(clamp_probability(transition_probability_raw(gap, z)?)?.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probabilities<T> {
    /// `[P_A, P_B, P_C]`.
    pub values: [T; 3],
    /// How many of the three were clamped from a tiny negative value.
    pub clamped: usize,
}

impl<T: Real> Probabilities<T> {
    pub fn new(values: [T; 3]) -> Self {
        Self { values, clamped: 0 }
    }

    pub fn of(&self, label: Label) -> T {
        self.values[label.index()]
    }

    pub fn total(&self) -> T {
        self.values[0] + self.values[1] + self.values[2]
    }

    pub fn rescaled(&self, lambda: T) -> Self {
        let l2 = lambda * lambda;
        Self {
            values: self.values.map(|p| p * l2),
            clamped: self.clamped,
        }
    }
}

pub fn probabilities<T: Real>(config: &GeometryConfig<T>) -> Result<Probabilities<T>> {
    let mut values = [T::zero(); 3];
    let mut clamped = 0;
    for (v, d) in values.iter_mut().zip(&config.detectors) {
        let (p, hit) = clamp_probability(transition_probability_raw(d.gap, d.height())?)?;
        *v = p;
        clamped += usize::from(hit);
    }
    Ok(Probabilities { values, clamped })
}

/// `C_{DD'}` and `X_{DD'}` for one pair, at unit coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairAmplitudes<T> {
    pub c: Complex<T>,
    pub x: Complex<T>,
    pub distances: PairDistances<T>,
}

impl<T: Real> PairAmplitudes<T> {
    pub fn zero(distances: PairDistances<T>) -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self {
            c: z,
            x: z,
            distances,
        }
    }

    pub fn rescaled(&self, lambda: T) -> Self {
        let l2 = lambda * lambda;
        Self {
            c: self.c * l2,
            x: self.x * l2,
            distances: self.distances,
        }
    }

    /// Amplitudes with the detector roles exchanged: `C_{D'D} = C*_{DD'}`,
    /// `X` is symmetric.
    pub fn swapped(&self) -> Self {
        Self {
            c: self.c.conj(),
            ..*self
        }
    }
}

/// Pair amplitudes from gaps and distances.
///
/// ```text
/// C = (1/4√π) e^(-(Ω'-Ω)²/4) [f(direct, Ω+Ω') - f(image, Ω+Ω')]
/// X = conj{ -(1/4√π) e^(-(Ω+Ω')²/4) [g(direct, Ω'-Ω) - g(image, Ω'-Ω)] }
/// ```
///
/// The conjugation on `X` makes it match the time-ordered integral with the
/// `(t - t' - iε)` prescription; the published `g` carries the opposite sign
/// on its imaginary part. Only `|X|` enters the coherence.
/// An infinite image distance drops the mirror terms.
pub fn amplitudes_from_distances<T: Real>(
    gap_a: T,
    gap_b: T,
    distances: PairDistances<T>,
) -> Result<PairAmplitudes<T>> {
    let sum = gap_a + gap_b;
    let diff = gap_b - gap_a;
    let quarter = T::lit(0.25);
    let k = inv_four_sqrt_pi::<T>();
    let c = k
        * (-diff * diff * quarter).exp()
        * (f_aux(distances.direct, sum)? - f_aux(distances.image, sum)?);
    let x = -(g_aux(distances.direct, diff)? - g_aux(distances.image, diff)?)
        * (k * (-sum * sum * quarter).exp());
    Ok(PairAmplitudes {
        c: Complex::new(c, T::zero()),
        x: x.conj(),
        distances,
    })
}

/// `C_{ab}` and `X_{ab}` for two static detectors beside the mirror.
pub fn pair_amplitudes<T: Real>(
    a: &DetectorSpec<T>,
    b: &DetectorSpec<T>,
) -> Result<PairAmplitudes<T>> {
    amplitudes_from_distances(a.gap, b.gap, pair_distances(a, b)?)
}

/// As [`pair_amplitudes`] with the mirror removed.
pub fn pair_amplitudes_free<T: Real>(
    a: &DetectorSpec<T>,
    b: &DetectorSpec<T>,
) -> Result<PairAmplitudes<T>> {
    let mut d = pair_distances(a, b)?;
    d.image = T::infinity();
    amplitudes_from_distances(a.gap, b.gap, d)
}

/// Amplitudes for `AB`, `BC`, `AC`, in that order.
pub fn all_pair_amplitudes<T: Real>(config: &GeometryConfig<T>) -> Result<[PairAmplitudes<T>; 3]> {
    let amp = |pair: Pair| {
        let (a, b) = config.pair(pair);
        pair_amplitudes(a, b)
    };
    Ok([amp(Pair::AB)?, amp(Pair::BC)?, amp(Pair::AC)?])
}

/// `BC` obtained by reusing the `AB` distances with `Ω_A → Ω_C`, the literal
/// substitution reading. Identical to the generic result for parallel
/// placements, different for orthogonal ones; kept for the validation audit.
pub fn bc_by_literal_substitution<T: Real>(
    config: &GeometryConfig<T>,
) -> Result<PairAmplitudes<T>> {
    let (a, b) = config.pair(Pair::AB);
    let c = config.detector(Label::C);
    amplitudes_from_distances(c.gap, b.gap, pair_distances(a, b)?)
}
