//! Error function of complex argument and the scaled complement used by the
//! closed-form kernels.
//!
//! Two evaluation routes are combined:
//!
//! * power series around the origin, in either the Maclaurin form
//!   `erf(z) = 2/√π Σ (-1)^n z^(2n+1) / (n! (2n+1))` or the Kummer form
//!   `erf(z) = 2/√π e^(-z²) Σ 2^n z^(2n+1) / (2n+1)!!`, whichever has the
//!   smaller intermediate terms for the given argument;
//! * the Laplace continued fraction of `erfcx(z) = e^(z²) erfc(z)`, used when
//!   `Re z >= 1.5` or `|z| >= 7` (after folding into the right half-plane).
//!
//! The region split keeps the worst-case term growth of the series below a
//! factor of about `e^4.5`, so both routes stay within a few hundred ulps.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest `|z|` accepted by [`erf_complex`].
pub const ERF_ARGUMENT_LIMIT: f64 = 50.0;

const CF_MIN_RE: f64 = 1.5;
const CF_MIN_ABS: f64 = 7.0;
const MAX_SERIES_TERMS: usize = 10_000;
const MAX_CF_TERMS: usize = 50_000;

#[inline]
fn two_over_sqrt_pi<T: Real>() -> T {
    T::FRAC_2_SQRT_PI()
}

/// True when the continued fraction is the accurate route for `z` (`Re z >= 0`).
pub(crate) fn prefers_continued_fraction<T: Real>(z: Complex<T>) -> bool {
    z.re >= T::lit(CF_MIN_RE) || z.norm() >= T::lit(CF_MIN_ABS)
}

fn erf_maclaurin<T: Real>(z: Complex<T>) -> Complex<T> {
    let z2 = z * z;
    let peak = z2.norm();
    let mut term = z;
    let mut sum = z;
    for n in 1..MAX_SERIES_TERMS {
        let nf = T::from_usize(n).unwrap();
        term = -term * z2 / nf;
        let add = term / (nf + nf + T::one());
        sum += add;
        if nf > peak && add.norm() <= T::epsilon() * sum.norm() {
            break;
        }
    }
    sum * two_over_sqrt_pi::<T>()
}

fn erf_kummer<T: Real>(z: Complex<T>) -> Complex<T> {
    let z2 = z * z;
    let peak = z2.norm();
    let two = T::lit(2.0);
    let mut term = z;
    let mut sum = z;
    for n in 1..MAX_SERIES_TERMS {
        let nf = T::from_usize(n).unwrap();
        term = term * z2 * two / (nf + nf + T::one());
        sum += term;
        if nf > peak && term.norm() <= T::epsilon() * sum.norm() {
            break;
        }
    }
    (-z2).exp() * sum * two_over_sqrt_pi::<T>()
}

/// Series route, picking the form whose terms grow least.
pub(crate) fn erf_series<T: Real>(z: Complex<T>) -> Complex<T> {
    if z.re.abs() > z.im.abs() {
        erf_kummer(z)
    } else {
        erf_maclaurin(z)
    }
}

/// Laplace continued fraction for `erfcx(z)`, modified Lentz evaluation.
///
/// `erfcx(z) = (1/√π) / (z + (1/2) / (z + (2/2) / (z + (3/2) / (z + ...))))`
pub(crate) fn erfcx_continued_fraction<T: Real>(z: Complex<T>) -> Complex<T> {
    let tiny = T::epsilon().powi(4);
    let guard = |c: Complex<T>| {
        if c.norm() < tiny {
            Complex::new(tiny, T::zero())
        } else {
            c
        }
    };
    let half = T::lit(0.5);
    let mut f = guard(z);
    let mut c = f;
    let mut d = Complex::new(T::zero(), T::zero());
    for n in 1..MAX_CF_TERMS {
        let a = T::from_usize(n).unwrap() * half;
        d = guard(z + d * a).inv();
        c = guard(z + Complex::new(a, T::zero()) / c);
        let delta = c * d;
        f *= delta;
        if (delta - T::one()).norm() <= T::epsilon() {
            break;
        }
    }
    f.inv() / T::PI().sqrt()
}

/// Error function `erf(z) = (2/√π) ∫₀^z e^(-t²) dt` for complex `z`.
///
/// Arguments with `|z| > 50` are rejected, as are arguments whose result
/// does not fit the floating point range (`erf(iy)` grows like `e^(y²)`).
pub fn erf_complex<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    let r = z.norm();
    if !(r <= T::lit(ERF_ARGUMENT_LIMIT)) {
        return Err(Error::OutOfRange {
            re: z.re.as_f64(),
            im: z.im.as_f64(),
            limit: ERF_ARGUMENT_LIMIT,
        });
    }
    let value = if z.re < T::zero() {
        -erf_right_half(-z)
    } else {
        erf_right_half(z)
    };
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow {
            re: z.re.as_f64(),
            im: z.im.as_f64(),
        })
    }
}

fn erf_right_half<T: Real>(z: Complex<T>) -> Complex<T> {
    if prefers_continued_fraction(z) {
        let one = Complex::new(T::one(), T::zero());
        one - (-z * z).exp() * erfcx_continued_fraction(z)
    } else {
        erf_series(z)
    }
}

/// Scaled complementary error function `erfcx(z) = e^(z²) erfc(z)`.
///
/// Bounded (of order `1/|z|`) throughout the closed right half-plane, which
/// is where the kernels call it. In the left half-plane it is reconstructed
/// from `2 e^(z²) - erfcx(-z)` and may overflow.
pub fn erfcx<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    let value = if z.re < T::zero() {
        (z * z).exp() * T::lit(2.0) - erfcx_right_half(-z)
    } else {
        erfcx_right_half(z)
    };
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow {
            re: z.re.as_f64(),
            im: z.im.as_f64(),
        })
    }
}

fn erfcx_right_half<T: Real>(z: Complex<T>) -> Complex<T> {
    if prefers_continued_fraction(z) {
        erfcx_continued_fraction(z)
    } else {
        let one = Complex::new(T::one(), T::zero());
        (z * z).exp() * (one - erf_series(z))
    }
}

/// Complementary error function `1 - erf(x)` on the real line.
///
/// Beyond `x = 2` the value comes from `e^(-x²) erfcx(x)`, never from a
/// literal subtraction, so it keeps full relative accuracy deep in the tail.
pub fn erfc_real<T: Real>(x: T) -> T {
    if x < T::zero() {
        return T::lit(2.0) - erfc_real(-x);
    }
    let z = Complex::new(x, T::zero());
    if x <= T::lit(2.0) {
        T::one() - erf_kummer(z).re
    } else {
        (-x * x).exp() * erfcx_continued_fraction(z).re
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn erf_at_origin_is_zero() {
        assert_eq!(erf_complex(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn erf_of_one() {
        let v = erf_complex(c(1.0, 0.0)).unwrap();
        assert!((v.re - 0.842700792949715).abs() < 1e-15);
        assert!(v.im.abs() < 1e-16);
    }

    #[test]
    fn erf_of_i_is_imaginary() {
        let v = erf_complex(c(0.0, 1.0)).unwrap();
        assert_eq!(v.re, 0.0);
        assert!((v.im - 1.650425758797543).abs() < 1e-14);
    }

    #[test]
    fn conjugate_symmetry_at_one_plus_i() {
        let a = erf_complex(c(1.0, 1.0)).unwrap();
        let b = erf_complex(c(1.0, -1.0)).unwrap();
        assert!((a - b.conj()).norm() < 1e-15);
    }

    #[test]
    fn argument_limit_is_enforced() {
        assert!(matches!(
            erf_complex(c(40.0, 40.0)),
            Err(Error::OutOfRange { .. })
        ));
        assert!(erf_complex(c(50.0, 0.0)).is_ok());
    }

    #[test]
    fn overflow_is_reported_not_returned() {
        assert!(matches!(
            erf_complex(c(0.1, 30.0)),
            Err(Error::Overflow { .. })
        ));
    }

    #[test]
    fn erfc_values() {
        assert_eq!(erfc_real(0.0f64), 1.0);
        // 50-digit reference: 0.0046777349810472658379...
        assert!((erfc_real(2.0f64) / 0.004677734981047266 - 1.0).abs() < 1e-13);
        assert!((erfc_real(10.0f64) / 2.088487583762545e-45 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn erfcx_is_bounded_on_the_imaginary_axis() {
        // erfcx(iy) = e^{-y^2} - i erfi(y) e^{-y^2}; the imaginary part is
        // -2/√π · Dawson(y).
        let v = erfcx(c(0.0, 30.0)).unwrap();
        assert!(v.norm() < 0.02);
        let dawson_30 = 0.016675941401059176;
        assert!((v.im + 2.0 / std::f64::consts::PI.sqrt() * dawson_30).abs() < 1e-13);
    }

    #[test]
    fn single_precision_tracks_double() {
        for &(re, im) in &[(0.3, 0.2), (1.7, -0.4), (-2.5, 1.0), (0.2, 3.0)] {
            let d = erf_complex(c(re, im)).unwrap();
            let s = erf_complex(Complex::new(re as f32, im as f32)).unwrap();
            assert!((d.re - s.re as f64).abs() <= 1e-5 * d.norm());
            assert!((d.im - s.im as f64).abs() <= 1e-5 * d.norm());
        }
    }

    #[test]
    fn series_and_continued_fraction_agree_in_overlap_band() {
        let one = c(1.0, 0.0);
        let mut checked = 0;
        for i in 0..=20 {
            let r = 3.5 + i as f64 * 0.05;
            for j in 0..=12 {
                let re = 1.5 + j as f64 * 0.025;
                if re > r {
                    continue;
                }
                for sign in [1.0, -1.0] {
                    let z = c(re, sign * (r * r - re * re).sqrt());
                    let series = erf_series(z);
                    let cf = one - (-z * z).exp() * erfcx_continued_fraction(z);
                    assert!(
                        (series - cf).norm() <= 1e-12 * cf.norm(),
                        "{z}: {series} vs {cf}"
                    );
                    checked += 1;
                }
            }
        }
        // real axis
        for i in 0..=20 {
            let z = c(3.5 + i as f64 * 0.05, 0.0);
            let series = erf_series(z);
            let cf = one - (-z * z).exp() * erfcx_continued_fraction(z);
            assert!((series - cf).norm() <= 1e-12, "{z}");
            checked += 1;
        }
        assert!(checked > 500);
    }
}
