//! Brute-force evaluation of the defining double integrals for `P`, `C`
//! and `X`, using the image-method Wightman function with an explicit `iε`
//! regulator, followed by polynomial extrapolation to `ε → 0`.
//!
//! This module shares nothing with [`crate::closed_form`] beyond geometry:
//! no error functions, no auxiliary `f`/`g`.
//!
//! For static detectors with Gaussian switching the centre-of-mass time
//! `v = (τ + τ')/2` integrates to a Gaussian in closed form, leaving a single
//! integral over `u = τ - τ'` (the reduced mode). The direct mode integrates
//! the full `(τ, τ')` square and exists to check that reduction.

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::geometry::{pair_distances, DetectorSpec, PairDistances};
use crate::quadrature::{integrate, QuadratureControl};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSettings<T> {
    /// Regulator values in units of σ, strictly decreasing with a fixed ratio.
    pub epsilon_schedule: Vec<T>,
    /// Switching times are integrated over `[-tau_window, tau_window]`.
    pub tau_window: T,
    /// Uniform panels laid over the window before adaptive refinement.
    pub grid: usize,
    /// Number of powers of `ε` removed by extrapolation (at most
    /// `epsilon_schedule.len() - 1`).
    pub extrapolation_order: usize,
    pub control: QuadratureControl<T>,
}

impl<T: Real> Default for QuadratureSettings<T> {
    fn default() -> Self {
        Self::geometric(T::lit(0.04), T::lit(0.5), 5)
    }
}

impl<T: Real> QuadratureSettings<T> {
    /// `count` regulators `first · ratio^k` with full-order extrapolation.
    pub fn geometric(first: T, ratio: T, count: usize) -> Self {
        let epsilon_schedule = (0..count).map(|k| first * ratio.powi(k as i32)).collect();
        Self {
            epsilon_schedule,
            tau_window: T::lit(8.0),
            grid: 16,
            extrapolation_order: count.saturating_sub(1),
            control: QuadratureControl::default(),
        }
    }

    /// The same settings with every regulator halved.
    pub fn halved(&self) -> Self {
        let mut s = self.clone();
        for e in &mut s.epsilon_schedule {
            *e *= T::lit(0.5);
        }
        s
    }

    pub fn validate(&self) -> Result<()> {
        let eps = &self.epsilon_schedule;
        if eps.len() < 3 {
            return Err(invalid("epsilon_schedule", "needs at least three entries"));
        }
        if eps.iter().any(|&e| !(e > T::zero()) || !e.is_finite()) {
            return Err(invalid(
                "epsilon_schedule",
                "entries must be finite and > 0",
            ));
        }
        let ratio = eps[1] / eps[0];
        if !(ratio < T::one()) {
            return Err(invalid("epsilon_schedule", "must be strictly decreasing"));
        }
        for w in eps.windows(2) {
            if ((w[1] / w[0]) / ratio - T::one()).abs() > T::lit(1e-9) {
                return Err(invalid(
                    "epsilon_schedule",
                    "ratio between entries must be constant",
                ));
            }
        }
        if !(self.tau_window >= T::lit(8.0)) {
            return Err(invalid("tau_window", "must be >= 8"));
        }
        if self.grid == 0 {
            return Err(invalid("grid", "must be >= 1"));
        }
        if self.extrapolation_order < 2 || self.extrapolation_order >= eps.len() {
            return Err(invalid(
                "extrapolation_order",
                format!("must lie in 2..={}", eps.len() - 1),
            ));
        }
        Ok(())
    }
}

/// `ε`-extrapolated value with its error estimate and the raw values it
/// came from.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleEstimate<T> {
    pub value: Complex<T>,
    pub error: T,
    pub per_epsilon: Vec<Complex<T>>,
}

/// Image-method Wightman function for a time separation `dt` and the direct
/// and image spatial separations.
///
/// `-(1/4π²) [1/((dt - iε)² - r²) - 1/((dt - iε)² - r_img²)]`; an infinite
/// `d_image` drops the mirror.
pub fn wightman<T: Real>(dt: T, d_direct: T, d_image: T, eps: T) -> Complex<T> {
    let shifted = Complex::new(dt, -eps);
    let s2 = shifted * shifted;
    let mut bracket = (s2 - d_direct * d_direct).inv();
    if d_image.is_finite() {
        bracket -= (s2 - d_image * d_image).inv();
    }
    -bracket / (T::lit(4.0) * T::PI() * T::PI())
}

/// Which of the three defining integrals to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Amplitude {
    /// `∫∫ χχ' e^{-i(Ω_a τ - Ω_b τ')} W(x_a(τ), x_b(τ'))`. With `a = b`
    /// this is the transition probability.
    Correlation,
    /// `-∫∫ χχ' e^{i(Ω_a τ + Ω_b τ')} [θ(τ-τ') W(x_a, x_b) + θ(τ'-τ) W(x_b, x_a)]`.
    TimeOrdered,
}

/// Integrand data for one pair: gaps and separations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairKernel<T> {
    pub gap_a: T,
    pub gap_b: T,
    pub distances: PairDistances<T>,
}

impl<T: Real> PairKernel<T> {
    /// Kernel for two detectors. Coincident positions are allowed here (the
    /// self term of a transition probability).
    pub fn new(a: &DetectorSpec<T>, b: &DetectorSpec<T>) -> Self {
        let distances = pair_distances(a, b).unwrap_or_else(|_| PairDistances {
            direct: T::zero(),
            image: T::lit(2.0) * a.height(),
        });
        Self {
            gap_a: a.gap,
            gap_b: b.gap,
            distances,
        }
    }

    /// Self term of a detector at height `z`; `z = ∞` removes the mirror.
    pub fn single(gap: T, z: T) -> Self {
        Self {
            gap_a: gap,
            gap_b: gap,
            distances: PairDistances {
                direct: T::zero(),
                image: T::lit(2.0) * z,
            },
        }
    }

    fn w(&self, dt: T, eps: T) -> Complex<T> {
        wightman(dt, self.distances.direct, self.distances.image, eps)
    }

    fn poles(&self) -> Vec<T> {
        let mut p = vec![T::zero(), self.distances.direct];
        if self.distances.image.is_finite() {
            p.push(self.distances.image);
        }
        p
    }
}

/// Breakpoints clustering geometrically onto each pole at `±p` and `centre`.
fn refined_breakpoints<T: Real>(centre: T, poles: &[T], eps: T, reach: T) -> Vec<T> {
    let mut pts = Vec::new();
    for &p in poles {
        for s in [-T::one(), T::one()] {
            let x = centre + s * p;
            pts.push(x);
            let mut h = eps;
            while h < reach {
                pts.push(x - h);
                pts.push(x + h);
                h *= T::lit(4.0);
            }
        }
    }
    pts
}

fn uniform_cuts<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    (1..n)
        .map(|k| lo + (hi - lo) * T::from_usize(k).unwrap() / T::from_usize(n).unwrap())
        .collect()
}

/// Reduced single integral over `u = τ - τ'` at one regulator value.
pub fn reduced_integral<T: Real>(
    kind: Amplitude,
    kernel: &PairKernel<T>,
    eps: T,
    settings: &QuadratureSettings<T>,
) -> Result<(Complex<T>, T)> {
    let quarter = T::lit(0.25);
    let half = T::lit(0.5);
    let sqrt_pi = T::PI().sqrt();
    let (ga, gb) = (kernel.gap_a, kernel.gap_b);
    let reach = T::lit(2.0) * settings.tau_window;
    let mut cuts = refined_breakpoints(T::zero(), &kernel.poles(), eps, T::one());
    cuts.extend(uniform_cuts(-reach, reach, settings.grid));

    let (prefactor, integral) = match kind {
        Amplitude::Correlation => {
            let diff = ga - gb;
            let freq = (ga + gb) * half;
            let pre = sqrt_pi * (-diff * diff * quarter).exp();
            let r = integrate(
                |u: T| {
                    let phase = Complex::new(T::zero(), -freq * u).exp();
                    phase * kernel.w(u, eps) * (-u * u * quarter).exp()
                },
                -reach,
                reach,
                &cuts,
                &settings.control,
            );
            (Complex::new(pre, T::zero()), r)
        }
        Amplitude::TimeOrdered => {
            let sum = ga + gb;
            let freq = (ga - gb) * half;
            let pre = -sqrt_pi * (-sum * sum * quarter).exp();
            let r = integrate(
                |u: T| {
                    let phase = Complex::new(T::zero(), freq * u).exp();
                    // u > 0: t_a later, W(x_a, x_b) at dt = u
                    // u < 0: t_b later, W(x_b, x_a) at dt = -u
                    let w = if u >= T::zero() {
                        kernel.w(u, eps)
                    } else {
                        kernel.w(-u, eps)
                    };
                    phase * w * (-u * u * quarter).exp()
                },
                -reach,
                reach,
                &cuts,
                &settings.control,
            );
            (Complex::new(pre, T::zero()), r)
        }
    };
    if !integral.converged {
        return Err(Error::OracleFailure {
            reason: format!(
                "quadrature did not converge at eps = {eps} (error {})",
                integral.error
            ),
        });
    }
    Ok((
        prefactor * integral.value,
        prefactor.norm() * integral.error,
    ))
}

/// Full `(τ, τ')` double integral at one regulator value.
pub fn direct_integral<T: Real>(
    kind: Amplitude,
    kernel: &PairKernel<T>,
    eps: T,
    settings: &QuadratureSettings<T>,
) -> Result<(Complex<T>, T)> {
    let half = T::lit(0.5);
    let window = settings.tau_window;
    let (ga, gb) = (kernel.gap_a, kernel.gap_b);
    let poles = kernel.poles();
    let outer_cuts = uniform_cuts(-window, window, settings.grid);
    let mut failure: Option<Error> = None;
    let mut inner_error = T::zero();

    let outer = integrate(
        |tau: T| {
            let chi = (-tau * tau * half).exp();
            let mut cuts = refined_breakpoints(tau, &poles, eps, T::one());
            cuts.extend(uniform_cuts(-window, window, settings.grid));
            let inner = integrate(
                |tp: T| {
                    let chi_p = (-tp * tp * half).exp();
                    let dt = tau - tp;
                    let (phase, w) = match kind {
                        Amplitude::Correlation => (
                            Complex::new(T::zero(), -(ga * tau - gb * tp)).exp(),
                            kernel.w(dt, eps),
                        ),
                        Amplitude::TimeOrdered => {
                            let w = if dt >= T::zero() {
                                kernel.w(dt, eps)
                            } else {
                                kernel.w(-dt, eps)
                            };
                            (Complex::new(T::zero(), ga * tau + gb * tp).exp(), -w)
                        }
                    };
                    phase * w * chi_p
                },
                -window,
                window,
                &cuts,
                &settings.control,
            );
            if !inner.converged && failure.is_none() {
                failure = Some(Error::OracleFailure {
                    reason: format!("inner quadrature did not converge at tau = {tau}"),
                });
            }
            inner_error = inner_error.max(inner.error);
            inner.value * chi
        },
        -window,
        window,
        &outer_cuts,
        &settings.control,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    if !outer.converged {
        return Err(Error::OracleFailure {
            reason: format!("outer quadrature did not converge at eps = {eps}"),
        });
    }
    let span = T::lit(2.0) * window;
    Ok((outer.value, outer.error + inner_error * span))
}

/// Neville extrapolation of `values[k] ≈ I(eps[k])` to `ε = 0`, treating
/// `I` as a polynomial in `ε`. Returns the diagonal estimates using the first
/// 1, 2, ..., n points.
pub fn extrapolate_to_zero<T: Real>(eps: &[T], values: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = eps.len().min(values.len());
    let mut table: Vec<Complex<T>> = values[..n].to_vec();
    let mut diagonal = vec![table[0]];
    // table[i] holds P_{i-k..i} after step k
    for k in 1..n {
        for i in (k..n).rev() {
            let (xi, xj) = (eps[i], eps[i - k]);
            table[i] = (table[i] * xj - table[i - 1] * xi) / (xj - xi);
        }
        diagonal.push(table[k]);
    }
    diagonal
}

fn extrapolated<T: Real>(
    kind: Amplitude,
    kernel: &PairKernel<T>,
    settings: &QuadratureSettings<T>,
) -> Result<OracleEstimate<T>> {
    settings.validate()?;
    let used = settings.extrapolation_order + 1;
    let eps = &settings.epsilon_schedule[..used];
    let mut per_epsilon = Vec::with_capacity(used);
    let mut quad_error = T::zero();
    for &e in eps {
        let (v, err) = reduced_integral(kind, kernel, e, settings)?;
        per_epsilon.push(v);
        quad_error = quad_error.max(err);
    }
    let diag = extrapolate_to_zero(eps, &per_epsilon);
    let last = diag[used - 1];
    let step = (last - diag[used - 2]).norm();
    let previous = (diag[used - 2] - diag[used - 3]).norm();
    // propagated quadrature noise grows with the extrapolation weights
    let amplification = T::lit(2.0).powi(used as i32);
    let floor = quad_error * amplification;
    let error = step + floor;
    if step > T::lit(10.0) * previous && step > T::lit(10.0) * floor {
        return Err(Error::OracleFailure {
            reason: format!(
                "extrapolation not settling: last step {step:e} vs previous {previous:e}"
            ),
        });
    }
    Ok(OracleEstimate {
        value: last,
        error,
        per_epsilon,
    })
}

/// Transition probability of a detector with gap `Ωσ` at height `z/σ`
/// (`z = ∞` for no mirror), unit coupling.
pub fn oracle_p<T: Real>(
    gap: T,
    z: T,
    settings: &QuadratureSettings<T>,
) -> Result<OracleEstimate<T>> {
    if !(gap >= T::zero()) || !(z > T::zero()) {
        return Err(invalid("oracle_p", "needs gap >= 0 and z > 0"));
    }
    extrapolated(
        Amplitude::Correlation,
        &PairKernel::single(gap, z),
        settings,
    )
}

/// `C_{ab}` at unit coupling. With `a == b` this reproduces `oracle_p`.
pub fn oracle_c<T: Real>(
    a: &DetectorSpec<T>,
    b: &DetectorSpec<T>,
    settings: &QuadratureSettings<T>,
) -> Result<OracleEstimate<T>> {
    extrapolated(Amplitude::Correlation, &PairKernel::new(a, b), settings)
}

/// `X_{ab}` at unit coupling.
pub fn oracle_x<T: Real>(
    a: &DetectorSpec<T>,
    b: &DetectorSpec<T>,
    settings: &QuadratureSettings<T>,
) -> Result<OracleEstimate<T>> {
    if pair_distances(a, b).is_err() {
        return Err(invalid("oracle_x", "detectors must not coincide"));
    }
    extrapolated(Amplitude::TimeOrdered, &PairKernel::new(a, b), settings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Label;

    #[test]
    fn settings_validation() {
        let mut s = QuadratureSettings::<f64>::default();
        assert!(s.validate().is_ok());
        s.epsilon_schedule = vec![0.1, 0.05];
        assert!(s.validate().is_err());
        s.epsilon_schedule = vec![0.1, 0.05, 0.02];
        s.extrapolation_order = 2;
        assert!(s.validate().is_err());
        s.epsilon_schedule = vec![0.1, 0.05, 0.025];
        assert!(s.validate().is_ok());
        s.tau_window = 6.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn wightman_free_limit_and_spacelike_value() {
        let w = wightman(0.3, 1.0, f64::INFINITY, 1e-2);
        let single =
            -(Complex::new(0.3, -1e-2).powi(2) - 1.0).inv() / (4.0 * std::f64::consts::PI.powi(2));
        assert!((w - single).norm() < 1e-16);

        let w = wightman(0.0, 1.0, 3.0, 1e-2);
        let expect = (1.0 - 1.0 / 9.0) / (4.0 * std::f64::consts::PI.powi(2));
        assert!((w.re - expect).abs() < 1e-5);
        assert!(w.im.abs() < 1e-16);
    }

    #[test]
    fn wightman_time_reversal_conjugates() {
        for &dt in &[0.2, 0.9, 1.7, 3.1] {
            let a = wightman(dt, 1.0, 2.5, 1e-2);
            let b = wightman(-dt, 1.0, 2.5, 1e-2);
            assert!((a - b.conj()).norm() < 1e-15 * a.norm());
        }
    }

    #[test]
    fn neville_recovers_polynomial() {
        let eps = [0.4, 0.2, 0.1, 0.05];
        let v: Vec<Complex<f64>> = eps
            .iter()
            .map(|&e| Complex::new(1.5 + 2.0 * e - 3.0 * e * e + 0.5 * e * e * e, -e))
            .collect();
        let d = extrapolate_to_zero(&eps, &v);
        assert!((d[3] - Complex::new(1.5, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn free_probability_at_zero_gap() {
        let s = QuadratureSettings::default();
        let p = oracle_p(0.0, f64::INFINITY, &s).unwrap();
        assert!((p.value.re - 1.0 / (4.0 * std::f64::consts::PI)).abs() < 1e-5);
        assert!(p.value.im.abs() < 1e-8);
    }

    #[test]
    fn self_correlation_is_probability() {
        let s = QuadratureSettings::default();
        let a = DetectorSpec::new(Label::A, 0.3, [0.0, 0.0, 1.0]).unwrap();
        let c = oracle_c(&a, &a, &s).unwrap();
        let p = oracle_p(0.3, 1.0, &s).unwrap();
        assert!((c.value - p.value).norm() < 1e-14);
    }

    #[test]
    fn time_ordered_amplitude_is_symmetric() {
        let s = QuadratureSettings::default();
        let a = DetectorSpec::new(Label::A, 0.1, [0.0, 0.0, 1.0]).unwrap();
        let b = DetectorSpec::new(Label::B, 0.6, [1.0, 0.0, 1.0]).unwrap();
        let ab = oracle_x(&a, &b, &s).unwrap();
        let ba = oracle_x(&b, &a, &s).unwrap();
        assert!((ab.value - ba.value).norm() < 1e-12);
    }

    #[test]
    fn free_probability_at_gap_two() {
        let s = QuadratureSettings::default();
        let p = oracle_p(2.0, f64::INFINITY, &s).unwrap();
        // erfc(2) to 17 digits
        let erfc2 = 0.004_677_734_981_047_266;
        let expect = ((-4.0f64).exp() - std::f64::consts::PI.sqrt() * 2.0 * erfc2)
            / (4.0 * std::f64::consts::PI);
        assert!((p.value.re - expect).abs() < 1e-5);
        assert!((p.value.re - expect).abs() < 1e-6 * expect);
    }

    #[test]
    fn probability_matches_closed_form() {
        let s = QuadratureSettings::default();
        let p = oracle_p(0.1, 1.0, &s).unwrap();
        let cf = crate::closed_form::transition_probability_raw(0.1f64, 1.0).unwrap();
        assert!((p.value.re - cf).abs() < 1e-4 * cf);
    }

    fn parallel_pair(ga: f64, gb: f64) -> (DetectorSpec<f64>, DetectorSpec<f64>) {
        (
            DetectorSpec::new(Label::A, ga, [0.0, 0.0, 1.0]).unwrap(),
            DetectorSpec::new(Label::B, gb, [1.0, 0.0, 1.0]).unwrap(),
        )
    }

    #[test]
    fn correlation_with_equal_gaps_is_real() {
        let s = QuadratureSettings::default();
        let (a, b) = parallel_pair(0.1, 0.1);
        let c = oracle_c(&a, &b, &s).unwrap();
        assert!(c.value.im.abs() <= c.error + 1e-12, "{}", c.value);

        let cf = crate::closed_form::pair_amplitudes(&a, &b).unwrap();
        assert!((c.value - cf.c).norm() < 1e-3 * cf.c.norm());
    }

    #[test]
    fn time_ordered_matches_closed_form() {
        let s = QuadratureSettings::default();
        let (a, b) = parallel_pair(0.1, 0.3);
        let x = oracle_x(&a, &b, &s).unwrap();
        let cf = crate::closed_form::pair_amplitudes(&a, &b).unwrap();
        assert!(
            (x.value - cf.x).norm() < 1e-3 * cf.x.norm(),
            "{} vs {}",
            x.value,
            cf.x
        );
    }

    #[test]
    fn time_ordered_envelope_for_large_gap_sum() {
        let s = QuadratureSettings::default();
        let (a, b) = parallel_pair(3.5, 4.5);
        let x = oracle_x(&a, &b, &s).unwrap();
        // |g| ≲ 1/d at d = 1, doubled for the image term
        let bound = (-16.0f64).exp() / (4.0 * std::f64::consts::PI.sqrt()) * 2.0 * 1.0;
        assert!(x.value.norm() <= bound, "{} > {bound:e}", x.value.norm());
    }

    #[test]
    fn halving_the_schedule_barely_moves_the_estimate() {
        let s = QuadratureSettings::default();
        let h = s.halved();
        let (a, b) = parallel_pair(0.1, 0.3);
        for (x, y) in [
            (
                oracle_p(0.1, 1.0, &s).unwrap(),
                oracle_p(0.1, 1.0, &h).unwrap(),
            ),
            (oracle_c(&a, &b, &s).unwrap(), oracle_c(&a, &b, &h).unwrap()),
            (oracle_x(&a, &b, &s).unwrap(), oracle_x(&a, &b, &h).unwrap()),
        ] {
            assert!((x.value - y.value).norm() < 1e-5);
        }
    }

    #[test]
    fn coincident_detectors_rejected_for_time_ordering() {
        let s = QuadratureSettings::default();
        let (a, _) = parallel_pair(0.1, 0.1);
        assert!(oracle_x(&a, &a, &s).is_err());
        assert!(oracle_p(0.1, 0.0, &s).is_err());
    }

    #[test]
    fn reduction_matches_direct_double_integral() {
        let mut s = QuadratureSettings::default();
        s.control.abs_tol = 1e-11;
        s.control.rel_tol = 1e-10;
        let smoke = [
            (0.0, 0.0, [1.0, 0.0, 1.0], 1.0),
            (0.1, 0.4, [1.0, 0.0, 1.0], 1.0),
            (1.0, 1.3, [0.5, 0.0, 0.5], 0.5),
            (0.1, 0.4, [0.0, 0.0, 3.0], 2.0),
            (2.0, 2.3, [2.0, 0.0, 2.0], 2.0),
        ];
        for (ga, gb, pb, za) in smoke {
            let a = DetectorSpec::new(Label::A, ga, [0.0, 0.0, za]).unwrap();
            let b = DetectorSpec::new(Label::B, gb, pb).unwrap();
            let k = PairKernel::new(&a, &b);
            for kind in [Amplitude::Correlation, Amplitude::TimeOrdered] {
                let (r, re) = reduced_integral(kind, &k, 0.2, &s).unwrap();
                let (d, de) = direct_integral(kind, &k, 0.2, &s).unwrap();
                assert!(
                    (r - d).norm() <= 10.0 * (re + de) + 1e-9,
                    "{kind:?}: {r} vs {d}"
                );
            }
        }
    }
}
