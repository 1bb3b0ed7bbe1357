//! Globally adaptive 21-point Gauss-Kronrod quadrature for complex-valued
//! integrands on a finite interval with caller-supplied breakpoints.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex;

use crate::scalar::Real;

// 21-point Kronrod abscissae (positive half, descending) and weights, with
// the embedded 10-point Gauss weights.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureControl<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_panels: usize,
}

impl<T: Real> Default for QuadratureControl<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::lit(1e-13),
            rel_tol: T::lit(1e-12),
            max_panels: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: Complex<T>,
    pub error: T,
    pub evaluations: usize,
    pub converged: bool,
}

struct Panel<T> {
    a: T,
    b: T,
    value: Complex<T>,
    error: T,
}

impl<T: Real> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl<T: Real> Eq for Panel<T> {}

impl<T: Real> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Real> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

/// One 21-point Kronrod panel; error is `|K21 - G10|`.
fn kronrod<T, F>(f: &mut F, a: T, b: T) -> (Complex<T>, T)
where
    T: Real,
    F: FnMut(T) -> Complex<T>,
{
    let half = T::lit(0.5);
    let center = (a + b) * half;
    let half_len = (b - a) * half;
    let fc = f(center);
    let mut kron = fc * T::lit(WGK[10]);
    let mut gauss = Complex::new(T::zero(), T::zero());
    for j in 0..10 {
        let x = half_len * T::lit(XGK[j]);
        let sum = f(center - x) + f(center + x);
        kron += sum * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss += sum * T::lit(WG[j / 2]);
        }
    }
    let value = kron * half_len;
    let error = ((kron - gauss) * half_len).norm();
    (value, error)
}

/// Integrates `f` over `[a, b]`, starting from panels split at `breakpoints`
/// (points outside `(a, b)` are ignored) and bisecting the worst panel until
/// the summed error estimate meets `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<T, F>(
    mut f: F,
    a: T,
    b: T,
    breakpoints: &[T],
    control: &QuadratureControl<T>,
) -> Integral<T>
where
    T: Real,
    F: FnMut(T) -> Complex<T>,
{
    let mut cuts: Vec<T> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b && x.is_finite())
        .collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();

    let mut heap = BinaryHeap::new();
    let mut total = Complex::new(T::zero(), T::zero());
    let mut total_err = T::zero();
    let mut evaluations = 0;
    for w in cuts.windows(2) {
        let (value, error) = kronrod(&mut f, w[0], w[1]);
        evaluations += 21;
        total += value;
        total_err += error;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }

    let mut converged = false;
    while heap.len() < control.max_panels {
        if total_err <= control.abs_tol.max(control.rel_tol * total.norm()) {
            converged = true;
            break;
        }
        let worst = heap.pop().expect("at least one panel");
        let mid = (worst.a + worst.b) * T::lit(0.5);
        if !(mid > worst.a && mid < worst.b) {
            // panel at the resolution limit
            heap.push(worst);
            break;
        }
        let (v1, e1) = kronrod(&mut f, worst.a, mid);
        let (v2, e2) = kronrod(&mut f, mid, worst.b);
        evaluations += 42;
        total = total - worst.value + v1 + v2;
        total_err = total_err - worst.error + e1 + e2;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    if !converged {
        converged = total_err <= control.abs_tol.max(control.rel_tol * total.norm());
    }

    // re-sum to shed drift from the running updates
    let (value, error) = heap.iter().fold(
        (Complex::new(T::zero(), T::zero()), T::zero()),
        |(v, e), p| (v + p.value, e + p.error),
    );
    Integral {
        value,
        error,
        evaluations,
        converged,
    }
}
