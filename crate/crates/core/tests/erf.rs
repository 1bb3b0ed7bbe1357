use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tricoh::special_fn::{erf_complex, erfc_real};

const FIXTURE: &str = include_str!("fixtures/erf_reference.csv");

fn reference_points() -> Vec<(Complex64, Complex64)> {
    FIXTURE
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.trim().parse().unwrap()).collect();
            (Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]))
        })
        .collect()
}

fn random_disc(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    let t = rng.gen::<f64>() * std::f64::consts::TAU;
    Complex64::from_polar(r, t)
}

#[test]
fn matches_high_precision_reference() {
    let points = reference_points();
    assert_eq!(points.len(), 200);
    let mut worst = 0.0f64;
    for (z, expect) in points {
        let got = erf_complex(z).unwrap();
        let err = if expect.norm() == 0.0 {
            got.norm()
        } else {
            (got - expect).norm() / expect.norm()
        };
        assert!(
            err <= 1e-12,
            "erf({z}) = {got}, reference {expect}, rel {err:e}"
        );
        worst = worst.max(err);
    }
    println!("worst relative error over fixture: {worst:e}");
}

#[test]
fn odd_symmetry_on_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let z = random_disc(&mut rng, 6.0);
        let s = erf_complex(z).unwrap() + erf_complex(-z).unwrap();
        assert!(s.norm() < 1e-14, "{z}: {s}");
    }
}

#[test]
fn conjugation_symmetry_on_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let z = random_disc(&mut rng, 6.0);
        let a = erf_complex(z).unwrap();
        let b = erf_complex(z.conj()).unwrap();
        assert!((a - b.conj()).norm() <= 1e-15 * a.norm().max(1.0), "{z}");
    }
}

#[test]
fn real_axis_is_real_and_complements() {
    for i in 0..=1000 {
        let x = i as f64 * 0.01;
        let v = erf_complex(Complex64::new(x, 0.0)).unwrap();
        assert!(v.im.abs() < 1e-15, "{x}");
        assert!((v.re + erfc_real(x) - 1.0).abs() < 1e-12, "{x}");
    }
}

#[test]
fn derivative_matches_gaussian() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h = 1e-5;
    for _ in 0..100 {
        let z = random_disc(&mut rng, 3.0);
        let fd = (erf_complex(z + h).unwrap() - erf_complex(z - h).unwrap()) / (2.0 * h);
        let exact = (-z * z).exp() * std::f64::consts::FRAC_2_SQRT_PI;
        // O(h²) truncation plus rounding of order ε|erf|/h
        let tol = 1e-8 * exact.norm().max(1.0) + 1e-16 * erf_complex(z).unwrap().norm() / h;
        assert!((fd - exact).norm() < tol, "{z}: {fd} vs {exact}");
    }
}
