use approx::assert_relative_eq;
use geoineq::geometry::{cayley_menger_determinant, Tetrahedron, Triangle};
use geoineq::reproduction::coordinate_volume;
use geoineq::search::sample_tetrahedron;
use nalgebra::Matrix5;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

/// Inradius from the exact rational value of `16 area^2`, rounded once.
fn exact_inradius(a: f64, b: f64, c: f64) -> f64 {
    let (a, b, c) = (exact(a), exact(b), exact(c));
    let sixteen_area_sq = (&a + &b + &c) * (-&a + &b + &c) * (&a - &b + &c) * (&a + &b - &c);
    let perimeter = (&a + &b + &c).to_f64().unwrap();
    let area = sixteen_area_sq.to_f64().unwrap().sqrt() / 4.0;
    area / (perimeter / 2.0)
}

#[test]
fn heron_matches_exact_oracle_on_needles() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for aspect_exp in 0..=6 {
        let aspect = 10f64.powi(aspect_exp);
        for _ in 0..200 {
            let long = rng.random_range(0.5..2.0);
            let other = long * rng.random_range(0.6..1.0);
            // third side between |long - other| and long + other, pushed
            // toward either degenerate end by `aspect`
            let lo = long - other;
            let hi = long + other;
            let t = rng.random_range(0.0..1.0) / aspect;
            let third = if rng.random::<bool>() {
                lo + (hi - lo) * t
            } else {
                hi - (hi - lo) * t
            };
            let Ok(tri) = Triangle::new(long, other, third) else {
                continue;
            };
            let oracle = exact_inradius(long, other, third);
            assert_relative_eq!(tri.inradius(), oracle, max_relative = 1e-8);
        }
    }
}

#[test]
fn heron_thin_isoceles() {
    for k in 1..=6 {
        let eps = 10f64.powi(-k);
        let t = Triangle::new(1.0, 1.0, eps).unwrap();
        let r = t.inradius();
        assert!(r.is_finite() && r > 0.0);
        assert_relative_eq!(r, exact_inradius(1.0, 1.0, eps), max_relative = 1e-12);
    }
}

fn bordered_cayley_menger(e: &[f64; 6]) -> f64 {
    // vertices A=1, B=2, C=3, D=4: d12=a1, d23=a2, d13=a3, d14=a4, d34=a5, d24=a6
    let [d12, d23, d13, d14, d34, d24] = e.map(|x| x * x);
    Matrix5::new(
        0.0, 1.0, 1.0, 1.0, 1.0, //
        1.0, 0.0, d12, d13, d14, //
        1.0, d12, 0.0, d23, d24, //
        1.0, d13, d23, 0.0, d34, //
        1.0, d14, d24, d34, 0.0,
    )
    .determinant()
}

#[test]
fn gram_form_equals_bordered_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let s = sample_tetrahedron(&mut rng).unwrap();
        let e = s.tetrahedron.edges();
        let gram = cayley_menger_determinant(&e);
        let bordered = bordered_cayley_menger(&e);
        // both are 288 V^2; the bordered form loses more digits on thin shapes
        assert_relative_eq!(gram, bordered, max_relative = 1e-7, epsilon = 1e-12);
    }
    let regular = [1.0; 6];
    assert_relative_eq!(bordered_cayley_menger(&regular), 4.0, max_relative = 1e-14);
    assert_relative_eq!(
        cayley_menger_determinant(&regular),
        4.0,
        max_relative = 1e-14
    );
}

#[test]
fn cayley_menger_volume_matches_coordinates() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut well_conditioned = 0;
    for _ in 0..2000 {
        let s = sample_tetrahedron(&mut rng).unwrap();
        let oracle = coordinate_volume(&s.vertices);
        let err = (s.tetrahedron.volume() - oracle).abs() / oracle;
        let kappa = s.tetrahedron.conditioning();
        if kappa <= 1e3 {
            well_conditioned += 1;
            assert!(err <= 1e-10, "err {err:e} at conditioning {kappa:e}");
        } else {
            assert!(
                err <= 1e3 * f64::EPSILON * kappa,
                "err {err:e} at conditioning {kappa:e}"
            );
        }
    }
    assert!(well_conditioned > 1900);
}

#[test]
fn homogeneity_of_derived_quantities() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let tri = Triangle::new(0.7, 0.9, 1.3).unwrap();
    for _ in 0..200 {
        let tet = sample_tetrahedron(&mut rng).unwrap().tetrahedron;
        for lambda in [0.5, 2.0, 10.0] {
            let t2 = tri.scaled(lambda).unwrap();
            assert_relative_eq!(
                t2.semiperimeter(),
                lambda * tri.semiperimeter(),
                max_relative = 1e-12
            );
            assert_relative_eq!(t2.inradius(), lambda * tri.inradius(), max_relative = 1e-12);
            assert_relative_eq!(
                t2.area(),
                lambda * lambda * tri.area(),
                max_relative = 1e-12
            );

            let s = tet.scaled(lambda).unwrap();
            if lambda != 10.0 {
                // power-of-two scaling is exact in every operation
                assert_eq!(s.volume(), lambda.powi(3) * tet.volume());
                assert_eq!(s.inradius(), lambda * tet.inradius());
            } else if tet.conditioning() <= 10.0 {
                assert_relative_eq!(s.volume(), 1e3 * tet.volume(), max_relative = 1e-12);
                assert_relative_eq!(s.inradius(), 10.0 * tet.inradius(), max_relative = 1e-12);
            }
            assert_relative_eq!(
                s.face_inradius_sum(),
                lambda * tet.face_inradius_sum(),
                max_relative = 1e-12
            );
            assert_relative_eq!(
                s.surface_area(),
                lambda * lambda * tet.surface_area(),
                max_relative = 1e-12
            );
        }
    }
}

#[test]
fn insphere_is_smaller_than_every_face_incircle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100_000 {
        let t = sample_tetrahedron(&mut rng).unwrap().tetrahedron;
        let rho = t.inradius();
        let min_face = t
            .faces()
            .iter()
            .map(Triangle::inradius)
            .fold(f64::MAX, f64::min);
        assert!(rho < min_face, "rho {rho} >= min face inradius {min_face}");
        assert!(t.face_inradius_sum() >= 4.0 * rho);
    }
}

#[test]
fn lattice_tetrahedron_volume() {
    let v = [
        [0.0, 0.0, 0.0],
        [3.0, 0.0, 0.0],
        [1.0, 2.0, 0.0],
        [1.0, 1.0, 2.0],
    ];
    let t = Tetrahedron::from_vertices(&v).unwrap();
    assert_relative_eq!(t.volume(), coordinate_volume(&v), max_relative = 1e-14);
    assert_relative_eq!(t.volume(), 2.0, max_relative = 1e-14);
}
