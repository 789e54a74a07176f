use num_complex::{Complex, Complex64 as C};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use strata::fields::{Incident, Layer};
use strata::geometry::{check_rotation, Placement, Shape};
use strata::harness::checks::{describe_incident, parse_incident, random_rotation};
use strata::harness::{farfield_distance, scene_hash, DirectionGrid, FarFieldPattern, PatternMeta, SceneFile};
use strata::media::{derive_wavenumbers, Medium, MediumParams, Partition, Scene, WaveNumbers};
use strata::vec3::{self, V3};

fn params(omega: f64, e0: f64, m0: f64, e1: f64, m1: f64, s1: f64) -> MediumParams<f64> {
    MediumParams {
        omega,
        outer: Medium { epsilon: e0, mu: m0, sigma: 0.0 },
        inner: Medium { epsilon: e1, mu: m1, sigma: s1 },
    }
}

fn unit() -> impl Strategy<Value = V3<f64>> {
    (-1.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(z, p)| {
        let r = (1.0 - z * z).sqrt();
        [r * p.cos(), r * p.sin(), z]
    })
}

fn curl(f: impl Fn(V3<f64>) -> [C; 3], x: V3<f64>) -> [C; 3] {
    let h = 1e-5;
    let d = |i: usize, j: usize| {
        let (mut a, mut b) = (x, x);
        a[j] += h;
        b[j] -= h;
        (f(a)[i] - f(b)[i]) / (2.0 * h)
    };
    [d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derived_coefficients_satisfy_product_identity(
        omega in 0.1..10.0f64, e0 in 0.5..4.0f64, m0 in 0.5..4.0f64,
        e1 in 0.0..8.0f64, m1 in 0.5..4.0f64, s1 in 0.0..5.0f64,
    ) {
        prop_assume!(e1 > 1e-3 || s1 > 1e-3);
        let w = derive_wavenumbers(&params(omega, e0, m0, e1, m1, s1)).unwrap();
        let target = C::new(w.k0, 0.0) / w.k1;
        prop_assert!((w.lambda_e * w.lambda_h - target).norm() <= 1e-12 * target.norm());
        prop_assert!(w.k1.re > 0.0 && w.k1.im >= 0.0);
        prop_assert_eq!(w.k1.im > 0.0, s1 > 0.0);
    }

    #[test]
    fn single_precision_derivation_is_consistent(
        omega in 0.5..4.0f32, e1 in 0.5..4.0f32, s1 in 0.0..3.0f32,
    ) {
        let p = MediumParams {
            omega,
            outer: Medium { epsilon: 1.0f32, mu: 1.0, sigma: 0.0 },
            inner: Medium { epsilon: e1, mu: 1.0, sigma: s1 },
        };
        let w = derive_wavenumbers(&p).unwrap();
        let target = Complex::new(w.k0, 0.0) / w.k1;
        prop_assert!((w.lambda_e * w.lambda_h - target).norm() <= 1e-5 * target.norm());
    }

    #[test]
    fn wavenumbers_scale_with_frequency(
        omega in 0.2..5.0f64, t in 0.2..5.0f64, e1 in 0.5..4.0f64, loss in 0.0..3.0f64,
    ) {
        // Fixed sigma/omega keeps the complex permittivity fixed.
        let a = derive_wavenumbers(&params(omega, 1.0, 1.0, e1, 1.0, loss * omega)).unwrap();
        let b = derive_wavenumbers(&params(t * omega, 1.0, 1.0, e1, 1.0, loss * t * omega)).unwrap();
        prop_assert!((b.k0 - t * a.k0).abs() <= 1e-12 * b.k0);
        prop_assert!((b.k1 - a.k1 * t).norm() <= 1e-12 * b.k1.norm());
        prop_assert!((b.lambda_e - a.lambda_e).norm() <= 1e-12);
        prop_assert!((b.lambda_h - a.lambda_h).norm() <= 1e-12);
    }

    #[test]
    fn mismatched_direct_coefficients_are_rejected(k1 in 1.1..4.0f64, skew in 1e-6..0.5f64) {
        let le = C::new(0.5, 0.0);
        let lh = C::new(1.0 / (k1 * 0.5), 0.0) * (1.0 + skew);
        prop_assert!(WaveNumbers::direct(1.0, C::new(k1, 0.0), le, lh).is_err());
        prop_assert!(WaveNumbers::direct(1.0, C::new(k1, 0.0), le, lh / (1.0 + skew)).is_ok());
    }

    #[test]
    fn random_rotations_are_proper(seed in any::<u64>()) {
        let q = random_rotation(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(check_rotation(&q).is_ok());
    }

    #[test]
    fn incident_fields_satisfy_faraday(d in unit(), p in unit(), x in unit(), r in 2.0..6.0f64, inner in any::<bool>()) {
        let media = WaveNumbers::direct(1.0, C::new(2.0, 0.3), C::new(0.5, 0.0), C::new(1.0, 0.0) / (C::new(2.0, 0.3) * 0.5)).unwrap();
        let x = vec3::scale(r, x);
        let incs = [
            Incident::plane_wave(d, vec3::cross(d, p)).ok(),
            Incident::dipole([0.1, -0.2, 0.3], p, if inner { Layer::Inner } else { Layer::Outer }).ok(),
        ];
        for inc in incs.into_iter().flatten() {
            let k = inc.wavenumber(&media);
            let f = inc.eval(&media, x);
            let c = curl(|y| inc.eval(&media, y).e, x);
            let scale = vec3::cnorm(f.h).max(1e-3) * k.norm();
            for i in 0..3 {
                prop_assert!((c[i] - C::new(0.0, 1.0) * k * f.h[i]).norm() <= 1e-6 * scale, "{:?}", inc);
            }
        }
    }

    #[test]
    fn incident_specs_round_trip(d in unit(), p in unit(), z in unit()) {
        let plane = Incident::plane_wave(d, vec3::cross(d, p));
        prop_assume!(plane.is_ok());
        for inc in [plane.unwrap(), Incident::dipole(vec3::scale(3.0, z), p, Layer::Inner).unwrap()] {
            prop_assert_eq!(parse_incident(&describe_incident(&inc)).unwrap(), inc);
        }
    }

    #[test]
    fn scene_files_round_trip(
        r0 in 1.6..3.0f64, a in 0.5..1.0f64, b in 0.5..1.0f64, c in 0.5..1.0f64,
        k1 in 0.5..3.0f64, cap in 0.0..std::f64::consts::PI, lambda in 0.1..5.0f64, order in 8usize..32,
    ) {
        let scene = Scene {
            interface: Placement::new(Shape::Sphere { radius: r0 }, [0.0; 3]),
            obstacle: Placement::new(Shape::Ellipsoid { semi_axes: [a, b, c] }, [0.1, 0.0, -0.1]),
            media: WaveNumbers::direct(1.0, C::new(k1, 0.0), C::new(1.0, 0.0), C::new(1.0 / k1, 0.0)).unwrap(),
            partition: Partition::cap(cap, lambda),
            order,
        };
        let text = SceneFile::from_scene(&scene).to_toml();
        let back = SceneFile::parse(&text).unwrap().to_scene().unwrap();
        prop_assert_eq!(&back, &scene);
        prop_assert_eq!(scene_hash(&back), scene_hash(&scene));
        prop_assert_ne!(scene_hash(&scene.clone().with_order(order + 1)), scene_hash(&scene));
    }

    #[test]
    fn pattern_csv_round_trip_is_exact(n in 2usize..6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let meta = PatternMeta { scene_hash: "0123456789abcdef".into(), incidence: "plane:0,0,1:1,0,0".into(), order: 12, source: "test".into() };
        let p = FarFieldPattern::sample(DirectionGrid::new(n).unwrap(), meta, |_| {
            use rand::Rng;
            let mut v = [C::new(0.0, 0.0); 3];
            for z in &mut v {
                *z = C::new(rng.gen::<f64>() - 0.5, 1e-300 * rng.gen::<f64>());
            }
            Ok(v)
        }).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let q = FarFieldPattern::read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(&q, &p);
        prop_assert_eq!(farfield_distance(&p, &q).unwrap(), 0.0);
    }
}
