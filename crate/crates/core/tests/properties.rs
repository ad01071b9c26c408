use nalgebra::{Rotation3, Unit};
use proptest::prelude::*;

use softdress::kinematics::{Particle, Vec3};
use softdress::soft_integrals::{pair_coefficient, soft_breakdown, QuadratureSpec, Vertex};

fn velocity(max: f64) -> impl Strategy<Value = Vec3> {
    (0.0..max, 0.0..std::f64::consts::PI, 0.0..2.0 * std::f64::consts::PI)
        .prop_map(|(s, th, ph)| Vec3::new(s * th.sin() * ph.cos(), s * th.sin() * ph.sin(), s * th.cos()))
}

fn axis() -> impl Strategy<Value = Unit<Vec3>> {
    velocity(1.0).prop_filter_map("nonzero axis", |a| (a.norm() > 1e-3).then(|| Unit::new_normalize(a)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quadrature_converges_on_doubling(v in velocity(0.9), w in velocity(0.9)) {
        let q = QuadratureSpec::default();
        let (a, b) = (Vertex::eikonal(v).unwrap(), Vertex::dressing(w).unwrap());
        let coarse = pair_coefficient(&a, &b, &q).unwrap();
        let fine = pair_coefficient(&a, &b, &q.doubled()).unwrap();
        prop_assert!((coarse - fine).abs() < 1e-8, "{coarse} vs {fine}");
    }

    #[test]
    fn breakdown_is_rotation_invariant(v in velocity(0.9), w in velocity(0.9), ax in axis(), angle in 0.0..std::f64::consts::TAU) {
        let rot = Rotation3::from_axis_angle(&ax, angle);
        let q = QuadratureSpec::default();
        let p1 = Particle::new(1.0, 1, v).unwrap();
        let p2 = Particle::new(1.0, -1, w).unwrap();
        let r1 = Particle::new(1.0, 1, rot * v).unwrap();
        let r2 = Particle::new(1.0, -1, rot * w).unwrap();
        let a = soft_breakdown(&p1, &p2, &p1.velocity, &p2.velocity, &q).unwrap();
        let b = soft_breakdown(&r1, &r2, &r1.velocity, &r2.velocity, &q).unwrap();
        for (x, y) in [(a.c_d, b.c_d), (a.c_c(), b.c_c()), (a.c_g_1, b.c_g_1), (a.c_f, b.c_f)] {
            prop_assert!((x - y).abs() < 1e-10, "{x} vs {y}");
        }
    }
}
