use std::f64::consts::PI;

use proptest::prelude::*;

use conjugate_lab::deviation_harness::matrix_mean;
use conjugate_lab::fourier_engine::{conj_partial_sum, FourierData};
use conjugate_lab::function_space::{NormSpace, PeriodicFunction};
use conjugate_lab::kernels::{conj_dirichlet, conj_dirichlet_gen, dirichlet_gen, KernelPoint};
use conjugate_lab::matrix_lab::{a_nr, SummabilityMatrix};

fn valid(k: u64, r: i64, t: f64) -> bool {
    KernelPoint::new(k, r, t).is_ok() && KernelPoint::new(k, r, -t).is_ok()
}

proptest! {
    #[test]
    fn cotangent_split(k in 0u64..500, t in -PI..PI) {
        prop_assume!(valid(k, 1, t));
        let sum = conj_dirichlet(k, 1, t).unwrap() + conj_dirichlet_gen(k, 1, t).unwrap();
        let cot = 0.5 / (0.5 * t).tan();
        prop_assert!((sum - cot).abs() <= 1e-10 * (1.0 + cot.abs()));
    }

    #[test]
    fn kernel_parity(k in 0u64..500, r in 1i64..6, t in -PI..PI) {
        prop_assume!(valid(k, r, t));
        let odd = conj_dirichlet(k, 1, -t).unwrap() + conj_dirichlet(k, 1, t).unwrap();
        prop_assert!(odd.abs() <= 1e-9 * (1.0 + conj_dirichlet(k, 1, t).unwrap().abs()));
        let even = dirichlet_gen(k, r, -t).unwrap() - dirichlet_gen(k, r, t).unwrap();
        prop_assert!(even.abs() <= 1e-9 * (1.0 + dirichlet_gen(k, r, t).unwrap().abs()));
    }

    #[test]
    fn norm_homogeneity(c in -5.0f64..5.0, nu in 1usize..20, p in 1.0f64..4.0) {
        let f = PeriodicFunction::cosine(nu);
        for space in [NormSpace::sup(256).unwrap(), NormSpace::lp(p, 256).unwrap()] {
            let lhs = space.norm(&f.scaled(c)).unwrap();
            let rhs = c.abs() * space.norm(&f).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
        }
    }

    #[test]
    fn cesaro_mean_is_average_of_partial_sums(
        a in prop::collection::vec(-1.0f64..1.0, 1..12),
        b in prop::collection::vec(-1.0f64..1.0, 1..12),
        n in 0usize..30,
        x in -PI..PI,
    ) {
        let fd = FourierData::from_parts(a, b);
        let c = SummabilityMatrix::cesaro();
        let direct: f64 = (0..=n).map(|k| conj_partial_sum(&fd, k, x)).sum::<f64>() / (n + 1) as f64;
        prop_assert!((matrix_mean(&c, &fd, n, x, true) - direct).abs() < 1e-12);
    }

    #[test]
    fn a_nr_triangle_bounds(q in 0.1f64..4.0, n in 0usize..200, r in 1usize..8) {
        let e = SummabilityMatrix::euler(q).unwrap();
        let v = a_nr(&e, n, r);
        prop_assert!(v <= 2.0 + 1e-12);
        let head: f64 = (0..r).map(|k| e.entry(n, k)).sum();
        prop_assert!(v >= head - 1e-12);
    }
}
