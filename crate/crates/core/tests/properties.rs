use num_complex::Complex64;
use proptest::prelude::*;
use proptest::sample::Index;

use reduced_topos::fixtures::{random_density, QubitFixture, Spin1Fixture};
use reduced_topos::interval::{j_prob, DownSet, StepFn};
use reduced_topos::measure::born_j_for_projection;
use reduced_topos::product::{enumerate_bold_sieves, is_in_omega_jbold, lt_jbold, ProductPoint};
use reduced_topos::semantics::daseinize;
use reduced_topos::sheaf::{enumerate_sieves, lt_topology_j, Sieve};
use reduced_topos::{DensityMatrix, Projection, DEFAULT_MAX_ENUM};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Down-sets of `[0,1]` with endpoints on a grid of sixteenths.
fn downset() -> impl Strategy<Value = DownSet> {
    (0u8..3, 0u32..=16).prop_map(|(k, n)| {
        let t = f64::from(n) / 16.0;
        match k {
            0 => DownSet::Empty,
            1 => DownSet::closed(t).unwrap(),
            _ => DownSet::open(t).unwrap(),
        }
    })
}

fn unit_vector(dim: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim).prop_filter_map("nonzero", |v| {
        let v: Vec<Complex64> = v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        (n > 1e-3).then(|| v.into_iter().map(|z| z / n).collect())
    })
}

proptest! {
    #[test]
    fn downsets_form_a_heyting_chain(a in downset(), b in downset(), c in downset(), r16 in 0u32..=16) {
        let r = f64::from(r16) / 16.0;
        prop_assert_eq!(a.meet(&b), b.meet(&a));
        prop_assert_eq!(a.join(&a.meet(&b)), a);
        prop_assert!(a.leq(&b) || b.leq(&a));
        let (a, b, c) = (a.restrict(r), b.restrict(r), c.restrict(r));
        prop_assert_eq!(c.meet(&a).leq(&b), c.leq(&a.implies(&b, r)));
    }

    #[test]
    fn j_prob_is_a_closure(a in downset(), b in downset()) {
        prop_assert!(a.leq(&j_prob(&a)));
        prop_assert_eq!(j_prob(&j_prob(&a)), j_prob(&a));
        prop_assert_eq!(j_prob(&a.meet(&b)), j_prob(&a).meet(&j_prob(&b)));
    }

    #[test]
    fn left_limit_regularization_is_idempotent(cuts in prop::collection::btree_set(1u32..16, 0..4),
                                                vals in prop::collection::vec(0u8..4, 9)) {
        let mut breaks = vec![0.0];
        breaks.extend(cuts.iter().map(|&k| f64::from(k) / 16.0));
        breaks.push(1.0);
        let n = breaks.len();
        let f = StepFn::new(breaks, vals[..n].to_vec(), vals[n..2 * n - 1].to_vec()).unwrap();
        let a = f.a_prob(&9);
        prop_assert!(a.is_left_regular(&9));
        prop_assert!(a.a_prob(&9).same_as(&a));
    }

    #[test]
    fn bold_closure_is_idempotent(level in 0u32..=4, pick in any::<Index>()) {
        let f = QubitFixture::new();
        let levels = [0.0, 0.25, 0.5, 0.75, 1.0];
        let pt = ProductPoint::new(f.vz, f64::from(level) / 4.0).unwrap();
        let all = enumerate_bold_sieves(&f.poset, pt, &levels, DEFAULT_MAX_ENUM).unwrap();
        let s = pick.get(&all);
        let c = lt_jbold(&f.poset, &f.flat, s);
        prop_assert!(s.leq(&c));
        prop_assert!(is_in_omega_jbold(&f.poset, &f.flat, &c));
        prop_assert_eq!(lt_jbold(&f.poset, &f.flat, &c), c);
    }

    #[test]
    fn sieve_implication_is_right_adjoint(i in any::<Index>(), k in any::<Index>(), m in any::<Index>()) {
        let f = Spin1Fixture::new();
        let all: Vec<Sieve> = enumerate_sieves(&f.poset, f.vx, DEFAULT_MAX_ENUM).unwrap();
        let (a, b, c) = (i.get(&all), k.get(&all), m.get(&all));
        let lhs = c.meet(a).unwrap().leq(b).unwrap();
        prop_assert_eq!(lhs, c.leq(&a.implies(b, &f.poset).unwrap()).unwrap());
        let j = |s: &Sieve| lt_topology_j(&f.poset, &f.flat, s);
        prop_assert_eq!(j(&j(a)), j(a));
    }

    #[test]
    fn daseinization_approximates_from_above(v in unit_vector(3)) {
        let f = Spin1Fixture::new();
        let e = Projection::onto_vector(&v).unwrap();
        for w in f.poset.ids() {
            let d = daseinize(&e, f.poset.context(w)).unwrap();
            prop_assert!(e.leq(&d).unwrap());
            prop_assert!(f.poset.context(w).mask_of(&d).is_some());
        }
    }

    #[test]
    fn sheaf_probability_bounds_born(v in unit_vector(3), seed in any::<u64>()) {
        let f = Spin1Fixture::new();
        let e = Projection::onto_vector(&v).unwrap();
        let rho: DensityMatrix = random_density(3, &mut ChaCha8Rng::seed_from_u64(seed));
        let b = born_j_for_projection(&e, &rho, &f.flat, &f.poset).unwrap();
        prop_assert!(b.value >= b.born - 1e-9);
        prop_assert!(b.value <= 1.0 + 1e-9);
    }
}
