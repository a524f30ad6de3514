use std::f64::consts::TAU;

use minsurf_core::algebra::{partial_fractions, poly_roots, Polynomial, RationalFunction};
use minsurf_core::equations::{full_residual, residual_real, ParameterVector};
use minsurf_core::forms::{residue_theorem_defect, MeromorphicForm};
use minsurf_core::gluing::{build_components, central_configuration, growth_vector, node_residue_mismatch};
use minsurf_core::hurwitz::{branching_profile, same_branching_values};
use minsurf_core::tower::{asymptotics, validate_schedule, Schedule};
use minsurf_core::C64;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn complex_in_disk(r: f64) -> impl Strategy<Value = C64> {
    (0.0..1.0f64, 0.0..TAU).prop_map(move |(s, a)| C64::from_polar(r * s.sqrt(), a))
}

fn polynomial(max_degree: usize) -> impl Strategy<Value = Polynomial> {
    (1..=max_degree).prop_flat_map(|d| {
        (prop::collection::vec(complex_in_disk(1.0), d), (0.2..1.0f64, 0.0..TAU))
            .prop_map(|(mut c, (r, a))| {
                c.push(C64::from_polar(r, a));
                Polynomial::new(c)
            })
    })
}

fn separated_points(n: usize, radius: f64, sep: f64) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(complex_in_disk(radius), n)
        .prop_filter("points too close", move |v| {
            v.iter().enumerate().all(|(i, a)| v[..i].iter().all(|b| (a - b).norm() > sep))
        })
}

fn rational(max_degree: usize) -> impl Strategy<Value = RationalFunction> {
    (1..=max_degree).prop_flat_map(move |d| {
        (separated_points(d, 2.0, 0.2), prop::collection::vec(complex_in_disk(1.0), 1..=max_degree)).prop_map(
            |(poles, num)| {
                RationalFunction::new(Polynomial::new(num), Polynomial::from_roots(&poles)).expect("nonzero denominator")
            },
        )
    })
}

/// Random real perturbation of the central point, of size at most `size`.
fn near_central(m: usize, size: f64) -> impl Strategy<Value = Vec<f64>> {
    let x0 = ParameterVector::central(m).unwrap().to_real();
    prop::collection::vec(-size..size, x0.len())
        .prop_map(move |d| x0.iter().zip(d).map(|(a, b)| a + b).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn roots_rebuild_the_polynomial(p in polynomial(12)) {
        let rs = poly_roots(&p, None).unwrap();
        prop_assert_eq!(rs.total_multiplicity(), p.degree());
        let rebuilt = Polynomial::from_roots(&rs.expanded());
        let monic = p.monic();
        for k in 0..=p.degree() {
            prop_assert!((rebuilt.coeff(k) - monic.coeff(k)).norm() < 1e-7);
        }
    }

    #[test]
    fn residues_sum_to_zero(f in rational(8)) {
        let w = MeromorphicForm::from_rational(f).unwrap();
        prop_assert!(residue_theorem_defect(&w) < 1e-10);
    }

    #[test]
    fn partial_fractions_recompose(f in rational(6), z in complex_in_disk(3.0)) {
        let e = partial_fractions(&f).unwrap();
        let near = e.residues().iter().map(|(p, _)| (z - p).norm()).fold(f64::INFINITY, f64::min);
        prop_assume!(near > 0.05);
        let (a, b) = (f.eval(z), e.to_rational().eval(z));
        prop_assert!((a - b).norm() <= 1e-9 * a.norm().max(1.0));
    }

    #[test]
    fn product_rule(f in rational(3), g in rational(3), z in complex_in_disk(3.0)) {
        let poles: Vec<C64> = [&f, &g]
            .iter()
            .flat_map(|r| partial_fractions(r).unwrap().residues().into_iter().map(|(p, _)| p))
            .collect();
        prop_assume!(poles.iter().all(|p| (z - p).norm() > 0.05));
        let lhs = f.mul(&g).unwrap().derivative().unwrap().eval(z);
        let rhs = f.derivative().unwrap().eval(z) * g.eval(z) + f.eval(z) * g.derivative().unwrap().eval(z);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(1.0));
    }

    #[test]
    fn branching_orders_add_up(p in polynomial(8)) {
        prop_assume!(p.degree() >= 2);
        let prof = branching_profile(&p).unwrap();
        prop_assert_eq!(prof.total_order(), p.degree() - 1);
    }

    #[test]
    fn same_values_is_symmetric(p in polynomial(5), q in polynomial(5)) {
        prop_assume!(p.degree() >= 2 && p.degree() == q.degree());
        prop_assert!(same_branching_values(&p, &p, 1e-9).unwrap());
        prop_assert_eq!(same_branching_values(&p, &q, 1e-3).unwrap(), same_branching_values(&q, &p, 1e-3).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn node_residues_match((m, x) in (2..7usize).prop_flat_map(|m| (Just(m), near_central(m, 0.05)))) {
        let cfg = ParameterVector::from_real(m, &x).unwrap().to_configuration().unwrap();
        let comps = build_components(&cfg).unwrap();
        prop_assert!(node_residue_mismatch(&cfg, &comps).unwrap() < 1e-10);
    }

    #[test]
    fn schedule_identity_chain(start in 3..8u64, gaps in prop::collection::vec(2..6u64, 1..12)) {
        let mut ms = vec![start];
        for g in gaps {
            ms.push(ms.last().unwrap() + g);
        }
        let s = Schedule::new(ms.clone()).unwrap();
        let r = validate_schedule(&s).unwrap();
        prop_assert!(r.lower_bound_holds);
        for (k, &m) in ms.iter().enumerate() {
            let (a, b) = (&r.states[k], &r.states[k + 1]);
            let n = a.n();
            let big = |v: u64| BigRational::from_integer(BigInt::from(v));
            prop_assert_eq!(&b.growths()[n - 1], &(-a.top() / big(m - 1)));
            prop_assert_eq!(&b.growths()[n], &(a.top() * big(m) / big(m - 1)));
            prop_assert_eq!(b.growths().iter().filter(|c| **c > BigRational::from_integer(0.into())).count(), 1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn residual_symmetries_hold(x in near_central(3, 0.02)) {
        let r = full_residual(&ParameterVector::from_real(3, &x).unwrap()).unwrap();
        prop_assert!(r.symmetry_defect() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn residual_is_smooth(x in near_central(3, 0.01), d in prop::collection::vec(-1.0..1.0f64, 17)) {
        let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assume!(norm > 0.1);
        let dir = |h: f64| -> Vec<f64> {
            let at = |s: f64| -> Vec<f64> {
                let y: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + s * b / norm).collect();
                residual_real(3, &y).unwrap()
            };
            at(h).iter().zip(at(-h)).map(|(a, b)| (a - b) / (2.0 * h)).collect()
        };
        let (a, b) = (dir(1e-5), dir(1e-6));
        let scale = a.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u - v).abs() <= 1e-3 * scale, "{} {}", u, v);
        }
    }
}

#[test]
fn growths_sum_to_zero_and_increase() {
    for m in 3..=12 {
        let g = growth_vector(&central_configuration(m).unwrap()).unwrap();
        assert!(g.iter().sum::<f64>().abs() < 1e-10, "{m}");
        assert!(g.windows(2).all(|w| w[0] < w[1]), "{m} {g:?}");
        assert_eq!(g.iter().filter(|&&c| c > 0.0).count(), 1);
    }
}

#[test]
fn curvature_certificates_are_unbounded() {
    for s in [Schedule::minimal(500), Schedule::geometric(2, 40).unwrap()] {
        let n = s.last_index();
        let a = asymptotics(&s, n).unwrap();
        for target in 1..=50 {
            assert!(a.certificate_exceeds(target as f64), "{target}");
        }
    }
}
