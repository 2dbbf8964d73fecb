use holonomy_core::berger::{check_bianchi, r_formal};
use holonomy_core::canonical::{build_canonical, CanonicalPair, PencilSpec};
use holonomy_core::exactla::{format_rational, parse_rational, rat, RatMatrix, Rational};
use holonomy_core::liealg::{centralizer_basis, is_g_skew, so_basis};
use holonomy_core::realize::{build_b, g_adjoint, metric_at, realize};
use num::Zero;
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=9).prop_map(|(p, q)| rat(p, q))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = RatMatrix> {
    proptest::collection::vec(small_rational(), rows * cols).prop_map(move |v| {
        let mut m = RatMatrix::zeros(rows, cols);
        for (k, x) in v.into_iter().enumerate() {
            m[(k / cols, k % cols)] = x;
        }
        m
    })
}

fn block_list() -> impl Strategy<Value = Vec<(usize, i64)>> {
    proptest::collection::vec((1usize..=3, prop_oneof![Just(1i64), Just(-1i64)]), 1..=3)
        .prop_filter("so(g) needs dimension at least 2", |b| b.iter().map(|(s, _)| s).sum::<usize>() >= 2)
}

fn pair(blocks: &[(usize, i64)]) -> CanonicalPair {
    build_canonical(&PencilSpec::nilpotent(blocks).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_plus_nullity(m in (1usize..5, 1usize..5).prop_flat_map(|(r, c)| matrix(r, c))) {
        let kernel = m.kernel_basis();
        prop_assert_eq!(m.rank() + kernel.len(), m.cols());
        for v in &kernel {
            prop_assert!(m.mul_vec(v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn rational_strings_round_trip(q in small_rational()) {
        prop_assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q);
    }

    #[test]
    fn inverse_is_two_sided(m in matrix(3, 3)) {
        if let Some(inv) = m.inverse() {
            prop_assert_eq!(&m * &inv, RatMatrix::identity(3));
            prop_assert_eq!(&inv * &m, RatMatrix::identity(3));
        } else {
            prop_assert!(m.rank() < 3);
        }
    }

    #[test]
    fn formal_curvature_is_linear_and_lands_in_gl(blocks in block_list(), a in small_rational(), b in small_rational()) {
        let p = pair(&blocks);
        let r = r_formal(&p);
        let gl = centralizer_basis(&p);
        let so = so_basis(&p.g).unwrap();
        let x = &so.elements()[0];
        let y = &so.elements()[so.len() - 1];
        let combo = &x.scale(&a) + &y.scale(&b);
        let lhs = r.apply(&combo).unwrap();
        let rhs = &r.apply(x).unwrap().scale(&a) + &r.apply(y).unwrap().scale(&b);
        prop_assert_eq!(&lhs, &rhs);
        prop_assert!(lhs.is_zero() || gl.contains(&lhs));
        prop_assert!(check_bianchi(&r).ok);
    }

    #[test]
    fn lowered_tensor_symmetries(blocks in block_list()) {
        let p = pair(&blocks);
        let (_, qm) = realize(&p);
        let n = p.dim();
        prop_assert!(qm.symmetrization_noop);
        for i in 0..n {
            for j in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        prop_assert_eq!(qm.coeff(i, j, a, b), qm.coeff(j, i, a, b));
                        prop_assert_eq!(qm.coeff(i, j, a, b), qm.coeff(i, j, b, a));
                    }
                }
            }
        }
    }

    #[test]
    fn metric_stays_symmetric_and_l_stays_g_symmetric(blocks in block_list(), seed in proptest::collection::vec(small_rational(), 9)) {
        let p = pair(&blocks);
        let (_, qm) = realize(&p);
        let x: Vec<Rational> = seed.into_iter().take(p.dim()).map(|v| v * rat(1, 50)).collect();
        let g = metric_at(&qm, &x).unwrap().g;
        prop_assert_eq!(g.transpose(), g.clone());
        let gl = &g * &p.l;
        prop_assert_eq!(gl.transpose(), gl);
    }

    #[test]
    fn b_maps_so_to_so(blocks in block_list()) {
        let p = pair(&blocks);
        let b = build_b(&p);
        for x in so_basis(&p.g).unwrap().elements() {
            let bx = b.apply(x);
            prop_assert!(is_g_skew(&p.g, &bx));
            prop_assert_eq!(&g_adjoint(&p.g, &bx) - &bx, bx.scale(&rat(-2, 1)));
        }
    }
}
