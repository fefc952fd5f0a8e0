use std::sync::Arc;

use cluster_core::laurent::{LaurentPoly, Monomial, VarSet};
use cluster_core::seed::{find_skew_symmetrizer, ExtendedExchangeMatrix, Seed, SeedError};
use num_bigint::BigInt;
use proptest::prelude::*;

fn vars() -> Arc<VarSet> {
    VarSet::numbered("x", 3)
}

/// Up to six terms in three variables; `big` coefficients push products past
/// 256 bits so the arbitrary-precision path is exercised too.
fn poly(big: bool) -> impl Strategy<Value = LaurentPoly> {
    let coeff = if big {
        (-9i64..10, 0u32..150).prop_map(|(c, s)| BigInt::from(c) << s).boxed()
    } else {
        (-20i64..21).prop_map(BigInt::from).boxed()
    };
    prop::collection::vec((prop::array::uniform3(-3i32..4), coeff), 0..6).prop_map(|terms| {
        let v = vars();
        LaurentPoly::from_terms(&v, terms.into_iter().map(|(e, c)| (Monomial::new(e.to_vec()), c)))
    })
}

fn any_poly() -> impl Strategy<Value = LaurentPoly> {
    prop_oneof![poly(false), poly(true)]
}

proptest! {
    #[test]
    fn multiplication_commutes_and_distributes(a in any_poly(), b in any_poly(), c in any_poly()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
    }

    #[test]
    fn exact_division_inverts_multiplication(a in any_poly(), b in any_poly()) {
        prop_assume!(!b.is_zero());
        let p = &a * &b;
        prop_assert_eq!(p.try_exact_div(&b).unwrap(), a.clone());
        let d = p.div_rem(&b).unwrap();
        prop_assert!(d.remainder.is_zero());
    }

    #[test]
    fn division_with_remainder_recombines(a in any_poly(), b in any_poly()) {
        prop_assume!(!b.is_zero());
        let d = a.div_rem(&b).unwrap();
        prop_assert_eq!(&(&d.quotient * &b) + &d.remainder, a.clone());
        prop_assert_eq!(a.try_exact_div(&b).is_ok(), d.remainder.is_zero());
    }

    #[test]
    fn text_forms_parse_back(a in any_poly()) {
        let v = vars();
        prop_assert_eq!(LaurentPoly::parse(&a.to_string(), &v).unwrap(), a.clone());
        prop_assert_eq!(LaurentPoly::parse(&a.to_fraction_string(), &v).unwrap(), a.clone());
    }
}

/// `b_ij = s_ij d_j` with `S` skew-symmetric is skew-symmetrizable by `d`.
fn skew_symmetrizable(max_n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(-2i64..3, n * n),
            prop::collection::vec(1i64..3, n),
        )
            .prop_map(move |(s, d)| {
                let mut b = vec![vec![0; n]; n];
                for i in 0..n {
                    for j in i + 1..n {
                        b[i][j] = s[i * n + j] * d[j];
                        b[j][i] = -s[i * n + j] * d[i];
                    }
                }
                b
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn matrix_mutation_is_an_involution(b in skew_symmetrizable(5), k in 0usize..5) {
        let n = b.len();
        let k = k % n;
        let m = ExtendedExchangeMatrix::square(b.clone()).unwrap();
        let once = m.mutate(k).unwrap();
        prop_assert!(find_skew_symmetrizer(&once.principal_part()).is_ok());
        prop_assert_eq!(once.mutate(k).unwrap(), m);
    }

    #[test]
    fn short_walks_stay_laurent(b in skew_symmetrizable(3), walk in prop::collection::vec(0usize..3, 0..5)) {
        let n = b.len();
        let s = Seed::from_exchange_matrix(b).unwrap();
        let mut cur = s.clone();
        for k in walk.iter().map(|k| k % n) {
            let next = match cur.mutate(k) {
                Err(SeedError::LaurentViolation { .. }) => return Err(TestCaseError::fail("Laurent violation")),
                other => other.unwrap(),
            };
            prop_assert_eq!(&next.mutate(k).unwrap(), &cur);
            cur = next;
        }
    }
}
