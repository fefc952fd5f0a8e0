use cluster_core::cartan::CartanMatrix;
use cluster_core::double_bruhat::{
    exhaustive_family_search, parse_double_word, parse_word_entries, verify_adjacent_exchange, DbcError,
    ExchangeOutcome, SymbolicMatrix,
};

fn a(n: usize) -> CartanMatrix {
    format!("A{n}").parse().unwrap()
}

#[test]
fn every_exchange_of_the_sl3_word_verifies() {
    let w = parse_double_word(2, &parse_word_entries("1,2,1,2,1,-1,-2,-1").unwrap(), &a(2)).unwrap();
    let m = SymbolicMatrix::new(3);
    for &k in w.ex() {
        let report = verify_adjacent_exchange(&w, k, &m, 6, 11).unwrap();
        assert!(report.outcome.is_verified(), "k={k}: {:?}", report.outcome);
        assert_eq!(report.points_checked, 6);
    }
    let search = exhaustive_family_search(&w, 4, &m).unwrap();
    assert!(search.is_none());
}

#[test]
fn sl4_word_exchanges_verify() {
    let entries = parse_word_entries("1,2,3,1,2,1,-3,-2,-1").unwrap();
    let w = parse_double_word(3, &entries, &a(3)).unwrap();
    let b = w.btilde().unwrap();
    assert_eq!((b.m(), b.n()), (9, w.ex().len()));
    let m = SymbolicMatrix::new(4);
    for &k in w.ex() {
        let report = verify_adjacent_exchange(&w, k, &m, 3, 5).unwrap();
        assert!(
            !matches!(report.outcome, ExchangeOutcome::Failed { .. }),
            "k={k}: {:?}",
            report.outcome
        );
    }
}

#[test]
fn word_errors() {
    assert!(matches!(parse_word_entries("1,,2"), Err(DbcError::Syntax(..))));
    let e = parse_double_word(2, &[1, 2, 1, 1], &a(2)).unwrap_err();
    assert!(matches!(e, DbcError::NotReduced { which: 'v', .. }), "{e}");
    let e = parse_double_word(2, &[1, 2, 3], &a(2)).unwrap_err();
    assert!(matches!(e, DbcError::BadEntry { .. }), "{e}");
}

#[test]
fn non_simply_laced_words_build_matrices() {
    for (name, word) in [("B2", "1,2,1,2,-1,-2,-1,-2"), ("G2", "1,2,1,2,-1")] {
        let c: CartanMatrix = name.parse().unwrap();
        let w = parse_double_word(2, &parse_word_entries(word).unwrap(), &c).unwrap();
        let b = w.btilde().unwrap();
        assert_eq!(b.m(), w.m(), "{name}");
        assert!(!w.is_type_a());
    }
}
