//! The relation builder and precondition against brute-force enumeration
//! written directly over domain products.

mod common;

use std::collections::BTreeSet;

use bicheck::semantics::{precondition, Semantics, DEFAULT_STATE_CAP};
use common::oracle::compare_all;
use common::{fixture, hierarchy, FIXTURES};
use proptest::prelude::*;

#[test]
fn fixtures_match_oracle() {
    let mut total = 0;
    for name in FIXTURES {
        total += compare_all(&fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    // Every fixture operation is within budget: three queue files with
    // 2 + 2 + 3 operations, and the counters with 3 + 4 + 3.
    assert_eq!(total, 3 * 7 + 10);
}

#[test]
fn bqueue_join_precondition_is_length_below_three() {
    let h = fixture("queues.bi");
    let sem = Semantics::new(&h, DEFAULT_STATE_CAP);
    let space = sem.state_space("BQueue").unwrap();
    assert_eq!(space.len(), 15);
    assert_eq!(sem.state_space("Queue").unwrap().len(), 31);
    let rel = sem.relation("BQueue", "join").unwrap();
    let pre = precondition(&rel);
    let expected: BTreeSet<(usize, usize)> = (0..space.len())
        .filter(|&s| space.state(s)[0].as_seq().unwrap().len() < 3)
        .flat_map(|s| (0..rel.inputs.rows.len()).map(move |i| (s, i)))
        .collect();
    assert_eq!(pre, expected);
    assert_eq!(pre.len(), 7 * 2);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn generated_relations_match_oracle(h in hierarchy()) {
        let r = compare_all(&h);
        prop_assert!(r.is_ok(), "{}\n{}", r.unwrap_err(), bicheck::dsl::print(&h));
    }
}
