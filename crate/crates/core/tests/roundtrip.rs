mod common;

use bicheck::dsl::{self, ParseError};
use common::{fixture, fixture_source, hierarchy, FIXTURES};
use proptest::prelude::*;

#[test]
fn fixtures_round_trip() {
    for name in FIXTURES {
        let h = fixture(name);
        let printed = dsl::print(&h);
        let again = dsl::parse(&printed).unwrap_or_else(|e| panic!("{name}: {e:?}\n{printed}"));
        assert_eq!(again, h, "{name}");
        assert_eq!(dsl::print(&again), printed, "{name}: printing is not a fixed point");
    }
}

#[test]
fn printed_system_block_matches_golden() {
    let golden = include_str!("golden/queues_global_rbq.printed.bi");
    assert_eq!(dsl::print(&fixture("queues_global_rbq.bi")), golden);
}

#[test]
fn queues_fixture_shape() {
    let h = fixture("queues.bi");
    let names: Vec<&str> = h.classes.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, ["Queue", "BQueue", "RBQueue"]);
    assert!(h.class("Queue").unwrap().is_abstract);
    let ops: Vec<String> = h
        .effective_operations("RBQueue")
        .iter()
        .map(|o| o.spec.name.clone())
        .collect();
    assert_eq!(ops, ["join", "leave", "reset"]);
}

fn spans_in_bounds(src: &str, errors: &[ParseError]) -> Result<(), String> {
    let lines: Vec<&str> = src.split('\n').collect();
    for e in errors {
        let s = &e.span;
        let ok_pos = |line: usize, col: usize| {
            line >= 1 && line <= lines.len() && col >= 1 && col <= lines[line - 1].chars().count() + 1
        };
        if !ok_pos(s.start_line, s.start_col) || !ok_pos(s.end_line, s.end_col) {
            return Err(format!("span out of bounds: {s:?} for {:?}", e.message));
        }
        if (s.start_line, s.start_col) > (s.end_line, s.end_col) {
            return Err(format!("inverted span: {s:?}"));
        }
    }
    Ok(())
}

#[test]
fn error_spans_on_known_bad_inputs() {
    let cases = [
        "",
        "class",
        "class A { var x : int 3..1; }",
        "class A { var x : bool; op f() { x' = 1 } }",
        "class A extends B { }",
        "class A { var x : bool; }\nclass A { }",
        "class A { var x : int 0..2; op f() { y' = x } }",
        "class A { var x : bool; }\nsystem { constraint on A : forall o : ext . x; }",
        "class A { var x : int 0..2; init x' = true; }",
        "class A { var s : seq(enum {a}, 2); op f() { s' = <x> } }",
        "class A { var x : int 0..2 op f() { } }",
        "class A { @ }",
    ];
    for src in cases {
        let errs = dsl::parse(src).expect_err(src);
        assert!(!errs.is_empty());
        spans_in_bounds(src, &errs).unwrap_or_else(|m| panic!("{src:?}: {m}"));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn generated_hierarchies_round_trip(h in hierarchy()) {
        let printed = dsl::print(&h);
        let again = dsl::parse(&printed);
        prop_assert!(again.is_ok(), "{:?}\n{}", again.err(), printed);
        prop_assert_eq!(again.unwrap(), h);
    }

    #[test]
    fn mangled_sources_report_in_bounds_spans(
        which in 0..FIXTURES.len(),
        edits in prop::collection::vec((any::<usize>(), 0u8..3, prop::sample::select(vec!['{', '}', ';', '(', '\'', '?', 'x', ' ', '\n', '<', '#', '.', '9'])), 1..4),
    ) {
        let mut chars: Vec<char> = fixture_source(FIXTURES[which]).chars().collect();
        for (pos, kind, c) in edits {
            let p = pos % (chars.len() + 1);
            match kind {
                0 if p < chars.len() => { chars.remove(p); }
                1 if p < chars.len() => chars[p] = c,
                _ => chars.insert(p, c),
            }
        }
        let src: String = chars.into_iter().collect();
        if let Err(errs) = dsl::parse(&src) {
            prop_assert!(!errs.is_empty());
            let r = spans_in_bounds(&src, &errs);
            prop_assert!(r.is_ok(), "{}", r.unwrap_err());
        }
    }
}
