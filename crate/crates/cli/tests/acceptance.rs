//! Acceptance run: one PASS/FAIL line per criterion, then a single
//! assertion over all of them.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::cell::Cell;
use std::time::{Duration, Instant};

use bicheck::dsl;
use bicheck::semantics::{precondition, Semantics, DEFAULT_STATE_CAP};
use bicheck_cli::run_args;
use common::{examples_dir, fixture, hierarchy, FIXTURES};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use serde_json::Value;

const FAST: Duration = Duration::from_secs(5);
const TRACE_LIMIT: Duration = Duration::from_secs(30);
const GENERATED: u32 = 200;

fn example(name: &str) -> String {
    examples_dir().join(name).display().to_string()
}

fn timed_json(args: &[&str]) -> (i32, Value, Duration) {
    let start = Instant::now();
    let out = run_args(["bicheck"].iter().chain(args).chain(&["--format=json"]));
    let elapsed = start.elapsed();
    let v = serde_json::from_str(&out.stdout).unwrap_or(Value::Null);
    (out.code, v, elapsed)
}

fn findings(v: &Value) -> Vec<&Value> {
    v["findings"].as_array().map(|a| a.iter().collect()).unwrap_or_default()
}

fn verdict<'v>(v: &'v Value, obligation: &str) -> Option<&'v str> {
    findings(v)
        .into_iter()
        .find(|f| f["obligation"] == obligation)
        .and_then(|f| f["verdict"].as_str())
}

fn runner() -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases: GENERATED,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

struct Criterion {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn strict_failures() -> Criterion {
    let (code, v, t) = timed_json(&["check", &example("queues.bi"), "--mode=nonblocking"]);
    let fails: Vec<&str> = findings(&v)
        .into_iter()
        .filter(|f| f["verdict"] == "Fails")
        .filter_map(|f| f["obligation"].as_str())
        .collect();
    let pass = code == 1 && fails == ["Applicability(BQueue.join)", "SkipCorrectness(RBQueue.reset)"] && t < FAST;
    Criterion {
        id: 1,
        name: "strict rules: exactly Applicability(BQueue.join) and SkipCorrectness(RBQueue.reset) fail",
        pass,
        detail: format!("fails={fails:?} exit={code} time={t:.2?} (limit {FAST:?})"),
    }
}

fn relaxed_conformance() -> Criterion {
    let (code, v, t) = timed_json(&[
        "check",
        &example("queues.bi"),
        "--mode=nonblocking",
        "--relax=virtual-ops,abstract-classes",
    ]);
    let app = verdict(&v, "Applicability(BQueue.join)");
    let reset = verdict(&v, "SkipCorrectness(RBQueue.reset)");
    let theorem = verdict(&v, "VirtualOpTheorem/Correctness(RBQueue.reset)");
    let pass = code == 0
        && v["summary"] == "Conformant"
        && app == Some("Lifted")
        && reset == Some("AcceptedByRelaxation")
        && theorem == Some("Holds")
        && t < FAST;
    Criterion {
        id: 2,
        name: "relaxations: Conformant, join Lifted, reset accepted, virtual-op correctness holds",
        pass,
        detail: format!(
            "summary={} join={app:?} reset={reset:?} theorem={theorem:?} time={t:.2?} (limit {FAST:?})",
            v["summary"]
        ),
    }
}

fn global_interference() -> Criterion {
    let (c1, v1, t1) = timed_json(&[
        "trace",
        &example("queues_global_rbq.bi"),
        "BQueue",
        "RBQueue",
        "--depth",
        "3",
    ]);
    let d = &v1["divergence"];
    let ops: Vec<&str> = d["trace"]
        .as_array()
        .map(|t| t.iter().filter_map(|e| e["Call"]["op"].as_str()).collect())
        .unwrap_or_default();
    let first = c1 == 1 && d["step"] == 3 && d["reason"] == "EnablednessMismatch" && ops == ["join", "join", "join"];
    let (c2, v2, t2) = timed_json(&[
        "trace",
        &example("queues_global_bq.bi"),
        "BQueue",
        "RBQueue",
        "--depth",
        "6",
    ]);
    let second = c2 == 0 && v2.get("divergence").is_none();
    Criterion {
        id: 3,
        name: "global constraint on RBQueue diverges at step 3; on BQueue no divergence to depth 6",
        pass: first && second && t1 < TRACE_LIMIT && t2 < TRACE_LIMIT,
        detail: format!(
            "rbq: step={} reason={} trace={ops:?} time={t1:.2?}; bq: {} time={t2:.2?} (limit {TRACE_LIMIT:?})",
            d["step"], d["reason"], v2["summary"]
        ),
    }
}

fn freeness_lint() -> Criterion {
    let (_, flagged, _) = timed_json(&["lint", &example("queues_global_rbq.bi")]);
    let (_, clean, _) = timed_json(&["lint", &example("queues.bi")]);
    let hit = findings(&flagged).iter().any(|f| f["class"] == "RBQueue");
    let quiet = findings(&clean).is_empty() && clean["errors"].as_array().is_some_and(|e| e.is_empty());
    Criterion {
        id: 4,
        name: "freeness lint flags the RBQueue constraint and is clean without constraints",
        pass: hit && quiet,
        detail: format!("flagged={} clean={}", findings(&flagged).len(), findings(&clean).len()),
    }
}

fn precondition_oracle() -> Criterion {
    let mut compared = 0;
    let mut problems = Vec::new();
    for name in FIXTURES {
        match common::oracle::compare_all(&fixture(name)) {
            Ok(n) => compared += n,
            Err(e) => problems.push(format!("{name}: {e}")),
        }
    }
    let h = fixture("queues.bi");
    let sem = Semantics::new(&h, DEFAULT_STATE_CAP);
    let space = sem.state_space("BQueue").unwrap();
    let rel = sem.relation("BQueue", "join").unwrap();
    let pre = precondition(&rel);
    let formula = (0..space.len())
        .flat_map(|s| (0..rel.inputs.rows.len()).map(move |i| (s, i)))
        .filter(|&(s, _)| space.state(s)[0].as_seq().unwrap().len() < 3)
        .collect();
    let bq_ok = pre == formula;
    Criterion {
        id: 5,
        name: "precondition equals brute-force enumeration; pre(BQueue.join) = #items < 3",
        pass: problems.is_empty() && compared > 0 && bq_ok,
        detail: format!(
            "{compared} class/op pairs compared exactly, mismatches={problems:?}, pre(BQueue.join) matches={bq_ok}"
        ),
    }
}

fn generated_properties() -> Criterion {
    let cases = Cell::new(0u32);
    let result = runner().run(&hierarchy(), |h| {
        cases.set(cases.get() + 1);
        common::props::check_properties(&h)
    });
    let fixtures_ok = FIXTURES
        .iter()
        .all(|f| common::props::check_properties(&fixture(f)).is_ok());
    Criterion {
        id: 6,
        name: "properties over generated hierarchies (reflexivity, B=>NB, monotonicity, witnesses, virtual-op theorem)",
        pass: result.is_ok() && fixtures_ok && cases.get() >= GENERATED,
        detail: match result {
            Ok(()) => format!("{} generated hierarchies, fixtures ok={fixtures_ok}", cases.get()),
            Err(e) => format!("{e}"),
        },
    }
}

fn round_trip() -> Criterion {
    let mut problems = Vec::new();
    for name in FIXTURES {
        let h = fixture(name);
        if dsl::parse(&dsl::print(&h)).as_ref() != Ok(&h) {
            problems.push(name.to_string());
        }
    }
    let cases = Cell::new(0u32);
    let generated = runner().run(&hierarchy(), |h| {
        cases.set(cases.get() + 1);
        let again =
            dsl::parse(&dsl::print(&h)).map_err(|e| proptest::test_runner::TestCaseError::fail(format!("{e:?}")))?;
        proptest::prop_assert_eq!(again, h);
        Ok(())
    });
    let mut bad_spans = 0;
    let broken = [
        "",
        "class A {",
        "class A { var x : int 2..1; }",
        "class A { op f() { x' = 1 } }",
        "class B extends A { }",
    ];
    for src in broken {
        let lines: Vec<&str> = src.split('\n').collect();
        for e in dsl::parse(src).err().unwrap_or_default() {
            let s = &e.span;
            let within = |l: usize, c: usize| l >= 1 && l <= lines.len() && c >= 1 && c <= lines[l - 1].len() + 1;
            if !within(s.start_line, s.start_col) || !within(s.end_line, s.end_col) {
                bad_spans += 1;
            }
        }
    }
    Criterion {
        id: 7,
        name: "parse(print(h)) = h on fixtures and generated hierarchies; parse errors carry in-bounds spans",
        pass: problems.is_empty() && generated.is_ok() && bad_spans == 0 && cases.get() >= GENERATED,
        detail: format!(
            "fixtures failing={problems:?} generated={} ({}) out-of-bounds spans={bad_spans}",
            cases.get(),
            if generated.is_ok() {
                "ok".to_string()
            } else {
                format!("{generated:?}")
            }
        ),
    }
}

#[test]
fn acceptance() {
    let criteria = [
        strict_failures(),
        relaxed_conformance(),
        global_interference(),
        freeness_lint(),
        precondition_oracle(),
        generated_properties(),
        round_trip(),
    ];
    for c in &criteria {
        println!(
            "[{}] criterion {}: {} -- {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            c.detail
        );
    }
    let failed: Vec<u32> = criteria.iter().filter(|c| !c.pass).map(|c| c.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
