//! Checker properties shared by the property suite and the acceptance run.

use std::collections::BTreeSet;

use bicheck::model::{Hierarchy, OpMode};
use bicheck::refinement::{
    confirm_witness, CheckConfig, CheckReport, Checker, Mode, ObligationKind, Overall, TheoremPart, Verdict,
};
use proptest::prelude::*;

pub const MAX_STATES: usize = 500;

pub fn configs() -> Vec<CheckConfig> {
    let mut out = Vec::new();
    for mode in [Mode::Nonblocking, Mode::Blocking] {
        for (v, a) in [(false, false), (true, false), (false, true), (true, true)] {
            out.push(CheckConfig {
                mode,
                relax_virtual_ops: v,
                relax_abstract_classes: a,
                ..CheckConfig::default()
            });
        }
    }
    out
}

pub fn run(h: &Hierarchy, config: CheckConfig) -> CheckReport {
    Checker::new(h, config).check_hierarchy().unwrap()
}

pub fn violation_keys(r: &CheckReport) -> BTreeSet<String> {
    r.violations().iter().map(|f| f.obligation.to_string()).collect()
}

pub fn check_properties(h: &Hierarchy) -> Result<(), TestCaseError> {
    let checker = Checker::new(h, CheckConfig::default());
    for c in &h.classes {
        let n = checker.semantics().state_space(&c.name).unwrap().len();
        prop_assert!(n <= MAX_STATES, "{} has {} states", c.name, n);
    }

    // Reflexivity: every class conforms to itself under every configuration.
    let mut checker = Checker::new(h, CheckConfig::default());
    for config in configs() {
        checker = checker.with_config(config);
        for c in &h.classes {
            for f in checker.check_pair(&c.name, &c.name).unwrap() {
                prop_assert!(!f.fails(), "{} fails against itself under {:?}", f.obligation, config);
            }
        }
    }

    let mut checker = Checker::new(h, CheckConfig::default());
    let mut reports: Vec<(CheckConfig, CheckReport)> = Vec::new();
    for c in configs() {
        checker = checker.with_config(c);
        reports.push((c, checker.check_hierarchy().unwrap()));
    }
    let report = |mode: Mode, v: bool, a: bool| {
        &reports
            .iter()
            .find(|(c, _)| c.mode == mode && c.relax_virtual_ops == v && c.relax_abstract_classes == a)
            .unwrap()
            .1
    };

    // Blocking correctness is the stronger rule.
    for relaxed in [false, true] {
        let nb = report(Mode::Nonblocking, relaxed, relaxed);
        let b = report(Mode::Blocking, relaxed, relaxed);
        for fb in b
            .findings()
            .filter(|f| f.obligation.kind == ObligationKind::CorrectnessB)
        {
            if fb.verdict == Verdict::Holds {
                let op = fb.obligation.op.as_deref();
                let fnb = nb
                    .find(ObligationKind::CorrectnessNB, &fb.obligation.subclass, op)
                    .unwrap();
                prop_assert_eq!(fnb.verdict, Verdict::Holds, "{}", fnb.obligation);
            }
        }
    }

    // Relaxations only remove failures.
    for (config, relaxed) in &reports {
        let strict = report(config.mode, false, false);
        let extra: Vec<_> = violation_keys(relaxed)
            .difference(&violation_keys(strict))
            .cloned()
            .collect();
        prop_assert!(extra.is_empty(), "{:?} adds failures {:?}", config, extra);
        if strict.overall == Overall::Conformant {
            prop_assert_eq!(relaxed.overall, Overall::Conformant);
        }
    }

    for (config, report) in &reports {
        // Witnesses replay to genuine violations.
        for f in report.findings().filter(|f| f.fails()) {
            prop_assert!(
                confirm_witness(h, f).unwrap(),
                "bogus witness for {}: {:?}",
                f.obligation,
                f.witness
            );
        }
        // The virtual operation is refined by the operation it was built from.
        if config.relax_virtual_ops {
            for edge in &report.edges {
                for op in h.effective_operations(&edge.subclass) {
                    let is_extra = op.spec.mode == OpMode::Introduces
                        && h.effective_operation(&edge.superclass, &op.spec.name).is_none();
                    if !is_extra {
                        continue;
                    }
                    let f = report
                        .find(
                            ObligationKind::VirtualOpTheorem(TheoremPart::Correctness),
                            &edge.subclass,
                            Some(&op.spec.name),
                        )
                        .expect("theorem finding for every extra operation");
                    prop_assert_eq!(f.verdict, Verdict::Holds, "{}", f.obligation);
                }
            }
        }
    }
    Ok(())
}
