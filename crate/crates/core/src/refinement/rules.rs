use super::{
    Binding, CheckConfig, CheckReport, EdgeReport, Finding, Mode, Obligation, ObligationKind, TheoremPart, Verdict,
    Witness,
};
use crate::model::{Hierarchy, OpMode};
use crate::semantics::{lift_relation, OpRelation, Projection, Semantics, SemanticsError, StateSpace, Tuple};

/// Discharges obligations for one hierarchy under one configuration.
pub struct Checker<'h> {
    sem: Semantics<'h>,
    config: CheckConfig,
}

/// First `(s, i)` where the abstract relation is enabled at `f s` but the
/// concrete one is not at `s`.
fn applicability_gap(
    n: usize,
    inputs: usize,
    f: &Projection,
    ao: &OpRelation,
    co: &OpRelation,
) -> Option<(usize, usize)> {
    (0..n)
        .flat_map(|s| (0..inputs).map(move |i| (s, i)))
        .find(|&(s, i)| ao.enabled(f.apply(s), i) && !co.enabled(s, i))
}

/// First concrete tuple whose projection the abstract relation does not
/// contain. With `within_pre`, tuples outside `pre AO` are exempt.
fn correctness_gap(f: &Projection, ao: &OpRelation, co: &OpRelation, within_pre: bool) -> Option<Tuple> {
    co.tuples.iter().copied().find(|t| {
        let a = f.apply(t.pre);
        if within_pre && !ao.enabled(a, t.input) {
            return false;
        }
        !ao.contains(&Tuple {
            pre: a,
            input: t.input,
            post: f.apply(t.post),
            output: t.output,
        })
    })
}

/// `skip` over the superclass state space, accepting `co`'s inputs and
/// emitting any of its outputs.
fn skip_relation(sup: &StateSpace, co: &OpRelation) -> OpRelation {
    let mut tuples = Vec::new();
    for a in 0..sup.len() {
        for input in 0..co.inputs.rows.len() {
            for output in 0..co.outputs.rows.len() {
                tuples.push(Tuple {
                    pre: a,
                    input,
                    post: a,
                    output,
                });
            }
        }
    }
    OpRelation {
        class: sup.class.clone(),
        op: "skip".into(),
        inputs: co.inputs.clone(),
        outputs: co.outputs.clone(),
        tuples,
    }
}

fn state_binding(space: &StateSpace, idx: usize) -> Binding {
    Binding(space.named(idx))
}

fn pair_witness(space: &StateSpace, co: &OpRelation, (s, i): (usize, usize)) -> Witness {
    Witness {
        state: Some(state_binding(space, s)),
        input: Some(Binding(co.inputs.named(i))),
        ..Witness::default()
    }
}

fn tuple_witness(space: &StateSpace, co: &OpRelation, t: Tuple) -> Witness {
    Witness {
        state: Some(state_binding(space, t.pre)),
        input: Some(Binding(co.inputs.named(t.input))),
        post_state: Some(state_binding(space, t.post)),
        output: Some(Binding(co.outputs.named(t.output))),
    }
}

impl<'h> Checker<'h> {
    pub fn new(h: &'h Hierarchy, config: CheckConfig) -> Self {
        Self {
            sem: Semantics::new(h, config.state_cap),
            config,
        }
    }

    /// Switches configuration, keeping the relations already built when
    /// the state cap is unchanged.
    pub fn with_config(self, config: CheckConfig) -> Self {
        if config.state_cap == self.config.state_cap {
            Self { sem: self.sem, config }
        } else {
            Self::new(self.h(), config)
        }
    }

    pub fn config(&self) -> &CheckConfig {
        &self.config
    }

    pub fn semantics(&self) -> &Semantics<'h> {
        &self.sem
    }

    fn h(&self) -> &'h Hierarchy {
        self.sem.hierarchy()
    }

    fn obligation(kind: ObligationKind, sub: &str, sup: &str, op: Option<&str>) -> Obligation {
        Obligation {
            kind,
            subclass: sub.to_string(),
            superclass: sup.to_string(),
            op: op.map(str::to_string),
        }
    }

    fn finding(obligation: Obligation, witness: Option<Witness>, holds_note: &str, fails_note: String) -> Finding {
        let (verdict, note) = match witness {
            None => (Verdict::Holds, holds_note.to_string()),
            Some(_) => (Verdict::Fails, fails_note),
        };
        Finding {
            obligation,
            verdict,
            witness,
            note,
            advisory: false,
        }
    }

    /// Rule 1: every subclass initial state projects to a superclass
    /// initial state.
    pub fn check_initialisation(&self, sub: &str, sup: &str) -> Result<Finding, SemanticsError> {
        let space = self.sem.state_space(sub)?;
        let f = self.sem.projection(sub, sup)?;
        let abstract_init = self.sem.init_states(sup)?;
        let bad = self
            .sem
            .init_states(sub)?
            .into_iter()
            .find(|&s| abstract_init.binary_search(&f.apply(s)).is_err());
        let witness = bad.map(|s| Witness {
            post_state: Some(state_binding(&space, s)),
            ..Witness::default()
        });
        Ok(Self::finding(
            Self::obligation(ObligationKind::Initialisation, sub, sup, None),
            witness,
            "every subclass initial state is a superclass initial state",
            format!("a `{sub}` initial state projects outside the `{sup}` initialisation"),
        ))
    }

    /// Rule 4: wherever the subclass may be finalised, so may the superclass.
    pub fn check_finalisation(&self, sub: &str, sup: &str) -> Result<Finding, SemanticsError> {
        let space = self.sem.state_space(sub)?;
        let f = self.sem.projection(sub, sup)?;
        let mut bad = None;
        for s in 0..space.len() {
            if self.sem.final_holds(sub, s)? && !self.sem.final_holds(sup, f.apply(s))? {
                bad = Some(s);
                break;
            }
        }
        let witness = bad.map(|s| Witness {
            state: Some(state_binding(&space, s)),
            ..Witness::default()
        });
        let total = self.h().effective_final(sub).is_none() && self.h().effective_final(sup).is_none();
        Ok(Self::finding(
            Self::obligation(ObligationKind::Finalisation, sub, sup, None),
            witness,
            if total {
                "no finalisation condition; the rule reduces to true"
            } else {
                "the subclass finalisation implies the superclass finalisation"
            },
            format!("a `{sub}` state may be finalised where `{sup}` may not"),
        ))
    }

    /// Rule 2 for an operation present in both classes.
    pub fn check_applicability(&self, sub: &str, sup: &str, op: &str) -> Result<Finding, SemanticsError> {
        let obligation = Self::obligation(ObligationKind::Applicability, sub, sup, Some(op));
        let sup_abstract = self.h().class(sup).is_some_and(|c| c.is_abstract);
        if self.config.relax_abstract_classes && sup_abstract {
            return Ok(Finding {
                obligation,
                verdict: Verdict::Lifted,
                witness: None,
                note: format!("`{sup}` is abstract; its operations are never invoked directly"),
                advisory: false,
            });
        }
        let space = self.sem.state_space(sub)?;
        let f = self.sem.projection(sub, sup)?;
        let ao = self.sem.relation(sup, op)?;
        let co = self.sem.relation(sub, op)?;
        let gap = applicability_gap(space.len(), co.inputs.rows.len(), &f, &ao, &co);
        Ok(Self::finding(
            obligation,
            gap.map(|p| pair_witness(&space, &co, p)),
            "pre AO => pre CO",
            format!("`{sup}.{op}` is applicable at the projected state but `{sub}.{op}` is not"),
        ))
    }

    /// Rule 3 (non-blocking) or 3a (blocking) for an operation present in
    /// both classes.
    pub fn check_correctness(&self, sub: &str, sup: &str, op: &str, mode: Mode) -> Result<Finding, SemanticsError> {
        let f = self.sem.projection(sub, sup)?;
        let space = self.sem.state_space(sub)?;
        let ao = self.sem.relation(sup, op)?;
        let co = self.sem.relation(sub, op)?;
        let (kind, within_pre, holds) = match mode {
            Mode::Nonblocking => (ObligationKind::CorrectnessNB, true, "pre AO /\\ CO => AO"),
            Mode::Blocking => (ObligationKind::CorrectnessB, false, "CO => AO"),
        };
        let gap = correctness_gap(&f, &ao, &co, within_pre);
        Ok(Self::finding(
            Self::obligation(kind, sub, sup, Some(op)),
            gap.map(|t| tuple_witness(&space, &co, t)),
            holds,
            format!("a `{sub}.{op}` step is not allowed by `{sup}.{op}` on the projected states"),
        ))
    }

    /// Obligations for an operation the superclass does not offer.
    pub fn check_extra_op(&self, sub: &str, sup: &str, op: &str) -> Result<Vec<Finding>, SemanticsError> {
        let space = self.sem.state_space(sub)?;
        let sup_space = self.sem.state_space(sup)?;
        let f = self.sem.projection(sub, sup)?;
        let co = self.sem.relation(sub, op)?;
        let mut out = Vec::new();

        if !self.config.relax_virtual_ops {
            let skip = skip_relation(&sup_space, &co);
            let gap = applicability_gap(space.len(), co.inputs.rows.len(), &f, &skip, &co);
            out.push(Self::finding(
                Self::obligation(ObligationKind::SkipApplicability, sub, sup, Some(op)),
                gap.map(|p| pair_witness(&space, &co, p)),
                "applicable everywhere, like skip",
                format!("`{sub}.{op}` is not applicable everywhere, unlike skip"),
            ));
            let gap = correctness_gap(&f, &skip, &co, true);
            out.push(Self::finding(
                Self::obligation(ObligationKind::SkipCorrectness, sub, sup, Some(op)),
                gap.map(|t| tuple_witness(&space, &co, t)),
                "inherited state is left unchanged",
                format!("`{sub}.{op}` changes state inherited from `{sup}`, so it does not refine skip"),
            ));
            return Ok(out);
        }

        for kind in [ObligationKind::SkipApplicability, ObligationKind::SkipCorrectness] {
            out.push(Finding {
                obligation: Self::obligation(kind, sub, sup, Some(op)),
                verdict: Verdict::AcceptedByRelaxation,
                witness: None,
                note: format!("simulated by a virtual `{sup}` operation that is never invoked directly"),
                advisory: false,
            });
        }
        let ao = lift_relation(&co, &f);
        let gap = applicability_gap(space.len(), co.inputs.rows.len(), &f, &ao, &co);
        let mut app = Self::finding(
            Self::obligation(
                ObligationKind::VirtualOpTheorem(TheoremPart::Applicability),
                sub,
                sup,
                Some(op),
            ),
            gap.map(|p| pair_witness(&space, &co, p)),
            "pre ao => pre co",
            format!("`{op}` is enabled at another `{sub}` state with the same projection; diagnostic only"),
        );
        app.advisory = true;
        out.push(app);
        let gap = correctness_gap(&f, &ao, &co, false);
        let mut cor = Self::finding(
            Self::obligation(
                ObligationKind::VirtualOpTheorem(TheoremPart::Correctness),
                sub,
                sup,
                Some(op),
            ),
            gap.map(|t| tuple_witness(&space, &co, t)),
            "co => ao, with ao the image of co under the projection",
            "anomaly: a concrete step is missing from its own projected image".to_string(),
        );
        cor.advisory = true;
        out.push(cor);
        Ok(out)
    }

    /// All obligations for `sub` against `sup`, which must be `sub` itself
    /// or one of its ancestors.
    pub fn check_pair(&self, sub: &str, sup: &str) -> Result<Vec<Finding>, SemanticsError> {
        let h = self.h();
        if h.class(sub).is_none() {
            return Err(SemanticsError::UnknownClass(sub.to_string()));
        }
        if !h.is_ancestor_or_self(sup, sub) {
            return Err(SemanticsError::NotAnAncestor {
                sub: sub.to_string(),
                sup: sup.to_string(),
            });
        }
        let mut findings = vec![self.check_initialisation(sub, sup)?, self.check_finalisation(sub, sup)?];
        for op in h.effective_operations(sub) {
            let name = op.spec.name.as_str();
            if h.effective_operation(sup, name).is_some() {
                findings.push(self.check_applicability(sub, sup, name)?);
                findings.push(self.check_correctness(sub, sup, name, self.config.mode)?);
            } else {
                debug_assert_eq!(op.spec.mode, OpMode::Introduces);
                findings.extend(self.check_extra_op(sub, sup, name)?);
            }
        }
        findings.sort_by(|a, b| (a.obligation.kind, &a.obligation.op).cmp(&(b.obligation.kind, &b.obligation.op)));
        Ok(findings)
    }

    /// Obligations for `sub` against its direct parent; empty for roots.
    pub fn check_edge(&self, sub: &str) -> Result<Vec<Finding>, SemanticsError> {
        match self.h().parent(sub) {
            Some(p) => self.check_pair(sub, &p.name),
            None => {
                if self.h().class(sub).is_none() {
                    return Err(SemanticsError::UnknownClass(sub.to_string()));
                }
                Ok(Vec::new())
            }
        }
    }

    /// Every parent edge, in class declaration order.
    pub fn check_hierarchy(&self) -> Result<CheckReport, SemanticsError> {
        let mut edges = Vec::new();
        for c in &self.h().classes {
            if let Some(p) = &c.parent {
                edges.push(EdgeReport {
                    subclass: c.name.clone(),
                    superclass: p.clone(),
                    findings: self.check_edge(&c.name)?,
                });
            }
        }
        Ok(CheckReport::from_edges(edges))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    const SRC: &str = "
class A {
  var n : int 0..2;
  init n' = 0;
  op up() { n < 2 /\\ n' = n + 1 }
}
class Wider extends A {
  override op up() { n' = n + 1 \\/ (n = 2 /\\ n' = n) }
}
class Narrower extends A {
  override op up() { n < 1 /\\ n' = n + 1 }
}
class Wild extends A {
  override op up() { n < 2 /\\ n' = 0 }
}";

    fn checker(h: &Hierarchy, mode: Mode) -> Checker<'_> {
        Checker::new(
            h,
            CheckConfig {
                mode,
                ..CheckConfig::default()
            },
        )
    }

    #[test]
    fn widening_the_precondition_is_allowed() {
        let h = parse(SRC).unwrap();
        let c = checker(&h, Mode::Nonblocking);
        assert!(!c.check_applicability("Wider", "A", "up").unwrap().fails());
        assert!(!c
            .check_correctness("Wider", "A", "up", Mode::Nonblocking)
            .unwrap()
            .fails());
        // Outside pre A.up the subclass does something A never does.
        assert!(c.check_correctness("Wider", "A", "up", Mode::Blocking).unwrap().fails());
    }

    #[test]
    fn narrowing_fails_applicability() {
        let h = parse(SRC).unwrap();
        let f = checker(&h, Mode::Nonblocking)
            .check_applicability("Narrower", "A", "up")
            .unwrap();
        assert!(f.fails());
        let w = f.witness.unwrap();
        assert_eq!(w.state.unwrap().to_string(), "{n=1}");
    }

    #[test]
    fn wrong_after_state_fails_correctness() {
        let h = parse(SRC).unwrap();
        let f = checker(&h, Mode::Nonblocking)
            .check_correctness("Wild", "A", "up", Mode::Nonblocking)
            .unwrap();
        assert!(f.fails());
        assert_eq!(f.witness.unwrap().post_state.unwrap().to_string(), "{n=0}");
    }

    #[test]
    fn self_pair_holds() {
        let h = parse(SRC).unwrap();
        let c = checker(&h, Mode::Blocking);
        assert!(c.check_pair("A", "A").unwrap().iter().all(|f| !f.fails()));
    }
}
