use std::fmt;

use serde::Serialize;

use crate::model::Hierarchy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LintFinding {
    pub severity: Severity,
    pub class: String,
    /// Position of the constraint in the `system` block.
    pub constraint: usize,
    pub message: String,
}

impl fmt::Display for LintFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: constraint #{} on {}: {}",
            self.severity, self.constraint, self.class, self.message
        )
    }
}

/// Flags global constraints that can break substitutability: any constraint
/// on a class with an ancestor restricts behaviour the ancestor's clients
/// do not see.
///
/// By default every such constraint is a warning. With `strict`, a
/// constraint on a class below a concrete ancestor is an error, since
/// instances of that ancestor exist and may be substituted.
pub fn lint_freeness(h: &Hierarchy, strict: bool) -> Vec<LintFinding> {
    let mut out = Vec::new();
    for (i, gc) in h.constraints.iter().enumerate() {
        let ancestors = h.ancestors(&gc.class);
        if ancestors.is_empty() {
            continue;
        }
        let concrete: Vec<&str> = ancestors
            .iter()
            .filter(|a| !a.is_abstract)
            .map(|a| a.name.as_str())
            .collect();
        let severity = if strict && !concrete.is_empty() {
            Severity::Error
        } else {
            Severity::Warning
        };
        let names: Vec<&str> = ancestors.iter().map(|a| a.name.as_str()).collect();
        let message = if concrete.is_empty() {
            format!(
                "`{}` has only abstract ancestors ({}); keep constraints on superclasses",
                gc.class,
                names.join(", ")
            )
        } else {
            format!(
                "`{}` has concrete ancestor(s) {}; objects may behave differently when substituted",
                gc.class,
                concrete.join(", ")
            )
        };
        out.push(LintFinding {
            severity,
            class: gc.class.clone(),
            constraint: i,
            message,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    const SRC: &str = "
class A abstract { var n : int 0..2; }
class B extends A { }
class C extends B { }
system {
  constraint on A : forall o : ext . o.n < 2;
  constraint on B : forall o : ext . o.n < 2;
  constraint on C : forall o : ext . o.n < 2;
}";

    #[test]
    fn severities() {
        let h = parse(SRC).unwrap();
        let lax: Vec<_> = lint_freeness(&h, false)
            .iter()
            .map(|f| (f.class.clone(), f.severity))
            .collect();
        assert_eq!(
            lax,
            [
                ("B".to_string(), Severity::Warning),
                ("C".to_string(), Severity::Warning)
            ]
        );
        let strict: Vec<_> = lint_freeness(&h, true).iter().map(|f| f.severity).collect();
        assert_eq!(strict, [Severity::Warning, Severity::Error]);
        assert_eq!(lint_freeness(&h, true)[1].constraint, 2);
    }
}
