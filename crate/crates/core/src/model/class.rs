use super::{Domain, Expr, Value};

/// A named, typed slot: a state field or an operation parameter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Field {
    pub name: String,
    pub domain: Domain,
}

impl Field {
    pub fn new(name: &str, domain: Domain) -> Self {
        Self {
            name: name.to_string(),
            domain,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constant {
    pub name: String,
    pub domain: Domain,
    pub value: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpMode {
    /// Redefines an operation declared by an ancestor (`override op`).
    Specializes,
    /// Adds an operation no ancestor declares (`op`).
    Introduces,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OperationSpec {
    pub name: String,
    pub inputs: Vec<Field>,
    pub outputs: Vec<Field>,
    pub body: Expr,
    pub mode: OpMode,
}

impl OperationSpec {
    pub fn same_signature(&self, other: &OperationSpec) -> bool {
        self.inputs == other.inputs && self.outputs == other.outputs
    }
}

/// The intension of one class.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassSpec {
    pub name: String,
    pub is_abstract: bool,
    pub parent: Option<String>,
    pub constants: Vec<Constant>,
    pub fields: Vec<Field>,
    /// Own invariant over unprimed fields; conjoined with every ancestor's.
    pub invariant: Expr,
    /// Over primed fields. `None` inherits the parent's initialisation.
    pub init: Option<Expr>,
    /// Deletion condition over unprimed fields. `None` inherits the parent's.
    pub finalisation: Option<Expr>,
    pub operations: Vec<OperationSpec>,
}

impl ClassSpec {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            is_abstract: false,
            parent: None,
            constants: Vec::new(),
            fields: Vec::new(),
            invariant: Expr::truth(),
            init: None,
            finalisation: None,
            operations: Vec::new(),
        }
    }

    pub fn operation(&self, name: &str) -> Option<&OperationSpec> {
        self.operations.iter().find(|op| op.name == name)
    }
}

/// `forall <binder> : ext . <body>` attached to a class extension.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GlobalConstraint {
    pub class: String,
    pub binder: String,
    /// Over the attached class's effective fields (as `State` variables).
    pub body: Expr,
}

/// An operation as seen from a particular class, with the class that
/// supplied its definition.
#[derive(Debug, Clone, Copy)]
pub struct EffectiveOp<'h> {
    pub spec: &'h OperationSpec,
    pub defined_in: &'h str,
}

/// A single-inheritance forest of classes plus system-level constraints.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Hierarchy {
    pub classes: Vec<ClassSpec>,
    pub constraints: Vec<GlobalConstraint>,
}

impl Hierarchy {
    pub fn class(&self, name: &str) -> Option<&ClassSpec> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn parent(&self, name: &str) -> Option<&ClassSpec> {
        self.class(name)?.parent.as_deref().and_then(|p| self.class(p))
    }

    /// Proper ancestors, nearest first. Stops at unknown parents or cycles.
    pub fn ancestors(&self, name: &str) -> Vec<&ClassSpec> {
        let mut out: Vec<&ClassSpec> = Vec::new();
        let mut cur = self.class(name);
        while let Some(c) = cur {
            let Some(p) = c.parent.as_deref().and_then(|p| self.class(p)) else {
                break;
            };
            if p.name == name || out.iter().any(|a| a.name == p.name) {
                break;
            }
            out.push(p);
            cur = Some(p);
        }
        out
    }

    /// True when `anc` is `name` itself or one of its proper ancestors.
    pub fn is_ancestor_or_self(&self, anc: &str, name: &str) -> bool {
        anc == name || self.ancestors(name).iter().any(|c| c.name == anc)
    }

    /// Root first, `name` last.
    pub fn lineage(&self, name: &str) -> Vec<&ClassSpec> {
        let mut chain = self.ancestors(name);
        chain.reverse();
        if let Some(c) = self.class(name) {
            chain.push(c);
        }
        chain
    }

    pub fn children(&self, name: &str) -> Vec<&ClassSpec> {
        self.classes
            .iter()
            .filter(|c| c.parent.as_deref() == Some(name))
            .collect()
    }

    /// `name` and all of its descendants, in declaration order.
    pub fn descendants_or_self(&self, name: &str) -> Vec<&ClassSpec> {
        self.classes
            .iter()
            .filter(|c| self.is_ancestor_or_self(name, &c.name))
            .collect()
    }

    /// Inherited fields followed by own fields.
    pub fn effective_fields(&self, name: &str) -> Vec<Field> {
        self.lineage(name)
            .into_iter()
            .flat_map(|c| c.fields.iter().cloned())
            .collect()
    }

    pub fn effective_constants(&self, name: &str) -> Vec<Constant> {
        self.lineage(name)
            .into_iter()
            .flat_map(|c| c.constants.iter().cloned())
            .collect()
    }

    /// Conjuncts of every invariant along the lineage, root first.
    pub fn effective_invariant(&self, name: &str) -> Vec<&Expr> {
        self.lineage(name)
            .into_iter()
            .map(|c| &c.invariant)
            .filter(|e| !e.is_truth())
            .collect()
    }

    pub fn effective_init(&self, name: &str) -> Option<&Expr> {
        self.lineage(name).into_iter().rev().find_map(|c| c.init.as_ref())
    }

    pub fn effective_final(&self, name: &str) -> Option<&Expr> {
        self.lineage(name)
            .into_iter()
            .rev()
            .find_map(|c| c.finalisation.as_ref())
    }

    /// Operations available on instances of `name`: inherited definitions
    /// (replaced in place by overrides) followed by newly introduced ones.
    pub fn effective_operations(&self, name: &str) -> Vec<EffectiveOp<'_>> {
        let mut ops: Vec<EffectiveOp<'_>> = Vec::new();
        for class in self.lineage(name) {
            for op in &class.operations {
                let entry = EffectiveOp {
                    spec: op,
                    defined_in: &class.name,
                };
                match ops.iter_mut().find(|e| e.spec.name == op.name) {
                    Some(slot) => *slot = entry,
                    None => ops.push(entry),
                }
            }
        }
        ops
    }

    pub fn effective_operation(&self, class: &str, op: &str) -> Option<EffectiveOp<'_>> {
        self.effective_operations(class).into_iter().find(|e| e.spec.name == op)
    }
}
