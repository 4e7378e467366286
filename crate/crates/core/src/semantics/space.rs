use std::collections::HashMap;

use super::{holds_checked, Env, SemanticsError};
use crate::model::domain::{product_cardinality, product_values};
use crate::model::{format_binding, Constant, Field, Hierarchy, Value};

/// Every invariant-satisfying state of one class, in canonical order.
#[derive(Debug, Clone)]
pub struct StateSpace {
    pub class: String,
    pub fields: Vec<Field>,
    pub constants: Vec<Constant>,
    states: Vec<Vec<Value>>,
    index: HashMap<Vec<Value>, usize>,
}

impl StateSpace {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Vec<Value>] {
        &self.states
    }

    pub fn state(&self, idx: usize) -> &[Value] {
        &self.states[idx]
    }

    pub fn index_of(&self, binding: &[Value]) -> Option<usize> {
        self.index.get(binding).copied()
    }

    pub fn field_names(&self) -> Vec<&str> {
        self.fields.iter().map(|f| f.name.as_str()).collect()
    }

    pub fn display(&self, idx: usize) -> String {
        format_binding(self.field_names(), &self.states[idx])
    }

    /// Named form of a state, for witnesses and reports.
    pub fn named(&self, idx: usize) -> Vec<(String, Value)> {
        self.fields
            .iter()
            .map(|f| f.name.clone())
            .zip(self.states[idx].iter().cloned())
            .collect()
    }
}

/// Enumerates the states of `class`: the product of its effective field
/// domains (first field most significant) filtered by the effective
/// invariant.
pub fn enumerate_states(h: &Hierarchy, class: &str, cap: usize) -> Result<StateSpace, SemanticsError> {
    if h.class(class).is_none() {
        return Err(SemanticsError::UnknownClass(class.to_string()));
    }
    let fields = h.effective_fields(class);
    let size = product_cardinality(fields.iter().map(|f| &f.domain));
    if size > cap as u128 {
        return Err(SemanticsError::StateSpaceTooLarge {
            class: class.to_string(),
            size,
            cap,
        });
    }
    let constants = h.effective_constants(class);
    let invariant = h.effective_invariant(class);
    let names: Vec<&str> = fields.iter().map(|f| f.name.as_str()).collect();

    let mut states = Vec::new();
    for row in product_values(fields.iter().map(|f| &f.domain)) {
        let mut env = Env::new(&names, &constants);
        env.pre = Some(&row);
        let mut ok = true;
        for inv in &invariant {
            if !holds_checked(inv, &env)? {
                ok = false;
                break;
            }
        }
        if ok {
            states.push(row);
        }
    }
    let index = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    Ok(StateSpace {
        class: class.to_string(),
        fields,
        constants,
        states,
        index,
    })
}
