use std::fmt;

use super::Value;

/// A finite value set a field, parameter, or constant ranges over.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Domain {
    Bool,
    /// Inclusive integer range.
    IntRange {
        lo: i64,
        hi: i64,
    },
    /// Ordered, distinct literals.
    Enum {
        literals: Vec<String>,
    },
    /// Sequences of length `0..=max_len` over a non-sequence element domain.
    Seq {
        elem: Box<Domain>,
        max_len: usize,
    },
}

impl Domain {
    pub fn int(lo: i64, hi: i64) -> Self {
        Domain::IntRange { lo, hi }
    }

    pub fn enumeration<S: AsRef<str>>(literals: &[S]) -> Self {
        Domain::Enum {
            literals: literals.iter().map(|l| l.as_ref().to_string()).collect(),
        }
    }

    pub fn seq(elem: Domain, max_len: usize) -> Self {
        Domain::Seq {
            elem: Box::new(elem),
            max_len,
        }
    }

    /// Checks the well-formedness rules of the domain itself.
    pub fn check(&self) -> Result<(), String> {
        match self {
            Domain::Bool => Ok(()),
            Domain::IntRange { lo, hi } if lo > hi => Err(format!("empty integer range {lo}..{hi}")),
            Domain::IntRange { .. } => Ok(()),
            Domain::Enum { literals } => {
                if literals.is_empty() {
                    return Err("enumeration has no literals".into());
                }
                for (k, lit) in literals.iter().enumerate() {
                    if literals[..k].contains(lit) {
                        return Err(format!("enumeration literal `{lit}` repeated"));
                    }
                }
                Ok(())
            }
            Domain::Seq { elem, .. } => {
                if matches!(**elem, Domain::Seq { .. }) {
                    return Err("nested sequences are not supported".into());
                }
                elem.check()
            }
        }
    }

    /// Number of values, saturating at `u128::MAX`.
    pub fn cardinality(&self) -> u128 {
        match self {
            Domain::Bool => 2,
            Domain::IntRange { lo, hi } => (*hi as i128 - *lo as i128 + 1).max(0) as u128,
            Domain::Enum { literals } => literals.len() as u128,
            Domain::Seq { elem, max_len } => {
                let base = elem.cardinality();
                let mut total: u128 = 0;
                let mut power: u128 = 1;
                for _ in 0..=*max_len {
                    total = total.saturating_add(power);
                    power = power.saturating_mul(base);
                }
                total
            }
        }
    }

    /// All values in canonical order: `false < true`, ascending integers,
    /// declaration order for literals, and sequences by length then
    /// lexicographically by element order.
    pub fn values(&self) -> Vec<Value> {
        match self {
            Domain::Bool => vec![Value::Bool(false), Value::Bool(true)],
            Domain::IntRange { lo, hi } => (*lo..=*hi).map(Value::Int).collect(),
            Domain::Enum { literals } => literals.iter().map(|l| Value::Enum(l.clone())).collect(),
            Domain::Seq { elem, max_len } => {
                let elems = elem.values();
                let mut out = vec![Value::Seq(Vec::new())];
                let mut layer: Vec<Vec<Value>> = vec![Vec::new()];
                for _ in 0..*max_len {
                    let mut next = Vec::with_capacity(layer.len() * elems.len());
                    for prefix in &layer {
                        for e in &elems {
                            let mut s = prefix.clone();
                            s.push(e.clone());
                            next.push(s);
                        }
                    }
                    out.extend(next.iter().cloned().map(Value::Seq));
                    layer = next;
                }
                out
            }
        }
    }

    pub fn contains(&self, value: &Value) -> bool {
        match (self, value) {
            (Domain::Bool, Value::Bool(_)) => true,
            (Domain::IntRange { lo, hi }, Value::Int(i)) => lo <= i && i <= hi,
            (Domain::Enum { literals }, Value::Enum(name)) => literals.contains(name),
            (Domain::Seq { elem, max_len }, Value::Seq(items)) => {
                items.len() <= *max_len && items.iter().all(|v| elem.contains(v))
            }
            _ => false,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Bool => f.write_str("bool"),
            Domain::IntRange { lo, hi } => write!(f, "int {lo}..{hi}"),
            Domain::Enum { literals } => write!(f, "enum {{{}}}", literals.join(", ")),
            Domain::Seq { elem, max_len } => write!(f, "seq({elem}, {max_len})"),
        }
    }
}

/// Cardinality of the product of several domains, saturating.
pub fn product_cardinality<'a>(domains: impl IntoIterator<Item = &'a Domain>) -> u128 {
    domains
        .into_iter()
        .fold(1u128, |acc, d| acc.saturating_mul(d.cardinality()))
}

/// Enumerates the cartesian product of `domains`, first domain most
/// significant.
pub fn product_values<'a>(domains: impl IntoIterator<Item = &'a Domain>) -> Vec<Vec<Value>> {
    let mut rows: Vec<Vec<Value>> = vec![Vec::new()];
    for domain in domains {
        let vals = domain.values();
        let mut next = Vec::with_capacity(rows.len() * vals.len());
        for row in &rows {
            for v in &vals {
                let mut r = row.clone();
                r.push(v.clone());
                next.push(r);
            }
        }
        rows = next;
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item() -> Domain {
        Domain::enumeration(&["a", "b"])
    }

    #[test]
    fn seq_cardinality_matches_enumeration() {
        let d = Domain::seq(item(), 4);
        assert_eq!(d.cardinality(), 31);
        assert_eq!(d.values().len(), 31);
        let d = Domain::seq(Domain::int(0, 2), 3);
        assert_eq!(d.cardinality(), 1 + 3 + 9 + 27);
        assert_eq!(d.values().len(), 40);
    }

    #[test]
    fn seq_order_is_length_then_lexicographic() {
        let vals = Domain::seq(item(), 2).values();
        let shown: Vec<String> = vals.iter().map(|v| v.to_string()).collect();
        assert_eq!(shown, ["<>", "<a>", "<b>", "<a, a>", "<a, b>", "<b, a>", "<b, b>"]);
    }

    #[test]
    fn well_formedness() {
        assert!(Domain::int(3, 1).check().is_err());
        assert!(Domain::Enum { literals: vec![] }.check().is_err());
        assert!(Domain::enumeration(&["a", "a"]).check().is_err());
        assert!(Domain::seq(Domain::seq(item(), 1), 1).check().is_err());
        assert!(Domain::seq(item(), 0).check().is_ok());
    }

    #[test]
    fn membership() {
        let d = Domain::seq(item(), 1);
        assert!(d.contains(&Value::Seq(vec![Value::enum_lit("a")])));
        assert!(!d.contains(&Value::Seq(vec![Value::enum_lit("a"), Value::enum_lit("a")])));
        assert!(!Domain::int(0, 2).contains(&Value::Int(3)));
        assert!(!Domain::Bool.contains(&Value::Int(0)));
    }

    #[test]
    fn product_is_row_major() {
        let rows = product_values([&Domain::Bool, &Domain::int(0, 1)]);
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[1], vec![Value::Bool(false), Value::Int(1)]);
        assert_eq!(product_values(std::iter::empty::<&Domain>()), vec![Vec::<Value>::new()]);
    }
}
