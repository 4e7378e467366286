use std::fmt;

/// A concrete value drawn from some [`Domain`](super::Domain).
///
/// Enum literals are stored by name; which enumeration they belong to is
/// fixed by the declaration they are checked against.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Enum(String),
    Seq(Vec<Value>),
}

impl Value {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_seq(&self) -> Option<&[Value]> {
        match self {
            Value::Seq(items) => Some(items),
            _ => None,
        }
    }

    pub fn enum_lit(name: &str) -> Self {
        Value::Enum(name.to_string())
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Enum(name) => f.write_str(name),
            Value::Seq(items) if items.is_empty() => f.write_str("<>"),
            Value::Seq(items) => {
                f.write_str("<")?;
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(">")
            }
        }
    }
}

/// Renders `names` zipped with `values` as `{a=1, b=<x>}`.
pub fn format_binding<'a>(names: impl IntoIterator<Item = &'a str>, values: &[Value]) -> String {
    let mut out = String::from("{");
    for (k, (name, value)) in names.into_iter().zip(values).enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        out.push_str(name);
        out.push('=');
        out.push_str(&value.to_string());
    }
    out.push('}');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_syntax() {
        let s = Value::Seq(vec![Value::enum_lit("a"), Value::enum_lit("b")]);
        assert_eq!(s.to_string(), "<a, b>");
        assert_eq!(Value::Seq(vec![]).to_string(), "<>");
        assert_eq!(Value::Int(-3).to_string(), "-3");
        assert_eq!(
            format_binding(["x", "y"], &[Value::Bool(true), Value::Int(2)]),
            "{x=true, y=2}"
        );
        assert_eq!(format_binding([], &[]), "{}");
    }
}
