//! Run-time values and sorts for the three benchmark domains.

use std::fmt;

/// Width of the bit-vector sort; benchmark literals are 64-bit hex words.
pub const BV_WIDTH: u32 = 64;

/// Sort tags for values, operator signatures and grammar nonterminals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Str,
    Int,
    Bool,
    Bv,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Str => write!(f, "String"),
            Sort::Int => write!(f, "Int"),
            Sort::Bool => write!(f, "Bool"),
            Sort::Bv => write!(f, "(BitVec {BV_WIDTH})"),
        }
    }
}

/// A run-time value. Equality is tag-and-payload equality; bit-vector
/// arithmetic wraps modulo 2^64 and signed bit-vector operations read the
/// payload as two's complement.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Str(String),
    Int(i64),
    Bool(bool),
    Bv(u64),
}

impl Value {
    pub fn sort(&self) -> Sort {
        match self {
            Value::Str(_) => Sort::Str,
            Value::Int(_) => Sort::Int,
            Value::Bool(_) => Sort::Bool,
            Value::Bv(_) => Sort::Bv,
        }
    }

    pub fn str(s: impl Into<String>) -> Value {
        Value::Str(s.into())
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// The all-zeros value of a sort, used to seed counterexample search.
    pub fn zero(sort: Sort) -> Value {
        match sort {
            Sort::Str => Value::Str(String::new()),
            Sort::Int => Value::Int(0),
            Sort::Bool => Value::Bool(false),
            Sort::Bv => Value::Bv(0),
        }
    }
}

impl fmt::Display for Value {
    /// Prints the SMT-LIB literal form: double-quoted strings with doubled
    /// inner quotes, decimal integers, `true`/`false`, and 16-digit hex words.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Str(s) => {
                write!(f, "\"")?;
                for ch in s.chars() {
                    if ch == '"' {
                        write!(f, "\"\"")?;
                    } else {
                        write!(f, "{ch}")?;
                    }
                }
                write!(f, "\"")
            }
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Bv(w) => write!(f, "#x{w:016x}"),
        }
    }
}
