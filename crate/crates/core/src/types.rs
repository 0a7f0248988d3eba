//! The closed type universe shared by every expression language.

use std::fmt;

/// Runtime type tag carried by every expression node, value and reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TypeTag {
    I32,
    Boolean,
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeTag::I32 => f.write_str("Int32"),
            TypeTag::Boolean => f.write_str("Bool"),
        }
    }
}

/// A runtime value of one of the universe's types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Value {
    I32(i32),
    Bool(bool),
}

impl Value {
    pub fn tag(&self) -> TypeTag {
        match self {
            Value::I32(_) => TypeTag::I32,
            Value::Bool(_) => TypeTag::Boolean,
        }
    }

    pub fn as_i32(&self) -> Option<i32> {
        match *self {
            Value::I32(n) => Some(n),
            Value::Bool(_) => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match *self {
            Value::Bool(b) => Some(b),
            Value::I32(_) => None,
        }
    }
}

/// Renders with the host show convention: decimal integers, `True`/`False`.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::I32(n) => write!(f, "{n}"),
            Value::Bool(true) => f.write_str("True"),
            Value::Bool(false) => f.write_str("False"),
        }
    }
}

impl From<i32> for Value {
    fn from(n: i32) -> Self {
        Value::I32(n)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

mod sealed {
    pub trait Sealed {}
    impl Sealed for i32 {}
    impl Sealed for bool {}
}

/// Host types admitted into the EDSL. Sealed: only `i32` and `bool`.
pub trait Type:
    sealed::Sealed + Copy + Eq + Ord + fmt::Debug + Send + Sync + 'static
{
    const TAG: TypeTag;

    fn into_value(self) -> Value;

    fn from_value(value: Value) -> Option<Self>;
}

impl Type for i32 {
    const TAG: TypeTag = TypeTag::I32;

    fn into_value(self) -> Value {
        Value::I32(self)
    }

    fn from_value(value: Value) -> Option<Self> {
        value.as_i32()
    }
}

impl Type for bool {
    const TAG: TypeTag = TypeTag::Boolean;

    fn into_value(self) -> Value {
        Value::Bool(self)
    }

    fn from_value(value: Value) -> Option<Self> {
        value.as_bool()
    }
}

/// Variable identifier. Generated identifiers have the form `v<k>` or `r<k>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(String);

impl VarId {
    pub fn new(name: impl Into<String>) -> Self {
        VarId(name.into())
    }

    /// Builds `<base><n>`.
    pub fn numbered(base: &str, n: u64) -> Self {
        VarId(format!("{base}{n}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VarId {
    fn from(s: &str) -> Self {
        VarId(s.to_owned())
    }
}

impl From<String> for VarId {
    fn from(s: String) -> Self {
        VarId(s)
    }
}
