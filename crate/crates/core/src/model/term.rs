use std::fmt;
use std::sync::Arc;

/// An interned name, compared by content.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: impl AsRef<str>) -> Self {
        Symbol(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&*self.0, f)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl From<String> for Symbol {
    fn from(s: String) -> Self {
        Symbol(Arc::from(s))
    }
}

/// Identifier of a labelled null.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NullId(pub u64);

impl fmt::Display for NullId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_{}", self.0)
    }
}

/// A ground value: the kind of thing that may appear in an instance.
///
/// Constants order before nulls, and nulls order by id, which gives the
/// canonical fact order used by serialization.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Const(Symbol),
    Null(NullId),
}

impl Value {
    pub fn constant(name: impl AsRef<str>) -> Self {
        Value::Const(Symbol::new(name))
    }

    pub fn null(id: u64) -> Self {
        Value::Null(NullId(id))
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null(_))
    }

    pub fn is_const(&self) -> bool {
        matches!(self, Value::Const(_))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Const(c) => write!(f, "{c}"),
            Value::Null(n) => write!(f, "{n}"),
        }
    }
}

/// A term inside an atom: a constant, a labelled null or a variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(Symbol),
    Null(NullId),
    Var(Symbol),
}

impl Term {
    pub fn var(name: impl AsRef<str>) -> Self {
        Term::Var(Symbol::new(name))
    }

    pub fn constant(name: impl AsRef<str>) -> Self {
        Term::Const(Symbol::new(name))
    }

    pub fn as_var(&self) -> Option<&Symbol> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    /// The ground value of this term, if it is not a variable.
    pub fn as_value(&self) -> Option<Value> {
        match self {
            Term::Const(c) => Some(Value::Const(c.clone())),
            Term::Null(n) => Some(Value::Null(*n)),
            Term::Var(_) => None,
        }
    }
}

impl From<Value> for Term {
    fn from(v: Value) -> Self {
        match v {
            Value::Const(c) => Term::Const(c),
            Value::Null(n) => Term::Null(n),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) | Term::Var(c) => write!(f, "{c}"),
            Term::Null(n) => write!(f, "{n}"),
        }
    }
}

/// Hands out fresh labelled nulls with strictly increasing ids.
#[derive(Clone, Debug)]
pub struct NullGenerator {
    next: u64,
}

impl NullGenerator {
    pub fn new() -> Self {
        NullGenerator { next: 1 }
    }

    /// A generator whose first null is `Null(first)`.
    pub fn starting_at(first: u64) -> Self {
        NullGenerator { next: first.max(1) }
    }

    pub fn fresh(&mut self) -> Value {
        let id = self.next;
        self.next += 1;
        Value::Null(NullId(id))
    }

    /// The id the next call to [`fresh`](Self::fresh) will return.
    pub fn peek(&self) -> u64 {
        self.next
    }
}

impl Default for NullGenerator {
    fn default() -> Self {
        Self::new()
    }
}
