//! Capabilities an expression language can offer to programs, and the typed
//! expression handle used by the front end.
//!
//! An expression language is an untyped AST whose nodes report their
//! [`TypeTag`]. [`Expr<E, T>`] pairs such a node with a static type so that the
//! front end can only build tag-consistent programs.

use std::fmt;
use std::marker::PhantomData;
use std::ops::{Add, Mul, Not};

use thiserror::Error;

use crate::types::{Type, TypeTag, Value, VarId};

/// An untyped expression AST.
pub trait Expression: Clone + fmt::Debug + Send + Sync + 'static {
    fn tag(&self) -> TypeTag;
}

/// Injection of constants and variables.
pub trait FreeExp: Expression {
    fn const_exp(value: Value) -> Self;

    fn var_exp(tag: TypeTag, id: VarId) -> Self;
}

/// Evaluation of closed expressions.
pub trait EvalExp: Expression {
    fn eval_exp(&self) -> Result<Value, EvalError>;
}

/// Textual rendering for the pseudo-code back end.
pub trait ShowExp: Expression {
    fn show_exp(&self) -> String;
}

/// The arithmetic and logic primitives shared by the bundled languages.
pub trait PrimOps: Expression {
    fn add(a: Self, b: Self) -> Self;
    fn mul(a: Self, b: Self) -> Self;
    fn not(a: Self) -> Self;
    fn equal(a: Self, b: Self) -> Self;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}` in closed evaluation")]
    UnboundVariable(VarId),
    #[error("type mismatch: expected {expected}, found {found}")]
    TypeMismatch { expected: TypeTag, found: TypeTag },
}

/// Checks that `value` has the tag `expected`.
pub(crate) fn expect_tag(expected: TypeTag, value: Value) -> Result<Value, EvalError> {
    if value.tag() == expected {
        Ok(value)
    } else {
        Err(EvalError::TypeMismatch {
            expected,
            found: value.tag(),
        })
    }
}

/// An expression of language `E` statically known to have type `T`.
pub struct Expr<E, T> {
    node: E,
    _ty: PhantomData<fn() -> T>,
}

impl<E: Expression, T: Type> Expr<E, T> {
    /// Wraps `node` if its tag is `T`'s.
    pub fn from_node(node: E) -> Option<Self> {
        (node.tag() == T::TAG).then(|| Self::wrap(node))
    }

    pub(crate) fn wrap(node: E) -> Self {
        debug_assert_eq!(node.tag(), T::TAG);
        Expr {
            node,
            _ty: PhantomData,
        }
    }

    pub fn node(&self) -> &E {
        &self.node
    }

    pub fn into_node(self) -> E {
        self.node
    }
}

impl<E: FreeExp, T: Type> Expr<E, T> {
    pub fn var(id: impl Into<VarId>) -> Self {
        Self::wrap(E::var_exp(T::TAG, id.into()))
    }
}

impl<E: EvalExp, T: Type> Expr<E, T> {
    pub fn eval(&self) -> Result<T, EvalError> {
        let value = expect_tag(T::TAG, self.node.eval_exp()?)?;
        Ok(T::from_value(value).expect("tag checked"))
    }
}

impl<E: ShowExp, T: Type> Expr<E, T> {
    pub fn show(&self) -> String {
        self.node.show_exp()
    }
}

impl<E: PrimOps, T: Type> Expr<E, T> {
    /// Equality test, `(a == b)`.
    pub fn equals(self, other: Self) -> Expr<E, bool> {
        Expr::wrap(E::equal(self.node, other.node))
    }
}

/// Literal sugar.
pub fn lit<E: FreeExp, T: Type>(value: T) -> Expr<E, T> {
    Expr::wrap(E::const_exp(value.into_value()))
}

impl<E: Clone, T> Clone for Expr<E, T> {
    fn clone(&self) -> Self {
        Expr {
            node: self.node.clone(),
            _ty: PhantomData,
        }
    }
}

impl<E: fmt::Debug, T> fmt::Debug for Expr<E, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.node.fmt(f)
    }
}

impl<E: FreeExp> From<i32> for Expr<E, i32> {
    fn from(n: i32) -> Self {
        lit(n)
    }
}

impl<E: FreeExp> From<bool> for Expr<E, bool> {
    fn from(b: bool) -> Self {
        lit(b)
    }
}

impl<E: PrimOps> Add for Expr<E, i32> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Expr::wrap(E::add(self.node, rhs.node))
    }
}

impl<E: PrimOps + FreeExp> Add<i32> for Expr<E, i32> {
    type Output = Self;

    fn add(self, rhs: i32) -> Self {
        self + lit(rhs)
    }
}

impl<E: PrimOps> Mul for Expr<E, i32> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        Expr::wrap(E::mul(self.node, rhs.node))
    }
}

impl<E: PrimOps + FreeExp> Mul<i32> for Expr<E, i32> {
    type Output = Self;

    fn mul(self, rhs: i32) -> Self {
        self * lit(rhs)
    }
}

impl<E: PrimOps> Not for Expr<E, bool> {
    type Output = Self;

    fn not(self) -> Self {
        Expr::wrap(E::not(self.node))
    }
}
