//! The rich expression language: the primitives of [`LowExpr`] plus let
//! binding and pure iteration, with binders represented as host closures.
//!
//! There is no renderer for this language; text is produced only after
//! lowering. The evaluator exists to serve as a reference when checking the
//! lowering pass.
//!
//! [`LowExpr`]: crate::low::LowExpr

use std::fmt;
use std::sync::Arc;

use crate::expr::{expect_tag, EvalError, EvalExp, Expr, Expression, FreeExp, PrimOps};
use crate::types::{Type, TypeTag, Value, VarId};

/// A host function from expressions to expressions.
#[derive(Clone)]
pub struct Binder(Arc<dyn Fn(HighExpr) -> HighExpr + Send + Sync>);

impl Binder {
    pub fn new(f: impl Fn(HighExpr) -> HighExpr + Send + Sync + 'static) -> Self {
        Binder(Arc::new(f))
    }

    pub fn apply(&self, arg: HighExpr) -> HighExpr {
        (self.0)(arg)
    }
}

impl fmt::Debug for Binder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<binder>")
    }
}

#[derive(Debug, Clone)]
pub enum HighExpr {
    Var(VarId, TypeTag),
    Lit(Value),
    Add(Arc<HighExpr>, Arc<HighExpr>),
    Mul(Arc<HighExpr>, Arc<HighExpr>),
    Not(Arc<HighExpr>),
    Eq(Arc<HighExpr>, Arc<HighExpr>),
    /// `body(shared)`, where `body` produces a value tagged `result`.
    Let {
        shared: Arc<HighExpr>,
        body: Binder,
        result: TypeTag,
    },
    /// `step` applied `count` times to `init`; zero times when `count <= 0`.
    Iter {
        count: Arc<HighExpr>,
        init: Arc<HighExpr>,
        step: Binder,
    },
}

pub type High<T> = Expr<HighExpr, T>;

impl Expression for HighExpr {
    fn tag(&self) -> TypeTag {
        match self {
            HighExpr::Var(_, tag) => *tag,
            HighExpr::Lit(v) => v.tag(),
            HighExpr::Add(..) | HighExpr::Mul(..) => TypeTag::I32,
            HighExpr::Not(_) | HighExpr::Eq(..) => TypeTag::Boolean,
            HighExpr::Let { result, .. } => *result,
            HighExpr::Iter { init, .. } => init.tag(),
        }
    }
}

impl FreeExp for HighExpr {
    fn const_exp(value: Value) -> Self {
        HighExpr::Lit(value)
    }

    fn var_exp(tag: TypeTag, id: VarId) -> Self {
        HighExpr::Var(id, tag)
    }
}

impl PrimOps for HighExpr {
    fn add(a: Self, b: Self) -> Self {
        HighExpr::Add(Arc::new(a), Arc::new(b))
    }

    fn mul(a: Self, b: Self) -> Self {
        HighExpr::Mul(Arc::new(a), Arc::new(b))
    }

    fn not(a: Self) -> Self {
        HighExpr::Not(Arc::new(a))
    }

    fn equal(a: Self, b: Self) -> Self {
        HighExpr::Eq(Arc::new(a), Arc::new(b))
    }
}

impl EvalExp for HighExpr {
    fn eval_exp(&self) -> Result<Value, EvalError> {
        eval_high(self)
    }
}

/// Shares `value` with `body`.
pub fn let_in<A: Type, B: Type>(
    value: High<A>,
    body: impl Fn(High<A>) -> High<B> + Send + Sync + 'static,
) -> High<B> {
    Expr::wrap(HighExpr::Let {
        shared: Arc::new(value.into_node()),
        body: Binder::new(move |x| body(Expr::wrap(x)).into_node()),
        result: B::TAG,
    })
}

/// Applies `step` to `init` `count` times.
pub fn iter<S: Type>(
    count: High<i32>,
    init: High<S>,
    step: impl Fn(High<S>) -> High<S> + Send + Sync + 'static,
) -> High<S> {
    Expr::wrap(HighExpr::Iter {
        count: Arc::new(count.into_node()),
        init: Arc::new(init.into_node()),
        step: Binder::new(move |x| step(Expr::wrap(x)).into_node()),
    })
}

fn eval_i32(e: &HighExpr) -> Result<i32, EvalError> {
    Ok(expect_tag(TypeTag::I32, eval_high(e)?)?
        .as_i32()
        .expect("tag checked"))
}

/// Evaluates a closed expression, instantiating binders with literals.
pub fn eval_high(e: &HighExpr) -> Result<Value, EvalError> {
    Ok(match e {
        HighExpr::Var(id, _) => return Err(EvalError::UnboundVariable(id.clone())),
        HighExpr::Lit(v) => *v,
        HighExpr::Add(a, b) => Value::I32(eval_i32(a)?.wrapping_add(eval_i32(b)?)),
        HighExpr::Mul(a, b) => Value::I32(eval_i32(a)?.wrapping_mul(eval_i32(b)?)),
        HighExpr::Not(a) => {
            let v = expect_tag(TypeTag::Boolean, eval_high(a)?)?;
            Value::Bool(!v.as_bool().expect("tag checked"))
        }
        HighExpr::Eq(a, b) => {
            let x = eval_high(a)?;
            let y = expect_tag(x.tag(), eval_high(b)?)?;
            Value::Bool(x == y)
        }
        HighExpr::Let {
            shared,
            body,
            result,
        } => {
            let v = expect_tag(shared.tag(), eval_high(shared)?)?;
            expect_tag(*result, eval_high(&body.apply(HighExpr::Lit(v)))?)?
        }
        HighExpr::Iter { count, init, step } => {
            let tag = init.tag();
            let n = eval_i32(count)?;
            let mut state = expect_tag(tag, eval_high(init)?)?;
            for _ in 0..n.max(0) {
                state = expect_tag(tag, eval_high(&step.apply(HighExpr::Lit(state)))?)?;
            }
            state
        }
    })
}
