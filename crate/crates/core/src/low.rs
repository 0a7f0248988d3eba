//! The minimal expression language: variables, literals and a handful of
//! primitive operators.

use std::sync::Arc;

use crate::expr::{expect_tag, EvalError, EvalExp, Expr, Expression, FreeExp, PrimOps, ShowExp};
use crate::types::{TypeTag, Value, VarId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LowExpr {
    Var(VarId, TypeTag),
    Lit(Value),
    Add(Arc<LowExpr>, Arc<LowExpr>),
    Mul(Arc<LowExpr>, Arc<LowExpr>),
    Not(Arc<LowExpr>),
    Eq(Arc<LowExpr>, Arc<LowExpr>),
}

pub type Low<T> = Expr<LowExpr, T>;

impl Expression for LowExpr {
    fn tag(&self) -> TypeTag {
        match self {
            LowExpr::Var(_, tag) => *tag,
            LowExpr::Lit(v) => v.tag(),
            LowExpr::Add(..) | LowExpr::Mul(..) => TypeTag::I32,
            LowExpr::Not(_) | LowExpr::Eq(..) => TypeTag::Boolean,
        }
    }
}

impl FreeExp for LowExpr {
    fn const_exp(value: Value) -> Self {
        LowExpr::Lit(value)
    }

    fn var_exp(tag: TypeTag, id: VarId) -> Self {
        LowExpr::Var(id, tag)
    }
}

impl PrimOps for LowExpr {
    fn add(a: Self, b: Self) -> Self {
        LowExpr::Add(Arc::new(a), Arc::new(b))
    }

    fn mul(a: Self, b: Self) -> Self {
        LowExpr::Mul(Arc::new(a), Arc::new(b))
    }

    fn not(a: Self) -> Self {
        LowExpr::Not(Arc::new(a))
    }

    fn equal(a: Self, b: Self) -> Self {
        LowExpr::Eq(Arc::new(a), Arc::new(b))
    }
}

impl EvalExp for LowExpr {
    fn eval_exp(&self) -> Result<Value, EvalError> {
        eval_low(self)
    }
}

impl ShowExp for LowExpr {
    fn show_exp(&self) -> String {
        render_low(self)
    }
}

fn eval_i32(e: &LowExpr) -> Result<i32, EvalError> {
    Ok(expect_tag(TypeTag::I32, eval_low(e)?)?
        .as_i32()
        .expect("tag checked"))
}

/// Evaluates a closed expression. Integer arithmetic wraps.
pub fn eval_low(e: &LowExpr) -> Result<Value, EvalError> {
    Ok(match e {
        LowExpr::Var(id, _) => return Err(EvalError::UnboundVariable(id.clone())),
        LowExpr::Lit(v) => *v,
        LowExpr::Add(a, b) => Value::I32(eval_i32(a)?.wrapping_add(eval_i32(b)?)),
        LowExpr::Mul(a, b) => Value::I32(eval_i32(a)?.wrapping_mul(eval_i32(b)?)),
        LowExpr::Not(a) => {
            let v = expect_tag(TypeTag::Boolean, eval_low(a)?)?;
            Value::Bool(!v.as_bool().expect("tag checked"))
        }
        LowExpr::Eq(a, b) => {
            let x = eval_low(a)?;
            let y = expect_tag(x.tag(), eval_low(b)?)?;
            Value::Bool(x == y)
        }
    })
}

fn bracket(s: String) -> String {
    format!("({s})")
}

/// Fully parenthesized rendering, literals in the host show convention.
pub fn render_low(e: &LowExpr) -> String {
    match e {
        LowExpr::Var(id, _) => id.to_string(),
        LowExpr::Lit(v) => v.to_string(),
        LowExpr::Add(a, b) => bracket(format!("{} + {}", render_low(a), render_low(b))),
        LowExpr::Mul(a, b) => bracket(format!("{} * {}", render_low(a), render_low(b))),
        LowExpr::Not(a) => bracket(format!("not {}", render_low(a))),
        LowExpr::Eq(a, b) => bracket(format!("{} == {}", render_low(a), render_low(b))),
    }
}
