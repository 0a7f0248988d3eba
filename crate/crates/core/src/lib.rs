//! A staged embedded-DSL toolkit.
//!
//! Imperative programs ([`Prog`]) are deep-embedded over a pluggable
//! expression language. Two languages are bundled: [`LowExpr`], which has
//! only variables, literals and primitive operators, and [`HighExpr`], which
//! adds let binding and pure iteration. High-level programs are compiled by
//! re-expressing them over `LowExpr`, after which they can be run, printed as
//! pseudo-code, or emitted as C.
//!
//! ```
//! use staged_edsl::*;
//!
//! let p: Prog<LowExpr, ()> = init_ref(lit(0)).bind(|r: Ref<i32>| set_ref(&r, lit(1)));
//! ```
//!
//! Types are checked when the program is built, so storing a boolean in an
//! integer reference is rejected:
//!
//! ```compile_fail
//! use staged_edsl::*;
//!
//! let p: Prog<LowExpr, ()> = init_ref(lit(0)).bind(|r: Ref<i32>| set_ref(&r, lit(true)));
//! ```

pub mod codegen;
pub mod corpus;
pub mod expr;
pub mod front;
pub mod high;
pub mod low;
pub mod program;
pub mod reexpress;
pub mod runtime;
pub mod translate;
pub mod types;

pub use expr::{lit, EvalError, EvalExp, Expr, Expression, FreeExp, PrimOps, ShowExp};
pub use front::*;
pub use high::{iter, let_in, High, HighExpr};
pub use low::{Low, LowExpr};
pub use program::{interpret, Cmd, Handler, Instruction, InternalError, Prog, Ref, Val};
pub use types::{Type, TypeTag, Value, VarId};
