//! Smart constructors: the user-facing front end of the imperative EDSL.
//!
//! Instructions that produce values hand them to the continuation as
//! expressions of the program's own language, so user code never sees
//! [`Val`] directly.

use crate::expr::{Expr, Expression, FreeExp};
use crate::program::{Cmd, Payload, Prog, RawVal, Ref, Val, ValPayload};
use crate::types::Type;

pub fn ret<E: Expression, A: Payload>(value: A) -> Prog<E, A> {
    Prog::ret(value)
}

/// Converts an instruction result into an expression of any language.
pub fn val_to_exp<E: FreeExp, T: Type>(v: &Val<T>) -> Expr<E, T> {
    Expr::wrap(raw_val_to_exp(v.raw()))
}

pub fn raw_val_to_exp<E: FreeExp>(v: &RawVal) -> E {
    match v.payload() {
        ValPayload::Concrete(value) => E::const_exp(*value),
        ValPayload::Symbolic(id) => E::var_exp(v.tag(), id.clone()),
    }
}

pub fn init_ref<E: Expression, T: Type>(init: Expr<E, T>) -> Prog<E, Ref<T>> {
    Prog::instr(Cmd::init_ref(init))
}

pub fn set_ref<E: Expression, T: Type>(r: &Ref<T>, value: Expr<E, T>) -> Prog<E, ()> {
    Prog::instr(Cmd::set_ref(r, value))
}

pub fn get_ref<E: FreeExp, T: Type>(r: &Ref<T>) -> Prog<E, Expr<E, T>> {
    Prog::instr(Cmd::get_ref(r)).map(|v| val_to_exp(&v))
}

pub fn read_input<E: FreeExp>() -> Prog<E, Expr<E, i32>> {
    Prog::instr(Cmd::read()).map(|v| val_to_exp(&v))
}

pub fn write_output<E: Expression>(value: Expr<E, i32>) -> Prog<E, ()> {
    Prog::instr(Cmd::write(value))
}

pub fn print_str<E: Expression>(s: impl Into<String>) -> Prog<E, ()> {
    Prog::instr(Cmd::print_str(s))
}

/// Runs `body` for counter values `0 .. bound - 1`.
pub fn for_loop<E: FreeExp>(
    bound: Expr<E, i32>,
    body: impl Fn(Expr<E, i32>) -> Prog<E, ()> + Send + Sync + 'static,
) -> Prog<E, ()> {
    Prog::instr(Cmd::for_loop(bound, move |i| body(val_to_exp(&i))))
}

/// Replaces the contents of `r` with `f` applied to them.
pub fn modify_ref<E: FreeExp, T: Type>(
    r: &Ref<T>,
    f: impl Fn(Expr<E, T>) -> Expr<E, T> + Send + Sync + 'static,
) -> Prog<E, ()> {
    let target = r.clone();
    get_ref(r).bind(move |x| set_ref(&target, f(x)))
}
