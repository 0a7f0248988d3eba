//! Lowering of [`HighExpr`] to imperative code over [`LowExpr`].
//!
//! Primitive constructors map one-to-one. `Let` and `Iter` have no low-level
//! counterpart and are realized with references and a counted loop.

use crate::codegen::pseudo::{render_program, CodegenError};
use crate::expr::PrimOps;
use crate::front::raw_val_to_exp;
use crate::high::{Binder, HighExpr};
use crate::low::LowExpr;
use crate::program::{Cmd, LoopBody, Payload, Prog, RawRef};
use crate::reexpress::{reexpress, Translation};
use crate::types::Value;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum LetStrategy {
    /// Evaluate the shared value once into a reference.
    #[default]
    ByValue,
    /// Substitute the shared expression into the body.
    ByName,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum UnrollPolicy {
    #[default]
    NoUnroll,
    /// Run the step twice per loop iteration when the count is written
    /// literally as `n * 2`.
    ///
    /// The loop then runs `n` times, which differs from `n * 2` steps when the
    /// product overflows.
    UnrollEvenBy2,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoweringConfig {
    pub let_strategy: LetStrategy,
    pub unroll: UnrollPolicy,
}

/// The lowering as a [`Translation`], for use with [`reexpress`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Lowering(pub LoweringConfig);

impl Translation<HighExpr, LowExpr> for Lowering {
    fn translate(&self, e: &HighExpr) -> Prog<LowExpr, LowExpr> {
        trans_high_exp(e, self.0)
    }
}

pub fn trans_high_exp(e: &HighExpr, cfg: LoweringConfig) -> Prog<LowExpr, LowExpr> {
    match e {
        HighExpr::Var(id, tag) => Prog::ret(LowExpr::Var(id.clone(), *tag)),
        HighExpr::Lit(v) => Prog::ret(LowExpr::Lit(*v)),
        HighExpr::Add(a, b) => binary(a, b, cfg, LowExpr::add),
        HighExpr::Mul(a, b) => binary(a, b, cfg, LowExpr::mul),
        HighExpr::Eq(a, b) => binary(a, b, cfg, LowExpr::equal),
        HighExpr::Not(a) => trans_high_exp(a, cfg).map(LowExpr::not),
        HighExpr::Let { shared, body, .. } => match cfg.let_strategy {
            LetStrategy::ByValue => {
                let body = body.clone();
                trans_high_exp(shared, cfg)
                    .bind(|a| Prog::instr(Cmd::init_ref_raw(a)))
                    .bind(|r| Prog::instr(Cmd::get_ref_raw(r)))
                    .bind(move |v| trans_high_exp(&body.apply(raw_val_to_exp(&v)), cfg))
            }
            LetStrategy::ByName => trans_high_exp(&body.apply((**shared).clone()), cfg),
        },
        HighExpr::Iter { count, init, step } => match (cfg.unroll, &**count) {
            (UnrollPolicy::UnrollEvenBy2, HighExpr::Mul(half, two))
                if matches!(**two, HighExpr::Lit(Value::I32(2))) =>
            {
                lower_iter(half, init, step, 2, cfg)
            }
            _ => lower_iter(count, init, step, 1, cfg),
        },
    }
}

fn binary(
    a: &HighExpr,
    b: &HighExpr,
    cfg: LoweringConfig,
    combine: fn(LowExpr, LowExpr) -> LowExpr,
) -> Prog<LowExpr, LowExpr> {
    let b = b.clone();
    trans_high_exp(a, cfg).bind(move |a| trans_high_exp(&b, cfg).map(move |b| combine(a.clone(), b)))
}

/// State in a reference, `steps_per_iteration` get/step/set rounds per loop
/// iteration, then a final read.
fn lower_iter(
    count: &HighExpr,
    init: &HighExpr,
    step: &Binder,
    steps_per_iteration: usize,
    cfg: LoweringConfig,
) -> Prog<LowExpr, LowExpr> {
    let init = init.clone();
    let step = step.clone();
    trans_high_exp(count, cfg).bind(move |n| {
        let step = step.clone();
        trans_high_exp(&init, cfg)
            .bind(|s| Prog::instr(Cmd::init_ref_raw(s)))
            .bind(move |r: RawRef| {
                let (step, state) = (step.clone(), r.clone());
                let body = LoopBody::new(move |_| {
                    let once = step_once(&state, &step, cfg);
                    (1..steps_per_iteration).fold(once.clone(), |acc, _| acc.then(once.clone()))
                });
                Prog::instr(Cmd::for_raw(n.clone(), body))
                    .then(Prog::instr(Cmd::get_ref_raw(r)).map(|v| raw_val_to_exp(&v)))
            })
    })
}

fn step_once(state: &RawRef, step: &Binder, cfg: LoweringConfig) -> Prog<LowExpr, ()> {
    let (state, target, step) = (state.clone(), state.clone(), step.clone());
    Prog::instr(Cmd::get_ref_raw(state))
        .bind(move |prev| trans_high_exp(&step.apply(raw_val_to_exp(&prev)), cfg))
        .bind(move |next| Prog::instr(Cmd::set_ref_raw(target.clone(), next)))
}

pub fn translate_high<A: Payload>(prog: &Prog<HighExpr, A>) -> Prog<LowExpr, A> {
    translate_high_with(LoweringConfig::default(), prog)
}

pub fn translate_high_with<A: Payload>(
    cfg: LoweringConfig,
    prog: &Prog<HighExpr, A>,
) -> Prog<LowExpr, A> {
    reexpress(Lowering(cfg), prog)
}

/// Lowers and renders as pseudo-code.
pub fn compile_pseudo<A: Payload>(prog: &Prog<HighExpr, A>) -> Result<String, CodegenError> {
    compile_pseudo_with(LoweringConfig::default(), prog)
}

pub fn compile_pseudo_with<A: Payload>(
    cfg: LoweringConfig,
    prog: &Prog<HighExpr, A>,
) -> Result<String, CodegenError> {
    render_program(&translate_high_with(cfg, prog))
}
