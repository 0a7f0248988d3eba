//! Rewriting a program over one expression language into a program over
//! another. Translating an operand may itself emit instructions, which are
//! placed before the instruction that consumes the operand.

use std::sync::Arc;

use crate::expr::Expression;
use crate::program::{
    unerase, Cont, Dyn, Instruction, InternalError, LoopBody, Node, Payload, Prog, Yield,
};

/// A tag-preserving translation of expressions that may emit setup code.
pub trait Translation<Src, Dst>: Send + Sync + 'static {
    fn translate(&self, e: &Src) -> Prog<Dst, Dst>;
}

impl<Src, Dst, F> Translation<Src, Dst> for F
where
    F: Fn(&Src) -> Prog<Dst, Dst> + Send + Sync + 'static,
{
    fn translate(&self, e: &Src) -> Prog<Dst, Dst> {
        self(e)
    }
}

/// The translation that leaves every expression as it is.
pub fn identity<E: Expression>(e: &E) -> Prog<E, E> {
    Prog::ret(e.clone())
}

pub fn reexpress<Src, Dst, A, T>(translation: T, prog: &Prog<Src, A>) -> Prog<Dst, A>
where
    Src: Expression,
    Dst: Expression,
    A: Payload,
    T: Translation<Src, Dst>,
{
    let translation: Shared<Src, Dst> = Arc::new(translation);
    Prog::from_node(reexpress_node(&translation, prog.node()))
}

type Shared<Src, Dst> = Arc<dyn Translation<Src, Dst>>;

fn reexpress_node<Src: Expression, Dst: Expression>(
    tr: &Shared<Src, Dst>,
    node: &Node<Src>,
) -> Arc<Node<Dst>> {
    match node {
        Node::Return(d) => Arc::new(Node::Return(Arc::clone(d))),
        Node::Bind(..) => {
            let mut conts = Vec::new();
            let mut innermost = node;
            while let Node::Bind(first, k) = innermost {
                conts.push(Arc::clone(k));
                innermost = first;
            }
            conts.into_iter().rev().fold(reexpress_node(tr, innermost), |first, k| {
                let tr = Arc::clone(tr);
                let rest: Cont<Dst> = Arc::new(move |d| reexpress_node(&tr, &k(d)));
                Arc::new(Node::Bind(first, rest))
            })
        }
        Node::Instr(cmd, erase) => reexpress_cmd(tr, cmd, *erase),
        Node::Fail(err) => Arc::new(Node::Fail(err.clone())),
    }
}

/// Translates `operand`, then builds the consuming instruction from the result.
fn with_operand<Src: Expression, Dst: Expression>(
    tr: &Shared<Src, Dst>,
    operand: &Src,
    instruction: &'static str,
    build: impl Fn(Dst) -> Arc<Node<Dst>> + Send + Sync + 'static,
) -> Arc<Node<Dst>> {
    let expected = operand.tag();
    let translated = tr.translate(operand);
    let rest: Cont<Dst> = Arc::new(move |d| {
        let e: Dst = unerase(&d);
        if e.tag() == expected {
            build(e)
        } else {
            Arc::new(Node::Fail(InternalError::IllTyped {
                instruction,
                expected,
                found: e.tag(),
            }))
        }
    });
    Arc::new(Node::Bind(Arc::clone(translated.node()), rest))
}

fn reexpress_cmd<Src: Expression, Dst: Expression>(
    tr: &Shared<Src, Dst>,
    cmd: &Instruction<Src>,
    erase: fn(Yield) -> Option<Dyn>,
) -> Arc<Node<Dst>> {
    let instr = move |i: Instruction<Dst>| Arc::new(Node::Instr(i, erase));
    match cmd {
        Instruction::InitRef(a) => {
            with_operand(tr, a, "InitRef", move |a| instr(Instruction::InitRef(a)))
        }
        Instruction::GetRef(r) => instr(Instruction::GetRef(r.clone())),
        Instruction::SetRef(r, a) => {
            let r = r.clone();
            with_operand(tr, a, "SetRef", move |a| {
                instr(Instruction::SetRef(r.clone(), a))
            })
        }
        Instruction::Read => instr(Instruction::Read),
        Instruction::Write(a) => with_operand(tr, a, "Write", move |a| instr(Instruction::Write(a))),
        Instruction::PrintStr(s) => instr(Instruction::PrintStr(s.clone())),
        Instruction::For(n, body) => {
            let body = body.clone();
            let tr_body = Arc::clone(tr);
            with_operand(tr, n, "For", move |n| {
                let body = body.clone();
                let tr = Arc::clone(&tr_body);
                let body = LoopBody::new(move |i| {
                    Prog::from_node(reexpress_node(&tr, body.apply(i).node()))
                });
                instr(Instruction::For(n, body))
            })
        }
    }
}
