//! Deep embedding of imperative programs over a pluggable expression language.
//!
//! A [`Prog<E, A>`] is a tree of `Return`, `Bind` and single-instruction nodes.
//! Continuations are host closures, so each interpretation instantiates them
//! with its own representation of values: concrete runtime data when running,
//! symbolic identifiers when generating code.
//!
//! Values flowing between nodes are type-erased internally; the typed surface
//! guarantees every downcast succeeds.

use std::any::Any;
use std::fmt;
use std::marker::PhantomData;
use std::sync::Arc;

use thiserror::Error;

use crate::expr::{Expr, Expression};
use crate::types::{Type, TypeTag, Value, VarId};

/// Bounds for values a program may return.
pub trait Payload: Clone + Send + Sync + 'static {}

impl<T: Clone + Send + Sync + 'static> Payload for T {}

pub(crate) type Dyn = Arc<dyn Any + Send + Sync>;

/// Handle to a mutable cell owned by a running interpreter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CellId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValPayload {
    Concrete(Value),
    Symbolic(VarId),
}

/// A value produced by an instruction, with its tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawVal {
    tag: TypeTag,
    payload: ValPayload,
}

impl RawVal {
    pub fn concrete(value: Value) -> Self {
        RawVal {
            tag: value.tag(),
            payload: ValPayload::Concrete(value),
        }
    }

    pub fn symbolic(tag: TypeTag, id: VarId) -> Self {
        RawVal {
            tag,
            payload: ValPayload::Symbolic(id),
        }
    }

    pub fn tag(&self) -> TypeTag {
        self.tag
    }

    pub fn payload(&self) -> &ValPayload {
        &self.payload
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RefPayload {
    Concrete(CellId),
    Symbolic(VarId),
}

/// A reference produced by `InitRef`, with the tag of its contents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRef {
    tag: TypeTag,
    payload: RefPayload,
}

impl RawRef {
    pub fn concrete(tag: TypeTag, cell: CellId) -> Self {
        RawRef {
            tag,
            payload: RefPayload::Concrete(cell),
        }
    }

    pub fn symbolic(tag: TypeTag, id: VarId) -> Self {
        RawRef {
            tag,
            payload: RefPayload::Symbolic(id),
        }
    }

    pub fn tag(&self) -> TypeTag {
        self.tag
    }

    pub fn payload(&self) -> &RefPayload {
        &self.payload
    }
}

/// A [`RawVal`] statically known to hold a `T`.
pub struct Val<T> {
    raw: RawVal,
    _ty: PhantomData<fn() -> T>,
}

impl<T: Type> Val<T> {
    pub fn from_raw(raw: RawVal) -> Option<Self> {
        (raw.tag == T::TAG).then_some(Val {
            raw,
            _ty: PhantomData,
        })
    }

    pub fn concrete(value: T) -> Self {
        Val {
            raw: RawVal::concrete(value.into_value()),
            _ty: PhantomData,
        }
    }

    pub fn symbolic(id: impl Into<VarId>) -> Self {
        Val {
            raw: RawVal::symbolic(T::TAG, id.into()),
            _ty: PhantomData,
        }
    }

    pub fn raw(&self) -> &RawVal {
        &self.raw
    }
}

/// A [`RawRef`] statically known to hold a `T`.
pub struct Ref<T> {
    raw: RawRef,
    _ty: PhantomData<fn() -> T>,
}

impl<T: Type> Ref<T> {
    pub fn from_raw(raw: RawRef) -> Option<Self> {
        (raw.tag == T::TAG).then_some(Ref {
            raw,
            _ty: PhantomData,
        })
    }

    pub fn raw(&self) -> &RawRef {
        &self.raw
    }
}

impl<T> Clone for Val<T> {
    fn clone(&self) -> Self {
        Val {
            raw: self.raw.clone(),
            _ty: PhantomData,
        }
    }
}

impl<T> Clone for Ref<T> {
    fn clone(&self) -> Self {
        Ref {
            raw: self.raw.clone(),
            _ty: PhantomData,
        }
    }
}

impl<T> fmt::Debug for Val<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.raw.fmt(f)
    }
}

impl<T> fmt::Debug for Ref<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.raw.fmt(f)
    }
}

/// What a handler hands back for one instruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Yield {
    Unit,
    Ref(RawRef),
    Val(RawVal),
}

/// Types an instruction can yield to its continuation.
pub trait FromYield: Payload {
    fn from_yield(y: Yield) -> Option<Self>;
}

impl FromYield for () {
    fn from_yield(y: Yield) -> Option<Self> {
        matches!(y, Yield::Unit).then_some(())
    }
}

impl FromYield for RawRef {
    fn from_yield(y: Yield) -> Option<Self> {
        match y {
            Yield::Ref(r) => Some(r),
            _ => None,
        }
    }
}

impl FromYield for RawVal {
    fn from_yield(y: Yield) -> Option<Self> {
        match y {
            Yield::Val(v) => Some(v),
            _ => None,
        }
    }
}

impl<T: Type> FromYield for Ref<T> {
    fn from_yield(y: Yield) -> Option<Self> {
        RawRef::from_yield(y).and_then(Ref::from_raw)
    }
}

impl<T: Type> FromYield for Val<T> {
    fn from_yield(y: Yield) -> Option<Self> {
        RawVal::from_yield(y).and_then(Val::from_raw)
    }
}

/// Body of a counted loop: receives the iteration counter.
pub struct LoopBody<E>(Arc<dyn Fn(RawVal) -> Prog<E, ()> + Send + Sync>);

impl<E> LoopBody<E> {
    pub fn new(f: impl Fn(RawVal) -> Prog<E, ()> + Send + Sync + 'static) -> Self {
        LoopBody(Arc::new(f))
    }

    pub fn apply(&self, counter: RawVal) -> Prog<E, ()> {
        (self.0)(counter)
    }
}

impl<E> Clone for LoopBody<E> {
    fn clone(&self) -> Self {
        LoopBody(Arc::clone(&self.0))
    }
}

/// The primitive instructions.
pub enum Instruction<E> {
    InitRef(E),
    GetRef(RawRef),
    SetRef(RawRef, E),
    Read,
    Write(E),
    PrintStr(String),
    For(E, LoopBody<E>),
}

impl<E> Instruction<E> {
    pub fn name(&self) -> &'static str {
        match self {
            Instruction::InitRef(_) => "InitRef",
            Instruction::GetRef(_) => "GetRef",
            Instruction::SetRef(..) => "SetRef",
            Instruction::Read => "Read",
            Instruction::Write(_) => "Write",
            Instruction::PrintStr(_) => "PrintStr",
            Instruction::For(..) => "For",
        }
    }
}

impl<E: Expression> Instruction<E> {
    /// Verifies that operands agree on their tags.
    pub fn check_tags(&self) -> Result<(), InternalError> {
        let mismatch = |expected: TypeTag, found: TypeTag| {
            if expected == found {
                Ok(())
            } else {
                Err(InternalError::IllTyped {
                    instruction: self.name(),
                    expected,
                    found,
                })
            }
        };
        match self {
            Instruction::SetRef(r, a) => mismatch(r.tag(), a.tag()),
            Instruction::Write(a) | Instruction::For(a, _) => mismatch(TypeTag::I32, a.tag()),
            _ => Ok(()),
        }
    }
}

impl<E: fmt::Debug> fmt::Debug for Instruction<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::InitRef(a) => f.debug_tuple("InitRef").field(a).finish(),
            Instruction::GetRef(r) => f.debug_tuple("GetRef").field(r).finish(),
            Instruction::SetRef(r, a) => f.debug_tuple("SetRef").field(r).field(a).finish(),
            Instruction::Read => f.write_str("Read"),
            Instruction::Write(a) => f.debug_tuple("Write").field(a).finish(),
            Instruction::PrintStr(s) => f.debug_tuple("PrintStr").field(s).finish(),
            Instruction::For(n, _) => f.debug_tuple("For").field(n).field(&"<body>").finish(),
        }
    }
}

/// Failures that indicate a broken interpreter or translation rather than a
/// bad input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InternalError {
    #[error("ill-typed {instruction}: expected {expected}, found {found}")]
    IllTyped {
        instruction: &'static str,
        expected: TypeTag,
        found: TypeTag,
    },
    #[error("handler yielded the wrong kind of result for {0}")]
    YieldMismatch(&'static str),
    #[error("symbolic `{0}` reached a concrete interpretation")]
    UnexpectedSymbolic(VarId),
    #[error("concrete {0} reached a symbolic interpretation")]
    UnexpectedConcrete(&'static str),
    #[error("cell {0} does not belong to this run")]
    UnknownCell(usize),
}

/// An instruction whose yielded value has type `A`.
pub struct Cmd<E, A> {
    instr: Instruction<E>,
    _ty: PhantomData<fn() -> A>,
}

impl<E, A> Cmd<E, A> {
    fn new(instr: Instruction<E>) -> Self {
        Cmd {
            instr,
            _ty: PhantomData,
        }
    }

    pub fn instruction(&self) -> &Instruction<E> {
        &self.instr
    }
}

impl<E: Expression, T: Type> Cmd<E, Ref<T>> {
    pub fn init_ref(init: Expr<E, T>) -> Self {
        Cmd::new(Instruction::InitRef(init.into_node()))
    }
}

impl<E: Expression, T: Type> Cmd<E, Val<T>> {
    pub fn get_ref(r: &Ref<T>) -> Self {
        Cmd::new(Instruction::GetRef(r.raw().clone()))
    }
}

impl<E: Expression> Cmd<E, Val<i32>> {
    pub fn read() -> Self {
        Cmd::new(Instruction::Read)
    }
}

impl<E: Expression> Cmd<E, ()> {
    pub fn set_ref<T: Type>(r: &Ref<T>, value: Expr<E, T>) -> Self {
        Cmd::new(Instruction::SetRef(r.raw().clone(), value.into_node()))
    }

    pub fn write(value: Expr<E, i32>) -> Self {
        Cmd::new(Instruction::Write(value.into_node()))
    }

    pub fn print_str(s: impl Into<String>) -> Self {
        Cmd::new(Instruction::PrintStr(s.into()))
    }

    pub fn for_loop(
        bound: Expr<E, i32>,
        body: impl Fn(Val<i32>) -> Prog<E, ()> + Send + Sync + 'static,
    ) -> Self {
        let body = LoopBody::new(move |counter| match Val::from_raw(counter) {
            Some(v) => body(v),
            None => Prog::fail(InternalError::YieldMismatch("For")),
        });
        Cmd::new(Instruction::For(bound.into_node(), body))
    }
}

/// Untyped constructors for translations that work on raw nodes. Tag
/// agreement is verified when the instruction is interpreted.
impl<E: Expression> Cmd<E, RawRef> {
    pub fn init_ref_raw(init: E) -> Self {
        Cmd::new(Instruction::InitRef(init))
    }
}

impl<E: Expression> Cmd<E, RawVal> {
    pub fn get_ref_raw(r: RawRef) -> Self {
        Cmd::new(Instruction::GetRef(r))
    }
}

impl<E: Expression> Cmd<E, ()> {
    pub fn set_ref_raw(r: RawRef, value: E) -> Self {
        Cmd::new(Instruction::SetRef(r, value))
    }

    pub fn for_raw(bound: E, body: LoopBody<E>) -> Self {
        Cmd::new(Instruction::For(bound, body))
    }
}

pub(crate) type Cont<E> = Arc<dyn Fn(Dyn) -> Arc<Node<E>> + Send + Sync>;

pub(crate) enum Node<E> {
    Return(Dyn),
    Bind(Arc<Node<E>>, Cont<E>),
    Instr(Instruction<E>, fn(Yield) -> Option<Dyn>),
    Fail(InternalError),
}

// Unlinks left-nested bind chains so dropping them does not recurse.
impl<E> Drop for Node<E> {
    fn drop(&mut self) {
        let Node::Bind(first, _) = self else { return };
        if Arc::strong_count(first) != 1 {
            return;
        }
        let placeholder = || Arc::new(Node::Return(Arc::new(()) as Dyn));
        let mut chain = std::mem::replace(first, placeholder());
        while let Ok(mut node) = Arc::try_unwrap(chain) {
            match &mut node {
                Node::Bind(first, _) if Arc::strong_count(first) == 1 => {
                    chain = std::mem::replace(first, placeholder());
                }
                _ => break,
            }
        }
    }
}

fn erase_yield<A: FromYield>(y: Yield) -> Option<Dyn> {
    A::from_yield(y).map(|a| Arc::new(a) as Dyn)
}

pub(crate) fn unerase<A: Payload>(d: &Dyn) -> A {
    d.downcast_ref::<A>()
        .expect("program node yielded a value of the wrong host type")
        .clone()
}

/// A program over expression language `E` returning `A`.
pub struct Prog<E, A> {
    node: Arc<Node<E>>,
    _ty: PhantomData<fn() -> A>,
}

impl<E, A> Clone for Prog<E, A> {
    fn clone(&self) -> Self {
        Prog {
            node: Arc::clone(&self.node),
            _ty: PhantomData,
        }
    }
}

impl<E, A> Prog<E, A> {
    pub(crate) fn from_node(node: Arc<Node<E>>) -> Self {
        Prog {
            node,
            _ty: PhantomData,
        }
    }

    pub(crate) fn node(&self) -> &Arc<Node<E>> {
        &self.node
    }

    /// A program that aborts interpretation with `err`.
    pub(crate) fn fail(err: InternalError) -> Self {
        Prog::from_node(Arc::new(Node::Fail(err)))
    }
}

impl<E: Send + Sync + 'static, A: Payload> Prog<E, A> {
    pub fn ret(value: A) -> Self {
        Prog::from_node(Arc::new(Node::Return(Arc::new(value))))
    }

    pub fn instr(cmd: Cmd<E, A>) -> Self
    where
        A: FromYield,
    {
        Prog::from_node(Arc::new(Node::Instr(cmd.instr, erase_yield::<A>)))
    }

    pub fn bind<B: Payload>(
        &self,
        k: impl Fn(A) -> Prog<E, B> + Send + Sync + 'static,
    ) -> Prog<E, B> {
        let cont: Cont<E> = Arc::new(move |d| k(unerase::<A>(&d)).node);
        Prog::from_node(Arc::new(Node::Bind(Arc::clone(&self.node), cont)))
    }

    /// Sequences `next` after `self`, discarding `self`'s result.
    pub fn then<B: Payload>(&self, next: Prog<E, B>) -> Prog<E, B> {
        self.bind(move |_| next.clone())
    }

    pub fn map<B: Payload>(&self, f: impl Fn(A) -> B + Send + Sync + 'static) -> Prog<E, B> {
        self.bind(move |a| Prog::ret(f(a)))
    }

    pub fn discard(&self) -> Prog<E, ()> {
        self.map(|_| ())
    }
}

impl<E, A> fmt::Debug for Prog<E, A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &*self.node {
            Node::Return(_) => "Return",
            Node::Bind(..) => "Bind",
            Node::Instr(cmd, _) => cmd.name(),
            Node::Fail(_) => "Fail",
        };
        write!(f, "Prog({kind})")
    }
}

/// An interpretation of single instructions.
///
/// A handler receiving `For` runs the body itself, typically by calling
/// [`interpret`] recursively with `self`.
pub trait Handler<E> {
    type Error: From<InternalError>;

    fn handle(&mut self, cmd: &Instruction<E>) -> Result<Yield, Self::Error>;
}

/// Lifts an instruction handler to whole programs. Bind chains of any
/// nesting run in constant stack.
pub fn interpret<E, A, H>(handler: &mut H, prog: &Prog<E, A>) -> Result<A, H::Error>
where
    E: Expression,
    A: Payload,
    H: Handler<E>,
{
    let d = run_node(handler, &prog.node)?;
    Ok(unerase::<A>(&d))
}

fn run_node<E, H>(handler: &mut H, node: &Arc<Node<E>>) -> Result<Dyn, H::Error>
where
    E: Expression,
    H: Handler<E>,
{
    let mut pending: Vec<Cont<E>> = Vec::new();
    let mut current = Arc::clone(node);
    loop {
        let value = match &*current {
            Node::Return(d) => Arc::clone(d),
            Node::Bind(first, k) => {
                pending.push(Arc::clone(k));
                current = Arc::clone(first);
                continue;
            }
            Node::Instr(cmd, erase) => {
                cmd.check_tags()?;
                let y = handler.handle(cmd)?;
                erase(y).ok_or_else(|| InternalError::YieldMismatch(cmd.name()))?
            }
            Node::Fail(err) => return Err(err.clone().into()),
        };
        match pending.pop() {
            Some(k) => current = k(value),
            None => return Ok(value),
        }
    }
}

/// Per-kind instruction counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct InstructionCount {
    pub init_ref: usize,
    pub get_ref: usize,
    pub set_ref: usize,
    pub read: usize,
    pub write: usize,
    pub print_str: usize,
    pub for_loop: usize,
}

impl InstructionCount {
    pub fn total(&self) -> usize {
        self.init_ref
            + self.get_ref
            + self.set_ref
            + self.read
            + self.write
            + self.print_str
            + self.for_loop
    }
}

/// Counts instructions statically: every loop body is visited once, with a
/// symbolic counter.
#[derive(Debug, Default)]
pub struct CountInstructions {
    pub counts: InstructionCount,
}

impl CountInstructions {
    pub fn count<E: Expression, A: Payload>(prog: &Prog<E, A>) -> Result<InstructionCount, InternalError> {
        let mut counter = CountInstructions::default();
        interpret(&mut counter, prog)?;
        Ok(counter.counts)
    }
}

impl<E: Expression> Handler<E> for CountInstructions {
    type Error = InternalError;

    fn handle(&mut self, cmd: &Instruction<E>) -> Result<Yield, InternalError> {
        let placeholder = || VarId::new("_");
        let c = &mut self.counts;
        Ok(match cmd {
            Instruction::InitRef(a) => {
                c.init_ref += 1;
                Yield::Ref(RawRef::symbolic(a.tag(), placeholder()))
            }
            Instruction::GetRef(r) => {
                c.get_ref += 1;
                Yield::Val(RawVal::symbolic(r.tag(), placeholder()))
            }
            Instruction::SetRef(..) => {
                c.set_ref += 1;
                Yield::Unit
            }
            Instruction::Read => {
                c.read += 1;
                Yield::Val(RawVal::symbolic(TypeTag::I32, placeholder()))
            }
            Instruction::Write(_) => {
                c.write += 1;
                Yield::Unit
            }
            Instruction::PrintStr(_) => {
                c.print_str += 1;
                Yield::Unit
            }
            Instruction::For(_, body) => {
                c.for_loop += 1;
                let body = body.apply(RawVal::symbolic(TypeTag::I32, placeholder()));
                interpret(self, &body)?;
                Yield::Unit
            }
        })
    }
}
