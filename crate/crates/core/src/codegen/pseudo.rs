//! Pseudo-code back end.
//!
//! Each instruction becomes one line; loop bodies are indented four spaces
//! deeper than their `for` header. Fresh names come from a single counter
//! shared by the `v` (value) and `r` (reference) prefixes.

use thiserror::Error;

use crate::expr::ShowExp;
use crate::program::{
    interpret, Handler, Instruction, InternalError, Payload, Prog, RawRef, RawVal, RefPayload,
    ValPayload, Yield,
};
use crate::types::{TypeTag, VarId};

const INDENT: &str = "    ";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodegenError {
    #[error(transparent)]
    Internal(#[from] InternalError),
}

/// Statement accumulator and fresh-name supply.
#[derive(Debug, Clone, Default)]
pub struct EmitState {
    statements: Vec<String>,
    counter: u64,
}

impl EmitState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `<base><counter>` and advances the counter.
    pub fn unique(&mut self, base: &str) -> VarId {
        let id = VarId::numbered(base, self.counter);
        self.counter += 1;
        id
    }

    pub fn fresh_var(&mut self, tag: TypeTag) -> RawVal {
        RawVal::symbolic(tag, self.unique("v"))
    }

    pub fn fresh_ref(&mut self, tag: TypeTag) -> RawRef {
        RawRef::symbolic(tag, self.unique("r"))
    }

    pub fn stmt(&mut self, line: String) {
        self.statements.push(line);
    }

    pub fn statements(&self) -> &[String] {
        &self.statements
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }
}

/// Interpretation of instructions as pseudo-code lines.
#[derive(Debug, Default)]
pub struct PseudoCodeGen {
    state: EmitState,
    depth: usize,
}

impl PseudoCodeGen {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn into_state(self) -> EmitState {
        self.state
    }

    fn stmt(&mut self, words: &[&str]) {
        let line = format!("{}{}", INDENT.repeat(self.depth + 1), words.join(" "));
        self.state.stmt(line);
    }
}

pub(crate) fn show_val(v: &RawVal) -> Result<&VarId, InternalError> {
    match v.payload() {
        ValPayload::Symbolic(id) => Ok(id),
        ValPayload::Concrete(_) => Err(InternalError::UnexpectedConcrete("value")),
    }
}

pub(crate) fn show_ref(r: &RawRef) -> Result<&VarId, InternalError> {
    match r.payload() {
        RefPayload::Symbolic(id) => Ok(id),
        RefPayload::Concrete(_) => Err(InternalError::UnexpectedConcrete("reference")),
    }
}

impl<E: ShowExp> Handler<E> for PseudoCodeGen {
    type Error = CodegenError;

    fn handle(&mut self, cmd: &Instruction<E>) -> Result<Yield, CodegenError> {
        Ok(match cmd {
            Instruction::InitRef(a) => {
                let r = self.state.fresh_ref(a.tag());
                let name = show_ref(&r)?.to_string();
                self.stmt(&[&name, "<- initRef", &a.show_exp()]);
                Yield::Ref(r)
            }
            Instruction::GetRef(r) => {
                let source = show_ref(r)?.to_string();
                let v = self.state.fresh_var(r.tag());
                let name = show_val(&v)?.to_string();
                self.stmt(&[&name, "<- getRef", &source]);
                Yield::Val(v)
            }
            Instruction::SetRef(r, a) => {
                let target = show_ref(r)?.to_string();
                self.stmt(&["setRef", &target, &a.show_exp()]);
                Yield::Unit
            }
            Instruction::Read => {
                let v = self.state.fresh_var(TypeTag::I32);
                let name = show_val(&v)?.to_string();
                self.stmt(&[&name, "<- readInput"]);
                Yield::Val(v)
            }
            Instruction::Write(a) => {
                self.stmt(&["writeOutput", &a.show_exp()]);
                Yield::Unit
            }
            Instruction::PrintStr(s) => {
                self.stmt(&["printStr", &quote_string(s)]);
                Yield::Unit
            }
            Instruction::For(n, body) => {
                let i = self.state.fresh_var(TypeTag::I32);
                let name = show_val(&i)?.to_string();
                self.stmt(&["for", &name, "<", &n.show_exp()]);
                self.depth += 1;
                let result = interpret(self, &body.apply(i));
                self.depth -= 1;
                result?;
                self.stmt(&["end for"]);
                Yield::Unit
            }
        })
    }
}

/// Renders a program as pseudo-code, one line per statement, each line
/// terminated by a newline.
pub fn render_program<E: ShowExp, A: Payload>(prog: &Prog<E, A>) -> Result<String, CodegenError> {
    let mut gen = PseudoCodeGen::new();
    interpret(&mut gen, prog)?;
    Ok(gen
        .into_state()
        .statements
        .iter()
        .map(|line| format!("{line}\n"))
        .collect())
}

/// Double-quotes `s`, escaping backslash, double quote, newline and tab.
pub fn quote_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
