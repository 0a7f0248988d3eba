//! C99 back end.
//!
//! Emits a single `main` with every variable hoisted to the top. Names match
//! the pseudo-code back end. Integer arithmetic goes through `uint32_t` so that
//! overflow wraps instead of being undefined.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::codegen::pseudo::{show_ref, CodegenError, EmitState};
use crate::expr::Expression;
use crate::low::LowExpr;
use crate::program::{interpret, Handler, Instruction, Prog, RawRef, RawVal, Yield};
use crate::types::{TypeTag, Value, VarId};

const INDENT: &str = "    ";

fn c_type(tag: TypeTag) -> &'static str {
    match tag {
        TypeTag::I32 => "int32_t",
        TypeTag::Boolean => "int",
    }
}

/// Hoisted declarations plus the statements of `main`.
#[derive(Debug, Default)]
pub struct CUnit {
    declarations: Vec<(VarId, TypeTag)>,
    statements: Vec<String>,
    used: HashSet<VarId>,
}

impl CUnit {
    pub fn declarations(&self) -> &[(VarId, TypeTag)] {
        &self.declarations
    }

    pub fn statements(&self) -> &[String] {
        &self.statements
    }

    /// The complete translation unit.
    pub fn source(&self) -> String {
        let mut out = String::from(
            "#include <inttypes.h>\n#include <stdint.h>\n#include <stdio.h>\n\nint main(void)\n{\n",
        );
        for (name, tag) in &self.declarations {
            let _ = writeln!(out, "{INDENT}{} {name};", c_type(*tag));
        }
        if !self.declarations.is_empty() {
            out.push('\n');
        }
        for line in &self.statements {
            let _ = writeln!(out, "{line}");
        }
        // silences set-but-unused warnings
        for (name, _) in &self.declarations {
            if !self.used.contains(name) {
                let _ = writeln!(out, "{INDENT}(void) {name};");
            }
        }
        let _ = writeln!(out, "{INDENT}return 0;\n}}");
        out
    }
}

/// Interpretation of instructions as C statements.
#[derive(Debug, Default)]
pub struct CCodeGen {
    names: EmitState,
    unit: CUnit,
    depth: usize,
}

impl CCodeGen {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn into_unit(self) -> CUnit {
        self.unit
    }

    fn declare(&mut self, base: &str, tag: TypeTag) -> VarId {
        let id = self.names.unique(base);
        self.unit.declarations.push((id.clone(), tag));
        id
    }

    fn stmt(&mut self, line: String) {
        let indent = INDENT.repeat(self.depth + 1);
        self.unit.statements.push(format!("{indent}{line}"));
    }

    fn expr(&mut self, e: &LowExpr) -> String {
        match e {
            LowExpr::Var(id, _) => {
                self.unit.used.insert(id.clone());
                id.to_string()
            }
            LowExpr::Lit(v) => c_literal(*v),
            LowExpr::Add(a, b) => wrapping(&self.expr(a), "+", &self.expr(b)),
            LowExpr::Mul(a, b) => wrapping(&self.expr(a), "*", &self.expr(b)),
            LowExpr::Not(a) => format!("(!{})", self.expr(a)),
            // xor keeps gcc from flagging `x == x`
            LowExpr::Eq(a, b) => format!("(!({} ^ {}))", self.expr(a), self.expr(b)),
        }
    }
}

fn wrapping(a: &str, op: &str, b: &str) -> String {
    format!("((int32_t) ((uint32_t) {a} {op} (uint32_t) {b}))")
}

fn c_literal(v: Value) -> String {
    match v {
        Value::I32(i32::MIN) => "INT32_MIN".to_owned(),
        Value::I32(n) if n < 0 => format!("({n})"),
        Value::I32(n) => n.to_string(),
        Value::Bool(b) => u8::from(b).to_string(),
    }
}

/// A C string literal for `s`.
pub fn c_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            // trigraphs are live under -std=c99
            '?' => out.push_str("\\?"),
            c if c.is_ascii_control() => {
                let _ = write!(out, "\\{:03o}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

impl Handler<LowExpr> for CCodeGen {
    type Error = CodegenError;

    fn handle(&mut self, cmd: &Instruction<LowExpr>) -> Result<Yield, CodegenError> {
        Ok(match cmd {
            Instruction::InitRef(a) => {
                let value = self.expr(a);
                let r = self.declare("r", a.tag());
                self.stmt(format!("{r} = {value};"));
                Yield::Ref(RawRef::symbolic(a.tag(), r))
            }
            Instruction::GetRef(r) => {
                let source = show_ref(r)?.clone();
                self.unit.used.insert(source.clone());
                let v = self.declare("v", r.tag());
                self.stmt(format!("{v} = {source};"));
                Yield::Val(RawVal::symbolic(r.tag(), v))
            }
            Instruction::SetRef(r, a) => {
                let target = show_ref(r)?.clone();
                let value = self.expr(a);
                self.stmt(format!("{target} = {value};"));
                Yield::Unit
            }
            Instruction::Read => {
                let v = self.declare("v", TypeTag::I32);
                self.stmt(format!("if (scanf(\"%\" SCNd32, &{v}) != 1) return 1;"));
                Yield::Val(RawVal::symbolic(TypeTag::I32, v))
            }
            Instruction::Write(a) => {
                let value = self.expr(a);
                self.stmt(format!("printf(\"%\" PRId32, {value});"));
                Yield::Unit
            }
            Instruction::PrintStr(s) => {
                self.stmt(format!("printf(\"%s\", {});", c_string(s)));
                Yield::Unit
            }
            Instruction::For(n, body) => {
                let bound = self.expr(n);
                let i = self.declare("v", TypeTag::I32);
                self.unit.used.insert(i.clone());
                self.stmt(format!("for ({i} = 0; {i} < {bound}; {i}++) {{"));
                let counter = RawVal::symbolic(TypeTag::I32, i);
                self.depth += 1;
                let result = interpret(self, &body.apply(counter));
                self.depth -= 1;
                result?;
                self.stmt("}".to_owned());
                Yield::Unit
            }
        })
    }
}

/// Emits a complete C99 translation unit for `prog`.
pub fn emit_c(prog: &Prog<LowExpr, ()>) -> Result<String, CodegenError> {
    let mut gen = CCodeGen::new();
    interpret(&mut gen, prog)?;
    Ok(gen.into_unit().source())
}
