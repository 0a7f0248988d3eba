//! The standard interpretation: run a program against line-oriented input and
//! a byte output sink, with concrete cells for references.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::expr::{expect_tag, EvalError, EvalExp};
use crate::program::{
    interpret, CellId, Handler, Instruction, InternalError, Payload, Prog, RawRef, RawVal,
    RefPayload, Yield,
};
use crate::types::{TypeTag, Value};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("input ended before line {line} could be read")]
    MissingInput { line: usize },
    #[error("input line {line} is not a 32-bit decimal integer: {text:?}")]
    MalformedInput { line: usize, text: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Internal(#[from] InternalError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

/// Runtime state: the streams, the cell store and the number of lines read.
pub struct Runtime<R, W> {
    input: R,
    output: W,
    cells: Vec<Value>,
    lines_read: usize,
}

impl<R: BufRead, W: Write> Runtime<R, W> {
    pub fn new(input: R, output: W) -> Self {
        Runtime {
            input,
            output,
            cells: Vec::new(),
            lines_read: 0,
        }
    }

    pub fn lines_read(&self) -> usize {
        self.lines_read
    }

    pub fn into_output(self) -> W {
        self.output
    }

    fn cell(&self, r: &RawRef) -> Result<usize, InternalError> {
        match r.payload() {
            RefPayload::Concrete(CellId(i)) if *i < self.cells.len() => Ok(*i),
            RefPayload::Concrete(CellId(i)) => Err(InternalError::UnknownCell(*i)),
            RefPayload::Symbolic(id) => Err(InternalError::UnexpectedSymbolic(id.clone())),
        }
    }

    fn read_i32(&mut self) -> Result<i32, RunError> {
        let line = self.lines_read + 1;
        let mut text = String::new();
        if self.input.read_line(&mut text)? == 0 {
            return Err(RunError::MissingInput { line });
        }
        self.lines_read = line;
        text.trim().parse().map_err(|_| RunError::MalformedInput {
            line,
            text: text.trim_end_matches(['\n', '\r']).to_owned(),
        })
    }
}

fn eval<E: EvalExp>(e: &E) -> Result<Value, RunError> {
    Ok(expect_tag(e.tag(), e.eval_exp()?)?)
}

impl<E: EvalExp, R: BufRead, W: Write> Handler<E> for Runtime<R, W> {
    type Error = RunError;

    fn handle(&mut self, cmd: &Instruction<E>) -> Result<Yield, RunError> {
        Ok(match cmd {
            Instruction::InitRef(a) => {
                let value = eval(a)?;
                self.cells.push(value);
                Yield::Ref(RawRef::concrete(a.tag(), CellId(self.cells.len() - 1)))
            }
            Instruction::GetRef(r) => {
                let value = self.cells[self.cell(r)?];
                Yield::Val(RawVal::concrete(value))
            }
            Instruction::SetRef(r, a) => {
                let i = self.cell(r)?;
                self.cells[i] = eval(a)?;
                Yield::Unit
            }
            Instruction::Read => Yield::Val(RawVal::concrete(Value::I32(self.read_i32()?))),
            Instruction::Write(a) => {
                write!(self.output, "{}", eval(a)?)?;
                Yield::Unit
            }
            Instruction::PrintStr(s) => {
                self.output.write_all(s.as_bytes())?;
                Yield::Unit
            }
            Instruction::For(n, body) => {
                let bound = expect_tag(TypeTag::I32, eval(n)?)?
                    .as_i32()
                    .expect("tag checked");
                for i in 0..bound.max(0) {
                    interpret(self, &body.apply(RawVal::concrete(Value::I32(i))))?;
                }
                Yield::Unit
            }
        })
    }
}

/// Runs `prog`, returning its result and the number of input lines consumed.
pub fn run<E, A, R, W>(prog: &Prog<E, A>, input: R, output: W) -> Result<(A, usize), RunError>
where
    E: EvalExp,
    A: Payload,
    R: BufRead,
    W: Write,
{
    let mut rt = Runtime::new(input, output);
    let result = interpret(&mut rt, prog)?;
    rt.output.flush()?;
    Ok((result, rt.lines_read))
}

/// Outcome of [`run_transcript`].
#[derive(Debug)]
pub struct Transcript<A> {
    pub output: String,
    pub outcome: Result<(A, usize), RunError>,
}

/// Runs `prog` on the given input lines, capturing output even when the run
/// fails part-way.
pub fn run_transcript<E: EvalExp, A: Payload>(
    prog: &Prog<E, A>,
    lines: &[impl AsRef<str>],
) -> Transcript<A> {
    let input: String = lines.iter().map(|l| format!("{}\n", l.as_ref())).collect();
    let mut output = Vec::new();
    let outcome = run(prog, input.as_bytes(), &mut output);
    Transcript {
        output: String::from_utf8(output).expect("programs only print UTF-8"),
        outcome,
    }
}
