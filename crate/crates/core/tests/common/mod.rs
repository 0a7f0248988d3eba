//! Shared test support: a random program generator with a host-side oracle,
//! a fresh-name scanner and a small C compiler harness.
#![allow(dead_code)]

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use staged_edsl::high::{iter, let_in, High, HighExpr};
use staged_edsl::program::{Cmd, RawRef, RawVal, ValPayload};
use staged_edsl::*;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gen_lit(rng: &mut impl Rng) -> i32 {
    match rng.gen_range(0..10) {
        0 => *[i32::MIN, i32::MAX, i32::MIN + 1, i32::MAX - 1, 65536]
            .choose(rng)
            .unwrap(),
        1 => rng.gen(),
        _ => rng.gen_range(-10..=10),
    }
}

/// Loop and iteration counts, kept small so programs terminate quickly.
#[derive(Debug, Clone)]
pub enum GCount {
    Lit(i32),
    Small(usize),
    /// `c * 2`, the shape the unrolling transformation looks for.
    Twice(Box<GCount>),
    /// `2 * c`, which it must leave alone.
    TwiceFlipped(Box<GCount>),
}

#[derive(Debug, Clone)]
pub enum GInt {
    Lit(i32),
    Var(usize),
    Add(Box<GInt>, Box<GInt>),
    Mul(Box<GInt>, Box<GInt>),
    /// The body sees the shared value as the newest integer variable.
    Let(Box<GInt>, Box<GInt>),
    /// The step sees the state as the newest integer variable.
    Iter(GCount, Box<GInt>, Box<GInt>),
}

#[derive(Debug, Clone)]
pub enum GBool {
    Lit(bool),
    Var(usize),
    Not(Box<GBool>),
    EqInt(Box<GInt>, Box<GInt>),
    EqBool(Box<GBool>, Box<GBool>),
    LetInt(Box<GInt>, Box<GBool>),
    LetBool(Box<GBool>, Box<GBool>),
    Iter(GCount, Box<GBool>, Box<GBool>),
}

/// How many variables of each kind are in scope.
#[derive(Debug, Clone, Copy, Default)]
pub struct Shape {
    pub ints: usize,
    pub bools: usize,
    pub small: usize,
    pub int_refs: usize,
    pub bool_refs: usize,
}

impl Shape {
    fn with_int(mut self) -> Self {
        self.ints += 1;
        self
    }

    fn with_bool(mut self) -> Self {
        self.bools += 1;
        self
    }
}

pub fn gen_count(rng: &mut impl Rng, sh: Shape) -> GCount {
    let base = |rng: &mut _| {
        if sh.small > 0 && Rng::gen_bool(rng, 0.5) {
            GCount::Small(Rng::gen_range(rng, 0..sh.small))
        } else {
            GCount::Lit(Rng::gen_range(rng, -1..=4))
        }
    };
    match rng.gen_range(0..4) {
        0 => GCount::Twice(Box::new(base(rng))),
        1 => GCount::TwiceFlipped(Box::new(base(rng))),
        _ => base(rng),
    }
}

pub fn gen_int(rng: &mut impl Rng, depth: u32, sh: Shape) -> GInt {
    if depth == 0 || rng.gen_bool(0.25) {
        return if sh.ints > 0 && rng.gen_bool(0.6) {
            GInt::Var(rng.gen_range(0..sh.ints))
        } else {
            GInt::Lit(gen_lit(rng))
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..6) {
        0 | 1 => GInt::Add(Box::new(gen_int(rng, d, sh)), Box::new(gen_int(rng, d, sh))),
        2 => GInt::Mul(Box::new(gen_int(rng, d, sh)), Box::new(gen_int(rng, d, sh))),
        3 => GInt::Let(
            Box::new(gen_int(rng, d, sh)),
            Box::new(gen_int(rng, d, sh.with_int())),
        ),
        _ => GInt::Iter(
            gen_count(rng, sh),
            Box::new(gen_int(rng, d, sh)),
            Box::new(gen_int(rng, d, sh.with_int())),
        ),
    }
}

pub fn gen_bool(rng: &mut impl Rng, depth: u32, sh: Shape) -> GBool {
    if depth == 0 || rng.gen_bool(0.25) {
        return if sh.bools > 0 && rng.gen_bool(0.6) {
            GBool::Var(rng.gen_range(0..sh.bools))
        } else {
            GBool::Lit(rng.gen())
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..6) {
        0 => GBool::Not(Box::new(gen_bool(rng, d, sh))),
        1 => GBool::EqInt(Box::new(gen_int(rng, d, sh)), Box::new(gen_int(rng, d, sh))),
        2 => GBool::EqBool(Box::new(gen_bool(rng, d, sh)), Box::new(gen_bool(rng, d, sh))),
        3 => GBool::LetInt(
            Box::new(gen_int(rng, d, sh)),
            Box::new(gen_bool(rng, d, sh.with_int())),
        ),
        4 => GBool::LetBool(
            Box::new(gen_bool(rng, d, sh)),
            Box::new(gen_bool(rng, d, sh.with_bool())),
        ),
        _ => GBool::Iter(
            gen_count(rng, sh),
            Box::new(gen_bool(rng, d, sh)),
            Box::new(gen_bool(rng, d, sh.with_bool())),
        ),
    }
}

/// Host values for the oracle evaluator.
#[derive(Debug, Clone, Default)]
pub struct Values {
    pub ints: Vec<i32>,
    pub bools: Vec<bool>,
    pub small: Vec<i32>,
}

impl GCount {
    pub fn oracle(&self, env: &Values) -> i32 {
        match self {
            GCount::Lit(n) => *n,
            GCount::Small(i) => env.small[*i],
            GCount::Twice(c) | GCount::TwiceFlipped(c) => c.oracle(env).wrapping_mul(2),
        }
    }

    pub fn to_high(&self, sc: &Scope) -> High<i32> {
        match self {
            GCount::Lit(n) => lit(*n),
            GCount::Small(i) => sc.small[*i].clone(),
            GCount::Twice(c) => c.to_high(sc) * lit(2),
            GCount::TwiceFlipped(c) => lit(2) * c.to_high(sc),
        }
    }
}

fn pushed<T: Clone>(xs: &[T], x: T) -> Vec<T> {
    let mut v = xs.to_vec();
    v.push(x);
    v
}

impl GInt {
    pub fn oracle(&self, env: &Values) -> i32 {
        match self {
            GInt::Lit(n) => *n,
            GInt::Var(i) => env.ints[*i],
            GInt::Add(a, b) => a.oracle(env).wrapping_add(b.oracle(env)),
            GInt::Mul(a, b) => a.oracle(env).wrapping_mul(b.oracle(env)),
            GInt::Let(s, body) => {
                let inner = Values {
                    ints: pushed(&env.ints, s.oracle(env)),
                    ..env.clone()
                };
                body.oracle(&inner)
            }
            GInt::Iter(n, init, step) => {
                let mut state = init.oracle(env);
                for _ in 0..n.oracle(env) {
                    let inner = Values {
                        ints: pushed(&env.ints, state),
                        ..env.clone()
                    };
                    state = step.oracle(&inner);
                }
                state
            }
        }
    }

    pub fn to_high(&self, sc: &Scope) -> High<i32> {
        match self {
            GInt::Lit(n) => lit(*n),
            GInt::Var(i) => sc.ints[*i].clone(),
            GInt::Add(a, b) => a.to_high(sc) + b.to_high(sc),
            GInt::Mul(a, b) => a.to_high(sc) * b.to_high(sc),
            GInt::Let(s, body) => {
                let (body, sc2) = (body.clone(), sc.clone());
                let_in(s.to_high(sc), move |x| body.to_high(&sc2.with_int(x)))
            }
            GInt::Iter(n, init, step) => {
                let (step, sc2) = (step.clone(), sc.clone());
                iter(n.to_high(sc), init.to_high(sc), move |x| step.to_high(&sc2.with_int(x)))
            }
        }
    }
}

impl GBool {
    pub fn oracle(&self, env: &Values) -> bool {
        match self {
            GBool::Lit(b) => *b,
            GBool::Var(i) => env.bools[*i],
            GBool::Not(a) => !a.oracle(env),
            GBool::EqInt(a, b) => a.oracle(env) == b.oracle(env),
            GBool::EqBool(a, b) => a.oracle(env) == b.oracle(env),
            GBool::LetInt(s, body) => body.oracle(&Values {
                ints: pushed(&env.ints, s.oracle(env)),
                ..env.clone()
            }),
            GBool::LetBool(s, body) => body.oracle(&Values {
                bools: pushed(&env.bools, s.oracle(env)),
                ..env.clone()
            }),
            GBool::Iter(n, init, step) => {
                let mut state = init.oracle(env);
                for _ in 0..n.oracle(env) {
                    state = step.oracle(&Values {
                        bools: pushed(&env.bools, state),
                        ..env.clone()
                    });
                }
                state
            }
        }
    }

    pub fn to_high(&self, sc: &Scope) -> High<bool> {
        match self {
            GBool::Lit(b) => lit(*b),
            GBool::Var(i) => sc.bools[*i].clone(),
            GBool::Not(a) => !a.to_high(sc),
            GBool::EqInt(a, b) => a.to_high(sc).equals(b.to_high(sc)),
            GBool::EqBool(a, b) => a.to_high(sc).equals(b.to_high(sc)),
            GBool::LetInt(s, body) => {
                let (body, sc2) = (body.clone(), sc.clone());
                let_in(s.to_high(sc), move |x| body.to_high(&sc2.with_int(x)))
            }
            GBool::LetBool(s, body) => {
                let (body, sc2) = (body.clone(), sc.clone());
                let_in(s.to_high(sc), move |x| body.to_high(&sc2.with_bool(x)))
            }
            GBool::Iter(n, init, step) => {
                let (step, sc2) = (step.clone(), sc.clone());
                iter(n.to_high(sc), init.to_high(sc), move |x| step.to_high(&sc2.with_bool(x)))
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum GStmt {
    NewInt(GInt),
    NewBool(GBool),
    GetInt(usize),
    GetBool(usize),
    SetInt(usize, GInt),
    SetBool(usize, GBool),
    /// The update sees the old contents as the newest integer variable.
    ModifyInt(usize, GInt),
    Read,
    Write(GInt),
    Print(String),
    For(GCount, Arc<Vec<GStmt>>),
}

/// Expressions and references in scope while building a program.
#[derive(Clone, Default)]
pub struct Scope {
    pub ints: Vec<High<i32>>,
    pub bools: Vec<High<bool>>,
    pub small: Vec<High<i32>>,
    pub int_refs: Vec<Ref<i32>>,
    pub bool_refs: Vec<Ref<bool>>,
}

impl Scope {
    fn with_int(&self, x: High<i32>) -> Scope {
        let mut s = self.clone();
        s.ints.push(x);
        s
    }

    fn with_bool(&self, x: High<bool>) -> Scope {
        let mut s = self.clone();
        s.bools.push(x);
        s
    }
}

const PRINT_CHARS: &[char] = &['a', 'Z', ' ', '>', '\n', '\t', '"', '\\', '?', '%', '=', '('];

fn gen_string(rng: &mut impl Rng) -> String {
    let len = rng.gen_range(0..5);
    (0..len).map(|_| *PRINT_CHARS.choose(rng).unwrap()).collect()
}

pub fn gen_block(rng: &mut impl Rng, len: usize, loop_depth: u32, sh: &mut Shape) -> Vec<GStmt> {
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        let stmt = match rng.gen_range(0..12) {
            0 => {
                sh.int_refs += 1;
                GStmt::NewInt(gen_int(rng, 2, *sh))
            }
            1 => {
                sh.bool_refs += 1;
                GStmt::NewBool(gen_bool(rng, 2, *sh))
            }
            2 if sh.int_refs > 0 => {
                sh.ints += 1;
                GStmt::GetInt(rng.gen_range(0..sh.int_refs))
            }
            3 if sh.bool_refs > 0 => {
                sh.bools += 1;
                GStmt::GetBool(rng.gen_range(0..sh.bool_refs))
            }
            4 if sh.int_refs > 0 => GStmt::SetInt(rng.gen_range(0..sh.int_refs), gen_int(rng, 3, *sh)),
            5 if sh.bool_refs > 0 => {
                GStmt::SetBool(rng.gen_range(0..sh.bool_refs), gen_bool(rng, 3, *sh))
            }
            6 if sh.int_refs > 0 => {
                GStmt::ModifyInt(rng.gen_range(0..sh.int_refs), gen_int(rng, 2, sh.with_int()))
            }
            7 => {
                sh.ints += 1;
                sh.small += 1;
                GStmt::Read
            }
            8 => GStmt::Write(gen_int(rng, 3, *sh)),
            9 => GStmt::Print(gen_string(rng)),
            10 | 11 if loop_depth < 2 => {
                let bound = gen_count(rng, *sh);
                let mut inner = *sh;
                inner.ints += 1;
                inner.small += 1;
                let n = rng.gen_range(1..=3);
                GStmt::For(bound, Arc::new(gen_block(rng, n, loop_depth + 1, &mut inner)))
            }
            _ => continue,
        };
        out.push(stmt);
    }
    out
}

/// A generated program together with enough input lines to run it.
#[derive(Debug, Clone)]
pub struct GenProgram {
    pub stmts: Arc<Vec<GStmt>>,
    pub inputs: Vec<String>,
}

pub fn gen_program(rng: &mut impl Rng) -> GenProgram {
    let len = rng.gen_range(3..=10);
    let stmts = gen_block(rng, len, 0, &mut Shape::default());
    let inputs = (0..4000).map(|_| rng.gen_range(-5..=9).to_string()).collect();
    GenProgram {
        stmts: Arc::new(stmts),
        inputs,
    }
}

type End = Arc<dyn Fn(Scope) -> Prog<HighExpr, Vec<RawVal>> + Send + Sync>;

impl GenProgram {
    /// The program; it ends by writing every integer reference and
    /// returning the contents of all references.
    pub fn build(&self) -> Prog<HighExpr, Vec<RawVal>> {
        build(self.stmts.clone(), 0, Scope::default(), Arc::new(epilogue))
    }
}

fn build(block: Arc<Vec<GStmt>>, i: usize, sc: Scope, end: End) -> Prog<HighExpr, Vec<RawVal>> {
    if i == block.len() {
        return end(sc);
    }
    let rest = {
        let (block, end) = (block.clone(), end.clone());
        move |sc: Scope| build(block.clone(), i + 1, sc, end.clone())
    };
    match &block[i] {
        GStmt::NewInt(e) => init_ref(e.to_high(&sc)).bind(move |r| {
            let mut sc = sc.clone();
            sc.int_refs.push(r);
            rest(sc)
        }),
        GStmt::NewBool(e) => init_ref(e.to_high(&sc)).bind(move |r| {
            let mut sc = sc.clone();
            sc.bool_refs.push(r);
            rest(sc)
        }),
        GStmt::GetInt(j) => get_ref(&sc.int_refs[*j]).bind(move |x| rest(sc.with_int(x))),
        GStmt::GetBool(j) => get_ref(&sc.bool_refs[*j]).bind(move |x| rest(sc.with_bool(x))),
        GStmt::SetInt(j, e) => set_ref(&sc.int_refs[*j], e.to_high(&sc)).then(rest(sc)),
        GStmt::SetBool(j, e) => set_ref(&sc.bool_refs[*j], e.to_high(&sc)).then(rest(sc)),
        GStmt::ModifyInt(j, e) => {
            let (e, sc2) = (e.clone(), sc.clone());
            modify_ref(&sc.int_refs[*j], move |x| e.to_high(&sc2.with_int(x))).then(rest(sc))
        }
        GStmt::Read => read_input().bind(move |x: High<i32>| {
            let mut sc = sc.with_int(x.clone());
            sc.small.push(x);
            rest(sc)
        }),
        GStmt::Write(e) => write_output(e.to_high(&sc)).then(rest(sc)),
        GStmt::Print(s) => print_str(s.clone()).then(rest(sc)),
        GStmt::For(bound, body) => {
            let (body, inner) = (body.clone(), sc.clone());
            for_loop(bound.to_high(&sc), move |i: High<i32>| {
                let mut s = inner.with_int(i.clone());
                s.small.push(i);
                build(body.clone(), 0, s, Arc::new(|_| Prog::ret(Vec::new()))).discard()
            })
            .then(rest(sc))
        }
    }
}

fn epilogue(sc: Scope) -> Prog<HighExpr, Vec<RawVal>> {
    let writes = sc.int_refs.iter().fold(print_str("\n"), |acc, r| {
        acc.then(get_ref(r).bind(write_output))
            .then(print_str(" "))
    });
    let refs: Vec<RawRef> = sc
        .int_refs
        .iter()
        .map(|r| r.raw().clone())
        .chain(sc.bool_refs.iter().map(|r| r.raw().clone()))
        .collect();
    writes.then(collect(Arc::new(refs), 0, Vec::new()))
}

fn collect(refs: Arc<Vec<RawRef>>, j: usize, acc: Vec<RawVal>) -> Prog<HighExpr, Vec<RawVal>> {
    if j == refs.len() {
        return Prog::ret(acc);
    }
    let rest = refs.clone();
    Prog::instr(Cmd::get_ref_raw(refs[j].clone())).bind(move |v: RawVal| {
        let mut acc = acc.clone();
        acc.push(v);
        collect(rest.clone(), j + 1, acc)
    })
}

/// Concrete values of a result list; `None` for symbolic entries.
pub fn values(vals: &[RawVal]) -> Vec<Option<Value>> {
    vals.iter()
        .map(|v| match v.payload() {
            ValPayload::Concrete(x) => Some(*x),
            ValPayload::Symbolic(_) => None,
        })
        .collect()
}

/// Checks that generated names appear first in the order 0, 1, 2, ... with
/// no index shared between a value and a reference. Quoted strings are
/// ignored.
pub fn check_fresh_names(text: &str) -> Result<usize, String> {
    let mut seen: Vec<String> = Vec::new();
    for line in text.lines() {
        let code = line.split('"').next().unwrap_or("");
        for token in code.split(|c: char| !c.is_ascii_alphanumeric()) {
            let mut chars = token.chars();
            let prefix = chars.next();
            let digits = chars.as_str();
            let is_name = matches!(prefix, Some('v') | Some('r'))
                && !digits.is_empty()
                && digits.chars().all(|c| c.is_ascii_digit());
            if is_name && !seen.iter().any(|s| s == token) {
                let expected = seen.len().to_string();
                if digits != expected {
                    return Err(format!("`{token}` introduced where index {expected} was due"));
                }
                seen.push(token.to_string());
            }
        }
    }
    Ok(seen.len())
}

/// Checks the indentation rule: four spaces per enclosing loop plus one.
pub fn check_indentation(text: &str) -> Result<(), String> {
    let mut depth = 0usize;
    for (n, line) in text.lines().enumerate() {
        let trimmed = line.trim_start_matches(' ');
        if trimmed == "end for" {
            depth = depth.checked_sub(1).ok_or("unbalanced `end for`")?;
        }
        let indent = line.len() - trimmed.len();
        if indent != 4 * (depth + 1) {
            return Err(format!("line {}: indent {indent} at depth {depth}", n + 1));
        }
        if trimmed.starts_with("for ") {
            depth += 1;
        }
    }
    if depth == 0 {
        Ok(())
    } else {
        Err("unclosed loop".into())
    }
}

/// The C compiler to use, if one can be run.
pub fn c_compiler() -> Option<String> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let ok = Command::new(&cc)
        .arg("--version")
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .status()
        .map(|s| s.success())
        .unwrap_or(false);
    ok.then_some(cc)
}

pub const C_FLAGS: &[&str] = &["-std=c99", "-Wall", "-Wextra", "-pedantic", "-Werror", "-O1"];

/// Compiles `source` into `dir/name`, returning the diagnostics on failure.
pub fn compile_c(cc: &str, source: &str, dir: &Path, name: &str) -> Result<PathBuf, String> {
    let src = dir.join(format!("{name}.c"));
    let exe = dir.join(name);
    std::fs::write(&src, source).map_err(|e| e.to_string())?;
    let out = Command::new(cc)
        .args(C_FLAGS)
        .arg(&src)
        .arg("-o")
        .arg(&exe)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() && out.stderr.is_empty() {
        Ok(exe)
    } else {
        Err(String::from_utf8_lossy(&out.stderr).into_owned())
    }
}

/// Runs an executable on `stdin`, returning its exit code and stdout.
pub fn run_exe(exe: &Path, stdin: &str) -> (Option<i32>, String) {
    let mut child = Command::new(exe)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .expect("spawn compiled program");
    // the program may exit without consuming all of its input
    let written = child.stdin.take().unwrap().write_all(stdin.as_bytes());
    if let Err(e) = written {
        assert_eq!(e.kind(), std::io::ErrorKind::BrokenPipe, "write stdin: {e}");
    }
    let out = child.wait_with_output().expect("wait for compiled program");
    (out.status.code(), String::from_utf8_lossy(&out.stdout).into_owned())
}

pub fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}
