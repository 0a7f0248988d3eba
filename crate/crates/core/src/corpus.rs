//! The bundled example programs.

use crate::expr::lit;
use crate::front::*;
use crate::high::{iter, High, HighExpr};
use crate::low::{Low, LowExpr};
use crate::program::{Prog, Ref};

/// Reads four numbers and prints their sum.
pub fn sum_input() -> Prog<LowExpr, ()> {
    init_ref(lit(0)).bind(|r: Ref<i32>| {
        let acc = r.clone();
        let ask = for_loop(lit(4), move |_| {
            let acc = acc.clone();
            print_str(" > ")
                .then(read_input())
                .bind(move |n: Low<i32>| modify_ref(&acc, move |x| x + n.clone()))
        });
        print_str("Please enter 4 numbers\n")
            .then(ask)
            .then(print_str("The sum of your numbers is "))
            .then(get_ref(&r))
            .bind(|s| write_output(s).then(print_str(".\n")))
    })
}

/// Reads `m` and `n` and prints `m^n`, computed as a pure iteration.
pub fn power_input() -> Prog<HighExpr, ()> {
    let prompt = || print_str(" > ").then(read_input());
    print_str("Please enter two numbers\n")
        .then(prompt())
        .bind(move |m: High<i32>| {
            prompt().bind(move |n: High<i32>| {
                let m2 = m.clone();
                print_str("Here's a fact: ")
                    .then(write_output(m.clone()))
                    .then(print_str("^"))
                    .then(write_output(n.clone()))
                    .then(print_str(" = "))
                    .then(write_output(iter(n, lit(1), move |x| x * m2.clone())))
                    .then(print_str(".\n"))
            })
        })
}

#[derive(Clone)]
pub enum ExampleProgram {
    Low(Prog<LowExpr, ()>),
    High(Prog<HighExpr, ()>),
}

#[derive(Clone)]
pub struct Example {
    pub name: &'static str,
    pub program: ExampleProgram,
}

/// All examples, sorted by name.
pub fn corpus() -> Vec<Example> {
    let mut examples = vec![
        Example {
            name: "sumInput",
            program: ExampleProgram::Low(sum_input()),
        },
        Example {
            name: "powerInput",
            program: ExampleProgram::High(power_input()),
        },
    ];
    examples.sort_by_key(|e| e.name);
    examples
}

pub fn find(name: &str) -> Option<Example> {
    corpus().into_iter().find(|e| e.name == name)
}
