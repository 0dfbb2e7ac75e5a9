//! Fixed-capacity stack evaluation of prefix programs.
//!
//! Programs are stored operator-first (prefix order) and evaluated by
//! iterating the node list in reverse with a small value stack: terminals are
//! pushed, a function pops its operands (first pop = first operand) and pushes
//! the result. A stack of capacity `m` can evaluate any tree of depth at most
//! `m - 1` when the maximum function arity is 2, so evaluation enforces
//! `program.depth <= capacity - 1` up front.
//!
//! Every catalog function is total: for finite inputs the output is always a
//! finite real. Functions with singularities (`div`, `log`, `inv`, ...) use
//! protected variants, and all outputs saturate at [`OUTPUT_LIMIT`].

use serde::{Deserialize, Serialize};

use crate::ast::{Node, Program};
use crate::data::Dataset;
use crate::error::{Error, Result};

/// Operand magnitudes below this are treated as zero by protected functions.
pub const PROTECT_EPS: f64 = 1e-3;

/// Magnitude at which every function output saturates.
pub const OUTPUT_LIMIT: f64 = 1e30;

/// The function catalog. Arities are 1 or 2; all entries are total over the
/// finite reals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Opcode {
    Add,
    Sub,
    Mul,
    Div,
    Sin,
    Cos,
    Tan,
    Abs,
    Neg,
    Sqrt,
    Log,
    Exp,
    Inv,
    Cube,
    Square,
    Min,
    Max,
    Pow,
    Tanh,
    Sinh,
    Cosh,
    Asin,
    Acos,
    Atan,
}

impl Opcode {
    /// Every catalog entry, in a stable order.
    pub const ALL: [Opcode; 24] = [
        Opcode::Add,
        Opcode::Sub,
        Opcode::Mul,
        Opcode::Div,
        Opcode::Sin,
        Opcode::Cos,
        Opcode::Tan,
        Opcode::Abs,
        Opcode::Neg,
        Opcode::Sqrt,
        Opcode::Log,
        Opcode::Exp,
        Opcode::Inv,
        Opcode::Cube,
        Opcode::Square,
        Opcode::Min,
        Opcode::Max,
        Opcode::Pow,
        Opcode::Tanh,
        Opcode::Sinh,
        Opcode::Cosh,
        Opcode::Asin,
        Opcode::Acos,
        Opcode::Atan,
    ];

    pub fn arity(self) -> usize {
        match self {
            Opcode::Add
            | Opcode::Sub
            | Opcode::Mul
            | Opcode::Div
            | Opcode::Min
            | Opcode::Max
            | Opcode::Pow => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Opcode::Add => "add",
            Opcode::Sub => "sub",
            Opcode::Mul => "mul",
            Opcode::Div => "div",
            Opcode::Sin => "sin",
            Opcode::Cos => "cos",
            Opcode::Tan => "tan",
            Opcode::Abs => "abs",
            Opcode::Neg => "neg",
            Opcode::Sqrt => "sqrt",
            Opcode::Log => "log",
            Opcode::Exp => "exp",
            Opcode::Inv => "inv",
            Opcode::Cube => "cube",
            Opcode::Square => "square",
            Opcode::Min => "min",
            Opcode::Max => "max",
            Opcode::Pow => "pow",
            Opcode::Tanh => "tanh",
            Opcode::Sinh => "sinh",
            Opcode::Cosh => "cosh",
            Opcode::Asin => "asin",
            Opcode::Acos => "acos",
            Opcode::Atan => "atan",
        }
    }

    /// Applies the function to its operands. `args.len()` must equal the
    /// arity. Protected semantics:
    ///
    /// * `div(a, b)` is `1.0` when `|b| < PROTECT_EPS`, else `a / b`
    /// * `sqrt(x)` is `sqrt(|x|)`
    /// * `log(x)` is `0.0` when `|x| < PROTECT_EPS`, else `ln|x|`
    /// * `inv(x)` is `1.0` when `|x| < PROTECT_EPS`, else `1 / x`
    /// * `pow(a, b)` is `|a|^b`
    /// * `asin`/`acos` clamp their argument to `[-1, 1]`
    ///
    /// Every result saturates at `±OUTPUT_LIMIT`.
    pub fn apply(self, args: &[f64]) -> f64 {
        debug_assert_eq!(args.len(), self.arity(), "{}: wrong operand count", self.name());
        let v = match self {
            Opcode::Add => args[0] + args[1],
            Opcode::Sub => args[0] - args[1],
            Opcode::Mul => args[0] * args[1],
            Opcode::Div => {
                if args[1].abs() < PROTECT_EPS {
                    1.0
                } else {
                    args[0] / args[1]
                }
            }
            Opcode::Sin => args[0].sin(),
            Opcode::Cos => args[0].cos(),
            Opcode::Tan => args[0].tan(),
            Opcode::Abs => args[0].abs(),
            Opcode::Neg => -args[0],
            Opcode::Sqrt => args[0].abs().sqrt(),
            Opcode::Log => {
                if args[0].abs() < PROTECT_EPS {
                    0.0
                } else {
                    args[0].abs().ln()
                }
            }
            Opcode::Exp => args[0].exp(),
            Opcode::Inv => {
                if args[0].abs() < PROTECT_EPS {
                    1.0
                } else {
                    1.0 / args[0]
                }
            }
            Opcode::Cube => args[0] * args[0] * args[0],
            Opcode::Square => args[0] * args[0],
            Opcode::Min => args[0].min(args[1]),
            Opcode::Max => args[0].max(args[1]),
            Opcode::Pow => args[0].abs().powf(args[1]),
            Opcode::Tanh => args[0].tanh(),
            Opcode::Sinh => args[0].sinh(),
            Opcode::Cosh => args[0].cosh(),
            Opcode::Asin => args[0].clamp(-1.0, 1.0).asin(),
            Opcode::Acos => args[0].clamp(-1.0, 1.0).acos(),
            Opcode::Atan => args[0].atan(),
        };
        saturate(v)
    }
}

impl std::fmt::Display for Opcode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn saturate(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(-OUTPUT_LIMIT, OUTPUT_LIMIT)
    }
}

/// Value stack with a fixed capacity. Push on full and pop on empty are
/// reported errors, never silent corruption.
#[derive(Debug, Clone)]
pub struct EvalStack {
    slots: Vec<f64>,
    top: usize,
}

impl EvalStack {
    pub fn new(capacity: usize) -> Self {
        Self {
            slots: vec![0.0; capacity],
            top: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    pub fn len(&self) -> usize {
        self.top
    }

    pub fn is_empty(&self) -> bool {
        self.top == 0
    }

    pub fn clear(&mut self) {
        self.top = 0;
    }

    #[inline]
    pub fn push(&mut self, v: f64) -> Result<()> {
        if self.top == self.slots.len() {
            return Err(Error::StackOverflow {
                capacity: self.slots.len(),
            });
        }
        self.slots[self.top] = v;
        self.top += 1;
        Ok(())
    }

    #[inline]
    pub fn pop(&mut self) -> Result<f64> {
        if self.top == 0 {
            return Err(Error::StackUnderflow);
        }
        self.top -= 1;
        Ok(self.slots[self.top])
    }
}

/// Evaluates `program` on a single feature row.
pub fn eval_row(program: &Program, row: &[f64], stack_capacity: usize) -> Result<f64> {
    let mut stack = EvalStack::new(stack_capacity);
    eval_with(program, row.len(), |i| row.get(i).copied(), &mut stack)
}

fn eval_with<F>(program: &Program, n_features: usize, fetch: F, stack: &mut EvalStack) -> Result<f64>
where
    F: Fn(usize) -> Option<f64>,
{
    if program.depth + 1 > stack.capacity() {
        return Err(Error::StackOverflow {
            capacity: stack.capacity(),
        });
    }
    stack.clear();
    for node in program.nodes.iter().rev() {
        match *node {
            Node::Const(v) => stack.push(v)?,
            Node::Var(i) => {
                let v = fetch(i).ok_or(Error::VariableOutOfRange {
                    index: i,
                    n_features,
                })?;
                stack.push(v)?;
            }
            Node::Func(op) => {
                let v = match op.arity() {
                    1 => {
                        let a = stack.pop()?;
                        op.apply(&[a])
                    }
                    _ => {
                        // First pop is the first (left) operand.
                        let a = stack.pop()?;
                        let b = stack.pop()?;
                        op.apply(&[a, b])
                    }
                };
                stack.push(v)?;
            }
        }
        debug_assert!(
            stack.len() <= program.depth + 1,
            "stack occupancy {} exceeded depth bound {}",
            stack.len(),
            program.depth + 1
        );
    }
    if stack.len() != 1 {
        return Err(Error::UnbalancedEvaluation { count: stack.len() });
    }
    stack.pop()
}

/// Evaluates every program on every dataset row.
///
/// Returns one prediction column per program (`result[j][i]` is program `j`
/// on row `i`). Work is partitioned per program across the current rayon
/// pool; the result is bit-identical regardless of worker count. The first
/// per-program error aborts the batch with the program index attached.
pub fn eval_batch(
    population: &[Program],
    data: &Dataset,
    stack_capacity: usize,
) -> Result<Vec<Vec<f64>>> {
    use rayon::prelude::*;

    let m = data.n_rows();
    let n_features = data.n_cols();
    let columns: Vec<Result<Vec<f64>>> = population
        .par_iter()
        .map(|program| {
            let mut stack = EvalStack::new(stack_capacity);
            let mut column = Vec::with_capacity(m);
            for row in 0..m {
                column.push(eval_with(
                    program,
                    n_features,
                    |i| data.columns().get(i).map(|c| c[row]),
                    &mut stack,
                )?);
            }
            Ok(column)
        })
        .collect();

    columns
        .into_iter()
        .enumerate()
        .map(|(j, col)| col.map_err(|e| e.for_program(j)))
        .collect()
}
