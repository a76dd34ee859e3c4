//! Positive functions of one real variable.
//!
//! A [`FunctionExpr`] is an immutable expression tree built either by
//! [`parse`] from text or by [`FamilySpec::instantiate`] from a named
//! parametric family. Evaluation enforces the codomain `(0, ∞)`: a result
//! that is not finite and strictly positive is reported as an error rather
//! than returned.

mod family;
mod parse;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use family::{Family, FamilyError, FamilySpec};
pub use parse::{parse, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Exp,
    Ln,
    Sqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var,
    Unary(UnaryOp, Box<Node>),
    Binary(BinaryOp, Box<Node>, Box<Node>),
}

/// Failure to evaluate a function at a point.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error in {op} at x = {x}")]
    Domain { op: &'static str, x: f64 },
    #[error("f({x}) = {value} is not a finite positive value")]
    Positivity { x: f64, value: f64 },
}

impl EvalError {
    /// The abscissa at which evaluation failed.
    pub fn abscissa(&self) -> f64 {
        match *self {
            EvalError::Domain { x, .. } | EvalError::Positivity { x, .. } => x,
        }
    }
}

/// An immutable expression for a function `f: [0, ∞) → (0, ∞)`.
///
/// Cloning is cheap; the tree is shared.
#[derive(Debug, Clone)]
pub struct FunctionExpr {
    root: Arc<Node>,
}

impl PartialEq for FunctionExpr {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root
    }
}

impl FunctionExpr {
    pub fn new(root: Node) -> Self {
        FunctionExpr { root: Arc::new(root) }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Evaluates `f(x)`, returning a finite value `> 0` or an error.
    pub fn evaluate(&self, x: f64) -> Result<f64, EvalError> {
        if !x.is_finite() {
            return Err(EvalError::Domain { op: "argument", x });
        }
        let value = eval_node(&self.root, x)?;
        if value.is_finite() && value > 0.0 {
            Ok(value)
        } else {
            Err(EvalError::Positivity { x, value })
        }
    }

    /// `ln f(x)`.
    pub fn ln_evaluate(&self, x: f64) -> Result<f64, EvalError> {
        self.evaluate(x).map(f64::ln)
    }
}

impl fmt::Display for FunctionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.root)
    }
}

/// Fully parenthesized output that [`parse`] reads back into an
/// extensionally equal tree.
impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Const(c) => {
                if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) {
                    write!(f, "(-{:?})", -c)
                } else {
                    write!(f, "{c:?}")
                }
            }
            Node::Var => f.write_str("x"),
            Node::Unary(UnaryOp::Neg, inner) => write!(f, "(-{inner})"),
            Node::Unary(op, inner) => {
                let name = match op {
                    UnaryOp::Exp => "exp",
                    UnaryOp::Ln => "ln",
                    UnaryOp::Sqrt => "sqrt",
                    UnaryOp::Neg => unreachable!(),
                };
                write!(f, "{name}({inner})")
            }
            Node::Binary(op, lhs, rhs) => {
                let sym = match op {
                    BinaryOp::Add => "+",
                    BinaryOp::Sub => "-",
                    BinaryOp::Mul => "*",
                    BinaryOp::Div => "/",
                    BinaryOp::Pow => "^",
                };
                write!(f, "({lhs}{sym}{rhs})")
            }
        }
    }
}

fn eval_node(node: &Node, x: f64) -> Result<f64, EvalError> {
    let v = match node {
        Node::Const(c) => *c,
        Node::Var => x,
        Node::Unary(op, inner) => {
            let u = eval_node(inner, x)?;
            match op {
                UnaryOp::Neg => -u,
                UnaryOp::Exp => u.exp(),
                UnaryOp::Ln => {
                    if u <= 0.0 {
                        return Err(EvalError::Domain { op: "ln", x });
                    }
                    u.ln()
                }
                UnaryOp::Sqrt => {
                    if u < 0.0 {
                        return Err(EvalError::Domain { op: "sqrt", x });
                    }
                    u.sqrt()
                }
            }
        }
        Node::Binary(op, lhs, rhs) => {
            let l = eval_node(lhs, x)?;
            let r = eval_node(rhs, x)?;
            match op {
                BinaryOp::Add => l + r,
                BinaryOp::Sub => l - r,
                BinaryOp::Mul => l * r,
                BinaryOp::Div => {
                    if r == 0.0 {
                        return Err(EvalError::Domain { op: "division", x });
                    }
                    l / r
                }
                BinaryOp::Pow => {
                    if l == 0.0 && r < 0.0 {
                        return Err(EvalError::Domain { op: "power", x });
                    }
                    l.powf(r)
                }
            }
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        let op = match node {
            Node::Unary(UnaryOp::Exp, _) => "exp",
            Node::Binary(BinaryOp::Pow, ..) => "power",
            _ => "arithmetic",
        };
        Err(EvalError::Domain { op, x })
    }
}
