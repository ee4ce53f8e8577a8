use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Elementary functions admitted by the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 5] = [Func::Sin, Func::Cos, Func::Exp, Func::Log, Func::Sqrt];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(BigRational),
    /// Index into the chart's coordinate list.
    Var(usize),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Neg(Expr),
    Pow(Expr, i32),
    Call(Func, Expr),
}

/// Immutable, cheaply clonable expression tree over chart coordinates.
///
/// The constructors fold constant subtrees and the usual 0/1 identities;
/// nothing else is simplified.
#[derive(Clone, PartialEq)]
pub struct Expr(Arc<Node>);

/// Ordered coordinate names of a chart.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chart {
    names: Vec<String>,
}

impl Chart {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        Chart {
            names: names.into_iter().map(Into::into).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

impl Expr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    fn wrap(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn constant(value: BigRational) -> Expr {
        Expr::wrap(Node::Const(value))
    }

    pub fn int(value: i64) -> Expr {
        Expr::constant(BigRational::from_integer(BigInt::from(value)))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn var(index: usize) -> Expr {
        Expr::wrap(Node::Var(index))
    }

    pub fn as_const(&self) -> Option<&BigRational> {
        match self.node() {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    fn is_const_zero(&self) -> bool {
        self.as_const().is_some_and(Zero::is_zero)
    }

    fn is_const_one(&self) -> bool {
        self.as_const().is_some_and(One::is_one)
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::constant(x + y),
            _ if a.is_const_zero() => b,
            _ if b.is_const_zero() => a,
            _ => Expr::wrap(Node::Add(a, b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::constant(x - y),
            _ if b.is_const_zero() => a,
            _ if a.is_const_zero() => Expr::neg(b),
            _ => Expr::wrap(Node::Sub(a, b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::constant(x * y),
            _ if a.is_const_zero() || b.is_const_zero() => Expr::zero(),
            _ if a.is_const_one() => b,
            _ if b.is_const_one() => a,
            _ => Expr::wrap(Node::Mul(a, b)),
        }
    }

    /// Division by a literal zero is kept unevaluated so that evaluation
    /// reports the pole.
    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if !y.is_zero() => Expr::constant(x / y),
            _ if b.is_const_one() => a,
            _ if a.is_const_zero() && !b.is_const_zero() => Expr::zero(),
            _ => Expr::wrap(Node::Div(a, b)),
        }
    }

    pub fn neg(a: Expr) -> Expr {
        match a.node() {
            Node::Const(c) => Expr::constant(-c),
            Node::Neg(inner) => inner.clone(),
            _ => Expr::wrap(Node::Neg(a)),
        }
    }

    pub fn pow(a: Expr, k: i32) -> Expr {
        if k == 0 {
            return Expr::one();
        }
        if k == 1 {
            return a;
        }
        match a.as_const() {
            Some(c) if !(c.is_zero() && k < 0) => Expr::constant(num_traits::pow::Pow::pow(c, k)),
            _ => Expr::wrap(Node::Pow(a, k)),
        }
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        if let Some(c) = a.as_const() {
            let folded = match f {
                Func::Sin if c.is_zero() => Some(Expr::zero()),
                Func::Cos | Func::Exp if c.is_zero() => Some(Expr::one()),
                Func::Log if c.is_one() => Some(Expr::zero()),
                _ => None,
            };
            if let Some(e) = folded {
                return e;
            }
        }
        Expr::wrap(Node::Call(f, a))
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self.node() {
            Node::Const(_) => None,
            Node::Var(i) => Some(*i),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.max_var().max(b.max_var())
            }
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => a.max_var(),
        }
    }

    /// Number of nodes in the tree (shared subtrees counted repeatedly).
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Const(_) | Node::Var(_) => 1,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                1 + a.size() + b.size()
            }
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => 1 + a.size(),
        }
    }

    /// Renders the expression with the chart's coordinate names. The output
    /// parses back to a structurally equal tree.
    pub fn display<'a>(&'a self, chart: &'a Chart) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, chart }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.node().fmt(f)
    }
}

pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    chart: &'a Chart,
}

// Binding strengths used by the printer.
const PREC_SUM: u8 = 1;
const PREC_PRODUCT: u8 = 2;
const PREC_UNARY: u8 = 3;
const PREC_POWER: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(node: &Node) -> u8 {
    match node {
        Node::Add(..) | Node::Sub(..) => PREC_SUM,
        Node::Mul(..) | Node::Div(..) => PREC_PRODUCT,
        Node::Neg(_) => PREC_UNARY,
        Node::Pow(..) => PREC_POWER,
        Node::Const(_) | Node::Var(_) | Node::Call(..) => PREC_ATOM,
    }
}

impl ExprDisplay<'_> {
    fn write(&self, f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
        let node = e.node();
        let parens = precedence(node) < min_prec;
        if parens {
            f.write_str("(")?;
        }
        match node {
            Node::Const(c) => {
                if c.is_integer() && !c.is_negative() {
                    write!(f, "{}", c.numer())?;
                } else {
                    write!(f, "({c})")?;
                }
            }
            Node::Var(i) => match self.chart.names().get(*i) {
                Some(name) => f.write_str(name)?,
                None => write!(f, "?{i}")?,
            },
            Node::Add(a, b) | Node::Sub(a, b) => {
                self.write(f, a, PREC_SUM)?;
                f.write_str(if matches!(node, Node::Add(..)) { " + " } else { " - " })?;
                self.write(f, b, PREC_PRODUCT)?;
            }
            Node::Mul(a, b) | Node::Div(a, b) => {
                self.write(f, a, PREC_PRODUCT)?;
                f.write_str(if matches!(node, Node::Mul(..)) { "*" } else { "/" })?;
                self.write(f, b, PREC_UNARY)?;
            }
            Node::Neg(a) => {
                f.write_str("-")?;
                self.write(f, a, PREC_UNARY)?;
            }
            Node::Pow(a, k) => {
                self.write(f, a, PREC_ATOM)?;
                if *k < 0 {
                    write!(f, "^({k})")?;
                } else {
                    write!(f, "^{k}")?;
                }
            }
            Node::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                self.write(f, a, 0)?;
                f.write_str(")")?;
            }
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.expr, 0)
    }
}
