use thiserror::Error;

use super::jet::Jet2;
use super::parse::{BinOp, Expr, Func, Node};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{function} is undefined at {argument}")]
    Domain { function: &'static str, argument: f64 },
    #[error("non-finite result while evaluating `{expr}`")]
    NonFinite { expr: String },
    #[error("expected {expected} coordinates, got {got}")]
    Arity { expected: usize, got: usize },
}

/// Arithmetic the evaluator needs; implemented by `f64` (values only) and
/// [`Jet2`] (value, gradient and Hessian).
trait Scalar: Copy {
    fn value(&self) -> f64;
    fn lift(&self, c: f64) -> Self;
    fn add(self, o: Self) -> Self;
    fn sub(self, o: Self) -> Self;
    fn mul(self, o: Self) -> Self;
    fn div(self, o: Self) -> Self;
    fn neg(self) -> Self;
    fn chain(self, f0: f64, f1: f64, f2: f64) -> Self;
    fn shift(self, c: f64) -> Self;
    fn scale(self, c: f64) -> Self;
    fn is_constant(&self) -> bool;
    fn finite(&self) -> bool;
}

impl Scalar for f64 {
    fn value(&self) -> f64 {
        *self
    }
    fn lift(&self, c: f64) -> Self {
        c
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn sub(self, o: Self) -> Self {
        self - o
    }
    fn mul(self, o: Self) -> Self {
        self * o
    }
    fn div(self, o: Self) -> Self {
        self / o
    }
    fn neg(self) -> Self {
        -self
    }
    fn chain(self, f0: f64, _f1: f64, _f2: f64) -> Self {
        f0
    }
    fn shift(self, c: f64) -> Self {
        self + c
    }
    fn scale(self, c: f64) -> Self {
        self * c
    }
    fn is_constant(&self) -> bool {
        true
    }
    fn finite(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Jet2 {
    fn value(&self) -> f64 {
        Jet2::value(self)
    }
    fn lift(&self, c: f64) -> Self {
        Jet2::constant(self.dim(), c)
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn sub(self, o: Self) -> Self {
        self - o
    }
    fn mul(self, o: Self) -> Self {
        self * o
    }
    fn div(self, o: Self) -> Self {
        self / o
    }
    fn neg(self) -> Self {
        -self
    }
    fn chain(self, f0: f64, f1: f64, f2: f64) -> Self {
        Jet2::chain(self, f0, f1, f2)
    }
    fn shift(self, c: f64) -> Self {
        Jet2::shift(self, c)
    }
    fn scale(self, c: f64) -> Self {
        Jet2::scale(self, c)
    }
    fn is_constant(&self) -> bool {
        Jet2::is_constant(self)
    }
    fn finite(&self) -> bool {
        self.is_finite()
    }
}

/// A partial result: subtrees free of coordinates stay plain numbers so
/// they never pay for jet arithmetic.
#[derive(Clone, Copy)]
enum Part<T> {
    Const(f64),
    Live(T),
}

fn eval_node<T: Scalar>(node: &Node, inputs: &[T]) -> Result<Part<T>, EvalError> {
    use Part::{Const, Live};
    Ok(match node {
        Node::Num(v) => Const(*v),
        Node::Var(i) => Live(inputs[*i]),
        Node::Neg(a) => match eval_node(a, inputs)? {
            Const(c) => Const(-c),
            Live(a) => Live(a.neg()),
        },
        Node::Binary(op, a, b) => {
            let a = eval_node(a, inputs)?;
            let b = eval_node(b, inputs)?;
            match (a, b) {
                (Const(a), Const(b)) => Const(binary(*op, a, b)?),
                (Live(a), Live(b)) => Live(binary(*op, a, b)?),
                (Live(a), Const(c)) => Live(match op {
                    BinOp::Add => a.shift(c),
                    BinOp::Sub => a.shift(-c),
                    BinOp::Mul => a.scale(c),
                    BinOp::Div => a.scale(1.0 / c),
                    BinOp::Pow => pow(a, a.lift(c))?,
                }),
                (Const(c), Live(b)) => Live(match op {
                    BinOp::Add => b.shift(c),
                    BinOp::Sub => b.neg().shift(c),
                    BinOp::Mul => b.scale(c),
                    BinOp::Div => {
                        let u = b.value();
                        let r = c / u;
                        b.chain(r, -r / u, 2.0 * r / (u * u))
                    }
                    BinOp::Pow => pow(b.lift(c), b)?,
                }),
            }
        }
        Node::Call(f, a) => match eval_node(a, inputs)? {
            Const(c) => Const(call(*f, c)?),
            Live(a) => Live(call(*f, a)?),
        },
    })
}

fn binary<T: Scalar>(op: BinOp, a: T, b: T) -> Result<T, EvalError> {
    Ok(match op {
        BinOp::Add => a.add(b),
        BinOp::Sub => a.sub(b),
        BinOp::Mul => a.mul(b),
        BinOp::Div => a.div(b),
        BinOp::Pow => pow(a, b)?,
    })
}

fn pow<T: Scalar>(base: T, exponent: T) -> Result<T, EvalError> {
    let u = base.value();
    let p = exponent.value();
    if exponent.is_constant() && p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
        let k = p as i32;
        return Ok(match k {
            0 => base.lift(1.0),
            1 => base,
            _ => {
                let kf = k as f64;
                base.chain(u.powi(k), kf * u.powi(k - 1), kf * (kf - 1.0) * u.powi(k - 2))
            }
        });
    }
    if u <= 0.0 {
        return Err(EvalError::Domain { function: "non-integer power", argument: u });
    }
    if exponent.is_constant() {
        return Ok(base.chain(u.powf(p), p * u.powf(p - 1.0), p * (p - 1.0) * u.powf(p - 2.0)));
    }
    // u^v = exp(v ln u) for a non-constant exponent.
    let ln = base.chain(u.ln(), 1.0 / u, -1.0 / (u * u));
    let e = exponent.mul(ln);
    let ev = e.value().exp();
    Ok(e.chain(ev, ev, ev))
}

fn call<T: Scalar>(f: Func, a: T) -> Result<T, EvalError> {
    let u = a.value();
    Ok(match f {
        Func::Sin => {
            let (s, c) = u.sin_cos();
            a.chain(s, c, -s)
        }
        Func::Cos => {
            let (s, c) = u.sin_cos();
            a.chain(c, -s, -c)
        }
        Func::Tan => {
            let t = u.tan();
            let d = 1.0 + t * t;
            a.chain(t, d, 2.0 * t * d)
        }
        Func::Exp => {
            let e = u.exp();
            a.chain(e, e, e)
        }
        Func::Log => {
            if u <= 0.0 {
                return Err(EvalError::Domain { function: "log", argument: u });
            }
            a.chain(u.ln(), 1.0 / u, -1.0 / (u * u))
        }
        Func::Sqrt => {
            if u < 0.0 {
                return Err(EvalError::Domain { function: "sqrt", argument: u });
            }
            let s = u.sqrt();
            a.chain(s, 0.5 / s, -0.25 / (s * s * s))
        }
        Func::Sinh => a.chain(u.sinh(), u.cosh(), u.sinh()),
        Func::Cosh => a.chain(u.cosh(), u.sinh(), u.cosh()),
        Func::Tanh => {
            let t = u.tanh();
            let d = 1.0 - t * t;
            a.chain(t, d, -2.0 * t * d)
        }
        Func::Abs => {
            let sign = if u > 0.0 {
                1.0
            } else if u < 0.0 {
                -1.0
            } else {
                0.0
            };
            a.chain(u.abs(), sign, 0.0)
        }
    })
}

impl Expr {
    fn check_arity(&self, got: usize) -> Result<(), EvalError> {
        if got != self.dim() {
            return Err(EvalError::Arity { expected: self.dim(), got });
        }
        Ok(())
    }

    fn finish<T: Scalar>(&self, r: T) -> Result<T, EvalError> {
        if r.finite() {
            Ok(r)
        } else {
            Err(EvalError::NonFinite { expr: self.to_string() })
        }
    }

    /// Value only.
    pub fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        self.check_arity(point.len())?;
        let r = match eval_node(&self.root, point)? {
            Part::Const(c) | Part::Live(c) => c,
        };
        self.finish(r)
    }

    /// Value, gradient and Hessian with respect to the chart coordinates.
    pub fn eval_jet2(&self, point: &[f64]) -> Result<Jet2, EvalError> {
        self.check_arity(point.len())?;
        let n = point.len();
        let mut seeds = [Jet2::constant(n, 0.0); crate::linalg::MAX_DIM];
        for (i, &x) in point.iter().enumerate() {
            seeds[i] = Jet2::variable(n, i, x);
        }
        self.eval_at_jets(&seeds[..n])
    }

    /// Evaluate with each coordinate replaced by a jet; the result is the
    /// jet of the composition.
    pub fn eval_at_jets(&self, inputs: &[Jet2]) -> Result<Jet2, EvalError> {
        self.check_arity(inputs.len())?;
        let r = match eval_node(&self.root, inputs)? {
            Part::Const(c) => Jet2::constant(inputs.len(), c),
            Part::Live(j) => j,
        };
        self.finish(r)
    }
}
