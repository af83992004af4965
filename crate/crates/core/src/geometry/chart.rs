use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exprdsl::{is_reserved, Expr, ParseError};
use crate::linalg::MAX_DIM;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signature {
    Riemannian,
    /// One negative direction, convention (-,+,...,+).
    Lorentzian,
}

impl std::fmt::Display for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Signature::Riemannian => "riemannian",
            Signature::Lorentzian => "lorentzian",
        })
    }
}

/// Range of one coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Extent {
    /// Identified modulo the period; canonical representatives in `[0, period)`.
    Periodic(f64),
    Bounded(f64, f64),
    Unbounded,
}

/// A coordinate patch: dimension, signature, coordinate names and ranges.
#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    names: Arc<[String]>,
    signature: Signature,
    extents: Vec<Extent>,
}

fn valid_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Chart {
    pub fn new<S: AsRef<str>>(names: &[S], signature: Signature, extents: Vec<Extent>) -> Result<Chart> {
        let n = names.len();
        if !(2..=MAX_DIM).contains(&n) {
            return Err(Error::InvalidChart(format!("dimension {n} outside 2..={MAX_DIM}")));
        }
        if extents.len() != n {
            return Err(Error::InvalidChart(format!("{} extents for {n} coordinates", extents.len())));
        }
        // Lorentzian charts with n = 2 are allowed here; the hypersurface
        // analyses require n >= 3 themselves.
        for (i, name) in names.iter().enumerate() {
            let name = name.as_ref();
            if !valid_identifier(name) || is_reserved(name) {
                return Err(Error::InvalidChart(format!("`{name}` is not a usable coordinate name")));
            }
            if names[..i].iter().any(|m| m.as_ref() == name) {
                return Err(Error::InvalidChart(format!("duplicate coordinate `{name}`")));
            }
        }
        for (name, e) in names.iter().zip(&extents) {
            match *e {
                Extent::Periodic(p) if !(p.is_finite() && p > 0.0) => {
                    return Err(Error::InvalidChart(format!("period of `{}` must be positive", name.as_ref())));
                }
                Extent::Bounded(lo, hi) if !(lo.is_finite() && hi.is_finite() && lo < hi) => {
                    return Err(Error::InvalidChart(format!("bounds of `{}` must satisfy lo < hi", name.as_ref())));
                }
                _ => {}
            }
        }
        let names: Arc<[String]> = names.iter().map(|s| s.as_ref().to_string()).collect();
        Ok(Chart { names, signature, extents })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn extent(&self, axis: usize) -> Extent {
        self.extents[axis]
    }

    pub fn extents(&self) -> &[Extent] {
        &self.extents
    }

    pub fn axis(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Every coordinate periodic or bounded.
    pub fn is_compact(&self) -> bool {
        self.extents.iter().all(|e| !matches!(e, Extent::Unbounded))
    }

    /// Every coordinate periodic: the chart models a closed manifold.
    pub fn is_closed(&self) -> bool {
        self.extents.iter().all(|e| matches!(e, Extent::Periodic(_)))
    }

    pub fn parse(&self, src: &str) -> Result<Expr, ParseError> {
        Expr::parse_with(src, self.names.clone())
    }

    pub fn zero_expr(&self) -> Expr {
        Expr::constant(0.0, self.names.clone())
    }

    /// Wrap periodic coordinates into `[0, period)`.
    pub fn wrap(&self, p: &mut [f64]) {
        for (x, e) in p.iter_mut().zip(&self.extents) {
            if let Extent::Periodic(period) = *e {
                *x = x.rem_euclid(period);
                if *x >= period {
                    *x = 0.0;
                }
            }
        }
    }

    /// First bounded axis whose range does not contain `p`.
    pub fn violated_axis(&self, p: &[f64]) -> Option<usize> {
        self.extents.iter().zip(p).position(|(e, &x)| match *e {
            Extent::Bounded(lo, hi) => !(lo..=hi).contains(&x),
            _ => !x.is_finite(),
        })
    }
}
