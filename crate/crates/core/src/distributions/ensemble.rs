use std::fmt;
use std::str::FromStr;

use super::finite::{uniform_alt_pmf, uniform_rect_pmf, uniform_sym_pmf};
use super::limits::{limit_alt_pmf, limit_rect_pmf, limit_sym_pmf, Parity};
use super::pmf::CorankPmf;
use crate::algebra::Field;
use crate::error::{Error, Result};

/// The four uniform ensembles with closed-form corank laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ensemble {
    Square,
    /// n x (n + m).
    Rect(usize),
    Symmetric,
    Alternating,
}

impl Ensemble {
    pub fn name(self) -> &'static str {
        match self {
            Ensemble::Square => "square",
            Ensemble::Rect(_) => "rect",
            Ensemble::Symmetric => "symmetric",
            Ensemble::Alternating => "alternating",
        }
    }

    /// Exact corank law at size n.
    pub fn finite_pmf(self, n: usize, f: &Field) -> Result<CorankPmf> {
        match self {
            Ensemble::Square => Ok(uniform_rect_pmf(n, 0, f)),
            Ensemble::Rect(m) => Ok(uniform_rect_pmf(n, m, f)),
            Ensemble::Symmetric => Ok(uniform_sym_pmf(n, f)),
            Ensemble::Alternating => uniform_alt_pmf(n, f),
        }
    }

    /// Limiting corank law; `parity` selects the alternating branch.
    pub fn limit_pmf(self, f: &Field, parity: Parity, tol: f64) -> Result<CorankPmf> {
        match self {
            Ensemble::Square => Ok(super::limits::limit_square_pmf(f, tol)),
            Ensemble::Rect(m) => Ok(limit_rect_pmf(m, f, tol)),
            Ensemble::Symmetric => Ok(limit_sym_pmf(f, tol)),
            Ensemble::Alternating => limit_alt_pmf(f, parity, tol),
        }
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ensemble::Rect(m) => write!(f, "rect(m={m})"),
            e => f.write_str(e.name()),
        }
    }
}

impl FromStr for Ensemble {
    type Err = Error;

    /// `rect` parses with `m = 0`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "square" => Ok(Ensemble::Square),
            "rect" | "rectangular" => Ok(Ensemble::Rect(0)),
            "symmetric" | "sym" => Ok(Ensemble::Symmetric),
            "alternating" | "alt" => Ok(Ensemble::Alternating),
            _ => Err(Error::Parse(format!("unknown ensemble {s:?}"))),
        }
    }
}

impl FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            _ => Err(Error::Parse(format!("parity must be even or odd, got {s:?}"))),
        }
    }
}
