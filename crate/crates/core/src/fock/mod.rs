//! Truncated multimode Fock-space engine.
//!
//! States are dense complex tensors indexed by per-mode photon numbers, with
//! each mode truncated at its own cutoff (maximum Fock index, inclusive).
//! Probability that falls outside the truncated space is never silently
//! renormalized away: it is accumulated in [`MultiModeState::norm_leak`].

mod density;
mod ladder;
mod state;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use density::DensityOperator;
pub use ladder::{Ladder, LadderKind, Monomial};
pub use state::MultiModeState;

pub use num_complex::Complex64;

use crate::error::Error;

/// Symbolic optical mode names.
///
/// `A`/`B` carry the two-mode squeezed vacuum, `E`/`F` are Eve's purifying
/// pair, `EPrime` is the vacuum environment of the pure-loss channel, `C` and
/// `CPrime` are the scissors ancillae and `D` the subtraction tap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModeLabel {
    A,
    B,
    E,
    F,
    #[serde(rename = "Eprime")]
    EPrime,
    C,
    #[serde(rename = "Cprime")]
    CPrime,
    D,
}

impl ModeLabel {
    pub const ALL: [ModeLabel; 8] = [
        ModeLabel::A,
        ModeLabel::B,
        ModeLabel::E,
        ModeLabel::F,
        ModeLabel::EPrime,
        ModeLabel::C,
        ModeLabel::CPrime,
        ModeLabel::D,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModeLabel::A => "A",
            ModeLabel::B => "B",
            ModeLabel::E => "E",
            ModeLabel::F => "F",
            ModeLabel::EPrime => "Eprime",
            ModeLabel::C => "C",
            ModeLabel::CPrime => "Cprime",
            ModeLabel::D => "D",
        }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModeLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" => Ok(ModeLabel::A),
            "B" => Ok(ModeLabel::B),
            "E" => Ok(ModeLabel::E),
            "F" => Ok(ModeLabel::F),
            "Eprime" | "E'" | "EPrime" => Ok(ModeLabel::EPrime),
            "C" => Ok(ModeLabel::C),
            "Cprime" | "C'" | "CPrime" => Ok(ModeLabel::CPrime),
            "D" => Ok(ModeLabel::D),
            other => Err(Error::Config(format!("unknown mode label '{other}'"))),
        }
    }
}

/// Row-major strides for a list of per-axis dimensions (last axis fastest).
pub(crate) fn strides_for(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    strides
}

/// Reorders the axes of a row-major tensor: output axis `k` is input axis `order[k]`.
pub(crate) fn permute_axes(data: &[Complex64], dims: &[usize], order: &[usize]) -> Vec<Complex64> {
    debug_assert_eq!(dims.len(), order.len());
    let in_strides = strides_for(dims);
    let out_dims: Vec<usize> = order.iter().map(|&k| dims[k]).collect();
    let gather: Vec<usize> = order.iter().map(|&k| in_strides[k]).collect();
    let mut out = Vec::with_capacity(data.len());
    let mut digits = vec![0usize; out_dims.len()];
    let mut src = 0usize;
    for _ in 0..data.len() {
        out.push(data[src]);
        // odometer increment over output axes
        for axis in (0..out_dims.len()).rev() {
            digits[axis] += 1;
            src += gather[axis];
            if digits[axis] < out_dims[axis] {
                break;
            }
            src -= gather[axis] * out_dims[axis];
            digits[axis] = 0;
        }
    }
    out
}
