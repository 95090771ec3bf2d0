//! Fractional homomorphisms, promise fractional polymorphisms and the
//! multiset constructions that connect them to the relaxations.
//!
//! Every checker enumerates exhaustively and reports the lexicographically
//! least violated inequality. Enumerations are bounded by a step cap
//! (see [`crate::guard`]).

mod check;
mod compose;
mod multiset;
mod search;
mod wma;

pub use check::{
    check_block_symmetry, check_fractional_homomorphism, check_fractional_homomorphism_capped, check_promise_fpol,
    check_promise_fpol_capped, symmetrize_input_weights, CheckOutcome, Violation,
};
pub use compose::compose_sampling_fpol;
pub use multiset::{
    block_multiset_structure, block_multiset_structure_capped, fpol_from_frachom, lift_fpol_to_frachom,
    BlockMultisetDomain,
};
pub use search::{find_frachom_lp, find_promise_fpol_lp, find_promise_fpol_lp_capped};
pub use wma::{wma, wma_blocks, WmaNormalization};

use num_traits::Signed;

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::measure::{FiniteMeasure, OperationTable};

/// A probability measure over maps `D → C` (unary operation tables).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractionalHomomorphism {
    pub input: Vec<String>,
    pub output: Vec<String>,
    pub measure: FiniteMeasure<OperationTable>,
}

impl FractionalHomomorphism {
    pub fn new(input: Vec<String>, output: Vec<String>, measure: FiniteMeasure<OperationTable>) -> Result<Self> {
        for g in measure.support() {
            if g.arity() != 1 || g.input_size() != input.len() || g.output_size() != output.len() {
                return Err(Error::DomainMismatch(
                    "fractional homomorphism support must be maps input → output".into(),
                ));
            }
        }
        Ok(FractionalHomomorphism { input, output, measure })
    }

    pub fn identity(labels: Vec<String>) -> Self {
        let id = OperationTable::identity(labels.len());
        FractionalHomomorphism {
            output: labels.clone(),
            input: labels,
            measure: FiniteMeasure::point_mass(id),
        }
    }
}

/// `(ω_I, ω_O)`: weights on the `m` projections and a measure over
/// `m`-ary operations `D^m → C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PromiseFractionalPolymorphism {
    pub arity: usize,
    pub input: Vec<String>,
    pub output: Vec<String>,
    pub input_weights: Vec<Rational>,
    pub output_measure: FiniteMeasure<OperationTable>,
}

impl PromiseFractionalPolymorphism {
    pub fn new(
        arity: usize,
        input: Vec<String>,
        output: Vec<String>,
        input_weights: Vec<Rational>,
        output_measure: FiniteMeasure<OperationTable>,
    ) -> Result<Self> {
        if arity == 0 {
            return Err(Error::BadArity("polymorphism arity must be positive".into()));
        }
        if input_weights.len() != arity {
            return Err(Error::InvalidMeasure(format!(
                "{} input weights for arity {arity}",
                input_weights.len()
            )));
        }
        if input_weights.iter().any(|w| w.is_negative()) {
            return Err(Error::InvalidMeasure("negative input weight".into()));
        }
        let total: Rational = input_weights.iter().cloned().sum();
        if total != Rational::from_integer(1.into()) {
            return Err(Error::InvalidMeasure("input weights do not sum to 1".into()));
        }
        for g in output_measure.support() {
            if g.arity() != arity || g.input_size() != input.len() || g.output_size() != output.len() {
                return Err(Error::DomainMismatch(format!(
                    "support table is not a {arity}-ary map input → output"
                )));
            }
        }
        Ok(PromiseFractionalPolymorphism {
            arity,
            input,
            output,
            input_weights,
            output_measure,
        })
    }

    /// Uniform `ω_I`.
    pub fn with_uniform_inputs(
        arity: usize,
        input: Vec<String>,
        output: Vec<String>,
        output_measure: FiniteMeasure<OperationTable>,
    ) -> Result<Self> {
        PromiseFractionalPolymorphism::new(arity, input, output, uniform_weights(arity), output_measure)
    }

    pub fn has_uniform_inputs(&self) -> bool {
        self.input_weights.iter().all(|w| *w == self.input_weights[0])
    }
}

pub(crate) fn uniform_weights(m: usize) -> Vec<Rational> {
    vec![Rational::new(1.into(), m.into()); m]
}

/// Disjoint nonempty blocks covering `{0..m}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockPartition {
    blocks: Vec<Vec<usize>>,
    arity: usize,
}

impl BlockPartition {
    pub fn new(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let arity: usize = blocks.iter().map(Vec::len).sum();
        let mut seen = vec![false; arity];
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::PreconditionViolated("empty block".into()));
            }
            for &i in b {
                if i >= arity || seen[i] {
                    return Err(Error::PreconditionViolated(format!(
                        "blocks do not partition 0..{arity}"
                    )));
                }
                seen[i] = true;
            }
        }
        let blocks = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        Ok(BlockPartition { blocks, arity })
    }

    /// Consecutive blocks of the given sizes.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        let mut start = 0;
        let mut blocks = Vec::with_capacity(sizes.len());
        for &s in sizes {
            blocks.push((start..start + s).collect());
            start += s;
        }
        BlockPartition::new(blocks)
    }

    /// A single block: full symmetry.
    pub fn single(m: usize) -> Result<Self> {
        BlockPartition::from_sizes(&[m])
    }

    /// Blocks of sizes `L + 1` and `L` on `2L + 1` coordinates.
    pub fn two_block(l: usize) -> Result<Self> {
        if l == 0 {
            BlockPartition::from_sizes(&[1])
        } else {
            BlockPartition::from_sizes(&[l + 1, l])
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }
}
