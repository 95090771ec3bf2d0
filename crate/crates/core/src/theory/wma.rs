use num_traits::Zero;

use super::BlockPartition;
use crate::arith::Rational;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum WmaNormalization {
    /// Divide by `3k`.
    #[default]
    ThirdK,
    /// Divide by the total weight, which makes the average idempotent.
    WeightSum,
}

/// Coordinate weights: 1 on `1..=⌊k/4⌋`, 2 on `⌊k/4⌋+1..=⌊3k/4⌋`, 1 after.
fn weights(k: usize) -> Vec<u32> {
    let (lo, hi) = (k / 4, 3 * k / 4);
    (1..=k).map(|i| if i > lo && i <= hi { 2 } else { 1 }).collect()
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 || k.is_multiple_of(2) {
        return Err(Error::BadArity(format!("wma needs an odd positive arity, got {k}")));
    }
    Ok(())
}

/// The 2-period weighted centred moving average.
pub fn wma(k: usize, inputs: &[Rational], normalization: WmaNormalization) -> Result<Rational> {
    check_k(k)?;
    if inputs.len() != k {
        return Err(Error::BadArity(format!(
            "wma of arity {k} given {} inputs",
            inputs.len()
        )));
    }
    let w = weights(k);
    let sum = inputs.iter().zip(&w).fold(Rational::zero(), |acc, (x, &wi)| {
        acc + x * Rational::from_integer(wi.into())
    });
    let divisor: u64 = match normalization {
        WmaNormalization::ThirdK => 3 * k as u64,
        WmaNormalization::WeightSum => w.iter().map(|&x| x as u64).sum(),
    };
    Ok(sum / Rational::from_integer(divisor.into()))
}

/// Weight-1 coordinates and weight-2 coordinates as a block partition;
/// empty classes are dropped.
pub fn wma_blocks(k: usize) -> Result<BlockPartition> {
    check_k(k)?;
    let w = weights(k);
    let blocks: Vec<Vec<usize>> = [1, 2]
        .iter()
        .map(|&c| (0..k).filter(|&i| w[i] == c).collect::<Vec<_>>())
        .filter(|b| !b.is_empty())
        .collect();
    BlockPartition::new(blocks)
}
