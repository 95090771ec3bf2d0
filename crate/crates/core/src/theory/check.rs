use num_traits::Zero;
use serde::Serialize;

use super::{uniform_weights, BlockPartition, FractionalHomomorphism, PromiseFractionalPolymorphism};
use crate::arith::{ExtendedRational, Rational};
use crate::error::{Error, Result};
use crate::guard;
use crate::measure::OperationTable;
use crate::structure::{tuple_index, PromiseTemplate, Tuples, ValuedStructure};

/// The first inequality that fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub symbol: String,
    /// One tuple for a homomorphism check, `m` tuples for a polymorphism check.
    pub tuples: Vec<Vec<String>>,
    pub lhs: ExtendedRational,
    pub rhs: ExtendedRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub holds: bool,
    pub violation: Option<Violation>,
    /// Number of inequalities evaluated.
    pub checked: u128,
}

impl CheckOutcome {
    fn from_violation(violation: Option<Violation>, checked: u128) -> Self {
        CheckOutcome {
            holds: violation.is_none(),
            violation,
            checked,
        }
    }
}

fn labels_of(tuple: &[usize], labels: &[String]) -> Vec<String> {
    tuple.iter().map(|&a| labels[a].clone()).collect()
}

fn same_signature(a: &ValuedStructure, b: &ValuedStructure) -> Result<()> {
    if a.signature() != b.signature() {
        return Err(Error::DomainMismatch("structures have different signatures".into()));
    }
    Ok(())
}

pub fn check_fractional_homomorphism(
    chi: &FractionalHomomorphism,
    delta: &ValuedStructure,
    gamma: &ValuedStructure,
) -> Result<CheckOutcome> {
    check_fractional_homomorphism_capped(chi, delta, gamma, guard::default_cap())
}

/// `Σ_h χ(h)·γ^Γ(h(a)) ≤ γ^Δ(a)` for every symbol and tuple over `Δ`.
pub fn check_fractional_homomorphism_capped(
    chi: &FractionalHomomorphism,
    delta: &ValuedStructure,
    gamma: &ValuedStructure,
    cap: u128,
) -> Result<CheckOutcome> {
    same_signature(delta, gamma)?;
    if chi.input != delta.domain() || chi.output != gamma.domain() {
        return Err(Error::DomainMismatch(
            "measure domains do not match the structures".into(),
        ));
    }
    let n = delta.domain_size();
    let needed: u128 = delta
        .signature()
        .symbols()
        .iter()
        .map(|s| guard::pow_sat(n, s.arity))
        .fold(0u128, |a, b| a.saturating_add(b));
    guard::ensure(
        "fractional homomorphism check",
        needed.saturating_mul(chi.measure.len() as u128),
        cap,
    )?;
    let mut checked = 0;
    let mut image = Vec::new();
    for (s, sym) in delta.signature().symbols().iter().enumerate() {
        for (a, rhs) in Tuples::new(n, sym.arity).zip(delta.table(s)) {
            checked += 1;
            let lhs: ExtendedRational = chi
                .measure
                .iter()
                .map(|(h, w)| {
                    image.clear();
                    image.extend(a.iter().map(|&x| h.apply(&[x])));
                    gamma.cost(s, &image).scale(w)
                })
                .sum();
            if lhs > *rhs {
                let v = Violation {
                    symbol: sym.name.clone(),
                    tuples: vec![labels_of(&a, delta.domain())],
                    lhs,
                    rhs: rhs.clone(),
                };
                return Ok(CheckOutcome::from_violation(Some(v), checked));
            }
        }
    }
    Ok(CheckOutcome::from_violation(None, checked))
}

pub fn check_promise_fpol(omega: &PromiseFractionalPolymorphism, template: &PromiseTemplate) -> Result<CheckOutcome> {
    check_promise_fpol_capped(omega, template, guard::default_cap())
}

/// `E_{g∼ω_O} f^Γ(g(a¹,…,aᵐ)) ≤ Σ_i ω_I(i)·f^Δ(aⁱ)` for every symbol `f`
/// and every `m`-tuple of tuples over `D`. Zero-weight projections
/// contribute nothing to the right-hand side.
pub fn check_promise_fpol_capped(
    omega: &PromiseFractionalPolymorphism,
    template: &PromiseTemplate,
    cap: u128,
) -> Result<CheckOutcome> {
    let (delta, gamma) = (&template.delta, &template.gamma);
    same_signature(delta, gamma)?;
    if omega.input != delta.domain() || omega.output != gamma.domain() {
        return Err(Error::DomainMismatch(
            "polymorphism domains do not match the template".into(),
        ));
    }
    let n = delta.domain_size();
    let m = omega.arity;
    let needed: u128 = delta
        .signature()
        .symbols()
        .iter()
        .map(|s| guard::pow_sat(n, s.arity * m))
        .fold(0u128, |a, b| a.saturating_add(b));
    guard::ensure("promise polymorphism check", needed, cap)?;
    let support: Vec<(&OperationTable, &Rational)> = omega.output_measure.iter().collect();
    let mut checked = 0;
    let mut column = vec![0; m];
    let mut image = Vec::new();
    for (s, sym) in delta.signature().symbols().iter().enumerate() {
        let k = sym.arity;
        for flat in Tuples::new(n, k * m) {
            checked += 1;
            // flat = a¹ ‖ a² ‖ … ‖ aᵐ
            let rhs: ExtendedRational = (0..m)
                .filter(|&i| !omega.input_weights[i].is_zero())
                .map(|i| delta.cost(s, &flat[i * k..(i + 1) * k]).scale(&omega.input_weights[i]))
                .sum();
            if rhs == ExtendedRational::PlusInfinity {
                continue;
            }
            let mut lhs = ExtendedRational::zero();
            for (g, w) in &support {
                image.clear();
                for c in 0..k {
                    for (i, slot) in column.iter_mut().enumerate() {
                        *slot = flat[i * k + c];
                    }
                    image.push(g.apply(&column));
                }
                lhs = lhs + gamma.cost(s, &image).scale(w);
                if lhs == ExtendedRational::PlusInfinity {
                    break;
                }
            }
            if lhs > rhs {
                let v = Violation {
                    symbol: sym.name.clone(),
                    tuples: (0..m)
                        .map(|i| labels_of(&flat[i * k..(i + 1) * k], delta.domain()))
                        .collect(),
                    lhs,
                    rhs,
                };
                return Ok(CheckOutcome::from_violation(Some(v), checked));
            }
        }
    }
    Ok(CheckOutcome::from_violation(None, checked))
}

/// Invariance under every transposition `(b₀ bᵢ)` inside each block; these
/// generate the block-wise symmetric group.
pub fn check_block_symmetry(g: &OperationTable, partition: &BlockPartition) -> bool {
    if partition.arity() != g.arity() {
        return false;
    }
    let n = g.input_size();
    let mut swapped = Vec::with_capacity(g.arity());
    for (idx, t) in Tuples::new(n, g.arity()).enumerate() {
        let out = g.values()[idx];
        for block in partition.blocks() {
            let first = block[0];
            for &other in &block[1..] {
                if t[first] == t[other] {
                    continue;
                }
                swapped.clear();
                swapped.extend_from_slice(&t);
                swapped.swap(first, other);
                if g.values()[tuple_index(&swapped, n)] != out {
                    return false;
                }
            }
        }
    }
    true
}

/// Replaces `ω_I` by the uniform weights. Requires every support table to be
/// block-symmetric and each block to carry input weight `|B_j|/m`.
pub fn symmetrize_input_weights(
    omega: &PromiseFractionalPolymorphism,
    partition: &BlockPartition,
) -> Result<PromiseFractionalPolymorphism> {
    let m = omega.arity;
    if partition.arity() != m {
        return Err(Error::PreconditionViolated(format!(
            "partition covers {} coordinates, polymorphism has arity {m}",
            partition.arity()
        )));
    }
    if omega
        .output_measure
        .support()
        .any(|g| !check_block_symmetry(g, partition))
    {
        return Err(Error::PreconditionViolated(
            "a support table is not block-symmetric".into(),
        ));
    }
    for (j, block) in partition.blocks().iter().enumerate() {
        let sum: Rational = block.iter().map(|&i| omega.input_weights[i].clone()).sum();
        if sum != Rational::new(block.len().into(), m.into()) {
            return Err(Error::PreconditionViolated(format!(
                "block {j} carries input weight {sum}, expected {}/{m}",
                block.len()
            )));
        }
    }
    Ok(PromiseFractionalPolymorphism {
        input_weights: uniform_weights(m),
        ..omega.clone()
    })
}
