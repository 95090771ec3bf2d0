//! Cost evaluation and exhaustive ground truth.

use std::collections::HashMap;

use serde::Serialize;

use crate::arith::ExtendedRational;
use crate::error::{Error, Result};
use crate::guard;
use crate::structure::{Instance, PromiseTemplate, ResolvedTerm, Tuples, ValuedStructure};

/// Assignment of domain labels to variable names.
pub type Assignment = HashMap<String, String>;

pub fn validate_instance(structure: &ValuedStructure, instance: &Instance) -> std::result::Result<(), Vec<Error>> {
    instance.resolve(structure.signature()).map(|_| ())
}

pub fn evaluate_cost(
    structure: &ValuedStructure,
    instance: &Instance,
    assignment: &Assignment,
) -> Result<ExtendedRational> {
    let terms = instance.resolve_first(structure.signature())?;
    let mut values = Vec::with_capacity(instance.variables().len());
    for v in instance.variables() {
        let label = assignment.get(v).ok_or_else(|| Error::UnassignedVariable(v.clone()))?;
        let idx = structure
            .label_index(label)
            .ok_or_else(|| Error::UnknownLabel(label.clone()))?;
        values.push(idx);
    }
    Ok(cost_of(structure, &terms, &values))
}

/// Cost of an index assignment over already-resolved terms.
pub fn cost_of(structure: &ValuedStructure, terms: &[ResolvedTerm], values: &[usize]) -> ExtendedRational {
    let mut total = ExtendedRational::zero();
    let mut tuple = Vec::new();
    for term in terms {
        tuple.clear();
        tuple.extend(term.args.iter().map(|&v| values[v]));
        match structure.cost(term.symbol, &tuple) {
            ExtendedRational::PlusInfinity => return ExtendedRational::PlusInfinity,
            c => total = total + c,
        }
    }
    total
}

/// Minimum cost over all `|D|^|V|` assignments, with one minimizer.
pub fn brute_force_argmin(
    structure: &ValuedStructure,
    instance: &Instance,
) -> Result<(ExtendedRational, Option<Vec<usize>>)> {
    let terms = instance.resolve_first(structure.signature())?;
    let n = structure.domain_size();
    let vars = instance.variables().len();
    let steps = guard::pow_sat(n, vars).saturating_mul(terms.len().max(1) as u128);
    guard::ensure("brute-force minimization", steps, guard::default_cap())?;
    let mut best = ExtendedRational::PlusInfinity;
    let mut arg = None;
    for values in Tuples::new(n, vars) {
        let c = cost_of(structure, &terms, &values);
        if c < best {
            best = c;
            arg = Some(values);
        }
    }
    Ok((best, arg))
}

pub fn brute_force_min(structure: &ValuedStructure, instance: &Instance) -> Result<ExtendedRational> {
    brute_force_argmin(structure, instance).map(|(m, _)| m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum OracleClass {
    /// Some `Δ`-assignment costs at most `u`.
    Yes,
    /// Every `Γ`-assignment costs more than `u`.
    No,
    /// Neither; a promise solver may answer either way.
    Gap,
}

impl std::fmt::Display for OracleClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OracleClass::Yes => "YES",
            OracleClass::No => "NO",
            OracleClass::Gap => "GAP",
        })
    }
}

pub fn pvcsp_oracle(template: &PromiseTemplate, instance: &Instance) -> Result<OracleClass> {
    let u = instance.threshold();
    if brute_force_min(&template.delta, instance)?.le_rational(u) {
        return Ok(OracleClass::Yes);
    }
    if !brute_force_min(&template.gamma, instance)?.le_rational(u) {
        return Ok(OracleClass::No);
    }
    Ok(OracleClass::Gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::structure::{Signature, Term};

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn unary(c0: ExtendedRational, c1: ExtendedRational) -> ValuedStructure {
        let sig = Signature::new([("f", 1)]).unwrap();
        ValuedStructure::new(sig, labels(&["0", "1"]), vec![vec![c0, c1]]).unwrap()
    }

    fn xor() -> ValuedStructure {
        let sig = Signature::new([("f", 2)]).unwrap();
        ValuedStructure::from_fn(sig, labels(&["0", "1"]), |_, t| {
            if t[0] != t[1] {
                ExtendedRational::zero()
            } else {
                ExtendedRational::PlusInfinity
            }
        })
        .unwrap()
    }

    fn assign(pairs: &[(&str, &str)]) -> Assignment {
        pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn empty_sum_costs_zero() {
        let s = unary(int(0).into(), int(1).into());
        let inst = Instance::new(labels(&["x"]), vec![], int(0)).unwrap();
        assert_eq!(
            evaluate_cost(&s, &inst, &assign(&[("x", "1")])).unwrap(),
            ExtendedRational::zero()
        );
        let none = Instance::new(vec![], vec![], int(0)).unwrap();
        assert_eq!(brute_force_min(&s, &none).unwrap(), ExtendedRational::zero());
    }

    #[test]
    fn single_lookup() {
        let s = unary(int(0).into(), int(1).into());
        let inst = Instance::new(labels(&["x"]), vec![Term::new("f", &["x"])], int(0)).unwrap();
        assert_eq!(evaluate_cost(&s, &inst, &assign(&[("x", "1")])).unwrap(), int(1).into());
    }

    #[test]
    fn infinite_summand_dominates() {
        // f(0,1) = 0, everything else +inf; f(x,y) + f(y,x) at x=0,y=1.
        let sig = Signature::new([("f", 2)]).unwrap();
        let s = ValuedStructure::from_fn(sig, labels(&["0", "1"]), |_, t| {
            if t == [0, 1] {
                ExtendedRational::zero()
            } else {
                ExtendedRational::PlusInfinity
            }
        })
        .unwrap();
        let inst = Instance::new(
            labels(&["x", "y"]),
            vec![Term::new("f", &["x", "y"]), Term::new("f", &["y", "x"])],
            int(0),
        )
        .unwrap();
        let c = evaluate_cost(&s, &inst, &assign(&[("x", "0"), ("y", "1")])).unwrap();
        assert_eq!(c, ExtendedRational::PlusInfinity);
    }

    #[test]
    fn evaluation_errors() {
        let s = unary(int(0).into(), int(1).into());
        let inst = Instance::new(labels(&["x"]), vec![Term::new("f", &["x"])], int(0)).unwrap();
        assert!(matches!(
            evaluate_cost(&s, &inst, &assign(&[])),
            Err(Error::UnassignedVariable(_))
        ));
        let bad = Instance::new(labels(&["x"]), vec![Term::new("g", &["x"])], int(0)).unwrap();
        assert!(matches!(
            evaluate_cost(&s, &bad, &assign(&[("x", "0")])),
            Err(Error::UnknownSymbol(_))
        ));
    }

    #[test]
    fn odd_xor_cycle_is_unsatisfiable() {
        let s = xor();
        let inst = Instance::new(
            labels(&["x", "y", "z"]),
            vec![
                Term::new("f", &["x", "y"]),
                Term::new("f", &["y", "z"]),
                Term::new("f", &["x", "z"]),
            ],
            int(0),
        )
        .unwrap();
        assert_eq!(brute_force_min(&s, &inst).unwrap(), ExtendedRational::PlusInfinity);
        let t = PromiseTemplate::diagonal(s);
        assert_eq!(pvcsp_oracle(&t, &inst).unwrap(), OracleClass::No);
    }

    #[test]
    fn unary_minimum() {
        let s = unary(rat(1, 3).into(), rat(1, 2).into());
        let inst = Instance::new(labels(&["x"]), vec![Term::new("f", &["x"])], int(0)).unwrap();
        assert_eq!(brute_force_min(&s, &inst).unwrap(), rat(1, 3).into());
    }

    #[test]
    fn oracle_classes() {
        let inst = Instance::new(labels(&["x"]), vec![Term::new("f", &["x"])], int(1)).unwrap();
        let s = unary(int(1).into(), int(2).into());
        assert_eq!(
            pvcsp_oracle(&PromiseTemplate::diagonal(s.clone()), &inst).unwrap(),
            OracleClass::Yes
        );

        // Δ has min 1, Γ has min 0, u = 1/2.
        let gamma = unary(int(0).into(), int(2).into());
        let t = PromiseTemplate::new(s, gamma).unwrap();
        let inst = inst.with_threshold(rat(1, 2));
        assert_eq!(pvcsp_oracle(&t, &inst).unwrap(), OracleClass::Gap);
    }

    #[test]
    fn validation_reports_problems() {
        let s = xor();
        let ok = Instance::new(labels(&["x", "y"]), vec![Term::new("f", &["x", "y"])], int(0)).unwrap();
        assert!(validate_instance(&s, &ok).is_ok());
        let arity = Instance::new(labels(&["x", "y"]), vec![Term::new("f", &["x", "y", "x"])], int(0)).unwrap();
        assert!(matches!(
            validate_instance(&s, &arity).unwrap_err()[0],
            Error::ArityMismatch { .. }
        ));
        let unknown = Instance::new(labels(&["x"]), vec![Term::new("h", &["x"])], int(0)).unwrap();
        assert!(matches!(
            validate_instance(&s, &unknown).unwrap_err()[0],
            Error::UnknownSymbol(_)
        ));
    }
}
