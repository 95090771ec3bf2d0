//! Seeded generators for templates, instances and witness triples.
//!
//! Case `i` of a batch draws from its own ChaCha stream, so a case does not
//! depend on how many cases come before it.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{int, rat, ExtendedRational, Rational};
use crate::error::{Error, Result};
use crate::measure::{FiniteMeasure, OperationTable};
use crate::oracle::brute_force_min;
use crate::structure::{Instance, PromiseTemplate, Signature, Term, Tuples, ValuedStructure};
use crate::theory::{BlockMultisetDomain, BlockPartition, FractionalHomomorphism, PromiseFractionalPolymorphism};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Crisp linear equations over Z2.
    Xor,
    /// Crisp Horn clauses over {0,1}.
    Horn,
    /// A fresh submodular valued structure over {0,1} per case.
    Submodular,
    /// Unrestricted templates over 2 or 3 elements; `Γ` is `Δ` with some
    /// entries lowered.
    Random,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Xor, Family::Horn, Family::Submodular, Family::Random];
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Xor => "xor",
            Family::Horn => "horn",
            Family::Submodular => "submodular",
            Family::Random => "random",
        })
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.to_string() == s)
            .ok_or_else(|| Error::PreconditionViolated(format!("unknown family `{s}` (xor, horn, submodular, random)")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Case {
    pub template: PromiseTemplate,
    pub instance: Instance,
}

pub fn case_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn bits() -> Vec<String> {
    vec!["0".into(), "1".into()]
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn crisp(ok: bool) -> ExtendedRational {
    if ok {
        ExtendedRational::zero()
    } else {
        ExtendedRational::PlusInfinity
    }
}

pub fn xor_structure() -> ValuedStructure {
    let sig = Signature::new([("eq", 2), ("neq", 2), ("even3", 3), ("odd3", 3)]).expect("fixed signature");
    ValuedStructure::from_fn(sig, bits(), |s, t| {
        let odd = t.iter().sum::<usize>() % 2 == 1;
        crisp(if s % 2 == 0 { !odd } else { odd })
    })
    .expect("fixed structure")
}

pub fn horn_structure() -> ValuedStructure {
    let sig = Signature::new([("imp", 2), ("nand", 2), ("horn3", 3), ("t", 1), ("f", 1)]).expect("fixed signature");
    ValuedStructure::from_fn(sig, bits(), |s, t| {
        crisp(match s {
            0 => !(t[0] == 1 && t[1] == 0),
            1 => !(t[0] == 1 && t[1] == 1),
            2 => !(t[0] == 1 && t[1] == 1 && t[2] == 0),
            3 => t[0] == 1,
            _ => t[0] == 0,
        })
    })
    .expect("fixed structure")
}

/// A cost from `{0, 1, 1/2, 2, inf}`, with `inf` drawn with probability
/// `p_inf`.
fn small_cost(rng: &mut ChaCha8Rng, p_inf: f64) -> ExtendedRational {
    if rng.gen_bool(p_inf) {
        return ExtendedRational::PlusInfinity;
    }
    [int(0), int(1), rat(1, 2), int(2)]
        .choose(rng)
        .expect("nonempty")
        .clone()
        .into()
}

/// `f(0,0) + f(1,1) ≤ f(0,1) + f(1,0)` in extended arithmetic.
pub fn is_submodular(table: &[ExtendedRational]) -> bool {
    let lhs = table[0].clone() + &table[3];
    let rhs = table[1].clone() + &table[2];
    rhs == ExtendedRational::PlusInfinity || lhs <= rhs
}

fn submodular_structure(rng: &mut ChaCha8Rng) -> ValuedStructure {
    let sig = Signature::new([("b0", 2), ("b1", 2), ("b2", 2), ("u0", 1), ("u1", 1)]).expect("fixed signature");
    let mut tables = Vec::new();
    for _ in 0..3 {
        let table = loop {
            let t: Vec<ExtendedRational> = (0..4).map(|_| small_cost(rng, 0.15)).collect();
            if is_submodular(&t) {
                break t;
            }
        };
        tables.push(table);
    }
    for _ in 0..2 {
        tables.push((0..2).map(|_| small_cost(rng, 0.1)).collect());
    }
    ValuedStructure::new(sig, bits(), tables).expect("tables sized")
}

fn random_structure(rng: &mut ChaCha8Rng) -> ValuedStructure {
    let n = rng.gen_range(2..=3);
    let count = rng.gen_range(1..=3);
    let arities: Vec<usize> = (0..count).map(|_| rng.gen_range(1..=3)).collect();
    let sig = Signature::new(arities.iter().enumerate().map(|(i, &a)| (format!("r{i}"), a))).expect("distinct names");
    let p_inf = rng.gen_range(0.0..0.4);
    ValuedStructure::from_fn(sig, labels(n), |_, _| small_cost(rng, p_inf)).expect("tables sized")
}

/// `Δ` with each entry lowered (finite) or opened up (`inf`) with small
/// probability, so `(Δ, Γ)` is a template via the identity map.
fn weaken(delta: &ValuedStructure, rng: &mut ChaCha8Rng) -> ValuedStructure {
    let tables = (0..delta.signature().len())
        .map(|s| {
            delta
                .table(s)
                .iter()
                .map(|c| {
                    if !rng.gen_bool(0.2) {
                        return c.clone();
                    }
                    match c {
                        ExtendedRational::PlusInfinity => small_cost(rng, 0.0),
                        ExtendedRational::Finite(q) => (q - rat(1, 2)).into(),
                    }
                })
                .collect()
        })
        .collect();
    ValuedStructure::new(delta.signature().clone(), delta.domain().to_vec(), tables).expect("same shape")
}

fn random_terms(rng: &mut ChaCha8Rng, sig: &Signature, vars: &[String], count: usize, repeat: f64) -> Vec<Term> {
    (0..count)
        .map(|_| {
            let sym = &sig.symbols()[rng.gen_range(0..sig.len())];
            let mut args: Vec<&str> = Vec::with_capacity(sym.arity);
            while args.len() < sym.arity {
                let v = vars[rng.gen_range(0..vars.len())].as_str();
                if args.contains(&v) && args.len() < vars.len() && !rng.gen_bool(repeat) {
                    continue;
                }
                args.push(v);
            }
            Term::new(sym.name.clone(), &args)
        })
        .collect()
}

fn variables(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

/// A threshold near the minimum of `delta` on the instance.
fn threshold_near(rng: &mut ChaCha8Rng, delta: &ValuedStructure, inst: &Instance) -> Result<Rational> {
    Ok(match brute_force_min(delta, inst)? {
        ExtendedRational::Finite(m) => match rng.gen_range(0..3) {
            0 => m - rat(1, 2),
            1 => m,
            _ => m + rat(1, 2),
        },
        ExtendedRational::PlusInfinity => int(rng.gen_range(0..=2)),
    })
}

fn crisp_threshold(rng: &mut ChaCha8Rng) -> Rational {
    match rng.gen_range(0..10) {
        0 => rat(-1, 2),
        1 => int(1),
        _ => int(0),
    }
}

pub fn generate(family: Family, seed: u64, index: u64) -> Result<Case> {
    let mut rng = case_rng(seed, index);
    let rng = &mut rng;
    match family {
        Family::Xor | Family::Horn => {
            let delta = if family == Family::Xor {
                xor_structure()
            } else {
                horn_structure()
            };
            let vars = variables(rng.gen_range(2..=6));
            let count = rng.gen_range(1..=vars.len() + 3);
            let terms = random_terms(rng, delta.signature(), &vars, count, 0.1);
            let instance = Instance::new(vars, terms, crisp_threshold(rng))?;
            Ok(Case {
                template: PromiseTemplate::diagonal(delta),
                instance,
            })
        }
        Family::Submodular => {
            let delta = submodular_structure(rng);
            let vars = variables(rng.gen_range(2..=5));
            let count = rng.gen_range(1..=7);
            let terms = random_terms(rng, delta.signature(), &vars, count, 0.1);
            let instance = Instance::new(vars, terms, int(0))?;
            let u = threshold_near(rng, &delta, &instance)?;
            Ok(Case {
                template: PromiseTemplate::diagonal(delta),
                instance: instance.with_threshold(u),
            })
        }
        Family::Random => {
            let delta = random_structure(rng);
            let gamma = weaken(&delta, rng);
            let vars = variables(rng.gen_range(1..=4));
            let count = rng.gen_range(1..=5);
            let terms = random_terms(rng, delta.signature(), &vars, count, 0.2);
            let instance = Instance::new(vars, terms, int(0))?;
            let u = threshold_near(rng, &delta, &instance)?;
            Ok(Case {
                template: PromiseTemplate::new(delta, gamma)?,
                instance: instance.with_threshold(u),
            })
        }
    }
}

pub fn batch(family: Family, seed: u64, count: u64) -> Result<Vec<Case>> {
    (0..count).map(|i| generate(family, seed, i)).collect()
}

/// A random probability vector with `len` positive entries summing to `total`.
fn random_weights(rng: &mut ChaCha8Rng, len: usize, total: &Rational) -> Vec<Rational> {
    let raw: Vec<i64> = (0..len).map(|_| rng.gen_range(1..=4)).collect();
    let sum: i64 = raw.iter().sum();
    raw.iter().map(|&r| rat(r, sum) * total).collect()
}

fn random_measure(rng: &mut ChaCha8Rng, tables: Vec<OperationTable>) -> FiniteMeasure<OperationTable> {
    let w = random_weights(rng, tables.len(), &int(1));
    FiniteMeasure::new(tables.into_iter().zip(w)).expect("positive weights summing to 1")
}

/// A random block-symmetric table `D^m → C`: a random map on the block
/// multiset domain, expanded.
fn random_symmetric_table(rng: &mut ChaCha8Rng, n: usize, c: usize, partition: &BlockPartition) -> OperationTable {
    let domain = BlockMultisetDomain::new(&labels(n), partition).expect("tiny domain");
    let on_multisets: Vec<usize> = (0..domain.len()).map(|_| rng.gen_range(0..c)).collect();
    OperationTable::from_fn(n, c, partition.arity(), |t| on_multisets[domain.of_tuple(t)]).expect("values in range")
}

fn random_partition(rng: &mut ChaCha8Rng, m: usize) -> BlockPartition {
    let mut sizes = Vec::new();
    let mut left = m;
    while left > 0 {
        let s = rng.gen_range(1..=left);
        sizes.push(s);
        left -= s;
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    let mut blocks = Vec::new();
    let mut start = 0;
    for s in sizes {
        blocks.push(order[start..start + s].to_vec());
        start += s;
    }
    BlockPartition::new(blocks).expect("sizes cover 0..m")
}

/// The cheapest `Γ` for which `omega` satisfies the polymorphism
/// inequality against `delta`: each `Γ`-tuple costs the least weighted
/// `Δ`-sum among the inputs some support table sends to it, `inf` if none.
pub fn envelope_structure(
    delta: &ValuedStructure,
    omega: &PromiseFractionalPolymorphism,
    output_labels: Vec<String>,
) -> Result<ValuedStructure> {
    let n = delta.domain_size();
    let c = output_labels.len();
    let m = omega.arity;
    let mut tables = Vec::with_capacity(delta.signature().len());
    let mut column = vec![0; m];
    for (s, sym) in delta.signature().symbols().iter().enumerate() {
        let k = sym.arity;
        let mut table = vec![ExtendedRational::PlusInfinity; crate::structure::tuple_count(c, k)];
        for flat in Tuples::new(n, k * m) {
            let rhs: ExtendedRational = (0..m)
                .filter(|&i| !num_traits::Zero::is_zero(&omega.input_weights[i]))
                .map(|i| delta.cost(s, &flat[i * k..(i + 1) * k]).scale(&omega.input_weights[i]))
                .sum();
            for g in omega.output_measure.support() {
                let image: Vec<usize> = (0..k)
                    .map(|col| {
                        for (i, slot) in column.iter_mut().enumerate() {
                            *slot = flat[i * k + col];
                        }
                        g.apply(&column)
                    })
                    .collect();
                let idx = crate::structure::tuple_index(&image, c);
                if rhs < table[idx] {
                    table[idx] = rhs.clone();
                }
            }
        }
        tables.push(table);
    }
    ValuedStructure::new(delta.signature().clone(), output_labels, tables)
}

/// `f^Δ(a) = Σ_h χ(h)·f^Γ(h(a))`, plus a random nonnegative slack (or
/// `inf`) on some tuples. `chi` is then a fractional homomorphism `Δ → Γ`.
pub fn pullback_structure(
    gamma: &ValuedStructure,
    chi: &FractionalHomomorphism,
    input_labels: Vec<String>,
    rng: &mut ChaCha8Rng,
) -> Result<ValuedStructure> {
    ValuedStructure::from_fn(gamma.signature().clone(), input_labels, |s, a| {
        let base: ExtendedRational = chi
            .measure
            .iter()
            .map(|(h, w)| {
                let image: Vec<usize> = a.iter().map(|&x| h.apply(&[x])).collect();
                gamma.cost(s, &image).scale(w)
            })
            .sum();
        match rng.gen_range(0..6) {
            0 => base + &ExtendedRational::from(rat(1, 2)),
            1 => ExtendedRational::PlusInfinity,
            _ => base,
        }
    })
}

fn random_frachom(rng: &mut ChaCha8Rng, input: Vec<String>, output: Vec<String>) -> FractionalHomomorphism {
    let count = rng.gen_range(1..=2);
    let tables = (0..count)
        .map(|_| {
            OperationTable::from_fn(input.len(), output.len(), 1, |_| rng.gen_range(0..output.len())).expect("in range")
        })
        .collect();
    let measure = random_measure(rng, tables);
    FractionalHomomorphism::new(input, output, measure).expect("unary maps")
}

/// A promise template together with a block-symmetric polymorphism of it.
#[derive(Clone, Debug)]
pub struct FpolTriple {
    pub template: PromiseTemplate,
    pub omega: PromiseFractionalPolymorphism,
    pub partition: BlockPartition,
    /// `χ: Δ_d → Δ` and `Δ_d`, for composing a sampling step in front.
    pub sample_chi: FractionalHomomorphism,
    pub sample: ValuedStructure,
}

/// `ω_I` is drawn per block with block sums `|B_j|/m` (not necessarily
/// uniform inside a block); `Γ` is the envelope of `ω` over a random `Δ`.
pub fn fpol_triple(seed: u64, index: u64) -> Result<FpolTriple> {
    let mut rng = case_rng(seed, index);
    let rng = &mut rng;
    let delta = random_structure(rng);
    let n = delta.domain_size();
    let c = rng.gen_range(2..=3);
    let m = rng.gen_range(1..=3);
    let partition = random_partition(rng, m);
    let mut input_weights = vec![int(0); m];
    for block in partition.blocks() {
        let share = rat(block.len() as i64, m as i64);
        let w = if rng.gen_bool(0.5) {
            vec![&share / int(block.len() as i64); block.len()]
        } else {
            random_weights(rng, block.len(), &share)
        };
        for (&i, wi) in block.iter().zip(w) {
            input_weights[i] = wi;
        }
    }
    let count = rng.gen_range(1..=3);
    let tables = (0..count)
        .map(|_| random_symmetric_table(rng, n, c, &partition))
        .collect();
    let out_labels: Vec<String> = (0..c).map(|i| format!("c{i}")).collect();
    let omega = PromiseFractionalPolymorphism::new(
        m,
        delta.domain().to_vec(),
        out_labels.clone(),
        input_weights,
        random_measure(rng, tables),
    )?;
    let gamma = envelope_structure(&delta, &omega, out_labels)?;
    let d = rng.gen_range(2..=3);
    let sample_labels: Vec<String> = (0..d).map(|i| format!("s{i}")).collect();
    let sample_chi = random_frachom(rng, sample_labels.clone(), delta.domain().to_vec());
    let sample = pullback_structure(&delta, &sample_chi, sample_labels, rng)?;
    Ok(FpolTriple {
        template: PromiseTemplate::new(delta, gamma)?,
        omega,
        partition,
        sample_chi,
        sample,
    })
}

/// `(Δ, Γ, χ)` with `χ` a fractional homomorphism `Δ → Γ` by construction,
/// and a random instance over the shared signature.
pub fn frachom_pair(
    seed: u64,
    index: u64,
) -> Result<(ValuedStructure, ValuedStructure, FractionalHomomorphism, Instance)> {
    let mut rng = case_rng(seed, index);
    let rng = &mut rng;
    let gamma = random_structure(rng);
    let n = rng.gen_range(2..=3);
    let chi = random_frachom(rng, labels(n), gamma.domain().to_vec());
    let delta = pullback_structure(&gamma, &chi, labels(n), rng)?;
    let vars = variables(rng.gen_range(1..=4));
    let count = rng.gen_range(1..=5);
    let terms = random_terms(rng, gamma.signature(), &vars, count, 0.2);
    let instance = Instance::new(vars, terms, int(0))?;
    Ok((delta, gamma, chi, instance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{check_block_symmetry, check_fractional_homomorphism, check_promise_fpol};

    #[test]
    fn batches_are_reproducible() {
        for f in Family::ALL {
            assert_eq!(batch(f, 7, 5).unwrap(), batch(f, 7, 5).unwrap());
            assert_eq!(generate(f, 7, 3).unwrap(), batch(f, 7, 4).unwrap()[3]);
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
        assert!("bogus".parse::<Family>().is_err());
    }

    #[test]
    fn submodular_tables() {
        for case in batch(Family::Submodular, 1, 20).unwrap() {
            for s in 0..3 {
                assert!(is_submodular(case.template.delta.table(s)));
            }
        }
        let bad = [int(1), int(0), int(0), int(1)].map(ExtendedRational::from);
        assert!(!is_submodular(&bad));
    }

    #[test]
    fn weakened_gamma_is_cheaper() {
        for case in batch(Family::Random, 3, 20).unwrap() {
            let chi = FractionalHomomorphism::identity(case.template.delta.domain().to_vec());
            assert!(
                check_fractional_homomorphism(&chi, &case.template.delta, &case.template.gamma)
                    .unwrap()
                    .holds
            );
        }
    }

    #[test]
    fn triples_are_valid_by_construction() {
        for i in 0..10 {
            let t = fpol_triple(11, i).unwrap();
            assert!(check_promise_fpol(&t.omega, &t.template).unwrap().holds);
            assert!(t
                .omega
                .output_measure
                .support()
                .all(|g| check_block_symmetry(g, &t.partition)));
            assert!(
                check_fractional_homomorphism(&t.sample_chi, &t.sample, &t.template.delta)
                    .unwrap()
                    .holds
            );
        }
    }
}
