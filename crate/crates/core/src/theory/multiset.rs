use std::collections::HashMap;

use super::{check_block_symmetry, BlockPartition, FractionalHomomorphism, PromiseFractionalPolymorphism};
use crate::arith::{ExtendedRational, Rational};
use crate::error::{Error, Result};
use crate::guard;
use crate::measure::{Multiset, OperationTable};
use crate::structure::{tuple_count, PromiseTemplate, Tuples, ValuedStructure};

/// The domain of a block-multiset structure: one multiset per block, of the
/// block's size. Elements are ordered with the first block most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMultisetDomain {
    partition: BlockPartition,
    base: usize,
    elements: Vec<Vec<Multiset>>,
    labels: Vec<String>,
    index: HashMap<Vec<Multiset>, usize>,
}

impl BlockMultisetDomain {
    pub fn new(base_labels: &[String], partition: &BlockPartition) -> Result<Self> {
        Self::new_capped(base_labels, partition, guard::default_cap())
    }

    fn new_capped(base_labels: &[String], partition: &BlockPartition, cap: u128) -> Result<Self> {
        let n = base_labels.len();
        let per_block: Vec<Vec<Multiset>> = partition
            .blocks()
            .iter()
            .map(|b| Multiset::enumerate(n, b.len()))
            .collect();
        let size = per_block
            .iter()
            .fold(1u128, |acc, ms| acc.saturating_mul(ms.len() as u128));
        guard::ensure("block multiset domain", size, cap)?;
        let mut elements: Vec<Vec<Multiset>> = vec![Vec::new()];
        for ms in &per_block {
            elements = elements
                .into_iter()
                .flat_map(|prefix| {
                    ms.iter().map(move |m| {
                        let mut e = prefix.clone();
                        e.push(m.clone());
                        e
                    })
                })
                .collect();
        }
        let labels = elements
            .iter()
            .map(|e| e.iter().map(|m| m.render(base_labels)).collect::<String>())
            .collect();
        let index = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        Ok(BlockMultisetDomain {
            partition: partition.clone(),
            base: n,
            elements,
            labels,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn element(&self, i: usize) -> &[Multiset] {
        &self.elements[i]
    }

    /// A tuple in `D^m` realizing element `i`: the sorted block positions
    /// receive the sorted block members.
    pub fn canonical_tuple(&self, i: usize) -> Vec<usize> {
        let mut t = vec![0; self.partition.arity()];
        for (block, ms) in self.partition.blocks().iter().zip(&self.elements[i]) {
            for (&pos, e) in block.iter().zip(ms.elements()) {
                t[pos] = e;
            }
        }
        t
    }

    /// The element whose block multisets are those of `t`.
    pub fn of_tuple(&self, t: &[usize]) -> usize {
        let key: Vec<Multiset> = self
            .partition
            .blocks()
            .iter()
            .map(|b| {
                let members: Vec<usize> = b.iter().map(|&p| t[p]).collect();
                Multiset::from_elements(self.base, &members)
            })
            .collect();
        self.index[&key]
    }
}

/// Distinct permutations of a sorted sequence, in lexicographic order.
fn distinct_permutations(sorted: &[usize]) -> Vec<Vec<usize>> {
    let mut cur = sorted.to_vec();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (1..cur.len()).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..cur.len())
            .rev()
            .find(|&j| cur[j] > cur[i - 1])
            .expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

/// `min` over alignments of one block: the first multiset is laid out sorted
/// and the remaining ones range over their distinct arrangements.
fn block_min(
    delta: &ValuedStructure,
    symbol: usize,
    arrangements: &[&Vec<Vec<usize>>],
    first: &[usize],
) -> ExtendedRational {
    let k = arrangements.len() + 1;
    let b = first.len();
    let mut best = ExtendedRational::PlusInfinity;
    let mut choice = vec![0; arrangements.len()];
    let mut args = vec![0; k];
    'outer: loop {
        let mut total = ExtendedRational::zero();
        for pos in 0..b {
            args[0] = first[pos];
            for (r, arr) in arrangements.iter().enumerate() {
                args[r + 1] = arr[choice[r]][pos];
            }
            total = total + delta.cost(symbol, &args);
            if total >= best {
                break;
            }
        }
        if total < best {
            best = total;
        }
        for r in (0..choice.len()).rev() {
            choice[r] += 1;
            if choice[r] < arrangements[r].len() {
                continue 'outer;
            }
            choice[r] = 0;
        }
        return best;
    }
}

pub fn block_multiset_structure(delta: &ValuedStructure, partition: &BlockPartition) -> Result<ValuedStructure> {
    block_multiset_structure_capped(delta, partition, guard::default_cap())
}

/// Costs are `(1/m)·min` over realizing arrangements of the summed `Δ`-costs.
/// The sum splits over blocks, so each block is minimized on its own.
pub fn block_multiset_structure_capped(
    delta: &ValuedStructure,
    partition: &BlockPartition,
    cap: u128,
) -> Result<ValuedStructure> {
    let domain = BlockMultisetDomain::new_capped(delta.domain(), partition, cap)?;
    let size = domain.len();
    let entries = delta
        .signature()
        .symbols()
        .iter()
        .map(|s| guard::pow_sat(size, s.arity))
        .fold(0u128, |a, b| a.saturating_add(b));
    guard::ensure("block multiset structure", entries, cap)?;

    let m = partition.arity();
    let scale = Rational::new(1.into(), m.into());
    let perms: Vec<HashMap<&Multiset, Vec<Vec<usize>>>> = partition
        .blocks()
        .iter()
        .enumerate()
        .map(|(j, _)| {
            let mut map = HashMap::new();
            for e in &domain.elements {
                map.entry(&e[j])
                    .or_insert_with(|| distinct_permutations(&e[j].elements()));
            }
            map
        })
        .collect();

    let mut tables = Vec::with_capacity(delta.signature().len());
    for (s, sym) in delta.signature().symbols().iter().enumerate() {
        let k = sym.arity;
        let mut memo: Vec<HashMap<Vec<&Multiset>, ExtendedRational>> = vec![HashMap::new(); partition.blocks().len()];
        let mut table = Vec::with_capacity(tuple_count(size, k));
        for t in Tuples::new(size, k) {
            let mut total = ExtendedRational::zero();
            for (j, memo_j) in memo.iter_mut().enumerate() {
                let key: Vec<&Multiset> = t.iter().map(|&x| &domain.elements[x][j]).collect();
                let v = memo_j.entry(key.clone()).or_insert_with(|| {
                    let first = key[0].elements();
                    let rest: Vec<&Vec<Vec<usize>>> = key[1..].iter().map(|ms| &perms[j][ms]).collect();
                    block_min(delta, s, &rest, &first)
                });
                total = total + &*v;
                if total == ExtendedRational::PlusInfinity {
                    break;
                }
            }
            table.push(total.scale(&scale));
        }
        tables.push(table);
    }
    ValuedStructure::new(delta.signature().clone(), domain.labels.clone(), tables)
}

/// Each block-symmetric `g` becomes `g̃`, evaluated on any arrangement of
/// the block multisets; maps that coincide are merged.
pub fn lift_fpol_to_frachom(
    omega: &PromiseFractionalPolymorphism,
    partition: &BlockPartition,
    template: &PromiseTemplate,
) -> Result<FractionalHomomorphism> {
    if omega.input != template.delta.domain() || omega.output != template.gamma.domain() {
        return Err(Error::DomainMismatch(
            "polymorphism domains do not match the template".into(),
        ));
    }
    if partition.arity() != omega.arity {
        return Err(Error::DomainMismatch(format!(
            "partition covers {} coordinates, polymorphism has arity {}",
            partition.arity(),
            omega.arity
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
    let domain = BlockMultisetDomain::new(&omega.input, partition)?;
    let tuples: Vec<Vec<usize>> = (0..domain.len()).map(|i| domain.canonical_tuple(i)).collect();
    let c = omega.output.len();
    let measure = omega.output_measure.map(|g| {
        let values = tuples.iter().map(|t| g.apply(t)).collect();
        OperationTable::new(domain.len(), c, 1, values).expect("lifted map is total")
    });
    FractionalHomomorphism::new(domain.labels.clone(), omega.output.clone(), measure)
}

/// `g' = h ∘ (tuple ↦ block multisets)` for every `h` in the support of `chi`,
/// with uniform input weights.
pub fn fpol_from_frachom(
    chi: &FractionalHomomorphism,
    partition: &BlockPartition,
    delta: &ValuedStructure,
) -> Result<PromiseFractionalPolymorphism> {
    let domain = BlockMultisetDomain::new(delta.domain(), partition)?;
    if chi.input != domain.labels {
        return Err(Error::DomainMismatch(
            "homomorphism input is not the block multiset domain".into(),
        ));
    }
    let n = delta.domain_size();
    let m = partition.arity();
    guard::ensure("polymorphism table", guard::pow_sat(n, m), guard::default_cap())?;
    let classes: Vec<usize> = Tuples::new(n, m).map(|t| domain.of_tuple(&t)).collect();
    let c = chi.output.len();
    let measure = chi.measure.map(|h| {
        let values = classes.iter().map(|&e| h.values()[e]).collect();
        OperationTable::new(n, c, m, values).expect("composed map is total")
    });
    PromiseFractionalPolymorphism::with_uniform_inputs(m, delta.domain().to_vec(), chi.output.clone(), measure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use crate::measure::FiniteMeasure;
    use crate::structure::Signature;
    use crate::theory::{check_fractional_homomorphism, check_promise_fpol};

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn xor() -> ValuedStructure {
        let sig = Signature::new([("eq", 2), ("neq", 2), ("odd", 3)]).unwrap();
        ValuedStructure::from_fn(sig, labels(&["0", "1"]), |s, t| {
            let parity = t.iter().sum::<usize>() % 2;
            let ok = match s {
                0 => parity == 0,
                _ => parity == 1,
            };
            if ok {
                ExtendedRational::zero()
            } else {
                ExtendedRational::PlusInfinity
            }
        })
        .unwrap()
    }

    fn parity3() -> OperationTable {
        OperationTable::from_fn(2, 2, 3, |x| x.iter().sum::<usize>() % 2).unwrap()
    }

    #[test]
    fn permutations() {
        assert_eq!(
            distinct_permutations(&[0, 0, 1]),
            vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]
        );
        assert_eq!(distinct_permutations(&[0, 1, 2]).len(), 6);
        assert_eq!(distinct_permutations(&[]), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn domain_layout() {
        let d = BlockMultisetDomain::new(&labels(&["0", "1"]), &BlockPartition::two_block(1).unwrap()).unwrap();
        assert_eq!(d.len(), 6);
        assert_eq!(d.labels()[0], "{0,0}{0}");
        assert_eq!(d.labels()[5], "{1,1}{1}");
        for i in 0..d.len() {
            assert_eq!(d.of_tuple(&d.canonical_tuple(i)), i);
        }
        assert_eq!(d.of_tuple(&[1, 0, 1]), d.of_tuple(&[0, 1, 1]));
    }

    #[test]
    fn m1_is_isomorphic() {
        let delta = xor();
        let p = block_multiset_structure(&delta, &BlockPartition::single(1).unwrap()).unwrap();
        assert_eq!(p.domain_size(), 2);
        for s in 0..delta.signature().len() {
            assert_eq!(p.table(s), delta.table(s));
        }
    }

    #[test]
    fn unary_costs_average_members() {
        let sig = Signature::new([("u", 1)]).unwrap();
        let delta = ValuedStructure::new(sig, labels(&["a", "b"]), vec![vec![int(1).into(), int(4).into()]]).unwrap();
        let p = BlockPartition::from_sizes(&[2, 1]).unwrap();
        let s = block_multiset_structure(&delta, &p).unwrap();
        let d = BlockMultisetDomain::new(delta.domain(), &p).unwrap();
        for i in 0..d.len() {
            let sum: i64 = d.canonical_tuple(i).iter().map(|&x| [1, 4][x]).sum();
            assert_eq!(*s.cost(0, &[i]), Rational::new(sum.into(), 3.into()).into());
        }
    }

    #[test]
    fn binary_alignment_minimum() {
        let sig = Signature::new([("f", 2)]).unwrap();
        let costs = [3, 5, 1, 7]; // f(0,0), f(0,1), f(1,0), f(1,1)
        let delta = ValuedStructure::new(
            sig,
            labels(&["0", "1"]),
            vec![costs.iter().map(|&c| int(c).into()).collect()],
        )
        .unwrap();
        let p = BlockPartition::single(2).unwrap();
        let s = block_multiset_structure(&delta, &p).unwrap();
        let d = BlockMultisetDomain::new(delta.domain(), &p).unwrap();
        let mixed = d.labels().iter().position(|l| l == "{0,1}").unwrap();
        // min(3 + 7, 5 + 1) / 2
        assert_eq!(*s.cost(0, &[mixed, mixed]), int(3).into());
    }

    #[test]
    fn bimultiset_domain_count() {
        let s = block_multiset_structure(&xor(), &BlockPartition::two_block(1).unwrap()).unwrap();
        assert_eq!(s.domain_size(), 6);
    }

    #[test]
    fn parity_lifts_and_round_trips() {
        let delta = xor();
        let template = PromiseTemplate::diagonal(delta.clone());
        let l = labels(&["0", "1"]);
        let omega =
            PromiseFractionalPolymorphism::with_uniform_inputs(3, l.clone(), l, FiniteMeasure::point_mass(parity3()))
                .unwrap();
        let p = BlockPartition::from_sizes(&[2, 1]).unwrap();
        let chi = lift_fpol_to_frachom(&omega, &p, &template).unwrap();
        assert_eq!(chi.measure.len(), 1);
        let b3 = block_multiset_structure(&delta, &p).unwrap();
        assert!(check_fractional_homomorphism(&chi, &b3, &delta).unwrap().holds);

        let back = fpol_from_frachom(&chi, &p, &delta).unwrap();
        assert_eq!(back, omega);
        assert!(check_promise_fpol(&back, &template).unwrap().holds);
    }

    #[test]
    fn lift_collapses_and_rejects() {
        let delta = xor();
        let template = PromiseTemplate::diagonal(delta);
        let l = labels(&["0", "1"]);
        let p = BlockPartition::single(1).unwrap();
        let id = OperationTable::identity(2);
        let omega =
            PromiseFractionalPolymorphism::with_uniform_inputs(1, l.clone(), l.clone(), FiniteMeasure::point_mass(id))
                .unwrap();
        let chi = lift_fpol_to_frachom(&omega, &p, &template).unwrap();
        assert_eq!(chi.measure.len(), 1);

        let first = OperationTable::projection(2, 3, 0);
        let omega =
            PromiseFractionalPolymorphism::with_uniform_inputs(3, l.clone(), l, FiniteMeasure::point_mass(first))
                .unwrap();
        let err = lift_fpol_to_frachom(&omega, &BlockPartition::from_sizes(&[2, 1]).unwrap(), &template);
        assert!(matches!(err, Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn converse_keeps_weights() {
        // Every multiset element is realized by a tuple, so distinct maps
        // stay distinct after composition.
        let delta = xor();
        let p = BlockPartition::single(2).unwrap();
        let d = BlockMultisetDomain::new(delta.domain(), &p).unwrap();
        assert_eq!(d.len(), 3);
        let a = OperationTable::new(3, 2, 1, vec![0, 1, 0]).unwrap();
        let b = OperationTable::new(3, 2, 1, vec![0, 1, 1]).unwrap();
        let chi = FractionalHomomorphism::new(
            d.labels().to_vec(),
            delta.domain().to_vec(),
            FiniteMeasure::uniform([a, b]).unwrap(),
        )
        .unwrap();
        let omega = fpol_from_frachom(&chi, &p, &delta).unwrap();
        assert_eq!(omega.output_measure.len(), 2);
        let wrong = FractionalHomomorphism::identity(labels(&["0", "1"]));
        assert!(matches!(
            fpol_from_frachom(&wrong, &p, &delta),
            Err(Error::DomainMismatch(_))
        ));
    }
}
