//! Finitely supported probability measures, operation tables and multisets.

use num_traits::{One, Signed, Zero};

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::structure::{decode_tuple, tuple_count, tuple_index, Tuples};

/// A total map `D^m → C` with `D = {0..input_size}` and `C = {0..output_size}`,
/// stored in lexicographic tuple order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OperationTable {
    input_size: usize,
    output_size: usize,
    arity: usize,
    values: Vec<usize>,
}

impl OperationTable {
    pub fn new(input_size: usize, output_size: usize, arity: usize, values: Vec<usize>) -> Result<Self> {
        if values.len() != tuple_count(input_size, arity) {
            return Err(Error::DimensionMismatch(format!(
                "operation table has {} entries, expected {}^{}",
                values.len(),
                input_size,
                arity
            )));
        }
        if let Some(v) = values.iter().find(|&&v| v >= output_size) {
            return Err(Error::DimensionMismatch(format!(
                "table value {v} outside output domain of size {output_size}"
            )));
        }
        Ok(OperationTable {
            input_size,
            output_size,
            arity,
            values,
        })
    }

    pub fn from_fn<F>(input_size: usize, output_size: usize, arity: usize, f: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> usize,
    {
        let mut f = f;
        let values = Tuples::new(input_size, arity).map(|t| f(&t)).collect();
        OperationTable::new(input_size, output_size, arity, values)
    }

    pub fn identity(n: usize) -> Self {
        OperationTable {
            input_size: n,
            output_size: n,
            arity: 1,
            values: (0..n).collect(),
        }
    }

    /// The `i`-th `m`-ary projection on `{0..n}`.
    pub fn projection(n: usize, arity: usize, i: usize) -> Self {
        OperationTable::from_fn(n, n, arity, |t| t[i]).expect("projection is total")
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn apply(&self, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.arity);
        self.values[tuple_index(args, self.input_size)]
    }

    pub fn input_tuple(&self, index: usize) -> Vec<usize> {
        decode_tuple(index, self.input_size, self.arity)
    }
}

/// A probability measure with finite support, kept canonical: support
/// sorted, distinct, weights strictly positive and summing to exactly 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteMeasure<T> {
    entries: Vec<(T, Rational)>,
}

impl<T: Ord + Clone> FiniteMeasure<T> {
    /// Builds a measure, summing the weights of repeated elements. Zero
    /// weights are dropped; negative weights are rejected.
    pub fn new(entries: impl IntoIterator<Item = (T, Rational)>) -> Result<Self> {
        let mut entries: Vec<(T, Rational)> = entries.into_iter().collect();
        if let Some((_, w)) = entries.iter().find(|(_, w)| w.is_negative()) {
            return Err(Error::InvalidMeasure(format!("negative weight {w}")));
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let mut collapsed: Vec<(T, Rational)> = Vec::with_capacity(entries.len());
        for (t, w) in entries {
            match collapsed.last_mut() {
                Some((last, acc)) if *last == t => *acc += w,
                _ => collapsed.push((t, w)),
            }
        }
        collapsed.retain(|(_, w)| !w.is_zero());
        let total: Rational = collapsed.iter().map(|(_, w)| w.clone()).sum();
        if !total.is_one() {
            return Err(Error::InvalidMeasure(format!(
                "weights sum to {}, not 1",
                crate::arith::format_rational(&total)
            )));
        }
        Ok(FiniteMeasure { entries: collapsed })
    }

    pub fn point_mass(t: T) -> Self {
        FiniteMeasure {
            entries: vec![(t, Rational::one())],
        }
    }

    pub fn uniform(support: impl IntoIterator<Item = T>) -> Result<Self> {
        let items: Vec<T> = support.into_iter().collect();
        if items.is_empty() {
            return Err(Error::InvalidMeasure("empty support".into()));
        }
        let w = Rational::new(1.into(), items.len().into());
        FiniteMeasure::new(items.into_iter().map(|t| (t, w.clone())))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, &Rational)> {
        self.entries.iter().map(|(t, w)| (t, w))
    }

    pub fn support(&self) -> impl Iterator<Item = &T> {
        self.entries.iter().map(|(t, _)| t)
    }

    pub fn weight(&self, t: &T) -> Rational {
        self.entries
            .binary_search_by(|(x, _)| x.cmp(t))
            .map(|i| self.entries[i].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Pushes the measure forward along `f`, accumulating collapsed images.
    pub fn map<U: Ord + Clone>(&self, mut f: impl FnMut(&T) -> U) -> FiniteMeasure<U> {
        FiniteMeasure::new(self.entries.iter().map(|(t, w)| (f(t), w.clone())))
            .expect("pushforward of a probability measure is a probability measure")
    }
}

/// A multiset over `{0..n}`, stored as a multiplicity vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multiset {
    counts: Vec<usize>,
}

impl Multiset {
    pub fn from_elements(n: usize, elements: &[usize]) -> Self {
        let mut counts = vec![0; n];
        for &e in elements {
            counts[e] += 1;
        }
        Multiset { counts }
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn size(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Members in non-decreasing order.
    pub fn elements(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(e, &c)| std::iter::repeat_n(e, c))
            .collect()
    }

    /// All multisets of the given size over `{0..n}`, ordered by their
    /// sorted member sequences.
    pub fn enumerate(n: usize, size: usize) -> Vec<Multiset> {
        fn rec(n: usize, start: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Multiset>) {
            if left == 0 {
                out.push(Multiset::from_elements(n, cur));
                return;
            }
            for e in start..n {
                cur.push(e);
                rec(n, e, left - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, 0, size, &mut Vec::with_capacity(size), &mut out);
        out
    }

    /// `{a,b,b}` using the given labels.
    pub fn render(&self, labels: &[String]) -> String {
        let inner: Vec<&str> = self.elements().into_iter().map(|e| labels[e].as_str()).collect();
        format!("{{{}}}", inner.join(","))
    }
}
