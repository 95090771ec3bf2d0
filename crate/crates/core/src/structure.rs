//! Valued structures, instances and promise templates.
//!
//! Domains are finite lists of opaque labels. Tuples over a domain of size
//! `n` are enumerated lexicographically in label order (last coordinate
//! fastest), and a table of arity `k` stores `n^k` costs in that order.

use std::collections::HashMap;

use crate::arith::{ExtendedRational, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    symbols: Vec<Symbol>,
}

impl Signature {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut out: Vec<Symbol> = Vec::new();
        for (name, arity) in symbols {
            let name = name.into();
            if arity == 0 {
                return Err(Error::BadArity(format!("symbol `{name}` has arity 0")));
            }
            if out.iter().any(|s| s.name == name) {
                return Err(Error::Duplicate(name));
            }
            out.push(Symbol { name, arity });
        }
        Ok(Signature { symbols: out })
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn max_arity(&self) -> usize {
        self.symbols.iter().map(|s| s.arity).max().unwrap_or(0)
    }
}

/// Lexicographic enumeration of `{0..n}^k`.
#[derive(Clone, Debug)]
pub struct Tuples {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Tuples {
    pub fn new(n: usize, k: usize) -> Self {
        let current = if n == 0 && k > 0 { None } else { Some(vec![0; k]) };
        Tuples { n, current }
    }
}

impl Iterator for Tuples {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().unwrap();
        let mut i = cur.len();
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < self.n {
                break;
            }
            cur[i] = 0;
        }
        Some(out)
    }
}

pub fn tuple_index(tuple: &[usize], n: usize) -> usize {
    tuple.iter().fold(0, |acc, &x| acc * n + x)
}

pub fn decode_tuple(mut index: usize, n: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for slot in out.iter_mut().rev() {
        *slot = index % n;
        index /= n;
    }
    out
}

pub fn tuple_count(n: usize, k: usize) -> usize {
    n.checked_pow(k as u32).expect("tuple space overflows usize")
}

/// A finite valued structure. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuedStructure {
    signature: Signature,
    domain: Vec<String>,
    tables: Vec<Vec<ExtendedRational>>,
}

impl ValuedStructure {
    pub fn new(signature: Signature, domain: Vec<String>, tables: Vec<Vec<ExtendedRational>>) -> Result<Self> {
        if domain.is_empty() {
            return Err(Error::InvalidStructure("empty domain".into()));
        }
        check_distinct(&domain)?;
        if tables.len() != signature.len() {
            return Err(Error::InvalidStructure(format!(
                "{} tables for {} symbols",
                tables.len(),
                signature.len()
            )));
        }
        for (sym, table) in signature.symbols().iter().zip(&tables) {
            let expected = tuple_count(domain.len(), sym.arity);
            if table.len() != expected {
                return Err(Error::InvalidStructure(format!(
                    "table of `{}` has {} entries, expected {expected}",
                    sym.name,
                    table.len()
                )));
            }
        }
        Ok(ValuedStructure {
            signature,
            domain,
            tables,
        })
    }

    /// Builds every table by calling `cost(symbol_index, tuple)`.
    pub fn from_fn<F>(signature: Signature, domain: Vec<String>, mut cost: F) -> Result<Self>
    where
        F: FnMut(usize, &[usize]) -> ExtendedRational,
    {
        let n = domain.len();
        let tables = signature
            .symbols()
            .iter()
            .enumerate()
            .map(|(s, sym)| Tuples::new(n, sym.arity).map(|t| cost(s, &t)).collect())
            .collect();
        ValuedStructure::new(signature, domain, tables)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn domain_size(&self) -> usize {
        self.domain.len()
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.domain.iter().position(|l| l == label)
    }

    pub fn table(&self, symbol: usize) -> &[ExtendedRational] {
        &self.tables[symbol]
    }

    pub fn cost(&self, symbol: usize, tuple: &[usize]) -> &ExtendedRational {
        &self.tables[symbol][tuple_index(tuple, self.domain.len())]
    }

    /// Tuples of `symbol` with finite cost, in lexicographic order.
    pub fn dom(&self, symbol: usize) -> Vec<Vec<usize>> {
        let arity = self.signature.symbols()[symbol].arity;
        Tuples::new(self.domain.len(), arity)
            .zip(&self.tables[symbol])
            .filter(|(_, c)| c.is_finite())
            .map(|(t, _)| t)
            .collect()
    }
}

pub(crate) fn check_distinct(names: &[String]) -> Result<()> {
    let mut seen = HashMap::with_capacity(names.len());
    for n in names {
        if seen.insert(n.as_str(), ()).is_some() {
            return Err(Error::Duplicate(n.clone()));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub symbol: String,
    pub args: Vec<String>,
}

impl Term {
    pub fn new(symbol: impl Into<String>, args: &[&str]) -> Self {
        Term {
            symbol: symbol.into(),
            args: args.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// `(V, φ, u)`: variables, a sum of terms, and a threshold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    variables: Vec<String>,
    terms: Vec<Term>,
    threshold: Rational,
}

/// A term with its symbol and variables replaced by indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvedTerm {
    pub symbol: usize,
    pub args: Vec<usize>,
}

impl Instance {
    pub fn new(variables: Vec<String>, terms: Vec<Term>, threshold: Rational) -> Result<Self> {
        check_distinct(&variables)?;
        Ok(Instance {
            variables,
            terms,
            threshold,
        })
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn threshold(&self) -> &Rational {
        &self.threshold
    }

    pub fn with_threshold(&self, threshold: Rational) -> Instance {
        Instance {
            threshold,
            ..self.clone()
        }
    }

    /// Resolves symbols and variables, reporting every violation.
    pub fn resolve(&self, signature: &Signature) -> std::result::Result<Vec<ResolvedTerm>, Vec<Error>> {
        let var_index: HashMap<&str, usize> = self
            .variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        let mut errors = Vec::new();
        let mut out = Vec::with_capacity(self.terms.len());
        for term in &self.terms {
            let Some(symbol) = signature.index_of(&term.symbol) else {
                errors.push(Error::UnknownSymbol(term.symbol.clone()));
                continue;
            };
            let arity = signature.symbols()[symbol].arity;
            if arity != term.args.len() {
                errors.push(Error::ArityMismatch {
                    symbol: term.symbol.clone(),
                    expected: arity,
                    found: term.args.len(),
                });
                continue;
            }
            let mut args = Vec::with_capacity(arity);
            for a in &term.args {
                match var_index.get(a.as_str()) {
                    Some(&i) => args.push(i),
                    None => errors.push(Error::UndeclaredVariable(a.clone())),
                }
            }
            if args.len() == arity {
                out.push(ResolvedTerm { symbol, args });
            }
        }
        if errors.is_empty() {
            Ok(out)
        } else {
            Err(errors)
        }
    }

    pub(crate) fn resolve_first(&self, signature: &Signature) -> Result<Vec<ResolvedTerm>> {
        self.resolve(signature).map_err(|mut errs| errs.swap_remove(0))
    }
}

/// A pair `(Δ, Γ)` over a common signature. Whether `Δ →_f Γ` actually
/// holds is not checked here; see `theory::find_frachom_lp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PromiseTemplate {
    pub delta: ValuedStructure,
    pub gamma: ValuedStructure,
}

impl PromiseTemplate {
    pub fn new(delta: ValuedStructure, gamma: ValuedStructure) -> Result<Self> {
        if delta.signature() != gamma.signature() {
            return Err(Error::DomainMismatch(
                "template structures have different signatures".into(),
            ));
        }
        Ok(PromiseTemplate { delta, gamma })
    }

    /// The non-promise template `(Δ, Δ)`.
    pub fn diagonal(delta: ValuedStructure) -> Self {
        PromiseTemplate {
            gamma: delta.clone(),
            delta,
        }
    }
}
