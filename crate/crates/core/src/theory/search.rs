use std::collections::HashMap;

use num_traits::{One, Zero};

use super::multiset::BlockMultisetDomain;
use super::{
    check_fractional_homomorphism, check_promise_fpol_capped, BlockPartition, FractionalHomomorphism,
    PromiseFractionalPolymorphism,
};
use crate::arith::{ExtendedRational, Rational};
use crate::error::{Error, Result};
use crate::exactlp::{feasible_point, LinearProgram};
use crate::guard;
use crate::measure::{FiniteMeasure, OperationTable};
use crate::structure::{tuple_index, PromiseTemplate, Tuples, ValuedStructure};

/// `Σ_g w(g)·γ^Γ(symbol, g(points)) ≤ rhs`, where a candidate `g` assigns a
/// `Γ`-element to every point.
struct Constraint {
    symbol: usize,
    points: Vec<usize>,
    rhs: Rational,
}

/// Finds a probability measure over maps `{0..num_points} → C` meeting every
/// constraint, or `None`. Candidates that put `+∞` on some constraint are
/// excluded up front since they must get weight 0.
/// Weighted candidate maps, each given by its value list.
type Mixture = Vec<(Vec<usize>, Rational)>;

fn mixture_search(
    gamma: &ValuedStructure,
    constraints: Vec<Constraint>,
    num_points: usize,
    what: &str,
    cap: u128,
) -> Result<Option<Mixture>> {
    let mut merged: HashMap<(usize, Vec<usize>), Rational> = HashMap::new();
    for c in constraints {
        merged
            .entry((c.symbol, c.points))
            .and_modify(|r| {
                if c.rhs < *r {
                    *r = c.rhs.clone();
                }
            })
            .or_insert(c.rhs);
    }
    let mut constraints: Vec<((usize, Vec<usize>), Rational)> = merged.into_iter().collect();
    constraints.sort();

    let c = gamma.domain_size();
    let candidates = guard::pow_sat(c, num_points);
    guard::ensure(what, candidates.saturating_mul(constraints.len().max(1) as u128), cap)?;

    let mut kept: Vec<(Vec<usize>, Vec<Rational>)> = Vec::new();
    let mut cand = vec![0; num_points];
    let mut image = Vec::new();
    'candidates: loop {
        let mut coeffs = Vec::with_capacity(constraints.len());
        let mut finite = true;
        for ((s, points), _) in &constraints {
            image.clear();
            image.extend(points.iter().map(|&p| cand[p]));
            match gamma.cost(*s, &image) {
                ExtendedRational::Finite(q) => coeffs.push(q.clone()),
                ExtendedRational::PlusInfinity => {
                    finite = false;
                    break;
                }
            }
        }
        if finite {
            kept.push((cand.clone(), coeffs));
        }
        for slot in cand.iter_mut().rev() {
            *slot += 1;
            if *slot < c {
                continue 'candidates;
            }
            *slot = 0;
        }
        break;
    }
    if kept.is_empty() {
        return Ok(None);
    }

    // Rows that every candidate already satisfies are redundant; identical
    // rows keep the tightest right-hand side.
    let mut rows: HashMap<Vec<Rational>, Rational> = HashMap::new();
    for (r, (_, rhs)) in constraints.iter().enumerate() {
        let row: Vec<Rational> = kept.iter().map(|(_, co)| co[r].clone()).collect();
        if row.iter().all(|x| x <= rhs) {
            continue;
        }
        rows.entry(row)
            .and_modify(|b| {
                if rhs < b {
                    *b = rhs.clone();
                }
            })
            .or_insert_with(|| rhs.clone());
    }
    let mut rows: Vec<(Vec<Rational>, Rational)> = rows.into_iter().collect();
    rows.sort();

    let k = kept.len();
    let vars = k + rows.len();
    let mut a = Vec::with_capacity(rows.len() + 1);
    let mut b = Vec::with_capacity(rows.len() + 1);
    for (r, (row, rhs)) in rows.into_iter().enumerate() {
        let mut full = row;
        full.resize(vars, Rational::zero());
        full[k + r] = Rational::one();
        a.push(full);
        b.push(rhs);
    }
    let mut norm = vec![Rational::one(); k];
    norm.resize(vars, Rational::zero());
    a.push(norm);
    b.push(Rational::one());
    let lp = LinearProgram::new(vars, a, b, vec![Rational::zero(); vars])?;
    let Some(x) = feasible_point(&lp) else {
        return Ok(None);
    };
    Ok(Some(
        kept.into_iter()
            .zip(x)
            .filter(|(_, w)| !w.is_zero())
            .map(|((cand, _), w)| (cand, w))
            .collect(),
    ))
}

/// LP search over measures on `C^D`. `Ok(None)` means no fractional
/// homomorphism exists.
pub fn find_frachom_lp(delta: &ValuedStructure, gamma: &ValuedStructure) -> Result<Option<FractionalHomomorphism>> {
    if delta.signature() != gamma.signature() {
        return Err(Error::DomainMismatch("structures have different signatures".into()));
    }
    let n = delta.domain_size();
    let mut constraints = Vec::new();
    for (s, sym) in delta.signature().symbols().iter().enumerate() {
        for (t, cost) in Tuples::new(n, sym.arity).zip(delta.table(s)) {
            if let ExtendedRational::Finite(q) = cost {
                constraints.push(Constraint {
                    symbol: s,
                    points: t,
                    rhs: q.clone(),
                });
            }
        }
    }
    let Some(found) = mixture_search(
        gamma,
        constraints,
        n,
        "fractional homomorphism search",
        guard::default_cap(),
    )?
    else {
        return Ok(None);
    };
    let c = gamma.domain_size();
    let measure = FiniteMeasure::new(found.into_iter().map(|(values, w)| {
        (
            OperationTable::new(n, c, 1, values).expect("candidate is a map D → C"),
            w,
        )
    }))?;
    let chi = FractionalHomomorphism::new(delta.domain().to_vec(), gamma.domain().to_vec(), measure)?;
    if !check_fractional_homomorphism(&chi, delta, gamma)?.holds {
        return Err(Error::Invariant(
            "LP witness fails the fractional homomorphism check".into(),
        ));
    }
    Ok(Some(chi))
}

pub fn find_promise_fpol_lp(
    template: &PromiseTemplate,
    m: usize,
    partition: Option<&BlockPartition>,
) -> Result<Option<PromiseFractionalPolymorphism>> {
    find_promise_fpol_lp_capped(template, m, partition, guard::default_cap())
}

/// LP search over `ω_O` with `ω_I` fixed uniform. With a partition the
/// candidates are the block-symmetric tables, i.e. maps on the block
/// multiset domain.
pub fn find_promise_fpol_lp_capped(
    template: &PromiseTemplate,
    m: usize,
    partition: Option<&BlockPartition>,
    cap: u128,
) -> Result<Option<PromiseFractionalPolymorphism>> {
    if m == 0 {
        return Err(Error::BadArity("polymorphism arity must be positive".into()));
    }
    if let Some(p) = partition {
        if p.arity() != m {
            return Err(Error::PreconditionViolated(format!(
                "partition covers {} coordinates, arity is {m}",
                p.arity()
            )));
        }
    }
    let (delta, gamma) = (&template.delta, &template.gamma);
    let n = delta.domain_size();
    guard::ensure("polymorphism table", guard::pow_sat(n, m), cap)?;
    let columns = Tuples::new(n, m).count();
    let domain = partition
        .map(|p| BlockMultisetDomain::new(delta.domain(), p))
        .transpose()?;
    let point_of: Vec<usize> = match &domain {
        Some(d) => Tuples::new(n, m).map(|t| d.of_tuple(&t)).collect(),
        None => (0..columns).collect(),
    };
    let num_points = domain.as_ref().map_or(columns, |d| d.len());

    let enumeration: u128 = delta
        .signature()
        .symbols()
        .iter()
        .map(|s| guard::pow_sat(n, s.arity * m))
        .fold(0u128, |a, b| a.saturating_add(b));
    guard::ensure("polymorphism search", enumeration, cap)?;
    let weight = Rational::new(1.into(), m.into());
    let mut constraints = Vec::new();
    let mut column = vec![0; m];
    for (s, sym) in delta.signature().symbols().iter().enumerate() {
        let k = sym.arity;
        for flat in Tuples::new(n, k * m) {
            let rhs: ExtendedRational = (0..m).map(|i| delta.cost(s, &flat[i * k..(i + 1) * k]).clone()).sum();
            let ExtendedRational::Finite(rhs) = rhs else {
                continue;
            };
            let points = (0..k)
                .map(|c| {
                    for (i, slot) in column.iter_mut().enumerate() {
                        *slot = flat[i * k + c];
                    }
                    point_of[tuple_index(&column, n)]
                })
                .collect();
            constraints.push(Constraint {
                symbol: s,
                points,
                rhs: rhs * &weight,
            });
        }
    }
    let Some(found) = mixture_search(gamma, constraints, num_points, "polymorphism search", cap)? else {
        return Ok(None);
    };
    let c = gamma.domain_size();
    let measure = FiniteMeasure::new(found.into_iter().map(|(values, w)| {
        let table: Vec<usize> = point_of.iter().map(|&p| values[p]).collect();
        (
            OperationTable::new(n, c, m, table).expect("candidate is a map D^m → C"),
            w,
        )
    }))?;
    let omega = PromiseFractionalPolymorphism::with_uniform_inputs(
        m,
        delta.domain().to_vec(),
        gamma.domain().to_vec(),
        measure,
    )?;
    if !check_promise_fpol_capped(&omega, template, cap)?.holds {
        return Err(Error::Invariant("LP witness fails the polymorphism check".into()));
    }
    Ok(Some(omega))
}
