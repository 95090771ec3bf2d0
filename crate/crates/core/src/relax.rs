//! The BLP and AIP relaxations of a finite-domain instance, the star point
//! and refinement that tie them together, and the decision procedures built
//! on top: combined BLP + AIP, BLP alone, and solving through a sampler.
//!
//! Both relaxations share one column layout: first one column per
//! `(term, tuple)` pair in term order with tuples lexicographic, then one
//! column per `(variable, label)` pair. Columns forced to zero (tuples
//! outside the cost function's domain, and later the refinement) are removed
//! from the program and recorded as eliminated.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{ExtendedRational, ExtendedValue, Rational};
use crate::error::{Error, Result};
use crate::exactlp::{self, LinearProgram, LpResult, SupportProfile};
use crate::lattice::{self, IntegerMatrix, IntegerSolution};
use crate::structure::{Instance, ResolvedTerm, Tuples, ValuedStructure};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Column {
    /// `λ_j(t)` / `q_j(t)`
    Tuple { term: usize, tuple: Vec<usize> },
    /// `μ_x(a)` / `r_x(a)`
    Marginal { variable: usize, label: usize },
}

/// Shared sparse constraint system of both relaxations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    columns: Vec<Column>,
    eliminated: Vec<Column>,
    /// Sparse rows `(column, coefficient)` over `columns`.
    rows: Vec<Vec<(usize, i64)>>,
    rhs: Vec<i64>,
    objective: Vec<Rational>,
    marginal_rows: usize,
    normalization_rows: usize,
    names: Names,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Names {
    symbols: Vec<String>,
    variables: Vec<String>,
    labels: Vec<String>,
}

impl Layout {
    fn build(delta: &ValuedStructure, instance: &Instance) -> Result<Layout> {
        let terms: Vec<ResolvedTerm> = instance.resolve_first(delta.signature())?;
        let n = delta.domain_size();
        let mut columns = Vec::new();
        let mut eliminated = Vec::new();
        let mut objective = Vec::new();
        // per term: tuple index -> column index (None if eliminated)
        let mut tuple_cols: Vec<Vec<Option<usize>>> = Vec::with_capacity(terms.len());
        for (j, term) in terms.iter().enumerate() {
            let arity = term.args.len();
            let mut map = Vec::new();
            for (t, cost) in Tuples::new(n, arity).zip(delta.table(term.symbol)) {
                let col = Column::Tuple { term: j, tuple: t };
                match cost {
                    ExtendedRational::Finite(c) => {
                        map.push(Some(columns.len()));
                        columns.push(col);
                        objective.push(c.clone());
                    }
                    ExtendedRational::PlusInfinity => {
                        map.push(None);
                        eliminated.push(col);
                    }
                }
            }
            tuple_cols.push(map);
        }
        let mu_base = columns.len();
        for x in 0..instance.variables().len() {
            for a in 0..n {
                columns.push(Column::Marginal { variable: x, label: a });
                objective.push(Rational::zero());
            }
        }
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (j, term) in terms.iter().enumerate() {
            let arity = term.args.len();
            for (pos, &x) in term.args.iter().enumerate() {
                for a in 0..n {
                    let mut row: Vec<(usize, i64)> = Tuples::new(n, arity)
                        .zip(&tuple_cols[j])
                        .filter(|(t, c)| t[pos] == a && c.is_some())
                        .map(|(_, c)| (c.unwrap(), 1))
                        .collect();
                    row.push((mu_base + x * n + a, -1));
                    rows.push(row);
                    rhs.push(0);
                }
            }
        }
        let marginal_rows = rows.len();
        for x in 0..instance.variables().len() {
            rows.push((0..n).map(|a| (mu_base + x * n + a, 1)).collect());
            rhs.push(1);
        }
        let normalization_rows = rows.len() - marginal_rows;
        Ok(Layout {
            columns,
            eliminated,
            rows,
            rhs,
            objective,
            marginal_rows,
            normalization_rows,
            names: Names {
                symbols: terms
                    .iter()
                    .map(|t| delta.signature().symbols()[t.symbol].name.clone())
                    .collect(),
                variables: instance.variables().to_vec(),
                labels: delta.domain().to_vec(),
            },
        })
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn eliminated(&self) -> &[Column] {
        &self.eliminated
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn marginal_rows(&self) -> usize {
        self.marginal_rows
    }

    pub fn normalization_rows(&self) -> usize {
        self.normalization_rows
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn column_index(&self, col: &Column) -> Option<usize> {
        self.columns.iter().position(|c| c == col)
    }

    /// `lambda[2:f](0,1)` or `mu[x](1)`.
    pub fn column_name(&self, col: &Column) -> String {
        let n = &self.names;
        match col {
            Column::Tuple { term, tuple } => {
                let labels: Vec<&str> = tuple.iter().map(|&a| n.labels[a].as_str()).collect();
                format!("lambda[{}:{}]({})", term, n.symbols[*term], labels.join(","))
            }
            Column::Marginal { variable, label } => {
                format!("mu[{}]({})", n.variables[*variable], n.labels[*label])
            }
        }
    }

    fn dense_rows(&self) -> Vec<Vec<Rational>> {
        self.rows
            .iter()
            .map(|r| {
                let mut dense = vec![Rational::zero(); self.columns.len()];
                for &(c, v) in r {
                    dense[c] += Rational::from_integer(v.into());
                }
                dense
            })
            .collect()
    }

    /// Drops the columns for which `keep` is false.
    fn eliminate(&self, keep: &[bool]) -> Layout {
        let mut remap = vec![None; self.columns.len()];
        let mut columns = Vec::new();
        let mut objective = Vec::new();
        let mut eliminated = self.eliminated.clone();
        for (i, col) in self.columns.iter().enumerate() {
            if keep[i] {
                remap[i] = Some(columns.len());
                columns.push(col.clone());
                objective.push(self.objective[i].clone());
            } else {
                eliminated.push(col.clone());
            }
        }
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().filter_map(|&(c, v)| remap[c].map(|nc| (nc, v))).collect())
            .collect();
        Layout {
            columns,
            eliminated,
            rows,
            rhs: self.rhs.clone(),
            objective,
            marginal_rows: self.marginal_rows,
            normalization_rows: self.normalization_rows,
            names: self.names.clone(),
        }
    }
}

/// The basic LP relaxation. The `≤ 1` bounds are implied by nonnegativity
/// and the normalization rows, so they are not encoded.
#[derive(Clone, Debug)]
pub struct BlpProgram {
    pub layout: Layout,
    pub lp: LinearProgram,
}

impl BlpProgram {
    pub fn value(&self) -> ExtendedValue {
        blp_value(&exactlp::solve_lp(&self.lp))
    }
}

fn blp_value(res: &LpResult) -> ExtendedValue {
    match res {
        LpResult::Infeasible => ExtendedValue::PlusInfinity,
        // Bounded polytope; kept for completeness.
        LpResult::Unbounded => ExtendedValue::MinusInfinity,
        LpResult::Optimal { value, .. } => ExtendedValue::Finite(value.clone()),
    }
}

pub fn build_blp(delta: &ValuedStructure, instance: &Instance) -> Result<BlpProgram> {
    let layout = Layout::build(delta, instance)?;
    let lp = LinearProgram::new(
        layout.columns.len(),
        layout.dense_rows(),
        layout.rhs.iter().map(|&b| Rational::from_integer(b.into())).collect(),
        layout.objective.clone(),
    )?;
    Ok(BlpProgram { layout, lp })
}

/// The affine integer relaxation: same rows, unbounded integer columns.
#[derive(Clone, Debug)]
pub struct AipProgram {
    pub layout: Layout,
}

impl AipProgram {
    pub fn matrix(&self) -> IntegerMatrix {
        let l = &self.layout;
        let mut data = vec![vec![BigInt::zero(); l.columns.len()]; l.rows.len()];
        for (r, row) in l.rows.iter().enumerate() {
            for &(c, v) in row {
                data[r][c] += v;
            }
        }
        IntegerMatrix::new(l.rows.len(), l.columns.len(), data).expect("rectangular by construction")
    }

    pub fn rhs(&self) -> Vec<BigInt> {
        self.layout.rhs.iter().map(|&b| BigInt::from(b)).collect()
    }

    pub fn solve(&self) -> Result<IntegerSolution> {
        lattice::solve_integer_system(&self.matrix(), &self.rhs())
    }

    pub fn value(&self) -> Result<ExtendedValue> {
        lattice::evaluate_affine_min(&self.layout.objective, &self.solve()?)
    }
}

pub fn build_aip(delta: &ValuedStructure, instance: &Instance) -> Result<AipProgram> {
    Ok(AipProgram {
        layout: Layout::build(delta, instance)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StarProvenance {
    /// Relative interior of the whole feasibility polytope, cost ≤ u.
    FeasibleInterior,
    /// Relative interior of the optimal face (optimum = u).
    OptimalFaceInterior,
}

impl fmt::Display for StarProvenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StarProvenance::FeasibleInterior => "feasible-interior",
            StarProvenance::OptimalFaceInterior => "optimal-face-interior",
        })
    }
}

#[derive(Clone, Debug)]
pub struct StarPoint {
    /// One value per BLP column, aligned with `columns`.
    pub values: Vec<Rational>,
    pub columns: Vec<Column>,
    pub provenance: StarProvenance,
    /// Support profile of the polytope named by `provenance`.
    pub profile: SupportProfile,
    pub cost: Rational,
}

/// Chooses `(λ*, μ*)`: a relative-interior point of the feasibility
/// polytope with cost at most `u` when one exists, otherwise a
/// relative-interior point of the optimal face.
///
/// With `p` interior and `m` the optimum, such a point exists iff
/// `cost(p) ≤ u` or `m < u`; in the latter case moving from `p` toward an
/// optimal vertex by `θ = (θ* + 1)/2` stays interior and gets below `u`.
pub fn select_star_point(blp: &BlpProgram, u: &Rational) -> Result<StarPoint> {
    let (m, vertex) = match exactlp::solve_lp(&blp.lp) {
        LpResult::Optimal { value, point } if &value <= u => (value, point),
        other => {
            return Err(Error::PreconditionViolated(format!(
                "BLP value {} exceeds threshold",
                blp_value(&other)
            )))
        }
    };
    let interior = exactlp::interior_witness(&blp.lp)?;
    let cost_p = blp.lp.objective_value(&interior.point);
    let (values, provenance, profile) = if &cost_p <= u {
        (interior.point, StarProvenance::FeasibleInterior, interior.profile)
    } else if &m < u {
        let theta_star = (&cost_p - u) / (&cost_p - &m);
        let theta = (theta_star + Rational::one()) / Rational::from_integer(2.into());
        let keep = Rational::one() - &theta;
        let values = interior
            .point
            .iter()
            .zip(&vertex)
            .map(|(p, x)| &keep * p + &theta * x)
            .collect();
        (values, StarProvenance::FeasibleInterior, interior.profile)
    } else {
        let face = exactlp::restrict_to_optimal_face(&blp.lp)?;
        let w = exactlp::interior_witness(&face)?;
        (w.point, StarProvenance::OptimalFaceInterior, w.profile)
    };
    let star = StarPoint {
        cost: blp.lp.objective_value(&values),
        values,
        columns: blp.layout.columns.clone(),
        provenance,
        profile,
    };
    check_star(blp, &star, u)?;
    Ok(star)
}

fn check_star(blp: &BlpProgram, star: &StarPoint, u: &Rational) -> Result<()> {
    if !blp.lp.is_feasible(&star.values) {
        return Err(Error::Invariant("star point is not BLP-feasible".into()));
    }
    if &star.cost > u {
        return Err(Error::Invariant("star point costs more than the threshold".into()));
    }
    if !star.profile.matches(&star.values) {
        return Err(Error::Invariant(
            "star point support differs from the polytope's support profile".into(),
        ));
    }
    Ok(())
}

/// Fixes to zero every AIP column whose star-point value is zero.
pub fn refine_aip(aip: &AipProgram, star: &StarPoint) -> Result<AipProgram> {
    if aip.layout.columns != star.columns || star.values.len() != star.columns.len() {
        return Err(Error::IndexMisalignment);
    }
    let keep: Vec<bool> = star.values.iter().map(|v| !v.is_zero()).collect();
    Ok(AipProgram {
        layout: aip.layout.eliminate(&keep),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Yes,
    No,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "YES",
            Verdict::No => "NO",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Algorithm {
    #[serde(rename = "combined")]
    Combined,
    #[serde(rename = "blp")]
    BlpOnly,
    #[serde(rename = "aip")]
    AipOnly,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Combined => "combined",
            Algorithm::BlpOnly => "blp",
            Algorithm::AipOnly => "aip",
        })
    }
}

/// Audit record of one solve.
#[derive(Clone, Debug, Serialize)]
pub struct SolveTrace {
    pub algorithm: Algorithm,
    #[serde(serialize_with = "crate::arith::serialize_rational")]
    pub threshold: Rational,
    pub columns: usize,
    pub rows: usize,
    /// Columns removed because their tuple lies outside the cost's domain.
    pub domain_eliminated: usize,
    pub blp_value: Option<ExtendedValue>,
    pub star: Option<StarProvenance>,
    #[serde(skip)]
    pub star_cost: Option<Rational>,
    /// Columns removed by the refinement, by name.
    pub refinement_eliminated: Vec<String>,
    pub aff_value: Option<ExtendedValue>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveAnswer {
    pub verdict: Verdict,
    pub trace: SolveTrace,
}

fn empty_trace(algorithm: Algorithm, layout: &Layout, u: &Rational) -> SolveTrace {
    SolveTrace {
        algorithm,
        threshold: u.clone(),
        columns: layout.columns.len(),
        rows: layout.rows.len(),
        domain_eliminated: layout.eliminated.len(),
        blp_value: None,
        star: None,
        star_cost: None,
        refinement_eliminated: Vec::new(),
        aff_value: None,
    }
}

fn verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::Yes
    } else {
        Verdict::No
    }
}

/// BLP gate, then the AIP refined at the star point.
pub fn combined_solve(delta: &ValuedStructure, instance: &Instance) -> Result<SolveAnswer> {
    let u = instance.threshold();
    let blp = build_blp(delta, instance)?;
    let mut trace = empty_trace(Algorithm::Combined, &blp.layout, u);
    let value = blp.value();
    let passes = value.le_rational(u);
    trace.blp_value = Some(value);
    if !passes {
        return Ok(SolveAnswer {
            verdict: Verdict::No,
            trace,
        });
    }
    let star = select_star_point(&blp, u)?;
    let aip = AipProgram {
        layout: blp.layout.clone(),
    };
    let refined = refine_aip(&aip, &star)?;
    let aff = refined.value()?;
    trace.star = Some(star.provenance);
    trace.star_cost = Some(star.cost.clone());
    trace.refinement_eliminated = star
        .columns
        .iter()
        .zip(&star.values)
        .filter(|(_, v)| v.is_zero())
        .map(|(c, _)| blp.layout.column_name(c))
        .collect();
    let ok = lattice::check_threshold(&aff, u);
    trace.aff_value = Some(aff);
    Ok(SolveAnswer {
        verdict: verdict(ok),
        trace,
    })
}

pub fn blp_only_solve(delta: &ValuedStructure, instance: &Instance) -> Result<SolveAnswer> {
    let u = instance.threshold();
    let blp = build_blp(delta, instance)?;
    let mut trace = empty_trace(Algorithm::BlpOnly, &blp.layout, u);
    let value = blp.value();
    let ok = value.le_rational(u);
    trace.blp_value = Some(value);
    Ok(SolveAnswer {
        verdict: verdict(ok),
        trace,
    })
}

/// The unrefined AIP on its own. Not a sound decision procedure in general;
/// exposed for comparison runs.
pub fn aip_only_solve(delta: &ValuedStructure, instance: &Instance) -> Result<SolveAnswer> {
    let u = instance.threshold();
    let aip = build_aip(delta, instance)?;
    let mut trace = empty_trace(Algorithm::AipOnly, &aip.layout, u);
    let value = aip.value()?;
    let ok = value.le_rational(u);
    trace.aff_value = Some(value);
    Ok(SolveAnswer {
        verdict: verdict(ok),
        trace,
    })
}

pub fn solve(algorithm: Algorithm, delta: &ValuedStructure, instance: &Instance) -> Result<SolveAnswer> {
    match algorithm {
        Algorithm::Combined => combined_solve(delta, instance),
        Algorithm::BlpOnly => blp_only_solve(delta, instance),
        Algorithm::AipOnly => aip_only_solve(delta, instance),
    }
}

/// Produces, for a variable count `d`, a finite structure that agrees with
/// the (possibly infinite) template on every instance with at most `d`
/// variables.
pub trait Sampler {
    fn sample(&self, variables: usize) -> Result<ValuedStructure>;
}

/// Sampler for a structure that is already finite.
#[derive(Clone, Debug)]
pub struct PassThrough(pub ValuedStructure);

impl Sampler for PassThrough {
    fn sample(&self, _variables: usize) -> Result<ValuedStructure> {
        Ok(self.0.clone())
    }
}

impl<F> Sampler for F
where
    F: Fn(usize) -> Result<ValuedStructure>,
{
    fn sample(&self, variables: usize) -> Result<ValuedStructure> {
        self(variables)
    }
}

/// Runs a finite-domain algorithm on the sample for `|V|` variables.
/// `gamma_hint`, when given, must share the sample's signature.
pub fn solve_with_sampler(
    sampler: &dyn Sampler,
    gamma_hint: Option<&ValuedStructure>,
    instance: &Instance,
    algorithm: Algorithm,
) -> Result<SolveAnswer> {
    let sample = sampler.sample(instance.variables().len())?;
    if let Some(hint) = gamma_hint {
        if hint.signature() != sample.signature() {
            return Err(Error::SamplerSignatureMismatch(
                "sample and template signatures differ".into(),
            ));
        }
    }
    if let Err(errs) = instance.resolve(sample.signature()) {
        return Err(Error::SamplerSignatureMismatch(errs[0].to_string()));
    }
    solve(algorithm, &sample, instance)
}

/// Integral BLP point of an assignment: `λ_j(t) = 1` on the tuple the
/// assignment induces, `μ_x(s(x)) = 1`. `None` if some induced tuple was
/// eliminated.
pub fn assignment_point(layout: &Layout, terms: &[ResolvedTerm], values: &[usize]) -> Option<Vec<Rational>> {
    let mut p = vec![Rational::zero(); layout.columns.len()];
    for (j, term) in terms.iter().enumerate() {
        let tuple: Vec<usize> = term.args.iter().map(|&x| values[x]).collect();
        let c = layout.column_index(&Column::Tuple { term: j, tuple })?;
        p[c] = Rational::one();
    }
    for (x, &a) in values.iter().enumerate() {
        let c = layout.column_index(&Column::Marginal { variable: x, label: a })?;
        p[c] = Rational::one();
    }
    Some(p)
}

/// Whether an integer point (as rationals) satisfies the AIP rows exactly.
pub fn satisfies_aip(aip: &AipProgram, point: &[Rational]) -> bool {
    let l = &aip.layout;
    point.len() == l.columns.len()
        && l.rows.iter().zip(&l.rhs).all(|(row, &b)| {
            let s = row.iter().fold(Rational::zero(), |acc, &(c, v)| {
                acc + &point[c] * Rational::from_integer(v.into())
            });
            s == Rational::from_integer(b.into())
        })
}

/// Projects a point on the unrefined layout onto a refined one, provided it
/// vanishes on every eliminated column.
pub fn project_point(from: &Layout, to: &Layout, point: &[Rational]) -> Option<Vec<Rational>> {
    let mut out = vec![Rational::zero(); to.columns.len()];
    for (c, v) in from.columns.iter().zip(point) {
        match to.column_index(c) {
            Some(i) => out[i] = v.clone(),
            None if v.is_zero() => {}
            None => return None,
        }
    }
    Some(out)
}
