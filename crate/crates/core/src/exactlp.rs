//! Exact linear programming over the rationals in standard equality form
//! `min c·x  s.t.  Ax = b, x ≥ 0`.
//!
//! The solver is a dense two-phase tableau simplex using Bland's rule, so it
//! terminates on every input, degenerate ones included. Relative-interior
//! points are built by averaging one witness per coordinate that can be
//! positive somewhere on the polytope.

use num_traits::{One, Signed, Zero};

use crate::arith::Rational;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram {
    num_vars: usize,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    objective: Vec<Rational>,
}

impl LinearProgram {
    pub fn new(
        num_vars: usize,
        rows: Vec<Vec<Rational>>,
        rhs: Vec<Rational>,
        objective: Vec<Rational>,
    ) -> Result<Self> {
        if rows.len() != rhs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} rows but {} right-hand sides",
                rows.len(),
                rhs.len()
            )));
        }
        if objective.len() != num_vars {
            return Err(Error::DimensionMismatch(format!(
                "objective has {} coefficients for {num_vars} variables",
                objective.len()
            )));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != num_vars) {
            return Err(Error::DimensionMismatch(format!(
                "row {i} has {} coefficients for {num_vars} variables",
                r.len()
            )));
        }
        Ok(LinearProgram {
            num_vars,
            rows,
            rhs,
            objective,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.rhs
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn with_objective(&self, objective: Vec<Rational>) -> Result<Self> {
        LinearProgram::new(self.num_vars, self.rows.clone(), self.rhs.clone(), objective)
    }

    pub fn push_row(&mut self, row: Vec<Rational>, rhs: Rational) -> Result<()> {
        if row.len() != self.num_vars {
            return Err(Error::DimensionMismatch("appended row has wrong length".into()));
        }
        self.rows.push(row);
        self.rhs.push(rhs);
        Ok(())
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }

    /// Exact check of `Ax = b, x ≥ 0`.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && x.iter().all(|v| !v.is_negative())
            && self.rows.iter().zip(&self.rhs).all(|(r, b)| &dot(r, x) == b)
    }
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpResult {
    Infeasible,
    Unbounded,
    Optimal { value: Rational, point: Vec<Rational> },
}

impl LpResult {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpResult::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

struct Tableau {
    a: Vec<Vec<Rational>>,
    b: Vec<Rational>,
    basis: Vec<usize>,
    /// Reduced costs for the active objective.
    d: Vec<Rational>,
    /// Columns that may enter the basis.
    allowed: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c].clone();
        if !p.is_one() {
            let inv = p.recip();
            for v in self.a[r].iter_mut().filter(|v| !v.is_zero()) {
                *v *= &inv;
            }
            self.b[r] *= &inv;
        }
        let prow = self.a[r].clone();
        let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
        let pb = self.b[r].clone();
        for i in 0..self.a.len() {
            if i == r || self.a[i][c].is_zero() {
                continue;
            }
            let f = self.a[i][c].clone();
            for &j in &nz {
                let delta = &f * &prow[j];
                self.a[i][j] -= delta;
            }
            if !pb.is_zero() {
                self.b[i] -= &f * &pb;
            }
        }
        if !self.d[c].is_zero() {
            let f = self.d[c].clone();
            for &j in &nz {
                let delta = &f * &prow[j];
                self.d[j] -= delta;
            }
        }
        self.basis[r] = c;
    }

    fn set_objective(&mut self, costs: &[Rational]) {
        let cols = self.a.first().map_or(costs.len(), |r| r.len());
        let mut d: Vec<Rational> = (0..cols)
            .map(|j| costs.get(j).cloned().unwrap_or_else(Rational::zero))
            .collect();
        for (i, &bi) in self.basis.iter().enumerate() {
            let cb = costs.get(bi).cloned().unwrap_or_else(Rational::zero);
            if cb.is_zero() {
                continue;
            }
            for (j, v) in self.a[i].iter().enumerate() {
                if !v.is_zero() {
                    d[j] -= &cb * v;
                }
            }
        }
        self.d = d;
    }

    /// Runs Bland's-rule simplex on the current objective. Returns false
    /// when the objective is unbounded below.
    fn optimize(&mut self) -> bool {
        loop {
            let Some(c) = (0..self.allowed).find(|&j| self.d[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.a.len() {
                let aic = &self.a[i][c];
                if !aic.is_positive() {
                    continue;
                }
                let ratio = &self.b[i] / aic;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }

    fn point(&self, n: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); n];
        for (i, &bi) in self.basis.iter().enumerate() {
            if bi < n {
                x[bi] = self.b[i].clone();
            }
        }
        x
    }
}

/// Phase one: a tableau whose basis is feasible for `Ax = b`, restricted to
/// the original columns, or `None` if the system is infeasible.
fn feasible_tableau(lp: &LinearProgram) -> Option<Tableau> {
    let n = lp.num_vars;
    let m = lp.rows.len();
    let mut a = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    for (i, (row, rhs)) in lp.rows.iter().zip(&lp.rhs).enumerate() {
        let flip = rhs.is_negative();
        let mut r: Vec<Rational> = Vec::with_capacity(n + m);
        r.extend(row.iter().map(|v| if flip { -v } else { v.clone() }));
        r.extend((0..m).map(|k| if k == i { Rational::one() } else { Rational::zero() }));
        a.push(r);
        b.push(if flip { -rhs } else { rhs.clone() });
    }
    let mut t = Tableau {
        a,
        b,
        basis: (n..n + m).collect(),
        d: Vec::new(),
        allowed: n + m,
    };
    let phase_one: Vec<Rational> = (0..n + m)
        .map(|j| if j >= n { Rational::one() } else { Rational::zero() })
        .collect();
    t.set_objective(&phase_one);
    t.optimize();
    let residual: Rational = t
        .basis
        .iter()
        .zip(&t.b)
        .filter(|(&bi, _)| bi >= n)
        .fold(Rational::zero(), |acc, (_, v)| acc + v);
    if residual.is_positive() {
        return None;
    }
    // Drive zero-level artificials out of the basis; drop redundant rows.
    let mut r = 0;
    while r < t.a.len() {
        if t.basis[r] >= n {
            match (0..n).find(|&j| !t.a[r][j].is_zero()) {
                Some(j) => t.pivot(r, j),
                None => {
                    t.a.remove(r);
                    t.b.remove(r);
                    t.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }
    for row in &mut t.a {
        row.truncate(n);
    }
    t.allowed = n;
    Some(t)
}

pub fn solve_lp(lp: &LinearProgram) -> LpResult {
    let Some(mut t) = feasible_tableau(lp) else {
        return LpResult::Infeasible;
    };
    t.set_objective(&lp.objective);
    if !t.optimize() {
        return LpResult::Unbounded;
    }
    let point = t.point(lp.num_vars);
    LpResult::Optimal {
        value: lp.objective_value(&point),
        point,
    }
}

/// Any feasible point (a vertex), or `None` if the region is empty.
pub fn feasible_point(lp: &LinearProgram) -> Option<Vec<Rational>> {
    feasible_tableau(lp).map(|t| t.point(lp.num_vars))
}

/// Which coordinates can be strictly positive somewhere on the polytope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportProfile {
    pub flags: Vec<bool>,
}

impl SupportProfile {
    pub fn can_be_positive(&self, i: usize) -> bool {
        self.flags[i]
    }

    /// Whether `p` is positive exactly on the flagged coordinates.
    pub fn matches(&self, p: &[Rational]) -> bool {
        p.len() == self.flags.len() && p.iter().zip(&self.flags).all(|(v, &f)| v.is_positive() == f)
    }
}

/// Support profile together with the witnesses that established it.
#[derive(Clone, Debug)]
pub struct InteriorWitness {
    pub profile: SupportProfile,
    pub point: Vec<Rational>,
}

fn unit_objective(n: usize, i: usize, sign: i32) -> Vec<Rational> {
    (0..n)
        .map(|j| {
            if j == i {
                Rational::from_integer(sign.into())
            } else {
                Rational::zero()
            }
        })
        .collect()
}

/// Feasible point with `x_i > 0`, or `None` if `x_i = 0` on the whole region.
fn positive_witness(lp: &LinearProgram, i: usize) -> Result<Option<Vec<Rational>>> {
    let probe = lp.with_objective(unit_objective(lp.num_vars, i, -1))?;
    match solve_lp(&probe) {
        LpResult::Infeasible => Err(Error::InfeasibleRegion),
        LpResult::Optimal { value, point } => Ok(if value.is_negative() { Some(point) } else { None }),
        LpResult::Unbounded => {
            // x_i is unbounded above: any point with x_i = 1 + s, s ≥ 0, will do.
            let mut rows: Vec<Vec<Rational>> = lp
                .rows
                .iter()
                .map(|r| {
                    let mut r = r.clone();
                    r.push(Rational::zero());
                    r
                })
                .collect();
            let mut extra = unit_objective(lp.num_vars + 1, i, 1);
            extra[lp.num_vars] = -Rational::one();
            rows.push(extra);
            let mut rhs = lp.rhs.clone();
            rhs.push(Rational::one());
            let bumped = LinearProgram::new(lp.num_vars + 1, rows, rhs, vec![Rational::zero(); lp.num_vars + 1])?;
            let mut p = feasible_point(&bumped).ok_or(Error::InfeasibleRegion)?;
            p.truncate(lp.num_vars);
            Ok(Some(p))
        }
    }
}

/// Computes the support profile and a relative-interior point.
///
/// Starting from one feasible tableau, each round maximizes the sum of the
/// coordinates not yet seen positive. A positive optimum yields a witness
/// that is positive on at least one new coordinate; an optimum of zero
/// proves the remaining coordinates vanish on the whole region. The
/// average of the witnesses is positive exactly on the possible support,
/// hence lies in the relative interior.
pub fn interior_witness(lp: &LinearProgram) -> Result<InteriorWitness> {
    let n = lp.num_vars;
    let mut t = feasible_tableau(lp).ok_or(Error::InfeasibleRegion)?;
    let mut flags = vec![false; n];
    let mut witnesses: Vec<Vec<Rational>> = Vec::new();
    let mut record = |w: Vec<Rational>, flags: &mut Vec<bool>| {
        for (f, v) in flags.iter_mut().zip(&w) {
            *f |= v.is_positive();
        }
        witnesses.push(w);
    };
    record(t.point(n), &mut flags);
    loop {
        let open: Vec<usize> = (0..n).filter(|&j| !flags[j]).collect();
        if open.is_empty() {
            break;
        }
        let mut objective = vec![Rational::zero(); n];
        for &j in &open {
            objective[j] = -Rational::one();
        }
        t.set_objective(&objective);
        if t.optimize() {
            let w = t.point(n);
            if !open.iter().any(|&j| w[j].is_positive()) {
                break;
            }
            record(w, &mut flags);
        } else {
            for i in open {
                if flags[i] {
                    continue;
                }
                if let Some(w) = positive_witness(lp, i)? {
                    record(w, &mut flags);
                }
            }
            break;
        }
    }
    let k = Rational::from_integer(witnesses.len().into());
    let mut point = vec![Rational::zero(); n];
    for w in &witnesses {
        for (acc, v) in point.iter_mut().zip(w) {
            if !v.is_zero() {
                *acc += v;
            }
        }
    }
    point.iter_mut().for_each(|v| *v /= &k);
    Ok(InteriorWitness {
        profile: SupportProfile { flags },
        point,
    })
}

pub fn support_profile(lp: &LinearProgram) -> Result<SupportProfile> {
    interior_witness(lp).map(|w| w.profile)
}

pub fn relative_interior_point(lp: &LinearProgram) -> Result<Vec<Rational>> {
    interior_witness(lp).map(|w| w.point)
}

/// Appends `c·x = min c·x`, cutting the polytope down to its optimal face.
pub fn restrict_to_optimal_face(lp: &LinearProgram) -> Result<LinearProgram> {
    match solve_lp(lp) {
        LpResult::Infeasible => Err(Error::InfeasibleRegion),
        LpResult::Unbounded => Err(Error::UnboundedObjective),
        LpResult::Optimal { value, .. } => {
            let mut out = lp.clone();
            out.push_row(lp.objective.clone(), value)?;
            Ok(out)
        }
    }
}
