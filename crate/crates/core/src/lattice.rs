//! Integer linear algebra: column-style Hermite normal form, integer
//! solutions of `Ax = b`, and the value of a linear objective over an
//! affine integer lattice.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{ExtendedValue, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<BigInt>>,
}

impl IntegerMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Vec<BigInt>>) -> Result<Self> {
        if data.len() != rows || data.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("matrix is not rectangular".into()));
        }
        Ok(IntegerMatrix { rows, cols, data })
    }

    pub fn from_i64(rows: &[&[i64]], cols: usize) -> Result<Self> {
        let data = rows
            .iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect();
        IntegerMatrix::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            data: vec![vec![BigInt::zero(); cols]; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntegerMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = BigInt::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r][c]
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r]
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        self.data.iter().map(|r| r[c].clone()).collect()
    }

    pub fn mul(&self, other: &IntegerMatrix) -> Result<IntegerMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch("matrix product shapes".into()));
        }
        let mut out = IntegerMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i][j] += a * &other.data[k][j];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch("matrix-vector shapes".into()));
        }
        Ok(self
            .data
            .iter()
            .map(|r| r.iter().zip(x).fold(BigInt::zero(), |acc, (a, b)| acc + a * b))
            .collect())
    }

    /// Determinant by fraction-free Bareiss elimination. Square matrices only.
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut m = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(i) => {
                        m.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = v / &prev;
                }
            }
            prev = m[k][k].clone();
        }
        Ok(if n == 0 { BigInt::one() } else { sign * &m[n - 1][n - 1] })
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for r in &mut self.data {
            r.swap(a, b);
        }
    }

    /// column `dst` -= q * column `src`
    fn sub_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        for r in &mut self.data {
            let v = &r[src] * q;
            r[dst] -= v;
        }
    }

    fn negate_col(&mut self, c: usize) {
        for r in &mut self.data {
            r[c] = -&r[c];
        }
    }
}

/// `A·U = H` with `U` unimodular and `H` in column Hermite normal form.
#[derive(Clone, Debug)]
pub struct HermiteForm {
    pub h: IntegerMatrix,
    pub u: IntegerMatrix,
    /// `(row, column)` of each pivot; pivot columns are `0..rank`.
    pub pivots: Vec<(usize, usize)>,
}

impl HermiteForm {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Column-style Hermite normal form by Euclidean column reduction.
///
/// Pivot `k` sits at `(r_k, k)` with `r_0 < r_1 < …`; entries right of a
/// pivot in its row are zero, the pivot is positive, and entries to its
/// left lie in `[0, pivot)`.
pub fn hermite_normal_form(a: &IntegerMatrix) -> HermiteForm {
    let n = a.cols;
    let mut h = a.clone();
    let mut u = IntegerMatrix::identity(n);
    let mut pivots = Vec::new();
    let mut p = 0;
    for r in 0..a.rows {
        if p == n {
            break;
        }
        while let Some(min_col) = (p..n)
            .filter(|&c| !h.data[r][c].is_zero())
            .min_by(|&x, &y| h.data[r][x].abs().cmp(&h.data[r][y].abs()))
        {
            if min_col != p {
                h.swap_cols(p, min_col);
                u.swap_cols(p, min_col);
            }
            let mut done = true;
            for c in p + 1..n {
                if h.data[r][c].is_zero() {
                    continue;
                }
                let q = h.data[r][c].div_floor(&h.data[r][p]);
                h.sub_col(c, p, &q);
                u.sub_col(c, p, &q);
                if !h.data[r][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.data[r][p].is_zero() {
            continue;
        }
        if h.data[r][p].is_negative() {
            h.negate_col(p);
            u.negate_col(p);
        }
        let piv = h.data[r][p].clone();
        for c in 0..p {
            let q = h.data[r][c].div_floor(&piv);
            if !q.is_zero() {
                h.sub_col(c, p, &q);
                u.sub_col(c, p, &q);
            }
        }
        pivots.push((r, p));
        p += 1;
    }
    HermiteForm { h, u, pivots }
}

/// Solution set `{x0 + Σ z_i v_i : z ∈ Z^k}` of an integer system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineLattice {
    pub particular: Vec<BigInt>,
    pub kernel: Vec<Vec<BigInt>>,
}

impl AffineLattice {
    pub fn dimension(&self) -> usize {
        self.particular.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntegerSolution {
    Infeasible,
    Lattice(AffineLattice),
}

pub fn solve_integer_system(a: &IntegerMatrix, b: &[BigInt]) -> Result<IntegerSolution> {
    if b.len() != a.rows {
        return Err(Error::DimensionMismatch(format!(
            "{} rows but right-hand side of length {}",
            a.rows,
            b.len()
        )));
    }
    let hf = hermite_normal_form(a);
    let n = a.cols;
    // Solve H y = b by forward substitution along the pivot rows.
    let mut y = vec![BigInt::zero(); n];
    for (k, &(r, c)) in hf.pivots.iter().enumerate() {
        debug_assert_eq!(c, k);
        let partial = (0..k).fold(BigInt::zero(), |acc, j| acc + &hf.h.data[r][j] * &y[j]);
        let rest = &b[r] - partial;
        let (quot, rem) = rest.div_rem(&hf.h.data[r][k]);
        if !rem.is_zero() {
            return Ok(IntegerSolution::Infeasible);
        }
        y[k] = quot;
    }
    if hf.h.mul_vec(&y)? != b {
        return Ok(IntegerSolution::Infeasible);
    }
    let particular = hf.u.mul_vec(&y)?;
    let kernel = (hf.rank()..n).map(|c| hf.u.column(c)).collect();
    Ok(IntegerSolution::Lattice(AffineLattice { particular, kernel }))
}

fn int_dot(c: &[Rational], x: &[BigInt]) -> Rational {
    c.iter()
        .zip(x)
        .filter(|(a, b)| !a.is_zero() && !b.is_zero())
        .fold(Rational::zero(), |acc, (a, b)| {
            acc + a * Rational::from_integer(b.clone())
        })
}

/// `min c·x` over the lattice. A linear objective on an affine lattice is
/// either constant or unbounded below, so the value is always one of
/// `+∞` (infeasible), a finite constant, or `-∞`.
pub fn evaluate_affine_min(c: &[Rational], solution: &IntegerSolution) -> Result<ExtendedValue> {
    let lattice = match solution {
        IntegerSolution::Infeasible => return Ok(ExtendedValue::PlusInfinity),
        IntegerSolution::Lattice(l) => l,
    };
    if c.len() != lattice.dimension() {
        return Err(Error::DimensionMismatch(format!(
            "objective of length {} on a lattice of dimension {}",
            c.len(),
            lattice.dimension()
        )));
    }
    if lattice.kernel.iter().any(|v| !int_dot(c, v).is_zero()) {
        Ok(ExtendedValue::MinusInfinity)
    } else {
        Ok(ExtendedValue::Finite(int_dot(c, &lattice.particular)))
    }
}

pub fn check_threshold(value: &ExtendedValue, u: &Rational) -> bool {
    value.le_rational(u)
}
