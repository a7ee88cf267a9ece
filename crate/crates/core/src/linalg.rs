//! Dense linear algebra: exact rational LDLᵀ with diagonal pivoting, and
//! thin wrappers over nalgebra's symmetric eigensolver.

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::{Signed, Zero};

use crate::rational::{to_f64, Rational};

/// Dense square matrix over ℚ, row major.
#[derive(Clone, Debug, PartialEq)]
pub struct RatMatrix {
    n: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Rational::zero(); n * n] }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.n + j] = v;
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn row_sums(&self) -> Vec<Rational> {
        (0..self.n).map(|i| self.data[i * self.n..(i + 1) * self.n].iter().sum()).collect()
    }

    pub fn to_float(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| to_f64(self.get(i, j)))
    }

    /// `P A P` with `P = I − J/n`: the exact projection onto matrices whose
    /// rows and columns sum to zero.
    pub fn project_zero_row_sums(&self) -> Self {
        let n = self.n;
        if n == 0 {
            return self.clone();
        }
        let nn = Rational::from_integer((n as i64).into());
        let r = self.row_sums();
        let c: Vec<Rational> = (0..n).map(|j| (0..n).map(|i| self.get(i, j)).sum()).collect();
        let total: Rational = r.iter().sum();
        let corner = &total / (&nn * &nn);
        Self::from_fn(n, |i, j| self.get(i, j) - &r[i] / &nn - &c[j] / &nn + &corner)
    }
}

/// One rank-one term `d · l lᵀ` of an LDLᵀ factorization.
#[derive(Clone, Debug, PartialEq)]
pub struct Pivot {
    /// Row/column eliminated at this step.
    pub index: usize,
    pub d: Rational,
    /// Column of L in original indexing; `l[index] = 1`, zero on earlier pivots.
    pub l: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LdltOutcome {
    /// `A = Σ d_k l_k l_kᵀ` with every `d_k > 0`; zero pivots are dropped.
    Psd(Vec<Pivot>),
    /// Elimination met a negative pivot or a zero pivot with a nonzero row.
    Indefinite { step: usize },
}

impl LdltOutcome {
    pub fn is_psd(&self) -> bool {
        matches!(self, LdltOutcome::Psd(_))
    }
}

/// Exact LDLᵀ with largest-diagonal pivoting; decides PSD-ness of a
/// symmetric rational matrix.
pub fn ldlt(a: &RatMatrix) -> LdltOutcome {
    let n = a.n;
    let mut s = a.data.clone();
    let mut active: Vec<usize> = (0..n).collect();
    let mut pivots = Vec::new();
    let mut step = 0;
    while !active.is_empty() {
        let (pos, &k) = active
            .iter()
            .enumerate()
            .max_by(|(_, &x), (_, &y)| s[x * n + x].cmp(&s[y * n + y]).then(y.cmp(&x)))
            .expect("non-empty");
        let d = s[k * n + k].clone();
        if d.is_negative() {
            return LdltOutcome::Indefinite { step };
        }
        if d.is_zero() {
            // PSD iff the remaining Schur complement vanishes.
            let rest_zero = active.iter().all(|&i| active.iter().all(|&j| s[i * n + j].is_zero()));
            return if rest_zero { LdltOutcome::Psd(pivots) } else { LdltOutcome::Indefinite { step } };
        }
        active.swap_remove(pos);
        let mut l = vec![Rational::zero(); n];
        l[k] = Rational::from_integer(1.into());
        for &i in &active {
            l[i] = &s[i * n + k] / &d;
        }
        for &i in &active {
            if l[i].is_zero() {
                continue;
            }
            let li_d = &l[i] * &d;
            for &j in &active {
                if !l[j].is_zero() {
                    s[i * n + j] -= &li_d * &l[j];
                }
            }
        }
        pivots.push(Pivot { index: k, d, l });
        step += 1;
    }
    LdltOutcome::Psd(pivots)
}

pub fn is_psd(a: &RatMatrix) -> bool {
    ldlt(a).is_psd()
}

/// Eigenvalues (ascending) and matching eigenvectors of a symmetric matrix.
pub fn sym_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    sym_eigen(m).0[0]
}

/// Orthonormal basis (as columns) of the complement of the all-ones vector.
pub fn ones_complement_basis(n: usize) -> DMatrix<f64> {
    if n <= 1 {
        return DMatrix::zeros(n, 0);
    }
    let p = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } - 1.0 / n as f64);
    let (values, vectors) = sym_eigen(&p);
    // eigenvalue 0 for the ones direction, 1 on its complement
    let cols: Vec<usize> = (0..n).filter(|&i| values[i] > 0.5).collect();
    DMatrix::from_fn(n, cols.len(), |r, c| vectors[(r, cols[c])])
}
