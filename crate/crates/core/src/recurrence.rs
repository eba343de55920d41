//! Recurrence coefficients of the Cauchy-Laguerre biorthogonal polynomials.
//!
//! The polynomials are monic, `p_k(x) = Σ_j a_{k,j} x^j` and
//! `q_k(y) = Σ_j â_{k,j} y^j`, biorthogonal under
//! `W(x,y) = x^α y^{α+1} e^{-x-y} / (x+y)`. The coefficients `b_{β,i}` express
//! `x^β` back in the `p` basis, which is what moment matrices need.

use num_traits::{One, Zero};

use crate::ratcore::{binomial, gamma_quotient, int, rat, rising_factorial, GammaArg, RatError, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RecurrenceError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("index out of range: {0}")]
    Index(String),
    #[error(transparent)]
    Rat(#[from] RatError),
}

/// Subsystem dimensions and the ensemble parameter α.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnsembleParams {
    pub m: usize,
    pub alpha: Rational,
    pub n: Option<usize>,
    pub d: Rational,
}

impl EnsembleParams {
    /// Physical dimensions `m <= n`, with `α = n - m - 1/2`.
    pub fn physical(m: usize, n: usize) -> Result<Self, RecurrenceError> {
        if m == 0 || n < m {
            return Err(RecurrenceError::Params(format!("need 1 <= m <= n, got m={m}, n={n}")));
        }
        let alpha = int(n as i64 - m as i64) - rat(1, 2);
        let mut p = Self::with_alpha(m, alpha)?;
        p.n = Some(n);
        Ok(p)
    }

    /// Arbitrary rational `α > -1`.
    pub fn with_alpha(m: usize, alpha: Rational) -> Result<Self, RecurrenceError> {
        if m == 0 {
            return Err(RecurrenceError::Params("m must be positive".into()));
        }
        if alpha <= int(-1) {
            return Err(RecurrenceError::Params(format!("alpha must exceed -1, got {alpha}")));
        }
        let mm = int(m as i64);
        let d = &mm * (&mm + &alpha * int(2) + int(1)) / int(2);
        Ok(EnsembleParams { m, alpha, n: None, d })
    }

    /// True when `α` is `n - m - 1/2` for an integer `n >= m`.
    pub fn is_physical(&self) -> bool {
        let t = &self.alpha + rat(1, 2);
        t.is_integer() && t >= Rational::zero()
    }

    /// The larger dimension implied by a physical `α`.
    pub fn implied_n(&self) -> Option<usize> {
        if let Some(n) = self.n {
            return Some(n);
        }
        if !self.is_physical() {
            return None;
        }
        let t = (&self.alpha + rat(1, 2)).to_integer();
        Some(self.m + usize::try_from(t).ok()?)
    }
}

fn hat_shift(hatted: bool) -> Rational {
    if hatted {
        int(1)
    } else {
        int(0)
    }
}

/// `a_{k,j}` (or `â_{k,j}` when `hatted`), the coefficient of `x^j` in the monic `p_k` (or `q_k`).
pub fn coeff_a(k: usize, j: usize, params: &EnsembleParams, hatted: bool) -> Result<Rational, RecurrenceError> {
    if j > k {
        return Err(RecurrenceError::Index(format!("a_{{{k},{j}}} needs j <= k")));
    }
    let a = &params.alpha;
    let h = hat_shift(hatted);
    let (k_, j_) = (int(k as i64), int(j as i64));
    let two_a = a * int(2);
    let num = [
        GammaArg(&two_a + &k_ + &j_ + int(2)),
        GammaArg(&two_a + &k_ + int(2)),
        GammaArg(a + &k_ + int(1) + &h),
    ];
    let den = [
        GammaArg(&two_a + &k_ * int(2) + int(2)),
        GammaArg(&two_a + &j_ + int(2)),
        GammaArg(a + &j_ + int(1) + &h),
    ];
    let sign = if (k - j) % 2 == 0 { int(1) } else { int(-1) };
    Ok(sign * Rational::from_integer(binomial(k as i64, j as i64)) * gamma_quotient(&num, &den)?)
}

/// Closed form of `b_{k,j}` (or `b̂_{k,j}`); zero outside `0 <= j <= k`.
pub fn coeff_b_closed(k: i64, j: i64, params: &EnsembleParams, hatted: bool) -> Result<Rational, RecurrenceError> {
    if j < 0 || j > k {
        return Ok(Rational::zero());
    }
    let a = &params.alpha;
    let h = hat_shift(hatted);
    let (k_, j_) = (int(k), int(j));
    let two_a = a * int(2);
    let num = [
        GammaArg(&two_a + &k_ + int(2)),
        GammaArg(a + &k_ + int(1) + &h),
        GammaArg(&two_a + &k_ * int(2) + int(3) - &j_ * int(2)),
    ];
    let den = [
        GammaArg(&two_a + &k_ + int(2) - &j_),
        GammaArg(a + &k_ + int(1) - &j_ + &h),
        GammaArg(&two_a + &k_ * int(2) + int(3) - &j_),
    ];
    Ok(Rational::from_integer(binomial(k, j)) * gamma_quotient(&num, &den)?)
}

/// `b_{β,i}` from the triangular recursion seeded by `b_{β,0} = 1`.
pub fn coeff_b_recursive(beta: usize, i: usize, params: &EnsembleParams, hatted: bool) -> Result<Rational, RecurrenceError> {
    if i > beta {
        return Err(RecurrenceError::Index(format!("b_{{{beta},{i}}} needs i <= beta")));
    }
    Ok(b_row_recursive(beta, params, hatted)?.swap_remove(i))
}

/// The whole row `b_{β,0..=β}` by recursion.
fn b_row_recursive(beta: usize, params: &EnsembleParams, hatted: bool) -> Result<Vec<Rational>, RecurrenceError> {
    let mut row = vec![Rational::one()];
    for i in 1..=beta {
        let mut acc = Rational::zero();
        for (j, bj) in row.iter().enumerate() {
            acc -= bj * coeff_a(beta - j, beta - i, params, hatted)?;
        }
        row.push(acc);
    }
    Ok(row)
}

/// Both sides of the combinatorial identity equivalent to the closed form of `b`.
///
/// Both sides are multiplied by `Γ(2α+2k+3)/Γ(2α+2k+3-2i)`. This keeps them
/// rational and finite even where `2α+2k+3-2i` is a non-positive integer and
/// the unscaled sides share a pole.
pub fn bcon_identity(i: usize, k: usize, params: &EnsembleParams) -> Result<(Rational, Rational), RecurrenceError> {
    if i == 0 {
        return Err(RecurrenceError::Index("bcon_identity needs i >= 1".into()));
    }
    let two_a = &params.alpha * int(2);
    let (i_, k_) = (int(i as i64), int(k as i64));
    let base = &two_a + &k_ * int(2);
    let top = GammaArg(&base + int(3));
    let low = GammaArg(&base + int(3) - &i_ * int(2));
    let mut lhs = Rational::zero();
    for j in 0..i {
        let j_ = int(j as i64);
        let sign = if j % 2 == 0 { int(1) } else { int(-1) };
        let c = Rational::from_integer(binomial(i as i64, j as i64));
        let lin = &base + int(2) - &j_ * int(2);
        let g = gamma_quotient(
            &[GammaArg(&base - &i_ - &j_ + int(2)), top.clone()],
            &[GammaArg(&base + int(3) - &j_), low.clone()],
        )?;
        lhs += sign * c * lin * g;
    }
    let sign = if (i - 1) % 2 == 0 { int(1) } else { int(-1) };
    let rhs = sign * gamma_quotient(&[top], &[GammaArg(&base + int(3) - &i_)])?;
    Ok((lhs, rhs))
}

/// Which coefficient pair builds a moment matrix.
///
/// Entry `(k,j)` is `Σ_ℓ c_{k,ℓ} d_{β+ℓ,β+ℓ-j}` with `(c, d)` taken as
/// `(a, b)` for [`Plain`](MatrixKind::Plain), `(â, b̂)` for
/// [`Hatted`](MatrixKind::Hatted), `(â, b)` for [`Mixed`](MatrixKind::Mixed)
/// and `(a, b̂)` for [`MixedHat`](MatrixKind::MixedHat).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatrixKind {
    Plain,
    Hatted,
    Mixed,
    MixedHat,
}

impl MatrixKind {
    fn flags(self) -> (bool, bool) {
        match self {
            MatrixKind::Plain => (false, false),
            MatrixKind::Hatted => (true, true),
            MatrixKind::Mixed => (true, false),
            MatrixKind::MixedHat => (false, true),
        }
    }
}

/// Square matrix of rationals, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    pub n: usize,
    pub data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(n: usize) -> Self {
        RatMatrix { n, data: vec![Rational::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul(&self, o: &RatMatrix) -> RatMatrix {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        out.data[i * n + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Rational {
        (0..self.n).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// `diag(d) · self`.
    pub fn scale_rows(&self, d: &[Rational]) -> RatMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                out.data[i * self.n + j] *= &d[i];
            }
        }
        out
    }
}

/// `m × m` moment matrix at power `β`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentMatrix {
    pub beta: usize,
    pub kind: MatrixKind,
    pub entries: RatMatrix,
}

impl MomentMatrix {
    pub fn trace(&self) -> Rational {
        self.entries.trace()
    }
}

/// Memoized coefficient tables for one parameter point.
///
/// `a[k][j]` for `j <= k <= max_k`, `b[β][i]` for `i <= β <= max_k + max_beta`.
#[derive(Debug, Clone)]
pub struct CoeffTables {
    pub params: EnsembleParams,
    pub a: Vec<Vec<Rational>>,
    pub a_hat: Vec<Vec<Rational>>,
    pub b: Vec<Vec<Rational>>,
    pub b_hat: Vec<Vec<Rational>>,
    pub max_k: usize,
    pub max_beta: usize,
}

impl CoeffTables {
    /// Tables sufficient for moments up to the third (`x^6` insertions).
    pub fn for_moments(params: &EnsembleParams) -> Result<Self, RecurrenceError> {
        Self::new(params, params.m - 1 + 6, params.m - 1 + 6)
    }

    pub fn new(params: &EnsembleParams, max_k: usize, max_beta: usize) -> Result<Self, RecurrenceError> {
        let a_table = |hat: bool| -> Result<Vec<Vec<Rational>>, RecurrenceError> {
            (0..=max_k).map(|k| (0..=k).map(|j| coeff_a(k, j, params, hat)).collect()).collect()
        };
        let top = max_k + max_beta;
        let b_table = |hat: bool| -> Result<Vec<Vec<Rational>>, RecurrenceError> {
            (0..=top as i64).map(|k| (0..=k).map(|j| coeff_b_closed(k, j, params, hat)).collect()).collect()
        };
        Ok(CoeffTables {
            params: params.clone(),
            a: a_table(false)?,
            a_hat: a_table(true)?,
            b: b_table(false)?,
            b_hat: b_table(true)?,
            max_k,
            max_beta,
        })
    }

    /// `b_{β,i}` with zero extension outside `0 <= i <= β`.
    pub fn b_at(&self, beta: i64, i: i64, hatted: bool) -> Rational {
        if i < 0 || i > beta || beta < 0 {
            return Rational::zero();
        }
        let t = if hatted { &self.b_hat } else { &self.b };
        t[beta as usize][i as usize].clone()
    }

    pub fn a_at(&self, k: usize, j: usize, hatted: bool) -> &Rational {
        if hatted {
            &self.a_hat[k][j]
        } else {
            &self.a[k][j]
        }
    }

    /// Moment matrix of size `params.m` at power `beta`.
    pub fn moment_matrix(&self, beta: usize, kind: MatrixKind) -> MomentMatrix {
        let m = self.params.m;
        assert!(m - 1 <= self.max_k && beta <= self.max_beta, "moment_matrix outside table range");
        let (ah, bh) = kind.flags();
        let mut entries = RatMatrix::zeros(m);
        for k in 0..m {
            for j in 0..m {
                let mut acc = Rational::zero();
                for l in 0..=k {
                    let b = self.b_at((beta + l) as i64, (beta + l) as i64 - j as i64, bh);
                    if !b.is_zero() {
                        acc += self.a_at(k, l, ah) * b;
                    }
                }
                entries.set(k, j, acc);
            }
        }
        MomentMatrix { beta, kind, entries }
    }
}

/// Moment matrix at power `beta`, building just the tables it needs.
pub fn moment_matrix(beta: usize, params: &EnsembleParams, kind: MatrixKind) -> Result<MomentMatrix, RecurrenceError> {
    let t = CoeffTables::new(params, params.m - 1, beta)?;
    Ok(t.moment_matrix(beta, kind))
}

/// `∫∫ x^i y^j W / (Γ(α+1)Γ(α+2)) = (α+1)_i (α+2)_j / (i+j+2α+2)`.
pub fn normalized_bimoment(i: usize, j: usize, alpha: &Rational) -> Rational {
    let num = rising_factorial(&(alpha + int(1)), i as i64).unwrap() * rising_factorial(&(alpha + int(2)), j as i64).unwrap();
    num / (int((i + j) as i64) + alpha * int(2) + int(2))
}

/// `h_k / (Γ(α+1)Γ(α+2))` from the coefficient tables.
pub fn normalized_h(k: usize, tables: &CoeffTables) -> Rational {
    let al = &tables.params.alpha;
    let mut acc = Rational::zero();
    for i in 0..=k {
        for j in 0..=k {
            acc += tables.a_at(k, i, false) * tables.a_at(k, j, true) * normalized_bimoment(i, j, al);
        }
    }
    acc
}
