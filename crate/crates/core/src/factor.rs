//! Lower-triangular factorizations of the counting and averaging workloads,
//! together with the closed-form norm bounds used for reporting.
//!
//! The counting workload `M_count` (ones on and below the diagonal) factors as
//! `L = R` with the Toeplitz entries `R[i, j] = f(i - j)`, where
//! `f(k) = C(2k, k) / 4^k`. Only the `T` coefficients are ever stored.
//!
//! The averaging workload `M_average` (`1/i` on and below the diagonal of row
//! `i`) factors as `R · R` for a nonnegative lower-triangular `R`, solved row
//! by row.
//!
//! All indices in this module are 0-based: row `i` of a matrix corresponds to
//! time step `i + 1`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest dimension materialized densely unless an explicit limit is passed.
pub const DENSE_LIMIT: usize = 1 << 10;

/// Negative entries of magnitude below this are treated as round-off and clamped.
pub const CLAMP_TOLERANCE: f64 = 1e-10;

/// The counting-factor coefficient `f(k)`.
///
/// `f(k) = 0` for `k < 0`, `f(0) = 1` and `f(k) = (2k - 1) / (2k) · f(k - 1)`.
pub fn factor_coeff(k: i64) -> f64 {
    if k < 0 {
        return 0.0;
    }
    let mut f = 1.0;
    for i in 1..=k {
        f *= (2 * i - 1) as f64 / (2 * i) as f64;
    }
    f
}

/// Dot product over eight independent lanes, so the loop vectorizes.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut lanes = [0.0f64; 8];
    let (ca, cb) = (a.chunks_exact(8), b.chunks_exact(8));
    let tail: f64 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            lanes[k] += x[k] * y[k];
        }
    }
    lanes.iter().sum::<f64>() + tail
}

/// Sum with Neumaier compensation; the cosecant sums mix terms of very different size.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Prefix `f(0), …, f(T - 1)` of the counting-factor recurrence.
///
/// This is the whole of `L` and `R` for the counting workload of dimension `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorCoeffs {
    coeffs: Vec<f64>,
    // coeffs reversed, so Toeplitz row products become forward dot products
    reversed: Vec<f64>,
    // sq_prefix[t] = sum_{k < t} f(k)^2
    sq_prefix: Vec<f64>,
}

impl FactorCoeffs {
    /// Number of stored coefficients, i.e. the largest supported dimension.
    pub fn horizon(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `f(k)`; panics if `k` is beyond the horizon.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs[k]
    }

    /// Squared row norm of row `t` (equivalently of the largest row or column
    /// of the `t × t` principal submatrix): `sum_{k < t} f(k)^2`.
    pub fn norm_sq(&self, t: usize) -> f64 {
        self.sq_prefix[t]
    }

    /// `sum_{i < t} f(t - 1 - i) · values[i]`: row `t - 1` of the Toeplitz
    /// factor applied to the first `t` entries of `values`.
    pub fn toeplitz_row_dot(&self, t: usize, values: &[f64]) -> f64 {
        let n = self.coeffs.len();
        debug_assert!(t <= n && values.len() >= t);
        dot(&self.reversed[n - t..], &values[..t])
    }
}

/// Builds the counting factor of dimension `t`.
pub fn counting_factor(t: usize) -> Result<FactorCoeffs> {
    if t == 0 {
        return Err(Error::InvalidHorizon { min: 1, got: 0 });
    }
    let mut coeffs = Vec::with_capacity(t);
    let mut sq_prefix = Vec::with_capacity(t + 1);
    sq_prefix.push(0.0);
    let mut f = 1.0f64;
    let mut acc = 0.0f64;
    for k in 0..t {
        if k > 0 {
            f *= (2 * k - 1) as f64 / (2 * k) as f64;
        }
        coeffs.push(f);
        acc += f * f;
        sq_prefix.push(acc);
    }
    let reversed = coeffs.iter().rev().copied().collect();
    Ok(FactorCoeffs {
        coeffs,
        reversed,
        sq_prefix,
    })
}

/// Exact maximum row and column `ℓ2` norms of a factor's principal submatrix.
pub trait FactorNorms {
    /// `(‖F_t‖_{2→∞}, ‖F_t‖_{1→2})`: the largest row norm and the largest
    /// column norm of the `t × t` principal submatrix `F_t`.
    fn row_col_norms(&self, t: usize) -> (f64, f64);
}

impl FactorNorms for FactorCoeffs {
    fn row_col_norms(&self, t: usize) -> (f64, f64) {
        // Toeplitz: the last row and the first column hold the same values.
        let n = self.norm_sq(t).sqrt();
        (n, n)
    }
}

/// Square matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        DenseMatrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `L · R` for the counting factor, materialized densely.
///
/// Rejects `t` above [`DENSE_LIMIT`]; use [`reconstruct_product_with_limit`]
/// to raise the limit.
pub fn reconstruct_product(coeffs: &FactorCoeffs, t: usize) -> Result<DenseMatrix> {
    reconstruct_product_with_limit(coeffs, t, DENSE_LIMIT)
}

pub fn reconstruct_product_with_limit(
    coeffs: &FactorCoeffs,
    t: usize,
    limit: usize,
) -> Result<DenseMatrix> {
    if t > limit {
        return Err(Error::DenseLimit { dim: t, limit });
    }
    if t > coeffs.horizon() {
        return Err(Error::InvalidInput(format!(
            "dimension {t} exceeds the factor horizon {}",
            coeffs.horizon()
        )));
    }
    let f = coeffs.coeffs();
    let mut out = DenseMatrix::zeros(t);
    for i in 0..t {
        for j in 0..=i {
            // (LR)[i, j] = sum_{j <= k <= i} f(i - k) f(k - j)
            let v: f64 = (j..=i).map(|k| f[i - k] * f[k - j]).sum();
            out.set(i, j, v);
        }
    }
    Ok(out)
}

/// Nonnegative lower-triangular square root of the averaging workload.
///
/// Rows are appended one at a time, so the factor for dimension `t` is the
/// `t × t` principal submatrix of any larger one.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerTriFactor {
    dim: usize,
    // packed row-major lower triangle: row i occupies [i(i+1)/2, i(i+1)/2 + i]
    entries: Vec<f64>,
    col_sq: Vec<f64>,
    row_sq: Vec<f64>,
    // max_*_sq[t] refer to the t × t principal submatrix; index 0 is unused
    max_row_sq: Vec<f64>,
    max_col_sq: Vec<f64>,
    clamped: usize,
}

impl Default for LowerTriFactor {
    fn default() -> Self {
        LowerTriFactor {
            dim: 0,
            entries: Vec::new(),
            col_sq: Vec::new(),
            row_sq: Vec::new(),
            max_row_sq: vec![0.0],
            max_col_sq: vec![0.0],
            clamped: 0,
        }
    }
}

impl LowerTriFactor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of entries in `(-CLAMP_TOLERANCE, 0)` that were clamped to zero.
    pub fn clamped_entries(&self) -> usize {
        self.clamped
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let start = i * (i + 1) / 2;
        &self.entries[start..=start + i]
    }

    /// Entry `(i, j)`, zero above the diagonal.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i {
            0.0
        } else {
            self.row(i)[j]
        }
    }

    /// `ℓ2` norm of row `i`.
    pub fn row_norm(&self, i: usize) -> f64 {
        self.row_sq[i].sqrt()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for (j, v) in self.row(i).iter().enumerate() {
                out.set(i, j, *v);
            }
        }
        out
    }

    /// Solves the next row so that `(R · R)[i, j] = 1 / (i + 1)` for all `j <= i`.
    ///
    /// With `d = R[i, i]`, each off-diagonal entry satisfies
    /// `R[i, j] (R[j, j] + d) = 1/(i+1) - sum_{j < k < i} R[i, k] R[k, j]`,
    /// which is solved right to left.
    pub fn push_row(&mut self) -> Result<()> {
        let i = self.dim;
        let n = (i + 1) as f64;
        let diag = 1.0 / n.sqrt();
        let target = 1.0 / n;

        let mut row = vec![0.0; i + 1];
        row[i] = diag;
        // acc[m] = sum_{k > m, k < i, already solved} R[i, k] R[k, m]
        let mut acc = vec![0.0; i];
        let mut clamped = 0;
        for j in (0..i).rev() {
            let prev = self.row(j);
            let mut v = (target - acc[j]) / (prev[j] + diag);
            if v < 0.0 {
                if v < -CLAMP_TOLERANCE {
                    return Err(Error::NumericalFailure {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
                clamped += 1;
                v = 0.0;
            }
            row[j] = v;
            for (a, r) in acc[..j].iter_mut().zip(&prev[..j]) {
                *a += v * r;
            }
        }

        self.clamped += clamped;
        let rsq: f64 = row.iter().map(|v| v * v).sum();
        self.col_sq.push(0.0);
        let mut max_col = self.max_col_sq[i];
        for (c, v) in self.col_sq.iter_mut().zip(&row) {
            *c += v * v;
            max_col = max_col.max(*c);
        }
        self.entries.extend_from_slice(&row);
        self.row_sq.push(rsq);
        let max_row = self.max_row_sq[i].max(rsq);
        self.max_row_sq.push(max_row);
        self.max_col_sq.push(max_col);
        self.dim += 1;
        Ok(())
    }
}

impl FactorNorms for LowerTriFactor {
    fn row_col_norms(&self, t: usize) -> (f64, f64) {
        (self.max_row_sq[t].sqrt(), self.max_col_sq[t].sqrt())
    }
}

/// Solves the square-root factor of the averaging workload of dimension `t`.
pub fn averaging_factor(t: usize) -> Result<LowerTriFactor> {
    if t == 0 {
        return Err(Error::InvalidHorizon { min: 1, got: 0 });
    }
    let mut factor = LowerTriFactor::default();
    for _ in 0..t {
        factor.push_row()?;
    }
    Ok(factor)
}

/// Which workload a [`WorkloadMatrix`] represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorkloadKind {
    Count,
    Average,
}

/// Implicit prefix-sum or running-mean workload; entries computed on demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WorkloadMatrix {
    pub kind: WorkloadKind,
    pub dim: usize,
}

impl WorkloadMatrix {
    pub fn count(dim: usize) -> Self {
        WorkloadMatrix {
            kind: WorkloadKind::Count,
            dim,
        }
    }

    pub fn average(dim: usize) -> Self {
        WorkloadMatrix {
            kind: WorkloadKind::Average,
            dim,
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i < j {
            return 0.0;
        }
        match self.kind {
            WorkloadKind::Count => 1.0,
            WorkloadKind::Average => 1.0 / (i + 1) as f64,
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..=i {
                out.set(i, j, self.entry(i, j));
            }
        }
        out
    }
}

/// `1 + ln(T - 1) / π`, the closed-form bound on the counting factor's norm product.
pub fn counting_norm_bound(t: usize) -> Result<f64> {
    if t < 2 {
        return Err(Error::InvalidHorizon { min: 2, got: t });
    }
    Ok(1.0 + ((t - 1) as f64).ln() / PI)
}

/// `2 T (T + 1) π² / (3 (2T + 1)²)`; approaches `π²/6` from below.
pub fn averaging_norm_bound(t: usize) -> f64 {
    assert!(t >= 1, "averaging bound needs T >= 1");
    let t = t as f64;
    2.0 * t * (t + 1.0) * PI * PI / (3.0 * (2.0 * t + 1.0).powi(2))
}

/// `‖L_T‖_{2→∞} · ‖R_T‖_{1→2} = 1 + sum_{k=1}^{T-1} f(k)^2` for the counting
/// factor, evaluated in `O(T)` time without storing coefficients.
pub fn counting_norm_product(t: usize) -> f64 {
    let mut f = 1.0f64;
    let mut acc = 1.0f64;
    for k in 1..t {
        f *= (2 * k - 1) as f64 / (2 * k) as f64;
        acc += f * f;
    }
    acc
}

/// Mathias's cosecant average `(1/T) sum_{j=1}^T |1 / sin((2j - 1) π / (2T))|`.
pub fn gamma_hat(t: usize) -> f64 {
    assert!(t >= 1, "gamma_hat needs T >= 1");
    let tf = t as f64;
    let sum =
        compensated_sum((1..=t).map(|j| 1.0 / ((2 * j - 1) as f64 * PI / (2.0 * tf)).sin().abs()));
    sum / tf
}

/// Closed-form bounds on the factorization norm of the counting workload.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub t: usize,
    /// `1 + ln(T-1)/π`; undefined for `T = 1`.
    pub ours_upper: Option<f64>,
    pub gamma_hat: f64,
    pub mathias_lower: f64,
    pub mathias_upper: f64,
    /// Achieved `‖L‖_{2→∞} ‖R‖_{1→2}` of the counting factor.
    pub exact_norm_product: f64,
}

pub fn mathias_bounds(t: usize) -> BoundReport {
    let g = gamma_hat(t);
    let tf = t as f64;
    BoundReport {
        t,
        ours_upper: counting_norm_bound(t).ok(),
        gamma_hat: g,
        mathias_lower: (0.5 + 0.5 / tf) * g,
        mathias_upper: 0.5 * g + 0.5,
        exact_norm_product: counting_norm_product(t),
    }
}

/// `ψ'(x) = Σ_{i≥0} 1/(x+i)²` by its asymptotic series; accurate to double precision for `x > 64`.
fn trigamma_asymptotic(x: f64) -> f64 {
    let r = 1.0 / (x * x);
    let series =
        r * (1.0 / 6.0 - r * (1.0 / 30.0 - r * (1.0 / 42.0 - r * (1.0 / 30.0 - r * 5.0 / 66.0))));
    1.0 / x + r / 2.0 + series / x
}

/// Sandwich on the partial zeta sum `sqrt(sum_{i<=T} 1/i^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaSandwich {
    pub lower: f64,
    pub exact: f64,
    pub upper: f64,
}

pub fn partial_zeta_bounds(t: usize) -> ZetaSandwich {
    assert!(t >= 1, "partial zeta bounds need T >= 1");
    let tf = t as f64;
    let denom = (2.0 * tf + 1.0).powi(2);
    let exact = if t <= 64 {
        // smallest terms first
        (1..=t)
            .rev()
            .map(|i| 1.0 / (i as f64 * i as f64))
            .sum::<f64>()
    } else {
        PI * PI / 6.0 - trigamma_asymptotic(tf + 1.0)
    };
    ZetaSandwich {
        lower: PI * (tf * (2.0 * tf - 1.0) / (3.0 * denom)).sqrt(),
        exact: exact.sqrt(),
        upper: 2.0 * PI * (tf * (tf + 1.0) / (6.0 * denom)).sqrt(),
    }
}
