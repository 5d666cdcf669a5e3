//! Forward operators `G: R^N -> R^M` with cached SVD, synthesis of test
//! operators with controlled spectra, and the derived inverse / resolution
//! operators.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mat::{kronecker_dense, CMat, RMat};
use crate::math;
use crate::regularizers::FilterSpec;
use crate::rng::SplitMix64;

/// Default relative tolerance below which the smallest singular value is
/// treated as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 64;

/// An M×N forward operator together with its full SVD `G = U Σ̂ Vᵗ`.
///
/// Invariants established at construction:
/// - `M <= N` and all singular values strictly positive;
/// - `sigma` sorted descending;
/// - `U` is M×M orthogonal, `V` is N×N orthogonal (the last `N - M`
///   columns of `V` span the kernel of `G`);
/// - the sign of each singular vector pair is fixed so that the
///   largest-magnitude entry of `u_i` is positive.
#[derive(Debug, Clone)]
pub struct ForwardModel {
    g: RMat,
    u: RMat,
    sigma: Vec<f64>,
    v: RMat,
}

impl ForwardModel {
    /// Sensor count M.
    #[inline]
    pub fn m(&self) -> usize {
        self.g.rows()
    }

    /// Source count N.
    #[inline]
    pub fn n(&self) -> usize {
        self.g.cols()
    }

    pub fn g(&self) -> &RMat {
        &self.g
    }

    pub fn u(&self) -> &RMat {
        &self.u
    }

    pub fn v(&self) -> &RMat {
        &self.v
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// First M columns of `V` (the range part), as an N×M matrix.
    pub fn v_range(&self) -> RMat {
        RMat::from_fn(self.n(), self.m(), |i, j| self.v.get(i, j))
    }

    /// `U Σ̂ Vᵗ` re-assembled from the stored factors.
    pub fn assemble(&self) -> RMat {
        let m = self.m();
        let mut us = RMat::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                us.set(i, j, self.u.get(i, j) * self.sigma[j]);
            }
        }
        us.mul(&self.v_range().transpose())
    }

    /// `‖G − U Σ̂ Vᵗ‖_F / ‖G‖_F`.
    pub fn reconstruction_defect(&self) -> f64 {
        self.g.sub(&self.assemble()).frobenius_norm() / self.g.frobenius_norm()
    }

    /// `(‖UᵗU − I‖_F, ‖VᵗV − I‖_F)`.
    pub fn orthogonality_defect(&self) -> (f64, f64) {
        let du = self
            .u
            .transpose()
            .mul(&self.u)
            .sub(&RMat::identity(self.m()))
            .frobenius_norm();
        let dv = self
            .v
            .transpose()
            .mul(&self.v)
            .sub(&RMat::identity(self.n()))
            .frobenius_norm();
        (du, dv)
    }
}

/// Compute the SVD of `g` with the default rank tolerance.
pub fn decompose(g: &RMat) -> Result<ForwardModel> {
    decompose_with_tol(g, DEFAULT_RANK_TOL)
}

/// Compute the SVD of `g`, rejecting operators whose smallest singular
/// value is at or below `rank_tol * sigma_max`.
pub fn decompose_with_tol(g: &RMat, rank_tol: f64) -> Result<ForwardModel> {
    let m = g.rows();
    let n = g.cols();
    if m == 0 || n == 0 {
        return Err(Error::Shape(format!("empty operator {m}x{n}")));
    }
    if m > n {
        return Err(Error::Shape(format!(
            "operator must have M <= N, got {m}x{n}"
        )));
    }

    // One-sided Jacobi on Gᵗ: orthogonalize the M columns of the tall
    // N×M matrix; accumulated rotations give U, normalized columns give
    // the range part of V.
    let mut cols: Vec<Vec<f64>> = (0..m).map(|j| g.row_as_col(j)).collect();
    let mut u = RMat::identity(m);
    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..m {
            for q in (p + 1)..m {
                let alpha: f64 = cols[p].iter().map(|x| x * x).sum();
                let beta: f64 = cols[q].iter().map(|x| x * x).sum();
                let gamma: f64 = cols[p].iter().zip(&cols[q]).map(|(a, b)| a * b).sum();
                if math::abs(gamma) <= 1e-15 * math::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + math::sqrt(1.0 + zeta * zeta))
                } else {
                    -1.0 / (-zeta + math::sqrt(1.0 + zeta * zeta))
                };
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = c * t;
                for i in 0..n {
                    let a = cols[p][i];
                    let b = cols[q][i];
                    cols[p][i] = c * a - s * b;
                    cols[q][i] = s * a + c * b;
                }
                for i in 0..m {
                    let a = u.get(i, p);
                    let b = u.get(i, q);
                    u.set(i, p, c * a - s * b);
                    u.set(i, q, s * a + c * b);
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NotConverged(format!(
            "one-sided Jacobi SVD did not settle in {JACOBI_MAX_SWEEPS} sweeps"
        )));
    }

    let mut sigma: Vec<f64> = cols
        .iter()
        .map(|c| math::sqrt(c.iter().map(|x| x * x).sum()))
        .collect();

    // Descending order, stable under ties.
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| sigma[b].partial_cmp(&sigma[a]).expect("finite sigma"));
    let sigma_sorted: Vec<f64> = order.iter().map(|&k| sigma[k]).collect();
    sigma = sigma_sorted;

    if sigma[0] <= 0.0 || sigma[m - 1] <= rank_tol * sigma[0] {
        return Err(Error::RankDeficient {
            ratio: if sigma[0] > 0.0 {
                sigma[m - 1] / sigma[0]
            } else {
                0.0
            },
            tolerance: rank_tol,
        });
    }

    let mut v_range = RMat::zeros(n, m);
    let mut u_sorted = RMat::zeros(m, m);
    for (new_j, &old_j) in order.iter().enumerate() {
        for i in 0..n {
            v_range.set(i, new_j, cols[old_j][i] / sigma[new_j]);
        }
        for i in 0..m {
            u_sorted.set(i, new_j, u.get(i, old_j));
        }
    }

    fix_pair_signs(&mut u_sorted, &mut v_range);
    let v = complete_basis(&v_range);

    Ok(ForwardModel {
        g: g.clone(),
        u: u_sorted,
        sigma,
        v,
    })
}

impl RMat {
    /// Row `i` copied out as a column vector (used to form Gᵗ columns).
    fn row_as_col(&self, i: usize) -> Vec<f64> {
        self.row(i).to_vec()
    }
}

/// Flip each (u_i, v_i) pair so the largest-magnitude entry of u_i is
/// positive; ties resolve to the lowest index.
fn fix_pair_signs(u: &mut RMat, v_range: &mut RMat) {
    for j in 0..u.cols() {
        let mut best = 0;
        for i in 1..u.rows() {
            if math::abs(u.get(i, j)) > math::abs(u.get(best, j)) {
                best = i;
            }
        }
        if u.get(best, j) < 0.0 {
            for i in 0..u.rows() {
                u.set(i, j, -u.get(i, j));
            }
            for i in 0..v_range.rows() {
                v_range.set(i, j, -v_range.get(i, j));
            }
        }
    }
}

/// Extend an N×M matrix with orthonormal columns to a full N×N orthogonal
/// matrix. The first M columns are kept verbatim; the complement comes from
/// the trailing columns of a Householder QR, sign-fixed per column.
fn complete_basis(v_range: &RMat) -> RMat {
    let n = v_range.rows();
    let m = v_range.cols();
    if m == n {
        return v_range.clone();
    }
    let (q, _r) = householder_qr(v_range);
    let mut v = RMat::zeros(n, n);
    for j in 0..m {
        for i in 0..n {
            v.set(i, j, v_range.get(i, j));
        }
    }
    for j in m..n {
        let mut best = 0;
        for i in 1..n {
            if math::abs(q.get(i, j)) > math::abs(q.get(best, j)) {
                best = i;
            }
        }
        let flip = if q.get(best, j) < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            v.set(i, j, flip * q.get(i, j));
        }
    }
    v
}

/// Householder QR of an m×n matrix (m >= n): returns the full m×m `Q` and
/// the m×n upper-triangular `R` with `Q R = A`.
pub(crate) fn householder_qr(a: &RMat) -> (RMat, RMat) {
    let m = a.rows();
    let n = a.cols();
    assert!(m >= n, "householder_qr expects a tall matrix");
    let mut r = a.clone();
    let mut q = RMat::identity(m);

    for k in 0..n {
        let mut norm_sq = 0.0;
        for i in k..m {
            let x = r.get(i, k);
            norm_sq += x * x;
        }
        if norm_sq == 0.0 {
            continue;
        }
        let norm = math::sqrt(norm_sq);
        let x0 = r.get(k, k);
        let alpha = if x0 >= 0.0 { -norm } else { norm };
        // Reflector v = x - alpha e1, normalized.
        let mut v = vec![0.0; m - k];
        v[0] = x0 - alpha;
        for i in (k + 1)..m {
            v[i - k] = r.get(i, k);
        }
        let vnorm = math::sqrt(v.iter().map(|x| x * x).sum());
        if vnorm == 0.0 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= vnorm;
        }
        // R <- H R on rows k..m.
        for j in k..n {
            let mut dot = 0.0;
            for i in k..m {
                dot += v[i - k] * r.get(i, j);
            }
            for i in k..m {
                r.set(i, j, r.get(i, j) - 2.0 * dot * v[i - k]);
            }
        }
        // Q <- Q H on columns k..m.
        for i in 0..m {
            let mut dot = 0.0;
            for j in k..m {
                dot += q.get(i, j) * v[j - k];
            }
            for j in k..m {
                q.set(i, j, q.get(i, j) - 2.0 * dot * v[j - k]);
            }
        }
    }
    (q, r)
}

/// Haar-uniform random orthogonal matrix: QR of a seeded Gaussian matrix
/// with the R diagonal sign absorbed into Q.
pub(crate) fn haar_orthogonal(n: usize, rng: &mut SplitMix64) -> RMat {
    let a = RMat::from_fn(n, n, |_, _| rng.next_gaussian());
    let (mut q, r) = householder_qr(&a);
    for j in 0..n {
        if r.get(j, j) < 0.0 {
            for i in 0..n {
                q.set(i, j, -q.get(i, j));
            }
        }
    }
    q
}

/// Singular spectrum requested from [`synthesize`].
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumSpec {
    /// Explicit singular values; sorted descending internally.
    Explicit(Vec<f64>),
    /// Geometric decay `sigma_i = sigma1 · ratio^(i-1)` with `ratio ∈ (0, 1)`.
    Geometric { sigma1: f64, ratio: f64 },
}

impl SpectrumSpec {
    fn resolve(&self, m: usize) -> Result<Vec<f64>> {
        let sigma = match self {
            SpectrumSpec::Explicit(values) => {
                if values.len() != m {
                    return Err(Error::InvalidSpectrum(format!(
                        "expected {m} singular values, got {}",
                        values.len()
                    )));
                }
                let mut s = values.clone();
                s.sort_by(|a, b| b.partial_cmp(a).expect("finite sigma"));
                s
            }
            SpectrumSpec::Geometric { sigma1, ratio } => {
                if !(*ratio > 0.0 && *ratio < 1.0) {
                    return Err(Error::InvalidSpectrum(format!(
                        "geometric ratio must lie in (0, 1), got {ratio}"
                    )));
                }
                let mut s = Vec::with_capacity(m);
                let mut cur = *sigma1;
                for _ in 0..m {
                    s.push(cur);
                    cur *= ratio;
                }
                s
            }
        };
        if sigma.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::InvalidSpectrum(
                "all singular values must be positive and finite".into(),
            ));
        }
        Ok(sigma)
    }
}

/// Specification of a synthetic forward operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub m: usize,
    pub n: usize,
    pub spectrum: SpectrumSpec,
    pub seed: u64,
}

/// Build a forward operator with exactly the requested spectrum and
/// Haar-uniform singular vectors.
pub fn synthesize(spec: &SyntheticSpec) -> Result<ForwardModel> {
    if spec.m == 0 {
        return Err(Error::Shape("sensor count must be >= 1".into()));
    }
    if spec.m > spec.n {
        return Err(Error::Shape(format!(
            "need M <= N, got M = {}, N = {}",
            spec.m, spec.n
        )));
    }
    let sigma = spec.spectrum.resolve(spec.m)?;

    let mut rng = SplitMix64::new(spec.seed);
    let mut u = haar_orthogonal(spec.m, &mut rng);
    let mut v = haar_orthogonal(spec.n, &mut rng);

    // Same sign convention as `decompose`, applied to the leading pairs;
    // kernel columns are fixed by their own largest entry.
    let mut v_range = RMat::from_fn(spec.n, spec.m, |i, j| v.get(i, j));
    fix_pair_signs(&mut u, &mut v_range);
    for j in 0..spec.m {
        for i in 0..spec.n {
            v.set(i, j, v_range.get(i, j));
        }
    }
    for j in spec.m..spec.n {
        let mut best = 0;
        for i in 1..spec.n {
            if math::abs(v.get(i, j)) > math::abs(v.get(best, j)) {
                best = i;
            }
        }
        if v.get(best, j) < 0.0 {
            for i in 0..spec.n {
                v.set(i, j, -v.get(i, j));
            }
        }
    }

    let mut us = RMat::zeros(spec.m, spec.m);
    for i in 0..spec.m {
        for j in 0..spec.m {
            us.set(i, j, u.get(i, j) * sigma[j]);
        }
    }
    let g = us.mul(&v_range.transpose());

    Ok(ForwardModel { g, u, sigma, v })
}

/// Regularized inverse `W_λ = Σ_i v_i (φ_i / σ_i) u_iᵗ`, an N×M matrix.
pub fn inverse_operator(model: &ForwardModel, filter: &FilterSpec) -> Result<RMat> {
    let phi = crate::regularizers::filter_factors(model, filter)?;
    let m = model.m();
    let n = model.n();
    let mut scaled = RMat::zeros(n, m);
    for j in 0..m {
        let w = phi[j] / model.sigma()[j];
        for i in 0..n {
            scaled.set(i, j, model.v().get(i, j) * w);
        }
    }
    Ok(scaled.mul(&model.u().transpose()))
}

/// Resolution matrix `R_λ = W_λ G = Σ_i v_i φ_i v_iᵗ`, an N×N matrix.
pub fn resolution_matrix(model: &ForwardModel, filter: &FilterSpec) -> Result<RMat> {
    let phi = crate::regularizers::filter_factors(model, filter)?;
    let m = model.m();
    let n = model.n();
    let mut scaled = RMat::zeros(n, m);
    for j in 0..m {
        for i in 0..n {
            scaled.set(i, j, model.v().get(i, j) * phi[j]);
        }
    }
    Ok(scaled.mul(&model.v_range().transpose()))
}

/// One entry of the spectrum of `G ⊗ G`: the product `σ_i σ_j` with its
/// originating index pair (0-based).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularProduct {
    pub product: f64,
    pub i: usize,
    pub j: usize,
}

/// Implicit SVD of the product operator `G ⊗ G`.
///
/// Only the M² singular products and the small factors are stored; the
/// Kronecker singular vectors `u_i ⊗ u_j`, `v_i ⊗ v_j` are never
/// materialized. Products are sorted descending with lexicographic
/// `(i, j)` tie-break.
#[derive(Debug, Clone)]
pub struct KroneckerSvd {
    u: RMat,
    v_range: RMat,
    sigma: Vec<f64>,
    entries: Vec<SingularProduct>,
}

impl KroneckerSvd {
    pub fn new(model: &ForwardModel) -> Self {
        let m = model.m();
        let mut entries = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                entries.push(SingularProduct {
                    product: model.sigma()[i] * model.sigma()[j],
                    i,
                    j,
                });
            }
        }
        entries.sort_by(|a, b| {
            b.product
                .partial_cmp(&a.product)
                .expect("finite products")
                .then_with(|| (a.i, a.j).cmp(&(b.i, b.j)))
        });
        Self {
            u: model.u().clone(),
            v_range: model.v_range(),
            sigma: model.sigma().to_vec(),
            entries,
        }
    }

    pub fn m(&self) -> usize {
        self.u.rows()
    }

    pub fn n(&self) -> usize {
        self.v_range.rows()
    }

    pub fn singular_products(&self) -> &[SingularProduct] {
        &self.entries
    }

    /// Apply `G ⊗ G` to a vectorized N×N matrix, i.e. compute
    /// `G S Gᵗ`, without forming any M²×N² operator.
    pub fn apply(&self, s: &CMat) -> Result<CMat> {
        let m = self.m();
        let n = self.n();
        if s.rows() != n || s.cols() != n {
            return Err(Error::Shape(format!(
                "expected {n}x{n} input, got {}x{}",
                s.rows(),
                s.cols()
            )));
        }
        let vt = self.v_range.transpose().to_complex();
        let mut t = vt.mul(&s.mul(&self.v_range.to_complex()));
        for i in 0..m {
            for j in 0..m {
                let scaled = t.get(i, j) * (self.sigma[i] * self.sigma[j]);
                t.set(i, j, scaled);
            }
        }
        Ok(t.sandwich_real(&self.u))
    }

    /// Densely materialized `G ⊗ G` (M²×N²). Refused when `N² > 10_000`;
    /// intended for oracle checks at tiny sizes only.
    pub fn dense_operator(&self) -> Result<RMat> {
        let n = self.n();
        if n * n > 10_000 {
            return Err(Error::InvalidParameter(format!(
                "dense Kronecker operator refused for N^2 = {} > 10000",
                n * n
            )));
        }
        let m = self.m();
        let mut us = RMat::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                us.set(i, j, self.u.get(i, j) * self.sigma[j]);
            }
        }
        let g = us.mul(&self.v_range.transpose());
        Ok(kronecker_dense(&g, &g))
    }
}
