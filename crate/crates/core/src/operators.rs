//! Truncated matrix representations of multiplication and Toeplitz
//! operators, submodule projectors, compressions and commutators.
//!
//! Two layers coexist:
//!
//! - an exact layer ([`ExactOpMatrix`]) storing operators in the
//!   *monomial-scaled* representation — entries act on monomial
//!   coefficient vectors, `(A f)_gamma = sum_beta A[gamma,beta] f_beta` —
//!   where multiplication matrices, Toeplitz adjoints and their algebra
//!   stay inside the complex rationals, and
//! - a float layer ([`OperatorMatrix`]) holding dense complex matrices in
//!   orthonormal bases for singular-value work. The orthonormal entry is
//!   `A[gamma,beta] * ||z^gamma||_t / ||z^beta||_t`, so square roots enter
//!   only at this conversion.
//!
//! All commutator data is computed in an ambient space one degree taller
//! than any product appearing; the top-degree band of submodule results is
//! flagged so spectra can exclude the truncation-contaminated part.

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;

use nalgebra::{DMatrix, DVector};

use crate::error::{CoreError, Result};
use crate::moments::monomial_norm_sq;
use crate::multiindex::{enumerate, MultiIndex};
use crate::poly::HoloPoly;
use crate::scalar::{rat_to_f64, C64, ExactC, Rat, Scalar};

/// Orthonormal monomial basis `{ z^alpha / ||z^alpha||_t : |alpha| <= D }`
/// of the degree-truncated weighted Bergman space, in graded order.
#[derive(Clone, Debug)]
pub struct BasisSpec {
    pub n: usize,
    pub t: u32,
    pub max_degree: usize,
    indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
}

impl BasisSpec {
    pub fn new(n: usize, t: u32, max_degree: usize) -> Self {
        let indices = enumerate(n, max_degree);
        let lookup = indices
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        BasisSpec {
            n,
            t,
            max_degree,
            indices,
            lookup,
        }
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn index_of(&self, alpha: &MultiIndex) -> Option<usize> {
        self.lookup.get(alpha).copied()
    }

    pub fn norm_sq(&self, alpha: &MultiIndex) -> Rat {
        monomial_norm_sq(alpha, self.t, self.n)
    }

    /// Coefficient vector of `f` in the orthonormal basis (float).
    pub fn ortho_coords(&self, f: &HoloPoly<ExactC>) -> Result<DVector<C64>> {
        if f.dimension() != self.n {
            return Err(CoreError::DimensionMismatch(f.dimension(), self.n));
        }
        let mut v = DVector::from_element(self.dim(), C64::new(0.0, 0.0));
        for (alpha, c) in f.terms() {
            let idx = self.index_of(alpha).ok_or_else(|| {
                CoreError::invalid("degree", "polynomial degree exceeds the basis truncation")
            })?;
            let scale = rat_to_f64(&self.norm_sq(alpha)).sqrt();
            v[idx] = c.to_c64() * scale;
        }
        Ok(v)
    }
}

/// Exact operator matrix in the monomial-scaled representation.
#[derive(Clone, Debug)]
pub struct ExactOpMatrix {
    pub domain: BasisSpec,
    pub codomain: BasisSpec,
    entries: BTreeMap<(usize, usize), ExactC>,
}

impl ExactOpMatrix {
    pub fn zero(domain: BasisSpec, codomain: BasisSpec) -> Self {
        assert_eq!(domain.t, codomain.t, "mixed weights in one operator");
        assert_eq!(domain.n, codomain.n);
        ExactOpMatrix {
            domain,
            codomain,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(spec: &BasisSpec) -> Self {
        let mut m = ExactOpMatrix::zero(spec.clone(), spec.clone());
        for i in 0..spec.dim() {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn set(&mut self, row: usize, col: usize, v: ExactC) {
        if Scalar::is_zero(&v) {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), v);
        }
    }

    pub fn add_to(&mut self, row: usize, col: usize, v: ExactC) {
        if Scalar::is_zero(&v) {
            return;
        }
        let cur = self.get(row, col);
        self.set(row, col, cur + v);
    }

    pub fn get(&self, row: usize, col: usize) -> ExactC {
        self.entries
            .get(&(row, col))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &ExactC)> {
        self.entries.iter()
    }

    pub fn num_entries(&self) -> usize {
        self.entries.len()
    }

    /// Apply to a polynomial supported on the domain basis.
    pub fn apply(&self, f: &HoloPoly<ExactC>) -> Result<HoloPoly<ExactC>> {
        let mut cols: HashMap<usize, &ExactC> = HashMap::new();
        for (alpha, c) in f.terms() {
            let col = self.domain.index_of(alpha).ok_or_else(|| {
                CoreError::invalid("degree", "input degree exceeds the domain truncation")
            })?;
            cols.insert(col, c);
        }
        let mut out = HoloPoly::zero(self.codomain.n);
        for ((row, col), v) in &self.entries {
            if let Some(c) = cols.get(col) {
                out.add_term(self.codomain.indices()[*row].clone(), v.mul(c));
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &ExactOpMatrix) -> ExactOpMatrix {
        assert_eq!(self.domain.dim(), rhs.domain.dim());
        assert_eq!(self.codomain.dim(), rhs.codomain.dim());
        let mut out = self.clone();
        for (&(r, c), v) in &rhs.entries {
            out.add_to(r, c, v.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &ExactOpMatrix) -> ExactOpMatrix {
        let mut out = self.clone();
        for (&(r, c), v) in &rhs.entries {
            out.add_to(r, c, v.neg());
        }
        out
    }

    /// Composition `self * rhs` (apply `rhs` first).
    pub fn mul(&self, rhs: &ExactOpMatrix) -> ExactOpMatrix {
        assert_eq!(self.domain.dim(), rhs.codomain.dim(), "shape mismatch");
        let mut out = ExactOpMatrix::zero(rhs.domain.clone(), self.codomain.clone());
        // Bucket rhs entries by row so each left entry joins matching ones.
        let mut by_row: HashMap<usize, Vec<(usize, &ExactC)>> = HashMap::new();
        for (&(r, c), v) in &rhs.entries {
            by_row.entry(r).or_default().push((c, v));
        }
        for (&(r, mid), v) in &self.entries {
            if let Some(cols) = by_row.get(&mid) {
                for (c, w) in cols {
                    out.add_to(r, *c, v.mul(w));
                }
            }
        }
        out
    }

    /// Hilbert-space adjoint with respect to the weighted inner product:
    /// `adj[beta,gamma] = conj(self[gamma,beta]) ||z^gamma||^2 / ||z^beta||^2`.
    pub fn adjoint(&self) -> ExactOpMatrix {
        let mut out = ExactOpMatrix::zero(self.codomain.clone(), self.domain.clone());
        for (&(r, c), v) in &self.entries {
            let gamma = &self.codomain.indices()[r];
            let beta = &self.domain.indices()[c];
            let scale = self.codomain.norm_sq(gamma) / self.domain.norm_sq(beta);
            let conj = Scalar::conj(v);
            out.add_to(c, r, ExactC::new(conj.re * scale.clone(), conj.im * scale));
        }
        out
    }

    /// Dense orthonormal-basis matrix (float): entry times
    /// `sqrt(norm_sq(gamma) / norm_sq(beta))`.
    pub fn to_orthonormal(&self) -> DMatrix<C64> {
        let rows = self.codomain.dim();
        let cols = self.domain.dim();
        let row_norms: Vec<f64> = self
            .codomain
            .indices()
            .iter()
            .map(|a| rat_to_f64(&self.codomain.norm_sq(a)).sqrt())
            .collect();
        let col_norms: Vec<f64> = self
            .domain
            .indices()
            .iter()
            .map(|a| rat_to_f64(&self.domain.norm_sq(a)).sqrt())
            .collect();
        let mut m = DMatrix::from_element(rows, cols, C64::new(0.0, 0.0));
        for (&(r, c), v) in &self.entries {
            m[(r, c)] = v.to_c64() * (row_norms[r] / col_norms[c]);
        }
        m
    }
}

/// Exact matrix of `g -> f g` from the truncated space of degree `<= D`
/// into degree `<= D + deg f`.
pub fn multiplication_matrix(f: &HoloPoly<ExactC>, spec: &BasisSpec) -> Result<ExactOpMatrix> {
    if f.is_zero() {
        return Err(CoreError::invalid("f", "multiplier must be nonzero"));
    }
    if f.dimension() != spec.n {
        return Err(CoreError::DimensionMismatch(f.dimension(), spec.n));
    }
    let deg_f = f.degree().unwrap_or(0);
    let codomain = BasisSpec::new(spec.n, spec.t, spec.max_degree + deg_f);
    let mut m = ExactOpMatrix::zero(spec.clone(), codomain);
    for (col, beta) in spec.indices().iter().enumerate() {
        for (delta, c) in f.terms() {
            let gamma = beta.add(delta);
            let row = m.codomain.index_of(&gamma).expect("codomain covers products");
            m.add_to(row, col, c.clone());
        }
    }
    Ok(m)
}

/// Square variant on a single truncated space: products of degree above
/// the truncation are dropped (finite-section compression).
pub fn multiplication_matrix_within(f: &HoloPoly<ExactC>, spec: &BasisSpec) -> Result<ExactOpMatrix> {
    if f.is_zero() {
        return Err(CoreError::invalid("f", "multiplier must be nonzero"));
    }
    if f.dimension() != spec.n {
        return Err(CoreError::DimensionMismatch(f.dimension(), spec.n));
    }
    let mut m = ExactOpMatrix::zero(spec.clone(), spec.clone());
    for (col, beta) in spec.indices().iter().enumerate() {
        for (delta, c) in f.terms() {
            let gamma = beta.add(delta);
            if let Some(row) = spec.index_of(&gamma) {
                m.add_to(row, col, c.clone());
            }
        }
    }
    Ok(m)
}

/// Toeplitz adjoint action on a polynomial:
/// `T*_{z_j} z^alpha = alpha_j / (n + t + |alpha|) z^{alpha - eps_j}`.
/// The adjoint lowers degree, so no truncation error occurs.
pub fn adjoint_action(p: &HoloPoly<ExactC>, j: usize, t: u32) -> HoloPoly<ExactC> {
    let n = p.dimension();
    let mut out = HoloPoly::zero(n);
    for (alpha, c) in p.terms() {
        if let Some(lowered) = alpha.lower(j) {
            let den = (n + t as usize + alpha.degree()) as i64;
            out.add_term(lowered, c.scale_ratio(alpha.get(j) as i64, den));
        }
    }
    out
}

/// Exact square matrix of the Toeplitz adjoint `T^{(t)*}_{z_j}`.
pub fn coordinate_adjoint(j: usize, spec: &BasisSpec) -> Result<ExactOpMatrix> {
    if j < 1 || j > spec.n {
        return Err(CoreError::CoordinateOutOfRange { index: j, n: spec.n });
    }
    let mut m = ExactOpMatrix::zero(spec.clone(), spec.clone());
    for (col, beta) in spec.indices().iter().enumerate() {
        if let Some(gamma) = beta.lower(j) {
            let row = m.domain.index_of(&gamma).expect("adjoint lowers degree");
            let den = (spec.n + spec.t as usize + beta.degree()) as i64;
            m.add_to(
                row,
                col,
                ExactC::from_ratio(beta.get(j) as i64, den),
            );
        }
    }
    Ok(m)
}

/// Diagonal number operator `N z^alpha = |alpha| z^alpha`.
pub fn number_operator(spec: &BasisSpec) -> ExactOpMatrix {
    let mut m = ExactOpMatrix::zero(spec.clone(), spec.clone());
    for (i, alpha) in spec.indices().iter().enumerate() {
        m.set(i, i, ExactC::from_ratio(alpha.degree() as i64, 1));
    }
    m
}

/// Dense complex matrix in orthonormal bases, with optional flag for the
/// truncation-contaminated trailing index range.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub matrix: DMatrix<C64>,
    pub band: Option<Range<usize>>,
    pub label: String,
}

impl OperatorMatrix {
    pub fn new(matrix: DMatrix<C64>, label: impl Into<String>) -> Self {
        OperatorMatrix {
            matrix,
            band: None,
            label: label.into(),
        }
    }

    pub fn with_band(mut self, band: Range<usize>) -> Self {
        self.band = Some(band);
        self
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }
}

/// Plan for the principal submodule generated by `p`: the frame
/// `{ p z^beta : min_degree <= |beta| <= max_degree }` orthonormalized
/// inside the ambient truncated space of degree `max_degree + deg p + 1`.
#[derive(Clone, Debug)]
pub struct SubmodulePlan {
    pub generator: HoloPoly<ExactC>,
    pub min_degree: usize,
    pub max_degree: usize,
}

impl SubmodulePlan {
    pub fn new(generator: HoloPoly<ExactC>, min_degree: usize, max_degree: usize) -> Result<Self> {
        if generator.is_zero() {
            return Err(CoreError::invalid("generator", "must be nonzero"));
        }
        if min_degree > max_degree {
            return Err(CoreError::invalid(
                "min_degree",
                "must not exceed max_degree",
            ));
        }
        Ok(SubmodulePlan {
            generator,
            min_degree,
            max_degree,
        })
    }

    pub fn n(&self) -> usize {
        self.generator.dimension()
    }

    pub fn generator_degree(&self) -> usize {
        self.generator.degree().expect("nonzero generator")
    }

    pub fn ambient_degree(&self) -> usize {
        self.max_degree + self.generator_degree() + 1
    }

    /// Multiplier exponents in graded order.
    pub fn multipliers(&self) -> Vec<MultiIndex> {
        enumerate(self.n(), self.max_degree)
            .into_iter()
            .filter(|b| b.degree() >= self.min_degree)
            .collect()
    }

    /// First multiplier degree considered truncation-contaminated.
    ///
    /// For a homogeneous generator the frame is graded, the compression
    /// of `M_{z_i}` is exact except on columns of top multiplier degree,
    /// and the adjoint lowers degree, so every commutator entry outside
    /// the top-degree block equals the corresponding entry of the full
    /// (untruncated) operator: only the top degree is contaminated. For
    /// general generators the grading fails and the conservative width
    /// `deg p + 1` is kept.
    pub fn band_degree_start(&self) -> usize {
        let dp = self.generator_degree();
        let width = if self.generator_is_homogeneous() { 0 } else { dp };
        self.max_degree.saturating_sub(width).max(self.min_degree)
    }

    fn generator_is_homogeneous(&self) -> bool {
        let d = self.generator_degree();
        self.generator.terms().all(|(a, _)| a.degree() == d)
    }
}

/// Relative pivot threshold for Gram degeneracy.
const GRAM_PIVOT_REL_TOL: f64 = 1e-10;

/// Orthonormalized submodule frame. Columns of `q` are orthonormal in the
/// ambient orthonormal coordinates and are sorted by multiplier degree
/// (pivot attribution), so the truncation band is a trailing column range.
pub struct SubmoduleBasis {
    pub plan: SubmodulePlan,
    pub ambient: BasisSpec,
    pub q: DMatrix<C64>,
    pub multiplier_degrees: Vec<usize>,
    pub band_start: usize,
}

impl SubmoduleBasis {
    pub fn rank(&self) -> usize {
        self.q.ncols()
    }

    pub fn band(&self) -> Range<usize> {
        self.band_start..self.rank()
    }

    /// Orthogonal projector `P = Q Q*` on the ambient space.
    pub fn projector(&self) -> OperatorMatrix {
        let p = &self.q * self.q.adjoint();
        OperatorMatrix::new(p, format!("projector[{}]", plan_label(&self.plan)))
    }
}

fn plan_label(plan: &SubmodulePlan) -> String {
    format!(
        "p={}, l={}, B={}",
        crate::parse::format_poly(&plan.generator),
        plan.min_degree,
        plan.max_degree
    )
}

/// Pivoted Cholesky of a Hermitian PSD matrix. Returns the pivot order
/// and the lower factor `L` with `(P* A P) = L L*`. Fails when a pivot
/// drops below `rel_tol` times the largest initial diagonal before all
/// columns are processed.
fn pivoted_cholesky(g: &DMatrix<C64>, rel_tol: f64) -> Result<(Vec<usize>, DMatrix<C64>)> {
    let k = g.nrows();
    assert_eq!(k, g.ncols());
    let mut a = g.clone();
    let mut l = DMatrix::from_element(k, k, C64::new(0.0, 0.0));
    let mut perm: Vec<usize> = (0..k).collect();
    let max_diag = (0..k).map(|i| a[(i, i)].re).fold(0.0f64, f64::max);
    let threshold = rel_tol * max_diag;
    for s in 0..k {
        // Select the largest remaining diagonal entry.
        let (pivot_idx, pivot) = (s..k)
            .map(|i| (i, a[(i, i)].re))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if pivot <= threshold || !pivot.is_finite() {
            return Err(CoreError::GramDegenerate {
                step: s,
                pivot,
                threshold,
            });
        }
        if pivot_idx != s {
            perm.swap(s, pivot_idx);
            a.swap_rows(s, pivot_idx);
            a.swap_columns(s, pivot_idx);
            l.swap_rows(s, pivot_idx);
        }
        let d = a[(s, s)].re.sqrt();
        l[(s, s)] = C64::new(d, 0.0);
        for r in (s + 1)..k {
            l[(r, s)] = a[(r, s)] / d;
        }
        for r in (s + 1)..k {
            for c in (s + 1)..=r {
                let upd = l[(r, s)] * l[(c, s)].conj();
                a[(r, c)] -= upd;
                a[(c, r)] = a[(r, c)].conj();
            }
        }
    }
    Ok((perm, l))
}

/// Inverse of an upper-triangular matrix by back substitution.
fn invert_upper(u: &DMatrix<C64>) -> DMatrix<C64> {
    let k = u.nrows();
    let mut x = DMatrix::from_element(k, k, C64::new(0.0, 0.0));
    for j in (0..k).rev() {
        x[(j, j)] = C64::new(1.0, 0.0) / u[(j, j)];
        for i in (0..j).rev() {
            let mut acc = C64::new(0.0, 0.0);
            for m in (i + 1)..=j {
                acc += u[(i, m)] * x[(m, j)];
            }
            x[(i, j)] = -acc / u[(i, i)];
        }
    }
    x
}

/// Build the orthonormal submodule frame by normalizing the generators
/// and running pivoted Cholesky on their Gram matrix.
pub fn build_submodule_basis(plan: &SubmodulePlan) -> Result<SubmoduleBasis> {
    let n = plan.n();
    let ambient = BasisSpec::new(n, 0, plan.ambient_degree());
    let multipliers = plan.multipliers();
    if multipliers.is_empty() {
        return Err(CoreError::invalid("plan", "no multipliers in range"));
    }
    let k = multipliers.len();
    let dim = ambient.dim();
    let mut v = DMatrix::from_element(dim, k, C64::new(0.0, 0.0));
    for (s, beta) in multipliers.iter().enumerate() {
        let gen = plan
            .generator
            .mul(&HoloPoly::monomial(n, beta.clone(), Scalar::one()))?;
        let col = ambient.ortho_coords(&gen)?;
        let norm = col.norm();
        v.set_column(s, &col.unscale(norm));
    }
    let gram = v.adjoint() * &v;
    let (perm, l) = pivoted_cholesky(&gram, GRAM_PIVOT_REL_TOL)?;
    // Q = V P (L*)^{-1}
    let mut v_perm = DMatrix::from_element(dim, k, C64::new(0.0, 0.0));
    for (new_col, &src) in perm.iter().enumerate() {
        v_perm.set_column(new_col, &v.column(src));
    }
    let q_raw = &v_perm * invert_upper(&l.adjoint());
    // Attribute each column the multiplier degree of its pivot, then sort
    // columns by that degree (stable) so the band is a trailing range.
    let mut order: Vec<usize> = (0..k).collect();
    let pivot_degrees: Vec<usize> = perm.iter().map(|&s| multipliers[s].degree()).collect();
    order.sort_by_key(|&c| (pivot_degrees[c], perm[c]));
    let mut q = DMatrix::from_element(dim, k, C64::new(0.0, 0.0));
    let mut multiplier_degrees = Vec::with_capacity(k);
    for (new_col, &src) in order.iter().enumerate() {
        q.set_column(new_col, &q_raw.column(src));
        multiplier_degrees.push(pivot_degrees[src]);
    }
    let band_degree = plan.band_degree_start();
    let band_start = multiplier_degrees
        .iter()
        .position(|&d| d >= band_degree)
        .unwrap_or(k);
    Ok(SubmoduleBasis {
        plan: plan.clone(),
        ambient,
        q,
        multiplier_degrees,
        band_start,
    })
}

/// Orthogonal projector onto the planned submodule frame.
pub fn submodule_projector(plan: &SubmodulePlan) -> Result<OperatorMatrix> {
    Ok(build_submodule_basis(plan)?.projector())
}

/// Float matrix of multiplication by `z_i` on the ambient space of the
/// frame (square, finite-section).
fn ambient_multiplier(basis: &SubmoduleBasis, i: usize) -> Result<DMatrix<C64>> {
    let zi = HoloPoly::variable(basis.ambient.n, i);
    Ok(multiplication_matrix_within(&zi, &basis.ambient)?.to_orthonormal())
}

/// Compression `S_i = Q* M_{z_i} Q` of the coordinate multiplier to the
/// submodule frame.
pub fn compressed_multiplier(basis: &SubmoduleBasis, i: usize) -> Result<DMatrix<C64>> {
    let m = ambient_multiplier(basis, i)?;
    Ok(basis.q.adjoint() * m * &basis.q)
}

/// Commutator `[S_i, S_j*] = S_i S_j* - S_j* S_i` on the submodule frame,
/// with the truncation band flagged.
pub fn compressed_commutator(plan: &SubmodulePlan, i: usize, j: usize) -> Result<OperatorMatrix> {
    let basis = build_submodule_basis(plan)?;
    compressed_commutator_with(&basis, i, j)
}

pub fn compressed_commutator_with(
    basis: &SubmoduleBasis,
    i: usize,
    j: usize,
) -> Result<OperatorMatrix> {
    let si = compressed_multiplier(basis, i)?;
    let sj_star = compressed_multiplier(basis, j)?.adjoint();
    let comm = &si * &sj_star - &sj_star * &si;
    Ok(OperatorMatrix::new(
        comm,
        format!("commutator[S_{i}, S_{j}*] {}", plan_label(&basis.plan)),
    )
    .with_band(basis.band()))
}

/// Cross corner `(I - P_M) M*_{z_j} P_M` on the ambient space.
pub fn cross_corner(plan: &SubmodulePlan, j: usize) -> Result<OperatorMatrix> {
    let basis = build_submodule_basis(plan)?;
    let p = &basis.q * basis.q.adjoint();
    let m_star = ambient_multiplier(&basis, j)?.adjoint();
    let dim = p.nrows();
    let eye = DMatrix::<C64>::identity(dim, dim);
    let corner = (eye - &p) * m_star * &p;
    Ok(OperatorMatrix::new(
        corner,
        format!("corner[(1-P) M_{j}* P] {}", plan_label(&basis.plan)),
    ))
}

/// Distance `|| f - P_M f ||` in the unweighted norm.
pub fn submodule_distance(f: &HoloPoly<ExactC>, plan: &SubmodulePlan) -> Result<f64> {
    let basis = build_submodule_basis(plan)?;
    let v = basis.ambient.ortho_coords(f)?;
    let proj = &basis.q * (basis.q.adjoint() * &v);
    Ok((v - proj).norm())
}

/// `|| P_M k_w ||` for the normalized truncation of the reproducing
/// kernel at `w`. Exactly zero in theory when `p(w) = 0`, because
/// `<p z^beta, K_w> = conj(p(w) w^beta)`.
pub fn kernel_orthogonality(w: &[C64], plan: &SubmodulePlan) -> Result<f64> {
    let basis = build_submodule_basis(plan)?;
    kernel_orthogonality_with(w, &basis)
}

/// Same check against an already-built frame (cheap per point).
pub fn kernel_orthogonality_with(w: &[C64], basis: &SubmoduleBasis) -> Result<f64> {
    let norm_sq: f64 = w.iter().map(|z| z.norm_sqr()).sum();
    if norm_sq >= 1.0 {
        return Err(CoreError::invalid("w", "kernel point must lie inside the ball"));
    }
    let kv = kernel_coords(w, &basis.ambient);
    let norm = kv.norm();
    let proj = basis.q.adjoint() * &kv;
    Ok(proj.norm() / norm)
}

/// Coordinates of the truncated kernel `K_w` in the orthonormal basis:
/// component `conj(w^alpha) / ||z^alpha||`.
pub fn kernel_coords(w: &[C64], ambient: &BasisSpec) -> DVector<C64> {
    let mut v = DVector::from_element(ambient.dim(), C64::new(0.0, 0.0));
    for (idx, alpha) in ambient.indices().iter().enumerate() {
        let mut m = C64::new(1.0, 0.0);
        for (wi, &e) in w.iter().zip(&alpha.0) {
            for _ in 0..e {
                m *= wi;
            }
        }
        let norm = rat_to_f64(&ambient.norm_sq(alpha)).sqrt();
        v[idx] = m.conj() / norm;
    }
    v
}

/// Write a matrix as CSV: one matrix row per line, entries rendered as
/// `re;im` pairs separated by commas.
pub fn matrix_to_csv(m: &OperatorMatrix) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# {} rows={} cols={} band={:?}\n",
        m.label,
        m.nrows(),
        m.ncols(),
        m.band
    ));
    for r in 0..m.nrows() {
        let mut cells = Vec::with_capacity(m.ncols());
        for c in 0..m.ncols() {
            let v = m.matrix[(r, c)];
            cells.push(format!("{:.17e};{:.17e}", v.re, v.im));
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Binary layout: magic `OPMX`, version u32 LE, rows u64 LE, cols u64 LE,
/// then `rows*cols` entries row-major as interleaved `f64` LE (re, im).
pub fn matrix_to_binary(m: &OperatorMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(24 + 16 * m.nrows() * m.ncols());
    out.extend_from_slice(b"OPMX");
    out.extend_from_slice(&1u32.to_le_bytes());
    out.extend_from_slice(&(m.nrows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.ncols() as u64).to_le_bytes());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let v = m.matrix[(r, c)];
            out.extend_from_slice(&v.re.to_le_bytes());
            out.extend_from_slice(&v.im.to_le_bytes());
        }
    }
    out
}
