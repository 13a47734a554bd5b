//! Finite form matrices: continuity and coercivity bounds, restriction
//! criteria, the 2x2 characterization, ellipticity, and the lattice
//! criteria for positivity and domination of the generated matrix
//! semigroups.
//!
//! A form matrix holds blocks `a_ij` on bases of the component spaces
//! together with Gram matrices of the V- and H-inner products per block.
//! Every bound and eigenvalue is computed after transforming the blocks by
//! the inverse Cholesky factors of the Gram matrices, so norm statements
//! become plain spectral statements and all verdicts are invariant under a
//! change of basis applied consistently to blocks and Grams.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::error::FormsError;
use crate::linalg;

/// Entrywise tolerance for the lattice (sign-pattern) criteria.
pub const LATTICE_TOL: f64 = 1e-12;
/// Entrywise tolerance for empirical semigroup positivity.
pub const EMPIRICAL_TOL: f64 = 1e-9;
/// Default shift cap: a form counts as elliptic only if a shift below this
/// cap makes it coercive. At finite dimension any form with positive
/// definite H-Gram becomes coercive under a large enough shift, so the
/// verdict is relative to the cap.
pub const OMEGA_CAP: f64 = 1e6;
/// Default time grid for the empirical semigroup probes.
pub const T_GRID: [f64; 3] = [0.01, 0.1, 1.0];

/// Block matrix of sesquilinear mappings with per-block Gram matrices.
#[derive(Debug, Clone)]
pub struct FormMatrix {
    pub dims: Vec<usize>,
    /// `blocks[i][j]` represents `a_ij : V_j x V_i -> C` as the matrix with
    /// entry `(p, q) = a_ij(b_q^j, b_p^i)`, shape `dims[i] x dims[j]`.
    pub blocks: Vec<Vec<DMatrix<Complex64>>>,
    pub gram_v: Vec<DMatrix<f64>>,
    pub gram_h: Vec<DMatrix<f64>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum EntryRepr {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Deserialize)]
struct FormMatrixFile {
    dims: Vec<usize>,
    blocks: Vec<Vec<Vec<Vec<EntryRepr>>>>,
    gram_v: Vec<Vec<Vec<f64>>>,
    gram_h: Vec<Vec<Vec<f64>>>,
}

impl FormMatrix {
    pub fn new(
        dims: Vec<usize>,
        blocks: Vec<Vec<DMatrix<Complex64>>>,
        gram_v: Vec<DMatrix<f64>>,
        gram_h: Vec<DMatrix<f64>>,
    ) -> Result<Self, FormsError> {
        let m = dims.len();
        if blocks.len() != m || gram_v.len() != m || gram_h.len() != m {
            return Err(FormsError::ShapeMismatch);
        }
        for i in 0..m {
            if blocks[i].len() != m {
                return Err(FormsError::ShapeMismatch);
            }
            for j in 0..m {
                if blocks[i][j].nrows() != dims[i] || blocks[i][j].ncols() != dims[j] {
                    return Err(FormsError::ShapeMismatch);
                }
            }
            for g in [&gram_v[i], &gram_h[i]] {
                if g.nrows() != dims[i] || g.ncols() != dims[i] {
                    return Err(FormsError::ShapeMismatch);
                }
            }
        }
        Ok(FormMatrix {
            dims,
            blocks,
            gram_v,
            gram_h,
        })
    }

    /// Real form matrix with identity Gram matrices in both inner products.
    pub fn scalar(blocks: &[&[f64]]) -> Self {
        let m = blocks.len();
        let dims = vec![1usize; m];
        let b = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| DMatrix::from_element(1, 1, Complex64::new(blocks[i][j], 0.0)))
                    .collect()
            })
            .collect();
        let grams = vec![DMatrix::identity(1, 1); m];
        FormMatrix {
            dims,
            blocks: b,
            gram_v: grams.clone(),
            gram_h: grams,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, FormsError> {
        let file: FormMatrixFile =
            serde_json::from_str(text).map_err(|e| FormsError::Parse(e.to_string()))?;
        let to_c = |rows: &Vec<Vec<EntryRepr>>, nr: usize, nc: usize| -> Result<DMatrix<Complex64>, FormsError> {
            if rows.len() != nr {
                return Err(FormsError::ShapeMismatch);
            }
            let mut m = DMatrix::zeros(nr, nc);
            for (i, row) in rows.iter().enumerate() {
                if row.len() != nc {
                    return Err(FormsError::ShapeMismatch);
                }
                for (j, e) in row.iter().enumerate() {
                    m[(i, j)] = match e {
                        EntryRepr::Real(x) => Complex64::new(*x, 0.0),
                        EntryRepr::Complex([re, im]) => Complex64::new(*re, *im),
                    };
                }
            }
            Ok(m)
        };
        let to_r = |rows: &Vec<Vec<f64>>, n: usize| -> Result<DMatrix<f64>, FormsError> {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(FormsError::ShapeMismatch);
            }
            Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
        };
        let dims = file.dims;
        let m = dims.len();
        if file.blocks.len() != m || file.gram_v.len() != m || file.gram_h.len() != m {
            return Err(FormsError::ShapeMismatch);
        }
        let mut blocks = Vec::with_capacity(m);
        for i in 0..m {
            if file.blocks[i].len() != m {
                return Err(FormsError::ShapeMismatch);
            }
            let mut row = Vec::with_capacity(m);
            for j in 0..m {
                row.push(to_c(&file.blocks[i][j], dims[i], dims[j])?);
            }
            blocks.push(row);
        }
        let gram_v = (0..m)
            .map(|i| to_r(&file.gram_v[i], dims[i]))
            .collect::<Result<_, _>>()?;
        let gram_h = (0..m)
            .map(|i| to_r(&file.gram_h[i], dims[i]))
            .collect::<Result<_, _>>()?;
        FormMatrix::new(dims, blocks, gram_v, gram_h)
    }

    pub fn block_count(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    fn offsets(&self) -> Vec<usize> {
        let mut off = vec![0usize];
        for d in &self.dims {
            off.push(off.last().unwrap() + d);
        }
        off
    }

    /// Full matrix of the form on the concatenated bases.
    pub fn assemble(&self) -> DMatrix<Complex64> {
        let n = self.total_dim();
        let off = self.offsets();
        let mut a = DMatrix::zeros(n, n);
        for i in 0..self.block_count() {
            for j in 0..self.block_count() {
                a.view_mut((off[i], off[j]), (self.dims[i], self.dims[j]))
                    .copy_from(&self.blocks[i][j]);
            }
        }
        a
    }

    fn assemble_gram(&self, grams: &[DMatrix<f64>]) -> DMatrix<f64> {
        let n = self.total_dim();
        let off = self.offsets();
        let mut g = DMatrix::zeros(n, n);
        for i in 0..self.block_count() {
            g.view_mut((off[i], off[i]), (self.dims[i], self.dims[i]))
                .copy_from(&grams[i]);
        }
        g
    }

    pub fn gram_v_full(&self) -> DMatrix<f64> {
        self.assemble_gram(&self.gram_v)
    }

    pub fn gram_h_full(&self) -> DMatrix<f64> {
        self.assemble_gram(&self.gram_h)
    }

    /// Inverse Cholesky factors of the V-Grams.
    fn v_whiteners(&self) -> Result<Vec<DMatrix<f64>>, FormsError> {
        self.gram_v
            .iter()
            .map(|g| linalg::whitener(g).ok_or(FormsError::SingularGram))
            .collect()
    }

    /// V-whitened block `L_i^-1 A_ij L_j^-T`.
    fn whitened_block(
        &self,
        w: &[DMatrix<f64>],
        i: usize,
        j: usize,
    ) -> DMatrix<Complex64> {
        let li = linalg::to_complex(&w[i]);
        let lj = linalg::to_complex(&w[j].transpose());
        &li * &self.blocks[i][j] * lj
    }

    /// Full V-whitened matrix.
    fn whitened_full(&self, w: &[DMatrix<f64>]) -> DMatrix<Complex64> {
        let n = self.total_dim();
        let off = self.offsets();
        let mut a = DMatrix::zeros(n, n);
        for i in 0..self.block_count() {
            for j in 0..self.block_count() {
                a.view_mut((off[i], off[j]), (self.dims[i], self.dims[j]))
                    .copy_from(&self.whitened_block(w, i, j));
            }
        }
        a
    }

    fn require_real(&self) -> Result<(), FormsError> {
        let worst = self
            .blocks
            .iter()
            .flatten()
            .flat_map(|b| b.iter())
            .fold(0.0f64, |acc, z| acc.max(z.im.abs()));
        if worst > LATTICE_TOL {
            return Err(FormsError::ComplexEntries(worst));
        }
        Ok(())
    }

    fn require_diagonal_h(&self) -> Result<(), FormsError> {
        for g in &self.gram_h {
            for i in 0..g.nrows() {
                for j in 0..g.ncols() {
                    if i != j && g[(i, j)].abs() > LATTICE_TOL {
                        return Err(FormsError::NonDiagonalGram);
                    }
                }
            }
        }
        Ok(())
    }

    /// Generator matrix of the semigroup in the H inner product:
    /// `u' = -G_H^-1 A u`.
    pub fn generator(&self) -> Result<DMatrix<f64>, FormsError> {
        self.require_real()?;
        let a = self.assemble().map(|z| z.re);
        let gh = self.gram_h_full();
        let inv = gh.try_inverse().ok_or(FormsError::SingularGram)?;
        Ok(-(inv * a))
    }
}

/// Per-block continuity constants and the two continuity bounds.
#[derive(Debug, Clone)]
pub struct ContinuityBound {
    /// `M_ij`: largest singular value of the V-whitened block.
    pub per_block: DMatrix<f64>,
    /// Spectral norm of the nonnegative matrix `(M_ij)`.
    pub matrix_bound: f64,
    /// Spectral norm of the whole whitened matrix; never exceeds the
    /// matrix bound.
    pub exact_bound: f64,
}

pub fn continuity_bound(fm: &FormMatrix) -> Result<ContinuityBound, FormsError> {
    let w = fm.v_whiteners()?;
    let m = fm.block_count();
    let per_block = DMatrix::from_fn(m, m, |i, j| {
        linalg::spectral_norm_c(&fm.whitened_block(&w, i, j))
    });
    let matrix_bound = linalg::spectral_norm(&per_block);
    let exact_bound = linalg::spectral_norm_c(&fm.whitened_full(&w));
    debug_assert!(exact_bound <= matrix_bound + 1e-9);
    Ok(ContinuityBound {
        per_block,
        matrix_bound,
        exact_bound,
    })
}

/// Exact and sufficient coercivity constants.
#[derive(Debug, Clone)]
pub struct Coercivity {
    /// Smallest eigenvalue of the Hermitian part of the whitened matrix.
    pub exact_alpha: f64,
    /// Constant from the diagonal/off-diagonal comparison matrix, when that
    /// matrix is positive definite.
    pub sufficient_alpha: Option<f64>,
    /// Optimal coercivity constant of each diagonal block; each bounds the
    /// exact constant from above.
    pub diagonal_alphas: Vec<f64>,
}

pub fn coercivity(fm: &FormMatrix) -> Result<Coercivity, FormsError> {
    let w = fm.v_whiteners()?;
    let full = fm.whitened_full(&w);
    let exact_alpha = linalg::min_eig_hermitian(&linalg::hermitian_part(&full));
    let m = fm.block_count();
    let diagonal_alphas: Vec<f64> = (0..m)
        .map(|i| {
            let wii = fm.whitened_block(&w, i, i);
            linalg::min_eig_hermitian(&linalg::hermitian_part(&wii))
        })
        .collect();
    let comparison = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            diagonal_alphas[i]
        } else {
            -linalg::spectral_norm_c(&fm.whitened_block(&w, i, j))
        }
    });
    let comp_alpha = linalg::min_eig_sym(&comparison);
    let sufficient_alpha = (comp_alpha > 0.0).then_some(comp_alpha);
    Ok(Coercivity {
        exact_alpha,
        sufficient_alpha,
        diagonal_alphas,
    })
}

/// Coercivity constants of every principal restriction.
#[derive(Debug, Clone)]
pub struct RestrictionCoercivity {
    /// `(bitmask over blocks, exact alpha of the restriction)`.
    pub per_subset: Vec<(u32, f64)>,
    pub full_alpha: f64,
    /// Minimum over proper nonempty subsets; never below the full constant.
    pub min_proper: f64,
}

pub fn restriction_coercivity(fm: &FormMatrix) -> Result<RestrictionCoercivity, FormsError> {
    let m = fm.block_count();
    if m > 12 {
        return Err(FormsError::IndexSetTooLarge(m));
    }
    let w = fm.v_whiteners()?;
    let off = fm.offsets();
    let full = fm.whitened_full(&w);
    let herm = linalg::hermitian_part(&full);
    let mut per_subset = Vec::new();
    let mut full_alpha = f64::INFINITY;
    let mut min_proper = f64::INFINITY;
    let all = (1u32 << m) - 1;
    for mask in 1..=all {
        let mut idx = Vec::new();
        for i in 0..m {
            if mask & (1 << i) != 0 {
                idx.extend(off[i]..off[i] + fm.dims[i]);
            }
        }
        let sub = herm.select_rows(idx.iter()).select_columns(idx.iter());
        let alpha = linalg::min_eig_hermitian(&sub);
        per_subset.push((mask, alpha));
        if mask == all {
            full_alpha = alpha;
        } else {
            min_proper = min_proper.min(alpha);
        }
    }
    debug_assert!(per_subset.iter().all(|&(_, a)| a >= full_alpha - 1e-10));
    Ok(RestrictionCoercivity {
        per_subset,
        full_alpha,
        min_proper,
    })
}

/// Verdicts of the 2x2 cross-term criterion against the eigenvalue oracle.
#[derive(Debug, Clone)]
pub struct TwoByTwoVerdict {
    pub criterion_holds: bool,
    pub exact_coercive: bool,
    /// Worst sampled margin `2 sqrt(a1 a2) + min cross term` on balanced
    /// unit pairs; the criterion holds when it stays positive.
    pub margin: f64,
}

/// Evaluates the cross-term inequality on seeded random unit pairs with both
/// components nonzero, sharpening the worst pair by alternating local
/// minimization, and compares with exact coercivity. The inequality is
/// evaluated at the balanced scaling (both weighted norms equal); pairs with
/// a vanishing component make the stated inequality degenerate and are
/// excluded.
pub fn two_by_two_criterion(
    fm: &FormMatrix,
    samples: usize,
    seed: u64,
) -> Result<TwoByTwoVerdict, FormsError> {
    if fm.block_count() != 2 {
        return Err(FormsError::ShapeMismatch);
    }
    let w = fm.v_whiteners()?;
    let alphas: Vec<f64> = (0..2)
        .map(|i| {
            let wii = fm.whitened_block(&w, i, i);
            linalg::min_eig_hermitian(&linalg::hermitian_part(&wii))
        })
        .collect();
    for (i, &a) in alphas.iter().enumerate() {
        if a <= 0.0 {
            return Err(FormsError::DiagonalNotCoercive(i));
        }
    }
    // Cross term on unit pairs: Re(u1^H Z u2) with Z = W12 + W21^H.
    let z = fm.whitened_block(&w, 0, 1) + fm.whitened_block(&w, 1, 0).adjoint();
    let cross = |u1: &DVector<Complex64>, u2: &DVector<Complex64>| -> f64 {
        (u1.adjoint() * &z * u2)[(0, 0)].re
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut unit = |n: usize| -> DVector<Complex64> {
        let mut v = DVector::from_fn(n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let norm = v.norm();
        if norm == 0.0 {
            v[0] = Complex64::new(1.0, 0.0);
            return v;
        }
        v.unscale(norm)
    };
    let mut g_min = f64::INFINITY;
    let mut worst = (unit(fm.dims[0]), unit(fm.dims[1]));
    for _ in 0..samples.max(1) {
        let u1 = unit(fm.dims[0]);
        let u2 = unit(fm.dims[1]);
        let g = cross(&u1, &u2);
        if g < g_min {
            g_min = g;
            worst = (u1, u2);
        }
    }
    // Alternating minimization: for fixed u2 the minimizer over unit u1 is
    // -Z u2 normalized, and symmetrically.
    let (mut u1, mut u2) = worst;
    for _ in 0..50 {
        let zu2 = &z * &u2;
        if zu2.norm() > 0.0 {
            u1 = -zu2.clone().unscale(zu2.norm());
        }
        let ztu1 = z.adjoint() * &u1;
        if ztu1.norm() > 0.0 {
            u2 = -ztu1.clone().unscale(ztu1.norm());
        }
        g_min = g_min.min(cross(&u1, &u2));
    }
    let margin = 2.0 * (alphas[0] * alphas[1]).sqrt() + g_min;
    let full = fm.whitened_full(&w);
    let exact = linalg::min_eig_hermitian(&linalg::hermitian_part(&full));
    Ok(TwoByTwoVerdict {
        criterion_holds: margin > 0.0,
        exact_coercive: exact > 0.0,
        margin,
    })
}

#[derive(Debug, Clone)]
pub struct Ellipticity {
    pub elliptic: bool,
    pub alpha: f64,
    pub omega: f64,
}

/// Smallest shift `omega >= 0` making the H-shifted Hermitian part positive
/// definite against the V-Gram, by bisection to 1e-8 relative accuracy.
pub fn ellipticity(fm: &FormMatrix, omega_cap: f64) -> Result<Ellipticity, FormsError> {
    let gv = fm.gram_v_full();
    let gh = linalg::to_complex(&fm.gram_h_full());
    let herm = linalg::hermitian_part(&fm.assemble());
    let l = linalg::whitener(&gv).ok_or(FormsError::SingularGram)?;
    let lc = linalg::to_complex(&l);
    let lct = linalg::to_complex(&l.transpose());
    let eval = |omega: f64| -> f64 {
        let shifted = &herm + &gh * Complex64::new(omega, 0.0);
        let w = &lc * shifted * &lct;
        linalg::min_eig_hermitian(&w)
    };
    let at_zero = eval(0.0);
    if at_zero > 0.0 {
        return Ok(Ellipticity {
            elliptic: true,
            alpha: at_zero,
            omega: 0.0,
        });
    }
    if eval(omega_cap) <= 0.0 {
        return Ok(Ellipticity {
            elliptic: false,
            alpha: eval(omega_cap),
            omega: omega_cap,
        });
    }
    let (mut lo, mut hi) = (0.0f64, omega_cap);
    while (hi - lo) > 1e-8 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if eval(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Ellipticity {
        elliptic: true,
        alpha: eval(hi).max(0.0),
        omega: hi,
    })
}

/// Lattice criterion for positivity against the matrix-exponential check.
#[derive(Debug, Clone)]
pub struct PositivityReport {
    /// Diagonal blocks have essentially nonnegative generators and
    /// off-diagonal blocks are entrywise nonpositive.
    pub criterion: bool,
    /// Min entry of `exp(-t G_H^-1 A)` stays above `-1e-9` on the grid.
    pub empirical: bool,
    pub min_exp_entry: f64,
    pub worst_generator_entry: f64,
}

pub fn positivity_criteria(
    fm: &FormMatrix,
    t_grid: &[f64],
) -> Result<PositivityReport, FormsError> {
    fm.require_real()?;
    fm.require_diagonal_h()?;
    debug_assert!(fm.total_dim() <= 400);
    // H-whitening is a positive diagonal scaling: sign patterns survive.
    let mut worst = f64::NEG_INFINITY;
    let m = fm.block_count();
    for i in 0..m {
        for j in 0..m {
            let b = &fm.blocks[i][j];
            for p in 0..b.nrows() {
                for q in 0..b.ncols() {
                    if i == j && p == q {
                        continue;
                    }
                    worst = worst.max(b[(p, q)].re);
                }
            }
        }
    }
    let criterion = worst <= LATTICE_TOL;
    let gen = fm.generator()?;
    let mut min_entry = f64::INFINITY;
    for &t in t_grid {
        let e = linalg::expm(&(gen.clone() * t));
        min_entry = min_entry.min(e.iter().fold(f64::INFINITY, |a, &x| a.min(x)));
    }
    Ok(PositivityReport {
        criterion,
        empirical: min_entry >= -EMPIRICAL_TOL,
        min_exp_entry: min_entry,
        worst_generator_entry: worst,
    })
}

#[derive(Debug, Clone)]
pub struct DominationReport {
    /// Empirical: `|exp(-t B_h) u| <= exp(-t A_h) |u|` entrywise over the
    /// grid and the seeded test vectors.
    pub dominates: bool,
    /// `|Re b_ij| <= -a_ij` entrywise on the off-diagonal blocks.
    pub offdiag_condition: bool,
    pub max_violation: f64,
}

/// Checks domination of `e^{tb}` by the positive semigroup `e^{ta}`.
pub fn domination_check(
    fm_a: &FormMatrix,
    fm_b: &FormMatrix,
    t_grid: &[f64],
    seed: u64,
) -> Result<DominationReport, FormsError> {
    if fm_a.dims != fm_b.dims {
        return Err(FormsError::ShapeMismatch);
    }
    fm_a.require_real()?;
    fm_b.require_real()?;
    let m = fm_a.block_count();
    let mut offdiag_condition = true;
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            let a = &fm_a.blocks[i][j];
            let b = &fm_b.blocks[i][j];
            for p in 0..a.nrows() {
                for q in 0..a.ncols() {
                    if b[(p, q)].re.abs() > -a[(p, q)].re + LATTICE_TOL {
                        offdiag_condition = false;
                    }
                }
            }
        }
    }
    let gen_a = fm_a.generator()?;
    let gen_b = fm_b.generator()?;
    let n = fm_a.total_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vectors: Vec<DVector<f64>> = (0..n)
        .map(|k| {
            let mut v = DVector::zeros(n);
            v[k] = 1.0;
            v
        })
        .collect();
    for _ in 0..8 {
        vectors.push(DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0)));
    }
    let mut max_violation = 0.0f64;
    for &t in t_grid {
        let ea = linalg::expm(&(gen_a.clone() * t));
        let eb = linalg::expm(&(gen_b.clone() * t));
        for u in &vectors {
            let dominated = &eb * u;
            let dominating = &ea * u.map(f64::abs);
            for k in 0..n {
                max_violation = max_violation.max(dominated[k].abs() - dominating[k]);
            }
        }
    }
    Ok(DominationReport {
        dominates: max_violation <= EMPIRICAL_TOL,
        offdiag_condition,
        max_violation,
    })
}

/// Desk-scale stand-ins for the essential bounds of an operator family
/// sampled on a grid.
#[derive(Debug, Clone)]
pub struct FamilyBounds {
    pub sup_norm: f64,
    pub inf_coercivity: f64,
}

pub fn multiplication_family_bounds(
    samples: &[DMatrix<Complex64>],
) -> Result<FamilyBounds, FormsError> {
    if samples.is_empty() {
        return Err(FormsError::EmptySamples);
    }
    let mut sup = 0.0f64;
    let mut inf = f64::INFINITY;
    for c in samples {
        sup = sup.max(linalg::spectral_norm_c(c));
        inf = inf.min(linalg::min_eig_hermitian(&linalg::hermitian_part(c)));
    }
    Ok(FamilyBounds {
        sup_norm: sup,
        inf_coercivity: inf,
    })
}

/// Samples an operator-valued function on the default uniform grid of
/// `[0, 1]` (257 points).
pub fn sample_on_grid(f: impl Fn(f64) -> DMatrix<Complex64>) -> Vec<DMatrix<Complex64>> {
    let n = 257;
    (0..n)
        .map(|k| f(k as f64 / (n - 1) as f64))
        .collect()
}
