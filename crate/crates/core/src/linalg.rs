//! Small dense complex linear-algebra helpers shared by the flag code.
//!
//! Numerical rank uses three bands on the ratio `σ / σ_max`:
//! below [`NOISE_FLOOR`] a singular value is an exact zero polluted by
//! rounding, at or above [`TAU_RANK`] it is a genuine direction, and anything
//! in between is reported as [`Error::IllConditioned`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Relative singular-value threshold separating rank from null directions.
pub const TAU_RANK: f64 = 1e-9;
/// Subspaces closer than this in projector distance are equal.
pub const TAU_EQ: f64 = 1e-8;
/// Relative singular values below this are rounding noise on an exact zero.
pub const NOISE_FLOOR: f64 = 1e-11;

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// Classify singular values (sorted or not) into a numerical rank.
pub fn numerical_rank(singular_values: &[f64]) -> Result<usize> {
    let max = singular_values.iter().cloned().fold(0.0_f64, f64::max);
    if max == 0.0 {
        return Ok(0);
    }
    let mut rank = 0;
    for &s in singular_values {
        let ratio = s / max;
        if ratio >= TAU_RANK {
            rank += 1;
        } else if ratio >= NOISE_FLOOR {
            return Err(Error::IllConditioned { ratio });
        }
    }
    Ok(rank)
}

/// Singular value decomposition `m = u diag(s) v^*`, singular values in
/// non-increasing order.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `rows x cols`; columns with zero singular value are zero.
    pub u: CMat,
    pub singular_values: Vec<f64>,
    /// `cols x cols` unitary.
    pub v: CMat,
}

/// One-sided (Hestenes) Jacobi SVD.
///
/// nalgebra's complex SVD can return factors that do not reconstruct the
/// input when singular values repeat, so subspace computations go through
/// this routine instead.
pub fn svd(m: &CMat) -> Svd {
    const MAX_SWEEPS: usize = 80;
    let (rows, cols) = (m.nrows(), m.ncols());
    let mut a = m.clone();
    let mut v = CMat::identity(cols, cols);
    // Columns below this squared norm are numerically zero; rotating them
    // against each other only amplifies rounding noise.
    let negligible = (1e-3 * f64::EPSILON * frobenius(m)).powi(2);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.norm();
                if alpha.min(beta) <= negligible || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Make the inner product real, then rotate as in the real case.
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for mat in [&mut a, &mut v] {
                    for r in 0..mat.nrows() {
                        let x = mat[(r, p)];
                        let y = mat[(r, q)] * phase.conj();
                        mat[(r, p)] = x * cs - y * sn;
                        mat[(r, q)] = x * sn + y * cs;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let mut u = CMat::zeros(rows, cols);
    let mut vs = CMat::zeros(cols, cols);
    let mut singular_values = Vec::with_capacity(cols);
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        if s > 0.0 {
            u.set_column(dst, &(a.column(src) / C64::from(s)));
        }
        vs.set_column(dst, &v.column(src));
        singular_values.push(s);
    }
    Svd {
        u,
        singular_values,
        v: vs,
    }
}

/// Singular values in non-increasing order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    svd(m).singular_values
}

/// Numerical rank of the column span of `m`.
pub fn rank(m: &CMat) -> Result<usize> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return Ok(0);
    }
    numerical_rank(&singular_values(m))
}

/// Orthonormal basis (as columns) of the column span of `m`.
pub fn orthonormal_span(m: &CMat) -> Result<CMat> {
    let n = m.nrows();
    if m.ncols() == 0 || n == 0 {
        return Ok(CMat::zeros(n, 0));
    }
    let d = svd(m);
    let r = numerical_rank(&d.singular_values)?;
    Ok(d.u.columns(0, r).into_owned())
}

/// Horizontally stack column blocks.
pub fn hstack(blocks: &[CMat], nrows: usize) -> CMat {
    let total: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(nrows, total);
    let mut at = 0;
    for b in blocks {
        out.view_mut((0, at), (nrows, b.ncols())).copy_from(b);
        at += b.ncols();
    }
    out
}

/// Largest singular value.
pub fn op_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    singular_values(m)[0]
}

/// Sine of the largest principal angle between two equal-dimensional spans
/// given by orthonormal columns; equals the operator-norm projector gap.
pub fn subspace_gap(a: &CMat, b: &CMat) -> f64 {
    debug_assert_eq!(a.ncols(), b.ncols());
    if a.ncols() == 0 {
        return 0.0;
    }
    let residual = b - a * (a.adjoint() * b);
    op_norm(&residual).min(1.0)
}

/// Unit vector spanning the (one-dimensional) null space of `m`, with the
/// two smallest singular values relative to the largest.
pub fn null_vector(m: &CMat) -> (CVec, f64, f64) {
    let k = m.ncols();
    let d = svd(m);
    let sv = &d.singular_values;
    let max = sv[0].max(f64::MIN_POSITIVE);
    // Columns beyond the row count have zero singular value.
    let second = if k > 1 { sv[k - 2] / max } else { 1.0 };
    (d.v.column(k - 1).into_owned(), sv[k - 1] / max, second)
}

/// Frobenius norm.
pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Skew-Hermitian matrix with zero diagonal built from `n(n-1)` reals:
/// each pair `(re, im)` fills the strict upper triangle.
pub fn skew_hermitian_offdiag(n: usize, params: &[f64]) -> CMat {
    debug_assert_eq!(params.len(), n * (n - 1));
    let mut h = CMat::zeros(n, n);
    let mut it = params.chunks_exact(2);
    for p in 0..n {
        for q in (p + 1)..n {
            let pair = it.next().expect("parameter count checked above");
            let z = c(pair[0], pair[1]);
            h[(p, q)] = z;
            h[(q, p)] = -z.conj();
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn gaussian(rng: &mut ChaCha8Rng, r: usize, k: usize) -> CMat {
        CMat::from_fn(r, k, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
    }

    fn check_svd(m: &CMat) {
        let d = svd(m);
        let s = CMat::from_diagonal(&CVec::from_iterator(
            m.ncols(),
            d.singular_values.iter().map(|&x| c(x, 0.0)),
        ));
        let scale = d.singular_values[0].max(1.0);
        assert!((&d.u * s * d.v.adjoint() - m).norm() < 1e-13 * scale);
        let k = m.ncols();
        let err = (d.v.adjoint() * &d.v - CMat::identity(k, k)).norm();
        assert!(err < 1e-13, "{}x{} unitarity {err:e} sv {:?}", m.nrows(), k, d.singular_values);
        assert!(d.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn svd_reconstructs_random_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (r, k) in [(4, 4), (6, 3), (3, 6), (1, 5), (5, 1), (8, 8)] {
            for _ in 0..20 {
                check_svd(&gaussian(&mut rng, r, k));
            }
        }
    }

    #[test]
    fn svd_with_repeated_singular_values() {
        // Projection of a unitary onto the complement of a random plane.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let q = gaussian(&mut rng, 4, 4).qr().q();
            let plane = gaussian(&mut rng, 4, 2).qr().q();
            let p = &q - &plane * (plane.adjoint() * &q);
            check_svd(&p);
            let sv = singular_values(&p);
            assert!((sv[0] - 1.0).abs() < 1e-13 && (sv[1] - 1.0).abs() < 1e-13 && sv[2] < 1e-13);
            let span = orthonormal_span(&p).unwrap();
            assert_eq!(span.ncols(), 2);
            assert!((span.adjoint() * &plane).norm() < 1e-13);
        }
    }

    #[test]
    fn qr_factor_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for n in 1..=8 {
            let m = gaussian(&mut rng, n, n);
            let qr = m.clone().qr();
            let q = qr.q();
            assert!((q.adjoint() * &q - CMat::identity(n, n)).norm() < 1e-13);
            assert!((&q * qr.r() - &m).norm() < 1e-12 * m.norm());
        }
    }

    #[test]
    fn rank_bands() {
        assert_eq!(numerical_rank(&[1.0, 0.5, 1e-14]).unwrap(), 2);
        assert_eq!(numerical_rank(&[1.0, 1e-3]).unwrap(), 2);
        assert!(matches!(
            numerical_rank(&[1.0, 1e-10]),
            Err(Error::IllConditioned { .. })
        ));
        assert_eq!(numerical_rank(&[0.0, 0.0]).unwrap(), 0);
    }

    #[test]
    fn span_of_repeated_columns() {
        let m = CMat::from_fn(3, 3, |i, j| if j < 2 { c((i + 1) as f64, 0.0) } else { c(0.0, (i * i) as f64) });
        let q = orthonormal_span(&m).unwrap();
        assert_eq!(q.ncols(), 2);
        let gram = q.adjoint() * &q;
        assert!((gram - CMat::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn exp_of_skew_hermitian_is_unitary() {
        let h = skew_hermitian_offdiag(3, &[0.3, -1.2, 2.0, 0.1, -0.7, 0.4]);
        let u = h.exp();
        assert!((u.adjoint() * &u - CMat::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn null_vector_of_rank_deficient() {
        let m = CMat::from_row_slice(2, 3, &[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let (v, s0, s1) = null_vector(&m);
        assert!(s0 < 1e-14 && s1 > 0.1);
        assert!((&m * &v).norm() < 1e-14);
    }
}
