//! The Veronese embedding of `CP^1` into complete flags of `C^n` and the
//! irreducible representation `pi_n` of `PSL(2, C)` on `C^n`.
//!
//! For `xi = [x : y]` the `(n - i)`-dimensional member of `V_n(xi)` is spanned
//! by the shifts, `k = 0..n-1-i`, of the binomial vector
//!
//! ```text
//! (x^i, C(i,1) x^{i-1} y, ..., y^i)
//! ```
//!
//! padded with `k` leading and `n - i - k - 1` trailing zeros. `pi_n(A)` is the
//! matrix taking the line vector `c(x, y) = (C(n-1, j) x^{n-1-j} y^j)_j` of
//! `xi` to the line vector of `A xi`:
//!
//! ```text
//! c(A (x, y)) = pi_n(A) c(x, y)
//! ```
//!
//! which makes `V_n(A xi) = pi_n(A) V_n(xi)` hold member by member, the
//! members being the osculating spaces of the curve `xi -> [c(x, y)]`.

use std::f64::consts::PI;

use nalgebra::Vector2;

use crate::error::{Error, Result};
use crate::geom::{flag_distance, Flag, ProjectivePoint};
use crate::hypvol::TetConfig;
use crate::borel::FlagConfig;
use crate::linalg::{self, c, CMat, CVec, C64};
use crate::moebius::{ExtendedMoebius, Mat2, Orientation};
use crate::optim::{nelder_mead, NelderMeadOptions};

/// Element of `PSL(n, C)`: a determinant-one matrix, equal to any of its
/// multiples by an `n`-th root of unity.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    matrix: CMat,
}

impl GroupElement {
    /// Rescale `m` to determinant one.
    pub fn new(m: CMat) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n || n == 0 {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: m.ncols(),
            });
        }
        let det = m.determinant();
        if !(det.norm() > 0.0) || !det.norm().is_finite() {
            return Err(Error::SingularMatrix);
        }
        let root = det.powf(1.0 / n as f64);
        Ok(Self { matrix: m / root })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: CMat::identity(n, n),
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self::new(&self.matrix * &other.matrix).expect("product of invertibles")
    }

    pub fn inverse(&self) -> Self {
        let inv = self
            .matrix
            .clone()
            .try_inverse()
            .expect("determinant-one matrix is invertible");
        Self::new(inv).expect("inverse is invertible")
    }

    /// `self other self^{-1}`.
    pub fn conjugate(&self, other: &Self) -> Self {
        self.compose(other).compose(&self.inverse())
    }

    /// Frobenius distance minimized over `n`-th roots of unity.
    pub fn projective_distance(&self, other: &Self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|k| {
                let w = C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
                linalg::frobenius(&(&self.matrix - &other.matrix * w))
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Frobenius norm of the determinant-one representative.
    pub fn norm(&self) -> f64 {
        linalg::frobenius(&self.matrix)
    }
}

fn binomial_row(i: usize) -> Vec<f64> {
    let mut row = vec![1.0; i + 1];
    for j in 1..i {
        row[j] = row[j - 1] * (i + 1 - j) as f64 / j as f64;
    }
    row
}

/// `(C(i, j) x^{i-j} y^j)_{j=0..i}`.
fn binomial_vector(x: C64, y: C64, i: usize) -> Vec<C64> {
    let row = binomial_row(i);
    (0..=i)
        .map(|j| x.powu((i - j) as u32) * y.powu(j as u32) * row[j])
        .collect()
}

/// The flag `V_n(xi)`, stored with a unitary adapted basis.
pub fn veronese_flag(xi: &ProjectivePoint, n: usize) -> Flag {
    assert!(n >= 1, "ambient dimension must be positive");
    let (x, y) = (xi.x(), xi.y());
    let mut adapted = CMat::zeros(n, n);
    for d in 1..=n {
        // Member of dimension d: shifts of the degree (n - d) vector.
        let i = n - d;
        let v = binomial_vector(x, y, i);
        let mut span = CMat::zeros(n, d);
        for k in 0..d {
            for (j, &vj) in v.iter().enumerate() {
                span[(k + j, k)] = vj;
            }
        }
        // New direction: the part of the member orthogonal to the previous one.
        let q = span.qr().q();
        let prev = adapted.columns(0, d - 1).into_owned();
        let mut best = CVec::zeros(n);
        let mut best_norm = -1.0;
        for k in 0..d {
            let col: CVec = q.column(k).into_owned();
            let r = &col - &prev * (prev.adjoint() * &col);
            let rn = r.norm();
            if rn > best_norm {
                best_norm = rn;
                best = r;
            }
        }
        // Polish: one more orthogonalization pass against the member basis.
        let mut w = &q * (q.adjoint() * &best);
        w -= &prev * (prev.adjoint() * &w);
        let wn = w.norm();
        adapted.set_column(d - 1, &(w / C64::from(wn)));
    }
    Flag::from_columns(adapted).expect("Veronese flags are nondegenerate")
}

/// `V_n` applied to each vertex.
pub fn veronese_config(t: &TetConfig, n: usize) -> FlagConfig {
    FlagConfig::new(t.points().iter().map(|p| veronese_flag(p, n)).collect())
        .expect("common dimension")
}

/// `pi_n(A)`: symmetric power action on binary forms of degree `n - 1`.
pub fn irreducible_rep(a: &Mat2, n: usize) -> Result<GroupElement> {
    if a.determinant().norm() < 1e-300 {
        return Err(Error::SingularMatrix);
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let d = n - 1;
    let (a11, a12, a21, a22) = (a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
    let row = binomial_row(d);
    // (a11 x + a12 y)^{d-j} (a21 x + a22 y)^j as coefficients of x^{d-k} y^k
    let pow = |p: C64, q: C64, e: usize| -> Vec<C64> {
        let r = binomial_row(e);
        (0..=e)
            .map(|k| p.powu((e - k) as u32) * q.powu(k as u32) * r[k])
            .collect()
    };
    let mut m = CMat::zeros(n, n);
    for j in 0..n {
        let f = pow(a11, a12, d - j);
        let g = pow(a21, a22, j);
        let mut prod = vec![c(0.0, 0.0); n];
        for (s, fs) in f.iter().enumerate() {
            for (t, gt) in g.iter().enumerate() {
                prod[s + t] += fs * gt;
            }
        }
        for k in 0..n {
            m[(j, k)] = prod[k] * (row[j] / row[k]);
        }
    }
    GroupElement::new(m)
}

/// `pi_n` of the holomorphic part of a Moebius map.
pub fn moebius_rep(g: &ExtendedMoebius, n: usize) -> GroupElement {
    irreducible_rep(g.matrix(), n).expect("Moebius matrices are unimodular")
}

/// `g F`.
pub fn act_on_flag(g: &GroupElement, f: &Flag) -> Result<Flag> {
    f.transform(g.matrix())
}

/// Extended action: `(m, +)` acts by `pi_n(m)`, `(m, -)` by entrywise
/// conjugation followed by `pi_n(m)`.
pub fn act_extended(r: &ExtendedMoebius, f: &Flag, n: usize) -> Result<Flag> {
    if f.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: f.dim(),
        });
    }
    let g = moebius_rep(r, n);
    match r.orientation() {
        Orientation::Preserving => act_on_flag(&g, f),
        Orientation::Reversing => act_on_flag(&g, &f.conjugate()),
    }
}

fn squared_flag_mismatch(candidate: &Flag, target: &Flag) -> f64 {
    let n = target.dim();
    let mut total = 0.0;
    for i in 1..n {
        let a = candidate.level_basis(i);
        let b = target.level_basis(i);
        let r = &b - &a * (a.adjoint() * &b);
        total += r.norm_squared();
    }
    total
}

/// Point `xi` minimizing `flag_distance(V_n(xi), F)`, with that distance.
///
/// Coarse grid over the sphere, then simplex refinement in a local chart
/// `p0 + s p0^perp` around the best grid point.
pub fn veronese_point_recover(f: &Flag) -> (ProjectivePoint, f64) {
    let n = f.dim();
    let mismatch = |p: &ProjectivePoint| squared_flag_mismatch(&veronese_flag(p, n), f);

    let mut best = ProjectivePoint::infinity();
    let mut best_val = mismatch(&best);
    const THETA_STEPS: usize = 24;
    const PHI_STEPS: usize = 48;
    for a in 0..=THETA_STEPS {
        let theta = PI * a as f64 / THETA_STEPS as f64;
        let phis = if a == 0 || a == THETA_STEPS { 1 } else { PHI_STEPS };
        for b in 0..phis {
            let phi = 2.0 * PI * b as f64 / PHI_STEPS as f64;
            let p = ProjectivePoint::new(
                c((theta / 2.0).cos(), 0.0),
                C64::from_polar((theta / 2.0).sin(), phi),
            )
            .expect("unit vector");
            let v = mismatch(&p);
            if v < best_val {
                best_val = v;
                best = p;
            }
        }
    }

    let mut step = 0.1;
    for _ in 0..4 {
        let base = best.vector();
        let perp = Vector2::new(-base[1].conj(), base[0].conj());
        let chart = |s: &[f64]| -> ProjectivePoint {
            let w = base + perp * c(s[0], s[1]);
            ProjectivePoint::new(w[0], w[1]).expect("chart stays away from zero")
        };
        let opts = NelderMeadOptions {
            max_evals: 400,
            initial_step: step,
            f_tol: 0.0,
            x_tol: 1e-15,
        };
        let res = nelder_mead(|s| mismatch(&chart(s)), &[0.0, 0.0], &opts);
        if res.value <= best_val {
            best_val = res.value;
            best = chart(&res.x);
        }
        step = (best_val.sqrt() * 10.0).clamp(1e-12, step);
    }
    let residual = flag_distance(&veronese_flag(&best, n), f).expect("same dimension");
    (best, residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::borel::{borel_bound, borel_cocycle};
    use crate::geom::{random_point, Subspace};
    use crate::hypvol::nu3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    /// `exp(X)` for a random traceless `X`, a well-conditioned element of SL(2).
    fn rand_mat2(rng: &mut ChaCha8Rng) -> Mat2 {
        let mut z = || c(rng.sample(StandardNormal), rng.sample(StandardNormal)) * 0.25;
        let (a, b, cc) = (z(), z(), z());
        Mat2::new(a, b, cc, -a).exp()
    }

    fn omega() -> C64 {
        C64::from_polar(1.0, PI / 3.0)
    }

    #[test]
    fn infinity_gives_standard_flag() {
        for n in 2..=6 {
            let f = veronese_flag(&ProjectivePoint::infinity(), n);
            assert!(flag_distance(&f, &Flag::standard(n)).unwrap() < 1e-15);
        }
    }

    #[test]
    fn zero_gives_reversed_flag() {
        for n in 2..=6 {
            let f = veronese_flag(&ProjectivePoint::zero(), n);
            assert!(flag_distance(&f, &Flag::reversed(n)).unwrap() < 1e-15);
        }
    }

    #[test]
    fn n2_is_the_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let p = random_point(&mut rng);
            let f = veronese_flag(&p, 2);
            let line = Subspace::from_columns(&CMat::from_column_slice(2, 1, &[p.x(), p.y()])).unwrap();
            assert!(f.level(1).distance(&line).unwrap() < 1e-14);
        }
    }

    #[test]
    fn members_match_shifted_binomial_spans() {
        let p = ProjectivePoint::finite(c(0.7, -1.3));
        let n = 5;
        let f = veronese_flag(&p, n);
        for d in 1..n {
            let v = binomial_vector(p.x(), p.y(), n - d);
            let mut span = CMat::zeros(n, d);
            for k in 0..d {
                for (j, &vj) in v.iter().enumerate() {
                    span[(k + j, k)] = vj;
                }
            }
            let s = Subspace::from_columns(&span).unwrap();
            assert!(f.level(d).distance(&s).unwrap() < 1e-13, "d = {d}");
        }
    }

    #[test]
    fn rep_of_identity_and_diagonal() {
        for n in 2..=6 {
            let id = irreducible_rep(&Mat2::identity(), n).unwrap();
            assert!(id.projective_distance(&GroupElement::identity(n)) < 1e-14);
        }
        let lambda = c(1.3, 0.4);
        let a = Mat2::new(lambda, c(0.0, 0.0), c(0.0, 0.0), lambda.inv());
        let n = 5;
        let expect = CMat::from_fn(n, n, |i, j| {
            if i == j {
                lambda.powi(n as i32 - 1 - 2 * i as i32)
            } else {
                c(0.0, 0.0)
            }
        });
        let got = irreducible_rep(&a, n).unwrap();
        assert!(got.projective_distance(&GroupElement::new(expect).unwrap()) < 1e-13);
    }

    #[test]
    fn rep_n2_is_identity_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = rand_mat2(&mut rng);
        let got = irreducible_rep(&a, 2).unwrap();
        let want = GroupElement::new(CMat::from_fn(2, 2, |i, j| a[(i, j)])).unwrap();
        assert!(got.projective_distance(&want) < 1e-13);
    }

    #[test]
    fn unipotent_symmetric_square() {
        // Direct substitution: (x, y) -> (x + y, y) acting on
        // (x^2, 2xy, y^2) gives ((x+y)^2, 2(x+y)y, y^2).
        let a = Mat2::new(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        let got = irreducible_rep(&a, 3).unwrap();
        let expect = CMat::from_row_slice(
            3,
            3,
            &[
                c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0),
                c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0),
                c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0),
            ],
        );
        assert!(got.projective_distance(&GroupElement::new(expect).unwrap()) < 1e-14);
        let g = ExtendedMoebius::holomorphic(a).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let p = random_point(&mut rng);
            let lhs = veronese_flag(&g.apply(&p), 3);
            let rhs = act_on_flag(&got, &veronese_flag(&p, 3)).unwrap();
            assert!(flag_distance(&lhs, &rhs).unwrap() < 1e-10);
        }
    }

    #[test]
    fn homomorphism_and_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 2..=6 {
            for _ in 0..20 {
                let (a, b) = (rand_mat2(&mut rng), rand_mat2(&mut rng));
                let lhs = irreducible_rep(&(a * b), n).unwrap();
                let rhs = irreducible_rep(&a, n).unwrap().compose(&irreducible_rep(&b, n).unwrap());
                assert!(lhs.projective_distance(&rhs) < 1e-10);
                let g = ExtendedMoebius::holomorphic(a).unwrap();
                let p = random_point(&mut rng);
                let f1 = veronese_flag(&g.apply(&p), n);
                let f2 = act_extended(&g, &veronese_flag(&p, n), n).unwrap();
                assert!(flag_distance(&f1, &f2).unwrap() < 1e-9);
            }
        }
    }

    #[test]
    fn antiholomorphic_action() {
        let r = ExtendedMoebius::antiholomorphic(Mat2::identity()).unwrap();
        for n in 2..=5 {
            let f = act_extended(&r, &veronese_flag(&ProjectivePoint::finite(omega()), n), n).unwrap();
            let g = veronese_flag(&ProjectivePoint::finite(omega().conj()), n);
            assert!(flag_distance(&f, &g).unwrap() < 1e-13);
        }
        let id = GroupElement::identity(3);
        let f = veronese_flag(&ProjectivePoint::finite(omega()), 3);
        assert_eq!(act_on_flag(&id, &f).unwrap(), f);
        assert!(act_extended(&r, &f, 4).is_err());
    }

    #[test]
    fn maximal_on_base_tetrahedron() {
        for n in 2..=4 {
            let b = borel_cocycle(&veronese_config(&TetConfig::base(), n)).unwrap();
            assert!((b - borel_bound(n)).abs() < 1e-9, "n = {n}: {b} vs {}", borel_bound(n));
        }
        let b = borel_cocycle(&veronese_config(&TetConfig::regular(false), 3)).unwrap();
        assert!((b + 4.0 * nu3()).abs() < 1e-9);
    }

    #[test]
    fn recover_exact_points() {
        let (p, r) = veronese_point_recover(&veronese_flag(&ProjectivePoint::infinity(), 3));
        assert!(p.is_infinity() || p.chordal_distance(&ProjectivePoint::infinity()) < 1e-12);
        assert!(r < 1e-12);
        let z = c(0.3, 0.2);
        let (p, r) = veronese_point_recover(&veronese_flag(&ProjectivePoint::finite(z), 4));
        assert!((p.to_complex().unwrap() - z).norm() < 1e-9);
        assert!(r < 1e-9, "{r}");
    }

    #[test]
    fn recover_perturbed_standard_flag() {
        let mut h = CMat::zeros(3, 3);
        h[(0, 1)] = c(1e-3, 0.0);
        h[(1, 0)] = c(-1e-3, 0.0);
        let f = Flag::standard(3).transform(&h.exp()).unwrap();
        let (p, r) = veronese_point_recover(&f);
        assert!(p.chordal_distance(&ProjectivePoint::infinity()) < 1e-2);
        assert!(r > 1e-5 && r < 1e-2, "{r}");
    }

    #[test]
    fn projective_distance_ignores_roots_of_unity() {
        let g = GroupElement::identity(3);
        let w = C64::from_polar(1.0, 2.0 * PI / 3.0);
        let h = GroupElement {
            matrix: CMat::identity(3, 3) * w,
        };
        assert!(g.projective_distance(&h) < 1e-14);
    }
}
