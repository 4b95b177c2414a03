//! Orientation-preserving and -reversing conformal maps of `CP^1`.
//!
//! `(m, +)` acts by `z -> m z`, `(m, -)` by `z -> m conj(z)`, with
//!
//! ```text
//! (A, +) o (B, e) = (A B, e)
//! (A, -) o (B, e) = (A conj(B), -e)
//! ```

use std::ops::Mul;

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::geom::{det2, ProjectivePoint};
use crate::hypvol::TetConfig;
use crate::linalg::{c, C64};

pub type Mat2 = Matrix2<C64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Preserving,
    Reversing,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Preserving => 1.0,
            Orientation::Reversing => -1.0,
        }
    }

    fn compose(self, other: Self) -> Self {
        if self == other {
            Orientation::Preserving
        } else {
            Orientation::Reversing
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedMoebius {
    matrix: Mat2,
    orientation: Orientation,
}

fn normalize(m: Mat2) -> Result<Mat2> {
    let det = m.determinant();
    if !(det.norm() > 1e-300) || !det.norm().is_finite() {
        return Err(Error::SingularMatrix);
    }
    Ok(m / det.sqrt())
}

impl ExtendedMoebius {
    pub fn new(matrix: Mat2, orientation: Orientation) -> Result<Self> {
        Ok(Self {
            matrix: normalize(matrix)?,
            orientation,
        })
    }

    pub fn holomorphic(matrix: Mat2) -> Result<Self> {
        Self::new(matrix, Orientation::Preserving)
    }

    pub fn antiholomorphic(matrix: Mat2) -> Result<Self> {
        Self::new(matrix, Orientation::Reversing)
    }

    pub fn identity() -> Self {
        Self {
            matrix: Mat2::identity(),
            orientation: Orientation::Preserving,
        }
    }

    /// Determinant-one representative (defined up to sign).
    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn is_preserving(&self) -> bool {
        self.orientation == Orientation::Preserving
    }

    /// `self o other`.
    pub fn compose(&self, other: &Self) -> Self {
        let rhs = match self.orientation {
            Orientation::Preserving => other.matrix,
            Orientation::Reversing => other.matrix.map(|z| z.conj()),
        };
        Self {
            matrix: normalize(self.matrix * rhs).expect("product of unimodular matrices"),
            orientation: self.orientation.compose(other.orientation),
        }
    }

    pub fn inverse(&self) -> Self {
        let inv = self
            .matrix
            .try_inverse()
            .expect("unimodular matrices are invertible");
        let matrix = match self.orientation {
            Orientation::Preserving => inv,
            Orientation::Reversing => inv.map(|z| z.conj()),
        };
        Self {
            matrix: normalize(matrix).expect("inverse is unimodular"),
            orientation: self.orientation,
        }
    }

    pub fn apply(&self, p: &ProjectivePoint) -> ProjectivePoint {
        let v = match self.orientation {
            Orientation::Preserving => p.vector(),
            Orientation::Reversing => p.vector().map(|z| z.conj()),
        };
        let w = self.matrix * v;
        ProjectivePoint::new(w[0], w[1]).expect("invertible map sends nonzero to nonzero")
    }

    pub fn apply_tet(&self, t: &TetConfig) -> TetConfig {
        t.map(|p| self.apply(p))
    }

    /// Distance in `PSL(2, C)`: Frobenius distance minimized over the sign
    /// ambiguity; infinite across orientation classes.
    pub fn projective_distance(&self, other: &Self) -> f64 {
        if self.orientation != other.orientation {
            return f64::INFINITY;
        }
        let plus = (self.matrix - other.matrix).norm();
        let minus = (self.matrix + other.matrix).norm();
        plus.min(minus)
    }

    /// The holomorphic map sending `(a, b, c)` to `(0, 1, inf)`.
    pub fn to_zero_one_infinity(
        a: &ProjectivePoint,
        b: &ProjectivePoint,
        c_: &ProjectivePoint,
    ) -> Result<Self> {
        // z -> [det(z, a) det(b, c) : det(z, c) det(b, a)]
        let (va, vb, vc) = (a.vector(), b.vector(), c_.vector());
        let s = det2(&vb, &vc);
        let t = det2(&vb, &va);
        if s.norm() < 1e-12 || t.norm() < 1e-12 || det2(&va, &vc).norm() < 1e-12 {
            return Err(Error::CoincidentPoints);
        }
        // det(z, q) = z.x q.y - q.x z.y = (q.y, -q.x) . z
        let m = Mat2::new(s * va[1], -s * va[0], t * vc[1], -t * vc[0]);
        Self::holomorphic(m)
    }

    /// Holomorphic map sending three distinct points to three distinct points.
    pub fn three_point(
        from: [&ProjectivePoint; 3],
        to: [&ProjectivePoint; 3],
    ) -> Result<Self> {
        let f = Self::to_zero_one_infinity(from[0], from[1], from[2])?;
        let g = Self::to_zero_one_infinity(to[0], to[1], to[2])?;
        Ok(g.inverse().compose(&f))
    }

    /// Fixed points of a holomorphic map (one for parabolic, two otherwise).
    pub fn fixed_points(&self) -> Vec<ProjectivePoint> {
        // a z + b = z (c z + d)  =>  c z^2 + (d - a) z - b = 0 homogeneously
        let m = &self.matrix;
        let (a, b, cc, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        // In [x:y]: c x^2 + (d - a) x y - b y^2 = 0
        if cc.norm() < 1e-14 {
            let mut out = vec![ProjectivePoint::infinity()];
            if (d - a).norm() > 1e-14 {
                out.push(ProjectivePoint::finite(b / (d - a)));
            }
            return out;
        }
        let disc = ((d - a) * (d - a) + 4.0 * b * cc).sqrt();
        let roots = [(a - d + disc) / (2.0 * cc), (a - d - disc) / (2.0 * cc)];
        let mut out = vec![ProjectivePoint::finite(roots[0])];
        if disc.norm() > 1e-14 {
            out.push(ProjectivePoint::finite(roots[1]));
        }
        out
    }
}

impl Mul for ExtendedMoebius {
    type Output = ExtendedMoebius;

    fn mul(self, rhs: Self) -> Self {
        self.compose(&rhs)
    }
}

/// `z -> lambda z`.
pub fn scaling(lambda: C64) -> ExtendedMoebius {
    ExtendedMoebius::holomorphic(Mat2::new(lambda, c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)))
        .expect("nonzero scaling")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::random_point;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_moebius(rng: &mut ChaCha8Rng) -> ExtendedMoebius {
        let mut z = || c(rng.sample(StandardNormal), rng.sample(StandardNormal));
        let m = Mat2::new(z(), z(), z(), z());
        let o = if z().re > 0.0 {
            Orientation::Preserving
        } else {
            Orientation::Reversing
        };
        ExtendedMoebius::new(m, o).unwrap()
    }

    #[test]
    fn composition_matches_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let (f, g) = (random_moebius(&mut rng), random_moebius(&mut rng));
            let p = random_point(&mut rng);
            let lhs = f.compose(&g).apply(&p);
            let rhs = f.apply(&g.apply(&p));
            assert!(lhs.chordal_distance(&rhs) < 1e-10);
        }
    }

    #[test]
    fn associativity_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let (f, g, h) = (
                random_moebius(&mut rng),
                random_moebius(&mut rng),
                random_moebius(&mut rng),
            );
            let a = (f * g) * h;
            let b = f * (g * h);
            let scale = a.matrix().norm().max(1.0);
            assert!(a.projective_distance(&b) < 1e-12 * scale * scale);
            let id = f * f.inverse();
            assert!(id.projective_distance(&ExtendedMoebius::identity()) < 1e-10);
        }
    }

    #[test]
    fn composition_law_orientations() {
        let a = ExtendedMoebius::antiholomorphic(Mat2::new(c(1.0, 1.0), c(0.0, 2.0), c(0.5, 0.0), c(1.0, 0.0))).unwrap();
        let b = ExtendedMoebius::holomorphic(Mat2::new(c(0.0, 1.0), c(1.0, 0.0), c(2.0, 0.0), c(1.0, -1.0))).unwrap();
        let ab = a * b;
        assert_eq!(ab.orientation(), Orientation::Reversing);
        let expect = ExtendedMoebius::antiholomorphic(a.matrix() * b.matrix().map(|z| z.conj())).unwrap();
        assert!(ab.projective_distance(&expect) < 1e-12);
        assert_eq!((a * a).orientation(), Orientation::Preserving);
    }

    #[test]
    fn three_point_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let from = [random_point(&mut rng), random_point(&mut rng), random_point(&mut rng)];
            let to = [random_point(&mut rng), random_point(&mut rng), random_point(&mut rng)];
            let g = ExtendedMoebius::three_point([&from[0], &from[1], &from[2]], [&to[0], &to[1], &to[2]]).unwrap();
            for i in 0..3 {
                assert!(g.apply(&from[i]).chordal_distance(&to[i]) < 1e-9);
            }
        }
        let p = ProjectivePoint::zero();
        assert!(ExtendedMoebius::to_zero_one_infinity(&p, &p, &ProjectivePoint::infinity()).is_err());
    }

    #[test]
    fn fixed_points_of_scaling() {
        let f = scaling(c(2.0, 0.0)).fixed_points();
        assert_eq!(f.len(), 2);
        assert!(f.iter().any(|p| p.is_infinity()));
        assert!(f.iter().any(|p| p.chordal_distance(&ProjectivePoint::zero()) < 1e-15));
    }
}
