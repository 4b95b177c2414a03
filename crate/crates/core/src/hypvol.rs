//! Volumes of ideal hyperbolic tetrahedra.
//!
//! The volume of the ideal tetrahedron with vertices `z0..z3` on the sphere
//! at infinity is the Bloch-Wigner dilogarithm of the cross-ratio
//!
//! ```text
//! cr = ((z3 - z0)(z2 - z1)) / ((z3 - z1)(z2 - z0))
//! D(z) = Im Li2(z) + arg(1 - z) log|z|
//! ```
//!
//! so that `(0, 1, e^{i pi/3}, inf)` has volume `+nu3`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::Vector2;

use crate::geom::{det2, ProjectivePoint};
use crate::linalg::{c, CVec, C64};

/// Number of terms of the Bernoulli-accelerated dilogarithm series. With the
/// argument reduced to `|z| <= 1, Re z <= 1/2`, `|log(1 - z)| < 1.8` and the
/// series converges like `(1.8 / 2 pi)^k`.
const LI2_TERMS: usize = 40;

/// Vectors shorter than this, relative to the longest of the four, count as
/// zero in a quotient class.
pub const ZERO_VECTOR_TOL: f64 = 1e-9;

/// `B_k / k!` for `k < LI2_TERMS`, from `x / (e^x - 1) = sum B_k x^k / k!`.
fn bernoulli_over_factorial() -> &'static [f64; LI2_TERMS] {
    static TABLE: OnceLock<[f64; LI2_TERMS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut inv_fact = [0.0; LI2_TERMS + 2];
        inv_fact[0] = 1.0;
        for k in 1..inv_fact.len() {
            inv_fact[k] = inv_fact[k - 1] / k as f64;
        }
        // (e^x - 1)/x * sum b_k x^k = 1  =>  sum_{j<=m} b_j / (m - j + 1)! = 0
        let mut b = [0.0; LI2_TERMS];
        b[0] = 1.0;
        for m in 1..LI2_TERMS {
            let s: f64 = (0..m).map(|j| b[j] * inv_fact[m - j + 1]).sum();
            b[m] = -s;
        }
        // Odd entries beyond B_1 vanish exactly.
        for (k, v) in b.iter_mut().enumerate() {
            if k >= 3 && k % 2 == 1 {
                *v = 0.0;
            }
        }
        b
    })
}

/// `Li2(z)` for `|z| <= 1`, `Re z <= 1/2`.
fn li2_reduced(z: C64) -> C64 {
    let u = -(c(1.0, 0.0) - z).ln();
    let b = bernoulli_over_factorial();
    let mut power = u;
    let mut sum = c(0.0, 0.0);
    for (k, bk) in b.iter().enumerate() {
        if *bk != 0.0 {
            sum += power * (bk / (k + 1) as f64);
        }
        power *= u;
    }
    sum
}

/// Bloch-Wigner dilogarithm of a finite complex number.
pub fn bloch_wigner(z: C64) -> f64 {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return 0.0;
    }
    if z.im == 0.0 {
        return 0.0;
    }
    // D(1/z) = -D(z), D(1-z) = -D(z).
    let mut w = z;
    let mut sign = 1.0;
    if w.norm_sqr() > 1.0 {
        w = w.inv();
        sign = -sign;
    }
    if w.re > 0.5 {
        w = c(1.0, 0.0) - w;
        sign = -sign;
    }
    if w.norm() == 0.0 {
        return 0.0;
    }
    let li = li2_reduced(w);
    let d = li.im + (c(1.0, 0.0) - w).arg() * w.norm().ln();
    sign * d
}

/// Bloch-Wigner dilogarithm on `CP^1`; vanishes at infinity.
pub fn bloch_wigner_projective(p: &ProjectivePoint) -> f64 {
    match p.to_complex() {
        Some(z) => bloch_wigner(z),
        None => 0.0,
    }
}

/// Volume of the positively oriented regular ideal tetrahedron, `D(e^{i pi/3})`.
pub fn nu3() -> f64 {
    static NU3: OnceLock<f64> = OnceLock::new();
    *NU3.get_or_init(|| bloch_wigner(C64::from_polar(1.0, PI / 3.0)))
}

/// Ordered 4-tuple of ideal points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TetConfig(pub [ProjectivePoint; 4]);

impl TetConfig {
    pub fn new(points: [ProjectivePoint; 4]) -> Self {
        Self(points)
    }

    /// `(0, 1, e^{i pi/3}, inf)`.
    pub fn base() -> Self {
        Self::regular(true)
    }

    /// `(0, 1, e^{+-i pi/3}, inf)`.
    pub fn regular(positive: bool) -> Self {
        let s = if positive { 1.0 } else { -1.0 };
        Self([
            ProjectivePoint::zero(),
            ProjectivePoint::finite(c(1.0, 0.0)),
            ProjectivePoint::finite(C64::from_polar(1.0, s * PI / 3.0)),
            ProjectivePoint::infinity(),
        ])
    }

    pub fn points(&self) -> &[ProjectivePoint; 4] {
        &self.0
    }

    /// Reorder as `(t[perm[0]], ..., t[perm[3]])`.
    pub fn permuted(&self, perm: [usize; 4]) -> Self {
        Self(perm.map(|i| self.0[i]))
    }

    pub fn map(&self, f: impl Fn(&ProjectivePoint) -> ProjectivePoint) -> Self {
        Self([f(&self.0[0]), f(&self.0[1]), f(&self.0[2]), f(&self.0[3])])
    }
}

fn cross_ratio_vectors(v: [Vector2<C64>; 4]) -> ProjectivePoint {
    let num = det2(&v[3], &v[0]) * det2(&v[2], &v[1]);
    let den = det2(&v[3], &v[1]) * det2(&v[2], &v[0]);
    // Both vanish only when three points coincide; any of {0, 1, inf} then
    // gives a degenerate tetrahedron.
    ProjectivePoint::new(num, den).unwrap_or_else(|_| ProjectivePoint::finite(c(1.0, 0.0)))
}

/// Cross-ratio as a point of `CP^1`.
pub fn cross_ratio(t: &TetConfig) -> ProjectivePoint {
    cross_ratio_vectors(t.0.map(|p| p.vector()))
}

/// Signed volume of the ideal tetrahedron.
pub fn ideal_volume(t: &TetConfig) -> f64 {
    bloch_wigner_projective(&cross_ratio(t))
}

/// Class of four vectors spanning `C^m`, modulo `GL(m, C)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpannedClass {
    dim: usize,
    vectors: [CVec; 4],
    degenerate: bool,
}

impl SpannedClass {
    pub fn new(dim: usize, vectors: [CVec; 4]) -> Self {
        let degenerate = vectors.iter().any(|v| v.len() != dim);
        Self {
            dim,
            vectors,
            degenerate,
        }
    }

    pub fn degenerate(dim: usize) -> Self {
        Self {
            dim,
            vectors: std::array::from_fn(|_| CVec::zeros(dim)),
            degenerate: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[CVec; 4] {
        &self.vectors
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }
}

/// Volume extended to spanned classes: zero unless `m = 2` and all four
/// vectors are nonzero, otherwise the volume of their projectivizations.
pub fn class_volume(cls: &SpannedClass) -> f64 {
    if cls.dim != 2 || cls.degenerate {
        return 0.0;
    }
    let norms = cls.vectors.each_ref().map(|v| v.norm());
    let longest = norms.iter().cloned().fold(0.0, f64::max);
    if !(longest > 0.0) || norms.iter().any(|&n| n <= ZERO_VECTOR_TOL * longest) {
        return 0.0;
    }
    let v = cls.vectors.each_ref().map(|v| Vector2::new(v[0], v[1]));
    bloch_wigner_projective(&cross_ratio_vectors(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::random_point;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const NU3: f64 = 1.0149416064096536;
    #[allow(clippy::excessive_precision)]
    const CATALAN: f64 = 0.9159655941772190;

    fn omega() -> C64 {
        C64::from_polar(1.0, PI / 3.0)
    }

    #[test]
    fn bernoulli_table() {
        let b = bernoulli_over_factorial();
        assert_eq!(b[0], 1.0);
        assert!((b[1] + 0.5).abs() < 1e-16);
        assert!((b[2] - 1.0 / 12.0).abs() < 1e-16);
        assert!((b[4] + 1.0 / 720.0).abs() < 1e-17);
        assert_eq!(b[3], 0.0);
    }

    #[test]
    fn real_axis_and_special_points() {
        assert_eq!(bloch_wigner(c(0.5, 0.0)), 0.0);
        assert_eq!(bloch_wigner(c(0.0, 0.0)), 0.0);
        assert_eq!(bloch_wigner(c(1.0, 0.0)), 0.0);
        assert_eq!(bloch_wigner_projective(&ProjectivePoint::infinity()), 0.0);
        assert!(bloch_wigner(c(1e-300, 1e-300)).abs() < 1e-290);
    }

    #[test]
    fn catalan_and_nu3() {
        assert!((bloch_wigner(c(0.0, 1.0)) - CATALAN).abs() < 1e-15);
        assert!((nu3() - NU3).abs() < 1e-15);
        assert_eq!(nu3(), bloch_wigner(omega()));
    }

    #[test]
    fn small_argument_matches_power_series() {
        let z = c(0.2, -0.3);
        let mut li = c(0.0, 0.0);
        let mut p = z;
        for k in 1..200 {
            li += p / (k * k) as f64;
            p *= z;
        }
        let d = li.im + (c(1.0, 0.0) - z).arg() * z.norm().ln();
        assert!((bloch_wigner(z) - d).abs() < 1e-15);
    }

    #[test]
    fn cross_ratio_examples() {
        let cr = cross_ratio(&TetConfig::base());
        assert!((cr.to_complex().unwrap() - omega()).norm() < 1e-15);
        let t = TetConfig([
            ProjectivePoint::zero(),
            ProjectivePoint::zero(),
            ProjectivePoint::finite(c(1.0, 0.0)),
            ProjectivePoint::infinity(),
        ]);
        assert!((cross_ratio(&t).to_complex().unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(ideal_volume(&t), 0.0);
    }

    #[test]
    fn base_volumes() {
        assert!((ideal_volume(&TetConfig::base()) - NU3).abs() < 1e-15);
        assert!((ideal_volume(&TetConfig::regular(false)) + NU3).abs() < 1e-15);
    }

    #[test]
    fn class_volume_cases() {
        let v = |a: C64, b: C64| CVec::from_vec(vec![a, b]);
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let cls = SpannedClass::new(1, std::array::from_fn(|_| CVec::from_vec(vec![one])));
        assert_eq!(class_volume(&cls), 0.0);
        let cls = SpannedClass::new(2, [v(one, zero), v(zero, zero), v(one, one), v(zero, one)]);
        assert_eq!(class_volume(&cls), 0.0);
        let cls = SpannedClass::new(2, [v(zero, one), v(one, one), v(omega(), one), v(one, zero)]);
        assert!((class_volume(&cls) - NU3).abs() < 1e-15);
        assert_eq!(class_volume(&SpannedClass::degenerate(2)), 0.0);
    }

    #[test]
    fn maximum_at_regular_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let p = random_point(&mut rng);
            if p.chordal_distance(&ProjectivePoint::finite(omega())) > 1e-6 {
                assert!(bloch_wigner_projective(&p) < nu3());
            }
        }
    }
}
