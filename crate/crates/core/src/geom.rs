//! Points of the complex projective line, subspaces, complete flags and
//! decorated (affine) flags of `C^n`.
//!
//! Flags are stored by an adapted basis: an `n x n` matrix whose first `i`
//! columns span the `i`-dimensional member. The matrix the caller supplied is
//! kept verbatim next to a unitary adapted basis derived from it, so the same
//! input always produces bit-identical downstream results.

use nalgebra::Vector2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec, C64, TAU_EQ, TAU_RANK};

/// A point `[x : y]` of `CP^1`; the point at infinity is `[1 : 0]` and a
/// finite `z` is `[z : 1]`.
///
/// The stored representative has unit norm and its first nonzero coordinate
/// real positive, so equal points carry (numerically) equal coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectivePoint {
    x: C64,
    y: C64,
}

impl ProjectivePoint {
    pub fn new(x: C64, y: C64) -> Result<Self> {
        let norm = (x.norm_sqr() + y.norm_sqr()).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroPoint);
        }
        let (x, y) = (x / norm, y / norm);
        let lead = if x.norm() > 0.0 { x } else { y };
        let phase = lead.conj() / lead.norm();
        Ok(Self {
            x: x * phase,
            y: y * phase,
        })
    }

    pub fn finite(z: C64) -> Self {
        Self::new(z, c(1.0, 0.0)).expect("[z:1] is never zero")
    }

    pub fn infinity() -> Self {
        Self {
            x: c(1.0, 0.0),
            y: c(0.0, 0.0),
        }
    }

    pub fn zero() -> Self {
        Self::finite(c(0.0, 0.0))
    }

    pub fn x(&self) -> C64 {
        self.x
    }

    pub fn y(&self) -> C64 {
        self.y
    }

    pub fn vector(&self) -> Vector2<C64> {
        Vector2::new(self.x, self.y)
    }

    pub fn is_infinity(&self) -> bool {
        self.y.norm() <= 1e-300
    }

    /// Affine coordinate `x / y`, `None` at infinity.
    pub fn to_complex(&self) -> Option<C64> {
        if self.is_infinity() {
            None
        } else {
            Some(self.x / self.y)
        }
    }

    /// `|x1 y2 - x2 y1|` of the unit representatives: half the chordal
    /// distance on the unit Riemann sphere.
    pub fn chordal_distance(&self, other: &Self) -> f64 {
        det2(&self.vector(), &other.vector()).norm()
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.chordal_distance(other) < tol
    }

    /// Image on the unit sphere in `R^3` (infinity is the north pole).
    pub fn sphere_coords(&self) -> [f64; 3] {
        let xy = self.x * self.y.conj();
        [
            2.0 * xy.re,
            2.0 * xy.im,
            self.x.norm_sqr() - self.y.norm_sqr(),
        ]
    }

    pub fn conj(&self) -> Self {
        Self::new(self.x.conj(), self.y.conj()).expect("nonzero")
    }
}

/// `a.x * b.y - b.x * a.y`.
pub fn det2(a: &Vector2<C64>, b: &Vector2<C64>) -> C64 {
    a[0] * b[1] - b[0] * a[1]
}

/// Linear subspace of `C^n` with an orthonormal basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    basis: CMat,
}

impl Subspace {
    /// Span of the columns of `m`, which must have full column rank.
    pub fn from_columns(m: &CMat) -> Result<Self> {
        let basis = linalg::orthonormal_span(m)?;
        if basis.ncols() != m.ncols() {
            return Err(Error::DegenerateFlag(format!(
                "{} columns span only dimension {}",
                m.ncols(),
                basis.ncols()
            )));
        }
        Ok(Self { basis })
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    pub fn projector(&self) -> CMat {
        &self.basis * self.basis.adjoint()
    }

    /// Operator-norm distance between the orthogonal projectors.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                actual: other.ambient_dim(),
            });
        }
        if self.dim() != other.dim() {
            return Ok(1.0);
        }
        Ok(linalg::subspace_gap(&self.basis, &other.basis))
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        matches!(self.distance(other), Ok(d) if d < TAU_EQ)
    }

    pub fn contains(&self, v: &CVec) -> bool {
        let norm = v.norm();
        if norm == 0.0 {
            return true;
        }
        let residual = v - &self.basis * (self.basis.adjoint() * v);
        residual.norm() <= TAU_RANK * norm
    }
}

/// A complete flag of `C^n`.
#[derive(Debug, Clone)]
pub struct Flag {
    columns: CMat,
    basis: CMat,
}

impl PartialEq for Flag {
    fn eq(&self, other: &Self) -> bool {
        self.columns == other.columns
    }
}

impl Flag {
    /// Flag whose `i`-th member is spanned by the first `i` columns of `m`.
    pub fn from_columns(m: CMat) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: m.ncols(),
            });
        }
        if n == 0 {
            return Err(Error::DegenerateFlag("empty matrix".into()));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::DegenerateFlag("non-finite entry".into()));
        }
        let sv = linalg::singular_values(&m);
        let max = sv.iter().cloned().fold(0.0, f64::max);
        let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(max > 0.0) || min / max < TAU_RANK {
            return Err(Error::DegenerateFlag(format!(
                "adapted basis is numerically singular (ratio {:e})",
                min / max
            )));
        }
        let basis = m.clone().qr().q();
        Ok(Self { columns: m, basis })
    }

    /// The standard flag `span(e_1, ..., e_i)`.
    pub fn standard(n: usize) -> Self {
        Self::from_columns(CMat::identity(n, n)).expect("identity is nonsingular")
    }

    /// The opposite flag `span(e_n, ..., e_{n-i+1})`.
    pub fn reversed(n: usize) -> Self {
        let m = CMat::from_fn(n, n, |i, j| if i + j + 1 == n { c(1.0, 0.0) } else { c(0.0, 0.0) });
        Self::from_columns(m).expect("permutation is nonsingular")
    }

    pub fn dim(&self) -> usize {
        self.columns.nrows()
    }

    /// The matrix this flag was constructed from.
    pub fn columns(&self) -> &CMat {
        &self.columns
    }

    /// Unitary adapted basis.
    pub fn unitary_basis(&self) -> &CMat {
        &self.basis
    }

    /// Orthonormal basis of the `i`-dimensional member, `0 <= i <= n`.
    pub fn level_basis(&self, i: usize) -> CMat {
        self.basis.columns(0, i).into_owned()
    }

    pub fn level(&self, i: usize) -> Subspace {
        Subspace {
            basis: self.level_basis(i),
        }
    }

    /// `g F`.
    pub fn transform(&self, g: &CMat) -> Result<Self> {
        if g.nrows() != self.dim() || g.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: g.nrows(),
            });
        }
        Self::from_columns(g * &self.columns)
    }

    /// Entrywise complex conjugate flag.
    pub fn conjugate(&self) -> Self {
        Self::from_columns(self.columns.map(|z| z.conj())).expect("conjugation keeps rank")
    }

    /// Seeded decoration `v^i = a_i b_i + sum_{j<i} c_j b_j` over the unitary
    /// adapted basis `b`, with `|a_i|` bounded away from zero.
    pub fn decorate(&self, seed: u64) -> AffineFlag {
        let n = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v = CMat::zeros(n, n);
        for i in 0..n {
            let modulus: f64 = rng.random_range(0.5..2.0);
            let angle: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let mut col: CVec = self.basis.column(i) * C64::from_polar(modulus, angle);
            for j in 0..i {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                col += self.basis.column(j) * c(re, im);
            }
            v.set_column(i, &col);
        }
        AffineFlag {
            flag: self.clone(),
            decorations: v,
        }
    }
}

/// Maximum over levels `1..n-1` of the projector gap between `F^i` and `G^i`.
pub fn flag_distance(f: &Flag, g: &Flag) -> Result<f64> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            actual: g.dim(),
        });
    }
    let n = f.dim();
    let mut worst = 0.0_f64;
    for i in 1..n {
        let a = f.basis.columns(0, i).into_owned();
        let b = g.basis.columns(0, i).into_owned();
        worst = worst.max(linalg::subspace_gap(&a, &b));
    }
    Ok(worst)
}

/// A complete flag with decoration vectors `v^1..v^n`, `F^i = C v^i + F^{i-1}`.
#[derive(Debug, Clone)]
pub struct AffineFlag {
    flag: Flag,
    decorations: CMat,
}

impl AffineFlag {
    /// Validates that each `v^i` lies in `F^i` but not in `F^{i-1}`.
    pub fn new(flag: Flag, decorations: CMat) -> Result<Self> {
        let n = flag.dim();
        if decorations.nrows() != n || decorations.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: decorations.nrows(),
            });
        }
        let out = Self { flag, decorations };
        if let Some(step) = out.first_invalid_step() {
            return Err(Error::InvalidDecoration { step });
        }
        Ok(out)
    }

    /// First step `i` (1-based) violating the decoration invariant, if any.
    pub fn first_invalid_step(&self) -> Option<usize> {
        let n = self.flag.dim();
        for i in 1..=n {
            let v = self.decorations.column(i - 1).into_owned();
            let norm = v.norm();
            if norm == 0.0 {
                return Some(i);
            }
            let b = &self.flag.basis;
            let coeffs = b.adjoint() * &v;
            let outside_fi: f64 = coeffs.rows(i, n - i).norm();
            let off_prev: f64 = coeffs.rows(i - 1, n - i + 1).norm();
            if outside_fi > TAU_RANK * norm || off_prev <= TAU_RANK * norm {
                return Some(i);
            }
        }
        None
    }

    pub fn flag(&self) -> &Flag {
        &self.flag
    }

    pub fn into_flag(self) -> Flag {
        self.flag
    }

    pub fn dim(&self) -> usize {
        self.flag.dim()
    }

    /// `v^i`, 1-based.
    pub fn decoration(&self, i: usize) -> CVec {
        self.decorations.column(i - 1).into_owned()
    }

    pub fn decorations(&self) -> &CMat {
        &self.decorations
    }
}

/// All flags share a dimension and, for every selection `j_i` with
/// `sum j_i <= n`, the members `F_i^{j_i}` span a space of dimension `sum j_i`.
pub fn general_position(flags: &[Flag]) -> Result<bool> {
    let Some(first) = flags.first() else {
        return Ok(true);
    };
    let n = first.dim();
    for f in flags {
        if f.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: f.dim(),
            });
        }
    }
    let count = flags.len();
    let mut sel = vec![0usize; count];
    loop {
        let total: usize = sel.iter().sum();
        let nonzero = sel.iter().filter(|&&j| j > 0).count();
        if total <= n && nonzero >= 2 {
            let blocks: Vec<CMat> = sel
                .iter()
                .zip(flags)
                .map(|(&j, f)| f.level_basis(j))
                .collect();
            let stacked = linalg::hstack(&blocks, n);
            let sv = linalg::singular_values(&stacked);
            let max = sv.iter().cloned().fold(0.0, f64::max);
            let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
            if min < TAU_RANK * max {
                return Ok(false);
            }
        }
        // odometer over {0..n}^count
        let mut pos = 0;
        loop {
            if pos == count {
                return Ok(true);
            }
            sel[pos] += 1;
            if sel[pos] <= n {
                break;
            }
            sel[pos] = 0;
            pos += 1;
        }
    }
}

/// Random complex Gaussian matrix.
pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Flag spanned by the columns of a random complex Gaussian matrix.
pub fn random_flag<R: Rng>(rng: &mut R, n: usize) -> Flag {
    loop {
        if let Ok(f) = Flag::from_columns(random_matrix(rng, n, n)) {
            return f;
        }
    }
}

/// Random point of `CP^1`, uniform on the Riemann sphere.
pub fn random_point<R: Rng>(rng: &mut R) -> ProjectivePoint {
    loop {
        let x = c(rng.sample(StandardNormal), rng.sample(StandardNormal));
        let y = c(rng.sample(StandardNormal), rng.sample(StandardNormal));
        if let Ok(p) = ProjectivePoint::new(x, y) {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn point_normalization_is_scale_invariant() {
        let p = ProjectivePoint::new(c(1.0, 2.0), c(-0.5, 0.25)).unwrap();
        let lambda = c(-3.0, 0.7);
        let q = ProjectivePoint::new(c(1.0, 2.0) * lambda, c(-0.5, 0.25) * lambda).unwrap();
        assert!((p.x() - q.x()).norm() < 1e-15 && (p.y() - q.y()).norm() < 1e-15);
        assert!(p.x().im.abs() < 1e-16 && p.x().re > 0.0);
        assert!(ProjectivePoint::new(c(0.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn infinity_and_zero() {
        let inf = ProjectivePoint::new(c(0.0, 3.0), c(0.0, 0.0)).unwrap();
        assert_eq!(inf, ProjectivePoint::infinity());
        assert!(inf.to_complex().is_none());
        assert_eq!(ProjectivePoint::zero().to_complex(), Some(c(0.0, 0.0)));
        assert!((inf.sphere_coords()[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn flag_distance_identity_and_rescaling() {
        let f = Flag::standard(4);
        assert_eq!(flag_distance(&f, &f).unwrap(), 0.0);
        let d = CMat::from_diagonal(&CVec::from_vec(vec![c(2.0, 1.0), c(-0.3, 0.0), c(0.0, 5.0), c(1.5, -1.5)]));
        let g = Flag::from_columns(d).unwrap();
        assert!(flag_distance(&f, &g).unwrap() < 1e-15);
    }

    #[test]
    fn flag_distance_quarter_turn() {
        let f = Flag::standard(2);
        let g = Flag::from_columns(CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)])).unwrap();
        let d = flag_distance(&f, &g).unwrap();
        assert!((d - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15, "{d}");
    }

    #[test]
    fn flag_distance_dimension_mismatch() {
        assert!(matches!(
            flag_distance(&Flag::standard(2), &Flag::standard(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn singular_columns_rejected() {
        let m = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        assert!(matches!(Flag::from_columns(m), Err(Error::DegenerateFlag(_))));
    }

    #[test]
    fn decoration_of_standard_flag() {
        let f = Flag::standard(4);
        let a = f.decorate(7);
        assert!(a.first_invalid_step().is_none());
        for i in 1..=4 {
            let v = a.decoration(i);
            for k in i..4 {
                assert!(v[k].norm() < 1e-15);
            }
            assert!(v[i - 1].norm() > 0.4);
        }
        assert_eq!(flag_distance(a.flag(), &f).unwrap(), 0.0);
        assert_eq!(a.clone().into_flag(), f);
    }

    #[test]
    fn decoration_is_deterministic() {
        let f = random_flag(&mut rng(3), 5);
        assert_eq!(f.decorate(11).decorations(), f.decorate(11).decorations());
        assert_ne!(f.decorate(11).decorations(), f.decorate(12).decorations());
    }

    #[test]
    fn decorations_of_random_flags_are_valid() {
        let mut r = rng(99);
        for trial in 0..1000 {
            let n = 1 + trial % 8;
            let f = random_flag(&mut r, n);
            let a = f.decorate(trial as u64);
            assert!(a.first_invalid_step().is_none(), "trial {trial}");
        }
    }

    #[test]
    fn invalid_decoration_rejected() {
        let f = Flag::standard(2);
        // v^1 = e_2 is not in F^1.
        let v = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(AffineFlag::new(f.clone(), v), Err(Error::InvalidDecoration { step: 1 })));
        // v^2 = e_1 lies in F^1.
        let v = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(AffineFlag::new(f, v), Err(Error::InvalidDecoration { step: 2 })));
    }

    #[test]
    fn general_position_basic() {
        assert!(general_position(&[Flag::standard(3), Flag::reversed(3)]).unwrap());
        assert!(!general_position(&[Flag::standard(3), Flag::standard(3)]).unwrap());
    }

    #[test]
    fn subspace_contains_and_distance() {
        let s = Subspace::from_columns(&CMat::from_row_slice(3, 1, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])).unwrap();
        assert!(s.contains(&CVec::from_vec(vec![c(0.0, 2.0), c(0.0, 2.0), c(0.0, 0.0)])));
        assert!(!s.contains(&CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])));
        let t = Flag::standard(3).level(1);
        assert!((s.distance(&t).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(s.approx_eq(&s.clone()));
    }
}
