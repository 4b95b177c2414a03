//! Reference computations that share no code with the library.
#![allow(dead_code)]

use std::f64::consts::PI;

use flagvol::geom::{Flag, ProjectivePoint};
use flagvol::linalg::{CMat, C64};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

/// `zeta(2k)` by direct summation with an Euler-Maclaurin tail.
pub fn zeta_even(k: u32) -> f64 {
    if k == 1 {
        return PI * PI / 6.0;
    }
    let s = 2 * k as i32;
    let n_terms = 2000u32;
    let mut sum = 0.0;
    for m in (1..=n_terms).rev() {
        sum += (m as f64).powi(-s);
    }
    let n = n_terms as f64;
    sum + n.powi(1 - s) / (s as f64 - 1.0) - 0.5 * n.powi(-s) + s as f64 / 12.0 * n.powi(-s - 1)
}

/// Clausen function `Cl_2(theta) = sum sin(k theta) / k^2` for
/// `0 < theta < 2 pi`, via its expansion in even zeta values.
pub fn clausen(theta: f64) -> f64 {
    if theta > PI {
        return -clausen(2.0 * PI - theta);
    }
    if theta == 0.0 {
        return 0.0;
    }
    let mut acc = theta - theta * theta.ln();
    let x = theta / (2.0 * PI);
    for k in 1..60u32 {
        let term = zeta_even(k) / (k as f64 * (2 * k + 1) as f64) * theta * x.powi(2 * k as i32);
        acc += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    acc
}

/// Lobachevsky function `L(theta) = Cl_2(2 theta) / 2`, extended by
/// periodicity and oddness.
pub fn lobachevsky(theta: f64) -> f64 {
    let t = theta.rem_euclid(PI);
    if t < 1e-15 || (PI - t) < 1e-15 {
        return 0.0;
    }
    0.5 * clausen(2.0 * t)
}

/// `Im Li_2(z) = -int_0^1 arg(1 - z t) / t dt` by composite Gauss-Legendre
/// quadrature; `z` must stay away from `[1, inf)`.
pub fn im_li2_quadrature(z: C64) -> f64 {
    // 5-point Gauss-Legendre on [-1, 1].
    const NODES: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const WEIGHTS: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let f = |t: f64| -> f64 {
        if t == 0.0 {
            return -z.im;
        }
        let w = C64::new(1.0, 0.0) - z * t;
        -w.arg() / t
    };
    let panels = 4000;
    let h = 1.0 / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        let mut s = 0.0;
        for (x, w) in NODES.iter().zip(WEIGHTS) {
            s += w * f(mid + 0.5 * h * x);
        }
        total += 0.5 * h * s;
    }
    total
}

/// Bloch-Wigner function from the quadrature above.
pub fn bloch_wigner_oracle(z: C64) -> f64 {
    im_li2_quadrature(z) + (C64::new(1.0, 0.0) - z).arg() * z.norm().ln()
}

/// Signed volume of the ideal tetrahedron with finite vertices `z`, from its
/// dihedral angles: the angles at the edges are the arguments of the three
/// shape parameters.
pub fn ideal_volume_from_angles(z: [C64; 4]) -> f64 {
    shape_volume((z[3] - z[0]) * (z[2] - z[1]) / ((z[3] - z[1]) * (z[2] - z[0])))
}

/// Volume for `(z0, z1, z2, inf)`.
pub fn ideal_volume_at_infinity(z: [C64; 3]) -> f64 {
    shape_volume((z[2] - z[1]) / (z[2] - z[0]))
}

fn shape_volume(shape: C64) -> f64 {
    let one = C64::new(1.0, 0.0);
    let sign = if shape.im >= 0.0 { 1.0 } else { -1.0 };
    let s = if shape.im >= 0.0 { shape } else { shape.conj() };
    let a = s.arg();
    let b = (one / (one - s)).arg();
    let c = (one - one / s).arg();
    sign * (lobachevsky(a) + lobachevsky(b) + lobachevsky(c))
}

pub fn random_complex<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// The flag `L ⊂ C^2` of a point, built from `(x, y)` and its orthogonal
/// complement.
pub fn point_flag(p: &ProjectivePoint) -> Flag {
    let (x, y) = (p.x(), p.y());
    Flag::from_columns(CMat::from_row_slice(2, 2, &[x, -y.conj(), y, x.conj()])).unwrap()
}

/// `exp(X)` for a random traceless `X` with entries of size `scale`.
pub fn random_sl<R: Rng>(rng: &mut R, n: usize, scale: f64) -> CMat {
    let mut x: CMat = DMatrix::from_fn(n, n, |_, _| random_complex(rng) * scale);
    let tr = x.trace() / C64::new(n as f64, 0.0);
    for i in 0..n {
        x[(i, i)] -= tr;
    }
    x.exp()
}
