//! The reflection group of the regular ideal tetrahedron `(0, 1, w, inf)`,
//! `w = e^{i pi/3}`, its orbit of tetrahedra, and the dilation elements that
//! enlarge it to a dense group.

use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::ProjectivePoint;
use crate::hypvol::TetConfig;
use crate::linalg::{c, C64};
use crate::moebius::{scaling, ExtendedMoebius, Mat2};

/// Reflections in the faces of the base tetrahedron, in the order
/// `(0,1,inf)`, `(0,w,inf)`, `(1,w,inf)`, `(0,1,w)`.
pub fn base_reflections() -> [ExtendedMoebius; 4] {
    let zero = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    // z -> conj(z)
    let r1 = ExtendedMoebius::antiholomorphic(Mat2::identity()).expect("unimodular");
    // z -> e^{2 i pi/3} conj(z)
    let r2 = ExtendedMoebius::antiholomorphic(Mat2::new(
        C64::from_polar(1.0, 2.0 * PI / 3.0),
        zero,
        zero,
        one,
    ))
    .expect("invertible");
    // z -> 1 + e^{4 i pi/3} (conj(z) - 1)
    let rot = C64::from_polar(1.0, 4.0 * PI / 3.0);
    let r3 = ExtendedMoebius::antiholomorphic(Mat2::new(rot, one - rot, zero, one))
        .expect("invertible");
    // Inversion in the circle |z - center|^2 = 1/3 through 0, 1, w.
    let center = c(0.5, 3f64.sqrt() / 6.0);
    let r4 = ExtendedMoebius::antiholomorphic(Mat2::new(
        center,
        c(1.0 / 3.0, 0.0) - center * center.conj(),
        one,
        -center.conj(),
    ))
    .expect("invertible");
    [r1, r2, r3, r4]
}

/// Indices of the three vertices of the base tetrahedron fixed by each
/// reflection of [`base_reflections`].
pub const REFLECTION_FACES: [[usize; 3]; 4] = [[0, 1, 3], [0, 2, 3], [1, 2, 3], [0, 1, 2]];

/// `g^{-1} mu_2 g` with `mu_2(z) = 2z` and `g` the Moebius map sending
/// `(xi_0, xi_1, p)` to `(inf, 0, 1)`, where `p` is the first of `xi_2, xi_3`
/// distinct from `xi_0, xi_1`.
pub fn dilation_element(t: &TetConfig) -> Result<ExtendedMoebius> {
    let [x0, x1, x2, x3] = t.points();
    if x0.chordal_distance(x1) < 1e-12 {
        return Err(Error::CoincidentPoints);
    }
    let far = |p: &ProjectivePoint| p.chordal_distance(x0) > 1e-12 && p.chordal_distance(x1) > 1e-12;
    let third = if far(x2) {
        *x2
    } else if far(x3) {
        *x3
    } else {
        // Any auxiliary point off the axis gives a map in the same family.
        [ProjectivePoint::zero(), ProjectivePoint::finite(c(1.0, 0.0)), ProjectivePoint::infinity()]
            .into_iter()
            .find(|p| far(p))
            .expect("three points cannot all lie in a two-point set")
    };
    // (x1, third, x0) -> (0, 1, inf)
    let g = ExtendedMoebius::to_zero_one_infinity(x1, &third, x0)?;
    Ok(g.inverse() * scaling(c(2.0, 0.0)) * g)
}

/// Word in a fixed generator list together with its product.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupWord {
    letters: Vec<usize>,
    element: ExtendedMoebius,
}

impl GroupWord {
    pub fn identity() -> Self {
        Self {
            letters: Vec::new(),
            element: ExtendedMoebius::identity(),
        }
    }

    /// Product `s_{l0} s_{l1} ... s_{lk}`.
    pub fn from_letters(letters: &[usize], generators: &[ExtendedMoebius]) -> Self {
        let mut w = Self::identity();
        for &l in letters {
            w = w.extend(l, generators);
        }
        w
    }

    /// `self * generators[letter]`.
    pub fn extend(&self, letter: usize, generators: &[ExtendedMoebius]) -> Self {
        let mut letters = self.letters.clone();
        letters.push(letter);
        Self {
            letters,
            element: self.element * generators[letter],
        }
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn element(&self) -> &ExtendedMoebius {
        &self.element
    }
}

impl std::fmt::Display for GroupWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self.letters.iter().map(|l| format!("s{l}")).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// A tetrahedron of an orbit with the word that reached it first.
#[derive(Debug, Clone)]
pub struct OrbitCell {
    pub word: GroupWord,
    pub tet: TetConfig,
}

impl OrbitCell {
    /// `+1` for orientation-preserving words, `-1` otherwise.
    pub fn sign(&self) -> f64 {
        self.word.element().orientation().sign()
    }
}

/// Index assigning one id to each cluster of points within
/// [`POINT_TOL`] of each other (Euclidean distance on the unit sphere).
///
/// Points are bucketed in a grid of cell size `POINT_TOL` and matched against
/// the 27 surrounding cells, so rounding near a cell boundary cannot split a
/// point in two.
#[derive(Debug, Clone, Default)]
pub struct PointIndex {
    cells: HashMap<[i64; 3], Vec<usize>>,
    points: Vec<ProjectivePoint>,
}

/// Two points of the sphere closer than this are identified.
pub const POINT_TOL: f64 = 1e-9;

fn cell_of(p: &ProjectivePoint) -> [i64; 3] {
    p.sphere_coords().map(|x| (x / POINT_TOL).floor() as i64)
}

fn sphere_dist(a: &ProjectivePoint, b: &ProjectivePoint) -> f64 {
    let (u, v) = (a.sphere_coords(), b.sphere_coords());
    ((u[0] - v[0]).powi(2) + (u[1] - v[1]).powi(2) + (u[2] - v[2]).powi(2)).sqrt()
}

impl PointIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn find(&self, p: &ProjectivePoint) -> Option<usize> {
        let cell = cell_of(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let key = [cell[0] + dx, cell[1] + dy, cell[2] + dz];
                    if let Some(ids) = self.cells.get(&key) {
                        if let Some(&id) = ids
                            .iter()
                            .find(|&&id| sphere_dist(&self.points[id], p) < POINT_TOL)
                        {
                            return Some(id);
                        }
                    }
                }
            }
        }
        None
    }

    /// Id of `p`, registering it if new. The boolean is true for new points.
    pub fn insert(&mut self, p: &ProjectivePoint) -> (usize, bool) {
        if let Some(id) = self.find(p) {
            return (id, false);
        }
        let id = self.points.len();
        self.points.push(*p);
        self.cells.entry(cell_of(p)).or_default().push(id);
        (id, true)
    }

    pub fn get(&self, id: usize) -> &ProjectivePoint {
        &self.points[id]
    }

    pub fn points(&self) -> &[ProjectivePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn tet_key(index: &mut PointIndex, t: &TetConfig) -> [usize; 4] {
    let mut ids = t.points().map(|p| index.insert(&p).0);
    ids.sort_unstable();
    ids
}

/// Breadth-first enumeration of `w * base` over words of length `<= max_len`
/// in `generators`, keeping the first word reaching each vertex set.
pub fn enumerate_orbit_from(
    base: &TetConfig,
    max_len: usize,
    generators: &[ExtendedMoebius],
) -> Vec<OrbitCell> {
    let mut index = PointIndex::new();
    let mut seen: HashSet<[usize; 4]> = HashSet::new();
    let root = OrbitCell {
        word: GroupWord::identity(),
        tet: *base,
    };
    seen.insert(tet_key(&mut index, base));
    let mut out = vec![root.clone()];
    let mut frontier = vec![root];
    for _ in 0..max_len {
        let candidates: Vec<OrbitCell> = frontier
            .par_iter()
            .flat_map_iter(|cell| {
                (0..generators.len()).map(move |l| {
                    let word = cell.word.extend(l, generators);
                    let tet = word.element().apply_tet(base);
                    OrbitCell { word, tet }
                })
            })
            .collect();
        let mut next = Vec::new();
        for cell in candidates {
            if seen.insert(tet_key(&mut index, &cell.tet)) {
                next.push(cell);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Orbit of the base tetrahedron `(0, 1, w, inf)`.
pub fn enumerate_orbit(max_len: usize, generators: &[ExtendedMoebius]) -> Vec<OrbitCell> {
    enumerate_orbit_from(&TetConfig::base(), max_len, generators)
}

/// The four face reflections followed by the base dilation and its inverse.
pub fn delta_generators() -> Vec<ExtendedMoebius> {
    let mut g = base_reflections().to_vec();
    let d = dilation_element(&TetConfig::base()).expect("base vertices are distinct");
    g.push(d);
    g.push(d.inverse());
    g
}

/// Orientation-preserving products `r_i r_j`, `i < j`, of the face
/// reflections; they generate the rotation subgroup of the reflection group.
pub fn rotation_generators() -> Vec<GroupWord> {
    let r = base_reflections();
    let mut out = Vec::new();
    for i in 0..4 {
        for j in (i + 1)..4 {
            out.push(GroupWord::from_letters(&[i, j], &r));
        }
    }
    out
}
