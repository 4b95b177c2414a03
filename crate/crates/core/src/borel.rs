//! The Borel cocycle on 4-tuples of complete flags.
//!
//! For decorated flags `(F_i, v_i)` and a multi-index `J in {0..n-1}^4`, the
//! quotient
//!
//! ```text
//! Q(F, J) = [ <F_0^{j0+1}, ..., F_3^{j3+1}> / <F_0^{j0}, ..., F_3^{j3}> ;
//!             (v_0^{j0+1}, ..., v_3^{j3+1}) ]
//! ```
//!
//! is a class of four vectors in a space of dimension `m`, and
//! `B_n = sum_J class_volume(Q(F, J))`. Only classes with `m = 2` contribute.
//! Changing a decoration `v^{j+1}` by an element of `F^j` does not move its
//! image in the quotient, so the sum does not depend on the decorations.

use crate::error::{Error, Result};
use crate::geom::{AffineFlag, Flag};
use crate::hypvol::{class_volume, nu3, SpannedClass};
use crate::linalg::{self, CMat, CVec};

/// Seed used to decorate flags when the caller does not choose one.
pub const DEFAULT_DECORATION_SEED: u64 = 0x5eed_f1a9;

/// Ordered tuple of flags of a common `C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlagConfig {
    flags: Vec<Flag>,
}

impl FlagConfig {
    pub fn new(flags: Vec<Flag>) -> Result<Self> {
        let n = flags.first().map(Flag::dim).unwrap_or(0);
        for f in &flags {
            if f.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: f.dim(),
                });
            }
        }
        Ok(Self { flags })
    }

    pub fn flags(&self) -> &[Flag] {
        &self.flags
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.flags.first().map(Flag::dim).unwrap_or(0)
    }

    /// Reorder as `(F[perm[0]], F[perm[1]], ...)`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            flags: perm.iter().map(|&i| self.flags[i].clone()).collect(),
        }
    }

    /// Apply `g` to every flag.
    pub fn transform(&self, g: &CMat) -> Result<Self> {
        let flags = self
            .flags
            .iter()
            .map(|f| f.transform(g))
            .collect::<Result<_>>()?;
        Ok(Self { flags })
    }

    pub fn conjugate(&self) -> Self {
        Self {
            flags: self.flags.iter().map(Flag::conjugate).collect(),
        }
    }

    /// The tuple with the `i`-th flag removed.
    pub fn omit(&self, i: usize) -> Self {
        let mut flags = self.flags.clone();
        flags.remove(i);
        Self { flags }
    }

    pub fn expect_len(&self, k: usize) -> Result<()> {
        if self.flags.len() != k {
            return Err(Error::WrongArity {
                expected: k,
                actual: self.flags.len(),
            });
        }
        Ok(())
    }

    /// Decorate every flag; seeds are derived from `seed` and the position.
    pub fn decorate(&self, seed: u64) -> Vec<AffineFlag> {
        self.flags
            .iter()
            .enumerate()
            .map(|(i, f)| f.decorate(derive_seed(seed, i as u64)))
            .collect()
    }
}

impl From<[Flag; 4]> for FlagConfig {
    fn from(flags: [Flag; 4]) -> Self {
        Self::new(flags.to_vec()).expect("caller supplies equal dimensions")
    }
}

/// SplitMix64 step, used to derive per-task seeds from a global seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(index.wrapping_mul(0xbf58_476d_1ce4_e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `J = (j0, j1, j2, j3)` with entries in `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub [usize; 4]);

impl MultiIndex {
    /// All multi-indices for `C^n` in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = MultiIndex> {
        (0..n.pow(4)).map(move |k| {
            MultiIndex([k / (n * n * n), (k / (n * n)) % n, (k / n) % n, k % n])
        })
    }
}

/// Compensated (Kahan-Babuska) accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

fn check_four(flags: &[AffineFlag]) -> Result<usize> {
    if flags.len() != 4 {
        return Err(Error::WrongArity {
            expected: 4,
            actual: flags.len(),
        });
    }
    let n = flags[0].dim();
    for f in flags {
        if f.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: f.dim(),
            });
        }
    }
    Ok(n)
}

fn stacked_levels(bases: &[&CMat; 4], levels: [usize; 4], n: usize) -> CMat {
    let blocks: Vec<CMat> = (0..4)
        .map(|i| bases[i].columns(0, levels[i]).into_owned())
        .collect();
    linalg::hstack(&blocks, n)
}

/// Dimensions of `W_num` and `W_den` for `J`, without building the class.
fn quotient_dims(bases: &[&CMat; 4], j: MultiIndex, n: usize) -> Result<(usize, usize)> {
    let den = stacked_levels(bases, j.0, n);
    let num = stacked_levels(bases, j.0.map(|x| x + 1), n);
    Ok((linalg::rank(&num)?, linalg::rank(&den)?))
}

fn build_class(flags: &[AffineFlag], bases: &[&CMat; 4], j: MultiIndex, n: usize) -> Result<SpannedClass> {
    let den = linalg::orthonormal_span(&stacked_levels(bases, j.0, n))?;
    let num = linalg::orthonormal_span(&stacked_levels(bases, j.0.map(|x| x + 1), n))?;
    let m = num.ncols().saturating_sub(den.ncols());
    if m == 0 {
        return Ok(SpannedClass::new(0, std::array::from_fn(|_| CVec::zeros(0))));
    }
    // Orthonormal basis of W_num minus its W_den component.
    let complement = if den.ncols() == 0 {
        num
    } else {
        let projected = &num - &den * (den.adjoint() * &num);
        let q = linalg::orthonormal_span(&projected)?;
        if q.ncols() != m {
            // W_den is not contained in W_num numerically.
            return Err(Error::IllConditioned { ratio: f64::NAN });
        }
        q
    };
    let vectors: [CVec; 4] =
        std::array::from_fn(|i| complement.adjoint() * flags[i].decoration(j.0[i] + 1));
    Ok(SpannedClass::new(m, vectors))
}

/// The class `Q(F, J)` realized by orthogonal projection onto
/// `W_num ∩ W_den^⊥` in an orthonormal basis.
pub fn quotient_class(flags: &[AffineFlag], j: MultiIndex) -> Result<SpannedClass> {
    let n = check_four(flags)?;
    if j.0.iter().any(|&x| x >= n) {
        return Err(Error::InvalidArgument(format!(
            "multi-index {:?} out of range for n = {n}",
            j.0
        )));
    }
    let bases = [0, 1, 2, 3].map(|i| flags[i].flag().unitary_basis());
    build_class(flags, &bases, j, n)
}

/// `B_n` of decorated flags.
pub fn borel_cocycle_affine(flags: &[AffineFlag]) -> Result<f64> {
    let n = check_four(flags)?;
    let bases = [0, 1, 2, 3].map(|i| flags[i].flag().unitary_basis());
    let mut acc = KahanSum::default();
    for j in MultiIndex::all(n) {
        let (num, den) = quotient_dims(&bases, j, n)?;
        if num != den + 2 {
            continue;
        }
        acc.add(class_volume(&build_class(flags, &bases, j, n)?));
    }
    Ok(acc.value())
}

/// `B_n` of four flags with decorations drawn from `seed`.
pub fn borel_cocycle_seeded(config: &FlagConfig, seed: u64) -> Result<f64> {
    config.expect_len(4)?;
    borel_cocycle_affine(&config.decorate(seed))
}

/// `B_n` of four flags.
pub fn borel_cocycle(config: &FlagConfig) -> Result<f64> {
    borel_cocycle_seeded(config, DEFAULT_DECORATION_SEED)
}

/// `sum_i (-1)^i B_n(F_0, ..., F_i omitted, ..., F_4)`.
pub fn borel_coboundary(config: &FlagConfig) -> Result<f64> {
    config.expect_len(5)?;
    let mut acc = KahanSum::default();
    for i in 0..5 {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        acc.add(sign * borel_cocycle(&config.omit(i))?);
    }
    Ok(acc.value())
}

/// `C(n, k)` in exact integer arithmetic.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// `C(n+1, 3)`, the multiple of `nu3` bounding `|B_n|`.
pub fn borel_multiplier(n: usize) -> u128 {
    binomial(n as u64 + 1, 3)
}

/// `C(n+1, 3) nu3`.
pub fn borel_bound(n: usize) -> f64 {
    borel_multiplier(n) as f64 * nu3()
}

/// Join of decorated flags of `C^{n1}` and `C^{n2}` inside
/// `C^{n1} ⊕ C^{n2}`: `H^l = F^l` for `l <= n1`, `H^l = F^{n1} ⊕ G^{l-n1}`
/// afterwards, decorations concatenated.
pub fn block_join(f: &AffineFlag, g: &AffineFlag) -> AffineFlag {
    let (n1, n2) = (f.dim(), g.dim());
    let n = n1 + n2;
    let mut cols = CMat::zeros(n, n);
    cols.view_mut((0, 0), (n1, n1)).copy_from(f.flag().columns());
    cols.view_mut((n1, n1), (n2, n2)).copy_from(g.flag().columns());
    let mut dec = CMat::zeros(n, n);
    dec.view_mut((0, 0), (n1, n1)).copy_from(f.decorations());
    dec.view_mut((n1, n1), (n2, n2)).copy_from(g.decorations());
    let flag = Flag::from_columns(cols).expect("block diagonal of nonsingular blocks");
    AffineFlag::new(flag, dec).expect("joined decorations satisfy the flag condition")
}

/// Result of comparing the norm of a block-diagonal restriction with `B_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionBound {
    /// `sum_i C(n_i + 1, 3)`.
    pub parts_multiplier: u128,
    /// `C(n + 1, 3)`.
    pub full_multiplier: u128,
    pub parts_value: f64,
    pub full_value: f64,
    /// The comparison is strict (holds for every partition with `r >= 2`).
    pub strict: bool,
}

pub fn partition_bound(n: usize, partition: &[usize]) -> Result<PartitionBound> {
    if partition.iter().sum::<usize>() != n || partition.contains(&0) {
        return Err(Error::InvalidPartition {
            n,
            parts: partition.to_vec(),
        });
    }
    let parts_multiplier: u128 = partition.iter().map(|&p| borel_multiplier(p)).sum();
    let full_multiplier = borel_multiplier(n);
    Ok(PartitionBound {
        parts_multiplier,
        full_multiplier,
        parts_value: parts_multiplier as f64 * nu3(),
        full_value: full_multiplier as f64 * nu3(),
        strict: parts_multiplier < full_multiplier,
    })
}

/// All partitions of `n` into positive parts, in non-increasing order,
/// starting with `(n)`.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, n, &mut Vec::new(), &mut out);
    }
    out
}
