//! Maximal flag configurations: detection, recovery of the normalizing
//! element, numerical maximization of `|B_n|`, and synthetic sequences of
//! representations with almost-equivariant boundary maps.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::borel::{borel_bound, borel_cocycle, derive_seed, FlagConfig};
use crate::error::{Error, Result};
use crate::geom::{flag_distance, Flag, ProjectivePoint};
use crate::hypvol::TetConfig;
use crate::linalg::{self, c, CMat, CVec, C64};
use crate::moebius::ExtendedMoebius;
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::tess::{
    base_reflections, dilation_element, enumerate_orbit, rotation_generators, GroupWord, PointIndex,
};
use crate::veronese::{act_on_flag, moebius_rep, veronese_flag, GroupElement};

/// Verification threshold is `VERIFY_CONSTANT * sqrt(tol)`.
pub const VERIFY_CONSTANT: f64 = 10.0;

/// Relative singular value below which two members are not transverse.
pub const TRANSVERSALITY_TOL: f64 = 1e-8;

/// Configurations with defect below this are treated as already maximal.
pub const MAXIMAL_TOL: f64 = 1e-8;

/// `C(n+1, 3) nu3 - |B_n(F)|`.
pub fn maximality_defect(config: &FlagConfig) -> Result<f64> {
    config.expect_len(4)?;
    let b = borel_cocycle(config)?;
    Ok(borel_bound(config.dim()) - b.abs())
}

/// Output of [`recover_normalizer`].
#[derive(Debug, Clone)]
pub struct Normalization {
    /// `g` with `g F_i` close to `V_n(t_i)`.
    pub g: GroupElement,
    pub tet: TetConfig,
    pub borel: f64,
    pub defect: f64,
    /// Largest `flag_distance(g F_i, V_n(t_i))`.
    pub residual: f64,
    pub threshold: f64,
}

/// Unit vector spanning the intersection of the column spans of `a` and `b`,
/// which must have complementary dimensions plus one.
fn intersection_line(a: &CMat, b: &CMat, level: usize) -> Result<CVec> {
    let n = a.nrows();
    let (p, q) = (a.ncols(), b.ncols());
    let mut m = CMat::zeros(n, p + q);
    m.view_mut((0, 0), (n, p)).copy_from(a);
    m.view_mut((0, p), (n, q)).copy_from(&(-b));
    let (v, _, second) = linalg::null_vector(&m);
    if second < TRANSVERSALITY_TOL {
        return Err(Error::DegenerateIntersection { level });
    }
    let line = a * v.rows(0, p);
    let norm = line.norm();
    if !(norm > 0.0) {
        return Err(Error::DegenerateIntersection { level });
    }
    Ok(line / C64::from(norm))
}

fn binomial_coefficients(d: usize) -> Vec<f64> {
    let mut row = vec![1.0; d + 1];
    for j in 1..d {
        row[j] = row[j - 1] * (d + 1 - j) as f64 / j as f64;
    }
    row
}

fn verify(g: &GroupElement, flags: &[Flag], tet: &TetConfig, threshold: f64) -> Result<f64> {
    let n = g.dim();
    let mut residual = 0.0f64;
    for (i, (f, p)) in flags.iter().zip(tet.points()).enumerate() {
        let d = flag_distance(&act_on_flag(g, f)?, &veronese_flag(p, n))?;
        if !(d <= threshold) {
            return Err(Error::VerificationFailed {
                index: i,
                distance: d,
                threshold,
            });
        }
        residual = residual.max(d);
    }
    Ok(residual)
}

/// Find `g` and a regular ideal `t = (0, 1, e^{+-i pi/3}, inf)` with
/// `g F_i = V_n(t_i)`, for `F` with maximality defect below `tol`.
///
/// `F_0` and `F_3` are sent to `V_n(0)` and `V_n(inf)` through the lines
/// `F_3^{j+1} ∩ F_0^{n-j}`; the remaining diagonal freedom is fixed by sending
/// the line of `F_1` to that of `V_n(1)`. The sign of `B_n` picks `t_2`.
pub fn recover_normalizer(config: &FlagConfig, tol: f64) -> Result<Normalization> {
    config.expect_len(4)?;
    let n = config.dim();
    let flags = config.flags();
    let borel = borel_cocycle(config)?;
    let defect = borel_bound(n) - borel.abs();
    if !(defect < tol) {
        return Err(Error::NotMaximal { defect, tol });
    }

    let mut lines = CMat::zeros(n, n);
    for j in 0..n {
        let line = intersection_line(
            &flags[3].level_basis(j + 1),
            &flags[0].level_basis(n - j),
            j + 1,
        )?;
        lines.set_column(j, &line);
    }
    let g0 = lines
        .try_inverse()
        .ok_or(Error::DegenerateIntersection { level: n })?;
    let a = &g0 * flags[1].unitary_basis().column(0);
    let amax = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let binom = binomial_coefficients(n - 1);
    let mut scaled = g0;
    for j in 0..n {
        if !(a[j].norm() > TRANSVERSALITY_TOL * amax) {
            return Err(Error::DegenerateIntersection { level: j + 1 });
        }
        let s = C64::from(binom[j]) / a[j];
        let mut row = scaled.row_mut(j);
        row *= s;
    }
    let g = GroupElement::new(scaled)?;
    let tet = TetConfig::regular(borel >= 0.0);
    let threshold = VERIFY_CONSTANT * tol.sqrt();
    let residual = verify(&g, flags, &tet, threshold)?;
    Ok(Normalization {
        g,
        tet,
        borel,
        defect,
        residual,
        threshold,
    })
}

/// As [`recover_normalizer`], but sending `F_i` to `V_n(eta_i)` for a given
/// regular ideal tetrahedron `eta`.
pub fn recover_normalizer_to(config: &FlagConfig, target: &TetConfig, tol: f64) -> Result<Normalization> {
    let canonical = recover_normalizer(config, tol)?;
    let [e0, e1, e2, e3] = target.points();
    let m = ExtendedMoebius::to_zero_one_infinity(e0, e1, e3)?;
    let threshold = canonical.threshold;
    let apex = m.apply(e2).chordal_distance(&canonical.tet.points()[2]);
    if !(apex <= threshold) {
        return Err(Error::VerificationFailed {
            index: 2,
            distance: apex,
            threshold,
        });
    }
    let g = moebius_rep(&m, config.dim()).inverse().compose(&canonical.g);
    let residual = verify(&g, config.flags(), target, threshold)?;
    Ok(Normalization {
        g,
        tet: *target,
        residual,
        ..canonical
    })
}

#[derive(Debug, Clone)]
pub struct MaximizeOptions {
    /// Total objective evaluations over all starts.
    pub budget: usize,
    pub starts: usize,
    pub seed: u64,
    /// Tolerance handed to [`recover_normalizer`] on the optimum.
    pub recovery_tol: f64,
}

impl MaximizeOptions {
    pub fn new(budget: usize, seed: u64) -> Self {
        Self {
            budget,
            starts: 8,
            seed,
            recovery_tol: 1e-2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MaximizeReport {
    pub config: FlagConfig,
    /// `|B_n|` at the returned configuration.
    pub value: f64,
    pub defect: f64,
    pub evals: usize,
    pub recovery: std::result::Result<Normalization, Error>,
}

fn rotate(basis: &CMat, params: &[f64]) -> Result<Flag> {
    let n = basis.nrows();
    let u = linalg::skew_hermitian_offdiag(n, params).exp();
    Flag::from_columns(u * basis)
}

struct Candidate {
    x: Vec<f64>,
    value: f64,
    evals: usize,
}

/// Nelder-Mead with restarts from the incumbent and a shrinking initial step
/// until the budget is used or the target is reached.
fn restarted_search<F>(f: F, x0: Vec<f64>, budget: usize, target: f64) -> Candidate
where
    F: Fn(&[f64]) -> f64,
{
    let dim = x0.len();
    let mut best = Candidate {
        value: f(&x0),
        x: x0,
        evals: 1,
    };
    let mut step = 0.5;
    while best.evals + dim + 2 <= budget && best.value > target {
        let opts = NelderMeadOptions {
            max_evals: budget - best.evals,
            initial_step: step,
            f_tol: 1e-15,
            x_tol: 1e-11,
        };
        let res = nelder_mead(&f, &best.x, &opts);
        best.evals += res.evals;
        let gain = best.value - res.value;
        if res.value < best.value {
            best.x = res.x;
            best.value = res.value;
        }
        if gain < 1e-14 && step < 1e-3 {
            break;
        }
        step = (step * 0.5).max(1e-4);
    }
    best
}

fn finish(config: FlagConfig, evals: usize, recovery_tol: f64) -> MaximizeReport {
    let n = config.dim();
    let value = borel_cocycle(&config).map(f64::abs).unwrap_or(0.0);
    MaximizeReport {
        defect: borel_bound(n) - value,
        value,
        evals,
        recovery: recover_normalizer(&config, recovery_tol),
        config,
    }
}

/// Maximize `|B_n|` over 4-tuples of flags.
///
/// `F_0 = V_n(0)` and `F_3 = V_n(inf)` are fixed (every transverse pair is a
/// translate of this one); `F_1`, `F_2` are `exp(H) F_std` for skew-Hermitian
/// `H` with vanishing diagonal. Starts run in parallel with seeds derived
/// from `opts.seed`.
pub fn maximize_borel(n: usize, opts: &MaximizeOptions) -> Result<MaximizeReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let starts = opts.starts.max(1);
    let share = (opts.budget.max(1) / starts).max(1);
    let per_flag = n * (n - 1);
    let f0 = Flag::reversed(n);
    let f3 = Flag::standard(n);
    let identity = CMat::identity(n, n);
    let build = |x: &[f64]| -> Result<FlagConfig> {
        let f1 = rotate(&identity, &x[..per_flag])?;
        let f2 = rotate(&identity, &x[per_flag..])?;
        FlagConfig::new(vec![f0.clone(), f1, f2, f3.clone()])
    };
    let objective = |x: &[f64]| match build(x).and_then(|cfg| borel_cocycle(&cfg)) {
        Ok(b) => -b.abs(),
        Err(_) => f64::INFINITY,
    };
    let target = -(borel_bound(n) - 1e-13);
    let runs: Vec<Candidate> = (0..starts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(opts.seed, i as u64));
            let x0: Vec<f64> = (0..2 * per_flag).map(|_| StandardNormal.sample(&mut rng)).collect();
            restarted_search(objective, x0, share, target)
        })
        .collect();
    let evals = runs.iter().map(|r| r.evals).sum();
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.value < a.value { b } else { a })
        .expect("at least one start");
    Ok(finish(build(&best.x)?, evals, opts.recovery_tol))
}

/// Maximize `|B_n|` starting from a given configuration, moving every flag by
/// its own unitary factor. Returns at once if the start is already maximal.
pub fn maximize_borel_from(start: &FlagConfig, opts: &MaximizeOptions) -> Result<MaximizeReport> {
    start.expect_len(4)?;
    let n = start.dim();
    let defect = maximality_defect(start)?;
    if defect < MAXIMAL_TOL {
        return Ok(finish(start.clone(), 1, opts.recovery_tol));
    }
    let per_flag = n * (n - 1);
    let bases: Vec<CMat> = start.flags().iter().map(|f| f.unitary_basis().clone()).collect();
    let build = |x: &[f64]| -> Result<FlagConfig> {
        let flags = bases
            .iter()
            .enumerate()
            .map(|(i, b)| rotate(b, &x[i * per_flag..(i + 1) * per_flag]))
            .collect::<Result<Vec<_>>>()?;
        FlagConfig::new(flags)
    };
    let objective = |x: &[f64]| match build(x).and_then(|cfg| borel_cocycle(&cfg)) {
        Ok(b) => -b.abs(),
        Err(_) => f64::INFINITY,
    };
    let target = -(borel_bound(n) - 1e-13);
    let best = restarted_search(objective, vec![0.0; 4 * per_flag], opts.budget.max(1), target);
    Ok(finish(build(&best.x)?, best.evals + 1, opts.recovery_tol))
}

/// Generator `X` of the conjugating sequence `c_k = exp(k X)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Drift {
    None,
    /// `alpha diag(n-1, n-3, ..., 1-n) / 2`.
    Diagonal(f64),
    /// Random traceless Hermitian matrix of the given Frobenius norm.
    Random { scale: f64 },
}

impl Drift {
    pub fn generator(&self, n: usize, seed: u64) -> CMat {
        match *self {
            Drift::None => CMat::zeros(n, n),
            Drift::Diagonal(alpha) => CMat::from_diagonal(&CVec::from_fn(n, |j, _| {
                c(alpha * (n as f64 - 1.0 - 2.0 * j as f64) / 2.0, 0.0)
            })),
            Drift::Random { scale } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let a = crate::geom::random_matrix(&mut rng, n, n);
                let mut h = (&a + a.adjoint()) * c(0.5, 0.0);
                let tr = h.trace() / C64::from(n as f64);
                for i in 0..n {
                    h[(i, i)] -= tr;
                }
                let norm = linalg::frobenius(&h);
                if norm > 0.0 {
                    h * C64::from(scale / norm)
                } else {
                    h
                }
            }
        }
    }
}

/// Perturbation scale `eps_k`.
#[derive(Debug, Clone, PartialEq)]
pub enum EpsSchedule {
    Zero,
    Constant(f64),
    /// `initial * ratio^k`.
    Geometric { initial: f64, ratio: f64 },
}

impl EpsSchedule {
    /// `2^{-k}`.
    pub fn halving() -> Self {
        EpsSchedule::Geometric {
            initial: 1.0,
            ratio: 0.5,
        }
    }

    pub fn at(&self, k: usize) -> f64 {
        match *self {
            EpsSchedule::Zero => 0.0,
            EpsSchedule::Constant(e) => e,
            EpsSchedule::Geometric { initial, ratio } => initial * ratio.powi(k as i32),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthesisConfig {
    pub n: usize,
    /// Number of steps `K`; `k` runs over `0..K`.
    pub steps: usize,
    /// Orbit word length `L`.
    pub words: usize,
    pub drift: Drift,
    pub eps: EpsSchedule,
    pub seed: u64,
}

/// Flags attached to finitely many points of `CP^1`.
#[derive(Debug, Clone)]
pub struct BoundaryMapSample {
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    index: PointIndex,
    flags: Vec<Flag>,
}

impl BoundaryMapSample {
    pub fn new(n: usize, k: usize, eps: f64) -> Self {
        Self {
            n,
            k,
            eps,
            index: PointIndex::new(),
            flags: Vec::new(),
        }
    }

    /// Attach `flag` to `p`, replacing any flag already stored there.
    pub fn insert(&mut self, p: &ProjectivePoint, flag: Flag) -> Result<()> {
        if flag.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: flag.dim(),
            });
        }
        let (id, new) = self.index.insert(p);
        if new {
            self.flags.push(flag);
        } else {
            self.flags[id] = flag;
        }
        Ok(())
    }

    pub fn get(&self, p: &ProjectivePoint) -> Option<&Flag> {
        self.index.find(p).map(|id| &self.flags[id])
    }

    /// Flags at the vertices of `t`.
    pub fn config(&self, t: &TetConfig) -> Result<FlagConfig> {
        let flags = t
            .points()
            .iter()
            .map(|p| {
                self.get(p).cloned().ok_or_else(|| {
                    Error::InvalidArgument(format!("no flag sampled at {:?}", p.sphere_coords()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        FlagConfig::new(flags)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ProjectivePoint, &Flag)> {
        self.index.points().iter().zip(&self.flags)
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }
}

/// Images of a fixed generator list under a sequence of representations.
#[derive(Debug, Clone)]
pub struct RepSequence {
    pub n: usize,
    /// Words in the face reflections; all orientation-preserving.
    pub generators: Vec<GroupWord>,
    /// `images[k][i] = rho_k(generators[i])`.
    pub images: Vec<Vec<GroupElement>>,
    /// Ground-truth conjugators `c_k`.
    pub conjugators: Vec<GroupElement>,
}

impl RepSequence {
    pub fn steps(&self) -> usize {
        self.images.len()
    }

    /// Largest distance of `rho_k(r_i r_j)^3` from the identity; each
    /// generator is a rotation of order three about an edge.
    pub fn relator_residual(&self) -> f64 {
        let id = GroupElement::identity(self.n);
        self.images
            .iter()
            .flatten()
            .map(|g| g.compose(g).compose(g).projective_distance(&id))
            .fold(0.0, f64::max)
    }
}

/// Points carrying flags in a synthetic boundary map: vertices of the orbit
/// up to `words` reflections, and the images of the base vertices under the
/// dilation of the base tetrahedron and its inverse.
pub fn sample_points(words: usize) -> Vec<ProjectivePoint> {
    let mut index = PointIndex::new();
    for cell in enumerate_orbit(words, &base_reflections()) {
        for p in cell.tet.points() {
            index.insert(p);
        }
    }
    let base = TetConfig::base();
    let d = dilation_element(&base).expect("base vertices are distinct");
    for g in [d, d.inverse()] {
        for p in base.points() {
            index.insert(&g.apply(p));
        }
    }
    index.points().to_vec()
}

fn unit_skew_hermitian(n: usize, seed: u64) -> CMat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = crate::geom::random_matrix(&mut rng, n, n);
    let s = (&a - a.adjoint()) * c(0.5, 0.0);
    let norm = linalg::frobenius(&s);
    s / C64::from(norm)
}

const PERTURBATION_SALT: u64 = 0x7065_7274;
const DRIFT_SALT: u64 = 0x6472_6966;

/// Synthetic `rho_k = c_k pi_n c_k^{-1}` on the rotation generators and
/// `phi_k(a) = c_k exp(eps_k S_a) V_n(a)` on [`sample_points`], with one fixed
/// unit skew-Hermitian `S_a` per point.
pub fn synthesize_sequence(cfg: &SynthesisConfig) -> Result<(RepSequence, Vec<BoundaryMapSample>)> {
    if cfg.steps == 0 {
        return Err(Error::InvalidArgument("at least one step is required".into()));
    }
    if cfg.n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let n = cfg.n;
    let x = cfg.drift.generator(n, derive_seed(cfg.seed, DRIFT_SALT));
    let generators = rotation_generators();
    let base_images: Vec<GroupElement> = generators
        .iter()
        .map(|w| moebius_rep(w.element(), n))
        .collect();
    let points = sample_points(cfg.words);
    let unperturbed: Vec<CMat> = points
        .iter()
        .map(|p| veronese_flag(p, n).unitary_basis().clone())
        .collect();
    let directions: Vec<CMat> = (0..points.len())
        .map(|i| unit_skew_hermitian(n, derive_seed(cfg.seed ^ PERTURBATION_SALT, i as u64)))
        .collect();

    let per_step: Vec<(Vec<GroupElement>, GroupElement, BoundaryMapSample)> = (0..cfg.steps)
        .into_par_iter()
        .map(|k| -> Result<_> {
            let ck = (&x * C64::from(k as f64)).exp();
            let conj = GroupElement::new(ck.clone())?;
            let images = base_images.iter().map(|g| conj.conjugate(g)).collect();
            let eps = cfg.eps.at(k);
            let mut sample = BoundaryMapSample::new(n, k, eps);
            for ((p, v), s) in points.iter().zip(&unperturbed).zip(&directions) {
                let moved = if eps == 0.0 {
                    &ck * v
                } else {
                    &ck * (s * C64::from(eps)).exp() * v
                };
                sample.insert(p, Flag::from_columns(moved)?)?;
            }
            Ok((images, conj, sample))
        })
        .collect::<Result<_>>()?;

    let mut images = Vec::with_capacity(cfg.steps);
    let mut conjugators = Vec::with_capacity(cfg.steps);
    let mut samples = Vec::with_capacity(cfg.steps);
    for (im, cj, s) in per_step {
        images.push(im);
        conjugators.push(cj);
        samples.push(s);
    }
    Ok((
        RepSequence {
            n,
            generators,
            images,
            conjugators,
        },
        samples,
    ))
}

#[derive(Debug, Clone)]
pub struct PropagateOptions {
    /// Orbit word length `L` for the propagation check.
    pub words: usize,
    pub tol: f64,
    /// Also recover from the dilated base tetrahedron and compare.
    pub delta: bool,
}

impl Default for PropagateOptions {
    fn default() -> Self {
        Self {
            words: 4,
            tol: 1e-2,
            delta: true,
        }
    }
}

/// Per-step diagnostics. Missing values mean the step failed before the
/// quantity could be computed; `error` then says why.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub k: usize,
    pub eps: f64,
    /// Maximality defect of the base tetrahedron's flags.
    pub defect: Option<f64>,
    /// Max over orbit vertices `a` of `d(g_k phi_k(a), V_n(a))`.
    pub propagation: Option<f64>,
    /// Max over generators of `d(g_k rho_k(gamma) g_k^{-1}, pi_n(gamma))`.
    pub representation: Option<f64>,
    /// Distance between the normalizers recovered from the base and from its
    /// dilation image.
    pub delta_consistency: Option<f64>,
    /// Distance between `g_k` and the ground-truth `c_k^{-1}`.
    pub truth: Option<f64>,
    /// Max over generators of the norm of `rho_k(gamma)`.
    pub rho_norm: f64,
    pub error: Option<String>,
}

/// Recover a normalizing sequence from `samples` and measure how well it
/// straightens the maps and representations, one row per step.
pub fn propagate_and_recover(
    samples: &[BoundaryMapSample],
    reps: &RepSequence,
    opts: &PropagateOptions,
) -> Vec<StepReport> {
    let n = reps.n;
    let base = TetConfig::base();
    let orbit: Vec<ProjectivePoint> = {
        let mut index = PointIndex::new();
        for cell in enumerate_orbit(opts.words, &base_reflections()) {
            for p in cell.tet.points() {
                index.insert(p);
            }
        }
        index.points().to_vec()
    };
    let targets: Vec<Flag> = orbit.iter().map(|p| veronese_flag(p, n)).collect();
    let pi: Vec<GroupElement> = reps
        .generators
        .iter()
        .map(|w| moebius_rep(w.element(), n))
        .collect();
    let dilated = dilation_element(&base)
        .expect("base vertices are distinct")
        .apply_tet(&base);

    samples
        .par_iter()
        .map(|sample| {
            let k = sample.k;
            let images = reps.images.get(k);
            let mut row = StepReport {
                k,
                eps: sample.eps,
                defect: None,
                propagation: None,
                representation: None,
                delta_consistency: None,
                truth: None,
                rho_norm: images
                    .map(|im| im.iter().map(|g| g.norm()).fold(0.0, f64::max))
                    .unwrap_or(f64::NAN),
                error: None,
            };
            let mut errors: Vec<String> = Vec::new();
            let step = || -> Result<GroupElement> {
                let cfg = sample.config(&base)?;
                Ok(recover_normalizer(&cfg, opts.tol)?.g)
            };
            row.defect = sample.config(&base).and_then(|cfg| maximality_defect(&cfg)).ok();
            let g = match step() {
                Ok(g) => g,
                Err(e) => {
                    row.error = Some(format!("{}: {e}", e.kind()));
                    return row;
                }
            };

            let mut propagation = 0.0f64;
            let mut complete = true;
            for (p, target) in orbit.iter().zip(&targets) {
                match sample
                    .get(p)
                    .ok_or_else(|| Error::InvalidArgument("orbit point not sampled".into()))
                    .and_then(|f| act_on_flag(&g, f))
                    .and_then(|f| flag_distance(&f, target))
                {
                    Ok(d) => propagation = propagation.max(d),
                    Err(e) => {
                        errors.push(format!("propagation: {e}"));
                        complete = false;
                        break;
                    }
                }
            }
            if complete {
                row.propagation = Some(propagation);
            }

            match images {
                Some(images) => {
                    let d = images
                        .iter()
                        .zip(&pi)
                        .map(|(rho, p)| g.conjugate(rho).projective_distance(p))
                        .fold(0.0, f64::max);
                    row.representation = Some(d);
                }
                None => errors.push(format!("representation: no images for step {k}")),
            }
            if let Some(ck) = reps.conjugators.get(k) {
                row.truth = Some(g.projective_distance(&ck.inverse()));
            }

            if opts.delta {
                match sample
                    .config(&dilated)
                    .and_then(|cfg| recover_normalizer_to(&cfg, &dilated, opts.tol))
                {
                    Ok(other) => row.delta_consistency = Some(other.g.projective_distance(&g)),
                    Err(e) => errors.push(format!("delta: {}: {e}", e.kind())),
                }
            }
            if !errors.is_empty() {
                row.error = Some(errors.join("; "));
            }
            row
        })
        .collect()
}
