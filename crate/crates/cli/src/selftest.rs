//! Reduced-size run of the invariant suite.

use flagvol::borel::{
    block_join, borel_bound, borel_coboundary, borel_cocycle, borel_cocycle_affine, borel_cocycle_seeded,
    derive_seed, partition_bound, partitions, FlagConfig,
};
use flagvol::geom::{random_flag, random_matrix, random_point};
use flagvol::hypvol::{bloch_wigner, ideal_volume, nu3, TetConfig};
use flagvol::linalg::{CMat, C64};
use flagvol::rigidity::{
    propagate_and_recover, recover_normalizer, synthesize_sequence, Drift, EpsSchedule, PropagateOptions,
    SynthesisConfig,
};
use flagvol::tess::{base_reflections, enumerate_orbit};
use flagvol::veronese::{veronese_config, GroupElement};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::output::Table;

const SAMPLES: u64 = 50;

type Outcome = Result<String, String>;
type Check = (&'static str, fn(u64) -> Outcome);

fn verdict(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn near_identity(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    CMat::identity(n, n) + random_matrix(rng, n, n) * C64::new(0.3, 0.0)
}

fn constants(_: u64) -> Outcome {
    let catalan = 0.915_965_594_177_219;
    let e1 = (bloch_wigner(C64::new(0.0, 1.0)) - catalan).abs();
    let e2 = (nu3() - 1.014_941_606_409_653_6).abs();
    verdict(e1 < 1e-12 && e2 < 1e-12, format!("errors {e1:.1e}, {e2:.1e}"))
}

fn rank_two(seed: u64) -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..SAMPLES {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i));
        let t = TetConfig::new([(); 4].map(|_| random_point(&mut rng)));
        let b = borel_cocycle(&veronese_config(&t, 2)).map_err(|e| e.to_string())?;
        worst = worst.max((b - ideal_volume(&t)).abs());
    }
    verdict(worst < 1e-10, format!("max |B_2 - Vol| {worst:.1e}"))
}

fn veronese_maximal(_: u64) -> Outcome {
    let mut worst = 0.0f64;
    for n in 2..=5 {
        let b = borel_cocycle(&veronese_config(&TetConfig::base(), n)).map_err(|e| e.to_string())?;
        worst = worst.max((b - borel_bound(n)).abs());
    }
    verdict(worst < 1e-8, format!("max error {worst:.1e} for n = 2..5"))
}

fn bounded(seed: u64) -> Outcome {
    let mut violations = 0;
    for n in 1..=4 {
        for i in 0..4 * SAMPLES {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed ^ n as u64, i));
            let cfg = FlagConfig::new((0..4).map(|_| random_flag(&mut rng, n)).collect()).unwrap();
            match borel_cocycle(&cfg) {
                Ok(b) if b.abs() <= borel_bound(n) + 1e-9 => {}
                _ => violations += 1,
            }
        }
    }
    verdict(violations == 0, format!("{violations} violations"))
}

fn cocycle(seed: u64) -> Outcome {
    let mut worst = [0.0f64; 5];
    for n in 2..=4 {
        for i in 0..SAMPLES {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed ^ (100 + n as u64), i));
            let five = FlagConfig::new((0..5).map(|_| random_flag(&mut rng, n)).collect()).unwrap();
            let cfg = five.omit(4);
            let g = near_identity(&mut rng, n);
            let run = || -> flagvol::error::Result<[f64; 5]> {
                let b = borel_cocycle(&cfg)?;
                Ok([
                    (borel_cocycle(&cfg.transform(&g)?)? - b).abs(),
                    (borel_cocycle(&cfg.permuted(&[1, 0, 2, 3]))? + b).abs(),
                    (borel_cocycle_seeded(&cfg, derive_seed(seed, i))? - b).abs(),
                    borel_coboundary(&five)?.abs(),
                    (borel_cocycle(&cfg.conjugate())? + b).abs(),
                ])
            };
            let errs = run().map_err(|e| e.to_string())?;
            for (w, e) in worst.iter_mut().zip(errs) {
                *w = w.max(e);
            }
        }
    }
    let max = worst.iter().cloned().fold(0.0, f64::max);
    verdict(
        max < 1e-8,
        format!(
            "invariance {:.1e}, alternation {:.1e}, decorations {:.1e}, coboundary {:.1e}, conjugation {:.1e}",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
    )
}

fn join(seed: u64) -> Outcome {
    let mut worst = 0.0f64;
    for (n1, n2) in [(1usize, 2usize), (2, 2)] {
        for i in 0..SAMPLES {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed ^ (200 + n1 + n2) as u64, i));
            let f: Vec<_> = (0..4).map(|k| random_flag(&mut rng, n1).decorate(derive_seed(i, k))).collect();
            let g: Vec<_> = (0..4).map(|k| random_flag(&mut rng, n2).decorate(derive_seed(i, 8 + k))).collect();
            let h: Vec<_> = f.iter().zip(&g).map(|(a, b)| block_join(a, b)).collect();
            let run = || -> flagvol::error::Result<f64> {
                Ok((borel_cocycle_affine(&h)? - borel_cocycle_affine(&f)? - borel_cocycle_affine(&g)?).abs())
            };
            worst = worst.max(run().map_err(|e| e.to_string())?);
        }
    }
    verdict(worst < 1e-8, format!("max defect {worst:.1e}"))
}

fn partition(_: u64) -> Outcome {
    for n in 1..=12 {
        for p in partitions(n).into_iter().filter(|p| p.len() >= 2) {
            let b = partition_bound(n, &p).map_err(|e| e.to_string())?;
            if !b.strict {
                return Err(format!("{p:?} is not strict"));
            }
        }
    }
    Ok("all nontrivial partitions of n <= 12 strict".into())
}

fn tessellation(_: u64) -> Outcome {
    let cells = enumerate_orbit(4, &base_reflections());
    let worst = cells
        .iter()
        .map(|c| (ideal_volume(&c.tet) - c.sign() * nu3()).abs())
        .fold(0.0, f64::max);
    let r = base_reflections();
    let inv = r
        .iter()
        .map(|g| (*g * *g).projective_distance(&flagvol::moebius::ExtendedMoebius::identity()))
        .fold(0.0, f64::max);
    verdict(
        worst < 1e-10 && inv < 1e-12,
        format!("{} cells, volume error {worst:.1e}, involution error {inv:.1e}", cells.len()),
    )
}

fn round_trip(seed: u64) -> Outcome {
    let cfg = veronese_config(&TetConfig::base(), 3);
    let mut worst = 0.0f64;
    for i in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed ^ 300, i));
        let h = GroupElement::new(near_identity(&mut rng, 3)).map_err(|e| e.to_string())?;
        let moved = cfg.transform(h.matrix()).map_err(|e| e.to_string())?;
        let rec = recover_normalizer(&moved, 1e-8).map_err(|e| e.to_string())?;
        worst = worst.max(rec.g.projective_distance(&h.inverse()));
    }
    verdict(worst < 1e-7, format!("max d(g, h^-1) {worst:.1e}"))
}

fn propagation(seed: u64) -> Outcome {
    let cfg = SynthesisConfig {
        n: 3,
        steps: 12,
        words: 2,
        drift: Drift::Diagonal(0.1),
        eps: EpsSchedule::Zero,
        seed,
    };
    let (reps, samples) = synthesize_sequence(&cfg).map_err(|e| e.to_string())?;
    let opts = PropagateOptions {
        words: 2,
        ..PropagateOptions::default()
    };
    let worst = propagate_and_recover(&samples, &reps, &opts)
        .iter()
        .map(|r| {
            r.representation
                .unwrap_or(f64::INFINITY)
                .max(r.delta_consistency.unwrap_or(f64::INFINITY))
        })
        .fold(0.0, f64::max);
    verdict(worst < 1e-6, format!("exact inputs: max distance {worst:.1e}"))
}

/// Runs every check; the flag is true when all pass.
pub fn run(seed: u64) -> (Table, bool) {
    let checks: [Check; 10] = [
        ("constants", constants),
        ("rank_two_reduction", rank_two),
        ("veronese_maximality", veronese_maximal),
        ("boundedness", bounded),
        ("cocycle_suite", cocycle),
        ("block_join", join),
        ("partition_inequality", partition),
        ("tessellation", tessellation),
        ("rigidity_round_trip", round_trip),
        ("exact_propagation", propagation),
    ];
    let mut table = Table::new(&["check", "status", "detail"]);
    let mut all = true;
    for (name, check) in checks {
        let (status, detail) = match check(seed) {
            Ok(d) => ("pass", d),
            Err(d) => {
                all = false;
                ("fail", d)
            }
        };
        table.push(vec![name.into(), status.into(), detail]);
    }
    (table, all)
}
