use flagvol::borel::{borel_bound, borel_cocycle, borel_cocycle_seeded, partition_bound, partitions, FlagConfig};
use flagvol::geom::ProjectivePoint;
use flagvol::hypvol::{ideal_volume, TetConfig};
use flagvol::rigidity::{
    maximize_borel, maximize_borel_from, propagate_and_recover, synthesize_sequence, Drift, EpsSchedule,
    MaximizeOptions, PropagateOptions, SynthesisConfig,
};
use flagvol::tess::{base_reflections, enumerate_orbit_from};
use flagvol::veronese::veronese_flag;

use crate::document::{matrix_to_repr, point_to_repr, Document};
use crate::output::{fmt_num, fmt_opt, Table};
use crate::{CliError, Options};

pub const DEFAULT_WORDS: usize = 4;
pub const DEFAULT_STEPS: usize = 30;
pub const DEFAULT_BUDGET: usize = 50_000;
pub const DEFAULT_RECOVERY_TOL: f64 = 1e-2;
pub const DEFAULT_DRIFT: f64 = 0.1;

fn dimension(doc: &Document, opts: &Options) -> Result<usize, CliError> {
    let n = opts
        .n
        .or(doc.n)
        .ok_or_else(|| CliError::schema("dimension missing: pass --n or set \"n\""))?;
    if n == 0 {
        return Err(CliError::schema("n must be positive"));
    }
    Ok(n)
}

fn tetrahedron(doc: &Document) -> Result<TetConfig, CliError> {
    let pts = doc.projective_points()?;
    let pts: [ProjectivePoint; 4] = pts
        .try_into()
        .map_err(|v: Vec<_>| CliError::schema(format!("expected 4 points, got {}", v.len())))?;
    Ok(TetConfig::new(pts))
}

fn flag_config(doc: &Document) -> Result<FlagConfig, CliError> {
    let flags = doc.flag_list()?;
    if flags.len() != 4 {
        return Err(CliError::schema(format!("expected 4 flags, got {}", flags.len())));
    }
    FlagConfig::new(flags).map_err(CliError::module)
}

fn point_cells(p: &ProjectivePoint) -> [String; 2] {
    match p.to_complex() {
        Some(z) => [fmt_num(z.re), fmt_num(z.im)],
        None => ["inf".into(), "inf".into()],
    }
}

const VERTEX_COLUMNS: [&str; 8] = [
    "v0_re", "v0_im", "v1_re", "v1_im", "v2_re", "v2_im", "v3_re", "v3_im",
];

pub fn volume(doc: &Document) -> Result<Table, CliError> {
    let t = tetrahedron(doc)?;
    let mut table = Table::new(&["volume"]);
    table.push(vec![fmt_num(ideal_volume(&t))]);
    Ok(table)
}

pub fn borel(doc: &Document, opts: &Options) -> Result<Table, CliError> {
    let cfg = flag_config(doc)?;
    let b = match opts.seed {
        Some(seed) => borel_cocycle_seeded(&cfg, seed),
        None => borel_cocycle(&cfg),
    }
    .map_err(CliError::module)?;
    let bound = borel_bound(cfg.dim());
    let mut table = Table::new(&["borel", "bound", "defect"]);
    table.push(vec![fmt_num(b), fmt_num(bound), fmt_num(bound - b.abs())]);
    Ok(table)
}

pub fn veronese(doc: &Document, opts: &Options) -> Result<Document, CliError> {
    let n = dimension(doc, opts)?;
    let pts = doc.projective_points()?;
    if pts.is_empty() {
        return Err(CliError::schema("no points given"));
    }
    Ok(Document {
        n: Some(n),
        points: pts.iter().map(point_to_repr).collect(),
        flags: pts.iter().map(|p| matrix_to_repr(veronese_flag(p, n).columns())).collect(),
        config: None,
    })
}

pub fn orbit(doc: &Document, opts: &Options) -> Result<Table, CliError> {
    let words = opts.words.or(doc.config().words).unwrap_or(DEFAULT_WORDS);
    let base = if doc.points.is_empty() {
        TetConfig::base()
    } else {
        tetrahedron(doc)?
    };
    let mut header = vec!["word", "length"];
    header.extend(VERTEX_COLUMNS);
    header.extend(["volume", "sign"]);
    let mut table = Table::new(&header);
    for cell in enumerate_orbit_from(&base, words, &base_reflections()) {
        let mut row = vec![cell.word.to_string(), cell.word.len().to_string()];
        for p in cell.tet.points() {
            row.extend(point_cells(p));
        }
        row.push(fmt_num(ideal_volume(&cell.tet)));
        row.push(format!("{:+}", cell.sign() as i32));
        table.push(row);
    }
    Ok(table)
}

pub fn maximize(doc: &Document, opts: &Options) -> Result<Table, CliError> {
    let cfg = doc.config();
    let mut mopts = MaximizeOptions::new(
        cfg.budget.unwrap_or(DEFAULT_BUDGET),
        opts.seed.or(cfg.seed).unwrap_or(0),
    );
    mopts.recovery_tol = opts.tol.or(cfg.tol).unwrap_or(DEFAULT_RECOVERY_TOL);
    if let Some(s) = cfg.starts {
        mopts.starts = s;
    }
    let report = if doc.flags.is_empty() {
        maximize_borel(dimension(doc, opts)?, &mopts)
    } else {
        maximize_borel_from(&flag_config(doc)?, &mopts)
    }
    .map_err(CliError::module)?;
    let n = report.config.dim();
    let mut header = vec!["n", "value", "bound", "defect", "evals", "recovery", "residual"];
    header.extend(VERTEX_COLUMNS);
    let mut table = Table::new(&header);
    let mut row = vec![
        n.to_string(),
        fmt_num(report.value),
        fmt_num(borel_bound(n)),
        fmt_num(report.defect),
        report.evals.to_string(),
    ];
    match &report.recovery {
        Ok(norm) => {
            row.push("ok".into());
            row.push(fmt_num(norm.residual));
            for p in norm.tet.points() {
                row.extend(point_cells(p));
            }
        }
        Err(e) => {
            row.push(e.kind().into());
            row.extend(std::iter::repeat_n(String::new(), 9));
        }
    }
    table.push(row);
    Ok(table)
}

pub fn propagate(doc: &Document, opts: &Options) -> Result<Table, CliError> {
    let cfg = doc.config();
    let n = opts.n.or(doc.n).unwrap_or(3);
    if n < 2 {
        return Err(CliError::schema("propagate needs n >= 2"));
    }
    let words = opts.words.or(cfg.words).unwrap_or(DEFAULT_WORDS);
    let synth = SynthesisConfig {
        n,
        steps: opts.steps.or(cfg.steps).unwrap_or(DEFAULT_STEPS),
        words,
        drift: cfg.drift.as_ref().map(Drift::from).unwrap_or(Drift::Diagonal(DEFAULT_DRIFT)),
        eps: cfg.eps_schedule.as_ref().map(EpsSchedule::from).unwrap_or_else(EpsSchedule::halving),
        seed: opts.seed.or(cfg.seed).unwrap_or(0),
    };
    let (reps, samples) = synthesize_sequence(&synth).map_err(CliError::module)?;
    let popts = PropagateOptions {
        words,
        tol: opts.tol.or(cfg.tol).unwrap_or(PropagateOptions::default().tol),
        delta: true,
    };
    let mut table = Table::new(&[
        "k",
        "defect",
        "propagation",
        "representation",
        "delta_consistency",
        "eps",
        "truth",
        "rho_norm",
        "error",
    ]);
    for r in propagate_and_recover(&samples, &reps, &popts) {
        table.push(vec![
            r.k.to_string(),
            fmt_opt(r.defect),
            fmt_opt(r.propagation),
            fmt_opt(r.representation),
            fmt_opt(r.delta_consistency),
            fmt_num(r.eps),
            fmt_opt(r.truth),
            fmt_num(r.rho_norm),
            r.error.unwrap_or_default(),
        ]);
    }
    Ok(table)
}

pub fn partition_check(doc: &Document, opts: &Options) -> Result<Table, CliError> {
    let n = dimension(doc, opts)?;
    let mut table = Table::new(&[
        "partition",
        "parts_multiplier",
        "full_multiplier",
        "parts_value",
        "full_value",
        "relation",
    ]);
    for p in partitions(n) {
        let b = partition_bound(n, &p).map_err(CliError::module)?;
        let relation = if b.strict {
            "strict"
        } else if b.parts_multiplier == b.full_multiplier {
            "equality"
        } else {
            "violated"
        };
        table.push(vec![
            p.iter().map(usize::to_string).collect::<Vec<_>>().join("+"),
            b.parts_multiplier.to_string(),
            b.full_multiplier.to_string(),
            fmt_num(b.parts_value),
            fmt_num(b.full_value),
            relation.into(),
        ]);
    }
    Ok(table)
}
