//! Command-line front-end: argument parsing, dispatch and artifact output.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::affine_sl::{task_rng, AffineSl, RecordStatus, RetractionReport, MAX_PRECISION_RETRIES};
use crate::affine_weyl::rat_string;
use crate::gallery::{GalleryJson, GalleryModel};
use crate::mv_polytope::{ggms_check, PolytopeJson};
use crate::root_system::{Coweight, Rat, RootSystem, WeylElement};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "mvgallery",
    version,
    about = "Crystals, MV polytopes and retractions from LS galleries"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the crystal of LS galleries; writes JSON and DOT.
    Crystal(JobArgs),
    /// MV polytopes of all LS galleries, or of those of weight `--nu`.
    Polytopes(JobArgs),
    /// Check the section, flip and Xi laws on every node.
    VerifySections(JobArgs),
    /// Check that retractions of generic points recover the Xi galleries,
    /// in the SL_n matrix model.
    VerifyRetraction(JobArgs),
    /// Cross-check against Weyl dimension, Freudenthal, the group
    /// relations and the affine-root contract.
    OracleCheck(JobArgs),
}

#[derive(Debug, Clone, Args)]
pub struct JobArgs {
    /// Root system type: A1, A2, A3, B2, B3, C2, C3, G2.
    #[arg(value_name = "TYPE")]
    pub type_pos: Option<String>,
    /// Dominant coweight in simple-coroot coordinates, e.g. `1,1` or `2/3,1/3`.
    #[arg(value_name = "LAMBDA", allow_hyphen_values = true)]
    pub lambda_pos: Option<String>,
    #[arg(long = "type", value_name = "TYPE")]
    pub type_flag: Option<String>,
    #[arg(long = "lambda", value_name = "LAMBDA", allow_hyphen_values = true)]
    pub lambda_flag: Option<String>,
    /// Restrict to galleries of this weight (simple-coroot coordinates).
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<String>,
    /// Weyl group element as a word in simple reflections numbered from 1,
    /// e.g. `1,2,1`; `e` is the identity.
    #[arg(long)]
    pub direction: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Initial truncation order for Laurent series.
    #[arg(long)]
    pub precision: Option<i64>,
    /// Samples per (gallery, direction) pair in `verify-retraction`.
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    /// Output directory; without it the JSON artifact goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Crystal,
    Polytopes,
    VerifySections,
    VerifyRetraction,
    OracleCheck,
}

/// A validated job.
#[derive(Clone, Debug)]
pub struct JobConfig {
    pub command: CommandKind,
    pub type_label: String,
    /// Simple-coroot coordinates as given.
    pub lambda: Vec<Rat>,
    pub nu: Option<Vec<Rat>>,
    /// 0-based word.
    pub direction: Option<Vec<usize>>,
    pub seed: u64,
    pub precision: Option<i64>,
    pub trials: usize,
    pub out: Option<PathBuf>,
}

/// A named file produced by a job.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

/// Everything a job produced. `violation` is set when a check failed; the
/// artifacts are still written.
#[derive(Debug)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub violation: Option<Violation>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub kind: String,
    pub exit_code: i32,
    pub message: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub records: Vec<serde_json::Value>,
}

impl Violation {
    pub fn from_error(e: &Error) -> Self {
        let kind = match e {
            Error::Config(_) => "config",
            Error::NotFiniteType(_) => "not-finite-type",
            Error::NotDominant(_) => "not-dominant",
            Error::ZeroCoweight => "zero-coweight",
            Error::NotTypeA(_) => "not-type-a",
            Error::PrecisionExhausted(_) => "precision-exhausted",
            Error::ResampleCap(_) => "resample-cap",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            _ => "invariant",
        };
        Violation {
            kind: kind.into(),
            exit_code: e.exit_code(),
            message: e.to_string(),
            records: Vec::new(),
        }
    }
}

fn parse_rationals(s: &str, what: &str) -> Result<Vec<Rat>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<Rat>()
                .map_err(|_| Error::Config(format!("{what}: cannot parse {t:?} as a rational")))
        })
        .collect()
}

fn parse_word(s: &str, rank: usize) -> Result<Vec<usize>> {
    let s = s.trim();
    if s.is_empty() || s == "e" {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| match t.trim().parse::<usize>() {
            Ok(i) if (1..=rank).contains(&i) => Ok(i - 1),
            _ => Err(Error::Config(format!(
                "direction: {t:?} is not in 1..={rank}"
            ))),
        })
        .collect()
}

fn pick(pos: &Option<String>, flag: &Option<String>, what: &str) -> Result<String> {
    match (pos, flag) {
        (Some(a), Some(b)) if a != b => {
            Err(Error::Config(format!("{what} given twice: {a} and {b}")))
        }
        (Some(a), _) | (None, Some(a)) => Ok(a.clone()),
        (None, None) => Err(Error::Config(format!("missing {what}"))),
    }
}

impl JobConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let (command, a) = match cli.command {
            Command::Crystal(a) => (CommandKind::Crystal, a),
            Command::Polytopes(a) => (CommandKind::Polytopes, a),
            Command::VerifySections(a) => (CommandKind::VerifySections, a),
            Command::VerifyRetraction(a) => (CommandKind::VerifyRetraction, a),
            Command::OracleCheck(a) => (CommandKind::OracleCheck, a),
        };
        let type_label = pick(&a.type_pos, &a.type_flag, "type")?;
        let rs = RootSystem::from_label(&type_label)?;
        let lambda = parse_rationals(&pick(&a.lambda_pos, &a.lambda_flag, "lambda")?, "lambda")?;
        let nu =
            a.nu.as_deref()
                .map(|s| parse_rationals(s, "nu"))
                .transpose()?;
        let direction = a
            .direction
            .as_deref()
            .map(|s| parse_word(s, rs.rank()))
            .transpose()?;
        if a.trials == 0 {
            return Err(Error::Config("trials must be positive".into()));
        }
        if matches!(a.precision, Some(p) if p < 1) {
            return Err(Error::Config("precision must be positive".into()));
        }
        let cfg = JobConfig {
            command,
            type_label,
            lambda,
            nu,
            direction,
            seed: a.seed,
            precision: a.precision,
            trials: a.trials,
            out: a.out,
        };
        cfg.model()?;
        Ok(cfg)
    }

    fn coweight(rs: &RootSystem, c: &[Rat], what: &str) -> Result<Coweight> {
        if c.len() != rs.rank() {
            return Err(Error::Config(format!(
                "{what} needs {} coordinates, got {}",
                rs.rank(),
                c.len()
            )));
        }
        rs.coweight_from_coroot_coords(c)
            .ok_or_else(|| Error::Config(format!("{what} is not in the coweight lattice")))
    }

    pub fn model(&self) -> Result<GalleryModel> {
        let rs = RootSystem::from_label(&self.type_label)?;
        let lambda = Self::coweight(&rs, &self.lambda, "lambda")?;
        GalleryModel::from_label(&self.type_label, &lambda)
    }
}

#[derive(Serialize)]
struct Header<'a> {
    command: CommandKind,
    type_id: String,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    nu: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    direction: Option<Vec<usize>>,
    #[serde(flatten)]
    body: &'a serde_json::Value,
}

fn json_artifact(
    name: &str,
    cfg: &JobConfig,
    model: &GalleryModel,
    body: serde_json::Value,
) -> Result<Artifact> {
    let header = Header {
        command: cfg.command,
        type_id: model.type_id(),
        seed: cfg.seed,
        nu: cfg.nu.as_ref().map(|v| v.iter().map(rat_string).collect()),
        direction: cfg
            .direction
            .as_ref()
            .map(|w| w.iter().map(|i| i + 1).collect()),
        body: &body,
    };
    let mut contents = serde_json::to_string_pretty(&header)?;
    contents.push('\n');
    Ok(Artifact {
        name: name.into(),
        contents,
    })
}

fn directions(cfg: &JobConfig, rs: &RootSystem) -> Vec<WeylElement> {
    match &cfg.direction {
        Some(word) => vec![rs.from_word(word)],
        None => rs.weyl_elements().collect(),
    }
}

fn invariant(records: Vec<serde_json::Value>, message: String) -> Option<Violation> {
    (!records.is_empty()).then(|| Violation {
        kind: "invariant".into(),
        exit_code: 3,
        message,
        records,
    })
}

#[derive(Serialize)]
struct Failure {
    gallery: GalleryJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    i: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    w: Option<Vec<usize>>,
    message: String,
}

fn failure(
    model: &GalleryModel,
    g: &crate::gallery::Gallery,
    i: Option<usize>,
    w: Option<WeylElement>,
    e: &Error,
) -> serde_json::Value {
    let rs = model.root_system();
    serde_json::to_value(Failure {
        gallery: model.to_json(g),
        i: i.map(|i| i + 1),
        w: w.map(|w| rs.word(w).iter().map(|i| i + 1).collect()),
        message: e.to_string(),
    })
    .expect("failure record serializes")
}

fn run_crystal(cfg: &JobConfig, model: &GalleryModel) -> Result<Outcome> {
    let crystal = model.checked_crystal()?;
    let mut records = Vec::new();
    for g in &crystal.nodes {
        if let Err(e) = model.check_crystal_laws(g) {
            records.push(failure(model, g, None, None, &e));
        }
    }
    let body = serde_json::to_value(model.crystal_json(&crystal, Some(cfg.seed)))?;
    let json = json_artifact("crystal.json", cfg, model, body)?;
    let dot = Artifact {
        name: "crystal.dot".into(),
        contents: format!(
            "// {} seed {}\n{}",
            model.type_id(),
            cfg.seed,
            model.crystal_dot(&crystal)
        ),
    };
    let n = records.len();
    Ok(Outcome {
        artifacts: vec![json, dot],
        violation: invariant(records, format!("crystal laws fail at {n} nodes")),
    })
}

#[derive(Serialize)]
struct PolytopeEntry {
    gallery: GalleryJson,
    #[serde(flatten)]
    polytope: PolytopeJson,
}

fn run_polytopes(cfg: &JobConfig, model: &GalleryModel) -> Result<Outcome> {
    let rs = model.root_system();
    let mut galleries = model.ls_galleries();
    if let Some(nu) = &cfg.nu {
        let nu = JobConfig::coweight(rs, nu, "nu")?;
        galleries.retain(|g| model.weight(g) == nu);
    }
    let mut entries = Vec::new();
    let mut offs = Vec::new();
    let mut records = Vec::new();
    for g in &galleries {
        let d = model.vertex_data(g);
        let checked = ggms_check(rs, &d)
            .map_err(|v| Error::Invariant(format!("{v:?}")))
            .and_then(|_| model.check_edge_law(g, &d))
            .and_then(|_| crate::mv_polytope::polytope(rs, &d))
            .and_then(|p| p.verify(rs.rank()).map(|_| p));
        match checked {
            Ok(p) => {
                if rs.rank() == 3 {
                    offs.push(p.to_off(rs));
                }
                entries.push(PolytopeEntry {
                    gallery: model.to_json(g),
                    polytope: model.polytope_json(&d, &p),
                });
            }
            Err(e) => records.push(failure(model, g, None, None, &e)),
        }
    }
    let body = serde_json::json!({ "polytopes": entries });
    let mut artifacts = vec![json_artifact("polytopes.json", cfg, model, body)?];
    for (k, off) in offs.into_iter().enumerate() {
        let mut lines = off.lines();
        let first = lines.next().unwrap_or("OFF");
        let rest: Vec<&str> = lines.collect();
        artifacts.push(Artifact {
            name: format!("polytope_{k}.off"),
            contents: format!(
                "{first}\n# {} seed {}\n{}\n",
                model.type_id(),
                cfg.seed,
                rest.join("\n")
            ),
        });
    }
    let n = records.len();
    Ok(Outcome {
        artifacts,
        violation: invariant(records, format!("polytope laws fail for {n} galleries")),
    })
}

fn run_sections(cfg: &JobConfig, model: &GalleryModel) -> Result<Outcome> {
    let rs = model.root_system();
    let crystal = model.generate_crystal();
    let ws = directions(cfg, rs);
    let mut checks = 0usize;
    let mut records = Vec::new();
    for g in &crystal.nodes {
        for i in 0..rs.rank() {
            checks += 1;
            if let Err(e) = model.check_section_laws(g, i) {
                records.push(failure(model, g, Some(i), None, &e));
            }
        }
        for &w in &ws {
            checks += 1;
            if let Err(e) = model.check_xi_words(g, w) {
                records.push(failure(model, g, None, Some(w), &e));
            }
        }
    }
    let body = serde_json::json!({
        "nodes": crystal.len(),
        "checks": checks,
        "failures": records.len(),
    });
    let n = records.len();
    Ok(Outcome {
        artifacts: vec![json_artifact("sections.json", cfg, model, body)?],
        violation: invariant(records, format!("{n} section checks failed")),
    })
}

fn run_retraction(cfg: &JobConfig, model: &GalleryModel) -> Result<Outcome> {
    let rs = model.root_system();
    let sl = AffineSl::new(model.apartment().clone())?;
    let ws = match &cfg.direction {
        Some(word) => vec![rs.from_word(word)],
        None => Vec::new(),
    };
    let report: RetractionReport =
        sl.verify_retraction(model, cfg.seed, cfg.trials, &ws, cfg.precision);
    let bad: Vec<_> = report
        .records
        .iter()
        .filter(|r| r.status != RecordStatus::Pass)
        .collect();
    let violation = if bad.is_empty() {
        None
    } else {
        let precision_only = bad
            .iter()
            .all(|r| r.status == RecordStatus::PrecisionExhausted);
        Some(Violation {
            kind: if precision_only { "precision-exhausted" } else { "invariant" }.into(),
            exit_code: if precision_only { 4 } else { 3 },
            message: format!(
                "{} of {} (gallery, direction) pairs failed; precision doubled at most {MAX_PRECISION_RETRIES} times",
                bad.len(),
                report.records.len()
            ),
            records: bad.iter().map(|r| serde_json::to_value(r).expect("record serializes")).collect(),
        })
    };
    let body = serde_json::json!({ "trials": cfg.trials, "records": report.records });
    Ok(Outcome {
        artifacts: vec![json_artifact("retraction.json", cfg, model, body)?],
        violation,
    })
}

fn run_oracle(cfg: &JobConfig, model: &GalleryModel) -> Result<Outcome> {
    let rs = model.root_system();
    let mut records = Vec::new();
    let mut note = |what: &str, r: Result<()>| {
        if let Err(e) = r {
            records.push(serde_json::json!({ "check": what, "message": e.to_string() }));
        }
    };
    let crystal = model.checked_crystal();
    let size = crystal.as_ref().map(|c| c.len()).unwrap_or(0);
    note("weyl-dimension-freudenthal", crystal.map(|_| ()));
    let mut contract_checks = 0usize;
    for g in model.enumerate() {
        for j in 1..=model.p() {
            contract_checks += 1;
            note(
                "affine-root-contract",
                model.check_affine_root_contract(&g, j),
            );
        }
    }
    let mut relations = serde_json::Value::Null;
    if rs.datum().is_type_a() {
        let sl = AffineSl::new(model.apartment().clone())?;
        let mut rng = task_rng(cfg.seed, [u64::MAX, 0, 0]);
        match sl.check_relations(&mut rng, 100) {
            Ok(n) => relations = n.into(),
            Err(e) => note("relations", Err(e)),
        }
        for g in model.enumerate() {
            for j in 1..=model.p() {
                let a = num_rational::BigRational::from_integer((j as i64 + 1).into());
                note(
                    "gallery-origin-matrix",
                    sl.check_gallery_origin(model, &g, j, &a),
                );
            }
        }
    }
    let body = serde_json::json!({
        "crystal_size": size,
        "weyl_dimension": rs.weyl_dimension(model.lambda())?,
        "contract_checks": contract_checks,
        "relation_identities": relations,
        "failures": records.len(),
    });
    let n = records.len();
    Ok(Outcome {
        artifacts: vec![json_artifact("oracle.json", cfg, model, body)?],
        violation: invariant(records, format!("{n} oracle checks failed")),
    })
}

/// Runs a job and returns its artifacts without touching the filesystem.
pub fn execute(cfg: &JobConfig) -> Result<Outcome> {
    let model = cfg.model()?;
    match cfg.command {
        CommandKind::Crystal => run_crystal(cfg, &model),
        CommandKind::Polytopes => run_polytopes(cfg, &model),
        CommandKind::VerifySections => run_sections(cfg, &model),
        CommandKind::VerifyRetraction => run_retraction(cfg, &model),
        CommandKind::OracleCheck => run_oracle(cfg, &model),
    }
}

fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for a in artifacts {
        fs::write(dir.join(&a.name), &a.contents)?;
    }
    Ok(())
}

/// Runs a job, writes its artifacts (to `--out`, else the first one to
/// stdout) and any violation record to stderr; returns the exit code.
pub fn run(cfg: &JobConfig) -> i32 {
    let outcome = execute(cfg).and_then(|o| {
        match &cfg.out {
            Some(dir) => write_artifacts(dir, &o.artifacts)?,
            None => print!("{}", o.artifacts[0].contents),
        }
        Ok(o)
    });
    let violation = match outcome {
        Ok(o) => o.violation,
        Err(e) => Some(Violation::from_error(&e)),
    };
    match violation {
        None => 0,
        Some(v) => {
            eprintln!(
                "{}",
                serde_json::to_string(&v).expect("violation serializes")
            );
            v.exit_code
        }
    }
}
