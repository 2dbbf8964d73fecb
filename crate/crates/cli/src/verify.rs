use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use holonomy_core::berger::{
    certificate_for, check_bianchi, check_sectional, r_formal, BergerCertificate, CurvatureMap,
};
use holonomy_core::canonical::{build_canonical, validate_pair, CanonicalPair, PairValidation, PencilSpec};
use holonomy_core::liealg::{centralizer_basis, centralizer_dim_formula, SubspaceBasis};
use holonomy_core::probe::{
    holonomy_span, nabla_l_residual, standard_loop_family, to_dmatrix, FloatMetric, ProbeTolerances, SpanReport,
};
use holonomy_core::realize::{realize, verify_metric, QuadraticMetric, RealizationReport};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{write_atomic, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Canonical,
    Berger,
    Realize,
    Probe,
}

impl Stage {
    pub const ALL: [Stage; 4] = [Stage::Canonical, Stage::Berger, Stage::Realize, Stage::Probe];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Canonical => "canonical",
            Stage::Berger => "berger",
            Stage::Realize => "realize",
            Stage::Probe => "probe",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s.trim())
            .ok_or_else(|| format!("unknown stage {s:?}; expected canonical, berger, realize or probe"))
    }
}

/// Parses `canonical,berger,...` into a sorted, deduplicated, nonempty list.
pub fn parse_stages(list: &str) -> Result<Vec<Stage>, String> {
    let mut stages =
        list.split(',').filter(|s| !s.trim().is_empty()).map(Stage::from_str).collect::<Result<Vec<_>, _>>()?;
    stages.sort();
    stages.dedup();
    if stages.is_empty() {
        return Err("at least one stage is required".into());
    }
    Ok(stages)
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub input: PathBuf,
    pub stages: Vec<Stage>,
    pub tolerances: ProbeTolerances,
    pub out: Option<PathBuf>,
    pub metric_out: Option<PathBuf>,
    pub seed: u64,
    pub timings: bool,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>) -> Self {
        RunConfig {
            input: input.into(),
            stages: Stage::ALL.to_vec(),
            tolerances: ProbeTolerances::default(),
            out: None,
            metric_out: None,
            seed: 0,
            timings: false,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.stages.is_empty() {
            return Err("at least one stage is required".into());
        }
        let ProbeTolerances { membership_tol, rank_threshold } = self.tolerances;
        if !(membership_tol > 0.0 && rank_threshold > 0.0) {
            return Err("probe tolerances must be positive".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalStage {
    pub dim: usize,
    #[serde(flatten)]
    pub validation: PairValidation,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BergerStage {
    #[serde(rename = "dim_gL")]
    pub dim_gl: usize,
    #[serde(rename = "dim_gL_formula")]
    pub dim_gl_formula: usize,
    pub image_rank: usize,
    pub bianchi_ok: bool,
    pub bianchi_witness: Option<[usize; 3]>,
    pub sectional_ok: bool,
    pub certificate: BergerCertificate,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizeStage {
    #[serde(flatten)]
    pub report: RealizationReport,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeStage {
    #[serde(flatten)]
    pub span: Option<SpanReport>,
    pub singular_value_gap: Option<f64>,
    pub max_metric_defect: Option<f64>,
    pub max_nabla_l_residual: Option<f64>,
    pub error: Option<String>,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageResults {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub canonical: Option<CanonicalStage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub berger: Option<BergerStage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub realize: Option<RealizeStage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeStage>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub spec: serde_json::Value,
    pub n: usize,
    /// Block sizes, eigenvalues separated by `|`.
    pub partition: String,
    pub signs: String,
    pub stages_requested: Vec<Stage>,
    pub stages: StageResults,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

fn partition_and_signs(spec: &PencilSpec) -> (String, String) {
    let parts: Vec<(String, String)> = spec
        .eigens()
        .iter()
        .map(|e| {
            let sizes: Vec<String> = e.blocks().iter().map(|b| b.size.to_string()).collect();
            let signs: String = e.blocks().iter().map(|b| b.sign.symbol()).collect();
            (sizes.join(","), signs)
        })
        .collect();
    let (p, s): (Vec<_>, Vec<_>) = parts.into_iter().unzip();
    (p.join("|"), s.join("|"))
}

/// Intermediate objects shared between stages.
struct Context {
    pair: CanonicalPair,
    formal: Option<CurvatureMap>,
    gl: Option<SubspaceBasis>,
    metric: Option<QuadraticMetric>,
}

impl Context {
    fn formal(&mut self) -> &CurvatureMap {
        self.formal.get_or_insert_with(|| r_formal(&self.pair))
    }

    fn gl(&mut self) -> &SubspaceBasis {
        self.gl.get_or_insert_with(|| centralizer_basis(&self.pair))
    }
}

/// Runs the requested stages in pipeline order. Returns the report and the
/// realized metric when one was built.
pub fn verify_spec(name: &str, spec: &PencilSpec, config: &RunConfig) -> (Report, Option<QuadraticMetric>) {
    let mut ctx = Context { pair: build_canonical(spec), formal: None, gl: None, metric: None };
    let mut results = StageResults::default();
    let mut timings = BTreeMap::new();
    let mut stages = config.stages.clone();
    stages.sort();
    stages.dedup();
    for &stage in &stages {
        let clock = Instant::now();
        match stage {
            Stage::Canonical => {
                let validation = validate_pair(&ctx.pair.g, &ctx.pair.l).expect("canonical matrices are square");
                results.canonical =
                    Some(CanonicalStage { dim: ctx.pair.dim(), validation, passed: validation.passed() });
            }
            Stage::Berger => results.berger = Some(berger_stage(&mut ctx)),
            Stage::Realize => {
                let (b, qm) = realize(&ctx.pair);
                let formal = ctx.formal().clone();
                let report = verify_metric(&ctx.pair, &b, &qm, &formal);
                ctx.metric = Some(qm);
                results.realize = Some(RealizeStage { passed: report.passed(), report });
            }
            Stage::Probe => results.probe = Some(probe_stage(&mut ctx, config)),
        }
        timings.insert(stage.name().to_string(), clock.elapsed().as_secs_f64() * 1e3);
    }
    let passed = results.canonical.as_ref().is_none_or(|s| s.passed)
        && results.berger.as_ref().is_none_or(|s| s.passed)
        && results.realize.as_ref().is_none_or(|s| s.passed)
        && results.probe.as_ref().is_none_or(|s| s.passed);
    let (partition, signs) = partition_and_signs(spec);
    let report = Report {
        name: name.to_string(),
        spec: serde_json::from_str(&spec.to_json()).expect("spec serializes to JSON"),
        n: spec.dim(),
        partition,
        signs,
        stages_requested: stages,
        stages: results,
        passed,
        timings_ms: config.timings.then_some(timings),
    };
    (report, ctx.metric)
}

fn berger_stage(ctx: &mut Context) -> BergerStage {
    let formal = ctx.formal().clone();
    let gl = ctx.gl().clone();
    let bianchi = check_bianchi(&formal);
    let sectional = check_sectional(&formal);
    let certificate = certificate_for(&ctx.pair, &formal, &gl);
    let dim_gl_formula = centralizer_dim_formula(&ctx.pair);
    let passed = bianchi.ok
        && sectional.ok
        && certificate.passed()
        && certificate.image_rank == gl.len()
        && dim_gl_formula == gl.len();
    BergerStage {
        dim_gl: gl.len(),
        dim_gl_formula,
        image_rank: certificate.image_rank,
        bianchi_ok: bianchi.ok,
        bianchi_witness: bianchi.witness,
        sectional_ok: sectional.ok,
        certificate,
        passed,
    }
}

fn probe_stage(ctx: &mut Context, config: &RunConfig) -> ProbeStage {
    if ctx.metric.is_none() {
        ctx.metric = Some(realize(&ctx.pair).1);
    }
    let gl = ctx.gl().clone();
    let qm = ctx.metric.as_ref().expect("metric built above");
    let loops = standard_loop_family(ctx.pair.dim(), config.seed);
    let float = FloatMetric::new(qm);
    let l = to_dmatrix(&ctx.pair.l);
    let nabla =
        loops.iter().map(|lp| nabla_l_residual(&float, &l, &lp.basepoint)).try_fold(0.0f64, |m, r| r.map(|v| m.max(v)));
    match (holonomy_span(qm, &gl, &loops, &config.tolerances), nabla) {
        (Ok(span), Ok(nabla)) => ProbeStage {
            singular_value_gap: span.gap,
            max_metric_defect: Some(span.max_metric_defect),
            max_nabla_l_residual: Some(nabla),
            error: None,
            passed: span.passed,
            span: Some(span),
        },
        (Err(e), _) | (_, Err(e)) => ProbeStage {
            span: None,
            singular_value_gap: None,
            max_metric_defect: None,
            max_nabla_l_residual: None,
            error: Some(e.to_string()),
            passed: false,
        },
    }
}

/// Result of verifying one input file.
#[derive(Debug)]
pub struct FileResult {
    pub path: PathBuf,
    pub outcome: Outcome,
    pub report: Option<Report>,
    pub error: Option<String>,
    pub metric: Option<QuadraticMetric>,
}

fn name_of(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "spec".into())
}

pub fn verify_file(path: &Path, config: &RunConfig) -> FileResult {
    let parsed = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))
        .and_then(|text| PencilSpec::from_json(&text).map_err(|e| format!("{}: {e}", path.display())));
    match parsed {
        Ok(spec) => {
            let (report, metric) = verify_spec(&name_of(path), &spec, config);
            FileResult {
                path: path.to_path_buf(),
                outcome: Outcome::from_pass(report.passed),
                report: Some(report),
                error: None,
                metric,
            }
        }
        Err(error) => FileResult {
            path: path.to_path_buf(),
            outcome: Outcome::InputError,
            report: None,
            error: Some(error),
            metric: None,
        },
    }
}

/// Spec files in a directory, sorted by name.
pub fn spec_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

pub fn report_json(report: &Report) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}

/// `verify`: one spec file, or every `*.json` in a directory (in parallel).
/// With a directory, `--out` and `--metric-out` name output directories.
pub fn cmd_verify(config: &RunConfig) -> (Outcome, Vec<FileResult>) {
    if let Err(e) = config.validate() {
        eprintln!("error: {e}");
        return (Outcome::InputError, Vec::new());
    }
    let batch = config.input.is_dir();
    let files = if batch {
        match spec_files(&config.input) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("error: cannot list {}: {e}", config.input.display());
                return (Outcome::InputError, Vec::new());
            }
        }
    } else {
        vec![config.input.clone()]
    };
    let results: Vec<FileResult> = files.par_iter().map(|p| verify_file(p, config)).collect();
    let mut outcome = Outcome::Pass;
    for result in &results {
        outcome = outcome.max(result.outcome);
        if let Some(e) = &result.error {
            eprintln!("error: {e}");
        }
        if let Err(e) = emit(result, config, batch) {
            eprintln!("error: {e}");
            outcome = Outcome::InputError;
        }
    }
    (outcome, results)
}

fn emit(result: &FileResult, config: &RunConfig, batch: bool) -> std::io::Result<()> {
    let Some(report) = &result.report else { return Ok(()) };
    let json = report_json(report);
    let target = |base: &Option<PathBuf>| {
        base.as_ref().map(|b| if batch { b.join(format!("{}.json", report.name)) } else { b.clone() })
    };
    match target(&config.out) {
        Some(path) => write_atomic(&path, json.as_bytes())?,
        None if !batch => print!("{json}"),
        None => {}
    }
    if let (Some(path), Some(metric)) = (target(&config.metric_out), &result.metric) {
        let mut text = serde_json::to_string_pretty(&metric.to_export()).expect("metric serializes");
        text.push('\n');
        write_atomic(&path, text.as_bytes())?;
    }
    if batch || config.out.is_some() {
        println!("{} {}", if report.passed { "PASS" } else { "FAIL" }, report.name);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stages_parse_sorted_and_deduplicated() {
        assert_eq!(parse_stages("probe,canonical,probe").unwrap(), vec![Stage::Canonical, Stage::Probe]);
        assert!(parse_stages("").is_err());
        assert!(parse_stages("canonical,curvature").is_err());
    }

    #[test]
    fn overall_verdict_is_conjunction() {
        let spec = PencilSpec::nilpotent(&[(1, 1), (2, -1)]).unwrap();
        let mut config = RunConfig::new("unused");
        config.stages = vec![Stage::Berger, Stage::Realize];
        let (mut report, metric) = verify_spec("x", &spec, &config);
        assert!(report.passed && metric.is_some());
        assert_eq!(report.partition, "1,2");
        assert_eq!(report.signs, "+-");
        assert!(report.timings_ms.is_none());
        report.stages.realize.as_mut().unwrap().passed = false;
        let text = report_json(&report);
        let back: Report = serde_json::from_str(&text).unwrap();
        assert!(!back.stages.realize.unwrap().passed);
    }

    #[test]
    fn tolerances_must_be_positive() {
        let mut config = RunConfig::new("unused");
        config.tolerances.rank_threshold = 0.0;
        assert!(config.validate().is_err());
    }
}
