//! Projected-versus-original experiments: how often a sketch keeps the
//! verdict of a generated instance, and what it costs in wall-clock time.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bounds::DEFAULT_C;
use crate::error::{Error, Result};
use crate::gen::{generate, Distribution, GenSpec, Target};
use crate::projector::{apply_to_instance, ceil_tolerant, sample_projector, ProjectorFamily};
use crate::rng::{mix, mix3};
use crate::solver::{solve, Domain, SolverOptions, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Lp,
    Ip,
}

impl Mode {
    pub fn domain(self) -> Domain {
        match self {
            Mode::Lp => Domain::ContinuousNonneg,
            Mode::Ip => Domain::IntegerNonneg,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Lp => "lp",
            Mode::Ip => "ip",
        }
    }
}

/// Either an explicit projected dimension or the rule
/// `k = ceil(2 ln n / (C eps^2))`, clamped to `m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KRule {
    Fixed(usize),
    Jll {
        eps: f64,
        #[serde(rename = "C", default = "default_c")]
        c: f64,
    },
}

fn default_c() -> f64 {
    DEFAULT_C
}

impl Default for KRule {
    fn default() -> Self {
        KRule::Jll { eps: 0.15, c: DEFAULT_C }
    }
}

impl KRule {
    pub fn resolve(self, m: usize, n: usize) -> Result<usize> {
        match self {
            KRule::Fixed(k) if k >= 1 && k <= m => Ok(k),
            KRule::Fixed(k) => Err(Error::usage(format!("k = {k} must lie in [1, m = {m}]"))),
            KRule::Jll { eps, c } => {
                if !(eps > 0.0 && eps < 1.0) || !(c > 0.0) {
                    return Err(Error::usage("k rule needs eps in (0, 1) and C > 0"));
                }
                let k = ceil_tolerant(2.0 * (n as f64).ln() / (c * eps * eps)).max(1);
                Ok(k.min(m))
            }
        }
    }
}

fn default_instances() -> usize {
    10
}

fn default_projectors() -> usize {
    100
}

fn default_target() -> Target {
    Target::Infeasible
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dist: Distribution,
    pub m: usize,
    pub n: usize,
    pub mode: Mode,
    #[serde(default)]
    pub k: KRule,
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default = "default_projectors")]
    pub projectors_per_instance: usize,
    #[serde(default)]
    pub family: ProjectorFamily,
    #[serde(default)]
    pub master_seed: u64,
    /// Label of the generated instances; accuracy is agreement with it.
    #[serde(default = "default_target")]
    pub target: Target,
}

impl ExperimentConfig {
    pub fn new(dist: Distribution, m: usize, n: usize, mode: Mode, k: usize) -> Self {
        ExperimentConfig {
            dist,
            m,
            n,
            mode,
            k: KRule::Fixed(k),
            instances: default_instances(),
            projectors_per_instance: default_projectors(),
            family: ProjectorFamily::default(),
            master_seed: 0,
            target: Target::Infeasible,
        }
    }

    pub fn validate(&self) -> Result<usize> {
        if self.m == 0 || self.n == 0 || self.instances == 0 || self.projectors_per_instance == 0 {
            return Err(Error::usage("experiment counts must be at least 1"));
        }
        self.k.resolve(self.m, self.n)
    }
}

/// A file holding one experiment or `{"experiments": [...]}`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum BenchConfig {
    Many { experiments: Vec<ExperimentConfig> },
    One(ExperimentConfig),
}

impl BenchConfig {
    pub fn from_json(text: &str) -> Result<Vec<ExperimentConfig>> {
        let cfg: BenchConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
            field: "<config>".into(),
            reason: e.to_string(),
        })?;
        Ok(match cfg {
            BenchConfig::Many { experiments } => experiments,
            BenchConfig::One(e) => vec![e],
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub instance_id: usize,
    pub projector_id: usize,
    pub original_status: Status,
    pub projected_status: Status,
    pub original_time: f64,
    /// Includes `projection_time`.
    pub projected_time: f64,
    pub projection_time: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub dist: Distribution,
    pub mode: Mode,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub instances: usize,
    pub projectors: usize,
    pub accuracy_pct: f64,
    pub avg_orig_s: f64,
    pub avg_proj_s: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

pub struct ExperimentResult {
    pub records: Vec<TrialRecord>,
    pub report: Report,
}

fn context(e: Error, instance: usize, projector: Option<usize>) -> Error {
    let at = match projector {
        Some(j) => format!("instance {instance}, projector {j}"),
        None => format!("instance {instance}"),
    };
    Error::Trial {
        at,
        source: Box::new(e),
    }
}

/// Generate `instances` instances (seed `mix(master_seed, i)`), solve each
/// once, then solve `projectors_per_instance` sketches of it (projector seed
/// `mix3(master_seed, i, j)`).
pub fn run_experiment(cfg: &ExperimentConfig, opts: &SolverOptions) -> Result<ExperimentResult> {
    let k = cfg.validate()?;
    let expected = match cfg.target {
        Target::Feasible => Status::Feasible,
        Target::Infeasible => Status::Infeasible,
    };
    let mut records = Vec::with_capacity(cfg.instances * cfg.projectors_per_instance);
    let mut orig_total = 0.0;
    for i in 0..cfg.instances {
        let spec = GenSpec {
            domain: cfg.mode.domain(),
            ..GenSpec::new(cfg.dist, cfg.m, cfg.n, cfg.target, mix(cfg.master_seed, i as u64))
        };
        let inst = generate(&spec).map_err(|e| context(e, i, None))?.instance;
        let start = Instant::now();
        let original = solve(&inst, opts).map_err(|e| context(e, i, None))?;
        let original_time = start.elapsed().as_secs_f64();
        orig_total += original_time;
        for j in 0..cfg.projectors_per_instance {
            let seed = mix3(cfg.master_seed, i as u64, j as u64);
            let t = sample_projector(cfg.family, k, cfg.m, seed).map_err(|e| context(e, i, Some(j)))?;
            let start = Instant::now();
            let projected = apply_to_instance(&t, &inst).map_err(|e| context(e, i, Some(j)))?;
            let projection_time = start.elapsed().as_secs_f64();
            let start = Instant::now();
            let verdict = solve(&projected, opts).map_err(|e| context(e, i, Some(j)))?;
            let solve_time = start.elapsed().as_secs_f64();
            records.push(TrialRecord {
                instance_id: i,
                projector_id: j,
                original_status: original.status,
                projected_status: verdict.status,
                original_time,
                projected_time: projection_time + solve_time,
                projection_time,
            });
        }
    }
    let trials = records.len() as f64;
    let agree = records.iter().filter(|r| r.projected_status == expected).count() as f64;
    let row = ReportRow {
        dist: cfg.dist,
        mode: cfg.mode,
        m: cfg.m,
        n: cfg.n,
        k,
        instances: cfg.instances,
        projectors: cfg.projectors_per_instance,
        accuracy_pct: 100.0 * agree / trials,
        avg_orig_s: orig_total / cfg.instances as f64,
        avg_proj_s: records.iter().map(|r| r.projected_time).sum::<f64>() / trials,
    };
    Ok(ExperimentResult {
        records,
        report: Report { rows: vec![row] },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::usage(format!("unknown report format `{other}`"))),
        }
    }
}

pub const CSV_HEADER: [&str; 10] = [
    "dist",
    "mode",
    "m",
    "n",
    "k",
    "instances",
    "projectors",
    "accuracy_pct",
    "avg_orig_s",
    "avg_proj_s",
];

pub fn emit_report(report: &Report, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => emit_csv(report),
        ReportFormat::Markdown => emit_markdown(report),
    }
}

fn emit_csv(report: &Report) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for row in &report.rows {
        w.serialize(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

/// One line per `(mode, m, n, k)`, LP lines first; each distribution present
/// gets an `Acc. / Orig. / Proj.` column triple.
fn emit_markdown(report: &Report) -> String {
    let dists: Vec<Distribution> = Distribution::ALL
        .into_iter()
        .filter(|d| report.rows.iter().any(|r| r.dist == *d))
        .collect();
    let mut lines: BTreeMap<(Mode, usize, usize, usize), BTreeMap<usize, &ReportRow>> = BTreeMap::new();
    for row in &report.rows {
        let slot = dists.iter().position(|d| *d == row.dist).expect("listed");
        lines.entry((row.mode, row.m, row.n, row.k)).or_default().insert(slot, row);
    }
    let mut out = String::from("| mode | m | n | k |");
    for d in &dists {
        out.push_str(&format!(" {d} Acc. | {d} Orig. | {d} Proj. |"));
    }
    out.push_str("\n|---|---:|---:|---:|");
    out.push_str(&"---:|---:|---:|".repeat(dists.len()));
    out.push('\n');
    for ((mode, m, n, k), cells) in &lines {
        out.push_str(&format!("| {} | {m} | {n} | {k} |", mode.name().to_uppercase()));
        for slot in 0..dists.len() {
            match cells.get(&slot) {
                Some(r) => out.push_str(&format!(
                    " {:.1}% | {:.4}s | {:.4}s |",
                    r.accuracy_pct, r.avg_orig_s, r.avg_proj_s
                )),
                None => out.push_str(" - | - | - |"),
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(target: Target) -> ExperimentConfig {
        ExperimentConfig {
            instances: 2,
            projectors_per_instance: 5,
            target,
            master_seed: 9,
            ..ExperimentConfig::new(Distribution::Uniform, 20, 40, Mode::Lp, 8)
        }
    }

    #[test]
    fn single_trial() {
        let cfg = ExperimentConfig {
            instances: 1,
            projectors_per_instance: 1,
            ..small(Target::Infeasible)
        };
        let res = run_experiment(&cfg, &SolverOptions::default()).unwrap();
        assert_eq!(res.records.len(), 1);
        assert_eq!(res.report.rows.len(), 1);
    }

    #[test]
    fn feasible_direction_is_exact() {
        let res = run_experiment(&small(Target::Feasible), &SolverOptions::default()).unwrap();
        assert_eq!(res.report.rows[0].accuracy_pct, 100.0);
        assert!(res.records.iter().all(|r| r.projected_time >= r.projection_time && r.projection_time >= 0.0));
    }

    #[test]
    fn statuses_are_reproducible() {
        let a = run_experiment(&small(Target::Infeasible), &SolverOptions::default()).unwrap();
        let b = run_experiment(&small(Target::Infeasible), &SolverOptions::default()).unwrap();
        let statuses = |r: &ExperimentResult| r.records.iter().map(|t| t.projected_status).collect::<Vec<_>>();
        assert_eq!(statuses(&a), statuses(&b));
        assert_eq!(a.report.rows[0].accuracy_pct, b.report.rows[0].accuracy_pct);
    }

    #[test]
    fn k_rule() {
        assert_eq!(KRule::Fixed(5).resolve(10, 20).unwrap(), 5);
        assert!(KRule::Fixed(11).resolve(10, 20).is_err());
        assert!(KRule::Fixed(0).resolve(10, 20).is_err());
        let k = KRule::Jll { eps: 0.5, c: 1.0 }.resolve(1000, 100).unwrap();
        assert_eq!(k, (2.0 * 100f64.ln() / 0.25).ceil() as usize);
        assert_eq!(KRule::default().resolve(30, 100).unwrap(), 30);
    }

    #[test]
    fn empty_report_is_header_only() {
        let text = emit_report(&Report::default(), ReportFormat::Csv);
        assert_eq!(text, "dist,mode,m,n,k,instances,projectors,accuracy_pct,avg_orig_s,avg_proj_s\n");
    }

    #[test]
    fn csv_row_round_trips() {
        let row = ReportRow {
            dist: Distribution::Gamma,
            mode: Mode::Ip,
            m: 6,
            n: 9,
            k: 3,
            instances: 10,
            projectors: 100,
            accuracy_pct: 97.3,
            avg_orig_s: 0.125,
            avg_proj_s: 1.5e-5,
        };
        let text = emit_report(&Report { rows: vec![row.clone()] }, ReportFormat::Csv);
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let parsed: Vec<ReportRow> = rdr.deserialize().collect::<std::result::Result<_, _>>().unwrap();
        assert_eq!(parsed, vec![row]);
    }

    #[test]
    fn markdown_groups_by_distribution() {
        let row = |dist, mode, m| ReportRow {
            dist,
            mode,
            m,
            n: 1000,
            k: 60,
            instances: 10,
            projectors: 100,
            accuracy_pct: 99.5,
            avg_orig_s: 1.0,
            avg_proj_s: 0.1,
        };
        let report = Report {
            rows: vec![
                row(Distribution::Gamma, Mode::Ip, 600),
                row(Distribution::Uniform, Mode::Lp, 600),
                row(Distribution::Exponential, Mode::Lp, 600),
                row(Distribution::Gamma, Mode::Lp, 600),
                row(Distribution::Uniform, Mode::Lp, 700),
            ],
        };
        let md = emit_report(&report, ReportFormat::Markdown);
        let lines: Vec<&str> = md.lines().collect();
        assert!(lines[0].contains("uniform Acc.") && lines[0].find("uniform").unwrap() < lines[0].find("exp").unwrap());
        assert!(lines[0].find("exp").unwrap() < lines[0].find("gamma").unwrap());
        assert_eq!(lines.len(), 5);
        assert!(lines[2].starts_with("| LP | 600"));
        assert!(lines[3].starts_with("| LP | 700") && lines[3].contains(" - | - | - |"));
        assert!(lines[4].starts_with("| IP | 600"));
    }

    #[test]
    fn config_files() {
        let one = r#"{"dist":"uniform","m":100,"n":200,"mode":"lp","k":50}"#;
        let cfgs = BenchConfig::from_json(one).unwrap();
        assert_eq!(cfgs[0].instances, 10);
        assert_eq!(cfgs[0].projectors_per_instance, 100);
        assert_eq!(cfgs[0].k, KRule::Fixed(50));
        let many = r#"{"experiments":[{"dist":"gamma","m":5,"n":9,"mode":"ip","k":{"eps":0.3}}]}"#;
        let cfgs = BenchConfig::from_json(many).unwrap();
        assert_eq!(cfgs[0].k, KRule::Jll { eps: 0.3, c: DEFAULT_C });
        assert!(BenchConfig::from_json(r#"{"dist":"uniform"}"#).is_err());
    }
}
