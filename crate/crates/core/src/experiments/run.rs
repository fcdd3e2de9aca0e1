use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::estimators::*;
use super::{EstimateReport, ExperimentSpec};
use crate::env::EdgeConfig;
use crate::error::{Error, Result};
use crate::genealogy::build_forest;
use crate::kuczek::{break_points, walk};
use crate::paths::rightmost_path;

/// What a run produced.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub reports: Vec<EstimateReport>,
    /// Written files, in write order.
    pub files: Vec<PathBuf>,
}

/// Run `spec` into `spec.out`.
pub fn run(spec: &ExperimentSpec) -> Result<RunOutput> {
    let out = spec.out.clone().ok_or_else(|| Error::Validation {
        field: "out".into(),
        msg: "no output directory".into(),
    })?;
    run_to(spec, &out)
}

/// Run `spec` into `dir`. Everything is computed before the first write; if
/// writing fails halfway, the files already written are removed again.
pub fn run_to(spec: &ExperimentSpec, dir: &Path) -> Result<RunOutput> {
    spec.validate()?;
    let (reports, dumps) = execute(spec)?;
    let mut files: Vec<(String, String)> = dumps;
    if !reports.is_empty() {
        files.push((format!("{}.csv", spec.experiment), table_csv(&reports)));
        files.push((format!("{}_long.csv", spec.experiment), long_csv(&reports)));
    }
    let names: Vec<String> = files.iter().map(|(n, _)| n.clone()).collect();
    files.push(("manifest.json".into(), manifest(spec, &names)));

    let created = !dir.exists();
    let mut written = Vec::new();
    let result = (|| -> Result<()> {
        fs::create_dir_all(dir)?;
        for (name, body) in &files {
            let path = dir.join(name);
            fs::write(&path, body)?;
            written.push(path);
        }
        Ok(())
    })();
    if let Err(e) = result {
        for f in &written {
            let _ = fs::remove_file(f);
        }
        if created {
            let _ = fs::remove_dir(dir);
        }
        return Err(e);
    }
    Ok(RunOutput {
        reports,
        files: written,
    })
}

type Dumps = Vec<(String, String)>;

fn execute(spec: &ExperimentSpec) -> Result<(Vec<EstimateReport>, Dumps)> {
    let s = spec;
    let mut reports = Vec::new();
    let cells = || s.p.iter().flat_map(|&p| s.n.iter().map(move |&n| (p, n)));
    match s.experiment.as_str() {
        "theta" => {
            for (p, n) in cells() {
                reports.push(estimate_theta(p, n, s.samples, s.seed)?);
            }
        }
        "alpha" => {
            for (p, n) in cells() {
                reports.push(estimate_alpha_sigma(
                    p,
                    n,
                    s.margin,
                    s.samples,
                    s.seed,
                    s.bootstrap,
                )?);
            }
        }
        "clt" => {
            for (p, n) in cells() {
                reports.push(clt_diagnostic(p, n, s.margin, s.samples, s.seed)?);
            }
        }
        "coalescence" => {
            for &p in &s.p {
                reports.extend(coalescence_curve(
                    p, &s.dx, &s.n, s.margin, s.samples, s.seed,
                )?);
            }
        }
        "symmdiff" => {
            for &p in &s.p {
                reports.extend(symm_diff_stabilization(
                    p,
                    s.u1()?,
                    s.u2()?,
                    &s.n,
                    s.samples,
                    s.seed,
                )?);
            }
        }
        "kuczek" => {
            for (p, n) in cells() {
                reports.push(kuczek_iid(p, n, s.margin, s.samples, s.seed)?);
            }
        }
        "meeting" => {
            for (p, n) in cells() {
                reports.push(meeting_agreement(p, n, s.margin, &s.dx, s.samples, s.seed)?);
            }
        }
        "branches" => {
            for &p in &s.p {
                reports.extend(branch_stability(p, s.window()?, &s.n, s.samples, s.seed)?);
            }
        }
        "succession" => {
            for (p, n) in cells() {
                reports.push(succession_check(p, s.window()?, n, s.samples, s.seed)?);
            }
        }
        "crossing" => {
            for &p in &s.p {
                let alpha = match s.alpha {
                    Some(a) => a,
                    None => {
                        let top = *s.n.last().unwrap();
                        let est =
                            estimate_alpha_sigma(p, top, s.margin, s.samples, s.seed, s.bootstrap)?;
                        reports.push(est.clone());
                        est.estimate.unwrap()
                    }
                };
                reports.extend(crossing_growth(
                    p, alpha, &s.n, s.margin, s.samples, s.seed,
                )?);
            }
        }
        "monotone" => {
            for &n in &s.n {
                reports.push(monotone_coupling(&s.p, n, s.samples, s.seed)?);
            }
        }
        _ => return Ok((reports, dump(s)?)),
    }
    Ok((reports, Vec::new()))
}

/// Single-configuration dumps. They use `seed` as the environment seed
/// directly and the first `p` and `N`.
fn dump(s: &ExperimentSpec) -> Result<Dumps> {
    let cfg = EdgeConfig::new(s.seed, s.p[0]);
    let n = s.n[0];
    let u = s.u1()?;
    Ok(match s.experiment.as_str() {
        "snapshot" => vec![("snapshot.txt".into(), cfg.snapshot(s.window()?).to_text())],
        "path" => vec![(
            "path.txt".into(),
            format!("{}\n", rightmost_path(u, n, &cfg)?),
        )],
        "breaks" => vec![(
            "breaks.csv".into(),
            break_points(u, &cfg, n, s.margin_at(n))?.to_csv(),
        )],
        "walk" => vec![(
            "walk.csv".into(),
            walk(u, &cfg, n, s.margin_at(n))?.to_csv(),
        )],
        "forest" => {
            let f = build_forest(s.window()?, n, &cfg)?;
            let mut lines = String::from("component,position,x,t\n");
            for (c, comp) in f.components().iter().enumerate() {
                for (k, v) in f.line_from_root(comp.root)?.iter().enumerate() {
                    writeln!(lines, "{c},{k},{},{}", v.x(), v.t()).unwrap();
                }
            }
            vec![
                ("forest.csv".into(), f.to_edge_list()),
                ("succession.csv".into(), lines),
            ]
        }
        other => return Err(Error::UnknownExperiment(other.into())),
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// One row per report; diagnostics become columns, blank where absent.
pub(crate) fn table_csv(reports: &[EstimateReport]) -> String {
    let keys: BTreeSet<&str> = reports
        .iter()
        .flat_map(|r| r.diagnostics.keys().map(String::as_str))
        .collect();
    let mut out = String::from("experiment,label,p,N,samples,used,estimate,se");
    for k in &keys {
        write!(out, ",{k}").unwrap();
    }
    out.push('\n');
    for r in reports {
        write!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.experiment,
            r.label,
            r.p,
            r.n,
            r.samples,
            r.used,
            opt(r.estimate),
            opt(r.se)
        )
        .unwrap();
        for k in &keys {
            write!(out, ",{}", opt(r.diagnostics.get(*k).copied())).unwrap();
        }
        out.push('\n');
    }
    out
}

/// `experiment,label,p,N,metric,value`, one line per defined number.
pub(crate) fn long_csv(reports: &[EstimateReport]) -> String {
    let mut out = String::from("experiment,label,p,N,metric,value\n");
    for r in reports {
        let mut line = |metric: &str, v: f64| {
            writeln!(
                out,
                "{},{},{},{},{metric},{v}",
                r.experiment, r.label, r.p, r.n
            )
            .unwrap();
        };
        line("used", r.used as f64);
        if let Some(e) = r.estimate {
            line("estimate", e);
        }
        if let Some(se) = r.se {
            line("se", se);
        }
        for (k, v) in &r.diagnostics {
            line(k, *v);
        }
    }
    out
}

#[derive(Serialize)]
struct Manifest<'a> {
    experiment: &'a str,
    code_version: &'a str,
    seed_rule: &'a str,
    targets: &'a str,
    spec: &'a ExperimentSpec,
    files: &'a [String],
}

fn manifest(spec: &ExperimentSpec, files: &[String]) -> String {
    let m = Manifest {
        experiment: &spec.experiment,
        code_version: env!("CARGO_PKG_VERSION"),
        seed_rule: "sample i of experiment E uses EdgeConfig seed sample_seed(seed, E, i); dumps use seed directly",
        targets: "no reference values exist for these quantities; any thresholds are self-generated pilot fixtures",
        spec,
        files,
    };
    let mut s = serde_json::to_string_pretty(&m).expect("manifest serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::ExperimentSpec;

    fn spec(name: &str) -> ExperimentSpec {
        let mut s = ExperimentSpec::defaults(name);
        s.n = vec![20, 40];
        s.samples = 6;
        s.window = [-6, 6, 0, 12];
        s
    }

    #[test]
    fn reruns_are_byte_identical() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let s = spec("alpha");
        run_to(&s, a.path()).unwrap();
        run_to(&s, b.path()).unwrap();
        for f in ["alpha.csv", "alpha_long.csv", "manifest.json"] {
            assert_eq!(
                fs::read(a.path().join(f)).unwrap(),
                fs::read(b.path().join(f)).unwrap(),
                "{f}"
            );
        }
    }

    #[test]
    fn every_experiment_runs_small() {
        for name in crate::experiments::EXPERIMENTS {
            let dir = tempfile::tempdir().unwrap();
            let mut s = spec(name);
            if *name == "monotone" {
                s.p = vec![0.6, 0.8];
            }
            if *name == "meeting" {
                s.n = vec![40];
            }
            let out = run_to(&s, dir.path()).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(out.files.iter().all(|f| f.exists()), "{name}");
            assert!(dir.path().join("manifest.json").exists());
        }
    }

    #[test]
    fn failures_leave_nothing_behind() {
        let root = tempfile::tempdir().unwrap();
        let dir = root.path().join("out");
        let mut s = spec("alpha");
        s.p = vec![0.05];
        assert!(matches!(run_to(&s, &dir), Err(Error::InsufficientData(_))));
        assert!(!dir.exists());
        let mut s = spec("theta");
        s.n = vec![40, 20];
        assert!(matches!(run_to(&s, &dir), Err(Error::Validation { .. })));
        assert!(!dir.exists());
    }

    #[test]
    fn table_columns_are_the_union_of_diagnostics() {
        let mut a = EstimateReport::new("x", 0.5, 10, 3);
        a.diag("k1", 1.0);
        let mut b = EstimateReport::new("x", 0.5, 20, 3);
        b.diag("k2", 2.5);
        b.estimate = Some(0.25);
        let t = table_csv(&[a, b]);
        assert_eq!(
            t,
            "experiment,label,p,N,samples,used,estimate,se,k1,k2\n\
             x,,0.5,10,3,0,,,1,\n\
             x,,0.5,20,3,0,0.25,,,2.5\n"
        );
    }
}
