use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{margin_for, sample_seed, EstimateReport};
use crate::env::EdgeConfig;
use crate::error::{Error, Result};
use crate::genealogy::build_forest;
use crate::kuczek::{
    break_points, crossing_points, paths_meet, right_edge_series, walks_meet, BreakRecord, MeetKind,
};
use crate::lattice::{Direction, Vertex, Window};
use crate::paths::{rightmost_path, PathRec};
use crate::reach::{anti_percolates_to, cluster, percolates_to, symmetric_difference_profile};
use crate::stats;

const ORIGIN: Vertex = Vertex::at(0, 0);

fn env(base: u64, name: &str, i: u64, p: f64) -> EdgeConfig {
    EdgeConfig::new(sample_seed(base, name, i), p)
}

fn check_samples(samples: usize) -> Result<()> {
    if samples == 0 {
        return Err(Error::Validation {
            field: "samples".into(),
            msg: "need at least one sample".into(),
        });
    }
    Ok(())
}

/// `Ok(None)` for an origin that does not survive, so callers can condition
/// on survival.
fn surviving<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::NoPath(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn fraction(k: usize, n: usize) -> Option<f64> {
    (n > 0).then(|| k as f64 / n as f64)
}

/// Fraction of seeds whose origin percolates to level `n`.
pub fn estimate_theta(p: f64, n: i64, samples: usize, seed: u64) -> Result<EstimateReport> {
    check_samples(samples)?;
    let hits = (0..samples as u64)
        .into_par_iter()
        .map(|i| percolates_to(ORIGIN, n, &env(seed, "theta", i, p)))
        .collect::<Result<Vec<bool>>>()?;
    let k = hits.iter().filter(|&&h| h).count();
    let theta = k as f64 / samples as f64;
    let mut r = EstimateReport::new("theta", p, n, samples);
    r.used = samples;
    r.estimate = Some(theta);
    r.se = Some(stats::binomial_se(theta, samples));
    r.diag("hits", k as f64);
    Ok(r)
}

struct Renewal {
    alpha: f64,
    sigma2: f64,
    mean_x: f64,
    mean_tau: f64,
}

fn renewal(units: &[&[BreakRecord]]) -> Option<Renewal> {
    let (mut sx, mut st, mut count) = (0i64, 0i64, 0usize);
    for r in units.iter().flat_map(|u| u.iter()) {
        sx += r.x;
        st += r.tau;
        count += 1;
    }
    if count == 0 {
        return None;
    }
    let mean_x = sx as f64 / count as f64;
    let mean_tau = st as f64 / count as f64;
    let sigma2 = units
        .iter()
        .flat_map(|u| u.iter())
        .map(|r| (r.x as f64 * mean_tau - r.tau as f64 * mean_x).powi(2))
        .sum::<f64>()
        / count as f64;
    Some(Renewal {
        alpha: sx as f64 / st as f64,
        sigma2,
        mean_x,
        mean_tau,
    })
}

/// Pooled speed `sum X / sum tau` and the renewal variance
/// `E(X E tau - tau E X)^2` from the break records of surviving seeds, with
/// bootstrap errors over seeds.
pub fn estimate_alpha_sigma(
    p: f64,
    n: i64,
    margin: Option<i64>,
    samples: usize,
    seed: u64,
    bootstrap: usize,
) -> Result<EstimateReport> {
    check_samples(samples)?;
    let m = margin_for(n, margin);
    let series = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            surviving(break_points(ORIGIN, &env(seed, "alpha", i, p), n, m).map(|s| s.records))
        })
        .collect::<Result<Vec<_>>>()?;
    let units: Vec<&[BreakRecord]> = series.iter().flatten().map(|s| s.as_slice()).collect();
    let all = renewal(&units)
        .ok_or_else(|| Error::InsufficientData(format!("no break records at p={p}, N={n}")))?;
    let resampled = |idx: &[usize]| renewal(&idx.iter().map(|&i| units[i]).collect::<Vec<_>>());
    let boot_seed = sample_seed(seed, "alpha-bootstrap", 0);
    let alpha_se = stats::bootstrap_se(units.len(), bootstrap, boot_seed, |idx| {
        resampled(idx).map_or(f64::NAN, |r| r.alpha)
    });
    let sigma_se = stats::bootstrap_se(units.len(), bootstrap, boot_seed, |idx| {
        resampled(idx).map_or(f64::NAN, |r| r.sigma2)
    });

    let mut r = EstimateReport::new("alpha", p, n, samples);
    r.used = units.len();
    r.estimate = Some(all.alpha);
    r.se = alpha_se;
    r.diag(
        "records",
        units.iter().map(|u| u.len()).sum::<usize>() as f64,
    );
    r.diag("mean_x", all.mean_x);
    r.diag("mean_tau", all.mean_tau);
    r.diag("sigma2", all.sigma2);
    if let Some(se) = sigma_se {
        r.diag("sigma2_se", se);
    }
    // the two readings of the CLT variance per unit level
    r.diag("clt_var_over_tau", all.sigma2 / all.mean_tau);
    r.diag("clt_var_over_tau3", all.sigma2 / all.mean_tau.powi(3));
    Ok(r)
}

/// Kolmogorov-Smirnov distance of the sample-standardized `gamma(n)` over the
/// first `samples` surviving seeds.
pub fn clt_diagnostic(
    p: f64,
    n: i64,
    margin: Option<i64>,
    samples: usize,
    seed: u64,
) -> Result<EstimateReport> {
    check_samples(samples)?;
    let m = margin_for(n, margin);
    let cap = 20 * samples as u64;
    let mut values = Vec::with_capacity(samples);
    let mut next = 0u64;
    let mut tried = 0u64;
    while values.len() < samples && next < cap {
        let batch = ((samples - values.len()) as u64).max(16).min(cap - next);
        let chunk = (next..next + batch)
            .into_par_iter()
            .map(|i| {
                let path = surviving(rightmost_path(ORIGIN, n + m, &env(seed, "clt", i, p)))?;
                Ok(path.map(|path| path.column_at(n).expect("path spans level n")))
            })
            .collect::<Result<Vec<Option<i64>>>>()?;
        for (k, c) in chunk.into_iter().enumerate() {
            if let Some(c) = c {
                if values.len() < samples {
                    values.push(c as f64);
                    tried = next + k as u64 + 1;
                }
            }
        }
        next += batch;
    }
    if values.len() < samples {
        return Err(Error::InsufficientData(format!(
            "{} survivors in {cap} seeds, wanted {samples}",
            values.len()
        )));
    }
    let mut r = EstimateReport::new("clt", p, n, samples);
    r.used = samples;
    r.diag("seeds_tried", tried as f64);
    r.diag("mean_over_n", stats::mean(&values).unwrap() / n as f64);
    r.diag("ks_critical_1pct", stats::ks_critical(samples, 0.01));
    match stats::standardize(&values) {
        Some(z) => {
            r.estimate = stats::ks_normal(&z);
            r.diag("var_over_n", stats::variance(&values).unwrap() / n as f64);
        }
        None => {
            r.diag("degenerate_variance", 1.0);
            r.diag("var_over_n", 0.0);
        }
    }
    Ok(r)
}

fn binomial_row(mut r: EstimateReport, hits: usize, certified: usize) -> EstimateReport {
    r.used = certified;
    r.estimate = fraction(hits, certified);
    r.se = r.estimate.map(|f| stats::binomial_se(f, certified));
    r.diag("hits", hits as f64);
    r.diag("certified", certified as f64);
    r
}

/// Fraction of certified pairs `(0,0), (dx,0)` whose right-most paths meet
/// below `N - margin`, per `dx` and pooled over `dx_list`, for each `N`.
///
/// Each `dx` gets its own seeds; the seeds are shared along the ladder.
pub fn coalescence_curve(
    p: f64,
    dx_list: &[i64],
    ladder: &[i64],
    margin: Option<i64>,
    samples: usize,
    seed: u64,
) -> Result<Vec<EstimateReport>> {
    check_samples(samples)?;
    let mut rows = Vec::new();
    for &n in ladder {
        let m = margin_for(n, margin);
        let jobs: Vec<(usize, u64)> = (0..dx_list.len())
            .flat_map(|j| (0..samples as u64).map(move |i| (j, i)))
            .collect();
        let outcomes = jobs
            .par_iter()
            .map(|&(j, i)| {
                let cfg = env(seed, "coalescence", i * dx_list.len() as u64 + j as u64, p);
                let u2 = Vertex::new(dx_list[j], 0)?;
                Ok(
                    surviving(paths_meet(ORIGIN, u2, &cfg, n, m, MeetKind::Right))?
                        .map(|v| v.is_some()),
                )
            })
            .collect::<Result<Vec<Option<bool>>>>()?;
        let (mut all_hits, mut all_cert) = (0, 0);
        for (j, &dx) in dx_list.iter().enumerate() {
            let cell = &outcomes[j * samples..(j + 1) * samples];
            let cert = cell.iter().flatten().count();
            let hits = cell.iter().flatten().filter(|&&b| b).count();
            all_hits += hits;
            all_cert += cert;
            let r =
                EstimateReport::new("coalescence", p, n, samples).with_label(format!("dx={dx}"));
            rows.push(binomial_row(r, hits, cert));
        }
        let r =
            EstimateReport::new("coalescence", p, n, samples * dx_list.len()).with_label("pooled");
        rows.push(binomial_row(r, all_hits, all_cert));
    }
    Ok(rows)
}

/// Size of `C_u1 Δ C_u2` up to each height of the ladder, over seeds where
/// both origins reach the top of the ladder.
pub fn symm_diff_stabilization(
    p: f64,
    u1: Vertex,
    u2: Vertex,
    ladder: &[i64],
    samples: usize,
    seed: u64,
) -> Result<Vec<EstimateReport>> {
    check_samples(samples)?;
    let top = *ladder
        .last()
        .ok_or_else(|| Error::Contract("empty ladder".into()))?;
    let sizes = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let cfg = env(seed, "symmdiff", i, p);
            if !(percolates_to(u1, top, &cfg)? && percolates_to(u2, top, &cfg)?) {
                return Ok(None);
            }
            let profile = symmetric_difference_profile(u1, u2, &cfg, top)?;
            let mut cum = Vec::with_capacity(profile.len());
            let mut acc = 0u64;
            for c in profile {
                acc += c;
                cum.push(acc);
            }
            Ok(Some(
                ladder
                    .iter()
                    .map(|&n| cum[n as usize])
                    .collect::<Vec<u64>>(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let certified: Vec<&Vec<u64>> = sizes.iter().flatten().collect();
    let mut rows = Vec::new();
    for (k, &n) in ladder.iter().enumerate() {
        let at: Vec<f64> = certified.iter().map(|s| s[k] as f64).collect();
        let mut r = EstimateReport::new("symmdiff", p, n, samples);
        r.used = at.len();
        r.estimate = stats::mean(&at);
        r.se = stats::std_error(&at);
        if let Some(med) = stats::median(&at) {
            r.diag("median_size", med);
        }
        if k > 0 && !certified.is_empty() {
            let same = certified.iter().filter(|s| s[k] == s[k - 1]).count();
            r.diag("stabilized", same as f64 / certified.len() as f64);
            let growth: Vec<f64> = certified
                .iter()
                .map(|s| (s[k] - s[k - 1]) as f64 / (n - ladder[k - 1]) as f64)
                .collect();
            r.diag("mean_growth_per_level", stats::mean(&growth).unwrap());
        }
        rows.push(r);
    }
    Ok(rows)
}

/// Independence checks on one long break-point series: the first surviving
/// seed among `samples`.
pub fn kuczek_iid(
    p: f64,
    n: i64,
    margin: Option<i64>,
    samples: usize,
    seed: u64,
) -> Result<EstimateReport> {
    check_samples(samples)?;
    let m = margin_for(n, margin);
    let mut found = None;
    for i in 0..samples as u64 {
        if let Some(s) = surviving(break_points(ORIGIN, &env(seed, "kuczek", i, p), n, m))? {
            found = Some((i, s));
            break;
        }
    }
    let (i, s) = found
        .ok_or_else(|| Error::InsufficientData(format!("no surviving seed among {samples}")))?;
    let xs: Vec<f64> = s.records.iter().map(|r| r.x as f64).collect();
    let ts: Vec<f64> = s.records.iter().map(|r| r.tau as f64).collect();
    if xs.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "{} break records",
            xs.len()
        )));
    }
    let mut r = EstimateReport::new("kuczek", p, n, samples);
    r.used = 1;
    r.estimate = Some(xs.iter().sum::<f64>() / ts.iter().sum::<f64>());
    r.diag("seed_index", i as f64);
    r.diag("records", xs.len() as f64);
    for (name, v) in [("x", &xs), ("tau", &ts)] {
        // constant series (p = 1) carry no correlation
        r.diag(
            &format!("ac1_{name}"),
            stats::autocorrelation(v, 1).unwrap_or(0.0),
        );
        let (a, b) = v.split_at(v.len() / 2);
        let (ma, mb) = (stats::mean(a).unwrap(), stats::mean(b).unwrap());
        let se =
            (stats::std_error(a).unwrap().powi(2) + stats::std_error(b).unwrap().powi(2)).sqrt();
        r.diag(&format!("half1_mean_{name}"), ma);
        r.diag(&format!("half2_mean_{name}"), mb);
        r.diag(&format!("split_se_{name}"), se);
        r.diag(
            &format!("split_z_{name}"),
            if se > 0.0 { (ma - mb).abs() / se } else { 0.0 },
        );
    }
    Ok(r)
}

/// Agreement between walk meeting and path meeting on certified pairs.
///
/// A pair is certified when both origins survive and the path verdict is the
/// same at margin `m` and `2m`, so the meeting, if any, is not in the last
/// stretch below the cutoff.
pub fn meeting_agreement(
    p: f64,
    n: i64,
    margin: Option<i64>,
    dx_list: &[i64],
    samples: usize,
    seed: u64,
) -> Result<EstimateReport> {
    check_samples(samples)?;
    if dx_list.is_empty() {
        return Err(Error::Contract("empty dx list".into()));
    }
    let m = margin_for(n, margin);
    if 2 * m >= n {
        return Err(Error::Contract(format!(
            "margin {m} leaves no room for the 2m check below {n}"
        )));
    }
    let outcomes = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let cfg = env(seed, "meeting", i, p);
            let u2 = Vertex::new(dx_list[i as usize % dx_list.len()], 0)?;
            let Some(strict) = surviving(paths_meet(ORIGIN, u2, &cfg, n, 2 * m, MeetKind::Right))?
            else {
                return Ok(None);
            };
            let loose = paths_meet(ORIGIN, u2, &cfg, n, m, MeetKind::Right)?;
            if strict.is_some() != loose.is_some() {
                return Ok(None);
            }
            let walks = walks_meet(ORIGIN, u2, &cfg, n, m)?;
            Ok(Some((loose.is_some(), walks.is_some())))
        })
        .collect::<Result<Vec<_>>>()?;
    let cert: Vec<(bool, bool)> = outcomes.into_iter().flatten().collect();
    let agree = cert.iter().filter(|(a, b)| a == b).count();
    let mut r = EstimateReport::new("meeting", p, n, samples);
    r.used = cert.len();
    r.estimate = fraction(agree, cert.len());
    r.diag("certified", cert.len() as f64);
    r.diag("agree", agree as f64);
    r.diag("disagree", (cert.len() - agree) as f64);
    r.diag("met", cert.iter().filter(|c| c.0).count() as f64);
    Ok(r)
}

/// Vertices whose branches are compared: members of the top forest in the
/// upper middle of the window that also have an anti-oriented path down to the
/// window floor, at most `per_seed`, evenly spread.
fn branch_sample(
    members: &[Vertex],
    window: Window,
    cfg: &EdgeConfig,
    per_seed: usize,
) -> Result<Vec<Vertex>> {
    let quarter = (window.x_max - window.x_min) / 4;
    let mid_t = (window.t_min + window.t_max) / 2;
    let mut pool = Vec::new();
    for &u in members {
        if u.t() < mid_t || u.x() < window.x_min + quarter || u.x() > window.x_max - quarter {
            continue;
        }
        if anti_percolates_to(u, u.t() - window.t_min, cfg)? {
            pool.push(u);
        }
    }
    if pool.len() <= per_seed {
        return Ok(pool);
    }
    Ok((0..per_seed)
        .map(|k| pool[k * pool.len() / per_seed])
        .collect())
}

/// For consecutive heights of the ladder: fraction of sampled vertices whose
/// untruncated branch has the same size at both heights.
pub fn branch_stability(
    p: f64,
    window: Window,
    ladder: &[i64],
    samples: usize,
    seed: u64,
) -> Result<Vec<EstimateReport>> {
    check_samples(samples)?;
    if window.t_max <= window.t_min {
        return Err(Error::Contract(
            "branch window needs at least two levels".into(),
        ));
    }
    const PER_SEED: usize = 16;
    // per seed, per sampled vertex: per height, untruncated branch size
    let per_seed = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let cfg = env(seed, "branches", i, p);
            let forests = ladder
                .iter()
                .map(|&n| build_forest(window, n, &cfg))
                .collect::<Result<Vec<_>>>()?;
            let top = forests.last().unwrap();
            let picks = branch_sample(top.vertices(), window, &cfg, PER_SEED)?;
            picks
                .iter()
                .map(|&u| {
                    forests
                        .iter()
                        .map(|f| {
                            if !f.contains(u) {
                                return Ok(None);
                            }
                            let b = f.branch(u)?;
                            Ok((!b.truncated).then_some(b.members.len()))
                        })
                        .collect::<Result<Vec<Option<usize>>>>()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let sampled: Vec<&Vec<Option<usize>>> = per_seed.iter().flatten().collect();
    let mut rows = Vec::new();
    for k in 1..ladder.len() {
        let pairs: Vec<(usize, usize)> = sampled
            .iter()
            .filter_map(|s| Some((s[k - 1]?, s[k]?)))
            .collect();
        let same = pairs.iter().filter(|(a, b)| a == b).count();
        let r = EstimateReport::new("branches", p, ladder[k], samples)
            .with_label(format!("vs N={}", ladder[k - 1]));
        let mut r = binomial_row(r, same, pairs.len());
        r.diag("sampled", sampled.len() as f64);
        let sizes: Vec<f64> = pairs.iter().map(|&(_, b)| b as f64).collect();
        if let Some(m) = stats::mean(&sizes) {
            r.diag("mean_branch_size", m);
        }
        rows.push(r);
    }
    Ok(rows)
}

/// Largest component whose comparator sort is checked; the sort costs a
/// common-ancestor search per comparison.
const SORT_CAP: usize = 400;

/// Succession-line checks on forests of `window` at height `n`.
///
/// Reports the fraction of successor steps undone by the predecessor, and in
/// diagnostics: components whose line matches the comparator sort, members of
/// the inner window (shrunk by a fifth of its height) seen exactly once on the
/// lines from the roots, and inner members with a defined successor.
pub fn succession_check(
    p: f64,
    window: Window,
    n: i64,
    samples: usize,
    seed: u64,
) -> Result<EstimateReport> {
    check_samples(samples)?;
    let s = (window.t_max - window.t_min) / 5;
    let inner = |v: Vertex| {
        v.x() >= window.x_min + s
            && v.x() <= window.x_max - s
            && v.t() >= window.t_min + s
            && v.t() <= window.t_max - s
    };
    let counts = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let f = build_forest(window, n, &env(seed, "succession", i, p))?;
            let mut c = [0usize; 8];
            for &u in f.vertices() {
                if let Some(next) = f.successor(u)? {
                    c[0] += 1;
                    c[1] += (f.predecessor(next)? == Some(u)) as usize;
                }
            }
            let mut seen: BTreeMap<Vertex, usize> = BTreeMap::new();
            for comp in f.components() {
                let line = f.line_from_root(comp.root)?;
                for &v in &line {
                    *seen.entry(v).or_default() += 1;
                }
                if comp.members.len() <= SORT_CAP {
                    let mut sorted = comp.members.clone();
                    let mut err = None;
                    sorted.sort_by(|&a, &b| {
                        if a == b {
                            return Ordering::Equal;
                        }
                        match f.precedes(a, b) {
                            Ok(true) => Ordering::Less,
                            Ok(false) => Ordering::Greater,
                            Err(e) => {
                                err = Some(e);
                                Ordering::Equal
                            }
                        }
                    });
                    if let Some(e) = err {
                        return Err(e);
                    }
                    c[2] += 1;
                    c[3] += (sorted == line) as usize;
                }
            }
            for &u in f.vertices().iter().filter(|&&u| inner(u)) {
                c[4] += 1;
                c[5] += (seen.get(&u) == Some(&1)) as usize;
                c[6] += f.successor(u)?.is_some() as usize;
            }
            c[7] = f.len();
            Ok(c)
        })
        .collect::<Result<Vec<[usize; 8]>>>()?;
    let mut t = [0usize; 8];
    for c in &counts {
        for k in 0..8 {
            t[k] += c[k];
        }
    }
    let mut r = EstimateReport::new("succession", p, n, samples);
    r.used = samples;
    r.estimate = fraction(t[1], t[0]);
    r.diag("successor_steps", t[0] as f64);
    r.diag("inverse_ok", t[1] as f64);
    r.diag("components_sorted", t[2] as f64);
    r.diag("components_sort_ok", t[3] as f64);
    r.diag("inner_members", t[4] as f64);
    r.diag("inner_seen_once", t[5] as f64);
    r.diag("inner_successor_defined", t[6] as f64);
    r.diag("members", t[7] as f64);
    Ok(r)
}

/// Number of crossings of the line `x = alpha t` by the first `n` steps of
/// the right-most path of the origin, over surviving seeds.
pub fn crossing_growth(
    p: f64,
    alpha: f64,
    ladder: &[i64],
    margin: Option<i64>,
    samples: usize,
    seed: u64,
) -> Result<Vec<EstimateReport>> {
    check_samples(samples)?;
    let mut rows = Vec::new();
    for &n in ladder {
        let m = margin_for(n, margin);
        let counts = (0..samples as u64)
            .into_par_iter()
            .map(|i| {
                let Some(path) =
                    surviving(rightmost_path(ORIGIN, n + m, &env(seed, "crossing", i, p)))?
                else {
                    return Ok(None);
                };
                let prefix = PathRec::new(
                    path.origin,
                    path.steps[..n as usize].to_vec(),
                    Direction::Forward,
                );
                Ok(Some(crossing_points(&prefix, alpha)?.len() as f64))
            })
            .collect::<Result<Vec<Option<f64>>>>()?;
        let counts: Vec<f64> = counts.into_iter().flatten().collect();
        let mut r = EstimateReport::new("crossing", p, n, samples);
        r.used = counts.len();
        r.estimate = stats::median(&counts);
        r.se = stats::bootstrap_se(
            counts.len(),
            200,
            sample_seed(seed, "crossing-bootstrap", n as u64),
            |idx| stats::median(&idx.iter().map(|&i| counts[i]).collect::<Vec<_>>()).unwrap(),
        );
        r.diag("alpha", alpha);
        if let Some(mean) = stats::mean(&counts) {
            r.diag("mean_crossings", mean);
        }
        rows.push(r);
    }
    Ok(rows)
}

/// Coupled monotonicity in `p`: right edges and clusters of the origin up to
/// height `n`, compared between consecutive points of an increasing grid.
pub fn monotone_coupling(
    p_grid: &[f64],
    n: i64,
    samples: usize,
    seed: u64,
) -> Result<EstimateReport> {
    check_samples(samples)?;
    if p_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation {
            field: "p".into(),
            msg: "grid must be strictly increasing".into(),
        });
    }
    let window = Window::cone_box(ORIGIN, Direction::Forward, n);
    let checks = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let base = sample_seed(seed, "monotone", i);
            let mut ok = 0usize;
            let mut prev: Option<(Vec<Option<i64>>, std::collections::BTreeSet<Vertex>)> = None;
            for &p in p_grid {
                let cfg = EdgeConfig::new(base, p);
                let edges: Vec<Option<i64>> = right_edge_series(&cfg, n)?
                    .into_iter()
                    .map(|e| if e.truncated { None } else { e.column })
                    .collect();
                let c = cluster(ORIGIN, &cfg, window)?;
                if let Some((pe, pc)) = &prev {
                    // `None < Some`, so extinction below is fine
                    let edges_ok = pe.iter().zip(&edges).all(|(a, b)| a <= b);
                    ok += (edges_ok && pc.is_subset(&c)) as usize;
                }
                prev = Some((edges, c));
            }
            Ok(ok)
        })
        .collect::<Result<Vec<usize>>>()?;
    let comparisons = samples * p_grid.len().saturating_sub(1);
    let ok: usize = checks.iter().sum();
    let mut r = EstimateReport::new("monotone", p_grid[0], n, samples);
    r.label = format!("p={}..{}", p_grid[0], p_grid[p_grid.len() - 1]);
    r.used = samples;
    r.estimate = fraction(ok, comparisons);
    r.diag("comparisons", comparisons as f64);
    r.diag("violations", (comparisons - ok) as f64);
    Ok(r)
}
