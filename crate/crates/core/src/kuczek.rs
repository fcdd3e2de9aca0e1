//! Right edge, break points and the coalescing walks built from them.
//!
//! Started from a single percolating site `u`, the right edge `r'_n` of the
//! forward cluster touches the right-most path exactly at the levels where the
//! edge site itself percolates. Those levels are the break points; the
//! increments between consecutive ones are i.i.d. and their partial sums form
//! a random walk that tracks the right-most path.
//!
//! Everything here is certified against one horizon level: a site
//! "percolates" when it reaches the horizon, and records above
//! `horizon - margin` are dropped.

use std::fmt::Write as _;

use crate::band;
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::lattice::{Direction, Side, Vertex, Window};
use crate::paths::PathRec;
use crate::reach::AliveField;
use crate::rows::{step_up, BitRow};

/// One level of the right edge of the half-line process.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RightEdge {
    pub level: i64,
    /// `None` once the process has died out.
    pub column: Option<i64>,
    /// Set when the column is far enough left that the cut-off half-line may
    /// have mattered.
    pub truncated: bool,
}

/// `r_n` for `n = 0..=n_max`, started from `{x <= 0}` on level 0.
pub fn right_edge_series<E: Environment + ?Sized>(env: &E, n_max: i64) -> Result<Vec<RightEdge>> {
    if n_max < 0 {
        return Err(Error::Contract(format!("negative length {n_max}")));
    }
    let left = -2 * n_max;
    let need = Window {
        x_min: left,
        x_max: n_max,
        t_min: 0,
        t_max: n_max,
    };
    if let Some(b) = env.bounds() {
        if !b.contains_window(&need) {
            return Err(Error::InsufficientWindow {
                what: "right edge",
                needed: need,
                have: b,
            });
        }
    }
    let mut row = BitRow::full(left, 0, 0);
    let mut out = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        if n > 0 {
            row = step_up(env, &row, n - 1, left, n);
        }
        let column = row.max_col();
        out.push(RightEdge {
            level: n,
            column,
            truncated: column.is_some_and(|c| c < -n_max),
        });
    }
    Ok(out)
}

/// One renewal of the right edge: the `m`-th break point is reached `tau`
/// levels after the previous one, `x` columns further right.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BreakRecord {
    /// Level offset from the origin.
    pub t: i64,
    pub x: i64,
    pub tau: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BreakPointSeries {
    pub origin: Vertex,
    /// Absolute level used for certification.
    pub horizon: i64,
    pub margin: i64,
    pub records: Vec<BreakRecord>,
}

impl BreakPointSeries {
    /// Absolute break vertices.
    pub fn vertices(&self) -> Vec<Vertex> {
        let mut x = self.origin.x();
        self.records
            .iter()
            .map(|r| {
                x += r.x;
                Vertex::at(x, self.origin.t() + r.t)
            })
            .collect()
    }

    pub fn last_level(&self) -> i64 {
        self.records.last().map_or(0, |r| r.t)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,T,X,tau\n");
        for (m, r) in self.records.iter().enumerate() {
            writeln!(out, "{},{},{},{}", m + 1, r.t, r.x, r.tau).unwrap();
        }
        out
    }
}

fn check_margin(n: i64, margin: i64) -> Result<()> {
    if n < 1 {
        return Err(Error::Contract(format!(
            "height must be at least 1, got {n}"
        )));
    }
    if margin < 0 || margin >= n {
        return Err(Error::Contract(format!("margin {margin} outside [0, {n})")));
    }
    Ok(())
}

fn check_cones<E: Environment + ?Sized>(env: &E, origins: &[Vertex], horizon: i64) -> Result<()> {
    let Some(b) = env.bounds() else { return Ok(()) };
    for &u in origins {
        let need = Window::cone_box(u, Direction::Forward, horizon - u.t());
        if !b.contains_window(&need) {
            return Err(Error::InsufficientWindow {
                what: "origin cone",
                needed: need,
                have: b,
            });
        }
    }
    Ok(())
}

/// Break records of `u` against a given alive field, keeping levels up to
/// `last` (absolute).
pub(crate) fn break_records<E: Environment + ?Sized>(
    env: &E,
    alive: &AliveField,
    u: Vertex,
    last: i64,
) -> Result<Vec<BreakRecord>> {
    if !alive.alive(u) {
        return Err(Error::NoPath(u));
    }
    let mut records = Vec::new();
    let mut row = BitRow::from_columns(u.x(), u.x(), [u.x()]);
    let (mut prev_t, mut prev_x) = (0i64, u.x());
    for k in 1..=(last - u.t()) {
        let t = u.t() + k;
        row = step_up(env, &row, t - 1, u.x() - k, u.x() + k);
        // u reaches the horizon, so the cluster cannot die below it
        let r = row
            .max_col()
            .expect("cluster of a percolating site died out");
        if alive.alive(Vertex::at(r, t)) {
            records.push(BreakRecord {
                t: k,
                x: r - prev_x,
                tau: k - prev_t,
            });
            prev_t = k;
            prev_x = r;
        }
    }
    Ok(records)
}

/// Break points of `u`, certified against level `t(u) + n`.
pub fn break_points<E: Environment + ?Sized>(
    u: Vertex,
    env: &E,
    n: i64,
    margin: i64,
) -> Result<BreakPointSeries> {
    check_margin(n, margin)?;
    let horizon = u.t() + n;
    check_cones(env, &[u], horizon)?;
    let records = band::break_records(env, u, horizon, horizon - margin).ok_or(Error::NoPath(u))?;
    Ok(BreakPointSeries {
        origin: u,
        horizon,
        margin,
        records,
    })
}

/// Jump chain of the walk: `(level, column)` in absolute coordinates, starting
/// with the origin itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkPath {
    pub origin: Vertex,
    pub jumps: Vec<(i64, i64)>,
}

impl WalkPath {
    pub fn from_series(s: &BreakPointSeries) -> Self {
        let mut jumps = vec![(s.origin.t(), s.origin.x())];
        jumps.extend(s.vertices().iter().map(|v| (v.t(), v.x())));
        WalkPath {
            origin: s.origin,
            jumps,
        }
    }

    /// Displacement from the origin column at `level`; the walk holds its
    /// value between jumps. `None` below the origin or past the last jump.
    pub fn position(&self, level: i64) -> Option<i64> {
        let last = self.jumps.last()?;
        if level < self.origin.t() || level > last.0 {
            return None;
        }
        let k = self.jumps.partition_point(|&(t, _)| t <= level);
        Some(self.jumps[k - 1].1 - self.origin.x())
    }

    /// Jump vertices, excluding the origin.
    pub fn jump_vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.jumps[1..].iter().map(|&(t, x)| Vertex::at(x, t))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,column\n");
        for (t, x) in &self.jumps {
            writeln!(out, "{t},{x}").unwrap();
        }
        out
    }
}

pub fn walk<E: Environment + ?Sized>(u: Vertex, env: &E, n: i64, margin: i64) -> Result<WalkPath> {
    Ok(WalkPath::from_series(&break_points(u, env, n, margin)?))
}

/// Common certification setup for a pair of origins.
pub(crate) struct PairField {
    pub horizon: i64,
    pub cutoff: i64,
}

pub(crate) fn pair_field<E: Environment + ?Sized>(
    u1: Vertex,
    u2: Vertex,
    env: &E,
    n: i64,
    margin: i64,
) -> Result<PairField> {
    check_margin(n, margin)?;
    let horizon = u1.t().max(u2.t()) + n;
    check_cones(env, &[u1, u2], horizon)?;
    Ok(PairField {
        horizon,
        cutoff: horizon - margin,
    })
}

/// First synchronized jump of the two walks onto the same column, at or below
/// `horizon - margin`, where `horizon = max(t1, t2) + n`.
pub fn walks_meet<E: Environment + ?Sized>(
    u1: Vertex,
    u2: Vertex,
    env: &E,
    n: i64,
    margin: i64,
) -> Result<Option<Vertex>> {
    let pf = pair_field(u1, u2, env, n, margin)?;
    walks_meet_in(env, &pf, u1, u2)
}

pub(crate) fn walks_meet_in<E: Environment + ?Sized>(
    env: &E,
    pf: &PairField,
    u1: Vertex,
    u2: Vertex,
) -> Result<Option<Vertex>> {
    let to_vertices = |u: Vertex| -> Result<Vec<Vertex>> {
        let s = BreakPointSeries {
            origin: u,
            horizon: pf.horizon,
            margin: pf.horizon - pf.cutoff,
            records: band::break_records(env, u, pf.horizon, pf.cutoff).ok_or(Error::NoPath(u))?,
        };
        Ok(s.vertices())
    };
    let a = to_vertices(u1)?;
    let b = to_vertices(u2)?;
    let floor = u1.t().max(u2.t());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].t().cmp(&b[j].t()) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                if a[i] == b[j] && a[i].t() >= floor {
                    return Ok(Some(a[i]));
                }
                i += 1;
                j += 1;
            }
        }
    }
    Ok(None)
}

/// Which extremal paths to intersect.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeetKind {
    /// Right-most from both origins.
    Right,
    /// Left-most from both origins.
    Left,
    /// Right-most from the first origin, left-most from the second.
    Mixed,
}

/// The two extremal paths of a pair, each run up to the common horizon.
pub(crate) fn pair_paths<E: Environment + ?Sized>(
    env: &E,
    pf: &PairField,
    u1: Vertex,
    u2: Vertex,
    kind: MeetKind,
) -> Result<(PathRec, PathRec)> {
    let (s1, s2) = match kind {
        MeetKind::Right => (Side::Right, Side::Right),
        MeetKind::Left => (Side::Left, Side::Left),
        MeetKind::Mixed => (Side::Right, Side::Left),
    };
    let mk = |u: Vertex, s: Side| -> Result<PathRec> {
        let steps = band::extremal_steps(env, u, pf.horizon, s).ok_or(Error::NoPath(u))?;
        Ok(PathRec::new(u, steps, Direction::Forward))
    };
    Ok((mk(u1, s1)?, mk(u2, s2)?))
}

/// Lowest common vertex of two level-monotone paths, at or below `cutoff`.
pub(crate) fn lowest_common(a: &PathRec, b: &PathRec, cutoff: i64) -> Option<Vertex> {
    let lo = a.origin.t().max(b.origin.t());
    let hi = a.end().t().min(b.end().t()).min(cutoff);
    let ca = a.columns();
    let cb = b.columns();
    (lo..=hi).find_map(|t| {
        let xa = ca[(t - a.origin.t()) as usize];
        let xb = cb[(t - b.origin.t()) as usize];
        (xa == xb).then(|| Vertex::at(xa, t))
    })
}

/// Lowest vertex shared by the chosen extremal paths of `u1` and `u2`, at or
/// below `max(t1, t2) + n - margin`.
pub fn paths_meet<E: Environment + ?Sized>(
    u1: Vertex,
    u2: Vertex,
    env: &E,
    n: i64,
    margin: i64,
    kind: MeetKind,
) -> Result<Option<Vertex>> {
    let pf = pair_field(u1, u2, env, n, margin)?;
    let (a, b) = pair_paths(env, &pf, u1, u2, kind)?;
    Ok(lowest_common(&a, &b, pf.cutoff))
}

/// Path vertices whose incoming edge, as a closed segment, meets the line
/// `x = alpha * t`.
pub fn crossing_points(path: &PathRec, alpha: f64) -> Result<Vec<Vertex>> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Contract(format!(
            "slope must be positive, got {alpha}"
        )));
    }
    let side = |v: &Vertex| v.x() as f64 - alpha * v.t() as f64;
    Ok(path
        .vertices()
        .windows(2)
        .filter(|w| {
            let (a, b) = (side(&w[0]), side(&w[1]));
            a == 0.0 || b == 0.0 || (a < 0.0) != (b < 0.0)
        })
        .map(|w| w[1])
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{EdgeConfig, ExplicitConfig};
    use crate::lattice::EdgeRef;
    use crate::paths::rightmost_path;

    fn v(x: i64, t: i64) -> Vertex {
        Vertex::new(x, t).unwrap()
    }

    #[test]
    fn right_edge_examples() {
        let r = right_edge_series(&EdgeConfig::new(0, 1.0), 50).unwrap();
        assert!(r.iter().all(|e| e.column == Some(e.level) && !e.truncated));
        let r = right_edge_series(&EdgeConfig::new(0, 0.0), 5).unwrap();
        assert_eq!(r[0].column, Some(0));
        assert!(r[1..].iter().all(|e| e.column.is_none()));
    }

    #[test]
    fn right_edge_matches_a_wider_start() {
        // the cut at -2n does not change any unflagged value
        let cfg = EdgeConfig::new(3, 0.65);
        let n = 80;
        let r = right_edge_series(&cfg, n).unwrap();
        let mut row = BitRow::full(-10 * n, 0, 0);
        for k in 1..=n {
            row = step_up(&cfg, &row, k - 1, -10 * n, k);
            if !r[k as usize].truncated {
                assert_eq!(row.max_col(), r[k as usize].column);
            }
        }
    }

    fn six_edge() -> ExplicitConfig {
        ExplicitConfig::closed(Window::new(-2, 2, 0, 2).unwrap()).with_open(&[
            EdgeRef::new(v(0, 0), Side::Left),
            EdgeRef::new(v(0, 0), Side::Right),
            EdgeRef::new(v(-1, 1), Side::Right),
        ])
    }

    #[test]
    fn break_point_examples() {
        let s = break_points(v(0, 0), &EdgeConfig::new(0, 1.0), 20, 4).unwrap();
        assert_eq!(s.records.len(), 16);
        assert!(s.records.iter().enumerate().all(|(m, r)| *r
            == BreakRecord {
                t: m as i64 + 1,
                x: 1,
                tau: 1
            }));
        let s = break_points(v(0, 0), &six_edge(), 2, 0).unwrap();
        assert_eq!(s.records, vec![BreakRecord { t: 2, x: 0, tau: 2 }]);
        assert_eq!(s.to_csv(), "m,T,X,tau\n1,2,0,2\n");
        assert!(matches!(
            break_points(v(0, 0), &EdgeConfig::new(0, 0.0), 5, 1),
            Err(Error::NoPath(_))
        ));
    }

    #[test]
    fn walk_follows_the_rightmost_path() {
        for seed in 0..40 {
            let cfg = EdgeConfig::new(seed, 0.8);
            let Ok(w) = walk(v(0, 0), &cfg, 300, 60) else {
                continue;
            };
            let p = rightmost_path(v(0, 0), 300, &cfg).unwrap();
            for z in w.jump_vertices() {
                assert_eq!(p.column_at(z.t()), Some(z.x()));
                assert_eq!(w.position(z.t()), Some(z.x()));
            }
            let s = break_points(v(0, 0), &cfg, 300, 60).unwrap();
            for r in &s.records {
                assert!(r.tau >= 1 && r.x.abs() <= r.tau && (r.x - r.tau) % 2 == 0);
            }
            assert_eq!(s.records.iter().map(|r| r.tau).sum::<i64>(), s.last_level());
        }
    }

    #[test]
    fn walk_positions_hold_between_jumps() {
        let w = WalkPath {
            origin: v(2, 0),
            jumps: vec![(0, 2), (3, 5), (4, 4)],
        };
        assert_eq!(w.position(0), Some(0));
        assert_eq!(w.position(2), Some(0));
        assert_eq!(w.position(3), Some(3));
        assert_eq!(w.position(4), Some(2));
        assert_eq!(w.position(5), None);
        assert_eq!(w.to_csv(), "level,column\n0,2\n3,5\n4,4\n");
    }

    #[test]
    fn meeting_examples() {
        let full = EdgeConfig::new(0, 1.0);
        assert_eq!(walks_meet(v(0, 0), v(-2, 0), &full, 30, 5).unwrap(), None);
        assert_eq!(
            walks_meet(v(0, 0), v(0, 0), &full, 30, 5).unwrap(),
            Some(v(1, 1))
        );
        assert_eq!(
            paths_meet(v(0, 0), v(0, 0), &full, 30, 5, MeetKind::Right).unwrap(),
            Some(v(0, 0))
        );
        assert_eq!(
            paths_meet(v(0, 0), v(4, 0), &full, 30, 5, MeetKind::Right).unwrap(),
            None
        );
        assert_eq!(
            paths_meet(v(0, 0), v(4, 0), &full, 30, 5, MeetKind::Mixed).unwrap(),
            Some(v(2, 2))
        );
        assert_eq!(
            paths_meet(v(4, 0), v(0, 0), &full, 30, 5, MeetKind::Mixed).unwrap(),
            None
        );

        // (0,0) and (2,0) both feed (1,1), which continues alone
        let cfg = ExplicitConfig::closed(Window::new(-4, 6, 0, 4).unwrap()).with_open(&[
            EdgeRef::new(v(0, 0), Side::Right),
            EdgeRef::new(v(2, 0), Side::Left),
            EdgeRef::new(v(1, 1), Side::Right),
            EdgeRef::new(v(2, 2), Side::Left),
        ]);
        assert_eq!(
            walks_meet(v(0, 0), v(2, 0), &cfg, 3, 0).unwrap(),
            Some(v(1, 1))
        );
        assert_eq!(
            paths_meet(v(0, 0), v(2, 0), &cfg, 3, 0, MeetKind::Right).unwrap(),
            Some(v(1, 1))
        );
    }

    #[test]
    fn meeting_is_symmetric() {
        for seed in 0..30 {
            let cfg = EdgeConfig::new(seed, 0.8);
            let (a, b) = (v(0, 0), v(6, 0));
            let ab = walks_meet(a, b, &cfg, 200, 40);
            let ba = walks_meet(b, a, &cfg, 200, 40);
            match (ab, ba) {
                (Ok(x), Ok(y)) => {
                    assert_eq!(x, y);
                    let p = paths_meet(a, b, &cfg, 200, 40, MeetKind::Right).unwrap();
                    assert_eq!(p, paths_meet(b, a, &cfg, 200, 40, MeetKind::Right).unwrap());
                    if let Some(z) = x {
                        assert!(p.is_some_and(|q| q.t() <= z.t()));
                    }
                }
                (Err(_), Err(_)) => {}
                other => panic!("asymmetric {other:?}"),
            }
        }
    }

    #[test]
    fn crossing_examples() {
        let diag = PathRec::new(v(0, 0), vec![Side::Right; 10], Direction::Forward);
        assert_eq!(crossing_points(&diag, 1.0).unwrap().len(), 10);
        assert_eq!(crossing_points(&diag, 0.5).unwrap(), vec![v(1, 1)]);
        assert!(crossing_points(&diag, 0.0).is_err());
        assert!(crossing_points(&diag, -1.0).is_err());
        let zig = PathRec::new(
            v(0, 0),
            vec![Side::Left, Side::Right, Side::Right, Side::Left],
            Direction::Forward,
        );
        // columns 0,-1,0,1,0 against x = 0.2 t
        assert_eq!(
            crossing_points(&zig, 0.2).unwrap(),
            vec![v(-1, 1), v(1, 3), v(0, 4)]
        );
    }
}
