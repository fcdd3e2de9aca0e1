//! Right-most and left-most open paths, buds and side clusters.
//!
//! The right-most path from `u` to height `N` is found in two passes: a
//! downward sweep marks every site that still reaches level `t(u) + N`, then a
//! walk from `u` takes the right child whenever that edge is open and the child
//! is marked. At every level the walk sits on the largest column of
//! `C_u ∩ K_N`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::band;
use crate::env::{Environment, Reversed};
use crate::error::{Error, Result};
use crate::lattice::{Direction, EdgeRef, Side, Vertex, Window};
use crate::reach::AliveField;
use crate::rows::{step_up, BitRow};

/// A finite open path, stored as its origin and a sequence of turns.
///
/// Forward paths climb one level per step; backward (anti-oriented) paths
/// descend, with `L` meaning column `x - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathRec {
    pub origin: Vertex,
    pub steps: Vec<Side>,
    pub direction: Direction,
}

impl PathRec {
    pub fn new(origin: Vertex, steps: Vec<Side>, direction: Direction) -> Self {
        PathRec {
            origin,
            steps,
            direction,
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    fn dt(&self) -> i64 {
        match self.direction {
            Direction::Forward => 1,
            Direction::Backward => -1,
        }
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        let dt = self.dt();
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        let mut v = self.origin;
        out.push(v);
        for s in &self.steps {
            v = Vertex::at(v.x() + s.dx(), v.t() + dt);
            out.push(v);
        }
        out
    }

    pub fn end(&self) -> Vertex {
        *self.vertices().last().unwrap()
    }

    /// The oriented edges traversed, each named by its lower endpoint.
    pub fn edges(&self) -> Vec<EdgeRef> {
        let vs = self.vertices();
        vs.windows(2)
            .zip(&self.steps)
            .map(|(pair, &s)| match self.direction {
                Direction::Forward => EdgeRef::new(pair[0], s),
                Direction::Backward => EdgeRef::new(pair[1], s.flip()),
            })
            .collect()
    }

    /// Index of `v` along the path.
    pub fn position(&self, v: Vertex) -> Option<usize> {
        let k = (v.t() - self.origin.t()) * self.dt();
        if k < 0 || k as usize > self.steps.len() {
            return None;
        }
        let k = k as usize;
        (self.column_at_index(k) == v.x()).then_some(k)
    }

    fn column_at_index(&self, k: usize) -> i64 {
        self.origin.x() + self.steps[..k].iter().map(|s| s.dx()).sum::<i64>()
    }

    /// Column of the path on level `t`, if the path visits that level.
    pub fn column_at(&self, t: i64) -> Option<i64> {
        let k = (t - self.origin.t()) * self.dt();
        (k >= 0 && k as usize <= self.steps.len()).then(|| self.column_at_index(k as usize))
    }

    /// Per-level columns; `cols[k]` is the column at offset `k`.
    pub fn columns(&self) -> Vec<i64> {
        self.vertices().iter().map(|v| v.x()).collect()
    }

    pub fn is_open_under<E: Environment + ?Sized>(&self, env: &E) -> bool {
        self.edges().iter().all(|&e| env.is_open(e))
    }
}

impl fmt::Display for PathRec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let steps: String = self.steps.iter().map(|s| s.as_char()).collect();
        write!(f, "origin {}; steps {}", self.origin, steps)?;
        if self.direction == Direction::Backward {
            write!(f, "; anti")?;
        }
        Ok(())
    }
}

impl FromStr for PathRec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse {
            line: 1,
            msg: format!("{msg}: {s:?}"),
        };
        let mut parts = s.trim().split(';').map(str::trim);
        let origin = parts
            .next()
            .and_then(|p| p.strip_prefix("origin"))
            .ok_or_else(|| bad("missing origin"))?
            .trim()
            .parse::<Vertex>()?;
        let steps = parts
            .next()
            .and_then(|p| p.strip_prefix("steps"))
            .ok_or_else(|| bad("missing steps"))?
            .trim()
            .chars()
            .map(|c| Side::from_char(c).ok_or_else(|| bad("bad step")))
            .collect::<Result<Vec<_>>>()?;
        let direction = match parts.next() {
            None => Direction::Forward,
            Some("anti") => Direction::Backward,
            Some(_) => return Err(bad("unknown suffix")),
        };
        if parts.next().is_some() {
            return Err(bad("trailing fields"));
        }
        Ok(PathRec::new(origin, steps, direction))
    }
}

/// Walk up from `u` for `steps` levels inside the alive set, taking `prefer`
/// whenever possible. `u` must be alive.
pub(crate) fn greedy_steps<E: Environment + ?Sized>(
    env: &E,
    alive: &AliveField,
    u: Vertex,
    steps: i64,
    prefer: Side,
) -> Vec<Side> {
    let mut out = Vec::with_capacity(steps.max(0) as usize);
    let mut v = u;
    for _ in 0..steps {
        let side = if env.is_open(EdgeRef::new(v, prefer)) && alive.alive(v.child(prefer)) {
            prefer
        } else {
            let other = prefer.flip();
            debug_assert!(env.is_open(EdgeRef::new(v, other)) && alive.alive(v.child(other)));
            other
        };
        out.push(side);
        v = v.child(side);
    }
    out
}

fn check_height<E: Environment + ?Sized>(env: &E, u: Vertex, n: i64, dir: Direction) -> Result<()> {
    if n < 1 {
        return Err(Error::Contract(format!(
            "height must be at least 1, got {n}"
        )));
    }
    let need = Window::cone_box(u, dir, n);
    match env.bounds() {
        Some(have) if !have.contains_window(&need) => Err(Error::InsufficientWindow {
            what: "path",
            needed: need,
            have,
        }),
        _ => Ok(()),
    }
}

fn extremal_path<E: Environment + ?Sized>(
    u: Vertex,
    n: i64,
    env: &E,
    prefer: Side,
) -> Result<PathRec> {
    check_height(env, u, n, Direction::Forward)?;
    let steps = band::extremal_steps(env, u, u.t() + n, prefer).ok_or(Error::NoPath(u))?;
    Ok(PathRec::new(u, steps, Direction::Forward))
}

/// `gamma_u` up to relative height `n`.
pub fn rightmost_path<E: Environment + ?Sized>(u: Vertex, n: i64, env: &E) -> Result<PathRec> {
    extremal_path(u, n, env, Side::Right)
}

/// `l_u` up to relative height `n`.
pub fn leftmost_path<E: Environment + ?Sized>(u: Vertex, n: i64, env: &E) -> Result<PathRec> {
    extremal_path(u, n, env, Side::Left)
}

/// Left-most anti-oriented open path from `u` down `depth` levels.
pub fn anti_leftmost_path<E: Environment + ?Sized>(
    u: Vertex,
    depth: i64,
    env: &E,
) -> Result<PathRec> {
    check_height(env, u, depth, Direction::Backward)?;
    let rev = Reversed {
        inner: env,
        pivot: u.t(),
    };
    let up = extremal_path(u, depth, &rev, Side::Left).map_err(|e| match e {
        Error::NoPath(_) => Error::NoPath(u),
        other => other,
    })?;
    Ok(PathRec::new(u, up.steps, Direction::Backward))
}

/// `env` with the edges of one forward path closed.
struct WithoutPath<'a, E: ?Sized> {
    inner: &'a E,
    t0: i64,
    edges: Vec<EdgeRef>,
}

impl<E: Environment + ?Sized> WithoutPath<'_, E> {
    fn edge_at(&self, t: i64) -> Option<EdgeRef> {
        let k = t - self.t0;
        (k >= 0)
            .then(|| self.edges.get(k as usize).copied())
            .flatten()
    }
}

impl<E: Environment + ?Sized> Environment for WithoutPath<'_, E> {
    fn is_open(&self, e: EdgeRef) -> bool {
        self.edge_at(e.from.t()) != Some(e) && self.inner.is_open(e)
    }

    fn bounds(&self) -> Option<Window> {
        self.inner.bounds()
    }

    fn fill_row(&self, t: i64, lo: i64, len: usize, left: &mut [u64], right: &mut [u64]) {
        self.inner.fill_row(t, lo, len, left, right);
        if let Some(e) = self.edge_at(t) {
            let i = e.from.x() - lo;
            if i >= 0 && (i as usize) < len {
                let i = i as usize;
                let words = if e.side == Side::Left { left } else { right };
                words[i / 64] &= !(1u64 << (i % 64));
            }
        }
    }
}

/// Sites strictly on `side` of `path` (same-level comparison, path levels
/// only) reachable inside `window` from the path vertices at indices
/// `from..to` without using any path edge.
fn side_reach<E: Environment + ?Sized>(
    path: &PathRec,
    from: usize,
    to: usize,
    side: Side,
    env: &E,
    window: Window,
) -> Result<BTreeSet<Vertex>> {
    if path.direction != Direction::Forward {
        return Err(Error::Contract("buds are defined for forward paths".into()));
    }
    let verts = path.vertices();
    let cut = WithoutPath {
        inner: env,
        t0: path.origin.t(),
        edges: path.edges(),
    };
    let t_first = verts[from].t().max(window.t_min);
    let t_last = path.end().t().min(window.t_max);
    let mut out = BTreeSet::new();
    let mut row = BitRow::span(window.x_min, window.x_max);
    for t in t_first..=t_last {
        if t > t_first {
            row = step_up(&cut, &row, t - 1, window.x_min, window.x_max);
        }
        let k = (t - path.origin.t()) as usize;
        if k >= from && k < to && window.contains(verts[k]) {
            row.set(verts[k].x());
        }
        let c = verts[k].x();
        out.extend(
            row.columns()
                .filter(|&x| match side {
                    Side::Right => x > c,
                    Side::Left => x < c,
                })
                .map(|x| Vertex::at(x, t)),
        );
    }
    Ok(out)
}

/// `b_r(v, path)` or `b_l(v, path)` within `window`.
pub fn buds<E: Environment + ?Sized>(
    v: Vertex,
    path: &PathRec,
    side: Side,
    env: &E,
    window: Window,
) -> Result<BTreeSet<Vertex>> {
    let k = path.position(v).ok_or(Error::NotOnPath(v))?;
    side_reach(path, k, k + 1, side, env, window)
}

/// `C_r` or `C_l` of the piece of `path` from `u` to `v`, excluding `v`.
pub fn side_cluster<E: Environment + ?Sized>(
    path: &PathRec,
    u: Vertex,
    v: Vertex,
    side: Side,
    env: &E,
    window: Window,
) -> Result<BTreeSet<Vertex>> {
    let i = path.position(u).ok_or(Error::NotOnPath(u))?;
    let j = path.position(v).ok_or(Error::NotOnPath(v))?;
    if i > j {
        return Err(Error::Contract(format!("{u} comes after {v} on the path")));
    }
    side_reach(path, i, j, side, env, window)
}

/// Number of leading steps on which the right-most paths to heights `n1` and
/// `n2` agree.
pub fn stabilization_prefix<E: Environment + ?Sized>(
    u: Vertex,
    env: &E,
    n1: i64,
    n2: i64,
) -> Result<i64> {
    if n1 > n2 {
        return Err(Error::Contract(format!(
            "heights out of order: {n1} > {n2}"
        )));
    }
    let long = rightmost_path(u, n2, env)?;
    let short = rightmost_path(u, n1, env)?;
    Ok(short
        .steps
        .iter()
        .zip(&long.steps)
        .take_while(|(a, b)| a == b)
        .count() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{EdgeConfig, ExplicitConfig, Mirror};
    use crate::reach::{anti_cluster, cluster, percolates_to};

    fn v(x: i64, t: i64) -> Vertex {
        Vertex::new(x, t).unwrap()
    }

    fn six_edge() -> ExplicitConfig {
        ExplicitConfig::closed(Window::new(-2, 2, 0, 2).unwrap()).with_open(&[
            EdgeRef::new(v(0, 0), Side::Left),
            EdgeRef::new(v(0, 0), Side::Right),
            EdgeRef::new(v(-1, 1), Side::Right),
        ])
    }

    #[test]
    fn text_round_trip() {
        let p = PathRec::new(
            v(1, 3),
            vec![Side::Right, Side::Left, Side::Right, Side::Right],
            Direction::Forward,
        );
        assert_eq!(p.to_string(), "origin 1,3; steps RLRR");
        assert_eq!(p.to_string().parse::<PathRec>().unwrap(), p);
        let a = PathRec::new(v(0, 0), vec![Side::Left], Direction::Backward);
        assert_eq!(a.to_string().parse::<PathRec>().unwrap(), a);
        assert_eq!(a.end(), v(-1, -1));
        assert_eq!(a.edges(), vec![EdgeRef::new(v(-1, -1), Side::Right)]);
        assert!("origin 1,3; steps RXL".parse::<PathRec>().is_err());
    }

    #[test]
    fn rightmost_examples() {
        let p = rightmost_path(v(0, 0), 5, &EdgeConfig::new(0, 1.0)).unwrap();
        assert_eq!(p.steps, vec![Side::Right; 5]);
        let p = rightmost_path(v(0, 0), 2, &six_edge()).unwrap();
        assert_eq!(p.vertices(), vec![v(0, 0), v(-1, 1), v(0, 2)]);
        assert!(matches!(
            rightmost_path(v(0, 0), 3, &EdgeConfig::new(0, 0.0)),
            Err(Error::NoPath(_))
        ));
    }

    #[test]
    fn rightmost_dominates_cluster_and_alive() {
        let cfg = EdgeConfig::new(19, 0.7);
        let u = v(0, 0);
        let n = 60;
        if !percolates_to(u, n, &cfg).unwrap() {
            return;
        }
        let p = rightmost_path(u, n, &cfg).unwrap();
        assert!(p.is_open_under(&cfg));
        let c = cluster(u, &cfg, Window::new(-n, n, 0, n).unwrap()).unwrap();
        for w in &c {
            if w.x() > p.column_at(w.t()).unwrap() {
                assert!(w.t() < n && !percolates_to(*w, n - w.t(), &cfg).unwrap());
            }
        }
    }

    #[test]
    fn leftmost_is_mirrored_rightmost() {
        for seed in 0..20 {
            let cfg = EdgeConfig::new(seed, 0.7);
            let u = v(2, 0);
            match (
                leftmost_path(u, 30, &cfg),
                rightmost_path(u.mirrored(), 30, &Mirror(&cfg)),
            ) {
                (Ok(l), Ok(r)) => {
                    assert_eq!(
                        l.steps,
                        r.steps.iter().map(|s| s.flip()).collect::<Vec<_>>()
                    );
                }
                (Err(_), Err(_)) => {}
                other => panic!("mismatch {other:?}"),
            }
        }
    }

    #[test]
    fn anti_leftmost_is_open_and_inside_anti_cluster() {
        for seed in 0..20 {
            let cfg = EdgeConfig::new(seed, 0.75);
            let u = v(0, 20);
            if let Ok(p) = anti_leftmost_path(u, 20, &cfg) {
                assert!(p.is_open_under(&cfg));
                assert_eq!(p.end().t(), 0);
                let anti = anti_cluster(u, &cfg, 20).unwrap();
                assert!(p.vertices().iter().all(|z| anti.contains(z)));
                let lowest = anti
                    .iter()
                    .filter(|z| z.t() == 0)
                    .map(|z| z.x())
                    .min()
                    .unwrap();
                assert_eq!(p.end().x(), lowest);
            }
        }
    }

    #[test]
    fn buds_examples() {
        let w = Window::new(-6, 6, 0, 6).unwrap();
        let full = EdgeConfig::new(0, 1.0);
        let p = rightmost_path(v(0, 0), 6, &full).unwrap();
        for z in p.vertices() {
            assert!(buds(z, &p, Side::Right, &full, w).unwrap().is_empty());
        }
        assert!(matches!(
            buds(v(-2, 2), &p, Side::Right, &full, w),
            Err(Error::NotOnPath(_))
        ));

        // four right steps, plus a dead-end detour (1,1) -> (0,2) -> (-1,3)
        let spine: Vec<EdgeRef> = (0..4).map(|k| EdgeRef::new(v(k, k), Side::Right)).collect();
        let mut open = spine.clone();
        open.push(EdgeRef::new(v(1, 1), Side::Left));
        open.push(EdgeRef::new(v(0, 2), Side::Left));
        let cfg = ExplicitConfig::closed(Window::new(-4, 4, 0, 4).unwrap()).with_open(&open);
        let p = rightmost_path(v(0, 0), 4, &cfg).unwrap();
        assert_eq!(p.steps, vec![Side::Right; 4]);
        let b = buds(v(1, 1), &p, Side::Left, &cfg, cfg.window()).unwrap();
        assert_eq!(b, BTreeSet::from([v(0, 2), v(-1, 3)]));
        assert!(buds(v(1, 1), &p, Side::Right, &cfg, cfg.window())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn side_cluster_is_union_of_buds() {
        let w = Window::new(-30, 30, 0, 30).unwrap();
        for seed in 0..30 {
            let cfg = EdgeConfig::new(seed, 0.7);
            let Ok(p) = rightmost_path(v(0, 0), 30, &cfg) else {
                continue;
            };
            let vs = p.vertices();
            for side in [Side::Left, Side::Right] {
                let (a, b) = (vs[3], vs[17]);
                let whole = side_cluster(&p, a, b, side, &cfg, w).unwrap();
                let mut union = BTreeSet::new();
                for z in &vs[3..17] {
                    union.extend(buds(*z, &p, side, &cfg, w).unwrap());
                }
                assert_eq!(whole, union);
            }
            assert!(side_cluster(&p, vs[5], vs[2], Side::Left, &cfg, w).is_err());
            assert!(side_cluster(&p, vs[5], vs[5], Side::Left, &cfg, w)
                .unwrap()
                .is_empty());
        }
    }

    #[test]
    fn stabilization_examples() {
        let full = EdgeConfig::new(0, 1.0);
        assert_eq!(stabilization_prefix(v(0, 0), &full, 10, 40).unwrap(), 10);
        let cfg = EdgeConfig::new(5, 0.8);
        if percolates_to(v(0, 0), 80, &cfg).unwrap() {
            assert_eq!(stabilization_prefix(v(0, 0), &cfg, 40, 40).unwrap(), 40);
        }
        assert!(stabilization_prefix(v(0, 0), &EdgeConfig::new(0, 0.0), 1, 2).is_err());
    }
}
